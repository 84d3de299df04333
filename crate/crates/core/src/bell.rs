//! Dichotomic pseudo-spin observables and the CHSH test.
//!
//! The pseudo-spin basis maps `|-k>` to spin up and `|k>` to spin down. In
//! every two-party quantity the first setting acts on the first tensor factor.

use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix2, Matrix3, Vector3};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{kron, DensityOperator4};
use crate::error::{Error, Result};

/// Tsirelson's bound `2 sqrt(2)`.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;

/// Analyzer direction `(sin θ cos φ, sin θ sin φ, cos θ)` on the pseudo-spin
/// Bloch sphere, with `θ ∈ [0, π]` and `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementSetting {
    theta: f64,
    phi: f64,
}

impl MeasurementSetting {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidSetting(format!("theta {theta} outside [0, pi]")));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidSetting(format!("phi {phi} outside [0, 2pi)")));
        }
        Ok(Self { theta, phi })
    }

    /// Pseudo-spin z: separates `|-k>` from `|k>`.
    pub fn z() -> Self {
        Self { theta: 0.0, phi: 0.0 }
    }

    pub fn x() -> Self {
        Self { theta: PI / 2.0, phi: 0.0 }
    }

    /// Setting pointing along `direction` (normalized internally).
    pub fn from_direction(direction: Vector3<f64>) -> Self {
        let norm = direction.norm();
        if norm == 0.0 || !norm.is_finite() {
            return Self::z();
        }
        let d = direction / norm;
        let theta = d.z.clamp(-1.0, 1.0).acos();
        Self { theta, phi: wrap_phi(d.y.atan2(d.x)) }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn direction(&self) -> Vector3<f64> {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        Vector3::new(st * cp, st * sp, ct)
    }

    /// The observable with opposite sign: `θ -> π - θ`, `φ -> φ + π`.
    pub fn negated(&self) -> Self {
        Self { theta: PI - self.theta, phi: wrap_phi(self.phi + PI) }
    }
}

fn wrap_phi(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// `n · σ`, the ±1-valued observable measured by the tunable analyzer.
pub fn observable(setting: &MeasurementSetting) -> Matrix2<Complex64> {
    let (st, ct) = setting.theta.sin_cos();
    let off = Complex64::from_polar(st, setting.phi);
    Matrix2::new(
        Complex64::new(ct, 0.0),
        off.conj(),
        off,
        Complex64::new(-ct, 0.0),
    )
}

/// Settings for the two parties: `a`, `a_prime` on the first tensor factor,
/// `b`, `b_prime` on the second.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ChshSettings {
    pub a: MeasurementSetting,
    pub a_prime: MeasurementSetting,
    pub b: MeasurementSetting,
    pub b_prime: MeasurementSetting,
}

impl ChshSettings {
    /// Optimal settings for `(|-k, k> + |k, -k>)/sqrt(2)`: `b = z`, `b' = x`
    /// and `a`, `a'` at `3π/4` in the x-z plane on either side of `-z`.
    pub fn photon_pair_optimal() -> Self {
        Self {
            a: MeasurementSetting { theta: 0.75 * PI, phi: 0.0 },
            a_prime: MeasurementSetting { theta: 0.75 * PI, phi: PI },
            b: MeasurementSetting::z(),
            b_prime: MeasurementSetting::x(),
        }
    }

    /// The four setting pairs in CHSH order: `(a,b), (a,b'), (a',b), (a',b')`.
    pub fn pairs(&self) -> [(MeasurementSetting, MeasurementSetting); 4] {
        [
            (self.a, self.b),
            (self.a, self.b_prime),
            (self.a_prime, self.b),
            (self.a_prime, self.b_prime),
        ]
    }
}

/// CHSH sign of each setting pair.
pub const CHSH_SIGNS: [f64; 4] = [1.0, 1.0, 1.0, -1.0];

/// `E(a, b) = Tr(rho A ⊗ B)`.
pub fn correlation(rho: &DensityOperator4, a: &MeasurementSetting, b: &MeasurementSetting) -> f64 {
    rho.expectation(&kron(&observable(a), &observable(b)))
}

/// `S = E(a,b) + E(a,b') + E(a',b) - E(a',b')`.
pub fn chsh(rho: &DensityOperator4, settings: &ChshSettings) -> f64 {
    settings
        .pairs()
        .iter()
        .zip(CHSH_SIGNS)
        .map(|((a, b), sign)| sign * correlation(rho, a, b))
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ChshOptimum {
    pub s_max: f64,
    pub settings: ChshSettings,
}

const GRID_STEPS: usize = 24;
const REFINE_STARTS: usize = 8;
const REFINE_MIN_STEP: f64 = 1e-8;

/// Maximizes CHSH over all settings.
///
/// For fixed `b, b'` the best first-party directions are
/// `a ∝ T(b + b')` and `a' ∝ T(b - b')`, which leaves four angles. Those are
/// scanned on a 24-point-per-angle grid and the best starts refined by
/// compass search down to a step of 1e-8 rad.
pub fn optimize_chsh(rho: &DensityOperator4) -> ChshOptimum {
    let t = rho.correlation_tensor();
    let theta_at = |k: usize| k as f64 * PI / (GRID_STEPS - 1) as f64;
    let phi_at = |k: usize| k as f64 * TAU / GRID_STEPS as f64;
    let n3 = GRID_STEPS * GRID_STEPS * GRID_STEPS;
    let grid_point = |idx: usize| -> [f64; 4] {
        [
            theta_at(idx / n3),
            phi_at(idx / (GRID_STEPS * GRID_STEPS) % GRID_STEPS),
            theta_at(idx / GRID_STEPS % GRID_STEPS),
            phi_at(idx % GRID_STEPS),
        ]
    };

    let values: Vec<f64> = (0..GRID_STEPS * n3)
        .into_par_iter()
        .map(|idx| reduced_objective(&t, &grid_point(idx)))
        .collect();

    let by_value = |i: &usize, j: &usize| values[*j].total_cmp(&values[*i]).then(i.cmp(j));
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.select_nth_unstable_by(REFINE_STARTS - 1, by_value);
    order[..REFINE_STARTS].sort_by(by_value);

    let best = order[..REFINE_STARTS]
        .par_iter()
        .map(|&idx| compass_refine(&t, grid_point(idx), TAU / GRID_STEPS as f64))
        .collect::<Vec<_>>()
        .into_iter()
        .fold(None::<([f64; 4], f64)>, |acc, (x, f)| match acc {
            Some((_, g)) if g >= f => acc,
            _ => Some((x, f)),
        })
        .expect("at least one start");

    let settings = settings_from_angles(&t, &best.0);
    ChshOptimum { s_max: chsh(rho, &settings), settings }
}

fn direction(theta: f64, phi: f64) -> Vector3<f64> {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Vector3::new(st * cp, st * sp, ct)
}

fn reduced_objective(t: &Matrix3<f64>, x: &[f64; 4]) -> f64 {
    let b = direction(x[0], x[1]);
    let bp = direction(x[2], x[3]);
    (t * (b + bp)).norm() + (t * (b - bp)).norm()
}

fn compass_refine(t: &Matrix3<f64>, mut x: [f64; 4], mut step: f64) -> ([f64; 4], f64) {
    let mut fx = reduced_objective(t, &x);
    while step >= REFINE_MIN_STEP {
        let mut best: Option<([f64; 4], f64)> = None;
        for d in 0..4 {
            for s in [step, -step] {
                let mut y = x;
                y[d] += s;
                let fy = reduced_objective(t, &y);
                if fy > best.map_or(fx, |(_, f)| f) {
                    best = Some((y, fy));
                }
            }
        }
        match best {
            Some((y, fy)) => {
                x = y;
                fx = fy;
            }
            None => step *= 0.5,
        }
    }
    (x, fx)
}

fn settings_from_angles(t: &Matrix3<f64>, x: &[f64; 4]) -> ChshSettings {
    let b = direction(x[0], x[1]);
    let bp = direction(x[2], x[3]);
    ChshSettings {
        a: MeasurementSetting::from_direction(t * (b + bp)),
        a_prime: MeasurementSetting::from_direction(t * (b - bp)),
        b: MeasurementSetting::from_direction(b),
        b_prime: MeasurementSetting::from_direction(bp),
    }
}
