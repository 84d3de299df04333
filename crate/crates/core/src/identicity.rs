//! Loss of identicity and its effect on the dual entanglement.
//!
//! Partial distinguishability is modeled by an internal tag on each particle
//! whose two states overlap with modulus `v`. Tracing the tag out multiplies
//! the coherence between `|-k, k>` and `|k, -k>` by `v`: `v = 1` leaves the
//! pure dual state, `v = 0` is the different-vacua limit, a classically
//! correlated mixture.
//!
//! Two environment channels act on the same coherence:
//!
//! * identicity loss while the objects sit in separate traps, factor
//!   `exp(-gamma_id * d1 / speed)`, which depends on `d1` only;
//! * path decoherence during the superposition of paths, factor
//!   `exp(-gamma_path * (d1 + d2) / speed)`, symmetric in `d1` and `d2`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::optimize_chsh;
use crate::density::DensityOperator4;
use crate::error::{Error, Result};
use crate::experiment::route_pbs;
use crate::fock::DualPairState;

/// Basis indices of `|-k, k>` and `|k, -k>`.
const COHERENCE: (usize, usize) = (1, 2);

/// Reduced Planck constant, J s (CODATA 2018, exact).
pub const HBAR: f64 = 1.054571817e-34;
/// Boltzmann constant, J/K (exact).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Atomic mass unit, kg (CODATA 2018).
pub const ATOMIC_MASS_UNIT: f64 = 1.66053906660e-27;

/// Overlap modulus of the internal tags, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct OverlapParameter(f64);

impl OverlapParameter {
    pub const IDENTICAL: Self = Self(1.0);
    pub const DISTINGUISHABLE: Self = Self(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("overlap {v} not in [0, 1]")));
        }
        Ok(Self(v))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Dephasing of the dual coherence by a fixed factor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoherenceChannel {
    factor: f64,
}

impl CoherenceChannel {
    pub fn new(factor: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&factor) {
            return Err(Error::InvalidParameter(format!("coherence factor {factor} not in [0, 1]")));
        }
        Ok(Self { factor })
    }

    pub fn factor(&self) -> f64 {
        self.factor
    }

    /// This channel followed by `next`. Both are diagonal in the same basis,
    /// so the order does not matter.
    pub fn then(self, next: Self) -> Self {
        Self { factor: self.factor * next.factor }
    }

    pub fn apply(&self, rho: &DensityOperator4) -> Result<DensityOperator4> {
        rho.with_coherence_scaled(COHERENCE.0, COHERENCE.1, self.factor)
    }
}

/// The dual state held by the two detecting parties when the particles'
/// internal tags overlap with modulus `v`.
pub fn degraded_dual_state(state: &DualPairState, v: OverlapParameter) -> Result<DensityOperator4> {
    CoherenceChannel::new(v.0)?.apply(&route_pbs(state)?)
}

/// Optimized CHSH value of the photon pair's dual state along `grid`.
pub fn smax_vs_overlap(grid: &[OverlapParameter]) -> Vec<(f64, f64)> {
    smax_vs_overlap_for(&DualPairState::photon_pair(), grid)
        .expect("the photon pair routes to one particle per party")
}

pub fn smax_vs_overlap_for(state: &DualPairState, grid: &[OverlapParameter]) -> Result<Vec<(f64, f64)>> {
    grid.par_iter()
        .map(|&v| Ok((v.0, optimize_chsh(&degraded_dual_state(state, v)?).s_max)))
        .collect()
}

/// Rates and geometry of the trap-and-fly sequence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TransitionParams {
    /// Identicity-loss dephasing rate while separated, 1/s.
    pub gamma_id: f64,
    /// Path-superposition dephasing rate, 1/s.
    pub gamma_path: f64,
    /// Distances, m.
    pub d1: f64,
    pub d2: f64,
    /// Transport speed, m/s.
    pub speed: f64,
}

impl TransitionParams {
    pub fn new(gamma_id: f64, gamma_path: f64, d1: f64, d2: f64, speed: f64) -> Result<Self> {
        for (name, x) in [("gamma_id", gamma_id), ("gamma_path", gamma_path), ("d1", d1), ("d2", d2)] {
            if !(x >= 0.0 && x.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} = {x} must be finite and >= 0")));
            }
        }
        if !(speed > 0.0 && speed.is_finite()) {
            return Err(Error::InvalidParameter(format!("speed = {speed} must be finite and > 0")));
        }
        Ok(Self { gamma_id, gamma_path, d1, d2, speed })
    }

    pub fn with_distances(self, d1: f64, d2: f64) -> Result<Self> {
        Self::new(self.gamma_id, self.gamma_path, d1, d2, self.speed)
    }

    pub fn identicity_loss(&self) -> CoherenceChannel {
        CoherenceChannel { factor: (-self.gamma_id * self.d1 / self.speed).exp() }
    }

    pub fn path_decoherence(&self) -> CoherenceChannel {
        CoherenceChannel { factor: (-self.gamma_path * (self.d1 + self.d2) / self.speed).exp() }
    }
}

/// Dual state after identicity loss and path decoherence.
pub fn transition_channel(params: &TransitionParams, state: &DualPairState) -> Result<DensityOperator4> {
    params
        .identicity_loss()
        .then(params.path_decoherence())
        .apply(&route_pbs(state)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DecoherencePoint {
    pub d1: f64,
    pub d2: f64,
    pub s_max: f64,
}

/// Optimized CHSH over a `(d1, d2)` grid, `d1` major.
pub fn decoherence_sweep(
    rates: &TransitionParams,
    d1_grid: &[f64],
    d2_grid: &[f64],
    state: &DualPairState,
) -> Result<Vec<DecoherencePoint>> {
    let points: Vec<(f64, f64)> = d1_grid
        .iter()
        .flat_map(|&d1| d2_grid.iter().map(move |&d2| (d1, d2)))
        .collect();
    points
        .par_iter()
        .map(|&(d1, d2)| {
            let rho = transition_channel(&rates.with_distances(d1, d2)?, state)?;
            Ok(DecoherencePoint { d1, d2, s_max: optimize_chsh(&rho).s_max })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct TemperatureQuery {
    pub mass_number: f64,
    /// Position spread of each wavefunction, m.
    pub delta_x: f64,
}

impl TemperatureQuery {
    pub fn new(mass_number: f64, delta_x: f64) -> Result<Self> {
        if !(mass_number > 0.0 && mass_number.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass number {mass_number} must be > 0")));
        }
        if !(delta_x > 0.0 && delta_x.is_finite()) {
            return Err(Error::InvalidParameter(format!("position spread {delta_x} must be > 0")));
        }
        Ok(Self { mass_number, delta_x })
    }
}

/// Highest temperature, in kelvin, at which arrival times do not reveal
/// which object is which: `hbar² / (2 m k_B Δx²)`.
pub fn temperature_threshold(q: &TemperatureQuery) -> f64 {
    let mass = q.mass_number * ATOMIC_MASS_UNIT;
    HBAR * HBAR / (2.0 * mass * BOLTZMANN * q.delta_x * q.delta_x)
}
