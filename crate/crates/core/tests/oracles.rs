//! Cross-checks against independent reference computations.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use dualent_core::fock::{CreationProduct, OperatorExpansion};
use dualent_core::*;
use nalgebra::{Matrix2, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

// ---------------------------------------------------------------------------
// Creation operators acting on occupation-number states, with the
// Jordan-Wigner sign for fermions.

type FockState = BTreeMap<[u8; 4], Complex64>;

fn apply_creation(state: &FockState, mode: usize, statistics: Statistics) -> FockState {
    let mut out = FockState::new();
    for (occ, amp) in state {
        let mut next = *occ;
        let factor = match statistics {
            Statistics::Fermion => {
                if occ[mode] == 1 {
                    continue;
                }
                let below: u8 = occ[..mode].iter().sum();
                if below % 2 == 0 { 1.0 } else { -1.0 }
            }
            Statistics::Boson => f64::from(occ[mode] + 1).sqrt(),
        };
        next[mode] += 1;
        *out.entry(next).or_insert(c(0.0, 0.0)) += amp * factor;
    }
    out
}

fn jw_product(first: usize, second: usize, amp: Complex64, statistics: Statistics) -> FockState {
    let vacuum: FockState = [([0u8; 4], amp)].into_iter().collect();
    apply_creation(&apply_creation(&vacuum, second, statistics), first, statistics)
}

#[test]
fn normal_ordering_matches_operator_action() {
    for statistics in [Statistics::Boson, Statistics::Fermion] {
        let modes = DualPairState::new(
            c(1.0, 0.0),
            c(0.0, 0.0),
            VariablePair::momentum(),
            VariablePair::polarization(),
            statistics,
        )
        .unwrap()
        .modes();
        for x in 0..4 {
            for y in 0..4 {
                let amp = c(0.3, -0.7);
                let ops = OperatorExpansion::new(
                    modes.clone(),
                    vec![CreationProduct { modes: [Mode::from_index(x), Mode::from_index(y)], amplitude: amp }],
                );
                let got: FockState = ops
                    .normal_ordered_terms()
                    .into_iter()
                    .map(|(cfg, a)| (cfg.occupations(), a))
                    .collect();
                let expected: FockState = jw_product(x, y, amp, statistics)
                    .into_iter()
                    .filter(|(_, a)| a.norm() > 0.0)
                    .collect();
                assert_eq!(got.len(), expected.len(), "{statistics} ({x},{y})");
                for (occ, a) in &expected {
                    assert!((got[occ] - a).norm() < 1e-15, "{statistics} ({x},{y})");
                }
            }
        }
    }
}

#[test]
fn fermionic_fock_terms_match_operator_action() {
    // alpha c†_{A1,B1} c†_{A2,B2} + beta c†_{A1,B2} c†_{A2,B1}, applied to the
    // vacuum operator by operator, for every ordering of the two products.
    let alpha = c(0.6, 0.1);
    let beta = c(-0.2, 0.77);
    let state = DualPairState::new(alpha, beta, VariablePair::momentum(), VariablePair::polarization(), Statistics::Fermion)
        .unwrap();
    let fock = to_fock(&state);
    let (a, b) = (state.alpha(), state.beta());
    for (first_pair, second_pair) in [((0, 3), (1, 2)), ((3, 0), (1, 2)), ((0, 3), (2, 1)), ((3, 0), (2, 1))] {
        // Reversed orders pick up a minus sign, compensated in the amplitude.
        let sa = if first_pair.0 < first_pair.1 { a } else { -a };
        let sb = if second_pair.0 < second_pair.1 { b } else { -b };
        let mut reference = jw_product(first_pair.0, first_pair.1, sa, Statistics::Fermion);
        for (k, v) in jw_product(second_pair.0, second_pair.1, sb, Statistics::Fermion) {
            *reference.entry(k).or_insert(c(0.0, 0.0)) += v;
        }
        for (cfg, amp) in fock.terms() {
            assert!((reference[&cfg.occupations()] - amp).norm() < 1e-15);
        }
        assert_eq!(reference.len(), fock.terms().len());
    }
}

// ---------------------------------------------------------------------------
// Concurrence via the Wootters formula on the labeled density operator.

fn hermitian_sqrt(m: &Matrix4<Complex64>) -> Matrix4<Complex64> {
    let eig = m.symmetric_eigen();
    let d = Matrix4::from_diagonal(&eig.eigenvalues.map(|l| c(l.max(0.0).sqrt(), 0.0)));
    eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

fn wootters(rho: &Matrix4<Complex64>) -> f64 {
    let sy = Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0));
    let yy = Matrix4::from_fn(|r, col| sy[(r / 2, col / 2)] * sy[(r % 2, col % 2)]);
    let tilde = yy * rho.conjugate() * yy;
    let s = hermitian_sqrt(rho);
    let mut l: Vec<f64> = (s * tilde * s)
        .symmetric_eigenvalues()
        .iter()
        .map(|x| x.max(0.0).sqrt())
        .collect();
    l.sort_by(|x, y| y.total_cmp(x));
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn labeled_density(state: &DualPairState) -> Matrix4<Complex64> {
    let psi = state.labeled_vector();
    Matrix4::from_fn(|r, col| psi[r] * psi[col].conj())
}

#[test]
fn concurrence_matches_wootters() {
    let cases = [
        (c(0.8f64.sqrt(), 0.0), c(0.2f64.sqrt(), 0.0), 0.8),
        (c(0.6, 0.0), c(0.8, 0.0), 0.96),
        (c(0.6, 0.0), c(0.0, 0.8), 0.96),
        (c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0), 1.0),
        (c(1.0, 0.0), c(0.0, 0.0), 0.0),
    ];
    for (alpha, beta, expected) in cases {
        for stat in [Statistics::Boson, Statistics::Fermion] {
            let s = DualPairState::new(alpha, beta, VariablePair::momentum(), VariablePair::polarization(), stat).unwrap();
            let oracle = wootters(&labeled_density(&s));
            assert!((oracle - expected).abs() < 1e-7, "oracle {oracle} vs {expected}");
            assert!((concurrence(&s) - oracle).abs() < 1e-7);
            let d = dual_representation(&s);
            assert!((wootters(&labeled_density(&d)) - expected).abs() < 1e-7);
        }
    }
}

// ---------------------------------------------------------------------------
// Maximal CHSH from the two largest singular values of the correlation
// matrix, computed here from explicit Pauli products.

fn pauli() -> [Matrix2<Complex64>; 3] {
    [
        Matrix2::new(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)),
        Matrix2::new(c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)),
        Matrix2::new(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)),
    ]
}

fn closed_form_smax(rho: &DensityOperator4) -> f64 {
    let p = pauli();
    let t = Matrix3::from_fn(|m, n| {
        let mut acc = c(0.0, 0.0);
        for r in 0..4 {
            for col in 0..4 {
                acc += rho.entry(r, col) * p[m][(col / 2, r / 2)] * p[n][(col % 2, r % 2)];
            }
        }
        acc.re
    });
    let mut sv: Vec<f64> = t.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    2.0 * (sv[0] * sv[0] + sv[1] * sv[1]).sqrt()
}

/// Deterministic pseudo-random stream for building test inputs.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn normal(&mut self) -> f64 {
        let (u, v) = (self.next().max(1e-300), self.next());
        (-2.0 * u.ln()).sqrt() * (TAU * v).cos()
    }

    fn density(&mut self, rank: usize) -> DensityOperator4 {
        let mut m = Matrix4::<Complex64>::zeros();
        for _ in 0..rank {
            let v: [Complex64; 4] = std::array::from_fn(|_| c(self.normal(), self.normal()));
            m += Matrix4::from_fn(|r, col| v[r] * v[col].conj());
        }
        let tr = m.trace();
        m /= tr;
        let m = (m + m.adjoint()) * c(0.5, 0.0);
        DensityOperator4::new(m).unwrap()
    }

    fn setting(&mut self) -> MeasurementSetting {
        MeasurementSetting::new(self.next() * PI, self.next() * TAU).unwrap()
    }
}

#[test]
fn optimizer_matches_closed_form_on_random_states() {
    let mut rng = Lcg(17);
    for k in 0..40 {
        let rho = rng.density(1 + k % 4);
        let opt = optimize_chsh(&rho);
        let reference = closed_form_smax(&rho);
        assert!((opt.s_max - reference).abs() < 1e-6, "{} vs {reference}", opt.s_max);
        assert!((chsh(&rho, &opt.settings) - opt.s_max).abs() < 1e-12);
    }
}

#[test]
fn tsirelson_bound_over_random_states() {
    let mut rng = Lcg(99);
    for k in 0..200 {
        let rho = rng.density(1 + k % 4);
        assert!(optimize_chsh(&rho).s_max <= TSIRELSON + 1e-9);
    }
}

#[test]
fn optimizer_dominates_reference_settings() {
    let mut rng = Lcg(5);
    for _ in 0..10 {
        let rho = rng.density(2);
        let s_max = optimize_chsh(&rho).s_max;
        for _ in 0..2000 {
            let s = ChshSettings { a: rng.setting(), a_prime: rng.setting(), b: rng.setting(), b_prime: rng.setting() };
            assert!(s_max >= chsh(&rho, &s) - 1e-6);
        }
    }
}

#[test]
fn separable_states_obey_local_bound() {
    let mut rng = Lcg(23);
    for _ in 0..30 {
        // Mixture of product states.
        let mut m = Matrix4::<Complex64>::zeros();
        let mut weight = 0.0;
        for _ in 0..3 {
            let w = rng.next();
            let a: [Complex64; 2] = [c(rng.normal(), rng.normal()), c(rng.normal(), rng.normal())];
            let b: [Complex64; 2] = [c(rng.normal(), rng.normal()), c(rng.normal(), rng.normal())];
            let na = (a[0].norm_sqr() + a[1].norm_sqr()).sqrt();
            let nb = (b[0].norm_sqr() + b[1].norm_sqr()).sqrt();
            let psi: [Complex64; 4] = std::array::from_fn(|i| a[i / 2] / na * b[i % 2] / nb);
            m += Matrix4::from_fn(|r, col| psi[r] * psi[col].conj()) * c(w, 0.0);
            weight += w;
        }
        m /= c(weight, 0.0);
        let rho = DensityOperator4::new((m + m.adjoint()) * c(0.5, 0.0)).unwrap();
        assert!(optimize_chsh(&rho).s_max <= 2.0 + 1e-6);
    }
    let product = DensityOperator4::pure(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    let s = optimize_chsh(&product).s_max;
    assert!(s <= 2.0 + 1e-6);
}

#[test]
fn pure_dual_states_follow_concurrence_formula() {
    for (alpha, beta) in [(1.0, 1.0), (0.8f64.sqrt(), 0.2f64.sqrt()), (0.6, 0.8), (1.0, 0.0), (0.95, 0.1)] {
        let s = DualPairState::photon_pair_with(c(alpha, 0.0), c(0.0, beta)).unwrap();
        let conc = concurrence(&s);
        let opt = optimize_chsh(&route_pbs(&s).unwrap());
        assert!((opt.s_max - 2.0 * (1.0 + conc * conc).sqrt()).abs() < 1e-6);
    }
    let s = DualPairState::photon_pair_with(c(0.8f64.sqrt(), 0.0), c(0.2f64.sqrt(), 0.0)).unwrap();
    let opt = optimize_chsh(&route_pbs(&s).unwrap());
    assert!((opt.s_max - 1.64f64.sqrt() * 2.0).abs() < 1e-6);
}

/// Brute force over coplanar x-z settings, refined on a shrinking grid.
fn planar_brute_force(rho: &DensityOperator4) -> f64 {
    let setting = |angle: f64| {
        let v = Vector3::new(angle.sin(), 0.0, angle.cos());
        MeasurementSetting::from_direction(v)
    };
    let corr = |x: f64, y: f64| correlation(rho, &setting(x), &setting(y));
    let s_at = |p: &[f64; 4]| corr(p[0], p[2]) + corr(p[0], p[3]) + corr(p[1], p[2]) - corr(p[1], p[3]);
    let mut best = ([0.0; 4], f64::NEG_INFINITY);
    let n = 24;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let p = [i, j, k, l].map(|q| q as f64 * TAU / n as f64);
                    let s = s_at(&p);
                    if s > best.1 {
                        best = (p, s);
                    }
                }
            }
        }
    }
    let mut span = TAU / n as f64;
    while span > 1e-7 {
        let center = best.0;
        for i in -2..=2 {
            for j in -2..=2 {
                for k in -2..=2 {
                    for l in -2..=2 {
                        let step = [i, j, k, l].map(|q| f64::from(q) * span / 2.0);
                        let p: [f64; 4] = std::array::from_fn(|d| center[d] + step[d]);
                        let s = s_at(&p);
                        if s > best.1 {
                            best = (p, s);
                        }
                    }
                }
            }
        }
        span /= 2.0;
    }
    best.1
}

#[test]
fn degraded_state_smax_against_brute_force() {
    let state = DualPairState::photon_pair();
    for v in [0.0, 0.5, 1.0] {
        let rho = degraded_dual_state(&state, OverlapParameter::new(v).unwrap()).unwrap();
        let brute = planar_brute_force(&rho);
        let closed = 2.0 * (1.0 + v * v).sqrt();
        let opt = optimize_chsh(&rho).s_max;
        assert!((brute - closed).abs() < 1e-6, "v={v}: brute {brute} vs {closed}");
        assert!((opt - closed).abs() < 1e-6, "v={v}: optimizer {opt} vs {closed}");
    }
}

#[test]
fn classical_mixture_is_bell_diagonal() {
    let rho = degraded_dual_state(&DualPairState::photon_pair(), OverlapParameter::DISTINGUISHABLE).unwrap();
    let s = optimize_chsh(&rho).s_max;
    assert!((s - closed_form_smax(&rho)).abs() < 1e-6);
    assert!((s - 2.0).abs() < 1e-6);
}
