//! Monte Carlo run of the dual-entanglement test.
//!
//! A source emits the pair, polarizing beam splitters send the `H` photon to
//! Diana and the `V` photon to Charlie, and each party measures a momentum
//! pseudo-spin. Coincidences are tallied per setting pair and turned into a
//! CHSH estimate.
//!
//! Every pair draws its randomness from a ChaCha8 keystream addressed by
//! `(seed, setting pair, pair index)`, so the counts do not depend on how
//! the pairs are split across worker threads.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bell::{observable, ChshSettings, MeasurementSetting, CHSH_SIGNS};
use crate::density::{kron, DensityOperator4};
use crate::error::{Error, Result};
use crate::fock::{to_fock, DualPairState, FockExpansion};
use crate::identicity::{degraded_dual_state, OverlapParameter};

/// Names of the four setting pairs in CHSH order.
pub const SETTING_PAIR_LABELS: [&str; 4] = ["ab", "ab'", "a'b", "a'b'"];

/// Pairs handled per work item. Results do not depend on this value.
const CHUNK_PAIRS: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentConfig {
    pub state: DualPairState,
    pub settings: ChshSettings,
    pub pairs_per_setting_pair: u64,
    pub seed: u64,
    pub overlap_v: f64,
    pub detector_efficiency: f64,
}

impl ExperimentConfig {
    /// The photon pair at its optimal settings, 10^6 pairs per setting pair.
    pub fn photon_pair(seed: u64) -> Self {
        Self {
            state: DualPairState::photon_pair(),
            settings: ChshSettings::photon_pair_optimal(),
            pairs_per_setting_pair: 1_000_000,
            seed,
            overlap_v: 1.0,
            detector_efficiency: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.pairs_per_setting_pair == 0 {
            return Err(Error::Config("pairs per setting pair must be positive".into()));
        }
        if !(0.0..=1.0).contains(&self.overlap_v) {
            return Err(Error::Config(format!("overlap {} not in [0, 1]", self.overlap_v)));
        }
        if !(self.detector_efficiency > 0.0 && self.detector_efficiency <= 1.0) {
            return Err(Error::Config(format!(
                "detector efficiency {} not in (0, 1]",
                self.detector_efficiency
            )));
        }
        Ok(())
    }
}

/// Joint outcome tallies `(+,+), (+,-), (-,+), (-,-)`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoincidenceCounts {
    #[serde(rename = "nPP")]
    pub n_pp: u64,
    #[serde(rename = "nPM")]
    pub n_pm: u64,
    #[serde(rename = "nMP")]
    pub n_mp: u64,
    #[serde(rename = "nMM")]
    pub n_mm: u64,
}

impl CoincidenceCounts {
    pub fn new(n_pp: u64, n_pm: u64, n_mp: u64, n_mm: u64) -> Self {
        Self { n_pp, n_pm, n_mp, n_mm }
    }

    pub fn total(&self) -> u64 {
        self.n_pp + self.n_pm + self.n_mp + self.n_mm
    }

    fn from_array(n: [u64; 4]) -> Self {
        Self::new(n[0], n[1], n[2], n[3])
    }
}

impl std::ops::Add for CoincidenceCounts {
    type Output = Self;

    fn add(self, o: Self) -> Self {
        Self::new(self.n_pp + o.n_pp, self.n_pm + o.n_pm, self.n_mp + o.n_mp, self.n_mm + o.n_mm)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SettingPairCounts {
    pub setting_pair: String,
    pub counts: CoincidenceCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ExperimentResult {
    pub counts_per_setting_pair: Vec<SettingPairCounts>,
    pub e_hat: [f64; 4],
    pub e_std_err: [f64; 4],
    pub s_hat: f64,
    pub s_std_err: f64,
}

/// Routes each particle by its entangled-variable value: `B1` (H) to Diana,
/// the first tensor factor, and `B2` (V) to Charlie. Returns the joint
/// label-variable state the two parties hold.
pub fn route_pbs(state: &DualPairState) -> Result<DensityOperator4> {
    route_expansion(&to_fock(state))
}

/// As [`route_pbs`], for any two-particle expansion. Fails unless every
/// configuration has exactly one particle per entangled value.
pub fn route_expansion(expansion: &FockExpansion) -> Result<DensityOperator4> {
    let sign = expansion.statistics().exchange_sign();
    let mut psi = [Complex64::new(0.0, 0.0); 4];
    for (config, amp) in expansion.terms() {
        let [m1, m2] = config.occupied_modes();
        if m1.entangled == m2.entangled {
            return Err(Error::WrongStateShape(format!(
                "both particles carry `{}`",
                expansion.modes().entangled_var.eigenlabel(m1.entangled)
            )));
        }
        // Write the B1 particle's operator first; that costs the exchange
        // sign when canonical order has the B2 particle first.
        let (diana, charlie, amp) = if m1.entangled == 0 {
            (m1, m2, *amp)
        } else {
            (m2, m1, amp * sign)
        };
        psi[diana.label * 2 + charlie.label] += amp;
    }
    DensityOperator4::pure(&psi)
}

/// Born probabilities `[p(+,+), p(+,-), p(-,+), p(-,-)]`.
pub fn outcome_probabilities(
    rho: &DensityOperator4,
    a: &MeasurementSetting,
    b: &MeasurementSetting,
) -> [f64; 4] {
    let half = Complex64::new(0.5, 0.0);
    let id = Matrix2::<Complex64>::identity();
    let (oa, ob) = (observable(a), observable(b));
    let proj = |o: &Matrix2<Complex64>, s: f64| (id + o * Complex64::new(s, 0.0)) * half;
    let mut p = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)].into_iter().enumerate() {
        p[k] = rho.expectation(&kron(&proj(&oa, sa), &proj(&ob, sb))).max(0.0);
    }
    let total: f64 = p.iter().sum();
    p.map(|x| x / total)
}

/// Keystream for one setting pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairStream {
    seed: u64,
    stream: u64,
}

impl PairStream {
    pub fn new(seed: u64, setting_pair: u64) -> Self {
        Self { seed, stream: setting_pair }
    }

    fn rng_at(&self, word_pos: u128) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(word_pos);
        rng
    }
}

fn unit_interval(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Samples `n` pairs from the Born distribution of `rho` at settings
/// `(a, b)`. Each detector fires with probability `efficiency`; pairs that
/// lose a photon are not counted.
pub fn sample_outcomes(
    rho: &DensityOperator4,
    a: &MeasurementSetting,
    b: &MeasurementSetting,
    n: u64,
    efficiency: f64,
    stream: PairStream,
) -> Result<CoincidenceCounts> {
    if n == 0 {
        return Err(Error::Config("at least one pair must be sampled".into()));
    }
    if !(efficiency > 0.0 && efficiency <= 1.0) {
        return Err(Error::Config(format!("detector efficiency {efficiency} not in (0, 1]")));
    }
    let p = outcome_probabilities(rho, a, b);
    // Outcomes past the last one with nonzero probability are unreachable.
    let last = p.iter().rposition(|&x| x > 0.0).expect("probabilities sum to one");
    let mut thresholds = [f64::INFINITY; 4];
    let mut acc = 0.0;
    for k in 0..last {
        acc += p[k];
        thresholds[k] = acc;
    }

    let lossless = efficiency == 1.0;
    let words_per_pair: u128 = if lossless { 2 } else { 6 };
    let chunks = n.div_ceil(CHUNK_PAIRS);
    let counts = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let start = chunk * CHUNK_PAIRS;
            let end = (start + CHUNK_PAIRS).min(n);
            let mut rng = stream.rng_at(u128::from(start) * words_per_pair);
            let mut tally = [0u64; 4];
            for _ in start..end {
                let u = unit_interval(rng.next_u64());
                if !lossless {
                    let diana = unit_interval(rng.next_u64()) < efficiency;
                    let charlie = unit_interval(rng.next_u64()) < efficiency;
                    if !(diana && charlie) {
                        continue;
                    }
                }
                let k = thresholds.iter().position(|&t| u < t).unwrap_or(3);
                tally[k] += 1;
            }
            CoincidenceCounts::from_array(tally)
        })
        .reduce(CoincidenceCounts::default, |x, y| x + y);
    Ok(counts)
}

/// `eHat = (nPP + nMM - nPM - nMP) / N` with standard error `sqrt((1 - eHat²)/N)`.
pub fn estimate_correlation(counts: &CoincidenceCounts) -> Result<(f64, f64)> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::EmptyCounts);
    }
    let n = total as f64;
    let agree = (counts.n_pp + counts.n_mm) as f64;
    let disagree = (counts.n_pm + counts.n_mp) as f64;
    let e = ((agree - disagree) / n).clamp(-1.0, 1.0);
    Ok((e, ((1.0 - e * e) / n).sqrt()))
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentResult> {
    config.validate()?;
    let rho = degraded_dual_state(&config.state, OverlapParameter::new(config.overlap_v)?)?;
    let mut counts_per_setting_pair = Vec::with_capacity(4);
    let mut e_hat = [0.0; 4];
    let mut e_std_err = [0.0; 4];
    for (k, (a, b)) in config.settings.pairs().iter().enumerate() {
        let counts = sample_outcomes(
            &rho,
            a,
            b,
            config.pairs_per_setting_pair,
            config.detector_efficiency,
            PairStream::new(config.seed, k as u64),
        )?;
        (e_hat[k], e_std_err[k]) = estimate_correlation(&counts)?;
        counts_per_setting_pair.push(SettingPairCounts {
            setting_pair: SETTING_PAIR_LABELS[k].to_string(),
            counts,
        });
    }
    let s_hat = e_hat.iter().zip(CHSH_SIGNS).map(|(e, s)| e * s).sum();
    let s_std_err = e_std_err.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(ExperimentResult { counts_per_setting_pair, e_hat, e_std_err, s_hat, s_std_err })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bell::correlation;
    use crate::dualism::dual_representation;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn photon_pair_routes_to_dual_projector() {
        let rho = route_pbs(&DualPairState::photon_pair()).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let expected = DensityOperator4::pure(&[c(0.0, 0.0), c(h, 0.0), c(h, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((rho.entries() - expected.entries()).norm() < 1e-15);
    }

    #[test]
    fn product_state_routes_to_product_projector() {
        let s = DualPairState::photon_pair_with(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        let rho = route_pbs(&s).unwrap();
        // Diana holds |-k>, Charlie |k>.
        assert_eq!(rho.entry(1, 1), c(1.0, 0.0));
        assert!((rho.purity() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn routing_matches_dual_representation() {
        for stat in [crate::Statistics::Boson, crate::Statistics::Fermion] {
            let s = DualPairState::new(
                c(0.3, -0.4),
                c(0.5, 0.2),
                crate::VariablePair::momentum(),
                crate::VariablePair::polarization(),
                stat,
            )
            .unwrap();
            let dual = dual_representation(&s);
            let expected = DensityOperator4::pure(&dual.labeled_vector()).unwrap();
            assert!((route_pbs(&s).unwrap().entries() - expected.entries()).norm() < 1e-15);
        }
    }

    #[test]
    fn non_manifest_state_cannot_be_routed() {
        let state = crate::dualism::NonManifestState {
            alpha: c(0.6, 0.0),
            beta: c(0.8, 0.0),
            label_var: crate::VariablePair::momentum(),
            entangled_var: crate::VariablePair::polarization(),
            statistics: crate::Statistics::Boson,
        };
        let modes = DualPairState::photon_pair().modes();
        let cfg = |o| crate::FockConfiguration::new(o, crate::Statistics::Boson).unwrap();
        let expansion = FockExpansion::from_terms(
            modes,
            [(cfg([1, 0, 1, 0]), state.alpha), (cfg([0, 1, 0, 1]), state.beta)],
        )
        .unwrap();
        assert!(matches!(route_expansion(&expansion), Err(Error::WrongStateShape(_))));
    }

    #[test]
    fn perfect_anticorrelation_in_z() {
        let rho = route_pbs(&DualPairState::photon_pair()).unwrap();
        let z = MeasurementSetting::z();
        let counts = sample_outcomes(&rho, &z, &z, 10_000, 1.0, PairStream::new(7, 0)).unwrap();
        assert_eq!(counts.n_pp, 0);
        assert_eq!(counts.n_mm, 0);
        assert_eq!(counts.n_pm + counts.n_mp, 10_000);
    }

    #[test]
    fn seeded_counts_repeat() {
        let rho = DensityOperator4::maximally_mixed();
        let (a, b) = (MeasurementSetting::x(), MeasurementSetting::z());
        let first = sample_outcomes(&rho, &a, &b, 1000, 1.0, PairStream::new(3, 1)).unwrap();
        let second = sample_outcomes(&rho, &a, &b, 1000, 1.0, PairStream::new(3, 1)).unwrap();
        assert_eq!(first, second);
        let other = sample_outcomes(&rho, &a, &b, 1000, 1.0, PairStream::new(4, 1)).unwrap();
        assert_ne!(first, other);
    }

    #[test]
    fn detection_loss_thins_counts() {
        let rho = DensityOperator4::maximally_mixed();
        let z = MeasurementSetting::z();
        let n = 200_000;
        let counts = sample_outcomes(&rho, &z, &z, n, 0.5, PairStream::new(11, 0)).unwrap();
        let expected = n as f64 * 0.25;
        let sigma = (n as f64 * 0.25 * 0.75).sqrt();
        assert!((counts.total() as f64 - expected).abs() < 5.0 * sigma);
    }

    #[test]
    fn estimator_examples() {
        assert_eq!(estimate_correlation(&CoincidenceCounts::new(0, 500, 500, 0)).unwrap(), (-1.0, 0.0));
        let (e, se) = estimate_correlation(&CoincidenceCounts::new(250, 250, 250, 250)).unwrap();
        assert_eq!(e, 0.0);
        assert!((se - (1.0f64 / 1000.0).sqrt()).abs() < 1e-15);
        let (e, se) = estimate_correlation(&CoincidenceCounts::new(400, 100, 100, 400)).unwrap();
        assert!((e - 0.6).abs() < 1e-15);
        assert!((se - (0.64f64 / 1000.0).sqrt()).abs() < 1e-15);
        assert_eq!(estimate_correlation(&CoincidenceCounts::default()), Err(Error::EmptyCounts));
    }

    #[test]
    fn zero_pairs_is_a_config_error() {
        let mut cfg = ExperimentConfig::photon_pair(1);
        cfg.pairs_per_setting_pair = 0;
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
        cfg.pairs_per_setting_pair = 10;
        cfg.detector_efficiency = 0.0;
        assert!(matches!(run_experiment(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn probabilities_reproduce_correlation() {
        let rho = route_pbs(&DualPairState::photon_pair_with(c(0.9, 0.0), c(0.1, 0.3)).unwrap()).unwrap();
        let a = MeasurementSetting::new(1.0, 0.5).unwrap();
        let b = MeasurementSetting::new(2.5, 4.0).unwrap();
        let p = outcome_probabilities(&rho, &a, &b);
        assert!((p[0] - p[1] - p[2] + p[3] - correlation(&rho, &a, &b)).abs() < 1e-14);
    }
}
