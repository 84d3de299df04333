//! Two identical particles over the four modes `(A_i, B_j)`.
//!
//! A state is written three ways here: as the labeled pair state
//! `alpha |B1>_{A1} |B2>_{A2} + beta |B2>_{A1} |B1>_{A2}` ([`DualPairState`]),
//! as creation operators acting on a common vacuum ([`FockExpansion`],
//! [`OperatorExpansion`]), and as an (anti)symmetrized first-quantized vector
//! over unphysical particle indices `i, j` ([`PseudoLabelVector`]).
//!
//! Modes are indexed `label_index * 2 + entangled_index`. Every stored Fock
//! amplitude refers to the creation operators written in ascending mode order.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for amplitude comparisons.
pub const AMPLITUDE_TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Statistics {
    Boson,
    Fermion,
}

impl Statistics {
    /// Sign picked up when two creation operators are interchanged.
    pub fn exchange_sign(self) -> f64 {
        match self {
            Statistics::Boson => 1.0,
            Statistics::Fermion => -1.0,
        }
    }
}

impl fmt::Display for Statistics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Statistics::Boson => "boson",
            Statistics::Fermion => "fermion",
        })
    }
}

impl FromStr for Statistics {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "boson" | "b" => Ok(Statistics::Boson),
            "fermion" | "f" => Ok(Statistics::Fermion),
            other => Err(format!("unknown statistics `{other}` (expected boson or fermion)")),
        }
    }
}

/// A dynamical variable restricted to two distinct eigenvalues.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VariablePair {
    name: String,
    eigenlabels: [String; 2],
}

impl VariablePair {
    pub fn new(
        name: impl Into<String>,
        first: impl Into<String>,
        second: impl Into<String>,
    ) -> Result<Self> {
        let name = name.into();
        let (first, second) = (first.into(), second.into());
        if first == second {
            return Err(Error::DegenerateEigenlabels(name));
        }
        Ok(Self { name, eigenlabels: [first, second] })
    }

    /// Momentum along the emission axis, `(-k, k)`.
    pub fn momentum() -> Self {
        Self::new("momentum", "-k", "k").expect("distinct labels")
    }

    /// Photon polarization, `(H, V)`.
    pub fn polarization() -> Self {
        Self::new("polarization", "H", "V").expect("distinct labels")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eigenlabels(&self) -> &[String; 2] {
        &self.eigenlabels
    }

    pub fn eigenlabel(&self, index: usize) -> &str {
        &self.eigenlabels[index]
    }
}

impl fmt::Display for VariablePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.name, self.eigenlabels[0], self.eigenlabels[1])
    }
}

/// `alpha |B1>_{A1} |B2>_{A2} + beta |B2>_{A1} |B1>_{A2}` for two identical
/// particles, with `A` the label variable and `B` the entangled one.
///
/// The type exposes exactly one label variable at a time: reading the
/// entanglement in the other variable requires [`crate::dual_representation`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct DualPairState {
    alpha: Complex64,
    beta: Complex64,
    label_var: VariablePair,
    entangled_var: VariablePair,
    statistics: Statistics,
}

impl DualPairState {
    /// Builds a normalized state; amplitudes are rescaled by
    /// `1 / sqrt(|alpha|^2 + |beta|^2)`.
    pub fn new(
        alpha: Complex64,
        beta: Complex64,
        label_var: VariablePair,
        entangled_var: VariablePair,
        statistics: Statistics,
    ) -> Result<Self> {
        if label_var.name == entangled_var.name {
            return Err(Error::VariableClash(label_var.name));
        }
        let norm = (alpha.norm_sqr() + beta.norm_sqr()).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroState);
        }
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
            label_var,
            entangled_var,
            statistics,
        })
    }

    /// `(|H>_{-k}|V>_k + |V>_{-k}|H>_k)/sqrt(2)`: two photons labeled by
    /// momentum and entangled in polarization.
    pub fn photon_pair() -> Self {
        Self::photon_pair_with(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
        )
        .expect("nonzero amplitudes")
    }

    /// Photon pair with arbitrary amplitudes.
    pub fn photon_pair_with(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::new(
            alpha,
            beta,
            VariablePair::momentum(),
            VariablePair::polarization(),
            Statistics::Boson,
        )
    }

    /// Spin-1/2 pair labeled by position, `(|up>_1|down>_2 + |down>_1|up>_2)/sqrt(2)`.
    pub fn epr_bohm(statistics: Statistics) -> Self {
        Self::new(
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            Complex64::new(FRAC_1_SQRT_2, 0.0),
            VariablePair::new("position", "1", "2").expect("distinct labels"),
            VariablePair::new("spin", "up", "down").expect("distinct labels"),
            statistics,
        )
        .expect("valid state")
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    pub fn label_var(&self) -> &VariablePair {
        &self.label_var
    }

    pub fn entangled_var(&self) -> &VariablePair {
        &self.entangled_var
    }

    pub fn statistics(&self) -> Statistics {
        self.statistics
    }

    pub fn modes(&self) -> ModeSet {
        ModeSet {
            label_var: self.label_var.clone(),
            entangled_var: self.entangled_var.clone(),
            statistics: self.statistics,
        }
    }

    /// Bipartite vector with the `A1`-labeled particle as first factor and
    /// the `A2`-labeled particle as second, over the entangled eigenbasis
    /// `(B1, B2)`: index `b_first * 2 + b_second`.
    pub fn labeled_vector(&self) -> [Complex64; 4] {
        [ZERO, self.alpha, self.beta, ZERO]
    }

    /// Equality of physical states: same variables and statistics, and
    /// amplitude vectors equal up to a unit-modulus factor.
    pub fn same_ray(&self, other: &Self, tol: f64) -> bool {
        if self.label_var != other.label_var
            || self.entangled_var != other.entangled_var
            || self.statistics != other.statistics
        {
            return false;
        }
        let overlap = self.alpha.conj() * other.alpha + self.beta.conj() * other.beta;
        (1.0 - overlap.norm()).abs() < tol
    }
}

/// The four modes of a state together with the particle statistics.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ModeSet {
    pub label_var: VariablePair,
    pub entangled_var: VariablePair,
    pub statistics: Statistics,
}

/// Mode `(A_label, B_entangled)`, indices in `{0, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Mode {
    pub label: usize,
    pub entangled: usize,
}

impl Mode {
    pub const ALL: [Mode; 4] = [
        Mode { label: 0, entangled: 0 },
        Mode { label: 0, entangled: 1 },
        Mode { label: 1, entangled: 0 },
        Mode { label: 1, entangled: 1 },
    ];

    pub fn new(label: usize, entangled: usize) -> Self {
        assert!(label < 2 && entangled < 2, "mode indices are 0 or 1");
        Self { label, entangled }
    }

    /// Canonical position: label index major, entangled index minor.
    pub fn index(self) -> usize {
        self.label * 2 + self.entangled
    }

    pub fn from_index(index: usize) -> Self {
        Self::ALL[index]
    }
}

/// Occupation numbers of the four modes, indexed canonically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FockConfiguration {
    occupations: [u8; 4],
}

impl FockConfiguration {
    pub fn new(occupations: [u8; 4], statistics: Statistics) -> Result<Self> {
        let total: u32 = occupations.iter().map(|&n| u32::from(n)).sum();
        if total != 2 {
            return Err(Error::InvalidConfiguration(format!(
                "particle number {total}, expected 2"
            )));
        }
        if statistics == Statistics::Fermion && occupations.iter().any(|&n| n > 1) {
            return Err(Error::InvalidConfiguration(
                "fermionic mode occupied twice".into(),
            ));
        }
        Ok(Self { occupations })
    }

    /// Configuration created by `c†_a c†_b |0>`.
    fn from_modes(a: Mode, b: Mode) -> Self {
        let mut occupations = [0u8; 4];
        occupations[a.index()] += 1;
        occupations[b.index()] += 1;
        Self { occupations }
    }

    pub fn occupations(&self) -> [u8; 4] {
        self.occupations
    }

    pub fn occupation(&self, mode: Mode) -> u8 {
        self.occupations[mode.index()]
    }

    /// Occupied modes in canonical order, repeated for double occupancy.
    pub fn occupied_modes(&self) -> [Mode; 2] {
        let mut out = [Mode::ALL[0]; 2];
        let mut k = 0;
        for (idx, &n) in self.occupations.iter().enumerate() {
            for _ in 0..n {
                out[k] = Mode::from_index(idx);
                k += 1;
            }
        }
        out
    }
}

/// Normalized superposition of two-particle configurations.
#[derive(Debug, Clone, PartialEq)]
pub struct FockExpansion {
    modes: ModeSet,
    terms: Vec<(FockConfiguration, Complex64)>,
}

impl FockExpansion {
    /// Merges duplicate configurations, drops exact zeros and normalizes.
    pub fn from_terms(
        modes: ModeSet,
        terms: impl IntoIterator<Item = (FockConfiguration, Complex64)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<FockConfiguration, Complex64> = BTreeMap::new();
        for (config, amp) in terms {
            FockConfiguration::new(config.occupations, modes.statistics)?;
            *merged.entry(config).or_insert(ZERO) += amp;
        }
        let norm = merged.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let terms = merged
            .into_iter()
            .filter(|(_, a)| *a != ZERO)
            .map(|(c, a)| (c, a / norm))
            .collect();
        Ok(Self { modes, terms })
    }

    pub fn modes(&self) -> &ModeSet {
        &self.modes
    }

    pub fn statistics(&self) -> Statistics {
        self.modes.statistics
    }

    pub fn terms(&self) -> &[(FockConfiguration, Complex64)] {
        &self.terms
    }

    pub fn amplitude(&self, config: &FockConfiguration) -> Complex64 {
        self.terms
            .iter()
            .find(|(c, _)| c == config)
            .map_or(ZERO, |(_, a)| *a)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.iter().map(|(_, a)| a.norm_sqr()).sum()
    }

    /// The same state as creation-operator strings in canonical order.
    pub fn to_operators(&self) -> OperatorExpansion {
        let terms = self
            .terms
            .iter()
            .map(|(config, amp)| {
                let [first, second] = config.occupied_modes();
                // c†c†|0> = sqrt(2)|2> for a doubly occupied bosonic mode.
                let amplitude = if first == second { amp * FRAC_1_SQRT_2 } else { *amp };
                CreationProduct { modes: [first, second], amplitude }
            })
            .collect();
        OperatorExpansion { modes: self.modes.clone(), terms }
    }
}

/// `amplitude * c†_{modes[0]} c†_{modes[1]} |0>`, operators in written order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CreationProduct {
    pub modes: [Mode; 2],
    pub amplitude: Complex64,
}

/// A sum of written creation-operator products, not necessarily in
/// canonical order.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorExpansion {
    pub modes: ModeSet,
    pub terms: Vec<CreationProduct>,
}

impl OperatorExpansion {
    pub fn new(modes: ModeSet, terms: Vec<CreationProduct>) -> Self {
        Self { modes, terms }
    }

    /// Interchanges the operators at two positions of every product,
    /// multiplying by the exchange sign so each product still denotes the
    /// same state.
    pub fn swap_positions(&self, positions: (usize, usize)) -> Result<Self> {
        let (p, q) = positions;
        if p == q || p > 1 || q > 1 {
            return Err(Error::InvalidPositions(p, q));
        }
        let sign = self.modes.statistics.exchange_sign();
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut modes = t.modes;
                modes.swap(p, q);
                CreationProduct { modes, amplitude: t.amplitude * sign }
            })
            .collect();
        Ok(Self { modes: self.modes.clone(), terms })
    }

    /// Amplitudes of the occupation-number states, unnormalized. Products
    /// that put two fermions in one mode vanish and are omitted.
    pub fn normal_ordered_terms(&self) -> Vec<(FockConfiguration, Complex64)> {
        let sign = self.modes.statistics.exchange_sign();
        let mut merged: BTreeMap<FockConfiguration, Complex64> = BTreeMap::new();
        for t in &self.terms {
            let [x, y] = t.modes;
            let amp = if x == y {
                match self.modes.statistics {
                    Statistics::Fermion => continue,
                    Statistics::Boson => t.amplitude * std::f64::consts::SQRT_2,
                }
            } else if x.index() < y.index() {
                t.amplitude
            } else {
                t.amplitude * sign
            };
            *merged.entry(FockConfiguration::from_modes(x, y)).or_insert(ZERO) += amp;
        }
        merged.into_iter().collect()
    }

    /// Re-expresses the products in canonical order as a normalized expansion.
    pub fn normal_order(&self) -> Result<FockExpansion> {
        FockExpansion::from_terms(self.modes.clone(), self.normal_ordered_terms())
    }
}

/// Second-quantized form of a pair state: `alpha c†_{A1,B1} c†_{A2,B2}` plus
/// `beta c†_{A1,B2} c†_{A2,B1}`, both already in canonical order.
pub fn to_fock(state: &DualPairState) -> FockExpansion {
    let terms = [
        (
            FockConfiguration::from_modes(Mode::new(0, 0), Mode::new(1, 1)),
            state.alpha,
        ),
        (
            FockConfiguration::from_modes(Mode::new(0, 1), Mode::new(1, 0)),
            state.beta,
        ),
    ];
    FockExpansion::from_terms(state.modes(), terms).expect("pair state is normalized")
}

/// Interchanges two creation operators in every term and returns the
/// result in canonical order. The physical state is unchanged.
pub fn exchange_reorder(expansion: &FockExpansion, positions: (usize, usize)) -> Result<FockExpansion> {
    expansion.to_operators().swap_positions(positions)?.normal_order()
}

/// Hermitian inner product `<a|b>`.
pub fn inner_product(a: &FockExpansion, b: &FockExpansion) -> Result<Complex64> {
    if a.modes != b.modes {
        return Err(Error::ModeMismatch);
    }
    Ok(a.terms
        .iter()
        .map(|(config, amp)| amp.conj() * b.amplitude(config))
        .sum())
}

/// First-quantized two-particle vector over pseudo labels `i, j`.
///
/// Each particle lives in the four-dimensional space `A ⊗ B` with single
/// particle index `label * 2 + entangled`; the pair index is `s_i * 4 + s_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoLabelVector {
    amplitudes: [Complex64; 16],
}

impl PseudoLabelVector {
    pub fn from_amplitudes(amplitudes: [Complex64; 16]) -> Self {
        Self { amplitudes }
    }

    pub fn amplitudes(&self) -> &[Complex64; 16] {
        &self.amplitudes
    }

    pub fn component(&self, i: Mode, j: Mode) -> Complex64 {
        self.amplitudes[i.index() * 4 + j.index()]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Relabels `i <-> j`.
    pub fn exchanged(&self) -> Self {
        let mut out = [ZERO; 16];
        for si in 0..4 {
            for sj in 0..4 {
                out[sj * 4 + si] = self.amplitudes[si * 4 + sj];
            }
        }
        Self { amplitudes: out }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reshapes into rows `(a_i, a_j)` and columns `(b_i, b_j)`, separating
    /// the label variable from the entangled variable.
    pub fn variable_reshape(&self) -> Matrix4<Complex64> {
        Matrix4::from_fn(|row, col| {
            let (ai, aj) = (row / 2, row % 2);
            let (bi, bj) = (col / 2, col % 2);
            self.amplitudes[(ai * 2 + bi) * 4 + aj * 2 + bj]
        })
    }

    /// Singular values of [`Self::variable_reshape`], descending. A single
    /// nonzero value means the state is a product of a label-variable part
    /// and an entangled-variable part.
    pub fn variable_singular_values(&self) -> [f64; 4] {
        let mut sv: Vec<f64> = self
            .variable_reshape()
            .singular_values()
            .iter()
            .copied()
            .collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        [sv[0], sv[1], sv[2], sv[3]]
    }
}

/// Symmetrized (bosons) or antisymmetrized (fermions) pseudo-label vector,
/// built from the canonical Fock expansion.
pub fn to_pseudo_label(state: &DualPairState) -> PseudoLabelVector {
    pseudo_label_from_fock(&to_fock(state))
}

pub fn pseudo_label_from_fock(expansion: &FockExpansion) -> PseudoLabelVector {
    let sign = expansion.statistics().exchange_sign();
    let mut out = [ZERO; 16];
    for (config, amp) in expansion.terms() {
        let [m1, m2] = config.occupied_modes();
        if m1 == m2 {
            out[m1.index() * 4 + m1.index()] += amp;
        } else {
            out[m1.index() * 4 + m2.index()] += amp * FRAC_1_SQRT_2;
            out[m2.index() * 4 + m1.index()] += amp * FRAC_1_SQRT_2 * sign;
        }
    }
    PseudoLabelVector { amplitudes: out }
}

/// Two-particle vector in one variable: index `first * 2 + second`.
type PairKet = [Complex64; 4];

fn pair_ket(first: usize, second: usize) -> PairKet {
    let mut k = [ZERO; 4];
    k[first * 2 + second] = Complex64::new(1.0, 0.0);
    k
}

fn combine(label_part: &PairKet, entangled_part: &PairKet) -> [Complex64; 16] {
    let mut out = [ZERO; 16];
    for ai in 0..2 {
        for aj in 0..2 {
            let la = label_part[ai * 2 + aj];
            if la == ZERO {
                continue;
            }
            for bi in 0..2 {
                for bj in 0..2 {
                    out[(ai * 2 + bi) * 4 + aj * 2 + bj] += la * entangled_part[bi * 2 + bj];
                }
            }
        }
    }
    out
}

fn lin(c1: Complex64, k1: &PairKet, c2: Complex64, k2: &PairKet) -> PairKet {
    std::array::from_fn(|n| c1 * k1[n] + c2 * k2[n])
}

fn add16(x: [Complex64; 16], y: [Complex64; 16], scale_y: f64) -> [Complex64; 16] {
    std::array::from_fn(|n| (x[n] + y[n] * scale_y) * FRAC_1_SQRT_2)
}

/// Pseudo-label vector grouped by the label variable:
/// `|A1 A2> (alpha |B1 B2> + beta |B2 B1>) ± |A2 A1> (alpha |B2 B1> + beta |B1 B2>)`.
pub fn pseudo_label_grouped_by_label(state: &DualPairState) -> PseudoLabelVector {
    let sign = state.statistics.exchange_sign();
    let (a12, a21) = (pair_ket(0, 1), pair_ket(1, 0));
    let (b12, b21) = (pair_ket(0, 1), pair_ket(1, 0));
    let first = combine(&a12, &lin(state.alpha, &b12, state.beta, &b21));
    let second = combine(&a21, &lin(state.alpha, &b21, state.beta, &b12));
    PseudoLabelVector { amplitudes: add16(first, second, sign) }
}

/// Pseudo-label vector grouped by the entangled variable:
/// `(alpha |A1 A2> ± beta |A2 A1>) |B1 B2> ± (alpha |A2 A1> ± beta |A1 A2>) |B2 B1>`.
///
/// For fermions the second group carries its own exchange sign; without it
/// the vector would be symmetric rather than antisymmetric under `i <-> j`.
pub fn pseudo_label_grouped_by_entangled(state: &DualPairState) -> PseudoLabelVector {
    let sign = state.statistics.exchange_sign();
    let (a12, a21) = (pair_ket(0, 1), pair_ket(1, 0));
    let (b12, b21) = (pair_ket(0, 1), pair_ket(1, 0));
    let first = combine(&lin(state.alpha, &a12, state.beta * sign, &a21), &b12);
    let second = combine(&lin(state.alpha, &a21, state.beta * sign, &a12), &b21);
    PseudoLabelVector { amplitudes: add16(first, second, sign) }
}
