//! The dual representation of an identical-particle pair state.
//!
//! Swapping the order of the last two creation operators in
//! `(alpha c†_{A1,B1} c†_{A2,B2} + beta c†_{A1,B2} c†_{A2,B1}) |0>` and then
//! reading `B` as the which-particle label gives
//! `alpha |A1>_{B1} |A2>_{B2} ± beta |A2>_{B1} |A1>_{B2}`: the pair is
//! entangled in `A` with the same magnitude, whatever the statistics.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{DualPairState, Statistics, VariablePair};

/// Default tolerance for [`is_factorizable`].
pub const FACTORIZABLE_TOL: f64 = 1e-9;

/// Re-expresses the state with the roles of label and entangled variable
/// interchanged: `(alpha, beta)` for bosons, `(alpha, -beta)` for fermions.
pub fn dual_representation(state: &DualPairState) -> DualPairState {
    let sign = state.statistics().exchange_sign();
    DualPairState::new(
        state.alpha(),
        state.beta() * sign,
        state.entangled_var().clone(),
        state.label_var().clone(),
        state.statistics(),
    )
    .expect("swapping variables of a valid state keeps it valid")
}

/// `2 |alpha| |beta|`.
pub fn concurrence(state: &DualPairState) -> f64 {
    (2.0 * state.alpha().norm() * state.beta().norm()).min(1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct DualityReport {
    pub original: DualPairState,
    pub dual: DualPairState,
    pub concurrence_original: f64,
    pub concurrence_dual: f64,
    pub factorizable: bool,
}

pub fn dualism_magnitude_check(state: &DualPairState) -> DualityReport {
    let dual = dual_representation(state);
    DualityReport {
        concurrence_original: concurrence(state),
        concurrence_dual: concurrence(&dual),
        factorizable: is_factorizable(state, FACTORIZABLE_TOL),
        original: state.clone(),
        dual,
    }
}

/// True when `alpha = ±beta`, i.e. the pseudo-label vector splits into a
/// label-variable factor times an entangled-variable factor.
pub fn is_factorizable(state: &DualPairState, tol: f64) -> bool {
    // Rotate the global phase so alpha is real and non-negative.
    let phase = if state.alpha().norm() > 0.0 {
        state.alpha().conj() / state.alpha().norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let (a, b) = (state.alpha() * phase, state.beta() * phase);
    (a - b).norm() < tol || (a + b).norm() < tol
}

/// `alpha |B1>_{A1} |B1>_{A2} + beta |B2>_{A1} |B2>_{A2}`: both particles share
/// the entangled value in each branch, so routing by `B` would send both to
/// the same place and the dualism is not manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct NonManifestState {
    pub alpha: Complex64,
    pub beta: Complex64,
    pub label_var: VariablePair,
    pub entangled_var: VariablePair,
    pub statistics: Statistics,
}

impl NonManifestState {
    /// Bipartite vector, `A1` particle first, index `b_first * 2 + b_second`.
    pub fn labeled_vector(&self) -> [Complex64; 4] {
        let z = Complex64::new(0.0, 0.0);
        [self.alpha, z, z, self.beta]
    }
}

/// Applies the local swap `|B1>_{A2} <-> |B2>_{A2}` and returns the
/// resulting manifest state.
pub fn manifest_repair(state: &NonManifestState) -> Result<DualPairState> {
    let psi = state.labeled_vector();
    // X on the second factor: index (b1, b2) -> (b1, 1 - b2).
    let repaired: [Complex64; 4] = std::array::from_fn(|n| psi[(n / 2) * 2 + (1 - n % 2)]);
    debug_assert!(repaired[0] == Complex64::new(0.0, 0.0) && repaired[3] == Complex64::new(0.0, 0.0));
    if repaired[1].norm_sqr() + repaired[2].norm_sqr() == 0.0 {
        return Err(Error::ZeroState);
    }
    DualPairState::new(
        repaired[1],
        repaired[2],
        state.label_var.clone(),
        state.entangled_var.clone(),
        state.statistics,
    )
}
