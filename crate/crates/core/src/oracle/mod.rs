//! Independent numerical checks of the closed forms.
//!
//! Nothing here uses the saturation ladder or the closed-form angle formulas
//! as a shortcut: the concave solver works from the per-block objective and
//! its derivative, the angle scan from the raw outcome probabilities, and the
//! dense construction from explicit symmetrizers on the qubit tensor product.

mod concave;
mod dense;
mod monte_carlo;
mod povm_scan;

pub use concave::{concave_allocate, ConcaveSolution};
pub use dense::{
    build_sigma, jordan_overlaps_numeric, jordan_pairs, BlockOverlap, DenseOperator,
    GramDecomposition, JordanPairs, SymmetricProjector, BINNING_TOL, MAX_DENSE_QUBITS,
    SUPPORT_THRESHOLD,
};
pub use monte_carlo::{
    haar_overlap_moment, haar_qubit, monte_carlo_check, MonteCarloReport, MIN_TRIALS, RNG_ALGORITHM,
};
pub use povm_scan::{povm_scan, PovmScan};
