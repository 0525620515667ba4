//! First-principles construction of the averaged port states on the full
//! qubit tensor product, and extraction of their Jordan structure.
//!
//! Qubits are ordered A (n), B (n'), C (n); qubit 0 is the most significant
//! bit of a basis index.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::program_machine::PortConfig;
use crate::{Error, Result};

/// Cap on `2n + n'` for dense construction (dimension 1024).
pub const MAX_DENSE_QUBITS: u32 = 10;
/// Eigenvalues above this count as support.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;
/// Singular values closer than this are binned into one block.
pub const BINNING_TOL: f64 = 1e-8;
/// Port groups up to this size are symmetrized by summing permutations.
const PERMUTATION_SUM_MAX_QUBITS: u32 = 6;

#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    matrix: DMatrix<Complex64>,
}

impl DenseOperator {
    pub fn from_matrix(matrix: DMatrix<Complex64>) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidArgument(format!(
                "operator must be square, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        Ok(Self { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.matrix[(i, j)]
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let dim = self.dim();
        (0..dim)
            .all(|i| (i..dim).all(|j| (self.entry(i, j) - self.entry(j, i).conj()).norm() <= tol))
    }

    /// Eigenvalues in ascending order; the operator must be Hermitian.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .matrix
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Hermitian, unit trace, and no eigenvalue below `-tol`.
    pub fn is_density(&self, tol: f64) -> bool {
        self.is_hermitian(1e-12)
            && (self.trace() - Complex64::new(1.0, 0.0)).norm() <= tol
            && self.eigenvalues().first().is_none_or(|&min| min >= -tol)
    }

    pub fn rank(&self, threshold: f64) -> usize {
        self.eigenvalues()
            .iter()
            .filter(|&&v| v > threshold)
            .count()
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Orthonormal basis of the eigenvectors with eigenvalue above
    /// `threshold`, as matrix columns.
    pub fn support_basis(&self, threshold: f64) -> DMatrix<Complex64> {
        let eig = self.matrix.clone().symmetric_eigen();
        let columns: Vec<DVector<Complex64>> = eig
            .eigenvalues
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > threshold)
            .map(|(i, _)| eig.eigenvectors.column(i).into_owned())
            .collect();
        if columns.is_empty() {
            DMatrix::zeros(self.dim(), 0)
        } else {
            DMatrix::from_columns(&columns)
        }
    }

    fn scale(mut self, factor: f64) -> Self {
        self.matrix.scale_mut(factor);
        self
    }
}

/// Projector onto the completely symmetric subspace of `k` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricProjector {
    qubits: u32,
    projector: DenseOperator,
}

impl SymmetricProjector {
    /// Up to six qubits the projector is the average of all `k!` qubit
    /// permutation operators (cost `O(k!·k·2^k)`); larger groups use the sum
    /// of Dicke-state projectors, which is the same operator.
    pub fn new(qubits: u32) -> Result<Self> {
        if qubits > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit {
                qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        let projector = if qubits <= PERMUTATION_SUM_MAX_QUBITS {
            permutation_average(qubits)
        } else {
            dicke_sum(qubits)
        };
        Ok(Self { qubits, projector })
    }

    /// Same operator built as a sum over Dicke states, for cross-checking.
    pub fn from_dicke_states(qubits: u32) -> Result<Self> {
        if qubits > MAX_DENSE_QUBITS {
            return Err(Error::SizeLimit {
                qubits,
                max: MAX_DENSE_QUBITS,
            });
        }
        Ok(Self {
            qubits,
            projector: dicke_sum(qubits),
        })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    /// Dimension `k + 1` of the symmetric subspace.
    pub fn dim_sym(&self) -> usize {
        self.qubits as usize + 1
    }

    pub fn operator(&self) -> &DenseOperator {
        &self.projector
    }
}

fn permute_bits(index: usize, perm: &[usize], qubits: usize) -> usize {
    let mut out = 0;
    for (from, &to) in perm.iter().enumerate() {
        let bit = (index >> (qubits - 1 - from)) & 1;
        out |= bit << (qubits - 1 - to);
    }
    out
}

/// Heap's algorithm over `0..k`.
fn for_each_permutation(k: usize, mut visit: impl FnMut(&[usize])) {
    let mut perm: Vec<usize> = (0..k).collect();
    let mut counters = vec![0usize; k];
    visit(&perm);
    let mut i = 0;
    while i < k {
        if counters[i] < i {
            if i % 2 == 0 {
                perm.swap(0, i);
            } else {
                perm.swap(counters[i], i);
            }
            visit(&perm);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}

fn permutation_average(qubits: u32) -> DenseOperator {
    let k = qubits as usize;
    let dim = 1usize << k;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    let mut count = 0usize;
    for_each_permutation(k, |perm| {
        count += 1;
        for x in 0..dim {
            matrix[(permute_bits(x, perm, k), x)] += Complex64::new(1.0, 0.0);
        }
    });
    DenseOperator { matrix }.scale(1.0 / count as f64)
}

fn dicke_sum(qubits: u32) -> DenseOperator {
    let dim = 1usize << qubits;
    let mut class_size = vec![0usize; qubits as usize + 1];
    for x in 0..dim {
        class_size[x.count_ones() as usize] += 1;
    }
    let matrix = DMatrix::from_fn(dim, dim, |x, y| {
        let w = x.count_ones();
        if w == y.count_ones() {
            Complex64::new(1.0 / class_size[w as usize] as f64, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    DenseOperator { matrix }
}

/// Averaged port states `σ₁ = 1_AB ⊗ 1_C / (d_AB d_C)` and
/// `σ₂ = 1_A ⊗ 1_BC / (d_A d_BC)`.
pub fn build_sigma(config: PortConfig) -> Result<(DenseOperator, DenseOperator)> {
    let qubits = config.total_qubits();
    if qubits > MAX_DENSE_QUBITS {
        return Err(Error::SizeLimit {
            qubits,
            max: MAX_DENSE_QUBITS,
        });
    }
    let program = SymmetricProjector::new(config.n())?;
    let joint = SymmetricProjector::new(config.n() + config.nprime())?;
    let norm = 1.0 / (joint.dim_sym() * program.dim_sym()) as f64;
    let sigma1 = joint.operator().kron(program.operator()).scale(norm);
    let sigma2 = program.operator().kron(joint.operator()).scale(norm);
    Ok((sigma1, sigma2))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockOverlap {
    /// Total angular momentum inferred from the multiplicity, `(m − 1)/2`.
    pub j: f64,
    pub overlap: f64,
    pub multiplicity: usize,
}

/// Distinct singular values of the cross-Gram matrix of the two supports.
#[derive(Debug, Clone, PartialEq)]
pub struct GramDecomposition {
    /// Ascending in overlap.
    pub block_overlaps: Vec<BlockOverlap>,
    /// Largest raw singular value, before clipping to 1.
    pub max_singular_value: f64,
}

/// Paired Jordan bases: column `k` of `first` lies in the support of `σ₁`,
/// column `k` of `second` in the support of `σ₂`, and
/// `⟨first_k | second_l⟩ = overlaps[k] δ_kl`.
#[derive(Debug, Clone)]
pub struct JordanPairs {
    pub first: DMatrix<Complex64>,
    pub second: DMatrix<Complex64>,
    pub overlaps: Vec<f64>,
}

/// Jordan bases of the supports of `σ₁` and `σ₂` from the SVD of their
/// cross-Gram matrix.
pub fn jordan_pairs(sigma1: &DenseOperator, sigma2: &DenseOperator) -> Result<JordanPairs> {
    if sigma1.dim() != sigma2.dim() {
        return Err(Error::InvalidArgument(
            "operators act on different spaces".into(),
        ));
    }
    let u1 = sigma1.support_basis(SUPPORT_THRESHOLD);
    let u2 = sigma2.support_basis(SUPPORT_THRESHOLD);
    let gram = u1.adjoint() * &u2;
    let svd = gram.svd(true, true);
    let (w, v_t) = (
        svd.u.expect("left singular vectors requested"),
        svd.v_t.expect("right singular vectors requested"),
    );
    Ok(JordanPairs {
        first: &u1 * w,
        second: &u2 * v_t.adjoint(),
        overlaps: svd.singular_values.iter().copied().collect(),
    })
}

/// Overlaps and multiplicities of the Jordan blocks of `σ₁` versus `σ₂`.
pub fn jordan_overlaps_numeric(
    sigma1: &DenseOperator,
    sigma2: &DenseOperator,
) -> Result<GramDecomposition> {
    let pairs = jordan_pairs(sigma1, sigma2)?;
    let mut values = pairs.overlaps;
    values.sort_by(f64::total_cmp);
    let max_singular_value = values.last().copied().unwrap_or(0.0);

    let mut bins: Vec<Vec<f64>> = Vec::new();
    for v in values {
        match bins.last_mut() {
            Some(bin) if v - bin[bin.len() - 1] <= BINNING_TOL => bin.push(v),
            _ => bins.push(vec![v]),
        }
    }
    let block_overlaps = bins
        .into_iter()
        .map(|bin| {
            let (lo, hi) = (bin[0], bin[bin.len() - 1]);
            if hi - lo > BINNING_TOL {
                return Err(Error::BinningAmbiguity(format!(
                    "singular values chain from {lo} to {hi} within one bin"
                )));
            }
            let mean = bin.iter().sum::<f64>() / bin.len() as f64;
            Ok(BlockOverlap {
                j: (bin.len() as f64 - 1.0) / 2.0,
                overlap: mean.min(1.0),
                multiplicity: bin.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramDecomposition {
        block_overlaps,
        max_singular_value,
    })
}
