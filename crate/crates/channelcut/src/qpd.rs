//! Quasiprobability decomposition of n-qubit channels over tensor products of
//! the 16-element one-qubit basis.
//!
//! The decomposition writes a target channel as `Σ c_i [V_{i_1} ⊗ … ⊗ V_{i_ñ}]`
//! with real signed coefficients; `γ = Σ |c_i|` is the sampling overhead a
//! signed Monte-Carlo estimator pays for realizing the channel by sampling
//! basis terms.

use std::sync::OnceLock;

use crate::channels::{self, basis16, tensor_term, ChannelMix, ChannelTerm};
use crate::exec;
use crate::matcore::{cr, ComplexMatrix, MatError, C64};
use nalgebra::{DMatrix, DVector};

/// Largest qubit count `decompose` accepts (the flat system has `16^n`
/// unknowns).
pub const MAX_QUBITS: usize = 3;

/// Coefficients with magnitude below this threshold are treated as zero and
/// dropped from term lists.
pub const PRUNE_THRESHOLD: f64 = 1e-10;

const IMAG_TOLERANCE: f64 = 1e-8;
const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Errors from decomposition and normalization.
#[derive(Debug, thiserror::Error)]
pub enum QpdError {
    /// Underlying linear-algebra failure (dense solve path).
    #[error(transparent)]
    Mat(#[from] MatError),
    /// The solved coefficients do not represent the target within tolerance,
    /// either by Choi-space residual or by non-negligible imaginary parts.
    #[error("decomposition residual too large: {0:.3e}")]
    ResidualTooLarge(f64),
    /// The raw coefficient sum is not positive, so the normalization that
    /// divides by it is undefined for this target.
    #[error("coefficient sum {0:.3e} is not positive; cannot normalize")]
    NonPositiveSum(f64),
}

/// A solved decomposition: signed coefficients over per-qubit basis indices.
#[derive(Debug, Clone)]
pub struct QuasiDecomposition {
    /// Number of qubits the decomposed channel acts on.
    pub n_qubits: usize,
    /// `(coefficient, basis indices)` pairs; indices are 1-based into the
    /// 16-element basis, one per qubit, leftmost index = most significant
    /// qubit. Terms with `|coefficient| < PRUNE_THRESHOLD` are omitted.
    pub terms: Vec<(f64, Vec<u8>)>,
    /// Sampling overhead `Σ |c_i|`.
    pub gamma: f64,
    /// Frobenius distance between the represented Choi matrix and the
    /// target's.
    pub residual: f64,
    /// Trace-rescaling factor `c'` from normalization; `1.0` when the raw
    /// coefficients are used as solved. Reconstruction multiplies each term
    /// operator by `√rescale`.
    pub rescale: f64,
}

/// Sampling overhead `Σ |c_i|` of a coefficient list.
pub fn gamma_of(coeffs: &[f64]) -> f64 {
    coeffs.iter().map(|c| c.abs()).sum()
}

/// Row-major flattening of the 4×4 Choi matrix of one basis element.
fn flatten_single_choi(term: &ChannelTerm) -> Vec<C64> {
    let choi = channels::choi(&ChannelMix::single(term.op.clone()), 1).mat;
    let mut flat = Vec::with_capacity(16);
    for r in 0..4 {
        for c in 0..4 {
            flat.push(choi[(r, c)]);
        }
    }
    flat
}

/// 16×16 matrix whose column `b` is the flattened Choi matrix of basis
/// element `b`.
fn single_qubit_system() -> &'static ComplexMatrix {
    static SYSTEM: OnceLock<ComplexMatrix> = OnceLock::new();
    SYSTEM.get_or_init(|| {
        let basis = basis16();
        ComplexMatrix::from_fn(16, 16, |r, b| flatten_single_choi(&basis[b])[r])
    })
}

/// Inverse of [`single_qubit_system`].
fn single_qubit_system_inverse() -> &'static ComplexMatrix {
    static INVERSE: OnceLock<ComplexMatrix> = OnceLock::new();
    INVERSE.get_or_init(|| {
        single_qubit_system()
            .clone()
            .try_inverse()
            .expect("the 16 basis Choi matrices are linearly independent")
    })
}

/// Rearranges a `4ⁿ×4ⁿ` Choi matrix into a flat tensor with one base-16 mode
/// per qubit.
///
/// Choi entry `(i·N+k, j·N+l)` (with `N = 2ⁿ` and `i,k,j,l` read as n-bit
/// strings) contributes its per-qubit bit quadruple `(i_a, k_a, j_a, l_a)` as
/// mode digit `8i_a + 4k_a + 2j_a + l_a`; mode 0 (the most significant qubit)
/// is the most significant base-16 digit of the flat index. The rearrangement
/// is a permutation of entries, so Frobenius norms carry over unchanged.
fn choi_to_mode_tensor(choi: &ComplexMatrix, n: usize) -> Vec<C64> {
    let dim = 1usize << n;
    let flat_len = 16usize.pow(n as u32);
    let mut tensor = vec![cr(0.0); flat_len];
    for rr in 0..dim * dim {
        let (i, k) = (rr / dim, rr % dim);
        for cc in 0..dim * dim {
            let (j, l) = (cc / dim, cc % dim);
            let mut flat = 0usize;
            for a in 0..n {
                let shift = n - 1 - a;
                let digit = 8 * ((i >> shift) & 1)
                    + 4 * ((k >> shift) & 1)
                    + 2 * ((j >> shift) & 1)
                    + ((l >> shift) & 1);
                flat = flat * 16 + digit;
            }
            tensor[flat] = choi[(rr, cc)];
        }
    }
    tensor
}

/// Applies a 16×16 matrix along one mode of the flat tensor.
fn apply_along_mode(tensor: &[C64], m: &ComplexMatrix, stride: usize) -> Vec<C64> {
    let len = tensor.len();
    let outer_count = len / 16;
    let slices = exec::ordered_map(outer_count, |outer| {
        let hi = outer / stride;
        let lo = outer % stride;
        let base = hi * stride * 16 + lo;
        let mut vals = [cr(0.0); 16];
        for (r, val) in vals.iter_mut().enumerate() {
            let mut acc = cr(0.0);
            for s in 0..16 {
                acc += m[(r, s)] * tensor[base + s * stride];
            }
            *val = acc;
        }
        vals
    });
    let mut out = vec![cr(0.0); len];
    for (outer, vals) in slices.into_iter().enumerate() {
        let hi = outer / stride;
        let lo = outer % stride;
        let base = hi * stride * 16 + lo;
        for (r, val) in vals.into_iter().enumerate() {
            out[base + r * stride] = val;
        }
    }
    out
}

fn qubit_count_of(target: &ChannelMix) -> usize {
    assert!(
        !target.terms.is_empty(),
        "decompose: target mixture has no terms"
    );
    let dim = target.terms[0].1.dim();
    assert!(
        dim.is_power_of_two() && dim >= 2,
        "decompose: operator dimension {dim} is not a power of two"
    );
    let n = dim.trailing_zeros() as usize;
    assert!(
        n <= MAX_QUBITS,
        "decompose: {n} qubits exceeds the supported maximum {MAX_QUBITS}"
    );
    n
}

fn digits_of(flat: usize, n: usize) -> Vec<u8> {
    let mut digits = vec![0u8; n];
    let mut rest = flat;
    for a in (0..n).rev() {
        digits[a] = (rest % 16) as u8 + 1;
        rest /= 16;
    }
    digits
}

fn collect_terms(coeffs: &[f64], n: usize) -> (Vec<(f64, Vec<u8>)>, f64) {
    let mut terms = Vec::new();
    let mut gamma = 0.0;
    for (flat, &c) in coeffs.iter().enumerate() {
        if c.abs() >= PRUNE_THRESHOLD {
            terms.push((c, digits_of(flat, n)));
            gamma += c.abs();
        }
    }
    (terms, gamma)
}

/// Decomposes the target channel over all `16^ñ` tensor products of basis
/// elements via the Kronecker-factored solve: the flattened Choi vector of a
/// tensor-product term factors mode-by-mode, so the full system is solved by
/// applying the inverse of the 16×16 single-qubit system along each qubit
/// mode.
///
/// Coefficients are checked to be real (imaginary parts below `1e-8` are
/// dropped) and the Choi-space residual of the solution is verified below
/// `1e-8`.
pub fn decompose(target: &ChannelMix) -> Result<QuasiDecomposition, QpdError> {
    let n = qubit_count_of(target);
    let choi = channels::choi(target, n).mat;
    let tensor = choi_to_mode_tensor(&choi, n);
    let inv = single_qubit_system_inverse();
    let mut coeffs = tensor.clone();
    for a in 0..n {
        let stride = 16usize.pow((n - 1 - a) as u32);
        coeffs = apply_along_mode(&coeffs, inv, stride);
    }
    let worst_imag = coeffs.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if worst_imag > IMAG_TOLERANCE {
        return Err(QpdError::ResidualTooLarge(worst_imag));
    }
    let real_coeffs: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
    // Push the real coefficients back through the forward system; the
    // distance to the original tensor is exactly the Choi-space Frobenius
    // residual because the mode rearrangement permutes entries.
    let forward = single_qubit_system();
    let mut back: Vec<C64> = real_coeffs.iter().map(|&c| cr(c)).collect();
    for a in 0..n {
        let stride = 16usize.pow((n - 1 - a) as u32);
        back = apply_along_mode(&back, forward, stride);
    }
    let residual = back
        .iter()
        .zip(tensor.iter())
        .map(|(b, t)| (b - t).norm_sqr())
        .sum::<f64>()
        .sqrt();
    if residual > RESIDUAL_TOLERANCE {
        return Err(QpdError::ResidualTooLarge(residual));
    }
    let (terms, gamma) = collect_terms(&real_coeffs, n);
    Ok(QuasiDecomposition {
        n_qubits: n,
        terms,
        gamma,
        residual,
        rescale: 1.0,
    })
}

/// Dense cross-check path: solves the full `16^ñ`-unknown least-squares
/// system over stacked real and imaginary parts of the flattened Choi
/// matrices. Practical for `ñ ≤ 2`; exists to validate [`decompose`].
pub fn decompose_dense(target: &ChannelMix) -> Result<QuasiDecomposition, QpdError> {
    let n = qubit_count_of(target);
    assert!(n <= 2, "decompose_dense: supported only for 1 or 2 qubits");
    let basis = basis16();
    let unknowns = 16usize.pow(n as u32);
    // The Choi matrix is 4^n x 4^n, so its flattened length is 16^n.
    let flat_len = 16usize.pow(n as u32);
    let mut m = DMatrix::<f64>::zeros(2 * flat_len, unknowns);
    for col in 0..unknowns {
        let indices = digits_of(col, n);
        let parts: Vec<ChannelTerm> = indices
            .iter()
            .map(|&i| basis[(i - 1) as usize].clone())
            .collect();
        let op = tensor_term(&parts).op;
        let choi = channels::choi(&ChannelMix::single(op), n).mat;
        for (row, entry) in choi.iter().enumerate() {
            m[(row, col)] = entry.re;
            m[(flat_len + row, col)] = entry.im;
        }
    }
    let target_choi = channels::choi(target, n).mat;
    let mut y = DVector::<f64>::zeros(2 * flat_len);
    for (row, entry) in target_choi.iter().enumerate() {
        y[row] = entry.re;
        y[flat_len + row] = entry.im;
    }
    let (x, residual) = crate::matcore::lstsq_real(&m, &y)?;
    if residual > RESIDUAL_TOLERANCE {
        return Err(QpdError::ResidualTooLarge(residual));
    }
    let coeffs: Vec<f64> = x.iter().copied().collect();
    let (terms, gamma) = collect_terms(&coeffs, n);
    Ok(QuasiDecomposition {
        n_qubits: n,
        terms,
        gamma,
        residual,
        rescale: 1.0,
    })
}

/// Divides all coefficients by the raw sum `c'` and records `c'` in the
/// `rescale` field, so that the normalized coefficients sum to one while
/// [`reconstruct`] compensates by scaling each term operator by `√c'`.
///
/// Fails with [`QpdError::NonPositiveSum`] when `c' ≤ 1e-12`.
pub fn normalize(d: QuasiDecomposition, raw_sum: f64) -> Result<QuasiDecomposition, QpdError> {
    if raw_sum.is_nan() || raw_sum <= 1e-12 {
        return Err(QpdError::NonPositiveSum(raw_sum));
    }
    let terms: Vec<(f64, Vec<u8>)> = d
        .terms
        .into_iter()
        .map(|(c, idx)| (c / raw_sum, idx))
        .collect();
    let gamma = gamma_of(&terms.iter().map(|(c, _)| *c).collect::<Vec<_>>());
    Ok(QuasiDecomposition {
        n_qubits: d.n_qubits,
        terms,
        gamma,
        residual: d.residual,
        rescale: d.rescale * raw_sum,
    })
}

/// Rebuilds the channel mixture represented by a decomposition: each term is
/// the tensor product of its basis operators, scaled by `√rescale`.
pub fn reconstruct(d: &QuasiDecomposition) -> ChannelMix {
    let basis = basis16();
    let scale = cr(d.rescale.sqrt());
    let terms = d
        .terms
        .iter()
        .map(|(c, indices)| {
            let op = if indices.is_empty() {
                // Zero-qubit decomposition: the term operator is the scalar
                // rescale factor on a one-dimensional space.
                ComplexMatrix::identity(1, 1) * scale
            } else {
                let parts: Vec<ChannelTerm> = indices
                    .iter()
                    .map(|&i| basis[(i - 1) as usize].clone())
                    .collect();
                tensor_term(&parts).op * scale
            };
            (*c, ChannelTerm::new(op))
        })
        .collect();
    ChannelMix::new(terms)
}
