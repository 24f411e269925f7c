//! Dense complex linear algebra: Kronecker products, column-stacking
//! vectorization, Hilbert–Schmidt inner product, Hermitian-projector
//! eigendecomposition, and real least squares.
//!
//! All operations are pure functions on immutable inputs and are safe to call
//! concurrently from any number of threads.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Complex scalar used throughout the crate.
pub type C64 = Complex64;
/// Dense complex matrix, the universal carrier for operators, states, and
/// Choi matrices. Stored column-major.
pub type ComplexMatrix = DMatrix<C64>;
/// Dense complex vector, the carrier for vectorized matrices.
pub type ComplexVector = DVector<C64>;

/// Largest row or column count `kron` will produce. Guards against typos that
/// would request absurd allocations.
pub const MAX_KRON_DIM: usize = 1 << 14;

/// Errors from the fallible linear-algebra operations.
#[derive(Debug, thiserror::Error)]
pub enum MatError {
    /// The input matrix differs from its adjoint by more than the tolerance.
    #[error("matrix is not Hermitian (max |p - p^dagger| entry is {0:.3e})")]
    NotHermitian(f64),
    /// An eigenvalue of the claimed projector lies outside {0, 1}.
    #[error("matrix is not a projector (eigenvalue {0} is outside {{0, 1}})")]
    NotAProjector(f64),
    /// The least-squares matrix has (nearly) linearly dependent columns.
    #[error("least-squares matrix is rank deficient (condition ratio {0:.3e})")]
    RankDeficient(f64),
}

/// Complex scalar with the given real part and zero imaginary part.
#[inline]
pub fn cr(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// Kronecker product with the standard block convention: block `(i, j)` of
/// the result is `a[(i, j)] * b`.
///
/// Panics if the result would exceed [`MAX_KRON_DIM`] in either dimension.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let rows = a.nrows().checked_mul(b.nrows());
    let cols = a.ncols().checked_mul(b.ncols());
    match (rows, cols) {
        (Some(r), Some(c)) if r <= MAX_KRON_DIM && c <= MAX_KRON_DIM => a.kronecker(b),
        _ => panic!(
            "kron target {}x{} * {}x{} exceeds the supported maximum dimension {}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols(),
            MAX_KRON_DIM
        ),
    }
}

/// Column-stacking vectorization: the columns of `a` stacked top to bottom.
pub fn vectorize(a: &ComplexMatrix) -> ComplexVector {
    ComplexVector::from_column_slice(a.as_slice())
}

/// Exact inverse of [`vectorize`] given the original shape.
pub fn devectorize(v: &ComplexVector, rows: usize, cols: usize) -> ComplexMatrix {
    assert_eq!(
        v.len(),
        rows * cols,
        "devectorize: vector length {} does not match {}x{}",
        v.len(),
        rows,
        cols
    );
    ComplexMatrix::from_column_slice(rows, cols, v.as_slice())
}

/// Hilbert–Schmidt inner product `Tr(a^dagger b)`.
///
/// Panics if the shapes differ.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> C64 {
    assert_eq!(
        a.shape(),
        b.shape(),
        "hs_inner: shape mismatch {:?} vs {:?}",
        a.shape(),
        b.shape()
    );
    a.dotc(b)
}

/// Maximum entry modulus of a matrix.
pub fn max_modulus(m: &ComplexMatrix) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Eigendecomposition of a Hermitian projector `p`.
///
/// Returns `(o, rank)` with `o` unitary such that `o * p * o.adjoint()` is
/// `diag(I_rank, 0)`: the eigenvalue-1 eigenvectors occupy the first `rank`
/// rows of `o`.
///
/// The ordering is deterministic: within the eigenvalue-1 and eigenvalue-0
/// spaces, eigenvectors are sorted by the index of their first component of
/// magnitude above `1e-9`, ascending, and each is phase-fixed so that this
/// component is real and positive.
///
/// `tol` bounds both the allowed deviation from Hermiticity and the distance
/// of each eigenvalue from {0, 1}; `1e-9` is a good default.
pub fn eig_projector(p: &ComplexMatrix, tol: f64) -> Result<(ComplexMatrix, usize), MatError> {
    assert_eq!(p.nrows(), p.ncols(), "eig_projector: matrix must be square");
    let herm_dev = max_modulus(&(p - p.adjoint()));
    if herm_dev > tol {
        return Err(MatError::NotHermitian(herm_dev));
    }
    let eig = nalgebra::SymmetricEigen::new(p.clone());
    let n = p.nrows();
    let mut ones: Vec<usize> = Vec::new();
    let mut zeros: Vec<usize> = Vec::new();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        if (lambda - 1.0).abs() <= tol {
            ones.push(j);
        } else if lambda.abs() <= tol {
            zeros.push(j);
        } else {
            return Err(MatError::NotAProjector(lambda));
        }
    }
    let pivot_index = |j: usize| -> usize {
        (0..n)
            .find(|&i| eig.eigenvectors[(i, j)].norm() > 1e-9)
            .expect("eig_projector: eigenvector has no component above 1e-9")
    };
    ones.sort_by_key(|&j| pivot_index(j));
    zeros.sort_by_key(|&j| pivot_index(j));
    let rank = ones.len();
    let mut q = ComplexMatrix::zeros(n, n);
    for (dst, &src) in ones.iter().chain(zeros.iter()).enumerate() {
        let pivot = eig.eigenvectors[(pivot_index(src), src)];
        let phase = pivot.conj() / pivot.norm();
        for i in 0..n {
            q[(i, dst)] = eig.eigenvectors[(i, src)] * phase;
        }
    }
    Ok((q.adjoint(), rank))
}

/// Least-squares solution of `m * x = y` for real `m` and `y`.
///
/// Requires at least as many rows as columns and numerically independent
/// columns. Returns the minimizer and the residual `‖m x − y‖₂`.
pub fn lstsq_real(m: &DMatrix<f64>, y: &DVector<f64>) -> Result<(DVector<f64>, f64), MatError> {
    assert!(
        m.nrows() >= m.ncols(),
        "lstsq_real: need rows >= cols, got {}x{}",
        m.nrows(),
        m.ncols()
    );
    assert_eq!(m.nrows(), y.len(), "lstsq_real: rhs length mismatch");
    let svd = m.clone().svd(true, true);
    let s_max = svd.singular_values.max();
    let s_min = svd.singular_values.min();
    if s_max == 0.0 || s_min <= s_max * 1e-10 {
        return Err(MatError::RankDeficient(s_min / s_max.max(f64::MIN_POSITIVE)));
    }
    let x: DVector<f64> = svd
        .solve(y, s_max * 1e-14)
        .expect("lstsq_real: SVD solve cannot fail once U and V are computed");
    let residual = (m * &x - y).norm();
    Ok((x, residual))
}

/// Haar-random unitary of the given dimension: QR of a complex Gaussian
/// matrix with the R-diagonal phase fix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        C64::new(re, im) * cr(std::f64::consts::FRAC_1_SQRT_2)
    });
    let qr = g.qr();
    let r = qr.r();
    let mut u = qr.q();
    for k in 0..dim {
        let d = r[(k, k)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { cr(1.0) };
        for i in 0..dim {
            u[(i, k)] *= phase;
        }
    }
    u
}
