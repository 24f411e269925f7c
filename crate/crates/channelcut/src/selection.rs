//! Pre-/post-selected channels: projector handling, reduction of a selected
//! unitary channel to an effective operator on fewer qubits, and the
//! decomposition pipeline that exploits the reduction.
//!
//! A selected channel `ρ ↦ P_out U P_in ρ P_in U† P_out` factors through a
//! smaller operator: diagonalize both projectors, conjugate `U` into the
//! diagonal frames, and keep the block supported by the projector ranks. The
//! channel then equals `[O_out (|0⟩⟨0|^{⊗(n−ñ)} ⊗ Ṽ) O_in]` with
//! `ñ = ⌈log₂ max(r_in, r_out)⌉`, so a decomposition of the ñ-qubit `[Ṽ]`
//! realizes the full selected channel at the smaller overhead.

use crate::channels::{pauli_x, ChannelMix};
use crate::exec;
use crate::matcore::{cr, eig_projector, kron, ComplexMatrix, MatError};
use crate::qpd::{self, QpdError, QuasiDecomposition};

const PROJECTOR_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
const IDENTITY_TOL: f64 = 1e-9;

/// Errors from building selections and effective operators.
#[derive(Debug, thiserror::Error)]
pub enum SelectionError {
    /// Projector diagonalization failed (non-Hermitian or bad spectrum).
    #[error(transparent)]
    Mat(#[from] MatError),
    /// Decomposition of the effective operator failed.
    #[error(transparent)]
    Qpd(#[from] QpdError),
    /// Input and output projectors have different sizes.
    #[error("projector sizes differ: {0}x{0} vs {1}x{1}")]
    DimensionMismatch(usize, usize),
    /// The channel operator is not unitary within tolerance.
    #[error("operator is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    /// A selected-qubit count lies outside the valid range.
    #[error("selected-qubit count {m} out of range for {n} qubits")]
    OutOfRange { m: usize, n: usize },
}

/// A pair of selection projectors with their ranks and diagonalizing
/// unitaries.
///
/// The diagonalizers satisfy the asymmetric conventions
/// `o_in · p_in · o_in† = diag(I_{r_in}, 0)` and
/// `o_out† · p_out · o_out = diag(I_{r_out}, 0)`.
#[derive(Debug, Clone)]
pub struct Selection {
    /// Pre-selection projector.
    pub p_in: ComplexMatrix,
    /// Post-selection projector.
    pub p_out: ComplexMatrix,
    /// Rank of `p_in`.
    pub r_in: usize,
    /// Rank of `p_out`.
    pub r_out: usize,
    /// Diagonalizer of `p_in`.
    pub o_in: ComplexMatrix,
    /// Diagonalizer of `p_out`.
    pub o_out: ComplexMatrix,
}

/// The reduced form of a selected unitary channel.
#[derive(Debug, Clone)]
pub struct EffectiveChannel {
    /// Qubit count of the original operator.
    pub n: usize,
    /// Qubit count of the effective operator.
    pub n_tilde: usize,
    /// Effective operator, `2^ñ × 2^ñ`; rows beyond `r_out` and columns
    /// beyond `r_in` are zero.
    pub v_tilde: ComplexMatrix,
    /// Diagonalizer of the pre-selection projector.
    pub o_in: ComplexMatrix,
    /// Diagonalizer of the post-selection projector.
    pub o_out: ComplexMatrix,
    /// Qubit indices (most significant first) that carry the fixed `|0⟩⟨0|`
    /// factor in the reassembled operator; always the leading `n − ñ` qubits
    /// under this construction.
    pub embedding: Vec<usize>,
}

fn ceil_log2(x: usize) -> usize {
    if x <= 1 {
        0
    } else {
        (x - 1).ilog2() as usize + 1
    }
}

fn qubit_count(dim: usize) -> usize {
    assert!(
        dim.is_power_of_two(),
        "selection: dimension {dim} is not a power of two"
    );
    dim.trailing_zeros() as usize
}

/// The projector `|0⟩⟨0|^{⊗m} ⊗ I^{⊗(n−m)}` fixing the `m` most significant
/// qubits to `|0⟩`.
pub fn zeros_projector(n: usize, m: usize) -> ComplexMatrix {
    assert!(m <= n, "zeros_projector: m = {m} exceeds n = {n}");
    let dim = 1usize << n;
    let kept = 1usize << (n - m);
    ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j && i < kept {
            cr(1.0)
        } else {
            cr(0.0)
        }
    })
}

/// Builds a [`Selection`] from two projectors by diagonalizing each with the
/// deterministic projector eigendecomposition.
pub fn make_selection(
    p_in: &ComplexMatrix,
    p_out: &ComplexMatrix,
) -> Result<Selection, SelectionError> {
    if p_in.nrows() != p_out.nrows() {
        return Err(SelectionError::DimensionMismatch(
            p_in.nrows(),
            p_out.nrows(),
        ));
    }
    let (o_in, r_in) = eig_projector(p_in, PROJECTOR_TOL)?;
    let (o_diag, r_out) = eig_projector(p_out, PROJECTOR_TOL)?;
    // eig_projector returns o with o·p·o† diagonal; the output-side
    // convention places the dagger on the left, so the diagonalizer is the
    // adjoint.
    let o_out = o_diag.adjoint();
    Ok(Selection {
        p_in: p_in.clone(),
        p_out: p_out.clone(),
        r_in,
        r_out,
        o_in,
        o_out,
    })
}

/// Reduces the selected channel of a unitary `u` to its effective operator.
///
/// Computes `core = o_out† · u · o_in†`, keeps the upper-left
/// `r_out × r_in` block, and embeds it zero-padded in a `2^ñ × 2^ñ` matrix
/// with `ñ = ⌈log₂ max(r_in, r_out)⌉`. The defining operator identity
/// `P_out · u · P_in = o_out · (|0⟩⟨0|^{⊗(n−ñ)} ⊗ ṽ) · o_in` is verified
/// internally and a violation panics, since it would indicate a bug rather
/// than a recoverable input condition.
pub fn effective_operator(
    u: &ComplexMatrix,
    sel: &Selection,
) -> Result<EffectiveChannel, SelectionError> {
    let dim = u.nrows();
    assert_eq!(dim, u.ncols(), "effective_operator: operator must be square");
    assert_eq!(
        dim,
        sel.p_in.nrows(),
        "effective_operator: selection size does not match operator"
    );
    let n = qubit_count(dim);
    let unitary_dev = (u * u.adjoint() - ComplexMatrix::identity(dim, dim)).norm();
    if unitary_dev > UNITARY_TOL {
        return Err(SelectionError::NotUnitary(unitary_dev));
    }
    let core = sel.o_out.adjoint() * u * sel.o_in.adjoint();
    let n_tilde = ceil_log2(sel.r_in.max(sel.r_out));
    let dim_t = 1usize << n_tilde;
    let mut v_tilde = ComplexMatrix::zeros(dim_t, dim_t);
    for i in 0..sel.r_out {
        for j in 0..sel.r_in {
            v_tilde[(i, j)] = core[(i, j)];
        }
    }
    let mut embedded = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim_t {
        for j in 0..dim_t {
            embedded[(i, j)] = v_tilde[(i, j)];
        }
    }
    let reassembled = &sel.o_out * &embedded * &sel.o_in;
    let direct = &sel.p_out * u * &sel.p_in;
    let identity_dev = (&reassembled - &direct).norm();
    assert!(
        identity_dev < IDENTITY_TOL,
        "effective_operator: reduction identity violated (deviation {identity_dev:.3e})"
    );
    Ok(EffectiveChannel {
        n,
        n_tilde,
        v_tilde,
        o_in: sel.o_in.clone(),
        o_out: sel.o_out.clone(),
        embedding: (0..n - n_tilde).collect(),
    })
}

/// The selection pair `p_in = |0⟩⟨0|^{⊗m_in} ⊗ I`,
/// `p_out = |0⟩⟨0|^{⊗m_out} ⊗ I` on `n` qubits. Both projectors are already
/// diagonal, so both diagonalizers are the identity.
pub fn zeros_selection(n: usize, m_in: usize, m_out: usize) -> Result<Selection, SelectionError> {
    for m in [m_in, m_out] {
        if m > n {
            return Err(SelectionError::OutOfRange { m, n });
        }
    }
    let dim = 1usize << n;
    Ok(Selection {
        p_in: zeros_projector(n, m_in),
        p_out: zeros_projector(n, m_out),
        r_in: 1usize << (n - m_in),
        r_out: 1usize << (n - m_out),
        o_in: ComplexMatrix::identity(dim, dim),
        o_out: ComplexMatrix::identity(dim, dim),
    })
}

/// The selection pair `p_in = |0⟩⟨0|^{⊗(m+1)} ⊗ I`,
/// `p_out = |1⟩⟨1| ⊗ |0⟩⟨0|^{⊗m} ⊗ I` on `n` qubits, which post-selects the
/// most significant qubit flipped relative to its preparation. The output
/// diagonalizer is `X ⊗ I^{⊗(n−1)}`.
pub fn flipped_lead_selection(n: usize, m: usize) -> Result<Selection, SelectionError> {
    if m + 1 > n {
        return Err(SelectionError::OutOfRange { m, n });
    }
    let dim = 1usize << n;
    let rank = 1usize << (n - m - 1);
    let p_in = zeros_projector(n, m + 1);
    let p_out = ComplexMatrix::from_fn(dim, dim, |i, j| {
        if i == j && i >= dim / 2 && i < dim / 2 + rank {
            cr(1.0)
        } else {
            cr(0.0)
        }
    });
    let mut o_out = pauli_x();
    for _ in 1..n {
        o_out = kron(&o_out, &ComplexMatrix::identity(2, 2));
    }
    Ok(Selection {
        p_in,
        p_out,
        r_in: rank,
        r_out: rank,
        o_in: ComplexMatrix::identity(dim, dim),
        o_out,
    })
}

/// Fast path combining [`zeros_selection`] with [`effective_operator`]: the
/// effective operator is read directly out of `u`.
pub fn effective_for_zeros(
    u: &ComplexMatrix,
    m_in: usize,
    m_out: usize,
) -> Result<EffectiveChannel, SelectionError> {
    let n = qubit_count(u.nrows());
    let sel = zeros_selection(n, m_in, m_out)?;
    effective_operator(u, &sel)
}

/// Fast path combining [`flipped_lead_selection`] with
/// [`effective_operator`]: the effective operator reads from the lower-left
/// block of `u`.
pub fn effective_for_flipped_lead(
    u: &ComplexMatrix,
    m: usize,
) -> Result<EffectiveChannel, SelectionError> {
    let n = qubit_count(u.nrows());
    let sel = flipped_lead_selection(n, m)?;
    effective_operator(u, &sel)
}

/// Runs the full selected-decomposition pipeline: reduce `u` under the
/// selection, decompose the effective channel `[ṽ]` over the one-qubit
/// basis, and normalize the coefficients to sum to one (recording the raw
/// sum in the `rescale` field).
///
/// The degenerate `ñ = 0` case (both ranks one) yields the single scalar
/// term with `rescale = |ṽ|²`.
pub fn decompose_selected(
    u: &ComplexMatrix,
    sel: &Selection,
) -> Result<(QuasiDecomposition, EffectiveChannel), SelectionError> {
    let eff = effective_operator(u, sel)?;
    if eff.n_tilde == 0 {
        let weight = eff.v_tilde[(0, 0)].norm_sqr();
        if weight.is_nan() || weight <= 1e-12 {
            return Err(SelectionError::Qpd(QpdError::NonPositiveSum(weight)));
        }
        let d = QuasiDecomposition {
            n_qubits: 0,
            terms: vec![(1.0, Vec::new())],
            gamma: 1.0,
            residual: 0.0,
            rescale: weight,
        };
        return Ok((d, eff));
    }
    let raw = qpd::decompose(&ChannelMix::single(eff.v_tilde.clone()))?;
    let raw_sum: f64 = raw.terms.iter().map(|(c, _)| c).sum();
    let normalized = qpd::normalize(raw, raw_sum)?;
    Ok((normalized, eff))
}

/// Sampling-overhead grid over selected-qubit counts `0..=n` on both sides.
///
/// Entry `(m_in, m_out)` reports the overhead of the decomposition at the
/// symmetric selection depth `s = min(m_in, m_out)` — the selection depth
/// guaranteed on both ends. This conservative figure depends only on the
/// weaker side and coincides with the exact selected overhead on the
/// diagonal.
pub fn overhead_grid(u: &ComplexMatrix) -> Result<Vec<Vec<f64>>, SelectionError> {
    let n = qubit_count(u.nrows());
    let diagonal: Vec<Result<f64, SelectionError>> = exec::ordered_map(n + 1, |s| {
        let sel = zeros_selection(n, s, s)?;
        let (d, _) = decompose_selected(u, &sel)?;
        Ok(d.gamma)
    });
    let mut values = Vec::with_capacity(n + 1);
    for entry in diagonal {
        values.push(entry?);
    }
    let grid = (0..=n)
        .map(|m_in| (0..=n).map(|m_out| values[m_in.min(m_out)]).collect())
        .collect();
    Ok(grid)
}
