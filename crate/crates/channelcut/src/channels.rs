//! Quantum channels of the form `ρ ↦ Σ c_i V_i ρ V_i†`, the 16-element
//! one-qubit operation basis, Choi matrices, tensor products, and channel
//! application to density matrices.
//!
//! Qubit ordering convention: index 0 is the leftmost tensor factor, i.e. the
//! most significant bit of a computational-basis index. All modules share
//! this convention.

use crate::matcore::{cr, kron, vectorize, ComplexMatrix, C64};

/// A single completely positive map `[V]ρ = VρV†`, represented by `V`.
///
/// Individual terms need not be trace-nonincreasing; mixtures carry signed
/// coefficients.
#[derive(Debug, Clone)]
pub struct ChannelTerm {
    /// The operator `V` of the map `[V]`.
    pub op: ComplexMatrix,
}

impl ChannelTerm {
    /// Wraps a square operator as a channel term.
    pub fn new(op: ComplexMatrix) -> Self {
        assert_eq!(op.nrows(), op.ncols(), "ChannelTerm operator must be square");
        Self { op }
    }

    /// Hilbert-space dimension the term acts on.
    pub fn dim(&self) -> usize {
        self.op.nrows()
    }
}

/// A real-linear combination of channel terms, `ρ ↦ Σ c_i V_i ρ V_i†`.
#[derive(Debug, Clone, Default)]
pub struct ChannelMix {
    /// Signed coefficients paired with their terms.
    pub terms: Vec<(f64, ChannelTerm)>,
}

impl ChannelMix {
    /// Mixture from explicit (coefficient, term) pairs.
    pub fn new(terms: Vec<(f64, ChannelTerm)>) -> Self {
        assert!(
            terms.iter().all(|(c, _)| c.is_finite()),
            "ChannelMix coefficients must be finite"
        );
        Self { terms }
    }

    /// The single-term mixture `1.0 * [op]`.
    pub fn single(op: ComplexMatrix) -> Self {
        Self::new(vec![(1.0, ChannelTerm::new(op))])
    }
}

/// Choi matrix of an `n`-qubit channel: a `4ⁿ × 4ⁿ` complex matrix.
#[derive(Debug, Clone)]
pub struct ChoiMatrix {
    /// The matrix itself.
    pub mat: ComplexMatrix,
}

/// Stable display labels of the 16 basis operations, in basis order.
pub const BASIS_LABELS: [&str; 16] = [
    "I", "X", "Y", "Z", "RX", "RY", "RZ", "RYZ", "RZX", "RXY", "piX", "piY", "piZ", "piYZ",
    "piZX", "piXY",
];

/// 2×2 identity.
pub fn pauli_i() -> ComplexMatrix {
    ComplexMatrix::identity(2, 2)
}

/// Pauli X.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)])
}

/// Pauli Y.
pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(
        2,
        2,
        &[cr(0.0), C64::new(0.0, -1.0), C64::new(0.0, 1.0), cr(0.0)],
    )
}

/// Pauli Z.
pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[cr(1.0), cr(0.0), cr(0.0), cr(-1.0)])
}

/// The 16 one-qubit basis operations, in the fixed order matching
/// [`BASIS_LABELS`]: the four Paulis, then the six rotations
/// `(1/√2)(A + iB)`-type elements, then the six contractions
/// `(1/2)(A + iB)`-type elements.
pub fn basis16() -> Vec<ChannelTerm> {
    let i = pauli_i();
    let x = pauli_x();
    let y = pauli_y();
    let z = pauli_z();
    let im = C64::i();
    let s = cr(std::f64::consts::FRAC_1_SQRT_2);
    let h = cr(0.5);
    let ops = vec![
        i.clone(),
        x.clone(),
        y.clone(),
        z.clone(),
        (&i + &x * im) * s,  // R_X
        (&i + &y * im) * s,  // R_Y
        (&i + &z * im) * s,  // R_Z
        (&y + &z) * s,       // R_YZ
        (&z + &x) * s,       // R_ZX
        (&x + &y) * s,       // R_XY
        (&i + &x) * h,       // pi_X
        (&i + &y) * h,       // pi_Y
        (&i + &z) * h,       // pi_Z
        (&y + &z * im) * h,  // pi_YZ
        (&z + &x * im) * h,  // pi_ZX
        (&x + &y * im) * h,  // pi_XY
    ];
    ops.into_iter().map(ChannelTerm::new).collect()
}

/// Applies the mixture to a density matrix: `Σ c_i V_i ρ V_i†`.
///
/// Panics on shape mismatch.
pub fn apply(mix: &ChannelMix, rho: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(rho.nrows(), rho.ncols(), "apply: state must be square");
    let dim = rho.nrows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (c, term) in &mix.terms {
        assert_eq!(
            term.dim(),
            dim,
            "apply: term dimension {} does not match state dimension {}",
            term.dim(),
            dim
        );
        out += (&term.op * rho * term.op.adjoint()) * cr(*c);
    }
    out
}

/// Choi matrix of the mixture via the rank-1 form: `Σ c_i |V_i⟩⟩⟨⟨V_i|`.
///
/// Index convention: entry `(i·N + k, j·N + l)` is the `(k, l)` entry of the
/// channel applied to the matrix unit `|i⟩⟨j|`; this agrees with
/// [`choi_by_definition`] and is tested to.
pub fn choi(mix: &ChannelMix, n: usize) -> ChoiMatrix {
    let dim = 1usize << n;
    let mut mat = ComplexMatrix::zeros(dim * dim, dim * dim);
    for (c, term) in &mix.terms {
        assert_eq!(
            term.dim(),
            dim,
            "choi: term dimension {} does not match 2^{}",
            term.dim(),
            n
        );
        let v = vectorize(&term.op);
        mat += (&v * v.adjoint()) * cr(*c);
    }
    ChoiMatrix { mat }
}

/// Choi matrix via the defining sum `Σ_ij |i⟩⟨j| ⊗ mix(|i⟩⟨j|)`.
///
/// Slower than [`choi`]; exists as an independent construction path for
/// cross-validation.
pub fn choi_by_definition(mix: &ChannelMix, n: usize) -> ChoiMatrix {
    let dim = 1usize << n;
    let mut mat = ComplexMatrix::zeros(dim * dim, dim * dim);
    for i in 0..dim {
        for j in 0..dim {
            let mut e = ComplexMatrix::zeros(dim, dim);
            e[(i, j)] = cr(1.0);
            let image = apply(mix, &e);
            mat += kron(&e, &image);
        }
    }
    ChoiMatrix { mat }
}

/// Controlled-NOT on two qubits; the more significant qubit controls.
pub fn cnot_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4, 4);
    m.swap_rows(2, 3);
    m
}

/// Toffoli gate on three qubits; the two more significant qubits control.
pub fn toffoli_matrix() -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(8, 8);
    m.swap_rows(6, 7);
    m
}

/// Quantum Fourier transform on `n` qubits:
/// `F[j, k] = ω^{jk} / √(2ⁿ)` with `ω = exp(2πi / 2ⁿ)`.
pub fn qft_matrix(n: usize) -> ComplexMatrix {
    let dim = 1usize << n;
    let norm = 1.0 / (dim as f64).sqrt();
    ComplexMatrix::from_fn(dim, dim, |j, k| {
        let angle = 2.0 * std::f64::consts::PI * ((j * k) % dim) as f64 / dim as f64;
        C64::from_polar(norm, angle)
    })
}

/// Tensor product of channel terms in list order; the first element becomes
/// the leftmost (most significant) factor.
///
/// Panics on an empty list or if the product dimension exceeds the supported
/// maximum.
pub fn tensor_term(parts: &[ChannelTerm]) -> ChannelTerm {
    assert!(!parts.is_empty(), "tensor_term: need at least one part");
    let mut op = parts[0].op.clone();
    for part in &parts[1..] {
        op = kron(&op, &part.op);
    }
    ChannelTerm::new(op)
}
