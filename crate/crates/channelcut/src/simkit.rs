//! Density-matrix simulation of small qubit circuits with depolarizing
//! noise, post-selection, fidelity, and the signed Monte-Carlo estimator
//! that realizes a quasiprobability decomposition by sampling its terms.
//!
//! Conventions:
//! - Qubit 0 is the leftmost tensor factor (most significant bit of a basis
//!   index).
//! - Noise placement: one depolarization channel after each gate, on exactly
//!   the gate's qubits — probability `p_local` after a one-qubit gate,
//!   `p_cnot` independently on both qubits after a CNOT.
//! - A sampled decomposition term is realized as operator conjugation by its
//!   (possibly non-unitary) term operator, wrapped in the selection frames;
//!   under noise it pays one `p_local` depolarization per one-qubit factor of
//!   the term, reflecting that each factor occupies one physical gate slot.
//!   The selection frames themselves (state preparation and measurement
//!   bases) are treated as ideal.
//! - Determinism: sampling is chunked, with each chunk drawing from its own
//!   counter-derived random stream, so estimates are bit-identical for a
//!   fixed `(seed, n_samples)` regardless of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{basis16, pauli_x, pauli_y, pauli_z, tensor_term, ChannelTerm};
use crate::exec;
use crate::matcore::{cr, kron, max_modulus, ComplexMatrix, ComplexVector};
use crate::qpd::QuasiDecomposition;
use crate::selection::EffectiveChannel;

const HERMITIAN_TOL: f64 = 1e-10;
const TRACE_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-9;
const UNITARY_TOL: f64 = 1e-9;
const NORMALIZED_TOL: f64 = 1e-8;

/// Samples per random-stream chunk in Monte-Carlo estimation.
const SAMPLE_CHUNK: usize = 1024;

/// Errors from simulation and estimation.
#[derive(Debug, thiserror::Error)]
pub enum SimError {
    /// A state matrix deviates from Hermiticity beyond tolerance.
    #[error("state is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    /// A state trace lies outside `(0, 1]` beyond tolerance.
    #[error("state trace {0} is outside (0, 1]")]
    TraceOutOfRange(f64),
    /// A state has an eigenvalue below `-1e-9`.
    #[error("state has negative eigenvalue {0:.3e}")]
    NotPositive(f64),
    /// Operand dimensions do not match.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// Fidelity requires unit-trace inputs.
    #[error("state is not normalized (trace {0})")]
    NotNormalized(f64),
    /// The decomposition to sample from has no terms.
    #[error("decomposition has no terms")]
    EmptyDecomposition,
}

/// An `n`-qubit density matrix.
///
/// [`DensityMatrix::new`] validates the physicality invariants (Hermitian,
/// trace in `(0, 1]`, positive semidefinite); [`DensityMatrix::from_parts`]
/// skips them for intermediate results such as sub-normalized post-selected
/// states and signed Monte-Carlo averages.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    /// Qubit count.
    pub n: usize,
    /// The `2ⁿ × 2ⁿ` matrix.
    pub mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validating constructor.
    pub fn new(mat: ComplexMatrix) -> Result<Self, SimError> {
        let state = Self::from_parts(mat);
        let herm_dev = max_modulus(&(&state.mat - state.mat.adjoint()));
        if herm_dev > HERMITIAN_TOL {
            return Err(SimError::NotHermitian(herm_dev));
        }
        let trace = state.trace();
        if trace <= 0.0 || trace > 1.0 + TRACE_TOL {
            return Err(SimError::TraceOutOfRange(trace));
        }
        let eig = nalgebra::SymmetricEigen::new(state.mat.clone());
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        if min_eig < -PSD_TOL {
            return Err(SimError::NotPositive(min_eig));
        }
        Ok(state)
    }

    /// Wraps a matrix without physicality checks. The dimension must still
    /// be a power of two.
    pub fn from_parts(mat: ComplexMatrix) -> Self {
        let dim = mat.nrows();
        assert_eq!(dim, mat.ncols(), "density matrix must be square");
        assert!(
            dim.is_power_of_two(),
            "density matrix dimension {dim} is not a power of two"
        );
        Self {
            n: dim.trailing_zeros() as usize,
            mat,
        }
    }

    /// The pure state `|index⟩⟨index|` on `n` qubits.
    pub fn pure(n: usize, index: usize) -> Self {
        let dim = 1usize << n;
        assert!(index < dim, "basis index {index} out of range for {n} qubits");
        let mut mat = ComplexMatrix::zeros(dim, dim);
        mat[(index, index)] = cr(1.0);
        Self::from_parts(mat)
    }

    /// The pure state `|ψ⟩⟨ψ|` for a (not necessarily normalized) ket.
    pub fn from_ket(psi: &ComplexVector) -> Self {
        let norm = psi.norm();
        assert!(norm > 0.0, "ket must be nonzero");
        let unit = psi / cr(norm);
        Self::from_parts(&unit * unit.adjoint())
    }

    /// Real part of the trace.
    pub fn trace(&self) -> f64 {
        self.mat.trace().re
    }

    /// The state divided by its trace.
    pub fn normalize(&self) -> Self {
        let trace = self.trace();
        assert!(trace > 0.0, "cannot normalize a state with trace {trace}");
        Self::from_parts(&self.mat * cr(1.0 / trace))
    }
}

/// One element of a circuit.
#[derive(Debug, Clone)]
pub enum Gate {
    /// A one-qubit unitary on the given qubit.
    OneQubit {
        /// Acted qubit.
        qubit: usize,
        /// The `2 × 2` unitary.
        matrix: ComplexMatrix,
        /// Human-readable name for reports.
        label: String,
    },
    /// A controlled-NOT.
    Cnot {
        /// Control qubit.
        control: usize,
        /// Target qubit.
        target: usize,
    },
}

/// An ordered gate list on `n` qubits.
///
/// Gates are validated as they are pushed: indices must be in range, CNOT
/// control and target distinct, and one-qubit matrices unitary to `1e-9`
/// (violations panic, since they indicate construction bugs rather than data
/// conditions).
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    n: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    /// An empty circuit on `n` qubits.
    pub fn new(n: usize) -> Self {
        Self { n, gates: Vec::new() }
    }

    /// Qubit count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// The gates in application order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Total gate count.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// Whether the circuit has no gates.
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Number of CNOT gates.
    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    /// Number of one-qubit gates.
    pub fn one_qubit_count(&self) -> usize {
        self.gates.len() - self.cnot_count()
    }

    /// Circuit depth under greedy scheduling: gates on disjoint qubits share
    /// a layer; each gate lands one layer after the latest of its qubits.
    pub fn depth(&self) -> usize {
        let mut level = vec![0usize; self.n];
        let mut max_level = 0;
        for gate in &self.gates {
            let layer = match gate {
                Gate::OneQubit { qubit, .. } => level[*qubit] + 1,
                Gate::Cnot { control, target } => level[*control].max(level[*target]) + 1,
            };
            match gate {
                Gate::OneQubit { qubit, .. } => level[*qubit] = layer,
                Gate::Cnot { control, target } => {
                    level[*control] = layer;
                    level[*target] = layer;
                }
            }
            max_level = max_level.max(layer);
        }
        max_level
    }

    /// Appends a one-qubit gate.
    pub fn push_one_qubit(&mut self, qubit: usize, matrix: ComplexMatrix, label: impl Into<String>) {
        assert!(qubit < self.n, "qubit {qubit} out of range for {} qubits", self.n);
        assert_eq!(matrix.nrows(), 2, "one-qubit gate must be 2x2");
        assert_eq!(matrix.ncols(), 2, "one-qubit gate must be 2x2");
        let dev = (&matrix * matrix.adjoint() - ComplexMatrix::identity(2, 2)).norm();
        assert!(
            dev <= UNITARY_TOL,
            "one-qubit gate is not unitary (deviation {dev:.3e})"
        );
        self.gates.push(Gate::OneQubit {
            qubit,
            matrix,
            label: label.into(),
        });
    }

    /// Appends a CNOT gate.
    pub fn push_cnot(&mut self, control: usize, target: usize) {
        assert!(control < self.n, "control {control} out of range for {} qubits", self.n);
        assert!(target < self.n, "target {target} out of range for {} qubits", self.n);
        assert_ne!(control, target, "CNOT control and target must differ");
        self.gates.push(Gate::Cnot { control, target });
    }

    /// Appends an already-built gate, revalidating it.
    pub fn push_gate(&mut self, gate: Gate) {
        match gate {
            Gate::OneQubit { qubit, matrix, label } => self.push_one_qubit(qubit, matrix, label),
            Gate::Cnot { control, target } => self.push_cnot(control, target),
        }
    }
}

/// Per-gate-type depolarization probabilities.
#[derive(Debug, Clone, Copy)]
pub struct NoiseModel {
    /// Depolarization probability after each one-qubit gate.
    pub p_local: f64,
    /// Depolarization probability on each qubit after a CNOT.
    pub p_cnot: f64,
}

impl NoiseModel {
    /// A noise model with the given probabilities; both must lie in `[0, 1]`.
    pub fn new(p_local: f64, p_cnot: f64) -> Self {
        for p in [p_local, p_cnot] {
            assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
        }
        Self { p_local, p_cnot }
    }

    /// The zero-noise model.
    pub fn noiseless() -> Self {
        Self { p_local: 0.0, p_cnot: 0.0 }
    }
}

/// A Monte-Carlo estimate with its statistical and sampling metadata.
#[derive(Debug, Clone)]
pub struct McEstimate {
    /// Estimated expectation value.
    pub value: f64,
    /// Standard error of the mean.
    pub std_error: f64,
    /// Number of samples drawn.
    pub n_samples: usize,
    /// Sampling overhead of the decomposition.
    pub gamma: f64,
    /// Seed the estimate was drawn with.
    pub seed: u64,
}

/// Lifts a one-qubit operator to the full space, acting on `qubit` out of
/// `n` (qubit 0 is the most significant factor).
pub fn embed_one(n: usize, qubit: usize, op: &ComplexMatrix) -> ComplexMatrix {
    assert!(qubit < n, "qubit {qubit} out of range for {n} qubits");
    assert_eq!(op.nrows(), 2, "embed_one takes a 2x2 operator");
    assert_eq!(op.ncols(), 2, "embed_one takes a 2x2 operator");
    let left = ComplexMatrix::identity(1 << qubit, 1 << qubit);
    let right = ComplexMatrix::identity(1 << (n - 1 - qubit), 1 << (n - 1 - qubit));
    kron(&kron(&left, op), &right)
}

fn cnot_image(index: usize, n: usize, control: usize, target: usize) -> usize {
    let control_bit = (index >> (n - 1 - control)) & 1;
    if control_bit == 1 {
        index ^ (1 << (n - 1 - target))
    } else {
        index
    }
}

fn apply_cnot_mat(mat: &ComplexMatrix, n: usize, control: usize, target: usize) -> ComplexMatrix {
    let dim = mat.nrows();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let pi = cnot_image(i, n, control, target);
        for j in 0..dim {
            let pj = cnot_image(j, n, control, target);
            out[(pi, pj)] = mat[(i, j)];
        }
    }
    out
}

fn depolarize_mat(mat: ComplexMatrix, n: usize, qubit: usize, p: f64) -> ComplexMatrix {
    if p == 0.0 {
        return mat;
    }
    let x = embed_one(n, qubit, &pauli_x());
    let y = embed_one(n, qubit, &pauli_y());
    let z = embed_one(n, qubit, &pauli_z());
    let twirl = &x * &mat * x.adjoint() + &y * &mat * y.adjoint() + &z * &mat * z.adjoint();
    mat * cr(1.0 - 0.75 * p) + twirl * cr(0.25 * p)
}

/// Depolarizes one qubit of a state with probability `p`:
/// `D_p(σ) = (1 − p) σ + p (I/2) ⊗ Tr_qubit(σ)`.
pub fn depolarize(rho: &DensityMatrix, qubit: usize, p: f64) -> DensityMatrix {
    assert!(qubit < rho.n, "qubit {qubit} out of range for {} qubits", rho.n);
    assert!((0.0..=1.0).contains(&p), "probability {p} outside [0, 1]");
    DensityMatrix::from_parts(depolarize_mat(rho.mat.clone(), rho.n, qubit, p))
}

/// Runs a circuit on an input state under the noise model: each gate is
/// applied in order and followed by depolarization on its qubits
/// (`p_local` for one-qubit gates; `p_cnot` independently on control and
/// target for CNOTs).
pub fn run(
    circuit: &Circuit,
    rho0: &DensityMatrix,
    noise: &NoiseModel,
) -> Result<DensityMatrix, SimError> {
    if circuit.n != rho0.n {
        return Err(SimError::DimensionMismatch {
            expected: 1 << circuit.n,
            got: 1 << rho0.n,
        });
    }
    let n = circuit.n;
    let mut mat = rho0.mat.clone();
    for gate in &circuit.gates {
        match gate {
            Gate::OneQubit { qubit, matrix, .. } => {
                let g = embed_one(n, *qubit, matrix);
                mat = &g * mat * g.adjoint();
                mat = depolarize_mat(mat, n, *qubit, noise.p_local);
            }
            Gate::Cnot { control, target } => {
                mat = apply_cnot_mat(&mat, n, *control, *target);
                mat = depolarize_mat(mat, n, *control, noise.p_cnot);
                mat = depolarize_mat(mat, n, *target, noise.p_cnot);
            }
        }
    }
    Ok(DensityMatrix::from_parts(mat))
}

/// Projects a state onto `p`: returns the unnormalized `P ρ P` together
/// with the selection probability `Tr(ρ P)`. The caller normalizes when the
/// probability is positive.
pub fn postselect(rho: &DensityMatrix, p: &ComplexMatrix) -> (DensityMatrix, f64) {
    assert_eq!(p.nrows(), rho.mat.nrows(), "projector size must match state");
    assert_eq!(p.ncols(), rho.mat.ncols(), "projector size must match state");
    let projected = p * &rho.mat * p;
    let prob = (&rho.mat * p).trace().re;
    (DensityMatrix::from_parts(projected), prob)
}

fn sqrtm_psd(m: &ComplexMatrix) -> ComplexMatrix {
    let hermitized = (m + m.adjoint()) * cr(0.5);
    let eig = nalgebra::SymmetricEigen::new(hermitized);
    let dim = m.nrows();
    let mut diag = ComplexMatrix::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        diag[(k, k)] = cr(lambda.max(0.0).sqrt());
    }
    &eig.eigenvectors * diag * eig.eigenvectors.adjoint()
}

/// Uhlmann fidelity `(Tr √(√a · b · √a))²` between two normalized states.
pub fn fidelity(a: &DensityMatrix, b: &DensityMatrix) -> Result<f64, SimError> {
    if a.n != b.n {
        return Err(SimError::DimensionMismatch {
            expected: 1 << a.n,
            got: 1 << b.n,
        });
    }
    for state in [a, b] {
        let trace = state.trace();
        if (trace - 1.0).abs() > NORMALIZED_TOL {
            return Err(SimError::NotNormalized(trace));
        }
    }
    let sa = sqrtm_psd(&a.mat);
    let inner = &sa * &b.mat * &sa;
    let hermitized = (&inner + inner.adjoint()) * cr(0.5);
    let eig = nalgebra::SymmetricEigen::new(hermitized);
    // Eigenvalues at the numerical noise floor are treated as zero: their
    // square roots would otherwise inject O(√ε) error into the sum.
    let root_sum: f64 = eig
        .eigenvalues
        .iter()
        .map(|&lambda| if lambda > 1e-13 { lambda.sqrt() } else { 0.0 })
        .sum();
    Ok(root_sum * root_sum)
}

/// Clips negative eigenvalues of a (signed-average) state to zero and
/// renormalizes to unit trace. Returns the projected state and the clipped
/// negativity mass `Σ |λ₋|`, which vanishes as sample counts grow.
pub fn project_to_psd(rho: &DensityMatrix) -> (DensityMatrix, f64) {
    let hermitized = (&rho.mat + rho.mat.adjoint()) * cr(0.5);
    let eig = nalgebra::SymmetricEigen::new(hermitized);
    let dim = rho.mat.nrows();
    let mut negativity = 0.0;
    let mut diag = ComplexMatrix::zeros(dim, dim);
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda < 0.0 {
            negativity += -lambda;
        } else {
            diag[(k, k)] = cr(lambda);
        }
    }
    let clipped = &eig.eigenvectors * diag * eig.eigenvectors.adjoint();
    let trace = clipped.trace().re;
    assert!(
        trace > 0.0,
        "projected state has no positive mass (trace {trace})"
    );
    (DensityMatrix::from_parts(clipped * cr(1.0 / trace)), negativity)
}

/// Builds the full-space operator of one decomposition term: the tensor
/// product of its one-qubit basis factors (scaled by the square root of the
/// decomposition's rescale factor), embedded alongside the `|0⟩⟨0|` factors
/// of the reduction and conjugated into the selection frames.
fn term_operator(
    wrap: &EffectiveChannel,
    basis: &[ChannelTerm],
    indices: &[u8],
    rescale: f64,
) -> ComplexMatrix {
    let scale = cr(rescale.sqrt());
    let small = if indices.is_empty() {
        ComplexMatrix::identity(1, 1) * scale
    } else {
        let parts: Vec<ChannelTerm> = indices
            .iter()
            .map(|&i| basis[(i - 1) as usize].clone())
            .collect();
        tensor_term(&parts).op * scale
    };
    let dim = 1usize << wrap.n;
    let dim_t = small.nrows();
    let mut embedded = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim_t {
        for j in 0..dim_t {
            embedded[(i, j)] = small[(i, j)];
        }
    }
    &wrap.o_out * embedded * &wrap.o_in
}

fn check_sampling_inputs(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
) -> Result<(), SimError> {
    if d.terms.is_empty() {
        return Err(SimError::EmptyDecomposition);
    }
    assert_eq!(
        d.n_qubits, wrap.n_tilde,
        "decomposition qubit count must match the effective channel"
    );
    if rho0.n != wrap.n {
        return Err(SimError::DimensionMismatch {
            expected: 1 << wrap.n,
            got: 1 << rho0.n,
        });
    }
    Ok(())
}

/// Simulated output of every term channel on `rho0` under the noise model:
/// conjugation by the term operator, then one `p_local` depolarization per
/// one-qubit factor (on the trailing `ñ` qubits that carry the effective
/// operator).
fn term_outputs(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
    noise: &NoiseModel,
) -> Vec<ComplexMatrix> {
    let basis = basis16();
    let n = wrap.n;
    let n_tilde = wrap.n_tilde;
    exec::ordered_map(d.terms.len(), |t| {
        let (_, indices) = &d.terms[t];
        let w = term_operator(wrap, &basis, indices, d.rescale);
        let mut out = &w * &rho0.mat * w.adjoint();
        for a in 0..n_tilde {
            out = depolarize_mat(out, n, n - n_tilde + a, noise.p_local);
        }
        out
    })
}

/// Draws `n_samples` term indices with probability `|c_i| / γ` and returns
/// the per-term counts. Sampling is chunked into fixed blocks, each drawing
/// from its own counter-derived stream of the seeded generator, so the counts
/// are identical for a fixed `(seed, n_samples)` at any thread count.
fn sample_term_counts(
    weights: &[f64],
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Vec<u64> {
    let t = weights.len();
    let mut cumulative = Vec::with_capacity(t);
    let mut acc = 0.0;
    for &w in weights {
        acc += w.abs() / gamma;
        cumulative.push(acc);
    }
    let n_chunks = n_samples.div_ceil(SAMPLE_CHUNK);
    let chunk_counts = exec::ordered_map(n_chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let drawn = SAMPLE_CHUNK.min(n_samples - c * SAMPLE_CHUNK);
        let mut counts = vec![0u64; t];
        for _ in 0..drawn {
            let u: f64 = rng.random();
            let idx = cumulative.partition_point(|&edge| edge <= u).min(t - 1);
            counts[idx] += 1;
        }
        counts
    });
    let mut totals = vec![0u64; t];
    for chunk in chunk_counts {
        for (total, count) in totals.iter_mut().zip(chunk) {
            *total += count;
        }
    }
    totals
}

/// Monte-Carlo estimate of `Tr(obs · Λ(ρ₀))` for the decomposed channel `Λ`,
/// by sampling terms with probability `|c_i| / γ` and averaging
/// `γ · sign(c_i) · Tr(obs · term output)`.
pub fn mc_expectation(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
    obs: &ComplexMatrix,
    n_samples: usize,
    seed: u64,
    noise: &NoiseModel,
) -> Result<McEstimate, SimError> {
    check_sampling_inputs(d, wrap, rho0)?;
    assert!(n_samples > 0, "n_samples must be positive");
    assert_eq!(obs.nrows(), 1 << wrap.n, "observable size must match state");
    let obs_dev = max_modulus(&(obs - obs.adjoint()));
    assert!(
        obs_dev <= 1e-9,
        "observable is not Hermitian (deviation {obs_dev:.3e})"
    );
    let outs = term_outputs(d, wrap, rho0, noise);
    let values: Vec<f64> = d
        .terms
        .iter()
        .zip(&outs)
        .map(|((c, _), out)| d.gamma * c.signum() * (obs * out).trace().re)
        .collect();
    let weights: Vec<f64> = d.terms.iter().map(|(c, _)| *c).collect();
    let counts = sample_term_counts(&weights, d.gamma, n_samples, seed);
    let total = n_samples as f64;
    let mean = values
        .iter()
        .zip(&counts)
        .map(|(v, &k)| v * k as f64)
        .sum::<f64>()
        / total;
    let variance = if n_samples > 1 {
        values
            .iter()
            .zip(&counts)
            .map(|(v, &k)| (v - mean).powi(2) * k as f64)
            .sum::<f64>()
            / (total - 1.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        value: mean,
        std_error: (variance / total).sqrt(),
        n_samples,
        gamma: d.gamma,
        seed,
    })
}

/// Monte-Carlo signed average of term output states: an estimate of the
/// decomposed channel's output density matrix. Hermitian by construction but
/// possibly indefinite at finite samples; pass through [`project_to_psd`]
/// before fidelity evaluation.
pub fn mc_state(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
    n_samples: usize,
    seed: u64,
    noise: &NoiseModel,
) -> Result<DensityMatrix, SimError> {
    check_sampling_inputs(d, wrap, rho0)?;
    assert!(n_samples > 0, "n_samples must be positive");
    let outs = term_outputs(d, wrap, rho0, noise);
    let weights: Vec<f64> = d.terms.iter().map(|(c, _)| *c).collect();
    let counts = sample_term_counts(&weights, d.gamma, n_samples, seed);
    let dim = 1usize << wrap.n;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for ((c, out), &k) in weights.iter().zip(&outs).zip(&counts) {
        if k > 0 {
            acc += out * cr(d.gamma * c.signum() * k as f64 / n_samples as f64);
        }
    }
    Ok(DensityMatrix::from_parts(acc))
}

/// Exhaustive (infinite-sample) signed sum `Σ c_i · Tr(obs · term output)`:
/// the exact value the Monte-Carlo estimator converges to.
pub fn exact_expectation(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
    obs: &ComplexMatrix,
    noise: &NoiseModel,
) -> Result<f64, SimError> {
    check_sampling_inputs(d, wrap, rho0)?;
    assert_eq!(obs.nrows(), 1 << wrap.n, "observable size must match state");
    let outs = term_outputs(d, wrap, rho0, noise);
    Ok(d
        .terms
        .iter()
        .zip(&outs)
        .map(|((c, _), out)| c * (obs * out).trace().re)
        .sum())
}

/// Exhaustive signed sum of term output states with exact weights: the
/// infinite-sample limit of [`mc_state`]. Noiseless, this equals the direct
/// channel output.
pub fn exact_state(
    d: &QuasiDecomposition,
    wrap: &EffectiveChannel,
    rho0: &DensityMatrix,
    noise: &NoiseModel,
) -> Result<DensityMatrix, SimError> {
    check_sampling_inputs(d, wrap, rho0)?;
    let outs = term_outputs(d, wrap, rho0, noise);
    let dim = 1usize << wrap.n;
    let mut acc = ComplexMatrix::zeros(dim, dim);
    for ((c, _), out) in d.terms.iter().zip(&outs) {
        acc += out * cr(*c);
    }
    Ok(DensityMatrix::from_parts(acc))
}
