//! A small linear-system solver circuit (2×2 Hermitian system) built with
//! phase estimation, a conditional rotation encoding the inverse eigenvalues,
//! and uncomputation — plus the decomposition study comparing a noisy run of
//! the full circuit against the signed sampling of its selected channel.
//!
//! Qubit layout (most significant first): rotation ancilla, `m` eigenvalue
//! register qubits (most significant register bit nearest the ancilla), one
//! working qubit. The success branch post-selects the ancilla flipped to
//! `|1⟩` and the register back at `|0⟩^{⊗m}`, which reduces the whole
//! circuit to a one-qubit effective operator proportional to `A⁻¹`.
//!
//! Exact-encoding requirement: each eigenvalue `λ` of `a` must satisfy
//! `λ t / (2π) = ℓ / 2^m` for an integer register value `ℓ` in
//! `[1, 2^m − 1]` that is a power of two. Exactness makes the conditional
//! rotation implementable as independent per-bit controlled rotations and
//! the success branch exactly proportional to `A⁻¹`; anything else is
//! rejected rather than approximated.

use std::f64::consts::PI;

use crate::channels::{pauli_x, BASIS_LABELS};
use crate::exec;
use crate::matcore::{cr, ComplexMatrix, ComplexVector, C64};
use crate::selection::{
    decompose_selected, flipped_lead_selection, SelectionError,
};
use crate::simkit::{
    self, embed_one, fidelity, postselect, project_to_psd, Circuit, DensityMatrix, Gate,
    NoiseModel, SimError,
};

/// Largest supported eigenvalue-register size.
pub const MAX_REGISTER_BITS: usize = 6;

const HERMITIAN_TOL: f64 = 1e-9;
const ENCODING_TOL: f64 = 1e-9;
const CIRCUIT_MATRIX_TOL: f64 = 1e-8;

/// Errors from problem validation, construction, and the study.
#[derive(Debug, thiserror::Error)]
pub enum HhlError {
    /// Selection or decomposition failure.
    #[error(transparent)]
    Selection(#[from] SelectionError),
    /// Simulation failure.
    #[error(transparent)]
    Sim(#[from] SimError),
    /// The system matrix is not Hermitian.
    #[error("system matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    /// The right-hand-side vector is zero.
    #[error("right-hand-side vector is zero")]
    ZeroVector,
    /// An eigenvalue does not scale to an exactly encodable register value.
    #[error(
        "eigenvalue {eigenvalue} maps to register value {register_value}, \
         which is not a nonzero in-range power of two"
    )]
    EigenvalueNotEncodable {
        /// The offending eigenvalue of the system matrix.
        eigenvalue: f64,
        /// Its scaled register value `λ t 2^m / (2π)`.
        register_value: f64,
    },
    /// The rotation constant exceeds the smallest encoded eigenvalue, so an
    /// inverse-eigenvalue rotation amplitude would exceed one.
    #[error("rotation constant {c_rot} exceeds the smallest encoded eigenvalue {lambda_min}")]
    ConstantTooLarge {
        /// The requested rotation constant.
        c_rot: f64,
        /// The smallest encoded eigenvalue.
        lambda_min: f64,
    },
    /// The system matrix is singular.
    #[error("system matrix is singular")]
    Singular,
}

/// A 2×2 Hermitian linear system with its encoding parameters.
#[derive(Debug, Clone)]
pub struct HhlProblem {
    /// System matrix (2×2, Hermitian).
    pub a: ComplexMatrix,
    /// Right-hand side, stored normalized to unit length.
    pub b: ComplexVector,
    /// Eigenvalue-register bits.
    pub m: usize,
    /// Evolution time for `exp(i a t)`.
    pub t: f64,
    /// Rotation constant: the success amplitude on eigenvalue `λ` is
    /// `c_rot / λ`.
    pub c_rot: f64,
}

impl HhlProblem {
    /// Validates and builds a problem; `b` is normalized on construction.
    pub fn new(
        a: ComplexMatrix,
        b: ComplexVector,
        m: usize,
        t: f64,
        c_rot: f64,
    ) -> Result<Self, HhlError> {
        assert_eq!(b.len(), 2, "right-hand side must have dimension 2");
        let norm = b.norm();
        if norm <= 0.0 {
            return Err(HhlError::ZeroVector);
        }
        let problem = Self {
            a,
            b: &b / cr(norm),
            m,
            t,
            c_rot,
        };
        encoded_eigenvalues(&problem)?;
        Ok(problem)
    }

    /// The bundled demonstration problem: `a = [[1, −1/3], [−1/3, 1]]`,
    /// `b = (1, 0)ᵀ`, a 3-bit register, `t = 3π/4`, and the rotation
    /// constant at the smallest eigenvalue `2/3`.
    pub fn example() -> Self {
        let mut a = ComplexMatrix::identity(2, 2);
        a[(0, 1)] = cr(-1.0 / 3.0);
        a[(1, 0)] = cr(-1.0 / 3.0);
        let mut b = ComplexVector::zeros(2);
        b[0] = cr(1.0);
        Self::new(a, b, 3, 3.0 * PI / 4.0, 2.0 / 3.0).expect("bundled example problem is valid")
    }
}

/// One row of the noise-comparison table.
#[derive(Debug, Clone)]
pub struct FidelityRow {
    /// Noise setting of this row.
    pub noise: NoiseModel,
    /// Post-selection success probability of the full-circuit run.
    pub selection_prob: f64,
    /// Fidelity of the normalized post-selected full-circuit output against
    /// the reference solution state.
    pub fidelity_without: f64,
    /// Fidelity of the decomposed signed average against the reference.
    pub fidelity_with: f64,
    /// Negativity mass clipped when projecting the signed average to a
    /// physical state (zero in exhaustive mode up to rounding).
    pub clipped_negativity: f64,
}

/// Results of the decomposition study.
#[derive(Debug, Clone)]
pub struct HhlReport {
    /// Sampling overhead of the effective-channel decomposition.
    pub gamma: f64,
    /// Normalized decomposition coefficients with their basis labels.
    pub coefficients: Vec<(f64, String)>,
    /// One row per noise setting.
    pub fidelity_table: Vec<FidelityRow>,
    /// Depth of the full circuit under greedy scheduling.
    pub depth: usize,
    /// CNOT count of the full circuit.
    pub cnot_count: usize,
    /// Base seed of the sampled rows (row `i` derives its stream from
    /// `seed + i`); unused in exhaustive mode.
    pub seed: u64,
}

fn encoded_eigenvalues(problem: &HhlProblem) -> Result<Vec<(f64, usize)>, HhlError> {
    assert_eq!(problem.a.nrows(), 2, "system matrix must be 2x2");
    assert_eq!(problem.a.ncols(), 2, "system matrix must be 2x2");
    assert!(
        problem.m >= 1 && problem.m <= MAX_REGISTER_BITS,
        "register size {} outside 1..={MAX_REGISTER_BITS}",
        problem.m
    );
    assert!(problem.t > 0.0, "evolution time must be positive");
    assert!(problem.c_rot > 0.0, "rotation constant must be positive");
    let herm_dev = crate::matcore::max_modulus(&(&problem.a - problem.a.adjoint()));
    if herm_dev > HERMITIAN_TOL {
        return Err(HhlError::NotHermitian(herm_dev));
    }
    let eig = nalgebra::SymmetricEigen::new(problem.a.clone());
    let capacity = 1usize << problem.m;
    let mut encoded = Vec::with_capacity(2);
    for &lambda in eig.eigenvalues.iter() {
        let register_value = lambda * problem.t / (2.0 * PI) * capacity as f64;
        let rounded = register_value.round();
        let in_range = rounded >= 1.0 && rounded <= (capacity - 1) as f64;
        let exact = (register_value - rounded).abs() <= ENCODING_TOL * capacity as f64;
        let ell = rounded as usize;
        if !(in_range && exact && ell.is_power_of_two()) {
            return Err(HhlError::EigenvalueNotEncodable {
                eigenvalue: lambda,
                register_value,
            });
        }
        encoded.push((lambda, ell));
    }
    let lambda_min = encoded
        .iter()
        .map(|&(_, ell)| encoded_lambda(problem, ell as f64))
        .fold(f64::INFINITY, f64::min);
    if problem.c_rot > lambda_min + 1e-12 {
        return Err(HhlError::ConstantTooLarge {
            c_rot: problem.c_rot,
            lambda_min,
        });
    }
    Ok(encoded)
}

/// The eigenvalue a register value `ℓ` stands for: `ℓ · 2π / (2^m · t)`.
fn encoded_lambda(problem: &HhlProblem, ell: f64) -> f64 {
    ell * 2.0 * PI / ((1usize << problem.m) as f64 * problem.t)
}

fn hadamard() -> ComplexMatrix {
    let h = 1.0 / 2.0_f64.sqrt();
    ComplexMatrix::from_row_slice(2, 2, &[cr(h), cr(h), cr(h), cr(-h)])
}

fn ry(theta: f64) -> ComplexMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    ComplexMatrix::from_row_slice(2, 2, &[cr(c), cr(-s), cr(s), cr(c)])
}

fn rz(theta: f64) -> ComplexMatrix {
    let mut g = ComplexMatrix::zeros(2, 2);
    g[(0, 0)] = C64::from_polar(1.0, -theta / 2.0);
    g[(1, 1)] = C64::from_polar(1.0, theta / 2.0);
    g
}

fn phase_diag(alpha: f64) -> ComplexMatrix {
    let mut g = ComplexMatrix::identity(2, 2);
    g[(1, 1)] = C64::from_polar(1.0, alpha);
    g
}

/// Euler angles `(α, β, γ, δ)` with `u = e^{iα} Rz(β) Ry(γ) Rz(δ)`.
fn zyz(u: &ComplexMatrix) -> (f64, f64, f64, f64) {
    let det = u[(0, 0)] * u[(1, 1)] - u[(0, 1)] * u[(1, 0)];
    let alpha = 0.5 * det.arg();
    let phase = C64::from_polar(1.0, -alpha);
    let a = u[(0, 0)] * phase;
    let b = u[(0, 1)] * phase;
    let gamma = 2.0 * b.norm().atan2(a.norm());
    let (beta_plus_delta, beta_minus_delta) = if b.norm() < 1e-12 {
        (-2.0 * a.arg(), 0.0)
    } else if a.norm() < 1e-12 {
        (0.0, 2.0 * (PI - b.arg()))
    } else {
        (-2.0 * a.arg(), 2.0 * (PI - b.arg()))
    };
    (
        alpha,
        (beta_plus_delta + beta_minus_delta) / 2.0,
        gamma,
        (beta_plus_delta - beta_minus_delta) / 2.0,
    )
}

/// Expands a controlled one-qubit unitary into one-qubit gates and two
/// CNOTs via the Euler-angle conjugation identity, in temporal order.
fn cu_gates(control: usize, target: usize, u: &ComplexMatrix, label: &str) -> Vec<Gate> {
    let (alpha, beta, gamma, delta) = zyz(u);
    let a_gate = rz(beta) * ry(gamma / 2.0);
    let b_gate = ry(-gamma / 2.0) * rz(-(delta + beta) / 2.0);
    let c_gate = rz((delta - beta) / 2.0);
    vec![
        Gate::OneQubit {
            qubit: target,
            matrix: c_gate,
            label: format!("{label}:c"),
        },
        Gate::Cnot { control, target },
        Gate::OneQubit {
            qubit: target,
            matrix: b_gate,
            label: format!("{label}:b"),
        },
        Gate::Cnot { control, target },
        Gate::OneQubit {
            qubit: target,
            matrix: a_gate,
            label: format!("{label}:a"),
        },
        Gate::OneQubit {
            qubit: control,
            matrix: phase_diag(alpha),
            label: format!("{label}:phase"),
        },
    ]
}

/// The reversed, element-wise adjoint of a gate list.
fn dagger_gates(gates: &[Gate]) -> Vec<Gate> {
    gates
        .iter()
        .rev()
        .map(|gate| match gate {
            Gate::OneQubit { qubit, matrix, label } => Gate::OneQubit {
                qubit: *qubit,
                matrix: matrix.adjoint(),
                label: match label.strip_suffix('†') {
                    Some(stripped) => stripped.to_string(),
                    None => format!("{label}†"),
                },
            },
            Gate::Cnot { control, target } => Gate::Cnot {
                control: *control,
                target: *target,
            },
        })
        .collect()
}

/// A controlled one-qubit unitary embedded in the full space, control and
/// target at arbitrary distinct positions.
fn controlled_on(n: usize, control: usize, target: usize, u: &ComplexMatrix) -> ComplexMatrix {
    assert_ne!(control, target, "control and target must differ");
    let mut p0 = ComplexMatrix::zeros(2, 2);
    p0[(0, 0)] = cr(1.0);
    let mut p1 = ComplexMatrix::zeros(2, 2);
    p1[(1, 1)] = cr(1.0);
    embed_one(n, control, &p0) + embed_one(n, control, &p1) * embed_one(n, target, u)
}

/// The Fourier-transform gate list on the given (contiguous, most
/// significant first) register qubits: per-qubit Hadamards with controlled
/// phases, then the bit-reversal swaps as CNOT triples.
fn qft_gates(reg: &[usize]) -> Vec<Gate> {
    let m = reg.len();
    let mut gates = Vec::new();
    for j in 0..m {
        gates.push(Gate::OneQubit {
            qubit: reg[j],
            matrix: hadamard(),
            label: "H".to_string(),
        });
        for k in (j + 1)..m {
            let angle = 2.0 * PI / (1u64 << (k - j + 1)) as f64;
            gates.extend(cu_gates(
                reg[k],
                reg[j],
                &phase_diag(angle),
                &format!("cphase/2^{}", k - j + 1),
            ));
        }
    }
    for i in 0..m / 2 {
        let (a, b) = (reg[i], reg[m - 1 - i]);
        gates.push(Gate::Cnot { control: a, target: b });
        gates.push(Gate::Cnot { control: b, target: a });
        gates.push(Gate::Cnot { control: a, target: b });
    }
    gates
}

/// Per-register-bit conditional-rotation angles: bit `idx` (most significant
/// first) stands for register value `2^{m−1−idx}`; its angle satisfies
/// `sin(θ/2) = c_rot / λ̃(2^{m−1−idx})`, or zero (gate omitted) when that
/// ratio exceeds one. Exact encoding to power-of-two register values makes
/// these independent rotations compose exactly.
fn rotation_angles(problem: &HhlProblem) -> Vec<f64> {
    (0..problem.m)
        .map(|idx| {
            let ell = (1usize << (problem.m - 1 - idx)) as f64;
            let lambda = encoded_lambda(problem, ell);
            let ratio = problem.c_rot / lambda;
            if ratio <= 1.0 + 1e-12 {
                2.0 * ratio.min(1.0).asin()
            } else {
                0.0
            }
        })
        .collect()
}

/// Builds the solver as both an exact unitary matrix and a gate-level
/// circuit over one-qubit unitaries and CNOTs.
///
/// The two constructions are independent — block products of embedded
/// operators versus expanded controlled gates — and must agree to `1e-8`
/// in Frobenius norm; a disagreement panics, since it indicates a
/// construction bug.
pub fn build_hhl(problem: &HhlProblem) -> Result<(ComplexMatrix, Circuit), HhlError> {
    encoded_eigenvalues(problem)?;
    let m = problem.m;
    let n = m + 2;
    let dim = 1usize << n;
    let reg: Vec<usize> = (1..=m).collect();
    let work = m + 1;

    let eig = nalgebra::SymmetricEigen::new(problem.a.clone());
    let ua_power = |p: usize| -> ComplexMatrix {
        let mut d = ComplexMatrix::zeros(2, 2);
        for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
            d[(j, j)] = C64::from_polar(1.0, lambda * problem.t * p as f64);
        }
        &eig.eigenvectors * d * eig.eigenvectors.adjoint()
    };
    let thetas = rotation_angles(problem);

    // Matrix path: embedded block products.
    let mut hadamards = ComplexMatrix::identity(dim, dim);
    for &q in &reg {
        hadamards = embed_one(n, q, &hadamard()) * hadamards;
    }
    let mut powers = ComplexMatrix::identity(dim, dim);
    for (idx, &reg_q) in reg.iter().enumerate() {
        let power = 1usize << (m - 1 - idx);
        powers = controlled_on(n, reg_q, work, &ua_power(power)) * powers;
    }
    let fourier = crate::channels::qft_matrix(m);
    let inv_fourier_full = crate::matcore::kron(
        &crate::matcore::kron(&ComplexMatrix::identity(2, 2), &fourier.adjoint()),
        &ComplexMatrix::identity(2, 2),
    );
    let qpe = inv_fourier_full * powers * hadamards;
    let mut rotation = ComplexMatrix::identity(dim, dim);
    for idx in 0..m {
        if thetas[idx] != 0.0 {
            rotation = controlled_on(n, reg[idx], 0, &ry(thetas[idx])) * rotation;
        }
    }
    let u = qpe.adjoint() * rotation * qpe;

    // Circuit path: the same blocks as expanded gates.
    let mut qpe_block: Vec<Gate> = Vec::new();
    for &q in &reg {
        qpe_block.push(Gate::OneQubit {
            qubit: q,
            matrix: hadamard(),
            label: "H".to_string(),
        });
    }
    for (idx, &reg_q) in reg.iter().enumerate() {
        let power = 1usize << (m - 1 - idx);
        qpe_block.extend(cu_gates(
            reg_q,
            work,
            &ua_power(power),
            &format!("cexpA^{power}"),
        ));
    }
    qpe_block.extend(dagger_gates(&qft_gates(&reg)));

    let mut gates = qpe_block.clone();
    for idx in 0..m {
        if thetas[idx] != 0.0 {
            gates.extend(cu_gates(reg[idx], 0, &ry(thetas[idx]), &format!("cRy[{idx}]")));
        }
    }
    gates.extend(dagger_gates(&qpe_block));

    let mut circuit = Circuit::new(n);
    for gate in gates {
        circuit.push_gate(gate);
    }

    let mut u_circuit = ComplexMatrix::identity(dim, dim);
    for gate in circuit.gates() {
        let g = match gate {
            Gate::OneQubit { qubit, matrix, .. } => embed_one(n, *qubit, matrix),
            Gate::Cnot { control, target } => controlled_on(n, *control, *target, &pauli_x()),
        };
        u_circuit = g * u_circuit;
    }
    let agreement = (&u - &u_circuit).norm();
    assert!(
        agreement < CIRCUIT_MATRIX_TOL,
        "matrix and circuit constructions disagree (deviation {agreement:.3e})"
    );
    Ok((u, circuit))
}

/// Classical reference solution `x = a⁻¹ b` (for the normalized `b`).
pub fn solve_reference(problem: &HhlProblem) -> Result<ComplexVector, HhlError> {
    let a = &problem.a;
    assert_eq!(a.nrows(), 2, "system matrix must be 2x2");
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let scale = crate::matcore::max_modulus(a).max(1.0);
    if det.norm() <= 1e-12 * scale * scale {
        return Err(HhlError::Singular);
    }
    let inv_det = cr(1.0) / det;
    let mut x = ComplexVector::zeros(2);
    x[0] = (a[(1, 1)] * problem.b[0] - a[(0, 1)] * problem.b[1]) * inv_det;
    x[1] = (a[(0, 0)] * problem.b[1] - a[(1, 0)] * problem.b[0]) * inv_det;
    Ok(x)
}

/// Runs the full comparison study.
///
/// Builds the circuit, reduces it under the success-branch selection
/// (ancilla flipped to `|1⟩`, register returned to zeros), decomposes the
/// one-qubit effective channel, and for each noise setting simulates both
/// the full noisy circuit (post-selected and normalized) and the decomposed
/// signed average, reporting fidelities against the classical solution.
///
/// `n_samples = 0` selects exhaustive signed averaging (the
/// infinite-sample limit); a positive count draws that many Monte-Carlo
/// samples per row, row `i` seeding its stream with `seed + i`.
pub fn run_study(
    problem: &HhlProblem,
    noise_settings: &[NoiseModel],
    n_samples: usize,
    seed: u64,
) -> Result<HhlReport, HhlError> {
    let (u, circuit) = build_hhl(problem)?;
    let m = problem.m;
    let n = m + 2;
    let dim = 1usize << n;
    let sel = flipped_lead_selection(n, m)?;
    let (d, wrap) = decompose_selected(&u, &sel)?;
    let coefficients: Vec<(f64, String)> = d
        .terms
        .iter()
        .map(|(c, indices)| {
            let label = indices
                .iter()
                .map(|&i| BASIS_LABELS[(i - 1) as usize])
                .collect::<Vec<_>>()
                .join("⊗");
            (*c, label)
        })
        .collect();

    let x = solve_reference(problem)?;
    let x_hat = &x / cr(x.norm());
    let mut reference_ket = ComplexVector::zeros(dim);
    reference_ket[dim / 2] = x_hat[0];
    reference_ket[dim / 2 + 1] = x_hat[1];
    let reference = DensityMatrix::from_ket(&reference_ket);
    let mut input_ket = ComplexVector::zeros(dim);
    input_ket[0] = problem.b[0];
    input_ket[1] = problem.b[1];
    let rho0 = DensityMatrix::from_ket(&input_ket);

    let rows: Vec<Result<FidelityRow, HhlError>> =
        exec::ordered_map(noise_settings.len(), |i| {
            let noise = noise_settings[i];
            let rho_out = simkit::run(&circuit, &rho0, &noise)?;
            let (kept, selection_prob) = postselect(&rho_out, &sel.p_out);
            let fidelity_without = fidelity(&kept.normalize(), &reference)?;
            let avg = if n_samples == 0 {
                simkit::exact_state(&d, &wrap, &rho0, &noise)?
            } else {
                simkit::mc_state(&d, &wrap, &rho0, n_samples, seed.wrapping_add(i as u64), &noise)?
            };
            let (projected, clipped_negativity) = project_to_psd(&avg);
            let fidelity_with = fidelity(&projected, &reference)?;
            Ok(FidelityRow {
                noise,
                selection_prob,
                fidelity_without,
                fidelity_with,
                clipped_negativity,
            })
        });
    let mut fidelity_table = Vec::with_capacity(rows.len());
    for row in rows {
        fidelity_table.push(row?);
    }
    Ok(HhlReport {
        gamma: d.gamma,
        coefficients,
        fidelity_table,
        depth: circuit.depth(),
        cnot_count: circuit.cnot_count(),
        seed,
    })
}
