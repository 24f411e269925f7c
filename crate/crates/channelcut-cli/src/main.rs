//! Command-line front end for the channelcut library: decompose gates into
//! one-qubit operations (optionally under pre/post-selection), print
//! selection overhead grids, and run the bundled linear-solver noise study.
//!
//! Exit codes: `0` on success, `2` for rejected input (with a one-line
//! `error: validation: …` reason on stderr), `3` for numerical solver
//! failures (`error: solver: …`).

mod matio;
mod render;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use channelcut::channels::{cnot_matrix, qft_matrix, toffoli_matrix, ChannelMix};
use channelcut::hhl::{self, HhlError, HhlProblem};
use channelcut::matcore::{ComplexMatrix, ComplexVector};
use channelcut::qpd::{self, QpdError};
use channelcut::selection::{
    self, decompose_selected, flipped_lead_selection, make_selection, zeros_selection, Selection,
    SelectionError,
};
use channelcut::simkit::NoiseModel;

/// Failure category deciding the process exit code.
#[derive(Debug)]
pub(crate) enum CliError {
    /// Rejected input; exits with code 2.
    Validation(String),
    /// Numerical solver failure; exits with code 3.
    Solver(String),
}

impl CliError {
    fn validation(reason: impl Into<String>) -> Self {
        CliError::Validation(reason.into())
    }
}

impl From<SelectionError> for CliError {
    fn from(err: SelectionError) -> Self {
        match err {
            SelectionError::NotUnitary(_)
            | SelectionError::DimensionMismatch(..)
            | SelectionError::OutOfRange { .. } => CliError::Validation(err.to_string()),
            SelectionError::Mat(_) | SelectionError::Qpd(_) => CliError::Solver(err.to_string()),
        }
    }
}

impl From<QpdError> for CliError {
    fn from(err: QpdError) -> Self {
        CliError::Solver(err.to_string())
    }
}

impl From<HhlError> for CliError {
    fn from(err: HhlError) -> Self {
        match err {
            HhlError::Selection(inner) => inner.into(),
            HhlError::Sim(_) => CliError::Solver(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "channelcut",
    version,
    about = "Quasiprobability decomposition of quantum channels into one-qubit \
             operations, with pre/post-selection reductions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a gate's channel into tensor products of one-qubit operations.
    Decompose(DecomposeArgs),
    /// Sweep symmetric zero-state selections and print the overhead grid.
    Table(TableArgs),
    /// Run the linear-solver decomposition study.
    Hhl(HhlArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Built-in gate name (cnot, toffoli, qft3) or a matrix JSON file path.
    #[arg(long)]
    gate: String,
    /// Selection: none, zeros:M_IN,M_OUT, hhl:M, or file:P_IN_PATH,P_OUT_PATH.
    #[arg(long, default_value = "none")]
    select: String,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct TableArgs {
    /// Built-in gate name (cnot, toffoli, qft3) or a matrix JSON file path.
    #[arg(long)]
    gate: String,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Args)]
struct HhlArgs {
    /// Noise setting P_LOCAL,P_CNOT; repeat the flag for several rows
    /// (default: one noiseless row).
    #[arg(long = "noise", value_name = "P_LOCAL,P_CNOT")]
    noise: Vec<String>,
    /// Monte-Carlo samples per row; 0 selects exhaustive signed averaging.
    #[arg(long, default_value_t = 0)]
    samples: usize,
    /// Base random seed for sampled rows.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// System matrix JSON file (2x2 Hermitian) overriding the bundled system.
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Right-hand-side JSON file (2x1 matrix) overriding the bundled vector.
    #[arg(long)]
    rhs: Option<PathBuf>,
    /// Eigenvalue-register bits (default: the bundled problem's 3).
    #[arg(long)]
    register_bits: Option<usize>,
    /// Evolution time (default: the bundled problem's 3π/4).
    #[arg(long)]
    time: Option<f64>,
    /// Rotation constant (default: the bundled problem's 2/3).
    #[arg(long)]
    rotation_constant: Option<f64>,
    /// Output path (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Validation(reason)) => {
            eprintln!("error: validation: {reason}");
            ExitCode::from(2)
        }
        Err(CliError::Solver(reason)) => {
            eprintln!("error: solver: {reason}");
            ExitCode::from(3)
        }
    }
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::Table(args) => cmd_table(args),
        Command::Hhl(args) => cmd_hhl(args),
    }
}

/// Applies the `CHANNELCUT_THREADS` worker-count cap when set.
fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("CHANNELCUT_THREADS") else {
        return Ok(());
    };
    let count: usize = raw.trim().parse().map_err(|_| {
        CliError::validation(format!(
            "CHANNELCUT_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    if count == 0 {
        return Err(CliError::validation("CHANNELCUT_THREADS must be at least 1"));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(count)
        .build_global()
        .map_err(|err| {
            CliError::validation(format!("cannot configure {count} worker threads: {err}"))
        })?;
    #[cfg(not(feature = "parallel"))]
    let _ = count;
    Ok(())
}

/// Resolves a gate argument to its matrix: a builtin name or a file path.
fn load_gate(spec: &str) -> Result<ComplexMatrix, CliError> {
    let matrix = match spec {
        "cnot" => cnot_matrix(),
        "toffoli" => toffoli_matrix(),
        "qft3" => qft_matrix(3),
        path => {
            let m = matio::read_matrix(Path::new(path))?;
            if m.nrows() != m.ncols() {
                return Err(CliError::validation(format!(
                    "gate matrix must be square, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            if m.nrows() < 2 || !m.nrows().is_power_of_two() {
                return Err(CliError::validation(format!(
                    "gate dimension must be a power of two with at least one qubit, got {}",
                    m.nrows()
                )));
            }
            m
        }
    };
    Ok(matrix)
}

fn qubit_count(dim: usize) -> usize {
    dim.trailing_zeros() as usize
}

fn ceil_log2(value: usize) -> usize {
    if value <= 1 {
        0
    } else {
        value.next_power_of_two().trailing_zeros() as usize
    }
}

enum SelectionSpec {
    None,
    Zeros { m_in: usize, m_out: usize },
    FlippedLead { m: usize },
    File { p_in: PathBuf, p_out: PathBuf },
}

fn parse_selection(raw: &str) -> Result<SelectionSpec, CliError> {
    if raw == "none" {
        return Ok(SelectionSpec::None);
    }
    if let Some(rest) = raw.strip_prefix("zeros:") {
        let (a, b) = rest.split_once(',').ok_or_else(|| {
            CliError::validation("zeros selection takes the form zeros:M_IN,M_OUT")
        })?;
        let m_in = parse_count(a, "zeros m_in")?;
        let m_out = parse_count(b, "zeros m_out")?;
        return Ok(SelectionSpec::Zeros { m_in, m_out });
    }
    if let Some(rest) = raw.strip_prefix("hhl:") {
        let m = parse_count(rest, "hhl register size")?;
        return Ok(SelectionSpec::FlippedLead { m });
    }
    if let Some(rest) = raw.strip_prefix("file:") {
        let (p_in, p_out) = rest.split_once(',').ok_or_else(|| {
            CliError::validation("file selection takes the form file:P_IN_PATH,P_OUT_PATH")
        })?;
        return Ok(SelectionSpec::File {
            p_in: PathBuf::from(p_in.trim()),
            p_out: PathBuf::from(p_out.trim()),
        });
    }
    Err(CliError::validation(format!(
        "unrecognized selection {raw:?}; expected none, zeros:M_IN,M_OUT, hhl:M, \
         or file:P_IN_PATH,P_OUT_PATH"
    )))
}

fn parse_count(raw: &str, what: &str) -> Result<usize, CliError> {
    raw.trim()
        .parse()
        .map_err(|_| CliError::validation(format!("{what} must be a nonnegative integer, got {raw:?}")))
}

/// Builds the `Selection` for a parsed `--select` argument and gate dimension.
///
/// `zeros:` requests are decomposed at the symmetric depth
/// `min(m_in, m_out)`: only qubits fixed to `|0⟩` on *both* sides shrink the
/// effective operator, and a decomposition for that weaker selection stays
/// valid when extra one-sided zeros are imposed on top. The `file:` mode
/// exposes the general asymmetric reduction.
fn build_selection(spec: &SelectionSpec, dim: usize) -> Result<Selection, CliError> {
    let n = qubit_count(dim);
    let sel = match spec {
        SelectionSpec::None => unreachable!("the unselected path never builds a Selection"),
        SelectionSpec::Zeros { m_in, m_out } => {
            if *m_in > n || *m_out > n {
                return Err(CliError::validation(format!(
                    "zeros selection of ({m_in}, {m_out}) qubits exceeds the gate's {n}"
                )));
            }
            let s = *m_in.min(m_out);
            zeros_selection(n, s, s)?
        }
        SelectionSpec::FlippedLead { m } => flipped_lead_selection(n, *m)?,
        SelectionSpec::File { p_in, p_out } => {
            let p_in = matio::read_matrix(p_in)?;
            let p_out = matio::read_matrix(p_out)?;
            if p_in.nrows() != dim || p_in.ncols() != dim {
                return Err(CliError::validation(format!(
                    "pre-selection projector is {}x{}, but the gate dimension is {dim}",
                    p_in.nrows(),
                    p_in.ncols()
                )));
            }
            make_selection(&p_in, &p_out)?
        }
    };
    Ok(sel)
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<(), CliError> {
    let u = load_gate(&args.gate)?;
    let n = qubit_count(u.nrows());
    let spec = parse_selection(&args.select)?;
    let report = match &spec {
        SelectionSpec::None => {
            if n > qpd::MAX_QUBITS {
                return Err(CliError::validation(format!(
                    "unselected decomposition supports up to {} qubits, got {n}; \
                     apply a selection to reduce the effective size",
                    qpd::MAX_QUBITS
                )));
            }
            let d = qpd::decompose(&ChannelMix::single(u))?;
            render::DecompositionReport::new(&args.gate, &args.select, u_dim_rank(n), u_dim_rank(n), &d)
        }
        _ => {
            let sel = build_selection(&spec, u.nrows())?;
            let n_tilde = ceil_log2(sel.r_in.max(sel.r_out));
            if n_tilde > qpd::MAX_QUBITS {
                return Err(CliError::validation(format!(
                    "selection leaves an effective size of {n_tilde} qubits, \
                     above the decomposition limit of {}",
                    qpd::MAX_QUBITS
                )));
            }
            let (d, _wrap) = decompose_selected(&u, &sel)?;
            render::DecompositionReport::new(&args.gate, &args.select, sel.r_in, sel.r_out, &d)
        }
    };
    let text = match args.format {
        Format::Json => render::to_json(&report),
        Format::Csv => render::decomposition_csv(&report),
    };
    emit(text, &args.out)
}

fn u_dim_rank(n: usize) -> usize {
    1usize << n
}

fn cmd_table(args: &TableArgs) -> Result<(), CliError> {
    let u = load_gate(&args.gate)?;
    let n = qubit_count(u.nrows());
    if n > qpd::MAX_QUBITS {
        return Err(CliError::validation(format!(
            "the overhead grid decomposes the unselected gate on its diagonal, \
             which supports up to {} qubits, got {n}",
            qpd::MAX_QUBITS
        )));
    }
    let grid = selection::overhead_grid(&u)?;
    let report = render::GridReport::new(&args.gate, &grid);
    let text = match args.format {
        Format::Json => render::to_json(&report),
        Format::Csv => render::grid_csv(&report),
    };
    emit(text, &args.out)
}

fn cmd_hhl(args: &HhlArgs) -> Result<(), CliError> {
    let example = HhlProblem::example();
    let a = match &args.matrix {
        Some(path) => {
            let m = matio::read_matrix(path)?;
            if m.nrows() != 2 || m.ncols() != 2 {
                return Err(CliError::validation(format!(
                    "the system matrix must be 2x2, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            m
        }
        None => example.a.clone(),
    };
    let b = match &args.rhs {
        Some(path) => {
            let m = matio::read_matrix(path)?;
            if m.nrows() != 2 || m.ncols() != 1 {
                return Err(CliError::validation(format!(
                    "the right-hand side must be a 2x1 matrix, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            ComplexVector::from_iterator(2, m.iter().copied())
        }
        None => example.b.clone(),
    };
    let m_bits = args.register_bits.unwrap_or(example.m);
    if !(1..=hhl::MAX_REGISTER_BITS).contains(&m_bits) {
        return Err(CliError::validation(format!(
            "register bits must lie in 1..={}, got {m_bits}",
            hhl::MAX_REGISTER_BITS
        )));
    }
    let t = args.time.unwrap_or(example.t);
    if !t.is_finite() || t <= 0.0 {
        return Err(CliError::validation(format!(
            "evolution time must be positive and finite, got {t}"
        )));
    }
    let c_rot = args.rotation_constant.unwrap_or(example.c_rot);
    if !c_rot.is_finite() || c_rot <= 0.0 {
        return Err(CliError::validation(format!(
            "rotation constant must be positive and finite, got {c_rot}"
        )));
    }
    let problem = HhlProblem::new(a, b, m_bits, t, c_rot)?;
    let mut noise = Vec::with_capacity(args.noise.len().max(1));
    for raw in &args.noise {
        noise.push(parse_noise(raw)?);
    }
    if noise.is_empty() {
        noise.push(NoiseModel::noiseless());
    }
    let study = hhl::run_study(&problem, &noise, args.samples, args.seed)?;
    let report = render::StudyReport::new(&study, args.samples);
    let text = match args.format {
        Format::Json => render::to_json(&report),
        Format::Csv => render::study_csv(&report),
    };
    emit(text, &args.out)
}

fn parse_noise(raw: &str) -> Result<NoiseModel, CliError> {
    let (a, b) = raw
        .split_once(',')
        .ok_or_else(|| CliError::validation("noise takes the form P_LOCAL,P_CNOT"))?;
    let p_local = parse_probability(a, "p_local")?;
    let p_cnot = parse_probability(b, "p_cnot")?;
    Ok(NoiseModel::new(p_local, p_cnot))
}

fn parse_probability(raw: &str, what: &str) -> Result<f64, CliError> {
    let value: f64 = raw
        .trim()
        .parse()
        .map_err(|_| CliError::validation(format!("{what} must be a number, got {raw:?}")))?;
    if !(0.0..=1.0).contains(&value) {
        return Err(CliError::validation(format!(
            "{what} must lie in [0, 1], got {value}"
        )));
    }
    Ok(value)
}

fn emit(text: String, out: &Option<PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|err| {
            CliError::validation(format!("cannot write {}: {err}", path.display()))
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
