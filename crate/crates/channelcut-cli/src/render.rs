//! Report structures and their JSON/CSV rendering.
//!
//! Coefficient-class values are rounded to 12 significant digits and
//! overheads to 6 before serialization, so JSON and CSV renderings of the
//! same run carry identical values (both formats print the rounded number
//! in shortest round-trip form).

use std::fmt::Write as _;

use serde::Serialize;

use channelcut::channels::BASIS_LABELS;
use channelcut::hhl::HhlReport;
use channelcut::qpd::QuasiDecomposition;

/// Rounds to `digits` significant digits via decimal formatting.
fn round_sig(value: f64, digits: usize) -> f64 {
    if value == 0.0 || !value.is_finite() {
        return value;
    }
    let precision = digits - 1;
    format!("{value:.precision$e}")
        .parse()
        .expect("a formatted float reparses")
}

pub(crate) fn sig12(value: f64) -> f64 {
    round_sig(value, 12)
}

pub(crate) fn sig6(value: f64) -> f64 {
    round_sig(value, 6)
}

/// One decomposition term: per-qubit basis labels, their joined form, the
/// coefficient, and its magnitude.
#[derive(Serialize)]
pub(crate) struct TermRow {
    pub labels: Vec<&'static str>,
    pub label: String,
    pub coefficient: f64,
    pub magnitude: f64,
}

/// Full output of the `decompose` command.
#[derive(Serialize)]
pub(crate) struct DecompositionReport {
    pub gate: String,
    pub selection: String,
    pub n_qubits: usize,
    pub rank_in: usize,
    pub rank_out: usize,
    pub gamma: f64,
    pub residual: f64,
    pub rescale: f64,
    pub term_count: usize,
    pub terms: Vec<TermRow>,
}

impl DecompositionReport {
    pub(crate) fn new(
        gate: &str,
        selection: &str,
        rank_in: usize,
        rank_out: usize,
        d: &QuasiDecomposition,
    ) -> Self {
        let terms: Vec<TermRow> = d
            .terms
            .iter()
            .map(|(c, indices)| {
                let labels: Vec<&'static str> = indices
                    .iter()
                    .map(|&i| BASIS_LABELS[(i - 1) as usize])
                    .collect();
                TermRow {
                    label: labels.join("⊗"),
                    labels,
                    coefficient: sig12(*c),
                    magnitude: sig12(c.abs()),
                }
            })
            .collect();
        Self {
            gate: gate.to_string(),
            selection: selection.to_string(),
            n_qubits: d.n_qubits,
            rank_in,
            rank_out,
            gamma: sig6(d.gamma),
            residual: sig12(d.residual),
            rescale: sig12(d.rescale),
            term_count: terms.len(),
            terms,
        }
    }
}

/// Output of the `table` command: the overhead grid indexed by
/// `(m_in, m_out)`.
#[derive(Serialize)]
pub(crate) struct GridReport {
    pub gate: String,
    pub grid: Vec<Vec<f64>>,
}

impl GridReport {
    pub(crate) fn new(gate: &str, grid: &[Vec<f64>]) -> Self {
        Self {
            gate: gate.to_string(),
            grid: grid
                .iter()
                .map(|row| row.iter().map(|&g| sig6(g)).collect())
                .collect(),
        }
    }
}

/// One labeled coefficient of the solver decomposition.
#[derive(Serialize)]
pub(crate) struct CoefficientRow {
    pub label: String,
    pub coefficient: f64,
    pub magnitude: f64,
}

/// One noise row of the study.
#[derive(Serialize)]
pub(crate) struct StudyRow {
    pub p_local: f64,
    pub p_cnot: f64,
    pub selection_prob: f64,
    pub fidelity_without: f64,
    pub fidelity_with: f64,
    pub clipped_negativity: f64,
}

/// Full output of the `hhl` command.
#[derive(Serialize)]
pub(crate) struct StudyReport {
    pub gamma: f64,
    pub depth: usize,
    pub cnot_count: usize,
    pub samples: usize,
    pub seed: u64,
    pub coefficients: Vec<CoefficientRow>,
    pub fidelity_table: Vec<StudyRow>,
}

impl StudyReport {
    pub(crate) fn new(report: &HhlReport, samples: usize) -> Self {
        Self {
            gamma: sig6(report.gamma),
            depth: report.depth,
            cnot_count: report.cnot_count,
            samples,
            seed: report.seed,
            coefficients: report
                .coefficients
                .iter()
                .map(|(c, label)| CoefficientRow {
                    label: label.clone(),
                    coefficient: sig12(*c),
                    magnitude: sig12(c.abs()),
                })
                .collect(),
            fidelity_table: report
                .fidelity_table
                .iter()
                .map(|row| StudyRow {
                    p_local: row.noise.p_local,
                    p_cnot: row.noise.p_cnot,
                    selection_prob: sig12(row.selection_prob),
                    fidelity_without: sig12(row.fidelity_without),
                    fidelity_with: sig12(row.fidelity_with),
                    clipped_negativity: sig12(row.clipped_negativity),
                })
                .collect(),
        }
    }
}

pub(crate) fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("reports serialize");
    text.push('\n');
    text
}

/// Formats a float for CSV: plain decimal in the human-scale range,
/// exponent notation for extreme magnitudes. Both spellings parse back to
/// the identical value.
fn csv_num(value: f64) -> String {
    let magnitude = value.abs();
    if value == 0.0 || (1e-4..1e15).contains(&magnitude) {
        format!("{value}")
    } else {
        format!("{value:e}")
    }
}

pub(crate) fn decomposition_csv(report: &DecompositionReport) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "gate,{}", report.gate);
    let _ = writeln!(out, "selection,{}", report.selection);
    let _ = writeln!(out, "n_qubits,{}", report.n_qubits);
    let _ = writeln!(out, "rank_in,{}", report.rank_in);
    let _ = writeln!(out, "rank_out,{}", report.rank_out);
    let _ = writeln!(out, "gamma,{}", csv_num(report.gamma));
    let _ = writeln!(out, "residual,{}", csv_num(report.residual));
    let _ = writeln!(out, "rescale,{}", csv_num(report.rescale));
    let _ = writeln!(out, "term_count,{}", report.term_count);
    out.push('\n');
    out.push_str("label,coefficient,magnitude\n");
    for term in &report.terms {
        let _ = writeln!(
            out,
            "{},{},{}",
            term.label,
            csv_num(term.coefficient),
            csv_num(term.magnitude)
        );
    }
    out
}

pub(crate) fn grid_csv(report: &GridReport) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "gate,{}", report.gate);
    out.push('\n');
    out.push_str("m_in,m_out,gamma\n");
    for (m_in, row) in report.grid.iter().enumerate() {
        for (m_out, &gamma) in row.iter().enumerate() {
            let _ = writeln!(out, "{m_in},{m_out},{}", csv_num(gamma));
        }
    }
    out
}

pub(crate) fn study_csv(report: &StudyReport) -> String {
    let mut out = String::from("key,value\n");
    let _ = writeln!(out, "gamma,{}", csv_num(report.gamma));
    let _ = writeln!(out, "depth,{}", report.depth);
    let _ = writeln!(out, "cnot_count,{}", report.cnot_count);
    let _ = writeln!(out, "samples,{}", report.samples);
    let _ = writeln!(out, "seed,{}", report.seed);
    out.push('\n');
    out.push_str("label,coefficient,magnitude\n");
    for row in &report.coefficients {
        let _ = writeln!(
            out,
            "{},{},{}",
            row.label,
            csv_num(row.coefficient),
            csv_num(row.magnitude)
        );
    }
    out.push('\n');
    out.push_str(
        "p_local,p_cnot,selection_prob,fidelity_without,fidelity_with,clipped_negativity\n",
    );
    for row in &report.fidelity_table {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            csv_num(row.p_local),
            csv_num(row.p_cnot),
            csv_num(row.selection_prob),
            csv_num(row.fidelity_without),
            csv_num(row.fidelity_with),
            csv_num(row.clipped_negativity)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_rounding_truncates_precision() {
        assert_eq!(sig12(0.25), 0.25);
        assert_eq!(sig12(1.0 / 3.0), 0.333333333333);
        assert_eq!(sig6(1.0 / 3.0), 0.333333);
        assert_eq!(sig6(9.000000000001), 9.0);
        assert_eq!(sig6(261.4294745), 261.429);
        assert_eq!(sig12(0.0), 0.0);
        assert_eq!(sig12(-1.0 / 3.0), -0.333333333333);
    }

    #[test]
    fn csv_number_formatting_switches_to_exponent_form() {
        assert_eq!(csv_num(0.875), "0.875");
        assert_eq!(csv_num(0.0), "0");
        assert_eq!(csv_num(5.90091631821e-16), "5.90091631821e-16");
        assert_eq!(csv_num(-0.125), "-0.125");
        assert_eq!(csv_num(37.0), "37");
    }

    #[test]
    fn csv_sections_carry_the_report_values() {
        let d = QuasiDecomposition {
            n_qubits: 1,
            terms: vec![(0.75, vec![11]), (-0.125, vec![2])],
            gamma: 0.875,
            residual: 1e-16,
            rescale: 1.0,
        };
        let report = DecompositionReport::new("demo", "none", 2, 2, &d);
        let csv = decomposition_csv(&report);
        assert!(csv.contains("gamma,0.875\n"));
        assert!(csv.contains("piX,0.75,0.75\n"));
        assert!(csv.contains("X,-0.125,0.125\n"));
        assert!(csv.starts_with("key,value\n"));
    }

    #[test]
    fn json_parses_back_to_the_same_values() {
        let report = GridReport::new("demo", &[vec![37.0, 1.0], vec![1.0, 1.0]]);
        let json = to_json(&report);
        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["grid"][0][0].as_f64().unwrap(), 37.0);
        assert_eq!(value["gate"].as_str().unwrap(), "demo");
    }
}
