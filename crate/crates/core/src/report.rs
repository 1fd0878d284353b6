//! Serializable run reports.
//!
//! A [`RunReport`] is what the command-line tool prints, either as a table
//! or as JSON following `schema/run_report.v1.json`. Numbers are rounded to
//! twelve decimals when the report is built so both renderings show the same
//! values.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CircuitRun};
use crate::dual_rail::{DualRailQubit, LogicalAmplitudes};
use crate::fock::{format_real, Amplitude};
use crate::measurement::BranchResult;
use crate::protocols::{AcceptPolicy, GateRunResult, ModeLabels};

pub const SCHEMA_VERSION: u32 = 1;

/// The JSON schema of [`RunReport`].
pub const SCHEMA: &str = include_str!("../schema/run_report.v1.json");

/// Rounds to twelve decimals, folding negative zero.
pub fn round12(x: f64) -> f64 {
    let r = (x * 1e12).round() / 1e12;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn pair(a: Amplitude) -> [f64; 2] {
    [round12(a.re), round12(a.im)]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub name: String,
    /// `[a0, a1]` as `[re, im]` pairs.
    pub amplitudes: [[f64; 2]; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectorCount {
    pub detector: String,
    pub count: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrectionRecord {
    pub pauli: String,
    pub rail1: String,
    pub rail0: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchRecord {
    pub pattern: Vec<DetectorCount>,
    pub probability: f64,
    pub accepted: bool,
    /// Names of the modes left after detection.
    pub modes: Vec<String>,
    /// Canonical lines of the residual state, empty when nothing is left.
    pub residual: Vec<String>,
    pub corrections: Vec<CorrectionRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    /// `(rail1, rail0)` mode names per qubit.
    pub qubits: Vec<[String; 2]>,
    /// Logical amplitudes in register order, qubit 0 most significant.
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub command: String,
    pub inputs: Vec<InputRecord>,
    pub policy: Option<String>,
    pub branches: Vec<BranchRecord>,
    pub accepted_probability: f64,
    pub output: Option<OutputRecord>,
    pub reference: Option<Vec<[f64; 2]>>,
    pub fidelity: Option<f64>,
    pub duration_ms: f64,
}

fn branch_record(
    b: &BranchResult,
    accepted: bool,
    mode: &dyn Fn(usize) -> String,
    detector: &dyn Fn(usize) -> String,
) -> BranchRecord {
    BranchRecord {
        pattern: b.pattern.iter().map(|(m, count)| DetectorCount { detector: detector(m), count }).collect(),
        probability: round12(b.probability),
        accepted,
        modes: b.residual_modes.iter().map(|&m| mode(m)).collect(),
        residual: b.residual.as_ref().map(|s| s.canonical_lines()).unwrap_or_default(),
        corrections: b
            .corrections
            .iter()
            .map(|c| CorrectionRecord {
                pauli: c.pauli.label().to_string(),
                rail1: mode(c.qubit.rail1()),
                rail0: mode(c.qubit.rail0()),
            })
            .collect(),
    }
}

fn qubit_names(labels: &ModeLabels, q: DualRailQubit) -> [String; 2] {
    [labels.mode(q.rail1()).to_string(), labels.mode(q.rail0()).to_string()]
}

impl RunReport {
    /// Report of a protocol run.
    pub fn from_gate(
        command: &str,
        inputs: &[(&str, LogicalAmplitudes)],
        policy: AcceptPolicy,
        run: &GateRunResult,
        duration_ms: f64,
    ) -> Self {
        let labels = &run.labels;
        let mode = |m: usize| labels.mode(m).to_string();
        let detector = |m: usize| labels.detector(m).unwrap_or(labels.mode(m)).to_string();
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: inputs
                .iter()
                .map(|(name, q)| InputRecord { name: name.to_string(), amplitudes: [pair(q.a0), pair(q.a1)] })
                .collect(),
            policy: Some(policy.name().to_string()),
            branches: run.branches.iter().map(|b| branch_record(&b.result, b.accepted, &mode, &detector)).collect(),
            accepted_probability: round12(run.accepted_probability),
            output: run.output.as_ref().map(|amps| OutputRecord {
                qubits: run.output_qubits.iter().map(|&q| qubit_names(labels, q)).collect(),
                amplitudes: amps.iter().map(|&a| pair(a)).collect(),
            }),
            reference: run.reference.as_ref().map(|r| r.iter().map(|&a| pair(a)).collect()),
            fidelity: run.fidelity_vs_reference.map(round12),
            duration_ms,
        }
    }

    /// Report of a circuit run. Circuits declare no output register, so
    /// only the residual states are reported.
    pub fn from_circuit(command: &str, circuit: &Circuit, run: &CircuitRun, duration_ms: f64) -> Self {
        let mode = |m: usize| circuit.mode_name(m);
        let detector = |m: usize| {
            circuit
                .detectors()
                .find(|&(d, _)| d == m)
                .map(|(_, n)| n.to_string())
                .unwrap_or_else(|| circuit.mode_name(m))
        };
        RunReport {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            inputs: Vec::new(),
            policy: None,
            branches: run.branches.iter().map(|b| branch_record(&b.result, b.accepted, &mode, &detector)).collect(),
            accepted_probability: round12(run.accepted_probability),
            output: None,
            reference: None,
            fidelity: None,
            duration_ms,
        }
    }

    /// Sum of the (rounded) branch probabilities.
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    /// Human-readable rendering with the same numbers as the JSON form.
    /// Branches of probability zero are summarized in one line.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{}", self.command);
        for input in &self.inputs {
            let [a0, a1] = input.amplitudes;
            let _ = writeln!(s, "  {:<8} ({}) |0> + ({}) |1>", input.name, complex(a0), complex(a1));
        }
        if let Some(p) = &self.policy {
            let _ = writeln!(s, "  policy   {p}");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "  {:<24} {:>16}  {:<8} residual", "pattern", "probability", "accepted");
        let mut zero = 0;
        for b in &self.branches {
            if b.probability == 0.0 && b.residual.is_empty() {
                zero += 1;
                continue;
            }
            let pattern: Vec<String> = b.pattern.iter().map(|d| format!("{}={}", d.detector, d.count)).collect();
            let mut residual = b.residual.clone();
            if !b.modes.is_empty() {
                residual.insert(0, format!("modes {}", b.modes.join(" ")));
            }
            for c in &b.corrections {
                residual.push(format!("{} on ({},{})", c.pauli, c.rail1, c.rail0));
            }
            let accepted = if b.accepted { "yes" } else { "no" };
            let _ = writeln!(
                s,
                "  {:<24} {:>16}  {:<8} {}",
                pattern.join(" "),
                b.probability,
                accepted,
                residual.first().map(String::as_str).unwrap_or("")
            );
            for line in residual.iter().skip(1) {
                let _ = writeln!(s, "  {:<24} {:>16}  {:<8} {line}", "", "", "");
            }
        }
        if zero > 0 {
            let _ = writeln!(s, "  ({zero} patterns with probability 0 not shown)");
        }
        let _ = writeln!(s);
        let _ = writeln!(s, "  accepted probability  {}", self.accepted_probability);
        if let Some(out) = &self.output {
            let names: Vec<String> = out.qubits.iter().map(|[a, b]| format!("({a},{b})")).collect();
            let _ = writeln!(s, "  output on {}", names.join(" "));
            let n = out.qubits.len();
            for (i, a) in out.amplitudes.iter().enumerate() {
                let _ = writeln!(s, "    |{:0n$b}>  {}", i, complex(*a));
            }
        }
        if let Some(f) = self.fidelity {
            let _ = writeln!(s, "  fidelity vs reference  {f}");
        }
        s
    }
}

fn complex([re, im]: [f64; 2]) -> String {
    format!("{},{}", format_real(re), format_real(im))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::run_destructive_csign;

    #[test]
    fn rounding() {
        assert_eq!(round12(0.25000000000000006), 0.25);
        assert_eq!(round12(-1e-17).to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let run =
            run_destructive_csign(LogicalAmplitudes::one(), LogicalAmplitudes::real(0.6, 0.8), AcceptPolicy::Strict).unwrap();
        let r = RunReport::from_gate("csign-destructive", &[], AcceptPolicy::Strict, &run, 0.0);
        let back: RunReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!((r.total_probability() - 1.0).abs() < 1e-9);
        assert!(r.to_table().contains("D1=1 D2=0"));
    }
}
