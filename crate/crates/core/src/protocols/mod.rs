//! The conditional sign-flip constructions.
//!
//! * [`run_destructive_csign`]: a Hadamard beam splitter on the control
//!   followed by a teleportation-style Bell projection mixing control and
//!   target. The control photon is consumed.
//! * [`run_quantum_encoder`]: copies the basis states of a qubit onto an
//!   entangled register of `n` qubits.
//! * [`run_nondestructive_csign`]: encoder on the control, then the
//!   destructive gate on one of the copies.
//! * [`teleport_gate_table`] and [`verify_a_matrix`]: qubit-level
//!   derivation of teleportation as a controlled gate.
//!
//! All three photonic constructions share one heralding step: two modes
//! `(first, second)` are mixed on a Hadamard beam splitter fed in the order
//! `[second, first]`. A single photon in the antisymmetric state
//! `(|1_first 0_second⟩ − |0_first 1_second⟩)/√2` then leaves through the
//! port of `first` with amplitude `+1`, and the symmetric state through the
//! port of `second`. The detector on `first`'s port is called D1 and the one
//! on `second`'s port D2. States with zero or two photons on the pair give
//! zero- or two-photon events.

mod destructive;
mod encoder;
mod nondestructive;
mod teleport;

use std::collections::BTreeMap;
use std::fmt;

use crate::dual_rail::{decode_register, DualRailQubit, Pauli};
use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState};
use crate::measurement::{outcome_distribution, AppliedCorrection, BranchResult, DetectionPattern};
use crate::optics::{apply_mode_unitary, hadamard_bs};

pub use destructive::{prepare_destructive, run_destructive_csign, DESTRUCTIVE_LABELS};
pub use encoder::{encoder_labels, run_quantum_encoder, MAX_ENCODER_COPIES};
pub use nondestructive::{run_nondestructive_csign, NONDESTRUCTIVE_LABELS};
pub use teleport::{
    teleport_gate_table, verify_a_matrix, AEntry, AMatrixReport, AStatus, BellAmplitudes, TeleportRow, TeleportTerm,
    PRINTED_A_MATRIX, TELEPORT_ORDER,
};

/// Which detector patterns a heralded stage accepts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AcceptPolicy {
    /// Only one photon on D1 and none on D2.
    Strict,
    /// Also one photon on D2 and none on D1, followed by a Z correction.
    FeedForward,
}

impl AcceptPolicy {
    pub fn name(self) -> &'static str {
        match self {
            AcceptPolicy::Strict => "strict",
            AcceptPolicy::FeedForward => "feedforward",
        }
    }
}

impl fmt::Display for AcceptPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AcceptPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(AcceptPolicy::Strict),
            "feedforward" | "feed-forward" => Ok(AcceptPolicy::FeedForward),
            other => Err(Error::InvalidArgument(format!("unknown policy `{other}`"))),
        }
    }
}

/// Names of the modes of a protocol layout.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeLabels {
    /// Final name of each mode, indexed by layout position.
    pub modes: Vec<String>,
    /// Detector name per detected mode.
    pub detectors: BTreeMap<usize, String>,
}

impl ModeLabels {
    pub fn mode(&self, index: usize) -> &str {
        &self.modes[index]
    }

    pub fn detector(&self, index: usize) -> Option<&str> {
        self.detectors.get(&index).map(String::as_str)
    }

    /// `D1=1 D2=0` style rendering of a pattern.
    pub fn describe(&self, pattern: &DetectionPattern) -> String {
        pattern
            .iter()
            .map(|(m, n)| format!("{}={n}", self.detector(m).unwrap_or(self.mode(m))))
            .collect::<Vec<_>>()
            .join(" ")
    }

    pub fn qubit(&self, q: DualRailQubit) -> String {
        format!("({},{})", self.mode(q.rail1()), self.mode(q.rail0()))
    }
}

/// A branch of a gate run.
#[derive(Clone, Debug, PartialEq)]
pub struct GateBranch {
    pub result: BranchResult,
    pub accepted: bool,
}

/// Outcome of one protocol run.
///
/// Patterns, residual modes and corrections all use indices of the
/// protocol's initial mode layout.
#[derive(Clone, Debug, PartialEq)]
pub struct GateRunResult {
    pub branches: Vec<GateBranch>,
    pub accepted_probability: f64,
    /// Qubits carrying the output, in register order.
    pub output_qubits: Vec<DualRailQubit>,
    /// Logical amplitudes decoded from the first accepted branch of
    /// non-zero probability.
    pub output: Option<Vec<Amplitude>>,
    /// Ideal output for these inputs.
    pub reference: Option<Vec<Amplitude>>,
    /// Smallest fidelity with the reference over all accepted branches.
    pub fidelity_vs_reference: Option<f64>,
    pub labels: ModeLabels,
}

impl GateRunResult {
    pub fn accepted(&self) -> impl Iterator<Item = &GateBranch> {
        self.branches.iter().filter(|b| b.accepted)
    }

    /// Total probability over every branch, accepted or not.
    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.result.probability).sum()
    }

    /// Branch with exactly this pattern.
    pub fn branch(&self, pattern: &DetectionPattern) -> Option<&GateBranch> {
        self.branches.iter().find(|b| &b.result.pattern == pattern)
    }

    /// Logical amplitudes of every accepted branch with non-zero probability.
    pub fn accepted_outputs(&self) -> Result<Vec<Vec<Amplitude>>> {
        self.accepted()
            .filter_map(|b| decode_branch(&b.result, &self.output_qubits).transpose())
            .collect()
    }
}

/// `diag(1, 1, 1, −1)` on `|00⟩, |01⟩, |10⟩, |11⟩` (control first).
pub fn csign_reference() -> [[Amplitude; 4]; 4] {
    let mut u = [[Amplitude::default(); 4]; 4];
    for (i, row) in u.iter_mut().enumerate() {
        row[i] = Amplitude::new(if i == 3 { -1.0 } else { 1.0 }, 0.0);
    }
    u
}

/// `|⟨a|b⟩|²` for normalized vectors.
pub fn fidelity(a: &[Amplitude], b: &[Amplitude]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<Amplitude>().norm_sqr()
}

pub(crate) fn normalize(v: Vec<Amplitude>) -> Option<Vec<Amplitude>> {
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    (n > 1e-12).then(|| v.into_iter().map(|a| a / n).collect())
}

fn decode_branch(b: &BranchResult, qubits: &[DualRailQubit]) -> Result<Option<Vec<Amplitude>>> {
    let Some(residual) = &b.residual else {
        return Ok(None);
    };
    let local = |m: usize| {
        b.residual_modes
            .iter()
            .position(|&x| x == m)
            .ok_or(Error::InvalidArgument(format!("output mode {m} was consumed")))
    };
    let placements = qubits
        .iter()
        .map(|q| DualRailQubit::new(local(q.rail1())?, local(q.rail0())?))
        .collect::<Result<Vec<_>>>()?;
    decode_register(residual, &placements).map(Some)
}

/// A state whose modes remember their index in the initial layout.
#[derive(Clone, Debug)]
pub(crate) struct Tracked {
    pub state: FockState,
    pub origin: Vec<usize>,
}

impl Tracked {
    pub fn new(state: FockState) -> Self {
        let origin = (0..state.mode_count()).collect();
        Tracked { state, origin }
    }

    pub fn local(&self, mode: usize) -> usize {
        self.origin
            .iter()
            .position(|&m| m == mode)
            .unwrap_or_else(|| panic!("mode {mode} already consumed"))
    }

    pub fn local_qubit(&self, q: DualRailQubit) -> DualRailQubit {
        DualRailQubit::new(self.local(q.rail1()), self.local(q.rail0())).expect("distinct rails")
    }

    pub fn apply(self, modes: &[usize], u: &crate::optics::ModeUnitary) -> Result<Self> {
        let local: Vec<usize> = modes.iter().map(|&m| self.local(m)).collect();
        Ok(Tracked { state: apply_mode_unitary(&self.state, &local, u)?, origin: self.origin })
    }
}

/// A partial history: detections so far and, if still alive, the state.
#[derive(Clone, Debug)]
pub(crate) struct Partial {
    pub pattern: DetectionPattern,
    pub probability: f64,
    pub state: Option<Tracked>,
    pub corrections: Vec<AppliedCorrection>,
    pub accepted: bool,
}

impl Partial {
    pub fn start(state: FockState) -> Self {
        Partial {
            pattern: DetectionPattern::default(),
            probability: 1.0,
            state: Some(Tracked::new(state)),
            corrections: Vec::new(),
            accepted: true,
        }
    }
}

/// The shared heralding step described in the module docs. `fix` is the
/// qubit that receives the Z correction under feed-forward.
pub(crate) fn bell_stage(
    parent: Partial,
    first: usize,
    second: usize,
    fix: DualRailQubit,
    policy: AcceptPolicy,
) -> Result<Vec<Partial>> {
    let tracked = parent.state.expect("stage applied to a live branch");
    let tracked = tracked.apply(&[second, first], &hadamard_bs())?;
    let d1 = tracked.local(first);
    let d2 = tracked.local(second);
    let outcomes = outcome_distribution(&tracked.state, &[d1, d2])?;

    let mut out = Vec::with_capacity(outcomes.len());
    for b in outcomes {
        let counts = (b.pattern.count(d1).unwrap_or(0), b.pattern.count(d2).unwrap_or(0));
        let pattern = parent.pattern.merged(&b.pattern.relabeled(|m| tracked.origin[m]))?;
        let origin: Vec<usize> = b.residual_modes.iter().map(|&m| tracked.origin[m]).collect();
        let heralded = counts == (1, 0);
        let fed_forward = policy == AcceptPolicy::FeedForward && counts == (0, 1);
        let mut corrections = parent.corrections.clone();
        let mut state = b.residual.map(|s| Tracked { state: s, origin });
        if fed_forward {
            if let Some(t) = state.take() {
                let q = t.local_qubit(fix);
                let corrected = crate::dual_rail::pauli_correction(&t.state, q, Pauli::Z)?;
                state = Some(Tracked { state: corrected, origin: t.origin });
                corrections.push(AppliedCorrection { pauli: Pauli::Z, qubit: fix });
            }
        }
        out.push(Partial {
            pattern,
            probability: parent.probability * b.probability,
            state,
            corrections,
            accepted: heralded || fed_forward,
        });
    }
    Ok(out)
}

/// Runs `stage` on every accepted, live partial and passes the others through.
pub(crate) fn extend<F>(partials: Vec<Partial>, mut stage: F) -> Result<Vec<Partial>>
where
    F: FnMut(Partial) -> Result<Vec<Partial>>,
{
    let mut out = Vec::new();
    for p in partials {
        if p.accepted && p.state.is_some() {
            out.extend(stage(p)?);
        } else {
            out.push(p);
        }
    }
    Ok(out)
}

/// Turns finished partials into a [`GateRunResult`], decoding every
/// accepted branch and comparing it with `reference`.
pub(crate) fn finish(
    partials: Vec<Partial>,
    output_qubits: Vec<DualRailQubit>,
    reference: Option<Vec<Amplitude>>,
    labels: ModeLabels,
) -> Result<GateRunResult> {
    let branches: Vec<GateBranch> = partials
        .into_iter()
        .map(|p| {
            let (residual, residual_modes) = match p.state {
                Some(t) => (Some(t.state), t.origin),
                None => (None, Vec::new()),
            };
            GateBranch {
                result: BranchResult {
                    pattern: p.pattern,
                    probability: p.probability,
                    residual,
                    residual_modes,
                    corrections: p.corrections,
                },
                accepted: p.accepted,
            }
        })
        .collect();
    let accepted_probability = branches.iter().filter(|b| b.accepted).fold(0.0, |acc, b| acc + b.result.probability);

    let mut output = None;
    let mut worst: Option<f64> = None;
    for b in branches.iter().filter(|b| b.accepted) {
        let Some(amps) = decode_branch(&b.result, &output_qubits)? else {
            continue;
        };
        if let Some(r) = &reference {
            let f = fidelity(r, &amps);
            worst = Some(worst.map_or(f, |w| w.min(f)));
        }
        output.get_or_insert(amps);
    }
    Ok(GateRunResult {
        branches,
        accepted_probability,
        output_qubits,
        output,
        fidelity_vs_reference: worst,
        reference,
        labels,
    })
}

pub(crate) fn labels_from(names: &[&str], detectors: &[(usize, &str)]) -> ModeLabels {
    ModeLabels {
        modes: names.iter().map(|s| s.to_string()).collect(),
        detectors: detectors.iter().map(|&(m, s)| (m, s.to_string())).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csign_matrix() {
        let u = csign_reference();
        assert_eq!(u[3][3], Amplitude::new(-1.0, 0.0));
        for r in 0..4 {
            for c in 0..4 {
                // Hermitian, and real diagonal ±1 makes it square to one.
                assert_eq!(u[r][c], u[c][r].conj());
                let sq: Amplitude = (0..4).map(|k| u[r][k] * u[k][c]).sum();
                let id = if r == c { 1.0 } else { 0.0 };
                assert_eq!(sq, Amplitude::new(id, 0.0));
            }
        }
    }

    #[test]
    fn policy_parsing() {
        assert_eq!("strict".parse::<AcceptPolicy>().unwrap(), AcceptPolicy::Strict);
        assert_eq!("feedforward".parse::<AcceptPolicy>().unwrap(), AcceptPolicy::FeedForward);
        assert!("sometimes".parse::<AcceptPolicy>().is_err());
    }
}
