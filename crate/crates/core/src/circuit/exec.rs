use crate::dual_rail::{bell_state, encode, DualRailQubit, Pauli};
use crate::error::Result;
use crate::fock::{Amplitude, FockState, Occupation};
use crate::measurement::{outcome_distribution, AppliedCorrection, BranchResult, DetectionPattern};
use crate::optics::ModeUnitary;
use crate::protocols::Tracked;

use super::{Circuit, Element};

/// A branch of a circuit run.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitBranch {
    /// Pattern, residual modes and corrections use the circuit's mode
    /// indices.
    pub result: BranchResult,
    /// Outcome variables in the order they were bound.
    pub outcomes: Vec<(String, u32)>,
    /// False once a `postselect` has discarded the branch.
    pub accepted: bool,
}

impl CircuitBranch {
    pub fn outcome(&self, name: &str) -> Option<u32> {
        self.outcomes.iter().find(|(n, _)| n == name).map(|&(_, c)| c)
    }
}

/// Every branch of a run, over all detector outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct CircuitRun {
    pub branches: Vec<CircuitBranch>,
    pub accepted_probability: f64,
}

impl CircuitRun {
    pub fn accepted(&self) -> impl Iterator<Item = &CircuitBranch> {
        self.branches.iter().filter(|b| b.accepted)
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.result.probability).sum()
    }

    pub fn branch(&self, pattern: &DetectionPattern) -> Option<&CircuitBranch> {
        self.branches.iter().find(|b| &b.result.pattern == pattern)
    }
}

struct Live {
    pattern: DetectionPattern,
    outcomes: Vec<(String, u32)>,
    probability: f64,
    state: Option<Tracked>,
    corrections: Vec<AppliedCorrection>,
    accepted: bool,
}

impl Live {
    fn evolving(&self) -> bool {
        self.accepted && self.state.is_some()
    }
}

// Product of states living on disjoint modes of the same register.
fn merge_disjoint(a: &FockState, b: &FockState) -> Result<FockState> {
    let mut terms = Vec::with_capacity(a.len() * b.len());
    for (ka, xa) in a.terms() {
        for (kb, xb) in b.terms() {
            let counts = ka.counts().iter().zip(kb.counts()).map(|(x, y)| x + y).collect();
            terms.push((Occupation::new(counts), xa * xb));
        }
    }
    FockState::new(a.mode_count(), terms)
}

fn initial_state(circuit: &Circuit) -> Result<FockState> {
    let n = circuit.mode_count();
    let mut state = FockState::vacuum(n);
    for e in &circuit.elements()[1..] {
        let part = match e {
            Element::PrepareKet { terms } => FockState::new(n, terms.iter().cloned())?.normalized()?,
            Element::PrepareDualRail { amplitudes, rail1, rail0 } => {
                encode(amplitudes.normalized()?, DualRailQubit::new(*rail1, *rail0)?, n)?
            }
            Element::PrepareBell { kind, modes } => bell_state(
                *kind,
                DualRailQubit::new(modes[0], modes[1])?,
                DualRailQubit::new(modes[2], modes[3])?,
                n,
            )?,
            _ => continue,
        };
        state = merge_disjoint(&state, &part)?;
    }
    Ok(state)
}

fn detect(branches: Vec<Live>, group: &[(usize, &str)]) -> Result<Vec<Live>> {
    let mut out = Vec::new();
    for parent in branches {
        if !parent.evolving() {
            out.push(parent);
            continue;
        }
        let tracked = parent.state.expect("evolving branch has a state");
        let local: Vec<usize> = group.iter().map(|&(m, _)| tracked.local(m)).collect();
        for b in outcome_distribution(&tracked.state, &local)? {
            let mut outcomes = parent.outcomes.clone();
            for (&(_, name), &l) in group.iter().zip(&local) {
                outcomes.push((name.to_string(), b.pattern.count(l).expect("measured mode")));
            }
            let origin = b.residual_modes.iter().map(|&m| tracked.origin[m]).collect();
            out.push(Live {
                pattern: parent.pattern.merged(&b.pattern.relabeled(|m| tracked.origin[m]))?,
                outcomes,
                probability: parent.probability * b.probability,
                state: b.residual.map(|state| Tracked { state, origin }),
                corrections: parent.corrections.clone(),
                accepted: true,
            });
        }
    }
    Ok(out)
}

/// Runs a circuit, keeping every branch.
///
/// Branch probabilities are products of the outcome probabilities along the
/// branch, so they sum to one over all branches.
pub fn execute(circuit: &Circuit) -> Result<CircuitRun> {
    let mut branches = vec![Live {
        pattern: DetectionPattern::default(),
        outcomes: Vec::new(),
        probability: 1.0,
        state: Some(Tracked::new(initial_state(circuit)?)),
        corrections: Vec::new(),
        accepted: true,
    }];

    let elements = circuit.elements();
    let mut i = 1;
    while i < elements.len() {
        match &elements[i] {
            Element::ApplyBs { modes, matrix } => {
                let u = matrix.unitary()?;
                for b in branches.iter_mut().filter(|b| b.evolving()) {
                    let t = b.state.take().expect("evolving branch has a state");
                    b.state = Some(t.apply(modes, &u)?);
                }
            }
            Element::Detect { .. } => {
                let mut group = Vec::new();
                while let Some(Element::Detect { mode, name }) = elements.get(i) {
                    group.push((*mode, name.as_str()));
                    i += 1;
                }
                branches = detect(branches, &group)?;
                continue;
            }
            Element::PostSelect(condition) => {
                for b in branches.iter_mut().filter(|b| b.accepted) {
                    let outcomes = &b.outcomes;
                    b.accepted = condition.holds(|name| outcomes.iter().find(|(n, _)| n == name).map(|&(_, c)| c));
                }
            }
            Element::CorrectZ { rail1, rail0, condition } => {
                let qubit = DualRailQubit::new(*rail1, *rail0)?;
                // Z on a dual-rail pair is a π phase shift on rail 1, which
                // also makes sense outside the single-photon subspace.
                let phase_flip = ModeUnitary::new(1, vec![Amplitude::new(-1.0, 0.0)])?;
                for b in branches.iter_mut().filter(|b| b.evolving()) {
                    let outcomes = &b.outcomes;
                    if !condition.holds(|name| outcomes.iter().find(|(n, _)| n == name).map(|&(_, c)| c)) {
                        continue;
                    }
                    let t = b.state.take().expect("evolving branch has a state");
                    b.state = Some(t.apply(&[*rail1], &phase_flip)?);
                    b.corrections.push(AppliedCorrection { pauli: Pauli::Z, qubit });
                }
            }
            Element::Modes { .. } | Element::PrepareKet { .. } | Element::PrepareDualRail { .. } | Element::PrepareBell { .. } => {}
        }
        i += 1;
    }

    let branches: Vec<CircuitBranch> = branches
        .into_iter()
        .map(|b| {
            let (residual, residual_modes) = match b.state {
                Some(t) => (Some(t.state), t.origin),
                None => (None, Vec::new()),
            };
            CircuitBranch {
                result: BranchResult {
                    pattern: b.pattern,
                    probability: b.probability,
                    residual,
                    residual_modes,
                    corrections: b.corrections,
                },
                outcomes: b.outcomes,
                accepted: b.accepted,
            }
        })
        .collect();
    let accepted_probability = branches.iter().filter(|b| b.accepted).fold(0.0, |acc, b| acc + b.result.probability);
    Ok(CircuitRun { branches, accepted_probability })
}
