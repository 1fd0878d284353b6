//! A line-oriented language for linear-optical circuits.
//!
//! A program is a list of statements, one per line, with `#` starting a
//! comment:
//!
//! ```text
//! modes <n> [labels <name> ...]
//! ket |n1,n2,...> [amp <re> <im>]...
//! dualrail <a0_re> <a0_im> <a1_re> <a1_im> on <rail1> <rail0>
//! bell phi+|phi-|psi+|psi- on <m1> <m2> <m3> <m4>
//! bs <m1> <m2> [matrix h | matrix <8 reals>]
//! detect <mode> as <name>
//! postselect <condition>
//! correct z on <rail1> <rail0> if <condition>
//! ```
//!
//! `modes` comes first. When labels are declared, modes are referred to by
//! label only; otherwise by their 1-based position.
//!
//! Preparations (`ket`, `dualrail`, `bell`) come before everything else
//! and claim disjoint modes; unclaimed modes start empty. A `ket` line lists
//! the occupation of every mode, so kets cannot be mixed with the other
//! preparations. Consecutive `ket` lines form one superposition; the `amp`
//! terms of a line are summed and default to `1`. Prepared amplitudes must
//! be normalized within `1e-6` and are renormalized before the run.
//!
//! `bs` applies a two-mode unitary to the modes in the order written. The
//! explicit form lists the matrix row-major as `re im` pairs; `h` is
//! [`hadamard_bs`](crate::optics::hadamard_bs).
//!
//! Consecutive `detect` lines form one joint photon-counting measurement.
//! Detected modes are gone afterwards. A condition is a disjunction of
//! conjunctions of `<name> == <count>` tests:
//!
//! ```text
//! postselect D1 == 1 && D2 == 0 || D1 == 0 && D2 == 1
//! ```
//!
//! Branches failing a `postselect` are kept in the result but stop
//! evolving. `correct` applies a Z to a dual-rail pair in every surviving
//! branch whose outcomes satisfy the condition, as a sign flip of every
//! term with an odd photon number on `rail1`. Only `z` corrections exist;
//! `x` and `y` are reserved.
//!
//! [`Circuit`]'s `Display` impl is the canonical formatter; it drops
//! comments and blank lines, writes numbers in shortest round-trip form and
//! parses back to an equal circuit.

mod exec;
mod generate;
mod parse;

use std::fmt;

use crate::dual_rail::{BellKind, LogicalAmplitudes};
use crate::fock::{Amplitude, Occupation};
use crate::optics::ModeUnitary;

pub use exec::{execute, CircuitBranch, CircuitRun};
pub use generate::{random_circuit, random_unitary2};
pub use parse::parse;

/// Tolerance on the norm of prepared amplitudes.
pub const PREPARATION_TOL: f64 = 1e-6;

/// Whether an error comes from the grammar or from the meaning of a
/// well-formed statement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Syntax,
    Semantic,
}

/// A problem with a program, located in its source.
///
/// `line` and `column` are 1-based; `column` counts characters.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub kind: ErrorKind,
    pub line: usize,
    pub column: usize,
    pub message: String,
    /// The offending token, empty at end of line.
    pub token: String,
}

/// One `name == count` test.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Comparison {
    pub name: String,
    pub count: u32,
}

/// A disjunction of conjunctions of [`Comparison`]s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Condition {
    pub clauses: Vec<Vec<Comparison>>,
}

impl Condition {
    /// Evaluates against a branch's outcomes; unknown names are false.
    pub fn holds(&self, lookup: impl Fn(&str) -> Option<u32>) -> bool {
        self.clauses
            .iter()
            .any(|clause| clause.iter().all(|c| lookup(&c.name) == Some(c.count)))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.clauses.iter().flatten().map(|c| c.name.as_str())
    }
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" || ")?;
            }
            for (j, c) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(" && ")?;
                }
                write!(f, "{} == {}", c.name, c.count)?;
            }
        }
        Ok(())
    }
}

/// The two-mode unitary of a `bs` statement.
#[derive(Clone, Debug, PartialEq)]
pub enum BsMatrix {
    Hadamard,
    /// Row-major entries.
    Explicit([Amplitude; 4]),
}

impl BsMatrix {
    pub fn unitary(&self) -> crate::Result<ModeUnitary> {
        match self {
            BsMatrix::Hadamard => Ok(crate::optics::hadamard_bs()),
            BsMatrix::Explicit(e) => ModeUnitary::new(2, e.to_vec()),
        }
    }
}

/// One statement. Modes are 0-based indices.
#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Modes { count: usize, labels: Option<Vec<String>> },
    /// A superposition over full occupation vectors; amplitudes are kept as
    /// written.
    PrepareKet { terms: Vec<(Occupation, Amplitude)> },
    PrepareDualRail { amplitudes: LogicalAmplitudes, rail1: usize, rail0: usize },
    /// The Bell state on pairs `(m[0], m[1])` and `(m[2], m[3])`, each
    /// given as `(rail1, rail0)`.
    PrepareBell { kind: BellKind, modes: [usize; 4] },
    ApplyBs { modes: [usize; 2], matrix: BsMatrix },
    Detect { mode: usize, name: String },
    PostSelect(Condition),
    CorrectZ { rail1: usize, rail0: usize, condition: Condition },
}

/// A validated program.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    elements: Vec<Element>,
}

impl Circuit {
    /// Validates a list of statements, as [`parse`] does. Errors point at
    /// the line the statement would occupy in the formatted program.
    pub fn new(elements: Vec<Element>) -> Result<Self, ParseError> {
        let spans: Vec<_> = (1..=elements.len()).map(|line| parse::Span { line, column: 1, token: String::new() }).collect();
        parse::validate(&elements, &spans)?;
        Ok(Circuit { elements })
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn mode_count(&self) -> usize {
        match &self.elements[0] {
            Element::Modes { count, .. } => *count,
            _ => unreachable!("validated circuits start with `modes`"),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        match &self.elements[0] {
            Element::Modes { labels, .. } => labels.as_deref(),
            _ => unreachable!("validated circuits start with `modes`"),
        }
    }

    /// Name of a mode as written in source.
    pub fn mode_name(&self, mode: usize) -> String {
        match self.labels() {
            Some(l) => l[mode].clone(),
            None => (mode + 1).to_string(),
        }
    }

    /// Names bound by `detect`, in program order, with their modes.
    pub fn detectors(&self) -> impl Iterator<Item = (usize, &str)> {
        self.elements.iter().filter_map(|e| match e {
            Element::Detect { mode, name } => Some((*mode, name.as_str())),
            _ => None,
        })
    }
}

fn write_amp(f: &mut fmt::Formatter<'_>, a: Amplitude) -> fmt::Result {
    write!(f, "{} {}", a.re, a.im)
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = |i: usize| self.mode_name(i);
        for e in &self.elements {
            match e {
                Element::Modes { count, labels } => {
                    write!(f, "modes {count}")?;
                    if let Some(labels) = labels {
                        write!(f, " labels {}", labels.join(" "))?;
                    }
                    writeln!(f)?;
                }
                Element::PrepareKet { terms } => {
                    for (ket, amp) in terms {
                        write!(f, "ket {ket}")?;
                        if *amp != Amplitude::new(1.0, 0.0) {
                            f.write_str(" amp ")?;
                            write_amp(f, *amp)?;
                        }
                        writeln!(f)?;
                    }
                }
                Element::PrepareDualRail { amplitudes, rail1, rail0 } => {
                    f.write_str("dualrail ")?;
                    write_amp(f, amplitudes.a0)?;
                    f.write_str(" ")?;
                    write_amp(f, amplitudes.a1)?;
                    writeln!(f, " on {} {}", m(*rail1), m(*rail0))?;
                }
                Element::PrepareBell { kind, modes } => {
                    let names: Vec<String> = modes.iter().map(|&i| m(i)).collect();
                    writeln!(f, "bell {} on {}", kind.keyword(), names.join(" "))?;
                }
                Element::ApplyBs { modes, matrix } => {
                    write!(f, "bs {} {}", m(modes[0]), m(modes[1]))?;
                    if let BsMatrix::Explicit(entries) = matrix {
                        f.write_str(" matrix")?;
                        for a in entries {
                            f.write_str(" ")?;
                            write_amp(f, *a)?;
                        }
                    }
                    writeln!(f)?;
                }
                Element::Detect { mode, name } => writeln!(f, "detect {} as {name}", m(*mode))?,
                Element::PostSelect(c) => writeln!(f, "postselect {c}")?,
                Element::CorrectZ { rail1, rail0, condition } => {
                    writeln!(f, "correct z on {} {} if {condition}", m(*rail1), m(*rail0))?
                }
            }
        }
        Ok(())
    }
}

/// Canonical text of a circuit; same as its `Display` output.
pub fn format(circuit: &Circuit) -> String {
    circuit.to_string()
}
