//! Teleportation as a controlled gate, at the qubit level.
//!
//! Qubit 1 carries `|α⟩`; qubits 2 and 3 carry a superposition of the four
//! Bell states with amplitudes `u_i`. Projecting qubits 1 and 2 onto Bell
//! state `b` leaves qubit 3 in `K_b |α⟩` with
//!
//! ```text
//! K_b = Σ_i u_i · (a_{b,i} / 2) · σ_b σ_i
//! ```
//!
//! where the Bell states and Pauli labels pair up as
//! `0 ↔ Ψ+`, `z ↔ Ψ−`, `x ↔ Φ+`, `y ↔ Φ−`. Everything here is derived by
//! brute-force projection; the unit-modulus coefficients `a_{b,i}` are read
//! off afterwards.

use std::fmt;

use crate::dual_rail::{BellKind, LogicalAmplitudes, Pauli};
use crate::fock::Amplitude;

type Mat2 = [[Amplitude; 2]; 2];

/// Label order `0, z, x, y` with the Bell state and Pauli for each.
pub const TELEPORT_ORDER: [(BellKind, Pauli); 4] = [
    (BellKind::PsiPlus, Pauli::I),
    (BellKind::PsiMinus, Pauli::Z),
    (BellKind::PhiPlus, Pauli::X),
    (BellKind::PhiMinus, Pauli::Y),
];

const fn c(re: f64, im: f64) -> Amplitude {
    Amplitude::new(re, im)
}

/// The coefficient table as printed alongside the teleportation identity,
/// rows indexed by outcome and columns by resource, both in `0, z, x, y`
/// order. Kept only to be compared against the derivation.
pub const PRINTED_A_MATRIX: [[Amplitude; 4]; 4] = [
    [c(1.0, 0.0), c(-1.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)],
    [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, -1.0), c(-1.0, 0.0)],
    [c(1.0, 0.0), c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0)],
    [c(0.0, -1.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
];

/// Amplitudes `u0, uz, ux, uy` of `Ψ+, Ψ−, Φ+, Φ−` on qubits 2 and 3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BellAmplitudes {
    pub u0: Amplitude,
    pub uz: Amplitude,
    pub ux: Amplitude,
    pub uy: Amplitude,
}

impl BellAmplitudes {
    pub fn new(u0: Amplitude, uz: Amplitude, ux: Amplitude, uy: Amplitude) -> Self {
        BellAmplitudes { u0, uz, ux, uy }
    }

    /// A single Bell resource.
    pub fn only(kind: BellKind) -> Self {
        let mut u = [Amplitude::default(); 4];
        let i = TELEPORT_ORDER.iter().position(|(k, _)| *k == kind).expect("all kinds listed");
        u[i] = c(1.0, 0.0);
        Self::from_array(u)
    }

    pub fn from_array(u: [Amplitude; 4]) -> Self {
        Self::new(u[0], u[1], u[2], u[3])
    }

    pub fn as_array(&self) -> [Amplitude; 4] {
        [self.u0, self.uz, self.ux, self.uy]
    }

    pub fn is_normalized(&self) -> bool {
        (self.as_array().iter().map(|a| a.norm_sqr()).sum::<f64>() - 1.0).abs() <= 1e-12
    }
}

/// Contribution of one resource Bell state to an outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportTerm {
    pub resource: BellKind,
    /// Unit-modulus coefficient `a_{b,i}`.
    pub a: Amplitude,
    /// `σ_b σ_i`.
    pub pauli_product: Mat2,
    /// Distance between the projected operator and `(a/2)·σ_b σ_i`; zero
    /// when the decomposition is exact.
    pub residual: f64,
}

/// One Bell outcome on qubits 1 and 2.
#[derive(Clone, Debug, PartialEq)]
pub struct TeleportRow {
    pub outcome: BellKind,
    pub terms: Vec<TeleportTerm>,
    /// `K_b = Σ_i u_i K_{b,i}`, obtained by direct projection.
    pub operator: Mat2,
    /// Un-normalized state of qubit 3, `K_b |α⟩`.
    pub output: [Amplitude; 2],
    /// `‖K_b |α⟩‖²`.
    pub probability: f64,
}

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut m = [[Amplitude::default(); 2]; 2];
    for r in 0..2 {
        for col in 0..2 {
            m[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
        }
    }
    m
}

/// Bell vector over `|q_a q_b⟩`, index `2·q_a + q_b`.
fn bell_vector(kind: BellKind) -> [Amplitude; 4] {
    kind.logical_amplitudes()
}

/// `K` with `K[r][col] = ⟨B_outcome|_{12} (|col⟩_1 ⊗ |B_resource⟩_{23})`
/// restricted to `|r⟩_3`.
fn project(outcome: BellKind, resource: BellKind) -> Mat2 {
    let bo = bell_vector(outcome);
    let br = bell_vector(resource);
    let mut k = [[Amplitude::default(); 2]; 2];
    for col in 0..2 {
        // Three-qubit amplitudes of |col>_1 ⊗ |B_resource>_{23}.
        let mut psi = [Amplitude::default(); 8];
        for q2 in 0..2 {
            for q3 in 0..2 {
                psi[4 * col + 2 * q2 + q3] = br[2 * q2 + q3];
            }
        }
        for r in 0..2 {
            let mut acc = Amplitude::default();
            for q1 in 0..2 {
                for q2 in 0..2 {
                    acc += bo[2 * q1 + q2].conj() * psi[4 * q1 + 2 * q2 + r];
                }
            }
            k[r][col] = acc;
        }
    }
    k
}

fn decompose(outcome: (BellKind, Pauli), resource: (BellKind, Pauli)) -> TeleportTerm {
    let k = project(outcome.0, resource.0);
    let m = mat_mul(&outcome.1.matrix(), &resource.1.matrix());
    // tr(M† K) = a since K = (a/2) M and tr(M† M) = 2.
    let mut a = Amplitude::default();
    for r in 0..2 {
        for col in 0..2 {
            a += m[r][col].conj() * k[r][col];
        }
    }
    let mut residual = 0.0;
    for r in 0..2 {
        for col in 0..2 {
            residual += (k[r][col] - a / 2.0 * m[r][col]).norm_sqr();
        }
    }
    TeleportTerm { resource: resource.0, a, pauli_product: m, residual: residual.sqrt() }
}

/// Per-outcome operators induced on qubit 3 for resource amplitudes `u`
/// and input `input`, in `Ψ+, Ψ−, Φ+, Φ−` order.
pub fn teleport_gate_table(u: BellAmplitudes, input: LogicalAmplitudes) -> Vec<TeleportRow> {
    let ua = u.as_array();
    TELEPORT_ORDER
        .iter()
        .map(|&outcome| {
            let terms: Vec<TeleportTerm> = TELEPORT_ORDER.iter().map(|&res| decompose(outcome, res)).collect();
            let mut operator = [[Amplitude::default(); 2]; 2];
            for (i, &(res, _)) in TELEPORT_ORDER.iter().enumerate() {
                let k = project(outcome.0, res);
                for r in 0..2 {
                    for col in 0..2 {
                        operator[r][col] += ua[i] * k[r][col];
                    }
                }
            }
            let alpha = input.as_array();
            let output = [
                operator[0][0] * alpha[0] + operator[0][1] * alpha[1],
                operator[1][0] * alpha[0] + operator[1][1] * alpha[1],
            ];
            let probability = output.iter().map(|a| a.norm_sqr()).sum();
            TeleportRow { outcome: outcome.0, terms, operator, output, probability }
        })
        .collect()
}

/// How a printed coefficient compares with the derived one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AStatus {
    Match,
    /// Equal once the whole row is multiplied by this phase.
    RowPhase(Amplitude),
    Mismatch,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AEntry {
    pub outcome: Pauli,
    pub resource: Pauli,
    pub derived: Amplitude,
    pub printed: Amplitude,
    pub status: AStatus,
}

/// Entry-by-entry comparison of the derived and printed coefficient tables.
#[derive(Clone, Debug, PartialEq)]
pub struct AMatrixReport {
    pub derived: [[Amplitude; 4]; 4],
    pub printed: [[Amplitude; 4]; 4],
    pub entries: Vec<AEntry>,
    /// Largest decomposition residual `‖K − (a/2)σσ‖` seen.
    pub max_residual: f64,
}

impl AMatrixReport {
    pub fn mismatches(&self) -> impl Iterator<Item = &AEntry> {
        self.entries.iter().filter(|e| e.status != AStatus::Match)
    }
}

const CMP_TOL: f64 = 1e-12;

fn row_phase(derived: &[Amplitude; 4], printed: &[Amplitude; 4]) -> Option<Amplitude> {
    let lambda = derived[0] / printed[0];
    derived
        .iter()
        .zip(printed)
        .all(|(d, p)| (d - lambda * p).norm() < CMP_TOL)
        .then_some(lambda)
}

/// Derives `a_{b,i}` from scratch and compares it with [`PRINTED_A_MATRIX`].
pub fn verify_a_matrix() -> AMatrixReport {
    let mut derived = [[Amplitude::default(); 4]; 4];
    let mut max_residual: f64 = 0.0;
    for (b, &outcome) in TELEPORT_ORDER.iter().enumerate() {
        for (i, &resource) in TELEPORT_ORDER.iter().enumerate() {
            let t = decompose(outcome, resource);
            derived[b][i] = t.a;
            max_residual = max_residual.max(t.residual);
        }
    }
    let printed = PRINTED_A_MATRIX;
    let mut entries = Vec::with_capacity(16);
    for b in 0..4 {
        let phase = row_phase(&derived[b], &printed[b]);
        for i in 0..4 {
            let status = if (derived[b][i] - printed[b][i]).norm() < CMP_TOL {
                AStatus::Match
            } else if let Some(l) = phase {
                AStatus::RowPhase(l)
            } else {
                AStatus::Mismatch
            };
            entries.push(AEntry {
                outcome: TELEPORT_ORDER[b].1,
                resource: TELEPORT_ORDER[i].1,
                derived: derived[b][i],
                printed: printed[b][i],
                status,
            });
        }
    }
    AMatrixReport { derived, printed, entries, max_residual }
}

fn fmt_unit(a: Amplitude) -> String {
    let near = |x: f64, y: f64| (x - y).abs() < 1e-9;
    match (a.re, a.im) {
        (re, im) if near(re, 1.0) && near(im, 0.0) => "1".into(),
        (re, im) if near(re, -1.0) && near(im, 0.0) => "-1".into(),
        (re, im) if near(re, 0.0) && near(im, 1.0) => "i".into(),
        (re, im) if near(re, 0.0) && near(im, -1.0) => "-i".into(),
        (re, im) => format!("{re:.3}{im:+.3}i"),
    }
}

fn pauli_index(p: Pauli) -> &'static str {
    match p {
        Pauli::I => "0",
        Pauli::Z => "z",
        Pauli::X => "x",
        Pauli::Y => "y",
    }
}

impl fmt::Display for AMatrixReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "coefficient table a[outcome][resource], order 0 z x y")?;
        writeln!(f, "  derived                printed")?;
        for b in 0..4 {
            let d: Vec<_> = self.derived[b].iter().map(|&a| format!("{:>3}", fmt_unit(a))).collect();
            let p: Vec<_> = self.printed[b].iter().map(|&a| format!("{:>3}", fmt_unit(a))).collect();
            writeln!(f, "  [{}]   [{}]", d.join(" "), p.join(" "))?;
        }
        let n = self.mismatches().count();
        writeln!(f, "{} of 16 entries agree; {n} differ", 16 - n)?;
        for e in self.mismatches() {
            let note = match e.status {
                AStatus::RowPhase(l) => format!(" (row agrees up to phase {})", fmt_unit(l)),
                _ => String::new(),
            };
            writeln!(
                f,
                "  a[{}][{}]: derived {}, printed {}{note}",
                pauli_index(e.outcome),
                pauli_index(e.resource),
                fmt_unit(e.derived),
                fmt_unit(e.printed)
            )?;
        }
        write!(f, "max decomposition residual {:.1e}", self.max_residual)
    }
}
