//! Dual-rail photonic qubits.
//!
//! A qubit is one photon shared by two modes. A photon in `rail1` is logical
//! `|1⟩`, a photon in `rail0` is logical `|0⟩`, so on the mode pair
//! `(rail1, rail0)` the kets read `|0,1⟩ = |0⟩_L` and `|1,0⟩ = |1⟩_L`.
//!
//! Multi-qubit registers index their basis with qubit 0 as the most
//! significant bit: `|q0 q1 … ⟩`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState, Occupation, NORM_TOL};

/// Weight outside the dual-rail subspace above which decoding fails.
pub const LEAKAGE_TOL: f64 = 1e-10;

/// Placement of a qubit on two modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DualRailQubit {
    rail1: usize,
    rail0: usize,
}

impl DualRailQubit {
    pub fn new(rail1: usize, rail0: usize) -> Result<Self> {
        if rail1 == rail0 {
            return Err(Error::DuplicateMode(rail1));
        }
        Ok(DualRailQubit { rail1, rail0 })
    }

    /// Mode holding the photon for logical `|1⟩`.
    pub fn rail1(&self) -> usize {
        self.rail1
    }

    /// Mode holding the photon for logical `|0⟩`.
    pub fn rail0(&self) -> usize {
        self.rail0
    }

    fn check_range(&self, mode_count: usize) -> Result<()> {
        for m in [self.rail1, self.rail0] {
            if m >= mode_count {
                return Err(Error::ModeOutOfRange { mode: m, mode_count });
            }
        }
        Ok(())
    }
}

/// Coefficients `(a0, a1)` of `a0|0⟩ + a1|1⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogicalAmplitudes {
    pub a0: Amplitude,
    pub a1: Amplitude,
}

impl LogicalAmplitudes {
    pub fn new(a0: Amplitude, a1: Amplitude) -> Self {
        LogicalAmplitudes { a0, a1 }
    }

    pub fn real(a0: f64, a1: f64) -> Self {
        Self::new(Amplitude::new(a0, 0.0), Amplitude::new(a1, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(1.0, 0.0)
    }

    pub fn one() -> Self {
        Self::real(0.0, 1.0)
    }

    /// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
    pub fn from_bloch(theta: f64, phi: f64) -> Self {
        Self::new(
            Amplitude::new((theta / 2.0).cos(), 0.0),
            Amplitude::from_polar((theta / 2.0).sin(), phi),
        )
    }

    pub fn norm_squared(&self) -> f64 {
        self.a0.norm_sqr() + self.a1.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= NORM_TOL
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm_squared().sqrt();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::ZeroNorm);
        }
        Ok(Self::new(self.a0 / n, self.a1 / n))
    }

    pub fn as_array(&self) -> [Amplitude; 2] {
        [self.a0, self.a1]
    }
}

/// The four Bell states, with `Ψ± = (|10⟩ ± |01⟩)/√2` and
/// `Φ± = (|00⟩ ± |11⟩)/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PhiPlus, BellKind::PhiMinus, BellKind::PsiPlus, BellKind::PsiMinus];

    /// Amplitudes over the two-qubit basis `|00⟩, |01⟩, |10⟩, |11⟩`.
    pub fn logical_amplitudes(self) -> [Amplitude; 4] {
        let s = Amplitude::new(FRAC_1_SQRT_2, 0.0);
        let z = Amplitude::default();
        match self {
            BellKind::PhiPlus => [s, z, z, s],
            BellKind::PhiMinus => [s, z, z, -s],
            BellKind::PsiPlus => [z, s, s, z],
            BellKind::PsiMinus => [z, -s, s, z],
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        BellKind::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellKind::PhiPlus => "Φ+",
            BellKind::PhiMinus => "Φ-",
            BellKind::PsiPlus => "Ψ+",
            BellKind::PsiMinus => "Ψ-",
        })
    }
}

/// Single-qubit Pauli operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Matrix on `(|0⟩, |1⟩)`; `Y = [[0, −i], [i, 0]]`.
    pub fn matrix(self) -> [[Amplitude; 2]; 2] {
        let o = Amplitude::new(1.0, 0.0);
        let z = Amplitude::default();
        let i = Amplitude::new(0.0, 1.0);
        match self {
            Pauli::I => [[o, z], [z, o]],
            Pauli::X => [[z, o], [o, z]],
            Pauli::Y => [[z, -i], [i, z]],
            Pauli::Z => [[o, z], [z, -o]],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

fn check_distinct(placements: &[DualRailQubit], mode_count: usize) -> Result<()> {
    let mut used = Vec::with_capacity(placements.len() * 2);
    for q in placements {
        q.check_range(mode_count)?;
        for m in [q.rail1, q.rail0] {
            if used.contains(&m) {
                return Err(Error::DuplicateMode(m));
            }
            used.push(m);
        }
    }
    Ok(())
}

/// Encodes a register of `n` qubits given its `2^n` logical amplitudes.
/// Modes not named by any placement are left empty.
pub fn encode_register(amplitudes: &[Amplitude], placements: &[DualRailQubit], total_modes: usize) -> Result<FockState> {
    let n = placements.len();
    if amplitudes.len() != 1usize << n {
        return Err(Error::InvalidArgument(format!(
            "{} amplitudes given for a {n}-qubit register",
            amplitudes.len()
        )));
    }
    check_distinct(placements, total_modes)?;
    let terms = amplitudes.iter().enumerate().map(|(index, &amp)| {
        let mut ket = Occupation::vacuum(total_modes);
        for (q, p) in placements.iter().enumerate() {
            let bit = (index >> (n - 1 - q)) & 1;
            let mode = if bit == 1 { p.rail1 } else { p.rail0 };
            ket.counts_mut()[mode] = 1;
        }
        (ket, amp)
    });
    FockState::new(total_modes, terms)
}

/// `a0·|…0_{rail1} 1_{rail0}…⟩ + a1·|…1_{rail1} 0_{rail0}…⟩`.
pub fn encode(q: LogicalAmplitudes, placement: DualRailQubit, total_modes: usize) -> Result<FockState> {
    encode_register(&q.as_array(), &[placement], total_modes)
}

/// Logical amplitudes of a register together with the weight found outside
/// the dual-rail subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded {
    pub amplitudes: Vec<Amplitude>,
    pub leakage: f64,
}

/// Reads the logical amplitudes of `placements` off `state`, reporting the
/// weight of any term that is not a valid register ket (a placement pair
/// without exactly one photon, or a photon in a mode outside the register).
pub fn decode_register_lossy(state: &FockState, placements: &[DualRailQubit]) -> Result<Decoded> {
    check_distinct(placements, state.mode_count())?;
    let n = placements.len();
    let mut amplitudes = vec![Amplitude::default(); 1usize << n];
    let mut leakage = 0.0;
    'terms: for (ket, amp) in state.terms() {
        let mut index = 0usize;
        for p in placements {
            match (ket.get(p.rail1), ket.get(p.rail0)) {
                (1, 0) => index = (index << 1) | 1,
                (0, 1) => index <<= 1,
                _ => {
                    leakage += amp.norm_sqr();
                    continue 'terms;
                }
            }
        }
        let inside: u32 = placements.iter().map(|p| ket.get(p.rail1) + ket.get(p.rail0)).sum();
        if ket.total() != inside {
            leakage += amp.norm_sqr();
            continue;
        }
        amplitudes[index] += amp;
    }
    Ok(Decoded { amplitudes, leakage })
}

/// Like [`decode_register_lossy`] but fails on leakage above [`LEAKAGE_TOL`].
pub fn decode_register(state: &FockState, placements: &[DualRailQubit]) -> Result<Vec<Amplitude>> {
    let d = decode_register_lossy(state, placements)?;
    if d.leakage > LEAKAGE_TOL {
        return Err(Error::Leakage(d.leakage));
    }
    Ok(d.amplitudes)
}

/// Inverse of [`encode`].
pub fn decode(state: &FockState, placement: DualRailQubit) -> Result<LogicalAmplitudes> {
    let a = decode_register(state, &[placement])?;
    Ok(LogicalAmplitudes::new(a[0], a[1]))
}

/// A Bell state of the qubits on `pair_a` and `pair_b`.
pub fn bell_state(kind: BellKind, pair_a: DualRailQubit, pair_b: DualRailQubit, total_modes: usize) -> Result<FockState> {
    encode_register(&kind.logical_amplitudes(), &[pair_a, pair_b], total_modes)
}

/// Applies a Pauli operator to the qubit on `placement`.
///
/// Every term must hold exactly one photon on the pair; other modes are
/// untouched.
pub fn pauli_correction(state: &FockState, placement: DualRailQubit, which: Pauli) -> Result<FockState> {
    placement.check_range(state.mode_count())?;
    let leaked: f64 = state
        .terms()
        .filter(|(k, _)| k.get(placement.rail1) + k.get(placement.rail0) != 1)
        .map(|(_, a)| a.norm_sqr())
        .sum();
    if leaked > LEAKAGE_TOL {
        return Err(Error::Leakage(leaked));
    }
    let m = which.matrix();
    let mut terms = Vec::with_capacity(state.len() * 2);
    for (ket, amp) in state.terms() {
        if ket.get(placement.rail1) + ket.get(placement.rail0) != 1 {
            continue;
        }
        let bit = ket.get(placement.rail1) as usize;
        for (out, row) in m.iter().enumerate() {
            let coef = row[bit];
            if coef == Amplitude::default() {
                continue;
            }
            let mut k2 = ket.clone();
            k2.counts_mut()[placement.rail1] = out as u32;
            k2.counts_mut()[placement.rail0] = 1 - out as u32;
            terms.push((k2, amp * coef));
        }
    }
    FockState::new(state.mode_count(), terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    fn pair() -> DualRailQubit {
        DualRailQubit::new(0, 1).unwrap()
    }

    #[test]
    fn basis_encoding() {
        let zero = encode(LogicalAmplitudes::zero(), pair(), 2).unwrap();
        assert_eq!(zero, FockState::basis([0, 1]).unwrap());
        let one = encode(LogicalAmplitudes::one(), pair(), 2).unwrap();
        assert_eq!(one, FockState::basis([1, 0]).unwrap());
    }

    #[test]
    fn superposition_encoding() {
        let s = FRAC_1_SQRT_2;
        let plus = encode(LogicalAmplitudes::real(s, s), pair(), 2).unwrap();
        assert_eq!(plus.amplitude(&Occupation::from([0, 1])), c(s));
        assert_eq!(plus.amplitude(&Occupation::from([1, 0])), c(s));
    }

    #[test]
    fn encoding_leaves_other_modes_empty() {
        let q = DualRailQubit::new(3, 1).unwrap();
        let s = encode(LogicalAmplitudes::real(0.6, 0.8), q, 5).unwrap();
        assert_eq!(s.amplitude(&Occupation::from([0, 1, 0, 0, 0])), c(0.6));
        assert_eq!(s.amplitude(&Occupation::from([0, 0, 0, 1, 0])), c(0.8));
    }

    #[test]
    fn two_photon_leak_is_reported() {
        let s = FockState::basis([1, 1]).unwrap();
        assert!(matches!(decode(&s, pair()), Err(Error::Leakage(w)) if (w - 1.0).abs() < 1e-15));
        let s = FockState::basis([2, 0]).unwrap();
        assert!(matches!(decode(&s, pair()), Err(Error::Leakage(_))));
    }

    #[test]
    fn photon_outside_register_is_leakage() {
        let s = FockState::basis([1, 0, 1]).unwrap();
        let d = decode_register_lossy(&s, &[pair()]).unwrap();
        assert!((d.leakage - 1.0).abs() < 1e-15);
    }

    #[test]
    fn collisions_are_rejected() {
        assert!(DualRailQubit::new(2, 2).is_err());
        let a = DualRailQubit::new(0, 1).unwrap();
        let b = DualRailQubit::new(1, 2).unwrap();
        assert_eq!(bell_state(BellKind::PsiPlus, a, b, 4).unwrap_err(), Error::DuplicateMode(1));
    }

    #[test]
    fn psi_plus_kets() {
        let a = DualRailQubit::new(0, 1).unwrap();
        let b = DualRailQubit::new(2, 3).unwrap();
        let s = bell_state(BellKind::PsiPlus, a, b, 4).unwrap();
        // |10>_L -> |1,0,0,1>, |01>_L -> |0,1,1,0>
        assert_eq!(s.amplitude(&Occupation::from([1, 0, 0, 1])), c(FRAC_1_SQRT_2));
        assert_eq!(s.amplitude(&Occupation::from([0, 1, 1, 0])), c(FRAC_1_SQRT_2));
        let phi = bell_state(BellKind::PhiMinus, a, b, 4).unwrap();
        assert_eq!(phi.amplitude(&Occupation::from([0, 1, 0, 1])), c(FRAC_1_SQRT_2));
        assert_eq!(phi.amplitude(&Occupation::from([1, 0, 1, 0])), c(-FRAC_1_SQRT_2));
    }

    #[test]
    fn bell_gram_matrix_is_identity() {
        let a = DualRailQubit::new(0, 1).unwrap();
        let b = DualRailQubit::new(2, 3).unwrap();
        let states: Vec<_> = BellKind::ALL.iter().map(|&k| bell_state(k, a, b, 4).unwrap()).collect();
        for (i, x) in states.iter().enumerate() {
            for (j, y) in states.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((x.inner(y) - c(expected)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn pauli_actions() {
        let q = encode(LogicalAmplitudes::real(0.6, 0.8), pair(), 2).unwrap();
        let z = decode(&pauli_correction(&q, pair(), Pauli::Z).unwrap(), pair()).unwrap();
        assert_eq!(z, LogicalAmplitudes::real(0.6, -0.8));

        let zero = encode(LogicalAmplitudes::zero(), pair(), 2).unwrap();
        let x = decode(&pauli_correction(&zero, pair(), Pauli::X).unwrap(), pair()).unwrap();
        assert_eq!(x, LogicalAmplitudes::one());

        let y = decode(&pauli_correction(&zero, pair(), Pauli::Y).unwrap(), pair()).unwrap();
        assert_eq!(y, LogicalAmplitudes::new(c(0.0), Amplitude::new(0.0, 1.0)));
    }

    #[test]
    fn pauli_algebra_on_basis() {
        for basis in [LogicalAmplitudes::zero(), LogicalAmplitudes::one()] {
            let s = encode(basis, pair(), 2).unwrap();
            let apply = |s: &FockState, ps: &[Pauli]| {
                ps.iter().fold(s.clone(), |acc, &p| pauli_correction(&acc, pair(), p).unwrap())
            };
            assert_eq!(apply(&s, &[Pauli::X, Pauli::X]), s);
            assert_eq!(apply(&s, &[Pauli::Z, Pauli::Z]), s);
            // ZX = -XZ: applying X then Z equals minus applying Z then X.
            let zx = apply(&s, &[Pauli::X, Pauli::Z]);
            let xz = apply(&s, &[Pauli::Z, Pauli::X]);
            assert_eq!(zx, xz.scaled(c(-1.0)).unwrap());
        }
    }

    #[test]
    fn pauli_rejects_leaked_state() {
        let s = FockState::basis([2, 0]).unwrap();
        assert!(matches!(pauli_correction(&s, pair(), Pauli::Z), Err(Error::Leakage(_))));
    }
}
