//! Passive linear-optical elements acting on Fock states.
//!
//! An element on `k` modes is a `k×k` unitary `U`. Its action on a state is
//! the substitution of creation operators
//!
//! ```text
//! a†_j  ->  Σ_k U[k][j] a†_k
//! ```
//!
//! so column `j` describes where a photon entering input `j` goes. Restricted
//! to a single photon, the amplitude vector over the touched modes transforms
//! as `c -> U·c`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState, Occupation};

/// Deviation from `U·U† = I` tolerated by [`ModeUnitary::new`].
pub const UNITARITY_TOL: f64 = 1e-12;

/// A `k×k` unitary acting on an ordered list of `k` modes.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeUnitary {
    dim: usize,
    // row-major
    entries: Vec<Amplitude>,
}

impl ModeUnitary {
    /// Wraps a row-major `dim×dim` matrix, checking unitarity.
    pub fn new(dim: usize, entries: Vec<Amplitude>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        if entries.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let u = ModeUnitary { dim, entries };
        let dev = u.unitarity_deviation();
        if dev > UNITARITY_TOL {
            return Err(Error::NotUnitary(dev));
        }
        Ok(u)
    }

    pub fn from_rows<const K: usize>(rows: [[Amplitude; K]; K]) -> Result<Self> {
        Self::new(K, rows.iter().flatten().copied().collect())
    }

    pub fn identity(dim: usize) -> Self {
        let mut entries = vec![Amplitude::default(); dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Amplitude::new(1.0, 0.0);
        }
        ModeUnitary { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> Amplitude {
        self.entries[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Amplitude] {
        &self.entries
    }

    /// Largest entry-wise deviation of `U·U†` from the identity.
    pub fn unitarity_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let s: Amplitude = (0..n).map(|k| self.entry(r, k) * self.entry(c, k).conj()).sum();
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm());
            }
        }
        worst
    }

    /// Matrix product `self · rhs`.
    pub fn compose(&self, rhs: &ModeUnitary) -> Result<ModeUnitary> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: rhs.dim });
        }
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push((0..n).map(|k| self.entry(r, k) * rhs.entry(k, c)).sum());
            }
        }
        Ok(ModeUnitary { dim: n, entries })
    }

    pub fn adjoint(&self) -> ModeUnitary {
        let n = self.dim;
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                entries.push(self.entry(c, r).conj());
            }
        }
        ModeUnitary { dim: n, entries }
    }

    /// `U·c` for an amplitude vector of length `dim`.
    pub fn apply_vector(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        (0..self.dim)
            .map(|r| (0..self.dim).map(|c| self.entry(r, c) * v[c]).sum())
            .collect()
    }
}

/// The balanced beam splitter used as a Hadamard gate:
/// `(1/√2)·[[1, 1], [−1, 1]]`.
///
/// Note that this matrix squares to `[[0, 1], [−1, 0]]`, not the identity.
pub fn hadamard_bs() -> ModeUnitary {
    let h = Amplitude::new(FRAC_1_SQRT_2, 0.0);
    ModeUnitary { dim: 2, entries: vec![h, h, -h, h] }
}

fn factorial(n: u32) -> f64 {
    (1..=n as u64).product::<u64>() as f64
}

/// Expands `Π_j (Σ_k U[k][j] x_k)^{n_j} / √(n_j!)` and maps each monomial
/// `x^e` onto `Π_k √(e_k!) |e⟩`. Returns the local output kets.
fn expand_local(u: &ModeUnitary, inputs: &[u32]) -> Vec<(Vec<u32>, Amplitude)> {
    let k = u.dim();
    let mut poly: BTreeMap<Vec<u32>, Amplitude> = BTreeMap::new();
    poly.insert(vec![0; k], Amplitude::new(1.0, 0.0));
    for (j, &n) in inputs.iter().enumerate() {
        for _ in 0..n {
            let mut next: BTreeMap<Vec<u32>, Amplitude> = BTreeMap::new();
            for (exps, coef) in &poly {
                for out in 0..k {
                    let w = u.entry(out, j);
                    if w == Amplitude::default() {
                        continue;
                    }
                    let mut e = exps.clone();
                    e[out] += 1;
                    *next.entry(e).or_default() += coef * w;
                }
            }
            poly = next;
        }
    }
    let in_norm: f64 = inputs.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
    poly.into_iter()
        .map(|(e, coef)| {
            let out_norm: f64 = e.iter().map(|&n| factorial(n)).product::<f64>().sqrt();
            (e, coef * (out_norm / in_norm))
        })
        .collect()
}

/// Applies `u` to the listed modes of `state`.
///
/// `modes[j]` is the mode playing the role of input/output port `j` of the
/// element. Photon number is conserved term by term and the norm is
/// preserved.
pub fn apply_mode_unitary(state: &FockState, modes: &[usize], u: &ModeUnitary) -> Result<FockState> {
    if modes.len() != u.dim() {
        return Err(Error::DimensionMismatch { expected: u.dim(), found: modes.len() });
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= state.mode_count() {
            return Err(Error::ModeOutOfRange { mode: m, mode_count: state.mode_count() });
        }
        if modes[..i].contains(&m) {
            return Err(Error::DuplicateMode(m));
        }
    }
    let dev = u.unitarity_deviation();
    if dev > UNITARITY_TOL {
        return Err(Error::NotUnitary(dev));
    }

    let mut cache: HashMap<Vec<u32>, Vec<(Vec<u32>, Amplitude)>> = HashMap::new();
    let mut out: BTreeMap<Occupation, Amplitude> = BTreeMap::new();
    for (ket, amp) in state.terms() {
        let local: Vec<u32> = modes.iter().map(|&m| ket.get(m)).collect();
        let expanded = cache.entry(local.clone()).or_insert_with(|| expand_local(u, &local));
        for (exps, coef) in expanded.iter() {
            let mut k2 = ket.clone();
            for (slot, &m) in modes.iter().enumerate() {
                k2.counts_mut()[m] = exps[slot];
            }
            *out.entry(k2).or_default() += amp * coef;
        }
    }
    FockState::from_map(state.mode_count(), out).ok_or(Error::EmptyState)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn hadamard_entries() {
        let h = hadamard_bs();
        let s = FRAC_1_SQRT_2;
        assert_eq!(h.entry(0, 0), c(s));
        assert_eq!(h.entry(0, 1), c(s));
        assert_eq!(h.entry(1, 0), c(-s));
        assert_eq!(h.entry(1, 1), c(s));
        assert!(h.unitarity_deviation() < 1e-15);
    }

    #[test]
    fn hadamard_squared_is_not_identity() {
        let h2 = hadamard_bs().compose(&hadamard_bs()).unwrap();
        let expected = [c(0.0), c(1.0), c(-1.0), c(0.0)];
        for (a, b) in h2.entries().iter().zip(expected) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn identity_is_noop() {
        let s = FockState::new(
            3,
            [(Occupation::from([1, 1, 0]), c(0.6)), (Occupation::from([0, 2, 1]), c(0.8))],
        )
        .unwrap();
        let out = apply_mode_unitary(&s, &[0, 2], &ModeUnitary::identity(2)).unwrap();
        assert_eq!(out, s);
    }

    // Logical order (|0>, |1>) = (photon in rail0, photon in rail1), so the
    // Hadamard acts on [rail0, rail1] = [mode 2, mode 1].
    #[test]
    fn logical_hadamard_gives_triplet_and_singlet() {
        let s = FRAC_1_SQRT_2;
        let one = FockState::basis([1, 0]).unwrap();
        let out = apply_mode_unitary(&one, &[1, 0], &hadamard_bs()).unwrap();
        let triplet = FockState::new(2, [(Occupation::from([0, 1]), c(s)), (Occupation::from([1, 0]), c(s))]).unwrap();
        assert!(out.equal_up_to_global_phase(&triplet, 1e-15).is_some());
        assert!((out.amplitude(&Occupation::from([1, 0])) - c(s)).norm() < 1e-15);

        let zero = FockState::basis([0, 1]).unwrap();
        let out = apply_mode_unitary(&zero, &[1, 0], &hadamard_bs()).unwrap();
        assert!((out.amplitude(&Occupation::from([0, 1])) - c(s)).norm() < 1e-15);
        assert!((out.amplitude(&Occupation::from([1, 0])) - c(-s)).norm() < 1e-15);
    }

    #[test]
    fn errors() {
        let s = FockState::basis([1, 0]).unwrap();
        let h = hadamard_bs();
        assert_eq!(apply_mode_unitary(&s, &[0, 0], &h).unwrap_err(), Error::DuplicateMode(0));
        assert_eq!(
            apply_mode_unitary(&s, &[0, 2], &h).unwrap_err(),
            Error::ModeOutOfRange { mode: 2, mode_count: 2 }
        );
        assert!(matches!(
            apply_mode_unitary(&s, &[0], &h).unwrap_err(),
            Error::DimensionMismatch { .. }
        ));
        assert!(matches!(
            ModeUnitary::new(2, vec![c(1.0), c(1.0), c(0.0), c(1.0)]).unwrap_err(),
            Error::NotUnitary(_)
        ));
    }

    #[test]
    fn two_photon_normalization() {
        // |2,0> through the identity-swapping matrix lands on |0,2> with amplitude 1.
        let swap = ModeUnitary::new(2, vec![c(0.0), c(1.0), c(1.0), c(0.0)]).unwrap();
        let s = FockState::basis([2, 0]).unwrap();
        let out = apply_mode_unitary(&s, &[0, 1], &swap).unwrap();
        assert_eq!(out.len(), 1);
        assert!((out.amplitude(&Occupation::from([0, 2])) - c(1.0)).norm() < 1e-15);
    }
}
