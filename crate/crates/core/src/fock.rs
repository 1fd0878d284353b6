//! Sparse multimode bosonic states.
//!
//! A [`FockState`] is a map from occupation vectors (photons per mode) to
//! complex amplitudes. Terms whose amplitude falls below [`PRUNE_TOL`] are
//! never stored, so exact cancellations (as in Hong-Ou-Mandel interference)
//! leave no residue in the map. Enumeration is always in lexicographic ket
//! order.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex probability amplitude.
pub type Amplitude = Complex64;

/// Terms with modulus below this are dropped on construction.
pub const PRUNE_TOL: f64 = 1e-14;

/// Tolerance used when checking that a state is normalized.
pub const NORM_TOL: f64 = 1e-12;

/// Photon count per mode.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Occupation(Vec<u32>);

impl Occupation {
    pub fn new(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }

    pub fn vacuum(mode_count: usize) -> Self {
        Occupation(vec![0; mode_count])
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total photon number.
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    pub(crate) fn counts_mut(&mut self) -> &mut [u32] {
        &mut self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    /// Occupation with the given modes deleted; remaining modes keep their order.
    pub fn without_modes(&self, removed: &[usize]) -> Occupation {
        Occupation(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !removed.contains(i))
                .map(|(_, &n)| n)
                .collect(),
        )
    }

    /// Concatenation, used for tensor products.
    pub fn concat(&self, other: &Occupation) -> Occupation {
        let mut counts = self.0.clone();
        counts.extend_from_slice(&other.0);
        Occupation(counts)
    }
}

impl<const N: usize> From<[u32; N]> for Occupation {
    fn from(counts: [u32; N]) -> Self {
        Occupation(counts.to_vec())
    }
}

impl From<Vec<u32>> for Occupation {
    fn from(counts: Vec<u32>) -> Self {
        Occupation(counts)
    }
}

impl fmt::Display for Occupation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ">")
    }
}

/// A pure state of `mode_count` bosonic modes in the photon-number basis.
///
/// Values are immutable once built; every operation returns a new state.
#[derive(Clone, Debug, PartialEq)]
pub struct FockState {
    mode_count: usize,
    terms: BTreeMap<Occupation, Amplitude>,
}

impl FockState {
    /// Builds a state from a list of terms. Duplicate kets are summed, and
    /// terms below the prune tolerance are dropped.
    pub fn new<I>(mode_count: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Occupation, Amplitude)>,
    {
        if mode_count == 0 {
            return Err(Error::InvalidArgument("a state needs at least one mode".into()));
        }
        let mut map: BTreeMap<Occupation, Amplitude> = BTreeMap::new();
        let mut seen_any = false;
        for (ket, amp) in terms {
            if ket.len() != mode_count {
                return Err(Error::ModeCountMismatch { expected: mode_count, found: ket.len() });
            }
            if !amp.re.is_finite() || !amp.im.is_finite() {
                return Err(Error::NonFinite);
            }
            seen_any = true;
            *map.entry(ket).or_default() += amp;
        }
        if !seen_any {
            return Err(Error::EmptyState);
        }
        Self::from_map(mode_count, map).ok_or(Error::EmptyState)
    }

    /// Prunes `map` and wraps it; `None` when nothing survives.
    pub(crate) fn from_map(mode_count: usize, mut map: BTreeMap<Occupation, Amplitude>) -> Option<Self> {
        map.retain(|_, a| a.norm() >= PRUNE_TOL);
        if map.is_empty() {
            None
        } else {
            Some(FockState { mode_count, terms: map })
        }
    }

    /// All modes empty, amplitude one.
    pub fn vacuum(mode_count: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Occupation::vacuum(mode_count), Amplitude::new(1.0, 0.0));
        FockState { mode_count, terms }
    }

    /// A single basis ket with unit amplitude.
    pub fn basis(ket: impl Into<Occupation>) -> Result<Self> {
        let ket = ket.into();
        Self::new(ket.len(), [(ket, Amplitude::new(1.0, 0.0))])
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Terms in lexicographic ket order.
    pub fn terms(&self) -> impl Iterator<Item = (&Occupation, &Amplitude)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Amplitude of `ket`, zero if absent.
    pub fn amplitude(&self, ket: &Occupation) -> Amplitude {
        self.terms.get(ket).copied().unwrap_or_default()
    }

    /// Sum of squared moduli.
    pub fn norm_squared(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_squared() - 1.0).abs() <= NORM_TOL
    }

    /// Largest photon number carried by any term.
    pub fn max_photons(&self) -> u32 {
        self.terms.keys().map(Occupation::total).max().unwrap_or(0)
    }

    /// `self ⊗ other`; the modes of `other` follow those of `self`.
    pub fn tensor(&self, other: &FockState) -> FockState {
        let mut map = BTreeMap::new();
        for (ka, aa) in &self.terms {
            for (kb, ab) in &other.terms {
                map.insert(ka.concat(kb), aa * ab);
            }
        }
        // Products of amplitudes above the floor can still fall below it.
        Self::from_map(self.mode_count + other.mode_count, map).expect("tensor of non-empty states")
    }

    pub fn scaled(&self, factor: Amplitude) -> Option<FockState> {
        let map = self.terms.iter().map(|(k, a)| (k.clone(), a * factor)).collect();
        Self::from_map(self.mode_count, map)
    }

    pub fn normalized(&self) -> Result<FockState> {
        let norm = self.norm_squared().sqrt();
        if norm < PRUNE_TOL {
            return Err(Error::ZeroNorm);
        }
        self.scaled(Amplitude::new(1.0 / norm, 0.0)).ok_or(Error::ZeroNorm)
    }

    /// `<self|other>`; zero when the mode counts differ.
    pub fn inner(&self, other: &FockState) -> Amplitude {
        if self.mode_count != other.mode_count {
            return Amplitude::default();
        }
        self.terms
            .iter()
            .filter_map(|(k, a)| other.terms.get(k).map(|b| a.conj() * b))
            .sum()
    }

    /// Checks whether `self = λ·other` for some unit-modulus `λ`, returning
    /// that phase when it holds.
    ///
    /// `λ` is read off the term of largest modulus in `self` that `other`
    /// shares; the check then bounds `‖self − λ·other‖` by `tol`.
    pub fn equal_up_to_global_phase(&self, other: &FockState, tol: f64) -> Option<Amplitude> {
        if self.mode_count != other.mode_count {
            return None;
        }
        let (ket, a) = self
            .terms
            .iter()
            .filter(|(k, _)| other.terms.contains_key(*k))
            .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))?;
        let b = other.terms[ket];
        let ratio = a / b;
        let phase = ratio / ratio.norm();
        let mut dist = 0.0;
        for (k, a) in &self.terms {
            dist += (a - phase * other.amplitude(k)).norm_sqr();
        }
        for (k, b) in &other.terms {
            if !self.terms.contains_key(k) {
                dist += b.norm_sqr();
            }
        }
        (dist.sqrt() <= tol).then_some(phase)
    }
}

/// Formats a real for canonical output: twelve decimals, trailing zeros
/// trimmed, negative zero folded to zero.
pub fn format_real(x: f64) -> String {
    if x.abs() < 5e-13 {
        return "0".to_string();
    }
    let s = format!("{x:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    s.to_string()
}

/// One line per term, `(re,im) |n1,...,nk>`, lexicographic ket order.
impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (k, a)) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "({},{}) {}", format_real(a.re), format_real(a.im), k)?;
        }
        Ok(())
    }
}

impl FockState {
    /// Canonical rendering split into lines.
    pub fn canonical_lines(&self) -> Vec<String> {
        self.to_string().lines().map(str::to_owned).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn single_term() {
        let s = FockState::new(2, [(Occupation::from([1, 0]), c(1.0))]).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.norm_squared() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn exact_cancellation_is_rejected() {
        let err = FockState::new(
            2,
            [(Occupation::from([0, 1]), c(FRAC_1_SQRT_2)), (Occupation::from([0, 1]), c(-FRAC_1_SQRT_2))],
        )
        .unwrap_err();
        assert_eq!(err, Error::EmptyState);
    }

    #[test]
    fn ancilla_pair() {
        let s = FockState::new(
            4,
            [
                (Occupation::from([0, 1, 0, 1]), c(FRAC_1_SQRT_2)),
                (Occupation::from([1, 0, 1, 0]), c(-FRAC_1_SQRT_2)),
            ],
        )
        .unwrap();
        assert!(s.is_normalized());
        assert_eq!(s.amplitude(&Occupation::from([1, 0, 1, 0])), c(-FRAC_1_SQRT_2));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            FockState::new(3, [(Occupation::from([1, 0]), c(1.0))]).unwrap_err(),
            Error::ModeCountMismatch { expected: 3, found: 2 }
        );
        assert_eq!(FockState::new(2, Vec::new()).unwrap_err(), Error::EmptyState);
        assert_eq!(
            FockState::new(1, [(Occupation::from([1]), c(f64::NAN))]).unwrap_err(),
            Error::NonFinite
        );
    }

    #[test]
    fn tensor_of_kets() {
        let a = FockState::basis([1, 0]).unwrap();
        let b = FockState::basis([0, 1]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.mode_count(), 4);
        assert_eq!(t.amplitude(&Occupation::from([1, 0, 0, 1])), c(1.0));
    }

    #[test]
    fn tensor_distributes() {
        let (al, be) = (c(0.6), c(0.8));
        let a = FockState::new(2, [(Occupation::from([0, 1]), al), (Occupation::from([1, 0]), be)]).unwrap();
        let b = FockState::basis([0, 1]).unwrap();
        let t = a.tensor(&b);
        assert_eq!(t.len(), 2);
        assert_eq!(t.amplitude(&Occupation::from([0, 1, 0, 1])), al);
        assert_eq!(t.amplitude(&Occupation::from([1, 0, 0, 1])), be);
    }

    #[test]
    fn norms() {
        assert_eq!(FockState::basis([1, 0]).unwrap().norm_squared(), 1.0);
        let half = FockState::new(2, [(Occupation::from([1, 0]), c(0.5))]).unwrap();
        assert!((half.norm_squared() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn global_phase() {
        let s = FockState::new(2, [(Occupation::from([0, 1]), c(0.6)), (Occupation::from([1, 0]), c(0.8))]).unwrap();
        let phase = s.equal_up_to_global_phase(&s, 1e-12).unwrap();
        assert!((phase - c(1.0)).norm() < 1e-15);

        let neg = s.scaled(c(-1.0)).unwrap();
        let phase = s.equal_up_to_global_phase(&neg, 1e-12).unwrap();
        assert!((phase - c(-1.0)).norm() < 1e-15);

        let flipped = FockState::new(2, [(Occupation::from([0, 1]), c(0.6)), (Occupation::from([1, 0]), c(-0.8))]).unwrap();
        assert!(s.equal_up_to_global_phase(&flipped, 1e-12).is_none());
    }

    #[test]
    fn canonical_text() {
        let s = FockState::new(
            2,
            [(Occupation::from([1, 0]), Amplitude::new(0.5, -0.25)), (Occupation::from([0, 1]), c(-1.0))],
        )
        .unwrap();
        assert_eq!(s.to_string(), "(-1,0) |0,1>\n(0.5,-0.25) |1,0>");
    }
}
