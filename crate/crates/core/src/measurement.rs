//! Photon-number-resolving detection and post-selection.
//!
//! Detection consumes the measured modes: residual states only carry the
//! unmeasured modes, in their original order, and every [`BranchResult`]
//! records which input mode each residual mode came from.

use std::collections::BTreeMap;
use std::fmt;

use crate::dual_rail::{DualRailQubit, Pauli};
use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState, Occupation};

/// Required photon counts on a set of modes.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DetectionPattern {
    requirements: BTreeMap<usize, u32>,
}

impl DetectionPattern {
    pub fn new<I: IntoIterator<Item = (usize, u32)>>(requirements: I) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (mode, count) in requirements {
            if map.insert(mode, count).is_some() {
                return Err(Error::DuplicateMode(mode));
            }
        }
        Ok(DetectionPattern { requirements: map })
    }

    pub fn modes(&self) -> impl Iterator<Item = usize> + '_ {
        self.requirements.keys().copied()
    }

    pub fn count(&self, mode: usize) -> Option<u32> {
        self.requirements.get(&mode).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.requirements.iter().map(|(&m, &n)| (m, n))
    }

    pub fn len(&self) -> usize {
        self.requirements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.requirements.is_empty()
    }

    /// Merges two patterns over disjoint modes.
    pub fn merged(&self, other: &DetectionPattern) -> Result<DetectionPattern> {
        Self::new(self.iter().chain(other.iter()))
    }

    /// Rewrites mode indices through `f`.
    pub fn relabeled(&self, f: impl Fn(usize) -> usize) -> DetectionPattern {
        DetectionPattern { requirements: self.iter().map(|(m, n)| (f(m), n)).collect() }
    }

    fn matches(&self, ket: &Occupation) -> bool {
        self.requirements.iter().all(|(&m, &n)| ket.get(m) == n)
    }
}

impl fmt::Display for DetectionPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (m, n)) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{m}:{n}")?;
        }
        write!(f, "}}")
    }
}

/// A feed-forward correction applied to one branch.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AppliedCorrection {
    pub pauli: Pauli,
    pub qubit: DualRailQubit,
}

/// One detection outcome.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchResult {
    pub pattern: DetectionPattern,
    /// Weight of the projected, un-normalized state.
    pub probability: f64,
    /// Normalized state of the unmeasured modes; `None` for a
    /// zero-probability outcome.
    pub residual: Option<FockState>,
    /// `residual_modes[i]` is the input-state index of residual mode `i`.
    pub residual_modes: Vec<usize>,
    /// Corrections applied after detection; always empty straight out of
    /// this module.
    pub corrections: Vec<AppliedCorrection>,
}

fn check_modes(mode_count: usize, modes: impl IntoIterator<Item = usize>) -> Result<()> {
    for m in modes {
        if m >= mode_count {
            return Err(Error::ModeOutOfRange { mode: m, mode_count });
        }
    }
    Ok(())
}

fn check_normalized(s: &FockState) -> Result<()> {
    let n = s.norm_squared();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(n));
    }
    Ok(())
}

fn surviving_modes(mode_count: usize, measured: &[usize]) -> Vec<usize> {
    (0..mode_count).filter(|m| !measured.contains(m)).collect()
}

fn branch_from_terms(
    mode_count: usize,
    pattern: DetectionPattern,
    measured: &[usize],
    kept: Vec<(Occupation, Amplitude)>,
) -> BranchResult {
    let residual_modes = surviving_modes(mode_count, measured);
    let probability = kept.iter().fold(0.0, |acc, (_, a)| acc + a.norm_sqr());
    // A fully measured state leaves nothing behind even when the outcome occurred.
    let residual = if residual_modes.is_empty() || kept.is_empty() {
        None
    } else {
        let terms = kept.into_iter().map(|(k, a)| (k.without_modes(measured), a));
        FockState::new(residual_modes.len(), terms).ok().and_then(|s| s.normalized().ok())
    };
    BranchResult { pattern, probability, residual, residual_modes, corrections: Vec::new() }
}

/// Keeps the terms of `s` matching `pattern`, removes the measured modes
/// and renormalizes.
pub fn project_detection(s: &FockState, pattern: &DetectionPattern) -> Result<BranchResult> {
    check_modes(s.mode_count(), pattern.modes())?;
    check_normalized(s)?;
    let measured: Vec<usize> = pattern.modes().collect();
    let kept = s
        .terms()
        .filter(|(k, _)| pattern.matches(k))
        .map(|(k, a)| (k.clone(), *a))
        .collect();
    Ok(branch_from_terms(s.mode_count(), pattern.clone(), &measured, kept))
}

/// Every count vector over `len` detectors with total at most `max`, in
/// lexicographic order.
fn count_vectors(len: usize, max: u32) -> Vec<Vec<u32>> {
    fn rec(len: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == len {
            out.push(prefix.clone());
            return;
        }
        for n in 0..=budget {
            prefix.push(n);
            rec(len, budget - n, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(len, max, &mut Vec::with_capacity(len), &mut out);
    out
}

/// All photon-count outcomes on `detector_modes`, including explicit
/// zero-probability ones, ordered by pattern.
///
/// Outcomes range over every count vector whose total does not exceed the
/// largest photon number in `s`.
pub fn outcome_distribution(s: &FockState, detector_modes: &[usize]) -> Result<Vec<BranchResult>> {
    check_modes(s.mode_count(), detector_modes.iter().copied())?;
    check_normalized(s)?;
    let mut sorted = detector_modes.to_vec();
    sorted.sort_unstable();
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateMode(w[0]));
        }
    }

    let mut groups: BTreeMap<Vec<u32>, Vec<(Occupation, Amplitude)>> = BTreeMap::new();
    for (k, a) in s.terms() {
        let counts = sorted.iter().map(|&m| k.get(m)).collect();
        groups.entry(counts).or_default().push((k.clone(), *a));
    }

    let branches = count_vectors(sorted.len(), s.max_photons())
        .into_iter()
        .map(|counts| {
            let pattern = DetectionPattern::new(sorted.iter().copied().zip(counts.iter().copied()))
                .expect("distinct detector modes");
            let kept = groups.remove(&counts).unwrap_or_default();
            branch_from_terms(s.mode_count(), pattern, &sorted, kept)
        })
        .collect();
    Ok(branches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn certain_click() {
        let s = FockState::basis([1, 0]).unwrap();
        let b = project_detection(&s, &DetectionPattern::new([(0, 1)]).unwrap()).unwrap();
        assert_eq!(b.probability, 1.0);
        assert_eq!(b.residual.unwrap(), FockState::basis([0]).unwrap());
        assert_eq!(b.residual_modes, vec![1]);
    }

    #[test]
    fn singlet_projection() {
        let s = FockState::new(
            3,
            [(Occupation::from([0, 1, 0]), c(FRAC_1_SQRT_2)), (Occupation::from([1, 0, 0]), c(-FRAC_1_SQRT_2))],
        )
        .unwrap();
        let b = project_detection(&s, &DetectionPattern::new([(0, 1), (1, 0)]).unwrap()).unwrap();
        assert!((b.probability - 0.5).abs() < 1e-15);
        let r = b.residual.unwrap();
        // The sign survives as the residual's phase.
        assert_eq!(r.amplitude(&Occupation::from([0])), c(-1.0));
    }

    #[test]
    fn fully_measured_state() {
        let s = FockState::basis([1, 0]).unwrap();
        let b = project_detection(&s, &DetectionPattern::new([(0, 1), (1, 0)]).unwrap()).unwrap();
        assert_eq!(b.probability, 1.0);
        assert!(b.residual.is_none());
        assert!(b.residual_modes.is_empty());
    }

    #[test]
    fn single_branch_distribution() {
        let s = FockState::basis([0, 1, 0]).unwrap();
        let d = outcome_distribution(&s, &[1]).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d[0].probability, 0.0);
        assert!(d[0].residual.is_none());
        assert_eq!(d[1].probability, 1.0);
    }

    #[test]
    fn out_of_range_and_removed_modes() {
        let s = FockState::basis([1, 0]).unwrap();
        let b = project_detection(&s, &DetectionPattern::new([(0, 1)]).unwrap()).unwrap();
        let residual = b.residual.unwrap();
        // Mode 1 of the original no longer exists in a 1-mode residual.
        assert_eq!(
            project_detection(&residual, &DetectionPattern::new([(1, 0)]).unwrap()).unwrap_err(),
            Error::ModeOutOfRange { mode: 1, mode_count: 1 }
        );
    }

    #[test]
    fn duplicate_pattern_modes() {
        assert_eq!(DetectionPattern::new([(0, 1), (0, 0)]).unwrap_err(), Error::DuplicateMode(0));
        let s = FockState::basis([1, 0]).unwrap();
        assert_eq!(outcome_distribution(&s, &[0, 0]).unwrap_err(), Error::DuplicateMode(0));
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let s = FockState::new(1, [(Occupation::from([1]), c(0.5))]).unwrap();
        assert!(matches!(outcome_distribution(&s, &[0]), Err(Error::NotNormalized(_))));
    }

    #[test]
    fn count_vector_enumeration() {
        let v = count_vectors(2, 2);
        assert_eq!(v, vec![vec![0, 0], vec![0, 1], vec![0, 2], vec![1, 0], vec![1, 1], vec![2, 0]]);
    }
}
