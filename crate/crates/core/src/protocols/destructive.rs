use crate::dual_rail::{encode_register, DualRailQubit, LogicalAmplitudes};
use crate::error::{Error, Result};
use crate::fock::FockState;
use crate::optics::{apply_mode_unitary, hadamard_bs};

use super::{bell_stage, finish, labels_from, normalize, AcceptPolicy, GateRunResult, ModeLabels, Partial};

// Layout: control on modes 1,2 (indices 0,1), target on 3,4 (indices 2,3).
// After BS1 index 0 carries 1' and index 1 carries 2'; after BS2 the port
// at index 1 is output 5 (D1) and the port at index 2 is output 6 (D2).
const CONTROL: (usize, usize) = (0, 1);
const TARGET: (usize, usize) = (2, 3);
const OUTPUT: (usize, usize) = (0, 3);
const MIX_FIRST: usize = 1;
const MIX_SECOND: usize = 2;

/// Mode names of the destructive gate after the run, and its detectors.
pub const DESTRUCTIVE_LABELS: ([&str; 4], [(usize, &str); 2]) = (["1'", "5", "6", "4"], [(1, "D1"), (2, "D2")]);

fn check_input(name: &str, q: &LogicalAmplitudes) -> Result<()> {
    if !q.is_normalized() {
        return Err(Error::InvalidArgument(format!(
            "{name} amplitudes are not normalized (norm squared {})",
            q.norm_squared()
        )));
    }
    Ok(())
}

/// The four-mode state right after the control photon has crossed BS1:
/// modes `(1', 2', 3, 4)`.
pub fn prepare_destructive(control: LogicalAmplitudes, target: LogicalAmplitudes) -> Result<FockState> {
    check_input("control", &control)?;
    check_input("target", &target)?;
    let c = DualRailQubit::new(CONTROL.0, CONTROL.1)?;
    let t = DualRailQubit::new(TARGET.0, TARGET.1)?;
    let amps: Vec<_> = control
        .as_array()
        .iter()
        .flat_map(|x| target.as_array().map(|y| x * y))
        .collect();
    let state = encode_register(&amps, &[c, t], 4)?;
    // Logical order (|0>, |1>) = (rail0, rail1).
    apply_mode_unitary(&state, &[c.rail0(), c.rail1()], &hadamard_bs())
}

/// Destructive conditional sign flip.
///
/// The control photon is consumed; on success the target leaves on modes
/// `(1', 4)` with its `|1⟩` component sign-flipped iff the control was
/// `|1⟩`. For a superposed control the heralded output is the coherent
/// combination `c0·t + c1·Z·t`, which is what the reference holds.
pub fn run_destructive_csign(
    control: LogicalAmplitudes,
    target: LogicalAmplitudes,
    policy: AcceptPolicy,
) -> Result<GateRunResult> {
    let state = prepare_destructive(control, target)?;
    let output = DualRailQubit::new(OUTPUT.0, OUTPUT.1)?;
    let partials = bell_stage(Partial::start(state), MIX_FIRST, MIX_SECOND, output, policy)?;

    let (t0, t1) = (target.a0, target.a1);
    let reference = normalize(vec![control.a0 * t0 + control.a1 * t0, control.a0 * t1 - control.a1 * t1]);
    let (names, detectors) = DESTRUCTIVE_LABELS;
    let labels: ModeLabels = labels_from(&names, &detectors);
    finish(partials, vec![output], reference, labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{Amplitude, Occupation};
    use crate::measurement::DetectionPattern;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Amplitude {
        Amplitude::new(re, 0.0)
    }

    #[test]
    fn triplet_times_target_matches_expansion() {
        let (al, be) = (0.6, 0.8);
        let s = prepare_destructive(LogicalAmplitudes::one(), LogicalAmplitudes::real(al, be)).unwrap();
        let h = FRAC_1_SQRT_2;
        // (1/√2)(α|0101> + β|0110> + α|1001> + β|1010>) on (1',2',3,4)
        for (ket, amp) in [([0, 1, 0, 1], al), ([0, 1, 1, 0], be), ([1, 0, 0, 1], al), ([1, 0, 1, 0], be)] {
            assert!((s.amplitude(&Occupation::from(ket)) - c(h * amp)).norm() < 1e-15);
        }
        assert_eq!(s.len(), 4);
    }

    #[test]
    fn strict_sign_flip() {
        let target = LogicalAmplitudes::real(0.6, 0.8);
        let r = run_destructive_csign(LogicalAmplitudes::one(), target, AcceptPolicy::Strict).unwrap();
        assert!((r.accepted_probability - 0.25).abs() < 1e-12);
        let out = r.output.unwrap();
        assert!((out[0] - c(0.6)).norm() < 1e-12);
        assert!((out[1] - c(-0.8)).norm() < 1e-12);

        let r = run_destructive_csign(LogicalAmplitudes::zero(), target, AcceptPolicy::Strict).unwrap();
        let out = r.output.unwrap();
        assert!((out[0] - c(0.6)).norm() < 1e-12);
        assert!((out[1] - c(0.8)).norm() < 1e-12);
    }

    #[test]
    fn strict_branch_is_the_d1_click() {
        let r = run_destructive_csign(LogicalAmplitudes::one(), LogicalAmplitudes::real(0.6, 0.8), AcceptPolicy::Strict)
            .unwrap();
        let accepted: Vec<_> = r.accepted().collect();
        assert_eq!(accepted.len(), 1);
        assert_eq!(accepted[0].result.pattern, DetectionPattern::new([(1, 1), (2, 0)]).unwrap());
        assert_eq!(r.labels.describe(&accepted[0].result.pattern), "D1=1 D2=0");
    }

    #[test]
    fn feedforward_doubles_acceptance() {
        let r = run_destructive_csign(
            LogicalAmplitudes::one(),
            LogicalAmplitudes::real(0.6, 0.8),
            AcceptPolicy::FeedForward,
        )
        .unwrap();
        assert!((r.accepted_probability - 0.5).abs() < 1e-12);
        for out in r.accepted_outputs().unwrap() {
            assert!((out[0] - c(0.6)).norm() < 1e-12);
            assert!((out[1] - c(-0.8)).norm() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let err = run_destructive_csign(LogicalAmplitudes::real(1.0, 1.0), LogicalAmplitudes::zero(), AcceptPolicy::Strict);
        assert!(matches!(err, Err(Error::InvalidArgument(_))));
    }
}
