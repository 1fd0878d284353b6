use crate::dual_rail::{encode_register, DualRailQubit, LogicalAmplitudes};
use crate::error::{Error, Result};
use crate::optics::hadamard_bs;

use super::encoder::{encoder_stage, entangled_ancilla};
use super::{bell_stage, csign_reference, extend, finish, labels_from, AcceptPolicy, GateRunResult, Partial};

// Layout: a1 a2 b1 b2 1 2 3 4 (indices 0..8).
const COPY: (usize, usize) = (2, 5); // (b1, 2) after encoding
const TARGET: (usize, usize) = (6, 7);
const CONTROL_OUT: (usize, usize) = (0, 1);
const TARGET_OUT: (usize, usize) = (2, 7); // (1', 4)

/// Mode names of the nondestructive gate after the run, and its detectors.
pub const NONDESTRUCTIVE_LABELS: ([&str; 8], [(usize, &str); 4]) = (
    ["a1", "a2", "1'", "b2", "1", "5", "6", "4"],
    [(3, "Da1"), (4, "Da2"), (5, "D1"), (6, "D2")],
);

/// Nondestructive conditional sign flip: the control is first encoded onto
/// `(a1, a2)` and `(b1, 2)`, then the `(b1, 2)` copy drives the destructive
/// gate on the target. The output register is control `(a1, a2)`, target
/// `(1', 4)`.
pub fn run_nondestructive_csign(
    control: LogicalAmplitudes,
    target: LogicalAmplitudes,
    policy: AcceptPolicy,
) -> Result<GateRunResult> {
    for (name, q) in [("control", &control), ("target", &target)] {
        if !q.is_normalized() {
            return Err(Error::InvalidArgument(format!(
                "{name} amplitudes are not normalized (norm squared {})",
                q.norm_squared()
            )));
        }
    }
    let ancilla = entangled_ancilla(2)?;
    let amps: Vec<_> = control
        .as_array()
        .iter()
        .flat_map(|x| target.as_array().map(|y| x * y))
        .collect();
    let inputs = encode_register(&amps, &[DualRailQubit::new(0, 1)?, DualRailQubit::new(2, 3)?], 4)?;
    let state = ancilla.tensor(&inputs);

    let partials = encoder_stage(Partial::start(state), 2, policy)?;
    let output_fix = DualRailQubit::new(TARGET_OUT.0, TARGET_OUT.1)?;
    let partials = extend(partials, |p| {
        let mut p = p;
        let tracked = p.state.take().expect("live branch");
        // BS1 on (rail0, rail1) of the copy: b1 becomes 1', mode 2 becomes 2'.
        p.state = Some(tracked.apply(&[COPY.1, COPY.0], &hadamard_bs())?);
        bell_stage(p, COPY.1, TARGET.0, output_fix, policy)
    })?;

    let u = csign_reference();
    let reference: Vec<_> = (0..4).map(|r| (0..4).map(|c| u[r][c] * amps[c]).sum()).collect();
    let (names, detectors) = NONDESTRUCTIVE_LABELS;
    finish(
        partials,
        vec![DualRailQubit::new(CONTROL_OUT.0, CONTROL_OUT.1)?, output_fix],
        Some(reference),
        labels_from(&names, &detectors),
    )
}
