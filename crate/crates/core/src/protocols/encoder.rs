use crate::dual_rail::{encode, encode_register, DualRailQubit, LogicalAmplitudes};
use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState};

use super::{bell_stage, finish, AcceptPolicy, GateRunResult, ModeLabels, Partial};

/// Largest register the encoder builds; mode names run out after `z`.
pub const MAX_ENCODER_COPIES: usize = 26;

/// `(|0101…01⟩ − |1010…10⟩)/√2` on `2n` modes, i.e. `(|0…0⟩ − |1…1⟩)/√2`
/// on `n` dual-rail qubits with qubit `k` on modes `(2k, 2k+1)`.
pub(crate) fn entangled_ancilla(n: usize) -> Result<FockState> {
    let placements = ancilla_qubits(n)?;
    let mut amps = vec![Amplitude::default(); 1 << n];
    let h = std::f64::consts::FRAC_1_SQRT_2;
    amps[0] = Amplitude::new(h, 0.0);
    amps[(1 << n) - 1] = Amplitude::new(-h, 0.0);
    encode_register(&amps, &placements, 2 * n)
}

fn ancilla_qubits(n: usize) -> Result<Vec<DualRailQubit>> {
    (0..n).map(|k| DualRailQubit::new(2 * k, 2 * k + 1)).collect()
}

fn check_copies(n: usize) -> Result<()> {
    if !(2..=MAX_ENCODER_COPIES).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "number of copies must be between 2 and {MAX_ENCODER_COPIES}, got {n}"
        )));
    }
    Ok(())
}

/// Names for the `n`-copy encoder layout: ancilla modes `a1 a2 b1 b2 …`,
/// then the input modes `1 2`. The last ancilla mode's port is watched by
/// `Da1` and the input's rail-1 port by `Da2`.
pub fn encoder_labels(n: usize) -> ModeLabels {
    let mut modes: Vec<String> = (0..n)
        .flat_map(|k| {
            let letter = (b'a' + k as u8) as char;
            [format!("{letter}1"), format!("{letter}2")]
        })
        .collect();
    modes.push("1".into());
    modes.push("2".into());
    let detectors = [(2 * n - 1, "Da1".to_string()), (2 * n, "Da2".to_string())].into_iter().collect();
    ModeLabels { modes, detectors }
}

/// Output register of the encoder in the `n`-copy layout: the first `n − 1`
/// ancilla qubits, then the last ancilla's rail-1 mode paired with the
/// surviving input rail.
pub(crate) fn encoder_output(n: usize) -> Result<Vec<DualRailQubit>> {
    let mut out: Vec<DualRailQubit> = (0..n - 1).map(|k| DualRailQubit::new(2 * k, 2 * k + 1)).collect::<Result<_>>()?;
    out.push(DualRailQubit::new(2 * n - 2, 2 * n + 1)?);
    Ok(out)
}

/// The encoder's heralding step on a state laid out as `n` ancilla qubits
/// followed by the input qubit (and possibly further modes).
pub(crate) fn encoder_stage(start: Partial, n: usize, policy: AcceptPolicy) -> Result<Vec<Partial>> {
    let first_qubit = DualRailQubit::new(0, 1)?;
    // The last ancilla mode is mixed with the input's rail-1 mode.
    bell_stage(start, 2 * n - 1, 2 * n, first_qubit, policy)
}

/// Quantum encoder: `a0|0⟩ + a1|1⟩  ->  a0|0…0⟩ + a1|1…1⟩` on `n` qubits.
///
/// Success is heralded by one photon on `Da1` and none on `Da2`; with
/// feed-forward the mirrored pattern is also kept and the first register
/// qubit gets a Z.
pub fn run_quantum_encoder(input: LogicalAmplitudes, n: usize, policy: AcceptPolicy) -> Result<GateRunResult> {
    check_copies(n)?;
    if !input.is_normalized() {
        return Err(Error::InvalidArgument(format!(
            "input amplitudes are not normalized (norm squared {})",
            input.norm_squared()
        )));
    }
    let ancilla = entangled_ancilla(n)?;
    let qubit = encode(input, DualRailQubit::new(0, 1)?, 2)?;
    let state = ancilla.tensor(&qubit);
    let partials = encoder_stage(Partial::start(state), n, policy)?;

    let mut reference = vec![Amplitude::default(); 1 << n];
    reference[0] = input.a0;
    reference[(1 << n) - 1] = input.a1;
    finish(partials, encoder_output(n)?, Some(reference), encoder_labels(n))
}
