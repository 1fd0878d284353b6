//! A seeded sweep over the invariants of the simulator and the gates.
//!
//! [`run_checks`] draws random inputs from a ChaCha stream seeded by the
//! caller, so the same seed and sample count always produce the same
//! [`VerifyReport`], down to its text rendering.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::circuit::{execute, parse, random_circuit};
use crate::dual_rail::{decode_register_lossy, LogicalAmplitudes};
use crate::error::{Error, Result};
use crate::fock::{Amplitude, FockState, Occupation};
use crate::measurement::outcome_distribution;
use crate::optics::{apply_mode_unitary, hadamard_bs, ModeUnitary};
use crate::protocols::{
    fidelity, run_destructive_csign, run_nondestructive_csign, run_quantum_encoder, teleport_gate_table,
    verify_a_matrix, AMatrixReport, AcceptPolicy, BellAmplitudes, GateRunResult, TELEPORT_ORDER,
};

/// Tolerance shared by every check.
pub const CHECK_TOL: f64 = 1e-12;

/// Outcome of one invariant over all of its samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub samples: usize,
    /// Largest deviation seen; the check passes when it is within
    /// [`CHECK_TOL`].
    pub max_deviation: f64,
    /// First failure, if any.
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.max_deviation <= CHECK_TOL
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub seed: u64,
    pub samples: usize,
    pub checks: Vec<Check>,
    pub a_matrix: AMatrixReport,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed {}, {} samples per check, tolerance {CHECK_TOL:e}", self.seed, self.samples)?;
        writeln!(f)?;
        for c in &self.checks {
            let status = if c.passed() { "ok  " } else { "FAIL" };
            write!(f, "{status} {:<44} {:>6} samples  max deviation {:.2e}", c.name, c.samples, c.max_deviation)?;
            if let Some(msg) = &c.failure {
                write!(f, "  ({msg})")?;
            }
            writeln!(f)?;
        }
        let passed = self.checks.iter().filter(|c| c.passed()).count();
        writeln!(f)?;
        writeln!(f, "{passed}/{} checks passed", self.checks.len())?;
        writeln!(f)?;
        write!(f, "{}", self.a_matrix)
    }
}

struct Tracker {
    name: &'static str,
    samples: usize,
    max_deviation: f64,
    failure: Option<String>,
}

impl Tracker {
    fn new(name: &'static str) -> Self {
        Tracker { name, samples: 0, max_deviation: 0.0, failure: None }
    }

    fn sample(&mut self) {
        self.samples += 1;
    }

    fn deviation(&mut self, d: f64) {
        // NaN counts as the worst deviation.
        if d.is_nan() || d > self.max_deviation {
            self.max_deviation = if d.is_nan() { f64::INFINITY } else { d };
        }
    }

    fn fail(&mut self, msg: impl Into<String>) {
        if self.failure.is_none() {
            self.failure = Some(msg.into());
        }
    }

    fn guard<T>(&mut self, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.fail(e.to_string());
                None
            }
        }
    }

    fn finish(self) -> Check {
        Check { name: self.name, samples: self.samples, max_deviation: self.max_deviation, failure: self.failure }
    }
}

fn random_qubit<R: Rng>(rng: &mut R) -> LogicalAmplitudes {
    let theta = rng.gen_range(0.0..std::f64::consts::PI);
    let phi = rng.gen_range(0.0..std::f64::consts::TAU);
    LogicalAmplitudes::from_bloch(theta, phi)
}

fn random_complex<R: Rng>(rng: &mut R) -> Amplitude {
    Amplitude::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Random normalized state on `modes` modes with at most `max_photons`
/// photons per term.
fn random_state<R: Rng>(rng: &mut R, modes: usize, max_photons: u32) -> FockState {
    loop {
        let terms: Vec<(Occupation, Amplitude)> = (0..rng.gen_range(1..=5))
            .map(|_| {
                let total = rng.gen_range(0..=max_photons);
                let mut counts = vec![0u32; modes];
                for _ in 0..total {
                    counts[rng.gen_range(0..modes)] += 1;
                }
                (Occupation::new(counts), random_complex(rng))
            })
            .collect();
        if let Ok(s) = FockState::new(modes, terms).and_then(|s| s.normalized()) {
            return s;
        }
    }
}

/// Random `k×k` unitary as a product of two-mode rotations.
fn random_unitary<R: Rng>(rng: &mut R, k: usize) -> ModeUnitary {
    let mut u = ModeUnitary::identity(k);
    if k == 1 {
        let phase = Amplitude::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        return ModeUnitary::new(1, vec![phase]).expect("unit phase");
    }
    for _ in 0..2 * k {
        let (i, j) = {
            let picked: Vec<usize> = (0..k).collect::<Vec<_>>().choose_multiple(rng, 2).copied().collect();
            (picked[0], picked[1])
        };
        let r = crate::circuit::random_unitary2(rng);
        let mut entries = ModeUnitary::identity(k).entries().to_vec();
        entries[i * k + i] = r[0];
        entries[i * k + j] = r[1];
        entries[j * k + i] = r[2];
        entries[j * k + j] = r[3];
        let g = ModeUnitary::new(k, entries).expect("embedded rotation is unitary");
        u = g.compose(&u).expect("same dimension");
    }
    u
}

fn photon_histogram(s: &FockState) -> Vec<f64> {
    let mut h = vec![0.0; s.max_photons() as usize + 1];
    for (k, a) in s.terms() {
        h[k.total() as usize] += a.norm_sqr();
    }
    h
}

fn gate_checks(t: &mut Tracker, run: &GateRunResult, expected_probability: f64) {
    t.deviation((run.accepted_probability - expected_probability).abs());
    t.deviation((run.total_probability() - 1.0).abs());
    match run.fidelity_vs_reference {
        Some(f) => t.deviation(1.0 - f),
        None => t.fail("no accepted output"),
    }
    for b in run.accepted() {
        let Some(residual) = &b.result.residual else { continue };
        let local: Vec<_> = run
            .output_qubits
            .iter()
            .map(|q| {
                let pos = |m| b.result.residual_modes.iter().position(|&x| x == m).expect("output survives");
                crate::dual_rail::DualRailQubit::new(pos(q.rail1()), pos(q.rail0())).expect("distinct rails")
            })
            .collect();
        if let Some(d) = t.guard(decode_register_lossy(residual, &local)) {
            t.deviation(d.leakage);
        }
    }
}

fn check_destructive(rng: &mut ChaCha8Rng, samples: usize) -> Vec<Check> {
    let mut strict = Tracker::new("destructive gate, strict: p = 1/4");
    let mut ff = Tracker::new("destructive gate, feed-forward: p = 1/2");
    let mut pattern = Tracker::new("destructive gate: D1-click branch p = 1/4");
    let mut superposed = Tracker::new("destructive gate, superposed control");
    for _ in 0..samples {
        let control = if rng.gen_bool(0.5) { LogicalAmplitudes::one() } else { LogicalAmplitudes::zero() };
        let target = random_qubit(rng);
        strict.sample();
        if let Some(run) = strict.guard(run_destructive_csign(control, target, AcceptPolicy::Strict)) {
            gate_checks(&mut strict, &run, 0.25);
            pattern.sample();
            let accepted: Vec<_> = run.accepted().collect();
            if accepted.len() != 1 || run.labels.describe(&accepted[0].result.pattern) != "D1=1 D2=0" {
                pattern.fail("strict branch is not the single D1 click");
            }
            let rest: f64 = run
                .branches
                .iter()
                .filter(|b| b.result.pattern.iter().map(|(_, n)| n).sum::<u32>() != 1)
                .map(|b| b.result.probability)
                .sum();
            pattern.deviation((rest - 0.5).abs());
        }
        ff.sample();
        if let Some(run) = ff.guard(run_destructive_csign(control, target, AcceptPolicy::FeedForward)) {
            gate_checks(&mut ff, &run, 0.5);
        }

        // A superposed control heralds c0·t + c1·Z·t with weight ¼‖c0·t + c1·Z·t‖².
        let control = random_qubit(rng);
        let [t0, t1] = target.as_array();
        let weight = (control.a0 * t0 + control.a1 * t0).norm_sqr() + (control.a0 * t1 - control.a1 * t1).norm_sqr();
        superposed.sample();
        if let Some(run) = superposed.guard(run_destructive_csign(control, target, AcceptPolicy::FeedForward)) {
            gate_checks(&mut superposed, &run, weight / 2.0);
        }
    }
    vec![strict.finish(), ff.finish(), pattern.finish(), superposed.finish()]
}

fn check_encoder(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut t = Tracker::new("encoder, n = 2..4: p = 1/4 strict, 1/2 ff");
    for i in 0..samples {
        let n = 2 + i % 3;
        let (policy, p) = if rng.gen_bool(0.5) { (AcceptPolicy::Strict, 0.25) } else { (AcceptPolicy::FeedForward, 0.5) };
        t.sample();
        if let Some(run) = t.guard(run_quantum_encoder(random_qubit(rng), n, policy)) {
            gate_checks(&mut t, &run, p);
        }
    }
    t.finish()
}

fn check_nondestructive(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut t = Tracker::new("nondestructive gate: p = 1/4 ff, 1/16 strict");
    for _ in 0..samples {
        let (policy, p) = if rng.gen_bool(0.5) { (AcceptPolicy::Strict, 0.0625) } else { (AcceptPolicy::FeedForward, 0.25) };
        t.sample();
        if let Some(run) = t.guard(run_nondestructive_csign(random_qubit(rng), random_qubit(rng), policy)) {
            gate_checks(&mut t, &run, p);
        }
    }
    t.finish()
}

fn check_optics(rng: &mut ChaCha8Rng, samples: usize) -> Vec<Check> {
    let mut t = Tracker::new("mode unitaries conserve norm and photons");
    let mut comp = Tracker::new("applying U then V equals applying V*U");
    for _ in 0..samples {
        let modes = rng.gen_range(1..=6);
        let s = random_state(rng, modes, 3);
        let k = rng.gen_range(1..=modes);
        let mut chosen: Vec<usize> = (0..modes).collect();
        chosen.shuffle(rng);
        chosen.truncate(k);
        let u = random_unitary(rng, k);
        t.sample();
        if let Some(out) = t.guard(apply_mode_unitary(&s, &chosen, &u)) {
            t.deviation((out.norm_squared() - 1.0).abs());
            let (h0, h1) = (photon_histogram(&s), photon_histogram(&out));
            for n in 0..h0.len().max(h1.len()) {
                t.deviation((h0.get(n).unwrap_or(&0.0) - h1.get(n).unwrap_or(&0.0)).abs());
            }
            let v = random_unitary(rng, k);
            comp.sample();
            let step = comp.guard(apply_mode_unitary(&out, &chosen, &v));
            let direct = comp.guard(v.compose(&u).and_then(|vu| apply_mode_unitary(&s, &chosen, &vu)));
            if let (Some(a), Some(b)) = (step, direct) {
                let overlap = a.inner(&b);
                comp.deviation((1.0 - overlap.re).abs() + overlap.im.abs());
            }
        }
    }
    vec![t.finish(), comp.finish()]
}

fn check_outcomes(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut t = Tracker::new("outcome distributions sum to one");
    for _ in 0..samples {
        let modes = rng.gen_range(1..=6);
        let s = random_state(rng, modes, 3);
        let mut detectors: Vec<usize> = (0..modes).collect();
        detectors.shuffle(rng);
        detectors.truncate(rng.gen_range(1..=modes));
        t.sample();
        if let Some(d) = t.guard(outcome_distribution(&s, &detectors)) {
            t.deviation((d.iter().map(|b| b.probability).sum::<f64>() - 1.0).abs());
        }
    }
    t.finish()
}

fn check_hong_ou_mandel() -> Check {
    let mut t = Tracker::new("Hong-Ou-Mandel: no coincidences");
    t.sample();
    let s = FockState::basis([1, 1]).expect("valid ket");
    if let Some(out) = t.guard(apply_mode_unitary(&s, &[0, 1], &hadamard_bs())) {
        t.deviation(out.amplitude(&Occupation::from([1, 1])).norm());
    }
    t.finish()
}

fn check_teleportation(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut t = Tracker::new("teleportation identity, every outcome p = 1/4");
    let resource = BellAmplitudes::only(TELEPORT_ORDER[0].0);
    for _ in 0..samples {
        let input = random_qubit(rng);
        t.sample();
        for (row, (_, pauli)) in teleport_gate_table(resource, input).iter().zip(TELEPORT_ORDER) {
            t.deviation((row.probability - 0.25).abs());
            let m = pauli.matrix();
            let corrected = [
                m[0][0] * row.output[0] + m[0][1] * row.output[1],
                m[1][0] * row.output[0] + m[1][1] * row.output[1],
            ];
            let norm = (corrected[0].norm_sqr() + corrected[1].norm_sqr()).sqrt();
            let corrected = [corrected[0] / norm, corrected[1] / norm];
            t.deviation(1.0 - fidelity(&input.as_array(), &corrected));
        }
    }
    t.finish()
}

fn check_circuits(rng: &mut ChaCha8Rng, samples: usize) -> Check {
    let mut t = Tracker::new("circuit programs round-trip and conserve p");
    for _ in 0..samples {
        let c = random_circuit(rng);
        t.sample();
        match parse(&c.to_string()) {
            Ok(back) if back == c => {}
            Ok(_) => t.fail(format!("round trip changed the program:\n{c}")),
            Err(e) => t.fail(format!("formatted program does not parse: {e}")),
        }
        if let Some(run) = t.guard(execute(&c)) {
            t.deviation((run.total_probability() - 1.0).abs());
        }
    }
    t.finish()
}

/// Runs every check with `samples` random draws each (some checks use a
/// fixed count or a fraction of it).
pub fn run_checks(seed: u64, samples: usize) -> Result<VerifyReport> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    checks.extend(check_destructive(&mut rng, samples));
    checks.push(check_encoder(&mut rng, samples));
    checks.push(check_nondestructive(&mut rng, samples));
    checks.extend(check_optics(&mut rng, samples));
    checks.push(check_outcomes(&mut rng, samples));
    checks.push(check_hong_ou_mandel());
    checks.push(check_teleportation(&mut rng, samples));
    checks.push(check_circuits(&mut rng, samples));

    let a_matrix = verify_a_matrix();
    let mut a = Tracker::new("derived teleportation coefficients are exact");
    a.sample();
    a.deviation(a_matrix.max_residual);
    if a_matrix.entries.len() != 16 {
        a.fail("expected 16 coefficients");
    }
    checks.push(a.finish());
    Ok(VerifyReport { seed, samples, checks, a_matrix })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweep_passes_and_repeats() {
        let a = run_checks(3, 8).unwrap();
        assert!(a.all_passed(), "{a}");
        assert_eq!(a.to_string(), run_checks(3, 8).unwrap().to_string());
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(run_checks(1, 0).is_err());
    }
}
