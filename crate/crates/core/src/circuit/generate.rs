use rand::seq::SliceRandom;
use rand::Rng;

use crate::dual_rail::{BellKind, LogicalAmplitudes};
use crate::fock::{Amplitude, Occupation};

use super::{BsMatrix, Circuit, Comparison, Condition, Element};

fn random_amplitudes<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<Amplitude> {
    loop {
        let v: Vec<Amplitude> = (0..n).map(|_| Amplitude::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm > 1e-3 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// A random 2×2 unitary, row-major.
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> [Amplitude; 4] {
    let tau = std::f64::consts::TAU;
    let theta: f64 = rng.gen_range(0.0..tau / 4.0);
    let (psi, chi, phi) = (rng.gen_range(0.0..tau), rng.gen_range(0.0..tau), rng.gen_range(0.0..tau));
    let g = Amplitude::from_polar(1.0, phi);
    let a = Amplitude::from_polar(theta.cos(), psi);
    let b = Amplitude::from_polar(theta.sin(), chi);
    [g * a, g * b, -g * b.conj(), g * a.conj()]
}

fn random_condition<R: Rng + ?Sized>(rng: &mut R, bound: &[String]) -> Condition {
    let clauses = (0..rng.gen_range(1..=2))
        .map(|_| {
            (0..rng.gen_range(1..=2))
                .map(|_| Comparison { name: bound.choose(rng).expect("names bound").clone(), count: rng.gen_range(0..3) })
                .collect()
        })
        .collect();
    Condition { clauses }
}

/// A random valid program of up to six modes, for round-trip and
/// interpreter sweeps.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R) -> Circuit {
    let n: usize = rng.gen_range(1..=6);
    let labels = rng.gen_bool(0.5).then(|| {
        let pool = ["a1", "a2", "b1", "b2", "1'", "2'", "x", "y_0", "5", "6", "in", "out"];
        let mut names: Vec<String> = pool.choose_multiple(rng, n).map(|s| s.to_string()).collect();
        names.shuffle(rng);
        names
    });
    let mut elements = vec![Element::Modes { count: n, labels }];

    let mut free: Vec<usize> = (0..n).collect();
    free.shuffle(rng);
    if rng.gen_bool(0.3) {
        let mut kets: Vec<Occupation> = Vec::new();
        for _ in 0..rng.gen_range(1..=3) {
            let ket = Occupation::new((0..n).map(|_| rng.gen_range(0..=1)).collect());
            if !kets.contains(&ket) {
                kets.push(ket);
            }
        }
        let amps = random_amplitudes(rng, kets.len());
        let terms = kets.into_iter().zip(amps).collect();
        elements.push(Element::PrepareKet { terms });
    } else {
        while free.len() >= 2 && rng.gen_bool(0.7) {
            if free.len() >= 4 && rng.gen_bool(0.3) {
                let modes = [free.pop().unwrap(), free.pop().unwrap(), free.pop().unwrap(), free.pop().unwrap()];
                let kind = *BellKind::ALL.choose(rng).unwrap();
                elements.push(Element::PrepareBell { kind, modes });
            } else {
                let a = random_amplitudes(rng, 2);
                let (rail1, rail0) = (free.pop().unwrap(), free.pop().unwrap());
                elements.push(Element::PrepareDualRail { amplitudes: LogicalAmplitudes::new(a[0], a[1]), rail1, rail0 });
            }
        }
    }

    let mut alive: Vec<usize> = (0..n).collect();
    let mut bound: Vec<String> = Vec::new();
    for _ in 0..rng.gen_range(0..=6) {
        match rng.gen_range(0..4) {
            0 if alive.len() >= 2 => {
                let picked: Vec<usize> = alive.choose_multiple(rng, 2).copied().collect();
                let matrix = if rng.gen_bool(0.5) { BsMatrix::Hadamard } else { BsMatrix::Explicit(random_unitary2(rng)) };
                elements.push(Element::ApplyBs { modes: [picked[0], picked[1]], matrix });
            }
            1 if !alive.is_empty() => {
                let k = rng.gen_range(0..alive.len());
                let mode = alive.remove(k);
                let name = format!("d{}", bound.len() + 1);
                bound.push(name.clone());
                elements.push(Element::Detect { mode, name });
            }
            2 if !bound.is_empty() => elements.push(Element::PostSelect(random_condition(rng, &bound))),
            3 if !bound.is_empty() && alive.len() >= 2 => {
                let picked: Vec<usize> = alive.choose_multiple(rng, 2).copied().collect();
                let condition = random_condition(rng, &bound);
                elements.push(Element::CorrectZ { rail1: picked[0], rail0: picked[1], condition });
            }
            _ => {}
        }
    }
    Circuit::new(elements).expect("generated circuits are valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_programs_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_circuit(&mut rng);
            let text = c.to_string();
            assert_eq!(super::super::parse(&text).unwrap(), c, "{text}");
        }
    }
}
