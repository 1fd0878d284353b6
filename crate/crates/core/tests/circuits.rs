use fockgate::circuit::{execute, parse, Circuit, CircuitRun, Element, ErrorKind};
use fockgate::dual_rail::{decode, DualRailQubit, LogicalAmplitudes};
use fockgate::protocols::{run_destructive_csign, run_nondestructive_csign, AcceptPolicy, GateRunResult};
use fockgate::Amplitude;

const FIG1: &str = include_str!("../circuits/fig1.loc");
const FIG2: &str = include_str!("../circuits/fig2.loc");

fn with_inputs(circuit: &Circuit, inputs: &[LogicalAmplitudes]) -> Circuit {
    let mut next = inputs.iter();
    let elements = circuit
        .elements()
        .iter()
        .cloned()
        .map(|e| match e {
            Element::PrepareDualRail { rail1, rail0, .. } => {
                Element::PrepareDualRail { amplitudes: *next.next().unwrap(), rail1, rail0 }
            }
            other => other,
        })
        .collect();
    Circuit::new(elements).unwrap()
}

fn assert_same_branches(circuit: &CircuitRun, protocol: &GateRunResult) {
    assert_eq!(circuit.branches.len(), protocol.branches.len());
    for p in &protocol.branches {
        let c = circuit.branch(&p.result.pattern).unwrap_or_else(|| panic!("missing {}", p.result.pattern));
        assert!((c.result.probability - p.result.probability).abs() < 1e-12);
        assert_eq!(c.accepted, p.accepted, "{}", p.result.pattern);
        assert_eq!(c.result.residual_modes, p.result.residual_modes);
        assert_eq!(c.result.corrections, p.result.corrections);
        match (&c.result.residual, &p.result.residual) {
            (Some(a), Some(b)) => assert!(a.equal_up_to_global_phase(b, 1e-12).is_some(), "{}", p.result.pattern),
            (None, None) => {}
            _ => panic!("residual presence differs at {}", p.result.pattern),
        }
    }
    assert!((circuit.accepted_probability - protocol.accepted_probability).abs() < 1e-12);
}

#[test]
fn fig1_matches_destructive_gate() {
    let c = parse(FIG1).unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let run = execute(&c).unwrap();
    let reference =
        run_destructive_csign(LogicalAmplitudes::one(), LogicalAmplitudes::real(h, h), AcceptPolicy::Strict).unwrap();
    assert_same_branches(&run, &reference);

    assert!((run.accepted_probability - 0.25).abs() < 1e-12);
    let kept: Vec<_> = run.accepted().collect();
    assert_eq!(kept.len(), 1);
    // Output on modes (1, 4), which are residual modes 0 and 1.
    assert_eq!(kept[0].result.residual_modes, vec![0, 3]);
    let out = decode(kept[0].result.residual.as_ref().unwrap(), DualRailQubit::new(0, 1).unwrap()).unwrap();
    assert!((out.a0 - Amplitude::new(h, 0.0)).norm() < 1e-12);
    assert!((out.a1 - Amplitude::new(-h, 0.0)).norm() < 1e-12);
}

#[test]
fn fig1_matches_for_other_inputs() {
    let c = parse(FIG1).unwrap();
    let inputs = [
        (LogicalAmplitudes::zero(), LogicalAmplitudes::real(0.6, 0.8)),
        (LogicalAmplitudes::real(0.6, 0.8), LogicalAmplitudes::from_bloch(1.1, 0.4)),
        (LogicalAmplitudes::from_bloch(2.0, -1.0), LogicalAmplitudes::one()),
    ];
    for (control, target) in inputs {
        let run = execute(&with_inputs(&c, &[control, target])).unwrap();
        assert_same_branches(&run, &run_destructive_csign(control, target, AcceptPolicy::Strict).unwrap());
    }
}

#[test]
fn fig2_matches_nondestructive_gate() {
    let c = parse(FIG2).unwrap();
    let run = execute(&c).unwrap();
    let control = LogicalAmplitudes::real(0.6, 0.8);
    let target = LogicalAmplitudes::real(0.8, 0.6);
    let reference = run_nondestructive_csign(control, target, AcceptPolicy::FeedForward).unwrap();
    assert_same_branches(&run, &reference);
    assert!((run.accepted_probability - 0.25).abs() < 1e-12);
    assert!((run.total_probability() - 1.0).abs() < 1e-12);

    for (control, target) in [
        (LogicalAmplitudes::one(), LogicalAmplitudes::one()),
        (LogicalAmplitudes::from_bloch(0.3, 2.2), LogicalAmplitudes::from_bloch(2.5, -0.7)),
    ] {
        let run = execute(&with_inputs(&c, &[control, target])).unwrap();
        assert_same_branches(&run, &run_nondestructive_csign(control, target, AcceptPolicy::FeedForward).unwrap());
    }
}

#[test]
fn shipped_files_round_trip() {
    for src in [FIG1, FIG2] {
        let c = parse(src).unwrap();
        let text = c.to_string();
        assert_eq!(parse(&text).unwrap(), c);
        assert_eq!(parse(&text).unwrap().to_string(), text);
        assert!(!text.contains('#'));
    }
}

#[test]
fn errors_point_into_the_source() {
    let cases = [
        "modes 2\nket |1,0>\nbs 1 3",
        "modes 2 labels a\n",
        "modes 2\nket |1,0,0>",
        "modes 2\ndetect 1 as d\npostselect d = 1",
        "modes 2\ndetect 1 as d\npostselect d == 1 && e == 0",
        "modes 2\nbell psi* on 1 2 3 4",
        "modes 2\n\n   frobnicate 1 2",
        "modes 2\nbs 1 2 matrix 1 0 1 0 0 0 1 0",
    ];
    for src in cases {
        let e = parse(src).unwrap_err();
        let line = src.lines().nth(e.line - 1).unwrap_or_else(|| panic!("line {} outside {src:?}", e.line));
        assert!(e.column >= 1 && e.column <= line.chars().count() + 1, "{e} in {src:?}");
        if !e.token.is_empty() {
            let at: String = line.chars().skip(e.column - 1).collect();
            assert!(at.starts_with(&e.token), "{e:?} in {src:?}");
        }
    }
    assert_eq!(parse("modes 2\nbs 1 2 matrix 1 0 1 0 0 0 1 0").unwrap_err().kind, ErrorKind::Semantic);
}
