use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use fockgate::circuit::{execute, parse};
use fockgate::dual_rail::LogicalAmplitudes;
use fockgate::protocols::{run_destructive_csign, run_nondestructive_csign, run_quantum_encoder, AcceptPolicy};
use fockgate::report::RunReport;
use fockgate::{Amplitude, Error};

const EXIT_USAGE: u8 = 2;
const EXIT_PARSE: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

/// Simulate dual-rail linear-optical gates photon by photon.
#[derive(Parser)]
#[command(name = "fockgate", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Destructive conditional sign flip: the control photon is consumed.
    CsignDestructive {
        #[command(flatten)]
        control: ControlArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Nondestructive conditional sign flip built from the encoder and the
    /// destructive gate.
    CsignNondestructive {
        #[command(flatten)]
        control: ControlArgs,
        #[command(flatten)]
        target: TargetArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Copy the basis states of a qubit onto an n-qubit register.
    Encoder {
        /// Input qubit as two `re,im` amplitudes for |0> and |1>.
        #[arg(long, num_args = 2, value_names = ["A0", "A1"], allow_negative_numbers = true, conflicts_with = "input_bloch")]
        input: Option<Vec<String>>,
        /// Input qubit as Bloch angles `theta,phi`.
        #[arg(long, value_name = "THETA,PHI", allow_negative_numbers = true)]
        input_bloch: Option<String>,
        /// Number of qubits in the register.
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run a circuit file.
    Run {
        file: PathBuf,
        /// Print the JSON report instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Run the seeded invariant sweep and print the coefficient comparison.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random draws per check.
        #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
    },
}

#[derive(Args)]
struct ControlArgs {
    /// Control qubit as two `re,im` amplitudes for |0> and |1> [default: 0,0 1,0].
    #[arg(long, num_args = 2, value_names = ["A0", "A1"], allow_negative_numbers = true, conflicts_with = "control_bloch")]
    control: Option<Vec<String>>,
    /// Control qubit as Bloch angles `theta,phi`.
    #[arg(long, value_name = "THETA,PHI", allow_negative_numbers = true)]
    control_bloch: Option<String>,
}

#[derive(Args)]
struct TargetArgs {
    /// Target qubit as two `re,im` amplitudes for |0> and |1> [default: (|0> + |1>)/√2].
    #[arg(long, num_args = 2, value_names = ["A0", "A1"], allow_negative_numbers = true, conflicts_with = "target_bloch")]
    target: Option<Vec<String>>,
    /// Target qubit as Bloch angles `theta,phi`.
    #[arg(long, value_name = "THETA,PHI", allow_negative_numbers = true)]
    target_bloch: Option<String>,
}

#[derive(Args)]
struct OutputArgs {
    /// Which detector patterns are accepted.
    #[arg(long, default_value = "strict", value_parser = ["strict", "feedforward"])]
    policy: String,
    /// Print the JSON report instead of a table.
    #[arg(long)]
    json: bool,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: EXIT_USAGE, message: message.into() }
    }

    fn invariant(e: Error) -> Self {
        Failure { code: EXIT_INVARIANT, message: format!("internal invariant violated: {e}") }
    }
}

fn parse_pair(s: &str, what: &str) -> Result<(f64, f64), Failure> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| Failure::usage(format!("{what}: expected `x,y`, got `{s}`")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| Failure::usage(format!("{what}: `{}` is not a finite number", t.trim())))
    };
    Ok((num(a)?, num(b)?))
}

fn qubit(
    name: &str,
    pairs: Option<&[String]>,
    bloch: Option<&str>,
    default: LogicalAmplitudes,
) -> Result<LogicalAmplitudes, Failure> {
    let q = match (pairs, bloch) {
        (Some(p), _) => {
            let (r0, i0) = parse_pair(&p[0], name)?;
            let (r1, i1) = parse_pair(&p[1], name)?;
            LogicalAmplitudes::new(Amplitude::new(r0, i0), Amplitude::new(r1, i1))
        }
        (None, Some(b)) => {
            let (theta, phi) = parse_pair(b, name)?;
            LogicalAmplitudes::from_bloch(theta, phi)
        }
        (None, None) => default,
    };
    let norm = q.norm_squared().sqrt();
    if norm == 0.0 {
        return Err(Failure::usage(format!("{name}: the zero vector is not a qubit state")));
    }
    let deviation = (norm - 1.0).abs();
    if deviation <= 1e-12 {
        return Ok(q);
    }
    if deviation <= 1e-6 {
        eprintln!("warning: {name} has norm {norm}, normalizing");
        return q.normalized().map_err(|e| Failure::usage(format!("{name}: {e}")));
    }
    Err(Failure::usage(format!(
        "{name} has norm {norm}; amplitudes must be normalized to within 1e-6"
    )))
}

fn control(args: &ControlArgs) -> Result<LogicalAmplitudes, Failure> {
    qubit("control", args.control.as_deref(), args.control_bloch.as_deref(), LogicalAmplitudes::one())
}

fn target(args: &TargetArgs) -> Result<LogicalAmplitudes, Failure> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    qubit("target", args.target.as_deref(), args.target_bloch.as_deref(), LogicalAmplitudes::real(h, h))
}

fn policy(args: &OutputArgs) -> AcceptPolicy {
    args.policy.parse().expect("clap restricts the values")
}

fn elapsed_ms(start: Instant) -> f64 {
    (start.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

// A closed pipe (`fockgate verify | head`) is not an error.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|_| out.flush());
}

fn print_report(report: &RunReport, json: bool) {
    if json {
        emit(&format!("{}\n", report.to_json()));
    } else {
        emit(&report.to_table());
    }
}

fn command_line() -> String {
    std::iter::once("fockgate".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let echo = command_line();
    match cli.command {
        Command::CsignDestructive { control: c, target: t, output } => {
            let (c, t, p) = (control(&c)?, target(&t)?, policy(&output));
            let start = Instant::now();
            let result = run_destructive_csign(c, t, p).map_err(Failure::invariant)?;
            let report = RunReport::from_gate(&echo, &[("control", c), ("target", t)], p, &result, elapsed_ms(start));
            print_report(&report, output.json);
        }
        Command::CsignNondestructive { control: c, target: t, output } => {
            let (c, t, p) = (control(&c)?, target(&t)?, policy(&output));
            let start = Instant::now();
            let result = run_nondestructive_csign(c, t, p).map_err(Failure::invariant)?;
            let report = RunReport::from_gate(&echo, &[("control", c), ("target", t)], p, &result, elapsed_ms(start));
            print_report(&report, output.json);
        }
        Command::Encoder { input, input_bloch, n, output } => {
            let q = qubit("input", input.as_deref(), input_bloch.as_deref(), LogicalAmplitudes::real(0.6, 0.8))?;
            if !(2..=fockgate::protocols::MAX_ENCODER_COPIES).contains(&n) {
                return Err(Failure::usage(format!(
                    "--n must be between 2 and {}",
                    fockgate::protocols::MAX_ENCODER_COPIES
                )));
            }
            let p = policy(&output);
            let start = Instant::now();
            let result = run_quantum_encoder(q, n, p).map_err(Failure::invariant)?;
            let report = RunReport::from_gate(&echo, &[("input", q)], p, &result, elapsed_ms(start));
            print_report(&report, output.json);
        }
        Command::Run { file, json } => {
            let source = std::fs::read_to_string(&file)
                .map_err(|e| Failure::usage(format!("cannot read {}: {e}", file.display())))?;
            let circuit = parse(&source).map_err(|e| Failure {
                code: EXIT_PARSE,
                message: format!("{}:{e}", file.display()),
            })?;
            let start = Instant::now();
            let result = execute(&circuit).map_err(Failure::invariant)?;
            let report = RunReport::from_circuit(&echo, &circuit, &result, elapsed_ms(start));
            print_report(&report, json);
        }
        Command::Verify { seed, samples } => {
            let report = fockgate::verify::run_checks(seed, samples as usize).map_err(|e| Failure::usage(e.to_string()))?;
            emit(&report.to_string());
            if !report.all_passed() {
                return Err(Failure { code: EXIT_INVARIANT, message: "some checks failed".into() });
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
