//! Exact simulation of dual-rail linear-optical circuits in the photon-number
//! basis, and a teleportation-based conditional sign-flip gate built on it.
//!
//! The crate is organized bottom-up:
//!
//! * [`fock`]: sparse multimode Fock states.
//! * [`optics`]: beam splitters and general mode unitaries.
//! * [`dual_rail`]: logical qubits on pairs of modes, Bell states, Pauli
//!   corrections.
//! * [`measurement`]: photon counting and post-selection.
//! * [`protocols`]: the destructive and nondestructive gates, the quantum
//!   encoder and the teleportation coefficient table.
//! * [`circuit`]: a small line-oriented language for writing such circuits
//!   down, with a parser, formatter and interpreter.
//! * [`report`]: serializable run reports.
//! * [`verify`]: a seeded invariant sweep.
//!
//! ```
//! use fockgate::dual_rail::LogicalAmplitudes;
//! use fockgate::protocols::{run_destructive_csign, AcceptPolicy};
//!
//! let target = LogicalAmplitudes::real(0.6, 0.8);
//! let run = run_destructive_csign(LogicalAmplitudes::one(), target, AcceptPolicy::Strict)?;
//! assert!((run.accepted_probability - 0.25).abs() < 1e-12);
//! let out = run.output.unwrap();
//! assert!((out[1].re + 0.8).abs() < 1e-12);
//! # Ok::<(), fockgate::Error>(())
//! ```

pub mod circuit;
pub mod dual_rail;
pub mod error;
pub mod fock;
pub mod measurement;
pub mod optics;
pub mod protocols;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use fock::{Amplitude, FockState, Occupation};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/fock-states.md")]
    mod fock_states {}
    #[doc = include_str!("../../../book/src/beam-splitters.md")]
    mod beam_splitters {}
    #[doc = include_str!("../../../book/src/dual-rail.md")]
    mod dual_rail {}
    #[doc = include_str!("../../../book/src/measurement.md")]
    mod measurement {}
    #[doc = include_str!("../../../book/src/destructive-gate.md")]
    mod destructive_gate {}
    #[doc = include_str!("../../../book/src/nondestructive-gate.md")]
    mod nondestructive_gate {}
    #[doc = include_str!("../../../book/src/teleportation.md")]
    mod teleportation {}
    #[doc = include_str!("../../../book/src/circuit-language.md")]
    mod circuit_language {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
