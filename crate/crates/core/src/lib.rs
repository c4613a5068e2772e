//! Photon statistics of driven-dissipative emitters.
//!
//! The crate covers four models: resonance fluorescence (`rf`), the
//! anharmonic oscillator (`ao`), the Jaynes-Cummings model (`jc`) and
//! microcavity polaritons (`pol`). It offers:
//!
//! * [`fockspace`] builds operators, Hamiltonians and Liouvillians.
//! * [`steady`] solves for steady states, correlators, the vanishing-drive
//!   hierarchy and the two-excitation wavefunction.
//! * [`mixer`] handles homodyne admixture and Gaussian states.
//! * [`analytic`] holds closed forms and feature finders.
//! * [`atlas`] runs sweeps, verification suites and writes results.

pub mod analytic;
pub mod atlas;
pub mod error;
pub mod fockspace;
pub mod mixer;
pub mod steady;

pub use error::{Error, Result};
