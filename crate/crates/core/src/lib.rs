//! Simulation and design of single-sideband time-modulated phased arrays driven by
//! trapezoidal bipolar switching sequences.
//!
//! - [`waveform`]: the periodic trapezoidal pulse, its sine series, and the
//!   composite waveform that cancels multiples of the third harmonic.
//! - [`harmonics`]: harmonic index sets and per-element dynamic excitations.
//! - [`array`]: uniform linear array patterns, steering and directivity.
//! - [`metrics`]: 5th-harmonic suppression, efficiencies and the rise-time solver.
//! - [`timedomain`]: sampled two-branch feed signals checked against the closed form.
//! - [`cli`]: the `tmpa` command-line front end.

pub mod array;
pub mod cli;
pub mod error;
pub mod harmonics;
pub mod metrics;
pub mod timedomain;
pub mod waveform;

pub use array::{ArrayConfig, Directivity, PatternResult};
pub use error::{Error, Result};
pub use harmonics::{Band, ExcitationSet, HarmonicKind, HarmonicSet};
pub use metrics::{DesignOutcome, EfficiencyReport, SweepRow};
pub use timedomain::{Sampling, SpectralComparison};
pub use waveform::PulseSpec;
