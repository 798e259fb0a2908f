//! Simulator for a tunable random bit generator built from a single mobile
//! charge on a double quantum dot (DQD).
//!
//! The crate is split along the device's life cycle:
//!
//! - [`physics`]: closed-form two-level eigensystem, Born-rule and thermal
//!   measurement probabilities, and the detuning controls.
//! - [`sampling`]: the serial measure-relax cycle that turns those
//!   probabilities into reproducible bit streams, plus timing checks.
//! - [`encoding`]: the `ascii` and `packed` on-disk bit formats.
//! - [`energy`]: relaxation energies, average dissipation and power, and the
//!   device preset registry.
//! - [`stats`]: lightweight statistical quality checks and convergence runs.
//! - [`stochastic`]: unipolar stochastic-computing arithmetic on streams.
//!
//! Energies are in eV, times in seconds, charges in coulombs.

pub mod encoding;
pub mod energy;
pub mod error;
pub mod physics;
pub mod sampling;
pub mod stats;
pub mod stochastic;
pub mod units;

pub use error::{Error, Result};
pub use physics::{DeviceParams, GroundState, StatisticsMode};
pub use sampling::{BitStream, TimingConfig, TimingReport};
