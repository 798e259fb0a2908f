//! Serial measure-relax cycle.
//!
//! One bit takes a bit time `T_b`: a projective position measurement of
//! duration `t_m`, then a relaxation window `T_b - t_m` in which the dot pair
//! must return to its ground state before the next measurement.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::DeviceParams;
use crate::units::HBAR_EV_S;

/// Generator behind every simulated measurement. 256-bit key, 64-bit stream
/// selector.
pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Seed for the `index`-th child of `parent`, drawn from a dedicated ChaCha
/// stream so children never overlap the parent's own draws.
pub fn derive_seed(parent: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(parent);
    rng.set_stream(index.wrapping_add(1));
    rng.next_u64()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingConfig {
    /// Bit time `T_b` in seconds.
    pub bit_time: f64,
    /// Measurement duration `t_m` in seconds.
    pub measure_time: f64,
    pub num_bits: usize,
}

impl TimingConfig {
    pub fn new(bit_time: f64, measure_time: f64, num_bits: usize) -> Result<Self> {
        let t = Self {
            bit_time,
            measure_time,
            num_bits,
        };
        t.check()?;
        Ok(t)
    }

    /// Timing with `t_m = T₁/20` and `T_b = 8·T₁`, which satisfies the default
    /// strictness for both shipped device presets.
    pub fn relaxed_for(device: &DeviceParams, num_bits: usize) -> Self {
        Self {
            bit_time: 8.0 * device.t1(),
            measure_time: device.t1() / 20.0,
            num_bits,
        }
    }

    fn check(&self) -> Result<()> {
        if self.num_bits == 0 {
            return Err(Error::Config("bit count must be at least 1".into()));
        }
        if !(self.measure_time.is_finite() && self.bit_time.is_finite()) {
            return Err(Error::Config("timing values must be finite".into()));
        }
        if !(self.measure_time > 0.0 && self.measure_time < self.bit_time) {
            return Err(Error::Config(format!(
                "need 0 < t_m < T_b, got t_m = {:e} s, T_b = {:e} s",
                self.measure_time, self.bit_time
            )));
        }
        Ok(())
    }

    /// Relaxation window `T_b - t_m`.
    pub fn relax_window(&self) -> f64 {
        self.bit_time - self.measure_time
    }

    /// Total acquisition time `N·T_b`.
    pub fn duration(&self) -> f64 {
        self.num_bits as f64 * self.bit_time
    }
}

/// Factors that turn the qualitative timing inequalities into checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingStrictness {
    /// Require `t_m ≤ T₁ / measure_fraction`.
    pub measure_fraction: f64,
    /// Require `T_b - t_m ≥ relax_multiple · T₁`.
    pub relax_multiple: f64,
    /// Require `T_b ≥ zeno_multiple · πħ/γ`.
    pub zeno_multiple: f64,
}

impl Default for TimingStrictness {
    fn default() -> Self {
        Self {
            measure_fraction: 10.0,
            relax_multiple: 5.0,
            zeno_multiple: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    /// Measurement must be short against T₁ so the measured state cannot
    /// relax and be re-projected mid-measurement.
    MeasureWindow,
    /// The relaxation window must be long against T₁.
    RelaxWindow,
    /// Bit time must be long against the tunneling time πħ/γ (Zeno freezing).
    ZenoGuard,
    /// Bit time at or below T₁, i.e. at or beyond the quoted maximum bit rate.
    MinPeriod,
}

impl Constraint {
    pub fn id(&self) -> &'static str {
        match self {
            Constraint::MeasureWindow => "measure-window",
            Constraint::RelaxWindow => "relax-window",
            Constraint::ZenoGuard => "zeno-guard",
            Constraint::MinPeriod => "min-period",
        }
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub constraint: Constraint,
    pub message: String,
    /// Measured quantity over its limit, oriented so values above 1 pass for
    /// lower bounds and fail for upper bounds (see `message`).
    pub measured_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingReport {
    pub ok: bool,
    pub violations: Vec<Violation>,
}

impl TimingReport {
    pub fn has(&self, constraint: Constraint) -> bool {
        self.violations.iter().any(|v| v.constraint == constraint)
    }
}

/// Tunneling time scale `πħ/γ` in seconds.
pub fn tunneling_time(gamma: f64) -> f64 {
    PI * HBAR_EV_S / gamma
}

pub fn validate_timing(timing: &TimingConfig, device: &DeviceParams) -> TimingReport {
    validate_timing_with(timing, device, &TimingStrictness::default())
}

/// Checks timing against the device's relaxation and tunneling scales.
/// Every failed check is reported; none aborts.
pub fn validate_timing_with(
    timing: &TimingConfig,
    device: &DeviceParams,
    strictness: &TimingStrictness,
) -> TimingReport {
    let t1 = device.t1();
    let mut violations = Vec::new();

    let max_measure = t1 / strictness.measure_fraction;
    if timing.measure_time > max_measure {
        violations.push(Violation {
            constraint: Constraint::MeasureWindow,
            message: format!(
                "t_m = {:e} s exceeds T1/{} = {:e} s",
                timing.measure_time, strictness.measure_fraction, max_measure
            ),
            measured_ratio: timing.measure_time / max_measure,
        });
    }

    let min_relax = strictness.relax_multiple * t1;
    if timing.relax_window() < min_relax {
        violations.push(Violation {
            constraint: Constraint::RelaxWindow,
            message: format!(
                "T_b - t_m = {:e} s is below {}·T1 = {:e} s",
                timing.relax_window(),
                strictness.relax_multiple,
                min_relax
            ),
            measured_ratio: timing.relax_window() / min_relax,
        });
    }

    let min_bit_time = strictness.zeno_multiple * tunneling_time(device.gamma());
    if timing.bit_time < min_bit_time {
        violations.push(Violation {
            constraint: Constraint::ZenoGuard,
            message: format!(
                "T_b = {:e} s is below {}·πħ/γ = {:e} s; repeated measurement may freeze the charge",
                timing.bit_time, strictness.zeno_multiple, min_bit_time
            ),
            measured_ratio: timing.bit_time / min_bit_time,
        });
    }

    if timing.bit_time <= t1 {
        violations.push(Violation {
            constraint: Constraint::MinPeriod,
            message: format!(
                "T_b = {:e} s does not exceed T1 = {:e} s; the ground state cannot be restored between bits",
                timing.bit_time, t1
            ),
            measured_ratio: timing.bit_time / t1,
        });
    }

    TimingReport {
        ok: violations.is_empty(),
        violations,
    }
}

/// Upper bit rate `1/T₁` in bits per second.
pub fn max_bit_rate(device: &DeviceParams) -> f64 {
    1.0 / device.t1()
}

/// One projective measurement: `true` ("1") with probability `p1`.
#[inline]
pub fn sample_bit<R: Rng + ?Sized>(probabilities: (f64, f64), rng: &mut R) -> bool {
    rng.random::<f64>() < probabilities.1
}

/// Everything needed to regenerate a stream bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenerationInfo {
    pub seed: u64,
    /// Detuning in eV.
    pub detuning: f64,
    pub device: DeviceParams,
    pub timing: TimingConfig,
    pub ideal_relaxation: bool,
}

/// Ordered bits. Streams produced by [`generate_stream`] carry their
/// generation parameters; streams read from disk or derived by logic
/// operations do not.
#[derive(Debug, Clone, PartialEq)]
pub struct BitStream {
    pub bits: Vec<bool>,
    pub origin: Option<GenerationInfo>,
}

impl BitStream {
    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits, origin: None }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    /// Empirical mean; zero for an empty stream.
    pub fn mean(&self) -> f64 {
        if self.bits.is_empty() {
            0.0
        } else {
            self.ones() as f64 / self.bits.len() as f64
        }
    }

    /// The mean the device was programmed for, when known.
    pub fn programmed_mean(&self) -> Option<f64> {
        let info = self.origin.as_ref()?;
        info.device.mean(info.detuning).ok()
    }
}

/// Carryover probability `exp(-(T_b - t_m)/T₁)` that the charge is still in
/// its measured state at the next measurement.
pub fn carryover_probability(timing: &TimingConfig, device: &DeviceParams) -> f64 {
    (-timing.relax_window() / device.t1()).exp()
}

/// Runs `timing.num_bits` measure-relax cycles.
///
/// With `ideal_relaxation` every measurement sees a freshly relaxed ground
/// state. Otherwise relaxation succeeds with probability
/// `1 - exp(-(T_b - t_m)/T₁)`; on failure the next measurement repeats the
/// previous outcome.
pub fn generate_stream(
    device: &DeviceParams,
    detuning: f64,
    timing: &TimingConfig,
    seed: u64,
    ideal_relaxation: bool,
) -> Result<BitStream> {
    timing.check()?;
    let probabilities = device.probabilities(detuning)?;
    let mut rng = stream_rng(seed);
    let n = timing.num_bits;
    let mut bits = Vec::with_capacity(n);

    if ideal_relaxation {
        bits.extend((0..n).map(|_| sample_bit(probabilities, &mut rng)));
    } else {
        let relax_probability = -(-timing.relax_window() / device.t1()).exp_m1();
        // Prepared in the ground state at t = 0.
        let mut previous = sample_bit(probabilities, &mut rng);
        bits.push(previous);
        for _ in 1..n {
            if rng.random::<f64>() < relax_probability {
                previous = sample_bit(probabilities, &mut rng);
            }
            bits.push(previous);
        }
    }

    Ok(BitStream {
        bits,
        origin: Some(GenerationInfo {
            seed,
            detuning,
            device: *device,
            timing: *timing,
            ideal_relaxation,
        }),
    })
}
