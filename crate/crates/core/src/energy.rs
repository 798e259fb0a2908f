//! Energy dissipated by the relax half of each cycle, and the device presets.
//!
//! A measurement leaves the charge in `|0>` or `|1>` (energies `∓Δ/2`); relaxing
//! back to the ground state `E1` dissipates `ε0 = <0|H|0> - E1` or
//! `ε1 = <1|H|1> - E1`. Over many cycles the mean loss per bit is
//! `Ē = 2γ² / sqrt(4γ² + Δ²)`, at most `γ` (zero detuning).

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::{ground_state, DeviceParams};
use crate::units::{ev_to_joules, DEFAULT_CRYO_KT_EV, MILLI_EV, NANOMETER, PICOSECOND};

/// `(ε0, ε1)` in eV.
pub fn relaxation_energies(gamma: f64, delta: f64) -> Result<(f64, f64)> {
    let gs = ground_state(gamma, delta)?;
    let splitting = gs.e2 - gs.e1;
    Ok((0.5 * (splitting - delta), 0.5 * (splitting + delta)))
}

/// Ensemble-average dissipation per cycle in eV, in closed form.
pub fn avg_energy_dissipation(gamma: f64, delta: f64) -> Result<f64> {
    let gs = ground_state(gamma, delta)?;
    // Grouped so that Δ = 0 returns γ exactly.
    Ok(2.0 * gamma * (gamma / (gs.e2 - gs.e1)))
}

/// Average power in watts for `n_cycles` ground-state cycles completed in
/// `interval` seconds.
pub fn avg_power(gamma: f64, delta: f64, n_cycles: u64, interval: f64) -> Result<f64> {
    if !(interval.is_finite() && interval > 0.0) {
        return Err(Error::Domain(format!("interval must be positive, got {interval}")));
    }
    let per_cycle = avg_energy_dissipation(gamma, delta)?;
    Ok(ev_to_joules(per_cycle) * n_cycles as f64 / interval)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyReport {
    /// eV
    pub eps0: f64,
    /// eV
    pub eps1: f64,
    /// eV per cycle
    pub avg_dissipation: f64,
    /// W
    pub avg_power: f64,
    /// bits/s
    pub bit_rate: f64,
}

/// Energy accounting for `device` at `delta`, weighting the relaxation
/// energies by the device's own measurement statistics.
pub fn energy_report(device: &DeviceParams, delta: f64, bit_rate: f64) -> Result<EnergyReport> {
    if !(bit_rate.is_finite() && bit_rate >= 0.0) {
        return Err(Error::Domain(format!("bit rate must be non-negative, got {bit_rate}")));
    }
    let (eps0, eps1) = relaxation_energies(device.gamma(), delta)?;
    let (p0, p1) = device.probabilities(delta)?;
    let avg_dissipation = p0 * eps0 + p1 * eps1;
    Ok(EnergyReport {
        eps0,
        eps1,
        avg_dissipation,
        avg_power: ev_to_joules(avg_dissipation) * bit_rate,
        bit_rate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresetModel {
    Device(DeviceParams),
    /// Comparison-only row with published figures and no device physics.
    Reference { bit_rate: f64, avg_power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DevicePreset {
    pub name: &'static str,
    pub source: &'static str,
    pub model: PresetModel,
    /// Optional cap on the bit rate from readout electronics, in bits/s.
    pub readout_limited_rate: Option<f64>,
}

impl DevicePreset {
    pub fn device(&self) -> Option<&DeviceParams> {
        match &self.model {
            PresetModel::Device(d) => Some(d),
            PresetModel::Reference { .. } => None,
        }
    }

    pub fn with_readout_limited_rate(mut self, rate: f64) -> Result<Self> {
        if !(rate.is_finite() && rate > 0.0) {
            return Err(Error::Domain(format!("readout rate must be positive, got {rate}")));
        }
        self.readout_limited_rate = Some(rate);
        Ok(self)
    }
}

pub const MOLECULAR_DFA: &str = "molecular-dfa";
pub const METALLIC: &str = "metallic";
pub const CMOS_SNG_REFERENCE: &str = "cmos-sng-reference";

/// Tabulated metal-dot bit rate; T₁ is its reciprocal (6.67 ns).
const METALLIC_MAX_RATE: f64 = 150e6;

/// The immutable preset registry.
pub fn presets() -> &'static [DevicePreset] {
    static REGISTRY: OnceLock<Vec<DevicePreset>> = OnceLock::new();
    REGISTRY.get_or_init(|| {
        let molecular = DeviceParams::new(50.0 * MILLI_EV, PICOSECOND)
            .and_then(|d| d.with_dot_separation([0.67 * NANOMETER, 0.0, 0.0]))
            .expect("molecular preset is valid");
        let metallic = DeviceParams::new(0.5 * MILLI_EV, 1.0 / METALLIC_MAX_RATE)
            .and_then(|d| d.thermal(DEFAULT_CRYO_KT_EV))
            .expect("metallic preset is valid");
        vec![
            DevicePreset {
                name: MOLECULAR_DFA,
                source: "diferrocenyl acetylene mixed-valence molecule: a = 0.67 nm, γ ≈ 50 meV, T1 ≈ 1 ps; Born-rule statistics",
                model: PresetModel::Device(molecular),
                readout_limited_rate: None,
            },
            DevicePreset {
                name: METALLIC,
                source: "metal-dot cell: γ = 0.5 meV, T1 = 6.67 ns; Boltzmann statistics at kT = 8.617e-6 eV (~0.1 K)",
                model: PresetModel::Device(metallic),
                readout_limited_rate: None,
            },
            DevicePreset {
                name: CMOS_SNG_REFERENCE,
                source: "32-bit LFSR stochastic number generator, 65 nm CMOS at 100 MHz (comparison only)",
                model: PresetModel::Reference {
                    bit_rate: 100e6,
                    avg_power: 80.2e-6,
                },
                readout_limited_rate: None,
            },
        ]
    })
}

pub fn preset(name: &str) -> Result<DevicePreset> {
    presets()
        .iter()
        .find(|p| p.name == name)
        .copied()
        .ok_or_else(|| {
            let known: Vec<_> = presets().iter().map(|p| p.name).collect();
            Error::Config(format!("unknown preset {name:?}; known: {}", known.join(", ")))
        })
}

/// One figures-of-merit row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FomRow {
    pub name: String,
    /// Seconds; absent for reference rows.
    pub t1: Option<f64>,
    /// bits/s
    pub max_bit_rate: f64,
    /// W, at zero detuning
    pub max_avg_power: f64,
}

/// Maximum bit rate `1/T₁` (or the readout cap, if lower) and the power at
/// that rate with zero detuning, `rate · γ`.
pub fn figures_of_merit(preset: &DevicePreset) -> FomRow {
    match preset.model {
        PresetModel::Device(device) => {
            let physical = crate::sampling::max_bit_rate(&device);
            let rate = preset
                .readout_limited_rate
                .map_or(physical, |cap| cap.min(physical));
            FomRow {
                name: preset.name.to_string(),
                t1: Some(device.t1()),
                max_bit_rate: rate,
                max_avg_power: rate * ev_to_joules(device.gamma()),
            }
        }
        PresetModel::Reference {
            bit_rate,
            avg_power,
        } => FomRow {
            name: preset.name.to_string(),
            t1: None,
            max_bit_rate: bit_rate,
            max_avg_power: avg_power,
        },
    }
}
