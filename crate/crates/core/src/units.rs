//! Physical constants. Energies throughout the crate are expressed in eV.

/// Reduced Planck constant in eV·s.
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;

/// Elementary charge in coulombs (exact SI).
pub const ELEMENTARY_CHARGE_C: f64 = 1.602_176_634e-19;

/// Joules per electronvolt (exact SI).
pub const JOULES_PER_EV: f64 = 1.602_176_634e-19;

/// Boltzmann constant in eV/K.
pub const BOLTZMANN_EV_PER_K: f64 = 8.617_333_262e-5;

/// Default thermal energy for cryogenic (metal-dot) operation, about 0.1 K.
pub const DEFAULT_CRYO_KT_EV: f64 = 8.617e-6;

pub const MILLI_EV: f64 = 1e-3;
pub const NANOSECOND: f64 = 1e-9;
pub const PICOSECOND: f64 = 1e-12;
pub const NANOMETER: f64 = 1e-9;

/// Converts an energy in eV to joules.
#[inline]
pub fn ev_to_joules(ev: f64) -> f64 {
    ev * JOULES_PER_EV
}
