//! Closed-form physics of one mobile charge on a coupled pair of dots.
//!
//! In the localized basis `{|0>, |1>}` the Hamiltonian is
//!
//! ```text
//!     H = [[-Δ/2, -γ ],
//!          [ -γ , +Δ/2]]
//! ```
//!
//! with tunneling energy `γ > 0` and detuning `Δ = <1|H|1> - <0|H|0>`.
//! A position measurement of the relaxed ground state yields "1" with
//! probability `p1`, which is also the stream mean and is tuned by `Δ`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::{DEFAULT_CRYO_KT_EV, ELEMENTARY_CHARGE_C};

/// Real symmetric 2×2 matrix, row-major, in eV.
pub type Matrix2 = [[f64; 2]; 2];

/// Source of randomness in a measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticsMode {
    /// Born-rule collapse of the coherent ground state (molecular dots).
    QuantumGroundState,
    /// Equilibrium occupation of the localized states (metal dots).
    ThermalBoltzmann,
}

/// Physical constants of one device.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviceParams {
    gamma: f64,
    t1: f64,
    dot_separation: [f64; 3],
    mobile_charge: f64,
    temperature: f64,
    statistics_mode: StatisticsMode,
}

impl DeviceParams {
    /// A quantum-mode device with tunneling energy `gamma_ev` and relaxation
    /// time `t1_s`. Charge defaults to the elementary charge.
    pub fn new(gamma_ev: f64, t1_s: f64) -> Result<Self> {
        check_gamma(gamma_ev)?;
        if !(t1_s.is_finite() && t1_s > 0.0) {
            return Err(Error::InvalidDevice(format!(
                "relaxation time must be positive, got {t1_s}"
            )));
        }
        Ok(Self {
            gamma: gamma_ev,
            t1: t1_s,
            dot_separation: [0.0; 3],
            mobile_charge: ELEMENTARY_CHARGE_C,
            temperature: 0.0,
            statistics_mode: StatisticsMode::QuantumGroundState,
        })
    }

    /// Vector from dot 0 to dot 1, in metres.
    pub fn with_dot_separation(mut self, separation_m: [f64; 3]) -> Result<Self> {
        if separation_m.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDevice("dot separation must be finite".into()));
        }
        self.dot_separation = separation_m;
        Ok(self)
    }

    pub fn with_mobile_charge(mut self, charge_c: f64) -> Result<Self> {
        if !(charge_c.is_finite() && charge_c != 0.0) {
            return Err(Error::InvalidDevice(format!(
                "mobile charge must be finite and nonzero, got {charge_c}"
            )));
        }
        self.mobile_charge = charge_c;
        Ok(self)
    }

    /// Switches to Boltzmann statistics at thermal energy `kt_ev`.
    pub fn thermal(mut self, kt_ev: f64) -> Result<Self> {
        if !(kt_ev.is_finite() && kt_ev > 0.0) {
            return Err(Error::InvalidDevice(format!(
                "thermal mode needs kT > 0, got {kt_ev}"
            )));
        }
        self.temperature = kt_ev;
        self.statistics_mode = StatisticsMode::ThermalBoltzmann;
        Ok(self)
    }

    /// Switches to Born-rule statistics. The stored temperature is kept but unused.
    pub fn quantum(mut self) -> Self {
        self.statistics_mode = StatisticsMode::QuantumGroundState;
        self
    }

    /// Sets the statistics mode, using `kt_ev` (or the cryogenic default)
    /// when the mode is thermal.
    pub fn with_mode(self, mode: StatisticsMode, kt_ev: Option<f64>) -> Result<Self> {
        match mode {
            StatisticsMode::QuantumGroundState => Ok(self.quantum()),
            StatisticsMode::ThermalBoltzmann => {
                let kt = kt_ev
                    .or((self.temperature > 0.0).then_some(self.temperature))
                    .unwrap_or(DEFAULT_CRYO_KT_EV);
                self.thermal(kt)
            }
        }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn dot_separation(&self) -> [f64; 3] {
        self.dot_separation
    }

    pub fn mobile_charge(&self) -> f64 {
        self.mobile_charge
    }

    /// Thermal energy kT in eV; zero unless set.
    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn statistics_mode(&self) -> StatisticsMode {
        self.statistics_mode
    }

    /// Measurement probabilities `(p0, p1)` at detuning `delta` under this
    /// device's statistics mode.
    pub fn probabilities(&self, delta: f64) -> Result<(f64, f64)> {
        match self.statistics_mode {
            StatisticsMode::QuantumGroundState => {
                let gs = ground_state(self.gamma, delta)?;
                Ok((gs.p0, gs.p1))
            }
            StatisticsMode::ThermalBoltzmann => thermal_probabilities(delta, self.temperature),
        }
    }

    /// Stream mean (probability of "1") at detuning `delta`.
    pub fn mean(&self, delta: f64) -> Result<f64> {
        self.probabilities(delta).map(|(_, p1)| p1)
    }

    /// Detuning that programs the stream mean to `target_mean` under this
    /// device's statistics mode.
    pub fn programmed_detuning(&self, target_mean: f64) -> Result<f64> {
        match self.statistics_mode {
            StatisticsMode::QuantumGroundState => detuning_for_mean(self.gamma, target_mean),
            StatisticsMode::ThermalBoltzmann => {
                thermal_detuning_for_mean(self.temperature, target_mean)
            }
        }
    }
}

/// Ground-state summary of the two-level Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroundState {
    pub e1: f64,
    pub e2: f64,
    /// Ratio of the |0> to |1> amplitude in the unnormalized ground state.
    pub alpha: f64,
    pub amp0: f64,
    pub amp1: f64,
    pub p0: f64,
    pub p1: f64,
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma.is_nan() || gamma <= 0.0 {
        return Err(Error::InvalidDevice(format!(
            "tunneling energy must be positive (uncoupled dots have no tunable ground state), got {gamma}"
        )));
    }
    if !gamma.is_finite() {
        return Err(Error::Domain(format!("tunneling energy must be finite, got {gamma}")));
    }
    Ok(())
}

fn check_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}

/// Hamiltonian in the localized basis.
pub fn hamiltonian_matrix(gamma: f64, delta: f64) -> Result<Matrix2> {
    check_gamma(gamma)?;
    check_finite("detuning", delta)?;
    Ok([[-delta / 2.0, -gamma], [-gamma, delta / 2.0]])
}

/// Closed-form ground state.
pub fn ground_state(gamma: f64, delta: f64) -> Result<GroundState> {
    check_gamma(gamma)?;
    check_finite("detuning", delta)?;

    // splitting = sqrt(4γ² + Δ²) = E2 - E1
    let splitting = (2.0 * gamma).hypot(delta);
    // Two algebraically equal forms of α; pick the one free of cancellation.
    let alpha = if delta >= 0.0 {
        (delta + splitting) / (2.0 * gamma)
    } else {
        2.0 * gamma / (splitting - delta)
    };
    let norm = alpha.hypot(1.0);
    let amp0 = alpha / norm;
    let amp1 = 1.0 / norm;
    let a2 = alpha * alpha;
    let p0 = a2 / (a2 + 1.0);
    let p1 = 1.0 / (a2 + 1.0);

    Ok(GroundState {
        e1: -0.5 * splitting,
        e2: 0.5 * splitting,
        alpha,
        amp0,
        amp1,
        p0,
        p1,
    })
}

/// Ground state by direct numeric diagonalization of [`hamiltonian_matrix`].
///
/// Uses only the generic matrix entries: eigenvalues from the characteristic
/// polynomial, eigenvector from the nullspace of `H - E1·I`. Serves as an
/// independent check on [`ground_state`].
pub fn eigensystem_numeric_oracle(gamma: f64, delta: f64) -> Result<GroundState> {
    let h = hamiltonian_matrix(gamma, delta)?;
    let (a, b, d) = (h[0][0], h[0][1], h[1][1]);

    // λ² - tr·λ + det = 0
    let half_trace = 0.5 * (a + d);
    let radius = (0.5 * (a - d)).hypot(b);
    let e1 = half_trace - radius;
    let e2 = half_trace + radius;

    // Each row of (H - e1·I) is orthogonal to the eigenvector; use the
    // better-conditioned row.
    let row0 = (a - e1, b);
    let row1 = (b, d - e1);
    let (r, s) = if row0.0.hypot(row0.1) >= row1.0.hypot(row1.1) {
        row0
    } else {
        row1
    };
    let (mut v0, mut v1) = (-s, r);
    let norm = v0.hypot(v1);
    v0 /= norm;
    v1 /= norm;
    if v0 + v1 < 0.0 {
        v0 = -v0;
        v1 = -v1;
    }

    Ok(GroundState {
        e1,
        e2,
        alpha: v0 / v1,
        amp0: v0,
        amp1: v1,
        p0: v0 * v0,
        p1: v1 * v1,
    })
}

/// Mean of the ground-state measurement outcome, i.e. `p1`.
pub fn mean_value(gamma: f64, delta: f64) -> Result<f64> {
    ground_state(gamma, delta).map(|gs| gs.p1)
}

fn check_target_mean(target_mean: f64) -> Result<()> {
    if target_mean == 0.0 || target_mean == 1.0 {
        return Err(Error::UnreachableBias(target_mean));
    }
    if !(target_mean > 0.0 && target_mean < 1.0) {
        return Err(Error::Domain(format!(
            "target mean must lie in (0, 1), got {target_mean}"
        )));
    }
    Ok(())
}

/// Detuning `Δ = γ(1 - 2x̄) / sqrt(x̄(1 - x̄))` that yields ground-state mean `x̄`.
pub fn detuning_for_mean(gamma: f64, target_mean: f64) -> Result<f64> {
    check_gamma(gamma)?;
    check_target_mean(target_mean)?;
    let m = target_mean;
    Ok(gamma * (1.0 - 2.0 * m) / (m * (1.0 - m)).sqrt())
}

/// Detuning from an applied field: `Δ = -q (E · a)`, returned in eV.
pub fn detuning_from_field(e_field_vpm: [f64; 3], dot_separation_m: [f64; 3], charge_c: f64) -> Result<f64> {
    if dot_separation_m.iter().all(|&c| c == 0.0) {
        return Err(Error::Domain("dot separation vector must be nonzero".into()));
    }
    let dot: f64 = e_field_vpm
        .iter()
        .zip(dot_separation_m.iter())
        .map(|(e, a)| e * a)
        .sum();
    // q·V in joules divided by q_e gives eV.
    let delta = -(charge_c / ELEMENTARY_CHARGE_C) * dot;
    check_finite("field detuning", delta)?;
    Ok(delta)
}

/// Detuning from an interdot voltage: `Δ = qV`, returned in eV.
pub fn detuning_from_voltage(voltage_v: f64, charge_c: f64) -> Result<f64> {
    let delta = (charge_c / ELEMENTARY_CHARGE_C) * voltage_v;
    check_finite("voltage detuning", delta)?;
    Ok(delta)
}

/// Two-state Boltzmann occupation of the localized levels `∓Δ/2`.
///
/// Returns `(p0, p1)` with `p1 = 1 / (1 + exp(Δ/kT))`.
pub fn thermal_probabilities(delta: f64, kt: f64) -> Result<(f64, f64)> {
    if !(kt.is_finite() && kt > 0.0) {
        return Err(Error::Domain(format!("kT must be positive, got {kt}")));
    }
    check_finite("detuning", delta)?;
    let x = delta / kt;
    // Evaluate the smaller occupation directly to keep the tail accurate.
    let (p0, p1) = if x >= 0.0 {
        let p1 = 1.0 / (1.0 + x.exp());
        (1.0 - p1, p1)
    } else {
        let p0 = 1.0 / (1.0 + (-x).exp());
        (p0, 1.0 - p0)
    };
    Ok((p0, p1))
}

/// Inverse of [`thermal_probabilities`]: `Δ = kT ln((1 - x̄)/x̄)`.
pub fn thermal_detuning_for_mean(kt: f64, target_mean: f64) -> Result<f64> {
    if !(kt.is_finite() && kt > 0.0) {
        return Err(Error::Domain(format!("kT must be positive, got {kt}")));
    }
    check_target_mean(target_mean)?;
    Ok(kt * ((1.0 - target_mean) / target_mean).ln())
}
