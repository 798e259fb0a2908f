//! Statistical checks on generated streams and finite-N convergence runs.
//!
//! Four lightweight tests: frequency (χ², one degree of freedom), runs,
//! serial autocorrelation, and binary Shannon entropy. When the programmed
//! mean of a biased stream is known it replaces 0.5 as the null hypothesis,
//! so intentional bias is not reported as a defect.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::physics::DeviceParams;
use crate::sampling::{derive_seed, generate_stream, BitStream, TimingConfig};

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.96;

/// χ² critical value for one degree of freedom at 5%.
pub const CHI2_1DOF_95: f64 = 3.841_458_820_694_124;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamStats {
    pub n: usize,
    pub ones: usize,
    pub mean: f64,
    pub ci95_halfwidth: f64,
    pub shannon_entropy_bits: f64,
    /// Null-hypothesis mean the tests were run against: the programmed mean
    /// when supplied, otherwise 0.5 for the frequency test and the empirical
    /// mean for the runs and autocorrelation tests.
    pub reference_mean: Option<f64>,
    /// Biased sample autocorrelation for lags `1..=max_lag`; `None` for a
    /// constant stream.
    pub lag_autocorr: Option<Vec<f64>>,
    pub chi2_freq: f64,
    /// Signed square root of `chi2_freq`.
    pub freq_z: f64,
    pub runs: usize,
    /// `None` for a constant stream.
    pub runs_z: Option<f64>,
    /// All bits equal.
    pub degenerate: bool,
}

impl StreamStats {
    /// Frequency test verdict at 5%.
    pub fn frequency_passes(&self) -> bool {
        self.chi2_freq < CHI2_1DOF_95
    }

    /// Runs test verdict at 5%; a constant stream fails.
    pub fn runs_passes(&self) -> bool {
        self.runs_z.is_some_and(|z| z.abs() < Z95)
    }

    /// Every autocorrelation within `threshold_sigmas / sqrt(n)`.
    pub fn autocorr_passes(&self, threshold_sigmas: f64) -> bool {
        let bound = threshold_sigmas / (self.n as f64).sqrt();
        self.lag_autocorr
            .as_ref()
            .is_some_and(|r| r.iter().all(|c| c.abs() < bound))
    }
}

/// Binary Shannon entropy of a Bernoulli(p) source, in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |q: f64| if q > 0.0 { -q * q.log2() } else { 0.0 };
    (term(p) + term(1.0 - p)).clamp(0.0, 1.0)
}

/// Runs all four tests on `bits`.
pub fn analyze(bits: &[bool], max_lag: usize, reference_mean: Option<f64>) -> Result<StreamStats> {
    let n = bits.len();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 bits, got {n}")));
    }
    if max_lag >= n {
        return Err(Error::Domain(format!(
            "max lag {max_lag} must be below the stream length {n}"
        )));
    }
    if let Some(p) = reference_mean {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain(format!(
                "reference mean must lie in (0, 1), got {p}"
            )));
        }
    }

    let nf = n as f64;
    let ones = bits.iter().filter(|&&b| b).count();
    let mean = ones as f64 / nf;
    let degenerate = ones == 0 || ones == n;

    let null_p = reference_mean.unwrap_or(0.5);
    let freq_z = (ones as f64 - nf * null_p) / (nf * null_p * (1.0 - null_p)).sqrt();

    let runs = 1 + bits.windows(2).filter(|w| w[0] != w[1]).count();
    let runs_z = if degenerate {
        None
    } else {
        runs_z_score(runs, n, ones, reference_mean)
    };

    let lag_autocorr = if degenerate {
        None
    } else {
        Some(autocorrelation(bits, max_lag, reference_mean.unwrap_or(mean)))
    };

    Ok(StreamStats {
        n,
        ones,
        mean,
        ci95_halfwidth: Z95 * (mean * (1.0 - mean) / nf).sqrt(),
        shannon_entropy_bits: binary_entropy(mean),
        reference_mean,
        lag_autocorr,
        chi2_freq: freq_z * freq_z,
        freq_z,
        runs,
        runs_z,
        degenerate,
    })
}

/// Runs-test z-score. Without a reference mean this is the Wald–Wolfowitz
/// statistic conditioned on the observed counts; with one it uses the
/// moments of the run count of an i.i.d. Bernoulli(p) sequence.
fn runs_z_score(runs: usize, n: usize, ones: usize, reference_mean: Option<f64>) -> Option<f64> {
    let nf = n as f64;
    let (expected, variance) = match reference_mean {
        None => {
            let (n1, n0) = (ones as f64, (n - ones) as f64);
            let expected = 2.0 * n1 * n0 / nf + 1.0;
            (expected, (expected - 1.0) * (expected - 2.0) / (nf - 1.0))
        }
        Some(p) => {
            // Runs = 1 + Σ I(x_i ≠ x_{i+1}); adjacent indicators covary.
            let q = 2.0 * p * (1.0 - p);
            let expected = 1.0 + (nf - 1.0) * q;
            let variance = (nf - 1.0) * q * (1.0 - q) + 2.0 * (nf - 2.0) * (0.5 * q - q * q);
            (expected, variance)
        }
    };
    (variance > 0.0).then(|| (runs as f64 - expected) / variance.sqrt())
}

fn autocorrelation(bits: &[bool], max_lag: usize, center: f64) -> Vec<f64> {
    let dev: Vec<f64> = bits.iter().map(|&b| b as u8 as f64 - center).collect();
    let c0: f64 = dev.iter().map(|d| d * d).sum();
    (1..=max_lag)
        .map(|k| {
            let ck: f64 = dev.iter().zip(&dev[k..]).map(|(a, b)| a * b).sum();
            ck / c0
        })
        .collect()
}

impl BitStream {
    /// [`analyze`] against the programmed mean when the stream's origin is
    /// known and that mean is strictly inside (0, 1).
    pub fn stats(&self, max_lag: usize) -> Result<StreamStats> {
        let reference = self.programmed_mean().filter(|&p| p > 0.0 && p < 1.0);
        analyze(&self.bits, max_lag, reference)
    }
}

/// Signed errors `sample_mean - programmed_mean` of `trials` independent
/// ideal streams of `n` bits. Trial `i` uses seed `derive_seed(seed, i)`.
pub fn sample_mean_errors(
    device: &DeviceParams,
    detuning: f64,
    n: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let target = device.mean(detuning)?;
    let timing = TimingConfig::relaxed_for(device, n);
    (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let stream = generate_stream(device, detuning, &timing, derive_seed(seed, i), true)?;
            Ok(stream.mean() - target)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub rms_error: f64,
    pub max_error: f64,
    /// Binomial standard error `sqrt(p(1-p)/N)`.
    pub expected_rms: f64,
}

/// Sample-mean error versus stream length.
pub fn convergence_report(
    device: &DeviceParams,
    detuning: f64,
    n_grid: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ConvergenceRow>> {
    if trials < 10 {
        return Err(Error::Domain(format!("need at least 10 trials, got {trials}")));
    }
    if n_grid.is_empty() || n_grid.contains(&0) {
        return Err(Error::Domain("grid must hold positive stream lengths".into()));
    }
    let p = device.mean(detuning)?;
    n_grid
        .iter()
        .enumerate()
        .map(|(g, &n)| {
            let errors = sample_mean_errors(device, detuning, n, trials, derive_seed(seed, g as u64))?;
            let rms = (errors.iter().map(|e| e * e).sum::<f64>() / trials as f64).sqrt();
            let max = errors.iter().fold(0.0f64, |m, e| m.max(e.abs()));
            Ok(ConvergenceRow {
                n,
                rms_error: rms,
                max_error: max,
                expected_rms: (p * (1.0 - p) / n as f64).sqrt(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InverseSqrtFit {
    /// Fitted `c` in `rms ≈ c / sqrt(N)`.
    pub c: f64,
    /// Largest multiplicative deviation of any row from the fit (≥ 1).
    pub worst_factor: f64,
}

/// Least-squares fit of `ln rms = ln c - ½ ln N`.
pub fn fit_inverse_sqrt(rows: &[ConvergenceRow]) -> Result<InverseSqrtFit> {
    if rows.is_empty() || rows.iter().any(|r| r.rms_error.is_nan() || r.rms_error <= 0.0) {
        return Err(Error::Domain("fit needs rows with positive RMS error".into()));
    }
    let ln_c = rows
        .iter()
        .map(|r| (r.rms_error * (r.n as f64).sqrt()).ln())
        .sum::<f64>()
        / rows.len() as f64;
    let c = ln_c.exp();
    let worst_factor = rows
        .iter()
        .map(|r| {
            let ratio = r.rms_error * (r.n as f64).sqrt() / c;
            ratio.max(1.0 / ratio)
        })
        .fold(1.0, f64::max);
    Ok(InverseSqrtFit { c, worst_factor })
}
