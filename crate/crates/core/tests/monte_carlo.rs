//! Monte Carlo properties of generated streams.

use dqdrng::energy::{avg_energy_dissipation, relaxation_energies};
use dqdrng::physics::{detuning_for_mean, DeviceParams};
use dqdrng::sampling::{derive_seed, generate_stream, TimingConfig};
use dqdrng::stats::{analyze, convergence_report, fit_inverse_sqrt, CHI2_1DOF_95};
use rayon::prelude::*;

const N: usize = 1_000_000;

fn molecular() -> DeviceParams {
    DeviceParams::new(50e-3, 1e-12).unwrap()
}

/// Lag-1 autocorrelation of a stationary two-state chain that keeps its
/// state with probability `keep` and otherwise redraws from `(1-p, p)`,
/// computed from the transition matrix.
fn markov_lag1(p: f64, keep: f64) -> f64 {
    let redraw = [1.0 - p, p];
    let mut t = [[0.0; 2]; 2];
    for (a, row) in t.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = (1.0 - keep) * redraw[b] + if a == b { keep } else { 0.0 };
        }
    }
    // Stationary distribution by power iteration from a point mass.
    let mut pi = [1.0, 0.0];
    for _ in 0..10_000 {
        pi = [
            pi[0] * t[0][0] + pi[1] * t[1][0],
            pi[0] * t[0][1] + pi[1] * t[1][1],
        ];
    }
    let mean = pi[1];
    let joint = pi[1] * t[1][1];
    (joint - mean * mean) / (mean * (1.0 - mean))
}

fn timing_with_ratio(device: &DeviceParams, ratio: f64, n: usize) -> TimingConfig {
    let tm = device.t1() / 20.0;
    TimingConfig::new(tm + ratio * device.t1(), tm, n).unwrap()
}

#[test]
fn ideal_stream_means_within_four_sigma() {
    let dev = molecular();
    for (i, p) in [0.1, 0.25, 0.5, 0.75, 0.9].into_iter().enumerate() {
        let delta = detuning_for_mean(dev.gamma(), p).unwrap();
        let s = generate_stream(&dev, delta, &TimingConfig::relaxed_for(&dev, N), 1000 + i as u64, true).unwrap();
        let bound = 4.0 * (p * (1.0 - p) / N as f64).sqrt();
        assert!((s.mean() - p).abs() < bound, "p = {p}: mean {}", s.mean());
    }
}

#[test]
fn ideal_stream_is_uncorrelated() {
    let dev = molecular();
    let s = generate_stream(&dev, 0.02, &TimingConfig::relaxed_for(&dev, N), 77, true).unwrap();
    let stats = s.stats(10).unwrap();
    let bound = 4.0 / (N as f64).sqrt();
    for (k, r) in stats.lag_autocorr.unwrap().iter().enumerate() {
        assert!(r.abs() < bound, "lag {}: {r}", k + 1);
    }
}

#[test]
fn fair_stream_battery_over_seeded_trials() {
    let dev = molecular();
    let timing = TimingConfig::relaxed_for(&dev, N);
    let results: Vec<_> = (0..100u64)
        .into_par_iter()
        .map(|seed| {
            let s = generate_stream(&dev, 0.0, &timing, derive_seed(0xfa1, seed), true).unwrap();
            analyze(&s.bits, 1, Some(0.5)).unwrap()
        })
        .collect();
    let bound = 4.0 / (N as f64).sqrt();
    let chi2_pass = results.iter().filter(|s| s.chi2_freq < CHI2_1DOF_95).count();
    let z_reject = results.iter().filter(|s| s.freq_z.abs() > 1.96).count();
    for s in &results {
        assert!(s.shannon_entropy_bits > 0.99999, "{}", s.shannon_entropy_bits);
        assert!(s.lag_autocorr.as_ref().unwrap()[0].abs() < bound);
    }
    assert!(chi2_pass >= 94, "{chi2_pass}/100");
    // Binomial tolerance around the nominal 5% false-rejection rate.
    assert!((1..=12).contains(&z_reject), "{z_reject}/100");
}

#[test]
fn biased_stream_not_flagged_by_bias_aware_tests() {
    let dev = molecular();
    let p = 0.2;
    let delta = detuning_for_mean(dev.gamma(), p).unwrap();
    let s = generate_stream(&dev, delta, &TimingConfig::relaxed_for(&dev, 200_000), 5, true).unwrap();
    let aware = s.stats(5).unwrap();
    assert!(aware.frequency_passes());
    assert!(aware.runs_passes(), "{:?}", aware.runs_z);
    assert!(aware.autocorr_passes(4.0));
    // Against a fair-coin null the same stream is rejected outright.
    let naive = analyze(&s.bits, 5, Some(0.5)).unwrap();
    assert!(!naive.frequency_passes());
    assert!(!naive.runs_passes());
}

#[test]
fn rms_error_scales_as_inverse_sqrt_n() {
    let dev = molecular();
    let rows = convergence_report(&dev, 0.0, &[100, 1_000, 10_000, 100_000], 100, 42).unwrap();
    let fit = fit_inverse_sqrt(&rows).unwrap();
    assert!(fit.worst_factor <= 1.5, "{fit:?} {rows:?}");
    assert!((fit.c - 0.5).abs() < 0.1, "{fit:?}");
    for r in &rows {
        assert!(r.rms_error / r.expected_rms < 1.5 && r.expected_rms / r.rms_error < 1.5);
    }
}

#[test]
fn convergence_at_each_target_mean() {
    let dev = molecular();
    for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let delta = detuning_for_mean(dev.gamma(), p).unwrap();
        let rows = convergence_report(&dev, delta, &[1_000, 100_000], 50, 3).unwrap();
        let last = rows.last().unwrap();
        assert!(last.max_error < 4.0 * (p * (1.0 - p) / 1e5).sqrt() + 1e-3, "p = {p}: {last:?}");
        assert!(last.rms_error < rows[0].rms_error);
    }
}

#[test]
fn carryover_autocorrelation_matches_markov_chain() {
    let dev = molecular();
    let mut previous = f64::INFINITY;
    for (i, ratio) in [0.5, 1.0, 2.0, 5.0, 10.0].into_iter().enumerate() {
        let timing = timing_with_ratio(&dev, ratio, N);
        let s = generate_stream(&dev, 0.0, &timing, 500 + i as u64, false).unwrap();
        let r1 = analyze(&s.bits, 1, Some(0.5)).unwrap().lag_autocorr.unwrap()[0];
        let oracle = markov_lag1(0.5, (-ratio).exp());
        let se = ((1.0 - oracle * oracle) / N as f64).sqrt();
        assert!((r1 - oracle).abs() < 3.0 * se, "ratio {ratio}: {r1} vs {oracle} (se {se})");
        assert!(r1 < previous, "not decreasing at ratio {ratio}");
        previous = r1;
    }
}

#[test]
fn carryover_with_biased_refresh() {
    let dev = molecular();
    let p = 0.25;
    let delta = detuning_for_mean(dev.gamma(), p).unwrap();
    let s = generate_stream(&dev, delta, &timing_with_ratio(&dev, 1.0, N), 8, false).unwrap();
    let oracle = markov_lag1(p, (-1.0f64).exp());
    assert!((oracle - (-1.0f64).exp()).abs() < 1e-12);
    let stats = s.stats(1).unwrap();
    let r1 = stats.lag_autocorr.unwrap()[0];
    assert!((r1 - oracle).abs() < 0.01, "{r1}");
    // Carryover preserves the stationary mean.
    assert!((s.mean() - p).abs() < 0.005);
}

#[test]
fn accumulated_dissipation_matches_ensemble_average() {
    let dev = molecular();
    for p in [0.1, 0.5, 0.8] {
        let delta = detuning_for_mean(dev.gamma(), p).unwrap();
        let s = generate_stream(&dev, delta, &TimingConfig::relaxed_for(&dev, N), 31, true).unwrap();
        let (e0, e1) = relaxation_energies(dev.gamma(), delta).unwrap();
        let total: f64 = s.bits.iter().map(|&b| if b { e1 } else { e0 }).sum();
        let empirical = total / N as f64;
        let expected = avg_energy_dissipation(dev.gamma(), delta).unwrap();
        // Two-point distribution with spread |ε1 − ε0| = |Δ|.
        let se = (e1 - e0).abs() * (p * (1.0 - p) / N as f64).sqrt();
        assert!((empirical - expected).abs() <= 4.0 * se + 1e-9 * expected, "p = {p}: {empirical} vs {expected}");
    }
}

#[test]
fn thermal_stream_at_unit_detuning() {
    let kt = 8.617e-6;
    let dev = DeviceParams::new(0.5e-3, 1.0 / 150e6).unwrap().thermal(kt).unwrap();
    let s = generate_stream(&dev, kt, &TimingConfig::relaxed_for(&dev, N), 12, true).unwrap();
    let p = 1.0 / (1.0 + std::f64::consts::E);
    assert!((s.mean() - p).abs() < 4.0 * (p * (1.0 - p) / N as f64).sqrt());
}

#[test]
fn streams_identical_under_parallel_generation() {
    let dev = molecular();
    let timing = TimingConfig::relaxed_for(&dev, 50_000);
    let serial: Vec<_> = (0..16u64)
        .map(|s| generate_stream(&dev, 0.01, &timing, s, false).unwrap())
        .collect();
    let parallel: Vec<_> = (0..16usize)
        .into_par_iter()
        .rev()
        .map(|s| generate_stream(&dev, 0.01, &timing, s as u64, false).unwrap())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    assert_eq!(serial, parallel);
}
