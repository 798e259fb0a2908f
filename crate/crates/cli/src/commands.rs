use std::fmt::Write as _;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::Serialize;

use dqdrng::encoding::{self, BitEncoding};
use dqdrng::energy::{self, figures_of_merit, FomRow};
use dqdrng::physics::{self, DeviceParams, StatisticsMode};
use dqdrng::sampling::{
    derive_seed, generate_stream, max_bit_rate, tunneling_time, validate_timing_with, TimingConfig,
    TimingReport, TimingStrictness,
};
use dqdrng::stats::{self, StreamStats};
use dqdrng::stochastic::{self, StochasticNumber};
use dqdrng::units::NANOMETER;

use crate::args::*;
use crate::{CliError, CliResult};

pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Sweep(a) => sweep(a, stdout),
        Command::Sample(a) => sample(a, stdout, stderr),
        Command::Stats(a) => stats_cmd(a, stdout),
        Command::Fom(a) => fom(a, stdout),
        Command::Energy(a) => energy_cmd(a, stdout),
        Command::Timing(a) => timing_cmd(a, stdout, stderr),
        Command::Converge(a) => converge(a, stdout, stderr),
        Command::Sc(a) => sc(a, stdout),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn require_format(format: Format, allowed: &[Format], command: &str) -> CliResult<()> {
    if allowed.contains(&format) {
        Ok(())
    } else {
        Err(usage(format!(
            "{command} does not support --format {format:?}; use one of {allowed:?}"
        )))
    }
}

fn emit(bytes: &[u8], output: &OutputArgs, stdout: &mut dyn Write) -> CliResult<()> {
    match &output.out {
        Some(path) => fs::write(path, bytes)?,
        None => {
            stdout.write_all(bytes)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s.into_bytes()
}

/// Shortest round-trip form, switching to exponent notation outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn resolve_device(args: &DeviceArgs) -> CliResult<DeviceParams> {
    let mut device = match (&args.preset, args.gamma_ev, args.t1_s) {
        (Some(name), _, _) => preset_device(name)?,
        (None, Some(gamma), Some(t1)) => DeviceParams::new(gamma, t1)?,
        (None, None, None) => preset_device(energy::METALLIC)?,
        (None, _, _) => {
            return Err(usage("a custom device needs both --gamma-ev and --t1-s"));
        }
    };
    device = match (args.mode, args.kt_ev) {
        (Some(ModeArg::Quantum), _) => device.quantum(),
        (Some(ModeArg::Thermal), kt) => device.with_mode(StatisticsMode::ThermalBoltzmann, kt)?,
        (None, Some(kt)) if device.statistics_mode() == StatisticsMode::ThermalBoltzmann => {
            device.thermal(kt)?
        }
        (None, Some(_)) => {
            log::warn!("--kt-ev has no effect in quantum mode; pass --mode thermal to use it");
            device
        }
        (None, None) => device,
    };
    if let Some(sep) = args.sep_nm {
        device = device.with_dot_separation([sep * NANOMETER, 0.0, 0.0])?;
    }
    Ok(device)
}

fn preset_device(name: &str) -> CliResult<DeviceParams> {
    let preset = energy::preset(name).map_err(|e| usage(e.to_string()))?;
    preset
        .device()
        .copied()
        .ok_or_else(|| usage(format!("preset {name:?} is a reference row without device physics")))
}

/// Detuning in eV from whichever bias flag was given.
pub fn resolve_detuning(bias: &BiasArgs, device: &DeviceParams) -> CliResult<Option<f64>> {
    let charge = device.mobile_charge();
    let delta = if let Some(mean) = bias.mean {
        Some(device.programmed_detuning(mean)?)
    } else if let Some(d) = bias.delta_ev {
        if !d.is_finite() {
            return Err(dqdrng::Error::Domain(format!("detuning must be finite, got {d}")).into());
        }
        Some(d)
    } else if let Some(v) = bias.voltage_v {
        Some(physics::detuning_from_voltage(v, charge)?)
    } else if let Some(e) = bias.field_vpm {
        let a = device.dot_separation();
        let len = a.iter().map(|c| c * c).sum::<f64>().sqrt();
        let field = if len > 0.0 { a.map(|c| e * c / len) } else { [e, 0.0, 0.0] };
        Some(physics::detuning_from_field(field, a, charge)?)
    } else {
        None
    };
    Ok(delta)
}

fn resolve_timing(flags: &TimingFlags, device: &DeviceParams, n: usize) -> CliResult<TimingConfig> {
    let defaults = TimingConfig::relaxed_for(device, n);
    let timing = TimingConfig::new(
        flags.tb_s.unwrap_or(defaults.bit_time),
        flags.tm_s.unwrap_or(defaults.measure_time),
        n,
    )?;
    Ok(timing)
}

fn strictness(args: &StrictnessArgs) -> CliResult<TimingStrictness> {
    let s = TimingStrictness {
        measure_fraction: args.measure_fraction,
        relax_multiple: args.relax_multiple,
        zeno_multiple: args.zeno_multiple,
    };
    if [s.measure_fraction, s.relax_multiple, s.zeno_multiple]
        .iter()
        .any(|f| !(f.is_finite() && *f > 0.0))
    {
        return Err(usage("strictness factors must be positive"));
    }
    Ok(s)
}

fn timing_summary(report: &TimingReport) -> String {
    let mut s = format!("timing: {} violation(s)\n", report.violations.len());
    for v in &report.violations {
        let _ = writeln!(s, "  {}: {} (ratio {:.4})", v.constraint, v.message, v.measured_ratio);
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub delta_over_gamma: f64,
    pub p0: f64,
    pub p1: f64,
    pub mean: f64,
    pub avg_dissipation_over_gamma: f64,
}

/// Ground-state statistics on `points` evenly spaced values of Δ/γ.
pub fn sweep_rows(from: f64, to: f64, points: usize) -> CliResult<Vec<SweepRow>> {
    if points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    if !(from.is_finite() && to.is_finite() && from < to) {
        return Err(usage(format!("invalid range [{from}, {to}]")));
    }
    let span = to - from;
    (0..points)
        .map(|i| {
            let x = from + span * i as f64 / (points - 1) as f64;
            let gs = physics::ground_state(1.0, x)?;
            Ok(SweepRow {
                delta_over_gamma: x,
                p0: gs.p0,
                p1: gs.p1,
                mean: physics::mean_value(1.0, x)?,
                avg_dissipation_over_gamma: energy::avg_energy_dissipation(1.0, x)?,
            })
        })
        .collect()
}

fn sweep(a: &SweepArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Csv, Format::Report], "sweep")?;
    let rows = sweep_rows(a.from, a.to, a.points)?;
    let bytes = match a.format {
        Format::Report => json(&rows),
        _ => {
            let mut s = String::from("delta_over_gamma,p0,p1,mean,avg_dissipation_over_gamma\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    num(r.delta_over_gamma),
                    num(r.p0),
                    num(r.p1),
                    num(r.mean),
                    num(r.avg_dissipation_over_gamma)
                );
            }
            s.into_bytes()
        }
    };
    emit(&bytes, &a.output, stdout)
}

fn stream_encoding(format: Format) -> Option<BitEncoding> {
    match format {
        Format::Ascii => Some(BitEncoding::Ascii),
        Format::Packed => Some(BitEncoding::Packed),
        _ => None,
    }
}

fn sample(a: &SampleArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    let encoding = stream_encoding(a.format)
        .ok_or_else(|| usage("sample writes --format ascii or packed"))?;
    let device = resolve_device(&a.device)?;
    let delta = resolve_detuning(&a.bias, &device)?
        .ok_or_else(|| usage("give one of --mean, --delta-ev, --voltage-v, --field-vpm"))?;
    let timing = resolve_timing(&a.timing, &device, a.n)?;
    let report = validate_timing_with(&timing, &device, &strictness(&a.strictness)?);
    if !report.ok {
        stderr.write_all(timing_summary(&report).as_bytes())?;
        if a.strict {
            return Err(CliError::Timing(format!(
                "{} violation(s)",
                report.violations.len()
            )));
        }
    }
    let stream = generate_stream(&device, delta, &timing, a.seed, !a.non_ideal)?;
    emit(&encoding::encode(&stream.bits, encoding), &a.output, stdout)
}

#[derive(Debug, Serialize)]
pub struct StatsReport {
    #[serde(flatten)]
    pub stats: StreamStats,
    pub frequency_pass: bool,
    pub runs_pass: bool,
    /// Every lag within 4/sqrt(n).
    pub autocorr_pass: bool,
}

fn read_input(path: &Path) -> CliResult<Vec<u8>> {
    if path.as_os_str() == "-" {
        let mut buf = Vec::new();
        std::io::stdin().read_to_end(&mut buf)?;
        Ok(buf)
    } else {
        Ok(fs::read(path)?)
    }
}

fn stats_cmd(a: &StatsArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Report, Format::Csv], "stats")?;
    let bytes = read_input(&a.input)?;
    let encoding = match a.input_format {
        StreamFormat::Ascii => BitEncoding::Ascii,
        StreamFormat::Packed => BitEncoding::Packed,
    };
    let bits = encoding::decode(&bytes, encoding)?;
    let s = stats::analyze(&bits, a.max_lag, a.mean)?;
    let report = StatsReport {
        frequency_pass: s.frequency_passes(),
        runs_pass: s.runs_passes(),
        autocorr_pass: s.autocorr_passes(4.0),
        stats: s,
    };
    let out = match a.format {
        Format::Csv => {
            let s = &report.stats;
            let lag1 = s.lag_autocorr.as_ref().and_then(|r| r.first().copied());
            format!(
                "n,ones,mean,ci95_halfwidth,shannon_entropy_bits,chi2_freq,freq_z,runs,runs_z,lag1_autocorr,degenerate\n{},{},{},{},{},{},{},{},{},{},{}\n",
                s.n,
                s.ones,
                num(s.mean),
                num(s.ci95_halfwidth),
                num(s.shannon_entropy_bits),
                num(s.chi2_freq),
                num(s.freq_z),
                s.runs,
                opt(s.runs_z),
                opt(lag1),
                s.degenerate
            )
            .into_bytes()
        }
        _ => json(&report),
    };
    emit(&out, &a.output, stdout)
}

pub fn fom_rows(selection: &str, readout_rate: Option<f64>) -> CliResult<Vec<FomRow>> {
    let presets = if selection == "all" {
        energy::presets().to_vec()
    } else {
        vec![energy::preset(selection).map_err(|e| usage(e.to_string()))?]
    };
    presets
        .into_iter()
        .map(|p| {
            let p = match (readout_rate, p.device()) {
                (Some(rate), Some(_)) => p.with_readout_limited_rate(rate)?,
                _ => p,
            };
            Ok(figures_of_merit(&p))
        })
        .collect()
}

fn fom(a: &FomArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Table, Format::Csv, Format::Report], "fom")?;
    let rows = fom_rows(&a.preset, a.readout_rate)?;
    let out = match a.format {
        Format::Csv => {
            let mut s = String::from("preset,t1_s,max_bit_rate_bps,max_avg_power_w\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.name, opt(r.t1), num(r.max_bit_rate), num(r.max_avg_power));
            }
            s
        }
        Format::Report => String::from_utf8(json(&rows)).expect("utf-8"),
        _ => {
            let mut s = format!(
                "{:<20} {:>12} {:>18} {:>18}\n",
                "preset", "T1 (s)", "max bit rate (bps)", "max avg power (W)"
            );
            for r in &rows {
                let t1 = r.t1.map_or_else(|| "-".to_string(), |t| format!("{t:.3e}"));
                let _ = writeln!(
                    s,
                    "{:<20} {:>12} {:>18} {:>18}",
                    r.name,
                    t1,
                    format!("{:.3e}", r.max_bit_rate),
                    format!("{:.3e}", r.max_avg_power)
                );
            }
            s
        }
    };
    emit(out.as_bytes(), &a.output, stdout)
}

#[derive(Debug, Serialize)]
pub struct EnergyOut {
    pub statistics_mode: StatisticsMode,
    pub gamma_ev: f64,
    pub detuning_ev: f64,
    pub p1: f64,
    pub eps0_ev: f64,
    pub eps1_ev: f64,
    pub avg_dissipation_ev: f64,
    pub avg_power_w: f64,
    pub bit_rate_bps: f64,
}

fn energy_cmd(a: &EnergyArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Report, Format::Csv], "energy")?;
    let device = resolve_device(&a.device)?;
    let delta = resolve_detuning(&a.bias, &device)?.unwrap_or(0.0);
    let rate = a.rate.unwrap_or_else(|| max_bit_rate(&device));
    let r = energy::energy_report(&device, delta, rate)?;
    let out = EnergyOut {
        statistics_mode: device.statistics_mode(),
        gamma_ev: device.gamma(),
        detuning_ev: delta,
        p1: device.mean(delta)?,
        eps0_ev: r.eps0,
        eps1_ev: r.eps1,
        avg_dissipation_ev: r.avg_dissipation,
        avg_power_w: r.avg_power,
        bit_rate_bps: r.bit_rate,
    };
    let bytes = match a.format {
        Format::Csv => format!(
            "detuning_ev,p1,eps0_ev,eps1_ev,avg_dissipation_ev,avg_power_w,bit_rate_bps\n{},{},{},{},{},{},{}\n",
            num(out.detuning_ev),
            num(out.p1),
            num(out.eps0_ev),
            num(out.eps1_ev),
            num(out.avg_dissipation_ev),
            num(out.avg_power_w),
            num(out.bit_rate_bps)
        )
        .into_bytes(),
        _ => json(&out),
    };
    emit(&bytes, &a.output, stdout)
}

#[derive(Debug, Serialize)]
pub struct TimingOut {
    pub bit_time_s: f64,
    pub measure_time_s: f64,
    pub t1_s: f64,
    pub tunneling_time_s: f64,
    #[serde(flatten)]
    pub report: TimingReport,
}

fn timing_cmd(a: &TimingArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Report], "timing")?;
    let device = resolve_device(&a.device)?;
    let timing = resolve_timing(&a.timing, &device, 1)?;
    let report = validate_timing_with(&timing, &device, &strictness(&a.strictness)?);
    let ok = report.ok;
    let count = report.violations.len();
    if !ok {
        stderr.write_all(timing_summary(&report).as_bytes())?;
    }
    let out = TimingOut {
        bit_time_s: timing.bit_time,
        measure_time_s: timing.measure_time,
        t1_s: device.t1(),
        tunneling_time_s: tunneling_time(device.gamma()),
        report,
    };
    emit(&json(&out), &a.output, stdout)?;
    if !ok && a.strict {
        return Err(CliError::Timing(format!("{count} violation(s)")));
    }
    Ok(())
}

fn converge(a: &ConvergeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Csv, Format::Report], "converge")?;
    let device = resolve_device(&a.device)?;
    let delta = resolve_detuning(&a.bias, &device)?.unwrap_or(0.0);
    let rows = stats::convergence_report(&device, delta, &a.grid, a.trials, a.seed)?;
    let fit = stats::fit_inverse_sqrt(&rows).ok();
    if let Some(fit) = &fit {
        writeln!(stderr, "fit: rms ≈ {:.6}/sqrt(N), worst factor {:.4}", fit.c, fit.worst_factor)?;
    }
    let bytes = match a.format {
        Format::Report => {
            #[derive(Serialize)]
            struct Out<'a> {
                target_mean: f64,
                rows: &'a [stats::ConvergenceRow],
                fit: Option<stats::InverseSqrtFit>,
            }
            json(&Out {
                target_mean: device.mean(delta)?,
                rows: &rows,
                fit,
            })
        }
        _ => {
            let mut s = String::from("n,rms_error,max_error,expected_rms\n");
            for r in &rows {
                let _ = writeln!(s, "{},{},{},{}", r.n, num(r.rms_error), num(r.max_error), num(r.expected_rms));
            }
            s.into_bytes()
        }
    };
    emit(&bytes, &a.output, stdout)
}

#[derive(Debug, Serialize)]
pub struct ScOut {
    pub op: String,
    pub operands: Vec<f64>,
    pub n: usize,
    pub seed: u64,
    pub nominal: f64,
    pub decoded: f64,
    /// 95% half-width of the decoded mean around the nominal value.
    pub ci95_halfwidth: f64,
    pub within_ci: bool,
    pub correlated_inputs: bool,
}

pub fn sc_compute(a: &ScArgs) -> CliResult<(ScOut, Vec<(String, StochasticNumber)>)> {
    let device = resolve_device(&a.device)?;
    let mut values = vec![a.a, a.b];
    if a.op == ScOp::Add {
        values.push(a.select);
    }
    let operands = values
        .iter()
        .enumerate()
        .map(|(i, &v)| stochastic::encode(v, a.n, &device, derive_seed(a.seed, i as u64)))
        .collect::<Result<Vec<_>, _>>()?;
    let result = match a.op {
        ScOp::Multiply => stochastic::sc_multiply(&operands[0], &operands[1])?,
        ScOp::Or => stochastic::sc_or(&operands[0], &operands[1])?,
        ScOp::Add => stochastic::sc_scaled_add(&operands[0], &operands[1], &operands[2])?,
    };
    let decoded = stochastic::decode(&result)?;
    let nominal = result.nominal_value;
    let halfwidth = stats::Z95 * (nominal * (1.0 - nominal) / a.n as f64).sqrt();
    let out = ScOut {
        op: format!("{:?}", a.op).to_lowercase(),
        operands: values,
        n: a.n,
        seed: a.seed,
        nominal,
        decoded,
        ci95_halfwidth: halfwidth,
        within_ci: (decoded - nominal).abs() <= halfwidth,
        correlated_inputs: result.correlated_inputs,
    };
    let names = ["a", "b", "select"];
    let mut streams: Vec<(String, StochasticNumber)> = operands
        .into_iter()
        .zip(names)
        .map(|(sn, name)| (name.to_string(), sn))
        .collect();
    streams.push(("result".to_string(), result));
    Ok((out, streams))
}

fn sc(a: &ScArgs, stdout: &mut dyn Write) -> CliResult<()> {
    require_format(a.format, &[Format::Report], "sc")?;
    if a.n == 0 {
        return Err(usage("--n must be at least 1"));
    }
    let (out, streams) = sc_compute(a)?;
    if let Some(dir) = &a.out_dir {
        fs::create_dir_all(dir)?;
        let (encoding, ext) = match a.stream_format {
            StreamFormat::Ascii => (BitEncoding::Ascii, "txt"),
            StreamFormat::Packed => (BitEncoding::Packed, "bin"),
        };
        for (name, sn) in &streams {
            fs::write(dir.join(format!("{name}.{ext}")), encoding::encode(&sn.stream.bits, encoding))?;
        }
    }
    emit(&json(&out), &a.output, stdout)
}
