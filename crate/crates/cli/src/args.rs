use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

/// Simulator for a tunable double-quantum-dot random bit generator.
///
/// Data goes to stdout (or --out); diagnostics go to stderr.
/// Exit codes: 0 success, 1 usage error, 2 domain error,
/// 3 timing violation with --strict.
#[derive(Debug, Parser)]
#[command(name = "dqdrng", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state statistics over a range of normalized detuning Δ/γ.
    Sweep(SweepArgs),
    /// Generate a bit stream with the measure-relax cycle.
    Sample(SampleArgs),
    /// Statistical quality report for a stream file.
    Stats(StatsArgs),
    /// Figures of merit (max bit rate, max average power) for presets.
    Fom(FomArgs),
    /// Relaxation energies and average dissipated power.
    Energy(EnergyArgs),
    /// Check bit and measurement times against the device time scales.
    Timing(TimingArgs),
    /// Sample-mean error versus stream length.
    Converge(ConvergeArgs),
    /// Stochastic-computing arithmetic on encoded streams.
    Sc(ScArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Report,
    Ascii,
    Packed,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StreamFormat {
    Ascii,
    Packed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Quantum,
    Thermal,
}

#[derive(Debug, Clone, Args)]
pub struct DeviceArgs {
    /// Named device preset [default: metallic]. Conflicts with --gamma-ev/--t1-s.
    #[arg(long, conflicts_with_all = ["gamma_ev", "t1_s"])]
    pub preset: Option<String>,
    /// Tunneling energy γ in eV (custom device; requires --t1-s).
    #[arg(long)]
    pub gamma_ev: Option<f64>,
    /// Relaxation time T1 in seconds (custom device; requires --gamma-ev).
    #[arg(long)]
    pub t1_s: Option<f64>,
    /// Statistics mode. Presets default to their own mode (molecular-dfa:
    /// quantum, metallic: thermal); custom devices default to quantum.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Thermal energy kT in eV for thermal mode [default: 8.617e-6, about 0.1 K].
    #[arg(long)]
    pub kt_ev: Option<f64>,
    /// Dot separation in nm along the field axis (field biasing).
    #[arg(long)]
    pub sep_nm: Option<f64>,
}

#[derive(Debug, Clone, Args)]
#[command(group(ArgGroup::new("bias").multiple(false).args(["mean", "delta_ev", "voltage_v", "field_vpm"])))]
pub struct BiasArgs {
    /// Target stream mean in (0, 1).
    #[arg(long)]
    pub mean: Option<f64>,
    /// Detuning Δ in eV.
    #[arg(long, allow_hyphen_values = true)]
    pub delta_ev: Option<f64>,
    /// Interdot voltage in volts (Δ = qV).
    #[arg(long, allow_hyphen_values = true)]
    pub voltage_v: Option<f64>,
    /// Field strength in V/m along the dot axis (Δ = -q E·a).
    #[arg(long, allow_hyphen_values = true)]
    pub field_vpm: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct StrictnessArgs {
    /// Require t_m ≤ T1 / this.
    #[arg(long, default_value_t = 10.0)]
    pub measure_fraction: f64,
    /// Require T_b - t_m ≥ this · T1.
    #[arg(long, default_value_t = 5.0)]
    pub relax_multiple: f64,
    /// Require T_b ≥ this · πħ/γ.
    #[arg(long, default_value_t = 100.0)]
    pub zeno_multiple: f64,
}

#[derive(Debug, Clone, Args)]
pub struct TimingFlags {
    /// Bit time T_b in seconds [default: 8·T1].
    #[arg(long)]
    pub tb_s: Option<f64>,
    /// Measurement time t_m in seconds [default: T1/20].
    #[arg(long)]
    pub tm_s: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Write primary output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    pub from: f64,
    #[arg(long, default_value_t = 10.0, allow_hyphen_values = true)]
    pub to: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub bias: BiasArgs,
    /// Number of bits.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    #[command(flatten)]
    pub timing: TimingFlags,
    #[command(flatten)]
    pub strictness: StrictnessArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Ascii)]
    pub format: Format,
    /// Model incomplete relaxation between measurements.
    #[arg(long)]
    pub non_ideal: bool,
    /// Exit with code 3 instead of generating when timing checks fail.
    #[arg(long)]
    pub strict: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Stream file; `-` reads stdin.
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = StreamFormat::Ascii)]
    pub input_format: StreamFormat,
    #[arg(long, default_value_t = 10)]
    pub max_lag: usize,
    /// Programmed mean to test against (bias-aware tests).
    #[arg(long)]
    pub mean: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct FomArgs {
    /// Preset name, or `all`.
    #[arg(long, default_value = "all")]
    pub preset: String,
    /// Cap device bit rates at this readout-limited rate (bits/s).
    #[arg(long)]
    pub readout_rate: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct EnergyArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub bias: BiasArgs,
    /// Bit rate in bits/s [default: 1/T1].
    #[arg(long)]
    pub rate: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TimingArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub timing: TimingFlags,
    #[command(flatten)]
    pub strictness: StrictnessArgs,
    #[arg(long)]
    pub strict: bool,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub device: DeviceArgs,
    #[command(flatten)]
    pub bias: BiasArgs,
    /// Stream lengths, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [100usize, 1_000, 10_000, 100_000])]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScOp {
    /// AND: a·b
    Multiply,
    /// OR: a + b - a·b
    Or,
    /// Multiplexer: s·a + (1 - s)·b
    Add,
}

#[derive(Debug, Args)]
pub struct ScArgs {
    #[arg(value_enum)]
    pub op: ScOp,
    pub a: f64,
    pub b: f64,
    /// Select value for `add`.
    #[arg(long, default_value_t = 0.5)]
    pub select: f64,
    #[command(flatten)]
    pub device: DeviceArgs,
    #[arg(long, default_value_t = 100_000)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write operand and result streams into this directory.
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StreamFormat::Ascii)]
    pub stream_format: StreamFormat,
    #[arg(long, value_enum, default_value_t = Format::Report)]
    pub format: Format,
    #[command(flatten)]
    pub output: OutputArgs,
}
