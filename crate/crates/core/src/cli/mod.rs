//! Command-line front end: single-point evaluations as JSON, sweeps as CSV.
//!
//! Exit codes are 0 on success, 1 for malformed arguments or failed
//! computations and 2 when the requested herald has zero probability.

pub mod input;
pub mod sweep;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::Write;
use std::path::PathBuf;

use crate::detection::{heralded_fidelity, povm_element, DetectorModel};
use crate::devices::{output_state_closed_form, output_state_oracle, DeviceParams, OracleOptions};
use crate::fock::{coherent_coefficients, Cutoffs, FockVector};
use crate::metrics::MetricReport;
use crate::scissors::{truncate_max, truncate_min, Configuration};
use crate::{Error, Result};
use input::PreparedInput;
use sweep::{Axis, SweepMode, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_ZERO_PROBABILITY: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qscissors",
    version,
    about = "Hybrid quantum scissors simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ideal (N,0) herald: heralded state, probability and metrics as JSON.
    Truncate(TruncateArgs),
    /// Grid evaluation written as CSV.
    Sweep(SweepArgs),
    /// Lossy detection compared with the ideal herald, as JSON.
    Fidelity(FidelityArgs),
    /// Diagonal of the detector POVM element for N counts.
    Povm(PovmArgs),
    /// Closed-form output state against direct exponentiation on a grid.
    OracleCheck(OracleCheckArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConfigArg {
    Max,
    Min,
}

impl From<ConfigArg> for Configuration {
    fn from(c: ConfigArg) -> Self {
        match c {
            ConfigArg::Max => Configuration::Max,
            ConfigArg::Min => Configuration::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    Metrics,
    Probability,
    Fidelity,
    State,
}

impl From<ModeArg> for SweepMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Metrics => SweepMode::Metrics,
            ModeArg::Probability => SweepMode::Probability,
            ModeArg::Fidelity => SweepMode::Fidelity,
            ModeArg::State => SweepMode::State,
        }
    }
}

#[derive(Debug, Args)]
struct DeviceArgs {
    /// Amplifier strength s >= 0.
    #[arg(long, default_value_t = 0.5, allow_hyphen_values = true)]
    s: f64,
    /// Pump phase relative to the input phase.
    #[arg(long = "phi-minus-beta", default_value_t = FRAC_PI_2, allow_hyphen_values = true)]
    phi_minus_beta: f64,
    /// Beamsplitter angle, T = cos(theta).
    #[arg(long, default_value_t = FRAC_PI_4, allow_hyphen_values = true)]
    theta: f64,
}

impl DeviceArgs {
    fn params(&self) -> Result<DeviceParams> {
        DeviceParams::new(self.s, self.phi_minus_beta, self.theta)
    }
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Coherent input amplitude |alpha| (its phase is absorbed in phi-minus-beta).
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    alpha: f64,
    /// Vacuum input instead of a coherent state.
    #[arg(long, conflicts_with_all = ["amplitudes", "amplitudes_json"])]
    vacuum_input: bool,
    /// Explicit input amplitudes, comma separated, complex entries as re:im.
    #[arg(long, conflicts_with = "amplitudes_json", allow_hyphen_values = true)]
    amplitudes: Option<String>,
    /// Explicit input state as a JSON file {"dim","re","im"}.
    #[arg(long)]
    amplitudes_json: Option<PathBuf>,
    /// Input Fock cutoff; chosen from the coherent tail mass when absent.
    #[arg(long)]
    dim: Option<usize>,
}

impl InputArgs {
    fn prepare(&self) -> Result<PreparedInput> {
        if self.vacuum_input {
            input::vacuum_input(self.dim)
        } else if let Some(list) = &self.amplitudes {
            input::explicit_input(input::parse_amplitudes(list)?)
        } else if let Some(path) = &self.amplitudes_json {
            input::json_input(path)
        } else {
            if !(self.alpha >= 0.0) || !self.alpha.is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "alpha is a modulus and must be non-negative, got {}",
                    self.alpha
                )));
            }
            input::coherent_input(self.alpha, self.dim)
        }
    }
}

#[derive(Debug, Args)]
struct OutArgs {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutArgs {
    fn write(&self, text: &str) -> Result<()> {
        let io = |e: std::io::Error| Error::InvalidParameter(format!("writing output: {e}"));
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(io),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
        }
    }
}

#[derive(Debug, Args)]
struct TruncateArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[command(flatten)]
    input: InputArgs,
    /// Photon count N registered by the counting detector.
    #[arg(long = "N", default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value = "max")]
    config: ConfigArg,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct FidelityArgs {
    #[command(flatten)]
    device: DeviceArgs,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long = "N", default_value_t = 1)]
    count: usize,
    #[arg(long, value_enum, default_value = "max")]
    config: ConfigArg,
    /// Detector efficiency.
    #[arg(long, default_value_t = 0.7)]
    eta: f64,
    /// Dark-count probability per detection window.
    #[arg(long, default_value_t = 1e-4)]
    nu: f64,
    /// Include the conditioned density matrix in the output.
    #[arg(long)]
    with_rho: bool,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct PovmArgs {
    #[arg(long, default_value_t = 0.7)]
    eta: f64,
    #[arg(long, default_value_t = 1e-4)]
    nu: f64,
    #[arg(long = "N", default_value_t = 1)]
    count: usize,
    /// Number of Fock levels in the diagonal.
    #[arg(long, default_value_t = 10)]
    dim: usize,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Figure preset (fig2 .. fig14); other flags override its values.
    #[arg(long)]
    preset: Option<String>,
    /// Swept axis as name=start:stop:count; give once or twice.
    #[arg(long = "axis", allow_hyphen_values = true)]
    axes: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    s: Option<f64>,
    #[arg(long = "phi-minus-beta", allow_hyphen_values = true)]
    phi_minus_beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Photon counts, comma separated.
    #[arg(long = "N", value_delimiter = ',')]
    counts: Vec<usize>,
    #[arg(long, value_enum)]
    config: Option<ConfigArg>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Fixed input cutoff for every point.
    #[arg(long)]
    dim: Option<usize>,
    /// Worker threads; output order does not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    #[command(flatten)]
    out: OutArgs,
}

#[derive(Debug, Args)]
struct OracleCheckArgs {
    /// Uniform cutoff for all three modes.
    #[arg(long, default_value_t = 30)]
    dim: usize,
    /// Extra Fock levels kept inside the oracle.
    #[arg(long, default_value_t = OracleOptions::default().padding)]
    padding: usize,
    #[command(flatten)]
    out: OutArgs,
}

/// Parses `std::env::args` and runs the command.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::ZeroProbabilityHerald { .. } => EXIT_ZERO_PROBABILITY,
                _ => EXIT_USAGE,
            }
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::InvalidParameter(format!("serializing output: {e}")))?;
    text.push('\n');
    Ok(text)
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Truncate(args) => truncate(args),
        Command::Sweep(args) => sweep(args),
        Command::Fidelity(args) => fidelity(args),
        Command::Povm(args) => povm(args),
        Command::OracleCheck(args) => oracle_check(args),
    }
}

fn truncate(args: TruncateArgs) -> Result<()> {
    let params = args.device.params()?;
    let input = args.input.prepare()?;
    let config: Configuration = args.config.into();
    let herald = match config {
        Configuration::Max => truncate_max(&input.state, &params, args.count)?,
        Configuration::Min => truncate_min(&input.state, &params, args.count)?,
    };
    let metrics = MetricReport::evaluate(&herald.state);
    let doc = json!({
        "config": config,
        "N": args.count,
        "params": {
            "s": params.s,
            "phi_minus_beta": params.phi,
            "theta": params.theta,
        },
        "input": input,
        "input_tail_mass": input.tail_mass,
        "probability": herald.probability,
        "tail_bound": herald.tail_bound,
        "state": herald.state,
        "metrics": metrics,
    });
    args.out.write(&to_json(&doc)?)
}

fn fidelity(args: FidelityArgs) -> Result<()> {
    let params = args.device.params()?;
    let input = args.input.prepare()?;
    let model = DetectorModel::new(args.eta, args.nu)?;
    let config: Configuration = args.config.into();
    let report = heralded_fidelity(&input.state, &params, config, args.count, &model)?;
    let mut doc = json!({
        "config": config,
        "N": args.count,
        "eta": args.eta,
        "nu": args.nu,
        "params": {
            "s": params.s,
            "phi_minus_beta": params.phi,
            "theta": params.theta,
        },
        "input": input,
        "fidelity": report.fidelity,
        "herald_probability": report.herald_probability,
        "ideal_probability": report.ideal_probability,
        "purity": report.rho.purity(),
    });
    if args.with_rho {
        doc["rho"] = serde_json::to_value(&report.rho)
            .map_err(|e| Error::InvalidParameter(format!("serializing output: {e}")))?;
    }
    args.out.write(&to_json(&doc)?)
}

fn povm(args: PovmArgs) -> Result<()> {
    let model = DetectorModel::new(args.eta, args.nu)?;
    let element = povm_element(&model, args.count, args.dim)?;
    let doc = json!({
        "eta": args.eta,
        "nu": args.nu,
        "N": args.count,
        "dim": args.dim,
        "diagonal": element.diagonal,
        "truncation_bound": model.truncation_bound(args.count, args.dim),
    });
    args.out.write(&to_json(&doc)?)
}

fn sweep(args: SweepArgs) -> Result<()> {
    let mut spec = match &args.preset {
        Some(name) => SweepSpec::preset(name)?,
        None => {
            if args.axes.is_empty() {
                return Err(Error::InvalidParameter(
                    "a sweep needs --preset or at least one --axis".into(),
                ));
            }
            let mut spec = SweepSpec::preset("fig2")?;
            spec.counts = vec![1];
            spec
        }
    };
    if !args.axes.is_empty() {
        spec.axes = args
            .axes
            .iter()
            .map(|a| a.parse::<Axis>())
            .collect::<Result<_>>()?;
    }
    if let Some(v) = args.s {
        spec.fixed.s = v;
    }
    if let Some(v) = args.phi_minus_beta {
        spec.fixed.phi_minus_beta = v;
    }
    if let Some(v) = args.theta {
        spec.fixed.theta = v;
    }
    if let Some(v) = args.alpha {
        spec.fixed.alpha_mod = v;
    }
    if !args.counts.is_empty() {
        spec.counts = args.counts.clone();
    }
    if let Some(c) = args.config {
        spec.config = c.into();
    }
    if let Some(m) = args.mode {
        spec.mode = m.into();
    }
    if let Some(v) = args.eta {
        spec.fixed.eta = v;
    }
    if let Some(v) = args.nu {
        spec.fixed.nu = v;
    }
    if args.dim.is_some() {
        spec.input_dim = args.dim;
    }
    if args.workers == Some(0) {
        return Err(Error::InvalidParameter("--workers must be positive".into()));
    }
    let table = sweep::run_sweep(&spec, args.workers)?;
    let mut buf = Vec::new();
    table
        .write_csv(&mut buf)
        .map_err(|e| Error::InvalidParameter(format!("writing CSV: {e}")))?;
    args.out
        .write(&String::from_utf8(buf).expect("CSV is ASCII"))
}

/// Grid used by `oracle-check`.
pub const ORACLE_S: [f64; 4] = [0.0, 0.25, 0.5, 0.8];
pub const ORACLE_THETA: [f64; 5] = [
    0.0,
    FRAC_PI_2 / 4.0,
    FRAC_PI_4,
    3.0 * FRAC_PI_2 / 4.0,
    FRAC_PI_2,
];
pub const ORACLE_PHI: [f64; 3] = [0.0, FRAC_PI_2, std::f64::consts::PI];
pub const ORACLE_ALPHA: [f64; 3] = [0.0, 1.0, 1.5];

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleDeviation {
    pub s: f64,
    pub theta: f64,
    pub phi: f64,
    pub alpha: f64,
    pub max_abs_difference: f64,
}

/// Largest amplitude difference between the closed form and the oracle over
/// the grid, with coherent inputs cut at `dim` and renormalized.
pub fn oracle_grid(dim: usize, options: OracleOptions) -> Result<Vec<OracleDeviation>> {
    use rayon::prelude::*;
    let cut = Cutoffs::uniform(dim)?;
    let mut points = Vec::new();
    for &s in &ORACLE_S {
        for &theta in &ORACLE_THETA {
            for &phi in &ORACLE_PHI {
                for &alpha in &ORACLE_ALPHA {
                    points.push((s, theta, phi, alpha));
                }
            }
        }
    }
    points
        .par_iter()
        .map(|&(s, theta, phi, alpha)| {
            let psi: FockVector = coherent_coefficients(alpha.into(), dim)?
                .state
                .normalize()?;
            let params = DeviceParams::new(s, phi, theta)?;
            let closed = output_state_closed_form(&psi, &params, cut)?;
            let oracle = output_state_oracle(&psi, &params, cut, options)?;
            Ok(OracleDeviation {
                s,
                theta,
                phi,
                alpha,
                max_abs_difference: closed.max_abs_difference(&oracle),
            })
        })
        .collect()
}

fn oracle_check(args: OracleCheckArgs) -> Result<()> {
    let options = OracleOptions {
        padding: args.padding,
        ..OracleOptions::default()
    };
    let deviations = oracle_grid(args.dim, options)?;
    let worst = deviations
        .iter()
        .copied()
        .max_by(|a, b| a.max_abs_difference.total_cmp(&b.max_abs_difference))
        .expect("grid is non-empty");
    let doc = json!({
        "dim": args.dim,
        "padding": args.padding,
        "points": deviations.len(),
        "max_abs_difference": worst.max_abs_difference,
        "worst": worst,
    });
    args.out.write(&to_json(&doc)?)
}
