use std::fs;
use std::path::PathBuf;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(name = "coorbit", version, about = "Batch numerical verification of coorbit atomic decompositions")]
#[command(args_override_self = true)]
pub struct Cli {
    /// Flat `key = value` file supplying flags; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Report path; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analysis/synthesis roundtrip over a seeded random band-limited family.
    ShannonRoundtrip(RoundtripArgs),
    /// Weighted Young inequality on preset function pairs.
    YoungCheck(YoungArgs),
    /// Window scan of oscillation norms of the kernel or the mother atom.
    OscReport(OscArgs),
    /// Smallest-singular-value certificates for the coefficient maps.
    Injectivity(InjectivityArgs),
    /// L_t bound for the inverse multiplier of the left inverse.
    MultiplierBound(MultiplierArgs),
    /// Modulation kernel cross-checks and mixed-smoothness report.
    ModulationSuite(ModulationArgs),
    /// Kernel derivative closed forms against finite differences.
    DerivativeCheck(DerivativeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::ShannonRoundtrip(_) => "shannon-roundtrip",
            Command::YoungCheck(_) => "young-check",
            Command::OscReport(_) => "osc-report",
            Command::Injectivity(_) => "injectivity",
            Command::MultiplierBound(_) => "multiplier-bound",
            Command::ModulationSuite(_) => "modulation-suite",
            Command::DerivativeCheck(_) => "derivative-check",
        }
    }

    pub fn output(&self) -> &Output {
        match self {
            Command::ShannonRoundtrip(a) => &a.output,
            Command::YoungCheck(a) => &a.output,
            Command::OscReport(a) => &a.output,
            Command::Injectivity(a) => &a.output,
            Command::MultiplierBound(a) => &a.output,
            Command::ModulationSuite(a) => &a.output,
            Command::DerivativeCheck(a) => &a.output,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct RoundtripArgs {
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.5)]
    pub tau: f64,
    /// Half width L of the periodic window [−L, L).
    #[arg(long = "halfwidth", default_value_t = 64.0)]
    pub half_width: f64,
    #[arg(long, default_value_t = 1.0 / 64.0)]
    pub spacing: f64,
    #[arg(long = "p-list", value_delimiter = ',', action = ArgAction::Set, default_values_t = [1.5, 2.0, 3.0, 4.0])]
    pub p_list: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct YoungArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long)]
    pub q: f64,
    #[arg(long)]
    pub r: f64,
    /// Control weight preset: const, poly:a, log or exp:rate.
    #[arg(long, default_value = "const")]
    pub weights: String,
    /// Moderate weight preset; defaults to the control weight.
    #[arg(long)]
    pub moderate: Option<String>,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OscTarget {
    #[value(name = "K")]
    #[serde(rename = "K")]
    K,
    Atom,
}

#[derive(Debug, Args, Serialize)]
pub struct OscArgs {
    #[arg(long, value_enum, ignore_case = true, default_value_t = OscTarget::K)]
    pub target: OscTarget,
    /// Half width of the symmetric neighbourhood Q.
    #[arg(long = "Q", default_value_t = 1.0)]
    pub q: f64,
    #[arg(long = "p-list", value_delimiter = ',', action = ArgAction::Set, default_values_t = [1.0, 1.5, 2.0, 4.0])]
    pub p_list: Vec<f64>,
    #[arg(long, value_delimiter = ',', action = ArgAction::Set, default_values_t = [16.0, 64.0, 256.0])]
    pub windows: Vec<f64>,
    #[arg(long, default_value = "const")]
    pub weight: String,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.125)]
    pub spacing: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SettingKind {
    Shannon,
    Modulation,
}

#[derive(Debug, Args, Serialize)]
pub struct InjectivityArgs {
    #[arg(long, value_enum, default_value_t = SettingKind::Shannon)]
    pub setting: SettingKind,
    /// Lattice truncation radius; defaults to 128 (shannon) or 4 (modulation).
    #[arg(long = "R")]
    pub radius: Option<u32>,
    /// Trial-space dimension; defaults to 64 (shannon) or 25 (modulation).
    #[arg(long = "band-dim")]
    pub band_dim: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    /// Partition scale; defaults to 1/(2ω). Shannon only.
    #[arg(long)]
    pub tau: Option<f64>,
    /// Spacing of the twisted-translate centres. Modulation only.
    #[arg(long = "basis-step", default_value_t = 0.5)]
    pub basis_step: f64,
    /// Midpoint subdivisions per unit box. Modulation only.
    #[arg(long, default_value_t = 32)]
    pub quadrature: usize,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct MultiplierArgs {
    #[arg(long = "t-list", value_delimiter = ',', action = ArgAction::Set, default_values_t = [1.5, 2.0, 3.0])]
    pub t_list: Vec<f64>,
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct ModulationArgs {
    /// Relative residual below which a function counts as reproducing.
    #[arg(long, default_value_t = 2e-2)]
    pub membership: f64,
    /// Relative tolerance of the identity checks.
    #[arg(long, default_value_t = 2e-2)]
    pub tolerance: f64,
    /// Maximum error of the sampled kernel spectrum.
    #[arg(long = "spectrum-tolerance", default_value_t = 0.03)]
    pub spectrum_tolerance: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

#[derive(Debug, Args, Serialize)]
pub struct DerivativeArgs {
    #[arg(long = "n-max", default_value_t = 3)]
    pub n_max: u32,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    #[arg(long, default_value_t = 0.1)]
    pub lo: f64,
    #[arg(long, default_value_t = 20.0)]
    pub hi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub omega: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(skip)]
    pub output: Output,
}

/// Locates `--config FILE` or `--config=FILE` in raw arguments.
fn config_path(args: &[String]) -> Option<String> {
    let mut iter = args.iter();
    while let Some(arg) = iter.next() {
        if arg == "--config" {
            return iter.next().cloned();
        }
        if let Some(path) = arg.strip_prefix("--config=") {
            return Some(path.to_owned());
        }
    }
    None
}

/// Turns `key = value` lines into `--key value` pairs; `#` starts a comment.
pub fn config_flags(text: &str) -> Result<Vec<String>, String> {
    let mut flags = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key = value, got {raw:?}", lineno + 1))?;
        let key = key.trim().trim_start_matches("--");
        if key.is_empty() || key == "config" {
            return Err(format!("config line {}: invalid key {key:?}", lineno + 1));
        }
        flags.push(format!("--{key}"));
        flags.push(value.trim().to_owned());
    }
    Ok(flags)
}

/// Splices config-file flags right after the subcommand so later command-line flags win.
pub fn with_config(args: Vec<String>) -> Result<Vec<String>, String> {
    let Some(path) = config_path(&args) else {
        return Ok(args);
    };
    let text = fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let flags = config_flags(&text)?;
    let mut skip_value = false;
    let position = args.iter().enumerate().skip(1).find_map(|(i, a)| {
        if skip_value {
            skip_value = false;
            return None;
        }
        if a == "--config" {
            skip_value = true;
            return None;
        }
        (!a.starts_with('-')).then_some(i + 1)
    });
    let Some(position) = position else {
        return Ok(args);
    };
    let mut out = args[..position].to_vec();
    out.extend(flags);
    out.extend_from_slice(&args[position..]);
    Ok(out)
}
