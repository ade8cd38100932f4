use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Parser, Debug)]
#[command(name = "recurlab", version, about = "Exact experiments on under- and over-recurrent correlation sequences")]
pub struct Cli {
    /// Run the experiment described by a JSON config instead of a subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[arg(long, global = true, default_value = "out")]
    pub out_dir: PathBuf,

    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, global = true, env = "RECURLAB_THREADS")]
    pub threads: Option<usize>,

    /// Bits of precision for square-root enclosures.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION)]
    pub precision: u32,

    /// Largest enclosure width or float error accepted by certificates.
    #[arg(long, global = true, default_value_t = DEFAULT_TOLERANCE)]
    pub tolerance: f64,

    #[command(subcommand)]
    pub command: Option<Command>,
}

pub const DEFAULT_PRECISION: u32 = 128;
pub const DEFAULT_TOLERANCE: f64 = 1e-6;

fn default_out_dir() -> PathBuf {
    PathBuf::from("out")
}

fn default_precision() -> u32 {
    DEFAULT_PRECISION
}

fn default_tolerance() -> f64 {
    DEFAULT_TOLERANCE
}

/// One invocation, as read from `--config` or assembled from flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_out_dir")]
    pub out_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    pub command: Command,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "snake_case")]
pub enum Command {
    /// Fourier coefficients of a Riesz product.
    Riesz(RieszArgs),
    /// Key-bound checks for measures with nonpositive coefficients.
    Spectral(SpectralArgs),
    /// Correlations of the explicit Bernoulli sets, with the automaton oracle.
    Bernoulli(BernoulliArgs),
    #[command(subcommand)]
    Rademacher(RademacherCmd),
    #[command(subcommand)]
    Skew(SkewCmd),
    #[command(subcommand)]
    Corr(CorrCmd),
    #[command(subcommand)]
    Density(DensityCmd),
    #[command(subcommand)]
    Suite(SuiteCmd),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RieszArgs {
    /// `inv_sqrt`, `constant:c` or `list:a0,a1,...`.
    #[arg(long, default_value = "inv_sqrt")]
    pub amplitudes: String,
    #[arg(long, default_value_t = 100)]
    pub n_max: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralArgs {
    /// A coefficient rule such as `geometric:-1/4:1/2`, or `suite`.
    #[arg(long, default_value = "suite")]
    pub rule: String,
    #[arg(long, default_value_t = 256)]
    pub n_max: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetArg {
    Over,
    Under,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliArgs {
    #[arg(value_enum)]
    pub set: SetArg,
    #[arg(long)]
    pub p0: Option<String>,
    #[arg(long)]
    pub p1: Option<String>,
    #[arg(long)]
    pub p2: Option<String>,
    /// Use the one-parameter family instead of explicit probabilities.
    #[arg(long, conflicts_with_all = ["p0", "p1", "p2"])]
    #[serde(default)]
    pub family: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub n_max: u64,
    /// Also evaluate every correlation with the automaton oracle.
    #[arg(long)]
    #[serde(default)]
    pub oracle: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Under,
    Over,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum RademacherCmd {
    /// Pair correlations of `f = g + sum a_k T^k g` under a sign partition.
    Pair(PairArgs),
    /// Multiple correlations of `f = (1 + h) / 2`.
    Multi(MultiArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairArgs {
    /// Sign pattern such as `+-`, `-`, `odd`.
    #[arg(long, default_value = "+-")]
    pub partition: String,
    #[arg(long, default_value = "1/2")]
    pub c: String,
    #[arg(long, default_value = "1/2")]
    pub r: String,
    #[arg(long, default_value_t = 40)]
    pub n_max: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiArgs {
    #[arg(long)]
    pub d: usize,
    /// Comma-separated distinct shifts; defaults to every `d`-subset of
    /// `1..=span`.
    #[arg(long, value_delimiter = ',')]
    #[serde(default)]
    pub shifts: Option<Vec<i64>>,
    #[arg(long, default_value_t = 8)]
    #[serde(default = "default_span")]
    pub span: i64,
    #[arg(long, value_enum, default_value = "under")]
    pub variant: VariantArg,
}

fn default_span() -> i64 {
    8
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Summable,
    Convex,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SkewCmd {
    /// Skew system whose defects equal a target sequence.
    Realize(SkewArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkewArgs {
    #[arg(long)]
    pub target: String,
    #[arg(long, value_enum, default_value = "summable")]
    pub mode: ModeArg,
    #[arg(long, default_value_t = 64)]
    pub n_max: u64,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum CorrCmd {
    /// Consistency and transfer checks of the symbolic measure.
    Build(CorrBuildArgs),
    /// Sample a trajectory, one byte per symbol.
    Sample(CorrSampleArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrBuildArgs {
    /// e.g. `series:-`, `multiple:under:3`, `skew:geometric:1/16:1/3`,
    /// `bernoulli:under:1/3,1/3,1/3`, `half`.
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value_t = 10)]
    pub check_depth: usize,
    #[arg(long, default_value_t = 10)]
    #[serde(default = "default_pair_max")]
    pub pair_max: u64,
    #[arg(long, default_value_t = 6)]
    #[serde(default = "default_triple_max")]
    pub triple_max: u64,
}

fn default_pair_max() -> u64 {
    10
}

fn default_triple_max() -> u64 {
    6
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrSampleArgs {
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value_t = 1_000_000)]
    pub n: usize,
    /// Output file, relative to the output directory.
    #[arg(long, default_value = "bits.raw")]
    pub out: PathBuf,
    /// Use the order-m Markov approximation instead of exact sampling.
    #[arg(long)]
    #[serde(default)]
    pub markov_order: Option<usize>,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum DensityCmd {
    /// Densities of `E ∩ (E - n)` along sampled trajectories.
    Run(DensityArgs),
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityArgs {
    #[arg(long)]
    pub source: String,
    #[arg(long, default_value_t = 6)]
    pub n_max: u64,
    /// Trajectory length.
    #[arg(long = "N", default_value_t = 1_000_000)]
    #[serde(rename = "N")]
    pub len: usize,
    /// Number of seeds, starting at `--seed`.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long, default_value = "report.json")]
    pub out: PathBuf,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum SuiteCmd {
    /// Run the standard set of checks and print the summary.
    Run(SuiteArgs),
    /// Summarize the check files in the output directory.
    Report,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteArgs {
    /// Trajectory length for the density check.
    #[arg(long = "N", default_value_t = 200_000)]
    #[serde(rename = "N", default = "default_suite_len")]
    pub len: usize,
}

fn default_suite_len() -> usize {
    200_000
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::suite_commands;

    fn config(command: Command) -> ExperimentConfig {
        ExperimentConfig {
            out_dir: PathBuf::from("out"),
            seed: 5,
            threads: Some(2),
            precision: 96,
            tolerance: 1e-9,
            command,
        }
    }

    #[test]
    fn configs_round_trip() {
        let mut commands = suite_commands(1000);
        commands.push(Command::Suite(SuiteCmd::Report));
        commands.push(Command::Corr(CorrCmd::Sample(CorrSampleArgs {
            source: "half".into(),
            n: 10,
            out: "b.raw".into(),
            markov_order: Some(3),
        })));
        for c in commands {
            let cfg = config(c);
            let text = serde_json::to_string(&cfg).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&text).unwrap();
            assert_eq!(back, cfg, "{text}");
            assert_eq!(serde_json::to_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn defaults_fill_missing_globals() {
        let cfg: ExperimentConfig =
            serde_json::from_str(r#"{"command": {"subcommand": "suite", "op": "report"}}"#).unwrap();
        assert_eq!(cfg.out_dir, PathBuf::from("out"));
        assert_eq!(cfg.precision, DEFAULT_PRECISION);
        assert_eq!(cfg.tolerance, DEFAULT_TOLERANCE);
    }

    #[test]
    fn flags_parse() {
        let cli = Cli::try_parse_from(["recurlab", "--seed", "9", "density", "run", "--source", "half", "--N", "100"]).unwrap();
        assert_eq!(cli.seed, 9);
        match cli.command {
            Some(Command::Density(DensityCmd::Run(a))) => assert_eq!(a.len, 100),
            other => panic!("{other:?}"),
        }
        assert!(Cli::try_parse_from(["recurlab", "bernoulli", "over", "--family", "1/4", "--p0", "1/3"]).is_err());
    }
}
