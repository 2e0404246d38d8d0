//! Command-line surface and its translation into experiment configs.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use bai_core::fc_algos::{AlphaChoice, ExplorationRate, SprtStatistic};
use bai_core::harness::{Algorithm, AllocationRule, ExperimentConfig, Grid};
use bai_core::InstanceSpec;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

pub const DEFAULT_REPS: u64 = 10_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Debug, Parser)]
#[command(name = "bai", version, about = "Best-arm identification complexities, bounds and experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the two-armed complexity quantities of an instance.
    Complexity(InstanceArgs),
    /// Print lower bounds on sample complexity and error probability.
    Bound(BoundArgs),
    /// Run a fixed-confidence experiment and write records as CSV.
    SimulateFc(SimulateFcArgs),
    /// Run a fixed-budget experiment and write records as CSV.
    SimulateFb(SimulateFbArgs),
    /// Compare the deviation bound with simulated crossing frequencies.
    LilCheck(LilArgs),
    /// Run a preset experiment grid and write records as CSV.
    ReproduceFigure(FigureArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct InstanceArgs {
    /// gaussian, bernoulli or exponential.
    #[arg(long)]
    pub family: Option<String>,
    /// Arm means, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub means: Option<Vec<f64>>,
    /// Arm variances (Gaussian only), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub variances: Option<Vec<f64>>,
    /// Number of best arms to identify.
    #[arg(long)]
    pub m: Option<usize>,
}

impl InstanceArgs {
    /// Flags override the fields of `base`.
    pub fn merge(&self, base: Option<InstanceSpec>) -> Result<InstanceSpec> {
        let base = base.unwrap_or(InstanceSpec {
            family: String::new(),
            means: Vec::new(),
            variances: None,
            m: 1,
        });
        let spec = InstanceSpec {
            family: self.family.clone().unwrap_or(base.family),
            means: self.means.clone().unwrap_or(base.means),
            variances: self.variances.clone().or(base.variances),
            m: self.m.unwrap_or(base.m),
        };
        if spec.family.is_empty() {
            bail!("missing --family");
        }
        if spec.means.is_empty() {
            bail!("missing --means");
        }
        Ok(spec)
    }
}

#[derive(Debug, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Confidence level for the fixed-confidence bounds.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Budget for the fixed-budget bounds (common-variance Gaussian models).
    #[arg(long)]
    pub budget: Option<u64>,
    /// Slack for the ε-relaxed bound (Bernoulli models).
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Monte Carlo replications per grid cell [default: 10000].
    #[arg(long)]
    pub reps: Option<u64>,
    /// Master seed [default: 1].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long, env = "BAI_WORKERS")]
    pub workers: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AlgorithmKind {
    Elimination,
    AlphaElimination,
    Sglrt,
    Sprt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatisticArg {
    ExactLlr,
    Unscaled,
}

impl From<StatisticArg> for SprtStatistic {
    fn from(s: StatisticArg) -> Self {
        match s {
            StatisticArg::ExactLlr => SprtStatistic::ExactLlr,
            StatisticArg::Unscaled => SprtStatistic::Unscaled,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AllocArg {
    Uniform,
    Optimal,
}

impl From<AllocArg> for AllocationRule {
    fn from(a: AllocArg) -> Self {
        match a {
            AllocArg::Uniform => AllocationRule::Uniform,
            AllocArg::Optimal => AllocationRule::Optimal,
        }
    }
}

#[derive(Debug, Args)]
pub struct SimulateFcArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    #[arg(long, value_enum)]
    pub algorithm: Option<AlgorithmKind>,
    /// Exploration rate, e.g. robbins-log-t, iterated-log, plain-log.
    #[arg(long)]
    pub rate: Option<ExplorationRate>,
    /// Allocation fraction for alpha-elimination: `auto` or a number in (0, 1).
    #[arg(long, value_parser = parse_alpha)]
    pub alpha: Option<AlphaChoice>,
    #[arg(long, value_enum)]
    pub statistic: Option<StatisticArg>,
    /// Safety cap on the number of draws per run.
    #[arg(long)]
    pub tau_max: Option<u64>,
    /// Confidence levels: `a,b,c` or `start:stop:step`.
    #[arg(long, value_parser = parse_delta_grid)]
    pub deltas: Option<DeltaGrid>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SimulateFbArgs {
    #[command(flatten)]
    pub instance: InstanceArgs,
    /// Static allocation rule [default: optimal].
    #[arg(long, value_enum)]
    pub alloc: Option<AllocArg>,
    /// Budgets: `a,b,c` or `start:stop:step`.
    #[arg(long, value_parser = parse_budget_grid)]
    pub budgets: Option<BudgetGrid>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct LilArgs {
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Deviation levels x.
    #[arg(long, value_parser = parse_delta_grid, default_value = "3,5")]
    pub x: DeltaGrid,
    /// Exponents β.
    #[arg(long, value_parser = parse_delta_grid, default_value = "1.5,2")]
    pub beta: DeltaGrid,
    #[arg(long, default_value_t = 10_000)]
    pub horizon: u64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, env = "BAI_WORKERS")]
    pub workers: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig3Easy,
    Fig3Hard,
    Fig4Left,
    Fig4Right,
}

#[derive(Debug, Args)]
pub struct FigureArgs {
    #[arg(value_enum)]
    pub figure: Figure,
    #[arg(long, default_value_t = DEFAULT_REPS)]
    pub reps: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, env = "BAI_WORKERS")]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaGrid(pub Vec<f64>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BudgetGrid(pub Vec<u64>);

/// `a,b,c` or an inclusive `start:stop:step` range.
pub fn parse_delta_grid(s: &str) -> Result<DeltaGrid, String> {
    let values = if let Some((start, stop, step)) = split_range(s) {
        let (start, stop, step): (f64, f64, f64) = (num(start)?, num(stop)?, num(step)?);
        if step.is_nan() || step <= 0.0 || stop < start {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| start + i as f64 * step).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<f64>, _>>()?
    };
    Ok(DeltaGrid(values))
}

pub fn parse_budget_grid(s: &str) -> Result<BudgetGrid, String> {
    let values = if let Some((start, stop, step)) = split_range(s) {
        let (start, stop, step): (u64, u64, u64) = (num(start)?, num(stop)?, num(step)?);
        if step == 0 || stop < start {
            return Err(format!("range '{s}' needs step > 0 and stop >= start"));
        }
        (start..=stop).step_by(step as usize).collect()
    } else {
        s.split(',').map(num).collect::<Result<Vec<u64>, _>>()?
    };
    Ok(BudgetGrid(values))
}

fn split_range(s: &str) -> Option<(&str, &str, &str)> {
    let mut parts = s.split(':');
    match (parts.next(), parts.next(), parts.next(), parts.next()) {
        (Some(a), Some(b), Some(c), None) => Some((a, b, c)),
        _ => None,
    }
}

fn num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.trim().parse().map_err(|_| format!("'{s}' is not a valid number"))
}

pub fn parse_alpha(s: &str) -> Result<AlphaChoice, String> {
    if s == "auto" {
        return Ok(AlphaChoice::Auto);
    }
    let a: f64 = num(s)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(format!("α must be `auto` or lie in (0, 1), got {a}"));
    }
    Ok(AlphaChoice::Fixed(a))
}

/// Every field optional so that a config file can be completed by flags.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub instance: Option<InstanceSpec>,
    pub algorithm: Option<Algorithm>,
    pub grid: Option<Grid>,
    pub replications: Option<u64>,
    pub master_seed: Option<u64>,
}

pub fn load_config(path: Option<&Path>) -> Result<PartialConfig> {
    let Some(path) = path else {
        return Ok(PartialConfig::default());
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn default_rate(kind: AlgorithmKind) -> ExplorationRate {
    match kind {
        AlgorithmKind::Elimination | AlgorithmKind::Sprt => ExplorationRate::IteratedLog,
        AlgorithmKind::AlphaElimination => ExplorationRate::AlphaElimRate,
        AlgorithmKind::Sglrt => ExplorationRate::SglrtRate,
    }
}

impl SimulateFcArgs {
    fn algorithm(&self, base: Option<Algorithm>) -> Result<Algorithm> {
        let mut alg = match (self.algorithm, base) {
            (Some(kind), _) => {
                let rate = default_rate(kind);
                match kind {
                    AlgorithmKind::Elimination => Algorithm::Elimination { rate, tau_max: None },
                    AlgorithmKind::AlphaElimination => Algorithm::AlphaElimination {
                        rate,
                        alpha: AlphaChoice::Auto,
                        tau_max: None,
                    },
                    AlgorithmKind::Sglrt => Algorithm::Sglrt { rate, tau_max: None },
                    AlgorithmKind::Sprt => Algorithm::Sprt {
                        statistic: SprtStatistic::ExactLlr,
                        tau_max: None,
                    },
                }
            }
            (None, Some(alg)) => alg,
            (None, None) => bail!("missing --algorithm"),
        };
        match &mut alg {
            Algorithm::Elimination { rate, tau_max } | Algorithm::Sglrt { rate, tau_max } => {
                if self.alpha.is_some() || self.statistic.is_some() {
                    bail!("--alpha and --statistic do not apply to {}", alg.id());
                }
                *rate = self.rate.unwrap_or(*rate);
                *tau_max = self.tau_max.or(*tau_max);
            }
            Algorithm::AlphaElimination { rate, alpha, tau_max } => {
                if self.statistic.is_some() {
                    bail!("--statistic does not apply to alpha-elimination");
                }
                *rate = self.rate.unwrap_or(*rate);
                *alpha = self.alpha.unwrap_or(*alpha);
                *tau_max = self.tau_max.or(*tau_max);
            }
            Algorithm::Sprt { statistic, tau_max } => {
                if self.rate.is_some() || self.alpha.is_some() {
                    bail!("--rate and --alpha do not apply to the SPRT");
                }
                *statistic = self.statistic.map(Into::into).unwrap_or(*statistic);
                *tau_max = self.tau_max.or(*tau_max);
            }
            Algorithm::Static { .. } => bail!("the config describes a fixed-budget algorithm; use simulate-fb"),
        }
        Ok(alg)
    }

    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let base = load_config(self.run.config.as_deref())?;
        let grid = match (&self.deltas, base.grid) {
            (Some(d), _) => Grid::Delta(d.0.clone()),
            (None, Some(g @ Grid::Delta(_))) => g,
            (None, Some(Grid::Budget(_))) => bail!("the config has a budget grid; use simulate-fb"),
            (None, None) => bail!("missing --deltas"),
        };
        Ok(ExperimentConfig {
            instance: self.instance.merge(base.instance)?,
            algorithm: self.algorithm(base.algorithm)?,
            grid,
            replications: self.run.reps.or(base.replications).unwrap_or(DEFAULT_REPS),
            master_seed: self.run.seed.or(base.master_seed).unwrap_or(DEFAULT_SEED),
        })
    }
}

impl SimulateFbArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let base = load_config(self.run.config.as_deref())?;
        let grid = match (&self.budgets, base.grid) {
            (Some(b), _) => Grid::Budget(b.0.clone()),
            (None, Some(g @ Grid::Budget(_))) => g,
            (None, Some(Grid::Delta(_))) => bail!("the config has a δ grid; use simulate-fc"),
            (None, None) => bail!("missing --budgets"),
        };
        let algorithm = match (self.alloc, base.algorithm) {
            (Some(a), _) => Algorithm::Static { allocation: a.into() },
            (None, Some(alg @ Algorithm::Static { .. })) => alg,
            (None, Some(other)) => return Err(anyhow!("{} is not a fixed-budget algorithm", other.id())),
            (None, None) => Algorithm::Static {
                allocation: AllocationRule::Optimal,
            },
        };
        Ok(ExperimentConfig {
            instance: self.instance.merge(base.instance)?,
            algorithm,
            grid,
            replications: self.run.reps.or(base.replications).unwrap_or(DEFAULT_REPS),
            master_seed: self.run.seed.or(base.master_seed).unwrap_or(DEFAULT_SEED),
        })
    }
}
