//! Preset experiment grids for the two-armed Gaussian and Bernoulli
//! comparisons of fixed-confidence and fixed-budget strategies.

use bai_core::fc_algos::{ExplorationRate, SprtStatistic};
use bai_core::harness::{Algorithm, AllocationRule, ExperimentConfig, Grid};
use bai_core::InstanceSpec;

use crate::args::Figure;

const DELTAS: [f64; 6] = [0.1, 0.05, 0.02, 0.01, 0.005, 0.001];

fn gaussian(mu1: f64) -> InstanceSpec {
    InstanceSpec {
        family: "gaussian".into(),
        means: vec![mu1, 0.0],
        variances: Some(vec![0.25, 0.25]),
        m: 1,
    }
}

fn bernoulli(mu1: f64, mu2: f64) -> InstanceSpec {
    InstanceSpec {
        family: "bernoulli".into(),
        means: vec![mu1, mu2],
        variances: None,
        m: 1,
    }
}

fn budgets(start: u64, step: u64, count: u64) -> Grid {
    Grid::Budget((0..count).map(|i| start + i * step).collect())
}

/// Experiments behind a figure, in output order.
pub fn preset(figure: Figure, replications: u64, master_seed: u64) -> Vec<ExperimentConfig> {
    let cfg = |instance: &InstanceSpec, algorithm, grid| ExperimentConfig {
        instance: instance.clone(),
        algorithm,
        grid,
        replications,
        master_seed,
    };
    let deltas = || Grid::Delta(DELTAS.to_vec());
    let elim = |rate| Algorithm::Elimination { rate, tau_max: None };
    let sglrt = |rate| Algorithm::Sglrt { rate, tau_max: None };
    let uniform = Algorithm::Static {
        allocation: AllocationRule::Uniform,
    };

    match figure {
        Figure::Fig3Easy | Figure::Fig3Hard => {
            let (inst, fb) = match figure {
                Figure::Fig3Easy => (gaussian(0.5), budgets(10, 10, 10)),
                _ => (gaussian(0.01), budgets(20_000, 20_000, 10)),
            };
            vec![
                cfg(&inst, elim(ExplorationRate::RobbinsLogT), deltas()),
                cfg(&inst, elim(ExplorationRate::ConjecturedLogLog), deltas()),
                cfg(&inst, elim(ExplorationRate::PlainLog), deltas()),
                cfg(
                    &inst,
                    Algorithm::Sprt {
                        statistic: SprtStatistic::ExactLlr,
                        tau_max: None,
                    },
                    deltas(),
                ),
                cfg(&inst, uniform, fb),
            ]
        }
        Figure::Fig4Left | Figure::Fig4Right => {
            let (inst, fb) = match figure {
                Figure::Fig4Left => (bernoulli(0.2, 0.1), budgets(100, 100, 10)),
                _ => (bernoulli(0.51, 0.5), budgets(2_000, 2_000, 10)),
            };
            vec![
                cfg(&inst, sglrt(ExplorationRate::PlainLog), deltas()),
                cfg(&inst, sglrt(ExplorationRate::ConjecturedLogLog), deltas()),
                cfg(&inst, elim(ExplorationRate::PlainLog), deltas()),
                cfg(&inst, elim(ExplorationRate::ConjecturedLogLog), deltas()),
                cfg(&inst, uniform, fb),
            ]
        }
    }
}
