//! Fixed-confidence strategies for two arms.
//!
//! Every run is single-threaded and fully determined by the generator it
//! is handed. Runs that hit the safety cap `tau_max` return an outcome with
//! `exhausted` set instead of failing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::complexity::{bernoulli_i_star, i_star_fc};
use crate::dists::{ArmDistribution, ArmParams, ExpFamily, RngState};
use crate::error::{domain, BaiError, Result};
use crate::instance::BanditInstance;

/// Below this δ the iterated-log rate is covered by its guarantee, which is
/// only stated for "δ small enough". Larger values are accepted but are
/// backed by simulation evidence only.
pub const ITERATED_LOG_SAFE_DELTA: f64 = 0.01;

/// Exploration rate β(t, δ) inflating a stopping statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplorationRate {
    /// `((t+1)/t)·log((t+1)/(2δ))`.
    RobbinsLogT,
    /// `log(1/δ) + ¾·log log(1/δ) + (3/2)·log(1 + log(t/2))`; needs δ < 1/e.
    IteratedLog,
    /// `log(t/δ) + 2·log log(6t)`.
    AlphaElimRate,
    /// `2·log(t·(log 3t)²/δ)`.
    SglrtRate,
    /// `log((log t + 1)/δ)`. Conjectured to be δ-PAC, not proven.
    ConjecturedLogLog,
    /// `log(1/δ)`. Not δ-PAC.
    PlainLog,
}

impl ExplorationRate {
    pub const ALL: [ExplorationRate; 6] = [
        Self::RobbinsLogT,
        Self::IteratedLog,
        Self::AlphaElimRate,
        Self::SglrtRate,
        Self::ConjecturedLogLog,
        Self::PlainLog,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::RobbinsLogT => "robbins-log-t",
            Self::IteratedLog => "iterated-log",
            Self::AlphaElimRate => "alpha-elim-rate",
            Self::SglrtRate => "sglrt-rate",
            Self::ConjecturedLogLog => "conjectured-log-log",
            Self::PlainLog => "plain-log",
        }
    }

    /// Upper end (exclusive) of the admissible δ range.
    pub fn delta_max(&self) -> f64 {
        match self {
            Self::IteratedLog => (-1.0f64).exp(),
            _ => 1.0,
        }
    }

    /// Validates δ once so that [`Self::value`] can run unchecked in loops.
    pub fn check_delta(&self, delta: f64) -> Result<()> {
        if !(delta > 0.0 && delta < self.delta_max()) {
            return domain(format!(
                "{} needs δ in (0, {}), got {delta}",
                self.name(),
                self.delta_max()
            ));
        }
        Ok(())
    }

    /// True when δ is admissible but outside the range its guarantee covers.
    pub fn warns_at(&self, delta: f64) -> bool {
        matches!(self, Self::IteratedLog) && delta > ITERATED_LOG_SAFE_DELTA
    }

    pub fn eval(&self, t: u64, delta: f64) -> Result<f64> {
        if t < 2 {
            return domain(format!("exploration rates need t >= 2, got {t}"));
        }
        self.check_delta(delta)?;
        Ok(self.value(t, delta))
    }

    /// The formula without domain checks.
    pub fn value(&self, t: u64, delta: f64) -> f64 {
        let t = t as f64;
        let inv = (1.0 / delta).ln();
        match self {
            Self::RobbinsLogT => (t + 1.0) / t * ((t + 1.0) / (2.0 * delta)).ln(),
            Self::IteratedLog => inv + 0.75 * inv.ln() + 1.5 * (1.0 + (t / 2.0).ln()).ln(),
            Self::AlphaElimRate => (t / delta).ln() + 2.0 * (6.0 * t).ln().ln(),
            Self::SglrtRate => 2.0 * (t * (3.0 * t).ln().powi(2) / delta).ln(),
            Self::ConjecturedLogLog => ((t.ln() + 1.0) / delta).ln(),
            Self::PlainLog => inv,
        }
    }
}

impl fmt::Display for ExplorationRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExplorationRate {
    type Err = BaiError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| BaiError::Config(format!("unknown exploration rate '{s}'")))
    }
}

pub fn eval_rate(rate: ExplorationRate, t: u64, delta: f64) -> Result<f64> {
    rate.eval(t, delta)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    /// Total number of draws.
    pub tau: u64,
    pub recommended: usize,
    pub correct: bool,
    pub draws_per_arm: Vec<u64>,
    /// The safety cap was reached; `recommended` is the empirical best there.
    pub exhausted: bool,
}

impl RunOutcome {
    fn new(nu: &BanditInstance, draws: [u64; 2], recommended: usize, exhausted: bool) -> Self {
        Self {
            tau: draws[0] + draws[1],
            recommended,
            correct: nu.is_best(recommended),
            draws_per_arm: draws.to_vec(),
            exhausted,
        }
    }
}

/// `⌈50·log(1/δ)/I_*(ν)⌉`, never below 2.
pub fn default_tau_max(nu: &BanditInstance, delta: f64) -> Result<u64> {
    if !(delta > 0.0 && delta < 1.0) {
        return domain(format!("δ must lie in (0, 1), got {delta}"));
    }
    let v = (50.0 * (1.0 / delta).ln() / i_star_fc(nu)?).ceil();
    Ok((v as u64).max(2))
}

fn check_common(nu: &BanditInstance, rate: ExplorationRate, delta: f64, tau_max: u64) -> Result<()> {
    nu.pair()?;
    rate.check_delta(delta)?;
    if tau_max < 2 {
        return domain(format!("τ_max must be at least 2, got {tau_max}"));
    }
    Ok(())
}

fn equal_variance(nu: &BanditInstance) -> Result<f64> {
    let (a, b) = nu.pair()?;
    match (a.subgaussian_variance(), b.subgaussian_variance()) {
        (Some(x), Some(y)) if x == y => Ok(x),
        _ => domain("this strategy needs two arms with the same known variance"),
    }
}

/// Arm 1 (index 0) unless arm 2 is strictly ahead.
fn empirical_best(diff: f64) -> usize {
    usize::from(diff < 0.0)
}

/// Uniform sampling in pairs; stops once `|Σ(X_s − Y_s)| > sqrt(2σ²·t·β(t,δ))`.
pub fn run_elimination(
    nu: &BanditInstance,
    delta: f64,
    rate: ExplorationRate,
    tau_max: u64,
    rng: &mut RngState,
) -> Result<RunOutcome> {
    check_common(nu, rate, delta, tau_max)?;
    let s2 = equal_variance(nu)?;
    let (a, b) = nu.pair()?;
    let mut sum = 0.0;
    let mut t = 0u64;
    loop {
        sum += a.sample(rng) - b.sample(rng);
        t += 2;
        if sum.abs() > (2.0 * s2 * t as f64 * rate.value(t, delta)).sqrt() {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(sum), false));
        }
        if t + 2 > tau_max {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(sum), true));
        }
    }
}

/// How α-Elimination chooses its allocation fraction.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlphaChoice {
    /// `σ₁/(σ₁+σ₂)`.
    #[default]
    Auto,
    Fixed(f64),
}

impl AlphaChoice {
    pub fn resolve(&self, nu: &BanditInstance) -> Result<f64> {
        match *self {
            Self::Auto => {
                let (a, b) = nu.pair()?;
                let (Some(v1), Some(v2)) = (a.subgaussian_variance(), b.subgaussian_variance()) else {
                    return domain("automatic α needs arms with known variance");
                };
                Ok(v1.sqrt() / (v1.sqrt() + v2.sqrt()))
            }
            Self::Fixed(alpha) if alpha > 0.0 && alpha < 1.0 => Ok(alpha),
            Self::Fixed(alpha) => domain(format!("α must lie in (0, 1), got {alpha}")),
        }
    }
}

/// `⌈αt⌉`, treating values within rounding noise of an integer as that integer.
pub fn alpha_ceil(alpha: f64, t: u64) -> u64 {
    let x = alpha * t as f64;
    let r = x.round();
    if (x - r).abs() <= 1e-9 * r.max(1.0) {
        r as u64
    } else {
        x.ceil() as u64
    }
}

/// Deterministic schedule with `N₁(t) = ⌈αt⌉`; stops once
/// `|μ̂₁ − μ̂₂| > sqrt(2σ_t²β(t,δ))` with `σ_t² = σ₁²/N₁ + σ₂²/N₂`.
pub fn run_alpha_elimination(
    nu: &BanditInstance,
    delta: f64,
    rate: ExplorationRate,
    alpha: AlphaChoice,
    tau_max: u64,
    rng: &mut RngState,
) -> Result<RunOutcome> {
    check_common(nu, rate, delta, tau_max)?;
    let alpha = alpha.resolve(nu)?;
    let (a, b) = nu.pair()?;
    let (Some(v1), Some(v2)) = (a.subgaussian_variance(), b.subgaussian_variance()) else {
        return domain("α-Elimination needs arms with known variance");
    };
    let mut sums = [0.0f64; 2];
    let mut n = [0u64; 2];
    let mut t = 0u64;
    loop {
        t += 1;
        let arm = if alpha_ceil(alpha, t) != alpha_ceil(alpha, t - 1) { 0 } else { 1 };
        sums[arm] += [a, b][arm].sample(rng);
        n[arm] += 1;
        if n[0] == 0 || n[1] == 0 {
            if t >= tau_max {
                let rec = if n[0] > 0 { 0 } else { 1 };
                return Ok(RunOutcome::new(nu, n, rec, true));
            }
            continue;
        }
        let (n1, n2) = (n[0] as f64, n[1] as f64);
        let diff = sums[0] / n1 - sums[1] / n2;
        let var = v1 / n1 + v2 / n2;
        if diff.abs() > (2.0 * var * rate.value(t, delta)).sqrt() {
            return Ok(RunOutcome::new(nu, n, empirical_best(diff), false));
        }
        if t >= tau_max {
            return Ok(RunOutcome::new(nu, n, empirical_best(diff), true));
        }
    }
}

fn bernoulli_arm(arm: &ArmDistribution) -> bool {
    matches!(
        arm.params(),
        ArmParams::Bernoulli { .. }
            | ArmParams::ExpFamily {
                family: ExpFamily::Bernoulli,
                ..
            }
    )
}

/// Sequential GLR test for two Bernoulli arms: strict alternation starting
/// with arm 1, stop at even `t` once `t·I_*(μ̂₁, μ̂₂) > β(t, δ)`.
pub fn run_sglrt(
    nu: &BanditInstance,
    delta: f64,
    rate: ExplorationRate,
    tau_max: u64,
    rng: &mut RngState,
) -> Result<RunOutcome> {
    check_common(nu, rate, delta, tau_max)?;
    let (a, b) = nu.pair()?;
    if !bernoulli_arm(a) || !bernoulli_arm(b) {
        return domain("the sequential GLR test is defined for Bernoulli arms");
    }
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut t = 0u64;
    loop {
        s1 += a.sample(rng);
        s2 += b.sample(rng);
        t += 2;
        let k = (t / 2) as f64;
        let (m1, m2) = (s1 / k, s2 / k);
        if t as f64 * bernoulli_i_star(m1, m2) > rate.value(t, delta) {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(m1 - m2), false));
        }
        if t + 2 > tau_max {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(m1 - m2), true));
        }
    }
}

/// Statistic used by the known-gap SPRT.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SprtStatistic {
    /// `(Δ/σ²)·Σ(X_s − Y_s)`, the Gaussian log-likelihood ratio.
    #[default]
    ExactLlr,
    /// `Δ·Σ(X_s − Y_s)` without the variance factor.
    Unscaled,
}

/// SPRT between "arm 1 is ahead by Δ" and "arm 2 is ahead by Δ", with
/// `Δ = |μ₁ − μ₂|` taken from the instance. Stops once `|LLR| > log(1/δ)`.
pub fn run_sprt_oracle(
    nu: &BanditInstance,
    delta: f64,
    statistic: SprtStatistic,
    tau_max: u64,
    rng: &mut RngState,
) -> Result<RunOutcome> {
    check_common(nu, ExplorationRate::PlainLog, delta, tau_max)?;
    let s2 = equal_variance(nu)?;
    let (a, b) = nu.pair()?;
    let gap = (a.mean() - b.mean()).abs();
    let scale = match statistic {
        SprtStatistic::ExactLlr => gap / s2,
        SprtStatistic::Unscaled => gap,
    };
    let threshold = (1.0 / delta).ln();
    let mut llr = 0.0;
    let mut t = 0u64;
    loop {
        llr += scale * (a.sample(rng) - b.sample(rng));
        t += 2;
        if llr.abs() > threshold {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(llr), false));
        }
        if t + 2 > tau_max {
            return Ok(RunOutcome::new(nu, [t / 2; 2], empirical_best(llr), true));
        }
    }
}

/// A fixed-confidence strategy with its tuning, for callers that pick the
/// algorithm at run time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FcStrategy {
    Elimination(ExplorationRate),
    AlphaElimination(ExplorationRate, AlphaChoice),
    Sglrt(ExplorationRate),
    SprtOracle(SprtStatistic),
}

impl FcStrategy {
    /// Checks everything [`Self::run`] would reject, without drawing.
    pub fn validate(&self, nu: &BanditInstance, delta: f64, tau_max: u64) -> Result<()> {
        match *self {
            Self::Elimination(rate) => {
                check_common(nu, rate, delta, tau_max)?;
                equal_variance(nu).map(drop)
            }
            Self::AlphaElimination(rate, alpha) => {
                check_common(nu, rate, delta, tau_max)?;
                alpha.resolve(nu)?;
                let (a, b) = nu.pair()?;
                if a.subgaussian_variance().is_none() || b.subgaussian_variance().is_none() {
                    return domain("α-Elimination needs arms with known variance");
                }
                Ok(())
            }
            Self::Sglrt(rate) => {
                check_common(nu, rate, delta, tau_max)?;
                let (a, b) = nu.pair()?;
                if !bernoulli_arm(a) || !bernoulli_arm(b) {
                    return domain("the sequential GLR test is defined for Bernoulli arms");
                }
                Ok(())
            }
            Self::SprtOracle(_) => {
                check_common(nu, ExplorationRate::PlainLog, delta, tau_max)?;
                equal_variance(nu).map(drop)
            }
        }
    }

    pub fn run(&self, nu: &BanditInstance, delta: f64, tau_max: u64, rng: &mut RngState) -> Result<RunOutcome> {
        match *self {
            Self::Elimination(rate) => run_elimination(nu, delta, rate, tau_max, rng),
            Self::AlphaElimination(rate, alpha) => run_alpha_elimination(nu, delta, rate, alpha, tau_max, rng),
            Self::Sglrt(rate) => run_sglrt(nu, delta, rate, tau_max, rng),
            Self::SprtOracle(stat) => run_sprt_oracle(nu, delta, stat, tau_max, rng),
        }
    }
}
