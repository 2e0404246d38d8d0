//! Static fixed-budget strategies for two arms: draw a predetermined number
//! of samples from each arm, then recommend the empirical best.

use serde::{Deserialize, Serialize};

use crate::complexity::optimal_alpha;
use crate::dists::{ArmParams, ExpFamily, RngState};
use crate::error::{domain, Result};
use crate::fc_algos::{alpha_ceil, RunOutcome};
use crate::instance::BanditInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StaticAllocation {
    pub n1: u64,
    pub n2: u64,
}

impl StaticAllocation {
    pub fn new(n1: u64, n2: u64) -> Result<Self> {
        if n1 == 0 || n2 == 0 {
            return domain(format!("both arms need at least one draw, got ({n1}, {n2})"));
        }
        Ok(Self { n1, n2 })
    }

    pub fn budget(&self) -> u64 {
        self.n1 + self.n2
    }

    /// `⌈αt⌉` draws on arm 1, clamped so both arms are sampled.
    pub fn from_fraction(alpha: f64, t: u64) -> Result<Self> {
        check_budget(t)?;
        if !(0.0..=1.0).contains(&alpha) {
            return domain(format!("allocation fraction must lie in [0, 1], got {alpha}"));
        }
        let n1 = alpha_ceil(alpha, t).clamp(1, t - 1);
        Ok(Self { n1, n2: t - n1 })
    }
}

fn check_budget(t: u64) -> Result<()> {
    if t < 2 {
        return domain(format!("budget must be at least 2, got {t}"));
    }
    Ok(())
}

/// `n₁ = ⌈σ₁t/(σ₁+σ₂)⌉`, the minimizer of the Gaussian error bound.
pub fn gaussian_allocation(sigma1: f64, sigma2: f64, t: u64) -> Result<StaticAllocation> {
    if !(sigma1 > 0.0 && sigma2 > 0.0) {
        return domain(format!("standard deviations must be positive, got ({sigma1}, {sigma2})"));
    }
    StaticAllocation::from_fraction(sigma1 / (sigma1 + sigma2), t)
}

/// `n₁ = ⌈α*t⌉` with α* maximizing `g_α(θ₁, θ₂)`.
pub fn expfam_allocation(fam: &ExpFamily, theta1: f64, theta2: f64, t: u64) -> Result<StaticAllocation> {
    check_budget(t)?;
    StaticAllocation::from_fraction(optimal_alpha(fam, theta1, theta2)?.alpha, t)
}

pub fn uniform_allocation(t: u64) -> Result<StaticAllocation> {
    StaticAllocation::from_fraction(0.5, t)
}

/// Error-bound-minimizing allocation for the instance's family.
pub fn optimal_allocation(nu: &BanditInstance, t: u64) -> Result<StaticAllocation> {
    let (a, b) = nu.pair()?;
    match (a.params(), b.params()) {
        (ArmParams::Gaussian { variance: v1, .. }, ArmParams::Gaussian { variance: v2, .. }) => {
            gaussian_allocation(v1.sqrt(), v2.sqrt(), t)
        }
        _ => {
            let (fam, t1) = a.as_exp_family();
            let (_, t2) = b.as_exp_family();
            expfam_allocation(&fam, t1, t2, t)
        }
    }
}

/// Draws `n1` then `n2` samples and recommends the arm with the strictly
/// larger empirical mean, arm 1 on ties.
pub fn run_static(nu: &BanditInstance, alloc: StaticAllocation, rng: &mut RngState) -> Result<RunOutcome> {
    let (a, b) = nu.pair()?;
    let s1: f64 = (0..alloc.n1).map(|_| a.sample(rng)).sum();
    let s2: f64 = (0..alloc.n2).map(|_| b.sample(rng)).sum();
    let recommended = usize::from(s2 / (alloc.n2 as f64) > s1 / (alloc.n1 as f64));
    Ok(RunOutcome {
        tau: alloc.budget(),
        recommended,
        correct: nu.is_best(recommended),
        draws_per_arm: vec![alloc.n1, alloc.n2],
        exhausted: false,
    })
}

/// Closed-form upper bound on the error of [`run_static`]:
/// `exp(−Δ²/(2(σ₁²/n₁ + σ₂²/n₂)))` for Gaussian arms and
/// `exp(−t·g_{n₁/t}(θ₁, θ₂))` otherwise.
pub fn theoretical_error_bound(nu: &BanditInstance, alloc: StaticAllocation) -> Result<f64> {
    let (a, b) = nu.pair()?;
    let (n1, n2) = (alloc.n1 as f64, alloc.n2 as f64);
    match (a.params(), b.params()) {
        (
            ArmParams::Gaussian { mean: m1, variance: v1 },
            ArmParams::Gaussian { mean: m2, variance: v2 },
        ) => Ok((-(m1 - m2).powi(2) / (2.0 * (v1 / n1 + v2 / n2))).exp()),
        _ => {
            let (fam, t1) = a.as_exp_family();
            let (_, t2) = b.as_exp_family();
            let alpha = n1 / (n1 + n2);
            let theta = alpha * t1 + (1.0 - alpha) * t2;
            let g = alpha * fam.divergence(theta, t1) + (1.0 - alpha) * fam.divergence(theta, t2);
            Ok((-(n1 + n2) * g).exp())
        }
    }
}
