//! Lower bounds on the sample complexity (fixed confidence) and on the
//! error probability (fixed budget), and the modified instances used to
//! derive the fixed-budget bounds.
//!
//! The generic fixed-confidence bound is valid as a lower bound only for
//! classes satisfying the usual identifiability assumption (every arm's
//! distribution can be moved above or below any other by a change of
//! parameter). It is computed for any identifiable instance regardless.

use crate::complexity::{c_star_fc, i_star_fc};
use crate::dists::{bernoulli_kl, kl, ArmParams, ExpFamily, Family};
use crate::error::{domain, BaiError, Result};
use crate::instance::BanditInstance;

/// Largest δ for which the fixed-confidence lower bounds hold.
pub const FC_DELTA_MAX: f64 = 0.15;

/// Hardness terms that need a common-variance Gaussian model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianHardness {
    pub sigma2: f64,
    /// `Σ_{a≥2} 2σ²/(μ₁ − μ_a)²`.
    pub h_prime: f64,
    /// `Σ_{a≤m} 2σ²/(μ_a − μ_{m+1})²`.
    pub h_plus: f64,
    /// `Σ_{a>m} 2σ²/(μ_m − μ_a)²`.
    pub h_minus: f64,
    /// `H⁺ + H⁻`, which equals `2σ² · h`.
    pub h_total: f64,
    /// `H·min(H⁺,H⁻) / (H + min(H⁺,H⁻))` with `H = H⁺ + H⁻`.
    pub h_tilde: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapProfile {
    /// Δ_a in the caller's arm order.
    pub gaps: Vec<f64>,
    /// `Σ_a 1/Δ_a²`.
    pub h: f64,
    /// `max_{i: μ_[i] < μ_[1]} i/(μ_[1] − μ_[i])²`.
    pub h2: f64,
    /// Present only for common-variance Gaussian instances.
    pub gaussian: Option<GaussianHardness>,
}

pub fn gap_profile(nu: &BanditInstance) -> GapProfile {
    let k = nu.k();
    let m = nu.m();
    let gaps: Vec<f64> = (0..k).map(|a| nu.gap(a)).collect();
    let h = gaps.iter().map(|d| 1.0 / (d * d)).sum();
    let top = nu.sorted_mean(0);
    let h2 = (0..k)
        .filter(|&r| nu.sorted_mean(r) < top)
        .map(|r| (r + 1) as f64 / (top - nu.sorted_mean(r)).powi(2))
        .fold(0.0, f64::max);

    let gaussian = nu.common_gaussian_variance().map(|s2| {
        let mu = |r: usize| nu.sorted_mean(r);
        let h_prime = (1..k).map(|r| 2.0 * s2 / (mu(0) - mu(r)).powi(2)).sum();
        let h_plus: f64 = (0..m).map(|r| 2.0 * s2 / (mu(r) - mu(m)).powi(2)).sum();
        let h_minus: f64 = (m..k).map(|r| 2.0 * s2 / (mu(m - 1) - mu(r)).powi(2)).sum();
        let h_total = h_plus + h_minus;
        let low = h_plus.min(h_minus);
        GaussianHardness {
            sigma2: s2,
            h_prime,
            h_plus,
            h_minus,
            h_total,
            h_tilde: h_total * low / (h_total + low),
        }
    });
    GapProfile {
        gaps,
        h,
        h2,
        gaussian,
    }
}

fn check_fc_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= FC_DELTA_MAX) {
        return domain(format!("δ must lie in (0, {FC_DELTA_MAX}], got {delta}"));
    }
    Ok(())
}

/// `[Σ_{a∈S*} 1/K(ν_a, ν_[m+1]) + Σ_{a∉S*} 1/K(ν_a, ν_[m])] · log(1/(2δ))`.
pub fn fc_lower_bound_general(nu: &BanditInstance, delta: f64) -> Result<f64> {
    check_fc_delta(delta)?;
    let m = nu.m();
    let inner = nu.sorted_arm(m);
    let outer = nu.sorted_arm(m - 1);
    let mut sum = 0.0;
    for (a, arm) in nu.arms().iter().enumerate() {
        let reference = if nu.is_best(a) { inner } else { outer };
        sum += 1.0 / kl(arm, reference)?;
    }
    Ok(sum * (1.0 / (2.0 * delta)).ln())
}

fn bernoulli_mean(params: ArmParams) -> Option<f64> {
    match params {
        ArmParams::Bernoulli { mean } => Some(mean),
        ArmParams::ExpFamily {
            family: ExpFamily::Bernoulli,
            theta,
        } => Some(ExpFamily::Bernoulli.mean(theta)),
        _ => None,
    }
}

/// Lower bound for (ε, δ)-PAC identification of the best arm of a
/// Bernoulli instance.
pub fn fc_lower_bound_eps_relaxed(nu: &BanditInstance, eps: f64, delta: f64) -> Result<f64> {
    check_fc_delta(delta)?;
    let means = nu
        .arms()
        .iter()
        .map(|a| bernoulli_mean(a.params()))
        .collect::<Option<Vec<f64>>>()
        .ok_or_else(|| BaiError::Domain("ε-relaxed bound needs Bernoulli arms".into()))?;
    if !(eps > 0.0) {
        return domain(format!("ε must be positive, got {eps}"));
    }
    let top = nu.sorted_mean(0);
    let (down, up) = (top - eps, top + eps);
    if !(down > 0.0 && up < 1.0) {
        return domain(format!("μ_[1] ± ε = ({down}, {up}) must stay inside (0, 1)"));
    }
    let near = means.iter().filter(|&&mu| mu >= down).count() - 1;
    let mut sum = near as f64 / bernoulli_kl(top, down);
    for &mu in means.iter().filter(|&&mu| mu <= down) {
        sum += 1.0 / bernoulli_kl(mu, up);
    }
    Ok(sum * (1.0 / (2.0 * delta)).ln())
}

/// Two-armed bounds `(log(1/(2δ))/c_*, log(1/(2δ))/I_*)`; the second holds
/// for strategies that sample uniformly.
pub fn fc_two_armed_bounds(nu: &BanditInstance, delta: f64) -> Result<(f64, f64)> {
    check_fc_delta(delta)?;
    let l = (1.0 / (2.0 * delta)).ln();
    Ok((l / c_star_fc(nu)?.0, l / i_star_fc(nu)?))
}

/// The alternative models ν^[a] (`b = None`, m = 1) and ν^[a,b].
///
/// Indices refer to the caller's arm order.
pub fn fb_modified_instance(nu: &BanditInstance, a: usize, b: Option<usize>) -> Result<BanditInstance> {
    if nu.family() != Family::Gaussian || nu.common_gaussian_variance().is_none() {
        return domain("modified instances are defined for common-variance Gaussian models");
    }
    let k = nu.k();
    if a >= k || b.is_some_and(|b| b >= k) {
        return domain("arm index out of range");
    }
    let mut means = nu.means();
    match b {
        None => {
            if nu.m() != 1 {
                return domain("ν^[a] is defined for m = 1");
            }
            if nu.is_best(a) {
                return domain(format!("arm {a} is the best arm"));
            }
            means[a] += 2.0 * nu.gap(a);
        }
        Some(b) => {
            if !nu.is_best(a) || nu.is_best(b) {
                return domain(format!("need a in S*_m and b outside it, got ({a}, {b})"));
            }
            means[a] -= 2.0 * nu.gap(b);
            means[b] += 2.0 * nu.gap(a);
        }
    }
    nu.with_means(&means)
}

/// `(exp(−4t/H'), ¼·exp(−4t/H̃))`.
pub fn fb_error_lower_bounds(profile: &GapProfile, t: u64) -> Result<(f64, f64)> {
    let g = profile
        .gaussian
        .ok_or_else(|| BaiError::Domain("fixed-budget bounds need a common-variance Gaussian model".into()))?;
    let t = t as f64;
    Ok(((-4.0 * t / g.h_prime).exp(), 0.25 * (-4.0 * t / g.h_tilde).exp()))
}
