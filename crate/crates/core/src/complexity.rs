//! Informational complexities of two-armed models.
//!
//! * `c_*` (fixed confidence): the reversed Chernoff quantity
//!   `Kb_*(θ₁,θ₂) = KL(θ₁,θ_*) = KL(θ₂,θ_*)`.
//! * `I_*`: the average divergence to the mean-midpoint model.
//! * `c^*` (fixed budget): the Chernoff information
//!   `Kb^*(θ₁,θ₂) = KL(θ*,θ₁) = KL(θ*,θ₂)`.
//! * `I^*`: the average divergence from the natural-midpoint model.
//!
//! The crossings are found by bisection; the bracket is always the pair of
//! arm parameters because one divergence increases and the other decreases
//! across it.

use crate::dists::{bernoulli_kl, gaussian_kl, ArmDistribution, ArmParams, ExpFamily};
use crate::error::{domain, BaiError, Result};
use crate::instance::BanditInstance;

const BISECTION_RTOL: f64 = 1e-12;
const BISECTION_MAX_ITER: usize = 200;
const GOLDEN_TOL: f64 = 1e-10;

/// Location of a crossing point, in mean space and, for exponential-family
/// arms, in natural-parameter space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub mean: f64,
    pub natural: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoArmedComplexityReport {
    pub c_star_fc: f64,
    pub i_star_fc: f64,
    pub c_star_fb: f64,
    pub i_star_fb: f64,
    pub theta_star_reversed: Crossing,
    pub theta_star_chernoff: Crossing,
    /// `1 / c_*`, the lower bound on κ_C.
    pub kappa_c_lower: f64,
    /// `1 / c^*`, equal to κ_B for exponential families.
    pub kappa_b: f64,
}

pub fn complexity_report(nu: &BanditInstance) -> Result<TwoArmedComplexityReport> {
    let (c_fc, rev) = c_star_fc(nu)?;
    let (c_fb, cher) = c_star_fb(nu)?;
    Ok(TwoArmedComplexityReport {
        c_star_fc: c_fc,
        i_star_fc: i_star_fc(nu)?,
        c_star_fb: c_fb,
        i_star_fb: i_star_fb(nu)?,
        theta_star_reversed: rev,
        theta_star_chernoff: cher,
        kappa_c_lower: 1.0 / c_fc,
        kappa_b: 1.0 / c_fb,
    })
}

fn distinct_pair(nu: &BanditInstance) -> Result<(&ArmDistribution, &ArmDistribution)> {
    let (a, b) = nu.pair()?;
    if a.mean() == b.mean() {
        return Err(BaiError::DegenerateInstance("equal means".into()));
    }
    Ok((a, b))
}

/// `KL(arm, member of the arm's family with mean m)`.
fn kl_to_mean(arm: &ArmDistribution, m: f64) -> f64 {
    match arm.params() {
        ArmParams::Gaussian { mean, variance } => gaussian_kl(mean, variance, m, variance),
        ArmParams::Bernoulli { mean } => bernoulli_kl(mean, m),
        ArmParams::ExpFamily { family, theta } => family.divergence(theta, family.natural(m)),
    }
}

/// `KL(member with mean m, arm)`.
fn kl_from_mean(m: f64, arm: &ArmDistribution) -> f64 {
    match arm.params() {
        ArmParams::Gaussian { mean, variance } => gaussian_kl(m, variance, mean, variance),
        ArmParams::Bernoulli { mean } => bernoulli_kl(m, mean),
        ArmParams::ExpFamily { family, theta } => family.divergence(family.natural(m), theta),
    }
}

/// Root of `f` on `[lo, hi]` when `f(lo)` and `f(hi)` differ in sign.
pub(crate) fn bisect<F: Fn(f64) -> f64>(mut lo: f64, mut hi: f64, f: F) -> Result<f64> {
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(BaiError::Solver(format!(
            "no sign change on [{lo}, {hi}]: {f_lo} vs {f_hi}"
        )));
    }
    for _ in 0..BISECTION_MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= BISECTION_RTOL * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(BaiError::Solver(format!(
        "bisection did not converge in {BISECTION_MAX_ITER} iterations"
    )))
}

/// Reversed Chernoff quantity between two arms of the same family.
pub fn reversed_chernoff(a: &ArmDistribution, b: &ArmDistribution) -> Result<(f64, Crossing)> {
    if a.mean() == b.mean() {
        return Err(BaiError::DegenerateInstance("equal means".into()));
    }
    if let (
        ArmParams::Gaussian { mean: m1, variance: v1 },
        ArmParams::Gaussian { mean: m2, variance: v2 },
    ) = (a.params(), b.params())
    {
        let (s1, s2) = (v1.sqrt(), v2.sqrt());
        let value = (m1 - m2).powi(2) / (2.0 * (s1 + s2).powi(2));
        let mean = (s2 * m1 + s1 * m2) / (s1 + s2);
        return Ok((value, Crossing { mean, natural: None }));
    }
    let m = bisect(a.mean(), b.mean(), |m| kl_to_mean(a, m) - kl_to_mean(b, m))?;
    let natural = natural_of(a, m);
    Ok((kl_to_mean(a, m), Crossing { mean: m, natural }))
}

fn natural_of(arm: &ArmDistribution, mean: f64) -> Option<f64> {
    match arm.params() {
        ArmParams::Gaussian { .. } => None,
        _ => {
            let (fam, _) = arm.as_exp_family();
            Some(fam.natural(mean))
        }
    }
}

/// Chernoff information between two arms of the same family.
pub fn chernoff_information(a: &ArmDistribution, b: &ArmDistribution) -> Result<(f64, Crossing)> {
    if a.mean() == b.mean() {
        return Err(BaiError::DegenerateInstance("equal means".into()));
    }
    match (a.params(), b.params()) {
        // Alternative arms keep their own variances, so the search runs in
        // mean space.
        (ArmParams::Gaussian { .. }, ArmParams::Gaussian { .. }) => {
            let m = bisect(a.mean(), b.mean(), |m| kl_from_mean(m, a) - kl_from_mean(m, b))?;
            Ok((kl_from_mean(m, a), Crossing { mean: m, natural: None }))
        }
        _ => {
            let (fam, t1) = a.as_exp_family();
            let (_, t2) = b.as_exp_family();
            let t = bisect(t1, t2, |t| fam.divergence(t, t1) - fam.divergence(t, t2))?;
            Ok((
                fam.divergence(t, t1),
                Crossing {
                    mean: fam.mean(t),
                    natural: Some(t),
                },
            ))
        }
    }
}

/// `c_*(ν)` and the reversed crossing θ_*.
pub fn c_star_fc(nu: &BanditInstance) -> Result<(f64, Crossing)> {
    let (a, b) = distinct_pair(nu)?;
    reversed_chernoff(a, b)
}

/// `I_*(ν)`: average divergence towards the model at the mean midpoint.
pub fn i_star_fc(nu: &BanditInstance) -> Result<f64> {
    let (a, b) = distinct_pair(nu)?;
    if let (
        ArmParams::Gaussian { mean: m1, variance: v1 },
        ArmParams::Gaussian { mean: m2, variance: v2 },
    ) = (a.params(), b.params())
    {
        return Ok((m1 - m2).powi(2) / (4.0 * (v1 + v2)));
    }
    let mid = 0.5 * (a.mean() + b.mean());
    Ok(0.5 * (kl_to_mean(a, mid) + kl_to_mean(b, mid)))
}

/// `c^*(ν)` and the Chernoff crossing θ*.
pub fn c_star_fb(nu: &BanditInstance) -> Result<(f64, Crossing)> {
    let (a, b) = distinct_pair(nu)?;
    chernoff_information(a, b)
}

/// `I^*(ν)`: average divergence from the model at the natural-parameter midpoint.
pub fn i_star_fb(nu: &BanditInstance) -> Result<f64> {
    let (a, b) = distinct_pair(nu)?;
    if let (
        ArmParams::Gaussian { mean: m1, variance: v1 },
        ArmParams::Gaussian { mean: m2, variance: v2 },
    ) = (a.params(), b.params())
    {
        return Ok((m1 - m2).powi(2) / (4.0 * (v1 + v2)));
    }
    let (fam, t1) = a.as_exp_family();
    let (_, t2) = b.as_exp_family();
    let mid = 0.5 * (t1 + t2);
    Ok(0.5 * (fam.divergence(mid, t1) + fam.divergence(mid, t2)))
}

/// `I_*(x, y)` for Bernoulli means in `[0, 1]`, via
/// `H((x+y)/2) − (H(x) + H(y))/2`. Defined on the boundary, which the
/// sequential GLR test needs for empirical means.
pub fn bernoulli_i_star(x: f64, y: f64) -> f64 {
    use crate::dists::entropy_unchecked as h;
    (h(0.5 * (x + y)) - 0.5 * (h(x) + h(y))).max(0.0)
}

fn check_thetas(fam: &ExpFamily, t1: f64, t2: f64) -> Result<()> {
    if !fam.contains_natural(t1) || !fam.contains_natural(t2) {
        return domain(format!("natural parameters ({t1}, {t2}) outside the domain of {fam}"));
    }
    if t1 == t2 {
        return Err(BaiError::DegenerateInstance("θ₁ = θ₂".into()));
    }
    Ok(())
}

fn g_unchecked(fam: &ExpFamily, t1: f64, t2: f64, alpha: f64) -> f64 {
    let t = alpha * t1 + (1.0 - alpha) * t2;
    alpha * fam.divergence(t, t1) + (1.0 - alpha) * fam.divergence(t, t2)
}

/// Exponent of the static-allocation error bound with a fraction `alpha` of
/// the draws on arm 1.
pub fn g_alpha(fam: &ExpFamily, theta1: f64, theta2: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return domain(format!("α must lie in (0, 1), got {alpha}"));
    }
    check_thetas(fam, theta1, theta2)?;
    Ok(g_unchecked(fam, theta1, theta2, alpha))
}

/// Maximizer of `α ↦ g_α(θ₁, θ₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalAlpha {
    /// Fraction of the budget for arm 1.
    pub alpha: f64,
    /// `g` at the maximizer; equals the Chernoff information.
    pub value: f64,
    /// Chernoff crossing θ* from the independent bisection.
    pub theta_star: f64,
}

/// Numerically maximizes `g_α` by golden-section search, then checks the
/// result against the Chernoff crossing: `α θ₁ + (1−α) θ₂ = θ*` and
/// `g = Kb^*`. The weight on arm 1 is `(θ* − θ₂)/(θ₁ − θ₂)`.
pub fn optimal_alpha(fam: &ExpFamily, theta1: f64, theta2: f64) -> Result<OptimalAlpha> {
    check_thetas(fam, theta1, theta2)?;
    let g = |a: f64| g_unchecked(fam, theta1, theta2, a);

    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let (mut g1, mut g2) = (g(x1), g(x2));
    while hi - lo > GOLDEN_TOL {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        }
    }
    let golden = 0.5 * (lo + hi);

    // g is flat at its maximum, so comparing function values stalls near
    // sqrt(machine epsilon) in θ. Polish with the sign of
    // g'(α) = b(θ₁) − b(θ₂) − ḃ(θ_α)(θ₁ − θ₂), strictly decreasing in α.
    let slope = fam.log_partition(theta1) - fam.log_partition(theta2);
    let dg = |a: f64| slope - fam.mean(a * theta1 + (1.0 - a) * theta2) * (theta1 - theta2);
    let mut alpha = golden;
    for width in [1e-4, 1.0] {
        let (a_lo, a_hi) = ((golden - width).max(0.0), (golden + width).min(1.0));
        if dg(a_lo) > 0.0 && dg(a_hi) < 0.0 {
            alpha = bisect(a_lo, a_hi, dg)?;
            break;
        }
    }
    let value = g(alpha);

    let (cher, theta_star) = {
        let t = bisect(theta1, theta2, |t| fam.divergence(t, theta1) - fam.divergence(t, theta2))?;
        (fam.divergence(t, theta1), t)
    };
    let crossing_err = (alpha * theta1 + (1.0 - alpha) * theta2 - theta_star).abs();
    let value_err = (value - cher).abs();
    if crossing_err > 1e-8 * theta_star.abs().max(1.0) || value_err > 1e-8 * cher.max(1.0) {
        return Err(BaiError::Solver(format!(
            "maximizer disagrees with Chernoff crossing (|Δθ| = {crossing_err:e}, |Δg| = {value_err:e})"
        )));
    }
    Ok(OptimalAlpha {
        alpha,
        value,
        theta_star,
    })
}
