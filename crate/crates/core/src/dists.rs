//! Arm distributions, sampling, and the divergence primitives everything
//! else is built on.
//!
//! All logarithms are natural. A distribution is validated when it is
//! constructed, so sampling and divergence evaluation never fail on a
//! well-formed [`ArmDistribution`].
//!
//! Random draws come from [`RngState`], a ChaCha8 stream seeded from a
//! 64-bit value. Normal variates use the ziggurat sampler of `rand_distr`,
//! exponential variates likewise. Draw sequences are reproducible within a
//! build; they are not promised to match any other implementation bit for bit.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, BaiError, Result};

/// Smallest admissible Bernoulli mean at construction; the largest is `1 - BERNOULLI_EDGE`.
pub const BERNOULLI_EDGE: f64 = 1e-9;

/// Explicitly advanced random generator. Identical seeds give identical draws.
#[derive(Debug, Clone)]
pub struct RngState {
    inner: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A generator on an independent ChaCha stream of the key derived from
    /// `seed`. Distinct `stream` values never share keystream blocks.
    pub fn with_stream(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self { inner }
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Exponential with unit rate.
    pub fn standard_exponential(&mut self) -> f64 {
        self.inner.sample(Exp1)
    }
}

/// Built-in one-parameter exponential families, `p_θ(x) ∝ exp(θx − b(θ))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExpFamily {
    /// `b(θ) = log(1 + e^θ)`, Θ = ℝ.
    Bernoulli,
    /// `b(θ) = σ²θ²/2`, Θ = ℝ.
    GaussianKnownVariance { variance: f64 },
    /// `b(θ) = −log(−θ)`, Θ = (−∞, 0).
    Exponential,
}

impl ExpFamily {
    pub fn gaussian_known_variance(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return domain(format!("variance must be positive and finite, got {variance}"));
        }
        Ok(Self::GaussianKnownVariance { variance })
    }

    /// Open natural-parameter interval Θ.
    pub fn natural_domain(&self) -> (f64, f64) {
        match self {
            Self::Bernoulli | Self::GaussianKnownVariance { .. } => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Self::Exponential => (f64::NEG_INFINITY, 0.0),
        }
    }

    /// Open interval of attainable means.
    pub fn mean_range(&self) -> (f64, f64) {
        match self {
            Self::Bernoulli => (0.0, 1.0),
            Self::GaussianKnownVariance { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Self::Exponential => (0.0, f64::INFINITY),
        }
    }

    pub fn contains_natural(&self, theta: f64) -> bool {
        let (lo, hi) = self.natural_domain();
        theta.is_finite() && theta > lo && theta < hi
    }

    pub fn contains_mean(&self, mu: f64) -> bool {
        let (lo, hi) = self.mean_range();
        mu.is_finite() && mu > lo && mu < hi
    }

    /// Log-partition `b(θ)`.
    pub fn log_partition(&self, theta: f64) -> f64 {
        match *self {
            Self::Bernoulli => softplus(theta),
            Self::GaussianKnownVariance { variance } => 0.5 * variance * theta * theta,
            Self::Exponential => -(-theta).ln(),
        }
    }

    /// Mean map `ḃ(θ)`.
    pub fn mean(&self, theta: f64) -> f64 {
        match *self {
            Self::Bernoulli => logistic(theta),
            Self::GaussianKnownVariance { variance } => variance * theta,
            Self::Exponential => -1.0 / theta,
        }
    }

    /// Variance map `b̈(θ)`.
    pub fn variance(&self, theta: f64) -> f64 {
        match *self {
            Self::Bernoulli => {
                let p = logistic(theta);
                p * (1.0 - p)
            }
            Self::GaussianKnownVariance { variance } => variance,
            Self::Exponential => 1.0 / (theta * theta),
        }
    }

    /// Inverse mean map `ḃ⁻¹(μ)`, closed form for every built-in.
    pub fn natural(&self, mu: f64) -> f64 {
        match *self {
            Self::Bernoulli => (mu / (1.0 - mu)).ln(),
            Self::GaussianKnownVariance { variance } => mu / variance,
            Self::Exponential => -1.0 / mu,
        }
    }

    /// `KL(ν_θ₁, ν_θ₂)` as the Bregman divergence `b(θ₂) − b(θ₁) − ḃ(θ₁)(θ₂ − θ₁)`.
    pub fn divergence(&self, theta1: f64, theta2: f64) -> f64 {
        let d = self.log_partition(theta2)
            - self.log_partition(theta1)
            - self.mean(theta1) * (theta2 - theta1);
        d.max(0.0)
    }
}

impl fmt::Display for ExpFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Bernoulli => write!(f, "expfam-bernoulli"),
            Self::GaussianKnownVariance { variance } => write!(f, "expfam-gaussian(var={variance})"),
            Self::Exponential => write!(f, "expfam-exponential"),
        }
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `nat_to_mean`: mean of the family member with natural parameter `theta`.
pub fn nat_to_mean(family: &ExpFamily, theta: f64) -> Result<f64> {
    if !family.contains_natural(theta) {
        return domain(format!("θ = {theta} outside the natural domain of {family}"));
    }
    Ok(family.mean(theta))
}

/// `mean_to_nat`: natural parameter of the family member with mean `mu`.
pub fn mean_to_nat(family: &ExpFamily, mu: f64) -> Result<f64> {
    if !family.contains_mean(mu) {
        return domain(format!("μ = {mu} outside the mean range of {family}"));
    }
    Ok(family.natural(mu))
}

/// Family tag used for compatibility checks. Gaussian arms with different
/// variances share a family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Gaussian,
    Bernoulli,
    ExpFamily(ExpFamily),
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Gaussian => "gaussian",
            Family::Bernoulli => "bernoulli",
            Family::ExpFamily(ExpFamily::Bernoulli) => "expfam-bernoulli",
            Family::ExpFamily(ExpFamily::GaussianKnownVariance { .. }) => "expfam-gaussian",
            Family::ExpFamily(ExpFamily::Exponential) => "exponential",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::ExpFamily(fam) => write!(f, "{fam}"),
            other => f.write_str(other.name()),
        }
    }
}

/// Read-only view of an arm's parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArmParams {
    Gaussian { mean: f64, variance: f64 },
    Bernoulli { mean: f64 },
    ExpFamily { family: ExpFamily, theta: f64 },
}

/// A validated arm distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmDistribution {
    params: ArmParams,
}

impl ArmDistribution {
    pub fn gaussian(mean: f64, variance: f64) -> Result<Self> {
        if !mean.is_finite() {
            return domain(format!("gaussian mean must be finite, got {mean}"));
        }
        if !(variance > 0.0 && variance.is_finite()) {
            return domain(format!("gaussian variance must be positive, got {variance}"));
        }
        Ok(Self {
            params: ArmParams::Gaussian { mean, variance },
        })
    }

    pub fn bernoulli(mean: f64) -> Result<Self> {
        if !(BERNOULLI_EDGE..=1.0 - BERNOULLI_EDGE).contains(&mean) {
            return domain(format!(
                "bernoulli mean must lie in [{BERNOULLI_EDGE}, {}], got {mean}",
                1.0 - BERNOULLI_EDGE
            ));
        }
        Ok(Self {
            params: ArmParams::Bernoulli { mean },
        })
    }

    pub fn exp_family(family: ExpFamily, theta: f64) -> Result<Self> {
        if let ExpFamily::GaussianKnownVariance { variance } = family {
            ExpFamily::gaussian_known_variance(variance)?;
        }
        if !family.contains_natural(theta) {
            return domain(format!("θ = {theta} outside the natural domain of {family}"));
        }
        Ok(Self {
            params: ArmParams::ExpFamily { family, theta },
        })
    }

    pub fn exp_family_from_mean(family: ExpFamily, mean: f64) -> Result<Self> {
        Self::exp_family(family, mean_to_nat(&family, mean)?)
    }

    pub fn params(&self) -> ArmParams {
        self.params
    }

    pub fn family(&self) -> Family {
        match self.params {
            ArmParams::Gaussian { .. } => Family::Gaussian,
            ArmParams::Bernoulli { .. } => Family::Bernoulli,
            ArmParams::ExpFamily { family, .. } => Family::ExpFamily(family),
        }
    }

    pub fn mean(&self) -> f64 {
        match self.params {
            ArmParams::Gaussian { mean, .. } | ArmParams::Bernoulli { mean } => mean,
            ArmParams::ExpFamily { family, theta } => family.mean(theta),
        }
    }

    pub fn variance(&self) -> f64 {
        match self.params {
            ArmParams::Gaussian { variance, .. } => variance,
            ArmParams::Bernoulli { mean } => mean * (1.0 - mean),
            ArmParams::ExpFamily { family, theta } => family.variance(theta),
        }
    }

    /// The arm seen as a member of a one-parameter exponential family:
    /// Gaussian arms map to the known-variance family with their own variance.
    pub fn as_exp_family(&self) -> (ExpFamily, f64) {
        match self.params {
            ArmParams::Gaussian { mean, variance } => {
                (ExpFamily::GaussianKnownVariance { variance }, mean / variance)
            }
            ArmParams::Bernoulli { mean } => (ExpFamily::Bernoulli, ExpFamily::Bernoulli.natural(mean)),
            ArmParams::ExpFamily { family, theta } => (family, theta),
        }
    }

    /// Variance proxy σ² such that the arm is σ²-subgaussian, when one exists.
    pub fn subgaussian_variance(&self) -> Option<f64> {
        match self.params {
            ArmParams::Gaussian { variance, .. } => Some(variance),
            ArmParams::Bernoulli { .. } => Some(0.25),
            ArmParams::ExpFamily { family, .. } => match family {
                ExpFamily::Bernoulli => Some(0.25),
                ExpFamily::GaussianKnownVariance { variance } => Some(variance),
                ExpFamily::Exponential => None,
            },
        }
    }

    /// Same family (and, for Gaussians, same variance) with a different mean.
    pub fn with_mean(&self, mean: f64) -> Result<Self> {
        match self.params {
            ArmParams::Gaussian { variance, .. } => Self::gaussian(mean, variance),
            ArmParams::Bernoulli { .. } => Self::bernoulli(mean),
            ArmParams::ExpFamily { family, .. } => Self::exp_family_from_mean(family, mean),
        }
    }

    pub fn sample(&self, rng: &mut RngState) -> f64 {
        match self.params {
            ArmParams::Gaussian { mean, variance } => mean + variance.sqrt() * rng.standard_normal(),
            ArmParams::Bernoulli { mean } => bernoulli_draw(mean, rng),
            ArmParams::ExpFamily { family, theta } => match family {
                ExpFamily::Bernoulli => bernoulli_draw(family.mean(theta), rng),
                ExpFamily::GaussianKnownVariance { variance } => {
                    variance * theta + variance.sqrt() * rng.standard_normal()
                }
                ExpFamily::Exponential => rng.standard_exponential() / (-theta),
            },
        }
    }
}

fn bernoulli_draw(p: f64, rng: &mut RngState) -> f64 {
    if rng.uniform() < p {
        1.0
    } else {
        0.0
    }
}

/// One draw from `dist`.
pub fn sample(dist: &ArmDistribution, rng: &mut RngState) -> f64 {
    dist.sample(rng)
}

/// Kullback–Leibler divergence `KL(p, q)` in closed form.
pub fn kl(p: &ArmDistribution, q: &ArmDistribution) -> Result<f64> {
    match (p.params, q.params) {
        (
            ArmParams::Gaussian { mean: m1, variance: v1 },
            ArmParams::Gaussian { mean: m2, variance: v2 },
        ) => Ok(gaussian_kl(m1, v1, m2, v2)),
        (ArmParams::Bernoulli { mean: x }, ArmParams::Bernoulli { mean: y }) => Ok(bernoulli_kl(x, y)),
        (
            ArmParams::ExpFamily { family: f1, theta: t1 },
            ArmParams::ExpFamily { family: f2, theta: t2 },
        ) if f1 == f2 => Ok(f1.divergence(t1, t2)),
        _ => Err(BaiError::FamilyMismatch(
            p.family().to_string(),
            q.family().to_string(),
        )),
    }
}

pub fn gaussian_kl(m1: f64, v1: f64, m2: f64, v2: f64) -> f64 {
    let r = v1 / v2;
    (m1 - m2).powi(2) / (2.0 * v2) + 0.5 * (r - 1.0 - r.ln())
}

/// Binary relative entropy `d(x, y)` with `0·log 0 = 0`. `x` may sit on
/// {0, 1}; `y` on the boundary gives `+∞` unless `x == y`.
pub fn bernoulli_kl(x: f64, y: f64) -> f64 {
    if x == y {
        return 0.0;
    }
    let mut d = 0.0;
    if x > 0.0 {
        d += x * (x / y).ln();
    }
    if x < 1.0 {
        d += (1.0 - x) * ((1.0 - x) / (1.0 - y)).ln();
    }
    d.max(0.0)
}

/// Binary entropy `−x log x − (1−x) log(1−x)`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("binary entropy needs x in [0, 1], got {x}"));
    }
    Ok(entropy_unchecked(x))
}

pub(crate) fn entropy_unchecked(x: f64) -> f64 {
    let mut h = 0.0;
    if x > 0.0 {
        h -= x * x.ln();
    }
    if x < 1.0 {
        h -= (1.0 - x) * (1.0 - x).ln();
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn bernoulli_draws_are_binary() {
        let b = ArmDistribution::bernoulli(0.5).unwrap();
        let mut rng = RngState::new(3);
        for _ in 0..1000 {
            let x = b.sample(&mut rng);
            assert!(x == 0.0 || x == 1.0);
        }
    }

    fn empirical_mean(d: &ArmDistribution, n: usize, seed: u64) -> f64 {
        let mut rng = RngState::new(seed);
        (0..n).map(|_| d.sample(&mut rng)).sum::<f64>() / n as f64
    }

    #[test]
    fn gaussian_sample_mean() {
        // 4σ/√N with σ = 0.5, N = 1e5 is 0.0063.
        let g = ArmDistribution::gaussian(0.0, 0.25).unwrap();
        assert!(empirical_mean(&g, 100_000, 11).abs() < 0.01);
    }

    #[test]
    fn bernoulli_sample_mean() {
        // 4·sqrt(0.16/1e5) = 0.00506.
        let b = ArmDistribution::bernoulli(0.2).unwrap();
        assert!((empirical_mean(&b, 100_000, 12) - 0.2).abs() < 0.006);
    }

    #[test]
    fn every_family_sample_mean_within_five_standard_errors() {
        let n = 100_000;
        let arms = [
            ArmDistribution::gaussian(1.5, 2.0).unwrap(),
            ArmDistribution::bernoulli(0.07).unwrap(),
            ArmDistribution::exp_family(ExpFamily::Bernoulli, -0.3).unwrap(),
            ArmDistribution::exp_family(ExpFamily::GaussianKnownVariance { variance: 0.5 }, 2.0)
                .unwrap(),
            ArmDistribution::exp_family(ExpFamily::Exponential, -2.5).unwrap(),
        ];
        for (i, arm) in arms.iter().enumerate() {
            let se = (arm.variance() / n as f64).sqrt();
            let m = empirical_mean(arm, n, 100 + i as u64);
            assert!((m - arm.mean()).abs() < 5.0 * se, "{arm:?}: {m}");
        }
    }

    #[test]
    fn same_seed_same_draws() {
        let g = ArmDistribution::gaussian(0.0, 1.0).unwrap();
        let mut a = RngState::new(9);
        let mut b = RngState::new(9);
        for _ in 0..100 {
            assert_eq!(g.sample(&mut a).to_bits(), g.sample(&mut b).to_bits());
        }
        let mut c = RngState::with_stream(9, 1);
        let mut d = RngState::with_stream(9, 2);
        assert_ne!(c.uniform(), d.uniform());
    }

    #[test]
    fn gaussian_kl_hand_value() {
        let p = ArmDistribution::gaussian(0.5, 0.25).unwrap();
        let q = ArmDistribution::gaussian(0.0, 0.25).unwrap();
        assert_abs_diff_eq!(kl(&p, &q).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bernoulli_kl_hand_value() {
        // 0.2 ln 2 + 0.8 ln(8/9)
        let expected = 0.2 * 2f64.ln() + 0.8 * (8.0f64 / 9.0).ln();
        let p = ArmDistribution::bernoulli(0.2).unwrap();
        let q = ArmDistribution::bernoulli(0.1).unwrap();
        let d = kl(&p, &q).unwrap();
        assert_abs_diff_eq!(d, expected, epsilon = 1e-15);
        assert_abs_diff_eq!(d, 0.04441, epsilon = 1e-4);
    }

    #[test]
    fn kl_family_mismatch() {
        let p = ArmDistribution::bernoulli(0.2).unwrap();
        let q = ArmDistribution::gaussian(0.1, 1.0).unwrap();
        assert!(matches!(kl(&p, &q), Err(BaiError::FamilyMismatch(..))));
        let e1 = ArmDistribution::exp_family(ExpFamily::Exponential, -1.0).unwrap();
        let e2 = ArmDistribution::exp_family(ExpFamily::Bernoulli, -1.0).unwrap();
        assert!(kl(&e1, &e2).is_err());
    }

    #[test]
    fn entropy_values() {
        assert_abs_diff_eq!(binary_entropy(0.5).unwrap(), 2f64.ln(), epsilon = 1e-15);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert_abs_diff_eq!(binary_entropy(0.2).unwrap(), 0.500402, epsilon = 1e-6);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn natural_mean_maps() {
        let b = ExpFamily::Bernoulli;
        assert_eq!(nat_to_mean(&b, 0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(mean_to_nat(&b, 0.2).unwrap(), -1.386294, epsilon = 1e-6);
        assert_abs_diff_eq!(mean_to_nat(&b, 0.2).unwrap(), 0.25f64.ln(), epsilon = 1e-15);
        for i in 1..=99 {
            let mu = i as f64 / 100.0;
            let back = nat_to_mean(&b, mean_to_nat(&b, mu).unwrap()).unwrap();
            assert_abs_diff_eq!(back, mu, epsilon = 1e-12);
        }
        assert!(mean_to_nat(&b, 1.0).is_err());
        assert!(nat_to_mean(&ExpFamily::Exponential, 0.5).is_err());
        assert!(mean_to_nat(&ExpFamily::Exponential, -1.0).is_err());
    }

    #[test]
    fn descriptors_are_convex_and_invertible() {
        let families = [
            ExpFamily::Bernoulli,
            ExpFamily::GaussianKnownVariance { variance: 0.7 },
            ExpFamily::Exponential,
        ];
        for fam in families {
            let thetas: Vec<f64> = (1..40)
                .map(|i| match fam {
                    ExpFamily::Exponential => -4.0 + 0.1 * i as f64,
                    _ => -4.0 + 0.2 * i as f64,
                })
                .collect();
            for w in thetas.windows(2) {
                assert!(fam.variance(w[0]) > 0.0);
                assert!(fam.mean(w[1]) > fam.mean(w[0]));
                let back = fam.natural(fam.mean(w[0]));
                assert!((back - w[0]).abs() <= 1e-10 * w[0].abs().max(1.0), "{fam}: {back} vs {}", w[0]);
            }
        }
    }

    #[test]
    fn construction_rejects_invalid() {
        assert!(ArmDistribution::gaussian(0.0, 0.0).is_err());
        assert!(ArmDistribution::gaussian(f64::NAN, 1.0).is_err());
        assert!(ArmDistribution::bernoulli(0.0).is_err());
        assert!(ArmDistribution::bernoulli(1.0 - 1e-12).is_err());
        assert!(ArmDistribution::bernoulli(1e-9).is_ok());
        assert!(ArmDistribution::exp_family(ExpFamily::Exponential, 0.0).is_err());
        assert!(ArmDistribution::exp_family(ExpFamily::GaussianKnownVariance { variance: -1.0 }, 0.0).is_err());
    }

    #[test]
    fn bregman_matches_direct_bernoulli_on_grid() {
        let fam = ExpFamily::Bernoulli;
        for i in 1..=20 {
            for j in 1..=20 {
                let x = i as f64 / 21.0;
                let y = j as f64 / 21.0;
                let direct = bernoulli_kl(x, y);
                let bregman = fam.divergence(fam.natural(x), fam.natural(y));
                assert_abs_diff_eq!(direct, bregman, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn bernoulli_kl_monotone_away_from_reference() {
        for j in 1..20 {
            let y = j as f64 / 20.0;
            let grid: Vec<f64> = (0..=200).map(|i| i as f64 / 200.0).collect();
            for w in grid.windows(2) {
                let (a, b) = (bernoulli_kl(w[0], y), bernoulli_kl(w[1], y));
                if w[0] >= y {
                    assert!(b > a, "increasing above y={y}");
                } else if w[1] <= y {
                    assert!(b < a, "decreasing below y={y}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn kl_nonnegative_and_zero_on_diagonal(
            m1 in -5.0f64..5.0, m2 in -5.0f64..5.0,
            v1 in 0.05f64..4.0, v2 in 0.05f64..4.0,
            x in 0.001f64..0.999, y in 0.001f64..0.999,
        ) {
            let p = ArmDistribution::gaussian(m1, v1).unwrap();
            let q = ArmDistribution::gaussian(m2, v2).unwrap();
            prop_assert!(kl(&p, &q).unwrap() >= 0.0);
            prop_assert_eq!(kl(&p, &p).unwrap(), 0.0);
            let bp = ArmDistribution::bernoulli(x).unwrap();
            let bq = ArmDistribution::bernoulli(y).unwrap();
            prop_assert!(kl(&bp, &bq).unwrap() >= 0.0);
            prop_assert_eq!(kl(&bp, &bp).unwrap(), 0.0);
            if x != y {
                prop_assert!(kl(&bp, &bq).unwrap() > 0.0);
            }
            if m1 != m2 {
                prop_assert!(kl(&p, &q).unwrap() > 0.0);
            }
        }

        #[test]
        fn gaussian_kl_symmetric_in_means_for_equal_variance(
            m1 in -5.0f64..5.0, m2 in -5.0f64..5.0, v in 0.05f64..4.0,
        ) {
            prop_assert_eq!(gaussian_kl(m1, v, m2, v), gaussian_kl(m2, v, m1, v));
        }

        #[test]
        fn exponential_bregman_matches_closed_form(l1 in 0.1f64..10.0, l2 in 0.1f64..10.0) {
            // KL(Exp(λ1) || Exp(λ2)) = log(λ1/λ2) + λ2/λ1 − 1
            let direct = (l1 / l2).ln() + l2 / l1 - 1.0;
            let breg = ExpFamily::Exponential.divergence(-l1, -l2);
            prop_assert!((direct - breg).abs() < 1e-10);
        }
    }
}
