//! Bandit instances: an ordered list of arms plus the number `m` of best arms
//! to identify.

use serde::{Deserialize, Serialize};

use crate::dists::{ArmDistribution, ExpFamily, Family};
use crate::error::{domain, BaiError, Result};

/// A bandit model with a uniquely identifiable best-`m` set.
///
/// Arms stay in the caller's order. `order` is the stable permutation that
/// sorts them by decreasing mean, so `order[0]` is the index of the best arm.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditInstance {
    arms: Vec<ArmDistribution>,
    m: usize,
    order: Vec<usize>,
}

impl BanditInstance {
    pub fn new(arms: Vec<ArmDistribution>, m: usize) -> Result<Self> {
        if arms.len() < 2 {
            return domain(format!("need at least two arms, got {}", arms.len()));
        }
        if m == 0 || m >= arms.len() {
            return domain(format!("m must satisfy 1 <= m < K = {}, got {m}", arms.len()));
        }
        let family = arms[0].family();
        for arm in &arms[1..] {
            if !same_family(&family, &arm.family()) {
                return Err(BaiError::FamilyMismatch(
                    family.to_string(),
                    arm.family().to_string(),
                ));
            }
        }
        let mut order: Vec<usize> = (0..arms.len()).collect();
        order.sort_by(|&a, &b| arms[b].mean().total_cmp(&arms[a].mean()));
        let inst = Self { arms, m, order };
        if inst.sorted_mean(m - 1) <= inst.sorted_mean(m) {
            return Err(BaiError::DegenerateInstance(format!(
                "the {m}-th and {}-th best means coincide ({})",
                m + 1,
                inst.sorted_mean(m)
            )));
        }
        Ok(inst)
    }

    /// Two-armed instance identifying the single best arm.
    pub fn two_armed(a: ArmDistribution, b: ArmDistribution) -> Result<Self> {
        Self::new(vec![a, b], 1)
    }

    pub fn gaussian(means: &[f64], variances: &[f64], m: usize) -> Result<Self> {
        if means.len() != variances.len() {
            return domain("means and variances differ in length");
        }
        let arms = means
            .iter()
            .zip(variances)
            .map(|(&mu, &v)| ArmDistribution::gaussian(mu, v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, m)
    }

    pub fn bernoulli(means: &[f64], m: usize) -> Result<Self> {
        let arms = means
            .iter()
            .map(|&mu| ArmDistribution::bernoulli(mu))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, m)
    }

    pub fn k(&self) -> usize {
        self.arms.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn arms(&self) -> &[ArmDistribution] {
        &self.arms
    }

    pub fn arm(&self, index: usize) -> &ArmDistribution {
        &self.arms[index]
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(|a| a.mean()).collect()
    }

    pub fn family(&self) -> Family {
        self.arms[0].family()
    }

    /// Arm indices sorted by decreasing mean (ties keep input order).
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Mean of the arm of rank `rank` (0-based; rank 0 is the best).
    pub fn sorted_mean(&self, rank: usize) -> f64 {
        self.arms[self.order[rank]].mean()
    }

    /// Distribution of the arm of rank `rank`.
    pub fn sorted_arm(&self, rank: usize) -> &ArmDistribution {
        &self.arms[self.order[rank]]
    }

    /// Rank of arm `index` in the decreasing-mean order.
    pub fn rank_of(&self, index: usize) -> usize {
        self.order.iter().position(|&i| i == index).expect("arm index in range")
    }

    /// S*_m as a sorted list of arm indices.
    pub fn best_set(&self) -> Vec<usize> {
        let mut s = self.order[..self.m].to_vec();
        s.sort_unstable();
        s
    }

    pub fn is_best(&self, index: usize) -> bool {
        self.rank_of(index) < self.m
    }

    /// Gap Δ_a: distance to μ_[m+1] for a best arm, to μ_[m] otherwise.
    pub fn gap(&self, index: usize) -> f64 {
        let mu = self.arms[index].mean();
        if self.is_best(index) {
            mu - self.sorted_mean(self.m)
        } else {
            self.sorted_mean(self.m - 1) - mu
        }
    }

    /// Common variance when every arm is Gaussian with the same variance.
    pub fn common_gaussian_variance(&self) -> Option<f64> {
        let mut common = None;
        for arm in &self.arms {
            let v = match arm.params() {
                crate::dists::ArmParams::Gaussian { variance, .. } => variance,
                crate::dists::ArmParams::ExpFamily {
                    family: ExpFamily::GaussianKnownVariance { variance },
                    ..
                } => variance,
                _ => return None,
            };
            match common {
                None => common = Some(v),
                Some(c) if c == v => {}
                Some(_) => return None,
            }
        }
        common
    }

    /// Both arms of a two-armed instance.
    pub fn pair(&self) -> Result<(&ArmDistribution, &ArmDistribution)> {
        if self.k() != 2 {
            return domain(format!("expected a two-armed instance, got K = {}", self.k()));
        }
        Ok((&self.arms[0], &self.arms[1]))
    }

    /// Same arms with new means; the result is revalidated.
    pub fn with_means(&self, means: &[f64]) -> Result<Self> {
        if means.len() != self.k() {
            return domain("mean vector length differs from K");
        }
        let arms = self
            .arms
            .iter()
            .zip(means)
            .map(|(a, &mu)| a.with_mean(mu))
            .collect::<Result<Vec<_>>>()?;
        Self::new(arms, self.m)
    }

    /// Short identifier used in experiment records.
    pub fn label(&self) -> String {
        let means: Vec<String> = self.means().iter().map(|m| format!("{m}")).collect();
        format!("{}({})", self.family().name(), means.join("|"))
    }
}

fn same_family(a: &Family, b: &Family) -> bool {
    match (a, b) {
        (Family::Gaussian, Family::Gaussian) | (Family::Bernoulli, Family::Bernoulli) => true,
        (Family::ExpFamily(x), Family::ExpFamily(y)) => x == y,
        _ => false,
    }
}

/// Serializable description of an instance, as found in experiment configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    /// `gaussian`, `bernoulli` or `exponential`.
    pub family: String,
    pub means: Vec<f64>,
    /// Per-arm variances; Gaussian only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variances: Option<Vec<f64>>,
    #[serde(default = "default_m")]
    pub m: usize,
}

fn default_m() -> usize {
    1
}

impl InstanceSpec {
    pub fn build(&self) -> Result<BanditInstance> {
        match self.family.as_str() {
            "gaussian" => {
                let variances = self
                    .variances
                    .clone()
                    .ok_or_else(|| BaiError::Config("gaussian instance needs variances".into()))?;
                BanditInstance::gaussian(&self.means, &variances, self.m)
            }
            "bernoulli" => BanditInstance::bernoulli(&self.means, self.m),
            "exponential" => {
                let arms = self
                    .means
                    .iter()
                    .map(|&mu| ArmDistribution::exp_family_from_mean(ExpFamily::Exponential, mu))
                    .collect::<Result<Vec<_>>>()?;
                BanditInstance::new(arms, self.m)
            }
            other => Err(BaiError::Config(format!("unknown family '{other}'"))),
        }
    }
}
