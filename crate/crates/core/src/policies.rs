//! Bandit policies and the 2SLS statistics they share.
//!
//! A policy only ever sees the revealed triple `(z, x, y)`: the arm it pulled,
//! the treatment the unit actually took, and the reward. Nothing else about a
//! unit reaches this module.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{sigma_min, solve};

/// `σ_min(P̂)` below this makes the plug-in estimator unavailable.
pub const SINGULARITY_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum PolicyError {
    #[error("invalid label: arm {z}, treatment {x} (arms = {arms})")]
    InvalidLabel { z: usize, x: usize, arms: usize },
    #[error("bad policy parameter: {0}")]
    BadParameter(String),
    #[error("cannot parse policy `{0}`")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, Error, PartialEq, Eq)]
pub enum EstimatorError {
    #[error("instrument {0} unobserved")]
    Unobserved(usize),
    #[error("estimator singular")]
    Singular,
}

/// Sufficient statistics of an observed `(z, x, y)` history.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats {
    arms: usize,
    t: u64,
    n_z: Vec<u64>,
    n_zx: Vec<u64>,
    n_x: Vec<u64>,
    reward_sum_z: Vec<f64>,
    reward_sum_x: Vec<f64>,
}

impl ArmStats {
    pub fn new(arms: usize) -> Self {
        Self {
            arms,
            t: 0,
            n_z: vec![0; arms],
            n_zx: vec![0; arms * arms],
            n_x: vec![0; arms],
            reward_sum_z: vec![0.0; arms],
            reward_sum_x: vec![0.0; arms],
        }
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    /// Rounds observed.
    pub fn rounds(&self) -> u64 {
        self.t
    }

    pub fn pulls(&self) -> &[u64] {
        &self.n_z
    }

    pub fn treatments(&self) -> &[u64] {
        &self.n_x
    }

    pub fn joint(&self, z: usize, x: usize) -> u64 {
        self.n_zx[z * self.arms + x]
    }

    pub fn reward_sums_by_arm(&self) -> &[f64] {
        &self.reward_sum_z
    }

    pub fn reward_sums_by_treatment(&self) -> &[f64] {
        &self.reward_sum_x
    }

    pub fn update(&mut self, z: usize, x: usize, y: f64) -> Result<(), PolicyError> {
        if z >= self.arms || x >= self.arms {
            return Err(PolicyError::InvalidLabel { z, x, arms: self.arms });
        }
        self.t += 1;
        self.n_z[z] += 1;
        self.n_zx[z * self.arms + x] += 1;
        self.n_x[x] += 1;
        self.reward_sum_z[z] += y;
        self.reward_sum_x[x] += y;
        Ok(())
    }

    fn first_unobserved(&self) -> Option<usize> {
        self.n_z.iter().position(|&n| n == 0)
    }

    /// Direct estimate of the transition matrix: row `z` is `n_zx[z] / n_z[z]`.
    pub fn p_hat(&self) -> Result<DMatrix<f64>, EstimatorError> {
        if let Some(z) = self.first_unobserved() {
            return Err(EstimatorError::Unobserved(z));
        }
        let m = self.arms;
        Ok(DMatrix::from_fn(m, m, |z, x| self.n_zx[z * m + x] as f64 / self.n_z[z] as f64))
    }

    /// Per-instrument mean reward.
    pub fn mu_tilde_hat(&self) -> Result<Vec<f64>, EstimatorError> {
        if let Some(z) = self.first_unobserved() {
            return Err(EstimatorError::Unobserved(z));
        }
        Ok(self.reward_sum_z.iter().zip(&self.n_z).map(|(s, &n)| s / n as f64).collect())
    }

    /// The full plug-in estimate.
    pub fn estimates(&self) -> Result<Estimates, EstimatorError> {
        let p_hat = self.p_hat()?;
        let mu_tilde_hat = self.mu_tilde_hat()?;
        let sigma = sigma_min(&p_hat);
        if sigma < SINGULARITY_THRESHOLD {
            return Err(EstimatorError::Singular);
        }
        let mu_hat = solve(&p_hat, &mu_tilde_hat).ok_or(EstimatorError::Singular)?;
        Ok(Estimates { p_hat, sigma_min: sigma, mu_tilde_hat, mu_hat })
    }

    /// 2SLS plug-in `μ̂ = P̂⁻¹ μ̂̃`.
    pub fn mu_hat_2sls(&self) -> Result<Vec<f64>, EstimatorError> {
        self.estimates().map(|e| e.mu_hat)
    }
}

/// Instrument-level estimates and the treatment means recovered from them.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimates {
    pub p_hat: DMatrix<f64>,
    pub sigma_min: f64,
    pub mu_tilde_hat: Vec<f64>,
    pub mu_hat: Vec<f64>,
}

/// First index of the maximum.
fn argmax_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > values[best] {
            best = i;
        }
    }
    best
}

/// First index of the minimum.
fn argmin_first(values: &[u64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v < values[best] {
            best = i;
        }
    }
    best
}

fn greedy_from<R: Rng + ?Sized>(estimates: Option<&Estimates>, arms: usize, fallback: &mut R) -> usize {
    match estimates {
        Some(e) => argmax_first(&e.mu_hat),
        None => fallback.random_range(0..arms),
    }
}

/// Greedy arm under the plug-in estimate, or a uniform arm from `fallback`
/// when the estimator is unavailable.
pub fn greedy_arm<R: Rng + ?Sized>(stats: &ArmStats, fallback: &mut R) -> usize {
    greedy_from(stats.estimates().ok().as_ref(), stats.arms(), fallback)
}

fn alpha_from(estimates: Option<&Estimates>, arms: usize, gamma: f64, psi: f64) -> f64 {
    let Some(e) = estimates else { return 0.0 };
    let max = e.mu_hat.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = e.mu_hat.iter().map(|v| max - v).filter(|&g| g > 0.0).fold(f64::INFINITY, f64::min);
    if !delta.is_finite() {
        return 0.0;
    }
    // Denominator as published: (δ + √(2ψ)), not squared.
    gamma * e.sigma_min * e.sigma_min * delta * delta / (8.0 * arms as f64 * (delta + (2.0 * psi).sqrt()))
}

/// Exploration rate estimated from the data for the adaptive policy.
pub fn adaptive_alpha(stats: &ArmStats, gamma: f64, psi: f64) -> f64 {
    alpha_from(stats.estimates().ok().as_ref(), stats.arms(), gamma, psi)
}

/// Policy family and its tunables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyKind {
    /// UCB on instrument-keyed statistics.
    UcbItt { c: f64 },
    /// UCB on treatment-keyed ("as treated") statistics.
    UcbAt { c: f64 },
    EpsDecay { alpha: f64 },
    FixedSchedule { alpha: f64 },
    Adaptive { gamma: f64 },
    /// Always pulls one arm.
    #[doc(hidden)]
    Pinned { arm: usize },
    /// Pulls uniformly at random.
    #[doc(hidden)]
    Uniform,
}

impl PolicyKind {
    /// Short family name, without parameters.
    pub fn family(&self) -> &'static str {
        match self {
            PolicyKind::UcbItt { .. } => "ucb-itt",
            PolicyKind::UcbAt { .. } => "ucb-at",
            PolicyKind::EpsDecay { .. } => "2sls-eps-decay",
            PolicyKind::FixedSchedule { .. } => "2sls-fixed",
            PolicyKind::Adaptive { .. } => "2sls-adaptive",
            PolicyKind::Pinned { .. } => "pinned",
            PolicyKind::Uniform => "uniform",
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match *self {
            PolicyKind::EpsDecay { alpha } | PolicyKind::FixedSchedule { alpha } => Some(alpha),
            _ => None,
        }
    }

    fn check(&self, arms: usize, psi: f64) -> Result<(), PolicyError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(PolicyError::BadParameter(format!("{name} must be positive, got {v}")))
            }
        };
        match *self {
            PolicyKind::UcbItt { c } | PolicyKind::UcbAt { c } => {
                if !(c.is_finite() && c >= 0.0) {
                    return Err(PolicyError::BadParameter(format!("c must be nonnegative, got {c}")));
                }
                positive("psi", psi)
            }
            PolicyKind::EpsDecay { alpha } | PolicyKind::FixedSchedule { alpha } => positive("alpha", alpha),
            PolicyKind::Adaptive { gamma } => {
                positive("gamma", gamma)?;
                positive("psi", psi)
            }
            PolicyKind::Pinned { arm } if arm >= arms => {
                Err(PolicyError::BadParameter(format!("pinned arm {} out of range", arm + 1)))
            }
            PolicyKind::Pinned { .. } | PolicyKind::Uniform => Ok(()),
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PolicyKind::UcbItt { c } | PolicyKind::UcbAt { c } if c == 1.0 => write!(f, "{}", self.family()),
            PolicyKind::UcbItt { c } | PolicyKind::UcbAt { c } => write!(f, "{}:c={c}", self.family()),
            PolicyKind::EpsDecay { alpha } | PolicyKind::FixedSchedule { alpha } => {
                write!(f, "{}:alpha={alpha}", self.family())
            }
            PolicyKind::Adaptive { gamma } => write!(f, "{}:gamma={gamma}", self.family()),
            PolicyKind::Pinned { arm } => write!(f, "pinned:arm={}", arm + 1),
            PolicyKind::Uniform => write!(f, "uniform"),
        }
    }
}

impl FromStr for PolicyKind {
    type Err = PolicyError;

    /// `family[:key=value]`, e.g. `2sls-fixed:alpha=0.02`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PolicyError::Parse(s.to_string());
        let (family, param) = match s.split_once(':') {
            Some((f, rest)) => {
                let (k, v) = rest.split_once('=').ok_or_else(err)?;
                (f, Some((k, v)))
            }
            None => (s, None),
        };
        let value = |key: &str| -> Result<f64, PolicyError> {
            match param {
                Some((k, v)) if k == key => v.parse::<f64>().map_err(|_| err()),
                _ => Err(err()),
            }
        };
        match family {
            "ucb-itt" | "ucb-at" => {
                let c = if param.is_some() { value("c")? } else { 1.0 };
                Ok(if family == "ucb-itt" { PolicyKind::UcbItt { c } } else { PolicyKind::UcbAt { c } })
            }
            "2sls-eps-decay" => Ok(PolicyKind::EpsDecay { alpha: value("alpha")? }),
            "2sls-fixed" => Ok(PolicyKind::FixedSchedule { alpha: value("alpha")? }),
            "2sls-adaptive" => Ok(PolicyKind::Adaptive { gamma: value("gamma")? }),
            "pinned" => {
                let arm = value("arm")?;
                if arm < 1.0 || arm.fract() != 0.0 {
                    return Err(err());
                }
                Ok(PolicyKind::Pinned { arm: arm as usize - 1 })
            }
            "uniform" if param.is_none() => Ok(PolicyKind::Uniform),
            _ => Err(err()),
        }
    }
}

/// A policy with its observed history and cached estimates.
#[derive(Debug, Clone)]
pub struct Policy {
    kind: PolicyKind,
    psi: f64,
    stats: ArmStats,
    cache: Option<Result<Estimates, EstimatorError>>,
}

impl Policy {
    /// `psi` is the subgaussian parameter used by the UCB width and the
    /// adaptive rate.
    pub fn new(kind: PolicyKind, arms: usize, psi: f64) -> Result<Self, PolicyError> {
        kind.check(arms, psi)?;
        Ok(Self { kind, psi, stats: ArmStats::new(arms), cache: None })
    }

    pub fn kind(&self) -> PolicyKind {
        self.kind
    }

    pub fn stats(&self) -> &ArmStats {
        &self.stats
    }

    /// Plug-in estimates from the history so far, computed at most once per update.
    pub fn estimates(&mut self) -> Result<&Estimates, EstimatorError> {
        let stats = &self.stats;
        self.cache.get_or_insert_with(|| stats.estimates()).as_ref().map_err(|e| *e)
    }

    /// Arm to pull in round `t` (1-based).
    pub fn select<R: Rng + ?Sized, F: Rng + ?Sized>(&mut self, t: u64, rng: &mut R, fallback: &mut F) -> usize {
        let m = self.stats.arms;
        let t = t.max(1);
        match self.kind {
            PolicyKind::UcbItt { c } => {
                ucb_choice(&self.stats.n_z, &self.stats.reward_sum_z, c, self.psi, t)
            }
            PolicyKind::UcbAt { c } => {
                ucb_choice(&self.stats.n_x, &self.stats.reward_sum_x, c, self.psi, t)
            }
            PolicyKind::EpsDecay { alpha } => {
                let explore = (m as f64 / (alpha * t as f64)).min(1.0);
                if rng.random::<f64>() < explore {
                    rng.random_range(0..m)
                } else {
                    let e = self.estimates().ok();
                    greedy_from(e, m, fallback)
                }
            }
            PolicyKind::FixedSchedule { alpha } => self.fixed_schedule(alpha, t, fallback),
            PolicyKind::Adaptive { gamma } => {
                let psi = self.psi;
                let alpha = alpha_from(self.estimates().ok(), m, gamma, psi);
                self.fixed_schedule(alpha, t, fallback)
            }
            PolicyKind::Pinned { arm } => arm,
            PolicyKind::Uniform => rng.random_range(0..m),
        }
    }

    fn fixed_schedule<F: Rng + ?Sized>(&mut self, alpha: f64, t: u64, fallback: &mut F) -> usize {
        let z0 = argmin_first(&self.stats.n_z);
        let threshold = if alpha > 0.0 { (t as f64).ln() / alpha } else { f64::INFINITY };
        if (self.stats.n_z[z0] as f64) < threshold {
            z0
        } else {
            let m = self.stats.arms;
            let e = self.estimates().ok();
            greedy_from(e, m, fallback)
        }
    }

    /// Records the revealed triple.
    pub fn update(&mut self, z: usize, x: usize, y: f64) -> Result<(), PolicyError> {
        self.stats.update(z, x, y)?;
        self.cache = None;
        Ok(())
    }
}

/// UCB index `mean + c·sqrt(2ψ ln t / n)`; unobserved arms first, lowest index.
fn ucb_choice(counts: &[u64], sums: &[f64], c: f64, psi: f64, t: u64) -> usize {
    if let Some(z) = counts.iter().position(|&n| n == 0) {
        return z;
    }
    let log_t = (t as f64).ln();
    let index: Vec<f64> = counts
        .iter()
        .zip(sums)
        .map(|(&n, &s)| {
            let n = n as f64;
            s / n + c * (2.0 * psi * log_t / n).sqrt()
        })
        .collect();
    argmax_first(&index)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Stream};

    fn ucb_index(counts: &[u64], sums: &[f64], z: usize, psi: f64, t: u64) -> f64 {
        sums[z] / counts[z] as f64 + (2.0 * psi * (t as f64).ln() / counts[z] as f64).sqrt()
    }

    #[test]
    fn update_counts() {
        let mut s = ArmStats::new(3);
        s.update(0, 0, 0.5).unwrap();
        assert_eq!(s.pulls(), &[1, 0, 0]);
        assert_eq!(s.joint(0, 0), 1);
        assert_eq!(s.rounds(), 1);
        s.update(0, 1, 1.0).unwrap();
        s.update(0, 1, 2.0).unwrap();
        assert_eq!(s.joint(0, 1), 2);
        assert_eq!(s.pulls()[0], 3);
        assert_eq!(s.treatments(), &[1, 2, 0]);
        assert_eq!(s.update(3, 0, 0.0), Err(PolicyError::InvalidLabel { z: 3, x: 0, arms: 3 }));
        assert_eq!(s.update(0, 5, 0.0), Err(PolicyError::InvalidLabel { z: 0, x: 5, arms: 3 }));
        assert_eq!(s.rounds(), 3);
    }

    #[test]
    fn p_hat_rows() {
        let mut s = ArmStats::new(3);
        assert_eq!(s.p_hat(), Err(EstimatorError::Unobserved(0)));
        s.update(0, 0, 0.0).unwrap();
        s.update(0, 1, 0.0).unwrap();
        assert_eq!(s.p_hat(), Err(EstimatorError::Unobserved(1)));
        s.update(1, 1, 0.0).unwrap();
        s.update(2, 2, 0.0).unwrap();
        let p = s.p_hat().unwrap();
        assert_eq!(p.row(0).iter().copied().collect::<Vec<_>>(), vec![0.5, 0.5, 0.0]);
        for row in p.row_iter() {
            assert!((row.sum() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn p_hat_identity_for_compliers() {
        let mut s = ArmStats::new(3);
        for i in 0..30 {
            s.update(i % 3, i % 3, i as f64).unwrap();
        }
        assert_eq!(s.p_hat().unwrap(), DMatrix::identity(3, 3));
        assert_eq!(s.mu_hat_2sls().unwrap(), s.mu_tilde_hat().unwrap());
    }

    #[test]
    fn mu_hat_back_substitution() {
        // P̂ = [[1,0],[0.5,0.5]], μ̂̃ = (1, 1.5) ⇒ μ̂ = (1, 2).
        let mut s = ArmStats::new(2);
        s.update(0, 0, 1.0).unwrap();
        s.update(1, 0, 1.0).unwrap();
        s.update(1, 1, 2.0).unwrap();
        let mu = s.mu_hat_2sls().unwrap();
        assert!((mu[0] - 1.0).abs() < 1e-14 && (mu[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn singular_estimator_falls_back() {
        // Every unit is an always-taker of treatment 0: P̂ has rank one.
        let mut s = ArmStats::new(2);
        s.update(0, 0, 1.0).unwrap();
        s.update(1, 0, 1.0).unwrap();
        assert_eq!(s.mu_hat_2sls(), Err(EstimatorError::Singular));
        let mut fb = stream(1, Stream::Fallback);
        let picks: Vec<usize> = (0..200).map(|_| greedy_arm(&s, &mut fb)).collect();
        assert!(picks.contains(&0) && picks.contains(&1));
    }

    fn stats_with_means(means: &[f64]) -> ArmStats {
        let mut s = ArmStats::new(means.len());
        for (z, &m) in means.iter().enumerate() {
            s.update(z, z, m).unwrap();
        }
        s
    }

    #[test]
    fn greedy_rules() {
        let mut fb = stream(0, Stream::Fallback);
        assert_eq!(greedy_arm(&stats_with_means(&[0.0, 1.0, 0.0]), &mut fb), 1);
        assert_eq!(greedy_arm(&stats_with_means(&[1.0, 1.0, 0.0]), &mut fb), 0);
        let fresh = ArmStats::new(3);
        let mut seen = [false; 3];
        for _ in 0..100 {
            seen[greedy_arm(&fresh, &mut fb)] = true;
        }
        assert_eq!(seen, [true; 3]);
    }

    #[test]
    fn adaptive_alpha_rules() {
        assert_eq!(adaptive_alpha(&ArmStats::new(2), 1.0, 0.5), 0.0);
        assert_eq!(adaptive_alpha(&stats_with_means(&[1.0, 1.0, 1.0]), 1.0, 0.5), 0.0);
        // P̂ = I, μ̂ = (0, 1), ψ = 1/2, γ = 1: 1·1·1 / (8·2·(1 + 1)) = 1/32.
        let a = adaptive_alpha(&stats_with_means(&[0.0, 1.0]), 1.0, 0.5);
        assert!((a - 1.0 / 32.0).abs() < 1e-15);
    }

    #[test]
    fn eps_decay_explores_everything_at_t1() {
        // m/(αt) = 6 at t = 1, clipped to 1: the greedy branch is never taken,
        // so the fallback stream is never touched.
        let mut rng = stream(4, Stream::Policy);
        for _ in 0..50 {
            let mut p = Policy::new(PolicyKind::EpsDecay { alpha: 0.5 }, 3, 0.5).unwrap();
            let mut fb = stream(4, Stream::Fallback);
            let before = fb.clone();
            p.select(1, &mut rng, &mut fb);
            assert_eq!(fb, before);
        }
    }

    #[test]
    fn fixed_schedule_is_greedy_at_t1() {
        // ln 1 = 0, so n < 0 never holds; greedy falls back to uniform on fresh stats.
        let mut p = Policy::new(PolicyKind::FixedSchedule { alpha: 0.5 }, 3, 0.5).unwrap();
        let mut rng = stream(0, Stream::Policy);
        let mut fb = stream(0, Stream::Fallback);
        let before = fb.clone();
        p.select(1, &mut rng, &mut fb);
        assert_ne!(fb, before);
        // Later rounds explore the least-pulled arm.
        p.update(0, 0, 1.0).unwrap();
        assert_eq!(p.select(2, &mut rng, &mut fb), 1);
    }

    #[test]
    fn adaptive_explores_while_alpha_is_zero() {
        let mut p = Policy::new(PolicyKind::Adaptive { gamma: 20.0 }, 3, 0.5).unwrap();
        let mut rng = stream(0, Stream::Policy);
        let mut fb = stream(0, Stream::Fallback);
        assert_eq!(p.select(1, &mut rng, &mut fb), 0);
        p.update(0, 0, 1.0).unwrap();
        assert_eq!(p.select(2, &mut rng, &mut fb), 1);
    }

    #[test]
    fn ucb_unpulled_arm_first() {
        let mut p = Policy::new(PolicyKind::UcbItt { c: 1.0 }, 2, 0.5).unwrap();
        p.update(0, 0, 1.0).unwrap();
        let mut rng = stream(0, Stream::Policy);
        assert_eq!(p.select(2, &mut rng.clone(), &mut rng), 1);
    }

    #[test]
    fn ucb_keying() {
        let mut rng = stream(0, Stream::Policy);
        let mut fb = stream(0, Stream::Fallback);
        // ITT keys by arm: the reward 3 lands on arm 0.
        let mut itt = Policy::new(PolicyKind::UcbItt { c: 1.0 }, 2, 0.5).unwrap();
        itt.update(0, 1, 3.0).unwrap();
        assert_eq!(itt.stats().reward_sums_by_arm(), &[3.0, 0.0]);
        itt.update(1, 1, 0.0).unwrap();
        let s = itt.stats();
        assert!(ucb_index(s.pulls(), s.reward_sums_by_arm(), 0, 0.5, 3) > 3.0);
        assert_eq!(itt.select(3, &mut rng, &mut fb), 0);
        // AT keys by treatment: the reward 3 lands on treatment 1.
        let mut at = Policy::new(PolicyKind::UcbAt { c: 1.0 }, 2, 0.5).unwrap();
        at.update(0, 1, 3.0).unwrap();
        assert_eq!(at.stats().reward_sums_by_treatment(), &[0.0, 3.0]);
        assert_eq!(at.select(2, &mut rng, &mut fb), 0, "treatment 0 unobserved: infinite index");
        at.update(0, 0, 0.0).unwrap();
        assert_eq!(at.select(3, &mut rng, &mut fb), 1);
    }

    #[test]
    fn policy_strings_round_trip() {
        for s in ["ucb-itt", "ucb-at", "ucb-itt:c=2", "2sls-eps-decay:alpha=0.25", "2sls-fixed:alpha=0.001", "2sls-adaptive:gamma=20", "pinned:arm=3", "uniform"] {
            let k: PolicyKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        for bad in ["ucb", "2sls-fixed", "2sls-fixed:gamma=1", "2sls-eps-decay:alpha=x", "pinned:arm=0", "uniform:x=1"] {
            assert!(bad.parse::<PolicyKind>().is_err(), "{bad}");
        }
    }

    #[test]
    fn parameter_checks() {
        assert!(Policy::new(PolicyKind::EpsDecay { alpha: 0.0 }, 3, 0.5).is_err());
        assert!(Policy::new(PolicyKind::FixedSchedule { alpha: -1.0 }, 3, 0.5).is_err());
        assert!(Policy::new(PolicyKind::Adaptive { gamma: 1.0 }, 3, 0.0).is_err());
        assert!(Policy::new(PolicyKind::Pinned { arm: 3 }, 3, 0.5).is_err());
        assert!(Policy::new(PolicyKind::Adaptive { gamma: 1.0 }, 3, 0.5).is_ok());
    }
}
