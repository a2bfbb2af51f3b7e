//! Episodes of the instrument-armed bandit protocol, seeded replication, and
//! growth-rate fits of regret curves.
//!
//! Each round draws a hidden unit, asks the policy for an arm, reveals the
//! applied treatment and reward to the policy, and charges the four regrets
//! against the full unit.

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rayon::prelude::*;
use thiserror::Error;

use crate::oracle::{analytic_truth, OracleError, OracleTruth};
use crate::policies::{ArmStats, Policy, PolicyError, PolicyKind};
use crate::population::{PopulationError, PopulationSpec, UnitSampler};
use crate::regret::{Checkpoint, CheckpointSchedule, RegretError, RegretKind, RegretTargets, RegretTracker};
use crate::rng::{stream, Stream};

/// A curve is sublinear only if its late linear slope is below this fraction
/// of the reference (worst observed) slope.
pub const SUBLINEAR_SLOPE_FRACTION: f64 = 0.05;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid episode config: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),
    #[error(transparent)]
    Population(#[from] PopulationError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Regret(#[from] RegretError),
    #[error("insufficient checkpoints: need at least 4, got {0}")]
    InsufficientCheckpoints(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub population: PopulationSpec,
    pub policy: PolicyKind,
    pub horizon: u64,
    pub seed: u64,
    pub schedule: CheckpointSchedule,
}

impl EpisodeConfig {
    pub fn new(population: PopulationSpec, policy: PolicyKind, horizon: u64, seed: u64) -> Self {
        Self { population, policy, horizon, seed, schedule: CheckpointSchedule::PowersOfTwo }
    }

    pub fn with_schedule(mut self, schedule: CheckpointSchedule) -> Self {
        self.schedule = schedule;
        self
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { seed, ..self.clone() }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.horizon < 1 {
            out.push("horizon: must be at least 1".to_string());
        }
        if !self.schedule.is_valid(self.horizon) {
            out.push(format!("schedule: {:?} is empty or exceeds the horizon", self.schedule));
        }
        out.extend(self.population.violations().iter().map(|v| format!("population: {v}")));
        if let Err(e) = Policy::new(self.policy, self.population.arms, self.population.psi) {
            out.push(format!("policy: {e}"));
        }
        out
    }
}

/// Outcome of one episode. `elapsed` is wall time and is the only field not
/// determined by the config.
#[derive(Debug, Clone)]
pub struct EpisodeResult {
    pub seed: u64,
    pub checkpoints: Vec<Checkpoint>,
    pub stats: ArmStats,
    pub p_hat: Option<DMatrix<f64>>,
    pub mu_hat: Option<Vec<f64>>,
    pub elapsed: Duration,
}

impl EpisodeResult {
    pub fn last(&self) -> Checkpoint {
        *self.checkpoints.last().expect("episodes record the horizon")
    }
}

struct Prepared<'a> {
    truth: OracleTruth,
    sampler: UnitSampler<'a>,
}

fn prepare(cfg: &EpisodeConfig) -> Result<Prepared<'_>, SimError> {
    let problems = cfg.problems();
    if !problems.is_empty() {
        return Err(SimError::InvalidConfig(problems));
    }
    Ok(Prepared { truth: analytic_truth(&cfg.population)?, sampler: cfg.population.sampler()? })
}

fn run_prepared(cfg: &EpisodeConfig, prep: &Prepared<'_>, seed: u64) -> Result<EpisodeResult, SimError> {
    let start = Instant::now();
    let mut units = stream(seed, Stream::Units);
    let mut policy_rng = stream(seed, Stream::Policy);
    let mut fallback = stream(seed, Stream::Fallback);
    let mut policy = Policy::new(cfg.policy, cfg.population.arms, cfg.population.psi)?;
    let mut tracker = RegretTracker::new(RegretTargets::from_truth(&prep.truth), cfg.schedule.clone(), cfg.horizon);
    for t in 1..=cfg.horizon {
        let unit = prep.sampler.sample(&mut units);
        let z = policy.select(t, &mut policy_rng, &mut fallback);
        let (x, y) = unit.respond(z);
        policy.update(z, x, y)?;
        tracker.update(&unit, z, y)?;
    }
    let estimates = policy.estimates().ok().cloned();
    Ok(EpisodeResult {
        seed,
        checkpoints: tracker.into_checkpoints(),
        stats: policy.stats().clone(),
        p_hat: estimates.as_ref().map(|e| e.p_hat.clone()),
        mu_hat: estimates.map(|e| e.mu_hat),
        elapsed: start.elapsed(),
    })
}

/// Runs one episode with three independent streams derived from `cfg.seed`.
pub fn run_episode(cfg: &EpisodeConfig) -> Result<EpisodeResult, SimError> {
    let prep = prepare(cfg)?;
    run_prepared(cfg, &prep, cfg.seed)
}

/// Mean, median, and standard error of the mean.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub se: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::default();
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
        let se = if n > 1 {
            let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, median, se }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckpointAggregate {
    pub t: u64,
    pub itt: Summary,
    pub st: Summary,
    pub lct: Summary,
    pub c: Summary,
}

impl CheckpointAggregate {
    pub fn get(&self, kind: RegretKind) -> Summary {
        match kind {
            RegretKind::Itt => self.itt,
            RegretKind::St => self.st,
            RegretKind::Lct => self.lct,
            RegretKind::C => self.c,
        }
    }
}

/// Per-checkpoint summaries across episodes sharing a checkpoint schedule.
pub fn aggregate(results: &[EpisodeResult]) -> Vec<CheckpointAggregate> {
    let Some(first) = results.first() else { return Vec::new() };
    (0..first.checkpoints.len())
        .map(|i| {
            let column = |kind: RegretKind| {
                Summary::of(&results.iter().map(|r| r.checkpoints[i].get(kind)).collect::<Vec<_>>())
            };
            CheckpointAggregate {
                t: first.checkpoints[i].t,
                itt: column(RegretKind::Itt),
                st: column(RegretKind::St),
                lct: column(RegretKind::Lct),
                c: column(RegretKind::C),
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct Replications {
    pub per_seed: Vec<EpisodeResult>,
    pub aggregate: Vec<CheckpointAggregate>,
}

impl Replications {
    pub fn times(&self) -> Vec<f64> {
        self.aggregate.iter().map(|a| a.t as f64).collect()
    }

    pub fn medians(&self, kind: RegretKind) -> Vec<f64> {
        self.aggregate.iter().map(|a| a.get(kind).median).collect()
    }

    pub fn final_summary(&self, kind: RegretKind) -> Summary {
        self.aggregate.last().map(|a| a.get(kind)).unwrap_or_default()
    }
}

/// Runs seeds `cfg.seed, cfg.seed + 1, …` (wrapping) in parallel and aggregates.
pub fn run_replications(cfg: &EpisodeConfig, n_seeds: usize) -> Result<Replications, SimError> {
    if n_seeds == 0 {
        return Err(SimError::InvalidConfig(vec!["n_seeds: must be at least 1".to_string()]));
    }
    let prep = prepare(cfg)?;
    let per_seed = (0..n_seeds as u64)
        .into_par_iter()
        .map(|i| run_prepared(cfg, &prep, cfg.seed.wrapping_add(i)))
        .collect::<Result<Vec<_>, _>>()?;
    let aggregate = aggregate(&per_seed);
    Ok(Replications { per_seed, aggregate })
}

/// Least-squares fits of a regret curve against `ln t` and against `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrowthFit {
    pub log_coefficient: f64,
    pub linear_slope: f64,
    pub r2_log: f64,
    pub r2_linear: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Growth {
    Sublinear,
    Linear,
}

fn simple_regression(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss_res = (syy - slope * sxy).max(0.0);
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, r2)
}

/// Fits over the last half of the checkpoints.
pub fn fit_growth(times: &[f64], values: &[f64]) -> Result<GrowthFit, SimError> {
    let n = times.len().min(values.len());
    if n < 4 {
        return Err(SimError::InsufficientCheckpoints(n));
    }
    let start = n / 2;
    let t = &times[start..n];
    let y = &values[start..n];
    let log_t: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let (log_coefficient, r2_log) = simple_regression(&log_t, y);
    let (linear_slope, r2_linear) = simple_regression(t, y);
    Ok(GrowthFit { log_coefficient, linear_slope, r2_log, r2_linear })
}

/// Sublinear when the late slope is small relative to `reference_slope` (the
/// worst slope among the same policy's regret curves on the same instance) and
/// the logarithmic fit is at least as good as the linear one.
pub fn classify_growth(fit: &GrowthFit, reference_slope: f64) -> Growth {
    if fit.linear_slope < SUBLINEAR_SLOPE_FRACTION * reference_slope && fit.r2_log >= fit.r2_linear {
        Growth::Sublinear
    } else {
        Growth::Linear
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::population::{builtin_example1, ComplianceType, NoiseLaw, TypeEntry};

    fn mab() -> PopulationSpec {
        PopulationSpec::table(
            3,
            vec![TypeEntry { chi: ComplianceType::complier(3), p: 1.0, means: vec![1.0, -1.0, 0.0] }],
            NoiseLaw::Uniform { a: -1.0, b: 1.0 },
        )
    }

    #[test]
    fn one_round_deterministic_instance() {
        // Tiny uniform noise keeps the law valid while rewards stay near the means.
        let pop = PopulationSpec::table(
            2,
            vec![TypeEntry { chi: ComplianceType::complier(2), p: 1.0, means: vec![0.0, 1.0] }],
            NoiseLaw::Uniform { a: -1e-300, b: 1e-300 },
        );
        let r = run_episode(&EpisodeConfig::new(pop, PolicyKind::Pinned { arm: 0 }, 1, 3)).unwrap();
        let c = r.last();
        assert_eq!(c.t, 1);
        for v in [c.itt, c.st, c.lct, c.c] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn episode_is_deterministic() {
        let cfg = EpisodeConfig::new(builtin_example1(), PolicyKind::EpsDecay { alpha: 0.1 }, 2000, 42);
        let a = run_episode(&cfg).unwrap();
        let b = run_episode(&cfg).unwrap();
        assert_eq!(a.checkpoints, b.checkpoints);
        assert_eq!(a.stats, b.stats);
        assert_eq!(a.p_hat, b.p_hat);
        assert_eq!(a.mu_hat, b.mu_hat);
    }

    #[test]
    fn checkpoints_end_at_horizon() {
        let r = run_episode(&EpisodeConfig::new(mab(), PolicyKind::UcbItt { c: 1.0 }, 1000, 1)).unwrap();
        let ts: Vec<u64> = r.checkpoints.iter().map(|c| c.t).collect();
        assert!(ts.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(*ts.last().unwrap(), 1000);
    }

    #[test]
    fn invalid_config_lists_fields() {
        let mut cfg = EpisodeConfig::new(mab(), PolicyKind::EpsDecay { alpha: -1.0 }, 0, 1);
        cfg.population.psi = 3.0;
        match run_episode(&cfg) {
            Err(SimError::InvalidConfig(p)) => {
                assert!(p.iter().any(|s| s.starts_with("horizon")));
                assert!(p.iter().any(|s| s.starts_with("population")));
                assert!(p.iter().any(|s| s.starts_with("policy")));
            }
            other => panic!("expected invalid config, got {other:?}"),
        }
    }

    #[test]
    fn single_seed_aggregate_is_the_episode() {
        let cfg = EpisodeConfig::new(builtin_example1(), PolicyKind::UcbAt { c: 1.0 }, 500, 9);
        let reps = run_replications(&cfg, 1).unwrap();
        let single = run_episode(&cfg).unwrap();
        for (agg, cp) in reps.aggregate.iter().zip(&single.checkpoints) {
            assert_eq!(agg.t, cp.t);
            assert_eq!(agg.c, Summary { mean: cp.c, median: cp.c, se: 0.0 });
            assert_eq!(agg.itt.median, cp.itt);
        }
    }

    #[test]
    fn aggregate_mean_is_arithmetic_mean() {
        let cfg = EpisodeConfig::new(builtin_example1(), PolicyKind::UcbItt { c: 1.0 }, 300, 100);
        let reps = run_replications(&cfg, 5).unwrap();
        for (i, agg) in reps.aggregate.iter().enumerate() {
            let vals: Vec<f64> = reps.per_seed.iter().map(|r| r.checkpoints[i].c).collect();
            assert_eq!(agg.c.mean, vals.iter().sum::<f64>() / 5.0);
        }
        let seeds: Vec<u64> = reps.per_seed.iter().map(|r| r.seed).collect();
        assert_eq!(seeds, vec![100, 101, 102, 103, 104]);
    }

    #[test]
    fn summary_statistics() {
        let s = Summary::of(&[1.0, 3.0, 2.0, 10.0]);
        assert_eq!(s.mean, 4.0);
        assert_eq!(s.median, 2.5);
        // Squared deviations 9 + 1 + 4 + 36 = 50; var = 50/3; se = sqrt(50/12).
        assert!((s.se - (50.0f64 / 12.0).sqrt()).abs() < 1e-12);
    }

    fn pow2_times() -> Vec<f64> {
        CheckpointSchedule::PowersOfTwo.rounds(100_000).iter().map(|&t| t as f64).collect()
    }

    #[test]
    fn fit_log_curve() {
        let t = pow2_times();
        let y: Vec<f64> = t.iter().map(|v| 5.0 * v.ln()).collect();
        let f = fit_growth(&t, &y).unwrap();
        assert!((f.log_coefficient - 5.0).abs() < 1e-9);
        assert!((f.r2_log - 1.0).abs() < 1e-12);
        assert!(f.r2_log >= f.r2_linear);
    }

    #[test]
    fn fit_linear_curve() {
        let t = pow2_times();
        let y: Vec<f64> = t.iter().map(|v| 3.0 * v).collect();
        let f = fit_growth(&t, &y).unwrap();
        assert!((f.linear_slope - 3.0).abs() < 1e-9);
        assert!((f.r2_linear - 1.0).abs() < 1e-12);
        assert_eq!(classify_growth(&f, 3.0), Growth::Linear);
    }

    #[test]
    fn fit_constant_curve() {
        let t = pow2_times();
        let f = fit_growth(&t, &vec![7.0; t.len()]).unwrap();
        assert!(f.linear_slope.abs() < 1e-12 && f.log_coefficient.abs() < 1e-12);
        assert_eq!(classify_growth(&f, 1.0), Growth::Sublinear);
    }

    #[test]
    fn fit_needs_four_points() {
        assert!(matches!(
            fit_growth(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]),
            Err(SimError::InsufficientCheckpoints(3))
        ));
    }
}
