//! Ground truth of a population. Visible to the simulator and to regret
//! accounting, never to policies.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{max_abs_diff, sigma_min};
use crate::population::{ComplianceType, PopulationError, PopulationSpec, TypeEntry};

/// Absolute tolerance for membership in an argmax set.
pub const ARGMAX_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("analytic truth unavailable; use mc_truth")]
    NoEnumeration,
    #[error("empty sample")]
    EmptySample,
    #[error(transparent)]
    Population(#[from] PopulationError),
}

/// Ground-truth quantities of an instance. Arm and treatment indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleTruth {
    pub arms: usize,
    /// Mean potential reward of each treatment.
    pub mu: Vec<f64>,
    /// Mean realized reward of each instrument.
    pub mu_tilde: Vec<f64>,
    /// `P[z][x]`: probability that a unit takes `x` when assigned `z`.
    pub transition: DMatrix<f64>,
    pub sigma_min: f64,
    pub z_star_set: Vec<usize>,
    pub x_star_set: Vec<usize>,
    /// Optimal treatments per compliance type.
    pub x_star_by_type: BTreeMap<ComplianceType, Vec<usize>>,
    pub p_complier: f64,
    pub mu_star: f64,
    pub mu_tilde_star: f64,
}

impl OracleTruth {
    /// Optimal treatments for compliers, if the complier type is listed.
    pub fn x_star_complier(&self) -> Option<&[usize]> {
        self.x_star_by_type.get(&ComplianceType::complier(self.arms)).map(Vec::as_slice)
    }

    /// `‖μ̃ − P·μ‖_∞`. Zero under homogeneity.
    pub fn transition_residual(&self) -> f64 {
        let p_mu: Vec<f64> = (0..self.arms)
            .map(|z| (0..self.arms).map(|x| self.transition[(z, x)] * self.mu[x]).sum())
            .collect();
        max_abs_diff(&self.mu_tilde, &p_mu)
    }

    /// Gaps `μ* − μ_x` for every treatment.
    pub fn gaps(&self) -> Vec<f64> {
        self.mu.iter().map(|m| self.mu_star - m).collect()
    }
}

/// Indices within [`ARGMAX_TOLERANCE`] of the maximum, ascending.
pub fn argmax_set(values: &[f64]) -> Vec<usize> {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    values
        .iter()
        .enumerate()
        .filter(|(_, &v)| v >= max - ARGMAX_TOLERANCE)
        .map(|(i, _)| i)
        .collect()
}

/// Exact truth from the population's type table.
pub fn analytic_truth(spec: &PopulationSpec) -> Result<OracleTruth, OracleError> {
    spec.validate()?;
    let table = spec.type_table().ok_or(OracleError::NoEnumeration)?;
    Ok(truth_from_table(spec.arms, &table))
}

fn truth_from_table(m: usize, table: &[TypeEntry]) -> OracleTruth {
    let mut mu = vec![0.0; m];
    let mut mu_tilde = vec![0.0; m];
    let mut transition = DMatrix::zeros(m, m);
    let mut by_type = BTreeMap::new();
    let mut p_complier = 0.0;
    for e in table {
        for x in 0..m {
            mu[x] += e.p * e.means[x];
        }
        for z in 0..m {
            let x = e.chi.treatment(z);
            mu_tilde[z] += e.p * e.means[x];
            transition[(z, x)] += e.p;
        }
        if e.chi.is_complier() {
            p_complier += e.p;
        }
        by_type.insert(e.chi.clone(), argmax_set(&e.means));
    }
    finish(m, mu, mu_tilde, transition, by_type, p_complier)
}

fn finish(
    m: usize,
    mu: Vec<f64>,
    mu_tilde: Vec<f64>,
    transition: DMatrix<f64>,
    x_star_by_type: BTreeMap<ComplianceType, Vec<usize>>,
    p_complier: f64,
) -> OracleTruth {
    let z_star_set = argmax_set(&mu_tilde);
    let x_star_set = argmax_set(&mu);
    let mu_star = mu[x_star_set[0]];
    let mu_tilde_star = mu_tilde[z_star_set[0]];
    OracleTruth {
        arms: m,
        sigma_min: sigma_min(&transition),
        mu,
        mu_tilde,
        transition,
        z_star_set,
        x_star_set,
        x_star_by_type,
        p_complier,
        mu_star,
        mu_tilde_star,
    }
}

/// True when relative treatment effects are the same for every compliance
/// type with positive probability (mean-independence of `Y(x) − Y(x')`).
/// `None` when no type table is available.
pub fn is_homogeneous(spec: &PopulationSpec) -> Option<bool> {
    let table = spec.type_table()?;
    let live: Vec<&TypeEntry> = table.iter().filter(|e| e.p > 0.0).collect();
    let Some(first) = live.first() else { return Some(true) };
    Some(live.iter().all(|e| {
        let shift = e.means[0] - first.means[0];
        e.means.iter().zip(&first.means).all(|(a, b)| (a - b - shift).abs() <= ARGMAX_TOLERANCE)
    }))
}

/// Monte-Carlo truth with per-entry standard errors.
#[derive(Debug, Clone)]
pub struct McTruth {
    pub truth: OracleTruth,
    pub samples: usize,
    pub mu_se: Vec<f64>,
    pub mu_tilde_se: Vec<f64>,
    pub transition_se: DMatrix<f64>,
    pub p_complier_se: f64,
}

#[derive(Default, Clone, Copy)]
struct Moments {
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn push(&mut self, v: f64) {
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn mean_se(&self, n: f64) -> (f64, f64) {
        let mean = self.sum / n;
        let var = if n > 1.0 { ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        (mean, (var / n).sqrt())
    }
}

/// Sample-mean estimates of the ground truth from `n` independent units.
pub fn mc_truth<R: Rng + ?Sized>(spec: &PopulationSpec, n: usize, rng: &mut R) -> Result<McTruth, OracleError> {
    if n == 0 {
        return Err(OracleError::EmptySample);
    }
    let m = spec.arms;
    let sampler = spec.sampler()?;
    let mut y = vec![Moments::default(); m];
    let mut y_tilde = vec![Moments::default(); m];
    let mut counts = DMatrix::<f64>::zeros(m, m);
    let mut compliers = 0usize;
    let mut per_type: BTreeMap<ComplianceType, (usize, Vec<f64>)> = BTreeMap::new();
    for _ in 0..n {
        let unit = sampler.sample(rng);
        for x in 0..m {
            y[x].push(unit.potential_rewards[x]);
        }
        for z in 0..m {
            let (x, reward) = unit.respond(z);
            y_tilde[z].push(reward);
            counts[(z, x)] += 1.0;
        }
        if unit.chi.is_complier() {
            compliers += 1;
        }
        let slot = per_type.entry(unit.chi.clone()).or_insert_with(|| (0, vec![0.0; m]));
        slot.0 += 1;
        for (acc, r) in slot.1.iter_mut().zip(&unit.potential_rewards) {
            *acc += r;
        }
    }
    let nf = n as f64;
    let (mu, mu_se): (Vec<f64>, Vec<f64>) = y.iter().map(|s| s.mean_se(nf)).unzip();
    let (mu_tilde, mu_tilde_se): (Vec<f64>, Vec<f64>) = y_tilde.iter().map(|s| s.mean_se(nf)).unzip();
    let transition = counts / nf;
    let transition_se = transition.map(|p| (p * (1.0 - p) / nf).sqrt());
    let p_complier = compliers as f64 / nf;
    let by_type = per_type
        .into_iter()
        .map(|(chi, (count, sums))| {
            let means: Vec<f64> = sums.iter().map(|s| s / count as f64).collect();
            (chi, argmax_set(&means))
        })
        .collect();
    Ok(McTruth {
        truth: finish(m, mu, mu_tilde, transition, by_type, p_complier),
        samples: n,
        mu_se,
        mu_tilde_se,
        transition_se,
        p_complier_se: (p_complier * (1.0 - p_complier) / nf).sqrt(),
    })
}
