//! Counterfactual regret accounting.
//!
//! The tracker reads the full unit (all potential rewards and the compliance
//! type), so it lives on the simulator side of the protocol. Four cumulative
//! regrets are kept against fixed benchmark choices:
//!
//! | regret | benchmark reward in round `t`            |
//! |--------|------------------------------------------|
//! | ITT    | `Y_t(χ_t(z*))`, best instrument          |
//! | ST     | `Y_t(x*)`, best single treatment         |
//! | LCT    | `Y_t(x*_{χ_t})`, best treatment per type |
//! | C      | `Y_t(x*_ι)`, compliers only              |

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::oracle::OracleTruth;
use crate::population::{ComplianceType, Unit};

#[derive(Debug, Error, PartialEq)]
pub enum RegretError {
    #[error("reward/trajectory mismatch: arm {z} yields {expected}, got {realized}")]
    Mismatch { z: usize, expected: f64, realized: f64 },
    #[error("no optimal treatment known for compliance type {0}")]
    UnknownType(ComplianceType),
}

/// Fixed members of the oracle's optimal sets (lowest index of each).
#[derive(Debug, Clone, PartialEq)]
pub struct RegretTargets {
    pub z_star: usize,
    pub x_star: usize,
    pub x_star_by_type: HashMap<ComplianceType, usize>,
}

impl RegretTargets {
    pub fn from_truth(truth: &OracleTruth) -> Self {
        Self {
            z_star: truth.z_star_set[0],
            x_star: truth.x_star_set[0],
            x_star_by_type: truth.x_star_by_type.iter().map(|(k, v)| (k.clone(), v[0])).collect(),
        }
    }
}

/// When to record a checkpoint. The horizon itself is always recorded.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum CheckpointSchedule {
    /// `t = 1, 2, 4, 8, …`
    PowersOfTwo,
    /// Every `n` rounds.
    Every(u64),
    /// Explicit rounds.
    At(Vec<u64>),
}

impl CheckpointSchedule {
    fn hits(&self, t: u64) -> bool {
        match self {
            CheckpointSchedule::PowersOfTwo => t.is_power_of_two(),
            CheckpointSchedule::Every(n) => *n > 0 && t % n == 0,
            CheckpointSchedule::At(ts) => ts.contains(&t),
        }
    }

    /// Checkpoint rounds for `horizon`, strictly increasing, ending at `horizon`.
    pub fn rounds(&self, horizon: u64) -> Vec<u64> {
        let mut out: Vec<u64> = match self {
            CheckpointSchedule::PowersOfTwo => {
                std::iter::successors(Some(1u64), |t| t.checked_mul(2)).take_while(|&t| t < horizon).collect()
            }
            CheckpointSchedule::Every(n) if *n > 0 => (1..).map(|k| k * n).take_while(|&t| t < horizon).collect(),
            CheckpointSchedule::Every(_) => Vec::new(),
            CheckpointSchedule::At(ts) => {
                let mut v: Vec<u64> = ts.iter().copied().filter(|&t| t >= 1 && t < horizon).collect();
                v.sort_unstable();
                v.dedup();
                v
            }
        };
        out.push(horizon);
        out
    }

    /// Nonempty and within the horizon.
    pub fn is_valid(&self, horizon: u64) -> bool {
        match self {
            CheckpointSchedule::PowersOfTwo => true,
            CheckpointSchedule::Every(n) => *n >= 1 && *n <= horizon,
            CheckpointSchedule::At(ts) => !ts.is_empty() && ts.iter().all(|&t| t >= 1 && t <= horizon),
        }
    }
}

/// All four cumulative regrets at round `t`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Checkpoint {
    pub t: u64,
    pub itt: f64,
    pub st: f64,
    pub lct: f64,
    pub c: f64,
    pub complier_rounds: u64,
}

/// The four regret kinds, in a fixed order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegretKind {
    Itt,
    St,
    Lct,
    C,
}

impl RegretKind {
    pub const ALL: [RegretKind; 4] = [RegretKind::Itt, RegretKind::St, RegretKind::Lct, RegretKind::C];

    pub fn name(self) -> &'static str {
        match self {
            RegretKind::Itt => "itt",
            RegretKind::St => "st",
            RegretKind::Lct => "lct",
            RegretKind::C => "c",
        }
    }
}

impl Checkpoint {
    pub fn get(&self, kind: RegretKind) -> f64 {
        match kind {
            RegretKind::Itt => self.itt,
            RegretKind::St => self.st,
            RegretKind::Lct => self.lct,
            RegretKind::C => self.c,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RegretTracker {
    targets: RegretTargets,
    schedule: CheckpointSchedule,
    horizon: u64,
    current: Checkpoint,
    checkpoints: Vec<Checkpoint>,
}

impl RegretTracker {
    pub fn new(targets: RegretTargets, schedule: CheckpointSchedule, horizon: u64) -> Self {
        Self { targets, schedule, horizon, current: Checkpoint::default(), checkpoints: Vec::new() }
    }

    pub fn targets(&self) -> &RegretTargets {
        &self.targets
    }

    /// Adds one round. `realized_y` must be the reward the unit yields under `z`.
    pub fn update(&mut self, unit: &Unit, z: usize, realized_y: f64) -> Result<(), RegretError> {
        let (_, expected) = unit.respond(z);
        if expected != realized_y {
            return Err(RegretError::Mismatch { z, expected, realized: realized_y });
        }
        let y = &unit.potential_rewards;
        let x_type = *self
            .targets
            .x_star_by_type
            .get(&unit.chi)
            .ok_or_else(|| RegretError::UnknownType(unit.chi.clone()))?;
        let cur = &mut self.current;
        cur.t += 1;
        cur.itt += y[unit.chi.treatment(self.targets.z_star)] - realized_y;
        cur.st += y[self.targets.x_star] - realized_y;
        cur.lct += y[x_type] - realized_y;
        if unit.chi.is_complier() {
            cur.c += y[x_type] - realized_y;
            cur.complier_rounds += 1;
        }
        if cur.t == self.horizon || self.schedule.hits(cur.t) {
            self.checkpoints.push(*cur);
        }
        Ok(())
    }

    pub fn snapshot(&self) -> Checkpoint {
        self.current
    }

    pub fn checkpoints(&self) -> &[Checkpoint] {
        &self.checkpoints
    }

    pub fn into_checkpoints(self) -> Vec<Checkpoint> {
        self.checkpoints
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::analytic_truth;
    use crate::population::builtin_example1;

    fn ex1_tracker(schedule: CheckpointSchedule, horizon: u64) -> RegretTracker {
        let truth = analytic_truth(&builtin_example1()).unwrap();
        RegretTracker::new(RegretTargets::from_truth(&truth), schedule, horizon)
    }

    fn unit(chi: Vec<usize>, y: Vec<f64>) -> Unit {
        Unit { chi: ComplianceType::new(chi), potential_rewards: y }
    }

    #[test]
    fn targets_for_example1() {
        let t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        assert_eq!(t.targets().z_star, 2);
        assert_eq!(t.targets().x_star, 1);
        assert_eq!(t.targets().x_star_by_type[&ComplianceType::complier(3)], 0);
        assert_eq!(t.targets().x_star_by_type[&ComplianceType::new(vec![0, 0, 1])], 1);
    }

    #[test]
    fn fresh_and_single_round() {
        let mut t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        assert_eq!(t.snapshot(), Checkpoint::default());
        // Complier with noise 0.25, arm 3 pulled.
        let u = unit(vec![0, 1, 2], vec![1.25, -0.75, 0.25]);
        t.update(&u, 2, 0.25).unwrap();
        let s = t.snapshot();
        assert_eq!(s.t, 1);
        assert_eq!(s.itt, 0.0);
        assert_eq!(s.st, -1.0);
        assert_eq!(s.lct, 1.0);
        assert_eq!(s.c, 1.0);
        assert_eq!(s.complier_rounds, 1);
        assert_eq!(t.checkpoints(), &[s]);
    }

    #[test]
    fn non_complier_round_leaves_c() {
        let mut t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        let u = unit(vec![0, 0, 1], vec![-4.5, -0.5, -2.5]);
        t.update(&u, 0, -4.5).unwrap();
        let s = t.snapshot();
        assert_eq!((s.c, s.complier_rounds), (0.0, 0));
        assert_eq!(s.itt, 4.0);
        assert_eq!(s.lct, 4.0);
    }

    #[test]
    fn complier_at_optimum_has_zero_c() {
        let mut t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        let u = unit(vec![0, 1, 2], vec![1.5, -0.5, 0.5]);
        t.update(&u, 0, 1.5).unwrap();
        assert_eq!(t.snapshot().c, 0.0);
    }

    #[test]
    fn mismatch_rejected() {
        let mut t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        let u = unit(vec![0, 1, 2], vec![1.5, -0.5, 0.5]);
        assert!(matches!(t.update(&u, 1, 1.5), Err(RegretError::Mismatch { .. })));
        assert_eq!(t.snapshot().t, 0);
    }

    #[test]
    fn unknown_type_rejected() {
        let mut t = ex1_tracker(CheckpointSchedule::PowersOfTwo, 10);
        let u = unit(vec![2, 2, 2], vec![0.0, 0.0, 0.0]);
        assert!(matches!(t.update(&u, 0, 0.0), Err(RegretError::UnknownType(_))));
    }

    #[test]
    fn checkpoint_rounds() {
        let every = CheckpointSchedule::Every(100);
        assert_eq!(every.rounds(1000).len(), 10);
        assert_eq!(every.rounds(1050).len(), 11);
        assert_eq!(*every.rounds(1050).last().unwrap(), 1050);
        let pow = CheckpointSchedule::PowersOfTwo.rounds(100_000);
        assert_eq!(pow.len(), 18);
        assert_eq!(&pow[..3], &[1, 2, 4]);
        assert_eq!(CheckpointSchedule::At(vec![5, 3, 3, 10]).rounds(10), vec![3, 5, 10]);
        assert!(!CheckpointSchedule::At(vec![]).is_valid(10));
        assert!(!CheckpointSchedule::Every(20).is_valid(10));
    }

    #[test]
    fn tracker_records_schedule() {
        let mut t = ex1_tracker(CheckpointSchedule::Every(100), 1000);
        let u = unit(vec![0, 1, 2], vec![1.0, -1.0, 0.0]);
        for _ in 0..1000 {
            t.update(&u, 0, 1.0).unwrap();
        }
        let ts: Vec<u64> = t.checkpoints().iter().map(|c| c.t).collect();
        assert_eq!(ts, CheckpointSchedule::Every(100).rounds(1000));
    }
}
