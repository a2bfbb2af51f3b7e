//! Instrument-armed bandits: multi-armed bandits where the arm pulled is only
//! an instrument and each unit decides which treatment it actually takes.
//!
//! - [`population`]: problem instances and unit sampling.
//! - [`oracle`]: ground truth (treatment means, instrument means, transition
//!   matrix, optimal sets).
//! - [`policies`]: UCB on instruments or treatments, and three policies built
//!   on the 2SLS plug-in estimate.
//! - [`regret`]: intent-to-treat, static-treatment, latent-class and
//!   compliers' regret.
//! - [`bounds`]: concentration bounds and exploration-rate thresholds.
//! - [`simulator`]: episodes, replications, growth fits.

pub mod bounds;
pub mod linalg;
pub mod oracle;
pub mod policies;
pub mod population;
pub mod regret;
pub mod rng;
pub mod simulator;

pub use oracle::{analytic_truth, mc_truth, OracleTruth};
pub use policies::{ArmStats, Policy, PolicyKind};
pub use population::{builtin, builtin_example1, builtin_example2, Example2Variant, PopulationSpec, Unit};
pub use regret::{Checkpoint, CheckpointSchedule, RegretKind, RegretTracker};
pub use simulator::{run_episode, run_replications, EpisodeConfig, EpisodeResult, Replications};
