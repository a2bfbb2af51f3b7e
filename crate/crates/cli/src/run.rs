//! The `run` subcommand: resolve policies, simulate, write artifacts.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use iab::bounds::thm8_alpha_threshold;
use iab::oracle::analytic_truth;
use iab::simulator::run_replications;
use iab::{builtin, EpisodeConfig, PolicyKind, PopulationSpec, RegretKind, Replications};

use crate::config::{AlphaMode, ExperimentConfig, FieldError, PolicyEntry, PopulationRef};
use crate::output::{render_svg, write_csv, write_summary, Series, SummaryRow};
use crate::CliError;

pub fn load_population(pop: &PopulationRef) -> Result<PopulationSpec, CliError> {
    match pop {
        PopulationRef::Builtin(name) => {
            builtin(name).ok_or_else(|| CliError::config("$.population", format!("unknown builtin `{name}`")))
        }
        PopulationRef::File(path) => {
            let text = fs::read_to_string(path)
                .map_err(|e| CliError::config("$.population", format!("cannot read {}: {e}", path.display())))?;
            PopulationSpec::from_json(&text)
                .map_err(|e| CliError::config("$.population", format!("{}: {e}", path.display())))
        }
    }
}

/// A policy with every parameter fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolvedPolicy {
    pub kind: PolicyKind,
    /// γ in effect for the adaptive policy, or the multiplier of α* when α was derived.
    pub gamma: Option<f64>,
}

/// α* of the population, needed whenever a 2SLS rate is derived.
fn alpha_star(pop: &PopulationSpec) -> Result<f64, CliError> {
    let truth = analytic_truth(pop).map_err(|e| {
        CliError::config("$.alpha_mode", format!("gamma_times_thm8 needs analytic ground truth: {e}"))
    })?;
    thm8_alpha_threshold(truth.sigma_min, pop.arms, &truth.mu, pop.psi)
        .map_err(|e| CliError::config("$.alpha_mode", format!("threshold undefined: {e}")))
}

pub fn resolve_policies(cfg: &ExperimentConfig, pop: &PopulationSpec) -> Result<Vec<ResolvedPolicy>, CliError> {
    let needs_alpha = cfg.policies.iter().any(|p| matches!(p, PolicyEntry::EpsDecayAuto | PolicyEntry::FixedAuto));
    let alpha = match (needs_alpha, cfg.alpha_mode) {
        (true, AlphaMode::GammaTimesThm8) => Some(cfg.gamma * alpha_star(pop)?),
        _ => None,
    };
    cfg.policies
        .iter()
        .map(|p| {
            Ok(match *p {
                PolicyEntry::Explicit(kind) => {
                    let gamma = match kind {
                        PolicyKind::Adaptive { gamma } => Some(gamma),
                        _ => None,
                    };
                    ResolvedPolicy { kind, gamma }
                }
                PolicyEntry::EpsDecayAuto => {
                    ResolvedPolicy { kind: PolicyKind::EpsDecay { alpha: alpha.expect("derived") }, gamma: Some(cfg.gamma) }
                }
                PolicyEntry::FixedAuto => ResolvedPolicy {
                    kind: PolicyKind::FixedSchedule { alpha: alpha.expect("derived") },
                    gamma: Some(cfg.gamma),
                },
                PolicyEntry::AdaptiveAuto => {
                    ResolvedPolicy { kind: PolicyKind::Adaptive { gamma: cfg.gamma }, gamma: Some(cfg.gamma) }
                }
            })
        })
        .collect()
}

/// Distinct file stems: the family name, suffixed with the position on collision.
fn file_stems(policies: &[ResolvedPolicy]) -> Vec<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for p in policies {
        *counts.entry(p.kind.family()).or_default() += 1;
    }
    policies
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let fam = p.kind.family();
            if counts[fam] > 1 {
                format!("{fam}-{}", i + 1)
            } else {
                fam.to_string()
            }
        })
        .collect()
}

/// What a run produced.
#[derive(Debug)]
pub struct RunReport {
    pub policies: Vec<ResolvedPolicy>,
    pub results: Vec<Replications>,
    pub files: Vec<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> CliError + '_ {
    move |e| CliError::Io { path: path.to_path_buf(), source: e.into() }
}

pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    let pop = load_population(&cfg.population)?;
    if let Err(e) = pop.validate() {
        return Err(CliError::config("$.population", e.to_string()));
    }
    let policies = resolve_policies(cfg, &pop)?;
    let mut results = Vec::with_capacity(policies.len());
    for (i, p) in policies.iter().enumerate() {
        let episode = EpisodeConfig::new(pop.clone(), p.kind, cfg.horizon, cfg.seed).with_schedule(cfg.checkpoints.clone());
        let problems = episode.problems();
        if !problems.is_empty() {
            return Err(CliError::Config(crate::config::ConfigError(
                problems.into_iter().map(|reason| FieldError { path: format!("$.policies[{i}]"), reason }).collect(),
            )));
        }
        let started = std::time::Instant::now();
        results.push(run_replications(&episode, cfg.n_seeds)?);
        eprintln!("{}: {} seeds in {:.2?}", p.kind, cfg.n_seeds, started.elapsed());
    }

    let dir = &cfg.output_dir;
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut files = Vec::new();
    let stems = file_stems(&policies);
    for ((p, reps), stem) in policies.iter().zip(&results).zip(&stems) {
        let path = dir.join(format!("{stem}.csv"));
        let file = fs::File::create(&path).map_err(io_err(&path))?;
        write_csv(&p.kind.to_string(), &reps.per_seed, std::io::BufWriter::new(file)).map_err(csv_err(&path))?;
        files.push(path);
    }

    let rows: Vec<SummaryRow> = policies
        .iter()
        .zip(&results)
        .map(|(p, reps)| SummaryRow {
            policy: p.kind.to_string(),
            family: p.kind.family().to_string(),
            alpha: p.kind.alpha(),
            gamma: p.gamma,
            n_seeds: cfg.n_seeds,
            horizon: cfg.horizon,
            finals: RegretKind::ALL.map(|k| (k, reps.final_summary(k))),
        })
        .collect();
    let path = dir.join("summary.csv");
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    write_summary(&rows, std::io::BufWriter::new(file)).map_err(csv_err(&path))?;
    files.push(path);

    for kind in RegretKind::ALL {
        let series: Vec<Series> = policies
            .iter()
            .zip(&results)
            .map(|(p, reps)| Series {
                label: p.kind.to_string(),
                points: reps.times().into_iter().zip(reps.medians(kind)).collect(),
            })
            .collect();
        let title = format!("median {} regret, {} seeds", kind.name().to_uppercase(), cfg.n_seeds);
        let path = dir.join(format!("{}.svg", kind.name()));
        fs::write(&path, render_svg(&title, &series)).map_err(io_err(&path))?;
        files.push(path);
    }
    Ok(RunReport { policies, results, files })
}
