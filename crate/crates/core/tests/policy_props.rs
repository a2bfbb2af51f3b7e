use iab::linalg::{inf_norm, max_abs_diff, solve};
use iab::policies::greedy_arm;
use iab::population::{ComplianceType, NoiseLaw, TypeEntry};
use iab::rng::{stream, Stream};
use iab::*;
use proptest::prelude::*;

type Triple = (usize, usize, f64);

/// Runs the protocol by hand and returns the decisions and revealed triples.
fn drive(spec: &PopulationSpec, kind: PolicyKind, horizon: u64, seed: u64) -> (Vec<usize>, Vec<Triple>) {
    let sampler = spec.sampler().unwrap();
    let mut units = stream(seed, Stream::Units);
    let mut rng = stream(seed, Stream::Policy);
    let mut fallback = stream(seed, Stream::Fallback);
    let mut policy = Policy::new(kind, spec.arms, spec.psi).unwrap();
    let mut decisions = Vec::new();
    let mut history = Vec::new();
    for t in 1..=horizon {
        let unit = sampler.sample(&mut units);
        let z = policy.select(t, &mut rng, &mut fallback);
        let (x, y) = unit.respond(z);
        policy.update(z, x, y).unwrap();
        decisions.push(z);
        history.push((z, x, y));
    }
    (decisions, history)
}

/// Replays a recorded history without any units in scope.
fn replay(kind: PolicyKind, arms: usize, psi: f64, seed: u64, history: &[Triple]) -> Vec<usize> {
    let mut rng = stream(seed, Stream::Policy);
    let mut fallback = stream(seed, Stream::Fallback);
    let mut policy = Policy::new(kind, arms, psi).unwrap();
    history
        .iter()
        .enumerate()
        .map(|(i, &(z, x, y))| {
            let chosen = policy.select(i as u64 + 1, &mut rng, &mut fallback);
            policy.update(z, x, y).unwrap();
            chosen
        })
        .collect()
}

fn all_kinds() -> Vec<PolicyKind> {
    vec![
        PolicyKind::UcbItt { c: 1.0 },
        PolicyKind::UcbAt { c: 1.0 },
        PolicyKind::EpsDecay { alpha: 0.05 },
        PolicyKind::FixedSchedule { alpha: 0.05 },
        PolicyKind::Adaptive { gamma: 20.0 },
        PolicyKind::Uniform,
    ]
}

#[test]
fn decisions_depend_only_on_revealed_history() {
    for spec in [builtin_example1(), builtin_example2(Example2Variant::OmegaFiveCorrected)] {
        for kind in all_kinds() {
            let (decisions, history) = drive(&spec, kind, 3000, 21);
            assert_eq!(replay(kind, spec.arms, spec.psi, 21, &history), decisions, "{kind}");
        }
    }
}

fn mab() -> PopulationSpec {
    PopulationSpec::table(
        4,
        vec![TypeEntry { chi: ComplianceType::complier(4), p: 1.0, means: vec![0.2, 0.5, 0.4, -0.1] }],
        NoiseLaw::Normal { sigma: 1.0 },
    )
}

#[test]
fn ucb_variants_coincide_on_a_plain_bandit() {
    for seed in 0..5 {
        let (itt, _) = drive(&mab(), PolicyKind::UcbItt { c: 1.0 }, 5000, seed);
        let (at, _) = drive(&mab(), PolicyKind::UcbAt { c: 1.0 }, 5000, seed);
        assert_eq!(itt, at);
    }
}

fn max_seed_errors(spec: &PopulationSpec, target: &[f64]) -> (f64, f64) {
    let truth = analytic_truth(spec).unwrap();
    (0..20u64)
        .map(|seed| {
            let r = run_episode(&EpisodeConfig::new(spec.clone(), PolicyKind::Uniform, 100_000, seed)).unwrap();
            let mu_err = max_abs_diff(r.mu_hat.as_ref().unwrap(), target);
            let p_err = inf_norm(&(r.p_hat.unwrap() - truth.transition.clone()));
            (mu_err, p_err)
        })
        .fold((0.0, 0.0), |(a, b), (c, d)| (f64::max(a, c), f64::max(b, d)))
}

#[test]
fn plug_in_converges_to_the_instrumental_solution_on_example1() {
    // `example1` is heterogeneous, so the plug-in limit is P⁻¹μ̃ rather than μ.
    let spec = builtin_example1();
    let truth = analytic_truth(&spec).unwrap();
    let limit = solve(&truth.transition, &truth.mu_tilde).unwrap();
    assert!(max_abs_diff(&limit, &[-0.875, -2.875, 1.725]) < 1e-12);
    let medians: Vec<f64> = [1_000u64, 10_000, 100_000]
        .iter()
        .map(|&horizon| {
            let mut errs: Vec<f64> = (0..20u64)
                .map(|seed| {
                    let cfg = EpisodeConfig::new(spec.clone(), PolicyKind::Uniform, horizon, seed);
                    max_abs_diff(run_episode(&cfg).unwrap().mu_hat.as_ref().unwrap(), &limit)
                })
                .collect();
            errs.sort_by(f64::total_cmp);
            0.5 * (errs[9] + errs[10])
        })
        .collect();
    for w in medians.windows(2) {
        let ratio = w[0] / w[1];
        assert!((10f64.sqrt() / 2.0..10f64.sqrt() * 2.0).contains(&ratio), "{medians:?}");
    }
}

#[test]
fn plug_in_converges_to_treatment_means_under_homogeneity() {
    // `example1`'s compliance structure with a common mean vector.
    let means = vec![-0.875, -0.625, -0.75];
    let spec = PopulationSpec::table(
        3,
        vec![
            TypeEntry { chi: ComplianceType::complier(3), p: 0.625, means: means.clone() },
            TypeEntry { chi: ComplianceType::new(vec![0, 0, 1]), p: 0.375, means: means.clone() },
        ],
        NoiseLaw::Uniform { a: -1.0, b: 1.0 },
    );
    let (mu_err, p_err) = max_seed_errors(&spec, &means);
    assert!(mu_err < 0.05, "{mu_err}");
    assert!(p_err < 0.02, "{p_err}");
}

fn arb_history() -> impl Strategy<Value = (usize, Vec<Triple>)> {
    (2usize..5).prop_flat_map(|m| {
        (Just(m), prop::collection::vec((0..m, 0..m, -5.0f64..5.0), 20..200))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn greedy_is_shift_invariant((m, history) in arb_history(), shift in -100.0f64..100.0, seed in any::<u64>()) {
        let mut base = ArmStats::new(m);
        let mut moved = ArmStats::new(m);
        for &(z, x, y) in &history {
            base.update(z, x, y).unwrap();
            moved.update(z, x, y + shift).unwrap();
        }
        let a = greedy_arm(&base, &mut stream(seed, Stream::Fallback));
        let b = greedy_arm(&moved, &mut stream(seed, Stream::Fallback));
        prop_assert_eq!(a, b);
    }
}
