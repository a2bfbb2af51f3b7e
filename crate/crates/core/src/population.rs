//! Problem instances: distributions over experimental units.
//!
//! A unit is a compliance type `chi` (the treatment it takes under each
//! assignment) together with its `m` potential rewards. Two population kinds
//! are supported:
//!
//! - **Table**: a finite list of compliance types with probabilities and
//!   per-type mean rewards, plus one additive noise draw shared by all `m`
//!   potential rewards of a unit.
//! - **Coupled**: a named recipe in which the compliance type is a function of
//!   the reward noise (and auxiliary randomness). Each recipe ships with an
//!   exact enumeration of its branches so that ground truth stays analytic.
//!
//! Arms and treatments are 0-based indices internally. The JSON form uses the
//! 1-based labels `1..=m`.

use std::fmt;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use thiserror::Error;

/// Tolerance on the sum of type probabilities.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum PopulationError {
    #[error("invalid population: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("unknown coupled recipe `{0}`")]
    UnknownRecipe(String),
    #[error("malformed population JSON: {0}")]
    Json(#[from] serde_json::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// The treatment a unit takes under each possible assignment.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComplianceType(Vec<usize>);

impl ComplianceType {
    pub fn new(map: Vec<usize>) -> Self {
        Self(map)
    }

    /// The complier type: takes whatever is assigned.
    pub fn complier(arms: usize) -> Self {
        Self((0..arms).collect())
    }

    /// Takes treatment `t` regardless of assignment.
    pub fn always_taker(arms: usize, t: usize) -> Self {
        Self(vec![t; arms])
    }

    pub fn arms(&self) -> usize {
        self.0.len()
    }

    /// Treatment taken when arm `z` is pulled.
    #[inline]
    pub fn treatment(&self, z: usize) -> usize {
        self.0[z]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn is_complier(&self) -> bool {
        self.0.iter().enumerate().all(|(z, &x)| z == x)
    }

    pub fn is_always_taker(&self, t: usize) -> bool {
        self.0.iter().all(|&x| x == t)
    }
}

impl fmt::Display for ComplianceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x + 1)?;
        }
        write!(f, ")")
    }
}

/// Additive reward noise, drawn once per unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum NoiseLaw {
    Uniform { a: f64, b: f64 },
    Normal { sigma: f64 },
}

impl NoiseLaw {
    pub fn mean(&self) -> f64 {
        match *self {
            NoiseLaw::Uniform { a, b } => 0.5 * (a + b),
            NoiseLaw::Normal { .. } => 0.0,
        }
    }

    /// Subgaussian parameter: Hoeffding's lemma for bounded noise, half the
    /// variance for normal noise.
    pub fn psi(&self) -> f64 {
        match *self {
            NoiseLaw::Uniform { a, b } => (b - a) * (b - a) / 8.0,
            NoiseLaw::Normal { sigma } => sigma * sigma / 2.0,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NoiseLaw::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            NoiseLaw::Normal { sigma } => {
                let z: f64 = StandardNormal.sample(rng);
                sigma * z
            }
        }
    }

    fn violations(&self) -> Option<Violation> {
        let ok = match *self {
            NoiseLaw::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            NoiseLaw::Normal { sigma } => sigma.is_finite() && sigma > 0.0,
        };
        (!ok).then_some(Violation::BadNoise(*self))
    }
}

/// One row of a type table: a compliance type, its probability, and the
/// mean potential reward of each treatment conditional on that type.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeEntry {
    pub chi: ComplianceType,
    pub p: f64,
    pub means: Vec<f64>,
}

/// Named coupled recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoupledRecipe {
    /// Five arms; the multinomial for the last label puts zero mass on 5, so
    /// `(1,2,3,4,ω)` never equals the complier type.
    Example2AsWritten,
    /// Same coupling with the zero weight moved to label 5, so compliers exist.
    Example2OmegaFive,
}

/// Mean rewards of the five-arm coupled recipes.
pub const EXAMPLE2_MEANS: [f64; 5] = [0.9, 1.0, 1.0, 1.0, 2.0];

impl CoupledRecipe {
    pub fn name(self) -> &'static str {
        match self {
            CoupledRecipe::Example2AsWritten => "example2-as-written",
            CoupledRecipe::Example2OmegaFive => "example2-omega5",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "example2-as-written" => Some(CoupledRecipe::Example2AsWritten),
            "example2-omega5" => Some(CoupledRecipe::Example2OmegaFive),
            _ => None,
        }
    }

    pub fn arms(self) -> usize {
        5
    }

    pub fn psi(self) -> f64 {
        0.5
    }

    /// Distribution of the last label of the mixed types.
    fn omega_weights(self) -> [f64; 5] {
        match self {
            CoupledRecipe::Example2AsWritten => [1.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 0.0],
            CoupledRecipe::Example2OmegaFive => [0.0, 2.0 / 7.0, 2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0],
        }
    }

    fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> Unit {
        let eps: f64 = StandardNormal.sample(rng);
        let cut = tail_cut();
        let chi = if eps >= cut {
            ComplianceType::always_taker(5, 0)
        } else if eps <= -cut {
            ComplianceType::always_taker(5, 4)
        } else {
            let branch: f64 = rng.random();
            if branch < 1.0 / 8.0 {
                ComplianceType::always_taker(5, 4)
            } else {
                let omega = draw_categorical(&self.omega_weights(), rng.random());
                if branch < 0.5 {
                    ComplianceType::new(vec![0, 1, 2, 3, omega])
                } else {
                    ComplianceType::new(vec![4, 4, 4, 4, omega])
                }
            }
        };
        Unit {
            chi,
            potential_rewards: EXAMPLE2_MEANS.iter().map(|mu| mu + eps).collect(),
        }
    }

    /// Exact branch enumeration, merged by compliance type. The per-type means
    /// include the conditional mean of the noise on the branches that produce
    /// that type.
    pub fn enumerate(self) -> Option<Vec<TypeEntry>> {
        let tail_shift = tail_mean();
        let mut branches: Vec<(ComplianceType, f64, f64)> = vec![
            (ComplianceType::always_taker(5, 0), 0.1, tail_shift),
            (ComplianceType::always_taker(5, 4), 0.1, -tail_shift),
            (ComplianceType::always_taker(5, 4), 0.8 / 8.0, 0.0),
        ];
        for (omega, &w) in self.omega_weights().iter().enumerate() {
            if w > 0.0 {
                branches.push((ComplianceType::new(vec![0, 1, 2, 3, omega]), 0.8 * 3.0 / 8.0 * w, 0.0));
                branches.push((ComplianceType::new(vec![4, 4, 4, 4, omega]), 0.8 * 0.5 * w, 0.0));
            }
        }
        let mut merged: Vec<(ComplianceType, f64, f64)> = Vec::new();
        for (chi, p, shift) in branches {
            match merged.iter_mut().find(|(c, _, _)| *c == chi) {
                Some(entry) => {
                    entry.2 = (entry.1 * entry.2 + p * shift) / (entry.1 + p);
                    entry.1 += p;
                }
                None => merged.push((chi, p, shift)),
            }
        }
        Some(
            merged
                .into_iter()
                .map(|(chi, p, shift)| TypeEntry {
                    chi,
                    p,
                    means: EXAMPLE2_MEANS.iter().map(|mu| mu + shift).collect(),
                })
                .collect(),
        )
    }
}

/// `-Φ⁻¹(0.1)`: the noise level above which a unit is a 1-always-taker.
pub fn tail_cut() -> f64 {
    static CUT: OnceLock<f64> = OnceLock::new();
    *CUT.get_or_init(|| -Normal::standard().inverse_cdf(0.1))
}

/// `E[ε | ε ≥ c]` for the standard normal with upper-tail mass 0.1.
fn tail_mean() -> f64 {
    Normal::standard().pdf(tail_cut()) / 0.1
}

fn draw_categorical(weights: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    let mut last = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = i;
        if u < acc {
            return i;
        }
    }
    last
}

#[derive(Debug, Clone, PartialEq)]
pub enum PopulationKind {
    Table { types: Vec<TypeEntry>, noise: NoiseLaw },
    Coupled(CoupledRecipe),
}

/// A full (hidden) problem instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationSpec {
    pub arms: usize,
    pub kind: PopulationKind,
    /// Subgaussian parameter of the reward noise.
    pub psi: f64,
}

/// A single invariant violation found by [`PopulationSpec::validate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    TooFewArms(usize),
    NoTypes,
    MapLength { entry: usize, len: usize },
    LabelOutOfRange { entry: usize, label: usize },
    MeansLength { entry: usize, len: usize },
    BadProbability { entry: usize, p: f64 },
    ProbabilitySum(f64),
    BadNoise(NoiseLaw),
    PsiMismatch { declared: f64, implied: f64 },
    RecipeArms { recipe: &'static str, arms: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::TooFewArms(m) => write!(f, "need at least 2 arms, got {m}"),
            Violation::NoTypes => write!(f, "type table is empty"),
            Violation::MapLength { entry, len } => {
                write!(f, "type {entry}: compliance map has length {len}")
            }
            Violation::LabelOutOfRange { entry, label } => {
                write!(f, "type {entry}: label out of range ({label})")
            }
            Violation::MeansLength { entry, len } => {
                write!(f, "type {entry}: mean vector has length {len}")
            }
            Violation::BadProbability { entry, p } => write!(f, "type {entry}: bad probability {p}"),
            Violation::ProbabilitySum(s) => write!(f, "probabilities sum to {s}"),
            Violation::BadNoise(n) => write!(f, "bad noise law {n:?}"),
            Violation::PsiMismatch { declared, implied } => {
                write!(f, "psi {declared} inconsistent with noise law (implies {implied})")
            }
            Violation::RecipeArms { recipe, arms } => {
                write!(f, "recipe {recipe} has 5 arms, spec declares {arms}")
            }
        }
    }
}

impl PopulationSpec {
    /// Builds a table population; `psi` is taken from the noise law.
    pub fn table(arms: usize, types: Vec<TypeEntry>, noise: NoiseLaw) -> Self {
        Self { arms, psi: noise.psi(), kind: PopulationKind::Table { types, noise } }
    }

    pub fn coupled(recipe: CoupledRecipe) -> Self {
        Self { arms: recipe.arms(), psi: recipe.psi(), kind: PopulationKind::Coupled(recipe) }
    }

    /// Every invariant violation; empty means valid.
    pub fn violations(&self) -> Vec<Violation> {
        let m = self.arms;
        let mut out = Vec::new();
        if m < 2 {
            out.push(Violation::TooFewArms(m));
        }
        match &self.kind {
            PopulationKind::Table { types, noise } => {
                if types.is_empty() {
                    out.push(Violation::NoTypes);
                }
                for (i, entry) in types.iter().enumerate() {
                    if entry.chi.arms() != m {
                        out.push(Violation::MapLength { entry: i, len: entry.chi.arms() });
                    }
                    if let Some(&bad) = entry.chi.as_slice().iter().find(|&&x| x >= m) {
                        out.push(Violation::LabelOutOfRange { entry: i, label: bad.saturating_add(1) });
                    }
                    if entry.means.len() != m {
                        out.push(Violation::MeansLength { entry: i, len: entry.means.len() });
                    }
                    if !(entry.p.is_finite() && entry.p >= 0.0) {
                        out.push(Violation::BadProbability { entry: i, p: entry.p });
                    }
                }
                let sum: f64 = types.iter().map(|e| e.p).sum();
                if !types.is_empty() && (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
                    out.push(Violation::ProbabilitySum(sum));
                }
                match noise.violations() {
                    Some(v) => out.push(v),
                    None => {
                        let implied = noise.psi();
                        if (self.psi - implied).abs() > 1e-12 * implied.max(1.0) {
                            out.push(Violation::PsiMismatch { declared: self.psi, implied });
                        }
                    }
                }
            }
            PopulationKind::Coupled(recipe) => {
                if m != recipe.arms() {
                    out.push(Violation::RecipeArms { recipe: recipe.name(), arms: m });
                }
                if (self.psi - recipe.psi()).abs() > 1e-12 {
                    out.push(Violation::PsiMismatch { declared: self.psi, implied: recipe.psi() });
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), PopulationError> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(PopulationError::Invalid(v))
        }
    }

    /// Validates once and returns a reusable sampler.
    pub fn sampler(&self) -> Result<UnitSampler<'_>, PopulationError> {
        self.validate()?;
        let cumulative = match &self.kind {
            PopulationKind::Table { types, .. } => types
                .iter()
                .scan(0.0, |acc, e| {
                    *acc += e.p;
                    Some(*acc)
                })
                .collect(),
            PopulationKind::Coupled(_) => Vec::new(),
        };
        Ok(UnitSampler { spec: self, cumulative })
    }

    /// Draws a single unit. Prefer [`PopulationSpec::sampler`] in loops.
    pub fn sample_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Unit, PopulationError> {
        Ok(self.sampler()?.sample(rng))
    }

    /// The compliance-type table: the table itself, or the recipe's merged
    /// branch enumeration. `None` if a coupled recipe has no enumeration.
    pub fn type_table(&self) -> Option<Vec<TypeEntry>> {
        match &self.kind {
            PopulationKind::Table { types, noise } => {
                let shift = noise.mean();
                Some(
                    types
                        .iter()
                        .map(|e| TypeEntry {
                            chi: e.chi.clone(),
                            p: e.p,
                            means: e.means.iter().map(|m| m + shift).collect(),
                        })
                        .collect(),
                )
            }
            PopulationKind::Coupled(recipe) => recipe.enumerate(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, PopulationError> {
        let doc: PopulationDoc = serde_json::from_str(text)?;
        doc.into_spec()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&PopulationDoc::from_spec(self)).expect("population serializes")
    }
}

/// Looks up a builtin population by name.
pub fn builtin(name: &str) -> Option<PopulationSpec> {
    match name {
        "example1" => Some(builtin_example1()),
        _ => CoupledRecipe::from_name(name).map(PopulationSpec::coupled),
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 3] = ["example1", "example2-as-written", "example2-omega5"];

/// Three arms; compliers (5/8) and the type `(1,1,2)` (3/8) with heterogeneous
/// means and `Uniform(-1, 1)` noise.
pub fn builtin_example1() -> PopulationSpec {
    PopulationSpec::table(
        3,
        vec![
            TypeEntry { chi: ComplianceType::complier(3), p: 5.0 / 8.0, means: vec![1.0, -1.0, 0.0] },
            TypeEntry { chi: ComplianceType::new(vec![0, 0, 1]), p: 3.0 / 8.0, means: vec![-4.0, 0.0, -2.0] },
        ],
        NoiseLaw::Uniform { a: -1.0, b: 1.0 },
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Example2Variant {
    AsWritten,
    OmegaFiveCorrected,
}

pub fn builtin_example2(variant: Example2Variant) -> PopulationSpec {
    PopulationSpec::coupled(match variant {
        Example2Variant::AsWritten => CoupledRecipe::Example2AsWritten,
        Example2Variant::OmegaFiveCorrected => CoupledRecipe::Example2OmegaFive,
    })
}

/// One round's draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Unit {
    pub chi: ComplianceType,
    pub potential_rewards: Vec<f64>,
}

impl Unit {
    /// Treatment applied and reward revealed when arm `z` is pulled.
    #[inline]
    pub fn respond(&self, z: usize) -> (usize, f64) {
        let x = self.chi.treatment(z);
        (x, self.potential_rewards[x])
    }
}

/// Sampler over a validated population.
#[derive(Debug, Clone)]
pub struct UnitSampler<'a> {
    spec: &'a PopulationSpec,
    cumulative: Vec<f64>,
}

impl UnitSampler<'_> {
    pub fn spec(&self) -> &PopulationSpec {
        self.spec
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Unit {
        match &self.spec.kind {
            PopulationKind::Table { types, noise } => {
                let u: f64 = rng.random();
                let idx = self.cumulative.iter().position(|&c| u < c).unwrap_or(types.len() - 1);
                let entry = &types[idx];
                let eps = noise.sample(rng);
                Unit {
                    chi: entry.chi.clone(),
                    potential_rewards: entry.means.iter().map(|m| m + eps).collect(),
                }
            }
            PopulationKind::Coupled(recipe) => recipe.sample(rng),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PopulationDoc {
    arms: usize,
    psi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    recipe: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    noise: Option<NoiseLaw>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    types: Vec<TypeDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TypeDoc {
    map: Vec<usize>,
    p: f64,
    means: Vec<f64>,
}

impl PopulationDoc {
    fn from_spec(spec: &PopulationSpec) -> Self {
        match &spec.kind {
            PopulationKind::Table { types, noise } => PopulationDoc {
                arms: spec.arms,
                psi: spec.psi,
                recipe: None,
                noise: Some(*noise),
                types: types
                    .iter()
                    .map(|e| TypeDoc {
                        map: e.chi.as_slice().iter().map(|x| x + 1).collect(),
                        p: e.p,
                        means: e.means.clone(),
                    })
                    .collect(),
            },
            PopulationKind::Coupled(r) => PopulationDoc {
                arms: spec.arms,
                psi: spec.psi,
                recipe: Some(r.name().to_string()),
                noise: None,
                types: Vec::new(),
            },
        }
    }

    fn into_spec(self) -> Result<PopulationSpec, PopulationError> {
        if let Some(name) = self.recipe {
            let recipe = CoupledRecipe::from_name(&name).ok_or(PopulationError::UnknownRecipe(name))?;
            return Ok(PopulationSpec { arms: self.arms, psi: self.psi, kind: PopulationKind::Coupled(recipe) });
        }
        let Some(noise) = self.noise else {
            return Err(PopulationError::Invalid(vec![Violation::NoTypes]));
        };
        let mut zero_labels = Vec::new();
        let types = self
            .types
            .into_iter()
            .enumerate()
            .map(|(i, t)| {
                let map = t
                    .map
                    .into_iter()
                    .map(|label| {
                        label.checked_sub(1).unwrap_or_else(|| {
                            zero_labels.push(Violation::LabelOutOfRange { entry: i, label: 0 });
                            usize::MAX
                        })
                    })
                    .collect();
                TypeEntry { chi: ComplianceType::new(map), p: t.p, means: t.means }
            })
            .collect();
        let spec = PopulationSpec { arms: self.arms, psi: self.psi, kind: PopulationKind::Table { types, noise } };
        if !zero_labels.is_empty() {
            let mut all = zero_labels;
            all.extend(spec.violations().into_iter().filter(|v| !matches!(v, Violation::LabelOutOfRange { .. })));
            return Err(PopulationError::Invalid(all));
        }
        Ok(spec)
    }
}
