//! Seeded experiment sweeps.
//!
//! A sweep draws one dictionary per trial, a sparse signal and noise per
//! sparsity/noise level, evaluates every recovery condition and runs WOMP
//! under each configured policy. Output is one [`TrialRecord`] per
//! `(trial, k, epsilon, rho, policy)`, in that nesting order, regardless of
//! how trials are scheduled across threads.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ensemble::{
    generate_dictionary, generate_noise, generate_sparse_signal, EnsembleKind, EnsembleSpec,
    ValueModel,
};
use super::rng::mix;
use crate::coherence::{global_2_coherence, mutual_coherence, ric_estimate, Budget, DeltaEstimate};
use crate::dictionary::Dictionary;
use crate::error::{Error, Result};
use crate::guarantees::{
    compare_with_prior_bound, corollary1_check, error_bound_with_delta, theorem1_check, Verdict,
};
use crate::pursuit::{check_invariants, womp, PursuitConfig, SelectionPolicy};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum OneOrMany<T> {
    One(T),
    Many(Vec<T>),
}

impl<T> OneOrMany<T> {
    fn into_vec(self) -> Vec<T> {
        match self {
            OneOrMany::One(v) => vec![v],
            OneOrMany::Many(v) => v,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    trials: usize,
    #[serde(default)]
    seed: u64,
    kind: String,
    n: Option<usize>,
    d: Option<usize>,
    #[serde(default)]
    scale: f64,
    matrix: Option<PathBuf>,
    #[serde(default)]
    renormalize: bool,
    k: OneOrMany<usize>,
    rho: Option<OneOrMany<f64>>,
    epsilon: Option<OneOrMany<f64>>,
    noise_fraction: Option<f64>,
    policies: Option<Vec<String>>,
    value_model: Option<String>,
    a_min: Option<f64>,
    ric_budget: Option<u64>,
    plot_axis: Option<String>,
}

/// Axis along which plot tables aggregate success rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotAxis {
    Rho,
    K,
    Epsilon,
}

impl std::str::FromStr for PlotAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho" => Ok(PlotAxis::Rho),
            "k" => Ok(PlotAxis::K),
            "epsilon" | "eps" => Ok(PlotAxis::Epsilon),
            other => Err(Error::Config(format!("unknown plot axis {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub trials: usize,
    pub seed: u64,
    /// Dimensions, kind and scale; the seed field is ignored (per-trial seeds are derived).
    pub ensemble: EnsembleSpec,
    pub ks: Vec<usize>,
    pub rhos: Vec<f64>,
    pub epsilons: Vec<f64>,
    /// Noise is drawn with `||w||_2 = noise_fraction * epsilon`.
    pub noise_fraction: f64,
    pub policies: Vec<SelectionPolicy>,
    pub value_model: ValueModel,
    pub budget: Budget,
    pub plot_axis: PlotAxis,
}

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SweepOverrides {
    pub trials: Option<usize>,
    pub seed: Option<u64>,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl SweepConfig {
    /// Parses the flat key-value config. Relative `matrix` paths resolve
    /// against `base_dir`.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| config_err(e.to_string()))?;
        if raw.trials == 0 {
            return Err(config_err("trials must be >= 1"));
        }
        let (kind, n, d) = match raw.kind.as_str() {
            "gaussian" | "perturbed-identity" => {
                let n = raw.n.ok_or_else(|| config_err("missing key n"))?;
                let d = raw.d.ok_or_else(|| config_err("missing key d"))?;
                let kind = if raw.kind == "gaussian" {
                    EnsembleKind::GaussianNormalized
                } else {
                    EnsembleKind::PartialIdentityPerturbed
                };
                (kind, n, d)
            }
            "file" => {
                let path = raw
                    .matrix
                    .clone()
                    .ok_or_else(|| config_err("kind = \"file\" needs a matrix path"))?;
                let path = if path.is_relative() {
                    base_dir.join(path)
                } else {
                    path
                };
                (
                    EnsembleKind::FromFile {
                        path,
                        renormalize: raw.renormalize,
                    },
                    0,
                    0,
                )
            }
            other => return Err(config_err(format!("unknown kind {other:?}"))),
        };
        let ks = raw.k.into_vec();
        if ks.is_empty() || ks.contains(&0) {
            return Err(config_err("k must be a nonempty list of positive integers"));
        }
        let rhos = raw.rho.map_or(vec![1.0], OneOrMany::into_vec);
        if rhos.is_empty() || rhos.iter().any(|r| !(*r > 0.0 && *r <= 1.0)) {
            return Err(config_err("rho values must lie in (0, 1]"));
        }
        let epsilons = raw.epsilon.map_or(vec![0.0], OneOrMany::into_vec);
        if epsilons.is_empty() || epsilons.iter().any(|e| !(*e >= 0.0 && e.is_finite())) {
            return Err(config_err("epsilon values must be finite and >= 0"));
        }
        let noise_fraction = raw.noise_fraction.unwrap_or(0.9);
        if !(0.0..=1.0).contains(&noise_fraction) {
            return Err(config_err("noise_fraction must lie in [0, 1]"));
        }
        let policies = raw
            .policies
            .unwrap_or_else(|| vec!["max".into()])
            .iter()
            .map(|p| {
                p.parse()
                    .map_err(|_| config_err(format!("unknown policy {p:?}")))
            })
            .collect::<Result<Vec<SelectionPolicy>>>()?;
        if policies.is_empty() {
            return Err(config_err("policies must be nonempty"));
        }
        let a_min = raw.a_min.unwrap_or(1.0);
        let value_model = match raw.value_model.as_deref().unwrap_or("unit-signs") {
            "unit-signs" => ValueModel::UnitSigns,
            "gaussian" => ValueModel::GaussianMagnitudes,
            "min-magnitude" => ValueModel::MinMagnitude(a_min),
            other => return Err(config_err(format!("unknown value_model {other:?}"))),
        };
        let mut budget = Budget::default();
        if let Some(b) = raw.ric_budget {
            budget.ric_subsets = b as u128;
        }
        let plot_axis = raw.plot_axis.as_deref().unwrap_or("rho").parse()?;
        Ok(Self {
            trials: raw.trials,
            seed: raw.seed,
            ensemble: EnsembleSpec {
                kind,
                n,
                d,
                perturbation_scale: raw.scale,
                seed: 0,
            },
            ks,
            rhos,
            epsilons,
            noise_fraction,
            policies,
            value_model,
            budget,
            plot_axis,
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn apply(&mut self, overrides: &SweepOverrides) {
        if let Some(t) = overrides.trials {
            self.trials = t;
        }
        if let Some(s) = overrides.seed {
            self.seed = s;
        }
    }
}

/// One flat CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub rho: f64,
    pub epsilon: f64,
    pub noise_norm: Option<f64>,
    pub policy: String,
    pub m: Option<f64>,
    pub nu_k: Option<f64>,
    pub delta_k: Option<f64>,
    /// `exact` or `upper`.
    pub delta_mode: Option<String>,
    pub delta_k1: Option<f64>,
    pub theorem1: Option<bool>,
    pub corollary1a: Option<bool>,
    pub corollary1b: Option<bool>,
    pub corollary1c: Option<bool>,
    pub corollary2: Option<bool>,
    pub prior: Option<bool>,
    pub support_match: Option<bool>,
    pub iterations: Option<usize>,
    pub final_residual: Option<f64>,
    /// `||a_hat - a||^2 / (epsilon^2 / (1 - delta_k))` when defined.
    pub error_ratio: Option<f64>,
    pub error_bound_holds: Option<bool>,
    pub invariants_ok: Option<bool>,
    pub error: Option<String>,
}

impl TrialRecord {
    fn blank(trial: usize, seed: u64, n: usize, d: usize) -> Self {
        Self {
            trial,
            seed,
            n,
            d,
            k: 0,
            rho: 0.0,
            epsilon: 0.0,
            noise_norm: None,
            policy: String::new(),
            m: None,
            nu_k: None,
            delta_k: None,
            delta_mode: None,
            delta_k1: None,
            theorem1: None,
            corollary1a: None,
            corollary1b: None,
            corollary1c: None,
            corollary2: None,
            prior: None,
            support_match: None,
            iterations: None,
            final_residual: None,
            error_ratio: None,
            error_bound_holds: None,
            invariants_ok: None,
            error: None,
        }
    }

    /// A guaranteed instance on which recovery or the error bound failed.
    pub fn soundness_violation(&self) -> bool {
        let Some(recovered) = self.support_match else {
            return false;
        };
        let noiseless = self.epsilon == 0.0;
        let omp = self.rho == 1.0 && self.policy == SelectionPolicy::MaxCorrelation.short_name();
        let guaranteed = self.theorem1 == Some(true)
            || (noiseless
                && [self.corollary1a, self.corollary1b, self.corollary1c].contains(&Some(true)))
            || (noiseless && omp && self.corollary2 == Some(true));
        let error_bound_failed =
            self.theorem1 == Some(true) && self.error_bound_holds == Some(false);
        guaranteed && (!recovered || error_bound_failed)
    }
}

fn dictionary_for_trial(
    config: &SweepConfig,
    shared: Option<&Dictionary>,
    trial_seed: u64,
) -> Result<Dictionary> {
    match shared {
        Some(d) => Ok(d.clone()),
        None => {
            let mut spec = config.ensemble.clone();
            spec.seed = trial_seed;
            generate_dictionary(&spec)
        }
    }
}

fn verdict_flag(v: Verdict) -> Option<bool> {
    match v {
        Verdict::Satisfied => Some(true),
        Verdict::NotSatisfied => Some(false),
        Verdict::Inconclusive => None,
    }
}

fn run_trial(config: &SweepConfig, shared: Option<&Dictionary>, trial: usize) -> Vec<TrialRecord> {
    let trial_seed = mix(config.seed, trial as u64);
    let dict = match dictionary_for_trial(config, shared, trial_seed) {
        Ok(d) => d,
        Err(e) => {
            let mut r = TrialRecord::blank(trial, trial_seed, config.ensemble.n, config.ensemble.d);
            r.error = Some(e.code().to_string());
            return vec![r];
        }
    };
    let mut out = Vec::new();
    for &k in &config.ks {
        out.extend(run_sparsity(config, &dict, trial, trial_seed, k));
    }
    out
}

fn run_sparsity(
    config: &SweepConfig,
    dict: &Dictionary,
    trial: usize,
    trial_seed: u64,
    k: usize,
) -> Vec<TrialRecord> {
    let mut base = TrialRecord::blank(trial, trial_seed, dict.n(), dict.d());
    base.k = k;
    let fail = |mut r: TrialRecord, e: Error| {
        r.error = Some(e.code().to_string());
        vec![r]
    };

    let signal_seed = mix(trial_seed, 1_000 + k as u64);
    let a = match generate_sparse_signal(dict.d(), k, signal_seed, config.value_model) {
        Ok(a) => a,
        Err(e) => return fail(base, e),
    };
    base.m = Some(mutual_coherence(dict));
    match global_2_coherence(dict, k) {
        Ok(v) => base.nu_k = Some(v),
        Err(e) => return fail(base, e),
    }
    let delta = match ric_estimate(dict, k, &config.budget) {
        Ok(v) => v,
        Err(e) => return fail(base, e),
    };
    base.delta_k = Some(delta.conservative());
    base.delta_mode = Some(if delta.is_exact() { "exact" } else { "upper" }.into());
    if k < dict.d() {
        if let Ok(est) = ric_estimate(dict, k + 1, &config.budget) {
            base.delta_k1 = Some(est.conservative());
        }
        if let Ok(cmp) = compare_with_prior_bound(dict, k, &config.budget) {
            base.corollary2 = Some(cmp.new);
            base.prior = Some(cmp.prior);
        }
    }
    let exact_delta = match delta {
        DeltaEstimate::Exact { value } => Some(value),
        DeltaEstimate::Bounded { .. } => None,
    };

    let mut out = Vec::new();
    for (ei, &epsilon) in config.epsilons.iter().enumerate() {
        let noise_norm = config.noise_fraction * epsilon;
        let w = generate_noise(dict.n(), noise_norm, mix(signal_seed, ei as u64));
        let obs = match dict.synthesize(&a, Some(&w)) {
            Ok(o) => o,
            Err(e) => return fail(base, e),
        };
        for &rho in &config.rhos {
            let mut at_rho = base.clone();
            at_rho.rho = rho;
            at_rho.epsilon = epsilon;
            at_rho.noise_norm = Some(noise_norm);
            match theorem1_check(dict, &a, rho, epsilon, &config.budget) {
                Ok(r) => at_rho.theorem1 = verdict_flag(r.verdict),
                Err(e) => at_rho.error = Some(e.code().to_string()),
            }
            if let Ok([ca, cb, cc]) = corollary1_check(dict, k, rho, &config.budget) {
                at_rho.corollary1a = verdict_flag(ca.verdict);
                at_rho.corollary1b = verdict_flag(cb.verdict);
                at_rho.corollary1c = verdict_flag(cc.verdict);
            }
            for &policy in &config.policies {
                let mut rec = at_rho.clone();
                rec.policy = policy.short_name().to_string();
                let pursuit = PursuitConfig::new(rho, epsilon).map(|c| c.with_policy(policy));
                let result = pursuit.and_then(|c| womp(dict, &obs, &c));
                match result {
                    Ok(result) => {
                        let matched = result.support() == a.support() && result.iterations == k;
                        rec.support_match = Some(matched);
                        rec.iterations = Some(result.iterations);
                        rec.final_residual = result.residual_norms.last().copied();
                        rec.invariants_ok = check_invariants(dict, obs.f(), &result)
                            .ok()
                            .map(|i| i.holds());
                        if let (true, Some(delta)) = (matched, exact_delta) {
                            if let Ok(eb) = error_bound_with_delta(&a, &result, epsilon, delta) {
                                rec.error_bound_holds = Some(eb.holds);
                                if eb.rhs > 0.0 {
                                    rec.error_ratio = Some(eb.lhs / eb.rhs);
                                }
                            }
                        }
                    }
                    Err(e) => rec.error = Some(e.code().to_string()),
                }
                out.push(rec);
            }
        }
    }
    out
}

/// Runs every trial (in parallel) and returns records in trial order.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TrialRecord>> {
    let shared = match &config.ensemble.kind {
        EnsembleKind::FromFile { .. } => Some(generate_dictionary(&config.ensemble)?),
        _ => None,
    };
    let per_trial: Vec<Vec<TrialRecord>> = (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, shared.as_ref(), t))
        .collect();
    Ok(per_trial.into_iter().flatten().collect())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Rate {
    pub count: usize,
    pub successes: usize,
    pub rate: Option<f64>,
}

impl Rate {
    fn add(&mut self, success: bool) {
        self.count += 1;
        self.successes += usize::from(success);
        self.rate = Some(self.successes as f64 / self.count as f64);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub trials: usize,
    pub records: usize,
    pub errors: usize,
    pub invariant_violations: usize,
    pub soundness_violations: usize,
    pub overall: Rate,
    /// Recovery rate among records whose condition is satisfied.
    pub conditioned: BTreeMap<String, Rate>,
}

impl SweepSummary {
    pub fn from_records(records: &[TrialRecord]) -> Self {
        let trials = records
            .iter()
            .map(|r| r.trial)
            .collect::<std::collections::BTreeSet<_>>()
            .len();
        let mut summary = Self {
            trials,
            records: records.len(),
            errors: records.iter().filter(|r| r.error.is_some()).count(),
            invariant_violations: records
                .iter()
                .filter(|r| r.invariants_ok == Some(false))
                .count(),
            soundness_violations: records.iter().filter(|r| r.soundness_violation()).count(),
            overall: Rate::default(),
            conditioned: BTreeMap::new(),
        };
        for r in records {
            let Some(success) = r.support_match else {
                continue;
            };
            summary.overall.add(success);
            let flags = [
                ("theorem1", r.theorem1),
                ("corollary1a", r.corollary1a),
                ("corollary1b", r.corollary1b),
                ("corollary1c", r.corollary1c),
                ("corollary2", r.corollary2),
                ("prior", r.prior),
            ];
            for (name, flag) in flags {
                if flag == Some(true) {
                    summary
                        .conditioned
                        .entry(name.to_string())
                        .or_default()
                        .add(success);
                }
            }
        }
        summary
    }

    pub fn violations(&self) -> usize {
        self.invariant_violations + self.soundness_violations
    }
}
