//! Weak orthogonal matching pursuit.
//!
//! Each iteration picks an unselected atom whose correlation with the
//! current residual is at least `rho` times the largest such correlation,
//! adds it to the support, refits by least squares and updates the
//! residual. `rho = 1` with [`SelectionPolicy::MaxCorrelation`] is OMP.

use std::collections::HashSet;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::dictionary::{Dictionary, Observation, SparseVector};
use crate::error::{Error, Result};

/// Residual floor relative to `||f||_2`, applied on top of `epsilon`.
pub const RESIDUAL_FLOOR: f64 = 1e-12;
/// Relative window inside which correlations count as tied for the maximum.
pub const TIE_REL: f64 = 1e-13;
/// Residual-orthogonality tolerance relative to `||f||_2`.
pub const ORTHOGONALITY_TOL: f64 = 1e-10;

/// How an index is picked from the admissible set
/// `A = { i not selected : |c_i| >= rho * max_j |c_j| }`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionPolicy {
    /// Largest correlation; lowest index among ties.
    #[default]
    MaxCorrelation,
    /// Lowest index in the admissible set.
    FirstAboveThreshold,
    /// Smallest admissible correlation; lowest index among ties.
    MinAboveThreshold,
}

impl SelectionPolicy {
    pub const ALL: [SelectionPolicy; 3] = [
        SelectionPolicy::MaxCorrelation,
        SelectionPolicy::FirstAboveThreshold,
        SelectionPolicy::MinAboveThreshold,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            SelectionPolicy::MaxCorrelation => "max",
            SelectionPolicy::FirstAboveThreshold => "first",
            SelectionPolicy::MinAboveThreshold => "min",
        }
    }
}

impl std::str::FromStr for SelectionPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "max" | "max_correlation" => Ok(SelectionPolicy::MaxCorrelation),
            "first" | "first_above_threshold" => Ok(SelectionPolicy::FirstAboveThreshold),
            "min" | "min_above_threshold" => Ok(SelectionPolicy::MinAboveThreshold),
            other => Err(Error::InvalidConfig(format!(
                "unknown selection policy {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PursuitConfig {
    pub rho: f64,
    pub epsilon: f64,
    /// Defaults to `min(n, d)` when `None`.
    pub max_iterations: Option<usize>,
    pub policy: SelectionPolicy,
}

impl PursuitConfig {
    pub fn new(rho: f64, epsilon: f64) -> Result<Self> {
        let config = Self {
            rho,
            epsilon,
            max_iterations: None,
            policy: SelectionPolicy::MaxCorrelation,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn omp(epsilon: f64) -> Result<Self> {
        Self::new(1.0, epsilon)
    }

    pub fn with_policy(mut self, policy: SelectionPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = Some(max_iterations);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "rho must lie in (0, 1], got {}",
                self.rho
            )));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            )));
        }
        if self.max_iterations == Some(0) {
            return Err(Error::InvalidConfig("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    ResidualBelowEpsilon,
    MaxIterations,
    RankDeficient,
}

/// State after `s` iterations: support `Lambda_s` (selection order),
/// least-squares coefficients `x_s` and residual `r_s`.
#[derive(Debug, Clone, PartialEq)]
pub struct Iterate {
    pub support: Vec<usize>,
    pub coefficients: DVector<f64>,
    pub residual: DVector<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryResult {
    /// 0-based atom indices in selection order.
    pub support_trajectory: Vec<usize>,
    /// Dense length-`d` estimate, zero off the final support.
    pub estimate: DVector<f64>,
    /// `||r_s||_2` for `s = 0..=iterations`.
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    /// Effective stopping level `max(epsilon, RESIDUAL_FLOOR * ||f||_2)`.
    pub stop_threshold: f64,
    /// Every iterate, `iterates[0]` being the initial state.
    pub iterates: Vec<Iterate>,
}

impl RecoveryResult {
    /// Final support, sorted ascending.
    pub fn support(&self) -> Vec<usize> {
        let mut s = self.support_trajectory.clone();
        s.sort_unstable();
        s
    }

    pub fn final_residual(&self) -> &DVector<f64> {
        &self
            .iterates
            .last()
            .expect("initial iterate always present")
            .residual
    }

    pub fn to_json(&self) -> RecoveryResultJson {
        RecoveryResultJson {
            support_trajectory: self.support_trajectory.iter().map(|i| i + 1).collect(),
            estimate: self.estimate.iter().copied().collect(),
            residual_norms: self.residual_norms.clone(),
            iterations: self.iterations,
            stop_reason: self.stop_reason,
            stop_threshold: self.stop_threshold,
        }
    }
}

/// Serialized form of a [`RecoveryResult`]; atom indices are 1-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecoveryResultJson {
    pub support_trajectory: Vec<usize>,
    pub estimate: Vec<f64>,
    pub residual_norms: Vec<f64>,
    pub iterations: usize,
    pub stop_reason: StopReason,
    pub stop_threshold: f64,
}

fn select(
    correlations: &DVector<f64>,
    selected: &[bool],
    rho: f64,
    policy: SelectionPolicy,
) -> Option<usize> {
    let max = correlations
        .iter()
        .zip(selected)
        .filter(|(_, s)| !**s)
        .map(|(c, _)| c.abs())
        .fold(None, |acc: Option<f64>, c| {
            Some(acc.map_or(c, |a| a.max(c)))
        })?;
    let candidates = || {
        correlations
            .iter()
            .enumerate()
            .filter(|(i, _)| !selected[*i])
            .map(|(i, c)| (i, c.abs()))
    };
    match policy {
        SelectionPolicy::MaxCorrelation => {
            let floor = max * (1.0 - TIE_REL);
            candidates().find(|(_, c)| *c >= floor).map(|(i, _)| i)
        }
        SelectionPolicy::FirstAboveThreshold => {
            let threshold = rho * max;
            candidates().find(|(_, c)| *c >= threshold).map(|(i, _)| i)
        }
        SelectionPolicy::MinAboveThreshold => {
            let threshold = rho * max;
            candidates()
                .filter(|(_, c)| *c >= threshold)
                .fold(None, |best: Option<(usize, f64)>, (i, c)| match best {
                    Some((_, b)) if b <= c => best,
                    _ => Some((i, c)),
                })
                .map(|(i, _)| i)
        }
    }
}

/// Runs weak orthogonal matching pursuit on `obs.f()`.
///
/// Stops when `||r_s||_2 <= max(epsilon, 1e-12 ||f||_2)`, after
/// `max_iterations` steps, when every atom is selected, or when the next
/// sub-dictionary would be rank deficient (in which case the result holds
/// the last full-rank state).
pub fn womp(
    dict: &Dictionary,
    obs: &Observation,
    config: &PursuitConfig,
) -> Result<RecoveryResult> {
    config.validate()?;
    let f = obs.f();
    if f.len() != dict.n() {
        return Err(Error::DimensionMismatch {
            expected: dict.n(),
            got: f.len(),
        });
    }
    let d = dict.d();
    let max_iterations = config.max_iterations.unwrap_or(dict.n().min(d));
    let stop_threshold = config.epsilon.max(RESIDUAL_FLOOR * f.norm());

    let mut selected = vec![false; d];
    let mut current = Iterate {
        support: Vec::new(),
        coefficients: DVector::zeros(0),
        residual: f.clone(),
    };
    let mut residual_norms = vec![f.norm()];
    let mut iterates = vec![current.clone()];

    let stop_reason = loop {
        if current.residual.norm() <= stop_threshold {
            break StopReason::ResidualBelowEpsilon;
        }
        if current.support.len() >= max_iterations {
            break StopReason::MaxIterations;
        }
        let correlations = dict.correlations(&current.residual)?;
        let Some(i) = select(&correlations, &selected, config.rho, config.policy) else {
            // every atom already selected
            break StopReason::MaxIterations;
        };
        debug_assert!(!selected[i]);

        let mut support = current.support.clone();
        support.push(i);
        match dict.least_squares(&support, f) {
            Ok(ls) => {
                selected[i] = true;
                current = Iterate {
                    support,
                    coefficients: ls.coefficients,
                    residual: ls.residual,
                };
                residual_norms.push(current.residual.norm());
                iterates.push(current.clone());
            }
            Err(Error::RankDeficient { .. }) => break StopReason::RankDeficient,
            Err(e) => return Err(e),
        }
    };

    let mut estimate = DVector::zeros(d);
    for (&i, &z) in current.support.iter().zip(current.coefficients.iter()) {
        estimate[i] = z;
    }
    Ok(RecoveryResult {
        iterations: current.support.len(),
        support_trajectory: current.support,
        estimate,
        residual_norms,
        stop_reason,
        stop_threshold,
        iterates,
    })
}

/// Orthogonal matching pursuit: [`womp`] with `rho = 1` and maximal selection.
pub fn omp(
    dict: &Dictionary,
    obs: &Observation,
    epsilon: f64,
    max_iterations: Option<usize>,
) -> Result<RecoveryResult> {
    let mut config = PursuitConfig::omp(epsilon)?;
    config.max_iterations = max_iterations;
    womp(dict, obs, &config)
}

/// Measured values of the per-run pursuit invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PursuitInvariants {
    /// `max_s max_{i in Lambda_s} |<r_s, phi_i>| / ||f||_2` over `s >= 1`.
    pub orthogonality_ratio: f64,
    pub repeated_atom: bool,
    /// Largest increase `||r_{s+1}|| - ||r_s||` (negative when strictly decreasing).
    pub max_residual_increase: f64,
}

impl PursuitInvariants {
    pub fn holds(&self) -> bool {
        self.orthogonality_ratio <= ORTHOGONALITY_TOL
            && !self.repeated_atom
            && self.max_residual_increase <= 1e-12
    }
}

pub fn check_invariants(
    dict: &Dictionary,
    f: &DVector<f64>,
    result: &RecoveryResult,
) -> Result<PursuitInvariants> {
    let f_norm = f.norm();
    let mut ratio = 0.0f64;
    for it in result.iterates.iter().skip(1) {
        let c = dict.correlations(&it.residual)?;
        let worst = it.support.iter().map(|&i| c[i].abs()).fold(0.0, f64::max);
        if f_norm > 0.0 {
            ratio = ratio.max(worst / f_norm);
        } else if worst > 0.0 {
            ratio = f64::INFINITY;
        }
    }
    let mut seen = HashSet::new();
    let repeated_atom = !result.support_trajectory.iter().all(|i| seen.insert(*i));
    let max_residual_increase = result
        .residual_norms
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(PursuitInvariants {
        orthogonality_ratio: ratio,
        repeated_atom,
        max_residual_increase,
    })
}

/// Splits the residual after selecting `support` as `r_s = Phi a_s + w_s`
/// with `Phi a_s = (I - P) Phi a` and `w_s = (I - P) w`, where `P` projects
/// onto the span of the selected atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualDecomposition {
    /// Dense `a_s`: equals `a` off `support`, absorbs the projection on it.
    pub signal_part: DVector<f64>,
    pub noise_part: DVector<f64>,
}

pub fn decompose_residual(
    dict: &Dictionary,
    support: &[usize],
    a: &SparseVector,
    w: &DVector<f64>,
) -> Result<ResidualDecomposition> {
    let phi_a = dict.apply(a)?;
    let proj_a = dict.least_squares(support, &phi_a)?;
    let mut signal_part = a.to_dense();
    for (&i, z) in support.iter().zip(proj_a.coefficients.iter()) {
        signal_part[i] -= z;
    }
    let noise_part = dict.least_squares(support, w)?.residual;
    Ok(ResidualDecomposition {
        signal_part,
        noise_part,
    })
}
