//! Sufficient conditions for support recovery by (weak) OMP, evaluated on
//! concrete dictionaries and signals.
//!
//! Every condition is a strict inequality `lhs < rhs`. When `delta_k` is too
//! expensive to enumerate the conditions are evaluated with upper bounds in
//! its place: a satisfied conservative condition is still a guarantee, an
//! unsatisfied one is inconclusive.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::coherence::{
    global_2_coherence, mutual_coherence, nu_or_zero, ric_estimate, ric_exact, Budget,
    DeltaEstimate,
};
use crate::dictionary::{Dictionary, SparseVector};
use crate::error::{Error, Result};
use crate::pursuit::RecoveryResult;

/// Distance to the boundary (relative to the larger side, floored at 1)
/// below which an inequality is flagged as borderline.
pub const BORDERLINE_TOL: f64 = 1e-12;
/// Slack for the two correlation bounds.
pub const LEMMA2_SLACK: f64 = 1e-10;
/// Tolerance for the orthogonality hypothesis on `Lambda \ Omega`.
pub const HYPOTHESIS_TOL: f64 = 1e-10;
/// Additive slack on the squared-error bound.
pub const ERROR_BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricMode {
    Exact,
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub value: f64,
    pub mode: MetricMode,
}

impl Metric {
    fn exact(value: f64) -> Self {
        Self {
            value,
            mode: MetricMode::Exact,
        }
    }

    fn from_delta(est: &DeltaEstimate) -> Self {
        match *est {
            DeltaEstimate::Exact { value } => Self::exact(value),
            DeltaEstimate::Bounded { upper, .. } => Self {
                value: upper,
                mode: MetricMode::Upper,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Theorem1,
    Corollary1a,
    Corollary1b,
    Corollary1c,
    Corollary2,
    PriorBound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PredictedOutcome {
    ExactSupportRecovery,
    NoGuarantee,
}

/// Three-way outcome separating exact refutations from inconclusive ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Satisfied,
    NotSatisfied,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub name: String,
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub borderline: bool,
}

impl Inequality {
    pub fn strict(name: &str, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(1.0);
        Self {
            name: name.to_string(),
            lhs,
            rhs,
            satisfied: lhs < rhs,
            borderline: (lhs - rhs).abs() <= BORDERLINE_TOL * scale,
        }
    }
}

/// Smallest singular value of `Phi_Lambda` against the two candidate lower
/// bounds `sqrt(1 - delta_k)` and `1 - delta_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMinCheck {
    pub sigma_min: f64,
    pub sqrt_one_minus_delta: f64,
    pub one_minus_delta: f64,
    pub meets_sqrt_bound: bool,
    pub meets_linear_bound: bool,
}

impl SigmaMinCheck {
    fn new(sigma_min: f64, delta: f64) -> Self {
        let sqrt_one_minus_delta = (1.0 - delta).max(0.0).sqrt();
        let one_minus_delta = 1.0 - delta;
        Self {
            sigma_min,
            sqrt_one_minus_delta,
            one_minus_delta,
            meets_sqrt_bound: sigma_min >= sqrt_one_minus_delta - 1e-12,
            meets_linear_bound: sigma_min >= one_minus_delta - 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GuaranteeReport {
    pub condition: Condition,
    pub k: usize,
    pub rho: Option<f64>,
    pub epsilon: Option<f64>,
    pub a_min: Option<f64>,
    pub a_norm: Option<f64>,
    /// Sides of the decisive inequality: the first one that fails, or the
    /// tightest one when all hold.
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
    pub conservative: bool,
    pub borderline: bool,
    pub verdict: Verdict,
    pub predicted_outcome: PredictedOutcome,
    pub inequalities: Vec<Inequality>,
    pub metrics: BTreeMap<String, Metric>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub sigma_min: Option<SigmaMinCheck>,
}

impl GuaranteeReport {
    fn assemble(
        condition: Condition,
        k: usize,
        inequalities: Vec<Inequality>,
        metrics: BTreeMap<String, Metric>,
    ) -> Self {
        let conservative = metrics.values().any(|m| m.mode != MetricMode::Exact);
        let satisfied = inequalities.iter().all(|i| i.satisfied);
        let decisive = inequalities
            .iter()
            .find(|i| !i.satisfied)
            .or_else(|| {
                inequalities
                    .iter()
                    .min_by(|a, b| (a.rhs - a.lhs).total_cmp(&(b.rhs - b.lhs)))
            })
            .expect("at least one inequality");
        let verdict = match (satisfied, conservative) {
            (true, _) => Verdict::Satisfied,
            (false, false) => Verdict::NotSatisfied,
            (false, true) => Verdict::Inconclusive,
        };
        Self {
            condition,
            k,
            rho: None,
            epsilon: None,
            a_min: None,
            a_norm: None,
            lhs: decisive.lhs,
            rhs: decisive.rhs,
            satisfied,
            conservative,
            borderline: inequalities.iter().any(|i| i.borderline),
            verdict,
            predicted_outcome: if satisfied {
                PredictedOutcome::ExactSupportRecovery
            } else {
                PredictedOutcome::NoGuarantee
            },
            inequalities,
            metrics,
            sigma_min: None,
        }
    }

    /// Satisfied with every metric exact.
    pub fn satisfied_exactly(&self) -> bool {
        self.satisfied && !self.conservative
    }
}

fn check_rho(rho: f64) -> Result<()> {
    if rho > 0.0 && rho <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "rho must lie in (0, 1], got {rho}"
        )))
    }
}

fn check_sparsity(dict: &Dictionary, k: usize) -> Result<()> {
    if k < 1 || k > dict.d() - 1 {
        return Err(Error::InvalidSparsity { k, d: dict.d() });
    }
    Ok(())
}

/// `sqrt(k) nu_k < rho (1 - delta_k)`, the signal-independent part of the
/// WOMP recovery condition.
pub fn theorem1_condition(
    dict: &Dictionary,
    k: usize,
    rho: f64,
    budget: &Budget,
) -> Result<GuaranteeReport> {
    check_rho(rho)?;
    check_sparsity(dict, k)?;
    let nu_k = global_2_coherence(dict, k)?;
    let delta = ric_estimate(dict, k, budget)?;
    let delta_k = delta.conservative();
    let sqrt_k = (k as f64).sqrt();
    let ineq = Inequality::strict(
        "sqrt(k)*nu_k < rho*(1-delta_k)",
        sqrt_k * nu_k,
        rho * (1.0 - delta_k),
    );
    let metrics = BTreeMap::from([
        ("nu_k".to_string(), Metric::exact(nu_k)),
        ("delta_k".to_string(), Metric::from_delta(&delta)),
    ]);
    let mut report = GuaranteeReport::assemble(Condition::Theorem1, k, vec![ineq], metrics);
    report.rho = Some(rho);
    Ok(report)
}

/// Both recovery conditions for the signal `a` observed with noise level
/// `epsilon`: `sqrt(k) nu_k < rho (1 - delta_k)` and
/// `epsilon < (rho (1 - delta_k) - sqrt(k) nu_k) / (1 + rho) * |a_min|`.
///
/// When satisfied, every WOMP run selecting per the weak rule recovers
/// `supp(a)` in `k` steps with `||a_hat - a||^2 <= epsilon^2 / (1 - delta_k)`.
pub fn theorem1_check(
    dict: &Dictionary,
    a: &SparseVector,
    rho: f64,
    epsilon: f64,
    budget: &Budget,
) -> Result<GuaranteeReport> {
    if a.dim() != dict.d() {
        return Err(Error::DimensionMismatch {
            expected: dict.d(),
            got: a.dim(),
        });
    }
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "epsilon must be finite and >= 0, got {epsilon}"
        )));
    }
    let k = a.sparsity();
    let base = theorem1_condition(dict, k, rho, budget)?;
    let a_min = a.a_min().expect("k >= 1");
    let nu_k = base.metrics["nu_k"].value;
    let delta_k = base.metrics["delta_k"].value;
    let sqrt_k = (k as f64).sqrt();
    let threshold = (rho * (1.0 - delta_k) - sqrt_k * nu_k) / (1.0 + rho) * a_min;

    let mut inequalities = base.inequalities;
    inequalities.push(Inequality::strict(
        "epsilon < (rho*(1-delta_k) - sqrt(k)*nu_k)/(1+rho)*|a_min|",
        epsilon,
        threshold,
    ));
    let mut report = GuaranteeReport::assemble(Condition::Theorem1, k, inequalities, base.metrics);
    report.rho = Some(rho);
    report.epsilon = Some(epsilon);
    report.a_min = Some(a_min);
    report.a_norm = Some(a.norm());
    report.sigma_min = Some(SigmaMinCheck::new(dict.sigma_min(a.support())?, delta_k));
    Ok(report)
}

/// The three coherence-based WOMP conditions for `k`-sparse noiseless
/// signals:
/// (a) `sqrt(k) delta_{k+1} < rho (1 - delta_k)`,
/// (b) `sqrt(k) nu_k < rho (1 - sqrt(k-1) nu_{k-1})`,
/// (c) `k M < rho (1 - (k-1) M)`.
pub fn corollary1_check(
    dict: &Dictionary,
    k: usize,
    rho: f64,
    budget: &Budget,
) -> Result<[GuaranteeReport; 3]> {
    check_rho(rho)?;
    check_sparsity(dict, k)?;
    let kf = k as f64;
    let sqrt_k = kf.sqrt();

    let delta_k = ric_estimate(dict, k, budget)?;
    let delta_kp1 = ric_estimate(dict, k + 1, budget)?;
    let a = GuaranteeReport::assemble(
        Condition::Corollary1a,
        k,
        vec![Inequality::strict(
            "sqrt(k)*delta_{k+1} < rho*(1-delta_k)",
            sqrt_k * delta_kp1.conservative(),
            rho * (1.0 - delta_k.conservative()),
        )],
        BTreeMap::from([
            ("delta_k".to_string(), Metric::from_delta(&delta_k)),
            ("delta_k+1".to_string(), Metric::from_delta(&delta_kp1)),
        ]),
    );

    let nu_k = global_2_coherence(dict, k)?;
    let nu_km1 = nu_or_zero(dict, k - 1)?;
    let b = GuaranteeReport::assemble(
        Condition::Corollary1b,
        k,
        vec![Inequality::strict(
            "sqrt(k)*nu_k < rho*(1-sqrt(k-1)*nu_{k-1})",
            sqrt_k * nu_k,
            rho * (1.0 - (kf - 1.0).sqrt() * nu_km1),
        )],
        BTreeMap::from([
            ("nu_k".to_string(), Metric::exact(nu_k)),
            ("nu_k-1".to_string(), Metric::exact(nu_km1)),
        ]),
    );

    let m = mutual_coherence(dict);
    let c = GuaranteeReport::assemble(
        Condition::Corollary1c,
        k,
        vec![Inequality::strict(
            "k*M < rho*(1-(k-1)*M)",
            kf * m,
            rho * (1.0 - (kf - 1.0) * m),
        )],
        BTreeMap::from([("M".to_string(), Metric::exact(m))]),
    );

    let mut out = [a, b, c];
    for r in &mut out {
        r.rho = Some(rho);
    }
    Ok(out)
}

fn exact_pair(dict: &Dictionary, k: usize, budget: &Budget) -> Result<(f64, f64)> {
    check_sparsity(dict, k)?;
    Ok((ric_exact(dict, k, budget)?, ric_exact(dict, k + 1, budget)?))
}

/// OMP condition `delta_k + sqrt(k) delta_{k+1} < 1`, exact metrics only.
pub fn corollary2_check(dict: &Dictionary, k: usize, budget: &Budget) -> Result<GuaranteeReport> {
    let (delta_k, delta_kp1) = exact_pair(dict, k, budget)?;
    let mut report = GuaranteeReport::assemble(
        Condition::Corollary2,
        k,
        vec![Inequality::strict(
            "delta_k + sqrt(k)*delta_{k+1} < 1",
            delta_k + (k as f64).sqrt() * delta_kp1,
            1.0,
        )],
        BTreeMap::from([
            ("delta_k".to_string(), Metric::exact(delta_k)),
            ("delta_k+1".to_string(), Metric::exact(delta_kp1)),
        ]),
    );
    report.rho = Some(1.0);
    Ok(report)
}

/// Earlier OMP condition `delta_{k+1} < 1 / (1 + sqrt(k))`, written as
/// `(1 + sqrt(k)) delta_{k+1} < 1`.
pub fn prior_bound_check(dict: &Dictionary, k: usize, budget: &Budget) -> Result<GuaranteeReport> {
    check_sparsity(dict, k)?;
    let delta_kp1 = ric_exact(dict, k + 1, budget)?;
    let mut report = GuaranteeReport::assemble(
        Condition::PriorBound,
        k,
        vec![Inequality::strict(
            "(1+sqrt(k))*delta_{k+1} < 1",
            (1.0 + (k as f64).sqrt()) * delta_kp1,
            1.0,
        )],
        BTreeMap::from([("delta_k+1".to_string(), Metric::exact(delta_kp1))]),
    );
    report.rho = Some(1.0);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundComparison {
    pub k: usize,
    pub delta_k: f64,
    pub delta_kp1: f64,
    pub new: bool,
    pub prior: bool,
    pub separation: bool,
}

/// Compares `delta_k + sqrt(k) delta_{k+1} < 1` against
/// `delta_{k+1} < 1 / (1 + sqrt(k))`. Since `delta_k <= delta_{k+1}` the
/// second implies the first; `separation` marks instances where only the
/// first holds.
pub fn compare_with_prior_bound(
    dict: &Dictionary,
    k: usize,
    budget: &Budget,
) -> Result<BoundComparison> {
    let (delta_k, delta_kp1) = exact_pair(dict, k, budget)?;
    let sqrt_k = (k as f64).sqrt();
    let new = delta_k + sqrt_k * delta_kp1 < 1.0;
    let prior = (1.0 + sqrt_k) * delta_kp1 < 1.0;
    Ok(BoundComparison {
        k,
        delta_k,
        delta_kp1,
        new,
        prior,
        separation: new && !prior,
    })
}

/// Correlation bounds for `f = Phi a + w`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma2Bounds {
    pub k: usize,
    pub m: usize,
    pub epsilon: f64,
    pub nu_k: f64,
    pub delta_k: f64,
    /// `max_{i not in Lambda} |<f, phi_i>|`
    pub off_support_max: f64,
    /// `max_{i in Lambda} |<f, phi_i>|`
    pub on_support_max: f64,
    /// `nu_k ||a||_2 + epsilon`
    pub upper: f64,
    /// `sqrt(1 - delta_k) / sqrt(m) ||Phi a||_2 - epsilon`
    pub lower: f64,
}

impl Lemma2Bounds {
    pub fn upper_holds(&self) -> bool {
        self.off_support_max <= self.upper + LEMMA2_SLACK
    }

    pub fn lower_holds(&self) -> bool {
        self.on_support_max >= self.lower - LEMMA2_SLACK
    }

    pub fn holds(&self) -> bool {
        self.upper_holds() && self.lower_holds()
    }
}

/// Correlation bounds for a coefficient vector supported on `support`
/// (given densely; entries may vanish), with externally supplied `nu_k` and
/// `delta_k` for `k = |support|`.
///
/// `omega` must be a subset of `support`, and `<Phi a, phi_i>` must vanish
/// for `i` in `support \ omega`. When `delta_k >= 1` the lower bound
/// degenerates to `-epsilon`.
pub fn lemma2_bounds_with_metrics(
    dict: &Dictionary,
    support: &[usize],
    a: &DVector<f64>,
    w: &DVector<f64>,
    omega: &[usize],
    nu_k: f64,
    delta_k: f64,
) -> Result<Lemma2Bounds> {
    if a.len() != dict.d() {
        return Err(Error::DimensionMismatch {
            expected: dict.d(),
            got: a.len(),
        });
    }
    if w.len() != dict.n() {
        return Err(Error::DimensionMismatch {
            expected: dict.n(),
            got: w.len(),
        });
    }
    if let Some(&i) = omega.iter().find(|i| !support.contains(i)) {
        return Err(Error::InvalidConfig(format!(
            "omega index {} is not in the support",
            i + 1
        )));
    }
    if let Some(i) = (0..dict.d()).find(|i| a[*i] != 0.0 && !support.contains(i)) {
        return Err(Error::InvalidSparseVector(format!(
            "coefficient {} is nonzero outside the declared support",
            i + 1
        )));
    }

    let phi_a = dict.matrix() * a;
    let phi_a_norm = phi_a.norm();
    let c_signal = dict.correlations(&phi_a)?;
    for &i in support.iter().filter(|i| !omega.contains(i)) {
        if c_signal[i].abs() > HYPOTHESIS_TOL * phi_a_norm.max(1.0) {
            return Err(Error::HypothesisViolated {
                index: i + 1,
                value: c_signal[i],
            });
        }
    }

    let f = &phi_a + w;
    let c = dict.correlations(&f)?;
    let mut off_support_max = 0.0f64;
    let mut on_support_max = 0.0f64;
    for (i, ci) in c.iter().enumerate() {
        if support.contains(&i) {
            on_support_max = on_support_max.max(ci.abs());
        } else {
            off_support_max = off_support_max.max(ci.abs());
        }
    }
    let epsilon = w.norm();
    let m = omega.len();
    let lower = if m == 0 {
        -epsilon
    } else {
        (1.0 - delta_k).max(0.0).sqrt() / (m as f64).sqrt() * phi_a_norm - epsilon
    };
    Ok(Lemma2Bounds {
        k: support.len(),
        m,
        epsilon,
        nu_k,
        delta_k,
        off_support_max,
        on_support_max,
        upper: nu_k * a.norm() + epsilon,
        lower,
    })
}

/// Correlation bounds for a sparse `a`, noise `w` (with `epsilon = ||w||_2`)
/// and active subset `omega` (defaults to the whole support).
pub fn lemma2_bounds(
    dict: &Dictionary,
    a: &SparseVector,
    w: &DVector<f64>,
    omega: Option<&[usize]>,
    budget: &Budget,
) -> Result<Lemma2Bounds> {
    if a.dim() != dict.d() {
        return Err(Error::DimensionMismatch {
            expected: dict.d(),
            got: a.dim(),
        });
    }
    let k = a.sparsity();
    check_sparsity(dict, k)?;
    let nu_k = global_2_coherence(dict, k)?;
    let delta_k = ric_exact(dict, k, budget)?;
    lemma2_bounds_with_metrics(
        dict,
        a.support(),
        &a.to_dense(),
        w,
        omega.unwrap_or(a.support()),
        nu_k,
        delta_k,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBoundReport {
    /// `||a_hat - a||_2^2`
    pub lhs: f64,
    /// `epsilon^2 / (1 - delta_k)`
    pub rhs: f64,
    pub holds: bool,
}

/// Checks `||a_hat - a||^2 <= epsilon^2 / (1 - delta_k)` for a run that
/// recovered the true support. `delta_k` must be exact and below 1.
pub fn error_bound_check(
    dict: &Dictionary,
    a: &SparseVector,
    result: &RecoveryResult,
    epsilon: f64,
    budget: &Budget,
) -> Result<ErrorBoundReport> {
    if result.support() != a.support() {
        return Err(Error::NotApplicable);
    }
    let delta = ric_exact(dict, a.sparsity(), budget)?;
    error_bound_with_delta(a, result, epsilon, delta)
}

pub fn error_bound_with_delta(
    a: &SparseVector,
    result: &RecoveryResult,
    epsilon: f64,
    delta_k: f64,
) -> Result<ErrorBoundReport> {
    if result.support() != a.support() {
        return Err(Error::NotApplicable);
    }
    if delta_k >= 1.0 {
        return Err(Error::DegenerateDelta { delta: delta_k });
    }
    let lhs = (&result.estimate - a.to_dense()).norm_squared();
    let rhs = epsilon * epsilon / (1.0 - delta_k);
    Ok(ErrorBoundReport {
        lhs,
        rhs,
        holds: lhs <= rhs + ERROR_BOUND_SLACK,
    })
}
