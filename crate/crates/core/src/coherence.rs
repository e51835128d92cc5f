//! Dictionary metrics: mutual coherence `M`, global 2-coherence `nu_k`,
//! the restricted isometry constant `delta_k` and the coherence sandwich
//!
//! ```text
//! M <= nu_{k-1} <= delta_k <= sqrt(k-1) nu_{k-1} <= (k-1) M      (k > 1)
//! ```
//!
//! `nu_k` has an `O(d^2 (n + log d))` fast path; two enumeration routes are
//! kept as oracles. `delta_k` is computed exactly by enumerating every
//! `k`-subset and taking the extreme eigenvalues of its Gram matrix, which
//! is only feasible for small `C(d, k)`. Above that budget callers fall back
//! to [`ric_bounds`].

use std::collections::BTreeMap;

use itertools::Itertools;
use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::error::{Error, Result};

/// Slack used when comparing adjacent terms of the coherence chain.
pub const CHAIN_SLACK: f64 = 1e-9;

const EIGEN_MAX_ITER: usize = 10_000;

/// Enumeration limits for the exact computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Maximum `C(d, k)` for exact `delta_k`.
    pub ric_subsets: u128,
    /// Maximum number of (atom, subset) pairs for the `nu_k` oracles.
    pub oracle_evaluations: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            ric_subsets: 200_000,
            oracle_evaluations: 10_000_000,
        }
    }
}

/// Binomial coefficient, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// `M = max_{i != j} |<phi_i, phi_j>|`.
pub fn mutual_coherence(dict: &Dictionary) -> f64 {
    let g = dict.gram();
    let d = dict.d();
    let mut m = 0.0f64;
    for j in 0..d {
        for i in 0..d {
            if i != j {
                m = m.max(g[(i, j)].abs());
            }
        }
    }
    m
}

fn check_nu_order(dict: &Dictionary, k: usize) -> Result<()> {
    if k < 1 || k > dict.d() - 1 {
        return Err(Error::OrderOutOfRange {
            k,
            max: dict.d() - 1,
        });
    }
    Ok(())
}

/// Squared off-diagonal Gram entries of each column, sorted descending.
fn sorted_squared_rows(g: &DMatrix<f64>) -> Vec<Vec<f64>> {
    let d = g.ncols();
    (0..d)
        .map(|i| {
            let mut row: Vec<f64> = (0..d)
                .filter(|&j| j != i)
                .map(|j| g[(j, i)] * g[(j, i)])
                .collect();
            row.sort_unstable_by(|a, b| b.total_cmp(a));
            row
        })
        .collect()
}

/// Global 2-coherence `nu_k` via the top-`k` selection per atom.
///
/// The inner maximization over `|Lambda| <= k` is attained by the `k`
/// largest squared inner products since every summand is nonnegative.
pub fn global_2_coherence(dict: &Dictionary, k: usize) -> Result<f64> {
    check_nu_order(dict, k)?;
    let g = dict.gram();
    let d = dict.d();
    let mut best = 0.0f64;
    let mut row = Vec::with_capacity(d - 1);
    for i in 0..d {
        row.clear();
        row.extend((0..d).filter(|&j| j != i).map(|j| g[(j, i)] * g[(j, i)]));
        if k < row.len() {
            row.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
        }
        let top = &mut row[..k];
        top.sort_unstable_by(|a, b| b.total_cmp(a));
        best = best.max(top.iter().sum::<f64>().sqrt());
    }
    Ok(best)
}

/// `nu_1, ..., nu_{k_max}` in one pass (prefix sums of sorted rows).
pub fn global_2_coherence_profile(dict: &Dictionary, k_max: usize) -> Result<Vec<f64>> {
    check_nu_order(dict, k_max)?;
    let rows = sorted_squared_rows(&dict.gram());
    let mut out = vec![0.0f64; k_max];
    for row in &rows {
        let mut acc = 0.0;
        for (k, v) in row.iter().take(k_max).enumerate() {
            acc += v;
            out[k] = out[k].max(acc.sqrt());
        }
    }
    Ok(out)
}

/// `nu_k` with the convention `nu_0 = 0`.
pub(crate) fn nu_or_zero(dict: &Dictionary, k: usize) -> Result<f64> {
    if k == 0 {
        Ok(0.0)
    } else {
        global_2_coherence(dict, k)
    }
}

fn check_budget(estimated: u128, budget: u128) -> Result<()> {
    if estimated > budget {
        Err(Error::BudgetExceeded { estimated, budget })
    } else {
        Ok(())
    }
}

/// Oracle: evaluates the defining double maximum literally, over every atom
/// `i` and every `Lambda` in `[d] \ {i}` with `|Lambda| <= k`.
pub fn global_2_coherence_brute(dict: &Dictionary, k: usize, budget: &Budget) -> Result<f64> {
    check_nu_order(dict, k)?;
    let d = dict.d();
    let estimated = (0..=k)
        .map(|j| binomial(d - 1, j))
        .fold(0u128, u128::saturating_add)
        .saturating_mul(d as u128);
    check_budget(estimated, budget.oracle_evaluations)?;

    let g = dict.gram();
    let mut best = 0.0f64;
    for i in 0..d {
        let others: Vec<usize> = (0..d).filter(|&j| j != i).collect();
        for size in 1..=k {
            for subset in others.iter().combinations(size) {
                let s: f64 = subset.iter().map(|&&j| g[(i, j)] * g[(i, j)]).sum();
                best = best.max(s.sqrt());
            }
        }
    }
    Ok(best)
}

/// Oracle: `nu_k = max_{|Lambda| <= k+1} ||G_Lambda - I||_{inf,2}`, the
/// largest row norm of the off-diagonal part of a sub-Gram matrix.
pub fn global_2_coherence_gram_form(dict: &Dictionary, k: usize, budget: &Budget) -> Result<f64> {
    check_nu_order(dict, k)?;
    let d = dict.d();
    let estimated = (1..=k + 1)
        .map(|j| binomial(d, j).saturating_mul(j as u128))
        .fold(0u128, u128::saturating_add);
    check_budget(estimated, budget.oracle_evaluations)?;

    let mut best = 0.0f64;
    for size in 2..=k + 1 {
        for subset in (0..d).combinations(size) {
            let gram = dict.gram_view(&subset)?;
            let off = gram.gram() - DMatrix::identity(size, size);
            for row in off.row_iter() {
                best = best.max(row.norm());
            }
        }
    }
    Ok(best)
}

fn check_ric_order(dict: &Dictionary, k: usize) -> Result<()> {
    if k < 1 || k > dict.d() {
        return Err(Error::OrderOutOfRange { k, max: dict.d() });
    }
    Ok(())
}

/// Spectral deviation `max(lambda_max - 1, 1 - lambda_min)` of a symmetric matrix.
pub fn spectral_deviation(gram: DMatrix<f64>) -> Result<f64> {
    let eig =
        SymmetricEigen::try_new(gram, f64::EPSILON, EIGEN_MAX_ITER).ok_or(Error::EigenFailure)?;
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::EigenFailure);
    }
    Ok((hi - 1.0).max(1.0 - lo))
}

/// Exact `delta_k` together with a subset attaining it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RicValue {
    pub delta: f64,
    /// 0-based indices of the lexicographically first maximizing subset.
    pub witness: Vec<usize>,
}

/// Exact restricted isometry constant by enumerating all `k`-subsets.
///
/// `delta_k = max_{|Lambda| = k} ||G_Lambda - I||_2`. Subsets of smaller
/// size are covered because the deviation of a principal submatrix never
/// exceeds that of the full matrix (eigenvalue interlacing). The value is
/// returned even when it is `>= 1`.
pub fn ric_exact_with_witness(dict: &Dictionary, k: usize, budget: &Budget) -> Result<RicValue> {
    check_ric_order(dict, k)?;
    let d = dict.d();
    check_budget(binomial(d, k), budget.ric_subsets)?;
    let g = dict.gram();

    // partition the subset space by leading index; the max-reduction below
    // is independent of how rayon splits the work
    let per_lead: Vec<Result<Option<RicValue>>> = (0..=d - k)
        .into_par_iter()
        .map(|lead| {
            let mut best: Option<RicValue> = None;
            let mut sub = DMatrix::<f64>::zeros(k, k);
            for rest in (lead + 1..d).combinations(k - 1) {
                let mut subset = Vec::with_capacity(k);
                subset.push(lead);
                subset.extend(rest);
                for (a, &i) in subset.iter().enumerate() {
                    for (b, &j) in subset.iter().enumerate() {
                        sub[(a, b)] = g[(i, j)];
                    }
                }
                let delta = spectral_deviation(sub.clone())?;
                if best.as_ref().is_none_or(|b| delta > b.delta) {
                    best = Some(RicValue {
                        delta,
                        witness: subset,
                    });
                }
            }
            Ok(best)
        })
        .collect();

    let mut best: Option<RicValue> = None;
    for candidate in per_lead {
        if let Some(c) = candidate? {
            if best.as_ref().is_none_or(|b| c.delta > b.delta) {
                best = Some(c);
            }
        }
    }
    best.ok_or(Error::EigenFailure)
}

pub fn ric_exact(dict: &Dictionary, k: usize, budget: &Budget) -> Result<f64> {
    ric_exact_with_witness(dict, k, budget).map(|r| r.delta)
}

/// `max_{|Lambda| = k} max_{i in Lambda} sum_{j in Lambda, j != i} |g_ij|`,
/// an upper bound on `delta_k` from Gershgorin's disc theorem.
///
/// For a fixed row `i` the maximizing `Lambda` takes the `k - 1` largest
/// off-diagonal magnitudes, so no enumeration is needed.
pub fn ric_gershgorin_upper(dict: &Dictionary, k: usize) -> Result<f64> {
    if k < 2 || k > dict.d() {
        return Err(Error::OrderOutOfRange { k, max: dict.d() });
    }
    let g = dict.gram();
    let d = dict.d();
    let mut best = 0.0f64;
    for i in 0..d {
        let mut row: Vec<f64> = (0..d)
            .filter(|&j| j != i)
            .map(|j| g[(j, i)].abs())
            .collect();
        row.sort_unstable_by(|a, b| b.total_cmp(a));
        best = best.max(row[..k - 1].iter().sum());
    }
    Ok(best)
}

/// Interval known to contain `delta_k` without enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicBounds {
    pub lower: f64,
    pub upper: f64,
}

/// `[nu_{k-1}, min(sqrt(k-1) nu_{k-1}, (k-1) M, Gershgorin)]`.
pub fn ric_bounds(dict: &Dictionary, k: usize) -> Result<RicBounds> {
    check_ric_order(dict, k)?;
    if k == 1 {
        return Ok(RicBounds {
            lower: 0.0,
            upper: 0.0,
        });
    }
    let nu = global_2_coherence(dict, k - 1)?;
    let m = mutual_coherence(dict);
    let km1 = (k - 1) as f64;
    let upper = (km1.sqrt() * nu)
        .min(km1 * m)
        .min(ric_gershgorin_upper(dict, k)?);
    Ok(RicBounds { lower: nu, upper })
}

/// `delta_k` exactly when the enumeration fits the budget, bounds otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum DeltaEstimate {
    Exact { value: f64 },
    Bounded { lower: f64, upper: f64 },
}

impl DeltaEstimate {
    /// The value to use when a condition must hold for the true `delta_k`.
    pub fn conservative(&self) -> f64 {
        match *self {
            DeltaEstimate::Exact { value } => value,
            DeltaEstimate::Bounded { upper, .. } => upper,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, DeltaEstimate::Exact { .. })
    }
}

pub fn ric_estimate(dict: &Dictionary, k: usize, budget: &Budget) -> Result<DeltaEstimate> {
    match ric_exact(dict, k, budget) {
        Ok(value) => Ok(DeltaEstimate::Exact { value }),
        Err(Error::BudgetExceeded { .. }) => {
            let b = ric_bounds(dict, k)?;
            Ok(DeltaEstimate::Bounded {
                lower: b.lower,
                upper: b.upper,
            })
        }
        Err(e) => Err(e),
    }
}

/// All five terms of the coherence sandwich for one order `k >= 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: f64,
    pub nu_km1: f64,
    pub delta_k: f64,
    pub sqrt_bound: f64,
    #[serde(rename = "M_bound")]
    pub m_bound: f64,
    pub holds: bool,
}

impl ChainReport {
    /// The chain as an ordered slice, smallest term first.
    pub fn terms(&self) -> [f64; 5] {
        [
            self.m,
            self.nu_km1,
            self.delta_k,
            self.sqrt_bound,
            self.m_bound,
        ]
    }
}

/// Evaluates `M <= nu_{k-1} <= delta_k <= sqrt(k-1) nu_{k-1} <= (k-1) M`
/// with every term computed on its own path and `delta_k` exact.
pub fn lemma1_chain(dict: &Dictionary, k: usize, budget: &Budget) -> Result<ChainReport> {
    if k < 2 || k > dict.d() {
        return Err(Error::OrderOutOfRange { k, max: dict.d() });
    }
    let m = mutual_coherence(dict);
    let nu_km1 = global_2_coherence(dict, k - 1)?;
    let delta_k = ric_exact(dict, k, budget)?;
    let km1 = (k - 1) as f64;
    let mut report = ChainReport {
        k,
        m,
        nu_km1,
        delta_k,
        sqrt_bound: km1.sqrt() * nu_km1,
        m_bound: km1 * m,
        holds: false,
    };
    report.holds = report
        .terms()
        .windows(2)
        .all(|w| w[0] <= w[1] + CHAIN_SLACK);
    Ok(report)
}

/// Metric summary of one dictionary up to order `k_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherenceProfile {
    #[serde(rename = "M")]
    pub m: f64,
    pub nu: BTreeMap<usize, f64>,
    pub delta_exact: BTreeMap<usize, f64>,
    pub delta_lower: BTreeMap<usize, f64>,
    pub delta_upper_nu: BTreeMap<usize, f64>,
    pub delta_upper_m: BTreeMap<usize, f64>,
    pub gershgorin_radius_max: BTreeMap<usize, f64>,
}

impl CoherenceProfile {
    /// Computes `nu_k` for `k = 1..=min(k_max, d-1)` and the `delta_k`
    /// family for `k = 1..=min(k_max, d)`, exact where the budget allows.
    pub fn compute(dict: &Dictionary, k_max: usize, budget: &Budget) -> Result<Self> {
        let d = dict.d();
        let m = mutual_coherence(dict);
        let nu_max = k_max.min(d - 1);
        let nu_vals = if nu_max >= 1 {
            global_2_coherence_profile(dict, nu_max)?
        } else {
            Vec::new()
        };
        let nu: BTreeMap<usize, f64> = nu_vals
            .iter()
            .enumerate()
            .map(|(i, v)| (i + 1, *v))
            .collect();
        let mut profile = Self {
            m,
            nu,
            delta_exact: BTreeMap::new(),
            delta_lower: BTreeMap::new(),
            delta_upper_nu: BTreeMap::new(),
            delta_upper_m: BTreeMap::new(),
            gershgorin_radius_max: BTreeMap::new(),
        };
        for k in 1..=k_max.min(d) {
            match ric_exact(dict, k, budget) {
                Ok(v) => {
                    profile.delta_exact.insert(k, v);
                }
                Err(Error::BudgetExceeded { .. }) => {}
                Err(e) => return Err(e),
            }
            if k >= 2 {
                let nu_km1 = profile.nu[&(k - 1)];
                let km1 = (k - 1) as f64;
                profile.delta_lower.insert(k, nu_km1);
                profile.delta_upper_nu.insert(k, km1.sqrt() * nu_km1);
                profile.delta_upper_m.insert(k, km1 * m);
                profile
                    .gershgorin_radius_max
                    .insert(k, ric_gershgorin_upper(dict, k)?);
            }
        }
        Ok(profile)
    }
}
