//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
//!
//! Runs as a plain binary (`harness = false`) so the criterion lines are
//! always visible under `cargo test`.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use greedy_cs::coherence::{
    global_2_coherence, global_2_coherence_brute, global_2_coherence_gram_form,
    global_2_coherence_profile, lemma1_chain, ric_exact, Budget, CoherenceProfile, CHAIN_SLACK,
};
use greedy_cs::guarantees::{
    compare_with_prior_bound, error_bound_with_delta, lemma2_bounds, lemma2_bounds_with_metrics,
    theorem1_check, theorem1_condition,
};
use greedy_cs::harness::rng::mix;
use greedy_cs::harness::separation::persist;
use greedy_cs::harness::{
    find_separation_instance, generate_dictionary, generate_noise, generate_sparse_signal,
    run_sweep, write_csv, EnsembleSpec, SweepConfig, ValueModel,
};
use greedy_cs::io::read_dictionary;
use greedy_cs::pursuit::{
    check_invariants, decompose_residual, omp, womp, PursuitConfig, RecoveryResult, SelectionPolicy,
};
use greedy_cs::Dictionary;
use nalgebra::DVector;
use rand::Rng;
use rayon::prelude::*;

/// Pursuit-invariant tallies shared by every criterion that runs WOMP.
#[derive(Default)]
struct InvariantTally {
    runs: AtomicUsize,
    iterations: AtomicUsize,
    violations: AtomicUsize,
}

impl InvariantTally {
    fn record(&self, dict: &Dictionary, f: &DVector<f64>, result: &RecoveryResult) {
        self.runs.fetch_add(1, Ordering::Relaxed);
        self.iterations
            .fetch_add(result.iterations, Ordering::Relaxed);
        let ok = check_invariants(dict, f, result)
            .map(|i| i.holds())
            .unwrap_or(false);
        if !ok {
            self.violations.fetch_add(1, Ordering::Relaxed);
        }
    }
}

struct Outcome {
    id: &'static str,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn report(o: &Outcome) {
    let status = if o.passed { "PASS" } else { "FAIL" };
    println!("[{status}] {:<4} {} :: {}", o.id, o.title, o.detail);
}

fn uniform(rng: &mut impl Rng, lo: usize, hi: usize) -> usize {
    rng.random_range(lo..=hi)
}

// 1. M <= nu_{k-1} <= delta_k <= sqrt(k-1) nu_{k-1} <= (k-1) M on 500 Gaussian dictionaries.
fn lemma1_chain_criterion(budget: &Budget) -> Outcome {
    let start = Instant::now();
    let results: Vec<(bool, f64)> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = greedy_cs::harness::rng::rng(mix(0xA1, i));
            let n = uniform(&mut rng, 6, 12);
            let d = uniform(&mut rng, 8, 18);
            let k = uniform(&mut rng, 2, 5);
            let dict = generate_dictionary(&EnsembleSpec::gaussian(n, d, mix(0xA1A1, i))).unwrap();
            let chain = lemma1_chain(&dict, k, budget).unwrap();
            let worst = chain
                .terms()
                .windows(2)
                .map(|w| w[0] - w[1])
                .fold(f64::NEG_INFINITY, f64::max);
            (chain.holds, worst)
        })
        .collect();
    let elapsed = start.elapsed().as_secs_f64();
    let violations = results.iter().filter(|r| !r.0).count();
    let worst = results
        .iter()
        .map(|r| r.1)
        .fold(f64::NEG_INFINITY, f64::max);
    Outcome {
        id: "AC1",
        title: "coherence/RIC chain",
        passed: violations == 0 && elapsed < 180.0,
        detail: format!(
            "500 dictionaries, {violations} violations (slack {CHAIN_SLACK:e}), worst adjacent gap {worst:.3e}, {elapsed:.1}s (< 180s)"
        ),
    }
}

// 2. Fast nu_k against both enumeration oracles on 200 instances.
fn oracle_equivalence_criterion(budget: &Budget) -> Outcome {
    let diffs: Vec<f64> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = greedy_cs::harness::rng::rng(mix(0xA2, i));
            let n = uniform(&mut rng, 3, 10);
            let d = uniform(&mut rng, 4, 12);
            let k = uniform(&mut rng, 1, (d - 1).min(4));
            let spec = if i % 2 == 0 {
                EnsembleSpec::gaussian(n, d, mix(0xA2A2, i))
            } else {
                EnsembleSpec::perturbed_identity(n, d, 0.2, mix(0xA2A2, i))
            };
            let dict = generate_dictionary(&spec).unwrap();
            let fast = global_2_coherence(&dict, k).unwrap();
            let brute = global_2_coherence_brute(&dict, k, budget).unwrap();
            let gram = global_2_coherence_gram_form(&dict, k, budget).unwrap();
            (fast - brute).abs().max((fast - gram).abs())
        })
        .collect();
    let worst = diffs.iter().copied().fold(0.0, f64::max);
    let failures = diffs.iter().filter(|d| **d > 1e-12).count();
    Outcome {
        id: "AC2",
        title: "nu_k oracle equivalence",
        passed: failures == 0,
        detail: format!(
            "200 instances, max |fast - oracle| = {worst:.3e} (tol 1e-12), {failures} failures"
        ),
    }
}

struct Theorem1Stats {
    instances: usize,
    candidates: usize,
    failures: usize,
    worst_error_excess: f64,
    sigma_sqrt_failures: usize,
}

// 3. Guaranteed recovery and error bound under every selection policy.
fn theorem1_criterion(budget: &Budget, tally: &InvariantTally) -> Outcome {
    const TARGET: usize = 1000;
    let rhos = [0.3, 0.5, 0.7, 0.9, 1.0];
    let mut stats = Theorem1Stats {
        instances: 0,
        candidates: 0,
        failures: 0,
        worst_error_excess: f64::NEG_INFINITY,
        sigma_sqrt_failures: 0,
    };
    let mut batch = 0u64;
    while stats.instances < TARGET && stats.candidates < 50_000 {
        let results: Vec<Option<(bool, f64, bool)>> = (batch * 500..(batch + 1) * 500)
            .into_par_iter()
            .map(|i| {
                let mut rng = greedy_cs::harness::rng::rng(mix(0xA3, i));
                let n = uniform(&mut rng, 6, 12);
                let k = uniform(&mut rng, 1, 3);
                let scale = rng.random_range(0.01..0.08);
                let rho = rhos[rng.random_range(0..rhos.len())];
                let dict = generate_dictionary(&EnsembleSpec::perturbed_identity(
                    n,
                    n,
                    scale,
                    mix(0xA3A3, i),
                ))
                .unwrap();
                if !theorem1_condition(&dict, k, rho, budget)
                    .unwrap()
                    .satisfied_exactly()
                {
                    return None;
                }
                let model = if i % 2 == 0 {
                    ValueModel::MinMagnitude(rng.random_range(0.2..2.0))
                } else {
                    ValueModel::UnitSigns
                };
                let a = generate_sparse_signal(n, k, mix(0xA3B3, i), model).unwrap();
                let probe = theorem1_check(&dict, &a, rho, 0.0, budget).unwrap();
                let threshold = probe.inequalities[1].rhs;
                let epsilon = if i % 5 == 0 {
                    0.0
                } else {
                    threshold * rng.random_range(0.0..0.999)
                };
                let report = theorem1_check(&dict, &a, rho, epsilon, budget).unwrap();
                if !report.satisfied_exactly() {
                    return None;
                }
                let sigma_ok = report.sigma_min.unwrap().meets_sqrt_bound;
                let delta = report.metrics["delta_k"].value;
                let w = generate_noise(n, epsilon * rng.random_range(0.5..1.0), mix(0xA3C3, i));
                let f = dict.synthesize(&a, Some(&w)).unwrap();
                let mut ok = true;
                let mut excess = f64::NEG_INFINITY;
                for policy in SelectionPolicy::ALL {
                    let config = PursuitConfig::new(rho, epsilon)
                        .unwrap()
                        .with_policy(policy);
                    let result = womp(&dict, &f, &config).unwrap();
                    tally.record(&dict, f.f(), &result);
                    let recovered = result.support() == a.support() && result.iterations == k;
                    ok &= recovered;
                    if recovered {
                        let eb = error_bound_with_delta(&a, &result, epsilon, delta).unwrap();
                        excess = excess.max(eb.lhs - eb.rhs);
                        ok &= eb.lhs <= eb.rhs + 1e-12;
                    }
                }
                Some((ok, excess, sigma_ok))
            })
            .collect();
        stats.candidates += results.len();
        for (ok, excess, sigma_ok) in results.into_iter().flatten() {
            if stats.instances == TARGET {
                break;
            }
            stats.instances += 1;
            stats.failures += usize::from(!ok);
            stats.worst_error_excess = stats.worst_error_excess.max(excess);
            stats.sigma_sqrt_failures += usize::from(!sigma_ok);
        }
        batch += 1;
    }
    Outcome {
        id: "AC3",
        title: "WOMP recovery guarantee (all policies)",
        passed: stats.instances >= TARGET && stats.failures == 0,
        detail: format!(
            "{} guaranteed instances from {} candidates x 3 policies, {} failures, max(lhs - rhs) of error bound {:.3e}, sigma_min >= sqrt(1-delta) misses {}",
            stats.instances, stats.candidates, stats.failures, stats.worst_error_excess, stats.sigma_sqrt_failures
        ),
    }
}

/// `(k, failures)` for every sparsity level at which a dictionary qualified.
type TestedOrders = Vec<(usize, usize)>;

fn cor2_candidates() -> Vec<EnsembleSpec> {
    let mut specs = Vec::new();
    for i in 0..400u64 {
        let mut rng = greedy_cs::harness::rng::rng(mix(0xA4, i));
        let n = uniform(&mut rng, 5, 10);
        let spec = match i % 4 {
            0 => EnsembleSpec::gaussian(n + 10, n + 12, mix(0xA4A4, i)),
            1 => EnsembleSpec::perturbed_identity(n, n + 1, 0.1, mix(0xA4A4, i)),
            _ => {
                EnsembleSpec::perturbed_identity(n, n, rng.random_range(0.05..0.35), mix(0xA4A4, i))
            }
        };
        specs.push(spec);
    }
    specs
}

// 4. delta_k + sqrt(k) delta_{k+1} < 1 implies noiseless OMP recovery.
fn corollary2_criterion(budget: &Budget, tally: &InvariantTally) -> (Outcome, Vec<(bool, bool)>) {
    let specs = cor2_candidates();
    let per_dict: Vec<(TestedOrders, Vec<(bool, bool)>)> = specs
        .par_iter()
        .enumerate()
        .map(|(i, spec)| {
            let dict = generate_dictionary(spec).unwrap();
            let mut comparisons = Vec::new();
            let mut tested = Vec::new();
            for k in 1..=3usize {
                if k + 1 > dict.d() || k + 1 > dict.n() {
                    continue;
                }
                let Ok(cmp) = compare_with_prior_bound(&dict, k, budget) else {
                    continue;
                };
                comparisons.push((cmp.prior, cmp.new));
                if !cmp.new {
                    continue;
                }
                let mut failures = 0;
                for j in 0..20u64 {
                    let model = if j % 2 == 0 {
                        ValueModel::UnitSigns
                    } else {
                        ValueModel::GaussianMagnitudes
                    };
                    let seed = mix(mix(0xA4B4, i as u64), 100 * k as u64 + j);
                    let a = generate_sparse_signal(dict.d(), k, seed, model).unwrap();
                    let f = dict.synthesize(&a, None).unwrap();
                    let result = omp(&dict, &f, 0.0, None).unwrap();
                    tally.record(&dict, f.f(), &result);
                    let exact = result.support() == a.support()
                        && result.iterations == k
                        && (&result.estimate - a.to_dense()).norm() <= 1e-9 * a.norm();
                    failures += usize::from(!exact);
                }
                tested.push((k, failures));
            }
            (tested, comparisons)
        })
        .collect();
    let dictionaries = per_dict.iter().filter(|p| !p.0.is_empty()).count();
    let failures: usize = per_dict.iter().flat_map(|p| p.0.iter().map(|t| t.1)).sum();
    let by_k = |k| {
        per_dict
            .iter()
            .filter(|p| p.0.iter().any(|t| t.0 == k))
            .count()
    };
    let comparisons = per_dict.iter().flat_map(|p| p.1.iter().copied()).collect();
    (
        Outcome {
            id: "AC4",
            title: "OMP recovery under the RIC condition",
            passed: dictionaries > 0 && by_k(2) > 0 && failures == 0,
            detail: format!(
                "{dictionaries} qualifying dictionaries (k=1: {}, k=2: {}, k=3: {}), 20 signals per qualifying k, {failures} failures",
                by_k(1),
                by_k(2),
                by_k(3)
            ),
        },
        comparisons,
    )
}

// 5. prior => new everywhere; a separation instance exists and is persisted.
fn improved_bound_criterion(budget: &Budget, comparisons: &[(bool, bool)]) -> Outcome {
    let counterexamples = comparisons
        .iter()
        .filter(|(prior, new)| *prior && !*new)
        .count();
    let prior_true = comparisons.iter().filter(|(prior, _)| *prior).count();
    let separations = comparisons
        .iter()
        .filter(|(prior, new)| !*prior && *new)
        .count();

    let found = find_separation_instance(2, 2024, 5_000, budget).unwrap();
    let fixture = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/separation_k2.csv");
    let (persisted_ok, found_detail) = match &found {
        Some(inst) => {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("separation.csv");
            persist(inst, &path).unwrap();
            let reloaded = read_dictionary(&path, false).unwrap();
            let fresh = compare_with_prior_bound(&reloaded, 2, budget).unwrap();
            let matches_fixture = std::fs::read(&path).ok() == std::fs::read(&fixture).ok();
            (
                fresh.separation && reloaded == inst.dictionary && matches_fixture,
                format!(
                    "search hit at attempt {} (delta_2 = {:.4}, delta_3 = {:.4}), fixture reproduced: {matches_fixture}",
                    inst.attempt, inst.comparison.delta_k, inst.comparison.delta_kp1
                ),
            )
        }
        None => (false, "search found nothing".into()),
    };
    let fixture_ok = read_dictionary(&fixture, false)
        .and_then(|d| compare_with_prior_bound(&d, 2, budget))
        .map(|c| c.separation)
        .unwrap_or(false);
    Outcome {
        id: "AC5",
        title: "improved RIC bound",
        passed: counterexamples == 0 && prior_true > 0 && persisted_ok && fixture_ok,
        detail: format!(
            "{} instances, prior true on {prior_true}, prior-without-new {counterexamples}, separations in sweep {separations}; {found_detail}",
            comparisons.len()
        ),
    }
}

// 6. Correlation bounds on random instances and on WOMP iterates.
fn lemma2_criterion(budget: &Budget, tally: &InvariantTally) -> Outcome {
    let standalone: Vec<bool> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = greedy_cs::harness::rng::rng(mix(0xA6, i));
            let n = uniform(&mut rng, 6, 12);
            let d = uniform(&mut rng, 8, 16);
            let k = uniform(&mut rng, 1, 4);
            let spec = if i % 2 == 0 {
                EnsembleSpec::gaussian(n, d, mix(0xA6A6, i))
            } else {
                EnsembleSpec::perturbed_identity(n, d, 0.1, mix(0xA6A6, i))
            };
            let dict = generate_dictionary(&spec).unwrap();
            let a = generate_sparse_signal(d, k, mix(0xA6B6, i), ValueModel::GaussianMagnitudes)
                .unwrap();
            let w = generate_noise(n, rng.random_range(0.0..0.5), mix(0xA6C6, i));
            lemma2_bounds(&dict, &a, &w, None, budget).unwrap().holds()
        })
        .collect();
    let standalone_failures = standalone.iter().filter(|ok| !**ok).count();

    // iterates of guaranteed WOMP runs: Lambda_s stays inside Lambda
    let runs: Vec<(usize, usize, f64)> = (0..100u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = greedy_cs::harness::rng::rng(mix(0xA66, i));
            let mut attempt = 0u64;
            loop {
                let n = uniform(&mut rng, 8, 12);
                let k = uniform(&mut rng, 2, 4);
                let rho = rng.random_range(0.5..1.0);
                let seed = mix(mix(0xA66A, i), attempt);
                attempt += 1;
                let dict = generate_dictionary(&EnsembleSpec::perturbed_identity(n, n, 0.02, seed))
                    .unwrap();
                let a = generate_sparse_signal(n, k, mix(seed, 1), ValueModel::MinMagnitude(1.0))
                    .unwrap();
                let probe = theorem1_check(&dict, &a, rho, 0.0, budget).unwrap();
                if !probe.satisfied_exactly() {
                    continue;
                }
                let epsilon = 0.5 * probe.inequalities[1].rhs;
                let w = generate_noise(n, 0.9 * epsilon, mix(seed, 2));
                let f = dict.synthesize(&a, Some(&w)).unwrap();
                let policy = SelectionPolicy::ALL[(i % 3) as usize];
                let config = PursuitConfig::new(rho, epsilon)
                    .unwrap()
                    .with_policy(policy);
                let result = womp(&dict, &f, &config).unwrap();
                tally.record(&dict, f.f(), &result);
                let nu_k = global_2_coherence(&dict, k).unwrap();
                let delta_k = ric_exact(&dict, k, budget).unwrap();
                let f_norm = f.f().norm();
                let (mut checked, mut failures, mut worst) = (0, 0, 0.0f64);
                for it in &result.iterates {
                    if !it.support.iter().all(|s| a.support().contains(s)) || it.support.len() >= k
                    {
                        continue;
                    }
                    let dec = decompose_residual(&dict, &it.support, &a, &w).unwrap();
                    let rebuilt = dict.matrix() * &dec.signal_part + &dec.noise_part;
                    let gap = (rebuilt - &it.residual).norm() / f_norm;
                    worst = worst.max(gap);
                    let omega: Vec<usize> = a
                        .support()
                        .iter()
                        .copied()
                        .filter(|s| !it.support.contains(s))
                        .collect();
                    let m = omega.len();
                    let tail_ok =
                        dec.signal_part.norm() >= (m as f64).sqrt() * a.a_min().unwrap() - 1e-12;
                    let bounds = lemma2_bounds_with_metrics(
                        &dict,
                        a.support(),
                        &dec.signal_part,
                        &dec.noise_part,
                        &omega,
                        nu_k,
                        delta_k,
                    );
                    let ok = gap <= 1e-10
                        && tail_ok
                        && bounds
                            .map(|b| b.holds() && b.m == k - it.support.len())
                            .unwrap_or(false);
                    checked += 1;
                    failures += usize::from(!ok);
                }
                break (checked, failures, worst);
            }
        })
        .collect();
    let iterates: usize = runs.iter().map(|r| r.0).sum();
    let iterate_failures: usize = runs.iter().map(|r| r.1).sum();
    let worst_gap = runs.iter().map(|r| r.2).fold(0.0, f64::max);
    Outcome {
        id: "AC6",
        title: "correlation bounds",
        passed: standalone_failures == 0 && iterate_failures == 0 && iterates >= 100,
        detail: format!(
            "500 standalone instances ({standalone_failures} failures); 100 WOMP runs, {iterates} iterates ({iterate_failures} failures), max ||r_s - (Phi a_s + w_s)|| / ||f|| = {worst_gap:.3e}"
        ),
    }
}

// 7. Residual orthogonality, no repeats, monotone residual in every run above.
fn pursuit_invariant_criterion(tally: &InvariantTally) -> Outcome {
    let runs = tally.runs.load(Ordering::Relaxed);
    let violations = tally.violations.load(Ordering::Relaxed);
    Outcome {
        id: "AC7",
        title: "pursuit invariants",
        passed: runs > 0 && violations == 0,
        detail: format!(
            "{runs} runs / {} iterations, {violations} violating runs",
            tally.iterations.load(Ordering::Relaxed)
        ),
    }
}

// 8. nu_k nondecreasing, nu_k / sqrt(k) nonincreasing, delta_k nondecreasing.
fn monotonicity_criterion(budget: &Budget) -> Outcome {
    let results: Vec<(usize, usize)> = (0..200u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = greedy_cs::harness::rng::rng(mix(0xA8, i));
            let n = uniform(&mut rng, 4, 12);
            let d = uniform(&mut rng, 6, 16);
            let dict = generate_dictionary(&EnsembleSpec::gaussian(n, d, mix(0xA8A8, i))).unwrap();
            let nu = global_2_coherence_profile(&dict, d - 1).unwrap();
            let mut bad = 0;
            for k in 1..d - 1 {
                let (a, b) = (nu[k - 1], nu[k]);
                bad += usize::from(a > b);
                bad += usize::from(b / ((k + 1) as f64).sqrt() > a / (k as f64).sqrt() + 1e-12);
            }
            let profile = CoherenceProfile::compute(&dict, 6.min(d), budget).unwrap();
            let deltas: Vec<f64> = profile.delta_exact.values().copied().collect();
            bad += deltas.windows(2).filter(|w| w[1] < w[0] - 1e-12).count();
            (bad, deltas.len())
        })
        .collect();
    let violations: usize = results.iter().map(|r| r.0).sum();
    let deltas: usize = results.iter().map(|r| r.1).sum();
    Outcome {
        id: "AC8",
        title: "monotonicity in k",
        passed: violations == 0,
        detail: format!("200 dictionaries, {deltas} exact delta_k values, {violations} violations"),
    }
}

/// FNV-1a over the little-endian bit patterns of a matrix.
fn fingerprint(dict: &Dictionary) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in dict.matrix().iter() {
        for b in v.to_bits().to_le_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

// 9. Byte-identical sweep output; platform-independent generation.
fn determinism_criterion() -> Outcome {
    let text = "trials = 40\nkind = \"perturbed-identity\"\nn = 8\nd = 8\nscale = 0.05\nk = [1, 2, 3]\nrho = [0.5, 1.0]\nepsilon = [0.0, 0.02]\npolicies = [\"max\", \"first\", \"min\"]\nseed = 20240101\n";
    let config = SweepConfig::parse(text, Path::new(".")).unwrap();
    let render = || {
        let mut buf = Vec::new();
        write_csv(&run_sweep(&config).unwrap(), &mut buf).unwrap();
        buf
    };
    let (first, second) = (render(), render());
    let dict = generate_dictionary(&EnsembleSpec::gaussian(6, 10, 42)).unwrap();
    let golden = fingerprint(&dict) == 0x49e3_ae67_c268_1730
        && dict.matrix()[(0, 0)].to_bits() == 0x3fd0_8e49_cfdd_36f5;
    Outcome {
        id: "AC9",
        title: "determinism",
        passed: first == second && golden,
        detail: format!(
            "sweep CSV {} bytes, identical: {}; gaussian(6x10, seed 42) matches frozen fingerprint: {golden}",
            first.len(),
            first == second
        ),
    }
}

fn main() {
    // `cargo test -- --list` and filters are accepted but ignored
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let budget = Budget::default();
    let tally = InvariantTally::default();
    let start = Instant::now();

    let mut outcomes = Vec::new();
    let mut run = |o: Outcome| {
        report(&o);
        outcomes.push(o);
    };
    run(lemma1_chain_criterion(&budget));
    run(oracle_equivalence_criterion(&budget));
    run(theorem1_criterion(&budget, &tally));
    let (ac4, comparisons) = corollary2_criterion(&budget, &tally);
    run(ac4);
    run(improved_bound_criterion(&budget, &comparisons));
    run(lemma2_criterion(&budget, &tally));
    run(pursuit_invariant_criterion(&tally));
    run(monotonicity_criterion(&budget));
    run(determinism_criterion());

    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.id)
        .collect();
    println!(
        "acceptance: {} passed, {} failed in {:.1}s",
        outcomes.len() - failed.len(),
        failed.len(),
        start.elapsed().as_secs_f64()
    );
    if !failed.is_empty() {
        println!("failed: {}", failed.join(", "));
        std::process::exit(1);
    }
}
