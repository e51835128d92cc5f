use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use greedy_cs::coherence::{
    global_2_coherence, global_2_coherence_brute, global_2_coherence_gram_form, lemma1_chain,
    mutual_coherence, ric_bounds, ric_estimate, ric_exact_with_witness, Budget, DeltaEstimate,
};
use greedy_cs::guarantees::{
    compare_with_prior_bound, corollary1_check, corollary2_check, lemma2_bounds, theorem1_check,
    theorem1_condition,
};
use greedy_cs::harness::separation::persist;
use greedy_cs::harness::{
    find_separation_instance, generate_dictionary, generate_noise, plot_data, run_sweep, write_csv,
    EnsembleSpec, SweepConfig, SweepOverrides, SweepSummary,
};
use greedy_cs::io::{read_dictionary, read_vector, write_matrix};
use greedy_cs::pursuit::{check_invariants, womp, PursuitConfig};
use greedy_cs::{Dictionary, Error, Observation, SparseVector};
use serde::Serialize;
use serde_json::json;

use crate::{Check, Cli, Command, Kind, MatrixArgs};

pub const SEED_ENV: &str = "GREEDY_CS_SEED";

/// A failed command: process exit code plus a one-line message.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }

    fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    fn invariant(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::RankDeficient { .. } | Error::EigenFailure | Error::DegenerateDelta { .. } => 2,
            Error::HypothesisViolated { .. } => 3,
            _ => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

/// Flag, then environment, then `fallback`.
fn resolve_seed(flag: Option<u64>, fallback: u64) -> Result<u64, Failure> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            Failure::usage(format!(
                "{SEED_ENV}={v:?} is not an unsigned 64-bit integer"
            ))
        }),
        Err(_) => Ok(fallback),
    }
}

fn print_json<T: Serialize + ?Sized>(value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
            Err(Failure::usage(format!("stdout: {e}")))
        }
        _ => Ok(()),
    }
}

fn load(args: &MatrixArgs) -> Result<(Dictionary, Budget), Failure> {
    let dict = read_dictionary(&args.matrix, args.renormalize)?;
    let mut budget = Budget::default();
    if let Some(b) = args.ric_budget {
        budget.ric_subsets = u128::from(b);
    }
    Ok((dict, budget))
}

fn write_file(path: &Path, contents: &str) -> Outcome {
    std::fs::write(path, contents).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

pub fn run(cli: &Cli) -> Outcome {
    let progress = |msg: &str| {
        if !cli.quiet {
            eprintln!("{msg}");
        }
    };
    match &cli.command {
        Command::Gen(args) => {
            let seed = resolve_seed(args.seed, 0)?;
            let spec = match args.kind {
                Kind::Gaussian => EnsembleSpec::gaussian(args.n, args.d, seed),
                Kind::PerturbedIdentity => {
                    EnsembleSpec::perturbed_identity(args.n, args.d, args.scale, seed)
                }
            };
            let dict = generate_dictionary(&spec)?;
            write_file(&args.out, &write_matrix(dict.matrix()))?;
            progress(&format!(
                "wrote {}x{} dictionary to {}",
                args.n,
                args.d,
                args.out.display()
            ));
            Ok(())
        }
        Command::Coherence(args) => {
            let (dict, budget) = load(&args.matrix)?;
            let nu_k = global_2_coherence(&dict, args.k)?;
            let m = mutual_coherence(&dict);
            if args.brute {
                let brute = global_2_coherence_brute(&dict, args.k, &budget)?;
                let gram = global_2_coherence_gram_form(&dict, args.k, &budget)?;
                let agree = (nu_k - brute).abs() <= 1e-12 && (nu_k - gram).abs() <= 1e-12;
                print_json(&json!({
                    "k": args.k,
                    "M": m,
                    "nu_k": brute,
                    "nu_k_fast": nu_k,
                    "nu_k_gram_form": gram,
                    "agree": agree,
                }))?;
                if !agree {
                    return Err(Failure::invariant(
                        "fast and enumerated nu_k disagree beyond 1e-12",
                    ));
                }
                Ok(())
            } else {
                print_json(&json!({ "k": args.k, "M": m, "nu_k": nu_k }))
            }
        }
        Command::Ric(args) => {
            let (dict, budget) = load(&args.matrix)?;
            if args.exact {
                let v = ric_exact_with_witness(&dict, args.k, &budget)?;
                let witness: Vec<usize> = v.witness.iter().map(|i| i + 1).collect();
                print_json(
                    &json!({ "k": args.k, "mode": "exact", "delta_k": v.delta, "witness": witness }),
                )
            } else if args.bounds {
                let b = ric_bounds(&dict, args.k)?;
                print_json(&json!({ "k": args.k, "mode": "bounds", "delta_k": [b.lower, b.upper] }))
            } else {
                match ric_estimate(&dict, args.k, &budget)? {
                    DeltaEstimate::Exact { value } => {
                        print_json(&json!({ "k": args.k, "mode": "exact", "delta_k": value }))
                    }
                    DeltaEstimate::Bounded { lower, upper } => {
                        progress("subset enumeration exceeds the budget; reporting bounds");
                        print_json(
                            &json!({ "k": args.k, "mode": "bounds", "delta_k": [lower, upper] }),
                        )
                    }
                }
            }
        }
        Command::Verify(args) => verify(args),
        Command::Recover(args) => {
            let (dict, _) = load(&args.matrix)?;
            let f = read_vector(&args.signal_obs)?;
            let obs = Observation::new(f, args.eps)?;
            let mut config =
                PursuitConfig::new(args.rho, args.eps)?.with_policy(args.policy.into());
            if let Some(m) = args.max_iter {
                config = config.with_max_iterations(m);
            }
            let result = womp(&dict, &obs, &config)?;
            print_json(&result.to_json())?;
            let inv = check_invariants(&dict, obs.f(), &result)?;
            if !inv.holds() {
                return Err(Failure::invariant(format!(
                    "pursuit invariant violated: {inv:?}"
                )));
            }
            Ok(())
        }
        Command::Sweep(args) => {
            let mut config = SweepConfig::from_file(&args.config)?;
            let seed = resolve_seed(args.seed, config.seed)?;
            config.apply(&SweepOverrides {
                trials: args.trials,
                seed: Some(seed),
            });
            progress(&format!(
                "sweep: {} trials x {} k x {} rho x {} eps x {} policies, seed {}",
                config.trials,
                config.ks.len(),
                config.rhos.len(),
                config.epsilons.len(),
                config.policies.len(),
                config.seed
            ));
            let records = run_sweep(&config)?;
            let out = File::create(&args.out_csv)
                .map_err(|e| Failure::usage(format!("{}: {e}", args.out_csv.display())))?;
            write_csv(&records, BufWriter::new(out))?;
            progress(&format!(
                "wrote {} rows to {}",
                records.len(),
                args.out_csv.display()
            ));
            let summary = SweepSummary::from_records(&records);
            if let Some(path) = &args.out_summary {
                let text = serde_json::to_string_pretty(&summary)
                    .map_err(|e| Failure::usage(e.to_string()))?;
                write_file(path, &(text + "\n"))?;
            }
            if let Some(path) = &args.out_plot {
                write_file(path, &plot_data(&records, config.plot_axis)?)?;
            }
            progress(&format!(
                "success {}/{}; {} errors, {} invariant violations, {} soundness violations",
                summary.overall.successes,
                summary.overall.count,
                summary.errors,
                summary.invariant_violations,
                summary.soundness_violations
            ));
            if summary.violations() > 0 {
                return Err(Failure::invariant(format!(
                    "{} violating records",
                    summary.violations()
                )));
            }
            Ok(())
        }
        Command::SearchSeparation(args) => {
            let seed = resolve_seed(args.seed, 2024)?;
            let found =
                find_separation_instance(args.k, seed, args.max_attempts, &Budget::default())?;
            let Some(inst) = found else {
                return Err(Failure::numerical(format!(
                    "no separating dictionary in {} attempts",
                    args.max_attempts
                )));
            };
            persist(&inst, &args.out)?;
            progress(&format!(
                "attempt {}: wrote {}",
                inst.attempt,
                args.out.display()
            ));
            print_json(&inst.comparison)
        }
    }
}

fn read_signal(path: &Path, dict: &Dictionary) -> Result<SparseVector, Failure> {
    let dense = read_vector(path)?;
    if dense.len() != dict.d() {
        return Err(Error::DimensionMismatch {
            expected: dict.d(),
            got: dense.len(),
        }
        .into());
    }
    Ok(SparseVector::from_dense(dense.as_slice())?)
}

fn verify(args: &crate::VerifyArgs) -> Outcome {
    let (dict, budget) = load(&args.matrix)?;
    let signal = args
        .signal
        .as_deref()
        .map(|p| read_signal(p, &dict))
        .transpose()?;
    let k = match (&signal, args.k) {
        (Some(a), Some(k)) if a.sparsity() != k => {
            return Err(Failure::usage(format!(
                "--k {k} disagrees with the signal's sparsity {}",
                a.sparsity()
            )));
        }
        (Some(a), _) => a.sparsity(),
        (None, Some(k)) => k,
        (None, None) => return Err(Failure::usage("--k or --signal is required")),
    };
    match args.check {
        Check::Lemma1 => {
            let chain = lemma1_chain(&dict, k, &budget)?;
            print_json(&chain)?;
            if !chain.holds {
                return Err(Failure::invariant("coherence chain violated"));
            }
            Ok(())
        }
        Check::Lemma2 => {
            let a = signal.ok_or_else(|| Failure::usage("lemma2 needs --signal"))?;
            let w = match &args.noise {
                Some(p) => read_vector(p)?,
                None => generate_noise(dict.n(), args.eps, resolve_seed(args.seed, 0)?),
            };
            let bounds = lemma2_bounds(&dict, &a, &w, None, &budget)?;
            print_json(&json!({
                "k": bounds.k,
                "m": bounds.m,
                "epsilon": bounds.epsilon,
                "nu_k": bounds.nu_k,
                "delta_k": bounds.delta_k,
                "off_support_max": bounds.off_support_max,
                "on_support_max": bounds.on_support_max,
                "upper": bounds.upper,
                "lower": bounds.lower,
                "upper_holds": bounds.upper_holds(),
                "lower_holds": bounds.lower_holds(),
            }))?;
            if !bounds.holds() {
                return Err(Failure::invariant("correlation bound violated"));
            }
            Ok(())
        }
        Check::Theorem1 => match &signal {
            Some(a) => print_json(&theorem1_check(&dict, a, args.rho, args.eps, &budget)?),
            None => print_json(&theorem1_condition(&dict, k, args.rho, &budget)?),
        },
        Check::Corollary1 => print_json(&corollary1_check(&dict, k, args.rho, &budget)?),
        Check::Corollary2 => print_json(&corollary2_check(&dict, k, &budget)?),
        Check::Compare => {
            let cmp = compare_with_prior_bound(&dict, k, &budget)?;
            print_json(&cmp)?;
            if cmp.prior && !cmp.new {
                return Err(Failure::invariant(
                    "older bound holds but the RIC condition fails",
                ));
            }
            Ok(())
        }
    }
}
