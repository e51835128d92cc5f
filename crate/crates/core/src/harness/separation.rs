//! Search for dictionaries where `delta_k + sqrt(k) delta_{k+1} < 1` holds
//! while `delta_{k+1} < 1 / (1 + sqrt(k))` fails.

use std::path::Path;

use super::ensemble::{generate_dictionary, EnsembleSpec};
use super::rng::mix;
use crate::coherence::Budget;
use crate::dictionary::Dictionary;
use crate::error::Result;
use crate::guarantees::{compare_with_prior_bound, BoundComparison};
use crate::io::write_matrix;

#[derive(Debug, Clone, PartialEq)]
pub struct SeparationInstance {
    pub attempt: usize,
    pub spec: EnsembleSpec,
    pub dictionary: Dictionary,
    pub comparison: BoundComparison,
}

const SCALES: [f64; 6] = [0.1, 0.15, 0.2, 0.25, 0.3, 0.4];

/// Candidate `attempt` of the deterministic search: perturbed partial
/// orthonormal bases over a grid of sizes and scales, with every fourth
/// candidate a Gaussian dictionary.
pub fn candidate_spec(k: usize, seed: u64, attempt: usize) -> EnsembleSpec {
    let s = mix(seed, attempt as u64);
    let n = k + 2 + attempt % 4;
    let d = n + (attempt / 4) % 3;
    if attempt % 4 == 3 {
        EnsembleSpec::gaussian(n + 4, d + 4, s)
    } else {
        EnsembleSpec::perturbed_identity(n, d, SCALES[(attempt / 12) % SCALES.len()], s)
    }
}

/// First separating candidate within `max_attempts`, if any.
pub fn find_separation_instance(
    k: usize,
    seed: u64,
    max_attempts: usize,
    budget: &Budget,
) -> Result<Option<SeparationInstance>> {
    for attempt in 0..max_attempts {
        let spec = candidate_spec(k, seed, attempt);
        let dictionary = generate_dictionary(&spec)?;
        let comparison = compare_with_prior_bound(&dictionary, k, budget)?;
        if comparison.separation {
            return Ok(Some(SeparationInstance {
                attempt,
                spec,
                dictionary,
                comparison,
            }));
        }
    }
    Ok(None)
}

/// Writes the dictionary with a comment header recording how it was found.
pub fn persist(instance: &SeparationInstance, path: &Path) -> Result<()> {
    let c = &instance.comparison;
    let header = format!(
        "# separation instance k={} attempt={} seed={} n={} d={} scale={}\n# delta_k={} delta_k+1={}\n",
        c.k,
        instance.attempt,
        instance.spec.seed,
        instance.spec.n,
        instance.spec.d,
        instance.spec.perturbation_scale,
        c.delta_k,
        c.delta_kp1,
    );
    std::fs::write(path, header + &write_matrix(instance.dictionary.matrix()))?;
    Ok(())
}
