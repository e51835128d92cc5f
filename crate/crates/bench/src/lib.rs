//! Fixed instances shared by the criterion benches.

use greedy_cs::harness::{generate_dictionary, generate_sparse_signal, EnsembleSpec, ValueModel};
use greedy_cs::{Dictionary, Observation};

pub fn gaussian(n: usize, d: usize) -> Dictionary {
    generate_dictionary(&EnsembleSpec::gaussian(n, d, 0xBE7C)).expect("valid spec")
}

/// Noiseless observation of a unit-sign `k`-sparse signal.
pub fn observation(dict: &Dictionary, k: usize) -> Observation {
    let a = generate_sparse_signal(dict.d(), k, 0x5EED, ValueModel::UnitSigns).expect("k <= d");
    dict.synthesize(&a, None).expect("matching dimensions")
}
