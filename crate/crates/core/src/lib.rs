//! Greedy sparse recovery with certified guarantees.
//!
//! * [`dictionary`]: unit-norm dictionaries, sparse vectors, least squares.
//! * [`coherence`]: mutual coherence, global 2-coherence, exact restricted
//!   isometry constants and the bounds relating them.
//! * [`pursuit`]: weak orthogonal matching pursuit (OMP at `rho = 1`).
//! * [`guarantees`]: recovery conditions evaluated on concrete instances.
//! * [`harness`]: seeded instance generation, sweeps and reports.

pub mod coherence;
pub mod dictionary;
pub mod error;
pub mod guarantees;
pub mod harness;
pub mod io;
pub mod pursuit;

pub use coherence::{
    global_2_coherence, lemma1_chain, mutual_coherence, ric_bounds, ric_exact,
    ric_gershgorin_upper, Budget, ChainReport, CoherenceProfile, DeltaEstimate,
};
pub use dictionary::{normalize_columns, Dictionary, Observation, SparseVector};
pub use error::{Error, Result};
pub use guarantees::{
    compare_with_prior_bound, corollary1_check, corollary2_check, error_bound_check, lemma2_bounds,
    theorem1_check, GuaranteeReport, Lemma2Bounds,
};
pub use pursuit::{omp, womp, PursuitConfig, RecoveryResult, SelectionPolicy, StopReason};
