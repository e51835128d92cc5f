//! Instance generation, experiment sweeps and report emission.

pub mod ensemble;
pub mod report;
pub mod rng;
pub mod separation;
pub mod sweep;

pub use ensemble::{
    generate_dictionary, generate_noise, generate_sparse_signal, EnsembleKind, EnsembleSpec,
    ValueModel,
};
pub use report::{emit_report, plot_data, read_csv, write_csv, ReportFormat};
pub use separation::{find_separation_instance, SeparationInstance};
pub use sweep::{run_sweep, PlotAxis, SweepConfig, SweepOverrides, SweepSummary, TrialRecord};
