//! Problem files, sweeps over `(tau, t)` grids and the check drivers behind
//! the command line.

mod checks;
mod config;
mod problem;
mod sweep;

pub use checks::{
    check_certificate, critpoint, fresnel_decay, ift_checks, morse_check, reference_chart, vdc_trial, vdc_trials,
    CertCheck, CritpointReport, FresnelRow, FresnelSummary, MorseCheck, VdcSummary, VdcTrial, DECOMPOSITION_TOL,
    MORSE_TOL, ROUNDTRIP_TOL,
};
pub use config::{Delta0, ProblemConfig, WeightConfig, DEFAULT_OUTER_NODES, DEFAULT_TOL};
pub use problem::{ClassifySummary, Problem};
pub use sweep::{parse_tau_spec, sweep, sweep_with_threads, t_axis, thread_pool, Cell, SweepReport, SweepSpec, SweepStats, THREADS_ENV};
