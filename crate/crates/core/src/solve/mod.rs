//! Exact solvers, penalty tuning and the simulated-annealing sampler.

mod anneal;
mod bisect;
mod enumerate;
mod exact;

pub use anneal::{
    default_atol, default_beta_range, simulated_anneal, success_probability, time_to_solution,
    AnnealMetadata, AnnealParams, Sample, SampleSet, T_ANNEAL_US,
};
pub use bisect::{
    bisect_penalty, bisect_penalty_capped, default_tolerance, minimizer_is_feasible, tune_penalties,
    tune_penalties_capped, PenaltyKind,
};
pub use enumerate::{exact_qubo_min, exact_qubo_min_capped, DEFAULT_ENUM_CAP};
pub use exact::{
    exact_assignment, exact_assignment_with, penalized_minimum, ExactOptions, ExactResult,
    PenalizedMinimum,
};
