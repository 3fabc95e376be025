//! Numerical test for the regular/chaotic dichotomy of attractors.
//!
//! For each parameter of a dynamical system, the growth exponent `K` of the
//! finite-data power spectrum is estimated at many random frequencies. Regular
//! attractors give `K` near 0 and strongly chaotic ones give `K` near 1 at
//! almost every frequency; sweep statistics count the parameters and
//! frequencies that fall in neither class.
//!
//! - [`dynamics`]: logistic map and Lorenz-96 trajectories.
//! - [`spectral`]: weighted sums, structure function, modified MSD, `K`.
//! - [`classify`]: interval schemes, class counts, sweep statistics.
//! - [`sweep`]: parallel, checkpointed sweeps and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classify;
pub mod dynamics;
pub mod error;
pub mod spectral;
pub mod sweep;

pub use classify::{
    classify_k, median_k, sweep_summary, tally, ClassCounts, IntervalScheme, Label, OpenInterval,
    SweepSummary,
};
pub use dynamics::{
    generate, initial_state, logistic_orbit, lorenz96_orbit, lorenz96_rhs, rk4_step, Lorenz96Run,
    StateVector, SystemKind, SystemSpec, TimeSeries,
};
pub use error::{Error, Result};
pub use spectral::{
    estimate_k, k_for_omega, mean_observable, modified_msd, spectral_profile,
    structure_function_direct, structure_function_fast, weighted_sums, KEstimate, SpectralProfile,
    WeightedSums,
};
pub use sweep::{
    default_config, delta_probe, run_sweep, run_sweep_with, sample_omegas, SweepConfig,
    SweepOptions, SweepOutcome, SweepResults,
};
