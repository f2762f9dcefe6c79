//! Parallel-trial simulated annealing with a dynamic offset.
//!
//! Every step evaluates the Metropolis test for all single-bit flips
//! against the current state and applies one accepted flip chosen
//! uniformly. When nothing is accepted an offset is subtracted from all
//! deltas on the next step, growing until some flip goes through.

mod config;
pub mod par;
pub mod rng;
mod solver;
mod state;

pub use config::{InitialState, SolverConfig};
pub use rng::{CounterRng, Draws};
pub use solver::{
    anneal, auto_tune, estimated_steps, parallel_trial_step, trace_csv, trial_acceptances,
    Schedule, SolveResult, NOMINAL_EVALS_PER_SEC, SWEEP_WORK,
};
pub use state::{init_state, SolverState};
