//! Flight gate assignment on (simulated) quantum annealers.
//!
//! The crate covers the whole research pipeline:
//!
//! * [`instance`]: the assignment problem, its objective and feasibility,
//!   a synthetic schedule generator and the extraction of small instances
//!   (long-stay splitting, transfer-graph components, random cuts).
//! * [`qubo`]: penalty compilation to QUBO, worst-case penalty weights, the
//!   Ising form and coefficient-ratio precision metrics.
//! * [`reduce`]: bin packing of passenger counts and transfer times and the
//!   approximation ratio it induces.
//! * [`solve`]: branch-and-bound and exhaustive exact solvers, penalty
//!   bisection and a simulated-annealing sampler with success probability
//!   and time-to-solution metrics.
//! * [`embed`]: Chimera hardware graphs, heuristic minor embedding, chain
//!   coupling and majority-vote un-embedding.
//! * [`experiment`]: corpus runs producing per-run records and plot-ready
//!   tables.
//! * [`cli`]: the `fgq` command line.

pub mod cli;
pub mod embed;
mod error;
pub mod experiment;
pub mod instance;
pub mod qubo;
pub mod reduce;
pub mod solve;

pub use error::{Error, Result};
pub use instance::{Assignment, FlightGateInstance, ForbiddenPairs};
pub use qubo::{IsingModel, PenaltyWeights, Qubo};
