//! Simulation and numerical verification toolkit for a quadratic evolution
//! model in which each child trait is the mid-parent average plus an
//! independent perturbation. The library provides:
//!
//! - trait and perturbation distribution families with analytic
//!   characteristic functions, samplers and tail masses ([`distributions`]);
//! - the characteristic-function engine: iterate products, infinite-depth
//!   perturbation limits, fixed-point and dyadic-stability residuals, tail
//!   bound checks and heavy-tail limit diagnostics ([`cf_engine`]);
//! - the three sampling algorithms (population propagation, exact
//!   random-sum draws, truncated approximate draws) with reproducible
//!   counter-based randomness ([`samplers`], [`rng`]);
//! - statistical verification helpers: empirical characteristic functions,
//!   moment summaries, two-sample distances, histograms ([`analysis`]);
//! - CSV/JSON export for the command-line frontend ([`io`]).

pub mod analysis;
pub mod cf_engine;
pub mod config;
pub mod distributions;
pub mod figures;
pub mod error;
pub mod io;
pub mod numeric;
pub mod rng;
pub mod samplers;

pub use cf_engine::{CFGrid, IterateSpec, ResidualReport, TailBoundParams};
pub use distributions::DistributionSpec;
pub use error::{QsoError, Result};
pub use rng::RandomStream;
pub use samplers::{LogBase, PopulationOptions, TruncationBudget};
