//! Simulation and threshold analysis for a discrete eco-epidemiological model
//! of susceptible prey `S`, infected prey `I` and predators `P` with
//! time-varying coefficients.

pub mod analysis;
pub mod auxiliary;
pub mod dynamics;
pub mod error;
pub mod hypotheses;
pub mod io;
pub mod params;
pub mod presets;
mod root;
pub mod thresholds;

pub use dynamics::{simulate, simulate_from, FunctionalResponse, Scenario, State, Trajectory};
pub use error::{ModelError, Result};
pub use params::{discretize_continuous, ContinuousModelSpec, DiscreteCoefficients, StepCoefficients};
pub use thresholds::{Classification, ThresholdReport};
