//! Functional responses `f` (predation of susceptible prey) and `g`
//! (predation of infected prey), as a small named registry.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

type Response3 = Arc<dyn Fn(f64, f64, f64) -> f64 + Send + Sync>;
type Response2 = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Declared monotonicity in one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Trend {
    Nondecreasing,
    Nonincreasing,
    Unconstrained,
}

/// Which slot of the model a response fills; fixes the required monotonicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResponseRole {
    /// `f`: nondecreasing in x, nonincreasing in y.
    Prey,
    /// `g`: nonincreasing in x and y, monotone in z as declared.
    Predator,
}

/// A response supplied as code rather than by registry name. Not serializable.
#[derive(Clone)]
pub struct CustomResponse {
    pub name: String,
    pub func: Response3,
    /// `g0` with `g(x, y, z) = g0(x, y) * z`, when the response factors that way.
    pub predator_factor: Option<Response2>,
    pub z_trend: Trend,
}

impl fmt::Debug for CustomResponse {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomResponse")
            .field("name", &self.name)
            .field("factors", &self.predator_factor.is_some())
            .field("z_trend", &self.z_trend)
            .finish()
    }
}

impl PartialEq for CustomResponse {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && Arc::ptr_eq(&self.func, &other.func)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", try_from = "ResponseRepr")]
pub enum FunctionalResponse {
    /// `f(x, y, z) = x`
    LinearPrey,
    /// `g(x, y, z) = z`
    LinearPredator,
    /// `f(x, y, z) = x / (1 + m x)`
    #[serde(rename = "holling2_prey")]
    Holling2Prey { m: f64 },
    /// `g(x, y, z) = z / (1 + q y)`
    RatioModified { q: f64 },
    #[serde(skip)]
    Custom(CustomResponse),
}

/// Deserialization mirror; struct variants so that stray keys are rejected.
#[derive(Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
enum ResponseRepr {
    LinearPrey {},
    LinearPredator {},
    #[serde(rename = "holling2_prey")]
    Holling2Prey { m: f64 },
    RatioModified { q: f64 },
}

impl From<ResponseRepr> for FunctionalResponse {
    fn from(r: ResponseRepr) -> Self {
        match r {
            ResponseRepr::LinearPrey {} => FunctionalResponse::LinearPrey,
            ResponseRepr::LinearPredator {} => FunctionalResponse::LinearPredator,
            ResponseRepr::Holling2Prey { m } => FunctionalResponse::Holling2Prey { m },
            ResponseRepr::RatioModified { q } => FunctionalResponse::RatioModified { q },
        }
    }
}

impl FunctionalResponse {
    pub fn custom(
        name: impl Into<String>,
        func: impl Fn(f64, f64, f64) -> f64 + Send + Sync + 'static,
        z_trend: Trend,
    ) -> Self {
        FunctionalResponse::Custom(CustomResponse {
            name: name.into(),
            func: Arc::new(func),
            predator_factor: None,
            z_trend,
        })
    }

    pub fn name(&self) -> &str {
        match self {
            FunctionalResponse::LinearPrey => "linear_prey",
            FunctionalResponse::LinearPredator => "linear_predator",
            FunctionalResponse::Holling2Prey { .. } => "holling2_prey",
            FunctionalResponse::RatioModified { .. } => "ratio_modified",
            FunctionalResponse::Custom(c) => &c.name,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(ModelError::InvalidResponse {
                name: self.name().to_string(),
                reason: reason.to_string(),
            })
        };
        match *self {
            FunctionalResponse::Holling2Prey { m } if !(m > 0.0 && m.is_finite()) => {
                bad("saturation m must be positive")
            }
            FunctionalResponse::RatioModified { q } if !(q > 0.0 && q.is_finite()) => {
                bad("q must be positive")
            }
            _ => Ok(()),
        }
    }

    #[inline]
    pub fn eval(&self, x: f64, y: f64, z: f64) -> f64 {
        match self {
            FunctionalResponse::LinearPrey => x,
            FunctionalResponse::LinearPredator => z,
            FunctionalResponse::Holling2Prey { m } => x / (1.0 + m * x),
            FunctionalResponse::RatioModified { q } => z / (1.0 + q * y),
            FunctionalResponse::Custom(c) => (c.func)(x, y, z),
        }
    }

    /// `g0(x, y)` when `g(x, y, z) = g0(x, y) * z`.
    pub fn predator_factor(&self, x: f64, y: f64) -> Option<f64> {
        match self {
            FunctionalResponse::LinearPredator => Some(1.0),
            FunctionalResponse::RatioModified { q } => Some(1.0 / (1.0 + q * y)),
            FunctionalResponse::Custom(c) => c.predator_factor.as_ref().map(|g0| g0(x, y)),
            _ => None,
        }
    }

    pub fn factors_in_predator(&self) -> bool {
        self.predator_factor(0.0, 0.0).is_some()
    }

    pub fn z_trend(&self) -> Trend {
        match self {
            FunctionalResponse::LinearPredator | FunctionalResponse::RatioModified { .. } => {
                Trend::Nondecreasing
            }
            FunctionalResponse::LinearPrey | FunctionalResponse::Holling2Prey { .. } => {
                Trend::Unconstrained
            }
            FunctionalResponse::Custom(c) => c.z_trend,
        }
    }

    pub fn is_linear_prey(&self) -> bool {
        matches!(self, FunctionalResponse::LinearPrey)
    }

    pub fn is_linear_predator(&self) -> bool {
        matches!(self, FunctionalResponse::LinearPredator)
    }

    /// Sampled check of the sign and monotonicity requirements for `role` on a
    /// 20 x 20 x 20 grid over `[0, 10]^3`.
    pub fn check_h3(&self, role: ResponseRole) -> std::result::Result<(), MonotonicityViolation> {
        let grid: Vec<f64> = (0..H3_GRID_POINTS)
            .map(|i| H3_GRID_MAX * i as f64 / (H3_GRID_POINTS - 1) as f64)
            .collect();
        let (x_trend, y_trend, z_trend) = match role {
            ResponseRole::Prey => (Trend::Nondecreasing, Trend::Nonincreasing, Trend::Unconstrained),
            ResponseRole::Predator => (Trend::Nonincreasing, Trend::Nonincreasing, self.z_trend()),
        };
        let fail = |property: &'static str, at: [f64; 3], value: f64| MonotonicityViolation {
            response: self.name().to_string(),
            property,
            at,
            value,
        };
        let violates = |trend: Trend, from: f64, to: f64| {
            let slack = H3_SLACK * from.abs().max(to.abs()).max(1.0);
            match trend {
                Trend::Nondecreasing => to < from - slack,
                Trend::Nonincreasing => to > from + slack,
                Trend::Unconstrained => false,
            }
        };
        for (i, &x) in grid.iter().enumerate() {
            for (j, &y) in grid.iter().enumerate() {
                for (l, &z) in grid.iter().enumerate() {
                    let v = self.eval(x, y, z);
                    if !v.is_finite() || v < 0.0 {
                        return Err(fail("nonnegative", [x, y, z], v));
                    }
                    if i + 1 < grid.len() && violates(x_trend, v, self.eval(grid[i + 1], y, z)) {
                        return Err(fail(trend_label(x_trend, "x"), [x, y, z], v));
                    }
                    if j + 1 < grid.len() && violates(y_trend, v, self.eval(x, grid[j + 1], z)) {
                        return Err(fail(trend_label(y_trend, "y"), [x, y, z], v));
                    }
                    if l + 1 < grid.len() && violates(z_trend, v, self.eval(x, y, grid[l + 1])) {
                        return Err(fail(trend_label(z_trend, "z"), [x, y, z], v));
                    }
                }
            }
        }
        Ok(())
    }
}

const H3_GRID_POINTS: usize = 20;
const H3_GRID_MAX: f64 = 10.0;
const H3_SLACK: f64 = 1e-12;

fn trend_label(trend: Trend, var: &str) -> &'static str {
    match (trend, var) {
        (Trend::Nondecreasing, "x") => "nondecreasing in x",
        (Trend::Nondecreasing, "y") => "nondecreasing in y",
        (Trend::Nondecreasing, _) => "nondecreasing in z",
        (Trend::Nonincreasing, "x") => "nonincreasing in x",
        (Trend::Nonincreasing, "y") => "nonincreasing in y",
        (Trend::Nonincreasing, _) => "nonincreasing in z",
        (Trend::Unconstrained, _) => "unconstrained",
    }
}

/// A grid point at which a response breaks H3.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotonicityViolation {
    pub response: String,
    pub property: &'static str,
    pub at: [f64; 3],
    pub value: f64,
}

impl fmt::Display for MonotonicityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} is not {} at (x, y, z) = ({}, {}, {})",
            self.response, self.property, self.at[0], self.at[1], self.at[2]
        )
    }
}
