//! The discrete three-species system (susceptible prey `S`, infected prey `I`,
//! predator `P`).
//!
//! One step from `n` to `n + 1`:
//!
//! ```text
//! S' (1 + mu + beta I) = Lambda + S - a f(S', I, P) P
//! I' = (1 + beta S') I / (1 + eta g(S, I, P) + c)
//! P' = [(1 + r) P + gamma a f(S', I, P) P + theta eta g(S, I, P) I'] / (1 + b P)
//! ```
//!
//! With `f = x` and `g = z` the prey update is linear in `S'` and the whole
//! step has a closed form ([`step_explicit`]); any other response goes through
//! [`step_general`], which solves the prey update by bisection.

mod response;

pub use response::{CustomResponse, FunctionalResponse, MonotonicityViolation, ResponseRole, Trend};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{ModelError, Result};
use crate::params::{validate_h1_h2, DiscreteCoefficients, StepCoefficients};
use crate::root::{solve_implicit_prey, RootError};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct State {
    #[serde(rename = "S")]
    pub s: f64,
    #[serde(rename = "I")]
    pub i: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

impl State {
    pub const fn new(s: f64, i: f64, p: f64) -> Self {
        State { s, i, p }
    }

    pub fn total(&self) -> f64 {
        self.s + self.i + self.p
    }

    pub fn is_nonnegative(&self) -> bool {
        [self.s, self.i, self.p].iter().all(|v| v.is_finite() && *v >= 0.0)
    }

    pub fn sup_distance(&self, other: &State) -> f64 {
        (self.s - other.s)
            .abs()
            .max((self.i - other.i).abs())
            .max((self.p - other.p).abs())
    }
}

/// Why a single step failed.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("implicit prey update: {0}")]
    Root(#[from] RootError),
    #[error("component {component} became {value}")]
    Negative { component: &'static str, value: f64 },
}

impl StepError {
    pub(crate) fn at_step(self, step: usize) -> ModelError {
        match self {
            StepError::Root(RootError::NotConverged { residual }) => {
                ModelError::RootNotConverged { step, residual }
            }
            other => ModelError::PositivityViolation {
                step,
                detail: other.to_string(),
            },
        }
    }
}

/// Closed-form step for `f(x, y, z) = x`, `g(x, y, z) = z`.
#[inline]
pub fn step_explicit(state: State, k: &StepCoefficients) -> State {
    let State { s, i, p } = state;
    let psi = 1.0 + k.mu + k.beta * i + k.a * p;
    let phi = 1.0 + k.eta * p + k.c;
    let theta_n = k.lambda + s;
    let psi_phi = psi * phi;
    State {
        s: theta_n / psi,
        i: (k.beta * theta_n + psi) / psi_phi * i,
        p: ((1.0 + k.r) * psi_phi
            + k.gamma * k.a * theta_n * phi
            + k.theta * k.eta * (psi + k.beta * theta_n) * i)
            * p
            / (psi_phi * (1.0 + k.b * p)),
    }
}

/// One step for arbitrary responses. `f` must be nondecreasing in its first
/// argument for the prey update to have a unique root.
pub fn step_general(
    state: State,
    k: &StepCoefficients,
    f: &FunctionalResponse,
    g: &FunctionalResponse,
) -> std::result::Result<State, StepError> {
    let State { s, i, p } = state;
    let rhs = k.lambda + s;
    let damping = 1.0 + k.mu + k.beta * i;
    let s_next = if k.a == 0.0 || p == 0.0 {
        rhs / damping
    } else {
        solve_implicit_prey(rhs, damping, |x| k.a * f.eval(x, i, p) * p)?
    };
    let g_now = g.eval(s, i, p);
    let i_next = (1.0 + k.beta * s_next) * i / (1.0 + k.eta * g_now + k.c);
    let p_next = ((1.0 + k.r) * p
        + k.gamma * k.a * f.eval(s_next, i, p) * p
        + k.theta * k.eta * g_now * i_next)
        / (1.0 + k.b * p);
    for (component, value) in [("S", s_next), ("I", i_next), ("P", p_next)] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(StepError::Negative { component, value });
        }
    }
    Ok(State::new(s_next, i_next, p_next))
}

/// A full model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub label: String,
    pub coeffs: DiscreteCoefficients,
    pub f: FunctionalResponse,
    pub g: FunctionalResponse,
    pub initial: State,
}

impl Scenario {
    /// Linear responses, for which the closed-form step applies.
    pub fn is_explicit(&self) -> bool {
        self.f.is_linear_prey() && self.g.is_linear_predator()
    }

    /// Checks responses, initial state and H1/H2 on `[0, horizon]`.
    pub fn validate(&self, horizon: usize) -> Result<()> {
        self.f.validate()?;
        self.g.validate()?;
        if !self.initial.is_nonnegative() {
            return Err(ModelError::InvalidArgument(format!(
                "initial state {:?} must be finite and nonnegative",
                self.initial
            )));
        }
        let report = validate_h1_h2(&self.coeffs, horizon);
        if report.passes() {
            Ok(())
        } else {
            Err(ModelError::Validation(report))
        }
    }

    /// Advances `state` from index `n` to `n + 1`.
    #[inline]
    pub fn step(&self, n: usize, state: State) -> Result<State> {
        let k = self.coeffs.at(n);
        if self.is_explicit() {
            Ok(step_explicit(state, &k))
        } else {
            step_general(state, &k, &self.f, &self.g).map_err(|e| e.at_step(n))
        }
    }

    pub fn with_initial(&self, initial: State) -> Scenario {
        Scenario {
            initial,
            ..self.clone()
        }
    }
}

/// States `(S_n, I_n, P_n)` for `n = start ..= start + steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub start: usize,
    pub states: Vec<State>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Index of the final state.
    pub fn end(&self) -> usize {
        self.start + self.states.len().saturating_sub(1)
    }

    pub fn state_at(&self, n: usize) -> Option<&State> {
        n.checked_sub(self.start).and_then(|j| self.states.get(j))
    }

    pub fn indexed(&self) -> impl Iterator<Item = (usize, &State)> + '_ {
        self.states.iter().enumerate().map(move |(j, s)| (self.start + j, s))
    }

    pub fn last(&self) -> Option<&State> {
        self.states.last()
    }
}

/// Simulates the scenario from its initial state at `n = 0`.
pub fn simulate(scenario: &Scenario, n_steps: usize) -> Result<Trajectory> {
    simulate_from(scenario, 0, scenario.initial, n_steps)
}

pub fn simulate_from(scenario: &Scenario, start: usize, initial: State, n_steps: usize) -> Result<Trajectory> {
    if !initial.is_nonnegative() {
        return Err(ModelError::PositivityViolation {
            step: start,
            detail: format!("initial state {initial:?} is not nonnegative"),
        });
    }
    let mut states = Vec::with_capacity(n_steps + 1);
    states.push(initial);
    let mut state = initial;
    for n in start..start + n_steps {
        state = scenario.step(n, state)?;
        states.push(state);
    }
    Ok(Trajectory { start, states })
}
