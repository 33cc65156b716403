//! Comparison systems used to bound the full model, and numerical extraction
//! of their attracting solutions.
//!
//! * prey alone: `s' = (Lambda + s) / (1 + mu)`
//! * predator alone: `y' = (r y + y) / (1 + b y)`
//! * uninfected prey and predator `(x, z)`, in a base form and two
//!   epsilon-perturbed families ([`AuxVariant`]).

use serde::{Deserialize, Serialize};

use crate::dynamics::{FunctionalResponse, StepError};
use crate::error::{ModelError, Result};
use crate::params::{DiscreteCoefficients, StepCoefficients};
use crate::root::solve_implicit_prey;

/// Which member of the uninfected two-species family to step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", content = "epsilon", rename_all = "lowercase")]
pub enum AuxVariant {
    Base,
    /// Extra loss `-eps x_n` on the prey; `f(x', eps, z)` in the predator gain.
    Lower(f64),
    /// `f(x', eps, z)` in the prey loss; extra `theta eta g(x', 0, z) eps` predator gain.
    Upper(f64),
}

impl AuxVariant {
    pub fn epsilon(&self) -> f64 {
        match *self {
            AuxVariant::Base => 0.0,
            AuxVariant::Lower(e) | AuxVariant::Upper(e) => e,
        }
    }
}

#[inline]
pub fn step_aux_prey(s: f64, k: &StepCoefficients) -> f64 {
    (k.lambda + s) / (1.0 + k.mu)
}

#[inline]
pub fn step_aux_pred(y: f64, k: &StepCoefficients) -> f64 {
    (k.r * y + y) / (1.0 + k.b * y)
}

/// One step of the uninfected prey/predator system.
pub fn step_uninfected(
    x: f64,
    z: f64,
    k: &StepCoefficients,
    f: &FunctionalResponse,
    g: &FunctionalResponse,
    variant: AuxVariant,
) -> std::result::Result<(f64, f64), StepError> {
    let (prey_drain, prey_y, gain_y, extra_gain) = match variant {
        AuxVariant::Base => (0.0, 0.0, 0.0, 0.0),
        AuxVariant::Lower(e) => (e, 0.0, e, 0.0),
        AuxVariant::Upper(e) => (0.0, e, 0.0, e),
    };
    let rhs = k.lambda + x - prey_drain * x;
    let damping = 1.0 + k.mu;
    let x_next = if k.a == 0.0 || z == 0.0 {
        rhs / damping
    } else if f.is_linear_prey() {
        rhs / (damping + k.a * z)
    } else {
        solve_implicit_prey(rhs, damping, |u| k.a * f.eval(u, prey_y, z) * z)?
    };
    let mut gain = (1.0 + k.r) * z + k.gamma * k.a * f.eval(x_next, gain_y, z) * z;
    if extra_gain != 0.0 {
        gain += k.theta * k.eta * g.eval(x_next, 0.0, z) * extra_gain;
    }
    let z_next = gain / (1.0 + k.b * z);
    for (component, value) in [("x", x_next), ("z", z_next)] {
        if !(value.is_finite() && value >= 0.0) {
            return Err(StepError::Negative { component, value });
        }
    }
    Ok((x_next, z_next))
}

/// Closed-form equilibrium of the autonomous uninfected system with `f = x`.
///
/// With `K1 = mu + a r / b` and `K2 = 2 gamma a^2 / b` the prey equilibrium is
/// the positive root of `(K2 / 2) x^2 + K1 x - Lambda = 0` and the predator
/// equilibrium is `z = (r + gamma a x) / b`.
pub fn autonomous_fixed_point(k: &StepCoefficients) -> (f64, f64) {
    let k1 = k.mu + k.a * k.r / k.b;
    let k2 = 2.0 * k.gamma * k.a * k.a / k.b;
    let x = if k2 >= 1e-14 {
        // (-K1 + sqrt(K1^2 + 2 Lambda K2)) / K2, rationalized
        2.0 * k.lambda / (k1 + (k1 * k1 + 2.0 * k.lambda * k2).sqrt())
    } else {
        k.lambda / k1
    };
    (x, (k.r + k.gamma * k.a * x) / k.b)
}

/// The comparison system whose attractor is sought.
#[derive(Debug, Clone, Copy)]
pub enum AuxSystem<'a> {
    Prey,
    Predator,
    Uninfected {
        f: &'a FunctionalResponse,
        g: &'a FunctionalResponse,
        variant: AuxVariant,
    },
}

impl AuxSystem<'_> {
    fn kind(&self) -> ReferenceKind {
        match self {
            AuxSystem::Prey => ReferenceKind::Prey,
            AuxSystem::Predator => ReferenceKind::Predator,
            AuxSystem::Uninfected { .. } => ReferenceKind::UninfectedPair,
        }
    }

    fn step(&self, v: [f64; 2], k: &StepCoefficients, n: usize) -> Result<[f64; 2]> {
        match *self {
            AuxSystem::Prey => Ok([step_aux_prey(v[0], k), 0.0]),
            AuxSystem::Predator => Ok([step_aux_pred(v[0], k), 0.0]),
            AuxSystem::Uninfected { f, g, variant } => step_uninfected(v[0], v[1], k, f, g, variant)
                .map(|(x, z)| [x, z])
                .map_err(|e| e.at_step(n)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceKind {
    Prey,
    Predator,
    UninfectedPair,
}

impl ReferenceKind {
    pub fn dim(&self) -> usize {
        match self {
            ReferenceKind::UninfectedPair => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttractorOptions {
    pub burn_in: usize,
    pub window: usize,
    pub tol: f64,
}

impl Default for AttractorOptions {
    fn default() -> Self {
        AttractorOptions {
            burn_in: 5000,
            window: 100,
            tol: 1e-8,
        }
    }
}

impl AttractorOptions {
    /// Defaults with the window set to ten coefficient periods (100 when constant or aperiodic).
    pub fn for_coefficients(coeffs: &DiscreteCoefficients) -> Self {
        let window = match coeffs.periodicity() {
            Some(p) if p.period > 1 => 10 * p.period,
            _ => 100,
        };
        AttractorOptions {
            window,
            ..Default::default()
        }
    }
}

/// A numerically extracted attracting solution of a comparison system,
/// recorded from index `start` on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSolution {
    pub kind: ReferenceKind,
    pub start: usize,
    pub values: Vec<[f64; 2]>,
    pub burn_in: usize,
    pub detected_period: Option<usize>,
    pub convergence_residual: f64,
    pub tol: f64,
}

impl ReferenceSolution {
    /// One past the last recorded index.
    pub fn end(&self) -> usize {
        self.start + self.values.len()
    }

    /// Value at index `n`; past the recorded window a detected period extends it.
    pub fn at(&self, n: usize) -> Result<[f64; 2]> {
        let exhausted = || ModelError::ReferenceWindowExhausted {
            index: n,
            start: self.start,
            end: self.end(),
        };
        let j = n.checked_sub(self.start).ok_or_else(exhausted)?;
        if let Some(v) = self.values.get(j) {
            return Ok(*v);
        }
        match self.detected_period {
            Some(p) => Ok(self.values[j % p]),
            None => Err(exhausted()),
        }
    }

    pub fn value(&self, n: usize) -> Result<f64> {
        self.at(n).map(|v| v[0])
    }

    pub fn summary(&self) -> ReferenceSummary {
        ReferenceSummary {
            kind: self.kind,
            start: self.start,
            len: self.values.len(),
            burn_in: self.burn_in,
            detected_period: self.detected_period,
            convergence_residual: self.convergence_residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSummary {
    pub kind: ReferenceKind,
    pub start: usize,
    pub len: usize,
    pub burn_in: usize,
    pub detected_period: Option<usize>,
    pub convergence_residual: f64,
}

fn sup_distance<const D: usize>(a: &[f64; D], b: &[f64; D]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Smallest `p <= max_period` with `sup_i |v[i + p] - v[i]| < tol`.
pub fn detect_period<const D: usize>(values: &[[f64; D]], tol: f64, max_period: usize) -> Option<usize> {
    (1..=max_period.min(values.len().saturating_sub(1))).find(|&p| {
        values
            .iter()
            .zip(&values[p..])
            .all(|(a, b)| sup_distance(a, b) < tol)
    })
}

/// Iterates a comparison system past its transient and records its attractor.
///
/// With eventually periodic coefficients the window is rounded up to a
/// multiple of the period and the residual is the sup-distance between the
/// recorded window and the next window. Without a known period the residual
/// is the sup-distance to a companion run from a different start.
pub fn find_attractor(
    system: AuxSystem<'_>,
    coeffs: &DiscreteCoefficients,
    initial: [f64; 2],
    opts: &AttractorOptions,
) -> Result<ReferenceSolution> {
    let kind = system.kind();
    if initial[..kind.dim()].iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(ModelError::InvalidArgument(format!(
            "attractor search needs a strictly positive start, got {:?}",
            &initial[..kind.dim()]
        )));
    }
    if opts.burn_in == 0 || opts.window == 0 || opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(ModelError::InvalidArgument(
            "burn_in and window must be >= 1 and tol > 0".into(),
        ));
    }
    let periodicity = coeffs.periodicity();
    let burn_in = opts.burn_in.max(periodicity.map_or(0, |p| p.offset));

    let run = |start_value: [f64; 2], total: usize| -> Result<Vec<[f64; 2]>> {
        let mut v = start_value;
        let mut out = Vec::with_capacity(total.saturating_sub(burn_in));
        for n in 0..total {
            if n >= burn_in {
                out.push(v);
            }
            v = system.step(v, &coeffs.at(n), n)?;
        }
        Ok(out)
    };

    let (values, residual) = match periodicity {
        Some(p) => {
            let window = opts.window.div_ceil(p.period) * p.period;
            let values = run(initial, burn_in + 2 * window)?;
            let (first, second) = values.split_at(window);
            let residual = first
                .iter()
                .zip(second)
                .map(|(a, b)| sup_distance(a, b))
                .fold(0.0, f64::max);
            (values, residual)
        }
        None => {
            let values = run(initial, burn_in + opts.window)?;
            let companion = run(initial.map(|v| 2.0 * v + 0.5), burn_in + opts.window)?;
            let residual = values
                .iter()
                .zip(&companion)
                .map(|(a, b)| sup_distance(a, b))
                .fold(0.0, f64::max);
            (values, residual)
        }
    };
    if residual.is_nan() || residual > opts.tol {
        return Err(ModelError::NoConvergence {
            residual,
            tol: opts.tol,
            burn_in,
        });
    }
    let detected_period = detect_period(&values, opts.tol, values.len() / 2);
    Ok(ReferenceSolution {
        kind,
        start: burn_in,
        values,
        burn_in,
        detected_period,
        convergence_residual: residual,
        tol: opts.tol,
    })
}

/// Iterates the prey-only comparison equation: `steps + 1` values from index `start`.
pub fn iterate_prey(coeffs: &DiscreteCoefficients, start: usize, s0: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut s = s0;
    out.push(s);
    for n in start..start + steps {
        s = step_aux_prey(s, &coeffs.at(n));
        out.push(s);
    }
    out
}

/// Iterates the predator-only comparison equation: `steps + 1` values from index `start`.
pub fn iterate_predator(coeffs: &DiscreteCoefficients, start: usize, y0: f64, steps: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(steps + 1);
    let mut y = y0;
    out.push(y);
    for n in start..start + steps {
        y = step_aux_pred(y, &coeffs.at(n));
        out.push(y);
    }
    out
}

/// A disease-free solution `(s*_n, 0, y*_n)` on the indices `start ..= start + steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiseaseFreeReference {
    pub start: usize,
    pub prey: Vec<f64>,
    pub predator: Vec<f64>,
}

impl DiseaseFreeReference {
    /// Seeds the comparison equations at `Lambda_0 / mu_0` and `r_0 / b_0`, which
    /// are their equilibria when the coefficients are constant.
    pub fn new(coeffs: &DiscreteCoefficients, start: usize, steps: usize) -> Self {
        let k = coeffs.at(start);
        Self::seeded(coeffs, start, steps, k.lambda / k.mu, k.r / k.b)
    }

    pub fn seeded(coeffs: &DiscreteCoefficients, start: usize, steps: usize, s0: f64, y0: f64) -> Self {
        DiseaseFreeReference {
            start,
            prey: iterate_prey(coeffs, start, s0, steps),
            predator: iterate_predator(coeffs, start, y0, steps),
        }
    }

    pub fn at(&self, n: usize) -> Option<(f64, f64)> {
        let j = n.checked_sub(self.start)?;
        Some((*self.prey.get(j)?, *self.predator.get(j)?))
    }
}
