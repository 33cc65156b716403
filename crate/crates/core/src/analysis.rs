//! Numerical verdicts on simulated trajectories: extinction and persistence of
//! the infected prey, attractivity of the disease-free solution, and the
//! eventual bound on the total population.

use serde::{Deserialize, Serialize};

use crate::auxiliary::{detect_period, DiseaseFreeReference};
use crate::dynamics::{Scenario, State, Trajectory};
use crate::error::{ModelError, Result};

fn tail_slice(traj: &Trajectory, tail: usize) -> Result<&[State]> {
    if tail == 0 || traj.len() < tail {
        return Err(ModelError::TrajectoryTooShort { len: traj.len(), tail });
    }
    Ok(&traj.states[traj.len() - tail..])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionVerdict {
    /// `sup I` over the tail is below the tolerance.
    pub extinct: bool,
    /// First index after which `I` stays below the tolerance.
    pub crossing_index: Option<usize>,
    pub tail_sup: f64,
}

/// Extinction test on the last `tail` states.
pub fn detect_extinction(traj: &Trajectory, tol: f64, tail: usize) -> Result<ExtinctionVerdict> {
    let window = tail_slice(traj, tail)?;
    let tail_sup = window.iter().map(|s| s.i).fold(0.0, f64::max);
    let extinct = tail_sup < tol;
    let crossing_index = extinct.then(|| {
        let last_above = traj.states.iter().rposition(|s| s.i >= tol);
        traj.start + last_above.map_or(0, |j| j + 1)
    });
    Ok(ExtinctionVerdict {
        extinct,
        crossing_index,
        tail_sup,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceVerdict {
    pub persistent: bool,
    pub tail_min: f64,
}

/// Persistence test: `inf I` over the last `tail` states exceeds `eps`.
pub fn detect_persistence(traj: &Trajectory, eps: f64, tail: usize) -> Result<PersistenceVerdict> {
    let window = tail_slice(traj, tail)?;
    let tail_min = window.iter().map(|s| s.i).fold(f64::INFINITY, f64::min);
    Ok(PersistenceVerdict {
        persistent: tail_min > eps,
        tail_min,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairDistance {
    pub a: usize,
    pub b: usize,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttractivityVerdict {
    pub attractive: bool,
    /// Per trajectory: sup over the last quarter of `|S - s*| + I + |P - y*|`.
    pub distances: Vec<f64>,
    /// Sup over the last quarter of the distance between two trajectories.
    pub pairwise: Vec<PairDistance>,
    /// `(n, max over trajectories of the distance to the reference)`.
    pub decay_curve: Vec<(usize, f64)>,
}

fn l1(a: &State, b: &State) -> f64 {
    (a.s - b.s).abs() + (a.i - b.i).abs() + (a.p - b.p).abs()
}

/// Attractivity of the disease-free solution, for models without predation
/// on susceptible prey and with `g` factoring through `z`.
pub fn check_attractivity(
    scenario: &Scenario,
    trajs: &[Trajectory],
    reference: &DiseaseFreeReference,
    tol: f64,
) -> Result<AttractivityVerdict> {
    let first = trajs
        .first()
        .ok_or_else(|| ModelError::InvalidArgument("no trajectories".into()))?;
    if trajs.iter().any(|t| t.start != first.start || t.len() != first.len()) {
        return Err(ModelError::InvalidArgument(
            "trajectories must share start and length".into(),
        ));
    }
    if !scenario.g.factors_in_predator() {
        return Err(ModelError::PreconditionViolation(format!(
            "g = {} does not factor as g0(x, y) z",
            scenario.g.name()
        )));
    }
    for n in first.start..first.end() {
        let a = scenario.coeffs.a.at(n);
        if a != 0.0 {
            return Err(ModelError::PreconditionViolation(format!(
                "attractivity needs a = 0, found a_{n} = {a}"
            )));
        }
    }

    let disease_free = |n: usize| -> Result<State> {
        let (s, y) = reference.at(n).ok_or_else(|| {
            ModelError::InvalidArgument(format!("disease-free reference does not cover index {n}"))
        })?;
        Ok(State::new(s, 0.0, y))
    };
    let quarter_from = first.len() - first.len().div_ceil(4);

    let mut distances = vec![0.0f64; trajs.len()];
    let mut decay_curve = Vec::with_capacity(first.len());
    for j in 0..first.len() {
        let n = first.start + j;
        let target = disease_free(n)?;
        let mut worst = 0.0f64;
        for (t, d) in trajs.iter().zip(distances.iter_mut()) {
            let dist = l1(&t.states[j], &target);
            worst = worst.max(dist);
            if j >= quarter_from {
                *d = d.max(dist);
            }
        }
        decay_curve.push((n, worst));
    }

    let mut pairwise = Vec::new();
    for a in 0..trajs.len() {
        for b in a + 1..trajs.len() {
            let distance = (quarter_from..first.len())
                .map(|j| l1(&trajs[a].states[j], &trajs[b].states[j]))
                .fold(0.0, f64::max);
            pairwise.push(PairDistance { a, b, distance });
        }
    }
    let attractive = distances.iter().all(|&d| d < tol) && pairwise.iter().all(|p| p.distance < tol);
    Ok(AttractivityVerdict {
        attractive,
        distances,
        pairwise,
        decay_curve,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundVerdict {
    pub bound_l: f64,
    /// `S + I + P <= L` from `first_index` to the end.
    pub holds: bool,
    /// First index from which the bound holds for the rest of the trajectory.
    pub first_index: Option<usize>,
    pub tail_max: f64,
    /// Replayed steps disagree with the scenario's coefficients.
    pub parameter_mismatch: bool,
}

/// Number of transitions replayed when looking for a parameter mismatch.
const REPLAY_SAMPLES: usize = 16;
const REPLAY_TOL: f64 = 1e-9;

/// Checks that the total population eventually stays below
///
/// ```text
/// L = Lu/ml + [ru + gu au f(Lu/ml, 0, 0) + thu etau g0(0, Lu/ml) Lu/ml] / bl + slack
/// ```
///
/// where `u`/`l` are suprema/infima over the trajectory's index range.
pub fn verify_bound_l(traj: &Trajectory, scenario: &Scenario, slack: f64) -> Result<BoundVerdict> {
    if traj.is_empty() {
        return Err(ModelError::TrajectoryTooShort { len: 0, tail: 1 });
    }
    let bounds = scenario.coeffs.bounds(traj.start..=traj.end() - 1);
    let (lo, hi) = (bounds.lower, bounds.upper);
    let prey_cap = hi.lambda / lo.mu;
    let g0 = scenario.g.predator_factor(0.0, prey_cap).ok_or_else(|| {
        ModelError::FactorizationUnavailable(format!(
            "g = {} does not factor as g0(x, y) z",
            scenario.g.name()
        ))
    })?;
    let predator_gain =
        hi.r + hi.gamma * hi.a * scenario.f.eval(prey_cap, 0.0, 0.0) + hi.theta * hi.eta * g0 * prey_cap;
    let bound_l = prey_cap + predator_gain / lo.b + slack;

    let last_above = traj.states.iter().rposition(|s| s.total().is_nan() || s.total() > bound_l);
    let first_index = match last_above {
        None => Some(traj.start),
        Some(j) if j + 1 < traj.len() => Some(traj.start + j + 1),
        Some(_) => None,
    };
    let tail_max = traj.states[traj.len() / 2..]
        .iter()
        .map(State::total)
        .fold(0.0, f64::max);

    let transitions = traj.len() - 1;
    let stride = (transitions / REPLAY_SAMPLES).max(1);
    let mut parameter_mismatch = false;
    for j in (0..transitions).step_by(stride) {
        let n = traj.start + j;
        let replayed = match scenario.step(n, traj.states[j]) {
            Ok(s) => s,
            Err(_) => {
                parameter_mismatch = true;
                break;
            }
        };
        let recorded = traj.states[j + 1];
        let scale = recorded.s.abs().max(recorded.i.abs()).max(recorded.p.abs()).max(1.0);
        if replayed.sup_distance(&recorded) > REPLAY_TOL * scale {
            parameter_mismatch = true;
            break;
        }
    }

    Ok(BoundVerdict {
        bound_l,
        holds: first_index.is_some(),
        first_index,
        tail_max,
        parameter_mismatch,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerdictOptions {
    pub extinction_tol: f64,
    pub persistence_eps: f64,
    pub tail_window: usize,
    pub bound_slack: f64,
    pub period_tol: f64,
}

impl Default for VerdictOptions {
    fn default() -> Self {
        VerdictOptions {
            extinction_tol: 1e-4,
            persistence_eps: 1e-3,
            tail_window: 500,
            bound_slack: 1e-6,
            period_tol: 1e-6,
        }
    }
}

/// All verdicts for one trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub extinction: bool,
    pub crossing_index: Option<usize>,
    pub persistence: bool,
    pub tail_min: f64,
    pub tail_sup: f64,
    /// Filled in when several trajectories are compared with the disease-free solution.
    pub attractivity: Option<bool>,
    #[serde(rename = "bound_L")]
    pub bound_l: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<usize>,
    pub parameter_mismatch: bool,
    /// Smallest period of the tail, if it is periodic to within the tolerance.
    pub tail_period: Option<usize>,
}

pub fn verdict_report(scenario: &Scenario, traj: &Trajectory, opts: &VerdictOptions) -> Result<VerdictReport> {
    let ext = detect_extinction(traj, opts.extinction_tol, opts.tail_window)?;
    let per = detect_persistence(traj, opts.persistence_eps, opts.tail_window)?;
    let bound = match verify_bound_l(traj, scenario, opts.bound_slack) {
        Ok(b) => Some(b),
        Err(ModelError::FactorizationUnavailable(_)) => None,
        Err(e) => return Err(e),
    };
    let tail: Vec<[f64; 3]> = traj.states[traj.len() - opts.tail_window..]
        .iter()
        .map(|s| [s.s, s.i, s.p])
        .collect();
    Ok(VerdictReport {
        extinction: ext.extinct,
        crossing_index: ext.crossing_index,
        persistence: per.persistent,
        tail_min: per.tail_min,
        tail_sup: ext.tail_sup,
        attractivity: None,
        bound_l: bound.map(|b| b.bound_l),
        t: bound.and_then(|b| b.first_index),
        parameter_mismatch: bound.is_some_and(|b| b.parameter_mismatch),
        tail_period: detect_period(&tail, opts.period_tol, opts.tail_window / 2),
    })
}
