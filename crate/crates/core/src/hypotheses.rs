//! The standing hypotheses H1-H9 as a table of checks.
//!
//! H1, H2 and H4 are certified over a finite horizon, H3 by grid sampling,
//! H5-H7 by simulating the scenario, and H8/H9 by convergence of the
//! perturbed uninfected subsystems.

use std::fmt;

use serde::Serialize;

use crate::analysis::verify_bound_l;
use crate::auxiliary::{find_attractor, AttractorOptions, AuxSystem, AuxVariant};
use crate::dynamics::{simulate_from, ResponseRole, Scenario, State};
use crate::error::ModelError;
use crate::params::{check_h4, validate_h1_h2, Hypothesis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HypothesisStatus {
    Pass,
    Fail,
    Unverifiable,
    VerifiedEmpirically,
}

impl fmt::Display for HypothesisStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HypothesisStatus::Pass => "pass",
            HypothesisStatus::Fail => "fail",
            HypothesisStatus::Unverifiable => "unverifiable",
            HypothesisStatus::VerifiedEmpirically => "verified-empirically",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisRow {
    pub id: &'static str,
    pub status: HypothesisStatus,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HypothesisOptions {
    pub horizon: usize,
    /// Perturbation used for H8/H9.
    pub epsilon: f64,
    pub attractor: AttractorOptions,
}

impl Default for HypothesisOptions {
    fn default() -> Self {
        HypothesisOptions {
            horizon: 2000,
            epsilon: 1e-3,
            attractor: AttractorOptions::default(),
        }
    }
}

fn row(id: &'static str, status: HypothesisStatus, detail: impl Into<String>) -> HypothesisRow {
    HypothesisRow {
        id,
        status,
        detail: detail.into(),
    }
}

/// Runs every check; failures are reported as statuses, never as errors.
pub fn check_hypotheses(scenario: &Scenario, initials: &[State], opts: &HypothesisOptions) -> Vec<HypothesisRow> {
    use HypothesisStatus::*;
    let horizon = opts.horizon.max(1);
    let mut rows = Vec::with_capacity(9);

    let report = validate_h1_h2(&scenario.coeffs, horizon);
    for (id, h) in [("H1", Hypothesis::H1), ("H2", Hypothesis::H2)] {
        let violations: Vec<String> = report
            .violations
            .iter()
            .filter(|v| v.hypothesis == h)
            .map(|v| format!("{} fails for {} at n = {} ({})", v.clause, v.coefficient, v.index, v.value))
            .collect();
        rows.push(if violations.is_empty() {
            row(id, Pass, format!("checked on n = 0..{horizon}"))
        } else {
            row(id, Fail, violations.join("; "))
        });
    }

    let h3 = [
        (ResponseRole::Prey, &scenario.f),
        (ResponseRole::Predator, &scenario.g),
    ]
    .into_iter()
    .find_map(|(role, resp)| resp.check_h3(role).err());
    rows.push(match h3 {
        None => row(
            "H3",
            Pass,
            format!("f = {}, g = {} sampled on a 20^3 grid", scenario.f.name(), scenario.g.name()),
        ),
        Some(v) => row("H3", Fail, v.to_string()),
    });

    let window = scenario.coeffs.periodicity().map_or(10, |p| p.period.max(1));
    rows.push(match check_h4(&scenario.coeffs, window, horizon) {
        Ok(c) if c.holds => row(
            "H4",
            Pass,
            format!("window {window}: K = {:.6}, decay rate {:.6}", c.k_const, c.decay_rate),
        ),
        Ok(c) => row(
            "H4",
            Fail,
            format!("window {window}: max window product {:.6} is not below 1", c.max_window_product),
        ),
        Err(e) => row("H4", Unverifiable, e.to_string()),
    });

    let mut h5 = row("H5", VerifiedEmpirically, format!("implicit prey update solved on {horizon} steps"));
    let mut h6 = row("H6", VerifiedEmpirically, format!("states stayed nonnegative on {horizon} steps"));
    let mut h7 = row("H7", VerifiedEmpirically, format!("total population bounded on {horizon} steps"));
    for &x0 in initials {
        match simulate_from(scenario, 0, x0, horizon) {
            Ok(traj) => match verify_bound_l(&traj, scenario, 1e-6) {
                Ok(b) if b.holds => {
                    if h7.status == VerifiedEmpirically {
                        h7.detail = format!("S + I + P <= L = {:.6} on {horizon} steps", b.bound_l);
                    }
                }
                Ok(b) => h7 = row("H7", Fail, format!("S + I + P exceeds L = {:.6} at the end of the run", b.bound_l)),
                Err(_) => {
                    let max_total = traj.states.iter().map(State::total).fold(0.0, f64::max);
                    if !max_total.is_finite() {
                        h7 = row("H7", Fail, "total population is not finite");
                    } else if h7.status == VerifiedEmpirically {
                        h7.detail = format!("g does not factor, no bound L; max S + I + P = {max_total:.6} on {horizon} steps");
                    }
                }
            },
            Err(ModelError::RootNotConverged { step, residual }) => {
                h5 = row("H5", Fail, format!("implicit update failed at step {step}, residual {residual:e}"));
            }
            Err(e) => h6 = row("H6", Fail, e.to_string()),
        }
    }
    rows.extend([h5, h6, h7]);

    let eps = opts.epsilon;
    for (id, variant) in [("H8", AuxVariant::Lower(eps)), ("H9", AuxVariant::Upper(eps))] {
        let system = AuxSystem::Uninfected {
            f: &scenario.f,
            g: &scenario.g,
            variant,
        };
        let attractor = AttractorOptions {
            window: AttractorOptions::for_coefficients(&scenario.coeffs).window,
            ..opts.attractor
        };
        rows.push(match find_attractor(system, &scenario.coeffs, [1.0, 1.0], &attractor) {
            Ok(r) => row(
                id,
                Pass,
                format!("epsilon = {eps}: converged, residual {:.3e}", r.convergence_residual),
            ),
            Err(e) => row(id, Fail, format!("epsilon = {eps}: {e}")),
        });
    }
    rows
}

/// Plain-text table, one hypothesis per line.
pub fn format_table(rows: &[HypothesisRow]) -> String {
    let mut out = String::from("hypothesis  status                detail\n");
    for r in rows {
        out.push_str(&format!("{:<11} {:<21} {}\n", r.id, r.status.to_string(), r.detail));
    }
    out
}
