//! Scenario files (TOML) and CSV/JSON export.
//!
//! ```toml
//! label = "example"
//! step_size = 1.0
//!
//! [coefficients]
//! lambda = { kind = "constant", value = 0.3 }
//! beta = { kind = "cosine", base = 0.17, amplitude = 0.7, frequency = 0.6283185307179586 }
//! # ... mu, a, eta, c, r, b, theta; gamma defaults to 0
//!
//! [responses]
//! f = { name = "linear_prey" }
//! g = { name = "linear_predator" }
//!
//! [initial]
//! S = 0.8
//! I = 0.6
//! P = 0.1
//!
//! [run]
//! n_steps = 2000
//! ```

use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::VerdictOptions;
use crate::dynamics::{FunctionalResponse, Scenario, State, Trajectory};
use crate::error::ModelError;
use crate::params::{discretize_continuous, ContinuousModelSpec, Hypothesis, ValidationReport};
use crate::thresholds::ThresholdOptions;

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Parse(String),
    #[error("invalid scenario: {0}")]
    Validation(ModelError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Responses {
    pub f: FunctionalResponse,
    pub g: FunctionalResponse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub extinction: f64,
    pub persistence: f64,
    pub attractor: f64,
    pub bound_slack: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            extinction: 1e-4,
            persistence: 1e-3,
            attractor: 1e-8,
            bound_slack: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n_steps: usize,
    pub burn_in: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_max: Option<usize>,
    pub scan_len: usize,
    pub tail_window: usize,
    pub tolerances: Tolerances,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n_steps: 2000,
            burn_in: 5000,
            lambda_max: None,
            scan_len: 10_000,
            tail_window: 500,
            tolerances: Tolerances::default(),
        }
    }
}

impl RunConfig {
    pub fn threshold_options(&self) -> ThresholdOptions {
        ThresholdOptions {
            burn_in: self.burn_in,
            scan_len: self.scan_len,
            tol: self.tolerances.attractor,
            ..ThresholdOptions::default()
        }
    }

    pub fn verdict_options(&self) -> VerdictOptions {
        VerdictOptions {
            extinction_tol: self.tolerances.extinction,
            persistence_eps: self.tolerances.persistence,
            tail_window: self.tail_window,
            bound_slack: self.tolerances.bound_slack,
            ..VerdictOptions::default()
        }
    }
}

fn default_step_size() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub label: String,
    #[serde(default = "default_step_size")]
    pub step_size: f64,
    pub coefficients: ContinuousModelSpec,
    pub responses: Responses,
    pub initial: State,
    /// Further initial conditions, used by `reproduce`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra_initial: Vec<State>,
    #[serde(default)]
    pub run: RunConfig,
}

impl ScenarioFile {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn read(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text).map_err(|e| match e {
            ScenarioError::Parse(msg) => ScenarioError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string(self).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    /// All initial conditions, the main one first.
    pub fn initial_conditions(&self) -> Vec<State> {
        std::iter::once(self.initial).chain(self.extra_initial.iter().copied()).collect()
    }

    /// Discretizes and validates; coefficients are certified over `run.n_steps`.
    pub fn to_scenario(&self) -> Result<Scenario, ScenarioError> {
        let scenario = self.to_scenario_unvalidated()?;
        scenario
            .validate(self.run.n_steps.max(1))
            .map_err(ScenarioError::Validation)?;
        Ok(scenario)
    }

    /// Like [`ScenarioFile::to_scenario`], but coefficients that only fail to be
    /// bounded away from zero (H2) are accepted; the report is returned instead.
    /// The stepper is well defined without H2.
    pub fn to_scenario_for_simulation(&self, horizon: usize) -> Result<(Scenario, Option<ValidationReport>), ScenarioError> {
        let scenario = self.to_scenario_unvalidated()?;
        match scenario.validate(horizon.max(1)) {
            Ok(()) => Ok((scenario, None)),
            Err(ModelError::Validation(report))
                if report.violations.iter().all(|v| v.hypothesis == Hypothesis::H2) =>
            {
                Ok((scenario, Some(report)))
            }
            Err(e) => Err(ScenarioError::Validation(e)),
        }
    }

    /// Discretizes without checking H1/H2.
    pub fn to_scenario_unvalidated(&self) -> Result<Scenario, ScenarioError> {
        let invalid = |msg: String| ScenarioError::Validation(ModelError::InvalidArgument(msg));
        let t = &self.run.tolerances;
        for (name, v) in [
            ("extinction", t.extinction),
            ("persistence", t.persistence),
            ("attractor", t.attractor),
            ("bound_slack", t.bound_slack),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("run.tolerances.{name} must be positive, got {v}")));
            }
        }
        if self.run.tail_window == 0 || self.run.scan_len == 0 {
            return Err(invalid("run.tail_window and run.scan_len must be positive".into()));
        }
        for x0 in &self.extra_initial {
            if !x0.is_nonnegative() {
                return Err(invalid(format!("extra initial condition {x0:?} is negative")));
            }
        }
        let coeffs = discretize_continuous(&self.coefficients, self.step_size).map_err(ScenarioError::Validation)?;
        Ok(Scenario {
            label: self.label.clone(),
            coeffs,
            f: self.responses.f.clone(),
            g: self.responses.g.clone(),
            initial: self.initial,
        })
    }
}

/// Reads, parses and validates a scenario file.
pub fn parse_scenario(path: &Path) -> Result<(ScenarioFile, Scenario), ScenarioError> {
    let file = ScenarioFile::read(path)?;
    let scenario = file.to_scenario()?;
    Ok((file, scenario))
}

/// `n,S,I,P` with 17 significant digits.
pub fn write_trajectory_csv(traj: &Trajectory, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "n,S,I,P")?;
    for (n, s) in traj.indexed() {
        writeln!(out, "{n},{:.16e},{:.16e},{:.16e}", s.s, s.i, s.p)?;
    }
    Ok(())
}

pub fn read_trajectory_csv(input: impl BufRead) -> Result<Trajectory, ScenarioError> {
    let mut start = None;
    let mut states = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line.map_err(|e| ScenarioError::Parse(e.to_string()))?;
        if lineno == 0 {
            if line.trim() != "n,S,I,P" {
                return Err(ScenarioError::Parse(format!("unexpected header {line:?}")));
            }
            continue;
        }
        let bad = || ScenarioError::Parse(format!("line {}: malformed row {line:?}", lineno + 1));
        let fields: Vec<&str> = line.split(',').collect();
        let [n, s, i, p] = fields[..] else {
            return Err(bad());
        };
        let n: usize = n.parse().map_err(|_| bad())?;
        let num = |v: &str| v.parse::<f64>().map_err(|_| bad());
        start.get_or_insert(n);
        states.push(State::new(num(s)?, num(i)?, num(p)?));
    }
    Ok(Trajectory {
        start: start.unwrap_or(0),
        states,
    })
}

/// `lambda,r_lower,r_upper`.
pub fn write_threshold_csv(report: &crate::thresholds::ThresholdReport, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "lambda,r_lower,r_upper")?;
    for e in &report.lambda_entries {
        writeln!(out, "{},{:.16e},{:.16e}", e.lambda, e.r_lower, e.r_upper)?;
    }
    Ok(())
}

/// `n,x,z` for a reference solution (`z` is 0 for one-dimensional systems).
pub fn write_reference_csv(reference: &crate::auxiliary::ReferenceSolution, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "n,x,z")?;
    for (j, [x, z]) in reference.values.iter().enumerate() {
        writeln!(out, "{},{x:.16e},{z:.16e}", reference.start + j)?;
    }
    Ok(())
}

pub fn write_json<T: Serialize>(value: &T, mut out: impl Write) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)
}

/// Summary written next to a simulated trajectory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub label: String,
    pub n_steps: usize,
    pub initial: State,
    pub final_state: State,
    pub min_infected: f64,
    pub max_total: f64,
}

impl RunSummary {
    pub fn new(label: &str, traj: &Trajectory) -> Self {
        let first = traj.states.first().copied().unwrap_or_default();
        RunSummary {
            label: label.to_string(),
            n_steps: traj.len().saturating_sub(1),
            initial: first,
            final_state: traj.last().copied().unwrap_or_default(),
            min_infected: traj.states.iter().map(|s| s.i).fold(f64::INFINITY, f64::min),
            max_total: traj.states.iter().map(State::total).fold(0.0, f64::max),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate;
    use crate::params::Clause;

    const MINIMAL: &str = r#"
label = "minimal"

[coefficients]
lambda = { kind = "constant", value = 0.3 }
mu = { kind = "constant", value = 0.1 }
a = { kind = "constant", value = 0.4 }
beta = { kind = "constant", value = 0.17 }
eta = { kind = "constant", value = 0.3 }
c = { kind = "constant", value = 0.18 }
r = { kind = "constant", value = 0.3 }
b = { kind = "constant", value = 0.2 }
gamma = { kind = "constant", value = 0.1 }
theta = { kind = "constant", value = 0.9 }

[responses]
f = { name = "linear_prey" }
g = { name = "linear_predator" }

[initial]
S = 0.8
I = 0.6
P = 0.1
"#;

    #[test]
    fn minimal_file_uses_defaults() {
        let file = ScenarioFile::parse(MINIMAL).unwrap();
        assert_eq!(file.step_size, 1.0);
        assert_eq!(file.run, RunConfig::default());
        let sc = file.to_scenario().unwrap();
        assert_eq!(sc.coeffs.at(7).beta, 0.17);
        assert!(sc.is_explicit());
    }

    #[test]
    fn unknown_key_is_named() {
        let text = MINIMAL.replace("[initial]", "alpha = 1.0\n\n[initial]");
        let err = ScenarioFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("alpha"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn zero_mortality_fails_h1() {
        let text = MINIMAL.replace(r#"mu = { kind = "constant", value = 0.1 }"#, r#"mu = { kind = "constant", value = 0.0 }"#);
        match ScenarioFile::parse(&text).unwrap().to_scenario() {
            Err(ScenarioError::Validation(ModelError::Validation(report))) => {
                assert!(report.fails(Hypothesis::H1, Clause::MuPositive));
                assert!(report.to_string().contains("H1"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn simulation_tolerates_h2_only() {
        let text = MINIMAL.replace(
            r#"lambda = { kind = "constant", value = 0.3 }"#,
            r#"lambda = { kind = "constant", value = 0.0 }"#,
        );
        let file = ScenarioFile::parse(&text).unwrap();
        assert!(file.to_scenario().is_err());
        let (_, report) = file.to_scenario_for_simulation(100).unwrap();
        assert!(report.unwrap().fails(Hypothesis::H2, Clause::AwayFromZero));
        let text = MINIMAL.replace(r#"mu = { kind = "constant", value = 0.1 }"#, r#"mu = { kind = "constant", value = 0.0 }"#);
        assert!(ScenarioFile::parse(&text).unwrap().to_scenario_for_simulation(100).is_err());
    }

    #[test]
    fn nonpositive_tolerance_rejected() {
        let text = format!("{MINIMAL}\n[run.tolerances]\nextinction = 0.0\n");
        assert!(matches!(
            ScenarioFile::parse(&text).unwrap().to_scenario(),
            Err(ScenarioError::Validation(_))
        ));
    }

    #[test]
    fn toml_round_trip() {
        let mut file = ScenarioFile::parse(MINIMAL).unwrap();
        file.extra_initial.push(State::new(0.1, 0.2, 0.30000000000000004));
        file.run.lambda_max = Some(12);
        let back = ScenarioFile::parse(&file.to_toml().unwrap()).unwrap();
        assert_eq!(back, file);
    }

    #[test]
    fn trajectory_csv_round_trip() {
        let sc = ScenarioFile::parse(MINIMAL).unwrap().to_scenario().unwrap();
        let t = simulate(&sc, 50).unwrap();
        let mut buf = Vec::new();
        write_trajectory_csv(&t, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().count(), 52);
        assert!(text.starts_with("n,S,I,P\n0,8.0000000000000004e-1,"));
        let back = read_trajectory_csv(&buf[..]).unwrap();
        assert_eq!(back, t);
    }
}
