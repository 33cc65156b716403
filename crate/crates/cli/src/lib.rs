//! Commands behind the `ecoepi` binary.
//!
//! Exit status: 0 success, 1 usage or parse error, 2 validation error,
//! 3 numerical failure.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use ecoepi_core::analysis::{check_attractivity, verdict_report, VerdictReport};
use ecoepi_core::auxiliary::DiseaseFreeReference;
use ecoepi_core::hypotheses::{check_hypotheses, format_table, HypothesisOptions};
use ecoepi_core::io::{
    write_json, write_threshold_csv, write_trajectory_csv, RunSummary, ScenarioError, ScenarioFile,
};
use ecoepi_core::presets::{self, ATTRACTIVITY_STEPS, TRAJECTORY_STEPS};
use ecoepi_core::thresholds::{analyze_thresholds, default_lambda_max, ThresholdReport};
use ecoepi_core::{simulate_from, ModelError, Scenario, Trajectory};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        let code = match e {
            ModelError::InvalidStepSize(_)
            | ModelError::InvalidCoefficient { .. }
            | ModelError::InvalidResponse { .. }
            | ModelError::Validation(_)
            | ModelError::PreconditionViolation(_) => EXIT_VALIDATION,
            ModelError::InvalidArgument(_) => EXIT_USAGE,
            _ => EXIT_NUMERICAL,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Validation(m) => CliError {
                code: EXIT_VALIDATION,
                message: format!("invalid scenario: {m}"),
            },
            other => CliError::usage(other.to_string()),
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> CliError {
    CliError::usage(format!("cannot write {}: {e}", path.display()))
}

pub type CliResult<T = ()> = Result<T, CliError>;

/// A scenario file path, or the name of a built-in preset.
pub fn load_file(arg: &str) -> CliResult<ScenarioFile> {
    let path = Path::new(arg);
    if path.exists() {
        Ok(ScenarioFile::read(path)?)
    } else if let Some(p) = presets::preset(arg) {
        Ok(p.file()?)
    } else {
        Err(CliError::usage(format!(
            "{arg}: no such file or preset (presets: {})",
            presets::preset_names().collect::<Vec<_>>().join(", ")
        )))
    }
}

pub fn load_scenario(arg: &str) -> CliResult<(ScenarioFile, Scenario)> {
    let file = load_file(arg)?;
    let scenario = file.to_scenario()?;
    Ok((file, scenario))
}

fn create(path: &Path) -> CliResult<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| io_error(path, e))
}

fn write_file(path: &Path, body: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult {
    let mut w = create(path)?;
    body(&mut w).and_then(|_| w.flush()).map_err(|e| io_error(path, e))
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

/// Simulates and writes `<out>` (CSV) and `<out>.json` (run summary).
/// Coefficients that only violate H2 are simulated with a warning on `stderr`.
pub fn cmd_simulate(
    scenario_arg: &str,
    steps: Option<usize>,
    out: &Path,
    stdout: &mut impl Write,
    stderr: &mut impl Write,
) -> CliResult {
    let file = load_file(scenario_arg)?;
    let n_steps = steps.unwrap_or(file.run.n_steps);
    let (scenario, h2) = file.to_scenario_for_simulation(n_steps)?;
    if let Some(report) = h2 {
        writeln!(stderr, "warning: {report}").map_err(|e| io_error(out, e))?;
    }
    let traj = simulate_from(&scenario, 0, scenario.initial, n_steps)?;
    write_file(out, |w| write_trajectory_csv(&traj, w))?;
    let summary_path = with_extension(out, "json");
    write_file(&summary_path, |w| write_json(&RunSummary::new(&scenario.label, &traj), w))?;
    writeln!(stdout, "{} steps written to {}", n_steps, out.display()).map_err(|e| io_error(out, e))?;
    Ok(())
}

fn thresholds_for(file: &ScenarioFile, scenario: &Scenario, lambda_max: Option<usize>) -> CliResult<ThresholdReport> {
    let lambda_max = lambda_max
        .or(file.run.lambda_max)
        .unwrap_or_else(|| default_lambda_max(&scenario.coeffs));
    Ok(analyze_thresholds(scenario, lambda_max, &file.run.threshold_options())?)
}

/// Writes the threshold report to `<out>` (JSON) and `<out>.csv`; prints the classification.
pub fn cmd_thresholds(
    scenario_arg: &str,
    lambda_max: Option<usize>,
    out: &Path,
    stdout: &mut impl Write,
) -> CliResult {
    let (file, scenario) = load_scenario(scenario_arg)?;
    let report = thresholds_for(&file, &scenario, lambda_max)?;
    write_file(out, |w| write_json(&report, w))?;
    write_file(&with_extension(out, "csv"), |w| write_threshold_csv(&report, w))?;
    let witness = match (report.witnesses.extinction, report.witnesses.persistence) {
        (Some(l), _) => format!(" (R^u({l}) < 1)"),
        (_, Some(l)) => format!(" (R^l({l}) > 1)"),
        _ => String::new(),
    };
    writeln!(stdout, "{}{witness}", report.classification).map_err(|e| io_error(out, e))?;
    Ok(())
}

/// Outcome of `reproduce`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reproduction {
    pub report: ThresholdReport,
    pub verdicts: Vec<VerdictReport>,
    pub pass: bool,
}

/// Runs one worked example end to end and writes everything into `out_dir`.
pub fn cmd_reproduce(name: &str, out_dir: &Path, stdout: &mut impl Write) -> CliResult<Reproduction> {
    let preset = presets::preset(name).ok_or_else(|| {
        CliError::usage(format!(
            "unknown preset {name:?} (presets: {})",
            presets::preset_names().collect::<Vec<_>>().join(", ")
        ))
    })?;
    let file = preset.file()?;
    let scenario = file.to_scenario()?;
    let initials = file.initial_conditions();
    let extinct = preset.expected == ecoepi_core::Classification::Extinction;
    let check_attractivity_too = preset.is_no_predation() && extinct;
    let steps = if check_attractivity_too {
        ATTRACTIVITY_STEPS
    } else {
        TRAJECTORY_STEPS
    };

    let runs: Vec<Result<Trajectory, ModelError>> = std::thread::scope(|s| {
        let handles: Vec<_> = initials
            .iter()
            .map(|&x0| {
                let scenario = &scenario;
                s.spawn(move || simulate_from(scenario, 0, x0, steps))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("simulation thread panicked")).collect()
    });
    let long: Vec<Trajectory> = runs.into_iter().collect::<Result<_, _>>()?;
    // plotted data and verdicts use the first TRAJECTORY_STEPS steps
    let trajs: Vec<Trajectory> = long
        .iter()
        .map(|t| Trajectory {
            start: t.start,
            states: t.states[..=TRAJECTORY_STEPS].to_vec(),
        })
        .collect();

    std::fs::create_dir_all(out_dir).map_err(|e| io_error(out_dir, e))?;
    for (j, t) in trajs.iter().enumerate() {
        let path = out_dir.join(format!("trajectory-{}.csv", j + 1));
        write_file(&path, |w| write_trajectory_csv(t, w))?;
    }

    let report = thresholds_for(&file, &scenario, None)?;
    write_file(&out_dir.join("thresholds.json"), |w| write_json(&report, w))?;
    write_file(&out_dir.join("thresholds.csv"), |w| write_threshold_csv(&report, w))?;

    let opts = file.run.verdict_options();
    let mut verdicts = trajs
        .iter()
        .map(|t| verdict_report(&scenario, t, &opts))
        .collect::<Result<Vec<_>, _>>()?;
    let attractivity = if check_attractivity_too {
        let reference = DiseaseFreeReference::new(&scenario.coeffs, 0, ATTRACTIVITY_STEPS);
        let a = check_attractivity(&scenario, &long, &reference, opts.extinction_tol)?;
        for v in &mut verdicts {
            v.attractivity = Some(a.attractive);
        }
        Some(a)
    } else {
        None
    };
    write_file(&out_dir.join("verdicts.json"), |w| {
        write_json(
            &serde_json::json!({
                "preset": preset.name,
                "expected": preset.expected,
                "classification": report.classification,
                "verdicts": verdicts,
                "attractivity": attractivity.as_ref().map(|a| serde_json::json!({
                    "attractive": a.attractive,
                    "distances": a.distances,
                    "pairwise": a.pairwise,
                })),
            }),
            w,
        )
    })?;

    // persistent tails should repeat with the period of the coefficients
    let period = scenario.coeffs.periodicity().map_or(1, |p| p.period);
    let concordant = verdicts
        .iter()
        .filter(|v| v.extinction == extinct && v.persistence == !extinct)
        .filter(|v| extinct || v.tail_period.is_some_and(|p| period % p == 0))
        .count();
    let attractive = attractivity.as_ref().is_none_or(|a| a.attractive);
    let pass = report.classification == preset.expected && concordant == verdicts.len() && attractive;
    writeln!(
        stdout,
        "{}: {} (expected {}), verdicts concordant on {}/{} initial conditions{}: {}",
        preset.name,
        report.classification,
        preset.expected,
        concordant,
        verdicts.len(),
        match &attractivity {
            Some(a) => format!(", attractive = {}", a.attractive),
            None => String::new(),
        },
        if pass { "PASS" } else { "FAIL" }
    )
    .map_err(|e| io_error(out_dir, e))?;
    Ok(Reproduction {
        report,
        verdicts,
        pass,
    })
}

/// Prints the H1-H9 table.
pub fn cmd_check(scenario_arg: &str, stdout: &mut impl Write) -> CliResult {
    let file = load_file(scenario_arg)?;
    // H1/H2 failures are table entries here, not errors
    let scenario = file.to_scenario_unvalidated()?;
    let opts = HypothesisOptions {
        horizon: file.run.n_steps.max(1),
        ..HypothesisOptions::default()
    };
    let rows = check_hypotheses(&scenario, &file.initial_conditions(), &opts);
    write!(stdout, "{}", format_table(&rows)).map_err(|e| CliError::usage(e.to_string()))?;
    Ok(())
}
