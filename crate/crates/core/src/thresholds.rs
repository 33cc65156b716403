//! Extinction and persistence thresholds.
//!
//! Both thresholds are windowed products of the per-step growth factor of the
//! infected class evaluated along a reference solution:
//!
//! ```text
//! factor(k) = (1 + beta_k u_{k+1}) / (1 + c_k + eta_k g(u_k, 0, v_k))
//! R(lambda) = liminf / limsup over n of prod_{k=n}^{n+lambda} factor(k)
//! ```
//!
//! The lower threshold takes `(u, v)` from the uninfected prey/predator
//! attractor `(x*, z*)` and the liminf; the upper threshold takes `u = s*`
//! (prey alone), `v = y*` (predator alone) and the limsup. `R^u(lambda) < 1`
//! for some lambda means extinction of the infected prey, `R^l(lambda) > 1`
//! means strong persistence.
//!
//! The limits are replaced by min/max over a scan window after burn-in. With
//! periodic coefficients one period of window starts covers every phase.
//! Products are accumulated as sums of logarithms.

use serde::{Deserialize, Serialize};

use crate::auxiliary::{
    autonomous_fixed_point, find_attractor, AttractorOptions, AuxSystem, AuxVariant, ReferenceSolution,
    ReferenceSummary,
};
use crate::dynamics::{FunctionalResponse, Scenario};
use crate::error::{ModelError, Result};
use crate::params::{DiscreteCoefficients, StepCoefficients};

/// Margin around 1 inside which a threshold does not decide anything.
pub const CLASSIFICATION_TIE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThresholdKind {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Extinction,
    StrongPersistence,
    Inconclusive,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Extinction => "Extinction",
            Classification::StrongPersistence => "StrongPersistence",
            Classification::Inconclusive => "Inconclusive",
        })
    }
}

/// Reference solutions backing the two threshold kinds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ThresholdRefs {
    /// `(x*, z*)`, for the lower threshold.
    pub uninfected: Option<ReferenceSolution>,
    /// `s*`, for the upper threshold.
    pub prey: Option<ReferenceSolution>,
    /// `y*`, for the upper threshold.
    pub predator: Option<ReferenceSolution>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefSeeds {
    pub prey: f64,
    pub predator: f64,
    pub pair: [f64; 2],
}

impl Default for RefSeeds {
    fn default() -> Self {
        RefSeeds {
            prey: 1.0,
            predator: 1.0,
            pair: [1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdOptions {
    pub burn_in: usize,
    /// Window starts scanned when the coefficients are not periodic.
    pub scan_len: usize,
    pub tol: f64,
    pub seeds: RefSeeds,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        ThresholdOptions {
            burn_in: 5000,
            scan_len: 10_000,
            tol: 1e-8,
            seeds: RefSeeds::default(),
        }
    }
}

/// Window starts `start .. start + len` over which the liminf/limsup surrogate is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanWindow {
    pub start: usize,
    pub len: usize,
}

impl ScanWindow {
    /// One period when the coefficients are periodic, `scan_len` starts otherwise.
    pub fn for_coefficients(coeffs: &DiscreteCoefficients, burn_in: usize, scan_len: usize) -> Self {
        match coeffs.periodicity() {
            Some(p) => ScanWindow {
                start: burn_in.max(p.offset),
                len: p.period,
            },
            None => ScanWindow {
                start: burn_in,
                len: scan_len,
            },
        }
    }
}

/// Default largest window: four periods, or 40 for constant/aperiodic coefficients.
pub fn default_lambda_max(coeffs: &DiscreteCoefficients) -> usize {
    match coeffs.periodicity() {
        Some(p) if p.period > 1 => 4 * p.period,
        _ => 40,
    }
}

impl ThresholdRefs {
    /// Extracts all three reference solutions, long enough for windows up to `lambda_max`.
    pub fn compute(scenario: &Scenario, lambda_max: usize, opts: &ThresholdOptions) -> Result<Self> {
        let coeffs = &scenario.coeffs;
        let scan = ScanWindow::for_coefficients(coeffs, opts.burn_in, opts.scan_len);
        let base = AttractorOptions::for_coefficients(coeffs);
        let attractor = AttractorOptions {
            burn_in: scan.start,
            window: base.window.max(scan.len + lambda_max + 2),
            tol: opts.tol,
        };
        let seeds = opts.seeds;
        let prey = find_attractor(AuxSystem::Prey, coeffs, [seeds.prey, 0.0], &attractor)?;
        let predator = find_attractor(AuxSystem::Predator, coeffs, [seeds.predator, 0.0], &attractor)?;
        let uninfected = find_attractor(
            AuxSystem::Uninfected {
                f: &scenario.f,
                g: &scenario.g,
                variant: AuxVariant::Base,
            },
            coeffs,
            seeds.pair,
            &attractor,
        )?;
        let mut refs = ThresholdRefs {
            uninfected: Some(uninfected),
            prey: Some(prey),
            predator: Some(predator),
        };
        if coeffs.is_constant() {
            // Iterating a map with weak contraction (small mu) settles a few ulps
            // away from its equilibrium; use the exact equilibria instead.
            let k = coeffs.at(0);
            snap(&mut refs.prey, [k.lambda / k.mu, 0.0]);
            snap(&mut refs.predator, [k.r / k.b, 0.0]);
            if scenario.f.is_linear_prey() {
                let (x, z) = autonomous_fixed_point(&k);
                snap(&mut refs.uninfected, [x, z]);
            }
        }
        Ok(refs)
    }

    fn first_index(&self, kind: ThresholdKind) -> usize {
        match kind {
            ThresholdKind::Lower => self.uninfected.as_ref().map_or(0, |r| r.start),
            ThresholdKind::Upper => self
                .prey
                .as_ref()
                .map_or(0, |r| r.start)
                .max(self.predator.as_ref().map_or(0, |r| r.start)),
        }
    }

    pub fn summaries(&self) -> Vec<ReferenceSummary> {
        [&self.uninfected, &self.prey, &self.predator]
            .into_iter()
            .flatten()
            .map(ReferenceSolution::summary)
            .collect()
    }
}

/// Replaces a converged constant reference by `value` when they agree to its tolerance.
fn snap(reference: &mut Option<ReferenceSolution>, value: [f64; 2]) {
    if let Some(r) = reference {
        let close = r.values.iter().all(|v| (v[0] - value[0]).abs().max((v[1] - value[1]).abs()) <= r.tol);
        if close {
            r.values.iter_mut().for_each(|v| *v = value);
        }
    }
}

fn missing(what: &str) -> ModelError {
    ModelError::InvalidArgument(format!("threshold needs the {what} reference solution"))
}

/// The single multiplicative factor at index `k`.
pub fn threshold_factor(
    k: usize,
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    coeffs: &DiscreteCoefficients,
    g: &FunctionalResponse,
) -> Result<f64> {
    let c = coeffs.at(k);
    let (u, u_next, v) = match kind {
        ThresholdKind::Lower => {
            let pair = refs.uninfected.as_ref().ok_or_else(|| missing("uninfected pair"))?;
            let [x, z] = pair.at(k)?;
            (x, pair.value(k + 1)?, z)
        }
        ThresholdKind::Upper => {
            let prey = refs.prey.as_ref().ok_or_else(|| missing("prey"))?;
            let predator = refs.predator.as_ref().ok_or_else(|| missing("predator"))?;
            (prey.value(k)?, prey.value(k + 1)?, predator.value(k)?)
        }
    };
    Ok((1.0 + c.beta * u_next) / (1.0 + c.c + c.eta * g.eval(u, 0.0, v)))
}

fn log_factors(
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    coeffs: &DiscreteCoefficients,
    g: &FunctionalResponse,
    from: usize,
    count: usize,
) -> Result<Vec<f64>> {
    (from..from + count)
        .map(|k| threshold_factor(k, kind, refs, coeffs, g).map(f64::ln))
        .collect()
}

/// `R(lambda)`: min (lower) or max (upper) of the window products over the scan.
pub fn r_threshold(
    lambda: usize,
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    coeffs: &DiscreteCoefficients,
    g: &FunctionalResponse,
    scan: ScanWindow,
) -> Result<f64> {
    ln_r_threshold(lambda, kind, refs, coeffs, g, scan).map(f64::exp)
}

/// `ln R(lambda)`; stays finite where `R(lambda)` itself would under- or overflow.
pub fn ln_r_threshold(
    lambda: usize,
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    coeffs: &DiscreteCoefficients,
    g: &FunctionalResponse,
    scan: ScanWindow,
) -> Result<f64> {
    if scan.len == 0 {
        return Err(ModelError::InvalidArgument("empty scan window".into()));
    }
    let logs = log_factors(kind, refs, coeffs, g, scan.start, scan.len + lambda)?;
    let sums = (0..scan.len).map(|n| logs[n..=n + lambda].iter().sum::<f64>());
    Ok(match kind {
        ThresholdKind::Lower => sums.fold(f64::INFINITY, f64::min),
        ThresholdKind::Upper => sums.fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Product of the factors over one full period of the coefficients.
pub fn r_periodic(
    coeffs: &DiscreteCoefficients,
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    g: &FunctionalResponse,
) -> Result<f64> {
    let p = coeffs.periodicity().ok_or(ModelError::AperiodicInput)?;
    let omega = p.period;
    let first = refs.first_index(kind).max(p.offset);
    // same phase as k = 1 .. omega
    let k0 = first + (omega + 1 - first % omega) % omega;
    let logs = log_factors(kind, refs, coeffs, g, k0, omega)?;
    Ok(logs.iter().sum::<f64>().exp())
}

/// Closed-form thresholds for constant coefficients with `f = x`, `g = z`.
pub fn r_autonomous(k: &StepCoefficients, kind: ThresholdKind) -> f64 {
    match kind {
        ThresholdKind::Upper => (1.0 + k.beta * (k.lambda / k.mu)) / (1.0 + k.c + k.eta * (k.r / k.b)),
        ThresholdKind::Lower => {
            let (x, z) = autonomous_fixed_point(k);
            (1.0 + k.beta * x) / (1.0 + k.c + k.eta * z)
        }
    }
}

/// Threshold of the model without predation on susceptible prey (`a = 0`, `g = z`).
pub fn r_no_predation(
    lambda: usize,
    kind: ThresholdKind,
    refs: &ThresholdRefs,
    coeffs: &DiscreteCoefficients,
    scan: ScanWindow,
) -> Result<f64> {
    for k in 0..scan.start + scan.len + lambda + 1 {
        let a = coeffs.a.at(k);
        if a != 0.0 {
            return Err(ModelError::NonzeroPredation { index: k, value: a });
        }
    }
    r_threshold(lambda, kind, refs, coeffs, &FunctionalResponse::LinearPredator, scan)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LambdaEntry {
    pub lambda: usize,
    pub r_lower: f64,
    pub r_upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    /// Smallest lambda with `R^u(lambda) < 1`.
    pub extinction: Option<usize>,
    /// Smallest lambda with `R^l(lambda) > 1`.
    pub persistence: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KindPair {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub lambda_entries: Vec<LambdaEntry>,
    pub scan: ScanWindow,
    pub classification: Classification,
    pub witnesses: Witnesses,
    pub refs_meta: Vec<ReferenceSummary>,
    /// One-period products, when the coefficients are periodic.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub periodic: Option<KindPair>,
    /// Closed forms, when the coefficients are constant and the responses linear.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub autonomous: Option<KindPair>,
}

/// Applies the extinction and persistence criteria to a table of `(lambda, R^l, R^u)`.
pub fn classify(entries: &[LambdaEntry]) -> Result<(Classification, Witnesses)> {
    let witnesses = Witnesses {
        extinction: entries
            .iter()
            .find(|e| e.r_upper < 1.0 - CLASSIFICATION_TIE)
            .map(|e| e.lambda),
        persistence: entries
            .iter()
            .find(|e| e.r_lower > 1.0 + CLASSIFICATION_TIE)
            .map(|e| e.lambda),
    };
    let classification = match witnesses {
        Witnesses {
            extinction: Some(extinction_lambda),
            persistence: Some(persistence_lambda),
        } => {
            return Err(ModelError::InconsistentThresholds {
                extinction_lambda,
                persistence_lambda,
            })
        }
        Witnesses {
            extinction: Some(_), ..
        } => Classification::Extinction,
        Witnesses {
            persistence: Some(_), ..
        } => Classification::StrongPersistence,
        _ => Classification::Inconclusive,
    };
    Ok((classification, witnesses))
}

/// Evaluates both thresholds for `lambda = 0 ..= lambda_max` and classifies.
pub fn lambda_scan(
    scenario: &Scenario,
    lambda_max: usize,
    refs: &ThresholdRefs,
    scan: ScanWindow,
) -> Result<ThresholdReport> {
    if scan.len == 0 {
        return Err(ModelError::InvalidArgument("empty scan window".into()));
    }
    let coeffs = &scenario.coeffs;
    let count = scan.len + lambda_max;
    let lower_logs = log_factors(ThresholdKind::Lower, refs, coeffs, &scenario.g, scan.start, count)?;
    let upper_logs = log_factors(ThresholdKind::Upper, refs, coeffs, &scenario.g, scan.start, count)?;

    let mut lower = vec![f64::INFINITY; lambda_max + 1];
    let mut upper = vec![f64::NEG_INFINITY; lambda_max + 1];
    // Running sums in the same order as r_threshold, so the two agree bit for bit.
    for n in 0..scan.len {
        let (mut lo_acc, mut up_acc) = (0.0, 0.0);
        for lambda in 0..=lambda_max {
            lo_acc += lower_logs[n + lambda];
            up_acc += upper_logs[n + lambda];
            lower[lambda] = lower[lambda].min(lo_acc);
            upper[lambda] = upper[lambda].max(up_acc);
        }
    }
    let lambda_entries: Vec<LambdaEntry> = (0..=lambda_max)
        .map(|lambda| LambdaEntry {
            lambda,
            r_lower: lower[lambda].exp(),
            r_upper: upper[lambda].exp(),
        })
        .collect();
    let (classification, witnesses) = classify(&lambda_entries)?;

    let periodic = match coeffs.periodicity() {
        Some(_) => Some(KindPair {
            lower: r_periodic(coeffs, ThresholdKind::Lower, refs, &scenario.g)?,
            upper: r_periodic(coeffs, ThresholdKind::Upper, refs, &scenario.g)?,
        }),
        None => None,
    };
    let autonomous = (coeffs.is_constant() && scenario.is_explicit()).then(|| {
        let k = coeffs.at(0);
        KindPair {
            lower: r_autonomous(&k, ThresholdKind::Lower),
            upper: r_autonomous(&k, ThresholdKind::Upper),
        }
    });
    Ok(ThresholdReport {
        lambda_entries,
        scan,
        classification,
        witnesses,
        refs_meta: refs.summaries(),
        periodic,
        autonomous,
    })
}

/// Reference extraction followed by [`lambda_scan`].
pub fn analyze_thresholds(scenario: &Scenario, lambda_max: usize, opts: &ThresholdOptions) -> Result<ThresholdReport> {
    let refs = ThresholdRefs::compute(scenario, lambda_max, opts)?;
    let scan = ScanWindow::for_coefficients(&scenario.coeffs, opts.burn_in, opts.scan_len);
    lambda_scan(scenario, lambda_max, &refs, scan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::State;
    use crate::params::{CoefficientSequence, CoefficientSpec};
    use std::f64::consts::PI;

    fn autonomous(beta: f64) -> StepCoefficients {
        StepCoefficients {
            lambda: 0.3,
            mu: 0.1,
            a: 0.4,
            beta,
            eta: 0.3,
            c: 0.18,
            r: 0.3,
            b: 0.2,
            gamma: 0.1,
            theta: 0.9,
        }
    }

    fn scenario(coeffs: DiscreteCoefficients) -> Scenario {
        Scenario {
            label: "t".into(),
            coeffs,
            f: FunctionalResponse::LinearPrey,
            g: FunctionalResponse::LinearPredator,
            initial: State::new(0.8, 0.6, 0.1),
        }
    }

    fn periodic(beta0: f64, a: f64) -> DiscreteCoefficients {
        let mut k = autonomous(beta0);
        k.a = a;
        let mut c = DiscreteCoefficients::constant(k);
        c.beta = CoefficientSequence::new(CoefficientSpec::cosine(beta0, 0.7, PI / 5.0));
        c.eta = CoefficientSequence::new(CoefficientSpec::cosine(0.3, 0.7, PI / 5.0));
        c
    }

    #[test]
    fn upper_factor_autonomous() {
        let sc = scenario(DiscreteCoefficients::constant(autonomous(0.17)));
        let refs = ThresholdRefs::compute(&sc, 5, &ThresholdOptions::default()).unwrap();
        let f = threshold_factor(6000, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g).unwrap();
        assert!((f - 1.51 / 1.63).abs() < 1e-14);
    }

    #[test]
    fn factor_degenerate_cases() {
        let mut k = autonomous(0.0);
        let sc = scenario(DiscreteCoefficients::constant(k));
        let refs = ThresholdRefs::compute(&sc, 0, &ThresholdOptions::default()).unwrap();
        let f = threshold_factor(5000, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g).unwrap();
        assert!((f - 1.0 / (1.18 + 0.45)).abs() < 1e-14);

        k.beta = 0.5;
        k.eta = 0.0;
        k.c = 0.0;
        k.mu = 0.0;
        let sc = scenario(DiscreteCoefficients::constant(k));
        let prey = ReferenceSolution {
            kind: crate::auxiliary::ReferenceKind::Prey,
            start: 0,
            values: vec![[3.0, 0.0]; 4],
            burn_in: 0,
            detected_period: None,
            convergence_residual: 0.0,
            tol: 1e-8,
        };
        let predator = ReferenceSolution {
            kind: crate::auxiliary::ReferenceKind::Predator,
            values: vec![[1.5, 0.0]; 4],
            ..prey.clone()
        };
        let refs = ThresholdRefs {
            uninfected: None,
            prey: Some(prey),
            predator: Some(predator),
        };
        let f = threshold_factor(1, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g).unwrap();
        assert_eq!(f, 2.5);
        assert!(matches!(
            threshold_factor(3, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g),
            Err(ModelError::ReferenceWindowExhausted { index: 4, .. })
        ));
        assert!(threshold_factor(1, ThresholdKind::Lower, &refs, &sc.coeffs, &sc.g).is_err());
    }

    #[test]
    fn constant_coefficients_give_powers() {
        let sc = scenario(DiscreteCoefficients::constant(autonomous(0.17)));
        let opts = ThresholdOptions::default();
        let refs = ThresholdRefs::compute(&sc, 10, &opts).unwrap();
        let scan = ScanWindow::for_coefficients(&sc.coeffs, opts.burn_in, opts.scan_len);
        assert_eq!(scan.len, 1);
        let single = 1.51f64 / 1.63;
        for lambda in [0, 3, 10] {
            let r = r_threshold(lambda, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g, scan).unwrap();
            assert!((r - single.powi(lambda as i32 + 1)).abs() < 1e-13);
        }
        let r0 = r_threshold(0, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g, scan).unwrap();
        assert!((r0 - r_autonomous(&sc.coeffs.at(0), ThresholdKind::Upper)).abs() <= 1e-15);
    }

    #[test]
    fn periodic_upper_matches_brute_force() {
        let sc = scenario(periodic(0.17, 0.4));
        let refs = ThresholdRefs::compute(&sc, 9, &ThresholdOptions::default()).unwrap();
        let oracle: f64 = (1..=10)
            .map(|k| {
                let cs = (PI * k as f64 / 5.0).cos();
                (1.51 + 0.357 * cs) / (1.63 + 0.315 * cs)
            })
            .product();
        let r = r_periodic(&sc.coeffs, ThresholdKind::Upper, &refs, &sc.g).unwrap();
        assert!((r - oracle).abs() < 1e-12, "{r} vs {oracle}");
        assert!((r - 0.4436).abs() < 1e-3);
        let scan = ScanWindow::for_coefficients(&sc.coeffs, 5000, 10_000);
        let via_window = r_threshold(9, ThresholdKind::Upper, &refs, &sc.coeffs, &sc.g, scan).unwrap();
        assert!((via_window - r).abs() < 1e-12);
    }

    #[test]
    fn aperiodic_input_rejected() {
        let mut c = DiscreteCoefficients::constant(autonomous(0.17));
        c.beta = CoefficientSequence::new(CoefficientSpec::cosine(0.17, 0.5, 1.0));
        let sc = scenario(c);
        let refs = ThresholdRefs::default();
        assert!(matches!(
            r_periodic(&sc.coeffs, ThresholdKind::Upper, &refs, &sc.g),
            Err(ModelError::AperiodicInput)
        ));
    }

    #[test]
    fn autonomous_closed_forms() {
        assert!((r_autonomous(&autonomous(0.17), ThresholdKind::Upper) - 1.51 / 1.63).abs() < 1e-15);
        assert!((r_autonomous(&autonomous(2.2), ThresholdKind::Lower) - 1.1488).abs() < 1e-3);
        assert!(r_autonomous(&autonomous(0.0), ThresholdKind::Upper) < 1.0);
    }

    #[test]
    fn zero_transmission_is_extinction_at_lambda_zero() {
        let sc = scenario(DiscreteCoefficients::constant(autonomous(0.0)));
        let report = analyze_thresholds(&sc, 10, &ThresholdOptions::default()).unwrap();
        assert_eq!(report.classification, Classification::Extinction);
        assert_eq!(report.witnesses.extinction, Some(0));
        assert!(report.autonomous.is_some());
    }

    #[test]
    fn no_predation_needs_zero_a() {
        let sc = scenario(periodic(0.29, 0.4));
        let refs = ThresholdRefs::compute(&sc, 0, &ThresholdOptions::default()).unwrap();
        let scan = ScanWindow::for_coefficients(&sc.coeffs, 5000, 10_000);
        assert!(matches!(
            r_no_predation(0, ThresholdKind::Lower, &refs, &sc.coeffs, scan),
            Err(ModelError::NonzeroPredation { index: 0, .. })
        ));
    }

    #[test]
    fn no_predation_single_factor_peak() {
        let sc = scenario(periodic(0.29, 0.0));
        let refs = ThresholdRefs::compute(&sc, 0, &ThresholdOptions::default()).unwrap();
        let scan = ScanWindow::for_coefficients(&sc.coeffs, 5000, 10_000);
        // upper kind maximizes: cosine peak c = 1
        let peak = r_no_predation(0, ThresholdKind::Upper, &refs, &sc.coeffs, scan).unwrap();
        assert!((peak - (1.87 + 0.609) / (1.63 + 0.315)).abs() < 1e-12);
        assert!((peak - 1.2746).abs() < 1e-4);
    }

    #[test]
    fn classification_rules() {
        let e = |lambda, r_lower, r_upper| LambdaEntry { lambda, r_lower, r_upper };
        assert_eq!(classify(&[e(0, 0.5, 0.9)]).unwrap().0, Classification::Extinction);
        assert_eq!(classify(&[e(0, 1.2, 1.5)]).unwrap().0, Classification::StrongPersistence);
        assert_eq!(classify(&[e(0, 0.9, 1.1)]).unwrap().0, Classification::Inconclusive);
        // ties at the boundary are not decisive
        assert_eq!(classify(&[e(0, 1.0 + 1e-10, 1.0 - 1e-10)]).unwrap().0, Classification::Inconclusive);
        assert!(matches!(
            classify(&[e(0, 0.5, 0.9), e(1, 1.2, 1.5)]),
            Err(ModelError::InconsistentThresholds { extinction_lambda: 0, persistence_lambda: 1 })
        ));
    }
}
