//! Time-varying model coefficients, the nonstandard discretization of the
//! continuous model, and the standing hypotheses on the coefficient sequences.
//!
//! A coefficient is described by a [`CoefficientSpec`] over continuous time.
//! Discretizing with step `h` turns each rate coefficient `xi(t)` into the
//! sequence `xi_n = h * xi(n h)` and each conversion fraction `zeta(t)` into
//! `zeta_n = zeta(n h)`. With `h = 1` the sequences are the specs evaluated at
//! integer times, which is how all bundled presets are built.

use std::f64::consts::TAU;
use std::fmt;
use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{ModelError, Result};

/// How a finite table of samples is continued past its last entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Extension {
    HoldLast,
    PeriodicWrap,
}

/// One coefficient as a function of (continuous) time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoefficientSpec {
    Constant {
        value: f64,
    },
    /// `base * (1 + amplitude * cos(frequency * t))`.
    Cosine {
        base: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// Piecewise-constant samples at unit spacing: `values[floor(t)]`.
    Table { values: Vec<f64>, extend: Extension },
}

impl CoefficientSpec {
    pub fn constant(value: f64) -> Self {
        CoefficientSpec::Constant { value }
    }

    pub fn cosine(base: f64, amplitude: f64, frequency: f64) -> Self {
        CoefficientSpec::Cosine {
            base,
            amplitude,
            frequency,
        }
    }

    pub fn table(values: Vec<f64>, extend: Extension) -> Self {
        CoefficientSpec::Table { values, extend }
    }

    /// Structural checks that do not depend on a horizon.
    pub fn validate(&self, name: &str) -> Result<()> {
        let bad = |reason: &str| {
            Err(ModelError::InvalidCoefficient {
                name: name.to_string(),
                reason: reason.to_string(),
            })
        };
        match self {
            CoefficientSpec::Constant { value } if !value.is_finite() => bad("value is not finite"),
            CoefficientSpec::Cosine {
                base,
                amplitude,
                frequency,
            } if !(base.is_finite() && amplitude.is_finite() && frequency.is_finite()) => {
                bad("cosine parameters must be finite")
            }
            CoefficientSpec::Table { values, .. } if values.is_empty() => bad("table is empty"),
            CoefficientSpec::Table { values, .. } if values.iter().any(|v| !v.is_finite()) => {
                bad("table contains a non-finite value")
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            CoefficientSpec::Constant { value } => *value,
            CoefficientSpec::Cosine {
                base,
                amplitude,
                frequency,
            } => base * (1.0 + amplitude * (frequency * t).cos()),
            CoefficientSpec::Table { values, extend } => {
                let i = t.max(0.0).floor() as usize;
                match extend {
                    Extension::HoldLast => values[i.min(values.len() - 1)],
                    Extension::PeriodicWrap => values[i % values.len()],
                }
            }
        }
    }

    pub fn is_constant(&self) -> bool {
        match self {
            CoefficientSpec::Constant { .. } => true,
            CoefficientSpec::Cosine {
                base,
                amplitude,
                frequency,
            } => *base == 0.0 || *amplitude == 0.0 || *frequency == 0.0,
            CoefficientSpec::Table { values, .. } => values.windows(2).all(|w| w[0] == w[1]),
        }
    }
}

/// Eventual periodicity of a sequence: `x_{n+period} = x_n` for `n >= offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Periodicity {
    pub period: usize,
    pub offset: usize,
}

impl Periodicity {
    pub const CONSTANT: Periodicity = Periodicity {
        period: 1,
        offset: 0,
    };

    fn combine(self, other: Periodicity) -> Periodicity {
        Periodicity {
            period: lcm(self.period, other.period),
            offset: self.offset.max(other.offset),
        }
    }
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn lcm(a: usize, b: usize) -> usize {
    a / gcd(a, b) * b
}

/// Returns `Some(k)` when `x` is within relative 1e-9 of a positive integer `k`.
fn near_integer(x: f64) -> Option<usize> {
    let k = x.round();
    if k >= 1.0 && (x - k).abs() <= 1e-9 * k {
        Some(k as usize)
    } else {
        None
    }
}

/// A discrete coefficient sequence: `x_n = scale * spec(n * step)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    pub spec: CoefficientSpec,
    pub scale: f64,
    pub step: f64,
}

impl CoefficientSequence {
    /// The spec sampled at integer times, unscaled.
    pub fn new(spec: CoefficientSpec) -> Self {
        CoefficientSequence {
            spec,
            scale: 1.0,
            step: 1.0,
        }
    }

    pub fn constant(value: f64) -> Self {
        Self::new(CoefficientSpec::constant(value))
    }

    #[inline]
    pub fn at(&self, n: usize) -> f64 {
        self.scale * self.spec.eval(n as f64 * self.step)
    }

    pub fn periodicity(&self) -> Option<Periodicity> {
        if self.scale == 0.0 || self.spec.is_constant() {
            return Some(Periodicity::CONSTANT);
        }
        match &self.spec {
            CoefficientSpec::Constant { .. } => Some(Periodicity::CONSTANT),
            CoefficientSpec::Cosine { frequency, .. } => {
                near_integer(TAU / (frequency.abs() * self.step)).map(|period| Periodicity {
                    period,
                    offset: 0,
                })
            }
            CoefficientSpec::Table { values, extend } => {
                let len = values.len() as f64;
                match extend {
                    Extension::HoldLast => Some(Periodicity {
                        period: 1,
                        offset: ((len - 1.0) / self.step).ceil() as usize,
                    }),
                    // Periodic only when the sampling grid is commensurate with unit spacing.
                    Extension::PeriodicWrap => {
                        let period = if self.step == self.step.round() {
                            values.len() / gcd(values.len(), self.step as usize)
                        } else {
                            values.len() * near_integer(1.0 / self.step)?
                        };
                        Some(Periodicity { period, offset: 0 })
                    }
                }
            }
        }
    }
}

/// The ten coefficient values at one step index.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepCoefficients {
    pub lambda: f64,
    pub mu: f64,
    pub a: f64,
    pub beta: f64,
    pub eta: f64,
    pub c: f64,
    pub r: f64,
    pub b: f64,
    pub gamma: f64,
    pub theta: f64,
}

impl StepCoefficients {
    pub fn to_array(&self) -> [f64; 10] {
        [
            self.lambda,
            self.mu,
            self.a,
            self.beta,
            self.eta,
            self.c,
            self.r,
            self.b,
            self.gamma,
            self.theta,
        ]
    }

    pub fn from_array(v: [f64; 10]) -> Self {
        StepCoefficients {
            lambda: v[0],
            mu: v[1],
            a: v[2],
            beta: v[3],
            eta: v[4],
            c: v[5],
            r: v[6],
            b: v[7],
            gamma: v[8],
            theta: v[9],
        }
    }
}

pub const COEFFICIENT_NAMES: [&str; 10] = [
    "lambda", "mu", "a", "beta", "eta", "c", "r", "b", "gamma", "theta",
];

/// Infima and suprema of every coefficient over a finite index range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoefficientBounds {
    pub lower: StepCoefficients,
    pub upper: StepCoefficients,
}

/// The ten discrete coefficient sequences of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCoefficients {
    pub lambda: CoefficientSequence,
    pub mu: CoefficientSequence,
    pub a: CoefficientSequence,
    pub beta: CoefficientSequence,
    pub eta: CoefficientSequence,
    pub c: CoefficientSequence,
    pub r: CoefficientSequence,
    pub b: CoefficientSequence,
    pub gamma: CoefficientSequence,
    pub theta: CoefficientSequence,
}

impl DiscreteCoefficients {
    /// All ten sequences constant.
    pub fn constant(k: StepCoefficients) -> Self {
        let [lambda, mu, a, beta, eta, c, r, b, gamma, theta] =
            k.to_array().map(CoefficientSequence::constant);
        DiscreteCoefficients {
            lambda,
            mu,
            a,
            beta,
            eta,
            c,
            r,
            b,
            gamma,
            theta,
        }
    }

    pub fn sequences(&self) -> [(&'static str, &CoefficientSequence); 10] {
        [
            ("lambda", &self.lambda),
            ("mu", &self.mu),
            ("a", &self.a),
            ("beta", &self.beta),
            ("eta", &self.eta),
            ("c", &self.c),
            ("r", &self.r),
            ("b", &self.b),
            ("gamma", &self.gamma),
            ("theta", &self.theta),
        ]
    }

    #[inline]
    pub fn at(&self, n: usize) -> StepCoefficients {
        StepCoefficients {
            lambda: self.lambda.at(n),
            mu: self.mu.at(n),
            a: self.a.at(n),
            beta: self.beta.at(n),
            eta: self.eta.at(n),
            c: self.c.at(n),
            r: self.r.at(n),
            b: self.b.at(n),
            gamma: self.gamma.at(n),
            theta: self.theta.at(n),
        }
    }

    /// Common eventual period of all ten sequences, if every one is eventually periodic.
    pub fn periodicity(&self) -> Option<Periodicity> {
        self.sequences()
            .iter()
            .try_fold(Periodicity::CONSTANT, |acc, (_, s)| {
                s.periodicity().map(|p| acc.combine(p))
            })
    }

    pub fn is_constant(&self) -> bool {
        self.sequences().iter().all(|(_, s)| s.spec.is_constant())
    }

    pub fn bounds(&self, range: RangeInclusive<usize>) -> CoefficientBounds {
        let mut lo = [f64::INFINITY; 10];
        let mut hi = [f64::NEG_INFINITY; 10];
        for n in range {
            for (j, v) in self.at(n).to_array().into_iter().enumerate() {
                lo[j] = lo[j].min(v);
                hi[j] = hi[j].max(v);
            }
        }
        CoefficientBounds {
            lower: StepCoefficients::from_array(lo),
            upper: StepCoefficients::from_array(hi),
        }
    }
}

/// The continuous-time model: ten coefficient functions and a step size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContinuousModelSpec {
    pub lambda: CoefficientSpec,
    pub mu: CoefficientSpec,
    pub a: CoefficientSpec,
    pub beta: CoefficientSpec,
    pub eta: CoefficientSpec,
    pub c: CoefficientSpec,
    pub r: CoefficientSpec,
    pub b: CoefficientSpec,
    /// May be omitted when there is no predation on susceptible prey.
    #[serde(default = "zero_spec")]
    pub gamma: CoefficientSpec,
    pub theta: CoefficientSpec,
}

fn zero_spec() -> CoefficientSpec {
    CoefficientSpec::constant(0.0)
}

impl ContinuousModelSpec {
    pub fn specs(&self) -> [(&'static str, &CoefficientSpec); 10] {
        [
            ("lambda", &self.lambda),
            ("mu", &self.mu),
            ("a", &self.a),
            ("beta", &self.beta),
            ("eta", &self.eta),
            ("c", &self.c),
            ("r", &self.r),
            ("b", &self.b),
            ("gamma", &self.gamma),
            ("theta", &self.theta),
        ]
    }
}

/// Nonstandard discretization with step `h`: the eight rates are scaled by `h`,
/// the conversion fractions `gamma` and `theta` are only sampled.
pub fn discretize_continuous(spec: &ContinuousModelSpec, h: f64) -> Result<DiscreteCoefficients> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(ModelError::InvalidStepSize(h));
    }
    for (name, s) in spec.specs() {
        s.validate(name)?;
    }
    let rate = |s: &CoefficientSpec| CoefficientSequence {
        spec: s.clone(),
        scale: h,
        step: h,
    };
    let fraction = |s: &CoefficientSpec| CoefficientSequence {
        spec: s.clone(),
        scale: 1.0,
        step: h,
    };
    Ok(DiscreteCoefficients {
        lambda: rate(&spec.lambda),
        mu: rate(&spec.mu),
        a: rate(&spec.a),
        beta: rate(&spec.beta),
        eta: rate(&spec.eta),
        c: rate(&spec.c),
        r: rate(&spec.r),
        b: rate(&spec.b),
        gamma: fraction(&spec.gamma),
        theta: fraction(&spec.theta),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Hypothesis {
    H1,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// Non-finite values stand in for unboundedness on a finite horizon.
    Bounded,
    Nonnegative,
    MuPositive,
    MuAtMostC,
    AwayFromZero,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Clause::Bounded => "bounded",
            Clause::Nonnegative => "nonnegative",
            Clause::MuPositive => "0 < mu_n",
            Clause::MuAtMostC => "mu_n <= c_n",
            Clause::AwayFromZero => "bounded away from zero",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub hypothesis: Hypothesis,
    pub clause: Clause,
    pub coefficient: &'static str,
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub horizon: usize,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn fails(&self, hypothesis: Hypothesis, clause: Clause) -> bool {
        self.violations
            .iter()
            .any(|v| v.hypothesis == hypothesis && v.clause == clause)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.passes() {
            return write!(f, "H1 and H2 hold on [0, {}]", self.horizon);
        }
        let parts: Vec<String> = self
            .violations
            .iter()
            .map(|v| {
                format!(
                    "{:?} ({}) fails for {} at n = {} (value {})",
                    v.hypothesis, v.clause, v.coefficient, v.index, v.value
                )
            })
            .collect();
        f.write_str(&parts.join("; "))
    }
}

/// Certifies H1 and H2 on `[0, horizon]`, reporting the first offending index per clause.
pub fn validate_h1_h2(coeffs: &DiscreteCoefficients, horizon: usize) -> ValidationReport {
    let mut violations = Vec::new();
    let mut record = |hypothesis, clause, coefficient, index, value| {
        if !violations
            .iter()
            .any(|v: &Violation| v.clause == clause && v.coefficient == coefficient)
        {
            violations.push(Violation {
                hypothesis,
                clause,
                coefficient,
                index,
                value,
            });
        }
    };
    for n in 0..=horizon {
        let k = coeffs.at(n);
        for (name, v) in COEFFICIENT_NAMES.iter().zip(k.to_array()) {
            if !v.is_finite() {
                record(Hypothesis::H1, Clause::Bounded, name, n, v);
            } else if v < 0.0 && *name != "mu" {
                record(Hypothesis::H1, Clause::Nonnegative, name, n, v);
            }
        }
        if k.mu.is_nan() || k.mu <= 0.0 {
            record(Hypothesis::H1, Clause::MuPositive, "mu", n, k.mu);
        }
        if k.mu > k.c {
            record(Hypothesis::H1, Clause::MuAtMostC, "mu", n, k.mu);
        }
        for (name, v) in [("lambda", k.lambda), ("r", k.r), ("b", k.b)] {
            if v.is_nan() || v <= 0.0 {
                record(Hypothesis::H2, Clause::AwayFromZero, name, n, v);
            }
        }
    }
    ValidationReport {
        horizon,
        violations,
    }
}

/// Numerical certificate for H4 and the geometric decay bound it implies:
/// `prod_{k=m}^{n-1} 1/(1+mu_k) <= k_const * decay_rate^(n-m)` on the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct H4Certificate {
    pub holds: bool,
    pub window: usize,
    pub k_const: f64,
    pub decay_rate: f64,
    pub horizon: usize,
    /// Largest window product `prod_{k=n}^{n+window} 1/(1+mu_k)` over the tail.
    pub max_window_product: f64,
}

/// Relative slack on `k_const` covering rounding in the prefix sums.
const H4_K_SLACK: f64 = 1e-10;

/// Checks H4 with the given window on `[0, horizon]`.
///
/// The tail is the second half of the horizon. The decay rate is taken from
/// the worst window product, `K` is the smallest constant making the bound
/// hold for every `m < n <= horizon`.
pub fn check_h4(coeffs: &DiscreteCoefficients, window: usize, horizon: usize) -> Result<H4Certificate> {
    if window == 0 || horizon < window {
        return Err(ModelError::InvalidArgument(format!(
            "check_h4 needs window >= 1 and horizon >= window (got {window}, {horizon})"
        )));
    }
    // prefix[j] = sum_{k<j} ln(1 + mu_k), j = 0..=horizon+1
    let mut prefix = Vec::with_capacity(horizon + 2);
    prefix.push(0.0);
    let mut acc = 0.0;
    for k in 0..=horizon {
        acc += coeffs.mu.at(k).ln_1p();
        prefix.push(acc);
    }
    let last = horizon - window;
    let tail_start = (horizon / 2).min(last);
    let max_log = (tail_start..=last)
        .map(|n| -(prefix[n + window + 1] - prefix[n]))
        .fold(f64::NEG_INFINITY, f64::max);
    let max_window_product = max_log.exp();
    let holds = max_window_product < 1.0;
    let log_decay = max_log / (window + 1) as f64;
    let decay_rate = log_decay.exp();

    // max over m < n of D[n] - D[m], D[j] = -prefix[j] - j ln(decay)
    let d = |j: usize| -prefix[j] - j as f64 * log_decay;
    let mut best = f64::NEG_INFINITY;
    let mut min_d = d(0);
    for n in 1..=horizon {
        let dn = d(n);
        best = best.max(dn - min_d);
        min_d = min_d.min(dn);
    }
    let k_const = best.exp() * (1.0 + H4_K_SLACK);

    Ok(H4Certificate {
        holds,
        window,
        k_const,
        decay_rate,
        horizon,
        max_window_product,
    })
}
