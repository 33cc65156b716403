#![allow(dead_code)]

use std::f64::consts::PI;

use ecoepi_core::dynamics::{FunctionalResponse, Scenario, State};
use ecoepi_core::params::{discretize_continuous, CoefficientSpec, ContinuousModelSpec, DiscreteCoefficients, StepCoefficients};
use proptest::prelude::*;

/// Constant or cosine-modulated coefficient with an integer period.
pub fn coefficient(lo: f64, hi: f64) -> impl Strategy<Value = CoefficientSpec> {
    prop_oneof![
        (lo..=hi).prop_map(CoefficientSpec::constant),
        (lo..=hi, 0.0..0.9f64, 2usize..13).prop_map(|(base, amp, period)| CoefficientSpec::cosine(
            base,
            amp,
            2.0 * PI / period as f64
        )),
    ]
}

pub fn positive_coefficient(lo: f64, hi: f64) -> impl Strategy<Value = CoefficientSpec> {
    coefficient(lo, hi)
}

/// Stays above 0.9, which exceeds every mortality `mu` drawn below (H1 needs `mu <= c`).
pub fn cure_rate() -> impl Strategy<Value = CoefficientSpec> {
    prop_oneof![
        (0.9..=2.0f64).prop_map(CoefficientSpec::constant),
        (1.3..=2.0f64, 0.0..0.3f64, 2usize..13)
            .prop_map(|(base, amp, period)| CoefficientSpec::cosine(base, amp, 2.0 * PI / period as f64)),
    ]
}

pub fn nonnegative_coefficient(hi: f64) -> impl Strategy<Value = CoefficientSpec> {
    prop_oneof![Just(CoefficientSpec::constant(0.0)), coefficient(0.0, hi)]
}

/// Coefficient functions satisfying H1/H2.
pub fn admissible_spec() -> impl Strategy<Value = ContinuousModelSpec> {
    (
        (
            positive_coefficient(0.05, 1.0),
            positive_coefficient(0.02, 0.45),
            nonnegative_coefficient(1.0),
            nonnegative_coefficient(3.0),
            nonnegative_coefficient(1.0),
        ),
        (
            cure_rate(),
            positive_coefficient(0.05, 1.0),
            positive_coefficient(0.05, 1.0),
            nonnegative_coefficient(1.0),
            nonnegative_coefficient(1.0),
        ),
    )
        .prop_map(|((lambda, mu, a, beta, eta), (c, r, b, gamma, theta))| ContinuousModelSpec {
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
        })
}

pub fn admissible_coefficients() -> impl Strategy<Value = DiscreteCoefficients> {
    admissible_spec().prop_map(|s| discretize_continuous(&s, 1.0).unwrap())
}

pub fn prey_response() -> impl Strategy<Value = FunctionalResponse> {
    prop_oneof![
        Just(FunctionalResponse::LinearPrey),
        (0.1..3.0f64).prop_map(|m| FunctionalResponse::Holling2Prey { m }),
    ]
}

pub fn predator_response() -> impl Strategy<Value = FunctionalResponse> {
    prop_oneof![
        Just(FunctionalResponse::LinearPredator),
        (0.1..3.0f64).prop_map(|q| FunctionalResponse::RatioModified { q }),
    ]
}

pub fn positive_state() -> impl Strategy<Value = State> {
    (0.01..5.0f64, 0.01..5.0f64, 0.01..5.0f64).prop_map(|(s, i, p)| State::new(s, i, p))
}

pub fn admissible_scenario() -> impl Strategy<Value = Scenario> {
    (admissible_coefficients(), prey_response(), predator_response(), positive_state()).prop_map(
        |(coeffs, f, g, initial)| Scenario {
            label: "random".into(),
            coeffs,
            f,
            g,
            initial,
        },
    )
}

/// Parameters of the worked examples with constant coefficients.
pub fn example_coefficients(beta: f64) -> StepCoefficients {
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

pub fn preset_scenario(name: &str) -> Scenario {
    ecoepi_core::presets::preset(name)
        .unwrap()
        .file()
        .unwrap()
        .to_scenario()
        .unwrap()
}

pub fn preset_initials(name: &str) -> Vec<State> {
    ecoepi_core::presets::preset(name).unwrap().file().unwrap().initial_conditions()
}

pub fn periodic_example(beta0: f64, a: f64) -> DiscreteCoefficients {
    let mut c = DiscreteCoefficients::constant(StepCoefficients {
        a,
        gamma: if a == 0.0 { 0.0 } else { 0.1 },
        ..example_coefficients(beta0)
    });
    c.beta = ecoepi_core::params::CoefficientSequence::new(CoefficientSpec::cosine(beta0, 0.7, PI / 5.0));
    c.eta = ecoepi_core::params::CoefficientSequence::new(CoefficientSpec::cosine(0.3, 0.7, PI / 5.0));
    c
}
