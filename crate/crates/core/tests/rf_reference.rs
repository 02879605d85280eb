//! `R_f` against brute-force Simpson sums of its defining integrals, with
//! the plateau-bump cutoff re-implemented here.

use tdlab::localisation::{LocalisationFunction, RfTable};
use tdlab::quadrature::QuadratureSpec;

fn bump(x: f64) -> f64 {
    let g = |s: f64| if s > 0.0 { (-1.0 / s).exp() } else { 0.0 };
    let ax = x.abs();
    if ax <= 1.0 {
        1.0
    } else if ax >= 2.0 {
        0.0
    } else {
        let s = ax - 1.0;
        g(1.0 - s) / (g(s) + g(1.0 - s))
    }
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n)
        .map(|i| f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 })
        .sum();
    (f(a) + f(b) + inner) * h / 3.0
}

const POINTS: usize = 1_000_000;

fn table() -> RfTable {
    RfTable::new(LocalisationFunction::new(1.0, 2.0).unwrap(), QuadratureSpec::default()).unwrap()
}

#[test]
fn rf_at_one() {
    // only mu in [1, 2] contributes
    let reference = simpson(|mu| bump(mu) / mu, 1.0, 2.0, POINTS);
    let got = table().eval_rf(1.0).unwrap();
    assert!((got - reference).abs() < 1e-10, "{got} vs {reference}");
}

#[test]
fn rf_off_one() {
    let t = table();
    // x = 3: (f(3 mu) - 1)/mu on [1/3, 2/3], then -1/mu up to 1
    let reference = simpson(|mu| (bump(3.0 * mu) - 1.0) / mu, 1.0 / 3.0, 2.0 / 3.0, POINTS) + (2.0f64 / 3.0).ln();
    let got = t.eval_rf(3.0).unwrap();
    assert!((got - reference).abs() < 1e-10, "{got} vs {reference}");

    // x = 1/4: f(mu/4)/mu on [1, 8]
    let reference = simpson(|mu| bump(0.25 * mu) / mu, 1.0, 8.0, POINTS);
    let got = t.eval_rf(0.25).unwrap();
    assert!((got - reference).abs() < 1e-10, "{got} vs {reference}");
    assert!((t.eval_rf(-0.25).unwrap() - got).abs() < 1e-14);
}

#[test]
fn derivative_matches_finite_differences_of_the_reference() {
    let t = table();
    for x in [0.7, 1.5, 4.0] {
        let h = 1e-4;
        let rf = |y: f64| t.eval_rf(y).unwrap();
        let fd = (rf(x - 2.0 * h) - 8.0 * rf(x - h) + 8.0 * rf(x + h) - rf(x + 2.0 * h)) / (12.0 * h);
        assert!((t.eval_rf_prime(x).unwrap() - fd).abs() < 1e-8, "x={x}");
    }
}
