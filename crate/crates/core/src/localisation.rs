//! Localisation function `f` and its renormalized logarithmic integral
//!
//! ```text
//! R_f(x) = int_0^inf dmu/mu (f(mu x) - chi_[0,1](mu))
//! ```
//!
//! `f` is the even plateau-bump cutoff built from `g(s) = exp(-1/s)`:
//! `f = 1` on `|x| <= r_inner`, `f = 0` on `|x| >= r_outer`, and
//! `h((|x| - r_inner) / (r_outer - r_inner))` in between with
//! `h(s) = g(1-s) / (g(s) + g(1-s))`.

use crate::error::{Error, Result};
use crate::quadrature::{integrate_pieces, QuadratureSpec};

fn bump_exp(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// C-infinity step rising from 0 at `s <= 0` to 1 at `s >= 1`.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        return 0.0;
    }
    if s >= 1.0 {
        return 1.0;
    }
    let a = bump_exp(s);
    let b = bump_exp(1.0 - s);
    a / (a + b)
}

/// Derivative of [`smooth_step`].
pub fn smooth_step_prime(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        return 0.0;
    }
    let a = bump_exp(s);
    let b = bump_exp(1.0 - s);
    let denom = a + b;
    if a == 0.0 || b == 0.0 {
        return 0.0;
    }
    a * b * (1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s))) / (denom * denom)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalisationFunction {
    r_inner: f64,
    r_outer: f64,
}

impl Default for LocalisationFunction {
    fn default() -> Self {
        Self {
            r_inner: 1.0,
            r_outer: 2.0,
        }
    }
}

impl LocalisationFunction {
    pub fn new(r_inner: f64, r_outer: f64) -> Result<Self> {
        if !(r_inner > 0.0 && r_outer > r_inner && r_outer.is_finite()) {
            return Err(Error::InvalidLocalisation(format!(
                "need 0 < r_inner < r_outer, got ({r_inner}, {r_outer})"
            )));
        }
        Ok(Self { r_inner, r_outer })
    }

    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }

    pub fn r_outer(&self) -> f64 {
        self.r_outer
    }

    fn width(&self) -> f64 {
        self.r_outer - self.r_inner
    }

    pub fn eval(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.r_inner {
            1.0
        } else if ax >= self.r_outer {
            0.0
        } else {
            1.0 - smooth_step((ax - self.r_inner) / self.width())
        }
    }

    /// `f'(x)`, odd in `x`.
    pub fn eval_prime(&self, x: f64) -> f64 {
        let ax = x.abs();
        if ax <= self.r_inner || ax >= self.r_outer {
            return 0.0;
        }
        -x.signum() * smooth_step_prime((ax - self.r_inner) / self.width()) / self.width()
    }

    /// `f(x / r)`, the dilated cutoff.
    pub fn dilated(&self, x: f64, r: f64) -> f64 {
        self.eval(x / r)
    }
}

/// `R_f` and `R_f'` evaluated by split quadrature, with a cache of both on
/// log-spaced positive abscissae.
#[derive(Clone, Debug)]
pub struct RfTable {
    source: LocalisationFunction,
    spec: QuadratureSpec,
    abscissae: Vec<f64>,
    values: Vec<f64>,
    derivatives: Vec<f64>,
    // R_f'(+1), R_f'(-1)
    unit_prime: (f64, f64),
}

impl RfTable {
    /// Caches 200 log-spaced points on `[1e-2, 1e3]`.
    pub fn new(source: LocalisationFunction, spec: QuadratureSpec) -> Result<Self> {
        Self::with_abscissae(source, spec, log_spaced(1e-2, 1e3, 200))
    }

    pub fn with_abscissae(
        source: LocalisationFunction,
        spec: QuadratureSpec,
        abscissae: Vec<f64>,
    ) -> Result<Self> {
        let mut table = Self {
            source,
            spec,
            abscissae: Vec::new(),
            values: Vec::new(),
            derivatives: Vec::new(),
            unit_prime: (0.0, 0.0),
        };
        table.unit_prime = (table.eval_rf_prime(1.0)?, table.eval_rf_prime(-1.0)?);
        table.values = abscissae
            .iter()
            .map(|&x| table.eval_rf(x))
            .collect::<Result<_>>()?;
        table.derivatives = abscissae
            .iter()
            .map(|&x| table.eval_rf_prime(x))
            .collect::<Result<_>>()?;
        table.abscissae = abscissae;
        Ok(table)
    }

    pub fn source(&self) -> &LocalisationFunction {
        &self.source
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn cached_values(&self) -> &[f64] {
        &self.values
    }

    pub fn cached_derivatives(&self) -> &[f64] {
        &self.derivatives
    }

    /// `R_f(x)`; the `chi_[0,1]` jump is removed by splitting at `mu = 1`.
    pub fn eval_rf(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::RfSingular);
        }
        let ax = x.abs();
        let f = &self.source;
        let mu_in = f.r_inner / ax;
        let mu_out = f.r_outer / ax;

        // (0, 1]: integrand (f(mu x) - 1)/mu vanishes for mu <= mu_in
        let mut lower = Vec::new();
        if mu_in < 1.0 {
            lower.push(mu_in);
            if mu_out < 1.0 {
                lower.push(mu_out);
            }
            lower.push(1.0);
        }
        let below = integrate_pieces(|mu| (f.eval(mu * x) - 1.0) / mu, &lower, &self.spec)?;

        // [1, inf): integrand f(mu x)/mu, truncated at mu_out
        let mut upper = Vec::new();
        if mu_out > 1.0 {
            upper.push(1.0);
            if mu_in > 1.0 {
                upper.push(mu_in);
            }
            upper.push(mu_out);
        }
        let above = integrate_pieces(|mu| f.eval(mu * x) / mu, &upper, &self.spec)?;
        Ok(below + above)
    }

    /// `R_f'(x) = int_0^inf dmu f'(mu x)`; only `mu |x| in (r_inner, r_outer)` contributes.
    pub fn eval_rf_prime(&self, x: f64) -> Result<f64> {
        if x == 0.0 {
            return Err(Error::RfSingular);
        }
        let ax = x.abs();
        let f = &self.source;
        let breaks = [f.r_inner / ax, f.r_outer / ax];
        // tolerance is relative to the scale 1/|x| of the result
        let spec = QuadratureSpec {
            abs_tol: self.spec.abs_tol / ax.max(1.0),
            ..self.spec
        };
        integrate_pieces(|mu| f.eval_prime(mu * x), &breaks, &spec)
    }

    /// `R_f'(y)` from the cached unit values and degree -1 homogeneity.
    pub fn homogeneous_prime(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Err(Error::RfSingular);
        }
        let unit = if y > 0.0 {
            self.unit_prime.0
        } else {
            self.unit_prime.1
        };
        Ok(unit / y.abs())
    }

    /// `(R_f'(1), R_f'(-1))`.
    pub fn unit_prime(&self) -> (f64, f64) {
        self.unit_prime
    }

    /// Largest `|x R_f'(x) + 1|` over the cached abscissae.
    pub fn max_identity_residual(&self) -> f64 {
        self.abscissae
            .iter()
            .zip(&self.derivatives)
            .map(|(x, d)| (x * d + 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1).max(1) as f64).exp())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> RfTable {
        RfTable::new(LocalisationFunction::default(), QuadratureSpec::default()).unwrap()
    }

    #[test]
    fn f_examples() {
        let f = LocalisationFunction::default();
        assert_eq!(f.eval(0.0), 1.0);
        assert_eq!(f.eval(2.5), 0.0);
        assert_eq!(f.eval(-1.5), f.eval(1.5));
        assert_eq!(f.eval(1.0), 1.0);
        assert_eq!(f.eval(2.0), 0.0);
        // h(1/2) = 1/2 by symmetry of the profile
        assert!((f.eval(1.5) - 0.5).abs() < 1e-15);
        for i in 0..=400 {
            let x = -3.0 + 6.0 * i as f64 / 400.0;
            let v = f.eval(x);
            assert!((0.0..=1.0).contains(&v));
            assert_eq!(v, f.eval(-x));
        }
    }

    #[test]
    fn f_prime_matches_finite_differences() {
        let f = LocalisationFunction::new(0.5, 3.0).unwrap();
        let h = 1e-6;
        for i in 1..100 {
            let x = -3.2 + 6.4 * i as f64 / 100.0;
            let fd = (f.eval(x + h) - f.eval(x - h)) / (2.0 * h);
            assert!((fd - f.eval_prime(x)).abs() < 1e-7, "x = {x}");
        }
    }

    #[test]
    fn rejects_bad_radii() {
        assert!(LocalisationFunction::new(0.0, 1.0).is_err());
        assert!(LocalisationFunction::new(2.0, 1.0).is_err());
        assert!(LocalisationFunction::new(1.0, 1.0).is_err());
    }

    #[test]
    fn rf_prime_examples() {
        let t = table();
        assert!((t.eval_rf_prime(2.0).unwrap() + 0.5).abs() < 1e-8);
        assert!((t.eval_rf_prime(-2.0).unwrap() - 0.5).abs() < 1e-8);
        assert!((0.7 * t.eval_rf_prime(0.7).unwrap() + 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_is_a_domain_error() {
        let t = table();
        assert!(matches!(t.eval_rf(0.0), Err(Error::RfSingular)));
        assert!(matches!(t.eval_rf_prime(0.0), Err(Error::RfSingular)));
        assert!(t.homogeneous_prime(0.0).is_err());
    }

    #[test]
    fn rf_is_even() {
        let t = table();
        for x in [0.1, 0.9, 1.0, 1.7, 4.0, 300.0] {
            assert!((t.eval_rf(x).unwrap() - t.eval_rf(-x).unwrap()).abs() < 1e-12);
        }
    }

    #[test]
    fn cached_identity_residual() {
        let t = table();
        assert_eq!(t.abscissae().len(), 200);
        assert!(t.max_identity_residual() < 1e-8);
    }

    #[test]
    fn homogeneity_of_rf_prime() {
        let t = table();
        for &x in &[0.03, 0.5, 1.3, 7.0, 90.0] {
            let base = t.eval_rf_prime(x).unwrap();
            for s in [2.0, 5.0, 10.0] {
                let scaled = s * t.eval_rf_prime(s * x).unwrap();
                assert!((scaled - base).abs() < 1e-8 * base.abs().max(1.0));
            }
            assert!((t.homogeneous_prime(x).unwrap() - base).abs() < 1e-9 * base.abs().max(1.0));
        }
    }

    #[test]
    fn log_spacing_endpoints() {
        let v = log_spaced(1e-2, 1e3, 200);
        assert!((v[0] - 1e-2).abs() < 1e-15);
        assert!((v[199] - 1e3).abs() < 1e-9);
    }
}
