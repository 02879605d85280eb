//! Conjugate operator `A = (Pi X + X Pi)/2` with
//! `Pi = <omega>^{-2} omega' <omega>^{-2}`, the commutator identity
//! `[iH0, A] = <H0>^{-2} (H0')^2 <H0>^{-2}`, and the critical-value scan.

use crate::error::{Error, Result};
use crate::grid::{MomentumState, C64};
use crate::hamiltonian::Dispersion;

/// `<x> = (1 + x^2)^{1/2}`.
pub fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

#[derive(Clone, Debug)]
pub struct ConjugateOperator {
    dispersion: Dispersion,
}

/// Residuals of the commutator identity on one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CommutatorCheck {
    /// `||i[H0, A] psi - rhs psi|| / ||rhs psi||`.
    pub relative_residual: f64,
    /// `<psi, i[H0, A] psi>`.
    pub expectation: f64,
    /// `|Im <psi, A psi>|`.
    pub asymmetry: f64,
}

impl ConjugateOperator {
    pub fn new(dispersion: &Dispersion) -> Self {
        Self {
            dispersion: dispersion.clone(),
        }
    }

    pub fn pi(&self, p: f64) -> f64 {
        let w = japanese(self.dispersion.omega(p));
        self.dispersion.omega1(p) / (w * w * w * w)
    }

    /// `sup |Pi|` over the given momenta.
    pub fn pi_sup(&self, momenta: &[f64]) -> f64 {
        momenta.iter().map(|&p| self.pi(p).abs()).fold(0.0, f64::max)
    }

    /// Right-hand multiplier `omega'^2 / (1 + omega^2)^2`.
    pub fn commutator_symbol(&self, p: f64) -> f64 {
        let w = japanese(self.dispersion.omega(p));
        let v = self.dispersion.omega1(p);
        v * v / (w * w * w * w)
    }

    pub fn apply(&self, psi: &MomentumState) -> MomentumState {
        let pi = |p: f64| C64::new(self.pi(p), 0.0);
        let pi_x = psi.apply_position().apply_p_fn(pi);
        let x_pi = psi.apply_p_fn(pi).apply_position();
        pi_x.add(&x_pi).scaled(C64::new(0.5, 0.0))
    }

    /// `i (H0 A - A H0) psi`.
    pub fn commutator(&self, psi: &MomentumState) -> MomentumState {
        let omega = |p: f64| C64::new(self.dispersion.omega(p), 0.0);
        let h_a = self.apply(psi).apply_p_fn(omega);
        let a_h = self.apply(&psi.apply_p_fn(omega));
        h_a.sub(&a_h).scaled(C64::new(0.0, 1.0))
    }

    pub fn check(&self, psi: &MomentumState) -> CommutatorCheck {
        let lhs = self.commutator(psi);
        let rhs = psi.apply_p_fn(|p| C64::new(self.commutator_symbol(p), 0.0));
        let scale = rhs.norm();
        let diff = lhs.distance(&rhs);
        CommutatorCheck {
            relative_residual: if scale > 0.0 { diff / scale } else { diff },
            expectation: psi.inner(&lhs).re,
            asymmetry: psi.inner(&self.apply(psi)).im.abs(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanOptions {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
    /// Strictly decreasing towards zero.
    pub eps_sequence: Vec<f64>,
    /// Momentum lattice `p_j = j dp`, `|p_j| <= p_max`; contains `p = 0`.
    pub dp: f64,
    pub p_max: f64,
    /// Least-squares slope above which a value is flagged.
    pub slope_threshold: f64,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            lambda_min: -0.5,
            lambda_max: 3.0,
            delta: 0.05,
            eps_sequence: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            dp: 1e-4,
            p_max: 4.0,
            slope_threshold: 0.5,
        }
    }
}

impl ScanOptions {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidScan(m.into()));
        if !(self.delta > 0.0) {
            return bad("delta must be positive");
        }
        if !(self.lambda_min <= self.lambda_max) {
            return bad("lambda_min exceeds lambda_max");
        }
        if self.eps_sequence.len() < 2 {
            return bad("need at least two eps values");
        }
        if self.eps_sequence.iter().any(|&e| !(e > 0.0))
            || self.eps_sequence.windows(2).any(|w| w[1] >= w[0])
        {
            return bad("eps sequence must be positive and strictly decreasing");
        }
        if !(self.dp > 0.0 && self.p_max > self.dp) {
            return bad("need 0 < dp < p_max");
        }
        Ok(())
    }

    /// Lambda lattice with spacing `2 delta`, so neighbouring windows tile the range.
    pub fn lambdas(&self) -> Vec<f64> {
        let step = 2.0 * self.delta;
        let count = ((self.lambda_max - self.lambda_min) / step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lambda_min + i as f64 * step).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub lambda: f64,
    /// `sup (omega'^2 + eps)^{-1}` over `|omega - lambda| < delta`, per eps;
    /// empty when no lattice momentum lies in the window.
    pub sup_norms: Vec<f64>,
    pub exponent: Option<f64>,
    pub flagged: bool,
}

impl ScanRow {
    pub fn has_spectrum(&self) -> bool {
        !self.sup_norms.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalScanResult {
    pub delta: f64,
    pub eps_sequence: Vec<f64>,
    pub rows: Vec<ScanRow>,
}

impl CriticalScanResult {
    /// Flagged lambdas, runs of adjacent flags merged to their mean.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut run: Vec<f64> = Vec::new();
        for row in &self.rows {
            if row.flagged {
                run.push(row.lambda);
            } else if !run.is_empty() {
                out.push(run.iter().sum::<f64>() / run.len() as f64);
                run.clear();
            }
        }
        if !run.is_empty() {
            out.push(run.iter().sum::<f64>() / run.len() as f64);
        }
        out
    }

    /// (smallest exponent among flagged rows, largest among the others).
    pub fn exponent_bounds(&self) -> (f64, f64) {
        let flagged_min = self
            .rows
            .iter()
            .filter(|r| r.flagged)
            .filter_map(|r| r.exponent)
            .fold(f64::INFINITY, f64::min);
        let other_max = self
            .rows
            .iter()
            .filter(|r| !r.flagged)
            .filter_map(|r| r.exponent)
            .fold(f64::NEG_INFINITY, f64::max);
        (flagged_min, other_max)
    }
}

/// Least-squares slope of `y` against `x`.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Lattice evaluation of `||((H0')^2 + eps)^{-1} E(lambda; delta)||` and the
/// divergence exponent in `1/eps` for each lambda.
pub fn critical_scan(dispersion: &Dispersion, opts: &ScanOptions) -> Result<CriticalScanResult> {
    use rayon::prelude::*;
    opts.validate()?;
    let m = (opts.p_max / opts.dp).floor() as i64;
    let samples: Vec<(f64, f64)> = (-m..=m)
        .map(|j| {
            let p = j as f64 * opts.dp;
            let v = dispersion.omega1(p);
            (dispersion.omega(p), v * v)
        })
        .collect();
    let log_inv_eps: Vec<f64> = opts.eps_sequence.iter().map(|e| -e.ln()).collect();
    let rows = opts
        .lambdas()
        .into_par_iter()
        .map(|lambda| {
            let speed_min = samples
                .iter()
                .filter(|(w, _)| (w - lambda).abs() < opts.delta)
                .map(|&(_, s)| s)
                .fold(f64::INFINITY, f64::min);
            if !speed_min.is_finite() {
                return ScanRow {
                    lambda,
                    sup_norms: Vec::new(),
                    exponent: None,
                    flagged: false,
                };
            }
            let sup_norms: Vec<f64> = opts.eps_sequence.iter().map(|e| 1.0 / (speed_min + e)).collect();
            let logs: Vec<f64> = sup_norms.iter().map(|s| s.ln()).collect();
            let exponent = ls_slope(&log_inv_eps, &logs);
            ScanRow {
                lambda,
                sup_norms,
                exponent: Some(exponent),
                flagged: exponent > opts.slope_threshold,
            }
        })
        .collect();
    Ok(CriticalScanResult {
        delta: opts.delta,
        eps_sequence: opts.eps_sequence.clone(),
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_a_power_law() {
        let x = [1.0, 2.0, 3.0, 4.0];
        let y: Vec<f64> = x.iter().map(|v| 0.3 + 1.5 * v).collect();
        assert!((ls_slope(&x, &y) - 1.5).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_scan_parameters() {
        let d = Dispersion::quadratic();
        let mut o = ScanOptions::default();
        o.delta = 0.0;
        assert!(critical_scan(&d, &o).is_err());
        let mut o = ScanOptions::default();
        o.eps_sequence = vec![1e-3, 1e-2];
        assert!(critical_scan(&d, &o).is_err());
    }

    #[test]
    fn quadratic_pi_is_bounded() {
        let a = ConjugateOperator::new(&Dispersion::quadratic());
        let p: Vec<f64> = (-4000..=4000).map(|j| j as f64 * 1e-2).collect();
        let sup = a.pi_sup(&p);
        assert!(sup.is_finite() && sup < 1.0);
        assert_eq!(a.pi(0.0), 0.0);
    }

    #[test]
    fn empty_window_is_not_a_flag() {
        let o = ScanOptions {
            lambda_min: -0.5,
            lambda_max: -0.5,
            ..ScanOptions::default()
        };
        let r = critical_scan(&Dispersion::quadratic(), &o).unwrap();
        assert!(!r.rows[0].has_spectrum());
        assert!(!r.rows[0].flagged);
    }
}
