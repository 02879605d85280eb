//! Adaptive Gauss-Kronrod (7/15) quadrature on finite intervals.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureSpec {
    /// Absolute error target for one integral.
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            max_depth: 40,
        }
    }
}

/// Returns `(kronrod, |kronrod - gauss|)` on `[a, b]`.
fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let sum = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * sum;
        if j % 2 == 1 {
            gauss += WG[j / 2] * sum;
        }
    }
    (kronrod * half, ((kronrod - gauss) * half).abs())
}

fn adapt(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    tol: f64,
    depth: u32,
    whole: (f64, f64),
) -> std::result::Result<(f64, f64), (f64, f64)> {
    let err = whole.1;
    if err <= tol || depth == 0 {
        return if err <= tol { Ok(whole) } else { Err(whole) };
    }
    let mid = 0.5 * (a + b);
    let left = gk15(f, a, mid);
    let right = gk15(f, mid, b);
    let l = adapt(f, a, mid, 0.5 * tol, depth - 1, left);
    let r = adapt(f, mid, b, 0.5 * tol, depth - 1, right);
    match (l, r) {
        (Ok(l), Ok(r)) => Ok((l.0 + r.0, l.1 + r.1)),
        (Ok(x) | Err(x), Ok(y) | Err(y)) => Err((x.0 + y.0, x.1 + y.1)),
    }
}

/// Integrates `f` over `[a, b]` (any order) to the absolute tolerance of `spec`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, spec: &QuadratureSpec) -> Result<f64> {
    if a == b {
        return Ok(0.0);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let first = gk15(&f, lo, hi);
    match adapt(&f, lo, hi, spec.abs_tol, spec.max_depth, first) {
        Ok((value, _)) => Ok(sign * value),
        Err((_, estimate)) => Err(Error::Quadrature {
            tol: spec.abs_tol,
            estimate,
        }),
    }
}

/// Integrates over consecutive breakpoints, splitting the tolerance evenly.
pub fn integrate_pieces(f: impl Fn(f64) -> f64, breaks: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    if breaks.len() < 2 {
        return Ok(0.0);
    }
    let piece_spec = QuadratureSpec {
        abs_tol: spec.abs_tol / (breaks.len() - 1) as f64,
        ..*spec
    };
    breaks
        .windows(2)
        .map(|w| integrate(&f, w[0], w[1], &piece_spec))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomials_are_exact() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x| x.powi(5) - 2.0 * x * x + 1.0, -1.0, 2.0, &spec).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - 2.0 * (8.0 + 1.0) / 3.0 + 3.0;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let spec = QuadratureSpec::default();
        let a = integrate(f64::exp, 0.0, 1.0, &spec).unwrap();
        let b = integrate(f64::exp, 1.0, 0.0, &spec).unwrap();
        assert!((a + b).abs() < 1e-15);
        assert!((a - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn log_integrand_needs_adaptivity() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x| 1.0 / x, 1e-3, 1.0, &spec).unwrap();
        assert!((v - 1e3f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn oscillatory_integrand() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x| (40.0 * x).sin(), 0.0, 3.0, &spec).unwrap();
        assert!((v - (1.0 - (120f64).cos()) / 40.0).abs() < 1e-10);
    }

    #[test]
    fn pieces_sum() {
        let spec = QuadratureSpec::default();
        let v = integrate_pieces(|x| x.abs(), &[-1.0, 0.0, 2.0], &spec).unwrap();
        assert!((v - 2.5).abs() < 1e-14);
    }
}
