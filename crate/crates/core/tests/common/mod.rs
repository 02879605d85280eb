//! Oracles shared by the integration tests.

use nalgebra::{Matrix4, Vector4};
use num_complex::Complex64 as C;

/// `(t, r)` for a wave `e^{+-ikx}` incident on `V0` over `[a, b]`, from the
/// four continuity conditions on `psi` and `psi'` at `a` and `b`.
pub fn matching(v0: f64, a: f64, b: f64, e: f64, from_left: bool) -> (C, C) {
    let i = C::i();
    let k = C::new(e.sqrt(), 0.0);
    let q = C::new(e - v0, 0.0).sqrt();
    let ex = |z: C, x: f64| (i * z * x).exp();
    // unknowns: [r, A, B, t]; inside A e^{iqx} + B e^{-iqx}
    if from_left {
        // e^{ikx} + r e^{-ikx} | inside | t e^{ikx}
        let m = Matrix4::new(
            ex(-k, a), -ex(q, a), -ex(-q, a), C::new(0.0, 0.0),
            -i * k * ex(-k, a), -i * q * ex(q, a), i * q * ex(-q, a), C::new(0.0, 0.0),
            C::new(0.0, 0.0), ex(q, b), ex(-q, b), -ex(k, b),
            C::new(0.0, 0.0), i * q * ex(q, b), -i * q * ex(-q, b), -i * k * ex(k, b),
        );
        let rhs = Vector4::new(-ex(k, a), -i * k * ex(k, a), C::new(0.0, 0.0), C::new(0.0, 0.0));
        let s = m.lu().solve(&rhs).unwrap();
        (s[3], s[0])
    } else {
        // t e^{-ikx} | inside | e^{-ikx} + r e^{ikx}
        let m = Matrix4::new(
            ex(-k, a), -ex(q, a), -ex(-q, a), C::new(0.0, 0.0),
            -i * k * ex(-k, a), -i * q * ex(q, a), i * q * ex(-q, a), C::new(0.0, 0.0),
            C::new(0.0, 0.0), ex(q, b), ex(-q, b), -ex(k, b),
            C::new(0.0, 0.0), i * q * ex(q, b), -i * q * ex(-q, b), -i * k * ex(k, b),
        );
        // reuse the layout with unknowns [t, A, B, r]
        let rhs = Vector4::new(C::new(0.0, 0.0), C::new(0.0, 0.0), ex(-k, b), -i * k * ex(-k, b));
        let s = m.lu().solve(&rhs).unwrap();
        (s[0], s[3])
    }
}
