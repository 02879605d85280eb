//! Stationary S-matrix against a direct solve of the matching conditions
//! for a single rectangular step of the potential.

mod common;

use common::matching;
use tdlab::hamiltonian::Potential;
use tdlab::scattering::{stationary_smatrix, StationaryOptions};

#[test]
fn matches_the_matching_oracle() {
    let opts = StationaryOptions::default();
    for (v0, a, b) in [(2.0, -0.5, 0.5), (-2.0, -0.5, 0.5), (5.0, 0.3, 1.7), (-7.5, -3.0, -1.0), (0.4, -2.0, 6.0)] {
        let v = Potential::rectangular(v0, a, b).unwrap();
        for e in [0.05, 0.3, 1.0, 1.99, 2.01, 4.0, 9.0, 16.0, 30.0] {
            let s = stationary_smatrix(&v, e, &opts).unwrap();
            let (t_l, r_l) = matching(v0, a, b, e, true);
            let (t_r, r_r) = matching(v0, a, b, e, false);
            for (got, want, name) in [(s.t_l, t_l, "t_l"), (s.r_l, r_l, "r_l"), (s.t_r, t_r, "t_r"), (s.r_r, r_r, "r_r")] {
                assert!((got - want).norm() < 1e-8, "{name} V0={v0} [{a},{b}] E={e}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn closed_form_transmission_probability() {
    // |t|^2 = 1 / (1 + V0^2 sin^2(qL) / (4 E (E - V0))) above the barrier
    let (v0, l) = (2.0, 1.0);
    let v = Potential::rectangular(v0, 0.0, l).unwrap();
    for e in [2.5, 4.0, 7.0, 12.0] {
        let q = (e - v0).sqrt();
        let want = 1.0 / (1.0 + v0 * v0 * (q * l).sin().powi(2) / (4.0 * e * (e - v0)));
        let s = stationary_smatrix(&v, e, &StationaryOptions::default()).unwrap();
        assert!((s.t_l.norm_sqr() - want).abs() < 1e-12, "E={e}");
    }
}
