//! A slow packet over a deep attractive well stays longer inside every
//! region than its free counterpart; a fast packet over a shallow well does not.

use tdlab::delay::{sojourn_run, DelayOptions, Identity};
use tdlab::grid::{Grid, WaveState};
use tdlab::hamiltonian::{Dispersion, Potential, Propagator};

fn sojourn_excess(v0: f64, k0: f64, sigma: f64, t_max: f64) -> Vec<f64> {
    let grid = Grid::new(16384, -800.0, 800.0).unwrap();
    let h0 = Dispersion::quadratic();
    let phi = WaveState::gaussian(&grid, 0.0, sigma, k0).unwrap().to_momentum();
    let v = Potential::smooth(v0, -0.5, 0.5, 4.0 * grid.dx()).unwrap();
    let prop = Propagator::new(&grid, &h0, &v, 0.005).unwrap();
    let opts = DelayOptions {
        r_values: vec![2.5, 5.0, 10.0],
        t_max,
        tail_eps: 1e-4,
        t_prep: -0.4 * t_max,
        ..DelayOptions::default()
    };
    let run = sojourn_run(&prop, &phi, &opts, &Identity).unwrap();
    let c = run.curve;
    c.t_full.iter().zip(&c.t0_phi).map(|(t, t0)| t - t0).collect()
}

#[test]
fn deep_well_enhances_dwell_of_slow_packets() {
    let excess = sojourn_excess(-8.0, 0.4, 12.5, 150.0);
    assert!(excess.iter().all(|&d| d > 0.0), "{excess:?}");
}

#[test]
fn shallow_well_speeds_up_fast_packets() {
    let excess = sojourn_excess(-2.0, 3.0, 4.0, 40.0);
    assert!(excess.iter().all(|&d| d < 0.0), "{excess:?}");
}
