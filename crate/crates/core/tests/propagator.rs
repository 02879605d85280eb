//! Split-step propagation: second-order convergence in `dt`, Richardson
//! gain, unitarity, time reversal, and exactness for `V = 0`.

use tdlab::grid::{Grid, WaveState};
use tdlab::hamiltonian::{evolve_free, Dispersion, Potential, Propagator};

fn setup() -> (Grid, WaveState, Potential) {
    let grid = Grid::new(4096, -200.0, 200.0).unwrap();
    let psi = WaveState::gaussian(&grid, -15.0, 3.0, 2.0).unwrap();
    let v = Potential::smooth(2.0, -1.0, 1.0, 0.8).unwrap();
    (grid, psi, v)
}

fn evolve(grid: &Grid, v: &Potential, psi: &WaveState, dt: f64, t: f64) -> WaveState {
    Propagator::new(grid, &Dispersion::quadratic(), v, dt).unwrap().evolve(psi, t)
}

#[test]
fn strang_is_second_order_and_richardson_improves_it() {
    let (grid, psi, v) = setup();
    let t = 8.0;
    // dt * p_max^2 stays below 2 pi
    let steps = [0.005, 0.0025, 0.00125];
    let runs: Vec<WaveState> = steps.iter().map(|&dt| evolve(&grid, &v, &psi, dt, t)).collect();
    let reference = evolve(&grid, &v, &psi, 0.0003125, t);

    let err: Vec<f64> = runs.iter().map(|r| r.distance(&reference)).collect();
    for w in err.windows(2) {
        let ratio = w[0] / w[1];
        assert!((3.3..4.7).contains(&ratio), "error ratio {ratio}, errors {err:?}");
    }

    let coarse = runs[0].amplitudes();
    let fine = runs[1].amplitudes();
    let extrapolated: Vec<_> = coarse.iter().zip(fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    let extrapolated = WaveState::from_amplitudes(&grid, extrapolated).unwrap();
    assert!(extrapolated.distance(&reference) < 0.1 * err[1]);
}

#[test]
fn unitary_and_reversible() {
    let (grid, psi, v) = setup();
    let forward = evolve(&grid, &v, &psi, 0.01, 7.3);
    assert!((forward.norm() - 1.0).abs() < 1e-12);
    let back = evolve(&grid, &v, &forward, 0.01, -7.3);
    assert!(back.distance(&psi) < 1e-11);
}

#[test]
fn free_propagation_is_exact() {
    let (grid, psi, _) = setup();
    for t in [0.013, 1.0, -6.0] {
        let split = evolve(&grid, &Potential::Zero, &psi, 0.01, t);
        let exact = evolve_free(&psi, &Dispersion::quadratic(), t);
        assert!(split.distance(&exact) < 1e-12, "t={t}");
    }
}
