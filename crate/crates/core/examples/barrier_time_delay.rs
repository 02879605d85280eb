//! Sojourn-time delay of a packet crossing a smooth barrier, extrapolated in
//! `r` and compared with both Eisenbud-Wigner expressions.

use tdlab::delay::{ew_formula, ew_spectral, extrapolate_delay, sojourn_run, DelayOptions, Identity};
use tdlab::grid::{EnergyWindow, Grid, WaveState};
use tdlab::hamiltonian::{Dispersion, Potential, Propagator};
use tdlab::localisation::{LocalisationFunction, RfTable};
use tdlab::quadrature::QuadratureSpec;
use tdlab::scattering::{StationaryOptions, TimeDependentOptions};
use tdlab::time_operator::TimeOperator;

fn main() -> tdlab::Result<()> {
    let v0: f64 = std::env::args().nth(1).map_or(Ok(2.0), |s| s.parse()).expect("barrier height");
    let grid = Grid::new(16384, -800.0, 800.0)?;
    let h0 = Dispersion::quadratic();
    let v = Potential::smooth(v0, -0.5, 0.5, 4.0 * grid.dx())?;
    let window = EnergyWindow::for_momenta(2.0, 4.0, 0.2)?;
    let phi = window
        .apply(&h0, &WaveState::gaussian(&grid, -40.0, 4.0, 3.0)?.to_momentum(), 0.0)?
        .normalized()?;
    let prop = Propagator::new(&grid, &h0, &v, 0.005)?;

    let run = sojourn_run(&prop, &phi, &DelayOptions::default(), &Identity)?;
    let c = &run.curve;
    println!("{:>8} {:>14} {:>14} {:>16}", "r", "T_r", "T_r0(phi)", "tau_r");
    for i in 0..c.r_values.len() {
        println!("{:>8} {:>14.8} {:>14.8} {:>16.10}", c.r_values[i], c.t_full[i], c.t0_phi[i], c.tau[i]);
    }
    let fit = extrapolate_delay(&c.r_values, &c.tau)?;
    println!("tau_inf = {:.10} +- {:.1e}", fit.tau_inf, fit.error_bar);

    let rf = RfTable::new(LocalisationFunction::default(), QuadratureSpec::default())?;
    let t_f = TimeOperator::new(&h0, &rf, 0.5)?;
    let a = ew_formula(&prop, &t_f, &phi, &TimeDependentOptions::default())?;
    let b = ew_spectral(&v, &phi, &StationaryOptions::default(), 0.25)?;
    println!("-<phi, S*[T_f, S] phi> = {:.10}", a.re);
    println!("int <phi, Q phi> dE    = {:.10}", b.re);
    Ok(())
}
