//! Stationary S-matrix and Wigner-Smith eigenvalues across an energy range,
//! then `S phi` from the time-dependent and stationary pictures.

use tdlab::grid::{EnergyWindow, Grid, WaveState};
use tdlab::hamiltonian::{Dispersion, Potential, Propagator};
use tdlab::scattering::{apply_stationary, scattering_apply, wigner_smith, StationaryOptions, TimeDependentOptions};

fn main() -> tdlab::Result<()> {
    let grid = Grid::new(16384, -800.0, 800.0)?;
    let v = Potential::smooth(2.0, -0.5, 0.5, 4.0 * grid.dx())?;
    let opts = StationaryOptions::default();

    let energies: Vec<f64> = (1..=12).map(|i| 0.5 * i as f64).collect();
    println!("{:>6} {:>10} {:>12} {:>12} {:>10}", "E", "|t|^2", "q_1", "q_2", "|S*S-I|");
    for w in wigner_smith(&v, &energies, &opts)? {
        println!(
            "{:>6.2} {:>10.6} {:>12.6} {:>12.6} {:>10.1e}",
            w.energy,
            w.smatrix.t_l.norm_sqr(),
            w.eigenvalues[0],
            w.eigenvalues[1],
            w.smatrix.unitarity_residual()
        );
    }

    let h0 = Dispersion::quadratic();
    let window = EnergyWindow::for_momenta(2.0, 4.0, 0.2)?;
    let phi = window
        .apply(&h0, &WaveState::gaussian(&grid, -40.0, 4.0, 3.0)?.to_momentum(), 0.0)?
        .normalized()?;
    let prop = Propagator::new(&grid, &h0, &v, 0.005)?;
    let dynamic = scattering_apply(&prop, &phi.to_position(), &TimeDependentOptions::default(), true)?;
    let stationary = apply_stationary(&v, &phi, &opts, 0.25)?;
    println!("Cauchy residual {:.2e}", dynamic.cauchy_residual.unwrap_or(f64::NAN));
    println!(
        "||S phi (time-dependent) - S phi (stationary)|| = {:.3e}",
        dynamic.state.to_momentum().distance(&stationary)
    );
    println!("transmitted probability {:.6}", stationary.mass_where(|p| p > 0.0));
    Ok(())
}
