//! The time operator in both realizations: canonical commutation with `H0`,
//! the Weyl relation, and agreement of the two realizations.

use tdlab::grid::{EnergyWindow, Grid, WaveState};
use tdlab::hamiltonian::Dispersion;
use tdlab::localisation::{LocalisationFunction, RfTable};
use tdlab::quadrature::QuadratureSpec;
use tdlab::time_operator::{Realization, TimeOperator};

fn main() -> tdlab::Result<()> {
    let grid = Grid::new(16384, -800.0, 800.0)?;
    let h0 = Dispersion::quadratic();
    let window = EnergyWindow::for_momenta(2.0, 4.0, 0.2)?;
    let packet = |x0: f64, k0: f64| -> tdlab::Result<_> {
        let raw = WaveState::gaussian(&grid, x0, 4.0, k0)?.to_momentum();
        window.apply(&h0, &raw, 0.0)?.normalized()
    };
    let psi = packet(-40.0, 3.0)?;
    let chi = packet(-30.0, 2.8)?;

    let rf = RfTable::new(LocalisationFunction::default(), QuadratureSpec::default())?;
    let t = TimeOperator::new(&h0, &rf, 0.5)?;

    for real in [Realization::Spectral, Realization::Formula] {
        println!("{real:?}");
        println!("  |<chi,[T,H0]psi> - i<chi,psi>| = {:.3e}", t.commutation_residual(&psi, &chi, real)?);
        for time in [-50.0, -1.0, 1.0, 50.0] {
            println!("  Weyl residual at t = {time:>5}: {:.3e}", t.weyl_residual(&psi, time, real)?);
        }
        println!("  <T> = {:.6}", t.expectation(&psi, real)?.re);
    }
    let a = t.apply_formula(&psi)?;
    let b = t.apply_spectral(&psi)?;
    println!("relative difference of the realizations: {:.3e}", a.distance(&b) / b.norm());
    Ok(())
}
