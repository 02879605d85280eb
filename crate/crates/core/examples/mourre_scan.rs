//! Critical values of `H0 = omega(P)` from the blow-up of
//! `((H0')^2 + eps)^{-1}` on spectral windows, and the Mourre commutator.

use tdlab::grid::{Grid, WaveState};
use tdlab::hamiltonian::Dispersion;
use tdlab::mourre::{critical_scan, ConjugateOperator, ScanOptions};

fn main() -> tdlab::Result<()> {
    let opts = ScanOptions::default();
    for (name, h0) in [("p^2", Dispersion::quadratic()), ("(p^2 - 1)^2", Dispersion::double_well())] {
        let scan = critical_scan(&h0, &opts)?;
        let (flagged, other) = scan.exponent_bounds();
        println!("omega = {name}");
        println!("  analytic critical values {:?}", h0.critical_values());
        println!("  detected                 {:?}", scan.critical_values());
        println!("  exponent >= {flagged:.3} at flags, <= {other:.3} elsewhere");
    }

    let grid = Grid::new(4096, -200.0, 200.0)?;
    let a = ConjugateOperator::new(&Dispersion::quadratic());
    for k0 in [0.0, 0.5, 2.0] {
        let psi = WaveState::gaussian(&grid, 0.0, 3.0, k0)?.to_momentum().normalized()?;
        let c = a.check(&psi);
        println!(
            "k0 = {k0}: residual {:.2e}, <i[H0,A]> = {:.4e}",
            c.relative_residual, c.expectation
        );
    }
    Ok(())
}
