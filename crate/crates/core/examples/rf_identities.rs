//! `R_f` for the plateau-bump localisation function, and the identities
//! `x R_f'(x) = -1`, `R_f'(x) = -1/x`.

use tdlab::localisation::{log_spaced, LocalisationFunction, RfTable};
use tdlab::quadrature::QuadratureSpec;

fn main() -> tdlab::Result<()> {
    let f = LocalisationFunction::new(1.0, 2.0)?;
    let table = RfTable::with_abscissae(f, QuadratureSpec::default(), log_spaced(1e-2, 1e3, 9))?;

    println!("{:>12} {:>22} {:>22} {:>12}", "x", "R_f(x)", "R_f'(x)", "x R_f' + 1");
    for ((x, r), d) in table.abscissae().iter().zip(table.cached_values()).zip(table.cached_derivatives()) {
        println!("{x:>12.4e} {r:>22.15e} {d:>22.15e} {:>12.2e}", x * d + 1.0);
    }
    let (plus, minus) = table.unit_prime();
    println!("R_f'(1) = {plus}, R_f'(-1) = {minus}");
    println!("R_f'(-7) via homogeneity = {}", table.homogeneous_prime(-7.0)?);
    Ok(())
}
