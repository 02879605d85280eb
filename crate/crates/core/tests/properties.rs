use proptest::prelude::*;
use tdlab::config::{ConfigError, ExperimentConfig};
use tdlab::delay::extrapolate_delay;
use tdlab::grid::{EnergyWindow, Grid, WaveState};
use tdlab::hamiltonian::{Dispersion, Potential};
use tdlab::localisation::{LocalisationFunction, RfTable};
use tdlab::quadrature::QuadratureSpec;
use tdlab::scattering::{stationary_smatrix, to_energy_rep, StationaryOptions};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smatrix_is_unitary_and_reciprocal(
        values in prop::collection::vec(-6.0f64..6.0, 1..8),
        x0 in -3.0f64..3.0,
        cell in 0.05f64..0.8,
        e in 0.01f64..40.0,
    ) {
        let v = Potential::samples(x0, cell, values).unwrap();
        let s = stationary_smatrix(&v, e, &StationaryOptions::default()).unwrap();
        prop_assert!(s.unitarity_residual() < 1e-9);
        prop_assert!((s.t_l - s.t_r).norm() < 1e-9);
    }

    #[test]
    fn energy_representation_round_trip(k0 in 2.3f64..3.7, x0 in -60.0f64..60.0, flip in any::<bool>()) {
        let grid = Grid::new(2048, -200.0, 200.0).unwrap();
        let k0 = if flip { -k0 } else { k0 };
        let phi = WaveState::gaussian(&grid, x0, 4.0, k0).unwrap().to_momentum();
        let phi = EnergyWindow::for_momenta(2.0, 4.0, 0.2).unwrap()
            .apply(&Dispersion::quadratic(), &phi, 0.0).unwrap();
        let rep = to_energy_rep(&phi, 0.25).unwrap();
        prop_assert!((rep.norm_sqr() - phi.norm_sqr()).abs() < 1e-12);
        prop_assert!(rep.to_momentum().distance(&phi) < 1e-12);
    }

    #[test]
    fn window_is_a_partition_value(e in -5.0f64..30.0, lo in 0.0f64..5.0, width in 0.5f64..10.0, frac in 0.0f64..0.5) {
        let w = EnergyWindow::new(lo, lo + width, frac * width).unwrap();
        let v = w.eval(e);
        prop_assert!((0.0..=1.0).contains(&v));
        if e <= lo || e >= lo + width {
            prop_assert_eq!(v, if frac == 0.0 && (e == lo || e == lo + width) { 1.0 } else { 0.0 });
        }
        if e >= lo + frac * width && e <= lo + width - frac * width && e > lo && e < lo + width {
            prop_assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn inverse_r_model_is_recovered(tau in -2.0f64..2.0, c in -50.0f64..50.0, r0 in 5.0f64..50.0) {
        let r: Vec<f64> = (0..5).map(|i| r0 * 2f64.powi(i)).collect();
        let t: Vec<f64> = r.iter().map(|r| tau + c / r).collect();
        let fit = extrapolate_delay(&r, &t).unwrap();
        prop_assert!((fit.tau_inf - tau).abs() < 1e-9 * (1.0 + c.abs()));
        prop_assert!(fit.jackknife.is_some());
    }

    #[test]
    fn rf_prime_is_homogeneous(y in 1e-2f64..1e3, negative in any::<bool>()) {
        let table = RfTable::new(LocalisationFunction::default(), QuadratureSpec::default()).unwrap();
        let y = if negative { -y } else { y };
        let direct = table.eval_rf_prime(y).unwrap();
        let scaled = table.homogeneous_prime(y).unwrap();
        prop_assert!((direct - scaled).abs() <= 1e-9 / y.abs());
        prop_assert!((direct + 1.0 / y).abs() <= 1e-9 / y.abs());
    }

    #[test]
    fn validation_reports_named_rules(n in 0usize..40000, k_min in -1.0f64..5.0, dt in -0.01f64..0.02, v0 in -5.0f64..5.0, a in -900.0f64..900.0) {
        let text = format!(
            "[grid]\nn = {n}\n[state]\nk_min = {k_min:?}\n[time]\ndt = {dt:?}\n[potential]\nkind = \"rectangular\"\nv0 = {v0:?}\na = {a:?}\nb = {:?}\n",
            a + 1.0
        );
        match ExperimentConfig::from_toml_str(&text) {
            Ok(c) => prop_assert!(c.validate().is_ok()),
            Err(ConfigError::Invalid(v)) => {
                prop_assert!(!v.is_empty());
                prop_assert!(v.iter().all(|v| !v.rule.is_empty()));
            }
            Err(other) => prop_assert!(false, "unexpected {other}"),
        }
    }
}
