//! The time operator `T_f` in two realizations: the position/momentum
//! formula built from `R_f'`, and `i d/dE` in the energy representation.

use crate::error::{Error, Result};
use crate::grid::{MomentumState, C64};
use crate::hamiltonian::{evolve_free_momentum, Dispersion};
use crate::localisation::RfTable;
use crate::scattering::{to_energy_rep, EnergyRepState, THRESHOLD_MASS_TOL};

/// How `d/dE` is discretized in the spectral realization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Differentiation {
    /// Exact differentiation of the trigonometric interpolant in `k`.
    #[default]
    Fourier,
    /// Fourth-order central differences in `k`, zero-padded at the ends.
    Stencil4,
}

#[derive(Clone, Debug)]
pub struct TimeOperator {
    dispersion: Dispersion,
    /// `R_f'(+1)`, `R_f'(-1)`.
    unit_prime: (f64, f64),
    eps_p: f64,
    differentiation: Differentiation,
}

impl TimeOperator {
    pub fn new(dispersion: &Dispersion, rf: &RfTable, eps_p: f64) -> Result<Self> {
        if !(eps_p > 0.0) {
            return Err(Error::InvalidWindow(format!("threshold margin must be positive, got {eps_p}")));
        }
        Ok(Self {
            dispersion: dispersion.clone(),
            unit_prime: rf.unit_prime(),
            eps_p,
            differentiation: Differentiation::Fourier,
        })
    }

    pub fn with_differentiation(mut self, d: Differentiation) -> Self {
        self.differentiation = d;
        self
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    pub fn eps_p(&self) -> f64 {
        self.eps_p
    }

    fn check_domain(&self, phi: &MomentumState) -> Result<()> {
        let total = phi.norm_sqr();
        let low = phi.mass_where(|p| self.dispersion.omega1(p).abs() < self.eps_p);
        if low > THRESHOLD_MASS_TOL * total.max(f64::MIN_POSITIVE) {
            return Err(Error::ThresholdMargin {
                mass: low,
                margin: self.eps_p,
            });
        }
        Ok(())
    }

    /// `R_f'(omega'(p) / |omega'(p)|)`.
    fn rf_prime_sign(&self, p: f64) -> f64 {
        let v = self.dispersion.omega1(p);
        if v > 0.0 {
            self.unit_prime.0
        } else if v < 0.0 {
            self.unit_prime.1
        } else {
            0.0
        }
    }

    /// `|omega'(p)|^{-power}`, zero inside the threshold margin.
    fn inverse_speed(&self, p: f64, power: i32) -> f64 {
        let v = self.dispersion.omega1(p).abs();
        if v < self.eps_p {
            0.0
        } else {
            v.powi(-power)
        }
    }

    /// `R_f'(omega'(p))` via homogeneity, zero inside the margin.
    fn rf_prime_of_speed(&self, p: f64) -> f64 {
        self.rf_prime_sign(p) * self.inverse_speed(p, 1)
    }

    /// `T_f phi = -1/2 (X R_f'(H0') + R_f'(H0'/|H0'|) X |H0'|^{-1}
    /// + i R_f'(H0'/|H0'|) H0'' H0' |H0'|^{-3}) phi`, factors applied right to left.
    pub fn apply_formula(&self, phi: &MomentumState) -> Result<MomentumState> {
        self.check_domain(phi)?;
        let real = |f: f64| C64::new(f, 0.0);
        let first = phi
            .apply_p_fn(|p| real(self.rf_prime_of_speed(p)))
            .apply_position();
        let second = phi
            .apply_p_fn(|p| real(self.inverse_speed(p, 1)))
            .apply_position()
            .apply_p_fn(|p| real(self.rf_prime_sign(p)));
        let third = phi.apply_p_fn(|p| {
            let d = &self.dispersion;
            C64::new(
                0.0,
                self.rf_prime_sign(p) * d.omega2(p) * d.omega1(p) * self.inverse_speed(p, 3),
            )
        });
        Ok(first.add(&second).add(&third).scaled(C64::new(-0.5, 0.0)))
    }

    /// `i d/dE` channel-wise in the energy representation (`omega = p^2` only).
    pub fn apply_spectral(&self, phi: &MomentumState) -> Result<MomentumState> {
        if !self.dispersion.is_quadratic() {
            return Err(Error::RequiresQuadratic);
        }
        self.check_domain(phi)?;
        let mut rep = to_energy_rep(phi, 0.5 * self.eps_p)?;
        rep.plus = self.i_d_de(&rep, &rep.plus)?;
        rep.minus = self.i_d_de(&rep, &rep.minus)?;
        Ok(rep.to_momentum())
    }

    fn i_d_de(&self, rep: &EnergyRepState, channel: &[C64]) -> Result<Vec<C64>> {
        let dk = match self.differentiation {
            Differentiation::Fourier => fourier_dk(rep, channel)?,
            Differentiation::Stencil4 => stencil_dk(rep.grid().dp(), channel),
        };
        Ok(dk
            .iter()
            .zip(&rep.momenta)
            .map(|(d, &k)| C64::new(0.0, 1.0) * d / (2.0 * k))
            .collect())
    }

    /// `t_f(phi) = -1/2 (<X phi, R_f'(H0') phi> + <R_f'(H0') phi, X phi>)`.
    pub fn quadratic_form(&self, phi: &MomentumState) -> Result<C64> {
        self.check_domain(phi)?;
        let x_phi = phi.apply_position();
        let r_phi = phi.apply_p_fn(|p| C64::new(self.rf_prime_of_speed(p), 0.0));
        Ok(-0.5 * (x_phi.inner(&r_phi) + r_phi.inner(&x_phi)))
    }

    pub fn apply(&self, phi: &MomentumState, realization: Realization) -> Result<MomentumState> {
        match realization {
            Realization::Formula => self.apply_formula(phi),
            Realization::Spectral => self.apply_spectral(phi),
        }
    }

    /// `|<chi, T H0 psi> - <H0 chi, T psi> - i <chi, psi>|`.
    pub fn commutation_residual(
        &self,
        psi: &MomentumState,
        chi: &MomentumState,
        realization: Realization,
    ) -> Result<f64> {
        let omega = |p: f64| C64::new(self.dispersion.omega(p), 0.0);
        let h_psi = psi.apply_p_fn(omega);
        let h_chi = chi.apply_p_fn(omega);
        let t_h_psi = self.apply(&h_psi, realization)?;
        let t_psi = self.apply(psi, realization)?;
        let commutator = chi.inner(&t_h_psi) - h_chi.inner(&t_psi);
        Ok((commutator - C64::new(0.0, 1.0) * chi.inner(psi)).norm())
    }

    /// `||T e^{-itH0} psi - e^{-itH0} (T + t) psi|| / ||psi||`.
    pub fn weyl_residual(&self, psi: &MomentumState, t: f64, realization: Realization) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        let moved = evolve_free_momentum(psi, &self.dispersion, t);
        let lhs = self.apply(&moved, realization)?;
        let shifted = self
            .apply(psi, realization)?
            .axpy(C64::new(t, 0.0), psi);
        let rhs = evolve_free_momentum(&shifted, &self.dispersion, t);
        Ok(lhs.distance(&rhs) / psi.norm())
    }

    /// `<psi, T psi> / ||psi||^2`.
    pub fn expectation(&self, psi: &MomentumState, realization: Realization) -> Result<C64> {
        Ok(psi.inner(&self.apply(psi, realization)?) / psi.norm_sqr())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Realization {
    Formula,
    Spectral,
}

/// `d/dk` of a channel sampled at `k_i = i dp`, by differentiating its
/// trigonometric interpolant on the full momentum lattice.
fn fourier_dk(rep: &EnergyRepState, channel: &[C64]) -> Result<Vec<C64>> {
    let grid = rep.grid();
    let zero = grid.zero_momentum_index();
    let mut amps = vec![C64::new(0.0, 0.0); grid.n()];
    for (i, &a) in channel.iter().enumerate() {
        amps[zero + 1 + i] = a;
    }
    // in the momentum picture X = i d/dp, so d/dk = -i X
    let lifted = MomentumState::from_amplitudes(grid, amps)?.apply_position();
    let out = lifted.amplitudes();
    Ok((0..channel.len())
        .map(|i| C64::new(0.0, -1.0) * out[zero + 1 + i])
        .collect())
}

fn stencil_dk(dp: f64, g: &[C64]) -> Vec<C64> {
    let at = |i: isize| -> C64 {
        if i < 0 || i as usize >= g.len() {
            C64::new(0.0, 0.0)
        } else {
            g[i as usize]
        }
    };
    (0..g.len() as isize)
        .map(|i| (at(i - 2) - 8.0 * at(i - 1) + 8.0 * at(i + 1) - at(i + 2)) / (12.0 * dp))
        .collect()
}
