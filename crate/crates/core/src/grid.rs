//! Uniform spatial lattice, its dual momentum lattice and the functional
//! calculus for multipliers in either representation.
//!
//! Fourier convention: `psi_hat(p) = dx / sqrt(2 pi) * sum_x exp(-i p x) psi(x)`,
//! with the momentum lattice stored in increasing order. Norms are
//! `sum |psi|^2 dx` in position space and `sum |psi_hat|^2 dp` in momentum space.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::hamiltonian::Dispersion;
use crate::localisation::smooth_step;

pub type C64 = Complex64;

/// Uniform periodic lattice on `[x_min, x_max)` with `n` points.
#[derive(Clone)]
pub struct Grid {
    n: usize,
    x_min: f64,
    x_max: f64,
    dx: f64,
    dp: f64,
    positions: Arc<[f64]>,
    momenta: Arc<[f64]>,
    // exp(-i p_j x_min), applied after the shifted FFT
    origin_phase: Arc<[C64]>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("x_min", &self.x_min)
            .field("x_max", &self.x_max)
            .field("dx", &self.dx)
            .field("dp", &self.dp)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.x_min == other.x_min && self.x_max == other.x_max
    }
}

impl Grid {
    pub fn new(n: usize, x_min: f64, x_max: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n must be a power of two >= 16, got {n}"
            )));
        }
        if !(x_min.is_finite() && x_max.is_finite()) || x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "need x_min < x_max, got [{x_min}, {x_max}]"
            )));
        }
        let dx = (x_max - x_min) / n as f64;
        let dp = 2.0 * PI / (n as f64 * dx);
        let half = (n / 2) as f64;
        let positions: Arc<[f64]> = (0..n).map(|j| x_min + j as f64 * dx).collect();
        let momenta: Arc<[f64]> = (0..n).map(|j| (j as f64 - half) * dp).collect();
        let origin_phase = momenta
            .iter()
            .map(|&p| C64::from_polar(1.0, -p * x_min))
            .collect();
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            x_min,
            x_max,
            dx,
            dp,
            positions,
            momenta,
            origin_phase,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn x_min(&self) -> f64 {
        self.x_min
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    /// Momentum lattice spacing, `2 pi / (n dx)`.
    pub fn dp(&self) -> f64 {
        self.dp
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    /// Momentum lattice in increasing order, `p_j in [-pi/dx, pi/dx)`.
    pub fn momenta(&self) -> &[f64] {
        &self.momenta
    }

    /// Index of `p = 0` in [`Grid::momenta`].
    pub fn zero_momentum_index(&self) -> usize {
        self.n / 2
    }

    pub fn length(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn scratch_len(&self) -> usize {
        self.forward
            .get_inplace_scratch_len()
            .max(self.inverse.get_inplace_scratch_len())
    }

    /// In-place position -> momentum transform.
    pub fn forward_in_place(&self, buf: &mut [C64], scratch: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        for (j, v) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
        self.forward.process_with_scratch(buf, scratch);
        let scale = self.dx / (2.0 * PI).sqrt();
        for (v, ph) in buf.iter_mut().zip(self.origin_phase.iter()) {
            *v *= ph * scale;
        }
    }

    /// In-place momentum -> position transform, the exact inverse of
    /// [`Grid::forward_in_place`].
    pub fn inverse_in_place(&self, buf: &mut [C64], scratch: &mut [C64]) {
        debug_assert_eq!(buf.len(), self.n);
        let scale = self.dp / (2.0 * PI).sqrt();
        for (v, ph) in buf.iter_mut().zip(self.origin_phase.iter()) {
            *v *= ph.conj() * scale;
        }
        self.inverse.process_with_scratch(buf, scratch);
        for (j, v) in buf.iter_mut().enumerate() {
            if j % 2 == 1 {
                *v = -*v;
            }
        }
    }

    fn transform(&self, amps: &[C64], forward: bool) -> Vec<C64> {
        let mut buf = amps.to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.scratch_len()];
        if forward {
            self.forward_in_place(&mut buf, &mut scratch);
        } else {
            self.inverse_in_place(&mut buf, &mut scratch);
        }
        buf
    }
}

/// State in position representation.
#[derive(Clone, Debug)]
pub struct WaveState {
    grid: Grid,
    amps: Vec<C64>,
}

/// State in momentum representation (amplitudes ordered like [`Grid::momenta`]).
#[derive(Clone, Debug)]
pub struct MomentumState {
    grid: Grid,
    amps: Vec<C64>,
}

macro_rules! linear_state {
    ($ty:ident, $measure:ident) => {
        impl $ty {
            pub fn from_amplitudes(grid: &Grid, amps: Vec<C64>) -> Result<Self> {
                if amps.len() != grid.n() {
                    return Err(Error::LengthMismatch {
                        expected: grid.n(),
                        got: amps.len(),
                    });
                }
                Ok(Self {
                    grid: grid.clone(),
                    amps,
                })
            }

            pub fn zeros(grid: &Grid) -> Self {
                Self {
                    grid: grid.clone(),
                    amps: vec![C64::new(0.0, 0.0); grid.n()],
                }
            }

            pub fn grid(&self) -> &Grid {
                &self.grid
            }

            pub fn amplitudes(&self) -> &[C64] {
                &self.amps
            }

            pub fn amplitudes_mut(&mut self) -> &mut [C64] {
                &mut self.amps
            }

            pub fn into_amplitudes(self) -> Vec<C64> {
                self.amps
            }

            fn measure(&self) -> f64 {
                self.grid.$measure()
            }

            pub fn norm_sqr(&self) -> f64 {
                self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.measure()
            }

            pub fn norm(&self) -> f64 {
                self.norm_sqr().sqrt()
            }

            /// `<self, other>`, antilinear in `self`.
            pub fn inner(&self, other: &Self) -> C64 {
                debug_assert_eq!(self.grid, other.grid);
                self.amps
                    .iter()
                    .zip(&other.amps)
                    .map(|(a, b)| a.conj() * b)
                    .sum::<C64>()
                    * self.measure()
            }

            pub fn scaled(mut self, factor: C64) -> Self {
                self.amps.iter_mut().for_each(|a| *a *= factor);
                self
            }

            pub fn normalized(self) -> Result<Self> {
                let norm = self.norm();
                if !(norm > 0.0 && norm.is_finite()) {
                    return Err(Error::ZeroState);
                }
                Ok(self.scaled(C64::new(1.0 / norm, 0.0)))
            }

            /// `self + factor * other`.
            pub fn axpy(mut self, factor: C64, other: &Self) -> Self {
                debug_assert_eq!(self.grid, other.grid);
                for (a, b) in self.amps.iter_mut().zip(&other.amps) {
                    *a += factor * b;
                }
                self
            }

            pub fn add(self, other: &Self) -> Self {
                self.axpy(C64::new(1.0, 0.0), other)
            }

            pub fn sub(self, other: &Self) -> Self {
                self.axpy(C64::new(-1.0, 0.0), other)
            }

            /// `|| self - other ||`.
            pub fn distance(&self, other: &Self) -> f64 {
                let sum: f64 = self
                    .amps
                    .iter()
                    .zip(&other.amps)
                    .map(|(a, b)| (a - b).norm_sqr())
                    .sum();
                (sum * self.measure()).sqrt()
            }
        }
    };
}

linear_state!(WaveState, dx);
linear_state!(MomentumState, dp);

impl WaveState {
    pub fn from_fn(grid: &Grid, psi: impl Fn(f64) -> C64) -> Self {
        let amps = grid.positions().iter().map(|&x| psi(x)).collect();
        Self {
            grid: grid.clone(),
            amps,
        }
    }

    /// Normalized Gaussian packet `exp(-(x-x0)^2 / (4 sigma^2) + i k0 x)`.
    pub fn gaussian(grid: &Grid, x0: f64, sigma: f64, k0: f64) -> Result<Self> {
        Self::from_fn(grid, |x| {
            let d = x - x0;
            C64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
        })
        .normalized()
    }

    pub fn to_momentum(&self) -> MomentumState {
        MomentumState {
            grid: self.grid.clone(),
            amps: self.grid.transform(&self.amps, true),
        }
    }

    /// Multiplication by `g(X)`.
    pub fn apply_x_fn(&self, g: impl Fn(f64) -> C64) -> Self {
        let amps = self
            .amps
            .iter()
            .zip(self.grid.positions())
            .map(|(a, &x)| a * g(x))
            .collect();
        Self {
            grid: self.grid.clone(),
            amps,
        }
    }

    /// `g(P) psi`, evaluated through the momentum representation.
    pub fn apply_p_fn(&self, g: impl Fn(f64) -> C64) -> Self {
        self.to_momentum().apply_p_fn(g).to_position()
    }

    /// `<psi, w(X) psi>` for a real weight.
    pub fn expectation_x(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.amps
            .iter()
            .zip(self.grid.positions())
            .map(|(a, &x)| w(x) * a.norm_sqr())
            .sum::<f64>()
            * self.grid.dx()
    }

    /// Mass within `fraction * length` of either edge of the periodic box.
    pub fn boundary_mass(&self, fraction: f64) -> f64 {
        let band = fraction * self.grid.length();
        let lo = self.grid.x_min() + band;
        let hi = self.grid.x_max() - band;
        self.expectation_x(|x| if x < lo || x > hi { 1.0 } else { 0.0 })
    }
}

impl MomentumState {
    pub fn from_fn(grid: &Grid, phi: impl Fn(f64) -> C64) -> Self {
        let amps = grid.momenta().iter().map(|&p| phi(p)).collect();
        Self {
            grid: grid.clone(),
            amps,
        }
    }

    pub fn to_position(&self) -> WaveState {
        WaveState {
            grid: self.grid.clone(),
            amps: self.grid.transform(&self.amps, false),
        }
    }

    /// Multiplication by `g(P)`.
    pub fn apply_p_fn(&self, g: impl Fn(f64) -> C64) -> Self {
        let amps = self
            .amps
            .iter()
            .zip(self.grid.momenta())
            .map(|(a, &p)| a * g(p))
            .collect();
        Self {
            grid: self.grid.clone(),
            amps,
        }
    }

    /// `g(X) phi`, evaluated through the position representation.
    pub fn apply_x_fn(&self, g: impl Fn(f64) -> C64) -> Self {
        self.to_position().apply_x_fn(g).to_momentum()
    }

    /// `X phi`.
    pub fn apply_position(&self) -> Self {
        self.apply_x_fn(|x| C64::new(x, 0.0))
    }

    /// `<phi, w(P) phi>` for a real weight.
    pub fn expectation_p(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.amps
            .iter()
            .zip(self.grid.momenta())
            .map(|(a, &p)| w(p) * a.norm_sqr())
            .sum::<f64>()
            * self.grid.dp()
    }

    /// Mass carried by lattice momenta where `pred(p)` holds.
    pub fn mass_where(&self, pred: impl Fn(f64) -> bool) -> f64 {
        self.expectation_p(|p| if pred(p) { 1.0 } else { 0.0 })
    }
}

/// Smooth plateau window `eta(E)` on an energy interval.
///
/// `eta = 1` on `[e_lo + ramp, e_hi - ramp]`, `eta = 0` outside `[e_lo, e_hi]`,
/// with C-infinity ramps in between. `ramp = 0` gives the sharp indicator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EnergyWindow {
    pub e_lo: f64,
    pub e_hi: f64,
    pub ramp: f64,
}

impl EnergyWindow {
    pub fn new(e_lo: f64, e_hi: f64, ramp: f64) -> Result<Self> {
        if !(e_lo < e_hi) || ramp < 0.0 || 2.0 * ramp > e_hi - e_lo {
            return Err(Error::InvalidWindow(format!(
                "window [{e_lo}, {e_hi}] with ramp {ramp}"
            )));
        }
        Ok(Self { e_lo, e_hi, ramp })
    }

    /// Window on `|p| in [k_lo, k_hi]` for `omega(p) = p^2`, ramps taking
    /// `ramp_fraction` of the energy width on each side.
    pub fn for_momenta(k_lo: f64, k_hi: f64, ramp_fraction: f64) -> Result<Self> {
        let (e_lo, e_hi) = (k_lo * k_lo, k_hi * k_hi);
        Self::new(e_lo, e_hi, ramp_fraction * (e_hi - e_lo))
    }

    pub fn eval(&self, e: f64) -> f64 {
        if e <= self.e_lo || e >= self.e_hi {
            return if self.ramp == 0.0 && (e == self.e_lo || e == self.e_hi) {
                1.0
            } else {
                0.0
            };
        }
        if self.ramp == 0.0 {
            return 1.0;
        }
        let rise = smooth_step((e - self.e_lo) / self.ramp);
        let fall = smooth_step((self.e_hi - e) / self.ramp);
        rise * fall
    }

    /// Distance between the window support and the nearest critical value.
    pub fn distance_to(&self, critical: &[f64]) -> f64 {
        critical
            .iter()
            .map(|&c| {
                if c < self.e_lo {
                    self.e_lo - c
                } else if c > self.e_hi {
                    c - self.e_hi
                } else {
                    0.0
                }
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `eta(omega(P)) psi`, refusing windows closer than `margin` to the
    /// critical set of the dispersion.
    pub fn apply(
        &self,
        dispersion: &Dispersion,
        psi: &MomentumState,
        margin: f64,
    ) -> Result<MomentumState> {
        let critical = dispersion.critical_values();
        let distance = self.distance_to(&critical);
        if distance < margin {
            return Err(Error::WindowTouchesThreshold { distance, margin });
        }
        Ok(psi.apply_p_fn(|p| C64::new(self.eval(dispersion.omega(p)), 0.0)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_arithmetic() {
        let g = Grid::new(16, -1.0, 1.0).unwrap();
        assert_relative_eq!(g.dx(), 0.125);
        assert_relative_eq!(g.dp(), PI, epsilon = 1e-15);
        assert_relative_eq!(g.momenta()[0], -PI / g.dx(), epsilon = 1e-12);
        assert_eq!(g.momenta()[g.zero_momentum_index()], 0.0);
        assert!(g.momenta().windows(2).all(|w| w[1] > w[0]));

        let g = Grid::new(4096, -200.0, 200.0).unwrap();
        assert_relative_eq!(g.dx(), 0.09765625);
    }

    #[test]
    fn grid_rejects_bad_input() {
        assert!(Grid::new(15, -1.0, 1.0).is_err());
        assert!(Grid::new(8, -1.0, 1.0).is_err());
        assert!(Grid::new(24, -1.0, 1.0).is_err());
        assert!(Grid::new(16, 1.0, 1.0).is_err());
        assert!(Grid::new(16, 2.0, -1.0).is_err());
    }

    #[test]
    fn gaussian_momentum_center() {
        let g = Grid::new(1024, -40.0, 40.0).unwrap();
        let psi = WaveState::gaussian(&g, 0.0, 1.0, 5.0).unwrap();
        let phi = psi.to_momentum();
        let mean = phi.expectation_p(|p| p);
        assert_relative_eq!(mean, 5.0, epsilon = 1e-10);
        assert_relative_eq!(phi.norm(), 1.0, epsilon = 1e-12);
        // peak sits on the lattice point nearest p = 5
        let (imax, _) = phi
            .amplitudes()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert!((g.momenta()[imax] - 5.0).abs() <= g.dp() / 2.0);
    }

    #[test]
    fn zero_state_transforms_to_zero() {
        let g = Grid::new(64, -5.0, 5.0).unwrap();
        let z = WaveState::zeros(&g).to_momentum();
        assert!(z.amplitudes().iter().all(|a| a.norm() == 0.0));
        assert!(WaveState::zeros(&g).normalized().is_err());
    }

    #[test]
    fn functional_calculus_examples() {
        let g = Grid::new(512, -30.0, 30.0).unwrap();
        let psi = WaveState::gaussian(&g, 1.0, 1.5, 2.0).unwrap();
        let same = psi.apply_x_fn(|_| C64::new(1.0, 0.0));
        assert_eq!(same.distance(&psi), 0.0);

        let twice = psi
            .apply_x_fn(|x| C64::new(x, 0.0))
            .apply_x_fn(|x| C64::new(x, 0.0));
        let once = psi.apply_x_fn(|x| C64::new(x * x, 0.0));
        assert!(twice.distance(&once) < 1e-12);

        let evolved = psi.apply_p_fn(|p| C64::from_polar(1.0, -3.0 * p * p));
        assert_relative_eq!(evolved.norm(), psi.norm(), epsilon = 1e-12);
    }

    #[test]
    fn boundary_mass_of_centered_packet_is_tiny() {
        let g = Grid::new(1024, -50.0, 50.0).unwrap();
        let psi = WaveState::gaussian(&g, 0.0, 1.0, 1.0).unwrap();
        assert!(psi.boundary_mass(0.1) < 1e-30);
        let edge = WaveState::gaussian(&g, 48.0, 1.0, 1.0).unwrap();
        assert!(edge.boundary_mass(0.1) > 0.4);
    }

    #[test]
    fn window_shape() {
        let w = EnergyWindow::new(1.0, 4.0, 0.5).unwrap();
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(2.5), 1.0);
        assert_eq!(w.eval(4.0), 0.0);
        let mid = w.eval(1.25);
        assert!(mid > 0.0 && mid < 1.0);
        assert!(EnergyWindow::new(1.0, 2.0, 0.6).is_err());
        assert!(EnergyWindow::new(2.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn window_examples() {
        let g = Grid::new(2048, -100.0, 100.0).unwrap();
        let free = Dispersion::quadratic();
        let psi = WaveState::gaussian(&g, 0.0, 4.0, 5.5).unwrap().to_momentum();

        // eta = 1 on the whole numerical range
        let pmax = g.momenta()[0].abs();
        let full = EnergyWindow::new(0.5, 2.0 * pmax * pmax, 0.0).unwrap();
        let kept = full.apply(&free, &psi, 0.1).unwrap();
        // only the lattice points with p^2 < 0.5 are dropped, where psi is ~1e-300
        assert!(kept.distance(&psi) < 1e-12);

        // disjoint supports: eta on [1,4], state at |p| in [5,6]
        let narrow = MomentumState::from_fn(&g, |p| {
            if (5.0..=6.0).contains(&p) {
                C64::new(((p - 5.0) * (6.0 - p)).max(0.0), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let low = EnergyWindow::new(1.0, 4.0, 0.3).unwrap();
        let out = low.apply(&free, &narrow, 0.1).unwrap();
        assert_eq!(out.norm(), 0.0);

        // plateau window is idempotent wherever eta is 0 or 1
        let plateau = EnergyWindow::new(16.0, 49.0, 0.0).unwrap();
        let once = plateau.apply(&free, &psi, 0.1).unwrap();
        let twice = plateau.apply(&free, &once, 0.1).unwrap();
        assert!(twice.distance(&once) < 1e-12);

        // too close to kappa(H0) = {0}
        let touching = EnergyWindow::new(0.01, 4.0, 0.1).unwrap();
        assert!(touching.apply(&free, &psi, 0.1).is_err());
    }
}
