//! Wave operators, the scattering operator and its stationary 2x2 matrix,
//! the energy representation of `H0 = P^2` and the Wigner-Smith matrix.
//!
//! Channel convention: index 0 is `p > 0` (incoming from the left,
//! outgoing to the right), index 1 is `p < 0`. In the energy
//! representation `phi_pm(E) = (2k)^{-1/2} phi_hat(+-k)`, `k = sqrt(E)`, and
//! `S(E) = [[t_l, r_r], [r_l, t_r]]` acts on `(phi_+, phi_-)`.

use crate::error::{Error, Result};
use crate::grid::{Grid, MomentumState, WaveState, C64};
use crate::hamiltonian::{evolve_free, Potential, Propagator};

pub type Mat2 = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

pub fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint(a: &Mat2) -> Mat2 {
    [
        [a[0][0].conj(), a[1][0].conj()],
        [a[0][1].conj(), a[1][1].conj()],
    ]
}

/// Largest entry modulus of `a - b`.
pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (0..4)
        .map(|i| (a[i / 2][i % 2] - b[i / 2][i % 2]).norm())
        .fold(0.0, f64::max)
}

pub const IDENTITY: Mat2 = [[ONE, ZERO], [ZERO, ONE]];

/// Stationary scattering amplitudes at one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SMatrixSample {
    pub energy: f64,
    pub k: f64,
    pub t_l: C64,
    pub r_l: C64,
    pub t_r: C64,
    pub r_r: C64,
}

impl SMatrixSample {
    pub fn matrix(&self) -> Mat2 {
        [[self.t_l, self.r_r], [self.r_l, self.t_r]]
    }

    /// `max |(S*S - I)_ij|`.
    pub fn unitarity_residual(&self) -> f64 {
        let s = self.matrix();
        max_abs_diff(&mat_mul(&adjoint(&s), &s), &IDENTITY)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StationaryOptions {
    /// Minimal admissible energy; `kappa(H0) = {0}`.
    pub threshold_margin: f64,
    /// Cell width for sampling smooth potentials.
    pub sample_step: f64,
}

impl Default for StationaryOptions {
    fn default() -> Self {
        Self {
            threshold_margin: 1e-3,
            sample_step: 1e-3,
        }
    }
}

/// Real transfer matrix of `(psi, psi')` across one constant piece,
/// returned as `(c, s_over_q, q_s)` with `M = [[c, s/q], [-q s, c]]`.
fn piece_matrix(energy: f64, v: f64, len: f64) -> (f64, f64, f64) {
    let d = energy - v;
    let q = d.abs().sqrt();
    let ql = q * len;
    if ql < 1e-4 {
        // series in d L^2, valid on both sides of d = 0
        let z = d * len * len;
        let c = 1.0 - z / 2.0 + z * z / 24.0;
        let s_over_q = len * (1.0 - z / 6.0 + z * z / 120.0);
        let q_s = d * len * (1.0 - z / 6.0 + z * z / 120.0);
        return (c, s_over_q, q_s);
    }
    if d > 0.0 {
        (ql.cos(), ql.sin() / q, q * ql.sin())
    } else {
        (ql.cosh(), ql.sinh() / q, -q * ql.sinh())
    }
}

const RENORM_LIMIT: f64 = 1e100;

/// Propagates `(psi, psi')` across the pieces, forward or backward, keeping
/// the vector bounded and accumulating the discarded log-scale.
fn sweep(
    energy: f64,
    pieces: &[(f64, f64, f64)],
    start: [C64; 2],
    forward: bool,
) -> Result<([C64; 2], f64)> {
    let mut v = start;
    let mut log_scale = 0.0;
    let mut apply = |len: f64, pot: f64| -> Result<()> {
        let (c, s_over_q, q_s) = piece_matrix(energy, pot, len);
        let (b, cc) = if forward {
            (s_over_q, -q_s)
        } else {
            (-s_over_q, q_s)
        };
        v = [c * v[0] + b * v[1], cc * v[0] + c * v[1]];
        let size = v[0].norm().max(v[1].norm());
        if !size.is_finite() {
            return Err(Error::TransferOverflow(energy));
        }
        if size > RENORM_LIMIT {
            v = [v[0] / size, v[1] / size];
            log_scale += size.ln();
        }
        Ok(())
    };
    // split long evanescent pieces so cosh/sinh stay finite
    let mut step = |&(lo, hi, pot): &(f64, f64, f64)| -> Result<()> {
        let len = hi - lo;
        let q = (energy - pot).abs().sqrt();
        let parts = ((q * len) / 50.0).ceil().max(1.0) as usize;
        (0..parts).try_for_each(|_| apply(len / parts as f64, pot))
    };
    if forward {
        pieces.iter().try_for_each(&mut step)?;
    } else {
        pieces.iter().rev().try_for_each(&mut step)?;
    }
    Ok((v, log_scale))
}

fn contiguous_pieces(potential: &Potential, step: f64) -> Vec<(f64, f64, f64)> {
    let raw = potential.pieces(step);
    let mut out: Vec<(f64, f64, f64)> = Vec::with_capacity(raw.len());
    for piece in raw {
        if let Some(&(_, prev_hi, _)) = out.last() {
            if piece.0 > prev_hi {
                out.push((prev_hi, piece.0, 0.0));
            }
        }
        out.push(piece);
    }
    out
}

/// Stationary S-matrix by 2x2 transfer-matrix accumulation across the
/// piecewise-constant potential.
pub fn stationary_smatrix(
    potential: &Potential,
    energy: f64,
    opts: &StationaryOptions,
) -> Result<SMatrixSample> {
    if !(energy > 0.0) {
        return Err(Error::InadmissibleEnergy {
            energy,
            reason: "energy must be positive".into(),
        });
    }
    if energy < opts.threshold_margin {
        return Err(Error::InadmissibleEnergy {
            energy,
            reason: format!("within {} of the threshold", opts.threshold_margin),
        });
    }
    let k = energy.sqrt();
    let pieces = contiguous_pieces(potential, opts.sample_step);
    if pieces.is_empty() || potential.is_zero() {
        return Ok(SMatrixSample {
            energy,
            k,
            t_l: ONE,
            r_l: ZERO,
            t_r: ONE,
            r_r: ZERO,
        });
    }
    let x_l = pieces.first().unwrap().0;
    let x_r = pieces.last().unwrap().1;
    let ik = C64::new(0.0, k);
    let plane = |x: f64, sign: f64| C64::from_polar(1.0, sign * k * x);

    // left incidence: t_l e^{ikx} on the right
    let start = [plane(x_r, 1.0), ik * plane(x_r, 1.0)];
    let (v, log_scale) = sweep(energy, &pieces, start, false)?;
    let a = (v[0] + v[1] / ik) * plane(x_l, -1.0) * 0.5;
    let b = (v[0] - v[1] / ik) * plane(x_l, 1.0) * 0.5;
    let t_l = (-log_scale).exp() / a;
    let r_l = b / a;

    // right incidence: t_r e^{-ikx} on the left
    let start = [plane(x_l, -1.0), -ik * plane(x_l, -1.0)];
    let (v, log_scale) = sweep(energy, &pieces, start, true)?;
    let c = (v[0] + v[1] / ik) * plane(x_r, -1.0) * 0.5;
    let d = (v[0] - v[1] / ik) * plane(x_r, 1.0) * 0.5;
    let t_r = (-log_scale).exp() / d;
    let r_r = c / d;

    Ok(SMatrixSample {
        energy,
        k,
        t_l,
        r_l,
        t_r,
        r_r,
    })
}

/// Wigner-Smith matrix `Q(E) = -i S*(E) dS/dE(E)` at one energy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WignerSmithSample {
    pub energy: f64,
    pub smatrix: SMatrixSample,
    pub q: Mat2,
    /// Proper delay times, ascending.
    pub eigenvalues: [f64; 2],
    /// `max |(Q - Q*)_ij|`.
    pub hermiticity: f64,
    pub step: f64,
    pub richardson: bool,
}

pub const HERMITICITY_TOL: f64 = 1e-6;

fn central_difference(
    potential: &Potential,
    energy: f64,
    h: f64,
    opts: &StationaryOptions,
) -> Result<Mat2> {
    let up = stationary_smatrix(potential, energy + h, opts)?.matrix();
    let down = stationary_smatrix(potential, energy - h, opts)?.matrix();
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (up[i][j] - down[i][j]) / (2.0 * h);
        }
    }
    Ok(out)
}

fn hermitian_eigenvalues(q: &Mat2) -> [f64; 2] {
    let a = q[0][0].re;
    let d = q[1][1].re;
    let b = 0.5 * (q[0][1] + q[1][0].conj());
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    [mean - radius, mean + radius]
}

/// `Q(E)` with `dS/dE` by central differences of step
/// `sqrt(spacing * 1e-5)`, Richardson-refined when the Hermiticity residual
/// exceeds [`HERMITICITY_TOL`].
pub fn wigner_smith_at(
    potential: &Potential,
    energy: f64,
    spacing: f64,
    opts: &StationaryOptions,
) -> Result<WignerSmithSample> {
    let smatrix = stationary_smatrix(potential, energy, opts)?;
    let s_adj = adjoint(&smatrix.matrix());
    let mut h = (spacing.abs() * 1e-5).sqrt();
    // keep the stencil above the threshold margin
    h = h.min(0.5 * (energy - opts.threshold_margin));
    let minus_i = C64::new(0.0, -1.0);
    let assemble = |ds: &Mat2| {
        let mut q = mat_mul(&s_adj, ds);
        q.iter_mut().flatten().for_each(|z| *z *= minus_i);
        let herm = max_abs_diff(&q, &adjoint(&q));
        (q, herm)
    };
    let coarse = central_difference(potential, energy, h, opts)?;
    let (mut q, mut herm) = assemble(&coarse);
    let mut richardson = false;
    if herm > HERMITICITY_TOL {
        let fine = central_difference(potential, energy, 0.5 * h, opts)?;
        let mut ds = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                ds[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
            }
        }
        (q, herm) = assemble(&ds);
        richardson = true;
        if herm > HERMITICITY_TOL {
            return Err(Error::WignerSmithCoarse {
                energy,
                residual: herm,
            });
        }
    }
    Ok(WignerSmithSample {
        energy,
        smatrix,
        q,
        eigenvalues: hermitian_eigenvalues(&q),
        hermiticity: herm,
        step: h,
        richardson,
    })
}

/// Wigner-Smith samples over an increasing energy lattice; the difference
/// step at each point uses the local lattice spacing.
pub fn wigner_smith(
    potential: &Potential,
    energies: &[f64],
    opts: &StationaryOptions,
) -> Result<Vec<WignerSmithSample>> {
    use rayon::prelude::*;
    let n = energies.len();
    (0..n)
        .into_par_iter()
        .map(|i| {
            let spacing = match n {
                0 | 1 => 1e-3,
                _ if i == 0 => energies[1] - energies[0],
                _ if i == n - 1 => energies[n - 1] - energies[n - 2],
                _ => 0.5 * (energies[i + 1] - energies[i - 1]),
            };
            wigner_smith_at(potential, energies[i], spacing, opts)
        })
        .collect()
}

/// Two-channel energy representation of a state for `omega(p) = p^2`.
#[derive(Clone, Debug)]
pub struct EnergyRepState {
    grid: Grid,
    /// `k_i = i dp`, `i = 1 ..= n/2 - 1`.
    pub momenta: Vec<f64>,
    pub energies: Vec<f64>,
    /// Quadrature weights `dE_i = 2 k_i dp`.
    pub weights: Vec<f64>,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

/// Relative mass tolerated below the threshold margin.
pub const THRESHOLD_MASS_TOL: f64 = 1e-14;

/// Checks that `phi` carries (relatively) no mass at `|p| < margin`.
pub fn check_threshold_margin(phi: &MomentumState, margin: f64) -> Result<()> {
    let total = phi.norm_sqr();
    let low = phi.mass_where(|p| p.abs() < margin);
    if low > THRESHOLD_MASS_TOL * total.max(f64::MIN_POSITIVE) {
        return Err(Error::ThresholdMargin { mass: low, margin });
    }
    Ok(())
}

impl EnergyRepState {
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn norm_sqr(&self) -> f64 {
        self.plus
            .iter()
            .zip(&self.minus)
            .zip(&self.weights)
            .map(|((a, b), w)| (a.norm_sqr() + b.norm_sqr()) * w)
            .sum()
    }

    /// `sum_i dE_i <phi(E_i), M(E_i) chi(E_i)>` for a per-energy 2x2 kernel.
    pub fn sandwich(&self, chi: &EnergyRepState, kernel: impl Fn(usize) -> Mat2) -> C64 {
        (0..self.energies.len())
            .map(|i| {
                let m = kernel(i);
                let out0 = m[0][0] * chi.plus[i] + m[0][1] * chi.minus[i];
                let out1 = m[1][0] * chi.plus[i] + m[1][1] * chi.minus[i];
                (self.plus[i].conj() * out0 + self.minus[i].conj() * out1) * self.weights[i]
            })
            .sum()
    }

    /// Inverse transform back to the momentum lattice.
    pub fn to_momentum(&self) -> MomentumState {
        let mut phi = MomentumState::zeros(&self.grid);
        let zero = self.grid.zero_momentum_index();
        let amps = phi.amplitudes_mut();
        for (i, &k) in self.momenta.iter().enumerate() {
            let jac = (2.0 * k).sqrt();
            amps[zero + i + 1] = self.plus[i] * jac;
            amps[zero - i - 1] = self.minus[i] * jac;
        }
        phi
    }
}

/// `phi_pm(E) = (2k)^{-1/2} phi_hat(+-k)`; refuses states with mass below
/// `margin` in `|p|`.
pub fn to_energy_rep(phi: &MomentumState, margin: f64) -> Result<EnergyRepState> {
    check_threshold_margin(phi, margin)?;
    let grid = phi.grid().clone();
    let zero = grid.zero_momentum_index();
    let dp = grid.dp();
    let count = grid.n() / 2 - 1;
    let amps = phi.amplitudes();
    let mut out = EnergyRepState {
        grid: grid.clone(),
        momenta: Vec::with_capacity(count),
        energies: Vec::with_capacity(count),
        weights: Vec::with_capacity(count),
        plus: Vec::with_capacity(count),
        minus: Vec::with_capacity(count),
    };
    for i in 1..=count {
        let k = grid.momenta()[zero + i];
        let jac = (2.0 * k).sqrt();
        out.momenta.push(k);
        out.energies.push(k * k);
        out.weights.push(2.0 * k * dp);
        out.plus.push(amps[zero + i] / jac);
        out.minus.push(amps[zero - i] / jac);
    }
    Ok(out)
}

/// `(S phi)_hat` from stationary amplitudes: each `|p|` pair is mixed by `S(p^2)`.
pub fn apply_stationary(
    potential: &Potential,
    phi: &MomentumState,
    opts: &StationaryOptions,
    margin: f64,
) -> Result<MomentumState> {
    let rep = to_energy_rep(phi, margin)?;
    let mut out = rep.clone();
    for i in 0..rep.energies.len() {
        if rep.plus[i].norm() == 0.0 && rep.minus[i].norm() == 0.0 {
            continue;
        }
        let s = stationary_smatrix(potential, rep.energies[i], opts)?.matrix();
        out.plus[i] = s[0][0] * rep.plus[i] + s[0][1] * rep.minus[i];
        out.minus[i] = s[1][0] * rep.plus[i] + s[1][1] * rep.minus[i];
    }
    Ok(out.to_momentum())
}

/// Settings for the time-dependent wave and scattering operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeDependentOptions {
    /// Preparation time `T_- < 0`.
    pub t_minus: f64,
    /// Read-out time `T_+ > 0`.
    pub t_plus: f64,
    /// Cauchy tolerance on doubling the horizons.
    pub cauchy_tol: f64,
    /// Boundary-mass abort threshold.
    pub boundary_limit: f64,
    /// Width of the monitored edge band as a fraction of the box.
    pub boundary_fraction: f64,
}

impl Default for TimeDependentOptions {
    fn default() -> Self {
        Self {
            t_minus: -30.0,
            t_plus: 30.0,
            cauchy_tol: 1e-6,
            boundary_limit: 1e-8,
            boundary_fraction: 0.05,
        }
    }
}

fn check_boundary(psi: &WaveState, opts: &TimeDependentOptions, time: f64) -> Result<()> {
    let mass = psi.boundary_mass(opts.boundary_fraction);
    if mass > opts.boundary_limit {
        return Err(Error::BoundaryMass {
            mass,
            limit: opts.boundary_limit,
            time,
        });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct MollerResult {
    /// `W_- phi` at time zero.
    pub state: WaveState,
    /// `|| W(2T) phi - W(T) phi ||`.
    pub cauchy_residual: f64,
    /// `|| W_- phi - phi ||`.
    pub distance_from_input: f64,
}

fn moller_at(prop: &Propagator, phi: &WaveState, t: f64, opts: &TimeDependentOptions) -> Result<WaveState> {
    let prepared = evolve_free(phi, prop.dispersion(), t);
    check_boundary(&prepared, opts, t)?;
    Ok(prop.evolve(&prepared, -t))
}

/// `W_- phi ~ e^{iHT} e^{-iH0 T} phi` at `T = opts.t_minus`, with the Cauchy
/// check against `2T`.
pub fn moller_minus(prop: &Propagator, phi: &WaveState, opts: &TimeDependentOptions) -> Result<MollerResult> {
    let t = -opts.t_minus.abs();
    let state = moller_at(prop, phi, t, opts)?;
    let deeper = moller_at(prop, phi, 2.0 * t, opts)?;
    let cauchy_residual = deeper.distance(&state);
    if cauchy_residual > opts.cauchy_tol {
        return Err(Error::MollerNotConverged {
            residual: cauchy_residual,
            tol: opts.cauchy_tol,
        });
    }
    let distance_from_input = state.distance(phi);
    Ok(MollerResult {
        state,
        cauchy_residual,
        distance_from_input,
    })
}

#[derive(Clone, Debug)]
pub struct ScatteringResult {
    pub state: WaveState,
    pub cauchy_residual: Option<f64>,
}

fn scatter_once(prop: &Propagator, phi: &WaveState, t_minus: f64, t_plus: f64, opts: &TimeDependentOptions) -> Result<WaveState> {
    let prepared = evolve_free(phi, prop.dispersion(), t_minus);
    check_boundary(&prepared, opts, t_minus)?;
    let out = prop.evolve(&prepared, t_plus - t_minus);
    check_boundary(&out, opts, t_plus)?;
    Ok(evolve_free(&out, prop.dispersion(), -t_plus))
}

/// `S phi ~ e^{iH0 T+} e^{-iH(T+ - T-)} e^{-iH0 T-} phi`. With `check`, the
/// horizons are doubled and the difference must stay below the Cauchy tolerance.
pub fn scattering_apply(
    prop: &Propagator,
    phi: &WaveState,
    opts: &TimeDependentOptions,
    check: bool,
) -> Result<ScatteringResult> {
    let (tm, tp) = (-opts.t_minus.abs(), opts.t_plus.abs());
    let state = scatter_once(prop, phi, tm, tp, opts)?;
    let cauchy_residual = if check {
        let deeper = scatter_once(prop, phi, 2.0 * tm, 2.0 * tp, opts)?;
        let residual = deeper.distance(&state);
        if residual > opts.cauchy_tol {
            return Err(Error::MollerNotConverged {
                residual,
                tol: opts.cauchy_tol,
            });
        }
        Some(residual)
    } else {
        None
    };
    Ok(ScatteringResult {
        state,
        cauchy_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn free_smatrix_is_identity() {
        let s = stationary_smatrix(&Potential::Zero, 2.0, &StationaryOptions::default()).unwrap();
        assert_eq!(s.matrix(), IDENTITY);
    }

    #[test]
    fn rejects_threshold_energies() {
        let v = Potential::rectangular(1.0, 0.0, 1.0).unwrap();
        let opts = StationaryOptions::default();
        assert!(stationary_smatrix(&v, 0.0, &opts).is_err());
        assert!(stationary_smatrix(&v, -1.0, &opts).is_err());
        assert!(stationary_smatrix(&v, 1e-4, &opts).is_err());
    }

    #[test]
    fn unitarity_and_reciprocity() {
        let opts = StationaryOptions::default();
        for v in [
            Potential::rectangular(2.0, -0.5, 0.5).unwrap(),
            Potential::rectangular(-3.0, 0.2, 1.9).unwrap(),
            Potential::smooth(2.0, -0.5, 0.5, 0.4).unwrap(),
            Potential::samples(0.3, 0.1, vec![0.5, 2.0, -1.0, 4.0, 0.0, 1.5]).unwrap(),
        ] {
            for e in [0.05, 0.7, 1.0, 2.0, 2.5, 9.0, 40.0] {
                let s = stationary_smatrix(&v, e, &opts).unwrap();
                assert!(s.unitarity_residual() < 1e-10, "{v:?} at {e}");
                assert!((s.t_l - s.t_r).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn opaque_barrier_does_not_overflow() {
        let v = Potential::rectangular(1e4, 0.0, 10.0).unwrap();
        let s = stationary_smatrix(&v, 1.0, &StationaryOptions::default()).unwrap();
        assert!(s.t_l.norm() < 1e-100);
        assert!((s.r_l.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn barrier_at_its_own_energy() {
        // E = V0 inside the barrier uses the series branch
        let v = Potential::rectangular(2.0, -0.5, 0.5).unwrap();
        let s = stationary_smatrix(&v, 2.0, &StationaryOptions::default()).unwrap();
        let near = stationary_smatrix(&v, 2.0 + 1e-9, &StationaryOptions::default()).unwrap();
        assert!(s.unitarity_residual() < 1e-12);
        assert!((s.t_l - near.t_l).norm() < 1e-7);
    }

    #[test]
    fn free_wigner_smith_vanishes() {
        let q = wigner_smith(&Potential::Zero, &[1.0, 1.1, 1.2], &StationaryOptions::default()).unwrap();
        for s in q {
            assert!(s.q.iter().flatten().all(|z| z.norm() == 0.0));
        }
    }

    #[test]
    fn wigner_smith_is_hermitian() {
        let v = Potential::smooth(2.0, -0.5, 0.5, 0.4).unwrap();
        let energies: Vec<f64> = (0..40).map(|i| 3.0 + 0.3 * i as f64).collect();
        for s in wigner_smith(&v, &energies, &StationaryOptions::default()).unwrap() {
            assert!(s.hermiticity <= HERMITICITY_TOL);
            assert!(s.eigenvalues[0] <= s.eigenvalues[1]);
            // trace equals the sum of proper delays
            let tr = s.q[0][0].re + s.q[1][1].re;
            assert!((tr - s.eigenvalues[0] - s.eigenvalues[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn energy_rep_round_trip_and_channels() {
        let g = Grid::new(1024, -50.0, 50.0).unwrap();
        let psi = WaveState::gaussian(&g, -3.0, 2.0, 3.0).unwrap().to_momentum();
        let rep = to_energy_rep(&psi, 0.5).unwrap();
        assert!((rep.norm_sqr() - 1.0).abs() < 1e-8);
        assert!(rep.minus.iter().all(|a| a.norm() < 1e-12));
        assert!(rep.to_momentum().distance(&psi) < 1e-8);

        let slow = WaveState::gaussian(&g, 0.0, 2.0, 0.2).unwrap().to_momentum();
        assert!(matches!(to_energy_rep(&slow, 0.5), Err(Error::ThresholdMargin { .. })));
    }
}
