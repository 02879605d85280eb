//! Sojourn times in dilated regions `f(X/r)`, the symmetrized and
//! unsymmetrized time delays, their `r -> infinity` extrapolation, and the
//! two Eisenbud-Wigner expectations.
//!
//! One interacting trajectory serves every `r`: it starts at `-t_max` from
//! the free state `e^{i t_max H0} phi`, so that `e^{-itH} W_- phi` is
//! realized with preparation time `t_max`, and is sampled every
//! `sample_every` propagator steps up to `+t_max`. At the end
//! `S phi = e^{i t_max H0} psi(t_max)`, and the free integrands of `phi`
//! and `S phi` are evaluated on the same sample times.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{EnergyWindow, MomentumState, WaveState, C64};
use crate::hamiltonian::{evolve_free_momentum, Propagator};
use crate::localisation::LocalisationFunction;
use crate::mourre::ls_slope;
use crate::scattering::{
    scattering_apply, to_energy_rep, wigner_smith_at, Mat2, StationaryOptions,
    TimeDependentOptions,
};
use crate::time_operator::TimeOperator;

/// Time-dependent map `L(t): H -> H0` entering `T_{r,1}` and `T_2`.
pub trait QuasiInverse: Sync {
    fn apply(&self, t: f64, psi: &WaveState) -> WaveState;

    /// Lets the trajectory skip the copy for `L(t) = 1`.
    fn is_identity(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Identity;

impl QuasiInverse for Identity {
    fn apply(&self, _t: f64, psi: &WaveState) -> WaveState {
        psi.clone()
    }

    fn is_identity(&self) -> bool {
        true
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct DelayOptions {
    pub localisation: LocalisationFunction,
    pub r_values: Vec<f64>,
    /// Integration window `[-t_max, t_max]`; also the preparation time of the trajectory.
    pub t_max: f64,
    /// Propagator steps between samples of the integrands.
    pub sample_every: usize,
    /// Integrands must stay below `tail_eps * r` over the last `dwell` time units.
    pub tail_eps: f64,
    pub dwell: f64,
    /// Horizon before which the wave-operator difference must be below `tail_eps`.
    pub t_prep: f64,
    pub boundary_limit: f64,
    pub boundary_fraction: f64,
}

impl Default for DelayOptions {
    fn default() -> Self {
        Self {
            localisation: LocalisationFunction::default(),
            r_values: vec![18.75, 37.5, 75.0, 150.0],
            t_max: 80.0,
            sample_every: 10,
            tail_eps: 1e-8,
            dwell: 5.0,
            t_prep: -30.0,
            boundary_limit: 1e-8,
            boundary_fraction: 0.05,
        }
    }
}

/// Sojourn integrals for every `r`, all on one shared time grid.
#[derive(Clone, Debug, Serialize)]
pub struct SojournCurve {
    pub r_values: Vec<f64>,
    /// `T_r = T_{r,1} + T_2`.
    pub t_full: Vec<f64>,
    pub t_r1: Vec<f64>,
    pub t2: f64,
    pub t0_phi: Vec<f64>,
    pub t0_sphi: Vec<f64>,
    /// Symmetrized delay from the integral of the pointwise difference.
    pub tau: Vec<f64>,
    /// The same from separately integrated sojourn times.
    pub tau_naive: Vec<f64>,
    pub tau_in: Vec<f64>,
    /// Tail bounds of `T_r`, `T_r0(phi)`, `T_r0(S phi)`.
    pub tail_full: Vec<f64>,
    pub tail_phi: Vec<f64>,
    pub tail_sphi: Vec<f64>,
    pub t_max: f64,
    pub dt_sample: f64,
    /// Last time an integrand exceeded `tail_eps * r`, per r (absolute value).
    pub t_effective: Vec<f64>,
    pub max_boundary_mass: f64,
    /// Integrand decay exponents fitted on the outer half of each tail, per r.
    pub tail_exponent: Vec<f64>,
}

/// Wave-operator convergence diagnostics collected along the trajectory.
#[derive(Clone, Debug, Serialize)]
pub struct WaveOperatorDecay {
    /// `(t, ||(W_- - 1) e^{-itH0} phi||)` for sampled `t < 0`.
    pub samples: Vec<(f64, f64)>,
    pub integral: f64,
    /// Nonincreasing towards `-infinity` above the roundoff floor.
    pub monotone: bool,
    /// Largest value at `t <= t_prep`.
    pub max_before_prep: f64,
}

#[derive(Clone, Debug)]
pub struct SojournRun {
    pub curve: SojournCurve,
    pub decay: WaveOperatorDecay,
    pub s_phi: MomentumState,
    pub times: Vec<f64>,
    /// Integrand samples `[r][sample]` for `T_r`, `T_r0(phi)`, `T_r0(S phi)`.
    pub integrand_full: Vec<Vec<f64>>,
    pub integrand_phi: Vec<Vec<f64>>,
    pub integrand_sphi: Vec<Vec<f64>>,
}

const ROUNDOFF_FLOOR: f64 = 1e-12;

fn trapezoid(values: &[f64], h: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => h * (values.iter().sum::<f64>() - 0.5 * (values[0] + values[n - 1])),
    }
}

/// Bound on the neglected tails assuming decay at least like `t^{-2}`.
fn tail_bound(values: &[f64], t_max: f64) -> f64 {
    match values {
        [] => 0.0,
        [first, .., last] => (first.abs() + last.abs()) * t_max,
        [only] => only.abs() * t_max,
    }
}

fn weighted_density(amps: &[C64], weights: &[f64], dx: f64) -> f64 {
    amps.iter()
        .zip(weights)
        .map(|(a, w)| a.norm_sqr() * w)
        .sum::<f64>()
        * dx
}

/// Decay exponent of `|g(t)|` against `|t|` on the outer half of both tails.
fn decay_exponent(times: &[f64], g: &[f64]) -> f64 {
    let n = times.len();
    let quarter = n / 4;
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for i in (0..quarter).chain(n - quarter..n) {
        let v = g[i].abs();
        if v > 1e-300 && times[i] != 0.0 {
            x.push(times[i].abs().ln());
            y.push(v.ln());
        }
    }
    if x.len() < 2 {
        return f64::INFINITY;
    }
    -ls_slope(&x, &y)
}

/// Runs the shared trajectory and evaluates all sojourn integrals.
pub fn sojourn_run(
    prop: &Propagator,
    phi: &MomentumState,
    opts: &DelayOptions,
    quasi_inverse: &dyn QuasiInverse,
) -> Result<SojournRun> {
    if opts.r_values.is_empty() || opts.r_values.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::InvalidLocalisation("r values must be positive".into()));
    }
    let grid = prop.grid().clone();
    let dispersion = prop.dispersion().clone();
    let dx = grid.dx();
    let dt_sample = prop.dt() * opts.sample_every.max(1) as f64;
    let half = (opts.t_max / dt_sample).round() as usize;
    let t_max = half as f64 * dt_sample;
    let count = 2 * half + 1;
    let times: Vec<f64> = (0..count).map(|i| (i as f64 - half as f64) * dt_sample).collect();

    let tables: Vec<Vec<f64>> = opts
        .r_values
        .iter()
        .map(|&r| grid.positions().iter().map(|&x| opts.localisation.dilated(x, r)).collect())
        .collect();
    let nr = tables.len();

    let start = evolve_free_momentum(phi, &dispersion, -t_max).to_position();
    let mut stepper = prop.stepper(&start);
    let mut full = vec![vec![0.0; count]; nr];
    let mut free_phi = vec![vec![0.0; count]; nr];
    let mut t2_integrand = vec![0.0; count];
    let mut a4 = Vec::new();
    let mut max_boundary = 0.0f64;

    for (i, &t) in times.iter().enumerate() {
        let psi = stepper.state();
        let mass = psi.boundary_mass(opts.boundary_fraction);
        max_boundary = max_boundary.max(mass);
        if mass > opts.boundary_limit {
            return Err(Error::BoundaryMass {
                mass,
                limit: opts.boundary_limit,
                time: t,
            });
        }
        let mapped;
        let l_psi = if quasi_inverse.is_identity() {
            &psi
        } else {
            mapped = quasi_inverse.apply(t, &psi);
            &mapped
        };
        for (row, table) in full.iter_mut().zip(&tables) {
            row[i] = weighted_density(l_psi.amplitudes(), table, dx);
        }
        t2_integrand[i] = psi.norm_sqr() - l_psi.norm_sqr();

        let free = evolve_free_momentum(phi, &dispersion, t).to_position();
        for (row, table) in free_phi.iter_mut().zip(&tables) {
            row[i] = weighted_density(free.amplitudes(), table, dx);
        }
        if t < 0.0 {
            a4.push((t, psi.distance(&free)));
        }
        if i + 1 < count {
            for _ in 0..opts.sample_every.max(1) {
                stepper.advance();
            }
        }
    }

    let s_phi = evolve_free_momentum(&stepper.state().to_momentum(), &dispersion, -t_max);
    let sphi_rows: Vec<Vec<f64>> = times
        .par_iter()
        .map(|&t| {
            let free = evolve_free_momentum(&s_phi, &dispersion, t).to_position();
            tables
                .iter()
                .map(|table| weighted_density(free.amplitudes(), table, dx))
                .collect()
        })
        .collect();
    let free_sphi: Vec<Vec<f64>> = (0..nr)
        .map(|k| sphi_rows.iter().map(|row| row[k]).collect())
        .collect();

    let t2 = trapezoid(&t2_integrand, dt_sample);
    let mut curve = SojournCurve {
        r_values: opts.r_values.clone(),
        t_full: Vec::with_capacity(nr),
        t_r1: Vec::with_capacity(nr),
        t2,
        t0_phi: Vec::with_capacity(nr),
        t0_sphi: Vec::with_capacity(nr),
        tau: Vec::with_capacity(nr),
        tau_naive: Vec::with_capacity(nr),
        tau_in: Vec::with_capacity(nr),
        tail_full: Vec::with_capacity(nr),
        tail_phi: Vec::with_capacity(nr),
        tail_sphi: Vec::with_capacity(nr),
        t_max,
        dt_sample,
        t_effective: Vec::with_capacity(nr),
        max_boundary_mass: max_boundary,
        tail_exponent: Vec::with_capacity(nr),
    };
    let dwell_samples = ((opts.dwell / dt_sample).ceil() as usize).max(1).min(half);
    for (k, &r) in opts.r_values.iter().enumerate() {
        let threshold = opts.tail_eps * r;
        let (g, g0, gs) = (&full[k], &free_phi[k], &free_sphi[k]);
        for series in [g, g0, gs] {
            let head = &series[..dwell_samples];
            let tail = &series[count - dwell_samples..];
            if head.iter().chain(tail).any(|v| v.abs() > threshold) {
                return Err(Error::SojournDivergence { t_max });
            }
        }
        let t_r1 = trapezoid(g, dt_sample);
        let t0 = trapezoid(g0, dt_sample);
        let t0s = trapezoid(gs, dt_sample);
        let diff: Vec<f64> = (0..count).map(|i| g[i] + t2_integrand[i] - 0.5 * (g0[i] + gs[i])).collect();
        curve.t_r1.push(t_r1);
        curve.t_full.push(t_r1 + t2);
        curve.t0_phi.push(t0);
        curve.t0_sphi.push(t0s);
        curve.tau.push(trapezoid(&diff, dt_sample));
        curve.tau_naive.push(t_r1 + t2 - 0.5 * (t0 + t0s));
        let diff_in: Vec<f64> = (0..count).map(|i| g[i] + t2_integrand[i] - g0[i]).collect();
        curve.tau_in.push(trapezoid(&diff_in, dt_sample));
        curve.tail_full.push(tail_bound(g, t_max));
        curve.tail_phi.push(tail_bound(g0, t_max));
        curve.tail_sphi.push(tail_bound(gs, t_max));
        let last_above = (0..count)
            .filter(|&i| g[i].max(g0[i]).max(gs[i]) > threshold)
            .map(|i| times[i].abs())
            .fold(0.0, f64::max);
        curve.t_effective.push(last_above);
        curve.tail_exponent.push(decay_exponent(&times, g));
    }

    let integral = {
        let values: Vec<f64> = a4.iter().map(|&(_, d)| d).collect();
        trapezoid(&values, dt_sample)
    };
    // samples run forward in time, so towards -infinity means backwards
    let monotone = a4
        .windows(2)
        .all(|w| w[0].1 <= w[1].1 + ROUNDOFF_FLOOR.max(1e-9 * w[1].1));
    let max_before_prep = a4
        .iter()
        .filter(|&&(t, _)| t <= opts.t_prep)
        .map(|&(_, d)| d)
        .fold(0.0, f64::max);

    Ok(SojournRun {
        curve,
        decay: WaveOperatorDecay {
            samples: a4,
            integral,
            monotone,
            max_before_prep,
        },
        s_phi,
        times,
        integrand_full: full,
        integrand_phi: free_phi,
        integrand_sphi: free_sphi,
    })
}

/// `T_r0(phi)` alone, by exact free evolution on the symmetric time grid.
pub fn sojourn_free(
    phi: &MomentumState,
    dispersion: &crate::hamiltonian::Dispersion,
    r: f64,
    opts: &DelayOptions,
    dt_sample: f64,
) -> Result<f64> {
    let grid = phi.grid().clone();
    let table: Vec<f64> = grid.positions().iter().map(|&x| opts.localisation.dilated(x, r)).collect();
    let half = (opts.t_max / dt_sample).round() as i64;
    let values: Vec<f64> = (-half..=half)
        .into_par_iter()
        .map(|i| {
            let free = evolve_free_momentum(phi, dispersion, i as f64 * dt_sample).to_position();
            weighted_density(free.amplitudes(), &table, grid.dx())
        })
        .collect();
    let dwell = ((opts.dwell / dt_sample).ceil() as usize).max(1).min(values.len());
    let edge = values[..dwell].iter().chain(&values[values.len() - dwell..]);
    if edge.into_iter().any(|v| v.abs() > opts.tail_eps * r) {
        return Err(Error::SojournDivergence { t_max: half as f64 * dt_sample });
    }
    Ok(trapezoid(&values, dt_sample))
}

/// Fit `tau_r = tau_inf + c / r`.
#[derive(Clone, Debug, Serialize)]
pub struct Extrapolation {
    pub tau_inf: f64,
    pub c: f64,
    pub fit_residual: f64,
    pub error_bar: f64,
    /// Successive changes `|tau_{i+1} - tau_i|` fail to shrink with `r`.
    pub unreliable: bool,
    /// `tau_inf` refitted without the smallest `r`.
    pub jackknife: Option<f64>,
}

fn fit_inverse_r(r: &[f64], tau: &[f64]) -> (f64, f64, f64) {
    let x: Vec<f64> = r.iter().map(|r| 1.0 / r).collect();
    let c = if x.iter().any(|&v| (v - x[0]).abs() > 0.0) {
        ls_slope(&x, tau)
    } else {
        0.0
    };
    let n = x.len() as f64;
    let tau_inf = (tau.iter().sum::<f64>() - c * x.iter().sum::<f64>()) / n;
    let residual = x
        .iter()
        .zip(tau)
        .map(|(x, t)| (t - tau_inf - c * x).abs())
        .fold(0.0, f64::max);
    (tau_inf, c, residual)
}

pub fn extrapolate_delay(r_values: &[f64], tau: &[f64]) -> Result<Extrapolation> {
    if r_values.len() < 4 || tau.len() != r_values.len() {
        return Err(Error::TooFewRadii {
            needed: 4,
            got: r_values.len().min(tau.len()),
        });
    }
    let mut pairs: Vec<(f64, f64)> = r_values.iter().copied().zip(tau.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (r, t): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let (tau_inf, c, fit_residual) = fit_inverse_r(&r, &t);
    let last = *t.last().unwrap();
    let error_bar = fit_residual.max((last - tau_inf).abs());
    let floor = 1e-9 + 1e-6 * tau_inf.abs();
    // increments of a c/r sequence halve as r doubles
    let steps: Vec<f64> = t.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let unreliable = steps.windows(2).any(|w| w[1] > w[0] + floor);
    let jackknife = (r.len() >= 4).then(|| fit_inverse_r(&r[1..], &t[1..]).0);
    Ok(Extrapolation {
        tau_inf,
        c,
        fit_residual,
        error_bar,
        unreliable,
        jackknife,
    })
}

/// Variant A: `-<phi, S*(T_f S - S T_f) phi>` with the time-dependent `S`
/// and the formula realization of `T_f`.
pub fn ew_formula(
    prop: &Propagator,
    time_op: &TimeOperator,
    phi: &MomentumState,
    td: &TimeDependentOptions,
) -> Result<C64> {
    let s_phi = scattering_apply(prop, &phi.to_position(), td, false)?.state.to_momentum();
    let t_phi = time_op.apply_formula(phi)?;
    let s_t_phi = scattering_apply(prop, &t_phi.to_position(), td, false)?.state.to_momentum();
    let t_s_phi = time_op.apply_formula(&s_phi)?;
    Ok(s_phi.inner(&s_t_phi) - s_phi.inner(&t_s_phi))
}

/// Variant B: `int dE <phi(E), Q(E) phi(E)>` in the energy representation.
pub fn ew_spectral(
    potential: &crate::hamiltonian::Potential,
    phi: &MomentumState,
    stationary: &StationaryOptions,
    margin: f64,
) -> Result<C64> {
    let rep = to_energy_rep(phi, margin)?;
    let scale = rep
        .plus
        .iter()
        .chain(&rep.minus)
        .map(|a| a.norm())
        .fold(0.0, f64::max);
    let n = rep.energies.len();
    let q: Vec<Option<Mat2>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let weight = rep.plus[i].norm().max(rep.minus[i].norm());
            if weight <= 1e-14 * scale {
                return Ok(None);
            }
            let spacing = match i {
                0 => rep.energies[1] - rep.energies[0],
                _ if i == n - 1 => rep.energies[n - 1] - rep.energies[n - 2],
                _ => 0.5 * (rep.energies[i + 1] - rep.energies[i - 1]),
            };
            wigner_smith_at(potential, rep.energies[i], spacing, stationary).map(|w| Some(w.q))
        })
        .collect::<Result<_>>()?;
    let zero = [[C64::new(0.0, 0.0); 2]; 2];
    Ok(rep.sandwich(&rep, |i| q[i].unwrap_or(zero)))
}

/// Mass of `S phi` outside the energy support `[e_lo, e_hi]` of the window.
pub fn window_leakage(s_phi: &MomentumState, window: &EnergyWindow) -> f64 {
    s_phi.mass_where(|p| {
        let e = p * p;
        e < window.e_lo || e > window.e_hi
    })
}
