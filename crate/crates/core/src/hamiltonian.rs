//! Free dispersion `H0 = omega(P)`, compactly supported potentials and the
//! two evolution groups.

use crate::error::{Error, Result};
use crate::grid::{Grid, MomentumState, WaveState, C64};
use crate::localisation::smooth_step;

/// Polynomial dispersion `omega(p) = sum_k c_k p^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dispersion {
    coeffs: Vec<f64>,
}

fn horner(coeffs: &[f64], p: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * p + c)
}

fn derivative(coeffs: &[f64]) -> Vec<f64> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| k as f64 * c)
        .collect()
}

impl Dispersion {
    /// Ascending coefficients; trailing zeros are trimmed.
    pub fn polynomial(mut coeffs: Vec<f64>) -> Result<Self> {
        while coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 || coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidDispersion(
                "need a finite non-constant polynomial".into(),
            ));
        }
        Ok(Self { coeffs })
    }

    /// `omega(p) = p^2` (units with hbar = 1, mass = 1/2).
    pub fn quadratic() -> Self {
        Self {
            coeffs: vec![0.0, 0.0, 1.0],
        }
    }

    /// `omega(p) = (p^2 - 1)^2`.
    pub fn double_well() -> Self {
        Self {
            coeffs: vec![1.0, 0.0, -2.0, 0.0, 1.0],
        }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn is_quadratic(&self) -> bool {
        self.coeffs == [0.0, 0.0, 1.0]
    }

    pub fn omega(&self, p: f64) -> f64 {
        horner(&self.coeffs, p)
    }

    /// `omega'(p)`, the symbol of `H0' = i[H0, X]`.
    pub fn omega1(&self, p: f64) -> f64 {
        horner(&derivative(&self.coeffs), p)
    }

    /// `omega''(p)`, the symbol of `H0''`.
    pub fn omega2(&self, p: f64) -> f64 {
        horner(&derivative(&derivative(&self.coeffs)), p)
    }

    /// Real critical points of `omega`, i.e. zeros of `omega'`.
    pub fn critical_points(&self) -> Vec<f64> {
        let d1 = derivative(&self.coeffs);
        let lead = *d1.last().unwrap();
        if d1.len() == 1 {
            return Vec::new();
        }
        // Cauchy bound on the roots of omega'
        let bound = 1.0 + d1.iter().map(|c| (c / lead).abs()).fold(0.0, f64::max);
        let samples = 20_000;
        let h = 2.0 * bound / samples as f64;
        let mut roots: Vec<f64> = Vec::new();
        let push = |r: f64, roots: &mut Vec<f64>| {
            if roots.last().is_none_or(|&l| (r - l).abs() > 4.0 * h) {
                roots.push(r);
            }
        };
        let mut a = -bound;
        let mut fa = horner(&d1, a);
        for i in 1..=samples {
            let b = -bound + i as f64 * h;
            let fb = horner(&d1, b);
            if fa == 0.0 {
                push(a, &mut roots);
            } else if fa * fb < 0.0 {
                let (mut lo, mut hi, mut flo) = (a, b, fa);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    let fm = horner(&d1, mid);
                    if fm == 0.0 || hi - lo < 1e-15 * (1.0 + mid.abs()) {
                        lo = mid;
                        hi = mid;
                        break;
                    }
                    if fm * flo < 0.0 {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                push(0.5 * (lo + hi), &mut roots);
            }
            a = b;
            fa = fb;
        }
        roots
    }

    /// Critical values `omega(critical points)`, sorted and deduplicated:
    /// the set `kappa(H0)` for `Phi = X`.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .critical_points()
            .into_iter()
            .map(|p| self.omega(p))
            .collect();
        values.sort_by(f64::total_cmp);
        values.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
        values
    }
}

/// Compactly supported real potential.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    Zero,
    /// `v0` on `[a, b]`.
    Rectangular { v0: f64, a: f64, b: f64 },
    /// Rectangular barrier whose edges are C-infinity ramps of width `w`
    /// centred at `a` and `b`; support `[a - w/2, b + w/2]`.
    Smooth { v0: f64, a: f64, b: f64, w: f64 },
    /// Piecewise-constant cells of width `dx` centred at `x0 + j dx`.
    Samples { x0: f64, dx: f64, values: Vec<f64> },
}

impl Potential {
    pub fn rectangular(v0: f64, a: f64, b: f64) -> Result<Self> {
        if !(a < b) {
            return Err(Error::InvalidPotential(format!(
                "need a < b, got [{a}, {b}]"
            )));
        }
        if v0 == 0.0 {
            return Ok(Potential::Zero);
        }
        Ok(Potential::Rectangular { v0, a, b })
    }

    pub fn smooth(v0: f64, a: f64, b: f64, w: f64) -> Result<Self> {
        if !(a < b) || !(w >= 0.0) || w > b - a {
            return Err(Error::InvalidPotential(format!(
                "need a < b and 0 <= w <= b - a, got [{a}, {b}], w = {w}"
            )));
        }
        if v0 == 0.0 {
            return Ok(Potential::Zero);
        }
        if w == 0.0 {
            return Self::rectangular(v0, a, b);
        }
        Ok(Potential::Smooth { v0, a, b, w })
    }

    pub fn samples(x0: f64, dx: f64, values: Vec<f64>) -> Result<Self> {
        if !(dx > 0.0) || values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidPotential("bad sample vector".into()));
        }
        Ok(Potential::Samples { x0, dx, values })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Potential::Zero => true,
            Potential::Rectangular { v0, .. } | Potential::Smooth { v0, .. } => *v0 == 0.0,
            Potential::Samples { values, .. } => values.iter().all(|&v| v == 0.0),
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Potential::Zero => 0.0,
            Potential::Rectangular { v0, a, b } => {
                if (a..=b).contains(&x) {
                    v0
                } else {
                    0.0
                }
            }
            Potential::Smooth { v0, a, b, w } => {
                let rise = smooth_step((x - (a - 0.5 * w)) / w);
                let fall = smooth_step(((b + 0.5 * w) - x) / w);
                v0 * rise * fall
            }
            Potential::Samples {
                x0,
                dx,
                ref values,
            } => {
                let j = ((x - x0) / dx + 0.5).floor();
                if j < 0.0 || j >= values.len() as f64 {
                    0.0
                } else {
                    values[j as usize]
                }
            }
        }
    }

    /// Closed support interval, `None` for the zero potential.
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Potential::Zero => None,
            Potential::Rectangular { a, b, .. } => Some((a, b)),
            Potential::Smooth { a, b, w, .. } => Some((a - 0.5 * w, b + 0.5 * w)),
            Potential::Samples {
                x0,
                dx,
                ref values,
            } => Some((x0 - 0.5 * dx, x0 + (values.len() as f64 - 0.5) * dx)),
        }
    }

    /// Piecewise-constant representation `(x_lo, x_hi, v)` over the support.
    ///
    /// Exact for rectangular and sampled potentials; smooth ramps are
    /// midpoint-sampled with cells no wider than `step`.
    pub fn pieces(&self, step: f64) -> Vec<(f64, f64, f64)> {
        match *self {
            Potential::Zero => Vec::new(),
            Potential::Rectangular { v0, a, b } => vec![(a, b, v0)],
            Potential::Smooth { v0, a, b, w } => {
                let mut out = Vec::new();
                let ramp = |lo: f64, hi: f64, out: &mut Vec<(f64, f64, f64)>| {
                    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
                    let h = (hi - lo) / cells as f64;
                    for j in 0..cells {
                        let x_lo = lo + j as f64 * h;
                        out.push((x_lo, x_lo + h, self.value(x_lo + 0.5 * h)));
                    }
                };
                ramp(a - 0.5 * w, a + 0.5 * w, &mut out);
                if b - a > w {
                    out.push((a + 0.5 * w, b - 0.5 * w, v0));
                }
                ramp(b - 0.5 * w, b + 0.5 * w, &mut out);
                out
            }
            Potential::Samples {
                x0,
                dx,
                ref values,
            } => values
                .iter()
                .enumerate()
                .map(|(j, &v)| {
                    let c = x0 + j as f64 * dx;
                    (c - 0.5 * dx, c + 0.5 * dx, v)
                })
                .collect(),
        }
    }

    /// Values on the grid points.
    pub fn sample_on(&self, grid: &Grid) -> Vec<f64> {
        grid.positions().iter().map(|&x| self.value(x)).collect()
    }
}

/// `e^{-itH0} psi`, one exact momentum-space multiplication.
pub fn evolve_free(psi: &WaveState, dispersion: &Dispersion, t: f64) -> WaveState {
    if t == 0.0 {
        return psi.clone();
    }
    evolve_free_momentum(&psi.to_momentum(), dispersion, t).to_position()
}

pub fn evolve_free_momentum(phi: &MomentumState, dispersion: &Dispersion, t: f64) -> MomentumState {
    if t == 0.0 {
        return phi.clone();
    }
    phi.apply_p_fn(|p| C64::from_polar(1.0, -t * dispersion.omega(p)))
}

/// `<psi, H psi>` with `H = omega(P) + V(X)`.
pub fn energy(psi: &WaveState, dispersion: &Dispersion, potential: &Potential) -> f64 {
    let kinetic = psi.to_momentum().expectation_p(|p| dispersion.omega(p));
    kinetic + psi.expectation_x(|x| potential.value(x))
}

/// Strang-split propagator for `H = omega(P) + V(X)` with a fixed step.
#[derive(Clone, Debug)]
pub struct Propagator {
    grid: Grid,
    dispersion: Dispersion,
    potential: Potential,
    dt: f64,
    potential_values: Vec<f64>,
    half_potential: Vec<C64>,
    kinetic: Vec<C64>,
}

impl Propagator {
    pub fn new(grid: &Grid, dispersion: &Dispersion, potential: &Potential, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidTimeStep(format!("dt must be positive, got {dt}")));
        }
        if !potential.is_zero() && !dispersion.is_quadratic() {
            return Err(Error::UnsupportedDispersion);
        }
        let potential_values = potential.sample_on(grid);
        let (half_potential, kinetic) = Self::factors(grid, dispersion, &potential_values, dt);
        Ok(Self {
            grid: grid.clone(),
            dispersion: dispersion.clone(),
            potential: potential.clone(),
            dt,
            potential_values,
            half_potential,
            kinetic,
        })
    }

    fn factors(grid: &Grid, dispersion: &Dispersion, v: &[f64], dt: f64) -> (Vec<C64>, Vec<C64>) {
        let half = v.iter().map(|&v| C64::from_polar(1.0, -0.5 * dt * v)).collect();
        let kinetic = grid
            .momenta()
            .iter()
            .map(|&p| C64::from_polar(1.0, -dt * dispersion.omega(p)))
            .collect();
        (half, kinetic)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn dispersion(&self) -> &Dispersion {
        &self.dispersion
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn potential_values(&self) -> &[f64] {
        &self.potential_values
    }

    /// Starts a forward-stepping trajectory at `psi`.
    pub fn stepper(&self, psi: &WaveState) -> Stepper<'_> {
        Stepper {
            grid: &self.grid,
            half_potential: &self.half_potential,
            kinetic: &self.kinetic,
            buf: psi.amplitudes().to_vec(),
            scratch: vec![C64::new(0.0, 0.0); self.grid.scratch_len()],
            steps: 0,
        }
    }

    /// `e^{-itH} psi` by `floor(|t|/dt)` Strang steps plus one partial step.
    /// Negative `t` runs the group backwards.
    pub fn evolve(&self, psi: &WaveState, t: f64) -> WaveState {
        if t == 0.0 {
            return psi.clone();
        }
        let full = (t.abs() / self.dt * (1.0 + 1e-13)).floor();
        let rest = t.abs() - full * self.dt;
        let sign = t.signum();
        let mut buf = psi.amplitudes().to_vec();
        let mut scratch = vec![C64::new(0.0, 0.0); self.grid.scratch_len()];
        if sign > 0.0 {
            for _ in 0..full as usize {
                strang_step(&self.grid, &self.half_potential, &self.kinetic, &mut buf, &mut scratch);
            }
        } else {
            let (h, k) = Self::factors(&self.grid, &self.dispersion, &self.potential_values, -self.dt);
            for _ in 0..full as usize {
                strang_step(&self.grid, &h, &k, &mut buf, &mut scratch);
            }
        }
        if rest > 1e-12 * self.dt {
            let (h, k) =
                Self::factors(&self.grid, &self.dispersion, &self.potential_values, sign * rest);
            strang_step(&self.grid, &h, &k, &mut buf, &mut scratch);
        }
        WaveState::from_amplitudes(&self.grid, buf).expect("grid length preserved")
    }
}

fn strang_step(grid: &Grid, half: &[C64], kinetic: &[C64], buf: &mut [C64], scratch: &mut [C64]) {
    buf.iter_mut().zip(half).for_each(|(a, f)| *a *= f);
    grid.forward_in_place(buf, scratch);
    buf.iter_mut().zip(kinetic).for_each(|(a, f)| *a *= f);
    grid.inverse_in_place(buf, scratch);
    buf.iter_mut().zip(half).for_each(|(a, f)| *a *= f);
}

/// Mutable trajectory under a [`Propagator`], one step of `dt` at a time.
pub struct Stepper<'a> {
    grid: &'a Grid,
    half_potential: &'a [C64],
    kinetic: &'a [C64],
    buf: Vec<C64>,
    scratch: Vec<C64>,
    steps: u64,
}

impl Stepper<'_> {
    pub fn advance(&mut self) {
        strang_step(self.grid, self.half_potential, self.kinetic, &mut self.buf, &mut self.scratch);
        self.steps += 1;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.buf
    }

    pub fn state(&self) -> WaveState {
        WaveState::from_amplitudes(self.grid, self.buf.clone()).expect("grid length preserved")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn derivatives_match_finite_differences() {
        for d in [Dispersion::quadratic(), Dispersion::double_well()] {
            let h = 1e-5;
            for i in 0..50 {
                let p = -3.0 + 6.0 * i as f64 / 49.0;
                let fd1 = (d.omega(p + h) - d.omega(p - h)) / (2.0 * h);
                let fd2 = (d.omega1(p + h) - d.omega1(p - h)) / (2.0 * h);
                assert!((fd1 - d.omega1(p)).abs() < 1e-8 * (1.0 + fd1.abs()));
                assert!((fd2 - d.omega2(p)).abs() < 1e-8 * (1.0 + fd2.abs()));
            }
        }
    }

    #[test]
    fn critical_values_of_standard_dispersions() {
        assert_eq!(Dispersion::quadratic().critical_values(), vec![0.0]);
        let dw = Dispersion::double_well().critical_values();
        assert_eq!(dw.len(), 2);
        assert!(dw[0].abs() < 1e-12 && (dw[1] - 1.0).abs() < 1e-12);
        // omega = p^3 + p is monotone
        let mono = Dispersion::polynomial(vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(mono.critical_values().is_empty());
        assert!(Dispersion::polynomial(vec![3.0, 0.0]).is_err());
    }

    #[test]
    fn rectangular_examples() {
        assert!(Potential::rectangular(0.0, -1.0, 1.0).unwrap().is_zero());
        assert!(Potential::rectangular(1.0, 1.0, 1.0).is_err());
        let v = Potential::rectangular(2.0, -0.5, 0.5).unwrap();
        let dx = 0.01;
        assert_eq!(v.value(0.5 + dx), 0.0);
        assert_eq!(v.value(0.0), 2.0);
        assert_eq!(v.pieces(0.1), vec![(-0.5, 0.5, 2.0)]);
    }

    #[test]
    fn smooth_barrier_shape() {
        let v = Potential::smooth(2.0, -0.5, 0.5, 0.4).unwrap();
        assert_eq!(v.support(), Some((-0.7, 0.7)));
        assert_eq!(v.value(0.0), 2.0);
        assert_eq!(v.value(-0.71), 0.0);
        assert!((v.value(0.5) - 1.0).abs() < 1e-14);
        let pieces = v.pieces(0.01);
        assert_relative_eq!(pieces.first().unwrap().0, -0.7, epsilon = 1e-14);
        assert_relative_eq!(pieces.last().unwrap().1, 0.7, epsilon = 1e-14);
        let integral: f64 = pieces.iter().map(|(a, b, v)| (b - a) * v).sum();
        // ramps are antisymmetric about their centres, so int V = v0 (b - a)
        assert_relative_eq!(integral, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn free_evolution_identity_and_group_law() {
        let g = Grid::new(1024, -60.0, 60.0).unwrap();
        let d = Dispersion::quadratic();
        let psi = WaveState::gaussian(&g, -5.0, 1.5, 1.0).unwrap();
        assert_eq!(evolve_free(&psi, &d, 0.0).distance(&psi), 0.0);
        let two = evolve_free(&evolve_free(&psi, &d, 1.3), &d, 2.1);
        let one = evolve_free(&psi, &d, 3.4);
        assert!(two.distance(&one) < 1e-11);
        let far = evolve_free(&psi, &d, 100.0);
        assert_relative_eq!(far.norm(), psi.norm(), epsilon = 1e-12);
    }

    #[test]
    fn full_evolution_without_potential_is_free() {
        let g = Grid::new(1024, -60.0, 60.0).unwrap();
        let d = Dispersion::quadratic();
        let prop = Propagator::new(&g, &d, &Potential::Zero, 0.01).unwrap();
        let psi = WaveState::gaussian(&g, -5.0, 1.5, 1.0).unwrap();
        assert_eq!(prop.evolve(&psi, 0.0).distance(&psi), 0.0);
        let t = 2.345;
        assert!(prop.evolve(&psi, t).distance(&evolve_free(&psi, &d, t)) < 1e-10);
        assert!(prop.evolve(&psi, -t).distance(&evolve_free(&psi, &d, -t)) < 1e-10);
    }

    #[test]
    fn rejects_unsupported_combination() {
        let g = Grid::new(64, -5.0, 5.0).unwrap();
        let v = Potential::rectangular(1.0, -1.0, 1.0).unwrap();
        assert!(matches!(
            Propagator::new(&g, &Dispersion::double_well(), &v, 0.1),
            Err(Error::UnsupportedDispersion)
        ));
        assert!(Propagator::new(&g, &Dispersion::double_well(), &Potential::Zero, 0.1).is_ok());
        assert!(Propagator::new(&g, &Dispersion::quadratic(), &v, 0.0).is_err());
    }
}
