//! Experiment configuration: TOML sections with typed keys, documented
//! defaults, and cross-section validation that reports every violation.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::grid::{EnergyWindow, Grid, MomentumState, WaveState};
use crate::hamiltonian::{Dispersion, Potential};
use crate::localisation::LocalisationFunction;
use crate::mourre::ScanOptions;
use crate::scattering::TimeDependentOptions;
use crate::delay::DelayOptions;

/// Momentum threshold margin `eps_p` on `|omega'(p)|`.
pub const THRESHOLD_MARGIN: f64 = 0.5;
/// Fraction of the energy window taken by each smooth ramp.
pub const WINDOW_RAMP: f64 = 0.2;
/// Width of the monitored edge band as a fraction of the box.
pub const BOUNDARY_FRACTION: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{}", format_violations(.0))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub rule: &'static str,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.rule, self.message)
    }
}

fn format_violations(v: &[Violation]) -> String {
    let lines: Vec<String> = v.iter().map(|v| v.to_string()).collect();
    format!("{} violation(s): {}", v.len(), lines.join("; "))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub grid: GridSection,
    pub dispersion: DispersionSection,
    pub potential: PotentialSection,
    pub state: StateSection,
    pub localisation: LocalisationSection,
    pub time: TimeSection,
    pub scan: ScanSection,
    pub output: OutputSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub n: usize,
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for GridSection {
    fn default() -> Self {
        Self {
            n: 16384,
            x_min: -800.0,
            x_max: 800.0,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispersionKind {
    #[default]
    Quadratic,
    DoubleWell,
    Polynomial,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispersionSection {
    #[serde(rename = "type")]
    pub kind: DispersionKind,
    /// Ascending coefficients, used when `type = "polynomial"`.
    pub coefficients: Vec<f64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    #[default]
    None,
    Rectangular,
    Smooth,
    Samples,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PotentialSection {
    pub kind: PotentialKind,
    pub v0: f64,
    pub a: f64,
    pub b: f64,
    /// Edge width of the smooth barrier; four grid spacings when absent.
    pub smooth_w: Option<f64>,
    /// Piecewise-constant values on equal cells spanning `[a, b]`.
    pub values: Vec<f64>,
}

impl Default for PotentialSection {
    fn default() -> Self {
        Self {
            kind: PotentialKind::None,
            v0: 0.0,
            a: -0.5,
            b: 0.5,
            smooth_w: None,
            values: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StateSection {
    pub x0: f64,
    pub k0: f64,
    pub sigma_k: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl Default for StateSection {
    fn default() -> Self {
        Self {
            x0: -40.0,
            k0: 3.0,
            sigma_k: 0.125,
            k_min: 2.0,
            k_max: 4.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalisationSection {
    pub r_inner: f64,
    pub r_outer: f64,
    pub r_values: Vec<f64>,
}

impl Default for LocalisationSection {
    fn default() -> Self {
        Self {
            r_inner: 1.0,
            r_outer: 2.0,
            r_values: vec![18.75, 37.5, 75.0, 150.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSection {
    pub dt: f64,
    pub t_max: f64,
    pub tail_eps: f64,
    pub t_prep: f64,
}

impl Default for TimeSection {
    fn default() -> Self {
        Self {
            dt: 0.005,
            t_max: 80.0,
            tail_eps: 1e-8,
            t_prep: -30.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScanSection {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub delta: f64,
    pub eps_sequence: Vec<f64>,
}

impl Default for ScanSection {
    fn default() -> Self {
        let s = ScanOptions::default();
        Self {
            lambda_min: s.lambda_min,
            lambda_max: s.lambda_max,
            delta: s.delta,
            eps_sequence: s.eps_sequence,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
    Plotdata,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: String,
    pub formats: Vec<OutputFormat>,
}

impl Default for OutputSection {
    fn default() -> Self {
        Self {
            dir: "tdlab-out".into(),
            formats: vec![OutputFormat::Csv, OutputFormat::Json, OutputFormat::Plotdata],
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, ConfigError> {
        let config: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn wants(&self, format: OutputFormat) -> bool {
        self.output.formats.contains(&format)
    }

    pub fn dx(&self) -> f64 {
        (self.grid.x_max - self.grid.x_min) / self.grid.n as f64
    }

    pub fn smooth_width(&self) -> f64 {
        self.potential.smooth_w.unwrap_or(4.0 * self.dx())
    }

    /// Checks every rule and returns all violations together.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let mut v = Vec::new();
        let mut fail = |rule: &'static str, message: String| v.push(Violation { rule, message });

        let g = &self.grid;
        if g.n < 16 || !g.n.is_power_of_two() {
            fail("grid size", format!("n = {} must be a power of two >= 16", g.n));
        }
        let grid_ok = g.x_min < g.x_max && g.x_min.is_finite() && g.x_max.is_finite();
        if !grid_ok {
            fail("grid bounds", format!("need x_min < x_max, got [{}, {}]", g.x_min, g.x_max));
        }
        let band = BOUNDARY_FRACTION * (g.x_max - g.x_min);
        let (inner_lo, inner_hi) = (g.x_min + band, g.x_max - band);

        let d = &self.dispersion;
        if d.kind == DispersionKind::Polynomial
            && (d.coefficients.len() < 2 || d.coefficients.iter().skip(1).all(|&c| c == 0.0))
        {
            fail("dispersion", "polynomial dispersion needs a non-constant coefficient list".into());
        }
        let dispersion = self.dispersion().ok();
        let quadratic = dispersion.as_ref().is_some_and(|d| d.is_quadratic());

        let p = &self.potential;
        let support = match p.kind {
            PotentialKind::None => None,
            _ => {
                if !(p.a < p.b) {
                    fail("potential parameters", format!("need a < b, got [{}, {}]", p.a, p.b));
                }
                if p.kind == PotentialKind::Smooth {
                    let w = self.smooth_width();
                    if !(w >= 0.0 && w <= p.b - p.a) {
                        fail("potential parameters", format!("smooth_w = {w} must lie in [0, b - a]"));
                    }
                }
                if p.kind == PotentialKind::Samples && p.values.is_empty() {
                    fail("potential parameters", "samples potential needs values".into());
                }
                let half_w = if p.kind == PotentialKind::Smooth {
                    0.5 * self.smooth_width()
                } else {
                    0.0
                };
                Some((p.a - half_w, p.b + half_w))
            }
        };
        if let Some((lo, hi)) = support {
            if grid_ok && !(lo > inner_lo && hi < inner_hi) {
                fail(
                    "potential support",
                    format!("support [{lo}, {hi}] must lie inside [{inner_lo}, {inner_hi}]"),
                );
            }
            if !quadratic && p.v0 != 0.0 {
                fail("split-step dispersion", "a nonzero potential requires type = \"quadratic\"".into());
            }
        }

        let s = &self.state;
        if let (Some(d), true, true) = (dispersion.as_ref(), grid_ok && g.n >= 16, s.k_min < s.k_max) {
            let (e_lo, e_hi) = (s.k_min * s.k_min, s.k_max * s.k_max);
            let dx = self.dx();
            let speed_min = (0..g.n)
                .map(|j| (j as f64 - (g.n / 2) as f64) * 2.0 * std::f64::consts::PI / (g.n as f64 * dx))
                .filter(|&p| (e_lo..=e_hi).contains(&d.omega(p)))
                .map(|p| d.omega1(p).abs())
                .fold(f64::INFINITY, f64::min);
            if !(s.k_min > 0.0 && speed_min >= THRESHOLD_MARGIN) {
                fail(
                    "threshold margin",
                    format!(
                        "min |omega'| = {speed_min} on the window [{e_lo}, {e_hi}] is below the margin {THRESHOLD_MARGIN}"
                    ),
                );
            }
        }
        if !(s.k_min < s.k_max) {
            fail("energy window", format!("need k_min < k_max, got [{}, {}]", s.k_min, s.k_max));
        }
        if !(s.k0 > s.k_min && s.k0 < s.k_max) {
            fail("energy window", format!("k0 = {} must lie inside (k_min, k_max)", s.k0));
        }
        if !(s.sigma_k > 0.0) {
            fail("state width", format!("sigma_k = {} must be positive", s.sigma_k));
        }
        if grid_ok && !(s.x0 > inner_lo && s.x0 < inner_hi) {
            fail("state placement", format!("x0 = {} must lie inside [{inner_lo}, {inner_hi}]", s.x0));
        }
        if let (Some((lo, _)), true) = (support, s.sigma_k > 0.0) {
            let sigma_x = 0.5 / s.sigma_k;
            if s.x0 + 3.0 * sigma_x > lo {
                fail(
                    "state placement",
                    format!("x0 + 3 sigma_x = {} must lie left of the potential at {lo}", s.x0 + 3.0 * sigma_x),
                );
            }
        }

        let l = &self.localisation;
        if !(l.r_inner > 0.0 && l.r_outer > l.r_inner) {
            fail("localisation", format!("need 0 < r_inner < r_outer, got ({}, {})", l.r_inner, l.r_outer));
        }
        if l.r_values.len() < 4 || l.r_values.iter().any(|&r| !(r > 0.0)) {
            fail("r schedule", "need at least four positive r values".into());
        }
        let r_max = l.r_values.iter().copied().fold(0.0, f64::max);
        if grid_ok && r_max * l.r_outer >= inner_hi.min(-inner_lo) {
            fail(
                "localisation extent",
                format!(
                    "r_max * r_outer = {} must lie inside the monitored box [{inner_lo}, {inner_hi}]",
                    r_max * l.r_outer
                ),
            );
        }

        let t = &self.time;
        if !(t.dt > 0.0) {
            fail("time step", format!("dt = {} must be positive", t.dt));
        } else if g.n >= 16 && grid_ok {
            let p_max = std::f64::consts::PI / self.dx();
            if t.dt * p_max * p_max > 2.0 * std::f64::consts::PI {
                fail(
                    "time step",
                    format!("dt * p_max^2 = {} exceeds 2 pi; reduce dt", t.dt * p_max * p_max),
                );
            }
        }
        if !(t.t_max > 0.0) || !(t.tail_eps > 0.0) {
            fail("time horizon", "t_max and tail_eps must be positive".into());
        }
        if !(t.t_prep < 0.0 && -t.t_prep <= t.t_max) {
            fail("time horizon", format!("need -t_max <= t_prep < 0, got {}", t.t_prep));
        }

        let sc = &self.scan;
        if !(sc.delta > 0.0) || !(sc.lambda_min <= sc.lambda_max) {
            fail("scan", "need delta > 0 and lambda_min <= lambda_max".into());
        }
        if sc.eps_sequence.len() < 2
            || sc.eps_sequence.iter().any(|&e| !(e > 0.0))
            || sc.eps_sequence.windows(2).any(|w| w[1] >= w[0])
        {
            fail("scan", "eps_sequence must be positive and strictly decreasing".into());
        }

        if v.is_empty() {
            Ok(())
        } else {
            Err(ConfigError::Invalid(v))
        }
    }

    pub fn grid(&self) -> Result<Grid> {
        Grid::new(self.grid.n, self.grid.x_min, self.grid.x_max)
    }

    pub fn dispersion(&self) -> Result<Dispersion> {
        match self.dispersion.kind {
            DispersionKind::Quadratic => Ok(Dispersion::quadratic()),
            DispersionKind::DoubleWell => Ok(Dispersion::double_well()),
            DispersionKind::Polynomial => Dispersion::polynomial(self.dispersion.coefficients.clone()),
        }
    }

    pub fn potential(&self) -> Result<Potential> {
        let p = &self.potential;
        match p.kind {
            PotentialKind::None => Ok(Potential::Zero),
            PotentialKind::Rectangular => Potential::rectangular(p.v0, p.a, p.b),
            PotentialKind::Smooth => Potential::smooth(p.v0, p.a, p.b, self.smooth_width()),
            PotentialKind::Samples => {
                let dx = (p.b - p.a) / p.values.len() as f64;
                Potential::samples(p.a, dx, p.values.clone())
            }
        }
    }

    pub fn window(&self) -> Result<EnergyWindow> {
        EnergyWindow::for_momenta(self.state.k_min, self.state.k_max, WINDOW_RAMP)
    }

    /// Gaussian packet `(x0, k0, sigma_x = 1/(2 sigma_k))`, windowed and normalized.
    pub fn incoming_state(&self, grid: &Grid) -> Result<MomentumState> {
        let s = &self.state;
        let packet = WaveState::gaussian(grid, s.x0, 0.5 / s.sigma_k, s.k0)?.to_momentum();
        self.window()?
            .apply(&self.dispersion()?, &packet, 0.0)?
            .normalized()
    }

    pub fn localisation_function(&self) -> Result<LocalisationFunction> {
        LocalisationFunction::new(self.localisation.r_inner, self.localisation.r_outer)
    }

    pub fn delay_options(&self) -> Result<DelayOptions> {
        Ok(DelayOptions {
            localisation: self.localisation_function()?,
            r_values: self.localisation.r_values.clone(),
            t_max: self.time.t_max,
            tail_eps: self.time.tail_eps,
            t_prep: self.time.t_prep,
            boundary_fraction: BOUNDARY_FRACTION,
            ..DelayOptions::default()
        })
    }

    pub fn time_dependent_options(&self) -> TimeDependentOptions {
        TimeDependentOptions {
            t_minus: self.time.t_prep,
            t_plus: -self.time.t_prep,
            boundary_fraction: BOUNDARY_FRACTION,
            ..TimeDependentOptions::default()
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            lambda_min: self.scan.lambda_min,
            lambda_max: self.scan.lambda_max,
            delta: self.scan.delta,
            eps_sequence: self.scan.eps_sequence.clone(),
            ..ScanOptions::default()
        }
    }
}
