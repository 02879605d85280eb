//! Run orchestration: the four pipelines, the report, and artifact files.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Serialize, Serializer};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, OutputFormat, BOUNDARY_FRACTION, THRESHOLD_MARGIN};
use crate::delay::{ew_formula, ew_spectral, extrapolate_delay, sojourn_run, window_leakage, Identity};
use crate::error::{Error, Result};
use crate::grid::{Grid, MomentumState, WaveState};
use crate::hamiltonian::{evolve_free_momentum, Propagator};
use crate::localisation::{log_spaced, RfTable};
use crate::mourre::{critical_scan, ConjugateOperator};
use crate::quadrature::QuadratureSpec;
use crate::scattering::{apply_stationary, scattering_apply, wigner_smith, StationaryOptions};
use crate::time_operator::{Realization, TimeOperator};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Checks,
    Smatrix,
    Kappa,
    Delay,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Checks => "checks",
            Mode::Smatrix => "smatrix",
            Mode::Kappa => "kappa",
            Mode::Delay => "delay",
        }
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "checks" => Ok(Mode::Checks),
            "smatrix" => Ok(Mode::Smatrix),
            "kappa" => Ok(Mode::Kappa),
            "delay" => Ok(Mode::Delay),
            other => Err(format!("unknown mode {other:?}; expected checks, smatrix, kappa or delay")),
        }
    }
}

/// Shortest round-trip decimal string.
fn exact<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{v:?}"))
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    #[serde(serialize_with = "exact")]
    pub value: f64,
    /// `"<="` or `">="`.
    pub relation: &'static str,
    #[serde(serialize_with = "exact")]
    pub tolerance: f64,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: "<=",
            tolerance,
            pass: value <= tolerance,
            detail: None,
        }
    }

    pub fn at_least(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            relation: ">=",
            tolerance,
            pass: value >= tolerance,
            detail: None,
        }
    }

    /// A module diagnostic turned into a named failure.
    pub fn failed(name: impl Into<String>, err: &Error) -> Self {
        Self {
            name: name.into(),
            value: f64::NAN,
            relation: "<=",
            tolerance: f64::NAN,
            pass: false,
            detail: Some(err.to_string()),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub workers: usize,
    pub started_unix: u64,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub mode: Mode,
    pub config_sha256: String,
    pub config: ExperimentConfig,
    pub checks: Vec<Check>,
    pub results: Value,
    pub provenance: Provenance,
    pub pass: bool,
}

/// In-memory artifact, written by [`write_artifacts`].
#[derive(Clone, Debug)]
pub struct Artifact {
    pub name: String,
    pub format: OutputFormat,
    pub bytes: Vec<u8>,
}

pub struct RunOutput {
    pub report: RunReport,
    pub artifacts: Vec<Artifact>,
}

pub fn config_hash(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv_bytes(header: &[String], rows: &[Vec<f64>]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|&v| fmt17(v)))?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn plot_bytes(points: impl IntoIterator<Item = (f64, f64)>) -> Vec<u8> {
    let mut s = String::new();
    for (x, y) in points {
        let _ = writeln!(s, "{} {}", fmt17(x), fmt17(y));
    }
    s.into_bytes()
}

fn artifact(name: impl Into<String>, format: OutputFormat, bytes: Vec<u8>) -> Artifact {
    Artifact {
        name: name.into(),
        format,
        bytes,
    }
}

/// Write-temp-rename, so readers never see a partial file.
pub fn write_atomic(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    let path = dir.join(name);
    tmp.persist(&path).map_err(|e| Error::Io(e.error))?;
    Ok(path)
}

/// Writes the enabled artifacts, then `report.json` last.
pub fn write_artifacts(config: &ExperimentConfig, out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for a in out.artifacts.iter().filter(|a| config.wants(a.format)) {
        written.push(write_atomic(dir, &a.name, &a.bytes)?);
    }
    if config.wants(OutputFormat::Json) {
        let json = serde_json::to_vec_pretty(&out.report)?;
        written.push(write_atomic(dir, "report.json", &json)?);
    }
    Ok(written)
}

/// Windowed Gaussians around the configured packet: centres shifted by
/// multiples of `sigma_x`, carrier momenta spread over the window interior.
pub fn state_family(config: &ExperimentConfig, grid: &Grid, count: usize) -> Result<Vec<MomentumState>> {
    let s = &config.state;
    let sigma_x = 0.5 / s.sigma_k;
    let window = config.window()?;
    let dispersion = config.dispersion()?;
    (0..count)
        .map(|i| {
            let frac = (i as f64 + 0.5) / count as f64;
            let k0 = s.k_min + (s.k_max - s.k_min) * (0.25 + 0.5 * frac);
            let x0 = s.x0 + sigma_x * ((i % 5) as f64 - 2.0);
            let packet = WaveState::gaussian(grid, x0, sigma_x, k0)?.to_momentum();
            window.apply(&dispersion, &packet, 0.0)?.normalized()
        })
        .collect()
}

/// Unwindowed Gaussians with carriers spread over `[-k_max, k_max]`.
pub fn gaussian_family(config: &ExperimentConfig, grid: &Grid, count: usize) -> Result<Vec<MomentumState>> {
    let s = &config.state;
    let sigma_x = 0.5 / s.sigma_k;
    (0..count)
        .map(|i| {
            let frac = (i as f64 + 0.5) / count as f64;
            let k0 = s.k_max * (2.0 * frac - 1.0);
            let x0 = s.x0 + sigma_x * ((i % 5) as f64 - 2.0);
            Ok(WaveState::gaussian(grid, x0, sigma_x, k0)?.to_momentum().normalized()?)
        })
        .collect()
}

pub fn run(mode: Mode, config: &ExperimentConfig, config_text: &str) -> RunOutput {
    let started = Instant::now();
    let started_unix = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0, |d| d.as_secs());
    let mut checks = Vec::new();
    let mut artifacts = Vec::new();
    let results = match mode {
        Mode::Checks => run_checks(config, &mut checks),
        Mode::Smatrix => run_smatrix(config, &mut checks, &mut artifacts),
        Mode::Kappa => run_kappa(config, &mut checks, &mut artifacts),
        Mode::Delay => run_delay(config, &mut checks, &mut artifacts),
    };
    let results = results.unwrap_or_else(|e| {
        checks.push(Check::failed(format!("{} pipeline", mode.as_str()), &e));
        Value::Null
    });
    let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
    RunOutput {
        report: RunReport {
            mode,
            config_sha256: config_hash(config_text),
            config: config.clone(),
            checks,
            results,
            provenance: Provenance {
                tool: env!("CARGO_PKG_NAME"),
                version: env!("CARGO_PKG_VERSION"),
                workers: rayon::current_num_threads(),
                started_unix,
                wall_seconds: started.elapsed().as_secs_f64(),
            },
            pass,
        },
        artifacts,
    }
}

/// Runs `f`, turning an error into a named failed check.
fn guarded(checks: &mut Vec<Check>, name: &str, f: impl FnOnce(&mut Vec<Check>) -> Result<()>) {
    if let Err(e) = f(checks) {
        checks.push(Check::failed(name, &e));
    }
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

/// Edge mass above which a free excursion is considered wrapped.
pub const BOUNDARY_LIMIT: f64 = 1e-8;
pub const COMMUTATION_STATES: usize = 20;
pub const AGREEMENT_STATES: usize = 50;
pub const MOURRE_STATES: usize = 100;
pub const WEYL_TIMES: [f64; 6] = [-50.0, -10.0, -1.0, 1.0, 10.0, 50.0];

fn run_checks(config: &ExperimentConfig, checks: &mut Vec<Check>) -> Result<Value> {
    let grid = config.grid()?;
    let dispersion = config.dispersion()?;
    let loc = config.localisation_function()?;
    let points = log_spaced(1e-2, 1e3, 200);

    let mut rf_table = None;
    guarded(checks, "R_f identities", |checks| {
        let rf = RfTable::with_abscissae(loc, QuadratureSpec::default(), points.clone())?;
        let id = rf.max_identity_residual();
        let inv = max_of(
            rf.abscissae()
                .iter()
                .zip(rf.cached_derivatives())
                .map(|(x, d)| (d + 1.0 / x).abs()),
        );
        checks.push(Check::at_most("R_f: |x R_f'(x) + 1|", id, 1e-8));
        checks.push(Check::at_most("R_f: |R_f'(x) + 1/x|", inv, 1e-8));
        rf_table = Some(rf);
        Ok(())
    });
    let Some(rf) = rf_table else {
        return Ok(Value::Null);
    };
    let top = TimeOperator::new(&dispersion, &rf, THRESHOLD_MARGIN)?;
    let realizations: &[Realization] = if dispersion.is_quadratic() {
        &[Realization::Spectral, Realization::Formula]
    } else {
        &[Realization::Formula]
    };
    let label = |r: Realization| match r {
        Realization::Spectral => "spectral",
        Realization::Formula => "formula",
    };

    let states = state_family(config, &grid, AGREEMENT_STATES.max(COMMUTATION_STATES + 1))?;
    let mut summary = serde_json::Map::new();

    for &real in realizations {
        let name = format!("commutation ({})", label(real));
        guarded(checks, &name, |checks| {
            let res = (0..COMMUTATION_STATES)
                .map(|i| top.commutation_residual(&states[i], &states[i + 1], real))
                .collect::<Result<Vec<f64>>>()?;
            let tol = if real == Realization::Spectral { 1e-6 } else { 1e-4 };
            checks.push(Check::at_most(name.clone(), max_of(res), tol));
            Ok(())
        });
        let name = format!("Weyl relation ({})", label(real));
        guarded(checks, &name, |checks| {
            let mut worst = 0.0f64;
            for psi in &states[..3] {
                for &t in &WEYL_TIMES {
                    let moved = evolve_free_momentum(psi, &dispersion, t).to_position();
                    let mass = moved.boundary_mass(BOUNDARY_FRACTION);
                    if mass > BOUNDARY_LIMIT {
                        return Err(Error::BoundaryMass {
                            mass,
                            limit: BOUNDARY_LIMIT,
                            time: t,
                        });
                    }
                    worst = worst.max(top.weyl_residual(psi, t, real)?);
                }
            }
            checks.push(Check::at_most(name.clone(), worst, 1e-6));
            Ok(())
        });
    }

    if dispersion.is_quadratic() {
        guarded(checks, "realization agreement", |checks| {
            let mut worst = 0.0f64;
            for psi in &states[..AGREEMENT_STATES] {
                let a = top.apply_formula(psi)?;
                let b = top.apply_spectral(psi)?;
                worst = worst.max(a.distance(&b) / b.norm());
            }
            checks.push(Check::at_most("realization agreement", worst, 1e-5));
            Ok(())
        });
        let t_values: Vec<f64> = states[..COMMUTATION_STATES]
            .iter()
            .map(|psi| top.expectation(psi, Realization::Spectral).map(|z| z.re))
            .collect::<Result<_>>()
            .unwrap_or_default();
        summary.insert("time_operator_expectations".into(), json!(t_values));
    }

    let a = ConjugateOperator::new(&dispersion);
    let mourre: Vec<_> = gaussian_family(config, &grid, MOURRE_STATES)?
        .iter()
        .map(|psi| a.check(psi))
        .collect();
    checks.push(Check::at_most(
        "Mourre identity",
        max_of(mourre.iter().map(|c| c.relative_residual)),
        1e-6,
    ));
    let min_expectation = mourre.iter().map(|c| c.expectation).fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("Mourre positivity", min_expectation, -1e-10));

    summary.insert("rf_unit_prime".into(), json!([rf.unit_prime().0, rf.unit_prime().1]));
    summary.insert("states".into(), json!(states.len()));
    Ok(Value::Object(summary))
}

pub const SMATRIX_ENERGIES: usize = 100;

fn run_smatrix(config: &ExperimentConfig, checks: &mut Vec<Check>, artifacts: &mut Vec<Artifact>) -> Result<Value> {
    let dispersion = config.dispersion()?;
    if !dispersion.is_quadratic() {
        return Err(Error::RequiresQuadratic);
    }
    let potential = config.potential()?;
    let window = config.window()?;
    let n = SMATRIX_ENERGIES;
    let energies: Vec<f64> = (0..n)
        .map(|i| window.e_lo + (window.e_hi - window.e_lo) * i as f64 / (n - 1) as f64)
        .collect();
    let stationary = StationaryOptions::default();
    let samples = wigner_smith(&potential, &energies, &stationary)?;

    checks.push(Check::at_most(
        "unitarity",
        max_of(samples.iter().map(|s| s.smatrix.unitarity_residual())),
        1e-8,
    ));
    checks.push(Check::at_most(
        "Wigner-Smith hermiticity",
        max_of(samples.iter().map(|s| s.hermiticity)),
        crate::scattering::HERMITICITY_TOL,
    ));

    let grid = config.grid()?;
    let phi = config.incoming_state(&grid)?;
    let mut agreement = None;
    guarded(checks, "time-dependent vs stationary", |checks| {
        let prop = Propagator::new(&grid, &dispersion, &potential, config.time.dt)?;
        let td = config.time_dependent_options();
        let dynamic = scattering_apply(&prop, &phi.to_position(), &td, true)?;
        let dynamic = dynamic.state.to_momentum();
        let stat = apply_stationary(&potential, &phi, &stationary, 0.5 * THRESHOLD_MARGIN)?;
        let diff = dynamic.distance(&stat) / phi.norm();
        checks.push(Check::at_most("time-dependent vs stationary", diff, 1e-3));
        agreement = Some(diff);
        Ok(())
    });

    let header: Vec<String> = [
        "energy", "t_l_re", "t_l_im", "r_l_re", "r_l_im", "t_r_re", "t_r_im", "r_r_re", "r_r_im", "q_eig_1",
        "q_eig_2",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<f64>> = samples
        .iter()
        .map(|w| {
            let s = &w.smatrix;
            vec![
                s.energy, s.t_l.re, s.t_l.im, s.r_l.re, s.r_l.im, s.t_r.re, s.t_r.im, s.r_r.re, s.r_r.im,
                w.eigenvalues[0], w.eigenvalues[1],
            ]
        })
        .collect();
    artifacts.push(artifact("smatrix.csv", OutputFormat::Csv, csv_bytes(&header, &rows)?));
    artifacts.push(artifact(
        "transmission.dat",
        OutputFormat::Plotdata,
        plot_bytes(samples.iter().map(|w| (w.energy, w.smatrix.t_l.norm_sqr()))),
    ));
    artifacts.push(artifact(
        "delay_trace.dat",
        OutputFormat::Plotdata,
        plot_bytes(samples.iter().map(|w| (w.energy, w.eigenvalues[0] + w.eigenvalues[1]))),
    ));
    Ok(json!({
        "energies": n,
        "energy_range": [window.e_lo, window.e_hi],
        "richardson_samples": samples.iter().filter(|w| w.richardson).count(),
        "time_dependent_vs_stationary": agreement,
    }))
}

fn run_kappa(config: &ExperimentConfig, checks: &mut Vec<Check>, artifacts: &mut Vec<Artifact>) -> Result<Value> {
    let dispersion = config.dispersion()?;
    let opts = config.scan_options();
    let scan = critical_scan(&dispersion, &opts)?;
    let detected = scan.critical_values();
    let expected: Vec<f64> = dispersion
        .critical_values()
        .into_iter()
        .filter(|c| (opts.lambda_min - opts.delta..=opts.lambda_max + opts.delta).contains(c))
        .collect();
    let reach = 2.0 * opts.delta;
    let near = |x: f64, set: &[f64]| set.iter().any(|c| (c - x).abs() <= reach);
    let missed = expected.iter().filter(|&&c| !near(c, &detected)).count();
    let spurious = detected.iter().filter(|&&c| !near(c, &expected)).count();
    checks.push(
        Check::at_most("critical values: missed", missed as f64, 0.0).with_detail(format!("expected {expected:?}")),
    );
    checks.push(
        Check::at_most("critical values: spurious", spurious as f64, 0.0)
            .with_detail(format!("detected {detected:?}")),
    );
    let (flagged_min, other_max) = scan.exponent_bounds();
    if flagged_min.is_finite() {
        checks.push(Check::at_least("exponent at flagged values", flagged_min, 0.9));
    }
    if other_max.is_finite() {
        checks.push(Check::at_most("exponent elsewhere", other_max, 0.1));
    }

    let mut header = vec!["lambda".to_string()];
    header.extend(scan.eps_sequence.iter().map(|e| format!("sup_eps_{e:e}")));
    header.extend(["exponent".to_string(), "flagged".to_string()]);
    let rows: Vec<Vec<f64>> = scan
        .rows
        .iter()
        .map(|r| {
            let mut row = vec![r.lambda];
            if r.has_spectrum() {
                row.extend(&r.sup_norms);
            } else {
                row.extend(std::iter::repeat_n(f64::NAN, scan.eps_sequence.len()));
            }
            row.push(r.exponent.unwrap_or(f64::NAN));
            row.push(if r.flagged { 1.0 } else { 0.0 });
            row
        })
        .collect();
    artifacts.push(artifact("kappa.csv", OutputFormat::Csv, csv_bytes(&header, &rows)?));
    artifacts.push(artifact(
        "exponent.dat",
        OutputFormat::Plotdata,
        plot_bytes(scan.rows.iter().filter_map(|r| r.exponent.map(|e| (r.lambda, e)))),
    ));
    Ok(json!({
        "critical_values": detected,
        "expected": expected,
        "flagged_exponent_min": flagged_min.is_finite().then_some(flagged_min),
        "unflagged_exponent_max": other_max.is_finite().then_some(other_max),
        "rows": scan.rows.len(),
    }))
}

/// `|tau_inf - ew| <= max(2% |ew|, error bar + 1e-3)`.
pub fn main_identity_tolerance(ew: f64, error_bar: f64) -> f64 {
    (0.02 * ew.abs()).max(error_bar + 1e-3)
}

fn run_delay(config: &ExperimentConfig, checks: &mut Vec<Check>, artifacts: &mut Vec<Artifact>) -> Result<Value> {
    let grid = config.grid()?;
    let dispersion = config.dispersion()?;
    let potential = config.potential()?;
    let phi = config.incoming_state(&grid)?;
    let prop = Propagator::new(&grid, &dispersion, &potential, config.time.dt)?;
    let opts = config.delay_options()?;

    let run = sojourn_run(&prop, &phi, &opts, &Identity)?;
    let c = &run.curve;
    let ext = extrapolate_delay(&c.r_values, &c.tau)?;
    let ext_in = extrapolate_delay(&c.r_values, &c.tau_in)?;

    for (i, &r) in c.r_values.iter().enumerate() {
        let rel = |tail: f64, value: f64| tail / value.abs().max(f64::MIN_POSITIVE);
        let worst = rel(c.tail_full[i], c.t_full[i])
            .max(rel(c.tail_phi[i], c.t0_phi[i]))
            .max(rel(c.tail_sphi[i], c.t0_sphi[i]));
        checks.push(Check::at_most(format!("sojourn tail bound r={r}"), worst, 1e-6));
    }
    checks.push(Check::at_most("T2 correction", c.t2.abs(), 1e-12));
    let a4 = &run.decay;
    checks.push(Check::at_least(
        "wave-operator decay monotone",
        if a4.monotone { 1.0 } else { 0.0 },
        1.0,
    ));
    checks.push(Check::at_most("wave-operator decay before t_prep", a4.max_before_prep, config.time.tail_eps));
    checks.push(Check::at_most("boundary mass", c.max_boundary_mass, opts.boundary_limit));
    let window = config.window()?;
    checks.push(Check::at_most("energy window leakage", window_leakage(&run.s_phi, &window), 1e-8));

    let mut ew = [None, None];
    if dispersion.is_quadratic() {
        let loc = config.localisation_function()?;
        guarded(checks, "Eisenbud-Wigner (formula)", |_| {
            let rf = RfTable::new(loc, QuadratureSpec::default())?;
            let top = TimeOperator::new(&dispersion, &rf, THRESHOLD_MARGIN)?;
            ew[0] = Some(ew_formula(&prop, &top, &phi, &config.time_dependent_options())?);
            Ok(())
        });
        guarded(checks, "Eisenbud-Wigner (spectral)", |_| {
            let stationary = StationaryOptions::default();
            ew[1] = Some(ew_spectral(&potential, &phi, &stationary, 0.5 * THRESHOLD_MARGIN)?);
            Ok(())
        });
    } else {
        checks.push(Check::failed("Eisenbud-Wigner", &Error::RequiresQuadratic));
    }
    for (label, value) in ["formula", "spectral"].iter().zip(ew) {
        if let Some(z) = value {
            checks.push(Check::at_most(format!("Eisenbud-Wigner reality ({label})"), z.im.abs(), 1e-6));
            checks.push(Check::at_most(
                format!("main identity ({label})"),
                (ext.tau_inf - z.re).abs(),
                main_identity_tolerance(z.re, ext.error_bar),
            ));
        }
    }
    if let [Some(a), Some(b)] = ew {
        checks.push(Check::at_most("Eisenbud-Wigner realizations agree", (a.re - b.re).abs(), 1e-4));
    }
    if potential.is_zero() {
        checks.push(Check::at_most("free delay", ext.tau_inf.abs(), 1e-6));
        for (label, value) in ["formula", "spectral"].iter().zip(ew) {
            if let Some(z) = value {
                checks.push(Check::at_most(format!("free Eisenbud-Wigner ({label})"), z.norm(), 1e-6));
            }
        }
    }

    let header: Vec<String> = [
        "r", "T_r", "T0_phi", "T0_Sphi", "tau", "tau_naive", "tau_in", "tail_full", "tail_phi", "tail_sphi",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let rows: Vec<Vec<f64>> = (0..c.r_values.len())
        .map(|i| {
            vec![
                c.r_values[i], c.t_full[i], c.t0_phi[i], c.t0_sphi[i], c.tau[i], c.tau_naive[i], c.tau_in[i],
                c.tail_full[i], c.tail_phi[i], c.tail_sphi[i],
            ]
        })
        .collect();
    artifacts.push(artifact("delay_curve.csv", OutputFormat::Csv, csv_bytes(&header, &rows)?));
    let pairs = |ys: &[f64]| plot_bytes(c.r_values.iter().copied().zip(ys.iter().copied()));
    artifacts.push(artifact("tau_vs_r.dat", OutputFormat::Plotdata, pairs(&c.tau)));
    artifacts.push(artifact("tau_in_vs_r.dat", OutputFormat::Plotdata, pairs(&c.tau_in)));
    artifacts.push(artifact(
        "wave_operator_decay.dat",
        OutputFormat::Plotdata,
        plot_bytes(a4.samples.iter().copied()),
    ));
    for (i, r) in c.r_values.iter().enumerate() {
        let diff = run.times.iter().enumerate().map(|(j, &t)| {
            (t, run.integrand_full[i][j] - 0.5 * (run.integrand_phi[i][j] + run.integrand_sphi[i][j]))
        });
        artifacts.push(artifact(format!("integrand_r{r}.dat"), OutputFormat::Plotdata, plot_bytes(diff)));
    }

    let ew_json = |z: Option<crate::grid::C64>| z.map(|z| json!({"re": z.re, "im": z.im}));
    Ok(json!({
        "tau_inf": ext.tau_inf,
        "extrapolation": ext,
        "tau_in_extrapolation": ext_in,
        "eisenbud_wigner_formula": ew_json(ew[0]),
        "eisenbud_wigner_spectral": ew_json(ew[1]),
        "curve": c,
        "wave_operator_decay_integral": a4.integral,
        "d_s_weight": 2,
    }))
}
