//! Minimizer-versus-ODE comparison runs and their serialized reports.

use std::io::{BufRead, Write};
use std::path::Path;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gradflow::{
    discrete_functionals, minimize, Constraints, Diagnostics, FlowConfig, Grid, InitialData, TransportStencil,
    DEGENERACY_TOL,
};
use crate::ode::{align, integrate_profile_report, WaveSample};
use crate::profile::{profile_data, ProblemParams, ProfileData};

/// Source of the `(m, p)` constraints handed to the minimizer.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum TargetSource {
    /// Discrete mass and momentum of the sampled ODE solution.
    #[default]
    Sampled,
    /// The exact integrals `M̃`, `P̃`.
    Exact,
}

/// Settings of a comparison run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompareConfig {
    pub cells: usize,
    pub dt: f64,
    pub eps: f64,
    pub max_steps: usize,
    pub stencil: TransportStencil,
    pub targets: TargetSource,
    pub degeneracy_tol: f64,
    #[serde(skip)]
    pub initial: InitialData,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self {
            cells: 1000,
            dt: 1e-3,
            eps: 1e-6,
            max_steps: 1_000_000,
            stencil: TransportStencil::default(),
            targets: TargetSource::default(),
            degeneracy_tol: DEGENERACY_TOL,
            initial: InitialData::default(),
        }
    }
}

/// Condensed view of a [`Diagnostics`] trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub steps: usize,
    pub final_modulus_change: f64,
    pub mass_residual: f64,
    pub momentum_residual: f64,
    pub projection_sweeps: usize,
    pub degenerate_steps: usize,
    pub final_energy: f64,
}

impl From<&Diagnostics> for ConvergenceSummary {
    fn from(d: &Diagnostics) -> Self {
        let last = d.last();
        Self {
            steps: d.len(),
            final_modulus_change: last.map_or(f64::NAN, |r| r.max_modulus_change),
            mass_residual: d.mass_residual,
            momentum_residual: d.momentum_residual,
            projection_sweeps: d.projection_sweeps,
            degenerate_steps: d.records.iter().filter(|r| r.degenerate).count(),
            final_energy: last.map_or(f64::NAN, |r| r.energy),
        }
    }
}

/// Pointwise differences between two aligned samples on the same grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    pub max_modulus_difference: f64,
    pub max_complex_difference: f64,
}

/// Echoed inputs, profile data, convergence summary and comparison metrics.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: &'static str,
    pub params: ProblemParams,
    pub config: CompareConfig,
    pub profile: ProfileData,
    pub constraints: Option<Constraints>,
    pub convergence: Option<ConvergenceSummary>,
    pub metrics: Option<Metrics>,
}

impl RunReport {
    pub fn profile_only(params: ProblemParams) -> Result<Self> {
        Ok(Self {
            version: env!("CARGO_PKG_VERSION"),
            params,
            config: CompareConfig::default(),
            profile: profile_data(&params)?,
            constraints: None,
            convergence: None,
            metrics: None,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Output of [`compare`]: the report and both aligned samples.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub report: RunReport,
    pub ode: WaveSample,
    pub minimizer: WaveSample,
    pub diagnostics: Diagnostics,
}

/// Max pointwise differences over the `L` cells of two samples.
pub fn metrics(a: &WaveSample, b: &WaveSample) -> Result<Metrics> {
    if a.values.len() != b.values.len() {
        return Err(Error::Input(format!("samples have {} and {} points", a.values.len(), b.values.len())));
    }
    let l = a.cells();
    let (mut dm, mut dc) = (0.0f64, 0.0f64);
    for (x, y) in a.values[..l].iter().zip(&b.values[..l]) {
        dm = dm.max((x.norm() - y.norm()).abs());
        dc = dc.max((x - y).norm());
    }
    Ok(Metrics { max_modulus_difference: dm, max_complex_difference: dc })
}

/// Integrates the profile, minimizes with the matching `(T, θ, m, p)` and
/// compares the aligned results.
pub fn compare(params: &ProblemParams, config: &CompareConfig) -> Result<Comparison> {
    let profile = profile_data(params)?;
    let ode = integrate_profile_report(params, config.cells)?;
    let grid = Grid::new(profile.period, config.cells, profile.theta.reduced)?;
    let constraints = match config.targets {
        TargetSource::Exact => Constraints::new(profile.mass, profile.momentum)?,
        TargetSource::Sampled => {
            let cells = &ode.sample.values[..config.cells];
            let f = discrete_functionals(cells, &grid, params.b);
            Constraints::new(f.mass, f.momentum)?
        }
    };
    let flow = FlowConfig {
        dt: config.dt,
        eps: config.eps,
        max_steps: config.max_steps,
        b: params.b,
        initial: config.initial.clone(),
        stencil: config.stencil,
        degeneracy_tol: config.degeneracy_tol,
    };
    let (mut minimizer, diagnostics) = minimize(&grid, &constraints, &flow)?;
    minimizer.params = Some(*params);
    let ode = align(&ode.sample);
    let m = metrics(&ode, &minimizer)?;
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION"),
        params: *params,
        config: config.clone(),
        profile,
        constraints: Some(constraints),
        convergence: Some(ConvergenceSummary::from(&diagnostics)),
        metrics: Some(m),
    };
    Ok(Comparison { report, ode, minimizer, diagnostics })
}

/// Writes `x, re_u, im_u, abs_u` rows for every sample point.
pub fn write_sample_csv<W: Write>(sample: &WaveSample, mut out: W) -> Result<()> {
    writeln!(out, "x,re_u,im_u,abs_u")?;
    for (x, z) in sample.grid.iter().zip(&sample.values) {
        writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", x, z.re, z.im, z.norm())?;
    }
    Ok(())
}

pub fn save_sample_csv(sample: &WaveSample, path: &Path) -> Result<()> {
    let f = std::io::BufWriter::new(std::fs::File::create(path)?);
    write_sample_csv(sample, f)
}

/// Reads a dump written by [`write_sample_csv`]. The period is the last `x`
/// and `θ` is recovered from the closing value.
pub fn read_sample_csv<R: BufRead>(input: R) -> Result<WaveSample> {
    let mut grid = Vec::new();
    let mut values = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if n == 0 {
            if line.trim() != "x,re_u,im_u,abs_u" {
                return Err(Error::Input(format!("unexpected header {line:?}")));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Input(format!("line {}: {e}", n + 1)))?;
        if cols.len() != 4 {
            return Err(Error::Input(format!("line {}: expected 4 columns", n + 1)));
        }
        grid.push(cols[0]);
        values.push(Complex64::new(cols[1], cols[2]));
    }
    if values.len() < 2 {
        return Err(Error::Input("sample needs at least two rows".into()));
    }
    let first = values[0];
    let last = values[values.len() - 1];
    let theta = if first.norm() > 0.0 { crate::profile::reduce_angle((last / first).arg()) } else { 0.0 };
    Ok(WaveSample { period: grid[grid.len() - 1], grid, values, theta, params: None })
}

pub fn load_sample_csv(path: &Path) -> Result<WaveSample> {
    read_sample_csv(std::io::BufReader::new(std::fs::File::open(path)?))
}
