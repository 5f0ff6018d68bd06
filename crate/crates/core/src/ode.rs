//! Direct integration of the profile ODE over one period.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{profile_data, DomainClass, ProblemParams, ProfileData, RealFamily};

/// Maximum tolerated relative drift of `J` and `E` along the trajectory.
pub const DRIFT_TOL: f64 = 1e-8;
const MAX_SUBSTEPS: usize = 64;

/// A profile sampled on `x_l = l T / L`, `l = 0..=L`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveSample {
    pub grid: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Floquet multiplier in `[0, 2π)`.
    pub theta: f64,
    pub period: f64,
    pub params: Option<ProblemParams>,
}

impl WaveSample {
    /// Builds a sample from the `L` interior values; the closing value at
    /// `x = T` is `e^{iθ} u_0`.
    pub fn from_cells(cells: &[Complex64], period: f64, theta: f64, params: Option<ProblemParams>) -> Self {
        let l = cells.len();
        let dx = period / l as f64;
        let grid = (0..=l).map(|i| i as f64 * dx).collect();
        let mut values = cells.to_vec();
        values.push(Complex64::from_polar(1.0, theta) * cells[0]);
        Self { grid, values, theta, period, params }
    }

    /// Number of cells `L`.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.values.iter().map(|z| z.norm()).collect()
    }
}

/// Integration output together with its conservation diagnostics.
#[derive(Debug, Clone, Serialize)]
pub struct IntegrationReport {
    pub sample: WaveSample,
    /// `max |J(x) - J| / max(1, |J|)` over all substeps.
    pub drift_j: f64,
    /// `max |E(x) - E| / max(1, |E|)` over all substeps.
    pub drift_e: f64,
    /// `|u(T) - e^{iθ}u(0)| + |u'(T) - e^{iθ}u'(0)|`.
    pub periodicity_residual: f64,
    /// RK4 steps per grid cell.
    pub substeps: usize,
}

type State = (Complex64, Complex64);

fn rhs(a: f64, b: f64, (u, v): State) -> State {
    (v, -(a + b * u.norm_sqr()) * u)
}

fn rk4(a: f64, b: f64, s: State, h: f64) -> State {
    let add = |s: State, k: State, f: f64| (s.0 + k.0 * f, s.1 + k.1 * f);
    let k1 = rhs(a, b, s);
    let k2 = rhs(a, b, add(s, k1, h / 2.0));
    let k3 = rhs(a, b, add(s, k2, h / 2.0));
    let k4 = rhs(a, b, add(s, k3, h));
    (
        s.0 + (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0) * (h / 6.0),
        s.1 + (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1) * (h / 6.0),
    )
}

/// `(J, E)` of a state.
pub fn invariants(params: &ProblemParams, (u, v): (Complex64, Complex64)) -> (f64, f64) {
    let j = (u * v.conj()).im;
    let m2 = u.norm_sqr();
    let e = v.norm_sqr() / 2.0 + params.a * m2 / 2.0 + params.b * m2 * m2 / 4.0;
    (j, e)
}

/// Initial data at the minimum of `|u|` (at the maximum for `cn`).
fn initial_state(data: &ProfileData) -> State {
    let p = &data.params;
    match data.class {
        DomainClass::RealLineJ0(RealFamily::Dn) => (data.r1.into(), 0.0.into()),
        DomainClass::RealLineJ0(RealFamily::Cn) => (data.r2.into(), 0.0.into()),
        DomainClass::RealLineJ0(RealFamily::Sn) => (0.0.into(), (2.0f64 * p.e).sqrt().into()),
        _ => (data.r1.into(), Complex64::new(0.0, -p.j / data.r1)),
    }
}

/// Integrates `(u, u')' = (u', -a u - b|u|²u)` over one period by fixed-step
/// RK4, doubling the substeps per grid cell until the invariants drift by
/// at most [`DRIFT_TOL`].
pub fn integrate_profile_report(params: &ProblemParams, cells: usize) -> Result<IntegrationReport> {
    if cells < 16 {
        return Err(Error::Domain(format!("need at least 16 grid cells, got {cells}")));
    }
    let data = profile_data(params)?;
    let mut substeps = 1;
    loop {
        let report = integrate_with(&data, cells, substeps);
        if report.drift_j.max(report.drift_e) <= DRIFT_TOL {
            return Ok(report);
        }
        if substeps >= MAX_SUBSTEPS {
            return Err(Error::InvariantDrift { drift: report.drift_j.max(report.drift_e), substeps });
        }
        substeps *= 2;
    }
}

/// [`integrate_profile_report`] without the diagnostics.
pub fn integrate_profile(params: &ProblemParams, cells: usize) -> Result<WaveSample> {
    integrate_profile_report(params, cells).map(|r| r.sample)
}

fn integrate_with(data: &ProfileData, cells: usize, substeps: usize) -> IntegrationReport {
    let p = data.params;
    let h = data.period / (cells * substeps) as f64;
    let start = initial_state(data);
    let (j0, e0) = (p.j, p.e);
    let mut state = start;
    let mut drift_j = 0.0f64;
    let mut drift_e = 0.0f64;
    let mut values = Vec::with_capacity(cells + 1);
    values.push(state.0);
    for _ in 0..cells {
        for _ in 0..substeps {
            state = rk4(p.a, p.b, state, h);
            let (j, e) = invariants(&p, state);
            drift_j = drift_j.max((j - j0).abs() / j0.abs().max(1.0));
            drift_e = drift_e.max((e - e0).abs() / e0.abs().max(1.0));
        }
        values.push(state.0);
    }
    let twist = Complex64::from_polar(1.0, data.theta.raw);
    let periodicity_residual = (state.0 - twist * start.0).norm() + (state.1 - twist * start.1).norm();
    let grid = (0..=cells).map(|i| i as f64 * data.period / cells as f64).collect();
    IntegrationReport {
        sample: WaveSample { grid, values, theta: data.theta.reduced, period: data.period, params: Some(p) },
        drift_j,
        drift_e,
        periodicity_residual,
        substeps,
    }
}

/// Cyclically shifts `cells` (length `L`, twisted closure `u_L = e^{iθ}u_0`)
/// so the minimum modulus sits at index 0, then rotates the global phase so
/// that value is real and non-negative. Constant-modulus states are only
/// rotated.
pub fn align_cells(cells: &mut [Complex64], theta: f64) {
    let l = cells.len();
    if l == 0 {
        return;
    }
    let (mut lo, mut hi, mut arg) = (f64::INFINITY, 0.0f64, 0);
    for (i, z) in cells.iter().enumerate() {
        let m = z.norm();
        if m < lo {
            lo = m;
            arg = i;
        }
        hi = hi.max(m);
    }
    if hi - lo > 1e-9 * hi && arg != 0 {
        // Entries that wrap past the seam pick up the twist factor.
        let twist = Complex64::from_polar(1.0, theta);
        cells.rotate_left(arg);
        for z in &mut cells[l - arg..] {
            *z *= twist;
        }
    }
    let anchor = cells.iter().find(|z| z.norm() > 1e-2 * hi).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = anchor.conj() / anchor.norm();
    for z in cells.iter_mut() {
        *z *= phase;
    }
}

/// Canonical alignment of a sample: minimum modulus at `x = 0`, `u(0)` real
/// and non-negative.
pub fn align(sample: &WaveSample) -> WaveSample {
    let l = sample.cells();
    let mut cells = sample.values[..l].to_vec();
    align_cells(&mut cells, sample.theta);
    WaveSample::from_cells(&cells, sample.period, sample.theta, sample.params)
}
