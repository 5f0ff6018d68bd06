//! Normalized gradient flow for `min ℰ(u)` at fixed mass and momentum in
//! the twisted space `u(x + T) = e^{iθ} u(x)`.
//!
//! Each iteration takes one semi-implicit Euler step of `u_t = u_xx + b|u|²u`
//! and then renormalizes with the linear flow `u_t = (μ + iω∂ₓ)u`, choosing
//! `μ`, `ω` so that the first-order change of `(M, P)` closes the gap to the
//! targets `(m, p)`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::CyclicTridiagonal;
use crate::ode::{align_cells, WaveSample};

/// Relative Cauchy–Schwarz gap below which an iterate is a plane wave.
pub const DEGENERACY_TOL: f64 = 1e-12;
/// Relative constraint residual targeted by the terminal projection.
pub const CONSTRAINT_TOL: f64 = 1e-6;
const MAX_PROJECTION_SWEEPS: usize = 200;

/// Uniform grid on `[0, T)` with twisted closure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid {
    pub period: f64,
    pub cells: usize,
    pub dx: f64,
    pub theta: f64,
}

impl Grid {
    pub fn new(period: f64, cells: usize, theta: f64) -> Result<Self> {
        if !(period > 0.0 && period.is_finite()) {
            return Err(Error::Domain(format!("period must be positive, got {period}")));
        }
        if cells < 16 {
            return Err(Error::Domain(format!("need at least 16 cells, got {cells}")));
        }
        if !theta.is_finite() {
            return Err(Error::Domain("non-finite Floquet multiplier".into()));
        }
        Ok(Self { period, cells, dx: period / cells as f64, theta })
    }

    pub fn x(&self, l: usize) -> f64 {
        l as f64 * self.dx
    }

    pub fn twist(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.theta)
    }
}

/// Target mass and momentum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Constraints {
    pub mass: f64,
    pub momentum: f64,
}

impl Constraints {
    pub fn new(mass: f64, momentum: f64) -> Result<Self> {
        if !(mass > 0.0) || !momentum.is_finite() {
            return Err(Error::Domain(format!("need mass > 0 and finite momentum, got ({mass}, {momentum})")));
        }
        Ok(Self { mass, momentum })
    }
}

/// Discretization of the `iω∂ₓ` transport term in the renormalization.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum TransportStencil {
    /// `(u[l+1] - u[l-1]) / 2δx`, consistent with `∂ₜu = (μ + iω∂ₓ)u`.
    #[default]
    Continuous,
    /// `(u[l-1] - u[l+1]) / 2δx`, the sign as typeset in the scheme.
    Printed,
}

impl TransportStencil {
    fn sign(self) -> f64 {
        match self {
            Self::Continuous => 1.0,
            Self::Printed => -1.0,
        }
    }
}

/// Starting point of the flow.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum InitialData {
    /// `1 + i + cos(2πx/T)`.
    #[default]
    Standard,
    /// `√(2m/T) (1 + 0.1 cos(2πx/T))`, real.
    Bump,
    /// Explicit cell values (length `L`).
    Cells(Vec<Complex64>),
}

impl InitialData {
    pub fn cells(&self, grid: &Grid, constraints: &Constraints) -> Result<Vec<Complex64>> {
        let kappa = std::f64::consts::TAU / grid.period;
        match self {
            Self::Standard => {
                Ok((0..grid.cells).map(|l| Complex64::new(1.0 + (kappa * grid.x(l)).cos(), 1.0)).collect())
            }
            Self::Bump => {
                let amp = (2.0 * constraints.mass / grid.period).sqrt();
                Ok((0..grid.cells).map(|l| Complex64::from(amp * (1.0 + 0.1 * (kappa * grid.x(l)).cos()))).collect())
            }
            Self::Cells(v) if v.len() == grid.cells => Ok(v.clone()),
            Self::Cells(v) => Err(Error::Input(format!("initial data has {} cells, grid has {}", v.len(), grid.cells))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowConfig {
    pub dt: f64,
    /// Stop once `max_l ||u_{n+1}^l| - |u_n^l|| < eps`.
    pub eps: f64,
    pub max_steps: usize,
    /// Nonlinearity `b`.
    pub b: f64,
    pub initial: InitialData,
    pub stencil: TransportStencil,
    /// Relative Cauchy–Schwarz gap that selects the plane-wave branch.
    pub degeneracy_tol: f64,
}

impl FlowConfig {
    pub fn new(b: f64) -> Self {
        Self {
            dt: 1e-3,
            eps: 1e-6,
            max_steps: 1_000_000,
            b,
            initial: InitialData::default(),
            stencil: TransportStencil::default(),
            degeneracy_tol: DEGENERACY_TOL,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.eps > 0.0) {
            return Err(Error::Domain(format!("need dt, eps > 0, got ({}, {})", self.dt, self.eps)));
        }
        if !(self.degeneracy_tol >= 0.0) {
            return Err(Error::Domain("degeneracy tolerance must be non-negative".into()));
        }
        if self.b == 0.0 || !self.b.is_finite() {
            return Err(Error::Domain("nonlinearity b must be nonzero".into()));
        }
        Ok(())
    }
}

/// Discrete mass, momentum, centered kinetic term and energy of a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Functionals {
    /// `½ Σ |u_l|² δx`.
    pub mass: f64,
    /// `½ Im Σ u_l conj(D₁u)_l δx`.
    pub momentum: f64,
    /// `½ Σ |D₁u|² δx` with the centered difference `D₁`.
    pub kinetic: f64,
    /// `½ Σ |u_{l+1} - u_l|²/δx - (b/4) Σ |u_l|⁴ δx`.
    pub energy: f64,
}

/// Twisted centered first difference of `u`.
pub fn centered_difference(u: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let n = u.len();
    let tw = grid.twist();
    let h = 0.5 / grid.dx;
    (0..n)
        .map(|l| {
            let next = if l + 1 < n { u[l + 1] } else { tw * u[0] };
            let prev = if l > 0 { u[l - 1] } else { tw.conj() * u[n - 1] };
            (next - prev) * h
        })
        .collect()
}

/// Twisted three-point Laplacian of `u`.
pub fn laplacian(u: &[Complex64], grid: &Grid) -> Vec<Complex64> {
    let n = u.len();
    let tw = grid.twist();
    let h = 1.0 / (grid.dx * grid.dx);
    (0..n)
        .map(|l| {
            let next = if l + 1 < n { u[l + 1] } else { tw * u[0] };
            let prev = if l > 0 { u[l - 1] } else { tw.conj() * u[n - 1] };
            (next - 2.0 * u[l] + prev) * h
        })
        .collect()
}

pub fn discrete_functionals(u: &[Complex64], grid: &Grid, b: f64) -> Functionals {
    let n = u.len();
    let dx = grid.dx;
    let tw = grid.twist();
    let d1 = centered_difference(u, grid);
    let mut mass = 0.0;
    let mut momentum = 0.0;
    let mut kinetic = 0.0;
    let mut gradient = 0.0;
    let mut quartic = 0.0;
    for l in 0..n {
        let m2 = u[l].norm_sqr();
        mass += m2;
        quartic += m2 * m2;
        momentum += (u[l] * d1[l].conj()).im;
        kinetic += d1[l].norm_sqr();
        let next = if l + 1 < n { u[l + 1] } else { tw * u[0] };
        gradient += (next - u[l]).norm_sqr();
    }
    Functionals {
        mass: 0.5 * mass * dx,
        momentum: 0.5 * momentum * dx,
        kinetic: 0.5 * kinetic * dx,
        energy: 0.5 * gradient / dx - 0.25 * b * quartic * dx,
    }
}

/// `G` with `dℰ[h] = Re Σ conj(G_l) h_l δx`, i.e. `-D₂u - b|u|²u`.
pub fn energy_gradient(u: &[Complex64], grid: &Grid, b: f64) -> Vec<Complex64> {
    laplacian(u, grid).into_iter().zip(u).map(|(lap, &z)| -lap - b * z.norm_sqr() * z).collect()
}

/// Semi-implicit Euler step `(I - δt D₂ - δt b diag|uₙ|²) ũ = uₙ`.
pub fn semi_implicit_step(u: &[Complex64], grid: &Grid, b: f64, dt: f64) -> Result<Vec<Complex64>> {
    let mut m =
        CyclicTridiagonal::laplacian(u.len(), grid.dx, grid.theta).affine(Complex64::from(1.0), Complex64::from(-dt));
    for (d, z) in m.diag.iter_mut().zip(u) {
        *d -= dt * b * z.norm_sqr();
    }
    m.solve(u)
}

/// Outcome of one renormalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Renormalization {
    /// Functionals of the input state.
    pub before: Functionals,
    pub mu: f64,
    pub omega: f64,
    /// `m₀k₀ - p₀²`.
    pub gap: f64,
    /// The input was a plane wave and was replaced by the constrained one.
    pub degenerate: bool,
}

/// The closed-form `(μₙ, ωₙ)` of the two-constraint renormalization.
pub fn renormalization_coefficients(f: &Functionals, c: &Constraints) -> (f64, f64) {
    let (m0, p0, k0) = (f.mass, f.momentum, f.kinetic);
    let det = 2.0 * (m0 * k0 - p0 * p0);
    let dm = c.mass - m0;
    let dp = c.momentum - p0;
    ((k0 * dm - p0 * dp) / det, (m0 * dp - p0 * dm) / det)
}

/// Renormalizes `ũ` toward `(m, p)`: solves `(I - μ I - iω D₁) u = ũ`, or
/// substitutes `√(2m/T) e^{-i(p/m)x}` when `ũ` is a plane wave.
pub fn renormalize(
    u: &[Complex64],
    grid: &Grid,
    config: &FlowConfig,
    constraints: &Constraints,
) -> Result<(Vec<Complex64>, Renormalization)> {
    let f = discrete_functionals(u, grid, config.b);
    let gap = f.mass * f.kinetic - f.momentum * f.momentum;
    if gap <= config.degeneracy_tol * f.mass * f.kinetic.max(1.0) {
        let amp = (2.0 * constraints.mass / grid.period).sqrt();
        let wave = -constraints.momentum / constraints.mass;
        let out = (0..u.len()).map(|l| Complex64::from_polar(amp, wave * grid.x(l))).collect();
        return Ok((out, Renormalization { before: f, mu: 0.0, omega: 0.0, gap, degenerate: true }));
    }
    let (mu, omega) = renormalization_coefficients(&f, constraints);
    let m = CyclicTridiagonal::centered_difference(u.len(), grid.dx, grid.theta)
        .affine(Complex64::from(1.0 - mu), Complex64::new(0.0, -omega * config.stencil.sign()));
    let out = m.solve(u)?;
    Ok((out, Renormalization { before: f, mu, omega, gap, degenerate: false }))
}

/// One row of the minimization trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// Energy of `uₙ` and of `ũₙ₊₁` (flow substep only).
    pub energy_before_flow: f64,
    pub energy_after_flow: f64,
    /// Functionals of the renormalized, aligned `uₙ₊₁`.
    pub energy: f64,
    pub mass: f64,
    pub momentum: f64,
    pub mu: f64,
    pub omega: f64,
    /// `m₀k₀ - p₀²` and its inputs, at `ũₙ₊₁`.
    pub m0: f64,
    pub p0: f64,
    pub k0: f64,
    pub degenerate: bool,
    pub max_modulus_change: f64,
}

/// Full trace of a run.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Diagnostics {
    pub records: Vec<StepRecord>,
    pub converged: bool,
    pub projection_sweeps: usize,
    pub mass_residual: f64,
    pub momentum_residual: f64,
}

impl Diagnostics {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&StepRecord> {
        self.records.last()
    }
}

/// Runs the normalized gradient flow to convergence and returns the
/// aligned minimizer with its trace.
pub fn minimize(grid: &Grid, constraints: &Constraints, config: &FlowConfig) -> Result<(WaveSample, Diagnostics)> {
    config.validate()?;
    let b = config.b;
    let mut u = config.initial.cells(grid, constraints)?;
    let mut diag = Diagnostics::default();
    let mut moduli: Vec<f64> = u.iter().map(|z| z.norm()).collect();
    for step in 1..=config.max_steps {
        let energy_before_flow = discrete_functionals(&u, grid, b).energy;
        let tilde = semi_implicit_step(&u, grid, b, config.dt)?;
        let (mut next, info) = renormalize(&tilde, grid, config, constraints)?;
        align_cells(&mut next, grid.theta);
        let mut change = 0.0f64;
        for (z, m) in next.iter().zip(moduli.iter_mut()) {
            let nm = z.norm();
            change = change.max((nm - *m).abs());
            *m = nm;
        }
        let f = discrete_functionals(&next, grid, b);
        diag.records.push(StepRecord {
            step,
            energy_before_flow,
            energy_after_flow: info.before.energy,
            energy: f.energy,
            mass: f.mass,
            momentum: f.momentum,
            mu: info.mu,
            omega: info.omega,
            m0: info.before.mass,
            p0: info.before.momentum,
            k0: info.before.kinetic,
            degenerate: info.degenerate,
            max_modulus_change: change,
        });
        u = next;
        if !change.is_finite() {
            break;
        }
        if change < config.eps {
            diag.converged = true;
            break;
        }
    }
    if !diag.converged {
        return Err(Error::NonConvergence(Box::new(diag)));
    }
    let sweeps = project(&mut u, grid, config, constraints)?;
    let f = discrete_functionals(&u, grid, b);
    diag.projection_sweeps = sweeps;
    diag.mass_residual = (f.mass - constraints.mass).abs();
    diag.momentum_residual = (f.momentum - constraints.momentum).abs();
    if diag.mass_residual > CONSTRAINT_TOL * constraints.mass
        || diag.momentum_residual > CONSTRAINT_TOL * constraints.momentum.abs().max(1.0)
    {
        diag.converged = false;
        return Err(Error::NonConvergence(Box::new(diag)));
    }
    align_cells(&mut u, grid.theta);
    Ok((WaveSample::from_cells(&u, grid.period, grid.theta, None), diag))
}

/// Repeats the renormalization alone until the constraint residuals are
/// well inside [`CONSTRAINT_TOL`]. Returns the number of sweeps.
fn project(u: &mut Vec<Complex64>, grid: &Grid, config: &FlowConfig, constraints: &Constraints) -> Result<usize> {
    let tight = 1e-3 * CONSTRAINT_TOL;
    for sweep in 0..MAX_PROJECTION_SWEEPS {
        let f = discrete_functionals(u, grid, config.b);
        if (f.mass - constraints.mass).abs() <= tight * constraints.mass
            && (f.momentum - constraints.momentum).abs() <= tight * constraints.momentum.abs().max(1.0)
        {
            return Ok(sweep);
        }
        *u = renormalize(u, grid, config, constraints)?.0;
    }
    Ok(MAX_PROJECTION_SWEEPS)
}
