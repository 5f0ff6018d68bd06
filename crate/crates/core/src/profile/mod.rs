//! Analytics of the profile ODE `u'' + a u + b |u|² u = 0`.
//!
//! Everything here is a function of the invariants `(J, E)` and the
//! coefficients `(b, a)`: the radial potential, the admissible domains and
//! their boundary curves, the roots of the cubic `Π`, and the period,
//! Floquet multiplier, mass and momentum of the corresponding solution.

mod boundary;
mod families;
mod integrals;
mod roots;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use boundary::{boundary_curve, boundary_point, q_interval, BoundaryPoint};
pub use families::{elliptic_family_params, real_family_shape, Family, FamilyShape};
pub use integrals::{floquet_theta, mass_momentum, period, profile_data, ProfileData, Theta, QUAD_TOL};
pub use roots::{cubic_roots, CubicRoots};

/// Relative tolerance used to decide that `E` sits on a boundary curve.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Coefficients and invariants of one profile problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    /// Nonlinearity; `b < 0` defocusing, `b > 0` focusing.
    pub b: f64,
    /// Frequency.
    pub a: f64,
    /// Angular momentum `Im(u ū')`, normalized to be non-negative.
    pub j: f64,
    /// ODE energy `|u'|²/2 + a|u|²/2 + b|u|⁴/4`.
    pub e: f64,
}

impl ProblemParams {
    pub fn new(b: f64, a: f64, j: f64, e: f64) -> Result<Self> {
        if ![b, a, j, e].iter().all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite problem parameter".into()));
        }
        if b == 0.0 {
            return Err(Error::Domain("nonlinearity b must be nonzero".into()));
        }
        if j < 0.0 {
            return Err(Error::Domain(format!("angular momentum J={j} must be >= 0")));
        }
        Ok(Self { b, a, j, e })
    }

    pub fn with_energy(self, e: f64) -> Result<Self> {
        Self::new(self.b, self.a, self.j, e)
    }

    pub fn is_focusing(&self) -> bool {
        self.b > 0.0
    }

    /// Coefficients of `Π(y) = -b y³ - 2a y² + 4E y - 2J²`, highest degree first.
    pub fn cubic_coefficients(&self) -> [f64; 4] {
        [-self.b, -2.0 * self.a, 4.0 * self.e, -2.0 * self.j * self.j]
    }

    pub(crate) fn cubic(&self, y: f64) -> f64 {
        let [c3, c2, c1, c0] = self.cubic_coefficients();
        ((c3 * y + c2) * y + c1) * y + c0
    }

    pub(crate) fn cubic_derivative(&self, y: f64) -> f64 {
        let [c3, c2, c1, _] = self.cubic_coefficients();
        (3.0 * c3 * y + 2.0 * c2) * y + c1
    }
}

/// Which real-valued (`J = 0`) solution a parameter set produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RealFamily {
    Sn,
    Cn,
    Dn,
    ConstantZero,
    ConstantNontrivial,
    Homoclinic,
    Heteroclinic,
}

/// Classification of a parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DomainClass {
    InsideD1,
    InsideD2,
    InsideD3,
    OnEminus,
    OnEplus,
    RealLineJ0(RealFamily),
    NoBoundedSolution,
}

impl DomainClass {
    /// True for the open domains `D1`, `D2`, `D3`.
    pub fn is_interior(self) -> bool {
        matches!(self, Self::InsideD1 | Self::InsideD2 | Self::InsideD3)
    }

    /// True when the solution is a nonconstant periodic (or plane) wave
    /// with finite period.
    pub fn has_finite_period(self) -> bool {
        self.is_interior()
            || matches!(self, Self::OnEminus | Self::RealLineJ0(RealFamily::Sn | RealFamily::Cn | RealFamily::Dn))
    }
}

impl fmt::Display for DomainClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::RealLineJ0(fam) => write!(f, "RealLineJ0/{fam:?}"),
            other => write!(f, "{other:?}"),
        }
    }
}

/// Parametrization roots of `J = Q(Q²-a)/b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QBranches {
    /// Branch giving the minimum of the potential (`E₋`).
    pub big_q: f64,
    /// Branch giving the local maximum (`E₊`); defocusing only.
    pub small_q: Option<f64>,
}

/// The radial potential `V_J(r) = J²/(2r²) + a r²/2 + b r⁴/4`.
pub fn potential(params: &ProblemParams, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain(format!("potential needs r > 0, got {r}")));
    }
    let r2 = r * r;
    Ok(params.j * params.j / (2.0 * r2) + params.a * r2 / 2.0 + params.b * r2 * r2 / 4.0)
}

/// Largest admissible `J` in the defocusing case, `sqrt(4a³/(27b²))`.
pub fn j_max(b: f64, a: f64) -> Option<f64> {
    (b < 0.0 && a > 0.0).then(|| (4.0 * a * a * a / (27.0 * b * b)).sqrt())
}

fn j_of_q(b: f64, a: f64, q: f64) -> f64 {
    q * (q * q - a) / b
}

/// Solves `J = Q(Q²-a)/b` on a bracket where the map is monotone.
fn invert_j(b: f64, a: f64, j: f64, mut lo: f64, mut hi: f64) -> f64 {
    let increasing = j_of_q(b, a, hi) > j_of_q(b, a, lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let above = j_of_q(b, a, mid) > j;
        if above == increasing {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut q = 0.5 * (lo + hi);
    // One Newton polish, kept only if it improves the residual.
    let d = (3.0 * q * q - a) / b;
    if d != 0.0 {
        let cand = q - (j_of_q(b, a, q) - j) / d;
        if (j_of_q(b, a, cand) - j).abs() < (j_of_q(b, a, q) - j).abs() {
            q = cand;
        }
    }
    q
}

/// The parametrization `J = Q(Q²-a)/b` (and `= q(q²-a)/b` when defocusing).
pub fn q_branches(params: &ProblemParams) -> Result<QBranches> {
    let ProblemParams { b, a, j, .. } = *params;
    if b < 0.0 {
        let Some(jmax) = j_max(b, a) else {
            return Err(Error::NoBoundedSolution(format!(
                "defocusing with a={a} <= 0 has no bounded nonconstant solution"
            )));
        };
        let inflection = (a / 3.0).sqrt();
        if (j - jmax).abs() <= BOUNDARY_TOL * jmax {
            return Ok(QBranches { big_q: inflection, small_q: Some(inflection) });
        }
        if j > jmax {
            return Err(Error::NoBoundedSolution(format!("J²={} exceeds 4a³/(27b²)={}", j * j, jmax * jmax)));
        }
        let big_q = invert_j(b, a, j, inflection, a.sqrt());
        let small_q = invert_j(b, a, j, 0.0, inflection);
        Ok(QBranches { big_q, small_q: Some(small_q) })
    } else {
        let lo = if a >= 0.0 { a.sqrt() } else { 0.0 };
        let mut hi = lo.max(1.0);
        while j_of_q(b, a, hi) < j {
            hi *= 2.0;
        }
        Ok(QBranches { big_q: invert_j(b, a, j, lo, hi), small_q: None })
    }
}

/// Lower boundary `E₋(J) = (Q²-a)(3Q²+a)/(4b)`, the minimum of `V_J`.
pub fn e_minus(params: &ProblemParams) -> Result<f64> {
    let q = q_branches(params)?.big_q;
    Ok(e_of_branch(params.b, params.a, q))
}

/// Upper boundary `E₊(J) = (q²-a)(3q²+a)/(4b)`; defocusing only.
pub fn e_plus(params: &ProblemParams) -> Result<f64> {
    if params.b > 0.0 {
        return Err(Error::Domain("E₊ is only defined for b < 0".into()));
    }
    let q = q_branches(params)?.small_q.expect("defocusing branch has q");
    Ok(e_of_branch(params.b, params.a, q))
}

pub(crate) fn e_of_branch(b: f64, a: f64, q: f64) -> f64 {
    (q * q - a) * (3.0 * q * q + a) / (4.0 * b)
}

fn near(x: f64, target: f64) -> bool {
    (x - target).abs() <= BOUNDARY_TOL * target.abs().max(1.0)
}

/// Total classification of a parameter set.
pub fn classify(params: &ProblemParams) -> DomainClass {
    let ProblemParams { b, a, j, e } = *params;
    if j == 0.0 {
        return DomainClass::RealLineJ0(match classify_real(b, a, e) {
            Some(fam) => fam,
            None => return DomainClass::NoBoundedSolution,
        });
    }
    let Ok(branches) = q_branches(params) else {
        return DomainClass::NoBoundedSolution;
    };
    let em = e_of_branch(b, a, branches.big_q);
    if near(e, em) {
        return DomainClass::OnEminus;
    }
    if e < em {
        return DomainClass::NoBoundedSolution;
    }
    if b < 0.0 {
        let ep = e_of_branch(b, a, branches.small_q.expect("defocusing"));
        if near(e, ep) {
            DomainClass::OnEplus
        } else if e < ep {
            DomainClass::InsideD1
        } else {
            DomainClass::NoBoundedSolution
        }
    } else if a >= 0.0 {
        DomainClass::InsideD2
    } else {
        DomainClass::InsideD3
    }
}

/// Why a parameter set classified as [`DomainClass::NoBoundedSolution`] has
/// no bounded profile.
pub fn explain_unbounded(params: &ProblemParams) -> String {
    let ProblemParams { b, a, j, e } = *params;
    if b < 0.0 && a <= 0.0 {
        return format!("defocusing b={b} with a={a} <= 0: V_J has no well");
    }
    if let Some(jm) = j_max(b, a).filter(|&jm| j > jm) {
        return format!("J={j} exceeds the largest admissible J={jm:.12}");
    }
    if j == 0.0 {
        return format!("no bounded real solution with b={b}, a={a} at E={e}");
    }
    match q_branches(params) {
        Ok(br) => {
            let em = e_of_branch(b, a, br.big_q);
            match br.small_q {
                _ if e < em => format!("E={e} lies below E₋(J)={em:.12}, the bottom of the well"),
                Some(q) => format!("E={e} lies above E₊(J)={:.12}, the top of the well", e_of_branch(b, a, q)),
                None => format!("E={e} admits no bounded solution"),
            }
        }
        Err(err) => err.to_string(),
    }
}

fn classify_real(b: f64, a: f64, e: f64) -> Option<RealFamily> {
    use RealFamily::*;
    let well = -a * a / (4.0 * b);
    if near(e, 0.0) && !(b > 0.0 && a < 0.0) {
        return Some(ConstantZero);
    }
    if b < 0.0 {
        if a <= 0.0 {
            return None;
        }
        if near(e, well) {
            Some(Heteroclinic)
        } else if e > 0.0 && e < well {
            Some(Sn)
        } else {
            None
        }
    } else if a >= 0.0 {
        (e > 0.0).then_some(Cn)
    } else if near(e, well) {
        Some(ConstantNontrivial)
    } else if near(e, 0.0) {
        Some(Homoclinic)
    } else if e > well && e < 0.0 {
        Some(Dn)
    } else if e > 0.0 {
        Some(Cn)
    } else {
        None
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let r = theta.rem_euclid(tau);
    if r >= tau {
        0.0
    } else {
        r
    }
}
