//! Period, Floquet multiplier, mass and momentum.
//!
//! After the substitution `y = S(φ) = y1 cos²φ + y2 sin²φ` all three
//! integrals live on `[0, π/2]` with bounded integrands:
//!
//! ```text
//! T = 2√2 ∫ dφ / √(b(S-y3))
//! M = √2  ∫ S dφ / √(b(S-y3))
//! θ = -2√2 J ∫ dφ / (S √(b(S-y3)))
//! P = T J / 2
//! ```

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI, SQRT_2};

use serde::Serialize;

use super::families::real_family_profile;
use super::{classify, cubic_roots, q_branches, reduce_angle, CubicRoots, DomainClass, ProblemParams};
use crate::error::{Error, Result};
use crate::quad::integrate_doubling;

/// Relative convergence target of the order-doubling quadrature.
pub const QUAD_TOL: f64 = 1e-11;

/// Floquet multiplier: the phase increment over one period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theta {
    /// `φ(x+T) - φ(x)`; negative for `J > 0`.
    pub raw: f64,
    /// `raw` reduced to `[0, 2π)`.
    pub reduced: f64,
}

impl Theta {
    pub fn new(raw: f64) -> Self {
        Self { raw, reduced: reduce_angle(raw) }
    }
}

/// Derived scalars of one `(J, E)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileData {
    pub params: ProblemParams,
    pub class: DomainClass,
    pub roots: CubicRoots,
    /// Minimum of `|u|`.
    pub r1: f64,
    /// Maximum of `|u|`.
    pub r2: f64,
    pub period: f64,
    pub theta: Theta,
    pub mass: f64,
    pub momentum: f64,
}

/// Full profile data for any finite-period classification.
pub fn profile_data(params: &ProblemParams) -> Result<ProfileData> {
    let class = classify(params);
    match class {
        DomainClass::RealLineJ0(_) if class.has_finite_period() => real_family_profile(params),
        DomainClass::OnEminus => plane_wave_profile(params, class),
        c if c.is_interior() => {
            let roots = cubic_roots(params)?;
            if roots.y2 - roots.y1 < 1e-10 * roots.y2.max(1.0) {
                plane_wave_profile(params, class)
            } else {
                quadrature_profile(params, class, roots)
            }
        }
        DomainClass::NoBoundedSolution => Err(Error::NoBoundedSolution(super::explain_unbounded(params))),
        other => Err(Error::Classification {
            found: other.to_string(),
            expected: "a domain interior, E₋ boundary, or sn/cn/dn family",
        }),
    }
}

/// Fundamental period `T(J, E)` of `|u|`.
pub fn period(params: &ProblemParams) -> Result<f64> {
    profile_data(params).map(|d| d.period)
}

/// Floquet multiplier `θ(J, E)`.
pub fn floquet_theta(params: &ProblemParams) -> Result<Theta> {
    profile_data(params).map(|d| d.theta)
}

/// Mass `M̃(J, E)` and momentum `P̃(J, E) = T J / 2` over one period.
pub fn mass_momentum(params: &ProblemParams) -> Result<(f64, f64)> {
    profile_data(params).map(|d| (d.mass, d.momentum))
}

/// Plane wave `r_Q e^{-iQx}`: the `E → E₋` limits.
fn plane_wave_profile(params: &ProblemParams, class: DomainClass) -> Result<ProfileData> {
    let ProblemParams { b, a, j, .. } = *params;
    let q = q_branches(params)?.big_q;
    let rq2 = (q * q - a) / b;
    let period = PI * SQRT_2 / (3.0 * q * q - a).sqrt();
    let mass = rq2 / 2.0 * period;
    Ok(ProfileData {
        params: *params,
        class,
        roots: CubicRoots { y1: rq2, y2: rq2, y3: -2.0 * a / b - 2.0 * rq2 },
        r1: rq2.sqrt(),
        r2: rq2.sqrt(),
        period,
        theta: Theta::new(-q * period),
        mass,
        momentum: period * j / 2.0,
    })
}

fn quadrature_profile(params: &ProblemParams, class: DomainClass, roots: CubicRoots) -> Result<ProfileData> {
    let [t_int, m_int, th_int] = substituted_integrals(params.b, &roots)?;
    let period = 2.0 * SQRT_2 * t_int;
    Ok(ProfileData {
        params: *params,
        class,
        roots,
        r1: roots.y1.sqrt(),
        r2: roots.y2.sqrt(),
        period,
        theta: Theta::new(-2.0 * SQRT_2 * params.j * th_int),
        mass: SQRT_2 * m_int,
        momentum: period * params.j / 2.0,
    })
}

/// `[∫ w, ∫ S w, ∫ w/S]` over `[0, π/2]` with `w = 1/√(b(S-y3))`.
pub(crate) fn substituted_integrals(b: f64, roots: &CubicRoots) -> Result<[f64; 3]> {
    let CubicRoots { y1, y2, y3 } = *roots;
    let gap = y2 - y1;
    // Widths of the near-singular layers: 1/S peaks at φ=0 when y1 ≪ y2,
    // and w peaks at φ=π/2 when y3 approaches y2 (near E₊).
    let left = if y1 > 0.0 { (y1 / gap).sqrt() } else { f64::INFINITY };
    let right = if y3 > y2 { ((y3 - y2) / gap).sqrt() } else { f64::INFINITY };
    let cuts = breakpoints(left, right);
    let mut acc = [0.0; 3];
    for w in cuts.windows(2) {
        let part = integrate_doubling(w[0], w[1], QUAD_TOL, |phi| {
            let (s, c) = phi.sin_cos();
            let sv = y1 * c * c + y2 * s * s;
            let inv = 1.0 / (b * (sv - y3)).sqrt();
            [inv, sv * inv, if y1 > 0.0 { inv / sv } else { 0.0 }]
        })?;
        for (a, p) in acc.iter_mut().zip(part) {
            *a += p;
        }
    }
    Ok(acc)
}

/// Panel boundaries on `[0, π/2]`, graded geometrically toward an endpoint
/// whose layer width is below 0.2.
fn breakpoints(left: f64, right: f64) -> Vec<f64> {
    let mut cuts = vec![0.0, FRAC_PI_2];
    let mut graded = false;
    if left < 0.2 {
        graded = true;
        let mut x = left.max(1e-12);
        while x < FRAC_PI_4 {
            cuts.push(x);
            x *= 2.0;
        }
    }
    if right < 0.2 {
        graded = true;
        let mut x = right.max(1e-12);
        while x < FRAC_PI_4 {
            cuts.push(FRAC_PI_2 - x);
            x *= 2.0;
        }
    }
    if graded {
        cuts.push(FRAC_PI_4);
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    cuts
}
