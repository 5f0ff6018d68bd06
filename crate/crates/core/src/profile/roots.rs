use serde::Serialize;

use super::{classify, DomainClass, ProblemParams, RealFamily};
use crate::error::{Error, Result};

/// Roots of `Π(y) = -b y³ - 2a y² + 4E y - 2J²`.
///
/// `y1 < y2` are the squared turning radii of `|u|`. Defocusing:
/// `0 < y1 < y2 < y3`. Focusing: `y3 < 0 < y1 < y2`. For the real
/// families one root is zero: `y1 = 0` for `sn`/`cn`, `y3 = 0` for `dn`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicRoots {
    pub y1: f64,
    pub y2: f64,
    pub y3: f64,
}

impl CubicRoots {
    pub fn sum(&self) -> f64 {
        self.y1 + self.y2 + self.y3
    }
}

/// Roots of `Π` ordered per case. Requires a finite-period classification
/// (interior of `D1`/`D2`/`D3`, the `E₋` boundary, or a real family).
pub fn cubic_roots(params: &ProblemParams) -> Result<CubicRoots> {
    let class = classify(params);
    if !class.has_finite_period() {
        return Err(Error::Classification {
            found: class.to_string(),
            expected: "a domain interior, E₋ boundary, or sn/cn/dn family",
        });
    }
    if params.j == 0.0 {
        return Ok(real_family_roots(params, class));
    }
    let mut ys = three_real_roots(params);
    for y in ys.iter_mut() {
        *y = polish(params, *y);
    }
    ys.sort_by(|a, b| a.total_cmp(b));
    let [r0, r1, r2] = ys;
    let mut roots =
        if params.b < 0.0 { CubicRoots { y1: r0, y2: r1, y3: r2 } } else { CubicRoots { y1: r1, y2: r2, y3: r0 } };
    if class == DomainClass::OnEminus || roots.y2 < roots.y1 {
        // Double root: use the exact critical radius.
        let q = super::q_branches(params)?.big_q;
        let rq2 = (q * q - params.a) / params.b;
        roots.y1 = rq2;
        roots.y2 = rq2;
        roots.y3 = -2.0 * params.a / params.b - 2.0 * rq2;
    }
    Ok(roots)
}

fn real_family_roots(params: &ProblemParams, class: DomainClass) -> CubicRoots {
    // Π(y) = y (-b y² - 2a y + 4E)
    let (lo, hi) = quadratic_roots(-params.b, -2.0 * params.a, 4.0 * params.e);
    match class {
        DomainClass::RealLineJ0(RealFamily::Dn) => CubicRoots { y1: lo, y2: hi, y3: 0.0 },
        DomainClass::RealLineJ0(RealFamily::Cn) => CubicRoots { y1: 0.0, y2: hi, y3: lo },
        DomainClass::RealLineJ0(RealFamily::Sn) => CubicRoots { y1: 0.0, y2: lo, y3: hi },
        _ => unreachable!("finite-period real families only"),
    }
}

/// Real roots of `c2 y² + c1 y + c0`, ascending, without cancellation.
fn quadratic_roots(c2: f64, c1: f64, c0: f64) -> (f64, f64) {
    let disc = (c1 * c1 - 4.0 * c2 * c0).max(0.0);
    let t = -0.5 * (c1 + c1.signum() * disc.sqrt());
    let (r1, r2) = if t == 0.0 { (0.0, 0.0) } else { (t / c2, c0 / t) };
    if r1 <= r2 {
        (r1, r2)
    } else {
        (r2, r1)
    }
}

/// Trigonometric solution of the monic cubic `y³ + A y² + B y + C`.
fn three_real_roots(params: &ProblemParams) -> [f64; 3] {
    let [c3, c2, c1, c0] = params.cubic_coefficients();
    let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    if p >= 0.0 {
        // Triple root (or numerically so).
        let t = -q.cbrt();
        return [t + shift; 3];
    }
    let m = 2.0 * (-p / 3.0).sqrt();
    let arg = (3.0 * q / (p * m)).clamp(-1.0, 1.0);
    let phi = arg.acos() / 3.0;
    let tau3 = std::f64::consts::TAU / 3.0;
    [m * phi.cos() + shift, m * (phi - tau3).cos() + shift, m * (phi - 2.0 * tau3).cos() + shift]
}

/// Two Newton steps, each kept only if it reduces `|Π|`.
fn polish(params: &ProblemParams, mut y: f64) -> f64 {
    for _ in 0..2 {
        let d = params.cubic_derivative(y);
        if d == 0.0 {
            break;
        }
        let cand = y - params.cubic(y) / d;
        if params.cubic(cand).abs() < params.cubic(y).abs() {
            y = cand;
        } else {
            break;
        }
    }
    y
}
