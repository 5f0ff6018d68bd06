//! Real-valued (`J = 0`) profiles: rescaled `sn`, `cn`, `dn`.
//!
//! A real family solution is `u(x) = sn/cn/dn(x/β, k) / α`. The modulus and
//! the scalings follow from the roots of `Π(y) = y(-b y² - 2a y + 4E)`:
//!
//! | family | roots             | k²             | β            |
//! |--------|-------------------|----------------|--------------|
//! | dn     | 0 = y3 < y1 < y2  | 1 - y1/y2      | α √(2/b)     |
//! | cn     | y3 < 0 = y1 < y2  | y2/(y2 - y3)   | k α √(2/b)   |
//! | sn     | 0 = y1 < y2 < y3  | y2/y3          | k α √(-2/b)  |
//!
//! with `1/α = √y2` in every case. The period of `|u|` is `2Kβ`.

use std::f64::consts::PI;

use serde::Serialize;

use super::integrals::{ProfileData, Theta};
use super::{classify, cubic_roots, DomainClass, ProblemParams, RealFamily};
use crate::elliptic::{complete_e, complete_k, EllipticModulus};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum Family {
    Sn,
    Cn,
    Dn,
}

impl Family {
    /// Coefficients `(b, a, E)` for which the unscaled function solves the ODE.
    pub fn coefficients(self, k: EllipticModulus) -> (f64, f64, f64) {
        let k2 = k.get() * k.get();
        match self {
            Family::Dn => (2.0, -(2.0 - k2), (k2 - 1.0) / 2.0),
            Family::Cn => (2.0 * k2, 1.0 - 2.0 * k2, (1.0 - k2) / 2.0),
            Family::Sn => (-2.0 * k2, 1.0 + k2, 0.5),
        }
    }

    /// Floquet multiplier over the modulus period `2Kβ`.
    pub fn theta(self) -> f64 {
        match self {
            Family::Dn => 0.0,
            Family::Cn | Family::Sn => PI,
        }
    }
}

/// Rescaling `u(x) = f(x/β, k)/α` of a real family solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FamilyShape {
    pub family: Family,
    pub k: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl FamilyShape {
    /// Evaluates `u(x)`.
    pub fn eval(&self, x: f64) -> f64 {
        let k = EllipticModulus::new(self.k).expect("shape carries a valid modulus");
        let t = crate::elliptic::jacobi_scd(x / self.beta, k).expect("finite x");
        let f = match self.family {
            Family::Sn => t.sn,
            Family::Cn => t.cn,
            Family::Dn => t.dn,
        };
        f / self.alpha
    }

    /// Offset so that `eval(x + offset)` starts at the minimum of `|u|`.
    pub fn min_modulus_offset(&self) -> f64 {
        let kk = complete_k(EllipticModulus::new(self.k).expect("valid modulus"));
        match self.family {
            Family::Sn => 0.0,
            Family::Cn | Family::Dn => kk * self.beta,
        }
    }
}

/// Identifies the family and rescaling for a `J = 0` parameter set.
pub fn real_family_shape(params: &ProblemParams) -> Result<FamilyShape> {
    let class = classify(params);
    let family = match class {
        DomainClass::RealLineJ0(RealFamily::Sn) => Family::Sn,
        DomainClass::RealLineJ0(RealFamily::Cn) => Family::Cn,
        DomainClass::RealLineJ0(RealFamily::Dn) => Family::Dn,
        other => return Err(Error::Classification { found: other.to_string(), expected: "a real sn/cn/dn family" }),
    };
    let r = cubic_roots(params)?;
    let alpha = 1.0 / r.y2.sqrt();
    let b = params.b;
    let (k2, beta_over_alpha_k) = match family {
        Family::Dn => ((r.y2 - r.y1) / r.y2, (2.0 / b).sqrt()),
        Family::Cn => (r.y2 / (r.y2 - r.y3), (2.0 / b).sqrt()),
        Family::Sn => (r.y2 / r.y3, (-2.0 / b).sqrt()),
    };
    let k = k2.sqrt();
    EllipticModulus::new(k)?;
    let beta = match family {
        Family::Dn => alpha * beta_over_alpha_k,
        Family::Cn | Family::Sn => k * alpha * beta_over_alpha_k,
    };
    Ok(FamilyShape { family, k, alpha, beta })
}

/// Profile data of a `J = 0` family from the complete integrals.
pub(crate) fn real_family_profile(params: &ProblemParams) -> Result<ProfileData> {
    let shape = real_family_shape(params)?;
    let roots = cubic_roots(params)?;
    let k = EllipticModulus::new(shape.k)?;
    let kk = complete_k(k);
    let ee = complete_e(shape.k)?;
    let k2 = shape.k * shape.k;
    let scale = shape.beta / (shape.alpha * shape.alpha);
    let mass = scale
        * match shape.family {
            Family::Dn => ee,
            Family::Cn => (ee - (1.0 - k2) * kk) / k2,
            Family::Sn => (kk - ee) / k2,
        };
    Ok(ProfileData {
        params: *params,
        class: classify(params),
        roots,
        r1: roots.y1.sqrt(),
        r2: roots.y2.sqrt(),
        period: 2.0 * kk * shape.beta,
        theta: Theta::new(shape.family.theta()),
        mass,
        momentum: 0.0,
    })
}

/// The reference parameters for which `sn`, `cn` or `dn(·, k)` itself solves
/// the ODE, together with its profile data.
pub fn elliptic_family_params(family: Family, k: EllipticModulus) -> Result<(ProblemParams, ProfileData)> {
    let (b, a, e) = family.coefficients(k);
    let params = ProblemParams::new(b, a, 0.0, e)?;
    let data = real_family_profile(&params)?;
    Ok((params, data))
}
