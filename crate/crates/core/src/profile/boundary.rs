use std::f64::consts::{PI, SQRT_2};

use serde::Serialize;

use super::e_of_branch;
use crate::error::{Error, Result};

/// Image of the `E = E₋(J)` boundary under `(J, E) ↦ (M̃, P̃)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryPoint {
    pub q: f64,
    pub j: f64,
    pub e: f64,
    pub mass: f64,
    pub momentum: f64,
}

/// Open interval of the `Q` parametrization for the `(b, a)` case.
pub fn q_interval(b: f64, a: f64) -> Result<(f64, f64)> {
    if b < 0.0 {
        if a <= 0.0 {
            return Err(Error::NoBoundedSolution(format!("b={b} < 0 with a={a} <= 0")));
        }
        Ok(((a / 3.0).sqrt(), a.sqrt()))
    } else if b > 0.0 {
        Ok((if a >= 0.0 { a.sqrt() } else { 0.0 }, f64::INFINITY))
    } else {
        Err(Error::Domain("b must be nonzero".into()))
    }
}

/// `M∂(Q) = (Q²-a)/(2b) · π√2/√(3Q²-a)` and `P∂ = Q M∂`.
pub fn boundary_point(b: f64, a: f64, q: f64) -> Result<BoundaryPoint> {
    let (lo, hi) = q_interval(b, a)?;
    let denom = 3.0 * q * q - a;
    if !(q >= lo && q <= hi) || denom <= 0.0 {
        return Err(Error::Domain(format!("Q={q} outside the admissible range [{lo}, {hi}]")));
    }
    // Adding zero turns the -0.0 at Q² = a into +0.0.
    let mass = (q * q - a) / (2.0 * b) * PI * SQRT_2 / denom.sqrt() + 0.0;
    Ok(BoundaryPoint { q, j: q * (q * q - a) / b + 0.0, e: e_of_branch(b, a, q) + 0.0, mass, momentum: q * mass + 0.0 })
}

/// `n` evenly spaced samples of the boundary curve over `[q_lo, q_hi]`.
pub fn boundary_curve(b: f64, a: f64, q_lo: f64, q_hi: f64, n: usize) -> Result<Vec<BoundaryPoint>> {
    if n < 2 || !(q_lo < q_hi) {
        return Err(Error::Domain(format!("need n >= 2 and q_lo < q_hi, got n={n}, [{q_lo}, {q_hi}]")));
    }
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            boundary_point(b, a, q_lo + (q_hi - q_lo) * t)
        })
        .collect()
}
