//! Cyclic tridiagonal systems with complex corner entries.
//!
//! Row `l` reads `sub[l] x[l-1] + diag[l] x[l] + sup[l] x[l+1]` with the
//! indices taken cyclically, so `sub[0]` is the top-right corner and
//! `sup[L-1]` the bottom-left corner. The twisted-periodic operators put
//! `e^{∓iθ}` into those corners.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pivots smaller than this (relative to the row scale) count as singular.
const PIVOT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct CyclicTridiagonal {
    pub sub: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub sup: Vec<Complex64>,
}

impl CyclicTridiagonal {
    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Twisted three-point Laplacian `(x[l-1] - 2x[l] + x[l+1]) / dx²`.
    pub fn laplacian(n: usize, dx: f64, theta: f64) -> Self {
        let c = 1.0 / (dx * dx);
        let mut sub = vec![Complex64::from(c); n];
        let mut sup = sub.clone();
        sub[0] = Complex64::from_polar(c, -theta);
        sup[n - 1] = Complex64::from_polar(c, theta);
        Self { sub, diag: vec![Complex64::from(-2.0 * c); n], sup }
    }

    /// Twisted centered difference `(x[l+1] - x[l-1]) / (2 dx)`.
    pub fn centered_difference(n: usize, dx: f64, theta: f64) -> Self {
        let c = 0.5 / dx;
        let mut sub = vec![Complex64::from(-c); n];
        let mut sup = vec![Complex64::from(c); n];
        sub[0] = Complex64::from_polar(-c, -theta);
        sup[n - 1] = Complex64::from_polar(c, theta);
        Self { sub, diag: vec![Complex64::default(); n], sup }
    }

    /// `alpha·I + beta·self`.
    pub fn affine(&self, alpha: Complex64, beta: Complex64) -> Self {
        Self {
            sub: self.sub.iter().map(|&v| beta * v).collect(),
            diag: self.diag.iter().map(|&v| alpha + beta * v).collect(),
            sup: self.sup.iter().map(|&v| beta * v).collect(),
        }
    }

    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        let n = self.len();
        (0..n)
            .map(|l| {
                let prev = x[(l + n - 1) % n];
                let next = x[(l + 1) % n];
                self.sub[l] * prev + self.diag[l] * x[l] + self.sup[l] * next
            })
            .collect()
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> Vec<Vec<Complex64>> {
        let n = self.len();
        let mut a = vec![vec![Complex64::default(); n]; n];
        for l in 0..n {
            a[l][(l + n - 1) % n] += self.sub[l];
            a[l][l] += self.diag[l];
            a[l][(l + 1) % n] += self.sup[l];
        }
        a
    }

    /// Solves the cyclic system: Thomas elimination on the tridiagonal part
    /// plus a Sherman–Morrison correction carrying both corner entries,
    /// followed by one step of iterative refinement. Thomas does not pivot,
    /// so the refinement step matters when the system is far from diagonally
    /// dominant.
    pub fn solve(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.len();
        if rhs.len() != n || n < 3 {
            return Err(Error::Solver(format!("system of size {n} with rhs of length {}", rhs.len())));
        }
        let mut x = self.solve_direct(rhs)?;
        let residual: Vec<_> = self.apply(&x).iter().zip(rhs).map(|(ax, b)| b - ax).collect();
        for (xi, ci) in x.iter_mut().zip(self.solve_direct(&residual)?) {
            *xi += ci;
        }
        Ok(x)
    }

    fn solve_direct(&self, rhs: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.len();
        let top_right = self.sub[0];
        let bottom_left = self.sup[n - 1];
        let gamma = if self.diag[0] == Complex64::default() { Complex64::from(1.0) } else { -self.diag[0] };

        let mut diag = self.diag.clone();
        diag[0] -= gamma;
        diag[n - 1] -= bottom_left * top_right / gamma;

        let x = thomas(&self.sub, &diag, &self.sup, rhs)?;
        let mut u = vec![Complex64::default(); n];
        u[0] = gamma;
        u[n - 1] = bottom_left;
        let z = thomas(&self.sub, &diag, &self.sup, &u)?;

        let denom = Complex64::from(1.0) + z[0] + top_right * z[n - 1] / gamma;
        if denom.norm() < PIVOT_TOL {
            return Err(Error::Solver("singular corner correction".into()));
        }
        let fact = (x[0] + top_right * x[n - 1] / gamma) / denom;
        Ok(x.iter().zip(&z).map(|(&xi, &zi)| xi - fact * zi).collect())
    }
}

/// Thomas algorithm for the non-cyclic part (`sub[0]`, `sup[n-1]` ignored).
fn thomas(sub: &[Complex64], diag: &[Complex64], sup: &[Complex64], rhs: &[Complex64]) -> Result<Vec<Complex64>> {
    let n = diag.len();
    let mut c = vec![Complex64::default(); n];
    let mut d = vec![Complex64::default(); n];
    let mut pivot = diag[0];
    check_pivot(pivot, sup[0].norm() + diag[0].norm(), 0)?;
    c[0] = sup[0] / pivot;
    d[0] = rhs[0] / pivot;
    for i in 1..n {
        pivot = diag[i] - sub[i] * c[i - 1];
        check_pivot(pivot, sub[i].norm() + diag[i].norm() + sup[i].norm(), i)?;
        c[i] = sup[i] / pivot;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / pivot;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        let next = x[i + 1];
        x[i] -= c[i] * next;
    }
    Ok(x)
}

fn check_pivot(pivot: Complex64, scale: f64, row: usize) -> Result<()> {
    if pivot.norm() <= PIVOT_TOL * scale || !pivot.is_finite() {
        Err(Error::Solver(format!("vanishing pivot {pivot} at row {row}")))
    } else {
        Ok(())
    }
}
