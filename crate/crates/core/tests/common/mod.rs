#![allow(dead_code)]

use num_complex::Complex64;
use qpwave::linalg::CyclicTridiagonal;
use qpwave::profile::ProblemParams;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Gaussian elimination with partial pivoting on a dense copy.
#[allow(clippy::needless_range_loop)]
pub fn dense_solve(m: &CyclicTridiagonal, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = rhs.len();
    let mut a = m.to_dense();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm())).unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            if f == Complex64::default() {
                continue;
            }
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            let v = b[col];
            b[row] -= f * v;
        }
    }
    let mut x = vec![Complex64::default(); n];
    for row in (0..n).rev() {
        let s: Complex64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

pub fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn random_state(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect()
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(a: f64, b: f64, n: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `(T, M, θ)` from the integrals in the modulus `r` between the turning
/// points, with `r = r₁ + (r₂ - r₁)(1 - cos t)/2` absorbing the endpoint
/// square roots. Turning points come from bisection on `E - V_J(r)`,
/// bracketed by the critical radii of `V_J`.
pub fn radial_integrals(p: &ProblemParams, panels: usize) -> (f64, f64, f64) {
    let ProblemParams { b, a, j, e } = *p;
    let v = |r: f64| j * j / (2.0 * r * r) + a * r * r / 2.0 + b * r.powi(4) / 4.0;
    let g = |r: f64| e - v(r);
    // Critical radii of V_J from sign changes of V' on a geometric scan.
    let dv = |r: f64| -j * j / r.powi(3) + a * r + b * r.powi(3);
    let scan: Vec<f64> = (0..=4000).map(|i| 1e-4 * 1e8f64.powf(i as f64 / 4000.0)).collect();
    let crit: Vec<f64> =
        scan.windows(2).filter(|w| (dv(w[0]) > 0.0) != (dv(w[1]) > 0.0)).map(|w| bisect(w[0], w[1], dv)).collect();
    let r_min = crit[0];
    let r1 = bisect(1e-12 * r_min, r_min, g);
    let r2 = if crit.len() > 1 {
        bisect(r_min, crit[1], g)
    } else {
        let mut hi = 2.0 * r_min;
        while g(hi) > 0.0 {
            hi *= 2.0;
        }
        bisect(r_min, hi, g)
    };
    let half = 0.5 * (r2 - r1);
    // g'(r) = J²/r³ - a r - b r³ sets the finite endpoint limits.
    let dg = |r: f64| j * j / r.powi(3) - a * r - b * r.powi(3);
    let integrand = |t: f64, w: &dyn Fn(f64) -> f64| {
        if t == 0.0 {
            return w(r1) * (half / dg(r1)).sqrt();
        }
        if t == std::f64::consts::PI {
            return w(r2) * (half / -dg(r2)).sqrt();
        }
        let r = r1 + half * (1.0 - t.cos());
        w(r) * half * t.sin() / (2.0 * g(r).max(0.0)).sqrt()
    };
    let pi = std::f64::consts::PI;
    let t = 2.0 * simpson(0.0, pi, panels, |t| integrand(t, &|_| 1.0));
    let m = simpson(0.0, pi, panels, |t| integrand(t, &|r| r * r));
    let th = -2.0 * j * simpson(0.0, pi, panels, |t| integrand(t, &|r| 1.0 / (r * r)));
    (t, m, th)
}
