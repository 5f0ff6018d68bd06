//! Jacobi elliptic functions and complete elliptic integrals.
//!
//! Complete integrals use the arithmetic-geometric mean; `sn`, `cn`, `dn`
//! use the descending Landen (AGM) scheme for the amplitude. The modulus
//! convention is `k` (not the parameter `m = k²`).

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};

/// Landen recursion stops once `c_n` drops below this.
const LANDEN_TOL: f64 = 1e-14;
const MAX_LANDEN: usize = 32;

/// Elliptic modulus `k`, strictly inside `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct EllipticModulus(f64);

impl EllipticModulus {
    pub fn new(k: f64) -> Result<Self> {
        if k.is_finite() && k > 0.0 && k < 1.0 {
            Ok(Self(k))
        } else {
            Err(Error::Domain(format!("elliptic modulus k={k} outside (0,1)")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    /// Complementary modulus `k' = sqrt(1 - k²)`.
    pub fn complementary(self) -> f64 {
        ((1.0 - self.0) * (1.0 + self.0)).sqrt()
    }
}

/// Values of the three basic Jacobi functions at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiTriple {
    pub sn: f64,
    pub cn: f64,
    pub dn: f64,
}

/// Complete elliptic integral of the first kind, `K(k) = F(π/2, k)`.
pub fn complete_k(k: EllipticModulus) -> f64 {
    FRAC_PI_2 / agm(1.0, k.complementary())
}

/// Complete elliptic integral of the second kind. Accepts the closed range
/// `[0, 1]`; the endpoints return the exact limits `π/2` and `1`.
pub fn complete_e(k: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::Domain(format!("complete_e: k={k} outside [0,1]")));
    }
    if k == 0.0 {
        return Ok(FRAC_PI_2);
    }
    if k == 1.0 {
        return Ok(1.0);
    }
    // E/K = 1 - sum_n 2^(n-1) c_n^2 with c_0 = k.
    let mut a = 1.0;
    let mut b = ((1.0 - k) * (1.0 + k)).sqrt();
    let mut c = k;
    let mut weight = 0.5;
    let mut sum = weight * c * c;
    for _ in 0..MAX_LANDEN {
        if c.abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        c = 0.5 * (a - b);
        b = (a * b).sqrt();
        a = an;
        weight *= 2.0;
        sum += weight * c * c;
    }
    Ok(FRAC_PI_2 / a * (1.0 - sum))
}

fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..MAX_LANDEN {
        if (a - b).abs() <= f64::EPSILON * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    0.5 * (a + b)
}

/// Jacobi amplitude `am(x, k)`, the inverse of `F(·, k)`.
pub fn amplitude(x: f64, k: EllipticModulus) -> f64 {
    let mut a = [0.0; MAX_LANDEN + 1];
    let mut c = [0.0; MAX_LANDEN + 1];
    a[0] = 1.0;
    let mut b = k.complementary();
    c[0] = k.get();
    let mut n = 0;
    while c[n].abs() >= LANDEN_TOL && n < MAX_LANDEN {
        a[n + 1] = 0.5 * (a[n] + b);
        c[n + 1] = 0.5 * (a[n] - b);
        b = (a[n] * b).sqrt();
        n += 1;
    }
    let mut phi = (1u64 << n) as f64 * a[n] * x;
    for j in (1..=n).rev() {
        phi = 0.5 * (phi + (c[j] / a[j] * phi.sin()).asin());
    }
    phi
}

/// `sn`, `cn`, `dn` at `x`.
pub fn jacobi_scd(x: f64, k: EllipticModulus) -> Result<JacobiTriple> {
    if !x.is_finite() {
        return Err(Error::Domain(format!("jacobi_scd: non-finite x={x}")));
    }
    let phi = amplitude(x, k);
    let (sn, cn) = phi.sin_cos();
    let kk = k.get();
    let dn = (1.0 - kk * kk * sn * sn).sqrt();
    Ok(JacobiTriple { sn, cn, dn })
}

/// Incomplete integral of the first kind `F(φ, k)` for any real `φ`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn incomplete_f(phi: f64, k: f64) -> f64 {
    let (reduced, periods) = reduce_amplitude(phi);
    let (s, c) = reduced.sin_cos();
    let base = s * carlson_rf(c * c, 1.0 - k * k * s * s, 1.0);
    if periods == 0.0 {
        base
    } else {
        let kc = carlson_rf(0.0, 1.0 - k * k, 1.0);
        base + 2.0 * periods * kc
    }
}

/// Incomplete integral of the second kind `E(φ, k)` for any real `φ`.
#[cfg_attr(not(test), allow(dead_code))]
pub(crate) fn incomplete_e(phi: f64, k: f64) -> f64 {
    let (reduced, periods) = reduce_amplitude(phi);
    let e_of = |phi: f64| {
        let (s, c) = phi.sin_cos();
        let q = 1.0 - k * k * s * s;
        let k2s3 = k * k * s * s * s;
        s * carlson_rf(c * c, q, 1.0) - k2s3 / 3.0 * carlson_rd(c * c, q, 1.0)
    };
    let base = e_of(reduced);
    if periods == 0.0 {
        base
    } else {
        base + 2.0 * periods * e_of(FRAC_PI_2)
    }
}

/// Writes `phi = reduced + periods·π` with `reduced ∈ [-π/2, π/2]`.
#[cfg_attr(not(test), allow(dead_code))]
fn reduce_amplitude(phi: f64) -> (f64, f64) {
    let periods = (phi / std::f64::consts::PI).round();
    (phi - periods * std::f64::consts::PI, periods)
}

#[cfg_attr(not(test), allow(dead_code))]
fn carlson_rf(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    for _ in 0..64 {
        let mu = (x + y + z) / 3.0;
        let dx = (mu - x) / mu;
        let dy = (mu - y) / mu;
        let dz = (mu - z) / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let e2 = dx * dy - dz * dz;
            let e3 = dx * dy * dz;
            return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) / mu.sqrt();
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    1.0 / ((x + y + z) / 3.0).sqrt()
}

#[cfg_attr(not(test), allow(dead_code))]
fn carlson_rd(mut x: f64, mut y: f64, mut z: f64) -> f64 {
    let mut sum = 0.0;
    let mut factor = 1.0;
    for _ in 0..64 {
        let mu = (x + y + 3.0 * z) / 5.0;
        let dx = (mu - x) / mu;
        let dy = (mu - y) / mu;
        let dz = (mu - z) / mu;
        if dx.abs().max(dy.abs()).max(dz.abs()) < 1e-4 {
            let ea = dx * dy;
            let eb = dz * dz;
            let ec = ea - eb;
            let ed = ea - 6.0 * eb;
            let ee = ed + ec + ec;
            let s = ed * (-3.0 / 14.0 + 9.0 / 88.0 * ed - 9.0 / 52.0 * dz * ee)
                + dz * (ee / 6.0 + dz * (-9.0 / 22.0 * ec + dz * 3.0 / 26.0 * ea));
            return 3.0 * sum + factor * (1.0 + s) / (mu * mu.sqrt());
        }
        let (sx, sy, sz) = (x.sqrt(), y.sqrt(), z.sqrt());
        let lambda = sx * sy + sy * sz + sz * sx;
        sum += factor / (sz * (z + lambda));
        factor *= 0.25;
        x = 0.25 * (x + lambda);
        y = 0.25 * (y + lambda);
        z = 0.25 * (z + lambda);
    }
    3.0 * sum + factor / (z * z.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn modulus(k: f64) -> EllipticModulus {
        EllipticModulus::new(k).unwrap()
    }

    #[test]
    fn rejects_bad_modulus() {
        assert!(EllipticModulus::new(0.0).is_err());
        assert!(EllipticModulus::new(1.0).is_err());
        assert!(EllipticModulus::new(f64::NAN).is_err());
        assert!(complete_e(1.5).is_err());
        assert!(complete_e(-0.1).is_err());
    }

    #[test]
    fn complete_integral_limits() {
        assert_relative_eq!(complete_k(modulus(1e-9)), FRAC_PI_2, max_relative = 1e-15);
        assert_eq!(complete_e(0.0).unwrap(), FRAC_PI_2);
        assert_eq!(complete_e(1.0).unwrap(), 1.0);
        let mut prev = 0.0;
        for i in 1..60 {
            let k = 1.0 - 10f64.powf(-(i as f64) / 5.0);
            let kk = complete_k(modulus(k));
            assert!(kk > prev);
            prev = kk;
        }
        assert!(prev > 14.0);
    }

    #[test]
    fn complete_values_at_point_nine() {
        // mpmath, 30 digits
        assert_relative_eq!(complete_k(modulus(0.9)), 2.280_549_138_422_770_2, max_relative = 1e-14);
        assert_relative_eq!(complete_e(0.9).unwrap(), 1.171_697_052_781_614_1, max_relative = 1e-14);
    }

    #[test]
    fn e_is_decreasing() {
        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let e = complete_e(i as f64 / 100.0).unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn special_points() {
        let k = modulus(0.7);
        let t = jacobi_scd(0.0, k).unwrap();
        assert_eq!((t.sn, t.cn, t.dn), (0.0, 1.0, 1.0));
        let kk = complete_k(k);
        let t = jacobi_scd(kk, k).unwrap();
        assert_relative_eq!(t.sn, 1.0, epsilon = 1e-14);
        assert!(t.cn.abs() < 1e-14);
        assert_relative_eq!(t.dn, k.complementary(), epsilon = 1e-14);
    }

    #[test]
    fn incomplete_integrals_invert_amplitude() {
        for &k in &[0.1, 0.5, 0.9, 0.99] {
            let m = modulus(k);
            assert_relative_eq!(incomplete_f(FRAC_PI_2, k), complete_k(m), max_relative = 1e-13);
            assert_relative_eq!(incomplete_e(FRAC_PI_2, k), complete_e(k).unwrap(), max_relative = 1e-13);
            for i in -20..=20 {
                let x = 0.37 * i as f64;
                assert_relative_eq!(incomplete_f(amplitude(x, m), k), x, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn periodicity() {
        for &k in &[0.3, 0.9] {
            let m = modulus(k);
            let kk = complete_k(m);
            for i in 0..25 {
                let x = -3.0 + 0.31 * i as f64;
                let a = jacobi_scd(x, m).unwrap();
                let b = jacobi_scd(x + 4.0 * kk, m).unwrap();
                let c = jacobi_scd(x + 2.0 * kk, m).unwrap();
                assert!((a.sn - b.sn).abs() < 1e-10);
                assert!((a.cn - b.cn).abs() < 1e-10);
                assert!((a.dn - c.dn).abs() < 1e-10);
                assert!((a.sn + c.sn).abs() < 1e-10);
            }
        }
    }
}
