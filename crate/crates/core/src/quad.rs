//! Gauss–Legendre quadrature with order doubling.

use std::sync::OnceLock;

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 16;
pub const MAX_ORDER: usize = 4096;
const LEVELS: usize = 9; // 16, 32, ..., 4096

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    /// Computes the `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum: f64 = self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(mid + half * x)).sum();
        half * sum
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

fn rule_at_level(level: usize) -> &'static Rule {
    static RULES: [OnceLock<Rule>; LEVELS] = [const { OnceLock::new() }; LEVELS];
    RULES[level].get_or_init(|| Rule::new(MIN_ORDER << level))
}

/// Integrates a vector-valued integrand over `[a, b]`, doubling the order
/// from 16 until every component changes by at most `rel_tol` (relative to
/// its magnitude, with an absolute floor of `rel_tol`).
pub fn integrate_doubling<const N: usize, F>(a: f64, b: f64, rel_tol: f64, f: F) -> Result<[f64; N]>
where
    F: Fn(f64) -> [f64; N],
{
    let mut prev = integrate_level(0, a, b, &f);
    let mut change = f64::INFINITY;
    for level in 1..LEVELS {
        let next = integrate_level(level, a, b, &f);
        change = prev.iter().zip(&next).map(|(p, n)| (n - p).abs() / n.abs().max(1e-300)).fold(0.0, f64::max);
        let converged = prev.iter().zip(&next).all(|(p, n)| (n - p).abs() <= rel_tol * n.abs().max(1.0e-3));
        if converged {
            return Ok(next);
        }
        prev = next;
    }
    Err(Error::Quadrature { order: MAX_ORDER, change })
}

fn integrate_level<const N: usize, F>(level: usize, a: f64, b: f64, f: &F) -> [f64; N]
where
    F: Fn(f64) -> [f64; N],
{
    let rule = rule_at_level(level);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut acc = [0.0; N];
    for (&x, &w) in rule.nodes.iter().zip(&rule.weights) {
        let v = f(mid + half * x);
        for (s, vi) in acc.iter_mut().zip(v) {
            *s += w * vi;
        }
    }
    acc.map(|s| s * half)
}
