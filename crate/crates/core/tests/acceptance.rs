//! One PASS/FAIL line per acceptance criterion; exits non-zero if any fails.

mod common;

use std::f64::consts::{PI, SQRT_2};
use std::process::ExitCode;

use num_complex::Complex64;
use qpwave::atlas::{sweep, SweepSpec};
use qpwave::elliptic::{jacobi_scd, EllipticModulus};
use qpwave::gradflow::{discrete_functionals, energy_gradient, Grid};
use qpwave::linalg::CyclicTridiagonal;
use qpwave::ode::integrate_profile_report;
use qpwave::profile::{e_minus, e_plus, elliptic_family_params, profile_data, q_branches, Family, ProblemParams};
use qpwave::report::{compare, CompareConfig, Comparison};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

struct Ledger {
    failed: usize,
}

impl Ledger {
    fn check(&mut self, name: &str, ok: bool, detail: String) {
        println!("{} {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            self.failed += 1;
        }
    }
}

struct Case {
    label: String,
    params: ProblemParams,
    tol: f64,
}

fn energy_between(b: f64, a: f64, j: f64, s: f64) -> f64 {
    let p = ProblemParams::new(b, a, j, 0.0).unwrap();
    let (lo, hi) = (e_minus(&p).unwrap(), e_plus(&p).unwrap());
    lo + s * (hi - lo)
}

fn experiment_cases() -> Vec<(usize, Case)> {
    let k = EllipticModulus::new(0.9).unwrap();
    let fam = |f| elliptic_family_params(f, k).unwrap().0;
    let pp = |b, a, j, e| ProblemParams::new(b, a, j, e).unwrap();
    let em = |b, a, j| e_minus(&pp(b, a, j, 0.0)).unwrap();
    let case = |label: &str, params, tol| Case { label: label.into(), params, tol };
    vec![
        (1, case("dn k=0.9", fam(Family::Dn), 5e-3)),
        (2, case("cn k=0.9", fam(Family::Cn), 1e-3)),
        (3, case("sn k=0.9", fam(Family::Sn), 2e-2)),
        (4, case("b=-1 a=1 J=0.2 E=E-", pp(-1.0, 1.0, 0.2, em(-1.0, 1.0, 0.2)), 1e-6)),
        (4, case("b=-1 a=1 J=0.2 E=mid", pp(-1.0, 1.0, 0.2, energy_between(-1.0, 1.0, 0.2, 0.5)), 2e-2)),
        (4, case("b=-1 a=1 J=0.2 E=E+-0.02(E+-E-)", pp(-1.0, 1.0, 0.2, energy_between(-1.0, 1.0, 0.2, 0.98)), 5e-2)),
        (5, case("b=1 a=1 J=1 E=E-", pp(1.0, 1.0, 1.0, em(1.0, 1.0, 1.0)), 1e-6)),
        (5, case("b=1 a=1 J=1 E=5", pp(1.0, 1.0, 1.0, 5.0), 2e-2)),
        (6, case("b=1 a=-1 J=4 E=E-", pp(1.0, -1.0, 4.0, em(1.0, -1.0, 4.0)), 1e-6)),
        (6, case("b=1 a=-1 J=4 E=7", pp(1.0, -1.0, 4.0, 7.0), 5e-3)),
    ]
}

fn experiments(ledger: &mut Ledger, runs: &[(usize, Case, qpwave::Result<Comparison>)]) {
    for (n, case, run) in runs {
        let name = format!("{n} {} (E={:.16})", case.label, case.params.e);
        match run {
            Ok(c) => {
                let m = c.report.metrics.unwrap();
                let d = m.max_modulus_difference;
                let steps = c.diagnostics.len();
                ledger.check(
                    &name,
                    d <= case.tol,
                    format!("max |u| difference {d:.3e} <= {:.0e}, {steps} steps", case.tol),
                );
            }
            Err(e) => ledger.check(&name, false, format!("run failed: {e}")),
        }
    }
}

fn elliptic_identities(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let (mut pyth, mut deriv, mut ode) = (0.0f64, 0.0f64, 0.0f64);
    let h = 1e-5;
    for _ in 0..1000 {
        let x = rng.gen_range(-50.0..50.0);
        let kv = rng.gen_range(0.001..0.999);
        let k = EllipticModulus::new(kv).unwrap();
        let t = jacobi_scd(x, k).unwrap();
        pyth = pyth.max((t.sn * t.sn + t.cn * t.cn - 1.0).abs());
        pyth = pyth.max((kv * kv * t.sn * t.sn + t.dn * t.dn - 1.0).abs());
        let p = jacobi_scd(x + h, k).unwrap();
        let m = jacobi_scd(x - h, k).unwrap();
        deriv = deriv
            .max(((p.sn - m.sn) / (2.0 * h) - t.cn * t.dn).abs())
            .max(((p.cn - m.cn) / (2.0 * h) + t.sn * t.dn).abs())
            .max(((p.dn - m.dn) / (2.0 * h) + kv * kv * t.sn * t.cn).abs());
        // Fourth-order second difference with step 1e-3.
        let s = 1e-3;
        let at = |dx: f64| jacobi_scd(x + dx, k).unwrap();
        let (p2, p1, m1, m2) = (at(2.0 * s), at(s), at(-s), at(-2.0 * s));
        let d2 = |f: fn(&qpwave::elliptic::JacobiTriple) -> f64, c: f64| {
            (-f(&p2) + 16.0 * f(&p1) - 30.0 * c + 16.0 * f(&m1) - f(&m2)) / (12.0 * s * s)
        };
        for (fam, f, c) in [
            (Family::Sn, (|t: &qpwave::elliptic::JacobiTriple| t.sn) as fn(&_) -> f64, t.sn),
            (Family::Cn, |t: &qpwave::elliptic::JacobiTriple| t.cn, t.cn),
            (Family::Dn, |t: &qpwave::elliptic::JacobiTriple| t.dn, t.dn),
        ] {
            let (b, a, _) = fam.coefficients(k);
            ode = ode.max((d2(f, c) + a * c + b * c * c * c).abs());
        }
    }
    ledger.check(
        "7 Pythagorean identities",
        pyth <= 1e-12,
        format!("max residual {pyth:.2e} <= 1e-12 over 1000 draws"),
    );
    ledger.check("7 derivative identities", deriv <= 1e-7, format!("max error {deriv:.2e} <= 1e-7 at h=1e-5"));
    ledger.check("7 family ODE residuals", ode <= 1e-7, format!("max residual {ode:.2e} <= 1e-7"));
}

fn grid_points(b: f64, a: f64) -> Vec<ProblemParams> {
    let spec = SweepSpec::square(b, a, 10).unwrap();
    let (j_lo, j_hi) = spec.j_range;
    let mut out = Vec::new();
    for i in 1..=10 {
        let j = j_lo + (j_hi - j_lo) * i as f64 / 11.0;
        let base = ProblemParams::new(b, a, j, 0.0).unwrap();
        let lo = e_minus(&base).unwrap();
        let hi = if b < 0.0 { e_plus(&base).unwrap() } else { spec.e_max };
        for s in 1..=10 {
            out.push(base.with_energy(lo + (hi - lo) * s as f64 / 11.0).unwrap());
        }
    }
    out
}

fn period_forms(ledger: &mut Ledger) {
    for (label, b, a) in [("D1", -1.0, 1.0), ("D2", 1.0, 1.0), ("D3", 1.0, -1.0)] {
        let worst = grid_points(b, a)
            .par_iter()
            .map(|p| {
                let d = profile_data(p).unwrap();
                let (t, m, th) = common::radial_integrals(p, 40_000);
                let rel = |x: f64, y: f64| (x - y).abs() / y.abs();
                rel(d.period, t).max(rel(d.mass, m)).max(rel(d.theta.raw, th))
            })
            .reduce(|| 0.0, f64::max);
        ledger.check(
            &format!("8 period forms on {label}"),
            worst <= 1e-8,
            format!("max relative difference {worst:.2e} <= 1e-8 on 10x10 grid (T, M, theta)"),
        );
        let mut worst_lim = 0.0f64;
        for j in [0.1, 0.2, 0.3] {
            let base = ProblemParams::new(b, a, j, 0.0).unwrap();
            let q = q_branches(&base).unwrap().big_q;
            let e = e_minus(&base).unwrap() + 1e-6;
            let t = profile_data(&base.with_energy(e).unwrap()).unwrap().period;
            worst_lim = worst_lim.max((t - PI * SQRT_2 / (3.0 * q * q - a).sqrt()).abs());
        }
        ledger.check(
            &format!("8 boundary period limit on {label}"),
            worst_lim <= 1e-3,
            format!("max |T(E-+1e-6) - pi sqrt2/sqrt(3Q^2-a)| = {worst_lim:.2e} <= 1e-3"),
        );
    }
}

fn ode_invariants(ledger: &mut Ledger, cases: &[(usize, Case)]) {
    let (mut drift, mut period, mut failures) = (0.0f64, 0.0f64, Vec::new());
    for (_, c) in cases {
        match integrate_profile_report(&c.params, 1000) {
            Ok(r) => {
                drift = drift.max(r.drift_j).max(r.drift_e);
                period = period.max(r.periodicity_residual);
            }
            Err(e) => failures.push(format!("{}: {e}", c.label)),
        }
    }
    ledger.check(
        "9 ODE invariant drift",
        failures.is_empty() && drift <= 1e-8,
        format!("max relative drift {drift:.2e} <= 1e-8 over {} profiles {failures:?}", cases.len()),
    );
    ledger.check("9 quasi-periodicity residual", period <= 1e-6, format!("max residual {period:.2e} <= 1e-6"));
}

fn linear_solves(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst = 0.0f64;
    for i in 0..200 {
        let dx = rng.gen_range(0.01..0.5);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let m = if i % 2 == 0 {
            let dt = rng.gen_range(1e-4..1e-2);
            let mut m = CyclicTridiagonal::laplacian(32, dx, theta).affine(Complex64::from(1.0), Complex64::from(-dt));
            for d in m.diag.iter_mut() {
                *d -= dt * rng.gen_range(-2.0..2.0);
            }
            m
        } else {
            let (mu, omega) = (rng.gen_range(-0.5..0.5), rng.gen_range(-1.0..1.0));
            CyclicTridiagonal::centered_difference(32, dx, theta)
                .affine(Complex64::from(1.0 - mu), Complex64::new(0.0, -omega))
        };
        let rhs = common::random_state(&mut rng, 32);
        let dense = common::dense_solve(&m, &rhs);
        match m.solve(&rhs) {
            Ok(fast) => {
                let diff: Vec<_> = fast.iter().zip(&dense).map(|(a, b)| a - b).collect();
                worst = worst.max(common::max_norm(&diff) / common::max_norm(&dense));
            }
            Err(_) => worst = f64::INFINITY,
        }
    }
    ledger.check(
        "10 twisted solves vs dense LU",
        worst <= 1e-12,
        format!("max relative difference {worst:.2e} <= 1e-12 over 200 systems"),
    );
}

fn jacobian_signs(ledger: &mut Ledger) {
    let records = sweep(&SweepSpec::square(-1.0, 1.0, 20).unwrap()).unwrap();
    let checked: Vec<_> = records.iter().filter(|r| !r.boundary_adjacent).collect();
    let bad = checked.iter().filter(|r| !(r.dt_de > 0.0 && r.dt_dj < 0.0 && r.delta < 0.0)).count();
    ledger.check(
        "11 monotonicity and Jacobian signs on D1",
        bad == 0 && !checked.is_empty(),
        format!("{bad} sign violations among {} of {} points", checked.len(), records.len()),
    );
}

fn renormalization_contract(ledger: &mut Ledger, runs: &[(usize, Case, qpwave::Result<Comparison>)]) {
    let (mut residual_ok, mut cs_ok, mut steps, mut done) = (true, true, 0usize, 0usize);
    for (_, _, run) in runs {
        let Ok(c) = run else { continue };
        done += 1;
        let k = c.report.constraints.unwrap();
        let d = &c.diagnostics;
        residual_ok &= d.mass_residual <= 1e-6 * k.mass && d.momentum_residual <= 1e-6 * k.momentum.abs().max(1.0);
        for r in &d.records {
            steps += 1;
            cs_ok &= r.p0 * r.p0 <= r.m0 * r.k0 * (1.0 + 1e-12);
        }
    }
    ledger.check(
        "12 constraint residuals",
        residual_ok && done == runs.len(),
        format!("{done} of {} runs within 1e-6 m and 1e-6 max(1,|p|)", runs.len()),
    );
    ledger.check(
        "12 Cauchy-Schwarz at every step",
        cs_ok && steps > 0,
        format!("p0^2 <= m0 k0 on {steps} recorded steps"),
    );
}

fn gradient_check(ledger: &mut Ledger) {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let mut worst = 0.0f64;
    let h = 1e-6;
    for _ in 0..50 {
        let grid = Grid::new(rng.gen_range(1.0..6.0), 32, rng.gen_range(0.0..std::f64::consts::TAU)).unwrap();
        let b = rng.gen_range(-2.0..2.0);
        let u = common::random_state(&mut rng, 32);
        let g = energy_gradient(&u, &grid, b);
        let energy = |v: &[Complex64]| discrete_functionals(v, &grid, b).energy;
        let (mut num, mut den) = (0.0, 0.0);
        for l in 0..32 {
            for dir in [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)] {
                let mut p = u.clone();
                let mut m = u.clone();
                p[l] += dir * h;
                m[l] -= dir * h;
                let fd = (energy(&p) - energy(&m)) / (2.0 * h);
                let exact = (g[l].conj() * dir).re * grid.dx;
                num += (fd - exact) * (fd - exact);
                den += exact * exact;
            }
        }
        worst = worst.max((num / den).sqrt());
    }
    ledger.check(
        "13 energy gradient vs central differences",
        worst <= 1e-6,
        format!("max relative error {worst:.2e} <= 1e-6 over 50 states"),
    );
}

fn main() -> ExitCode {
    let mut ledger = Ledger { failed: 0 };
    let cases = experiment_cases();
    let config = CompareConfig::default();
    let runs: Vec<_> = cases.par_iter().map(|(_, c)| compare(&c.params, &config)).collect();
    let runs: Vec<_> =
        cases.iter().zip(runs).map(|((n, c), r)| (*n, Case { label: c.label.clone(), ..*c }, r)).collect();
    experiments(&mut ledger, &runs);
    elliptic_identities(&mut ledger);
    period_forms(&mut ledger);
    ode_invariants(&mut ledger, &cases);
    linear_solves(&mut ledger);
    jacobian_signs(&mut ledger);
    renormalization_contract(&mut ledger, &runs);
    gradient_check(&mut ledger);
    println!("{} criteria failed", ledger.failed);
    if ledger.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
