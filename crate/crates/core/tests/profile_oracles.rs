mod common;

use approx::assert_relative_eq;
use qpwave::profile::{e_minus, e_plus, j_max, profile_data, ProblemParams};

fn check(p: &ProblemParams) {
    let d = profile_data(p).unwrap();
    let (t, m, th) = common::radial_integrals(p, 40_000);
    assert_relative_eq!(d.period, t, max_relative = 1e-8);
    assert_relative_eq!(d.mass, m, max_relative = 1e-8);
    assert_relative_eq!(d.theta.raw, th, max_relative = 1e-8);
    assert_relative_eq!(d.momentum, d.period * p.j / 2.0, max_relative = 1e-14);
}

#[test]
fn defocusing_interior_matches_radial_form() {
    let jm = j_max(-1.0, 1.0).unwrap();
    for j in [0.1 * jm, 0.5 * jm, 0.9 * jm] {
        let base = ProblemParams::new(-1.0, 1.0, j, 0.0).unwrap();
        let (lo, hi) = (e_minus(&base).unwrap(), e_plus(&base).unwrap());
        for s in [0.1, 0.5, 0.9] {
            check(&base.with_energy(lo + s * (hi - lo)).unwrap());
        }
    }
}

#[test]
fn focusing_interior_matches_radial_form() {
    for (a, j) in [(1.0, 0.3), (1.0, 1.0), (-1.0, 0.2), (-1.0, 4.0)] {
        let base = ProblemParams::new(1.0, a, j, 0.0).unwrap();
        let lo = e_minus(&base).unwrap();
        for de in [0.05, 1.0, 6.0] {
            check(&base.with_energy(lo + de).unwrap());
        }
    }
}
