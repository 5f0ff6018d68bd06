//! Sweeps of the `(J, E) ↦ (T, θ, M̃, P̃)` map over the admissible domains,
//! finite-difference checks of its monotonicity and Jacobian sign, and the
//! tabulated data behind the domain and boundary-curve plots.

use std::f64::consts::PI;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::profile::{boundary_curve, classify, e_minus, e_plus, j_max, profile_data, q_interval, ProblemParams};

/// Records whose period exceeds this are excluded from sign checks.
pub const PERIOD_CUTOFF: f64 = 1e3;
const MAX_SHRINK: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AtlasRecord {
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "T")]
    pub period: f64,
    pub theta: f64,
    pub mass: f64,
    pub momentum: f64,
    #[serde(rename = "dT_dE")]
    pub dt_de: f64,
    #[serde(rename = "dT_dJ")]
    pub dt_dj: f64,
    /// `∂P̃/∂E · ∂M̃/∂J - ∂M̃/∂E · ∂P̃/∂J`.
    #[serde(rename = "Delta")]
    pub delta: f64,
    pub boundary_adjacent: bool,
}

impl AtlasRecord {
    pub const CSV_HEADER: &'static str = "J,E,T,theta,mass,momentum,dT_dE,dT_dJ,Delta,boundary_adjacent";

    fn csv_row(&self) -> String {
        format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            self.j,
            self.e,
            self.period,
            self.theta,
            self.mass,
            self.momentum,
            self.dt_de,
            self.dt_dj,
            self.delta,
            u8::from(self.boundary_adjacent)
        )
    }
}

pub fn write_records_csv<W: Write>(records: &[AtlasRecord], mut out: W) -> Result<()> {
    writeln!(out, "{}", AtlasRecord::CSV_HEADER)?;
    for r in records {
        writeln!(out, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn records_json(records: &[AtlasRecord]) -> Result<String> {
    Ok(serde_json::to_string_pretty(records)?)
}

/// Central-difference partials of `T`, `M̃`, `P̃` at one point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Partials {
    pub dt_de: f64,
    pub dt_dj: f64,
    pub dm_de: f64,
    pub dm_dj: f64,
    pub dp_de: f64,
    pub dp_dj: f64,
}

impl Partials {
    pub fn delta(&self) -> f64 {
        self.dp_de * self.dm_dj - self.dm_de * self.dp_dj
    }
}

fn interior(b: f64, a: f64, j: f64, e: f64) -> bool {
    ProblemParams::new(b, a, j, e).is_ok_and(|p| classify(&p).is_interior())
}

fn tpm(b: f64, a: f64, j: f64, e: f64) -> Result<[f64; 3]> {
    let d = profile_data(&ProblemParams::new(b, a, j, e)?)?;
    Ok([d.period, d.mass, d.momentum])
}

/// Central differences with steps `dj`, `de`; every stencil point must be
/// inside the domain.
pub fn partials(b: f64, a: f64, j: f64, e: f64, dj: f64, de: f64) -> Result<Partials> {
    for (jj, ee) in [(j + dj, e), (j - dj, e), (j, e + de), (j, e - de)] {
        if !interior(b, a, jj, ee) {
            return Err(Error::Domain(format!("stencil point (J={jj}, E={ee}) leaves the domain")));
        }
    }
    let [tjp, mjp, pjp] = tpm(b, a, j + dj, e)?;
    let [tjm, mjm, pjm] = tpm(b, a, j - dj, e)?;
    let [tep, mep, pep] = tpm(b, a, j, e + de)?;
    let [tem, mem, pem] = tpm(b, a, j, e - de)?;
    Ok(Partials {
        dt_de: (tep - tem) / (2.0 * de),
        dt_dj: (tjp - tjm) / (2.0 * dj),
        dm_de: (mep - mem) / (2.0 * de),
        dm_dj: (mjp - mjm) / (2.0 * dj),
        dp_de: (pep - pem) / (2.0 * de),
        dp_dj: (pjp - pjm) / (2.0 * dj),
    })
}

/// A rectangular sweep: `n_j` values of `J` strictly inside `j_range`, and
/// for each of them `n_e` energies strictly inside `(E₋(J), E_top(J))`,
/// where `E_top` is `E₊` in the defocusing case and `e_max` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepSpec {
    pub b: f64,
    pub a: f64,
    pub j_range: (f64, f64),
    pub n_j: usize,
    pub n_e: usize,
    pub e_max: f64,
    /// Finite-difference step relative to the local `J` and `E` extents.
    pub h: f64,
}

impl SweepSpec {
    /// `n × n` grid over the whole defocusing or focusing domain.
    pub fn square(b: f64, a: f64, n: usize) -> Result<Self> {
        let hi = j_max(b, a).unwrap_or(2.0);
        if b < 0.0 && a <= 0.0 {
            return Err(Error::NoBoundedSolution(format!("b={b} < 0 with a={a} <= 0")));
        }
        Ok(Self { b, a, j_range: (0.0, hi), n_j: n, n_e: n, e_max: 12.0, h: 1e-4 })
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.j_range;
        if !(lo >= 0.0 && lo < hi) || self.n_j == 0 || self.n_e == 0 || !(self.h > 0.0 && self.h < 0.1) {
            return Err(Error::Domain(format!("invalid sweep {self:?}")));
        }
        Ok(())
    }

    fn j_values(&self) -> Vec<f64> {
        let (lo, hi) = self.j_range;
        (1..=self.n_j).map(|i| lo + (hi - lo) * i as f64 / (self.n_j + 1) as f64).collect()
    }

    fn e_window(&self, j: f64) -> Result<(f64, f64)> {
        let p = ProblemParams::new(self.b, self.a, j, 0.0)?;
        let lo = e_minus(&p)?;
        let hi = if self.b < 0.0 { e_plus(&p)? } else { self.e_max };
        if !(hi > lo) {
            return Err(Error::Domain(format!("empty energy window at J={j}")));
        }
        Ok((lo, hi))
    }
}

/// One record, with the stencil shrunk until `(J ± 2δJ, E ± 2δE)` stays in
/// the domain; a point that needed shrinking is tagged boundary-adjacent.
pub fn record(spec: &SweepSpec, j: f64, e: f64) -> Result<AtlasRecord> {
    let (b, a) = (spec.b, spec.a);
    let d = profile_data(&ProblemParams::new(b, a, j, e)?)?;
    let (lo, hi) = spec.e_window(j)?;
    let mut de = spec.h * (hi - lo);
    let mut dj = spec.h * (spec.j_range.1 - spec.j_range.0);
    let mut adjacent = false;
    let mut fits = false;
    for _ in 0..=MAX_SHRINK {
        let probe = [(j + 2.0 * dj, e), (j - 2.0 * dj, e), (j, e + 2.0 * de), (j, e - 2.0 * de)];
        if probe.iter().all(|&(jj, ee)| interior(b, a, jj, ee)) {
            fits = true;
            break;
        }
        adjacent = true;
        de *= 0.5;
        dj *= 0.5;
    }
    adjacent |= d.period > PERIOD_CUTOFF;
    let p = if fits { partials(b, a, j, e, dj, de).ok() } else { None };
    let (dt_de, dt_dj, delta) = p.map_or((f64::NAN, f64::NAN, f64::NAN), |p| (p.dt_de, p.dt_dj, p.delta()));
    Ok(AtlasRecord {
        j,
        e,
        period: d.period,
        theta: d.theta.raw,
        mass: d.mass,
        momentum: d.momentum,
        dt_de,
        dt_dj,
        delta,
        boundary_adjacent: adjacent || !fits,
    })
}

/// Evaluates the sweep in parallel; records come back in `(J, E)` order.
pub fn sweep(spec: &SweepSpec) -> Result<Vec<AtlasRecord>> {
    spec.validate()?;
    let mut points = Vec::with_capacity(spec.n_j * spec.n_e);
    for j in spec.j_values() {
        let (lo, hi) = spec.e_window(j)?;
        for i in 1..=spec.n_e {
            points.push((j, lo + (hi - lo) * i as f64 / (spec.n_e + 1) as f64));
        }
    }
    points.par_iter().map(|&(j, e)| record(spec, j, e)).collect()
}

/// Upper edge of the image domain in the defocusing normalization `b = -1`,
/// `a = 1`: `(M/π)√(3M² + π² - √(9M⁴ + 4M²π²))`.
pub fn image_upper_bound(mass: f64) -> f64 {
    let m2 = mass * mass;
    let pi2 = PI * PI;
    mass / PI * (3.0 * m2 + pi2 - (9.0 * m2 * m2 + 4.0 * m2 * pi2).sqrt()).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ImagePoint {
    pub j: f64,
    pub e: f64,
    pub mass: f64,
    pub momentum: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub first: ImagePoint,
    pub second: ImagePoint,
    pub image_distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub seed: u64,
    pub pairs: usize,
    pub min_image_distance: f64,
    pub collisions: Vec<Collision>,
    /// Images outside `0 < P̃ < image_upper_bound(M̃)`.
    pub outside: Vec<ImagePoint>,
}

impl InjectivityReport {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.outside.is_empty()
    }
}

/// Minimum `(J, E)` separation of a probed pair.
pub const PAIR_SEPARATION: f64 = 1e-3;
/// Image distance below which a pair counts as a collision.
pub const COLLISION_TOL: f64 = 1e-9;

/// Random pairs in the defocusing domain (`b = -1`, `a = 1`), checked for
/// distinct images and for images inside the predicted region.
pub fn injectivity_probe(pairs: usize, seed: u64) -> Result<InjectivityReport> {
    let (b, a) = (-1.0, 1.0);
    let jm = j_max(b, a).expect("defocusing case has a J bound");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| -> Result<(f64, f64)> {
        let j = jm * rng.gen_range(0.01..0.99);
        let p = ProblemParams::new(b, a, j, 0.0)?;
        let (lo, hi) = (e_minus(&p)?, e_plus(&p)?);
        Ok((j, lo + (hi - lo) * rng.gen_range(0.01..0.99)))
    };
    let mut points = Vec::with_capacity(2 * pairs);
    while points.len() < 2 * pairs {
        let x = draw(&mut rng)?;
        let y = draw(&mut rng)?;
        if (x.0 - y.0).hypot(x.1 - y.1) >= PAIR_SEPARATION {
            points.push(x);
            points.push(y);
        }
    }
    let images: Vec<ImagePoint> = points
        .par_iter()
        .map(|&(j, e)| {
            let [_, mass, momentum] = tpm(b, a, j, e)?;
            Ok(ImagePoint { j, e, mass, momentum })
        })
        .collect::<Result<_>>()?;
    let mut report = InjectivityReport {
        seed,
        pairs,
        min_image_distance: f64::INFINITY,
        collisions: Vec::new(),
        outside: Vec::new(),
    };
    for pair in images.chunks(2) {
        let d = (pair[0].mass - pair[1].mass).hypot(pair[0].momentum - pair[1].momentum);
        report.min_image_distance = report.min_image_distance.min(d);
        if d < COLLISION_TOL {
            report.collisions.push(Collision { first: pair[0], second: pair[1], image_distance: d });
        }
    }
    report.outside =
        images.into_iter().filter(|p| !(p.momentum > 0.0 && p.momentum < image_upper_bound(p.mass))).collect();
    Ok(report)
}

/// Tabulated figure data.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
pub enum FigureKind {
    /// `E₋(J)` and, when it exists, `E₊(J)`.
    Domains,
    /// `Q ↦ (M∂, P∂)`.
    BoundaryCurves,
    /// Images of an interior grid, plus the `J = 0` curve when `b > 0 > a`.
    MapImage,
}

/// Right end of the `Q` range plotted for the focusing panels.
pub const FOCUSING_Q_MAX: f64 = 1.5;

/// Data behind one panel of the chosen figure, sampled at `n` points per
/// curve (`n` per axis for the map image).
pub fn figures(which: FigureKind, b: f64, a: f64, n: usize) -> Result<Table> {
    if n < 2 {
        return Err(Error::Domain("need at least two samples".into()));
    }
    match which {
        FigureKind::Domains => domains(b, a, n),
        FigureKind::BoundaryCurves => {
            let (lo, hi) = q_interval(b, a)?;
            let hi = hi.min(FOCUSING_Q_MAX);
            // The lower end is open when the curve diverges there.
            let start = if b < 0.0 { lo + (hi - lo) / n as f64 } else { lo };
            let rows = boundary_curve(b, a, start, hi, n)?
                .into_iter()
                .map(|p| vec![p.q, p.mass, p.momentum, p.j, p.e])
                .collect();
            Ok(Table { columns: vec!["Q", "M", "P", "J", "E"], rows })
        }
        FigureKind::MapImage => map_image(b, a, n),
    }
}

fn domains(b: f64, a: f64, n: usize) -> Result<Table> {
    let hi = match j_max(b, a) {
        Some(v) => v,
        None if b > 0.0 => 2.0,
        None => return Err(Error::NoBoundedSolution(format!("b={b}, a={a}"))),
    };
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let j = hi * i as f64 / (n - 1) as f64;
        let p = ProblemParams::new(b, a, j, 0.0)?;
        let lo = e_minus(&p)?;
        if b < 0.0 {
            rows.push(vec![j, lo, e_plus(&p)?]);
        } else {
            rows.push(vec![j, lo]);
        }
    }
    let columns = if b < 0.0 { vec!["J", "E_minus", "E_plus"] } else { vec!["J", "E_minus"] };
    Ok(Table { columns, rows })
}

fn map_image(b: f64, a: f64, n: usize) -> Result<Table> {
    let spec = SweepSpec { n_j: n, n_e: n, ..SweepSpec::square(b, a, n)? };
    let mut points = Vec::new();
    for j in spec.j_values() {
        let (lo, hi) = spec.e_window(j)?;
        for i in 1..=n {
            points.push((0.0, j, lo + (hi - lo) * i as f64 / (n + 1) as f64));
        }
    }
    if b > 0.0 && a < 0.0 {
        // The J = 0 line for E in (-a²/4b, e_max], skipping the separatrix E = 0.
        let lo = -a * a / (4.0 * b);
        for i in 1..=n {
            let e = lo + (spec.e_max - lo) * i as f64 / n as f64;
            if e.abs() > 1e-3 * (spec.e_max - lo) {
                points.push((1.0, 0.0, e));
            }
        }
    }
    let rows = points
        .par_iter()
        .map(|&(series, j, e)| {
            let d = profile_data(&ProblemParams::new(b, a, j, e)?)?;
            Ok(vec![series, j, e, d.mass, d.momentum])
        })
        .collect::<Result<_>>()?;
    Ok(Table { columns: vec!["series", "J", "E", "M", "P"], rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::boundary_point;
    use approx::assert_relative_eq;

    #[test]
    fn upper_bound_is_the_boundary_curve() {
        for q in [0.6, 0.75, 0.9, 0.99] {
            let p = boundary_point(-1.0, 1.0, q).unwrap();
            assert_relative_eq!(image_upper_bound(p.mass), p.momentum, max_relative = 1e-12);
        }
    }

    #[test]
    fn small_sweep_signs() {
        let spec = SweepSpec::square(-1.0, 1.0, 4).unwrap();
        let recs = sweep(&spec).unwrap();
        assert_eq!(recs.len(), 16);
        for r in recs.iter().filter(|r| !r.boundary_adjacent) {
            assert!(r.dt_de > 0.0 && r.dt_dj < 0.0 && r.delta < 0.0, "{r:?}");
        }
        assert!(recs.windows(2).all(|w| (w[0].j, w[0].e) < (w[1].j, w[1].e)));
    }

    #[test]
    fn richardson_consistency() {
        let (j, e) = (0.2, 0.229_579_768_541_653_2);
        let p1 = partials(-1.0, 1.0, j, e, 1e-4, 1e-4).unwrap();
        let p2 = partials(-1.0, 1.0, j, e, 5e-5, 5e-5).unwrap();
        assert_relative_eq!(p1.dt_de, p2.dt_de, max_relative = 5e-3);
    }

    #[test]
    fn image_near_lower_boundary() {
        let q = 0.878_885_066_249_972_8;
        let p = ProblemParams::new(-1.0, 1.0, 0.2, 0.0).unwrap();
        let em = e_minus(&p).unwrap();
        let [_, m, mom] = tpm(-1.0, 1.0, 0.2, em + 1e-6).unwrap();
        let bp = boundary_point(-1.0, 1.0, q).unwrap();
        assert!((m - bp.mass).abs() < 1e-3 && (mom - bp.momentum).abs() < 1e-3);
    }

    #[test]
    fn momentum_vanishes_with_j() {
        let mut prev = f64::INFINITY;
        for k in 2..7 {
            let j = 10f64.powi(-k);
            let p = ProblemParams::new(-1.0, 1.0, j, 0.0).unwrap();
            let e = 0.5 * (e_minus(&p).unwrap() + e_plus(&p).unwrap());
            let [_, _, mom] = tpm(-1.0, 1.0, j, e).unwrap();
            assert!(mom > 0.0 && mom < prev);
            prev = mom;
        }
        assert!(prev < 1e-5);
    }

    #[test]
    fn probe_is_deterministic() {
        let a = injectivity_probe(20, 5).unwrap();
        let b = injectivity_probe(20, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.passed());
    }

    #[test]
    fn figure_tables() {
        let d = figures(FigureKind::Domains, -1.0, 1.0, 200).unwrap();
        assert_eq!(d.rows.len(), 200);
        assert!(d.rows.iter().all(|r| r[1] <= r[2] + 1e-12));
        let c = figures(FigureKind::BoundaryCurves, -1.0, 1.0, 50).unwrap();
        let last = c.rows.last().unwrap();
        assert_eq!((last[0], last[1], last[2]), (1.0, 0.0, 0.0));
        let m = figures(FigureKind::MapImage, 1.0, -1.0, 5).unwrap();
        let line: Vec<_> = m.rows.iter().filter(|r| r[0] == 1.0).collect();
        assert!(!line.is_empty() && line.iter().all(|r| r[4] == 0.0 && r[3] > 0.0));
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("J,E_minus,E_plus\n"));
    }
}
