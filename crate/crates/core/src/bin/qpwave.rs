#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qpwave::atlas::{self, FigureKind, SweepSpec};
use qpwave::elliptic::EllipticModulus;
use qpwave::gradflow::{InitialData, TransportStencil};
use qpwave::profile::{classify, elliptic_family_params, Family, ProblemParams};
use qpwave::report::{self, CompareConfig, RunReport, TargetSource};
use qpwave::{Error, Result};

const OUT_DIR_VAR: &str = "QPWAVE_OUT_DIR";

#[derive(Parser)]
#[command(name = "qpwave", version, about = "Quasi-periodic standing waves of the cubic NLS")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Period, Floquet multiplier, mass and momentum of a profile.
    Params(ProfileArgs),
    /// Integrate the profile, run the minimizer with matching constraints and compare.
    Compare(CompareArgs),
    /// Compare two sample dumps written by `compare --dump-dir`.
    Diff { first: PathBuf, second: PathBuf },
    /// Sweep the admissible domain and tabulate T, θ, M, P and their derivatives.
    Atlas(AtlasArgs),
    /// Data behind the domain, boundary-curve and map-image plots.
    Figures(FigureArgs),
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(short = 'b', long = "b", allow_negative_numbers = true, requires_all = ["a", "j", "e"])]
    b: Option<f64>,
    #[arg(short = 'a', long = "a", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(short = 'J', long = "J", allow_negative_numbers = true)]
    j: Option<f64>,
    #[arg(short = 'E', long = "E", allow_negative_numbers = true)]
    e: Option<f64>,
    /// Reference elliptic family instead of explicit coefficients.
    #[arg(long, value_enum, conflicts_with_all = ["b", "a", "j", "e"], requires = "k")]
    family: Option<Family>,
    #[arg(long)]
    k: Option<f64>,
}

impl ProfileArgs {
    fn params(&self) -> Result<ProblemParams> {
        match (self.family, self.k, self.b, self.a, self.j, self.e) {
            (Some(f), Some(k), ..) => Ok(elliptic_family_params(f, EllipticModulus::new(k)?)?.0),
            (None, _, Some(b), Some(a), Some(j), Some(e)) => ProblemParams::new(b, a, j, e),
            _ => Err(Error::Input("give either -b -a -J -E or --family with --k".into())),
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Initial {
    Standard,
    Bump,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    profile: ProfileArgs,
    #[arg(long, default_value_t = 1000)]
    cells: usize,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_steps: usize,
    #[arg(long, value_enum, default_value_t = TransportStencil::Continuous)]
    stencil: TransportStencil,
    #[arg(long, value_enum, default_value_t = TargetSource::Sampled)]
    targets: TargetSource,
    #[arg(long, value_enum, default_value_t = Initial::Standard)]
    initial: Initial,
    #[arg(long, default_value_t = qpwave::gradflow::DEGENERACY_TOL)]
    degeneracy_tol: f64,
    /// Fail (exit 1) when the max modulus difference exceeds this.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Write `ode.csv` and `minimizer.csv` here.
    #[arg(long)]
    dump_dir: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct AtlasArgs {
    #[arg(long = "b", allow_negative_numbers = true)]
    b: f64,
    #[arg(long = "a", allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 20)]
    grid: usize,
    #[arg(long, default_value_t = 1e-4)]
    h: f64,
    /// Upper energy of the focusing window.
    #[arg(long, default_value_t = 12.0)]
    e_max: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also run the injectivity probe with this many pairs (defocusing only).
    #[arg(long)]
    probe: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FigureArgs {
    #[arg(long, value_enum)]
    which: FigureKind,
    #[arg(long = "b", allow_negative_numbers = true)]
    b: f64,
    #[arg(long = "a", allow_negative_numbers = true)]
    a: f64,
    #[arg(long, default_value_t = 200)]
    n: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

/// Resolves relative output paths against `$QPWAVE_OUT_DIR` when set.
fn output_path(p: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_VAR) {
        Some(dir) if p.is_relative() => Path::new(&dir).join(p),
        _ => p.to_path_buf(),
    }
}

fn sink(out: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => {
            let p = output_path(p);
            if let Some(parent) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)?;
            }
            Box::new(BufWriter::new(File::create(p)?))
        }
        None => Box::new(io::stdout().lock()),
    })
}

fn run_params(args: &ProfileArgs) -> Result<ExitCode> {
    let params = args.params()?;
    let report = RunReport::profile_only(params)?;
    eprintln!(
        "{}: T = {:.12}, theta = {:.12}, m = {:.12}, p = {:.12}",
        classify(&params),
        report.profile.period,
        report.profile.theta.raw,
        report.profile.mass,
        report.profile.momentum
    );
    println!("{}", report.to_json()?);
    Ok(ExitCode::SUCCESS)
}

fn run_compare(args: &CompareArgs) -> Result<ExitCode> {
    let params = args.profile.params()?;
    let config = CompareConfig {
        cells: args.cells,
        dt: args.dt,
        eps: args.eps,
        max_steps: args.max_steps,
        stencil: args.stencil,
        targets: args.targets,
        degeneracy_tol: args.degeneracy_tol,
        initial: match args.initial {
            Initial::Standard => InitialData::Standard,
            Initial::Bump => InitialData::Bump,
        },
    };
    let cmp = report::compare(&params, &config)?;
    if let Some(dir) = &args.dump_dir {
        let dir = output_path(dir);
        std::fs::create_dir_all(&dir)?;
        report::save_sample_csv(&cmp.ode, &dir.join("ode.csv"))?;
        report::save_sample_csv(&cmp.minimizer, &dir.join("minimizer.csv"))?;
    }
    let mut out = sink(args.report.as_ref())?;
    writeln!(out, "{}", cmp.report.to_json()?)?;
    out.flush()?;
    let diff = cmp.report.metrics.map_or(f64::NAN, |m| m.max_modulus_difference);
    eprintln!("max modulus difference {diff:.3e}");
    Ok(match args.tolerance {
        Some(tol) if !(diff <= tol) => {
            eprintln!("FAIL: exceeds tolerance {tol:e}");
            ExitCode::from(1)
        }
        _ => ExitCode::SUCCESS,
    })
}

fn run_diff(first: &Path, second: &Path) -> Result<ExitCode> {
    let a = report::load_sample_csv(first)?;
    let b = report::load_sample_csv(second)?;
    println!("{}", serde_json::to_string_pretty(&report::metrics(&a, &b)?)?);
    Ok(ExitCode::SUCCESS)
}

fn run_atlas(args: &AtlasArgs) -> Result<ExitCode> {
    let spec = SweepSpec { h: args.h, e_max: args.e_max, ..SweepSpec::square(args.b, args.a, args.grid)? };
    let records = atlas::sweep(&spec)?;
    let mut out = sink(args.out.as_ref())?;
    match args.format {
        Format::Csv => atlas::write_records_csv(&records, &mut out)?,
        Format::Json => writeln!(out, "{}", atlas::records_json(&records)?)?,
    }
    out.flush()?;
    if let Some(pairs) = args.probe {
        let probe = atlas::injectivity_probe(pairs, args.seed)?;
        eprintln!("{}", serde_json::to_string_pretty(&probe)?);
        if !probe.passed() {
            return Ok(ExitCode::from(1));
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn run_figures(args: &FigureArgs) -> Result<ExitCode> {
    let table = atlas::figures(args.which, args.b, args.a, args.n)?;
    let mut out = sink(args.out.as_ref())?;
    match args.format {
        Format::Csv => table.write_csv(&mut out)?,
        Format::Json => writeln!(out, "{}", table.to_json()?)?,
    }
    out.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Params(a) => run_params(a),
        Command::Compare(a) => run_compare(a),
        Command::Diff { first, second } => run_diff(first, second),
        Command::Atlas(a) => run_atlas(a),
        Command::Figures(a) => run_figures(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
