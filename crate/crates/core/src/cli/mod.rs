//! Command-line front end for the `mfe-lab` binary.

pub mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::inertia::{
    self, interlacing_check, negative_eigenvalue_certificate, trial_rng, AverageVector, MatrixKind,
};
use crate::mfe_solver::{build_weight, solve, BoundaryClass, RadialSolution, WeightProfile};
use crate::nodal::{analyze, verify_bounds};
use crate::spectral::{dirichlet_first, radial_simplicity_check, radiality_check, solve_modes};
use crate::{acceptance, Error};
pub use config::{parse_config, parse_list, parse_modes, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "mfe-lab", version, about = "Radial mean-field equation laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the radial problem and write solution.csv / solution.meta.
    Solve(RunArgs),
    /// Mode-by-mode spectrum of the linearized operator.
    Spectrum(RunArgs),
    /// Nodal domains and signed averages of radial eigenfunctions.
    Nodal(RunArgs),
    /// Inertia of the nodal-average matrices.
    Inertia(InertiaArgs),
    /// Run the acceptance suite.
    Verify,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "LIST")]
    modes: Option<String>,
    #[arg(long, value_name = "K")]
    eigen_count: Option<usize>,
}

#[derive(Debug, Args)]
struct InertiaArgs {
    /// Signed averages, e.g. `5,-3,5,-3`.
    #[arg(
        long,
        value_name = "LIST",
        allow_hyphen_values = true,
        required_unless_present = "random",
        conflicts_with = "random"
    )]
    m: Option<String>,
    #[arg(long, num_args = 3, value_names = ["N", "TRIALS", "SEED"])]
    random: Option<Vec<u64>>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Resolution(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Resolution(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Resolution(m) => write!(f, "resolution failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Argument(_) => CliError::Config(e.to_string()),
            Error::Resolution { .. } => CliError::Resolution(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve(a) => load(&a).and_then(|(c, out)| cmd_solve(&c, &out)),
        Command::Spectrum(a) => load(&a).and_then(|(c, out)| cmd_spectrum(&c, &out)),
        Command::Nodal(a) => load(&a).and_then(|(c, out)| cmd_nodal(&c, &out)),
        Command::Inertia(a) => cmd_inertia(&a),
        Command::Verify => cmd_verify(),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let mut config = parse_config(&text).map_err(CliError::Config)?;
    let modes = args.modes.as_deref().map(parse_modes).transpose().map_err(CliError::Config)?;
    config.override_with(modes, args.eigen_count).map_err(CliError::Config)?;
    let out = args
        .out
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok((config, out))
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), CliError> {
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join(name), contents))
        .map_err(|e| CliError::Config(format!("cannot write {}: {e}", dir.join(name).display())))
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn solve_stage(config: &RunConfig) -> Result<(RadialSolution, WeightProfile), CliError> {
    let grid = config.grid().map_err(CliError::Config)?;
    let sol = solve(&config.problem, &grid, config.tol)?;
    let weight = build_weight(&config.problem, &sol)?;
    Ok((sol, weight))
}

pub fn cmd_solve(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (sol, weight) = solve_stage(config)?;
    let mut csv = String::from("r,psi,V\n");
    for ((r, psi), v) in sol.grid.nodes().iter().zip(&sol.psi).zip(&weight.v) {
        writeln!(csv, "{},{},{}", num(*r), num(*psi), num(*v)).unwrap();
    }
    let (class, beta, v0) = match weight.boundary_class {
        BoundaryClass::Positive => ("Positive", 0.0, *weight.v.last().unwrap()),
        BoundaryClass::Vanishing { beta, v0 } => ("Vanishing", beta, v0),
    };
    let meta = format!(
        "alpha={}\nlambda_effective={}\nresidual_boundary={}\nresidual_mass={}\nboundary_class={class}\nbeta={beta}\nv0={v0}\n",
        sol.alpha, sol.lambda_effective, sol.residual_boundary, sol.residual_mass
    );
    write_file(out, "solution.csv", &csv)?;
    write_file(out, "solution.meta", &meta)?;
    println!(
        "alpha = {}  lambda = {}  boundary = {class}  ({} nodes)",
        sol.alpha,
        sol.lambda_effective,
        sol.grid.len()
    );
    Ok(())
}

pub fn cmd_spectrum(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (sol, weight) = solve_stage(config)?;
    let lambda = sol.lambda_effective;
    let spectra = solve_modes(&weight, lambda, &config.modes, config.eigen_count)?;
    let mut csv = String::from("mode_k,index,sigma,average,boundary_slope\n");
    for s in &spectra {
        for i in 0..s.len() {
            writeln!(
                csv,
                "{},{},{},{},{}",
                s.mode_k,
                i + 1,
                num(s.sigmas[i]),
                num(s.averages[i]),
                num(s.boundary_slopes[i])
            )
            .unwrap();
            let mut samples = String::from("r,phi\n");
            for (r, phi) in s.grid.nodes().iter().zip(&s.eigenfunctions[i]) {
                writeln!(samples, "{},{}", num(*r), num(*phi)).unwrap();
            }
            write_file(out, &format!("eigen_k{}_{}.csv", s.mode_k, i + 1), &samples)?;
        }
    }
    write_file(out, "spectrum.csv", &csv)?;

    let mut meta = String::new();
    if let Some(radial) = spectra.iter().find(|s| s.mode_k == 0) {
        let nu1 = dirichlet_first(&weight, lambda)?;
        let sigma1 = radial.sigmas[0];
        writeln!(meta, "nu1={nu1}\nsigma1={sigma1}\nsigma1_exceeds_nu1={}", sigma1 > nu1).unwrap();
        match radial_simplicity_check(radial) {
            Ok(r) => writeln!(meta, "radial_min_gap={}\nradial_simple={}", r.min_gap, r.simple).unwrap(),
            Err(_) => writeln!(meta, "radial_simple=skipped").unwrap(),
        }
    }
    let shifted_positive = spectra.iter().all(|s| s.sigmas.iter().all(|x| lambda + x > 0.0));
    writeln!(meta, "lambda_plus_sigma_positive={shifted_positive}").unwrap();
    let verdict = match radiality_check(&spectra) {
        Ok(r) if r.passed() => "PASS".to_string(),
        Ok(r) => format!(
            "FAIL (nonradial_nonpositive={}, slope_violations={}, curvature_violations={})",
            r.nonradial_nonpositive.len(),
            r.slope_violations.len(),
            r.curvature_violations.len()
        ),
        Err(_) => "skipped".to_string(),
    };
    writeln!(meta, "radiality={verdict}").unwrap();
    write_file(out, "spectrum.meta", &meta)?;
    print!("{meta}");
    Ok(())
}

pub fn cmd_nodal(config: &RunConfig, out: &Path) -> Result<(), CliError> {
    let (sol, weight) = solve_stage(config)?;
    let spectrum = solve_modes(&weight, sol.lambda_effective, &[0], config.eigen_count)?.remove(0);
    let reports = (0..spectrum.len())
        .map(|i| analyze(&spectrum, i, &weight))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = verify_bounds(&reports);
    let width = reports.iter().map(|r| r.domain_count()).max().unwrap_or(0);
    let mut csv = String::from("mode,index,domain_count,bound,average");
    for j in 1..=width {
        write!(csv, ",m_{j}").unwrap();
    }
    csv.push_str(",verdict\n");
    for rep in &reports {
        let sums = (rep.m_total - rep.average).abs() < 1e-8;
        let ok = rep.bound_satisfied && rep.signs_alternate() && sums && rep.hopf_violations.is_empty();
        write!(
            csv,
            "0,{},{},{},{}",
            rep.eigen_index,
            rep.domain_count(),
            2 * rep.eigen_index,
            num(rep.average)
        )
        .unwrap();
        for j in 0..width {
            csv.push(',');
            if let Some(m) = rep.averages.get(j) {
                csv.push_str(&num(*m));
            }
        }
        writeln!(csv, ",{}", if ok { "PASS" } else { "FAIL" }).unwrap();
        println!(
            "eigenfunction {}: {} domain(s), bound {}  {}",
            rep.eigen_index,
            rep.domain_count(),
            2 * rep.eigen_index,
            if ok { "PASS" } else { "FAIL" }
        );
    }
    write_file(out, "nodal.csv", &csv)?;
    if summary.passed() {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("domain bound exceeded for {:?}", summary.violations)))
    }
}

/// Eigenvalues rounded to 1e-9, largest first, with `-0` printed as `0`.
fn rounded_desc(values: &[f64]) -> Vec<f64> {
    values.iter().rev().map(|v| (v * 1e9).round() / 1e9 + 0.0).collect()
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| num(*v)).collect::<Vec<_>>().join(";")
}

fn cmd_inertia(args: &InertiaArgs) -> Result<(), CliError> {
    let out = args.out.clone().unwrap_or_else(|| PathBuf::from("."));
    if let Some(text) = &args.m {
        let m = parse_list::<f64>(text).map_err(CliError::Config)?;
        let avg = AverageVector::new(m)?;
        let mut csv = String::from("matrix,order,n_minus,n_zero,n_plus,eigenvalues,minors\n");
        println!("{:<10} {:>5} {:>12}  eigenvalues", "matrix", "order", "inertia");
        for kind in [MatrixKind::A, MatrixKind::B, MatrixKind::BReduced, MatrixKind::K0] {
            let r = inertia::report(&avg, kind)?;
            let i = r.inertia;
            writeln!(
                csv,
                "{},{},{},{},{},{},{}",
                kind.label(),
                r.order,
                i.negative,
                i.zero,
                i.positive,
                join(&r.eigenvalues),
                join(&r.minors)
            )
            .unwrap();
            let shown: Vec<String> = rounded_desc(&r.eigenvalues).iter().map(|v| format!("{v}")).collect();
            println!(
                "{:<10} {:>5} {:>12}  {}",
                kind.label(),
                r.order,
                format!("({},{},{})", i.negative, i.zero, i.positive),
                shown.join(", ")
            );
        }
        if avg.len() >= 3 {
            let c = negative_eigenvalue_certificate(&avg)?;
            println!(
                "negative eigenvalue {} (witness: corner {} of B_reduced, det {})",
                c.most_negative, c.witness.minor_index, c.witness.closed_form
            );
        }
        return write_file(&out, "inertia.csv", &csv);
    }

    let spec = args.random.as_deref().expect("clap enforces one source");
    let (n, trials, seed) = (spec[0] as usize, spec[1], spec[2]);
    if n < 3 {
        return Err(CliError::Config(format!("random sweeps need N >= 3, got {n}")));
    }
    let mut csv = String::from(
        "trial,m,most_negative,residue,witness_minor,closed_form,direct,certificate,interlacing\n",
    );
    let (mut certified, mut interlaced) = (0, 0);
    for t in 0..trials {
        let avg = AverageVector::random(n, &mut trial_rng(seed, t))?;
        let c = negative_eigenvalue_certificate(&avg)?;
        let il = interlacing_check(&inertia::build_k0(&avg), avg.values())?;
        certified += c.found() as u64;
        interlaced += il.holds() as u64;
        writeln!(
            csv,
            "{t},{},{},{},{},{},{},{},{}",
            join(avg.values()),
            num(c.most_negative),
            c.witness.residue,
            c.witness.minor_index,
            num(c.witness.closed_form),
            num(c.witness.direct),
            c.found(),
            il.holds()
        )
        .unwrap();
    }
    write_file(&out, "inertia.csv", &csv)?;
    println!("N = {n}, seed = {seed}");
    println!("certificates found: {certified}/{trials}");
    println!("interlacing holds:  {interlaced}/{trials}");
    if certified == trials && interlaced == trials {
        Ok(())
    } else {
        Err(CliError::Numerical("randomized sweep found a counterexample".into()))
    }
}

fn cmd_verify() -> Result<(), CliError> {
    let results = acceptance::run_all();
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Numerical(format!("{failed} acceptance criteria failed")))
    }
}
