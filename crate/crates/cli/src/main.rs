use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::Value;

use dilute1d::bethe::{solve_lieb_liniger, solve_yang_gaudin, BetheConfig};
use dilute1d::expansion::{
    girardeau_sweep, hard_core_exact, llh_compare, theorem1_energy, theorem1_energy_bosonic,
    yg_cross_check,
};
use dilute1d::free_fermi::{check_density_bounds, FreeFermiBox};
use dilute1d::json::{check_schema, format_f64};
use dilute1d::scattering::{
    solve_matrix_scattering, solve_scalar_scattering, BoundaryMode, Parity, PotentialSpec,
    ScatteringConfig, ScatteringLength,
};
use dilute1d::spin_algebra::{CouplingKind, Spin};
use dilute1d::spin_chain::{
    ground_energy_per_site, thermodynamic_energy_per_site, Boundary, ChainSolver, SpinChainSpec,
};
use dilute1d::verify::{run_verify, Profile, VerifyOptions};

const EXIT_OTHER: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_ASSERTION: u8 = 4;

/// Numerics for dilute one-dimensional spin-J Fermi gases.
///
/// Exit status: 0 success, 2 configuration error, 3 solver did not converge,
/// 4 a checked assertion failed, 1 anything else.
#[derive(Debug, Parser)]
#[command(name = "dilute1d", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Write results here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Output format. CSV is available for `freefermi` and `expand --mode llh-grid`.
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Seed for every random choice (Lanczos start vectors, samples).
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Solver resolution profile.
    #[arg(long, env = "DILUTE1D_PROFILE", default_value = "standard", global = true)]
    profile: String,
    /// Solver setting override `key=value`; repeatable. Keys: scattering.steps,
    /// lanczos.tol, lanczos.max_iter, bethe.tol, bethe.n_k, bethe.rho_tol.
    #[arg(long = "tol", value_name = "KEY=VALUE", global = true)]
    overrides: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Scalar scattering length from a potential file.
    Scatter(ScatterArgs),
    /// Scattering length matrix from a potential file with a "dim" field.
    ScatterMatrix(ScatterMatrixArgs),
    /// Ground energy per site of a spin chain.
    Chain(ChainArgs),
    /// Lieb–Liniger thermodynamic ground state.
    BetheLl(BetheArgs),
    /// Yang–Gaudin thermodynamic ground state.
    BetheYg(BetheArgs),
    /// Free Fermi density table (CSV) or density bound report (JSON).
    Freefermi(FreeFermiArgs),
    /// First-order energy formulas and cross-model comparisons.
    Expand(ExpandArgs),
    /// Run every acceptance criterion and print a pass/fail table.
    Verify,
}

#[derive(Debug, Args)]
struct ScatterArgs {
    /// Potential JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Which channel to solve.
    #[arg(long, value_enum, default_value = "both")]
    parity: ParityArg,
    /// Matching radius R; defaults to max(2R₀, 1).
    #[arg(long)]
    radius: Option<f64>,
    /// Include the tabulated solution.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ParityArg {
    Even,
    Odd,
    Both,
}

#[derive(Debug, Args)]
struct ScatterMatrixArgs {
    /// Potential JSON file with "dim".
    #[arg(long)]
    input: PathBuf,
    /// Left boundary value U of the scattering solution.
    #[arg(long, value_enum, default_value = "fermionic")]
    bc: BcArg,
    /// Matching radius R; defaults to max(2R₀, 1).
    #[arg(long)]
    radius: Option<f64>,
    /// Include the tabulated solution.
    #[arg(long)]
    table: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BcArg {
    Fermionic,
    Bosonic,
    Symmetric,
}

#[derive(Debug, Args)]
struct ChainArgs {
    /// Chain JSON file; replaces the flags below.
    #[arg(long, conflicts_with_all = ["spin", "sites"])]
    input: Option<PathBuf>,
    /// Spin J (half-integer).
    #[arg(long = "J", default_value_t = 0.5)]
    spin: f64,
    /// Number of sites.
    #[arg(long = "N", default_value_t = 8)]
    sites: usize,
    /// Lai–Sutherland or LLH coupling.
    #[arg(long, value_enum, default_value = "ls")]
    coupling: CouplingArg,
    /// LLH symmetric-channel coupling.
    #[arg(long, required_if_eq("coupling", "llh"))]
    c: Option<f64>,
    /// LLH antisymmetric-channel coupling.
    #[arg(long = "c-prime", required_if_eq("coupling", "llh"))]
    c_prime: Option<f64>,
    /// Chain boundary condition.
    #[arg(long, value_enum, default_value = "periodic")]
    bc: BoundaryArg,
    /// Eigensolver; dense is limited to 4096 states.
    #[arg(long, value_enum, default_value = "lanczos")]
    solver: SolverArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CouplingArg {
    Ls,
    Llh,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BoundaryArg {
    Periodic,
    Open,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SolverArg {
    Lanczos,
    Dense,
}

#[derive(Debug, Args)]
struct BetheArgs {
    /// JSON file `{"model": "ll"|"yg", "rho": .., "c": .., "config": {..}}`; replaces the flags.
    #[arg(long, conflicts_with_all = ["rho", "c"])]
    input: Option<PathBuf>,
    /// Particle density.
    #[arg(long, default_value_t = 1.0)]
    rho: f64,
    /// Contact coupling.
    #[arg(long, default_value_t = 100.0)]
    c: f64,
    /// Omit the density arrays from the output.
    #[arg(long)]
    summary: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BetheInput {
    #[serde(default)]
    schema: Option<String>,
    /// `"ll"` or `"yg"`; must match the subcommand when present.
    #[serde(default)]
    model: Option<String>,
    rho: f64,
    c: f64,
    #[serde(default)]
    config: Option<BetheConfig>,
}

#[derive(Debug, Args)]
struct FreeFermiArgs {
    /// Number of particles.
    #[arg(long = "N", default_value_t = 8)]
    particles: usize,
    /// Box length; defaults to N.
    #[arg(long = "L")]
    length: Option<f64>,
    /// Fixed second point of the table; defaults to L/2.
    #[arg(long)]
    x2: Option<f64>,
    /// Table rows.
    #[arg(long, default_value_t = 101)]
    points: usize,
    /// Random samples for the bound report.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
}

#[derive(Debug, Args)]
struct ExpandArgs {
    /// theorem1: first-order energy; hard-core: exact hard-core energy vs first
    /// order; llh: LLH vs Girardeau; llh-grid: margin sweep; yg: first order vs
    /// Yang–Gaudin.
    #[arg(long, value_enum, default_value = "theorem1")]
    mode: ExpandMode,
    /// Number of particles.
    #[arg(long = "N", default_value_t = 100)]
    particles: usize,
    /// Box length.
    #[arg(long = "L", default_value_t = 100.0)]
    length: f64,
    /// Even-wave scattering length; "-inf" allowed.
    #[arg(long = "a-e", allow_hyphen_values = true)]
    a_e: Option<String>,
    /// Odd-wave scattering length.
    #[arg(long = "a-o", allow_hyphen_values = true)]
    a_o: Option<String>,
    /// Spin chain energy per site; defaults to the infinite Lai–Sutherland value for --J.
    #[arg(long)]
    eps: Option<f64>,
    /// Spin J used for the default --eps.
    #[arg(long = "J", default_value_t = 0.5)]
    spin: f64,
    /// Use the bosonic formula.
    #[arg(long)]
    bosonic: bool,
    /// Hard-core radius for `--mode hard-core`.
    #[arg(long)]
    a: Option<f64>,
    /// Density for the llh, llh-grid and yg modes.
    #[arg(long, default_value_t = 0.01)]
    rho: f64,
    /// Symmetric-channel (llh) or contact (yg) coupling.
    #[arg(long, default_value_t = 4.0)]
    c: f64,
    /// Antisymmetric-channel coupling (llh).
    #[arg(long = "c-prime", default_value_t = 1.0)]
    c_prime: f64,
    /// Chain length for the LLH energy; closed form when omitted.
    #[arg(long)]
    chain_sites: Option<usize>,
    /// Grid points per axis for `--mode llh-grid`.
    #[arg(long, default_value_t = 20)]
    grid: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ExpandMode {
    Theorem1,
    HardCore,
    Llh,
    LlhGrid,
    Yg,
}

/// An error in the user's configuration rather than in the computation.
#[derive(Debug)]
struct ConfigError(String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: impl Into<String>) -> anyhow::Error {
    ConfigError(msg.into()).into()
}

/// A computation that finished but whose checked assertion failed.
#[derive(Debug)]
struct AssertionFailed(String);

impl fmt::Display for AssertionFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssertionFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<ConfigError>() || cause.is::<serde_json::Error>() || cause.is::<std::io::Error>() {
            return EXIT_CONFIG;
        }
        if cause.is::<AssertionFailed>() {
            return EXIT_ASSERTION;
        }
        if let Some(e) = cause.downcast_ref::<dilute1d::Error>() {
            return match e {
                dilute1d::Error::InvalidInput(_) | dilute1d::Error::DimensionTooLarge { .. } => EXIT_CONFIG,
                dilute1d::Error::NotConverged { .. } | dilute1d::Error::Numerical(_) => EXIT_CONVERGENCE,
            };
        }
    }
    EXIT_OTHER
}

/// Solver settings after profile and overrides.
struct Settings {
    scattering: ScatteringConfig,
    bethe: BetheConfig,
    lanczos_tol: Option<f64>,
    lanczos_max_iter: Option<usize>,
    profile: Profile,
}

fn settings(global: &Global) -> Result<Settings> {
    let profile: Profile = global.profile.parse().map_err(|e: dilute1d::Error| config_error(e.to_string()))?;
    let mut s = Settings {
        scattering: profile.scattering(),
        bethe: profile.bethe(),
        lanczos_tol: None,
        lanczos_max_iter: None,
        profile,
    };
    for item in &global.overrides {
        let (key, value) = item
            .split_once('=')
            .ok_or_else(|| config_error(format!("override \"{item}\" is not key=value")))?;
        let float = || {
            value
                .parse::<f64>()
                .map_err(|_| config_error(format!("override {key}: \"{value}\" is not a number")))
        };
        let int = || {
            value
                .parse::<usize>()
                .map_err(|_| config_error(format!("override {key}: \"{value}\" is not an integer")))
        };
        match key {
            "scattering.steps" => s.scattering.steps_per_radius = int()?,
            "lanczos.tol" => s.lanczos_tol = Some(float()?),
            "lanczos.max_iter" => s.lanczos_max_iter = Some(int()?),
            "bethe.tol" => s.bethe.tol = float()?,
            "bethe.n_k" => s.bethe.n_k = int()?,
            "bethe.rho_tol" => s.bethe.rho_tol = float()?,
            _ => return Err(config_error(format!("unknown override key \"{key}\""))),
        }
    }
    Ok(s)
}

impl Settings {
    fn chain_solver(&self, solver: ChainSolver) -> ChainSolver {
        match solver {
            ChainSolver::Lanczos { max_iter, tol, seed } => ChainSolver::Lanczos {
                max_iter: self.lanczos_max_iter.unwrap_or(max_iter),
                tol: self.lanczos_tol.unwrap_or(tol),
                seed,
            },
            dense => dense,
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn write_output(global: &Global, text: &str) -> Result<()> {
    match &global.output {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            out.flush()?;
            Ok(())
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(dilute1d::json::to_string(value)?)
}

fn only_json(global: &Global, command: &str) -> Result<()> {
    if global.format == Some(Format::Csv) {
        return Err(config_error(format!("{command} writes JSON only")));
    }
    Ok(())
}

fn default_radius(spec: &PotentialSpec, radius: Option<f64>) -> f64 {
    radius.unwrap_or_else(|| (2.0 * spec.r0).max(1.0))
}

fn scatter(global: &Global, s: &Settings, args: &ScatterArgs) -> Result<()> {
    only_json(global, "scatter")?;
    let spec = PotentialSpec::from_json(&read(&args.input)?)?;
    let v = spec.to_scalar()?;
    let r = default_radius(&spec, args.radius);
    let parities: &[(Parity, &str)] = match args.parity {
        ParityArg::Even => &[(Parity::Even, "a_e")],
        ParityArg::Odd => &[(Parity::Odd, "a_o")],
        ParityArg::Both => &[(Parity::Even, "a_e"), (Parity::Odd, "a_o")],
    };
    let mut doc = serde_json::Map::new();
    doc.insert("schema".into(), dilute1d::SCHEMA.into());
    doc.insert("kind".into(), "scatter".into());
    doc.insert("R".into(), r.into());
    let mut reports = Vec::new();
    for &(parity, key) in parities {
        let res = solve_scalar_scattering(&v, r, parity, &s.scattering)?;
        doc.insert(key.into(), serde_json::to_value(res.a)?);
        reports.push(serde_json::to_value(res.report(args.table))?);
    }
    doc.insert("solutions".into(), Value::Array(reports));
    write_output(global, &to_json(&doc)?)
}

fn scatter_matrix(global: &Global, s: &Settings, args: &ScatterMatrixArgs) -> Result<()> {
    only_json(global, "scatter-matrix")?;
    let spec = PotentialSpec::from_json(&read(&args.input)?)?;
    let v = spec.to_matrix()?;
    let bc = match args.bc {
        BcArg::Fermionic => BoundaryMode::Fermionic,
        BcArg::Bosonic => BoundaryMode::Bosonic,
        BcArg::Symmetric => BoundaryMode::Symmetric,
    };
    let res = solve_matrix_scattering(&v, default_radius(&spec, args.radius), bc, &s.scattering)?;
    write_output(global, &to_json(&res.report(args.table))?)
}

fn chain(global: &Global, s: &Settings, args: &ChainArgs) -> Result<()> {
    only_json(global, "chain")?;
    let mut spec = match &args.input {
        Some(path) => SpinChainSpec::from_json(&read(path)?)?,
        None => {
            let coupling = match args.coupling {
                CouplingArg::Ls => CouplingKind::LaiSutherland,
                CouplingArg::Llh => CouplingKind::Llh {
                    c: args.c.ok_or_else(|| config_error("--c is required for llh"))?,
                    c_prime: args.c_prime.ok_or_else(|| config_error("--c-prime is required for llh"))?,
                },
            };
            let bc = match args.bc {
                BoundaryArg::Periodic => Boundary::Periodic,
                BoundaryArg::Open => Boundary::Open,
            };
            let solver = match args.solver {
                SolverArg::Lanczos => ChainSolver::lanczos(global.seed),
                SolverArg::Dense => ChainSolver::Dense,
            };
            SpinChainSpec::new(Spin::new(args.spin)?, args.sites, bc, coupling).with_solver(solver)
        }
    };
    spec.solver = s.chain_solver(spec.solver.clone());
    let res = ground_energy_per_site(&spec)?;
    let mut doc = serde_json::to_value(&res)?;
    if matches!(spec.coupling, CouplingKind::LaiSutherland) && spec.bc == Boundary::Periodic {
        let eps_inf = thermodynamic_energy_per_site(spec.spin);
        let n = spec.sites as f64;
        let (lower, upper) = (eps_inf - 1.0 / n, eps_inf + 1.0 / n);
        doc["sandwich"] = serde_json::json!({
            "epsilon_infinity": eps_inf,
            "lower": lower,
            "upper": upper,
            "inside": lower <= res.epsilon && res.epsilon <= upper,
        });
    }
    write_output(global, &to_json(&doc)?)
}

fn bethe(global: &Global, s: &Settings, args: &BetheArgs, yang_gaudin: bool) -> Result<()> {
    only_json(global, "bethe")?;
    let (rho, c, cfg) = match &args.input {
        Some(path) => {
            let input: BetheInput = serde_json::from_str(&read(path)?)
                .map_err(|e| config_error(format!("{}: {e}", path.display())))?;
            check_schema(input.schema.as_deref())?;
            let expected = if yang_gaudin { "yg" } else { "ll" };
            if input.model.as_deref().is_some_and(|m| m != expected) {
                return Err(config_error(format!("input is for model {:?}, not {expected}", input.model)));
            }
            (input.rho, input.c, input.config.unwrap_or_else(|| s.bethe.clone()))
        }
        None => (args.rho, args.c, s.bethe.clone()),
    };
    let mut sol = if yang_gaudin {
        solve_yang_gaudin(rho, c, &cfg)?
    } else {
        solve_lieb_liniger(rho, c, &cfg)?
    };
    if args.summary {
        sol.k.clear();
        sol.f.clear();
        sol.lambda.clear();
        sol.sigma.clear();
    }
    let mut doc = serde_json::to_value(&sol)?;
    doc["e_over_rho3"] = sol.reduced_energy().into();
    write_output(global, &to_json(&doc)?)
}

fn csv_row(w: &mut csv::Writer<Vec<u8>>, values: &[f64]) -> Result<()> {
    w.write_record(values.iter().map(|v| format_f64(*v)))?;
    Ok(())
}

fn csv_finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| anyhow!("CSV buffer: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn freefermi(global: &Global, args: &FreeFermiArgs) -> Result<()> {
    let l = args.length.unwrap_or(args.particles as f64);
    let b = FreeFermiBox::new(args.particles, l)?;
    match global.format.unwrap_or(Format::Csv) {
        Format::Json => {
            let report = check_density_bounds(&b, args.samples, global.seed)?;
            write_output(global, &to_json(&report)?)?;
            if !report.pass {
                return Err(AssertionFailed(format!(
                    "{} samples violate the pair density bound",
                    report.rho2_violations
                ))
                .into());
            }
            Ok(())
        }
        Format::Csv => {
            if args.points < 2 {
                return Err(config_error("--points must be at least 2"));
            }
            let x2 = args.x2.unwrap_or(l / 2.0);
            let bound = 8.0 * std::f64::consts::PI.powi(2) * b.density().powi(4);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x1", "x2", "rho1_x1", "rho2", "rho2_over_gap_sq", "bound_ratio"])?;
            for i in 0..args.points {
                let x1 = l * i as f64 / (args.points - 1) as f64;
                let q = b.rho2_over_gap_sq(x1, x2)?;
                csv_row(&mut w, &[x1, x2, b.rho(&[x1])?, b.rho(&[x1, x2])?, q, q / bound])?;
            }
            write_output(global, &csv_finish(w)?)
        }
    }
}

fn length_arg(text: Option<&str>, name: &str) -> Result<ScatteringLength> {
    let text = text.ok_or_else(|| config_error(format!("--{name} is required")))?;
    if text == "-inf" {
        return Ok(ScatteringLength::NegInfinity);
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .map(ScatteringLength::Finite)
        .ok_or_else(|| config_error(format!("--{name}: \"{text}\" is not a length")))
}

fn expand(global: &Global, s: &Settings, args: &ExpandArgs) -> Result<()> {
    if global.format == Some(Format::Csv) && args.mode != ExpandMode::LlhGrid {
        return Err(config_error("CSV output is only available with --mode llh-grid"));
    }
    let text = match args.mode {
        ExpandMode::Theorem1 => {
            let a_e = length_arg(args.a_e.as_deref(), "a-e")?;
            let a_o = length_arg(args.a_o.as_deref(), "a-o")?;
            let eps = match args.eps {
                Some(e) => e,
                None => thermodynamic_energy_per_site(Spin::new(args.spin)?),
            };
            let report = if args.bosonic {
                theorem1_energy_bosonic(args.particles, args.length, a_e, a_o, eps)?
            } else {
                theorem1_energy(args.particles, args.length, a_e, a_o, eps)?
            };
            to_json(&report)?
        }
        ExpandMode::HardCore => {
            let a = args.a.ok_or_else(|| config_error("--a is required for hard-core"))?;
            to_json(&hard_core_exact(args.particles, args.length, a)?)?
        }
        ExpandMode::Llh => {
            let solver = s.chain_solver(ChainSolver::lanczos(global.seed));
            to_json(&llh_compare(args.rho, args.c, args.c_prime, args.chain_sites, &solver)?)?
        }
        ExpandMode::LlhGrid => {
            let sweep = girardeau_sweep(args.rho, args.grid)?;
            if global.format == Some(Format::Csv) {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["c", "c_prime", "ours", "girardeau", "margin"])?;
                for p in &sweep {
                    csv_row(&mut w, &[p.c, p.c_prime, p.ours, p.girardeau, p.margin])?;
                }
                csv_finish(w)?
            } else {
                to_json(&sweep)?
            }
        }
        ExpandMode::Yg => to_json(&yg_cross_check(args.rho, args.c, &s.bethe, &s.scattering)?)?,
    };
    write_output(global, &text)
}

fn verify(global: &Global, s: &Settings) -> Result<()> {
    let report = run_verify(&VerifyOptions {
        seed: global.seed,
        profile: s.profile,
    });
    match (&global.output, global.format) {
        (Some(_), _) | (None, Some(Format::Json)) => write_output(global, &to_json(&report)?)?,
        (None, _) => write_output(global, &report.table())?,
    }
    if global.output.is_some() {
        eprint!("{}", report.table());
    }
    if report.all_pass {
        return Ok(());
    }
    if report.criteria.iter().any(|c| c.convergence_failure) {
        return Err(dilute1d::Error::Numerical(format!("{} criteria failed", report.failed)).into());
    }
    Err(AssertionFailed(format!("{} criteria failed", report.failed)).into())
}

fn run(cli: &Cli) -> Result<()> {
    let s = settings(&cli.global)?;
    let g = &cli.global;
    match &cli.command {
        Command::Scatter(a) => scatter(g, &s, a),
        Command::ScatterMatrix(a) => scatter_matrix(g, &s, a),
        Command::Chain(a) => chain(g, &s, a),
        Command::BetheLl(a) => bethe(g, &s, a, false),
        Command::BetheYg(a) => bethe(g, &s, a, true),
        Command::Freefermi(a) => freefermi(g, a),
        Command::Expand(a) => expand(g, &s, a),
        Command::Verify => verify(g, &s),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
