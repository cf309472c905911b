//! Command-line front end.
//!
//! Every flag can also be given in a TOML file passed with `--config`; keys
//! use the flag spelling (`t-end = 1.0`, `c-list = [1, 32]`). Flags given on
//! the command line override the file. Keys the chosen subcommand does not
//! use are rejected.
//!
//! Exit codes: 0 success, 1 invalid input or failed self-test, 2 numerical
//! divergence.

mod selftest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::error::{KgzError, Result};
use crate::experiments::{
    default_tau_list, run_convergence, run_limit_study, simulate, steps_for, write_csv,
    LimitConfig, Scheme, SweepConfig,
};
use crate::integrator_uaosc2::Uaosc2Options;
use crate::kgz_model::{benchmark_initial_data, KgzState, ModelParams, PhysicalState};
use crate::spectral_core::TorusGrid;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_DIVERGED: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "kgz", version, about = "Uniformly accurate integrators for the Klein-Gordon-Zakharov system")]
struct Cli {
    /// TOML file with default values for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Propagate initial data and write the final snapshot (x, re_z, n, ndot).
    Simulate(SimulateArgs),
    /// Step-size sweep against a fine-step reference of the same scheme.
    Convergence(ConvergenceArgs),
    /// Distance to the Zakharov limit for a list of plasma frequencies.
    Limit(LimitArgs),
    /// Run the built-in property checks.
    Selftest,
}

#[derive(Args, Debug, Default)]
struct GridArgs {
    /// Number of grid points.
    #[arg(long)]
    modes: Option<usize>,
    /// Length of the periodic domain.
    #[arg(long)]
    length: Option<f64>,
}

#[derive(Args, Debug, Default)]
struct Uaosc2Args {
    /// Second-order scheme: use the printed sign of the Psi2 bracket term.
    #[arg(long)]
    literal_bracket_sign: bool,
    /// Second-order scheme: use A_c instead of its one-step chord in I(u, n).
    #[arg(long)]
    plain_dispersion: bool,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[arg(long)]
    scheme: Option<String>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV of physical samples with columns x, z, zdot, n, ndot.
    #[arg(long)]
    initial: Option<PathBuf>,
    /// Apply the 2/3 rule in every product.
    #[arg(long)]
    dealias: bool,
    #[command(flatten)]
    uaosc2: Uaosc2Args,
}

#[derive(Args, Debug)]
struct ConvergenceArgs {
    #[arg(long)]
    scheme: Option<String>,
    /// Comma-separated plasma frequencies.
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    /// Comma-separated step sizes; default T/2^(j+2), j = 0..6.
    #[arg(long, value_delimiter = ',')]
    tau_list: Option<Vec<f64>>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Reference step; default T/4096.
    #[arg(long)]
    ref_tau: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    uaosc2: Uaosc2Args,
}

#[derive(Args, Debug)]
struct LimitArgs {
    #[arg(long, value_delimiter = ',')]
    c_list: Option<Vec<f64>>,
    #[arg(long)]
    tau: Option<f64>,
    /// Step of the Zakharov reference solver.
    #[arg(long)]
    zref_tau: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Contents of a `--config` file.
#[derive(Deserialize, Debug, Default)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    scheme: Option<String>,
    c: Option<f64>,
    tau: Option<f64>,
    t_end: Option<f64>,
    modes: Option<usize>,
    length: Option<f64>,
    out: Option<PathBuf>,
    initial: Option<PathBuf>,
    dealias: Option<bool>,
    c_list: Option<Vec<f64>>,
    tau_list: Option<Vec<f64>>,
    ref_tau: Option<f64>,
    zref_tau: Option<f64>,
    literal_bracket_sign: Option<bool>,
    plain_dispersion: Option<bool>,
}

impl FileConfig {
    fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text)
            .map_err(|e| KgzError::Config(format!("{}: {e}", path.display())))
    }

    /// Rejects keys that the subcommand would not read.
    fn only(&self, allowed: &[&str]) -> Result<()> {
        let present = [
            ("scheme", self.scheme.is_some()),
            ("c", self.c.is_some()),
            ("tau", self.tau.is_some()),
            ("t-end", self.t_end.is_some()),
            ("modes", self.modes.is_some()),
            ("length", self.length.is_some()),
            ("out", self.out.is_some()),
            ("initial", self.initial.is_some()),
            ("dealias", self.dealias.is_some()),
            ("c-list", self.c_list.is_some()),
            ("tau-list", self.tau_list.is_some()),
            ("ref-tau", self.ref_tau.is_some()),
            ("zref-tau", self.zref_tau.is_some()),
            ("literal-bracket-sign", self.literal_bracket_sign.is_some()),
            ("plain-dispersion", self.plain_dispersion.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return Err(KgzError::Config(format!(
                    "config key '{key}' is not used by this subcommand"
                )));
            }
        }
        Ok(())
    }
}

fn grid_from(args: &GridArgs, file: &FileConfig) -> Result<TorusGrid> {
    let modes = args.modes.or(file.modes).unwrap_or(128);
    let length = args
        .length
        .or(file.length)
        .unwrap_or(2.0 * std::f64::consts::PI);
    TorusGrid::new(modes, length)
}

fn options_from(args: &Uaosc2Args, file: &FileConfig) -> Uaosc2Options {
    Uaosc2Options {
        literal_bracket_sign: args.literal_bracket_sign || file.literal_bracket_sign.unwrap_or(false),
        plain_dispersion: args.plain_dispersion || file.plain_dispersion.unwrap_or(false),
    }
}

fn required<T>(v: Option<T>, name: &str) -> Result<T> {
    v.ok_or_else(|| KgzError::Config(format!("missing required value --{name}")))
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                KgzError::Divergence { .. } => EXIT_DIVERGED,
                _ => EXIT_INVALID,
            }
        }
    }
}

/// Honors `KGZ_THREADS` as a cap on sweep parallelism.
fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("KGZ_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| KgzError::Config(format!("KGZ_THREADS must be a positive integer, got '{v}'")))?;
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| KgzError::Config(format!("cannot start worker threads: {e}")))
}

fn dispatch(cli: Cli) -> Result<i32> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p)?,
        None => FileConfig::default(),
    };
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a, file),
        Command::Convergence(a) => cmd_convergence(a, file),
        Command::Limit(a) => cmd_limit(a, file),
        Command::Selftest => {
            file.only(&[])?;
            Ok(if selftest::run_all(&mut std::io::stdout()) {
                EXIT_OK
            } else {
                EXIT_INVALID
            })
        }
    }
}

fn open_out(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::io::BufWriter::new(std::fs::File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn cmd_simulate(a: SimulateArgs, file: FileConfig) -> Result<i32> {
    file.only(&[
        "scheme",
        "c",
        "tau",
        "t-end",
        "modes",
        "length",
        "out",
        "initial",
        "dealias",
        "literal-bracket-sign",
        "plain-dispersion",
    ])?;
    let scheme: Scheme = required(a.scheme.or(file.scheme.clone()), "scheme")?.parse()?;
    let c = required(a.c.or(file.c), "c")?;
    let tau = required(a.tau.or(file.tau), "tau")?;
    let t_end = a.t_end.or(file.t_end).unwrap_or(1.0);
    let grid = grid_from(&a.grid, &file)?;
    let params = ModelParams {
        c,
        grid,
        dealias: a.dealias || file.dealias.unwrap_or(false),
    };
    params.validate()?;
    let steps = steps_for(tau, t_end)?;
    let data = match a.initial.or(file.initial.clone()) {
        Some(p) => read_initial(&p, grid)?,
        None => benchmark_initial_data(grid, c),
    };
    let out = a.out.or(file.out.clone());
    let options = options_from(&a.uaosc2, &file);
    let state = simulate(scheme, &params, &data, tau, steps, options)?;
    write_snapshot(&state, open_out(&out)?)?;
    eprintln!("{scheme}: c = {c}, tau = {tau}, steps = {steps}, t = {}", state.time);
    Ok(EXIT_OK)
}

fn cmd_convergence(a: ConvergenceArgs, file: FileConfig) -> Result<i32> {
    file.only(&[
        "scheme",
        "c-list",
        "tau-list",
        "t-end",
        "ref-tau",
        "modes",
        "length",
        "out",
        "literal-bracket-sign",
        "plain-dispersion",
    ])?;
    let scheme: Scheme = required(a.scheme.or(file.scheme.clone()), "scheme")?.parse()?;
    let t_end = a.t_end.or(file.t_end).unwrap_or(1.0);
    let cfg = SweepConfig {
        c_list: required(a.c_list.or(file.c_list.clone()), "c-list")?,
        tau_list: a
            .tau_list
            .or(file.tau_list.clone())
            .unwrap_or_else(|| default_tau_list(t_end)),
        t_end,
        ref_tau: a.ref_tau.or(file.ref_tau).unwrap_or(t_end / 4096.0),
        scheme,
        grid: grid_from(&a.grid, &file)?,
        uaosc2: options_from(&a.uaosc2, &file),
    };
    cfg.validate()?;
    let report = run_convergence(&cfg)?;
    write_csv(&report, open_out(&a.out.or(file.out.clone()))?)?;
    for fit in report.slopes()? {
        eprintln!("{} c = {}: slope {:.4}", fit.scheme, fit.c, fit.slope);
    }
    Ok(EXIT_OK)
}

fn cmd_limit(a: LimitArgs, file: FileConfig) -> Result<i32> {
    file.only(&["c-list", "tau", "zref-tau", "t-end", "modes", "length", "out"])?;
    let d = LimitConfig::standard();
    let cfg = LimitConfig {
        c_list: a.c_list.or(file.c_list.clone()).unwrap_or(d.c_list),
        tau: a.tau.or(file.tau).unwrap_or(d.tau),
        zref_tau: a.zref_tau.or(file.zref_tau).unwrap_or(d.zref_tau),
        t_end: a.t_end.or(file.t_end).unwrap_or(d.t_end),
        grid: grid_from(&a.grid, &file)?,
    };
    cfg.validate()?;
    let report = run_limit_study(&cfg)?;
    write_csv(&report, open_out(&a.out.or(file.out.clone()))?)?;
    let cs: Vec<f64> = report.rows.iter().map(|r| r.c).collect();
    if cs.len() >= 2 {
        let c_min = cs[cs.len().saturating_sub(4)];
        eprintln!("slope of err_z_h1 in c: {:.4}", report.c_slope(Scheme::Uaosc1, c_min)?);
    }
    Ok(EXIT_OK)
}

/// Writes `x,re_z,n,ndot` samples of the state.
pub fn write_snapshot<W: Write>(state: &KgzState, out: W) -> Result<()> {
    let grid = state.grid();
    let z = state.z().real_samples();
    let n = state.n.real_samples();
    let nd = state.ndot.real_samples();
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["x", "re_z", "n", "ndot"])?;
    for j in 0..grid.num_points() {
        w.write_record([grid.node(j), z[j], n[j], nd[j]].map(|v| format!("{v:.16e}")))?;
    }
    w.flush()?;
    Ok(())
}

/// Reads `x,z,zdot,n,ndot` samples; the `x` column must match the grid nodes.
pub fn read_initial(path: &Path, grid: TorusGrid) -> Result<PhysicalState> {
    let mut r = csv::Reader::from_path(path)?;
    let header: Vec<String> = r.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header != ["x", "z", "zdot", "n", "ndot"] {
        return Err(KgzError::Input(format!(
            "{}: expected header x,z,zdot,n,ndot",
            path.display()
        )));
    }
    let mut cols: [Vec<f64>; 5] = Default::default();
    for rec in r.records() {
        let rec = rec?;
        for (i, col) in cols.iter_mut().enumerate() {
            let v: f64 = rec[i]
                .trim()
                .parse()
                .map_err(|_| KgzError::Input(format!("bad number '{}'", &rec[i])))?;
            col.push(v);
        }
    }
    if cols[0].len() != grid.num_points() {
        return Err(KgzError::Dimension {
            expected: grid.num_points(),
            got: cols[0].len(),
        });
    }
    for (j, &x) in cols[0].iter().enumerate() {
        if (x - grid.node(j)).abs() > 1e-9 * grid.length() {
            return Err(KgzError::Input(format!(
                "row {j}: x = {x} is not the grid node {}",
                grid.node(j)
            )));
        }
    }
    PhysicalState::from_samples(grid, &cols[1], &cols[2], &cols[3], &cols[4])
}
