//! Command-line front end.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 usage or configuration error,
//! 3 numerical failure.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::{DatumFile, RunConfig};
use crate::dashboard::{verify_dashboard, ParameterMatrix};
use crate::error::{Error, Result};
use crate::fundamental::solve_all;
use crate::io::{
    write_fits, write_fundamental, write_moments, write_paths, write_report, write_summary,
    write_trajectory, MomentRow,
};
use crate::mild::{mild_solve, Forcing, InitialDatum};
use crate::stochastic::{increment_pairs, moment_curve, simulate_paths};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "delayconv",
    version,
    about = "Fundamental solutions, mild solutions and stochastic convolutions of delay equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory (overrides run.out).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Random seed (overrides run.seed).
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Worker threads; defaults to the available cores. Output does not depend on it.
    #[arg(long, global = true, value_name = "N", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    /// Write one column per mode in trajectory.csv.
    #[arg(long, global = true)]
    dump_modes: bool,
    /// Multiplies fitted constants before they are checked. Fault injection for tests.
    #[arg(long, global = true, hide = true, default_value_t = 1.0)]
    constant_scale: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the fundamental solution; writes fundamental.csv and fits.csv.
    Fundamental,
    /// Solve the mild solution for an initial datum; writes trajectory.csv.
    Mild {
        /// Datum file (overrides run.datum).
        #[arg(long, value_name = "PATH")]
        datum: Option<PathBuf>,
    },
    /// Simulate paths of the stochastic convolution; writes paths.csv.
    Simulate,
    /// Increment second moments by quadrature and Monte Carlo; writes moments.csv.
    Moments,
    /// Run the verification dashboard; writes report.csv and summary.txt.
    Verify,
}

/// Exit code for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numerical { .. } | Error::NotPositiveSemidefinite { .. } => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.common.workers {
        builder = builder.num_threads(n as usize);
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

fn load_config(common: &Common) -> Result<RunConfig> {
    let mut config = match &common.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.run.seed = seed;
    }
    if let Some(out) = &common.out {
        config.run.out = out.clone();
    }
    Ok(config)
}

fn output_dir(config: &RunConfig) -> Result<&Path> {
    let dir = config.run.out.as_path();
    std::fs::create_dir_all(dir)
        .map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config = load_config(&cli.common)?;
    match &cli.command {
        Command::Fundamental => cmd_fundamental(&config),
        Command::Mild { datum } => cmd_mild(&config, datum.as_deref(), cli.common.dump_modes),
        Command::Simulate => cmd_simulate(&config),
        Command::Moments => cmd_moments(&config),
        Command::Verify => cmd_verify(&config, cli.common.constant_scale),
    }
}

fn cmd_fundamental(config: &RunConfig) -> Result<i32> {
    let model = config.model()?;
    let grid = config.grid()?;
    let noise = config.noise_for(&model)?;
    let dir = output_dir(config)?;
    let fs = solve_all(&model, &grid)?;
    write_fundamental(&dir.join("fundamental.csv"), &fs)?;
    let matrix = ParameterMatrix {
        moment_gammas: Vec::new(),
        ..config.matrix()
    };
    let bundle = verify_dashboard(&model, &grid, &noise, &matrix, &config.dashboard_options())?;
    write_fits(
        &dir.join("fits.csv"),
        bundle.cells.iter().map(|c| &c.report),
    )?;
    println!(
        "wrote {} and {}",
        dir.join("fundamental.csv").display(),
        dir.join("fits.csv").display()
    );
    Ok(EXIT_OK)
}

fn cmd_mild(config: &RunConfig, datum: Option<&Path>, dump_modes: bool) -> Result<i32> {
    let model = config.model()?;
    let grid = config.grid()?;
    let modes = model.modes();
    let (datum, forcing) = match datum.or(config.run.datum.as_deref()) {
        Some(path) => DatumFile::from_path(path)?.build(&grid, modes)?,
        // unit initial value in every mode: the trajectory is the diagonal of G
        None => (
            InitialDatum::constant_history(&grid, vec![1.0; modes], &vec![0.0; modes])?,
            Forcing::zero(&grid, modes),
        ),
    };
    let dir = output_dir(config)?;
    let fs = solve_all(&model, &grid)?;
    let traj = mild_solve(&fs, &datum, &forcing)?;
    let path = dir.join("trajectory.csv");
    write_trajectory(&path, &traj, config.run.report_gamma, dump_modes)?;
    println!("wrote {}", path.display());
    Ok(EXIT_OK)
}

fn cmd_simulate(config: &RunConfig) -> Result<i32> {
    let model = config.model()?;
    let grid = config.grid()?;
    let noise = config.noise_for(&model)?;
    let dir = output_dir(config)?;
    let fs = solve_all(&model, &grid)?;
    let ensemble = simulate_paths(&fs, &noise, config.run.seed, config.run.paths)?;
    let path = dir.join("paths.csv");
    write_paths(&path, &ensemble, config.run.report_gamma)?;
    println!("wrote {} ({} paths)", path.display(), ensemble.len());
    Ok(EXIT_OK)
}

fn cmd_moments(config: &RunConfig) -> Result<i32> {
    let model = config.model()?;
    let grid = config.grid()?;
    let noise = config.noise_for(&model)?;
    let dir = output_dir(config)?;
    let fs = solve_all(&model, &grid)?;
    let m = grid.steps_per_delay();
    let start = grid.last() / 2;
    let mut pairs = vec![(start, start)];
    pairs.extend(
        increment_pairs(start, 4, (m / 4).max(4), 16)
            .into_iter()
            .filter(|p| p.1 <= grid.last()),
    );
    let ensemble = simulate_paths(&fs, &noise, config.run.seed, config.run.paths)?;
    let gammas = if config.run.moment_gammas.is_empty() {
        vec![0.0]
    } else {
        config.run.moment_gammas.clone()
    };
    let mut rows = Vec::new();
    for &gamma in &gammas {
        let curve = moment_curve(&fs, &noise, gamma, &pairs)?;
        let mc = ensemble.increment_moments(gamma, &pairs);
        for ((&(s, t), &quadrature_value), &(mc_mean, mc_stderr)) in
            pairs.iter().zip(&curve.values).zip(&mc)
        {
            rows.push(MomentRow {
                s: grid.node(s),
                t: grid.node(t),
                gamma,
                quadrature_value,
                mc_mean,
                mc_stderr,
                paths: ensemble.len(),
            });
        }
    }
    let path = dir.join("moments.csv");
    write_moments(&path, &rows)?;
    println!("wrote {} ({} rows)", path.display(), rows.len());
    Ok(EXIT_OK)
}

fn cmd_verify(config: &RunConfig, constant_scale: f64) -> Result<i32> {
    let model = config.model()?;
    let grid = config.grid()?;
    let noise = config.noise_for(&model)?;
    let dir = output_dir(config)?;
    let options = crate::dashboard::DashboardOptions {
        constant_scale,
        ..config.dashboard_options()
    };
    let bundle = verify_dashboard(&model, &grid, &noise, &config.matrix(), &options)?;
    write_report(&dir.join("report.csv"), &bundle)?;
    write_summary(&dir.join("summary.txt"), &bundle)?;
    print!("{}", bundle.summary());
    Ok(if bundle.passed() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run(["delayconv"]), EXIT_USAGE);
        assert_eq!(run(["delayconv", "fundamental", "--bogus"]), EXIT_USAGE);
        assert_eq!(run(["delayconv", "simulate", "--workers", "0"]), EXIT_USAGE);
        assert_eq!(run(["delayconv", "--help"]), EXIT_OK);
    }

    #[test]
    fn missing_config_exits_two() {
        assert_eq!(
            run([
                "delayconv",
                "fundamental",
                "--config",
                "/nonexistent/run.toml"
            ]),
            EXIT_USAGE
        );
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Config("x".into())), EXIT_USAGE);
        assert_eq!(exit_code(&Error::EmptyLattice), EXIT_USAGE);
        let numerical = Error::Numerical {
            mode: None,
            lambda: 1.0,
            node: 0,
            detail: String::new(),
        };
        assert_eq!(exit_code(&numerical), EXIT_NUMERICAL);
    }
}
