use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sliceball::Quaternion;
use sliceball_cli::calc::{self, SeriesOp, TransformSpec};
use sliceball_cli::field::{FieldSpec, FieldTensor, Format};
use sliceball_cli::{parse_quaternion, suites, CliError, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "sliceball", version, about = "Slice-regular geometry of the quaternionic unit ball")]
struct Cli {
    /// Seed for all sampled suites.
    #[arg(long, global = true, env = "SLICEBALL_SEED", default_value_t = 7)]
    seed: u64,
    /// Base number of samples per suite.
    #[arg(long, global = true, default_value_t = 1000)]
    samples: usize,
    /// Tolerance overriding every check (verify) or the distance accuracy.
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true, default_value_t = 1e-12)]
    atol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    rtol: f64,
    /// Series order for oracle comparisons and reciprocals.
    #[arg(long, global = true, default_value_t = 64)]
    truncation: usize,
    /// Keep samples inside |q| < 1 - margin.
    #[arg(long, global = true, default_value_t = 1e-3)]
    boundary_margin: f64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Output format of sample-field: csv or json.
    #[arg(long, global = true, default_value = "csv")]
    format: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites and print one JSON line per check.
    Verify {
        /// Run only suites whose name contains this text.
        suite: Option<String>,
        /// List suite names and exit.
        #[arg(long)]
        list: bool,
    },
    /// Tabulate G, H, Omega (and optionally Ghat or delta(0, q)) over a slice.
    SampleField {
        /// G, H, Omega, Ghat or delta0.
        #[arg(long, default_value = "G")]
        tensor: String,
        /// Imaginary unit I of the slice, as [w, x, y, z].
        #[arg(long, default_value = "[0,1,0,0]")]
        unit: String,
        /// Offset added to every grid point, e.g. to leave the slice.
        #[arg(long, default_value = "[0,0,0,0]")]
        offset: String,
        /// Points per axis over [-1, 1].
        #[arg(long, default_value_t = 21)]
        grid: usize,
        #[arg(long, default_value = "[0,0,1,0]")]
        alpha: String,
        #[arg(long, default_value = "[0,0,1,0]")]
        beta: String,
    },
    /// Apply a Mobius transformation to a point.
    Transform {
        /// {"a": [..], "u": [..]} or {"a": [..], "b": [..], "c": [..], "d": [..]}.
        #[arg(long)]
        map: String,
        #[arg(long)]
        q: String,
        /// Use the classical action of a matrix.
        #[arg(long)]
        classical: bool,
    },
    /// Pseudo-hyperbolic distance of the Hardy space.
    Distance {
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
    },
    /// Power-series operations: star_mul, conjugate, symmetrize, reciprocal, eval.
    Series {
        op: String,
        /// Coefficients [[w,x,y,z], ...] of f.
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: Option<String>,
        #[arg(long)]
        q: Option<String>,
    },
}

fn config(cli: &Cli) -> Result<RunConfig, CliError> {
    RunConfig {
        seed: cli.seed,
        samples: cli.samples,
        truncation: cli.truncation,
        atol: cli.atol,
        rtol: cli.rtol,
        boundary_margin: cli.boundary_margin,
        tol: cli.tol,
    }
    .validate()
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn print_json(out: &mut dyn Write, v: &serde_json::Value) -> Result<(), CliError> {
    writeln!(out, "{}", serde_json::to_string(v).expect("json values serialize"))?;
    Ok(())
}

fn parse_opt(s: &Option<String>) -> Result<Option<Quaternion>, CliError> {
    s.as_deref().map(parse_quaternion).transpose()
}

/// Exit status 1 means a check failed; input errors are returned as `Err`.
fn run(cli: &Cli) -> Result<u8, CliError> {
    let cfg = config(cli)?;
    let mut out = output(&cli.out)?;
    let status = match &cli.command {
        Command::Verify { suite, list } => {
            if *list {
                for s in suites::SUITES {
                    writeln!(out, "{}\t{}", s.name, s.anchor)?;
                }
                0
            } else {
                let chosen = suites::select(suite.as_deref())?;
                let summary = suites::run(&cfg, &chosen, &mut out)?;
                u8::from(!summary.pass)
            }
        }
        Command::SampleField { tensor, unit, offset, grid, alpha, beta } => {
            let format: Format = cli.format.parse()?;
            let spec = FieldSpec::new(
                tensor.parse::<FieldTensor>()?,
                parse_quaternion(unit)?,
                parse_quaternion(offset)?,
                *grid,
                parse_quaternion(alpha)?,
                parse_quaternion(beta)?,
            )?;
            spec.write(format, &mut out)?;
            0
        }
        Command::Transform { map, q, classical } => {
            let spec = TransformSpec::parse(map)?;
            print_json(&mut out, &calc::transform(&spec, parse_quaternion(q)?, *classical)?)?;
            0
        }
        Command::Distance { p, q } => {
            let tol = cfg.tol.unwrap_or(sliceball::hardy::DEFAULT_TOL);
            print_json(&mut out, &calc::distance(parse_quaternion(p)?, parse_quaternion(q)?, tol)?)?;
            0
        }
        Command::Series { op, f, g, q } => {
            let op: SeriesOp = op.parse()?;
            let f = calc::parse_series(f)?;
            let g = g.as_deref().map(calc::parse_series).transpose()?;
            print_json(&mut out, &calc::series(op, &f, g.as_ref(), parse_opt(q)?, cfg.truncation)?)?;
            0
        }
    };
    out.flush()?;
    Ok(status)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("sliceball: {e}");
            ExitCode::from(2)
        }
    }
}
