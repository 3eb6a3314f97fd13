//! Command-line front end.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::experiments::{
    aggregate, format_g, generate_base_station_weighted, generate_uniform, run_experiment_with,
    write_csv, ExperimentConfig, DEFAULT_GAMMA, DEFAULT_REGION,
};
use crate::geometry::Point;
use crate::heuristics::{solve, Algorithm};
use crate::oracle::{run_suite, Suite};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_MALFORMED: i32 = 2;
pub const EXIT_UNKNOWN_ALGORITHM: i32 = 3;
pub const EXIT_BAD_BUDGET: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "kbst",
    version,
    about = "Relay placement minimising the longest tree edge"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DistArg {
    Uniform,
    Weighted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteArg {
    Bead,
    Onebst,
    Sec,
    Mst,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance read from a points CSV (header `x,y`).
    Solve {
        points: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
        #[arg(long, default_value = "prebeaded")]
        alg: String,
        /// Where to write the solution JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a random terminal set.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_REGION)]
        region: f64,
        #[arg(long, value_enum, default_value_t = DistArg::Uniform)]
        dist: DistArg,
        #[arg(long, default_value_t = DEFAULT_GAMMA)]
        gamma: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output CSV; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a batch experiment described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        /// Per-record CSV output.
        #[arg(long)]
        out: PathBuf,
        /// Aggregated JSON summary output.
        #[arg(long)]
        summary: Option<PathBuf>,
        /// Upper bound on trials per budget.
        #[arg(long)]
        trials_cap: Option<usize>,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Cross-check solvers against brute-force oracles.
    Oracle {
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

/// Reads a points CSV; lines starting with `#` are ignored.
pub fn read_points<R: Read>(input: R) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "y" {
        return Err(Error::Malformed(
            "points file must have header `x,y`".into(),
        ));
    }
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        let value = |i: usize| -> Result<f64> {
            record
                .get(i)
                .and_then(|s| s.parse::<f64>().ok())
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::Malformed(format!("row {}: bad coordinate", row + 1)))
        };
        points.push(Point::new(value(0)?, value(1)?));
    }
    Ok(points)
}

pub fn read_points_file(path: &Path) -> Result<Vec<Point>> {
    read_points(File::open(path)?)
}

pub fn write_points<W: Write>(points: &[Point], base: Option<Point>, mut out: W) -> Result<()> {
    if let Some(b) = base {
        writeln!(out, "# base_station={},{}", b.x, b.y)?;
    }
    writeln!(out, "x,y")?;
    for p in points {
        writeln!(out, "{},{}", p.x, p.y)?;
    }
    out.flush()?;
    Ok(())
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Malformed(_) => EXIT_MALFORMED,
        Error::EmptyInput(_) | Error::TooFewNodes { .. } | Error::InvalidParameter(_) => {
            EXIT_MALFORMED
        }
        Error::UnknownNode(_) => EXIT_FAILURE,
    }
}

fn fail(err: Error) -> i32 {
    eprintln!("error: {err}");
    exit_code(&err)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn cmd_solve(points: &Path, k: i64, alg: &str, out: Option<&Path>) -> i32 {
    let Ok(algorithm) = alg.parse::<Algorithm>() else {
        eprintln!("error: unknown algorithm `{alg}`");
        return EXIT_UNKNOWN_ALGORITHM;
    };
    if k < 0 || (algorithm == Algorithm::Exact1 && k != 1) {
        eprintln!("error: invalid budget k={k} for {algorithm}");
        return EXIT_BAD_BUDGET;
    }
    let terminals = match read_points_file(points) {
        Ok(t) if t.len() >= 2 => t,
        Ok(t) => {
            return fail(Error::TooFewNodes {
                needed: 2,
                got: t.len(),
            })
        }
        Err(e) => return fail(e),
    };
    let solution = match solve(algorithm, &terminals, k as usize) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    if let Some(path) = out {
        let written = create(path).and_then(|mut w| {
            serde_json::to_writer_pretty(&mut w, &solution)?;
            writeln!(w)?;
            Ok(w.flush()?)
        });
        if let Err(e) = written {
            return fail(e);
        }
    }
    println!("bottleneck={:.2}", solution.bottleneck);
    EXIT_OK
}

fn cmd_gen(n: usize, region: f64, dist: DistArg, gamma: f64, seed: u64, out: Option<&Path>) -> i32 {
    if n < 1 || !(region.is_finite() && region > 0.0) {
        return fail(Error::InvalidParameter("need n >= 1 and region > 0".into()));
    }
    let generated = match dist {
        DistArg::Uniform => Ok((None, generate_uniform(n, region, seed))),
        DistArg::Weighted => {
            generate_base_station_weighted(n, region, gamma, seed).map(|(b, p)| (Some(b), p))
        }
    };
    let result = generated.and_then(|(base, pts)| match out {
        Some(path) => write_points(&pts, base, create(path)?),
        None => write_points(&pts, base, io::stdout().lock()),
    });
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e),
    }
}

fn cmd_experiment(
    config: &Path,
    out: &Path,
    summary: Option<&Path>,
    trials_cap: Option<usize>,
    jobs: Option<usize>,
) -> i32 {
    let parsed = std::fs::read_to_string(config)
        .map_err(Error::from)
        .and_then(|s| Ok(serde_json::from_str::<ExperimentConfig>(&s)?));
    let mut cfg = match parsed {
        Ok(c) => c,
        Err(e) => return fail(e),
    };
    if let Some(cap) = trials_cap {
        cfg.trials = cfg.trials.min(cap);
    }
    let progress = |r: &crate::experiments::ExperimentRecord| match &r.error {
        None => println!(
            "k={} trial={} alg={} bottleneck={}",
            r.k,
            r.trial,
            r.algorithm,
            format_g(r.bottleneck)
        ),
        Some(e) => eprintln!("k={} trial={} alg={} error={e}", r.k, r.trial, r.algorithm),
    };
    let records = match run_experiment_with(&cfg, jobs, &progress) {
        Ok(r) => r,
        Err(e) => return fail(e),
    };
    if let Err(e) = create(out).and_then(|w| write_csv(&records, w)) {
        return fail(e);
    }
    if !records.iter().any(|r| r.ok()) {
        eprintln!("error: no trial produced a record");
        return EXIT_FAILURE;
    }
    if let Some(path) = summary {
        let written = aggregate(&records).and_then(|s| {
            let mut w = create(path)?;
            serde_json::to_writer_pretty(&mut w, &s)?;
            writeln!(w)?;
            Ok(w.flush()?)
        });
        if let Err(e) = written {
            return fail(e);
        }
    }
    EXIT_OK
}

fn cmd_oracle(suite: SuiteArg, seed: u64) -> i32 {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Bead => vec![Suite::Bead],
        SuiteArg::Onebst => vec![Suite::OneBst],
        SuiteArg::Sec => vec![Suite::Sec],
        SuiteArg::Mst => vec![Suite::Mst],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let mut all_passed = true;
    for s in suites {
        let report = run_suite(s, seed);
        for f in &report.failures {
            println!("mismatch {f}");
        }
        println!(
            "suite={} cases={} failures={}",
            s.name(),
            report.cases,
            report.failures.len()
        );
        all_passed &= report.passed();
    }
    if all_passed {
        EXIT_OK
    } else {
        EXIT_FAILURE
    }
}

pub fn run(cli: Cli) -> i32 {
    match cli.command {
        Command::Solve {
            points,
            k,
            alg,
            out,
        } => cmd_solve(&points, k, &alg, out.as_deref()),
        Command::Gen {
            n,
            region,
            dist,
            gamma,
            seed,
            out,
        } => cmd_gen(n, region, dist, gamma, seed, out.as_deref()),
        Command::Experiment {
            config,
            out,
            summary,
            trials_cap,
            jobs,
        } => cmd_experiment(&config, &out, summary.as_deref(), trials_cap, jobs),
        Command::Oracle { suite, seed } => cmd_oracle(suite, seed),
    }
}
