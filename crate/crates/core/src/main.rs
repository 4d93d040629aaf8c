use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::Rng;

use cwgabor::harness::{
    bisect, phase_transition, preset, preset_names, sweep_grid, verify_example, write_csv, BisectionOutcome, Codebook,
    Experiment, ExperimentConfig, PhaseConfig,
};
use cwgabor::{Error, Result};

#[derive(Parser)]
#[command(name = "cwgabor", version, about = "Coded random access over Gabor-frame dictionaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the configured Eb/N0 grid and write CSV rows.
    Simulate(RunArgs),
    /// Search for the Eb/N0 that meets the target error rate.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Bracket and tolerance in dB: lo,hi[,tol].
        #[arg(long, value_name = "LO,HI[,TOL]")]
        bisect: Option<String>,
    },
    /// Noiseless AMP recovery rates over a (delta, rho) grid.
    PhaseTransition {
        #[arg(long, default_value_t = 97)]
        n: usize,
        #[arg(long, value_enum, default_value = "gabor")]
        codebook: CodebookArg,
        /// Grid size as DELTAxRHO.
        #[arg(long, default_value = "16x16")]
        grid: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Gabor column stride; 1 is the contiguous truncation.
        #[arg(long, default_value_t = 1)]
        stride: usize,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproduce the PPM(8) over RS(6,2) superposition example.
    VerifyExample,
    /// Print a built-in configuration as JSON.
    PrintConfig {
        #[arg(long)]
        preset: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long, conflicts_with = "preset", required_unless_present = "preset")]
    config: Option<PathBuf>,
    /// Built-in configuration name.
    #[arg(long)]
    preset: Option<String>,
    /// Master seed; 0 draws one from the OS and prints it.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Worker threads; CWGABOR_THREADS takes precedence.
    #[arg(long)]
    threads: Option<usize>,
    /// CSV destination, stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Record wall-clock time per point instead of 0.
    #[arg(long)]
    timing: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum CodebookArg {
    Gabor,
    Gaussian,
}

fn threads(flag: Option<usize>) -> Result<usize> {
    if let Ok(v) = std::env::var("CWGABOR_THREADS") {
        return v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| Error::Config(format!("CWGABOR_THREADS={v}")));
    }
    Ok(flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())))
}

fn resolve_seed(seed: u64) -> u64 {
    if seed != 0 {
        return seed;
    }
    let s = rand::rng().random_range(1..u64::MAX);
    eprintln!("seed: {s}");
    s
}

fn load(run: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match (&run.config, &run.preset) {
        (Some(path), _) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        (None, Some(name)) => preset(name)?,
        (None, None) => return Err(Error::Config("need --config or --preset".into())),
    };
    if let Some(s) = run.seed {
        cfg.seed = s;
    }
    cfg.seed = resolve_seed(cfg.seed);
    if let Some(t) = run.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn parse_bracket(s: &str) -> Result<(f64, f64, f64)> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| Error::Config(format!("bad bracket value {x:?}"))))
        .collect::<Result<_>>()?;
    match v[..] {
        [lo, hi] => Ok((lo, hi, 0.25)),
        [lo, hi, tol] => Ok((lo, hi, tol)),
        _ => Err(Error::Config(format!("--bisect wants lo,hi[,tol], got {s:?}"))),
    }
}

fn parse_grid(s: &str) -> Result<(usize, usize)> {
    let bad = || Error::Config(format!("--grid wants DxR, got {s:?}"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(args) => {
            let cfg = load(&args)?;
            let grid = cfg.channel.ebn0_db.clone();
            let exp = Experiment::new(cfg)?;
            let rows = sweep_grid(&exp, &grid, threads(args.threads)?)?;
            let mut out = output(&args.out)?;
            write_csv(&mut out, exp.config(), &rows, args.timing)?;
            out.flush()?;
        }
        Command::Sweep { run: args, bisect: bracket } => {
            let cfg = load(&args)?;
            let workers = threads(args.threads)?;
            let exp = Experiment::new(cfg)?;
            match bracket {
                None => {
                    let rows = sweep_grid(&exp, &exp.config().channel.ebn0_db.clone(), workers)?;
                    let mut out = output(&args.out)?;
                    write_csv(&mut out, exp.config(), &rows, args.timing)?;
                    out.flush()?;
                }
                Some(b) => {
                    let (lo, hi, tol) = parse_bracket(&b)?;
                    let res = bisect(&exp, lo, hi, tol, workers)?;
                    let mut out = output(&args.out)?;
                    write_csv(&mut out, exp.config(), &res.rows, args.timing)?;
                    out.flush()?;
                    let target = exp.config().target_pe;
                    match res.outcome {
                        BisectionOutcome::Found { required_db, lo, hi } => {
                            eprintln!("required Eb/N0 for Pe <= {target}: {required_db:.3} dB (bracket [{lo:.3}, {hi:.3}])")
                        }
                        BisectionOutcome::AtOrBelowLo { lo } => eprintln!("Pe <= {target} already at {lo} dB: required Eb/N0 <= {lo}"),
                        BisectionOutcome::Unreachable { hi } => eprintln!("target Pe {target} unreachable in bracket (Pe > target at {hi} dB)"),
                        BisectionOutcome::Undetermined { lo, hi, at } => eprintln!(
                            "undetermined: CI at {at:.3} dB contains the target; last bracket [{lo:.3}, {hi:.3}]"
                        ),
                    }
                }
            }
        }
        Command::PhaseTransition { n, codebook, grid, trials, seed, stride, threads: t, out } => {
            let (d, r) = parse_grid(&grid)?;
            let mut cfg = PhaseConfig::new(n, d, r, trials, resolve_seed(seed));
            cfg.stride = stride;
            let codebook = match codebook {
                CodebookArg::Gabor => Codebook::Gabor,
                CodebookArg::Gaussian => Codebook::Gaussian,
            };
            let cells = phase_transition(&cfg, codebook, threads(t)?)?;
            let mut w = output(&out)?;
            writeln!(w, "delta,rho,m,k,successes,trials,rate")?;
            for c in cells {
                writeln!(w, "{:.4},{:.4},{},{},{},{},{:.4}", c.delta, c.rho, c.m, c.k, c.successes, c.trials, c.rate())?;
            }
            w.flush()?;
        }
        Command::VerifyExample => {
            let report = verify_example()?;
            println!("{report}");
            return Ok(report.passed());
        }
        Command::PrintConfig { preset: name } => match preset(&name) {
            Ok(cfg) => println!("{}", cfg.to_json()),
            Err(e) => return Err(Error::Config(format!("{e}; known presets: {}", preset_names().join(", ")))),
        },
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
