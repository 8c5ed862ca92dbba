use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drp::engine::{RunConfig, StepsizeSchedule};
use drp::harness::{
    audit, execute, format_table, projected_gradient_oracle, Experiment, OracleOptions, Overrides,
    SvmExperiment,
};
use drp::network::Topology;
use drp::objectives::Objective;
use drp::svm::{bundled_blobs, gaussian_blobs, parse_dataset, BUNDLED_SEED, BUNDLED_SIZE};
use drp::{Error, Result};

/// Distributed random projection simulator.
#[derive(Parser)]
#[command(name = "drp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a config and write the metric trace as CSV.
    Run {
        #[command(flatten)]
        common: ConfigArgs,
        /// Trace CSV (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-agent iterate dump, written when `dump_cadence` is set.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Iterations-to-target report for the distributed SVM.
    Svm(SvmArgs),
    /// Audit a config's network, weights, stepsize and sampling.
    Check {
        #[command(flatten)]
        common: ConfigArgs,
        /// Steps over which connectivity is checked.
        #[arg(long, default_value_t = 1000)]
        horizon: usize,
    },
    /// Centralized projected-gradient reference solve of a config's problem.
    Oracle {
        #[command(flatten)]
        common: ConfigArgs,
        #[arg(long, default_value_t = 100_000)]
        iters: usize,
        /// Write the solution as one CSV row.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the synthetic two-blob dataset in the sparse text format.
    Dataset {
        #[arg(long, default_value_t = BUNDLED_SIZE)]
        n: usize,
        #[arg(long, default_value_t = BUNDLED_SEED)]
        seed: u64,
        /// Fraction of labels to flip.
        #[arg(long, default_value_t = 0.0)]
        flip: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    agents: Option<usize>,
    #[arg(long)]
    batch: Option<usize>,
    /// clique, ring or expanderD.
    #[arg(long)]
    topology: Option<String>,
    /// harmonic:A0, constant:ALPHA or power:A0:P.
    #[arg(long)]
    stepsize: Option<String>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Fail instead of warning when a convergence-condition audit fails.
    #[arg(long)]
    strict_check: bool,
}

impl ConfigArgs {
    fn load(&self) -> Result<Experiment> {
        Experiment::load(
            &self.config,
            &Overrides {
                seed: self.seed,
                agents: self.agents,
                batch: self.batch,
                topology: self.topology.clone(),
                stepsize: self.stepsize.clone(),
                max_iters: self.max_iters,
                workers: self.workers,
            },
        )
    }
}

#[derive(Args)]
struct SvmArgs {
    /// Dataset path; the bundled 200-point set if omitted.
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [2usize, 6, 10])]
    agents: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 10])]
    batch: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = ["clique".to_string(), "expander3".to_string()])]
    topology: Vec<String>,
    /// First seed; also seeds the train/test split and the calibration run.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of consecutive seeds per cell.
    #[arg(long, default_value_t = 1)]
    seeds: u64,
    #[arg(long, default_value = "harmonic:1")]
    stepsize: String,
    #[arg(long, default_value_t = 20_000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Report file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode> {
    match command {
        Command::Run { common, out, dump } => cmd_run(&common, out.as_deref(), dump.as_deref()),
        Command::Svm(args) => cmd_svm(&args),
        Command::Check { common, horizon } => cmd_check(&common, horizon),
        Command::Oracle { common, iters, out } => cmd_oracle(&common, iters, out.as_deref()),
        Command::Dataset { n, seed, flip, out } => {
            let ds = gaussian_blobs(n, seed, flip)?;
            ds.write(BufWriter::new(File::create(&out)?))?;
            println!("wrote {} examples to {}", ds.len(), out.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Runs the audit; in strict mode a failure is an error, otherwise a warning.
fn gate(config: &RunConfig, strict: bool) -> Result<()> {
    let report = audit(config, 1000);
    if report.passed() {
        return Ok(());
    }
    for item in report.failures() {
        eprintln!("warning: audit failed: {}: {}", item.clause, item.detail);
    }
    if strict {
        return Err(Error::InvalidConfig("convergence-condition audit failed".into()));
    }
    Ok(())
}

fn cmd_run(args: &ConfigArgs, out: Option<&Path>, dump: Option<&Path>) -> Result<ExitCode> {
    let exp = args.load()?;
    gate(&exp.config, args.strict_check)?;
    let evaluator = exp.svm.as_ref().map(|s| {
        move |x: &drp::geometry::Point| drp::svm::accuracy(&s.problem.weights(x)?, &s.test, s.problem.bias())
    });
    let eval_ref = evaluator.as_ref().map(|e| e as drp::harness::Evaluator);
    let result = execute(&exp.config, &exp.rule, eval_ref)?;
    let trace = &result.trace;
    for w in &trace.warnings {
        eprintln!("warning: {w}");
    }
    trace.write_csv(output(out)?)?;
    if let Some(path) = dump {
        trace.write_iterates_csv(BufWriter::new(File::create(path)?))?;
    }
    if let Some(last) = trace.last() {
        eprintln!(
            "{:?} after {} iterations; f(xbar) = {}, disagreement = {:e}",
            trace.verdict, last.k, last.objective, last.max_disagreement
        );
    }
    if let Some(stop) = result.stop {
        eprintln!("{} fired at k = {}", exp.rule, stop.k);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(args: &ConfigArgs, horizon: usize) -> Result<ExitCode> {
    let exp = args.load()?;
    let report = audit(&exp.config, horizon);
    print!("{report}");
    for w in exp.config.warnings() {
        println!("note  {w}");
    }
    if report.passed() {
        println!("all audits passed");
        Ok(ExitCode::SUCCESS)
    } else if args.strict_check {
        eprintln!("error: {} audit(s) failed", report.failures().count());
        Ok(ExitCode::from(2))
    } else {
        println!("{} audit(s) failed", report.failures().count());
        Ok(ExitCode::SUCCESS)
    }
}

fn cmd_oracle(args: &ConfigArgs, iters: usize, out: Option<&Path>) -> Result<ExitCode> {
    let exp = args.load()?;
    let parts: Vec<Objective> = exp.config.agents.iter().map(|a| a.objective().clone()).collect();
    let total = Objective::total(&parts)?;
    let set = exp.config.feasible_set()?;
    let mut options = OracleOptions::for_objective(&total);
    options.max_iters = iters;
    let sol = projected_gradient_oracle(&total, &set, &options)?;
    println!("f* = {}", sol.value);
    println!("gradient mapping norm = {:e}", sol.gradient_mapping_norm);
    println!("iterations = {}", sol.iterations);
    println!("converged = {}", sol.converged);
    if let Some(path) = out {
        let mut w = csv::Writer::from_writer(File::create(path)?);
        w.write_record(sol.point.to_dense().iter().map(f64::to_string))?;
        w.flush()?;
    }
    if !sol.converged {
        eprintln!("warning: reference solve did not converge");
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_svm(args: &SvmArgs) -> Result<ExitCode> {
    let ds = match &args.dataset {
        Some(p) => parse_dataset(p)?,
        None => bundled_blobs(),
    };
    let topologies = args
        .topology
        .iter()
        .map(|t| t.parse::<Topology>())
        .collect::<Result<Vec<_>>>()?;
    let mut exp = SvmExperiment::new(&ds, args.seed)?;
    exp.c = args.c;
    exp.settings.stepsize = args.stepsize.parse::<StepsizeSchedule>()?;
    exp.settings.max_iters = args.max_iters;
    exp.settings.workers = args.workers;

    let calibration = exp.calibrate(args.seed)?;
    let seeds: Vec<u64> = (args.seed..args.seed + args.seeds.max(1)).collect();
    let cells = exp.table(calibration.t_acc, &args.agents, &topologies, &args.batch, &seeds)?;

    let mut w = output(args.out.as_deref())?;
    writeln!(w, "train = {}, test = {}, C = {}", exp.train().len(), exp.test().len(), exp.c)?;
    writeln!(
        w,
        "centralized: stopped at k = {}, f = {}",
        calibration
            .stopped_at
            .map_or_else(|| "-".to_string(), |k| k.to_string()),
        calibration.objective
    )?;
    write!(w, "{}", format_table(calibration.t_acc, &cells))?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}
