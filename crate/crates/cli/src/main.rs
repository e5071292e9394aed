use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use hgamp::engine::{brute_force_oracle, generate_tiny};
use hgamp::io::{
    gap_report, parse_instance, parse_seed_configs, serialize_canonical, write_solution,
    BksRegistry, Format, RunRecord,
};
use hgamp::model::{check_feasibility, Feasibility};
use hgamp::{run, Instance, RunParams};

#[derive(Parser)]
#[command(name = "hgamp", version, about = "Capacitated location-routing solver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance.
    Solve {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the best solution as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write a one-run gap report as CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run every instance with every seed and report gaps to best-known values.
    Bench {
        /// Instance files.
        #[arg(long = "instance", required = true, num_args = 1..)]
        instances: Vec<PathBuf>,
        #[arg(long, default_value = "auto")]
        format: String,
        /// Seeds 0..seeds.
        #[arg(long, default_value_t = 10)]
        seeds: u64,
        #[command(flatten)]
        search: SearchArgs,
        /// CSV output path; the table goes to stdout.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Alternative registry CSV with columns instance,bks,provenance.
        #[arg(long)]
        bks: Option<PathBuf>,
    },
    /// Check a solution file against an instance.
    Validate {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        solution: PathBuf,
    },
    /// Exact optimum of a tiny instance.
    Oracle {
        #[command(flatten)]
        input: InstanceArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reproducible toy instance in the canonical format.
    GenTiny {
        #[arg(long)]
        customers: usize,
        #[arg(long)]
        depots: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output path; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct InstanceArgs {
    #[arg(long)]
    instance: PathBuf,
    /// canonical, auto or a family name (prodhon).
    #[arg(long, default_value = "auto")]
    format: String,
}

impl InstanceArgs {
    fn load(&self) -> anyhow::Result<Instance> {
        load(&self.instance, &self.format)
    }
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 300_000)]
    max_iterations: u64,
    /// Wall-clock budget in seconds; the iteration budget still applies.
    #[arg(long)]
    time_limit: Option<f64>,
    #[arg(long)]
    beta: Option<usize>,
    #[arg(long)]
    gamma: Option<usize>,
    #[arg(long)]
    mu: Option<usize>,
    #[arg(long)]
    lambda: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    xi: Option<f64>,
    #[arg(long)]
    eta: Option<u64>,
    /// Depot configurations to key the subpopulations with, one per line.
    #[arg(long)]
    seed_configs: Option<PathBuf>,
}

impl SearchArgs {
    fn params(&self) -> anyhow::Result<RunParams> {
        let d = RunParams::default();
        let seed_configs = match &self.seed_configs {
            Some(p) => Some(parse_seed_configs(&read(p)?)?),
            None => None,
        };
        let params = RunParams {
            mu: self.mu.unwrap_or(d.mu),
            lambda: self.lambda.unwrap_or(d.lambda),
            alpha: self.alpha.unwrap_or(d.alpha),
            zeta: self.zeta.unwrap_or(d.zeta),
            xi: self.xi.unwrap_or(d.xi),
            eta: self.eta.unwrap_or(d.eta),
            beta: self.beta.unwrap_or(d.beta),
            gamma: self.gamma.unwrap_or(d.gamma),
            max_iterations: Some(self.max_iterations),
            time_limit: self.time_limit,
            seed_configs,
            ..d
        };
        params.validate()?;
        Ok(params)
    }
}

fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load(path: &Path, format: &str) -> anyhow::Result<Instance> {
    let format: Format = format.parse()?;
    parse_instance(path, format).with_context(|| format!("parsing {}", path.display()))
}

fn cost(c: f64) -> String {
    if c.fract() == 0.0 {
        format!("{c:.0}")
    } else {
        format!("{c:.2}")
    }
}

fn solve(
    input: &InstanceArgs,
    seed: u64,
    search: &SearchArgs,
    out: Option<&Path>,
    report: Option<&Path>,
) -> anyhow::Result<()> {
    let inst = input.load()?;
    let params = search.params()?;
    let (sol, stats) = run(&inst, &params, seed)?;
    println!(
        "{} seed {seed}: best {} after {} iterations",
        inst.name,
        cost(sol.cost),
        stats.iterations
    );
    println!("{}", serde_json::to_string_pretty(&stats)?);
    if let Some(p) = out {
        write_solution(&sol, &inst, p)?;
    }
    if let Some(p) = report {
        let rec = RunRecord {
            instance: inst.name.clone(),
            seed,
            best: sol.cost,
            time_s: stats.wall_time,
            ttb_s: stats.time_to_best,
        };
        std::fs::write(p, gap_report(&[rec], &BksRegistry::bundled()).to_csv()?)?;
    }
    Ok(())
}

fn threads() -> anyhow::Result<Option<usize>> {
    match std::env::var("HGAMP_THREADS") {
        Ok(v) => Ok(Some(
            v.parse()
                .context("HGAMP_THREADS must be a positive integer")?,
        )),
        Err(_) => Ok(None),
    }
}

fn bench(
    paths: &[PathBuf],
    format: &str,
    seeds: u64,
    search: &SearchArgs,
    report: Option<&Path>,
    bks: Option<&Path>,
) -> anyhow::Result<()> {
    let params = search.params()?;
    let instances: Vec<Instance> = paths
        .iter()
        .map(|p| load(p, format))
        .collect::<anyhow::Result<_>>()?;
    for inst in &instances {
        inst.ensure_feasible()?;
    }
    let registry = match bks {
        Some(p) => BksRegistry::from_reader(std::fs::File::open(p)?)?,
        None => BksRegistry::bundled(),
    };
    let jobs: Vec<(&Instance, u64)> = instances
        .iter()
        .flat_map(|i| (0..seeds).map(move |s| (i, s)))
        .collect();
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads()? {
        pool = pool.num_threads(t.max(1));
    }
    let records: Vec<RunRecord> = pool.build()?.install(|| {
        jobs.par_iter()
            .map(|&(inst, seed)| {
                let (sol, stats) = run(inst, &params, seed)?;
                Ok(RunRecord {
                    instance: inst.name.clone(),
                    seed,
                    best: sol.cost,
                    time_s: stats.wall_time,
                    ttb_s: stats.time_to_best,
                })
            })
            .collect::<hgamp::Result<_>>()
    })?;
    let rep = gap_report(&records, &registry);
    print!("{}", rep.to_table());
    let csv = rep.to_csv()?;
    match report {
        Some(p) => std::fs::write(p, csv)?,
        None => print!("{csv}"),
    }
    Ok(())
}

/// Returns false when the solution violates a capacity.
fn validate(input: &InstanceArgs, solution: &Path) -> anyhow::Result<bool> {
    let inst = input.load()?;
    let sol = hgamp::io::solution_from_json(&read(solution)?, &inst)?;
    match check_feasibility(&sol, &inst) {
        Feasibility::Feasible => {
            println!("feasible, cost {}", cost(sol.cost));
            Ok(true)
        }
        Feasibility::Violated {
            depot_overload,
            route_overload,
            structural,
        } => {
            println!(
                "infeasible, cost {}: depot overload {depot_overload}, route overload {route_overload}{}",
                cost(sol.cost),
                structural.map(|s| format!(", {s}")).unwrap_or_default()
            );
            Ok(false)
        }
    }
}

fn oracle(input: &InstanceArgs, out: Option<&Path>) -> anyhow::Result<()> {
    let inst = input.load()?;
    let (opt, sol) = brute_force_oracle(&inst)?;
    println!("optimum {}", cost(opt));
    if let Some(p) = out {
        write_solution(&sol, &inst, p)?;
    }
    Ok(())
}

fn gen_tiny(customers: usize, depots: usize, seed: u64, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serialize_canonical(&generate_tiny(customers, depots, seed)?);
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn execute(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Solve {
            input,
            seed,
            search,
            out,
            report,
        } => solve(&input, seed, &search, out.as_deref(), report.as_deref()).map(|_| true),
        Command::Bench {
            instances,
            format,
            seeds,
            search,
            report,
            bks,
        } => bench(
            &instances,
            &format,
            seeds,
            &search,
            report.as_deref(),
            bks.as_deref(),
        )
        .map(|_| true),
        Command::Validate { input, solution } => validate(&input, &solution),
        Command::Oracle { input, out } => oracle(&input, out.as_deref()).map(|_| true),
        Command::GenTiny {
            customers,
            depots,
            seed,
            out,
        } => gen_tiny(customers, depots, seed, out.as_deref()).map(|_| true),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let infeasible = e.chain().any(|c| {
                matches!(
                    c.downcast_ref::<hgamp::Error>(),
                    Some(hgamp::Error::InfeasibleInstance(_))
                )
            });
            ExitCode::from(if infeasible { 2 } else { 1 })
        }
    }
}
