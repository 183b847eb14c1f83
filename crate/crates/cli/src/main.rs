//! `orsched` — seeded experiment batches, exact tools and a recombination
//! probe for single-machine scheduling with sequence-dependent setup times.

use clap::{Parser, Subcommand, ValueEnum};
use orsched_cli::report::{good_q_threshold, q_pred, run_batch, write_batch_csvs, BatchReport};
use orsched_cli::{
    exit_code, format_order_1based, load_instance, parse_permutation_1based, CliError,
};
use orsched_core::exact::{export_ilp, held_karp_path, ExactError, HELD_KARP_MAX_JOBS};
use orsched_core::ga::{GaConfig, Mutation};
use orsched_core::instance::{Instance, ParsedInstance, Schedule};
use orsched_core::recombination::{solve_bruteforce, solve_gray, RecombinationProblem};
use orsched_core::Weight;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "orsched",
    version,
    about = "Setup-time scheduling solvers and experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
enum MutationArg {
    None,
    Shift,
    Exchange,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch of independent seeded GA runs and write CSV reports.
    Solve {
        /// TSPLIB instance file.
        #[arg(long)]
        instance: PathBuf,
        /// Number of independent runs (seeds seed, seed+1, ...).
        #[arg(long, default_value_t = 1)]
        runs: usize,
        /// Iterations per run.
        #[arg(long, default_value_t = 4000)]
        iters: u64,
        /// Population size.
        #[arg(long, default_value_t = 30)]
        pop: usize,
        /// Replacement parameter `a` (0 = always replace the dearer parent).
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Base RNG seed.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Iterations between block-count samples.
        #[arg(long, default_value_t = 400)]
        stats_period: u64,
        /// Known optimum; enables the hit counter.
        #[arg(long)]
        target: Option<String>,
        /// Mutation operator applied to copies of the parents.
        #[arg(long, value_enum, default_value_t = MutationArg::None)]
        mutation: MutationArg,
        /// Probability of mutating each selected parent.
        #[arg(long, default_value_t = 1.0)]
        mutation_prob: f64,
        /// Directory receiving summary.csv, dynamics.csv and runs/.
        #[arg(long, default_value = "results")]
        out_dir: PathBuf,
    },
    /// Solve exactly (small instances) or export the 0/1 programming model.
    Exact {
        /// TSPLIB instance file.
        #[arg(long)]
        instance: PathBuf,
        /// Write the LP-format model here (implied for large instances).
        #[arg(long)]
        lp_out: Option<PathBuf>,
    },
    /// Recombine two explicit parent schedules and report the block structure.
    Or {
        /// TSPLIB instance file.
        #[arg(long)]
        instance: PathBuf,
        /// File with two whitespace-separated 1-based permutations.
        #[arg(long)]
        parents: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Solve {
            instance,
            runs,
            iters,
            pop,
            alpha,
            seed,
            stats_period,
            target,
            mutation,
            mutation_prob,
            out_dir,
        } => cmd_solve(
            &instance,
            runs,
            iters,
            pop,
            alpha,
            seed,
            stats_period,
            target.as_deref(),
            mutation,
            mutation_prob,
            &out_dir,
        ),
        Command::Exact { instance, lp_out } => cmd_exact(&instance, lp_out.as_deref()),
        Command::Or { instance, parents } => cmd_or(&instance, &parents),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_solve(
    instance: &std::path::Path,
    runs: usize,
    iters: u64,
    pop: usize,
    alpha: f64,
    seed: u64,
    stats_period: u64,
    target: Option<&str>,
    mutation: MutationArg,
    mutation_prob: f64,
    out_dir: &std::path::Path,
) -> Result<(), CliError> {
    if runs == 0 {
        return Err(CliError::Config("need at least one run".into()));
    }
    let mutation = match mutation {
        MutationArg::None => Mutation::None,
        MutationArg::Shift => Mutation::Shift,
        MutationArg::Exchange => Mutation::Exchange,
    };
    let cfg = GaConfig {
        population_size: pop,
        replacement_parameter: alpha,
        max_iterations: iters,
        mutation,
        mutation_probability: if matches!(mutation, Mutation::None) {
            0.0
        } else {
            mutation_prob
        },
        rng_seed: seed,
        stats_period,
        ..GaConfig::default()
    };
    match load_instance(instance)? {
        ParsedInstance::Int(inst) => {
            let target = target
                .map(|t| t.parse::<i64>().map_err(|_| bad_target(t)))
                .transpose()?;
            let report = batch(&inst, &cfg, runs, target)?;
            write_batch_csvs(&report, out_dir)?;
            print_batch(&report, out_dir);
            Ok(())
        }
        ParsedInstance::Float(inst) => {
            let target = target
                .map(|t| t.parse::<f64>().map_err(|_| bad_target(t)))
                .transpose()?;
            let report = batch(&inst, &cfg, runs, target)?;
            write_batch_csvs(&report, out_dir)?;
            print_batch(&report, out_dir);
            Ok(())
        }
    }
}

fn bad_target(t: &str) -> CliError {
    CliError::Config(format!("target {t:?} is not a number"))
}

fn batch<W: Weight + Send + Sync>(
    inst: &Instance<W>,
    cfg: &GaConfig,
    runs: usize,
    target: Option<W>,
) -> Result<BatchReport<W>, CliError> {
    run_batch(inst, cfg, runs, target).map_err(|e| CliError::Solver(e.to_string()))
}

fn print_batch<W: Weight>(report: &BatchReport<W>, out_dir: &std::path::Path) {
    let best = report
        .runs
        .iter()
        .map(|r| r.reached)
        .min_by(|a, b| a.partial_cmp(b).expect("costs are finite"))
        .expect("at least one run");
    println!("instance       {}", report.instance);
    println!("jobs           {}", report.k);
    println!("runs           {}", report.runs.len());
    println!("iterations     {}", report.config.max_iterations);
    println!("best reached   {best}");
    match report.target {
        Some(t) => {
            println!("target         {t}");
            println!("n_opt          {} of {}", report.n_opt, report.runs.len());
        }
        None => println!("target         (none supplied)"),
    }
    println!("t_avg          {:.4} s/run", report.t_avg);
    match report.t_avg_to_opt() {
        Some(t) => println!("t_avg_to_opt   {t:.4} s"),
        None => println!("t_avg_to_opt   n/a (no run reached the target)"),
    }
    println!("q_pred         {}", q_pred(report.k));
    println!("good-q bound   {:.3}", good_q_threshold(report.k));
    if let (Some(&(it0, q0)), Some(&(itn, qn))) = (report.q_avg.first(), report.q_avg.last()) {
        println!("q_avg          {q0:.3} @ {it0} -> {qn:.3} @ {itn}");
    }
    if let (Some(&(_, d0)), Some(&(_, dn))) = (report.delta_good.first(), report.delta_good.last())
    {
        println!("delta_good     {d0:.3} -> {dn:.3}");
    }
    println!("reports        {}", out_dir.display());
}

fn cmd_exact(instance: &std::path::Path, lp_out: Option<&std::path::Path>) -> Result<(), CliError> {
    let parsed = load_instance(instance)?;
    match parsed {
        ParsedInstance::Int(inst) => exact_impl(&inst, instance, lp_out),
        ParsedInstance::Float(inst) => exact_impl(&inst, instance, lp_out),
    }
}

fn exact_impl<W: Weight>(
    inst: &Instance<W>,
    instance_path: &std::path::Path,
    lp_out: Option<&std::path::Path>,
) -> Result<(), CliError> {
    let k = inst.jobs();
    if k <= HELD_KARP_MAX_JOBS {
        match held_karp_path(inst) {
            Ok((cost, order)) => {
                println!("instance  {}", inst.name());
                println!("jobs      {k}");
                println!("optimum   {cost}");
                println!("order     {}", format_order_1based(&order));
            }
            Err(e @ ExactError::TooManyJobs { .. }) => return Err(CliError::Solver(e.to_string())),
            Err(e) => return Err(CliError::Solver(e.to_string())),
        }
        if let Some(path) = lp_out {
            std::fs::write(path, export_ilp(inst, &[]))?;
            println!("model     {}", path.display());
        }
        return Ok(());
    }
    let default_path = instance_path.with_extension("lp");
    let path = lp_out.unwrap_or(&default_path);
    std::fs::write(path, export_ilp(inst, &[]))?;
    println!("instance  {}", inst.name());
    println!("jobs      {k} (exceeds the in-process exact limit of {HELD_KARP_MAX_JOBS})");
    println!("model     {}", path.display());
    println!();
    println!("Solve the model with any MILP solver. If the reported x-arcs");
    println!("contain a cycle that avoids the single y-arc, append the");
    println!("corresponding subtour cut and re-solve until none remain.");
    Ok(())
}

fn cmd_or(instance: &std::path::Path, parents: &std::path::Path) -> Result<(), CliError> {
    let parsed = load_instance(instance)?;
    let text = std::fs::read_to_string(parents)?;
    match parsed {
        ParsedInstance::Int(inst) => or_impl(&inst, &text),
        ParsedInstance::Float(inst) => or_impl(&inst, &text),
    }
}

fn or_impl<W: Weight>(inst: &Instance<W>, parents_text: &str) -> Result<(), CliError> {
    let k = inst.jobs();
    let tokens: Vec<&str> = parents_text.split_whitespace().collect();
    if tokens.len() != 2 * k {
        return Err(CliError::Config(format!(
            "parent file must hold two {k}-job permutations ({} tokens found)",
            tokens.len()
        )));
    }
    let o1 = parse_permutation_1based(&tokens[..k], k)?;
    let o2 = parse_permutation_1based(&tokens[k..], k)?;
    let p1 = Schedule::new(inst, o1).map_err(|e| CliError::Config(e.to_string()))?;
    let p2 = Schedule::new(inst, o2).map_err(|e| CliError::Config(e.to_string()))?;
    let problem =
        RecombinationProblem::new(inst, &p1, &p2).map_err(|e| CliError::Solver(e.to_string()))?;
    let q = problem.q();
    let specials = problem.structure().special_edges().len();
    let result = solve_gray(inst, &p1, &p2, orsched_core::recombination::DEFAULT_Q_CAP)
        .map_err(|e| CliError::Solver(e.to_string()))?;
    println!("jobs            {k}");
    println!("parent 1 cost   {}", p1.cost());
    println!("parent 2 cost   {}", p2.cost());
    println!("special edges   {specials}");
    println!("blocks q        {q}");
    println!("solutions       {}", result.solutions_enumerated);
    println!("offspring cost  {}", result.offspring.cost());
    println!(
        "offspring       {}",
        format_order_1based(result.offspring.order())
    );
    if q as u32 <= orsched_core::recombination::BRUTEFORCE_Q_CAP {
        let brute =
            solve_bruteforce(inst, &p1, &p2).map_err(|e| CliError::Solver(e.to_string()))?;
        let agree = brute.offspring.cost() == result.offspring.cost();
        println!("oracle check    {}", if agree { "pass" } else { "FAIL" });
        if !agree {
            return Err(CliError::Solver(format!(
                "enumeration disagrees with brute force: {} vs {}",
                result.offspring.cost(),
                brute.offspring.cost()
            )));
        }
    } else {
        println!("oracle check    skipped (q over the brute-force cap)");
    }
    Ok(())
}
