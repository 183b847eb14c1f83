//! Batch aggregation and CSV emission for seeded GA experiment runs.
//!
//! Wall-clock figures are reported on stdout only; every CSV is a pure
//! function of (instance, configuration, seeds) so that repeated invocations
//! are byte-identical.

use orsched_core::ga::{GaConfig, RunRecord};
use orsched_core::instance::Instance;
use orsched_core::Weight;
use rayon::prelude::*;
use std::fmt::Write as _;
use std::io;
use std::path::Path;
use std::time::Instant;

/// Convention threshold below which an individual recombination problem
/// counts as "good": `q <= (1 + eps) * ln k` with `eps = log2(e) - 1`,
/// which simplifies to `q <= log2(k)`.
pub fn good_q_threshold(k: usize) -> f64 {
    (k as f64).log2()
}

/// Largest block count `q` whose enumeration stays within `k` candidate
/// solutions: `floor(ln k / ln 2)`.
pub fn q_pred(k: usize) -> u32 {
    (k as f64).log2().floor() as u32
}

/// Summary of a batch of independent seeded runs on one instance.
#[derive(Clone, Debug)]
pub struct BatchReport<W: Weight> {
    /// Instance identifier the batch ran on.
    pub instance: String,
    /// Job count.
    pub k: usize,
    /// Configuration shared by every run (seed field holds the base seed).
    pub config: GaConfig,
    /// Per-run records in seed order (base, base+1, ...).
    pub runs: Vec<RunRecord<W>>,
    /// Target cost the batch counts hits against, when known.
    pub target: Option<W>,
    /// Number of runs whose final best reached the target (final best <=
    /// target); zero when no target was supplied.
    pub n_opt: usize,
    /// Mean wall time per run in seconds (reporting only; never serialized).
    pub t_avg: f64,
    /// Mean block count per sampled iteration, aggregated over runs.
    pub q_avg: Vec<(u64, f64)>,
    /// Fraction of runs with a "good" (polynomially enumerable) sampled
    /// recombination problem per sampled iteration.
    pub delta_good: Vec<(u64, f64)>,
}

impl<W: Weight> BatchReport<W> {
    /// Estimated mean time to first optimum over unlimited restarts:
    /// `t_avg * runs / n_opt`. `None` when no run reached the target.
    pub fn t_avg_to_opt(&self) -> Option<f64> {
        if self.n_opt == 0 {
            None
        } else {
            Some(self.t_avg * self.runs.len() as f64 / self.n_opt as f64)
        }
    }
}

/// Runs `runs` independent GA instances with seeds `base_seed..base_seed+runs`
/// in a worker pool and aggregates them in deterministic seed order.
pub fn run_batch<W: Weight + Send + Sync>(
    inst: &Instance<W>,
    cfg: &GaConfig,
    runs: usize,
    target: Option<W>,
) -> Result<BatchReport<W>, orsched_core::ga::GaError> {
    let base_seed = cfg.rng_seed;
    let mut results: Vec<(u64, RunRecord<W>, f64)> = (0..runs as u64)
        .into_par_iter()
        .map(|i| -> Result<_, orsched_core::ga::GaError> {
            let run_cfg = GaConfig {
                rng_seed: base_seed.wrapping_add(i),
                ..cfg.clone()
            };
            let started = Instant::now();
            let record = orsched_core::ga::run_ga(inst, &run_cfg)?;
            Ok((i, record, started.elapsed().as_secs_f64()))
        })
        .collect::<Result<_, _>>()?;
    results.sort_by_key(|&(i, _, _)| i);
    let t_avg = results.iter().map(|&(_, _, t)| t).sum::<f64>() / runs.max(1) as f64;
    let records: Vec<RunRecord<W>> = results.into_iter().map(|(_, r, _)| r).collect();

    let n_opt = match target {
        Some(t) => records.iter().filter(|r| r.reached <= t).count(),
        None => 0,
    };
    let good = good_q_threshold(inst.jobs());
    let samples = records.first().map_or(0, |r| r.q_samples.len());
    let mut q_avg = Vec::with_capacity(samples);
    let mut delta_good = Vec::with_capacity(samples);
    for s in 0..samples {
        let iteration = records[0].q_samples[s].0;
        let mut sum = 0.0;
        let mut good_count = 0usize;
        for r in &records {
            let (it, q) = r.q_samples[s];
            debug_assert_eq!(it, iteration);
            sum += q as f64;
            if (q as f64) <= good {
                good_count += 1;
            }
        }
        q_avg.push((iteration, sum / records.len() as f64));
        delta_good.push((iteration, good_count as f64 / records.len() as f64));
    }

    Ok(BatchReport {
        instance: inst.name().to_string(),
        k: inst.jobs(),
        config: cfg.clone(),
        runs: records,
        target,
        n_opt,
        t_avg,
        q_avg,
        delta_good,
    })
}

fn mutation_name(cfg: &GaConfig) -> &'static str {
    match cfg.mutation {
        orsched_core::ga::Mutation::None => "none",
        orsched_core::ga::Mutation::Shift => "shift",
        orsched_core::ga::Mutation::Exchange => "exchange",
    }
}

/// One-row batch summary. Deterministic; excludes wall times.
pub fn summary_csv<W: Weight>(report: &BatchReport<W>) -> String {
    let mut out = String::from(
        "instance,k,runs,iterations,population,alpha,mutation,mutation_prob,base_seed,stats_period,target,n_opt,q_pred\n",
    );
    let cfg = &report.config;
    let target = report.target.map_or(String::new(), |t| t.to_string());
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},{},{},{},{},{}",
        report.instance,
        report.k,
        report.runs.len(),
        cfg.max_iterations,
        cfg.population_size,
        cfg.replacement_parameter,
        mutation_name(cfg),
        cfg.mutation_probability,
        cfg.rng_seed,
        cfg.stats_period,
        target,
        report.n_opt,
        q_pred(report.k),
    );
    out
}

/// Aggregated block-count dynamics, one row per sampled iteration.
pub fn dynamics_csv<W: Weight>(report: &BatchReport<W>) -> String {
    let mut out = String::from("iteration,q_avg,delta_good\n");
    for (&(it, q), &(_, d)) in report.q_avg.iter().zip(&report.delta_good) {
        let _ = writeln!(out, "{it},{q},{d}");
    }
    out
}

/// Per-run trace: best cost at every iteration, block count at sampled ones.
pub fn run_csv<W: Weight>(record: &RunRecord<W>) -> String {
    let mut out = String::from("iteration,best_cost,q\n");
    let mut samples = record.q_samples.iter().peekable();
    for (i, best) in record.best_cost_trace.iter().enumerate() {
        let iteration = i as u64 + 1;
        let q = match samples.peek() {
            Some(&&(it, q)) if it == iteration => {
                samples.next();
                q.to_string()
            }
            _ => String::new(),
        };
        let _ = writeln!(out, "{iteration},{best},{q}");
    }
    out
}

/// Writes `summary.csv`, `dynamics.csv` and `runs/<seed>.csv` under `dir`.
pub fn write_batch_csvs<W: Weight>(report: &BatchReport<W>, dir: &Path) -> io::Result<()> {
    std::fs::create_dir_all(dir.join("runs"))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(report))?;
    std::fs::write(dir.join("dynamics.csv"), dynamics_csv(report))?;
    for record in &report.runs {
        let name = format!("{}.csv", record.seed);
        std::fs::write(dir.join("runs").join(name), run_csv(record))?;
    }
    Ok(())
}
