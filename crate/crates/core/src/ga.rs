//! Steady-state genetic algorithm whose crossover is the exact optimal
//! recombination operator.
//!
//! Each iteration selects two distinct members uniformly, recombines them
//! optimally, and lets the offspring replace one of its parents: the dearer
//! parent with probability `min((D1/D2)/a, 1)` where `D_i` is the offspring's
//! improvement over parent `i`, the cheaper parent otherwise. Small `a`
//! biases towards replacing the dearer parent (faster convergence), large `a`
//! towards replacing the cheaper one (more diversity). Since the offspring
//! never costs more than the cheaper parent, the population's best cost never
//! increases.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Instance, Schedule};
use crate::recombination::{solve_gray, RecombinationError, DEFAULT_Q_CAP};
use crate::Weight;

/// Mutation operator applied to parents ahead of recombination.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// No mutation; the replacement rule alone maintains diversity.
    None,
    /// Remove a random job and reinsert it at a random other position.
    Shift,
    /// Swap the jobs at two random positions.
    Exchange,
}

/// What to do when a recombination exceeds the block-count cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QCapFallback {
    /// Abort the run.
    Error,
    /// Use the cheaper parent as the iteration's offspring. Conservative:
    /// the population is left unchanged in cost terms.
    TruncateToParent,
}

/// Run parameters. `Default` matches the values the solver was tuned with:
/// population 30, replacement parameter 0.5, 4000 iterations, no mutation.
#[derive(Clone, Debug, PartialEq)]
pub struct GaConfig {
    /// Population size; at least 2.
    pub population_size: usize,
    /// Replacement parameter `a`; 0 always replaces the dearer parent,
    /// infinity always the cheaper.
    pub replacement_parameter: f64,
    /// Iterations to run (one crossover each).
    pub max_iterations: u64,
    /// Mutation operator.
    pub mutation: Mutation,
    /// Probability of mutating each selected parent.
    pub mutation_probability: f64,
    /// Seed; identical seeds reproduce runs exactly.
    pub rng_seed: u64,
    /// Iterations between block-count samples in the run record.
    pub stats_period: u64,
    /// Block-count cap handed to the recombination solver.
    pub q_cap: u32,
    /// Behaviour when the cap is exceeded.
    pub q_cap_fallback: QCapFallback,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 30,
            replacement_parameter: 0.5,
            max_iterations: 4000,
            mutation: Mutation::None,
            mutation_probability: 0.0,
            rng_seed: 1,
            stats_period: 400,
            q_cap: DEFAULT_Q_CAP,
            q_cap_fallback: QCapFallback::TruncateToParent,
        }
    }
}

impl GaConfig {
    fn validate(&self) -> Result<(), GaError> {
        if self.population_size < 2 {
            return Err(GaError::InvalidConfig("population size must be at least 2"));
        }
        if self.replacement_parameter.is_nan() || self.replacement_parameter < 0.0 {
            return Err(GaError::InvalidConfig(
                "replacement parameter must be nonnegative",
            ));
        }
        if self.max_iterations == 0 {
            return Err(GaError::InvalidConfig("iteration count must be positive"));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(GaError::InvalidConfig(
                "mutation probability must lie in [0, 1]",
            ));
        }
        if self.stats_period == 0 {
            return Err(GaError::InvalidConfig("stats period must be positive"));
        }
        if self.q_cap > 62 {
            return Err(GaError::InvalidConfig("block-count cap must be at most 62"));
        }
        Ok(())
    }
}

/// Fixed-size multiset of schedules plus the best schedule found so far.
#[derive(Clone, Debug)]
pub struct Population<W: Weight> {
    members: Vec<Schedule<W>>,
    best: Schedule<W>,
}

impl<W: Weight> Population<W> {
    /// Current members.
    pub fn members(&self) -> &[Schedule<W>] {
        &self.members
    }

    /// Best schedule seen since initialization.
    pub fn best(&self) -> &Schedule<W> {
        &self.best
    }
}

/// Greedy randomized construction: start from a random ordered pair of jobs,
/// then repeatedly take a random unplaced job and put it where it increases
/// the cost least (ends included; lowest slot on ties).
pub fn arbitrary_insertion<W: Weight, R: Rng + ?Sized>(
    inst: &Instance<W>,
    rng: &mut R,
) -> Schedule<W> {
    let k = inst.jobs();
    let first = rng.random_range(0..k);
    let mut second = rng.random_range(0..k - 1);
    if second >= first {
        second += 1;
    }
    let mut order = Vec::with_capacity(k);
    order.push(first);
    order.push(second);
    let mut cost = inst.setup(first, second);
    let mut unplaced: Vec<usize> = (0..k).filter(|&v| v != first && v != second).collect();
    while !unplaced.is_empty() {
        let job = unplaced.swap_remove(rng.random_range(0..unplaced.len()));
        cost += insert_at_best_slot(inst, &mut order, job);
    }
    debug_assert_eq!(inst.path_cost(&order), cost);
    Schedule::from_parts(order, cost)
}

// Slot `s` inserts before index `s`; slot `order.len()` appends. Returns the
// cost delta of the chosen slot.
fn insert_at_best_slot<W: Weight>(inst: &Instance<W>, order: &mut Vec<usize>, job: usize) -> W {
    let mut best_slot = 0;
    let mut best_delta = inst.setup(job, order[0]);
    for s in 1..order.len() {
        let (v, w) = (order[s - 1], order[s]);
        let delta = inst.setup(v, job) + inst.setup(job, w) - inst.setup(v, w);
        if delta < best_delta {
            best_delta = delta;
            best_slot = s;
        }
    }
    let append = inst.setup(*order.last().unwrap(), job);
    if append < best_delta {
        best_delta = append;
        best_slot = order.len();
    }
    order.insert(best_slot, job);
    best_delta
}

/// Draws `population_size` schedules by arbitrary insertion.
pub fn init_population<W: Weight, R: Rng + ?Sized>(
    inst: &Instance<W>,
    cfg: &GaConfig,
    rng: &mut R,
) -> Population<W> {
    let members: Vec<Schedule<W>> = (0..cfg.population_size)
        .map(|_| arbitrary_insertion(inst, rng))
        .collect();
    let mut best = members[0].clone();
    for m in &members[1..] {
        if m.cost() < best.cost() {
            best = m.clone();
        }
    }
    Population { members, best }
}

/// Picks two distinct member indices uniformly and returns them ordered by
/// cost: the first index always references the cheaper (or equal) schedule.
pub fn select_parents<W: Weight, R: Rng + ?Sized>(
    pop: &Population<W>,
    rng: &mut R,
) -> (usize, usize) {
    let r = pop.members.len();
    let i = rng.random_range(0..r);
    let mut j = rng.random_range(0..r - 1);
    if j >= i {
        j += 1;
    }
    if pop.members[j].cost() < pop.members[i].cost() {
        (j, i)
    } else {
        (i, j)
    }
}

/// Removes a uniformly random job and reinserts it at a uniformly random
/// other position.
pub fn mutate_shift<W: Weight, R: Rng + ?Sized>(
    inst: &Instance<W>,
    s: &Schedule<W>,
    rng: &mut R,
) -> Schedule<W> {
    let k = s.order().len();
    let mut order = s.order().to_vec();
    let from = rng.random_range(0..k);
    let mut to = rng.random_range(0..k - 1);
    if to >= from {
        to += 1;
    }
    let job = order.remove(from);
    order.insert(to.min(order.len()), job);
    let cost = inst.path_cost(&order);
    Schedule::from_parts(order, cost)
}

/// Swaps the jobs at two distinct uniformly random positions.
pub fn mutate_exchange<W: Weight, R: Rng + ?Sized>(
    inst: &Instance<W>,
    s: &Schedule<W>,
    rng: &mut R,
) -> Schedule<W> {
    let k = s.order().len();
    let mut order = s.order().to_vec();
    let i = rng.random_range(0..k);
    let mut j = rng.random_range(0..k - 1);
    if j >= i {
        j += 1;
    }
    order.swap(i, j);
    let cost = inst.path_cost(&order);
    Schedule::from_parts(order, cost)
}

/// Probability that the offspring replaces the dearer parent.
///
/// `delta1`/`delta2` are the offspring's cost improvements over the cheaper
/// and dearer parent; the ratio counts as 1 when both are zero. `a = 0`
/// always yields 1 and `a = infinity` always 0.
pub fn replacement_probability(delta1: f64, delta2: f64, a: f64) -> f64 {
    debug_assert!(
        delta1 >= 0.0,
        "offspring must not be worse than the cheaper parent"
    );
    debug_assert!(delta2 >= delta1, "parents must be ordered by cost");
    if a == 0.0 {
        return 1.0;
    }
    if a.is_infinite() {
        return 0.0;
    }
    let ratio = if delta2 == 0.0 { 1.0 } else { delta1 / delta2 };
    (ratio / a).min(1.0)
}

/// Lets `child` replace one of its parents: the dearer one with probability
/// [`replacement_probability`], the cheaper one otherwise. Requires
/// `child.cost() <= cost(cheaper) <= cost(dearer)`. Returns the replaced
/// slot.
pub fn apply_replacement<W: Weight, R: Rng + ?Sized>(
    pop: &mut Population<W>,
    cheaper: usize,
    dearer: usize,
    child: Schedule<W>,
    a: f64,
    rng: &mut R,
) -> usize {
    let delta1 = (pop.members[cheaper].cost() - child.cost()).to_f64();
    let delta2 = (pop.members[dearer].cost() - child.cost()).to_f64();
    let p = replacement_probability(delta1, delta2, a);
    let slot = if rng.random_bool(p) { dearer } else { cheaper };
    if child.cost() < pop.best.cost() {
        pop.best = child.clone();
    }
    pop.members[slot] = child;
    slot
}

/// Per-run trace.
#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord<W: Weight> {
    /// Seed the run was started with.
    pub seed: u64,
    /// Best cost after each iteration; non-increasing.
    pub best_cost_trace: Vec<W>,
    /// `(iteration, block count)` for the crossover of every
    /// `stats_period`-th iteration.
    pub q_samples: Vec<(u64, usize)>,
    /// Iterations executed.
    pub iterations_run: u64,
    /// Final best cost.
    pub reached: W,
}

/// Executes a full run. Reproducible: identical instance, config and seed
/// produce identical records.
pub fn run_ga<W: Weight>(inst: &Instance<W>, cfg: &GaConfig) -> Result<RunRecord<W>, GaError> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut pop = init_population(inst, cfg, &mut rng);
    let mut trace = Vec::with_capacity(cfg.max_iterations as usize);
    let mut q_samples = Vec::new();

    for t in 1..=cfg.max_iterations {
        let (cheaper, dearer) = select_parents(&pop, &mut rng);
        let crossed = if cfg.mutation == Mutation::None {
            solve_gray(inst, &pop.members[cheaper], &pop.members[dearer], cfg.q_cap)
        } else {
            let a = maybe_mutate(inst, &pop.members[cheaper], cfg, &mut rng);
            let b = maybe_mutate(inst, &pop.members[dearer], cfg, &mut rng);
            solve_gray(inst, &a, &b, cfg.q_cap)
        };
        let (child, q) = match crossed {
            Ok(res) => (res.offspring, res.q),
            Err(RecombinationError::TooManyBlocks { q, .. }) => match cfg.q_cap_fallback {
                QCapFallback::TruncateToParent => (pop.members[cheaper].clone(), q),
                QCapFallback::Error => return Err(GaError::BlocksOverCap { q, iteration: t }),
            },
            Err(e) => return Err(GaError::Recombination(e)),
        };
        if t % cfg.stats_period == 0 {
            q_samples.push((t, q));
        }

        // Without mutation the offspring never costs more than the cheaper
        // parent. Mutated parents lose that guarantee, so fall back to
        // replacing only what the offspring actually beats.
        if child.cost() <= pop.members[cheaper].cost() {
            apply_replacement(
                &mut pop,
                cheaper,
                dearer,
                child,
                cfg.replacement_parameter,
                &mut rng,
            );
        } else if child.cost() <= pop.members[dearer].cost() {
            pop.members[dearer] = child;
        }
        trace.push(pop.best.cost());
    }

    Ok(RunRecord {
        seed: cfg.rng_seed,
        best_cost_trace: trace,
        q_samples,
        iterations_run: cfg.max_iterations,
        reached: pop.best.cost(),
    })
}

fn maybe_mutate<W: Weight, R: Rng + ?Sized>(
    inst: &Instance<W>,
    s: &Schedule<W>,
    cfg: &GaConfig,
    rng: &mut R,
) -> Schedule<W> {
    if cfg.mutation_probability > 0.0 && rng.random_bool(cfg.mutation_probability) {
        match cfg.mutation {
            Mutation::Shift => mutate_shift(inst, s, rng),
            Mutation::Exchange => mutate_exchange(inst, s, rng),
            Mutation::None => s.clone(),
        }
    } else {
        s.clone()
    }
}

/// Failures of a run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GaError {
    /// A config field is out of range.
    InvalidConfig(&'static str),
    /// A recombination exceeded the block cap and the config demands an
    /// abort.
    BlocksOverCap {
        /// Block count encountered.
        q: usize,
        /// Iteration of the offending crossover.
        iteration: u64,
    },
    /// The recombination solver failed structurally.
    Recombination(RecombinationError),
}

impl fmt::Display for GaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InvalidConfig(why) => write!(f, "invalid config: {why}"),
            Self::BlocksOverCap { q, iteration } => {
                write!(
                    f,
                    "recombination at iteration {iteration} has {q} blocks, over the cap"
                )
            }
            Self::Recombination(e) => write!(f, "recombination failed: {e}"),
        }
    }
}

impl core::error::Error for GaError {}

impl From<RecombinationError> for GaError {
    fn from(e: RecombinationError) -> Self {
        Self::Recombination(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::held_karp_path;
    use crate::instance::evaluate_cost;
    use alloc::vec;
    use rand::seq::SliceRandom;

    fn random_instance(rng: &mut ChaCha8Rng, k: usize, hi: i64) -> Instance<i64> {
        let rows: Vec<Vec<i64>> = (0..k)
            .map(|_| (0..k).map(|_| rng.random_range(0..=hi)).collect())
            .collect();
        Instance::from_rows("rand", rows).unwrap()
    }

    #[test]
    fn insertion_kernel_picks_the_cheapest_slot() {
        let inst =
            Instance::from_rows("t", vec![vec![0, 1, 10], vec![5, 0, 1], vec![2, 7, 0]]).unwrap();
        let mut order = vec![0, 1];
        // Candidate deltas: prepend 2, middle 10 + 7 - 1 = 16, append 1.
        let delta = insert_at_best_slot(&inst, &mut order, 2);
        assert_eq!(delta, 1);
        assert_eq!(order, vec![0, 1, 2]);
        assert_eq!(inst.path_cost(&order), 2);
    }

    #[test]
    fn insertion_kernel_breaks_ties_towards_the_lowest_slot() {
        let inst = Instance::from_rows("flat", vec![vec![3i64; 4]; 4]).unwrap();
        let mut order = vec![0, 1];
        insert_at_best_slot(&inst, &mut order, 2);
        assert_eq!(order, vec![2, 0, 1]);
    }

    #[test]
    fn two_job_insertion_is_a_fair_coin() {
        let inst = Instance::from_rows("pair", vec![vec![0, 5], vec![3, 0]]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut starts_at_zero = 0;
        for _ in 0..1000 {
            let s = arbitrary_insertion(&inst, &mut rng);
            assert!(evaluate_cost(&inst, s.order()).is_ok());
            if s.order()[0] == 0 {
                starts_at_zero += 1;
            }
        }
        assert!((400..=600).contains(&starts_at_zero), "{starts_at_zero}");
    }

    #[test]
    fn insertion_never_beats_the_exact_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..30 {
            let k = rng.random_range(4..=9);
            let inst = random_instance(&mut rng, k, 100);
            let (opt, _) = held_karp_path(&inst).unwrap();
            let s = arbitrary_insertion(&inst, &mut rng);
            assert!(s.cost() >= opt);
        }
    }

    #[test]
    fn insertion_beats_uniform_random_orders_on_average() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let inst = random_instance(&mut rng, 10, 100);
        let mut insertion_total = 0i64;
        let mut random_total = 0i64;
        for _ in 0..200 {
            insertion_total += arbitrary_insertion(&inst, &mut rng).cost();
            let mut order: Vec<usize> = (0..10).collect();
            order.shuffle(&mut rng);
            random_total += inst.path_cost(&order);
        }
        assert!(insertion_total <= random_total);
    }

    #[test]
    fn initial_population_has_the_configured_size() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let inst = random_instance(&mut rng, 12, 50);
        let cfg = GaConfig::default();
        let pop = init_population(&inst, &cfg, &mut rng);
        assert_eq!(pop.members().len(), 30);
        let mut min = pop.members()[0].cost();
        for m in pop.members() {
            assert!(evaluate_cost(&inst, m.order()).is_ok());
            if m.cost() < min {
                min = m.cost();
            }
        }
        assert_eq!(pop.best().cost(), min);
    }

    #[test]
    fn parent_selection_is_uniform_over_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let inst = random_instance(&mut rng, 8, 50);
        let cfg = GaConfig {
            population_size: 5,
            ..GaConfig::default()
        };
        let pop = init_population(&inst, &cfg, &mut rng);
        let mut counts = [[0u32; 5]; 5];
        let draws = 100_000;
        for _ in 0..draws {
            let (a, b) = select_parents(&pop, &mut rng);
            assert!(pop.members()[a].cost() <= pop.members()[b].cost());
            counts[a.min(b)][a.max(b)] += 1;
        }
        let expected = draws as f64 / 10.0;
        let mut chi2 = 0.0;
        for i in 0..5 {
            for j in i + 1..5 {
                let diff = counts[i][j] as f64 - expected;
                chi2 += diff * diff / expected;
            }
        }
        // 0.1% critical value of chi-squared with 9 degrees of freedom.
        assert!(chi2 < 27.88, "chi2 = {chi2}");
    }

    #[test]
    fn two_members_always_form_the_unique_pair() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let inst = random_instance(&mut rng, 6, 50);
        let cfg = GaConfig {
            population_size: 2,
            ..GaConfig::default()
        };
        let pop = init_population(&inst, &cfg, &mut rng);
        for _ in 0..100 {
            let (a, b) = select_parents(&pop, &mut rng);
            assert_eq!(a.min(b), 0);
            assert_eq!(a.max(b), 1);
        }
    }

    #[test]
    fn mutations_produce_valid_permutations_with_correct_costs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let inst = random_instance(&mut rng, 8, 100);
        let base = arbitrary_insertion(&inst, &mut rng);
        for _ in 0..10_000 {
            let m = if rng.random_bool(0.5) {
                mutate_shift(&inst, &base, &mut rng)
            } else {
                mutate_exchange(&inst, &base, &mut rng)
            };
            assert_eq!(evaluate_cost(&inst, m.order()).unwrap(), m.cost());
        }
    }

    #[test]
    fn exchange_on_two_jobs_reverses_the_order() {
        let inst = Instance::from_rows("pair", vec![vec![0, 5], vec![3, 0]]).unwrap();
        let s = Schedule::new(&inst, vec![0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let m = mutate_exchange(&inst, &s, &mut rng);
        assert_eq!(m.order(), &[1, 0]);
        assert_eq!(m.cost(), 3);
    }

    #[test]
    fn replacement_probability_edge_cases() {
        assert_eq!(replacement_probability(0.0, 0.0, 0.5), 1.0);
        assert_eq!(replacement_probability(0.0, 4.0, 0.5), 0.0);
        assert_eq!(replacement_probability(3.0, 4.0, 0.0), 1.0);
        assert_eq!(replacement_probability(0.0, 0.0, f64::INFINITY), 0.0);
        assert_eq!(replacement_probability(2.0, 4.0, f64::INFINITY), 0.0);
        assert_eq!(replacement_probability(1.0, 4.0, 0.5), 0.5);
        assert_eq!(replacement_probability(3.0, 4.0, 0.5), 1.0);
    }

    // Fixture for replacement tests: members costing 5 and 8, child costing 4
    // so that delta1 / delta2 = 1/4.
    fn replacement_fixture() -> (Instance<i64>, Population<i64>, Schedule<i64>) {
        let inst =
            Instance::from_rows("t", vec![vec![0, 2, 3], vec![5, 0, 2], vec![9, 2, 0]]).unwrap();
        let p1 = Schedule::new(&inst, vec![0, 2, 1]).unwrap();
        let p2 = Schedule::new(&inst, vec![1, 0, 2]).unwrap();
        assert_eq!(p1.cost(), 5);
        assert_eq!(p2.cost(), 8);
        let child = Schedule::new(&inst, vec![0, 1, 2]).unwrap();
        assert_eq!(child.cost(), 4);
        let best = p1.clone();
        let pop = Population {
            members: vec![p1, p2],
            best,
        };
        (inst, pop, child)
    }

    #[test]
    fn replacement_frequency_follows_the_rule() {
        let (_inst, pop, child) = replacement_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let trials = 10_000;
        let mut dearer_replaced = 0;
        for _ in 0..trials {
            let mut p = pop.clone();
            if apply_replacement(&mut p, 0, 1, child.clone(), 0.5, &mut rng) == 1 {
                dearer_replaced += 1;
            }
        }
        let freq = dearer_replaced as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "freq = {freq}");
    }

    #[test]
    fn zero_parameter_always_replaces_the_dearer_parent() {
        let (_inst, pop, child) = replacement_fixture();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..50 {
            let mut p = pop.clone();
            assert_eq!(
                apply_replacement(&mut p, 0, 1, child.clone(), 0.0, &mut rng),
                1
            );
            assert_eq!(p.best().cost(), 4);
            assert_eq!(p.members().len(), 2);
        }
    }

    #[test]
    fn offspring_equal_to_the_cheaper_parent_replaces_it() {
        let (_inst, pop, _child) = replacement_fixture();
        let copy = pop.members()[0].clone();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..50 {
            let mut p = pop.clone();
            // delta1 = 0, delta2 > 0: probability 0, cheaper slot overwritten
            // by its own copy.
            assert_eq!(
                apply_replacement(&mut p, 0, 1, copy.clone(), 0.5, &mut rng),
                0
            );
            assert_eq!(p.members()[0], copy);
            assert_eq!(p.members()[1], pop.members()[1]);
        }
    }

    #[test]
    fn runs_are_reproducible_and_traces_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let inst = random_instance(&mut rng, 9, 100);
        let cfg = GaConfig {
            max_iterations: 300,
            stats_period: 50,
            rng_seed: 42,
            ..GaConfig::default()
        };
        let a = run_ga(&inst, &cfg).unwrap();
        let b = run_ga(&inst, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.best_cost_trace.len(), 300);
        assert!(a.best_cost_trace.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.reached, *a.best_cost_trace.last().unwrap());
        assert_eq!(a.q_samples.len(), 6);
        assert!(a
            .q_samples
            .iter()
            .map(|&(t, _)| t)
            .eq([50, 100, 150, 200, 250, 300]));
    }

    #[test]
    fn two_job_instances_settle_on_the_cheaper_order() {
        let inst = Instance::from_rows("pair", vec![vec![0, 5], vec![3, 0]]).unwrap();
        let mut reached_three = 0;
        for seed in 0..20 {
            let cfg = GaConfig {
                population_size: 5,
                max_iterations: 1,
                stats_period: 1,
                rng_seed: seed,
                ..GaConfig::default()
            };
            let record = run_ga(&inst, &cfg).unwrap();
            if record.reached == 3 {
                reached_three += 1;
            }
        }
        // Only an all-dearer initial population misses the optimum, at odds
        // of 2^-5 per seed.
        assert!(reached_three >= 15, "{reached_three}");
    }

    // Measured behavior of the default engine on random k=10 instances:
    // roughly a fifth to a half of seeded runs end at the exact optimum and
    // the rest settle a few percent above it. The assertions below are a
    // regression floor well under the measured rate, not an aspiration.
    #[test]
    fn finds_exact_optima_on_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let inst = random_instance(&mut rng, 10, 100);
        let (opt, _) = held_karp_path(&inst).unwrap();
        let mut hits = 0;
        let mut gap_sum = 0.0;
        for seed in 0..100 {
            let cfg = GaConfig {
                max_iterations: 2000,
                rng_seed: seed,
                ..GaConfig::default()
            };
            let record = run_ga(&inst, &cfg).unwrap();
            assert!(record.reached >= opt, "run ended below the exact optimum");
            if record.reached == opt {
                hits += 1;
            }
            gap_sum += (record.reached - opt).to_f64() / opt.to_f64();
        }
        assert!(hits >= 10, "only {hits} of 100 runs reached the optimum");
        let mean_gap = gap_sum / 100.0;
        assert!(
            mean_gap <= 0.15,
            "mean relative gap {mean_gap:.3} too large"
        );
    }

    #[test]
    fn zero_cap_fallback_keeps_the_run_alive() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let inst = random_instance(&mut rng, 8, 100);
        let cfg = GaConfig {
            q_cap: 0,
            max_iterations: 200,
            rng_seed: 7,
            ..GaConfig::default()
        };
        let record = run_ga(&inst, &cfg).unwrap();
        assert!(record.best_cost_trace.windows(2).all(|w| w[1] <= w[0]));
        assert!(record.q_samples.iter().all(|&(_, q)| q <= 4));

        let strict = GaConfig {
            q_cap_fallback: QCapFallback::Error,
            ..cfg
        };
        assert!(matches!(
            run_ga(&inst, &strict).unwrap_err(),
            GaError::BlocksOverCap { .. }
        ));
    }

    #[test]
    fn mutation_enabled_runs_stay_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let inst = random_instance(&mut rng, 9, 100);
        for mutation in [Mutation::Shift, Mutation::Exchange] {
            let cfg = GaConfig {
                mutation,
                mutation_probability: 0.3,
                max_iterations: 500,
                rng_seed: 3,
                ..GaConfig::default()
            };
            let record = run_ga(&inst, &cfg).unwrap();
            assert!(record.best_cost_trace.windows(2).all(|w| w[1] <= w[0]));
        }
    }

    #[test]
    fn config_validation() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        let inst = random_instance(&mut rng, 5, 10);
        for bad in [
            GaConfig {
                population_size: 1,
                ..GaConfig::default()
            },
            GaConfig {
                replacement_parameter: -0.5,
                ..GaConfig::default()
            },
            GaConfig {
                replacement_parameter: f64::NAN,
                ..GaConfig::default()
            },
            GaConfig {
                max_iterations: 0,
                ..GaConfig::default()
            },
            GaConfig {
                mutation_probability: 1.5,
                ..GaConfig::default()
            },
            GaConfig {
                stats_period: 0,
                ..GaConfig::default()
            },
            GaConfig {
                q_cap: 63,
                ..GaConfig::default()
            },
        ] {
            assert!(matches!(
                run_ga(&inst, &bad).unwrap_err(),
                GaError::InvalidConfig(_)
            ));
        }
    }
}
