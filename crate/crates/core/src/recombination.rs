//! Optimal recombination of two parent schedules.
//!
//! Given parents `p1`, `p2`, the operator returns a minimum-cost permutation
//! that inherits, at every position, the job of one of the two parents. The
//! search space is structured by a bipartite graph between positions and
//! jobs holding the edges `(i, p1[i])` and `(i, p2[i])`: positions where the
//! parents agree contribute forced edges, and the remaining components are
//! even cycles ("blocks"), each admitting exactly two perfect matchings. A
//! candidate solution is therefore a choice of one matching per block, giving
//! `2^q` candidates for `q` blocks.
//!
//! The solver sweeps all candidates in reflected-Gray-code order. A sweep
//! step flips a single block, so the objective is maintained incrementally
//! from precomputed contact sums: per block, the cost its two matchings
//! induce on the boundary to fixed positions and inside the block; per pair
//! of adjacent blocks, the four cross combinations. A full sweep is
//! `O(q * 2^q)` after an `O(k)` setup, and degenerates to a single evaluation
//! when the parents agree everywhere.

use alloc::vec::Vec;
use core::fmt;

use crate::instance::{is_permutation, Instance, Schedule};
use crate::Weight;

/// Per-position allowed-job sets induced by two parents.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Prescription {
    /// Parents agree; the job is forced.
    Single(usize),
    /// Parents disagree; either job may be chosen.
    Pair {
        /// Job of the first parent.
        a: usize,
        /// Job of the second parent.
        b: usize,
    },
}

/// The list of allowed-job sets, one per position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrescriptionSystem {
    k: usize,
    sets: Vec<Prescription>,
}

impl PrescriptionSystem {
    /// Number of positions.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Allowed-job set at position `i`.
    pub fn set(&self, i: usize) -> &Prescription {
        &self.sets[i]
    }

    /// Whether `job` may occupy position `i`.
    pub fn allows(&self, i: usize, job: usize) -> bool {
        match self.sets[i] {
            Prescription::Single(a) => a == job,
            Prescription::Pair { a, b } => a == job || b == job,
        }
    }

    fn parent_orders(&self) -> (Vec<usize>, Vec<usize>) {
        let mut p1 = Vec::with_capacity(self.k);
        let mut p2 = Vec::with_capacity(self.k);
        for set in &self.sets {
            match *set {
                Prescription::Single(a) => {
                    p1.push(a);
                    p2.push(a);
                }
                Prescription::Pair { a, b } => {
                    p1.push(a);
                    p2.push(b);
                }
            }
        }
        (p1, p2)
    }
}

/// Builds the per-position allowed-job sets from two parent permutations.
///
/// The construction guarantees the structural conditions the decomposition
/// relies on (set sizes at most two; every job in one or two sets; jobs in two
/// sets only in two-element sets), and they are re-checked defensively.
pub fn build_prescriptions(
    p1: &[usize],
    p2: &[usize],
) -> Result<PrescriptionSystem, RecombinationError> {
    if p1.len() != p2.len() {
        return Err(RecombinationError::LengthMismatch {
            left: p1.len(),
            right: p2.len(),
        });
    }
    let k = p1.len();
    if !is_permutation(k, p1) || !is_permutation(k, p2) {
        return Err(RecombinationError::NotAPermutation);
    }
    let sets: Vec<Prescription> = p1
        .iter()
        .zip(p2)
        .map(|(&a, &b)| {
            if a == b {
                Prescription::Single(a)
            } else {
                Prescription::Pair { a, b }
            }
        })
        .collect();

    let mut appearances = alloc::vec![0u8; k];
    let mut in_singleton = alloc::vec![false; k];
    for set in &sets {
        match *set {
            Prescription::Single(a) => {
                appearances[a] += 1;
                in_singleton[a] = true;
            }
            Prescription::Pair { a, b } => {
                appearances[a] += 1;
                appearances[b] += 1;
            }
        }
    }
    for job in 0..k {
        let ok = match appearances[job] {
            1 => true,
            2 => !in_singleton[job],
            _ => false,
        };
        if !ok {
            return Err(RecombinationError::Structure(
                "job appearance counts violate the prescription conditions",
            ));
        }
    }
    Ok(PrescriptionSystem { k, sets })
}

/// One cycle component of the position–job graph.
///
/// `positions` lists the component's left-side vertices in cycle order
/// starting from the smallest; the two perfect matchings assign
/// `positions[t] -> jobs0[t]` and `positions[t] -> jobs1[t]`. Matching 0 is
/// the one containing the smallest position's first-parent edge. The `P`
/// sums and neighbour tables are filled in by [`precompute_contacts`].
#[derive(Clone, Debug, PartialEq)]
pub struct Block<W: Weight> {
    positions: Vec<usize>,
    jobs0: Vec<usize>,
    jobs1: Vec<usize>,
    p_sum: [W; 2],
    neighbors: Vec<(usize, [[W; 2]; 2])>,
}

impl<W: Weight> Block<W> {
    /// Positions covered by this block, in cycle order.
    pub fn positions(&self) -> &[usize] {
        &self.positions
    }

    /// Jobs assigned by matching 0, aligned with [`Self::positions`].
    pub fn jobs0(&self) -> &[usize] {
        &self.jobs0
    }

    /// Jobs assigned by matching 1, aligned with [`Self::positions`].
    pub fn jobs1(&self) -> &[usize] {
        &self.jobs1
    }

    /// Contact sum of matching 0 against the block itself and fixed edges.
    pub fn p0(&self) -> W {
        self.p_sum[0]
    }

    /// Contact sum of matching 1 against the block itself and fixed edges.
    pub fn p1(&self) -> W {
        self.p_sum[1]
    }

    /// Cross-contact sums against each adjacent block, ascending by block id;
    /// entry `[m][m']` is the contribution when this block uses matching `m`
    /// and the neighbour uses matching `m'`.
    pub fn neighbor_contacts(&self) -> &[(usize, [[W; 2]; 2])] {
        &self.neighbors
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Owner {
    Special { job: usize },
    Block { id: usize, slot: usize },
}

/// Forced edges plus cycle blocks of the position–job graph.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteStructure<W: Weight> {
    special: Vec<(usize, usize)>,
    blocks: Vec<Block<W>>,
    owner: Vec<Owner>,
    baseline_const: W,
}

impl<W: Weight> BipartiteStructure<W> {
    /// Forced (position, job) edges, ascending by position.
    pub fn special_edges(&self) -> &[(usize, usize)] {
        &self.special
    }

    /// Cycle blocks, ascending by smallest position.
    pub fn blocks(&self) -> &[Block<W>] {
        &self.blocks
    }

    /// Number of blocks; the operator's search space holds `2^q` candidates.
    pub fn q(&self) -> usize {
        self.blocks.len()
    }
}

/// Splits the position–job graph into forced edges and cycle blocks.
///
/// Runs in time linear in the number of positions. Blocks are discovered by
/// walking the alternating cycles; a component that is not an even cycle with
/// at least two positions cannot arise from two permutations and is reported
/// as a structure error.
pub fn decompose<W: Weight>(
    sys: &PrescriptionSystem,
) -> Result<BipartiteStructure<W>, RecombinationError> {
    let k = sys.k();
    let (p1, p2) = sys.parent_orders();
    let mut pos2 = alloc::vec![0usize; k];
    for (i, &job) in p2.iter().enumerate() {
        pos2[job] = i;
    }

    let mut special = Vec::new();
    let mut owner = alloc::vec![Owner::Special { job: usize::MAX }; k];
    let mut blocks = Vec::new();
    let mut visited = alloc::vec![false; k];

    for start in 0..k {
        match *sys.set(start) {
            Prescription::Single(job) => {
                special.push((start, job));
                owner[start] = Owner::Special { job };
            }
            Prescription::Pair { .. } => {
                if visited[start] {
                    continue;
                }
                let id = blocks.len();
                let mut positions = Vec::new();
                let mut jobs0 = Vec::new();
                let mut jobs1 = Vec::new();
                let mut at = start;
                loop {
                    if visited[at] || matches!(sys.set(at), Prescription::Single(_)) {
                        return Err(RecombinationError::Structure(
                            "component is not a simple alternating cycle",
                        ));
                    }
                    visited[at] = true;
                    owner[at] = Owner::Block {
                        id,
                        slot: positions.len(),
                    };
                    positions.push(at);
                    jobs0.push(p1[at]);
                    jobs1.push(p2[at]);
                    // The first-parent edge of `at` and the second-parent edge
                    // of the next position share a job: that is the step that
                    // closes the cycle.
                    at = pos2[p1[at]];
                    if at == start {
                        break;
                    }
                }
                if positions.len() < 2 {
                    return Err(RecombinationError::Structure(
                        "cycle shorter than two positions",
                    ));
                }
                blocks.push(Block {
                    positions,
                    jobs0,
                    jobs1,
                    p_sum: [W::ZERO; 2],
                    neighbors: Vec::new(),
                });
            }
        }
    }

    let covered: usize = blocks.iter().map(|b| b.positions.len()).sum::<usize>() + special.len();
    debug_assert_eq!(covered, k);
    debug_assert!(blocks.len() <= k / 2);

    Ok(BipartiteStructure {
        special,
        blocks,
        owner,
        baseline_const: W::ZERO,
    })
}

/// Fills in the contact sums the Gray-code sweep updates from.
///
/// Scans the `k - 1` consecutive position pairs once. Pairs of fixed
/// positions accumulate into a constant; pairs inside one block and pairs of
/// a block with a fixed position accumulate into that block's two `P` sums;
/// pairs spanning two blocks accumulate into the four cross sums of that
/// block pair.
pub fn precompute_contacts<W: Weight>(
    inst: &Instance<W>,
    sys: &PrescriptionSystem,
    mut structure: BipartiteStructure<W>,
) -> Result<BipartiteStructure<W>, RecombinationError> {
    if inst.jobs() != sys.k() {
        return Err(RecombinationError::LengthMismatch {
            left: inst.jobs(),
            right: sys.k(),
        });
    }

    let mut cross: alloc::collections::BTreeMap<(usize, usize), [[W; 2]; 2]> =
        alloc::collections::BTreeMap::new();

    for i in 0..sys.k() - 1 {
        let left = structure.owner[i];
        let right = structure.owner[i + 1];
        match (left, right) {
            (Owner::Special { job: a }, Owner::Special { job: b }) => {
                structure.baseline_const += inst.setup(a, b);
            }
            (Owner::Special { job: a }, Owner::Block { id, slot }) => {
                let block = &mut structure.blocks[id];
                block.p_sum[0] += inst.setup(a, block.jobs0[slot]);
                block.p_sum[1] += inst.setup(a, block.jobs1[slot]);
            }
            (Owner::Block { id, slot }, Owner::Special { job: b }) => {
                let block = &mut structure.blocks[id];
                block.p_sum[0] += inst.setup(block.jobs0[slot], b);
                block.p_sum[1] += inst.setup(block.jobs1[slot], b);
            }
            (Owner::Block { id: ia, slot: sa }, Owner::Block { id: ib, slot: sb }) => {
                if ia == ib {
                    let block = &mut structure.blocks[ia];
                    block.p_sum[0] += inst.setup(block.jobs0[sa], block.jobs0[sb]);
                    block.p_sum[1] += inst.setup(block.jobs1[sa], block.jobs1[sb]);
                } else {
                    let key = (ia.min(ib), ia.max(ib));
                    let entry = cross.entry(key).or_insert([[W::ZERO; 2]; 2]);
                    let (lo, hi) = (&structure.blocks[ia.min(ib)], &structure.blocks[ia.max(ib)]);
                    // Orient the pair as (lower id, higher id).
                    let (lo_slot, hi_slot) = if ia < ib { (sa, sb) } else { (sb, sa) };
                    let lo_jobs = [&lo.jobs0, &lo.jobs1];
                    let hi_jobs = [&hi.jobs0, &hi.jobs1];
                    for (m_lo, lo_jobs) in lo_jobs.iter().enumerate() {
                        for (m_hi, hi_jobs) in hi_jobs.iter().enumerate() {
                            let arc = if ia < ib {
                                inst.setup(lo_jobs[lo_slot], hi_jobs[hi_slot])
                            } else {
                                inst.setup(hi_jobs[hi_slot], lo_jobs[lo_slot])
                            };
                            entry[m_lo][m_hi] += arc;
                        }
                    }
                }
            }
        }
    }

    for (&(lo, hi), sums) in &cross {
        structure.blocks[lo].neighbors.push((hi, *sums));
        let transposed = [[sums[0][0], sums[1][0]], [sums[0][1], sums[1][1]]];
        structure.blocks[hi].neighbors.push((lo, transposed));
    }
    for block in &mut structure.blocks {
        block.neighbors.sort_unstable_by_key(|&(id, _)| id);
    }
    Ok(structure)
}

/// A fully preprocessed recombination instance, ready to sweep.
#[derive(Clone, Debug)]
pub struct RecombinationProblem<W: Weight> {
    p1_order: Vec<usize>,
    structure: BipartiteStructure<W>,
}

impl<W: Weight> RecombinationProblem<W> {
    /// Builds prescriptions, decomposes the graph and precomputes contacts.
    pub fn new(
        inst: &Instance<W>,
        p1: &Schedule<W>,
        p2: &Schedule<W>,
    ) -> Result<Self, RecombinationError> {
        if p1.order().len() != inst.jobs() || p2.order().len() != inst.jobs() {
            return Err(RecombinationError::LengthMismatch {
                left: p1.order().len(),
                right: p2.order().len(),
            });
        }
        let sys = build_prescriptions(p1.order(), p2.order())?;
        let structure = precompute_contacts(inst, &sys, decompose(&sys)?)?;
        Ok(Self {
            p1_order: p1.order().to_vec(),
            structure,
        })
    }

    /// Number of blocks.
    pub fn q(&self) -> usize {
        self.structure.q()
    }

    /// The underlying decomposition.
    pub fn structure(&self) -> &BipartiteStructure<W> {
        &self.structure
    }

    /// Materializes the permutation selected by `delta` (one matching choice
    /// per block; `0` picks matching 0).
    pub fn permutation_for(&self, delta: &[u8]) -> Vec<usize> {
        debug_assert_eq!(delta.len(), self.q());
        let mut order = self.p1_order.clone();
        for (block, &d) in self.structure.blocks.iter().zip(delta) {
            if d == 1 {
                for (slot, &pos) in block.positions.iter().enumerate() {
                    order[pos] = block.jobs1[slot];
                }
            }
        }
        order
    }

    /// Visits every matching combination in reflected-Gray-code order,
    /// passing the choice vector and the incrementally maintained objective.
    ///
    /// Starts from the all-zeros vector; each step flips exactly one block
    /// and adjusts the objective by that block's own sums and its cross sums
    /// with adjacent blocks.
    pub fn enumerate(&self, mut visit: impl FnMut(&[u8], W)) {
        let q = self.q();
        let blocks = &self.structure.blocks;
        let mut delta = alloc::vec![0u8; q];
        let mut cost = self.structure.baseline_const;
        for (id, block) in blocks.iter().enumerate() {
            cost += block.p_sum[0];
            for &(other, sums) in &block.neighbors {
                // Each adjacent pair contributes once.
                if other > id {
                    cost += sums[0][0];
                }
            }
        }
        visit(&delta, cost);

        let total: u64 = 1 << q;
        for step in 1..total {
            let j = step.trailing_zeros() as usize;
            let old = delta[j] as usize;
            let new = old ^ 1;
            let block = &blocks[j];
            cost -= block.p_sum[old];
            cost += block.p_sum[new];
            for &(other, sums) in &block.neighbors {
                let d_other = delta[other] as usize;
                cost -= sums[old][d_other];
                cost += sums[new][d_other];
            }
            delta[j] = new as u8;
            visit(&delta, cost);
        }
    }

    /// Best choice vector and objective over the full sweep; among equal-cost
    /// candidates the first in Gray-code order wins.
    pub fn best(&self) -> (Vec<u8>, W) {
        let mut best_cost = W::INF;
        let mut best_delta = alloc::vec![0u8; self.q()];
        self.enumerate(|delta, cost| {
            if cost < best_cost {
                best_cost = cost;
                best_delta.copy_from_slice(delta);
            }
        });
        (best_delta, best_cost)
    }
}

/// Outcome of one recombination.
#[derive(Clone, Debug, PartialEq)]
pub struct RecombinationResult<W: Weight> {
    /// The minimum-cost schedule over the operator's search space.
    pub offspring: Schedule<W>,
    /// Size of the search space, `2^q`.
    pub solutions_enumerated: u64,
    /// Number of blocks.
    pub q: usize,
}

/// Default bound on the block count accepted by [`solve_gray`].
pub const DEFAULT_Q_CAP: u32 = 30;

/// Largest block count [`solve_bruteforce`] accepts.
pub const BRUTEFORCE_Q_CAP: u32 = 20;

/// Optimal recombination via the Gray-code sweep with incremental objective
/// updates.
///
/// Refuses instances with more than `q_cap` blocks (the sweep is exponential
/// in the block count) so callers can decide on a fallback.
pub fn solve_gray<W: Weight>(
    inst: &Instance<W>,
    p1: &Schedule<W>,
    p2: &Schedule<W>,
    q_cap: u32,
) -> Result<RecombinationResult<W>, RecombinationError> {
    let problem = RecombinationProblem::new(inst, p1, p2)?;
    let q = problem.q();
    let cap = q_cap.min(62);
    if q as u64 > cap as u64 {
        return Err(RecombinationError::TooManyBlocks { q, cap });
    }
    let (delta, cost) = problem.best();
    let order = problem.permutation_for(&delta);
    debug_assert_eq!(inst.path_cost(&order), cost);
    Ok(RecombinationResult {
        offspring: Schedule::from_parts(order, cost),
        solutions_enumerated: 1u64 << q,
        q,
    })
}

/// Reference implementation: materializes every candidate permutation and
/// evaluates it from scratch. Exponentially slower per candidate than
/// [`solve_gray`]; kept as an independent oracle and for debugging.
pub fn solve_bruteforce<W: Weight>(
    inst: &Instance<W>,
    p1: &Schedule<W>,
    p2: &Schedule<W>,
) -> Result<RecombinationResult<W>, RecombinationError> {
    let problem = RecombinationProblem::new(inst, p1, p2)?;
    let q = problem.q();
    if q as u32 > BRUTEFORCE_Q_CAP {
        return Err(RecombinationError::TooManyBlocks {
            q,
            cap: BRUTEFORCE_Q_CAP,
        });
    }
    let mut best_cost = W::INF;
    let mut best_order = Vec::new();
    let mut delta = alloc::vec![0u8; q];
    for mask in 0u64..(1 << q) {
        for (j, d) in delta.iter_mut().enumerate() {
            *d = ((mask >> j) & 1) as u8;
        }
        let order = problem.permutation_for(&delta);
        let cost = inst.path_cost(&order);
        if cost < best_cost {
            best_cost = cost;
            best_order = order;
        }
    }
    Ok(RecombinationResult {
        offspring: Schedule::from_parts(best_order, best_cost),
        solutions_enumerated: 1u64 << q,
        q,
    })
}

/// Failures of the recombination operator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RecombinationError {
    /// Parent lengths (or instance size) disagree.
    LengthMismatch {
        /// First length involved.
        left: usize,
        /// Second length involved.
        right: usize,
    },
    /// A parent is not a permutation of the job set.
    NotAPermutation,
    /// The block count exceeds the configured bound.
    TooManyBlocks {
        /// Actual block count.
        q: usize,
        /// Bound that was exceeded.
        cap: u32,
    },
    /// The bipartite graph violates an invariant the construction guarantees.
    Structure(&'static str),
}

impl fmt::Display for RecombinationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::LengthMismatch { left, right } => {
                write!(f, "permutation lengths disagree: {left} vs {right}")
            }
            Self::NotAPermutation => write!(f, "parent is not a permutation of the job set"),
            Self::TooManyBlocks { q, cap } => {
                write!(
                    f,
                    "recombination too large: {q} blocks exceed the cap of {cap}"
                )
            }
            Self::Structure(why) => write!(f, "internal structure violation: {why}"),
        }
    }
}

impl core::error::Error for RecombinationError {}
