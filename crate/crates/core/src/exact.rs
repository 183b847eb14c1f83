//! Exact machinery: Held–Karp dynamic programming for small instances and an
//! assignment-based 0/1 programming model with subtour-cut generation for the
//! rest.
//!
//! The model is exported in LP text format for an external MILP solver; this
//! crate never solves the integer program itself. The intended loop is: solve
//! the exported model, feed the arc assignment back as an
//! [`AssignmentSolution`], call [`find_subtours`], append the resulting cuts
//! via [`IlpModel::add_cut`], re-export, and repeat until no subtour remains.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::instance::{is_permutation, Instance};
use crate::Weight;

/// Failures of the exact solvers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactError {
    /// The dynamic program would need more memory than the guard allows.
    TooManyJobs {
        /// Requested job count.
        k: usize,
        /// Largest supported job count.
        max: usize,
    },
    /// The successor map of an assignment solution is not a permutation.
    NotAPermutation,
    /// The closing arc is not part of the arc assignment.
    ClosingArcNotSelected {
        /// Arc tail.
        from: usize,
        /// Arc head.
        to: usize,
    },
    /// A cut was requested for a vertex set that cannot form a subtour.
    BadCutSet(&'static str),
}

impl fmt::Display for ExactError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooManyJobs { k, max } => {
                write!(f, "dynamic program supports at most {max} jobs, got {k}")
            }
            Self::NotAPermutation => write!(f, "successor map is not a permutation"),
            Self::ClosingArcNotSelected { from, to } => {
                write!(
                    f,
                    "closing arc ({from}, {to}) is not selected in the assignment"
                )
            }
            Self::BadCutSet(why) => write!(f, "invalid cut set: {why}"),
        }
    }
}

impl core::error::Error for ExactError {}

/// Hard limit for [`held_karp_path`]; the state table for `k` jobs holds
/// `k * 2^k` entries.
pub const HELD_KARP_MAX_JOBS: usize = 22;

/// Exact minimum-setup-cost order over all permutations, by dynamic
/// programming over (job subset, first job) states.
///
/// Among all optimal orders the lexicographically smallest one is returned.
pub fn held_karp_path<W: Weight>(inst: &Instance<W>) -> Result<(W, Vec<usize>), ExactError> {
    let k = inst.jobs();
    if k > HELD_KARP_MAX_JOBS {
        return Err(ExactError::TooManyJobs {
            k,
            max: HELD_KARP_MAX_JOBS,
        });
    }

    // h[mask * k + v] = least cost of a path that starts at v and visits
    // exactly the jobs in mask (v included).
    let full: usize = (1 << k) - 1;
    let mut h = alloc::vec![W::INF; (full + 1) * k];
    for v in 0..k {
        h[(1 << v) * k + v] = W::ZERO;
    }
    for mask in 1..=full {
        if mask.count_ones() < 2 {
            continue;
        }
        for v in 0..k {
            if mask & (1 << v) == 0 {
                continue;
            }
            let rest = mask ^ (1 << v);
            let mut best = W::INF;
            for u in 0..k {
                if rest & (1 << u) == 0 {
                    continue;
                }
                let tail = h[rest * k + u];
                if !(tail < W::INF) {
                    continue;
                }
                let cand = inst.setup(v, u) + tail;
                if cand < best {
                    best = cand;
                }
            }
            h[mask * k + v] = best;
        }
    }

    // Reconstruct greedily; scanning candidates in ascending index order with
    // a strict improvement test yields the lexicographically smallest optimum.
    let mut best = W::INF;
    let mut start = 0;
    for v in 0..k {
        if h[full * k + v] < best {
            best = h[full * k + v];
            start = v;
        }
    }
    let mut order = Vec::with_capacity(k);
    order.push(start);
    let mut mask = full ^ (1 << start);
    let mut at = start;
    while mask != 0 {
        let mut cand_cost = W::INF;
        let mut cand = usize::MAX;
        for u in 0..k {
            if mask & (1 << u) == 0 {
                continue;
            }
            let total = inst.setup(at, u) + h[mask * k + u];
            if total < cand_cost {
                cand_cost = total;
                cand = u;
            }
        }
        order.push(cand);
        at = cand;
        mask ^= 1 << cand;
    }
    Ok((best, order))
}

/// A feasible point of the assignment relaxation: a successor permutation
/// (the selected `x` arcs) plus the single closing arc (the selected `y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssignmentSolution {
    successor: Vec<usize>,
    closing_arc: (usize, usize),
}

impl AssignmentSolution {
    /// Validates the successor map and checks that the closing arc is one of
    /// the selected arcs.
    pub fn new(successor: Vec<usize>, closing_arc: (usize, usize)) -> Result<Self, ExactError> {
        if !is_permutation(successor.len(), &successor) {
            return Err(ExactError::NotAPermutation);
        }
        let (from, to) = closing_arc;
        if from == to || from >= successor.len() || successor[from] != to {
            return Err(ExactError::ClosingArcNotSelected { from, to });
        }
        Ok(Self {
            successor,
            closing_arc,
        })
    }

    /// Selected arc out of each vertex.
    pub fn successor(&self) -> &[usize] {
        &self.successor
    }

    /// The arc marked as the path's wrap-around.
    pub fn closing_arc(&self) -> (usize, usize) {
        self.closing_arc
    }
}

/// Decomposes the arc assignment into cycles and returns every cycle that
/// does not carry the closing arc.
///
/// The cycle carrying the closing arc encodes the Hamiltonian path itself (the
/// closing arc is the wrap-around and is conceptually removed); all remaining
/// cycles are the forbidden subtours. Each returned cycle starts at its
/// smallest vertex and cycles are ordered by that vertex.
pub fn find_subtours(sol: &AssignmentSolution) -> Vec<Vec<usize>> {
    let k = sol.successor.len();
    let mut visited = alloc::vec![false; k];
    let mut subtours = Vec::new();
    for start in 0..k {
        if visited[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut at = start;
        while !visited[at] {
            visited[at] = true;
            cycle.push(at);
            at = sol.successor[at];
        }
        if !cycle.contains(&sol.closing_arc.0) {
            subtours.push(cycle);
        }
    }
    subtours
}

/// A subtour-elimination inequality: over a vertex set `C`, at most `|C| - 1`
/// of the arcs with both ends in `C` may be selected.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubtourCut {
    vertices: Vec<usize>,
}

impl SubtourCut {
    /// Vertex set of the excluded cycle, ascending.
    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    /// Right-hand side of the inequality.
    pub fn rhs(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Value of the left-hand side under a concrete arc assignment: the
    /// number of selected arcs with both ends inside the vertex set.
    pub fn lhs_value(&self, sol: &AssignmentSolution) -> usize {
        self.vertices
            .iter()
            .filter(|&&v| self.vertices.contains(&sol.successor[v]))
            .count()
    }

    /// Whether `sol` violates this inequality.
    pub fn is_violated_by(&self, sol: &AssignmentSolution) -> bool {
        self.lhs_value(sol) > self.rhs()
    }
}

/// Builds the standard subtour-elimination cut for a cycle found by
/// [`find_subtours`]. `k` is the instance's job count.
pub fn emit_cut(cycle: &[usize], k: usize) -> Result<SubtourCut, ExactError> {
    if cycle.len() < 2 {
        return Err(ExactError::BadCutSet("fewer than two vertices"));
    }
    if cycle.len() >= k {
        return Err(ExactError::BadCutSet("covers the whole vertex set"));
    }
    let mut vertices = cycle.to_vec();
    vertices.sort_unstable();
    if vertices.iter().any(|&v| v >= k) || vertices.windows(2).any(|w| w[0] == w[1]) {
        return Err(ExactError::BadCutSet("vertices out of range or repeated"));
    }
    Ok(SubtourCut { vertices })
}

/// The 0/1 programming model of the shortest-Hamiltonian-path problem.
///
/// Binary `x_i_j` selects arc `(i, j)`; the `x` arcs form a Hamiltonian cycle
/// once all subtours are cut off. Binary `y_i_j` marks the one arc of that
/// cycle excluded from the path, so the objective is the cycle cost minus the
/// excluded arc. Diagonal variables do not exist, which fixes them to zero.
#[derive(Clone, Debug)]
pub struct IlpModel<W: Weight> {
    name: String,
    k: usize,
    cost: Vec<W>,
    cuts: Vec<SubtourCut>,
}

impl<W: Weight> IlpModel<W> {
    /// Captures the instance's arc costs; starts with no cuts.
    pub fn new(inst: &Instance<W>) -> Self {
        let k = inst.jobs();
        let mut cost = Vec::with_capacity(k * k);
        for v in 0..k {
            for u in 0..k {
                cost.push(inst.setup(v, u));
            }
        }
        Self {
            name: String::from(inst.name()),
            k,
            cost,
            cuts: Vec::new(),
        }
    }

    /// Appends a subtour-elimination cut.
    pub fn add_cut(&mut self, cut: SubtourCut) {
        self.cuts.push(cut);
    }

    /// Cuts added so far, in insertion order.
    pub fn cuts(&self) -> &[SubtourCut] {
        &self.cuts
    }

    /// Number of binary variables: `2 * k * (k - 1)`.
    pub fn variable_count(&self) -> usize {
        2 * self.k * (self.k - 1)
    }

    /// Number of constraints before any cut: one out-degree and one in-degree
    /// row per vertex, one closing-arc row, and one linking row per arc.
    pub fn base_constraint_count(&self) -> usize {
        2 * self.k + 1 + self.k * (self.k - 1)
    }

    /// Renders the model in LP text format. Output is byte-identical across
    /// calls for identical inputs; vertices are printed 1-based.
    pub fn to_lp_string(&self) -> String {
        let k = self.k;
        let mut out = String::new();
        if !self.name.is_empty() {
            out.push_str("\\ shortest Hamiltonian path model for ");
            out.push_str(&self.name);
            out.push('\n');
        }
        out.push_str("Minimize\n");
        let mut objective = Vec::new();
        for v in 0..k {
            for u in 0..k {
                if v != u && self.cost[v * k + u] != W::ZERO {
                    objective.push(format_term("+", self.cost[v * k + u], 'x', v, u));
                }
            }
        }
        for v in 0..k {
            for u in 0..k {
                if v != u && self.cost[v * k + u] != W::ZERO {
                    objective.push(format_term("-", self.cost[v * k + u], 'y', v, u));
                }
            }
        }
        if objective.is_empty() {
            objective.push(alloc::format!("+ {} x_1_2", W::ZERO));
        }
        write_row(&mut out, "obj", &objective, "");

        out.push_str("Subject To\n");
        for v in 0..k {
            let terms: Vec<String> = (0..k)
                .filter(|&u| u != v)
                .map(|u| plain_term('x', v, u))
                .collect();
            write_row(&mut out, &alloc::format!("outdeg_{}", v + 1), &terms, "= 1");
        }
        for u in 0..k {
            let terms: Vec<String> = (0..k)
                .filter(|&v| v != u)
                .map(|v| plain_term('x', v, u))
                .collect();
            write_row(&mut out, &alloc::format!("indeg_{}", u + 1), &terms, "= 1");
        }
        let mut closing = Vec::new();
        for v in 0..k {
            for u in 0..k {
                if v != u {
                    closing.push(plain_term('y', v, u));
                }
            }
        }
        write_row(&mut out, "one_closing_arc", &closing, "= 1");
        for v in 0..k {
            for u in 0..k {
                if v != u {
                    let terms = alloc::vec![
                        alloc::format!("x_{}_{}", v + 1, u + 1),
                        alloc::format!("- y_{}_{}", v + 1, u + 1),
                    ];
                    write_row(
                        &mut out,
                        &alloc::format!("link_{}_{}", v + 1, u + 1),
                        &terms,
                        ">= 0",
                    );
                }
            }
        }
        for (n, cut) in self.cuts.iter().enumerate() {
            let mut terms = Vec::new();
            for &v in cut.vertices() {
                for &u in cut.vertices() {
                    if v != u {
                        terms.push(plain_term('x', v, u));
                    }
                }
            }
            write_row(
                &mut out,
                &alloc::format!("subtour_{}", n + 1),
                &terms,
                &alloc::format!("<= {}", cut.rhs()),
            );
        }

        out.push_str("Binary\n");
        for var in ['x', 'y'] {
            for v in 0..k {
                for u in 0..k {
                    if v != u {
                        out.push(' ');
                        out.push_str(&alloc::format!("{var}_{}_{}", v + 1, u + 1));
                        out.push('\n');
                    }
                }
            }
        }
        out.push_str("End\n");
        out
    }
}

/// One-call export: build the model, append `cuts`, render.
pub fn export_ilp<W: Weight>(inst: &Instance<W>, cuts: &[SubtourCut]) -> String {
    let mut model = IlpModel::new(inst);
    for cut in cuts {
        model.add_cut(cut.clone());
    }
    model.to_lp_string()
}

fn plain_term(var: char, v: usize, u: usize) -> String {
    alloc::format!("{var}_{}_{}", v + 1, u + 1)
}

fn format_term<W: Weight>(sign: &str, c: W, var: char, v: usize, u: usize) -> String {
    alloc::format!("{sign} {c} {var}_{}_{}", v + 1, u + 1)
}

// Rows are wrapped well under historical LP line-length limits; continuation
// lines are indented so they cannot be mistaken for new rows.
fn write_row(out: &mut String, label: &str, terms: &[String], rel: &str) {
    out.push(' ');
    out.push_str(label);
    out.push(':');
    let mut col = label.len() + 2;
    for (i, term) in terms.iter().enumerate() {
        let mut text = term.as_str();
        let stripped;
        if i > 0 && !(text.starts_with('+') || text.starts_with('-')) {
            stripped = alloc::format!("+ {text}");
            text = &stripped;
        }
        if col + text.len() + 1 > 76 {
            out.push_str("\n   ");
            col = 3;
        }
        out.push(' ');
        out.push_str(text);
        col += text.len() + 1;
    }
    if !rel.is_empty() {
        out.push(' ');
        out.push_str(rel);
    }
    out.push('\n');
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_instance(rng: &mut ChaCha8Rng, k: usize, hi: i64) -> Instance<i64> {
        let mut rows = Vec::new();
        for _ in 0..k {
            rows.push((0..k).map(|_| rng.random_range(0..=hi)).collect());
        }
        Instance::from_rows("rand", rows).unwrap()
    }

    fn brute_force(inst: &Instance<i64>) -> (i64, Vec<usize>) {
        let k = inst.jobs();
        let mut best = i64::MAX;
        let mut best_order = Vec::new();
        for perm in (0..k).permutations(k) {
            let cost = inst.path_cost(&perm);
            if cost < best {
                best = cost;
                best_order = perm;
            }
        }
        (best, best_order)
    }

    #[test]
    fn two_jobs_pick_the_cheaper_direction() {
        let inst = Instance::from_rows("pair", vec![vec![0, 7], vec![3, 0]]).unwrap();
        let (cost, order) = held_karp_path(&inst).unwrap();
        assert_eq!(cost, 3);
        assert_eq!(order, vec![1, 0]);
    }

    #[test]
    fn constant_weights_make_every_order_optimal() {
        let k = 6;
        let inst = Instance::from_rows("flat", vec![vec![4i64; k]; k]).unwrap();
        let (cost, order) = held_karp_path(&inst).unwrap();
        assert_eq!(cost, 4 * (k as i64 - 1));
        assert_eq!(order, vec![0, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn matches_brute_force_and_breaks_ties_lexicographically() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..60 {
            let k = rng.random_range(4..=7);
            // A small weight range forces plenty of cost ties.
            let inst = random_instance(&mut rng, k, 6);
            let (cost, order) = held_karp_path(&inst).unwrap();
            let (expected_cost, expected_order) = brute_force(&inst);
            assert_eq!(cost, expected_cost);
            assert_eq!(order, expected_order);
        }
    }

    #[test]
    fn job_count_guard() {
        let inst = Instance::from_rows("big", vec![vec![1i64; 23]; 23]).unwrap();
        assert_eq!(
            held_karp_path(&inst).unwrap_err(),
            ExactError::TooManyJobs {
                k: 23,
                max: HELD_KARP_MAX_JOBS
            }
        );
    }

    #[test]
    fn assignment_solution_checks_its_invariants() {
        assert_eq!(
            AssignmentSolution::new(vec![1, 1, 0], (0, 1)).unwrap_err(),
            ExactError::NotAPermutation
        );
        assert_eq!(
            AssignmentSolution::new(vec![1, 0, 2], (0, 2)).unwrap_err(),
            ExactError::ClosingArcNotSelected { from: 0, to: 2 }
        );
        // A fixed point in the successor map is a self-loop, which the model
        // forbids by omitting diagonal variables.
        assert_eq!(
            AssignmentSolution::new(vec![1, 0, 2], (2, 2)).unwrap_err(),
            ExactError::ClosingArcNotSelected { from: 2, to: 2 }
        );
    }

    #[test]
    fn two_cycles_one_subtour() {
        let sol = AssignmentSolution::new(vec![1, 0, 3, 2], (1, 0)).unwrap();
        assert_eq!(find_subtours(&sol), vec![vec![2, 3]]);
    }

    #[test]
    fn hamiltonian_cycle_has_no_subtours() {
        let sol = AssignmentSolution::new(vec![2, 0, 3, 1], (3, 1)).unwrap();
        assert_eq!(find_subtours(&sol), Vec::<Vec<usize>>::new());
    }

    #[test]
    fn disjoint_two_cycles() {
        let k = 8;
        let successor: Vec<usize> = (0..k).map(|v| v ^ 1).collect();
        let sol = AssignmentSolution::new(successor, (0, 1)).unwrap();
        let subtours = find_subtours(&sol);
        assert_eq!(subtours.len(), k / 2 - 1);
        assert_eq!(subtours[0], vec![2, 3]);
    }

    #[test]
    fn cut_is_violated_by_its_generator() {
        let sol = AssignmentSolution::new(vec![1, 0, 3, 2], (1, 0)).unwrap();
        let cycle = &find_subtours(&sol)[0];
        let cut = emit_cut(cycle, 4).unwrap();
        assert_eq!(cut.vertices(), &[2, 3]);
        assert_eq!(cut.rhs(), 1);
        assert_eq!(cut.lhs_value(&sol), 2);
        assert!(cut.is_violated_by(&sol));
    }

    #[test]
    fn path_encoding_satisfies_the_same_cut() {
        let cut = emit_cut(&[2, 3], 4).unwrap();
        let path = AssignmentSolution::new(vec![2, 0, 3, 1], (3, 1)).unwrap();
        assert!(!cut.is_violated_by(&path));
    }

    #[test]
    fn cut_set_bounds() {
        assert!(emit_cut(&[1], 4).is_err());
        assert!(emit_cut(&[0, 1, 2, 3], 4).is_err());
        assert!(emit_cut(&[0, 0], 4).is_err());
        assert!(emit_cut(&[0, 9], 4).is_err());
    }

    fn row_labels(lp: &str) -> Vec<&str> {
        lp.lines()
            .skip_while(|l| *l != "Subject To")
            .skip(1)
            .take_while(|l| *l != "Binary")
            .filter(|l| !l.starts_with("   "))
            .map(|l| l.trim_start().split(':').next().unwrap())
            .collect()
    }

    #[test]
    fn model_counts_for_three_jobs() {
        let inst =
            Instance::from_rows("t", vec![vec![0, 1, 2], vec![3, 0, 4], vec![5, 6, 0]]).unwrap();
        let model = IlpModel::new(&inst);
        assert_eq!(model.variable_count(), 12);
        assert_eq!(model.base_constraint_count(), 13);
        let lp = model.to_lp_string();
        assert_eq!(row_labels(&lp).len(), 13);
        let binaries = lp
            .lines()
            .skip_while(|l| *l != "Binary")
            .skip(1)
            .take_while(|l| *l != "End")
            .count();
        assert_eq!(binaries, 12);
        assert!(lp.contains(" outdeg_1: x_1_2 + x_1_3 = 1"));
        assert!(lp.contains(" link_3_2: x_3_2 - y_3_2 >= 0"));
    }

    #[test]
    fn adding_a_cut_adds_exactly_one_row() {
        let inst =
            Instance::from_rows("t", vec![vec![0, 1, 2], vec![3, 0, 4], vec![5, 6, 0]]).unwrap();
        let mut model = IlpModel::new(&inst);
        let before = model.to_lp_string();
        model.add_cut(emit_cut(&[1, 2], 3).unwrap());
        let after = model.to_lp_string();
        let removed: Vec<&str> = after.lines().filter(|l| !before.contains(*l)).collect();
        assert_eq!(removed, vec![" subtour_1: x_2_3 + x_3_2 <= 1"]);
        assert_eq!(after.lines().count(), before.lines().count() + 1);
    }

    #[test]
    fn export_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let inst = random_instance(&mut rng, 5, 50);
        let cuts = vec![emit_cut(&[0, 2], 5).unwrap()];
        assert_eq!(export_ilp(&inst, &cuts), export_ilp(&inst, &cuts));
    }
}
