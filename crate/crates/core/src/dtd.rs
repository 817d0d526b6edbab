//! Decision-tree decoding: best-first search over partial corrections.
//!
//! Every node of the tree is a fault set `F` together with its updated
//! syndrome `sigma_in + H F`. The driver [`dtd_decode`] repeatedly pops the
//! cheapest live node and hands it to an [`Explorer`], which picks the
//! smallest unsatisfied check and prices one child per adjacent fault not yet
//! in `F`. Fault sets are deduplicated, so no node is explored twice.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::bounds::{brute_force_height, combined_bound, BoundConfig, HeightResult};
use crate::bp::{bp_decode, BpConfig};
use crate::sparse::{DecodingProblem, FaultSet, IndexSet, Syndrome};

/// Default node cap for the BP-guided decoder.
pub const BP_DTD_NODE_CAP: usize = 50_000;

/// Node cost. `Lex` compares the bound first and the tie-break only on equality.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cost {
    Scalar(f64),
    Lex { bound: f64, tie_break: f64 },
}

impl Cost {
    pub fn primary(&self) -> f64 {
        match *self {
            Cost::Scalar(x) => x,
            Cost::Lex { bound, .. } => bound,
        }
    }

    fn secondary(&self) -> f64 {
        match *self {
            Cost::Scalar(_) => 0.0,
            Cost::Lex { tie_break, .. } => tie_break,
        }
    }
}

impl Eq for Cost {}

impl PartialOrd for Cost {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cost {
    fn cmp(&self, other: &Self) -> Ordering {
        self.primary()
            .total_cmp(&other.primary())
            .then_with(|| self.secondary().total_cmp(&other.secondary()))
    }
}

#[derive(Clone, Debug)]
pub struct TreeNode {
    pub faults: FaultSet,
    /// `sigma_in + H F`.
    pub syndrome: Syndrome,
    pub cost: Cost,
    /// `w(F)`.
    pub weight: f64,
    pub seq: u64,
}

/// Min-heap entry: cheapest cost first, FIFO among equal costs.
struct LiveEntry(TreeNode);

impl PartialEq for LiveEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for LiveEntry {}
impl PartialOrd for LiveEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for LiveEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reversed: BinaryHeap is a max-heap.
        other.0.cost.cmp(&self.0.cost).then_with(|| other.0.seq.cmp(&self.0.seq))
    }
}

/// Fault sets ever inserted into the live set.
pub type SeenSet = FxHashSet<FaultSet>;

/// A child proposed by an explorer.
#[derive(Clone, Debug)]
pub struct Child {
    pub fault: usize,
    pub syndrome: Syndrome,
    pub cost: Cost,
}

pub enum Exploration {
    Children(Vec<Child>),
    /// A complete correction for the original syndrome (early exit).
    Solved(FaultSet),
    /// The explorer could not price the children (e.g. oracle cap hit).
    Abort,
}

pub struct ExploreContext<'a> {
    pub problem: &'a DecodingProblem,
    pub seen: &'a SeenSet,
}

impl ExploreContext<'_> {
    /// The smallest unsatisfied check and the faults next to it not already in `F`
    /// and not leading to an already seen fault set.
    pub fn candidates(&self, node: &TreeNode) -> Vec<usize> {
        let i = check_selection(&node.syndrome);
        self.problem
            .check
            .row(i)
            .iter()
            .map(|&j| j as usize)
            .filter(|&j| !node.faults.contains(j))
            .filter(|&j| !self.seen.contains(&node.faults.with(j)))
            .collect()
    }
}

/// Exploration subroutine: prices the children of a node.
pub trait Explorer {
    fn root_cost(&self) -> Cost {
        Cost::Scalar(0.0)
    }

    fn explore(&mut self, ctx: &ExploreContext<'_>, node: &TreeNode) -> Exploration;
}

/// Smallest index in a nonempty syndrome.
pub fn check_selection(syndrome: &Syndrome) -> usize {
    syndrome.first().expect("check selection on an empty syndrome")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    NoSolution,
    CapExceeded,
    TimedOut,
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome {
    pub status: Status,
    pub correction: Option<FaultSet>,
    /// Number of explorer invocations (`nu`).
    pub explored: usize,
    pub elapsed: Duration,
    pub nodes_seen: usize,
}

impl DecodeOutcome {
    pub fn is_found(&self) -> bool {
        self.status == Status::Found
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DecodeOptions {
    /// Maximum number of explored nodes.
    pub node_cap: Option<usize>,
    /// Wall-clock budget.
    pub time_budget: Option<Duration>,
}

impl DecodeOptions {
    pub fn with_node_cap(cap: usize) -> Self {
        DecodeOptions { node_cap: Some(cap), time_budget: None }
    }
}

/// Best-first decision-tree decoder.
pub fn dtd_decode(
    problem: &DecodingProblem,
    syndrome: &Syndrome,
    explorer: &mut dyn Explorer,
    options: &DecodeOptions,
) -> DecodeOutcome {
    let start = Instant::now();
    let deadline = options.time_budget.map(|b| start + b);
    let mut seen = SeenSet::default();
    seen.insert(IndexSet::new());
    let mut live = BinaryHeap::new();
    let mut seq = 0u64;
    live.push(LiveEntry(TreeNode {
        faults: IndexSet::new(),
        syndrome: syndrome.clone(),
        cost: explorer.root_cost(),
        weight: 0.0,
        seq,
    }));
    let mut explored = 0usize;

    let finish = |status, correction, explored, seen: &SeenSet| DecodeOutcome {
        status,
        correction,
        explored,
        elapsed: start.elapsed(),
        nodes_seen: seen.len(),
    };

    while let Some(LiveEntry(node)) = live.pop() {
        debug_assert!(live.peek().is_none_or(|top| top.0.cost >= node.cost), "extracted node is not the cheapest");
        if node.syndrome.is_empty() {
            return finish(Status::Found, Some(node.faults), explored, &seen);
        }
        if options.node_cap.is_some_and(|cap| explored >= cap) {
            return finish(Status::CapExceeded, None, explored, &seen);
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            return finish(Status::TimedOut, None, explored, &seen);
        }
        explored += 1;
        let outcome = explorer.explore(&ExploreContext { problem, seen: &seen }, &node);
        match outcome {
            Exploration::Solved(correction) => {
                debug_assert_eq!(problem.check.syndrome_of(&correction), *syndrome);
                return finish(Status::Found, Some(correction), explored, &seen);
            }
            Exploration::Abort => return finish(Status::CapExceeded, None, explored, &seen),
            Exploration::Children(children) => {
                for child in children {
                    let faults = node.faults.with(child.fault);
                    if seen.contains(&faults) {
                        continue;
                    }
                    seen.insert(faults.clone());
                    seq += 1;
                    live.push(LiveEntry(TreeNode {
                        faults,
                        syndrome: child.syndrome,
                        cost: child.cost,
                        weight: node.weight + problem.weights.weight(child.fault),
                        seq,
                    }));
                }
            }
        }
    }
    finish(Status::NoSolution, None, explored, &seen)
}

/// Weighted breadth-first exploration: child cost `C + w_j`.
#[derive(Clone, Debug, Default)]
pub struct BreadthFirst;

impl Explorer for BreadthFirst {
    fn explore(&mut self, ctx: &ExploreContext<'_>, node: &TreeNode) -> Exploration {
        let h = &ctx.problem.check;
        let base = node.cost.primary();
        Exploration::Children(
            ctx.candidates(node)
                .into_iter()
                .map(|j| Child {
                    fault: j,
                    syndrome: h.flip_fault(&node.syndrome, j),
                    cost: Cost::Scalar(base + ctx.problem.weights.weight(j)),
                })
                .collect(),
        )
    }
}

/// Exact-height exploration: child cost is `h(sigma^(j))` from the
/// exhaustive oracle, searched up to `cap`.
#[derive(Clone, Debug)]
pub struct HeightOracle {
    pub cap: f64,
}

impl Explorer for HeightOracle {
    fn explore(&mut self, ctx: &ExploreContext<'_>, node: &TreeNode) -> Exploration {
        let h = &ctx.problem.check;
        let mut children = Vec::new();
        for j in ctx.candidates(node) {
            let syndrome = h.flip_fault(&node.syndrome, j);
            match brute_force_height(&syndrome, h, &ctx.problem.weights, self.cap) {
                HeightResult::Found { height, .. } => {
                    children.push(Child { fault: j, syndrome, cost: Cost::Scalar(height) })
                }
                HeightResult::NoSolution => {}
                HeightResult::CapExceeded => return Exploration::Abort,
            }
        }
        Exploration::Children(children)
    }
}

/// Height-bound exploration. Child bound cost is
/// `max(h_min(sigma^(j)) + w(F^(j)), C_parent)`; with a BP config the cost
/// becomes lexicographic with the accumulated decimated BP LPR as tie-break.
#[derive(Clone, Debug)]
pub struct HeightBound {
    pub bounds: BoundConfig,
    /// `Some` for the refined (BP tie-break) variant.
    pub bp: Option<BpConfig>,
}

impl HeightBound {
    pub fn unrefined(bounds: BoundConfig) -> Self {
        HeightBound { bounds, bp: None }
    }

    /// Refined variant with 12 BP rounds per explored node.
    pub fn refined(bounds: BoundConfig) -> Self {
        HeightBound { bounds, bp: Some(BpConfig { max_iter: 12, buffer_len: 1, ..BpConfig::default() }) }
    }
}

impl Explorer for HeightBound {
    fn root_cost(&self) -> Cost {
        match self.bp {
            None => Cost::Scalar(0.0),
            Some(_) => Cost::Lex { bound: 0.0, tie_break: 0.0 },
        }
    }

    fn explore(&mut self, ctx: &ExploreContext<'_>, node: &TreeNode) -> Exploration {
        let problem = ctx.problem;
        let h = &problem.check;
        let candidates = ctx.candidates(node);
        if candidates.is_empty() {
            return Exploration::Children(Vec::new());
        }
        let lpr = self
            .bp
            .as_ref()
            .map(|cfg| bp_decode(h, &problem.weights, &node.syndrome, &node.faults, cfg).lpr);
        let parent_bound = node.cost.primary();
        let parent_tie = match node.cost {
            Cost::Lex { tie_break, .. } => tie_break,
            Cost::Scalar(_) => 0.0,
        };
        let mut children = Vec::with_capacity(candidates.len());
        for j in candidates {
            let syndrome = h.flip_fault(&node.syndrome, j);
            let lower = combined_bound(&syndrome, h, &problem.weights, &self.bounds);
            if lower.is_infinite() {
                continue;
            }
            let bound = (lower + node.weight + problem.weights.weight(j)).max(parent_bound);
            let cost = match &lpr {
                None => Cost::Scalar(bound),
                Some(lpr) => Cost::Lex { bound, tie_break: parent_tie + lpr[j] },
            };
            children.push(Child { fault: j, syndrome, cost });
        }
        Exploration::Children(children)
    }
}

/// Bounded arctan cost increment: `(13/pi) atan(x/2 - 1) + 11/2`, mapping
/// the buffered LPR onto `(-1, 12)`.
pub fn bp_cost_increment(buffered_lpr: f64) -> f64 {
    13.0 / PI * (buffered_lpr / 2.0 - 1.0).atan() + 5.5
}

/// BP-guided exploration with early exit when decimated BP converges.
#[derive(Clone, Debug)]
pub struct BpGuided {
    /// BP settings at the root node.
    pub root: BpConfig,
    /// BP settings at every other node.
    pub node: BpConfig,
}

impl Default for BpGuided {
    fn default() -> Self {
        BpGuided {
            root: BpConfig { max_iter: 100, buffer_len: 8, ..BpConfig::default() },
            node: BpConfig { max_iter: 12, buffer_len: 8, ..BpConfig::default() },
        }
    }
}

impl Explorer for BpGuided {
    fn explore(&mut self, ctx: &ExploreContext<'_>, node: &TreeNode) -> Exploration {
        let problem = ctx.problem;
        let cfg = if node.faults.is_empty() { &self.root } else { &self.node };
        let bp = bp_decode(&problem.check, &problem.weights, &node.syndrome, &node.faults, cfg);
        if bp.converged {
            return Exploration::Solved(node.faults.union(&bp.estimate));
        }
        let base = node.cost.primary();
        Exploration::Children(
            ctx.candidates(node)
                .into_iter()
                .map(|j| Child {
                    fault: j,
                    syndrome: problem.check.flip_fault(&node.syndrome, j),
                    cost: Cost::Scalar(base + bp_cost_increment(bp.lpr_buffered[j])),
                })
                .collect(),
        )
    }
}

/// A named exploration strategy with its settings.
#[derive(Clone, Debug)]
pub enum Strategy {
    BreadthFirst,
    HeightOracle { cap: f64 },
    HeightBound(HeightBound),
    BpGuided(BpGuided),
}

impl Strategy {
    pub fn explorer(&self) -> Box<dyn Explorer> {
        match self {
            Strategy::BreadthFirst => Box::new(BreadthFirst),
            Strategy::HeightOracle { cap } => Box::new(HeightOracle { cap: *cap }),
            Strategy::HeightBound(hb) => Box::new(hb.clone()),
            Strategy::BpGuided(g) => Box::new(g.clone()),
        }
    }

    /// Node cap used when none is given explicitly.
    pub fn default_node_cap(&self) -> Option<usize> {
        match self {
            Strategy::BpGuided(_) => Some(BP_DTD_NODE_CAP),
            _ => None,
        }
    }

    pub fn decode(&self, problem: &DecodingProblem, syndrome: &Syndrome, options: &DecodeOptions) -> DecodeOutcome {
        dtd_decode(problem, syndrome, self.explorer().as_mut(), options)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::brute_force_height;
    use crate::codes::{check_coloring, color_code};
    use crate::sparse::CheckMatrix;

    fn unlimited() -> DecodeOptions {
        DecodeOptions::default()
    }

    #[test]
    fn cost_ordering() {
        assert!(Cost::Scalar(1.0) < Cost::Scalar(2.0));
        let a = Cost::Lex { bound: 3.0, tie_break: 10.0 };
        let b = Cost::Lex { bound: 4.0, tie_break: -10.0 };
        let c = Cost::Lex { bound: 3.0, tie_break: -1.0 };
        assert!(a < b);
        assert!(c < a);
    }

    #[test]
    fn check_selection_is_minimum() {
        assert_eq!(check_selection(&IndexSet::from_unsorted([7, 3])), 3);
        assert_eq!(check_selection(&IndexSet::singleton(0)), 0);
    }

    #[test]
    fn empty_syndrome_is_root_solution() {
        let code = color_code(3).unwrap();
        let out = Strategy::BreadthFirst.decode(&code.x_problem(), &IndexSet::new(), &unlimited());
        assert_eq!(out.status, Status::Found);
        assert_eq!(out.correction, Some(IndexSet::new()));
        assert_eq!(out.explored, 0);
    }

    #[test]
    fn unsatisfiable_syndrome_exhausts() {
        let h = CheckMatrix::from_dense(&[vec![1], vec![0]]);
        let problem = DecodingProblem::uniform(h, None);
        for strategy in [
            Strategy::BreadthFirst,
            Strategy::HeightBound(HeightBound::refined(BoundConfig::standard(None))),
            Strategy::BpGuided(BpGuided::default()),
        ] {
            let out = strategy.decode(&problem, &IndexSet::singleton(1), &unlimited());
            assert_eq!(out.status, Status::NoSolution, "{strategy:?}");
        }
    }

    #[test]
    fn breadth_first_children_cost() {
        let code = color_code(3).unwrap();
        let problem = code.x_problem();
        let seen = SeenSet::default();
        let node = TreeNode {
            faults: IndexSet::new(),
            syndrome: problem.check.syndrome_of(&IndexSet::singleton(0)),
            cost: Cost::Scalar(2.0),
            weight: 0.0,
            seq: 0,
        };
        let Exploration::Children(children) = BreadthFirst.explore(&ExploreContext { problem: &problem, seen: &seen }, &node)
        else {
            panic!()
        };
        assert!(!children.is_empty());
        assert!(children.iter().all(|c| c.cost == Cost::Scalar(3.0)));
    }

    #[test]
    fn dead_leaf_has_no_children() {
        let h = CheckMatrix::from_dense(&[vec![1, 1]]);
        let problem = DecodingProblem::uniform(h, None);
        let seen = SeenSet::default();
        let node = TreeNode {
            faults: IndexSet::from_unsorted([0, 1]),
            syndrome: IndexSet::singleton(0),
            cost: Cost::Scalar(0.0),
            weight: 2.0,
            seq: 0,
        };
        let Exploration::Children(children) = BreadthFirst.explore(&ExploreContext { problem: &problem, seen: &seen }, &node)
        else {
            panic!()
        };
        assert!(children.is_empty());
    }

    #[test]
    fn bp_cost_increment_values() {
        assert!((bp_cost_increment(2.0) - 5.5).abs() < 1e-12);
        assert!((bp_cost_increment(-1e12) + 1.0).abs() < 1e-9);
        assert!((bp_cost_increment(1e12) - 12.0).abs() < 1e-9);
        assert!(bp_cost_increment(-3.0) < bp_cost_increment(3.0));
    }

    #[test]
    fn steane_weight_two_breadth_first_is_minimum_weight() {
        let code = color_code(3).unwrap();
        let problem = code.x_problem();
        for a in 0..code.n {
            for b in a + 1..code.n {
                let s = problem.check.syndrome_of(&IndexSet::from_unsorted([a, b]));
                let out = Strategy::BreadthFirst.decode(&problem, &s, &unlimited());
                let c = out.correction.unwrap();
                assert_eq!(problem.check.syndrome_of(&c), s);
                let exact = brute_force_height(&s, &problem.check, &problem.weights, 7.0).height().unwrap();
                assert_eq!(c.len() as f64, exact);
            }
        }
    }

    #[test]
    fn height_oracle_explores_minimum_nodes() {
        let code = color_code(3).unwrap();
        let problem = code.x_problem();
        let s = problem.check.syndrome_of(&IndexSet::from_unsorted([1, 4]));
        let out = Strategy::HeightOracle { cap: 7.0 }.decode(&problem, &s, &unlimited());
        let c = out.correction.unwrap();
        assert_eq!(out.explored, c.len());
    }

    #[test]
    fn height_bound_single_faults_on_color_code_5() {
        let code = color_code(5).unwrap();
        let problem = code.x_problem();
        let bounds = BoundConfig::standard(check_coloring(&problem.check, 3));
        for strategy in [
            Strategy::HeightBound(HeightBound::refined(bounds.clone())),
            Strategy::HeightBound(HeightBound::unrefined(bounds.clone())),
        ] {
            for j in 0..code.n {
                let s = problem.check.syndrome_of(&IndexSet::singleton(j));
                let out = strategy.decode(&problem, &s, &unlimited());
                assert_eq!(out.correction.as_ref().map(IndexSet::len), Some(1));
            }
        }
    }

    #[test]
    fn bp_guided_early_exit_at_root() {
        let code = color_code(5).unwrap();
        let problem = code.x_problem();
        let s = problem.check.syndrome_of(&IndexSet::singleton(7));
        let out = Strategy::BpGuided(BpGuided::default()).decode(&problem, &s, &DecodeOptions::with_node_cap(BP_DTD_NODE_CAP));
        assert_eq!(out.status, Status::Found);
        assert_eq!(out.explored, 1);
        assert_eq!(problem.check.syndrome_of(out.correction.as_ref().unwrap()), s);
    }

    #[test]
    fn node_cap_is_respected() {
        let code = color_code(7).unwrap();
        let problem = code.x_problem();
        let s = problem.check.syndrome_of(&IndexSet::from_unsorted([0, 9, 20, 30]));
        let out = Strategy::BreadthFirst.decode(&problem, &s, &DecodeOptions::with_node_cap(5));
        assert_eq!(out.status, Status::CapExceeded);
        assert_eq!(out.explored, 5);
    }

    #[test]
    fn height_oracle_cap_aborts() {
        let code = color_code(5).unwrap();
        let problem = code.x_problem();
        let s = problem.check.syndrome_of(&IndexSet::from_unsorted([0, 9, 14]));
        let out = Strategy::HeightOracle { cap: 1.0 }.decode(&problem, &s, &unlimited());
        assert_eq!(out.status, Status::CapExceeded);
    }

    #[test]
    fn non_uniform_weights_prefer_cheaper_faults() {
        // Two ways to explain check 0: fault 0 (expensive) or faults 1+2 (cheap).
        let h = CheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]);
        let w = crate::sparse::WeightVector::with_weights(vec![5.0, 1.0, 1.0], vec![0.1; 3]).unwrap();
        let problem = DecodingProblem::new(h, None, w).unwrap();
        let s = IndexSet::singleton(0);
        for strategy in [Strategy::BreadthFirst, Strategy::HeightBound(HeightBound::unrefined(BoundConfig::standard(None)))] {
            let out = strategy.decode(&problem, &s, &unlimited());
            assert_eq!(out.correction, Some(IndexSet::from_unsorted([1, 2])), "{strategy:?}");
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;
        use super::Strategy;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(64))]
            #[test]
            fn corrections_are_valid_and_no_node_revisited(faults in proptest::collection::btree_set(0usize..19, 0..6)) {
                let code = color_code(5).unwrap();
                let problem = code.x_problem();
                let s = problem.check.syndrome_of(&faults.into_iter().collect());
                let bounds = BoundConfig::standard(check_coloring(&problem.check, 3));
                for strategy in [
                    Strategy::BreadthFirst,
                    Strategy::HeightBound(HeightBound::refined(bounds.clone())),
                    Strategy::HeightBound(HeightBound::unrefined(bounds.clone())),
                    Strategy::BpGuided(BpGuided::default()),
                ] {
                    let out = strategy.decode(&problem, &s, &DecodeOptions::with_node_cap(200_000));
                    prop_assert_eq!(out.status, Status::Found);
                    prop_assert_eq!(problem.check.syndrome_of(out.correction.as_ref().unwrap()), s.clone());
                    prop_assert!(out.explored <= out.nodes_seen);
                }
            }
        }
    }
}
