//! Minimum-weight logical operators and distance certification.
//!
//! Enumeration grows fault sets one fault at a time, always adding a fault
//! adjacent to the smallest unsatisfied check. Any fault set that is a
//! proper subset of a weight-`d` logical has a nonzero syndrome (a lighter
//! stabilizer or logical inside it would contradict minimality), and the
//! smallest unsatisfied check must be covered by the rest of the logical, so
//! this expansion reaches every weight-`d` logical from any of its faults.

use std::collections::BTreeSet;
use std::time::Duration;

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{combined_count_bound, BoundConfig};
use crate::dtd::{check_selection, DecodeOptions, HeightBound, Status, Strategy};
use crate::sparse::{CheckMatrix, DecodingProblem, FaultSet, IndexSet};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LogicalSet {
    pub d: usize,
    /// Sorted by support.
    pub operators: Vec<FaultSet>,
    pub count: usize,
}

/// Next expansion layer, deduplicated. Children of weight `d` are kept when
/// they are logicals; lighter children when `sigma != 0` and
/// `h_min(sigma) + |F| <= d`.
fn next_layer(problem: &DecodingProblem, layer: &BTreeSet<FaultSet>, d: usize, bounds: &BoundConfig) -> BTreeSet<FaultSet> {
    let h = &problem.check;
    let mut out = BTreeSet::new();
    for f in layer {
        let syndrome = h.syndrome_of(f);
        if syndrome.is_empty() {
            continue;
        }
        let i = check_selection(&syndrome);
        for &j in h.row(i) {
            let j = j as usize;
            if f.contains(j) {
                continue;
            }
            let child = f.with(j);
            if out.contains(&child) {
                continue;
            }
            let s = h.flip_fault(&syndrome, j);
            let keep = if child.len() == d {
                s.is_empty() && !problem.logical_action(&child).is_empty()
            } else {
                !s.is_empty() && combined_count_bound(&s, h, bounds).is_some_and(|b| b + child.len() <= d)
            };
            if keep {
                out.insert(child);
            }
        }
    }
    out
}

/// All weight-`d` logical operators containing `f_in`, reachable by the
/// smallest-check expansion.
pub fn enclosing_logicals(f_in: &FaultSet, problem: &DecodingProblem, d: usize, bounds: &BoundConfig) -> BTreeSet<FaultSet> {
    if f_in.len() > d {
        return BTreeSet::new();
    }
    if f_in.len() == d {
        let is_logical = problem.check.syndrome_of(f_in).is_empty() && !problem.logical_action(f_in).is_empty();
        return if is_logical { BTreeSet::from([f_in.clone()]) } else { BTreeSet::new() };
    }
    let mut layer = BTreeSet::from([f_in.clone()]);
    for _ in f_in.len()..d {
        layer = next_layer(problem, &layer, d, bounds);
        if layer.is_empty() {
            break;
        }
    }
    layer
}

/// Every weight-`d` logical operator, with the tree split at depth `s`: layers
/// `1..=s` are built from all single faults, then each layer-`s` node is
/// expanded independently.
pub fn all_min_weight_logicals(problem: &DecodingProblem, d: usize, s: usize, bounds: &BoundConfig) -> LogicalSet {
    assert!(1 <= s && s <= d, "separation point must satisfy 1 <= s <= d");
    let h = &problem.check;
    let mut layer: BTreeSet<FaultSet> = (0..problem.num_faults())
        .map(IndexSet::singleton)
        .filter(|f| {
            let syn = h.syndrome_of(f);
            if d == 1 {
                syn.is_empty() && !problem.logical_action(f).is_empty()
            } else {
                !syn.is_empty() && combined_count_bound(&syn, h, bounds).is_some_and(|b| b < d)
            }
        })
        .collect();
    for _ in 1..s {
        layer = next_layer(problem, &layer, d, bounds);
    }
    let seeds: Vec<FaultSet> = layer.into_iter().collect();
    let found: Vec<BTreeSet<FaultSet>> =
        seeds.par_iter().map(|f| enclosing_logicals(f, problem, d, bounds)).collect();
    let mut all = BTreeSet::new();
    for set in found {
        all.extend(set);
    }
    let operators: Vec<FaultSet> = all.into_iter().collect();
    LogicalSet { d, count: operators.len(), operators }
}

/// Whether `f` is connected in the graph where two faults are adjacent when
/// they share a check.
pub fn is_connected(h: &CheckMatrix, f: &FaultSet) -> bool {
    let items: Vec<usize> = f.iter().collect();
    if items.len() <= 1 {
        return true;
    }
    let mut visited = vec![false; items.len()];
    let mut stack = vec![0];
    visited[0] = true;
    while let Some(a) = stack.pop() {
        for b in 0..items.len() {
            if !visited[b] && IndexSet::from_sorted(h.col(items[a]).to_vec()).intersection_len(h.col(items[b])) > 0 {
                visited[b] = true;
                stack.push(b);
            }
        }
    }
    visited.into_iter().all(|v| v)
}

/// Greedily lowers the weight of `row` by adding rows of `h`.
pub fn reduce_row_weight(row: &FaultSet, h: &CheckMatrix) -> FaultSet {
    let mut current = row.clone();
    loop {
        let best = h
            .rows()
            .iter()
            .map(|r| current.sym_diff_slice(r))
            .min_by_key(IndexSet::len)
            .filter(|c| c.len() < current.len());
        match best {
            Some(c) => current = c,
            None => return current,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceStatus {
    /// Every row was decoded; `d` is exact.
    Exact,
    /// Some rows timed out or hit a cap; `d` is an upper bound.
    UpperBound,
    /// No row finished.
    Unknown,
}

#[derive(Clone, Debug, Serialize)]
pub struct RowDistance {
    pub row: usize,
    /// Weight of the appended (reduced) logical row.
    pub row_weight: usize,
    pub weight: Option<usize>,
    pub witness: Option<FaultSet>,
    pub status: Status,
    pub nu: usize,
    pub elapsed_ns: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DistanceResult {
    pub d: Option<usize>,
    pub per_row: Vec<RowDistance>,
    pub status: DistanceStatus,
}

impl Strategy {
    /// The same strategy for a check matrix with one extra row appended.
    pub fn for_extended_matrix(&self) -> Strategy {
        match self {
            Strategy::HeightBound(hb) => {
                Strategy::HeightBound(HeightBound { bounds: hb.bounds.for_extended_matrix(), bp: hb.bp })
            }
            other => other.clone(),
        }
    }
}

/// Code distance from min-weight decoding on `[H; a_i]` with syndrome `e_M`,
/// one row `a_i` of the logical action at a time.
///
/// Rows are first reduced in weight with rows of `H`; this does not change
/// the set of fault sets with `H F = 0` and `a_i F = 1`.
pub fn find_distance(problem: &DecodingProblem, strategy: &Strategy, time_budget: Option<Duration>) -> DistanceResult {
    let logical = problem.logical.as_ref().expect("find_distance needs a logical action matrix");
    let h = &problem.check;
    let extended_strategy = strategy.for_extended_matrix();
    let options = DecodeOptions { node_cap: strategy.default_node_cap(), time_budget };
    let target = IndexSet::singleton(h.num_rows());
    let per_row: Vec<RowDistance> = (0..logical.num_rows())
        .map(|i| {
            let row = reduce_row_weight(&IndexSet::from_sorted(logical.row(i).to_vec()), h);
            let ext = h.with_row(row.as_slice());
            let sub = DecodingProblem::uniform(ext, None);
            let out = extended_strategy.decode(&sub, &target, &options);
            RowDistance {
                row: i,
                row_weight: row.len(),
                weight: out.correction.as_ref().map(IndexSet::len),
                witness: out.correction,
                status: out.status,
                nu: out.explored,
                elapsed_ns: out.elapsed.as_nanos() as u64,
            }
        })
        .collect();
    let d = per_row.iter().filter_map(|r| r.weight).min();
    let all_found = per_row.iter().all(|r| r.status == Status::Found);
    let status = match (d, all_found) {
        (_, true) => DistanceStatus::Exact,
        (Some(_), false) => DistanceStatus::UpperBound,
        (None, false) => DistanceStatus::Unknown,
    };
    DistanceResult { d, per_row, status }
}
