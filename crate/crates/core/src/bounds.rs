//! Lower bounds on the syndrome height `h(sigma)`, the minimum weight of any
//! fault set with syndrome `sigma`, plus an exhaustive exact oracle.
//!
//! The neighbourhood bounds count faults (unit weights). Under non-uniform
//! weights [`combined_bound`] scales them by the smallest fault weight so
//! they remain valid lower bounds.

use std::collections::{BinaryHeap, HashMap};
use std::cmp::Reverse;

use crate::codes::CheckColoring;
use crate::gf2;
use crate::sparse::{CheckMatrix, FaultSet, IndexSet, Syndrome, WeightVector};

/// Per-syndrome sensitivity data shared by `h2`, `h3` and `h4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SensitivityProfile {
    /// `a[l - 1]` = number of syndrome checks with sensitivity `l`, for `l = 1..=c`.
    pub a: Vec<usize>,
    /// Remainder cascade, `q[l - 1] = q_l`; `q_c = 0`.
    pub q: Vec<usize>,
    /// Sensitivity of each syndrome check, in syndrome order.
    pub sen: Vec<usize>,
    /// Number of faults touching exactly `c` syndrome checks (`|B_c|`).
    pub b_c: usize,
    /// Some syndrome check has no fault neighbour at all.
    pub infeasible: bool,
}

impl SensitivityProfile {
    pub fn max_degree(&self) -> usize {
        self.a.len()
    }
}

/// `ceil(|sigma| / c)`.
pub fn h1(syndrome: &Syndrome, c: usize) -> usize {
    assert!(c >= 1, "fault degree must be positive");
    syndrome.len().div_ceil(c)
}

fn touching(h: &CheckMatrix, syndrome: &Syndrome, j: usize) -> usize {
    syndrome.intersection_len(h.col(j))
}

pub fn sensitivity_profile(syndrome: &Syndrome, h: &CheckMatrix) -> SensitivityProfile {
    let c = h.max_col_weight().max(1);
    let mut a = vec![0usize; c];
    let mut sen = Vec::with_capacity(syndrome.len());
    let mut infeasible = false;
    let mut full: Vec<u32> = Vec::new();
    for i in syndrome.iter() {
        let row = h.row(i);
        if row.is_empty() {
            infeasible = true;
            sen.push(0);
            continue;
        }
        let mut s = 1;
        for &j in row {
            let t = touching(h, syndrome, j as usize);
            s = s.max(t);
            if t == c {
                full.push(j);
            }
        }
        a[s - 1] += 1;
        sen.push(s);
    }
    full.sort_unstable();
    full.dedup();
    let mut q = vec![0usize; c];
    for l in (1..c).rev() {
        // q_l = (q_{l+1} + a_{l+1}) mod (l + 1)
        q[l - 1] = (q[l] + a[l]) % (l + 1);
    }
    SensitivityProfile { a, q, sen, b_c: full.len(), infeasible }
}

/// Descending remainder-carry evaluation of the sensitivity bound.
pub fn h2_from_profile(a: &[usize]) -> usize {
    let mut bound = 0;
    let mut carry = 0;
    for l in (1..=a.len()).rev() {
        let total = carry + a[l - 1];
        bound += total / l;
        carry = total % l;
    }
    bound
}

/// Sensitivity bound. Returns `None` when the syndrome is infeasible.
pub fn h2(syndrome: &Syndrome, h: &CheckMatrix) -> Option<usize> {
    let p = sensitivity_profile(syndrome, h);
    (!p.infeasible).then(|| h2_from_profile(&p.a))
}

/// `ceil(sum_l a_l / l)`, evaluated exactly.
pub fn h3_from_profile(a: &[usize]) -> usize {
    let c = a.len();
    let mut lcm: u128 = 1;
    for l in 1..=c as u128 {
        lcm = lcm / gcd(lcm, l) * l;
        if lcm > u64::MAX as u128 {
            let x: f64 = a.iter().enumerate().map(|(k, &x)| x as f64 / (k + 1) as f64).sum();
            return (x - 1e-9).ceil().max(0.0) as usize;
        }
    }
    let num: u128 = a.iter().enumerate().map(|(k, &x)| x as u128 * (lcm / (k as u128 + 1))).sum();
    num.div_ceil(lcm) as usize
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn h3(syndrome: &Syndrome, h: &CheckMatrix) -> Option<usize> {
    let p = sensitivity_profile(syndrome, h);
    (!p.infeasible).then(|| h3_from_profile(&p.a))
}

/// `ceil((|sigma| - |B_c|) / (c - 1))`, falling back to `h3` when `c = 1`.
pub fn h4_from_profile(p: &SensitivityProfile, syndrome_len: usize) -> usize {
    let c = p.max_degree();
    if c <= 1 {
        return h3_from_profile(&p.a);
    }
    syndrome_len.saturating_sub(p.b_c).div_ceil(c - 1)
}

pub fn h4(syndrome: &Syndrome, h: &CheckMatrix) -> Option<usize> {
    let p = sensitivity_profile(syndrome, h);
    (!p.infeasible).then(|| h4_from_profile(&p, syndrome.len()))
}

/// Largest single-color subset of the syndrome.
pub fn color_subset_bound(syndrome: &Syndrome, coloring: &CheckColoring) -> usize {
    let mut counts = vec![0usize; coloring.num_colors];
    for i in syndrome.iter() {
        counts[coloring.color[i]] += 1;
    }
    counts.into_iter().max().unwrap_or(0)
}

/// Splits `sigma` into clusters whose fault neighbourhoods are disjoint.
pub fn clusters(syndrome: &Syndrome, h: &CheckMatrix) -> Vec<Syndrome> {
    let checks = syndrome.as_slice();
    let mut parent: Vec<usize> = (0..checks.len()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // The first syndrome check seen next to each fault.
    let mut owner: HashMap<u32, usize> = HashMap::new();
    for (pos, &i) in checks.iter().enumerate() {
        for &j in h.row(i as usize) {
            match owner.get(&j) {
                Some(&other) => {
                    let (ra, rb) = (find(&mut parent, pos), find(&mut parent, other));
                    if ra != rb {
                        parent[ra.max(rb)] = ra.min(rb);
                    }
                }
                None => {
                    owner.insert(j, pos);
                }
            }
        }
    }
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut group_of: HashMap<usize, usize> = HashMap::new();
    for (pos, &i) in checks.iter().enumerate() {
        let root = find(&mut parent, pos);
        let g = *group_of.entry(root).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
    }
    groups.into_iter().map(IndexSet::from_sorted).collect()
}

/// Sum of `inner` over the clusters of `sigma`. `None` from any cluster
/// (infeasible) propagates.
pub fn cluster_bound<F>(syndrome: &Syndrome, h: &CheckMatrix, mut inner: F) -> Option<usize>
where
    F: FnMut(&Syndrome) -> Option<usize>,
{
    clusters(syndrome, h).iter().try_fold(0, |acc, cl| inner(cl).map(|b| acc + b))
}

/// Which bounds [`combined_bound`] takes the maximum over.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundConfig {
    pub h1: bool,
    pub h2: bool,
    pub h3: bool,
    pub h4: bool,
    pub color_subset: bool,
    pub cluster: bool,
    pub coloring: Option<CheckColoring>,
}

impl BoundConfig {
    /// `h2` plus the color-subset bound when a coloring is supplied, with
    /// cluster decomposition.
    pub fn standard(coloring: Option<CheckColoring>) -> Self {
        BoundConfig {
            h1: false,
            h2: true,
            h3: false,
            h4: false,
            color_subset: coloring.is_some(),
            cluster: true,
            coloring,
        }
    }

    /// Only `h2`, no decomposition.
    pub fn h2_only() -> Self {
        BoundConfig { h1: false, h2: true, h3: false, h4: false, color_subset: false, cluster: false, coloring: None }
    }

    pub fn none() -> Self {
        BoundConfig { h1: false, h2: false, h3: false, h4: false, color_subset: false, cluster: false, coloring: None }
    }

    /// Parses a comma-separated list from `h1,h2,h3,h4,color,cluster`.
    pub fn parse(list: &str, coloring: Option<CheckColoring>) -> crate::error::Result<Self> {
        let mut cfg = BoundConfig::none();
        for name in list.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match name {
                "h1" => cfg.h1 = true,
                "h2" => cfg.h2 = true,
                "h3" => cfg.h3 = true,
                "h4" => cfg.h4 = true,
                "color" | "color_subset" => cfg.color_subset = true,
                "cluster" => cfg.cluster = true,
                other => {
                    return Err(crate::error::Error::InvalidParameter(format!("unknown bound '{other}'")))
                }
            }
        }
        if cfg.color_subset {
            if coloring.is_none() {
                return Err(crate::error::Error::InvalidParameter(
                    "color-subset bound requested but the check graph has no valid coloring".into(),
                ));
            }
            cfg.coloring = coloring;
        }
        Ok(cfg)
    }

    /// Color-subset bound is usable only with a coloring.
    fn use_color(&self) -> bool {
        self.color_subset && self.coloring.is_some()
    }

    /// Returns a copy with the coloring extended by one fresh color, for a
    /// matrix with one extra row appended.
    pub fn for_extended_matrix(&self) -> Self {
        let mut cfg = self.clone();
        cfg.coloring = self.coloring.as_ref().map(CheckColoring::extended);
        cfg
    }
}

/// Maximum of the enabled count bounds on one (sub)syndrome, without decomposition.
pub fn max_count_bound(syndrome: &Syndrome, h: &CheckMatrix, cfg: &BoundConfig) -> Option<usize> {
    if syndrome.is_empty() {
        return Some(0);
    }
    let mut best = 0;
    if cfg.h1 {
        best = best.max(h1(syndrome, h.max_col_weight().max(1)));
    }
    if cfg.h2 || cfg.h3 || cfg.h4 {
        let p = sensitivity_profile(syndrome, h);
        if p.infeasible {
            return None;
        }
        if cfg.h2 {
            best = best.max(h2_from_profile(&p.a));
        }
        if cfg.h3 {
            best = best.max(h3_from_profile(&p.a));
        }
        if cfg.h4 {
            best = best.max(h4_from_profile(&p, syndrome.len()));
        }
    } else if syndrome.iter().any(|i| h.row(i).is_empty()) {
        return None;
    }
    if cfg.use_color() {
        best = best.max(color_subset_bound(syndrome, cfg.coloring.as_ref().unwrap()));
    }
    Some(best)
}

/// Tightest enabled bound as a fault count; `None` if the syndrome cannot be
/// produced by any fault set touching its checks.
pub fn combined_count_bound(syndrome: &Syndrome, h: &CheckMatrix, cfg: &BoundConfig) -> Option<usize> {
    let whole = max_count_bound(syndrome, h, cfg)?;
    if !cfg.cluster || syndrome.len() < 2 {
        return Some(whole);
    }
    let split = cluster_bound(syndrome, h, |cl| max_count_bound(cl, h, cfg))?;
    Some(whole.max(split))
}

/// Weighted lower bound on `h(sigma)`: the count bound times the minimum
/// fault weight, or `+inf` when infeasible.
pub fn combined_bound(syndrome: &Syndrome, h: &CheckMatrix, weights: &WeightVector, cfg: &BoundConfig) -> f64 {
    match combined_count_bound(syndrome, h, cfg) {
        None => f64::INFINITY,
        Some(count) if weights.is_uniform() => count as f64,
        Some(count) => count as f64 * weights.min_weight(),
    }
}

/// Outcome of the exhaustive height search.
#[derive(Clone, Debug, PartialEq)]
pub enum HeightResult {
    Found { height: f64, witness: FaultSet },
    /// `sigma` is not in the column span of `H`.
    NoSolution,
    /// The minimum weight exceeds the cap.
    CapExceeded,
}

impl HeightResult {
    pub fn height(&self) -> Option<f64> {
        match self {
            HeightResult::Found { height, .. } => Some(*height),
            _ => None,
        }
    }
}

/// Exact syndrome height by exhaustive search in order of increasing weight,
/// considering corrections of weight at most `cap`.
///
/// Unit weights enumerate subsets by cardinality; other weights enumerate
/// subsets in nondecreasing total weight.
pub fn brute_force_height(syndrome: &Syndrome, h: &CheckMatrix, weights: &WeightVector, cap: f64) -> HeightResult {
    if syndrome.is_empty() {
        return HeightResult::Found { height: 0.0, witness: IndexSet::new() };
    }
    if !gf2::in_column_span(h, syndrome) {
        return HeightResult::NoSolution;
    }
    if weights.is_uniform() {
        let max_k = if cap.is_finite() { cap.floor().max(0.0) as usize } else { h.num_cols() };
        let search = CardinalitySearch::new(h);
        for k in 1..=max_k.min(h.num_cols()) {
            if let Some(w) = search.find(syndrome, k) {
                return HeightResult::Found { height: k as f64, witness: w };
            }
        }
        HeightResult::CapExceeded
    } else {
        weighted_search(syndrome, h, weights, cap)
    }
}

/// Depth-first enumeration of index-increasing `k`-subsets.
struct CardinalitySearch<'a> {
    h: &'a CheckMatrix,
    /// Largest fault index adjacent to each check.
    last_fault: Vec<usize>,
    c: usize,
}

impl<'a> CardinalitySearch<'a> {
    fn new(h: &'a CheckMatrix) -> Self {
        let last_fault = h.rows().iter().map(|r| r.last().map_or(0, |&j| j as usize)).collect();
        CardinalitySearch { h, last_fault, c: h.max_col_weight().max(1) }
    }

    fn find(&self, syndrome: &Syndrome, k: usize) -> Option<FaultSet> {
        let mut chosen = Vec::with_capacity(k);
        self.dfs(syndrome, 0, k, &mut chosen).then(|| IndexSet::from_unsorted(chosen))
    }

    fn dfs(&self, residual: &Syndrome, start: usize, remaining: usize, chosen: &mut Vec<usize>) -> bool {
        if residual.is_empty() {
            return remaining == 0;
        }
        if remaining == 0 || residual.len() > remaining * self.c {
            return false;
        }
        // Some unsatisfied check can no longer be reached by faults >= start.
        if residual.iter().any(|i| self.last_fault[i] < start || self.h.row(i).is_empty()) {
            return false;
        }
        for j in start..self.h.num_cols() {
            if self.h.num_cols() - j < remaining {
                break;
            }
            chosen.push(j);
            let next = self.h.flip_fault(residual, j);
            if self.dfs(&next, j + 1, remaining - 1, chosen) {
                return true;
            }
            chosen.pop();
        }
        false
    }
}

fn weighted_search(syndrome: &Syndrome, h: &CheckMatrix, weights: &WeightVector, cap: f64) -> HeightResult {
    // Faults sorted by weight; subsets are generated in nondecreasing weight by
    // the standard "extend / replace last" successor scheme.
    let mut order: Vec<usize> = (0..h.num_cols()).collect();
    order.sort_by(|&a, &b| weights.weight(a).total_cmp(&weights.weight(b)).then(a.cmp(&b)));
    let w = |k: usize| weights.weight(order[k]);

    #[derive(PartialEq)]
    struct Entry(f64, Vec<usize>);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            self.0.total_cmp(&other.0).then_with(|| self.1.cmp(&other.1))
        }
    }

    let mut heap = BinaryHeap::new();
    if !order.is_empty() {
        heap.push(Reverse(Entry(w(0), vec![0])));
    }
    while let Some(Reverse(Entry(total, positions))) = heap.pop() {
        if total > cap {
            return HeightResult::CapExceeded;
        }
        let set: FaultSet = positions.iter().map(|&k| order[k]).collect();
        if h.syndrome_of(&set) == *syndrome {
            return HeightResult::Found { height: total, witness: set };
        }
        let last = *positions.last().unwrap();
        if last + 1 < order.len() {
            let mut extended = positions.clone();
            extended.push(last + 1);
            heap.push(Reverse(Entry(total + w(last + 1), extended)));
            let mut replaced = positions;
            *replaced.last_mut().unwrap() = last + 1;
            heap.push(Reverse(Entry(total - w(last) + w(last + 1), replaced)));
        }
    }
    HeightResult::CapExceeded
}
