//! Sparse index sets, the check matrix and the decoding problem bundle.
//!
//! Fault sets and syndromes are both stored as strictly increasing index
//! vectors; addition over GF(2) is a linear merge.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sorted set of indices. Used for fault sets (column indices) and
/// syndromes (row indices).
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IndexSet(Vec<u32>);

/// A set of fault indices in `[0, N)`.
pub type FaultSet = IndexSet;
/// A set of unsatisfied check indices in `[0, M)`.
pub type Syndrome = IndexSet;

impl IndexSet {
    pub fn new() -> Self {
        IndexSet(Vec::new())
    }

    /// Builds a set from arbitrary indices, sorting and removing duplicates.
    pub fn from_unsorted<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        v.dedup();
        IndexSet(v)
    }

    /// Builds a set from indices that may repeat; pairs cancel (mod-2 sum).
    pub fn from_parity<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        let mut v: Vec<u32> = iter.into_iter().map(|i| i as u32).collect();
        v.sort_unstable();
        let mut out = Vec::with_capacity(v.len());
        let mut k = 0;
        while k < v.len() {
            let mut run = 1;
            while k + run < v.len() && v[k + run] == v[k] {
                run += 1;
            }
            if run % 2 == 1 {
                out.push(v[k]);
            }
            k += run;
        }
        IndexSet(out)
    }

    /// Wraps an already strictly increasing vector.
    pub fn from_sorted(v: Vec<u32>) -> Self {
        debug_assert!(v.windows(2).all(|w| w[0] < w[1]), "indices not strictly increasing");
        IndexSet(v)
    }

    pub fn singleton(i: usize) -> Self {
        IndexSet(vec![i as u32])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|&i| i as usize)
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().map(|&i| i as usize)
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().map(|&i| i as usize)
    }

    pub fn contains(&self, i: usize) -> bool {
        self.0.binary_search(&(i as u32)).is_ok()
    }

    /// Returns a copy with `i` added. No-op copy if already present.
    pub fn with(&self, i: usize) -> Self {
        let mut v = self.0.clone();
        if let Err(pos) = v.binary_search(&(i as u32)) {
            v.insert(pos, i as u32);
        }
        IndexSet(v)
    }

    pub fn insert(&mut self, i: usize) -> bool {
        match self.0.binary_search(&(i as u32)) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, i as u32);
                true
            }
        }
    }

    /// Symmetric difference (GF(2) sum).
    pub fn sym_diff(&self, other: &IndexSet) -> IndexSet {
        IndexSet(merge_xor(&self.0, &other.0))
    }

    /// Symmetric difference with a sorted slice of indices.
    pub fn sym_diff_slice(&self, other: &[u32]) -> IndexSet {
        IndexSet(merge_xor(&self.0, other))
    }

    pub fn union(&self, other: &IndexSet) -> IndexSet {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        IndexSet(out)
    }

    /// Number of common elements with a sorted slice.
    pub fn intersection_len(&self, other: &[u32]) -> usize {
        let a = &self.0;
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < a.len() && j < other.len() {
            match a[i].cmp(&other[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn is_disjoint(&self, other: &IndexSet) -> bool {
        self.intersection_len(&other.0) == 0
    }

    /// Dense 0/1 representation of length `n`.
    pub fn to_bits(&self, n: usize) -> Vec<bool> {
        let mut bits = vec![false; n];
        for i in self.iter() {
            bits[i] = true;
        }
        bits
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        IndexSet(
            bits.iter()
                .enumerate()
                .filter(|(_, &b)| b)
                .map(|(i, _)| i as u32)
                .collect(),
        )
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0.into_iter().map(|i| i as usize).collect()
    }
}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

impl FromIterator<usize> for IndexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        IndexSet::from_unsorted(iter)
    }
}

fn merge_xor(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sparse binary `M x N` matrix with both row and column adjacency.
///
/// Rows are checks, columns are faults. Edges are numbered row-major so BP
/// can keep one message slot per edge: edge `row_ptr[i] + k` joins check `i`
/// and fault `rows[i][k]`.
#[derive(Clone, PartialEq, Eq)]
pub struct CheckMatrix {
    num_rows: usize,
    num_cols: usize,
    rows: Vec<Vec<u32>>,
    cols: Vec<Vec<u32>>,
    row_ptr: Vec<usize>,
    /// For each column, the edge ids of its entries (in ascending row order).
    col_edges: Vec<Vec<u32>>,
    max_row_weight: usize,
    max_col_weight: usize,
}

impl fmt::Debug for CheckMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckMatrix")
            .field("m", &self.num_rows)
            .field("n", &self.num_cols)
            .field("r", &self.max_row_weight)
            .field("c", &self.max_col_weight)
            .finish()
    }
}

impl CheckMatrix {
    /// Builds a matrix from per-row column lists. Rows are sorted; duplicate
    /// or out-of-range entries are rejected.
    pub fn from_rows(num_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let mut sorted = Vec::with_capacity(rows.len());
        for (i, row) in rows.into_iter().enumerate() {
            let mut r: Vec<u32> = Vec::with_capacity(row.len());
            for j in row {
                if j >= num_cols {
                    return Err(Error::IndexOutOfRange { index: j, bound: num_cols, what: "column" });
                }
                r.push(j as u32);
            }
            r.sort_unstable();
            if r.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::DuplicateIndex { row: i });
            }
            sorted.push(r);
        }
        Ok(Self::build(num_cols, sorted))
    }

    /// Builds from rows where repeated entries cancel mod 2.
    pub fn from_rows_mod2(num_cols: usize, rows: Vec<Vec<usize>>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| IndexSet::from_parity(r).into_vec())
            .collect();
        Self::from_rows(num_cols, rows)
    }

    /// Builds from a dense 0/1 matrix given row by row.
    pub fn from_dense(dense: &[Vec<u8>]) -> Self {
        let n = dense.first().map_or(0, |r| r.len());
        let rows = dense
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, &b)| b & 1 == 1)
                    .map(|(j, _)| j as u32)
                    .collect()
            })
            .collect();
        Self::build(n, rows)
    }

    fn build(num_cols: usize, rows: Vec<Vec<u32>>) -> Self {
        let num_rows = rows.len();
        let mut cols: Vec<Vec<u32>> = vec![Vec::new(); num_cols];
        let mut col_edges: Vec<Vec<u32>> = vec![Vec::new(); num_cols];
        let mut row_ptr = Vec::with_capacity(num_rows + 1);
        let mut edge = 0usize;
        for (i, row) in rows.iter().enumerate() {
            row_ptr.push(edge);
            for &j in row {
                cols[j as usize].push(i as u32);
                col_edges[j as usize].push(edge as u32);
                edge += 1;
            }
        }
        row_ptr.push(edge);
        let max_row_weight = rows.iter().map(Vec::len).max().unwrap_or(0);
        let max_col_weight = cols.iter().map(Vec::len).max().unwrap_or(0);
        CheckMatrix {
            num_rows,
            num_cols,
            rows,
            cols,
            row_ptr,
            col_edges,
            max_row_weight,
            max_col_weight,
        }
    }

    /// Number of checks `M`.
    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    /// Number of faults `N`.
    pub fn num_cols(&self) -> usize {
        self.num_cols
    }

    /// Fault neighbourhood of check `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }

    /// Check neighbourhood of fault `j`.
    pub fn col(&self, j: usize) -> &[u32] {
        &self.cols[j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.rows
    }

    pub fn cols(&self) -> &[Vec<u32>] {
        &self.cols
    }

    /// Maximum row weight `r`.
    pub fn max_row_weight(&self) -> usize {
        self.max_row_weight
    }

    /// Maximum column weight `c`.
    pub fn max_col_weight(&self) -> usize {
        self.max_col_weight
    }

    pub fn num_edges(&self) -> usize {
        *self.row_ptr.last().unwrap_or(&0)
    }

    pub(crate) fn row_edge_start(&self, i: usize) -> usize {
        self.row_ptr[i]
    }

    pub(crate) fn col_edges(&self, j: usize) -> &[u32] {
        &self.col_edges[j]
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].binary_search(&(j as u32)).is_ok()
    }

    /// `H F mod 2` as a syndrome. Panics if an index of `faults` is `>= N`.
    pub fn syndrome_of(&self, faults: &FaultSet) -> Syndrome {
        let mut acc: Vec<u32> = Vec::new();
        for j in faults.iter() {
            assert!(j < self.num_cols, "fault index {j} out of range for N = {}", self.num_cols);
            acc.extend_from_slice(&self.cols[j]);
        }
        IndexSet::from_parity(acc.into_iter().map(|i| i as usize))
    }

    /// `sigma + N(j)`.
    pub fn flip_fault(&self, syndrome: &Syndrome, j: usize) -> Syndrome {
        syndrome.sym_diff_slice(&self.cols[j])
    }

    /// Returns a new matrix with one extra row appended.
    pub fn with_row(&self, row: &[u32]) -> CheckMatrix {
        let mut rows = self.rows.clone();
        rows.push(row.to_vec());
        Self::build(self.num_cols, rows)
    }

    pub fn transpose(&self) -> CheckMatrix {
        Self::build(self.num_rows, self.cols.clone())
    }

    /// Column-masked view of `H` with `removed` columns deleted.
    pub fn decimate<'a>(&'a self, removed: &FaultSet) -> Decimated<'a> {
        Decimated::new(self, removed)
    }

    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        self.rows
            .iter()
            .map(|r| {
                let mut d = vec![0u8; self.num_cols];
                for &j in r {
                    d[j as usize] = 1;
                }
                d
            })
            .collect()
    }
}

/// `H` with a set of columns masked out, plus the map from compacted column
/// positions back to original fault indices.
#[derive(Clone, Debug)]
pub struct Decimated<'a> {
    parent: &'a CheckMatrix,
    removed: Vec<bool>,
    kept: Vec<u32>,
}

impl<'a> Decimated<'a> {
    fn new(parent: &'a CheckMatrix, removed_set: &FaultSet) -> Self {
        let mut removed = vec![false; parent.num_cols()];
        for j in removed_set.iter() {
            assert!(j < parent.num_cols(), "fault index {j} out of range");
            removed[j] = true;
        }
        let kept = (0..parent.num_cols() as u32)
            .filter(|&j| !removed[j as usize])
            .collect();
        Decimated { parent, removed, kept }
    }

    pub fn parent(&self) -> &'a CheckMatrix {
        self.parent
    }

    pub fn is_removed(&self, j: usize) -> bool {
        self.removed[j]
    }

    pub fn removed_mask(&self) -> &[bool] {
        &self.removed
    }

    /// Original fault index of each surviving column, in order.
    pub fn index_map(&self) -> &[u32] {
        &self.kept
    }

    pub fn num_cols(&self) -> usize {
        self.kept.len()
    }

    /// Physically rebuilds the decimated matrix with compacted column indices.
    pub fn to_matrix(&self) -> CheckMatrix {
        let mut position = vec![u32::MAX; self.parent.num_cols()];
        for (new, &old) in self.kept.iter().enumerate() {
            position[old as usize] = new as u32;
        }
        let rows = self
            .parent
            .rows()
            .iter()
            .map(|r| {
                r.iter()
                    .filter(|&&j| !self.removed[j as usize])
                    .map(|&j| position[j as usize])
                    .collect()
            })
            .collect();
        CheckMatrix::build(self.kept.len(), rows)
    }
}

/// Per-fault weights and priors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    weights: Vec<f64>,
    priors: Vec<f64>,
    uniform: bool,
}

impl WeightVector {
    /// Weights `w_j = ln((1 - p_j) / p_j)`.
    pub fn from_priors(priors: Vec<f64>) -> Result<Self> {
        for (j, &p) in priors.iter().enumerate() {
            if !(p > 0.0 && p < 0.5) {
                return Err(Error::InvalidPrior { index: j, value: p });
            }
        }
        let weights = priors.iter().map(|&p| ((1.0 - p) / p).ln()).collect();
        Ok(WeightVector { weights, priors, uniform: false })
    }

    /// Unit weights with a common prior `p` (used only by BP).
    pub fn uniform(n: usize, p: f64) -> Result<Self> {
        if !(p > 0.0 && p < 0.5) {
            return Err(Error::InvalidPrior { index: 0, value: p });
        }
        Ok(WeightVector { weights: vec![1.0; n], priors: vec![p; n], uniform: true })
    }

    /// Explicit weights alongside priors.
    pub fn with_weights(weights: Vec<f64>, priors: Vec<f64>) -> Result<Self> {
        if weights.len() != priors.len() {
            return Err(Error::DimensionMismatch { expected: weights.len(), found: priors.len() });
        }
        if let Some((j, &w)) = weights.iter().enumerate().find(|(_, &w)| !(w > 0.0 && w.is_finite())) {
            return Err(Error::InvalidWeight { index: j, value: w });
        }
        for (j, &p) in priors.iter().enumerate() {
            if !(p > 0.0 && p < 0.5) {
                return Err(Error::InvalidPrior { index: j, value: p });
            }
        }
        let uniform = weights.iter().all(|&w| w == 1.0);
        Ok(WeightVector { weights, priors, uniform })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weight(&self, j: usize) -> f64 {
        self.weights[j]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn prior(&self, j: usize) -> f64 {
        self.priors[j]
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    /// Prior log-probability ratio `ln((1 - p_j) / p_j)` fed to BP.
    pub fn prior_llr(&self, j: usize) -> f64 {
        let p = self.priors[j];
        ((1.0 - p) / p).ln()
    }

    pub fn is_uniform(&self) -> bool {
        self.uniform
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `w(F)`.
    pub fn weight_of(&self, faults: &FaultSet) -> f64 {
        faults.iter().map(|j| self.weights[j]).sum()
    }
}

/// Check matrix, optional logical action matrix and weights.
#[derive(Clone, Debug)]
pub struct DecodingProblem {
    pub check: CheckMatrix,
    pub logical: Option<CheckMatrix>,
    pub weights: WeightVector,
}

impl DecodingProblem {
    pub fn new(check: CheckMatrix, logical: Option<CheckMatrix>, weights: WeightVector) -> Result<Self> {
        if let Some(a) = &logical {
            if a.num_cols() != check.num_cols() {
                return Err(Error::DimensionMismatch { expected: check.num_cols(), found: a.num_cols() });
            }
        }
        if weights.len() != check.num_cols() {
            return Err(Error::DimensionMismatch { expected: check.num_cols(), found: weights.len() });
        }
        Ok(DecodingProblem { check, logical, weights })
    }

    /// Unit weights, prior 0.01 everywhere.
    pub fn uniform(check: CheckMatrix, logical: Option<CheckMatrix>) -> Self {
        let weights = WeightVector::uniform(check.num_cols(), 0.01).expect("valid prior");
        DecodingProblem { check, logical, weights }
    }

    pub fn num_faults(&self) -> usize {
        self.check.num_cols()
    }

    /// `A F`, or empty if there is no logical action matrix.
    pub fn logical_action(&self, faults: &FaultSet) -> Syndrome {
        self.logical.as_ref().map_or_else(IndexSet::new, |a| a.syndrome_of(faults))
    }
}

/// `H F mod 2`.
pub fn syndrome_of(check: &CheckMatrix, faults: &FaultSet) -> Syndrome {
    check.syndrome_of(faults)
}

/// `sum_{j in F} w_j`.
pub fn weight_of(faults: &FaultSet, weights: &WeightVector) -> f64 {
    weights.weight_of(faults)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rep3() -> CheckMatrix {
        CheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]])
    }

    #[test]
    fn syndrome_examples() {
        let h = rep3();
        assert_eq!(h.syndrome_of(&IndexSet::singleton(1)), IndexSet::from_unsorted([0, 1]));
        assert!(h.syndrome_of(&IndexSet::new()).is_empty());
        assert!(h.syndrome_of(&IndexSet::from_unsorted([0, 1, 2])).is_empty());
    }

    #[test]
    #[should_panic]
    fn syndrome_rejects_out_of_range() {
        rep3().syndrome_of(&IndexSet::singleton(3));
    }

    #[test]
    fn weight_examples() {
        let uniform = WeightVector::uniform(10, 0.1).unwrap();
        assert_eq!(uniform.weight_of(&IndexSet::new()), 0.0);
        assert_eq!(uniform.weight_of(&IndexSet::from_unsorted([2, 5, 9])), 3.0);
        let w = WeightVector::with_weights(vec![0.5, 2.0], vec![0.1, 0.1]).unwrap();
        assert_eq!(w.weight_of(&IndexSet::from_unsorted([0, 1])), 2.5);
    }

    #[test]
    fn weights_from_priors_use_natural_log() {
        let w = WeightVector::from_priors(vec![0.1, 0.01]).unwrap();
        assert!((w.weight(0) - 9f64.ln()).abs() < 1e-12);
        assert!((w.weight(1) - 99f64.ln()).abs() < 1e-12);
        assert!(WeightVector::from_priors(vec![0.5]).is_err());
        assert!(WeightVector::from_priors(vec![0.0]).is_err());
    }

    #[test]
    fn decimate_examples() {
        let h = rep3();
        assert_eq!(h.decimate(&IndexSet::new()).to_matrix(), h);
        let d = h.decimate(&IndexSet::singleton(1));
        assert_eq!(d.to_matrix().to_dense(), vec![vec![1, 0], vec![0, 1]]);
        assert_eq!(d.index_map(), &[0, 2]);
        let all = h.decimate(&IndexSet::from_unsorted([0, 1, 2])).to_matrix();
        assert_eq!((all.num_rows(), all.num_cols()), (2, 0));
    }

    #[test]
    fn transpose_round_trip() {
        let h = CheckMatrix::from_dense(&[vec![1, 0, 1, 1], vec![0, 1, 1, 0], vec![1, 1, 0, 0]]);
        assert_eq!(h.transpose().transpose(), h);
        assert_eq!(h.max_row_weight(), 3);
        assert_eq!(h.max_col_weight(), 2);
        for (i, row) in h.rows().iter().enumerate() {
            for &j in row {
                assert!(h.col(j as usize).contains(&(i as u32)));
            }
        }
    }

    #[test]
    fn from_rows_rejects_bad_input() {
        assert!(matches!(
            CheckMatrix::from_rows(3, vec![vec![0, 3]]),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            CheckMatrix::from_rows(3, vec![vec![1, 1]]),
            Err(Error::DuplicateIndex { row: 0 })
        ));
    }

    #[test]
    fn parity_construction_cancels_pairs() {
        assert_eq!(IndexSet::from_parity([3, 1, 3, 2, 1, 1]), IndexSet::from_unsorted([1, 2]));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn matrix_strategy() -> impl Strategy<Value = CheckMatrix> {
            (1usize..8, 1usize..12).prop_flat_map(|(m, n)| {
                proptest::collection::vec(proptest::collection::vec(0..n, 0..n), m)
                    .prop_map(move |rows| CheckMatrix::from_rows_mod2(n, rows).unwrap())
            })
        }

        fn subset(n: usize) -> impl Strategy<Value = FaultSet> {
            proptest::collection::vec(any::<bool>(), n).prop_map(|b| IndexSet::from_bits(&b))
        }

        proptest! {
            #[test]
            fn syndrome_is_linear((h, a, b) in matrix_strategy().prop_flat_map(|h| {
                let n = h.num_cols();
                (Just(h), subset(n), subset(n))
            })) {
                let lhs = h.syndrome_of(&a.sym_diff(&b));
                let rhs = h.syndrome_of(&a).sym_diff(&h.syndrome_of(&b));
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn decimation_commutes_with_syndrome((h, removed, f) in matrix_strategy().prop_flat_map(|h| {
                let n = h.num_cols();
                (Just(h), subset(n), subset(n))
            })) {
                let f: FaultSet = f.iter().filter(|&j| !removed.contains(j)).collect();
                let dec = h.decimate(&removed);
                let small = dec.to_matrix();
                let map = dec.index_map();
                let compact: FaultSet = f
                    .iter()
                    .map(|j| map.iter().position(|&o| o as usize == j).unwrap())
                    .collect();
                prop_assert_eq!(small.syndrome_of(&compact), h.syndrome_of(&f));
            }

            #[test]
            fn weight_is_additive(ws in proptest::collection::vec(0.1f64..5.0, 10), a in subset(10), b in subset(10)) {
                let w = WeightVector::with_weights(ws, vec![0.1; 10]).unwrap();
                let b: FaultSet = b.iter().filter(|&j| !a.contains(j)).collect();
                let lhs = w.weight_of(&a.union(&b));
                prop_assert!((lhs - w.weight_of(&a) - w.weight_of(&b)).abs() < 1e-9);
            }
        }
    }
}
