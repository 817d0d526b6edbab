//! Dense GF(2) row reduction on packed 64-bit words.
//!
//! The matrices handled here are small (a few hundred columns at most for
//! code construction, a few thousand for OSD on circuit-level problems), so
//! plain packed Gaussian elimination is sufficient.

use crate::sparse::CheckMatrix;

/// A packed binary row.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BitRow {
    words: Vec<u64>,
    len: usize,
}

impl BitRow {
    pub fn zeros(len: usize) -> Self {
        BitRow { words: vec![0; len.div_ceil(64)], len }
    }

    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut r = Self::zeros(len);
        for i in indices {
            r.flip(i);
        }
        r
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        if value {
            self.words[i / 64] |= 1 << (i % 64);
        } else {
            self.words[i / 64] &= !(1 << (i % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    #[inline]
    pub fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Parity of the bitwise AND with `other`.
    pub fn dot(&self, other: &BitRow) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * 64 + t)
                }
            })
        })
    }
}

/// Result of reducing a matrix to row-echelon form.
#[derive(Clone, Debug)]
pub struct RowReduction {
    pub rank: usize,
    /// Pivot column of each echelon row, ascending.
    pub pivot_columns: Vec<usize>,
    /// Reduced row-echelon rows; the first `rank` are nonzero.
    pub rows: Vec<BitRow>,
}

/// Reduced row-echelon form of a set of packed rows over GF(2).
pub fn row_reduce_rows(mut rows: Vec<BitRow>, num_cols: usize) -> RowReduction {
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..num_cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push(col);
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    RowReduction { rank, pivot_columns: pivots, rows }
}

/// Row reduction of a sparse check matrix.
pub fn gf2_row_reduce(h: &CheckMatrix) -> RowReduction {
    row_reduce_rows(to_bit_rows(h), h.num_cols())
}

pub fn to_bit_rows(h: &CheckMatrix) -> Vec<BitRow> {
    h.rows()
        .iter()
        .map(|r| BitRow::from_indices(h.num_cols(), r.iter().map(|&j| j as usize)))
        .collect()
}

pub fn rank(h: &CheckMatrix) -> usize {
    gf2_row_reduce(h).rank
}

/// Basis of `{x : H x = 0}`.
pub fn kernel_basis(h: &CheckMatrix) -> Vec<BitRow> {
    let n = h.num_cols();
    let red = gf2_row_reduce(h);
    let mut is_pivot = vec![false; n];
    for &p in &red.pivot_columns {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|&c| !is_pivot[c]) {
        let mut v = BitRow::zeros(n);
        v.set(free, true);
        for (row, &p) in red.rows.iter().zip(&red.pivot_columns) {
            if row.get(free) {
                v.set(p, true);
            }
        }
        basis.push(v);
    }
    basis
}

/// Incremental echelon basis used to test membership in a row space.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    rows: Vec<(usize, BitRow)>,
    len: usize,
}

impl EchelonBasis {
    pub fn new(len: usize) -> Self {
        EchelonBasis { rows: Vec::new(), len }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis.
    pub fn reduce(&self, v: &BitRow) -> BitRow {
        let mut v = v.clone();
        for (p, row) in &self.rows {
            if v.get(*p) {
                v.xor_assign(row);
            }
        }
        v
    }

    /// Adds `v` if independent; returns whether it was added.
    pub fn insert(&mut self, v: &BitRow) -> bool {
        debug_assert_eq!(v.len(), self.len);
        let v = self.reduce(v);
        let Some(p) = v.ones().next() else {
            return false;
        };
        for (_, row) in self.rows.iter_mut() {
            if row.get(p) {
                row.xor_assign(&v);
            }
        }
        self.rows.push((p, v));
        true
    }

    pub fn contains(&self, v: &BitRow) -> bool {
        self.reduce(v).is_zero()
    }
}

/// Whether `target` lies in the column span of `h` (i.e. `H x = target` is solvable).
pub fn in_column_span(h: &CheckMatrix, target: &crate::sparse::Syndrome) -> bool {
    let t = h.transpose();
    let mut basis = EchelonBasis::new(h.num_rows());
    for row in to_bit_rows(&t) {
        basis.insert(&row);
    }
    basis.contains(&BitRow::from_indices(h.num_rows(), target.iter()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        let h = CheckMatrix::from_dense(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let red = gf2_row_reduce(&h);
        assert_eq!(red.rank, 3);
        assert_eq!(red.pivot_columns, vec![0, 1, 2]);
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        let h = CheckMatrix::from_dense(&[vec![0, 0, 0], vec![0, 0, 0]]);
        assert_eq!(gf2_row_reduce(&h).rank, 0);
    }

    #[test]
    fn dependent_rows() {
        let h = CheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]);
        let red = gf2_row_reduce(&h);
        assert_eq!(red.rank, 2);
        assert_eq!(red.pivot_columns, vec![0, 1]);
        assert!(red.rows[2].is_zero());
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let h = CheckMatrix::from_dense(&[vec![1, 1, 0, 1, 0], vec![0, 1, 1, 0, 1]]);
        let ker = kernel_basis(&h);
        assert_eq!(ker.len(), 3);
        for v in &ker {
            let f = crate::sparse::IndexSet::from_unsorted(v.ones());
            assert!(h.syndrome_of(&f).is_empty());
        }
    }

    #[test]
    fn bitrow_ones_iterates_across_words() {
        let r = BitRow::from_indices(200, [0, 63, 64, 130, 199]);
        assert_eq!(r.ones().collect::<Vec<_>>(), vec![0, 63, 64, 130, 199]);
        assert_eq!(r.count_ones(), 5);
    }

    #[test]
    fn column_span_membership() {
        let h = CheckMatrix::from_dense(&[vec![1], vec![0]]);
        assert!(in_column_span(&h, &crate::sparse::IndexSet::singleton(0)));
        assert!(!in_column_span(&h, &crate::sparse::IndexSet::singleton(1)));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rank_bounded_and_kernel_dimension(rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 9), 1..7)) {
                let dense: Vec<Vec<u8>> = rows.iter().map(|r| r.iter().map(|&b| b as u8).collect()).collect();
                let h = CheckMatrix::from_dense(&dense);
                let red = gf2_row_reduce(&h);
                prop_assert!(red.rank <= h.num_rows().min(h.num_cols()));
                prop_assert_eq!(kernel_basis(&h).len(), h.num_cols() - red.rank);
                prop_assert!(red.pivot_columns.windows(2).all(|w| w[0] < w[1]));
                prop_assert_eq!(rank(&h.transpose()), red.rank);
            }
        }
    }
}
