//! BP-OSD: ordered statistics post-processing of BP soft output.
//!
//! Columns are sorted by ascending LPR (most likely fault first). The first
//! `rank(H)` independent columns in that order form the basis block `S`, the
//! rest form `T`. For a choice `t` of `T` columns the unique completion on `S`
//! gives a correction; OSD-0 uses `t = 0`, higher orders sweep a candidate set
//! of `t` vectors and keep the lightest result.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bp::{bp_decode, BpConfig};
use crate::dtd::{DecodeOutcome, Status};
use crate::gf2::{row_reduce_rows, BitRow};
use crate::sparse::{CheckMatrix, DecodingProblem, FaultSet, IndexSet, Syndrome, WeightVector};

/// Default sweep depth for the combination sweep.
pub const DEFAULT_OSD_ORDER: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OsdOrder {
    /// OSD-0 only.
    Zero,
    /// All weight-1 `t` plus weight-2 `t` on the first `lambda` columns of `T`.
    CombinationSweep(usize),
    /// All `2^lambda` vectors on the first `lambda` columns of `T`.
    Exhaustive(usize),
}

/// Column-reordered echelon form of `[H | sigma]`.
#[derive(Clone, Debug)]
pub struct OsdDecomposition {
    /// Original column index at each permuted position.
    pub permutation: Vec<usize>,
    pub rank: usize,
    /// Original column indices of the basis block `S`, in pivot order.
    pub basis_columns: Vec<usize>,
    /// Original column indices of the remainder block `T`, in LPR order.
    pub other_columns: Vec<usize>,
    /// `x` with `S x = sigma`, indexed like `basis_columns`.
    x: BitRow,
    /// `S^{-1} T_k` for each remainder column `k`.
    completion: Vec<BitRow>,
}

impl OsdDecomposition {
    /// Returns `None` when `sigma` is outside the column span of `H`.
    pub fn new(h: &CheckMatrix, syndrome: &Syndrome, lpr: &[f64]) -> Option<Self> {
        let n = h.num_cols();
        let mut permutation: Vec<usize> = (0..n).collect();
        permutation.sort_by(|&a, &b| lpr[a].total_cmp(&lpr[b]).then(a.cmp(&b)));
        let mut position = vec![0usize; n];
        for (pos, &j) in permutation.iter().enumerate() {
            position[j] = pos;
        }
        // Augmented rows in permuted column order; column n holds sigma.
        let rows: Vec<BitRow> = (0..h.num_rows())
            .map(|i| {
                let mut r = BitRow::from_indices(n + 1, h.row(i).iter().map(|&j| position[j as usize]));
                if syndrome.contains(i) {
                    r.set(n, true);
                }
                r
            })
            .collect();
        let red = row_reduce_rows(rows, n);
        if red.rows[red.rank..].iter().any(|r| r.get(n)) {
            return None;
        }
        let rank = red.rank;
        let mut is_pivot = vec![false; n];
        for &p in &red.pivot_columns {
            is_pivot[p] = true;
        }
        let basis_columns = red.pivot_columns.iter().map(|&p| permutation[p]).collect();
        let others: Vec<usize> = (0..n).filter(|&p| !is_pivot[p]).collect();
        let x = BitRow::from_indices(rank, (0..rank).filter(|&k| red.rows[k].get(n)));
        let completion = others
            .iter()
            .map(|&p| BitRow::from_indices(rank, (0..rank).filter(|&k| red.rows[k].get(p))))
            .collect();
        Some(OsdDecomposition {
            other_columns: others.iter().map(|&p| permutation[p]).collect(),
            permutation,
            rank,
            basis_columns,
            x,
            completion,
        })
    }

    /// Correction for a choice of remainder columns (positions into `other_columns`).
    pub fn correction(&self, t: &[usize]) -> FaultSet {
        let mut s = self.x.clone();
        for &k in t {
            s.xor_assign(&self.completion[k]);
        }
        s.ones()
            .map(|k| self.basis_columns[k])
            .chain(t.iter().map(|&k| self.other_columns[k]))
            .collect()
    }
}

/// Result of the OSD stage.
#[derive(Clone, Debug)]
pub struct OsdSolution {
    pub correction: FaultSet,
    /// Number of `t` vectors evaluated by the sweep, excluding OSD-0.
    pub candidates: usize,
}

/// OSD with the given column reliabilities; `None` if `sigma` is not in the span of `H`.
pub fn osd_decode(
    h: &CheckMatrix,
    weights: &WeightVector,
    syndrome: &Syndrome,
    lpr: &[f64],
    order: OsdOrder,
) -> Option<OsdSolution> {
    let dec = OsdDecomposition::new(h, syndrome, lpr)?;
    debug_assert_eq!(h.syndrome_of(&dec.correction(&[])), *syndrome);
    let free = dec.other_columns.len();
    let mut best = dec.correction(&[]);
    let mut best_weight = weights.weight_of(&best);
    let mut candidates = 0usize;
    let mut consider = |t: &[usize]| {
        candidates += 1;
        let f = dec.correction(t);
        let w = weights.weight_of(&f);
        // Strict improvement keeps the first candidate on ties.
        if w < best_weight {
            best = f;
            best_weight = w;
        }
    };
    match order {
        OsdOrder::Zero => {}
        OsdOrder::CombinationSweep(lambda) => {
            let lambda = lambda.min(free);
            for k in 0..free {
                consider(&[k]);
            }
            for a in 0..lambda {
                for b in a + 1..lambda {
                    consider(&[a, b]);
                }
            }
        }
        OsdOrder::Exhaustive(lambda) => {
            let lambda = lambda.min(free);
            let mut t = Vec::with_capacity(lambda);
            for mask in 0u64..(1u64 << lambda) {
                t.clear();
                t.extend((0..lambda).filter(|&k| mask >> k & 1 == 1));
                consider(&t);
            }
        }
    }
    Some(OsdSolution { correction: best, candidates })
}

/// Number of `t` vectors the sweep evaluates for `N - rank = free`.
pub fn candidate_count(order: OsdOrder, free: usize) -> usize {
    match order {
        OsdOrder::Zero => 0,
        OsdOrder::CombinationSweep(lambda) => {
            let l = lambda.min(free);
            free + l * l.saturating_sub(1) / 2
        }
        OsdOrder::Exhaustive(lambda) => 1 << lambda.min(free),
    }
}

#[derive(Clone, Debug)]
pub struct BpOsdOutcome {
    pub outcome: DecodeOutcome,
    pub bp_converged: bool,
    pub candidates: usize,
}

/// BP followed by OSD on the final LPRs.
///
/// The OSD stage runs even when BP converges, and the lighter of the BP
/// estimate and the OSD result is returned.
pub fn bp_osd_decode(problem: &DecodingProblem, syndrome: &Syndrome, bp_cfg: &BpConfig, order: OsdOrder) -> BpOsdOutcome {
    let start = Instant::now();
    let h = &problem.check;
    let w = &problem.weights;
    let bp = bp_decode(h, w, syndrome, &IndexSet::new(), bp_cfg);
    let osd = osd_decode(h, w, syndrome, &bp.lpr, order);
    let (status, correction, candidates) = match osd {
        None => (Status::NoSolution, None, 0),
        Some(sol) => {
            let pick_bp = bp.converged && w.weight_of(&bp.estimate) <= w.weight_of(&sol.correction);
            let c = if pick_bp { bp.estimate.clone() } else { sol.correction };
            (Status::Found, Some(c), sol.candidates)
        }
    };
    BpOsdOutcome {
        outcome: DecodeOutcome { status, correction, explored: 0, elapsed: start.elapsed(), nodes_seen: 0 },
        bp_converged: bp.converged,
        candidates,
    }
}
