//! Flooding min-sum belief propagation with column decimation and buffered
//! log-probability-ratio (LPR) output.

use crate::error::{Error, Result};
use crate::sparse::{CheckMatrix, FaultSet, IndexSet, Syndrome, WeightVector};

/// Magnitude of a check-to-fault message when the check has no other
/// (undecimated) neighbour. The minimum over an empty set is unbounded; this
/// keeps every message finite while still dominating any prior.
pub const FORCED_MESSAGE: f64 = 1.0e4;

/// How the buffered LPR is formed from the last `buffer_len` rounds.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum BufferMode {
    /// Arithmetic mean.
    #[default]
    Mean,
    /// Plain sum, no normalisation.
    Sum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BpConfig {
    /// Maximum number of iterations (`t_end`).
    pub max_iter: usize,
    /// Number of final rounds averaged into the buffered LPR (`l_buff`).
    pub buffer_len: usize,
    pub buffer_mode: BufferMode,
}

impl BpConfig {
    pub fn new(max_iter: usize, buffer_len: usize) -> Result<Self> {
        if max_iter == 0 || buffer_len == 0 || buffer_len > max_iter {
            return Err(Error::InvalidParameter(format!(
                "BP needs t_end >= 1 and 1 <= l_buff <= t_end (got t_end = {max_iter}, l_buff = {buffer_len})"
            )));
        }
        Ok(BpConfig { max_iter, buffer_len, buffer_mode: BufferMode::Mean })
    }

    pub fn with_buffer_mode(mut self, mode: BufferMode) -> Self {
        self.buffer_mode = mode;
        self
    }
}

impl Default for BpConfig {
    fn default() -> Self {
        BpConfig { max_iter: 12, buffer_len: 8, buffer_mode: BufferMode::Mean }
    }
}

#[derive(Clone, Debug)]
pub struct BpResult {
    /// Final LPR `Lambda_BP(j)` per original fault index; `NaN` for decimated faults.
    pub lpr: Vec<f64>,
    /// Buffered LPR per original fault index; `NaN` for decimated faults.
    pub lpr_buffered: Vec<f64>,
    /// Hard decision `{ j : lpr_j < 0 }` from the final iteration.
    pub estimate: FaultSet,
    pub converged: bool,
    pub iterations_run: usize,
}

impl BpResult {
    pub fn lpr(&self, j: usize) -> Option<f64> {
        Some(self.lpr[j]).filter(|x| !x.is_nan())
    }

    pub fn lpr_buffered(&self, j: usize) -> Option<f64> {
        Some(self.lpr_buffered[j]).filter(|x| !x.is_nan())
    }
}

/// Runs min-sum BP for `syndrome` on `H` with the columns in `decimation` removed.
pub fn bp_decode(
    h: &CheckMatrix,
    weights: &WeightVector,
    syndrome: &Syndrome,
    decimation: &FaultSet,
    cfg: &BpConfig,
) -> BpResult {
    let n = h.num_cols();
    let m = h.num_rows();
    assert_eq!(weights.len(), n, "weight vector length must match N");
    let mut removed = vec![false; n];
    for j in decimation.iter() {
        removed[j] = true;
    }
    let mut target = vec![false; m];
    for i in syndrome.iter() {
        target[i] = true;
    }
    let prior: Vec<f64> = (0..n)
        .map(|j| if removed[j] { f64::NAN } else { weights.prior_llr(j) })
        .collect();

    // Fault-to-check messages live on edges; edges of removed faults are ignored.
    let edges = h.num_edges();
    let mut to_check = vec![0.0f64; edges];
    let mut to_fault = vec![0.0f64; edges];
    for j in (0..n).filter(|&j| !removed[j]) {
        for &e in h.col_edges(j) {
            to_check[e as usize] = prior[j];
        }
    }

    let mut lpr = prior.clone();
    let buffer_len = cfg.buffer_len.max(1);
    let mut history = vec![0.0f64; buffer_len * n];
    let mut filled = 0usize;

    let finish = |lpr: Vec<f64>, history: &[f64], filled: usize, converged: bool, iterations_run: usize| {
        let estimate = IndexSet::from_sorted(
            (0..n).filter(|&j| !removed[j] && lpr[j] < 0.0).map(|j| j as u32).collect(),
        );
        let lpr_buffered = if filled == 0 {
            lpr.clone()
        } else {
            let count = filled.min(buffer_len);
            (0..n)
                .map(|j| {
                    if removed[j] {
                        return f64::NAN;
                    }
                    let s: f64 = (0..count).map(|slot| history[slot * n + j]).sum();
                    match cfg.buffer_mode {
                        BufferMode::Mean => s / count as f64,
                        BufferMode::Sum => s,
                    }
                })
                .collect()
        };
        BpResult { lpr, lpr_buffered, estimate, converged, iterations_run }
    };

    // With all priors positive the initial hard decision is empty.
    if syndrome.is_empty() {
        return finish(lpr, &history, 0, true, 0);
    }

    let mut parity = vec![false; m];
    for t in 1..=cfg.max_iter {
        // Check-to-fault update.
        for (i, &unsatisfied) in target.iter().enumerate() {
            let start = h.row_edge_start(i);
            let row = h.row(i);
            let mut sign_neg = unsatisfied;
            let (mut min1, mut min2) = (f64::INFINITY, f64::INFINITY);
            let mut argmin = usize::MAX;
            for (k, &j) in row.iter().enumerate() {
                if removed[j as usize] {
                    continue;
                }
                let msg = to_check[start + k];
                if msg < 0.0 {
                    sign_neg = !sign_neg;
                }
                let mag = msg.abs();
                if mag < min1 {
                    min2 = min1;
                    min1 = mag;
                    argmin = k;
                } else if mag < min2 {
                    min2 = mag;
                }
            }
            for (k, &j) in row.iter().enumerate() {
                if removed[j as usize] {
                    continue;
                }
                let msg = to_check[start + k];
                let own_neg = msg < 0.0;
                let mag = if k == argmin { min2 } else { min1 };
                let mag = if mag.is_finite() { mag } else { FORCED_MESSAGE };
                let negative = sign_neg ^ own_neg;
                to_fault[start + k] = if negative { -mag } else { mag };
            }
        }
        // LPR and fault-to-check update.
        for j in 0..n {
            if removed[j] {
                continue;
            }
            let incoming: f64 = h.col_edges(j).iter().map(|&e| to_fault[e as usize]).sum();
            let lambda = prior[j] + incoming;
            lpr[j] = lambda;
            for &e in h.col_edges(j) {
                to_check[e as usize] = lambda - to_fault[e as usize];
            }
        }
        let slot = (t - 1) % buffer_len;
        history[slot * n..(slot + 1) * n].copy_from_slice(&lpr);
        filled += 1;

        // Convergence test: H * estimate == syndrome.
        parity.iter_mut().for_each(|p| *p = false);
        for j in (0..n).filter(|&j| !removed[j] && lpr[j] < 0.0) {
            for &i in h.col(j) {
                parity[i as usize] ^= true;
            }
        }
        if parity == target {
            return finish(lpr, &history, filled, true, t);
        }
    }
    finish(lpr, &history, filled, false, cfg.max_iter)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::color_code;

    fn rep3() -> CheckMatrix {
        CheckMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]])
    }

    #[test]
    fn empty_syndrome_converges_immediately() {
        let h = rep3();
        let w = WeightVector::uniform(3, 0.1).unwrap();
        let r = bp_decode(&h, &w, &IndexSet::new(), &IndexSet::new(), &BpConfig::default());
        assert!(r.converged);
        assert_eq!(r.iterations_run, 0);
        assert!(r.estimate.is_empty());
        assert!(r.lpr_buffered.iter().all(|&x| (x - 9f64.ln()).abs() < 1e-12));
    }

    #[test]
    fn repetition_code_single_flip() {
        let h = rep3();
        let w = WeightVector::uniform(3, 0.1).unwrap();
        let r = bp_decode(&h, &w, &IndexSet::singleton(0), &IndexSet::new(), &BpConfig::default());
        assert!(r.converged);
        assert_eq!(r.estimate, IndexSet::singleton(0));
    }

    /// Exact bitwise MAP on the tree-shaped repetition code by enumeration of
    /// all 8 patterns; min-sum must agree on the hard decision.
    #[test]
    fn repetition_code_matches_enumeration() {
        let h = rep3();
        let w = WeightVector::uniform(3, 0.1).unwrap();
        for s in 0..4usize {
            let syndrome: Syndrome = (0..2).filter(|b| s >> b & 1 == 1).collect();
            let best = (0..8usize)
                .map(|f| (0..3).filter(|b| f >> b & 1 == 1).collect::<FaultSet>())
                .filter(|f| h.syndrome_of(f) == syndrome)
                .min_by_key(|f| f.len())
                .unwrap();
            let r = bp_decode(&h, &w, &syndrome, &IndexSet::new(), &BpConfig::default());
            assert!(r.converged);
            assert_eq!(r.estimate, best, "syndrome {syndrome:?}");
        }
    }

    #[test]
    fn color_code_single_faults() {
        let code = color_code(3).unwrap();
        let w = WeightVector::uniform(code.n, 0.01).unwrap();
        let cfg = BpConfig::new(12, 8).unwrap();
        for j in 0..code.n {
            let s = code.hx.syndrome_of(&IndexSet::singleton(j));
            let r = bp_decode(&code.hx, &w, &s, &IndexSet::new(), &cfg);
            assert!(r.converged, "fault {j}");
            assert_eq!(code.hx.syndrome_of(&r.estimate), s);
            if code.hx.col(j).len() == 3 {
                // The centre qubit: every check sees two negative neighbour
                // messages after one round, so four LPRs go negative at once.
                assert_eq!(r.estimate, IndexSet::from_unsorted([1, 2, 3, 5]));
                assert_eq!(r.iterations_run, 1);
            } else {
                assert_eq!(r.estimate, IndexSet::singleton(j));
            }
        }
    }

    #[test]
    fn decimated_faults_are_excluded() {
        let h = rep3();
        let w = WeightVector::uniform(3, 0.1).unwrap();
        let r = bp_decode(&h, &w, &IndexSet::singleton(0), &IndexSet::singleton(0), &BpConfig::default());
        assert!(r.lpr(0).is_none());
        assert!(!r.estimate.contains(0));
        // Check 0 now only sees fault 1, which must flip; that also flips check 1,
        // which fault 2 must then cancel.
        assert!(r.converged);
        assert_eq!(r.estimate, IndexSet::from_unsorted([1, 2]));
    }

    #[test]
    fn unsatisfiable_check_never_converges() {
        let h = CheckMatrix::from_dense(&[vec![1], vec![0]]);
        let w = WeightVector::uniform(1, 0.1).unwrap();
        let r = bp_decode(&h, &w, &IndexSet::singleton(1), &IndexSet::new(), &BpConfig::new(5, 2).unwrap());
        assert!(!r.converged);
        assert_eq!(r.iterations_run, 5);
    }

    #[test]
    fn buffer_modes_differ_by_constant_factor() {
        let code = color_code(5).unwrap();
        let w = WeightVector::uniform(code.n, 0.05).unwrap();
        let s = code.hx.syndrome_of(&IndexSet::from_unsorted([0, 4, 9]));
        let mean_cfg = BpConfig::new(6, 3).unwrap();
        let a = bp_decode(&code.hx, &w, &s, &IndexSet::new(), &mean_cfg);
        let b = bp_decode(&code.hx, &w, &s, &IndexSet::new(), &mean_cfg.with_buffer_mode(BufferMode::Sum));
        let count = a.iterations_run.min(3) as f64;
        for j in 0..code.n {
            assert!((a.lpr_buffered[j] * count - b.lpr_buffered[j]).abs() < 1e-9);
        }
    }

    #[test]
    fn config_validation() {
        assert!(BpConfig::new(0, 1).is_err());
        assert!(BpConfig::new(3, 4).is_err());
        assert!(BpConfig::new(3, 0).is_err());
        assert!(BpConfig::new(3, 3).is_ok());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn invariants_on_color_code(faults in proptest::collection::btree_set(0usize..19, 0..5),
                                        dec in proptest::collection::btree_set(0usize..19, 0..4)) {
                let code = color_code(5).unwrap();
                let w = WeightVector::uniform(code.n, 0.05).unwrap();
                let f: FaultSet = faults.into_iter().collect();
                let d: FaultSet = dec.into_iter().collect();
                let s = code.hx.syndrome_of(&f);
                let cfg = BpConfig::new(12, 4).unwrap();
                let r = bp_decode(&code.hx, &w, &s, &d, &cfg);
                let again = bp_decode(&code.hx, &w, &s, &d, &cfg);
                prop_assert!(r.estimate.is_disjoint(&d));
                if r.converged {
                    prop_assert_eq!(code.hx.syndrome_of(&r.estimate), s.clone());
                }
                for j in 0..code.n {
                    if d.contains(j) {
                        prop_assert!(r.lpr[j].is_nan());
                    } else {
                        prop_assert!(r.lpr[j].is_finite() && r.lpr_buffered[j].is_finite());
                    }
                }
                prop_assert_eq!(r.estimate, again.estimate);
                prop_assert_eq!(r.lpr.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
                                again.lpr.iter().map(|x| x.to_bits()).collect::<Vec<_>>());
            }
        }
    }
}
