//! Noise sampling, Monte-Carlo evaluation and summary statistics.

use std::io::Write;
use std::time::Duration;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bp::BpConfig;
use crate::dtd::{DecodeOptions, DecodeOutcome, Status, Strategy};
use crate::error::{Error, Result};
use crate::osd::{bp_osd_decode, OsdOrder};
use crate::sparse::{DecodingProblem, FaultSet, IndexSet, Syndrome, WeightVector};

/// Half-width parameter of the Wilson score interval.
pub const WILSON_Z: f64 = 2.0;

/// Uniformly random `w`-subset of `0..n`.
pub fn sample_fixed_weight<R: Rng + ?Sized>(n: usize, w: usize, rng: &mut R) -> Result<FaultSet> {
    if w > n {
        return Err(Error::InvalidParameter(format!("cannot draw {w} faults out of {n}")));
    }
    Ok(sample(rng, n, w).into_iter().collect())
}

/// Each fault independently with its prior probability.
pub fn sample_iid<R: Rng + ?Sized>(weights: &WeightVector, rng: &mut R) -> FaultSet {
    IndexSet::from_sorted(
        weights
            .priors()
            .iter()
            .enumerate()
            .filter(|&(_, &p)| rng.gen::<f64>() < p)
            .map(|(j, _)| j as u32)
            .collect(),
    )
}

/// Wilson score interval with `z = 2`, clamped to `[0, 1]`.
pub fn wilson_interval(failures: usize, trials: usize) -> (f64, f64) {
    assert!(trials >= 1 && failures <= trials, "need 0 <= failures <= trials and trials >= 1");
    let n = trials as f64;
    let p = failures as f64 / n;
    let z2 = WILSON_Z * WILSON_Z;
    let scale = 1.0 / (1.0 + z2 / n);
    let center = p + z2 / (2.0 * n);
    let half = WILSON_Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (((center - half) * scale).max(0.0), ((center + half) * scale).min(1.0))
}

/// Nearest-rank percentile: the `ceil(q n)`-th smallest value (`q` in `[0, 1]`).
pub fn percentile<T: Copy + Ord>(values: &[T], q: f64) -> Option<T> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_unstable();
    let rank = ((q * v.len() as f64).ceil() as usize).clamp(1, v.len());
    Some(v[rank - 1])
}

/// Bootstrap standard error of the nearest-rank percentile.
pub fn bootstrap_percentile_error(values: &[usize], q: f64, resamples: usize, seed: u64) -> Option<f64> {
    if values.is_empty() || resamples == 0 {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let estimates: Vec<f64> = (0..resamples)
        .map(|_| {
            let draw: Vec<usize> = (0..values.len()).map(|_| values[rng.gen_range(0..values.len())]).collect();
            percentile(&draw, q).unwrap() as f64
        })
        .collect();
    let mean = estimates.iter().sum::<f64>() / resamples as f64;
    let var = estimates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / resamples as f64;
    Some(var.sqrt())
}

/// A decoder together with its settings.
#[derive(Clone, Debug)]
pub enum Decoder {
    Dtd { strategy: Strategy, options: DecodeOptions },
    BpOsd { bp: BpConfig, order: OsdOrder },
}

impl Decoder {
    pub fn decode(&self, problem: &DecodingProblem, syndrome: &Syndrome) -> DecodeOutcome {
        match self {
            Decoder::Dtd { strategy, options } => strategy.decode(problem, syndrome, options),
            Decoder::BpOsd { bp, order } => bp_osd_decode(problem, syndrome, bp, *order).outcome,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseSpec {
    /// Uniformly random fault sets of fixed size.
    FixedWeight(usize),
    /// Independent faults with the problem's priors.
    Iid,
}

/// One Monte-Carlo trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub trial: u64,
    /// Master seed; the trial generator is the ChaCha8 stream `trial` of it.
    pub seed: u64,
    pub true_fault: FaultSet,
    pub status: Status,
    /// Meaningful only when `status` is `found`; false otherwise.
    pub success: bool,
    pub nu: usize,
    /// Decode wall-clock time, present when timing is recorded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ns: Option<u64>,
}

/// Per-trial generator.
pub fn trial_rng(master_seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(trial);
    rng
}

/// Whether `correction` matches the syndrome and logical action of `fault`.
pub fn is_success(problem: &DecodingProblem, fault: &FaultSet, correction: &FaultSet) -> bool {
    problem.check.syndrome_of(correction) == problem.check.syndrome_of(fault)
        && problem.logical_action(correction) == problem.logical_action(fault)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalStats {
    pub trials: usize,
    pub failures: usize,
    pub p_l: f64,
    pub wilson_lo: f64,
    pub wilson_hi: f64,
    pub found: usize,
    pub no_solution: usize,
    pub cap_exceeded: usize,
    pub timed_out: usize,
    pub nu_p50: usize,
    pub nu_p95: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_p50_ns: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_p95_ns: Option<u64>,
}

impl EvalStats {
    pub fn from_records(records: &[SampleRecord]) -> Self {
        let trials = records.len();
        let failures = records.iter().filter(|r| !r.success).count();
        let count = |s| records.iter().filter(|r| r.status == s).count();
        let nu: Vec<usize> = records.iter().map(|r| r.nu).collect();
        let times: Vec<u64> = records.iter().filter_map(|r| r.elapsed_ns).collect();
        let timed = times.len() == trials && trials > 0;
        let (wilson_lo, wilson_hi) = if trials > 0 { wilson_interval(failures, trials) } else { (0.0, 1.0) };
        EvalStats {
            trials,
            failures,
            p_l: if trials > 0 { failures as f64 / trials as f64 } else { 0.0 },
            wilson_lo,
            wilson_hi,
            found: count(Status::Found),
            no_solution: count(Status::NoSolution),
            cap_exceeded: count(Status::CapExceeded),
            timed_out: count(Status::TimedOut),
            nu_p50: percentile(&nu, 0.5).unwrap_or(0),
            nu_p95: percentile(&nu, 0.95).unwrap_or(0),
            time_p50_ns: timed.then(|| percentile(&times, 0.5).unwrap()),
            time_p95_ns: timed.then(|| percentile(&times, 0.95).unwrap()),
        }
    }
}

#[derive(Clone, Debug)]
pub struct EvalConfig {
    pub noise: NoiseSpec,
    pub trials: usize,
    pub master_seed: u64,
    /// Worker threads; `0` uses the rayon default.
    pub workers: usize,
    /// Record decode times (makes the output machine-dependent).
    pub timing: bool,
}

/// Runs one trial.
pub fn run_trial(problem: &DecodingProblem, decoder: &Decoder, cfg: &EvalConfig, trial: u64) -> Result<SampleRecord> {
    let mut rng = trial_rng(cfg.master_seed, trial);
    let fault = match cfg.noise {
        NoiseSpec::FixedWeight(w) => sample_fixed_weight(problem.num_faults(), w, &mut rng)?,
        NoiseSpec::Iid => sample_iid(&problem.weights, &mut rng),
    };
    let syndrome = problem.check.syndrome_of(&fault);
    let out = decoder.decode(problem, &syndrome);
    let success = out.correction.as_ref().is_some_and(|c| is_success(problem, &fault, c));
    Ok(SampleRecord {
        trial,
        seed: cfg.master_seed,
        true_fault: fault,
        status: out.status,
        success,
        nu: out.explored,
        // No decode takes zero time; a zero reading is clock granularity.
        elapsed_ns: cfg.timing.then(|| (out.elapsed.as_nanos() as u64).max(1)),
    })
}

/// Runs all trials in parallel and returns the records in trial order.
pub fn evaluate(problem: &DecodingProblem, decoder: &Decoder, cfg: &EvalConfig) -> Result<(EvalStats, Vec<SampleRecord>)> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let records: Vec<SampleRecord> = pool.install(|| {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| run_trial(problem, decoder, cfg, t))
            .collect::<Result<_>>()
    })?;
    Ok((EvalStats::from_records(&records), records))
}

/// Writes records as JSON lines.
pub fn write_jsonl<W: Write>(records: &[SampleRecord], mut out: W) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n")?;
    }
    out.flush()
}

/// Parses JSON lines written by [`write_jsonl`].
pub fn read_jsonl(text: &str, path: &std::path::Path) -> Result<Vec<SampleRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(k, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse { path: path.to_path_buf(), line: k + 1, message: e.to_string() })
        })
        .collect()
}

/// Failure probability under a time budget: a trial fails when it took
/// longer than `T` or finished within `T` with a wrong result.
pub fn cutoff_curve(records: &[SampleRecord], cutoffs: &[Duration]) -> Result<Vec<(Duration, f64)>> {
    if records.is_empty() {
        return Err(Error::InvalidParameter("cutoff curve needs at least one record".into()));
    }
    let times: Vec<(u64, bool)> = records
        .iter()
        .map(|r| {
            r.elapsed_ns.map(|t| (t, r.success)).ok_or_else(|| {
                Error::InvalidParameter(format!("record {} has no elapsed_ns (bench with --timing)", r.trial))
            })
        })
        .collect::<Result<_>>()?;
    Ok(cutoffs
        .iter()
        .map(|&c| {
            let limit = u64::try_from(c.as_nanos()).unwrap_or(u64::MAX);
            let fails = times.iter().filter(|&&(t, ok)| t > limit || !ok).count();
            (c, fails as f64 / times.len() as f64)
        })
        .collect())
}
