//! Pair sequences: the vanishing-length diagnostic and greedy extraction of a
//! subsequence whose molecules satisfy a certified ℓ1 lower bound.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Options;
use crate::interpolation::{compute_n, decide_interpolating};
use crate::metric::{PairSet, PointedMetricSpace};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NecessaryReport {
    pub distances: Vec<f64>,
    pub decreasing_trend: bool,
    /// Largest `d(x_n, y_n)` over the final quarter of the sequence.
    pub tail_max: f64,
    pub note: &'static str,
}

/// Interpolating sequences in compact spaces have `d(x_n, y_n) → 0`; a finite
/// prefix can only hint at that, so this reports whether the final quarter
/// stays strictly below the overall maximum.
pub fn necessary_condition_check(space: &PointedMetricSpace, pairs: &PairSet) -> NecessaryReport {
    let distances: Vec<f64> = pairs.pairs().iter().map(|&(x, y)| space.dist(x, y)).collect();
    let n = distances.len();
    let tail = n.div_ceil(4);
    let tail_max = distances[n - tail..].iter().copied().fold(0.0, f64::max);
    let overall = distances.iter().copied().fold(0.0, f64::max);
    NecessaryReport {
        decreasing_trend: n <= 1 || tail_max < overall,
        distances,
        tail_max,
        note: "finite horizon: convergence to zero cannot be decided",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionConfig {
    pub epsilon: f64,
    /// `ε_k`, one per selected index; `Π (1 − ε_k) > 1 − ε`.
    pub schedule: Vec<f64>,
    pub max_prefix: usize,
    /// Fail with `NoAdmissibleCandidate` unless `max_prefix` indices (or the
    /// whole sequence) get selected.
    pub require_full: bool,
}

impl ExtractionConfig {
    /// Geometric schedule `ε_k = ε / 2^k`, whose product exceeds `1 − ε`.
    pub fn new(epsilon: f64, max_prefix: usize) -> Result<Self> {
        let schedule = (1..=max_prefix).map(|k| epsilon / 2f64.powi(k as i32)).collect();
        Self::with_schedule(epsilon, schedule, max_prefix)
    }

    pub fn with_schedule(epsilon: f64, schedule: Vec<f64>, max_prefix: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParams(format!("epsilon {epsilon} is outside (0, 1)")));
        }
        if max_prefix == 0 || schedule.len() < max_prefix {
            return Err(Error::InvalidParams("the schedule needs one entry per selected index".into()));
        }
        if schedule.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
            return Err(Error::InvalidParams("schedule entries must lie in (0, 1)".into()));
        }
        let product: f64 = schedule.iter().map(|e| 1.0 - e).product();
        if product <= 1.0 - epsilon - 1e-12 {
            return Err(Error::InvalidParams(format!("schedule product {product} does not exceed 1 - epsilon")));
        }
        Ok(ExtractionConfig { epsilon, schedule, max_prefix, require_full: false })
    }

    /// `Π_{k ≤ len} (1 − ε_k)`.
    pub fn threshold(&self, len: usize) -> f64 {
        self.schedule[..len].iter().map(|e| 1.0 - e).product()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExtractionResult {
    pub selected: Vec<usize>,
    #[serde(rename = "certified_N")]
    pub certified_n: f64,
    #[serde(rename = "certified_M_bound")]
    pub certified_m_bound: f64,
    pub schedule: Vec<f64>,
}

/// Scan the sequence in order, accepting a candidate when the selected prefix
/// plus the candidate still has `N ≥ Π (1 − ε_k)`.
pub fn greedy_extract(
    space: &PointedMetricSpace,
    pairs: &PairSet,
    cfg: &ExtractionConfig,
    opts: &Options,
) -> Result<ExtractionResult> {
    if pairs.is_empty() {
        return Err(Error::InvalidParams("the sequence is empty".into()));
    }
    let mut selected = vec![0];
    let mut certified = compute_n(space, &pairs.select(&selected), opts)?.value;
    for c in 1..pairs.len() {
        if selected.len() >= cfg.max_prefix {
            break;
        }
        let mut trial = selected.clone();
        trial.push(c);
        let sub = pairs.select(&trial);
        if !decide_interpolating(space, &sub).interpolating {
            continue;
        }
        let n = compute_n(space, &sub, opts)?.value;
        if n >= cfg.threshold(trial.len()) - 1e-12 {
            selected = trial;
            certified = n;
        }
    }
    if cfg.require_full && selected.len() < cfg.max_prefix.min(pairs.len()) {
        return Err(Error::NoAdmissibleCandidate { prefix: selected });
    }
    Ok(ExtractionResult {
        schedule: cfg.schedule[..selected.len()].to_vec(),
        selected,
        certified_n: certified,
        certified_m_bound: 1.0 / certified,
    })
}
