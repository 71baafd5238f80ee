//! Reward, regret and fetch-rate accounting over a completed run.

use crate::error::{Error, Result};
use crate::model::{FileId, StepRecord};
use crate::traces::RequestTrace;

/// Per-slot reward: unit reward on a hit minus `D/2` per unit of L1 movement.
pub fn step_reward(hit: bool, l1_change: u64, switch_cost: f64) -> f64 {
    let gain = if hit { 1.0 } else { 0.0 };
    gain - 0.5 * switch_cost * l1_change as f64
}

/// Fetch rate `FR_t = (Σ_{τ=2..t} l1_τ) / t` for slots `t = 1..`. With
/// `include_initial` the slot-1 movement is counted too.
pub fn fetch_rate_series(l1_changes: &[u64], include_initial: bool) -> Vec<f64> {
    let mut total = 0u64;
    l1_changes
        .iter()
        .enumerate()
        .map(|(i, &l1)| {
            if i > 0 || include_initial {
                total += l1;
            }
            total as f64 / (i + 1) as f64
        })
        .collect()
}

/// Sum of the `capacity` largest cumulative counts, maintained in O(1) per
/// request.
///
/// Tracks the C-th largest count `threshold`, how many files sit strictly
/// above it, and a histogram of count values. A request for a file whose
/// count was at least `threshold` raises the best static value by one;
/// otherwise the top-C multiset of counts is unchanged.
#[derive(Debug, Clone)]
pub struct PrefixBenchmark {
    counts: Vec<u64>,
    histogram: Vec<usize>,
    capacity: usize,
    threshold: u64,
    above: usize,
    value: u64,
}

impl PrefixBenchmark {
    pub fn new(num_files: usize, capacity: usize) -> Self {
        let capacity = capacity.min(num_files);
        PrefixBenchmark {
            counts: vec![0; num_files],
            histogram: vec![num_files],
            capacity,
            threshold: 0,
            above: 0,
            value: 0,
        }
    }

    /// Best static value `max_y <y, X_t>` so far.
    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn record(&mut self, file: FileId) {
        let old = self.counts[file];
        self.counts[file] = old + 1;
        self.histogram[old as usize] -= 1;
        if self.histogram.len() <= (old + 1) as usize {
            self.histogram.push(0);
        }
        self.histogram[(old + 1) as usize] += 1;

        if self.capacity == 0 {
            return;
        }
        if old >= self.threshold {
            self.value += 1;
        }
        if old == self.threshold {
            self.above += 1;
            if self.above >= self.capacity {
                self.threshold += 1;
                self.above -= self.histogram[self.threshold as usize];
            }
        }
    }
}

/// Per-slot and cumulative series of one run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunSeries {
    pub switch_cost: f64,
    pub hit: Vec<bool>,
    pub l1_change: Vec<u64>,
    pub reward: Vec<f64>,
    pub cum_hits: Vec<u64>,
    /// Cumulative `Σ l1_change`, i.e. twice the number of fetches when
    /// capacity stays full.
    pub cum_l1: Vec<u64>,
    pub cum_reward: Vec<f64>,
    pub benchmark: Vec<u64>,
    pub regret: Vec<f64>,
    pub fetch_rate: Vec<f64>,
}

impl RunSeries {
    pub fn len(&self) -> usize {
        self.hit.len()
    }

    pub fn is_empty(&self) -> bool {
        self.hit.is_empty()
    }

    pub fn hit_rate(&self, i: usize) -> f64 {
        self.cum_hits[i] as f64 / (i + 1) as f64
    }

    pub fn norm_regret(&self, i: usize) -> f64 {
        self.regret[i] / (i + 1) as f64
    }

    /// Cumulative switching cost `D/2 Σ l1`.
    pub fn switching_cost(&self, i: usize) -> f64 {
        0.5 * self.switch_cost * self.cum_l1[i] as f64
    }

    pub fn total_hits(&self) -> u64 {
        self.cum_hits.last().copied().unwrap_or(0)
    }

    pub fn total_l1(&self) -> u64 {
        self.cum_l1.last().copied().unwrap_or(0)
    }

    pub fn final_regret(&self) -> f64 {
        self.regret.last().copied().unwrap_or(0.0)
    }
}

/// Pathwise regret `R_t = max_y <y, X_t> - Σ hits + D/2 Σ l1` with the static
/// benchmark evaluated on the prefix counts at every slot.
pub fn regret_series(
    trace: &RequestTrace,
    records: &[StepRecord],
    capacity: usize,
    switch_cost: f64,
) -> Result<RunSeries> {
    if records.len() > trace.len() {
        return Err(Error::Shape {
            what: "step records vs trace length",
            expected: trace.len(),
            actual: records.len(),
        });
    }
    let mut bench = PrefixBenchmark::new(trace.num_files(), capacity);
    let mut series = RunSeries {
        switch_cost,
        ..RunSeries::default()
    };
    let (mut hits, mut l1, mut reward) = (0u64, 0u64, 0.0f64);
    for (i, (rec, &file)) in records.iter().zip(trace.requests()).enumerate() {
        if rec.requested != file || rec.t != (i + 1) as u64 {
            return Err(Error::InvalidTrace(format!(
                "record for slot {} does not match trace slot {}",
                rec.t,
                i + 1
            )));
        }
        bench.record(file);
        hits += rec.hit as u64;
        l1 += rec.l1_change;
        let r = step_reward(rec.hit, rec.l1_change, switch_cost);
        reward += r;

        series.hit.push(rec.hit);
        series.l1_change.push(rec.l1_change);
        series.reward.push(r);
        series.cum_hits.push(hits);
        series.cum_l1.push(l1);
        series.cum_reward.push(reward);
        series.benchmark.push(bench.value());
        series
            .regret
            .push(bench.value() as f64 - hits as f64 + 0.5 * switch_cost * l1 as f64);
    }
    series.fetch_rate = fetch_rate_series(&series.l1_change, false);
    Ok(series)
}
