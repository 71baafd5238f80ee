//! CSV emission of run series: `t,hit_rate,fetch_rate,norm_regret,cum_reward,switch_cost`.
//!
//! Floats use Rust's shortest round-trip formatting, `.` as decimal separator
//! and LF line endings, so parsing a file recovers the emitted values exactly.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::run::AggregateSeries;
use crate::error::{Error, Result};
use crate::metrics::RunSeries;

pub const CSV_HEADER: &str = "t,hit_rate,fetch_rate,norm_regret,cum_reward,switch_cost";

/// One emitted row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvRow {
    pub t: u64,
    pub hit_rate: f64,
    pub fetch_rate: f64,
    pub norm_regret: f64,
    pub cum_reward: f64,
    pub switch_cost: f64,
}

/// Anything that yields one row per slot.
pub trait SlotRows {
    fn slots(&self) -> usize;
    fn row(&self, index: usize) -> CsvRow;
}

impl SlotRows for RunSeries {
    fn slots(&self) -> usize {
        self.len()
    }

    fn row(&self, i: usize) -> CsvRow {
        CsvRow {
            t: i as u64 + 1,
            hit_rate: self.hit_rate(i),
            fetch_rate: self.fetch_rate[i],
            norm_regret: self.norm_regret(i),
            cum_reward: self.cum_reward[i],
            switch_cost: self.switching_cost(i),
        }
    }
}

impl SlotRows for AggregateSeries {
    fn slots(&self) -> usize {
        self.len()
    }

    fn row(&self, i: usize) -> CsvRow {
        CsvRow {
            t: i as u64 + 1,
            hit_rate: self.hit_rate.mean[i],
            fetch_rate: self.fetch_rate.mean[i],
            norm_regret: self.norm_regret.mean[i],
            cum_reward: self.cum_reward.mean[i],
            switch_cost: self.switch_cost.mean[i],
        }
    }
}

/// Slots kept under subsampling: every `every`-th slot plus the last one.
pub fn subsampled_slots(len: usize, every: usize) -> impl Iterator<Item = usize> {
    let every = every.max(1);
    (0..len).filter(move |&i| (i + 1) % every == 0 || i + 1 == len)
}

pub fn write_csv(rows: &impl SlotRows, out: &mut impl Write, every: usize) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for i in subsampled_slots(rows.slots(), every) {
        let r = rows.row(i);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            r.t, r.hit_rate, r.fetch_rate, r.norm_regret, r.cum_reward, r.switch_cost
        )?;
    }
    Ok(())
}

/// Writes `rows` to `path`, keeping every `every`-th slot plus the final one.
pub fn emit_csv(rows: &impl SlotRows, path: &Path, every: usize) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv(rows, &mut out, every)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut lines = text.lines();
    if lines.next() != Some(CSV_HEADER) {
        return Err(Error::InvalidTrace(
            "missing or unexpected CSV header".into(),
        ));
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || Error::InvalidTrace(format!("malformed CSV row {}: {line:?}", i + 2));
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 6 {
                return Err(bad());
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
            Ok(CsvRow {
                t: f[0].parse().map_err(|_| bad())?,
                hit_rate: num(f[1])?,
                fetch_rate: num(f[2])?,
                norm_regret: num(f[3])?,
                cum_reward: num(f[4])?,
                switch_cost: num(f[5])?,
            })
        })
        .collect()
}
