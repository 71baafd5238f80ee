//! Online caching policies behind one decide/observe contract.
//!
//! Every slot runs `decide(t)` before the request is revealed and
//! `observe(f_t)` afterwards. FTPL moves its cache in `decide`; the classical
//! baselines only move on a miss inside `observe`. In both cases the step
//! record charges the L1 distance between the configuration at the end of
//! this slot and the one at the end of the previous slot, starting from an
//! empty cache.

mod baselines;
mod ftpl;
mod static_opt;

pub use baselines::{FifoState, LfuState, LruState};
pub use ftpl::FtplState;
pub use static_opt::{
    static_optimal, static_optimal_bruteforce, StaticOptimalResult, BRUTEFORCE_LIMIT,
};

use crate::error::{Error, Result};
use crate::model::{CacheConfig, Catalog, CumulativeCounts, FileId, StepRecord};
use crate::schedule::LearningRateSchedule;

/// Which policy to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    Ftpl(LearningRateSchedule),
    Lru,
    /// Classic LFU: every miss admits the requested file.
    Lfu,
    /// LFU that admits a missed file only when it is more frequent than the
    /// least frequent cached file.
    LfuAdmission,
    Fifo,
}

impl PolicySpec {
    pub fn name(&self) -> &'static str {
        match self {
            PolicySpec::Ftpl(LearningRateSchedule::Constant { .. }) => "ftpl",
            PolicySpec::Ftpl(LearningRateSchedule::AnytimeSqrt { .. }) => "ftpl-anytime",
            PolicySpec::Lru => "lru",
            PolicySpec::Lfu => "lfu",
            PolicySpec::LfuAdmission => "lfu-admit",
            PolicySpec::Fifo => "fifo",
        }
    }

    /// Whether runs depend on the seed.
    pub fn is_randomized(&self) -> bool {
        matches!(self, PolicySpec::Ftpl(_))
    }
}

#[derive(Debug, Clone)]
enum Inner {
    Ftpl(FtplState),
    Lru(LruState),
    Lfu(LfuState),
    Fifo(FifoState),
}

/// Invariant checks accumulated over a run.
///
/// Constant-rate FTPL never admits more than one new file per slot and never
/// changes its cache after a hit; anytime FTPL never evicts the file that was
/// just requested while cached. Baselines change only on misses and evict at
/// most one file. Any breach is counted here.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct InvariantCounters {
    pub multi_fetch: u64,
    pub moved_after_hit: u64,
    pub evicted_requested: u64,
    pub over_capacity: u64,
}

impl InvariantCounters {
    pub fn total(&self) -> u64 {
        self.multi_fetch + self.moved_after_hit + self.evicted_requested + self.over_capacity
    }
}

/// State of one policy over one run.
#[derive(Debug, Clone)]
pub struct PolicyState {
    spec: PolicySpec,
    catalog: Catalog,
    current: CacheConfig,
    end_of_last_slot: CacheConfig,
    completed: u64,
    decided: bool,
    last_request: Option<(FileId, bool)>,
    counters: InvariantCounters,
    inner: Inner,
}

impl PolicyState {
    /// Builds a policy; `seed` drives the FTPL perturbation and is ignored by
    /// the deterministic baselines.
    pub fn new(spec: PolicySpec, catalog: Catalog, seed: u64) -> Result<Self> {
        let inner = match spec {
            PolicySpec::Ftpl(schedule) => Inner::Ftpl(FtplState::new(&catalog, schedule, seed)?),
            PolicySpec::Lru => Inner::Lru(LruState::default()),
            PolicySpec::Lfu => Inner::Lfu(LfuState::new(catalog.num_files(), false)),
            PolicySpec::LfuAdmission => Inner::Lfu(LfuState::new(catalog.num_files(), true)),
            PolicySpec::Fifo => Inner::Fifo(FifoState::default()),
        };
        Ok(PolicyState {
            spec,
            catalog,
            current: CacheConfig::empty(),
            end_of_last_slot: CacheConfig::empty(),
            completed: 0,
            decided: false,
            last_request: None,
            counters: InvariantCounters::default(),
            inner,
        })
    }

    pub fn spec(&self) -> &PolicySpec {
        &self.spec
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    /// Configuration held for the current (or last) slot.
    pub fn current(&self) -> &CacheConfig {
        &self.current
    }

    /// Number of completed slots.
    pub fn slots_completed(&self) -> u64 {
        self.completed
    }

    pub fn counters(&self) -> InvariantCounters {
        self.counters
    }

    /// FTPL cumulative counts, `None` for baselines.
    pub fn ftpl_counts(&self) -> Option<&CumulativeCounts> {
        match &self.inner {
            Inner::Ftpl(s) => Some(s.counts()),
            _ => None,
        }
    }

    /// Chooses the configuration for slot `t` before its request is known.
    pub fn decide(&mut self, t: u64) -> Result<&CacheConfig> {
        if t != self.completed + 1 {
            return Err(Error::domain(format!(
                "decision for slot {t} out of order (next slot is {})",
                self.completed + 1
            )));
        }
        if !self.decided {
            if let Inner::Ftpl(state) = &mut self.inner {
                let next = state.decide(t, self.catalog.capacity())?;
                let constant = state.schedule().is_constant();
                if t >= 2 {
                    self.check_ftpl_transition(&next, constant);
                }
                self.current = next;
            }
            self.decided = true;
        }
        Ok(&self.current)
    }

    fn check_ftpl_transition(&mut self, next: &CacheConfig, constant: bool) {
        let previous = &self.current;
        if constant {
            if next.added_since(previous) > 1 {
                self.counters.multi_fetch += 1;
            }
            if matches!(self.last_request, Some((_, true))) && next != previous {
                self.counters.moved_after_hit += 1;
            }
        }
        if let Some((f, true)) = self.last_request {
            if !next.contains(f) {
                self.counters.evicted_requested += 1;
            }
        }
    }

    /// Reveals the slot's request, updates the policy and scores the slot.
    pub fn observe(&mut self, file: FileId) -> Result<StepRecord> {
        self.catalog.check_file(file)?;
        if !self.decided {
            return Err(Error::domain("observe called before decide"));
        }
        let hit = self.current.contains(file);
        let capacity = self.catalog.capacity();
        match &mut self.inner {
            Inner::Ftpl(s) => s.observe(file)?,
            Inner::Lru(s) => s.observe(file, hit, capacity),
            Inner::Lfu(s) => s.observe(file, hit, capacity),
            Inner::Fifo(s) => s.observe(file, hit, capacity),
        }
        if let Some(next) = match &self.inner {
            Inner::Ftpl(_) => None,
            Inner::Lru(s) => Some(s.config()),
            Inner::Lfu(s) => Some(s.config().clone()),
            Inner::Fifo(s) => Some(s.config()),
        } {
            if next.removed_since(&self.current) > 1 || next.added_since(&self.current) > 1 {
                self.counters.multi_fetch += 1;
            }
            if hit && next != self.current {
                self.counters.moved_after_hit += 1;
            }
            self.current = next;
        }
        if self.current.len() > capacity {
            self.counters.over_capacity += 1;
        }

        let l1_change = self.current.l1_distance(&self.end_of_last_slot);
        self.end_of_last_slot.clone_from(&self.current);
        self.completed += 1;
        self.decided = false;
        self.last_request = Some((file, hit));
        Ok(StepRecord::new(
            self.completed,
            file,
            hit,
            l1_change,
            self.catalog.switch_cost(),
        ))
    }

    /// `decide` followed by `observe` for the next slot.
    pub fn step(&mut self, file: FileId) -> Result<StepRecord> {
        self.decide(self.completed + 1)?;
        self.observe(file)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perturbation::sample_perturbation;
    use crate::selection::top_c_perturbed;

    fn catalog(n: usize, c: usize) -> Catalog {
        Catalog::new(n, c, 1.0).unwrap()
    }

    #[test]
    fn ftpl_first_slot_takes_largest_perturbations() {
        let spec = PolicySpec::Ftpl(LearningRateSchedule::constant(3.0).unwrap());
        let mut p = PolicyState::new(spec, catalog(8, 3), 5).unwrap();
        let y1 = p.decide(1).unwrap().clone();
        let gamma = sample_perturbation(8, 5).unwrap();
        let mut idx: Vec<usize> = (0..8).collect();
        idx.sort_by(|&a, &b| gamma.gamma()[b].partial_cmp(&gamma.gamma()[a]).unwrap());
        assert_eq!(y1, CacheConfig::from_ids(idx[..3].iter().copied()));
        let rec = p.observe(idx[0]).unwrap();
        assert!(rec.hit);
        assert_eq!(rec.l1_change, 3);
        assert_eq!(rec.reward, 1.0 - 0.5 * 3.0);
    }

    #[test]
    fn ftpl_hit_keeps_configuration() {
        let spec = PolicySpec::Ftpl(LearningRateSchedule::constant(0.5).unwrap());
        let mut p = PolicyState::new(spec, catalog(6, 2), 17).unwrap();
        for f in [0, 1, 0, 3, 3, 3, 1, 0, 5, 5] {
            let before = p.decide(p.slots_completed() + 1).unwrap().clone();
            let hit = before.contains(f);
            p.observe(f).unwrap();
            let after = p.decide(p.slots_completed() + 1).unwrap().clone();
            if hit {
                assert_eq!(before, after);
            }
            assert!(after.added_since(&before) <= 1);
        }
        assert_eq!(p.counters().total(), 0);
    }

    #[test]
    fn ftpl_matches_top_c_each_slot() {
        let schedule = LearningRateSchedule::anytime_sqrt(0.7).unwrap();
        let mut p = PolicyState::new(PolicySpec::Ftpl(schedule), catalog(10, 4), 3).unwrap();
        let gamma = sample_perturbation(10, 3).unwrap();
        let mut x = CumulativeCounts::zeros(10);
        for (i, f) in [1usize, 2, 2, 9, 9, 9, 4, 1, 2, 9].into_iter().enumerate() {
            let t = i as u64 + 1;
            let eta = schedule.eta_at(t).unwrap();
            assert_eq!(
                p.decide(t).unwrap(),
                &top_c_perturbed(&x, &gamma, eta, 4).unwrap()
            );
            p.observe(f).unwrap();
            x.record(f).unwrap();
        }
        assert_eq!(p.ftpl_counts().unwrap(), &x);
    }

    #[test]
    fn ftpl_counts_update() {
        let spec = PolicySpec::Ftpl(LearningRateSchedule::constant(1.0).unwrap());
        let mut p = PolicyState::new(spec, catalog(2, 1), 0).unwrap();
        p.step(0).unwrap();
        p.step(0).unwrap();
        assert_eq!(p.ftpl_counts().unwrap().counts(), &[2, 0]);
        p.step(1).unwrap();
        assert_eq!(p.ftpl_counts().unwrap().counts(), &[2, 1]);
        assert_eq!(p.ftpl_counts().unwrap().t(), 3);
    }

    #[test]
    fn ordering_errors() {
        let mut p = PolicyState::new(PolicySpec::Lru, catalog(3, 1), 0).unwrap();
        assert!(p.observe(0).is_err());
        assert!(p.decide(2).is_err());
        p.decide(1).unwrap();
        assert!(matches!(p.observe(3), Err(Error::Domain(_))));
        p.observe(2).unwrap();
        assert_eq!(p.slots_completed(), 1);
    }

    #[test]
    fn lru_evicts_least_recent() {
        let (a, b, c) = (0, 1, 2);
        let mut p = PolicyState::new(PolicySpec::Lru, catalog(3, 2), 0).unwrap();
        p.step(a).unwrap();
        p.step(b).unwrap();
        assert_eq!(p.decide(3).unwrap().ids(), &[a, b]);
        let rec = p.observe(c).unwrap();
        assert!(!rec.hit);
        assert_eq!(rec.l1_change, 2);
        assert_eq!(p.current().ids(), &[b, c]);
    }

    #[test]
    fn lru_hit_refreshes_recency() {
        let mut p = PolicyState::new(PolicySpec::Lru, catalog(4, 2), 0).unwrap();
        for f in [0, 1, 0, 2] {
            p.step(f).unwrap();
        }
        assert_eq!(p.current().ids(), &[0, 2]);
    }

    #[test]
    fn lfu_admits_on_every_miss() {
        let (a, b) = (0, 1);
        let mut p = PolicyState::new(PolicySpec::Lfu, catalog(2, 1), 0).unwrap();
        for _ in 0..3 {
            p.step(a).unwrap();
        }
        let rec = p.step(b).unwrap();
        assert!(!rec.hit);
        assert_eq!(rec.l1_change, 2);
        assert_eq!(p.current().ids(), &[b]);
    }

    #[test]
    fn lfu_evicts_smallest_cached_frequency() {
        let mut p = PolicyState::new(PolicySpec::Lfu, catalog(4, 2), 0).unwrap();
        for f in [0, 0, 1, 1, 1, 2] {
            p.step(f).unwrap();
        }
        // freq (2,3,1,0): the miss on 2 evicts file 0
        assert_eq!(p.current().ids(), &[1, 2]);
        p.step(3).unwrap();
        // freq (2,3,1,1): file 2 is now the least frequent cached file
        assert_eq!(p.current().ids(), &[1, 3]);
    }

    #[test]
    fn lfu_admission_keeps_more_frequent_file() {
        let (a, b) = (0, 1);
        let mut p = PolicyState::new(PolicySpec::LfuAdmission, catalog(2, 1), 0).unwrap();
        for _ in 0..3 {
            p.step(a).unwrap();
        }
        let rec = p.step(b).unwrap();
        assert!(!rec.hit);
        assert_eq!(rec.l1_change, 0);
        assert_eq!(p.current().ids(), &[a]);
    }

    #[test]
    fn lfu_admission_tie_evicts_lower_id() {
        let mut p = PolicyState::new(PolicySpec::LfuAdmission, catalog(4, 2), 0).unwrap();
        for f in [0, 0, 1, 2, 2] {
            p.step(f).unwrap();
        }
        // slot 4: freq (2,1,1) over {0,1,2}; the tie evicts the lower id, file 1
        assert_eq!(p.current().ids(), &[0, 2]);
    }

    #[test]
    fn lfu_admission_is_unperturbed_ftpl_without_ties() {
        // with distinct counts at every decision the two rules coincide
        let trace = [3usize, 3, 3, 3, 1, 1, 1, 0, 0, 2, 2, 2, 2, 2, 0, 0, 0, 0];
        let mut lfu = PolicyState::new(PolicySpec::LfuAdmission, catalog(4, 2), 0).unwrap();
        let mut counts = CumulativeCounts::zeros(4);
        let zero = crate::perturbation::Perturbation::from_vec(vec![0.0; 4], 0).unwrap();
        for (i, &f) in trace.iter().enumerate() {
            lfu.step(f).unwrap();
            counts.record(f).unwrap();
            if i >= 3 {
                let top = top_c_perturbed(&counts, &zero, 1.0, 2).unwrap();
                let sorted: Vec<u64> = {
                    let mut v = counts.counts().to_vec();
                    v.sort_unstable_by(|a, b| b.cmp(a));
                    v
                };
                if sorted[1] != sorted[2] {
                    assert_eq!(lfu.current(), &top, "slot {}", i + 1);
                }
            }
        }
    }

    #[test]
    fn fifo_ignores_hits() {
        let mut p = PolicyState::new(PolicySpec::Fifo, catalog(4, 2), 0).unwrap();
        for f in [0, 1, 0, 2] {
            p.step(f).unwrap();
        }
        assert_eq!(p.current().ids(), &[1, 2]);
    }

    #[test]
    fn baselines_ignore_seed() {
        for spec in [
            PolicySpec::Lru,
            PolicySpec::Lfu,
            PolicySpec::LfuAdmission,
            PolicySpec::Fifo,
        ] {
            let run = |seed| {
                let mut p = PolicyState::new(spec, catalog(5, 2), seed).unwrap();
                [0, 3, 1, 3, 4, 0, 2]
                    .iter()
                    .map(|&f| p.step(f).unwrap())
                    .collect::<Vec<_>>()
            };
            assert_eq!(run(1), run(99));
        }
    }
}
