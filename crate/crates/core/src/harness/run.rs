use rayon::prelude::*;

use super::config::{EtaChoice, ExperimentConfig, PolicyConfig};
use crate::bounds::{anytime_total_bound, fixed_eta_bound, theorem1_bound, BoundReport};
use crate::error::{Error, Result};
use crate::metrics::{regret_series, step_reward, RunSeries};
use crate::model::{CacheConfig, Catalog, StepRecord};
use crate::policies::{InvariantCounters, PolicySpec, PolicyState};
use crate::schedule::LearningRateSchedule;
use crate::traces::RequestTrace;

/// A configuration with its trace loaded and policy parameters resolved.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub trace: RequestTrace,
    pub catalog: Catalog,
    pub policy: PolicySpec,
    pub seeds: Vec<u64>,
    pub free_initial_fill: bool,
}

impl Experiment {
    pub fn prepare(config: &ExperimentConfig) -> Result<Self> {
        let full = config.trace.load()?;
        let trace = match config.horizon {
            Some(h) if h != full.len() => full.truncated(h)?,
            _ => full,
        };
        let capacity = config.capacity.resolve(trace.num_files())?;
        let catalog =
            Catalog::new(trace.num_files(), capacity, config.switch_cost).map_err(|e| match e {
                Error::InvalidCatalog(msg) => Error::Config(msg),
                other => other,
            })?;
        let policy = config.policy.resolve(trace.len(), &catalog)?;
        let seeds: Vec<u64> = config.seeds.seeds().collect();
        if seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        Ok(Experiment {
            trace,
            catalog,
            policy,
            seeds,
            free_initial_fill: config.free_initial_fill,
        })
    }

    pub fn horizon(&self) -> usize {
        self.trace.len()
    }

    pub fn run_one(&self, seed: u64) -> Result<RunOutcome> {
        let mut policy = PolicyState::new(self.policy, self.catalog, seed)?;
        let records = simulate(&mut policy, &self.trace, self.free_initial_fill, |_, _| {})?;
        let series = regret_series(
            &self.trace,
            &records,
            self.catalog.capacity(),
            self.catalog.switch_cost(),
        )?;
        Ok(RunOutcome {
            seed,
            series,
            counters: policy.counters(),
        })
    }

    /// Runs every seed (in parallel when `parallel`) and folds the results in
    /// seed order, so the aggregate does not depend on scheduling.
    pub fn run_monte_carlo_with(&self, parallel: bool) -> Result<MonteCarloResult> {
        // deterministic baselines give the same run for every seed
        let seeds: &[u64] = if self.policy.is_randomized() {
            &self.seeds
        } else {
            &self.seeds[..1]
        };
        let chunk = if parallel {
            rayon::current_num_threads().max(1)
        } else {
            1
        };
        let mut agg = Aggregator::new(self.horizon());
        let mut per_seed = Vec::with_capacity(self.seeds.len());
        for batch in seeds.chunks(chunk) {
            let outcomes: Vec<Result<RunOutcome>> = if parallel {
                batch.par_iter().map(|&s| self.run_one(s)).collect()
            } else {
                batch.iter().map(|&s| self.run_one(s)).collect()
            };
            for outcome in outcomes {
                let outcome = outcome?;
                agg.push(&outcome.series);
                per_seed.push(SeedSummary::from(&outcome));
            }
        }
        if !self.policy.is_randomized() {
            let template = per_seed[0].clone();
            for &seed in &self.seeds[1..] {
                let mut s = template.clone();
                s.seed = seed;
                per_seed.push(s);
            }
            agg.repeat_last(self.seeds.len() - 1);
        }
        Ok(MonteCarloResult {
            policy: self.policy.name(),
            mean: agg.finish(),
            per_seed,
        })
    }

    pub fn run_monte_carlo(&self) -> Result<MonteCarloResult> {
        self.run_monte_carlo_with(true)
    }
}

/// Drives one policy over a trace in decide → request → reward → update order.
/// `observer` sees the configuration held during each slot and its record.
pub fn simulate(
    policy: &mut PolicyState,
    trace: &RequestTrace,
    free_initial_fill: bool,
    mut observer: impl FnMut(&CacheConfig, &StepRecord),
) -> Result<Vec<StepRecord>> {
    if trace.num_files() != policy.catalog().num_files() {
        return Err(Error::Shape {
            what: "trace catalog vs policy catalog",
            expected: policy.catalog().num_files(),
            actual: trace.num_files(),
        });
    }
    let d = policy.catalog().switch_cost();
    let mut records = Vec::with_capacity(trace.len());
    for (i, &file) in trace.requests().iter().enumerate() {
        let t = i as u64 + 1;
        let held = policy.decide(t)?.clone();
        let mut rec = policy.observe(file)?;
        if t == 1 && free_initial_fill {
            rec.l1_change = 0;
            rec.reward = step_reward(rec.hit, 0, d);
        }
        observer(&held, &rec);
        records.push(rec);
    }
    Ok(records)
}

pub fn run_one(config: &ExperimentConfig, seed: u64) -> Result<RunOutcome> {
    Experiment::prepare(config)?.run_one(seed)
}

pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<MonteCarloResult> {
    Experiment::prepare(config)?.run_monte_carlo()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub seed: u64,
    pub series: RunSeries,
    pub counters: InvariantCounters,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SeedSummary {
    pub seed: u64,
    pub hits: u64,
    pub total_l1: u64,
    pub final_regret: f64,
    pub final_fetch_rate: f64,
    pub counters: InvariantCounters,
}

impl From<&RunOutcome> for SeedSummary {
    fn from(o: &RunOutcome) -> Self {
        SeedSummary {
            seed: o.seed,
            hits: o.series.total_hits(),
            total_l1: o.series.total_l1(),
            final_regret: o.series.final_regret(),
            final_fetch_rate: o.series.fetch_rate.last().copied().unwrap_or(0.0),
            counters: o.counters,
        }
    }
}

/// Running mean and standard error (Welford).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    fn stderr(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        (self.m2.max(0.0) / (self.n - 1) as f64 / self.n as f64).sqrt()
    }
}

/// Per-slot mean and standard error of a metric across seeds.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SlotStats {
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateSeries {
    pub runs: usize,
    pub hit_rate: SlotStats,
    pub fetch_rate: SlotStats,
    pub norm_regret: SlotStats,
    pub cum_reward: SlotStats,
    pub switch_cost: SlotStats,
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.hit_rate.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

struct Aggregator {
    metrics: [Vec<Welford>; 5],
    last: Option<[Vec<f64>; 5]>,
}

impl Aggregator {
    fn new(len: usize) -> Self {
        Aggregator {
            metrics: std::array::from_fn(|_| vec![Welford::default(); len]),
            last: None,
        }
    }

    fn push(&mut self, s: &RunSeries) {
        let n = s.len();
        let values: [Vec<f64>; 5] = [
            (0..n).map(|i| s.hit_rate(i)).collect(),
            s.fetch_rate.clone(),
            (0..n).map(|i| s.norm_regret(i)).collect(),
            s.cum_reward.clone(),
            (0..n).map(|i| s.switching_cost(i)).collect(),
        ];
        self.push_values(&values);
        self.last = Some(values);
    }

    fn push_values(&mut self, values: &[Vec<f64>; 5]) {
        for (acc, vals) in self.metrics.iter_mut().zip(values) {
            for (w, &v) in acc.iter_mut().zip(vals) {
                w.push(v);
            }
        }
    }

    fn repeat_last(&mut self, times: usize) {
        if let Some(values) = self.last.take() {
            for _ in 0..times {
                self.push_values(&values);
            }
            self.last = Some(values);
        }
    }

    fn finish(self) -> AggregateSeries {
        let runs = self.metrics[0].first().map_or(0, |w| w.n as usize);
        let [hit_rate, fetch_rate, norm_regret, cum_reward, switch_cost] =
            self.metrics.map(|m| SlotStats {
                mean: m.iter().map(|w| w.mean).collect(),
                stderr: m.iter().map(Welford::stderr).collect(),
            });
        AggregateSeries {
            runs,
            hit_rate,
            fetch_rate,
            norm_regret,
            cum_reward,
            switch_cost,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub policy: &'static str,
    pub mean: AggregateSeries,
    pub per_seed: Vec<SeedSummary>,
}

impl MonteCarloResult {
    pub fn mean_final_regret(&self) -> f64 {
        self.per_seed.iter().map(|s| s.final_regret).sum::<f64>() / self.per_seed.len() as f64
    }

    pub fn final_regret_stderr(&self) -> f64 {
        let mut w = Welford::default();
        for s in &self.per_seed {
            w.push(s.final_regret);
        }
        w.stderr()
    }

    pub fn counters(&self) -> InvariantCounters {
        self.per_seed
            .iter()
            .fold(InvariantCounters::default(), |mut acc, s| {
                acc.multi_fetch += s.counters.multi_fetch;
                acc.moved_after_hit += s.counters.moved_after_hit;
                acc.evicted_requested += s.counters.evicted_requested;
                acc.over_capacity += s.counters.over_capacity;
                acc
            })
    }
}

/// Outcome of comparing the Monte-Carlo mean regret with its closed-form bound.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    /// `theorem1`, `fixed-eta` or `anytime-total`.
    pub bound_name: &'static str,
    pub bound: f64,
    pub eta: Option<f64>,
    /// Present for the anytime policy.
    pub anytime: Option<BoundReport>,
    pub horizon: u64,
    pub num_files: usize,
    pub capacity: usize,
    pub switch_cost: f64,
    pub seeds: usize,
    pub mean_regret: f64,
    pub stderr: f64,
    pub pass: bool,
}

/// Runs the configured FTPL policy over all seeds and checks mean `R_T`
/// against the matching bound. Domain problems surface before any run.
pub fn bound_check(config: &ExperimentConfig) -> Result<BoundCheck> {
    let exp = Experiment::prepare(config)?;
    let (t, n, c, d) = (
        exp.horizon() as u64,
        exp.catalog.num_files(),
        exp.catalog.capacity(),
        exp.catalog.switch_cost(),
    );
    let to_config = |e: Error| match e {
        Error::Domain(msg) => Error::Config(msg),
        other => other,
    };
    let (bound_name, bound, eta, anytime) = match (config.policy, exp.policy) {
        (PolicyConfig::Ftpl(choice), PolicySpec::Ftpl(LearningRateSchedule::Constant { eta })) => {
            match choice {
                EtaChoice::Auto => (
                    "theorem1",
                    theorem1_bound(t, n, c, d).map_err(to_config)?,
                    Some(eta),
                    None,
                ),
                EtaChoice::Fixed(_) => (
                    "fixed-eta",
                    fixed_eta_bound(eta, t, n, c, d).map_err(to_config)?,
                    Some(eta),
                    None,
                ),
            }
        }
        (_, PolicySpec::Ftpl(LearningRateSchedule::AnytimeSqrt { alpha })) => {
            let report = anytime_total_bound(alpha, t, n, c, d).map_err(to_config)?;
            (
                "anytime-total",
                report.anytime_total_bound,
                None,
                Some(report),
            )
        }
        _ => {
            return Err(Error::Config(format!(
                "bound check needs an FTPL policy, got {}",
                config.policy.name()
            )))
        }
    };
    let mc = exp.run_monte_carlo()?;
    let mean_regret = mc.mean_final_regret();
    Ok(BoundCheck {
        bound_name,
        bound,
        eta,
        anytime,
        horizon: t,
        num_files: n,
        capacity: c,
        switch_cost: d,
        seeds: mc.per_seed.len(),
        mean_regret,
        stderr: mc.final_regret_stderr(),
        pass: mean_regret <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::config::{CapacitySpec, SeedPlan, TraceSource};

    fn config(policy: PolicyConfig, trace: TraceSource, c: usize) -> ExperimentConfig {
        ExperimentConfig::new(trace, CapacitySpec::Files(c), policy)
    }

    #[test]
    fn fifo_round_robin_hand_simulated() {
        // N=3, C=2, requests 0 1 2 0 1 2: every slot misses.
        // caches {0} {0,1} {1,2} {2,0} {0,1} {1,2}; l1 1 1 2 2 2 2
        let cfg = config(
            PolicyConfig::Fifo,
            TraceSource::RoundRobin {
                num_files: 3,
                horizon: 6,
            },
            2,
        );
        let out = run_one(&cfg, 0).unwrap();
        assert_eq!(out.series.total_hits(), 0);
        assert_eq!(out.series.l1_change, vec![1, 1, 2, 2, 2, 2]);
        assert_eq!(out.series.total_l1(), 10);
    }

    #[test]
    fn constant_trace() {
        // baselines miss only the first slot; FTPL may need a few requests to
        // overcome its perturbation, after which the file is never evicted
        for policy in [
            PolicyConfig::Ftpl(EtaChoice::Fixed(2.0)),
            PolicyConfig::FtplAnytime { alpha: 1.0 },
            PolicyConfig::Lru,
            PolicyConfig::Lfu,
            PolicyConfig::Fifo,
        ] {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("t.txt");
            std::fs::write(
                &path,
                "# dense-ids num_files=4\n".to_owned() + &"2\n".repeat(50),
            )
            .unwrap();
            let cfg = config(
                policy,
                TraceSource::File {
                    path,
                    id_column: 0,
                    limit: None,
                    header: Default::default(),
                },
                2,
            );
            for seed in 0..20 {
                let hits = &run_one(&cfg, seed).unwrap().series.hit;
                let misses = hits.iter().take_while(|&&h| !h).count();
                assert!(
                    hits[misses..].iter().all(|&h| h),
                    "{} seed {seed}",
                    policy.name()
                );
                if !matches!(
                    policy,
                    PolicyConfig::Ftpl(_) | PolicyConfig::FtplAnytime { .. }
                ) {
                    assert_eq!(misses, 1);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_series() {
        let cfg = config(
            PolicyConfig::FtplAnytime { alpha: 0.5 },
            TraceSource::Zipf {
                num_files: 30,
                horizon: 500,
                exponent: 0.9,
                seed: 4,
            },
            3,
        );
        assert_eq!(run_one(&cfg, 8).unwrap(), run_one(&cfg, 8).unwrap());
    }

    #[test]
    fn single_seed_monte_carlo_is_the_run() {
        let cfg = config(
            PolicyConfig::Ftpl(EtaChoice::Fixed(3.0)),
            TraceSource::Zipf {
                num_files: 20,
                horizon: 300,
                exponent: 1.0,
                seed: 1,
            },
            4,
        );
        let run = run_one(&cfg, 0).unwrap();
        let mc = run_monte_carlo(&cfg).unwrap();
        assert_eq!(mc.mean.runs, 1);
        assert_eq!(mc.mean.norm_regret.mean[299], run.series.norm_regret(299));
        assert!(mc.mean.hit_rate.stderr.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn deterministic_baseline_has_zero_stderr() {
        let mut cfg = config(
            PolicyConfig::Lru,
            TraceSource::Zipf {
                num_files: 20,
                horizon: 300,
                exponent: 1.0,
                seed: 1,
            },
            4,
        );
        cfg.seeds = SeedPlan { base: 3, count: 6 };
        let mc = run_monte_carlo(&cfg).unwrap();
        assert_eq!(mc.per_seed.len(), 6);
        assert_eq!(mc.mean.runs, 6);
        for stats in [&mc.mean.hit_rate, &mc.mean.fetch_rate, &mc.mean.norm_regret] {
            assert!(stats.stderr.iter().all(|&s| s == 0.0));
        }
        assert_eq!(mc.final_regret_stderr(), 0.0);
    }

    #[test]
    fn parallel_equals_sequential() {
        let mut cfg = config(
            PolicyConfig::FtplAnytime { alpha: 1.0 },
            TraceSource::Zipf {
                num_files: 40,
                horizon: 400,
                exponent: 0.8,
                seed: 2,
            },
            4,
        );
        cfg.seeds = SeedPlan { base: 0, count: 13 };
        let exp = Experiment::prepare(&cfg).unwrap();
        assert_eq!(
            exp.run_monte_carlo_with(true).unwrap(),
            exp.run_monte_carlo_with(false).unwrap()
        );
    }

    #[test]
    fn free_initial_fill_zeroes_first_charge() {
        let mut cfg = config(
            PolicyConfig::Ftpl(EtaChoice::Fixed(4.0)),
            TraceSource::RoundRobin {
                num_files: 5,
                horizon: 20,
            },
            2,
        );
        let charged = run_one(&cfg, 1).unwrap();
        cfg.free_initial_fill = true;
        let free = run_one(&cfg, 1).unwrap();
        assert_eq!(charged.series.l1_change[0], 2);
        assert_eq!(free.series.l1_change[0], 0);
        assert_eq!(charged.series.l1_change[1..], free.series.l1_change[1..]);
        assert_eq!(
            charged.series.final_regret() - free.series.final_regret(),
            0.5 * 2.0
        );
        assert_eq!(charged.series.fetch_rate, free.series.fetch_rate);
    }

    #[test]
    fn decision_ignores_current_request() {
        let spec = PolicySpec::Ftpl(LearningRateSchedule::anytime_sqrt(0.8).unwrap());
        let cat = Catalog::new(12, 3, 1.0).unwrap();
        let trace = crate::traces::gen_zipf(12, 200, 0.7, 5).unwrap();
        for t in [1usize, 17, 120] {
            let mut decisions = Vec::new();
            for alt in [0usize, 5, 11] {
                let mut p = PolicyState::new(spec, cat, 9).unwrap();
                for &f in &trace.requests()[..t - 1] {
                    p.step(f).unwrap();
                }
                let y = p.decide(t as u64).unwrap().clone();
                p.observe(alt).unwrap();
                decisions.push(y);
            }
            assert!(decisions.windows(2).all(|w| w[0] == w[1]));
        }
    }

    #[test]
    fn horizon_handling() {
        let mut cfg = config(
            PolicyConfig::Lru,
            TraceSource::RoundRobin {
                num_files: 3,
                horizon: 10,
            },
            1,
        );
        cfg.horizon = Some(4);
        assert_eq!(Experiment::prepare(&cfg).unwrap().horizon(), 4);
        cfg.horizon = Some(11);
        assert!(matches!(Experiment::prepare(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn bound_check_guards() {
        let cfg = config(
            PolicyConfig::Lru,
            TraceSource::RoundRobin {
                num_files: 4,
                horizon: 10,
            },
            2,
        );
        assert!(matches!(bound_check(&cfg), Err(Error::Config(_))));
        let cfg = config(
            PolicyConfig::Ftpl(EtaChoice::Auto),
            TraceSource::RoundRobin {
                num_files: 4,
                horizon: 10,
            },
            4,
        );
        assert!(matches!(bound_check(&cfg), Err(Error::Config(_))));
        let cfg = config(
            PolicyConfig::Ftpl(EtaChoice::Fixed(1.0)),
            TraceSource::RoundRobin {
                num_files: 4,
                horizon: 10,
            },
            4,
        );
        assert!(matches!(bound_check(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn bound_check_passes_small_instances() {
        let mut cfg = config(
            PolicyConfig::Ftpl(EtaChoice::Auto),
            TraceSource::Zipf {
                num_files: 30,
                horizon: 2000,
                exponent: 0.9,
                seed: 3,
            },
            3,
        );
        cfg.seeds = SeedPlan { base: 0, count: 10 };
        for d in [0.0, 1.0] {
            cfg.switch_cost = d;
            let check = bound_check(&cfg).unwrap();
            assert_eq!(check.bound_name, "theorem1");
            assert!(check.pass, "{check:?}");
        }
        cfg.policy = PolicyConfig::FtplAnytime { alpha: 1.0 };
        let check = bound_check(&cfg).unwrap();
        assert_eq!(check.bound_name, "anytime-total");
        assert!(check.pass && check.anytime.is_some());
    }
}
