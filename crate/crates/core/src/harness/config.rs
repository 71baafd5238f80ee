use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::model::Catalog;
use crate::policies::PolicySpec;
use crate::schedule::{constant_eta_for_horizon, LearningRateSchedule};
use crate::traces::{
    gen_round_robin, gen_zipf, load_trace_with, HeaderMode, LoadOptions, RequestTrace,
};

/// Where requests come from.
#[derive(Debug, Clone, PartialEq)]
pub enum TraceSource {
    File {
        path: PathBuf,
        id_column: usize,
        limit: Option<usize>,
        header: HeaderMode,
    },
    Zipf {
        num_files: usize,
        horizon: usize,
        exponent: f64,
        seed: u64,
    },
    RoundRobin {
        num_files: usize,
        horizon: usize,
    },
}

impl TraceSource {
    /// Parses a generator spec: `zipf:N,T,EXP[,SEED]` or `rr:N,T`.
    pub fn parse_generator(spec: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "bad generator spec {spec:?}; expected zipf:N,T,EXP[,SEED] or rr:N,T"
            ))
        };
        let (kind, args) = spec.split_once(':').ok_or_else(bad)?;
        let parts: Vec<&str> = args.split(',').map(str::trim).collect();
        let int = |s: &str| s.parse::<usize>().map_err(|_| bad());
        match (kind.trim(), parts.as_slice()) {
            ("zipf", [n, t, e]) | ("zipf", [n, t, e, _]) => Ok(TraceSource::Zipf {
                num_files: int(n)?,
                horizon: int(t)?,
                exponent: e.parse().map_err(|_| bad())?,
                seed: match parts.get(3) {
                    Some(s) => s.parse().map_err(|_| bad())?,
                    None => 0,
                },
            }),
            ("rr", [n, t]) => Ok(TraceSource::RoundRobin {
                num_files: int(n)?,
                horizon: int(t)?,
            }),
            _ => Err(bad()),
        }
    }

    pub fn load(&self) -> Result<RequestTrace> {
        match self {
            TraceSource::File {
                path,
                id_column,
                limit,
                header,
            } => load_trace_with(
                path,
                &LoadOptions {
                    limit: *limit,
                    id_column: *id_column,
                    header: *header,
                },
            ),
            TraceSource::Zipf {
                num_files,
                horizon,
                exponent,
                seed,
            } => gen_zipf(*num_files, *horizon, *exponent, *seed),
            TraceSource::RoundRobin { num_files, horizon } => gen_round_robin(*num_files, *horizon),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CapacitySpec {
    Files(usize),
    /// `max(1, floor(fraction * N))`.
    Fraction(f64),
}

impl CapacitySpec {
    pub fn resolve(&self, num_files: usize) -> Result<usize> {
        match *self {
            CapacitySpec::Files(c) => Ok(c),
            CapacitySpec::Fraction(f) if f > 0.0 && f <= 1.0 => {
                Ok(((f * num_files as f64).floor() as usize).clamp(1, num_files))
            }
            CapacitySpec::Fraction(f) => Err(Error::Config(format!(
                "capacity fraction {f} must lie in (0, 1]"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaChoice {
    Fixed(f64),
    /// Tuned to the horizon, catalog and switch cost.
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicyConfig {
    Ftpl(EtaChoice),
    FtplAnytime { alpha: f64 },
    Lru,
    Lfu,
    LfuAdmission,
    Fifo,
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::Ftpl(_) => "ftpl",
            PolicyConfig::FtplAnytime { .. } => "ftpl-anytime",
            PolicyConfig::Lru => "lru",
            PolicyConfig::Lfu => "lfu",
            PolicyConfig::LfuAdmission => "lfu-admit",
            PolicyConfig::Fifo => "fifo",
        }
    }

    pub fn resolve(&self, horizon: usize, catalog: &Catalog) -> Result<PolicySpec> {
        Ok(match *self {
            PolicyConfig::Ftpl(EtaChoice::Fixed(eta)) => {
                PolicySpec::Ftpl(LearningRateSchedule::constant(eta).map_err(as_config)?)
            }
            PolicyConfig::Ftpl(EtaChoice::Auto) => {
                let eta = constant_eta_for_horizon(
                    horizon as u64,
                    catalog.num_files(),
                    catalog.capacity(),
                    catalog.switch_cost(),
                )
                .map_err(as_config)?;
                PolicySpec::Ftpl(LearningRateSchedule::constant(eta).map_err(as_config)?)
            }
            PolicyConfig::FtplAnytime { alpha } => {
                PolicySpec::Ftpl(LearningRateSchedule::anytime_sqrt(alpha).map_err(as_config)?)
            }
            PolicyConfig::Lru => PolicySpec::Lru,
            PolicyConfig::Lfu => PolicySpec::Lfu,
            PolicyConfig::LfuAdmission => PolicySpec::LfuAdmission,
            PolicyConfig::Fifo => PolicySpec::Fifo,
        })
    }
}

fn as_config(e: Error) -> Error {
    match e {
        Error::Domain(msg) | Error::InvalidCatalog(msg) => Error::Config(msg),
        other => other,
    }
}

/// `count` consecutive seeds starting at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedPlan {
    pub base: u64,
    pub count: usize,
}

impl SeedPlan {
    pub fn seeds(&self) -> impl Iterator<Item = u64> {
        let base = self.base;
        (0..self.count as u64).map(move |i| base.wrapping_add(i))
    }
}

impl Default for SeedPlan {
    fn default() -> Self {
        SeedPlan { base: 0, count: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub trace: TraceSource,
    pub capacity: CapacitySpec,
    pub switch_cost: f64,
    pub policy: PolicyConfig,
    pub seeds: SeedPlan,
    /// Truncate the trace to this many slots.
    pub horizon: Option<usize>,
    /// Do not charge the slot-1 fill.
    pub free_initial_fill: bool,
}

impl ExperimentConfig {
    pub fn new(trace: TraceSource, capacity: CapacitySpec, policy: PolicyConfig) -> Self {
        ExperimentConfig {
            trace,
            capacity,
            switch_cost: 1.0,
            policy,
            seeds: SeedPlan::default(),
            horizon: None,
            free_initial_fill: false,
        }
    }
}
