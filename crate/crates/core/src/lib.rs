//! Trace-driven online caching with Follow-the-Perturbed-Leader.
//!
//! The crate provides the perturbed top-C caching policy (with a constant or
//! `α√t` learning rate), LRU/LFU/FIFO baselines, the clairvoyant static
//! benchmark, pathwise regret and fetch-rate accounting, closed-form regret
//! and switching-cost bounds, and a Monte-Carlo harness that writes CSV
//! series.
//!
//! ```
//! use ftpl_core::{Catalog, LearningRateSchedule, PolicySpec, PolicyState};
//!
//! let catalog = Catalog::new(4, 2, 1.0).unwrap();
//! let spec = PolicySpec::Ftpl(LearningRateSchedule::constant(2.0).unwrap());
//! let mut policy = PolicyState::new(spec, catalog, 7).unwrap();
//! for f in [0, 1, 0, 3] {
//!     let record = policy.step(f).unwrap();
//!     assert!(record.l1_change <= 4);
//! }
//! ```

pub mod bounds;
pub mod error;
pub mod harness;
pub mod metrics;
pub mod model;
pub mod perturbation;
pub mod policies;
pub mod schedule;
pub mod selection;
pub mod traces;

pub use bounds::{
    anytime_total_bound, fixed_eta_bound, prop1_bound, prop2_bound, theorem1_bound, BoundReport,
};
pub use error::{Error, Result};
pub use metrics::{fetch_rate_series, regret_series, step_reward, RunSeries};
pub use model::{CacheConfig, Catalog, CumulativeCounts, FileId, StepRecord};
pub use perturbation::{sample_perturbation, Perturbation};
pub use policies::{
    static_optimal, static_optimal_bruteforce, InvariantCounters, PolicySpec, PolicyState,
    StaticOptimalResult,
};
pub use schedule::{constant_eta_for_horizon, LearningRateSchedule};
pub use selection::{selective_sorted_value, top_c_perturbed};
pub use traces::{gen_round_robin, gen_zipf, load_trace, RequestTrace};
