//! Shared workloads for the criterion benches.

use ftpl_core::{gen_zipf, Catalog, RequestTrace};

/// A stationary Zipf workload with capacity at 1% of the catalog.
pub fn zipf_workload(num_files: usize, horizon: usize) -> (RequestTrace, Catalog) {
    let trace = gen_zipf(num_files, horizon, 0.8, 42).expect("valid zipf parameters");
    let capacity = (num_files / 100).max(1);
    let catalog = Catalog::new(num_files, capacity, 1.0).expect("valid catalog");
    (trace, catalog)
}
