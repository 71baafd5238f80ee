//! Perturbed top-C selection and the selective order statistic.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::model::{CacheConfig, CumulativeCounts, FileId};
use crate::perturbation::Perturbation;

/// Descending by score, ascending by id on exact ties. `+ 0.0` folds `-0.0`
/// onto `0.0` so that `total_cmp` agrees with numeric equality.
fn rank_order(a: &(f64, FileId), b: &(f64, FileId)) -> Ordering {
    (b.0 + 0.0).total_cmp(&(a.0 + 0.0)).then(a.1.cmp(&b.1))
}

/// Ids of the `capacity` largest scores, ties to the lowest id. `scratch` is
/// reused across calls to avoid reallocating per slot.
pub(crate) fn top_c_of_scores(
    scores: impl Iterator<Item = f64>,
    capacity: usize,
    scratch: &mut Vec<(f64, FileId)>,
) -> CacheConfig {
    scratch.clear();
    scratch.extend(scores.enumerate().map(|(id, s)| (s, id)));
    let c = capacity.min(scratch.len());
    if c == 0 {
        return CacheConfig::empty();
    }
    if c < scratch.len() {
        scratch.select_nth_unstable_by(c - 1, rank_order);
    }
    CacheConfig::from_ids(scratch[..c].iter().map(|&(_, id)| id))
}

/// The `capacity` files maximizing `X[i] + η γ[i]`.
pub fn top_c_perturbed(
    counts: &CumulativeCounts,
    perturbation: &Perturbation,
    eta: f64,
    capacity: usize,
) -> Result<CacheConfig> {
    let n = counts.num_files();
    if perturbation.len() != n {
        return Err(Error::Shape {
            what: "perturbation length vs catalog",
            expected: n,
            actual: perturbation.len(),
        });
    }
    if capacity == 0 || capacity > n {
        return Err(Error::InvalidCatalog(format!(
            "capacity {capacity} must lie in [1, {n}]"
        )));
    }
    if !(eta >= 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!(
            "learning rate {eta} must be finite and non-negative"
        )));
    }
    let scores = counts
        .counts()
        .iter()
        .zip(perturbation.gamma())
        .map(|(&x, &g)| x as f64 + eta * g);
    Ok(top_c_of_scores(
        scores,
        capacity,
        &mut Vec::with_capacity(n),
    ))
}

/// The `rank`-th largest entry of `scores` ignoring index `exclude`
/// (1-based rank).
pub fn selective_sorted_value(scores: &[f64], exclude: FileId, rank: usize) -> Result<f64> {
    if exclude >= scores.len() {
        return Err(Error::domain(format!(
            "excluded index {exclude} outside {} scores",
            scores.len()
        )));
    }
    if rank == 0 || rank > scores.len() - 1 {
        return Err(Error::domain(format!(
            "rank {rank} outside [1, {}]",
            scores.len() - 1
        )));
    }
    let mut rest: Vec<f64> = scores
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != exclude)
        .map(|(_, &s)| s)
        .collect();
    let (_, value, _) = rest.select_nth_unstable_by(rank - 1, |a, b| b.total_cmp(a));
    Ok(*value)
}
