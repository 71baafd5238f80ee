//! The clairvoyant static benchmark: the best fixed C-subset in hindsight.

use crate::error::{Error, Result};
use crate::model::{CacheConfig, CumulativeCounts, FileId};

/// Largest number of subsets [`static_optimal_bruteforce`] will enumerate.
pub const BRUTEFORCE_LIMIT: u128 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticOptimalResult {
    pub support: CacheConfig,
    /// `Σ_{i ∈ support} X[i]`.
    pub value: u64,
}

fn check_capacity(counts: &CumulativeCounts, capacity: usize) -> Result<()> {
    if capacity > counts.num_files() {
        return Err(Error::domain(format!(
            "capacity {capacity} exceeds catalog of {} files",
            counts.num_files()
        )));
    }
    Ok(())
}

/// The `capacity` largest counts, ties to the lowest id.
pub fn static_optimal(counts: &CumulativeCounts, capacity: usize) -> Result<StaticOptimalResult> {
    check_capacity(counts, capacity)?;
    let x = counts.counts();
    let mut order: Vec<FileId> = (0..x.len()).collect();
    if capacity > 0 && capacity < order.len() {
        order.select_nth_unstable_by(capacity - 1, |&a, &b| x[b].cmp(&x[a]).then(a.cmp(&b)));
    }
    order.truncate(capacity);
    let value = order.iter().map(|&i| x[i]).sum();
    Ok(StaticOptimalResult {
        support: CacheConfig::from_ids(order),
        value,
    })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut acc = 1u128;
    for i in 0..k {
        match acc.checked_mul((n - i) as u128) {
            Some(v) => acc = v / (i + 1) as u128,
            None => return u128::MAX,
        }
    }
    acc
}

/// Exhaustive maximization over every C-subset in lexicographic order; the
/// first maximizer wins. Test oracle for [`static_optimal`].
pub fn static_optimal_bruteforce(
    counts: &CumulativeCounts,
    capacity: usize,
) -> Result<StaticOptimalResult> {
    check_capacity(counts, capacity)?;
    let n = counts.num_files();
    let subsets = binomial(n, capacity);
    if subsets > BRUTEFORCE_LIMIT {
        return Err(Error::SearchTooLarge {
            subsets,
            limit: BRUTEFORCE_LIMIT,
        });
    }
    let x = counts.counts();
    let mut subset: Vec<usize> = (0..capacity).collect();
    let mut best = (subset.iter().map(|&i| x[i]).sum::<u64>(), subset.clone());
    // advance to the next combination
    while let Some(pos) = (0..capacity).rev().find(|&i| subset[i] < n - capacity + i) {
        subset[pos] += 1;
        for i in pos + 1..capacity {
            subset[i] = subset[i - 1] + 1;
        }
        let value: u64 = subset.iter().map(|&i| x[i]).sum();
        if value > best.0 {
            best = (value, subset.clone());
        }
    }
    Ok(StaticOptimalResult {
        support: CacheConfig::from_ids(best.1),
        value: best.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn counts(v: &[u64]) -> CumulativeCounts {
        CumulativeCounts::from_counts(v.to_vec())
    }

    #[test]
    fn hand_checked_instance() {
        // all six 2-subsets of (5,1,3,3): best is {0,2} = 8 under the tie rule
        let r = static_optimal(&counts(&[5, 1, 3, 3]), 2).unwrap();
        assert_eq!(r.support.ids(), &[0, 2]);
        assert_eq!(r.value, 8);
        assert_eq!(
            static_optimal_bruteforce(&counts(&[5, 1, 3, 3]), 2).unwrap(),
            r
        );
    }

    #[test]
    fn full_coverage_and_empty() {
        let x = counts(&[0, 4, 0, 2, 1]);
        assert_eq!(static_optimal(&x, 3).unwrap().value, x.t());
        assert_eq!(static_optimal(&counts(&[0; 6]), 4).unwrap().value, 0);
        assert_eq!(static_optimal(&x, 0).unwrap().value, 0);
    }

    #[test]
    fn bruteforce_edges() {
        let x = counts(&[2, 0, 7]);
        assert_eq!(
            static_optimal_bruteforce(&x, 3).unwrap().support.ids(),
            &[0, 1, 2]
        );
        let tie = static_optimal_bruteforce(&counts(&[1, 1, 1]), 2).unwrap();
        assert_eq!((tie.support.ids(), tie.value), (&[0usize, 1][..], 2));
        let big = CumulativeCounts::zeros(40);
        assert!(matches!(
            static_optimal_bruteforce(&big, 20),
            Err(Error::SearchTooLarge { .. })
        ));
        assert!(static_optimal(&x, 4).is_err());
    }

    #[test]
    fn value_monotone_in_capacity() {
        let x = counts(&[3, 9, 0, 4, 4, 1, 7]);
        let values: Vec<u64> = (0..=7)
            .map(|c| static_optimal(&x, c).unwrap().value)
            .collect();
        assert!(values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(12, 6), 924);
        assert_eq!(binomial(5, 0), 1);
        assert_eq!(binomial(40, 20), 137_846_528_820);
    }
}
