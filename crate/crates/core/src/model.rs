//! Domain values shared by every policy: the catalog, cache configurations,
//! cumulative request counts and per-slot step records.

use crate::error::{Error, Result};

/// Dense file identifier in `[0, N)`.
pub type FileId = usize;

/// Catalog size, cache capacity and per-file fetch cost.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Catalog {
    num_files: usize,
    capacity: usize,
    switch_cost: f64,
}

impl Catalog {
    pub fn new(num_files: usize, capacity: usize, switch_cost: f64) -> Result<Self> {
        if num_files == 0 {
            return Err(Error::InvalidCatalog(
                "catalog must contain at least one file".into(),
            ));
        }
        if capacity == 0 || capacity > num_files {
            return Err(Error::InvalidCatalog(format!(
                "capacity {capacity} must lie in [1, {num_files}]"
            )));
        }
        if !(switch_cost >= 0.0 && switch_cost.is_finite()) {
            return Err(Error::InvalidCatalog(format!(
                "switch cost {switch_cost} must be finite and non-negative"
            )));
        }
        Ok(Catalog {
            num_files,
            capacity,
            switch_cost,
        })
    }

    pub fn num_files(&self) -> usize {
        self.num_files
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Cost `D` of fetching one file; a slot that moves the incidence vector by
    /// `l1` is charged `D/2 * l1`.
    pub fn switch_cost(&self) -> f64 {
        self.switch_cost
    }

    pub(crate) fn check_file(&self, file: FileId) -> Result<()> {
        if file >= self.num_files {
            return Err(Error::domain(format!(
                "file id {file} outside catalog of {} files",
                self.num_files
            )));
        }
        Ok(())
    }
}

/// The set of cached files, i.e. the support of the incidence vector.
///
/// Ids are kept sorted and distinct.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct CacheConfig {
    support: Vec<FileId>,
}

impl CacheConfig {
    pub fn empty() -> Self {
        CacheConfig::default()
    }

    pub fn from_ids(ids: impl IntoIterator<Item = FileId>) -> Self {
        let mut support: Vec<FileId> = ids.into_iter().collect();
        support.sort_unstable();
        support.dedup();
        CacheConfig { support }
    }

    pub fn ids(&self) -> &[FileId] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn contains(&self, file: FileId) -> bool {
        self.support.binary_search(&file).is_ok()
    }

    /// Number of files in `self` that are not in `previous` (files fetched).
    pub fn added_since(&self, previous: &CacheConfig) -> usize {
        self.support
            .iter()
            .filter(|&&id| !previous.contains(id))
            .count()
    }

    /// Number of files in `previous` that are not in `self` (files evicted).
    pub fn removed_since(&self, previous: &CacheConfig) -> usize {
        previous.added_since(self)
    }

    /// `||y - y'||_1` between the two incidence vectors.
    pub fn l1_distance(&self, other: &CacheConfig) -> u64 {
        (self.added_since(other) + self.removed_since(other)) as u64
    }
}

impl FromIterator<FileId> for CacheConfig {
    fn from_iter<I: IntoIterator<Item = FileId>>(iter: I) -> Self {
        CacheConfig::from_ids(iter)
    }
}

/// Cumulative per-file request counts after `t` requests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulativeCounts {
    counts: Vec<u64>,
    t: u64,
}

impl CumulativeCounts {
    pub fn zeros(num_files: usize) -> Self {
        CumulativeCounts {
            counts: vec![0; num_files],
            t: 0,
        }
    }

    /// Builds counts from an explicit vector; the slot index is their sum.
    pub fn from_counts(counts: Vec<u64>) -> Self {
        let t = counts.iter().sum();
        CumulativeCounts { counts, t }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn num_files(&self) -> usize {
        self.counts.len()
    }

    /// Number of requests recorded so far.
    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn record(&mut self, file: FileId) -> Result<()> {
        let n = self.counts.len();
        let slot = self
            .counts
            .get_mut(file)
            .ok_or_else(|| Error::domain(format!("file id {file} outside catalog of {n} files")))?;
        *slot += 1;
        self.t += 1;
        Ok(())
    }
}

/// Outcome of one slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepRecord {
    /// 1-based slot index.
    pub t: u64,
    pub requested: FileId,
    pub hit: bool,
    /// `||y_t - y_{t-1}||_1`.
    pub l1_change: u64,
    pub reward: f64,
}

impl StepRecord {
    pub fn new(t: u64, requested: FileId, hit: bool, l1_change: u64, switch_cost: f64) -> Self {
        StepRecord {
            t,
            requested,
            hit,
            l1_change,
            reward: crate::metrics::step_reward(hit, l1_change, switch_cost),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_rejects_bad_shapes() {
        assert!(matches!(
            Catalog::new(0, 0, 0.0),
            Err(Error::InvalidCatalog(_))
        ));
        assert!(Catalog::new(3, 4, 0.0).is_err());
        assert!(Catalog::new(3, 0, 0.0).is_err());
        assert!(Catalog::new(3, 2, -1.0).is_err());
        assert!(Catalog::new(3, 2, f64::NAN).is_err());
        assert!(Catalog::new(3, 3, 0.0).is_ok());
    }

    #[test]
    fn config_set_algebra() {
        let a = CacheConfig::from_ids([3, 1, 1, 2]);
        assert_eq!(a.ids(), &[1, 2, 3]);
        let b = CacheConfig::from_ids([2, 3, 4]);
        assert_eq!(b.added_since(&a), 1);
        assert_eq!(b.removed_since(&a), 1);
        assert_eq!(a.l1_distance(&b), 2);
        assert_eq!(CacheConfig::empty().l1_distance(&a), 3);
    }

    #[test]
    fn counts_track_slot() {
        let mut x = CumulativeCounts::zeros(2);
        x.record(0).unwrap();
        x.record(0).unwrap();
        x.record(1).unwrap();
        assert_eq!(x.counts(), &[2, 1]);
        assert_eq!(x.t(), 3);
        assert!(x.record(2).is_err());
        assert_eq!(CumulativeCounts::from_counts(vec![4, 0, 3]).t(), 7);
    }
}
