//! Classical reactive baselines. Each one changes its cache only on a miss
//! and evicts at most one file per slot; eviction ties go to the lowest id.

use std::collections::VecDeque;

use crate::model::{CacheConfig, FileId};

/// Least recently used; `order` runs from least to most recent.
#[derive(Debug, Clone, Default)]
pub struct LruState {
    order: VecDeque<FileId>,
}

impl LruState {
    pub(crate) fn observe(&mut self, file: FileId, hit: bool, capacity: usize) {
        if hit {
            if let Some(pos) = self.order.iter().position(|&f| f == file) {
                self.order.remove(pos);
            }
        } else if self.order.len() >= capacity {
            self.order.pop_front();
        }
        self.order.push_back(file);
    }

    pub(crate) fn config(&self) -> CacheConfig {
        self.order.iter().copied().collect()
    }

    pub fn recency_order(&self) -> impl Iterator<Item = FileId> + '_ {
        self.order.iter().copied()
    }
}

/// Least frequently used over global request counts (cached or not).
///
/// With `admission` off (classic LFU) a miss always admits the requested file,
/// evicting the cached file of smallest frequency. With `admission` on, the
/// least frequent file among the cached ones and the requested one is left
/// out, so a rarely requested file never displaces a popular one; this is the
/// zero-perturbation limit of FTPL.
#[derive(Debug, Clone)]
pub struct LfuState {
    frequency: Vec<u64>,
    cached: CacheConfig,
    admission: bool,
}

impl LfuState {
    pub(crate) fn new(num_files: usize, admission: bool) -> Self {
        LfuState {
            frequency: vec![0; num_files],
            cached: CacheConfig::empty(),
            admission,
        }
    }

    pub(crate) fn observe(&mut self, file: FileId, hit: bool, capacity: usize) {
        self.frequency[file] += 1;
        if hit {
            return;
        }
        if self.cached.len() < capacity {
            self.cached = self.cached.ids().iter().copied().chain([file]).collect();
            return;
        }
        let candidates = self
            .cached
            .ids()
            .iter()
            .copied()
            .chain(self.admission.then_some(file));
        let victim = candidates
            .min_by_key(|&f| (self.frequency[f], f))
            .expect("a full cache has at least one file");
        if victim != file {
            self.cached = self
                .cached
                .ids()
                .iter()
                .copied()
                .filter(|&f| f != victim)
                .chain([file])
                .collect();
        }
    }

    pub(crate) fn config(&self) -> &CacheConfig {
        &self.cached
    }

    pub fn frequencies(&self) -> &[u64] {
        &self.frequency
    }
}

/// First in, first out; hits do not reorder.
#[derive(Debug, Clone, Default)]
pub struct FifoState {
    queue: VecDeque<FileId>,
}

impl FifoState {
    pub(crate) fn observe(&mut self, file: FileId, hit: bool, capacity: usize) {
        if hit {
            return;
        }
        if self.queue.len() >= capacity {
            self.queue.pop_front();
        }
        self.queue.push_back(file);
    }

    pub(crate) fn config(&self) -> CacheConfig {
        self.queue.iter().copied().collect()
    }
}
