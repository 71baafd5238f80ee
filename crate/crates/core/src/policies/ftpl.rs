use crate::error::Result;
use crate::model::{CacheConfig, Catalog, CumulativeCounts, FileId};
use crate::perturbation::{sample_perturbation, Perturbation};
use crate::schedule::LearningRateSchedule;
use crate::selection::top_c_of_scores;

/// Follow-the-Perturbed-Leader: cache the top C files of `X_t + η_t γ`, with
/// `γ` drawn once per run.
///
/// The full top-C is recomputed every slot. Under a constant rate only the
/// requested file's score moves, but under `η_t = α√t` every score moves and
/// several files may change at once.
#[derive(Debug, Clone)]
pub struct FtplState {
    counts: CumulativeCounts,
    perturbation: Perturbation,
    schedule: LearningRateSchedule,
    scratch: Vec<(f64, FileId)>,
}

impl FtplState {
    pub fn new(catalog: &Catalog, schedule: LearningRateSchedule, seed: u64) -> Result<Self> {
        Ok(FtplState {
            counts: CumulativeCounts::zeros(catalog.num_files()),
            perturbation: sample_perturbation(catalog.num_files(), seed)?,
            schedule,
            scratch: Vec::with_capacity(catalog.num_files()),
        })
    }

    pub fn counts(&self) -> &CumulativeCounts {
        &self.counts
    }

    pub fn perturbation(&self) -> &Perturbation {
        &self.perturbation
    }

    pub fn schedule(&self) -> &LearningRateSchedule {
        &self.schedule
    }

    pub(crate) fn decide(&mut self, t: u64, capacity: usize) -> Result<CacheConfig> {
        let eta = self.schedule.eta_at(t)?;
        let scores = self
            .counts
            .counts()
            .iter()
            .zip(self.perturbation.gamma())
            .map(|(&x, &g)| x as f64 + eta * g);
        Ok(top_c_of_scores(scores, capacity, &mut self.scratch))
    }

    pub(crate) fn observe(&mut self, file: FileId) -> Result<()> {
        self.counts.record(file)
    }
}
