use crate::error::{Error, Result};

/// Perturbation scale `η_t` as a function of the slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LearningRateSchedule {
    /// Horizon-tuned constant rate.
    Constant { eta: f64 },
    /// Anytime rate `η_t = α √t`.
    AnytimeSqrt { alpha: f64 },
}

fn check_positive(name: &str, value: f64) -> Result<f64> {
    if value > 0.0 && value.is_finite() {
        Ok(value)
    } else {
        Err(Error::domain(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl LearningRateSchedule {
    pub fn constant(eta: f64) -> Result<Self> {
        Ok(LearningRateSchedule::Constant {
            eta: check_positive("eta", eta)?,
        })
    }

    pub fn anytime_sqrt(alpha: f64) -> Result<Self> {
        Ok(LearningRateSchedule::AnytimeSqrt {
            alpha: check_positive("alpha", alpha)?,
        })
    }

    /// `η_t` for a 1-based slot.
    pub fn eta_at(&self, t: u64) -> Result<f64> {
        if t == 0 {
            return Err(Error::domain("learning rate is defined for slots t >= 1"));
        }
        Ok(match *self {
            LearningRateSchedule::Constant { eta } => eta,
            LearningRateSchedule::AnytimeSqrt { alpha } => alpha * (t as f64).sqrt(),
        })
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, LearningRateSchedule::Constant { .. })
    }
}

/// The constant rate that balances the perturbation and movement terms over a
/// known horizon: `η = sqrt(T(D+1)/C) * (4π ln(N/C))^(-1/4)`.
pub fn constant_eta_for_horizon(
    horizon: u64,
    num_files: usize,
    capacity: usize,
    switch_cost: f64,
) -> Result<f64> {
    if horizon == 0 {
        return Err(Error::domain("horizon must be at least one slot"));
    }
    if capacity == 0 || num_files <= capacity {
        return Err(Error::domain(format!(
            "tuned rate needs N > C >= 1 (N = {num_files}, C = {capacity})"
        )));
    }
    if !(switch_cost >= 0.0 && switch_cost.is_finite()) {
        return Err(Error::domain(format!(
            "switch cost {switch_cost} must be non-negative"
        )));
    }
    let t = horizon as f64;
    let c = capacity as f64;
    let log_ratio = (num_files as f64 / c).ln();
    Ok((t * (switch_cost + 1.0) / c).sqrt() * (4.0 * std::f64::consts::PI * log_ratio).powf(-0.25))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn eta_values() {
        let c = LearningRateSchedule::constant(2.5).unwrap();
        assert_eq!(c.eta_at(999).unwrap(), 2.5);
        let a = LearningRateSchedule::anytime_sqrt(2.0).unwrap();
        assert_eq!(a.eta_at(4).unwrap(), 4.0);
        let a1 = LearningRateSchedule::anytime_sqrt(1.0).unwrap();
        assert_relative_eq!(
            a1.eta_at(2).unwrap(),
            std::f64::consts::SQRT_2,
            epsilon = 1e-12
        );
        assert!(matches!(a.eta_at(0), Err(Error::Domain(_))));
    }

    #[test]
    fn schedules_reject_non_positive() {
        assert!(LearningRateSchedule::constant(0.0).is_err());
        assert!(LearningRateSchedule::anytime_sqrt(-1.0).is_err());
        assert!(LearningRateSchedule::constant(f64::INFINITY).is_err());
    }

    #[test]
    fn anytime_non_decreasing() {
        let a = LearningRateSchedule::anytime_sqrt(0.3).unwrap();
        let mut prev = 0.0;
        for t in 1..1000 {
            let eta = a.eta_at(t).unwrap();
            assert!(eta > 0.0 && eta >= prev);
            prev = eta;
        }
    }

    #[test]
    fn tuned_constant_rate() {
        // (T=65000, N=1244, C=12, D=1); value from an independent evaluation
        let eta = constant_eta_for_horizon(65_000, 1244, 12, 1.0).unwrap();
        assert_relative_eq!(eta, 37.663_568_838_402_98, max_relative = 1e-12);

        let d0 = constant_eta_for_horizon(500, 40, 4, 0.0).unwrap();
        assert_relative_eq!(
            d0,
            (500.0f64 / 4.0).sqrt() * (4.0 * PI * 10f64.ln()).powf(-0.25),
            max_relative = 1e-14
        );

        let tiny = constant_eta_for_horizon(1, 2, 1, 0.0).unwrap();
        assert_relative_eq!(tiny, 0.582_091_380_971_710_1, max_relative = 1e-12);
    }

    #[test]
    fn tuned_rate_domain() {
        assert!(matches!(
            constant_eta_for_horizon(10, 4, 4, 1.0),
            Err(Error::Domain(_))
        ));
        assert!(constant_eta_for_horizon(0, 4, 2, 1.0).is_err());
    }
}
