//! Closed-form upper bounds on expected regret and switching cost.

use std::f64::consts::{E, PI};

use crate::error::{Error, Result};

fn check_ratio(num_files: usize, capacity: usize) -> Result<()> {
    if capacity == 0 || num_files <= capacity {
        return Err(Error::domain(format!(
            "bound needs N > C >= 1 (N = {num_files}, C = {capacity})"
        )));
    }
    Ok(())
}

fn check_common(horizon: u64, switch_cost: f64) -> Result<()> {
    if horizon == 0 {
        return Err(Error::domain("horizon must be at least one slot"));
    }
    if !(switch_cost >= 0.0 && switch_cost.is_finite()) {
        return Err(Error::domain(format!(
            "switch cost {switch_cost} must be non-negative"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::domain(format!(
            "alpha must be positive, got {alpha}"
        )));
    }
    Ok(())
}

/// Regret bound of constant-rate FTPL for an arbitrary rate `η`:
/// `C η sqrt(2 ln(N/C)) + T (1 + D) / (η sqrt(2π))`.
///
/// At the tuned rate this equals [`theorem1_bound`].
pub fn fixed_eta_bound(
    eta: f64,
    horizon: u64,
    num_files: usize,
    capacity: usize,
    switch_cost: f64,
) -> Result<f64> {
    check_ratio(num_files, capacity)?;
    check_common(horizon, switch_cost)?;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::domain(format!("eta must be positive, got {eta}")));
    }
    let c = capacity as f64;
    let log_ratio = (num_files as f64 / c).ln();
    Ok(c * eta * (2.0 * log_ratio).sqrt()
        + horizon as f64 * (1.0 + switch_cost) / (eta * (2.0 * PI).sqrt()))
}

/// Regret bound of FTPL at the horizon-tuned constant rate:
/// `2 π^(-1/4) sqrt(C (D+1)) ln(N/C)^(1/4) sqrt(T)`.
pub fn theorem1_bound(
    horizon: u64,
    num_files: usize,
    capacity: usize,
    switch_cost: f64,
) -> Result<f64> {
    check_ratio(num_files, capacity)?;
    check_common(horizon, switch_cost)?;
    let c = capacity as f64;
    let log_ratio = (num_files as f64 / c).ln();
    Ok(2.0 / PI.powf(0.25)
        * (c * (switch_cost + 1.0)).sqrt()
        * log_ratio.powf(0.25)
        * (horizon as f64).sqrt())
}

/// Switching-free regret bound of anytime FTPL with `η_t = α √t`:
/// `η_1 C sqrt(2 ln(N/C)) + η_T C sqrt(2 ln(N e / C)) + Σ_t 1/(η_t sqrt(2π))`,
/// with the sum evaluated term by term.
pub fn prop1_bound(alpha: f64, horizon: u64, num_files: usize, capacity: usize) -> Result<f64> {
    check_ratio(num_files, capacity)?;
    check_common(horizon, 0.0)?;
    check_alpha(alpha)?;
    let c = capacity as f64;
    let n = num_files as f64;
    let eta_1 = alpha;
    let eta_t = alpha * (horizon as f64).sqrt();
    let inverse_sum: f64 = (1..=horizon)
        .map(|t| 1.0 / (alpha * (t as f64).sqrt()))
        .sum();
    Ok(eta_1 * c * (2.0 * (n / c).ln()).sqrt()
        + eta_t * c * (2.0 * (n * E / c).ln()).sqrt()
        + inverse_sum / (2.0 * PI).sqrt())
}

/// Expected switching-cost bound of anytime FTPL with `η_t = α √t`:
///
/// `3√2/(α√π) (√T - 1) + (N-1) (2 + sqrt(2e ln 2N))/√e ln T
///  + 3 (N-1) (2 + sqrt(2e ln 2N)) / (sqrt(2πe) α) (1 - T^(-1/2))`.
pub fn prop2_bound(alpha: f64, horizon: u64, num_files: usize) -> Result<f64> {
    check_alpha(alpha)?;
    if horizon < 2 {
        return Err(Error::domain("switching bound needs T >= 2"));
    }
    if num_files < 2 {
        return Err(Error::domain("switching bound needs N >= 2"));
    }
    let t = horizon as f64;
    let n = num_files as f64;
    let spread = 2.0 + (2.0 * E * (2.0 * n).ln()).sqrt();
    Ok(3.0 * 2f64.sqrt() / (alpha * PI.sqrt()) * (t.sqrt() - 1.0)
        + (n - 1.0) * spread / E.sqrt() * t.ln()
        + 3.0 * (n - 1.0) * spread / ((2.0 * PI * E).sqrt() * alpha) * (1.0 - 1.0 / t.sqrt()))
}

/// Bound values with the parameters they were evaluated at.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub horizon: u64,
    pub num_files: usize,
    pub capacity: usize,
    pub switch_cost: f64,
    pub alpha: f64,
    pub theorem1_bound: f64,
    pub prop1_bound: f64,
    pub prop2_bound: f64,
    pub anytime_total_bound: f64,
}

/// Anytime regret bound including switching: `prop1 + D/2 * prop2`, with the
/// tuned constant-rate bound alongside.
pub fn anytime_total_bound(
    alpha: f64,
    horizon: u64,
    num_files: usize,
    capacity: usize,
    switch_cost: f64,
) -> Result<BoundReport> {
    check_common(horizon, switch_cost)?;
    let prop1 = prop1_bound(alpha, horizon, num_files, capacity)?;
    let prop2 = prop2_bound(alpha, horizon, num_files)?;
    Ok(BoundReport {
        horizon,
        num_files,
        capacity,
        switch_cost,
        alpha,
        theorem1_bound: theorem1_bound(horizon, num_files, capacity, switch_cost)?,
        prop1_bound: prop1,
        prop2_bound: prop2,
        anytime_total_bound: prop1 + 0.5 * switch_cost * prop2,
    })
}
