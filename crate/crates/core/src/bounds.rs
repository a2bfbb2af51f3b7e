//! Evaluators for the concentration bounds behind the 2SLS policies and for
//! the exploration-rate thresholds under which their compliers' regret is
//! logarithmic.
//!
//! Bounds are returned as-is, including vacuous values above 1.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BoundsError {
    #[error("xi out of range: {0} not in (0, 1)")]
    XiOutOfRange(f64),
    #[error("no suboptimal treatment; threshold undefined")]
    NoSuboptimalTreatment,
    #[error("need at least 2 arms, got {0}")]
    TooFewArms(usize),
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("{name} must be finite, got {value}")]
    NotFinite { name: &'static str, value: f64 },
}

fn positive(name: &'static str, value: f64) -> Result<(), BoundsError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(BoundsError::NonPositive { name, value })
    }
}

/// `P(‖P̂ − P‖_∞ > ε) ≤ Σ_z exp(m − n_z ε² / 8)`.
pub fn lemma1_bound(m: usize, n_z: &[u64], eps: f64) -> Result<f64, BoundsError> {
    positive("eps", eps)?;
    Ok(n_z.iter().map(|&n| (m as f64 - n as f64 * eps * eps / 8.0).exp()).sum())
}

/// `P(‖P̂⁻¹‖_∞ > √m / (σ(1 − ξ))) ≤ Σ_z exp(m − n_z σ² ξ² / (8m))`.
pub fn lemma2_bound(m: usize, n_z: &[u64], sigma_lower: f64, xi: f64) -> Result<f64, BoundsError> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(BoundsError::XiOutOfRange(xi));
    }
    positive("sigma_lower", sigma_lower)?;
    let mf = m as f64;
    Ok(n_z
        .iter()
        .map(|&n| (mf - n as f64 * sigma_lower * sigma_lower * xi * xi / (8.0 * mf)).exp())
        .sum())
}

/// `P(|μ̂̃_z − P̂_z μ| > ε) ≤ 2 exp(−n ε² / (4ψ))`.
pub fn lemma3_bound(n: u64, eps: f64, psi: f64) -> Result<f64, BoundsError> {
    positive("eps", eps)?;
    positive("psi", psi)?;
    Ok(2.0 * (-(n as f64) * eps * eps / (4.0 * psi)).exp())
}

/// `P(‖μ̂ − μ‖_∞ > ε) ≤ 2 Σ_z exp(m − n_z σ² ε² / (2m (2ε + √(2ψ))²))`.
pub fn lemma4_bound(m: usize, n_z: &[u64], sigma_lower: f64, psi: f64, eps: f64) -> Result<f64, BoundsError> {
    positive("sigma_lower", sigma_lower)?;
    positive("psi", psi)?;
    positive("eps", eps)?;
    let mf = m as f64;
    let width = 2.0 * eps + (2.0 * psi).sqrt();
    let rate = sigma_lower * sigma_lower * eps * eps / (2.0 * mf * width * width);
    Ok(2.0 * n_z.iter().map(|&n| (mf - n as f64 * rate).exp()).sum::<f64>())
}

/// `min{1/(8m), Δ²_min / (16 m ψ²)}` where `Δ_min` is the smallest positive gap.
fn threshold_core(sigma_min: f64, m: usize, mu: &[f64], psi: f64) -> Result<f64, BoundsError> {
    if m < 2 {
        return Err(BoundsError::TooFewArms(m));
    }
    positive("psi", psi)?;
    if !sigma_min.is_finite() || sigma_min < 0.0 {
        return Err(BoundsError::NotFinite { name: "sigma_min", value: sigma_min });
    }
    let best = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let delta = mu
        .iter()
        .map(|v| best - v)
        .filter(|&g| g > crate::oracle::ARGMAX_TOLERANCE)
        .fold(f64::INFINITY, f64::min);
    if !delta.is_finite() {
        return Err(BoundsError::NoSuboptimalTreatment);
    }
    let mf = m as f64;
    Ok(sigma_min * sigma_min * (1.0 / (8.0 * mf)).min(delta * delta / (16.0 * mf * psi * psi)))
}

/// Largest α permitted for the ε-decay policy: half the core threshold, capped at 1/2.
pub fn thm7_alpha_threshold(sigma_min: f64, m: usize, mu: &[f64], psi: f64) -> Result<f64, BoundsError> {
    Ok((threshold_core(sigma_min, m, mu, psi)? / 2.0).min(0.5))
}

/// Supremum of α for the fixed-schedule policy: the core threshold itself.
pub fn thm8_alpha_threshold(sigma_min: f64, m: usize, mu: &[f64], psi: f64) -> Result<f64, BoundsError> {
    threshold_core(sigma_min, m, mu, psi)
}

/// Coefficient of `log T` in the compliers' regret bound: `p_ι Σ_x (μ* − μ_x) / α`.
pub fn regret_bound_log_coefficient(p_complier: f64, mu: &[f64], alpha: f64) -> Result<f64, BoundsError> {
    positive("alpha", alpha)?;
    let best = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(p_complier * mu.iter().map(|v| best - v).sum::<f64>() / alpha)
}
