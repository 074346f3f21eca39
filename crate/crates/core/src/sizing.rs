//! How many TTDs per RF chain are needed so that every subcarrier keeps an
//! array gain of at least `g0`.
//!
//! With `M` TTDs each feeding `N_t / M` phase shifters, the closed-form design
//! leaves a per-subcarrier gain of `|sin(S d) / (S sin d)|` with
//! `S = N_t / M` and `d` the squint offset. A second-order expansion of that
//! ratio gives a closed-form lower bound on `M`; [`m_star_exact`] checks the
//! exact ratio divisor by divisor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::{gain_closed_form, squint_offset};
use crate::model::SystemConfig;

/// Power drawn by one TTD (W).
pub const P_TTD_W: f64 = 0.1;
/// Power drawn by one phase shifter (W).
pub const P_PS_W: f64 = 0.02;

/// Second-order approximation `1 + (1 - (N_t/M)^2) delta^2 / 6` of the
/// subarray gain.
pub fn taylor_gain(nt: usize, m: usize, delta: f64) -> f64 {
    let ratio = nt as f64 / m as f64;
    1.0 + (1.0 - ratio * ratio) * delta * delta / 6.0
}

/// Divisors of `n` in ascending order.
pub fn divisors(n: usize) -> Vec<usize> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

/// Smallest divisor of `n` that is at least `x`.
pub fn divisor_ceiling(x: f64, n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidConfig("divisor_ceiling needs n >= 1".into()));
    }
    if x.is_nan() || x > n as f64 {
        return Err(Error::InvalidConfig(format!("{x} exceeds {n}: no divisor is large enough")));
    }
    Ok(divisors(n).into_iter().find(|&d| d as f64 >= x).unwrap_or(n))
}

fn check_threshold(g0: f64) -> Result<()> {
    if !(g0 > 0.0 && g0 < 1.0) {
        return Err(Error::InvalidConfig(format!("gain threshold must lie in (0, 1), got {g0}")));
    }
    Ok(())
}

/// `6 (1 - g0) / ((pi/2)(B/f_c)((K-1)/(2K)) psi_max)^2`. Infinite when there is
/// no squint at all (single subcarrier, zero bandwidth or broadside).
pub fn omega(cfg: &SystemConfig, g0: f64, psi_max: f64) -> Result<f64> {
    check_threshold(g0)?;
    let k = cfg.subcarriers as f64;
    let edge = std::f64::consts::FRAC_PI_2 * cfg.bandwidth_hz / cfg.fc_hz * (k - 1.0) / (2.0 * k) * psi_max;
    Ok(6.0 * (1.0 - g0) / (edge * edge))
}

/// `sqrt(N_t^2 / (1 + Omega))` before rounding up to a divisor.
pub fn m_star_raw(cfg: &SystemConfig, g0: f64, psi_max: f64) -> Result<f64> {
    let om = omega(cfg, g0, psi_max)?;
    let nt = cfg.nt as f64;
    Ok(if om.is_infinite() { 0.0 } else { (nt * nt / (1.0 + om)).sqrt() })
}

/// Closed-form TTD count: the raw value rounded up to a divisor of `N_t`.
pub fn m_star_closed_form(cfg: &SystemConfig, g0: f64, psi_max: f64) -> Result<usize> {
    if !(psi_max > 0.0 && psi_max <= 1.0) {
        return Err(Error::InvalidConfig(format!("psi_max must lie in (0, 1], got {psi_max}")));
    }
    divisor_ceiling(m_star_raw(cfg, g0, psi_max)?, cfg.nt)
}

/// Smallest gain over all subcarriers and directions with `m` TTDs per chain.
pub fn worst_gain(cfg: &SystemConfig, m: usize, psi_set: &[f64]) -> Result<f64> {
    if m == 0 || !cfg.nt.is_multiple_of(m) {
        return Err(Error::InvalidConfig(format!("{m} does not divide N_t = {}", cfg.nt)));
    }
    let sub = cfg.nt / m;
    let mut worst = f64::INFINITY;
    for &psi in psi_set {
        for k in 1..=cfg.subcarriers {
            worst = worst.min(gain_closed_form(sub, squint_offset(cfg, k, psi)?));
        }
    }
    Ok(worst)
}

/// Per-subcarrier gain with `m` TTDs per chain towards `psi`.
pub fn subarray_gains(cfg: &SystemConfig, m: usize, psi: f64) -> Result<Vec<f64>> {
    if m == 0 || !cfg.nt.is_multiple_of(m) {
        return Err(Error::InvalidConfig(format!("{m} does not divide N_t = {}", cfg.nt)));
    }
    (1..=cfg.subcarriers)
        .map(|k| Ok(gain_closed_form(cfg.nt / m, squint_offset(cfg, k, psi)?)))
        .collect()
}

/// First divisor of `N_t` (ascending) whose worst-case gain over every
/// subcarrier and every direction in `psi_set` reaches `g0`.
pub fn m_star_exact(cfg: &SystemConfig, g0: f64, psi_set: &[f64]) -> Result<usize> {
    if !(0.0..=1.0).contains(&g0) {
        return Err(Error::InvalidConfig(format!("gain threshold must lie in [0, 1], got {g0}")));
    }
    if psi_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let divs = divisors(cfg.nt);
    let feasible: Vec<bool> = divs
        .par_iter()
        .map(|&m| worst_gain(cfg, m, psi_set).map(|g| g >= g0))
        .collect::<Result<_>>()?;
    Ok(divs
        .iter()
        .zip(&feasible)
        .find(|(_, &ok)| ok)
        .map(|(&m, _)| m)
        .unwrap_or(cfg.nt))
}

/// Continuous large-`K` estimate `(pi N_t / (4 f_c)) sqrt(psi^2 / (6(1-g0))) B`,
/// linear in the bandwidth. Infinite for `g0 >= 1`.
pub fn m_star_linear_bandwidth(cfg: &SystemConfig, g0: f64, psi_max: f64) -> f64 {
    if g0 >= 1.0 {
        return f64::INFINITY;
    }
    std::f64::consts::PI * cfg.nt as f64 / (4.0 * cfg.fc_hz)
        * (psi_max * psi_max / (6.0 * (1.0 - g0))).sqrt()
        * cfg.bandwidth_hz
}

/// `N_RF M P_TTD + N_RF N_t P_PS` (W).
pub fn total_power(cfg: &SystemConfig, m: usize) -> f64 {
    let n_rf = cfg.n_rf as f64;
    n_rf * m as f64 * P_TTD_W + n_rf * cfg.nt as f64 * P_PS_W
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorstGainEntry {
    pub m: usize,
    pub worst_gain: f64,
    /// Fraction of (subcarrier, direction) pairs below the threshold.
    pub fraction_below: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingResult {
    pub g0: f64,
    pub psi_set: Vec<f64>,
    pub omega: f64,
    pub m_star_raw: f64,
    pub m_star: usize,
    pub exact_m: usize,
    pub linear_bandwidth_estimate: f64,
    pub total_power_w: f64,
    /// Worst-case gain for every divisor of `N_t`.
    pub per_divisor: Vec<WorstGainEntry>,
}

/// Runs the closed form and the exact search and records the audit trace.
pub fn size_ttds(cfg: &SystemConfig, g0: f64, psi_set: &[f64]) -> Result<SizingResult> {
    cfg.validate()?;
    if psi_set.is_empty() {
        return Err(Error::EmptyInput);
    }
    let psi_max = psi_set.iter().fold(0.0f64, |a, p| a.max(p.abs()));
    let m_star = m_star_closed_form(cfg, g0, psi_max)?;
    let per_divisor = divisors(cfg.nt)
        .par_iter()
        .map(|&m| {
            let mut below = 0usize;
            let mut worst = f64::INFINITY;
            for &psi in psi_set {
                for g in subarray_gains(cfg, m, psi)? {
                    worst = worst.min(g);
                    below += usize::from(g < g0);
                }
            }
            Ok(WorstGainEntry {
                m,
                worst_gain: worst,
                fraction_below: below as f64 / (psi_set.len() * cfg.subcarriers) as f64,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SizingResult {
        g0,
        psi_set: psi_set.to_vec(),
        omega: omega(cfg, g0, psi_max)?,
        m_star_raw: m_star_raw(cfg, g0, psi_max)?,
        m_star,
        exact_m: m_star_exact(cfg, g0, psi_set)?,
        linear_bandwidth_estimate: m_star_linear_bandwidth(cfg, g0, psi_max),
        total_power_w: total_power(cfg, m_star),
        per_divisor,
    })
}
