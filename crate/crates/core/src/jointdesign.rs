//! Closed-form joint TTD and PS design, the delay-floored baseline it is
//! compared against, and the array-size / delay-budget selection rules.
//!
//! Both designs first solve for `|psi|` and then mirror the result for
//! negative directions: phases flip sign and delays become `t_max - t`. The
//! mirrored design differs from the exact conjugate only by a phase common to
//! every antenna of a chain, so its array gain at `-psi` equals the gain of the
//! unmirrored design at `psi`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::SystemConfig;
use crate::precoders::AnalogDesign;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignReport {
    pub design: AnalogDesign,
    /// `clamped[l][m]`: TTD `m` of chain `l` hit the delay budget.
    pub clamped: Vec<Vec<bool>>,
    /// Largest admissible `N_t` for the chosen `M`, `t_max` and the largest
    /// `|psi|`. `None` when every direction is broadside.
    pub criterion_nt_max: Option<u64>,
    /// Smallest delay budget that keeps every TTD unclamped (s).
    pub criterion_tmax_min_s: f64,
}

impl DesignReport {
    pub fn any_clamped(&self) -> bool {
        self.clamped.iter().flatten().any(|&c| c)
    }
}

fn check_inputs(cfg: &SystemConfig, psi: &[f64]) -> Result<()> {
    cfg.validate()?;
    if psi.len() != cfg.n_rf {
        return Err(Error::dims("directions per RF chain", cfg.n_rf, psi.len()));
    }
    if let Some(bad) = psi.iter().find(|p| !(p.abs() <= 1.0)) {
        return Err(Error::InvalidConfig(format!("direction {bad} outside [-1, 1]")));
    }
    Ok(())
}

fn psi_max(psi: &[f64]) -> f64 {
    psi.iter().fold(0.0, |a, p| a.max(p.abs()))
}

/// Optimal PS phases and TTD delays for each chain.
///
/// For `psi >= 0` and TTD `m`, the delay is `((2m-1)N - 1) psi / (4 f_c)` with
/// phases `x_n = (N - 2n + 1) psi / 2` as long as that delay fits the budget.
/// Otherwise the delay saturates at `t_max` and the phases absorb the rest:
/// `x_n = 2 f_c t_max - ((m-1)N + n - 1) psi`.
pub fn design_theorem1(cfg: &SystemConfig, psi: &[f64]) -> Result<DesignReport> {
    check_inputs(cfg, psi)?;
    let n_count = cfg.ps_per_ttd;
    let theta_max = cfg.theta_max();
    let budget = 4.0 * cfg.fc_hz * cfg.t_max_s;
    let mut design = AnalogDesign::zeros(cfg);
    let mut clamped = vec![vec![false; cfg.ttds_per_rf]; cfg.n_rf];
    for (l, &p) in psi.iter().enumerate() {
        let a = p.abs();
        for m in 1..=cfg.ttds_per_rf {
            let span = ((2 * m - 1) * n_count - 1) as f64;
            let (delay, phases): (f64, Vec<f64>) = if span * a <= budget {
                let t = (span * a / (4.0 * cfg.fc_hz)).min(cfg.t_max_s);
                let x = (1..=n_count)
                    .map(|n| (n_count as f64 - 2.0 * n as f64 + 1.0) / 2.0 * a)
                    .collect();
                (t, x)
            } else {
                clamped[l][m - 1] = true;
                let x = (1..=n_count)
                    .map(|n| theta_max - ((m - 1) * n_count + n - 1) as f64 * a)
                    .collect();
                (cfg.t_max_s, x)
            };
            let (delay, phases) = mirror(cfg, p, delay, phases);
            design.delays_s[l][m - 1] = delay;
            design.phases[l][m - 1] = phases;
        }
    }
    let pm = psi_max(psi);
    Ok(DesignReport {
        design,
        clamped,
        criterion_nt_max: criterion_nt(cfg, pm)?,
        criterion_tmax_min_s: criterion_tmax(cfg, pm)?,
    })
}

fn mirror(cfg: &SystemConfig, psi: f64, delay: f64, phases: Vec<f64>) -> (f64, Vec<f64>) {
    if psi < 0.0 {
        (cfg.t_max_s - delay, phases.into_iter().map(|x| -x).collect())
    } else {
        (delay, phases)
    }
}

/// Baseline design: delays `m N psi / (2 f_c)` floored to `t_max`, phases
/// `x_n = -(n - 1) psi`. The phases are not re-optimised after flooring.
pub fn design_benchmark(cfg: &SystemConfig, psi: &[f64]) -> Result<AnalogDesign> {
    check_inputs(cfg, psi)?;
    let n_count = cfg.ps_per_ttd;
    let mut design = AnalogDesign::zeros(cfg);
    for (l, &p) in psi.iter().enumerate() {
        let a = p.abs();
        for m in 1..=cfg.ttds_per_rf {
            let raw = (m * n_count) as f64 * a / (2.0 * cfg.fc_hz);
            let phases = (0..n_count).map(|n| -(n as f64) * a).collect();
            let (delay, phases) = mirror(cfg, p, raw.min(cfg.t_max_s), phases);
            design.delays_s[l][m - 1] = delay;
            design.phases[l][m - 1] = phases;
        }
    }
    Ok(design)
}

/// `floor(M/(2M-1) + 4M/(2M-1) * f_c t_max / psi_max)`: the largest `N_t`
/// for which no TTD saturates. `None` for `psi_max = 0`. The result is not
/// rounded to a multiple of `M`.
pub fn criterion_nt(cfg: &SystemConfig, psi_max: f64) -> Result<Option<u64>> {
    if !(0.0..=1.0).contains(&psi_max) {
        return Err(Error::InvalidConfig(format!("psi_max {psi_max} outside [0, 1]")));
    }
    if psi_max == 0.0 {
        return Ok(None);
    }
    let m = cfg.ttds_per_rf as f64;
    let bound = m / (2.0 * m - 1.0) + 4.0 * m / (2.0 * m - 1.0) * cfg.fc_hz * cfg.t_max_s / psi_max;
    Ok(Some(bound.floor() as u64))
}

/// `psi_max ((2M-1) N_t - M) / (4 M f_c)`: the smallest delay budget for
/// which no TTD saturates (s).
pub fn criterion_tmax(cfg: &SystemConfig, psi_max: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&psi_max) {
        return Err(Error::InvalidConfig(format!("psi_max {psi_max} outside [0, 1]")));
    }
    let m = cfg.ttds_per_rf as f64;
    let nt = cfg.nt as f64;
    Ok(psi_max * ((2.0 * m - 1.0) * nt - m) / (4.0 * m * cfg.fc_hz))
}
