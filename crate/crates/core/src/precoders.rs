//! Analog and digital precoder matrices.
//!
//! Each RF chain feeds `M` true-time-delay units, each of which feeds `N`
//! phase shifters. The analog precoder at subcarrier `k` factors as
//! `F_k = F1 * F2_k` with a frequency-flat PS stage `F1` and a
//! frequency-dependent TTD stage `F2_k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigh, CMat};
use crate::model::{steering_vector, ChannelRealization, SystemConfig};

/// PS phases and TTD delays for every RF chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalogDesign {
    /// `phases[l][m][n]`: phase of PS `n` behind TTD `m` of RF chain `l`, in
    /// units of pi radians.
    pub phases: Vec<Vec<Vec<f64>>>,
    /// `delays_s[l][m]`: delay of TTD `m` on RF chain `l`.
    pub delays_s: Vec<Vec<f64>>,
}

impl AnalogDesign {
    /// All phases and delays zero.
    pub fn zeros(cfg: &SystemConfig) -> Self {
        AnalogDesign {
            phases: vec![vec![vec![0.0; cfg.ps_per_ttd]; cfg.ttds_per_rf]; cfg.n_rf],
            delays_s: vec![vec![0.0; cfg.ttds_per_rf]; cfg.n_rf],
        }
    }

    /// Checks the shape against `cfg` and that every delay lies in `[0, t_max]`.
    pub fn validate(&self, cfg: &SystemConfig) -> Result<()> {
        if self.phases.len() != cfg.n_rf || self.delays_s.len() != cfg.n_rf {
            return Err(Error::dims(
                "analog design RF chains",
                cfg.n_rf,
                format!("{} phase tables, {} delay rows", self.phases.len(), self.delays_s.len()),
            ));
        }
        for (x, t) in self.phases.iter().zip(&self.delays_s) {
            if x.len() != cfg.ttds_per_rf || t.len() != cfg.ttds_per_rf {
                return Err(Error::dims("analog design TTDs per chain", cfg.ttds_per_rf, x.len().max(t.len())));
            }
            if let Some(bad) = x.iter().find(|row| row.len() != cfg.ps_per_ttd) {
                return Err(Error::dims("analog design PSs per TTD", cfg.ps_per_ttd, bad.len()));
            }
            if let Some(&bad) = t.iter().find(|&&d| !(0.0..=cfg.t_max_s).contains(&d)) {
                return Err(Error::InvalidConfig(format!(
                    "TTD delay {bad:e} s outside [0, {:e}]",
                    cfg.t_max_s
                )));
            }
        }
        Ok(())
    }

    /// Dimensionless delays `2 f_c t`.
    pub fn thetas(&self, cfg: &SystemConfig) -> Vec<Vec<f64>> {
        self.delays_s
            .iter()
            .map(|row| row.iter().map(|t| 2.0 * cfg.fc_hz * t).collect())
            .collect()
    }
}

fn check_k(cfg: &SystemConfig, k: usize) -> Result<f64> {
    cfg.subcarrier_frequency(k)
}

/// Frequency-flat PS stage, `N_t x (M N_RF)`. Column `l M + m` carries the
/// phases of TTD `m` on chain `l` in rows `m N .. (m+1) N`.
pub fn build_ps_matrix(design: &AnalogDesign, cfg: &SystemConfig) -> Result<CMat> {
    design.validate(cfg)?;
    let (m_count, n_count) = (cfg.ttds_per_rf, cfg.ps_per_ttd);
    let scale = 1.0 / (cfg.nt as f64).sqrt();
    let mut f1 = CMat::zeros(cfg.nt, m_count * cfg.n_rf);
    for (l, chain) in design.phases.iter().enumerate() {
        for (m, ttd) in chain.iter().enumerate() {
            for (n, x) in ttd.iter().enumerate() {
                f1[(m * n_count + n, l * m_count + m)] = Complex64::from_polar(scale, PI * x);
            }
        }
    }
    Ok(f1)
}

/// TTD stage at subcarrier `k`, `(M N_RF) x N_RF` block diagonal with entries
/// `exp(-j 2 pi f_k t)`.
pub fn build_ttd_matrix(design: &AnalogDesign, cfg: &SystemConfig, k: usize) -> Result<CMat> {
    design.validate(cfg)?;
    let fk = check_k(cfg, k)?;
    let m_count = cfg.ttds_per_rf;
    let mut f2 = CMat::zeros(m_count * cfg.n_rf, cfg.n_rf);
    for (l, row) in design.delays_s.iter().enumerate() {
        for (m, t) in row.iter().enumerate() {
            f2[(l * m_count + m, l)] = Complex64::from_polar(1.0, -2.0 * PI * fk * t);
        }
    }
    Ok(f2)
}

/// `F_k = F1 F2_k`, built column by column without forming either factor.
pub fn composite(design: &AnalogDesign, cfg: &SystemConfig, k: usize) -> Result<CMat> {
    design.validate(cfg)?;
    let fk = check_k(cfg, k)?;
    let n_count = cfg.ps_per_ttd;
    let scale = 1.0 / (cfg.nt as f64).sqrt();
    let mut f = CMat::zeros(cfg.nt, cfg.n_rf);
    for l in 0..cfg.n_rf {
        for (m, ttd) in design.phases[l].iter().enumerate() {
            let delay = -2.0 * fk * design.delays_s[l][m];
            for (n, x) in ttd.iter().enumerate() {
                // reduce before scaling by pi to keep the argument small
                let turns = (x + delay) % 2.0;
                f[(m * n_count + n, l)] = Complex64::from_polar(scale, PI * turns);
            }
        }
    }
    Ok(f)
}

/// Fully digital-like analog precoder: column `l` is the array response
/// towards `psi[l]` at subcarrier `k`.
pub fn ideal_precoder(cfg: &SystemConfig, psi: &[f64], k: usize) -> Result<CMat> {
    let zeta = cfg.zeta(k)?;
    if let Some(bad) = psi.iter().find(|p| !(p.abs() <= 1.0)) {
        return Err(Error::InvalidConfig(format!("direction {bad} outside [-1, 1]")));
    }
    let cols: Vec<Vec<Complex64>> = psi.iter().map(|&p| steering_vector(cfg.nt, zeta, p)).collect();
    CMat::from_columns(&cols)
}

/// Baseband precoder for effective channel `H F`: the `n_s` dominant
/// eigenvectors of `(HF)^H (HF)`, scaled by one common factor so that
/// `||F W||_F^2 = n_s`.
pub fn digital_precoder(h: &CMat, f: &CMat, n_s: usize) -> Result<CMat> {
    let eff = h.matmul(f)?;
    if n_s == 0 || n_s > eff.cols() {
        return Err(Error::dims("digital precoder streams", format!("1..={}", eff.cols()), n_s));
    }
    let gram = eff.adjoint_matmul(&eff)?;
    let eig = eigh(&gram)?;
    let mut w = eig.vectors.leading_columns(n_s);
    let power = f.matmul(&w)?.frobenius_norm_sqr();
    if !(power > 0.0) {
        return Err(Error::Degenerate("analog precoder annihilates the digital precoder".into()));
    }
    w.scale((n_s as f64 / power).sqrt());
    Ok(w)
}

/// Every precoder matrix for one channel realization, indexed by `k - 1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PrecoderSet {
    pub f1: CMat,
    pub f2: Vec<CMat>,
    pub f: Vec<CMat>,
    pub ideal: Vec<CMat>,
    pub w: Vec<CMat>,
}

impl PrecoderSet {
    pub fn build(cfg: &SystemConfig, design: &AnalogDesign, channel: &ChannelRealization) -> Result<Self> {
        let f1 = build_ps_matrix(design, cfg)?;
        let mut set = PrecoderSet {
            f1,
            f2: Vec::with_capacity(cfg.subcarriers),
            f: Vec::with_capacity(cfg.subcarriers),
            ideal: Vec::with_capacity(cfg.subcarriers),
            w: Vec::with_capacity(cfg.subcarriers),
        };
        for k in 1..=cfg.subcarriers {
            let f = composite(design, cfg, k)?;
            set.w.push(digital_precoder(channel.at(k)?, &f, cfg.n_s)?);
            set.f.push(f);
            set.f2.push(build_ttd_matrix(design, cfg, k)?);
            set.ideal.push(ideal_precoder(cfg, &channel.paths.psi, k)?);
        }
        Ok(set)
    }
}
