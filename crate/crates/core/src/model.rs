//! System configuration, the OFDM subcarrier grid, array response vectors and
//! random geometric channel realizations.
//!
//! Subcarrier indices are 1-based throughout (`k = 1..=K`), with the central
//! subcarrier at `k = (K + 1) / 2`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMat;

/// Scalar system parameters. All physical quantities are in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemConfig {
    /// Carrier frequency `f_c` (Hz).
    pub fc_hz: f64,
    /// OFDM bandwidth `B` (Hz).
    pub bandwidth_hz: f64,
    /// Number of subcarriers `K` (odd).
    pub subcarriers: usize,
    /// Transmit antennas `N_t`.
    pub nt: usize,
    /// Receive antennas `N_r`.
    pub nr: usize,
    /// RF chains `N_RF`.
    pub n_rf: usize,
    /// Data streams `N_s`.
    pub n_s: usize,
    /// TTDs per RF chain `M`.
    pub ttds_per_rf: usize,
    /// Phase shifters per TTD `N`.
    pub ps_per_ttd: usize,
    /// Largest delay a TTD can produce (s).
    pub t_max_s: f64,
    /// Linear SNR `rho`.
    pub rho: f64,
    pub seed: u64,
    /// Upper bound of the uniform path-delay distribution (s).
    pub path_delay_max_s: f64,
}

impl Default for SystemConfig {
    /// The reference wideband THz setup: 300 GHz carrier, 30 GHz bandwidth,
    /// 129 subcarriers, 256 antennas split into 16 TTDs of 16 PSs, 4 RF
    /// chains, t_max = 340 ps and 3 dB SNR.
    fn default() -> Self {
        SystemConfig {
            fc_hz: 300e9,
            bandwidth_hz: 30e9,
            subcarriers: 129,
            nt: 256,
            nr: 4,
            n_rf: 4,
            n_s: 4,
            ttds_per_rf: 16,
            ps_per_ttd: 16,
            t_max_s: 340e-12,
            rho: db_to_linear(3.0),
            seed: 0,
            path_delay_max_s: 20e-3,
        }
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.fc_hz.is_finite() && self.fc_hz > 0.0) {
            return bad(format!("fc_hz must be positive, got {}", self.fc_hz));
        }
        if !(self.bandwidth_hz.is_finite() && self.bandwidth_hz >= 0.0) {
            return bad(format!("bandwidth_hz must be non-negative, got {}", self.bandwidth_hz));
        }
        if self.bandwidth_hz >= self.fc_hz {
            return bad(format!(
                "bandwidth {} Hz must be below the carrier {} Hz",
                self.bandwidth_hz, self.fc_hz
            ));
        }
        if self.subcarriers == 0 || self.subcarriers.is_multiple_of(2) {
            return bad(format!("subcarriers must be odd and positive, got {}", self.subcarriers));
        }
        for (name, v) in [
            ("nt", self.nt),
            ("nr", self.nr),
            ("n_rf", self.n_rf),
            ("n_s", self.n_s),
            ("ttds_per_rf", self.ttds_per_rf),
            ("ps_per_ttd", self.ps_per_ttd),
        ] {
            if v == 0 {
                return bad(format!("{name} must be at least 1"));
            }
        }
        if self.ttds_per_rf * self.ps_per_ttd != self.nt {
            return bad(format!(
                "nt = {} must equal ttds_per_rf * ps_per_ttd = {} * {}",
                self.nt, self.ttds_per_rf, self.ps_per_ttd
            ));
        }
        if !(self.n_s == self.n_rf && self.n_rf == self.nr) {
            return bad(format!(
                "expected n_s = n_rf = nr, got n_s = {}, n_rf = {}, nr = {}",
                self.n_s, self.n_rf, self.nr
            ));
        }
        if self.n_rf > self.nt {
            return bad(format!("n_rf = {} exceeds nt = {}", self.n_rf, self.nt));
        }
        if !(self.t_max_s.is_finite() && self.t_max_s >= 0.0) {
            return bad(format!("t_max_s must be non-negative, got {}", self.t_max_s));
        }
        if !(self.rho.is_finite() && self.rho >= 0.0) {
            return bad(format!("rho must be non-negative, got {}", self.rho));
        }
        if !(self.path_delay_max_s.is_finite() && self.path_delay_max_s >= 0.0) {
            return bad(format!(
                "path_delay_max_s must be non-negative, got {}",
                self.path_delay_max_s
            ));
        }
        if 4 * self.n_rf >= self.nt {
            log::warn!(
                "n_rf = {} is not small relative to nt = {}; large-array approximations are loose",
                self.n_rf,
                self.nt
            );
        }
        Ok(())
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: SystemConfig = serde_json::from_str(s)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    /// Dimensionless delay budget `2 f_c t_max`.
    pub fn theta_max(&self) -> f64 {
        2.0 * self.fc_hz * self.t_max_s
    }

    pub fn central_subcarrier(&self) -> usize {
        self.subcarriers.div_ceil(2)
    }

    /// `eta = N (B/f_c)^2 (K^2 - 1) / (12 K^2)`, the spread of the squint
    /// ratios scaled by the subarray size.
    pub fn eta(&self) -> f64 {
        let k = self.subcarriers as f64;
        let r = self.bandwidth_hz / self.fc_hz;
        self.ps_per_ttd as f64 * r * r * (k * k - 1.0) / (12.0 * k * k)
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.subcarriers {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: self.subcarriers,
            });
        }
        Ok(())
    }

    /// Signed offset of subcarrier `k` from the centre, in units of `B/K`.
    fn centred_index(&self, k: usize) -> f64 {
        k as f64 - 1.0 - (self.subcarriers as f64 - 1.0) / 2.0
    }

    /// `f_k = f_c + (B/K)(k - 1 - (K-1)/2)`.
    pub fn subcarrier_frequency(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.fc_hz + self.bandwidth_hz / self.subcarriers as f64 * self.centred_index(k))
    }

    /// `zeta_k - 1`, computed without forming `zeta_k` so that it keeps full
    /// relative precision.
    pub fn zeta_offset(&self, k: usize) -> Result<f64> {
        self.check_k(k)?;
        Ok(self.bandwidth_hz / self.fc_hz * (self.centred_index(k) / self.subcarriers as f64))
    }

    /// `zeta_k = f_k / f_c`: the factor by which spatial directions stretch at
    /// subcarrier `k`.
    pub fn zeta(&self, k: usize) -> Result<f64> {
        Ok(1.0 + self.zeta_offset(k)?)
    }

    pub fn zetas(&self) -> Vec<f64> {
        (1..=self.subcarriers).map(|k| 1.0 + self.zeta_offset(k).unwrap()).collect()
    }

    pub fn zeta_offsets(&self) -> Vec<f64> {
        (1..=self.subcarriers).map(|k| self.zeta_offset(k).unwrap()).collect()
    }
}

/// Uniform linear array response with `n` half-wavelength spaced elements at
/// stretched direction `zeta * psi`: entry `i` is `exp(-j pi i zeta psi) / sqrt(n)`.
pub fn steering_vector(n: usize, zeta: f64, psi: f64) -> Vec<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    (0..n)
        .map(|i| Complex64::from_polar(scale, -PI * i as f64 * zeta * psi))
        .collect()
}

/// Transmit ULA response `v_k(psi)` at subcarrier `k`.
pub fn ula_response(cfg: &SystemConfig, k: usize, psi: f64) -> Result<Vec<Complex64>> {
    check_direction(psi)?;
    Ok(steering_vector(cfg.nt, cfg.zeta(k)?, psi))
}

/// Transmit URA response on the yz-plane: `v^y (x) v^z` with `N1` elements
/// along y and `N2` along z. `azimuth`/`elevation` in radians.
pub fn ura_response(
    cfg: &SystemConfig,
    k: usize,
    azimuth: f64,
    elevation: f64,
    n1: usize,
    n2: usize,
) -> Result<Vec<Complex64>> {
    if n1 * n2 != cfg.nt {
        return Err(Error::dims("ura_response N1*N2", cfg.nt, n1 * n2));
    }
    let zeta = cfg.zeta(k)?;
    let vy = steering_vector(n1, zeta, azimuth.sin() * elevation.sin());
    let vz = steering_vector(n2, zeta, elevation.cos());
    let mut out = Vec::with_capacity(n1 * n2);
    for a in &vy {
        for b in &vz {
            out.push(a * b);
        }
    }
    Ok(out)
}

fn check_direction(psi: f64) -> Result<()> {
    if !(psi.abs() <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "spatial direction {psi} outside [-1, 1]"
        )));
    }
    Ok(())
}

/// Geometric multipath parameters. Directions are the primary representation;
/// the angles they came from are kept alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSet {
    pub gains: Vec<Complex64>,
    pub delays_s: Vec<f64>,
    /// Azimuth angles of departure (rad).
    pub aod: Vec<f64>,
    /// Transmit spatial directions `sin(aod)`.
    pub psi: Vec<f64>,
    /// Azimuth angles of arrival (rad).
    pub aoa: Vec<f64>,
    /// Receive spatial directions `sin(aoa)`.
    pub psi_rx: Vec<f64>,
}

impl PathSet {
    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gains.is_empty()
    }

    /// Single path with explicit parameters, mainly for tests and examples.
    pub fn single(gain: Complex64, delay_s: f64, psi: f64, psi_rx: f64) -> Self {
        PathSet {
            gains: vec![gain],
            delays_s: vec![delay_s],
            aod: vec![psi.asin()],
            psi: vec![psi],
            aoa: vec![psi_rx.asin()],
            psi_rx: vec![psi_rx],
        }
    }

    fn validate(&self) -> Result<()> {
        let l = self.gains.len();
        for (what, n) in [
            ("path delays", self.delays_s.len()),
            ("path AoDs", self.aod.len()),
            ("path directions", self.psi.len()),
            ("path AoAs", self.aoa.len()),
            ("path receive directions", self.psi_rx.len()),
        ] {
            if n != l {
                return Err(Error::dims(what, l, n));
            }
        }
        for &p in self.psi.iter().chain(&self.psi_rx) {
            check_direction(p)?;
        }
        if l == 0 {
            return Err(Error::EmptyInput);
        }
        Ok(())
    }
}

/// A channel draw: the path parameters plus the per-subcarrier `N_r x N_t`
/// matrices they generate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelRealization {
    pub config: SystemConfig,
    pub paths: PathSet,
    /// `h[k - 1]` is the channel at subcarrier `k`.
    pub h: Vec<CMat>,
}

impl ChannelRealization {
    /// `H_k = sqrt(N_r N_t / L) sum_l alpha_l exp(-j 2 pi tau_l f_k) u_{k,l} v_{k,l}^H`.
    pub fn from_paths(cfg: &SystemConfig, paths: PathSet) -> Result<Self> {
        cfg.validate()?;
        paths.validate()?;
        let l_count = paths.len();
        let scale = ((cfg.nr * cfg.nt) as f64 / l_count as f64).sqrt();
        let mut h = Vec::with_capacity(cfg.subcarriers);
        for k in 1..=cfg.subcarriers {
            let fk = cfg.subcarrier_frequency(k)?;
            let zeta = cfg.zeta(k)?;
            let mut hk = CMat::zeros(cfg.nr, cfg.nt);
            for l in 0..l_count {
                let coef = scale
                    * paths.gains[l]
                    * Complex64::from_polar(1.0, -2.0 * PI * paths.delays_s[l] * fk);
                let u = steering_vector(cfg.nr, zeta, paths.psi_rx[l]);
                let v = steering_vector(cfg.nt, zeta, paths.psi[l]);
                for (i, ui) in u.iter().enumerate() {
                    let a = coef * ui;
                    for (j, vj) in v.iter().enumerate() {
                        hk[(i, j)] += a * vj.conj();
                    }
                }
            }
            h.push(hk);
        }
        Ok(ChannelRealization {
            config: cfg.clone(),
            paths,
            h,
        })
    }

    pub fn at(&self, k: usize) -> Result<&CMat> {
        self.config.check_k(k)?;
        Ok(&self.h[k - 1])
    }
}

/// Draws `L = N_RF` paths: angles uniform on `[-pi/2, pi/2]`, gains CN(0, 1),
/// delays uniform on `[0, path_delay_max_s]`.
pub fn sample_paths<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> PathSet {
    let l_count = cfg.n_rf;
    let mut paths = PathSet {
        gains: Vec::with_capacity(l_count),
        delays_s: Vec::with_capacity(l_count),
        aod: Vec::with_capacity(l_count),
        psi: Vec::with_capacity(l_count),
        aoa: Vec::with_capacity(l_count),
        psi_rx: Vec::with_capacity(l_count),
    };
    let half = std::f64::consts::FRAC_1_SQRT_2;
    for _ in 0..l_count {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        paths.gains.push(Complex64::new(re * half, im * half));
        paths.delays_s.push(rng.random::<f64>() * cfg.path_delay_max_s);
        let aod = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
        let aoa = rng.random_range(-FRAC_PI_2..=FRAC_PI_2);
        paths.aod.push(aod);
        paths.psi.push(aod.sin());
        paths.aoa.push(aoa);
        paths.psi_rx.push(aoa.sin());
    }
    paths
}

pub fn sample_channel<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<ChannelRealization> {
    ChannelRealization::from_paths(cfg, sample_paths(cfg, rng))
}
