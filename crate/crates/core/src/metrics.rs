//! Array gain, achievable rate and its determinant lower bound, and
//! empirical CDFs over subcarriers.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::format::fmt_g;
use crate::linalg::{eigh, inner, norm2, CMat};
use crate::model::{ula_response, ChannelRealization, SystemConfig};
use crate::precoders::{composite, digital_precoder, ideal_precoder, AnalogDesign};

const UNIT_NORM_TOL: f64 = 1e-9;
const SINE_GUARD: f64 = 1e-9;

/// `|v_k(psi)^H f|` for a unit-norm beamformer `f`.
pub fn array_gain(f: &[num_complex::Complex64], cfg: &SystemConfig, k: usize, psi: f64) -> Result<f64> {
    if f.len() != cfg.nt {
        return Err(Error::dims("beamformer length", cfg.nt, f.len()));
    }
    let norm = norm2(f);
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(Error::NotUnitNorm { norm });
    }
    Ok(inner(&ula_response(cfg, k, psi)?, f).norm())
}

/// Squint offset `(pi/2)(zeta_k - 1) psi` at subcarrier `k`.
pub fn squint_offset(cfg: &SystemConfig, k: usize, psi: f64) -> Result<f64> {
    Ok(FRAC_PI_2 * cfg.zeta_offset(k)? * psi)
}

/// Normalised Dirichlet kernel `|sin(N delta) / (N sin delta)|`.
pub fn gain_closed_form(n_sub: usize, delta: f64) -> f64 {
    let s = delta.sin();
    if s.abs() < SINE_GUARD {
        return 1.0;
    }
    let n = n_sub as f64;
    ((n * delta).sin() / (n * s)).abs()
}

/// Per-subcarrier gain of one beam.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainProfile {
    pub psi: f64,
    pub frequencies_hz: Vec<f64>,
    pub gains: Vec<f64>,
}

impl GainProfile {
    pub fn cdf(&self) -> Result<EmpiricalCdf> {
        EmpiricalCdf::new(&self.gains)
    }

    /// Fraction of subcarriers whose gain is at least `threshold`.
    pub fn fraction_at_least(&self, threshold: f64) -> f64 {
        self.gains.iter().filter(|&&g| g >= threshold).count() as f64 / self.gains.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.gains.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile_csv(out, &self.frequencies_hz, &self.gains)
    }
}

/// Gain of chain `l` (0-based) of an analog design towards `psi`, across all
/// subcarriers.
pub fn gain_profile(cfg: &SystemConfig, design: &AnalogDesign, l: usize, psi: f64) -> Result<GainProfile> {
    if l >= cfg.n_rf {
        return Err(Error::IndexOutOfRange { index: l, len: cfg.n_rf });
    }
    let mut gains = Vec::with_capacity(cfg.subcarriers);
    for k in 1..=cfg.subcarriers {
        let f = composite(design, cfg, k)?;
        gains.push(array_gain(&f.col(l), cfg, k, psi)?);
    }
    Ok(GainProfile { psi, frequencies_hz: frequencies(cfg), gains })
}

/// Gain of the matched response at every subcarrier (always one).
pub fn ideal_gain_profile(cfg: &SystemConfig, psi: f64) -> Result<GainProfile> {
    let mut gains = Vec::with_capacity(cfg.subcarriers);
    for k in 1..=cfg.subcarriers {
        let f = ideal_precoder(cfg, &[psi], k)?;
        gains.push(array_gain(&f.col(0), cfg, k, psi)?);
    }
    Ok(GainProfile { psi, frequencies_hz: frequencies(cfg), gains })
}

/// Gain of a phase-shifter-only beam steered at `psi` for the carrier
/// frequency and reused on every subcarrier.
pub fn frequency_flat_profile(cfg: &SystemConfig, psi: f64) -> Result<GainProfile> {
    let f = ula_response(cfg, cfg.central_subcarrier(), psi)?;
    let mut gains = Vec::with_capacity(cfg.subcarriers);
    for k in 1..=cfg.subcarriers {
        gains.push(array_gain(&f, cfg, k, psi)?);
    }
    Ok(GainProfile { psi, frequencies_hz: frequencies(cfg), gains })
}

fn frequencies(cfg: &SystemConfig) -> Vec<f64> {
    (1..=cfg.subcarriers).map(|k| cfg.subcarrier_frequency(k).unwrap()).collect()
}

fn check_rate_inputs(h: &CMat, f: &CMat, w: &CMat, rho: f64, n_s: usize) -> Result<()> {
    if !(rho >= 0.0) {
        return Err(Error::InvalidConfig(format!("rho must be non-negative, got {rho}")));
    }
    if w.cols() != n_s {
        return Err(Error::dims("digital precoder streams", n_s, w.cols()));
    }
    if h.cols() != f.rows() || f.cols() != w.rows() {
        return Err(Error::dims(
            "rate inputs",
            format!("H {}x{}, F {}x_, W _x{}", h.rows(), h.cols(), h.cols(), n_s),
            format!("F {}x{}, W {}x{}", f.rows(), f.cols(), w.rows(), w.cols()),
        ));
    }
    Ok(())
}

/// `log2 det(I + rho/N_s H F W W^H F^H H^H)` via the eigenvalues of the
/// `N_s x N_s` Gram matrix `(HFW)^H (HFW)`.
pub fn achievable_rate(h: &CMat, f: &CMat, w: &CMat, rho: f64, n_s: usize) -> Result<f64> {
    check_rate_inputs(h, f, w, rho, n_s)?;
    let a = h.matmul(f)?.matmul(w)?;
    let eig = eigh(&a.adjoint_matmul(&a)?)?;
    let scale = rho / n_s as f64;
    Ok(eig.values.iter().map(|&l| (1.0 + scale * l.max(0.0)).log2()).sum())
}

/// `log2(1 + rho det(Sigma^2 V^H F W W^H F^H V)^{1/N_s})` with `Sigma`, `V`
/// the `N_s` leading singular values and right singular vectors of `H`.
/// Zero when `H` has fewer than `N_s` nonzero singular values.
pub fn rate_lower_bound(h: &CMat, f: &CMat, w: &CMat, rho: f64, n_s: usize) -> Result<f64> {
    check_rate_inputs(h, f, w, rho, n_s)?;
    if n_s > h.rows() {
        return Err(Error::dims("streams vs receive antennas", format!("<= {}", h.rows()), n_s));
    }
    // H H^H = U Sigma^2 U^H, then V = H^H U Sigma^{-1}
    let hh = h.matmul(&h.adjoint())?;
    let eig = eigh(&hh)?;
    let top = eig.values.first().copied().unwrap_or(0.0);
    let rank_tol = 1e-12 * top.max(f64::MIN_POSITIVE);
    let sigma_sq: Vec<f64> = eig.values.iter().take(n_s).copied().collect();
    if top <= 0.0 || sigma_sq.iter().any(|&s| s <= rank_tol) {
        return Ok(0.0);
    }
    let mut v = h.adjoint().matmul(&eig.vectors.leading_columns(n_s))?;
    for (j, s2) in sigma_sq.iter().enumerate() {
        let col: Vec<_> = v.col(j).into_iter().map(|x| x / s2.sqrt()).collect();
        v.set_col(j, &col);
    }
    let b = v.adjoint_matmul(&f.matmul(w)?)?;
    let gram = b.matmul(&b.adjoint())?;
    let det_inner: f64 = eigh(&gram)?.values.iter().map(|l| l.max(0.0)).product();
    let det = sigma_sq.iter().product::<f64>() * det_inner;
    Ok((1.0 + rho * det.powf(1.0 / n_s as f64)).log2())
}

/// The lower bound with the right singular vectors of `H` replaced by a
/// reference analog precoder `f_ref` (normally the matched one), which they
/// approach up to a rotation as `N_t` grows:
/// `log2(1 + rho det(Sigma^2 F_ref^H F W W^H F^H F_ref)^{1/N_s})`.
pub fn asymptotic_rate_lower_bound(h: &CMat, f_ref: &CMat, f: &CMat, w: &CMat, rho: f64, n_s: usize) -> Result<f64> {
    check_rate_inputs(h, f, w, rho, n_s)?;
    if f_ref.rows() != f.rows() || f_ref.cols() != n_s {
        return Err(Error::dims(
            "reference precoder",
            format!("{}x{}", f.rows(), n_s),
            format!("{}x{}", f_ref.rows(), f_ref.cols()),
        ));
    }
    let sigma_sq: f64 = eigh(&h.matmul(&h.adjoint())?)?
        .values
        .iter()
        .take(n_s)
        .map(|s| s.max(0.0))
        .product();
    let b = f_ref.adjoint_matmul(&f.matmul(w)?)?;
    let det_inner: f64 = eigh(&b.matmul(&b.adjoint())?)?.values.iter().map(|l| l.max(0.0)).product();
    Ok((1.0 + rho * (sigma_sq * det_inner).powf(1.0 / n_s as f64)).log2())
}

/// Per-subcarrier rates of one channel realization under one analog precoder.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateProfile {
    pub frequencies_hz: Vec<f64>,
    pub rates: Vec<f64>,
    pub lower_bounds: Vec<f64>,
}

impl RateProfile {
    pub fn mean(&self) -> f64 {
        self.rates.iter().sum::<f64>() / self.rates.len() as f64
    }

    pub fn mean_lower_bound(&self) -> f64 {
        self.lower_bounds.iter().sum::<f64>() / self.lower_bounds.len() as f64
    }

    pub fn cdf(&self) -> Result<EmpiricalCdf> {
        EmpiricalCdf::new(&self.rates)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_profile_csv(out, &self.frequencies_hz, &self.rates)
    }
}

/// Analog precoder choice for [`rate_profile`].
#[derive(Debug, Clone, Copy)]
pub enum AnalogChoice<'a> {
    Design(&'a AnalogDesign),
    /// Matched array responses towards the channel's path directions.
    Ideal,
}

/// Rate and lower bound at every subcarrier with the digital precoder chosen
/// from the dominant eigenvectors of the effective channel.
pub fn rate_profile(cfg: &SystemConfig, channel: &ChannelRealization, analog: AnalogChoice<'_>) -> Result<RateProfile> {
    let mut rates = Vec::with_capacity(cfg.subcarriers);
    let mut lower_bounds = Vec::with_capacity(cfg.subcarriers);
    for k in 1..=cfg.subcarriers {
        let f = match analog {
            AnalogChoice::Design(d) => composite(d, cfg, k)?,
            AnalogChoice::Ideal => ideal_precoder(cfg, &channel.paths.psi, k)?,
        };
        let h = channel.at(k)?;
        let w = digital_precoder(h, &f, cfg.n_s)?;
        rates.push(achievable_rate(h, &f, &w, cfg.rho, cfg.n_s)?);
        lower_bounds.push(rate_lower_bound(h, &f, &w, cfg.rho, cfg.n_s)?);
    }
    Ok(RateProfile { frequencies_hz: frequencies(cfg), rates, lower_bounds })
}

/// Right-continuous empirical CDF `G(x) = #{v <= x} / n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub x: f64,
    pub g: f64,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidConfig("NaN in CDF samples".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len() as f64
    }

    /// Pools the samples of both CDFs. Associative and commutative.
    pub fn merge(&self, other: &EmpiricalCdf) -> EmpiricalCdf {
        let mut sorted = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.sorted.len() && j < other.sorted.len() {
            if self.sorted[i] <= other.sorted[j] {
                sorted.push(self.sorted[i]);
                i += 1;
            } else {
                sorted.push(other.sorted[j]);
                j += 1;
            }
        }
        sorted.extend_from_slice(&self.sorted[i..]);
        sorted.extend_from_slice(&other.sorted[j..]);
        EmpiricalCdf { sorted }
    }

    /// One point per distinct sample value.
    pub fn steps(&self) -> Vec<CdfPoint> {
        let n = self.sorted.len() as f64;
        let mut out: Vec<CdfPoint> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            let g = (i + 1) as f64 / n;
            match out.last_mut() {
                Some(last) if last.x == x => last.g = g,
                _ => out.push(CdfPoint { x, g }),
            }
        }
        out
    }

    /// Steps plus the given grid, sorted by `x` without duplicates.
    pub fn table(&self, grid: &[f64]) -> Vec<CdfPoint> {
        let mut xs: Vec<f64> = self.sorted.iter().chain(grid).copied().collect();
        xs.sort_by(f64::total_cmp);
        xs.dedup();
        xs.into_iter().map(|x| CdfPoint { x, g: self.eval(x) }).collect()
    }
}

pub fn empirical_cdf(values: &[f64], grid: &[f64]) -> Result<Vec<CdfPoint>> {
    Ok(EmpiricalCdf::new(values)?.table(grid))
}

/// CSV with header `k,f_k,value`.
pub fn write_profile_csv<W: Write>(out: W, frequencies_hz: &[f64], values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "f_k", "value"])?;
    for (i, (f, v)) in frequencies_hz.iter().zip(values).enumerate() {
        w.write_record([(i + 1).to_string(), fmt_g(*f), fmt_g(*v)])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV with header `x,G`.
pub fn write_cdf_csv<W: Write>(out: W, points: &[CdfPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "G"])?;
    for p in points {
        w.write_record([fmt_g(p.x), fmt_g(p.g)])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jointdesign::design_theorem1;
    use crate::model::{sample_channel, PathSet};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn matched_beam_has_unit_gain() {
        let c = cfg();
        let f = ula_response(&c, 65, 0.8).unwrap();
        assert!((array_gain(&f, &c, 65, 0.8).unwrap() - 1.0).abs() < 1e-12);
        let p = ideal_gain_profile(&c, -0.35).unwrap();
        assert!(p.gains.iter().all(|g| (g - 1.0).abs() < 1e-10));
    }

    #[test]
    fn flat_beam_edge_gain() {
        let c = cfg();
        let p = frequency_flat_profile(&c, 0.8).unwrap();
        assert!((p.gains[128] - 0.0156511).abs() < 1e-6);
        let delta = squint_offset(&c, 129, 0.8).unwrap();
        assert!((gain_closed_form(256, delta) - p.gains[128]).abs() < 1e-10);
    }

    #[test]
    fn rejects_unnormalised_beam() {
        let c = cfg();
        let f: Vec<Complex64> = vec![Complex64::new(1.0, 0.0); c.nt];
        assert!(matches!(array_gain(&f, &c, 1, 0.1), Err(Error::NotUnitNorm { .. })));
    }

    #[test]
    fn dirichlet_values() {
        assert_eq!(gain_closed_form(16, 0.0), 1.0);
        assert!((gain_closed_form(16, 0.062345) - 0.842763).abs() < 1e-6);
        assert_eq!(gain_closed_form(1, 0.7), 1.0);
    }

    #[test]
    fn closed_form_matches_unclamped_design() {
        let c = SystemConfig { t_max_s: 400e-12, ..cfg() };
        let psi = [0.8, -0.6, 0.25, 0.0];
        let rep = design_theorem1(&c, &psi).unwrap();
        assert!(!rep.any_clamped());
        for (l, &p) in psi.iter().enumerate() {
            let prof = gain_profile(&c, &rep.design, l, p).unwrap();
            for k in 1..=c.subcarriers {
                let want = gain_closed_form(c.ps_per_ttd, squint_offset(&c, k, p).unwrap());
                assert!((prof.gains[k - 1] - want).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn headline_fractions() {
        let c = cfg();
        let psi = [0.8, 0.0, 0.0, 0.0];
        let rep = design_theorem1(&c, &psi).unwrap();
        let prop = gain_profile(&c, &rep.design, 0, 0.8).unwrap();
        assert!((prop.fraction_at_least(0.9) - 101.0 / 129.0).abs() < 1e-12);
        let bench = crate::jointdesign::design_benchmark(&c, &psi).unwrap();
        let b = gain_profile(&c, &bench, 0, 0.8).unwrap();
        assert_eq!(b.fraction_at_least(0.9), 0.0);
    }

    #[test]
    fn rates_scalar_and_trivial_cases() {
        let h = CMat::from_fn(1, 1, |_, _| Complex64::new(0.6, -1.1));
        let one = CMat::identity(1);
        let r = achievable_rate(&h, &one, &one, 2.5, 1).unwrap();
        assert!((r - (1.0 + 2.5 * (0.36 + 1.21f64)).log2()).abs() < 1e-12);
        let lb = rate_lower_bound(&h, &one, &one, 2.5, 1).unwrap();
        assert!((lb - r).abs() < 1e-12);
        assert_eq!(achievable_rate(&h, &one, &one, 0.0, 1).unwrap(), 0.0);
        let zero = CMat::zeros(1, 1);
        assert_eq!(achievable_rate(&zero, &one, &one, 3.0, 1).unwrap(), 0.0);
        assert_eq!(rate_lower_bound(&zero, &one, &one, 3.0, 1).unwrap(), 0.0);
    }

    #[test]
    fn bound_below_rate_on_random_channels() {
        let c = SystemConfig { subcarriers: 5, ..cfg() };
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..20 {
            let ch = sample_channel(&c, &mut rng).unwrap();
            let rep = design_theorem1(&c, &ch.paths.psi).unwrap();
            let p = rate_profile(&c, &ch, AnalogChoice::Design(&rep.design)).unwrap();
            for (r, b) in p.rates.iter().zip(&p.lower_bounds) {
                assert!(*b <= r + 1e-9, "bound {b} > rate {r}");
                assert!(*r >= 0.0);
            }
        }
    }

    #[test]
    fn single_stream_bound_is_tight() {
        let c = SystemConfig { nr: 1, n_rf: 1, n_s: 1, subcarriers: 3, ..cfg() };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ch = sample_channel(&c, &mut rng).unwrap();
        let p = rate_profile(&c, &ch, AnalogChoice::Ideal).unwrap();
        for (r, b) in p.rates.iter().zip(&p.lower_bounds) {
            assert!((r - b).abs() < 1e-9 * r.max(1.0));
        }
    }

    #[test]
    fn rank_deficient_channel_has_zero_bound() {
        let c = cfg();
        let ch = ChannelRealization::from_paths(
            &c,
            PathSet::single(Complex64::new(1.0, 0.0), 0.0, 0.2, 0.1),
        )
        .unwrap();
        let h = ch.at(1).unwrap();
        let f = ideal_precoder(&c, &[0.2, 0.3, 0.4, 0.5], 1).unwrap();
        let w = digital_precoder(h, &f, 4).unwrap();
        assert_eq!(rate_lower_bound(h, &f, &w, c.rho, 4).unwrap(), 0.0);
    }

    #[test]
    fn cdf_basics() {
        let c = EmpiricalCdf::new(&[0.5; 4]).unwrap();
        assert_eq!(c.eval(0.49), 0.0);
        assert_eq!(c.eval(0.5), 1.0);
        assert_eq!(c.steps(), vec![CdfPoint { x: 0.5, g: 1.0 }]);
        assert!(EmpiricalCdf::new(&[]).is_err());
        let t = empirical_cdf(&[0.3, 0.1, 0.2], &[0.0, 0.15, 1.0]).unwrap();
        let xs: Vec<f64> = t.iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![0.0, 0.1, 0.15, 0.2, 0.3, 1.0]);
        assert!(t.windows(2).all(|w| w[0].g <= w[1].g));
        assert_eq!(t.last().unwrap().g, 1.0);
    }

    #[test]
    fn cdf_merge_is_pooling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let a: Vec<f64> = (0..37).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..11).map(|_| rng.random()).collect();
        let merged = EmpiricalCdf::new(&a).unwrap().merge(&EmpiricalCdf::new(&b).unwrap());
        let pooled: Vec<f64> = a.iter().chain(&b).copied().collect();
        assert_eq!(merged, EmpiricalCdf::new(&pooled).unwrap());
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        write_profile_csv(&mut buf, &[1e9, 2e9], &[0.5, 1.0 / 3.0]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "k,f_k,value\n1,1000000000,0.5\n2,2000000000,0.333333333333\n");
        let mut buf = Vec::new();
        write_cdf_csv(&mut buf, &[CdfPoint { x: 0.25, g: 0.5 }]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,G\n0.25,0.5\n");
    }
}
