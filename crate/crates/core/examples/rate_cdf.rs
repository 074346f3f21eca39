//! Spectral efficiency over random channels with the digital precoder on
//! top of each analog design.
//!
//!     cargo run --release --example rate_cdf -- 20

use ttd_precoding::harness::rate_trial;
use ttd_precoding::metrics::EmpiricalCdf;
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let trials: u64 = std::env::args().nth(1).map_or(20, |s| s.parse().expect("trial count"));
    let cfg = SystemConfig::default();
    let names = ["ideal", "proposed", "benchmark"];
    let mut pooled: [Vec<f64>; 3] = Default::default();
    let mut bounds = [0.0; 3];
    for t in 0..trials {
        for (d, p) in rate_trial(&cfg, cfg.seed, t)?.iter().enumerate() {
            pooled[d].extend_from_slice(&p.rates);
            bounds[d] += p.mean_lower_bound() / trials as f64;
        }
    }
    println!("{trials} channels x {} subcarriers", cfg.subcarriers);
    println!("{:>10} {:>10} {:>10} {:>10}", "design", "mean", "bound", "10% point");
    for (d, name) in names.iter().enumerate() {
        let mean = pooled[d].iter().sum::<f64>() / pooled[d].len() as f64;
        let cdf = EmpiricalCdf::new(&pooled[d])?;
        let tenth = cdf.steps().into_iter().find(|p| p.g >= 0.1).map_or(f64::NAN, |p| p.x);
        println!("{name:>10} {mean:10.3} {:10.3} {tenth:10.3}", bounds[d]);
    }
    Ok(())
}
