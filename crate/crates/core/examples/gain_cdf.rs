//! Array gain across the band for the closed-form design, the delay-first
//! benchmark and the matched (fully digital-like) precoder.
//!
//!     cargo run --example gain_cdf -- 0.8 340e-12

use ttd_precoding::jointdesign::{design_benchmark, design_theorem1};
use ttd_precoding::metrics::{gain_profile, ideal_gain_profile};
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let psi: f64 = args.next().map_or(0.8, |s| s.parse().expect("direction"));
    let t_max_s: f64 = args.next().map_or(340e-12, |s| s.parse().expect("delay budget"));
    let cfg = SystemConfig { t_max_s, ..SystemConfig::default() };
    let dirs = vec![psi; cfg.n_rf];

    let proposed = gain_profile(&cfg, &design_theorem1(&cfg, &dirs)?.design, 0, psi)?;
    let benchmark = gain_profile(&cfg, &design_benchmark(&cfg, &dirs)?, 0, psi)?;
    let ideal = ideal_gain_profile(&cfg, psi)?;

    println!("psi = {psi}, t_max = {:.0} ps", t_max_s * 1e12);
    println!("{:>10} {:>10} {:>10} {:>10}", "design", "min", "P(g>=0.9)", "P(g>=0.8)");
    for (name, p) in [("proposed", &proposed), ("benchmark", &benchmark), ("ideal", &ideal)] {
        println!(
            "{name:>10} {:>10.4} {:>10.4} {:>10.4}",
            p.min(),
            p.fraction_at_least(0.9),
            p.fraction_at_least(0.8)
        );
    }

    println!("\n   g     G_proposed  G_benchmark");
    let (cp, cb) = (proposed.cdf()?, benchmark.cdf()?);
    for i in 0..=10 {
        let g = i as f64 / 10.0;
        println!("{g:4.1} {:12.4} {:12.4}", cp.eval(g), cb.eval(g));
    }
    Ok(())
}
