//! How many TTDs per RF chain keep every subcarrier above a gain threshold.
//!
//!     cargo run --example ttd_sizing -- 0.9 0.8

use ttd_precoding::sizing::{size_ttds, P_PS_W, P_TTD_W};
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let g0: f64 = args.next().map_or(0.9, |s| s.parse().expect("threshold"));
    let psi_max: f64 = args.next().map_or(0.8, |s| s.parse().expect("direction"));
    let cfg = SystemConfig {
        nt: 720,
        ttds_per_rf: 60,
        ps_per_ttd: 12,
        t_max_s: 1e-9,
        ..SystemConfig::default()
    };
    let r = size_ttds(&cfg, g0, &[psi_max])?;
    println!("N_t = {}, g0 = {g0}, psi_max = {psi_max}", cfg.nt);
    println!("Omega               {:.6}", r.omega);
    println!("raw count           {:.4}", r.m_star_raw);
    println!("closed-form count   {}", r.m_star);
    println!("exhaustive count    {}", r.exact_m);
    println!("linear-in-B guess   {:.3}", r.linear_bandwidth_estimate);
    println!("power at count      {:.2} W  (TTD {P_TTD_W} W, PS {P_PS_W} W)", r.total_power_w);
    println!("\n   M  worst gain  share below g0");
    for e in &r.per_divisor {
        println!("{:4} {:11.5} {:15.4}", e.m, e.worst_gain, e.fraction_below);
    }
    Ok(())
}
