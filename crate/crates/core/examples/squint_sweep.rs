//! Gain of a frequency-flat phased array at the band edge as the array grows.
//!
//!     cargo run --example squint_sweep -- 0.8

use ttd_precoding::metrics::frequency_flat_profile;
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let psi: f64 = std::env::args().nth(1).map_or(0.8, |s| s.parse().expect("direction"));
    println!("   N_t  edge gain  share >= 0.9");
    for nt in [64, 128, 256, 512, 1024, 2048] {
        let cfg = SystemConfig { nt, ps_per_ttd: nt / 16, ..SystemConfig::default() };
        let p = frequency_flat_profile(&cfg, psi)?;
        println!("{nt:6} {:10.5} {:13.4}", p.gains[cfg.subcarriers - 1], p.fraction_at_least(0.9));
    }
    Ok(())
}
