//! Array size and delay budget that keep the closed-form design unclamped.
//!
//!     cargo run --example selection_criteria -- 0.8

use ttd_precoding::jointdesign::{criterion_nt, criterion_tmax, design_theorem1};
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let psi: f64 = std::env::args().nth(1).map_or(0.8, |s| s.parse().expect("direction"));
    println!("t_max [ps]  max N_t  min t_max [ps]  clamped TTDs");
    for ps in [250.0, 300.0, 320.0, 330.0, 340.0, 400.0, 500.0] {
        let cfg = SystemConfig { t_max_s: ps * 1e-12, ..SystemConfig::default() };
        let nt = criterion_nt(&cfg, psi)?.map_or("inf".to_string(), |v| v.to_string());
        let t = criterion_tmax(&cfg, psi)?;
        let report = design_theorem1(&cfg, &vec![psi; cfg.n_rf])?;
        let clamped = report.clamped[0].iter().filter(|&&c| c).count();
        println!("{ps:10.0} {nt:>8} {:15.3} {clamped:13}", t * 1e12);
    }
    Ok(())
}
