//! Draws a multipath channel and inspects its paths and per-subcarrier
//! matrices. Also builds a planar-array response.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ttd_precoding::linalg::eigh;
use ttd_precoding::model::{sample_channel, ura_response};
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let cfg = SystemConfig::default();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(0);
    let ch = sample_channel(&cfg, &mut rng)?;
    println!("path  |gain|    delay [ms]  psi_tx    psi_rx");
    for i in 0..ch.paths.len() {
        println!(
            "{i:4} {:8.4} {:12.6} {:8.4} {:9.4}",
            ch.paths.gains[i].norm(),
            ch.paths.delays_s[i] * 1e3,
            ch.paths.psi[i],
            ch.paths.psi_rx[i]
        );
    }
    for k in [1, cfg.central_subcarrier(), cfg.subcarriers] {
        let h = ch.at(k)?;
        let sv = eigh(&h.matmul(&h.adjoint())?)?.values;
        let sv: Vec<String> = sv.iter().map(|v| format!("{:.2}", v.max(0.0).sqrt())).collect();
        println!("k = {k:3}: singular values {}", sv.join(" "));
    }
    let v = ura_response(&cfg, cfg.central_subcarrier(), 0.6, std::f64::consts::FRAC_PI_2, 16, 16)?;
    println!("URA 16x16 response: {} entries, first {:.4}", v.len(), v[1]);
    Ok(())
}
