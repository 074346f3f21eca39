//! Solves random per-TTD phase/delay problems in closed form and with the
//! projected-gradient oracle, and prints the comparison as CSV.
//!
//!     cargo run --release --example kkt_oracle -- 20 > comparison.csv

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ttd_precoding::qp::{assemble_branch, compare_solvers, write_comparisons_csv};
use ttd_precoding::{Result, SystemConfig};

fn main() -> Result<()> {
    let count: usize = std::env::args().nth(1).map_or(20, |s| s.parse().expect("count"));
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let n = rng.random_range(2..=16);
        let m_count = rng.random_range(1..=16);
        let cfg = SystemConfig {
            nt: n * m_count,
            nr: 1,
            n_rf: 1,
            n_s: 1,
            ttds_per_rf: m_count,
            ps_per_ttd: n,
            t_max_s: rng.random_range(10e-12..500e-12),
            ..SystemConfig::default()
        };
        let branch = assemble_branch(&cfg, rng.random_range(0.0..=1.0), 1, rng.random_range(1..=m_count))?;
        rows.push(compare_solvers(&branch, 1e-10, 5_000_000)?);
    }
    let worst = rows.iter().map(|r| r.max_abs_diff).fold(0.0, f64::max);
    eprintln!("{count} problems, largest coordinate gap {worst:.2e}");
    write_comparisons_csv(std::io::stdout().lock(), &rows)
}
