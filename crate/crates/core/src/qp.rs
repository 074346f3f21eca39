//! Per-branch quadratic programs in the phase domain.
//!
//! Fixing RF chain `l` and TTD `m`, the joint design reduces to choosing the
//! `N` phase-shifter values `x` (in pi-units) and the dimensionless delay
//! `theta = 2 f_c t` to minimise
//!
//! ```text
//! (1/K) sum_k sum_n (x_n - zeta_k theta + zeta_k gamma_n)^2,   0 <= theta <= theta_max
//! ```
//!
//! with `gamma_n = ((m-1)N + n - 1) psi`. Writing `a = [x; theta]` this is
//! `a^T C a - 2 d^T a + const` with `C = [[I, -1], [-1^T, N + eta]]`.
//!
//! Two solvers are provided. [`solve_kkt`] enumerates the three KKT cases in
//! closed form; [`solve_projected`] is an iterative oracle that only sees the
//! assembled sums and serves to validate the closed form.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dd::DD;
use crate::error::{Error, Result};
use crate::model::SystemConfig;

/// Where a branch problem came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchProvenance {
    /// RF chain, 1-based.
    pub l: usize,
    /// TTD within the chain, 1-based.
    pub m: usize,
    pub psi: f64,
    /// `zeta_k - 1` for `k = 1..=K`.
    pub zeta_offsets: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchQP {
    /// Phase shifters on this TTD.
    pub n: usize,
    /// Bottom-right entry of `C`, `N + eta`.
    pub big_gamma: f64,
    pub eta: f64,
    pub d: Vec<f64>,
    pub theta_max: f64,
    /// Target phases `gamma_n` in pi-units.
    pub gamma: Vec<f64>,
    pub provenance: BranchProvenance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KktCase {
    Interior,
    UpperActive,
    LowerActive,
}

impl KktCase {
    pub fn as_str(self) -> &'static str {
        match self {
            KktCase::Interior => "interior",
            KktCase::UpperActive => "upper_active",
            KktCase::LowerActive => "lower_active",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KktSolution {
    /// `[x_1, .., x_N, theta]`.
    pub a: Vec<f64>,
    /// Multiplier of `theta <= theta_max`.
    pub lambda_upper: f64,
    /// Multiplier of `theta >= 0`.
    pub lambda_lower: f64,
    pub case: KktCase,
}

impl KktSolution {
    pub fn theta(&self) -> f64 {
        *self.a.last().unwrap()
    }

    pub fn phases(&self) -> &[f64] {
        &self.a[..self.a.len() - 1]
    }
}

/// Builds the QP for RF chain `l` (1-based) and TTD `m` (1-based) steering
/// towards direction `psi`.
pub fn assemble_branch(cfg: &SystemConfig, psi: f64, l: usize, m: usize) -> Result<BranchQP> {
    cfg.validate()?;
    if !(psi.abs() <= 1.0) {
        return Err(Error::InvalidConfig(format!("direction {psi} outside [-1, 1]")));
    }
    if m == 0 || m > cfg.ttds_per_rf {
        return Err(Error::IndexOutOfRange { index: m, len: cfg.ttds_per_rf });
    }
    if l == 0 || l > cfg.n_rf {
        return Err(Error::IndexOutOfRange { index: l, len: cfg.n_rf });
    }
    let eta = cfg.eta();
    if !(eta > 0.0) {
        return Err(Error::Degenerate(
            "zero bandwidth or a single subcarrier makes the delay unidentifiable (eta = 0)".into(),
        ));
    }
    let n = cfg.ps_per_ttd;
    let gamma = target_phases(n, m, psi);
    let offsets = cfg.zeta_offsets();
    let k = offsets.len() as f64;
    let mean_zeta = 1.0 + offsets.iter().sum::<f64>() / k;
    let mean_zeta_sq = offsets.iter().map(|o| (1.0 + o) * (1.0 + o)).sum::<f64>() / k;
    let sum_gamma: f64 = gamma.iter().sum();
    let mut d: Vec<f64> = gamma.iter().map(|g| -mean_zeta * g).collect();
    d.push(mean_zeta_sq * sum_gamma);
    Ok(BranchQP {
        n,
        big_gamma: n as f64 + eta,
        eta,
        d,
        theta_max: cfg.theta_max(),
        gamma,
        provenance: BranchProvenance { l, m, psi, zeta_offsets: offsets },
    })
}

/// `gamma_n = ((m-1)N + n - 1) psi` for `n = 1..=N`.
pub fn target_phases(n: usize, m: usize, psi: f64) -> Vec<f64> {
    (0..n).map(|i| ((m - 1) * n + i) as f64 * psi).collect()
}

impl BranchQP {
    pub fn dim(&self) -> usize {
        self.n + 1
    }

    /// Dense `C`.
    pub fn c_matrix(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let mut c = vec![vec![0.0; n + 1]; n + 1];
        for i in 0..n {
            c[i][i] = 1.0;
            c[i][n] = -1.0;
            c[n][i] = -1.0;
        }
        c[n][n] = self.big_gamma;
        c
    }

    /// Dense `C^{-1} = [[I + 11^T/eta, 1/eta], [1^T/eta, 1/eta]]`.
    pub fn c_inverse(&self) -> Vec<Vec<f64>> {
        let n = self.n;
        let r = 1.0 / self.eta;
        let mut c = vec![vec![r; n + 1]; n + 1];
        for (i, row) in c.iter_mut().enumerate().take(n) {
            row[i] += 1.0;
        }
        c
    }

    pub fn apply_c(&self, a: &[f64]) -> Vec<f64> {
        let n = self.n;
        let theta = a[n];
        let mut out: Vec<f64> = a[..n].iter().map(|x| x - theta).collect();
        out.push(self.big_gamma * theta - a[..n].iter().sum::<f64>());
        out
    }

    /// `(1/K) sum_k sum_n (x_n - zeta_k theta + zeta_k gamma_n)^2`, evaluated
    /// directly from the subcarrier grid.
    pub fn objective(&self, a: &[f64]) -> f64 {
        let theta = a[self.n];
        let offs = &self.provenance.zeta_offsets;
        let total: f64 = offs
            .iter()
            .map(|o| {
                let z = 1.0 + o;
                a[..self.n]
                    .iter()
                    .zip(&self.gamma)
                    .map(|(x, g)| {
                        let r = x - z * theta + z * g;
                        r * r
                    })
                    .sum::<f64>()
            })
            .sum();
        total / offs.len() as f64
    }

    /// `||2 C a - 2 d + (lambda_upper - lambda_lower) e||_inf`.
    pub fn stationarity_residual(&self, sol: &KktSolution) -> f64 {
        let ca = self.apply_c(&sol.a);
        let mut worst: f64 = 0.0;
        for i in 0..self.dim() {
            let mut r = 2.0 * ca[i] - 2.0 * self.d[i];
            if i == self.n {
                r += sol.lambda_upper - sol.lambda_lower;
            }
            worst = worst.max(r.abs());
        }
        worst
    }

    /// `e^T C^{-1} d`: the delay the branch would choose without the box.
    /// Uses `(1/K) sum_k (zeta_k - 1)^2 = eta / N` so that no difference of
    /// nearly equal sums is formed.
    pub fn unconstrained_theta(&self) -> f64 {
        let offs = &self.provenance.zeta_offsets;
        let spread = offs.iter().map(|o| o * o).sum::<f64>() / offs.len() as f64;
        spread * self.gamma.iter().sum::<f64>() / self.eta
    }
}

/// Closed-form solution by enumerating the interior, upper-active and
/// lower-active KKT cases.
pub fn solve_kkt(branch: &BranchQP) -> Result<KktSolution> {
    let eta = branch.eta;
    if !(eta > 0.0) {
        return Err(Error::Degenerate("eta must be positive".into()));
    }
    let theta_unc = branch.unconstrained_theta();
    let theta_max = branch.theta_max;
    // a = C^{-1} d - s 1 has top block -gamma + (theta_unc - s) and last entry theta_unc - s
    let build = |theta: f64| {
        let mut a: Vec<f64> = branch.gamma.iter().map(|g| theta - g).collect();
        a.push(theta);
        a
    };
    let candidates = [
        (KktCase::Interior, 0.0, 0.0, theta_unc),
        (KktCase::UpperActive, 2.0 * eta * (theta_unc - theta_max), 0.0, theta_max),
        (KktCase::LowerActive, 0.0, -2.0 * eta * theta_unc, 0.0),
    ];
    for (case, lu, ll, theta) in candidates {
        let feasible = (0.0..=theta_max).contains(&theta);
        if feasible && lu >= 0.0 && ll >= 0.0 {
            return Ok(KktSolution {
                a: build(theta),
                lambda_upper: lu,
                lambda_lower: ll,
                case,
            });
        }
    }
    Err(Error::Internal(format!(
        "no KKT case is consistent (theta_unc = {theta_unc}, theta_max = {theta_max})"
    )))
}

/// Problem data rebuilt in double-double from the subcarrier grid alone.
struct PreciseBranch {
    mean_zeta: DD,
    corner: DD,
    d: Vec<DD>,
    n: usize,
}

impl PreciseBranch {
    fn new(branch: &BranchQP) -> Self {
        let prov = &branch.provenance;
        let n = branch.n;
        let k = prov.zeta_offsets.len() as f64;
        let mut sum_z = DD::ZERO;
        let mut sum_z2 = DD::ZERO;
        for &o in &prov.zeta_offsets {
            let z = DD::new(1.0) + DD::new(o);
            sum_z = sum_z + z;
            sum_z2 = sum_z2 + z * z;
        }
        let mean_zeta = sum_z.div_f64(k);
        let mean_zeta_sq = sum_z2.div_f64(k);
        let gamma: Vec<DD> = (0..n)
            .map(|i| DD::from_prod(((prov.m - 1) * n + i) as f64, prov.psi))
            .collect();
        let sum_gamma = gamma.iter().fold(DD::ZERO, |s, g| s + *g);
        let mut d: Vec<DD> = gamma.iter().map(|g| -(mean_zeta * *g)).collect();
        d.push(mean_zeta_sq * sum_gamma);
        PreciseBranch {
            mean_zeta,
            corner: mean_zeta_sq.mul_f64(n as f64),
            d,
            n,
        }
    }

    /// Gradient of `a^T C a / 2 - d^T a`.
    fn gradient(&self, a: &[DD], out: &mut [DD]) {
        let n = self.n;
        let theta = a[n];
        let coupled = self.mean_zeta * theta;
        let mut sum_x = DD::ZERO;
        for i in 0..n {
            sum_x = sum_x + a[i];
            out[i] = a[i] - coupled - self.d[i];
        }
        out[n] = self.corner * theta - self.mean_zeta * sum_x - self.d[n];
    }

    /// Smallest eigenvalue of `C`. Every direction orthogonal to
    /// `span{[1;0], e}` has eigenvalue one; the remaining 2x2 block is
    /// `[[1, -c sqrt(N)], [-c sqrt(N), corner]]`.
    fn lambda_min(&self) -> f64 {
        let n = self.n as f64;
        let c = self.mean_zeta;
        let det = (self.corner - (c * c).mul_f64(n)).to_f64();
        let corner = self.corner.to_f64();
        let tr = 1.0 + corner;
        let big = 0.5 * (tr + ((corner - 1.0).powi(2) + 4.0 * n * c.to_f64().powi(2)).sqrt());
        (det / big).min(1.0)
    }
}

/// Projected gradient descent with constant Nesterov momentum and fixed step
/// `1 / (Gamma + N)` (a Gershgorin bound on `lambda_max(C)`). The delay
/// coordinate is clamped to `[0, theta_max]` after every step.
///
/// Iterates are carried in double-double arithmetic. Stops once the strong
/// convexity bound `||a - a*|| <= 2 ||G(a)|| / mu` on the gradient mapping
/// `G` drops below `tol`.
pub fn solve_projected(branch: &BranchQP, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
    if !(tol > 0.0) {
        return Err(Error::InvalidConfig(format!("tolerance must be positive, got {tol}")));
    }
    let p = PreciseBranch::new(branch);
    let n = p.n;
    let dim = n + 1;
    let lip = (p.corner.to_f64() + n as f64 * p.mean_zeta.to_f64()).max(2.0) * (1.0 + 1e-12);
    let mu = 0.9 * p.lambda_min();
    if !(mu > 0.0) {
        return Err(Error::Degenerate("QP is not strongly convex".into()));
    }
    let step = 1.0 / lip;
    let root_kappa = (lip / mu).sqrt();
    let beta = (root_kappa - 1.0) / (root_kappa + 1.0);
    let lo = DD::ZERO;
    let hi = DD::new(branch.theta_max);
    let project = |v: &mut [DD]| v[n] = v[n].max(lo).min(hi);

    let mut a = vec![DD::ZERO; dim];
    let mut prev = a.clone();
    let mut y = a.clone();
    let mut grad = vec![DD::ZERO; dim];
    let mut probe = vec![DD::ZERO; dim];
    let mut bound = f64::INFINITY;
    const CHECK_EVERY: usize = 25;

    for iter in 0..max_iter {
        if iter % CHECK_EVERY == 0 {
            p.gradient(&a, &mut grad);
            for i in 0..dim {
                probe[i] = a[i] - grad[i].mul_f64(step);
            }
            project(&mut probe);
            let g_norm_sq: f64 = (0..dim)
                .map(|i| ((a[i] - probe[i]).to_f64() * lip).powi(2))
                .sum();
            bound = 2.0 * g_norm_sq.sqrt() / mu;
            if bound <= tol {
                return Ok(a.iter().map(|v| v.to_f64()).collect());
            }
        }
        p.gradient(&y, &mut grad);
        std::mem::swap(&mut prev, &mut a);
        for i in 0..dim {
            a[i] = y[i] - grad[i].mul_f64(step);
        }
        project(&mut a);
        for i in 0..dim {
            y[i] = a[i] + (a[i] - prev[i]).mul_f64(beta);
        }
    }
    Err(Error::NonConvergence {
        what: "projected gradient",
        iterations: max_iter,
        residual: bound,
    })
}

/// Chord and arc distance between two phases in radians:
/// `(|e^{jx} - e^{jy}|, |x - y|)`.
pub fn phase_distance_equiv(x: f64, y: f64) -> (f64, f64) {
    let chord = (Complex64::from_polar(1.0, x) - Complex64::from_polar(1.0, y)).norm();
    (chord, (x - y).abs())
}

/// One closed-form vs iterative comparison, for audit dumps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleComparison {
    pub l: usize,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub psi: f64,
    pub theta_max: f64,
    pub case: KktCase,
    pub kkt: Vec<f64>,
    pub projected: Vec<f64>,
    pub max_abs_diff: f64,
}

pub fn compare_solvers(branch: &BranchQP, tol: f64, max_iter: usize) -> Result<OracleComparison> {
    let kkt = solve_kkt(branch)?;
    let projected = solve_projected(branch, tol, max_iter)?;
    let max_abs_diff = kkt
        .a
        .iter()
        .zip(&projected)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(OracleComparison {
        l: branch.provenance.l,
        m: branch.provenance.m,
        n: branch.n,
        k: branch.provenance.zeta_offsets.len(),
        psi: branch.provenance.psi,
        theta_max: branch.theta_max,
        case: kkt.case,
        kkt: kkt.a,
        projected,
        max_abs_diff,
    })
}

/// One row per coordinate: `l,m,n,k,psi,theta_max,case,index,kkt,projected,abs_diff`.
pub fn write_comparisons_csv<W: Write>(out: W, rows: &[OracleComparison]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "l", "m", "n", "k", "psi", "theta_max", "case", "index", "kkt", "projected", "abs_diff",
    ])?;
    for r in rows {
        for (i, (a, b)) in r.kkt.iter().zip(&r.projected).enumerate() {
            w.write_record([
                r.l.to_string(),
                r.m.to_string(),
                r.n.to_string(),
                r.k.to_string(),
                format!("{:e}", r.psi),
                format!("{:e}", r.theta_max),
                r.case.as_str().to_string(),
                (i + 1).to_string(),
                format!("{a:e}"),
                format!("{b:e}"),
                format!("{:e}", (a - b).abs()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigh, CMat};

    fn cfg(t_max: f64) -> SystemConfig {
        SystemConfig { t_max_s: t_max, ..SystemConfig::default() }
    }

    fn matvec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    #[test]
    fn inverse_matches() {
        let b = assemble_branch(&cfg(340e-12), 0.8, 1, 3).unwrap();
        let c = b.c_matrix();
        let ci = b.c_inverse();
        for i in 0..b.dim() {
            let col: Vec<f64> = (0..b.dim()).map(|r| ci[r][i]).collect();
            let prod = matvec(&c, &col);
            for (j, v) in prod.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-10, "({i},{j}) = {v}");
            }
        }
        let e: Vec<f64> = (0..b.dim()).map(|i| if i == b.n { 1.0 } else { 0.0 }).collect();
        let ete = matvec(&ci, &e)[b.n];
        assert!((ete - 1.0 / b.eta).abs() < 1e-9 / b.eta);
    }

    #[test]
    fn c_is_positive_definite() {
        let b = assemble_branch(&cfg(340e-12), 0.5, 1, 1).unwrap();
        let c = b.c_matrix();
        let m = CMat::from_fn(b.dim(), b.dim(), |i, j| Complex64::new(c[i][j], 0.0));
        let eig = eigh(&m).unwrap();
        let smallest = *eig.values.last().unwrap();
        assert!(smallest > 0.0);
        let p = PreciseBranch::new(&b);
        assert!((p.lambda_min() - smallest).abs() < 1e-9 * smallest.max(1e-3));
    }

    #[test]
    fn unconstrained_delay_closed_form() {
        let b = assemble_branch(&cfg(340e-12), 0.8, 1, 1).unwrap();
        assert!((b.unconstrained_theta() - 6.0).abs() < 1e-12);
        // the same quantity through the dense inverse
        let ci = b.c_inverse();
        let via_inverse: f64 = (0..b.dim()).map(|j| ci[b.n][j] * b.d[j]).sum();
        assert!((via_inverse - 6.0).abs() < 1e-6);
        for m in 1..=16 {
            let b = assemble_branch(&cfg(340e-12), 0.37, 2, m).unwrap();
            let want = ((2 * m - 1) * 16 - 1) as f64 / 2.0 * 0.37;
            assert!((b.unconstrained_theta() - want).abs() < 1e-12 * want.max(1.0));
        }
    }

    #[test]
    fn zero_direction_gives_zero_data() {
        let b = assemble_branch(&cfg(340e-12), 0.0, 1, 5).unwrap();
        assert!(b.d.iter().all(|&v| v == 0.0));
        let s = solve_kkt(&b).unwrap();
        assert!(s.a.iter().all(|&v| v == 0.0));
        assert_eq!(s.case, KktCase::Interior);
        assert_eq!((s.lambda_upper, s.lambda_lower), (0.0, 0.0));
    }

    #[test]
    fn interior_example() {
        let b = assemble_branch(&SystemConfig { t_max_s: 340e-12, ..cfg(0.0) }, 0.8, 1, 1).unwrap();
        let s = solve_kkt(&b).unwrap();
        assert_eq!(s.case, KktCase::Interior);
        assert!((s.theta() - 6.0).abs() < 1e-12);
        for (i, x) in s.phases().iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((x - (16.0 - 2.0 * n + 1.0) / 2.0 * 0.8).abs() < 1e-12);
        }
        assert!(b.stationarity_residual(&s) < 1e-9);
        let p = solve_projected(&b, 1e-10, 2_000_000).unwrap();
        for (u, v) in p.iter().zip(&s.a) {
            assert!((u - v).abs() < 1e-9);
        }
    }

    #[test]
    fn upper_active_example() {
        let b = assemble_branch(&cfg(320e-12), 0.8, 1, 16).unwrap();
        assert!((b.theta_max - 192.0).abs() < 1e-12);
        let s = solve_kkt(&b).unwrap();
        assert_eq!(s.case, KktCase::UpperActive);
        assert_eq!(s.theta(), b.theta_max);
        for (x, g) in s.phases().iter().zip(&b.gamma) {
            assert!((x - (b.theta_max - g)).abs() < 1e-12);
        }
        assert!((s.phases()[0]).abs() < 1e-12);
        assert!((s.phases()[15] + 12.0).abs() < 1e-10);
        assert!(s.lambda_upper > 0.0);
        assert!(b.stationarity_residual(&s) < 1e-9);
    }

    #[test]
    fn lower_active_for_negative_direction() {
        let b = assemble_branch(&cfg(320e-12), -0.4, 1, 2).unwrap();
        let s = solve_kkt(&b).unwrap();
        assert_eq!(s.case, KktCase::LowerActive);
        assert_eq!(s.theta(), 0.0);
        assert!(s.lambda_lower > 0.0);
        assert!(b.stationarity_residual(&s) < 1e-9);
        let p = solve_projected(&b, 1e-10, 2_000_000).unwrap();
        assert!(p.iter().zip(&s.a).all(|(u, v)| (u - v).abs() < 1e-9));
    }

    #[test]
    fn zero_budget_pins_delay() {
        let b = assemble_branch(&cfg(0.0), 0.6, 1, 4).unwrap();
        let p = solve_projected(&b, 1e-9, 2_000_000).unwrap();
        assert_eq!(p[b.n], 0.0);
        let s = solve_kkt(&b).unwrap();
        assert_eq!(s.theta(), 0.0);
    }

    #[test]
    fn projected_beats_trivial_points() {
        let b = assemble_branch(&cfg(320e-12), 0.9, 1, 12).unwrap();
        let p = solve_projected(&b, 1e-9, 2_000_000).unwrap();
        let f = b.objective(&p);
        assert!(f <= b.objective(&vec![0.0; b.dim()]) + 1e-9);
        let ci = b.c_inverse();
        let mut clipped = matvec(&ci, &b.d);
        clipped[b.n] = clipped[b.n].clamp(0.0, b.theta_max);
        assert!(f <= b.objective(&clipped) + 1e-9);
    }

    #[test]
    fn quadratic_form_matches_objective() {
        let b = assemble_branch(&cfg(340e-12), 0.3, 1, 2).unwrap();
        let a: Vec<f64> = (0..b.dim()).map(|i| (i as f64 * 0.7).sin()).collect();
        let zero = b.objective(&vec![0.0; b.dim()]);
        let ca = b.apply_c(&a);
        let quad: f64 = a.iter().zip(&ca).map(|(x, y)| x * y).sum::<f64>()
            - 2.0 * a.iter().zip(&b.d).map(|(x, y)| x * y).sum::<f64>();
        assert!((b.objective(&a) - (quad + zero)).abs() < 1e-9 * zero.max(1.0));
    }

    #[test]
    fn iteration_cap_reports_residual() {
        let b = assemble_branch(&cfg(340e-12), 0.8, 1, 16).unwrap();
        match solve_projected(&b, 1e-12, 3) {
            Err(Error::NonConvergence { iterations: 3, residual, .. }) => assert!(residual > 0.0),
            other => panic!("unexpected {other:?}"),
        }
        assert!(solve_projected(&b, 0.0, 10).is_err());
    }

    #[test]
    fn zero_bandwidth_is_degenerate() {
        let c = SystemConfig { bandwidth_hz: 0.0, ..cfg(340e-12) };
        assert!(matches!(assemble_branch(&c, 0.5, 1, 1), Err(Error::Degenerate(_))));
        assert!(matches!(assemble_branch(&cfg(340e-12), 0.5, 1, 17), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn chord_and_arc() {
        assert_eq!(phase_distance_equiv(0.4, 0.4), (0.0, 0.0));
        let mut last = (0.0, 0.0);
        for i in 1..300 {
            let y = 0.3 + i as f64 * 0.01;
            let (chord, arc) = phase_distance_equiv(0.3, y);
            assert!((chord - 2.0 * (arc / 2.0).sin()).abs() < 1e-12);
            assert!(chord > last.0 && arc > last.1);
            last = (chord, arc);
        }
    }

    #[test]
    fn csv_dump() {
        let b = assemble_branch(&cfg(340e-12), 0.5, 1, 1).unwrap();
        let cmp = compare_solvers(&b, 1e-10, 1_000_000).unwrap();
        let mut buf = Vec::new();
        write_comparisons_csv(&mut buf, &[cmp]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1 + 17);
        assert!(text.starts_with("l,m,n,k,psi"));
    }
}
