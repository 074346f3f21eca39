//! Small dense complex matrices and a cyclic Jacobi eigensolver for
//! Hermitian matrices.
//!
//! Everything in this crate works on matrices no larger than a few thousand
//! rows by a handful of columns, so a plain row-major `Vec` is all we need.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(columns: &[Vec<Complex64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::dims("from_columns", rows, bad.len()));
        }
        Ok(CMat::from_fn(rows, cols, |i, j| columns[j][i]))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[Complex64]) {
        assert_eq!(v.len(), self.rows);
        for (i, x) in v.iter().enumerate() {
            self[(i, j)] = *x;
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, rhs: &CMat) -> Result<CMat> {
        if self.cols != rhs.rows {
            return Err(Error::dims(
                "matmul",
                format!("lhs cols = rhs rows = {}", self.cols),
                rhs.rows,
            ));
        }
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (p, a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(p)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self^H * rhs` without materialising the adjoint.
    pub fn adjoint_matmul(&self, rhs: &CMat) -> Result<CMat> {
        if self.rows != rhs.rows {
            return Err(Error::dims(
                "adjoint_matmul",
                format!("equal row counts ({})", self.rows),
                rhs.rows,
            ));
        }
        let mut out = CMat::zeros(self.cols, rhs.cols);
        for p in 0..self.rows {
            let a_row = self.row(p);
            let b_row = rhs.row(p);
            for (i, a) in a_row.iter().enumerate() {
                let ac = a.conj();
                let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    *o += ac * b;
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&mut self, s: f64) {
        for x in &mut self.data {
            *x *= s;
        }
    }

    pub fn frobenius_norm_sqr(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum()
    }

    pub fn sub(&self, rhs: &CMat) -> Result<CMat> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::dims(
                "sub",
                format!("{}x{}", self.rows, self.cols),
                format!("{}x{}", rhs.rows, rhs.cols),
            ));
        }
        Ok(CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        })
    }

    /// Keeps the first `n` columns.
    pub fn leading_columns(&self, n: usize) -> CMat {
        let n = n.min(self.cols);
        CMat::from_fn(self.rows, n, |i, j| self[(i, j)])
    }

    pub fn count_nonzero(&self) -> usize {
        self.data.iter().filter(|x| x.norm_sqr() > 0.0).count()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// `a^H b`
pub fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm2(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigen-decomposition of a Hermitian matrix.
///
/// `values` are sorted in descending order and column `i` of `vectors` is the
/// matching unit eigenvector, with its largest-magnitude entry made real and
/// positive.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
    pub sweeps: usize,
}

pub const JACOBI_TOL: f64 = 1e-12;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for Hermitian matrices.
///
/// Converges when the off-diagonal Frobenius mass drops below
/// `JACOBI_TOL * ||A||_F` (or is exactly zero).
pub fn eigh(a: &CMat) -> Result<HermitianEigen> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::dims("eigh", "square matrix", format!("{}x{}", n, a.cols())));
    }
    let mut m = a.clone();
    // symmetrise; callers hand us Gram matrices that are Hermitian up to rounding
    for i in 0..n {
        m[(i, i)] = Complex64::new(m[(i, i)].re, 0.0);
        for j in (i + 1)..n {
            let avg = 0.5 * (m[(i, j)] + m[(j, i)].conj());
            m[(i, j)] = avg;
            m[(j, i)] = avg.conj();
        }
    }
    let mut v = CMat::identity(n);
    let total = m.frobenius_norm_sqr().sqrt();
    let off_mass = |m: &CMat| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += m[(i, j)].norm_sqr();
                }
            }
        }
        s.sqrt()
    };

    let mut sweeps = 0;
    let mut off = off_mass(&m);
    while off > JACOBI_TOL * total && off > 0.0 {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NonConvergence {
                what: "Hermitian Jacobi eigensolver",
                iterations: sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                let g = m[(p, q)];
                let r = g.norm();
                if r == 0.0 {
                    continue;
                }
                let e = g / r;
                let alpha = m[(p, p)].re;
                let beta = m[(q, q)].re;
                let tau = (beta - alpha) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // U = diag(1, conj(e)) * [[c, s], [-s, c]] acting on (p, q)
                let u_pp = Complex64::new(c, 0.0);
                let u_pq = Complex64::new(s, 0.0);
                let u_qp = -s * e.conj();
                let u_qq = c * e.conj();

                // M <- M U
                for i in 0..n {
                    let mp = m[(i, p)];
                    let mq = m[(i, q)];
                    m[(i, p)] = mp * u_pp + mq * u_qp;
                    m[(i, q)] = mp * u_pq + mq * u_qq;
                }
                // M <- U^H M
                for j in 0..n {
                    let mp = m[(p, j)];
                    let mq = m[(q, j)];
                    m[(p, j)] = u_pp.conj() * mp + u_qp.conj() * mq;
                    m[(q, j)] = u_pq.conj() * mp + u_qq.conj() * mq;
                }
                m[(p, q)] = Complex64::new(0.0, 0.0);
                m[(q, p)] = Complex64::new(0.0, 0.0);
                m[(p, p)] = Complex64::new(m[(p, p)].re, 0.0);
                m[(q, q)] = Complex64::new(m[(q, q)].re, 0.0);
                // V <- V U
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp * u_pp + vq * u_qp;
                    v[(i, q)] = vp * u_pq + vq * u_qq;
                }
            }
        }
        off = off_mass(&m);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].re.total_cmp(&m[(i, i)].re));
    let values = order.iter().map(|&i| m[(i, i)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        let mut col = v.col(src);
        fix_phase(&mut col);
        vectors.set_col(dst, &col);
    }
    Ok(HermitianEigen {
        values,
        vectors,
        sweeps,
    })
}

/// Rotates `v` so that its largest-magnitude entry is real and positive.
/// Ties go to the lowest index.
pub fn fix_phase(v: &mut [Complex64]) {
    let mut best = 0;
    let mut best_mag = -1.0;
    for (i, x) in v.iter().enumerate() {
        let mag = x.norm();
        if mag > best_mag * (1.0 + 1e-12) {
            best = i;
            best_mag = mag;
        }
    }
    if best_mag <= 0.0 {
        return;
    }
    let rot = v[best].conj() / best_mag;
    for x in v.iter_mut() {
        *x *= rot;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMat {
        let g = CMat::from_fn(n, n, |_, _| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        g.adjoint_matmul(&g).unwrap()
    }

    #[test]
    fn diagonal_matrix_is_already_converged() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(3.0, 0.0);
        a[(2, 2)] = c(2.0, 0.0);
        let e = eigh(&a).unwrap();
        assert_eq!(e.values, vec![3.0, 2.0, 1.0]);
        assert_eq!(e.sweeps, 0);
        assert_eq!(e.vectors[(1, 0)], c(1.0, 0.0));
    }

    #[test]
    fn reconstructs_random_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 4, 7] {
            let a = random_hermitian(n, &mut rng);
            let e = eigh(&a).unwrap();
            // A V = V diag(values)
            let av = a.matmul(&e.vectors).unwrap();
            for j in 0..n {
                for i in 0..n {
                    let err = (av[(i, j)] - e.vectors[(i, j)] * e.values[j]).norm();
                    assert!(err < 1e-10, "n={n} err={err}");
                }
            }
            let gram = e.vectors.adjoint_matmul(&e.vectors).unwrap();
            let err = gram.sub(&CMat::identity(n)).unwrap().frobenius_norm_sqr().sqrt();
            assert!(err < 1e-12);
            assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        }
    }

    #[test]
    fn eigenvector_phase_is_fixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_hermitian(4, &mut rng);
        let e = eigh(&a).unwrap();
        for j in 0..4 {
            let col = e.vectors.col(j);
            let (imax, _) = col
                .iter()
                .enumerate()
                .max_by(|x, y| x.1.norm().total_cmp(&y.1.norm()))
                .unwrap();
            assert!(col[imax].im.abs() < 1e-14 && col[imax].re > 0.0);
        }
    }

    #[test]
    fn rejects_non_square() {
        assert!(matches!(eigh(&CMat::zeros(2, 3)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn matches_power_iteration_on_rank_one() {
        let u = vec![c(0.3, 0.1), c(-0.2, 0.5), c(0.7, -0.4)];
        let a = CMat::from_fn(3, 3, |i, j| u[i] * u[j].conj());
        let e = eigh(&a).unwrap();
        let mut x = vec![c(1.0, 0.0); 3];
        for _ in 0..50 {
            let y: Vec<_> = (0..3).map(|i| (0..3).map(|j| a[(i, j)] * x[j]).sum()).collect();
            let nrm = norm2(&y);
            x = y.into_iter().map(|v: Complex64| v / nrm).collect();
        }
        let overlap = inner(&x, &e.vectors.col(0)).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        assert!((e.values[0] - norm2(&u).powi(2)).abs() < 1e-12);
    }
}
