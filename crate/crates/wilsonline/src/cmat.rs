//! Dense complex matrices sized for small representations.
//!
//! Everything downstream works with representation matrices of side at most
//! 8 and their tensor squares (side at most 64), so a plain row-major
//! `Vec<Complex64>` with O(n^3) kernels is the right tool. The two nontrivial
//! routines live here as well: the matrix exponential (scaling and squaring
//! around a short Taylor sum) and a cyclic Jacobi eigensolver for Hermitian
//! matrices, which doubles as the factorization backend for real symmetric
//! covariance matrices.
//!
//! The norm used throughout is the entrywise L1 norm `sum_ij |a_ij|`. It is
//! submultiplicative, so it feeds both the exponential's scaling choice and
//! the holonomy tail bounds.

use num_complex::Complex64;

use crate::error::{EngineError, Result};

pub type C64 = Complex64;

pub const I1: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = CMat::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    /// Builds a matrix from rows of `(re, im)` pairs, validating rectangularity.
    pub fn from_entry_pairs(rows: &[Vec<[f64; 2]>]) -> Result<Self> {
        let r = rows.len();
        if r == 0 {
            return Err(EngineError::Validation("matrix has no rows".into()));
        }
        let c = rows[0].len();
        if c == 0 || rows.iter().any(|row| row.len() != c) {
            return Err(EngineError::Validation(
                "matrix rows must be nonempty and of equal length".into(),
            ));
        }
        Ok(CMat::from_fn(r, c, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn entry_pairs(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| [self.at(i, j).re, self.at(i, j).im]).collect())
            .collect()
    }

    pub fn add(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn add_assign(&mut self, other: &CMat) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn scale(&self, s: C64) -> CMat {
        let data = self.data.iter().map(|a| a * s).collect();
        CMat { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale_re(&self, s: f64) -> CMat {
        self.scale(C64::new(s, 0.0))
    }

    pub fn matmul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows);
        let mut out = CMat::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                let row_out = &mut out.data[i * other.cols..(i + 1) * other.cols];
                let row_b = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in row_out.iter_mut().zip(row_b) {
                    *o += a * b;
                }
            }
        }
        out
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self.at(j, i).conj())
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square());
        (0..self.rows).map(|i| self.at(i, i)).sum()
    }

    /// Kronecker product, with `self` indexing the coarse blocks.
    pub fn kron(&self, other: &CMat) -> CMat {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        CMat::from_fn(r1 * r2, c1 * c2, |i, j| {
            self.at(i / r2, j / c2) * other.at(i % r2, j % c2)
        })
    }

    /// Entrywise L1 norm `sum_ij |a_ij|`; submultiplicative.
    pub fn entry_l1_norm(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.re == 0.0 && a.im == 0.0)
    }

    /// Largest entry of `A + A^dagger`; zero iff anti-Hermitian.
    pub fn anti_hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self.at(i, j) + self.at(j, i).conj()).norm());
            }
        }
        d
    }

    /// Largest entry of `A - A^dagger`; zero iff Hermitian.
    pub fn hermitian_defect(&self) -> f64 {
        assert!(self.is_square());
        let mut d: f64 = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                d = d.max((self.at(i, j) - self.at(j, i).conj()).norm());
            }
        }
        d
    }

    /// Largest entry of `A^dagger A - I`; zero iff unitary.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.rows;
        self.dagger().matmul(self).sub(&CMat::identity(n)).max_abs()
    }

    fn taylor_exp(&self, terms: usize) -> CMat {
        let n = self.rows;
        let mut result = CMat::identity(n);
        let mut term = CMat::identity(n);
        for m in 1..=terms {
            term = term.matmul(self).scale_re(1.0 / m as f64);
            result.add_assign(&term);
        }
        result
    }

    /// Matrix exponential by scaling and squaring around a degree-13 Taylor
    /// sum. The scaled norm is kept at or below 1/2, where 13 terms already
    /// leave a truncation error near 1e-16; below norm 1e-2 the Taylor sum
    /// alone is used.
    pub fn expm(&self) -> CMat {
        assert!(self.is_square());
        let norm = self.entry_l1_norm();
        if !norm.is_finite() {
            panic!("matrix exponential of non-finite matrix");
        }
        if norm < 1e-2 {
            return self.taylor_exp(13);
        }
        let s = (norm / 0.5).log2().ceil().max(0.0) as u32;
        let scaled = self.scale_re(0.5f64.powi(s as i32));
        let mut e = scaled.taylor_exp(13);
        for _ in 0..s {
            e = e.matmul(&e);
        }
        e
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        self.hermitian_eigen().0
    }

    /// Full Hermitian eigendecomposition `A = V diag(w) V^dagger` by cyclic
    /// Jacobi rotations: `w` ascending, columns of `V` the matching
    /// orthonormal eigenvectors. Off-diagonal mass contracts by a fixed
    /// factor per sweep, so the iteration cap is never reached in practice.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, CMat) {
        assert!(self.is_square());
        let n = self.rows;
        let mut a = self.clone();
        let mut v = CMat::identity(n);
        let scale = self.max_abs().max(1e-300);
        let tol = scale * 1e-15;

        for _sweep in 0..60 {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off = off.max(a.at(p, q).norm());
                }
            }
            if off <= tol {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.at(p, q);
                    let m = apq.norm();
                    if m <= tol * 1e-2 {
                        continue;
                    }
                    // Unitary 2x2 rotation annihilating a_pq: phase from the
                    // entry, angle from tan(2θ) = 2|a_pq| / (a_qq - a_pp).
                    let phase = apq / m;
                    let app = a.at(p, p).re;
                    let aqq = a.at(q, q).re;
                    let beta = (aqq - app) / (2.0 * m);
                    let t = if beta.is_finite() {
                        let sgn = if beta >= 0.0 { 1.0 } else { -1.0 };
                        sgn / (beta.abs() + (beta * beta + 1.0).sqrt())
                    } else {
                        0.0
                    };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    let sp = phase * s; // s * e^{i phi}
                    // Column update A <- A V with V = [[c, sp], [-conj(sp), c]]
                    // in the (p, q) plane, then row update A <- V^dagger A.
                    for i in 0..n {
                        let aip = a.at(i, p);
                        let aiq = a.at(i, q);
                        a.set(i, p, aip * c - aiq * sp.conj());
                        a.set(i, q, aip * sp + aiq * c);
                    }
                    for j in 0..n {
                        let apj = a.at(p, j);
                        let aqj = a.at(q, j);
                        a.set(p, j, apj * c - aqj * sp);
                        a.set(q, j, apj * sp.conj() + aqj * c);
                    }
                    for i in 0..n {
                        let vip = v.at(i, p);
                        let viq = v.at(i, q);
                        v.set(i, p, vip * c - viq * sp.conj());
                        v.set(i, q, vip * sp + viq * c);
                    }
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        let diag: Vec<f64> = (0..n).map(|i| a.at(i, i).re).collect();
        order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
        let w: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
        let vs = CMat::from_fn(n, n, |i, j| v.at(i, order[j]));
        (w, vs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_c(state: &mut u64) -> C64 {
        // xorshift-based filler for test matrices; quality is irrelevant here.
        let mut next = || {
            *state ^= *state << 13;
            *state ^= *state >> 7;
            *state ^= *state << 17;
            (*state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        C64::new(next(), next())
    }

    #[test]
    fn matmul_against_hand_product() {
        let a = CMat::from_fn(2, 2, |i, j| C64::new((i * 2 + j) as f64, 1.0));
        let b = CMat::from_fn(2, 2, |i, j| C64::new(1.0, (i + j) as f64));
        let c = a.matmul(&b);
        // c_00 = a_00 b_00 + a_01 b_10 = (0+i)(1) + (1+i)(1+i) = 0 + i + 2i = 3i
        assert!((c.at(0, 0) - C64::new(0.0, 3.0)).norm() < 1e-14);
    }

    #[test]
    fn entry_l1_norm_is_submultiplicative() {
        let mut s = 0x9E3779B97F4A7C15u64;
        for _ in 0..20 {
            let a = CMat::from_fn(4, 4, |_, _| random_c(&mut s));
            let b = CMat::from_fn(4, 4, |_, _| random_c(&mut s));
            let lhs = a.matmul(&b).entry_l1_norm();
            let rhs = a.entry_l1_norm() * b.entry_l1_norm();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn expm_of_diagonal() {
        let d = CMat::from_fn(2, 2, |i, j| {
            if i == j {
                C64::new(0.0, if i == 0 { 1.0 } else { -2.0 })
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let e = d.expm();
        assert!((e.at(0, 0) - C64::new(0.0, 1.0).exp()).norm() < 1e-14);
        assert!((e.at(1, 1) - C64::new(0.0, -2.0).exp()).norm() < 1e-14);
        assert!(e.at(0, 1).norm() < 1e-15);
    }

    #[test]
    fn expm_inverse_is_negated_argument() {
        let mut s = 0xDEADBEEFu64;
        for _ in 0..10 {
            let x = CMat::from_fn(3, 3, |_, _| random_c(&mut s));
            let prod = x.expm().matmul(&x.scale_re(-1.0).expm());
            assert!(prod.sub(&CMat::identity(3)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn expm_of_antihermitian_is_unitary() {
        let mut s = 0x12345u64;
        for _ in 0..10 {
            let x = CMat::from_fn(4, 4, |_, _| random_c(&mut s));
            let ah = x.sub(&x.dagger()).scale_re(0.5);
            assert!(ah.anti_hermitian_defect() < 1e-14);
            assert!(ah.expm().unitarity_defect() < 1e-12);
        }
    }

    #[test]
    fn jacobi_reconstructs_hermitian_matrix() {
        let mut s = 0xABCDEFu64;
        for _ in 0..10 {
            let x = CMat::from_fn(5, 5, |_, _| random_c(&mut s));
            let h = x.add(&x.dagger()).scale_re(0.5);
            let (w, v) = h.hermitian_eigen();
            let lam = CMat::from_fn(5, 5, |i, j| {
                if i == j { C64::new(w[i], 0.0) } else { C64::new(0.0, 0.0) }
            });
            let rebuilt = v.matmul(&lam).matmul(&v.dagger());
            assert!(rebuilt.sub(&h).max_abs() < 1e-12);
            assert!(v.unitarity_defect() < 1e-12);
            for i in 1..5 {
                assert!(w[i] >= w[i - 1]);
            }
        }
    }

    #[test]
    fn kron_of_identities() {
        let k = CMat::identity(2).kron(&CMat::identity(3));
        assert!(k.sub(&CMat::identity(6)).max_abs() == 0.0);
    }
}
