//! Dense matrices over exact rationals or complex floats, with the few
//! decompositions the representation checks need.

use std::fmt::Debug;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rat::Rat;

/// Tolerance for floating-point comparisons.
pub const FLOAT_TOL: f64 = 1e-9;

pub trait Scalar: Clone + Debug + PartialEq + Send + Sync + 'static {
    /// Whether arithmetic is exact, so comparisons need no tolerance.
    const EXACT: bool;
    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(n: i64) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn conj(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn close(&self, o: &Self, tol: f64) -> bool;
    fn to_c64(&self) -> Complex64;
    /// The exact value, when there is one.
    fn to_big(&self) -> Option<BigRational>;
}

impl Scalar for Rat {
    const EXACT: bool = true;
    fn zero() -> Rat {
        Rat::ZERO
    }
    fn one() -> Rat {
        Rat::ONE
    }
    fn from_i64(n: i64) -> Rat {
        Rat::int(n)
    }
    fn add(&self, o: &Rat) -> Rat {
        *self + *o
    }
    fn sub(&self, o: &Rat) -> Rat {
        *self - *o
    }
    fn mul(&self, o: &Rat) -> Rat {
        *self * *o
    }
    fn conj(&self) -> Rat {
        *self
    }
    fn is_zero(&self) -> bool {
        Rat::is_zero(self)
    }
    fn close(&self, o: &Rat, _tol: f64) -> bool {
        self == o
    }
    fn to_c64(&self) -> Complex64 {
        Complex64::new(self.to_f64(), 0.0)
    }
    fn to_big(&self) -> Option<BigRational> {
        Some(rat_to_big(self))
    }
}

impl Scalar for Complex64 {
    const EXACT: bool = false;
    fn zero() -> Complex64 {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }
    fn from_i64(n: i64) -> Complex64 {
        Complex64::new(n as f64, 0.0)
    }
    fn add(&self, o: &Complex64) -> Complex64 {
        self + o
    }
    fn sub(&self, o: &Complex64) -> Complex64 {
        self - o
    }
    fn mul(&self, o: &Complex64) -> Complex64 {
        self * o
    }
    fn conj(&self) -> Complex64 {
        Complex64::conj(self)
    }
    fn is_zero(&self) -> bool {
        self.norm() <= FLOAT_TOL
    }
    fn close(&self, o: &Complex64, tol: f64) -> bool {
        (self - o).norm() <= tol
    }
    fn to_c64(&self) -> Complex64 {
        *self
    }
    fn to_big(&self) -> Option<BigRational> {
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Matrix<S> {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix<S> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Matrix<S> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &Matrix<S>) -> Matrix<S> {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let mut out: Matrix<S> = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() && S::EXACT {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    let v = out.get(i, j).add(&a.mul(b));
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn adjoint(&self) -> Matrix<S> {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: &S) -> Matrix<S> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v.mul(s)).collect() }
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc.add(self.get(i, i)))
    }

    /// Equality, exact for exact scalars and within `tol` otherwise.
    pub fn close(&self, o: &Matrix<S>, tol: f64) -> bool {
        self.rows == o.rows && self.cols == o.cols && self.data.iter().zip(&o.data).all(|(a, b)| a.close(b, tol))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn block_diag(a: &Matrix<S>, b: &Matrix<S>) -> Matrix<S> {
        let mut out = Matrix::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        out
    }

    pub fn to_complex(&self) -> DMatrix<Complex64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j).to_c64())
    }

    pub fn entries(&self) -> &[S] {
        &self.data
    }

    /// Operator norm at most one. For exact matrices this is certified by
    /// `M*M` being an orthogonal projection or, failing that, by the largest
    /// singular value; floating matrices use the singular values directly.
    pub fn is_contraction(&self) -> bool {
        if S::EXACT {
            let g = self.adjoint().mul(self);
            if g.mul(&g) == g && g.adjoint() == g {
                return true;
            }
        }
        let svd = self.to_complex().singular_values();
        svd.iter().all(|&s| s <= 1.0 + FLOAT_TOL)
    }
}

/// Rank of a sparse system over exact rationals, by elimination.
pub fn exact_rank(rows: &[Vec<(usize, BigRational)>]) -> usize {
    let mut pivots: Vec<(usize, Vec<(usize, BigRational)>)> = Vec::new();
    for row in rows {
        let mut r: Vec<(usize, BigRational)> = row.iter().filter(|(_, v)| !v.is_zero()).cloned().collect();
        r.sort_by_key(|(c, _)| *c);
        loop {
            let Some((lead, lead_val)) = r.first().cloned() else { break };
            match pivots.iter().find(|(c, _)| *c == lead) {
                Some((_, prow)) => {
                    let factor = &lead_val / &prow[0].1;
                    r = sparse_axpy(&r, prow, &factor);
                }
                None => {
                    pivots.push((lead, r));
                    break;
                }
            }
        }
    }
    pivots.len()
}

/// `a - factor * b` for sorted sparse rows.
fn sparse_axpy(a: &[(usize, BigRational)], b: &[(usize, BigRational)], factor: &BigRational) -> Vec<(usize, BigRational)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let ca = a.get(i).map(|x| x.0);
        let cb = b.get(j).map(|x| x.0);
        match (ca, cb) {
            (Some(x), Some(y)) if x == y => {
                let v = &a[i].1 - factor * &b[j].1;
                if !v.is_zero() {
                    out.push((x, v));
                }
                i += 1;
                j += 1;
            }
            (Some(x), Some(y)) if x < y => {
                out.push(a[i].clone());
                i += 1;
            }
            (Some(_), None) => {
                out.push(a[i].clone());
                i += 1;
            }
            _ => {
                let (y, v) = &b[j];
                out.push((*y, -(factor * v)));
                j += 1;
            }
        }
    }
    out
}

/// Rank of a stacked complex system from its normal matrix `Σ r* r`.
pub fn float_rank(normal: &DMatrix<Complex64>) -> usize {
    if normal.nrows() == 0 {
        return 0;
    }
    let eig = normal.clone().symmetric_eigenvalues();
    let top = eig.iter().cloned().fold(0.0_f64, f64::max);
    if top <= FLOAT_TOL {
        return 0;
    }
    eig.iter().filter(|&&e| e > 1e-8 * top).count()
}

pub fn rat_to_big(r: &Rat) -> BigRational {
    BigRational::new(BigInt::from(r.numer()), BigInt::from(r.denom()))
}

/// Result of a positive-semidefiniteness test.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdCertificate {
    pub psd: bool,
    /// Pivots of the exact `LDLᵀ` factorisation, when entries were rational.
    pub pivots: Option<Vec<BigRational>>,
    /// Smallest eigenvalue, when the floating path was used.
    pub min_eigenvalue: Option<f64>,
    /// Spectral norm, when the floating path was used.
    pub norm: Option<f64>,
}

/// Symmetric elimination without pivoting. A zero pivot is allowed only
/// when the rest of its column vanishes.
pub fn exact_ldlt(g: &[Vec<BigRational>]) -> PsdCertificate {
    let n = g.len();
    let mut a: Vec<Vec<BigRational>> = g.to_vec();
    let mut pivots = Vec::with_capacity(n);
    let mut psd = true;
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_negative() {
            psd = false;
        }
        if p.is_zero() {
            if ((k + 1)..n).any(|i| !a[i][k].is_zero()) {
                psd = false;
                pivots.push(p);
                break;
            }
            pivots.push(p);
            continue;
        }
        for i in (k + 1)..n {
            if a[i][k].is_zero() {
                continue;
            }
            let f = &a[i][k] / &p;
            for j in (k + 1)..n {
                if a[k][j].is_zero() {
                    continue;
                }
                let v = &a[i][j] - &f * &a[k][j];
                a[i][j] = v;
            }
        }
        pivots.push(p);
    }
    PsdCertificate { psd, pivots: Some(pivots), min_eigenvalue: None, norm: None }
}

/// Smallest eigenvalue at least `-FLOAT_TOL` times the spectral norm.
pub fn float_psd(g: &[Vec<f64>]) -> PsdCertificate {
    let n = g.len();
    let m = DMatrix::from_fn(n, n, |i, j| g[i][j]);
    let eig = m.symmetric_eigenvalues();
    let min = eig.iter().cloned().fold(f64::INFINITY, f64::min);
    let norm = eig.iter().map(|e| e.abs()).fold(0.0, f64::max);
    PsdCertificate {
        psd: n == 0 || min >= -FLOAT_TOL * norm.max(f64::MIN_POSITIVE),
        pivots: None,
        min_eigenvalue: Some(if n == 0 { 0.0 } else { min }),
        norm: Some(norm),
    }
}

/// Fraction-free elimination on the matrix scaled to integers. When every
/// leading principal minor is positive the matrix is positive definite and
/// the pivots are ratios of consecutive minors; a vanishing minor falls back
/// to [`exact_ldlt`].
pub fn bareiss_psd(g: &[Vec<BigRational>]) -> PsdCertificate {
    let n = g.len();
    let mut scale = BigInt::one();
    for row in g {
        for v in row {
            scale = num_integer::Integer::lcm(&scale, v.denom());
        }
    }
    let mut a: Vec<Vec<BigInt>> =
        g.iter().map(|row| row.iter().map(|v| v.numer() * (&scale / v.denom())).collect()).collect();
    let scale = BigRational::from_integer(scale);
    let mut prev = BigInt::one();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let p = a[k][k].clone();
        if p.is_zero() {
            return exact_ldlt(g);
        }
        pivots.push(BigRational::new(p.clone(), prev.clone()) / &scale);
        if p.is_negative() {
            return PsdCertificate { psd: false, pivots: Some(pivots), min_eigenvalue: None, norm: None };
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let v = (&a[i][j] * &p - &a[i][k] * &a[k][j]) / &prev;
                a[i][j] = v;
            }
        }
        prev = p;
    }
    PsdCertificate { psd: true, pivots: Some(pivots), min_eigenvalue: None, norm: None }
}

pub fn big_one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn ldlt_examples() {
        let c = exact_ldlt(&[vec![big(1, 1), big(1, 4)], vec![big(1, 4), big(1, 1)]]);
        assert!(c.psd);
        assert_eq!(c.pivots.unwrap(), vec![big(1, 1), big(15, 16)]);
        let c = exact_ldlt(&[vec![big(1, 1), big(2, 1)], vec![big(2, 1), big(1, 1)]]);
        assert!(!c.psd);
        assert_eq!(c.pivots.unwrap(), vec![big(1, 1), big(-3, 1)]);
        let c = exact_ldlt(&[vec![big(0, 1), big(1, 1)], vec![big(1, 1), big(0, 1)]]);
        assert!(!c.psd);
    }

    #[test]
    fn bareiss_matches_ldlt() {
        let cases = [
            vec![vec![big(1, 1), big(1, 4)], vec![big(1, 4), big(1, 1)]],
            vec![vec![big(1, 1), big(2, 1)], vec![big(2, 1), big(1, 1)]],
            vec![vec![big(0, 1), big(1, 1)], vec![big(1, 1), big(0, 1)]],
            vec![
                vec![big(1, 1), big(1, 3), big(1, 9)],
                vec![big(1, 3), big(1, 1), big(1, 9)],
                vec![big(1, 9), big(1, 9), big(1, 1)],
            ],
            vec![vec![big(1, 1), big(1, 1)], vec![big(1, 1), big(1, 1)]],
        ];
        for g in &cases {
            assert_eq!(bareiss_psd(g), exact_ldlt(g));
        }
    }

    #[test]
    fn float_psd_example() {
        assert!(float_psd(&[vec![1.0, 0.25], vec![0.25, 1.0]]).psd);
        assert!(!float_psd(&[vec![1.0, 2.0], vec![2.0, 1.0]]).psd);
    }

    #[test]
    fn exact_rank_of_dependent_rows() {
        let rows = vec![
            vec![(0, big(1, 1)), (1, big(1, 1))],
            vec![(0, big(2, 1)), (1, big(2, 1))],
            vec![(1, big(1, 1))],
        ];
        assert_eq!(exact_rank(&rows), 2);
    }

    #[test]
    fn contraction_checks() {
        let p: Matrix<Rat> = Matrix::from_rows(vec![vec![Rat::ZERO, Rat::ONE], vec![Rat::ZERO, Rat::ZERO]]);
        assert!(p.is_contraction());
        let big2: Matrix<Rat> = Matrix::identity(2).scale(&Rat::int(2));
        assert!(!big2.is_contraction());
    }
}
