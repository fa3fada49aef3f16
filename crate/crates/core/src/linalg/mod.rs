//! Dense linear algebra over f64, complex and prime fields.

mod eig;
pub mod field;
mod pencil;

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex64;

pub use eig::{eig, EigResult};
pub use field::{exact_rank, fp_gj_eliminate, FpMatrix, FpRref};
pub use pencil::{gep_eigenvalues, pep_to_gep};

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("singular pivot block (reciprocal condition estimate {rcond:.3e})")]
    SingularPivot { rcond: f64 },
    #[error("eigenvalue iteration did not converge at index {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

/// Pivot blocks with a smaller reciprocal condition estimate are rejected.
pub const RCOND_MIN: f64 = 1e-12;

pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Add<Output = Self>
    + AddAssign
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
{
    fn zero() -> Self;
    fn one() -> Self;
    fn abs(self) -> f64;
    fn from_f64(x: f64) -> Self;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

pub type RMatrix = Matrix<f64>;
pub type CMatrix = Matrix<Complex64>;

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flatten().copied().collect(),
        }
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

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Matrix<T>) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matvec shape");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(T::zero(), |s, (&a, &b)| s + a * b)
            })
            .collect()
    }

    pub fn sub(&self, other: &Matrix<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sub shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix<T>) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape");
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| a + b).collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| a * s).collect(),
        }
    }

    /// Rows r0..r1, columns c0..c1.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Self {
        let mut out = Self::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                out[(i - r0, j - c0)] = self[(i, j)];
            }
        }
        out
    }

    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        let mut out = Self::zeros(rows.len(), cols.len());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out[(a, b)] = self[(i, j)];
            }
        }
        out
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.abs().powi(2)).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.abs()).fold(0.0, f64::max)
    }

    /// Max column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.abs().is_finite())
    }
}

impl RMatrix {
    pub fn to_complex(&self) -> CMatrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// LU factorization with partial pivoting.
#[derive(Clone, Debug)]
pub struct Lu<T> {
    lu: Matrix<T>,
    perm: Vec<usize>,
    sign: f64,
    singular: bool,
    anorm: f64,
}

impl<T: Scalar> Lu<T> {
    pub fn new(a: &Matrix<T>) -> Self {
        assert!(a.is_square(), "LU needs a square matrix");
        let n = a.rows;
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let (p, best) = (k..n)
                .map(|i| (i, lu[(i, k)].abs()))
                .fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    lu.data.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
                sign = -sign;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f == T::zero() {
                    continue;
                }
                for j in k + 1..n {
                    let v = lu[(k, j)];
                    lu[(i, j)] = lu[(i, j)] - f * v;
                }
            }
        }
        Lu {
            lu,
            perm,
            sign,
            singular,
            anorm: a.norm1(),
        }
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> T {
        let mut d = T::from_f64(self.sign);
        for i in 0..self.lu.rows {
            d = d * self.lu[(i, i)];
        }
        d
    }

    /// Solve A X = B.
    pub fn solve(&self, b: &Matrix<T>) -> Matrix<T> {
        let n = self.lu.rows;
        assert_eq!(b.rows, n, "solve shape");
        let mut x = Matrix::zeros(n, b.cols);
        for i in 0..n {
            for j in 0..b.cols {
                x[(i, j)] = b[(self.perm[i], j)];
            }
        }
        for j in 0..b.cols {
            for i in 0..n {
                let mut s = x[(i, j)];
                for k in 0..i {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, j)];
                for k in i + 1..n {
                    s = s - self.lu[(i, k)] * x[(k, j)];
                }
                x[(i, j)] = s / self.lu[(i, i)];
            }
        }
        x
    }

    pub fn inverse(&self) -> Matrix<T> {
        self.solve(&Matrix::identity(self.lu.rows))
    }

    /// 1 / (|A|_1 |A^-1|_1), 0 when singular.
    pub fn rcond(&self) -> f64 {
        if self.singular || self.lu.rows == 0 {
            return if self.lu.rows == 0 { 1.0 } else { 0.0 };
        }
        let inv = self.inverse();
        if !inv.is_finite() {
            return 0.0;
        }
        let d = self.anorm * inv.norm1();
        if d == 0.0 || !d.is_finite() {
            0.0
        } else {
            1.0 / d
        }
    }
}

pub fn det<T: Scalar>(a: &Matrix<T>) -> T {
    Lu::new(a).det()
}

/// Reduced row-echelon form and its pivot columns.
#[derive(Clone, Debug, PartialEq)]
pub struct Rref<T> {
    pub matrix: Matrix<T>,
    pub pivots: Vec<usize>,
}

/// Gauss-Jordan elimination with partial pivoting.
pub fn gj_eliminate<T: Scalar>(m: &Matrix<T>) -> Rref<T> {
    let mut a = m.clone();
    let (rows, cols) = (a.rows, a.cols);
    let tol = f64::EPSILON * (rows.max(cols) as f64) * m.max_abs().max(f64::MIN_POSITIVE);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[(i, c)].abs()))
            .fold((r, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= tol {
            for i in r..rows {
                a[(i, c)] = T::zero();
            }
            continue;
        }
        if p != r {
            for j in 0..cols {
                a.data.swap(r * cols + j, p * cols + j);
            }
        }
        let inv = T::one() / a[(r, c)];
        for j in 0..cols {
            a[(r, j)] = a[(r, j)] * inv;
        }
        a[(r, c)] = T::one();
        for i in 0..rows {
            if i == r {
                continue;
            }
            let f = a[(i, c)];
            if f == T::zero() {
                continue;
            }
            for j in 0..cols {
                let v = a[(r, j)];
                a[(i, j)] = a[(i, j)] - f * v;
            }
            a[(i, c)] = T::zero();
        }
        pivots.push(c);
        r += 1;
    }
    Rref { matrix: a, pivots }
}

/// Y with A12 Y = A11, or a singular-pivot error.
pub fn pivot_solve(a12: &RMatrix, a11: &RMatrix) -> Result<RMatrix, LinalgError> {
    if !a12.is_square() || a12.rows != a11.rows {
        return Err(LinalgError::Dimension(format!(
            "pivot block {}x{} against {}x{}",
            a12.rows, a12.cols, a11.rows, a11.cols
        )));
    }
    let lu = Lu::new(a12);
    let rc = lu.rcond();
    if !(rc >= RCOND_MIN) {
        return Err(LinalgError::SingularPivot { rcond: rc });
    }
    Ok(lu.solve(a11))
}

/// A21 - A22 A12^-1 A11 from explicit blocks.
pub fn schur_from_blocks(
    a11: &RMatrix,
    a12: &RMatrix,
    a21: &RMatrix,
    a22: &RMatrix,
) -> Result<RMatrix, LinalgError> {
    if a21.rows != a22.rows || a21.cols != a11.cols || a22.cols != a12.cols {
        return Err(LinalgError::Dimension("inconsistent block shapes".into()));
    }
    let y = pivot_solve(a12, a11)?;
    Ok(a21.sub(&a22.matmul(&y)))
}

/// Schur complement of the upper-right pivot block of
/// M = [[A11, A12], [A21, A22]] where A11 is `top` x `left`.
pub fn schur_complement(m: &RMatrix, top: usize, left: usize) -> Result<RMatrix, LinalgError> {
    if top > m.rows || left > m.cols || top != m.cols - left {
        return Err(LinalgError::Dimension(format!(
            "split ({top}, {left}) does not give a square pivot in a {}x{} matrix",
            m.rows, m.cols
        )));
    }
    let a11 = m.block(0, top, 0, left);
    let a12 = m.block(0, top, left, m.cols);
    let a21 = m.block(top, m.rows, 0, left);
    let a22 = m.block(top, m.rows, left, m.cols);
    schur_from_blocks(&a11, &a12, &a21, &a22)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(rows: &[&[f64]]) -> RMatrix {
        RMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    fn random(rng: &mut ChaCha8Rng, r: usize, c: usize) -> RMatrix {
        RMatrix::from_vec(r, c, (0..r * c).map(|_| rng.random_range(-1.0..1.0)).collect())
    }

    #[test]
    fn gj_examples() {
        let r = gj_eliminate(&m(&[&[2.0, 4.0], &[1.0, 3.0]]));
        assert_eq!(r.matrix, RMatrix::identity(2));
        let r = gj_eliminate(&m(&[&[1.0, 2.0], &[2.0, 4.0]]));
        assert_eq!(r.matrix, m(&[&[1.0, 2.0], &[0.0, 0.0]]));
        assert_eq!(r.pivots, vec![0]);
    }

    #[test]
    fn gj_random_wide() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random(&mut rng, 6, 9);
        let r = gj_eliminate(&a);
        assert_eq!(r.pivots, (0..6).collect::<Vec<_>>());
        let left = r.matrix.block(0, 6, 0, 6);
        assert!(left.sub(&RMatrix::identity(6)).max_abs() < 1e-12);
        // A = A[:, piv] * RREF
        let recon = a.block(0, 6, 0, 6).matmul(&r.matrix);
        assert!(recon.sub(&a).max_abs() < 1e-10);
    }

    #[test]
    fn schur_examples() {
        let x = schur_from_blocks(&m(&[&[-2.0]]), &m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[1.0]])).unwrap();
        assert_eq!(x, m(&[&[2.0]]));
        let a21 = m(&[&[3.0, 4.0]]);
        let x = schur_from_blocks(
            &m(&[&[1.0, 2.0]]),
            &m(&[&[5.0]]),
            &a21,
            &m(&[&[0.0]]),
        )
        .unwrap();
        assert_eq!(x, a21);
        let e = schur_from_blocks(&m(&[&[1.0]]), &m(&[&[0.0]]), &m(&[&[1.0]]), &m(&[&[1.0]])).unwrap_err();
        assert!(matches!(e, LinalgError::SingularPivot { rcond } if rcond == 0.0));
    }

    #[test]
    fn schur_determinant_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = random(&mut rng, 8, 8);
            let (top, left) = (5, 3);
            let x = schur_complement(&a, top, left).unwrap();
            let piv = a.block(0, top, left, 8);
            // moving the pivot columns to the front permutes columns
            let sign = if (left * (8 - left)) % 2 == 0 { 1.0 } else { -1.0 };
            let lhs = det(&a);
            let rhs = sign * det(&piv) * det(&x);
            assert!((lhs - rhs).abs() <= 1e-6 * lhs.abs().max(1e-300), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn lu_solve_and_inverse() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random(&mut rng, 7, 7);
        let lu = Lu::new(&a);
        let inv = lu.inverse();
        assert!(a.matmul(&inv).sub(&RMatrix::identity(7)).max_abs() < 1e-10);
        assert!(lu.rcond() > 0.0 && lu.rcond() <= 1.0);
        let c = a.to_complex();
        let d = det(&c);
        assert!((d.re - det(&a)).abs() < 1e-10 && d.im == 0.0);
    }
}
