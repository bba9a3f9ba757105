//! Dense complex linear algebra sized for this problem: matrices up to 16×16
//! (superoperators), with the two nontrivial kernels split into submodules —
//! scaling-and-squaring matrix exponential ([`expm`]) and a general
//! non-Hermitian eigensolver ([`eig_general`]).
//!
//! Everything is column-count-agnostic, but nothing here is tuned for large n:
//! storage is a flat row-major `Vec<Complex64>` and products are cubic loops.

mod eig;
mod expm;

pub use eig::{eig_general, SpectrumResult, DEFECTIVE_CONDITION_THRESHOLD};
pub use expm::expm;

use crate::error::{Error, Result};
use num_complex::Complex64;
use std::ops::{Index, IndexMut};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds from explicit rows; panics if rows are ragged or entries non-finite.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in &rows {
            assert_eq!(row.len(), c, "ragged rows");
            for &z in row {
                assert!(z.re.is_finite() && z.im.is_finite(), "non-finite entry");
                data.push(z);
            }
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
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

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Matrix product; panics on inner-dimension mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut out = Self::zeros(self.rows, other.cols);
        // ikj order keeps the inner loop on contiguous rows of `other` and `out`.
        for i in 0..self.rows {
            let a_row = self.row(i);
            for (k, &a_ik) in a_row.iter().enumerate() {
                if a_ik.re == 0.0 && a_ik.im == 0.0 {
                    continue;
                }
                let b_row = &other.data[k * other.cols..(k + 1) * other.cols];
                let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (o, &b) in out_row.iter_mut().zip(b_row) {
                    *o += a_ik * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "vector length differs from column count");
        let mut out = vec![Complex64::new(0.0, 0.0); self.rows];
        for (i, slot) in out.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for (&a, &x) in self.row(i).iter().zip(v) {
                acc += a * x;
            }
            *slot = acc;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o += b;
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (o, &b) in out.data.iter_mut().zip(&other.data) {
            *o -= b;
        }
        out
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for o in &mut out.data {
            *o *= c;
        }
        out
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        let mut out = self.clone();
        for o in &mut out.data {
            *o = o.conj();
        }
        out
    }

    /// Kronecker product: out[(i·p+k, j·q+l)] = self[(i,j)] · other[(k,l)].
    pub fn kron(&self, other: &Self) -> Self {
        let (p, q) = (other.rows, other.cols);
        let mut out = Self::zeros(self.rows * p, self.cols * q);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for k in 0..p {
                    for l in 0..q {
                        out[(i * p + k, j * q + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    /// Induced 1-norm: maximum absolute column sum.
    pub fn norm_one(&self) -> f64 {
        let mut best: f64 = 0.0;
        for j in 0..self.cols {
            let s: f64 = (0..self.rows).map(|i| self[(i, j)].norm()).sum();
            best = best.max(s);
        }
        best
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn norm_fro(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// LU factorization with partial pivoting (PA = LU).
    pub fn lu(&self) -> Result<LuFactors> {
        if !self.is_square() {
            return Err(Error::NonSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut singular = false;
        for k in 0..n {
            // Pivot by |re| + |im|: cheap and sufficient for stability.
            let (mut pivot_row, mut pivot_mag) = (k, lu[(k, k)].l1_norm());
            for i in k + 1..n {
                let mag = lu[(i, k)].l1_norm();
                if mag > pivot_mag {
                    pivot_row = i;
                    pivot_mag = mag;
                }
            }
            if pivot_mag == 0.0 {
                singular = true;
                continue;
            }
            if pivot_row != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(pivot_row, j)];
                    lu[(pivot_row, j)] = t;
                }
                perm.swap(k, pivot_row);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                for j in k + 1..n {
                    let sub = factor * lu[(k, j)];
                    lu[(i, j)] -= sub;
                }
            }
        }
        Ok(LuFactors { lu, perm, swaps, singular })
    }

    pub fn det(&self) -> Result<Complex64> {
        Ok(self.lu()?.det())
    }

    /// Returns `None` when a pivot vanishes exactly.
    pub fn inverse(&self) -> Result<Option<ComplexMatrix>> {
        let f = self.lu()?;
        if f.is_singular() {
            return Ok(None);
        }
        Ok(Some(f.solve_mat(&ComplexMatrix::identity(self.rows))))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Result of [`ComplexMatrix::lu`]; solves and determinants reuse one factorization.
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    singular: bool,
}

impl LuFactors {
    pub fn is_singular(&self) -> bool {
        self.singular
    }

    pub fn det(&self) -> Complex64 {
        if self.singular {
            return Complex64::new(0.0, 0.0);
        }
        let sign = if self.swaps.is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut d = Complex64::new(sign, 0.0);
        for i in 0..self.lu.rows() {
            d *= self.lu[(i, i)];
        }
        d
    }

    /// Solves Ax = b. Results are garbage when `is_singular()`; callers check.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.lu.rows();
        assert_eq!(b.len(), n);
        // Forward substitution on the permuted rhs (L has unit diagonal).
        let mut y: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 1..n {
            let mut acc = y[i];
            for (l, x) in self.lu.row(i)[..i].iter().zip(&y[..i]) {
                acc -= l * x;
            }
            y[i] = acc;
        }
        // Back substitution with U.
        for i in (0..n).rev() {
            let mut acc = y[i];
            for (l, x) in self.lu.row(i)[i + 1..].iter().zip(&y[i + 1..]) {
                acc -= l * x;
            }
            y[i] = acc / self.lu[(i, i)];
        }
        y
    }

    pub fn solve_mat(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let n = self.lu.rows();
        assert_eq!(b.rows(), n);
        let mut out = ComplexMatrix::zeros(n, b.cols());
        for j in 0..b.cols() {
            let col: Vec<Complex64> = (0..n).map(|i| b[(i, j)]).collect();
            let x = self.solve_vec(&col);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Deterministic full-rank test matrix built from modular arithmetic so the
    // construction is exactly reproducible in any language.
    fn fixture(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, n, |j, k| {
            let re = ((7 * j + 3 * k + 1) % 11) as f64 / 11.0 - 0.4;
            let im = ((5 * j + k * k + 2) % 7) as f64 / 7.0 - 0.35;
            c(re, im)
        })
    }

    #[test]
    fn identity_is_multiplicative_unit() {
        let a = fixture(5);
        let i5 = ComplexMatrix::identity(5);
        assert_eq!(a.mul(&i5), a);
        assert_eq!(i5.mul(&a), a);
    }

    #[test]
    fn product_against_hand_computed_two_by_two() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 1.0), c(0.0, 2.0)],
            vec![c(-1.0, 0.0), c(3.0, -1.0)],
        ]);
        let b = ComplexMatrix::from_rows(vec![
            vec![c(2.0, 0.0), c(0.0, 1.0)],
            vec![c(1.0, -1.0), c(0.0, 0.0)],
        ]);
        // (1+i)(2) + (2i)(1-i) = 2+2i + 2i+2 = 4+4i, etc.
        let ab = a.mul(&b);
        assert_eq!(ab[(0, 0)], c(4.0, 4.0));
        assert_eq!(ab[(0, 1)], c(-1.0, 1.0));
        assert_eq!(ab[(1, 0)], c(0.0, -4.0));
        assert_eq!(ab[(1, 1)], c(0.0, -1.0));
    }

    #[test]
    fn adjoint_conjugates_and_transposes() {
        let a = fixture(4);
        let ad = a.adjoint();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(ad[(i, j)], a[(j, i)].conj());
            }
        }
    }

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        let i3 = ComplexMatrix::identity(3);
        assert_eq!(i2.kron(&i3), ComplexMatrix::identity(6));
    }

    #[test]
    fn kron_mixed_product_rule() {
        // (A⊗B)(C⊗D) = (AC)⊗(BD)
        let a = fixture(2);
        let b = fixture(3);
        let ci = ComplexMatrix::from_fn(2, 2, |i, j| c((i + 2 * j) as f64 * 0.3, -0.1));
        let d = ComplexMatrix::from_fn(3, 3, |i, j| c(0.2, (i * 3 + j) as f64 * 0.1));
        let lhs = a.kron(&b).mul(&ci.kron(&d));
        let rhs = a.mul(&ci).kron(&b.mul(&d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-13);
    }

    #[test]
    fn trace_is_linear_and_cyclic() {
        let a = fixture(5);
        let b = fixture(5).adjoint();
        let tr_ab = a.mul(&b).trace();
        let tr_ba = b.mul(&a).trace();
        assert!((tr_ab - tr_ba).norm() < 1e-12);
        let tr_sum = a.add(&b).trace();
        assert!((tr_sum - (a.trace() + b.trace())).norm() < 1e-12);
    }

    #[test]
    fn lu_solve_recovers_known_solution() {
        let a = fixture(6);
        let x_true: Vec<Complex64> = (0..6).map(|i| c(i as f64 * 0.5 - 1.0, 0.3 * i as f64)).collect();
        let b = a.mul_vec(&x_true);
        let f = a.lu().unwrap();
        assert!(!f.is_singular());
        let x = f.solve_vec(&b);
        let err: f64 = x.iter().zip(&x_true).map(|(u, v)| (u - v).norm()).fold(0.0, f64::max);
        assert!(err < 1e-11, "solve error {err}");
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = fixture(6);
        let inv = a.inverse().unwrap().expect("fixture is nonsingular");
        let err = a.mul(&inv).max_abs_diff(&ComplexMatrix::identity(6));
        assert!(err < 1e-11, "inverse error {err}");
    }

    #[test]
    fn singular_matrix_is_detected() {
        // Two identical rows.
        let mut a = fixture(4);
        for j in 0..4 {
            let v = a[(0, j)];
            a[(1, j)] = v;
        }
        let f = a.lu().unwrap();
        assert!(f.is_singular());
        assert_eq!(f.det(), c(0.0, 0.0));
        assert!(a.inverse().unwrap().is_none());
    }

    #[test]
    fn determinant_of_triangular_is_diagonal_product() {
        let mut a = ComplexMatrix::zeros(3, 3);
        a[(0, 0)] = c(2.0, 0.0);
        a[(0, 1)] = c(5.0, -1.0);
        a[(1, 1)] = c(0.0, 3.0);
        a[(1, 2)] = c(1.0, 1.0);
        a[(2, 2)] = c(-1.0, 1.0);
        let expect = c(2.0, 0.0) * c(0.0, 3.0) * c(-1.0, 1.0);
        assert!((a.det().unwrap() - expect).norm() < 1e-14);
    }

    #[test]
    fn norm_one_is_max_column_sum() {
        let a = ComplexMatrix::from_rows(vec![
            vec![c(3.0, 4.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(1.0, 0.0)],
        ]);
        assert_eq!(a.norm_one(), 5.0);
    }

    #[test]
    fn lu_of_rectangular_matrix_errors() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.lu(), Err(crate::Error::NonSquare { .. })));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn prop_mul_associative(seed in 0u64..1000) {
            let m = |s: u64| ComplexMatrix::from_fn(4, 4, |i, j| {
                let h = s.wrapping_mul(6364136223846793005).wrapping_add((i * 7 + j * 13) as u64);
                c(((h % 1000) as f64) / 500.0 - 1.0, (((h / 1000) % 1000) as f64) / 500.0 - 1.0)
            });
            let (a, b, d) = (m(seed), m(seed + 1), m(seed + 2));
            let lhs = a.mul(&b).mul(&d);
            let rhs = a.mul(&b.mul(&d));
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }

        #[test]
        fn prop_adjoint_reverses_products(seed in 0u64..1000) {
            let m = |s: u64| ComplexMatrix::from_fn(3, 3, |i, j| {
                let h = s.wrapping_mul(2862933555777941757).wrapping_add((i * 5 + j * 11) as u64);
                c(((h % 997) as f64) / 500.0 - 1.0, (((h / 997) % 997) as f64) / 500.0 - 1.0)
            });
            let (a, b) = (m(seed), m(seed + 7));
            let lhs = a.mul(&b).adjoint();
            let rhs = b.adjoint().mul(&a.adjoint());
            prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }
}
