//! Dense complex linear algebra used throughout the crate.
//!
//! [`ComplexMatrix`] is a small row-major matrix type. Transfer matrices,
//! submatrices and Gram matrices all live in it. The permutation-sum
//! functions (permanent, determinant, immanant) are in the submodules and
//! re-exported here.

mod immanant;
mod permanent;

pub use immanant::{character, cycle_type, immanant, CharacterCache, Partition, MAX_IMMANANT_DIM};
pub use permanent::{determinant, permanent, MAX_PERMANENT_DIM};

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra as na;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn new(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::EntryCount { expected: rows * cols, got: data.len() });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch { expected: ncols, got: bad.len() });
        }
        Self::new(nrows, ncols, rows.concat())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
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

    /// Side length of a square matrix, or a [`Error::NotSquare`].
    pub fn square_dim(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare { rows: self.rows, cols: self.cols })
        }
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    pub fn try_mul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, got: rhs.rows });
        }
        Ok(Self::from_fn(self.rows, rhs.cols, |r, c| {
            (0..self.cols).map(|k| self[(r, k)] * rhs[(k, c)]).sum()
        }))
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::ShapeMismatch(format!(
                "{}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max))
    }

    /// Selects the given rows and columns, in the order listed.
    pub fn submatrix(&self, row_indices: &[usize], col_indices: &[usize]) -> Result<Self> {
        check_indices(row_indices, self.rows)?;
        check_indices(col_indices, self.cols)?;
        Ok(Self::from_fn(row_indices.len(), col_indices.len(), |r, c| {
            self[(row_indices[r], col_indices[c])]
        }))
    }

    /// Max-norm of `m^† m - 1`. Zero exactly when the matrix is unitary.
    pub fn unitarity_defect(&self) -> Result<f64> {
        let n = self.square_dim()?;
        let mut defect = 0.0_f64;
        for r in 0..n {
            for c in 0..n {
                let mut acc: C64 = (0..n).map(|k| self[(k, r)].conj() * self[(k, c)]).sum();
                if r == c {
                    acc -= 1.0;
                }
                defect = defect.max(acc.norm());
            }
        }
        Ok(defect)
    }

    pub fn to_nalgebra(&self) -> na::DMatrix<C64> {
        na::DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &na::DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

fn check_indices(indices: &[usize], bound: usize) -> Result<()> {
    for (i, &idx) in indices.iter().enumerate() {
        if idx >= bound {
            return Err(Error::IndexOutOfRange { index: idx, bound });
        }
        if indices[..i].contains(&idx) {
            return Err(Error::RepeatedIndex(idx));
        }
    }
    Ok(())
}

/// Free-function form of [`ComplexMatrix::submatrix`].
pub fn submatrix(m: &ComplexMatrix, row_indices: &[usize], col_indices: &[usize]) -> Result<ComplexMatrix> {
    m.submatrix(row_indices, col_indices)
}

/// Free-function form of [`ComplexMatrix::unitarity_defect`].
pub fn unitarity_defect(m: &ComplexMatrix) -> Result<f64> {
    m.unitarity_defect()
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on incompatible shapes; use [`ComplexMatrix::try_mul`] otherwise.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.try_mul(rhs).expect("incompatible matrix shapes")
    }
}

impl fmt::Display for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<String> = self.row(r).iter().map(|z| format!("{:.6}{:+.6}i", z.re, z.im)).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub(crate) fn filter_matrix() -> ComplexMatrix {
        let s = std::f64::consts::SQRT_2;
        ComplexMatrix::from_rows(&[
            vec![c(s, 0.0), c(0.0, s), c(0.0, 0.0)],
            vec![c(0.0, 1.0), c(1.0, 0.0), c(0.0, s)],
            vec![c(-1.0, 0.0), c(0.0, 1.0), c(s, 0.0)],
        ])
        .unwrap()
        .scale(c(0.5, 0.0))
    }

    #[test]
    fn rejects_bad_entry_count_and_nan() {
        assert!(matches!(ComplexMatrix::new(2, 2, vec![c(0.0, 0.0); 3]), Err(Error::EntryCount { .. })));
        assert!(matches!(
            ComplexMatrix::new(1, 1, vec![c(f64::NAN, 0.0)]),
            Err(Error::NonFinite)
        ));
    }

    #[test]
    fn filter_submatrix_outputs_two_three() {
        let sub = filter_matrix().submatrix(&[1, 2], &[0, 1]).unwrap();
        let expected = ComplexMatrix::from_rows(&[vec![c(0.0, 0.5), c(0.5, 0.0)], vec![c(-0.5, 0.0), c(0.0, 0.5)]]).unwrap();
        assert!(sub.max_abs_diff(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn submatrix_full_and_single() {
        let m = filter_matrix();
        assert_eq!(m.submatrix(&[0, 1, 2], &[0, 1, 2]).unwrap(), m);
        let one = m.submatrix(&[2], &[0]).unwrap();
        assert_eq!((one.rows(), one.cols()), (1, 1));
        assert_eq!(one[(0, 0)], c(-0.5, 0.0));
    }

    #[test]
    fn submatrix_index_errors() {
        let m = filter_matrix();
        assert!(matches!(m.submatrix(&[3], &[0]), Err(Error::IndexOutOfRange { index: 3, bound: 3 })));
        assert!(matches!(m.submatrix(&[0, 0], &[0, 1]), Err(Error::RepeatedIndex(0))));
    }

    #[test]
    fn unitarity_defect_examples() {
        assert!(filter_matrix().unitarity_defect().unwrap() <= 1e-12);
        assert_eq!(ComplexMatrix::identity(4).unitarity_defect().unwrap(), 0.0);
        let d = ComplexMatrix::from_rows(&[vec![c(2.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert_eq!(d.unitarity_defect().unwrap(), 3.0);
        assert!(matches!(ComplexMatrix::zeros(2, 3).unitarity_defect(), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn nalgebra_round_trip_keeps_layout() {
        let m = filter_matrix();
        assert_eq!(ComplexMatrix::from_nalgebra(&m.to_nalgebra()), m);
    }
}
