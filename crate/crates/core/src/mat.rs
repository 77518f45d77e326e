//! Small dense complex matrices.
//!
//! Column-major storage so that detector kernels can borrow whole channel
//! columns as slices. Only the handful of operations the crate needs are
//! implemented; this is not a general linear-algebra layer.

use num_complex::Complex64;

/// Dense complex matrix in column-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    nrows: usize,
    ncols: usize,
    data: Vec<Complex64>,
}

impl CMat {
    /// All-zero matrix of the given shape.
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        CMat {
            nrows,
            ncols,
            data: vec![Complex64::new(0.0, 0.0); nrows * ncols],
        }
    }

    /// Build entry-wise from `f(row, col)`.
    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        nrows: usize,
        ncols: usize,
        mut f: F,
    ) -> Self {
        let mut m = CMat::zeros(nrows, ncols);
        for j in 0..ncols {
            for i in 0..nrows {
                m.data[j * nrows + i] = f(i, j);
            }
        }
        m
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Borrow column `j` as a slice of length `nrows`.
    #[inline]
    pub fn col(&self, j: usize) -> &[Complex64] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[j * self.nrows + i] = v;
    }

    /// Determinant by LU factorisation with partial pivoting.
    ///
    /// Consumes the matrix; it is used as a numeric cross-check, not in any
    /// hot path. Panics if the matrix is not square.
    pub fn determinant(mut self) -> Complex64 {
        assert_eq!(self.nrows, self.ncols, "determinant needs a square matrix");
        let n = self.nrows;
        let mut det = Complex64::new(1.0, 0.0);
        for col in 0..n {
            let mut pivot_row = col;
            let mut pivot_mag = self.at(col, col).norm_sqr();
            for row in col + 1..n {
                let mag = self.at(row, col).norm_sqr();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = row;
                }
            }
            if pivot_mag == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            if pivot_row != col {
                self.swap_rows(col, pivot_row);
                det = -det;
            }
            let pivot = self.at(col, col);
            det *= pivot;
            for row in col + 1..n {
                let factor = self.at(row, col) / pivot;
                for j in col..n {
                    let v = self.at(row, j) - factor * self.at(col, j);
                    self.set(row, j, v);
                }
            }
        }
        det
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.ncols {
            self.data.swap(j * self.nrows + a, j * self.nrows + b);
        }
    }
}
