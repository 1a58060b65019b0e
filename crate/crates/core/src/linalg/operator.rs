use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// A dense complex matrix standing for a linear map between finite dimensional
/// Hilbert spaces.
///
/// An operator `X -> Y` acts on column vectors, so it has `dim Y` rows and
/// `dim X` columns. Zero-dimensional spaces are allowed on either side.
#[derive(Clone, PartialEq)]
pub struct Operator {
    m: DMatrix<Complex64>,
}

impl Operator {
    /// Wraps a matrix, rejecting NaN or infinite entries.
    pub fn from_matrix(m: DMatrix<Complex64>) -> Result<Self> {
        for j in 0..m.ncols() {
            for i in 0..m.nrows() {
                let z = m[(i, j)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: i, col: j });
                }
            }
        }
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<Complex64>) -> Self {
        Self { m }
    }

    /// Builds an operator from row-major entries.
    pub fn from_rows(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::EntryCount {
                rows,
                cols,
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Self::from_matrix(DMatrix::from_row_slice(rows, cols, &entries))
    }

    /// Real-valued operator from nested rows. Panics on ragged input.
    pub fn real<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = DMatrix::zeros(nrows, ncols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            assert_eq!(row.len(), ncols, "ragged rows");
            for (j, &x) in row.iter().enumerate() {
                m[(i, j)] = Complex64::new(x, 0.0);
            }
        }
        Self { m }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            m: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            m: DMatrix::zeros(rows, cols),
        }
    }

    /// The 1x1 operator `[[c]]`, an endomorphism of the unit space.
    pub fn scalar(c: Complex64) -> Self {
        Self {
            m: DMatrix::from_element(1, 1, c),
        }
    }

    /// Permutation operator sending basis vector `j` to basis vector `map[j]`.
    pub fn permutation(map: &[usize]) -> Result<Self> {
        check_permutation(map)?;
        let n = map.len();
        let mut m = DMatrix::zeros(n, n);
        for (j, &i) in map.iter().enumerate() {
            m[(i, j)] = Complex64::new(1.0, 0.0);
        }
        Ok(Self { m })
    }

    pub fn rows(&self) -> usize {
        self.m.nrows()
    }

    pub fn cols(&self) -> usize {
        self.m.ncols()
    }

    pub fn shape(&self) -> (usize, usize) {
        self.m.shape()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.m
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.m[(i, j)]);
            }
        }
        out
    }

    /// Largest entry modulus (0 for an empty operator).
    pub fn max_abs(&self) -> f64 {
        self.m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    /// Max-norm of the entrywise difference; infinite when shapes differ.
    pub fn max_diff(&self, other: &Operator) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.m
            .iter()
            .zip(other.m.iter())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn scale(&self, c: Complex64) -> Operator {
        Self { m: &self.m * c }
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other, "add")?;
        Ok(Self {
            m: &self.m + &other.m,
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.same_shape(other, "sub")?;
        Ok(Self {
            m: &self.m - &other.m,
        })
    }

    /// Conventional matrix product `self · rhs` (apply `rhs` first).
    pub fn matmul(&self, rhs: &Operator) -> Result<Operator> {
        if self.cols() != rhs.rows() {
            return Err(Error::Shape {
                context: "matrix product",
                left: self.shape(),
                right: rhs.shape(),
            });
        }
        Ok(Self {
            m: product(&self.m, &rhs.m),
        })
    }

    /// Copy of the block with rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> Operator {
        Self {
            m: self.m.view((r0, c0), (nr, nc)).into_owned(),
        }
    }

    /// Relabels basis vectors: entry `(i, j)` moves to `(row_map[i], col_map[j])`.
    ///
    /// Equivalent to `P_row · self · P_colᵀ` for the permutation operators of
    /// the two maps, without materializing them.
    pub fn relabel(&self, row_map: &[usize], col_map: &[usize]) -> Result<Operator> {
        if row_map.len() != self.rows() || col_map.len() != self.cols() {
            return Err(Error::Shape {
                context: "relabel",
                left: self.shape(),
                right: (row_map.len(), col_map.len()),
            });
        }
        check_permutation(row_map)?;
        check_permutation(col_map)?;
        let mut m = DMatrix::zeros(self.rows(), self.cols());
        for (j, &jj) in col_map.iter().enumerate() {
            for (i, &ii) in row_map.iter().enumerate() {
                m[(ii, jj)] = self.m[(i, j)];
            }
        }
        Ok(Self { m })
    }

    /// Fraction of entries that are exactly nonzero.
    pub fn density(&self) -> f64 {
        let total = self.rows() * self.cols();
        if total == 0 {
            return 0.0;
        }
        let nnz = self.m.iter().filter(|z| !is_zero(**z)).count();
        nnz as f64 / total as f64
    }

    fn same_shape(&self, other: &Operator, context: &'static str) -> Result<()> {
        if self.shape() != other.shape() {
            return Err(Error::Shape {
                context,
                left: self.shape(),
                right: other.shape(),
            });
        }
        Ok(())
    }
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Operator {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            write!(f, "  ")?;
            for j in 0..self.cols() {
                let z = self.m[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

#[inline]
pub(crate) fn is_zero(z: Complex64) -> bool {
    z.re == 0.0 && z.im == 0.0
}

pub(crate) fn check_permutation(map: &[usize]) -> Result<()> {
    let mut seen = vec![false; map.len()];
    for &i in map {
        if i >= map.len() || seen[i] {
            return Err(Error::Invalid(format!("not a permutation: {map:?}")));
        }
        seen[i] = true;
    }
    Ok(())
}

/// Matrix product that skips exact zeros when that is cheaper than the dense
/// kernel. Transition operators of classical cells are permutations, and the
/// structural operators are all sparse.
pub(crate) fn product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (m, k) = a.shape();
    let n = b.ncols();
    if m == 0 || n == 0 || k == 0 {
        return DMatrix::zeros(m, n);
    }
    let mut a_cols: Vec<Vec<(usize, Complex64)>> = Vec::with_capacity(k);
    for c in 0..k {
        let col: Vec<_> = a
            .column(c)
            .iter()
            .enumerate()
            .filter(|(_, z)| !is_zero(**z))
            .map(|(i, z)| (i, *z))
            .collect();
        a_cols.push(col);
    }
    let mut b_row_nnz = vec![0usize; k];
    for j in 0..n {
        for (kk, z) in b.column(j).iter().enumerate() {
            if !is_zero(*z) {
                b_row_nnz[kk] += 1;
            }
        }
    }
    let sparse_cost: usize = a_cols
        .iter()
        .zip(&b_row_nnz)
        .map(|(col, nb)| col.len() * nb)
        .sum();
    let dense_cost = m * k * n;
    if sparse_cost.saturating_mul(4) >= dense_cost {
        return a * b;
    }
    let mut out = DMatrix::zeros(m, n);
    for j in 0..n {
        for kk in 0..k {
            let bv = b[(kk, j)];
            if is_zero(bv) {
                continue;
            }
            let mut col = out.column_mut(j);
            for &(i, av) in &a_cols[kk] {
                col[i] += av * bv;
            }
        }
    }
    out
}
