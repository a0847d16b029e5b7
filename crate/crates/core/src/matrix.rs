//! Dense matrices over F_q with Gaussian elimination.

use crate::error::AlgebraError;
use crate::field::{FieldDesc, Fq};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Fq>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![Fq::ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Fq::ONE);
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Fq>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend(row);
        }
        Matrix { rows: r, cols: c, data }
    }

    /// Builds a matrix from column vectors of length `rows`.
    pub fn from_cols(rows: usize, cols: &[Vec<Fq>]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), rows, "column length");
            for (i, &a) in col.iter().enumerate() {
                m.set(i, j, a);
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

    pub fn get(&self, i: usize, j: usize) -> Fq {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, a: Fq) {
        self.data[i * self.cols + j] = a;
    }

    pub fn row(&self, i: usize) -> &[Fq] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<Fq> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, f: &FieldDesc, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.rows, "matrix product dimensions");
        let mut out = Matrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] = f.add(out.data[idx], f.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn try_mul(&self, f: &FieldDesc, o: &Matrix) -> Result<Matrix, AlgebraError> {
        if self.cols != o.rows {
            return Err(AlgebraError::DimensionMismatch(format!(
                "{}x{} * {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        Ok(self.mul(f, o))
    }

    pub fn mul_vec(&self, f: &FieldDesc, v: &[Fq]) -> Vec<Fq> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Fq::ZERO, |acc, (&a, &b)| f.add(acc, f.mul(a, b)))
            })
            .collect()
    }

    pub fn add(&self, f: &FieldDesc, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.add(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, f: &FieldDesc, o: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        let data = self.data.iter().zip(&o.data).map(|(&a, &b)| f.sub(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, f: &FieldDesc, a: Fq) -> Matrix {
        let data = self.data.iter().map(|&b| f.mul(a, b)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    /// Entrywise `sigma^s`.
    pub fn frobenius(&self, f: &FieldDesc, s: i64) -> Matrix {
        if s.rem_euclid(f.r() as i64) == 0 {
            return self.clone();
        }
        let data = self.data.iter().map(|&a| f.frobenius(a, s)).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn pow(&self, f: &FieldDesc, mut e: u64) -> Matrix {
        assert!(self.is_square());
        let mut base = self.clone();
        let mut acc = Matrix::identity(self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base);
            }
        }
        acc
    }

    pub fn hstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.rows, o.rows);
        let mut m = Matrix::zeros(self.rows, self.cols + o.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(i, j, self.get(i, j));
            }
            for j in 0..o.cols {
                m.set(i, self.cols + j, o.get(i, j));
            }
        }
        m
    }

    pub fn vstack(&self, o: &Matrix) -> Matrix {
        assert_eq!(self.cols, o.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&o.data);
        Matrix { rows: self.rows + o.rows, cols: self.cols, data }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Matrix {
        let cols: Vec<Vec<Fq>> = idx.iter().map(|&j| self.col(j)).collect();
        Matrix::from_cols(self.rows, &cols)
    }

    pub fn select_rows(&self, idx: &[usize]) -> Matrix {
        Matrix::from_rows(idx.iter().map(|&i| self.row(i).to_vec()).collect())
    }

    /// Sub-block `rows r0..r1`, `cols c0..c1`.
    pub fn block(&self, r0: usize, r1: usize, c0: usize, c1: usize) -> Matrix {
        let mut m = Matrix::zeros(r1 - r0, c1 - c0);
        for i in r0..r1 {
            for j in c0..c1 {
                m.set(i - r0, j - c0, self.get(i, j));
            }
        }
        m
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self, f: &FieldDesc) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(piv) = (row..m.rows).find(|&i| !m.get(i, col).is_zero()) else {
                continue;
            };
            if piv != row {
                for j in 0..m.cols {
                    m.data.swap(piv * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col)).expect("pivot nonzero");
            for j in col..m.cols {
                let v = f.mul(m.get(row, j), inv);
                m.set(row, j, v);
            }
            for i in 0..m.rows {
                if i == row {
                    continue;
                }
                let factor = m.get(i, col);
                if factor.is_zero() {
                    continue;
                }
                for j in col..m.cols {
                    let v = f.sub(m.get(i, j), f.mul(factor, m.get(row, j)));
                    m.set(i, j, v);
                }
            }
            pivots.push(col);
            row += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, f: &FieldDesc) -> usize {
        self.rref(f).1.len()
    }

    /// Basis of `{v : self v = 0}` as the columns of the result.
    pub fn nullspace(&self, f: &FieldDesc) -> Matrix {
        let (r, pivots) = self.rref(f);
        let free: Vec<usize> = (0..self.cols).filter(|j| !pivots.contains(j)).collect();
        let mut basis = Matrix::zeros(self.cols, free.len());
        for (k, &fj) in free.iter().enumerate() {
            basis.set(fj, k, Fq::ONE);
            for (i, &pj) in pivots.iter().enumerate() {
                basis.set(pj, k, f.neg(r.get(i, fj)));
            }
        }
        basis
    }

    /// A basis of the column space, taken from the columns of `self`.
    pub fn column_basis(&self, f: &FieldDesc) -> Matrix {
        let (_, pivots) = self.rref(f);
        self.select_cols(&pivots)
    }

    /// Some solution of `self x = b`, if one exists.
    pub fn solve(&self, f: &FieldDesc, b: &[Fq]) -> Option<Vec<Fq>> {
        assert_eq!(b.len(), self.rows);
        let aug = self.hstack(&Matrix::from_cols(self.rows, &[b.to_vec()]));
        let (r, pivots) = aug.rref(f);
        if pivots.last() == Some(&self.cols) {
            return None;
        }
        let mut x = vec![Fq::ZERO; self.cols];
        for (i, &pj) in pivots.iter().enumerate() {
            x[pj] = r.get(i, self.cols);
        }
        Some(x)
    }

    /// Solves `self X = B` column by column.
    pub fn solve_matrix(&self, f: &FieldDesc, b: &Matrix) -> Option<Matrix> {
        let cols: Option<Vec<Vec<Fq>>> = (0..b.cols).map(|j| self.solve(f, &b.col(j))).collect();
        Some(Matrix::from_cols(self.cols, &cols?))
    }

    pub fn inverse(&self, f: &FieldDesc) -> Result<Matrix, AlgebraError> {
        if !self.is_square() {
            return Err(AlgebraError::DimensionMismatch("inverse of non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Matrix::zeros(0, 0));
        }
        let (r, pivots) = self.hstack(&Matrix::identity(n)).rref(f);
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(AlgebraError::Singular);
        }
        Ok(r.block(0, n, n, 2 * n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_make;

    #[test]
    fn rank_nullspace_inverse() {
        let f = field_make(3, 1, None).unwrap();
        let m = Matrix::from_rows(vec![
            vec![Fq(1), Fq(2), Fq(0)],
            vec![Fq(2), Fq(1), Fq(0)],
            vec![Fq(0), Fq(0), Fq(1)],
        ]);
        assert_eq!(m.rank(&f), 2);
        let n = m.nullspace(&f);
        assert_eq!(n.cols(), 1);
        assert!(m.mul(&f, &n).is_zero());
        assert!(matches!(m.inverse(&f), Err(AlgebraError::Singular)));
        let a = Matrix::from_rows(vec![vec![Fq(1), Fq(1)], vec![Fq(0), Fq(2)]]);
        let ai = a.inverse(&f).unwrap();
        assert_eq!(a.mul(&f, &ai), Matrix::identity(2));
        let x = a.solve(&f, &[Fq(2), Fq(1)]).unwrap();
        assert_eq!(a.mul_vec(&f, &x), vec![Fq(2), Fq(1)]);
    }
}
