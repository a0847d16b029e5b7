//! sigma-semilinear maps `v -> M sigma^s(v)` on F_q^n.

use crate::error::AlgebraError;
use crate::field::{FieldDesc, Fq};
use crate::matrix::Matrix;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct SemilinearMap {
    pub matrix: Matrix,
    pub twist: i64,
}

/// Which scalar field `linearize` should present the map over.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Model {
    /// The F_q-matrix; requires twist divisible by r.
    FieldLinear,
    /// The nr x nr matrix over F_p in the basis `g^k e_j`.
    PrimeField,
}

impl SemilinearMap {
    pub fn new(matrix: Matrix, twist: i64) -> Self {
        assert!(matrix.is_square(), "semilinear maps are square");
        SemilinearMap { matrix, twist }
    }

    pub fn zero(n: usize, twist: i64) -> Self {
        Self::new(Matrix::zeros(n, n), twist)
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n), 0)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, f: &FieldDesc, v: &[Fq]) -> Vec<Fq> {
        let tw: Vec<Fq> = v.iter().map(|&a| f.frobenius(a, self.twist)).collect();
        self.matrix.mul_vec(f, &tw)
    }

    /// `self o other`.
    pub fn compose(&self, f: &FieldDesc, other: &SemilinearMap) -> Result<Self, AlgebraError> {
        let m = self.matrix.try_mul(f, &other.matrix.frobenius(f, self.twist))?;
        Ok(SemilinearMap { matrix: m, twist: self.twist + other.twist })
    }

    /// `self` applied to the columns of `b` (a subspace basis or a general
    /// matrix): `M sigma^s(b)`.
    pub fn apply_matrix(&self, f: &FieldDesc, b: &Matrix) -> Matrix {
        self.matrix.mul(f, &b.frobenius(f, self.twist))
    }

    pub fn power(&self, f: &FieldDesc, k: usize) -> SemilinearMap {
        let mut acc = SemilinearMap::identity(self.dim());
        for _ in 0..k {
            acc = self.compose(f, &acc).expect("square");
        }
        acc
    }

    pub fn rank(&self, f: &FieldDesc) -> usize {
        self.matrix.rank(f)
    }

    /// Kernel basis: `sigma^{-s}` of the nullspace of `M`.
    pub fn kernel(&self, f: &FieldDesc) -> Matrix {
        self.matrix.nullspace(f).frobenius(f, -self.twist)
    }

    /// Image basis (the column space of `M`).
    pub fn image(&self, f: &FieldDesc) -> Matrix {
        self.matrix.column_basis(f)
    }

    /// Rank of the n-fold self-composite.
    pub fn stable_rank(&self, f: &FieldDesc) -> usize {
        let n = self.dim();
        let mut acc = self.clone();
        let mut prev = acc.rank(f);
        for _ in 1..n.max(1) {
            if prev == 0 {
                break;
            }
            acc = self.compose(f, &acc).expect("square");
            let r = acc.rank(f);
            if r == prev {
                break;
            }
            prev = r;
        }
        prev
    }

    pub fn linearize(&self, f: &FieldDesc, model: Model) -> Result<Matrix, AlgebraError> {
        match model {
            Model::FieldLinear => {
                if self.twist.rem_euclid(f.r() as i64) != 0 {
                    return Err(AlgebraError::TwistNotLinearizable { twist: self.twist, r: f.r() });
                }
                Ok(self.matrix.clone())
            }
            Model::PrimeField => {
                let n = self.dim();
                let r = f.r() as usize;
                let g = f.generator();
                let mut out = Matrix::zeros(n * r, n * r);
                for j in 0..n {
                    for k in 0..r {
                        let scalar = f.frobenius(f.pow(g, k as u64), self.twist);
                        for i in 0..n {
                            let v = f.mul(self.matrix.get(i, j), scalar);
                            for (d, &c) in f.digits(v).iter().enumerate() {
                                out.set(i * r + d, j * r + k, Fq(c));
                            }
                        }
                    }
                }
                Ok(out)
            }
        }
    }

    /// `dim coker(L)` or `dim coker(1 - L)` where `L` is the F_q-linear
    /// `compositions`-fold composite (default `r`).
    pub fn coker_dim(
        &self,
        f: &FieldDesc,
        one_minus: bool,
        compositions: Option<usize>,
    ) -> Result<usize, AlgebraError> {
        let k = compositions.unwrap_or(f.r() as usize);
        let total = self.twist * k as i64;
        if total.rem_euclid(f.r() as i64) != 0 {
            return Err(AlgebraError::TwistNotLinearizable { twist: total, r: f.r() });
        }
        let l = self.power(f, k).linearize(f, Model::FieldLinear)?;
        let n = self.dim();
        let m = if one_minus { Matrix::identity(n).sub(f, &l) } else { l };
        Ok(n - m.rank(f))
    }
}

/// Coordinates of `v` over F_p in the basis `g^k e_j` (index `j r + k`);
/// since `g` is the class of `x`, these are the packed digits.
pub fn prime_coordinates(f: &FieldDesc, v: &[Fq]) -> Vec<Fq> {
    v.iter().flat_map(|&a| f.digits(a).into_iter().map(Fq)).collect()
}
