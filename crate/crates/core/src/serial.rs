//! JSON forms of field elements, (semi)linear matrices and mod-p Dieudonne
//! modules. Elements are coefficient vectors over F_p in the power basis of
//! the field generator; matrices are row-major.

use serde::{Deserialize, Serialize};

use crate::derham::ModPDieudonne;
use crate::error::AlgebraError;
use crate::field::FieldDesc;
use crate::matrix::Matrix;
use crate::semilinear::SemilinearMap;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub p: u32,
    pub r: u32,
    pub modulus: Vec<u32>,
    pub twist: i64,
    pub rows: Vec<Vec<Vec<u32>>>,
}

impl MatrixJson {
    pub fn new(f: &FieldDesc, m: &Matrix, twist: i64) -> Self {
        MatrixJson {
            p: f.p(),
            r: f.r(),
            modulus: f.modulus().to_vec(),
            twist,
            rows: (0..m.rows()).map(|i| m.row(i).iter().map(|&a| f.digits(a)).collect()).collect(),
        }
    }

    pub fn from_map(f: &FieldDesc, a: &SemilinearMap) -> Self {
        Self::new(f, &a.matrix, a.twist)
    }

    /// Rebuilds the field and the map; rejects digit vectors of the wrong
    /// length, digits `>= p`, and ragged rows.
    pub fn to_map(&self) -> Result<(FieldDesc, SemilinearMap), AlgebraError> {
        let f = FieldDesc::new(self.p, self.r, Some(&self.modulus))?;
        let cols = self.rows.first().map_or(0, Vec::len);
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            if row.len() != cols {
                return Err(AlgebraError::Malformed("ragged rows".into()));
            }
            let mut out = Vec::with_capacity(cols);
            for d in row {
                if d.len() != self.r as usize || d.iter().any(|&c| c >= self.p) {
                    return Err(AlgebraError::Malformed(format!("bad element {d:?}")));
                }
                out.push(f.from_digits(d));
            }
            rows.push(out);
        }
        let m = if rows.is_empty() { Matrix::zeros(0, 0) } else { Matrix::from_rows(rows) };
        Ok((f, SemilinearMap::new(m, self.twist)))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DieudonneJson {
    pub p: u32,
    pub r: u32,
    pub g: usize,
    pub hodge_indices: Vec<usize>,
    #[serde(rename = "F")]
    pub f: MatrixJson,
    #[serde(rename = "V")]
    pub v: MatrixJson,
    pub gram: MatrixJson,
}

impl DieudonneJson {
    pub fn new(d: &ModPDieudonne) -> Self {
        let f = &d.field;
        DieudonneJson {
            p: f.p(),
            r: f.r(),
            g: d.g,
            hodge_indices: d.hodge.clone(),
            f: MatrixJson::from_map(f, &d.frobenius),
            v: MatrixJson::from_map(f, &d.verschiebung),
            gram: MatrixJson::new(f, &d.gram, 0),
        }
    }

    pub fn to_module(&self) -> Result<ModPDieudonne, AlgebraError> {
        let (field, frobenius) = self.f.to_map()?;
        let (_, verschiebung) = self.v.to_map()?;
        let (_, gram) = self.gram.to_map()?;
        let n = 2 * self.g;
        for m in [&frobenius.matrix, &verschiebung.matrix, &gram.matrix] {
            if m.rows() != n || m.cols() != n {
                return Err(AlgebraError::Malformed(format!("expected {n}x{n} matrices")));
            }
        }
        Ok(ModPDieudonne { field, g: self.g, frobenius, verschiebung, hodge: self.hodge_indices.clone(), gram: gram.matrix })
    }
}
