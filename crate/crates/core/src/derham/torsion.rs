//! Étale, multiplicative and local-local parts of a mod-p Dieudonne module,
//! and the orders of the J-torsion subgroup schemes.

use std::fmt;
use std::str::FromStr;

use crate::error::CohomologyError;
use crate::field::FieldDesc;
use crate::matrix::Matrix;
use crate::semilinear::SemilinearMap;

use super::ModPDieudonne;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    F,
    V,
}

/// An ideal of `Z_p[[F, V]]` containing `p`, generated by words in F and V.
/// No words means the ideal `(p)` itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JIdeal {
    words: Vec<Vec<Letter>>,
}

impl JIdeal {
    /// The ideal `(p)`.
    pub fn p() -> Self {
        JIdeal { words: Vec::new() }
    }

    pub fn new(words: Vec<Vec<Letter>>) -> Result<Self, CohomologyError> {
        if words.is_empty() || words.iter().any(Vec::is_empty) {
            return Err(CohomologyError::EmptyIdeal);
        }
        Ok(JIdeal { words })
    }

    pub fn words(&self) -> &[Vec<Letter>] {
        &self.words
    }
}

impl FromStr for JIdeal {
    type Err = CohomologyError;

    /// `"p"`, or comma-separated words such as `"F,V"` or `"F^2,V"` or `"FV"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "p" || s == "(p)" {
            return Ok(JIdeal::p());
        }
        let mut words = Vec::new();
        for w in s.split(',') {
            let mut word = Vec::new();
            let chars: Vec<char> = w.trim().chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let l = match chars[i] {
                    'F' => Letter::F,
                    'V' => Letter::V,
                    _ => return Err(CohomologyError::EmptyIdeal),
                };
                i += 1;
                let mut k = 1;
                if i < chars.len() && chars[i] == '^' {
                    let start = i + 1;
                    let mut end = start;
                    while end < chars.len() && chars[end].is_ascii_digit() {
                        end += 1;
                    }
                    k = chars[start..end].iter().collect::<String>().parse().map_err(|_| CohomologyError::EmptyIdeal)?;
                    i = end;
                }
                word.extend(std::iter::repeat_n(l, k));
            }
            words.push(word);
        }
        JIdeal::new(words)
    }
}

impl fmt::Display for JIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return write!(f, "(p)");
        }
        let ws: Vec<String> = self
            .words
            .iter()
            .map(|w| w.iter().map(|l| if *l == Letter::F { 'F' } else { 'V' }).collect())
            .collect();
        write!(f, "({})", ws.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Etale,
    Multiplicative,
    LocalLocal,
    All,
}

impl FromStr for Part {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "et" | "etale" => Ok(Part::Etale),
            "mult" | "multiplicative" => Ok(Part::Multiplicative),
            "ll" => Ok(Part::LocalLocal),
            "all" => Ok(Part::All),
            _ => Err(format!("unknown part `{s}`")),
        }
    }
}

/// Bases (as column matrices) of the three functorial parts.
#[derive(Clone, Debug)]
pub struct Parts {
    pub etale: Matrix,
    pub multiplicative: Matrix,
    pub local_local: Matrix,
}

impl Parts {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.etale.cols(), self.multiplicative.cols(), self.local_local.cols())
    }
}

/// Stable image of a semilinear map.
pub fn stable_image(f: &FieldDesc, a: &SemilinearMap) -> Matrix {
    let n = a.dim();
    a.power(f, n.max(1)).image(f)
}

/// Stable kernel of a semilinear map.
pub fn stable_kernel(f: &FieldDesc, a: &SemilinearMap) -> Matrix {
    let n = a.dim();
    a.power(f, n.max(1)).kernel(f)
}

/// Intersection of two column spaces.
pub fn intersect(f: &FieldDesc, a: &Matrix, b: &Matrix) -> Matrix {
    if a.cols() == 0 || b.cols() == 0 {
        return Matrix::zeros(a.rows(), 0);
    }
    let stacked = a.hstack(&b.scale(f, f.neg(crate::field::Fq::ONE)));
    let ns = stacked.nullspace(f);
    let coeffs = ns.block(0, a.cols(), 0, ns.cols());
    a.mul(f, &coeffs).column_basis(f)
}

/// F-bijective (étale), V-bijective (multiplicative) and F,V-nilpotent parts.
pub fn decompose_parts(d: &ModPDieudonne) -> Parts {
    let f = &d.field;
    let etale = stable_image(f, &d.frobenius);
    let multiplicative = stable_image(f, &d.verschiebung);
    let local_local =
        intersect(f, &stable_kernel(f, &d.frobenius), &stable_kernel(f, &d.verschiebung));
    Parts { etale, multiplicative, local_local }
}

/// The semilinear map of a word, letters applied right to left.
pub fn word_map(d: &ModPDieudonne, word: &[Letter]) -> SemilinearMap {
    let f = &d.field;
    let mut acc = SemilinearMap::identity(d.dim());
    for l in word {
        let m = match l {
            Letter::F => &d.frobenius,
            Letter::V => &d.verschiebung,
        };
        acc = acc.compose(f, m).expect("square");
    }
    acc
}

/// `log_q |G[J]|` on the selected part: `dim P - dim(sum_w w(P))`.
pub fn torsion_order(d: &ModPDieudonne, j: &JIdeal, part: Part) -> usize {
    let f = &d.field;
    let basis = match part {
        Part::All => Matrix::identity(d.dim()),
        _ => {
            let parts = decompose_parts(d);
            match part {
                Part::Etale => parts.etale,
                Part::Multiplicative => parts.multiplicative,
                _ => parts.local_local,
            }
        }
    };
    let dim = basis.cols();
    if dim == 0 || j.words().is_empty() {
        return dim;
    }
    let mut images = Matrix::zeros(d.dim(), 0);
    for w in j.words() {
        images = images.hstack(&word_map(d, w).apply_matrix(f, &basis));
    }
    dim - images.rank(f)
}
