//! Spaces of functions and differentials with prescribed poles, presented
//! monomial by monomial: the coefficient of `y^b` ranges over
//! `base_b * x^j` with `j` in a window cut out by the conditions at 0 and
//! infinity.

use std::collections::HashMap;

use crate::curve::{CurveModel, Elem};
use crate::error::CohomologyError;
use crate::field::{FieldDesc, Fq};
use crate::ratfunc::{Place, RatFunc};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Function,
    /// Differentials `h dx`, represented by `h`.
    Differential,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slot {
    pub base: RatFunc,
    /// Least exponent of `x` allowed by the condition above 0.
    pub lo: i64,
    /// Largest exponent of `x` allowed by the condition above infinity.
    pub hi: i64,
}

/// Per-monomial windows of a divisor condition `v >= -m_Q` above each point.
#[derive(Clone, Debug)]
pub struct SlotSpace {
    pub kind: Kind,
    pub slots: Vec<Slot>,
}

impl SlotSpace {
    /// Conditions are `m_Q = 1` on the points of `modulus` and 0 elsewhere.
    pub fn new(model: &CurveModel, kind: Kind, modulus: &[Place]) -> SlotSpace {
        let f = model.field();
        let p = model.p();
        let mut places: Vec<Place> = model.places.iter().map(|d| d.place.clone()).collect();
        for q in modulus {
            if !places.contains(q) {
                places.push(q.clone());
            }
        }
        places.sort();
        let views: Vec<_> = places.iter().map(|q| model.local_view(q)).collect();
        let slots = (0..model.dim())
            .map(|idx| {
                let mut base = RatFunc::one();
                let (mut c0, mut cinf) = (0, 0);
                for (q, v) in places.iter().zip(&views) {
                    let m = i64::from(modulus.contains(q));
                    let c = match kind {
                        Kind::Function => v.bound(p, idx, -m),
                        Kind::Differential => {
                            let dx = if *q == Place::Infinity { -2 } else { 0 };
                            v.bound(p, idx, -m - v.delta) - dx
                        }
                    };
                    match q {
                        Place::Infinity => cinf = c,
                        q if q.is_zero_point() => c0 = c,
                        Place::Finite(pi) => {
                            base = base.mul(f, &RatFunc::from_poly(pi.clone()).pow(f, c));
                        }
                    }
                }
                let hi = base.valuation(f, &Place::Infinity).unwrap() - cinf;
                Slot { base, lo: c0, hi }
            })
            .collect();
        SlotSpace { kind, slots }
    }

    /// Elements of the global space: `(idx, j)` with `lo <= j <= hi`.
    pub fn global_monomials(&self) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for (idx, s) in self.slots.iter().enumerate() {
            for j in s.lo..=s.hi {
                out.push((idx, j));
            }
        }
        out
    }

    /// The complement of the two chart spaces: `(idx, j)` with `hi < j < lo`.
    pub fn gap_monomials(&self) -> Vec<(usize, i64)> {
        let mut out = Vec::new();
        for (idx, s) in self.slots.iter().enumerate() {
            for j in s.hi + 1..s.lo {
                out.push((idx, j));
            }
        }
        out
    }

    pub fn element(&self, f: &FieldDesc, idx: usize, j: i64) -> Elem {
        let mut v = vec![RatFunc::zero(); self.slots.len()];
        v[idx] = self.slots[idx].base.mul(f, &RatFunc::monomial(Fq::ONE, j));
        v
    }

    /// Laurent coefficients of `z_b / base_b` for every monomial.
    pub fn expand(&self, f: &FieldDesc, z: &Elem) -> Result<Vec<Vec<(i64, Fq)>>, CohomologyError> {
        z.iter()
            .zip(&self.slots)
            .enumerate()
            .map(|(idx, (h, s))| {
                if h.is_zero() {
                    return Ok(Vec::new());
                }
                let q = h.div(f, &s.base).expect("nonzero base");
                q.laurent_terms().ok_or_else(|| {
                    CohomologyError::BasisNotClosed(format!(
                        "coefficient of monomial {idx} has poles away from the charts"
                    ))
                })
            })
            .collect()
    }

    /// Splits `z` on the double chart as `z1 + z2 + gap` with `z1` regular
    /// above 0 (`j >= lo`), `z2` regular above infinity (`j <= hi`, and not
    /// already in `z1`) and the gap part given by coefficients.
    pub fn split(&self, f: &FieldDesc, z: &Elem) -> Result<Split, CohomologyError> {
        let terms = self.expand(f, z)?;
        let n = self.slots.len();
        let mut z1 = vec![RatFunc::zero(); n];
        let mut z2 = vec![RatFunc::zero(); n];
        let mut gap = Vec::new();
        for (idx, (ts, s)) in terms.iter().zip(&self.slots).enumerate() {
            let (mut a1, mut a2) = (Vec::new(), Vec::new());
            for &(j, c) in ts {
                if j >= s.lo {
                    a1.push((j, c));
                } else if j <= s.hi {
                    a2.push((j, c));
                } else {
                    gap.push(((idx, j), c));
                }
            }
            z1[idx] = s.base.mul(f, &laurent(f, &a1));
            z2[idx] = s.base.mul(f, &laurent(f, &a2));
        }
        Ok(Split { z1, z2, gap })
    }
}

pub struct Split {
    pub z1: Elem,
    pub z2: Elem,
    pub gap: Vec<((usize, i64), Fq)>,
}

pub fn laurent(f: &FieldDesc, terms: &[(i64, Fq)]) -> RatFunc {
    terms.iter().fold(RatFunc::zero(), |acc, &(j, c)| acc.add(f, &RatFunc::monomial(c, j)))
}

/// A basis of monomials `base_b x^j y^b` with an index for coordinates.
#[derive(Clone, Debug)]
pub struct MonomialBasis {
    pub monomials: Vec<(usize, i64)>,
    index: HashMap<(usize, i64), usize>,
}

impl MonomialBasis {
    pub fn new(monomials: Vec<(usize, i64)>) -> Self {
        let index = monomials.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        MonomialBasis { monomials, index }
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn position(&self, m: (usize, i64)) -> Option<usize> {
        self.index.get(&m).copied()
    }
}

/// Coordinates of `z` in the global monomials of `space`.
pub fn coordinates(
    f: &FieldDesc,
    space: &SlotSpace,
    basis: &MonomialBasis,
    z: &Elem,
) -> Result<Vec<Fq>, CohomologyError> {
    let mut out = vec![Fq::ZERO; basis.len()];
    for (idx, ts) in space.expand(f, z)?.into_iter().enumerate() {
        for (j, c) in ts {
            let pos = basis.position((idx, j)).ok_or_else(|| {
                CohomologyError::BasisNotClosed(format!("monomial ({idx}, x^{j}) outside the basis"))
            })?;
            out[pos] = c;
        }
    }
    Ok(out)
}

/// `res_inf(h dx)` for `h` in F_q(x): minus the coefficient of `1/x` in the
/// expansion at infinity.
pub fn residue_at_infinity(f: &FieldDesc, h: &RatFunc) -> Fq {
    if h.is_zero() {
        return Fq::ZERO;
    }
    let (_, r) = h.num().divrem(f, h.den());
    let dd = h.den().degree();
    if r.is_zero() || r.degree() != dd - 1 {
        return Fq::ZERO;
    }
    let c = f.div(r.lc(), h.den().lc()).expect("nonzero");
    f.neg(c)
}
