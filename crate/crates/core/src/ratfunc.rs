//! Rational functions in `x` over F_q and the closed points of P^1.

use std::fmt;

use crate::field::{FieldDesc, Fq};
use crate::poly::Poly;
use crate::ring::Ring;

/// `num / den` in lowest terms with `den` monic.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl Default for RatFunc {
    fn default() -> Self {
        Self::zero()
    }
}

impl RatFunc {
    pub fn zero() -> Self {
        RatFunc { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        RatFunc { num: Poly::one(), den: Poly::one() }
    }

    pub fn from_poly(num: Poly) -> Self {
        RatFunc { num, den: Poly::one() }
    }

    pub fn constant(a: Fq) -> Self {
        Self::from_poly(Poly::constant(a))
    }

    /// `c x^k` for any integer `k`.
    pub fn monomial(a: Fq, k: i64) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        if k >= 0 {
            Self::from_poly(Poly::monomial(a, k as usize))
        } else {
            RatFunc { num: Poly::constant(a), den: Poly::monomial(Fq::ONE, (-k) as usize) }
        }
    }

    pub fn new(f: &FieldDesc, num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return Self::zero();
        }
        let g = num.gcd(f, &den);
        let (mut num, mut den) = if g.is_one() {
            (num, den)
        } else {
            (num.div_exact(f, &g), den.div_exact(f, &g))
        };
        let lc = den.lc();
        if lc != Fq::ONE {
            let inv = f.inv(lc).expect("nonzero");
            num = num.scale(f, inv);
            den = den.scale(f, inv);
        }
        RatFunc { num, den }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.num.is_one() && self.den.is_one()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn add(&self, f: &FieldDesc, o: &RatFunc) -> RatFunc {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return RatFunc::new(f, self.num.add(f, &o.num), self.den.clone());
        }
        if self.den.is_one() {
            let num = self.num.mul(f, &o.den).add(f, &o.num);
            return RatFunc { num, den: o.den.clone() };
        }
        if o.den.is_one() {
            let num = o.num.mul(f, &self.den).add(f, &self.num);
            return RatFunc { num, den: self.den.clone() };
        }
        let g = self.den.gcd(f, &o.den);
        let a = self.den.div_exact(f, &g);
        let b = o.den.div_exact(f, &g);
        let num = self.num.mul(f, &b).add(f, &o.num.mul(f, &a));
        RatFunc::new(f, num, a.mul(f, &o.den))
    }

    pub fn neg(&self, f: &FieldDesc) -> RatFunc {
        RatFunc { num: self.num.neg(f), den: self.den.clone() }
    }

    pub fn sub(&self, f: &FieldDesc, o: &RatFunc) -> RatFunc {
        self.add(f, &o.neg(f))
    }

    pub fn scale(&self, f: &FieldDesc, a: Fq) -> RatFunc {
        if a.is_zero() {
            return RatFunc::zero();
        }
        RatFunc { num: self.num.scale(f, a), den: self.den.clone() }
    }

    pub fn mul(&self, f: &FieldDesc, o: &RatFunc) -> RatFunc {
        if self.is_zero() || o.is_zero() {
            return RatFunc::zero();
        }
        if self.den.is_one() && o.den.is_one() {
            return RatFunc::from_poly(self.num.mul(f, &o.num));
        }
        let g1 = self.num.gcd(f, &o.den);
        let g2 = o.num.gcd(f, &self.den);
        let n1 = if g1.is_one() { self.num.clone() } else { self.num.div_exact(f, &g1) };
        let d2 = if g1.is_one() { o.den.clone() } else { o.den.div_exact(f, &g1) };
        let n2 = if g2.is_one() { o.num.clone() } else { o.num.div_exact(f, &g2) };
        let d1 = if g2.is_one() { self.den.clone() } else { self.den.div_exact(f, &g2) };
        let num = n1.mul(f, &n2);
        let den = d1.mul(f, &d2);
        let lc = den.lc();
        if lc == Fq::ONE {
            RatFunc { num, den }
        } else {
            let inv = f.inv(lc).expect("nonzero");
            RatFunc { num: num.scale(f, inv), den: den.scale(f, inv) }
        }
    }

    pub fn inv(&self, f: &FieldDesc) -> Option<RatFunc> {
        if self.is_zero() {
            return None;
        }
        Some(RatFunc::new(f, self.den.clone(), self.num.clone()))
    }

    pub fn div(&self, f: &FieldDesc, o: &RatFunc) -> Option<RatFunc> {
        Some(self.mul(f, &o.inv(f)?))
    }

    pub fn pow(&self, f: &FieldDesc, e: i64) -> RatFunc {
        let base = if e < 0 { self.inv(f).expect("nonzero base") } else { self.clone() };
        let e = e.unsigned_abs();
        RatFunc { num: base.num.pow(f, e), den: base.den.pow(f, e) }
    }

    pub fn derivative(&self, f: &FieldDesc) -> RatFunc {
        if self.den.is_one() {
            return RatFunc::from_poly(self.num.derivative(f));
        }
        let num = self
            .num
            .derivative(f)
            .mul(f, &self.den)
            .sub(f, &self.num.mul(f, &self.den.derivative(f)));
        RatFunc::new(f, num, self.den.mul(f, &self.den))
    }

    pub fn frobenius_coeffs(&self, f: &FieldDesc, s: i64) -> RatFunc {
        RatFunc { num: self.num.frobenius_coeffs(f, s), den: self.den.frobenius_coeffs(f, s) }
    }

    /// Value at a finite point, `None` at a pole.
    pub fn eval(&self, f: &FieldDesc, x: Fq) -> Option<Fq> {
        let d = self.den.eval(f, x);
        if d.is_zero() {
            return None;
        }
        Some(f.mul(self.num.eval(f, x), f.inv(d).ok()?))
    }

    /// Value at infinity, `None` at a pole.
    pub fn eval_infinity(&self, f: &FieldDesc) -> Option<Fq> {
        let (dn, dd) = (self.num.degree(), self.den.degree());
        if self.is_zero() || dn < dd {
            Some(Fq::ZERO)
        } else if dn == dd {
            Some(f.mul(self.num.lc(), f.inv(self.den.lc()).ok()?))
        } else {
            None
        }
    }

    /// Laurent polynomial view: `Some((k, p))` with `self = p / x^k` when
    /// the denominator is a power of `x`.
    pub fn as_laurent(&self) -> Option<(usize, &Poly)> {
        let d = self.den.deg()?;
        if self.den.is_monomial() {
            Some((d, &self.num))
        } else {
            None
        }
    }

    /// Iterator over `(exponent, coefficient)` of the nonzero Laurent terms.
    pub fn laurent_terms(&self) -> Option<Vec<(i64, Fq)>> {
        let (k, num) = self.as_laurent()?;
        Some(
            num.coeffs()
                .iter()
                .enumerate()
                .filter(|(_, a)| !a.is_zero())
                .map(|(i, &a)| (i as i64 - k as i64, a))
                .collect(),
        )
    }

    pub fn valuation(&self, f: &FieldDesc, at: &Place) -> Option<i64> {
        if self.is_zero() {
            return None;
        }
        match at {
            Place::Infinity => Some(self.den.degree() - self.num.degree()),
            Place::Finite(pi) => {
                let (a, _) = self.num.valuation_at(f, pi);
                let (b, _) = self.den.valuation_at(f, pi);
                Some(a as i64 - b as i64)
            }
        }
    }

    /// Valuation and leading coefficient at `at`. The leading coefficient is
    /// the residue of `self / t^v` with `t = 1/x` at infinity and `t = pi`
    /// otherwise, as a polynomial reduced modulo the residue modulus.
    pub fn leading(&self, f: &FieldDesc, at: &Place) -> Option<(i64, Poly)> {
        if self.is_zero() {
            return None;
        }
        match at {
            Place::Infinity => {
                let c = f.mul(self.num.lc(), f.inv(self.den.lc()).ok()?);
                Some((self.den.degree() - self.num.degree(), Poly::constant(c)))
            }
            Place::Finite(pi) => {
                let (a, nu) = self.num.valuation_at(f, pi);
                let (b, de) = self.den.valuation_at(f, pi);
                let res = ResidueField::new(f, at);
                let value = res.div(&nu.rem(f, pi), &de.rem(f, pi));
                Some((a as i64 - b as i64, value))
            }
        }
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fm, "({:?})/({:?})", self.num.coeffs(), self.den.coeffs())
    }
}

/// The field F_q(x) as a [`Ring`].
#[derive(Clone, Debug)]
pub struct RatFuncField(pub FieldDesc);

impl Ring for RatFuncField {
    type Elem = RatFunc;

    fn zero(&self) -> RatFunc {
        RatFunc::zero()
    }
    fn one(&self) -> RatFunc {
        RatFunc::one()
    }
    fn from_int(&self, n: i64) -> RatFunc {
        RatFunc::constant(self.0.from_int(n))
    }
    fn add(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.add(&self.0, b)
    }
    fn neg(&self, a: &RatFunc) -> RatFunc {
        a.neg(&self.0)
    }
    fn mul(&self, a: &RatFunc, b: &RatFunc) -> RatFunc {
        a.mul(&self.0, b)
    }
    fn is_zero(&self, a: &RatFunc) -> bool {
        a.is_zero()
    }
}

/// A closed point of P^1 over F_q.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Place {
    Infinity,
    /// A monic irreducible polynomial.
    Finite(Poly),
}

impl Place {
    pub fn zero() -> Place {
        Place::Finite(Poly::x())
    }

    pub fn degree(&self) -> u32 {
        match self {
            Place::Infinity => 1,
            Place::Finite(p) => p.deg().unwrap_or(0) as u32,
        }
    }

    pub fn is_zero_point(&self) -> bool {
        matches!(self, Place::Finite(p) if *p == Poly::x())
    }

    /// The residue modulus: `pi`, or `x` at infinity (so residues are constants).
    pub fn residue_modulus(&self) -> Poly {
        match self {
            Place::Infinity => Poly::x(),
            Place::Finite(p) => p.clone(),
        }
    }

    /// A local parameter as a rational function.
    pub fn uniformizer(&self, f: &FieldDesc) -> RatFunc {
        match self {
            Place::Infinity => RatFunc::monomial(Fq::ONE, -1),
            Place::Finite(p) => RatFunc::new(f, p.clone(), Poly::one()),
        }
    }

    pub fn label(&self, f: &FieldDesc) -> String {
        match self {
            Place::Infinity => "inf".to_string(),
            Place::Finite(p) => poly_to_string(f, p),
        }
    }
}

/// Human-readable rational function in `x`.
pub fn ratfunc_to_string(f: &FieldDesc, h: &RatFunc) -> String {
    let num = poly_to_string(f, h.num());
    if h.den().is_one() {
        return num;
    }
    let wrap = |s: String| if s.contains('+') { format!("({s})") } else { s };
    format!("{}/{}", wrap(num), wrap(poly_to_string(f, h.den())))
}

/// Human-readable polynomial in `x` with coefficients written in `g`.
pub fn poly_to_string(f: &FieldDesc, p: &Poly) -> String {
    if p.is_zero() {
        return "0".into();
    }
    let mut terms = Vec::new();
    for (i, &a) in p.coeffs().iter().enumerate().rev() {
        if a.is_zero() {
            continue;
        }
        let c = elem_to_string(f, a);
        let coeff_needs_parens = c.contains('+');
        let xpart = match i {
            0 => String::new(),
            1 => "x".into(),
            _ => format!("x^{i}"),
        };
        let term = if i == 0 {
            c
        } else if a == Fq::ONE {
            xpart
        } else if coeff_needs_parens {
            format!("({c})*{xpart}")
        } else {
            format!("{c}*{xpart}")
        };
        terms.push(term);
    }
    terms.join("+")
}

/// Field element as a polynomial in the generator `g`.
pub fn elem_to_string(f: &FieldDesc, a: Fq) -> String {
    if f.r() == 1 {
        return a.0.to_string();
    }
    let d = f.digits(a);
    let mut terms = Vec::new();
    for (i, &c) in d.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let g = match i {
            0 => String::new(),
            1 => "g".into(),
            _ => format!("g^{i}"),
        };
        terms.push(match (i, c) {
            (0, _) => c.to_string(),
            (_, 1) => g,
            _ => format!("{c}*{g}"),
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join("+")
    }
}

/// Residue field `F_q[x]/(pi)` of a closed point.
pub struct ResidueField<'a> {
    f: &'a FieldDesc,
    modulus: Poly,
    size: u64,
}

impl<'a> ResidueField<'a> {
    pub fn new(f: &'a FieldDesc, at: &Place) -> Self {
        let modulus = at.residue_modulus();
        let size = (f.q() as u64).pow(at.degree());
        ResidueField { f, modulus, size }
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn reduce(&self, a: &Poly) -> Poly {
        a.rem(self.f, &self.modulus)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        a.mul(self.f, b).rem(self.f, &self.modulus)
    }

    pub fn pow(&self, a: &Poly, e: u64) -> Poly {
        a.pow_mod(self.f, e, &self.modulus)
    }

    pub fn inv(&self, a: &Poly) -> Poly {
        assert!(!self.reduce(a).is_zero(), "inverse of zero residue");
        self.pow(a, self.size - 2)
    }

    pub fn div(&self, a: &Poly, b: &Poly) -> Poly {
        self.mul(a, &self.inv(b))
    }

    /// The unique p-th root.
    pub fn pth_root(&self, a: &Poly) -> Poly {
        self.pow(a, self.size / self.f.p() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_make;

    #[test]
    fn arithmetic_normalises() {
        let f = field_make(3, 1, None).unwrap();
        let a = RatFunc::monomial(Fq::ONE, -2);
        let b = RatFunc::from_poly(Poly::from_coeffs(vec![Fq(1), Fq(1)]));
        let s = a.add(&f, &b).sub(&f, &b);
        assert_eq!(s, a);
        let prod = a.mul(&f, &RatFunc::monomial(Fq::ONE, 2));
        assert!(prod.is_one());
        assert_eq!(a.valuation(&f, &Place::Infinity), Some(2));
        assert_eq!(a.valuation(&f, &Place::zero()), Some(-2));
        assert_eq!(
            b.laurent_terms().unwrap(),
            vec![(0, Fq(1)), (1, Fq(1))]
        );
    }

    #[test]
    fn leading_coefficients() {
        let f = field_make(2, 1, None).unwrap();
        // (x^3 + 1)/x^5 at infinity: v = 2, lc = 1
        let h = RatFunc::new(
            &f,
            Poly::from_coeffs(vec![Fq(1), Fq(0), Fq(0), Fq(1)]),
            Poly::monomial(Fq::ONE, 5),
        );
        assert_eq!(h.leading(&f, &Place::Infinity), Some((2, Poly::one())));
        assert_eq!(h.leading(&f, &Place::zero()), Some((-5, Poly::one())));
    }
}
