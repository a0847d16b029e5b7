//! Dense univariate polynomials over F_q.

use std::cmp::Ordering;

use crate::field::{FieldDesc, Fq};

/// Coefficients from the constant term up, without trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Poly {
    c: Vec<Fq>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Degree first, then coefficients from the top down.
impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.c
            .len()
            .cmp(&other.c.len())
            .then_with(|| self.c.iter().rev().cmp(other.c.iter().rev()))
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { c: Vec::new() }
    }

    pub fn one() -> Self {
        Poly { c: vec![Fq::ONE] }
    }

    pub fn x() -> Self {
        Poly { c: vec![Fq::ZERO, Fq::ONE] }
    }

    pub fn constant(a: Fq) -> Self {
        Self::from_coeffs(vec![a])
    }

    pub fn monomial(a: Fq, d: usize) -> Self {
        if a.is_zero() {
            return Self::zero();
        }
        let mut c = vec![Fq::ZERO; d + 1];
        c[d] = a;
        Poly { c }
    }

    pub fn from_coeffs(mut c: Vec<Fq>) -> Self {
        while c.last().is_some_and(|a| a.is_zero()) {
            c.pop();
        }
        Poly { c }
    }

    pub fn coeffs(&self) -> &[Fq] {
        &self.c
    }

    pub fn coeff(&self, i: usize) -> Fq {
        self.c.get(i).copied().unwrap_or(Fq::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.c.len() == 1 && self.c[0] == Fq::ONE
    }

    pub fn deg(&self) -> Option<usize> {
        self.c.len().checked_sub(1)
    }

    /// Degree with the convention deg 0 = -1.
    pub fn degree(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    pub fn lc(&self) -> Fq {
        self.c.last().copied().unwrap_or(Fq::ZERO)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn low_degree(&self) -> Option<usize> {
        self.c.iter().position(|a| !a.is_zero())
    }

    pub fn is_monomial(&self) -> bool {
        self.c.iter().filter(|a| !a.is_zero()).count() == 1
    }

    pub fn add(&self, f: &FieldDesc, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.add(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }

    pub fn sub(&self, f: &FieldDesc, o: &Poly) -> Poly {
        let n = self.c.len().max(o.c.len());
        let c = (0..n).map(|i| f.sub(self.coeff(i), o.coeff(i))).collect();
        Poly::from_coeffs(c)
    }

    pub fn neg(&self, f: &FieldDesc) -> Poly {
        Poly { c: self.c.iter().map(|&a| f.neg(a)).collect() }
    }

    pub fn scale(&self, f: &FieldDesc, a: Fq) -> Poly {
        if a.is_zero() {
            return Poly::zero();
        }
        Poly { c: self.c.iter().map(|&b| f.mul(a, b)).collect() }
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: usize) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fq::ZERO; k];
        c.extend_from_slice(&self.c);
        Poly { c }
    }

    pub fn mul(&self, f: &FieldDesc, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        let mut c = vec![Fq::ZERO; self.c.len() + o.c.len() - 1];
        for (i, &a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in o.c.iter().enumerate() {
                if !b.is_zero() {
                    c[i + j] = f.add(c[i + j], f.mul(a, b));
                }
            }
        }
        Poly::from_coeffs(c)
    }

    pub fn pow(&self, f: &FieldDesc, mut e: u64) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one();
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

    /// Euclidean division; panics on a zero divisor.
    pub fn divrem(&self, f: &FieldDesc, d: &Poly) -> (Poly, Poly) {
        let dd = d.deg().expect("division by the zero polynomial");
        if self.c.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let inv = f.inv(d.lc()).expect("leading coefficient is nonzero");
        let mut rem = self.c.clone();
        let mut quo = vec![Fq::ZERO; self.c.len() - dd];
        for k in (0..quo.len()).rev() {
            let t = rem[k + dd];
            if t.is_zero() {
                continue;
            }
            let factor = f.mul(t, inv);
            quo[k] = factor;
            for (j, &b) in d.c.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(factor, b));
            }
        }
        rem.truncate(dd);
        (Poly::from_coeffs(quo), Poly::from_coeffs(rem))
    }

    pub fn rem(&self, f: &FieldDesc, d: &Poly) -> Poly {
        self.divrem(f, d).1
    }

    /// Quotient of an exact division.
    pub fn div_exact(&self, f: &FieldDesc, d: &Poly) -> Poly {
        let (q, r) = self.divrem(f, d);
        debug_assert!(r.is_zero(), "inexact polynomial division");
        q
    }

    pub fn monic(&self, f: &FieldDesc) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = f.inv(self.lc()).expect("nonzero");
        self.scale(f, inv)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, f: &FieldDesc, o: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let r = a.rem(f, &b);
            a = b;
            b = r;
        }
        a.monic(f)
    }

    pub fn eval(&self, f: &FieldDesc, x: Fq) -> Fq {
        self.c.iter().rev().fold(Fq::ZERO, |acc, &a| f.add(f.mul(acc, x), a))
    }

    pub fn derivative(&self, f: &FieldDesc) -> Poly {
        if self.c.len() <= 1 {
            return Poly::zero();
        }
        let c = self.c[1..]
            .iter()
            .enumerate()
            .map(|(i, &a)| f.mul(a, f.from_int(i as i64 + 1)))
            .collect();
        Poly::from_coeffs(c)
    }

    /// Applies `sigma^s` to every coefficient.
    pub fn frobenius_coeffs(&self, f: &FieldDesc, s: i64) -> Poly {
        Poly { c: self.c.iter().map(|&a| f.frobenius(a, s)).collect() }
    }

    /// `self^e mod m`.
    pub fn pow_mod(&self, f: &FieldDesc, mut e: u64, m: &Poly) -> Poly {
        let mut base = self.rem(f, m);
        let mut acc = Poly::one().rem(f, m);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(f, &base).rem(f, m);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(f, &base).rem(f, m);
            }
        }
        acc
    }

    /// Irreducibility over F_q: no common factor with `x^{q^i} - x` for
    /// `i < deg`, and division of `x^{q^deg} - x`.
    pub fn is_irreducible(&self, f: &FieldDesc) -> bool {
        let Some(d) = self.deg() else { return false };
        if d == 0 {
            return false;
        }
        if d == 1 {
            return true;
        }
        let q = f.q() as u64;
        let x = Poly::x();
        let mut h = x.clone();
        for i in 1..=d {
            h = h.pow_mod(f, q, self);
            let diff = h.sub(f, &x);
            if i < d {
                if !diff.gcd(f, self).is_one() {
                    return false;
                }
            } else {
                return diff.rem(f, self).is_zero();
            }
        }
        unreachable!()
    }

    /// Multiplicity of the irreducible `pi` in `self` (nonzero).
    pub fn valuation_at(&self, f: &FieldDesc, pi: &Poly) -> (u32, Poly) {
        let mut k = 0;
        let mut cur = self.clone();
        if pi.c.len() == 2 && pi.c[0].is_zero() {
            let low = cur.low_degree().unwrap_or(0);
            return (low as u32, Poly { c: cur.c[low..].to_vec() });
        }
        loop {
            let (q, r) = cur.divrem(f, pi);
            if !r.is_zero() {
                return (k, cur);
            }
            cur = q;
            k += 1;
        }
    }
}
