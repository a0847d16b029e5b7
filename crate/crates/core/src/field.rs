//! Finite fields F_{p^r}.
//!
//! An element is the integer `c_0 + c_1 p + ... + c_{r-1} p^{r-1}` packing its
//! coefficients in the power basis of `F_p[x]/(modulus)`. All arithmetic goes
//! through the shared [`FieldDesc`].

use std::fmt;
use std::sync::Arc;

use crate::error::AlgebraError;
use crate::poly::Poly;
use crate::ring::Ring;

/// Packed field element. Only meaningful together with its [`FieldDesc`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u32);

impl Fq {
    pub const ZERO: Fq = Fq(0);
    pub const ONE: Fq = Fq(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Exp/log tables are built for fields up to this size.
const TABLE_LIMIT: u64 = 1 << 20;

struct Tables {
    exp: Vec<u32>,
    log: Vec<u32>,
}

struct Inner {
    p: u32,
    r: u32,
    q: u32,
    modulus: Vec<u32>,
    tables: Option<Tables>,
}

/// Description of F_{p^r}: characteristic, degree and defining modulus.
#[derive(Clone)]
pub struct FieldDesc(Arc<Inner>);

impl PartialEq for FieldDesc {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p && self.0.modulus == other.0.modulus)
    }
}
impl Eq for FieldDesc {}

impl fmt::Debug for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.0.p, self.0.r, self.0.modulus)
    }
}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Builds F_{p^r}. Without a modulus the least monic irreducible of degree `r`
/// is chosen, ordering candidates by the integer `a_0 + a_1 p + ...` of their
/// lower coefficients.
pub fn field_make(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<FieldDesc, AlgebraError> {
    FieldDesc::new(p, r, modulus)
}

impl FieldDesc {
    pub fn new(p: u32, r: u32, modulus: Option<&[u32]>) -> Result<Self, AlgebraError> {
        if !is_prime(p) {
            return Err(AlgebraError::NotPrime(p));
        }
        if r == 0 {
            return Err(AlgebraError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(r).filter(|&q| q < (1u64 << 31));
        let Some(q) = q else {
            return Err(AlgebraError::FieldTooLarge { p, r });
        };
        let prime = Self::prime_unchecked(p);
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r as usize + 1 || m[r as usize] % p != 1 {
                    return Err(AlgebraError::BadModulus { expected: r });
                }
                let m: Vec<u32> = m.iter().map(|c| c % p).collect();
                let f = Poly::from_coeffs(m.iter().map(|&c| Fq(c)).collect());
                if !f.is_irreducible(&prime) {
                    return Err(AlgebraError::ReducibleModulus(p));
                }
                m
            }
            None if r == 1 => vec![0, 1],
            None => canonical_modulus(&prime, r),
        };
        let mut inner = Inner { p, r, q: q as u32, modulus, tables: None };
        if q <= TABLE_LIMIT && q > 2 {
            inner.tables = Some(build_tables(&inner));
        }
        Ok(FieldDesc(Arc::new(inner)))
    }

    /// The prime field F_p, modulus `x`.
    pub fn prime(p: u32) -> Result<Self, AlgebraError> {
        Self::new(p, 1, None)
    }

    fn prime_unchecked(p: u32) -> Self {
        FieldDesc(Arc::new(Inner { p, r: 1, q: p, modulus: vec![0, 1], tables: None }))
    }

    pub fn p(&self) -> u32 {
        self.0.p
    }
    pub fn r(&self) -> u32 {
        self.0.r
    }
    pub fn q(&self) -> u32 {
        self.0.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// The prime subfield as a field of its own.
    pub fn prime_field(&self) -> FieldDesc {
        if self.0.r == 1 {
            self.clone()
        } else {
            Self::prime_unchecked(self.0.p)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.0.q).map(Fq)
    }

    /// Coefficients of `x` in the power basis, length `r`.
    pub fn digits(&self, x: Fq) -> Vec<u32> {
        let p = self.0.p;
        let mut v = x.0;
        (0..self.0.r)
            .map(|_| {
                let d = v % p;
                v /= p;
                d
            })
            .collect()
    }

    pub fn from_digits(&self, d: &[u32]) -> Fq {
        let p = self.0.p;
        let mut v = 0u32;
        for &c in d.iter().take(self.0.r as usize).rev() {
            v = v * p + c % p;
        }
        Fq(v)
    }

    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.0.p as i64) as u32)
    }

    /// The class of `x` in `F_p[x]/(modulus)`.
    pub fn generator(&self) -> Fq {
        if self.0.r > 1 {
            Fq(self.0.p)
        } else {
            self.neg(Fq(self.0.modulus[0]))
        }
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        let p = self.0.p;
        if p == 2 {
            return Fq(a.0 ^ b.0);
        }
        if self.0.r == 1 {
            return Fq((a.0 + b.0) % p);
        }
        let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale = scale.wrapping_mul(p);
        }
        Fq(out)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        let p = self.0.p;
        if p == 2 {
            return a;
        }
        if self.0.r == 1 {
            return Fq((p - a.0) % p);
        }
        let (mut x, mut out, mut scale) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * scale;
            x /= p;
            scale = scale.wrapping_mul(p);
        }
        Fq(out)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq::ZERO;
        }
        if self.0.r == 1 {
            return Fq(((a.0 as u64 * b.0 as u64) % self.0.p as u64) as u32);
        }
        if let Some(t) = &self.0.tables {
            return Fq(t.exp[(t.log[a.0 as usize] + t.log[b.0 as usize]) as usize]);
        }
        slow_mul(&self.0, a, b)
    }

    pub fn inv(&self, a: Fq) -> Result<Fq, AlgebraError> {
        if a.0 == 0 {
            return Err(AlgebraError::DivisionByZero);
        }
        if let Some(t) = &self.0.tables {
            let l = t.log[a.0 as usize];
            return Ok(Fq(t.exp[((self.0.q - 1 - l) % (self.0.q - 1)) as usize]));
        }
        Ok(self.pow(a, self.0.q as u64 - 2))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Result<Fq, AlgebraError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq::ONE;
        }
        if a.0 == 0 {
            return Fq::ZERO;
        }
        if let Some(t) = &self.0.tables {
            let m = (self.0.q - 1) as u128;
            let l = (t.log[a.0 as usize] as u128 * e as u128) % m;
            return Fq(t.exp[l as usize]);
        }
        let (mut base, mut acc, mut e) = (a, Fq::ONE, e);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(base, base);
            }
        }
        acc
    }

    /// `x^{p^s}`; negative `s` gives the inverse Frobenius.
    pub fn frobenius(&self, x: Fq, s: i64) -> Fq {
        let r = self.0.r as i64;
        let t = s.rem_euclid(r);
        if t == 0 || x.0 <= 1 {
            return x;
        }
        self.pow(x, (self.0.p as u64).pow(t as u32))
    }

    /// Absolute trace to F_p.
    pub fn trace(&self, x: Fq) -> u32 {
        let mut acc = Fq::ZERO;
        let mut y = x;
        for _ in 0..self.0.r {
            acc = self.add(acc, y);
            y = self.frobenius(y, 1);
        }
        acc.0
    }

    /// Multiplicative generator; only available for table-backed fields.
    pub fn primitive(&self) -> Option<Fq> {
        self.0.tables.as_ref().map(|t| Fq(t.exp[1]))
    }

    pub fn has_tables(&self) -> bool {
        self.0.tables.is_some()
    }
}

impl Ring for FieldDesc {
    type Elem = Fq;

    fn zero(&self) -> Fq {
        Fq::ZERO
    }
    fn one(&self) -> Fq {
        Fq::ONE
    }
    fn from_int(&self, n: i64) -> Fq {
        FieldDesc::from_int(self, n)
    }
    fn add(&self, a: &Fq, b: &Fq) -> Fq {
        FieldDesc::add(self, *a, *b)
    }
    fn neg(&self, a: &Fq) -> Fq {
        FieldDesc::neg(self, *a)
    }
    fn mul(&self, a: &Fq, b: &Fq) -> Fq {
        FieldDesc::mul(self, *a, *b)
    }
    fn is_zero(&self, a: &Fq) -> bool {
        a.0 == 0
    }
}

fn slow_mul(f: &Inner, a: Fq, b: Fq) -> Fq {
    let r = f.r as usize;
    let p = f.p;
    if p == 2 {
        let (x, y) = (a.0 as u64, b.0 as u64);
        let mut prod = 0u64;
        for i in 0..r {
            if (y >> i) & 1 == 1 {
                prod ^= x << i;
            }
        }
        let mut m = 0u64;
        for (i, &c) in f.modulus.iter().enumerate() {
            m |= (c as u64) << i;
        }
        for d in (r..2 * r - 1).rev() {
            if (prod >> d) & 1 == 1 {
                prod ^= m << (d - r);
            }
        }
        return Fq(prod as u32);
    }
    let mut da = [0u64; 32];
    let mut db = [0u64; 32];
    let (mut x, mut y) = (a.0, b.0);
    for i in 0..r {
        da[i] = (x % p) as u64;
        db[i] = (y % p) as u64;
        x /= p;
        y /= p;
    }
    let pp = p as u64;
    let mut prod = [0u64; 64];
    for i in 0..r {
        if da[i] == 0 {
            continue;
        }
        for j in 0..r {
            prod[i + j] = (prod[i + j] + da[i] * db[j]) % pp;
        }
    }
    for d in (r..2 * r - 1).rev() {
        let c = prod[d];
        if c == 0 {
            continue;
        }
        for (i, &m) in f.modulus.iter().enumerate().take(r) {
            let t = &mut prod[d - r + i];
            *t = (*t + pp * pp - c * m as u64) % pp;
        }
        prod[d] = 0;
    }
    let mut out = 0u32;
    for i in (0..r).rev() {
        out = out * p + prod[i] as u32;
    }
    Fq(out)
}

fn build_tables(f: &Inner) -> Tables {
    let q = f.q as u64;
    let factors = prime_factors(q - 1);
    let order_is_full = |g: Fq| {
        factors.iter().all(|&l| {
            let mut acc = Fq::ONE;
            let mut base = g;
            let mut e = (q - 1) / l;
            while e > 0 {
                if e & 1 == 1 {
                    acc = slow_mul(f, acc, base);
                }
                base = slow_mul(f, base, base);
                e >>= 1;
            }
            acc != Fq::ONE
        })
    };
    let g = (2..f.q).map(Fq).find(|&g| order_is_full(g)).expect("multiplicative group is cyclic");
    let n = (q - 1) as usize;
    let mut exp = vec![0u32; 2 * n];
    let mut log = vec![0u32; q as usize];
    let mut x = Fq::ONE;
    for (i, slot) in exp.iter_mut().enumerate().take(n) {
        *slot = x.0;
        log[x.0 as usize] = i as u32;
        x = slow_mul(f, x, g);
    }
    for i in n..2 * n {
        exp[i] = exp[i - n];
    }
    Tables { exp, log }
}

fn canonical_modulus(prime: &FieldDesc, r: u32) -> Vec<u32> {
    let p = prime.p();
    let count = (p as u64).pow(r);
    for n in 0..count {
        let mut coeffs = Vec::with_capacity(r as usize + 1);
        let mut v = n;
        for _ in 0..r {
            coeffs.push((v % p as u64) as u32);
            v /= p as u64;
        }
        coeffs.push(1);
        if coeffs[0] == 0 {
            continue;
        }
        let f = Poly::from_coeffs(coeffs.iter().map(|&c| Fq(c)).collect());
        if f.is_irreducible(prime) {
            return coeffs;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_moduli() {
        assert_eq!(field_make(2, 1, None).unwrap().modulus(), &[0, 1]);
        assert_eq!(field_make(2, 2, None).unwrap().modulus(), &[1, 1, 1]);
        assert_eq!(field_make(2, 3, None).unwrap().modulus(), &[1, 1, 0, 1]);
        assert!(matches!(field_make(4, 1, None), Err(AlgebraError::NotPrime(4))));
        assert!(matches!(
            field_make(2, 2, Some(&[1, 0, 1])),
            Err(AlgebraError::ReducibleModulus(2))
        ));
    }

    #[test]
    fn frobenius_of_generator() {
        let f = field_make(3, 2, None).unwrap();
        let g = f.generator();
        assert_eq!(f.frobenius(g, 1), f.pow(g, 3));
        assert_eq!(f.frobenius(g, 2), g);
        assert_eq!(f.frobenius(f.frobenius(g, 1), -1), g);
    }

    #[test]
    fn slow_and_table_paths_agree() {
        for (p, r) in [(2, 5), (3, 3), (5, 2)] {
            let f = field_make(p, r, None).unwrap();
            assert!(f.has_tables());
            for a in f.elements().step_by(7) {
                for b in f.elements().step_by(5) {
                    assert_eq!(f.mul(a, b), slow_mul(&f.0, a, b));
                }
            }
        }
    }
}
