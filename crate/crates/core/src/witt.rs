//! Truncated Witt vectors of length at most 3 over an arbitrary ring of
//! characteristic p.
//!
//! The universal addition, multiplication and negation polynomials are
//! derived once per `(p, length)` from the ghost components over the
//! integers and then reduced mod p.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::AlgebraError;
use crate::ring::Ring;

pub const MAX_LENGTH: usize = 3;

/// Integer polynomial in a fixed number of variables.
#[derive(Clone, Debug, Default)]
struct IntPoly {
    terms: BTreeMap<Vec<u32>, BigInt>,
}

impl IntPoly {
    fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, BigInt::one());
        IntPoly { terms }
    }

    fn add_assign(&mut self, o: &IntPoly, sign: i32) {
        for (e, c) in &o.terms {
            let entry = self.terms.entry(e.clone()).or_insert_with(BigInt::zero);
            if sign > 0 {
                *entry += c;
            } else {
                *entry -= c;
            }
            if entry.is_zero() {
                self.terms.remove(e);
            }
        }
    }

    fn scale(&self, k: &BigInt) -> IntPoly {
        IntPoly { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * k)).collect() }
    }

    fn mul(&self, o: &IntPoly) -> IntPoly {
        let mut terms: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                *terms.entry(e).or_insert_with(BigInt::zero) += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        IntPoly { terms }
    }

    fn pow(&self, mut e: u64, nvars: usize) -> IntPoly {
        let mut acc = IntPoly::constant(nvars, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    fn constant(nvars: usize, c: i64) -> IntPoly {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(vec![0; nvars], BigInt::from(c));
        }
        IntPoly { terms }
    }

    fn div_exact(&self, k: &BigInt) -> IntPoly {
        IntPoly {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| {
                    let (q, r) = c.div_rem(k);
                    assert!(r.is_zero(), "Witt polynomial coefficient not integral");
                    (e.clone(), q)
                })
                .collect(),
        }
    }

    fn reduce(&self, p: u32) -> Vec<Term> {
        let pb = BigInt::from(p);
        self.terms
            .iter()
            .filter_map(|(e, c)| {
                let mut m = c.mod_floor(&pb);
                if m.is_negative() {
                    m += &pb;
                }
                let m = m.to_u32().expect("reduced coefficient fits");
                (m != 0).then(|| Term { exps: e.clone(), coeff: m })
            })
            .collect()
    }
}

/// One monomial of a reduced Witt polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub exps: Vec<u32>,
    pub coeff: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
enum Op {
    Add,
    Mul,
    Neg,
}

/// Reduced universal polynomials; variables are `a_0..a_{m-1}, b_0..b_{m-1}`
/// (negation only uses the `a` block).
#[derive(Debug)]
pub struct WittPolys {
    pub p: u32,
    pub len: usize,
    pub components: Vec<Vec<Term>>,
}

type Cache = Mutex<HashMap<(u32, usize, Op), Arc<WittPolys>>>;

fn cache() -> &'static Cache {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn ghost(p: u32, n: usize, offset: usize, nvars: usize) -> IntPoly {
    let mut w = IntPoly::default();
    for i in 0..=n {
        let xi = IntPoly::var(nvars, offset + i).pow((p as u64).pow((n - i) as u32), nvars);
        w.add_assign(&xi.scale(&BigInt::from(p).pow(i as u32)), 1);
    }
    w
}

fn derive(p: u32, m: usize, op: Op) -> WittPolys {
    let nvars = 2 * m;
    let mut comps: Vec<IntPoly> = Vec::with_capacity(m);
    for n in 0..m {
        let mut target = match op {
            Op::Add => {
                let mut t = ghost(p, n, 0, nvars);
                t.add_assign(&ghost(p, n, m, nvars), 1);
                t
            }
            Op::Mul => ghost(p, n, 0, nvars).mul(&ghost(p, n, m, nvars)),
            Op::Neg => ghost(p, n, 0, nvars).scale(&BigInt::from(-1)),
        };
        for (k, ck) in comps.iter().enumerate() {
            let t = ck
                .pow((p as u64).pow((n - k) as u32), nvars)
                .scale(&BigInt::from(p).pow(k as u32));
            target.add_assign(&t, -1);
        }
        comps.push(target.div_exact(&BigInt::from(p).pow(n as u32)));
    }
    WittPolys { p, len: m, components: comps.iter().map(|c| c.reduce(p)).collect() }
}

fn polys(p: u32, m: usize, op: Op) -> Result<Arc<WittPolys>, AlgebraError> {
    if m == 0 || m > MAX_LENGTH {
        return Err(AlgebraError::UnsupportedLength(m));
    }
    let key = (p, m, op);
    if let Some(w) = cache().lock().expect("cache lock").get(&key) {
        return Ok(w.clone());
    }
    let w = Arc::new(derive(p, m, op));
    cache().lock().expect("cache lock").insert(key, w.clone());
    Ok(w)
}

pub fn addition_polys(p: u32, m: usize) -> Result<Arc<WittPolys>, AlgebraError> {
    polys(p, m, Op::Add)
}

pub fn multiplication_polys(p: u32, m: usize) -> Result<Arc<WittPolys>, AlgebraError> {
    polys(p, m, Op::Mul)
}

pub fn negation_polys(p: u32, m: usize) -> Result<Arc<WittPolys>, AlgebraError> {
    polys(p, m, Op::Neg)
}

/// Evaluates a reduced polynomial at `vars` in `ring`.
pub fn eval_terms<R: Ring>(ring: &R, terms: &[Term], vars: &[R::Elem]) -> R::Elem {
    let mut powers: HashMap<(usize, u32), R::Elem> = HashMap::new();
    let zero: Vec<bool> = vars.iter().map(|v| ring.is_zero(v)).collect();
    let mut acc = ring.zero();
    for t in terms {
        if t.exps.iter().enumerate().any(|(i, &e)| e > 0 && zero[i]) {
            continue;
        }
        let mut m = ring.from_int(t.coeff as i64);
        for (i, &e) in t.exps.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let pw = powers.entry((i, e)).or_insert_with(|| ring.pow(&vars[i], e as u64));
            m = ring.mul(&m, pw);
        }
        acc = ring.add(&acc, &m);
    }
    acc
}

fn check_lengths(a: usize, b: usize) -> Result<usize, AlgebraError> {
    if a != b {
        return Err(AlgebraError::DimensionMismatch(format!("Witt lengths {a} and {b}")));
    }
    if a == 0 || a > MAX_LENGTH {
        return Err(AlgebraError::UnsupportedLength(a));
    }
    Ok(a)
}

fn binary<R: Ring>(
    ring: &R,
    w: &WittPolys,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Vec<R::Elem> {
    let vars: Vec<R::Elem> = a.iter().chain(b.iter()).cloned().collect();
    w.components.iter().map(|c| eval_terms(ring, c, &vars)).collect()
}

pub fn witt_add<R: Ring>(
    ring: &R,
    p: u32,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Result<Vec<R::Elem>, AlgebraError> {
    let m = check_lengths(a.len(), b.len())?;
    Ok(binary(ring, &*addition_polys(p, m)?, a, b))
}

pub fn witt_mul<R: Ring>(
    ring: &R,
    p: u32,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Result<Vec<R::Elem>, AlgebraError> {
    let m = check_lengths(a.len(), b.len())?;
    Ok(binary(ring, &*multiplication_polys(p, m)?, a, b))
}

pub fn witt_neg<R: Ring>(ring: &R, p: u32, a: &[R::Elem]) -> Result<Vec<R::Elem>, AlgebraError> {
    let m = check_lengths(a.len(), a.len())?;
    let w = negation_polys(p, m)?;
    let mut vars: Vec<R::Elem> = a.to_vec();
    vars.extend((0..m).map(|_| ring.zero()));
    Ok(w.components.iter().map(|c| eval_terms(ring, c, &vars)).collect())
}

pub fn witt_sub<R: Ring>(
    ring: &R,
    p: u32,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Result<Vec<R::Elem>, AlgebraError> {
    witt_add(ring, p, a, &witt_neg(ring, p, b)?)
}

/// Carry `c_n(a_{<n}, b_{<n})` of component `n` of `a + b`, i.e. the sum
/// polynomial minus `a_n + b_n`. Slices must have length at least `n`.
pub fn witt_carry<R: Ring>(
    ring: &R,
    p: u32,
    n: usize,
    a: &[R::Elem],
    b: &[R::Elem],
) -> Result<R::Elem, AlgebraError> {
    let m = n + 1;
    let w = addition_polys(p, m)?;
    let mut vars: Vec<R::Elem> = a[..n].to_vec();
    vars.push(ring.zero());
    vars.extend(b[..n].iter().cloned());
    vars.push(ring.zero());
    Ok(eval_terms(ring, &w.components[n], &vars))
}

/// Witt vector `V^i[g]` of length `m`: `g` in slot `i`, zeros elsewhere.
pub fn verschiebung_teichmuller<R: Ring>(ring: &R, m: usize, i: usize, g: R::Elem) -> Vec<R::Elem> {
    (0..m).map(|k| if k == i { g.clone() } else { ring.zero() }).collect()
}
