//! Arithmetic in the function field `K_n = F_q(x)(y_0, ..., y_{n-1})` of a
//! chain of Artin-Schreier extensions `y_i^p - y_i = R_i`, `R_i` in `K_i`.
//!
//! An element of `K_n` is the vector of its `p^n` coefficients in F_q(x)
//! with respect to the monomials `y^b`, indexed by `b_0 + b_1 p + ...`.

use crate::field::FieldDesc;
use crate::ratfunc::RatFunc;
use crate::ring::Ring;

pub type Elem = Vec<RatFunc>;

#[derive(Clone, Debug)]
pub struct AsChain {
    pub field: FieldDesc,
    pub p: usize,
    rhs: Vec<Elem>,
    /// `dy_i/dx` as an element of `K_i`.
    dy: Vec<Elem>,
}

/// Multi-index digits of a flat monomial index.
pub fn digits(p: usize, n: usize, mut idx: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let d = idx % p;
            idx /= p;
            d
        })
        .collect()
}

pub fn flat_index(p: usize, b: &[usize]) -> usize {
    b.iter().rev().fold(0, |acc, &d| acc * p + d)
}

impl AsChain {
    pub fn new(field: FieldDesc) -> Self {
        let p = field.p() as usize;
        AsChain { field, p, rhs: Vec::new(), dy: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rhs.is_empty()
    }

    pub fn rhs(&self, i: usize) -> &Elem {
        &self.rhs[i]
    }

    pub fn dim(&self, n: usize) -> usize {
        self.p.pow(n as u32)
    }

    /// Appends `y_n^p - y_n = r` with `r` in `K_n`.
    pub fn push(&mut self, r: Elem) {
        let n = self.rhs.len();
        assert_eq!(r.len(), self.dim(n), "right-hand side lives in K_n");
        self.rhs.push(r);
        let d = self.derivative(n, &self.rhs[n].clone());
        let dy = self.neg(n, &d);
        self.dy.push(dy);
    }

    /// Replaces the last right-hand side (used while reducing).
    pub fn set_last(&mut self, r: Elem) {
        self.rhs.pop();
        self.dy.pop();
        self.push(r);
    }

    /// The chain truncated to its first `n` steps.
    pub fn truncate(&self, n: usize) -> AsChain {
        AsChain {
            field: self.field.clone(),
            p: self.p,
            rhs: self.rhs[..n].to_vec(),
            dy: self.dy[..n].to_vec(),
        }
    }

    pub fn zero(&self, n: usize) -> Elem {
        vec![RatFunc::zero(); self.dim(n)]
    }

    pub fn one(&self, n: usize) -> Elem {
        self.constant(n, RatFunc::one())
    }

    pub fn constant(&self, n: usize, h: RatFunc) -> Elem {
        let mut v = self.zero(n);
        v[0] = h;
        v
    }

    pub fn monomial(&self, n: usize, idx: usize, h: RatFunc) -> Elem {
        let mut v = self.zero(n);
        v[idx] = h;
        v
    }

    /// The variable `y_i` in `K_n`.
    pub fn y(&self, n: usize, i: usize) -> Elem {
        self.monomial(n, self.p.pow(i as u32), RatFunc::one())
    }

    pub fn is_zero(&self, a: &Elem) -> bool {
        a.iter().all(RatFunc::is_zero)
    }

    /// Zero-pads an element of `K_m` into `K_n`, `m <= n`.
    pub fn embed(&self, a: &Elem, n: usize) -> Elem {
        let mut v = a.clone();
        v.resize(self.dim(n), RatFunc::zero());
        v
    }

    /// The component of `a` lying in `K_m` when `a` does not involve
    /// `y_m, ..., y_{n-1}`; `None` otherwise.
    pub fn restrict(&self, a: &Elem, m: usize) -> Option<Elem> {
        let d = self.dim(m);
        if a[d..].iter().all(RatFunc::is_zero) {
            Some(a[..d].to_vec())
        } else {
            None
        }
    }

    pub fn add(&self, a: &Elem, b: &Elem) -> Elem {
        let f = &self.field;
        a.iter().zip(b).map(|(x, y)| x.add(f, y)).collect()
    }

    pub fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        let f = &self.field;
        a.iter().zip(b).map(|(x, y)| x.sub(f, y)).collect()
    }

    pub fn neg(&self, _n: usize, a: &Elem) -> Elem {
        a.iter().map(|x| x.neg(&self.field)).collect()
    }

    pub fn scale(&self, a: &Elem, h: &RatFunc) -> Elem {
        a.iter().map(|x| x.mul(&self.field, h)).collect()
    }

    pub fn mul(&self, n: usize, a: &Elem, b: &Elem) -> Elem {
        let f = &self.field;
        if n == 0 {
            return vec![a[0].mul(f, &b[0])];
        }
        let p = self.p;
        let d = self.dim(n - 1);
        let a_nonzero: Vec<bool> = (0..p).map(|j| !self.is_zero(&a[j * d..(j + 1) * d].to_vec())).collect();
        let b_nonzero: Vec<bool> = (0..p).map(|j| !self.is_zero(&b[j * d..(j + 1) * d].to_vec())).collect();
        let mut c: Vec<Elem> = vec![self.zero(n - 1); 2 * p - 1];
        for j in 0..p {
            if !a_nonzero[j] {
                continue;
            }
            let aj = a[j * d..(j + 1) * d].to_vec();
            for k in 0..p {
                if !b_nonzero[k] {
                    continue;
                }
                let bk = b[k * d..(k + 1) * d].to_vec();
                let prod = self.mul(n - 1, &aj, &bk);
                c[j + k] = self.add(&c[j + k], &prod);
            }
        }
        let r = &self.rhs[n - 1];
        for t in (p..2 * p - 1).rev() {
            if self.is_zero(&c[t]) {
                continue;
            }
            let ct = std::mem::replace(&mut c[t], self.zero(n - 1));
            c[t - p + 1] = self.add(&c[t - p + 1], &ct);
            let cr = self.mul(n - 1, &ct, r);
            c[t - p] = self.add(&c[t - p], &cr);
        }
        c.truncate(p);
        c.concat()
    }

    pub fn pow(&self, n: usize, a: &Elem, mut e: u64) -> Elem {
        let mut base = a.clone();
        let mut acc = self.one(n);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(n, &acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(n, &base, &base);
            }
        }
        acc
    }

    /// `da/dx` (the coefficient of `dx` in `da`).
    pub fn derivative(&self, n: usize, a: &Elem) -> Elem {
        let f = &self.field;
        let p = self.p;
        let mut out: Elem = a.iter().map(|h| h.derivative(f)).collect();
        for i in 0..n {
            let stride = p.pow(i as u32);
            // partial derivative in y_i, as an element of K_n
            let mut part = self.zero(n);
            let mut any = false;
            for (idx, h) in a.iter().enumerate() {
                let bi = (idx / stride) % p;
                if bi == 0 || h.is_zero() {
                    continue;
                }
                let coeff = h.mul(f, &RatFunc::constant(f.from_int(bi as i64)));
                part[idx - stride] = part[idx - stride].add(f, &coeff);
                any = true;
            }
            if any {
                let dyi = self.embed(&self.dy[i], n);
                out = self.add(&out, &self.mul(n, &part, &dyi));
            }
        }
        out
    }

    /// Writes `a` in `K_n` as `sum_c (y^c)^p phi_c` with `phi_c` in F_q(x).
    pub fn p_decompose(&self, n: usize, a: &Elem) -> Vec<RatFunc> {
        if n == 0 {
            return vec![a[0].clone()];
        }
        let f = &self.field;
        let p = self.p;
        let d = self.dim(n - 1);
        let chunks: Vec<Elem> = (0..p).map(|j| a[j * d..(j + 1) * d].to_vec()).collect();
        let neg_r = self.neg(n - 1, &self.rhs[n - 1]);
        let mut powers = vec![self.one(n - 1)];
        for e in 1..p {
            powers.push(self.mul(n - 1, &powers[e - 1], &neg_r));
        }
        let mut out = vec![RatFunc::zero(); self.dim(n)];
        for m in 0..p {
            // W_m = sum_{j >= m} C(j, m) Z_j (-R)^{j-m}
            let mut w = self.zero(n - 1);
            for (j, zj) in chunks.iter().enumerate().skip(m) {
                if self.is_zero(zj) {
                    continue;
                }
                let binom = binomial(j, m) % p;
                if binom == 0 {
                    continue;
                }
                let term = self.mul(n - 1, zj, &powers[j - m]);
                let term = self.scale(&term, &RatFunc::constant(f.from_int(binom as i64)));
                w = self.add(&w, &term);
            }
            let sub = self.p_decompose(n - 1, &w);
            out[m * d..(m + 1) * d].clone_from_slice(&sub);
        }
        out
    }

    /// Cartier operator: the coefficient of `dx` in `V(a dx)`.
    pub fn cartier(&self, n: usize, a: &Elem) -> Elem {
        let f = &self.field;
        self.p_decompose(n, a).iter().map(|phi| cartier_rational(f, phi)).collect()
    }

    /// Trace from `K_n` to `K_{n-1}`: `-Z_{p-1}`.
    pub fn trace_step(&self, n: usize, a: &Elem) -> Elem {
        let d = self.dim(n - 1);
        let top = a[(self.p - 1) * d..self.p * d].to_vec();
        self.neg(n - 1, &top)
    }

    /// Trace from `K_n` down to `K_m`.
    pub fn trace_to(&self, n: usize, m: usize, a: &Elem) -> Elem {
        let mut cur = a.clone();
        for k in (m + 1..=n).rev() {
            cur = self.trace_step(k, &cur);
        }
        cur
    }

    /// Evaluates `a` in `K_n` at `y_i -> images[i]` (elements of `K_n`),
    /// with cached powers of the images.
    pub fn substitute(&self, n: usize, a: &Elem, powers: &[Vec<Elem>]) -> Elem {
        self.subst_rec(n, n, a, powers)
    }

    fn subst_rec(&self, top: usize, k: usize, a: &Elem, powers: &[Vec<Elem>]) -> Elem {
        if k == 0 {
            return self.constant(top, a[0].clone());
        }
        let d = self.dim(k - 1);
        let mut acc = self.zero(top);
        for j in 0..self.p {
            let chunk = a[j * d..(j + 1) * d].to_vec();
            if self.is_zero(&chunk) {
                continue;
            }
            let inner = self.subst_rec(top, k - 1, &chunk, powers);
            let term = if j == 0 { inner } else { self.mul(top, &inner, &powers[k - 1][j]) };
            acc = self.add(&acc, &term);
        }
        acc
    }

    /// `[1, Y, Y^2, ..., Y^{p-1}]` for each image `Y`.
    pub fn image_powers(&self, n: usize, images: &[Elem]) -> Vec<Vec<Elem>> {
        images
            .iter()
            .map(|y| {
                let mut v = vec![self.one(n)];
                for e in 1..self.p {
                    v.push(self.mul(n, &v[e - 1], y));
                }
                v
            })
            .collect()
    }

    /// A view of `K_n` as a [`Ring`].
    pub fn level(&self, n: usize) -> Level<'_> {
        Level { chain: self, n }
    }
}

/// `V(phi dx) = cartier_rational(phi) dx` for `phi` in F_q(x).
pub fn cartier_rational(f: &FieldDesc, phi: &RatFunc) -> RatFunc {
    use crate::poly::Poly;
    if phi.is_zero() {
        return RatFunc::zero();
    }
    let p = f.p() as usize;
    let den = phi.den();
    let m = phi.num().mul(f, &den.pow(f, (p - 1) as u64));
    let coeffs = m.coeffs();
    let mut out = Vec::new();
    let mut k = p - 1;
    while k < coeffs.len() {
        out.push(f.frobenius(coeffs[k], -1));
        k += p;
    }
    RatFunc::new(f, Poly::from_coeffs(out), den.clone())
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r as usize
}

/// `K_n` as a ring.
#[derive(Clone, Copy)]
pub struct Level<'a> {
    pub chain: &'a AsChain,
    pub n: usize,
}

impl Ring for Level<'_> {
    type Elem = Elem;

    fn zero(&self) -> Elem {
        self.chain.zero(self.n)
    }
    fn one(&self) -> Elem {
        self.chain.one(self.n)
    }
    fn from_int(&self, k: i64) -> Elem {
        self.chain.constant(self.n, RatFunc::constant(self.chain.field.from_int(k)))
    }
    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.chain.add(a, b)
    }
    fn neg(&self, a: &Elem) -> Elem {
        self.chain.neg(self.n, a)
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.chain.mul(self.n, a, b)
    }
    fn is_zero(&self, a: &Elem) -> bool {
        self.chain.is_zero(a)
    }
}
