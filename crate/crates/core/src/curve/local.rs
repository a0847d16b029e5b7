//! Valuations above a point of P^1 in the monomial basis `y^b`.
//!
//! Above a point `Q`, a ramified step with break `D` contributes a variable
//! of valuation `-D` (in the valuation of its own level) and an étale step
//! contributes a variable that is part of a local integral basis. Hence
//! `v(sum_b h_b y^b) >= c` at every place above `Q` iff for every `b`,
//! `v_Q(h_b) >= ceil((c + sum_i b_i w_i) / e)` with the weights `w_i` below.

use crate::error::ModelError;
use crate::field::{FieldDesc, Fq};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::ratfunc::{Place, RatFunc, ResidueField};

use super::chain::{digits, AsChain, Elem};
use super::{ceil_div, PlaceData, StepType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalView {
    /// Ramification index.
    pub e: i64,
    pub ramified: Vec<bool>,
    /// `w_i = D_i p^{#ramified steps after i}` for ramified steps, else 0.
    pub weights: Vec<i64>,
    /// Different exponent at each place above the point.
    pub delta: i64,
}

impl LocalView {
    pub fn from_steps(p: i64, steps: &[StepType]) -> Self {
        let n = steps.len();
        let mut weights = vec![0; n];
        let mut ramified = vec![false; n];
        let mut e = 1;
        let mut delta = 0;
        for (i, s) in steps.iter().enumerate() {
            if let StepType::Ramified(d) = *s {
                let d = d as i64;
                ramified[i] = true;
                delta = p * delta + (p - 1) * (d + 1);
                e *= p;
                for w in weights.iter_mut().take(i) {
                    *w *= p;
                }
                weights[i] = d;
            }
        }
        LocalView { e, ramified, weights, delta }
    }

    pub fn ramified_count(&self) -> usize {
        self.ramified.iter().filter(|&&r| r).count()
    }

    /// `sum_i b_i w_i` for the flat index `idx`.
    pub fn weight(&self, p: usize, idx: usize) -> i64 {
        digits(p, self.weights.len(), idx).iter().zip(&self.weights).map(|(&b, &w)| b as i64 * w).sum()
    }

    /// Least `v_Q` allowed for the coefficient of `y^b` so that the term has
    /// valuation at least `c` at every place above the point.
    pub fn bound(&self, p: usize, idx: usize, c: i64) -> i64 {
        ceil_div(c + self.weight(p, idx), self.e)
    }

    /// `min_b (e v_Q(h_b) - sum b_i w_i)` and the index attaining it.
    pub fn min_valuation(&self, f: &FieldDesc, q: &Place, a: &Elem) -> Option<(i64, usize)> {
        let p = p_of(f);
        a.iter()
            .enumerate()
            .filter(|(_, h)| !h.is_zero())
            .map(|(idx, h)| (self.e * h.valuation(f, q).unwrap() - self.weight(p, idx), idx))
            .min()
    }

    /// Leading coefficient (a residue) at the unique place above `q`.
    pub fn leading(&self, f: &FieldDesc, q: &Place, a: &Elem) -> Option<(i64, usize, Poly)> {
        let (m, idx) = self.min_valuation(f, q, a)?;
        let (_, lc) = a[idx].leading(f, q)?;
        Some((m, idx, lc))
    }
}

fn p_of(f: &FieldDesc) -> usize {
    f.p() as usize
}

/// A function `g` in `K_i` with poles only above `q`, of valuation `m / p`,
/// whose p-th power has the same leading term as `r` (valuation `m`).
pub(super) fn reduction_term(
    chain: &AsChain,
    places: &[PlaceData],
    q: &Place,
    view: &LocalView,
    r: &Elem,
    m: i64,
) -> Result<Elem, ModelError> {
    let f = &chain.field;
    let p = chain.p;
    let i = chain.len();
    let k = -m / p as i64;
    let fail = |reason: &str| ModelError::NotNormalizable { place: q.label(f), reason: reason.into() };
    let (_, _, lc_r) = view.leading(f, q, r).expect("nonzero");
    // monomial y^b with sum b w = k mod e
    let idx = (0..chain.dim(i))
        .find(|&idx| (view.weight(p, idx) - k).rem_euclid(view.e) == 0)
        .ok_or_else(|| fail("no monomial of the required valuation"))?;
    let a = (view.weight(p, idx) - k) / view.e;

    // exponent window for h = x^j * base with the exact valuation a at q
    let mut base = RatFunc::one();
    let mut lo: Option<i64> = None;
    let mut hi_shift: Option<i64> = None;
    for d in places {
        let v = if &d.place == q {
            view.clone()
        } else {
            LocalView::from_steps(p as i64, &d.steps)
        };
        let c = if &d.place == q { a } else { v.bound(p, idx, 0) };
        match &d.place {
            Place::Infinity => hi_shift = Some(c),
            pl if pl.is_zero_point() => lo = Some(c),
            Place::Finite(pi) => {
                base = base.mul(f, &RatFunc::from_poly(pi.clone()).pow(f, c));
            }
        }
    }
    let lo = lo.unwrap_or(0);
    let hi = base.valuation(f, &Place::Infinity).unwrap() - hi_shift.unwrap_or(0);
    let js: Vec<i64> = match q {
        Place::Infinity => vec![hi],
        pl if pl.is_zero_point() => vec![lo],
        _ => (lo..=hi).take(q.degree() as usize).collect(),
    };
    if js.is_empty() || js.iter().any(|&j| j < lo || j > hi) {
        return Err(fail("Riemann-Roch space has a gap at the required pole order"));
    }
    let cands: Vec<Elem> = js
        .iter()
        .map(|&j| chain.monomial(i, idx, base.mul(f, &RatFunc::monomial(Fq::ONE, j))))
        .collect();

    // lambda = lc(mu^p) for the normal monomial mu = t^a y^b
    let t = q.uniformizer(f);
    let mu = chain.monomial(i, idx, t.pow(f, a));
    let mu_p = chain.pow(i, &mu, p as u64);
    let (vm, _, lambda) = view.leading(f, q, &mu_p).expect("nonzero");
    debug_assert_eq!(vm, m);
    let res = ResidueField::new(f, q);
    let target = res.pth_root(&res.div(&lc_r, &lambda));

    // solve sum_l a_l lc(g_l) = target over F_q
    let d = q.degree() as usize;
    let coords = |x: &Poly| (0..d).map(|k| x.coeff(k)).collect::<Vec<Fq>>();
    let cols: Vec<Vec<Fq>> = cands
        .iter()
        .map(|g| coords(&res.reduce(&view.leading(f, q, g).expect("nonzero").2)))
        .collect();
    let mat = Matrix::from_cols(d, &cols);
    let sol = mat.solve(f, &coords(&target)).ok_or_else(|| fail("leading coefficient unreachable"))?;
    let mut g = chain.zero(i);
    for (c, s) in cands.iter().zip(sol) {
        g = chain.add(&g, &chain.scale(c, &RatFunc::constant(s)));
    }
    Ok(g)
}
