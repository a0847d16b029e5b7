//! The Galois action on differentials and on `H^1_dR`, Jordan types of
//! unipotent operators, freeness checks, étale covers and the control maps
//! between levels.

use serde::Serialize;

use crate::curve::{AsChain, CurveModel, Elem, StepType};
use crate::derham::torsion::{stable_image, stable_kernel};
use crate::derham::{cartier_matrix, holo_diff_basis, DeRham, DifferentialBasis};
use crate::error::{CohomologyError, ModelError};
use crate::field::{FieldDesc, Fq};
use crate::matrix::Matrix;
use crate::ratfunc::{Place, RatFunc};
use crate::tower::TowerSpec;

/// Matrix of the pullback by the generator on a differential basis.
pub fn galois_action_matrix(
    model: &CurveModel,
    basis: &DifferentialBasis,
) -> Result<Matrix, CohomologyError> {
    basis
        .matrix_of(model.field(), |w| model.act(w, 1))
        .map_err(|e| CohomologyError::ActionNotClosed(e.to_string()))
}

/// Matrix of the pullback by the generator on `H^1_dR`.
pub fn galois_action_de_rham(model: &CurveModel, dr: &DeRham) -> Result<Matrix, CohomologyError> {
    let f = model.field();
    let g = dr.g();
    let mut cols = Vec::with_capacity(2 * g);
    for w in &dr.holo.elems {
        let mut c = dr.holo.coordinates(f, &model.act(w, 1))?;
        c.resize(2 * g, Fq::ZERO);
        cols.push(c);
    }
    for l in &dr.lifts {
        cols.push(dr.class_coordinates(model, &model.act(&l.omega1, 1), &model.act(&l.f, 1))?);
    }
    Ok(Matrix::from_cols(2 * g, &cols))
}

/// Block sizes of the nilpotent operator `M - 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JordanType {
    pub group_order: u64,
    /// Block sizes, largest first.
    pub blocks: Vec<usize>,
}

impl JordanType {
    pub fn dim(&self) -> usize {
        self.blocks.iter().sum()
    }

    /// Free over `k[Z/p^n]` iff every block has size `p^n`.
    pub fn is_free(&self) -> bool {
        self.blocks.iter().all(|&b| b as u64 == self.group_order)
    }

    pub fn free_rank(&self) -> Option<usize> {
        self.is_free().then_some(self.blocks.len())
    }
}

pub fn jordan_type(f: &FieldDesc, m: &Matrix, group_order: u64) -> Result<JordanType, CohomologyError> {
    let n = m.rows();
    let nil = m.sub(f, &Matrix::identity(n));
    let top = (group_order as usize).min(n.max(1));
    let mut ranks = vec![n];
    let mut pw = Matrix::identity(n);
    for _ in 0..top {
        pw = pw.mul(f, &nil);
        ranks.push(pw.rank(f));
    }
    if *ranks.last().unwrap() != 0 {
        return Err(CohomologyError::NotUnipotent);
    }
    ranks.push(0);
    let mut blocks = Vec::new();
    for i in 1..=top {
        let at_least_i = ranks[i - 1] - ranks[i];
        let at_least_next = ranks[i] - ranks[i + 1];
        blocks.extend(std::iter::repeat_n(i, at_least_i - at_least_next));
    }
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    Ok(JordanType { group_order, blocks })
}

/// Solves `basis * X = m * basis` for the action restricted to an invariant
/// subspace given by a column basis.
pub fn restrict(f: &FieldDesc, m: &Matrix, basis: &Matrix) -> Result<Matrix, CohomologyError> {
    if basis.cols() == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    basis
        .solve_matrix(f, &m.mul(f, basis))
        .ok_or_else(|| CohomologyError::ActionNotClosed("subspace is not invariant".into()))
}

#[derive(Clone, Debug, Serialize)]
pub struct NakajimaReport {
    pub level: usize,
    pub expected_rank: usize,
    pub dim: usize,
    pub jordan: JordanType,
    pub free: bool,
    pub pass: bool,
}

/// Jordan type of the generator on the V-bijective part of `H^0(Omega^1(S))`
/// of the level-n curve; passes iff free of rank `deg S - 1` (the base is
/// P^1, of p-rank 0).
pub fn nakajima_check(
    spec: &TowerSpec,
    n: usize,
    modulus: &[Place],
    gmax: u64,
) -> Result<NakajimaReport, CohomologyError> {
    let model = CurveModel::from_tower(spec, n)?;
    let f = model.field();
    let basis = holo_diff_basis(&model, modulus, gmax)?;
    let v = cartier_matrix(&model, &basis)?;
    let part = stable_image(f, &v);
    let act = galois_action_matrix(&model, &basis)?;
    let jordan = jordan_type(f, &restrict(f, &act, &part)?, model.group_order)?;
    let deg_s: u64 = basis.modulus.iter().map(|q| q.degree() as u64).sum();
    let expected_rank = deg_s.saturating_sub(1) as usize;
    let free = jordan.is_free();
    let pass = free && jordan.blocks.len() == expected_rank;
    Ok(NakajimaReport { level: n, expected_rank, dim: part.cols(), jordan, free, pass })
}

/// An étale Z/p-cover `Y -> X` of the Artin-Schreier curve
/// `X: y^p - y = f0`, given by `z^p - z = r` with `r` in F_q(x). The cover
/// is the fibre product `z^p - z = r`, `w^p - w = f0 - r` with `y = z + w`.
#[derive(Clone, Debug)]
pub struct EtaleCover {
    pub base: CurveModel,
    pub cover: CurveModel,
    pub r: RatFunc,
}

impl EtaleCover {
    pub fn new(field: &FieldDesc, f0: &RatFunc, r: &RatFunc) -> Result<EtaleCover, CohomologyError> {
        let base = base_curve(field, f0)?;
        let c1 = AsChain::new(field.clone());
        let rhs = vec![c1.constant(0, r.clone()), c1.constant(1, f0.sub(field, r))];
        let mut chain = AsChain::new(field.clone());
        chain.push(rhs[0].clone());
        chain.push(rhs[1].clone());
        let one = chain.one(2);
        let gen = vec![
            chain.add(&chain.y(2, 0), &one),
            chain.sub(&chain.y(2, 1), &one),
        ];
        let p = field.p() as u64;
        let cover = CurveModel::from_chain("etale cover", field, rhs, gen, p)?;
        // étale iff every ramification index upstairs equals the one downstairs
        for d in &cover.places {
            let e_cover = cover.local_view(&d.place).e;
            let e_base = base.local_view(&d.place).e;
            if e_cover != e_base {
                return Err(CohomologyError::CoverNotEtale(format!(
                    "ramification index {e_cover} above {} against {e_base} on the base",
                    d.place.label(field)
                )));
            }
        }
        Ok(EtaleCover { base, cover, r: r.clone() })
    }

    /// The trivial cover `X -> X`.
    pub fn trivial(field: &FieldDesc, f0: &RatFunc) -> Result<EtaleCover, CohomologyError> {
        let base = base_curve(field, f0)?;
        let mut cover = base.clone();
        cover.generator = vec![base.chain.y(1, 0)];
        cover.group_order = 1;
        Ok(EtaleCover { base, cover, r: RatFunc::zero() })
    }
}

fn base_curve(field: &FieldDesc, f0: &RatFunc) -> Result<CurveModel, ModelError> {
    let c = AsChain::new(field.clone());
    let rhs = vec![c.constant(0, f0.clone())];
    let mut one_step = AsChain::new(field.clone());
    one_step.push(rhs[0].clone());
    let gen = vec![one_step.add(&one_step.y(1, 0), &one_step.one(1))];
    CurveModel::from_chain("base", field, rhs, gen, field.p() as u64)
}

/// Splittings `f0 = r + (f0 - r)` into Laurent polynomials with prime-field
/// coefficients and exponents in `[-height, height]` giving an étale cover;
/// the search order is deterministic.
pub fn find_etale_covers(
    field: &FieldDesc,
    f0: &RatFunc,
    height: i64,
    limit: usize,
) -> Vec<RatFunc> {
    let p = field.p() as u64;
    let width = (2 * height + 1) as u32;
    let total = p.saturating_pow(width);
    let mut out = Vec::new();
    for code in 1..total {
        let mut r = RatFunc::zero();
        let mut c = code;
        for k in -height..=height {
            let a = c % p;
            c /= p;
            if a != 0 {
                r = r.add(field, &RatFunc::monomial(Fq(a as u32), k));
            }
        }
        if splits_ramification(field, f0, &r) && EtaleCover::new(field, f0, &r).is_ok() {
            out.push(r);
            if out.len() >= limit {
                break;
            }
        }
    }
    out
}

/// Both halves ramify somewhere and no half has poles of its own.
fn splits_ramification(field: &FieldDesc, f0: &RatFunc, r: &RatFunc) -> bool {
    let s = f0.sub(field, r);
    let nonconst = |h: &RatFunc| !(h.is_poly() && h.num().degree() <= 0);
    nonconst(r) && nonconst(&s)
}

#[derive(Clone, Debug, Serialize)]
pub struct NakajimaLlReport {
    pub cover_genus: u64,
    pub base_genus: u64,
    pub base_p_rank: u64,
    pub expected_rank: usize,
    pub dim: usize,
    pub jordan: JordanType,
    pub pass: bool,
}

/// Jordan type of the deck generator on `H^0(Omega^1)^{V-nil}` of an étale
/// cover; passes iff free of rank `g - gamma` of the base.
pub fn nakajima_ll_check(cover: &EtaleCover, gmax: u64) -> Result<NakajimaLlReport, CohomologyError> {
    let model = &cover.cover;
    let f = model.field();
    let basis = holo_diff_basis(model, &[], gmax)?;
    let v = cartier_matrix(model, &basis)?;
    let part = stable_kernel(f, &v);
    let act = galois_action_matrix(model, &basis)?;
    let jordan = jordan_type(f, &restrict(f, &act, &part)?, model.group_order)?;
    let base_genus = cover.base.genus();
    let base_p_rank = cover.base.p_rank();
    let expected_rank = (base_genus - base_p_rank) as usize;
    let pass = jordan.is_free() && jordan.blocks.len() == expected_rank;
    Ok(NakajimaLlReport {
        cover_genus: model.genus(),
        base_genus,
        base_p_rank,
        expected_rank,
        dim: part.cols(),
        jordan,
        pass,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlReport {
    pub n: usize,
    pub m: usize,
    pub dim_n: usize,
    pub dim_m: usize,
    pub trace_surjective: bool,
    pub pullback_injective: bool,
    /// `pi_* pi^* = p^{n-m}` (zero mod p when `n > m`).
    pub push_pull: bool,
    /// `pi^* pi_* = sum over Gal(X_n/X_m)` of the pullbacks.
    pub pull_push: bool,
    pub coinvariant_dim: usize,
    pub bijective_dim_m: usize,
    /// The trace induces an isomorphism from the coinvariants of the
    /// V-bijective part at level n onto the V-bijective part at level m.
    pub coinvariants_iso: bool,
    /// The generator commutes with the Cartier operator at level n.
    pub commutes_with_cartier: bool,
}

impl ControlReport {
    pub fn pass(&self) -> bool {
        self.trace_surjective
            && self.pullback_injective
            && self.push_pull
            && self.pull_push
            && self.coinvariant_dim == self.bijective_dim_m
            && self.coinvariants_iso
            && self.commutes_with_cartier
    }
}

pub fn control_check(
    spec: &TowerSpec,
    n: usize,
    m: usize,
    modulus: &[Place],
    gmax: u64,
) -> Result<ControlReport, CohomologyError> {
    assert!(m <= n, "control maps go down the tower");
    let top = CurveModel::from_tower(spec, n)?;
    let low = top.truncate(m);
    let f = top.field();
    let chain = &top.chain;
    let bn = holo_diff_basis(&top, modulus, gmax)?;
    let bm = holo_diff_basis(&low, modulus, gmax)?;
    let cols = bn
        .elems
        .iter()
        .map(|w| bm.coordinates(f, &chain.trace_to(n, m, w)))
        .collect::<Result<Vec<_>, _>>()?;
    let trace = Matrix::from_cols(bm.len(), &cols);
    let cols = bm
        .elems
        .iter()
        .map(|w| bn.coordinates(f, &chain.embed(w, n)))
        .collect::<Result<Vec<_>, _>>()?;
    let pull = Matrix::from_cols(bn.len(), &cols);

    let p = top.p() as u64;
    let act = galois_action_matrix(&top, &bn)?;
    let sub_gen = act.pow(f, p.pow(m as u32));
    let deg = p.pow((n - m) as u32);
    let mut norm = Matrix::zeros(bn.len(), bn.len());
    let mut pw = Matrix::identity(bn.len());
    for _ in 0..deg {
        norm = norm.add(f, &pw);
        pw = pw.mul(f, &sub_gen);
    }
    let push_pull_target = if n > m { Matrix::zeros(bm.len(), bm.len()) } else { Matrix::identity(bm.len()) };

    let vn = cartier_matrix(&top, &bn)?;
    let vm = cartier_matrix(&low, &bm)?;
    let wn = stable_image(f, &vn);
    let wm = stable_image(f, &vm);
    let restricted = restrict(f, &sub_gen, &wn)?;
    let aug = restricted.sub(f, &Matrix::identity(wn.cols()));
    let coinvariant_dim = wn.cols() - aug.rank(f);
    let trace_on_w = trace.mul(f, &wn);
    let image_rank = trace_on_w.rank(f);
    let coinvariants_iso = image_rank == wm.cols()
        && wm.hstack(&trace_on_w).rank(f) == wm.cols()
        && wn.cols() - image_rank == aug.rank(f);
    let commutes = vn.matrix.mul(f, &act.frobenius(f, -1)) == act.mul(f, &vn.matrix);

    Ok(ControlReport {
        n,
        m,
        dim_n: bn.len(),
        dim_m: bm.len(),
        trace_surjective: trace.rank(f) == bm.len(),
        pullback_injective: pull.rank(f) == bm.len(),
        push_pull: trace.mul(f, &pull) == push_pull_target,
        pull_push: pull.mul(f, &trace) == norm,
        coinvariant_dim,
        bijective_dim_m: wm.cols(),
        coinvariants_iso,
        commutes_with_cartier: commutes,
    })
}

/// Element of `K_n` fixed check helper used by tests: `gamma^k(a) == a`.
pub fn is_fixed(model: &CurveModel, a: &Elem, k: u64) -> bool {
    &model.act(a, k) == a
}

/// Ramification pattern of a model, for reports.
pub fn ramified_places(model: &CurveModel) -> Vec<(Place, Vec<u64>)> {
    model
        .places
        .iter()
        .filter_map(|d| {
            let breaks: Vec<u64> = d
                .steps
                .iter()
                .filter_map(|s| match s {
                    StepType::Ramified(b) => Some(*b),
                    StepType::Etale => None,
                })
                .collect();
            (!breaks.is_empty()).then(|| (d.place.clone(), breaks))
        })
        .collect()
}
