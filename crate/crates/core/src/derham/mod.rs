//! Differentials, the Cartier operator, the Hasse-Witt matrix and the mod-p
//! Dieudonne module `H^1_dR` with its Frobenius, Verschiebung and cup
//! product, computed on the Čech cover `{x != inf}`, `{x != 0}`.

pub mod spaces;
pub mod torsion;

use crate::curve::{CurveModel, Elem};
use crate::error::{CohomologyError, ModelError};
use crate::field::{FieldDesc, Fq};
use crate::matrix::Matrix;
use crate::ratfunc::{Place, RatFunc};
use crate::semilinear::SemilinearMap;

pub use spaces::{Kind, MonomialBasis, SlotSpace};
pub use torsion::{decompose_parts, torsion_order, JIdeal, Letter, Part, Parts};

/// Monomial basis of `H^0(Omega^1(S))` (of `H^0(Omega^1)` when `S` is empty).
#[derive(Clone, Debug)]
pub struct DifferentialBasis {
    pub modulus: Vec<Place>,
    pub space: SlotSpace,
    pub basis: MonomialBasis,
    /// The basis differentials `h dx`, as `h`.
    pub elems: Vec<Elem>,
}

impl DifferentialBasis {
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn coordinates(&self, f: &FieldDesc, z: &Elem) -> Result<Vec<Fq>, CohomologyError> {
        spaces::coordinates(f, &self.space, &self.basis, z)
    }

    /// Matrix whose columns are the coordinates of `op` applied to the basis.
    pub fn matrix_of(
        &self,
        f: &FieldDesc,
        op: impl Fn(&Elem) -> Elem,
    ) -> Result<Matrix, CohomologyError> {
        let cols = self
            .elems
            .iter()
            .map(|w| self.coordinates(f, &op(w)))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_cols(self.len(), &cols))
    }
}

pub(crate) fn check_genus(model: &CurveModel, gmax: u64) -> Result<(), ModelError> {
    let g = model.genus();
    if g > gmax {
        return Err(ModelError::GenusCapExceeded { genus: g, cap: gmax });
    }
    Ok(())
}

/// Basis of `H^0(Omega^1(S))`; `S` empty gives the holomorphic differentials.
pub fn holo_diff_basis(
    model: &CurveModel,
    modulus: &[Place],
    gmax: u64,
) -> Result<DifferentialBasis, CohomologyError> {
    check_genus(model, gmax)?;
    let f = model.field();
    let mut modulus = modulus.to_vec();
    modulus.sort();
    modulus.dedup();
    let space = SlotSpace::new(model, Kind::Differential, &modulus);
    let basis = MonomialBasis::new(space.global_monomials());
    let elems = basis.monomials.iter().map(|&(idx, j)| space.element(f, idx, j)).collect();
    Ok(DifferentialBasis { modulus, space, basis, elems })
}

/// The Cartier operator on a differential basis (twist -1).
pub fn cartier_matrix(
    model: &CurveModel,
    basis: &DifferentialBasis,
) -> Result<SemilinearMap, CohomologyError> {
    let n = model.level();
    let m = basis.matrix_of(model.field(), |w| model.chain.cartier(n, w))?;
    Ok(SemilinearMap::new(m, -1))
}

/// A Čech-de Rham cocycle `(omega_1, omega_2, f)` with `df = omega_1 - omega_2`.
#[derive(Clone, Debug)]
pub struct Lift {
    pub omega1: Elem,
    pub omega2: Elem,
    pub f: Elem,
}

/// `H^1_dR` with F, V, Hodge indices and the cup-product Gram matrix.
/// The basis is the holomorphic differentials followed by lifts of the
/// monomial basis of `H^1(O)`.
#[derive(Clone, Debug)]
pub struct ModPDieudonne {
    pub field: FieldDesc,
    pub g: usize,
    pub frobenius: SemilinearMap,
    pub verschiebung: SemilinearMap,
    pub hodge: Vec<usize>,
    pub gram: Matrix,
}

impl ModPDieudonne {
    pub fn dim(&self) -> usize {
        2 * self.g
    }
}

/// Everything computed along the way to the Dieudonne module.
#[derive(Clone, Debug)]
pub struct DeRham {
    pub holo: DifferentialBasis,
    pub functions: SlotSpace,
    /// Monomial basis of `H^1(O)`.
    pub h1: MonomialBasis,
    pub lifts: Vec<Lift>,
    pub module: ModPDieudonne,
}

impl DeRham {
    pub fn new(model: &CurveModel, gmax: u64) -> Result<DeRham, CohomologyError> {
        let f = model.field().clone();
        let n = model.level();
        let chain = &model.chain;
        let holo = holo_diff_basis(model, &[], gmax)?;
        let functions = SlotSpace::new(model, Kind::Function, &[]);
        let h1 = MonomialBasis::new(functions.gap_monomials());
        let g = holo.len();
        if h1.len() != g {
            return Err(CohomologyError::Lift(format!(
                "dim H^0(Omega^1) = {g} but dim H^1(O) = {}",
                h1.len()
            )));
        }
        let local_diffs = SlotSpace::new(model, Kind::Differential, &[]);
        let mut lifts = Vec::with_capacity(g);
        for &(idx, j) in &h1.monomials {
            let fk = functions.element(&f, idx, j);
            let df = chain.derivative(n, &fk);
            let s = local_diffs.split(&f, &df)?;
            if !s.gap.is_empty() {
                return Err(CohomologyError::Lift("df has a nonzero residue class".into()));
            }
            let omega2 = chain.neg(n, &s.z2);
            lifts.push(Lift { omega1: s.z1, omega2, f: fk });
        }
        let mut dr = DeRham {
            holo,
            functions,
            h1,
            lifts,
            module: ModPDieudonne {
                field: f.clone(),
                g,
                frobenius: SemilinearMap::zero(0, 1),
                verschiebung: SemilinearMap::zero(0, -1),
                hodge: (0..g).collect(),
                gram: Matrix::zeros(0, 0),
            },
        };
        dr.module.frobenius = dr.frobenius(model)?;
        dr.module.verschiebung = dr.verschiebung(model)?;
        dr.module.gram = dr.gram(model);
        Ok(dr)
    }

    pub fn g(&self) -> usize {
        self.holo.len()
    }

    /// Coordinates of the class of `(omega1, *, phi)`; the second
    /// differential is determined by `d phi = omega1 - omega2`.
    pub fn class_coordinates(
        &self,
        model: &CurveModel,
        omega1: &Elem,
        phi: &Elem,
    ) -> Result<Vec<Fq>, CohomologyError> {
        let f = model.field();
        let n = model.level();
        let chain = &model.chain;
        let g = self.g();
        let s = self.functions.split(f, phi)?;
        let mut out = vec![Fq::ZERO; 2 * g];
        let mut eta = chain.sub(omega1, &chain.derivative(n, &s.z1));
        for (m, c) in s.gap {
            let k = self.h1.position(m).expect("gap monomial");
            out[g + k] = c;
            eta = chain.sub(&eta, &chain.scale(&self.lifts[k].omega1, &RatFunc::constant(c)));
        }
        let hc = self.holo.coordinates(f, &eta)?;
        out[..g].copy_from_slice(&hc);
        Ok(out)
    }

    fn frobenius(&self, model: &CurveModel) -> Result<SemilinearMap, CohomologyError> {
        let g = self.g();
        let n = model.level();
        let p = model.p() as u64;
        let zero = model.chain.zero(n);
        let mut cols = vec![vec![Fq::ZERO; 2 * g]; g];
        for l in &self.lifts {
            let fp = model.chain.pow(n, &l.f, p);
            cols.push(self.class_coordinates(model, &zero, &fp)?);
        }
        Ok(SemilinearMap::new(Matrix::from_cols(2 * g, &cols), 1))
    }

    fn verschiebung(&self, model: &CurveModel) -> Result<SemilinearMap, CohomologyError> {
        let f = model.field();
        let g = self.g();
        let n = model.level();
        let chain = &model.chain;
        let mut cols = Vec::with_capacity(2 * g);
        let pad = |mut v: Vec<Fq>| {
            v.resize(2 * g, Fq::ZERO);
            v
        };
        for w in &self.holo.elems {
            cols.push(pad(self.holo.coordinates(f, &chain.cartier(n, w))?));
        }
        for l in &self.lifts {
            let v1 = chain.cartier(n, &l.omega1);
            if v1 != chain.cartier(n, &l.omega2) {
                return Err(CohomologyError::Lift("V(omega1) != V(omega2)".into()));
            }
            cols.push(pad(self.holo.coordinates(f, &v1)?));
        }
        Ok(SemilinearMap::new(Matrix::from_cols(2 * g, &cols), -1))
    }

    /// The element `(omega1, omega2, f)` of basis vector `i`.
    fn cocycle(&self, model: &CurveModel, i: usize) -> (Elem, Elem, Elem) {
        let g = self.g();
        if i < g {
            let w = self.holo.elems[i].clone();
            (w.clone(), w, model.chain.zero(model.level()))
        } else {
            let l = &self.lifts[i - g];
            (l.omega1.clone(), l.omega2.clone(), l.f.clone())
        }
    }

    /// `<a, b> = sum over places above infinity of res(f_b omega1_a - f_a omega2_b)`.
    pub fn pairing(&self, model: &CurveModel, a: usize, b: usize) -> Fq {
        let f = model.field();
        let n = model.level();
        let chain = &model.chain;
        let (a1, _, fa) = self.cocycle(model, a);
        let (_, b2, fb) = self.cocycle(model, b);
        let h = chain.sub(&chain.mul(n, &fb, &a1), &chain.mul(n, &fa, &b2));
        let tr = chain.trace_to(n, 0, &h);
        spaces::residue_at_infinity(f, &tr[0])
    }

    fn gram(&self, model: &CurveModel) -> Matrix {
        let d = 2 * self.g();
        let mut m = Matrix::zeros(d, d);
        for a in 0..d {
            for b in 0..d {
                if a < self.g() && b < self.g() {
                    continue;
                }
                m.set(a, b, self.pairing(model, a, b));
            }
        }
        m
    }

    /// The Frobenius of `H^1(O)` read off the Dieudonne module.
    pub fn hasse_witt_direct(&self) -> SemilinearMap {
        let g = self.g();
        SemilinearMap::new(self.module.frobenius.matrix.block(g, 2 * g, g, 2 * g), 1)
    }

    /// Pairing between holomorphic differentials (rows) and `H^1(O)`.
    pub fn serre_pairing(&self) -> Matrix {
        let g = self.g();
        self.module.gram.block(0, g, g, 2 * g)
    }
}

/// The full mod-p Dieudonne module of a level curve.
pub fn full_dieudonne_mod_p(model: &CurveModel, gmax: u64) -> Result<ModPDieudonne, CohomologyError> {
    Ok(DeRham::new(model, gmax)?.module)
}

/// Frobenius on `H^1(O)` as the Serre-dual adjoint of the Cartier operator:
/// `<w, F u> = <V w, u>^sigma`, so `H = P^{-1} sigma(C^T P)`.
pub fn hasse_witt_matrix(model: &CurveModel, gmax: u64) -> Result<SemilinearMap, CohomologyError> {
    let dr = DeRham::new(model, gmax)?;
    hasse_witt_from(&dr, model)
}

pub fn hasse_witt_from(dr: &DeRham, model: &CurveModel) -> Result<SemilinearMap, CohomologyError> {
    let f = model.field();
    let c = cartier_matrix(model, &dr.holo)?.matrix;
    let pm = dr.serre_pairing();
    let pinv = pm.inverse(f)?;
    let rhs = c.transpose().mul(f, &pm).frobenius(f, 1);
    Ok(SemilinearMap::new(pinv.mul(f, &rhs), 1))
}

/// Outcome of the structural identities of a Dieudonne module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relations {
    pub fv_zero: bool,
    pub vf_zero: bool,
    pub f_kills_hodge: bool,
    pub v_into_hodge: bool,
    pub adjoint: bool,
    pub gram_antisymmetric: bool,
    pub gram_invertible: bool,
}

impl Relations {
    pub fn all(&self) -> bool {
        self.fv_zero
            && self.vf_zero
            && self.f_kills_hodge
            && self.v_into_hodge
            && self.adjoint
            && self.gram_antisymmetric
            && self.gram_invertible
    }
}

/// Checks `FV = VF = 0`, `F = 0` on the Hodge part, `V` lands in the Hodge
/// part, `<Fx, y> = sigma <x, Vy>` and that the Gram matrix is alternating
/// and invertible.
pub fn relations(d: &ModPDieudonne) -> Relations {
    let f = &d.field;
    let n = d.dim();
    let fm = &d.frobenius;
    let vm = &d.verschiebung;
    let fv = fm.compose(f, vm).expect("square");
    let vf = vm.compose(f, fm).expect("square");
    let hodge_cols = d.frobenius.matrix.select_cols(&d.hodge);
    let non_hodge: Vec<usize> = (0..n).filter(|i| !d.hodge.contains(i)).collect();
    let v_rest = vm.matrix.select_rows(&non_hodge);
    let lhs = fm.matrix.transpose().mul(f, &d.gram);
    let rhs = d.gram.mul(f, &vm.matrix).frobenius(f, 1);
    let minus = d.gram.transpose().scale(f, f.neg(Fq::ONE));
    let diag_zero = (0..n).all(|i| d.gram.get(i, i).is_zero());
    Relations {
        fv_zero: fv.matrix.is_zero() && fv.twist == 0,
        vf_zero: vf.matrix.is_zero() && vf.twist == 0,
        f_kills_hodge: hodge_cols.is_zero(),
        v_into_hodge: v_rest.is_zero(),
        adjoint: lhs == rhs,
        gram_antisymmetric: d.gram == minus && diag_zero,
        gram_invertible: d.gram.rank(f) == n,
    }
}

/// `dim ker V` on the holomorphic differentials.
pub fn a_number(model: &CurveModel, gmax: u64) -> Result<usize, CohomologyError> {
    let basis = holo_diff_basis(model, &[], gmax)?;
    let v = cartier_matrix(model, &basis)?;
    Ok(basis.len() - v.rank(model.field()))
}
