//! Explicit models of the level curves: chains of Artin-Schreier equations
//! over F_q(x), local ramification data at every special point, and the
//! generator of the Galois action.

pub mod chain;
mod local;

use num_integer::Integer;

use crate::error::ModelError;
use crate::field::FieldDesc;
use crate::ratfunc::{ratfunc_to_string, Place, RatFunc};
use crate::tower::{irreducible_factors, normalize_asw, TowerSpec};
use crate::witt;

pub use chain::{digits, flat_index, AsChain, Elem};
pub use local::LocalView;

/// Behaviour of one Artin-Schreier step above a point of P^1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepType {
    Etale,
    /// Totally ramified with break `D` (the pole order of the right-hand
    /// side in the valuation of the previous level).
    Ramified(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaceData {
    pub place: Place,
    pub steps: Vec<StepType>,
}

/// A curve given by `y_i^p - y_i = R_i`, `i < n`, with `R_i` in `K_i`.
#[derive(Clone, Debug)]
pub struct CurveModel {
    pub name: String,
    pub chain: AsChain,
    /// Special points (always containing 0 and infinity), sorted.
    pub places: Vec<PlaceData>,
    /// Images of `y_i` under the generator of the Galois group, in `K_n`.
    pub generator: Vec<Elem>,
    /// Order of the generator.
    pub group_order: u64,
    /// Shifts `G_i` with `z_i = y_i + G_i` the Witt coordinates (ASW models).
    pub shifts: Vec<Elem>,
}

impl CurveModel {
    pub fn field(&self) -> &FieldDesc {
        &self.chain.field
    }

    pub fn p(&self) -> usize {
        self.chain.p
    }

    pub fn level(&self) -> usize {
        self.chain.len()
    }

    /// Degree over P^1.
    pub fn degree(&self) -> u64 {
        (self.p() as u64).pow(self.level() as u32)
    }

    pub fn dim(&self) -> usize {
        self.chain.dim(self.level())
    }

    /// Local data at `place` for the full chain.
    pub fn local_view(&self, place: &Place) -> LocalView {
        let p = self.p() as i64;
        match self.places.iter().find(|d| &d.place == place) {
            Some(d) => LocalView::from_steps(p, &d.steps),
            None => LocalView::from_steps(p, &vec![StepType::Etale; self.level()]),
        }
    }

    /// Genus from the local data (Riemann-Hurwitz over P^1).
    pub fn genus(&self) -> u64 {
        let deg = self.degree() as i64;
        let mut total = -2 * deg;
        for d in &self.places {
            let v = self.local_view(&d.place);
            total += d.place.degree() as i64 * (deg / v.e) * v.delta;
        }
        (total / 2 + 1) as u64
    }

    /// p-rank from the local data (Deuring-Shafarevich over P^1).
    pub fn p_rank(&self) -> u64 {
        let deg = self.degree() as i64;
        let mut total = 1 - deg;
        for d in &self.places {
            let v = self.local_view(&d.place);
            total += d.place.degree() as i64 * (deg / v.e) * (v.e - 1);
        }
        total as u64
    }

    /// The points of P^1 over which the curve ramifies.
    pub fn branch_points(&self) -> Vec<Place> {
        self.places
            .iter()
            .filter(|d| d.steps.iter().any(|s| matches!(s, StepType::Ramified(_))))
            .map(|d| d.place.clone())
            .collect()
    }

    /// The first `m` steps, with the generator restricted accordingly.
    pub fn truncate(&self, m: usize) -> CurveModel {
        let dim = self.chain.dim(m);
        CurveModel {
            name: self.name.clone(),
            chain: self.chain.truncate(m),
            places: self
                .places
                .iter()
                .map(|d| PlaceData { place: d.place.clone(), steps: d.steps[..m].to_vec() })
                .collect(),
            generator: self.generator[..m].iter().map(|g| g[..dim].to_vec()).collect(),
            group_order: (self.p() as u64).pow(m as u32).min(self.group_order),
            shifts: self.shifts[..m].to_vec(),
        }
    }

    /// Human-readable equations, one per step.
    pub fn equations(&self) -> Vec<String> {
        let f = self.field();
        (0..self.level())
            .map(|i| {
                format!(
                    "y{i}^{p} - y{i} = {}",
                    elem_to_string(f, self.p(), i, self.chain.rhs(i)),
                    p = self.p()
                )
            })
            .collect()
    }

    /// Builds a model from explicit right-hand sides and generator images.
    /// Poles divisible by p are not reduced; every step must be étale or
    /// ramified with break prime to p at every point.
    pub fn from_chain(
        name: &str,
        field: &FieldDesc,
        rhs: Vec<Elem>,
        generator: Vec<Elem>,
        group_order: u64,
    ) -> Result<CurveModel, ModelError> {
        let mut b = Builder::new(field);
        for r in rhs {
            b.push_step(r, false)?;
        }
        let n = b.chain.len();
        let shifts = (0..n).map(|i| b.chain.zero(i)).collect();
        Ok(CurveModel {
            name: name.to_string(),
            chain: b.chain,
            places: b.places,
            generator,
            group_order,
            shifts,
        })
    }

    /// The level-n curve of an ASW tower.
    pub fn from_tower(spec: &TowerSpec, n: usize) -> Result<CurveModel, ModelError> {
        spec.check_level(n)?;
        let spec = normalize_asw(spec)?;
        let f = &spec.field;
        let p = f.p();
        let mut b = Builder::new(f);
        let mut shifts: Vec<Elem> = Vec::new();
        for i in 0..n {
            let ring = b.chain.level(i);
            let z: Vec<Elem> = (0..i)
                .map(|j| b.chain.add(&b.chain.y(i, j), &b.chain.embed(&shifts[j], i)))
                .collect();
            let fs: Vec<Elem> =
                (0..i).map(|j| b.chain.constant(i, spec.witt[j].clone())).collect();
            let carry = witt::witt_carry(&ring, p, i, &z, &fs)?;
            let r = b.chain.add(&b.chain.constant(i, spec.witt[i].clone()), &carry);
            shifts.push(b.push_step(r, true)?);
        }
        let chain = b.chain;
        let generator = asw_generator(&chain, &shifts)?;
        Ok(CurveModel {
            name: format!("{} level {n}", spec.name),
            chain,
            places: b.places,
            generator,
            group_order: (p as u64).pow(n as u32),
            shifts,
        })
    }

    /// Applies the generator `k` times to `a` in `K_n`.
    pub fn act(&self, a: &Elem, k: u64) -> Elem {
        let n = self.level();
        let powers = self.chain.image_powers(n, &self.generator);
        let mut cur = a.clone();
        for _ in 0..k {
            cur = self.chain.substitute(n, &cur, &powers);
        }
        cur
    }
}

/// `gamma(y_i) = [Z + e]_i - gamma(G_i)` with `Z = y + G` and `e = (1, 0, ...)`.
fn asw_generator(chain: &AsChain, shifts: &[Elem]) -> Result<Vec<Elem>, ModelError> {
    let n = chain.len();
    let p = chain.p as u32;
    let ring = chain.level(n);
    let z: Vec<Elem> =
        (0..n).map(|j| chain.add(&chain.y(n, j), &chain.embed(&shifts[j], n))).collect();
    let mut e: Vec<Elem> = vec![chain.zero(n); n];
    if n > 0 {
        e[0] = chain.one(n);
    }
    let mut images: Vec<Elem> = Vec::with_capacity(n);
    for i in 0..n {
        let carry = witt::witt_carry(&ring, p, i, &z, &e)?;
        let mut img = chain.add(&z[i], &carry);
        if i == 0 {
            img = chain.add(&img, &chain.one(n));
        }
        let powers = chain.image_powers(n, &images);
        let g_img = chain.substitute(n, &chain.embed(&shifts[i], n), &powers);
        images.push(chain.sub(&img, &g_img));
    }
    Ok(images)
}

fn elem_to_string(f: &FieldDesc, p: usize, n: usize, a: &Elem) -> String {
    let mut terms = Vec::new();
    for (idx, h) in a.iter().enumerate() {
        if h.is_zero() {
            continue;
        }
        let b = digits(p, n, idx);
        let mono: Vec<String> = b
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(j, &e)| if e == 1 { format!("y{j}") } else { format!("y{j}^{e}") })
            .collect();
        let coeff = ratfunc_to_string(f, h);
        terms.push(if mono.is_empty() {
            coeff
        } else if h.is_one() {
            mono.join("*")
        } else {
            format!("({coeff})*{}", mono.join("*"))
        });
    }
    if terms.is_empty() {
        "0".into()
    } else {
        terms.join(" + ")
    }
}

/// Incremental construction of a chain with local classification.
struct Builder {
    chain: AsChain,
    places: Vec<PlaceData>,
}

impl Builder {
    fn new(f: &FieldDesc) -> Self {
        let places = vec![
            PlaceData { place: Place::Infinity, steps: vec![] },
            PlaceData { place: Place::zero(), steps: vec![] },
        ];
        Builder { chain: AsChain::new(f.clone()), places }
    }

    fn view(&self, place: &Place) -> LocalView {
        let p = self.chain.p as i64;
        match self.places.iter().find(|d| &d.place == place) {
            Some(d) => LocalView::from_steps(p, &d.steps),
            None => LocalView::from_steps(p, &vec![StepType::Etale; self.chain.len()]),
        }
    }

    /// Adds `y_i^p - y_i = r`; with `reduce`, first removes poles whose
    /// order is divisible by p. Returns the accumulated shift.
    fn push_step(&mut self, mut r: Elem, reduce: bool) -> Result<Elem, ModelError> {
        let f = self.chain.field.clone();
        let i = self.chain.len();
        let p = self.chain.p as i64;
        let mut shift = self.chain.zero(i);
        // new special points: poles of the coefficients
        for h in r.iter().filter(|h| !h.is_zero()) {
            for q in poles_of(&f, h) {
                if !self.places.iter().any(|d| d.place == q) {
                    self.places.push(PlaceData { place: q, steps: vec![StepType::Etale; i] });
                }
            }
        }
        self.places.sort_by(|a, b| a.place.cmp(&b.place));
        let mut types = Vec::with_capacity(self.places.len());
        for k in 0..self.places.len() {
            let place = self.places[k].place.clone();
            let mut rounds = 0;
            let t = loop {
                let view = self.view(&place);
                let Some((m, _)) = view.min_valuation(&f, &place, &r) else {
                    break StepType::Etale;
                };
                if m >= 0 {
                    break StepType::Etale;
                }
                if involves_etale(&self.chain, i, &view, &r) {
                    return Err(ModelError::UnsupportedModel(format!(
                        "step {i} has a pole at {} through étale variables",
                        place.label(&f)
                    )));
                }
                if m % p != 0 {
                    break StepType::Ramified((-m) as u64);
                }
                if !reduce || view.ramified_count() != i {
                    return Err(ModelError::NotNormalizable {
                        place: place.label(&f),
                        reason: format!("pole order {} at step {i} is divisible by p", -m),
                    });
                }
                rounds += 1;
                if rounds > 64 {
                    return Err(ModelError::NotNormalizable {
                        place: place.label(&f),
                        reason: "reduction does not terminate".into(),
                    });
                }
                let g = local::reduction_term(&self.chain, &self.places, &place, &view, &r, m)?;
                let gp = self.chain.pow(i, &g, p as u64);
                r = self.chain.add(&self.chain.sub(&r, &gp), &g);
                shift = self.chain.add(&shift, &g);
            };
            types.push(t);
        }
        // reductions can change earlier classifications only by integral
        // terms, which keeps every type; record them now
        for (d, t) in self.places.iter_mut().zip(types) {
            d.steps.push(t);
        }
        if r.iter().skip(1).all(RatFunc::is_zero) && r[0].is_poly() && r[0].num().degree() <= 0 {
            return Err(ModelError::InvalidSpec(format!("step {i} has a constant right-hand side")));
        }
        self.chain.push(r);
        Ok(shift)
    }
}

fn involves_etale(chain: &AsChain, i: usize, view: &LocalView, r: &Elem) -> bool {
    r.iter().enumerate().any(|(idx, h)| {
        !h.is_zero() && digits(chain.p, i, idx).iter().zip(&view.ramified).any(|(&b, &ram)| b > 0 && !ram)
    })
}

/// Poles of `h` as closed points.
pub fn poles_of(f: &FieldDesc, h: &RatFunc) -> Vec<Place> {
    let mut out: Vec<Place> = irreducible_factors(f, h.den()).into_iter().map(Place::Finite).collect();
    if h.num().degree() > h.den().degree() {
        out.push(Place::Infinity);
    }
    out
}

/// `ceil(a / b)` for `b > 0`.
pub(crate) fn ceil_div(a: i64, b: i64) -> i64 {
    Integer::div_ceil(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_make;
    use crate::tower::{genus_rh, parse_place, parse_ratfunc, prank_ds};

    pub(crate) fn tower(p: u32, branch: &[&str], witt: &[&str]) -> TowerSpec {
        let f = field_make(p, 1, None).unwrap();
        let b: Vec<Place> = branch.iter().map(|s| parse_place(&f, s).unwrap()).collect();
        let w = witt.iter().map(|s| parse_ratfunc(&f, s).unwrap()).collect();
        TowerSpec::new("t".into(), f, b.clone(), w, witt.len(), b).unwrap()
    }

    #[test]
    fn elliptic_local_data() {
        let m = CurveModel::from_tower(&tower(2, &["inf"], &["x^3"]), 1).unwrap();
        assert_eq!(m.genus(), 1);
        assert_eq!(m.p_rank(), 0);
        assert_eq!(m.branch_points(), vec![Place::Infinity]);
    }

    #[test]
    fn level_two_break_and_generator() {
        let t = tower(2, &["inf"], &["x^3", "0"]);
        let m = CurveModel::from_tower(&t, 2).unwrap();
        let inf = m.places.iter().find(|d| d.place == Place::Infinity).unwrap();
        assert_eq!(inf.steps, vec![StepType::Ramified(3), StepType::Ramified(9)]);
        assert_eq!(m.genus(), genus_rh(&t, 2).unwrap());
        let c = &m.chain;
        let one = c.one(2);
        assert_eq!(m.generator[0], c.add(&c.y(2, 0), &one));
        assert_eq!(m.generator[1], c.add(&c.y(2, 1), &c.y(2, 0)));
        // order 4, not 2
        let y1 = c.y(2, 1);
        assert_ne!(m.act(&y1, 2), y1);
        assert_eq!(m.act(&y1, 4), y1);
    }

    #[test]
    fn reduction_of_divisible_pole() {
        let t = tower(2, &["inf"], &["x", "x^5"]);
        let m = CurveModel::from_tower(&t, 2).unwrap();
        let inf = m.places.iter().find(|d| d.place == Place::Infinity).unwrap();
        assert_eq!(inf.steps, vec![StepType::Ramified(1), StepType::Ramified(9)]);
        assert_eq!(m.genus(), genus_rh(&t, 2).unwrap());
        // generator still has order 4 and fixes x
        let y1 = m.chain.y(2, 1);
        assert_eq!(m.act(&y1, 4), y1);
        assert_ne!(m.act(&y1, 2), y1);
    }

    #[test]
    fn genus_and_prank_match_formulas() {
        for (p, branch, witt) in [
            (2, vec!["inf", "x"], vec!["x^3+x^-3", "0"]),
            (3, vec!["inf"], vec!["x^2", "0"]),
            (3, vec!["inf", "x"], vec!["x+x^-1", "0"]),
            (2, vec!["inf", "x+1"], vec!["x+1/(x+1)", "0"]),
        ] {
            let t = tower(p, &branch, &witt);
            for n in 0..=2 {
                let m = CurveModel::from_tower(&t, n).unwrap();
                assert_eq!(m.genus(), genus_rh(&t, n).unwrap(), "{witt:?} level {n}");
                assert_eq!(m.p_rank(), prank_ds(&t, n).unwrap(), "{witt:?} level {n}");
            }
        }
    }

    #[test]
    fn generator_preserves_relations() {
        let t = tower(3, &["inf"], &["x^2", "0"]);
        let m = CurveModel::from_tower(&t, 2).unwrap();
        let c = &m.chain;
        for i in 0..2 {
            let img = &m.generator[i];
            let lhs = c.sub(&c.pow(2, img, 3), img);
            let rhs = m.act(&c.embed(c.rhs(i), 2), 1);
            assert_eq!(lhs, rhs, "step {i}");
        }
        let y1 = c.y(2, 1);
        assert_eq!(m.act(&y1, 9), y1);
        assert_ne!(m.act(&y1, 3), y1);
    }
}
