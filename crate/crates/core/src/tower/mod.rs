//! Artin-Schreier-Witt towers over P^1: specification, reduced form,
//! ramification breaks, Herbrand functions, genus and p-rank.

pub mod parse;

use std::path::Path;

use num_rational::Ratio;
use serde::Deserialize;

use crate::error::ModelError;
use crate::field::{FieldDesc, Fq};
use crate::poly::Poly;
use crate::ratfunc::{Place, RatFunc, RatFuncField, ResidueField};
use crate::witt::{self, MAX_LENGTH};

pub use parse::{parse_place, parse_ratfunc};

/// A Z/p^m tower over P^1 given by a Witt vector of rational functions.
#[derive(Clone, Debug)]
pub struct TowerSpec {
    pub name: String,
    pub field: FieldDesc,
    /// Branch points, sorted.
    pub branch: Vec<Place>,
    /// Defining Witt vector `(f_0, ..., f_{m-1})`, length `depth`.
    pub witt: Vec<RatFunc>,
    pub depth: usize,
    /// The modulus `S` used for differentials with poles; defaults to the
    /// branch locus.
    pub modulus_points: Vec<Place>,
    /// Growth dimension used when bracketing `log_p |Cl[p]|` across levels;
    /// only set when configured.
    pub growth_delta: Option<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerFile {
    #[serde(default)]
    name: Option<String>,
    p: u32,
    #[serde(default = "one")]
    r: u32,
    #[serde(default)]
    modulus: Option<Vec<u32>>,
    branch: Vec<String>,
    witt: Vec<String>,
    #[serde(default)]
    depth: Option<usize>,
    #[serde(default)]
    s: Option<Vec<String>>,
    #[serde(default)]
    delta: Option<u32>,
}

fn one() -> u32 {
    1
}

impl TowerSpec {
    pub fn from_toml_str(s: &str) -> Result<Self, ModelError> {
        let file: TowerFile =
            toml::from_str(s).map_err(|e| ModelError::InvalidSpec(e.to_string()))?;
        Self::from_file(file)
    }

    pub fn from_json_str(s: &str) -> Result<Self, ModelError> {
        let file: TowerFile =
            serde_json::from_str(s).map_err(|e| ModelError::InvalidSpec(e.to_string()))?;
        Self::from_file(file)
    }

    /// Reads TOML, or JSON when the extension is `.json`.
    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::InvalidSpec(format!("{}: {e}", path.display())))?;
        let mut spec = if path.extension().is_some_and(|e| e == "json") {
            Self::from_json_str(&text)?
        } else {
            Self::from_toml_str(&text)?
        };
        if spec.name.is_empty() {
            spec.name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
        }
        Ok(spec)
    }

    fn from_file(file: TowerFile) -> Result<Self, ModelError> {
        let field = FieldDesc::new(file.p, file.r, file.modulus.as_deref())?;
        let branch = file
            .branch
            .iter()
            .map(|s| parse_place(&field, s))
            .collect::<Result<Vec<_>, _>>()?;
        let witt = file
            .witt
            .iter()
            .map(|s| parse_ratfunc(&field, s))
            .collect::<Result<Vec<_>, _>>()?;
        let modulus_points = match &file.s {
            Some(list) => list.iter().map(|s| parse_place(&field, s)).collect::<Result<_, _>>()?,
            None => branch.clone(),
        };
        let depth = file.depth.unwrap_or(witt.len());
        let mut spec = Self::new(file.name.unwrap_or_default(), field, branch, witt, depth, modulus_points)?;
        spec.growth_delta = file.delta;
        Ok(spec)
    }

    pub fn new(
        name: String,
        field: FieldDesc,
        mut branch: Vec<Place>,
        mut witt: Vec<RatFunc>,
        depth: usize,
        mut modulus_points: Vec<Place>,
    ) -> Result<Self, ModelError> {
        if depth == 0 || depth > MAX_LENGTH {
            return Err(ModelError::InvalidSpec(format!("depth must be 1..=3, got {depth}")));
        }
        if witt.len() > depth {
            return Err(ModelError::InvalidSpec("more Witt components than the depth".into()));
        }
        witt.resize(depth, RatFunc::zero());
        branch.sort();
        branch.dedup();
        modulus_points.sort();
        modulus_points.dedup();
        if branch.is_empty() {
            return Err(ModelError::InvalidSpec("branch locus is empty".into()));
        }
        for (i, fi) in witt.iter().enumerate() {
            if let Some(bad) = poles(&field, fi).into_iter().find(|q| !branch.contains(q)) {
                return Err(ModelError::InvalidSpec(format!(
                    "f_{i} has a pole at {} outside the branch locus",
                    bad.label(&field)
                )));
            }
        }
        Ok(TowerSpec { name, field, branch, witt, depth, modulus_points, growth_delta: None })
    }

    pub fn p(&self) -> u32 {
        self.field.p()
    }

    /// Total degree of the branch locus.
    pub fn branch_degree(&self) -> u64 {
        self.branch.iter().map(|q| q.degree() as u64).sum()
    }

    pub fn check_level(&self, n: usize) -> Result<(), ModelError> {
        if n > self.depth {
            Err(ModelError::LevelExceedsDepth { level: n, depth: self.depth })
        } else {
            Ok(())
        }
    }
}

/// The poles of a rational function as closed points, sorted.
pub fn poles(f: &FieldDesc, h: &RatFunc) -> Vec<Place> {
    let mut out = Vec::new();
    if h.is_zero() {
        return out;
    }
    if h.num().degree() > h.den().degree() {
        out.push(Place::Infinity);
    }
    out.extend(irreducible_factors(f, h.den()).into_iter().map(Place::Finite));
    out
}

/// Distinct monic irreducible factors by trial division over increasing
/// degree; adequate for the small denominators that occur here.
pub fn irreducible_factors(f: &FieldDesc, a: &Poly) -> Vec<Poly> {
    let mut rest = a.monic(f);
    let mut out = Vec::new();
    let mut d = 1usize;
    while rest.deg().unwrap_or(0) > 0 {
        if 2 * d > rest.deg().unwrap() {
            out.push(rest.clone());
            break;
        }
        let q = f.q() as u64;
        let count = q.pow(d as u32);
        for n in 0..count {
            let mut c = Vec::with_capacity(d + 1);
            let mut v = n;
            for _ in 0..d {
                c.push(Fq((v % q) as u32));
                v /= q;
            }
            c.push(Fq::ONE);
            let cand = Poly::from_coeffs(c);
            if !cand.is_irreducible(f) {
                continue;
            }
            let mut hit = false;
            loop {
                let (qq, r) = rest.divrem(f, &cand);
                if !r.is_zero() {
                    break;
                }
                rest = qq;
                hit = true;
            }
            if hit {
                out.push(cand);
            }
        }
        d += 1;
    }
    out.sort();
    out
}

/// Reduced form: every pole order of every component at every branch point
/// becomes prime to p, by `f <- f + wp(-V^i[g])` with `g` a principal part
/// at a single point.
pub fn normalize_asw(spec: &TowerSpec) -> Result<TowerSpec, ModelError> {
    let f = &spec.field;
    let p = f.p() as i64;
    let ring = RatFuncField(f.clone());
    let m = spec.depth;
    let mut w = spec.witt.clone();
    for i in 0..m {
        for q in &spec.branch {
            let mut guard = 0;
            loop {
                let Some((v, lc)) = w[i].leading(f, q) else { break };
                if v >= 0 || (-v) % p != 0 {
                    break;
                }
                guard += 1;
                if guard > 10_000 {
                    return Err(ModelError::NotNormalizable {
                        place: q.label(f),
                        reason: "reduction does not terminate".into(),
                    });
                }
                let k = -v / p;
                let res = ResidueField::new(f, q);
                let c = res.pth_root(&lc);
                let g = match q {
                    Place::Infinity => RatFunc::monomial(c.coeff(0), k),
                    Place::Finite(pi) => RatFunc::new(f, c, pi.pow(f, k as u64)),
                };
                let gp = g.pow(f, p);
                let big_g = witt::verschiebung_teichmuller(&ring, m, i, g);
                let big_gp = witt::verschiebung_teichmuller(&ring, m, i, gp);
                let delta = witt::witt_sub(&ring, f.p(), &big_g, &big_gp)?;
                w = witt::witt_add(&ring, f.p(), &w, &delta)?;
            }
        }
    }
    for q in &spec.branch {
        match w[0].valuation(f, q) {
            Some(v) if v < 0 => {}
            _ => {
                return Err(ModelError::InvalidSpec(format!(
                    "branch point {} is not a pole of the reduced f_0; towers must be totally ramified",
                    q.label(f)
                )))
            }
        }
    }
    let mut out = spec.clone();
    out.witt = w;
    Ok(out)
}

/// Pole order of `h` at `q` (0 when regular).
pub fn pole_order(f: &FieldDesc, h: &RatFunc, q: &Place) -> u64 {
    match h.valuation(f, q) {
        Some(v) if v < 0 => (-v) as u64,
        _ => 0,
    }
}

/// Piecewise-linear Herbrand function psi (upper to lower numbering) of a
/// totally ramified Z/p^n extension, with its inverse phi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Herbrand {
    pub p: u64,
    /// `(u_i, l_i)` corner points.
    pub corners: Vec<(u64, u64)>,
}

impl Herbrand {
    pub fn psi(&self, x: Ratio<i64>) -> Ratio<i64> {
        let (mut u0, mut l0, mut slope) = (Ratio::from(0), Ratio::from(0), 1i64);
        for &(u, l) in &self.corners {
            let u = Ratio::from(u as i64);
            if x <= u {
                return l0 + (x - u0) * slope;
            }
            u0 = u;
            l0 = Ratio::from(l as i64);
            slope *= self.p as i64;
        }
        l0 + (x - u0) * slope
    }

    pub fn phi(&self, y: Ratio<i64>) -> Ratio<i64> {
        let (mut u0, mut l0, mut slope) = (Ratio::from(0), Ratio::from(0), 1i64);
        for &(u, l) in &self.corners {
            let l = Ratio::from(l as i64);
            if y <= l {
                return u0 + (y - l0) / slope;
            }
            u0 = Ratio::from(u as i64);
            l0 = l;
            slope *= self.p as i64;
        }
        u0 + (y - l0) / slope
    }
}

/// Breaks at one branch point for the level-n quotient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RamificationData {
    pub place: Place,
    pub upper: Vec<u64>,
    pub lower: Vec<u64>,
    pub herbrand: Herbrand,
}

impl RamificationData {
    /// Exponent of the different at the unique place above the branch point.
    pub fn different_exponent(&self) -> u64 {
        let p = self.herbrand.p;
        let n = self.lower.len();
        let mut prev: i64 = -1;
        let mut total = 0u64;
        for (i, &l) in self.lower.iter().enumerate() {
            total += (l as i64 - prev) as u64 * (p.pow((n - i) as u32) - 1);
            prev = l as i64;
        }
        total
    }
}

/// Upper and lower breaks of the level-n quotient at `q`; `spec` must be
/// in reduced form.
pub fn breaks(spec: &TowerSpec, n: usize, q: &Place) -> Result<RamificationData, ModelError> {
    spec.check_level(n)?;
    let f = &spec.field;
    let p = f.p() as u64;
    let d: Vec<u64> = spec.witt.iter().map(|h| pole_order(f, h, q)).collect();
    let mut upper = Vec::with_capacity(n);
    for i in 1..=n {
        let u = (0..i).map(|j| p.pow((i - 1 - j) as u32) * d[j]).max().unwrap_or(0);
        upper.push(u);
    }
    let mut lower: Vec<u64> = Vec::with_capacity(n);
    for i in 0..n {
        let l = if i == 0 { upper[0] } else { lower[i - 1] + p.pow(i as u32) * (upper[i] - upper[i - 1]) };
        lower.push(l);
    }
    let herbrand = Herbrand { p, corners: upper.iter().copied().zip(lower.iter().copied()).collect() };
    Ok(RamificationData { place: q.clone(), upper, lower, herbrand })
}

/// Genus of the level-n curve by Riemann-Hurwitz.
pub fn genus_rh(spec: &TowerSpec, n: usize) -> Result<u64, ModelError> {
    spec.check_level(n)?;
    if n == 0 {
        return Ok(0);
    }
    let pn = (spec.p() as i64).pow(n as u32);
    let mut total: i64 = -2 * pn;
    for q in &spec.branch {
        total += q.degree() as i64 * breaks(spec, n, q)?.different_exponent() as i64;
    }
    Ok((total / 2 + 1) as u64)
}

/// p-rank of the level-n curve by Deuring-Shafarevich.
pub fn prank_ds(spec: &TowerSpec, n: usize) -> Result<u64, ModelError> {
    spec.check_level(n)?;
    if n == 0 {
        return Ok(0);
    }
    let pn = (spec.p() as u64).pow(n as u32);
    Ok((pn - 1) * (spec.branch_degree() - 1))
}
