//! Invariant suites run level by level on a tower, producing one record per
//! (check, level).

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;

use crate::curve::CurveModel;
use crate::derham::{
    a_number, cartier_matrix, decompose_parts, hasse_witt_from, relations, torsion_order, DeRham, JIdeal, Part,
};
use crate::error::Error;
use crate::field::field_make;
use crate::fit::{anumber_bound, anumber_bound_check, fit_mu_lambda_nu, fit_power_growth, GrowthSeries};
use crate::galois::{
    control_check, galois_action_de_rham, jordan_type, nakajima_check, nakajima_ll_check, EtaleCover,
};
use crate::tower::{genus_rh, parse_ratfunc, prank_ds, TowerSpec};
use crate::zeta::{class_number_p_part, rational_p_torsion, zeta_data};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Computed data without an assertion attached.
    Info,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
            Status::Info => "INFO",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub suite: String,
    pub check: String,
    pub anchor: String,
    pub tower: String,
    pub level: Option<usize>,
    pub status: Status,
    pub detail: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Galois,
    Dieudonne,
    Zeta,
    Asymptotics,
    All,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Galois => "galois",
            Suite::Dieudonne => "dieudonne",
            Suite::Zeta => "zeta",
            Suite::Asymptotics => "asymptotics",
            Suite::All => "all",
        }
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "galois" => Ok(Suite::Galois),
            "dieudonne" => Ok(Suite::Dieudonne),
            "zeta" => Ok(Suite::Zeta),
            "asymptotics" => Ok(Suite::Asymptotics),
            "all" => Ok(Suite::All),
            _ => Err(format!("unknown suite `{s}`")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    pub levels: Vec<usize>,
    pub gmax: u64,
    pub enum_cap: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub tower: String,
    pub levels: Vec<usize>,
    pub records: Vec<Record>,
}

impl Report {
    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| r.status == Status::Fail).count()
    }
}

mod anchor {
    pub const RELATIONS: &str = "FV = VF = 0, F kills the Hodge filtration, <Fx,y> = sigma<x,Vy>";
    pub const GENUS: &str = "Riemann-Hurwitz genus = dim H^0(Omega^1)";
    pub const PRANK: &str = "Deuring-Shafarevich p-rank = stable rank of Cartier = stable rank of Hasse-Witt";
    pub const HASSE_WITT: &str = "Hasse-Witt is the Serre-dual adjoint of Cartier";
    pub const LOCAL_LOCAL: &str = "dim ll = 2(g - gamma), dim et = dim m = gamma";
    pub const TORSION: &str = "log|G^ll[p]| = 2(g-gamma), log|G^ll[F]| = log|G^ll[V]| = g-gamma, log|G[F,V]| = a";
    pub const NAKAJIMA: &str = "Nakajima rank gamma+|S|-1";
    pub const EXACT_ORDER: &str = "generator acts with exact order p^n";
    pub const DE_RHAM_ACTION: &str = "Galois action on H^1_dR commutes with F and V and preserves the cup product";
    pub const CONTROL: &str = "trace surjective, pullback injective, pi^* pi_* = sum of Galois pullbacks, coinvariants";
    pub const NAKAJIMA_LL: &str = "V-nilpotent part of an etale cover is free of rank g - gamma";
    pub const WEIL: &str = "Weil bounds |N_s - q^s - 1| <= 2g q^(s/2)";
    pub const FUNCTIONAL: &str = "functional equation a_(2g-i) = q^(g-i) a_i, deg L = 2g";
    pub const VERIFIED: &str = "N_s for s > g predicted by L";
    pub const ZETA_PRANK: &str = "p-rank = degree of L mod p";
    pub const LANG: &str = "Lang isogeny 1 - F: v_p(L(1)) >= log_p |Cl[p]|";
    pub const ANUMBER: &str = "a_n > (1 - 1/p) floor(p/2) sum_Q (ceil(p/2) d_Q,n / p - 1)";
    pub const ANUMBER_GROWTH: &str = "a-number bound strictly increasing in n";
    pub const CLASS_FIT: &str = "v_p(h_n) = mu p^n + lambda n + nu";
    pub const POWER_GROWTH: &str = "log_p |Cl_n[p]| >= mu p^(delta n) + O(p^((delta-1)n)), mu >= 1/delta!";
}

struct Ctx<'a> {
    suite: &'static str,
    tower: &'a str,
}

impl Ctx<'_> {
    fn rec(&self, check: &str, anchor: &str, level: Option<usize>, status: Status, detail: String) -> Record {
        Record {
            suite: self.suite.into(),
            check: check.into(),
            anchor: anchor.into(),
            tower: self.tower.into(),
            level,
            status,
            detail,
        }
    }

    fn check(&self, check: &str, anchor: &str, level: Option<usize>, ok: bool, detail: String) -> Record {
        self.rec(check, anchor, level, if ok { Status::Pass } else { Status::Fail }, detail)
    }

    /// Caps become SKIPPED, anything else FAIL.
    fn error(&self, check: &str, anchor: &str, level: Option<usize>, e: Error) -> Record {
        let status = if e.is_cap() { Status::Skipped } else { Status::Fail };
        self.rec(check, anchor, level, status, e.to_string())
    }

    fn run(
        &self,
        check: &str,
        anchor: &str,
        level: Option<usize>,
        body: impl FnOnce() -> Result<(bool, String), Error>,
    ) -> Record {
        match body() {
            Ok((ok, detail)) => self.check(check, anchor, level, ok, detail),
            Err(e) => self.error(check, anchor, level, e),
        }
    }
}

/// Runs a suite on a tower. Only invalid levels are errors; caps become
/// SKIPPED records and mathematical mismatches FAIL records.
pub fn verify(spec: &TowerSpec, suite: Suite, cfg: &VerifyConfig) -> Result<Report, Error> {
    for &n in &cfg.levels {
        spec.check_level(n)?;
    }
    let mut records = Vec::new();
    if suite.includes(Suite::Dieudonne) {
        records.extend(per_level(cfg, |n| dieudonne_level(spec, n, cfg)));
    }
    if suite.includes(Suite::Galois) {
        records.extend(per_level(cfg, |n| galois_level(spec, n, cfg)));
        records.extend(etale_cover_records(&spec.name, cfg.gmax));
    }
    if suite.includes(Suite::Zeta) {
        records.extend(per_level(cfg, |n| zeta_level(spec, n, cfg)));
    }
    if suite.includes(Suite::Asymptotics) {
        records.extend(asymptotics(spec, cfg));
    }
    Ok(Report { schema: SCHEMA, suite: suite.name().into(), tower: spec.name.clone(), levels: cfg.levels.clone(), records })
}

fn per_level(cfg: &VerifyConfig, job: impl Fn(usize) -> Vec<Record> + Sync) -> Vec<Record> {
    let out: Vec<Vec<Record>> = cfg.levels.par_iter().map(|&n| job(n)).collect();
    out.into_iter().flatten().collect()
}

fn dieudonne_level(spec: &TowerSpec, n: usize, cfg: &VerifyConfig) -> Vec<Record> {
    let ctx = Ctx { suite: "dieudonne", tower: &spec.name };
    let lv = Some(n);
    let checks = [
        ("relations", anchor::RELATIONS),
        ("genus", anchor::GENUS),
        ("p-rank", anchor::PRANK),
        ("hasse-witt", anchor::HASSE_WITT),
        ("local-local", anchor::LOCAL_LOCAL),
        ("torsion-orders", anchor::TORSION),
    ];
    let built = CurveModel::from_tower(spec, n)
        .map_err(Error::from)
        .and_then(|m| DeRham::new(&m, cfg.gmax).map(|dr| (m, dr)).map_err(Error::from));
    let (model, dr) = match built {
        Ok(x) => x,
        Err(e) => return checks.iter().map(|(c, a)| ctx.error(c, a, lv, e.clone())).collect(),
    };
    let d = &dr.module;
    let f = model.field();
    let g = d.g;
    let gamma = model.p_rank() as usize;
    let mut out = Vec::new();
    let rel = relations(d);
    out.push(ctx.check("relations", anchor::RELATIONS, lv, rel.all(), format!("{rel:?}")));
    out.push(ctx.run("genus", anchor::GENUS, lv, || {
        let rh = genus_rh(spec, n)?;
        Ok((rh as usize == g && model.genus() == rh, format!("genus_rh = {rh}, dim H^0(Omega^1) = {g}")))
    }));
    out.push(ctx.run("p-rank", anchor::PRANK, lv, || {
        let ds = prank_ds(spec, n)? as usize;
        let cart = cartier_matrix(&model, &dr.holo)?.stable_rank(f);
        let hw = hasse_witt_from(&dr, &model)?.stable_rank(f);
        Ok((ds == cart && cart == hw, format!("prank_ds = {ds}, Cartier = {cart}, Hasse-Witt = {hw}")))
    }));
    out.push(ctx.run("hasse-witt", anchor::HASSE_WITT, lv, || {
        let adj = hasse_witt_from(&dr, &model)?;
        Ok((adj == dr.hasse_witt_direct(), format!("{g}x{g} matrices compared")))
    }));
    let (et, m, ll) = decompose_parts(d).dims();
    out.push(ctx.check(
        "local-local",
        anchor::LOCAL_LOCAL,
        lv,
        et == gamma && m == gamma && ll == 2 * (g - gamma),
        format!("dims (et, m, ll) = ({et}, {m}, {ll}), g = {g}, gamma = {gamma}"),
    ));
    out.push(ctx.run("torsion-orders", anchor::TORSION, lv, || {
        let ideal = |s: &str| s.parse::<JIdeal>().expect("fixed ideal");
        let tp = torsion_order(d, &JIdeal::p(), Part::LocalLocal);
        let tf = torsion_order(d, &ideal("F"), Part::LocalLocal);
        let tv = torsion_order(d, &ideal("V"), Part::LocalLocal);
        let tfv = torsion_order(d, &ideal("F,V"), Part::All);
        let a = a_number(&model, cfg.gmax)?;
        let ok = tp == 2 * (g - gamma) && tf == g - gamma && tv == g - gamma && tfv == a;
        Ok((ok, format!("ll[p] = {tp}, ll[F] = {tf}, ll[V] = {tv}, [F,V] = {tfv}, a = {a}")))
    }));
    out
}

fn galois_level(spec: &TowerSpec, n: usize, cfg: &VerifyConfig) -> Vec<Record> {
    let ctx = Ctx { suite: "galois", tower: &spec.name };
    let lv = Some(n);
    let mut out = Vec::new();
    if n == 0 {
        for (c, a) in [("nakajima", anchor::NAKAJIMA), ("exact-order", anchor::EXACT_ORDER), ("de-rham-action", anchor::DE_RHAM_ACTION)] {
            out.push(ctx.rec(c, a, lv, Status::Skipped, "trivial group at level 0".into()));
        }
        return out;
    }
    let s = &spec.modulus_points;
    let p = spec.p() as u64;
    match nakajima_check(spec, n, s, cfg.gmax) {
        Ok(r) => {
            let detail = format!(
                "dim {}, blocks {:?}, expected {} blocks of size {}",
                r.dim,
                r.jordan.blocks,
                r.expected_rank,
                p.pow(n as u32)
            );
            out.push(ctx.check("nakajima", anchor::NAKAJIMA, lv, r.pass, detail));
            let top = r.jordan.blocks.first().copied().unwrap_or(0) as u64;
            if r.dim == 0 {
                out.push(ctx.rec("exact-order", anchor::EXACT_ORDER, lv, Status::Skipped, "V-bijective part is zero".into()));
            } else {
                let ok = top > p.pow(n as u32 - 1);
                out.push(ctx.check("exact-order", anchor::EXACT_ORDER, lv, ok, format!("largest Jordan block {top}")));
            }
        }
        Err(e) => {
            let e = Error::from(e);
            out.push(ctx.error("nakajima", anchor::NAKAJIMA, lv, e.clone()));
            out.push(ctx.error("exact-order", anchor::EXACT_ORDER, lv, e));
        }
    }
    out.push(ctx.run("de-rham-action", anchor::DE_RHAM_ACTION, lv, || {
        let model = CurveModel::from_tower(spec, n)?;
        let dr = DeRham::new(&model, cfg.gmax)?;
        let f = model.field();
        let gm = galois_action_de_rham(&model, &dr)?;
        let d = &dr.module;
        let fm = &d.frobenius.matrix;
        let vm = &d.verschiebung.matrix;
        let commutes_f = gm.mul(f, fm) == fm.mul(f, &gm.frobenius(f, 1));
        let commutes_v = gm.mul(f, vm) == vm.mul(f, &gm.frobenius(f, -1));
        let isometry = gm.transpose().mul(f, &d.gram).mul(f, &gm) == d.gram;
        let unipotent = jordan_type(f, &gm, model.group_order).is_ok();
        Ok((
            commutes_f && commutes_v && isometry && unipotent,
            format!("F: {commutes_f}, V: {commutes_v}, cup product: {isometry}, unipotent: {unipotent}"),
        ))
    }));
    for &m in cfg.levels.iter().filter(|&&m| m < n) {
        out.push(ctx.run(&format!("control-{n}-{m}"), anchor::CONTROL, lv, || {
            let r = control_check(spec, n, m, s, cfg.gmax)?;
            Ok((r.pass(), format!("{r:?}")))
        }));
    }
    out
}

/// Étale covers `z^p - z = r` of `y^p - y = f0`, as `(p, f0, r)`.
/// The first is the ordinary curve `y^2 + xy = x^3 + 1` in reduced form.
pub const ETALE_COVERS: [(u32, &str, &str); 3] = [(2, "x+x^-1", "x^-1"), (2, "x^3+x^-1", "x^-1"), (3, "x+x^-1", "x^-1")];

fn etale_cover_records(tower: &str, gmax: u64) -> Vec<Record> {
    let ctx = Ctx { suite: "galois", tower };
    let mut out = Vec::new();
    for (p, f0, r) in ETALE_COVERS {
        let check = format!("nakajima-ll p={p} f0={f0} r={r}");
        out.push(ctx.run(&check, anchor::NAKAJIMA_LL, Some(1), || {
            let f = field_make(p, 1, None)?;
            let cover = EtaleCover::new(&f, &parse_ratfunc(&f, f0)?, &parse_ratfunc(&f, r)?)?;
            let rep = nakajima_ll_check(&cover, gmax)?;
            Ok((
                rep.pass,
                format!(
                    "cover genus {}, base (g, gamma) = ({}, {}), blocks {:?}",
                    rep.cover_genus, rep.base_genus, rep.base_p_rank, rep.jordan.blocks
                ),
            ))
        }));
    }
    out
}

fn zeta_level(spec: &TowerSpec, n: usize, cfg: &VerifyConfig) -> Vec<Record> {
    let ctx = Ctx { suite: "zeta", tower: &spec.name };
    let lv = Some(n);
    let checks = [
        ("weil", anchor::WEIL),
        ("functional-equation", anchor::FUNCTIONAL),
        ("verification-degrees", anchor::VERIFIED),
        ("p-rank", anchor::ZETA_PRANK),
        ("lang", anchor::LANG),
    ];
    let data = CurveModel::from_tower(spec, n)
        .map_err(Error::from)
        .and_then(|m| zeta_data(&m, 2, cfg.enum_cap).map(|z| (m, z)).map_err(Error::from));
    let (model, (counts, l)) = match data {
        Ok(x) => x,
        Err(e) => return checks.iter().map(|(c, a)| ctx.error(c, a, lv, e.clone())).collect(),
    };
    let g = model.genus();
    let p = spec.p() as u64;
    let mut out = Vec::new();
    let weil = counts.weil_bounds(g);
    out.push(ctx.check("weil", anchor::WEIL, lv, weil.iter().all(|&b| b), format!("N_s = {:?}", counts.counts)));
    out.push(ctx.check(
        "functional-equation",
        anchor::FUNCTIONAL,
        lv,
        l.functional_equation_holds(),
        format!("L(1) = {}", l.at_one()),
    ));
    if l.verified.is_empty() {
        out.push(ctx.rec(
            "verification-degrees",
            anchor::VERIFIED,
            lv,
            Status::Skipped,
            "no counts beyond s = g within the enumeration cap".into(),
        ));
    } else {
        out.push(ctx.check("verification-degrees", anchor::VERIFIED, lv, true, format!("verified s = {:?}", l.verified)));
    }
    let from_l = l.p_rank(p);
    out.push(ctx.check(
        "p-rank",
        anchor::ZETA_PRANK,
        lv,
        from_l as u64 == model.p_rank(),
        format!("deg(L mod p) = {from_l}, Deuring-Shafarevich = {}", model.p_rank()),
    ));
    out.push(ctx.run("lang", anchor::LANG, lv, || {
        let hw = crate::derham::hasse_witt_matrix(&model, cfg.gmax)?;
        let tors = rational_p_torsion(model.field(), &hw)?;
        let vp = class_number_p_part(&l, p);
        Ok((vp >= tors as u64, format!("v_p(h) = {vp}, log_p |Cl[p]| = {tors}")))
    }));
    out
}

struct LevelSeries {
    level: usize,
    a_bound: Option<Ratio<i64>>,
    class_vp: Option<u64>,
    cl_p: Option<usize>,
}

fn asymptotics(spec: &TowerSpec, cfg: &VerifyConfig) -> Vec<Record> {
    let ctx = Ctx { suite: "asymptotics", tower: &spec.name };
    let p = spec.p() as u64;
    let mut out = Vec::new();
    for &n in &cfg.levels {
        match anumber_bound_check(spec, &[n], cfg.gmax) {
            Ok(rows) => {
                let r = &rows[0];
                let rec = match r.pass {
                    None => ctx.rec("a-number-bound", anchor::ANUMBER, Some(n), Status::Skipped, r.detail.clone()),
                    Some(ok) => ctx.check("a-number-bound", anchor::ANUMBER, Some(n), ok, r.detail.clone()),
                };
                out.push(rec);
            }
            Err(e) => out.push(ctx.error("a-number-bound", anchor::ANUMBER, Some(n), e.into())),
        }
    }
    let series: Vec<LevelSeries> = cfg
        .levels
        .par_iter()
        .map(|&n| {
            let model = CurveModel::from_tower(spec, n).ok();
            let zeta = model.as_ref().and_then(|m| zeta_data(m, 0, cfg.enum_cap).ok());
            let cl_p = model.as_ref().and_then(|m| {
                let hw = crate::derham::hasse_witt_matrix(m, cfg.gmax).ok()?;
                rational_p_torsion(m.field(), &hw).ok()
            });
            LevelSeries {
                level: n,
                a_bound: (n > 0).then(|| anumber_bound(spec, n).ok()).flatten(),
                class_vp: zeta.map(|(_, l)| class_number_p_part(&l, p)),
                cl_p,
            }
        })
        .collect();

    let bounds: Vec<(usize, Ratio<i64>)> = series.iter().filter_map(|s| s.a_bound.map(|b| (s.level, b))).collect();
    if bounds.len() < 2 {
        out.push(ctx.rec("a-number-bound-growth", anchor::ANUMBER_GROWTH, None, Status::Skipped, "fewer than two levels".into()));
    } else {
        let ok = bounds.windows(2).all(|w| w[1].1 > w[0].1);
        let detail = bounds.iter().map(|(n, b)| format!("{n}: {b}")).collect::<Vec<_>>().join(", ");
        out.push(ctx.check("a-number-bound-growth", anchor::ANUMBER_GROWTH, None, ok, detail));
    }

    let class: Vec<(u64, i64)> = series.iter().filter_map(|s| s.class_vp.map(|v| (s.level as u64, v as i64))).collect();
    match GrowthSeries::new(class.clone()).map_err(Error::from).and_then(|s| Ok(fit_mu_lambda_nu(&s, p)?)) {
        Ok(fit) => out.push(ctx.rec(
            "class-number-fit",
            anchor::CLASS_FIT,
            None,
            Status::Info,
            format!(
                "series {class:?}: mu = {}, lambda = {}, nu = {}, exact from {:?}",
                fit.mu, fit.lambda, fit.nu, fit.exact_from
            ),
        )),
        Err(e) => out.push(ctx.rec("class-number-fit", anchor::CLASS_FIT, None, Status::Skipped, format!("series {class:?}: {e}"))),
    }

    let cl: Vec<(u64, i64)> = series.iter().filter_map(|s| s.cl_p.map(|v| (s.level as u64, v as i64))).collect();
    match spec.growth_delta {
        None => out.push(ctx.rec(
            "cl-p-growth",
            anchor::POWER_GROWTH,
            None,
            Status::Skipped,
            format!("series {cl:?}: no growth dimension configured"),
        )),
        Some(delta) => match GrowthSeries::new(cl.clone()).map_err(Error::from).and_then(|s| Ok(fit_power_growth(&s, p, delta)?)) {
            Ok(r) => out.push(ctx.check(
                "cl-p-growth",
                anchor::POWER_GROWTH,
                None,
                r.verdict,
                format!("series {cl:?}, delta {delta}: C = {}, mu >= {}, nu <= {}", r.c, r.mu_lower, r.nu_upper),
            )),
            Err(e) => out.push(ctx.rec("cl-p-growth", anchor::POWER_GROWTH, None, Status::Skipped, format!("series {cl:?}: {e}"))),
        },
    }
    out
}
