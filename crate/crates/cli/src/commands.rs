//! The subcommands. Each builds a schema-1 JSON document and a flat table,
//! then hands both to the sink.

use std::path::Path;

use aswtower::curve::CurveModel;
use aswtower::derham::{a_number, decompose_parts, full_dieudonne_mod_p, hasse_witt_matrix, relations};
use aswtower::fit::{fit_mu_lambda_nu, fit_power_growth, GrowthSeries, MuLambdaNu, PowerGrowth};
use aswtower::galois::{control_check, nakajima_check, ControlReport, NakajimaReport};
use aswtower::invariants::{level_invariants, LevelInvariants};
use aswtower::serial::DieudonneJson;
use aswtower::tower::TowerSpec;
use aswtower::verify::{verify, Report, Suite, VerifyConfig, SCHEMA};
use aswtower::zeta::{class_number_p_part, count_points, rational_p_torsion, zeta_data, LPolynomial};
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::output::{opt, Sink, Table};

pub struct RunConfig {
    pub spec: TowerSpec,
    pub levels: Vec<usize>,
    pub gmax: u64,
    pub enum_cap: u64,
}

/// Parses `a..b` (inclusive), `a..=b` or a single level. An empty string or
/// `b < a` gives no levels.
pub fn parse_levels(s: &str) -> Result<Vec<usize>, CliError> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| CliError::Config(format!("bad level range `{s}`")));
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.strip_prefix('=').unwrap_or(b))?);
            Ok((a..=b).collect())
        }
        None => Ok(vec![num(s)?]),
    }
}

impl RunConfig {
    pub fn load(tower: &Path, levels: Option<&str>, gmax: u64, enum_cap: u64) -> Result<Self, CliError> {
        if enum_cap == 0 {
            return Err(CliError::Config("--enum-cap must be positive".into()));
        }
        let spec = TowerSpec::from_path(tower)?;
        let levels = match levels {
            Some(s) => parse_levels(s)?,
            None => (0..=spec.depth).collect(),
        };
        for &n in &levels {
            spec.check_level(n)?;
        }
        Ok(RunConfig { spec, levels, gmax, enum_cap })
    }

    fn p(&self) -> u32 {
        self.spec.p()
    }
}

#[derive(Serialize)]
struct Doc<'a, T: Serialize> {
    schema: u32,
    tower: &'a str,
    p: u32,
    r: u32,
    rows: T,
}

fn doc<'a, T: Serialize>(cfg: &'a RunConfig, rows: T) -> Doc<'a, T> {
    Doc { schema: SCHEMA, tower: &cfg.spec.name, p: cfg.p(), r: cfg.spec.field.r(), rows }
}

pub fn invariants(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let rows: Vec<LevelInvariants> = cfg
        .levels
        .iter()
        .map(|&n| level_invariants(&cfg.spec, n, cfg.gmax))
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(&[
        "level", "degree", "breaks", "genus", "p_rank", "a_number", "etale", "multiplicative", "local_local",
    ]);
    for r in &rows {
        let breaks = r
            .breaks
            .iter()
            .map(|b| format!("{}:{:?}/{:?}", b.place, b.upper, b.lower))
            .collect::<Vec<_>>()
            .join(" ");
        t.push(vec![
            r.level.to_string(),
            r.degree.to_string(),
            breaks,
            r.genus.to_string(),
            r.p_rank.to_string(),
            opt(r.a_number),
            opt(r.dims.map(|d| d.0)),
            opt(r.dims.map(|d| d.1)),
            opt(r.dims.map(|d| d.2)),
        ]);
    }
    sink.emit("invariants", &doc(cfg, &rows), &t)
}

#[derive(Serialize)]
struct DieudonneRow {
    level: usize,
    relations_hold: bool,
    a_number: usize,
    /// `(etale, multiplicative, local-local)`.
    dims: (usize, usize, usize),
    #[serde(flatten)]
    module: DieudonneJson,
}

pub fn dieudonne(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let mut rows = Vec::new();
    for &n in &cfg.levels {
        let model = CurveModel::from_tower(&cfg.spec, n)?;
        let d = full_dieudonne_mod_p(&model, cfg.gmax)?;
        rows.push(DieudonneRow {
            level: n,
            relations_hold: relations(&d).all(),
            a_number: a_number(&model, cfg.gmax)?,
            dims: decompose_parts(&d).dims(),
            module: DieudonneJson::new(&d),
        });
    }
    let mut t = Table::new(&["level", "g", "hodge", "relations", "a_number", "etale", "multiplicative", "local_local"]);
    for r in &rows {
        t.push(vec![
            r.level.to_string(),
            r.module.g.to_string(),
            format!("{:?}", r.module.hodge_indices),
            r.relations_hold.to_string(),
            r.a_number.to_string(),
            r.dims.0.to_string(),
            r.dims.1.to_string(),
            r.dims.2.to_string(),
        ]);
    }
    sink.emit("dieudonne", &doc(cfg, &rows), &t)
}

#[derive(Serialize)]
struct ControlRow {
    pass: bool,
    #[serde(flatten)]
    report: ControlReport,
}

#[derive(Serialize)]
struct GaloisRows {
    nakajima: Vec<NakajimaReport>,
    control: Vec<ControlRow>,
}

pub fn galois(cfg: &RunConfig, sink: &Sink) -> Result<(), CliError> {
    let s = &cfg.spec.modulus_points;
    let mut nakajima = Vec::new();
    let mut control = Vec::new();
    for &n in cfg.levels.iter().filter(|&&n| n > 0) {
        nakajima.push(nakajima_check(&cfg.spec, n, s, cfg.gmax)?);
        for &m in cfg.levels.iter().filter(|&&m| m < n) {
            let report = control_check(&cfg.spec, n, m, s, cfg.gmax)?;
            control.push(ControlRow { pass: report.pass(), report });
        }
    }
    let mut t = Table::new(&["check", "level", "pass", "detail"]);
    for r in &nakajima {
        t.push(vec![
            "nakajima".into(),
            r.level.to_string(),
            r.pass.to_string(),
            format!("dim {}, blocks {:?}, expected rank {}", r.dim, r.jordan.blocks, r.expected_rank),
        ]);
    }
    for c in &control {
        let r = &c.report;
        t.push(vec![
            "control".into(),
            format!("{}->{}", r.n, r.m),
            c.pass.to_string(),
            format!("coinvariants {}, V-bijective at {} {}", r.coinvariant_dim, r.m, r.bijective_dim_m),
        ]);
    }
    sink.emit("galois", &doc(cfg, GaloisRows { nakajima, control }), &t)
}

#[derive(Serialize)]
struct ZetaRow {
    level: usize,
    genus: u64,
    /// `N_s` for `s = 1, 2, ...`.
    counts: Vec<u64>,
    lpoly: LPolynomial,
    class_number: String,
    class_number_p_valuation: u64,
    /// `F_p`-dimension of the rational p-torsion of the Jacobian.
    cl_p_rank: usize,
}

pub fn zeta(cfg: &RunConfig, max_s: Option<u32>, sink: &Sink) -> Result<(), CliError> {
    let p = cfg.p() as u64;
    let mut rows = Vec::new();
    for &n in &cfg.levels {
        let model = CurveModel::from_tower(&cfg.spec, n)?;
        let (pc, l) = zeta_data(&model, 2, cfg.enum_cap)?;
        let mut counts = pc.counts;
        if let Some(s) = max_s {
            counts.truncate(s as usize);
            for s in counts.len() as u32 + 1..=s {
                counts.push(count_points(&model, s, cfg.enum_cap)?);
            }
        }
        let hw = hasse_witt_matrix(&model, cfg.gmax)?;
        rows.push(ZetaRow {
            level: n,
            genus: model.genus(),
            counts,
            class_number: l.at_one().to_string(),
            class_number_p_valuation: class_number_p_part(&l, p),
            cl_p_rank: rational_p_torsion(model.field(), &hw)?,
            lpoly: l,
        });
    }
    let mut t = Table::new(&["level", "s", "N_s"]);
    for r in &rows {
        for (i, c) in r.counts.iter().enumerate() {
            t.push(vec![r.level.to_string(), (i + 1).to_string(), c.to_string()]);
        }
    }
    let stem = if sink.emit == crate::output::Emit::Json { "lpoly" } else { "counts" };
    sink.emit(stem, &doc(cfg, &rows), &t)
}

pub fn verify_suite(cfg: &RunConfig, suite: Suite, sink: &Sink) -> Result<Report, CliError> {
    let vc = VerifyConfig { levels: cfg.levels.clone(), gmax: cfg.gmax, enum_cap: cfg.enum_cap };
    let report = verify(&cfg.spec, suite, &vc)?;
    let mut t = Table::new(&["status", "suite", "check", "level", "detail", "anchor"]);
    for r in &report.records {
        t.push(vec![
            r.status.to_string(),
            r.suite.clone(),
            r.check.clone(),
            opt(r.level),
            r.detail.clone(),
            r.anchor.clone(),
        ]);
    }
    sink.emit("verify", &report, &t)?;
    Ok(report)
}

pub struct FitInput {
    pub points: Vec<(u64, i64)>,
    pub p: Option<u32>,
}

fn cell_int(v: &Value) -> Option<i64> {
    match v {
        Value::Number(n) => n.as_i64(),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// Reads a growth series from a CSV (level column plus `column`) or from a
/// JSON document: either `{"points": [[n, e], ...]}` or a schema-1 report
/// whose `rows` carry `level` and `column`. Rows where the column is empty or
/// null are skipped.
pub fn read_series(path: &Path, column: Option<&str>) -> Result<FitInput, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let bad = |m: String| CliError::Config(format!("{}: {m}", path.display()));
    if path.extension().is_some_and(|e| e == "csv") {
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let header = rd.headers().map_err(|e| bad(e.to_string()))?.clone();
        let xi = header.iter().position(|h| h == "level" || h == "n").unwrap_or(0);
        let yi = match column {
            Some(c) => header.iter().position(|h| h == c).ok_or_else(|| bad(format!("no column `{c}`")))?,
            None => (0..header.len()).find(|&i| i != xi).ok_or_else(|| bad("need two columns".into()))?,
        };
        let mut points = Vec::new();
        for rec in rd.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let (x, y) = (rec.get(xi).unwrap_or(""), rec.get(yi).unwrap_or(""));
            if let (Ok(x), Ok(y)) = (x.parse(), y.parse()) {
                points.push((x, y));
            }
        }
        return Ok(FitInput { points, p: None });
    }
    let doc: Value = serde_json::from_str(&text).map_err(|e| bad(e.to_string()))?;
    let p = doc.get("p").and_then(Value::as_u64).map(|p| p as u32);
    if let Some(pts) = doc.get("points").and_then(Value::as_array) {
        let points = pts
            .iter()
            .map(|pt| match pt.as_array().map(|a| a.as_slice()) {
                Some([x, y]) => Some((x.as_u64()?, cell_int(y)?)),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("points must be [level, value] pairs".into()))?;
        return Ok(FitInput { points, p });
    }
    let rows = doc.get("rows").and_then(Value::as_array).ok_or_else(|| bad("expected `points` or `rows`".into()))?;
    let column = column.ok_or_else(|| bad("--column is required for JSON reports".into()))?;
    let points = rows
        .iter()
        .filter_map(|r| Some((r.get("level")?.as_u64()?, cell_int(r.get(column)?)?)))
        .collect();
    Ok(FitInput { points, p })
}

#[derive(Serialize)]
struct FitDoc {
    schema: u32,
    p: u32,
    series: Vec<(u64, i64)>,
    law: Option<MuLambdaNu>,
    law_error: Option<String>,
    power_growth: Option<PowerGrowth>,
}

/// Returns whether a requested power-growth verdict failed.
pub fn fit(input: FitInput, p: Option<u32>, delta: Option<u32>, sink: &Sink) -> Result<bool, CliError> {
    let p = p.or(input.p).ok_or_else(|| CliError::Config("--p is required when the input does not record p".into()))?;
    let series = GrowthSeries::new(input.points.clone())?;
    let (law, law_error) = match fit_mu_lambda_nu(&series, p as u64) {
        Ok(l) => (Some(l), None),
        Err(e) if delta.is_some() => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let power_growth = delta.map(|d| fit_power_growth(&series, p as u64, d)).transpose()?;
    let mut t = Table::new(&["quantity", "value"]);
    t.push(vec!["series".into(), format!("{:?}", input.points)]);
    if let Some(l) = &law {
        t.push(vec!["mu".into(), l.mu.to_string()]);
        t.push(vec!["lambda".into(), l.lambda.to_string()]);
        t.push(vec!["nu".into(), l.nu.to_string()]);
        t.push(vec!["exact_from".into(), opt(l.exact_from)]);
    }
    if let Some(e) = &law_error {
        t.push(vec!["law".into(), e.clone()]);
    }
    if let Some(g) = &power_growth {
        t.push(vec!["delta".into(), g.delta.to_string()]);
        t.push(vec!["C".into(), g.c.to_string()]);
        t.push(vec!["mu_lower".into(), g.mu_lower.to_string()]);
        t.push(vec!["nu_upper".into(), g.nu_upper.to_string()]);
        t.push(vec!["verdict".into(), if g.verdict { "PASS" } else { "FAIL" }.into()]);
    }
    let failed = power_growth.as_ref().is_some_and(|g| !g.verdict);
    let doc = FitDoc { schema: SCHEMA, p, series: input.points, law, law_error, power_growth };
    sink.emit("fit", &doc, &t)?;
    Ok(failed)
}
