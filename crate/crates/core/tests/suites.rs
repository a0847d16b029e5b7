//! Verification suites on the fixture towers, plus golden outputs.

use std::path::{Path, PathBuf};

use aswtower::curve::CurveModel;
use aswtower::derham::full_dieudonne_mod_p;
use aswtower::fit::{fit_mu_lambda_nu, GrowthSeries};
use aswtower::serial::DieudonneJson;
use aswtower::tower::TowerSpec;
use aswtower::verify::{verify, Status, Suite, VerifyConfig};
use aswtower::zeta::{class_number_p_part, class_number_u64, zeta_data, DEFAULT_ENUM_CAP};

const FIXTURES: [&str; 7] = [
    "ss_elliptic_p2",
    "genus2_p2",
    "x2_p3",
    "two_point_p2",
    "ordinary_elliptic_p2",
    "two_point_p3",
    "level3_p2",
];

fn dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn fixture(name: &str) -> TowerSpec {
    TowerSpec::from_path(&dir().join(format!("{name}.toml"))).unwrap()
}

fn config(spec: &TowerSpec, gmax: u64) -> VerifyConfig {
    VerifyConfig { levels: (0..=spec.depth).collect(), gmax, enum_cap: DEFAULT_ENUM_CAP }
}

/// Compares against the golden file, or writes it when `UPDATE_GOLDEN` is set.
fn golden(name: &str, text: &str) {
    let path = dir().join("golden").join(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, text).unwrap();
    }
    let want = std::fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing golden {}", path.display()));
    assert_eq!(text, want, "golden {name}");
}

#[test]
fn fixtures_have_no_failures() {
    for name in FIXTURES {
        let spec = fixture(name);
        let report = verify(&spec, Suite::All, &config(&spec, 40)).unwrap();
        let bad: Vec<_> = report.records.iter().filter(|r| r.status == Status::Fail).collect();
        assert!(bad.is_empty(), "{name}: {bad:#?}");
        assert!(report.records.iter().any(|r| r.status == Status::Pass), "{name}");
    }
}

#[test]
fn power_growth_passes_where_configured() {
    let spec = fixture("two_point_p2");
    let report = verify(&spec, Suite::Asymptotics, &config(&spec, 40)).unwrap();
    let rec = report.records.iter().find(|r| r.check == "cl-p-growth").unwrap();
    assert_eq!(rec.status, Status::Pass, "{}", rec.detail);
}

#[test]
fn zero_cap_only_skips() {
    for name in ["ss_elliptic_p2", "two_point_p3"] {
        let spec = fixture(name);
        let report = verify(&spec, Suite::All, &config(&spec, 0)).unwrap();
        assert_eq!(report.failures(), 0, "{name}");
        assert!(report.records.iter().any(|r| r.status == Status::Skipped));
    }
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let spec = fixture("two_point_p2");
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string(&verify(&spec, Suite::All, &config(&spec, 40)).unwrap()).unwrap())
    };
    assert_eq!(run(1), run(3));
}

#[test]
fn class_number_fit_golden() {
    let spec = fixture("ss_elliptic_p2");
    let mut class = Vec::new();
    let mut pts = Vec::new();
    for n in 0..=2 {
        let model = CurveModel::from_tower(&spec, n).unwrap();
        let (_, l) = zeta_data(&model, 0, DEFAULT_ENUM_CAP).unwrap();
        class.push(class_number_u64(&l).unwrap());
        pts.push((n as u64, class_number_p_part(&l, 2) as i64));
    }
    // level 1 is y^2 + y = x^3 with three rational points
    assert_eq!(class[..2], [1, 3]);
    let fit = fit_mu_lambda_nu(&GrowthSeries::new(pts.clone()).unwrap(), 2).unwrap();
    let text = serde_json::to_string_pretty(&serde_json::json!({
        "tower": spec.name,
        "class_numbers": class,
        "series": pts,
        "fit": fit,
    }))
    .unwrap();
    golden("class_fit_ss_elliptic_p2.json", &(text + "\n"));
}

#[test]
fn dieudonne_golden() {
    for name in ["ss_elliptic_p2", "genus2_p2", "x2_p3"] {
        let model = CurveModel::from_tower(&fixture(name), 1).unwrap();
        let d = full_dieudonne_mod_p(&model, 40).unwrap();
        let text = serde_json::to_string_pretty(&DieudonneJson::new(&d)).unwrap();
        golden(&format!("dieudonne_{name}.json"), &(text + "\n"));
    }
}
