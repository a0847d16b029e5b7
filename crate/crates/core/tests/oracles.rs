//! Independent brute-force oracles for the library computations.

use std::collections::HashSet;
use std::path::Path;

use aswtower::curve::CurveModel;
use aswtower::derham::{full_dieudonne_mod_p, hasse_witt_matrix, torsion_order, JIdeal, ModPDieudonne, Part};
use aswtower::galois::{find_etale_covers, nakajima_ll_check, EtaleCover};
use aswtower::tower::{parse_ratfunc, TowerSpec};
use aswtower::witt::{witt_add, witt_mul, witt_sub};
use aswtower::zeta::{count_points, rational_p_torsion, DEFAULT_ENUM_CAP};
use aswtower::{field_make, FieldDesc, Fq, Place};
use proptest::prelude::*;
use serde::Deserialize;

fn fixture(name: &str) -> TowerSpec {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(format!("{name}.toml"));
    TowerSpec::from_path(&path).unwrap()
}

fn inline(p: u32, r: u32, branch: &[&str], witt: &[&str]) -> TowerSpec {
    let b = branch.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(", ");
    let w = witt.iter().map(|s| format!("\"{s}\"")).collect::<Vec<_>>().join(", ");
    TowerSpec::from_toml_str(&format!("p = {p}\nr = {r}\nbranch = [{b}]\nwitt = [{w}]\n")).unwrap()
}

// Witt vectors over F_p against Z/p^n: (a_0, a_1, ...) maps to sum p^i tau(a_i).

fn teichmuller(a: u64, p: u64, n: u32) -> u64 {
    let m = p.pow(n);
    let mut t = a % m;
    for _ in 0..n {
        let mut x = 1u64;
        for _ in 0..p {
            x = x * t % m;
        }
        t = x;
    }
    t
}

fn to_padic(v: &[Fq], p: u64) -> u64 {
    let n = v.len() as u32;
    let m = p.pow(n);
    v.iter().enumerate().fold(0, |acc, (i, a)| (acc + p.pow(i as u32) * teichmuller(a.0 as u64, p, n)) % m)
}

proptest! {
    #[test]
    fn witt_arithmetic_matches_p_adic_integers(
        p in prop::sample::select(vec![2u32, 3, 5]),
        n in 1usize..=3,
        a in prop::collection::vec(0u32..5, 3),
        b in prop::collection::vec(0u32..5, 3),
    ) {
        let f = field_make(p, 1, None).unwrap();
        let a: Vec<Fq> = a[..n].iter().map(|&x| Fq(x % p)).collect();
        let b: Vec<Fq> = b[..n].iter().map(|&x| Fq(x % p)).collect();
        let pp = p as u64;
        let m = pp.pow(n as u32);
        let (ia, ib) = (to_padic(&a, pp), to_padic(&b, pp));
        prop_assert_eq!(to_padic(&witt_add(&f, p, &a, &b).unwrap(), pp), (ia + ib) % m);
        prop_assert_eq!(to_padic(&witt_mul(&f, p, &a, &b).unwrap(), pp), ia * ib % m);
        prop_assert_eq!(to_padic(&witt_sub(&f, p, &a, &b).unwrap(), pp), (ia + m - ib) % m);
    }
}

// J-torsion orders by enumerating all vectors of the prime-field module.

fn all_vectors(p: u32, n: usize) -> Vec<Vec<Fq>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..p).map(move |a| [v.clone(), vec![Fq(a)]].concat())).collect();
    }
    out
}

fn iterate(d: &ModPDieudonne, letter: char, v: &[Fq], times: usize) -> Vec<Fq> {
    let m = if letter == 'F' { &d.frobenius } else { &d.verschiebung };
    (0..times).fold(v.to_vec(), |acc, _| m.apply(&d.field, &acc))
}

fn log_p(size: usize, p: u32) -> usize {
    let mut k = 0;
    let mut s = 1;
    while s < size {
        s *= p as usize;
        k += 1;
    }
    assert_eq!(s, size, "set size is a power of p");
    k
}

fn brute_torsion(d: &ModPDieudonne, words: &[&str], part: Part) -> usize {
    let f = &d.field;
    let p = f.p();
    let n = d.dim();
    let vs = all_vectors(p, n);
    let is_zero = |v: &[Fq]| v.iter().all(|a| a.is_zero());
    let sub: Vec<Vec<Fq>> = match part {
        Part::All => vs.clone(),
        Part::Etale => vs.iter().map(|v| iterate(d, 'F', v, n)).collect::<HashSet<_>>().into_iter().collect(),
        Part::Multiplicative => vs.iter().map(|v| iterate(d, 'V', v, n)).collect::<HashSet<_>>().into_iter().collect(),
        Part::LocalLocal => vs
            .iter()
            .filter(|v| is_zero(&iterate(d, 'F', v, n)) && is_zero(&iterate(d, 'V', v, n)))
            .cloned()
            .collect(),
    };
    let mut span: HashSet<Vec<Fq>> = HashSet::from([vec![Fq::ZERO; n]]);
    for w in words {
        let images: HashSet<Vec<Fq>> = sub
            .iter()
            .map(|v| w.chars().rev().fold(v.clone(), |acc, c| iterate(d, c, &acc, 1)))
            .collect();
        span = span
            .iter()
            .flat_map(|s| images.iter().map(move |i| s.iter().zip(i).map(|(a, b)| f.add(*a, *b)).collect::<Vec<_>>()))
            .collect();
    }
    log_p(sub.len(), p) - log_p(span.len(), p)
}

#[test]
fn torsion_orders_match_enumeration() {
    let curves = [
        (fixture("ss_elliptic_p2"), 1),
        (fixture("genus2_p2"), 1),
        (fixture("x2_p3"), 1),
        (fixture("two_point_p2"), 1),
        (fixture("ordinary_elliptic_p2"), 1),
        (fixture("two_point_p3"), 1),
        (inline(2, 1, &["inf"], &["x^7"]), 1),
    ];
    let ideals: [(&str, &[&str]); 5] =
        [("p", &[]), ("F", &["F"]), ("V", &["V"]), ("F,V", &["F", "V"]), ("F^2,V", &["FF", "V"])];
    for (spec, n) in &curves {
        let model = CurveModel::from_tower(spec, *n).unwrap();
        assert!(model.genus() <= 3);
        let d = full_dieudonne_mod_p(&model, 40).unwrap();
        for part in [Part::All, Part::Etale, Part::Multiplicative, Part::LocalLocal] {
            for (name, words) in ideals {
                let j: JIdeal = name.parse().unwrap();
                assert_eq!(
                    torsion_order(&d, &j, part),
                    brute_torsion(&d, words, part),
                    "{} J = {name} part {part:?}",
                    spec.name
                );
            }
        }
    }
}

// Elliptic curves y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6 by the chord
// and tangent law.

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Pt {
    O,
    A(Fq, Fq),
}

struct Weierstrass {
    f: FieldDesc,
    a: [Fq; 5],
}

impl Weierstrass {
    fn on(&self, x: Fq, y: Fq) -> bool {
        let f = &self.f;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = f.add(f.add(f.mul(y, y), f.mul(a1, f.mul(x, y))), f.mul(a3, y));
        let x2 = f.mul(x, x);
        let rhs = f.add(f.add(f.add(f.mul(x2, x), f.mul(a2, x2)), f.mul(a4, x)), a6);
        lhs == rhs
    }

    fn points(&self) -> Vec<Pt> {
        let mut out = vec![Pt::O];
        for x in self.f.elements() {
            for y in self.f.elements() {
                if self.on(x, y) {
                    out.push(Pt::A(x, y));
                }
            }
        }
        out
    }

    fn neg(&self, p: Pt) -> Pt {
        let f = &self.f;
        let [a1, _, a3, _, _] = self.a;
        match p {
            Pt::O => Pt::O,
            Pt::A(x, y) => Pt::A(x, f.sub(f.neg(y), f.add(f.mul(a1, x), a3))),
        }
    }

    fn add(&self, p: Pt, q: Pt) -> Pt {
        let f = &self.f;
        let [a1, a2, a3, a4, _] = self.a;
        let (Pt::A(x1, y1), Pt::A(x2, y2)) = (p, q) else {
            return if p == Pt::O { q } else { p };
        };
        if q == self.neg(p) {
            return Pt::O;
        }
        let lambda = if x1 != x2 {
            f.div(f.sub(y2, y1), f.sub(x2, x1)).unwrap()
        } else {
            let num = f.sub(
                f.add(f.add(f.mul(f.from_int(3), f.mul(x1, x1)), f.mul(f.from_int(2), f.mul(a2, x1))), a4),
                f.mul(a1, y1),
            );
            let den = f.add(f.add(f.mul(f.from_int(2), y1), f.mul(a1, x1)), a3);
            f.div(num, den).unwrap()
        };
        let nu = f.sub(y1, f.mul(lambda, x1));
        let x3 = f.sub(f.sub(f.sub(f.add(f.mul(lambda, lambda), f.mul(a1, lambda)), a2), x1), x2);
        let y3 = f.sub(f.neg(f.add(f.mul(f.add(lambda, a1), x3), nu)), a3);
        Pt::A(x3, y3)
    }

    /// `log_2 |E(F_q)[2]|` and `|E(F_q)|`.
    fn two_torsion(&self) -> (usize, usize) {
        let pts = self.points();
        let t = pts.iter().filter(|&&p| self.add(p, p) == Pt::O).count();
        (log_p(t, 2), pts.len())
    }
}

#[test]
fn rational_two_torsion_matches_group_enumeration() {
    for r in [1, 2] {
        let f = field_make(2, r, None).unwrap();
        let (z, o) = (Fq::ZERO, Fq::ONE);
        // y^2 + y = x^3
        let ss = Weierstrass { f: f.clone(), a: [z, z, o, z, z] };
        // y^2 + xy = x^3 + 1
        let ord = Weierstrass { f: f.clone(), a: [o, z, z, z, o] };
        let towers = [inline(2, r, &["inf"], &["x^3"]), inline(2, r, &["inf", "x"], &["x+x^-2"])];
        for (e, spec) in [ss, ord].iter().zip(&towers) {
            let model = CurveModel::from_tower(spec, 1).unwrap();
            let (t, size) = e.two_torsion();
            let hw = hasse_witt_matrix(&model, 40).unwrap();
            assert_eq!(rational_p_torsion(model.field(), &hw).unwrap(), t, "r = {r}");
            assert_eq!(count_points(&model, 1, DEFAULT_ENUM_CAP).unwrap() as usize, size, "r = {r}");
        }
    }
    let f2 = field_make(2, 1, None).unwrap();
    let (z, o) = (Fq::ZERO, Fq::ONE);
    assert_eq!(Weierstrass { f: f2.clone(), a: [z, z, o, z, z] }.two_torsion(), (0, 3));
    assert_eq!(Weierstrass { f: f2, a: [o, z, z, z, o] }.two_torsion(), (1, 4));
}

// Level-2 point counts from the Witt-vector equation F(y) - y = (f_0, f_1).

fn brute_level_two(spec: &TowerSpec, s: u32) -> u64 {
    let p = spec.p();
    let big = field_make(p, s, None).unwrap();
    let mut total = 0;
    for x in big.elements() {
        let vals: Option<Vec<Fq>> = spec.witt.iter().map(|h| h.eval(&big, x)).collect();
        let Some(vals) = vals else {
            // a rational branch point: one totally ramified point above it
            total += 1;
            continue;
        };
        for y0 in big.elements() {
            for y1 in big.elements() {
                let fy = [big.pow(y0, p as u64), big.pow(y1, p as u64)];
                if witt_sub(&big, p, &fy, &[y0, y1]).unwrap() == vals {
                    total += 1;
                }
            }
        }
    }
    if spec.branch.contains(&Place::Infinity) {
        total += 1;
    }
    total
}

#[test]
fn level_two_counts_match_witt_enumeration() {
    for (spec, max_s) in [
        (fixture("ss_elliptic_p2"), 4),
        (fixture("two_point_p2"), 3),
        (inline(2, 1, &["inf"], &["x", "x^3"]), 3),
        (fixture("x2_p3"), 2),
        (fixture("two_point_p3"), 2),
    ] {
        let model = CurveModel::from_tower(&spec, 2).unwrap();
        for s in 1..=max_s {
            assert_eq!(
                count_points(&model, s, DEFAULT_ENUM_CAP).unwrap(),
                brute_level_two(&spec, s),
                "{} s = {s}",
                spec.name
            );
        }
    }
}

// Étale covers found by exhaustive search, against the pinned witnesses.

#[derive(Deserialize)]
struct CoverFile {
    cover: Vec<CoverFixture>,
}

#[derive(Deserialize)]
struct CoverFixture {
    p: u32,
    f0: String,
    r: String,
    base_genus: u64,
    base_p_rank: u64,
    cover_genus: u64,
    blocks: Vec<usize>,
}

#[test]
fn etale_cover_witnesses() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/etale_covers.toml");
    let file: CoverFile = toml::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    for c in file.cover {
        let f = field_make(c.p, 1, None).unwrap();
        let f0 = parse_ratfunc(&f, &c.f0).unwrap();
        let found = find_etale_covers(&f, &f0, 3, 1);
        assert_eq!(found, vec![parse_ratfunc(&f, &c.r).unwrap()], "first witness for {}", c.f0);
        let cover = EtaleCover::new(&f, &f0, &found[0]).unwrap();
        let rep = nakajima_ll_check(&cover, 40).unwrap();
        assert_eq!((rep.base_genus, rep.base_p_rank, rep.cover_genus), (c.base_genus, c.base_p_rank, c.cover_genus));
        assert_eq!(rep.jordan.blocks, c.blocks);
        assert!(rep.pass);
        // unramified: Riemann-Hurwitz with no different
        assert_eq!(rep.cover_genus, c.p as u64 * (c.base_genus - 1) + 1);
    }
}
