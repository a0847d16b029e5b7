//! Randomized algebraic laws.

use aswtower::fit::{fit_mu_lambda_nu, GrowthSeries};
use aswtower::semilinear::{prime_coordinates, Model};
use aswtower::witt::{witt_add, witt_mul};
use aswtower::{field_make, FieldDesc, Fq, Matrix, Poly, RatFunc, SemilinearMap};
use num_rational::BigRational;
use num_bigint::BigInt;
use proptest::prelude::*;

fn field() -> impl Strategy<Value = FieldDesc> {
    prop::sample::select(vec![(2u32, 1u32), (2, 3), (3, 1), (3, 2), (5, 1), (7, 2)])
        .prop_map(|(p, r)| field_make(p, r, None).unwrap())
}

fn elem(f: &FieldDesc, raw: u64) -> Fq {
    Fq((raw % f.q() as u64) as u32)
}

fn poly(f: &FieldDesc, raw: &[u64]) -> Poly {
    Poly::from_coeffs(raw.iter().map(|&c| elem(f, c)).collect())
}

fn square(f: &FieldDesc, n: usize, raw: &[u64]) -> Matrix {
    Matrix::from_rows((0..n).map(|i| (0..n).map(|j| elem(f, raw[i * n + j])).collect()).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn field_axioms(f in field(), a in any::<u64>(), b in any::<u64>(), c in any::<u64>()) {
        let (a, b, c) = (elem(&f, a), elem(&f, b), elem(&f, c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), Fq::ZERO);
        if !a.is_zero() {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq::ONE);
        }
        prop_assert_eq!(f.pow(a, f.q() as u64), a);
        prop_assert_eq!(f.frobenius(a, f.r() as i64), a);
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
    }

}

proptest! {
    #[test]
    fn semilinear_composition(f in field(), n in 1usize..=4, raw in prop::collection::vec(any::<u64>(), 48),
                              tw in prop::collection::vec(-3i64..4, 3), v in prop::collection::vec(any::<u64>(), 4)) {
        let maps: Vec<SemilinearMap> = (0..3).map(|k| SemilinearMap::new(square(&f, n, &raw[k * 16..]), tw[k])).collect();
        let left = maps[0].compose(&f, &maps[1]).unwrap().compose(&f, &maps[2]).unwrap();
        let right = maps[0].compose(&f, &maps[1].compose(&f, &maps[2]).unwrap()).unwrap();
        prop_assert_eq!(left.matrix.clone(), right.matrix);
        prop_assert_eq!(left.twist, tw[0] + tw[1] + tw[2]);
        let v: Vec<Fq> = v[..n].iter().map(|&a| elem(&f, a)).collect();
        let direct = maps[0].apply(&f, &maps[1].apply(&f, &maps[2].apply(&f, &v)));
        prop_assert_eq!(left.apply(&f, &v), direct);
    }

    #[test]
    fn linearize_matches_action(f in field(), n in 1usize..=4, raw in prop::collection::vec(any::<u64>(), 16), tw in -3i64..4,
                                xs in prop::collection::vec(prop::collection::vec(any::<u64>(), 4), 100)) {
        let a = SemilinearMap::new(square(&f, n, &raw), tw);
        let lin = a.linearize(&f, Model::PrimeField).unwrap();
        for x in &xs {
            let x: Vec<Fq> = x[..n].iter().map(|&c| elem(&f, c)).collect();
            let pf = field_make(f.p(), 1, None).unwrap();
            prop_assert_eq!(lin.mul_vec(&pf, &prime_coordinates(&f, &x)), prime_coordinates(&f, &a.apply(&f, &x)));
        }
        if tw.rem_euclid(f.r() as i64) == 0 {
            prop_assert_eq!(a.linearize(&f, Model::FieldLinear).unwrap(), a.matrix.clone());
        } else {
            prop_assert!(a.linearize(&f, Model::FieldLinear).is_err());
        }
    }

    #[test]
    fn stable_rank_is_idempotent(f in field(), n in 1usize..=5, raw in prop::collection::vec(any::<u64>(), 25), tw in -2i64..3,
                                 zero_mask in prop::collection::vec(any::<bool>(), 25)) {
        let raw: Vec<u64> = raw.iter().zip(&zero_mask).map(|(&c, &z)| if z { 0 } else { c }).collect();
        let a = SemilinearMap::new(square(&f, n, &raw), tw);
        let aa = a.compose(&f, &a).unwrap();
        prop_assert_eq!(a.stable_rank(&f), aa.stable_rank(&f));
        prop_assert!(a.stable_rank(&f) <= a.rank(&f));
    }

    #[test]
    fn witt_ring_laws(f in field(), m in 1usize..=3, raw in prop::collection::vec(any::<u64>(), 9)) {
        let v = |k: usize| -> Vec<Fq> { raw[3 * k..3 * k + m].iter().map(|&c| elem(&f, c)).collect() };
        let (a, b, c) = (v(0), v(1), v(2));
        let p = f.p();
        let add = |x: &[Fq], y: &[Fq]| witt_add(&f, p, x, y).unwrap();
        let mul = |x: &[Fq], y: &[Fq]| witt_mul(&f, p, x, y).unwrap();
        prop_assert_eq!(add(&a, &b), add(&b, &a));
        prop_assert_eq!(add(&add(&a, &b), &c), add(&a, &add(&b, &c)));
        prop_assert_eq!(add(&a, &vec![Fq::ZERO; m]), a.clone());
        prop_assert_eq!(mul(&a, &b), mul(&b, &a));
        prop_assert_eq!(mul(&a, &add(&b, &c)), add(&mul(&a, &b), &mul(&a, &c)));
    }

    #[test]
    fn poly_division(f in field(), a in prop::collection::vec(any::<u64>(), 0..8), d in prop::collection::vec(any::<u64>(), 1..5)) {
        let a = poly(&f, &a);
        let d = poly(&f, &d);
        prop_assume!(!d.is_zero());
        let (q, r) = a.divrem(&f, &d);
        prop_assert_eq!(q.mul(&f, &d).add(&f, &r), a.clone());
        prop_assert!(r.degree() < d.degree());
        let g = a.gcd(&f, &d);
        prop_assert!(a.rem(&f, &g).is_zero() && d.rem(&f, &g).is_zero());
    }

    #[test]
    fn rank_nullity(f in field(), rows in 1usize..6, cols in 1usize..6, raw in prop::collection::vec(any::<u64>(), 36)) {
        let m = Matrix::from_rows((0..rows).map(|i| (0..cols).map(|j| elem(&f, raw[i * 6 + j])).collect()).collect());
        let k = m.nullspace(&f);
        prop_assert_eq!(m.rank(&f) + k.cols(), cols);
        prop_assert!(m.mul(&f, &k).is_zero());
        prop_assert_eq!(m.transpose().rank(&f), m.rank(&f));
    }

    #[test]
    fn ratfunc_field_laws(f in field(), a in prop::collection::vec(any::<u64>(), 1..4), b in prop::collection::vec(any::<u64>(), 1..4),
                          c in prop::collection::vec(any::<u64>(), 1..4), k in -3i64..4, x in any::<u64>()) {
        let u = RatFunc::new(&f, poly(&f, &a), Poly::x().pow(&f, 2).add(&f, &Poly::one()));
        let v = RatFunc::from_poly(poly(&f, &b)).mul(&f, &RatFunc::monomial(Fq::ONE, k));
        let w = RatFunc::from_poly(poly(&f, &c));
        prop_assert_eq!(u.mul(&f, &v.add(&f, &w)), u.mul(&f, &v).add(&f, &u.mul(&f, &w)));
        prop_assert_eq!(u.sub(&f, &u), RatFunc::zero());
        if let Some(vi) = v.inv(&f) {
            prop_assert!(v.mul(&f, &vi).is_one());
        }
        let x = elem(&f, x);
        if let (Some(ux), Some(vx), Some(sx)) = (u.eval(&f, x), v.eval(&f, x), u.add(&f, &v).eval(&f, x)) {
            prop_assert_eq!(sx, f.add(ux, vx));
        }
    }

    #[test]
    fn fit_shift_invariance(mu in -2i64..3, lambda in -3i64..4, nu in -20i64..20, start in 0u64..3, shift in -50i64..50) {
        let p = 2u64;
        let pts: Vec<(u64, i64)> = (start..start + 5).map(|n| (n, mu * (p as i64).pow(n as u32) + lambda * n as i64 + nu)).collect();
        let base = fit_mu_lambda_nu(&GrowthSeries::new(pts.clone()).unwrap(), p).unwrap();
        let moved = fit_mu_lambda_nu(&GrowthSeries::new(pts.iter().map(|&(n, e)| (n, e + shift)).collect()).unwrap(), p).unwrap();
        let r = |x: i64| BigRational::from_integer(BigInt::from(x));
        prop_assert_eq!(&base.mu, &r(mu));
        prop_assert_eq!(&base.lambda, &r(lambda));
        prop_assert_eq!(&moved.mu, &base.mu);
        prop_assert_eq!(&moved.lambda, &base.lambda);
        prop_assert_eq!(&moved.nu, &(base.nu.clone() + r(shift)));
        prop_assert!(base.exact_from.is_some());
    }
}
