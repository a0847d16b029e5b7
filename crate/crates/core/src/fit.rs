//! Growth laws across the levels of a tower: exact `mu p^n + lambda n + nu`
//! fits, power-growth brackets and the a-number lower bound.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Signed, Zero};
use serde::{Serialize, Serializer};

use crate::curve::CurveModel;
use crate::derham::a_number;
use crate::error::{CohomologyError, FitError};
use crate::tower::{breaks, normalize_asw, TowerSpec};

/// Points `(n, e_n)` with `n` strictly increasing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthSeries {
    pub points: Vec<(u64, i64)>,
}

impl GrowthSeries {
    pub fn new(points: Vec<(u64, i64)>) -> Result<Self, FitError> {
        if points.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(FitError::Unordered);
        }
        Ok(GrowthSeries { points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn rational<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn rationals<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MuLambdaNu {
    #[serde(serialize_with = "rational")]
    pub mu: BigRational,
    #[serde(serialize_with = "rational")]
    pub lambda: BigRational,
    #[serde(serialize_with = "rational")]
    pub nu: BigRational,
    /// Least level from which the law holds exactly on the data, if any.
    pub exact_from: Option<u64>,
    /// `e_n` minus the law at each data point.
    #[serde(serialize_with = "rationals")]
    pub residuals: Vec<BigRational>,
}

fn pow_r(p: u64, n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(p).pow(n as u32))
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

/// Solves the 3x3 system `sum_j a[i][j] x_j = b_i` exactly.
fn solve3(mut a: [[BigRational; 3]; 3], mut b: [BigRational; 3]) -> Option<[BigRational; 3]> {
    for c in 0..3 {
        let piv = (c..3).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, piv);
        b.swap(c, piv);
        for r in 0..3 {
            if r != c && !a[r][c].is_zero() {
                let k = &a[r][c] / &a[c][c];
                for j in 0..3 {
                    let t = &k * &a[c][j];
                    a[r][j] -= t;
                }
                let t = &k * &b[c];
                b[r] -= t;
            }
        }
    }
    Some([&b[0] / &a[0][0], &b[1] / &a[1][1], &b[2] / &a[2][2]])
}

fn row(p: u64, n: u64) -> [BigRational; 3] {
    [pow_r(p, n), int(n as i64), int(1)]
}

/// Fits `e_n = mu p^n + lambda n + nu` exactly from the least possible
/// starting level, falling back to least squares over the rationals.
pub fn fit_mu_lambda_nu(series: &GrowthSeries, p: u64) -> Result<MuLambdaNu, FitError> {
    let pts = &series.points;
    if pts.len() < 3 {
        return Err(FitError::InsufficientData { needed: 3, got: pts.len() });
    }
    let law = |x: &[BigRational; 3], n: u64| {
        let r = row(p, n);
        &x[0] * &r[0] + &x[1] * &r[1] + &x[2]
    };
    let residuals = |x: &[BigRational; 3]| pts.iter().map(|&(n, e)| int(e) - law(x, n)).collect::<Vec<_>>();
    // a law counts as exact only if some point beyond the three that fix it
    // confirms it, unless the series has just three points
    let min_tail = pts.len().min(4);
    for start in 0..=pts.len() - min_tail {
        let tail = &pts[start..];
        let a = [row(p, tail[0].0), row(p, tail[1].0), row(p, tail[2].0)];
        let b = [int(tail[0].1), int(tail[1].1), int(tail[2].1)];
        let Some(x) = solve3(a, b) else { continue };
        if tail.iter().all(|&(n, e)| law(&x, n) == int(e)) {
            let res = residuals(&x);
            let [mu, lambda, nu] = x;
            return Ok(MuLambdaNu { mu, lambda, nu, exact_from: Some(tail[0].0), residuals: res });
        }
    }
    // normal equations
    let mut ata: [[BigRational; 3]; 3] = Default::default();
    let mut atb: [BigRational; 3] = Default::default();
    for &(n, e) in pts {
        let r = row(p, n);
        for i in 0..3 {
            for j in 0..3 {
                ata[i][j] += &r[i] * &r[j];
            }
            atb[i] += &r[i] * int(e);
        }
    }
    let x = solve3(ata, atb).expect("distinct levels give a regular system");
    let res = residuals(&x);
    let [mu, lambda, nu] = x;
    Ok(MuLambdaNu { mu, lambda, nu, exact_from: None, residuals: res })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PowerGrowth {
    pub delta: u32,
    /// Subdominant constant `C` in `e_n - C p^{(delta-1) n}`.
    #[serde(serialize_with = "rational")]
    pub c: BigRational,
    #[serde(serialize_with = "rational")]
    pub mu_lower: BigRational,
    #[serde(serialize_with = "rational")]
    pub nu_upper: BigRational,
    /// `mu_lower >= 1 / delta!`.
    pub verdict: bool,
    /// `mu_lower == nu_upper`.
    pub brackets_agree: bool,
}

/// Brackets `e_n` between `mu p^{delta n}` and `nu p^{delta n}` after
/// removing a single subdominant term `C p^{(delta-1)n}`, with `C` chosen to
/// make the bracket as tight as possible.
pub fn fit_power_growth(series: &GrowthSeries, p: u64, delta: u32) -> Result<PowerGrowth, FitError> {
    if delta < 1 {
        return Err(FitError::BadDelta);
    }
    let pts = &series.points;
    if pts.len() < 2 {
        return Err(FitError::InsufficientData { needed: 2, got: pts.len() });
    }
    // e_n / p^{delta n} - C / p^n
    let a: Vec<BigRational> = pts.iter().map(|&(n, e)| int(e) / pow_r(p, delta as u64 * n)).collect();
    let b: Vec<BigRational> = pts.iter().map(|&(n, _)| pow_r(p, n).recip()).collect();
    let bracket = |c: &BigRational| {
        let vals: Vec<BigRational> = a.iter().zip(&b).map(|(a, b)| a - c * b).collect();
        let lo = vals.iter().min().unwrap().clone();
        let hi = vals.iter().max().unwrap().clone();
        (lo, hi)
    };
    let mut candidates = vec![BigRational::zero()];
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            candidates.push((&a[i] - &a[j]) / (&b[i] - &b[j]));
        }
    }
    let best = candidates
        .into_iter()
        .map(|c| {
            let (lo, hi) = bracket(&c);
            (&hi - &lo, c.abs(), c, lo, hi)
        })
        .min_by(|x, y| (&x.0, &x.1, &x.2).cmp(&(&y.0, &y.1, &y.2)))
        .unwrap();
    let (_, _, c, mu_lower, nu_upper) = best;
    let fact: u64 = (1..=delta as u64).product();
    let verdict = mu_lower >= BigRational::new(BigInt::from(1), BigInt::from(fact));
    let brackets_agree = mu_lower == nu_upper;
    Ok(PowerGrowth { delta, c, mu_lower, nu_upper, verdict, brackets_agree })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnumberRow {
    pub level: usize,
    pub a_number: Option<usize>,
    /// `(1 - 1/p) floor(p/2) sum_Q deg(Q) (ceil(p/2) d_Q / p - 1)`.
    pub bound: Option<String>,
    pub pass: Option<bool>,
    pub detail: String,
}

/// Lower bound for the a-number at level `n` in terms of the last lower
/// break `d_Q` at each branch point (a place of degree `k` counts `k` times).
pub fn anumber_bound(spec: &TowerSpec, n: usize) -> Result<Ratio<i64>, CohomologyError> {
    let reduced = normalize_asw(spec)?;
    let p = spec.p() as i64;
    let mut sum = Ratio::from(0);
    for q in &reduced.branch {
        let d = *breaks(&reduced, n, q)?.lower.last().unwrap_or(&0) as i64;
        let term = Ratio::new((p + 1) / 2 * d, p) - 1;
        sum += term * q.degree() as i64;
    }
    Ok((Ratio::from(1) - Ratio::new(1, p)) * (p / 2) * sum)
}

/// The strict inequality `a_n > bound` per level; level 0 and étale towers
/// are skipped.
pub fn anumber_bound_check(spec: &TowerSpec, levels: &[usize], gmax: u64) -> Result<Vec<AnumberRow>, CohomologyError> {
    let mut rows = Vec::new();
    for &n in levels {
        spec.check_level(n)?;
        if n == 0 || spec.branch.is_empty() {
            let why = if n == 0 { "level 0 has no ramification" } else { "no branch points" };
            rows.push(AnumberRow {
                level: n,
                a_number: None,
                bound: None,
                pass: None,
                detail: why.into(),
            });
            continue;
        }
        let bound = anumber_bound(spec, n)?;
        let model = CurveModel::from_tower(spec, n)?;
        let a = a_number(&model, gmax)?;
        let pass = Ratio::from(a as i64) > bound;
        rows.push(AnumberRow {
            level: n,
            a_number: Some(a),
            bound: Some(bound.to_string()),
            pass: Some(pass),
            detail: format!("a_{n} = {a}, bound {bound}"),
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::field_make;
    use crate::ratfunc::Place;
    use crate::tower::{parse_place, parse_ratfunc};

    fn s(v: &[(u64, i64)]) -> GrowthSeries {
        GrowthSeries::new(v.to_vec()).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn exact_fits() {
        let f = fit_mu_lambda_nu(&s(&[(0, 0), (1, 1), (2, 3), (3, 7)]), 2).unwrap();
        assert_eq!((f.mu.clone(), f.lambda.clone(), f.nu.clone()), (r(1, 1), r(0, 1), r(-1, 1)));
        assert_eq!(f.exact_from, Some(0));
        let f = fit_mu_lambda_nu(&s(&[(0, 5), (1, 5), (2, 5)]), 3).unwrap();
        assert_eq!((f.mu, f.lambda, f.nu), (r(0, 1), r(0, 1), r(5, 1)));
        // exact only from level 1
        let f = fit_mu_lambda_nu(&s(&[(0, 9), (1, 1), (2, 3), (3, 7), (4, 15)]), 2).unwrap();
        assert_eq!(f.exact_from, Some(1));
        assert_eq!(f.mu, r(1, 1));
        assert!(matches!(
            fit_mu_lambda_nu(&s(&[(0, 0), (1, 1)]), 2),
            Err(FitError::InsufficientData { needed: 3, got: 2 })
        ));
        assert_eq!(GrowthSeries::new(vec![(1, 0), (1, 2)]), Err(FitError::Unordered));
    }

    #[test]
    fn least_squares_fallback() {
        let f = fit_mu_lambda_nu(&s(&[(0, 0), (1, 0), (2, 1), (3, 0), (4, 3)]), 2).unwrap();
        assert_eq!(f.exact_from, None);
        let sum: BigRational = f.residuals.iter().cloned().sum();
        assert!(sum.is_zero());
    }

    #[test]
    fn power_growth() {
        let g = fit_power_growth(&s(&[(0, 2), (1, 6), (2, 18)]), 3, 1).unwrap();
        assert_eq!((g.mu_lower.clone(), g.nu_upper.clone()), (r(2, 1), r(2, 1)));
        assert!(g.verdict && g.brackets_agree);
        // 3^n - 1 needs C = -1
        let g = fit_power_growth(&s(&[(1, 2), (2, 8), (3, 26)]), 3, 1).unwrap();
        assert_eq!((g.c.clone(), g.mu_lower.clone()), (r(-1, 1), r(1, 1)));
        assert!(matches!(fit_power_growth(&s(&[]), 2, 1), Err(FitError::InsufficientData { .. })));
        assert_eq!(fit_power_growth(&s(&[(0, 1), (1, 2)]), 2, 0), Err(FitError::BadDelta));
    }

    fn tower(p: u32, witt: &[&str]) -> TowerSpec {
        let f = field_make(p, 1, None).unwrap();
        let b = vec![parse_place(&f, "inf").unwrap()];
        let w = witt.iter().map(|s| parse_ratfunc(&f, s).unwrap()).collect();
        TowerSpec::new("t".into(), f, b, w, witt.len(), vec![Place::Infinity]).unwrap()
    }

    #[test]
    fn anumber_bounds() {
        assert_eq!(anumber_bound(&tower(2, &["x^3"]), 1).unwrap(), Ratio::new(1, 4));
        assert_eq!(anumber_bound(&tower(3, &["x^2"]), 1).unwrap(), Ratio::new(2, 9));
        let rows = anumber_bound_check(&tower(2, &["x^3", "0"]), &[0, 1, 2], 40).unwrap();
        assert_eq!(rows[0].pass, None);
        assert!(rows[1..].iter().all(|r| r.pass == Some(true)), "{rows:?}");
        assert_eq!(rows[1].a_number, Some(1));
        let rows = anumber_bound_check(&tower(3, &["x^2"]), &[1], 40).unwrap();
        assert_eq!((rows[0].a_number, rows[0].pass), (Some(1), Some(true)));
    }
}
