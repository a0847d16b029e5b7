//! Per-level invariant table: degree, ramification breaks, genus, p-rank,
//! a-number and the etale / multiplicative / local-local dimensions of the
//! mod-p Dieudonne module.

use serde::Serialize;

use crate::curve::CurveModel;
use crate::derham::{a_number, decompose_parts, full_dieudonne_mod_p};
use crate::error::{CohomologyError, Error};
use crate::tower::{breaks, genus_rh, normalize_asw, prank_ds, TowerSpec};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BreakRow {
    pub place: String,
    pub upper: Vec<u64>,
    pub lower: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LevelInvariants {
    pub level: usize,
    pub degree: u64,
    pub breaks: Vec<BreakRow>,
    pub genus: u64,
    pub p_rank: u64,
    /// `None` when the genus exceeds the differential cap.
    pub a_number: Option<usize>,
    /// `(etale, multiplicative, local-local)`; `None` beyond the cap.
    pub dims: Option<(usize, usize, usize)>,
}

fn capped<T>(r: Result<T, CohomologyError>) -> Result<Option<T>, Error> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(e) => {
            let e = Error::from(e);
            if e.is_cap() {
                Ok(None)
            } else {
                Err(e)
            }
        }
    }
}

pub fn level_invariants(spec: &TowerSpec, n: usize, gmax: u64) -> Result<LevelInvariants, Error> {
    spec.check_level(n)?;
    let reduced = normalize_asw(spec)?;
    let f = &spec.field;
    let mut rows = Vec::with_capacity(reduced.branch.len());
    for q in &reduced.branch {
        let b = breaks(&reduced, n, q)?;
        rows.push(BreakRow { place: q.label(f), upper: b.upper, lower: b.lower });
    }
    let genus = genus_rh(&reduced, n)?;
    let p_rank = prank_ds(&reduced, n)?;
    let (a, dims) = if genus > gmax {
        (None, None)
    } else {
        let model = CurveModel::from_tower(spec, n)?;
        let a = capped(a_number(&model, gmax))?;
        let dims = capped(full_dieudonne_mod_p(&model, gmax))?.map(|d| decompose_parts(&d).dims());
        (a, dims)
    };
    Ok(LevelInvariants {
        level: n,
        degree: (spec.p() as u64).pow(n as u32),
        breaks: rows,
        genus,
        p_rank,
        a_number: a,
        dims,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn supersingular_rows() {
        let spec = TowerSpec::from_toml_str("p = 2\nbranch = [\"inf\"]\nwitt = [\"x^3\", \"0\"]\n").unwrap();
        let r0 = level_invariants(&spec, 0, 40).unwrap();
        assert_eq!((r0.genus, r0.degree), (0, 1));
        let r1 = level_invariants(&spec, 1, 40).unwrap();
        assert_eq!((r1.genus, r1.p_rank, r1.a_number, r1.dims), (1, 0, Some(1), Some((0, 0, 2))));
        assert_eq!(r1.breaks, vec![BreakRow { place: "inf".into(), upper: vec![3], lower: vec![3] }]);
        let capped = level_invariants(&spec, 2, 0).unwrap();
        assert_eq!((capped.a_number, capped.dims), (None, None));
        assert!(level_invariants(&spec, 3, 40).unwrap_err().is_cap());
    }
}
