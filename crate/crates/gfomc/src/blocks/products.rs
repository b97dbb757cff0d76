use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::exactla::{pow_i, Rational};
use crate::formula::{Poly, VarId};
use crate::Error;

const MAX_EXPONENT_SUM: usize = 40;

type Point = BTreeMap<VarId, Rational>;

fn power_product(a: &Point, s: usize, b: &Point, t: usize) -> Point {
    a.iter().map(|(v, x)| (v.clone(), pow_i(x, s as i64) * pow_i(&b[v], t as i64))).collect()
}

/// Exponents `k₁..k_m ≥ 1` with every `fᵢ` nonzero at `v = ∏ vᵢ^{kᵢ}`
/// (componentwise). Points are folded in one at a time: the running point
/// `v` becomes `v^s · v_{j+1}^t` for the first `(s, t)` in order of
/// increasing `s + t` that keeps `f₁..f_{j+1}` nonzero.
pub fn products_exponent_search(polys: &[Poly], points: &[Point]) -> Result<(Vec<usize>, Point), Error> {
    if polys.is_empty() || polys.len() != points.len() {
        return Err(Error::Dimension("need one point per polynomial".into()));
    }
    let keys: Vec<&VarId> = points[0].keys().collect();
    for (f, pt) in polys.iter().zip(points) {
        if pt.keys().collect::<Vec<_>>() != keys {
            return Err(Error::Dimension("points must share their coordinates".into()));
        }
        if pt.values().any(|x| !x.is_positive()) {
            return Err(Error::Domain("coordinates must be positive".into()));
        }
        if f.vars().iter().any(|v| !pt.contains_key(v)) {
            return Err(Error::Domain("polynomial mentions a variable without a coordinate".into()));
        }
        if f.eval_full(pt)?.is_zero() {
            return Err(Error::Domain("polynomial vanishes at its own point".into()));
        }
    }
    let nonzero = |pt: &Point, upto: usize| -> Result<bool, Error> {
        for f in &polys[..upto] {
            if f.eval_full(pt)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    };
    let mut ks = vec![1usize];
    let mut v = points[0].clone();
    for j in 1..polys.len() {
        let mut next = None;
        'scan: for sum in 2..=MAX_EXPONENT_SUM {
            for s in 1..sum {
                let t = sum - s;
                let w = power_product(&v, s, &points[j], t);
                if nonzero(&w, j + 1)? {
                    next = Some((s, t, w));
                    break 'scan;
                }
            }
        }
        let (s, t, w) = next.ok_or_else(|| Error::SearchFailed(format!("no exponents with s + t <= {MAX_EXPONENT_SUM}")))?;
        for k in ks.iter_mut() {
            *k *= s;
        }
        ks.push(t);
        v = w;
    }
    debug_assert!(ks.iter().all(|k| *k >= 1));
    Ok((ks, v))
}
