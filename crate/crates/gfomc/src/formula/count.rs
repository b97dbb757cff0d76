use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{Assignment, CnfFormula, ProbMap, VarId};
use crate::exactla::{to_integer, Rational};
use crate::Error;

/// Formulas with at most this many variables are counted by enumeration.
pub const ENUM_LIMIT: usize = 10;

type IClause = Vec<u32>;

struct Counter<'a> {
    probs: &'a [Rational],
    memo: HashMap<Vec<IClause>, Rational>,
}

fn normalize(mut clauses: Vec<IClause>) -> Option<Vec<IClause>> {
    for c in clauses.iter_mut() {
        c.sort_unstable();
        c.dedup();
        if c.is_empty() {
            return None;
        }
    }
    clauses.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    clauses.dedup();
    let mut kept: Vec<IClause> = Vec::with_capacity(clauses.len());
    for c in clauses {
        if !kept.iter().any(|k| is_subset(k, &c)) {
            kept.push(c);
        }
    }
    kept.sort();
    Some(kept)
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for x in a {
        while j < b.len() && b[j] < *x {
            j += 1;
        }
        if j == b.len() || b[j] != *x {
            return false;
        }
        j += 1;
    }
    true
}

fn assign(clauses: &[IClause], var: u32, value: bool) -> Option<Vec<IClause>> {
    let mut out = Vec::with_capacity(clauses.len());
    for c in clauses {
        if c.contains(&var) {
            if value {
                continue;
            }
            let rest: IClause = c.iter().copied().filter(|&x| x != var).collect();
            if rest.is_empty() {
                return None;
            }
            out.push(rest);
        } else {
            out.push(c.clone());
        }
    }
    normalize(out)
}

fn components(clauses: &[IClause]) -> Vec<Vec<IClause>> {
    let mut parent: HashMap<u32, u32> = HashMap::new();
    fn find(p: &mut HashMap<u32, u32>, x: u32) -> u32 {
        let mut r = x;
        while let Some(&q) = p.get(&r) {
            if q == r {
                break;
            }
            r = q;
        }
        let mut y = x;
        while y != r {
            let next = p[&y];
            p.insert(y, r);
            y = next;
        }
        r
    }
    for c in clauses {
        for &v in c {
            parent.entry(v).or_insert(v);
        }
        for w in c.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            if a != b {
                parent.insert(a, b);
            }
        }
    }
    let mut groups: HashMap<u32, Vec<IClause>> = HashMap::new();
    for c in clauses {
        let r = find(&mut parent, c[0]);
        groups.entry(r).or_default().push(c.clone());
    }
    let mut out: Vec<Vec<IClause>> = groups.into_values().collect();
    out.sort();
    out
}

impl Counter<'_> {
    fn count(&mut self, clauses: Vec<IClause>) -> Rational {
        if clauses.is_empty() {
            return Rational::one();
        }
        if let Some(v) = self.memo.get(&clauses) {
            return v.clone();
        }
        let result = self.count_uncached(&clauses);
        self.memo.insert(clauses, result.clone());
        result
    }

    fn count_uncached(&mut self, clauses: &[IClause]) -> Rational {
        if let Some(unit) = clauses.iter().find(|c| c.len() == 1) {
            let v = unit[0];
            let p = self.probs[v as usize].clone();
            if p.is_zero() {
                return Rational::zero();
            }
            return match assign(clauses, v, true) {
                Some(rest) => p * self.count(rest),
                None => Rational::zero(),
            };
        }
        let comps = components(clauses);
        if comps.len() > 1 {
            let mut acc = Rational::one();
            for comp in comps {
                acc *= self.count(comp);
                if acc.is_zero() {
                    break;
                }
            }
            return acc;
        }
        let mut freq: HashMap<u32, usize> = HashMap::new();
        for c in clauses {
            for &v in c {
                *freq.entry(v).or_default() += 1;
            }
        }
        let var = freq.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))).map(|(&v, _)| v).unwrap_or(0);
        let p = self.probs[var as usize].clone();
        let mut total = Rational::zero();
        if !p.is_zero() {
            if let Some(rest) = assign(clauses, var, true) {
                total += &p * self.count(rest);
            }
        }
        let q = Rational::one() - &p;
        if !q.is_zero() {
            if let Some(rest) = assign(clauses, var, false) {
                total += q * self.count(rest);
            }
        }
        total
    }
}

fn missing(f: &CnfFormula, p: &ProbMap) -> Result<(), Error> {
    match f.vars().into_iter().find(|v| !p.contains_key(v)) {
        Some(v) => Err(Error::Domain(format!("no probability for {v}"))),
        None => Ok(()),
    }
}

/// Probability that a random world satisfies `f`, each variable true
/// independently with its probability in `p`.
pub fn weighted_count(f: &CnfFormula, p: &ProbMap) -> Result<Rational, Error> {
    missing(f, p)?;
    if f.is_true() {
        return Ok(Rational::one());
    }
    if f.is_false() {
        return Ok(Rational::zero());
    }
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    if vars.len() <= ENUM_LIMIT {
        return weighted_count_enum(f, p);
    }
    let index: HashMap<&VarId, u32> = vars.iter().enumerate().map(|(i, v)| (v, i as u32)).collect();
    let probs: Vec<Rational> = vars.iter().map(|v| p[v].clone()).collect();
    let clauses: Vec<IClause> = f.clauses().map(|c| c.iter().map(|v| index[v]).collect()).collect();
    let Some(clauses) = normalize(clauses) else {
        return Ok(Rational::zero());
    };
    let mut counter = Counter { probs: &probs, memo: HashMap::new() };
    Ok(counter.count(clauses))
}

/// Reference implementation: sums the weight of every satisfying world.
pub fn weighted_count_enum(f: &CnfFormula, p: &ProbMap) -> Result<Rational, Error> {
    missing(f, p)?;
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    if vars.len() > 24 {
        return Err(Error::VarCap { vars: vars.len(), cap: 24 });
    }
    let one = Rational::one();
    let mut total = Rational::zero();
    for bits in 0u64..1 << vars.len() {
        let world: BTreeSet<VarId> =
            vars.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        if f.eval(&world) {
            let mut w = one.clone();
            for (i, v) in vars.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    w *= &p[v];
                } else {
                    w *= &one - &p[v];
                }
            }
            total += w;
        }
    }
    Ok(total)
}

/// `Pr(F ∧ θ)` for a partial assignment `θ`.
pub fn pr_with(f: &CnfFormula, theta: &Assignment, p: &ProbMap) -> Result<Rational, Error> {
    let mut w = weighted_count(&f.substitute(theta), p)?;
    for (v, &val) in theta {
        let pv = p.get(v).ok_or_else(|| Error::Domain(format!("no probability for {v}")))?;
        if val {
            w *= pv;
        } else {
            w *= Rational::one() - pv;
        }
    }
    Ok(w)
}

/// Number of satisfying assignments over `universe ∪ vars(f)`.
pub fn model_count(f: &CnfFormula, universe: &BTreeSet<VarId>) -> Result<BigInt, Error> {
    let mut all = universe.clone();
    all.extend(f.vars());
    let half = Rational::new(1.into(), 2.into());
    let p: ProbMap = all.iter().map(|v| (v.clone(), half.clone())).collect();
    let w = weighted_count(f, &p)? * Rational::from_integer(BigInt::one() << all.len());
    to_integer(&w).ok_or_else(|| Error::Internal("non-integral model count".into()))
}

/// Model count by exhaustive enumeration.
pub fn model_count_enum(f: &CnfFormula, universe: &BTreeSet<VarId>) -> Result<BigInt, Error> {
    let mut all: Vec<VarId> = universe.iter().cloned().collect();
    for v in f.vars() {
        if !universe.contains(&v) {
            all.push(v);
        }
    }
    if all.len() > 24 {
        return Err(Error::VarCap { vars: all.len(), cap: 24 });
    }
    let mut n = BigInt::zero();
    for bits in 0u64..1 << all.len() {
        let world: BTreeSet<VarId> =
            all.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, v)| v.clone()).collect();
        if f.eval(&world) {
            n += 1;
        }
    }
    Ok(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{half, rat};
    use crate::formula::uniform_probs;

    #[test]
    fn running_example() {
        let f = CnfFormula::from_names(&[&["R", "S"], &["S", "T"]]);
        let p = uniform_probs(&f.vars(), &half());
        assert_eq!(weighted_count(&f, &p).unwrap(), rat(5, 8));
        assert_eq!(model_count(&f, &BTreeSet::new()).unwrap(), BigInt::from(5));
        assert_eq!(weighted_count(&CnfFormula::constant(true), &ProbMap::new()).unwrap(), rat(1, 1));
    }

    #[test]
    fn dpll_agrees_with_enumeration_on_chain() {
        let names: Vec<String> = (0..14).map(|i| format!("X{i}")).collect();
        let clauses: Vec<Vec<VarId>> =
            names.windows(3).map(|w| w.iter().map(VarId::new).collect()).collect();
        let f = CnfFormula::new(clauses);
        let p: ProbMap = f.vars().into_iter().enumerate().map(|(i, v)| (v, rat(i as i64 + 1, 17))).collect();
        assert_eq!(weighted_count(&f, &p).unwrap(), weighted_count_enum(&f, &p).unwrap());
    }
}
