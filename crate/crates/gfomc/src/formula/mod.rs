//! Monotone CNF formulas over ground-tuple variables.

mod count;
mod poly;

pub use count::{model_count, model_count_enum, pr_with, weighted_count, weighted_count_enum};
pub use poly::{arithmetize, arithmetize_partial, find_nonroot, poly_eval, small_matrix_det, MultilinearPoly, Poly};

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;

use crate::exactla::Rational;
use crate::Error;

/// A Boolean variable naming one ground tuple, such as `S1(u,t1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(Arc<str>);

impl VarId {
    pub fn new(name: impl AsRef<str>) -> Self {
        VarId(Arc::from(name.as_ref()))
    }

    pub fn unary(symbol: &str, c: &str) -> Self {
        VarId::new(format!("{symbol}({c})"))
    }

    pub fn binary(symbol: &str, a: &str, b: &str) -> Self {
        VarId::new(format!("{symbol}({a},{b})"))
    }

    pub fn name(&self) -> &str {
        &self.0
    }

    /// Splits `S(a,b)` into `("S", ["a","b"])`. Names without parentheses
    /// have no arguments.
    pub fn parts(&self) -> (&str, Vec<&str>) {
        match self.0.split_once('(') {
            Some((sym, rest)) => {
                let args = rest.trim_end_matches(')');
                (sym, args.split(',').collect())
            }
            None => (&self.0, Vec::new()),
        }
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

pub type Clause = BTreeSet<VarId>;
pub type ProbMap = BTreeMap<VarId, Rational>;
pub type Assignment = BTreeMap<VarId, bool>;

/// Monotone CNF in canonical form.
///
/// Clauses are deduplicated and subsumption-reduced, so two formulas are
/// logically equivalent exactly when they are equal. The constant true has
/// no clauses and the constant false is the single empty clause.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct CnfFormula {
    clauses: BTreeSet<Clause>,
}

impl CnfFormula {
    pub fn new<I, C>(clauses: I) -> Self
    where
        I: IntoIterator<Item = C>,
        C: IntoIterator<Item = VarId>,
    {
        let mut cs: Vec<Clause> = clauses.into_iter().map(|c| c.into_iter().collect()).collect();
        cs.sort_by_key(|c| c.len());
        let mut kept: Vec<Clause> = Vec::with_capacity(cs.len());
        for c in cs {
            if c.is_empty() {
                return CnfFormula::constant(false);
            }
            if !kept.iter().any(|k| k.is_subset(&c)) {
                kept.push(c);
            }
        }
        CnfFormula { clauses: kept.into_iter().collect() }
    }

    /// Shorthand for tests and examples: `&[&["R","S"], &["S","T"]]`.
    pub fn from_names(clauses: &[&[&str]]) -> Self {
        CnfFormula::new(clauses.iter().map(|c| c.iter().map(VarId::new).collect::<Vec<_>>()))
    }

    pub fn constant(value: bool) -> Self {
        let mut clauses = BTreeSet::new();
        if !value {
            clauses.insert(Clause::new());
        }
        CnfFormula { clauses }
    }

    pub fn var(v: VarId) -> Self {
        CnfFormula::new([[v]])
    }

    pub fn is_true(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.clauses.len() == 1 && self.clauses.iter().next().is_some_and(|c| c.is_empty())
    }

    pub fn is_constant(&self) -> bool {
        self.is_true() || self.is_false()
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter()
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.clauses.iter().flatten().cloned().collect()
    }

    pub fn and(&self, other: &CnfFormula) -> CnfFormula {
        CnfFormula::new(self.clauses.iter().chain(other.clauses.iter()).cloned())
    }

    pub fn and_all<'a>(items: impl IntoIterator<Item = &'a CnfFormula>) -> CnfFormula {
        CnfFormula::new(items.into_iter().flat_map(|f| f.clauses.iter().cloned()))
    }

    /// Disjunction, distributed back into CNF.
    pub fn or(&self, other: &CnfFormula) -> CnfFormula {
        if self.is_true() || other.is_true() {
            return CnfFormula::constant(true);
        }
        let mut out = Vec::new();
        for a in &self.clauses {
            for b in &other.clauses {
                out.push(a.union(b).cloned().collect::<Clause>());
            }
        }
        CnfFormula::new(out)
    }

    /// Applies a partial 0/1 assignment.
    pub fn substitute(&self, bindings: &Assignment) -> CnfFormula {
        if bindings.is_empty() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.clauses.len());
        for c in &self.clauses {
            if c.iter().any(|v| bindings.get(v) == Some(&true)) {
                continue;
            }
            out.push(c.iter().filter(|v| !bindings.contains_key(*v)).cloned().collect::<Clause>());
        }
        CnfFormula::new(out)
    }

    pub fn substitute_one(&self, v: &VarId, value: bool) -> CnfFormula {
        self.substitute(&BTreeMap::from([(v.clone(), value)]))
    }

    /// Renames variables; the map must be injective on `vars(self)`.
    pub fn rename(&self, f: impl Fn(&VarId) -> VarId) -> CnfFormula {
        CnfFormula::new(self.clauses.iter().map(|c| c.iter().map(&f).collect::<Vec<_>>()))
    }

    /// Truth value under a total assignment (missing variables read as false).
    pub fn eval(&self, world: &BTreeSet<VarId>) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|v| world.contains(v)))
    }

    /// `self ⇒ other`. For monotone CNF this holds iff every clause of
    /// `other` contains some clause of `self`.
    pub fn implies(&self, other: &CnfFormula) -> bool {
        if self.is_false() {
            return true;
        }
        other.clauses.iter().all(|c| self.clauses.iter().any(|k| k.is_subset(c)))
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("true");
        }
        if self.is_false() {
            return f.write_str("false");
        }
        let parts: Vec<String> = self
            .clauses
            .iter()
            .map(|c| {
                let lits: Vec<&str> = c.iter().map(|v| v.name()).collect();
                if lits.len() == 1 {
                    lits[0].to_string()
                } else {
                    format!("({})", lits.join(" | "))
                }
            })
            .collect();
        f.write_str(&parts.join(" & "))
    }
}

impl fmt::Debug for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Splits a formula into maximal sub-formulas with pairwise disjoint
/// variables. Constant formulas have no components.
pub fn connectivity(f: &CnfFormula) -> Vec<CnfFormula> {
    if f.is_constant() {
        return Vec::new();
    }
    let vars: Vec<VarId> = f.vars().into_iter().collect();
    let index: BTreeMap<&VarId, usize> = vars.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let mut parent: Vec<usize> = (0..vars.len()).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for c in f.clauses() {
        let mut it = c.iter().map(|v| index[v]);
        if let Some(first) = it.next() {
            for other in it {
                let (a, b) = (find(&mut parent, first), find(&mut parent, other));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<Clause>> = BTreeMap::new();
    for c in f.clauses() {
        let root = find(&mut parent, index[c.iter().next().expect("nonempty clause")]);
        groups.entry(root).or_default().push(c.clone());
    }
    let mut comps: Vec<CnfFormula> = groups.into_values().map(CnfFormula::new).collect();
    comps.sort();
    comps
}

/// True when no component of `f` mentions variables of both `u` and `v`.
/// Constant formulas separate everything.
pub fn separates(f: &CnfFormula, u: &BTreeSet<VarId>, v: &BTreeSet<VarId>) -> bool {
    connectivity(f).iter().all(|comp| {
        let vars = comp.vars();
        !(vars.iter().any(|x| u.contains(x)) && vars.iter().any(|x| v.contains(x)))
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Disconnection {
    pub disconnects: bool,
    pub migrating: BTreeSet<VarId>,
}

fn x_disconnects(f: &CnfFormula, x: &VarId, u: &BTreeSet<VarId>, v: &BTreeSet<VarId>) -> bool {
    [false, true].iter().all(|&b| separates(&f.substitute_one(x, b), u, v))
}

/// Whether `x` disconnects `u` from `v` in `f`, and which other variables
/// migrate: `y` migrates when `x` disconnects neither `(u∪{y}, v)` nor
/// `(u, v∪{y})`.
pub fn var_disconnects(
    f: &CnfFormula,
    x: &VarId,
    u: &BTreeSet<VarId>,
    v: &BTreeSet<VarId>,
) -> Result<Disconnection, Error> {
    if u.contains(x) || v.contains(x) {
        return Err(Error::Domain(format!("{x} belongs to one of the separated sets")));
    }
    let disconnects = x_disconnects(f, x, u, v);
    let mut migrating = BTreeSet::new();
    for y in f.vars() {
        if &y == x || u.contains(&y) || v.contains(&y) {
            continue;
        }
        let mut uy = u.clone();
        uy.insert(y.clone());
        let mut vy = v.clone();
        vy.insert(y.clone());
        if !x_disconnects(f, x, &uy, v) && !x_disconnects(f, x, u, &vy) {
            migrating.insert(y);
        }
    }
    Ok(Disconnection { disconnects, migrating })
}

fn assignments(vars: &[VarId]) -> impl Iterator<Item = Assignment> + '_ {
    (0u64..1 << vars.len()).map(move |bits| {
        vars.iter().enumerate().map(|(i, v)| (v.clone(), bits >> i & 1 == 1)).collect()
    })
}

/// Exact test of `U ⊥ V | X` in the distribution of worlds conditioned on
/// `F`.
pub fn cond_independent(
    f: &CnfFormula,
    u: &BTreeSet<VarId>,
    v: &BTreeSet<VarId>,
    x: &VarId,
    p: &ProbMap,
) -> Result<bool, Error> {
    independent_given(f, u, v, &BTreeSet::from([x.clone()]), p)
}

fn merge(a: &Assignment, b: &Assignment) -> Option<Assignment> {
    let mut out = a.clone();
    for (k, val) in b {
        if out.insert(k.clone(), *val).is_some_and(|old| old != *val) {
            return None;
        }
    }
    Some(out)
}

/// Exact test of `U ⊥ V | Z` in the distribution of worlds conditioned on
/// `F`; an empty `Z` tests plain independence.
pub fn independent_given(
    f: &CnfFormula,
    u: &BTreeSet<VarId>,
    v: &BTreeSet<VarId>,
    z: &BTreeSet<VarId>,
    p: &ProbMap,
) -> Result<bool, Error> {
    if weighted_count(f, p)?.is_zero() {
        return Err(Error::Domain("conditioning on null event".into()));
    }
    if u.is_empty() || v.is_empty() {
        return Ok(true);
    }
    let uv: Vec<VarId> = u.iter().cloned().collect();
    let vv: Vec<VarId> = v.iter().cloned().collect();
    let zv: Vec<VarId> = z.iter().cloned().collect();
    for bz in assignments(&zv) {
        let fz = pr_with(f, &bz, p)?;
        if fz.is_zero() {
            continue;
        }
        for a in assignments(&uv) {
            let Some(az) = merge(&a, &bz) else { continue };
            let faz = pr_with(f, &az, p)?;
            for b in assignments(&vv) {
                let Some(bzz) = merge(&b, &bz) else { continue };
                let fbz = pr_with(f, &bzz, p)?;
                let fabz = match merge(&az, &b) {
                    Some(abz) => pr_with(f, &abz, p)?,
                    None => Rational::zero(),
                };
                if fabz * &fz != &faz * &fbz {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Every variable at the same probability.
pub fn uniform_probs<'a>(vars: impl IntoIterator<Item = &'a VarId>, p: &Rational) -> ProbMap {
    vars.into_iter().map(|v| (v.clone(), p.clone())).collect()
}

/// Upper bound on variables for exponential-time routines. The
/// `GFOMC_MAX_VARS` environment variable overrides the default.
pub fn var_cap(default: usize) -> usize {
    std::env::var("GFOMC_MAX_VARS").ok().and_then(|s| s.trim().parse().ok()).unwrap_or(default)
}


#[cfg(test)]
mod tests {
    use super::*;

    fn vs(names: &[&str]) -> BTreeSet<VarId> {
        names.iter().map(VarId::new).collect()
    }

    fn q_star() -> CnfFormula {
        CnfFormula::from_names(&[&["R", "S"], &["S", "T"]])
    }

    #[test]
    fn substitution_cases() {
        let f = q_star();
        let s = VarId::new("S");
        assert!(f.substitute_one(&s, true).is_true());
        assert_eq!(f.substitute_one(&s, false), CnfFormula::from_names(&[&["R"], &["T"]]));
        let both = BTreeMap::from([(VarId::new("R"), false), (s, false)]);
        assert!(f.substitute(&both).is_false());
    }

    #[test]
    fn canonical_form_absorbs() {
        let f = CnfFormula::from_names(&[&["A", "B"], &["A"], &["A"]]);
        assert_eq!(f, CnfFormula::from_names(&[&["A"]]));
        assert_eq!(f.num_clauses(), 1);
    }

    #[test]
    fn components() {
        assert_eq!(connectivity(&CnfFormula::from_names(&[&["A", "B"], &["C", "D"]])).len(), 2);
        assert_eq!(connectivity(&q_star()).len(), 1);
        assert!(connectivity(&CnfFormula::constant(true)).is_empty());
    }

    #[test]
    fn disconnects_examples() {
        let d = var_disconnects(&q_star(), &VarId::new("S"), &vs(&["R"]), &vs(&["T"])).unwrap();
        assert!(d.disconnects);
        assert!(d.migrating.is_empty());
        let f = CnfFormula::from_names(&[&["U", "V"], &["X", "W"]]);
        assert!(!var_disconnects(&f, &VarId::new("X"), &vs(&["U"]), &vs(&["V"])).unwrap().disconnects);
    }

    #[test]
    fn migration_worked_example() {
        let f = CnfFormula::from_names(&[
            &["U", "Z0"],
            &["Z0", "Z1", "Z2", "Z3"],
            &["Z3", "X", "Y"],
            &["X", "Y", "Z4"],
            &["X", "Z1"],
            &["Y", "Z2"],
            &["Z4", "V"],
        ]);
        let d = var_disconnects(&f, &VarId::new("X"), &vs(&["U"]), &vs(&["V"])).unwrap();
        assert!(d.disconnects);
        assert!(d.migrating.is_superset(&vs(&["Y", "Z2", "Z3"])));
    }

    #[test]
    fn independence_examples() {
        let half = crate::exactla::half();
        let f = q_star();
        let p = uniform_probs(&f.vars(), &half);
        assert!(cond_independent(&f, &vs(&["R"]), &vs(&["T"]), &VarId::new("S"), &p).unwrap());
        let g = CnfFormula::from_names(&[&["R", "T"]]);
        let mut p = uniform_probs(&g.vars(), &half);
        p.insert(VarId::new("X"), half.clone());
        assert!(!cond_independent(&g, &vs(&["R"]), &vs(&["T"]), &VarId::new("X"), &p).unwrap());
        assert!(cond_independent(&g, &BTreeSet::new(), &vs(&["T"]), &VarId::new("X"), &p).unwrap());
    }

    #[test]
    fn implication_is_clause_containment() {
        let f = CnfFormula::from_names(&[&["A"], &["B", "C"]]);
        assert!(f.implies(&CnfFormula::from_names(&[&["A", "D"]])));
        assert!(!f.implies(&CnfFormula::from_names(&[&["B"]])));
        assert!(CnfFormula::constant(false).implies(&f));
        assert!(f.implies(&CnfFormula::constant(true)));
    }
}
