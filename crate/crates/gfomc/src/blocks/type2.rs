use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactla::{half, RatMatrix, Rational};
use crate::formula::{arithmetize_partial, connectivity, find_nonroot, weighted_count, CnfFormula, Poly, VarId};
use crate::lineage::restricted_lineage_t2;
use crate::query::{classify, ClauseKind, Query, TypeTwo};
use crate::tid::{build_type2_block, BlockSpec, Tid};
use crate::Error;

/// A forbidden type-II query with its lattices and the symbols used by
/// the block searches.
#[derive(Clone, Debug)]
pub struct Type2Setup {
    pub tt: TypeTwo,
    pub symbols: Vec<String>,
    /// Left-ubiquitous symbol `U`.
    pub u_symbol: String,
    /// Right-ubiquitous symbol `V`.
    pub v_symbol: String,
    /// Largest number of subclauses in a type-II clause.
    pub branching: usize,
}

impl Type2Setup {
    pub fn new(q: &Query) -> Result<Type2Setup, Error> {
        let report = classify(q);
        if !report.forbidden {
            return Err(Error::Inapplicable("query is not forbidden".into()));
        }
        let tt = TypeTwo::new(&report.query)?;
        let u_symbol = report.ubiquitous_left.iter().next().cloned();
        let v_symbol = report.ubiquitous_right.iter().next().cloned();
        let (Some(u_symbol), Some(v_symbol)) = (u_symbol, v_symbol) else {
            return Err(Error::Inapplicable("no ubiquitous symbol on one side".into()));
        };
        let branching = tt
            .query
            .clauses
            .iter()
            .filter(|c| matches!(c.kind, ClauseKind::LeftII | ClauseKind::RightII))
            .map(|c| c.subs.len())
            .max()
            .unwrap_or(2);
        let symbols = tt.query.binary_symbols().into_iter().collect();
        Ok(Type2Setup { tt, symbols, u_symbol, v_symbol, branching })
    }

    pub fn dead_ends(&self) -> usize {
        self.branching.saturating_sub(2)
    }

    fn lattice_pairs(&self) -> Vec<(usize, usize)> {
        let nl = self.tt.left.elements.len();
        let nr = self.tt.right.elements.len();
        (0..nl).flat_map(|a| (0..nr).map(move |b| (a, b))).collect()
    }

    /// Zig-zag block of length `p` without prefix or suffix, endpoints
    /// `a` (left) and `b` (right), every tuple at `½`.
    pub fn zigzag_block(&self, p: usize) -> Result<Tid, Error> {
        let spec = BlockSpec::type2("a", "b", p, half(), self.dead_ends(), 0).with_tag(format!("z{p}"));
        build_type2_block(&self.symbols, &spec)
    }
}

/// A dead-end class: every tuple of symbol `symbol` in the `j`-th dead
/// end hanging off a left (`left = true`) or right zig-zag node.
pub type DeadEndClass = (String, bool, usize);

fn dead_end_class(v: &VarId) -> Option<DeadEndClass> {
    let (sym, args) = v.parts();
    if args.len() != 2 {
        return None;
    }
    let j_of = |s: &str, prefix: char| -> Option<usize> {
        let rest = s.strip_prefix(prefix)?;
        let (j, _) = rest.split_once('-')?;
        j.parse().ok()
    };
    if let Some(j) = j_of(args[1], 'e') {
        return Some((sym.to_string(), true, j));
    }
    j_of(args[0], 'f').map(|j| (sym.to_string(), false, j))
}

/// Class-uniform values for dead-end tuples; unlisted classes stay at `½`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Theta0 {
    pub classes: BTreeMap<DeadEndClass, bool>,
}

impl Theta0 {
    pub fn apply(&self, block: &Tid) -> Result<Tid, Error> {
        let mut out = block.clone();
        for v in block.probs.keys() {
            if let Some(val) = dead_end_class(v).and_then(|k| self.classes.get(&k)) {
                out.set(v.clone(), if *val { Rational::one() } else { Rational::zero() })?;
            }
        }
        Ok(out)
    }
}

fn connected(f: &CnfFormula, x: &VarId, y: &VarId) -> bool {
    connectivity(f).iter().any(|comp| {
        let vars = comp.vars();
        vars.contains(x) && vars.contains(y)
    })
}

fn survives(setup: &Type2Setup, block: &Tid, p: usize, theta: &Theta0) -> Result<bool, Error> {
    let tagged = theta.apply(block)?;
    let tag = format!("z{p}");
    let r0 = "a".to_string();
    let tp = "b".to_string();
    let rp = if p == 0 { r0.clone() } else { format!("r{p}@{tag}") };
    let t0 = if p == 0 { tp.clone() } else { format!("t0@{tag}") };
    let x = VarId::binary(&setup.u_symbol, &r0, &t0);
    let y = VarId::binary(&setup.v_symbol, &rp, &tp);
    for (a, b) in setup.lattice_pairs() {
        let f = restricted_lineage_t2(&setup.tt, &tagged, "a", "b", a, b)?;
        if !connected(&f, &x, &y) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Greedy class-uniform assignment of dead-end tuples: classes in sorted
/// order, value 1 tried before 0, kept when `U(r₀,t₀)` and `V(r_p,t_p)`
/// stay connected in every `Y_αβ` on the length-`p` zig-zag block.
pub fn theta0_search(setup: &Type2Setup, p: usize) -> Result<Theta0, Error> {
    let block = setup.zigzag_block(p)?;
    let classes: BTreeSet<DeadEndClass> = block.probs.keys().filter_map(dead_end_class).collect();
    let mut theta = Theta0::default();
    if !survives(setup, &block, p, &theta)? {
        return Err(Error::SearchFailed("endpoints are disconnected before any assignment".into()));
    }
    for class in classes {
        for val in [true, false] {
            theta.classes.insert(class.clone(), val);
            if survives(setup, &block, p, &theta)? {
                break;
            }
            theta.classes.remove(&class);
        }
    }
    Ok(theta)
}

/// `u·D(s₀)·Z₁·D(s₁)·Z₂ ⋯ D(s_{k−1})·Z_k·v` with `D(s) = diag(1−s, s)`;
/// with no matrices the chain is `u·D(s₀)·v`.
pub fn chain_eval(u: &[Rational], zs: &[RatMatrix], v: &[Rational], s: &[Rational]) -> Result<Rational, Error> {
    if u.len() != 2 || v.len() != 2 {
        return Err(Error::Dimension("chain endpoints must be 2-vectors".into()));
    }
    if s.len() != zs.len().max(1) {
        return Err(Error::Dimension(format!("expected {} diagonal parameters, got {}", zs.len().max(1), s.len())));
    }
    if zs.iter().any(|z| z.rows() != 2 || z.cols() != 2) {
        return Err(Error::Dimension("chain matrices must be 2x2".into()));
    }
    let mut row: Vec<Rational> = u.to_vec();
    for (i, si) in s.iter().enumerate() {
        row[0] *= Rational::one() - si;
        row[1] *= si;
        if let Some(z) = zs.get(i) {
            row = z.transpose().mul_vec(&row)?;
        }
    }
    Ok(&row[0] * &v[0] + &row[1] * &v[1])
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetDResult {
    pub p: usize,
    /// Values of the role-named free variables.
    pub assignment: BTreeMap<VarId, Rational>,
    /// `y_{α₁β₁}` and `y_{α₂β₂}` at `p, p+1, p+2, p+3`.
    pub sequences: [Vec<Rational>; 2],
    pub det: Rational,
    /// Cross determinants at `(p+1, p+2)` and `(p+2, p+3)`.
    pub later_dets: Vec<Rational>,
}

const DETD_POLY_CAP: usize = 18;
const DETD_ENUM_CAP: u64 = 3u64.pow(12);

/// Role name of a tuple in the first (`B(r₀,t₀)`) or last (`B(r_p,t_p)`)
/// elementary block of the length-`p` zig-zag block.
fn role_of(v: &VarId, p: usize) -> Option<VarId> {
    let (sym, args) = v.parts();
    if args.len() != 2 {
        return None;
    }
    let tag = format!("z{p}");
    let (first, last) = if p == 0 {
        (("a".to_string(), "b".to_string()), ("a".to_string(), "b".to_string()))
    } else {
        (("a".to_string(), format!("t0@{tag}")), (format!("r{p}@{tag}"), "b".to_string()))
    };
    if (args[0], args[1]) == (first.0.as_str(), first.1.as_str()) {
        Some(VarId::new(format!("{sym}@first")))
    } else if (args[0], args[1]) == (last.0.as_str(), last.1.as_str()) {
        Some(VarId::new(format!("{sym}@last")))
    } else {
        None
    }
}

struct Prepared {
    formulas: [CnfFormula; 2],
    numeric: BTreeMap<VarId, Rational>,
}

fn prepare(setup: &Type2Setup, theta: &Theta0, p: usize, pairs: [(usize, usize); 2]) -> Result<Prepared, Error> {
    let block = theta.apply(&setup.zigzag_block(p)?)?;
    let mut numeric = BTreeMap::new();
    let mut rename = BTreeMap::new();
    for (v, pr) in block.free_probs() {
        match role_of(&v, p) {
            Some(role) => {
                rename.insert(v, role);
            }
            None => {
                numeric.insert(v, pr);
            }
        }
    }
    let mk = |(a, b): (usize, usize)| -> Result<CnfFormula, Error> {
        Ok(restricted_lineage_t2(&setup.tt, &block, "a", "b", a, b)?.rename(|v| rename.get(v).cloned().unwrap_or_else(|| v.clone())))
    };
    Ok(Prepared { formulas: [mk(pairs[0])?, mk(pairs[1])?], numeric })
}

fn eval_at(prep: &Prepared, assignment: &BTreeMap<VarId, Rational>) -> Result<[Rational; 2], Error> {
    let mut probs = prep.numeric.clone();
    let mut bind = BTreeMap::new();
    for (v, x) in assignment {
        if x.is_zero() || x.is_one() {
            bind.insert(v.clone(), x.is_one());
        } else {
            probs.insert(v.clone(), x.clone());
        }
    }
    let y = |f: &CnfFormula| weighted_count(&f.substitute(&bind), &probs);
    Ok([y(&prep.formulas[0])?, y(&prep.formulas[1])?])
}

/// Values in `{0, ½, 1}` for the tuples of the first and last elementary
/// blocks, shared across lengths `p` and `p+1`, with
/// `y_{α₁β₁}(p)·y_{α₂β₂}(p+1) − y_{α₂β₂}(p)·y_{α₁β₁}(p+1) ≠ 0`. Other
/// tuples take their `θ₀` value or `½`.
pub fn detd_search(
    setup: &Type2Setup,
    theta: &Theta0,
    p: usize,
    first: (usize, usize),
    second: (usize, usize),
) -> Result<DetDResult, Error> {
    if first == second {
        return Err(Error::Domain("the two lattice pairs must differ".into()));
    }
    let pairs = setup.lattice_pairs();
    if !pairs.contains(&first) || !pairs.contains(&second) {
        return Err(Error::Domain("lattice index out of range".into()));
    }
    if p == 0 {
        return Err(Error::Domain("the zig-zag length must be at least 1".into()));
    }
    let preps: Vec<Prepared> = (p..=p + 3).map(|q| prepare(setup, theta, q, [first, second])).collect::<Result<_, _>>()?;
    let mut roles: BTreeSet<VarId> = BTreeSet::new();
    for prep in &preps[..2] {
        for f in &prep.formulas {
            roles.extend(f.vars().into_iter().filter(|v| !prep.numeric.contains_key(v)));
        }
    }
    let constants = [half(), Rational::zero(), Rational::one()];
    let assignment = if roles.len() <= DETD_POLY_CAP {
        let poly = |prep: &Prepared, i: usize| -> Result<Poly, Error> { Ok(arithmetize_partial(&prep.formulas[i], &prep.numeric)?.to_poly()) };
        let det = poly(&preps[0], 0)?.mul(&poly(&preps[1], 1)?).sub(&poly(&preps[0], 1)?.mul(&poly(&preps[1], 0)?));
        if det.is_zero() {
            return Err(Error::SearchFailed("no distinguishing assignment: determinant vanishes identically".into()));
        }
        let mut a = find_nonroot(&det, &[Rational::zero(), half(), Rational::one()])?;
        for v in &roles {
            a.entry(v.clone()).or_insert_with(half);
        }
        a
    } else {
        let roles: Vec<VarId> = roles.into_iter().collect();
        let total = 3u64.checked_pow(roles.len() as u32).unwrap_or(u64::MAX);
        if total > DETD_ENUM_CAP {
            return Err(Error::VarCap { vars: roles.len(), cap: DETD_POLY_CAP });
        }
        let mut found = None;
        for code in 0..total {
            let mut c = code;
            let a: BTreeMap<VarId, Rational> = roles
                .iter()
                .map(|v| {
                    let x = constants[(c % 3) as usize].clone();
                    c /= 3;
                    (v.clone(), x)
                })
                .collect();
            let y0 = eval_at(&preps[0], &a)?;
            let y1 = eval_at(&preps[1], &a)?;
            if !(&y0[0] * &y1[1] - &y0[1] * &y1[0]).is_zero() {
                found = Some(a);
                break;
            }
        }
        found.ok_or_else(|| Error::SearchFailed("no distinguishing assignment".into()))?
    };
    let ys: Vec<[Rational; 2]> = preps.iter().map(|prep| eval_at(prep, &assignment)).collect::<Result<_, _>>()?;
    let cross = |i: usize| &ys[i][0] * &ys[i + 1][1] - &ys[i][1] * &ys[i + 1][0];
    let det = cross(0);
    if det.is_zero() {
        return Err(Error::Internal("assignment does not separate the sequences".into()));
    }
    Ok(DetDResult {
        p,
        assignment,
        sequences: [ys.iter().map(|y| y[0].clone()).collect(), ys.iter().map(|y| y[1].clone()).collect()],
        det,
        later_dets: vec![cross(1), cross(2)],
    })
}
