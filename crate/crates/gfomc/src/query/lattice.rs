use std::collections::BTreeSet;
use std::fmt;

use super::{minimize_query, Clause, ClauseKind, Query};
use crate::formula::{CnfFormula, VarId};
use crate::Error;

/// The left clauses distributed into `∀x(∀y G₁ ∨ … ∨ ∀y G_m)`, the middle
/// CNF `C`, and the right clauses as `∀y(∀x H₁ ∨ … ∨ ∀x H_n)`. Formulas
/// are over symbol names, read as atoms on one pair `(x,y)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GhDecomposition {
    pub g: Vec<CnfFormula>,
    pub h: Vec<CnfFormula>,
    pub c: CnfFormula,
}

fn distribute<'a>(clauses: impl Iterator<Item = &'a Clause>) -> Vec<CnfFormula> {
    let mut products: Vec<CnfFormula> = vec![CnfFormula::constant(true)];
    for clause in clauses {
        let mut next = Vec::new();
        for p in &products {
            for sub in &clause.subs {
                let atoms: Vec<VarId> = sub.iter().map(VarId::new).collect();
                next.push(p.and(&CnfFormula::new([atoms])));
            }
        }
        products = next;
    }
    let mut out: Vec<CnfFormula> = Vec::new();
    for p in products {
        if !out.contains(&p) {
            out.push(p);
        }
    }
    out
}

pub fn gh_decomposition(q: &Query) -> Result<GhDecomposition, Error> {
    let q = minimize_query(q);
    let left: Vec<&Clause> = q.left_clauses().collect();
    let right: Vec<&Clause> = q.right_clauses().collect();
    if left.is_empty() || right.is_empty() {
        return Err(Error::Inapplicable("query needs left and right clauses".into()));
    }
    if left.iter().any(|c| c.kind != ClauseKind::LeftII) || right.iter().any(|c| c.kind != ClauseKind::RightII) {
        return Err(Error::Inapplicable("query is not of type II-II".into()));
    }
    Ok(GhDecomposition { g: distribute(left.into_iter()), h: distribute(right.into_iter()), c: q.middle_cnf() })
}

/// Closed subsets of `[m]` ordered by reverse inclusion, with the Möbius
/// function. Element 0 is the top `1̂ = ∅`, whose formula is the
/// disjunction of all inputs; sets use 0-based indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    pub inputs: Vec<CnfFormula>,
    pub elements: Vec<BTreeSet<usize>>,
    pub mobius: Vec<i64>,
    pub formulas: Vec<CnfFormula>,
}

impl Lattice {
    pub const TOP: usize = 0;

    /// Elements with nonzero Möbius value, top excluded.
    pub fn strict_support(&self) -> Vec<usize> {
        (1..self.elements.len()).filter(|&i| self.mobius[i] != 0).collect()
    }

    pub fn index_of(&self, set: &BTreeSet<usize>) -> Option<usize> {
        self.elements.iter().position(|e| e == set)
    }

    /// `{1,2}`-style label using 1-based indices; the top prints as `top`.
    pub fn label(&self, i: usize) -> String {
        if i == Self::TOP {
            return "top".into();
        }
        let parts: Vec<String> = self.elements[i].iter().map(|x| (x + 1).to_string()).collect();
        parts.join("")
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.elements.len() {
            writeln!(f, "{}: mu={} F={}", self.label(i), self.mobius[i], self.formulas[i])?;
        }
        Ok(())
    }
}

fn closure(formulas: &[CnfFormula], set: &BTreeSet<usize>) -> BTreeSet<usize> {
    let conj = CnfFormula::and_all(set.iter().map(|&i| &formulas[i]));
    (0..formulas.len()).filter(|&i| conj.implies(&formulas[i])).collect()
}

pub fn build_lattice(formulas: &[CnfFormula]) -> Result<Lattice, Error> {
    let m = formulas.len();
    if m == 0 {
        return Err(Error::Domain("lattice of an empty formula list".into()));
    }
    if m > 20 {
        return Err(Error::VarCap { vars: m, cap: 20 });
    }
    let mut closed: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    for bits in 1u32..1 << m {
        let set: BTreeSet<usize> = (0..m).filter(|i| bits >> i & 1 == 1).collect();
        closed.insert(closure(formulas, &set));
    }
    let mut rest: Vec<BTreeSet<usize>> = closed.into_iter().collect();
    rest.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    let mut elements = vec![BTreeSet::new()];
    elements.extend(rest);
    let mut mobius = vec![0i64; elements.len()];
    mobius[0] = 1;
    for i in 1..elements.len() {
        let s: i64 = (0..i).filter(|&j| elements[j].is_subset(&elements[i]) && elements[j] != elements[i]).map(|j| mobius[j]).sum();
        mobius[i] = -s;
    }
    let top = formulas[1..].iter().fold(formulas[0].clone(), |acc, f| acc.or(f));
    let formulas_out = elements
        .iter()
        .enumerate()
        .map(|(i, e)| if i == 0 { top.clone() } else { CnfFormula::and_all(e.iter().map(|&j| &formulas[j])) })
        .collect();
    Ok(Lattice { inputs: formulas.to_vec(), elements, mobius, formulas: formulas_out })
}

/// A type II-II query with its decomposition and both lattices, built
/// from `Gᵢ ∧ C` and `C ∧ Hⱼ`.
#[derive(Clone, Debug)]
pub struct TypeTwo {
    pub query: Query,
    pub gh: GhDecomposition,
    pub left: Lattice,
    pub right: Lattice,
}

fn as_middle_clauses(f: &CnfFormula) -> Vec<Clause> {
    f.clauses().map(|c| Clause::middle(c.iter().map(|v| v.name().to_string()))).collect()
}

impl TypeTwo {
    pub fn new(q: &Query) -> Result<TypeTwo, Error> {
        let query = minimize_query(q);
        let gh = gh_decomposition(&query)?;
        let gs: Vec<CnfFormula> = gh.g.iter().map(|g| g.and(&gh.c)).collect();
        let hs: Vec<CnfFormula> = gh.h.iter().map(|h| gh.c.and(h)).collect();
        Ok(TypeTwo { left: build_lattice(&gs)?, right: build_lattice(&hs)?, query, gh })
    }

    /// `G_α ∧ C` for a left lattice element other than the top.
    pub fn g_alpha(&self, a: usize) -> &CnfFormula {
        &self.left.formulas[a]
    }

    pub fn h_beta(&self, b: usize) -> &CnfFormula {
        &self.right.formulas[b]
    }

    /// `Q_αβ` for lattice element indices (`Lattice::TOP` for `1̂`).
    pub fn q_alpha_beta(&self, a: usize, b: usize) -> Result<Query, Error> {
        if a >= self.left.elements.len() || b >= self.right.elements.len() {
            return Err(Error::Domain("lattice index out of range".into()));
        }
        let mut clauses = match (a == Lattice::TOP, b == Lattice::TOP) {
            (false, false) => as_middle_clauses(&self.g_alpha(a).and(self.h_beta(b))),
            _ => self.query.clauses.clone(),
        };
        if a != Lattice::TOP && b == Lattice::TOP {
            clauses.extend(as_middle_clauses(self.g_alpha(a)));
        }
        if b != Lattice::TOP && a == Lattice::TOP {
            clauses.extend(as_middle_clauses(self.h_beta(b)));
        }
        Ok(minimize_query(&Query::new(clauses)))
    }
}

/// `Q_αβ` with `α`, `β` given as 0-based index sets (empty for `1̂`).
pub fn q_alpha_beta(q: &Query, alpha: &BTreeSet<usize>, beta: &BTreeSet<usize>) -> Result<Query, Error> {
    let tt = TypeTwo::new(q)?;
    let a = tt.left.index_of(alpha).ok_or_else(|| Error::Domain(format!("{alpha:?} is not a closed left set")))?;
    let b = tt.right.index_of(beta).ok_or_else(|| Error::Domain(format!("{beta:?} is not a closed right set")))?;
    tt.q_alpha_beta(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn f(c: &[&[&str]]) -> CnfFormula {
        CnfFormula::from_names(c)
    }

    #[test]
    fn example_lattices() {
        let l = build_lattice(&[f(&[&["Z1"], &["Z2"]]), f(&[&["Z1"], &["Z3"]]), f(&[&["Z2"], &["Z3"]])]).unwrap();
        assert_eq!(l.elements.len(), 5);
        assert_eq!(l.mobius, vec![1, -1, -1, -1, 2]);
        let l = build_lattice(&[f(&[&["Z1"], &["Z2"]]), f(&[&["Z2"], &["Z3"]]), f(&[&["Z3"], &["Z4"]])]).unwrap();
        let all = l.index_of(&BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(l.mobius[all], 0);
        assert!(!l.strict_support().contains(&all));
        assert_eq!(l.strict_support().len(), 5);
        let l = build_lattice(&[f(&[&["A"]])]).unwrap();
        assert_eq!(l.mobius, vec![1, -1]);
    }

    #[test]
    fn decomposition_example() {
        let q = parse_query(
            "forall x (forall y (S1(x,y) | S2(x,y)) | forall y (S1(x,y) | S3(x,y))) & forall x (forall y (S1(x,y)) | forall y (S2(x,y) | S3(x,y))) & forall y (forall x (S4(x,y)) | forall x (S5(x,y)))",
        )
        .unwrap();
        let gh = gh_decomposition(&q).unwrap();
        assert_eq!(
            gh.g,
            vec![f(&[&["S1"]]), f(&[&["S1", "S2"], &["S2", "S3"]]), f(&[&["S1", "S3"], &["S2", "S3"]])]
        );
    }

    #[test]
    fn running_example_q_alpha_beta() {
        let q = parse_query(
            "forall x (forall y (S1(x,y)) | forall y (S2(x,y))) & forall x forall y (S1(x,y) | S3(x,y)) & forall y (forall x (S3(x,y)) | forall x (S4(x,y)))",
        )
        .unwrap();
        let tt = TypeTwo::new(&q).unwrap();
        assert_eq!(tt.left.mobius, vec![1, -1, -1, 1]);
        let one = BTreeSet::from([0]);
        let two = BTreeSet::from([1]);
        let m = |t: &str| minimize_query(&parse_query(t).unwrap());
        assert_eq!(q_alpha_beta(&q, &one, &one).unwrap(), m("forall x forall y (S1(x,y)) & forall x forall y (S3(x,y))"));
        assert_eq!(
            q_alpha_beta(&q, &two, &two).unwrap(),
            m("forall x forall y (S2(x,y)) & forall x forall y (S1(x,y) | S3(x,y)) & forall x forall y (S4(x,y))")
        );
        assert_eq!(q_alpha_beta(&q, &BTreeSet::new(), &BTreeSet::new()).unwrap(), minimize_query(&q));
        assert_eq!(
            q_alpha_beta(&q, &one, &BTreeSet::from([0, 1])).unwrap(),
            m("forall x forall y (S1(x,y)) & forall x forall y (S3(x,y)) & forall x forall y (S4(x,y))")
        );
    }
}
