//! Grounding queries into lineage formulas and computing probabilities.

mod mobius;

pub use mobius::{pr_mobius, restricted_lineage_t2, Type2Graph};

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::blocks::ap_matrix;
use crate::exactla::{RatMatrix, Rational};
use crate::formula::{model_count, weighted_count, CnfFormula, VarId};
use crate::query::{Clause, ClauseKind, Query, R, T};
use crate::tid::{GraphSpec, Tid};
use crate::Error;

/// Grounds one propositional clause; `None` when some atom is certain.
fn ground_atoms(atoms: impl IntoIterator<Item = VarId>, tid: &Tid) -> Option<Vec<VarId>> {
    let mut out = Vec::new();
    for v in atoms {
        let p = tid.prob(&v);
        if p.is_one() {
            return None;
        }
        if !p.is_zero() {
            out.push(v);
        }
    }
    Some(out)
}

fn flat_atoms(c: &Clause, x: &str, y: &str) -> Vec<VarId> {
    let mut atoms: Vec<VarId> = c.subs[0].iter().map(|s| VarId::binary(s, x, y)).collect();
    if c.r {
        atoms.push(VarId::unary(R, x));
    }
    if c.t {
        atoms.push(VarId::unary(T, y));
    }
    atoms
}

/// `∀y sub(x,y)` (or `∀x sub(x,y)` when `left` is false) as a CNF.
fn ground_sub(sub: &std::collections::BTreeSet<String>, fixed: &str, tid: &Tid, left: bool) -> CnfFormula {
    let others = if left { &tid.right } else { &tid.left };
    let mut clauses = Vec::new();
    for o in others {
        let (x, y) = if left { (fixed, o.as_str()) } else { (o.as_str(), fixed) };
        if let Some(c) = ground_atoms(sub.iter().map(|s| VarId::binary(s, x, y)), tid) {
            clauses.push(c);
        }
    }
    CnfFormula::new(clauses)
}

fn ground_nested(c: &Clause, fixed: &str, tid: &Tid, left: bool) -> CnfFormula {
    let mut acc: Option<CnfFormula> = None;
    for sub in &c.subs {
        let g = ground_sub(sub, fixed, tid, left);
        if g.is_true() {
            return g;
        }
        acc = Some(match acc {
            None => g,
            Some(a) => a.or(&g),
        });
    }
    acc.unwrap_or_else(|| CnfFormula::constant(false))
}

/// The lineage `Φ_Δ(Q)`: tuples at probability 0 or 1 are substituted
/// while grounding, and the result is subsumption-reduced.
pub fn ground_lineage(q: &Query, tid: &Tid) -> CnfFormula {
    let mut flat = Vec::new();
    let mut nested = Vec::new();
    for c in &q.clauses {
        match c.kind {
            ClauseKind::LeftII => {
                for x in &tid.left {
                    nested.push(ground_nested(c, x, tid, true));
                }
            }
            ClauseKind::RightII => {
                for y in &tid.right {
                    nested.push(ground_nested(c, y, tid, false));
                }
            }
            _ => {
                for x in &tid.left {
                    for y in &tid.right {
                        if let Some(g) = ground_atoms(flat_atoms(c, x, y), tid) {
                            flat.push(g);
                        }
                    }
                }
            }
        }
    }
    let base = CnfFormula::new(flat);
    base.and(&CnfFormula::and_all(nested.iter()))
}

/// `Pr_Δ(Q)` by weighted model counting of the lineage.
pub fn pr_exact(q: &Query, tid: &Tid) -> Result<Rational, Error> {
    weighted_count(&ground_lineage(q, tid), &tid.free_probs())
}

/// Number of worlds over the uncertain tuples of `Δ` that satisfy `Q`.
pub fn count_worlds(q: &Query, tid: &Tid) -> Result<BigInt, Error> {
    let universe = tid.free_probs().into_keys().collect();
    model_count(&ground_lineage(q, tid), &universe)
}

/// `Y(u,v)[R(u):=a, R(v):=b]` on a type-I block.
pub fn restricted_lineage(q: &Query, block: &Tid, u: &str, v: &str, a: bool, b: bool) -> Result<CnfFormula, Error> {
    for e in [u, v] {
        if !block.is_left(e) {
            return Err(Error::Domain(format!("endpoint {e} is not a left constant of the block")));
        }
    }
    let bind = BTreeMap::from([(VarId::unary(R, u), a), (VarId::unary(R, v), b)]);
    Ok(ground_lineage(q, block).substitute(&bind))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PendantMode {
    /// `y_a = z_a0 + z_a1`.
    PaperSum,
    /// `y_a = (1−c)·z_a0 + c·z_a1`, the probability of the pendant block
    /// with its far endpoint at probability `c`.
    Semantic,
}

impl std::str::FromStr for PendantMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "paper" | "paper-sum" => Ok(PendantMode::PaperSum),
            "semantic" | "semantic-weighted" => Ok(PendantMode::Semantic),
            _ => Err(Error::Parse(format!("unknown pendant mode `{s}`"))),
        }
    }
}

/// Per-block quantities of a graph database: the edge matrix `z` and the
/// pendant factors `(y₀, y₁)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockValues {
    pub c: Rational,
    pub z: RatMatrix,
    pub y_pendant: Option<(Rational, Rational)>,
    pub mode: PendantMode,
}

impl BlockValues {
    /// Values for a graph database with edge lengths `(p1, p2)` and
    /// pendant length `t`, from the one-step matrix `a1`.
    pub fn from_a1(
        a1: &RatMatrix,
        c: &Rational,
        (p1, p2): (usize, usize),
        pendant: Option<usize>,
        mode: PendantMode,
    ) -> Result<BlockValues, Error> {
        let a = ap_matrix(a1, c, p1)?;
        let b = ap_matrix(a1, c, p2)?;
        let z = RatMatrix::from_rows((0..2).map(|i| (0..2).map(|j| &a[(i, j)] * &b[(i, j)]).collect()).collect())?;
        let y_pendant = match pendant {
            None => None,
            Some(t) => {
                let at = ap_matrix(a1, c, t)?;
                let w = |i: usize| match mode {
                    PendantMode::PaperSum => &at[(i, 0)] + &at[(i, 1)],
                    PendantMode::Semantic => (Rational::one() - c) * &at[(i, 0)] + c * &at[(i, 1)],
                };
                Some((w(0), w(1)))
            }
        };
        Ok(BlockValues { c: c.clone(), z, y_pendant, mode })
    }
}

/// `Σ_θ ∏_u c_θ(u)·y_θ(u) · ∏_(u,v)∈E z_θ(u)θ(v)`, the probability of a
/// query on a graph database assembled from block values.
pub fn pr_structured(g: &GraphSpec, bv: &BlockValues) -> Result<Rational, Error> {
    g.check()?;
    if g.c != bv.c {
        return Err(Error::Domain("block values were computed for a different c".into()));
    }
    if g.pendant.is_some() != bv.y_pendant.is_some() {
        return Err(Error::Domain("pendant blocks and pendant values disagree".into()));
    }
    if g.n > 24 {
        return Err(Error::VarCap { vars: g.n, cap: 24 });
    }
    let prior = [Rational::one() - &g.c, g.c.clone()];
    let mut total = Rational::zero();
    for bits in 0u32..1 << g.n {
        let th = |i: usize| (bits >> (i - 1) & 1) as usize;
        let mut term = Rational::one();
        for i in 1..=g.n {
            term *= &prior[th(i)];
            if let Some((y0, y1)) = &bv.y_pendant {
                term *= if th(i) == 1 { y1 } else { y0 };
            }
        }
        for &(i, j) in &g.edges {
            term *= &bv.z[(th(i), th(j))];
        }
        total += term;
    }
    Ok(total)
}

#[cfg(test)]
mod tests;
