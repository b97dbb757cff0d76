//! Bipartite ∀CNF queries over `R(x)`, `T(y)` and binary symbols `S(x,y)`.

mod classify;
mod lattice;
mod minimize;
mod parse;
mod zigzag;

pub use classify::{classify, forbidden_report, left_right_paths, ClassReport, ForbiddenReport, SideType};
pub use lattice::{build_lattice, gh_decomposition, q_alpha_beta, GhDecomposition, Lattice, TypeTwo};
pub use minimize::{homomorphism, minimize_query, rewrite_symbol};
pub use parse::parse_query;
pub use zigzag::{zg_r, zg_s, zigzag_branching, zigzag_query, ZG_T12};

use std::collections::BTreeSet;
use std::fmt;

use crate::formula::{CnfFormula, VarId};

pub const R: &str = "R";
pub const T: &str = "T";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ClauseKind {
    LeftI,
    LeftII,
    Middle,
    RightI,
    RightII,
    /// Contains both `R(x)` and `T(y)`; makes the query non-bipartite.
    Mixed,
}

impl ClauseKind {
    pub fn is_left(self) -> bool {
        matches!(self, ClauseKind::LeftI | ClauseKind::LeftII)
    }

    pub fn is_right(self) -> bool {
        matches!(self, ClauseKind::RightI | ClauseKind::RightII)
    }
}

/// One universally quantified clause.
///
/// Flat clauses (`∀x∀y`) have exactly one atom set in `subs`, which may be
/// empty when `R(x)` or `T(y)` is present; the empty flat clause is false.
/// Type-II clauses hold two or more pairwise incomparable subclauses.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    pub kind: ClauseKind,
    pub r: bool,
    pub t: bool,
    pub subs: Vec<BTreeSet<String>>,
}

impl Clause {
    pub fn flat(r: bool, t: bool, binary: BTreeSet<String>) -> Clause {
        let kind = match (r, t) {
            (true, true) => ClauseKind::Mixed,
            (true, false) => ClauseKind::LeftI,
            (false, true) => ClauseKind::RightI,
            (false, false) => ClauseKind::Middle,
        };
        Clause { kind, r, t, subs: vec![binary] }
    }

    pub fn middle<I: IntoIterator<Item = S>, S: Into<String>>(symbols: I) -> Clause {
        Clause::flat(false, false, symbols.into_iter().map(Into::into).collect())
    }

    pub fn empty() -> Clause {
        Clause::flat(false, false, BTreeSet::new())
    }

    /// `∀x(∀y S_J1 ∨ … ∨ ∀y S_Jm)`, minimized: subclauses contained in
    /// another are dropped, empty subclauses (false) vanish, and a single
    /// remaining subclause becomes a middle clause.
    pub fn left_ii(subs: Vec<BTreeSet<String>>) -> Clause {
        Clause::nested(subs, ClauseKind::LeftII)
    }

    /// `∀y(∀x S_J1 ∨ … ∨ ∀x S_Jℓ)`, minimized as in [`Clause::left_ii`].
    pub fn right_ii(subs: Vec<BTreeSet<String>>) -> Clause {
        Clause::nested(subs, ClauseKind::RightII)
    }

    fn nested(subs: Vec<BTreeSet<String>>, kind: ClauseKind) -> Clause {
        let mut subs: Vec<BTreeSet<String>> = subs.into_iter().filter(|s| !s.is_empty()).collect();
        subs.sort();
        subs.dedup();
        let kept: Vec<BTreeSet<String>> = subs
            .iter()
            .filter(|a| !subs.iter().any(|b| b != *a && a.is_subset(b)))
            .cloned()
            .collect();
        match kept.len() {
            0 => Clause::empty(),
            1 => Clause::flat(false, false, kept.into_iter().next().unwrap_or_default()),
            _ => Clause { kind, r: false, t: false, subs: kept },
        }
    }

    pub fn is_empty(&self) -> bool {
        !self.r && !self.t && self.subs.iter().all(|s| s.is_empty())
    }

    pub fn is_flat(&self) -> bool {
        !matches!(self.kind, ClauseKind::LeftII | ClauseKind::RightII)
    }

    /// Binary symbols of the clause.
    pub fn binary_symbols(&self) -> BTreeSet<String> {
        self.subs.iter().flatten().cloned().collect()
    }

    /// All symbols, including `R` and `T`.
    pub fn symbols(&self) -> BTreeSet<String> {
        let mut s = self.binary_symbols();
        if self.r {
            s.insert(R.to_string());
        }
        if self.t {
            s.insert(T.to_string());
        }
        s
    }

    /// A flat clause as a propositional clause over symbol names.
    pub fn as_prop_clause(&self) -> Option<BTreeSet<VarId>> {
        if !self.is_flat() || self.r || self.t {
            return None;
        }
        Some(self.subs[0].iter().map(VarId::new).collect())
    }
}

fn atoms_text(set: &BTreeSet<String>) -> Vec<String> {
    set.iter().map(|s| format!("{s}(x,y)")).collect()
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            ClauseKind::LeftII | ClauseKind::RightII => {
                let (outer, inner) = if self.kind == ClauseKind::LeftII { ("x", "y") } else { ("y", "x") };
                let parts: Vec<String> = self
                    .subs
                    .iter()
                    .map(|s| format!("forall {inner} ({})", atoms_text(s).join(" | ")))
                    .collect();
                write!(f, "forall {outer} ({})", parts.join(" | "))
            }
            _ => {
                if self.is_empty() {
                    return f.write_str("false");
                }
                let mut atoms = Vec::new();
                if self.r {
                    atoms.push("R(x)".to_string());
                }
                atoms.extend(atoms_text(&self.subs[0]));
                if self.t {
                    atoms.push("T(y)".to_string());
                }
                write!(f, "forall x forall y ({})", atoms.join(" | "))
            }
        }
    }
}

/// Conjunction of clauses. No clauses means true; a query containing the
/// empty clause is false.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Query {
    pub clauses: Vec<Clause>,
}

impl Query {
    pub fn new(clauses: Vec<Clause>) -> Query {
        Query { clauses }
    }

    pub fn constant(value: bool) -> Query {
        if value {
            Query::default()
        } else {
            Query { clauses: vec![Clause::empty()] }
        }
    }

    pub fn is_true(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn is_false(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    pub fn has_r(&self) -> bool {
        self.clauses.iter().any(|c| c.r)
    }

    pub fn has_t(&self) -> bool {
        self.clauses.iter().any(|c| c.t)
    }

    pub fn binary_symbols(&self) -> BTreeSet<String> {
        self.clauses.iter().flat_map(Clause::binary_symbols).collect()
    }

    /// Binary symbols plus `R`/`T` when present.
    pub fn symbols(&self) -> BTreeSet<String> {
        self.clauses.iter().flat_map(Clause::symbols).collect()
    }

    pub fn left_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.kind.is_left())
    }

    pub fn right_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.kind.is_right())
    }

    pub fn middle_clauses(&self) -> impl Iterator<Item = &Clause> {
        self.clauses.iter().filter(|c| c.kind == ClauseKind::Middle)
    }

    /// The middle clauses as a CNF over symbol names.
    pub fn middle_cnf(&self) -> CnfFormula {
        CnfFormula::new(self.middle_clauses().filter_map(Clause::as_prop_clause))
    }

    /// Applies a renaming to every binary symbol.
    pub fn rename_symbols(&self, f: impl Fn(&str) -> String) -> Query {
        let clauses = self
            .clauses
            .iter()
            .map(|c| Clause {
                kind: c.kind,
                r: c.r,
                t: c.t,
                subs: c.subs.iter().map(|s| s.iter().map(|x| f(x)).collect()).collect(),
            })
            .collect();
        minimize_query(&Query { clauses })
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("true");
        }
        if self.is_false() {
            return f.write_str("false");
        }
        let parts: Vec<String> = self.clauses.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join(" & "))
    }
}
