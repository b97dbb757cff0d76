use std::collections::BTreeSet;

use super::{Clause, ClauseKind, Query, R, T};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Atom {
    R(usize),
    T(usize),
    S(String, usize, usize),
}

/// A clause in prenex form: `nx` x-variables, `ny` y-variables and atoms.
struct Structure {
    nx: usize,
    ny: usize,
    atoms: BTreeSet<Atom>,
}

fn structure(c: &Clause) -> Structure {
    let mut atoms = BTreeSet::new();
    match c.kind {
        ClauseKind::LeftII => {
            for (i, sub) in c.subs.iter().enumerate() {
                atoms.extend(sub.iter().map(|s| Atom::S(s.clone(), 0, i)));
            }
            Structure { nx: 1, ny: c.subs.len(), atoms }
        }
        ClauseKind::RightII => {
            for (i, sub) in c.subs.iter().enumerate() {
                atoms.extend(sub.iter().map(|s| Atom::S(s.clone(), i, 0)));
            }
            Structure { nx: c.subs.len(), ny: 1, atoms }
        }
        _ => {
            if c.r {
                atoms.insert(Atom::R(0));
            }
            if c.t {
                atoms.insert(Atom::T(0));
            }
            atoms.extend(c.subs[0].iter().map(|s| Atom::S(s.clone(), 0, 0)));
            Structure { nx: 1, ny: 1, atoms }
        }
    }
}

fn maps(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = k.checked_pow(n as u32).unwrap_or(0);
    (0..total).map(move |mut code| {
        let mut m = Vec::with_capacity(n);
        for _ in 0..n {
            m.push(code % k);
            code /= k;
        }
        m
    })
}

/// Whether a homomorphism `from → to` exists, i.e. `∀from ⇒ ∀to`.
pub fn homomorphism(from: &Clause, to: &Clause) -> bool {
    let a = structure(from);
    let b = structure(to);
    maps(a.nx, b.nx).any(|fx| {
        maps(a.ny, b.ny).any(|fy| {
            a.atoms.iter().all(|atom| {
                let image = match atom {
                    Atom::R(i) => Atom::R(fx[*i]),
                    Atom::T(j) => Atom::T(fy[*j]),
                    Atom::S(s, i, j) => Atom::S(s.clone(), fx[*i], fy[*j]),
                };
                b.atoms.contains(&image)
            })
        })
    })
}

fn renormalize(c: &Clause) -> Clause {
    match c.kind {
        ClauseKind::LeftII => Clause::left_ii(c.subs.clone()),
        ClauseKind::RightII => Clause::right_ii(c.subs.clone()),
        _ => Clause::flat(c.r, c.t, c.subs.first().cloned().unwrap_or_default()),
    }
}

fn kind_rank(k: ClauseKind) -> u8 {
    match k {
        ClauseKind::LeftI | ClauseKind::LeftII => 0,
        ClauseKind::Mixed => 1,
        ClauseKind::Middle => 2,
        ClauseKind::RightI | ClauseKind::RightII => 3,
    }
}

/// Minimizes every clause, removes redundant clauses, and sorts the rest
/// into a canonical order (left, middle, right).
pub fn minimize_query(q: &Query) -> Query {
    let clauses: Vec<Clause> = q.clauses.iter().map(renormalize).collect();
    if clauses.iter().any(Clause::is_empty) {
        return Query::constant(false);
    }
    let mut kept = Vec::new();
    for (j, cj) in clauses.iter().enumerate() {
        let redundant = clauses.iter().enumerate().any(|(i, ci)| {
            i != j && homomorphism(ci, cj) && !(homomorphism(cj, ci) && j < i)
        });
        if !redundant {
            kept.push(cj.clone());
        }
    }
    kept.sort_by(|a, b| kind_rank(a.kind).cmp(&kind_rank(b.kind)).then_with(|| a.cmp(b)));
    kept.dedup();
    Query::new(kept)
}

/// `Q[S := value]` for a binary symbol or `R`/`T`, re-minimized.
pub fn rewrite_symbol(q: &Query, symbol: &str, value: bool) -> Result<Query, Error> {
    if !q.symbols().contains(symbol) {
        return Err(Error::Domain(format!("unknown symbol {symbol}")));
    }
    let mut out = Vec::new();
    for c in &q.clauses {
        let rewritten = if symbol == R || symbol == T {
            let hit = (symbol == R && c.r) || (symbol == T && c.t);
            if !hit {
                Some(c.clone())
            } else if value {
                None
            } else {
                let r = c.r && symbol != R;
                let t = c.t && symbol != T;
                Some(Clause::flat(r, t, c.subs[0].clone()))
            }
        } else if value {
            if c.subs.iter().any(|s| s.contains(symbol)) {
                None
            } else {
                Some(c.clone())
            }
        } else {
            let subs: Vec<BTreeSet<String>> =
                c.subs.iter().map(|s| s.iter().filter(|x| *x != symbol).cloned().collect()).collect();
            Some(match c.kind {
                ClauseKind::LeftII => Clause::left_ii(subs),
                ClauseKind::RightII => Clause::right_ii(subs),
                _ => Clause::flat(c.r, c.t, subs.into_iter().next().unwrap_or_default()),
            })
        };
        out.extend(rewritten);
    }
    Ok(minimize_query(&Query::new(out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn q(text: &str) -> Query {
        minimize_query(&parse_query(text).unwrap())
    }

    #[test]
    fn superset_clause_removed() {
        let m = q("forall x forall y (S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y))");
        assert_eq!(m, q("forall x forall y (S1(x,y))"));
    }

    #[test]
    fn distributed_left_clauses_stay() {
        let text = "forall x (forall y (S1(x,y) | S2(x,y)) | forall y (S1(x,y) | S3(x,y))) & forall x (forall y (S1(x,y)) | forall y (S2(x,y) | S3(x,y)))";
        assert_eq!(q(text).clauses.len(), 2);
    }

    #[test]
    fn idempotent() {
        let m = q("forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))");
        assert_eq!(minimize_query(&m), m);
    }

    #[test]
    fn left_type_two_absorbs_subclause() {
        let c = q("forall x (forall y (S1(x,y)) | forall y (S1(x,y) | S2(x,y)))");
        assert_eq!(c, q("forall x forall y (S1(x,y) | S2(x,y))"));
    }

    #[test]
    fn middle_implies_type_two() {
        let m = q("forall x forall y (S1(x,y)) & forall x (forall y (S1(x,y)) | forall y (S2(x,y)))");
        assert_eq!(m, q("forall x forall y (S1(x,y))"));
    }

    #[test]
    fn rewrites() {
        let qs = q("forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))");
        assert_eq!(rewrite_symbol(&qs, "S", false).unwrap(), q("forall x forall y (R(x)) & forall x forall y (T(y))"));
        assert!(rewrite_symbol(&qs, "S", true).unwrap().is_true());
        let chain = q("forall x forall y (R(x) | S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y)) & forall x forall y (S2(x,y) | T(y))");
        assert_eq!(rewrite_symbol(&chain, "S1", false).unwrap(), q("forall x forall y (R(x)) & forall x forall y (S2(x,y))"));
        assert!(rewrite_symbol(&chain, "S9", false).is_err());
    }

    #[test]
    fn empty_clause_is_false() {
        let qs = q("forall x forall y (S(x,y)) & forall x forall y (R(x))");
        assert!(rewrite_symbol(&qs, "S", false).unwrap().is_false());
    }
}
