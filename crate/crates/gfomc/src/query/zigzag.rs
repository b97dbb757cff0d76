use std::collections::BTreeSet;

use super::{classify, minimize_query, Clause, ClauseKind, Query};
use crate::Error;

/// Name of the binary copy `T⁽¹²⁾` of the right unary symbol.
pub const ZG_T12: &str = "TZ12";

/// Name of copy `i` of `R` for `1 < i < n`; copy 1 is `R` and copy `n` is
/// `T` in the new query.
pub fn zg_r(i: usize) -> String {
    format!("RZ{i}")
}

/// Name of copy `i` of a binary symbol.
pub fn zg_s(symbol: &str, i: usize) -> String {
    format!("{symbol}Z{i}")
}

/// The branching parameter `n`: 2 when every right clause is of type I,
/// otherwise the largest right subclause count, but at least 3.
pub fn zigzag_branching(q: &Query) -> usize {
    let right: Vec<&Clause> = q.right_clauses().collect();
    if right.iter().all(|c| c.kind == ClauseKind::RightI) {
        2
    } else {
        right.iter().map(|c| c.subs.len()).max().unwrap_or(0).max(3)
    }
}

fn copy(set: &BTreeSet<String>, i: usize) -> BTreeSet<String> {
    set.iter().map(|s| zg_s(s, i)).collect()
}

/// The zig-zag query: a query of type A-A whose shortest left-right path
/// is at least twice as long, evaluated over a renamed vocabulary.
pub fn zigzag_query(q: &Query) -> Result<Query, Error> {
    let report = classify(q);
    if !report.bipartite {
        return Err(Error::Inapplicable("query is not bipartite".into()));
    }
    if !report.is_unsafe {
        return Err(Error::Inapplicable("query is safe".into()));
    }
    let q = report.query;
    let n = zigzag_branching(&q);
    for s in q.binary_symbols() {
        for i in 1..=n {
            if q.binary_symbols().contains(&zg_s(&s, i)) {
                return Err(Error::Domain(format!("symbol {s} collides with the renamed vocabulary")));
            }
        }
    }
    let mut out = Vec::new();
    for c in &q.clauses {
        match c.kind {
            ClauseKind::LeftI => {
                let sj = &c.subs[0];
                out.push(Clause::flat(true, false, copy(sj, 1)));
                for i in 2..n {
                    let mut atoms = copy(sj, i);
                    atoms.insert(zg_r(i));
                    out.push(Clause::flat(false, false, atoms));
                }
                out.push(Clause::flat(false, true, copy(sj, n)));
            }
            ClauseKind::LeftII => {
                out.push(Clause::left_ii(c.subs.iter().map(|s| copy(s, 1)).collect()));
                for j in 2..n {
                    let atoms: BTreeSet<String> = c.subs.iter().flat_map(|s| copy(s, j)).collect();
                    out.push(Clause::flat(false, false, atoms));
                }
                out.push(Clause::right_ii(c.subs.iter().map(|s| copy(s, n)).collect()));
            }
            ClauseKind::Middle => {
                for i in 1..=n {
                    out.push(Clause::flat(false, false, copy(&c.subs[0], i)));
                }
            }
            ClauseKind::RightI => {
                for i in 1..=2 {
                    let mut atoms = copy(&c.subs[0], i);
                    atoms.insert(ZG_T12.to_string());
                    out.push(Clause::flat(false, false, atoms));
                }
            }
            ClauseKind::RightII => {
                let l = c.subs.len();
                let total = n.pow(l as u32);
                for code in 0..total {
                    let mut phi = code;
                    let mut atoms = BTreeSet::new();
                    for sub in &c.subs {
                        atoms.extend(copy(sub, phi % n + 1));
                        phi /= n;
                    }
                    out.push(Clause::flat(false, false, atoms));
                }
            }
            ClauseKind::Mixed => unreachable!("bipartite query"),
        }
    }
    Ok(minimize_query(&Query::new(out)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::{parse_query, SideType};

    #[test]
    fn branching_parameter() {
        let q1 = parse_query("forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))").unwrap();
        assert_eq!(zigzag_branching(&q1), 2);
        let q2 = parse_query("forall x forall y (R(x) | S1(x,y) | S2(x,y)) & forall y (forall x (S1(x,y)) | forall x (S2(x,y)))").unwrap();
        assert_eq!(zigzag_branching(&q2), 3);
    }

    #[test]
    fn q_star_zigzag() {
        let q = parse_query("forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))").unwrap();
        let z = zigzag_query(&q).unwrap();
        let expected = minimize_query(
            &parse_query(
                "forall x forall y (R(x) | SZ1(x,y)) & forall x forall y (SZ2(x,y) | T(y)) & forall x forall y (SZ1(x,y) | TZ12(x,y)) & forall x forall y (SZ2(x,y) | TZ12(x,y))",
            )
            .unwrap(),
        );
        assert_eq!(z, expected);
        let r = classify(&z);
        assert_eq!((r.left_type, r.right_type), (SideType::I, SideType::I));
        assert_eq!(r.length, Some(3));
    }

    #[test]
    fn rejects_safe() {
        let q = parse_query("forall x forall y (R(x) | S1(x,y)) & forall x forall y (S2(x,y) | T(y))").unwrap();
        assert!(zigzag_query(&q).is_err());
    }
}
