use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use super::{minimize_query, rewrite_symbol, ClauseKind, Query};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SideType {
    I,
    II,
    /// Both type-I and type-II clauses on the same side.
    Mixed,
    None,
}

impl fmt::Display for SideType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SideType::I => "I",
            SideType::II => "II",
            SideType::Mixed => "mixed",
            SideType::None => "none",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    /// The minimized query the report refers to; paths index its clauses.
    pub query: Query,
    pub bipartite: bool,
    pub left_type: SideType,
    pub right_type: SideType,
    pub is_unsafe: bool,
    pub length: Option<usize>,
    pub witness_path: Option<Vec<usize>>,
    pub is_final: bool,
    pub forbidden: bool,
    pub ubiquitous_left: BTreeSet<String>,
    pub ubiquitous_right: BTreeSet<String>,
    pub diagnostics: Vec<String>,
}

fn side_type(q: &Query, left: bool) -> SideType {
    let (one, two) = if left { (ClauseKind::LeftI, ClauseKind::LeftII) } else { (ClauseKind::RightI, ClauseKind::RightII) };
    let has1 = q.clauses.iter().any(|c| c.kind == one);
    let has2 = q.clauses.iter().any(|c| c.kind == two);
    match (has1, has2) {
        (true, true) => SideType::Mixed,
        (true, false) => SideType::I,
        (false, true) => SideType::II,
        (false, false) => SideType::None,
    }
}

fn adjacent(q: &Query, i: usize, j: usize) -> bool {
    let a = q.clauses[i].binary_symbols();
    q.clauses[j].binary_symbols().iter().any(|s| a.contains(s))
}

/// Distance of every clause to the nearest right clause along chains of
/// clauses sharing a binary symbol.
fn distances_to_right(q: &Query) -> Vec<Option<usize>> {
    let n = q.clauses.len();
    let mut dist = vec![None; n];
    let mut queue = VecDeque::new();
    for (i, c) in q.clauses.iter().enumerate() {
        if c.kind.is_right() {
            dist[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let d = dist[i].unwrap_or(0);
        for j in 0..n {
            if dist[j].is_none() && adjacent(q, i, j) {
                dist[j] = Some(d + 1);
                queue.push_back(j);
            }
        }
    }
    dist
}

/// All left-to-right paths of minimal length, in lexicographic order of
/// clause indices, together with that length.
pub fn left_right_paths(q: &Query) -> (Option<usize>, Vec<Vec<usize>>) {
    let dist = distances_to_right(q);
    let k = q
        .clauses
        .iter()
        .enumerate()
        .filter(|(_, c)| c.kind.is_left())
        .filter_map(|(i, _)| dist[i])
        .filter(|&d| d > 0)
        .min();
    let Some(k) = k else {
        return (None, Vec::new());
    };
    let mut paths = Vec::new();
    fn extend(q: &Query, dist: &[Option<usize>], path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let last = *path.last().expect("nonempty path");
        let d = dist[last].unwrap_or(0);
        if d == 0 {
            out.push(path.clone());
            return;
        }
        for j in 0..q.clauses.len() {
            if dist[j] == Some(d - 1) && adjacent(q, last, j) {
                path.push(j);
                extend(q, dist, path, out);
                path.pop();
            }
        }
    }
    for (i, c) in q.clauses.iter().enumerate() {
        if c.kind.is_left() && dist[i] == Some(k) {
            extend(q, &dist, &mut vec![i], &mut paths);
        }
    }
    (Some(k), paths)
}

fn unsafe_query(q: &Query) -> bool {
    left_right_paths(q).0.is_some()
}

/// Symbols present in every subclause of every clause on one side.
fn ubiquitous(q: &Query, left: bool) -> BTreeSet<String> {
    let mut acc: Option<BTreeSet<String>> = None;
    for c in q.clauses.iter().filter(|c| if left { c.kind.is_left() } else { c.kind.is_right() }) {
        for s in &c.subs {
            acc = Some(match acc {
                None => s.clone(),
                Some(a) => a.intersection(s).cloned().collect(),
            });
        }
    }
    acc.unwrap_or_default()
}

fn final_check(q: &Query) -> (bool, Vec<String>) {
    let mut notes = Vec::new();
    let mut all_safe = true;
    for s in q.symbols() {
        for v in [false, true] {
            let r = rewrite_symbol(q, &s, v).expect("symbol of q");
            if unsafe_query(&r) {
                all_safe = false;
                notes.push(format!("rewrite {s}:={} stays unsafe", u8::from(v)));
            }
        }
    }
    (all_safe, notes)
}

pub fn classify(q: &Query) -> ClassReport {
    let q = minimize_query(q);
    let bipartite = !q.clauses.iter().any(|c| c.kind == ClauseKind::Mixed);
    let mut report = ClassReport {
        query: q.clone(),
        bipartite,
        left_type: SideType::None,
        right_type: SideType::None,
        is_unsafe: false,
        length: None,
        witness_path: None,
        is_final: false,
        forbidden: false,
        ubiquitous_left: BTreeSet::new(),
        ubiquitous_right: BTreeSet::new(),
        diagnostics: Vec::new(),
    };
    if !bipartite {
        report.diagnostics.push("a clause mentions both R(x) and T(y)".into());
        return report;
    }
    report.left_type = side_type(&q, true);
    report.right_type = side_type(&q, false);
    report.ubiquitous_left = ubiquitous(&q, true);
    report.ubiquitous_right = ubiquitous(&q, false);
    let (k, paths) = left_right_paths(&q);
    report.is_unsafe = k.is_some();
    report.length = k;
    report.witness_path = paths.first().cloned();
    if report.is_unsafe {
        let (fin, notes) = final_check(&q);
        report.is_final = fin;
        report.diagnostics.extend(notes);
        if fin && report.left_type == SideType::II && report.right_type == SideType::II {
            if let Ok(f) = forbidden_report(&q) {
                report.forbidden = f.forbidden;
                report.diagnostics.extend(f.violations);
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ForbiddenReport {
    pub forbidden: bool,
    pub ubiquitous_left: BTreeSet<String>,
    pub ubiquitous_right: BTreeSet<String>,
    pub violations: Vec<String>,
    /// Syntactic properties every forbidden query has, checked on the
    /// first minimal path: `(description, holds)`.
    pub syntax: Vec<(String, bool)>,
}

/// Checks the forbidden-query condition on every minimal left-right path.
pub fn forbidden_report(q: &Query) -> Result<ForbiddenReport, Error> {
    let q = minimize_query(q);
    if side_type(&q, true) != SideType::II || side_type(&q, false) != SideType::II {
        return Err(Error::Inapplicable("query is not of type II-II".into()));
    }
    let (k, paths) = left_right_paths(&q);
    if k.is_none() {
        return Err(Error::Inapplicable("query is safe".into()));
    }
    let (fin, _) = final_check(&q);
    if !fin {
        return Err(Error::Inapplicable("query is not final".into()));
    }
    let ul = ubiquitous(&q, true);
    let ur = ubiquitous(&q, false);
    let mut violations = Vec::new();
    for path in &paths {
        let c0 = &q.clauses[path[0]];
        let c1 = q.clauses[path[1]].binary_symbols();
        for s in c0.binary_symbols() {
            if !ul.contains(&s) && !c1.contains(&s) {
                violations.push(format!("path {path:?}: {s} in the left end is neither ubiquitous nor in the next clause"));
            }
        }
        let ck = &q.clauses[path[path.len() - 1]];
        let ck1 = q.clauses[path[path.len() - 2]].binary_symbols();
        for s in ck.binary_symbols() {
            if !ur.contains(&s) && !ck1.contains(&s) {
                violations.push(format!("path {path:?}: {s} in the right end is neither ubiquitous nor in the previous clause"));
            }
        }
    }
    let forbidden = violations.is_empty();
    let syntax = if forbidden { syntax_checks(&q, &paths[0], &ul, &ur) } else { Vec::new() };
    Ok(ForbiddenReport { forbidden, ubiquitous_left: ul, ubiquitous_right: ur, violations, syntax })
}

fn syntax_checks(q: &Query, path: &[usize], ul: &BTreeSet<String>, ur: &BTreeSet<String>) -> Vec<(String, bool)> {
    let mut out = Vec::new();
    let k = path.len() - 1;
    for (side, ub, end, next) in [("left", ul, path[0], path[1]), ("right", ur, path[k], path[k - 1])] {
        let outer: Vec<&super::Clause> = if side == "left" { q.left_clauses().collect() } else { q.right_clauses().collect() };
        let c_end = q.clauses[end].binary_symbols();
        let c_next = q.clauses[next].binary_symbols();
        let subs_ok = outer.iter().all(|c| c.subs.iter().all(|s| s.iter().all(|x| ub.contains(x) || c_next.contains(x))));
        out.push((format!("every {side} subclause is ubiquitous symbols plus symbols of the adjacent path clause"), subs_ok));
        out.push((format!("{side} ubiquitous symbols avoid the adjacent path clause"), c_next.is_disjoint(ub)));
        let middles: Vec<BTreeSet<String>> = q.middle_clauses().map(|c| c.binary_symbols()).collect();
        let bounded = middles
            .iter()
            .filter(|m| !m.is_disjoint(ub))
            .all(|m| m.iter().all(|x| c_end.contains(x) || c_next.contains(x)));
        out.push((format!("middle clauses with {side} ubiquitous symbols stay within the two end clauses"), bounded));
        if ub.len() > 1 {
            let each = ub.iter().all(|u| middles.iter().any(|m| m.contains(u) && m.intersection(ub).count() == 1));
            out.push((format!("each {side} ubiquitous symbol has a middle clause of its own"), each));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::query::parse_query;

    fn c(text: &str) -> ClassReport {
        classify(&parse_query(text).unwrap())
    }

    #[test]
    fn q_star() {
        let r = c("forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))");
        assert!(r.is_unsafe && r.is_final);
        assert_eq!(r.length, Some(1));
        assert_eq!((r.left_type, r.right_type), (SideType::I, SideType::I));
    }

    #[test]
    fn disconnected_is_safe() {
        let r = c("forall x forall y (R(x) | S1(x,y)) & forall x forall y (S2(x,y) | T(y))");
        assert!(!r.is_unsafe);
        assert!(r.witness_path.is_none());
    }

    #[test]
    fn chain_of_two() {
        let r = c("forall x forall y (R(x) | S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y)) & forall x forall y (S2(x,y) | T(y))");
        assert_eq!(r.length, Some(2));
        assert!(r.is_final);
    }

    #[test]
    fn non_bipartite() {
        let r = c("forall x forall y (R(x) | T(y))");
        assert!(!r.bipartite);
    }
}
