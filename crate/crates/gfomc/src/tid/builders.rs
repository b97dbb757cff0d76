use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::Tid;
use crate::exactla::Rational;
use crate::formula::VarId;
use crate::query::{minimize_query, zg_r, zg_s, zigzag_branching, Query, R, T, ZG_T12};
use crate::Error;

/// Parameters of one block between endpoints `u` and `v`.
///
/// Type-I blocks use `u`, `v`, `p`, `c`. Type-II blocks additionally use
/// `dead_ends` and the number of `prefix`/`suffix` branches; with zero
/// branches the endpoint itself plays the role of `r₀` (resp. `t_p`).
/// `tag` makes the fresh constants unique.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSpec {
    pub u: String,
    pub v: String,
    pub p: usize,
    pub c: Rational,
    pub dead_ends: usize,
    pub prefix: usize,
    pub suffix: usize,
    pub tag: String,
}

impl BlockSpec {
    pub fn type1(u: &str, v: &str, p: usize, c: Rational) -> BlockSpec {
        BlockSpec {
            u: u.into(),
            v: v.into(),
            p,
            c,
            dead_ends: 0,
            prefix: 0,
            suffix: 0,
            tag: format!("{u}.{v}"),
        }
    }

    pub fn type2(u: &str, v: &str, p: usize, c: Rational, dead_ends: usize, branches: usize) -> BlockSpec {
        BlockSpec { dead_ends, prefix: branches, suffix: branches, ..BlockSpec::type1(u, v, p, c) }
    }

    pub fn with_tag(mut self, tag: impl Into<String>) -> BlockSpec {
        self.tag = tag.into();
        self
    }

    fn check_c(&self) -> Result<(), Error> {
        if self.c <= Rational::zero() || self.c >= Rational::one() {
            return Err(Error::Domain("block probability c must lie strictly between 0 and 1".into()));
        }
        Ok(())
    }
}

fn elementary(tid: &mut Tid, symbols: &[String], a: &str, b: &str, c: &Rational) -> Result<(), Error> {
    for s in symbols {
        tid.set(VarId::binary(s, a, b), c.clone())?;
    }
    Ok(())
}

/// The path block `u = r₀ − t₁ − r₁ − … − t_p − r_p = v` for type-I
/// queries. Both endpoints are left constants; every path tuple, every
/// `R(rᵢ)` and every `T(tᵢ)` has probability `c`.
pub fn build_zigzag_block(symbols: &[String], spec: &BlockSpec) -> Result<Tid, Error> {
    spec.check_c()?;
    if spec.p == 0 {
        return Err(Error::Domain("a standalone block needs length at least 1".into()));
    }
    if spec.u == spec.v {
        return Err(Error::Domain("block endpoints must differ".into()));
    }
    let mut tid = Tid::new(true);
    let p = spec.p;
    let r: Vec<String> = (0..=p)
        .map(|k| match k {
            0 => spec.u.clone(),
            k if k == p => spec.v.clone(),
            k => format!("r{k}@{}", spec.tag),
        })
        .collect();
    let t: Vec<String> = (1..=p).map(|k| format!("t{k}@{}", spec.tag)).collect();
    for x in &r {
        tid.add_left(x.clone())?;
        tid.set(VarId::unary(R, x), spec.c.clone())?;
    }
    for (k, y) in t.iter().enumerate() {
        tid.add_right(y.clone())?;
        tid.set(VarId::unary(T, y), spec.c.clone())?;
        elementary(&mut tid, symbols, &r[k], y, &spec.c)?;
        elementary(&mut tid, symbols, &r[k + 1], y, &spec.c)?;
    }
    Ok(tid)
}

/// Type-I blocks of the given lengths in parallel, sharing only `u`, `v`.
pub fn build_parallel_block(symbols: &[String], u: &str, v: &str, params: &[usize], c: &Rational) -> Result<Tid, Error> {
    if params.is_empty() {
        return Err(Error::Domain("parallel block needs at least one branch".into()));
    }
    let mut tid = Tid::new(true);
    for (i, &p) in params.iter().enumerate() {
        let spec = BlockSpec::type1(u, v, p, c.clone()).with_tag(format!("{u}.{v}.b{}", i + 1));
        tid.merge(&build_zigzag_block(symbols, &spec)?)?;
    }
    Ok(tid)
}

/// Graph-indexed database: nodes `u1..un`, one parallel block with
/// lengths `(p1, p2)` per directed edge, and optionally a pendant block
/// of length `t` from every node `ui` to a fresh node `ui'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphSpec {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
    pub p1: usize,
    pub p2: usize,
    pub pendant: Option<usize>,
    pub c: Rational,
}

impl GraphSpec {
    pub fn node(i: usize) -> String {
        format!("u{i}")
    }

    pub fn pendant_node(i: usize) -> String {
        format!("u{i}'")
    }

    pub fn check(&self) -> Result<(), Error> {
        let mut seen = BTreeSet::new();
        for &(i, j) in &self.edges {
            if i == 0 || j == 0 || i > self.n || j > self.n || i == j {
                return Err(Error::Domain(format!("bad edge ({i},{j}) for {} nodes", self.n)));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Domain(format!("edge ({i},{j}) repeated or reversed")));
            }
        }
        Ok(())
    }
}

pub fn build_graph_tid(symbols: &[String], g: &GraphSpec) -> Result<Tid, Error> {
    g.check()?;
    let mut tid = Tid::new(true);
    for i in 1..=g.n {
        tid.add_left(GraphSpec::node(i))?;
        tid.set(VarId::unary(R, &GraphSpec::node(i)), g.c.clone())?;
    }
    for &(i, j) in &g.edges {
        tid.merge(&build_parallel_block(symbols, &GraphSpec::node(i), &GraphSpec::node(j), &[g.p1, g.p2], &g.c)?)?;
    }
    if let Some(t) = g.pendant {
        for i in 1..=g.n {
            let spec = BlockSpec::type1(&GraphSpec::node(i), &GraphSpec::pendant_node(i), t, g.c.clone());
            tid.merge(&build_zigzag_block(symbols, &spec)?)?;
        }
    }
    Ok(tid)
}

/// The type-II block `B⁽ᵖ⁾(u,v)`, `u` a left and `v` a right constant:
/// prefix branches `u − tp_i − r₀`, the zig-zag `r₀ t₀ r₁ t₁ … r_p t_p`
/// of `2p+1` elementary blocks, suffix branches `t_p − rs_i − v`, and
/// `dead_ends` dead-end branches at every introduced constant.
pub fn build_type2_block(symbols: &[String], spec: &BlockSpec) -> Result<Tid, Error> {
    spec.check_c()?;
    let tag = &spec.tag;
    let c = &spec.c;
    let mut tid = Tid::new(true);
    tid.add_left(spec.u.clone())?;
    tid.add_right(spec.v.clone())?;
    let r: Vec<String> = (0..=spec.p)
        .map(|i| if i == 0 && spec.prefix == 0 { spec.u.clone() } else { format!("r{i}@{tag}") })
        .collect();
    let t: Vec<String> = (0..=spec.p)
        .map(|i| if i == spec.p && spec.suffix == 0 { spec.v.clone() } else { format!("t{i}@{tag}") })
        .collect();
    let tp: Vec<String> = (1..=spec.prefix).map(|i| format!("tp{i}@{tag}")).collect();
    let rs: Vec<String> = (1..=spec.suffix).map(|i| format!("rs{i}@{tag}")).collect();
    for x in r.iter().chain(&rs) {
        tid.add_left(x.clone())?;
    }
    for y in t.iter().chain(&tp) {
        tid.add_right(y.clone())?;
    }
    for y in &tp {
        elementary(&mut tid, symbols, &spec.u, y, c)?;
        elementary(&mut tid, symbols, &r[0], y, c)?;
    }
    elementary(&mut tid, symbols, &r[0], &t[0], c)?;
    for i in 1..=spec.p {
        elementary(&mut tid, symbols, &r[i], &t[i - 1], c)?;
        elementary(&mut tid, symbols, &r[i], &t[i], c)?;
    }
    for x in &rs {
        elementary(&mut tid, symbols, x, &t[spec.p], c)?;
        elementary(&mut tid, symbols, x, &spec.v, c)?;
    }
    let lefts: Vec<String> = r.iter().chain(&rs).filter(|x| **x != spec.u).cloned().collect();
    let rights: Vec<String> = t.iter().chain(&tp).filter(|y| **y != spec.v).cloned().collect();
    for x in lefts.iter().chain(r.iter().filter(|x| **x == spec.u)) {
        for j in 1..=spec.dead_ends {
            let e = format!("e{j}-{x}");
            let e = if e.contains('@') { e } else { format!("{e}@{tag}") };
            tid.add_right(e.clone())?;
            elementary(&mut tid, symbols, x, &e, c)?;
        }
    }
    for y in rights.iter().chain(t.iter().filter(|y| **y == spec.v)) {
        for j in 1..=spec.dead_ends {
            let f = format!("f{j}-{y}");
            let f = if f.contains('@') { f } else { format!("{f}@{tag}") };
            tid.add_left(f.clone())?;
            elementary(&mut tid, symbols, &f, y, c)?;
        }
    }
    Ok(tid)
}

/// The database `zg Δ′` together with the correspondence from its
/// non-trivial tuples to tuples of `Δ′`.
#[derive(Clone, Debug)]
pub struct ZgDatabase {
    pub tid: Tid,
    pub bijection: BTreeMap<VarId, VarId>,
}

/// Transports a database over the vocabulary of `zigzag_query(q)` to a
/// database over the vocabulary of `q`.
pub fn zg_database(source: &Tid, q: &Query) -> Result<ZgDatabase, Error> {
    let q = minimize_query(q);
    let n = zigzag_branching(&q);
    let syms: Vec<String> = q.binary_symbols().into_iter().collect();
    let mut vocab: BTreeSet<String> = [R.to_string(), T.to_string(), ZG_T12.to_string()].into();
    for i in 2..n {
        vocab.insert(zg_r(i));
    }
    for s in &syms {
        for i in 1..=n {
            vocab.insert(zg_s(s, i));
        }
    }
    for v in source.probs.keys() {
        let (sym, _) = v.parts();
        if !vocab.contains(sym) {
            return Err(Error::Domain(format!("tuple {v} is outside the zig-zag vocabulary")));
        }
    }
    let mut tid = Tid::new(true);
    let mut bijection = BTreeMap::new();
    let mut map = |tid: &mut Tid, target: VarId, image: VarId| -> Result<(), Error> {
        tid.set(target.clone(), source.prob(&image))?;
        bijection.insert(target, image);
        Ok(())
    };
    for u in &source.left {
        tid.add_left(u.clone())?;
    }
    for v in &source.right {
        tid.add_left(v.clone())?;
    }
    for u in &source.left {
        map(&mut tid, VarId::unary(R, u), VarId::unary(R, u))?;
    }
    for v in &source.right {
        map(&mut tid, VarId::unary(R, v), VarId::unary(T, v))?;
    }
    for u in &source.left {
        for v in &source.right {
            let e = format!("e@{u}.{v}");
            tid.add_right(e.clone())?;
            map(&mut tid, VarId::unary(T, &e), VarId::binary(ZG_T12, u, v))?;
            for s in &syms {
                map(&mut tid, VarId::binary(s, u, &e), VarId::binary(&zg_s(s, 1), u, v))?;
                map(&mut tid, VarId::binary(s, v, &e), VarId::binary(&zg_s(s, n), u, v))?;
            }
            for i in 2..n {
                let f = format!("f{i}@{u}.{v}");
                tid.add_left(f.clone())?;
                map(&mut tid, VarId::unary(R, &f), VarId::binary(&zg_r(i), u, v))?;
                for s in &syms {
                    map(&mut tid, VarId::binary(s, &f, &e), VarId::binary(&zg_s(s, i), u, v))?;
                }
            }
        }
    }
    Ok(ZgDatabase { tid, bijection })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::half;

    fn s1() -> Vec<String> {
        vec!["S".to_string()]
    }

    fn count_s(t: &Tid) -> usize {
        t.probs.keys().filter(|v| v.parts().0 == "S").count()
    }

    #[test]
    fn zigzag_shapes() {
        let b1 = build_zigzag_block(&s1(), &BlockSpec::type1("u", "v", 1, half())).unwrap();
        assert_eq!(b1.left, vec!["u", "v"]);
        assert_eq!(b1.right.len(), 1);
        assert_eq!(count_s(&b1), 2);
        let b3 = build_zigzag_block(&s1(), &BlockSpec::type1("u", "v", 3, half())).unwrap();
        assert_eq!(count_s(&b3), 6);
        assert_eq!(b3.left.len(), 4);
        assert!(build_zigzag_block(&s1(), &BlockSpec::type1("u", "v", 0, half())).is_err());
    }

    #[test]
    fn parallel_branches_share_endpoints_only() {
        let b = build_parallel_block(&s1(), "u", "v", &[1, 1], &half()).unwrap();
        assert_eq!(b.left, vec!["u", "v"]);
        assert_eq!(b.right.len(), 2);
        assert_eq!(count_s(&b), 4);
    }

    #[test]
    fn graph_block_count() {
        let g = GraphSpec { n: 2, edges: vec![(1, 2)], p1: 1, p2: 2, pendant: Some(1), c: half() };
        let t = build_graph_tid(&s1(), &g).unwrap();
        assert_eq!(count_s(&t), 2 + 4 + 2 + 2);
        let bad = GraphSpec { edges: vec![(1, 2), (2, 1)], ..g };
        assert!(build_graph_tid(&s1(), &bad).is_err());
    }

    #[test]
    fn type2_shapes() {
        let syms = vec!["S1".to_string(), "S2".to_string()];
        let b = build_type2_block(&syms, &BlockSpec::type2("u", "v", 1, half(), 0, 1)).unwrap();
        // prefix 2 + zig-zag 3 + suffix 2 elementary blocks
        assert_eq!(b.probs.len(), 7 * 2);
        let d = build_type2_block(&syms, &BlockSpec::type2("u", "v", 1, half(), 1, 1)).unwrap();
        // dead ends at r0, r1, rs1 and at t0, t1, tp1
        assert_eq!(d.probs.len(), (7 + 6) * 2);
        let z = build_type2_block(&syms, &BlockSpec::type2("u", "v", 0, half(), 0, 0)).unwrap();
        assert_eq!(z.left, vec!["u"]);
        assert_eq!(z.right, vec!["v"]);
    }
}
