use super::*;
use crate::blocks::a1_matrix;
use crate::exactla::{half, rat};
use crate::formula::weighted_count_enum;
use crate::query::{parse_query, TypeTwo};
use crate::tid::{build_graph_tid, build_type2_block, build_zigzag_block, BlockSpec};

const Q_STAR: &str = "forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))";
pub(crate) const FORBIDDEN: &str = "forall x (forall y (S1(x,y) | U(x,y)) | forall y (S2(x,y) | U(x,y))) & forall x forall y (S1(x,y) | S2(x,y) | S3(x,y) | S4(x,y)) & forall y (forall x (S3(x,y) | V(x,y)) | forall x (S4(x,y) | V(x,y)))";

fn single(s: Rational) -> Tid {
    let mut t = Tid::new(true);
    t.add_left("a").unwrap();
    t.add_right("b").unwrap();
    t.set(VarId::unary(R, "a"), half()).unwrap();
    t.set(VarId::unary(T, "b"), half()).unwrap();
    t.set(VarId::binary("S", "a", "b"), s).unwrap();
    t
}

#[test]
fn q_star_single_pair() {
    let q = parse_query(Q_STAR).unwrap();
    assert_eq!(pr_exact(&q, &single(half())).unwrap(), rat(5, 8));
    assert_eq!(pr_exact(&q, &single(Rational::zero())).unwrap(), rat(1, 4));
    assert_eq!(count_worlds(&q, &single(half())).unwrap(), BigInt::from(5));
}

#[test]
fn lineage_agrees_with_enumeration() {
    let q = parse_query(Q_STAR).unwrap();
    let block = build_zigzag_block(&["S".into()], &BlockSpec::type1("u", "v", 2, rat(1, 3))).unwrap();
    let f = ground_lineage(&q, &block);
    let p = block.free_probs();
    assert_eq!(weighted_count(&f, &p).unwrap(), weighted_count_enum(&f, &p).unwrap());
}

#[test]
fn restricted_block_is_symmetric() {
    let q = parse_query(Q_STAR).unwrap();
    for p in 1..=3 {
        let block = build_zigzag_block(&["S".into()], &BlockSpec::type1("u", "v", p, rat(2, 5))).unwrap();
        let probs = block.free_probs();
        let y01 = weighted_count(&restricted_lineage(&q, &block, "u", "v", false, true).unwrap(), &probs).unwrap();
        let y10 = weighted_count(&restricted_lineage(&q, &block, "u", "v", true, false).unwrap(), &probs).unwrap();
        assert_eq!(y01, y10);
    }
    let block = build_zigzag_block(&["S".into()], &BlockSpec::type1("u", "v", 1, half())).unwrap();
    assert!(restricted_lineage(&q, &block, "u", "t1@u.v", true, true).is_err());
}

#[test]
fn structured_probability_matches_lineage() {
    let q = parse_query(Q_STAR).unwrap();
    for (c, pendant) in [(half(), None), (half(), Some(1)), (rat(1, 3), Some(2))] {
        let g = GraphSpec { n: 3, edges: vec![(1, 2), (2, 3)], p1: 1, p2: 2, pendant, c: c.clone() };
        let tid = build_graph_tid(&["S".into()], &g).unwrap();
        let a1 = a1_matrix(&q, &c).unwrap();
        let bv = BlockValues::from_a1(&a1, &c, (1, 2), pendant, PendantMode::Semantic).unwrap();
        assert_eq!(pr_structured(&g, &bv).unwrap(), pr_exact(&q, &tid).unwrap(), "c = {c}, pendant = {pendant:?}");
    }
}

#[test]
fn structured_rejects_mismatched_values() {
    let q = parse_query(Q_STAR).unwrap();
    let a1 = a1_matrix(&q, &half()).unwrap();
    let bv = BlockValues::from_a1(&a1, &half(), (1, 1), None, PendantMode::Semantic).unwrap();
    let g = GraphSpec { n: 2, edges: vec![(1, 2)], p1: 1, p2: 1, pendant: Some(1), c: half() };
    assert!(pr_structured(&g, &bv).is_err());
    let g = GraphSpec { n: 2, edges: vec![(1, 2)], p1: 1, p2: 1, pendant: None, c: rat(1, 3) };
    assert!(pr_structured(&g, &bv).is_err());
}

fn type2_symbols(tt: &TypeTwo) -> Vec<String> {
    tt.query.binary_symbols().into_iter().collect()
}

fn t2_block(tt: &TypeTwo, u: &str, v: &str, p: usize) -> Tid {
    let spec = BlockSpec::type2(u, v, p, half(), 0, 0).with_tag(format!("{u}.{v}"));
    build_type2_block(&type2_symbols(tt), &spec).unwrap()
}

#[test]
fn mobius_matches_lineage_on_small_graphs() {
    let tt = TypeTwo::new(&parse_query(FORBIDDEN).unwrap()).unwrap();
    let mut g = Type2Graph { u_nodes: vec!["a".into()], v_nodes: vec!["b".into()], ..Default::default() };
    g.blocks.insert(("a".into(), "b".into()), t2_block(&tt, "a", "b", 0));
    assert_eq!(pr_mobius(&tt, &g).unwrap(), pr_exact(&tt.query, &g.tid().unwrap()).unwrap());

    g.blocks.insert(("a".into(), "b".into()), t2_block(&tt, "a", "b", 1));
    assert_eq!(pr_mobius(&tt, &g).unwrap(), pr_exact(&tt.query, &g.tid().unwrap()).unwrap());

    g.u_nodes.push("a2".into());
    g.blocks.insert(("a2".into(), "b".into()), t2_block(&tt, "a2", "b", 0));
    assert_eq!(pr_mobius(&tt, &g).unwrap(), pr_exact(&tt.query, &g.tid().unwrap()).unwrap());
}

#[test]
fn mobius_pendant_sign() {
    let tt = TypeTwo::new(&parse_query(FORBIDDEN).unwrap()).unwrap();
    let mut g = Type2Graph { u_nodes: vec!["a".into()], v_nodes: vec!["b".into()], ..Default::default() };
    g.blocks.insert(("a".into(), "b".into()), t2_block(&tt, "a", "b", 0));
    g.u_pendants.insert("a".into(), ("a'".into(), t2_block(&tt, "a", "a'", 0)));
    g.v_pendants.insert("b".into(), ("b'".into(), t2_block(&tt, "b'", "b", 0)));
    assert_eq!(pr_mobius(&tt, &g).unwrap(), pr_exact(&tt.query, &g.tid().unwrap()).unwrap());
}

#[test]
fn pendant_mode_parses() {
    assert_eq!("semantic".parse::<PendantMode>().unwrap(), PendantMode::Semantic);
    assert_eq!("paper-sum".parse::<PendantMode>().unwrap(), PendantMode::PaperSum);
    assert!("other".parse::<PendantMode>().is_err());
}

fn zg_source(z: &Query, left: &[&str], right: &[&str]) -> Tid {
    let mut t = Tid::new(true);
    for a in left {
        t.add_left(*a).unwrap();
    }
    for b in right {
        t.add_right(*b).unwrap();
    }
    let probs = [rat(1, 2), rat(1, 3), rat(2, 3), rat(1, 4)];
    let mut k = 0;
    let mut next = || {
        k += 1;
        probs[k % probs.len()].clone()
    };
    for a in left {
        t.set(VarId::unary(R, a), next()).unwrap();
    }
    for b in right {
        t.set(VarId::unary(T, b), next()).unwrap();
    }
    for s in z.binary_symbols() {
        for a in left {
            for b in right {
                t.set(VarId::binary(&s, a, b), next()).unwrap();
            }
        }
    }
    t
}

#[test]
fn zigzag_database_transports_lineage() {
    let texts = [Q_STAR, "forall x forall y (R(x) | S1(x,y)) & forall y (forall x (S1(x,y) | S2(x,y)) | forall x (S3(x,y)))"];
    for text in texts {
        let q = parse_query(text).unwrap();
        let z = crate::query::zigzag_query(&q).unwrap();
        for (left, right) in [(&["a"][..], &["b"][..]), (&["a", "a2"][..], &["b"][..])] {
            let src = zg_source(&z, left, right);
            let zg = crate::tid::zg_database(&src, &q).unwrap();
            let lhs = ground_lineage(&z, &src);
            let inverse: std::collections::BTreeMap<VarId, VarId> = zg.bijection.iter().map(|(k, v)| (v.clone(), k.clone())).collect();
            let rhs = ground_lineage(&q, &zg.tid);
            assert_eq!(lhs.rename(|v| inverse[v].clone()), rhs, "{text}");
            assert_eq!(pr_exact(&z, &src).unwrap(), pr_exact(&q, &zg.tid).unwrap(), "{text}");
        }
    }
}
