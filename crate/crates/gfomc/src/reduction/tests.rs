use super::*;
use crate::exactla::{half, rat};
use crate::lineage::{pr_exact, PendantMode};
use crate::query::parse_query;
use crate::tid::build_graph_tid;
use proptest::prelude::*;

const Q_STAR: &str = "forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))";
const CHAIN: &str = "forall x forall y (R(x) | S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y)) & forall x forall y (S2(x,y) | T(y))";

fn phi(n: usize, edges: &[(usize, usize)]) -> P2cnf {
    P2cnf::new(n, edges.to_vec()).unwrap()
}

#[test]
fn brute_counts() {
    assert_eq!(brute_p2cnf(&phi(2, &[(1, 2)])).unwrap(), BigInt::from(3));
    assert_eq!(brute_p2cnf(&phi(3, &[(1, 2), (2, 3)])).unwrap(), BigInt::from(5));
    assert_eq!(brute_p2cnf(&phi(3, &[])).unwrap(), BigInt::from(8));
}

#[test]
fn signatures() {
    let f = phi(3, &[(1, 2), (2, 3)]);
    assert_eq!(signature_of(&f, 0b010), Signature { k00: 0, k01: 2, k11: 0, q0: 2, q1: 1 });
    let t = brute_signatures(&f).unwrap();
    assert_eq!(t.total(), BigInt::from(8));
    assert_eq!(t.phi_count(), brute_p2cnf(&f).unwrap());
}

#[test]
fn p2cnf_format() {
    let f: P2cnf = "c comment\np2cnf 3 2\n1 2\n2 3\n".parse().unwrap();
    assert_eq!(f, phi(3, &[(1, 2), (2, 3)]));
    assert_eq!(f.to_string().parse::<P2cnf>().unwrap(), f);
    assert!("p2cnf 2 1\n1 2\n2 1\n".parse::<P2cnf>().is_err());
    assert!("p2cnf 2 2\n1 2\n2 1\n".parse::<P2cnf>().is_err());
    assert!("p2cnf 2 1\n1 1\n".parse::<P2cnf>().is_err());
    assert!("p2cnf 2 1\n1 3\n".parse::<P2cnf>().is_err());
    let g: Pp2cnf = "pp2cnf 2 1 2\n1 1\n2 1\n".parse().unwrap();
    assert_eq!(g.to_string().parse::<Pp2cnf>().unwrap(), g);
}

#[test]
fn pipeline_small_examples() {
    let q = parse_query(Q_STAR).unwrap();
    let r = type1_pipeline(&q, &phi(2, &[(1, 2)]), &half(), PendantMode::Semantic).unwrap();
    assert_eq!(r.phi_count, BigInt::from(3));
    let f = phi(3, &[(1, 2), (2, 3)]);
    let r = type1_pipeline(&q, &f, &half(), PendantMode::Semantic).unwrap();
    assert_eq!(r.phi_count, BigInt::from(5));
    assert_eq!(r.table, brute_signatures(&f).unwrap());
    let r = type1_pipeline(&q, &phi(3, &[]), &half(), PendantMode::Semantic).unwrap();
    assert_eq!(r.phi_count, BigInt::from(8));
    assert_eq!(r.table, brute_signatures(&phi(3, &[])).unwrap());
}

#[test]
fn pipeline_paper_sum_mode() {
    let q = parse_query(Q_STAR).unwrap();
    let f = phi(3, &[(1, 2), (1, 3)]);
    let r = type1_pipeline(&q, &f, &half(), PendantMode::PaperSum).unwrap();
    assert_eq!(r.table, brute_signatures(&f).unwrap());
}

#[test]
fn paper_sum_degenerates_at_one_third() {
    let q = parse_query(Q_STAR).unwrap();
    let f = phi(3, &[(1, 2), (1, 3)]);
    let err = type1_pipeline(&q, &f, &rat(1, 3), PendantMode::PaperSum).unwrap_err();
    assert!(matches!(err, Error::Singular { .. }));
    let r = type1_pipeline(&q, &f, &rat(1, 3), PendantMode::Semantic).unwrap();
    assert_eq!(r.table, brute_signatures(&f).unwrap());
}

#[test]
fn pipeline_oracle_matches_lineage() {
    let q = parse_query(Q_STAR).unwrap();
    let f = phi(2, &[(1, 2)]);
    let syms = vec!["S".to_string()];
    let mut oracle = |g: &crate::tid::GraphSpec| pr_exact(&q, &build_graph_tid(&syms, g)?);
    let r = type1_pipeline_with(&q, &f, &half(), PendantMode::Semantic, &mut oracle).unwrap();
    assert_eq!(r.table, brute_signatures(&f).unwrap());
}

#[test]
fn pipeline_chain_query() {
    let q = parse_query(CHAIN).unwrap();
    let f = phi(3, &[(1, 2), (2, 3), (3, 1)]);
    let r = type1_pipeline(&q, &f, &half(), PendantMode::Semantic).unwrap();
    assert_eq!(r.table, brute_signatures(&f).unwrap());
}

#[test]
fn ccp_single_edge() {
    let c = ccp_brute(1, 1, &[(1, 1)], 2, 2).unwrap();
    assert_eq!(c.counts.len(), 4);
    assert_eq!(c.total(), BigInt::from(4));
    let c = ccp_brute(2, 1, &[], 2, 3).unwrap();
    assert_eq!(c.total(), BigInt::from(12));
    for sig in c.counts.keys() {
        for a in 0..2 {
            for b in 0..3 {
                assert_eq!(CcpCounts::entry(sig, 3, a, b), 0);
            }
        }
    }
}

#[test]
fn pp2cnf_examples() {
    let one: Pp2cnf = "pp2cnf 1 1 1\n1 1\n".parse().unwrap();
    assert_eq!(pp2cnf_via_ccp(&one, 2, 2).unwrap(), BigInt::from(3));
    let two: Pp2cnf = "pp2cnf 1 2 2\n1 1\n1 2\n".parse().unwrap();
    assert_eq!(pp2cnf_via_ccp(&two, 2, 2).unwrap(), BigInt::from(5));
    let none = Pp2cnf::new(1, 1, vec![]).unwrap();
    assert_eq!(pp2cnf_via_ccp(&none, 3, 3).unwrap(), BigInt::from(4));
}

fn arb_p2cnf() -> impl Strategy<Value = P2cnf> {
    (2usize..=4).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
        let len = pairs.len();
        (Just(n), proptest::sample::subsequence(pairs, 0..=len.min(4)), proptest::collection::vec(any::<bool>(), 4)).prop_map(
            |(n, es, flips)| P2cnf::new(n, es.into_iter().zip(flips).map(|((i, j), f)| if f { (j, i) } else { (i, j) }).collect()).unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn pipeline_recovers_table(f in arb_p2cnf()) {
        let q = parse_query(Q_STAR).unwrap();
        let r = type1_pipeline(&q, &f, &half(), PendantMode::Semantic).unwrap();
        prop_assert_eq!(&r.table, &brute_signatures(&f).unwrap());
        prop_assert_eq!(r.phi_count, brute_p2cnf(&f).unwrap());
    }

    #[test]
    fn ccp_matches_brute(nx in 1usize..=3, ny in 1usize..=3, bits in 0u32..512) {
        let edges: Vec<(usize, usize)> = (0..nx * ny).filter(|k| bits >> k & 1 == 1).map(|k| (k / ny + 1, k % ny + 1)).collect();
        let f = Pp2cnf::new(nx, ny, edges).unwrap();
        prop_assert_eq!(pp2cnf_via_ccp(&f, 2, 2).unwrap(), brute_pp2cnf(&f).unwrap());
    }
}
