use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use gfomc::exactla::{gauss_solve_many, rat, RatMatrix, Rational};
use gfomc::formula::{arithmetize, model_count, model_count_enum, weighted_count, weighted_count_enum, CnfFormula, ProbMap, VarId};
use gfomc::lineage::{ground_lineage, pr_exact};
use gfomc::query::{minimize_query, parse_query};
use gfomc::tid::parse_tid;
use num_traits::{One, Zero};

fn matrix(n: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(prop::collection::vec(-4i64..=4, n), n)
        .prop_map(|rows| RatMatrix::from_rows(rows.into_iter().map(|r| r.into_iter().map(|x| rat(x, 1)).collect()).collect()).unwrap())
}

fn var(i: usize) -> VarId {
    VarId::new(format!("x{i}"))
}

fn cnf() -> impl Strategy<Value = CnfFormula> {
    prop::collection::vec(prop::collection::btree_set(0usize..7, 1..=3), 1..=6)
        .prop_map(|cs| CnfFormula::new(cs.into_iter().map(|c| c.into_iter().map(var).collect::<Vec<_>>())))
}

fn probs() -> impl Strategy<Value = ProbMap> {
    prop::collection::vec((1i64..8, 8i64..=9), 7).prop_map(|ps| ps.into_iter().enumerate().map(|(i, (n, d))| (var(i), rat(n, d))).collect())
}

/// Bipartite query text from clause shapes: left clauses carry R(x), right
/// clauses carry T(y), every clause has at least one binary symbol.
fn query_text() -> impl Strategy<Value = String> {
    let clause = (0u8..3, prop::collection::btree_set(1u8..=3, 1..=2));
    prop::collection::vec(clause, 1..=4).prop_map(|cs| {
        cs.into_iter()
            .map(|(kind, ss)| {
                let mut atoms: Vec<String> = ss.into_iter().map(|s| format!("S{s}(x,y)")).collect();
                match kind {
                    0 => atoms.insert(0, "R(x)".into()),
                    1 => atoms.push("T(y)".into()),
                    _ => {}
                }
                format!("forall x forall y ({})", atoms.join(" | "))
            })
            .collect::<Vec<_>>()
            .join(" & ")
    })
}

fn tid_text(ps: &[(i64, i64)]) -> String {
    let mut s = String::from("domain left: a b\ndomain right: c\ndefault 1\n");
    let atoms = ["R(a)", "R(b)", "T(c)", "S1(a,c)", "S1(b,c)", "S2(a,c)", "S2(b,c)", "S3(a,c)", "S3(b,c)"];
    for (atom, (n, d)) in atoms.iter().zip(ps) {
        s.push_str(&format!("tuple {atom} {n}/{d}\n"));
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solve_many_reproduces_rhs(a in matrix(4), b in matrix(4)) {
        let det = a.det().unwrap();
        match gauss_solve_many(&a, &b) {
            Ok((x, d)) => {
                prop_assert_eq!(&d, &det);
                prop_assert_eq!(a.mul(&x).unwrap(), b);
            }
            Err(_) => prop_assert!(det.is_zero()),
        }
    }

    #[test]
    fn det_is_multiplicative(a in matrix(3), b in matrix(3)) {
        prop_assert_eq!(a.mul(&b).unwrap().det().unwrap(), a.det().unwrap() * b.det().unwrap());
    }

    #[test]
    fn inverse_is_two_sided(a in matrix(3)) {
        if let Ok(inv) = a.inverse() {
            prop_assert_eq!(a.mul(&inv).unwrap(), RatMatrix::identity(3));
            prop_assert_eq!(inv.mul(&a).unwrap(), RatMatrix::identity(3));
        } else {
            prop_assert!(a.det().unwrap().is_zero());
        }
    }

    #[test]
    fn weighted_count_matches_enumeration(f in cnf(), p in probs()) {
        prop_assert_eq!(weighted_count(&f, &p).unwrap(), weighted_count_enum(&f, &p).unwrap());
    }

    #[test]
    fn arithmetization_is_probability(f in cnf(), p in probs()) {
        let point: BTreeMap<VarId, Rational> = p.clone();
        prop_assert_eq!(arithmetize(&f).unwrap().eval(&point).unwrap(), weighted_count(&f, &p).unwrap());
    }

    #[test]
    fn model_count_matches_enumeration(f in cnf()) {
        let universe: BTreeSet<VarId> = (0..7).map(var).collect();
        prop_assert_eq!(model_count(&f, &universe).unwrap(), model_count_enum(&f, &universe).unwrap());
    }

    #[test]
    fn query_display_round_trips(text in query_text()) {
        let q = parse_query(&text).unwrap();
        prop_assert_eq!(parse_query(&q.to_string()).unwrap(), q);
    }

    #[test]
    fn minimization_is_idempotent_and_equivalent(text in query_text(), ps in prop::collection::vec((1i64..4, 4i64..=5), 9)) {
        let q = parse_query(&text).unwrap();
        let m = minimize_query(&q);
        prop_assert_eq!(minimize_query(&m), m.clone());
        let db = parse_tid(&tid_text(&ps)).unwrap();
        prop_assert_eq!(pr_exact(&q, &db).unwrap(), pr_exact(&m, &db).unwrap());
    }

    #[test]
    fn pr_exact_matches_world_enumeration(text in query_text(), ps in prop::collection::vec((1i64..4, 4i64..=5), 9)) {
        let q = parse_query(&text).unwrap();
        let db = parse_tid(&tid_text(&ps)).unwrap();
        let lineage = ground_lineage(&q, &db);
        let tuples: Vec<(VarId, Rational)> = db.free_probs().into_iter().collect();
        let mut total = Rational::zero();
        for w in 0u32..(1 << tuples.len()) {
            let mut weight = Rational::one();
            let mut world = BTreeSet::new();
            for (i, (v, p)) in tuples.iter().enumerate() {
                if w >> i & 1 == 1 {
                    weight *= p;
                    world.insert(v.clone());
                } else {
                    weight *= Rational::one() - p;
                }
            }
            if lineage.eval(&world) {
                total += weight;
            }
        }
        prop_assert_eq!(pr_exact(&q, &db).unwrap(), total);
    }
}
