use super::*;
use crate::exactla::{half, rat};
use crate::formula::connectivity;
use crate::lineage::{ground_lineage, restricted_lineage_t2};
use crate::query::parse_query;
use proptest::prelude::*;

const Q_STAR: &str = "forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))";
const CHAIN: &str = "forall x forall y (R(x) | S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y)) & forall x forall y (S2(x,y) | T(y))";
const FORBIDDEN: &str = "forall x (forall y (S1(x,y) | U(x,y)) | forall y (S2(x,y) | U(x,y))) & forall x forall y (S1(x,y) | S2(x,y) | S3(x,y) | S4(x,y)) & forall y (forall x (S3(x,y) | V(x,y)) | forall x (S4(x,y) | V(x,y)))";

fn m(rows: &[&[(i64, i64)]]) -> RatMatrix {
    RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&(a, b)| rat(a, b)).collect()).collect()).unwrap()
}

fn q_star() -> Query {
    parse_query(Q_STAR).unwrap()
}

#[test]
fn a1_and_a2_for_q_star() {
    let a1 = a1_matrix(&q_star(), &half()).unwrap();
    assert_eq!(a1, m(&[&[(1, 4), (3, 8)], &[(3, 8), (5, 8)]]));
    assert_eq!(a1.det().unwrap(), rat(1, 64));
    let a2 = ap_matrix(&a1, &half(), 2).unwrap();
    assert_eq!(a2, m(&[&[(13, 128), (21, 128)], &[(21, 128), (17, 64)]]));
    assert_eq!(ap_matrix(&a1, &half(), 0).unwrap(), RatMatrix::identity(2));
    for p in 1..=4 {
        assert!(!ap_matrix(&a1, &half(), p).unwrap().det().unwrap().is_zero());
    }
}

#[test]
fn matrix_power_matches_block_lineage() {
    for text in [Q_STAR, CHAIN] {
        let q = parse_query(text).unwrap();
        for c in [half(), rat(1, 3)] {
            let a1 = a1_matrix(&q, &c).unwrap();
            for p in 1..=3 {
                assert_eq!(ap_matrix(&a1, &c, p).unwrap(), brute_z(&q, &c, p).unwrap(), "{text} c={c} p={p}");
            }
        }
    }
}

#[test]
fn block_lineage_is_connected() {
    for text in [Q_STAR, CHAIN] {
        let q = parse_query(text).unwrap();
        let syms: Vec<String> = q.binary_symbols().into_iter().collect();
        for p in 1..=3 {
            let block = build_zigzag_block(&syms, &BlockSpec::type1("u", "v", p, half())).unwrap();
            assert_eq!(connectivity(&ground_lineage(&q, &block)).len(), 1);
        }
    }
}

#[test]
fn design_report_for_q_star() {
    let r = design_report(&q_star(), &half()).unwrap();
    assert!(r.passes(), "{:?}", r.failures);
    assert_eq!(r.b, m(&[&[(1, 8), (3, 16)], &[(3, 16), (5, 16)]]));
    assert_eq!(r.eigen.trace, rat(7, 16));
    assert_eq!(r.eigen.det, rat(1, 256));
    assert_eq!(r.eigen.disc, rat(45, 256));
    let fa = r.fa_form.unwrap();
    assert!(fa.matches_product_form);
    assert_eq!(fa.vars, 3);
}

#[test]
fn design_report_for_chain() {
    let r = design_report(&parse_query(CHAIN).unwrap(), &half()).unwrap();
    assert!(r.passes(), "{:?}", r.failures);
    assert_eq!(r.cross_products_quad, r.cross_products_seq);
}

#[test]
fn design_report_rejects_type_two() {
    assert!(design_report(&parse_query(FORBIDDEN).unwrap(), &half()).is_err());
}

#[test]
fn pendant_values_and_matrix() {
    let a1 = a1_matrix(&q_star(), &half()).unwrap();
    assert_eq!(pendant_values(&a1, &half(), 1, PendantMode::PaperSum).unwrap(), (rat(5, 8), rat(1, 1)));
    for mode in [PendantMode::PaperSum, PendantMode::Semantic] {
        let pm = pendant_matrix(&a1, &half(), 2, mode, 0).unwrap();
        assert_eq!((pm.matrix.rows(), pm.matrix.cols()), (3, 3));
        assert!(!pm.det.is_zero());
        let distinct: std::collections::BTreeSet<_> = pm.quotients.iter().collect();
        assert_eq!(distinct.len(), pm.quotients.len());
    }
}

#[test]
fn grid_matrix_is_nonsingular() {
    let a1 = a1_matrix(&q_star(), &half()).unwrap();
    for m in 0..=2 {
        let g = grid_matrix(&a1, &half(), m).unwrap();
        assert_eq!(g.matrix.rows(), (m + 1) * (m + 1));
        assert!(!g.det.is_zero());
        assert_eq!(g.rows[0], (1, 1));
        assert!(g.rows.iter().all(|(a, b)| a <= b));
    }
}

#[test]
fn square_grid_repeats_rows() {
    let a1 = a1_matrix(&q_star(), &half()).unwrap();
    let y = |p| branch_values(&a1, &half(), p).unwrap();
    assert_eq!(grid_row(&y(1), &y(2), 2).unwrap(), grid_row(&y(2), &y(1), 2).unwrap());
}

#[test]
fn fa_vanishes_on_boolean_points() {
    let q = q_star();
    let syms: Vec<String> = q.binary_symbols().into_iter().collect();
    let block = build_zigzag_block(&syms, &BlockSpec::type1("u", "v", 1, half())).unwrap();
    let mut y: Vec<Poly> = Vec::new();
    for (a, b) in [(false, false), (false, true), (true, false), (true, true)] {
        y.push(arithmetize(&restricted_lineage(&q, &block, "u", "v", a, b).unwrap()).unwrap().to_poly());
    }
    let det = y[0].mul(&y[3]).sub(&y[1].mul(&y[2]));
    let vars: Vec<VarId> = det.vars().into_iter().collect();
    for bits in 0u32..1 << vars.len() {
        let pt = vars.iter().enumerate().map(|(i, v)| (v.clone(), Rational::from_integer(((bits >> i) & 1).into()))).collect();
        assert!(det.eval_full(&pt).unwrap().is_zero());
    }
    let interior = vars.iter().map(|v| (v.clone(), rat(1, 3))).collect();
    assert!(!det.eval_full(&interior).unwrap().is_zero());
}

#[test]
fn chain_eval_hand_products() {
    let one = Rational::one();
    let zero = Rational::zero();
    let id = RatMatrix::identity(2);
    assert_eq!(chain_eval(&[one.clone(), one.clone()], &[id], &[one.clone(), zero.clone()], &[half()]).unwrap(), half());
    assert_eq!(chain_eval(&[one.clone(), one.clone()], &[], &[zero.clone(), one.clone()], &[rat(1, 3)]).unwrap(), rat(1, 3));
    assert!(chain_eval(std::slice::from_ref(&one), &[], &[one.clone(), one.clone()], &[half()]).is_err());
    assert!(chain_eval(&[one.clone(), one.clone()], &[], &[one.clone(), one], &[]).is_err());
}

#[test]
fn chain_eval_reproduces_block_transfer() {
    let c = rat(1, 3);
    let a1 = a1_matrix(&q_star(), &c).unwrap();
    let a2 = ap_matrix(&a1, &c, 2).unwrap();
    let a3 = ap_matrix(&a1, &c, 3).unwrap();
    for a in 0..2 {
        for b in 0..2 {
            let e: Vec<Rational> = (0..2).map(|k| if k == b { Rational::one() } else { Rational::zero() }).collect();
            let two = chain_eval(a1.row(a), std::slice::from_ref(&a1), &e, std::slice::from_ref(&c)).unwrap();
            assert_eq!(two, a2[(a, b)]);
            let three = chain_eval(a1.row(a), &[a1.clone(), a1.clone()], &e, &[c.clone(), c.clone()]).unwrap();
            assert_eq!(three, a3[(a, b)]);
        }
    }
}

#[test]
fn theta0_on_forbidden_example() {
    let setup = Type2Setup::new(&parse_query(FORBIDDEN).unwrap()).unwrap();
    assert_eq!(setup.dead_ends(), 0);
    let theta = theta0_search(&setup, 1).unwrap();
    assert!(theta.classes.is_empty());
    assert_eq!(theta0_search(&setup, 1).unwrap(), theta);
    let block = theta.apply(&setup.zigzag_block(1).unwrap()).unwrap();
    let x = VarId::binary(&setup.u_symbol, "a", "t0@z1");
    let y = VarId::binary(&setup.v_symbol, "r1@z1", "b");
    for a in 0..setup.tt.left.elements.len() {
        for b in 0..setup.tt.right.elements.len() {
            let f = restricted_lineage_t2(&setup.tt, &block, "a", "b", a, b).unwrap();
            assert!(connectivity(&f).iter().any(|comp| comp.vars().contains(&x) && comp.vars().contains(&y)));
        }
    }
}

#[test]
fn type2_setup_rejects_type_one() {
    assert!(Type2Setup::new(&q_star()).is_err());
}

#[test]
fn detd_on_forbidden_example() {
    let setup = Type2Setup::new(&parse_query(FORBIDDEN).unwrap()).unwrap();
    let theta = theta0_search(&setup, 1).unwrap();
    let r = detd_search(&setup, &theta, 1, (1, 1), (2, 2)).unwrap();
    assert!(!r.det.is_zero());
    assert!(r.later_dets.iter().all(|d| !d.is_zero()));
    assert!(r.assignment.values().all(|x| x.is_zero() || x.is_one() || *x == half()));
    assert!(detd_search(&setup, &theta, 1, (1, 1), (1, 1)).is_err());
}

fn poly(terms: &[(&[(&str, u32)], i64)]) -> Poly {
    Poly::from_terms(terms.iter().map(|(m, c)| (m.iter().map(|(v, e)| (VarId::new(*v), *e)).collect(), Rational::from_integer((*c).into()))))
}

fn point(x: i64, y: i64) -> BTreeMap<VarId, Rational> {
    BTreeMap::from([(VarId::new("x"), Rational::from_integer(x.into())), (VarId::new("y"), Rational::from_integer(y.into()))])
}

#[test]
fn products_exponent_example() {
    let f1 = poly(&[(&[("x", 1)], 1), (&[("y", 1)], -1)]);
    let f2 = poly(&[(&[("x", 1)], 2), (&[("y", 1)], -1)]);
    let (k, v) = products_exponent_search(&[f1.clone(), f2.clone()], &[point(1, 2), point(1, 3)]).unwrap();
    assert_eq!(k, vec![1, 1]);
    assert_eq!(v, point(1, 6));
    assert_eq!(f1.eval_full(&v).unwrap(), rat(-5, 1));
    assert_eq!(f2.eval_full(&v).unwrap(), rat(-4, 1));
    let (k, _) = products_exponent_search(std::slice::from_ref(&f1), &[point(1, 2)]).unwrap();
    assert_eq!(k, vec![1]);
    assert!(products_exponent_search(&[f1], &[point(0, 2)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn products_search_succeeds(coeffs in proptest::collection::vec(-3i64..=3, 20), xs in proptest::collection::vec(1i64..=4, 4)) {
        let mk = |c: &[i64]| {
            let monos: [&[(&str, u32)]; 10] = [&[], &[("x", 1)], &[("y", 1)], &[("x", 2)], &[("x", 1), ("y", 1)], &[("y", 2)], &[("x", 3)], &[("x", 2), ("y", 1)], &[("x", 1), ("y", 2)], &[("y", 3)]];
            poly(&monos.iter().zip(c).map(|(m, &k)| (*m, k)).collect::<Vec<_>>())
        };
        let f1 = mk(&coeffs[..10]);
        let f2 = mk(&coeffs[10..]);
        let (p1, p2) = (point(xs[0], xs[1]), point(xs[2], xs[3]));
        prop_assume!(!f1.eval_full(&p1).unwrap().is_zero() && !f2.eval_full(&p2).unwrap().is_zero());
        let (k, v) = products_exponent_search(&[f1.clone(), f2.clone()], &[p1, p2]).unwrap();
        prop_assert!(k.iter().all(|&k| k >= 1));
        prop_assert!(!f1.eval_full(&v).unwrap().is_zero() && !f2.eval_full(&v).unwrap().is_zero());
    }

    #[test]
    fn matrix_power_recursion(c_num in 1i64..10, p in 1usize..5) {
        let c = rat(c_num, 10);
        let a1 = a1_matrix(&q_star(), &c).unwrap();
        let cm = RatMatrix::diag(&[Rational::one() - &c, c.clone()]);
        let next = ap_matrix(&a1, &c, p).unwrap().mul(&cm).unwrap().mul(&a1).unwrap();
        prop_assert_eq!(next, ap_matrix(&a1, &c, p + 1).unwrap());
    }

    #[test]
    fn ordering_holds(c_num in 1i64..10) {
        let c = rat(c_num, 10);
        for text in [Q_STAR, CHAIN] {
            let a = a1_matrix(&parse_query(text).unwrap(), &c).unwrap();
            prop_assert!(a[(0, 0)].is_positive() && a[(0, 0)] < a[(0, 1)] && a[(0, 1)] == a[(1, 0)] && a[(1, 0)] < a[(1, 1)] && a[(1, 1)] <= Rational::one());
        }
    }
}
