//! Acceptance run: one line per criterion, nonzero exit when any fails.

use std::time::{Duration, Instant};

use gfomc::blocks::{a1_matrix, ap_matrix};
use gfomc::cli::verify::{find_item, run_item, Q_STAR};
use gfomc::exactla::{rat, Rational};
use gfomc::lineage::pr_exact;
use gfomc::query::parse_query;
use gfomc::reduction::{brute_pp2cnf, pp2cnf_via_ccp, Pp2cnf};
use gfomc::tid::parse_tid;

const SEED: u64 = 2024;

type Outcome = Result<String, String>;
type Criterion = (&'static str, Box<dyn Fn() -> Outcome>);

/// Runs seeded suite items; `trials` overrides the default count.
fn items(list: &[(&str, &str, Option<usize>)]) -> Outcome {
    let mut parts = Vec::new();
    for &(suite, name, trials) in list {
        let item = find_item(suite, name).map_err(|e| e.to_string())?;
        let r = run_item(item, SEED, trials);
        if let Some(cx) = &r.failure {
            return Err(format!("{suite}.{name} trial {}: {}; instance: {}", cx.trial, cx.message, cx.instance));
        }
        parts.push(format!("{name} checked={}", r.checked));
    }
    Ok(parts.join(", "))
}

fn within(limit: Duration, start: Instant, out: Outcome) -> Outcome {
    let t = start.elapsed();
    let msg = out?;
    if t > limit {
        return Err(format!("{msg}; took {t:.1?}, limit {limit:?}"));
    }
    Ok(format!("{msg}; {t:.1?}"))
}

fn arithmetization() -> Outcome {
    let start = Instant::now();
    // Hand enumeration of the 8 worlds of (R|S)&(S|T) at one half.
    let sat = (0..8u8).filter(|w| (w & 1 != 0 || w & 2 != 0) && (w & 2 != 0 || w & 4 != 0)).count();
    if sat != 5 {
        return Err(format!("hand count {sat}"));
    }
    let q = parse_query(Q_STAR).map_err(|e| e.to_string())?;
    let db = parse_tid("domain left: a\ndomain right: b\ndefault 1\ntuple R(a) 1/2\ntuple S(a,b) 1/2\ntuple T(b) 1/2\n").map_err(|e| e.to_string())?;
    let p = pr_exact(&q, &db).map_err(|e| e.to_string())?;
    if p != rat(5, 8) {
        return Err(format!("probability {p}"));
    }
    within(Duration::from_secs(1), start, items(&[("lemma12", "arithmetization", None)]).map(|s| format!("Pr = 5/8, {s}")))
}

fn a2_literal() -> Result<(), String> {
    let q = parse_query(Q_STAR).map_err(|e| e.to_string())?;
    let half = rat(1, 2);
    let a1 = a1_matrix(&q, &half).map_err(|e| e.to_string())?;
    let a2 = ap_matrix(&a1, &half, 2).map_err(|e| e.to_string())?;
    let want: [[Rational; 2]; 2] = [[rat(13, 128), rat(21, 128)], [rat(21, 128), rat(17, 64)]];
    for i in 0..2 {
        for j in 0..2 {
            if a2[(i, j)] != want[i][j] {
                return Err(format!("A(2)[{i}][{j}] = {}", a2[(i, j)]));
            }
        }
    }
    Ok(())
}

fn ccp_with_hand_case() -> Outcome {
    // (X1|Y1) has three models; (X1|Y1)&(X1|Y2) has five.
    for (phi, want) in [(Pp2cnf::new(1, 1, vec![(1, 1)]), 3u32), (Pp2cnf::new(1, 2, vec![(1, 1), (1, 2)]), 5)] {
        let phi = phi.map_err(|e| e.to_string())?;
        let got = pp2cnf_via_ccp(&phi, 2, 2).map_err(|e| e.to_string())?;
        let brute = brute_pp2cnf(&phi).map_err(|e| e.to_string())?;
        if got != want.into() || brute != want.into() {
            return Err(format!("hand case {phi}: ccp {got}, brute {brute}, want {want}"));
        }
    }
    items(&[("ccp", "pp2cnf-via-coloring", Some(25))])
}

fn main() {
    let criteria: Vec<Criterion> = vec![
        ("arithmetization fidelity", Box::new(arithmetization)),
        ("small-matrix determinant vs disconnection", Box::new(|| {
            let s = Instant::now();
            within(Duration::from_secs(60), s, items(&[("lemma12", "small-matrix-determinant", Some(200))]))
        })),
        ("matrix-power law and A(2) value", Box::new(|| {
            let s = Instant::now();
            a2_literal()?;
            within(Duration::from_secs(120), s, items(&[("blocks", "matrix-power-law", None), ("blocks", "a2-value", None)]))
        })),
        ("type-I design conditions", Box::new(|| items(&[("blocks", "design-conditions", None)]))),
        ("determinant product form", Box::new(|| items(&[("blocks", "product-form", None)]))),
        ("end-to-end type-I recovery", Box::new(|| {
            let s = Instant::now();
            let out = items(&[("nonsingular", "pipeline-recovery", Some(25)), ("nonsingular", "oracle-consistency", None)])?;
            let per = s.elapsed() / 25;
            if per > Duration::from_secs(120) {
                return Err(format!("{per:?} per instance"));
            }
            Ok(format!("{out}; table equality covers zero infeasible signatures; {per:.1?} per instance"))
        })),
        ("grid matrix non-singularity", Box::new(|| items(&[("nonsingular", "grid-determinant", Some(50))]))),
        ("Cauchy identity", Box::new(|| items(&[("nonsingular", "cauchy-identity", Some(50))]))),
        ("Mobius values and inclusion-exclusion", Box::new(|| {
            items(&[("mobius", "lattice-values", None), ("mobius", "inclusion-exclusion", Some(100))])
        })),
        ("type-II Mobius expansion", Box::new(|| items(&[("mobius", "type2-expansion", None)]))),
        ("coloring reduction", Box::new(ccp_with_hand_case)),
        ("zig-zag query", Box::new(|| items(&[("zg", "zigzag-transport", None), ("zg", "zigzag-classification", None)]))),
        ("products search", Box::new(|| items(&[("products", "exponent-search", Some(50))]))),
        ("non-root finder", Box::new(|| items(&[("lemma12", "nonroot-finder", Some(200))]))),
        ("binary CI implication and migration symmetry", Box::new(|| {
            items(&[("independence", "binary-ci-implication", Some(100)), ("independence", "migration-symmetry", Some(100))])
        })),
        ("type-II searches", Box::new(|| {
            let s = Instant::now();
            within(Duration::from_secs(120), s, items(&[("blocks", "type2-searches", None)]))
        })),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} {name}: pass ({detail})", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({detail})", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
