use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::exactla::{rat, Rational};
use crate::formula::{CnfFormula, Poly, ProbMap, VarId};
use crate::reduction::{P2cnf, Pp2cnf};

pub fn names(prefix: &str, n: usize) -> Vec<VarId> {
    (1..=n).map(|i| VarId::new(format!("{prefix}{i}"))).collect()
}

fn clause(rng: &mut ChaCha8Rng, vars: &[VarId], width: &RangeInclusive<usize>) -> Vec<VarId> {
    let w = rng.gen_range(width.clone()).clamp(1, vars.len());
    vars.choose_multiple(rng, w).cloned().collect()
}

/// Random monotone CNF whose clauses draw from `vars`. Every variable in
/// `required` is forced into some clause.
pub fn monotone_cnf(
    rng: &mut ChaCha8Rng,
    vars: &[VarId],
    clauses: RangeInclusive<usize>,
    width: RangeInclusive<usize>,
    required: &[VarId],
) -> CnfFormula {
    let k = rng.gen_range(clauses);
    let mut cs: Vec<Vec<VarId>> = (0..k).map(|_| clause(rng, vars, &width)).collect();
    for v in required {
        if !cs.iter().any(|c| c.contains(v)) {
            let i = rng.gen_range(0..cs.len());
            cs[i].push(v.clone());
        }
    }
    CnfFormula::new(cs)
}

/// Monotone CNF over `x1..xk` whose clauses mostly join neighbours, so that
/// interior variables often separate the ends.
pub fn chain_cnf(rng: &mut ChaCha8Rng, k: usize) -> (CnfFormula, Vec<VarId>) {
    let xs = names("x", k);
    let mut cs: Vec<Vec<VarId>> = Vec::new();
    for i in 0..k - 1 {
        if rng.gen_bool(0.85) {
            cs.push(vec![xs[i].clone(), xs[i + 1].clone()]);
        }
        if i + 2 < k && rng.gen_bool(0.3) {
            let mut c = vec![xs[i].clone(), xs[i + 2].clone()];
            if rng.gen_bool(0.5) {
                c.push(xs[i + 1].clone());
            }
            cs.push(c);
        }
    }
    if rng.gen_bool(0.15) {
        cs.push(clause(rng, &xs, &(2..=3)));
    }
    if cs.is_empty() {
        cs.push(vec![xs[0].clone(), xs[k - 1].clone()]);
    }
    (CnfFormula::new(cs), xs)
}

/// A probability in `(0, 1)` with small denominator.
pub fn prob(rng: &mut ChaCha8Rng) -> Rational {
    let d = rng.gen_range(2..=9);
    rat(rng.gen_range(1..d), d)
}

pub fn probs(rng: &mut ChaCha8Rng, vars: &[VarId]) -> ProbMap {
    vars.iter().map(|v| (v.clone(), prob(rng))).collect()
}

/// Random polynomial with degree at most `max_deg` in every variable.
pub fn poly(rng: &mut ChaCha8Rng, vars: &[VarId], max_deg: u32, terms: RangeInclusive<usize>) -> Poly {
    let k = rng.gen_range(terms);
    Poly::from_terms((0..k).map(|_| {
        let mono: Vec<(VarId, u32)> = vars.iter().map(|v| (v.clone(), rng.gen_range(0..=max_deg))).filter(|(_, e)| *e > 0).collect();
        let mut c = rng.gen_range(-3i64..=2);
        if c >= 0 {
            c += 1;
        }
        (mono, Rational::from_integer(c.into()))
    }))
}

pub fn p2cnf(rng: &mut ChaCha8Rng, max_n: usize, max_m: usize) -> P2cnf {
    let n = rng.gen_range(2..=max_n);
    let mut pairs: Vec<(usize, usize)> = (1..=n).flat_map(|i| (i + 1..=n).map(move |j| (i, j))).collect();
    pairs.shuffle(rng);
    let m = rng.gen_range(0..=max_m.min(pairs.len()));
    let edges = pairs[..m].iter().map(|&(i, j)| if rng.gen_bool(0.5) { (j, i) } else { (i, j) }).collect();
    P2cnf::new(n, edges).expect("distinct pairs")
}

pub fn pp2cnf(rng: &mut ChaCha8Rng, max: usize) -> Pp2cnf {
    let nx = rng.gen_range(1..=max);
    let ny = rng.gen_range(1..=max);
    let edges = (1..=nx).flat_map(|i| (1..=ny).map(move |j| (i, j))).filter(|_| rng.gen_bool(0.5)).collect();
    Pp2cnf::new(nx, ny, edges).expect("distinct pairs")
}
