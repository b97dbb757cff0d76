use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::gen;
use crate::blocks::{
    a1_matrix, ap_matrix, brute_z, design_report, detd_search, fa_form, grid_select, pendant_matrix, products_exponent_search,
    theta0_search, BranchValues, Type2Setup,
};
use crate::exactla::{cauchy_det_check, fmt_rational, half, int, pow_i, rat, Rational};
use crate::formula::{
    arithmetize, connectivity, find_nonroot, independent_given, separates, small_matrix_det, uniform_probs, var_disconnects,
    weighted_count, weighted_count_enum, CnfFormula, MultilinearPoly, VarId,
};
use crate::lineage::{ground_lineage, pr_exact, pr_mobius, PendantMode, Type2Graph};
use crate::query::{build_lattice, classify, parse_query, zigzag_query, Query, TypeTwo, R, T};
use crate::reduction::{
    brute_p2cnf, brute_pp2cnf, brute_signatures, ccp_brute, pp2cnf_via_ccp, type1_pipeline, type1_pipeline_with, P2cnf,
};
use crate::tid::{build_graph_tid, build_type2_block, zg_database, BlockSpec, GraphSpec, Tid};
use crate::Error;

pub const Q_STAR: &str = "forall x forall y (R(x) | S(x,y)) & forall x forall y (S(x,y) | T(y))";
pub const CHAIN: &str =
    "forall x forall y (R(x) | S1(x,y)) & forall x forall y (S1(x,y) | S2(x,y)) & forall x forall y (S2(x,y) | T(y))";
pub const FAN: &str = "forall x forall y (R(x) | S1(x,y) | S2(x,y)) & forall x forall y (S1(x,y) | T(y)) & forall x forall y (S2(x,y) | T(y))";
pub const FORBIDDEN: &str = "forall x (forall y (S1(x,y) | U(x,y)) | forall y (S2(x,y) | U(x,y))) & forall x forall y (S1(x,y) | S2(x,y) | S3(x,y) | S4(x,y)) & forall y (forall x (S3(x,y) | V(x,y)) | forall x (S4(x,y) | V(x,y)))";
pub const RIGHT_II: &str = "forall x forall y (R(x) | S1(x,y)) & forall y (forall x (S1(x,y) | S2(x,y)) | forall x (S3(x,y)))";

pub const SUITES: [&str; 8] = ["lemma12", "blocks", "nonsingular", "mobius", "ccp", "products", "zg", "independence"];

pub enum Trial {
    Pass,
    /// The random instance does not meet the item's precondition.
    Skip,
    Fail(String),
}

fn verdict(ok: bool, msg: impl Into<String>) -> Trial {
    if ok {
        Trial::Pass
    } else {
        Trial::Fail(msg.into())
    }
}

pub struct Ctx {
    pub rng: ChaCha8Rng,
    pub instance: String,
}

type Check = fn(&mut Ctx) -> Result<Trial, Error>;

pub struct Item {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    /// Default number of applicable random instances; `None` for a fixed check.
    pub trials: Option<usize>,
    check: Check,
}

const fn item(suite: &'static str, name: &'static str, anchor: &'static str, trials: Option<usize>, check: Check) -> Item {
    Item { suite, name, anchor, trials, check }
}

pub static ITEMS: &[Item] = &[
    item("lemma12", "arithmetization", "arithmetization of (R|S)&(S|T) is rt+s-rst, value 5/8 at one half", None, arithmetization),
    item("lemma12", "small-matrix-determinant", "small-matrix determinant vanishes iff R and T are disconnected", Some(200), small_matrix),
    item("lemma12", "nonroot-finder", "nonzero polynomial of degree <= 2 has a non-root over {0,1/2,1}", Some(200), nonroot),
    item("blocks", "matrix-power-law", "zig-zag block matrix A(p) = (A(1)C)^(p-1)A(1) against block lineage", None, matrix_power_law),
    item("blocks", "a2-value", "A(2) of Q* at c=1/2 is [[13/128,21/128],[21/128,17/64]]", None, a2_value),
    item("blocks", "design-conditions", "eigenvalue, coefficient and cross-product conditions of the type-I block", None, design_conditions),
    item("blocks", "product-form", "det A(1) = alpha * prod u(1-u) over the block tuples", None, product_form),
    item("blocks", "pendant-matrix", "pendant matrix has distinct row quotients and nonzero determinant", None, pendant_nonsingular),
    item("blocks", "type2-searches", "theta0 keeps U-V connected and detD finds a nonzero determinant", None, type2_searches),
    item("nonsingular", "grid-determinant", "grid matrix over two-eigenvalue sequences is nonsingular", Some(50), grid_determinant),
    item("nonsingular", "cauchy-identity", "Cauchy determinant det[1/(c_i+z_j)] closed form", Some(50), cauchy),
    item("nonsingular", "pipeline-recovery", "type-I reduction recovers #P2CNF and every signature count", Some(25), pipeline_recovery),
    item("nonsingular", "oracle-consistency", "pipeline with lineage probabilities as the oracle", None, oracle_consistency),
    item("mobius", "lattice-values", "Mobius values (1,-1,-1,-1,2) and mu(123)=0 on the two example lattices", None, lattice_values),
    item("mobius", "inclusion-exclusion", "Pr of a disjunction as the Mobius sum over the conjunction lattice", Some(100), inclusion_exclusion),
    item("mobius", "type2-expansion", "type-II Mobius expansion with sign (-1)^(|U|+|V|) equals lineage probability", None, type2_expansion),
    item("ccp", "pp2cnf-via-coloring", "#PP2CNF from two-color signatures of the coloring problem", Some(25), ccp_reduction),
    item("ccp", "coloring-total", "coloring counts sum to m^|U| n^|V|", Some(25), ccp_total),
    item("products", "exponent-search", "products of points keep every polynomial nonzero", Some(50), products),
    item("zg", "zigzag-transport", "zig-zag query over a database equals the query over its zig-zag database", None, zigzag_transport),
    item("zg", "zigzag-classification", "zig-zag query is unsafe of type A-A with length at least 2k", None, zigzag_classification),
    item("independence", "disconnection-independence", "X disconnects U,V iff U and V are independent given X", Some(100), disconnection_independence),
    item("independence", "binary-ci-implication", "(U _|_ V | X) and (UX _|_ V | Y) imply (V _|_ Y) or (U _|_ Y | X)", Some(100), binary_ci),
    item("independence", "migration-symmetry", "Y migrates for X iff X migrates for Y", Some(100), migration_symmetry),
];

pub struct Counterexample {
    pub suite: String,
    pub item: String,
    pub seed: u64,
    pub trial: u64,
    pub message: String,
    pub instance: String,
}

impl Counterexample {
    pub fn serialize(&self) -> String {
        format!(
            "suite: {}\nitem: {}\nseed: {}\ntrial: {}\nmessage: {}\ninstance: {}\n",
            self.suite,
            self.item,
            self.seed,
            self.trial,
            self.message.replace('\n', " "),
            self.instance.replace('\n', " ")
        )
    }

    pub fn parse(text: &str) -> Result<Counterexample, Error> {
        let field = |key: &str| -> Result<String, Error> {
            text.lines()
                .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(':')).map(|r| r.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("replay file lacks `{key}`")))
        };
        let num = |key: &str| -> Result<u64, Error> { field(key)?.parse().map_err(|_| Error::Parse(format!("bad `{key}`"))) };
        Ok(Counterexample {
            suite: field("suite")?,
            item: field("item")?,
            seed: num("seed")?,
            trial: num("trial")?,
            message: field("message").unwrap_or_default(),
            instance: field("instance").unwrap_or_default(),
        })
    }

    pub fn file_name(&self) -> String {
        format!("gfomc-{}-{}-seed{}-trial{}.txt", self.suite, self.item, self.seed, self.trial)
    }
}

pub struct ItemReport {
    pub suite: &'static str,
    pub name: &'static str,
    pub anchor: &'static str,
    pub checked: usize,
    pub skipped: usize,
    pub failure: Option<Counterexample>,
}

impl ItemReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "pass" } else { "fail" };
        format!("{}.{}: {status} checked={} skipped={} anchor=\"{}\"", self.suite, self.name, self.checked, self.skipped, self.anchor)
    }
}

fn fnv(text: &str) -> u64 {
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

fn trial_rng(seed: u64, item: &Item, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv(&format!("{}.{}", item.suite, item.name)));
    rng.set_stream(trial);
    rng
}

fn run_trial(item: &Item, seed: u64, trial: u64) -> (Trial, String) {
    let mut ctx = Ctx { rng: trial_rng(seed, item, trial), instance: String::new() };
    let out = match (item.check)(&mut ctx) {
        Ok(t) => t,
        Err(e) => Trial::Fail(format!("error: {e}")),
    };
    (out, ctx.instance)
}

pub fn run_item(item: &Item, seed: u64, trials: Option<usize>) -> ItemReport {
    let target = item.trials.map(|d| trials.unwrap_or(d)).unwrap_or(1);
    let cap = (target as u64 * 100).max(100);
    let mut report = ItemReport { suite: item.suite, name: item.name, anchor: item.anchor, checked: 0, skipped: 0, failure: None };
    let mut trial = 0u64;
    while report.checked < target {
        if trial == cap {
            report.failure = Some(Counterexample {
                suite: item.suite.into(),
                item: item.name.into(),
                seed,
                trial,
                message: format!("only {} applicable instances in {cap} attempts", report.checked),
                instance: String::new(),
            });
            break;
        }
        let (out, instance) = run_trial(item, seed, trial);
        match out {
            Trial::Pass => report.checked += 1,
            Trial::Skip => report.skipped += 1,
            Trial::Fail(message) => {
                report.failure = Some(Counterexample { suite: item.suite.into(), item: item.name.into(), seed, trial, message, instance });
                break;
            }
        }
        trial += 1;
    }
    report
}

pub fn items_of(suite: &str) -> Result<Vec<&'static Item>, Error> {
    if suite == "all" {
        return Ok(ITEMS.iter().collect());
    }
    if !SUITES.contains(&suite) {
        return Err(Error::Domain(format!("unknown suite `{suite}`; expected one of {} or all", SUITES.join(", "))));
    }
    Ok(ITEMS.iter().filter(|i| i.suite == suite).collect())
}

pub fn find_item(suite: &str, name: &str) -> Result<&'static Item, Error> {
    ITEMS
        .iter()
        .find(|i| i.suite == suite && i.name == name)
        .ok_or_else(|| Error::Domain(format!("unknown suite item {suite}.{name}")))
}

/// Replays one trial; `None` when it passes or is inapplicable.
pub fn replay(cx: &Counterexample) -> Result<Option<String>, Error> {
    let item = find_item(&cx.suite, &cx.item)?;
    match run_trial(item, cx.seed, cx.trial) {
        (Trial::Fail(msg), inst) => Ok(Some(format!("{msg}; instance: {inst}"))),
        _ => Ok(None),
    }
}

/// Writes the counterexample next to `dir` and returns its path.
pub fn save(cx: &Counterexample, dir: &Path) -> Result<PathBuf, Error> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(cx.file_name());
    std::fs::write(&path, cx.serialize())?;
    Ok(path)
}

fn q(text: &str) -> Result<Query, Error> {
    parse_query(text)
}

fn vset(vars: &[&VarId]) -> BTreeSet<VarId> {
    vars.iter().map(|v| (*v).clone()).collect()
}

fn arithmetization(ctx: &mut Ctx) -> Result<Trial, Error> {
    let f = CnfFormula::from_names(&[&["r", "s"], &["s", "t"]]);
    ctx.instance = f.to_string();
    let v = VarId::new;
    let y = arithmetize(&f)?;
    let expected = MultilinearPoly::from_terms([
        (vec![v("r"), v("t")], int(1)),
        (vec![v("s")], int(1)),
        (vec![v("r"), v("s"), v("t")], int(-1)),
    ]);
    let at_half = y.eval(&uniform_probs(&y.vars(), &half()))?;
    let mut tid = Tid::new(true);
    tid.add_left("a")?;
    tid.add_right("b")?;
    tid.set(VarId::unary(R, "a"), half())?;
    tid.set(VarId::unary(T, "b"), half())?;
    tid.set(VarId::binary("S", "a", "b"), half())?;
    let pr = pr_exact(&q(Q_STAR)?, &tid)?;
    Ok(verdict(
        y == expected && at_half == rat(5, 8) && pr == rat(5, 8),
        format!("y = {y}, y(1/2) = {}, Pr = {}", fmt_rational(&at_half), fmt_rational(&pr)),
    ))
}

fn small_matrix(ctx: &mut Ctx) -> Result<Trial, Error> {
    let r = VarId::new("R");
    let t = VarId::new("T");
    let extra = ctx.rng.gen_range(0..=10);
    let mut vars = vec![r.clone(), t.clone()];
    vars.extend(gen::names("X", extra));
    let f = gen::monotone_cnf(&mut ctx.rng, &vars, 1..=7, 1..=3, &[r.clone(), t.clone()]);
    ctx.instance = f.to_string();
    let vars = f.vars();
    if !vars.contains(&r) || !vars.contains(&t) {
        return Ok(Trial::Skip);
    }
    let det = small_matrix_det(&f, &r, &t)?;
    let sep = separates(&f, &vset(&[&r]), &vset(&[&t]));
    Ok(verdict(det.is_zero() == sep, format!("determinant zero: {}, disconnected: {sep}", det.is_zero())))
}

fn nonroot(ctx: &mut Ctx) -> Result<Trial, Error> {
    let n = ctx.rng.gen_range(1..=4);
    let vars = gen::names("x", n);
    let p = gen::poly(&mut ctx.rng, &vars, 2, 1..=6);
    ctx.instance = p.to_string();
    if p.is_zero() {
        return Ok(Trial::Skip);
    }
    let pt = find_nonroot(&p, &[Rational::zero(), half(), Rational::one()])?;
    let value = p.eval_full(&pt)?;
    let on_grid = pt.values().all(|x| x.is_zero() || x.is_one() || *x == half());
    Ok(verdict(!value.is_zero() && on_grid, format!("value {} at {pt:?}", fmt_rational(&value))))
}

const TYPE_ONE: [&str; 3] = [Q_STAR, CHAIN, FAN];

fn matrix_power_law(ctx: &mut Ctx) -> Result<Trial, Error> {
    for text in TYPE_ONE {
        ctx.instance = text.into();
        let query = q(text)?;
        if !classify(&query).is_final {
            return Ok(Trial::Fail("query is not final".into()));
        }
        let c = half();
        let a1 = a1_matrix(&query, &c)?;
        for p in 1..=3 {
            let ap = ap_matrix(&a1, &c, p)?;
            let z = brute_z(&query, &c, p)?;
            if ap != z {
                return Ok(Trial::Fail(format!("p = {p}: A = {ap}, block lineage = {z}")));
            }
        }
    }
    Ok(Trial::Pass)
}

fn a2_value(ctx: &mut Ctx) -> Result<Trial, Error> {
    ctx.instance = Q_STAR.into();
    let a1 = a1_matrix(&q(Q_STAR)?, &half())?;
    let a2 = ap_matrix(&a1, &half(), 2)?;
    let want = [[rat(13, 128), rat(21, 128)], [rat(21, 128), rat(17, 64)]];
    let ok = (0..2).all(|i| (0..2).all(|j| a2[(i, j)] == want[i][j]));
    Ok(verdict(ok, format!("A(2) = {a2}")))
}

fn design_conditions(ctx: &mut Ctx) -> Result<Trial, Error> {
    for text in TYPE_ONE {
        ctx.instance = text.into();
        let r = design_report(&q(text)?, &half())?;
        if !r.passes() {
            return Ok(Trial::Fail(r.failures.join("; ")));
        }
        if r.cross_products_quad != r.cross_products_seq || !r.cross_products_quad.iter().all(|&b| b) {
            return Ok(Trial::Fail(format!("cross products {:?} vs {:?}", r.cross_products_quad, r.cross_products_seq)));
        }
        if !(r.eigen.det != Rational::zero() && r.trace_positive && r.eigen.disc.is_positive() && r.b_nonzero.iter().all(|&b| b)) {
            return Ok(Trial::Fail("eigenvalue or coefficient condition".into()));
        }
    }
    Ok(Trial::Pass)
}

fn product_form(ctx: &mut Ctx) -> Result<Trial, Error> {
    for text in TYPE_ONE {
        ctx.instance = text.into();
        let fa = fa_form(&q(text)?)?;
        if fa.vars > 14 || !fa.matches_product_form {
            return Ok(Trial::Fail(format!("{} free tuples, alpha = {}", fa.vars, fmt_rational(&fa.alpha))));
        }
    }
    Ok(Trial::Pass)
}

fn pendant_nonsingular(ctx: &mut Ctx) -> Result<Trial, Error> {
    for text in [Q_STAR, CHAIN] {
        let a1 = a1_matrix(&q(text)?, &half())?;
        for n in 1..=4 {
            ctx.instance = format!("{text}; n = {n}");
            let pm = pendant_matrix(&a1, &half(), n, PendantMode::Semantic, 0)?;
            let distinct: BTreeSet<&Rational> = pm.quotients.iter().collect();
            if pm.det.is_zero() || distinct.len() != pm.quotients.len() {
                return Ok(Trial::Fail(format!("det = {}", fmt_rational(&pm.det))));
            }
        }
    }
    Ok(Trial::Pass)
}

fn type2_searches(ctx: &mut Ctx) -> Result<Trial, Error> {
    let setup = Type2Setup::new(&q(FORBIDDEN)?)?;
    for p in 1..=2 {
        ctx.instance = format!("{FORBIDDEN}; p = {p}");
        let theta = theta0_search(&setup, p)?;
        let d = detd_search(&setup, &theta, p, (1, 1), (2, 2))?;
        if d.det.is_zero() {
            return Ok(Trial::Fail("detD vanishes".into()));
        }
    }
    Ok(Trial::Pass)
}

fn small_rat(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let r = rat(rng.gen_range(-4..=4), rng.gen_range(1..=3));
        if !nonzero || !r.is_zero() {
            return r;
        }
    }
}

fn grid_determinant(ctx: &mut Ctx) -> Result<Trial, Error> {
    let rng = &mut ctx.rng;
    let l1 = rat(rng.gen_range(1..=7), 8);
    let l2 = rat(rng.gen_range(1..=7), 8);
    let a: Vec<Rational> = (0..3).map(|_| small_rat(rng, false)).collect();
    let b: Vec<Rational> = (0..3).map(|_| small_rat(rng, true)).collect();
    let m = rng.gen_range(0..=3);
    ctx.instance = format!(
        "lambda = ({}, {}), a = [{}], b = [{}], m = {m}",
        fmt_rational(&l1),
        fmt_rational(&l2),
        a.iter().map(fmt_rational).collect::<Vec<_>>().join(", "),
        b.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
    );
    let cross_ok = [(0, 1), (0, 2), (1, 2)].iter().all(|&(i, j)| &a[i] * &b[j] != &a[j] * &b[i]);
    if l1 == l2 || !cross_ok {
        return Ok(Trial::Skip);
    }
    let y = |p: usize| -> Result<BranchValues, Error> {
        let e = p as i64;
        let v = |i: usize| &a[i] * pow_i(&l1, e) + &b[i] * pow_i(&l2, e);
        Ok([v(0), v(1), v(2)])
    };
    for p in 1..=4 * (m + 1) + 4 {
        if y(p)?.iter().any(|v| v.is_zero()) {
            return Ok(Trial::Skip);
        }
    }
    let g = grid_select(y, m)?;
    Ok(verdict(!g.det.is_zero(), "grid determinant vanishes"))
}

fn cauchy(ctx: &mut Ctx) -> Result<Trial, Error> {
    let rng = &mut ctx.rng;
    let h = rng.gen_range(1..=4);
    let distinct = |rng: &mut ChaCha8Rng| -> Vec<Rational> {
        let mut out: Vec<Rational> = Vec::new();
        while out.len() < h {
            let x = rat(rng.gen_range(-8..=8), rng.gen_range(1..=4));
            if !out.contains(&x) {
                out.push(x);
            }
        }
        out
    };
    let c = distinct(rng);
    let z = distinct(rng);
    let show = |v: &[Rational]| v.iter().map(fmt_rational).collect::<Vec<_>>().join(", ");
    ctx.instance = format!("c = [{}], z = [{}]", show(&c), show(&z));
    if c.iter().any(|ci| z.iter().any(|zj| (ci + zj).is_zero())) {
        return Ok(Trial::Skip);
    }
    let r = cauchy_det_check(&c, &z)?;
    Ok(verdict(r.equal, format!("det {} vs formula {}", fmt_rational(&r.det), fmt_rational(&r.formula_value))))
}

fn pipeline_recovery(ctx: &mut Ctx) -> Result<Trial, Error> {
    let phi = gen::p2cnf(&mut ctx.rng, 4, 4);
    ctx.instance = phi.to_string();
    let brute = brute_signatures(&phi)?;
    let count = brute_p2cnf(&phi)?;
    for text in [Q_STAR, CHAIN] {
        let r = type1_pipeline(&q(text)?, &phi, &half(), PendantMode::Semantic)?;
        if r.table != brute || r.phi_count != count {
            return Ok(Trial::Fail(format!("{text}: recovered {} against {count}", r.phi_count)));
        }
    }
    Ok(Trial::Pass)
}

fn oracle_consistency(ctx: &mut Ctx) -> Result<Trial, Error> {
    let query = q(Q_STAR)?;
    let phi = P2cnf::new(2, vec![(1, 2)])?;
    ctx.instance = phi.to_string();
    let syms = vec!["S".to_string()];
    let mut oracle = |g: &GraphSpec| pr_exact(&query, &build_graph_tid(&syms, g)?);
    let r = type1_pipeline_with(&query, &phi, &half(), PendantMode::Semantic, &mut oracle)?;
    Ok(verdict(r.table == brute_signatures(&phi)? && r.phi_count == brute_p2cnf(&phi)?, "lineage oracle disagrees"))
}

fn lattice_values(ctx: &mut Ctx) -> Result<Trial, Error> {
    let f = |c: &[&[&str]]| CnfFormula::from_names(c);
    let first = [f(&[&["Z1"], &["Z2"]]), f(&[&["Z1"], &["Z3"]]), f(&[&["Z2"], &["Z3"]])];
    ctx.instance = "Z1Z2, Z1Z3, Z2Z3".into();
    let l = build_lattice(&first)?;
    if l.mobius != [1, -1, -1, -1, 2] {
        return Ok(Trial::Fail(format!("mu = {:?}", l.mobius)));
    }
    let second = [f(&[&["Z1"], &["Z2"]]), f(&[&["Z2"], &["Z3"]]), f(&[&["Z3"], &["Z4"]])];
    ctx.instance = "Z1Z2, Z2Z3, Z3Z4".into();
    let l = build_lattice(&second)?;
    let all = l.index_of(&BTreeSet::from([0, 1, 2])).ok_or_else(|| Error::Internal("123 missing".into()))?;
    Ok(verdict(l.mobius[all] == 0, format!("mu(123) = {}", l.mobius[all])))
}

fn inclusion_exclusion(ctx: &mut Ctx) -> Result<Trial, Error> {
    let vars = gen::names("x", 6);
    let fs: Vec<CnfFormula> = (0..3).map(|_| gen::monotone_cnf(&mut ctx.rng, &vars, 1..=3, 1..=3, &[])).collect();
    let p = gen::probs(&mut ctx.rng, &vars);
    ctx.instance = fs.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");
    let l = build_lattice(&fs)?;
    let lhs = weighted_count_enum(&fs[0].or(&fs[1]).or(&fs[2]), &p)?;
    let mut rhs = Rational::zero();
    for i in 1..l.elements.len() {
        rhs -= Rational::from_integer(l.mobius[i].into()) * weighted_count(&l.formulas[i], &p)?;
    }
    Ok(verdict(lhs == rhs, format!("Pr(F1|F2|F3) = {} vs {}", fmt_rational(&lhs), fmt_rational(&rhs))))
}

fn type2_expansion(ctx: &mut Ctx) -> Result<Trial, Error> {
    let tt = TypeTwo::new(&q(FORBIDDEN)?)?;
    let syms: Vec<String> = tt.query.binary_symbols().into_iter().collect();
    let block = |u: &str, v: &str, p: usize| {
        build_type2_block(&syms, &BlockSpec::type2(u, v, p, half(), 0, 0).with_tag(format!("{u}.{v}")))
    };
    let mut graphs = Vec::new();
    let mut g = Type2Graph { u_nodes: vec!["a".into()], v_nodes: vec!["b".into()], ..Default::default() };
    g.blocks.insert(("a".into(), "b".into()), block("a", "b", 0)?);
    graphs.push(g.clone());
    g.blocks.insert(("a".into(), "b".into()), block("a", "b", 1)?);
    graphs.push(g.clone());
    g.u_nodes.push("a2".into());
    g.blocks.insert(("a2".into(), "b".into()), block("a2", "b", 0)?);
    graphs.push(g);
    let mut g = Type2Graph { u_nodes: vec!["a".into()], v_nodes: vec!["b".into()], ..Default::default() };
    g.blocks.insert(("a".into(), "b".into()), block("a", "b", 0)?);
    g.u_pendants.insert("a".into(), ("a'".into(), block("a", "a'", 0)?));
    g.v_pendants.insert("b".into(), ("b'".into(), block("b'", "b", 0)?));
    graphs.push(g);
    for (i, g) in graphs.iter().enumerate() {
        ctx.instance = format!("graph {i}: {} blocks, {} pendants", g.blocks.len(), g.u_pendants.len() + g.v_pendants.len());
        let m = pr_mobius(&tt, g)?;
        let e = pr_exact(&tt.query, &g.tid()?)?;
        if m != e {
            return Ok(Trial::Fail(format!("expansion {} vs lineage {}", fmt_rational(&m), fmt_rational(&e))));
        }
    }
    Ok(Trial::Pass)
}

fn ccp_reduction(ctx: &mut Ctx) -> Result<Trial, Error> {
    let phi = gen::pp2cnf(&mut ctx.rng, 3);
    ctx.instance = phi.to_string();
    let got = pp2cnf_via_ccp(&phi, 2, 2)?;
    let want = brute_pp2cnf(&phi)?;
    Ok(verdict(got == want, format!("coloring count {got} vs {want}")))
}

fn ccp_total(ctx: &mut Ctx) -> Result<Trial, Error> {
    let phi = gen::pp2cnf(&mut ctx.rng, 3);
    let m = ctx.rng.gen_range(1..=3);
    let n = ctx.rng.gen_range(1..=3);
    ctx.instance = format!("{phi}; m = {m}, n = {n}");
    let c = ccp_brute(phi.nx, phi.ny, &phi.edges, m, n)?;
    let want = num_bigint::BigInt::from(m).pow(phi.nx as u32) * num_bigint::BigInt::from(n).pow(phi.ny as u32);
    Ok(verdict(c.total() == want, format!("total {} vs {want}", c.total())))
}

fn products(ctx: &mut Ctx) -> Result<Trial, Error> {
    let vars = gen::names("x", 2);
    let k = ctx.rng.gen_range(1..=3);
    let polys: Vec<_> = (0..k).map(|_| gen::poly(&mut ctx.rng, &vars, 3, 1..=5)).collect();
    let points: Vec<_> = (0..k)
        .map(|_| vars.iter().map(|v| (v.clone(), Rational::from_integer(ctx.rng.gen_range(1..=4).into()))).collect())
        .collect::<Vec<std::collections::BTreeMap<VarId, Rational>>>();
    ctx.instance = polys.iter().zip(&points).map(|(f, p)| format!("{f} @ {p:?}")).collect::<Vec<_>>().join("; ");
    for (f, p) in polys.iter().zip(&points) {
        if f.vars().is_empty() || f.eval_full(p)?.is_zero() {
            return Ok(Trial::Skip);
        }
    }
    let (ks, v) = products_exponent_search(&polys, &points)?;
    for f in &polys {
        if f.eval_full(&v)?.is_zero() {
            return Ok(Trial::Fail(format!("exponents {ks:?} give a root")));
        }
    }
    Ok(verdict(ks.iter().all(|&k| k >= 1), format!("exponents {ks:?}")))
}

fn zg_source(rng: &mut ChaCha8Rng, z: &Query, left: &[&str], right: &[&str]) -> Result<Tid, Error> {
    let mut t = Tid::new(true);
    for a in left {
        t.add_left(*a)?;
    }
    for b in right {
        t.add_right(*b)?;
    }
    for a in left {
        t.set(VarId::unary(R, a), gen::prob(rng))?;
    }
    for b in right {
        t.set(VarId::unary(T, b), gen::prob(rng))?;
    }
    for s in z.binary_symbols() {
        for a in left {
            for b in right {
                t.set(VarId::binary(&s, a, b), gen::prob(rng))?;
            }
        }
    }
    Ok(t)
}

fn zigzag_transport(ctx: &mut Ctx) -> Result<Trial, Error> {
    let shapes: [(&[&str], &[&str]); 3] = [(&["a"], &["b"]), (&["a", "a2"], &["b"]), (&["a"], &["b", "b2"])];
    for text in [Q_STAR, CHAIN, RIGHT_II] {
        let query = q(text)?;
        let z = zigzag_query(&query)?;
        for (left, right) in shapes {
            ctx.instance = format!("{text}; left {left:?}, right {right:?}");
            let src = zg_source(&mut ctx.rng, &z, left, right)?;
            let zg = zg_database(&src, &query)?;
            let inverse: std::collections::BTreeMap<&VarId, &VarId> = zg.bijection.iter().map(|(k, v)| (v, k)).collect();
            let lhs = ground_lineage(&z, &src);
            let lhs_vars = lhs.vars();
            let missing = lhs_vars.iter().any(|v| !inverse.contains_key(v));
            let renamed = lhs.rename(|v| inverse.get(v).map_or_else(|| v.clone(), |w| (*w).clone()));
            if missing || renamed != ground_lineage(&query, &zg.tid) {
                return Ok(Trial::Fail("lineages differ".into()));
            }
            let (a, b) = (pr_exact(&z, &src)?, pr_exact(&query, &zg.tid)?);
            if a != b {
                return Ok(Trial::Fail(format!("Pr {} vs {}", fmt_rational(&a), fmt_rational(&b))));
            }
        }
    }
    Ok(Trial::Pass)
}

fn zigzag_classification(ctx: &mut Ctx) -> Result<Trial, Error> {
    for text in [Q_STAR, CHAIN, RIGHT_II, FORBIDDEN] {
        ctx.instance = text.into();
        let before = classify(&q(text)?);
        let after = classify(&zigzag_query(&q(text)?)?);
        let k = before.length.unwrap_or(0);
        let ok = after.is_unsafe
            && after.left_type == before.left_type
            && after.right_type == before.left_type
            && after.length.is_some_and(|l| l >= 2 * k);
        if !ok {
            return Ok(Trial::Fail(format!(
                "zig-zag types {}-{}, length {:?}, source length {k}",
                after.left_type, after.right_type, after.length
            )));
        }
    }
    Ok(Trial::Pass)
}

fn pick_distinct(rng: &mut ChaCha8Rng, vars: &[VarId], k: usize) -> Vec<VarId> {
    use rand::seq::SliceRandom;
    vars.choose_multiple(rng, k).cloned().collect()
}

fn disconnection_independence(ctx: &mut Ctx) -> Result<Trial, Error> {
    let vars = gen::names("x", 6);
    let f = if ctx.rng.gen_bool(0.5) {
        gen::chain_cnf(&mut ctx.rng, 6).0
    } else {
        gen::monotone_cnf(&mut ctx.rng, &vars, 2..=5, 2..=3, &[])
    };
    let pick = pick_distinct(&mut ctx.rng, &vars, 3);
    let p = gen::probs(&mut ctx.rng, &vars);
    ctx.instance = format!("F = {f}; U = {}, V = {}, X = {}", pick[0], pick[1], pick[2]);
    let (u, v) = (vset(&[&pick[0]]), vset(&[&pick[1]]));
    let d = var_disconnects(&f, &pick[2], &u, &v)?;
    let ind = independent_given(&f, &u, &v, &vset(&[&pick[2]]), &p)?;
    Ok(verdict(d.disconnects == ind, format!("disconnects: {}, independent: {ind}", d.disconnects)))
}

fn binary_ci(ctx: &mut Ctx) -> Result<Trial, Error> {
    let k = ctx.rng.gen_range(4..=7);
    let (f, vars) = gen::chain_cnf(&mut ctx.rng, k);
    let pick = pick_distinct(&mut ctx.rng, &vars, 4);
    let p = gen::probs(&mut ctx.rng, &vars);
    let (u, v, x, y) = (vset(&[&pick[0]]), vset(&[&pick[1]]), vset(&[&pick[2]]), vset(&[&pick[3]]));
    ctx.instance = format!("F = {f}; U = {}, V = {}, X = {}, Y = {}", pick[0], pick[1], pick[2], pick[3]);
    let ux: BTreeSet<VarId> = u.union(&x).cloned().collect();
    if !independent_given(&f, &u, &v, &x, &p)? || !independent_given(&f, &ux, &v, &y, &p)? {
        return Ok(Trial::Skip);
    }
    let left = independent_given(&f, &v, &y, &BTreeSet::new(), &p)?;
    let right = independent_given(&f, &u, &y, &x, &p)?;
    Ok(verdict(left || right, "neither V _|_ Y nor U _|_ Y | X"))
}

fn migration_symmetry(ctx: &mut Ctx) -> Result<Trial, Error> {
    let k = ctx.rng.gen_range(4..=7);
    let (f, vars) = gen::chain_cnf(&mut ctx.rng, k);
    let pick = pick_distinct(&mut ctx.rng, &vars, 4);
    ctx.instance = format!("F = {f}; U = {}, V = {}, X = {}, Y = {}", pick[0], pick[1], pick[2], pick[3]);
    if connectivity(&f).len() != 1 {
        return Ok(Trial::Skip);
    }
    let (u, v) = (vset(&[&pick[0]]), vset(&[&pick[1]]));
    let dx = var_disconnects(&f, &pick[2], &u, &v)?;
    let dy = var_disconnects(&f, &pick[3], &u, &v)?;
    if !dx.disconnects || !dy.disconnects {
        return Ok(Trial::Skip);
    }
    let y_mig = dx.migrating.contains(&pick[3]);
    let x_mig = dy.migrating.contains(&pick[2]);
    Ok(verdict(y_mig == x_mig, format!("Y migrates for X: {y_mig}, X migrates for Y: {x_mig}")))
}
