use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use super::{connectivity, var_cap, CnfFormula, ProbMap, VarId};
use crate::exactla::{fmt_rational, Rational};
use crate::Error;

/// Sparse multilinear polynomial with exact coefficients. The zero
/// polynomial has no terms; no zero coefficient is ever stored.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct MultilinearPoly {
    terms: BTreeMap<BTreeSet<VarId>, Rational>,
}

impl MultilinearPoly {
    pub fn zero() -> Self {
        MultilinearPoly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = MultilinearPoly::zero();
        p.add_term(BTreeSet::new(), c);
        p
    }

    pub fn one() -> Self {
        MultilinearPoly::constant(Rational::one())
    }

    pub fn var(v: VarId) -> Self {
        let mut p = MultilinearPoly::zero();
        p.add_term(BTreeSet::from([v]), Rational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<VarId>, Rational)>) -> Self {
        let mut p = MultilinearPoly::zero();
        for (vars, c) in terms {
            p.add_term(vars.into_iter().collect(), c);
        }
        p
    }

    fn add_term(&mut self, mono: BTreeSet<VarId>, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BTreeSet<VarId>, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flatten().cloned().collect()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&BTreeSet::new()).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, other: &MultilinearPoly) -> MultilinearPoly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MultilinearPoly) -> MultilinearPoly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> MultilinearPoly {
        if s.is_zero() {
            return MultilinearPoly::zero();
        }
        MultilinearPoly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    /// Product of polynomials over disjoint variable sets.
    pub fn mul_disjoint(&self, other: &MultilinearPoly) -> Result<MultilinearPoly, Error> {
        if !self.vars().is_disjoint(&other.vars()) {
            return Err(Error::Domain("multilinear product over shared variables".into()));
        }
        let mut out = MultilinearPoly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.union(b).cloned().collect(), x * y);
            }
        }
        Ok(out)
    }

    pub fn to_poly(&self) -> Poly {
        let mut p = Poly::zero();
        for (m, c) in &self.terms {
            p.add_term(m.iter().map(|v| (v.clone(), 1)).collect(), c.clone());
        }
        p
    }

    /// Value at a total point; unbound variables are an error.
    pub fn eval(&self, point: &BTreeMap<VarId, Rational>) -> Result<Rational, Error> {
        poly_eval(self, point).as_constant().ok_or_else(|| Error::Domain("evaluation point misses variables".into()))
    }
}

fn fmt_monomial(f: &mut fmt::Formatter<'_>, c: &Rational, first: bool, names: impl Iterator<Item = String>) -> fmt::Result {
    let names: Vec<String> = names.collect();
    let neg = c < &Rational::zero();
    let abs = if neg { -c.clone() } else { c.clone() };
    if first {
        if neg {
            f.write_str("-")?;
        }
    } else {
        f.write_str(if neg { " - " } else { " + " })?;
    }
    if names.is_empty() {
        return f.write_str(&fmt_rational(&abs));
    }
    if !abs.is_one() {
        write!(f, "{}*", fmt_rational(&abs))?;
    }
    f.write_str(&names.join("*"))
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            fmt_monomial(f, c, i == 0, m.iter().map(|v| v.to_string()))?;
        }
        Ok(())
    }
}

impl fmt::Debug for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Partial evaluation. Bound variables are replaced by their values.
pub fn poly_eval(p: &MultilinearPoly, bindings: &BTreeMap<VarId, Rational>) -> MultilinearPoly {
    if bindings.is_empty() {
        return p.clone();
    }
    let mut out = MultilinearPoly::zero();
    for (m, c) in &p.terms {
        let mut coef = c.clone();
        let mut rest = BTreeSet::new();
        for v in m {
            match bindings.get(v) {
                Some(x) => coef *= x,
                None => {
                    rest.insert(v.clone());
                }
            }
        }
        out.add_term(rest, coef);
    }
    out
}

/// The unique multilinear polynomial agreeing with `f` on `{0,1}` points.
pub fn arithmetize(f: &CnfFormula) -> Result<MultilinearPoly, Error> {
    let n = f.vars().len();
    let cap = var_cap(20);
    if n > cap {
        return Err(Error::VarCap { vars: n, cap });
    }
    let mut memo = HashMap::new();
    Ok(arith_rec(f, &mut memo))
}

fn arith_rec(f: &CnfFormula, memo: &mut HashMap<CnfFormula, MultilinearPoly>) -> MultilinearPoly {
    if f.is_true() {
        return MultilinearPoly::one();
    }
    if f.is_false() {
        return MultilinearPoly::zero();
    }
    if let Some(p) = memo.get(f) {
        return p.clone();
    }
    let comps = connectivity(f);
    let result = if comps.len() > 1 {
        let mut acc = MultilinearPoly::one();
        for c in &comps {
            acc = acc.mul_disjoint(&arith_rec(c, memo)).expect("components share no variables");
        }
        acc
    } else {
        let mut freq: BTreeMap<&VarId, usize> = BTreeMap::new();
        for c in f.clauses() {
            for v in c {
                *freq.entry(v).or_default() += 1;
            }
        }
        let x = freq.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))).map(|(v, _)| (*v).clone()).expect("nonconstant");
        let a1 = arith_rec(&f.substitute_one(&x, true), memo);
        let a0 = arith_rec(&f.substitute_one(&x, false), memo);
        let mut out = a0.clone();
        for (m, c) in a1.sub(&a0).terms {
            let mut m = m;
            m.insert(x.clone());
            out.add_term(m, c);
        }
        out
    };
    memo.insert(f.clone(), result.clone());
    result
}

/// Arithmetization in the variables outside `numeric`; variables in
/// `numeric` are averaged out with their given probabilities.
pub fn arithmetize_partial(f: &CnfFormula, numeric: &ProbMap) -> Result<MultilinearPoly, Error> {
    let symbolic = f.vars().iter().filter(|v| !numeric.contains_key(*v)).count();
    let cap = var_cap(20);
    if symbolic > cap {
        return Err(Error::VarCap { vars: symbolic, cap });
    }
    let mut memo = HashMap::new();
    Ok(partial_rec(f, numeric, &mut memo))
}

fn partial_rec(f: &CnfFormula, numeric: &ProbMap, memo: &mut HashMap<CnfFormula, MultilinearPoly>) -> MultilinearPoly {
    if f.is_true() {
        return MultilinearPoly::one();
    }
    if f.is_false() {
        return MultilinearPoly::zero();
    }
    if let Some(p) = memo.get(f) {
        return p.clone();
    }
    let comps = connectivity(f);
    let result = if comps.len() > 1 {
        let mut acc = MultilinearPoly::one();
        for c in &comps {
            acc = acc.mul_disjoint(&partial_rec(c, numeric, memo)).expect("components share no variables");
        }
        acc
    } else {
        let mut freq: BTreeMap<&VarId, usize> = BTreeMap::new();
        for c in f.clauses() {
            for v in c {
                *freq.entry(v).or_default() += 1;
            }
        }
        let x = freq.iter().max_by(|a, b| a.1.cmp(b.1).then_with(|| b.0.cmp(a.0))).map(|(v, _)| (*v).clone()).expect("nonconstant");
        let a1 = partial_rec(&f.substitute_one(&x, true), numeric, memo);
        let a0 = partial_rec(&f.substitute_one(&x, false), numeric, memo);
        match numeric.get(&x) {
            Some(p) => a1.scale(p).add(&a0.scale(&(Rational::one() - p))),
            None => {
                let mut out = a0.clone();
                for (m, c) in a1.sub(&a0).terms {
                    let mut m = m;
                    m.insert(x.clone());
                    out.add_term(m, c);
                }
                out
            }
        }
    };
    memo.insert(f.clone(), result.clone());
    result
}

pub type Monomial = BTreeMap<VarId, u32>;

/// Sparse polynomial with arbitrary nonnegative exponents.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::new(), c);
        p
    }

    pub fn var(v: VarId) -> Self {
        let mut p = Poly::zero();
        p.add_term(Monomial::from([(v, 1)]), Rational::one());
        p
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Vec<(VarId, u32)>, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            let mut mono = Monomial::new();
            for (v, e) in m {
                if e > 0 {
                    *mono.entry(v).or_default() += e;
                }
            }
            p.add_term(mono, c);
        }
        p
    }

    fn add_term(&mut self, mono: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(mono.clone()).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&mono);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn vars(&self) -> BTreeSet<VarId> {
        self.terms.keys().flat_map(|m| m.keys()).cloned().collect()
    }

    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::new()).cloned(),
            _ => None,
        }
    }

    pub fn degree_in(&self, v: &VarId) -> u32 {
        self.terms.keys().map(|m| m.get(v).copied().unwrap_or(0)).max().unwrap_or(0)
    }

    /// Coefficient of `vᵏ`, as a polynomial free of `v`.
    pub fn coeff_of(&self, v: &VarId, k: u32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.get(v).copied().unwrap_or(0) == k {
                let mut m = m.clone();
                m.remove(v);
                out.add_term(m, c.clone());
            }
        }
        out
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, s: &Rational) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut m = a.clone();
                for (v, e) in b {
                    *m.entry(v.clone()).or_default() += e;
                }
                out.add_term(m, x * y);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::constant(Rational::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Partial evaluation.
    pub fn eval(&self, bindings: &BTreeMap<VarId, Rational>) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut coef = c.clone();
            let mut rest = Monomial::new();
            for (v, e) in m {
                match bindings.get(v) {
                    Some(x) => coef *= num_traits::pow(x.clone(), *e as usize),
                    None => {
                        rest.insert(v.clone(), *e);
                    }
                }
            }
            out.add_term(rest, coef);
        }
        out
    }

    pub fn eval_full(&self, point: &BTreeMap<VarId, Rational>) -> Result<Rational, Error> {
        self.eval(point).as_constant().ok_or_else(|| Error::Domain("evaluation point misses variables".into()))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let names = m.iter().map(|(v, e)| if *e == 1 { v.to_string() } else { format!("{v}^{e}") });
            fmt_monomial(f, c, i == 0, names)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The four restrictions `y_ab = y[r:=a, t:=b]` of the arithmetization of `f`.
pub fn small_matrix(f: &CnfFormula, r: &VarId, t: &VarId) -> Result<[[MultilinearPoly; 2]; 2], Error> {
    let mut out: [[MultilinearPoly; 2]; 2] = Default::default();
    for (a, row) in out.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            let bind = BTreeMap::from([(r.clone(), a == 1), (t.clone(), b == 1)]);
            *cell = arithmetize(&f.substitute(&bind))?;
        }
    }
    Ok(out)
}

/// `y00·y11 − y01·y10`, stored with general exponents.
pub fn small_matrix_det(f: &CnfFormula, r: &VarId, t: &VarId) -> Result<Poly, Error> {
    let vars = f.vars();
    if !vars.contains(r) || !vars.contains(t) {
        return Err(Error::Domain(format!("{r} and {t} must both occur in the formula")));
    }
    let y = small_matrix(f, r, t)?;
    Ok(y[0][0].to_poly().mul(&y[1][1].to_poly()).sub(&y[0][1].to_poly().mul(&y[1][0].to_poly())))
}

/// A point over `constants` at which `p` does not vanish.
///
/// Splits `p = g·x² + h·x + k` on its last variable, recursively finds a
/// non-root of a nonzero coefficient, and then picks a value of `x` that
/// avoids the at most `deg` roots of the remaining univariate polynomial.
pub fn find_nonroot(p: &Poly, constants: &[Rational]) -> Result<BTreeMap<VarId, Rational>, Error> {
    if p.is_zero() {
        return Err(Error::Domain("identically zero".into()));
    }
    let vars: Vec<VarId> = p.vars().into_iter().collect();
    for v in &vars {
        if p.degree_in(v) as usize >= constants.len() {
            return Err(Error::Domain(format!("degree of {v} exceeds the number of constants minus one")));
        }
    }
    let distinct: BTreeSet<&Rational> = constants.iter().collect();
    if distinct.len() != constants.len() {
        return Err(Error::Domain("constants must be distinct".into()));
    }
    nonroot_rec(p, &vars, constants)
}

fn nonroot_rec(p: &Poly, vars: &[VarId], constants: &[Rational]) -> Result<BTreeMap<VarId, Rational>, Error> {
    let Some((x, rest)) = vars.split_last() else {
        return Ok(BTreeMap::new());
    };
    let deg = p.degree_in(x);
    let lead = (0..=deg).rev().map(|k| p.coeff_of(x, k)).find(|q| !q.is_zero()).expect("nonzero polynomial");
    let mut theta = nonroot_rec(&lead, rest, constants)?;
    let uni = p.eval(&theta);
    for c in constants {
        let point = BTreeMap::from([(x.clone(), c.clone())]);
        if !uni.eval(&point).is_zero() {
            theta.insert(x.clone(), c.clone());
            return Ok(theta);
        }
    }
    Err(Error::Internal("univariate restriction vanished on all constants".into()))
}
