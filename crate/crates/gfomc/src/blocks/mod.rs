//! Block matrices, the design conditions, the coefficient matrices of the
//! type-I system, and the type-II assignment searches.

mod products;
mod type2;

pub use products::products_exponent_search;
pub use type2::{chain_eval, detd_search, theta0_search, DeadEndClass, DetDResult, Theta0, Type2Setup};

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};

use crate::exactla::{pow_i, quad_eigen, spectral_coeffs, QuadEigen, QuadNum, RatMatrix, Rational, SpectralCoeffs};
use crate::formula::{arithmetize, weighted_count, Poly, VarId};
use crate::lineage::{restricted_lineage, PendantMode};
use crate::query::{classify, minimize_query, Query, SideType};
use crate::tid::{build_zigzag_block, BlockSpec};
use crate::Error;

/// Entry order `00, 10, 11` used for the three distinct block values.
pub const ENTRIES: [(usize, usize); 3] = [(0, 0), (1, 0), (1, 1)];

fn require_type_one(q: &Query) -> Result<Query, Error> {
    let r = classify(q);
    if r.left_type != SideType::I || r.right_type != SideType::I {
        return Err(Error::Inapplicable("query is not of type I-I".into()));
    }
    Ok(r.query)
}

/// `z_ab(p)` computed directly: the lineage on the path block `B_p(u,v)`
/// with `R(u):=a`, `R(v):=b` and every other tuple at `c`.
pub fn brute_z(q: &Query, c: &Rational, p: usize) -> Result<RatMatrix, Error> {
    let q = require_type_one(q)?;
    let syms: Vec<String> = q.binary_symbols().into_iter().collect();
    let block = build_zigzag_block(&syms, &BlockSpec::type1("u", "v", p, c.clone()))?;
    let probs = block.free_probs();
    let mut rows = vec![vec![Rational::zero(); 2]; 2];
    for (a, row) in rows.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            let f = restricted_lineage(&q, &block, "u", "v", a == 1, b == 1)?;
            *cell = weighted_count(&f, &probs)?;
        }
    }
    RatMatrix::from_rows(rows)
}

/// `A⁽¹⁾` at probability `c`.
pub fn a1_matrix(q: &Query, c: &Rational) -> Result<RatMatrix, Error> {
    brute_z(q, c, 1)
}

/// `A⁽ᵖ⁾ = (A⁽¹⁾C)^{p−1}A⁽¹⁾` with `C = diag(1−c, c)`; `A⁽⁰⁾ = I`.
pub fn ap_matrix(a1: &RatMatrix, c: &Rational, p: usize) -> Result<RatMatrix, Error> {
    if a1.rows() != 2 || a1.cols() != 2 {
        return Err(Error::Dimension("A1 must be 2x2".into()));
    }
    if p == 0 {
        return Ok(RatMatrix::identity(2));
    }
    let cm = RatMatrix::diag(&[Rational::one() - c, c.clone()]);
    a1.mul(&cm)?.pow(p - 1)?.mul(a1)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaForm {
    pub vars: usize,
    pub alpha: Rational,
    pub matches_product_form: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DesignReport {
    pub a1: RatMatrix,
    pub b: RatMatrix,
    pub eigen: QuadEigen,
    pub coeffs: Option<SpectralCoeffs>,
    pub is_final: bool,
    pub ordering: bool,
    pub trace_positive: bool,
    pub lambda_ok: bool,
    /// `b_i ≠ 0` for `i = 00, 10, 11`.
    pub b_nonzero: [bool; 3],
    /// `a_i b_j ≠ a_j b_i` for the pairs `(00,10), (00,11), (10,11)`,
    /// from the spectral coefficients.
    pub cross_products_quad: [bool; 3],
    /// The same conditions from `y_i(1)y_j(2) − y_j(1)y_i(2) ≠ 0`.
    pub cross_products_seq: [bool; 3],
    pub fa_form: Option<FaForm>,
    pub failures: Vec<String>,
}

impl DesignReport {
    pub fn passes(&self) -> bool {
        self.failures.is_empty()
    }
}

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `det A⁽¹⁾` as a polynomial in the block's tuple probabilities, compared
/// with `α ∏ uᵢ(1−uᵢ)`.
pub fn fa_form(q: &Query) -> Result<FaForm, Error> {
    let q = require_type_one(q)?;
    let syms: Vec<String> = q.binary_symbols().into_iter().collect();
    let block = build_zigzag_block(&syms, &BlockSpec::type1("u", "v", 1, crate::exactla::half()))?;
    let mut y: [[Poly; 2]; 2] = Default::default();
    for (a, row) in y.iter_mut().enumerate() {
        for (b, cell) in row.iter_mut().enumerate() {
            *cell = arithmetize(&restricted_lineage(&q, &block, "u", "v", a == 1, b == 1)?)?.to_poly();
        }
    }
    let det = y[0][0].mul(&y[1][1]).sub(&y[0][1].mul(&y[1][0]));
    let vars: Vec<VarId> = block.free_probs().into_keys().filter(|v| v.name() != "R(u)" && v.name() != "R(v)").collect();
    let mut product = Poly::constant(Rational::one());
    for v in &vars {
        let x = Poly::var(v.clone());
        product = product.mul(&x.sub(&x.mul(&x)));
    }
    let top: BTreeMap<VarId, u32> = vars.iter().map(|v| (v.clone(), 1)).collect();
    let alpha = det.terms().find(|(m, _)| **m == top).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero);
    let matches_product_form = !alpha.is_zero() && det == product.scale(&alpha);
    Ok(FaForm { vars: vars.len(), alpha, matches_product_form })
}

/// Checks the conditions on the eigenvalues and spectral coefficients of
/// the type-I block for `Q` at probability `c`. Failures are collected,
/// not raised.
pub fn design_report(q: &Query, c: &Rational) -> Result<DesignReport, Error> {
    let report = classify(q);
    let q = require_type_one(&minimize_query(q))?;
    let mut failures = Vec::new();
    if !report.is_final {
        failures.push("query is not final".to_string());
    }
    let a1 = a1_matrix(&q, c)?;
    let cm = RatMatrix::diag(&[Rational::one() - c, c.clone()]);
    let b = a1.mul(&cm)?;
    let eigen = quad_eigen(&b)?;
    let ordering = a1[(0, 0)].is_positive()
        && a1[(0, 0)] < a1[(0, 1)]
        && a1[(0, 1)] == a1[(1, 0)]
        && a1[(1, 0)] < a1[(1, 1)]
        && a1[(1, 1)] <= Rational::one();
    if !ordering {
        failures.push("entries are not ordered z00 < z01 = z10 < z11".into());
    }
    let trace_positive = eigen.trace.is_positive();
    if !trace_positive {
        failures.push("trace(B) is not positive".into());
    }
    let lambda_ok = eigen.flags.all();
    if !lambda_ok {
        failures.push(format!("eigenvalue conditions fail: {:?}", eigen.flags));
    }
    let coeffs = spectral_coeffs(&a1, c).ok();
    let mut b_nonzero = [false; 3];
    let mut cross_products_quad = [false; 3];
    if let Some(sc) = &coeffs {
        let coef = |m: &[[QuadNum; 2]; 2], i: usize| m[ENTRIES[i].0][ENTRIES[i].1].clone();
        for (i, flag) in b_nonzero.iter_mut().enumerate() {
            *flag = !coef(&sc.b, i).is_zero();
        }
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            let lhs = &coef(&sc.a, i) * &coef(&sc.b, j);
            let rhs = &coef(&sc.a, j) * &coef(&sc.b, i);
            cross_products_quad[k] = !(&lhs - &rhs).is_zero();
        }
    }
    let a2 = ap_matrix(&a1, c, 2)?;
    let y = |m: &RatMatrix, i: usize| m[ENTRIES[i]].clone();
    let mut cross_products_seq = [false; 3];
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        cross_products_seq[k] = !(y(&a1, i) * y(&a2, j) - y(&a1, j) * y(&a2, i)).is_zero();
    }
    let names = ["00", "10", "11"];
    for (i, ok) in b_nonzero.iter().enumerate() {
        if !ok {
            failures.push(format!("b_{} is zero", names[i]));
        }
    }
    for (k, &(i, j)) in PAIRS.iter().enumerate() {
        if !cross_products_quad[k] || !cross_products_seq[k] {
            failures.push(format!("a_{0} b_{1} = a_{1} b_{0}", names[i], names[j]));
        }
        if coeffs.is_some() && cross_products_quad[k] != cross_products_seq[k] {
            failures.push(format!("spectral and sequence tests disagree on ({}, {})", names[i], names[j]));
        }
    }
    let nvars = 2 * q.binary_symbols().len() + 1;
    let fa = if nvars <= 14 { Some(fa_form(&q)?) } else { None };
    if let Some(f) = &fa {
        if !f.matches_product_form {
            failures.push("det A1 is not of the form alpha * prod u(1-u)".into());
        }
    }
    Ok(DesignReport {
        a1,
        b,
        eigen,
        coeffs,
        is_final: report.is_final,
        ordering,
        trace_positive,
        lambda_ok,
        b_nonzero,
        cross_products_quad,
        cross_products_seq,
        fa_form: fa,
        failures,
    })
}

/// Pendant factors `(y₀(t), y₁(t))` from `A⁽ᵗ⁾`.
pub fn pendant_values(a1: &RatMatrix, c: &Rational, t: usize, mode: PendantMode) -> Result<(Rational, Rational), Error> {
    let at = ap_matrix(a1, c, t)?;
    let w = |i: usize| match mode {
        PendantMode::PaperSum => &at[(i, 0)] + &at[(i, 1)],
        PendantMode::Semantic => (Rational::one() - c) * &at[(i, 0)] + c * &at[(i, 1)],
    };
    Ok((w(0), w(1)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PendantMatrix {
    pub ts: Vec<usize>,
    pub matrix: RatMatrix,
    /// Row ratios `c·y₁(t) / ((1−c)·y₀(t))`; the matrix is invertible
    /// exactly when they are pairwise distinct.
    pub quotients: Vec<Rational>,
    pub det: Rational,
}

/// `N[t][q] = (c·y₁(t))^q ((1−c)·y₀(t))^{n−q}` for `t = 1+shift .. n+1+shift`.
pub fn pendant_matrix(a1: &RatMatrix, c: &Rational, n: usize, mode: PendantMode, shift: usize) -> Result<PendantMatrix, Error> {
    let ts: Vec<usize> = (1 + shift..=n + 1 + shift).collect();
    let mut rows = Vec::new();
    let mut quotients = Vec::new();
    for &t in &ts {
        let (y0, y1) = pendant_values(a1, c, t, mode)?;
        if y0.is_zero() {
            return Err(Error::Domain(format!("pendant value y0({t}) vanishes")));
        }
        let one = c * &y1;
        let zero = (Rational::one() - c) * &y0;
        quotients.push(&one / &zero);
        rows.push((0..=n).map(|q| pow_i(&one, q as i64) * pow_i(&zero, (n - q) as i64)).collect());
    }
    let matrix = RatMatrix::from_rows(rows)?;
    let det = matrix.det()?;
    Ok(PendantMatrix { ts, matrix, quotients, det })
}

/// Values `(y₀₀, y₁₀, y₁₁)` of a single branch of length `p`.
pub type BranchValues = [Rational; 3];

/// The signature columns `(k₁₀, k₁₁) ∈ {0..m}²`, row-major.
pub fn grid_columns(m: usize) -> Vec<(usize, usize)> {
    (0..=m).flat_map(|a| (0..=m).map(move |b| (a, b))).collect()
}

/// One row of `𝓜`: `y₀₀(𝐩)^{k₀₀} y₁₀(𝐩)^{k₁₀} y₁₁(𝐩)^{k₁₁}` over the
/// columns, with `y_i(𝐩) = y_i(p₁)y_i(p₂)` and `k₀₀ = m − k₁₀ − k₁₁`,
/// which may be negative.
pub fn grid_row(y1: &BranchValues, y2: &BranchValues, m: usize) -> Result<Vec<Rational>, Error> {
    let v: Vec<Rational> = (0..3).map(|i| &y1[i] * &y2[i]).collect();
    if v[0].is_zero() {
        return Err(Error::Domain("y00 vanishes".into()));
    }
    Ok(grid_columns(m)
        .into_iter()
        .map(|(k10, k11)| {
            let k00 = m as i64 - k10 as i64 - k11 as i64;
            pow_i(&v[0], k00) * pow_i(&v[1], k10 as i64) * pow_i(&v[2], k11 as i64)
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMatrix {
    /// Branch lengths `(p₁, p₂)` of each row.
    pub rows: Vec<(usize, usize)>,
    pub matrix: RatMatrix,
    pub det: Rational,
}

/// Rows of `𝓜` chosen greedily: pairs `p₁ ≤ p₂` in lexicographic order
/// over `{1..K}`, a pair kept when it raises the rank, `K` starting at
/// `m + 1` and growing until `(m+1)²` rows are found. Rows depend on
/// `(p₁, p₂)` only symmetrically, so the full square grid `{1..m+1}²`
/// repeats rows.
pub fn grid_select(y: impl Fn(usize) -> Result<BranchValues, Error>, m: usize) -> Result<GridMatrix, Error> {
    let size = (m + 1) * (m + 1);
    let max_k = 4 * (m + 1) + 4;
    let mut cache: Vec<BranchValues> = Vec::new();
    let mut basis: Vec<(usize, Vec<Rational>)> = Vec::new();
    let mut rows = Vec::new();
    let mut chosen = Vec::new();
    let mut tried = std::collections::BTreeSet::new();
    for k in m + 1..=max_k {
        while cache.len() < k {
            cache.push(y(cache.len() + 1)?);
        }
        for p1 in 1..=k {
            for p2 in p1..=k {
                if rows.len() == size {
                    break;
                }
                if !tried.insert((p1, p2)) {
                    continue;
                }
                let row = grid_row(&cache[p1 - 1], &cache[p2 - 1], m)?;
                let mut r = row.clone();
                for (piv, b) in &basis {
                    if !r[*piv].is_zero() {
                        let f = r[*piv].clone();
                        for (x, bx) in r.iter_mut().zip(b) {
                            *x -= &f * bx;
                        }
                    }
                }
                if let Some(piv) = r.iter().position(|x| !x.is_zero()) {
                    let inv = Rational::one() / &r[piv];
                    let r: Vec<Rational> = r.iter().map(|x| x * &inv).collect();
                    for (_, b) in basis.iter_mut() {
                        if !b[piv].is_zero() {
                            let f = b[piv].clone();
                            for (x, rx) in b.iter_mut().zip(&r) {
                                *x -= &f * rx;
                            }
                        }
                    }
                    basis.push((piv, r));
                    rows.push((p1, p2));
                    chosen.push(row);
                }
            }
        }
        if rows.len() == size {
            let matrix = RatMatrix::from_rows(chosen)?;
            let det = matrix.det()?;
            return Ok(GridMatrix { rows, matrix, det });
        }
    }
    Err(Error::Singular { rank: rows.len(), null_witness: Vec::new() })
}

/// Branch values of a type-I block: entries `00, 10, 11` of `A⁽ᵖ⁾`.
pub fn branch_values(a1: &RatMatrix, c: &Rational, p: usize) -> Result<BranchValues, Error> {
    let a = ap_matrix(a1, c, p)?;
    Ok([a[(0, 0)].clone(), a[(1, 0)].clone(), a[(1, 1)].clone()])
}

pub fn grid_matrix(a1: &RatMatrix, c: &Rational, m: usize) -> Result<GridMatrix, Error> {
    grid_select(|p| branch_values(a1, c, p), m)
}

#[cfg(test)]
mod tests;
