use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::{P2cnf, Signature, SignatureTable};
use crate::blocks::{design_report, grid_columns, grid_matrix, pendant_matrix, GridMatrix, PendantMatrix};
use crate::exactla::{fmt_rational, gauss_solve_many, to_integer, RatMatrix, Rational};
use crate::lineage::{pr_structured, BlockValues, PendantMode};
use crate::query::Query;
use crate::tid::GraphSpec;
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineResult {
    pub phi_count: BigInt,
    pub table: SignatureTable,
    /// Selected edge-block lengths `(p₁, p₂)`, one per grid row.
    pub grid_rows: Vec<(usize, usize)>,
    /// Pendant lengths, one per row of `𝓝`.
    pub pendant_lengths: Vec<usize>,
    pub det_n: Rational,
    pub det_m: Rational,
    pub diagnostics: Vec<String>,
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Recovers `#Φ` and every signature count from probabilities of `Q` on
/// graph databases built from `Φ`, using `pr_structured` as the oracle.
pub fn type1_pipeline(q: &Query, phi: &P2cnf, c: &Rational, mode: PendantMode) -> Result<PipelineResult, Error> {
    let a1 = design_report(q, c)?.a1;
    let mut oracle = |g: &GraphSpec| {
        let bv = BlockValues::from_a1(&a1, c, (g.p1, g.p2), g.pendant, mode)?;
        pr_structured(g, &bv)
    };
    type1_pipeline_with(q, phi, c, mode, &mut oracle)
}

/// As [`type1_pipeline`], with probabilities supplied by `oracle`.
pub fn type1_pipeline_with(
    q: &Query,
    phi: &P2cnf,
    c: &Rational,
    mode: PendantMode,
    oracle: &mut dyn FnMut(&GraphSpec) -> Result<Rational, Error>,
) -> Result<PipelineResult, Error> {
    let report = design_report(q, c)?;
    if !report.passes() {
        return Err(Error::Inapplicable(format!("design conditions fail: {}", report.failures.join("; "))));
    }
    let (n, m) = (phi.n, phi.m());
    let mut diagnostics = Vec::new();
    if m == 0 {
        let mut table = SignatureTable::default();
        for q1 in 0..=n {
            table.counts.insert(Signature { k00: 0, k01: 0, k11: 0, q0: n - q1, q1 }, binomial(n, q1));
        }
        diagnostics.push("no clauses: every assignment satisfies".into());
        return Ok(PipelineResult {
            phi_count: BigInt::one() << n,
            table,
            grid_rows: Vec::new(),
            pendant_lengths: Vec::new(),
            det_n: Rational::one(),
            det_m: Rational::one(),
            diagnostics,
        });
    }
    let a1 = report.a1;
    let grid: GridMatrix = grid_matrix(&a1, c, m)?;
    if grid.det.is_zero() {
        return Err(Error::Internal("selected grid rows are singular".into()));
    }
    let mut pend: PendantMatrix = pendant_matrix(&a1, c, n, mode, 0)?;
    if pend.det.is_zero() {
        diagnostics.push(format!(
            "pendant matrix singular at t = 1..{}, quotients [{}]; shifting by one",
            n + 1,
            pend.quotients.iter().map(fmt_rational).collect::<Vec<_>>().join(", ")
        ));
        pend = pendant_matrix(&a1, c, n, mode, 1)?;
        if pend.det.is_zero() {
            return Err(Error::Singular { rank: n, null_witness: pend.quotients });
        }
    }
    let mut rows = Vec::new();
    for &t in &pend.ts {
        let mut row = Vec::new();
        for &(p1, p2) in &grid.rows {
            let g = GraphSpec { n, edges: phi.edges.clone(), p1, p2, pendant: Some(t), c: c.clone() };
            row.push(oracle(&g)?);
        }
        rows.push(row);
    }
    let p = RatMatrix::from_rows(rows)?;
    let y = gauss_solve_many(&pend.matrix, &p)?.0;
    let x = gauss_solve_many(&grid.matrix, &y.transpose())?.0.transpose();
    let mut table = SignatureTable::default();
    for q1 in 0..=n {
        for (col, (k10, k11)) in grid_columns(m).into_iter().enumerate() {
            let v = &x[(q1, col)];
            let k00 = m as i64 - k10 as i64 - k11 as i64;
            if k00 < 0 {
                if !v.is_zero() {
                    return Err(Error::Internal(format!(
                        "infeasible signature (k10={k10}, k11={k11}, q1={q1}) recovered {}",
                        fmt_rational(v)
                    )));
                }
                continue;
            }
            let count = to_integer(v).ok_or_else(|| Error::Internal(format!("non-integral count {}", fmt_rational(v))))?;
            if count < BigInt::zero() {
                return Err(Error::Internal(format!("negative count {count}")));
            }
            if !count.is_zero() {
                table.counts.insert(Signature { k00: k00 as usize, k01: k10, k11, q0: n - q1, q1 }, count);
            }
        }
    }
    if table.total() != BigInt::one() << n {
        return Err(Error::Internal("recovered counts do not sum to 2^n".into()));
    }
    Ok(PipelineResult {
        phi_count: table.phi_count(),
        table,
        grid_rows: grid.rows,
        pendant_lengths: pend.ts,
        det_n: pend.det,
        det_m: grid.det,
        diagnostics,
    })
}
