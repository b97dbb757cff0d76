//! Exact rational linear algebra and numbers in quadratic extensions.

mod matrix;
mod quad;
mod rational;

pub use matrix::RatMatrix;
pub use quad::{quad_eigen, spectral_coeffs, EigenFlags, QuadEigen, QuadNum, SpectralCoeffs};
pub use rational::{fmt_rational, half, int, is_probability, parse_rational, pow_i, rat, to_f64, to_integer, Rational};

use num_traits::{One, Zero};

use crate::Error;

/// Result of an exact linear solve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub x: Vec<Rational>,
    pub det: Rational,
}

/// Solves `A x = b` exactly and reports `det(A)`.
///
/// On a singular matrix the error carries the rank and a nonzero vector of
/// the null space.
pub fn gauss_solve(a: &RatMatrix, b: &[Rational]) -> Result<Solution, Error> {
    if b.len() != a.rows() {
        return Err(Error::Dimension("right-hand side length differs from row count".into()));
    }
    let bm = RatMatrix::from_rows(b.iter().map(|x| vec![x.clone()]).collect())?;
    let (x, det) = gauss_solve_many(a, &bm)?;
    Ok(Solution { x: (0..a.rows()).map(|i| x[(i, 0)].clone()).collect(), det })
}

/// Solves `A X = B` for every column of `B` with one Gauss-Jordan pass and
/// reports `det(A)`. Errors as [`gauss_solve`].
pub fn gauss_solve_many(a: &RatMatrix, b: &RatMatrix) -> Result<(RatMatrix, Rational), Error> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("{}x{} system is not square", a.rows(), a.cols())));
    }
    if b.rows() != a.rows() {
        return Err(Error::Dimension("right-hand side rows differ from the system".into()));
    }
    let n = a.rows();
    let w = n + b.cols();
    let mut m = RatMatrix::zeros(n, w);
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] = a[(i, j)].clone();
        }
        for j in 0..b.cols() {
            m[(i, n + j)] = b[(i, j)].clone();
        }
    }
    let mut det = Rational::one();
    let mut pivots: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        let Some(piv) = (row..n).find(|&r| !m[(r, col)].is_zero()) else {
            det = Rational::zero();
            continue;
        };
        if piv != row {
            m.swap_rows(piv, row);
            det = -det;
        }
        let p = m[(row, col)].clone();
        det *= &p;
        for c in col..w {
            if !m[(row, c)].is_zero() {
                let v = &m[(row, c)] / &p;
                m[(row, c)] = v;
            }
        }
        for r in 0..n {
            if r == row || m[(r, col)].is_zero() {
                continue;
            }
            let f = m[(r, col)].clone();
            for c in col..w {
                if m[(row, c)].is_zero() {
                    continue;
                }
                let v = &f * &m[(row, c)];
                m[(r, c)] -= v;
            }
        }
        pivots.push(col);
        row += 1;
    }
    if pivots.len() < n {
        let free = (0..n).find(|c| !pivots.contains(c)).unwrap_or(0);
        let mut witness = vec![Rational::zero(); n];
        witness[free] = Rational::one();
        for (r, &pc) in pivots.iter().enumerate() {
            witness[pc] = -m[(r, free)].clone();
        }
        return Err(Error::Singular { rank: pivots.len(), null_witness: witness });
    }
    let mut x = RatMatrix::zeros(n, b.cols());
    for i in 0..n {
        for j in 0..b.cols() {
            x[(i, j)] = m[(i, n + j)].clone();
        }
    }
    if a.mul(&x)? != *b {
        return Err(Error::Internal("nonzero residual after exact solve".into()));
    }
    Ok((x, det))
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let (br, bc) = (b.rows(), b.cols());
    let mut out = RatMatrix::zeros(a.rows() * br, a.cols() * bc);
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            let s = &a[(i, j)];
            if s.is_zero() {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[(i * br + k, j * bc + l)] = s * &b[(k, l)];
                }
            }
        }
    }
    out
}

/// Solves `(N ⊗ M) x = b` without forming the product: with `X` the
/// `rows(N) × rows(M)` reshaping of `x`, this is `X = N⁻¹ B M⁻ᵀ`.
pub fn kron_solve(n: &RatMatrix, m: &RatMatrix, b: &[Rational]) -> Result<Vec<Rational>, Error> {
    let (nr, mr) = (n.rows(), m.rows());
    if b.len() != nr * mr {
        return Err(Error::Dimension("right-hand side does not match N ⊗ M".into()));
    }
    let rows: Vec<Vec<Rational>> = b.chunks(mr).map(|c| c.to_vec()).collect();
    let bm = RatMatrix::from_rows(rows)?;
    let y = gauss_solve_many(n, &bm)?.0;
    let x = gauss_solve_many(m, &y.transpose())?.0.transpose();
    Ok((0..nr).flat_map(|i| x.row(i).to_vec()).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CauchyCheck {
    pub det: Rational,
    pub formula_value: Rational,
    pub equal: bool,
}

/// Compares `det[1/(cᵢ+zⱼ)]` with `∏_{i<j}(cᵢ−cⱼ)(zᵢ−zⱼ) / ∏_{i,j}(cᵢ+zⱼ)`.
pub fn cauchy_det_check(c: &[Rational], z: &[Rational]) -> Result<CauchyCheck, Error> {
    if c.len() != z.len() {
        return Err(Error::Dimension("c and z differ in length".into()));
    }
    let h = c.len();
    let mut m = RatMatrix::zeros(h, h);
    let mut denom = Rational::one();
    for i in 0..h {
        for j in 0..h {
            let s = &c[i] + &z[j];
            if s.is_zero() {
                return Err(Error::Domain(format!("c[{i}] + z[{j}] = 0")));
            }
            m[(i, j)] = s.recip();
            denom *= s;
        }
    }
    let mut numer = Rational::one();
    for i in 0..h {
        for j in i + 1..h {
            numer *= (&c[i] - &c[j]) * (&z[i] - &z[j]);
        }
    }
    let det = m.det()?;
    let formula_value = numer / denom;
    let equal = det == formula_value;
    Ok(CauchyCheck { det, formula_value, equal })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> RatMatrix {
        RatMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()).unwrap()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![rat(1, 3), int(-2), int(5)];
        let s = gauss_solve(&RatMatrix::identity(3), &b).unwrap();
        assert_eq!(s.x, b);
        assert_eq!(s.det, int(1));
    }

    #[test]
    fn vandermonde_interpolates_square() {
        let v = m(&[&[1, 1, 1], &[1, 2, 4], &[1, 3, 9]]);
        let s = gauss_solve(&v, &[int(1), int(4), int(9)]).unwrap();
        assert_eq!(s.x, vec![int(0), int(0), int(1)]);
        assert_eq!(s.det, int(2));
    }

    #[test]
    fn singular_reports_rank_and_witness() {
        let a = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(a.det().unwrap(), int(0));
        match gauss_solve(&a, &[int(1), int(2)]) {
            Err(Error::Singular { rank, null_witness }) => {
                assert_eq!(rank, 1);
                assert!(a.mul_vec(&null_witness).unwrap().iter().all(|x| x.is_zero()));
                assert!(null_witness.iter().any(|x| !x.is_zero()));
            }
            other => panic!("expected singular, got {other:?}"),
        }
    }

    #[test]
    fn kron_layout() {
        assert_eq!(kron(&RatMatrix::identity(2), &RatMatrix::identity(2)), RatMatrix::identity(4));
        let a = m(&[&[1, 2], &[3, 4]]);
        let b = m(&[&[5, 6], &[7, 8]]);
        let k = kron(&a, &b);
        assert_eq!(k[(0, 3)], int(12));
        assert_eq!(k[(3, 0)], int(21));
        assert_eq!(k.det().unwrap(), num_traits::pow(a.det().unwrap(), 2) * num_traits::pow(b.det().unwrap(), 2));
    }

    #[test]
    fn kron_solve_matches_materialized() {
        let n = m(&[&[2, 1], &[1, 3]]);
        let mm = m(&[&[1, 0, 2], &[0, 1, 1], &[1, 1, 0]]);
        let b: Vec<Rational> = (1..=6).map(int).collect();
        let direct = gauss_solve(&kron(&n, &mm), &b).unwrap().x;
        assert_eq!(kron_solve(&n, &mm, &b).unwrap(), direct);
    }

    #[test]
    fn cauchy_examples() {
        let r = cauchy_det_check(&[int(0), int(1)], &[int(2), int(3)]).unwrap();
        assert_eq!(r.det, rat(1, 72));
        assert!(r.equal);
        let r = cauchy_det_check(&[int(2)], &[int(5)]).unwrap();
        assert_eq!(r.det, rat(1, 7));
        let r = cauchy_det_check(&[int(1), int(1)], &[int(2), int(3)]).unwrap();
        assert!(r.det.is_zero() && r.formula_value.is_zero());
    }
}
