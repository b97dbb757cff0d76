use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};

use super::matrix::RatMatrix;
use super::rational::{fmt_rational, int, Rational};
use crate::Error;

/// `a + b·√d` with rational `a`, `b`, `d`.
///
/// Values that share `d` form a field (when `d` is not a rational square).
/// A rational-square `d` is folded into `a` on construction so that `b` is
/// only nonzero when `√d` is irrational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadNum {
    pub a: Rational,
    pub b: Rational,
    pub d: Rational,
}

fn rational_sqrt(d: &Rational) -> Option<Rational> {
    if d.is_negative() {
        return None;
    }
    let n = d.numer().sqrt();
    let m = d.denom().sqrt();
    if &(&n * &n) == d.numer() && &(&m * &m) == d.denom() {
        Some(Rational::new(n, m))
    } else {
        None
    }
}

impl QuadNum {
    pub fn new(a: Rational, b: Rational, d: Rational) -> Self {
        if b.is_zero() {
            return QuadNum { a, b, d };
        }
        match rational_sqrt(&d) {
            Some(r) => QuadNum { a: a + b * r, b: Rational::zero(), d },
            None => QuadNum { a, b, d },
        }
    }

    pub fn from_rational(a: Rational, d: &Rational) -> Self {
        QuadNum { a, b: Rational::zero(), d: d.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn conj(&self) -> Self {
        QuadNum { a: self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }

    /// `a² − b²d`, the product with the conjugate.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - &self.b * &self.b * &self.d
    }

    pub fn recip(&self) -> Result<Self, Error> {
        let n = self.norm();
        if n.is_zero() {
            return Err(Error::Domain("division by zero in quadratic extension".into()));
        }
        Ok(QuadNum { a: &self.a / &n, b: -&self.b / &n, d: self.d.clone() })
    }

    pub fn div(&self, other: &QuadNum) -> Result<Self, Error> {
        Ok(self * &other.recip()?)
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = QuadNum::from_rational(Rational::one(), &self.d);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    pub fn scale(&self, s: &Rational) -> Self {
        QuadNum { a: &self.a * s, b: &self.b * s, d: self.d.clone() }
    }

    fn check_d(&self, other: &QuadNum) {
        debug_assert!(self.b.is_zero() || other.b.is_zero() || self.d == other.d, "mismatched radicands");
    }

    fn shared_d(&self, other: &QuadNum) -> Rational {
        if self.b.is_zero() {
            other.d.clone()
        } else {
            self.d.clone()
        }
    }
}

impl Add for &QuadNum {
    type Output = QuadNum;
    fn add(self, o: &QuadNum) -> QuadNum {
        self.check_d(o);
        QuadNum { a: &self.a + &o.a, b: &self.b + &o.b, d: self.shared_d(o) }
    }
}

impl Sub for &QuadNum {
    type Output = QuadNum;
    fn sub(self, o: &QuadNum) -> QuadNum {
        self.check_d(o);
        QuadNum { a: &self.a - &o.a, b: &self.b - &o.b, d: self.shared_d(o) }
    }
}

impl Mul for &QuadNum {
    type Output = QuadNum;
    fn mul(self, o: &QuadNum) -> QuadNum {
        self.check_d(o);
        let d = self.shared_d(o);
        QuadNum {
            a: &self.a * &o.a + &self.b * &o.b * &d,
            b: &self.a * &o.b + &self.b * &o.a,
            d,
        }
    }
}

impl Neg for &QuadNum {
    type Output = QuadNum;
    fn neg(self) -> QuadNum {
        QuadNum { a: -self.a.clone(), b: -self.b.clone(), d: self.d.clone() }
    }
}

impl fmt::Display for QuadNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", fmt_rational(&self.a))
        } else {
            write!(f, "{} + {}*sqrt({})", fmt_rational(&self.a), fmt_rational(&self.b), fmt_rational(&self.d))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EigenFlags {
    /// `det(B) ≠ 0`, so neither eigenvalue vanishes.
    pub nonzero: bool,
    /// Discriminant nonzero.
    pub distinct: bool,
    /// `trace(B) ≠ 0`, so `λ₁ ≠ −λ₂`.
    pub not_opposite: bool,
    /// Discriminant positive: both eigenvalues real, distinct, and one of
    /// them strictly larger in absolute value when the trace is nonzero.
    pub real_distinct_dominant: bool,
}

impl EigenFlags {
    pub fn all(&self) -> bool {
        self.nonzero && self.distinct && self.not_opposite && self.real_distinct_dominant
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadEigen {
    /// `(tr − √disc)/2`
    pub lambda1: QuadNum,
    /// `(tr + √disc)/2`
    pub lambda2: QuadNum,
    pub trace: Rational,
    pub det: Rational,
    pub disc: Rational,
    pub flags: EigenFlags,
}

/// Eigenvalues of a 2×2 rational matrix as elements of `Q(√disc)`.
pub fn quad_eigen(b: &RatMatrix) -> Result<QuadEigen, Error> {
    if b.rows() != 2 || b.cols() != 2 {
        return Err(Error::Dimension("quad_eigen expects a 2x2 matrix".into()));
    }
    let trace = b.trace();
    let det = b.det()?;
    let disc = &trace * &trace - int(4) * &det;
    let h = Rational::new(1.into(), 2.into());
    let lambda1 = QuadNum::new(&trace * &h, -h.clone(), disc.clone());
    let lambda2 = QuadNum::new(&trace * &h, h, disc.clone());
    let flags = EigenFlags {
        nonzero: !det.is_zero(),
        distinct: !disc.is_zero(),
        not_opposite: !trace.is_zero(),
        real_distinct_dominant: disc.is_positive(),
    };
    Ok(QuadEigen { lambda1, lambda2, trace, det, disc, flags })
}

/// Spectral coefficients of `A⁽ᵖ⁾ = (A₁C)^{p−1} A₁`.
///
/// With `B = A₁C = λ₁P₁ + λ₂P₂`, entries satisfy
/// `A⁽ᵖ⁾ᵢⱼ = aᵢⱼλ₁ᵖ + bᵢⱼλ₂ᵖ` where `a = P₁C⁻¹`, `b = P₂C⁻¹`, and
/// `Bᵖᵢⱼ = âᵢⱼλ₁ᵖ + b̂ᵢⱼλ₂ᵖ` where `â = P₁`, `b̂ = P₂`. Only the second pair
/// sums to the identity at `p = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectralCoeffs {
    pub eigen: QuadEigen,
    pub a: [[QuadNum; 2]; 2],
    pub b: [[QuadNum; 2]; 2],
    pub a_hat: [[QuadNum; 2]; 2],
    pub b_hat: [[QuadNum; 2]; 2],
}

impl SpectralCoeffs {
    pub fn entry(&self, p: usize, i: usize, j: usize) -> QuadNum {
        &(&self.a[i][j] * &self.eigen.lambda1.pow(p)) + &(&self.b[i][j] * &self.eigen.lambda2.pow(p))
    }

    pub fn power_entry(&self, p: usize, i: usize, j: usize) -> QuadNum {
        &(&self.a_hat[i][j] * &self.eigen.lambda1.pow(p)) + &(&self.b_hat[i][j] * &self.eigen.lambda2.pow(p))
    }
}

pub fn spectral_coeffs(a1: &RatMatrix, c: &Rational) -> Result<SpectralCoeffs, Error> {
    let one = Rational::one();
    let cm = RatMatrix::diag(&[&one - c, c.clone()]);
    let cinv = cm.inverse()?;
    let b = a1.mul(&cm)?;
    let eigen = quad_eigen(&b)?;
    if !eigen.flags.distinct {
        return Err(Error::Domain("repeated eigenvalue".into()));
    }
    let d = eigen.disc.clone();
    let q = |r: &Rational| QuadNum::from_rational(r.clone(), &d);
    let diff12 = &eigen.lambda1 - &eigen.lambda2;
    let inv12 = diff12.recip()?;
    let inv21 = (-&diff12).recip()?;
    let mut a_hat: [[QuadNum; 2]; 2] = Default::default();
    let mut b_hat: [[QuadNum; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            let bij = q(&b[(i, j)]);
            let delta = if i == j { QuadNum::from_rational(one.clone(), &d) } else { q(&Rational::zero()) };
            a_hat[i][j] = &(&bij - &(&eigen.lambda2 * &delta)) * &inv12;
            b_hat[i][j] = &(&bij - &(&eigen.lambda1 * &delta)) * &inv21;
        }
    }
    let mut a: [[QuadNum; 2]; 2] = Default::default();
    let mut bb: [[QuadNum; 2]; 2] = Default::default();
    for i in 0..2 {
        for j in 0..2 {
            a[i][j] = a_hat[i][j].scale(&cinv[(j, j)]);
            bb[i][j] = b_hat[i][j].scale(&cinv[(j, j)]);
        }
    }
    Ok(SpectralCoeffs { eigen, a, b: bb, a_hat, b_hat })
}

impl Default for QuadNum {
    fn default() -> Self {
        QuadNum { a: Rational::zero(), b: Rational::zero(), d: Rational::zero() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::rat;

    fn r(rows: [[Rational; 2]; 2]) -> RatMatrix {
        RatMatrix::from_rows(rows.into_iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn rational_arithmetic_when_b_zero() {
        let d = int(5);
        let x = QuadNum::from_rational(rat(2, 3), &d);
        let y = QuadNum::from_rational(rat(-1, 4), &d);
        assert_eq!((&x * &y).a, rat(-1, 6));
        assert_eq!((&x + &y).a, rat(5, 12));
        assert_eq!(x.div(&y).unwrap().a, rat(-8, 3));
    }

    #[test]
    fn square_radicand_folds() {
        let x = QuadNum::new(int(1), int(1), rat(9, 4));
        assert_eq!(x, QuadNum { a: rat(5, 2), b: int(0), d: rat(9, 4) });
    }

    #[test]
    fn sqrt_squared() {
        let s = QuadNum::new(int(0), int(1), int(2));
        assert_eq!((&s * &s).a, int(2));
        assert!((&s * &s).b.is_zero());
        let inv = s.recip().unwrap();
        assert_eq!(&s * &inv, QuadNum::from_rational(int(1), &int(2)));
    }

    #[test]
    fn eigen_flags_examples() {
        let b = r([[rat(1, 8), rat(3, 16)], [rat(3, 16), rat(5, 16)]]);
        let e = quad_eigen(&b).unwrap();
        assert_eq!(e.trace, rat(7, 16));
        assert_eq!(e.det, rat(1, 256));
        assert_eq!(e.disc, rat(45, 256));
        assert!(e.flags.all());
        assert!(!quad_eigen(&RatMatrix::identity(2)).unwrap().flags.distinct);
        let swap = r([[int(0), int(1)], [int(1), int(0)]]);
        assert!(!quad_eigen(&swap).unwrap().flags.not_opposite);
    }

    #[test]
    fn spectral_reconstruction() {
        let a1 = r([[rat(1, 4), rat(3, 8)], [rat(3, 8), rat(5, 8)]]);
        let c = rat(1, 2);
        let s = spectral_coeffs(&a1, &c).unwrap();
        let cm = RatMatrix::diag(&[rat(1, 2), rat(1, 2)]);
        let b = a1.mul(&cm).unwrap();
        for p in 1..=4 {
            let ap = b.pow(p - 1).unwrap().mul(&a1).unwrap();
            let bp = b.pow(p).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert_eq!(s.entry(p, i, j), QuadNum::from_rational(ap[(i, j)].clone(), &s.eigen.disc));
                    assert_eq!(s.power_entry(p, i, j), QuadNum::from_rational(bp[(i, j)].clone(), &s.eigen.disc));
                }
            }
        }
        let one = QuadNum::from_rational(int(1), &s.eigen.disc);
        assert_eq!(&s.a_hat[0][0] + &s.b_hat[0][0], one);
        assert!((&s.a_hat[1][0] + &s.b_hat[1][0]).is_zero());
        assert_eq!(s.a[0][1], s.a[1][0]);
        assert_eq!(s.b[0][1], s.b[1][0]);
    }
}
