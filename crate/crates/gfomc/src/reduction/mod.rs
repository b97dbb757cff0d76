//! Counting problems and the reductions between them: `#P2CNF` through a
//! type-I query, signature counts, and `#PP2CNF` through the coloring
//! counting problem.

mod ccp;
mod pipeline;

pub use ccp::{brute_pp2cnf, ccp_brute, pp2cnf_via_ccp, CcpCounts};
pub use pipeline::{type1_pipeline, type1_pipeline_with, PipelineResult};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;

use crate::formula::var_cap;
use crate::Error;

/// `Φ = ∧_{(i,j)∈E} (Xᵢ ∨ Xⱼ)` over variables `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct P2cnf {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl P2cnf {
    pub fn new(n: usize, edges: Vec<(usize, usize)>) -> Result<P2cnf, Error> {
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &edges {
            if i == 0 || j == 0 || i > n || j > n {
                return Err(Error::Domain(format!("clause ({i},{j}) mentions a variable outside 1..{n}")));
            }
            if i == j {
                return Err(Error::Domain(format!("clause ({i},{i}) is not a 2-clause")));
            }
            if !seen.insert((i.min(j), i.max(j))) {
                return Err(Error::Domain(format!("clause ({i},{j}) repeated")));
            }
        }
        Ok(P2cnf { n, edges })
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }
}

fn parse_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, tag: &str, fields: usize) -> Result<Vec<usize>, Error> {
    let (line, header) = lines.next().ok_or_else(|| Error::Syntax { line: 1, col: 1, msg: format!("missing `{tag}` header") })?;
    let mut it = header.split_whitespace();
    if it.next() != Some(tag) {
        return Err(Error::Syntax { line, col: 1, msg: format!("expected `{tag}` header") });
    }
    let nums: Vec<usize> = it
        .map(|t| t.parse().map_err(|_| Error::Syntax { line, col: 1, msg: format!("bad number `{t}`") }))
        .collect::<Result<_, _>>()?;
    if nums.len() != fields {
        return Err(Error::Syntax { line, col: 1, msg: format!("`{tag}` header takes {fields} numbers") });
    }
    Ok(nums)
}

fn parse_pairs<'a>(lines: impl Iterator<Item = (usize, &'a str)>, expected: usize) -> Result<Vec<(usize, usize)>, Error> {
    let mut out = Vec::new();
    let mut last = 1;
    for (line, text) in lines {
        last = line;
        let nums: Vec<&str> = text.split_whitespace().collect();
        let [a, b] = nums.as_slice() else {
            return Err(Error::Syntax { line, col: 1, msg: "expected two numbers".into() });
        };
        let parse = |t: &str| t.parse::<usize>().map_err(|_| Error::Syntax { line, col: 1, msg: format!("bad number `{t}`") });
        out.push((parse(a)?, parse(b)?));
    }
    if out.len() != expected {
        return Err(Error::Syntax { line: last, col: 1, msg: format!("expected {expected} clauses, found {}", out.len()) });
    }
    Ok(out)
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty() && *l != "c" && !l.starts_with("c "))
}

impl FromStr for P2cnf {
    type Err = Error;

    /// Header `p2cnf n m`, then `m` lines `i j`.
    fn from_str(text: &str) -> Result<P2cnf, Error> {
        let mut lines = content_lines(text);
        let h = parse_header(&mut lines, "p2cnf", 2)?;
        P2cnf::new(h[0], parse_pairs(lines, h[1])?)
    }
}

impl fmt::Display for P2cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p2cnf {} {}", self.n, self.edges.len())?;
        for (i, j) in &self.edges {
            writeln!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

/// `Φ = ∧_{(i,j)∈E} (Xᵢ ∨ Yⱼ)` over `X₁..X_nx`, `Y₁..Y_ny`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pp2cnf {
    pub nx: usize,
    pub ny: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Pp2cnf {
    pub fn new(nx: usize, ny: usize, edges: Vec<(usize, usize)>) -> Result<Pp2cnf, Error> {
        let mut seen = std::collections::BTreeSet::new();
        for &(i, j) in &edges {
            if i == 0 || j == 0 || i > nx || j > ny {
                return Err(Error::Domain(format!("clause ({i},{j}) out of range")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::Domain(format!("clause ({i},{j}) repeated")));
            }
        }
        Ok(Pp2cnf { nx, ny, edges })
    }
}

impl FromStr for Pp2cnf {
    type Err = Error;

    /// Header `pp2cnf nx ny m`, then `m` lines `i j` meaning `Xᵢ ∨ Yⱼ`.
    fn from_str(text: &str) -> Result<Pp2cnf, Error> {
        let mut lines = content_lines(text);
        let h = parse_header(&mut lines, "pp2cnf", 3)?;
        Pp2cnf::new(h[0], h[1], parse_pairs(lines, h[2])?)
    }
}

impl fmt::Display for Pp2cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "pp2cnf {} {} {}", self.nx, self.ny, self.edges.len())?;
        for (i, j) in &self.edges {
            writeln!(f, "{i} {j}")?;
        }
        Ok(())
    }
}

fn check_cap(n: usize, default: usize) -> Result<(), Error> {
    let cap = var_cap(default);
    if n > cap {
        return Err(Error::VarCap { vars: n, cap });
    }
    Ok(())
}

/// `#Φ` by enumeration.
pub fn brute_p2cnf(phi: &P2cnf) -> Result<BigInt, Error> {
    check_cap(phi.n, 24)?;
    let mut count = 0u64;
    for bits in 0u64..1 << phi.n {
        if phi.edges.iter().all(|&(i, j)| (bits >> (i - 1)) & 1 == 1 || (bits >> (j - 1)) & 1 == 1) {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}

/// `(k₀₀, k₀₁,₁₀, k₁₁, q₀, q₁)`: clauses by the values of their two
/// variables, direction ignored, and variables by value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Signature {
    pub k00: usize,
    pub k01: usize,
    pub k11: usize,
    pub q0: usize,
    pub q1: usize,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{},{})", self.k00, self.k01, self.k11, self.q0, self.q1)
    }
}

/// Nonzero signature counts; absent signatures count 0.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SignatureTable {
    pub counts: BTreeMap<Signature, BigInt>,
}

impl SignatureTable {
    pub fn get(&self, s: &Signature) -> BigInt {
        self.counts.get(s).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }

    /// `#Φ = Σ_{k₀₀ = 0} #k`.
    pub fn phi_count(&self) -> BigInt {
        self.counts.iter().filter(|(s, _)| s.k00 == 0).map(|(_, c)| c).sum()
    }
}

pub fn signature_of(phi: &P2cnf, theta: u64) -> Signature {
    let val = |i: usize| (theta >> (i - 1)) & 1;
    let mut s = Signature { k00: 0, k01: 0, k11: 0, q0: 0, q1: 0 };
    for &(i, j) in &phi.edges {
        match val(i) + val(j) {
            0 => s.k00 += 1,
            1 => s.k01 += 1,
            _ => s.k11 += 1,
        }
    }
    s.q1 = (1..=phi.n).filter(|&i| val(i) == 1).count();
    s.q0 = phi.n - s.q1;
    s
}

pub fn brute_signatures(phi: &P2cnf) -> Result<SignatureTable, Error> {
    check_cap(phi.n, 20)?;
    let mut t = SignatureTable::default();
    for theta in 0u64..1 << phi.n {
        *t.counts.entry(signature_of(phi, theta)).or_default() += 1;
    }
    Ok(t)
}

#[cfg(test)]
mod tests;
