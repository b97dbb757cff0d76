use std::collections::BTreeMap;

use num_bigint::BigInt;

use super::Pp2cnf;
use crate::Error;

const CCP_CAP: f64 = 1e6;

/// Coloring counts of a bipartite graph: left nodes colored from `1..=m`,
/// right nodes from `1..=n`. A signature is the `(m+1)×(n+1)` matrix,
/// row-major, whose entry `(α, β)` counts edges colored `(α, β)`; row `m`
/// (the `1̂` row) counts right nodes by color, column `n` counts left
/// nodes by color, and the corner is 0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CcpCounts {
    pub m: usize,
    pub n: usize,
    pub counts: BTreeMap<Vec<usize>, BigInt>,
}

impl CcpCounts {
    pub fn total(&self) -> BigInt {
        self.counts.values().sum()
    }

    pub fn entry(sig: &[usize], n: usize, alpha: usize, beta: usize) -> usize {
        sig[alpha * (n + 1) + beta]
    }
}

fn advance(digits: &mut [usize], base: usize) -> bool {
    for d in digits.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Enumerates all colorings of `(U, V, E)` with `U = 1..=nu`, `V = 1..=nv`.
pub fn ccp_brute(nu: usize, nv: usize, edges: &[(usize, usize)], m: usize, n: usize) -> Result<CcpCounts, Error> {
    if m == 0 || n == 0 {
        return Err(Error::Domain("need at least one color per side".into()));
    }
    if edges.iter().any(|&(u, v)| u == 0 || v == 0 || u > nu || v > nv) {
        return Err(Error::Domain("edge endpoint out of range".into()));
    }
    let colorings = (m as f64).powi(nu as i32) * (n as f64).powi(nv as i32);
    if colorings > CCP_CAP {
        return Err(Error::VarCap { vars: nu + nv, cap: CCP_CAP as usize });
    }
    let width = n + 1;
    let mut counts = BTreeMap::new();
    let mut sigma = vec![0usize; nu];
    loop {
        let mut tau = vec![0usize; nv];
        loop {
            let mut sig = vec![0usize; (m + 1) * width];
            for &(u, v) in edges {
                sig[sigma[u - 1] * width + tau[v - 1]] += 1;
            }
            for &a in &sigma {
                sig[a * width + n] += 1;
            }
            for &b in &tau {
                sig[m * width + b] += 1;
            }
            *counts.entry(sig).or_insert_with(BigInt::default) += 1;
            if !advance(&mut tau, n) {
                break;
            }
        }
        if !advance(&mut sigma, m) {
            break;
        }
    }
    Ok(CcpCounts { m, n, counts })
}

/// `#Φ` from coloring counts: colorings that use only the first two
/// colors on each side are truth assignments (color 1 false, color 2
/// true), and they satisfy `Φ` exactly when no edge is colored `(1, 1)`.
pub fn pp2cnf_via_ccp(phi: &Pp2cnf, m: usize, n: usize) -> Result<BigInt, Error> {
    if m < 2 || n < 2 {
        return Err(Error::Domain("the coloring problem needs at least two colors per side".into()));
    }
    let ccp = ccp_brute(phi.nx, phi.ny, &phi.edges, m, n)?;
    let mut total = BigInt::default();
    for (sig, count) in &ccp.counts {
        let valid = (0..=m).all(|a| (0..=n).all(|b| (a < 2 || a == m) && (b < 2 || b == n) || CcpCounts::entry(sig, n, a, b) == 0));
        if valid && CcpCounts::entry(sig, n, 0, 0) == 0 {
            total += count;
        }
    }
    Ok(total)
}

/// `#Φ` by enumeration.
pub fn brute_pp2cnf(phi: &Pp2cnf) -> Result<BigInt, Error> {
    let vars = phi.nx + phi.ny;
    let cap = crate::formula::var_cap(24);
    if vars > cap {
        return Err(Error::VarCap { vars, cap });
    }
    let mut count = 0u64;
    for bits in 0u64..1 << vars {
        let x = |i: usize| (bits >> (i - 1)) & 1 == 1;
        let y = |j: usize| (bits >> (phi.nx + j - 1)) & 1 == 1;
        if phi.edges.iter().all(|&(i, j)| x(i) || y(j)) {
            count += 1;
        }
    }
    Ok(BigInt::from(count))
}
