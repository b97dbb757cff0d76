use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::ground_lineage;
use crate::exactla::Rational;
use crate::formula::{weighted_count, CnfFormula, VarId};
use crate::query::{Lattice, TypeTwo};
use crate::tid::Tid;
use crate::Error;

/// Grounds a lattice formula (a CNF over symbol names read at one pair)
/// at `(x, y)` for every `y` on the other side of the block.
fn ground_lattice_formula(f: &CnfFormula, fixed: &str, block: &Tid, left: bool) -> CnfFormula {
    let others = if left { &block.right } else { &block.left };
    let mut clauses = Vec::new();
    for o in others {
        let (x, y) = if left { (fixed, o.as_str()) } else { (o.as_str(), fixed) };
        for c in f.clauses() {
            let atoms: Vec<VarId> = c.iter().map(|s| VarId::binary(s.name(), x, y)).collect();
            if atoms.iter().any(|a| block.prob(a).is_one()) {
                continue;
            }
            clauses.push(atoms.into_iter().filter(|a| !block.prob(a).is_zero()).collect::<Vec<_>>());
        }
    }
    CnfFormula::new(clauses)
}

/// `Φ_B(G_α(u) ∧ Q ∧ H_β(v))` for lattice indices `α`, `β`
/// (`Lattice::TOP` drops the corresponding conjunct).
pub fn restricted_lineage_t2(
    tt: &TypeTwo,
    block: &Tid,
    u: &str,
    v: &str,
    alpha: usize,
    beta: usize,
) -> Result<CnfFormula, Error> {
    if !block.is_left(u) || !block.is_right(v) {
        return Err(Error::Domain(format!("endpoints {u},{v} are not in the block")));
    }
    if alpha >= tt.left.elements.len() || beta >= tt.right.elements.len() {
        return Err(Error::Domain("lattice index out of range".into()));
    }
    let mut f = ground_lineage(&tt.query, block);
    if alpha != Lattice::TOP {
        f = f.and(&ground_lattice_formula(tt.g_alpha(alpha), u, block, true));
    }
    if beta != Lattice::TOP {
        f = f.and(&ground_lattice_formula(tt.h_beta(beta), v, block, false));
    }
    Ok(f)
}

/// Blocks between left nodes `U` and right nodes `V`, plus optional
/// pendant blocks `B(u,u')` and `B(v',v)`. Missing pairs are trivial.
#[derive(Clone, Debug, Default)]
pub struct Type2Graph {
    pub u_nodes: Vec<String>,
    pub v_nodes: Vec<String>,
    pub blocks: BTreeMap<(String, String), Tid>,
    pub u_pendants: BTreeMap<String, (String, Tid)>,
    pub v_pendants: BTreeMap<String, (String, Tid)>,
}

impl Type2Graph {
    /// The union database.
    pub fn tid(&self) -> Result<Tid, Error> {
        let mut tid = Tid::new(true);
        for u in &self.u_nodes {
            tid.add_left(u.clone())?;
        }
        for v in &self.v_nodes {
            tid.add_right(v.clone())?;
        }
        for b in self.blocks.values() {
            tid.merge(b)?;
        }
        for (_, b) in self.u_pendants.values().chain(self.v_pendants.values()) {
            tid.merge(b)?;
        }
        Ok(tid)
    }
}

fn block_table(
    tt: &TypeTwo,
    block: &Tid,
    u: &str,
    v: &str,
    alphas: &[usize],
    betas: &[usize],
) -> Result<BTreeMap<(usize, usize), Rational>, Error> {
    let probs = block.free_probs();
    let mut out = BTreeMap::new();
    for &a in alphas {
        for &b in betas {
            let f = restricted_lineage_t2(tt, block, u, v, a, b)?;
            out.insert((a, b), weighted_count(&f, &probs)?);
        }
    }
    Ok(out)
}

/// The Möbius expansion of `Pr(Q)` over a disjoint union of blocks:
/// `(−1)^{|U|+|V|} Σ_{σ,τ} ∏μ(σ(u)) ∏μ(τ(v)) ∏ Pr(Y_σ(u)τ(v)(u,v))`,
/// with pendant blocks contributing `Pr(Y_σ(u),1̂)` and `Pr(Y_1̂,τ(v))`.
pub fn pr_mobius(tt: &TypeTwo, g: &Type2Graph) -> Result<Rational, Error> {
    let ls = tt.left.strict_support();
    let rs = tt.right.strict_support();
    for (u, v) in g.blocks.keys() {
        if !g.u_nodes.contains(u) || !g.v_nodes.contains(v) {
            return Err(Error::Domain(format!("block ({u},{v}) does not join a left node to a right node")));
        }
    }
    let mut edge_tables = Vec::new();
    for ((u, v), b) in &g.blocks {
        let ui = g.u_nodes.iter().position(|x| x == u).expect("checked");
        let vi = g.v_nodes.iter().position(|x| x == v).expect("checked");
        edge_tables.push((ui, vi, block_table(tt, b, u, v, &ls, &rs)?));
    }
    let mut u_pend = BTreeMap::new();
    for (u, (u2, b)) in &g.u_pendants {
        let ui = g.u_nodes.iter().position(|x| x == u).ok_or_else(|| Error::Domain(format!("pendant at unknown node {u}")))?;
        u_pend.insert(ui, block_table(tt, b, u, u2, &ls, &[Lattice::TOP])?);
    }
    let mut v_pend = BTreeMap::new();
    for (v, (v2, b)) in &g.v_pendants {
        let vi = g.v_nodes.iter().position(|x| x == v).ok_or_else(|| Error::Domain(format!("pendant at unknown node {v}")))?;
        v_pend.insert(vi, block_table(tt, b, v2, v, &[Lattice::TOP], &rs)?);
    }
    let (nu, nv) = (g.u_nodes.len(), g.v_nodes.len());
    let terms = (ls.len() as f64).powi(nu as i32) * (rs.len() as f64).powi(nv as i32);
    if terms > 1e6 {
        return Err(Error::VarCap { vars: nu + nv, cap: 0 });
    }
    let mut total = Rational::zero();
    let mut sigma = vec![0usize; nu];
    loop {
        let mut tau = vec![0usize; nv];
        loop {
            let mut term = Rational::one();
            for &s in &sigma {
                term *= Rational::from_integer(tt.left.mobius[ls[s]].into());
            }
            for &t in &tau {
                term *= Rational::from_integer(tt.right.mobius[rs[t]].into());
            }
            for (ui, vi, table) in &edge_tables {
                term *= &table[&(ls[sigma[*ui]], rs[tau[*vi]])];
            }
            for (ui, table) in &u_pend {
                term *= &table[&(ls[sigma[*ui]], Lattice::TOP)];
            }
            for (vi, table) in &v_pend {
                term *= &table[&(Lattice::TOP, rs[tau[*vi]])];
            }
            total += term;
            if !advance(&mut tau, rs.len()) {
                break;
            }
        }
        if !advance(&mut sigma, ls.len()) {
            break;
        }
    }
    if (nu + nv) % 2 == 1 {
        total = -total;
    }
    Ok(total)
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
