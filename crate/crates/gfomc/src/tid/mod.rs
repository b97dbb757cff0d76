//! Tuple-independent databases over a bipartite domain, and the block
//! gadgets used by the reductions.

mod builders;
mod io;

pub use builders::{
    build_graph_tid, build_parallel_block, build_type2_block, build_zigzag_block, zg_database, BlockSpec,
    GraphSpec, ZgDatabase,
};
pub use io::{parse_tid, read_tid, write_tid};

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use crate::exactla::{is_probability, Rational};
use crate::formula::{ProbMap, VarId};
use crate::query::{R, T};
use crate::Error;

/// A finite bipartite domain with an exact probability per ground tuple.
/// Tuples not listed in `probs` have probability `default` (0 or 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tid {
    pub left: Vec<String>,
    pub right: Vec<String>,
    pub probs: BTreeMap<VarId, Rational>,
    pub default: bool,
}

pub(crate) fn valid_constant(c: &str) -> bool {
    !c.is_empty() && c.chars().all(|ch| ch.is_ascii_alphanumeric() || "_@.'-".contains(ch))
}

impl Tid {
    pub fn new(default: bool) -> Tid {
        Tid { left: Vec::new(), right: Vec::new(), probs: BTreeMap::new(), default }
    }

    pub fn add_left(&mut self, c: impl Into<String>) -> Result<(), Error> {
        let c = c.into();
        if !valid_constant(&c) {
            return Err(Error::Domain(format!("invalid constant name `{c}`")));
        }
        if self.right.contains(&c) {
            return Err(Error::Domain(format!("constant {c} is already on the right side")));
        }
        if !self.left.contains(&c) {
            self.left.push(c);
        }
        Ok(())
    }

    pub fn add_right(&mut self, c: impl Into<String>) -> Result<(), Error> {
        let c = c.into();
        if !valid_constant(&c) {
            return Err(Error::Domain(format!("invalid constant name `{c}`")));
        }
        if self.left.contains(&c) {
            return Err(Error::Domain(format!("constant {c} is already on the left side")));
        }
        if !self.right.contains(&c) {
            self.right.push(c);
        }
        Ok(())
    }

    pub fn is_left(&self, c: &str) -> bool {
        self.left.iter().any(|x| x == c)
    }

    pub fn is_right(&self, c: &str) -> bool {
        self.right.iter().any(|x| x == c)
    }

    /// Checks that `v` is `R(left)`, `T(right)` or `S(left,right)`.
    pub fn check_tuple(&self, v: &VarId) -> Result<(), Error> {
        let (sym, args) = v.parts();
        let ok = match args.as_slice() {
            [a] if sym == R => self.is_left(a),
            [b] if sym == T => self.is_right(b),
            [a, b] if sym != R && sym != T => self.is_left(a) && self.is_right(b),
            _ => false,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("tuple {v} does not fit the bipartite domain")))
        }
    }

    pub fn set(&mut self, v: VarId, p: Rational) -> Result<(), Error> {
        if !is_probability(&p) {
            return Err(Error::Domain(format!("probability of {v} outside [0,1]")));
        }
        self.check_tuple(&v)?;
        self.probs.insert(v, p);
        Ok(())
    }

    pub fn prob(&self, v: &VarId) -> Rational {
        self.probs.get(v).cloned().unwrap_or_else(|| if self.default { Rational::one() } else { Rational::zero() })
    }

    /// Probabilities of the tuples strictly between 0 and 1.
    pub fn free_probs(&self) -> ProbMap {
        self.probs.iter().filter(|(_, p)| !p.is_zero() && !p.is_one()).map(|(v, p)| (v.clone(), p.clone())).collect()
    }

    pub fn domain(&self) -> BTreeSet<String> {
        self.left.iter().chain(&self.right).cloned().collect()
    }

    /// Union with another database. Shared tuples must agree and both
    /// defaults must match.
    pub fn merge(&mut self, other: &Tid) -> Result<(), Error> {
        if self.default != other.default {
            return Err(Error::Domain("cannot merge databases with different defaults".into()));
        }
        for c in &other.left {
            self.add_left(c.clone())?;
        }
        for c in &other.right {
            self.add_right(c.clone())?;
        }
        for (v, p) in &other.probs {
            match self.probs.get(v) {
                Some(q) if q != p => return Err(Error::Domain(format!("conflicting probabilities for {v}"))),
                _ => {
                    self.probs.insert(v.clone(), p.clone());
                }
            }
        }
        Ok(())
    }

    /// Drops listed tuples whose probability equals the default.
    pub fn canonical(&self) -> Tid {
        let d = if self.default { Rational::one() } else { Rational::zero() };
        let probs = self.probs.iter().filter(|(_, p)| **p != d).map(|(v, p)| (v.clone(), p.clone())).collect();
        Tid { left: self.left.clone(), right: self.right.clone(), probs, default: self.default }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::half;

    #[test]
    fn rejects_misplaced_tuples() {
        let mut d = Tid::new(true);
        d.add_left("a").unwrap();
        d.add_right("b").unwrap();
        assert!(d.set(VarId::binary("S", "a", "b"), half()).is_ok());
        assert!(d.set(VarId::binary("S", "b", "a"), half()).is_err());
        assert!(d.set(VarId::unary("R", "b"), half()).is_err());
        assert!(d.set(VarId::unary("T", "b"), half()).is_ok());
        assert!(d.add_right("a").is_err());
        assert!(d.set(VarId::unary("R", "a"), Rational::from_integer(2.into())).is_err());
    }

    #[test]
    fn merge_conflicts() {
        let mut a = Tid::new(true);
        a.add_left("u").unwrap();
        a.add_right("v").unwrap();
        a.set(VarId::binary("S", "u", "v"), half()).unwrap();
        let mut b = a.clone();
        b.set(VarId::binary("S", "u", "v"), Rational::zero()).unwrap();
        assert!(a.clone().merge(&b).is_err());
        assert!(a.clone().merge(&a).is_ok());
    }
}
