//! Generalized model counting over tuple-independent databases.
//!
//! The crate grounds bipartite ∀CNF queries into monotone CNF lineages,
//! counts them exactly over the rationals, and implements the gadget
//! constructions (zig-zag blocks, pendant blocks, lattice/Möbius
//! decompositions) used to reduce `#P2CNF` and its bipartite variant to
//! probability computations.

pub mod exactla;
pub mod formula;
pub mod query;
pub mod tid;
pub mod lineage;
pub mod blocks;
pub mod reduction;
pub mod cli;

use exactla::Rational;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("singular system (rank {rank})")]
    Singular { rank: usize, null_witness: Vec<Rational> },
    #[error("{0}")]
    Domain(String),
    #[error("variable cap exceeded: {vars} variables, cap {cap}")]
    VarCap { vars: usize, cap: usize },
    #[error("not applicable: {0}")]
    Inapplicable(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
