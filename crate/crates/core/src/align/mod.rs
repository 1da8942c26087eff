//! Many-to-many monotone alignment between source and target phone sequences.
//!
//! The model is a conditional table `P(target chunk | source chunk)` trained by
//! EM over the chunking lattice of every pair. A chunk holds at most
//! `max_*_chunk` phones; an empty chunk marks a deletion on that side.

mod decode;
mod em;
mod io;
mod lattice;
mod model;

pub use decode::{pair_likelihood, viterbi_align};
pub use em::{init_model, train, train_with, EmTrainer};
pub use io::{read_model, write_model};
pub use lattice::{lattice_edges, LatticeEdge};
pub use model::{Alignment, AlignmentModel, Chunk, Link};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct AlignmentConfig {
    pub max_source_chunk: usize,
    pub max_target_chunk: usize,
    /// Source chunks may align to an empty target chunk.
    pub allow_source_deletion: bool,
    /// Target chunks may align to an empty source chunk.
    pub allow_target_deletion: bool,
    /// Chunk pairs with more than one phone on both sides (2-to-2). Off by
    /// default: with a per-source conditional table such pairs can memorise
    /// whole contexts at probability 1 and starve the 1-to-1 links.
    pub allow_many_to_many: bool,
    pub max_iterations: usize,
    pub rel_tolerance: f64,
}

impl Default for AlignmentConfig {
    fn default() -> Self {
        AlignmentConfig {
            max_source_chunk: 2,
            max_target_chunk: 2,
            allow_source_deletion: true,
            allow_target_deletion: false,
            allow_many_to_many: false,
            max_iterations: 100,
            rel_tolerance: 1e-6,
        }
    }
}

impl AlignmentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_source_chunk < 1 || self.max_target_chunk < 1 {
            return Err(Error::Config("chunk maxima must be at least 1".into()));
        }
        if self.rel_tolerance.is_nan() || self.rel_tolerance <= 0.0 {
            return Err(Error::Config("tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// `log(exp(a) + exp(b))` with `-inf` as the additive identity.
pub(crate) fn log_add(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a > b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}
