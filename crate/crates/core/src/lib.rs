//! Phone-level accent rule discovery.
//!
//! Pairs a reference pronunciation lexicon with an observed one, trains a
//! many-to-many EM alignment model over the phone sequences, mines
//! thresholded substitution rules and sorts them against a rulebook of
//! documented accent features. Also provides Cohen's kappa with dummy-class
//! padding for transcription agreement.

pub mod agreement;
pub mod align;
pub mod arpabet;
mod error;
pub mod exec;
pub mod generate;
pub mod lexicon;
pub mod mining;
pub mod phone;
pub mod pipeline;
mod real;
pub mod rulebook;

pub use align::{Alignment, AlignmentConfig, AlignmentModel, Chunk, Link};
pub use arpabet::ArpabetTable;
pub use error::{Error, Result};
pub use exec::Execution;
pub use lexicon::{Lexicon, PairedLexicon};
pub use phone::{parse_ipa_string, Phone, Pronunciation};
