use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("orphan modifier {modifier:?} at offset {offset} in {text:?}")]
    OrphanModifier {
        text: String,
        modifier: char,
        offset: usize,
    },
    #[error("unrecognized codepoint U+{:04X} ({codepoint:?}) at offset {offset} in {text:?}", *codepoint as u32)]
    UnrecognizedCodepoint {
        text: String,
        codepoint: char,
        offset: usize,
    },
    #[error("invalid phone {0:?}: expected exactly one segment")]
    InvalidPhone(String),
    #[error("unknown ARPAbet symbol {symbol:?}{}", index.map(|i| format!(" at token {i}")).unwrap_or_default())]
    UnknownArpabet {
        symbol: String,
        index: Option<usize>,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("word {word:?} cannot be aligned under the current configuration")]
    Unalignable { word: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("model provenance {model} does not match paired lexicon {paired}")]
    ProvenanceMismatch { model: String, paired: String },
    #[error("index {index} out of range for alignment of {len} links")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("label sequence contains the reserved dummy label")]
    DummyInInput,
    #[error("label sequences differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("planted rules {0} share source chunk and context")]
    AmbiguousPlanting(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attaches a 1-based line number to errors raised while parsing a line.
    pub(crate) fn at_line(self, line: usize) -> Self {
        match self {
            Error::Parse { .. } | Error::Io(_) => self,
            other => Error::Parse {
                line,
                message: other.to_string(),
            },
        }
    }
}
