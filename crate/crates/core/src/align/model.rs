use std::borrow::Borrow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::phone::{parse_ipa_string, Phone, Pronunciation};

/// Zero or more contiguous phones on one side of a link. Written `_` when
/// empty.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Chunk(Vec<Phone>);

impl Chunk {
    pub fn new(phones: Vec<Phone>) -> Self {
        Chunk(phones)
    }

    pub fn empty() -> Self {
        Chunk(Vec::new())
    }

    pub fn phones(&self) -> &[Phone] {
        &self.0
    }
}

impl Deref for Chunk {
    type Target = [Phone];

    fn deref(&self) -> &[Phone] {
        &self.0
    }
}

impl Borrow<[Phone]> for Chunk {
    fn borrow(&self) -> &[Phone] {
        &self.0
    }
}

impl From<&[Phone]> for Chunk {
    fn from(phones: &[Phone]) -> Self {
        Chunk(phones.to_vec())
    }
}

impl From<Pronunciation> for Chunk {
    fn from(p: Pronunciation) -> Self {
        Chunk(p.into_phones())
    }
}

impl fmt::Display for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("_");
        }
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

impl fmt::Debug for Chunk {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Chunk {
    type Err = Error;

    /// `_` (or `∅`) is the empty chunk; anything else is IPA text.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "_" || s == "∅" {
            return Ok(Chunk::empty());
        }
        let p = parse_ipa_string(s)?;
        if p.is_empty() {
            return Err(Error::Config(format!("empty chunk text {s:?}; use _")));
        }
        Ok(Chunk::from(p))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub source: Chunk,
    pub target: Chunk,
}

/// A monotone chunking of one source/target pair.
#[derive(Clone, Debug, PartialEq)]
pub struct Alignment {
    pub links: Vec<Link>,
    /// Log probability of the chunking.
    pub score: f64,
}

impl Alignment {
    pub fn source(&self) -> Pronunciation {
        self.links
            .iter()
            .flat_map(|l| l.source.iter().cloned())
            .collect()
    }

    pub fn target(&self) -> Pronunciation {
        self.links
            .iter()
            .flat_map(|l| l.target.iter().cloned())
            .collect()
    }

    /// Half-open source phone span `[start, end)` of each link.
    pub fn source_spans(&self) -> Vec<(usize, usize)> {
        let mut start = 0;
        self.links
            .iter()
            .map(|l| {
                let span = (start, start + l.source.len());
                start = span.1;
                span
            })
            .collect()
    }

    pub fn source_len(&self) -> usize {
        self.links.iter().map(|l| l.source.len()).sum()
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.links.iter().enumerate() {
            if i > 0 {
                f.write_str(" | ")?;
            }
            write!(f, "{}:{}", l.source, l.target)?;
        }
        Ok(())
    }
}

/// Conditional chunk-substitution table `P(target | source)`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AlignmentModel {
    probs: BTreeMap<Chunk, BTreeMap<Chunk, f64>>,
    pub log_likelihood_history: Vec<f64>,
    /// Fingerprint of the paired lexicon the model was trained on.
    pub provenance: Option<String>,
}

impl AlignmentModel {
    /// Builds a model from raw table entries. Values are stored as given;
    /// zero entries are dropped.
    pub fn from_entries<I>(entries: I) -> Self
    where
        I: IntoIterator<Item = (Chunk, Chunk, f64)>,
    {
        let mut probs: BTreeMap<Chunk, BTreeMap<Chunk, f64>> = BTreeMap::new();
        for (s, t, p) in entries {
            if p > 0.0 {
                probs.entry(s).or_default().insert(t, p);
            }
        }
        AlignmentModel {
            probs,
            log_likelihood_history: Vec::new(),
            provenance: None,
        }
    }

    pub fn prob(&self, source: &[Phone], target: &[Phone]) -> f64 {
        self.probs
            .get(source)
            .and_then(|d| d.get(target))
            .copied()
            .unwrap_or(0.0)
    }

    pub fn log_prob(&self, source: &[Phone], target: &[Phone]) -> f64 {
        let p = self.prob(source, target);
        if p > 0.0 {
            p.ln()
        } else {
            f64::NEG_INFINITY
        }
    }

    /// Target distribution for one source chunk.
    pub fn distribution(&self, source: &[Phone]) -> Option<&BTreeMap<Chunk, f64>> {
        self.probs.get(source)
    }

    pub fn sources(&self) -> impl Iterator<Item = &Chunk> {
        self.probs.keys()
    }

    /// All positive entries in (source, target) order.
    pub fn iter(&self) -> impl Iterator<Item = (&Chunk, &Chunk, f64)> {
        self.probs
            .iter()
            .flat_map(|(s, d)| d.iter().map(move |(t, &p)| (s, t, p)))
    }

    pub fn len(&self) -> usize {
        self.probs.values().map(BTreeMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Largest deviation from 1 of any per-source distribution sum.
    pub fn normalization_error(&self) -> f64 {
        self.probs
            .values()
            .map(|d| (d.values().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn final_log_likelihood(&self) -> Option<f64> {
        self.log_likelihood_history.last().copied()
    }
}
