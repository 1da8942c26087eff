//! Substitution rules mined from a trained model and its Viterbi alignments.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use crate::align::{viterbi_align, Alignment, AlignmentConfig, AlignmentModel, Chunk, Link};
use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::lexicon::PairedLexicon;
use crate::real::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleContext {
    Any,
    WordInitial,
    WordFinal,
}

impl RuleContext {
    /// `Any` is compatible with every context.
    pub fn compatible(self, other: RuleContext) -> bool {
        self == RuleContext::Any || other == RuleContext::Any || self == other
    }
}

impl fmt::Display for RuleContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleContext::Any => "any",
            RuleContext::WordInitial => "word-initial",
            RuleContext::WordFinal => "word-final",
        })
    }
}

impl FromStr for RuleContext {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "any" => Ok(RuleContext::Any),
            "word-initial" => Ok(RuleContext::WordInitial),
            "word-final" => Ok(RuleContext::WordFinal),
            other => Err(Error::Config(format!("unknown context {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhoneticRule {
    pub source: Chunk,
    pub target: Chunk,
    pub context: RuleContext,
    pub probability: f64,
    /// Number of word pairs whose Viterbi alignment has this link in this
    /// context (anywhere, for `Any`).
    pub support: usize,
}

impl PhoneticRule {
    pub fn is_identity(&self) -> bool {
        self.source == self.target
    }

    fn key(&self) -> (&Chunk, &Chunk, RuleContext) {
        (&self.source, &self.target, self.context)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preset {
    Broad,
    Strict,
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "broad" => Ok(Preset::Broad),
            "strict" => Ok(Preset::Strict),
            other => Err(Error::Config(format!("unknown preset {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MiningConfig {
    pub min_support: usize,
    pub min_probability: f64,
    pub contexts_enabled: bool,
}

impl MiningConfig {
    /// At least 200 supporting words, probability at least 0.10.
    pub fn broad() -> Self {
        MiningConfig {
            min_support: 200,
            min_probability: 0.10,
            contexts_enabled: false,
        }
    }

    /// At least 100 supporting words, probability at least 0.50.
    pub fn strict() -> Self {
        MiningConfig {
            min_support: 100,
            min_probability: 0.50,
            contexts_enabled: false,
        }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Broad => Self::broad(),
            Preset::Strict => Self::strict(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_support < 1 {
            return Err(Error::Config("min_support must be at least 1".into()));
        }
        if !(self.min_probability > 0.0 && self.min_probability <= 1.0) {
            return Err(Error::Config("min_probability must lie in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn accepts(&self, rule: &PhoneticRule) -> bool {
        rule.support >= self.min_support && rule.probability >= self.min_probability
    }
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self::broad()
    }
}

/// Rules sorted by probability then support (both descending).
#[derive(Clone, Debug, PartialEq)]
pub struct RuleSet {
    pub rules: Vec<PhoneticRule>,
    pub provenance: MiningConfig,
}

impl RuleSet {
    pub fn new(mut rules: Vec<PhoneticRule>, provenance: MiningConfig) -> Self {
        rules.sort_by(rule_order);
        rules.dedup_by(|a, b| a.key() == b.key());
        RuleSet { rules, provenance }
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn get(
        &self,
        source: &Chunk,
        target: &Chunk,
        context: RuleContext,
    ) -> Option<&PhoneticRule> {
        self.rules
            .iter()
            .find(|r| &r.source == source && &r.target == target && r.context == context)
    }

    pub fn without_identity(&self) -> RuleSet {
        RuleSet {
            rules: self
                .rules
                .iter()
                .filter(|r| !r.is_identity())
                .cloned()
                .collect(),
            provenance: self.provenance.clone(),
        }
    }
}

pub(crate) fn rule_order(a: &PhoneticRule, b: &PhoneticRule) -> Ordering {
    b.probability
        .total_cmp(&a.probability)
        .then(b.support.cmp(&a.support))
        .then_with(|| a.key().cmp(&b.key()))
}

/// Positional context of link `index`: word-initial when it starts at the
/// first source phone, word-final when it ends at the last, initial winning
/// when both hold.
pub fn detect_context(alignment: &Alignment, index: usize) -> Result<RuleContext> {
    let spans = alignment.source_spans();
    let &(start, end) = spans.get(index).ok_or(Error::IndexOutOfRange {
        index,
        len: spans.len(),
    })?;
    Ok(if start == 0 {
        RuleContext::WordInitial
    } else if end == alignment.source_len() {
        RuleContext::WordFinal
    } else {
        RuleContext::Any
    })
}

/// Viterbi-decodes every pair, in pair order.
pub fn align_corpus(
    model: &AlignmentModel,
    paired: &PairedLexicon,
    config: &AlignmentConfig,
    execution: Execution,
) -> Result<Vec<Alignment>> {
    map_ordered(execution, &paired.pairs, |pair| {
        viterbi_align(model, &pair.source, &pair.target, config).map_err(|e| match e {
            Error::Unalignable { .. } => Error::Unalignable {
                word: pair.word.clone(),
            },
            other => other,
        })
    })
    .into_iter()
    .collect()
}

/// Every candidate rule before thresholding: one context-free rule per model
/// entry, plus positional rules when enabled.
pub fn candidate_rules(
    model: &AlignmentModel,
    alignments: &[Alignment],
    contexts_enabled: bool,
) -> Vec<PhoneticRule> {
    let mut support: BTreeMap<(&Link, RuleContext), usize> = BTreeMap::new();
    let mut occurrences: BTreeMap<(&Link, RuleContext), usize> = BTreeMap::new();
    for alignment in alignments {
        let mut seen = BTreeSet::new();
        for (idx, link) in alignment.links.iter().enumerate() {
            let positional = detect_context(alignment, idx).expect("index in range");
            seen.insert((link, RuleContext::Any));
            if positional != RuleContext::Any {
                seen.insert((link, positional));
                *occurrences.entry((link, positional)).or_default() += 1;
            }
        }
        for key in seen {
            *support.entry(key).or_default() += 1;
        }
    }

    let mut rules: Vec<PhoneticRule> = model
        .iter()
        .map(|(s, t, p)| {
            let link = Link {
                source: s.clone(),
                target: t.clone(),
            };
            PhoneticRule {
                support: support
                    .get(&(&link, RuleContext::Any))
                    .copied()
                    .unwrap_or(0),
                source: link.source,
                target: link.target,
                context: RuleContext::Any,
                probability: p,
            }
        })
        .collect();

    if contexts_enabled {
        let mut totals: BTreeMap<(&Chunk, RuleContext), usize> = BTreeMap::new();
        for (&(link, ctx), &n) in &occurrences {
            *totals.entry((&link.source, ctx)).or_default() += n;
        }
        for (&(link, ctx), &n) in &occurrences {
            rules.push(PhoneticRule {
                source: link.source.clone(),
                target: link.target.clone(),
                context: ctx,
                probability: n as f64 / totals[&(&link.source, ctx)] as f64,
                support: support[&(link, ctx)],
            });
        }
    }
    rules
}

/// Keeps rules meeting both thresholds. Idempotent.
pub fn filter(rules: &RuleSet, config: &MiningConfig) -> RuleSet {
    RuleSet {
        rules: rules
            .rules
            .iter()
            .filter(|r| config.accepts(r))
            .cloned()
            .collect(),
        provenance: config.clone(),
    }
}

pub fn check_provenance(model: &AlignmentModel, paired: &PairedLexicon) -> Result<()> {
    let expected = paired.fingerprint();
    match &model.provenance {
        Some(p) if *p == expected => Ok(()),
        other => Err(Error::ProvenanceMismatch {
            model: other.clone().unwrap_or_else(|| "none".into()),
            paired: expected,
        }),
    }
}

/// Mined rules together with the alignments their support was counted from.
#[derive(Clone, Debug)]
pub struct Mined {
    pub rules: RuleSet,
    pub alignments: Vec<Alignment>,
}

pub fn mine(
    model: &AlignmentModel,
    paired: &PairedLexicon,
    config: &MiningConfig,
    align_config: &AlignmentConfig,
) -> Result<RuleSet> {
    mine_with(model, paired, config, align_config, Execution::default()).map(|m| m.rules)
}

pub fn mine_with(
    model: &AlignmentModel,
    paired: &PairedLexicon,
    config: &MiningConfig,
    align_config: &AlignmentConfig,
    execution: Execution,
) -> Result<Mined> {
    config.validate()?;
    check_provenance(model, paired)?;
    let alignments = align_corpus(model, paired, align_config, execution)?;
    let all = RuleSet::new(
        candidate_rules(model, &alignments, config.contexts_enabled),
        config.clone(),
    );
    Ok(Mined {
        rules: filter(&all, config),
        alignments,
    })
}

/// Number of pairs whose source pronunciation contains each chunk as a
/// contiguous run. The empty chunk occurs in every pair.
pub fn source_occurrences<'a, I>(paired: &PairedLexicon, chunks: I) -> BTreeMap<Chunk, usize>
where
    I: IntoIterator<Item = &'a Chunk>,
{
    chunks
        .into_iter()
        .map(|chunk| {
            let n = paired
                .pairs
                .iter()
                .filter(|p| {
                    chunk.is_empty() || p.source.windows(chunk.len()).any(|w| w == &chunk[..])
                })
                .count();
            (chunk.clone(), n)
        })
        .collect()
}

pub fn write_rules<W: Write>(rules: &RuleSet, out: &mut W) -> io::Result<()> {
    for r in &rules.rules {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}",
            r.source,
            r.target,
            r.context,
            Real(r.probability),
            r.support
        )?;
    }
    Ok(())
}

pub fn read_rules(text: &str, provenance: MiningConfig) -> Result<RuleSet> {
    let mut rules = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 5 {
            return Err(Error::parse(line_no, "expected 5 tab-separated fields"));
        }
        let at = |e: Error| e.at_line(line_no);
        rules.push(PhoneticRule {
            source: f[0].parse().map_err(at)?,
            target: f[1].parse().map_err(at)?,
            context: f[2].parse().map_err(at)?,
            probability: f[3]
                .parse()
                .map_err(|e| Error::parse(line_no, format!("bad probability: {e}")))?,
            support: f[4]
                .parse()
                .map_err(|e| Error::parse(line_no, format!("bad support: {e}")))?,
        });
    }
    Ok(RuleSet::new(rules, provenance))
}
