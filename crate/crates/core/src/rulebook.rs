//! Documented accent rules and the four-way comparison against mined rules.
//!
//! Rulebook lines look like
//!
//! ```text
//! θ → t̪ʰ, t̪ | any | dental-fricative
//! t → t t | any | gemination | unverifiable
//! ```
//!
//! `->` is accepted for the arrow, `_` is the empty chunk and `#` starts a
//! comment.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::{self, Write};

use crate::align::Chunk;
use crate::error::{Error, Result};
use crate::mining::{MiningConfig, PhoneticRule, RuleContext, RuleSet};
use crate::real::Real;

/// The rulebook shipped with the crate (`data/rulebook.txt`).
pub const DEFAULT_RULEBOOK: &str = include_str!("../data/rulebook.txt");

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct LiteratureRule {
    pub source: Chunk,
    pub targets: BTreeSet<Chunk>,
    pub context: RuleContext,
    pub citation: String,
    /// False when the rule needs spelling or audio evidence that a phone
    /// lexicon cannot provide.
    pub verifiable: bool,
}

impl LiteratureRule {
    pub fn matches(&self, mined: &PhoneticRule) -> bool {
        self.verifiable
            && self.source == mined.source
            && self.targets.contains(&mined.target)
            && self.context.compatible(mined.context)
    }

    fn targets_text(&self) -> String {
        self.targets
            .iter()
            .map(Chunk::to_string)
            .collect::<Vec<_>>()
            .join(", ")
    }
}

impl fmt::Display for LiteratureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} → {} | {} | {}",
            self.source,
            self.targets_text(),
            self.context,
            self.citation
        )?;
        if !self.verifiable {
            f.write_str(" | unverifiable")?;
        }
        Ok(())
    }
}

fn parse_rule(line: &str) -> Result<LiteratureRule> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if !(3..=4).contains(&fields.len()) {
        return Err(Error::Config(
            "expected `source → targets | context | citation [| unverifiable]`".into(),
        ));
    }
    let (source, targets) = fields[0]
        .split_once('→')
        .or_else(|| fields[0].split_once("->"))
        .ok_or_else(|| Error::Config("missing arrow".into()))?;
    let source: Chunk = source.parse()?;
    let targets = targets
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(str::parse)
        .collect::<Result<BTreeSet<Chunk>>>()?;
    if targets.is_empty() {
        return Err(Error::Config("empty target list".into()));
    }
    let context = fields[1].parse()?;
    let citation = fields[2].to_string();
    if citation.is_empty() {
        return Err(Error::Config("empty citation".into()));
    }
    let verifiable = match fields.get(3) {
        None => true,
        Some(&"unverifiable") => false,
        Some(other) => return Err(Error::Config(format!("unknown flag {other:?}"))),
    };
    if source.is_empty() && targets.iter().any(|t| t.is_empty()) {
        return Err(Error::Config("a rule cannot map empty to empty".into()));
    }
    Ok(LiteratureRule {
        source,
        targets,
        context,
        citation,
        verifiable,
    })
}

pub fn load_rulebook(text: &str) -> Result<Vec<LiteratureRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        rules.push(parse_rule(line).map_err(|e| e.at_line(idx + 1))?);
    }
    Ok(rules)
}

pub fn default_rulebook() -> Vec<LiteratureRule> {
    load_rulebook(DEFAULT_RULEBOOK).expect("shipped rulebook is well-formed")
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchedRule {
    pub mined: PhoneticRule,
    pub literature: Vec<LiteratureRule>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnverifiableReason {
    /// Flagged in the rulebook as needing non-phone evidence.
    Flagged,
    /// The source chunk occurs in fewer than `min_support` words.
    Unattested,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LiteratureEvidence {
    pub rule: LiteratureRule,
    pub source_occurrences: usize,
}

/// The four disjoint buckets. Every mined rule lands in one of the first
/// two; every literature rule is either referenced from `in_lit_and_data`
/// or listed in exactly one of the last two.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CategorizedReport {
    pub in_lit_and_data: Vec<MatchedRule>,
    pub in_data_not_lit: Vec<PhoneticRule>,
    pub in_lit_not_data: Vec<LiteratureEvidence>,
    pub in_lit_not_verifiable: Vec<(LiteratureEvidence, UnverifiableReason)>,
}

impl CategorizedReport {
    /// Distinct literature rules validated by at least one mined rule.
    pub fn validated_literature(&self) -> BTreeSet<&LiteratureRule> {
        self.in_lit_and_data
            .iter()
            .flat_map(|m| m.literature.iter())
            .collect()
    }
}

/// Sorts mined and literature rules into the four buckets.
///
/// `source_occurrences` must hold the word count of every literature source
/// chunk in the paired lexicon the rules were mined from; missing chunks
/// count as zero.
pub fn categorize(
    mined: &RuleSet,
    literature: &[LiteratureRule],
    source_occurrences: &BTreeMap<Chunk, usize>,
    config: &MiningConfig,
) -> CategorizedReport {
    let mut lit: Vec<&LiteratureRule> = literature.iter().collect();
    lit.sort();
    lit.dedup();

    let mut report = CategorizedReport::default();
    let mut validated = BTreeSet::new();
    let mut rules: Vec<&PhoneticRule> = mined.rules.iter().collect();
    rules.sort_by(|a, b| crate::mining::rule_order(a, b));
    for rule in rules {
        let hits: Vec<LiteratureRule> = lit
            .iter()
            .filter(|l| l.matches(rule))
            .map(|&l| l.clone())
            .collect();
        if hits.is_empty() {
            report.in_data_not_lit.push(rule.clone());
        } else {
            validated.extend(hits.iter().cloned());
            report.in_lit_and_data.push(MatchedRule {
                mined: rule.clone(),
                literature: hits,
            });
        }
    }

    for rule in lit {
        if validated.contains(rule) {
            continue;
        }
        let evidence = LiteratureEvidence {
            rule: rule.clone(),
            source_occurrences: source_occurrences.get(&rule.source).copied().unwrap_or(0),
        };
        if !rule.verifiable {
            report
                .in_lit_not_verifiable
                .push((evidence, UnverifiableReason::Flagged));
        } else if evidence.source_occurrences < config.min_support {
            report
                .in_lit_not_verifiable
                .push((evidence, UnverifiableReason::Unattested));
        } else {
            report.in_lit_not_data.push(evidence);
        }
    }
    report
}

const TSV_HEADER: &str = "bucket\tsource\ttarget\tcontext\tprobability\tsupport\tcitation\tnote";

/// One row per rule: mined rules carry probability and support, literature
/// rules carry their source occurrence count in the note column.
pub fn write_report_tsv<W: Write>(report: &CategorizedReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "{TSV_HEADER}")?;
    for m in &report.in_lit_and_data {
        let r = &m.mined;
        let cites: Vec<&str> = m.literature.iter().map(|l| l.citation.as_str()).collect();
        writeln!(
            out,
            "lit-and-data\t{}\t{}\t{}\t{}\t{}\t{}\t",
            r.source,
            r.target,
            r.context,
            Real(r.probability),
            r.support,
            cites.join(",")
        )?;
    }
    for r in &report.in_data_not_lit {
        writeln!(
            out,
            "data-not-lit\t{}\t{}\t{}\t{}\t{}\t-\t",
            r.source,
            r.target,
            r.context,
            Real(r.probability),
            r.support
        )?;
    }
    let lit_row = |out: &mut W, bucket: &str, e: &LiteratureEvidence, note: &str| {
        writeln!(
            out,
            "{bucket}\t{}\t{}\t{}\t-\t-\t{}\t{note}source-occurrences={}",
            e.rule.source,
            e.rule.targets_text(),
            e.rule.context,
            e.rule.citation,
            e.source_occurrences
        )
    };
    for e in &report.in_lit_not_data {
        lit_row(out, "lit-not-data", e, "")?;
    }
    for (e, reason) in &report.in_lit_not_verifiable {
        let note = match reason {
            UnverifiableReason::Flagged => "flagged;",
            UnverifiableReason::Unattested => "unattested;",
        };
        lit_row(out, "lit-not-verifiable", e, note)?;
    }
    Ok(())
}

pub fn write_report_text<W: Write>(report: &CategorizedReport, out: &mut W) -> io::Result<()> {
    writeln!(
        out,
        "Observed in literature and dataset ({})",
        report.in_lit_and_data.len()
    )?;
    for m in &report.in_lit_and_data {
        let r = &m.mined;
        let cites: Vec<&str> = m.literature.iter().map(|l| l.citation.as_str()).collect();
        writeln!(
            out,
            "  /{}/ -> /{}/  [{}]  p={:.4}  n={}  ({})",
            r.source,
            r.target,
            r.context,
            r.probability,
            r.support,
            cites.join(", ")
        )?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "Observed in dataset, not in literature ({})",
        report.in_data_not_lit.len()
    )?;
    for r in &report.in_data_not_lit {
        writeln!(
            out,
            "  /{}/ -> /{}/  [{}]  p={:.4}  n={}",
            r.source, r.target, r.context, r.probability, r.support
        )?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "In literature, not observed in dataset ({})",
        report.in_lit_not_data.len()
    )?;
    for e in &report.in_lit_not_data {
        writeln!(
            out,
            "  {}  (source in {} word(s))",
            e.rule, e.source_occurrences
        )?;
    }
    writeln!(out)?;
    writeln!(
        out,
        "In literature, not verifiable from dataset ({})",
        report.in_lit_not_verifiable.len()
    )?;
    for (e, reason) in &report.in_lit_not_verifiable {
        let why = match reason {
            UnverifiableReason::Flagged => "needs spelling or audio evidence".to_string(),
            UnverifiableReason::Unattested => {
                format!(
                    "too rare to test: source in {} word(s)",
                    e.source_occurrences
                )
            }
        };
        writeln!(out, "  {}  ({why})", e.rule)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chunk(s: &str) -> Chunk {
        s.parse().unwrap()
    }

    fn mined(s: &str, t: &str, p: f64, n: usize) -> PhoneticRule {
        PhoneticRule {
            source: chunk(s),
            target: chunk(t),
            context: RuleContext::Any,
            probability: p,
            support: n,
        }
    }

    #[test]
    fn single_target_line() {
        let r = load_rulebook("t → ʈ | any | retroflexion\n").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].source, chunk("t"));
        assert_eq!(r[0].targets.len(), 1);
        assert!(r[0].verifiable);
    }

    #[test]
    fn multi_target_line() {
        let r = load_rulebook("# dental\nθ → t̪ʰ, t̪ | any | dental-fricative\n").unwrap();
        assert_eq!(
            r[0].targets,
            [chunk("t̪ʰ"), chunk("t̪")].into_iter().collect()
        );
    }

    #[test]
    fn malformed_lines() {
        for (text, line) in [
            ("t → | any | x\n", 1),
            ("t → ʈ | any |\n", 1),
            ("ok → k | any | c\nt ʈ | any | x\n", 2),
            ("t → ʈ | middle | x\n", 1),
            ("t → ʈ | any | x | maybe\n", 1),
        ] {
            match load_rulebook(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, line, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn shipped_rulebook_loads() {
        let rules = default_rulebook();
        assert_eq!(rules.len(), 20);
        let has = |s: &str, t: &str| {
            rules
                .iter()
                .any(|r| r.source == chunk(s) && r.targets.contains(&chunk(t)))
        };
        for (s, t) in [
            ("t", "ʈ"),
            ("d", "ɖ"),
            ("θ", "t̪ʰ"),
            ("θ", "t̪"),
            ("ð", "d̪"),
            ("z", "s"),
            ("ʌ", "ə"),
            ("e ɪ", "eː"),
            ("e ɪ", "e"),
            ("ə ʊ", "oː"),
            ("ə ʊ", "o"),
            ("ɜː", "ə r"),
            ("ɜː", "ʌ r"),
        ] {
            assert!(has(s, t), "{s} -> {t}");
        }
        let unverifiable: Vec<&str> = rules
            .iter()
            .filter(|r| !r.verifiable)
            .map(|r| r.citation.as_str())
            .collect();
        assert!(unverifiable.contains(&"gemination"));
        assert!(unverifiable.contains(&"glide-insertion"));
    }

    #[test]
    fn buckets() {
        let lit = default_rulebook();
        let rules = RuleSet::new(
            vec![mined("t", "ʈ", 0.9640, 5000), mined("iː", "i", 0.4, 900)],
            MiningConfig::broad(),
        );
        let occ: BTreeMap<Chunk, usize> = [(chunk("θ"), 1000), (chunk("t"), 6000)]
            .into_iter()
            .collect();
        let report = categorize(&rules, &lit, &occ, &MiningConfig::broad());
        assert_eq!(report.in_lit_and_data.len(), 1);
        assert_eq!(
            report.in_lit_and_data[0].literature[0].citation,
            "retroflexion"
        );
        assert_eq!(report.in_data_not_lit, vec![mined("iː", "i", 0.4, 900)]);
        assert!(report
            .in_lit_not_data
            .iter()
            .any(|e| e.rule.source == chunk("θ")));
        let gem = report
            .in_lit_not_verifiable
            .iter()
            .find(|(e, _)| e.rule.citation == "gemination")
            .unwrap();
        assert_eq!(gem.1, UnverifiableReason::Flagged);
        // d -> ɖ: source never seen, so unattested
        assert!(report
            .in_lit_not_verifiable
            .iter()
            .any(|(e, r)| e.rule.source == chunk("d") && *r == UnverifiableReason::Unattested));
    }

    #[test]
    fn flagged_rule_ignores_data() {
        let lit = load_rulebook("t → t t | any | gemination | unverifiable\n").unwrap();
        let rules = RuleSet::new(vec![mined("t", "t t", 0.9, 900)], MiningConfig::broad());
        let occ = [(chunk("t"), 900)].into_iter().collect();
        let report = categorize(&rules, &lit, &occ, &MiningConfig::broad());
        assert_eq!(report.in_lit_not_verifiable.len(), 1);
        assert_eq!(report.in_data_not_lit.len(), 1);
    }
}
