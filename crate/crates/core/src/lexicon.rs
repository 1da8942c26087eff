//! Pronunciation dictionaries, dashed-word synthesis and source/target pairing.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::arpabet::ArpabetTable;
use crate::error::{Error, Result};
use crate::phone::{parse_ipa_string, Pronunciation};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DictFormat {
    /// `WORD  PH1 PH2 ...` with ARPAbet phones, `WORD(2)` variants.
    ArpabetDict,
    /// `word<TAB>ipa-string`.
    IpaLexicon,
}

impl FromStr for DictFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "arpabet-dict" => Ok(DictFormat::ArpabetDict),
            "ipa-lexicon" => Ok(DictFormat::IpaLexicon),
            other => Err(Error::Config(format!(
                "unknown dictionary format {other:?}"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LexiconEntry {
    word: String,
    pronunciations: Vec<Pronunciation>,
}

impl LexiconEntry {
    pub fn new(word: &str, pronunciation: Pronunciation) -> Self {
        LexiconEntry {
            word: fold_case(word),
            pronunciations: vec![pronunciation],
        }
    }

    pub fn word(&self) -> &str {
        &self.word
    }

    pub fn primary(&self) -> &Pronunciation {
        &self.pronunciations[0]
    }

    pub fn pronunciations(&self) -> &[Pronunciation] {
        &self.pronunciations
    }

    /// Appends a variant unless it is already listed.
    pub fn add_variant(&mut self, pronunciation: Pronunciation) {
        if !self.pronunciations.contains(&pronunciation) {
            self.pronunciations.push(pronunciation);
        }
    }
}

pub fn fold_case(word: &str) -> String {
    word.to_lowercase()
}

/// Word-keyed dictionary, iterated in sorted word order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
    source_label: String,
}

impl Lexicon {
    pub fn new(source_label: impl Into<String>) -> Self {
        Lexicon {
            entries: BTreeMap::new(),
            source_label: source_label.into(),
        }
    }

    pub fn source_label(&self) -> &str {
        &self.source_label
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&LexiconEntry> {
        self.entries.get(&fold_case(word))
    }

    pub fn entries(&self) -> impl Iterator<Item = &LexiconEntry> {
        self.entries.values()
    }

    /// Adds a pronunciation for `word`. Empty pronunciations are rejected.
    pub fn insert(&mut self, word: &str, pronunciation: Pronunciation) -> Result<()> {
        let word = fold_case(word);
        if word.is_empty() {
            return Err(Error::Config("empty word".into()));
        }
        if pronunciation.is_empty() {
            return Err(Error::Config(format!("empty pronunciation for {word:?}")));
        }
        match self.entries.get_mut(&word) {
            Some(entry) => entry.add_variant(pronunciation),
            None => {
                self.entries
                    .insert(word.clone(), LexiconEntry::new(&word, pronunciation));
            }
        }
        Ok(())
    }

    /// Writes `word<TAB>phones` lines, one per pronunciation.
    pub fn write_ipa<W: Write>(&self, out: &mut W) -> io::Result<()> {
        for entry in self.entries() {
            for p in entry.pronunciations() {
                writeln!(out, "{}\t{}", entry.word(), p)?;
            }
        }
        Ok(())
    }
}

/// Parses a dictionary from text. Errors carry 1-based line numbers.
pub fn parse_dictionary(
    text: &str,
    format: DictFormat,
    table: &ArpabetTable,
    source_label: &str,
) -> Result<Lexicon> {
    let mut lex = Lexicon::new(source_label);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (word, pron) = match format {
            DictFormat::ArpabetDict => {
                if line.starts_with(";;;") || line.starts_with('#') {
                    continue;
                }
                let mut fields = line.split_whitespace();
                let word = fields.next().unwrap_or_default();
                let tokens: Vec<&str> = fields.collect();
                if tokens.is_empty() {
                    return Err(Error::parse(
                        line_no,
                        format!("no pronunciation for {word:?}"),
                    ));
                }
                let pron = table
                    .convert_pronunciation(&tokens)
                    .map_err(|e| e.at_line(line_no))?;
                (strip_variant(word), pron)
            }
            DictFormat::IpaLexicon => {
                if line.starts_with('#') {
                    continue;
                }
                let (word, ipa) = line
                    .split_once('\t')
                    .ok_or_else(|| Error::parse(line_no, "expected word<TAB>ipa"))?;
                let pron = parse_ipa_string(ipa).map_err(|e| e.at_line(line_no))?;
                if pron.is_empty() {
                    return Err(Error::parse(
                        line_no,
                        format!("no pronunciation for {word:?}"),
                    ));
                }
                (word.trim(), pron)
            }
        };
        if word.is_empty() {
            return Err(Error::parse(line_no, "empty word"));
        }
        lex.insert(word, pron).map_err(|e| e.at_line(line_no))?;
    }
    Ok(lex)
}

/// `ABOVE(2)` -> `ABOVE`.
fn strip_variant(word: &str) -> &str {
    if let Some(open) = word.rfind('(') {
        let inner = &word[open + 1..];
        if inner.len() > 1
            && inner.ends_with(')')
            && inner[..inner.len() - 1].bytes().all(|b| b.is_ascii_digit())
        {
            return &word[..open];
        }
    }
    word
}

/// Joins the primary pronunciations of every dash-separated constituent, or
/// returns `None` when any constituent is missing.
pub fn synthesize_dashed(word: &str, lex: &Lexicon) -> Option<Pronunciation> {
    if !word.contains('-') {
        return None;
    }
    let mut out = Pronunciation::default();
    for part in word.split('-') {
        out.extend(lex.get(part)?.primary());
    }
    if out.is_empty() {
        None
    } else {
        Some(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PairingPolicy {
    /// First-listed pronunciation on each side.
    #[default]
    Primary,
    /// Every source variant against every target variant.
    CrossProduct,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SkipReason {
    NotInSource,
    Unsynthesizable,
}

impl fmt::Display for SkipReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SkipReason::NotInSource => "not-in-source",
            SkipReason::Unsynthesizable => "unsynthesizable",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordPair {
    pub word: String,
    pub source: Pronunciation,
    pub target: Pronunciation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PairedLexicon {
    pub pairs: Vec<WordPair>,
    pub skipped: Vec<(String, SkipReason)>,
}

impl PairedLexicon {
    pub fn from_pairs(pairs: Vec<WordPair>) -> Self {
        PairedLexicon {
            pairs,
            skipped: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Short content hash of the news-format serialization. Trained models
    /// carry it so mining can refuse a lexicon the model was not trained on.
    pub fn fingerprint(&self) -> String {
        let mut buf = Vec::new();
        write_news_format(self, &mut buf).expect("writing to memory");
        let digest = Sha256::digest(&buf);
        digest[..8].iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Pairs every word of `target` with its `source` pronunciation, falling back
/// to dashed-word synthesis. Skipped words are recorded with a reason.
pub fn pair_lexicons(source: &Lexicon, target: &Lexicon, policy: PairingPolicy) -> PairedLexicon {
    let mut paired = PairedLexicon::default();
    for entry in target.entries() {
        let word = entry.word();
        let sources: Vec<Pronunciation> = match source.get(word) {
            Some(src) => match policy {
                PairingPolicy::Primary => vec![src.primary().clone()],
                PairingPolicy::CrossProduct => src.pronunciations().to_vec(),
            },
            None if word.contains('-') => match synthesize_dashed(word, source) {
                Some(p) => vec![p],
                None => {
                    paired
                        .skipped
                        .push((word.to_string(), SkipReason::Unsynthesizable));
                    continue;
                }
            },
            None => {
                paired
                    .skipped
                    .push((word.to_string(), SkipReason::NotInSource));
                continue;
            }
        };
        let targets = match policy {
            PairingPolicy::Primary => &entry.pronunciations()[..1],
            PairingPolicy::CrossProduct => entry.pronunciations(),
        };
        for s in &sources {
            for t in targets {
                paired.pairs.push(WordPair {
                    word: word.to_string(),
                    source: s.clone(),
                    target: t.clone(),
                });
            }
        }
    }
    paired
}

/// One `source<TAB>target` line per pair, phones space-separated.
pub fn write_news_format<W: Write>(paired: &PairedLexicon, out: &mut W) -> io::Result<()> {
    for pair in &paired.pairs {
        writeln!(out, "{}\t{}", pair.source, pair.target)?;
    }
    Ok(())
}

/// Reads news format back. Words are not stored in the file, so pairs are
/// labelled by line number (`line:N`).
pub fn read_news_format(text: &str) -> Result<PairedLexicon> {
    let mut pairs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.is_empty() {
            continue;
        }
        let (src, tgt) = line
            .split_once('\t')
            .ok_or_else(|| Error::parse(line_no, "expected source<TAB>target"))?;
        let source = parse_ipa_string(src).map_err(|e| e.at_line(line_no))?;
        let target = parse_ipa_string(tgt).map_err(|e| e.at_line(line_no))?;
        if source.is_empty() || target.is_empty() {
            return Err(Error::parse(line_no, "empty side"));
        }
        pairs.push(WordPair {
            word: format!("line:{line_no}"),
            source,
            target,
        });
    }
    Ok(PairedLexicon::from_pairs(pairs))
}

/// Skipped-word report, `word<TAB>reason`.
pub fn write_skipped<W: Write>(paired: &PairedLexicon, out: &mut W) -> io::Result<()> {
    for (word, reason) in &paired.skipped {
        writeln!(out, "{word}\t{reason}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ipa(s: &str) -> Pronunciation {
        parse_ipa_string(s).unwrap()
    }

    fn arpa(text: &str) -> Result<Lexicon> {
        parse_dictionary(
            text,
            DictFormat::ArpabetDict,
            &ArpabetTable::default_table(),
            "BEEP",
        )
    }

    fn ipa_lex(text: &str) -> Lexicon {
        parse_dictionary(
            text,
            DictFormat::IpaLexicon,
            &ArpabetTable::default_table(),
            "IE",
        )
        .unwrap()
    }

    #[test]
    fn arpabet_entry() {
        let lex = arpa("ABACUS  AE B AH K AH S\n").unwrap();
        let e = lex.get("abacus").unwrap();
        assert_eq!(e.primary(), &ipa("æ b ʌ k ʌ s"));
        assert_eq!(e.primary().len(), 6);
    }

    #[test]
    fn variants_fold_into_base_word() {
        let lex = arpa(";;; comment\nABOVE  AH B AH V\nABOVE(2)  AX B AH V\n").unwrap();
        assert_eq!(lex.len(), 1);
        let e = lex.get("above").unwrap();
        assert_eq!(e.pronunciations().len(), 2);
        assert_eq!(e.primary(), &ipa("ʌ b ʌ v"));
    }

    #[test]
    fn duplicate_pronunciations_collapse() {
        let lex = ipa_lex("cat\tkæt\ncat\tk æ t\n");
        assert_eq!(lex.get("cat").unwrap().pronunciations().len(), 1);
    }

    #[test]
    fn missing_pronunciation_reports_line() {
        assert!(matches!(
            arpa("A  AH\nABACUS\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        match arpa("A  AH\nB  B QQ\n") {
            Err(Error::Parse { line: 2, message }) => assert!(message.contains("QQ")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ipa_lexicon_requires_tab() {
        let r = parse_dictionary(
            "word kæt\n",
            DictFormat::IpaLexicon,
            &ArpabetTable::default_table(),
            "IE",
        );
        assert!(matches!(r, Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn case_is_folded() {
        let lex = ipa_lex("Cat\tkæt\n");
        assert!(lex.get("CAT").is_some());
        assert_eq!(lex.entries().next().unwrap().word(), "cat");
    }

    #[test]
    fn dashed_synthesis() {
        let lex = ipa_lex("ice\taɪs\ncream\tkriːm\nmother\tmʌðə\nin\tɪn\nlaw\tlɔː\n");
        assert_eq!(
            synthesize_dashed("ice-cream", &lex).unwrap(),
            ipa("aɪskriːm")
        );
        assert_eq!(
            synthesize_dashed("mother-in-law", &lex).unwrap(),
            ipa("mʌðəɪnlɔː")
        );
        assert_eq!(synthesize_dashed("zzz-cream", &lex), None);
        assert_eq!(synthesize_dashed("ice", &lex), None);
    }

    #[test]
    fn pairing_and_conservation() {
        let source = ipa_lex("ice\taɪs\ncream\tkriːm\ndee\tdiː\n");
        let target = ipa_lex("dee\tɖi\nice-cream\taiskrim\nfoo\tfu\nzzz-cream\tzkrim\n");
        let paired = pair_lexicons(&source, &target, PairingPolicy::Primary);
        assert_eq!(paired.pairs.len() + paired.skipped.len(), target.len());
        assert_eq!(paired.pairs[0].word, "dee");
        assert_eq!(paired.pairs[1].word, "ice-cream");
        assert_eq!(paired.pairs[1].source, ipa("aɪskriːm"));
        assert_eq!(
            paired.skipped,
            vec![
                ("foo".to_string(), SkipReason::NotInSource),
                ("zzz-cream".to_string(), SkipReason::Unsynthesizable)
            ]
        );
    }

    #[test]
    fn cross_product_pairing() {
        let source = ipa_lex("a\tə\na\teɪ\n");
        let target = ipa_lex("a\te\na\tə\n");
        assert_eq!(
            pair_lexicons(&source, &target, PairingPolicy::Primary).len(),
            1
        );
        assert_eq!(
            pair_lexicons(&source, &target, PairingPolicy::CrossProduct).len(),
            4
        );
    }

    #[test]
    fn news_format_line() {
        let paired = PairedLexicon::from_pairs(vec![WordPair {
            word: "dee".into(),
            source: ipa("d iː"),
            target: ipa("ɖ i"),
        }]);
        let mut buf = Vec::new();
        write_news_format(&paired, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "d iː\tɖ i\n");

        let back = read_news_format(std::str::from_utf8(&buf).unwrap()).unwrap();
        assert_eq!(back.pairs[0].source, paired.pairs[0].source);
        assert_eq!(back.pairs[0].target, paired.pairs[0].target);
        assert_eq!(back.fingerprint(), paired.fingerprint());

        let mut empty = Vec::new();
        write_news_format(&PairedLexicon::default(), &mut empty).unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn variant_suffix_parsing() {
        assert_eq!(strip_variant("ABOVE(2)"), "ABOVE");
        assert_eq!(strip_variant("(PAREN"), "(PAREN");
        assert_eq!(strip_variant("A()"), "A()");
    }
}
