//! Synthetic observed lexicons with planted substitution rules.
//!
//! Used as ground truth for the miner: every substitution the generator
//! performs is counted in a manifest.

use std::io::{self, Write};
use std::str::FromStr;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::align::{AlignmentConfig, Chunk};
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::mining::RuleContext;
use crate::phone::{Phone, Pronunciation};

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedRule {
    pub source: Chunk,
    pub target: Chunk,
    pub context: RuleContext,
    pub rate: f64,
}

impl PlantedRule {
    pub fn new(source: &str, target: &str, rate: f64) -> Result<Self> {
        Ok(PlantedRule {
            source: source.parse()?,
            target: target.parse()?,
            context: RuleContext::Any,
            rate,
        })
    }

    /// Checks the chunk lengths against what the aligner can represent.
    pub fn validate(&self, config: &AlignmentConfig) -> Result<()> {
        if !(self.rate > 0.0 && self.rate <= 1.0) {
            return Err(Error::Config(format!(
                "planted rate {} outside (0, 1]",
                self.rate
            )));
        }
        if self.source.is_empty() {
            return Err(Error::Config(
                "planted rule needs a non-empty source".into(),
            ));
        }
        if self.source.len() > config.max_source_chunk
            || self.target.len() > config.max_target_chunk
        {
            return Err(Error::Config(format!(
                "planted rule {self} exceeds the configured chunk maxima"
            )));
        }
        if self.source.len() > 1 && self.target.len() > 1 && !config.allow_many_to_many {
            return Err(Error::Config(format!(
                "planted rule {self} needs many-to-many links enabled"
            )));
        }
        if self.target.is_empty() && !config.allow_source_deletion {
            return Err(Error::Config(format!(
                "planted deletion {self} needs source deletions enabled"
            )));
        }
        Ok(())
    }

    fn applies_at(&self, phones: &[Phone], i: usize) -> bool {
        let end = i + self.source.len();
        end <= phones.len()
            && phones[i..end] == self.source[..]
            && match self.context {
                RuleContext::Any => true,
                RuleContext::WordInitial => i == 0,
                RuleContext::WordFinal => end == phones.len(),
            }
    }
}

impl std::fmt::Display for PlantedRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}>{}@{}", self.source, self.target, self.rate)?;
        if self.context != RuleContext::Any {
            write!(f, "@{}", self.context)?;
        }
        Ok(())
    }
}

impl FromStr for PlantedRule {
    type Err = Error;

    /// `SRC>TGT@RATE[@context]`, e.g. `t>ʈ@0.96` or `t>d@0.5@word-final`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "planted rule {s:?}: expected SRC>TGT@RATE[@context]"
            ))
        };
        let (source, rest) = s.split_once('>').ok_or_else(bad)?;
        let mut parts = rest.split('@');
        let target = parts.next().ok_or_else(bad)?;
        let rate = parts
            .next()
            .ok_or_else(bad)?
            .trim()
            .parse::<f64>()
            .map_err(|_| bad())?;
        let context = match parts.next() {
            Some(c) => c.parse()?,
            None => RuleContext::Any,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(PlantedRule {
            source: source.parse()?,
            target: target.parse()?,
            context,
            rate,
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ManifestRow {
    /// Positions where the rule was the selected match.
    pub opportunities: usize,
    /// Positions where it was actually applied.
    pub applications: usize,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub lexicon: Lexicon,
    pub manifest: Vec<(PlantedRule, ManifestRow)>,
    /// Words whose whole pronunciation was deleted and therefore dropped.
    pub dropped: Vec<String>,
}

impl Generated {
    pub fn write_manifest<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(
            out,
            "source\ttarget\tcontext\trate\topportunities\tapplications"
        )?;
        for (rule, row) in &self.manifest {
            writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                rule.source,
                rule.target,
                rule.context,
                rule.rate,
                row.opportunities,
                row.applications
            )?;
        }
        Ok(())
    }
}

/// Rewrites the primary pronunciation of every base word, scanning left to
/// right. At each position the longest matching planted source wins (a
/// positional context beats `any` at equal length); it fires with its rate
/// and the scan resumes after the matched span either way.
pub fn generate(base: &Lexicon, planted: &[PlantedRule], seed: u64) -> Result<Generated> {
    for (i, a) in planted.iter().enumerate() {
        if !(a.rate > 0.0 && a.rate <= 1.0) {
            return Err(Error::Config(format!(
                "planted rate {} outside (0, 1]",
                a.rate
            )));
        }
        if a.source.is_empty() {
            return Err(Error::Config(
                "planted rule needs a non-empty source".into(),
            ));
        }
        if let Some(b) = planted[..i]
            .iter()
            .find(|b| b.source == a.source && b.context == a.context)
        {
            return Err(Error::AmbiguousPlanting(format!("{b} and {a}")));
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut manifest = vec![ManifestRow::default(); planted.len()];
    let mut lexicon = Lexicon::new("synthetic");
    let mut dropped = Vec::new();
    for entry in base.entries() {
        let phones = entry.primary().phones();
        let mut out = Vec::with_capacity(phones.len());
        let mut i = 0;
        while i < phones.len() {
            let chosen = planted
                .iter()
                .enumerate()
                .filter(|(_, r)| r.applies_at(phones, i))
                .max_by(|(ia, a), (ib, b)| {
                    a.source
                        .len()
                        .cmp(&b.source.len())
                        .then((a.context != RuleContext::Any).cmp(&(b.context != RuleContext::Any)))
                        .then(
                            (a.context == RuleContext::WordInitial)
                                .cmp(&(b.context == RuleContext::WordInitial)),
                        )
                        .then(ib.cmp(ia))
                });
            match chosen {
                Some((idx, rule)) => {
                    manifest[idx].opportunities += 1;
                    let fire = rng.gen::<f64>() < rule.rate;
                    if fire {
                        manifest[idx].applications += 1;
                        out.extend_from_slice(&rule.target);
                    } else {
                        out.extend_from_slice(&rule.source);
                    }
                    i += rule.source.len();
                }
                None => {
                    out.push(phones[i].clone());
                    i += 1;
                }
            }
        }
        if out.is_empty() {
            dropped.push(entry.word().to_string());
        } else {
            lexicon.insert(entry.word(), Pronunciation::new(out))?;
        }
    }
    Ok(Generated {
        lexicon,
        manifest: planted.iter().cloned().zip(manifest).collect(),
        dropped,
    })
}

const CONSONANTS: &[(&str, u32)] = &[
    ("t", 16),
    ("θ", 10),
    ("d", 8),
    ("n", 8),
    ("s", 7),
    ("k", 6),
    ("l", 6),
    ("r", 5),
    ("m", 5),
    ("p", 5),
    ("b", 4),
    ("ð", 4),
    ("z", 4),
    ("f", 3),
    ("v", 3),
    ("ɡ", 3),
    ("ʃ", 2),
    ("ŋ", 2),
    ("w", 2),
    ("h", 2),
];

const VOWELS: &[(&str, u32)] = &[
    ("ə", 10),
    ("ɪ", 9),
    ("e", 6),
    ("æ", 6),
    ("iː", 5),
    ("ʌ", 4),
    ("ɒ", 4),
    ("uː", 3),
    ("ɑː", 3),
    ("ɔː", 3),
    ("ʊ", 2),
    ("ɜː", 2),
];

/// A seeded reference lexicon of `words` made-up words built from
/// (C)V(C) syllables, with /t/ and /θ/ deliberately frequent.
pub fn synthetic_base_lexicon(words: usize, seed: u64) -> Lexicon {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let phones = |table: &[(&str, u32)]| -> (Vec<Phone>, WeightedIndex<u32>) {
        (
            table
                .iter()
                .map(|(p, _)| Phone::new(p).expect("valid phone"))
                .collect(),
            WeightedIndex::new(table.iter().map(|(_, w)| *w)).expect("positive weights"),
        )
    };
    let (cons, cons_w) = phones(CONSONANTS);
    let (vows, vows_w) = phones(VOWELS);
    let mut lex = Lexicon::new("synthetic-reference");
    for n in 0..words {
        let syllables = rng.gen_range(1..=3);
        let mut pron = Vec::new();
        for _ in 0..syllables {
            if rng.gen_bool(0.8) {
                pron.push(cons[cons_w.sample(&mut rng)].clone());
            }
            pron.push(vows[vows_w.sample(&mut rng)].clone());
            if rng.gen_bool(0.5) {
                pron.push(cons[cons_w.sample(&mut rng)].clone());
            }
        }
        lex.insert(&format!("w{n:05}"), Pronunciation::new(pron))
            .expect("non-empty word");
    }
    lex
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phone::parse_ipa_string;

    fn base(rows: &[(&str, &str)]) -> Lexicon {
        let mut lex = Lexicon::new("base");
        for (w, p) in rows {
            lex.insert(w, parse_ipa_string(p).unwrap()).unwrap();
        }
        lex
    }

    #[test]
    fn rate_one_always_applies() {
        let g = generate(
            &base(&[("tea", "t iː")]),
            &[PlantedRule::new("t", "ʈ", 1.0).unwrap()],
            1,
        )
        .unwrap();
        assert_eq!(
            g.lexicon.get("tea").unwrap().primary(),
            &parse_ipa_string("ʈ iː").unwrap()
        );
        assert_eq!(
            g.manifest[0].1,
            ManifestRow {
                opportunities: 1,
                applications: 1
            }
        );
    }

    #[test]
    fn zero_rate_is_rejected() {
        let r = generate(
            &base(&[("tea", "t iː")]),
            &[PlantedRule::new("t", "ʈ", 0.0).unwrap()],
            1,
        );
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn identical_sources_are_ambiguous() {
        let r = generate(
            &base(&[("tea", "t iː")]),
            &[
                PlantedRule::new("t", "ʈ", 0.5).unwrap(),
                PlantedRule::new("t", "t̪", 0.5).unwrap(),
            ],
            1,
        );
        assert!(matches!(r, Err(Error::AmbiguousPlanting(_))));
    }

    #[test]
    fn leftmost_longest() {
        let planted = [
            PlantedRule::new("e", "x", 1.0).unwrap(),
            PlantedRule::new("e ɪ", "eː", 1.0).unwrap(),
        ];
        let g = generate(&base(&[("day", "d e ɪ e")]), &planted, 3).unwrap();
        assert_eq!(
            g.lexicon.get("day").unwrap().primary(),
            &parse_ipa_string("d eː x").unwrap()
        );
    }

    #[test]
    fn positional_rule() {
        let planted = ["t>d@1@word-final".parse::<PlantedRule>().unwrap()];
        let g = generate(&base(&[("tat", "t æ t")]), &planted, 3).unwrap();
        assert_eq!(
            g.lexicon.get("tat").unwrap().primary(),
            &parse_ipa_string("t æ d").unwrap()
        );
    }

    #[test]
    fn planted_rule_syntax() {
        let r: PlantedRule = "θ>t̪ʰ@0.5".parse().unwrap();
        assert_eq!(r.source, "θ".parse().unwrap());
        assert_eq!(r.rate, 0.5);
        assert_eq!(r.context, RuleContext::Any);
        assert!("t@0.5".parse::<PlantedRule>().is_err());
        assert!("t>ʈ@x".parse::<PlantedRule>().is_err());
        assert!(PlantedRule::new("t", "ʈ", 0.5)
            .unwrap()
            .validate(&AlignmentConfig::default())
            .is_ok());
        assert!(PlantedRule::new("t a b", "ʈ", 0.5)
            .unwrap()
            .validate(&AlignmentConfig::default())
            .is_err());
    }

    #[test]
    fn seeded_and_deterministic() {
        let lex = synthetic_base_lexicon(200, 11);
        assert_eq!(lex, synthetic_base_lexicon(200, 11));
        assert_ne!(lex, synthetic_base_lexicon(200, 12));
        let planted = [PlantedRule::new("t", "ʈ", 0.5).unwrap()];
        let a = generate(&lex, &planted, 5).unwrap();
        let b = generate(&lex, &planted, 5).unwrap();
        assert_eq!(a.lexicon, b.lexicon);
        assert_eq!(a.manifest, b.manifest);
    }

    #[test]
    fn manifest_matches_positional_diff() {
        let lex = synthetic_base_lexicon(300, 2);
        let planted = [
            PlantedRule::new("t", "ʈ", 0.7).unwrap(),
            PlantedRule::new("θ", "t̪ʰ", 0.4).unwrap(),
        ];
        let g = generate(&lex, &planted, 9).unwrap();
        let (mut t, mut th) = (0, 0);
        for entry in lex.entries() {
            let out = g.lexicon.get(entry.word()).unwrap().primary();
            assert_eq!(out.len(), entry.primary().len());
            for (a, b) in entry.primary().iter().zip(out.iter()) {
                match (a.as_str(), b.as_str()) {
                    ("t", "ʈ") => t += 1,
                    ("θ", "t̪ʰ") => th += 1,
                    (x, y) => assert_eq!(x, y),
                }
            }
        }
        assert_eq!(g.manifest[0].1.applications, t);
        assert_eq!(g.manifest[1].1.applications, th);
    }
}
