//! IPA phones, pronunciations and the tokenizer that produces them.
//!
//! Every string entering the toolkit passes through [`canonicalize`]: NFC
//! composition followed by a small folding table, so that e.g. `t` + U+0322
//! and `ʈ` count as the same phone.

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

const TIE_BARS: [char; 2] = ['\u{0361}', '\u{035C}'];

/// Spacing modifier letters that attach to the preceding base symbol.
const SPACING_MODIFIERS: &[char] = &[
    'ː', 'ˑ', 'ʰ', 'ʱ', 'ʲ', 'ʷ', 'ˠ', 'ˤ', 'ʼ', 'ⁿ', 'ˡ', '˞', 'ʴ', 'ᵊ',
];

/// Sequences folded after NFC. Combining retroflex hook has no precomposed
/// decomposition in Unicode, so NFC alone would leave `t̢` and `ʈ` distinct.
const FOLDS: &[(&str, &str)] = &[
    ("t\u{0322}", "ʈ"),
    ("d\u{0322}", "ɖ"),
    ("n\u{0322}", "ɳ"),
    ("s\u{0322}", "ʂ"),
    ("z\u{0322}", "ʐ"),
    ("l\u{0322}", "ɭ"),
    ("ʧ", "t\u{0361}ʃ"),
    ("ʤ", "d\u{0361}ʒ"),
    (":", "ː"),
    ("g", "ɡ"),
];

pub fn is_modifier(c: char) -> bool {
    is_combining_mark(c) || SPACING_MODIFIERS.contains(&c)
}

fn is_tie(c: char) -> bool {
    TIE_BARS.contains(&c)
}

pub fn is_base(c: char) -> bool {
    c.is_alphabetic() && !is_modifier(c) && !('\u{02B0}'..='\u{02FF}').contains(&c)
}

/// Applies the project-wide canonical form: NFC, then the folding table.
pub fn canonicalize(text: &str) -> String {
    let mut out: String = text.nfc().collect();
    for (from, to) in FOLDS {
        if out.contains(from) {
            out = out.replace(from, to);
        }
    }
    out
}

/// One IPA segment: a base symbol with its attached modifiers.
///
/// Tied sequences such as `t͡ʃ` count as a single segment.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Phone(String);

impl Phone {
    /// Builds a phone from text, rejecting anything that does not tokenize to
    /// exactly one segment.
    pub fn new(text: &str) -> Result<Self> {
        let mut phones = tokenize(&canonicalize(text))?;
        if phones.len() != 1 {
            return Err(Error::InvalidPhone(text.to_string()));
        }
        Ok(phones.pop().unwrap())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "/{}/", self.0)
    }
}

impl fmt::Display for Phone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for Phone {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Phone::new(s)
    }
}

/// An ordered phone sequence. Displayed space-separated.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pronunciation(Vec<Phone>);

impl Pronunciation {
    pub fn new(phones: Vec<Phone>) -> Self {
        Pronunciation(phones)
    }

    pub fn phones(&self) -> &[Phone] {
        &self.0
    }

    pub fn into_phones(self) -> Vec<Phone> {
        self.0
    }

    /// Phone texts joined without delimiters.
    pub fn concatenated(&self) -> String {
        self.0.iter().map(Phone::as_str).collect()
    }

    pub fn extend(&mut self, other: &Pronunciation) {
        self.0.extend(other.0.iter().cloned());
    }
}

impl Deref for Pronunciation {
    type Target = [Phone];

    fn deref(&self) -> &[Phone] {
        &self.0
    }
}

impl From<Vec<Phone>> for Pronunciation {
    fn from(phones: Vec<Phone>) -> Self {
        Pronunciation(phones)
    }
}

impl FromIterator<Phone> for Pronunciation {
    fn from_iter<I: IntoIterator<Item = Phone>>(iter: I) -> Self {
        Pronunciation(iter.into_iter().collect())
    }
}

impl fmt::Debug for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for Pronunciation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(p.as_str())?;
        }
        Ok(())
    }
}

impl FromStr for Pronunciation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_ipa_string(s)
    }
}

/// Splits IPA text into phones. Whitespace optionally delimits phones;
/// modifiers attach to the preceding base, and a tie bar pulls the next base
/// into the same phone.
pub fn parse_ipa_string(text: &str) -> Result<Pronunciation> {
    tokenize(&canonicalize(text)).map(Pronunciation)
}

fn tokenize(text: &str) -> Result<Vec<Phone>> {
    let mut phones = Vec::new();
    let mut current = String::new();
    let mut tied = false;
    for (offset, c) in text.char_indices() {
        if c.is_whitespace() {
            if !current.is_empty() {
                phones.push(Phone(std::mem::take(&mut current)));
            }
            tied = false;
        } else if is_modifier(c) {
            if current.is_empty() {
                return Err(Error::OrphanModifier {
                    text: text.to_string(),
                    modifier: c,
                    offset,
                });
            }
            current.push(c);
            tied = is_tie(c);
        } else if is_base(c) {
            if !tied && !current.is_empty() {
                phones.push(Phone(std::mem::take(&mut current)));
            }
            current.push(c);
            tied = false;
        } else {
            return Err(Error::UnrecognizedCodepoint {
                text: text.to_string(),
                codepoint: c,
                offset,
            });
        }
    }
    if !current.is_empty() {
        phones.push(Phone(current));
    }
    Ok(phones)
}
