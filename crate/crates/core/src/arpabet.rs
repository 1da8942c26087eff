//! ARPAbet to IPA conversion backed by an editable plain-text table.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::phone::{parse_ipa_string, Phone, Pronunciation};

/// The table shipped with the crate (`data/arpabet_ipa.tsv`).
pub const DEFAULT_TABLE: &str = include_str!("../data/arpabet_ipa.tsv");

/// Mapping from stress-free uppercase ARPAbet symbols to phone sequences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArpabetTable {
    entries: BTreeMap<String, Vec<Phone>>,
}

/// Uppercases and strips a trailing stress digit (`ay1` -> `AY`).
pub fn base_symbol(symbol: &str) -> String {
    symbol
        .trim_end_matches(|c: char| c.is_ascii_digit())
        .to_ascii_uppercase()
}

impl ArpabetTable {
    /// Parses `SYMBOL<TAB>ipa` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim_end();
            if line.trim().is_empty() {
                continue;
            }
            let (symbol, ipa) = line
                .split_once('\t')
                .ok_or_else(|| Error::parse(line_no, "expected SYMBOL<TAB>ipa"))?;
            let symbol = symbol.trim();
            if symbol.is_empty()
                || !symbol
                    .bytes()
                    .all(|b| b.is_ascii_uppercase() || b.is_ascii_digit())
            {
                return Err(Error::parse(
                    line_no,
                    format!("invalid ARPAbet symbol {symbol:?}"),
                ));
            }
            let phones = parse_ipa_string(ipa)
                .map_err(|e| e.at_line(line_no))?
                .into_phones();
            if phones.is_empty() {
                return Err(Error::parse(
                    line_no,
                    format!("empty expansion for {symbol}"),
                ));
            }
            if entries.insert(base_symbol(symbol), phones).is_some() {
                return Err(Error::parse(line_no, format!("duplicate symbol {symbol}")));
            }
        }
        Ok(ArpabetTable { entries })
    }

    pub fn default_table() -> Self {
        Self::parse(DEFAULT_TABLE).expect("shipped ARPAbet table is well-formed")
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Converts one symbol; stress digits are ignored.
    pub fn arpabet_to_ipa(&self, symbol: &str) -> Result<&[Phone]> {
        self.entries
            .get(&base_symbol(symbol))
            .map(Vec::as_slice)
            .ok_or_else(|| Error::UnknownArpabet {
                symbol: symbol.to_string(),
                index: None,
            })
    }

    pub fn convert_pronunciation<S: AsRef<str>>(&self, tokens: &[S]) -> Result<Pronunciation> {
        let mut phones = Vec::with_capacity(tokens.len());
        for (index, token) in tokens.iter().enumerate() {
            let token = token.as_ref();
            let expansion = self
                .arpabet_to_ipa(token)
                .map_err(|_| Error::UnknownArpabet {
                    symbol: token.to_string(),
                    index: Some(index),
                })?;
            phones.extend_from_slice(expansion);
        }
        Ok(Pronunciation::new(phones))
    }
}

impl Default for ArpabetTable {
    fn default() -> Self {
        Self::default_table()
    }
}
