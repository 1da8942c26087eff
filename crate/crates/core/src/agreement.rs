//! Transcription agreement: dummy-padded edit alignment and Cohen's kappa.

use std::collections::BTreeMap;
use std::io::{self, Write};

use crate::error::{Error, Result};
use crate::exec::{map_ordered, Execution};
use crate::phone::parse_ipa_string;
use crate::real::Real;

/// Label inserted at alignment gaps. Never a valid phone.
pub const DUMMY: &str = "∅";

/// Two label sequences padded to equal length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelSequencePair {
    pub a: Vec<String>,
    pub b: Vec<String>,
}

impl LabelSequencePair {
    pub fn dummy_count(&self) -> usize {
        self.a.iter().chain(&self.b).filter(|l| *l == DUMMY).count()
    }

    /// The inputs with dummies removed.
    pub fn stripped(&self) -> (Vec<String>, Vec<String>) {
        let strip = |v: &[String]| v.iter().filter(|l| *l != DUMMY).cloned().collect();
        (strip(&self.a), strip(&self.b))
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Move {
    Diagonal,
    /// `a` gets a dummy, `b` advances.
    GapInA,
    /// `b` gets a dummy, `a` advances.
    GapInB,
}

/// Unit-cost edit distance table: `d[i][j]` aligns `a[..i]` with `b[..j]`.
fn edit_table<S: AsRef<str>>(a: &[S], b: &[S]) -> Vec<Vec<usize>> {
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let sub = usize::from(a[i - 1].as_ref() != b[j - 1].as_ref());
            d[i][j] = (d[i - 1][j - 1] + sub)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j] + 1);
        }
    }
    d
}

/// Minimal edit distance between two label sequences.
pub fn edit_distance<S: AsRef<str>>(a: &[S], b: &[S]) -> usize {
    edit_table(a, b)[a.len()][b.len()]
}

/// Pads the shorter side of a minimal edit alignment with [`DUMMY`].
///
/// The traceback runs from the end and, among optimal moves, prefers a
/// match, then a mismatch, then a gap. Between two equally good gaps it
/// consumes the lexicographically larger label first, which makes the
/// padding of swapped inputs the swap of the padding.
pub fn align_with_dummy<S: AsRef<str>>(a: &[S], b: &[S]) -> Result<LabelSequencePair> {
    if a.iter().chain(b).any(|l| l.as_ref() == DUMMY) {
        return Err(Error::DummyInInput);
    }
    let d = edit_table(a, b);
    let (mut i, mut j) = (a.len(), b.len());
    let mut out_a = Vec::with_capacity(i.max(j));
    let mut out_b = Vec::with_capacity(i.max(j));
    while i > 0 || j > 0 {
        let diag = (i > 0 && j > 0).then(|| {
            let sub = usize::from(a[i - 1].as_ref() != b[j - 1].as_ref());
            d[i - 1][j - 1] + sub
        });
        let gap_a = (j > 0).then(|| d[i][j - 1] + 1);
        let gap_b = (i > 0).then(|| d[i - 1][j] + 1);
        let step = if diag == Some(d[i][j]) {
            Move::Diagonal
        } else {
            match (gap_a == Some(d[i][j]), gap_b == Some(d[i][j])) {
                (true, true) => {
                    if b[j - 1].as_ref() >= a[i - 1].as_ref() {
                        Move::GapInA
                    } else {
                        Move::GapInB
                    }
                }
                (true, false) => Move::GapInA,
                _ => Move::GapInB,
            }
        };
        match step {
            Move::Diagonal => {
                i -= 1;
                j -= 1;
                out_a.push(a[i].as_ref().to_string());
                out_b.push(b[j].as_ref().to_string());
            }
            Move::GapInA => {
                j -= 1;
                out_a.push(DUMMY.to_string());
                out_b.push(b[j].as_ref().to_string());
            }
            Move::GapInB => {
                i -= 1;
                out_a.push(a[i].as_ref().to_string());
                out_b.push(DUMMY.to_string());
            }
        }
    }
    out_a.reverse();
    out_b.reverse();
    Ok(LabelSequencePair { a: out_a, b: out_b })
}

/// Cohen's kappa over two equal-length label sequences.
///
/// When chance agreement is 1 both sequences are the same constant label
/// and kappa is defined as 1.
pub fn cohen_kappa(pair: &LabelSequencePair) -> Result<f64> {
    let n = pair.a.len();
    if n != pair.b.len() {
        return Err(Error::LengthMismatch(n, pair.b.len()));
    }
    if n == 0 {
        return Err(Error::Empty("label sequences"));
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    let mut agree = 0usize;
    for (x, y) in pair.a.iter().zip(&pair.b) {
        counts.entry(x).or_default().0 += 1;
        counts.entry(y).or_default().1 += 1;
        agree += usize::from(x == y);
    }
    let nf = n as f64;
    let p_o = agree as f64 / nf;
    let p_e = counts
        .values()
        .map(|&(ca, cb)| ca as f64 * cb as f64)
        .sum::<f64>()
        / (nf * nf);
    if p_e >= 1.0 {
        return Ok(1.0);
    }
    Ok((p_o - p_e) / (1.0 - p_e))
}

#[derive(Clone, Debug, PartialEq)]
pub struct KappaReport {
    pub per_pair: Vec<(String, f64)>,
    pub mean: f64,
    pub count: usize,
}

/// Pads and scores every pair, then averages the per-pair kappas.
pub fn mean_kappa<S>(pairs: &[(String, Vec<S>, Vec<S>)]) -> Result<KappaReport>
where
    S: AsRef<str> + Sync,
{
    mean_kappa_with(pairs, Execution::default())
}

pub fn mean_kappa_with<S>(
    pairs: &[(String, Vec<S>, Vec<S>)],
    execution: Execution,
) -> Result<KappaReport>
where
    S: AsRef<str> + Sync,
{
    if pairs.is_empty() {
        return Err(Error::Empty("kappa input"));
    }
    let kappas = map_ordered(execution, pairs, |(id, a, b)| {
        align_with_dummy(a, b)
            .and_then(|p| cohen_kappa(&p))
            .map(|k| (id.clone(), k))
    });
    let per_pair = kappas.into_iter().collect::<Result<Vec<_>>>()?;
    let mean = per_pair.iter().map(|(_, k)| k).sum::<f64>() / per_pair.len() as f64;
    Ok(KappaReport {
        count: per_pair.len(),
        per_pair,
        mean,
    })
}

/// One kappa input row: pair id and the two label sequences.
pub type KappaRow = (String, Vec<String>, Vec<String>);

/// Reads `pair-id<TAB>ipa-a<TAB>ipa-b` rows; phones become labels.
pub fn read_kappa_input(text: &str) -> Result<Vec<KappaRow>> {
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != 3 || f[0].is_empty() {
            return Err(Error::parse(
                line_no,
                "expected pair-id<TAB>ipa-a<TAB>ipa-b",
            ));
        }
        let labels = |s: &str| -> Result<Vec<String>> {
            Ok(parse_ipa_string(s)
                .map_err(|e| e.at_line(line_no))?
                .iter()
                .map(|p| p.as_str().to_string())
                .collect())
        };
        rows.push((f[0].to_string(), labels(f[1])?, labels(f[2])?));
    }
    Ok(rows)
}

/// Per-pair `id<TAB>kappa` rows followed by a `# mean<TAB>count` header and
/// the summary row.
pub fn write_kappa_report<W: Write>(report: &KappaReport, out: &mut W) -> io::Result<()> {
    writeln!(out, "# pair_id\tkappa")?;
    for (id, k) in &report.per_pair {
        writeln!(out, "{id}\t{}", Real(*k))?;
    }
    writeln!(out, "# mean\tcount")?;
    writeln!(out, "{}\t{}", Real(report.mean), report.count)
}
