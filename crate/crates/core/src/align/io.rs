use std::io::{self, Write};

use super::model::{AlignmentModel, Chunk};
use crate::error::{Error, Result};
use crate::real::Real;

/// Writes `source<TAB>target<TAB>probability` rows, preceded by
/// `#provenance` and `#history` comment lines. Numbers are written in
/// shortest round-trip form.
pub fn write_model<W: Write>(model: &AlignmentModel, out: &mut W) -> io::Result<()> {
    if let Some(prov) = &model.provenance {
        writeln!(out, "#provenance\t{prov}")?;
    }
    if !model.log_likelihood_history.is_empty() {
        write!(out, "#history")?;
        for ll in &model.log_likelihood_history {
            write!(out, "\t{}", Real(*ll))?;
        }
        writeln!(out)?;
    }
    for (s, t, p) in model.iter() {
        writeln!(out, "{s}\t{t}\t{}", Real(p))?;
    }
    Ok(())
}

pub fn read_model(text: &str) -> Result<AlignmentModel> {
    let mut entries = Vec::new();
    let mut provenance = None;
    let mut history = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let mut fields = rest.split('\t');
            match fields.next() {
                Some("provenance") => provenance = fields.next().map(str::to_string),
                Some("history") => {
                    for f in fields {
                        history.push(f.parse::<f64>().map_err(|e| {
                            Error::parse(line_no, format!("bad log-likelihood {f:?}: {e}"))
                        })?);
                    }
                }
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::parse(
                line_no,
                "expected source<TAB>target<TAB>probability",
            ));
        }
        let s: Chunk = fields[0].parse().map_err(|e: Error| e.at_line(line_no))?;
        let t: Chunk = fields[1].parse().map_err(|e: Error| e.at_line(line_no))?;
        let p: f64 = fields[2]
            .parse()
            .map_err(|e| Error::parse(line_no, format!("bad probability: {e}")))?;
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::parse(
                line_no,
                format!("probability {p} outside [0, 1]"),
            ));
        }
        entries.push((s, t, p));
    }
    let mut model = AlignmentModel::from_entries(entries);
    model.provenance = provenance;
    model.log_likelihood_history = history;
    Ok(model)
}
