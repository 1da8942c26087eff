//! End-to-end run: parse, pair, align, mine, categorize.
//!
//! All inputs are read and every stage is computed before the first output
//! file is written, so a failing run leaves no partial outputs behind.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

use crate::align::{train_with, write_model, AlignmentConfig};
use crate::arpabet::ArpabetTable;
use crate::exec::Execution;
use crate::lexicon::{
    pair_lexicons, parse_dictionary, write_news_format, write_skipped, DictFormat, Lexicon,
    PairingPolicy,
};
use crate::mining::{mine_with, source_occurrences, write_rules, MiningConfig};
use crate::rulebook::{categorize, load_rulebook, write_report_text, write_report_tsv};

#[derive(Clone, Debug)]
pub struct PipelineConfig {
    pub source_dict: PathBuf,
    pub source_format: DictFormat,
    pub target_lexicon: PathBuf,
    pub target_format: DictFormat,
    /// Shipped table when absent.
    pub arpabet_table: Option<PathBuf>,
    /// Categorization is skipped when absent.
    pub rulebook: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub alignment: AlignmentConfig,
    pub mining: MiningConfig,
    pub pairing: PairingPolicy,
    pub hide_identity: bool,
    pub execution: Execution,
}

pub const NEWS_FILE: &str = "pairs.news";
pub const SKIPPED_FILE: &str = "skipped.tsv";
pub const MODEL_FILE: &str = "model.tsv";
pub const RULES_FILE: &str = "rules.tsv";
pub const REPORT_TEXT_FILE: &str = "report.txt";
pub const REPORT_TSV_FILE: &str = "report.tsv";

/// Paths written by a run plus any notices for the user.
#[derive(Debug, Default)]
pub struct PipelineOutcome {
    pub written: Vec<PathBuf>,
    pub notices: Vec<String>,
}

fn read(path: &Path, what: &str) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("{what}: cannot read {}", path.display()))
}

pub fn load_table(path: Option<&Path>) -> Result<ArpabetTable> {
    match path {
        None => Ok(ArpabetTable::default_table()),
        Some(p) => ArpabetTable::parse(&read(p, "phone_core")?)
            .with_context(|| format!("phone_core: invalid ARPAbet table {}", p.display())),
    }
}

pub fn load_lexicon(
    path: &Path,
    format: DictFormat,
    table: &ArpabetTable,
    label: &str,
) -> Result<Lexicon> {
    parse_dictionary(&read(path, "lexicon")?, format, table, label)
        .with_context(|| format!("lexicon: cannot parse {}", path.display()))
}

pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutcome> {
    config.alignment.validate().context("m2m_aligner")?;
    config.mining.validate().context("rule_miner")?;

    let table = load_table(config.arpabet_table.as_deref())?;
    let source = load_lexicon(&config.source_dict, config.source_format, &table, "source")?;
    let target = load_lexicon(
        &config.target_lexicon,
        config.target_format,
        &table,
        "target",
    )?;
    let rulebook = match &config.rulebook {
        Some(p) => Some(
            load_rulebook(&read(p, "rulebook")?)
                .with_context(|| format!("rulebook: cannot parse {}", p.display()))?,
        ),
        None => None,
    };

    let mut outcome = PipelineOutcome::default();
    let paired = pair_lexicons(&source, &target, config.pairing);
    if paired.is_empty() {
        anyhow::bail!("lexicon: no target word could be paired with the source dictionary");
    }
    let model = train_with(&paired, &config.alignment, config.execution).context("m2m_aligner")?;
    let mined = mine_with(
        &model,
        &paired,
        &config.mining,
        &config.alignment,
        config.execution,
    )
    .context("rule_miner")?;
    let rules = if config.hide_identity {
        mined.rules.without_identity()
    } else {
        mined.rules
    };

    let mut news = Vec::new();
    write_news_format(&paired, &mut news)?;
    let mut skipped = Vec::new();
    write_skipped(&paired, &mut skipped)?;
    let mut model_tsv = Vec::new();
    write_model(&model, &mut model_tsv)?;
    let mut rules_tsv = Vec::new();
    write_rules(&rules, &mut rules_tsv)?;

    let mut files = vec![
        (NEWS_FILE, news),
        (SKIPPED_FILE, skipped),
        (MODEL_FILE, model_tsv),
        (RULES_FILE, rules_tsv),
    ];
    match rulebook {
        Some(lit) => {
            let occ = source_occurrences(&paired, lit.iter().map(|r| &r.source));
            let report = categorize(&rules, &lit, &occ, &config.mining);
            let mut text = Vec::new();
            write_report_text(&report, &mut text)?;
            let mut tsv = Vec::new();
            write_report_tsv(&report, &mut tsv)?;
            files.push((REPORT_TEXT_FILE, text));
            files.push((REPORT_TSV_FILE, tsv));
        }
        None => outcome
            .notices
            .push("no rulebook given; categorization skipped".to_string()),
    }
    if !paired.skipped.is_empty() {
        outcome.notices.push(format!(
            "{} target words skipped (see {SKIPPED_FILE})",
            paired.skipped.len()
        ));
    }

    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("cannot create {}", config.out_dir.display()))?;
    for (name, bytes) in files {
        let path = config.out_dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("cannot write {}", path.display()))?;
        outcome.written.push(path);
    }
    Ok(outcome)
}
