use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use accent_rules::agreement::{mean_kappa, read_kappa_input, write_kappa_report};
use accent_rules::align::{read_model, train_with, viterbi_align, write_model, AlignmentConfig};
use accent_rules::generate::{generate, synthetic_base_lexicon, PlantedRule};
use accent_rules::lexicon::{
    pair_lexicons, read_news_format, write_news_format, write_skipped, DictFormat, PairingPolicy,
};
use accent_rules::mining::{
    mine_with, read_rules, source_occurrences, write_rules, MiningConfig, Preset,
};
use accent_rules::pipeline::{load_lexicon, load_table, run_pipeline, PipelineConfig};
use accent_rules::rulebook::{categorize, load_rulebook, write_report_text, write_report_tsv};
use accent_rules::Execution;

#[derive(Parser)]
#[command(
    name = "accent-rules",
    version,
    about = "Phone-level accent rule discovery"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert an ARPAbet dictionary to an IPA lexicon.
    Convert(ConvertArgs),
    /// Pair a source dictionary with a target lexicon and write news format.
    Pair(PairArgs),
    /// Train the alignment model on a news-format file.
    Align(AlignArgs),
    /// Mine thresholded substitution rules.
    Mine(MineArgs),
    /// Categorize mined rules against a rulebook.
    Categorize(CategorizeArgs),
    /// Mean Cohen's kappa over transcription pairs.
    Kappa(KappaArgs),
    /// Generate a synthetic observed lexicon with planted rules.
    Generate(GenerateArgs),
    /// Run pair, align, mine and categorize in one go.
    Pipeline(PipelineArgs),
}

#[derive(Args, Clone)]
struct AlignerFlags {
    #[arg(long, default_value_t = 2)]
    max_source_chunk: usize,
    #[arg(long, default_value_t = 2)]
    max_target_chunk: usize,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    allow_source_deletion: bool,
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    allow_target_deletion: bool,
    /// Allow chunk pairs with several phones on both sides.
    #[arg(long, default_value_t = false, action = clap::ArgAction::Set)]
    allow_many_to_many: bool,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    /// Run per-pair work on one thread.
    #[arg(long)]
    sequential: bool,
}

impl AlignerFlags {
    fn config(&self) -> AlignmentConfig {
        AlignmentConfig {
            max_source_chunk: self.max_source_chunk,
            max_target_chunk: self.max_target_chunk,
            allow_source_deletion: self.allow_source_deletion,
            allow_target_deletion: self.allow_target_deletion,
            allow_many_to_many: self.allow_many_to_many,
            max_iterations: self.iterations,
            rel_tolerance: self.tolerance,
        }
    }

    fn execution(&self) -> Execution {
        if self.sequential {
            Execution::Sequential
        } else {
            Execution::default()
        }
    }
}

#[derive(Args, Clone)]
struct MiningFlags {
    /// broad = (200, 0.10), strict = (100, 0.50)
    #[arg(long, default_value = "broad", value_parser = parse_preset)]
    preset: Preset,
    #[arg(long)]
    min_support: Option<usize>,
    #[arg(long)]
    min_prob: Option<f64>,
    /// Also mine word-initial and word-final rules.
    #[arg(long)]
    contexts: bool,
}

impl MiningFlags {
    fn config(&self) -> MiningConfig {
        let mut cfg = MiningConfig::preset(self.preset);
        if let Some(s) = self.min_support {
            cfg.min_support = s;
        }
        if let Some(p) = self.min_prob {
            cfg.min_probability = p;
        }
        cfg.contexts_enabled = self.contexts;
        cfg
    }
}

fn parse_preset(s: &str) -> Result<Preset, String> {
    s.parse().map_err(|e: accent_rules::Error| e.to_string())
}

fn parse_format(s: &str) -> Result<DictFormat, String> {
    s.parse().map_err(|e: accent_rules::Error| e.to_string())
}

#[derive(Args)]
struct ConvertArgs {
    #[arg(long)]
    dict: PathBuf,
    #[arg(long)]
    table: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PairArgs {
    #[arg(long)]
    source: PathBuf,
    #[arg(long, default_value = "arpabet-dict", value_parser = parse_format)]
    source_format: DictFormat,
    #[arg(long)]
    target: PathBuf,
    #[arg(long, default_value = "ipa-lexicon", value_parser = parse_format)]
    target_format: DictFormat,
    #[arg(long)]
    table: Option<PathBuf>,
    /// Pair every variant with every variant instead of primaries only.
    #[arg(long)]
    cross_product: bool,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    skipped: Option<PathBuf>,
}

#[derive(Args)]
struct AlignArgs {
    /// News-format pairs.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write the Viterbi alignment of every pair.
    #[arg(long)]
    alignments: Option<PathBuf>,
    #[command(flatten)]
    aligner: AlignerFlags,
}

#[derive(Args)]
struct MineArgs {
    #[arg(long)]
    model: PathBuf,
    /// News-format pairs the model was trained on.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    hide_identity: bool,
    #[command(flatten)]
    aligner: AlignerFlags,
    #[command(flatten)]
    mining: MiningFlags,
}

#[derive(Args)]
struct CategorizeArgs {
    #[arg(long)]
    rules: PathBuf,
    #[arg(long)]
    rulebook: PathBuf,
    /// News-format pairs, for source occurrence counts.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    tsv: Option<PathBuf>,
    #[command(flatten)]
    mining: MiningFlags,
}

#[derive(Args)]
struct KappaArgs {
    /// `pair-id<TAB>ipa-a<TAB>ipa-b` rows.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Reference lexicon to rewrite.
    #[arg(
        long,
        conflicts_with = "synthetic_base",
        required_unless_present = "synthetic_base"
    )]
    base: Option<PathBuf>,
    #[arg(long, default_value = "arpabet-dict", value_parser = parse_format)]
    base_format: DictFormat,
    /// Build a seeded reference lexicon of this many words instead.
    #[arg(long)]
    synthetic_base: Option<usize>,
    /// Also write the reference lexicon (IPA lexicon format).
    #[arg(long)]
    base_output: Option<PathBuf>,
    #[arg(long)]
    table: Option<PathBuf>,
    /// `SRC>TGT@RATE[@context]`, repeatable.
    #[arg(long = "plant", required = true)]
    planted: Vec<String>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    aligner: AlignerFlags,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    source_dict: PathBuf,
    #[arg(long, default_value = "arpabet-dict", value_parser = parse_format)]
    source_format: DictFormat,
    #[arg(long)]
    target_lexicon: PathBuf,
    #[arg(long, default_value = "ipa-lexicon", value_parser = parse_format)]
    target_format: DictFormat,
    #[arg(long)]
    arpabet_table: Option<PathBuf>,
    #[arg(long)]
    rulebook: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long)]
    cross_product: bool,
    #[arg(long)]
    hide_identity: bool,
    #[command(flatten)]
    aligner: AlignerFlags,
    #[command(flatten)]
    mining: MiningFlags,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// Renders into memory, then writes to `path` or stdout.
fn emit<F>(path: Option<&Path>, render: F) -> Result<()>
where
    F: FnOnce(&mut Vec<u8>) -> io::Result<()>,
{
    let mut buf = Vec::new();
    render(&mut buf)?;
    match path {
        Some(p) => fs::write(p, buf).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout()
            .write_all(&buf)
            .context("cannot write to stdout"),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Convert(args) => {
            let table = load_table(args.table.as_deref())?;
            let lex = load_lexicon(&args.dict, DictFormat::ArpabetDict, &table, "source")?;
            emit(args.output.as_deref(), |out| lex.write_ipa(out))
        }
        Command::Pair(args) => {
            let table = load_table(args.table.as_deref())?;
            let source = load_lexicon(&args.source, args.source_format, &table, "source")?;
            let target = load_lexicon(&args.target, args.target_format, &table, "target")?;
            let policy = if args.cross_product {
                PairingPolicy::CrossProduct
            } else {
                PairingPolicy::Primary
            };
            let paired = pair_lexicons(&source, &target, policy);
            for (word, reason) in &paired.skipped {
                eprintln!("skipped {word}: {reason}");
            }
            if let Some(p) = &args.skipped {
                emit(Some(p), |out| write_skipped(&paired, out))?;
            }
            emit(args.output.as_deref(), |out| {
                write_news_format(&paired, out)
            })
        }
        Command::Align(args) => {
            let paired = read_news_format(&read(&args.input)?).context("lexicon")?;
            let cfg = args.aligner.config();
            let model =
                train_with(&paired, &cfg, args.aligner.execution()).context("m2m_aligner")?;
            if let Some(p) = &args.alignments {
                emit(Some(p), |out| {
                    for pair in &paired.pairs {
                        match viterbi_align(&model, &pair.source, &pair.target, &cfg) {
                            Ok(a) => writeln!(out, "{}\t{}", pair.word, a)?,
                            Err(e) => writeln!(out, "{}\t!{}", pair.word, e)?,
                        }
                    }
                    Ok(())
                })?;
            }
            emit(args.output.as_deref(), |out| write_model(&model, out))
        }
        Command::Mine(args) => {
            let model = read_model(&read(&args.model)?).context("m2m_aligner")?;
            let paired = read_news_format(&read(&args.input)?).context("lexicon")?;
            let mined = mine_with(
                &model,
                &paired,
                &args.mining.config(),
                &args.aligner.config(),
                args.aligner.execution(),
            )
            .context("rule_miner")?;
            let rules = if args.hide_identity {
                mined.rules.without_identity()
            } else {
                mined.rules
            };
            emit(args.output.as_deref(), |out| write_rules(&rules, out))
        }
        Command::Categorize(args) => {
            let cfg = args.mining.config();
            let rules = read_rules(&read(&args.rules)?, cfg.clone()).context("rule_miner")?;
            let lit = load_rulebook(&read(&args.rulebook)?).context("rulebook")?;
            let paired = read_news_format(&read(&args.input)?).context("lexicon")?;
            let occ = source_occurrences(&paired, lit.iter().map(|r| &r.source));
            let report = categorize(&rules, &lit, &occ, &cfg);
            if let Some(p) = &args.tsv {
                emit(Some(p), |out| write_report_tsv(&report, out))?;
            }
            emit(args.output.as_deref(), |out| {
                write_report_text(&report, out)
            })
        }
        Command::Kappa(args) => {
            let rows = read_kappa_input(&read(&args.input)?).context("agreement")?;
            let report = mean_kappa(&rows).context("agreement")?;
            emit(args.output.as_deref(), |out| {
                write_kappa_report(&report, out)
            })
        }
        Command::Generate(args) => {
            let cfg = args.aligner.config();
            let planted = args
                .planted
                .iter()
                .map(|s| {
                    let rule: PlantedRule = s.parse()?;
                    rule.validate(&cfg)?;
                    Ok(rule)
                })
                .collect::<accent_rules::Result<Vec<_>>>()
                .context("cli")?;
            let base = match (&args.base, args.synthetic_base) {
                (Some(path), _) => {
                    let table = load_table(args.table.as_deref())?;
                    load_lexicon(path, args.base_format, &table, "base")?
                }
                (None, Some(n)) => synthetic_base_lexicon(n, args.seed),
                (None, None) => unreachable!("clap requires one of --base/--synthetic-base"),
            };
            let generated = generate(&base, &planted, args.seed).context("cli")?;
            if let Some(p) = &args.base_output {
                emit(Some(p), |out| base.write_ipa(out))?;
            }
            if let Some(p) = &args.manifest {
                emit(Some(p), |out| generated.write_manifest(out))?;
            }
            emit(args.output.as_deref(), |out| {
                generated.lexicon.write_ipa(out)
            })
        }
        Command::Pipeline(args) => {
            let config = PipelineConfig {
                source_dict: args.source_dict,
                source_format: args.source_format,
                target_lexicon: args.target_lexicon,
                target_format: args.target_format,
                arpabet_table: args.arpabet_table,
                rulebook: args.rulebook,
                out_dir: args.out_dir,
                alignment: args.aligner.config(),
                mining: args.mining.config(),
                pairing: if args.cross_product {
                    PairingPolicy::CrossProduct
                } else {
                    PairingPolicy::Primary
                },
                hide_identity: args.hide_identity,
                execution: args.aligner.execution(),
            };
            let outcome = run_pipeline(&config)?;
            for notice in &outcome.notices {
                eprintln!("note: {notice}");
            }
            for path in &outcome.written {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
