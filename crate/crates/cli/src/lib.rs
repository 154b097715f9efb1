//! Command implementations behind the `lexirank` binary.

use std::collections::{BTreeMap, HashSet};
use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use lexirank::agreement::CoincidenceMatrix;
use lexirank::corpus::{derive_pairs, CorpusReader};
use lexirank::report::{
    correlate, export_lexicon_csv, language_report_from_builders, read_lexicon_csv, render_lexicon_html,
    render_sentiment_bar, render_sentiment_map, BarOptions, Correlation, MapOptions,
};
use lexirank::sentiment::{accumulate, LexiconBuilder, SentimentCounts};
use lexirank::stats::{ols_fit, power_law_mle, welch_t_test, SampleSummary};
use lexirank::symbols::{format_codepoint, inventory_diff, read_counts_csv};
use lexirank::{AnnotatedText, Error, PairMode, RangeTable, RankedLexicon, Result, SentimentLabel};

pub mod report;

use report::{f3, f4, or_na, p_value, signed3, Format, Report, Table};

/// Records read per batch when building a lexicon from a stream.
const BATCH: usize = 50_000;

#[derive(Debug, Parser)]
#[command(name = "lexirank", version, about = "Sentiment lexicon of Unicode pictograph symbols")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub config: RunConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Build the lexicon CSV from an annotated corpus
    Build,
    /// Annotator agreement on texts with and without symbols
    Agreement,
    /// Sentiment of texts with and without symbols, with Welch's t-test
    SplitStats,
    /// Mean symbol position and position/sentiment trendlines
    Positions,
    /// Per-language lexicons correlated with the whole-corpus lexicon
    CompareLangs,
    /// Correlate lexicon occurrences with an external counts file
    CorrelateCounts,
    /// Render SVG/HTML from a lexicon CSV
    Render,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum PairModeArg {
    #[default]
    Inter,
    #[value(name = "self")]
    SelfAgreement,
    All,
}

impl From<PairModeArg> for PairMode {
    fn from(m: PairModeArg) -> Self {
        match m {
            PairModeArg::Inter => PairMode::Inter,
            PairModeArg::SelfAgreement => PairMode::SelfAgreement,
            PairModeArg::All => PairMode::All,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Corpus CSV (build, agreement, split-stats, positions, compare-langs) or lexicon CSV (correlate-counts, render)
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// External `codepoint,count` CSV for correlate-counts
    #[arg(long, global = true)]
    pub counts: Option<PathBuf>,
    /// Lexicon CSV for build; directory for agreement matrix CSVs; report file otherwise
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_occurrences: u64,
    #[arg(long, global = true, value_enum, default_value_t = PairModeArg::Inter)]
    pub pair_mode: PairModeArg,
    /// Histogram bin width over the score range
    #[arg(long, global = true, default_value_t = 0.05)]
    pub bins: f64,
    /// Significance level for correlations
    #[arg(long, global = true, default_value_t = 0.01)]
    pub level: f64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the sentiment map SVG here
    #[arg(long, global = true)]
    pub map: Option<PathBuf>,
    /// Write one sentiment-bar SVG per symbol into this directory
    #[arg(long, global = true)]
    pub bars: Option<PathBuf>,
    /// Write the HTML ranking page here
    #[arg(long, global = true)]
    pub html: Option<PathBuf>,
    /// Worker threads for lexicon construction; output does not depend on it
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub shards: u64,
    #[arg(long, global = true, default_value_t = 400)]
    pub bar_width: u32,
    #[arg(long, global = true, default_value_t = 40)]
    pub bar_height: u32,
    #[arg(long, global = true, default_value_t = 1000)]
    pub map_width: u32,
    #[arg(long, global = true, default_value_t = 700)]
    pub map_height: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: None,
            counts: None,
            output: None,
            min_occurrences: 5,
            pair_mode: PairModeArg::Inter,
            bins: 0.05,
            level: 0.01,
            format: Format::Text,
            map: None,
            bars: None,
            html: None,
            shards: 1,
            bar_width: 400,
            bar_height: 40,
            map_width: 1000,
            map_height: 700,
        }
    }
}

impl RunConfig {
    fn input(&self) -> Result<&Path> {
        self.input
            .as_deref()
            .ok_or_else(|| Error::Io(io::Error::new(io::ErrorKind::InvalidInput, "--input is required")))
    }

    fn bar_options(&self) -> BarOptions {
        BarOptions { width: self.bar_width, height: self.bar_height }
    }

    fn map_options(&self) -> MapOptions {
        MapOptions { width: self.map_width, height: self.map_height }
    }
}

/// Exit status for an error: 2 for I/O and parse failures, 1 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_input_error() {
        2
    } else {
        1
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    let mut f = create(path)?;
    f.write_all(contents.as_bytes())?;
    f.flush()?;
    Ok(())
}

/// Runs one command, writing its report to `out`.
pub fn run(command: Command, config: &RunConfig, out: &mut dyn Write) -> Result<()> {
    if !(config.level > 0.0 && config.level < 1.0) {
        return Err(Error::Domain { line: None, message: format!("--level {} not in (0, 1)", config.level) });
    }
    let table = RangeTable::from_env_or_bundled()?;
    let report = match command {
        Command::Build => match cmd_build(config, &table, out)? {
            Some(r) => r,
            None => return Ok(()),
        },
        Command::Agreement => cmd_agreement(config, &table)?,
        Command::SplitStats => cmd_split_stats(config, &table)?,
        Command::Positions => cmd_positions(config, &table)?,
        Command::CompareLangs => cmd_compare_langs(config, &table)?,
        Command::CorrelateCounts => cmd_correlate_counts(config)?,
        Command::Render => cmd_render(config)?,
    };
    let text = report.render(config.format);
    match (&config.output, command) {
        (Some(path), Command::SplitStats | Command::Positions | Command::CompareLangs | Command::CorrelateCounts) => {
            write_file(path, &text)
        }
        _ => {
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Streams the corpus through a lexicon builder in batches of [`BATCH`]
/// records, each batch split over `shards` threads.
pub fn stream_lexicon<R: Read>(source: R, table: &RangeTable, shards: usize) -> Result<LexiconBuilder> {
    let mut builder = LexiconBuilder::new(table.clone());
    let mut batch: Vec<AnnotatedText> = Vec::with_capacity(BATCH.min(4096));
    for rec in CorpusReader::new(source)? {
        batch.push(rec?);
        if batch.len() == BATCH {
            builder.merge(accumulate(table, &batch, shards));
            batch.clear();
        }
    }
    builder.merge(accumulate(table, &batch, shards));
    Ok(builder)
}

fn write_renderings(config: &RunConfig, lexicon: &RankedLexicon) -> Result<()> {
    if let Some(path) = &config.map {
        write_file(path, &render_sentiment_map(lexicon, config.map_options())?)?;
    }
    if let Some(dir) = &config.bars {
        fs::create_dir_all(dir)?;
        for e in lexicon.entries() {
            let path = dir.join(format!("{}.svg", format_codepoint(e.codepoint)));
            write_file(&path, &render_sentiment_bar(e, config.bar_options()))?;
        }
    }
    if let Some(path) = &config.html {
        write_file(path, &render_lexicon_html(lexicon))?;
    }
    Ok(())
}

fn summary_row(t: &mut Table, name: &str, s: &SampleSummary, entries: Option<usize>) {
    t.row([
        name.to_string(),
        entries.map(|e| e.to_string()).unwrap_or_default(),
        s.n.to_string(),
        signed3(s.mean),
        f3(s.sd),
        f4(s.sem()),
    ]);
}

/// Summary of a finished lexicon: size, midpoint split and its Welch test,
/// score histogram mean and the power-law fit of occurrence counts.
fn lexicon_summary(lexicon: &RankedLexicon, bins: f64) -> Result<Report> {
    let mut report = Report::default();
    let mut t = Table::new("Lexicon", ["field", "value"]);
    t.row(["entries".to_string(), lexicon.len().to_string()]);
    t.row(["min_occurrences".to_string(), lexicon.min_occurrences().to_string()]);
    t.row(["source_texts".to_string(), or_na(lexicon.source_texts().map(|n| n.to_string()))]);
    t.row(["occurrences".to_string(), lexicon.total_occurrences().to_string()]);
    t.row(["mean_score".to_string(), or_na(lexicon.mean_score().map(signed3))]);
    if !lexicon.is_empty() {
        let h = lexicon.score_histogram(bins)?;
        let filled = h.bins.iter().filter(|b| b.count > 0).count();
        t.row(["histogram_bins".to_string(), format!("{} ({} non-empty, width {})", h.bins.len(), filled, bins)]);
    }
    let values: Vec<f64> = lexicon.entries().iter().map(|e| e.occurrences() as f64).collect();
    let fit = power_law_mle(&values, lexicon.min_occurrences() as f64).ok();
    t.row([
        "power_law_exponent".to_string(),
        or_na(fit.map(|f| format!("{} (alpha {} ± {}, x_min {})", f3(f.exponent()), f3(f.alpha), f3(f.std_err()), f.x_min))),
    ]);
    report.push(t);

    if lexicon.len() >= 2 {
        let mid = lexicon.midpoint_rank()?;
        let rank = mid.min(lexicon.len() - 1);
        let p = lexicon.partition_stats(rank)?;
        let mut t = Table::new(
            format!("Frequency halves (midpoint rank {mid})"),
            ["half", "entries", "occurrences", "mean", "sd", "sem"],
        );
        summary_row(&mut t, &format!("r <= {rank}"), &p.first.weighted_scores, Some(p.first.entries));
        summary_row(&mut t, &format!("r > {rank}"), &p.second.weighted_scores, Some(p.second.entries));
        let total = p.first.counts + p.second.counts;
        t.row([
            "pooled labels".to_string(),
            String::new(),
            total.total().to_string(),
            signed3(total.distribution().score),
            f3(total.distribution().sd),
            or_na(total.distribution().sem.map(f4)),
        ]);
        report.push(t);
        report.push(welch_table("Welch's t-test (halves)", &p.first.weighted_scores, &p.second.weighted_scores));
    }
    Ok(report)
}

fn welch_table(title: &str, a: &SampleSummary, b: &SampleSummary) -> Table {
    let mut t = Table::new(title, ["t", "dof", "p"]);
    match welch_t_test(a, b) {
        Ok(w) => t.row([format!("{:.3}", w.t), w.dof.to_string(), p_value(w.p_two_tailed)]),
        Err(_) => t.row(["n/a", "n/a", "n/a"]),
    };
    t
}

/// Writes the lexicon CSV to `--output` and returns a summary report, or
/// writes the CSV to `out` and returns nothing when no output path is set.
pub fn cmd_build(config: &RunConfig, table: &RangeTable, out: &mut dyn Write) -> Result<Option<Report>> {
    let builder = stream_lexicon(open(config.input()?)?, table, config.shards as usize)?;
    let lexicon = builder.finish(config.min_occurrences)?;
    write_renderings(config, &lexicon)?;
    match &config.output {
        Some(path) => {
            let mut f = create(path)?;
            export_lexicon_csv(&lexicon, &mut f)?;
            f.flush()?;
            lexicon_summary(&lexicon, config.bins).map(Some)
        }
        None => {
            export_lexicon_csv(&lexicon, out)?;
            Ok(None)
        }
    }
}

pub fn cmd_split_stats(config: &RunConfig, table: &RangeTable) -> Result<Report> {
    let (mut with, mut without) = (SentimentCounts::default(), SentimentCounts::default());
    for rec in CorpusReader::new(open(config.input()?)?)? {
        let rec = rec?;
        if rec.text.chars().any(|c| table.contains(c)) {
            with.add(rec.label, 1);
        } else {
            without.add(rec.label, 1);
        }
    }
    let mut t = Table::new("Sentiment of texts with and without symbols", ["", "with symbols", "without symbols"]);
    let pct = |c: &SentimentCounts, l: SentimentLabel| {
        let n = c.total();
        if n == 0 {
            "0".to_string()
        } else {
            format!("{} ({:.1}%)", c.get(l), 100.0 * c.get(l) as f64 / n as f64)
        }
    };
    for (name, l) in [("negative", SentimentLabel::Negative), ("neutral", SentimentLabel::Neutral), ("positive", SentimentLabel::Positive)] {
        t.row([name.to_string(), pct(&with, l), pct(&without, l)]);
    }
    t.row(["total".to_string(), with.total().to_string(), without.total().to_string()]);
    let (dw, dn) = (with.distribution(), without.distribution());
    let cell = |d: &lexirank::SentimentDistribution, f: &dyn Fn(&lexirank::SentimentDistribution) -> String| {
        if d.n == 0 {
            "n/a".to_string()
        } else {
            f(d)
        }
    };
    t.row(["mean".to_string(), cell(&dw, &|d| signed3(d.score)), cell(&dn, &|d| signed3(d.score))]);
    t.row(["sd".to_string(), cell(&dw, &|d| f3(d.sd)), cell(&dn, &|d| f3(d.sd))]);
    t.row(["sem".to_string(), cell(&dw, &|d| or_na(d.sem.map(f4))), cell(&dn, &|d| or_na(d.sem.map(f4)))]);
    let mut report = Report::default();
    report.push(t);

    let mut w = Table::new("Welch's t-test (with vs without)", ["t", "dof", "p"]);
    match (dw.summary(), dn.summary()) {
        (Some(a), Some(b)) if a.n >= 2 && b.n >= 2 => {
            report.push(welch_table(&w.title, &a, &b));
        }
        _ => {
            w.row(["not applicable", "", ""]);
            report.push(w);
        }
    }
    Ok(report)
}

/// Agreement over pairs of annotations; texts are split by whether they
/// contain a symbol.
pub fn cmd_agreement(config: &RunConfig, table: &RangeTable) -> Result<Report> {
    let mut records = Vec::new();
    let mut with_symbols: HashSet<String> = HashSet::new();
    for rec in CorpusReader::new(open(config.input()?)?)? {
        let mut rec = rec?;
        if rec.text.chars().any(|c| table.contains(c)) {
            with_symbols.insert(rec.text_id.clone());
        }
        rec.text = String::new();
        records.push(rec);
    }
    let pairs = derive_pairs(&records, config.pair_mode.into());
    drop(records);
    let (with, without): (Vec<_>, Vec<_>) = pairs.iter().partition(|p| with_symbols.contains(&p.text_id));
    let m_with = CoincidenceMatrix::from_pairs(with);
    let m_without = CoincidenceMatrix::from_pairs(without);

    if let Some(dir) = &config.output {
        fs::create_dir_all(dir)?;
        for (name, m) in [("coincidence_with_symbols.csv", &m_with), ("coincidence_without_symbols.csv", &m_without)] {
            let mut f = create(&dir.join(name))?;
            m.write_csv(&mut f)?;
            f.flush()?;
        }
    }

    let mut report = Report::default();
    let mode = match config.pair_mode {
        PairModeArg::Inter => "inter",
        PairModeArg::SelfAgreement => "self",
        PairModeArg::All => "all",
    };
    let mut t = Table::new(format!("Agreement ({mode}-annotator pairs)"), ["measure", "with symbols", "without symbols"]);
    let (a, b) = (m_with.measures(), m_without.measures());
    if a.pairs == 0 && b.pairs == 0 {
        t.row(["no annotation pairs", "", ""]);
        report.push(t);
        return Ok(report);
    }
    t.row(["alpha".to_string(), or_na(a.alpha.map(f3)), or_na(b.alpha.map(f3))]);
    t.row(["accuracy".to_string(), or_na(a.accuracy.map(f3)), or_na(b.accuracy.map(f3))]);
    t.row(["f1_neg_pos".to_string(), or_na(a.f1_neg_pos.map(f3)), or_na(b.f1_neg_pos.map(f3))]);
    t.row(["pairs".to_string(), a.pairs.to_string(), b.pairs.to_string()]);
    report.push(t);
    for (title, m) in [("Coincidence matrix, with symbols", &m_with), ("Coincidence matrix, without symbols", &m_without)] {
        let mut t = Table::new(title, ["", "negative", "neutral", "positive", "total"]);
        for (i, name) in ["negative", "neutral", "positive"].iter().enumerate() {
            let row = m.cells()[i];
            t.row([name.to_string(), row[0].to_string(), row[1].to_string(), row[2].to_string(), row.iter().sum::<u64>().to_string()]);
        }
        t.row(["total".to_string(), String::new(), String::new(), String::new(), m.total().to_string()]);
        report.push(t);
    }
    Ok(report)
}

pub fn cmd_positions(config: &RunConfig, table: &RangeTable) -> Result<Report> {
    let builder = stream_lexicon(open(config.input()?)?, table, config.shards as usize)?;
    let lexicon = builder.finish(config.min_occurrences)?;
    let mut report = Report::default();
    let mut t = Table::new("Symbol positions", ["field", "value"]);
    t.row(["entries".to_string(), lexicon.len().to_string()]);
    t.row(["mean_position".to_string(), or_na(lexicon.mean_position().map(f3))]);
    report.push(t);

    let mut fits = Table::new("Trendlines p_c(d) over entries (d = mean position)", ["component", "slope", "intercept", "r_squared"]);
    let x: Vec<f64> = lexicon.entries().iter().map(|e| e.mean_position).collect();
    for (name, label) in [("negativity", SentimentLabel::Negative), ("neutrality", SentimentLabel::Neutral), ("positivity", SentimentLabel::Positive)] {
        let y: Vec<f64> = lexicon.entries().iter().map(|e| e.distribution.probability(label)).collect();
        match ols_fit(&x, &y) {
            Ok(f) => fits.row([name.to_string(), f3(f.slope), f3(f.intercept), f3(f.r_squared)]),
            Err(_) => fits.row([name, "n/a", "n/a", "n/a"]),
        };
    }
    report.push(fits);
    Ok(report)
}

fn corr_cells(c: Option<Correlation>) -> String {
    or_na(c.map(|c| c.display()))
}

pub fn cmd_compare_langs(config: &RunConfig, table: &RangeTable) -> Result<Report> {
    let mut whole = LexiconBuilder::new(table.clone());
    let mut per_language: BTreeMap<String, LexiconBuilder> = BTreeMap::new();
    for rec in CorpusReader::new(open(config.input()?)?)? {
        let rec = rec?;
        whole.add(&rec);
        per_language
            .entry(rec.language.clone())
            .or_insert_with(|| LexiconBuilder::new(table.clone()))
            .add(&rec);
    }
    let reference = whole.finish(config.min_occurrences)?;
    let rows = language_report_from_builders(&per_language, &reference, config.min_occurrences, config.level)?;
    let mut t = Table::new(
        format!("Symbol sentiment by language (min occurrences {}, * = significant at {})", config.min_occurrences, config.level),
        ["language", "texts", "symbols", "shared", "pearson", "spearman"],
    );
    t.row([
        "all".to_string(),
        or_na(reference.source_texts().map(|n| n.to_string())),
        reference.len().to_string(),
        String::new(),
        "/".to_string(),
        "/".to_string(),
    ]);
    for r in rows {
        t.row([
            r.language,
            r.texts_with_symbols.to_string(),
            r.symbols.to_string(),
            r.shared.to_string(),
            corr_cells(r.pearson),
            corr_cells(r.spearman),
        ]);
    }
    let mut report = Report::default();
    report.push(t);
    Ok(report)
}

pub fn cmd_correlate_counts(config: &RunConfig) -> Result<Report> {
    let lexicon = read_lexicon_csv(open(config.input()?)?)?.with_min_occurrences(config.min_occurrences)?;
    let counts_path = config
        .counts
        .as_deref()
        .ok_or_else(|| Error::Io(io::Error::new(io::ErrorKind::InvalidInput, "--counts is required")))?;
    let external = read_counts_csv(open(counts_path)?)?;
    let ours = lexicon.inventory();
    let diff = inventory_diff(&ours, &external.inventory);
    let (x, y): (Vec<f64>, Vec<f64>) =
        diff.common.iter().map(|&c| (ours.get(c) as f64, external.inventory.get(c) as f64)).unzip();
    let (pearson, spearman) = correlate(&x, &y, config.level);

    let mut t = Table::new(
        format!("Overlap with external counts (min occurrences {}, * = significant at {})", lexicon.min_occurrences(), config.level),
        ["field", "value"],
    );
    t.row(["lexicon_symbols".to_string(), ours.len().to_string()]);
    t.row(["external_symbols".to_string(), external.inventory.len().to_string()]);
    t.row(["external_sequences_skipped".to_string(), external.skipped_sequences.to_string()]);
    t.row(["common".to_string(), diff.common.len().to_string()]);
    t.row(["only_lexicon".to_string(), diff.only_a.len().to_string()]);
    t.row(["only_external".to_string(), diff.only_b.len().to_string()]);
    t.row(["pearson".to_string(), corr_cells(pearson)]);
    t.row(["spearman".to_string(), corr_cells(spearman)]);
    let mut report = Report::default();
    report.push(t);
    Ok(report)
}

pub fn cmd_render(config: &RunConfig) -> Result<Report> {
    let lexicon = read_lexicon_csv(open(config.input()?)?)?.with_min_occurrences(config.min_occurrences)?;
    write_renderings(config, &lexicon)?;
    if let Some(path) = &config.output {
        write_file(path, &render_lexicon_html(&lexicon))?;
    }
    let mut report = lexicon_summary(&lexicon, config.bins)?;
    if !lexicon.is_empty() {
        let h = lexicon.score_histogram(config.bins)?;
        let mut t = Table::new(format!("Score histogram (bin width {})", config.bins), ["bin_start", "count"]);
        for b in &h.bins {
            t.row([format!("{:+.3}", b.start), b.count.to_string()]);
        }
        report.push(t);
    }
    Ok(report)
}
