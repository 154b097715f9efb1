//! SVG sentiment bars and maps, lexicon CSV/HTML export, and the
//! per-language comparison table.
//!
//! All renderers are pure: identical input gives identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};

use crate::corpus::AnnotatedText;
use crate::error::{Error, Result};
use crate::sentiment::{LexiconBuilder, LexiconEntry, RankedLexicon, SentimentCounts, SentimentDistribution};
use crate::stats::{correlation_significant, pearson, spearman, Significance};
use crate::symbols::{format_codepoint, parse_char, RangeTable};

pub const RED: &str = "#d7191c";
pub const YELLOW: &str = "#ffdf00";
pub const GREEN: &str = "#1a9641";
const GREY: &str = "#808080";

const RED_RGB: [u8; 3] = [0xd7, 0x19, 0x1c];
const YELLOW_RGB: [u8; 3] = [0xff, 0xdf, 0x00];
const GREEN_RGB: [u8; 3] = [0x1a, 0x96, 0x41];

/// Half-width of the confidence band in standard errors (95%).
pub const CONFIDENCE_Z: f64 = 1.96;

/// Header of the lexicon CSV.
pub const LEXICON_HEADER: [&str; 13] = [
    "emoji", "codepoint", "occurrences", "position", "n_neg", "n_neut", "n_pos", "p_neg", "p_neut", "p_pos",
    "score", "sd", "sem",
];

/// Four decimals, never `-0.0000`.
fn fmt4(v: f64) -> String {
    let s = format!("{v:.4}");
    if s == "-0.0000" {
        "0.0000".into()
    } else {
        s
    }
}

fn fmt2(v: f64) -> String {
    let s = format!("{v:.2}");
    if s == "-0.00" {
        "0.00".into()
    } else {
        s
    }
}

fn xml_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Layout of one sentiment bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarGeometry {
    pub width_px: u32,
    pub height_px: u32,
    /// End of the red segment and end of the yellow segment, as fractions of
    /// the bar width.
    pub boundaries: [f64; 2],
    /// Score ± 1.96·SEM, clamped to [-1, 1]. Degenerate when SEM is absent.
    pub marker: (f64, f64),
    pub score: f64,
}

impl BarGeometry {
    pub fn new(dist: &SentimentDistribution, width_px: u32, height_px: u32) -> Self {
        let half = dist.sem.map_or(0.0, |sem| CONFIDENCE_Z * sem);
        let score = dist.score.clamp(-1.0, 1.0);
        BarGeometry {
            width_px,
            height_px,
            boundaries: [dist.negativity, dist.negativity + dist.neutrality],
            marker: ((score - half).max(-1.0), (score + half).min(1.0)),
            score,
        }
    }

    /// Pixel widths of the red, yellow and green segments. They always sum
    /// to `width_px`.
    pub fn segment_pixels(&self) -> [u32; 3] {
        let w = self.width_px as f64;
        let b1 = ((self.boundaries[0] * w).round() as u32).min(self.width_px);
        let b2 = ((self.boundaries[1] * w).round() as u32).clamp(b1, self.width_px);
        [b1, b2 - b1, self.width_px - b2]
    }

    /// x coordinate of a score in [-1, 1].
    pub fn score_x(&self, score: f64) -> f64 {
        (score.clamp(-1.0, 1.0) + 1.0) / 2.0 * self.width_px as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BarOptions {
    pub width: u32,
    pub height: u32,
}

impl Default for BarOptions {
    fn default() -> Self {
        BarOptions { width: 400, height: 40 }
    }
}

fn bar_body(out: &mut String, g: &BarGeometry) {
    let [red, yellow, green] = g.segment_pixels();
    let h = g.height_px;
    let _ = writeln!(out, r#"<rect x="0" y="0" width="{red}" height="{h}" fill="{RED}"/>"#);
    let _ = writeln!(out, r#"<rect x="{red}" y="0" width="{yellow}" height="{h}" fill="{YELLOW}"/>"#);
    let _ = writeln!(out, r#"<rect x="{}" y="0" width="{green}" height="{h}" fill="{GREEN}"/>"#, red + yellow);
    let (lo, hi) = (g.score_x(g.marker.0), g.score_x(g.marker.1));
    let band_y = h as f64 / 3.0;
    let _ = writeln!(
        out,
        r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{GREY}" fill-opacity="0.85"/>"#,
        fmt2(lo),
        fmt2(band_y),
        fmt2(hi - lo),
        fmt2(band_y)
    );
    let sx = fmt2(g.score_x(g.score));
    let _ = writeln!(out, r##"<line x1="{sx}" y1="0" x2="{sx}" y2="{h}" stroke="#000000" stroke-width="1"/>"##);
}

fn svg_open(out: &mut String, width: u32, height: u32) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
}

/// Sentiment bar for an arbitrary distribution, with an optional title.
pub fn render_distribution_bar(dist: &SentimentDistribution, title: Option<&str>, opts: BarOptions) -> String {
    let g = BarGeometry::new(dist, opts.width, opts.height);
    let mut out = String::new();
    svg_open(&mut out, opts.width, opts.height);
    if let Some(t) = title {
        let _ = writeln!(out, "<title>{}</title>", xml_escape(t));
    }
    bar_body(&mut out, &g);
    out.push_str("</svg>\n");
    out
}

fn entry_title(e: &LexiconEntry) -> String {
    format!(
        "{} {} N={} score={}",
        e.codepoint,
        format_codepoint(e.codepoint),
        e.occurrences(),
        fmt4(e.score())
    )
}

/// Tri-colour bar (red/yellow/green proportional to p−, p0, p+) over the
/// score range −1..+1, with a grey band at score ± 1.96·SEM.
pub fn render_sentiment_bar(entry: &LexiconEntry, opts: BarOptions) -> String {
    render_distribution_bar(&entry.distribution, Some(&entry_title(entry)), opts)
}

/// Fill colour for a score: red at −1, yellow at 0, green at +1, linear in
/// between.
pub fn score_color(score: f64) -> String {
    let s = score.clamp(-1.0, 1.0);
    let (from, to, t) = if s < 0.0 { (RED_RGB, YELLOW_RGB, s + 1.0) } else { (YELLOW_RGB, GREEN_RGB, s) };
    let ch = |i: usize| (from[i] as f64 + (to[i] as f64 - from[i] as f64) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", ch(0), ch(1), ch(2))
}

/// Bubble radius in pixels per decade of occurrences.
pub const RADIUS_PER_DECADE: f64 = 6.0;
/// Smallest bubble radius, so single occurrences stay visible.
pub const MIN_RADIUS: f64 = 2.0;

pub fn bubble_radius(occurrences: u64) -> f64 {
    (RADIUS_PER_DECADE * (occurrences.max(1) as f64).log10()).max(MIN_RADIUS)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MapOptions {
    pub width: u32,
    pub height: u32,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions { width: 1000, height: 700 }
    }
}

const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 30.0;
const MARGIN_TOP: f64 = 30.0;
const MARGIN_BOTTOM: f64 = 60.0;

/// Scatter of score (x, −1..1) against neutrality (y, 0..1), one bubble
/// per entry sized by log10 of its occurrences and coloured by score.
pub fn render_sentiment_map(lexicon: &RankedLexicon, opts: MapOptions) -> Result<String> {
    if lexicon.is_empty() {
        return Err(Error::domain("cannot draw a map of an empty lexicon"));
    }
    let (w, h) = (opts.width as f64, opts.height as f64);
    let plot_w = (w - MARGIN_LEFT - MARGIN_RIGHT).max(1.0);
    let plot_h = (h - MARGIN_TOP - MARGIN_BOTTOM).max(1.0);
    let px = |score: f64| MARGIN_LEFT + (score.clamp(-1.0, 1.0) + 1.0) / 2.0 * plot_w;
    let py = |p0: f64| MARGIN_TOP + (1.0 - p0.clamp(0.0, 1.0)) * plot_h;

    let mut out = String::new();
    svg_open(&mut out, opts.width, opts.height);
    let _ = writeln!(out, "<title>Sentiment map of {} symbols</title>", lexicon.len());
    let _ = writeln!(out, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, opts.width, opts.height);

    out.push_str("<g font-family=\"sans-serif\" font-size=\"12\" fill=\"#000000\">\n");
    let (x0, x1, y0, y1) = (px(-1.0), px(1.0), py(0.0), py(1.0));
    let _ = writeln!(
        out,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="none" stroke="#000000"/>"##,
        fmt2(x0),
        fmt2(y1),
        fmt2(x1 - x0),
        fmt2(y0 - y1)
    );
    for i in 0..=4 {
        let score = -1.0 + i as f64 * 0.5;
        let x = fmt2(px(score));
        let _ = writeln!(
            out,
            r##"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="#cccccc"/>"##,
            fmt2(y1),
            fmt2(y0)
        );
        let _ = writeln!(out, r#"<text x="{x}" y="{}" text-anchor="middle">{score:+.1}</text>"#, fmt2(y0 + 18.0));
        let p0 = i as f64 * 0.25;
        let y = fmt2(py(p0));
        let _ = writeln!(
            out,
            r##"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="#cccccc"/>"##,
            fmt2(x0),
            fmt2(x1)
        );
        let _ = writeln!(out, r#"<text x="{}" y="{y}" text-anchor="end" dominant-baseline="middle">{p0:.2}</text>"#, fmt2(x0 - 8.0));
    }
    let _ = writeln!(
        out,
        r#"<text x="{}" y="{}" text-anchor="middle">sentiment score</text>"#,
        fmt2((x0 + x1) / 2.0),
        fmt2(h - 15.0)
    );
    let _ = writeln!(
        out,
        r#"<text x="20" y="{}" text-anchor="middle" transform="rotate(-90 20 {})">neutrality</text>"#,
        fmt2((y0 + y1) / 2.0),
        fmt2((y0 + y1) / 2.0)
    );
    out.push_str("</g>\n<g fill-opacity=\"0.75\" stroke=\"#333333\" stroke-width=\"0.5\">\n");
    for e in lexicon.entries() {
        let _ = writeln!(
            out,
            r#"<circle cx="{}" cy="{}" r="{}" fill="{}"><title>{}</title></circle>"#,
            fmt2(px(e.score())),
            fmt2(py(e.distribution.neutrality)),
            fmt2(bubble_radius(e.occurrences())),
            score_color(e.score()),
            xml_escape(&entry_title(e))
        );
    }
    out.push_str("</g>\n</svg>\n");
    Ok(out)
}

/// Writes the lexicon CSV, one row per entry in rank order.
pub fn export_lexicon_csv<W: Write>(lexicon: &RankedLexicon, sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(LEXICON_HEADER).map_err(io)?;
    for e in lexicon.entries() {
        let d = &e.distribution;
        w.write_record([
            e.codepoint.to_string(),
            format_codepoint(e.codepoint),
            e.occurrences().to_string(),
            fmt4(e.mean_position),
            e.counts.negative.to_string(),
            e.counts.neutral.to_string(),
            e.counts.positive.to_string(),
            fmt4(d.negativity),
            fmt4(d.neutrality),
            fmt4(d.positivity),
            fmt4(d.score),
            fmt4(d.sd),
            d.sem.map(fmt4).unwrap_or_default(),
        ])
        .map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn lexicon_csv_string(lexicon: &RankedLexicon) -> String {
    let mut buf = Vec::new();
    export_lexicon_csv(lexicon, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is UTF-8")
}

/// Reads a lexicon CSV back. Counts and positions come from the file;
/// probabilities are recomputed from the counts. The threshold of the result
/// is the smallest occurrence count present (1 for an empty file).
pub fn read_lexicon_csv<R: Read>(source: R) -> Result<RankedLexicon> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers().map_err(|e| Error::Parse { line: 1, message: e.to_string() })?.clone();
    if header.iter().collect::<Vec<_>>() != LEXICON_HEADER {
        return Err(Error::Parse { line: 1, message: format!("expected header `{}`", LEXICON_HEADER.join(",")) });
    }
    let mut entries = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::Parse { line, message };
        let num = |i: usize| row[i].parse::<u64>().map_err(|_| bad(format!("bad {} {:?}", LEXICON_HEADER[i], &row[i])));
        let c = parse_char(&row[1]).ok_or_else(|| bad(format!("bad codepoint {:?}", &row[1])))?;
        if row[0].chars().ne(std::iter::once(c)) {
            return Err(bad(format!("emoji column {:?} does not match {}", &row[0], &row[1])));
        }
        let counts = SentimentCounts::new(num(4)?, num(5)?, num(6)?);
        if counts.total() != num(2)? {
            return Err(bad("occurrences do not equal the sum of class counts".into()));
        }
        let position: f64 = row[3].parse().map_err(|_| bad(format!("bad position {:?}", &row[3])))?;
        if !(0.0..=1.0).contains(&position) {
            return Err(bad(format!("position {position} outside [0, 1]")));
        }
        entries.push(LexiconEntry::new(c, counts, position));
    }
    let min = entries.iter().map(LexiconEntry::occurrences).min().unwrap_or(1).max(1);
    RankedLexicon::from_entries(entries, min)
}

/// Static HTML ranking table with an inline sentiment bar per entry.
pub fn render_lexicon_html(lexicon: &RankedLexicon) -> String {
    let mut out = String::new();
    out.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
    out.push_str("<title>Symbol sentiment ranking</title>\n<style>\n");
    out.push_str("body{font-family:sans-serif;margin:2em}table{border-collapse:collapse}");
    out.push_str("th,td{padding:2px 8px;text-align:right;border-bottom:1px solid #ddd}");
    out.push_str("td.sym{font-size:1.5em;text-align:center}td.bar{text-align:left}\n</style>\n</head>\n<body>\n");
    let _ = writeln!(out, "<h1>Symbol sentiment ranking</h1>");
    let _ = writeln!(
        out,
        "<p>{} symbols with at least {} occurrences; {} occurrences in total.</p>",
        lexicon.len(),
        lexicon.min_occurrences(),
        lexicon.total_occurrences()
    );
    out.push_str("<table>\n<thead><tr><th>Rank</th><th>Symbol</th><th>Codepoint</th><th>Occurrences</th>");
    out.push_str("<th>Position</th><th>Neg</th><th>Neut</th><th>Pos</th><th>Score</th><th>Sentiment bar</th></tr></thead>\n<tbody>\n");
    let bar = BarOptions { width: 160, height: 14 };
    for e in lexicon.entries() {
        let d = &e.distribution;
        let svg = render_distribution_bar(d, None, bar);
        let _ = writeln!(
            out,
            "<tr><td>{}</td><td class=\"sym\">{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td class=\"bar\">{}</td></tr>",
            e.rank,
            xml_escape(&e.codepoint.to_string()),
            format_codepoint(e.codepoint),
            e.occurrences(),
            fmt4(e.mean_position),
            fmt4(d.negativity),
            fmt4(d.neutrality),
            fmt4(d.positivity),
            fmt4(d.score),
            svg.trim_end().replace('\n', "")
        );
    }
    out.push_str("</tbody>\n</table>\n</body>\n</html>\n");
    out
}

/// A correlation coefficient with its significance test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub significance: Significance,
}

impl Correlation {
    fn compute(r: f64, n: usize, level: f64) -> Option<Self> {
        correlation_significant(r, n, level).ok().map(|significance| Correlation { r, significance })
    }

    /// Three decimals, starred when significant.
    pub fn display(&self) -> String {
        format!("{:.3}{}", self.r, if self.significance.significant { "*" } else { "" })
    }
}

/// Pearson and Spearman of `x` against `y`, absent below four points or for
/// constant input.
pub fn correlate(x: &[f64], y: &[f64], level: f64) -> (Option<Correlation>, Option<Correlation>) {
    if x.len() < 4 {
        return (None, None);
    }
    let p = pearson(x, y).ok().and_then(|r| Correlation::compute(r, x.len(), level));
    let s = spearman(x, y).ok().and_then(|r| Correlation::compute(r, x.len(), level));
    (p, s)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageRow {
    pub language: String,
    /// Texts containing at least one symbol of the reference lexicon.
    pub texts_with_symbols: u64,
    /// Symbols meeting the threshold within this language.
    pub symbols: usize,
    /// Of those, symbols also in the reference lexicon.
    pub shared: usize,
    pub pearson: Option<Correlation>,
    pub spearman: Option<Correlation>,
}

/// Per-language lexicons compared against a reference lexicon by score.
pub fn language_report(
    corpus: &[AnnotatedText],
    table: &RangeTable,
    reference: &RankedLexicon,
    min_occurrences: u64,
    level: f64,
) -> Result<Vec<LanguageRow>> {
    let mut builders: BTreeMap<String, LexiconBuilder> = BTreeMap::new();
    for rec in corpus {
        builders
            .entry(rec.language.clone())
            .or_insert_with(|| LexiconBuilder::new(table.clone()))
            .add(rec);
    }
    language_report_from_builders(&builders, reference, min_occurrences, level)
}

/// As [`language_report`], from per-language builders already filled.
/// Rows are ordered by symbol count (descending), then language.
pub fn language_report_from_builders(
    builders: &BTreeMap<String, LexiconBuilder>,
    reference: &RankedLexicon,
    min_occurrences: u64,
    level: f64,
) -> Result<Vec<LanguageRow>> {
    if min_occurrences == 0 {
        return Err(Error::domain("min_occurrences must be at least 1"));
    }
    let in_reference = reference.inventory();
    let mut rows = Vec::with_capacity(builders.len());
    for (language, builder) in builders {
        let lex = builder.finish(min_occurrences)?;
        let (mut x, mut y) = (Vec::new(), Vec::new());
        for e in lex.entries() {
            if let Some(r) = reference.get(e.codepoint) {
                x.push(r.score());
                y.push(e.score());
            }
        }
        let (pearson, spearman) = correlate(&x, &y, level);
        rows.push(LanguageRow {
            language: language.clone(),
            texts_with_symbols: builder.texts_containing_any(|c| in_reference.get(c) > 0),
            symbols: lex.len(),
            shared: x.len(),
            pearson,
            spearman,
        });
    }
    rows.sort_by(|a, b| b.symbols.cmp(&a.symbols).then_with(|| a.language.cmp(&b.language)));
    Ok(rows)
}
