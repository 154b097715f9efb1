//! `So` (Symbol, Other) codepoint classification and symbol extraction.
//!
//! Only single codepoints are matched. Keycap sequences, regional-indicator
//! flags, skin-tone modifiers and ZWJ sequences are not assembled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use crate::error::{Error, Result};

/// Environment variable naming a range file that replaces the bundled table.
pub const TABLE_ENV_VAR: &str = "LEXIRANK_UNICODE_TABLE";

const BUNDLED_TABLE: &str = include_str!("../data/unicode-8.0-so.txt");

/// Sorted, non-overlapping inclusive codepoint intervals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeTable {
    ranges: Vec<(u32, u32)>,
}

impl RangeTable {
    /// Parses `U+XXXX..U+YYYY` lines (a lone `U+XXXX` is a one-codepoint
    /// interval). Blank lines and `#` comments are ignored.
    pub fn parse(src: &str) -> Result<Self> {
        let mut ranges: Vec<(u32, u32)> = Vec::new();
        for (i, raw) in src.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| Error::Parse { line: line_no, message };
            let (lo, hi) = match line.split_once("..") {
                Some((lo, hi)) => (parse_codepoint(lo), parse_codepoint(hi)),
                None => (parse_codepoint(line), parse_codepoint(line)),
            };
            let (lo, hi) = match (lo, hi) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => return Err(bad(format!("bad interval {line:?}"))),
            };
            if lo > hi || hi > 0x10FFFF {
                return Err(bad(format!("bad interval {line:?}")));
            }
            if let Some(&(_, prev_hi)) = ranges.last() {
                if lo <= prev_hi {
                    return Err(bad("intervals must be sorted and disjoint".into()));
                }
            }
            ranges.push((lo, hi));
        }
        Ok(RangeTable { ranges })
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The Unicode 8.0 `So` table compiled into the crate.
    pub fn bundled() -> &'static RangeTable {
        static TABLE: OnceLock<RangeTable> = OnceLock::new();
        TABLE.get_or_init(|| RangeTable::parse(BUNDLED_TABLE).expect("bundled table is well-formed"))
    }

    /// The table named by `LEXIRANK_UNICODE_TABLE`, or the bundled one.
    pub fn from_env_or_bundled() -> Result<RangeTable> {
        match std::env::var_os(TABLE_ENV_VAR) {
            Some(path) if !path.is_empty() => Self::from_path(path),
            _ => Ok(Self::bundled().clone()),
        }
    }

    pub fn ranges(&self) -> &[(u32, u32)] {
        &self.ranges
    }

    /// Number of codepoints covered.
    pub fn len(&self) -> usize {
        self.ranges.iter().map(|&(lo, hi)| (hi - lo + 1) as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.ranges.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        let cp = c as u32;
        let idx = self.ranges.partition_point(|&(_, hi)| hi < cp);
        self.ranges.get(idx).is_some_and(|&(lo, _)| lo <= cp)
    }

    /// Every matching codepoint in `text`, in text order, with its position
    /// normalised to [0, 1] over the codepoint length of the text.
    pub fn extract(&self, text: &str) -> Vec<SymbolOccurrence> {
        let len = text.chars().count();
        let denom = len.saturating_sub(1).max(1) as f64;
        text.chars()
            .enumerate()
            .filter(|&(_, c)| self.contains(c))
            .map(|(index, codepoint)| SymbolOccurrence {
                codepoint,
                index,
                position: index as f64 / denom,
            })
            .collect()
    }
}

fn parse_codepoint(s: &str) -> Option<u32> {
    let s = s.trim();
    let hex = s.strip_prefix("U+").or_else(|| s.strip_prefix("u+"))?;
    if hex.is_empty() || hex.len() > 6 {
        return None;
    }
    u32::from_str_radix(hex, 16).ok()
}

/// Parses `U+XXXX` into a `char`.
pub fn parse_char(s: &str) -> Option<char> {
    parse_codepoint(s).and_then(char::from_u32)
}

/// Formats a codepoint as `U+XXXX` (at least four hex digits).
pub fn format_codepoint(c: char) -> String {
    format!("U+{:04X}", c as u32)
}

/// True iff `c` is in the bundled `So` table.
pub fn is_symbol_other(c: char) -> bool {
    RangeTable::bundled().contains(c)
}

/// [`RangeTable::extract`] against the bundled table.
pub fn extract_occurrences(text: &str) -> Vec<SymbolOccurrence> {
    RangeTable::bundled().extract(text)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolOccurrence {
    pub codepoint: char,
    /// 0-based codepoint offset.
    pub index: usize,
    /// 0 at the first codepoint of the text, 1 at the last.
    pub position: f64,
}

/// Occurrence count per codepoint. Stored counts are always ≥ 1.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolInventory {
    counts: BTreeMap<char, u64>,
}

impl SymbolInventory {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, c: char, count: u64) {
        if count > 0 {
            *self.counts.entry(c).or_insert(0) += count;
        }
    }

    pub fn merge(&mut self, other: &SymbolInventory) {
        for (&c, &n) in &other.counts {
            self.add(c, n);
        }
    }

    /// Counts every occurrence of a table symbol across `texts`.
    pub fn from_texts<'a, I>(table: &RangeTable, texts: I) -> Self
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut inv = Self::new();
        for text in texts {
            for occ in table.extract(text) {
                inv.add(occ.codepoint, 1);
            }
        }
        inv
    }

    pub fn get(&self, c: char) -> u64 {
        self.counts.get(&c).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (char, u64)> + '_ {
        self.counts.iter().map(|(&c, &n)| (c, n))
    }

    pub fn keys(&self) -> BTreeSet<char> {
        self.counts.keys().copied().collect()
    }
}

impl FromIterator<(char, u64)> for SymbolInventory {
    fn from_iter<T: IntoIterator<Item = (char, u64)>>(iter: T) -> Self {
        let mut inv = Self::new();
        for (c, n) in iter {
            inv.add(c, n);
        }
        inv
    }
}

/// External occurrence census read from a `codepoint,count` CSV.
#[derive(Debug, Clone, Default)]
pub struct CountsFile {
    pub inventory: SymbolInventory,
    /// Rows naming more than one codepoint (flags, keycaps), which have no
    /// single-codepoint counterpart and are left out of the inventory.
    pub skipped_sequences: usize,
}

impl fmt::Display for CountsFile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} symbols ({} sequences skipped)", self.inventory.len(), self.skipped_sequences)
    }
}

/// Reads an Emojitracker-style counts file: header `codepoint,count`,
/// codepoints as `U+XXXX`. Multi-codepoint rows (`U+1F1FA U+1F1F8` or
/// `U+1F1FA-U+1F1F8`) are counted in `skipped_sequences`.
pub fn read_counts_csv<R: Read>(source: R) -> Result<CountsFile> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
    let header = reader.headers().map_err(|e| parse_err(&e, 1))?.clone();
    if header.len() != 2 || header[0].trim() != "codepoint" || header[1].trim() != "count" {
        return Err(Error::Parse { line: 1, message: "expected header `codepoint,count`".into() });
    }
    let mut out = CountsFile::default();
    for row in reader.records() {
        let row = row.map_err(|e| parse_err(&e, 0))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let field = row[0].trim();
        let count: u64 = row[1]
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line, message: format!("bad count {:?}", &row[1]) })?;
        let parts: Vec<&str> = field.split([' ', '-']).filter(|s| !s.is_empty()).collect();
        if parts.len() > 1 {
            if parts.iter().any(|p| parse_char(p).is_none()) {
                return Err(Error::Parse { line, message: format!("bad codepoint {field:?}") });
            }
            out.skipped_sequences += 1;
            continue;
        }
        let c = parse_char(field)
            .ok_or_else(|| Error::Parse { line, message: format!("bad codepoint {field:?}") })?;
        out.inventory.add(c, count);
    }
    Ok(out)
}

fn parse_err(e: &csv::Error, line: u64) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(line);
    match e.kind() {
        csv::ErrorKind::Utf8 { .. } => Error::Encoding { line },
        _ => Error::Parse { line, message: e.to_string() },
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct InventoryDiff {
    pub common: BTreeSet<char>,
    pub only_a: BTreeSet<char>,
    pub only_b: BTreeSet<char>,
}

pub fn inventory_diff(a: &SymbolInventory, b: &SymbolInventory) -> InventoryDiff {
    let (ka, kb) = (a.keys(), b.keys());
    InventoryDiff {
        common: ka.intersection(&kb).copied().collect(),
        only_a: ka.difference(&kb).copied().collect(),
        only_b: kb.difference(&ka).copied().collect(),
    }
}
