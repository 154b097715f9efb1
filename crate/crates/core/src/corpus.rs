//! Annotated corpus records, CSV ingestion and annotation pairing.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Column order of the corpus CSV.
pub const CORPUS_HEADER: [&str; 5] = ["text_id", "language", "annotator_id", "label", "text"];

/// Ordered three-valued sentiment class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SentimentLabel {
    Negative,
    Neutral,
    Positive,
}

impl SentimentLabel {
    pub const ALL: [SentimentLabel; 3] =
        [SentimentLabel::Negative, SentimentLabel::Neutral, SentimentLabel::Positive];

    pub fn value(self) -> i8 {
        match self {
            SentimentLabel::Negative => -1,
            SentimentLabel::Neutral => 0,
            SentimentLabel::Positive => 1,
        }
    }

    pub fn from_value(value: i64) -> Option<Self> {
        match value {
            -1 => Some(SentimentLabel::Negative),
            0 => Some(SentimentLabel::Neutral),
            1 => Some(SentimentLabel::Positive),
            _ => None,
        }
    }

    /// Position in `ALL`, used to index count triples and matrices.
    pub fn index(self) -> usize {
        (self.value() + 1) as usize
    }
}

impl fmt::Display for SentimentLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

impl FromStr for SentimentLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let value: i64 = s
            .trim()
            .parse()
            .map_err(|_| Error::domain(format!("label {s:?} is not an integer")))?;
        SentimentLabel::from_value(value)
            .ok_or_else(|| Error::domain(format!("label {value} not in {{-1,0,1}}")))
    }
}

/// One labelled text: a single annotation of a single unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedText {
    pub text_id: String,
    pub language: String,
    pub annotator_id: String,
    pub label: SentimentLabel,
    pub text: String,
}

impl AnnotatedText {
    pub fn new(
        text_id: impl Into<String>,
        language: impl Into<String>,
        annotator_id: impl Into<String>,
        label: SentimentLabel,
        text: impl Into<String>,
    ) -> Self {
        AnnotatedText {
            text_id: text_id.into(),
            language: language.into().to_ascii_lowercase(),
            annotator_id: annotator_id.into(),
            label,
            text: text.into(),
        }
    }
}

/// Two labels given to the same unit. Unordered: the labels are stored
/// sorted, so `{a, b}` and `{b, a}` compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AnnotationPair {
    pub text_id: String,
    label_a: SentimentLabel,
    label_b: SentimentLabel,
    pub same_annotator: bool,
}

impl AnnotationPair {
    pub fn new(
        text_id: impl Into<String>,
        a: SentimentLabel,
        b: SentimentLabel,
        same_annotator: bool,
    ) -> Self {
        AnnotationPair {
            text_id: text_id.into(),
            label_a: a.min(b),
            label_b: a.max(b),
            same_annotator,
        }
    }

    pub fn labels(&self) -> (SentimentLabel, SentimentLabel) {
        (self.label_a, self.label_b)
    }
}

/// Which annotation pairs [`derive_pairs`] keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PairMode {
    /// Different annotators (inter-annotator agreement).
    #[default]
    Inter,
    /// Same annotator labelling the unit twice (self-agreement).
    SelfAgreement,
    All,
}

impl PairMode {
    fn keeps(self, same_annotator: bool) -> bool {
        match self {
            PairMode::Inter => !same_annotator,
            PairMode::SelfAgreement => same_annotator,
            PairMode::All => true,
        }
    }
}

impl FromStr for PairMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inter" => Ok(PairMode::Inter),
            "self" => Ok(PairMode::SelfAgreement),
            "all" => Ok(PairMode::All),
            other => Err(Error::domain(format!("unknown pair mode {other:?}"))),
        }
    }
}

/// Streaming reader over a corpus CSV. Yields records in file order and
/// stops at the first bad row.
pub struct CorpusReader<R: Read> {
    inner: csv::Reader<R>,
    record: csv::ByteRecord,
    done: bool,
}

impl<R: Read> CorpusReader<R> {
    pub fn new(source: R) -> Result<Self> {
        let mut inner = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(false)
            .from_reader(source);
        let header = inner.byte_headers().map_err(|e| csv_error(e, 1))?.clone();
        let names: Vec<&[u8]> = header.iter().map(trim_bom).collect();
        let expected: Vec<&[u8]> = CORPUS_HEADER.iter().map(|s| s.as_bytes()).collect();
        if names != expected {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{}`", CORPUS_HEADER.join(",")),
            });
        }
        Ok(CorpusReader { inner, record: csv::ByteRecord::new(), done: false })
    }

    fn read_next(&mut self) -> Result<Option<AnnotatedText>> {
        let more = self.inner.read_byte_record(&mut self.record).map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            csv_error(e, line)
        })?;
        if !more {
            return Ok(None);
        }
        let line = self.record.position().map(|p| p.line()).unwrap_or(0);
        let mut fields = [""; 5];
        for (slot, raw) in fields.iter_mut().zip(self.record.iter()) {
            *slot = std::str::from_utf8(raw).map_err(|_| Error::Encoding { line })?;
        }
        let [text_id, language, annotator_id, label, text] = fields;
        for (name, value) in [("text_id", text_id), ("language", language), ("annotator_id", annotator_id)] {
            if value.is_empty() {
                return Err(Error::Parse { line, message: format!("empty {name}") });
            }
        }
        let label = label.parse::<SentimentLabel>().map_err(|e| match e {
            Error::Domain { message, .. } => Error::Domain { line: Some(line), message },
            other => other,
        })?;
        Ok(Some(AnnotatedText::new(text_id, language, annotator_id, label, text)))
    }
}

impl<R: Read> Iterator for CorpusReader<R> {
    type Item = Result<AnnotatedText>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.read_next() {
            Ok(Some(rec)) => Some(Ok(rec)),
            Ok(None) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

fn trim_bom(field: &[u8]) -> &[u8] {
    field.strip_prefix(b"\xEF\xBB\xBF".as_slice()).unwrap_or(field)
}

fn csv_error(e: csv::Error, line: u64) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => return Error::Io(io),
            _ => unreachable!(),
        }
    }
    let line = if line == 0 { e.position().map(|p| p.line()).unwrap_or(0) } else { line };
    match e.kind() {
        csv::ErrorKind::Utf8 { .. } => Error::Encoding { line },
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            line,
            message: format!("expected {expected_len} fields, found {len}"),
        },
        _ => Error::Parse { line, message: e.to_string() },
    }
}

/// Reads a whole corpus CSV into memory.
pub fn parse_corpus<R: Read>(source: R) -> Result<Vec<AnnotatedText>> {
    CorpusReader::new(source)?.collect()
}

/// Writes records in the format [`parse_corpus`] reads.
pub fn write_corpus<W: Write>(sink: W, corpus: &[AnnotatedText]) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(CORPUS_HEADER).map_err(|e| csv_error(e, 0))?;
    for rec in corpus {
        let label = rec.label.to_string();
        w.write_record([
            rec.text_id.as_str(),
            rec.language.as_str(),
            rec.annotator_id.as_str(),
            label.as_str(),
            rec.text.as_str(),
        ])
        .map_err(|e| csv_error(e, 0))?;
    }
    w.flush()?;
    Ok(())
}

/// All unordered pairs of annotations sharing a `text_id`, filtered by `mode`.
///
/// Units are visited in order of first appearance; within a unit pairs follow
/// annotation order. A unit with k annotations yields k(k-1)/2 pairs before
/// filtering.
pub fn derive_pairs(corpus: &[AnnotatedText], mode: PairMode) -> Vec<AnnotationPair> {
    let mut order: Vec<&str> = Vec::new();
    let mut groups: HashMap<&str, Vec<&AnnotatedText>> = HashMap::new();
    for rec in corpus {
        groups
            .entry(rec.text_id.as_str())
            .or_insert_with(|| {
                order.push(rec.text_id.as_str());
                Vec::new()
            })
            .push(rec);
    }

    let mut pairs = Vec::new();
    for id in order {
        let group = &groups[id];
        for (i, a) in group.iter().enumerate() {
            for b in &group[i + 1..] {
                let same = a.annotator_id == b.annotator_id;
                if mode.keeps(same) {
                    pairs.push(AnnotationPair::new(id, a.label, b.label, same));
                }
            }
        }
    }
    pairs
}

/// Splits records into those whose text contains at least one codepoint
/// accepted by `is_symbol`, and the rest. Order is preserved in both halves.
pub fn split_by_symbol_presence<F>(
    corpus: &[AnnotatedText],
    is_symbol: F,
) -> (Vec<AnnotatedText>, Vec<AnnotatedText>)
where
    F: Fn(char) -> bool,
{
    corpus.iter().cloned().partition(|rec| rec.text.chars().any(&is_symbol))
}

/// Groups records by language tag, keeping file order inside each group.
pub fn split_by_language(corpus: &[AnnotatedText]) -> BTreeMap<String, Vec<AnnotatedText>> {
    let mut groups: BTreeMap<String, Vec<AnnotatedText>> = BTreeMap::new();
    for rec in corpus {
        groups.entry(rec.language.clone()).or_default().push(rec.clone());
    }
    groups
}
