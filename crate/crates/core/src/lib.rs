//! Sentiment lexicon of single-codepoint Unicode pictographs (`So` symbols),
//! built from a corpus of short texts labelled negative / neutral / positive.
//!
//! The crate is organised the way the pipeline runs:
//!
//! * [`corpus`] parses the annotated CSV and derives annotation pairs,
//! * [`symbols`] finds `So` codepoints and their positions in a text,
//! * [`sentiment`] turns label counts into smoothed distributions and ranks the lexicon,
//! * [`agreement`] measures annotator agreement over coincidence matrices,
//! * [`stats`] holds the hypothesis tests, correlations and fits,
//! * [`report`] renders SVG/HTML/CSV output.

pub mod agreement;
pub mod corpus;
mod error;
pub mod report;
pub mod sentiment;
pub mod stats;
pub mod symbols;

pub use error::{Error, Result};
pub use corpus::{AnnotatedText, AnnotationPair, PairMode, SentimentLabel};
pub use sentiment::{LexiconEntry, RankedLexicon, SentimentCounts, SentimentDistribution};
pub use symbols::{RangeTable, SymbolInventory, SymbolOccurrence};
