//! Label counts, Laplace-smoothed sentiment distributions and the ranked
//! symbol lexicon.

use std::collections::{BTreeMap, HashMap};

use crate::corpus::{AnnotatedText, SentimentLabel};
use crate::error::{Error, Result};
use crate::stats::SampleSummary;
use crate::symbols::{RangeTable, SymbolInventory};

/// Number of sentiment classes; the Laplace pseudo-count denominator.
pub const CLASS_COUNT: u64 = 3;

/// Raw per-class occurrence counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct SentimentCounts {
    pub negative: u64,
    pub neutral: u64,
    pub positive: u64,
}

impl SentimentCounts {
    pub const fn new(negative: u64, neutral: u64, positive: u64) -> Self {
        SentimentCounts { negative, neutral, positive }
    }

    pub fn total(&self) -> u64 {
        self.negative + self.neutral + self.positive
    }

    pub fn get(&self, label: SentimentLabel) -> u64 {
        match label {
            SentimentLabel::Negative => self.negative,
            SentimentLabel::Neutral => self.neutral,
            SentimentLabel::Positive => self.positive,
        }
    }

    pub fn add(&mut self, label: SentimentLabel, n: u64) {
        match label {
            SentimentLabel::Negative => self.negative += n,
            SentimentLabel::Neutral => self.neutral += n,
            SentimentLabel::Positive => self.positive += n,
        }
    }

    pub fn merge(&mut self, other: &SentimentCounts) {
        self.negative += other.negative;
        self.neutral += other.neutral;
        self.positive += other.positive;
    }

    pub fn distribution(&self) -> SentimentDistribution {
        laplace_distribution(self)
    }
}

impl std::ops::Add for SentimentCounts {
    type Output = SentimentCounts;

    fn add(mut self, rhs: SentimentCounts) -> SentimentCounts {
        self.merge(&rhs);
        self
    }
}

impl std::iter::Sum for SentimentCounts {
    fn sum<I: Iterator<Item = SentimentCounts>>(iter: I) -> Self {
        iter.fold(SentimentCounts::default(), |a, b| a + b)
    }
}

/// Smoothed class probabilities and the moments of the {-1, 0, +1} variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SentimentDistribution {
    pub negativity: f64,
    pub neutrality: f64,
    pub positivity: f64,
    /// Mean of the distribution, `positivity - negativity`.
    pub score: f64,
    pub sd: f64,
    /// `sd / sqrt(n)`; absent when `n == 0`.
    pub sem: Option<f64>,
    pub n: u64,
}

impl SentimentDistribution {
    pub fn subjectivity(&self) -> f64 {
        self.negativity + self.positivity
    }

    pub fn probability(&self, label: SentimentLabel) -> f64 {
        match label {
            SentimentLabel::Negative => self.negativity,
            SentimentLabel::Neutral => self.neutrality,
            SentimentLabel::Positive => self.positivity,
        }
    }

    /// Mean, SD and sample size as a summary for two-sample tests.
    pub fn summary(&self) -> Option<SampleSummary> {
        SampleSummary::new(self.score, self.sd, self.n).ok()
    }
}

/// Laplace estimate `(N(c) + 1) / (N + 3)` for each class, with the mean,
/// standard deviation and standard error of the resulting distribution.
pub fn laplace_distribution(counts: &SentimentCounts) -> SentimentDistribution {
    let n = counts.total();
    let denom = (n + CLASS_COUNT) as f64;
    let p = |k: u64| (k + 1) as f64 / denom;
    let (negativity, neutrality, positivity) = (p(counts.negative), p(counts.neutral), p(counts.positive));
    let score = (counts.positive as f64 - counts.negative as f64) / denom;
    let var = negativity * (-1.0 - score).powi(2) + neutrality * score.powi(2) + positivity * (1.0 - score).powi(2);
    let sd = var.max(0.0).sqrt();
    let sem = (n > 0).then(|| sd / (n as f64).sqrt());
    SentimentDistribution { negativity, neutrality, positivity, score, sd, sem, n }
}

/// Fixed-point scale for accumulated positions. Integer sums keep shard merges
/// exact regardless of merge order.
const POSITION_SCALE: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct SymbolAccumulator {
    counts: SentimentCounts,
    position_sum: u128,
}

/// Incremental lexicon construction. Builders over disjoint parts of a corpus
/// can be merged in any order with identical results.
#[derive(Debug, Clone)]
pub struct LexiconBuilder {
    table: RangeTable,
    symbols: BTreeMap<char, SymbolAccumulator>,
    /// Distinct symbol sets of texts containing at least one symbol.
    text_sets: HashMap<Vec<char>, u64>,
}

impl LexiconBuilder {
    pub fn new(table: RangeTable) -> Self {
        LexiconBuilder { table, symbols: BTreeMap::new(), text_sets: HashMap::new() }
    }

    /// Counts every symbol occurrence in the text under the text's label.
    /// Returns the number of occurrences found.
    pub fn add(&mut self, record: &AnnotatedText) -> usize {
        let occurrences = self.table.extract(&record.text);
        if occurrences.is_empty() {
            return 0;
        }
        let mut set: Vec<char> = Vec::with_capacity(occurrences.len());
        for occ in &occurrences {
            let acc = self.symbols.entry(occ.codepoint).or_default();
            acc.counts.add(record.label, 1);
            acc.position_sum += (occ.position * POSITION_SCALE).round() as u128;
            set.push(occ.codepoint);
        }
        set.sort_unstable();
        set.dedup();
        *self.text_sets.entry(set).or_insert(0) += 1;
        occurrences.len()
    }

    pub fn merge(&mut self, other: LexiconBuilder) {
        for (c, acc) in other.symbols {
            let mine = self.symbols.entry(c).or_default();
            mine.counts.merge(&acc.counts);
            mine.position_sum += acc.position_sum;
        }
        for (set, n) in other.text_sets {
            *self.text_sets.entry(set).or_insert(0) += n;
        }
    }

    pub fn inventory(&self) -> SymbolInventory {
        self.symbols.iter().map(|(&c, acc)| (c, acc.counts.total())).collect()
    }

    /// Texts seen so far that contain at least one symbol accepted by `keep`.
    pub fn texts_containing_any<F: Fn(char) -> bool>(&self, keep: F) -> u64 {
        self.text_sets.iter().filter(|(set, _)| set.iter().any(|&c| keep(c))).map(|(_, n)| n).sum()
    }

    /// Keeps symbols with at least `min_occurrences` occurrences and ranks
    /// them by occurrences (descending), ties by codepoint (ascending).
    pub fn finish(&self, min_occurrences: u64) -> Result<RankedLexicon> {
        if min_occurrences == 0 {
            return Err(Error::domain("min_occurrences must be at least 1"));
        }
        let entries: Vec<LexiconEntry> = self
            .symbols
            .iter()
            .filter(|(_, acc)| acc.counts.total() >= min_occurrences)
            .map(|(&c, acc)| {
                let n = acc.counts.total();
                let mean_position = acc.position_sum as f64 / POSITION_SCALE / n as f64;
                LexiconEntry::new(c, acc.counts, mean_position)
            })
            .collect();
        let source_texts = self.texts_containing_any(|c| self.symbols[&c].counts.total() >= min_occurrences);
        let mut lexicon = RankedLexicon::from_entries(entries, min_occurrences)?;
        lexicon.source_texts = Some(source_texts);
        Ok(lexicon)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconEntry {
    pub codepoint: char,
    pub rank: usize,
    pub counts: SentimentCounts,
    pub distribution: SentimentDistribution,
    /// Mean normalised position over all occurrences.
    pub mean_position: f64,
}

impl LexiconEntry {
    /// An unranked entry (`rank == 0`) until placed in a [`RankedLexicon`].
    pub fn new(codepoint: char, counts: SentimentCounts, mean_position: f64) -> Self {
        LexiconEntry {
            codepoint,
            rank: 0,
            counts,
            distribution: laplace_distribution(&counts),
            mean_position,
        }
    }

    pub fn occurrences(&self) -> u64 {
        self.counts.total()
    }

    pub fn score(&self) -> f64 {
        self.distribution.score
    }
}

/// Lexicon entries in rank order (rank 1 = most occurrences).
#[derive(Debug, Clone, PartialEq)]
pub struct RankedLexicon {
    entries: Vec<LexiconEntry>,
    min_occurrences: u64,
    /// Texts containing at least one retained symbol, when known.
    source_texts: Option<u64>,
}

impl RankedLexicon {
    /// Sorts and ranks `entries`. Fails if an entry falls below the threshold
    /// or a codepoint repeats.
    pub fn from_entries(mut entries: Vec<LexiconEntry>, min_occurrences: u64) -> Result<Self> {
        if min_occurrences == 0 {
            return Err(Error::domain("min_occurrences must be at least 1"));
        }
        if let Some(e) = entries.iter().find(|e| e.occurrences() < min_occurrences) {
            return Err(Error::domain(format!(
                "U+{:04X} has {} occurrences, below the threshold {min_occurrences}",
                e.codepoint as u32,
                e.occurrences()
            )));
        }
        entries.sort_by(|a, b| b.occurrences().cmp(&a.occurrences()).then(a.codepoint.cmp(&b.codepoint)));
        if let Some(w) = entries.windows(2).find(|w| w[0].codepoint == w[1].codepoint) {
            return Err(Error::domain(format!("duplicate symbol U+{:04X}", w[0].codepoint as u32)));
        }
        for (i, e) in entries.iter_mut().enumerate() {
            e.rank = i + 1;
        }
        Ok(RankedLexicon { entries, min_occurrences, source_texts: None })
    }

    /// Entries meeting a higher threshold, re-ranked.
    pub fn with_min_occurrences(&self, min_occurrences: u64) -> Result<Self> {
        let min = min_occurrences.max(self.min_occurrences);
        let kept = self.entries.iter().filter(|e| e.occurrences() >= min).cloned().collect();
        RankedLexicon::from_entries(kept, min)
    }

    pub fn entries(&self) -> &[LexiconEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn min_occurrences(&self) -> u64 {
        self.min_occurrences
    }

    pub fn source_texts(&self) -> Option<u64> {
        self.source_texts
    }

    pub fn get(&self, codepoint: char) -> Option<&LexiconEntry> {
        self.entries.iter().find(|e| e.codepoint == codepoint)
    }

    pub fn inventory(&self) -> SymbolInventory {
        self.entries.iter().map(|e| (e.codepoint, e.occurrences())).collect()
    }

    pub fn total_occurrences(&self) -> u64 {
        self.entries.iter().map(LexiconEntry::occurrences).sum()
    }

    /// Pooled counts over all entries.
    pub fn total_counts(&self) -> SentimentCounts {
        self.entries.iter().map(|e| e.counts).sum()
    }

    /// Unweighted mean of entry scores.
    pub fn mean_score(&self) -> Option<f64> {
        (!self.is_empty()).then(|| self.entries.iter().map(LexiconEntry::score).sum::<f64>() / self.len() as f64)
    }

    /// Occurrence-weighted mean position over the whole lexicon.
    pub fn mean_position(&self) -> Option<f64> {
        let total = self.total_occurrences();
        (total > 0).then(|| {
            self.entries.iter().map(|e| e.mean_position * e.occurrences() as f64).sum::<f64>() / total as f64
        })
    }

    fn check_rank(&self, rank: usize) -> Result<()> {
        if rank == 0 || rank > self.len() {
            return Err(Error::RankOutOfRange { rank, len: self.len() });
        }
        Ok(())
    }

    /// Cumulative occurrences of ranks `1..=rank`.
    pub fn cdf(&self, rank: usize) -> Result<u64> {
        self.check_rank(rank)?;
        Ok(self.entries[..rank].iter().map(LexiconEntry::occurrences).sum())
    }

    /// The rank whose cumulative occurrences come closest to half the total;
    /// ties go to the smaller rank.
    pub fn midpoint_rank(&self) -> Result<usize> {
        if self.is_empty() {
            return Err(Error::domain("midpoint rank of an empty lexicon"));
        }
        // compare 2*CDF against the total to stay in integers
        let total = self.total_occurrences() as i128;
        let mut best = (i128::MAX, 0usize);
        let mut cum = 0i128;
        for e in &self.entries {
            cum += e.occurrences() as i128;
            let gap = (2 * cum - total).abs();
            if gap < best.0 {
                best = (gap, e.rank);
            }
        }
        Ok(best.1)
    }

    /// Splits the lexicon after `rank` and summarises both halves.
    pub fn partition_stats(&self, rank: usize) -> Result<Partition> {
        if rank == 0 || rank >= self.len() {
            return Err(Error::RankOutOfRange { rank, len: self.len().saturating_sub(1) });
        }
        let (first, second) = self.entries.split_at(rank);
        Ok(Partition { rank, first: PartitionHalf::from_entries(first), second: PartitionHalf::from_entries(second) })
    }

    pub fn score_histogram(&self, bin_width: f64) -> Result<ScoreHistogram> {
        ScoreHistogram::new(self.entries.iter().map(LexiconEntry::score), bin_width)
    }
}

/// Two halves of a ranked lexicon split at `rank`.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    pub rank: usize,
    pub first: PartitionHalf,
    pub second: PartitionHalf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionHalf {
    pub entries: usize,
    /// Pooled raw counts of the half's entries.
    pub counts: SentimentCounts,
    /// Laplace distribution of the pooled counts.
    pub pooled: SentimentDistribution,
    /// Spread of the entries' own scores, each weighted by its occurrences
    /// (population SD; `n` is the half's occurrence total).
    pub weighted_scores: SampleSummary,
}

impl PartitionHalf {
    fn from_entries(entries: &[LexiconEntry]) -> Self {
        let counts: SentimentCounts = entries.iter().map(|e| e.counts).sum();
        let n = counts.total();
        let weight = n as f64;
        let mean = entries.iter().map(|e| e.score() * e.occurrences() as f64).sum::<f64>() / weight;
        let var = entries
            .iter()
            .map(|e| e.occurrences() as f64 * (e.score() - mean).powi(2))
            .sum::<f64>()
            / weight;
        PartitionHalf {
            entries: entries.len(),
            counts,
            pooled: laplace_distribution(&counts),
            weighted_scores: SampleSummary { mean, sd: var.max(0.0).sqrt(), n },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramBin {
    pub start: f64,
    pub count: u64,
}

/// Fixed-width bins covering [-1, 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreHistogram {
    pub bin_width: f64,
    pub bins: Vec<HistogramBin>,
}

impl ScoreHistogram {
    pub fn new(scores: impl IntoIterator<Item = f64>, bin_width: f64) -> Result<Self> {
        if !(bin_width > 0.0 && bin_width <= 2.0) {
            return Err(Error::domain(format!("bin width {bin_width} not in (0, 2]")));
        }
        let n_bins = ((2.0 / bin_width) - 1e-9).ceil().max(1.0) as usize;
        let mut bins: Vec<HistogramBin> = (0..n_bins)
            .map(|i| HistogramBin { start: -1.0 + i as f64 * bin_width, count: 0 })
            .collect();
        for s in scores {
            let idx = (((s + 1.0) / bin_width).floor().max(0.0) as usize).min(n_bins - 1);
            bins[idx].count += 1;
        }
        Ok(ScoreHistogram { bin_width, bins })
    }

    pub fn total(&self) -> u64 {
        self.bins.iter().map(|b| b.count).sum()
    }
}

/// Builds a lexicon from an in-memory corpus with the bundled `So` table.
pub fn build_lexicon(corpus: &[AnnotatedText], min_occurrences: u64) -> Result<RankedLexicon> {
    build_lexicon_with(RangeTable::bundled(), corpus, min_occurrences, 1)
}

/// Builds a lexicon on `shards` threads over contiguous corpus chunks. The
/// result does not depend on `shards`.
pub fn build_lexicon_with(
    table: &RangeTable,
    corpus: &[AnnotatedText],
    min_occurrences: u64,
    shards: usize,
) -> Result<RankedLexicon> {
    accumulate(table, corpus, shards).finish(min_occurrences)
}

/// Builder over `corpus`, split across up to `shards` threads.
pub fn accumulate(table: &RangeTable, corpus: &[AnnotatedText], shards: usize) -> LexiconBuilder {
    let shards = shards.max(1);
    if shards == 1 || corpus.len() < 2 {
        let mut b = LexiconBuilder::new(table.clone());
        corpus.iter().for_each(|r| {
            b.add(r);
        });
        return b;
    }
    let chunk = corpus.len().div_ceil(shards);
    let partials: Vec<LexiconBuilder> = std::thread::scope(|scope| {
        let handles: Vec<_> = corpus
            .chunks(chunk)
            .map(|part| {
                scope.spawn(move || {
                    let mut b = LexiconBuilder::new(table.clone());
                    part.iter().for_each(|r| {
                        b.add(r);
                    });
                    b
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("lexicon shard panicked")).collect()
    });
    let mut iter = partials.into_iter();
    let mut merged = iter.next().unwrap_or_else(|| LexiconBuilder::new(table.clone()));
    for p in iter {
        merged.merge(p);
    }
    merged
}
