//! Agreement between annotators over a 3×3 coincidence matrix.
//!
//! Every pairable value is entered twice, once as `(c, c')` and once as
//! `(c', c)`, so the matrix is symmetric and its total is twice the number of
//! pairs. Sums stay in integers; only the final ratios are floating point.

use std::io::{Read, Write};
use std::ops::Add;

use crate::corpus::{AnnotationPair, SentimentLabel};
use crate::error::{Error, Result};

const LABEL_NAMES: [&str; 3] = ["negative", "neutral", "positive"];

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct CoincidenceMatrix {
    cells: [[u64; 3]; 3],
}

impl CoincidenceMatrix {
    /// Builds a matrix from explicit cells (row/column order negative,
    /// neutral, positive). Fails unless the cells are symmetric.
    pub fn from_cells(cells: [[u64; 3]; 3]) -> Result<Self> {
        for i in 0..3 {
            for j in 0..i {
                if cells[i][j] != cells[j][i] {
                    return Err(Error::domain(format!(
                        "coincidence matrix not symmetric at ({}, {})",
                        LABEL_NAMES[i], LABEL_NAMES[j]
                    )));
                }
            }
        }
        Ok(CoincidenceMatrix { cells })
    }

    pub fn from_pairs<'a, I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = &'a AnnotationPair>,
    {
        let mut m = CoincidenceMatrix::default();
        for p in pairs {
            let (a, b) = p.labels();
            m.add_pair(a, b);
        }
        m
    }

    pub fn add_pair(&mut self, a: SentimentLabel, b: SentimentLabel) {
        self.cells[a.index()][b.index()] += 1;
        self.cells[b.index()][a.index()] += 1;
    }

    pub fn cells(&self) -> &[[u64; 3]; 3] {
        &self.cells
    }

    pub fn get(&self, a: SentimentLabel, b: SentimentLabel) -> u64 {
        self.cells[a.index()][b.index()]
    }

    /// Row total N(c).
    pub fn margin(&self, c: SentimentLabel) -> u64 {
        self.cells[c.index()].iter().sum()
    }

    /// Grand total N.
    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    /// Number of pairs tabulated (`N / 2`).
    pub fn pairs(&self) -> u64 {
        self.total() / 2
    }

    fn diagonal(&self) -> u64 {
        (0..3).map(|i| self.cells[i][i]).sum()
    }

    /// Krippendorff's alpha with the interval difference `δ(c, c') = |c - c'|`.
    pub fn alpha_interval(&self) -> Result<f64> {
        let n = self.total();
        if n < 4 {
            return Err(Error::UndefinedAgreement(format!("alpha needs N >= 4, got {n}")));
        }
        let delta2 = |i: usize, j: usize| (i as i64 - j as i64).pow(2) as u128;
        let margins: Vec<u128> = SentimentLabel::ALL.iter().map(|&c| self.margin(c) as u128).collect();
        let mut observed = 0u128;
        let mut expected = 0u128;
        for i in 0..3 {
            for j in 0..3 {
                observed += self.cells[i][j] as u128 * delta2(i, j);
                expected += margins[i] * margins[j] * delta2(i, j);
            }
        }
        if expected == 0 {
            return Err(Error::UndefinedAgreement("all values fall in one label".into()));
        }
        // 1 - Do/De = 1 - (observed/N) / (expected/(N(N-1)))
        let n = n as f64;
        Ok(1.0 - observed as f64 * (n - 1.0) / expected as f64)
    }

    /// Fraction of the total on the diagonal.
    pub fn accuracy(&self) -> Result<f64> {
        let n = self.total();
        if n == 0 {
            return Err(Error::UndefinedAgreement("empty coincidence matrix".into()));
        }
        Ok(self.diagonal() as f64 / n as f64)
    }

    /// Mean of `N(c,c) / N(c)` over the negative and positive classes.
    pub fn f1_neg_pos(&self) -> Result<f64> {
        let f1 = |c: SentimentLabel| {
            let margin = self.margin(c);
            if margin == 0 {
                return Err(Error::UndefinedAgreement(format!("no {} labels", LABEL_NAMES[c.index()])));
            }
            Ok(self.get(c, c) as f64 / margin as f64)
        };
        Ok((f1(SentimentLabel::Negative)? + f1(SentimentLabel::Positive)?) / 2.0)
    }

    /// The three measures together; each is `None` where undefined.
    pub fn measures(&self) -> AgreementMeasures {
        AgreementMeasures {
            alpha: self.alpha_interval().ok(),
            accuracy: self.accuracy().ok(),
            f1_neg_pos: self.f1_neg_pos().ok(),
            pairs: self.pairs(),
        }
    }

    /// CSV with a header row and one row per label, plus margins.
    pub fn write_csv<W: Write>(&self, mut sink: W) -> Result<()> {
        writeln!(sink, "sentiment,negative,neutral,positive,total")?;
        for (i, name) in LABEL_NAMES.iter().enumerate() {
            let row = &self.cells[i];
            writeln!(sink, "{name},{},{},{},{}", row[0], row[1], row[2], row.iter().sum::<u64>())?;
        }
        let col = |j: usize| (0..3).map(|i| self.cells[i][j]).sum::<u64>();
        writeln!(sink, "total,{},{},{},{}", col(0), col(1), col(2), self.total())?;
        Ok(())
    }

    /// Reads the format written by [`write_csv`](Self::write_csv). The
    /// `total` row and column are optional and checked when present.
    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).flexible(true).from_reader(source);
        let header = reader
            .headers()
            .map_err(|e| Error::Parse { line: 1, message: e.to_string() })?
            .clone();
        let head: Vec<&str> = header.iter().map(str::trim).collect();
        if head.len() < 4 || head[1..4] != LABEL_NAMES {
            return Err(Error::Parse {
                line: 1,
                message: "expected header `sentiment,negative,neutral,positive[,total]`".into(),
            });
        }
        let mut cells = [[0u64; 3]; 3];
        let mut seen = [false; 3];
        let mut total_row = None;
        for row in reader.records() {
            let row = row.map_err(|e| Error::Parse { line: 0, message: e.to_string() })?;
            let line = row.position().map(|p| p.line()).unwrap_or(0);
            let bad = |message: String| Error::Parse { line, message };
            let values: Vec<u64> = row
                .iter()
                .skip(1)
                .map(|v| v.trim().parse::<u64>().map_err(|_| bad(format!("bad count {v:?}"))))
                .collect::<Result<_>>()?;
            if values.len() < 3 {
                return Err(bad("expected three counts".into()));
            }
            let name = row[0].trim();
            if name == "total" {
                total_row = Some(values);
                continue;
            }
            let i = LABEL_NAMES
                .iter()
                .position(|&l| l == name)
                .ok_or_else(|| bad(format!("unknown label {name:?}")))?;
            if seen[i] {
                return Err(bad(format!("duplicate row {name:?}")));
            }
            seen[i] = true;
            cells[i].copy_from_slice(&values[..3]);
            if let Some(&t) = values.get(3) {
                if t != values[..3].iter().sum::<u64>() {
                    return Err(bad(format!("row total {t} does not match")));
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::Parse { line: 0, message: "missing label rows".into() });
        }
        let m = Self::from_cells(cells)?;
        if let Some(t) = total_row {
            if t.get(3).is_some_and(|&grand| grand != m.total()) {
                return Err(Error::Parse { line: 0, message: "grand total does not match".into() });
            }
        }
        Ok(m)
    }
}

impl Add for CoincidenceMatrix {
    type Output = CoincidenceMatrix;

    fn add(mut self, rhs: CoincidenceMatrix) -> CoincidenceMatrix {
        for i in 0..3 {
            for j in 0..3 {
                self.cells[i][j] += rhs.cells[i][j];
            }
        }
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgreementMeasures {
    pub alpha: Option<f64>,
    pub accuracy: Option<f64>,
    pub f1_neg_pos: Option<f64>,
    pub pairs: u64,
}

pub fn coincidence_from_pairs(pairs: &[AnnotationPair]) -> CoincidenceMatrix {
    CoincidenceMatrix::from_pairs(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use SentimentLabel::*;

    fn table(cells: [[u64; 3]; 3]) -> CoincidenceMatrix {
        CoincidenceMatrix::from_cells(cells).unwrap()
    }

    #[test]
    fn single_pairs() {
        let m = CoincidenceMatrix::from_pairs(&[AnnotationPair::new("t", Positive, Positive, false)]);
        assert_eq!(m.get(Positive, Positive), 2);
        assert_eq!(m.total(), 2);
        let m = CoincidenceMatrix::from_pairs(&[AnnotationPair::new("t", Negative, Positive, false)]);
        assert_eq!(m.get(Negative, Positive), 1);
        assert_eq!(m.get(Positive, Negative), 1);
        assert_eq!(m.total(), 2);
    }

    #[test]
    fn with_symbols_table() {
        let m = table([[1070, 354, 196], [354, 902, 725], [196, 725, 2572]]);
        assert_eq!(m.total(), 7094);
        assert_eq!(m.margin(Neutral), 1981);
        assert!((m.alpha_interval().unwrap() - 0.597).abs() < 0.001);
        assert!((m.accuracy().unwrap() - 0.641).abs() < 0.001);
        assert!((m.f1_neg_pos().unwrap() - 0.698).abs() < 0.001);
    }

    #[test]
    fn diagonal_is_perfect() {
        let m = table([[4, 0, 0], [0, 0, 0], [0, 0, 6]]);
        assert_eq!(m.alpha_interval().unwrap(), 1.0);
        assert_eq!(m.accuracy().unwrap(), 1.0);
        assert_eq!(m.f1_neg_pos().unwrap(), 1.0);
    }

    #[test]
    fn undefined_cases() {
        let one_label = table([[0, 0, 0], [0, 10, 0], [0, 0, 0]]);
        assert!(matches!(one_label.alpha_interval(), Err(Error::UndefinedAgreement(_))));
        assert!(one_label.f1_neg_pos().is_err());
        assert!(CoincidenceMatrix::default().accuracy().is_err());
        assert!(table([[1, 0, 0], [0, 0, 0], [0, 0, 1]]).alpha_interval().is_err());
        assert!(CoincidenceMatrix::from_cells([[1, 2, 0], [0, 1, 0], [0, 0, 1]]).is_err());
    }

    #[test]
    fn extreme_disagreement_costs_more() {
        let mild = table([[10, 0, 0], [0, 10, 1], [0, 1, 10]]);
        let harsh = table([[10, 0, 1], [0, 10, 0], [1, 0, 10]]);
        assert!(harsh.alpha_interval().unwrap() < mild.alpha_interval().unwrap());
        assert_eq!(harsh.accuracy().unwrap(), mild.accuracy().unwrap());
    }

    #[test]
    fn csv_round_trip() {
        let m = table([[15356, 7777, 3004], [7777, 23670, 10921], [3004, 10921, 21624]]);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.ends_with("total,26137,42368,35549,104054\n"));
        assert_eq!(CoincidenceMatrix::read_csv(buf.as_slice()).unwrap(), m);

        let plain = "sentiment,negative,neutral,positive\nnegative,1,0,0\nneutral,0,1,0\npositive,0,0,1\n";
        assert_eq!(CoincidenceMatrix::read_csv(plain.as_bytes()).unwrap().total(), 3);
        let asym = "sentiment,negative,neutral,positive\nnegative,1,2,0\nneutral,0,1,0\npositive,0,0,1\n";
        assert!(CoincidenceMatrix::read_csv(asym.as_bytes()).is_err());
        let bad_total = "sentiment,negative,neutral,positive,total\nnegative,1,0,0,2\nneutral,0,1,0,1\npositive,0,0,1,1\n";
        assert!(CoincidenceMatrix::read_csv(bad_total.as_bytes()).is_err());
    }
}
