//! WebAssembly bindings for the static demo page in `www/`.

use lexirank::agreement::CoincidenceMatrix;
use lexirank::corpus::parse_corpus;
use lexirank::report::{lexicon_csv_string, render_distribution_bar, render_sentiment_map, BarOptions, MapOptions};
use lexirank::sentiment::{build_lexicon, laplace_distribution};
use lexirank::SentimentCounts;
use wasm_bindgen::prelude::*;

fn js_err(e: lexirank::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Sentiment bar for raw label counts.
#[wasm_bindgen(js_name = sentimentBar)]
pub fn sentiment_bar(negative: u32, neutral: u32, positive: u32) -> String {
    let d = laplace_distribution(&SentimentCounts::new(negative.into(), neutral.into(), positive.into()));
    let title = format!("score {:+.3} (n = {})", d.score, d.n);
    render_distribution_bar(&d, Some(&title), BarOptions::default())
}

/// Agreement measures for a symmetric 3×3 coincidence matrix given row by
/// row. Undefined measures are `NaN`.
#[wasm_bindgen]
pub struct Agreement {
    pub alpha: f64,
    pub accuracy: f64,
    pub f1: f64,
    pub pairs: f64,
}

#[wasm_bindgen]
pub fn agreement(cells: &[u32]) -> Result<Agreement, JsError> {
    agreement_native(cells).map_err(js_err)
}

fn agreement_native(cells: &[u32]) -> lexirank::Result<Agreement> {
    if cells.len() != 9 {
        return Err(lexirank::Error::Domain { line: None, message: format!("expected 9 cells, got {}", cells.len()) });
    }
    let mut grid = [[0u64; 3]; 3];
    for (i, &v) in cells.iter().enumerate() {
        grid[i / 3][i % 3] = v.into();
    }
    let m = CoincidenceMatrix::from_cells(grid)?.measures();
    Ok(Agreement {
        alpha: m.alpha.unwrap_or(f64::NAN),
        accuracy: m.accuracy.unwrap_or(f64::NAN),
        f1: m.f1_neg_pos.unwrap_or(f64::NAN),
        pairs: m.pairs as f64,
    })
}

/// Lexicon CSV and sentiment map for a pasted corpus.
#[wasm_bindgen]
pub struct Analysis {
    csv: String,
    map: String,
    entries: usize,
}

#[wasm_bindgen]
impl Analysis {
    #[wasm_bindgen(getter)]
    pub fn csv(&self) -> String {
        self.csv.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn map(&self) -> String {
        self.map.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn entries(&self) -> usize {
        self.entries
    }
}

#[wasm_bindgen]
pub fn analyze(corpus_csv: &str, min_occurrences: u32) -> Result<Analysis, JsError> {
    analyze_native(corpus_csv, min_occurrences).map_err(js_err)
}

fn analyze_native(corpus_csv: &str, min_occurrences: u32) -> lexirank::Result<Analysis> {
    let corpus = parse_corpus(corpus_csv.as_bytes())?;
    let lexicon = build_lexicon(&corpus, min_occurrences.into())?;
    let map = if lexicon.is_empty() { String::new() } else { render_sentiment_map(&lexicon, MapOptions::default())? };
    Ok(Analysis { csv: lexicon_csv_string(&lexicon), map, entries: lexicon.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bar_is_svg() {
        let svg = sentiment_bar(1, 1, 3);
        assert!(svg.starts_with("<svg"));
        assert!(svg.contains("score +0.250"));
    }

    #[test]
    fn agreement_from_cells() {
        let a = agreement_native(&[1070, 354, 196, 354, 902, 725, 196, 725, 2572]).unwrap();
        assert!((a.alpha - 0.597).abs() < 1e-3);
        assert!((a.accuracy - 0.641).abs() < 1e-3);
        assert_eq!(a.pairs, 3547.0);
        assert!(agreement_native(&[1, 2, 3]).is_err());
        assert!(agreement_native(&[0, 1, 0, 0, 0, 0, 0, 0, 0]).is_err());
    }

    #[test]
    fn analyze_small_corpus() {
        let csv = "text_id,language,annotator_id,label,text\nt1,en,a,1,sun ☀\nt2,en,a,-1,rain ☔\nt3,en,a,1,☀☀\n";
        let a = analyze_native(csv, 1).unwrap();
        assert_eq!(a.entries, 2);
        assert!(a.csv.lines().nth(1).unwrap().starts_with("☀,U+2600,3,"));
        assert!(a.map.contains("<circle"));
        assert_eq!(analyze_native(csv, 10).unwrap().map, "");
        assert!(analyze_native("bad", 1).is_err());
    }
}
