//! Acceptance suite. Each test prints one `PASS`/`FAIL` line per criterion;
//! run with `--nocapture` to see them.

mod common;

use std::fs::File;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use lexirank::agreement::CoincidenceMatrix;
use lexirank::report::{correlate, language_report};
use lexirank::sentiment::{build_lexicon, laplace_distribution};
use lexirank::stats::{pearson, power_law_mle, spearman, welch_t_test, SampleSummary};
use lexirank::symbols::{inventory_diff, read_counts_csv};
use lexirank::corpus::parse_corpus;
use lexirank::{AnnotationPair, RangeTable, SentimentCounts, SentimentLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{fixture, lexirank, synthetic_corpus};

struct Criterion {
    id: &'static str,
    name: &'static str,
    checks: Vec<(String, bool)>,
}

impl Criterion {
    fn new(id: &'static str, name: &'static str) -> Self {
        Criterion { id, name, checks: Vec::new() }
    }

    fn check(&mut self, what: impl Into<String>, ok: bool) {
        self.checks.push((what.into(), ok));
    }

    fn near(&mut self, what: &str, got: f64, want: f64, tol: f64) {
        self.check(format!("{what} = {got:.6} (want {want} ± {tol})"), (got - want).abs() <= tol);
    }

    fn finish(self) {
        let ok = self.checks.iter().all(|(_, ok)| *ok);
        println!("{} {}: {}", self.id, self.name, if ok { "PASS" } else { "FAIL" });
        for (what, pass) in &self.checks {
            println!("    [{}] {what}", if *pass { "ok" } else { "FAIL" });
        }
        assert!(ok, "{} failed", self.id);
    }
}

fn matrix(name: &str) -> CoincidenceMatrix {
    CoincidenceMatrix::read_csv(File::open(fixture(name)).unwrap()).unwrap()
}

fn fixture_rows(name: &str) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(fixture(name)).unwrap();
    r.records().map(|row| row.unwrap().iter().map(str::to_string).collect()).collect()
}

#[test]
fn ac1_agreement_exactness() {
    let mut c = Criterion::new("AC1", "agreement measures from coincidence tables");
    let start = Instant::now();
    for (name, want) in [
        ("coincidence_with_symbols.csv", [0.597, 0.641, 0.698]),
        ("coincidence_without_symbols.csv", [0.495, 0.583, 0.598]),
    ] {
        let m = matrix(name);
        c.near(&format!("{name} alpha"), m.alpha_interval().unwrap(), want[0], 0.001);
        c.near(&format!("{name} accuracy"), m.accuracy().unwrap(), want[1], 0.001);
        c.near(&format!("{name} f1(-,+)"), m.f1_neg_pos().unwrap(), want[2], 0.001);
    }
    let elapsed = start.elapsed();
    c.check(format!("runtime {elapsed:?} < 1s"), elapsed < Duration::from_secs(1));
    c.finish();
}

#[test]
fn ac2_distribution_statistics() {
    let mut c = Criterion::new("AC2", "label distribution mean / SD / SEM");
    let want = [("with_symbols", 0.365, 0.762, 0.0029), ("without_symbols", 0.106, 0.785, 0.0006)];
    let rows = fixture_rows("label_counts.csv");
    for (row, (name, mean, sd, sem)) in rows.iter().zip(want) {
        assert_eq!(row[0], name);
        let n: Vec<u64> = row[1..].iter().map(|v| v.parse().unwrap()).collect();
        let d = laplace_distribution(&SentimentCounts::new(n[0], n[1], n[2]));
        c.near(&format!("{name} mean"), d.score, mean, 0.001);
        c.near(&format!("{name} sd"), d.sd, sd, 0.001);
        c.near(&format!("{name} sem"), d.sem.unwrap(), sem, 0.0002);
    }
    c.finish();
}

fn summaries_from(name: &str, mean_col: usize) -> Vec<SampleSummary> {
    fixture_rows(name)
        .iter()
        .map(|r| SampleSummary::new(r[mean_col].parse().unwrap(), r[mean_col + 1].parse().unwrap(), r[mean_col + 2].parse().unwrap()).unwrap())
        .collect()
}

#[test]
fn ac3_welch_t_test() {
    let mut c = Criterion::new("AC3", "Welch's t-test on published summaries");
    // with / without symbols, from the label counts' rounded summaries
    let a = SampleSummary::new(0.365, 0.762, 69_673).unwrap();
    let b = SampleSummary::new(0.106, 0.785, 1_574_062).unwrap();
    let w = welch_t_test(&a, &b).unwrap();
    c.near("with vs without t", w.t, 87.0, 1.0);
    c.check(format!("with vs without p = {:e} < 1e-10", w.p_two_tailed), w.p_two_tailed < 1e-10);
    c.check(format!("dof {} > 100", w.dof), w.dof > 100);

    let halves = summaries_from("frequency_halves.csv", 1);
    let w = welch_t_test(&halves[0], &halves[1]).unwrap();
    c.near("first vs second half t", w.t, 100.0, 1.0);
    c.finish();
}

#[test]
fn ac4_laplace_properties() {
    let mut c = Criterion::new("AC4", "Laplace estimate properties on 10^4 random triples");
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut sum_ok, mut score_ok, mut interior_ok, mut mono_ok) = (true, true, true, true);
    for _ in 0..10_000 {
        // mix small and large magnitudes
        let scale = 10u64.pow(rng.random_range(0..=7));
        let mut draw = || rng.random_range(0..=scale);
        let counts = SentimentCounts::new(draw(), draw(), draw());
        let d = laplace_distribution(&counts);
        sum_ok &= (d.negativity + d.neutrality + d.positivity - 1.0).abs() <= 1e-12;
        score_ok &= (d.score - (d.positivity - d.negativity)).abs() <= 1e-12;
        interior_ok &= d.score > -1.0 && d.score < 1.0;
        for label in SentimentLabel::ALL {
            let mut more = counts;
            more.add(label, 1);
            let s = laplace_distribution(&more).score;
            mono_ok &= match label {
                SentimentLabel::Positive => s >= d.score,
                SentimentLabel::Negative => s <= d.score,
                SentimentLabel::Neutral => true,
            };
        }
    }
    c.check("p sums to 1 within 1e-12", sum_ok);
    c.check("score = p+ - p- within 1e-12", score_ok);
    c.check("score strictly inside (-1, 1)", interior_ok);
    c.check("monotone under single-count increments", mono_ok);
    c.finish();
}

fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = (0..x.len()).map(|i| (x[i] - mx) * (y[i] - my)).sum();
    let vx: f64 = (0..x.len()).map(|i| (x[i] - mx).powi(2)).sum();
    let vy: f64 = (0..x.len()).map(|i| (y[i] - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Rank by counting: 1 + (#smaller) + (#equal - 1) / 2.
fn rank_oracle(v: &[f64]) -> Vec<f64> {
    v.iter()
        .map(|&a| {
            let smaller = v.iter().filter(|&&b| b < a).count() as f64;
            let equal = v.iter().filter(|&&b| b == a).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

#[test]
fn ac5_correlation_oracles() {
    let mut c = Criterion::new("AC5", "Pearson/Spearman against definition-based oracles");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut worst_p, mut worst_s, mut tested) = (0.0f64, 0.0f64, 0);
    while tested < 1000 {
        let n = rng.random_range(3..60);
        // small integer ranges force ties
        let levels = rng.random_range(2..20);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64).collect();
        let y: Vec<f64> = (0..n).map(|_| rng.random_range(0..levels) as f64 * 0.5 + rng.random::<f64>() * (tested % 2) as f64).collect();
        let (Ok(p), Ok(s)) = (pearson(&x, &y), spearman(&x, &y)) else { continue };
        worst_p = worst_p.max((p - pearson_oracle(&x, &y)).abs());
        worst_s = worst_s.max((s - pearson_oracle(&rank_oracle(&x), &rank_oracle(&y))).abs());
        tested += 1;
    }
    c.check(format!("pearson max |err| {worst_p:.2e} <= 1e-9 over {tested} instances"), worst_p <= 1e-9);
    c.check(format!("spearman max |err| {worst_s:.2e} <= 1e-9 over {tested} instances"), worst_s <= 1e-9);

    let x = [3.0, 1.0, 4.0, 1.5, 9.0, 2.6];
    let rev: Vec<f64> = x.iter().map(|v| -v).collect();
    c.check("pearson(x, x) = 1", pearson(&x, &x).unwrap() == 1.0);
    c.check("spearman(x, x) = 1", spearman(&x, &x).unwrap() == 1.0);
    c.check("pearson(x, -x) = -1", pearson(&x, &rev).unwrap() == -1.0);
    c.check("spearman(x, -x) = -1", spearman(&x, &rev).unwrap() == -1.0);
    c.finish();
}

#[test]
fn ac6_power_law_recovery() {
    let mut c = Criterion::new("AC6", "power-law MLE recovers alpha = 2.5 from 10^5 samples");
    let (alpha, x_min) = (2.5, 1.0);
    for seed in [1u64, 2, 3] {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sample: Vec<f64> = (0..100_000)
            .map(|_| x_min * (1.0 - rng.random::<f64>()).powf(-1.0 / (alpha - 1.0)))
            .collect();
        let fit = power_law_mle(&sample, x_min).unwrap();
        c.near(&format!("seed {seed} alpha"), fit.alpha, alpha, 0.05);
    }
    c.finish();
}

#[test]
fn ac7_chance_level_alpha() {
    let mut c = Criterion::new("AC7", "alpha near zero for independent random labels");
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let draw = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        if u < 0.2 {
            SentimentLabel::Negative
        } else if u < 0.5 {
            SentimentLabel::Neutral
        } else {
            SentimentLabel::Positive
        }
    };
    let mut m = CoincidenceMatrix::default();
    for _ in 0..100_000 {
        let (a, b) = (draw(&mut rng), draw(&mut rng));
        m.add_pair(a, b);
    }
    let alpha = m.alpha_interval().unwrap();
    c.check(format!("|alpha| = {:.5} <= 0.05", alpha.abs()), alpha.abs() <= 0.05);
    // same through the pair type
    let pairs = [AnnotationPair::new("t", SentimentLabel::Negative, SentimentLabel::Positive, false)];
    c.check("pair entry doubles", CoincidenceMatrix::from_pairs(&pairs).total() == 2);
    c.finish();
}

#[test]
fn ac8_end_to_end_determinism() {
    let mut c = Criterion::new("AC8", "build is byte-identical across runs and shard counts");
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.csv");
    std::fs::write(&corpus, synthetic_corpus(1000, 8)).unwrap();
    let rows = std::fs::read_to_string(&corpus).unwrap().lines().count() - 1;
    c.check(format!("synthetic corpus has {rows} rows"), rows == 1000);

    let mut outputs = Vec::new();
    for (run, shards) in [(0, "1"), (1, "1"), (2, "4"), (3, "4")] {
        let csv = dir.path().join(format!("lexicon{run}.csv"));
        let svg = dir.path().join(format!("map{run}.svg"));
        let o = lexirank(&[
            "build",
            "--input",
            corpus.to_str().unwrap(),
            "--output",
            csv.to_str().unwrap(),
            "--map",
            svg.to_str().unwrap(),
            "--min-occurrences",
            "1",
            "--shards",
            shards,
        ]);
        c.check(format!("run {run} (shards {shards}) exit {:?}", o.status.code()), o.status.success());
        outputs.push((std::fs::read(&csv).unwrap_or_default(), std::fs::read(&svg).unwrap_or_default()));
    }
    let (csv0, svg0) = &outputs[0];
    c.check(format!("lexicon has {} rows", String::from_utf8_lossy(csv0).lines().count() - 1), csv0.len() > 200);
    for (i, (csv, svg)) in outputs.iter().enumerate().skip(1) {
        c.check(format!("run {i} CSV identical to run 0"), csv == csv0);
        c.check(format!("run {i} SVG identical to run 0"), svg == svg0);
    }
    c.finish();
}

/// Full-corpus reproduction, run only when `LEXIRANK_DATASET` names a
/// directory with `corpus.csv` and `emojitracker.csv`.
#[test]
fn ac9_full_corpus_reproduction() {
    let Some(dir) = std::env::var_os("LEXIRANK_DATASET").map(PathBuf::from) else {
        println!("AC9 full-corpus reproduction: SKIP (LEXIRANK_DATASET not set)");
        return;
    };
    let mut c = Criterion::new("AC9", "full-corpus reproduction");
    let start = Instant::now();
    let corpus = parse_corpus(File::open(dir.join("corpus.csv")).unwrap()).unwrap();
    let lex5 = build_lexicon(&corpus, 5).unwrap();
    let lex1 = build_lexicon(&corpus, 1).unwrap();
    c.check(format!("{} entries at threshold 5 (want 751)", lex5.len()), lex5.len() == 751);
    c.check(format!("{} entries at threshold 1 (want 969)", lex1.len()), lex1.len() == 969);
    let mid = lex5.midpoint_rank().unwrap();
    c.check(format!("midpoint rank {mid} (want 23)"), mid == 23);
    c.near("mean entry score", lex5.mean_score().unwrap(), 0.305, 0.005);

    let tracker = read_counts_csv(File::open(dir.join("emojitracker.csv")).unwrap()).unwrap().inventory;
    let ours = lex5.inventory();
    let common = inventory_diff(&ours, &tracker).common;
    let (x, y): (Vec<f64>, Vec<f64>) = common.iter().map(|&ch| (ours.get(ch) as f64, tracker.get(ch) as f64)).unzip();
    let (p, s) = correlate(&x, &y, 0.01);
    c.near("external-count pearson", p.map_or(f64::NAN, |p| p.r), 0.944, 0.005);
    c.near("external-count spearman", s.map_or(f64::NAN, |s| s.r), 0.898, 0.005);

    let rows = language_report(&corpus, RangeTable::bundled(), &lex5, 5, 0.01).unwrap();
    let en = rows.iter().find(|r| r.language == "en");
    c.near("English pearson", en.and_then(|r| r.pearson).map_or(f64::NAN, |p| p.r), 0.834, 0.01);
    let elapsed = start.elapsed();
    c.check(format!("runtime {elapsed:?} < 5 min"), elapsed < Duration::from_secs(300));
    c.finish();
}
