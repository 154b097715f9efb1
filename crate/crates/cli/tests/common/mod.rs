#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const HEADER: &str = "text_id,language,annotator_id,label,text\n";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn lexirank(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lexirank"))
        .args(args)
        .env_remove("LEXIRANK_UNICODE_TABLE")
        .output()
        .expect("run lexirank")
}

pub fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

/// Deterministic synthetic corpus: `rows` annotations over a pool of
/// symbols, three languages, some doubly annotated texts.
pub fn synthetic_corpus(rows: usize, seed: u64) -> String {
    const SYMBOLS: [char; 12] = ['☀', '★', '♥', '☔', '😀', '😂', '😭', '👍', '👎', '🎉', '☯', '™'];
    const WORDS: [&str; 8] = ["good", "bad", "day", "rain", "sun", "ok", "\"quoted\"", "a,b"];
    const LANGS: [&str; 3] = ["en", "es", "sl"];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::from(HEADER);
    let mut i = 0;
    while i < rows {
        let mut text = String::new();
        for _ in 0..rng.random_range(1..8) {
            if rng.random_bool(0.3) {
                // skewed symbol frequencies
                let k = (rng.random::<f64>().powi(2) * SYMBOLS.len() as f64) as usize;
                text.push(SYMBOLS[k]);
            } else {
                text.push_str(WORDS[rng.random_range(0..WORDS.len())]);
                text.push(' ');
            }
        }
        let lang = LANGS[rng.random_range(0..LANGS.len())];
        let copies = if rng.random_bool(0.1) { 2 } else { 1 };
        let id = i;
        for c in 0..copies.min(rows - i) {
            let label: i32 = rng.random_range(-1..=1);
            let annotator = if c == 0 { rng.random_range(0..5) } else { 5 + rng.random_range(0..5) };
            let quoted = text.replace('"', "\"\"");
            out.push_str(&format!("t{id},{lang},a{annotator},{label},\"{quoted}\"\n"));
            i += 1;
        }
    }
    out
}
