//! Compress a translated refutation to a fixed point and compare the
//! before/after articles.
//!
//!     cargo run --example compress_article [FILE.tstp]

use std::path::PathBuf;

use tptp_mizar::compress::{compress, CompressOptions};
use tptp_mizar::mizar::{check_article, render_article};
use tptp_mizar::obvious::DEFAULT_BUDGET;
use tptp_mizar::pipeline::{translate_derivation, TranslateOptions};
use tptp_mizar::tptp::TptpReader;

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/PUZ001+1.tstp")
    });
    let units = TptpReader::from_env().read_file(&path).unwrap_or_else(|e| panic!("{e}"));
    let opts = TranslateOptions { compress: false, ..Default::default() };
    let t = translate_derivation(units, &opts).unwrap_or_else(|e| panic!("{e}"));
    let (small, report) = compress(&t.article, &t.manifest, &CompressOptions::default());
    print!("{}", render_article(&small));
    eprintln!("{}", report.summary());
    for (i, n) in report.per_pass.iter().enumerate() {
        eprintln!("  pass {}: {n} changes", i + 1);
    }
    eprintln!("removed (old labels): {}", report.removed_labels.join(" "));
    let failures = check_article(&small, &t.manifest, DEFAULT_BUDGET);
    eprintln!("re-check: {}", if failures.is_empty() { "all steps obvious".to_string() } else { format!("{failures:?}") });
}
