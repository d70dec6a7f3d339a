//! Translate an E refutation into an article with a proof, without
//! compression, and re-check every justification.
//!
//!     cargo run --example translate_derivation [FILE.tstp] [CONJECTURE]

use std::path::PathBuf;

use tptp_mizar::mizar::{check_article, check_referential_integrity};
use tptp_mizar::obvious::DEFAULT_BUDGET;
use tptp_mizar::pipeline::{translate_derivation, TranslateOptions};
use tptp_mizar::tptp::TptpReader;

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/PUZ001+1.tstp")
    });
    let units = TptpReader::from_env().read_file(&path).unwrap_or_else(|e| panic!("{e}"));
    let opts = TranslateOptions { compress: false, conjecture: args.next(), ..Default::default() };
    let t = match translate_derivation(units, &opts) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            std::process::exit(2);
        }
    };
    let text = t.article_text();
    print!("{text}");
    println!("\n:: environment manifest\n{}", t.manifest_text());
    let scan = check_referential_integrity(&text, &t.manifest).expect("references resolve");
    let failures = check_article(&t.article, &t.manifest, DEFAULT_BUDGET);
    eprintln!("{} labels, {} references, {} failing steps", scan.labels, scan.references, failures.len());
    for f in failures {
        eprintln!("  {}: {}", f.label, f.reason);
    }
}
