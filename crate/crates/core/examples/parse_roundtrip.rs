//! Parse a TPTP/TSTP file, print it back in canonical form, and confirm the
//! re-parse is identical.
//!
//!     cargo run --example parse_roundtrip [FILE]

use std::path::PathBuf;

use tptp_mizar::tptp::TptpReader;
use tptp_mizar::{parse_derivation, serialize};

fn main() {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/PUZ001+1.p")
    });
    let mut reader = TptpReader::from_env();
    let units = match reader.read_file(&path) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("error: {}: {e}", e.kind());
            std::process::exit(2);
        }
    };
    for w in reader.warnings() {
        eprintln!("warning: {w}");
    }
    let text = serialize(&units);
    print!("{text}");
    let again = parse_derivation(&text).expect("serializer output parses");
    eprintln!("{} units, round trip {}", units.len(), if again == units { "identical" } else { "DIFFERS" });
}
