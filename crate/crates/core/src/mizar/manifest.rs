//! The environment manifest: a plain-text stand-in for Mizar's
//! environment files.
//!
//! ```text
//! func agatha 0
//! pred killed 2
//! axiom 1: ?[X]:(lives(X)&killed(X,agatha))
//! skolemdef 1: (?[X]:(lives(X)&killed(X,agatha)))=>(lives(skolem1)&killed(skolem1,agatha))
//! ```
//!
//! Formulas are in TPTP syntax.

use std::fmt::Write;

use thiserror::Error;

use super::EnvironmentManifest;
use crate::fol::{Formula, Symbol, SymbolKind};
use crate::tptp::{parse_formula, quote_atom};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("manifest line {line}: {message}")]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

pub fn render_manifest(m: &EnvironmentManifest) -> String {
    let mut out = String::new();
    for s in &m.signature {
        let kw = match s.kind {
            SymbolKind::Function => "func",
            SymbolKind::Predicate => "pred",
        };
        let _ = writeln!(out, "{kw} {} {}", quote_atom(&s.name), s.arity);
    }
    for (i, f) in &m.axioms {
        let _ = writeln!(out, "axiom {i}: {f}");
    }
    for (n, f) in &m.skolem_defs {
        let _ = writeln!(out, "skolemdef {n}: {f}");
    }
    out
}

pub fn parse_manifest(text: &str) -> Result<EnvironmentManifest, ManifestError> {
    let mut m = EnvironmentManifest::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ManifestError { line, message };
        let l = raw.trim();
        if l.is_empty() {
            continue;
        }
        let (kw, rest) = l.split_once(' ').ok_or_else(|| err(format!("unrecognized line `{l}`")))?;
        match kw {
            "func" | "pred" => {
                let (name, arity) = rest.rsplit_once(' ').ok_or_else(|| err("expected a name and an arity".into()))?;
                let arity: usize = arity.parse().map_err(|_| err(format!("bad arity `{arity}`")))?;
                let name = match parse_formula(name) {
                    Ok(Formula::Pred(n, args)) if args.is_empty() => n,
                    _ => return Err(err(format!("bad symbol name `{name}`"))),
                };
                m.signature.push(if kw == "func" { Symbol::function(name, arity) } else { Symbol::predicate(name, arity) });
            }
            "axiom" | "skolemdef" => {
                let (n, f) = rest.split_once(':').ok_or_else(|| err("expected `<number>: <formula>`".into()))?;
                let n: usize = n.trim().parse().map_err(|_| err(format!("bad number `{n}`")))?;
                let f = parse_formula(f.trim()).map_err(|e| err(e.to_string()))?;
                if kw == "axiom" { &mut m.axioms } else { &mut m.skolem_defs }.push((n, f));
            }
            _ => return Err(err(format!("unknown keyword `{kw}`"))),
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let m = EnvironmentManifest {
            signature: vec![Symbol::function("skolem1", 0), Symbol::function("odd name", 2), Symbol::predicate("p", 1)],
            axioms: vec![(1, parse_formula("?[X]:p(X)").unwrap())],
            skolem_defs: vec![(1, parse_formula("(?[X]:p(X)) => p(skolem1)").unwrap())],
        };
        let text = render_manifest(&m);
        assert!(text.starts_with("func skolem1 0\n"));
        assert_eq!(parse_manifest(&text).unwrap(), m);
    }

    #[test]
    fn empty_and_malformed() {
        assert_eq!(render_manifest(&EnvironmentManifest::default()), "");
        assert_eq!(parse_manifest("").unwrap(), EnvironmentManifest::default());
        assert_eq!(parse_manifest("func a\n").unwrap_err().line, 1);
        assert_eq!(parse_manifest("\naxiom 1: p(\n").unwrap_err().line, 2);
        assert!(parse_manifest("theorem 1: p").is_err());
    }
}
