//! A scanner for rendered articles that checks every `by` reference
//! against the labels visible at that point and the manifest.

use thiserror::Error;

use super::{EnvironmentManifest, Ref};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("article line {line}: {message}")]
pub struct ScanError {
    pub line: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ScanReport {
    pub labels: usize,
    pub references: usize,
}

fn parse_ref(s: &str) -> Option<Ref> {
    if let Some(n) = s.strip_prefix("AXIOMS:") {
        return n.parse().ok().map(Ref::Axiom);
    }
    if let Some(n) = s.strip_prefix("SKOLEM:def ") {
        return n.parse().ok().map(Ref::SkolemDef);
    }
    let mut cs = s.chars();
    let ok = cs.next().is_some_and(|c| c.is_ascii_alphabetic()) && cs.all(|c| c.is_ascii_alphanumeric() || c == '_');
    ok.then(|| Ref::Label(s.to_string()))
}

fn split_label(s: &str) -> (Option<&str>, &str) {
    if let Some((l, rest)) = s.split_once(": ") {
        if matches!(parse_ref(l), Some(Ref::Label(_))) {
            return (Some(l), rest);
        }
    }
    (None, s)
}

struct Scope {
    labels: Vec<String>,
    /// Label of the statement this `proof` block proves; it becomes
    /// visible once the block closes.
    proves: Option<String>,
}

/// Checks that labels are unique where visible and that each reference
/// names an earlier visible label or a manifest entry.
pub fn check_referential_integrity(text: &str, m: &EnvironmentManifest) -> Result<ScanReport, ScanError> {
    let mut stack = vec![Scope { labels: Vec::new(), proves: None }];
    let mut pending: Option<String> = None;
    let mut report = ScanReport::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |message: String| ScanError { line, message };
        let l = raw.trim();
        if l.is_empty() || l.starts_with("::") || matches!(l, "environ" | "begin" | "theorem" | "hence thesis;") {
            continue;
        }
        if l.starts_with("reserve ") {
            continue;
        }
        if l == "proof" || l == "now" {
            stack.push(Scope { labels: Vec::new(), proves: if l == "proof" { pending.take() } else { None } });
            continue;
        }
        pending = None;
        if l == "end;" {
            let closed = stack.pop().filter(|_| !stack.is_empty()).ok_or_else(|| err("unmatched `end;`".into()))?;
            if let Some(label) = closed.proves {
                stack.last_mut().unwrap().labels.push(label);
            }
            continue;
        }
        let body = l.strip_prefix("assume ").or_else(|| l.strip_prefix("thus ")).unwrap_or(l);
        let (label, rest) = split_label(body);
        let visible = |name: &str, stack: &[Scope]| stack.iter().any(|s| s.labels.iter().any(|x| x == name));
        if let Some(label) = label {
            if visible(label, &stack) {
                return Err(err(format!("label {label} is already defined")));
            }
        }
        if let Some(pos) = rest.rfind(" by ") {
            let refs = rest[pos + 4..].strip_suffix(';').ok_or_else(|| err("justification without `;`".into()))?;
            for r in refs.split(',') {
                let r = r.trim();
                report.references += 1;
                match parse_ref(r) {
                    Some(Ref::Label(name)) if visible(&name, &stack) => {}
                    Some(Ref::Label(name)) => return Err(err(format!("reference {name} is not an earlier visible label"))),
                    Some(ext) if m.resolves(&ext) => {}
                    _ => return Err(err(format!("unresolved reference `{r}`"))),
                }
            }
        }
        if let Some(label) = label {
            report.labels += 1;
            if rest.ends_with(';') {
                stack.last_mut().unwrap().labels.push(label.to_string());
            } else {
                pending = Some(label.to_string());
            }
        }
    }
    if stack.len() != 1 {
        return Err(ScanError { line: text.lines().count(), message: "unclosed block".into() });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> EnvironmentManifest {
        EnvironmentManifest { axioms: vec![(1, crate::fol::Formula::True)], ..Default::default() }
    }

    #[test]
    fn accepts_backward_references() {
        let text = "Ax1: p by AXIOMS:1;\nS1: q\nproof\n  A: q by Ax1;\n  thus thesis by A;\nend;\nS2: r by S1,Ax1;\n";
        let r = check_referential_integrity(text, &manifest()).unwrap();
        assert_eq!(r, ScanReport { labels: 4, references: 5 });
    }

    #[test]
    fn rejects_forward_and_scoped_references() {
        let m = manifest();
        assert!(check_referential_integrity("S1: p by S2;\nS2: p by AXIOMS:1;\n", &m).is_err());
        assert!(check_referential_integrity("S1: p by AXIOMS:2;\n", &m).is_err());
        assert!(check_referential_integrity("S1: p by SKOLEM:def 1;\n", &m).is_err());
        let inner = "S1: q\nproof\n  A: q by AXIOMS:1;\n  thus thesis by A;\nend;\nS2: r by A;\n";
        assert_eq!(check_referential_integrity(inner, &m).unwrap_err().line, 6);
        // a statement cannot be cited inside its own proof
        let own = "S1: q\nproof\n  thus thesis by S1;\nend;\n";
        assert!(check_referential_integrity(own, &m).is_err());
        assert!(check_referential_integrity("S1: p by AXIOMS:1;\nS1: p by AXIOMS:1;\n", &m).is_err());
        assert!(check_referential_integrity("end;\n", &m).is_err());
    }
}
