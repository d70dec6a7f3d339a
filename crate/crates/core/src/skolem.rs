//! Skolemization steps and the Henkin implications that license them.
//!
//! A skolem step `∀x∃y φ ⊢ ∀x φ[y:=f(x)]` is not a logical consequence of its
//! parent, so each one is justified by an extra environment axiom
//! `closure(parent) → closure(conclusion)` cited as `SKOLEM:def n`.

use thiserror::Error;

use crate::derivation::{DerivationGraph, StepClass};
use crate::fol::{Formula, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SkolemError {
    #[error("step {step} introduces {} skolem functions ({}); only one per step is supported", .symbols.len(), .symbols.join(", "))]
    MultipleSkolemsUnsupported { step: String, symbols: Vec<String> },
    #[error("skolem step {step} has {parents} parents, expected exactly one")]
    MalformedSkolemStep { step: String, parents: usize },
    #[error("skolem symbol {symbol} of step {step} is introduced twice")]
    DuplicateSkolem { step: String, symbol: String },
}

impl SkolemError {
    pub fn kind(&self) -> &'static str {
        match self {
            SkolemError::MultipleSkolemsUnsupported { .. } => "MultipleSkolemsUnsupported",
            SkolemError::MalformedSkolemStep { .. } => "MalformedSkolemStep",
            SkolemError::DuplicateSkolem { .. } => "DuplicateSkolem",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkolemJustification {
    pub step: String,
    pub parent: String,
    pub skolem_symbol: Symbol,
    pub premise_formula: Formula,
    pub conclusion_formula: Formula,
    pub henkin_axiom: Formula,
    /// 1-based, dense, in topological order of the skolem steps.
    pub number: usize,
}

impl SkolemJustification {
    pub fn manifest_label(&self) -> String {
        format!("SKOLEM:def {}", self.number)
    }
}

/// Function symbols the step introduces.
pub fn detect_new_symbols(g: &DerivationGraph, step: &str) -> Vec<Symbol> {
    g.new_symbols(step)
}

pub fn validate_single_skolem(g: &DerivationGraph, step: &str) -> Result<Symbol, SkolemError> {
    let mut symbols = detect_new_symbols(g, step);
    if symbols.len() == 1 {
        Ok(symbols.remove(0))
    } else {
        Err(SkolemError::MultipleSkolemsUnsupported {
            step: step.to_string(),
            symbols: symbols.into_iter().map(|s| s.name).collect(),
        })
    }
}

/// `closure(premise) → closure(conclusion)`.
pub fn henkin_implication(premise: &Formula, conclusion: &Formula) -> Formula {
    Formula::implies(premise.universal_closure(), conclusion.universal_closure())
}

pub fn make_henkin_axiom(g: &DerivationGraph, step: &str, number: usize) -> Result<SkolemJustification, SkolemError> {
    let symbol = validate_single_skolem(g, step)?;
    let parents = g.parents(step);
    if parents.len() != 1 {
        return Err(SkolemError::MalformedSkolemStep { step: step.to_string(), parents: parents.len() });
    }
    let premise = g.node(parents[0]).expect("parent exists").formula.clone();
    let conclusion = g.node(step).expect("step exists").formula.clone();
    Ok(SkolemJustification {
        step: step.to_string(),
        parent: parents[0].to_string(),
        skolem_symbol: symbol,
        henkin_axiom: henkin_implication(&premise, &conclusion),
        premise_formula: premise,
        conclusion_formula: conclusion,
        number,
    })
}

/// Justifies every skolemization step of `g`, numbering them in
/// topological order.
pub fn justify_skolem_steps(g: &DerivationGraph) -> Result<Vec<SkolemJustification>, SkolemError> {
    let mut out: Vec<SkolemJustification> = Vec::new();
    for name in g.topological_order() {
        if g.classify_step(name) != StepClass::Skolemization {
            continue;
        }
        let j = make_henkin_axiom(g, name, out.len() + 1)?;
        if let Some(prev) = out.iter().find(|p| p.skolem_symbol.name == j.skolem_symbol.name) {
            return Err(SkolemError::DuplicateSkolem { step: prev.step.clone(), symbol: j.skolem_symbol.name });
        }
        out.push(j);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::build_graph;
    use crate::tptp::{parse_derivation, parse_formula};

    fn graph(text: &str) -> DerivationGraph {
        build_graph(parse_derivation(text).unwrap()).unwrap()
    }

    #[test]
    fn existential_parent_gets_a_constant() {
        let g = graph(
            "fof(ax1, axiom, ?[X1]:(lives(X1)&killed(X1,agatha)), file('p', ax1)).\n\
             fof(s, plain, (lives(esk1_0)&killed(esk1_0,agatha)), inference(skolemize,[status(esa)],[ax1])).",
        );
        let j = make_henkin_axiom(&g, "s", 1).unwrap();
        assert_eq!(j.skolem_symbol, Symbol::function("esk1_0", 0));
        assert_eq!(j.manifest_label(), "SKOLEM:def 1");
        let expected =
            parse_formula("(?[X1]:(lives(X1)&killed(X1,agatha)))=>(lives(esk1_0)&killed(esk1_0,agatha))").unwrap();
        assert_eq!(j.henkin_axiom, expected);
        assert!(j.henkin_axiom.is_closed());
    }

    #[test]
    fn unary_skolem_function_closure() {
        let g = graph(
            "fof(a, axiom, ![X]:?[Y]:p(X,Y), file('p', a)).\n\
             fof(s, plain, p(X,f(X)), inference(skolemize,[status(esa)],[a])).",
        );
        let j = make_henkin_axiom(&g, "s", 1).unwrap();
        let expected = parse_formula("(![X]:?[Y]:p(X,Y))=>(![X]:p(X,f(X)))").unwrap();
        assert!(j.henkin_axiom.alpha_equivalent(&expected));
    }

    #[test]
    fn two_fresh_symbols_are_rejected() {
        let g = graph(
            "fof(a, axiom, ?[X,Y]:p(X,Y), file('p', a)).\n\
             fof(s, plain, p(esk1_0,esk2_0), inference(skolemize,[status(esa)],[a])).",
        );
        assert!(matches!(
            justify_skolem_steps(&g),
            Err(SkolemError::MultipleSkolemsUnsupported { ref symbols, .. }) if symbols.len() == 2
        ));
    }

    #[test]
    fn skolemize_without_fresh_symbol_is_clausification() {
        let g = graph(
            "fof(a, axiom, ![X]:p(X), file('p', a)).\n\
             fof(s, plain, ![X]:p(X), inference(skolemize,[status(esa)],[a])).",
        );
        assert_eq!(g.classify_step("s"), StepClass::Clausification);
        assert!(justify_skolem_steps(&g).unwrap().is_empty());
        assert!(detect_new_symbols(&g, "s").is_empty());
    }
}
