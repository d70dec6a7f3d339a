//! The Mizar-side article model: axioms, lemmas and a theorem proved by a
//! diffuse reasoning block, plus the environment manifest it cites.

mod build;
mod manifest;
mod render;
mod scan;

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::fol::{Formula, SignatureError, Symbol};
use crate::obvious::{is_obvious, ObviousnessQuery};

pub use build::{build_article, translate_problem, BuildOptions};
pub(crate) use build::reservations;
pub use manifest::{parse_manifest, render_manifest, ManifestError};
pub use render::{render_article, render_formula};
pub use scan::{check_referential_integrity, ScanError, ScanReport};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArticleError {
    #[error("the derivation has no conjecture; name one with --conjecture")]
    NoConjecture,
    #[error("more than one conjecture: {}", .0.join(", "))]
    MultipleConjectures(Vec<String>),
    #[error("symbol {0} clashes with a generated skolem name")]
    NameCollision(String),
    #[error("duplicate unit name {0}")]
    DuplicateName(String),
    #[error("unit {0} has an inference source; translate it as a derivation")]
    NotAProblem(String),
    #[error("the derivation has no $false step")]
    NoRefutation,
    #[error(transparent)]
    Signature(#[from] SignatureError),
}

impl ArticleError {
    pub fn kind(&self) -> &'static str {
        match self {
            ArticleError::NoConjecture => "NoConjecture",
            ArticleError::MultipleConjectures(_) => "MultipleConjectures",
            ArticleError::NameCollision(_) => "NameCollision",
            ArticleError::DuplicateName(_) => "DuplicateName",
            ArticleError::NotAProblem(_) => "NotAProblem",
            ArticleError::NoRefutation => "NoRefutation",
            ArticleError::Signature(_) => "SignatureConflict",
        }
    }
}

/// A `by` reference.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ref {
    Label(String),
    /// `AXIOMS:<i>`
    Axiom(usize),
    /// `SKOLEM:def <n>`
    SkolemDef(usize),
}

impl fmt::Display for Ref {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ref::Label(l) => write!(f, "{l}"),
            Ref::Axiom(i) => write!(f, "AXIOMS:{i}"),
            Ref::SkolemDef(n) => write!(f, "SKOLEM:def {n}"),
        }
    }
}

/// `A: <instance> by <refs>;` inside a sub-proof.
#[derive(Debug, Clone, PartialEq)]
pub struct InstanceItem {
    pub label: String,
    pub formula: Formula,
    pub refs: Vec<Ref>,
}

/// `proof A: ...; B: ...; thus thesis by ...; end;`. The free variables
/// of the proved statement are fixed throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct SubProof {
    pub instances: Vec<InstanceItem>,
    pub thesis_refs: Vec<Ref>,
}

impl SubProof {
    /// Every reference to something outside the sub-proof.
    pub fn outer_refs(&self) -> Vec<Ref> {
        let local: Vec<&str> = self.instances.iter().map(|i| i.label.as_str()).collect();
        let mut out: Vec<Ref> = Vec::new();
        let all = self.instances.iter().flat_map(|i| i.refs.iter()).chain(&self.thesis_refs);
        for r in all {
            let is_local = matches!(r, Ref::Label(l) if local.contains(&l.as_str()));
            if !is_local && !out.contains(r) {
                out.push(r.clone());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Justification {
    By(Vec<Ref>),
    Proof(SubProof),
}

impl Justification {
    /// References that stand in for this step when it is inlined.
    pub fn refs(&self) -> Vec<Ref> {
        match self {
            Justification::By(r) => r.clone(),
            Justification::Proof(p) => p.outer_refs(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Item {
    pub label: String,
    /// Free variables are reserved ones, read universally.
    pub formula: Formula,
    pub justification: Justification,
    /// The unit this item came from and the original names of its
    /// variables, keyed by their new names.
    pub origin: Option<String>,
    pub var_names: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffuseBlock {
    pub assumption_label: String,
    pub assumption: Formula,
    pub inner_steps: Vec<Item>,
    pub contradiction_refs: Vec<Ref>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Theorem {
    pub formula: Formula,
    /// `None` for a problem-mode theorem awaiting its proof.
    pub proof: Option<DiffuseBlock>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ArticleModel {
    pub reservations: Vec<String>,
    pub axiom_items: Vec<Item>,
    pub lemma_items: Vec<Item>,
    pub theorem: Option<Theorem>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EnvironmentManifest {
    pub signature: Vec<Symbol>,
    /// Original axioms, numbered from 1.
    pub axioms: Vec<(usize, Formula)>,
    /// Henkin implications, numbered from 1.
    pub skolem_defs: Vec<(usize, Formula)>,
}

impl EnvironmentManifest {
    pub fn resolves(&self, r: &Ref) -> bool {
        match r {
            Ref::Label(_) => false,
            Ref::Axiom(i) => self.axioms.iter().any(|(n, _)| n == i),
            Ref::SkolemDef(i) => self.skolem_defs.iter().any(|(n, _)| n == i),
        }
    }

    fn formula(&self, r: &Ref) -> Option<&Formula> {
        let list = match r {
            Ref::Label(_) => return None,
            Ref::Axiom(_) => &self.axioms,
            Ref::SkolemDef(_) => &self.skolem_defs,
        };
        let (Ref::Axiom(i) | Ref::SkolemDef(i)) = r else { unreachable!() };
        list.iter().find(|(n, _)| n == i).map(|(_, f)| f)
    }
}

impl ArticleModel {
    /// Derived proof steps: lemmas, inner steps, instance steps, the
    /// `thus thesis` of each sub-proof and the final `thus contradiction`.
    pub fn step_count(&self) -> usize {
        fn item(i: &Item) -> usize {
            1 + match &i.justification {
                Justification::By(_) => 0,
                Justification::Proof(p) => p.instances.len() + 1,
            }
        }
        let mut n: usize = self.lemma_items.iter().map(item).sum();
        if let Some(block) = self.theorem.as_ref().and_then(|t| t.proof.as_ref()) {
            n += block.inner_steps.iter().map(item).sum::<usize>() + 1;
        }
        n
    }

    pub fn labels(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self.axiom_items.iter().chain(&self.lemma_items).map(|i| i.label.as_str()).collect();
        if let Some(block) = self.theorem.as_ref().and_then(|t| t.proof.as_ref()) {
            out.push(&block.assumption_label);
            out.extend(block.inner_steps.iter().map(|i| i.label.as_str()));
        }
        out
    }

    /// Renames lemma, assumption and inner-step labels to `S1, S2, ...` in
    /// order of appearance.
    pub fn relabel(&mut self) {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        let mut next = 0;
        let mut fresh = |old: &str, map: &mut BTreeMap<String, String>| {
            next += 1;
            map.insert(old.to_string(), format!("S{next}"));
        };
        for i in &self.lemma_items {
            fresh(&i.label, &mut map);
        }
        if let Some(block) = self.theorem.as_ref().and_then(|t| t.proof.as_ref()) {
            fresh(&block.assumption_label, &mut map);
            for i in &block.inner_steps {
                fresh(&i.label, &mut map);
            }
        }
        let rename = |r: &mut Ref| {
            if let Ref::Label(l) = r {
                if let Some(n) = map.get(l) {
                    *l = n.clone();
                }
            }
        };
        let fix_item = |i: &mut Item| {
            if let Some(n) = map.get(&i.label) {
                i.label = n.clone();
            }
            match &mut i.justification {
                Justification::By(rs) => rs.iter_mut().for_each(rename),
                Justification::Proof(p) => {
                    // instance labels shadow nothing: they never look like `S<j>`
                    p.instances.iter_mut().flat_map(|x| x.refs.iter_mut()).for_each(rename);
                    p.thesis_refs.iter_mut().for_each(rename);
                }
            }
        };
        self.lemma_items.iter_mut().for_each(fix_item);
        if let Some(block) = self.theorem.as_mut().and_then(|t| t.proof.as_mut()) {
            block.assumption_label = map[&block.assumption_label].clone();
            block.inner_steps.iter_mut().for_each(fix_item);
            block.contradiction_refs.iter_mut().for_each(rename);
        }
    }
}

/// A `by` step that does not pass the checker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckFailure {
    pub label: String,
    pub reason: String,
}

/// Context for re-checking justifications: formulas visible by label.
pub(crate) struct Scope<'a> {
    pub manifest: &'a EnvironmentManifest,
    pub global: BTreeMap<String, Formula>,
}

impl Scope<'_> {
    /// Premise formula for a reference; global items are universally
    /// closed, sub-proof locals are taken as they stand.
    pub fn premise(&self, r: &Ref, local: &BTreeMap<String, Formula>) -> Option<Formula> {
        match r {
            Ref::Label(l) => local.get(l).cloned().or_else(|| self.global.get(l).map(Formula::universal_closure)),
            _ => self.manifest.formula(r).map(Formula::universal_closure),
        }
    }

    /// Whether `formula` follows obviously from `refs`.
    pub fn by(&self, refs: &[Ref], local: &BTreeMap<String, Formula>, formula: &Formula, fixed: &[String], budget: usize) -> Result<bool, String> {
        let mut premises = Vec::new();
        for r in refs {
            match self.premise(r, local) {
                Some(p) => premises.push(p),
                None => return Err(format!("unresolved reference {r}")),
            }
        }
        let q = ObviousnessQuery::new(premises, formula.clone()).with_fixed(fixed.to_vec()).with_budget(budget);
        Ok(is_obvious(&q).is_obvious())
    }

    /// Checks an item's justification (not its registration in scope).
    pub fn justified(&self, item: &Item, budget: usize) -> Result<(), String> {
        let none = BTreeMap::new();
        match &item.justification {
            Justification::By(refs) => match self.by(refs, &none, &item.formula, &[], budget)? {
                true => Ok(()),
                false => Err(format!("{} is not obvious from {}", item.label, join_refs(refs))),
            },
            Justification::Proof(p) => {
                let fixed = item.formula.free_vars();
                let mut local = BTreeMap::new();
                for inst in &p.instances {
                    if !self.by(&inst.refs, &local, &inst.formula, &fixed, budget)? {
                        return Err(format!("instance {} of {} is not obvious", inst.label, item.label));
                    }
                    local.insert(inst.label.clone(), inst.formula.clone());
                }
                match self.by(&p.thesis_refs, &local, &item.formula, &fixed, budget)? {
                    true => Ok(()),
                    false => Err(format!("thesis of {} is not obvious from {}", item.label, join_refs(&p.thesis_refs))),
                }
            }
        }
    }
}

pub(crate) fn join_refs(refs: &[Ref]) -> String {
    refs.iter().map(Ref::to_string).collect::<Vec<_>>().join(",")
}

/// Re-checks every justification of the article against the obviousness
/// checker. Returns the failing steps; an empty list means the article is
/// fully justified.
pub fn check_article(a: &ArticleModel, m: &EnvironmentManifest, budget: usize) -> Vec<CheckFailure> {
    let mut scope = Scope { manifest: m, global: BTreeMap::new() };
    let mut failures = Vec::new();
    let mut visit = |scope: &mut Scope, item: &Item| {
        if let Err(reason) = scope.justified(item, budget) {
            failures.push(CheckFailure { label: item.label.clone(), reason });
        }
        scope.global.insert(item.label.clone(), item.formula.clone());
    };
    for item in a.axiom_items.iter().chain(&a.lemma_items) {
        visit(&mut scope, item);
    }
    if let Some(Theorem { formula, proof: Some(block) }) = &a.theorem {
        scope.global.insert(block.assumption_label.clone(), block.assumption.clone());
        for item in &block.inner_steps {
            visit(&mut scope, item);
        }
        let none = BTreeMap::new();
        match scope.by(&block.contradiction_refs, &none, &Formula::False, &[], budget) {
            Ok(true) => {}
            Ok(false) => failures.push(CheckFailure {
                label: "contradiction".into(),
                reason: format!("contradiction is not obvious from {}", join_refs(&block.contradiction_refs)),
            }),
            Err(reason) => failures.push(CheckFailure { label: "contradiction".into(), reason }),
        }
        // `hence thesis`: the block proves the negated assumption
        let refuted = Formula::not(block.assumption.clone());
        if !crate::obvious::obvious(&[refuted], &formula.universal_closure()) {
            failures.push(CheckFailure {
                label: block.assumption_label.clone(),
                reason: "the theorem does not follow from the refuted assumption".into(),
            });
        }
    }
    failures
}
