//! The derivation DAG: ordering, step classification, and the
//! conjecture-dependence and used/unused partitions.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use thiserror::Error;

use crate::fol::{Formula, Symbol, Term};
use crate::tptp::{AnnotatedFormula, Role, Source};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DerivationError {
    #[error("unit {referenced_by} cites missing parent {name}")]
    MissingParent { name: String, referenced_by: String },
    #[error("duplicate unit name {0}")]
    DuplicateName(String),
    #[error("cycle through {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("no unit named {0}")]
    UnknownUnit(String),
}

impl DerivationError {
    pub fn kind(&self) -> &'static str {
        match self {
            DerivationError::MissingParent { .. } => "MissingParent",
            DerivationError::DuplicateName(_) => "DuplicateName",
            DerivationError::CycleDetected(_) => "CycleDetected",
            DerivationError::UnknownUnit(_) => "UnknownUnit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StepClass {
    Axiom,
    Conjecture,
    NegatedConjecture,
    Clausification,
    Skolemization,
    Inference,
    FinalContradiction,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepFlags {
    pub depends_on_conjecture: bool,
    pub used_in_refutation: bool,
}

/// Rules E uses while turning the input into clause normal form.
const CNF_RULES: &[&str] = &[
    "fof_nnf",
    "nnf",
    "variable_rename",
    "rename",
    "split_conjunct",
    "split_equiv",
    "fof_simplification",
    "shift_quantors",
    "distribute",
    "skolemize",
    "cn",
    "reorder",
    "normalize",
    "flatten",
    "ennf_transformation",
    "negated_conjecture",
];

pub fn is_cnf_rule(rule: &str) -> bool {
    CNF_RULES.contains(&rule)
}

#[derive(Debug, Clone)]
pub struct DerivationGraph {
    nodes: Vec<AnnotatedFormula>,
    index: BTreeMap<String, usize>,
    parents: Vec<Vec<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
    position: Vec<usize>,
    original_functions: BTreeSet<String>,
    designated_conjecture: Option<usize>,
}

/// Builds the graph, rejecting duplicate names, dangling parents and cycles.
pub fn build_graph(units: Vec<AnnotatedFormula>) -> Result<DerivationGraph, DerivationError> {
    let mut index = BTreeMap::new();
    for (i, u) in units.iter().enumerate() {
        if index.insert(u.name.clone(), i).is_some() {
            return Err(DerivationError::DuplicateName(u.name.clone()));
        }
    }
    let mut parents = vec![Vec::new(); units.len()];
    let mut children = vec![Vec::new(); units.len()];
    for (i, u) in units.iter().enumerate() {
        for p in u.source.parents() {
            let &j = index.get(p).ok_or_else(|| DerivationError::MissingParent {
                name: p.clone(),
                referenced_by: u.name.clone(),
            })?;
            if !parents[i].contains(&j) {
                parents[i].push(j);
                children[j].push(i);
            }
        }
    }
    let order = kahn(&parents, &children).map_err(|stuck| DerivationError::CycleDetected(find_cycle(&units, &parents, &stuck)))?;
    let mut position = vec![0; units.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    let original_functions = units
        .iter()
        .filter(|u| u.is_file_sourced())
        .flat_map(|u| u.formula.function_names())
        .collect();
    Ok(DerivationGraph {
        nodes: units,
        index,
        parents,
        children,
        order,
        position,
        original_functions,
        designated_conjecture: None,
    })
}

fn kahn(parents: &[Vec<usize>], children: &[Vec<usize>]) -> Result<Vec<usize>, BTreeSet<usize>> {
    let mut indegree: Vec<usize> = parents.iter().map(Vec::len).collect();
    let mut ready: BinaryHeap<Reverse<usize>> =
        (0..parents.len()).filter(|&i| indegree[i] == 0).map(Reverse).collect();
    let mut order = Vec::with_capacity(parents.len());
    while let Some(Reverse(i)) = ready.pop() {
        order.push(i);
        for &c in &children[i] {
            indegree[c] -= 1;
            if indegree[c] == 0 {
                ready.push(Reverse(c));
            }
        }
    }
    if order.len() == parents.len() {
        Ok(order)
    } else {
        Err((0..parents.len()).filter(|&i| indegree[i] > 0).collect())
    }
}

fn find_cycle(units: &[AnnotatedFormula], parents: &[Vec<usize>], stuck: &BTreeSet<usize>) -> Vec<String> {
    // Every stuck node has a stuck parent, so walking parents must revisit a node.
    let mut path = Vec::new();
    let mut seen = BTreeMap::new();
    let mut cur = *stuck.iter().next().expect("cycle implies a stuck node");
    loop {
        if let Some(&at) = seen.get(&cur) {
            let mut cycle: Vec<String> = path[at..].iter().map(|&i: &usize| units[i].name.clone()).collect();
            cycle.reverse();
            cycle.push(cycle[0].clone());
            return cycle;
        }
        seen.insert(cur, path.len());
        path.push(cur);
        cur = *parents[cur].iter().find(|p| stuck.contains(p)).expect("stuck node has stuck parent");
    }
}

impl DerivationGraph {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    pub fn node(&self, name: &str) -> Option<&AnnotatedFormula> {
        self.index.get(name).map(|&i| &self.nodes[i])
    }

    /// Units in their original file order.
    pub fn units(&self) -> &[AnnotatedFormula] {
        &self.nodes
    }

    pub fn parents(&self, name: &str) -> Vec<&str> {
        self.index
            .get(name)
            .map(|&i| self.parents[i].iter().map(|&p| self.nodes[p].name.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn children(&self, name: &str) -> Vec<&str> {
        self.index
            .get(name)
            .map(|&i| self.children[i].iter().map(|&c| self.nodes[c].name.as_str()).collect())
            .unwrap_or_default()
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(Vec::len).sum()
    }

    /// Parent-before-child order; ties go to the unit appearing first in the file.
    pub fn topological_order(&self) -> Vec<&str> {
        self.order.iter().map(|&i| self.nodes[i].name.as_str()).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.index.get(name).map(|&i| self.position[i])
    }

    /// The first falsum node in topological order.
    pub fn sink(&self) -> Option<&str> {
        self.order
            .iter()
            .find(|&&i| self.nodes[i].formula == Formula::False)
            .map(|&i| self.nodes[i].name.as_str())
    }

    /// Treat `name` as the conjecture of the derivation.
    pub fn designate_conjecture(&mut self, name: &str) -> Result<(), DerivationError> {
        let &i = self.index.get(name).ok_or_else(|| DerivationError::UnknownUnit(name.to_string()))?;
        self.designated_conjecture = Some(i);
        Ok(())
    }

    pub fn designated_conjecture(&self) -> Option<&AnnotatedFormula> {
        self.designated_conjecture.map(|i| &self.nodes[i])
    }

    /// Function symbols of the conclusion that occur in no parent and not in
    /// the file-sourced units.
    pub fn new_symbols(&self, name: &str) -> Vec<Symbol> {
        let Some(&i) = self.index.get(name) else { return Vec::new() };
        let node = &self.nodes[i];
        if node.is_file_sourced() {
            return Vec::new();
        }
        let mut known: BTreeSet<String> = self.original_functions.clone();
        for &p in &self.parents[i] {
            known.extend(self.nodes[p].formula.function_names());
        }
        let mut arities = BTreeMap::new();
        collect_function_arities(&node.formula, &mut arities);
        arities
            .into_iter()
            .filter(|(n, _)| !known.contains(n))
            .map(|(n, a)| Symbol::function(n, a))
            .collect()
    }

    pub fn classify_step(&self, name: &str) -> StepClass {
        let Some(&i) = self.index.get(name) else { return StepClass::Inference };
        let node = &self.nodes[i];
        if node.formula == Formula::False {
            return StepClass::FinalContradiction;
        }
        if self.designated_conjecture == Some(i) {
            return StepClass::Conjecture;
        }
        if matches!(node.source, Source::File { .. }) && node.role.is_axiom_like() {
            return StepClass::Axiom;
        }
        if node.role == Role::Conjecture {
            return StepClass::Conjecture;
        }
        let rule = node.source.inference().map(|r| r.rule.as_str());
        if rule == Some("assume_negation") || (node.role == Role::NegatedConjecture && self.parents[i].is_empty()) {
            return StepClass::NegatedConjecture;
        }
        if self.parents[i].is_empty() {
            // file-sourced plain units and introduced definitions are premises
            return StepClass::Axiom;
        }
        if !self.new_symbols(name).is_empty() {
            return StepClass::Skolemization;
        }
        if self.parents[i].len() == 1 && rule.is_some_and(is_cnf_rule) {
            return StepClass::Clausification;
        }
        StepClass::Inference
    }

    pub fn mark_conjecture_dependence(&self) -> BTreeMap<String, bool> {
        let mut dep = vec![false; self.nodes.len()];
        for &i in &self.order {
            let class = self.classify_step(&self.nodes[i].name);
            dep[i] = matches!(class, StepClass::Conjecture | StepClass::NegatedConjecture)
                || self.parents[i].iter().any(|&p| dep[p]);
        }
        self.nodes.iter().zip(dep).map(|(n, d)| (n.name.clone(), d)).collect()
    }

    pub fn mark_used(&self) -> BTreeMap<String, bool> {
        let mut used = vec![false; self.nodes.len()];
        match self.sink().and_then(|s| self.index.get(s)) {
            None => used.iter_mut().for_each(|u| *u = true),
            Some(&s) => {
                let mut stack = vec![s];
                while let Some(i) = stack.pop() {
                    if !used[i] {
                        used[i] = true;
                        stack.extend(self.parents[i].iter().copied());
                    }
                }
            }
        }
        self.nodes.iter().zip(used).map(|(n, u)| (n.name.clone(), u)).collect()
    }

    pub fn flags(&self) -> BTreeMap<String, StepFlags> {
        let dep = self.mark_conjecture_dependence();
        let used = self.mark_used();
        dep.into_iter()
            .map(|(n, d)| {
                let u = used[&n];
                (n, StepFlags { depends_on_conjecture: d, used_in_refutation: u })
            })
            .collect()
    }

    /// Drops every unit that is not an ancestor of the sink.
    pub fn prune_unused(&self) -> DerivationGraph {
        let used = self.mark_used();
        let kept: Vec<AnnotatedFormula> = self.nodes.iter().filter(|n| used[&n.name]).cloned().collect();
        let mut g = build_graph(kept).expect("a sub-DAG closed under parents is a valid graph");
        g.original_functions = self.original_functions.clone();
        if let Some(c) = self.designated_conjecture {
            let _ = g.designate_conjecture(&self.nodes[c].name);
        }
        g
    }
}

fn collect_function_arities(f: &Formula, out: &mut BTreeMap<String, usize>) {
    fn term(t: &Term, out: &mut BTreeMap<String, usize>) {
        if let Term::App(name, args) = t {
            out.entry(name.clone()).or_insert(args.len());
            args.iter().for_each(|a| term(a, out));
        }
    }
    f.for_each_atom(&mut |a| match a {
        Formula::Pred(_, args) => args.iter().for_each(|t| term(t, out)),
        Formula::Eq(l, r) => {
            term(l, out);
            term(r, out);
        }
        _ => {}
    });
}
