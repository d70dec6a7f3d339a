//! Expansion of non-obvious inference steps into sub-proofs that reason
//! with substitution instances of the parents over fixed variables.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::derivation::DerivationGraph;
use crate::fol::{Clause, Formula, Literal, Substitution, Term};
use crate::obvious::{is_obvious, ObviousnessQuery};
use crate::tptp::AnnotatedFormula;

/// Instance-combination checks tried before giving up on a step.
const MAX_ATTEMPTS: usize = 400;
const MAX_MATCHES: usize = 300;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExpandError {
    #[error("step {step}: no choice of parent instances makes the step obvious")]
    ExpansionFailed { step: String },
}

impl ExpandError {
    pub fn kind(&self) -> &'static str {
        "ExpansionFailed"
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceStep {
    pub label: String,
    pub formula: Formula,
    /// Index into the step's parent list.
    pub premise: usize,
    pub substitution: Substitution,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubProof {
    pub fixed_variables: Vec<String>,
    pub instance_steps: Vec<InstanceStep>,
    /// Parents cited directly by the final step (closed parents).
    pub direct_parents: Vec<usize>,
}

impl SubProof {
    /// References of the final `thus thesis` step: instance labels.
    pub fn final_labels(&self) -> Vec<&str> {
        self.instance_steps.iter().map(|s| s.label.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expansion {
    Direct,
    SubProof(SubProof),
}

/// `A`, `B`, ..., `Z`, `A1`, `B1`, ...
pub fn instance_label(i: usize) -> String {
    let letter = (b'A' + (i % 26) as u8) as char;
    match i / 26 {
        0 => letter.to_string(),
        n => format!("{letter}{n}"),
    }
}

/// Bindings recorded in the step's source annotation, per parent name.
pub fn substitution_from_inference_record(step: &AnnotatedFormula) -> Option<Vec<(String, Substitution)>> {
    let r = step.source.inference()?;
    if r.bindings.is_empty() {
        None
    } else {
        Some(r.bindings.clone())
    }
}

fn unify(a: &Term, b: &Term, s: &mut Substitution, rigid: &BTreeSet<String>) -> bool {
    let a = s.resolve(a);
    let b = s.resolve(b);
    match (&a, &b) {
        (Term::Var(x), Term::Var(y)) if x == y => true,
        (Term::Var(x), t) | (t, Term::Var(x)) if !rigid.contains(x) => {
            if t.contains_var(x) {
                return false;
            }
            s.insert(x.clone(), t.clone());
            true
        }
        (Term::App(f, xs), Term::App(g, ys)) if f == g && xs.len() == ys.len() => {
            xs.iter().zip(ys).all(|(x, y)| unify(x, y, s, rigid))
        }
        _ => false,
    }
}

fn unify_atoms(a: &Formula, b: &Formula, s: &Substitution, rigid: &BTreeSet<String>) -> Vec<Substitution> {
    let mut out = Vec::new();
    match (a, b) {
        (Formula::Pred(p, xs), Formula::Pred(q, ys)) if p == q && xs.len() == ys.len() => {
            let mut s2 = s.clone();
            if xs.iter().zip(ys).all(|(x, y)| unify(x, y, &mut s2, rigid)) {
                out.push(s2);
            }
        }
        (Formula::Eq(l, r), Formula::Eq(x, y)) => {
            for (u, v) in [(x, y), (y, x)] {
                let mut s2 = s.clone();
                if unify(l, u, &mut s2, rigid) && unify(r, v, &mut s2, rigid) && !out.contains(&s2) {
                    out.push(s2);
                }
            }
        }
        _ => {}
    }
    out
}

/// Fully resolves a triangular substitution on the given variables.
fn solved(s: &Substitution, vars: &[String]) -> Substitution {
    vars.iter().filter_map(|v| s.get(v).map(|_| (v.clone(), s.resolve(&Term::var(v))))).collect()
}

struct Parent {
    /// Original universal variables and their renamed-apart versions.
    vars: Vec<String>,
    renamed: Vec<String>,
    matrix: Formula,
    closure: Formula,
}

struct Expander {
    parents: Vec<Parent>,
    fixed: Vec<String>,
    matrix: Formula,
    terms: Vec<Term>,
    budget: usize,
    attempts: usize,
}

impl Expander {
    fn instances(&self, s: &Substitution) -> Option<Vec<Formula>> {
        let mut out = Vec::new();
        for p in &self.parents {
            let mut local = Substitution::new();
            for (v, r) in p.vars.iter().zip(&p.renamed) {
                let t = s.resolve(&Term::var(r));
                if !t.vars().iter().all(|x| self.fixed.contains(x)) {
                    return None;
                }
                local.insert(v.clone(), t);
            }
            out.push(local);
        }
        Some(out.iter().zip(&self.parents).map(|(l, p)| p.matrix.apply(l)).collect())
    }

    fn check(&mut self, s: &Substitution) -> Option<SubProof> {
        if self.attempts >= MAX_ATTEMPTS {
            return None;
        }
        self.attempts += 1;
        let insts = self.instances(s)?;
        let premises: Vec<Formula> = insts
            .iter()
            .zip(&self.parents)
            .map(|(i, p)| if p.vars.is_empty() { p.closure.clone() } else { i.clone() })
            .collect();
        let q = ObviousnessQuery::new(premises, self.matrix.clone())
            .with_fixed(self.fixed.clone())
            .with_budget(self.budget);
        if !is_obvious(&q).is_obvious() {
            return None;
        }
        let mut steps = Vec::new();
        let mut direct = Vec::new();
        for (i, (inst, p)) in insts.into_iter().zip(&self.parents).enumerate() {
            if p.vars.is_empty() {
                direct.push(i);
                continue;
            }
            let substitution: Substitution = p
                .vars
                .iter()
                .zip(&p.renamed)
                .map(|(v, r)| (v.clone(), s.resolve(&Term::var(r))))
                .collect();
            // the instance must itself be an obvious consequence of its parent
            let q = ObviousnessQuery::new(vec![p.closure.clone()], inst.clone())
                .with_fixed(self.fixed.clone())
                .with_budget(self.budget);
            if !is_obvious(&q).is_obvious() {
                return None;
            }
            steps.push(InstanceStep { label: instance_label(steps.len()), formula: inst, premise: i, substitution });
        }
        Some(SubProof { fixed_variables: self.fixed.clone(), instance_steps: steps, direct_parents: direct })
    }

    /// Candidate substitutions from literal matching and resolution pairing.
    fn literal_candidates(&self) -> Vec<Substitution> {
        let rigid: BTreeSet<String> = self.fixed.iter().cloned().collect();
        let goal: Vec<Literal> = Clause::from_formula(&self.matrix).map(|c| c.literals).unwrap_or_default();
        let mut lits: Vec<(usize, Literal)> = Vec::new();
        for (i, p) in self.parents.iter().enumerate() {
            let ren: Substitution =
                p.vars.iter().zip(&p.renamed).map(|(v, r)| (v.clone(), Term::var(r))).collect();
            if let Some(c) = Clause::from_formula(&p.matrix.apply(&ren)) {
                lits.extend(c.literals.into_iter().map(|l| (i, l)));
            }
        }
        let mut out = Vec::new();
        let mut visits = 0;
        #[allow(clippy::too_many_arguments)]
        fn rec(
            k: usize,
            s: Substitution,
            paired: &mut Vec<bool>,
            lits: &[(usize, Literal)],
            goal: &[Literal],
            rigid: &BTreeSet<String>,
            out: &mut Vec<Substitution>,
            visits: &mut usize,
        ) {
            *visits += 1;
            if out.len() >= MAX_MATCHES || *visits > 20 * MAX_MATCHES {
                return;
            }
            if k == lits.len() {
                if !out.contains(&s) {
                    out.push(s);
                }
                return;
            }
            if paired[k] {
                return rec(k + 1, s, paired, lits, goal, rigid, out, visits);
            }
            let (pk, lk) = &lits[k];
            for g in goal.iter().filter(|g| g.positive == lk.positive) {
                for s2 in unify_atoms(&lk.atom, &g.atom, &s, rigid) {
                    rec(k + 1, s2, paired, lits, goal, rigid, out, visits);
                }
            }
            for j in k + 1..lits.len() {
                let (pj, lj) = &lits[j];
                if paired[j] || pj == pk || lj.positive == lk.positive {
                    continue;
                }
                for s2 in unify_atoms(&lk.atom, &lj.atom, &s, rigid) {
                    paired[j] = true;
                    rec(k + 1, s2, paired, lits, goal, rigid, out, visits);
                    paired[j] = false;
                }
            }
            rec(k + 1, s, paired, lits, goal, rigid, out, visits);
        }
        let mut paired = vec![false; lits.len()];
        rec(0, Substitution::new(), &mut paired, &lits, &goal, &rigid, &mut out, &mut visits);
        out
    }

    fn all_renamed(&self) -> Vec<String> {
        self.parents.iter().flat_map(|p| p.renamed.iter().cloned()).collect()
    }

    /// Grounds the variables a candidate leaves open and checks each result.
    fn complete(&mut self, s: &Substitution) -> Option<SubProof> {
        let vars = self.all_renamed();
        let s = solved(s, &vars);
        let open: Vec<String> = vars
            .iter()
            .filter(|v| {
                let t = s.resolve(&Term::var(v.as_str()));
                t.vars().iter().any(|x| !self.fixed.contains(x))
            })
            .cloned()
            .collect();
        // variables an open variable's binding still mentions
        let mut holes: Vec<String> = Vec::new();
        for v in &open {
            for x in s.resolve(&Term::var(v.as_str())).vars() {
                if !self.fixed.contains(&x) && !holes.contains(&x) {
                    holes.push(x);
                }
            }
        }
        let n = self.terms.len();
        if n == 0 && !holes.is_empty() {
            return None;
        }
        let space = n.checked_pow(holes.len() as u32).unwrap_or(usize::MAX);
        if space > MAX_ATTEMPTS {
            return None;
        }
        let mut digits = vec![0usize; holes.len()];
        loop {
            let mut full = s.clone();
            for (h, &d) in holes.iter().zip(&digits) {
                full.insert(h.clone(), self.terms[d].clone());
            }
            if let Some(p) = self.check(&full) {
                return Some(p);
            }
            if self.attempts >= MAX_ATTEMPTS {
                return None;
            }
            let mut i = 0;
            loop {
                if i == digits.len() {
                    return None;
                }
                digits[i] += 1;
                if digits[i] < n {
                    break;
                }
                digits[i] = 0;
                i += 1;
            }
        }
    }
}

fn ground_terms(f: &Formula, out: &mut Vec<Term>) {
    f.for_each_atom(&mut |a| {
        let args: Vec<&Term> = match a {
            Formula::Pred(_, args) => args.iter().collect(),
            Formula::Eq(l, r) => vec![l, r],
            _ => Vec::new(),
        };
        for t in args {
            for sub in t.subterms() {
                if sub.is_ground() && !out.contains(sub) {
                    out.push(sub.clone());
                }
            }
        }
    });
}

/// Justifies `conclusion` from `parents`, directly when obvious and
/// otherwise by a sub-proof over instances of the parents.
pub fn expand_inference(
    parents: &[Formula],
    conclusion: &Formula,
    hints: &[Option<Substitution>],
    budget: usize,
) -> Option<Expansion> {
    let direct = ObviousnessQuery::new(parents.to_vec(), conclusion.clone()).with_budget(budget);
    if is_obvious(&direct).is_obvious() {
        return Some(Expansion::Direct);
    }
    let (fixed, matrix) = conclusion.universal_closure().strip_universal_prefix();
    let mut taken: BTreeSet<String> = fixed.iter().cloned().collect();
    for p in parents {
        taken.extend(p.all_vars());
    }
    let mut ps = Vec::new();
    for (i, p) in parents.iter().enumerate() {
        let closure = p.universal_closure();
        let (vars, m) = closure.strip_universal_prefix();
        let renamed = vars
            .iter()
            .map(|v| {
                let r = crate::fol::fresh_name(&format!("{v}_{i}"), &taken);
                taken.insert(r.clone());
                r
            })
            .collect();
        ps.push(Parent { vars, renamed, matrix: m, closure });
    }
    let mut terms: Vec<Term> = fixed.iter().map(Term::var).collect();
    for f in parents.iter().chain(std::iter::once(conclusion)) {
        ground_terms(f, &mut terms);
    }
    let mut ex = Expander { parents: ps, fixed, matrix, terms, budget, attempts: 0 };

    // recorded bindings first
    if hints.iter().any(Option::is_some) {
        let mut s = Substitution::new();
        for (p, h) in ex.parents.iter().zip(hints) {
            if let Some(h) = h {
                for (v, r) in p.vars.iter().zip(&p.renamed) {
                    if let Some(t) = h.get(v) {
                        s.insert(r.clone(), t.clone());
                    }
                }
            }
        }
        if let Some(sp) = ex.complete(&s) {
            return Some(Expansion::SubProof(sp));
        }
    }
    for s in ex.literal_candidates() {
        if let Some(sp) = ex.complete(&s) {
            return Some(Expansion::SubProof(sp));
        }
        if ex.attempts >= MAX_ATTEMPTS {
            return None;
        }
    }
    ex.complete(&Substitution::new()).map(Expansion::SubProof)
}

/// Expands a derivation step; see [`expand_inference`].
pub fn expand_step(g: &DerivationGraph, name: &str, budget: usize) -> Result<Expansion, ExpandError> {
    let node = g.node(name).ok_or_else(|| ExpandError::ExpansionFailed { step: name.to_string() })?;
    let parent_names = g.parents(name);
    let parents: Vec<Formula> = parent_names.iter().map(|p| g.node(p).unwrap().formula.clone()).collect();
    let bindings = substitution_from_inference_record(node).unwrap_or_default();
    let hints: Vec<Option<Substitution>> = parent_names
        .iter()
        .map(|p| bindings.iter().find(|(n, _)| n == p).map(|(_, s)| s.clone()))
        .collect();
    expand_inference(&parents, &node.formula, &hints, budget)
        .ok_or_else(|| ExpandError::ExpansionFailed { step: name.to_string() })
}
