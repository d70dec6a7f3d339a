//! The obvious-inference checker.
//!
//! A conclusion is obvious from premises when the ground skeleton of the
//! premises and the negated conclusion can be refuted branch by branch,
//! each branch closed by its own literals plus a single substitution
//! instance of one premise, and no premise contributing more than one
//! instance overall.
//!
//! Concretely: every premise closure and the negated conclusion closure are
//! encoded propositionally, quantified subformulas becoming opaque atoms
//! (identified up to renaming of bound variables). Each quantifier atom gets
//! a Henkin constraint with a fresh witness constant. Premises whose closure
//! starts with `∀`, and the goal when the conclusion starts with `∃`, may be
//! instantiated once. The checker enumerates models of the skeleton with a
//! DPLL solver extended by ground congruence closure; each model must be
//! contradicted by one chosen instance, found first by matching against the
//! model's literals and then by grounding over the terms of the skeleton.
//! Because instances never combine within a branch, a two-step resolution
//! argument between universally quantified premises is not obvious, while
//! the same argument over ground instances is.

mod brute;
mod ground;
mod sat;

use std::collections::{BTreeSet, HashMap};

pub use brute::{brute_force_entails, BruteForceError, INTERPRETATION_CAP};

use crate::fol::{Formula, Substitution, Term};
use ground::{AtomId, AtomKey, Cnf, Encoded, Ground, Lit};

pub const DEFAULT_BUDGET: usize = 10_000;

/// Largest grounding space explored exhaustively for one premise.
const GROUNDING_LIMIT: usize = 4096;
const MATCH_LIMIT: usize = 2000;

#[derive(Debug, Clone, PartialEq)]
pub struct ObviousnessQuery {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    /// Free variables read as arbitrary but fixed objects rather than
    /// universally.
    pub fixed: Vec<String>,
    pub budget: usize,
}

impl ObviousnessQuery {
    pub fn new(premises: Vec<Formula>, conclusion: Formula) -> Self {
        ObviousnessQuery { premises, conclusion, fixed: Vec::new(), budget: DEFAULT_BUDGET }
    }

    pub fn with_fixed(mut self, fixed: Vec<String>) -> Self {
        self.fixed = fixed;
        self
    }

    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }
}

/// One substitution per instantiated premise. Ranges use the query's fixed
/// variables, terms of the query, and internal witness constants named
/// `#h<n>` / `#c`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Selection {
    pub premises: Vec<Option<Substitution>>,
    /// Instance of an existential conclusion.
    pub goal: Option<Substitution>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ObviousnessVerdict {
    Obvious(Selection),
    NotObvious,
    Unknown,
}

impl ObviousnessVerdict {
    pub fn is_obvious(&self) -> bool {
        matches!(self, ObviousnessVerdict::Obvious(_))
    }

    pub fn name(&self) -> &'static str {
        match self {
            ObviousnessVerdict::Obvious(_) => "Obvious",
            ObviousnessVerdict::NotObvious => "NotObvious",
            ObviousnessVerdict::Unknown => "Unknown",
        }
    }
}

const FIXED_PREFIX: &str = "#v:";

fn fixed_constant(v: &str) -> Term {
    Term::constant(format!("{FIXED_PREFIX}{v}"))
}

fn externalize(t: &Term) -> Term {
    match t {
        Term::App(f, args) if args.is_empty() && f.starts_with(FIXED_PREFIX) => Term::var(&f[FIXED_PREFIX.len()..]),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(externalize).collect()),
        Term::Var(_) => t.clone(),
    }
}

fn internalize(t: &Term, fixed: &BTreeSet<&str>) -> Term {
    match t {
        Term::Var(v) if fixed.contains(v.as_str()) => fixed_constant(v),
        Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| internalize(a, fixed)).collect()),
        Term::Var(_) => t.clone(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Owner {
    Goal,
    Premise(usize),
}

#[derive(Debug, Clone)]
struct Slot {
    owner: Owner,
    vars: Vec<String>,
    matrix: Formula,
}

impl Slot {
    fn instance(&self, s: &Substitution) -> Formula {
        self.matrix.apply(s)
    }
}

struct Prepared {
    ground: Ground,
    cnf: Cnf,
    g_atoms: Vec<AtomId>,
    slots: Vec<Slot>,
    universe: Vec<Term>,
}

/// Moves negations across quantifiers and cancels double negations, so
/// that `¬∃x φ` and `∀x ¬φ` share one skeleton atom and one instance slot.
fn push_negations(f: &Formula) -> Formula {
    match f {
        Formula::Not(g) => match &**g {
            Formula::Not(h) => push_negations(h),
            Formula::Exists(v, b) => Formula::forall(v.clone(), push_negations(&Formula::not((**b).clone()))),
            Formula::Forall(v, b) => Formula::exists(v.clone(), push_negations(&Formula::not((**b).clone()))),
            _ => Formula::not(push_negations(g)),
        },
        Formula::And(gs) => Formula::and(gs.iter().map(push_negations).collect()),
        Formula::Or(gs) => Formula::or(gs.iter().map(push_negations).collect()),
        Formula::Implies(a, b) => Formula::implies(push_negations(a), push_negations(b)),
        Formula::Iff(a, b) => Formula::iff(push_negations(a), push_negations(b)),
        Formula::Forall(v, b) => Formula::forall(v.clone(), push_negations(b)),
        Formula::Exists(v, b) => Formula::exists(v.clone(), push_negations(b)),
        _ => f.clone(),
    }
}

fn prepare(q: &ObviousnessQuery) -> Prepared {
    let fixed: Substitution = q.fixed.iter().map(|v| (v.clone(), fixed_constant(v))).collect();
    let mut ground = Ground::default();
    let mut cnf = Cnf::default();
    let mut slots = Vec::new();

    let goal = push_negations(&q.conclusion.apply(&fixed).universal_closure());
    let mut exist_vars = Vec::new();
    let mut body = &goal;
    while let Formula::Exists(v, b) = body {
        exist_vars.push(v.clone());
        body = b;
    }
    if !exist_vars.is_empty() {
        slots.push(Slot { owner: Owner::Goal, vars: exist_vars, matrix: Formula::not(body.clone()) });
    }
    for (i, p) in q.premises.iter().enumerate() {
        let closure = push_negations(&p.apply(&fixed).universal_closure());
        let (vars, matrix) = closure.strip_universal_prefix();
        cnf.assert(&mut ground, &closure);
        if !vars.is_empty() {
            slots.push(Slot { owner: Owner::Premise(i), vars, matrix });
        }
    }
    cnf.assert(&mut ground, &Formula::not(goal));
    cnf.add_henkin_constraints(&mut ground);

    let g_atoms: Vec<AtomId> = cnf.atom_var.keys().copied().collect();
    let mut ids = Vec::new();
    for &a in &g_atoms {
        match ground.key(a) {
            AtomKey::Pred(_, args) => args.iter().for_each(|&t| ground.bank.subterms(t, &mut ids)),
            AtomKey::Eq(l, r) => {
                ground.bank.subterms(*l, &mut ids);
                ground.bank.subterms(*r, &mut ids);
            }
            AtomKey::Opaque(_) => {}
        }
    }
    ids.sort_unstable();
    ids.dedup();
    let mut universe: Vec<Term> = ids.into_iter().map(|id| ground.bank.to_term(id)).collect();
    if universe.is_empty() {
        universe.push(Term::constant("#c"));
    }
    Prepared { ground, cnf, g_atoms, slots, universe }
}

struct Exhausted;

struct Search {
    p: Prepared,
    budget: usize,
    blocks: Vec<Vec<Lit>>,
    learned: Vec<Vec<Lit>>,
    chosen: Vec<Option<(Substitution, Formula)>>,
}

type Assignment = Vec<(AtomId, bool)>;

impl Search {
    fn tick(&mut self) -> Result<(), Exhausted> {
        if self.budget == 0 {
            return Err(Exhausted);
        }
        self.budget -= 1;
        Ok(())
    }

    fn next_model(&mut self) -> Option<Assignment> {
        let m = sat::solve(&self.p.ground, &self.p.cnf, &self.blocks, &mut self.learned)?;
        Some(
            self.p
                .g_atoms
                .iter()
                .map(|&a| (a, m.value(Lit::new(self.p.cnf.atom_var[&a], true))))
                .collect(),
        )
    }

    fn block(&mut self, core: &[(AtomId, bool)]) {
        let clause = core.iter().map(|&(a, v)| Lit::new(self.p.cnf.atom_var[&a], !v)).collect();
        self.blocks.push(clause);
    }

    /// Three-valued evaluation of a ground formula under a partial assignment.
    fn kleene(&mut self, f: &Formula, tau: &HashMap<AtomId, bool>) -> Option<bool> {
        match f {
            Formula::Not(g) => self.kleene(g, tau).map(|b| !b),
            Formula::And(gs) | Formula::Or(gs) => {
                let is_and = matches!(f, Formula::And(_));
                let mut unknown = false;
                for g in gs {
                    match self.kleene(g, tau) {
                        Some(b) if b != is_and => return Some(!is_and),
                        None => unknown = true,
                        _ => {}
                    }
                }
                if unknown {
                    None
                } else {
                    Some(is_and)
                }
            }
            Formula::Implies(a, b) => {
                match (self.kleene(a, tau), self.kleene(b, tau)) {
                    (Some(false), _) | (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                }
            }
            Formula::Iff(a, b) => match (self.kleene(a, tau), self.kleene(b, tau)) {
                (Some(x), Some(y)) => Some(x == y),
                _ => None,
            },
            _ => match self.p.ground.atom(f) {
                Encoded::Const(b) => Some(b),
                Encoded::Atom(a) => tau.get(&a).copied(),
            },
        }
    }

    fn unsat_with(&mut self, inst: &Formula, lits: &[(AtomId, bool)]) -> bool {
        let mut cnf = Cnf::default();
        cnf.assert(&mut self.p.ground, inst);
        for &(a, v) in lits {
            let l = cnf.atom_lit(a, v);
            cnf.clauses.push(vec![l]);
        }
        sat::solve(&self.p.ground, &cnf, &[], &mut Vec::new()).is_none()
    }

    /// If `inst` contradicts the model, the part of the model responsible.
    fn refutes(&mut self, inst: &Formula, tau: &Assignment, tau_map: &HashMap<AtomId, bool>) -> Option<Assignment> {
        // a formula true under every extension of the model cannot refute it
        if self.kleene(inst, tau_map) == Some(true) {
            return None;
        }
        let mut probe = Cnf::default();
        probe.assert(&mut self.p.ground, inst);
        let inst_atoms: BTreeSet<AtomId> = probe.atom_var.keys().copied().collect();
        let inst_preds: BTreeSet<&str> = inst_atoms
            .iter()
            .filter_map(|&a| match self.p.ground.key(a) {
                AtomKey::Pred(p, _) => Some(p.as_str()),
                _ => None,
            })
            .collect();
        let core: Assignment = tau
            .iter()
            .copied()
            .filter(|&(a, _)| {
                inst_atoms.contains(&a)
                    || match self.p.ground.key(a) {
                        AtomKey::Eq(..) => true,
                        AtomKey::Pred(p, _) => inst_preds.contains(p.as_str()),
                        AtomKey::Opaque(_) => false,
                    }
            })
            .collect();
        if self.unsat_with(inst, &core) {
            return Some(core);
        }
        if core.len() < tau.len() && self.unsat_with(inst, tau) {
            return Some(tau.clone());
        }
        None
    }

    /// Substitutions obtained by matching matrix atoms onto model atoms,
    /// best-covering first.
    fn matching_candidates(&self, slot: &Slot, tau: &Assignment) -> Vec<Substitution> {
        let mut patterns = Vec::new();
        collect_open_atoms(&slot.matrix, &slot.vars, &mut patterns);
        let targets: Vec<&Formula> = tau
            .iter()
            .filter(|(a, _)| !matches!(self.p.ground.key(*a), AtomKey::Opaque(_)))
            .map(|&(a, _)| self.p.ground.formula(a))
            .collect();
        let mut found: Vec<(usize, Substitution)> = Vec::new();
        let mut visits = 0usize;
        fn rec(
            k: usize,
            s: Substitution,
            matched: usize,
            patterns: &[&Formula],
            targets: &[&Formula],
            found: &mut Vec<(usize, Substitution)>,
            visits: &mut usize,
        ) {
            *visits += 1;
            if *visits > MATCH_LIMIT || found.len() > MATCH_LIMIT {
                return;
            }
            if k == patterns.len() {
                if matched > 0 {
                    found.push((matched, s));
                }
                return;
            }
            for t in targets {
                for s2 in match_atom(patterns[k], t, &s) {
                    rec(k + 1, s2, matched + 1, patterns, targets, found, visits);
                }
            }
            rec(k + 1, s, matched, patterns, targets, found, visits);
        }
        rec(0, Substitution::new(), 0, &patterns, &targets, &mut found, &mut visits);
        found.sort_by_key(|f| std::cmp::Reverse(f.0));
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        for (_, s) in found {
            let unbound: Vec<&String> = slot.vars.iter().filter(|v| s.get(v).is_none()).collect();
            let space = self.p.universe.len().checked_pow(unbound.len() as u32).unwrap_or(usize::MAX);
            if space > 64 {
                continue;
            }
            for combo in Odometer::new(unbound.len(), self.p.universe.len()) {
                let mut full = s.clone();
                for (v, &i) in unbound.iter().zip(&combo) {
                    full.insert((*v).clone(), self.p.universe[i].clone());
                }
                if seen.insert(full.clone()) {
                    out.push(full);
                }
            }
        }
        out
    }

    fn try_slot(&mut self, si: usize, s: Substitution, tau: &Assignment, tau_map: &HashMap<AtomId, bool>) -> Result<bool, Exhausted> {
        self.tick()?;
        let inst = self.p.slots[si].instance(&s);
        if let Some(core) = self.refutes(&inst, tau, tau_map) {
            let mark = self.blocks.len();
            self.chosen[si] = Some((s, inst));
            self.block(&core);
            if self.dfs()? {
                return Ok(true);
            }
            self.chosen[si] = None;
            self.blocks.truncate(mark);
        }
        Ok(false)
    }

    fn dfs(&mut self) -> Result<bool, Exhausted> {
        let tau = loop {
            self.tick()?;
            let Some(tau) = self.next_model() else { return Ok(true) };
            let tau_map: HashMap<AtomId, bool> = tau.iter().copied().collect();
            let mut refuted = None;
            for si in 0..self.chosen.len() {
                let Some((_, inst)) = self.chosen[si].clone() else { continue };
                if let Some(core) = self.refutes(&inst, &tau, &tau_map) {
                    refuted = Some(core);
                    break;
                }
            }
            match refuted {
                Some(core) => self.block(&core),
                None => break tau,
            }
        };
        let tau_map: HashMap<AtomId, bool> = tau.iter().copied().collect();
        for si in 0..self.p.slots.len() {
            if self.chosen[si].is_some() {
                continue;
            }
            let slot = self.p.slots[si].clone();
            let mut tried = BTreeSet::new();
            for s in self.matching_candidates(&slot, &tau) {
                if tried.insert(s.clone()) && self.try_slot(si, s, &tau, &tau_map)? {
                    return Ok(true);
                }
            }
            let n = self.p.universe.len();
            let space = n.checked_pow(slot.vars.len() as u32).unwrap_or(usize::MAX);
            if space > GROUNDING_LIMIT {
                return Err(Exhausted);
            }
            for combo in Odometer::new(slot.vars.len(), n) {
                let s: Substitution =
                    slot.vars.iter().zip(&combo).map(|(v, &i)| (v.clone(), self.p.universe[i].clone())).collect();
                if tried.insert(s.clone()) && self.try_slot(si, s, &tau, &tau_map)? {
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }
}

/// Atoms outside quantifiers that mention one of `vars`.
fn collect_open_atoms<'a>(f: &'a Formula, vars: &[String], out: &mut Vec<&'a Formula>) {
    match f {
        Formula::Pred(..) | Formula::Eq(..) => {
            if f.free_vars().iter().any(|v| vars.contains(v)) && !out.contains(&f) {
                out.push(f);
            }
        }
        Formula::Not(g) => collect_open_atoms(g, vars, out),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| collect_open_atoms(g, vars, out)),
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            collect_open_atoms(a, vars, out);
            collect_open_atoms(b, vars, out);
        }
        _ => {}
    }
}

fn match_term(pat: &Term, t: &Term, s: &mut Substitution) -> bool {
    match pat {
        Term::Var(v) => match s.get(v) {
            Some(bound) => bound == t,
            None => {
                s.insert(v.clone(), t.clone());
                true
            }
        },
        Term::App(f, args) => match t {
            Term::App(g, targs) if f == g && args.len() == targs.len() => {
                args.iter().zip(targs).all(|(a, b)| match_term(a, b, s))
            }
            _ => false,
        },
    }
}

/// One-way matching of a pattern atom onto a ground atom; equations match
/// in both orientations.
fn match_atom(pat: &Formula, target: &Formula, s: &Substitution) -> Vec<Substitution> {
    let mut out = Vec::new();
    match (pat, target) {
        (Formula::Pred(p, pa), Formula::Pred(q, qa)) if p == q && pa.len() == qa.len() => {
            let mut s2 = s.clone();
            if pa.iter().zip(qa).all(|(a, b)| match_term(a, b, &mut s2)) {
                out.push(s2);
            }
        }
        (Formula::Eq(l, r), Formula::Eq(a, b)) => {
            for (x, y) in [(a, b), (b, a)] {
                let mut s2 = s.clone();
                if match_term(l, x, &mut s2) && match_term(r, y, &mut s2) && !out.contains(&s2) {
                    out.push(s2);
                }
            }
        }
        _ => {}
    }
    out
}

/// All digit vectors of the given length over `0..radix`, little end first.
struct Odometer {
    digits: Vec<usize>,
    radix: usize,
    done: bool,
}

impl Odometer {
    fn new(len: usize, radix: usize) -> Self {
        Odometer { digits: vec![0; len], radix, done: radix == 0 && len > 0 }
    }
}

impl Iterator for Odometer {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let cur = self.digits.clone();
        let mut i = 0;
        loop {
            if i == self.digits.len() {
                self.done = true;
                break;
            }
            self.digits[i] += 1;
            if self.digits[i] < self.radix {
                break;
            }
            self.digits[i] = 0;
            i += 1;
        }
        Some(cur)
    }
}

/// Decides whether `q.conclusion` is an obvious consequence of `q.premises`.
pub fn is_obvious(q: &ObviousnessQuery) -> ObviousnessVerdict {
    let p = prepare(q);
    let n = p.slots.len();
    let mut search = Search { p, budget: q.budget, blocks: Vec::new(), learned: Vec::new(), chosen: vec![None; n] };
    match search.dfs() {
        Ok(true) => {
            let mut sel = Selection { premises: vec![None; q.premises.len()], goal: None };
            for (slot, chosen) in search.p.slots.iter().zip(&search.chosen) {
                let Some((s, _)) = chosen else { continue };
                let s: Substitution = s.iter().map(|(v, t)| (v.clone(), externalize(t))).collect();
                match slot.owner {
                    Owner::Goal => sel.goal = Some(s),
                    Owner::Premise(i) => sel.premises[i] = Some(s),
                }
            }
            ObviousnessVerdict::Obvious(sel)
        }
        Ok(false) => ObviousnessVerdict::NotObvious,
        Err(Exhausted) => ObviousnessVerdict::Unknown,
    }
}

/// Convenience wrapper with the default budget and no fixed variables.
pub fn obvious(premises: &[Formula], conclusion: &Formula) -> bool {
    is_obvious(&ObviousnessQuery::new(premises.to_vec(), conclusion.clone())).is_obvious()
}

/// Re-checks a selection without search: the skeleton plus the selected
/// instances must be unsatisfiable.
pub fn replay(q: &ObviousnessQuery, sel: &Selection) -> bool {
    let mut p = prepare(q);
    let fixed: BTreeSet<&str> = q.fixed.iter().map(String::as_str).collect();
    for slot in &p.slots {
        let s = match slot.owner {
            Owner::Goal => sel.goal.as_ref(),
            Owner::Premise(i) => sel.premises.get(i).and_then(Option::as_ref),
        };
        if let Some(s) = s {
            let s: Substitution = s.iter().map(|(v, t)| (v.clone(), internalize(t, &fixed))).collect();
            let inst = slot.instance(&s);
            p.cnf.assert(&mut p.ground, &inst);
        }
    }
    sat::solve(&p.ground, &p.cnf, &[], &mut Vec::new()).is_none()
}

/// Number of premises a selection instantiates.
pub fn instance_count(sel: &Selection) -> usize {
    sel.premises.iter().filter(|s| s.is_some()).count() + sel.goal.is_some() as usize
}
