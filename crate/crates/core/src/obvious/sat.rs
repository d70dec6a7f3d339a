//! DPLL with lazy ground congruence closure.
//!
//! Full propositional models are handed to the congruence check; an
//! inconsistent model yields a (deletion-minimized) theory lemma and the
//! search continues. Sizes here are tiny, so propagation simply rescans
//! the clause list.

use std::collections::HashMap;

use super::ground::{AtomId, AtomKey, Cnf, Ground, Lit, TermId};

/// Union-find with congruence over the terms of a [`super::ground::TermBank`].
struct Congruence {
    parent: Vec<usize>,
}

impl Congruence {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        let (lo, hi) = (a.min(b), a.max(b));
        self.parent[hi] = lo;
        true
    }
}

/// Whether the signed theory atoms are jointly satisfiable.
pub(crate) fn theory_consistent(g: &Ground, lits: &[(AtomId, bool)]) -> bool {
    if !lits.iter().any(|&(a, v)| v && matches!(g.key(a), AtomKey::Eq(..))) {
        // Without positive equations distinct atoms never clash.
        return true;
    }
    let mut terms: Vec<TermId> = Vec::new();
    for &(a, _) in lits {
        match g.key(a) {
            AtomKey::Pred(_, args) => args.iter().for_each(|&t| g.bank.subterms(t, &mut terms)),
            AtomKey::Eq(l, r) => {
                g.bank.subterms(*l, &mut terms);
                g.bank.subterms(*r, &mut terms);
            }
            AtomKey::Opaque(_) => {}
        }
    }
    terms.sort_unstable();
    terms.dedup();
    let mut cc = Congruence { parent: (0..g.bank.len()).collect() };
    for &(a, v) in lits {
        if let (AtomKey::Eq(l, r), true) = (g.key(a), v) {
            cc.union(*l, *r);
        }
    }
    let apps: Vec<TermId> = terms.iter().copied().filter(|&t| !g.bank.node(t).1.is_empty()).collect();
    loop {
        let mut sigs: HashMap<(&str, Vec<usize>), usize> = HashMap::new();
        let mut changed = false;
        for &t in &apps {
            let (f, args) = g.bank.node(t);
            let sig = (f.as_str(), args.iter().map(|&x| cc.find(x)).collect::<Vec<_>>());
            match sigs.get(&sig) {
                Some(&other) => changed |= cc.union(t, other),
                None => {
                    sigs.insert(sig, t);
                }
            }
        }
        if !changed {
            break;
        }
    }
    let mut preds: HashMap<(&str, Vec<usize>), bool> = HashMap::new();
    for &(a, v) in lits {
        match g.key(a) {
            AtomKey::Eq(l, r) if !v => {
                if cc.find(*l) == cc.find(*r) {
                    return false;
                }
            }
            AtomKey::Pred(p, args) => {
                let sig = (p.as_str(), args.iter().map(|&x| cc.find(x)).collect::<Vec<_>>());
                if let Some(&w) = preds.get(&sig) {
                    if w != v {
                        return false;
                    }
                } else {
                    preds.insert(sig, v);
                }
            }
            _ => {}
        }
    }
    true
}

/// Shrinks an inconsistent literal set until every member is needed.
pub(crate) fn minimize_conflict(g: &Ground, lits: &[(AtomId, bool)]) -> Vec<(AtomId, bool)> {
    let mut core = lits.to_vec();
    let mut i = 0;
    while i < core.len() {
        let mut trial = core.clone();
        trial.remove(i);
        if !theory_consistent(g, &trial) {
            core = trial;
        } else {
            i += 1;
        }
    }
    core
}

pub(crate) struct Model {
    pub values: Vec<bool>,
}

impl Model {
    pub fn value(&self, l: Lit) -> bool {
        self.values[l.var()] == l.positive()
    }
}

/// Finds a theory-consistent model of `cnf` plus `extra`, or `None`.
/// Theory lemmas discovered on the way are appended to `learned`.
pub(crate) fn solve(g: &Ground, cnf: &Cnf, extra: &[Vec<Lit>], learned: &mut Vec<Vec<Lit>>) -> Option<Model> {
    let n = cnf.num_vars();
    let mut assign: Vec<i8> = vec![0; n];
    let mut trail: Vec<Lit> = Vec::new();
    // (trail length before the decision, decided literal, already flipped)
    let mut decisions: Vec<(usize, Lit, bool)> = Vec::new();

    let value = |assign: &[i8], l: Lit| -> i8 {
        let v = assign[l.var()];
        if l.positive() {
            v
        } else {
            -v
        }
    };

    'search: loop {
        // unit propagation to fixpoint
        let mut conflict = false;
        'prop: loop {
            let mut changed = false;
            for c in cnf.clauses.iter().chain(extra).chain(learned.iter()) {
                let mut unassigned = None;
                let mut count = 0;
                let mut sat = false;
                for &l in c {
                    match value(&assign, l) {
                        1 => {
                            sat = true;
                            break;
                        }
                        0 => {
                            count += 1;
                            unassigned = Some(l);
                        }
                        _ => {}
                    }
                }
                if sat {
                    continue;
                }
                if count == 0 {
                    conflict = true;
                    break 'prop;
                }
                if count == 1 {
                    let l = unassigned.unwrap();
                    assign[l.var()] = if l.positive() { 1 } else { -1 };
                    trail.push(l);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        if !conflict {
            match (0..n).find(|&v| assign[v] == 0) {
                Some(v) => {
                    let l = Lit::new(v, false);
                    decisions.push((trail.len(), l, false));
                    assign[v] = -1;
                    trail.push(l);
                    continue 'search;
                }
                None => {
                    let lits: Vec<(AtomId, bool)> = (0..n)
                        .filter_map(|v| cnf.var_atom[v].map(|a| (a, assign[v] == 1)))
                        .filter(|&(a, _)| !matches!(g.key(a), AtomKey::Opaque(_)))
                        .collect();
                    if theory_consistent(g, &lits) {
                        return Some(Model { values: assign.iter().map(|&x| x == 1).collect() });
                    }
                    let core = minimize_conflict(g, &lits);
                    learned.push(core.iter().map(|&(a, v)| Lit::new(cnf.atom_var[&a], !v)).collect());
                }
            }
        }

        // backtrack to the most recent unflipped decision
        loop {
            let (mark, lit, flipped) = decisions.pop()?;
            for l in trail.drain(mark..) {
                assign[l.var()] = 0;
            }
            if !flipped {
                let l = lit.negate();
                decisions.push((mark, l, true));
                assign[l.var()] = if l.positive() { 1 } else { -1 };
                trail.push(l);
                continue 'search;
            }
        }
    }
}
