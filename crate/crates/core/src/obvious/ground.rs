//! Ground terms, atoms and a Tseitin encoder shared by the checker and the
//! SAT core.

use std::collections::{BTreeMap, HashMap};

use crate::fol::{Formula, Substitution, Term};

pub(crate) type TermId = usize;
pub(crate) type AtomId = usize;

#[derive(Debug, Default, Clone)]
pub(crate) struct TermBank {
    nodes: Vec<(String, Vec<TermId>)>,
    index: HashMap<(String, Vec<TermId>), TermId>,
}

impl TermBank {
    /// Interns a ground term. Variables have no identity here.
    pub fn intern(&mut self, t: &Term) -> Option<TermId> {
        match t {
            Term::Var(_) => None,
            Term::App(f, args) => {
                let args = args.iter().map(|a| self.intern(a)).collect::<Option<Vec<_>>>()?;
                let key = (f.clone(), args);
                if let Some(&id) = self.index.get(&key) {
                    return Some(id);
                }
                let id = self.nodes.len();
                self.nodes.push(key.clone());
                self.index.insert(key, id);
                Some(id)
            }
        }
    }

    pub fn node(&self, id: TermId) -> &(String, Vec<TermId>) {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn to_term(&self, id: TermId) -> Term {
        let (f, args) = &self.nodes[id];
        Term::App(f.clone(), args.iter().map(|&a| self.to_term(a)).collect())
    }

    /// `id` and all of its subterms.
    pub fn subterms(&self, id: TermId, out: &mut Vec<TermId>) {
        out.push(id);
        for &a in &self.nodes[id].1 {
            self.subterms(a, out);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) enum AtomKey {
    Pred(String, Vec<TermId>),
    Eq(TermId, TermId),
    /// A closed quantified formula, keyed by its alpha-normal form.
    Opaque(Formula),
}

#[derive(Debug, Default, Clone)]
pub(crate) struct Ground {
    pub bank: TermBank,
    keys: Vec<AtomKey>,
    formulas: Vec<Formula>,
    index: HashMap<AtomKey, AtomId>,
    henkin: BTreeMap<AtomId, Term>,
    next_constant: usize,
}

pub(crate) enum Encoded {
    Const(bool),
    Atom(AtomId),
}

impl Ground {
    pub fn key(&self, a: AtomId) -> &AtomKey {
        &self.keys[a]
    }

    pub fn formula(&self, a: AtomId) -> &Formula {
        &self.formulas[a]
    }

    /// Maps a ground atomic or quantified formula to its atom, or to a
    /// constant when the atom is a trivial equation.
    pub fn atom(&mut self, f: &Formula) -> Encoded {
        let key = match f {
            Formula::True => return Encoded::Const(true),
            Formula::False => return Encoded::Const(false),
            Formula::Pred(p, args) => {
                let ids = args.iter().map(|t| self.bank.intern(t)).collect::<Option<Vec<_>>>();
                match ids {
                    Some(ids) => AtomKey::Pred(p.clone(), ids),
                    None => AtomKey::Opaque(f.alpha_key()),
                }
            }
            Formula::Eq(l, r) => match (self.bank.intern(l), self.bank.intern(r)) {
                (Some(a), Some(b)) if a == b => return Encoded::Const(true),
                (Some(a), Some(b)) => AtomKey::Eq(a.min(b), a.max(b)),
                _ => AtomKey::Opaque(f.alpha_key()),
            },
            _ => AtomKey::Opaque(f.alpha_key()),
        };
        if let Some(&id) = self.index.get(&key) {
            return Encoded::Atom(id);
        }
        let id = self.keys.len();
        self.keys.push(key.clone());
        self.formulas.push(f.clone());
        self.index.insert(key, id);
        Encoded::Atom(id)
    }

    /// A constant no input can mention.
    pub fn fresh_constant(&mut self, hint: &str) -> Term {
        self.next_constant += 1;
        Term::constant(format!("#{hint}{}", self.next_constant))
    }

    /// The Henkin witness (for `∃`) or counter-witness (for `∀`) of a
    /// quantifier atom, created on first use.
    pub fn henkin_constant(&mut self, a: AtomId) -> Term {
        if let Some(t) = self.henkin.get(&a) {
            return t.clone();
        }
        let c = self.fresh_constant("h");
        self.henkin.insert(a, c.clone());
        c
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub(crate) struct Lit(u32);

impl Lit {
    pub fn new(var: usize, positive: bool) -> Lit {
        Lit(((var as u32) << 1) | (!positive as u32))
    }
    pub fn var(self) -> usize {
        (self.0 >> 1) as usize
    }
    pub fn positive(self) -> bool {
        self.0 & 1 == 0
    }
    pub fn negate(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

/// A clause set over atom variables and Tseitin auxiliaries.
#[derive(Debug, Clone, Default)]
pub(crate) struct Cnf {
    pub var_atom: Vec<Option<AtomId>>,
    pub atom_var: BTreeMap<AtomId, usize>,
    pub clauses: Vec<Vec<Lit>>,
    truth: Option<usize>,
}

impl Cnf {
    fn fresh(&mut self, atom: Option<AtomId>) -> usize {
        self.var_atom.push(atom);
        self.var_atom.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.var_atom.len()
    }

    pub fn atom_lit(&mut self, a: AtomId, positive: bool) -> Lit {
        let v = match self.atom_var.get(&a) {
            Some(&v) => v,
            None => {
                let v = self.fresh(Some(a));
                self.atom_var.insert(a, v);
                v
            }
        };
        Lit::new(v, positive)
    }

    fn constant(&mut self, value: bool) -> Lit {
        let v = match self.truth {
            Some(v) => v,
            None => {
                let v = self.fresh(None);
                self.truth = Some(v);
                self.clauses.push(vec![Lit::new(v, true)]);
                v
            }
        };
        Lit::new(v, value)
    }

    /// Returns a literal equivalent to the ground formula `f`.
    pub fn encode(&mut self, g: &mut Ground, f: &Formula) -> Lit {
        match f {
            Formula::Not(inner) => self.encode(g, inner).negate(),
            Formula::And(parts) | Formula::Or(parts) => {
                let is_and = matches!(f, Formula::And(_));
                let lits: Vec<Lit> = parts.iter().map(|p| self.encode(g, p)).collect();
                self.gate(is_and, lits)
            }
            Formula::Implies(a, b) => {
                let a = self.encode(g, a).negate();
                let b = self.encode(g, b);
                self.gate(false, vec![a, b])
            }
            Formula::Iff(a, b) => {
                let a = self.encode(g, a);
                let b = self.encode(g, b);
                let v = Lit::new(self.fresh(None), true);
                self.clauses.push(vec![v.negate(), a.negate(), b]);
                self.clauses.push(vec![v.negate(), a, b.negate()]);
                self.clauses.push(vec![v, a, b]);
                self.clauses.push(vec![v, a.negate(), b.negate()]);
                v
            }
            _ => match g.atom(f) {
                Encoded::Const(b) => self.constant(b),
                Encoded::Atom(a) => self.atom_lit(a, true),
            },
        }
    }

    fn gate(&mut self, is_and: bool, lits: Vec<Lit>) -> Lit {
        if lits.len() == 1 {
            return lits[0];
        }
        let v = Lit::new(self.fresh(None), true);
        // and: v -> each, all -> v. or: dual.
        let (out, inner) = if is_and { (v, v.negate()) } else { (v.negate(), v) };
        let mut big = vec![out];
        for &l in &lits {
            let l = if is_and { l } else { l.negate() };
            self.clauses.push(vec![inner, l]);
            big.push(l.negate());
        }
        self.clauses.push(big);
        v
    }

    /// Adds `f` as a constraint, splitting top-level conjunctions.
    pub fn assert(&mut self, g: &mut Ground, f: &Formula) {
        match f {
            Formula::And(parts) => parts.iter().for_each(|p| self.assert(g, p)),
            Formula::Or(parts) => {
                let c = parts.iter().map(|p| self.encode(g, p)).collect();
                self.clauses.push(c);
            }
            Formula::Implies(a, b) => {
                let c = vec![self.encode(g, a).negate(), self.encode(g, b)];
                self.clauses.push(c);
            }
            Formula::Not(inner) if matches!(**inner, Formula::Or(_)) => {
                let Formula::Or(parts) = &**inner else { unreachable!() };
                parts.iter().for_each(|p| self.assert(g, &Formula::not(p.clone())));
            }
            _ => {
                let l = self.encode(g, f);
                self.clauses.push(vec![l]);
            }
        }
    }

    /// Adds the Henkin constraints of every quantifier atom mentioned so far,
    /// including the atoms those constraints introduce.
    pub fn add_henkin_constraints(&mut self, g: &mut Ground) {
        let mut done = std::collections::BTreeSet::new();
        loop {
            let pending: Vec<AtomId> = self
                .atom_var
                .keys()
                .copied()
                .filter(|a| !done.contains(a) && matches!(g.key(*a), AtomKey::Opaque(_)))
                .collect();
            if pending.is_empty() {
                break;
            }
            for a in pending {
                done.insert(a);
                let f = g.formula(a).clone();
                let (exists, v, body) = match &f {
                    Formula::Exists(v, b) => (true, v, b),
                    Formula::Forall(v, b) => (false, v, b),
                    _ => continue,
                };
                let c = g.henkin_constant(a);
                let mut s = Substitution::new();
                s.insert(v.clone(), c);
                let inst = body.apply(&s);
                let q = self.atom_lit(a, true);
                let b = self.encode(g, &inst);
                if exists {
                    self.clauses.push(vec![q.negate(), b]);
                } else {
                    self.clauses.push(vec![q, b.negate()]);
                }
            }
        }
    }
}
