//! First-order syntax shared by every stage of the pipeline.
//!
//! Variables are kept by name so that they survive into the rendered
//! article. Comparisons that must ignore bound-variable names go through
//! [`Formula::alpha_key`], which renames binders by depth.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Function,
    Predicate,
}

impl fmt::Display for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Function => write!(f, "func"),
            SymbolKind::Predicate => write!(f, "pred"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub kind: SymbolKind,
    pub name: String,
    pub arity: usize,
}

impl Symbol {
    pub fn function(name: impl Into<String>, arity: usize) -> Self {
        Symbol { kind: SymbolKind::Function, name: name.into(), arity }
    }

    pub fn predicate(name: impl Into<String>, arity: usize) -> Self {
        Symbol { kind: SymbolKind::Predicate, name: name.into(), arity }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; constants have no arguments.
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Self {
        Term::App(name.into(), Vec::new())
    }

    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(w) => w == v,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn apply(&self, s: &Substitution) -> Term {
        match self {
            Term::Var(v) => s.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.apply(s)).collect()),
        }
    }

    /// Renames function symbols; variables are untouched.
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(f, args) => Term::App(
                map.get(f).cloned().unwrap_or_else(|| f.clone()),
                args.iter().map(|a| a.rename_symbols(map)).collect(),
            ),
        }
    }

    /// Every subterm, outermost first.
    pub fn subterms(&self) -> Vec<&Term> {
        let mut out = vec![self];
        if let Term::App(_, args) = self {
            for a in args {
                out.extend(a.subterms());
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Pred(String, Vec<Term>),
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn pred(name: impl Into<String>, args: Vec<Term>) -> Self {
        Formula::Pred(name.into(), args)
    }

    pub fn eq(l: Term, r: Term) -> Self {
        Formula::Eq(l, r)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction with nested conjunctions flattened. A single operand is
    /// returned as is; no operands give `True`.
    pub fn and(parts: Vec<Formula>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::And(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::True,
            1 => flat.pop().unwrap(),
            _ => Formula::And(flat),
        }
    }

    /// Disjunction, flattened like [`Formula::and`]; no operands give `False`.
    pub fn or(parts: Vec<Formula>) -> Self {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                Formula::Or(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        match flat.len() {
            0 => Formula::False,
            1 => flat.pop().unwrap(),
            _ => Formula::Or(flat),
        }
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Self {
        Formula::Forall(v.into(), Box::new(body))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Self {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall_many(vars: &[String], body: Formula) -> Self {
        vars.iter().rev().fold(body, |acc, v| Formula::forall(v.clone(), acc))
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..))
    }

    pub fn is_literal(&self) -> bool {
        match self {
            Formula::Not(inner) => inner.is_atomic(),
            f => f.is_atomic(),
        }
    }

    pub fn is_quantifier_free(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Pred(..) | Formula::Eq(..) => true,
            Formula::Not(f) => f.is_quantifier_free(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().all(Formula::is_quantifier_free),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_quantifier_free() && b.is_quantifier_free()
            }
            Formula::Forall(..) | Formula::Exists(..) => false,
        }
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut Vec<String>) {
        let term_vars = |t: &Term, bound: &Vec<String>, out: &mut Vec<String>| {
            for v in t.vars() {
                if !bound.contains(&v) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(_, args) => args.iter().for_each(|t| term_vars(t, bound, out)),
            Formula::Eq(l, r) => {
                term_vars(l, bound, out);
                term_vars(r, bound, out);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(fs) | Formula::Or(fs) => {
                fs.iter().for_each(|f| f.collect_free(bound, out))
            }
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Variables with at least one free occurrence, in left-to-right order of
    /// first occurrence.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// All variable names, free or bound, in first-occurrence order.
    pub fn all_vars(&self) -> Vec<String> {
        fn go(f: &Formula, out: &mut Vec<String>) {
            let mut push = |v: String| {
                if !out.contains(&v) {
                    out.push(v);
                }
            };
            match f {
                Formula::True | Formula::False => {}
                Formula::Pred(_, args) => args.iter().flat_map(Term::vars).for_each(push),
                Formula::Eq(l, r) => l.vars().into_iter().chain(r.vars()).for_each(push),
                Formula::Not(g) => go(g, out),
                Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| go(g, out)),
                Formula::Implies(a, b) | Formula::Iff(a, b) => {
                    go(a, out);
                    go(b, out);
                }
                Formula::Forall(v, body) | Formula::Exists(v, body) => {
                    push(v.clone());
                    go(body, out);
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    /// Prefixes universal quantifiers over the free variables.
    pub fn universal_closure(&self) -> Formula {
        Formula::forall_many(&self.free_vars(), self.clone())
    }

    /// Removes the maximal leading block of universal quantifiers.
    pub fn strip_universal_prefix(&self) -> (Vec<String>, Formula) {
        let mut vars = Vec::new();
        let mut cur = self;
        while let Formula::Forall(v, body) = cur {
            vars.push(v.clone());
            cur = body;
        }
        (vars, cur.clone())
    }

    /// Capture-avoiding simultaneous substitution of free variables.
    pub fn apply(&self, s: &Substitution) -> Formula {
        if s.is_empty() {
            return self.clone();
        }
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|t| t.apply(s)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(l.apply(s), r.apply(s)),
            Formula::Not(f) => Formula::not(f.apply(s)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.apply(s)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.apply(s)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.apply(s), b.apply(s)),
            Formula::Iff(a, b) => Formula::iff(a.apply(s), b.apply(s)),
            Formula::Forall(v, body) | Formula::Exists(v, body) => {
                let is_forall = matches!(self, Formula::Forall(..));
                let mut inner = s.clone();
                inner.remove(v);
                let body_free = body.free_vars();
                // Only bindings that actually reach the body matter for capture.
                let range_vars: BTreeSet<String> = body_free
                    .iter()
                    .filter_map(|x| inner.get(x))
                    .flat_map(Term::vars)
                    .collect();
                let (bound, body) = if range_vars.contains(v) {
                    let mut avoid: BTreeSet<String> = range_vars;
                    avoid.extend(body.all_vars());
                    avoid.extend(inner.domain().cloned());
                    let fresh = fresh_name(v, &avoid);
                    let mut rename = Substitution::new();
                    rename.insert(v.clone(), Term::Var(fresh.clone()));
                    (fresh, body.apply(&rename))
                } else {
                    (v.clone(), (**body).clone())
                };
                let body = body.apply(&inner);
                if is_forall {
                    Formula::forall(bound, body)
                } else {
                    Formula::exists(bound, body)
                }
            }
        }
    }

    /// Canonical form in which every bound variable is named after its
    /// binding depth. Two formulas are alpha-equivalent iff their keys are
    /// equal.
    pub fn alpha_key(&self) -> Formula {
        fn term(t: &Term, env: &[(String, String)]) -> Term {
            match t {
                Term::Var(v) => match env.iter().rev().find(|(n, _)| n == v) {
                    Some((_, k)) => Term::Var(k.clone()),
                    None => t.clone(),
                },
                Term::App(f, args) => {
                    Term::App(f.clone(), args.iter().map(|a| term(a, env)).collect())
                }
            }
        }
        fn go(f: &Formula, env: &mut Vec<(String, String)>) -> Formula {
            match f {
                Formula::True | Formula::False => f.clone(),
                Formula::Pred(p, args) => {
                    Formula::Pred(p.clone(), args.iter().map(|t| term(t, env)).collect())
                }
                Formula::Eq(l, r) => Formula::Eq(term(l, env), term(r, env)),
                Formula::Not(g) => Formula::not(go(g, env)),
                Formula::And(fs) => Formula::And(fs.iter().map(|g| go(g, env)).collect()),
                Formula::Or(fs) => Formula::Or(fs.iter().map(|g| go(g, env)).collect()),
                Formula::Implies(a, b) => Formula::implies(go(a, env), go(b, env)),
                Formula::Iff(a, b) => Formula::iff(go(a, env), go(b, env)),
                Formula::Forall(v, body) | Formula::Exists(v, body) => {
                    let key = format!("#{}", env.len());
                    env.push((v.clone(), key.clone()));
                    let body = go(body, env);
                    env.pop();
                    if matches!(f, Formula::Forall(..)) {
                        Formula::forall(key, body)
                    } else {
                        Formula::exists(key, body)
                    }
                }
            }
        }
        go(self, &mut Vec::new())
    }

    pub fn alpha_equivalent(&self, other: &Formula) -> bool {
        self.alpha_key() == other.alpha_key()
    }

    /// Renames function and predicate symbols by name.
    pub fn rename_symbols(&self, map: &BTreeMap<String, String>) -> Formula {
        if map.is_empty() {
            return self.clone();
        }
        let ren = |n: &String| map.get(n).cloned().unwrap_or_else(|| n.clone());
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(ren(p), args.iter().map(|t| t.rename_symbols(map)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(l.rename_symbols(map), r.rename_symbols(map)),
            Formula::Not(f) => Formula::not(f.rename_symbols(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_symbols(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_symbols(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename_symbols(map), b.rename_symbols(map)),
            Formula::Iff(a, b) => Formula::iff(a.rename_symbols(map), b.rename_symbols(map)),
            Formula::Forall(v, b) => Formula::forall(v.clone(), b.rename_symbols(map)),
            Formula::Exists(v, b) => Formula::exists(v.clone(), b.rename_symbols(map)),
        }
    }

    /// Renames variables (free and bound) by name. The map must be injective
    /// on the variables of the formula for the result to be alpha-equivalent.
    pub fn rename_vars(&self, map: &BTreeMap<String, String>) -> Formula {
        let s: Substitution = map
            .iter()
            .map(|(k, v)| (k.clone(), Term::Var(v.clone())))
            .collect();
        let ren = |v: &String| map.get(v).cloned().unwrap_or_else(|| v.clone());
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Pred(p, args) => {
                Formula::Pred(p.clone(), args.iter().map(|t| t.apply(&s)).collect())
            }
            Formula::Eq(l, r) => Formula::Eq(l.apply(&s), r.apply(&s)),
            Formula::Not(f) => Formula::not(f.rename_vars(map)),
            Formula::And(fs) => Formula::And(fs.iter().map(|f| f.rename_vars(map)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|f| f.rename_vars(map)).collect()),
            Formula::Implies(a, b) => Formula::implies(a.rename_vars(map), b.rename_vars(map)),
            Formula::Iff(a, b) => Formula::iff(a.rename_vars(map), b.rename_vars(map)),
            Formula::Forall(v, b) => Formula::forall(ren(v), b.rename_vars(map)),
            Formula::Exists(v, b) => Formula::exists(ren(v), b.rename_vars(map)),
        }
    }

    /// Visits every term argument of every atom.
    pub fn for_each_atom<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Pred(..) | Formula::Eq(..) => f(self),
            Formula::Not(g) => g.for_each_atom(f),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|g| g.for_each_atom(f)),
            Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.for_each_atom(f);
                b.for_each_atom(f);
            }
            Formula::Forall(_, b) | Formula::Exists(_, b) => b.for_each_atom(f),
        }
    }

    /// Function symbol names occurring in the formula.
    pub fn function_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.for_each_atom(&mut |a| {
            let args: Vec<&Term> = match a {
                Formula::Pred(_, args) => args.iter().collect(),
                Formula::Eq(l, r) => vec![l, r],
                _ => Vec::new(),
            };
            for t in args {
                for sub in t.subterms() {
                    if let Term::App(name, _) = sub {
                        out.insert(name.clone());
                    }
                }
            }
        });
        out
    }
}

/// Fresh variable name derived from `base` that avoids every name in `avoid`.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches(|c: char| c.is_ascii_digit() || c == '_');
    let stem = if stem.is_empty() { "X" } else { stem };
    (0..)
        .map(|i| format!("{stem}_{i}"))
        .find(|n| !avoid.contains(n))
        .unwrap()
}

/// Finite map from variables to terms, applied simultaneously.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Substitution(BTreeMap::new())
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, v: &str) -> Option<&Term> {
        self.0.get(v)
    }

    pub fn insert(&mut self, v: String, t: Term) -> Option<Term> {
        self.0.insert(v, t)
    }

    pub fn remove(&mut self, v: &str) -> Option<Term> {
        self.0.remove(v)
    }

    pub fn domain(&self) -> impl Iterator<Item = &String> {
        self.0.keys()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }

    /// Fully resolves a term through chains of variable bindings.
    pub fn resolve(&self, t: &Term) -> Term {
        match t {
            Term::Var(v) => match self.0.get(v) {
                Some(b) if b != t => self.resolve(b),
                _ => t.clone(),
            },
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| self.resolve(a)).collect()),
        }
    }
}

impl FromIterator<(String, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (String, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, t)) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v} -> {t}")?;
        }
        write!(f, "}}")
    }
}

/// One signed atom of a clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    pub positive: bool,
    /// Always `Formula::Pred` or `Formula::Eq`.
    pub atom: Formula,
}

impl Literal {
    pub fn to_formula(&self) -> Formula {
        if self.positive {
            self.atom.clone()
        } else {
            Formula::not(self.atom.clone())
        }
    }
}

/// A disjunction of literals. The empty clause denotes falsum.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Clause {
    pub literals: Vec<Literal>,
}

impl Clause {
    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn to_formula(&self) -> Formula {
        Formula::or(self.literals.iter().map(Literal::to_formula).collect())
    }

    /// Reads a quantifier-free disjunction of literals back as a clause.
    pub fn from_formula(f: &Formula) -> Option<Clause> {
        fn lit(f: &Formula) -> Option<Literal> {
            match f {
                Formula::Pred(..) | Formula::Eq(..) => {
                    Some(Literal { positive: true, atom: f.clone() })
                }
                Formula::Not(inner) if matches!(**inner, Formula::Pred(..) | Formula::Eq(..)) => {
                    Some(Literal { positive: false, atom: (**inner).clone() })
                }
                _ => None,
            }
        }
        match f {
            Formula::False => Some(Clause::default()),
            Formula::Or(parts) => {
                let literals = parts.iter().map(lit).collect::<Option<Vec<_>>>()?;
                Some(Clause { literals })
            }
            other => lit(other).map(|l| Clause { literals: vec![l] }),
        }
    }

    pub fn free_vars(&self) -> Vec<String> {
        self.to_formula().free_vars()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SignatureError {
    #[error("symbol {name} used with arities {first} and {second}")]
    ArityConflict { name: String, first: usize, second: usize },
    #[error("symbol {name} used both as a function and as a predicate")]
    KindConflict { name: String },
}

/// Function and predicate symbols, ordered by (kind, name).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: BTreeMap<(SymbolKind, String), usize>,
}

impl Signature {
    pub fn new() -> Self {
        Signature::default()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().map(|((kind, name), arity)| Symbol {
            kind: *kind,
            name: name.clone(),
            arity: *arity,
        })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains_name(&self, name: &str) -> bool {
        self.get(SymbolKind::Function, name).is_some() || self.get(SymbolKind::Predicate, name).is_some()
    }

    pub fn get(&self, kind: SymbolKind, name: &str) -> Option<Symbol> {
        self.symbols
            .get(&(kind, name.to_string()))
            .map(|&arity| Symbol { kind, name: name.to_string(), arity })
    }

    pub fn add(&mut self, sym: Symbol) -> Result<(), SignatureError> {
        let other = match sym.kind {
            SymbolKind::Function => SymbolKind::Predicate,
            SymbolKind::Predicate => SymbolKind::Function,
        };
        if self.symbols.contains_key(&(other, sym.name.clone())) {
            return Err(SignatureError::KindConflict { name: sym.name });
        }
        match self.symbols.get(&(sym.kind, sym.name.clone())) {
            Some(&a) if a != sym.arity => Err(SignatureError::ArityConflict {
                name: sym.name,
                first: a,
                second: sym.arity,
            }),
            Some(_) => Ok(()),
            None => {
                self.symbols.insert((sym.kind, sym.name), sym.arity);
                Ok(())
            }
        }
    }

    pub fn add_term(&mut self, t: &Term) -> Result<(), SignatureError> {
        if let Term::App(f, args) = t {
            self.add(Symbol::function(f.clone(), args.len()))?;
            for a in args {
                self.add_term(a)?;
            }
        }
        Ok(())
    }

    pub fn add_formula(&mut self, f: &Formula) -> Result<(), SignatureError> {
        let mut result = Ok(());
        f.for_each_atom(&mut |a| {
            if result.is_err() {
                return;
            }
            result = match a {
                Formula::Pred(p, args) => self
                    .add(Symbol::predicate(p.clone(), args.len()))
                    .and_then(|_| args.iter().try_for_each(|t| self.add_term(t))),
                Formula::Eq(l, r) => self.add_term(l).and_then(|_| self.add_term(r)),
                _ => Ok(()),
            };
        });
        result
    }

    pub fn merge(&mut self, other: &Signature) -> Result<(), SignatureError> {
        other.symbols().try_for_each(|s| self.add(s))
    }

    /// Function symbols in `self` that are absent from `other`.
    pub fn functions_not_in(&self, other: &Signature) -> Vec<Symbol> {
        self.symbols()
            .filter(|s| s.kind == SymbolKind::Function && other.get(s.kind, &s.name).is_none())
            .collect()
    }
}

/// Records every function and predicate occurrence with its arity.
pub fn collect_signature<'a>(
    formulas: impl IntoIterator<Item = &'a Formula>,
) -> Result<Signature, SignatureError> {
    let mut sig = Signature::new();
    for f in formulas {
        sig.add_formula(f)?;
    }
    Ok(sig)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::App(name, args) => {
                write!(f, "{}", crate::tptp::quote_atom(name))?;
                if !args.is_empty() {
                    write!(f, "(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{a}")?;
                    }
                    write!(f, ")")?;
                }
                Ok(())
            }
        }
    }
}

/// TPTP concrete syntax.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::tptp::write_formula(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(n: &str) -> Term {
        Term::var(n)
    }
    fn c(n: &str) -> Term {
        Term::constant(n)
    }
    fn p(name: &str, args: Vec<Term>) -> Formula {
        Formula::pred(name, args)
    }

    #[test]
    fn free_vars_examples() {
        assert!(p("p", vec![c("c")]).free_vars().is_empty());
        let f = Formula::or(vec![
            Formula::not(p("l", vec![v("X")])),
            Formula::not(p("d", vec![v("Y")])),
        ]);
        assert_eq!(f.free_vars(), vec!["X", "Y"]);
        let g = Formula::forall("X", p("p", vec![v("X"), v("Y")]));
        assert_eq!(g.free_vars(), vec!["Y"]);
    }

    #[test]
    fn closure_and_strip() {
        let f = Formula::or(vec![Formula::not(p("l", vec![v("X")])), p("d", vec![v("X")])]);
        let closed = f.universal_closure();
        assert_eq!(closed, Formula::forall("X", f.clone()));
        let ground = p("p", vec![c("c")]);
        assert_eq!(ground.universal_closure(), ground);
        let q = p("q", vec![v("X"), v("Y")]);
        assert_eq!(
            q.universal_closure(),
            Formula::forall("X", Formula::forall("Y", q.clone()))
        );

        let (vars, m) = Formula::forall("X", Formula::exists("Y", p("p", vec![v("X"), v("Y")])))
            .strip_universal_prefix();
        assert_eq!(vars, vec!["X"]);
        assert!(matches!(m, Formula::Exists(..)));
        assert_eq!(ground.strip_universal_prefix(), (vec![], ground.clone()));
    }

    #[test]
    fn substitution_examples() {
        let f = Formula::or(vec![
            Formula::not(p("l", vec![v("X")])),
            Formula::not(p("d", vec![v("X")])),
            Formula::not(p("d", vec![v("Y")])),
        ]);
        let s: Substitution = [("X".into(), v("x")), ("Y".into(), v("x"))].into_iter().collect();
        let expect = Formula::or(vec![
            Formula::not(p("l", vec![v("x")])),
            Formula::not(p("d", vec![v("x")])),
            Formula::not(p("d", vec![v("x")])),
        ]);
        assert_eq!(f.apply(&s), expect);
        assert_eq!(f.apply(&Substitution::new()), f);

        let g = Formula::forall("Y", p("p", vec![v("Y"), v("Y")]));
        let s: Substitution = [("Y".into(), c("c"))].into_iter().collect();
        assert_eq!(g.apply(&s), g);
    }

    #[test]
    fn substitution_avoids_capture() {
        // (![Y]: p(X,Y))[X := Y] must not capture the substituted Y.
        let g = Formula::forall("Y", p("p", vec![v("X"), v("Y")]));
        let s: Substitution = [("X".into(), v("Y"))].into_iter().collect();
        let out = g.apply(&s);
        match &out {
            Formula::Forall(b, body) => {
                assert_ne!(b, "Y");
                assert_eq!(**body, p("p", vec![v("Y"), v(b)]));
            }
            other => panic!("unexpected {other:?}"),
        }
        assert_eq!(out.free_vars(), vec!["Y"]);
    }

    #[test]
    fn alpha_examples() {
        let a = Formula::forall("X", p("p", vec![v("X")]));
        let b = Formula::forall("Y", p("p", vec![v("Y")]));
        assert!(a.alpha_equivalent(&b));
        assert!(!a.alpha_equivalent(&Formula::forall("X", p("q", vec![v("X")]))));
        let r1 = Formula::forall("X", Formula::forall("Y", p("r", vec![v("X"), v("Y")])));
        let r2 = Formula::forall("Y", Formula::forall("X", p("r", vec![v("Y"), v("X")])));
        assert!(r1.alpha_equivalent(&r2));
        // free variables are not renamed
        assert!(!p("p", vec![v("X")]).alpha_equivalent(&p("p", vec![v("Y")])));
    }

    #[test]
    fn alpha_respects_shadowing() {
        let a = Formula::forall("X", Formula::exists("X", p("p", vec![v("X")])));
        let b = Formula::forall("Y", Formula::exists("Z", p("p", vec![v("Z")])));
        let c2 = Formula::forall("Y", Formula::exists("Z", p("p", vec![v("Y")])));
        assert!(a.alpha_equivalent(&b));
        assert!(!a.alpha_equivalent(&c2));
    }

    #[test]
    fn signature_examples() {
        let sig = collect_signature(&[]).unwrap();
        assert!(sig.is_empty());
        let fs = [
            p("p", vec![Term::app("f", vec![c("c")])]),
            p("p", vec![Term::app("f", vec![c("c"), c("c")])]),
        ];
        assert!(matches!(
            collect_signature(&fs),
            Err(SignatureError::ArityConflict { ref name, .. }) if name == "f"
        ));
        let fs = [p("p", vec![c("c")]), p("c", vec![])];
        assert!(matches!(collect_signature(&fs), Err(SignatureError::KindConflict { .. })));
    }

    #[test]
    fn clause_roundtrip() {
        let f = Formula::or(vec![
            p("p", vec![v("X")]),
            Formula::not(Formula::eq(v("X"), c("a"))),
        ]);
        let cl = Clause::from_formula(&f).unwrap();
        assert_eq!(cl.literals.len(), 2);
        assert_eq!(cl.to_formula(), f);
        assert!(Clause::from_formula(&Formula::False).unwrap().is_empty());
        assert!(Clause::from_formula(&Formula::and(vec![p("p", vec![]), p("q", vec![])])).is_none());
    }
}
