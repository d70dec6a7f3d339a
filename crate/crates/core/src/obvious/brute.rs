//! Exhaustive finite-model entailment, used as a test oracle.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::fol::{Formula, Term};

/// Largest number of interpretations `brute_force_entails` will enumerate.
pub const INTERPRETATION_CAP: u128 = 1 << 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("signature needs {needed} interpretations at domain size {domain}, cap is {cap}")]
    SignatureTooLarge { domain: usize, needed: u128, cap: u128 },
    #[error("domain size must be between 1 and 4, got {0}")]
    BadDomain(usize),
}

struct Interp {
    domain: usize,
    // symbol -> (arity, offset into digits)
    funcs: BTreeMap<String, (usize, usize)>,
    preds: BTreeMap<String, (usize, usize)>,
    digits: Vec<usize>,
}

impl Interp {
    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.domain + a)
    }

    fn term(&self, t: &Term, env: &BTreeMap<&str, usize>) -> usize {
        match t {
            Term::Var(v) => env[v.as_str()],
            Term::App(f, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                let (_, off) = self.funcs[f];
                self.digits[off + self.index(&vals)]
            }
        }
    }

    fn eval<'a>(&self, f: &'a Formula, env: &mut BTreeMap<&'a str, usize>) -> bool {
        match f {
            Formula::True => true,
            Formula::False => false,
            Formula::Pred(p, args) => {
                let vals: Vec<usize> = args.iter().map(|a| self.term(a, env)).collect();
                let (_, off) = self.preds[p];
                self.digits[off + self.index(&vals)] == 1
            }
            Formula::Eq(l, r) => self.term(l, env) == self.term(r, env),
            Formula::Not(g) => !self.eval(g, env),
            Formula::And(gs) => gs.iter().all(|g| self.eval(g, env)),
            Formula::Or(gs) => gs.iter().any(|g| self.eval(g, env)),
            Formula::Implies(a, b) => !self.eval(a, env) || self.eval(b, env),
            Formula::Iff(a, b) => self.eval(a, env) == self.eval(b, env),
            Formula::Forall(v, b) | Formula::Exists(v, b) => {
                let universal = matches!(f, Formula::Forall(..));
                let saved = env.get(v.as_str()).copied();
                let mut result = universal;
                for d in 0..self.domain {
                    env.insert(v.as_str(), d);
                    if self.eval(b, env) != universal {
                        result = !universal;
                        break;
                    }
                }
                match saved {
                    Some(s) => env.insert(v.as_str(), s),
                    None => env.remove(v.as_str()),
                };
                result
            }
        }
    }
}

fn collect(f: &Formula, funcs: &mut BTreeMap<String, usize>, preds: &mut BTreeMap<String, usize>) {
    fn term(t: &Term, funcs: &mut BTreeMap<String, usize>) {
        if let Term::App(name, args) = t {
            funcs.insert(name.clone(), args.len());
            args.iter().for_each(|a| term(a, funcs));
        }
    }
    f.for_each_atom(&mut |a| match a {
        Formula::Pred(p, args) => {
            preds.insert(p.clone(), args.len());
            args.iter().for_each(|t| term(t, funcs));
        }
        Formula::Eq(l, r) => {
            term(l, funcs);
            term(r, funcs);
        }
        _ => {}
    });
}

/// True iff every interpretation over `domain` elements satisfying the
/// (universally closed) premises satisfies the closed conclusion.
pub fn brute_force_entails(premises: &[Formula], conclusion: &Formula, domain: usize) -> Result<bool, BruteForceError> {
    if !(1..=4).contains(&domain) {
        return Err(BruteForceError::BadDomain(domain));
    }
    let premises: Vec<Formula> = premises.iter().map(Formula::universal_closure).collect();
    let conclusion = conclusion.universal_closure();
    let (mut fs, mut ps) = (BTreeMap::new(), BTreeMap::new());
    premises.iter().chain(std::iter::once(&conclusion)).for_each(|f| collect(f, &mut fs, &mut ps));

    let mut radices = Vec::new();
    let mut interp = Interp { domain, funcs: BTreeMap::new(), preds: BTreeMap::new(), digits: Vec::new() };
    let mut needed: u128 = 1;
    for (name, &arity) in &fs {
        let cells = domain.pow(arity as u32);
        interp.funcs.insert(name.clone(), (arity, radices.len()));
        radices.extend(std::iter::repeat_n(domain, cells));
        needed = needed.saturating_mul((domain as u128).saturating_pow(cells as u32));
    }
    for (name, &arity) in &ps {
        let cells = domain.pow(arity as u32);
        interp.preds.insert(name.clone(), (arity, radices.len()));
        radices.extend(std::iter::repeat_n(2, cells));
        needed = needed.saturating_mul(1u128 << cells.min(127));
    }
    if needed > INTERPRETATION_CAP {
        return Err(BruteForceError::SignatureTooLarge { domain, needed, cap: INTERPRETATION_CAP });
    }
    interp.digits = vec![0; radices.len()];
    loop {
        let mut env = BTreeMap::new();
        if premises.iter().all(|p| interp.eval(p, &mut env)) && !interp.eval(&conclusion, &mut env) {
            return Ok(false);
        }
        // odometer step
        let mut i = 0;
        loop {
            if i == radices.len() {
                return Ok(true);
            }
            interp.digits[i] += 1;
            if interp.digits[i] < radices[i] {
                break;
            }
            interp.digits[i] = 0;
            i += 1;
        }
    }
}
