#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use tptp_mizar::tptp::{InferenceRecord, Language};
use tptp_mizar::{AnnotatedFormula, Clause, Formula, Literal, Role, Source, Substitution, Term};

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

pub const DERIVATIONS: [&str; 4] = ["PUZ001+1.tstp", "unused_branch.tstp", "bindings.tstp", "two_skolem.tstp"];

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Random formulas over a small fixed signature.
pub struct FormulaGen {
    pub preds: Vec<(&'static str, usize)>,
    pub consts: Vec<&'static str>,
    pub funcs: Vec<(&'static str, usize)>,
    pub equality: bool,
}

impl FormulaGen {
    /// Signature used by the soundness queries: one binary and two unary
    /// predicates, two constants, no functions.
    pub fn small() -> Self {
        FormulaGen { preds: vec![("r", 2), ("p", 1), ("q", 1)], consts: vec!["a", "b"], funcs: vec![], equality: true }
    }

    /// Wider signature for the parser fuzz, including names that need quoting.
    pub fn wide() -> Self {
        FormulaGen {
            preds: vec![("p", 0), ("q", 1), ("r", 2), ("'Big Pred'", 1), ("s_1", 3)],
            consts: vec!["a", "b", "'x y'", "c_0"],
            funcs: vec![("f", 1), ("g", 2), ("'odd fun'", 1)],
            equality: true,
        }
    }

    fn name(s: &str) -> String {
        s.trim_matches('\'').to_string()
    }

    pub fn term(&self, r: &mut StdRng, vars: &[String], depth: usize) -> Term {
        let roll = r.gen_range(0..10);
        if !vars.is_empty() && roll < 4 {
            return Term::var(vars.choose(r).unwrap().clone());
        }
        if depth > 0 && !self.funcs.is_empty() && roll >= 7 {
            let (f, n) = *self.funcs.choose(r).unwrap();
            return Term::app(Self::name(f), (0..n).map(|_| self.term(r, vars, depth - 1)).collect());
        }
        Term::constant(Self::name(self.consts.choose(r).unwrap()))
    }

    pub fn atom(&self, r: &mut StdRng, vars: &[String]) -> Formula {
        if self.equality && r.gen_ratio(1, 6) {
            return Formula::eq(self.term(r, vars, 1), self.term(r, vars, 1));
        }
        let (p, n) = *self.preds.choose(r).unwrap();
        Formula::pred(Self::name(p), (0..n).map(|_| self.term(r, vars, 1)).collect())
    }

    pub fn literal(&self, r: &mut StdRng, vars: &[String]) -> Formula {
        let a = self.atom(r, vars);
        if r.gen_bool(0.5) {
            Formula::not(a)
        } else {
            a
        }
    }

    /// Formula whose variables come from `pool`; quantifiers bind fresh
    /// members of it.
    pub fn formula(&self, r: &mut StdRng, vars: &mut Vec<String>, pool: &[&str], depth: usize) -> Formula {
        if depth == 0 {
            return self.literal(r, vars);
        }
        match r.gen_range(0..8) {
            0 | 1 => self.literal(r, vars),
            2 => Formula::not(self.formula(r, vars, pool, depth - 1)),
            3 => Formula::and(vec![self.formula(r, vars, pool, depth - 1), self.formula(r, vars, pool, depth - 1)]),
            4 => Formula::or(vec![self.formula(r, vars, pool, depth - 1), self.formula(r, vars, pool, depth - 1)]),
            5 => Formula::implies(self.formula(r, vars, pool, depth - 1), self.formula(r, vars, pool, depth - 1)),
            6 => Formula::iff(self.formula(r, vars, pool, depth - 1), self.formula(r, vars, pool, depth - 1)),
            _ => {
                let free: Vec<&&str> = pool.iter().filter(|v| !vars.iter().any(|x| x == **v)).collect();
                let Some(v) = free.choose(r).map(|v| v.to_string()) else {
                    return self.literal(r, vars);
                };
                vars.push(v.clone());
                let body = self.formula(r, vars, pool, depth - 1);
                vars.pop();
                if r.gen_bool(0.5) {
                    Formula::forall(v, body)
                } else {
                    Formula::exists(v, body)
                }
            }
        }
    }

    /// Closed formula over at most the variables in `pool`.
    pub fn closed(&self, r: &mut StdRng, pool: &[&str], depth: usize) -> Formula {
        self.formula(r, &mut Vec::new(), pool, depth).universal_closure()
    }

    pub fn clause(&self, r: &mut StdRng, vars: &[String]) -> Clause {
        let n = r.gen_range(0..4);
        let literals = (0..n)
            .map(|_| Literal { positive: r.gen_bool(0.5), atom: self.atom(r, vars) })
            .collect();
        Clause { literals }
    }
}

/// Random unit lists exercising every annotation shape the serializer
/// writes.
pub fn random_units(r: &mut StdRng) -> Vec<AnnotatedFormula> {
    let g = FormulaGen::wide();
    let roles = [Role::Axiom, Role::Hypothesis, Role::Conjecture, Role::NegatedConjecture, Role::Plain, Role::Lemma];
    let n = r.gen_range(1..6);
    let mut out: Vec<AnnotatedFormula> = Vec::new();
    for i in 0..n {
        let name = if r.gen_ratio(1, 5) { format!("'unit {i}'") } else { format!("u{i}") };
        let name = name.trim_matches('\'').to_string();
        let source = match r.gen_range(0..3) {
            0 if i > 0 => {
                let parents: Vec<String> = out.iter().map(|u| u.name.clone()).filter(|_| r.gen_bool(0.6)).collect();
                let mut rec = InferenceRecord::new(["spm", "rw", "split_conjunct", "sr"].choose(r).unwrap().to_string(), parents.clone());
                rec.status = Some("thm".into());
                if let Some(p) = parents.first().filter(|_| r.gen_bool(0.3)) {
                    let mut s = Substitution::new();
                    s.insert("X".into(), g.term(r, &[], 2));
                    rec.bindings.push((p.clone(), s));
                }
                Source::Inference(rec)
            }
            1 => Source::Unknown,
            _ => Source::File { file: "fuzz.p".into(), name: r.gen_bool(0.7).then(|| name.clone()) },
        };
        let role = *roles.choose(r).unwrap();
        let unit = if r.gen_bool(0.6) {
            AnnotatedFormula::fof(name, role, g.closed(r, &["X", "Y", "Z"], 4), source)
        } else {
            let vars = vec!["X".to_string(), "Y".to_string()];
            AnnotatedFormula::cnf(name, role, g.clause(r, &vars), source)
        };
        debug_assert!(matches!(unit.language, Language::Fof | Language::Cnf));
        out.push(unit);
    }
    out
}

/// A random refutation along a chain of unary implications
/// `P0(t), P0 ⇒ P1, ..., P(k-1) ⇒ Pk ⊢ Pk(t)`. Some links are first composed
/// at clause level, which needs a sub-proof; some derivations carry an
/// unused side branch.
pub fn random_derivation(r: &mut StdRng) -> String {
    let mut preds: Vec<String> = (0..7).map(|i| format!("p{i}")).collect();
    preds.shuffle(r);
    let k = r.gen_range(2..7);
    let t = ["a", "b", "c"].choose(r).unwrap();
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    if r.gen_bool(0.4) {
        line(format!("fof(ax0, axiom, {}({t}) & side({t}), file('chain.p', ax0)).", preds[0]));
        line(format!("cnf(f0, plain, {}({t}), inference(split_conjunct,[status(thm)],[ax0])).", preds[0]));
    } else {
        line(format!("fof(ax0, axiom, {}({t}), file('chain.p', ax0)).", preds[0]));
        line(format!("fof(f0, plain, {}({t}), inference(fof_simplification,[status(thm)],[ax0])).", preds[0]));
    }
    for i in 1..=k {
        line(format!("fof(ax{i}, axiom, ![X]:({}(X)=>{}(X)), file('chain.p', ax{i})).", preds[i - 1], preds[i]));
        line(format!(
            "cnf(cl{i}, plain, ~{}(X1)|{}(X1), inference(split_conjunct,[status(thm)],[inference(fof_nnf,[status(thm)],[ax{i}])])).",
            preds[i - 1], preds[i]
        ));
    }
    line(format!("fof(c, conjecture, {}({t}), file('chain.p', c)).", preds[k]));
    line("fof(n, negated_conjecture, ~".to_string() + &format!("{}({t}), inference(assume_negation,[status(cth)],[c])).", preds[k]));
    line(format!("cnf(n2, negated_conjecture, ~{}({t}), inference(fof_simplification,[status(thm)],[n])).", preds[k]));
    if r.gen_bool(0.3) {
        line("fof(noise, axiom, ![X]:(q(X)|~q(X)), file('chain.p', noise)).".into());
        line("cnf(nz, plain, q(X1)|~q(X1), inference(split_conjunct,[status(thm)],[noise])).".into());
    }
    let mut i = 1;
    let mut last = "f0".to_string();
    while i <= k {
        if i < k && r.gen_bool(0.35) {
            line(format!(
                "cnf(m{i}, plain, ~{}(X1)|{}(X1), inference(resolution,[status(thm)],[cl{i}, cl{}])).",
                preds[i - 1],
                preds[i + 1],
                i + 1
            ));
            line(format!("cnf(f{}, plain, {}({t}), inference(spm,[status(thm)],[m{i}, {last}])).", i + 1, preds[i + 1]));
            last = format!("f{}", i + 1);
            i += 2;
        } else {
            line(format!("cnf(f{i}, plain, {}({t}), inference(spm,[status(thm)],[cl{i}, {last}])).", preds[i]));
            last = format!("f{i}");
            i += 1;
        }
    }
    line(format!("cnf(bot, plain, $false, inference(sr,[status(thm)],[{last}, n2]))."));
    out
}
