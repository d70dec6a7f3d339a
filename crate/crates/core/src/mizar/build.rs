use std::collections::{BTreeMap, BTreeSet};

use super::{ArticleError, ArticleModel, DiffuseBlock, EnvironmentManifest, InstanceItem, Item, Justification, Ref, SubProof, Theorem};
use crate::derivation::{DerivationGraph, StepClass};
use crate::error::Error;
use crate::expand::{expand_inference, substitution_from_inference_record, ExpandError, Expansion};
use crate::fol::{collect_signature, Formula, Substitution};
use crate::obvious::DEFAULT_BUDGET;
use crate::skolem::justify_skolem_steps;
use crate::tptp::{AnnotatedFormula, Role, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    pub budget: usize,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { budget: DEFAULT_BUDGET }
    }
}

const ASSUMPTION: &str = "#assume";

/// The statement form of a formula: universal prefix of its closure
/// dropped, variables free.
fn statement(f: &Formula) -> Formula {
    f.universal_closure().strip_universal_prefix().1
}

/// Renames variables to `X1, X2, ...`: free ones first, then bound ones,
/// each in order of first occurrence. `map` may already hold names.
fn canonical_with(f: &Formula, map: &mut BTreeMap<String, String>) -> Formula {
    for v in f.free_vars().into_iter().chain(f.all_vars()) {
        if !map.contains_key(&v) {
            let n = map.len() + 1;
            map.insert(v, format!("X{n}"));
        }
    }
    f.rename_vars(map)
}

fn canonical(f: &Formula) -> (Formula, BTreeMap<String, String>) {
    let mut map = BTreeMap::new();
    let g = canonical_with(f, &mut map);
    (g, map)
}

fn var_names(map: &BTreeMap<String, String>) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = map.iter().map(|(old, new)| (new.clone(), old.clone())).collect();
    v.sort_by_key(|(new, _)| new[1..].parse::<usize>().unwrap_or(0));
    v
}

fn item(label: String, f: &Formula, justification: Justification, origin: &str) -> Item {
    let (formula, map) = canonical(&statement(f));
    Item { label, formula, justification, origin: Some(origin.to_string()), var_names: var_names(&map) }
}

pub(crate) fn reservations(a: &ArticleModel) -> Vec<String> {
    let mut vars = BTreeSet::new();
    let mut add = |f: &Formula| vars.extend(f.all_vars());
    let items = a.axiom_items.iter().chain(&a.lemma_items);
    let block = a.theorem.as_ref().and_then(|t| t.proof.as_ref());
    for i in items.chain(block.iter().flat_map(|b| b.inner_steps.iter())) {
        add(&i.formula);
        if let Justification::Proof(p) = &i.justification {
            p.instances.iter().for_each(|x| add(&x.formula));
        }
    }
    if let Some(t) = &a.theorem {
        add(&t.formula);
    }
    if let Some(b) = block {
        add(&b.assumption);
    }
    let mut out: Vec<String> = vars.into_iter().collect();
    out.sort_by_key(|v| (v.trim_start_matches('X').parse::<usize>().unwrap_or(usize::MAX), v.clone()));
    out
}

fn signature(a: &ArticleModel, m: &EnvironmentManifest) -> Result<Vec<crate::fol::Symbol>, ArticleError> {
    let mut fs: Vec<&Formula> = Vec::new();
    let block = a.theorem.as_ref().and_then(|t| t.proof.as_ref());
    for i in a.axiom_items.iter().chain(&a.lemma_items).chain(block.iter().flat_map(|b| b.inner_steps.iter())) {
        fs.push(&i.formula);
        if let Justification::Proof(p) = &i.justification {
            fs.extend(p.instances.iter().map(|x| &x.formula));
        }
    }
    fs.extend(a.theorem.iter().map(|t| &t.formula));
    fs.extend(block.map(|b| &b.assumption));
    fs.extend(m.axioms.iter().chain(&m.skolem_defs).map(|(_, f)| f));
    Ok(collect_signature(fs)?.symbols().collect())
}

/// Article for a derivation: file-sourced premises become axioms,
/// conjecture-independent steps become lemmas, and the rest goes into the
/// diffuse block refuting the negated conjecture.
pub fn build_article(g: &DerivationGraph, opts: &BuildOptions) -> Result<(ArticleModel, EnvironmentManifest), Error> {
    let order = g.topological_order();
    let class: BTreeMap<&str, StepClass> = order.iter().map(|&n| (n, g.classify_step(n))).collect();

    let conj = match g.designated_conjecture() {
        Some(u) => u,
        None => {
            let cs: Vec<&str> = order.iter().copied().filter(|n| class[n] == StepClass::Conjecture).collect();
            match cs.as_slice() {
                [] => return Err(ArticleError::NoConjecture.into()),
                [c] => g.node(c).unwrap(),
                _ => return Err(ArticleError::MultipleConjectures(cs.iter().map(|s| s.to_string()).collect()).into()),
            }
        }
    };
    let sink = g.sink().ok_or(ArticleError::NoRefutation)?;

    // the theorem and the unit standing for its negation
    let closure = conj.formula.universal_closure();
    let (theorem, assumption, mut assumed) = if conj.role == Role::Conjecture {
        let negated = Formula::not(closure.clone());
        let assumed = order.iter().copied().find(|&n| {
            class[n] == StepClass::NegatedConjecture
                && g.parents(n) == [conj.name.as_str()]
                && g.node(n).unwrap().formula.universal_closure().alpha_equivalent(&negated)
        });
        (closure, negated, assumed.map(str::to_string))
    } else {
        let theorem = match &closure {
            Formula::Not(x) => (**x).clone(),
            c => Formula::not(c.clone()),
        };
        (theorem, closure, Some(conj.name.clone()))
    };
    if assumed.as_deref() == Some(conj.name.as_str()) {
        assumed = None;
    }
    let used = g.mark_used();
    for n in &order {
        if class[n] == StepClass::Conjecture && *n != conj.name && used[*n] {
            return Err(ArticleError::MultipleConjectures(vec![conj.name.clone(), n.to_string()]).into());
        }
    }

    // skolem symbols get the names skolem1, skolem2, ...
    let skolems = justify_skolem_steps(g)?;
    let rename: BTreeMap<String, String> =
        skolems.iter().map(|s| (s.skolem_symbol.name.clone(), format!("skolem{}", s.number))).collect();
    let mut taken = BTreeSet::new();
    for u in g.units() {
        let sig = collect_signature([&u.formula]).map_err(ArticleError::from)?;
        taken.extend(sig.symbols().map(|s| s.name));
    }
    for new in rename.values() {
        if taken.contains(new) && !rename.contains_key(new) {
            return Err(ArticleError::NameCollision(new.clone()).into());
        }
    }
    let sk = |f: &Formula| f.rename_symbols(&rename);
    let skolem_number: BTreeMap<&str, usize> = skolems.iter().map(|s| (s.step.as_str(), s.number)).collect();

    let dep = g.mark_conjecture_dependence();
    let mut refs: BTreeMap<String, Ref> = BTreeMap::new();
    refs.insert(conj.name.clone(), Ref::Label(ASSUMPTION.into()));
    if let Some(a) = &assumed {
        refs.insert(a.clone(), Ref::Label(ASSUMPTION.into()));
    }
    // parent formulas as the article sees them: the conjecture is only
    // reachable through the assumption
    let parent_formula = |p: &str| -> Formula {
        if p == conj.name {
            assumption.clone()
        } else {
            g.node(p).unwrap().formula.clone()
        }
    };

    let mut manifest = EnvironmentManifest::default();
    let mut article = ArticleModel::default();
    let mut inner: Vec<Item> = Vec::new();
    let mut contradiction_refs = Vec::new();

    for &name in &order {
        if name == conj.name || Some(name) == assumed.as_deref() {
            continue;
        }
        let node = g.node(name).unwrap();
        let c = class[name];
        let parents = g.parents(name);
        if c == StepClass::Conjecture {
            continue;
        }
        if parents.is_empty() {
            let i = manifest.axioms.len() + 1;
            manifest.axioms.push((i, sk(&node.formula.universal_closure())));
            let label = format!("Ax{i}");
            refs.insert(name.to_string(), Ref::Label(label.clone()));
            article.axiom_items.push(item(label, &sk(&node.formula), Justification::By(vec![Ref::Axiom(i)]), name));
            continue;
        }
        let parent_refs: Vec<Ref> = dedup(parents.iter().map(|p| refs[*p].clone()));
        let expansion = if c == StepClass::Skolemization {
            None
        } else {
            let pf: Vec<Formula> = parents.iter().map(|p| parent_formula(p)).collect();
            let bindings = substitution_from_inference_record(node).unwrap_or_default();
            let hints: Vec<Option<Substitution>> =
                parents.iter().map(|p| bindings.iter().find(|(n, _)| n == p).map(|(_, s)| s.clone())).collect();
            let e = expand_inference(&pf, &node.formula, &hints, opts.budget)
                .ok_or_else(|| ExpandError::ExpansionFailed { step: name.to_string() })?;
            Some(e)
        };

        if name == sink {
            match expansion.unwrap() {
                Expansion::Direct => contradiction_refs = parent_refs,
                Expansion::SubProof(sp) => {
                    for inst in &sp.instance_steps {
                        let label = format!("#{name}:{}", inst.label);
                        let by = Justification::By(vec![refs[parents[inst.premise]].clone()]);
                        let mut it = item(label.clone(), &sk(&inst.formula), by, name);
                        it.origin = Some(format!("{name}, instance of {}", parents[inst.premise]));
                        inner.push(it);
                        contradiction_refs.push(Ref::Label(label));
                    }
                    contradiction_refs.extend(sp.direct_parents.iter().map(|&i| refs[parents[i]].clone()));
                }
            }
            continue;
        }

        let justification = match expansion {
            None => {
                let n = skolem_number[name];
                Justification::By(dedup(parent_refs.into_iter().chain([Ref::SkolemDef(n)])))
            }
            Some(Expansion::Direct) => Justification::By(parent_refs),
            Some(Expansion::SubProof(sp)) => {
                // fixed variables keep the names the statement gets
                let (_, mut map) = canonical(&statement(&node.formula));
                let instances = sp
                    .instance_steps
                    .iter()
                    .map(|s| InstanceItem {
                        label: s.label.clone(),
                        formula: canonical_with(&sk(&s.formula), &mut map),
                        refs: vec![refs[parents[s.premise]].clone()],
                    })
                    .collect::<Vec<_>>();
                let mut thesis_refs: Vec<Ref> = instances.iter().map(|i| Ref::Label(i.label.clone())).collect();
                thesis_refs.extend(sp.direct_parents.iter().map(|&i| refs[parents[i]].clone()));
                Justification::Proof(SubProof { instances, thesis_refs })
            }
        };
        let label = format!("#{name}");
        refs.insert(name.to_string(), Ref::Label(label.clone()));
        let it = item(label, &sk(&node.formula), justification, name);
        if dep[name] {
            inner.push(it);
        } else {
            article.lemma_items.push(it);
        }
    }

    manifest.skolem_defs = skolems.iter().map(|s| (s.number, sk(&s.henkin_axiom))).collect();
    let (theorem, _) = canonical(&statement(&theorem));
    let (assumption, _) = canonical(&assumption);
    article.theorem = Some(Theorem {
        formula: theorem,
        proof: Some(DiffuseBlock {
            assumption_label: ASSUMPTION.into(),
            assumption,
            inner_steps: inner,
            contradiction_refs,
        }),
    });
    article.relabel();
    article.reservations = reservations(&article);
    manifest.signature = signature(&article, &manifest)?;
    Ok((article, manifest))
}

fn dedup(refs: impl IntoIterator<Item = Ref>) -> Vec<Ref> {
    let mut out = Vec::new();
    for r in refs {
        if !out.contains(&r) {
            out.push(r);
        }
    }
    out
}

/// Flat article for a problem: every non-conjecture unit is an axiom and
/// the conjecture, if any, a theorem whose proof is pending.
pub fn translate_problem(units: &[AnnotatedFormula]) -> Result<(ArticleModel, EnvironmentManifest), Error> {
    let mut seen = BTreeSet::new();
    for u in units {
        if !seen.insert(u.name.as_str()) {
            return Err(ArticleError::DuplicateName(u.name.clone()).into());
        }
        if matches!(u.source, Source::Inference(_)) {
            return Err(ArticleError::NotAProblem(u.name.clone()).into());
        }
    }
    let conjectures: Vec<&AnnotatedFormula> = units.iter().filter(|u| u.role == Role::Conjecture).collect();
    if conjectures.len() > 1 {
        return Err(ArticleError::MultipleConjectures(conjectures.iter().map(|u| u.name.clone()).collect()).into());
    }
    let mut article = ArticleModel::default();
    let mut manifest = EnvironmentManifest::default();
    for u in units.iter().filter(|u| u.role != Role::Conjecture) {
        let i = manifest.axioms.len() + 1;
        manifest.axioms.push((i, u.formula.universal_closure()));
        article.axiom_items.push(item(format!("Ax{i}"), &u.formula, Justification::By(vec![Ref::Axiom(i)]), &u.name));
    }
    article.theorem =
        conjectures.first().map(|c| Theorem { formula: canonical(&statement(&c.formula)).0, proof: None });
    article.reservations = reservations(&article);
    manifest.signature = signature(&article, &manifest)?;
    Ok((article, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::build_graph;
    use crate::mizar::check_article;
    use crate::tptp::{parse_derivation, parse_formula, parse_problem};

    fn f(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    #[test]
    fn canonical_names_free_variables_first() {
        let (g, map) = canonical(&statement(&f("![X]:?[Y]:~hates(X,Y)")));
        assert_eq!(g, f("?[X2]:~hates(X1,X2)"));
        assert_eq!(var_names(&map), vec![("X1".into(), "X".into()), ("X2".into(), "Y".into())]);
        assert_eq!(canonical(&f("?[X]:(lives(X)&killed(X,agatha))")).0, f("?[X1]:(lives(X1)&killed(X1,agatha))"));
    }

    #[test]
    fn trivial_refutation() {
        let text = "fof(a1, axiom, p, file('t.p', a1)).
fof(c, conjecture, p, file('t.p', c)).
fof(n, negated_conjecture, ~p, inference(assume_negation,[status(cth)],[c])).
fof(f, plain, $false, inference(cn,[status(thm)],[a1, n])).";
        let g = build_graph(parse_derivation(text).unwrap()).unwrap();
        let (a, m) = build_article(&g, &BuildOptions::default()).unwrap();
        assert_eq!(a.axiom_items.len(), 1);
        assert!(a.lemma_items.is_empty());
        let t = a.theorem.as_ref().unwrap();
        assert_eq!(t.formula, f("p"));
        let b = t.proof.as_ref().unwrap();
        assert_eq!(b.assumption_label, "S1");
        assert!(b.inner_steps.is_empty());
        assert_eq!(b.contradiction_refs, vec![Ref::Label("Ax1".into()), Ref::Label("S1".into())]);
        assert!(check_article(&a, &m, DEFAULT_BUDGET).is_empty());
    }

    #[test]
    fn no_conjecture_needs_a_designation() {
        let text = "cnf(a, axiom, p(a), file('t.p', a)).
cnf(b, negated_conjecture, ~p(X), file('t.p', b)).
cnf(f, plain, $false, inference(rw,[status(thm)],[a, b])).";
        let mut g = build_graph(parse_derivation(text).unwrap()).unwrap();
        let e = build_article(&g, &BuildOptions::default()).unwrap_err();
        assert_eq!(e.kind(), "NoConjecture");
        g.designate_conjecture("b").unwrap();
        let (a, m) = build_article(&g, &BuildOptions::default()).unwrap();
        let t = a.theorem.as_ref().unwrap();
        assert_eq!(t.formula, f("~![X1]:~p(X1)"));
        assert_eq!(t.proof.as_ref().unwrap().assumption, f("![X1]:~p(X1)"));
        assert!(check_article(&a, &m, DEFAULT_BUDGET).is_empty());
    }

    #[test]
    fn skolem_symbols_are_renamed_and_cited() {
        let text = "fof(a, axiom, ?[X]:p(X), file('t.p', a)).
fof(c, conjecture, ?[X]:q(X), file('t.p', c)).
fof(ax2, axiom, ![X]:(p(X)=>q(X)), file('t.p', ax2)).
fof(n, negated_conjecture, ~?[X]:q(X), inference(assume_negation,[status(cth)],[c])).
fof(s, plain, p(esk1_0), inference(skolemize,[status(esa)],[a])).
cnf(n2, negated_conjecture, ~q(X), inference(split_conjunct,[status(thm)],[inference(fof_nnf,[status(thm)],[n])])).
cnf(r, plain, ~p(X)|q(X), inference(split_conjunct,[status(thm)],[ax2])).
cnf(f, plain, $false, inference(sr,[status(thm)],[inference(spm,[status(thm)],[r, s]), n2])).";
        let g = build_graph(parse_derivation(text).unwrap()).unwrap();
        let (a, m) = build_article(&g, &BuildOptions::default()).unwrap();
        assert_eq!(a.lemma_items[0].formula, f("p(skolem1)"));
        assert_eq!(
            a.lemma_items[0].justification,
            Justification::By(vec![Ref::Label("Ax1".into()), Ref::SkolemDef(1)])
        );
        assert_eq!(m.skolem_defs, vec![(1, f("(?[X]:p(X)) => p(skolem1)"))]);
        assert!(m.signature.iter().any(|s| s.name == "skolem1" && s.arity == 0));
        assert!(check_article(&a, &m, DEFAULT_BUDGET).is_empty(), "{:?}", check_article(&a, &m, DEFAULT_BUDGET));
    }

    #[test]
    fn skolem_name_collision() {
        let text = "fof(a, axiom, ?[X]:p(X), file('t.p', a)).
fof(b, axiom, p(skolem1), file('t.p', b)).
fof(c, conjecture, q, file('t.p', c)).
fof(n, negated_conjecture, ~q, inference(assume_negation,[status(cth)],[c])).
fof(s, plain, p(esk1_0), inference(skolemize,[status(esa)],[a])).
fof(f, plain, $false, inference(cn,[status(thm)],[s, n])).";
        let g = build_graph(parse_derivation(text).unwrap()).unwrap();
        assert_eq!(build_article(&g, &BuildOptions::default()).unwrap_err().kind(), "NameCollision");
    }

    #[test]
    fn problem_translation() {
        let units = parse_problem("fof(a, axiom, p). cnf(b, axiom, q(X)). fof(c, conjecture, p & q(a)).").unwrap();
        let (a, m) = translate_problem(&units).unwrap();
        assert_eq!(a.axiom_items.len(), 2);
        assert_eq!(a.axiom_items[1].formula, f("q(X1)"));
        assert_eq!(a.theorem.as_ref().unwrap().proof, None);
        assert_eq!(m.axioms[1], (2, f("![X]:q(X)")));
        let units = parse_problem("fof(a, axiom, p). fof(a, axiom, q).").unwrap();
        assert_eq!(translate_problem(&units).unwrap_err().kind(), "DuplicateName");
        let (a, _) = translate_problem(&parse_problem("fof(a, axiom, p).").unwrap()).unwrap();
        assert!(a.theorem.is_none());
    }
}
