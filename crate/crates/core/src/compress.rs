//! Fixed-point compression: delete derived steps by inlining their
//! references into the steps that cite them, as long as every changed step
//! stays obvious.

use std::collections::BTreeMap;

use crate::fol::Formula;
use crate::mizar::{ArticleModel, EnvironmentManifest, Item, Justification, Ref, Scope};
use crate::obvious::DEFAULT_BUDGET;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompressOptions {
    pub budget: usize,
    pub max_passes: Option<usize>,
}

impl Default for CompressOptions {
    fn default() -> Self {
        CompressOptions { budget: DEFAULT_BUDGET, max_passes: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CompressionReport {
    pub passes: usize,
    pub steps_before: usize,
    pub steps_after: usize,
    /// Labels as they were in the input article.
    pub removed_labels: Vec<String>,
    /// Sub-proofs replaced by a plain `by`.
    pub collapsed: usize,
    /// Changes accepted in each pass.
    pub per_pass: Vec<usize>,
}

impl CompressionReport {
    pub fn summary(&self) -> String {
        format!(
            "compressed {} -> {} steps in {} passes ({} removed, {} sub-proofs collapsed)",
            self.steps_before,
            self.steps_after,
            self.passes,
            self.removed_labels.len(),
            self.collapsed
        )
    }
}

/// Replaces `old` by `new` in place, dropping duplicates.
fn splice(refs: &[Ref], old: &Ref, new: &[Ref]) -> Vec<Ref> {
    let mut out: Vec<Ref> = Vec::new();
    for r in refs {
        let parts: &[Ref] = if r == old { new } else { std::slice::from_ref(r) };
        for p in parts {
            if !out.contains(p) {
                out.push(p.clone());
            }
        }
    }
    out
}

fn cites(item: &Item, r: &Ref) -> bool {
    match &item.justification {
        Justification::By(refs) => refs.contains(r),
        Justification::Proof(p) => p.outer_refs().contains(r),
    }
}

fn inline(item: &Item, old: &Ref, new: &[Ref]) -> Item {
    let mut out = item.clone();
    match &mut out.justification {
        Justification::By(refs) => *refs = splice(refs, old, new),
        Justification::Proof(p) => {
            for i in &mut p.instances {
                i.refs = splice(&i.refs, old, new);
            }
            p.thesis_refs = splice(&p.thesis_refs, old, new);
        }
    }
    out
}

struct Compressor<'a> {
    scope: Scope<'a>,
    budget: usize,
}

impl Compressor<'_> {
    fn ok(&self, item: &Item) -> bool {
        self.scope.justified(item, self.budget).is_ok()
    }

    fn contradiction_ok(&self, refs: &[Ref]) -> bool {
        matches!(self.scope.by(refs, &BTreeMap::new(), &Formula::False, &[], self.budget), Ok(true))
    }

    /// One pass over the candidates, last first. Returns the number of
    /// accepted changes.
    fn pass(&self, a: &mut ArticleModel, report: &mut CompressionReport) -> usize {
        let mut changes = 0;
        // sub-proofs that no longer need instances
        let block_items = a.theorem.as_mut().and_then(|t| t.proof.as_mut()).map(|b| &mut b.inner_steps);
        for item in a.lemma_items.iter_mut().chain(block_items.into_iter().flatten()) {
            if let Justification::Proof(p) = &item.justification {
                let direct = Item { justification: Justification::By(p.outer_refs()), ..item.clone() };
                if self.ok(&direct) {
                    *item = direct;
                    report.collapsed += 1;
                    changes += 1;
                }
            }
        }

        let n_lemmas = a.lemma_items.len();
        let n_inner = a.theorem.as_ref().and_then(|t| t.proof.as_ref()).map_or(0, |b| b.inner_steps.len());
        // positions: lemmas then inner steps, scanned backwards
        for pos in (0..n_lemmas + n_inner).rev() {
            let (lemmas, block) = (&mut a.lemma_items, a.theorem.as_mut().and_then(|t| t.proof.as_mut()));
            let Some(block) = block else {
                // without a proof block there is nothing to compress into
                break;
            };
            let cand = if pos < lemmas.len() {
                &lemmas[pos]
            } else {
                match block.inner_steps.get(pos - lemmas.len()) {
                    Some(c) => c,
                    None => continue,
                }
            };
            let old = Ref::Label(cand.label.clone());
            let new = cand.justification.refs();
            let users_lemmas: Vec<usize> = (0..lemmas.len()).filter(|&i| cites(&lemmas[i], &old)).collect();
            let users_inner: Vec<usize> =
                (0..block.inner_steps.len()).filter(|&i| cites(&block.inner_steps[i], &old)).collect();
            let final_user = block.contradiction_refs.contains(&old);
            if users_lemmas.is_empty() && users_inner.is_empty() && !final_user {
                continue;
            }
            let new_lemmas: Vec<Item> = users_lemmas.iter().map(|&i| inline(&lemmas[i], &old, &new)).collect();
            let new_inner: Vec<Item> = users_inner.iter().map(|&i| inline(&block.inner_steps[i], &old, &new)).collect();
            let new_final = splice(&block.contradiction_refs, &old, &new);
            let accepted = new_lemmas.iter().chain(&new_inner).all(|i| self.ok(i))
                && (!final_user || self.contradiction_ok(&new_final));
            if !accepted {
                continue;
            }
            for (i, it) in users_lemmas.into_iter().zip(new_lemmas) {
                lemmas[i] = it;
            }
            for (i, it) in users_inner.into_iter().zip(new_inner) {
                block.inner_steps[i] = it;
            }
            block.contradiction_refs = new_final;
            let Ref::Label(label) = old else { unreachable!() };
            if pos < lemmas.len() {
                lemmas.remove(pos);
            } else {
                block.inner_steps.remove(pos - lemmas.len());
            }
            report.removed_labels.push(label);
            changes += 1;
        }
        changes
    }
}

/// Compresses `a` until a pass changes nothing (or `max_passes` is hit).
/// Survivors keep their formulas; labels are renumbered densely at the end.
pub fn compress(a: &ArticleModel, m: &EnvironmentManifest, opts: &CompressOptions) -> (ArticleModel, CompressionReport) {
    let mut out = a.clone();
    let mut report = CompressionReport { steps_before: a.step_count(), ..Default::default() };
    let mut global = BTreeMap::new();
    for i in out.axiom_items.iter().chain(&out.lemma_items) {
        global.insert(i.label.clone(), i.formula.clone());
    }
    if let Some(b) = out.theorem.as_ref().and_then(|t| t.proof.as_ref()) {
        global.insert(b.assumption_label.clone(), b.assumption.clone());
        for i in &b.inner_steps {
            global.insert(i.label.clone(), i.formula.clone());
        }
    }
    let c = Compressor { scope: Scope { manifest: m, global }, budget: opts.budget };
    loop {
        report.passes += 1;
        let changes = c.pass(&mut out, &mut report);
        report.per_pass.push(changes);
        if changes == 0 || opts.max_passes.is_some_and(|k| report.passes >= k) {
            break;
        }
    }
    out.relabel();
    out.reservations = crate::mizar::reservations(&out);
    report.steps_after = out.step_count();
    (out, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivation::build_graph;
    use crate::mizar::{build_article, check_article, BuildOptions};
    use crate::tptp::{parse_derivation, parse_formula};

    fn article(text: &str) -> (ArticleModel, EnvironmentManifest) {
        let g = build_graph(parse_derivation(text).unwrap()).unwrap();
        build_article(&g, &BuildOptions::default()).unwrap()
    }

    const CHAIN: &str = "fof(a, axiom, p & q, file('t.p', a)).
fof(c, conjecture, p, file('t.p', c)).
fof(n, negated_conjecture, ~p, inference(assume_negation,[status(cth)],[c])).
fof(s1, plain, p, inference(split_conjunct,[status(thm)],[a])).
fof(s2, plain, p, inference(variable_rename,[status(thm)],[s1])).
fof(f, plain, $false, inference(cn,[status(thm)],[s2, n])).";

    #[test]
    fn chain_collapses_to_one_step() {
        let (a, m) = article(CHAIN);
        assert_eq!(a.lemma_items.len(), 2);
        let (b, r) = compress(&a, &m, &CompressOptions::default());
        assert!(b.lemma_items.is_empty());
        let block = b.theorem.as_ref().unwrap().proof.as_ref().unwrap();
        assert_eq!(block.contradiction_refs, vec![Ref::Label("Ax1".into()), Ref::Label("S1".into())]);
        assert_eq!(r.removed_labels, vec!["S2", "S1"]);
        assert_eq!((r.steps_before, r.steps_after), (3, 1));
        assert!(check_article(&b, &m, DEFAULT_BUDGET).is_empty());
    }

    #[test]
    fn fixed_point_is_idempotent() {
        let (a, m) = article(CHAIN);
        let (b, _) = compress(&a, &m, &CompressOptions::default());
        let (c, r) = compress(&b, &m, &CompressOptions::default());
        assert_eq!(b, c);
        assert_eq!(r.passes, 1);
        assert!(r.removed_labels.is_empty());
    }

    #[test]
    fn max_passes_stops_early() {
        let (a, m) = article(CHAIN);
        let (_, r) = compress(&a, &m, &CompressOptions { max_passes: Some(1), ..Default::default() });
        assert_eq!(r.passes, 1);
    }

    #[test]
    fn non_obvious_inlining_is_rejected() {
        // p(X) => q(X) and p(a) together give q(a); q(a) => r gives r, but
        // r from the two implications and p(a) needs two instances
        let (a, m) = article(
            "fof(a1, axiom, ![X]:(p(X)=>q(X)), file('t.p', a1)).
fof(a2, axiom, ![X]:(q(X)=>r(X)), file('t.p', a2)).
fof(a3, axiom, p(a), file('t.p', a3)).
fof(c, conjecture, r(a), file('t.p', c)).
fof(n, negated_conjecture, ~r(a), inference(assume_negation,[status(cth)],[c])).
fof(s1, plain, q(a), inference(mp,[status(thm)],[a1, a3])).
fof(f, plain, $false, inference(mp,[status(thm)],[a2, s1, n])).",
        );
        let (b, r) = compress(&a, &m, &CompressOptions::default());
        assert_eq!(b.lemma_items.len(), 1);
        assert_eq!(b.lemma_items[0].formula, parse_formula("q(a)").unwrap());
        assert!(r.removed_labels.is_empty());
    }
}
