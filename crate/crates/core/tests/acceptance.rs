//! Acceptance run: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::mpsc;
use std::time::{Duration, Instant};

use rand::Rng;
use tptp_mizar::compress::{compress, CompressOptions};
use tptp_mizar::derivation::{build_graph, StepClass};
use tptp_mizar::mizar::{check_article, check_referential_integrity, Justification, Ref};
use tptp_mizar::obvious::{brute_force_entails, is_obvious, ObviousnessQuery, DEFAULT_BUDGET};
use tptp_mizar::pipeline::{translate_derivation, TranslateOptions, Translation};
use tptp_mizar::skolem::{make_henkin_axiom, validate_single_skolem};
use tptp_mizar::tptp::TptpReader;
use tptp_mizar::{parse_derivation, parse_formula, parse_problem, serialize, AnnotatedFormula, Formula, Term};

use common::{fixture, random_derivation, random_units, read_fixture, rng, FormulaGen};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn f(s: &str) -> Formula {
    parse_formula(s).unwrap()
}

fn translate(text: &str, opts: &TranslateOptions) -> Result<Translation, String> {
    let units = parse_derivation(text).map_err(|e| e.to_string())?;
    translate_derivation(units, opts).map_err(|e| format!("{}: {e}", e.kind()))
}

fn uncompressed() -> TranslateOptions {
    TranslateOptions { compress: false, ..Default::default() }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let text = read_fixture("PUZ001+1.tstp");
    let t = translate(&text, &TranslateOptions::default())?;
    let article = t.article_text();
    let manifest = t.manifest_text();
    let elapsed = start.elapsed();
    let before = translate(&text, &uncompressed())?;

    let axioms = t.article.axiom_items.len();
    ensure!(axioms == 10, "{axioms} axiom items, expected 10");
    let theorem = t.article.theorem.as_ref().ok_or("no theorem")?;
    ensure!(theorem.formula.alpha_equivalent(&f("killed(agatha,agatha)")), "theorem is {:?}", theorem.formula);
    let skolems: Vec<_> = t.manifest.signature.iter().filter(|s| s.name.starts_with("skolem")).collect();
    let defs = manifest.lines().filter(|l| l.starts_with("skolemdef ")).count();
    ensure!(skolems.len() == 2 && t.manifest.skolem_defs.len() == 2 && defs == 2, "{} skolem symbols, {defs} definitions", skolems.len());

    // conjecture-independent steps are lemmas, dependent ones live in the block
    let g = build_graph(parse_derivation(&text).unwrap()).unwrap().prune_unused();
    let dep = g.mark_conjecture_dependence();
    for a in [&t.article, &before.article] {
        for i in &a.lemma_items {
            let origin = i.origin.as_deref().ok_or("lemma without origin")?;
            ensure!(!dep[origin], "lemma {} ({origin}) depends on the conjecture", i.label);
        }
        let block = a.theorem.as_ref().and_then(|t| t.proof.as_ref()).ok_or("no proof block")?;
        for i in &block.inner_steps {
            let origin = i.origin.as_deref().ok_or("inner step without origin")?;
            ensure!(dep[origin], "inner step {} ({origin}) does not depend on the conjecture", i.label);
        }
    }
    for (name, d) in &dep {
        if *d && g.classify_step(name) == StepClass::Inference {
            ensure!(!before.article.lemma_items.iter().any(|i| i.origin.as_deref() == Some(name)), "{name} placed before the theorem");
        }
    }
    let theorem_at = article.find("\ntheorem\n").ok_or("no theorem block")?;
    let now = article[theorem_at..].find("\n  now\n    assume ").ok_or("no `now ... assume`")?;
    let thus = article.rfind("\n    thus contradiction by ").ok_or("no `thus contradiction by`")?;
    ensure!(theorem_at + now < thus, "`thus contradiction` before `assume`");
    ensure!(article.ends_with("  end;\n  hence thesis;\nend;\n"), "article does not end with `end; hence thesis; end;`");
    ensure!(elapsed < Duration::from_secs(5), "took {elapsed:?}");
    let (l0, l1) = (before.article.lemma_items.len(), t.article.lemma_items.len());
    ensure!(l1 <= l0, "compression grew the lemmas from {l0} to {l1}");
    Ok(format!("10 axioms, 2 skolem functions, lemmas {l0} -> {l1}, {elapsed:.1?}"))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let premises = vec![f("![X]:(~l(X)|d(X))"), f("![X,Y]:(~l(X)|~d(X)|~d(Y))")];
    let conclusion = f("![X,Y]:(~l(X)|~d(Y))");
    let formula_level = is_obvious(&ObviousnessQuery::new(premises.clone(), conclusion.clone()));
    ensure!(formula_level.name() == "NotObvious", "formula-level query gave {}", formula_level.name());
    let open: Vec<Formula> = vec![f("~l(X)|d(X)"), f("~l(X)|~d(X)|~d(Y)")];
    let instance_level =
        is_obvious(&ObviousnessQuery::new(open.clone(), f("~l(X)|~d(Y)")).with_fixed(vec!["X".into(), "Y".into()]));
    ensure!(instance_level.name() == "Obvious", "instance-level query gave {}", instance_level.name());
    let elapsed = start.elapsed();
    for d in 1..=3 {
        ensure!(brute_force_entails(&premises, &conclusion, d) == Ok(true), "formula-level entailment fails at size {d}");
        ensure!(brute_force_entails(&open, &f("~l(X)|~d(Y)"), d) == Ok(true), "instance-level entailment fails at size {d}");
    }
    ensure!(elapsed < Duration::from_secs(1), "checker took {elapsed:?}");
    Ok(format!("NotObvious / Obvious, both entailments valid at sizes 1-3, {elapsed:.1?}"))
}

/// Query built from random premises; half the conclusions are weakened
/// instances of a premise so that Obvious verdicts are common.
fn random_query(r: &mut rand::rngs::StdRng, g: &FormulaGen) -> (Vec<Formula>, Formula) {
    let n = r.gen_range(1..=3);
    let premises: Vec<Formula> = (0..n).map(|_| g.closed(r, &["X", "Y"], 3)).collect();
    if r.gen_bool(0.5) {
        return (premises, g.closed(r, &["X", "Y"], 3));
    }
    let (vars, matrix) = premises[r.gen_range(0..n)].strip_universal_prefix();
    let mut s = tptp_mizar::Substitution::new();
    for v in vars {
        if r.gen_bool(0.7) {
            s.insert(v, Term::constant(if r.gen_bool(0.5) { "a" } else { "b" }));
        }
    }
    let mut c = matrix.apply(&s);
    if r.gen_bool(0.5) {
        c = Formula::or(vec![c, g.literal(r, &[])]);
    }
    (premises, c.universal_closure())
}

fn criterion_3() -> Outcome {
    let g = FormulaGen::small();
    let mut r = rng(3);
    let (mut obvious, mut unknown) = (0, 0);
    for i in 0..500 {
        let (premises, conclusion) = random_query(&mut r, &g);
        match is_obvious(&ObviousnessQuery::new(premises.clone(), conclusion.clone())).name() {
            "Obvious" => {
                obvious += 1;
                for d in 1..=3 {
                    let ok = brute_force_entails(&premises, &conclusion, d).map_err(|e| e.to_string())?;
                    ensure!(ok, "query {i} is Obvious but fails at domain size {d}: {premises:?} |- {conclusion:?}");
                }
            }
            "Unknown" => unknown += 1,
            _ => {}
        }
    }
    ensure!(obvious >= 100, "only {obvious} Obvious verdicts, too few to be meaningful");
    Ok(format!("500 queries, {obvious} Obvious all confirmed, {unknown} Unknown"))
}

fn skolem_step(r: &mut rand::rngs::StdRng) -> (String, String, bool) {
    let g = FormulaGen { preds: vec![("r", 2), ("p", 1)], consts: vec!["a"], funcs: vec![], equality: r.gen_bool(0.3) };
    let unary = r.gen_bool(0.6);
    let vars: Vec<String> = if unary { vec!["X".into(), "Y".into()] } else { vec!["Y".into()] };
    let mut m = g.formula(r, &mut vars.clone(), &[], 2);
    while !m.free_vars().contains(&"Y".to_string()) {
        m = Formula::and(vec![m, g.literal(r, &["Y".to_string()])]);
    }
    let sk = if unary { Term::app("esk1_1", vec![Term::var("X")]) } else { Term::constant("esk1_0") };
    let mut s = tptp_mizar::Substitution::new();
    s.insert("Y".into(), sk);
    let conclusion = m.apply(&s);
    let mut parent = Formula::exists("Y", m);
    if unary {
        parent = Formula::forall("X", parent);
    }
    let unit = |name: &str, f: &Formula, src: &str| {
        let mut out = String::new();
        tptp_mizar::tptp::write_formula(&mut out, f).unwrap();
        format!("fof({name}, plain, {out}, {src}).\n")
    };
    let text = unit("p", &parent, "file('sk.p', p)") + &unit("s", &conclusion, "inference(skolemize,[status(esa)],[p])");
    (text, if unary { "esk1_1".into() } else { "esk1_0".into() }, unary)
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    for i in 0..100 {
        let (text, symbol, unary) = skolem_step(&mut r);
        let units = parse_derivation(&text).map_err(|e| format!("{e}\n{text}"))?;
        let g = build_graph(units).map_err(|e| e.to_string())?;
        ensure!(g.classify_step("s") == StepClass::Skolemization, "step {i} not classified as skolemization:\n{text}");
        let j = make_henkin_axiom(&g, "s", 1).map_err(|e| e.to_string())?;
        ensure!(j.henkin_axiom.is_closed(), "axiom {i} is not closed");
        ensure!(j.skolem_symbol.name == symbol && j.skolem_symbol.arity == unary as usize, "step {i} cites {}", j.skolem_symbol);
        ensure!(j.henkin_axiom.function_names().contains(&symbol), "axiom {i} does not mention {symbol}");
        let parent = g.node("p").unwrap().formula.universal_closure();
        let conclusion = g.node("s").unwrap().formula.universal_closure();
        for d in 1..=3 {
            let ok = brute_force_entails(&[parent.clone(), j.henkin_axiom.clone()], &conclusion, d).map_err(|e| e.to_string())?;
            ensure!(ok, "step {i}: parent and axiom do not entail the conclusion at size {d}\n{text}");
        }
    }
    let two = parse_derivation(&read_fixture("two_skolem.tstp")).unwrap();
    let g = build_graph(two.clone()).unwrap();
    let e = validate_single_skolem(&g, "s").err().ok_or("two-skolem step accepted")?;
    ensure!(e.kind() == "MultipleSkolemsUnsupported", "got {}", e.kind());
    let e = translate_derivation(two, &TranslateOptions::default()).err().ok_or("two-skolem derivation translated")?;
    ensure!(e.kind() == "MultipleSkolemsUnsupported", "pipeline gave {}", e.kind());
    Ok("100 skolem steps valid at sizes 1-3, two-skolem step rejected".into())
}

fn check_compression(name: &str, text: &str) -> Result<(usize, usize, usize), String> {
    let t = translate(text, &uncompressed())?;
    let failures = check_article(&t.article, &t.manifest, DEFAULT_BUDGET);
    ensure!(failures.is_empty(), "{name}: input article fails its own check: {failures:?}");
    let (a, report) = compress(&t.article, &t.manifest, &CompressOptions::default());
    ensure!(report.passes <= report.steps_before, "{name}: {} passes for {} steps", report.passes, report.steps_before);
    let (b, again) = compress(&a, &t.manifest, &CompressOptions::default());
    ensure!(a == b && again.removed_labels.is_empty() && again.per_pass == vec![0], "{name}: compression is not idempotent");
    let failures = check_article(&a, &t.manifest, DEFAULT_BUDGET);
    ensure!(failures.is_empty(), "{name}: compressed article fails the re-check: {failures:?}");
    check_referential_integrity(&tptp_mizar::mizar::render_article(&a), &t.manifest).map_err(|e| format!("{name}: {e}"))?;
    Ok((report.steps_before, report.steps_after, report.passes))
}

fn criterion_5() -> Outcome {
    let (before, after, passes) = check_compression("PUZ001+1", &read_fixture("PUZ001+1.tstp"))?;
    let mut r = rng(5);
    let (mut total_before, mut total_after) = (0, 0);
    for i in 0..50 {
        let text = random_derivation(&mut r);
        let (b, a, _) = check_compression(&format!("random article {i}"), &text)?;
        total_before += b;
        total_after += a;
    }
    Ok(format!(
        "PUZ001+1 {before} -> {after} steps in {passes} passes; 50 random articles {total_before} -> {total_after} steps"
    ))
}

/// Labels and references in source order must only point backwards.
fn no_forward_refs(t: &Translation) -> Result<(), String> {
    check_referential_integrity(&t.article_text(), &t.manifest).map_err(|e| e.to_string())?;
    let a = &t.article;
    let mut seen: Vec<&str> = Vec::new();
    let mut items: Vec<&tptp_mizar::mizar::Item> = a.axiom_items.iter().chain(&a.lemma_items).collect();
    let block = a.theorem.as_ref().and_then(|t| t.proof.as_ref());
    let check = |label: &str, refs: Vec<Ref>, seen: &Vec<&str>| -> Result<(), String> {
        for r in refs {
            if let Ref::Label(l) = r {
                ensure!(seen.contains(&l.as_str()), "{label} cites {l} before it is defined");
            }
        }
        Ok(())
    };
    if let Some(b) = block {
        items.extend(&b.inner_steps);
    }
    for (k, i) in items.iter().enumerate() {
        if let Some(b) = block {
            if k == a.axiom_items.len() + a.lemma_items.len() {
                seen.push(&b.assumption_label);
            }
        }
        let refs = match &i.justification {
            Justification::By(r) => r.clone(),
            Justification::Proof(p) => p.outer_refs(),
        };
        check(&i.label, refs, &seen)?;
        seen.push(&i.label);
    }
    if let Some(b) = block {
        if b.inner_steps.is_empty() {
            seen.push(&b.assumption_label);
        }
        check("contradiction", b.contradiction_refs.clone(), &seen)?;
    }
    Ok(())
}

fn criterion_6() -> Outcome {
    let mut cases: Vec<(String, String, TranslateOptions)> = Vec::new();
    for name in ["PUZ001+1.tstp", "unused_branch.tstp", "bindings.tstp"] {
        cases.push((name.into(), read_fixture(name), TranslateOptions::default()));
        cases.push((format!("{name} uncompressed"), read_fixture(name), uncompressed()));
        cases.push((format!("{name} keep-unused"), read_fixture(name), TranslateOptions { keep_unused: true, ..uncompressed() }));
    }
    let designated = TranslateOptions { conjecture: Some("d".into()), ..Default::default() };
    cases.push(("no_conjecture.tstp".into(), read_fixture("no_conjecture.tstp"), designated));
    let mut r = rng(6);
    for i in 0..10 {
        cases.push((format!("random derivation {i}"), random_derivation(&mut r), TranslateOptions::default()));
    }
    for (name, text, opts) in &cases {
        let g = build_graph(parse_derivation(text).unwrap()).map_err(|e| format!("{name}: {e}"))?;
        for child in g.topological_order() {
            for parent in g.parents(child) {
                ensure!(g.position(parent) < g.position(child), "{name}: {parent} is not before {child}");
            }
        }
        let t1 = translate(text, opts).map_err(|e| format!("{name}: {e}"))?;
        no_forward_refs(&t1).map_err(|e| format!("{name}: {e}"))?;
        let t2 = translate(text, opts)?;
        ensure!(t1.article_text() == t2.article_text() && t1.manifest_text() == t2.manifest_text(), "{name}: output differs between runs");
    }
    let problem = parse_problem(&read_fixture("PUZ001+1.p")).unwrap();
    let p1 = tptp_mizar::mizar::translate_problem(&problem).map_err(|e| e.to_string())?;
    let p2 = tptp_mizar::mizar::translate_problem(&problem).unwrap();
    ensure!(tptp_mizar::mizar::render_article(&p1.0) == tptp_mizar::mizar::render_article(&p2.0), "problem output differs between runs");
    Ok(format!("{} derivation runs plus the problem file", cases.len()))
}

fn round_trips(units: &[AnnotatedFormula]) -> Result<(), String> {
    let text = serialize(units);
    let once = parse_derivation(&text).map_err(|e| format!("{e}\n{text}"))?;
    let twice = parse_derivation(&serialize(&once)).map_err(|e| e.to_string())?;
    ensure!(once == twice, "round trip changed the units:\n{text}");
    Ok(())
}

const NOISE: &[u8] = b"()[],.:~&|!?=' \n%#$XY";

fn criterion_7() -> Outcome {
    let problem = TptpReader::new().read_file(&fixture("PUZ001+1.p")).map_err(|e| e.to_string())?;
    round_trips(&problem)?;
    let again = parse_problem(&serialize(&problem)).map_err(|e| e.to_string())?;
    ensure!(again == problem, "problem file changes on round trip");
    for name in ["PUZ001+1.tstp", "unused_branch.tstp", "bindings.tstp", "two_skolem.tstp", "no_conjecture.tstp"] {
        let units = parse_derivation(&read_fixture(name)).map_err(|e| format!("{name}: {e}"))?;
        round_trips(&units).map_err(|e| format!("{name}: {e}"))?;
        ensure!(parse_derivation(&serialize(&units)).unwrap() == units, "{name} changes on round trip");
    }
    let mut r = rng(7);
    for _ in 0..1000 {
        round_trips(&random_units(&mut r))?;
    }
    // random bytes and mutated fixtures, each parsed on a watchdog thread
    let seed = read_fixture("PUZ001+1.tstp").into_bytes();
    let mut worst = Duration::ZERO;
    for i in 0..1000 {
        let bytes: Vec<u8> = if i % 2 == 0 {
            (0..r.gen_range(0..400)).map(|_| r.gen()).collect()
        } else {
            let mut b = seed.clone();
            for _ in 0..r.gen_range(1..20) {
                let at = r.gen_range(0..b.len());
                match r.gen_range(0..3) {
                    0 => b[at] = NOISE[r.gen_range(0..NOISE.len())],
                    1 => b.truncate(at.max(1)),
                    _ => b.insert(at, b"(["[r.gen_range(0..2)]),
                }
            }
            b
        };
        let text = String::from_utf8_lossy(&bytes).into_owned();
        let (tx, rx) = mpsc::channel();
        let start = Instant::now();
        std::thread::spawn(move || {
            let _ = tx.send(parse_derivation(&text).is_ok());
        });
        rx.recv_timeout(Duration::from_secs(1)).map_err(|_| format!("fuzz input {i} did not finish within 1 s"))?;
        worst = worst.max(start.elapsed());
    }
    Ok(format!("fixtures and 1000 fuzzed unit lists round-trip; 1000 noisy inputs, slowest {worst:.1?}"))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("end-to-end PUZ001+1 article", criterion_1),
        ("obviousness checker on the resolution example", criterion_2),
        ("soundness of Obvious verdicts", criterion_3),
        ("skolemization axioms", criterion_4),
        ("compression fixed point", criterion_5),
        ("structural invariants", criterion_6),
        ("parser round trip and fuzzing", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match outcome {
            Ok(detail) => println!("criterion {} PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} FAIL {name}: {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
