use std::fmt::Write;

use super::{join_refs, ArticleModel, Item, Justification};
use crate::fol::{Formula, Term};
use crate::tptp::quote_atom;

fn term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(v),
        Term::App(f, args) if args.is_empty() => out.push_str(&quote_atom(f)),
        Term::App(f, args) => {
            out.push('(');
            out.push_str(&quote_atom(f));
            out.push(' ');
            terms(args, out);
            out.push(')');
        }
    }
}

fn terms(ts: &[Term], out: &mut String) {
    for (i, t) in ts.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        term(t, out);
    }
}

fn is_atom(f: &Formula) -> bool {
    matches!(f, Formula::Pred(..) | Formula::Eq(..) | Formula::True | Formula::False)
}

/// Operand position: atoms bare, everything else parenthesized.
fn operand(f: &Formula, out: &mut String) {
    if is_atom(f) {
        formula(f, out);
    } else {
        out.push('(');
        formula(f, out);
        out.push(')');
    }
}

fn formula(f: &Formula, out: &mut String) {
    match f {
        Formula::True => out.push_str("verum"),
        Formula::False => out.push_str("contradiction"),
        Formula::Pred(p, args) => {
            out.push_str(&quote_atom(p));
            if !args.is_empty() {
                out.push(' ');
                terms(args, out);
            }
        }
        Formula::Eq(l, r) => {
            term(l, out);
            out.push_str(" = ");
            term(r, out);
        }
        Formula::Not(g) => {
            out.push_str("not ");
            match &**g {
                Formula::Eq(..) => formula(g, out),
                _ => operand(g, out),
            }
        }
        Formula::And(gs) | Formula::Or(gs) => {
            let (sep, empty) = if matches!(f, Formula::And(_)) { (" & ", "verum") } else { (" or ", "contradiction") };
            if gs.is_empty() {
                out.push_str(empty);
            }
            for (i, g) in gs.iter().enumerate() {
                if i > 0 {
                    out.push_str(sep);
                }
                operand(g, out);
            }
        }
        Formula::Implies(a, b) | Formula::Iff(a, b) => {
            operand(a, out);
            out.push_str(if matches!(f, Formula::Implies(..)) { " implies " } else { " iff " });
            operand(b, out);
        }
        Formula::Forall(..) | Formula::Exists(..) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut vars = Vec::new();
            let mut cur = f;
            loop {
                match cur {
                    Formula::Forall(v, b) if universal => {
                        vars.push(v.as_str());
                        cur = b;
                    }
                    Formula::Exists(v, b) if !universal => {
                        vars.push(v.as_str());
                        cur = b;
                    }
                    _ => break,
                }
            }
            out.push_str(if universal { "for " } else { "ex " });
            out.push_str(&vars.join(","));
            out.push_str(if universal { " holds " } else { " st " });
            operand(cur, out);
        }
    }
}

/// Mizar surface syntax of a formula, e.g. `ex X1 st (lives X1 & killed X1,agatha)`.
pub fn render_formula(f: &Formula) -> String {
    let mut out = String::new();
    formula(f, &mut out);
    out
}

fn comment(item: &Item, indent: &str, out: &mut String) {
    let Some(origin) = &item.origin else { return };
    let renamed: Vec<String> =
        item.var_names.iter().filter(|(new, old)| new != old).map(|(new, old)| format!("{new} is {old}")).collect();
    if renamed.is_empty() {
        let _ = writeln!(out, "{indent}:: {origin}");
    } else {
        let _ = writeln!(out, "{indent}:: {origin} ({})", renamed.join(", "));
    }
}

fn item(i: &Item, indent: &str, out: &mut String) {
    comment(i, indent, out);
    let f = render_formula(&i.formula);
    match &i.justification {
        Justification::By(refs) if refs.is_empty() => {
            let _ = writeln!(out, "{indent}{}: {f};", i.label);
        }
        Justification::By(refs) => {
            let _ = writeln!(out, "{indent}{}: {f} by {};", i.label, join_refs(refs));
        }
        Justification::Proof(p) => {
            let _ = writeln!(out, "{indent}{}: {f}", i.label);
            let _ = writeln!(out, "{indent}proof");
            for inst in &p.instances {
                let g = render_formula(&inst.formula);
                let _ = writeln!(out, "{indent}  {}: {g} by {};", inst.label, join_refs(&inst.refs));
            }
            let _ = writeln!(out, "{indent}  thus thesis by {};", join_refs(&p.thesis_refs));
            let _ = writeln!(out, "{indent}end;");
        }
    }
}

/// Renders the article text.
pub fn render_article(a: &ArticleModel) -> String {
    let mut out = String::from("environ\n\nbegin\n");
    if !a.reservations.is_empty() {
        let _ = writeln!(out, "\nreserve {} for object;", a.reservations.join(","));
    }
    for i in a.axiom_items.iter().chain(&a.lemma_items) {
        out.push('\n');
        item(i, "", &mut out);
    }
    if let Some(t) = &a.theorem {
        out.push_str("\ntheorem\n");
        let f = render_formula(&t.formula);
        match &t.proof {
            None => {
                let _ = writeln!(out, "{f};\n::> pending proof");
            }
            Some(b) => {
                let _ = writeln!(out, "{f}\nproof\n  now");
                let _ = writeln!(out, "    assume {}: {};", b.assumption_label, render_formula(&b.assumption));
                for i in &b.inner_steps {
                    item(i, "    ", &mut out);
                }
                let _ = writeln!(out, "    thus contradiction by {};", join_refs(&b.contradiction_refs));
                out.push_str("  end;\n  hence thesis;\nend;\n");
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tptp::parse_formula;

    fn r(s: &str) -> String {
        render_formula(&parse_formula(s).unwrap())
    }

    #[test]
    fn surface_syntax() {
        assert_eq!(r("?[X1]:(lives(X1)&killed(X1,agatha))"), "ex X1 st (lives X1 & killed X1,agatha)");
        assert_eq!(r("lives(X1)=>(X1=agatha|X1=butler|X1=charles)"), "lives X1 implies (X1 = agatha or X1 = butler or X1 = charles)");
        assert_eq!(r("killed(X1,X2)=>~richer(X1,X2)"), "killed X1,X2 implies (not richer X1,X2)");
        assert_eq!(r("X1!=butler=>hates(agatha,X1)"), "(not X1 = butler) implies hates agatha,X1");
        assert_eq!(r("?[X2]:~hates(X1,X2)"), "ex X2 st (not hates X1,X2)");
        assert_eq!(r("agatha!=butler"), "not agatha = butler");
        assert_eq!(r("~hates(agatha,skolem2(butler))"), "not hates agatha,(skolem2 butler)");
        assert_eq!(r("![X,Y]:(p <=> q(X,Y))"), "for X,Y holds (p iff q X,Y)");
        assert_eq!(r("$false"), "contradiction");
        assert_eq!(r("~(p&q)"), "not (p & q)");
    }
}
