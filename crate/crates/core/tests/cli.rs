mod common;

use std::process::{Command, Output};

use common::fixture;

fn tool(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tptp-mizar")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn derivation_writes_article_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("PUZ001+1.tstp");
    let o = tool(&["derivation", input.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let article = std::fs::read_to_string(dir.path().join("PUZ001+1.miz")).unwrap();
    assert!(article.ends_with("  hence thesis;\nend;\n"));
    let manifest = std::fs::read_to_string(dir.path().join("PUZ001+1.env")).unwrap();
    assert!(manifest.contains("skolemdef 2: "));
    assert!(stderr(&o).starts_with("compressed "), "{}", stderr(&o));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let input = fixture("PUZ001+1.tstp");
    let read = |flags: &[&str]| {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["derivation", input.to_str().unwrap(), "-o", dir.path().to_str().unwrap()];
        args.extend(flags);
        assert!(tool(&args).status.success());
        std::fs::read(dir.path().join("PUZ001+1.miz")).unwrap()
    };
    assert_eq!(read(&[]), read(&[]));
    assert_eq!(read(&["--no-compress"]), read(&["--no-compress"]));
    assert_ne!(read(&[]), read(&["--no-compress"]));
}

#[test]
fn problem_mode_writes_a_flat_article() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("PUZ001+1.p");
    let o = tool(&["problem", input.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let article = std::fs::read_to_string(dir.path().join("PUZ001+1.miz")).unwrap();
    assert_eq!(article.matches(" by AXIOMS:").count(), 13);
    assert!(!article.contains("\nproof\n"));
}

#[test]
fn check_obvious_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, text: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    };
    let yes = write("yes.p", "fof(a, axiom, ![X]:(p(X)=>q(X))). fof(b, axiom, p(c)). fof(g, conjecture, q(c)).");
    let no = write("no.p", "fof(a, axiom, ![X]:(p(X)=>q(X))). fof(a2, axiom, ![X]:(q(X)=>r(X))). fof(b, axiom, p(c)). fof(g, conjecture, r(c)).");
    let o = tool(&["check-obvious", yes.to_str().unwrap()]);
    assert_eq!((o.status.code(), String::from_utf8_lossy(&o.stdout).trim()), (Some(0), "Obvious"));
    let o = tool(&["check-obvious", no.to_str().unwrap()]);
    assert_eq!((o.status.code(), String::from_utf8_lossy(&o.stdout).trim()), (Some(1), "NotObvious"));
    let o = tool(&["check-obvious", yes.to_str().unwrap(), "--budget", "1"]);
    assert_eq!((o.status.code(), String::from_utf8_lossy(&o.stdout).trim()), (Some(2), "Unknown"));
}

#[test]
fn errors_are_one_machine_readable_line() {
    let o = tool(&["derivation", "/definitely/not/here.tstp"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.starts_with("error: IoError: "), "{err}");
    assert_eq!(err.lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let input = fixture("two_skolem.tstp");
    let o = tool(&["derivation", input.to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).starts_with("error: MultipleSkolemsUnsupported: "));
    assert!(!dir.path().join("two_skolem.miz").exists());

    let bad = dir.path().join("bad.p");
    std::fs::write(&bad, "fof(a, axiom, (p).\n").unwrap();
    let o = tool(&["problem", bad.to_str().unwrap()]);
    assert!(stderr(&o).starts_with("error: SyntaxError: syntax error at 1:"), "{}", stderr(&o));
}

#[test]
fn conjecture_flag_designates_a_unit() {
    let dir = tempfile::tempdir().unwrap();
    let input = fixture("no_conjecture.tstp");
    let out = dir.path().to_str().unwrap();
    let o = tool(&["derivation", input.to_str().unwrap(), "-o", out]);
    assert!(stderr(&o).starts_with("error: NoConjecture: "));
    let o = tool(&["derivation", input.to_str().unwrap(), "-o", out, "--conjecture", "d", "--verbose"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stderr(&o).contains("pass 1: "));
}
