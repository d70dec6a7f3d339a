//! Reader and writer for the `fof`/`cnf` fragment of TPTP, including the
//! TSTP source annotations E attaches to derived formulas.
//!
//! The parser is hand-written recursive descent over a small token stream.
//! Every loop consumes at least one token and nesting is bounded, so
//! arbitrary input terminates with either units or a [`TptpError`].

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::fol::{Clause, Formula, Substitution, Term};

const MAX_DEPTH: usize = 400;
const MAX_INCLUDE_DEPTH: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    Fof,
    Cnf,
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Language::Fof => "fof",
            Language::Cnf => "cnf",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Hypothesis,
    Definition,
    Assumption,
    Lemma,
    Theorem,
    Corollary,
    Conjecture,
    NegatedConjecture,
    Plain,
    Derived,
    Unknown,
}

impl Role {
    pub fn parse(word: &str) -> Option<Role> {
        Some(match word {
            "axiom" => Role::Axiom,
            "hypothesis" => Role::Hypothesis,
            "definition" => Role::Definition,
            "assumption" => Role::Assumption,
            "lemma" => Role::Lemma,
            "theorem" => Role::Theorem,
            "corollary" => Role::Corollary,
            "conjecture" => Role::Conjecture,
            "negated_conjecture" => Role::NegatedConjecture,
            "plain" => Role::Plain,
            "derived" => Role::Derived,
            "unknown" => Role::Unknown,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Axiom => "axiom",
            Role::Hypothesis => "hypothesis",
            Role::Definition => "definition",
            Role::Assumption => "assumption",
            Role::Lemma => "lemma",
            Role::Theorem => "theorem",
            Role::Corollary => "corollary",
            Role::Conjecture => "conjecture",
            Role::NegatedConjecture => "negated_conjecture",
            Role::Plain => "plain",
            Role::Derived => "derived",
            Role::Unknown => "unknown",
        }
    }

    /// Roles that state premises of a problem.
    pub fn is_axiom_like(self) -> bool {
        matches!(
            self,
            Role::Axiom
                | Role::Hypothesis
                | Role::Definition
                | Role::Assumption
                | Role::Lemma
                | Role::Theorem
                | Role::Corollary
        )
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An E inference annotation, with nested inferences flattened to the unit
/// names they ultimately cite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InferenceRecord {
    pub rule: String,
    pub status: Option<String>,
    pub parents: Vec<String>,
    /// `parent:[bind(X,$fot(t)),...]` annotations, when present and well formed.
    pub bindings: Vec<(String, Substitution)>,
}

impl InferenceRecord {
    pub fn new(rule: impl Into<String>, parents: Vec<String>) -> Self {
        InferenceRecord { rule: rule.into(), status: None, parents, bindings: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Source {
    File { file: String, name: Option<String> },
    Inference(InferenceRecord),
    Unknown,
}

impl Source {
    pub fn parents(&self) -> &[String] {
        match self {
            Source::Inference(r) => &r.parents,
            _ => &[],
        }
    }

    pub fn inference(&self) -> Option<&InferenceRecord> {
        match self {
            Source::Inference(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedFormula {
    pub name: String,
    pub language: Language,
    pub role: Role,
    /// For `cnf` units this is the disjunction of the clause's literals,
    /// with its variables left free.
    pub formula: Formula,
    pub clause: Option<Clause>,
    pub source: Source,
}

impl AnnotatedFormula {
    pub fn fof(name: impl Into<String>, role: Role, formula: Formula, source: Source) -> Self {
        AnnotatedFormula { name: name.into(), language: Language::Fof, role, formula, clause: None, source }
    }

    pub fn cnf(name: impl Into<String>, role: Role, clause: Clause, source: Source) -> Self {
        AnnotatedFormula {
            name: name.into(),
            language: Language::Cnf,
            role,
            formula: clause.to_formula(),
            clause: Some(clause),
            source,
        }
    }

    pub fn is_file_sourced(&self) -> bool {
        matches!(self.source, Source::File { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TptpError {
    #[error("syntax error at {line}:{column}: expected {}, found {found}", expected.join(" or "))]
    Syntax { line: usize, column: usize, expected: Vec<String>, found: String },
    #[error("unsupported language {language} at {line}:{column} (only fof and cnf are supported)")]
    UnsupportedLanguage { language: String, line: usize, column: usize },
    #[error("included file {file} not found")]
    IncludeNotFound { file: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl TptpError {
    pub fn kind(&self) -> &'static str {
        match self {
            TptpError::Syntax { .. } => "SyntaxError",
            TptpError::UnsupportedLanguage { .. } => "UnsupportedLanguage",
            TptpError::IncludeNotFound { .. } => "IncludeNotFound",
            TptpError::Io { .. } => "IoError",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    Dollar(String),
    Distinct(String),
    Number(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Implies,
    RevImplies,
    Iff,
    Xor,
    Nor,
    Nand,
    Equals,
    NotEquals,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(w) | Tok::Upper(w) | Tok::Number(w) => write!(f, "`{w}`"),
            Tok::Dollar(w) => write!(f, "`{w}`"),
            Tok::Quoted(w) => write!(f, "`'{w}'`"),
            Tok::Distinct(w) => write!(f, "`\"{w}\"`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Implies => f.write_str("`=>`"),
            Tok::RevImplies => f.write_str("`<=`"),
            Tok::Iff => f.write_str("`<=>`"),
            Tok::Xor => f.write_str("`<~>`"),
            Tok::Nor => f.write_str("`~|`"),
            Tok::Nand => f.write_str("`~&`"),
            Tok::Equals => f.write_str("`=`"),
            Tok::NotEquals => f.write_str("`!=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn syntax(line: usize, column: usize, expected: &[&str], found: impl Into<String>) -> TptpError {
    TptpError::Syntax {
        line,
        column,
        expected: expected.iter().map(|s| s.to_string()).collect(),
        found: found.into(),
    }
}

fn is_alnum(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Spanned>, TptpError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let advance = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize, chars: &[char]| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            advance(&mut i, &mut line, &mut col, 1, &chars);
            continue;
        }
        // E writes `# SZS ...` status lines around its proof output
        if c == '%' || (c == '#' && col == 1) {
            while i < chars.len() && chars[i] != '\n' {
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (sl, sc) = (line, col);
            advance(&mut i, &mut line, &mut col, 2, &chars);
            loop {
                if i >= chars.len() {
                    return Err(syntax(sl, sc, &["`*/`"], "end of input in comment"));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    advance(&mut i, &mut line, &mut col, 2, &chars);
                    break;
                }
                advance(&mut i, &mut line, &mut col, 1, &chars);
            }
            continue;
        }
        let (tl, tc) = (line, col);
        let two: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let (tok, len) = if two.starts_with("<=>") {
            (Tok::Iff, 3)
        } else if two.starts_with("<~>") {
            (Tok::Xor, 3)
        } else if two.starts_with("=>") {
            (Tok::Implies, 2)
        } else if two.starts_with("<=") {
            (Tok::RevImplies, 2)
        } else if two.starts_with("~|") {
            (Tok::Nor, 2)
        } else if two.starts_with("~&") {
            (Tok::Nand, 2)
        } else if two.starts_with("!=") {
            (Tok::NotEquals, 2)
        } else {
            match c {
                '(' => (Tok::LParen, 1),
                ')' => (Tok::RParen, 1),
                '[' => (Tok::LBracket, 1),
                ']' => (Tok::RBracket, 1),
                ',' => (Tok::Comma, 1),
                '.' => (Tok::Dot, 1),
                ':' => (Tok::Colon, 1),
                '!' => (Tok::Bang, 1),
                '?' => (Tok::Question, 1),
                '~' => (Tok::Tilde, 1),
                '&' => (Tok::Amp, 1),
                '|' => (Tok::Pipe, 1),
                '=' => (Tok::Equals, 1),
                '\'' | '"' => {
                    let mut j = i + 1;
                    let mut s = String::new();
                    loop {
                        match chars.get(j) {
                            None => return Err(syntax(tl, tc, &[&format!("closing {c}")], "end of input")),
                            Some('\\') => match chars.get(j + 1) {
                                Some(&e) if e == '\\' || e == c => {
                                    s.push(e);
                                    j += 2;
                                }
                                _ => return Err(syntax(tl, tc, &["`\\\\` or escaped quote"], "bad escape")),
                            },
                            Some(&e) if e == c => {
                                j += 1;
                                break;
                            }
                            Some(&e) => {
                                s.push(e);
                                j += 1;
                            }
                        }
                    }
                    if c == '\'' && s.is_empty() {
                        return Err(syntax(tl, tc, &["non-empty quoted atom"], "''"));
                    }
                    let tok = if c == '\'' { Tok::Quoted(s) } else { Tok::Distinct(s) };
                    (tok, j - i)
                }
                '$' => {
                    let mut j = i + 1;
                    if chars.get(j) == Some(&'$') {
                        j += 1;
                    }
                    let start = j;
                    while j < chars.len() && is_alnum(chars[j]) {
                        j += 1;
                    }
                    if j == start || !chars[start].is_ascii_lowercase() {
                        return Err(syntax(tl, tc, &["defined word"], "`$`"));
                    }
                    (Tok::Dollar(chars[i..j].iter().collect()), j - i)
                }
                c if c.is_ascii_digit() || ((c == '-' || c == '+') && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) => {
                    let mut j = i + 1;
                    while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '/' || chars[j] == 'E' || chars[j] == 'e' || (chars[j] == '.' && chars.get(j + 1).is_some_and(|d| d.is_ascii_digit()))) {
                        j += 1;
                    }
                    (Tok::Number(chars[i..j].iter().collect()), j - i)
                }
                c if c.is_ascii_alphabetic() => {
                    let mut j = i + 1;
                    while j < chars.len() && is_alnum(chars[j]) {
                        j += 1;
                    }
                    let w: String = chars[i..j].iter().collect();
                    let tok = if c.is_ascii_lowercase() { Tok::Lower(w) } else { Tok::Upper(w) };
                    (tok, j - i)
                }
                other => {
                    return Err(syntax(tl, tc, &["token"], format!("character {other:?}")));
                }
            }
        };
        out.push(Spanned { tok, line: tl, column: tc });
        advance(&mut i, &mut line, &mut col, len, &chars);
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

/// Generic TSTP annotation data.
#[derive(Debug, Clone, PartialEq)]
enum GTerm {
    App(String, Vec<GTerm>),
    Var(String),
    List(Vec<GTerm>),
    Colon(Box<GTerm>, Box<GTerm>),
    Number(String),
    Distinct(String),
    Term(Term),
    Formula(Formula),
}

enum Item {
    Unit(AnnotatedFormula),
    Include { file: String, names: Option<Vec<String>> },
}

struct Parser<'w> {
    toks: Vec<Spanned>,
    pos: usize,
    depth: usize,
    warnings: &'w mut Vec<String>,
}

impl<'w> Parser<'w> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn err(&self, expected: &[&str]) -> TptpError {
        let s = &self.toks[self.pos];
        syntax(s.line, s.column, expected, s.tok.to_string())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), TptpError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.err(&[&tok.to_string()]))
        }
    }

    fn enter(&mut self) -> Result<(), TptpError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err(&["shallower nesting"]));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn item(&mut self) -> Result<Item, TptpError> {
        let (line, column) = (self.toks[self.pos].line, self.toks[self.pos].column);
        let lang = match self.bump() {
            Tok::Lower(w) => w,
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return Err(self.err(&["`fof`", "`cnf`", "`include`"]));
            }
        };
        let language = match lang.as_str() {
            "fof" => Language::Fof,
            "cnf" => Language::Cnf,
            "include" => return self.include(),
            "tff" | "thf" | "tcf" | "tpi" => {
                return Err(TptpError::UnsupportedLanguage { language: lang, line, column })
            }
            _ => {
                self.pos -= 1;
                return Err(self.err(&["`fof`", "`cnf`", "`include`"]));
            }
        };
        self.expect(Tok::LParen)?;
        let name = self.name()?;
        self.expect(Tok::Comma)?;
        let role = match self.peek().clone() {
            Tok::Lower(w) => match Role::parse(&w) {
                Some(r) => {
                    self.bump();
                    r
                }
                None => return Err(self.err(&["formula role"])),
            },
            _ => return Err(self.err(&["formula role"])),
        };
        self.expect(Tok::Comma)?;
        let (formula, clause) = match language {
            Language::Fof => (self.formula()?, None),
            Language::Cnf => {
                let clause = self.cnf_formula()?;
                (clause.to_formula(), Some(clause))
            }
        };
        let mut source = Source::Unknown;
        if *self.peek() == Tok::Comma {
            self.bump();
            let (sl, sc) = (self.toks[self.pos].line, self.toks[self.pos].column);
            let g = self.gterm()?;
            source = self.interpret_source(&g, &name, sl, sc);
            if *self.peek() == Tok::Comma {
                self.bump();
                self.gterm()?;
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(Item::Unit(AnnotatedFormula { name, language, role, formula, clause, source }))
    }

    fn include(&mut self) -> Result<Item, TptpError> {
        self.expect(Tok::LParen)?;
        let file = match self.bump() {
            Tok::Quoted(f) => f,
            _ => {
                self.pos -= 1;
                return Err(self.err(&["quoted file name"]));
            }
        };
        let mut names = None;
        if *self.peek() == Tok::Comma {
            self.bump();
            self.expect(Tok::LBracket)?;
            let mut list = Vec::new();
            if *self.peek() != Tok::RBracket {
                list.push(self.name()?);
                while *self.peek() == Tok::Comma {
                    self.bump();
                    list.push(self.name()?);
                }
            }
            self.expect(Tok::RBracket)?;
            names = Some(list);
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        Ok(Item::Include { file, names })
    }

    fn name(&mut self) -> Result<String, TptpError> {
        match self.peek().clone() {
            Tok::Lower(w) | Tok::Quoted(w) | Tok::Number(w) => {
                self.bump();
                Ok(w)
            }
            _ => Err(self.err(&["unit name"])),
        }
    }

    fn formula(&mut self) -> Result<Formula, TptpError> {
        self.enter()?;
        let first = self.unitary()?;
        let result = match self.peek().clone() {
            Tok::Amp | Tok::Pipe => {
                let op = self.peek().clone();
                let mut parts = vec![first];
                while *self.peek() == op {
                    self.bump();
                    parts.push(self.unitary()?);
                }
                if matches!(
                    self.peek(),
                    Tok::Amp | Tok::Pipe | Tok::Implies | Tok::RevImplies | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand
                ) {
                    return Err(self.err(&[&op.to_string(), "`)`"]));
                }
                if op == Tok::Amp {
                    Formula::and(parts)
                } else {
                    Formula::or(parts)
                }
            }
            Tok::Implies | Tok::RevImplies | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand => {
                let op = self.bump();
                let rhs = self.unitary()?;
                let f = match op {
                    Tok::Implies => Formula::implies(first, rhs),
                    Tok::RevImplies => Formula::implies(rhs, first),
                    Tok::Iff => Formula::iff(first, rhs),
                    Tok::Xor => Formula::not(Formula::iff(first, rhs)),
                    Tok::Nor => Formula::not(Formula::or(vec![first, rhs])),
                    _ => Formula::not(Formula::and(vec![first, rhs])),
                };
                if matches!(
                    self.peek(),
                    Tok::Amp | Tok::Pipe | Tok::Implies | Tok::RevImplies | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand
                ) {
                    return Err(self.err(&["`)`"]));
                }
                f
            }
            _ => first,
        };
        self.leave();
        Ok(result)
    }

    fn unitary(&mut self) -> Result<Formula, TptpError> {
        self.enter()?;
        let f = match self.peek().clone() {
            Tok::Bang | Tok::Question => {
                let universal = self.bump() == Tok::Bang;
                self.expect(Tok::LBracket)?;
                let mut vars = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Upper(v) => vars.push(v),
                        _ => {
                            self.pos -= 1;
                            return Err(self.err(&["variable"]));
                        }
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RBracket => {
                            self.bump();
                            break;
                        }
                        _ => return Err(self.err(&["`,`", "`]`"])),
                    }
                }
                self.expect(Tok::Colon)?;
                let body = self.unitary()?;
                vars.into_iter().rev().fold(body, |acc, v| {
                    if universal {
                        Formula::forall(v, acc)
                    } else {
                        Formula::exists(v, acc)
                    }
                })
            }
            Tok::Tilde => {
                self.bump();
                Formula::not(self.unitary()?)
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                f
            }
            _ => self.atomic()?,
        };
        self.leave();
        Ok(f)
    }

    fn atomic(&mut self) -> Result<Formula, TptpError> {
        match self.peek().clone() {
            Tok::Dollar(w) if w == "$true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Dollar(w) if w == "$false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Lower(_) | Tok::Quoted(_) | Tok::Upper(_) => {
                let t = self.term()?;
                match self.peek() {
                    Tok::Equals => {
                        self.bump();
                        Ok(Formula::eq(t, self.term()?))
                    }
                    Tok::NotEquals => {
                        self.bump();
                        Ok(Formula::not(Formula::eq(t, self.term()?)))
                    }
                    _ => match t {
                        Term::App(p, args) => Ok(Formula::Pred(p, args)),
                        Term::Var(_) => Err(self.err(&["`=`", "`!=`"])),
                    },
                }
            }
            _ => Err(self.err(&["formula"])),
        }
    }

    fn term(&mut self) -> Result<Term, TptpError> {
        self.enter()?;
        let t = match self.peek().clone() {
            Tok::Upper(v) => {
                self.bump();
                Term::Var(v)
            }
            Tok::Lower(f) | Tok::Quoted(f) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args.push(self.term()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.term()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                Term::App(f, args)
            }
            _ => return Err(self.err(&["term"])),
        };
        self.leave();
        Ok(t)
    }

    fn cnf_formula(&mut self) -> Result<Clause, TptpError> {
        let parenthesized = *self.peek() == Tok::LParen;
        if parenthesized {
            self.bump();
        }
        let mut literals = Vec::new();
        let mut saw_false = false;
        loop {
            let negated = if *self.peek() == Tok::Tilde {
                self.bump();
                true
            } else {
                false
            };
            let atom = self.atomic()?;
            match atom {
                Formula::False if !negated => saw_false = true,
                Formula::True | Formula::False => {
                    return Err(self.err(&["literal"]));
                }
                Formula::Not(inner) => literals.push(crate::fol::Literal { positive: negated, atom: *inner }),
                atom => literals.push(crate::fol::Literal { positive: !negated, atom }),
            }
            if *self.peek() == Tok::Pipe {
                self.bump();
            } else {
                break;
            }
        }
        if parenthesized {
            self.expect(Tok::RParen)?;
        }
        let _ = saw_false;
        Ok(Clause { literals })
    }

    fn gterm(&mut self) -> Result<GTerm, TptpError> {
        self.enter()?;
        let mut g = match self.peek().clone() {
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if *self.peek() != Tok::RBracket {
                    items.push(self.gterm()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        items.push(self.gterm()?);
                    }
                }
                self.expect(Tok::RBracket)?;
                GTerm::List(items)
            }
            Tok::Dollar(w) if w == "$fot" || w == "$fof" || w == "$cnf" => {
                self.bump();
                self.expect(Tok::LParen)?;
                let g = if w == "$fot" {
                    GTerm::Term(self.term()?)
                } else if w == "$fof" {
                    GTerm::Formula(self.formula()?)
                } else {
                    GTerm::Formula(self.cnf_formula()?.to_formula())
                };
                self.expect(Tok::RParen)?;
                g
            }
            Tok::Lower(w) | Tok::Quoted(w) | Tok::Dollar(w) => {
                self.bump();
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.bump();
                    args.push(self.gterm()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        args.push(self.gterm()?);
                    }
                    self.expect(Tok::RParen)?;
                }
                GTerm::App(w, args)
            }
            Tok::Upper(v) => {
                self.bump();
                GTerm::Var(v)
            }
            Tok::Number(n) => {
                self.bump();
                GTerm::Number(n)
            }
            Tok::Distinct(s) => {
                self.bump();
                GTerm::Distinct(s)
            }
            _ => return Err(self.err(&["annotation term"])),
        };
        if *self.peek() == Tok::Colon {
            self.bump();
            g = GTerm::Colon(Box::new(g), Box::new(self.gterm()?));
        }
        self.leave();
        Ok(g)
    }

    fn interpret_source(&mut self, g: &GTerm, unit: &str, line: usize, column: usize) -> Source {
        let atomic = |g: &GTerm| match g {
            GTerm::App(w, args) if args.is_empty() => Some(w.clone()),
            GTerm::Number(n) => Some(n.clone()),
            _ => None,
        };
        match g {
            GTerm::App(w, args) if w == "file" && !args.is_empty() && args.len() <= 2 => {
                match (atomic(&args[0]), args.get(1).map(atomic)) {
                    (Some(file), None) => Source::File { file, name: None },
                    (Some(file), Some(Some(name))) => Source::File { file, name: Some(name) },
                    _ => self.unknown_source(unit, line, column),
                }
            }
            GTerm::App(w, args) if w == "introduced" && !args.is_empty() => {
                let kind = atomic(&args[0]);
                Source::Inference(InferenceRecord {
                    rule: "introduced".into(),
                    status: kind,
                    parents: Vec::new(),
                    bindings: Vec::new(),
                })
            }
            GTerm::App(w, args) if w == "inference" && args.len() == 3 => {
                match self.inference_record(g, unit) {
                    Some(r) => Source::Inference(r),
                    None => self.unknown_source(unit, line, column),
                }
            }
            _ => self.unknown_source(unit, line, column),
        }
    }

    fn unknown_source(&mut self, unit: &str, line: usize, column: usize) -> Source {
        self.warnings.push(format!("{line}:{column}: unit {unit}: unrecognised source annotation"));
        Source::Unknown
    }

    fn inference_record(&mut self, g: &GTerm, unit: &str) -> Option<InferenceRecord> {
        let GTerm::App(_, args) = g else { return None };
        let rule = match &args[0] {
            GTerm::App(w, a) if a.is_empty() => w.clone(),
            _ => return None,
        };
        let status = match &args[1] {
            GTerm::List(items) => items.iter().find_map(|i| match i {
                GTerm::App(w, a) if w == "status" && a.len() == 1 => match &a[0] {
                    GTerm::App(s, b) if b.is_empty() => Some(s.clone()),
                    _ => None,
                },
                _ => None,
            }),
            _ => return None,
        };
        let GTerm::List(parent_terms) = &args[2] else { return None };
        let mut record = InferenceRecord { rule, status, parents: Vec::new(), bindings: Vec::new() };
        for p in parent_terms {
            self.collect_parents(p, unit, &mut record)?;
        }
        Some(record)
    }

    fn collect_parents(&mut self, p: &GTerm, unit: &str, record: &mut InferenceRecord) -> Option<()> {
        match p {
            GTerm::App(w, a) if a.is_empty() => push_unique(&mut record.parents, w),
            GTerm::Number(n) => push_unique(&mut record.parents, n),
            GTerm::App(w, a) if w == "inference" && a.len() == 3 => {
                let nested = self.inference_record(p, unit)?;
                for n in nested.parents {
                    push_unique(&mut record.parents, &n);
                }
                record.bindings.extend(nested.bindings);
            }
            // theory(equality), file(...), introduced(...) parents cite no unit
            GTerm::App(w, _) if w == "theory" || w == "file" || w == "introduced" || w == "creator" => {}
            GTerm::Colon(head, details) => {
                self.collect_parents(head, unit, record)?;
                if let Some(name) = match &**head {
                    GTerm::App(w, a) if a.is_empty() => Some(w.clone()),
                    GTerm::Number(n) => Some(n.clone()),
                    _ => None,
                } {
                    match parse_bindings(details) {
                        Some(s) if !s.is_empty() => record.bindings.push((name, s)),
                        Some(_) => {}
                        None => self
                            .warnings
                            .push(format!("unit {unit}: malformed bindings for parent {name} ignored")),
                    }
                }
            }
            _ => return None,
        }
        Some(())
    }
}

fn push_unique(v: &mut Vec<String>, s: &str) {
    if !v.iter().any(|x| x == s) {
        v.push(s.to_string());
    }
}

/// Reads `[bind(X,$fot(t)), ...]`. Returns `None` when the list is malformed.
fn parse_bindings(g: &GTerm) -> Option<Substitution> {
    let GTerm::List(items) = g else { return None };
    let mut s = Substitution::new();
    for item in items {
        match item {
            GTerm::App(w, a) if w == "bind" && a.len() == 2 => {
                let GTerm::Var(v) = &a[0] else { return None };
                let t = match &a[1] {
                    GTerm::Term(t) => t.clone(),
                    other => gterm_to_term(other)?,
                };
                s.insert(v.clone(), t);
            }
            _ => return None,
        }
    }
    Some(s)
}

fn gterm_to_term(g: &GTerm) -> Option<Term> {
    match g {
        GTerm::Var(v) => Some(Term::Var(v.clone())),
        GTerm::App(f, args) if !f.starts_with('$') => Some(Term::App(
            f.clone(),
            args.iter().map(gterm_to_term).collect::<Option<Vec<_>>>()?,
        )),
        GTerm::Term(t) => Some(t.clone()),
        _ => None,
    }
}

/// Parses TPTP text, resolving `include` directives against a search path.
#[derive(Debug, Clone, Default)]
pub struct TptpReader {
    include_dirs: Vec<PathBuf>,
    warnings: Vec<String>,
}

impl TptpReader {
    pub fn new() -> Self {
        TptpReader::default()
    }

    /// Reader whose include search path starts with `$TPTP`, when set.
    pub fn from_env() -> Self {
        let mut r = TptpReader::new();
        if let Some(root) = std::env::var_os("TPTP") {
            r.include_dirs.push(PathBuf::from(root));
        }
        r
    }

    pub fn with_include_dir(mut self, dir: impl Into<PathBuf>) -> Self {
        self.include_dirs.push(dir.into());
        self
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn take_warnings(&mut self) -> Vec<String> {
        std::mem::take(&mut self.warnings)
    }

    pub fn read_file(&mut self, path: &Path) -> Result<Vec<AnnotatedFormula>, TptpError> {
        let text = std::fs::read_to_string(path).map_err(|e| TptpError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        self.read_str(&text, path.parent())
    }

    /// Parses `text`; includes are looked up relative to `base_dir` first and
    /// then in the configured search path.
    pub fn read_str(&mut self, text: &str, base_dir: Option<&Path>) -> Result<Vec<AnnotatedFormula>, TptpError> {
        let mut out = Vec::new();
        self.read_into(text, base_dir, 0, &mut out)?;
        Ok(out)
    }

    fn read_into(
        &mut self,
        text: &str,
        base_dir: Option<&Path>,
        depth: usize,
        out: &mut Vec<AnnotatedFormula>,
    ) -> Result<(), TptpError> {
        let toks = lex(text)?;
        let mut items = Vec::new();
        {
            let mut p = Parser { toks, pos: 0, depth: 0, warnings: &mut self.warnings };
            while *p.peek() != Tok::Eof {
                let before = p.pos;
                items.push(p.item()?);
                debug_assert!(p.pos > before);
            }
        }
        for item in items {
            match item {
                Item::Unit(u) => out.push(u),
                Item::Include { file, names } => {
                    if depth >= MAX_INCLUDE_DEPTH {
                        return Err(TptpError::IncludeNotFound { file: format!("{file} (include depth exceeded)") });
                    }
                    let path = self.resolve_include(&file, base_dir)?;
                    let text = std::fs::read_to_string(&path).map_err(|e| TptpError::Io {
                        path: path.display().to_string(),
                        message: e.to_string(),
                    })?;
                    let mut included = Vec::new();
                    self.read_into(&text, path.parent(), depth + 1, &mut included)?;
                    if let Some(names) = names {
                        let keep: BTreeSet<&String> = names.iter().collect();
                        included.retain(|u| keep.contains(&u.name));
                    }
                    out.extend(included);
                }
            }
        }
        Ok(())
    }

    fn resolve_include(&self, file: &str, base_dir: Option<&Path>) -> Result<PathBuf, TptpError> {
        let candidates = base_dir.into_iter().map(Path::to_path_buf).chain(self.include_dirs.iter().cloned());
        for dir in candidates {
            let p = dir.join(file);
            if p.is_file() {
                return Ok(p);
            }
        }
        let p = PathBuf::from(file);
        if p.is_absolute() && p.is_file() {
            return Ok(p);
        }
        Err(TptpError::IncludeNotFound { file: file.to_string() })
    }
}

/// Parses a TPTP problem, with includes resolved against `$TPTP`.
pub fn parse_problem(text: &str) -> Result<Vec<AnnotatedFormula>, TptpError> {
    parse_logged(text)
}

/// Parses a TSTP derivation. Unrecognised source annotations become
/// [`Source::Unknown`] and are reported through `log`.
pub fn parse_derivation(text: &str) -> Result<Vec<AnnotatedFormula>, TptpError> {
    parse_logged(text)
}

fn parse_logged(text: &str) -> Result<Vec<AnnotatedFormula>, TptpError> {
    let mut reader = TptpReader::from_env();
    let units = reader.read_str(text, None)?;
    for w in reader.take_warnings() {
        log::warn!("{w}");
    }
    Ok(units)
}

/// Parses a single fof formula, e.g. `![X]:(p(X)=>q(X))`.
pub fn parse_formula(text: &str) -> Result<Formula, TptpError> {
    let mut warnings = Vec::new();
    let mut p = Parser { toks: lex(text)?, pos: 0, depth: 0, warnings: &mut warnings };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return Err(p.err(&["end of input"]));
    }
    Ok(f)
}

pub fn is_lower_word(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_lowercase()) && cs.all(is_alnum)
}

fn is_integer(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_digit())
}

/// Renders a symbol or unit name, single-quoting it when it is not a lower word.
pub fn quote_atom(name: &str) -> String {
    if is_lower_word(name) {
        name.to_string()
    } else {
        let mut s = String::from("'");
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                s.push('\\');
            }
            s.push(c);
        }
        s.push('\'');
        s
    }
}

fn quote_name(name: &str) -> String {
    if is_integer(name) {
        name.to_string()
    } else {
        quote_atom(name)
    }
}

fn write_unitary(out: &mut dyn fmt::Write, f: &Formula) -> fmt::Result {
    match f {
        Formula::True => out.write_str("$true"),
        Formula::False => out.write_str("$false"),
        Formula::Pred(p, args) => write!(out, "{}", Term::App(p.clone(), args.clone())),
        Formula::Eq(l, r) => write!(out, "{l}={r}"),
        Formula::Not(inner) => match &**inner {
            Formula::Eq(l, r) => write!(out, "{l}!={r}"),
            g => {
                out.write_str("~")?;
                write_unitary(out, g)
            }
        },
        Formula::Forall(..) | Formula::Exists(..) => {
            let universal = matches!(f, Formula::Forall(..));
            let mut vars = Vec::new();
            let mut cur = f;
            while let (Formula::Forall(v, b), true) | (Formula::Exists(v, b), false) = (cur, universal) {
                vars.push(v.as_str());
                cur = b;
            }
            write!(out, "{}[{}]:", if universal { "!" } else { "?" }, vars.join(","))?;
            write_unitary(out, cur)
        }
        _ => {
            out.write_str("(")?;
            write_binary(out, f)?;
            out.write_str(")")
        }
    }
}

fn write_binary(out: &mut dyn fmt::Write, f: &Formula) -> fmt::Result {
    let chain = |out: &mut dyn fmt::Write, parts: &[Formula], op: &str| -> fmt::Result {
        for (i, p) in parts.iter().enumerate() {
            if i > 0 {
                out.write_str(op)?;
            }
            write_unitary(out, p)?;
        }
        Ok(())
    };
    match f {
        Formula::And(parts) => chain(out, parts, "&"),
        Formula::Or(parts) => chain(out, parts, "|"),
        Formula::Implies(a, b) => {
            write_unitary(out, a)?;
            out.write_str("=>")?;
            write_unitary(out, b)
        }
        Formula::Iff(a, b) => {
            write_unitary(out, a)?;
            out.write_str("<=>")?;
            write_unitary(out, b)
        }
        other => write_unitary(out, other),
    }
}

/// Writes a formula in TPTP syntax without outer parentheses.
pub fn write_formula(out: &mut dyn fmt::Write, f: &Formula) -> fmt::Result {
    write_binary(out, f)
}

fn write_source(out: &mut String, s: &Source) {
    match s {
        Source::Unknown => {}
        Source::File { file, name } => {
            let _ = write!(out, ", file({}", quote_atom(file));
            if let Some(n) = name {
                let _ = write!(out, ", {}", quote_name(n));
            }
            out.push(')');
        }
        Source::Inference(r) if r.rule == "introduced" && r.parents.is_empty() => {
            let _ = write!(out, ", introduced({})", quote_atom(r.status.as_deref().unwrap_or("unknown")));
        }
        Source::Inference(r) => {
            let _ = write!(out, ", inference({},[", quote_atom(&r.rule));
            if let Some(st) = &r.status {
                let _ = write!(out, "status({})", quote_atom(st));
            }
            out.push_str("],[");
            for (i, p) in r.parents.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&quote_name(p));
                if let Some((_, b)) = r.bindings.iter().find(|(n, _)| n == p) {
                    out.push_str(":[");
                    for (j, (v, t)) in b.iter().enumerate() {
                        if j > 0 {
                            out.push(',');
                        }
                        let _ = write!(out, "bind({v},$fot({t}))");
                    }
                    out.push(']');
                }
            }
            out.push_str("])");
        }
    }
}

/// Writes one unit per line in a form both parse functions accept.
pub fn serialize(units: &[AnnotatedFormula]) -> String {
    let mut out = String::new();
    for u in units {
        let _ = write!(out, "{}({}, {}, ", u.language, quote_name(&u.name), u.role);
        match u.language {
            Language::Fof => {
                let _ = write!(out, "{}", u.formula);
            }
            Language::Cnf => {
                out.push('(');
                let clause = u.clause.clone().or_else(|| Clause::from_formula(&u.formula)).unwrap_or_default();
                if clause.is_empty() {
                    out.push_str("$false");
                }
                for (i, l) in clause.literals.iter().enumerate() {
                    if i > 0 {
                        out.push('|');
                    }
                    let _ = write_unitary(&mut out, &l.to_formula());
                }
                out.push(')');
            }
        }
        write_source(&mut out, &u.source);
        out.push_str(").\n");
    }
    out
}
