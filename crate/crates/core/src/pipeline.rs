//! File-level plumbing: read a TPTP input, translate, write `<stem>.miz`
//! and `<stem>.env`.

use std::path::{Path, PathBuf};

use crate::compress::{compress, CompressOptions, CompressionReport};
use crate::derivation::build_graph;
use crate::error::Error;
use crate::mizar::{build_article, render_article, render_manifest, translate_problem, ArticleError, ArticleModel, BuildOptions, EnvironmentManifest};
use crate::obvious::{is_obvious, ObviousnessQuery, ObviousnessVerdict, DEFAULT_BUDGET};
use crate::tptp::{AnnotatedFormula, Role, TptpReader};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Problem,
    Derivation,
    CheckObvious,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub input: PathBuf,
    /// Defaults to the current directory.
    pub output_dir: Option<PathBuf>,
    pub compress: bool,
    pub keep_unused: bool,
    pub budget: usize,
    pub conjecture: Option<String>,
    pub max_passes: Option<usize>,
    pub verbose: bool,
}

impl RunConfig {
    pub fn new(mode: Mode, input: impl Into<PathBuf>) -> Self {
        RunConfig {
            mode,
            input: input.into(),
            output_dir: None,
            compress: true,
            keep_unused: false,
            budget: DEFAULT_BUDGET,
            conjecture: None,
            max_passes: None,
            verbose: false,
        }
    }
}

/// Options for an in-memory derivation translation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TranslateOptions {
    pub compress: bool,
    pub keep_unused: bool,
    pub budget: usize,
    pub conjecture: Option<String>,
    pub max_passes: Option<usize>,
}

impl Default for TranslateOptions {
    fn default() -> Self {
        TranslateOptions { compress: true, keep_unused: false, budget: DEFAULT_BUDGET, conjecture: None, max_passes: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub article: ArticleModel,
    pub manifest: EnvironmentManifest,
    /// Present when compression ran.
    pub report: Option<CompressionReport>,
}

impl Translation {
    pub fn article_text(&self) -> String {
        render_article(&self.article)
    }

    pub fn manifest_text(&self) -> String {
        render_manifest(&self.manifest)
    }
}

/// Derivation units to article: graph, optional pruning, build, optional
/// compression.
pub fn translate_derivation(units: Vec<AnnotatedFormula>, opts: &TranslateOptions) -> Result<Translation, Error> {
    let mut g = build_graph(units)?;
    if let Some(c) = &opts.conjecture {
        g.designate_conjecture(c)?;
    }
    if !opts.keep_unused {
        g = g.prune_unused();
    }
    let (article, manifest) = build_article(&g, &BuildOptions { budget: opts.budget })?;
    if !opts.compress {
        return Ok(Translation { article, manifest, report: None });
    }
    let copts = CompressOptions { budget: opts.budget, max_passes: opts.max_passes };
    let (article, report) = compress(&article, &manifest, &copts);
    Ok(Translation { article, manifest, report: Some(report) })
}

/// The query asked by `check-obvious`: the conjecture from the other units.
pub fn obviousness_query(units: &[AnnotatedFormula], budget: usize) -> Result<ObviousnessQuery, Error> {
    let conjectures: Vec<&AnnotatedFormula> = units.iter().filter(|u| u.role == Role::Conjecture).collect();
    let conclusion = match conjectures.as_slice() {
        [] => return Err(ArticleError::NoConjecture.into()),
        [c] => c.formula.universal_closure(),
        many => return Err(ArticleError::MultipleConjectures(many.iter().map(|u| u.name.clone()).collect()).into()),
    };
    let premises = units.iter().filter(|u| u.role != Role::Conjecture).map(|u| u.formula.universal_closure()).collect();
    Ok(ObviousnessQuery::new(premises, conclusion).with_budget(budget))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Written { article: PathBuf, manifest: PathBuf, report: Option<CompressionReport> },
    Verdict(ObviousnessVerdict),
}

impl Outcome {
    /// 0 on success; check-obvious maps Obvious/NotObvious/Unknown to 0/1/2.
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Written { .. } | Outcome::Verdict(ObviousnessVerdict::Obvious(_)) => 0,
            Outcome::Verdict(ObviousnessVerdict::NotObvious) => 1,
            Outcome::Verdict(ObviousnessVerdict::Unknown) => 2,
        }
    }
}

fn write(path: &Path, text: &str) -> Result<(), Error> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Runs one invocation. Reader warnings are returned alongside so the
/// caller decides where they go.
pub fn run(cfg: &RunConfig) -> Result<(Outcome, Vec<String>), Error> {
    if !cfg.input.is_file() {
        let e = std::io::Error::new(std::io::ErrorKind::NotFound, "no such file");
        return Err(Error::io(&cfg.input, e));
    }
    let mut reader = TptpReader::from_env();
    let units = reader.read_file(&cfg.input)?;
    let warnings = reader.take_warnings();
    let translation = match cfg.mode {
        Mode::CheckObvious => {
            let q = obviousness_query(&units, cfg.budget)?;
            return Ok((Outcome::Verdict(is_obvious(&q)), warnings));
        }
        Mode::Problem => {
            let (article, manifest) = translate_problem(&units)?;
            Translation { article, manifest, report: None }
        }
        Mode::Derivation => {
            let opts = TranslateOptions {
                compress: cfg.compress,
                keep_unused: cfg.keep_unused,
                budget: cfg.budget,
                conjecture: cfg.conjecture.clone(),
                max_passes: cfg.max_passes,
            };
            translate_derivation(units, &opts)?
        }
    };
    let dir = cfg.output_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let stem = cfg.input.file_stem().map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    let article = dir.join(format!("{stem}.miz"));
    let manifest = dir.join(format!("{stem}.env"));
    write(&article, &translation.article_text())?;
    write(&manifest, &translation.manifest_text())?;
    Ok((Outcome::Written { article, manifest, report: translation.report }, warnings))
}
