use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tptp_mizar::pipeline::{run, Mode, Outcome, RunConfig};

#[derive(Parser)]
#[command(name = "tptp-mizar", version, about = "Translate TPTP problems and E refutations into Mizar-syntax articles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flat article from a TPTP problem
    Problem(Common),
    /// Article with proof from an E TSTP refutation
    Derivation {
        #[command(flatten)]
        common: Common,
        /// Keep every step, skip compression
        #[arg(long)]
        no_compress: bool,
        /// Keep steps that do not contribute to the refutation
        #[arg(long)]
        keep_unused: bool,
        /// Unit to treat as the conjecture
        #[arg(long)]
        conjecture: Option<String>,
        /// Stop compression after this many passes
        #[arg(long)]
        max_passes: Option<usize>,
    },
    /// Is the conjecture obvious from the axioms? Exit 0/1/2 for Obvious/NotObvious/Unknown
    CheckObvious(Common),
}

#[derive(Args)]
struct Common {
    input: PathBuf,
    /// Output directory
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Checker budget in expansion steps
    #[arg(long, default_value_t = tptp_mizar::obvious::DEFAULT_BUDGET)]
    budget: usize,
    #[arg(short, long)]
    verbose: bool,
}

fn config(cmd: Command) -> RunConfig {
    let (mode, c) = match cmd {
        Command::Problem(c) => (Mode::Problem, c),
        Command::CheckObvious(c) => (Mode::CheckObvious, c),
        Command::Derivation { common, no_compress, keep_unused, conjecture, max_passes } => {
            let mut cfg = config(Command::Problem(common));
            cfg.mode = Mode::Derivation;
            cfg.compress = !no_compress;
            cfg.keep_unused = keep_unused;
            cfg.conjecture = conjecture;
            cfg.max_passes = max_passes;
            return cfg;
        }
    };
    RunConfig { output_dir: c.output, budget: c.budget, verbose: c.verbose, ..RunConfig::new(mode, c.input) }
}

fn main() -> ExitCode {
    let cfg = config(Cli::parse().command);
    match run(&cfg) {
        Ok((outcome, warnings)) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
            match &outcome {
                Outcome::Verdict(v) => println!("{}", v.name()),
                Outcome::Written { article, manifest, report } => {
                    if let Some(r) = report {
                        eprintln!("{}", r.summary());
                        if cfg.verbose {
                            for (i, n) in r.per_pass.iter().enumerate() {
                                eprintln!("  pass {}: {n} changes", i + 1);
                            }
                        }
                    }
                    if cfg.verbose {
                        eprintln!("wrote {} and {}", article.display(), manifest.display());
                    }
                }
            }
            ExitCode::from(outcome.exit_code() as u8)
        }
        Err(e) => {
            let detail = e.to_string().replace('\n', " ");
            eprintln!("error: {}: {detail}", e.kind());
            ExitCode::from(2)
        }
    }
}
