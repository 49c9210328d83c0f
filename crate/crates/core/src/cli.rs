//! The `dpl` command line.
//!
//! ```text
//! dpl prove [--global | --vocab a,b] [--dot FILE] [--json FILE] [--trace FILE] FORMULA
//! dpl sat   [--global | --vocab a,b] ... FORMULA
//! dpl prove -f FILE [--jobs N]
//! dpl atoms [--vocab a,b] [--eq "t1 = t2"]... TERM
//! ```
//!
//! Exit codes: 0 VALID/SAT, 1 INVALID/UNSAT, 2 usage or parse error,
//! 3 resource limit.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::algebra::BooleanTheory;
use crate::error::{DplError, ParseError};
use crate::semantics::{to_dot, to_json, VStructure};
use crate::syntax::{
    parse_action, parse_formula_open, parse_formula_with_actions, Formula,
    Vocabulary,
};
use crate::validity::{check_global_with, check_local_with, check_sat_with, CheckOptions, Mode, Report};

pub const EXIT_POSITIVE: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "dpl", version, about = "Tableau prover for a deontic action logic")]
struct Cli {
    /// Suppress the version banner on stderr.
    #[arg(short, long, global = true)]
    quiet: bool,
    /// Print the vocabulary, search statistics and models.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide validity (VALID / INVALID).
    Prove(Query),
    /// Decide satisfiability (SAT / UNSAT).
    Sat(Query),
    /// List the atoms below an action term.
    Atoms(AtomsArgs),
}

#[derive(Debug, Args)]
struct Query {
    /// Formula text; omit when reading formulae from a file.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    formula: Option<String>,
    /// Check over every vocabulary extending the formula's actions (the default).
    #[arg(long, conflicts_with = "vocab")]
    global: bool,
    /// Check over exactly these actions, comma separated.
    #[arg(long, value_delimiter = ',')]
    vocab: Option<Vec<String>>,
    /// Write the countermodel or model as Graphviz DOT.
    #[arg(long, value_name = "FILE", conflicts_with = "file")]
    dot: Option<PathBuf>,
    /// Write the countermodel or model as JSON.
    #[arg(long, visible_alias = "model", value_name = "FILE", conflicts_with = "file")]
    json: Option<PathBuf>,
    /// Write the tableau search tree as JSON.
    #[arg(long, value_name = "FILE", conflicts_with = "file")]
    trace: Option<PathBuf>,
    /// Write the tableau search tree as indented text.
    #[arg(long, value_name = "FILE", conflicts_with = "file")]
    trace_text: Option<PathBuf>,
    /// Refuse global checks that need more fresh actions than this.
    #[arg(long, value_name = "N")]
    max_fresh: Option<usize>,
    /// Read one formula per line; `#` starts a comment.
    #[arg(short = 'f', long = "file", value_name = "FILE")]
    file: Option<PathBuf>,
    /// Worker threads for file mode.
    #[arg(long, value_name = "N", default_value_t = 1)]
    jobs: usize,
    /// Explore the first branching points concurrently.
    #[arg(long)]
    parallel: bool,
}

#[derive(Debug, Args)]
struct AtomsArgs {
    term: String,
    /// Actions, comma separated; defaults to those occurring in the input.
    #[arg(long, value_delimiter = ',')]
    vocab: Option<Vec<String>>,
    /// An equation `t1 = t2` to assume; repeatable.
    #[arg(long = "eq", value_name = "EQUATION")]
    equations: Vec<String>,
}

/// A failure with its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn from_error(e: DplError, source: Option<&str>) -> Self {
        let code = if e.is_resource_limit() {
            EXIT_RESOURCE
        } else {
            EXIT_USAGE
        };
        let message = match (&e, source) {
            (DplError::Parse(p), Some(text)) => render_parse_error(p, text),
            _ => e.to_string(),
        };
        Failure { code, message }
    }
}

fn render_parse_error(e: &ParseError, text: &str) -> String {
    let line = text.lines().nth(e.line.saturating_sub(1)).unwrap_or("");
    let caret = " ".repeat(line[..].chars().take(e.column.saturating_sub(1)).count());
    format!("{e}\n  {line}\n  {caret}^")
}

/// Runs the command line and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// [`run`] with explicit output streams.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_POSITIVE
            };
        }
    };
    if !cli.quiet {
        let _ = writeln!(err, "dpl {}", env!("CARGO_PKG_VERSION"));
    }
    let result = match &cli.command {
        Command::Prove(q) => query(q, true, cli.verbose, out, err),
        Command::Sat(q) => query(q, false, cli.verbose, out, err),
        Command::Atoms(a) => atoms(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn actions_of(vocab: &Option<Vec<String>>) -> Option<BTreeSet<String>> {
    vocab
        .as_ref()
        .map(|names| names.iter().map(|n| n.trim().to_string()).collect())
}

fn parse_query_formula(text: &str, actions: Option<&BTreeSet<String>>) -> Result<Formula, DplError> {
    Ok(match actions {
        Some(actions) => parse_formula_with_actions(text, actions)?,
        None => parse_formula_open(text)?,
    })
}

fn check(
    f: &Formula,
    vocab: Option<&Vocabulary>,
    validity: bool,
    options: &CheckOptions,
) -> Result<Report, DplError> {
    match (vocab, validity) {
        (Some(v), true) => check_local_with(f, v, options),
        (None, true) => check_global_with(f, options),
        (Some(v), false) => check_sat_with(f, &Mode::Local(v.clone()), options),
        (None, false) => check_sat_with(f, &Mode::Global, options),
    }
}

fn exit_code(report: &Report) -> i32 {
    if report.verdict.is_positive() {
        EXIT_POSITIVE
    } else {
        EXIT_NEGATIVE
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn describe_model(m: &VStructure) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "worlds: {}", m.worlds.join(", "));
    let _ = writeln!(s, "events: {}", m.events.join(", "));
    for &(w, e, v) in &m.transitions {
        let _ = writeln!(s, "  {} -[{}]-> {}", m.worlds[w], m.events[e], m.worlds[v]);
    }
    for &(w, e) in &m.permitted {
        let _ = writeln!(s, "  permitted at {}: {}", m.worlds[w], m.events[e]);
    }
    for (p, ws) in &m.propositions {
        let names: Vec<&str> = ws.iter().map(|&w| m.worlds[w].as_str()).collect();
        let _ = writeln!(s, "  {p} holds at: {{{}}}", names.join(", "));
    }
    s
}

fn describe_report(report: &Report) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "vocabulary: {{{}}}", report.vocabulary.actions().join(", "));
    if report.fresh_actions > 0 {
        let _ = writeln!(s, "fresh actions: {}", report.fresh_actions);
    }
    let st = report.stats;
    let _ = writeln!(
        s,
        "branches: {}, rule applications: {}, peak labeled formulae: {}",
        st.branches, st.rule_applications, st.peak_live_formulas
    );
    if let Some(m) = report.verdict.model() {
        s.push_str(&describe_model(m));
    }
    s
}

fn query(
    q: &Query,
    validity: bool,
    verbose: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let actions = actions_of(&q.vocab);
    let vocab = match &actions {
        Some(a) => Some(
            Vocabulary::new(a.iter().cloned(), Vec::<String>::new())
                .map_err(|e| Failure::from_error(e, None))?,
        ),
        None => None,
    };
    if q.jobs == 0 {
        return Err(Failure::usage("--jobs must be at least 1"));
    }
    let options = CheckOptions {
        record_trace: q.trace.is_some() || q.trace_text.is_some(),
        parallel: q.parallel,
        max_fresh: q.max_fresh,
    };
    if let Some(path) = &q.file {
        return batch(path, actions.as_ref(), vocab.as_ref(), validity, verbose, &options, q.jobs, out, err);
    }

    let text = q.formula.as_deref().expect("clap requires a formula");
    let f = parse_query_formula(text, actions.as_ref()).map_err(|e| Failure::from_error(e, Some(text)))?;
    let report = check(&f, vocab.as_ref(), validity, &options).map_err(|e| Failure::from_error(e, None))?;
    let _ = writeln!(out, "{}", report.verdict.label());
    if verbose {
        let _ = write!(out, "{}", describe_report(&report));
    }
    if let Some(trace) = &report.trace {
        if let Some(path) = &q.trace {
            write_file(path, &trace.to_json())?;
        }
        if let Some(path) = &q.trace_text {
            write_file(path, &trace.to_text())?;
        }
    }
    match report.verdict.model() {
        Some(m) => {
            if let Some(path) = &q.dot {
                write_file(path, &to_dot(m))?;
            }
            if let Some(path) = &q.json {
                write_file(path, &to_json(m))?;
            }
        }
        None if q.dot.is_some() || q.json.is_some() => {
            let _ = writeln!(err, "note: no model to write for a {} verdict", report.verdict.label());
        }
        None => {}
    }
    Ok(exit_code(&report))
}

#[allow(clippy::too_many_arguments)]
fn batch(
    path: &Path,
    actions: Option<&BTreeSet<String>>,
    vocab: Option<&Vocabulary>,
    validity: bool,
    verbose: bool,
    options: &CheckOptions,
    jobs: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let contents = std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))?;
    let lines: Vec<(usize, &str)> = contents
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let solve = |&(_, text): &(usize, &str)| -> Result<Report, Failure> {
        let f = parse_query_formula(text, actions).map_err(|e| Failure::from_error(e, Some(text)))?;
        check(&f, vocab, validity, options).map_err(|e| Failure::from_error(e, None))
    };
    let results = map_jobs(&lines, jobs, solve);

    let mut code = EXIT_POSITIVE;
    let rank = |c: i32| match c {
        EXIT_USAGE => 3,
        EXIT_RESOURCE => 2,
        EXIT_NEGATIVE => 1,
        _ => 0,
    };
    for ((line, text), result) in lines.iter().zip(results) {
        let c = match result {
            Ok(report) => {
                let _ = writeln!(out, "{}\t{text}", report.verdict.label());
                if verbose {
                    let _ = write!(out, "{}", describe_report(&report));
                }
                exit_code(&report)
            }
            Err(f) => {
                let _ = writeln!(out, "ERROR\t{text}");
                let _ = writeln!(err, "error: {}:{line}: {}", path.display(), f.message);
                f.code
            }
        };
        if rank(c) > rank(code) {
            code = c;
        }
    }
    Ok(code)
}

/// Applies `f` to every item, on `jobs` threads when parallelism is
/// available, keeping input order.
fn map_jobs<T: Sync, R: Send>(items: &[T], jobs: usize, f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    #[cfg(feature = "parallel")]
    if jobs > 1 {
        use rayon::prelude::*;
        if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
            return pool.install(|| items.par_iter().map(&f).collect());
        }
    }
    let _ = jobs;
    items.iter().map(f).collect()
}

fn atoms(a: &AtomsArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut equations = Vec::new();
    for text in &a.equations {
        let f = parse_formula_open(text).map_err(|e| Failure::from_error(e.into(), Some(text)))?;
        match f {
            Formula::Eq(l, r) => equations.push((l, r)),
            _ => return Err(Failure::usage(format!("`{text}` is not an equation `t1 = t2`"))),
        }
    }
    let term = parse_action(&a.term, None).map_err(|e| Failure::from_error(e.into(), Some(&a.term)))?;
    let names: BTreeSet<String> = match actions_of(&a.vocab) {
        Some(names) => names,
        None => {
            let mut names = BTreeSet::new();
            term.collect_actions(&mut names);
            for (l, r) in &equations {
                l.collect_actions(&mut names);
                r.collect_actions(&mut names);
            }
            names
        }
    };
    let vocab = Vocabulary::new(names, Vec::<String>::new()).map_err(|e| Failure::from_error(e, None))?;
    let mut used = BTreeSet::new();
    term.collect_actions(&mut used);
    for (l, r) in &equations {
        l.collect_actions(&mut used);
        r.collect_actions(&mut used);
    }
    if let Some(x) = used.iter().find(|x| !vocab.has_action(x)) {
        return Err(Failure::usage(format!("undeclared action `{x}`")));
    }
    let theory = BooleanTheory::from_equations(&vocab, equations).map_err(|e| Failure::from_error(e, None))?;
    for atom in theory.atoms_below(&term).map_err(|e| Failure::from_error(e, None))? {
        let _ = writeln!(out, "{}", atom.render(&vocab));
    }
    Ok(EXIT_POSITIVE)
}
