//! Command-line front end. Every command prints `key: value` lines (or
//! table rows) and returns the process exit status.

pub mod gen;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::exactla::{fmt_rational, parse_rational};
use crate::lineage::{count_worlds, pr_exact, PendantMode};
use crate::query::{classify, minimize_query, parse_query, zigzag_branching, zigzag_query, ClassReport, Query};
use crate::reduction::{brute_p2cnf, brute_pp2cnf, brute_signatures, pp2cnf_via_ccp, type1_pipeline, P2cnf, Pp2cnf};
use crate::tid::read_tid;
use crate::Error;

#[derive(Parser, Debug)]
#[command(
    name = "gfomc",
    version,
    about = "gfomc: generalized model counting over tuple-independent databases",
    long_about = "Exact query probabilities, query classification and #P2CNF reductions for bipartite universally quantified queries over tuple-independent databases. Rationals print as num/den."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a query: safety, side types, path length, finality.
    Classify { query: String },
    /// Exact probability of a query over a database.
    Prob { query: String, tid: PathBuf },
    /// Number of worlds over the uncertain tuples that satisfy the query.
    Count { query: String, tid: PathBuf },
    /// Minimize a query under clause homomorphisms.
    Minimize { query: String },
    /// Zig-zag query and its classification.
    Zg { query: String },
    /// Recover #P2CNF and all signature counts through query probabilities.
    ReduceT1 {
        query: String,
        p2cnf: PathBuf,
        /// Endpoint probability of the blocks.
        #[arg(long, default_value = "1/2")]
        c: String,
        /// Pendant block values: `semantic` (alias `semantic-weighted`) or `paper-sum`.
        #[arg(long, default_value = "semantic")]
        mode: String,
        /// Compare with brute-force enumeration.
        #[arg(long)]
        check: bool,
    },
    /// Count a bipartite positive 2CNF through the coloring problem.
    Ccp {
        pp2cnf: PathBuf,
        /// Colors on the left side.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// Colors on the right side.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Compare with brute-force enumeration.
        #[arg(long)]
        check: bool,
    },
    /// Run a property suite.
    Verify {
        /// lemma12, blocks, nonsingular, mobius, ccp, products, zg, independence or all.
        #[arg(required_unless_present = "replay")]
        suite: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of applicable random instances per randomized item.
        #[arg(long)]
        trials: Option<usize>,
        /// Re-run a single trial from a saved counterexample file.
        #[arg(long)]
        replay: Option<PathBuf>,
        /// Run only the named item of the suite.
        #[arg(long)]
        item: Option<String>,
        /// Directory for counterexample files.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

/// Reads a query from a file, or takes the argument as query text when no
/// such file exists and it looks like a query.
pub fn load_query(arg: &str) -> Result<Query, Error> {
    let path = Path::new(arg);
    if path.is_file() {
        return parse_query(&std::fs::read_to_string(path)?);
    }
    if arg.contains("forall") || arg.trim() == "true" || arg.trim() == "false" {
        return parse_query(arg);
    }
    Err(Error::Io(std::io::Error::new(std::io::ErrorKind::NotFound, format!("no query file `{arg}`"))))
}

fn read_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn class_lines(r: &ClassReport, out: &mut Vec<String>) {
    out.push(format!("bipartite: {}", r.bipartite));
    out.push(format!("types: {}-{}", r.left_type, r.right_type));
    out.push(format!("unsafe: {}", r.is_unsafe));
    out.push(format!("length: {}", r.length.map_or("none".to_string(), |k| k.to_string())));
}

/// Output lines and the pass/fail status of one command.
struct Report {
    lines: Vec<String>,
    ok: bool,
}

fn execute(cmd: &Command, out: &mut dyn Write) -> Result<Report, Error> {
    let mut lines = Vec::new();
    let mut ok = true;
    match cmd {
        Command::Classify { query } => {
            let r = classify(&load_query(query)?);
            class_lines(&r, &mut lines);
            if let Some(p) = &r.witness_path {
                lines.push(format!("path: {}", join(p)));
            }
            lines.push(format!("final: {}", r.is_final));
            lines.push(format!("forbidden: {}", r.forbidden));
            lines.push(format!("ubiquitous-left: {}", join(&r.ubiquitous_left)));
            lines.push(format!("ubiquitous-right: {}", join(&r.ubiquitous_right)));
            lines.push(format!("minimized: {}", r.query));
            lines.extend(r.diagnostics.iter().map(|d| format!("note: {d}")));
        }
        Command::Prob { query, tid } => {
            let q = load_query(query)?;
            let db = read_tid(tid)?;
            lines.push(format!("probability: {}", fmt_rational(&pr_exact(&q, &db)?)));
        }
        Command::Count { query, tid } => {
            let q = load_query(query)?;
            let db = read_tid(tid)?;
            lines.push(format!("uncertain-tuples: {}", db.free_probs().len()));
            lines.push(format!("worlds: {}", count_worlds(&q, &db)?));
        }
        Command::Minimize { query } => {
            let q = minimize_query(&load_query(query)?);
            lines.push(format!("clauses: {}", q.clauses.len()));
            lines.push(format!("minimized: {q}"));
        }
        Command::Zg { query } => {
            let q = load_query(query)?;
            let before = classify(&q);
            let z = zigzag_query(&q)?;
            let after = classify(&z);
            lines.push(format!("branching: {}", zigzag_branching(&before.query)));
            lines.push(format!("source-length: {}", before.length.map_or("none".to_string(), |k| k.to_string())));
            class_lines(&after, &mut lines);
            lines.push(format!("zigzag: {z}"));
        }
        Command::ReduceT1 { query, p2cnf, c, mode, check } => {
            let q = load_query(query)?;
            let phi: P2cnf = read_text(p2cnf)?.parse()?;
            let c = parse_rational(c)?;
            let mode: PendantMode = mode.parse()?;
            let r = type1_pipeline(&q, &phi, &c, mode)?;
            lines.push(format!("count: {}", r.phi_count));
            lines.push(format!("c: {}", fmt_rational(&c)));
            lines.push(format!("mode: {}", if mode == PendantMode::Semantic { "semantic" } else { "paper-sum" }));
            lines.push(format!("grid-rows: {}", join(r.grid_rows.iter().map(|(a, b)| format!("{a},{b}")))));
            lines.push(format!("pendant-lengths: {}", join(&r.pendant_lengths)));
            lines.push(format!("det-n: {}", fmt_rational(&r.det_n)));
            lines.push(format!("det-m: {}", fmt_rational(&r.det_m)));
            lines.extend(r.diagnostics.iter().map(|d| format!("note: {d}")));
            lines.push("columns: k00 k01 k11 q0 q1 count".into());
            for (s, n) in &r.table.counts {
                lines.push(format!("row: {} {} {} {} {} {n}", s.k00, s.k01, s.k11, s.q0, s.q1));
            }
            if *check {
                let brute = brute_p2cnf(&phi)?;
                let table_ok = r.table == brute_signatures(&phi)?;
                lines.push(format!("brute-count: {brute}"));
                lines.push(format!("table-matches: {table_ok}"));
                ok = table_ok && brute == r.phi_count;
            }
        }
        Command::Ccp { pp2cnf, m, n, check } => {
            let phi: Pp2cnf = read_text(pp2cnf)?.parse()?;
            let count = pp2cnf_via_ccp(&phi, *m, *n)?;
            lines.push(format!("colors: {m} {n}"));
            lines.push(format!("count: {count}"));
            if *check {
                let brute = brute_pp2cnf(&phi)?;
                lines.push(format!("brute-count: {brute}"));
                ok = brute == count;
            }
        }
        Command::Verify { suite, seed, trials, replay, item, out_dir } => {
            return run_verify(suite.as_deref(), item.as_deref(), *seed, *trials, replay.as_deref(), out_dir, out)
        }
    }
    Ok(Report { lines, ok })
}

fn run_verify(
    suite: Option<&str>,
    only: Option<&str>,
    seed: u64,
    trials: Option<usize>,
    replay: Option<&Path>,
    out_dir: &Path,
    out: &mut dyn Write,
) -> Result<Report, Error> {
    if let Some(file) = replay {
        let cx = verify::Counterexample::parse(&read_text(file)?)?;
        let mut lines = vec![format!("replay: {}.{} seed={} trial={}", cx.suite, cx.item, cx.seed, cx.trial)];
        let failure = verify::replay(&cx)?;
        let ok = failure.is_none();
        if let Some(msg) = failure {
            lines.push(format!("counterexample: {msg}"));
        }
        lines.push(format!("result: {}", if ok { "pass" } else { "fail" }));
        return Ok(Report { lines, ok });
    }
    let mut items = verify::items_of(suite.unwrap_or("all"))?;
    if let Some(name) = only {
        items.retain(|i| i.name == name);
        if items.is_empty() {
            return Err(Error::Domain(format!("no item `{name}` in the selected suite")));
        }
    }
    writeln!(out, "seed: {seed}")?;
    let (mut passed, mut failed) = (0, 0);
    for item in items {
        let r = verify::run_item(item, seed, trials);
        writeln!(out, "{}", r.line())?;
        match &r.failure {
            None => passed += 1,
            Some(cx) => {
                failed += 1;
                writeln!(out, "  counterexample: trial {}: {}; instance: {}", cx.trial, cx.message, cx.instance)?;
                match verify::save(cx, out_dir) {
                    Ok(path) => writeln!(out, "  replay-file: {}", path.display())?,
                    Err(e) => writeln!(out, "  replay-file: not written ({e})")?,
                }
            }
        }
        out.flush()?;
    }
    let lines = vec![format!("summary: {passed} passed, {failed} failed"), format!("result: {}", if failed == 0 { "pass" } else { "fail" })];
    Ok(Report { lines, ok: failed == 0 })
}

/// Parses `args` (program name first), runs the command and writes its
/// report to `out`. Returns the exit status: 0 when every check passes, 1 on
/// computational failure, 2 on usage errors.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    let echo = join(args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()));
    let _ = writeln!(out, "command: {echo}");
    match execute(&cli.command, out) {
        Ok(report) => {
            for l in &report.lines {
                let _ = writeln!(out, "{l}");
            }
            if report.ok {
                0
            } else {
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            let usage = matches!(&cli.command, Command::Verify { .. }) && matches!(e, Error::Domain(_));
            if usage {
                2
            } else {
                1
            }
        }
    }
}
