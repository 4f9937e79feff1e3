//! `permmap` command-line interface.
//!
//! Exit status: 0 on success, 1 when a check fails or a search ends
//! without a table, 2 on usage or data errors.

mod spec;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use permmap::search::{portfolio, SearchOutcome};
use permmap::tables::{check_constraints, ConstraintFile, SHIPPED};
use permmap::verify::DEFAULT_CEILING;
use permmap::{
    bound, build_code, build_pa, builtin_constraints, verify, verify_pa, A3Table, CodeSpec,
    DistanceMode, Error, IndexSet, MappingTable, SearchProblem, Strategy, VerificationJob,
};

use spec::Resolver;

#[derive(Parser)]
#[command(name = "permmap", version, about = "Distance-preserving mappings from ternary words to permutations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check pairwise distances of a mapping and print a JSON report.
    Verify(VerifyArgs),
    /// Extend a table to a longer domain and print the resulting table.
    Extend(ExtendArgs),
    /// Build a composite mapping and print its table.
    Compose(ComposeArgs),
    /// Search for a table satisfying a constraint set.
    Search(SearchArgs),
    /// Map a ternary code to a permutation array.
    Pa(PaArgs),
    /// Lower bound on P(n, d) from ternary code sizes.
    Bound(BoundArgs),
    /// List, print or check the shipped tables.
    Tables {
        #[command(subcommand)]
        action: TablesAction,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Sampled,
    Stratified,
}

#[derive(Args)]
struct Output {
    /// Write the primary output here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// table:<name|path>, extend:<base>:<n>, p91, p130, u or v.
    #[arg(long)]
    mapping: String,
    /// preserve (dpm) or increase (dim).
    #[arg(long, default_value = "preserve")]
    mode: DistanceMode,
    #[arg(long, value_enum, default_value = "exhaustive")]
    strategy: StrategyArg,
    /// Pair count for sampled and stratified runs.
    #[arg(long, default_value_t = 1_000_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated 1-based output positions deleted before comparing.
    #[arg(long, value_delimiter = ',')]
    project: Option<Vec<usize>>,
    /// Largest pair count an exhaustive run accepts.
    #[arg(long, default_value_t = DEFAULT_CEILING)]
    ceiling: u128,
    /// Worker threads (default: all cores).
    #[arg(long)]
    workers: Option<usize>,
    /// Add wall_ms to the report.
    #[arg(long)]
    timing: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExtendArgs {
    /// Base table name or path.
    #[arg(long)]
    base: String,
    /// Target domain length.
    #[arg(long)]
    n: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, ValueEnum)]
enum CompositeKind {
    P91,
    U,
    V,
    P130,
}

#[derive(Args)]
struct ComposeArgs {
    #[arg(long, value_enum)]
    kind: CompositeKind,
    /// Left block table (G, R) name or path; p130 takes its blocks from U and V.
    #[arg(long)]
    left: Option<String>,
    /// Right block table (H4, S, T) name or path.
    #[arg(long)]
    right: Option<String>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct SearchArgs {
    /// Constraint file with `n`, `k` and constraint lines.
    #[arg(long, conflicts_with = "builtin")]
    constraints: Option<PathBuf>,
    /// Use the constraints of a named block (F, G, H4, R, S, T, U, V).
    #[arg(long)]
    builtin: Option<String>,
    /// Domain length, required with --builtin.
    #[arg(long)]
    n: Option<usize>,
    /// Length increase, required with --builtin.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = permmap::search::DEFAULT_BUDGET)]
    budget: u64,
    /// Shuffle domain and candidate orders with this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Run this many seeded searches in parallel; the lowest seed that succeeds wins.
    #[arg(long)]
    portfolio: Option<u64>,
    #[arg(long, default_value = "found")]
    name: String,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct PaArgs {
    /// golay11, repetition:<n>, hamming:<r> or file:<path>.
    #[arg(long)]
    code: CodeSpec,
    #[arg(long)]
    mapping: String,
    /// Fail unless the realized minimum distance reaches this value.
    #[arg(long)]
    min_distance: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct BoundArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: usize,
    /// Extra `n,d,bound,provenance` tables; repeatable.
    #[arg(long)]
    a3: Vec<PathBuf>,
    /// Skip the entries derived from the built-in codes.
    #[arg(long)]
    no_builtin: bool,
}

#[derive(Subcommand)]
enum TablesAction {
    /// Names and dimensions of the shipped tables.
    List,
    /// Print a table in the listing format.
    Show {
        #[arg(long)]
        name: String,
    },
    /// Check tables against their built-in constraints (all when omitted).
    Check {
        #[arg(long)]
        name: Option<String>,
    },
}

enum Status {
    Ok,
    Failed,
}

fn emit(output: &Output, text: &str) -> Result<(), Error> {
    match &output.out {
        Some(path) => std::fs::write(path, text).map_err(|e| io_error(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| io_error(Path::new("<stdout>"), e))
        }
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn run_verify(r: &Resolver, a: VerifyArgs) -> Result<Status, Error> {
    let mapping = r.mapping(&a.mapping)?;
    let n = mapping.n();
    let strategy = match a.strategy {
        StrategyArg::Exhaustive => Strategy::Exhaustive,
        StrategyArg::Sampled => Strategy::Sampled {
            count: a.samples,
            seed: a.seed,
        },
        StrategyArg::Stratified => Strategy::stratified_even(a.samples, n, a.seed),
    };
    let mut job = VerificationJob::new(mapping, a.mode)
        .strategy(strategy)
        .ceiling(a.ceiling);
    if let Some(p) = a.project {
        job = job.projection(IndexSet::new(p));
    }
    if let Some(w) = a.workers {
        job = job.workers(w);
    }
    let mut report = verify(&job)?;
    eprintln!(
        "{}: {} pairs, {} violations, {} ms",
        report.mapping,
        report.pairs_checked,
        report.violations_total,
        report.wall.as_millis()
    );
    if a.timing {
        report = report.with_timing();
    }
    emit(&a.output, &report.to_json())?;
    Ok(if report.passed() { Status::Ok } else { Status::Failed })
}

fn run_extend(r: &Resolver, a: ExtendArgs) -> Result<Status, Error> {
    let base = r.mapping(&format!("table:{}", a.base))?;
    let t = permmap::extend_to(&base, a.n)?.materialize()?;
    emit(&a.output, &t.to_text())?;
    Ok(Status::Ok)
}

fn run_compose(r: &Resolver, a: ComposeArgs) -> Result<Status, Error> {
    let pick = |given: &Option<String>, default: &str| r.table(given.as_deref().unwrap_or(default));
    let m = match a.kind {
        CompositeKind::P91 => permmap::compose_p91(pick(&a.left, "G")?, pick(&a.right, "H4")?)?,
        CompositeKind::U => permmap::compose_u(pick(&a.left, "R")?, pick(&a.right, "S")?)?,
        CompositeKind::V => permmap::compose_v(pick(&a.left, "R")?, pick(&a.right, "T")?)?,
        CompositeKind::P130 => {
            if a.left.is_some() || a.right.is_some() {
                return Err(Error::InvalidJob(
                    "p130 is built from U and V; override R, S, T through PERMMAP_DATA_DIR".into(),
                ));
            }
            r.mapping("p130")?
        }
    };
    emit(&a.output, &m.materialize()?.to_text())?;
    Ok(Status::Ok)
}

fn run_search(a: SearchArgs) -> Result<Status, Error> {
    let (n, k, constraints) = match (&a.constraints, &a.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
            let f = ConstraintFile::parse(&text)?;
            (f.n, f.k, f.constraints)
        }
        (None, Some(name)) => {
            let (Some(n), Some(k)) = (a.n, a.k) else {
                return Err(Error::InvalidJob("--builtin needs --n and --k".into()));
            };
            (n, k, builtin_constraints(name)?)
        }
        (None, None) => {
            return Err(Error::InvalidJob("give --constraints or --builtin".into()));
        }
    };
    let mut p = SearchProblem::new(n, k, constraints).budget(a.budget).named(a.name);
    if let Some(seed) = a.seed {
        p = p.shuffled(seed);
    }
    let run = match a.portfolio {
        Some(count) => portfolio(&p, &(0..count).collect::<Vec<_>>())?,
        None => permmap::search(&p)?,
    };
    let s = &run.stats;
    eprintln!(
        "expansions {} backtracks {} deepest_row {} candidates {} wall_ms {}",
        s.expansions,
        s.backtracks,
        s.deepest_row,
        s.candidates,
        s.wall.as_millis()
    );
    match run.outcome {
        SearchOutcome::Found(t) => {
            emit(&a.output, &t.to_text())?;
            Ok(Status::Ok)
        }
        SearchOutcome::Exhausted => {
            eprintln!("search exhausted its budget of {} expansions", a.budget);
            Ok(Status::Failed)
        }
        SearchOutcome::Infeasible(why) => {
            eprintln!("infeasible: {why}");
            Ok(Status::Failed)
        }
    }
}

fn run_pa(r: &Resolver, a: PaArgs) -> Result<Status, Error> {
    let code = build_code(&a.code)?;
    if code.realized_distance().is_none() {
        eprintln!("warning: code distance not checked (too many codewords); trusting the header");
    }
    let f = r.mapping(&a.mapping)?;
    let pa = build_pa(&code, &f)?;
    let status = match a.min_distance {
        Some(d) => {
            let report = verify_pa(&pa, d);
            eprintln!(
                "{} permutations, minimum distance {:?}, required {d}: {}",
                report.size,
                report.min_distance,
                if report.passed() { "pass" } else { "fail" }
            );
            if report.passed() {
                Status::Ok
            } else {
                Status::Failed
            }
        }
        None => Status::Ok,
    };
    emit(&a.output, &pa.to_text())?;
    Ok(status)
}

fn run_bound(a: BoundArgs) -> Result<Status, Error> {
    let mut table = if a.no_builtin {
        A3Table::new()
    } else {
        A3Table::builtin()?
    };
    for path in &a.a3 {
        table.load_csv(path)?;
    }
    let b = bound(a.n, a.d, &table)?;
    println!("P({},{}) >= {b}", a.n, a.d);
    Ok(if b.value().is_some() { Status::Ok } else { Status::Failed })
}

fn run_tables(r: &Resolver, action: TablesAction) -> Result<Status, Error> {
    match action {
        TablesAction::List => {
            for name in SHIPPED {
                let t = r.table(name)?;
                println!("{name}\tn={}\tk={}\trows={}", t.n(), t.k(), t.len());
            }
            Ok(Status::Ok)
        }
        TablesAction::Show { name } => {
            print!("{}", r.table(&name)?.to_text());
            Ok(Status::Ok)
        }
        TablesAction::Check { name } => {
            let names: Vec<String> = match name {
                Some(n) => vec![n],
                None => SHIPPED.iter().map(|s| s.to_string()).collect(),
            };
            let mut ok = true;
            for name in names {
                let t: std::sync::Arc<MappingTable> = r.table(&name)?;
                let report = check_constraints(&t, &builtin_constraints(&name)?)?;
                print!("{report}");
                ok &= report.passed();
            }
            Ok(if ok { Status::Ok } else { Status::Failed })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let resolver = Resolver::from_env();
    let result = match cli.command {
        Command::Verify(a) => run_verify(&resolver, a),
        Command::Extend(a) => run_extend(&resolver, a),
        Command::Compose(a) => run_compose(&resolver, a),
        Command::Search(a) => run_search(a),
        Command::Pa(a) => run_pa(&resolver, a),
        Command::Bound(a) => run_bound(a),
        Command::Tables { action } => run_tables(&resolver, action),
    };
    match result {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
