//! `fcax`: bases, simulated explorations, shared lattices, conflict
//! reports, and the session service.

use std::fs;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use fcax_core::driver::{run_exploration, run_system};
use fcax_core::formats::{artifacts, load_session, parse_cxt, parse_imp, save_session, write_imp, SessionDocument, SessionState};
use fcax_core::{
    canonical_base, conflict_report, lattice_dot, lattice_text, relative_canonical_base, shared_lattice, AttributeUniverse,
    Exploration, ExpertRef, ImplicationSet, IncompleteContext, ReportOptions, SimulatedView, SubsetSchedule,
    SystemExploration, TieBreak,
};

#[derive(Parser)]
#[command(name = "fcax", version, about = "Attribute exploration with several partial, possibly contradicting experts")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Group,
    System,
}

#[derive(Clone, Copy, ValueEnum)]
enum Tie {
    Lexicographic,
    ReverseLexicographic,
}

#[derive(Clone, Copy, ValueEnum)]
enum LatticeFormat {
    Text,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Print the canonical base of a formal context, relative to optional
    /// background implications.
    Base {
        #[arg(long, value_name = "FILE.cxt")]
        context: PathBuf,
        #[arg(long, value_name = "FILE.imp")]
        background: Option<PathBuf>,
    },
    /// Explore with simulated experts and write the results to a directory.
    Explore {
        /// An expert view `NAME=ctx.cxt[:theory.imp]`; without a theory a
        /// formal context answers with its own implications.
        #[arg(long = "view", value_name = "NAME=CTX[:IMP]", required = true)]
        views: Vec<String>,
        #[arg(long, value_enum, default_value = "group")]
        mode: Mode,
        /// Explicit subset order for system mode: `A,B;A;B`.
        #[arg(long)]
        subsets: Option<String>,
        #[arg(long, value_enum, default_value = "lexicographic")]
        tie_break: Tie,
        /// Background implications for group mode.
        #[arg(long, value_name = "FILE.imp")]
        background: Option<PathBuf>,
        /// Experts refute with a model of their theory when no stored
        /// object does, instead of answering "unknown".
        #[arg(long)]
        complete: bool,
        /// Explore subsets of equal size on this many threads.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// List the concepts of a context of shared implications.
    Lattice {
        #[arg(long, value_name = "C.cxt")]
        shared: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: LatticeFormat,
    },
    /// Print the conflict report of a session.
    Report {
        /// An output directory of `explore`, or a session file.
        #[arg(long, value_name = "DIR")]
        session: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: ReportFormat,
        /// Fraction of experts above which a refuted question counts as
        /// mostly accepted.
        #[arg(long, default_value_t = 0.5)]
        majority: f64,
    },
    /// Run the session service.
    Serve {
        #[arg(long, env = "FCAX_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "FCAX_HOST", default_value = "127.0.0.1")]
        host: IpAddr,
        #[arg(long, env = "FCAX_DATA", default_value = "fcax-data")]
        data: PathBuf,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn read_context(path: &Path) -> Result<IncompleteContext> {
    Ok(parse_cxt(&read(path)?).with_context(|| format!("parsing {}", path.display()))?.context)
}

fn read_imp(path: &Path, universe: &AttributeUniverse) -> Result<ImplicationSet> {
    parse_imp(&read(path)?, universe).with_context(|| format!("parsing {}", path.display()))
}

fn base(context: &Path, background: Option<&Path>) -> Result<()> {
    let ctx = read_context(context)?
        .into_formal()
        .with_context(|| format!("{} must be a formal context", context.display()))?;
    let bg = match background {
        Some(p) => read_imp(p, ctx.universe())?,
        None => ImplicationSet::new(ctx.universe().clone()),
    };
    print!("{}", write_imp(&relative_canonical_base(&ctx, &bg)?)?);
    Ok(())
}

/// Splits `NAME=ctx[:imp]`; the theory path is whatever follows the last
/// `:` when it ends in `.imp`.
fn split_view(spec: &str) -> Result<(String, PathBuf, Option<PathBuf>)> {
    let Some((name, rest)) = spec.split_once('=') else {
        bail!("view {spec:?} is not NAME=ctx.cxt[:theory.imp]");
    };
    if name.is_empty() || rest.is_empty() {
        bail!("view {spec:?} is not NAME=ctx.cxt[:theory.imp]");
    }
    match rest.rsplit_once(':') {
        Some((ctx, imp)) if imp.ends_with(".imp") => Ok((name.to_string(), ctx.into(), Some(imp.into()))),
        _ => Ok((name.to_string(), rest.into(), None)),
    }
}

fn load_views(specs: &[String], complete: bool) -> Result<(AttributeUniverse, Vec<(String, SimulatedView)>)> {
    let mut universe: Option<AttributeUniverse> = None;
    let mut views = Vec::new();
    for spec in specs {
        let (name, ctx_path, imp_path) = split_view(spec)?;
        let ctx = read_context(&ctx_path)?;
        match &universe {
            Some(u) if u != ctx.universe() => {
                bail!("{} has other attributes than the first view", ctx_path.display())
            }
            Some(_) => {}
            None => universe = Some(ctx.universe().clone()),
        }
        let theory = match &imp_path {
            Some(p) => read_imp(p, ctx.universe())?,
            None if ctx.is_formal() => canonical_base(&ctx.clone().into_formal()?)?,
            None => ImplicationSet::new(ctx.universe().clone()),
        };
        let view = if complete {
            SimulatedView::complete(ctx, theory)
        } else {
            SimulatedView::partial(ctx, theory)
        }
        .with_context(|| format!("view {name}"))?;
        views.push((name, view));
    }
    Ok((universe.expect("at least one view"), views))
}

fn parse_subsets(text: &str) -> Vec<Vec<String>> {
    text.split(';')
        .map(|s| s.split(',').map(|e| e.trim().to_string()).filter(|e| !e.is_empty()).collect())
        .collect()
}

struct ExploreArgs<'a> {
    views: &'a [String],
    mode: Mode,
    subsets: Option<&'a str>,
    tie: TieBreak,
    background: Option<&'a Path>,
    complete: bool,
    jobs: usize,
    out: &'a Path,
}

fn explore(args: ExploreArgs<'_>) -> Result<()> {
    let (universe, views) = load_views(args.views, args.complete)?;
    let ids: Vec<String> = views.iter().map(|(id, _)| id.clone()).collect();
    let experts: Vec<ExpertRef> = ids.iter().map(|id| ExpertRef::new(id.clone())).collect();
    let examples = vec![IncompleteContext::empty(universe.clone()); views.len()];
    let (state, prompts) = match args.mode {
        Mode::Group => {
            if args.subsets.is_some() {
                bail!("--subsets applies to --mode system only");
            }
            let background = match args.background {
                Some(p) => read_imp(p, &universe)?,
                None => ImplicationSet::new(universe.clone()),
            };
            let mut x = Exploration::start(universe, experts, examples, background)?;
            let prompts = run_exploration(&mut x, &views)?;
            (SessionState::Group(x), prompts.len())
        }
        Mode::System => {
            if args.background.is_some() {
                bail!("--background applies to --mode group only");
            }
            let schedule = match args.subsets {
                Some(s) => SubsetSchedule::custom(&ids, &parse_subsets(s))?,
                None => SubsetSchedule::full(&ids, args.tie)?,
            };
            let mut s = SystemExploration::start(universe, experts, examples, None, schedule)?;
            let prompts = run_system(&mut s, &views, args.jobs.max(1))?;
            (SessionState::System(s), prompts.len())
        }
    };
    let mut files = artifacts(&state)?;
    files.insert("session.json".to_string(), save_session(&SessionDocument::new(state)));
    for (rel, text) in &files {
        let path = args.out.join(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{prompts} prompts answered; wrote {} files to {}", files.len(), args.out.display());
    Ok(())
}

fn lattice(shared: &Path, format: LatticeFormat) -> Result<()> {
    let ctx = read_context(shared)?
        .into_formal()
        .with_context(|| format!("{} must be a formal context", shared.display()))?;
    let concepts = shared_lattice(&ctx);
    match format {
        LatticeFormat::Text => print!("{}", lattice_text(&concepts)),
        LatticeFormat::Dot => print!("{}", lattice_dot(&concepts)),
    }
    Ok(())
}

fn report(session: &Path, format: ReportFormat, majority: f64) -> Result<()> {
    let file = if session.is_dir() { session.join("session.json") } else { session.to_path_buf() };
    let doc = load_session(&read(&file)?).with_context(|| format!("loading {}", file.display()))?;
    let (log, examples) = match &doc.state {
        SessionState::Group(x) => (x.log(), x.examples()),
        SessionState::System(s) => (s.log(), s.examples()),
    };
    if !(0.0..1.0).contains(&majority) {
        bail!("--majority must lie in [0, 1)");
    }
    let rep = conflict_report(log, examples, ReportOptions { majority })?;
    match format {
        ReportFormat::Text => print!("{rep}"),
        ReportFormat::Json => println!("{}", serde_json::to_string_pretty(&rep.to_json())?),
    }
    Ok(())
}

fn serve(host: IpAddr, port: u16, data: PathBuf) -> Result<()> {
    let runtime = tokio::runtime::Runtime::new()?;
    runtime.block_on(fcax_service::serve(SocketAddr::new(host, port), data))?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Base { context, background } => base(&context, background.as_deref()),
        Command::Explore {
            views,
            mode,
            subsets,
            tie_break,
            background,
            complete,
            jobs,
            out,
        } => explore(ExploreArgs {
            views: &views,
            mode,
            subsets: subsets.as_deref(),
            tie: match tie_break {
                Tie::Lexicographic => TieBreak::Lexicographic,
                Tie::ReverseLexicographic => TieBreak::ReverseLexicographic,
            },
            background: background.as_deref(),
            complete,
            jobs,
            out: &out,
        }),
        Command::Lattice { shared, format } => lattice(&shared, format),
        Command::Report {
            session,
            format,
            majority,
        } => report(&session, format, majority),
        Command::Serve { port, host, data } => serve(host, port, data),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let default = if matches!(cli.command, Command::Serve { .. }) { "info" } else { "warn" };
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| tracing_subscriber::EnvFilter::new(default)),
        )
        .init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
