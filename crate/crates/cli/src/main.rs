mod args;
mod commands;
mod output;
mod summary;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::{Cli, Command};
use citerank_core::Error;
use summary::RunSummary;

/// Why a run stopped, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(Vec<String>),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) | Failure::Core(Error::InvalidParameter(_)) => 2,
            Failure::Core(
                Error::Malformed { .. } | Error::DuplicateId { .. } | Error::DataInconsistency { .. } | Error::Csv(_),
            ) => 3,
            Failure::Core(Error::NotConverged { .. }) => 4,
            Failure::Core(_) | Failure::Io(_) => 1,
        }
    }

    /// The reader of our output went away, as with `| head`.
    fn is_broken_pipe(&self) -> bool {
        match self {
            Failure::Io(e) | Failure::Core(Error::Io(e)) => e.kind() == io::ErrorKind::BrokenPipe,
            _ => false,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Usage(problems) => problems.join("; "),
            Failure::Core(e) => e.to_string(),
            Failure::Io(e) => e.to_string(),
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Ingest(_) => "ingest",
        Command::RankPapers(_) => "rank-papers",
        Command::RankAuthors(_) => "rank-authors",
        Command::AuthorReport(_) => "author-report",
        Command::RankGroups(_) => "rank-groups",
        Command::Timeseries(_) => "timeseries",
        Command::Trends(_) => "trends",
        Command::Correlations(_) => "correlations",
        Command::GenFixture(_) => "gen-fixture",
    }
}

fn run(cli: &Cli, summary: &mut RunSummary) -> Result<(), Failure> {
    let problems = cli.problems();
    if !problems.is_empty() {
        return Err(Failure::Usage(problems));
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| io::Error::other(e.to_string()))?;
    }
    match &cli.command {
        Command::Ingest(a) => commands::ingest_cmd(a, summary),
        Command::RankPapers(a) => commands::rank_papers(a, summary),
        Command::RankAuthors(a) => commands::rank_authors(a, summary),
        Command::AuthorReport(a) => commands::author_report_cmd(a, summary),
        Command::RankGroups(a) => commands::rank_groups(a, summary),
        Command::Timeseries(a) => commands::timeseries_cmd(a, summary),
        Command::Trends(a) => commands::trends_cmd(a, summary),
        Command::Correlations(a) => commands::correlations_cmd(a, summary),
        Command::GenFixture(a) => commands::gen_fixture(a, summary),
    }
}

fn write_summary(cli: &Cli, summary: &RunSummary) -> io::Result<()> {
    let text = serde_json::to_string_pretty(summary)?;
    match &cli.summary {
        Some(path) => writeln!(File::create(path)?, "{text}"),
        None => writeln!(io::stderr().lock(), "{text}"),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("CITERANK_LOG", "warn")).init();
    let cli = Cli::parse();
    let start = Instant::now();
    let threads = cli
        .threads
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let mut summary = RunSummary::new(command_name(&cli.command), threads);
    let result = run(&cli, &mut summary);
    summary.elapsed_secs = start.elapsed().as_secs_f64();
    let code = match &result {
        Ok(()) => 0,
        Err(f) if f.is_broken_pipe() => return ExitCode::SUCCESS,
        Err(f) => {
            summary.ok = false;
            summary.error = Some(f.message());
            match f {
                Failure::Usage(problems) => {
                    for p in problems {
                        eprintln!("error: {p}");
                    }
                }
                _ => eprintln!("error: {}", f.message()),
            }
            f.exit_code()
        }
    };
    if let Err(e) = write_summary(&cli, &summary) {
        eprintln!("error: cannot write run summary: {e}");
        return ExitCode::from(code.max(1));
    }
    ExitCode::from(code)
}
