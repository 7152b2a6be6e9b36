use std::path::PathBuf;

use citerank_core::group_metrics::{GroupKind, DEFAULT_TOWN_RADIUS_KM};
use citerank_core::synth::SynthParams;
use citerank_core::SolverOptions;
use clap::{Args, Parser, Subcommand, ValueEnum};

/// Citation-network bibliometrics: individual citations, PaperRank,
/// AuthorRank, CitationCoin and group aggregates.
///
/// Exit codes: 0 success, 1 I/O or internal error, 2 invalid arguments,
/// 3 invalid or inconsistent input data, 4 a rank solver did not converge.
/// Log verbosity comes from CITERANK_LOG (error, warn, info, debug, trace).
#[derive(Debug, Parser)]
#[command(name = "citerank", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads; defaults to the number of available cores.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Write the JSON run summary here instead of stderr.
    #[arg(long, global = true, value_name = "PATH")]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a dataset and write it back in canonical form.
    Ingest(IngestArgs),
    /// Score papers.
    RankPapers(RankPapersArgs),
    /// Score authors.
    RankAuthors(RankAuthorsArgs),
    /// Full JSON profile of one author.
    AuthorReport(AuthorReportArgs),
    /// Aggregate a paper metric over institutions, towns, countries,
    /// continents, journals or genders.
    RankGroups(RankGroupsArgs),
    /// Yearly percentage of a paper metric per group.
    Timeseries(TimeseriesArgs),
    /// Yearly paper, reference, author and citation statistics.
    Trends(TrendsArgs),
    /// Pearson and Spearman correlations between metrics.
    Correlations(CorrelationsArgs),
    /// Write a seeded synthetic dataset.
    GenFixture(GenFixtureArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Dataset in canonical JSONL; `-` reads stdin.
    #[arg(long, short, value_name = "PATH")]
    pub input: PathBuf,

    /// Fail on malformed lines and duplicate ids instead of skipping them.
    #[arg(long)]
    pub strict: bool,

    /// Reuse or refresh a binary graph cache at this path.
    #[arg(long, value_name = "PATH")]
    pub graph_cache: Option<PathBuf>,

    /// Keep only papers from this year on (inclusive).
    #[arg(long, value_name = "YEAR", allow_negative_numbers = true)]
    pub after: Option<i32>,

    /// Keep only papers up to this year (inclusive).
    #[arg(long, value_name = "YEAR", allow_negative_numbers = true)]
    pub until: Option<i32>,

    /// Drop citations between papers sharing an author.
    #[arg(long)]
    pub no_self_citations: bool,

    /// Keep only citations made by published papers.
    #[arg(long)]
    pub published_only: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// PaperRank damping.
    #[arg(long, default_value_t = 0.99, allow_negative_numbers = true)]
    pub damping: f64,

    /// AuthorRank damping.
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    pub author_damping: f64,

    /// Largest relative change per component at convergence.
    #[arg(long, default_value_t = SolverOptions::DEFAULT_TOLERANCE, allow_negative_numbers = true)]
    pub tolerance: f64,

    #[arg(long, default_value_t = SolverOptions::DEFAULT_MAX_ITERS)]
    pub max_iters: usize,

    /// Zero the author flow diagonal before AuthorRank.
    #[arg(long)]
    pub remove_self: bool,

    /// Keep only the net flow between each author pair before AuthorRank.
    #[arg(long)]
    pub antisymmetric: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PaperMetric {
    Ncit,
    Nicit,
    #[value(alias = "prank")]
    Paperrank,
    /// AuthorRank of papers.
    Arp,
    Ccoin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuthorMetric {
    Npap,
    Nipap,
    Ncit,
    Nicit,
    H,
    #[value(alias = "paperrank")]
    Prank,
    #[value(alias = "authorrank")]
    Arank,
    Ccoin,
    CcoinPlus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupBy {
    Institution,
    Town,
    Country,
    Continent,
    Journal,
    Gender,
}

impl GroupBy {
    pub fn kind(self) -> GroupKind {
        match self {
            GroupBy::Institution => GroupKind::Institution,
            GroupBy::Town => GroupKind::Town,
            GroupBy::Country => GroupKind::Country,
            GroupBy::Continent => GroupKind::Continent,
            GroupBy::Journal => GroupKind::Journal,
            GroupBy::Gender => GroupKind::Gender,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GroupMetric {
    Npap,
    Ncit,
    Nicit,
    #[value(alias = "prank")]
    Paperrank,
    Arp,
    Ccoin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EntityArg {
    Papers,
    Authors,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,

    /// Canonical JSONL output; stdout when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankPapersArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    /// Metrics to compute, comma separated.
    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub metric: Vec<PaperMetric>,

    /// Keep the best N rows by the first metric; all rows by id otherwise.
    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RankAuthorsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_enum, value_delimiter = ',', required = true)]
    pub metric: Vec<AuthorMetric>,

    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct AuthorReportArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_name = "ID")]
    pub author: u64,

    /// Length of the top citer and citee lists.
    #[arg(long, default_value_t = 10)]
    pub top: usize,

    /// JSON output; stdout when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankGroupsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_enum)]
    pub by: GroupBy,

    #[arg(long, value_enum, value_delimiter = ',', required_unless_present = "journal_table")]
    pub metric: Vec<GroupMetric>,

    /// Per-journal papers, individual citations, citations per paper and
    /// CitationCoin over the filtered graph; needs `--by journal`.
    #[arg(long, conflicts_with_all = ["metric", "active_since", "geo_denominators"])]
    pub journal_table: bool,

    /// Town clustering radius.
    #[arg(long, default_value_t = DEFAULT_TOWN_RADIUS_KM, allow_negative_numbers = true)]
    pub radius_km: f64,

    /// CSV with columns country,population,gdp_usd; adds per-capita and
    /// per-GDP columns to country rankings.
    #[arg(long, value_name = "PATH")]
    pub geo_denominators: Option<PathBuf>,

    /// Rank institutions by their authors active from this year on, using
    /// author-level metrics.
    #[arg(long, value_name = "YEAR", allow_negative_numbers = true)]
    pub active_since: Option<i32>,

    #[arg(long)]
    pub top: Option<usize>,
}

#[derive(Debug, Args)]
pub struct TimeseriesArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_enum)]
    pub by: GroupBy,

    #[arg(long, value_enum)]
    pub metric: GroupMetric,

    /// Restrict to papers of one category, renormalizing within it.
    #[arg(long)]
    pub category: Option<String>,

    #[arg(long, default_value_t = DEFAULT_TOWN_RADIUS_KM, allow_negative_numbers = true)]
    pub radius_km: f64,
}

#[derive(Debug, Args)]
pub struct TrendsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,

    #[arg(long)]
    pub category: Option<String>,

    /// Emit the yearly female share of individual citations instead; the
    /// overall gender shares go to the run summary.
    #[arg(long)]
    pub gender: bool,

    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Args)]
pub struct CorrelationsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub output: OutputArgs,
    #[command(flatten)]
    pub solver: SolverArgs,

    #[arg(long, value_enum, default_value_t = EntityArg::Papers)]
    pub entity: EntityArg,

    /// Metric names of the chosen entity, comma separated; at least two.
    #[arg(long, value_delimiter = ',', required = true)]
    pub metric: Vec<String>,
}

#[derive(Debug, Args)]
pub struct GenFixtureArgs {
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    #[arg(long, default_value_t = 1000)]
    pub papers: usize,

    #[arg(long, default_value_t = 1970, allow_negative_numbers = true)]
    pub start_year: i32,

    #[arg(long, default_value_t = 50)]
    pub years: u32,

    /// Yearly growth rate of the number of papers.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub growth: f64,

    /// Mean declared references per paper.
    #[arg(long, default_value_t = 20.0, allow_negative_numbers = true)]
    pub refs_mean: f64,

    /// Probability that a reference points outside the dataset.
    #[arg(long, default_value_t = 0.05, allow_negative_numbers = true)]
    pub external_fraction: f64,

    /// Probability that a citation follows earlier citations.
    #[arg(long, default_value_t = 0.8, allow_negative_numbers = true)]
    pub attachment: f64,

    #[arg(long, default_value_t = 2.25, allow_negative_numbers = true)]
    pub authors_mean: f64,

    /// Probability that an author slot goes to a newcomer.
    #[arg(long, default_value_t = 0.07, allow_negative_numbers = true)]
    pub new_author_prob: f64,

    /// Probability that a paper also cites one newer paper.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub acausal_fraction: f64,

    #[arg(long, default_value_t = 0.7, allow_negative_numbers = true)]
    pub published_fraction: f64,

    #[arg(long)]
    pub institutions: Option<usize>,

    /// Canonical JSONL output; stdout when absent.
    #[arg(long, short, value_name = "PATH")]
    pub output: Option<PathBuf>,
}

impl GenFixtureArgs {
    pub fn params(&self) -> SynthParams {
        SynthParams {
            seed: self.seed,
            n_papers: self.papers,
            start_year: self.start_year,
            n_years: self.years,
            growth_rate: self.growth,
            refs_mean: self.refs_mean,
            external_fraction: self.external_fraction,
            attachment: self.attachment,
            authors_mean: self.authors_mean,
            new_author_prob: self.new_author_prob,
            acausal_fraction: self.acausal_fraction,
            published_fraction: self.published_fraction,
            n_institutions: self.institutions,
            ..Default::default()
        }
    }
}

pub const PAPER_METRIC_NAMES: &[&str] = &["ncit", "nicit", "paperrank", "arp", "ccoin"];
pub const AUTHOR_METRIC_NAMES: &[&str] = &[
    "npap",
    "nipap",
    "ncit",
    "nicit",
    "h",
    "prank",
    "arank",
    "ccoin",
    "ccoin-plus",
];

impl Cli {
    /// Every problem with the arguments, so they can be reported at once.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.threads == Some(0) {
            out.push("--threads must be at least 1".to_string());
        }
        match &self.command {
            Command::Ingest(a) => input_problems(&a.input, &mut out),
            Command::RankPapers(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
                top_problems(a.top, &mut out);
            }
            Command::RankAuthors(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
                top_problems(a.top, &mut out);
            }
            Command::AuthorReport(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
            }
            Command::RankGroups(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
                top_problems(a.top, &mut out);
                radius_problems(a.radius_km, &mut out);
                if a.active_since.is_some() && a.by != GroupBy::Institution {
                    out.push("--active-since needs --by institution".to_string());
                }
                if a.active_since.is_some() && a.metric.contains(&GroupMetric::Arp) {
                    out.push(
                        "--active-since takes author metrics; use paperrank, nicit, ncit, npap or ccoin".to_string(),
                    );
                }
                if a.journal_table && a.by != GroupBy::Journal {
                    out.push("--journal-table needs --by journal".to_string());
                }
                if a.geo_denominators.is_some() && a.by != GroupBy::Country {
                    out.push("--geo-denominators needs --by country".to_string());
                }
            }
            Command::Timeseries(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
                radius_problems(a.radius_km, &mut out);
            }
            Command::Trends(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
            }
            Command::Correlations(a) => {
                input_problems(&a.input, &mut out);
                solver_problems(&a.solver, &mut out);
                let names = match a.entity {
                    EntityArg::Papers => PAPER_METRIC_NAMES,
                    EntityArg::Authors => AUTHOR_METRIC_NAMES,
                };
                for m in &a.metric {
                    if !names.contains(&m.as_str()) {
                        out.push(format!("unknown metric {m:?}; expected one of {}", names.join(", ")));
                    }
                }
                if a.metric.len() < 2 {
                    out.push("--metric needs at least two metrics".to_string());
                }
            }
            Command::GenFixture(a) => {
                if let Err(e) = a.params().validate() {
                    out.extend(
                        e.to_string()
                            .trim_start_matches("invalid parameter: ")
                            .split("; ")
                            .map(String::from),
                    );
                }
            }
        }
        out
    }
}

fn input_problems(a: &InputArgs, out: &mut Vec<String>) {
    if let (Some(first), Some(last)) = (a.after, a.until) {
        if first > last {
            out.push(format!("--after {first} is later than --until {last}"));
        }
    }
}

fn solver_problems(a: &SolverArgs, out: &mut Vec<String>) {
    for (flag, d) in [("--damping", a.damping), ("--author-damping", a.author_damping)] {
        if !(d > 0.0 && d < 1.0) {
            out.push(format!("{flag} must lie strictly between 0 and 1, got {d}"));
        }
    }
    if !(a.tolerance > 0.0 && a.tolerance.is_finite()) {
        out.push(format!("--tolerance must be positive, got {}", a.tolerance));
    }
    if a.max_iters == 0 {
        out.push("--max-iters must be at least 1".to_string());
    }
}

fn top_problems(top: Option<usize>, out: &mut Vec<String>) {
    if top == Some(0) {
        out.push("--top must be at least 1".to_string());
    }
}

fn radius_problems(r: f64, out: &mut Vec<String>) {
    if !(r >= 0.0 && r.is_finite()) {
        out.push(format!("--radius-km must be a nonnegative distance, got {r}"));
    }
}
