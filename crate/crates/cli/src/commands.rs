use std::cell::OnceCell;
use std::io::{self, BufRead, BufReader, Write};

use citerank_core::author_metrics::{
    author_counts_with, author_report, authorrank, citation_coin_plus_with, citation_coin_with, h_index_with,
    paperrank_of_authors, AuthorCounts, AuthorFlowMatrix, Authorship, FlowOptions,
};
use citerank_core::citegraph::build_graph_cached;
use citerank_core::dataset::{AuthorId, IngestOptions};
use citerank_core::group_metrics::{
    affiliate_rank_table, gender_stats, gini, group_metric, journal_table, metric_correlations, timeseries,
    trend_series, GeoDenominators, GroupingScheme,
};
use citerank_core::metric::GroupedMetric;
use citerank_core::paper_metrics::{authorrank_of_papers, ccoin_papers, n_cit, n_icit_papers, paperrank};
use citerank_core::synth::write_fixture;
use citerank_core::{
    ingest, CitationGraph, Dataset, DateWindow, EdgeFilter, Entity, MetricKind, MetricVector, SolverOptions,
};

use crate::args::*;
use crate::output::{open, open_input, Cell, TableWriter};
use crate::summary::{GapSummary, GraphSummary, RunSummary, SolverSummary};
use crate::Failure;

type Result<T> = std::result::Result<T, Failure>;

fn edge_filter(input: &InputArgs) -> Result<EdgeFilter> {
    let window = match (input.after, input.until) {
        (None, None) => None,
        (first, last) => Some(DateWindow::new(first.unwrap_or(i32::MIN), last.unwrap_or(i32::MAX))?),
    };
    Ok(EdgeFilter {
        drop_self_citations: input.no_self_citations,
        window,
        published_only: input.published_only,
    })
}

fn read_dataset(input: &InputArgs, summary: &mut RunSummary) -> Result<Dataset> {
    let options = IngestOptions {
        strict: input.strict,
        ..Default::default()
    };
    let reader: Box<dyn BufRead> = if input.input.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        Box::new(BufReader::with_capacity(1 << 20, open_input(&input.input)?))
    };
    let (dataset, report) = ingest(reader, options)?;
    log::info!("ingested {} papers, {} authors", report.papers, report.authors);
    summary.ingest = Some(report);
    Ok(dataset)
}

fn load(input: &InputArgs, summary: &mut RunSummary) -> Result<(Dataset, CitationGraph)> {
    let dataset = read_dataset(input, summary)?;
    let filter = edge_filter(input)?;
    let (graph, report, cache_hit) = build_graph_cached(&dataset, &filter, input.graph_cache.as_deref())?;
    summary.graph = Some(GraphSummary {
        papers: graph.n_papers(),
        edges: graph.n_edges(),
        cache_hit,
        filter,
        report,
    });
    Ok((dataset, graph))
}

fn cached<T>(cell: &OnceCell<T>, compute: impl FnOnce() -> Result<T>) -> Result<&T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = compute()?;
    Ok(cell.get_or_init(|| v))
}

/// Loaded data plus every metric, computed on first use.
struct Context<'a> {
    dataset: Dataset,
    graph: CitationGraph,
    solver: &'a SolverArgs,
    authorship: OnceCell<Authorship>,
    ones: OnceCell<MetricVector>,
    ncit: OnceCell<MetricVector>,
    icit: OnceCell<MetricVector>,
    prank: OnceCell<MetricVector>,
    arp: OnceCell<MetricVector>,
    ccoin: OnceCell<MetricVector>,
    counts: OnceCell<AuthorCounts>,
    h: OnceCell<MetricVector>,
    author_prank: OnceCell<MetricVector>,
    arank: OnceCell<MetricVector>,
    author_ccoin: OnceCell<MetricVector>,
    ccoin_plus: OnceCell<MetricVector>,
}

impl<'a> Context<'a> {
    fn new(dataset: Dataset, graph: CitationGraph, solver: &'a SolverArgs) -> Self {
        Context {
            dataset,
            graph,
            solver,
            authorship: OnceCell::new(),
            ones: OnceCell::new(),
            ncit: OnceCell::new(),
            icit: OnceCell::new(),
            prank: OnceCell::new(),
            arp: OnceCell::new(),
            ccoin: OnceCell::new(),
            counts: OnceCell::new(),
            h: OnceCell::new(),
            author_prank: OnceCell::new(),
            arank: OnceCell::new(),
            author_ccoin: OnceCell::new(),
            ccoin_plus: OnceCell::new(),
        }
    }

    fn options(&self, damping: f64) -> SolverOptions {
        SolverOptions {
            damping,
            tolerance: self.solver.tolerance,
            max_iters: self.solver.max_iters,
        }
    }

    fn authorship(&self) -> Result<&Authorship> {
        cached(&self.authorship, || Ok(Authorship::new(&self.dataset, &self.graph)?))
    }

    fn icit(&self) -> Result<&MetricVector> {
        cached(&self.icit, || Ok(n_icit_papers(&self.graph)?))
    }

    fn prank(&self) -> Result<&MetricVector> {
        cached(&self.prank, || {
            Ok(paperrank(&self.graph, &self.options(self.solver.damping))?)
        })
    }

    fn arank(&self) -> Result<&MetricVector> {
        cached(&self.arank, || {
            let opts = FlowOptions {
                remove_self: self.solver.remove_self,
                antisymmetrize: self.solver.antisymmetric,
            };
            let flow = AuthorFlowMatrix::from_authorship(self.authorship()?, &self.graph, opts)?;
            log::info!(
                "author flow matrix: {} authors, {} entries",
                flow.n_authors(),
                flow.nnz()
            );
            Ok(authorrank(&flow, &self.options(self.solver.author_damping))?)
        })
    }

    fn counts(&self) -> Result<&AuthorCounts> {
        cached(&self.counts, || {
            Ok(author_counts_with(self.authorship()?, &self.graph)?)
        })
    }

    fn paper(&self, m: PaperMetric) -> Result<&MetricVector> {
        match m {
            PaperMetric::Ncit => cached(&self.ncit, || Ok(n_cit(&self.graph))),
            PaperMetric::Nicit => self.icit(),
            PaperMetric::Paperrank => self.prank(),
            PaperMetric::Arp => cached(&self.arp, || {
                Ok(authorrank_of_papers(&self.dataset, &self.graph, self.arank()?)?)
            }),
            PaperMetric::Ccoin => cached(&self.ccoin, || Ok(ccoin_papers(&self.graph)?)),
        }
    }

    fn author(&self, m: AuthorMetric) -> Result<&MetricVector> {
        match m {
            AuthorMetric::Npap => Ok(&self.counts()?.npap),
            AuthorMetric::Nipap => Ok(&self.counts()?.nipap),
            AuthorMetric::Ncit => Ok(&self.counts()?.ncit),
            AuthorMetric::Nicit => Ok(&self.counts()?.nicit),
            AuthorMetric::H => cached(&self.h, || Ok(h_index_with(self.authorship()?, &self.graph))),
            AuthorMetric::Prank => cached(&self.author_prank, || {
                Ok(paperrank_of_authors(self.prank()?, &self.dataset))
            }),
            AuthorMetric::Arank => self.arank(),
            AuthorMetric::Ccoin => cached(&self.author_ccoin, || {
                Ok(citation_coin_with(self.authorship()?, &self.graph)?)
            }),
            AuthorMetric::CcoinPlus => cached(&self.ccoin_plus, || {
                Ok(citation_coin_plus_with(self.authorship()?, &self.graph)?)
            }),
        }
    }

    fn grouped(&self, m: GroupMetric) -> Result<&MetricVector> {
        match m {
            GroupMetric::Npap => cached(&self.ones, || {
                let ids = self.graph.paper_ids().iter().map(|p| p.0).collect();
                Ok(
                    MetricVector::new(MetricKind::Npap, Entity::Paper, ids, vec![1.0; self.graph.n_papers()])
                        .with_window(self.graph.filter().window),
                )
            }),
            GroupMetric::Ncit => self.paper(PaperMetric::Ncit),
            GroupMetric::Nicit => self.paper(PaperMetric::Nicit),
            GroupMetric::Paperrank => self.paper(PaperMetric::Paperrank),
            GroupMetric::Arp => self.paper(PaperMetric::Arp),
            GroupMetric::Ccoin => self.paper(PaperMetric::Ccoin),
        }
    }

    /// Author-level counterpart of a group metric, for affiliate tables.
    fn grouped_author(&self, m: GroupMetric) -> Result<&MetricVector> {
        self.author(match m {
            GroupMetric::Npap => AuthorMetric::Npap,
            GroupMetric::Ncit => AuthorMetric::Ncit,
            GroupMetric::Nicit => AuthorMetric::Nicit,
            GroupMetric::Paperrank => AuthorMetric::Prank,
            GroupMetric::Ccoin => AuthorMetric::Ccoin,
            GroupMetric::Arp => AuthorMetric::Arank,
        })
    }

    fn named(&self, entity: EntityArg, name: &str) -> Result<&MetricVector> {
        let value = |names: &[&str]| names.iter().position(|n| *n == name);
        match entity {
            EntityArg::Papers => {
                let all = [
                    PaperMetric::Ncit,
                    PaperMetric::Nicit,
                    PaperMetric::Paperrank,
                    PaperMetric::Arp,
                    PaperMetric::Ccoin,
                ];
                self.paper(all[value(PAPER_METRIC_NAMES).expect("validated metric")])
            }
            EntityArg::Authors => {
                let all = [
                    AuthorMetric::Npap,
                    AuthorMetric::Nipap,
                    AuthorMetric::Ncit,
                    AuthorMetric::Nicit,
                    AuthorMetric::H,
                    AuthorMetric::Prank,
                    AuthorMetric::Arank,
                    AuthorMetric::Ccoin,
                    AuthorMetric::CcoinPlus,
                ];
                self.author(all[value(AUTHOR_METRIC_NAMES).expect("validated metric")])
            }
        }
    }

    /// Record solver statistics and data-quality side results.
    fn finish(self, summary: &mut RunSummary) {
        for (name, cell) in [("paperrank", &self.prank), ("authorrank", &self.arank)] {
            if let Some(v) = cell.get() {
                summary.solvers.push(SolverSummary {
                    metric: name,
                    damping: v.params.damping.unwrap_or(f64::NAN),
                    tolerance: v.params.tolerance.unwrap_or(f64::NAN),
                    iterations: v.params.iterations.unwrap_or(0),
                    residual: v.params.residual.unwrap_or(0.0),
                });
            }
        }
        if let (Some(coin), Some(counts)) = (self.author_ccoin.get(), self.counts.get()) {
            summary.citation_coin_closed_form_gap = Some(GapSummary::new(coin, &counts.nicit, &counts.nipap));
        }
        if let Some(a) = self.authorship.get() {
            summary
                .notes
                .insert("papers_without_authors".into(), a.papers_without_authors().into());
        }
    }
}

fn record_gini(summary: &mut RunSummary, name: &str, v: &MetricVector) {
    if let Ok(g) = gini(v.values()) {
        summary.gini.insert(name.to_string(), g);
    }
}

/// Row order: by id, or the `top` best by `key` with ties by id.
fn row_order(key: &[f64], top: Option<usize>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..key.len()).collect();
    if let Some(n) = top {
        order.sort_by(|&a, &b| key[b].total_cmp(&key[a]).then(a.cmp(&b)));
        order.truncate(n);
    }
    order
}

fn paper_metric_name(m: PaperMetric) -> &'static str {
    PAPER_METRIC_NAMES[m as usize]
}

fn author_metric_name(m: AuthorMetric) -> &'static str {
    AUTHOR_METRIC_NAMES[m as usize]
}

fn group_metric_name(m: GroupMetric) -> &'static str {
    match m {
        GroupMetric::Npap => "npap",
        GroupMetric::Ncit => "ncit",
        GroupMetric::Nicit => "nicit",
        GroupMetric::Paperrank => "paperrank",
        GroupMetric::Arp => "arp",
        GroupMetric::Ccoin => "ccoin",
    }
}

pub fn ingest_cmd(a: &IngestArgs, summary: &mut RunSummary) -> Result<()> {
    let dataset = read_dataset(&a.input, summary)?;
    if let Some(path) = a.input.graph_cache.as_deref() {
        let filter = edge_filter(&a.input)?;
        let (graph, report, cache_hit) = build_graph_cached(&dataset, &filter, Some(path))?;
        summary.graph = Some(GraphSummary {
            papers: graph.n_papers(),
            edges: graph.n_edges(),
            cache_hit,
            filter,
            report,
        });
    }
    let mut out = open(a.output.as_deref())?;
    dataset.export_canonical(&mut out)?;
    out.flush()?;
    Ok(())
}

pub fn rank_papers(a: &RankPapersArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let vectors: Vec<&MetricVector> = a.metric.iter().map(|&m| ctx.paper(m)).collect::<Result<_>>()?;
    let mut columns: Vec<String> = ["paper_id", "title", "date", "n_authors"].map(String::from).to_vec();
    columns.extend(a.metric.iter().map(|&m| paper_metric_name(m).to_string()));
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for v in row_order(vectors[0].values(), a.top) {
        let paper = &ctx.dataset.papers()[ctx.graph.dataset_index(v)];
        let mut row = vec![
            Cell::Uint(paper.paper_id.0),
            Cell::Text(paper.title.clone()),
            Cell::Text(paper.date.to_string()),
            Cell::Uint(paper.author_count() as u64),
        ];
        row.extend(vectors.iter().map(|m| Cell::Float(m.values()[v])));
        out.row(&row)?;
    }
    summary.rows_written = Some(out.finish()?);
    for (&m, v) in a.metric.iter().zip(&vectors) {
        record_gini(summary, paper_metric_name(m), v);
    }
    ctx.finish(summary);
    Ok(())
}

pub fn rank_authors(a: &RankAuthorsArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let vectors: Vec<&MetricVector> = a.metric.iter().map(|&m| ctx.author(m)).collect::<Result<_>>()?;
    let mut columns: Vec<String> = vec!["author_id".into(), "name".into()];
    columns.extend(a.metric.iter().map(|&m| author_metric_name(m).to_string()));
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    let ids = vectors[0].ids();
    for k in row_order(vectors[0].values(), a.top) {
        let id = ids[k];
        let name = ctx
            .dataset
            .author(AuthorId(id))
            .map(|r| r.display_name.clone())
            .unwrap_or_default();
        let mut row = vec![Cell::Uint(id), Cell::Text(name)];
        row.extend(vectors.iter().map(|m| Cell::from(m.get(id))));
        out.row(&row)?;
    }
    summary.rows_written = Some(out.finish()?);
    for (&m, v) in a.metric.iter().zip(&vectors) {
        record_gini(summary, author_metric_name(m), v);
    }
    ctx.finish(summary);
    Ok(())
}

pub fn author_report_cmd(a: &AuthorReportArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let all = [
        AuthorMetric::Npap,
        AuthorMetric::Nipap,
        AuthorMetric::Ncit,
        AuthorMetric::Nicit,
        AuthorMetric::H,
        AuthorMetric::Prank,
        AuthorMetric::Arank,
        AuthorMetric::Ccoin,
        AuthorMetric::CcoinPlus,
    ];
    let vectors: Vec<(&str, &MetricVector)> = all
        .iter()
        .map(|&m| Ok((author_metric_name(m), ctx.author(m)?)))
        .collect::<Result<_>>()?;
    let report = author_report(
        &ctx.dataset,
        &ctx.graph,
        ctx.authorship()?,
        AuthorId(a.author),
        &vectors,
        a.top,
    )?;
    let mut out = open(a.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &report).map_err(io::Error::from)?;
    out.write_all(b"\n")?;
    out.flush()?;
    summary.rows_written = Some(1);
    ctx.finish(summary);
    Ok(())
}

pub fn rank_groups(a: &RankGroupsArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    if let Some(year) = a.active_since {
        return affiliates(&ctx, a, year, summary);
    }
    if a.journal_table {
        return journals(&ctx, a, summary);
    }
    let scheme = GroupingScheme::build(a.by.kind(), &ctx.dataset, a.radius_km)?;
    summary
        .notes
        .insert("uncovered_papers".into(), scheme.uncovered_papers.into());
    let geo = match &a.geo_denominators {
        Some(path) => Some(GeoDenominators::from_reader(open_input(path)?)?),
        None => None,
    };
    let totals: Vec<MetricVector> = a
        .metric
        .iter()
        .map(|&m| Ok(group_metric(&scheme, ctx.grouped(m)?)?))
        .collect::<Result<_>>()?;

    let mut columns: Vec<String> = vec!["group_id".into(), "label".into()];
    for &m in &a.metric {
        let name = group_metric_name(m);
        columns.push(name.to_string());
        columns.push(format!("{name}_pct"));
        if geo.is_some() {
            columns.push(format!("{name}_per_million_people"));
            columns.push(format!("{name}_per_billion_usd"));
        }
    }
    let world: Vec<f64> = totals.iter().map(|t| t.sum()).collect();
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for g in row_order(totals[0].values(), a.top) {
        let label = scheme.label(g);
        let mut row = vec![Cell::Uint(scheme.group_ids()[g]), Cell::Text(label.to_string())];
        for (t, w) in totals.iter().zip(&world) {
            let v = t.values()[g];
            row.push(Cell::Float(v));
            row.push(Cell::from((*w > 0.0).then(|| 100.0 * v / w)));
            if let Some(geo) = &geo {
                row.push(Cell::from(geo.per_million_people(label, v)));
                row.push(Cell::from(geo.per_billion_usd(label, v)));
            }
        }
        out.row(&row)?;
    }
    summary.rows_written = Some(out.finish()?);
    for (&m, t) in a.metric.iter().zip(&totals) {
        record_gini(summary, group_metric_name(m), t);
    }
    ctx.finish(summary);
    Ok(())
}

fn affiliates(ctx: &Context, a: &RankGroupsArgs, year: i32, summary: &mut RunSummary) -> Result<()> {
    let metrics: Vec<(&str, &MetricVector)> = a
        .metric
        .iter()
        .map(|&m| Ok((group_metric_name(m), ctx.grouped_author(m)?)))
        .collect::<Result<_>>()?;
    let table = affiliate_rank_table(&ctx.dataset, &metrics, DateWindow::since(year))?;
    summary
        .notes
        .insert("active_authors".into(), table.active_authors.into());
    summary
        .notes
        .insert("unaffiliated_authors".into(), table.unaffiliated_authors.into());
    let mut columns: Vec<String> = vec!["institution_id".into(), "name".into(), "affiliates".into()];
    columns.extend(table.metric_names.iter().map(|n| format!("{n}_pct")));
    let key: Vec<f64> = table.rows.iter().map(|r| r.metric_pct[0]).collect();
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for k in row_order(&key, a.top) {
        let r = &table.rows[k];
        let mut row = vec![
            Cell::Uint(r.institution_id),
            Cell::Text(r.name.clone()),
            Cell::Float(r.affiliates),
        ];
        row.extend(r.metric_pct.iter().map(|&x| Cell::Float(x)));
        out.row(&row)?;
    }
    summary.rows_written = Some(out.finish()?);
    Ok(())
}

fn journals(ctx: &Context, a: &RankGroupsArgs, summary: &mut RunSummary) -> Result<()> {
    let rows = journal_table(&ctx.dataset, &ctx.graph)?;
    let columns = [
        "journal_id",
        "name",
        "papers",
        "individual_citations",
        "icit_per_paper",
        "citation_coin",
    ]
    .map(String::from)
    .to_vec();
    let key: Vec<f64> = rows.iter().map(|r| r.individual_citations).collect();
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for k in row_order(&key, a.top) {
        let r = &rows[k];
        out.row(&[
            Cell::Uint(r.journal_id),
            Cell::Text(r.name.clone()),
            Cell::from(r.papers),
            Cell::Float(r.individual_citations),
            Cell::Float(r.icit_per_paper),
            Cell::Float(r.citation_coin),
        ])?;
    }
    summary.rows_written = Some(out.finish()?);
    record_gini(
        summary,
        "individual_citations",
        &MetricVector::new(
            MetricKind::Group(GroupedMetric::Nicit),
            Entity::Group,
            rows.iter().map(|r| r.journal_id).collect(),
            key,
        ),
    );
    Ok(())
}

pub fn timeseries_cmd(a: &TimeseriesArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let scheme = GroupingScheme::build(a.by.kind(), &ctx.dataset, a.radius_km)?;
    let series = timeseries(&scheme, &ctx.dataset, ctx.grouped(a.metric)?, a.category.as_deref())?;
    let columns = ["year", "group_id", "label", "percent", "world_total"]
        .map(String::from)
        .to_vec();
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for (y, year) in series.years.iter().enumerate() {
        for (g, id) in series.group_ids.iter().enumerate() {
            out.row(&[
                Cell::from(*year),
                Cell::Uint(*id),
                Cell::Text(series.labels[g].clone()),
                Cell::Float(series.percent[g][y]),
                Cell::Float(series.world[y]),
            ])?;
        }
    }
    summary.rows_written = Some(out.finish()?);
    ctx.finish(summary);
    Ok(())
}

pub fn trends_cmd(a: &TrendsArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let sink = open(a.output.output.as_deref())?;
    if a.gender {
        let metrics = [
            ("nicit", ctx.author(AuthorMetric::Nicit)?),
            ("prank", ctx.author(AuthorMetric::Prank)?),
        ];
        let stats = gender_stats(&ctx.dataset, &metrics, ctx.icit()?, a.category.as_deref());
        let columns = ["year", "female_icit_pct"].map(String::from).to_vec();
        let mut out = TableWriter::new(a.output.format, sink, columns)?;
        for &(year, pct) in &stats.female_icit_by_year {
            out.row(&[Cell::from(year), Cell::Float(pct)])?;
        }
        summary.rows_written = Some(out.finish()?);
        let mut overall = serde_json::to_value(&stats).map_err(io::Error::from)?;
        if let Some(obj) = overall.as_object_mut() {
            obj.remove("female_icit_by_year");
        }
        summary.notes.insert("gender".into(), overall);
    } else {
        let rows = trend_series(&ctx.dataset, &ctx.graph, a.category.as_deref());
        let columns = [
            "year",
            "papers",
            "mean_declared_refs",
            "mean_authors",
            "mean_citations",
            "mean_published_citations",
            "author_births_pct",
            "author_deaths_pct",
        ]
        .map(String::from)
        .to_vec();
        let mut out = TableWriter::new(a.output.format, sink, columns)?;
        for r in &rows {
            out.row(&[
                Cell::from(r.year),
                Cell::from(r.papers),
                Cell::Float(r.mean_declared_refs),
                Cell::Float(r.mean_authors),
                Cell::Float(r.mean_citations),
                Cell::Float(r.mean_published_citations),
                Cell::from(r.author_births_pct),
                Cell::from(r.author_deaths_pct),
            ])?;
        }
        summary.rows_written = Some(out.finish()?);
    }
    ctx.finish(summary);
    Ok(())
}

pub fn correlations_cmd(a: &CorrelationsArgs, summary: &mut RunSummary) -> Result<()> {
    let (dataset, graph) = load(&a.input, summary)?;
    let ctx = Context::new(dataset, graph, &a.solver);
    let vectors: Vec<(&str, &MetricVector)> = a
        .metric
        .iter()
        .map(|m| Ok((m.as_str(), ctx.named(a.entity, m)?)))
        .collect::<Result<_>>()?;
    let m = metric_correlations(&vectors)?;
    let mut columns: Vec<String> = vec!["method".into(), "metric".into()];
    columns.extend(m.names.iter().cloned());
    let mut out = TableWriter::new(a.output.format, open(a.output.output.as_deref())?, columns)?;
    for (method, table) in [("pearson", &m.pearson), ("spearman", &m.spearman)] {
        for (name, row) in m.names.iter().zip(table) {
            let mut cells = vec![Cell::from(method), Cell::Text(name.clone())];
            cells.extend(row.iter().map(|&x| Cell::from(x)));
            out.row(&cells)?;
        }
    }
    summary.rows_written = Some(out.finish()?);
    for (name, v) in &vectors {
        record_gini(summary, name, v);
    }
    ctx.finish(summary);
    Ok(())
}

pub fn gen_fixture(a: &GenFixtureArgs, summary: &mut RunSummary) -> Result<()> {
    let params = a.params();
    write_fixture(&params, open(a.output.as_deref())?)?;
    summary.notes.insert("papers".into(), params.n_papers.into());
    summary.notes.insert("seed".into(), params.seed.into());
    Ok(())
}
