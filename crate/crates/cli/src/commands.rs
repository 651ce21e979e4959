use std::collections::BTreeSet;
use std::process::ExitCode;
use std::str::FromStr;

use chrono::NaiveDate;
use liberata::capital::{collusion_flags, two_step_capital, COLLUSION_PERCENTILE};
use liberata::citation_weighting::WeightingPipeline;
use liberata::corpus::{load_dataset, Corpus, Dataset, Role};
use liberata::distribution::{author_hhi, hhid, population_pyramid, Pyramid, Scope};
use liberata::graph_spectral::{
    cluster, connected_components, eigendecompose, fiedler_embedding, spanning_tree_counts, support_subgraph,
    tree_ratios, End, LaplacianKind, KMEANS_SEED,
};
use liberata::health::{self, GeoBasis, GiniFormula, GlobalBasis, Window};
use liberata::market::{self, Feasibility, Side};
use liberata::portfolio::{self, Basis, EfficiencyBasis, Grouping, MixAxis, Portfolio, PortfolioSelector};
use liberata::references_graph::{betweenness_centrality, gram, manuscript_capital, power, symmetrize, transpose_gram, PathLength};
use liberata::shares_graph::{build_full, laplacian, FullMatrix, Node, Selector};
use liberata::sparse::{self, Sparse};
use liberata::stats::distribution_stats;
use liberata::synth::{self, CitationModel, FieldProfile, ShareProfile, SynthParams};
use liberata::taxonomy_relevancy::{self, SimilarityBy, WeightBasis, AUTO_ASSIGN_THRESHOLD};
use liberata::time::period_grid;
use liberata::{Analysis, Error};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::table::{float, measure, text, Table};
use crate::*;

pub enum Failure {
    Usage(String),
    Data(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(m) => Failure::Usage(m),
            other => Failure::Data(other),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn report(self, _json: bool) -> ExitCode {
        match self {
            Failure::Data(Error::Validation(report)) => {
                let body = json!({ "valid": false, "violations": report.violations() });
                println!("{body}");
                ExitCode::from(2)
            }
            Failure::Data(e @ (Error::Parse { .. } | Error::UnsupportedFormat(_))) => {
                let body = json!({ "valid": false, "error": e.to_string() });
                println!("{body}");
                ExitCode::from(2)
            }
            Failure::Data(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
            Failure::Usage(m) => {
                eprintln!("error: {m}");
                ExitCode::from(1)
            }
            Failure::Io(e) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
            Failure::Io(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        }
    }
}

type Outcome<T = ()> = std::result::Result<T, Failure>;

fn usage<T>(m: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(m.into()))
}

/// Size the global pool from `LIBERATA_THREADS`.
pub fn init_threads() -> std::result::Result<(), String> {
    let Ok(v) = std::env::var("LIBERATA_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("LIBERATA_THREADS must be a positive integer, got `{v}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

pub fn dispatch(cli: &Cli) -> Outcome {
    let t = match &cli.command {
        Command::Synth(args) => return run_synth(cli, args),
        Command::Validate => {
            let d = load_dataset(&cli.corpus)?;
            let c = &d.corpus;
            let mut t = Table::new(&["valid", "manuscripts", "contributors", "shares", "transactions"]);
            t.push(vec![
                Value::Bool(true),
                json!(c.n_manuscripts()),
                json!(c.n_contributors()),
                json!(c.share_assignments().len()),
                json!(c.transactions().len()),
            ]);
            t
        }
        Command::Shares(args) => {
            let a = analysis(cli)?;
            match shares(cli, &a, args)? {
                Some(t) => t,
                None => return Ok(()),
            }
        }
        Command::Refs(args) => {
            let a = analysis(cli)?;
            match refs(cli, &a, args)? {
                Some(t) => t,
                None => return Ok(()),
            }
        }
        Command::Capital(args) => capital(&analysis(cli)?, args)?,
        Command::Cluster(args) => clusters(cli, &analysis(cli)?, args)?,
        Command::Similar(args) => similar(&analysis(cli)?, args)?,
        Command::Portfolio(args) => {
            let (a, d) = analysis_with(cli)?;
            portfolios(&a, &d, args)?
        }
        Command::Market(args) => markets(&analysis(cli)?, args)?,
        Command::Distribution(args) => distributions(&analysis(cli)?, args)?,
        Command::Health(args) => {
            let (a, d) = analysis_with(cli)?;
            healths(&a, &d, args)?
        }
    };
    t.write(cli.json, cli.out.as_deref())?;
    Ok(())
}

fn pipeline(cli: &Cli) -> Outcome<WeightingPipeline> {
    match &cli.weighting {
        Some(s) => Ok(WeightingPipeline::from_str(s)?),
        None => Ok(WeightingPipeline::default()),
    }
}

fn analysis_with(cli: &Cli) -> Outcome<(Analysis, Dataset)> {
    let p = pipeline(cli)?;
    let d = load_dataset(&cli.corpus)?;
    Ok((Analysis::new(d.corpus.clone(), p)?, d))
}

fn analysis(cli: &Cli) -> Outcome<Analysis> {
    Ok(analysis_with(cli)?.0)
}

fn date(s: &str) -> Outcome<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").or_else(|_| usage(format!("bad date `{s}`, expected YYYY-MM-DD")))
}

fn role(s: &str) -> Outcome<Role> {
    Role::parse(s).map_or_else(|| usage(format!("unknown role `{s}`")), Ok)
}

fn qc_role(s: &str) -> Outcome<Role> {
    let r = role(s)?;
    if r.is_qc() {
        Ok(r)
    } else {
        usage("role must be review or replication")
    }
}

fn selector(s: &str) -> Outcome<PortfolioSelector> {
    Ok(PortfolioSelector::from_str(s)?)
}

fn list(s: &str) -> Vec<String> {
    s.split(',').map(str::trim).filter(|t| !t.is_empty()).map(String::from).collect()
}

fn require<'a, T>(v: &'a Option<T>, flag: &str) -> Outcome<&'a T> {
    v.as_ref().map_or_else(|| usage(format!("{flag} is required")), Ok)
}

fn node_cells(c: &Corpus, n: Node) -> Vec<Value> {
    match n {
        Node::Manuscript(m) => vec![text("manuscript"), text(&c.manuscript(m).id), Value::Null],
        Node::Contributor { person, role } => {
            vec![text("contributor"), text(&c.contributor(person).id), text(role.as_str())]
        }
    }
}

fn entries_table(m: &Sparse, row_label: impl Fn(usize) -> Vec<Value>, col_label: impl Fn(usize) -> Vec<Value>, header: &[&str]) -> Table {
    let mut t = Table::new(header);
    for (r, col, v) in sparse::entries(m) {
        let mut row = row_label(r);
        row.extend(col_label(col));
        row.push(float(v));
        t.push(row);
    }
    t
}

fn write_matrix(cli: &Cli, m: &Sparse) -> Outcome {
    let out = require(&cli.out, "--out")?;
    Ok(sparse::write_mtx(m, out)?)
}

fn shares(cli: &Cli, a: &Analysis, args: &SharesArgs) -> Outcome<Option<Table>> {
    let c = a.corpus();
    let condensed = if args.capital { a.capital_graph().clone() } else { a.shares().clone() };
    let full: FullMatrix = condensed.expand();
    let node_header = ["kind", "id", "role"];
    Ok(Some(match args.view {
        SharesView::Rows => {
            let mut t = Table::new(&["manuscript", "contributor", "role", "value"]);
            for (m, p, r, s) in c.share_rows() {
                let v = if args.capital { condensed.get(m, p, r) } else { s };
                t.push(vec![text(&c.manuscript(m).id), text(&c.contributor(p).id), text(r.as_str()), float(v)]);
            }
            t
        }
        SharesView::Degrees => {
            let d = full.degree();
            let mut t = Table::new(&["kind", "id", "role", "degree"]);
            for i in 0..full.side() {
                let mut row = node_cells(c, full.node(i));
                row.push(float(d.of(i)));
                t.push(row);
            }
            t
        }
        SharesView::Fetch | SharesView::Trees if false => unreachable!(),
        SharesView::Fetch => {
            let mut parts = Vec::new();
            if let Some(m) = &args.manuscript {
                parts.push(Selector::Manuscript(c.require_manuscript(m)?));
            }
            if let Some(p) = &args.contributor {
                let person = c.require_contributor(p)?;
                parts.push(match &args.role {
                    Some(r) => Selector::Contributor { person, role: role(r)? },
                    None => Selector::Person(person),
                });
            }
            let sel = match parts.len() {
                0 => return usage("fetch needs --manuscript or --contributor"),
                1 => parts.pop().expect("one selector"),
                _ => Selector::Union(parts),
            };
            let dist = full.fetch(&sel)?;
            let values: Vec<f64> = dist.iter().map(|(_, v)| *v).collect();
            let mut header: Vec<String> = node_header.iter().map(|s| s.to_string()).collect();
            header.push("value".into());
            let mut t = Table::with_header(header);
            for (n, v) in dist {
                let mut row = node_cells(c, n);
                row.push(float(v));
                t.push(row);
            }
            if let (Ok(s), Some(_)) = (distribution_stats(&values), cli.out.as_ref()) {
                // summary goes to stderr when the rows go to a file
                eprintln!("{}", serde_json::to_string(&s).expect("serializable"));
            }
            t
        }
        SharesView::Trees => {
            let counts = spanning_tree_counts(&full)?;
            let ratios = tree_ratios(&counts);
            let mut t = Table::new(&[
                "manuscripts",
                "contributors",
                "uniform_share",
                "log_tau_c",
                "log_tau_cw",
                "log_tau_k",
                "log_tau_kw",
                "str",
                "str_w",
                "rstr",
            ]);
            t.push(vec![
                json!(counts.n_manuscripts),
                json!(counts.n_contributors),
                float(counts.uniform_share),
                float(counts.log_tau_c),
                float(counts.log_tau_cw),
                float(counts.log_tau_k),
                float(counts.log_tau_kw),
                measure(&ratios.str_ratio),
                measure(&ratios.str_weighted),
                measure(&ratios.rstr),
            ]);
            t
        }
        SharesView::Export => {
            let m = match args.matrix {
                SharesMatrix::Condensed => condensed.matrix().clone(),
                SharesMatrix::Full => full.matrix().clone(),
                SharesMatrix::Laplacian => full.laplacian(),
                SharesMatrix::TwoStep => full.two_step().matrix().clone(),
            };
            match args.format {
                Format::Mtx => {
                    write_matrix(cli, &m)?;
                    return Ok(None);
                }
                Format::Csv => {
                    let idx = |i: usize| vec![json!(i)];
                    entries_table(&m, idx, idx, &["row", "col", "value"])
                }
            }
        }
    }))
}

fn refs(cli: &Cli, a: &Analysis, args: &RefsArgs) -> Outcome<Option<Table>> {
    let c = a.corpus();
    let w = a.references();
    let id = |i: usize| vec![text(&c.manuscript(i).id)];
    let matrix = match args.op.as_str() {
        "capital" => {
            if let Some(m) = &args.manuscript {
                let (total, dist) = manuscript_capital(w, c.require_manuscript(m)?)?;
                let mut t = Table::new(&["citer", "weight", "share_of_capital"]);
                for (y, v) in dist {
                    t.push(vec![text(&c.manuscript(y).id), float(v), float(v / total)]);
                }
                return Ok(Some(t));
            }
            let mut t = Table::new(&["manuscript", "capital", "raw_capital"]);
            for m in 0..c.n_manuscripts() {
                t.push(vec![text(&c.manuscript(m).id), float(a.capital()[m]), float(a.raw_capital()[m])]);
            }
            return Ok(Some(t));
        }
        "centrality" => {
            let length = match args.path_length {
                PathLengthArg::Hops => PathLength::Hops,
                PathLengthArg::InverseWeight => PathLength::InverseWeight,
            };
            let mut t = Table::new(&["manuscript", "betweenness"]);
            for (m, b) in betweenness_centrality(w, length).into_iter().enumerate() {
                t.push(vec![text(&c.manuscript(m).id), float(b)]);
            }
            return Ok(Some(t));
        }
        "gram" => gram(w),
        "cocite" => transpose_gram(w),
        "symmetric" => symmetrize(w),
        "matrix" => w.clone(),
        op => match op.strip_prefix("power:").map(str::parse::<u32>) {
            Some(Ok(n)) => power(w, n)?,
            _ => return usage(format!("unknown refs op `{op}`")),
        },
    };
    match args.format {
        Format::Mtx => {
            write_matrix(cli, &matrix)?;
            Ok(None)
        }
        Format::Csv => Ok(Some(entries_table(&matrix, id, id, &["row", "col", "value"]))),
    }
}

fn entities(c: &Corpus, who: Who, level: usize) -> Vec<(String, PortfolioSelector)> {
    match who {
        Who::Manuscript => unreachable!("manuscripts are listed directly"),
        Who::Contributor => c
            .contributors()
            .iter()
            .map(|p| (p.id.clone(), PortfolioSelector::contributor(p.id.clone())))
            .collect(),
        Who::Institution => {
            let all: BTreeSet<&String> = c.contributors().iter().flat_map(|p| &p.institutions).collect();
            all.into_iter()
                .map(|i| {
                    let sel = PortfolioSelector {
                        institutions: [i.clone()].into(),
                        ..Default::default()
                    };
                    (i.clone(), sel)
                })
                .collect()
        }
        Who::Region => {
            let all: BTreeSet<&String> = c.contributors().iter().map(|p| &p.region).collect();
            all.into_iter()
                .map(|r| {
                    let sel = PortfolioSelector {
                        regions: [r.clone()].into(),
                        ..Default::default()
                    };
                    (r.clone(), sel)
                })
                .collect()
        }
        Who::Tag => c
            .taxonomy()
            .level_tags(level)
            .into_iter()
            .map(|t| (t.to_string(), PortfolioSelector::tag(t)))
            .collect(),
    }
}

fn capital(a: &Analysis, args: &CapitalArgs) -> Outcome<Table> {
    let c = a.corpus();
    if let Some(pct) = args.collusion {
        let mut t = Table::new(&["field", "author", "provider", "role", "value", "threshold"]);
        for f in collusion_flags(c, a.capital_graph(), pct.unwrap_or(COLLUSION_PERCENTILE)) {
            t.push(vec![
                text(f.field),
                text(&c.contributor(f.author).id),
                text(&c.contributor(f.provider).id),
                text(f.role.as_str()),
                float(f.value),
                float(f.threshold),
            ]);
        }
        return Ok(t);
    }
    if let Some(months) = args.series {
        let m = c.require_manuscript(require(&args.manuscript, "--manuscript")?)?;
        let end = c.last_date().expect("manuscript exists");
        let grid = period_grid(c.manuscript(m).published_at, end, months);
        let series = a.timeseries(&grid)?;
        let mut t = Table::new(&["date", "capital"]);
        for (d, s) in grid.iter().zip(series) {
            t.push(vec![text(d.to_string()), float(s[m])]);
        }
        return Ok(t);
    }
    if args.two_step {
        let full = a.capital_graph().expand();
        let g2 = two_step_capital(&full);
        let label = |i: usize| node_cells(c, full.node(i));
        return Ok(entries_table(
            g2.matrix(),
            label,
            label,
            &["kind_a", "id_a", "role_a", "kind_b", "id_b", "role_b", "value"],
        ));
    }
    let cg = a.capital_graph();
    match (args.who, args.by) {
        (Who::Manuscript, _) => {
            let mut t = Table::new(&["manuscript", "capital", "raw_capital"]);
            for m in 0..c.n_manuscripts() {
                t.push(vec![text(&c.manuscript(m).id), float(a.capital()[m]), float(a.raw_capital()[m])]);
            }
            Ok(t)
        }
        (Who::Contributor, None) => {
            let totals = cg.column_totals();
            let mut t = Table::new(&["contributor", "capital", "author", "peer_reviewer", "replicator"]);
            for p in 0..c.n_contributors() {
                let by_role: Vec<f64> = Role::ALL.iter().map(|&r| totals[cg.column(p, r)]).collect();
                let mut row = vec![text(&c.contributor(p).id), float(by_role.iter().sum())];
                row.extend(by_role.into_iter().map(float));
                t.push(row);
            }
            Ok(t)
        }
        (who, by) => {
            let items = entities(c, who, args.level);
            let axis = match by {
                None => None,
                Some(By::Field) => Some(MixAxis::Field(args.level)),
                Some(By::Role) => Some(MixAxis::Role),
                Some(By::Year) => Some(MixAxis::Period),
            };
            let rows: Vec<Outcome<Vec<Vec<Value>>>> = items
                .par_iter()
                .map(|(name, sel)| {
                    let pf = portfolio::build_portfolio(c, sel);
                    let total = portfolio::portfolio_capital(&pf, cg);
                    Ok(match axis {
                        None => vec![vec![text(name), float(total)]],
                        Some(axis) => portfolio::portfolio_mix(a, &pf, axis, Basis::Capital)?
                            .into_iter()
                            .map(|(g, w)| vec![text(name), text(g), float(w), float(w * total)])
                            .collect(),
                    })
                })
                .collect();
            let mut t = match axis {
                None => Table::new(&["entity", "capital"]),
                Some(_) => Table::new(&["entity", "group", "weight", "capital"]),
            };
            for r in rows {
                for row in r? {
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

fn clusters(cli: &Cli, a: &Analysis, args: &ClusterArgs) -> Outcome<Table> {
    let c = a.corpus();
    let (graph, labels): (Sparse, Vec<Vec<Value>>) = match args.graph {
        GraphArg::Refs => (
            symmetrize(a.references()),
            (0..c.n_manuscripts()).map(|m| node_cells(c, Node::Manuscript(m))).collect(),
        ),
        GraphArg::Shares | GraphArg::Capital => {
            let full = if matches!(args.graph, GraphArg::Shares) { build_full(c) } else { a.capital_graph().expand() };
            if matches!(args.op, ClusterOp::Trees) {
                let counts = spanning_tree_counts(&full)?;
                let r = tree_ratios(&counts);
                let mut t = Table::new(&["log_tau_c", "log_tau_cw", "log_tau_k", "log_tau_kw", "str", "str_w", "rstr"]);
                t.push(vec![
                    float(counts.log_tau_c),
                    float(counts.log_tau_cw),
                    float(counts.log_tau_k),
                    float(counts.log_tau_kw),
                    measure(&r.str_ratio),
                    measure(&r.str_weighted),
                    measure(&r.rstr),
                ]);
                return Ok(t);
            }
            let labels = (0..full.side()).map(|i| node_cells(c, full.node(i))).collect();
            (full.matrix().clone(), labels)
        }
    };
    if matches!(args.op, ClusterOp::Trees) {
        return usage("spanning trees are defined on the shares and capital graphs");
    }
    let (graph, labels) = if args.support {
        let (sub, kept) = support_subgraph(&graph);
        (sub, kept.into_iter().map(|i| labels[i].clone()).collect())
    } else {
        (graph, labels)
    };
    let end = match args.end {
        EndArg::Small => End::Smallest,
        EndArg::Large => End::Largest,
    };
    let kind = match args.laplacian {
        LaplacianArg::Combinatorial => LaplacianKind::Combinatorial,
        LaplacianArg::Normalized => LaplacianKind::Normalized,
    };
    let column = |name: &str, values: Vec<Value>| {
        let mut t = Table::new(&["kind", "id", "role", name]);
        for (mut row, v) in labels.iter().cloned().zip(values) {
            row.push(v);
            t.push(row);
        }
        t
    };
    Ok(match args.op {
        ClusterOp::Partition => {
            let parts = cluster(&graph, args.k, end, kind, cli.seed.unwrap_or(KMEANS_SEED))?;
            column("cluster", parts.into_iter().map(|p| json!(p)).collect())
        }
        ClusterOp::Components => {
            let comps = connected_components(&laplacian(&graph))?;
            if !comps.agrees() {
                eprintln!(
                    "warning: {} components but {:?} zero eigenvalues",
                    comps.count, comps.zero_eigenvalues
                );
            }
            column("component", comps.labels.into_iter().map(|p| json!(p)).collect())
        }
        ClusterOp::Fiedler => column("fiedler", fiedler_embedding(&laplacian(&graph))?.into_iter().map(float).collect()),
        ClusterOp::Eigen => {
            let l = match kind {
                LaplacianKind::Combinatorial => laplacian(&graph),
                LaplacianKind::Normalized => liberata::graph_spectral::normalized_laplacian(&graph),
            };
            let pairs = eigendecompose(&l, args.k.min(l.rows()), end)?;
            let mut t = Table::new(&["index", "eigenvalue"]);
            for (i, v) in pairs.values.into_iter().enumerate() {
                t.push(vec![json!(i), float(v)]);
            }
            t
        }
        ClusterOp::Trees => unreachable!(),
    })
}

fn similar(a: &Analysis, args: &SimilarArgs) -> Outcome<Table> {
    let c = a.corpus();
    let m = c.require_manuscript(&args.to)?;
    if args.infer {
        let s = taxonomy_relevancy::infer_tags(c, a.references(), m, args.level)?
            .auto_assign(args.threshold.unwrap_or(AUTO_ASSIGN_THRESHOLD));
        let status = serde_json::to_value(s.status).expect("serializable");
        let mut t = Table::new(&["tag", "confidence", "status"]);
        for (tag, conf) in s.confidences {
            t.push(vec![text(tag), float(conf), status.clone()]);
        }
        return Ok(t);
    }
    let by = match args.by {
        SimilarBy::Tags => SimilarityBy::Tags(args.level),
        SimilarBy::Cocite => SimilarityBy::Cocitation,
    };
    let mut t = Table::new(&["rank", "manuscript", "score"]);
    for (rank, (other, score)) in taxonomy_relevancy::most_similar(a, m, by, args.top)?.into_iter().enumerate() {
        t.push(vec![json!(rank + 1), text(&c.manuscript(other).id), float(score)]);
    }
    Ok(t)
}

fn basis(b: BasisArg) -> Outcome<Basis> {
    match b {
        BasisArg::Capital => Ok(Basis::Capital),
        BasisArg::Shares => Ok(Basis::Shares),
        BasisArg::Binary => usage("binary basis only applies to the vector report"),
    }
}

fn level_arg(s: &str, what: &str) -> Outcome<usize> {
    match s.strip_prefix("field:").map(str::parse::<usize>) {
        Some(Ok(k)) => Ok(k),
        _ => usage(format!("bad {what} `{s}`")),
    }
}

fn mix_axis(s: &str) -> Outcome<MixAxis> {
    match s {
        "role" => Ok(MixAxis::Role),
        "period" | "year" => Ok(MixAxis::Period),
        other => Ok(MixAxis::Field(level_arg(other, "mix axis")?)),
    }
}

fn grouping(s: &str) -> Outcome<Grouping> {
    match s {
        "manuscript" => Ok(Grouping::Manuscript),
        other => Ok(Grouping::Field(level_arg(other, "grouping")?)),
    }
}

const METRICS: [&str; 16] = [
    "capital",
    "holdings",
    "manuscripts",
    "mean",
    "volatility",
    "skew",
    "sharpe",
    "arc",
    "dr",
    "hhi",
    "gini",
    "entropy",
    "efficiency",
    "funding_efficiency",
    "relative",
    "risk_adjusted",
];

fn or_null(r: liberata::Result<Value>) -> Outcome<Value> {
    match r {
        Ok(v) => Ok(v),
        Err(Error::InvalidArgument(m)) => usage(m),
        Err(Error::Validation(r)) => Err(Failure::Data(Error::Validation(r))),
        Err(_) => Ok(Value::Null),
    }
}

fn portfolio_metrics(a: &Analysis, d: &Dataset, pf: &Portfolio, names: &[String], args: &PortfolioArgs) -> Outcome<Vec<Value>> {
    let series = portfolio::returns_series(a, pf, args.period)?;
    let mo = portfolio::moments(&series.values);
    let cap = portfolio::portfolio_capital(pf, a.capital_graph());
    let ratios = portfolio::ratio_metrics(&mo.mean, &mo.volatility, cap);
    let needs_weights = names.iter().any(|n| matches!(n.as_str(), "hhi" | "gini" | "entropy"));
    let conc = if needs_weights {
        match portfolio::allocation_weights(a, pf, basis(args.basis)?, grouping(&args.group)?) {
            Ok(w) => Some(portfolio::concentration(&w.iter().map(|x| x.1).collect::<Vec<_>>())),
            Err(Error::ZeroTotal) => None,
            Err(e) => return Err(e.into()),
        }
    } else {
        None
    };
    let c_val = |f: fn(&portfolio::Concentration) -> f64| conc.as_ref().map_or(Value::Null, |c| float(f(c)));
    names
        .iter()
        .map(|n| {
            Ok(match n.as_str() {
                "capital" => float(cap),
                "holdings" => json!(pf.holdings.len()),
                "manuscripts" => json!(pf.manuscripts().len()),
                "mean" => measure(&mo.mean),
                "volatility" => measure(&mo.volatility),
                "skew" => measure(&mo.skew),
                "sharpe" => measure(&ratios.sharpe),
                "arc" => measure(&ratios.arc),
                "dr" => or_null(portfolio::diversification_ratio(a, pf, args.period).map(|m| measure(&m)))?,
                "hhi" => c_val(|c| c.hhi),
                "gini" => c_val(|c| c.gini),
                "entropy" => c_val(|c| c.entropy),
                "efficiency" => or_null(portfolio::efficiency(a, pf, EfficiencyBasis::Time).map(float))?,
                "funding_efficiency" => {
                    or_null(portfolio::efficiency(a, pf, EfficiencyBasis::Funding(&d.funding)).map(float))?
                }
                "relative" => or_null(market::relative_performance(a, pf, args.period, false).map(|m| measure(&m)))?,
                "risk_adjusted" => {
                    or_null(market::relative_performance(a, pf, args.period, true).map(|m| measure(&m)))?
                }
                other => return usage(format!("unknown metric `{other}`")),
            })
        })
        .collect()
}

fn pyramid_table(p: &Pyramid) -> Table {
    let mut t = Table::new(&["bin_low", "bin_high", "count"]);
    t.push(vec![Value::Null, Value::Null, json!(p.zero)]);
    for b in &p.bins {
        t.push(vec![float(b.low), float(b.high), json!(b.count)]);
    }
    t
}

fn contributor_capital_of(a: &Analysis, persons: Option<&BTreeSet<usize>>) -> Vec<f64> {
    let all = a.capital_graph().person_totals();
    match persons {
        None => all,
        Some(set) => set.iter().map(|&p| all[p]).collect(),
    }
}

fn portfolios(a: &Analysis, d: &Dataset, args: &PortfolioArgs) -> Outcome<Table> {
    let c = a.corpus();
    let base = selector(&args.select)?;
    let mut items: Vec<(String, PortfolioSelector)> = match args.each {
        None => vec![(base.to_string(), base.clone())],
        Some(each) => {
            let who = match each {
                EachArg::Contributor => Who::Contributor,
                EachArg::Institution => Who::Institution,
                EachArg::Region => Who::Region,
            };
            entities(c, who, 4)
                .into_iter()
                .map(|(name, e)| {
                    let mut sel = base.clone();
                    sel.contributors.extend(e.contributors);
                    sel.institutions.extend(e.institutions);
                    sel.regions.extend(e.regions);
                    (name, sel)
                })
                .collect()
        }
    };
    if args.hist.is_some() {
        let mut persons = BTreeSet::new();
        for (_, sel) in &items {
            persons.extend(portfolio::build_portfolio(c, sel).holdings.iter().map(|h| h.person));
        }
        return Ok(pyramid_table(&population_pyramid(&contributor_capital_of(a, Some(&persons)), args.bins)?));
    }
    let lead = if args.each.is_some() { "entity" } else { "selector" };
    match args.report {
        PortfolioReport::Metrics => {
            let names = list(&args.metrics);
            if let Some(bad) = names.iter().find(|n| !METRICS.contains(&n.as_str())) {
                return usage(format!("unknown metric `{bad}`; known: {}", METRICS.join(",")));
            }
            let rows: Vec<Outcome<Vec<Value>>> = items
                .par_iter()
                .map(|(name, sel)| {
                    let pf = portfolio::build_portfolio(c, sel);
                    let mut row = vec![text(name)];
                    row.extend(portfolio_metrics(a, d, &pf, &names, args)?);
                    Ok(row)
                })
                .collect();
            let mut header = vec![lead.to_string()];
            header.extend(names.iter().cloned());
            let mut t = Table::with_header(header);
            for r in rows {
                t.push(r?);
            }
            Ok(t)
        }
        PortfolioReport::Reliability => {
            let p = c.require_contributor(require(&args.contributor, "--contributor")?)?;
            let r = portfolio::reliability(a, p, qc_role(require(&args.role, "--role")?)?)?;
            let mut t = Table::new(&["contributor", "role", "proportional_loss", "proportional_split"]);
            t.push(vec![
                text(&c.contributor(p).id),
                text(role(args.role.as_deref().unwrap_or_default())?.as_str()),
                measure(&r.proportional_loss),
                measure(&r.proportional_split),
            ]);
            Ok(t)
        }
        PortfolioReport::Iqc => {
            let m = c.require_manuscript(require(&args.manuscript, "--manuscript")?)?;
            let event = date(require(&args.event, "--event")?)?;
            let window = args.window.unwrap_or(portfolio::IQC_WINDOW_YEARS);
            let mut t = Table::new(&["manuscript", "event", "window_years", "iqc"]);
            t.push(vec![
                text(&c.manuscript(m).id),
                text(event.to_string()),
                float(window),
                measure(&portfolio::iqc(a, m, event, window)?),
            ]);
            Ok(t)
        }
        PortfolioReport::Journal => {
            let tags = list(require(&args.tags, "--tags")?);
            let mut t = Table::new(&["tags", "mean_capital"]);
            t.push(vec![text(tags.join(";")), float(portfolio::journal_mean_capital(a, &tags)?)]);
            Ok(t)
        }
        report => {
            let mut t = match report {
                PortfolioReport::Holdings => Table::new(&[lead, "manuscript", "contributor", "role", "share"]),
                PortfolioReport::Returns => Table::new(&[lead, "period_end", "return"]),
                _ => Table::new(&[lead, "key", "weight"]),
            };
            for (name, sel) in items.drain(..) {
                let pf = portfolio::build_portfolio(c, &sel);
                for w in &pf.warnings {
                    eprintln!("warning: {name}: {w}");
                }
                let rows: Vec<Vec<Value>> = match report {
                    PortfolioReport::Holdings => pf
                        .holdings
                        .iter()
                        .map(|h| {
                            vec![
                                text(c.manuscript(h.manuscript).id.clone()),
                                text(c.contributor(h.person).id.clone()),
                                text(h.role.as_str()),
                                float(h.share),
                            ]
                        })
                        .collect(),
                    PortfolioReport::Mix => portfolio::portfolio_mix(a, &pf, mix_axis(&args.mix)?, basis(args.basis)?)?
                        .into_iter()
                        .map(|(k, w)| vec![text(k), float(w)])
                        .collect(),
                    PortfolioReport::Weights => {
                        portfolio::allocation_weights(a, &pf, basis(args.basis)?, grouping(&args.group)?)?
                            .into_iter()
                            .map(|(k, w)| vec![text(k), float(w)])
                            .collect()
                    }
                    PortfolioReport::Vector => {
                        let wb = match args.basis {
                            BasisArg::Capital => WeightBasis::Capital,
                            BasisArg::Shares => WeightBasis::Shares,
                            BasisArg::Binary => WeightBasis::Binary,
                        };
                        let tags = taxonomy_relevancy::level_basis(c, args.level)?;
                        let v = taxonomy_relevancy::portfolio_vector(a, &pf, args.level, wb)?;
                        tags.into_iter().zip(v).map(|(k, w)| vec![text(k), float(w)]).collect()
                    }
                    PortfolioReport::Returns => {
                        let s = portfolio::returns_series(a, &pf, args.period)?;
                        s.grid[1..].iter().zip(&s.values).map(|(d, v)| vec![text(d.to_string()), float(*v)]).collect()
                    }
                    _ => unreachable!(),
                };
                for mut row in rows {
                    row.insert(0, text(&name));
                    t.push(row);
                }
            }
            Ok(t)
        }
    }
}

fn markets(a: &Analysis, args: &MarketArgs) -> Outcome<Table> {
    let c = a.corpus();
    let txs = c.transactions();
    let chosen = [args.fmp, args.premium, args.feasible, args.capm, args.relative].iter().filter(|b| **b).count();
    if chosen != 1 {
        return usage("choose exactly one of --fmp, --premium, --feasible, --capm, --relative");
    }
    if args.fmp {
        let r = qc_role(&args.role)?;
        let window = match (&args.from, &args.until) {
            (None, None) => None,
            (Some(f), Some(u)) => Some((date(f)?, date(u)?)),
            _ => return usage("--from and --until go together"),
        };
        let price = |tag: &str| match window {
            None => market::fmp(txs, r, tag),
            Some((f, u)) => market::fmp_between(txs, r, tag, f, u),
        };
        let mut t = Table::new(&["tag", "role", "fmp"]);
        match (&args.tag, args.depth) {
            (Some(tag), _) => t.push(vec![text(tag), text(r.as_str()), float(price(tag)?)]),
            (None, Some(depth)) => {
                if !(1..=4).contains(&depth) {
                    return usage("--depth must be 1..4");
                }
                for tag in c.taxonomy().level_tags(depth) {
                    let v = or_null(price(tag).map(float))?;
                    t.push(vec![text(tag), text(r.as_str()), v]);
                }
            }
            (None, None) => return usage("--fmp needs --tag or --depth"),
        }
        return Ok(t);
    }
    if args.premium {
        let r = qc_role(&args.role)?;
        let tag = require(&args.tag, "--tag")?;
        let ids = list(require(&args.authors, "--authors")?);
        let set: BTreeSet<usize> = ids.iter().map(|i| c.require_contributor(i)).collect::<liberata::Result<_>>()?;
        let mut t = Table::new(&["authors", "tag", "role", "premium"]);
        t.push(vec![
            text(ids.join(";")),
            text(tag),
            text(r.as_str()),
            float(market::risk_premium(c, &set, r, tag)?),
        ]);
        return Ok(t);
    }
    if args.feasible {
        let side = match require(&args.side, "--side")?.as_str() {
            "author-review" => Side::AuthorReview,
            "reviewer" => Side::Reviewer,
            "author-replication" => Side::AuthorReplication,
            "replicator" => Side::Replicator,
            other => return usage(format!("unknown side `{other}`")),
        };
        let f = if side.is_author() {
            Feasibility::Author {
                expected_with: *require(&args.expected_with, "--expected-with")?,
                expected_without: *require(&args.expected_without, "--expected-without")?,
                share_with: *require(&args.share_with, "--share-with")?,
                share_without: *require(&args.share_without, "--share-without")?,
            }
        } else {
            Feasibility::Provider {
                t_provider: *require(&args.t_provider, "--t-provider")?,
                t_author: *require(&args.t_author, "--t-author")?,
                share: *require(&args.share, "--share")?,
            }
        };
        let mut t = Table::new(&["side", "feasible"]);
        t.push(vec![serde_json::to_value(side).expect("serializable"), Value::Bool(market::feasible_for(side, &f)?)]);
        return Ok(t);
    }
    if args.capm {
        let m = c.require_manuscript(require(&args.manuscript, "--manuscript")?)?;
        let r = market::manuscript_capm(a, m, args.period)?;
        let mut t = Table::new(&["manuscript", "beta", "alpha", "relative", "risk_adjusted"]);
        t.push(vec![
            text(&c.manuscript(m).id),
            measure(&r.beta),
            measure(&r.alpha),
            measure(&r.relative),
            measure(&r.risk_adjusted),
        ]);
        return Ok(t);
    }
    let sel = selector(&args.select)?;
    let pf = portfolio::build_portfolio(c, &sel);
    let v = market::relative_performance(a, &pf, args.period, args.risk_adjusted)?;
    let mut t = Table::new(&["selector", "risk_adjusted", "relative_performance"]);
    t.push(vec![text(sel.to_string()), Value::Bool(args.risk_adjusted), measure(&v)]);
    Ok(t)
}

enum OwnedScope {
    Manuscript(usize),
    Field(String),
    Portfolio(Portfolio),
}

impl OwnedScope {
    fn parse(c: &Corpus, s: &str) -> Outcome<OwnedScope> {
        let Some((kind, v)) = s.split_once(':') else {
            return usage(format!("scope `{s}` must be manuscript:ID, field:TAG or portfolio:SELECTOR"));
        };
        Ok(match kind {
            "manuscript" => OwnedScope::Manuscript(c.require_manuscript(v)?),
            "field" => OwnedScope::Field(v.to_string()),
            "portfolio" => OwnedScope::Portfolio(portfolio::build_portfolio(c, &selector(v)?)),
            other => return usage(format!("unknown scope kind `{other}`")),
        })
    }

    fn scope(&self) -> Scope<'_> {
        match self {
            OwnedScope::Manuscript(m) => Scope::Manuscript(*m),
            OwnedScope::Field(t) => Scope::Field(t),
            OwnedScope::Portfolio(p) => Scope::Portfolio(p),
        }
    }
}

fn distributions(a: &Analysis, args: &DistributionArgs) -> Outcome<Table> {
    let c = a.corpus();
    if !args.hhi.is_empty() {
        let mut t = Table::new(&["scope", "author_hhi"]);
        for s in &args.hhi {
            let scope = OwnedScope::parse(c, s)?;
            t.push(vec![text(s), float(author_hhi(c, &scope.scope())?)]);
        }
        return Ok(t);
    }
    if !args.hhid.is_empty() {
        let (x, y) = (OwnedScope::parse(c, &args.hhid[0])?, OwnedScope::parse(c, &args.hhid[1])?);
        let mut t = Table::new(&["scope_a", "scope_b", "hhid"]);
        t.push(vec![text(&args.hhid[0]), text(&args.hhid[1]), float(hhid(c, &x.scope(), &y.scope())?)]);
        return Ok(t);
    }
    let persons = match &args.select {
        Some(s) => {
            let pf = portfolio::build_portfolio(c, &selector(s)?);
            Some(pf.holdings.iter().map(|h| h.person).collect::<BTreeSet<usize>>())
        }
        None => None,
    };
    let values = contributor_capital_of(a, persons.as_ref());
    if args.stats {
        let s = distribution_stats(&values)?;
        return Ok(Table::from_records(&[], [(Vec::new(), s)]));
    }
    if args.hist.is_some() {
        return Ok(pyramid_table(&population_pyramid(&values, args.bins)?));
    }
    usage("choose one of --hhi, --hhid, --hist, --stats")
}

fn healths(a: &Analysis, d: &Dataset, args: &HealthArgs) -> Outcome<Table> {
    let c = a.corpus();
    let txs = c.transactions();
    let at = match &args.at {
        Some(s) => date(s)?,
        None => match c.last_date() {
            Some(d) => d,
            None => return Err(Failure::Data(Error::EmptyDistribution)),
        },
    };
    let tag = args.tag.as_deref();
    let one = |name: &str, v: Value| {
        let mut t = Table::new(&["metric", "at", "value"]);
        t.push(vec![text(name), text(at.to_string()), v]);
        t
    };
    Ok(match args.metric {
        HealthMetric::Growth => one("growth", float(health::capital_growth_rate(a, at, args.months)?)),
        HealthMetric::GrowthSeries => {
            let mut t = Table::new(&["window_end", "growth"]);
            for (end, g) in health::growth_series(a, args.months)? {
                t.push(vec![text(end.to_string()), float(g)]);
            }
            t
        }
        HealthMetric::FmpShrinkage => one(
            "fmp_shrinkage",
            float(health::fmp_shrinkage(txs, qc_role(&args.role)?, tag, at, args.months)?),
        ),
        HealthMetric::WeightedShrinkage => {
            let psi = *require(&args.psi, "--psi")?;
            let rev = health::fmp_shrinkage(txs, Role::PeerReviewer, tag, at, args.months)?;
            let rep = health::fmp_shrinkage(txs, Role::Replicator, tag, at, args.months)?;
            one("weighted_shrinkage", float(health::weighted_shrinkage(psi, rev, rep)?))
        }
        HealthMetric::FmpHistory => {
            let mut t = Table::new(&["step", "fmp"]);
            for (i, p) in health::fmp_history(txs, qc_role(&args.role)?, tag, at, args.n, args.months)?
                .into_iter()
                .enumerate()
            {
                t.push(vec![json!(i), float(p)]);
            }
            t
        }
        HealthMetric::FmpVolatility => one(
            "fmp_volatility",
            float(health::fmp_volatility(txs, qc_role(&args.role)?, tag, at, args.n, args.months)?),
        ),
        HealthMetric::Geo => {
            let ids: Vec<String> = match &args.region {
                Some(r) => vec![r.clone()],
                None => d.regions.iter().map(|r| r.region_id.clone()).collect(),
            };
            let rows = ids
                .iter()
                .map(|r| Ok((Vec::new(), health::geo_capital(a, &d.regions, r, args.level)?)))
                .collect::<Outcome<Vec<_>>>()?;
            Table::from_records(&[], rows)
        }
        HealthMetric::GeoGini => {
            let b = match args.basis.as_deref().unwrap_or("per-capita") {
                "per-capita" => GeoBasis::PerCapita,
                "per-contributor" => GeoBasis::PerContributor,
                "per-gdp" => GeoBasis::PerGdp,
                other => return usage(format!("unknown geo basis `{other}`")),
            };
            let f = match args.formula.as_str() {
                "literal" => GiniFormula::Literal,
                "standard" => GiniFormula::Standard,
                other => return usage(format!("unknown formula `{other}`")),
            };
            one("geo_gini", float(health::geo_gini(a, &d.regions, b, f)?))
        }
        HealthMetric::GlobalEfficiency => {
            let b = match args.basis.as_deref().unwrap_or("funding") {
                "funding" => GlobalBasis::Funding,
                "gdp" => GlobalBasis::Gdp,
                "ppp" => GlobalBasis::Ppp,
                "time" => GlobalBasis::Time,
                other => return usage(format!("unknown global basis `{other}`")),
            };
            let v = health::global_efficiency(a, b, &d.funding, &d.regions, args.region.as_deref())?;
            one("global_efficiency", float(v))
        }
        HealthMetric::Volume => {
            let w = match (&args.from, &args.until) {
                (None, None) => Window::ending(at, args.months),
                (f, u) => Window {
                    from: f.as_deref().map(date).transpose()?,
                    until: u.as_deref().map(date).transpose()?,
                },
            };
            one("transaction_volume", json!(health::transaction_volume(c, &w)))
        }
        HealthMetric::QcTime => {
            let tag = require(&args.tag, "--tag")?;
            let q = health::qc_time_efficiency(c, tag)?;
            let mut t = Table::new(&["tag", "peer_review", "replication"]);
            t.push(vec![text(tag), measure(&q.peer_review), measure(&q.replication)]);
            t
        }
        HealthMetric::Csr => {
            let name = require(&args.collection, "--collection")?;
            let col = d
                .collections
                .iter()
                .find(|k| &k.name == name)
                .map_or_else(|| usage(format!("unknown collection `{name}`")), Ok)?;
            let subs = col
                .subscribers
                .map_or_else(|| Err(Failure::Data(Error::MissingData(format!("subscribers of `{name}`")))), Ok)?;
            let mut t = Table::new(&["collection", "subscribers", "csr"]);
            t.push(vec![text(name), json!(subs), float(health::csr(c, &col.tags, subs)?)]);
            t
        }
    })
}

fn run_synth(cli: &Cli, args: &SynthArgs) -> Outcome {
    let d = SynthParams::default();
    let p = SynthParams {
        manuscripts: args.manuscripts.unwrap_or(d.manuscripts),
        contributors: args.contributors.unwrap_or(d.contributors),
        fields: args.fields.unwrap_or(d.fields),
        years: args.years.unwrap_or(d.years),
        start_year: args.start_year.unwrap_or(d.start_year),
        share_profile: match args.share_profile {
            None => d.share_profile,
            Some(ShareProfileArg::Descending) => ShareProfile::Descending,
            Some(ShareProfileArg::Uniform) => ShareProfile::Uniform,
            Some(ShareProfileArg::SupervisorHeavy) => ShareProfile::SupervisorHeavy,
        },
        citation_model: match args.citation_model {
            None => d.citation_model,
            Some(CitationModelArg::PreferentialAttachment) => CitationModel::PreferentialAttachment,
            Some(CitationModelArg::Uniform) => CitationModel::Uniform,
        },
        field_profile: match args.field_profile {
            None => d.field_profile,
            Some(FieldProfileArg::Stagnant) => FieldProfile::Stagnant,
            Some(FieldProfileArg::Growing) => FieldProfile::Growing,
            Some(FieldProfileArg::Shrinking) => FieldProfile::Shrinking,
        },
        qc_rate: args.qc_rate.unwrap_or(d.qc_rate),
        mean_references: args.mean_references.unwrap_or(d.mean_references),
        mean_authors: args.mean_authors.unwrap_or(d.mean_authors),
        max_authors: args.max_authors.unwrap_or(d.max_authors),
        regions: args.regions.unwrap_or(d.regions),
        retraction_rate: args.retraction_rate.unwrap_or(d.retraction_rate),
        seed: cli.seed.unwrap_or(d.seed),
    };
    let dir = require(&cli.out, "--out")?;
    let out = synth::generate(&p)?;
    synth::write_dataset(&out, dir)?;
    let c = &out.corpus;
    let mut t = Table::new(&["dir", "manuscripts", "contributors", "shares", "transactions"]);
    t.push(vec![
        text(dir.display().to_string()),
        json!(c.n_manuscripts()),
        json!(c.n_contributors()),
        json!(c.share_assignments().len()),
        json!(c.transactions().len()),
    ]);
    t.write(cli.json, None)?;
    Ok(())
}
