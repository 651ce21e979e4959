mod commands;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Share-based impact, concentration, market and health metrics over a
/// manuscript corpus.
#[derive(Debug, Parser)]
#[command(name = "liberata", version)]
pub struct Cli {
    /// Corpus directory holding corpus.json or the default table files.
    #[arg(long, global = true, default_value = ".")]
    pub corpus: PathBuf,
    /// Citation weighting pipeline, e.g. `base=inv_ref,acsm,imwc:4`.
    #[arg(long, global = true)]
    pub weighting: Option<String>,
    /// Output file or directory instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// One JSON object per line instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the corpus and report every violation.
    Validate,
    /// Shares graph rows, degrees, spanning trees and exports.
    Shares(SharesArgs),
    /// Weighted references graph queries.
    Refs(RefsArgs),
    /// Academic capital by manuscript, contributor, institution, region or tag.
    Capital(CapitalArgs),
    /// Spectral clustering, components and spanning-tree ratios.
    Cluster(ClusterArgs),
    /// Similar manuscripts and tag suggestions.
    Similar(SimilarArgs),
    /// Portfolio metrics, mixes, weights and histograms.
    Portfolio(PortfolioArgs),
    /// Quality-control prices, risk premiums, feasibility and CAPM.
    Market(MarketArgs),
    /// Author-share concentration and capital histograms.
    Distribution(DistributionArgs),
    /// System-level indicators.
    Health(HealthArgs),
    /// Write a synthetic corpus to --out.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SharesView {
    /// One row per share assignment.
    Rows,
    Degrees,
    /// Share distribution of a node selection, with summary statistics.
    Fetch,
    Trees,
    Export,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SharesMatrix {
    Condensed,
    Full,
    Laplacian,
    TwoStep,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Format {
    Csv,
    Mtx,
}

#[derive(Debug, Args)]
pub struct SharesArgs {
    #[arg(value_enum, default_value = "rows")]
    pub view: SharesView,
    #[arg(long, value_enum, default_value = "full")]
    pub matrix: SharesMatrix,
    #[arg(long, value_enum, default_value = "mtx")]
    pub format: Format,
    /// Use the capital graph instead of the shares graph.
    #[arg(long)]
    pub capital: bool,
    #[arg(long)]
    pub manuscript: Option<String>,
    #[arg(long)]
    pub contributor: Option<String>,
    /// Restrict --contributor to one role.
    #[arg(long)]
    pub role: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PathLengthArg {
    Hops,
    InverseWeight,
}

#[derive(Debug, Args)]
pub struct RefsArgs {
    /// capital, gram, cocite, centrality, symmetric or power:N.
    #[arg(long, default_value = "capital")]
    pub op: String,
    #[arg(long)]
    pub manuscript: Option<String>,
    #[arg(long, value_enum, default_value = "hops")]
    pub path_length: PathLengthArg,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Who {
    Manuscript,
    Contributor,
    Institution,
    Region,
    Tag,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum By {
    Field,
    Role,
    Year,
}

#[derive(Debug, Args)]
pub struct CapitalArgs {
    #[arg(long, value_enum, default_value = "contributor")]
    pub who: Who,
    #[arg(long, value_enum)]
    pub by: Option<By>,
    /// Taxonomy level for --by field and --who tag.
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    /// Capital of --manuscript on a grid with this many months per step.
    #[arg(long)]
    pub series: Option<u32>,
    #[arg(long)]
    pub manuscript: Option<String>,
    /// Flag author and quality-control pairs above this percentile.
    #[arg(long)]
    pub collusion: Option<Option<f64>>,
    /// Two-step capital blocks between contributors.
    #[arg(long)]
    pub two_step: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum GraphArg {
    Shares,
    Refs,
    Capital,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EndArg {
    Small,
    Large,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum LaplacianArg {
    Combinatorial,
    Normalized,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ClusterOp {
    Partition,
    Components,
    Fiedler,
    Eigen,
    Trees,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long, value_enum, default_value = "partition")]
    pub op: ClusterOp,
    #[arg(long, value_enum, default_value = "shares")]
    pub graph: GraphArg,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[arg(long, value_enum, default_value = "small")]
    pub end: EndArg,
    #[arg(long, value_enum, default_value = "combinatorial")]
    pub laplacian: LaplacianArg,
    /// Drop nodes without edges before clustering.
    #[arg(long)]
    pub support: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SimilarBy {
    Tags,
    Cocite,
}

#[derive(Debug, Args)]
pub struct SimilarArgs {
    #[arg(long)]
    pub to: String,
    #[arg(long, value_enum, default_value = "tags")]
    pub by: SimilarBy,
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, default_value_t = 10)]
    pub top: usize,
    /// Suggest tags for --to from its references instead.
    #[arg(long)]
    pub infer: bool,
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PortfolioReport {
    Metrics,
    Holdings,
    Mix,
    Weights,
    Vector,
    Returns,
    Reliability,
    Iqc,
    Journal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum EachArg {
    Contributor,
    Institution,
    Region,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum BasisArg {
    Capital,
    Shares,
    Binary,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HistArg {
    LogAc,
}

#[derive(Debug, Args)]
pub struct PortfolioArgs {
    /// Filters as `key=value` clauses separated by `;`.
    #[arg(long, default_value = "")]
    pub select: String,
    /// One portfolio per entity, combined with --select.
    #[arg(long, value_enum)]
    pub each: Option<EachArg>,
    #[arg(long, value_enum, default_value = "metrics")]
    pub report: PortfolioReport,
    /// Comma-separated metric names for the metrics report.
    #[arg(long, default_value = "capital,mean,volatility,skew,sharpe,arc,dr,hhi,gini,entropy")]
    pub metrics: String,
    #[arg(long, default_value_t = 12)]
    pub period: u32,
    /// field:K, role or period.
    #[arg(long, default_value = "field:4")]
    pub mix: String,
    /// manuscript or field:K.
    #[arg(long, default_value = "manuscript")]
    pub group: String,
    #[arg(long, value_enum, default_value = "capital")]
    pub basis: BasisArg,
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, value_enum)]
    pub hist: Option<HistArg>,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    #[arg(long)]
    pub contributor: Option<String>,
    #[arg(long)]
    pub role: Option<String>,
    #[arg(long)]
    pub manuscript: Option<String>,
    /// Date of the quality-control event for the iqc report.
    #[arg(long)]
    pub event: Option<String>,
    #[arg(long)]
    pub window: Option<f64>,
    /// Collection tags for the journal report, comma separated.
    #[arg(long)]
    pub tags: Option<String>,
}

#[derive(Debug, Args)]
pub struct MarketArgs {
    #[arg(long)]
    pub fmp: bool,
    #[arg(long)]
    pub premium: bool,
    #[arg(long)]
    pub feasible: bool,
    #[arg(long)]
    pub capm: bool,
    /// Relative performance of the --select portfolio.
    #[arg(long)]
    pub relative: bool,
    #[arg(long, default_value = "review")]
    pub role: String,
    #[arg(long)]
    pub tag: Option<String>,
    /// Every tag at this taxonomy depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Comma-separated contributor ids.
    #[arg(long)]
    pub authors: Option<String>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub until: Option<String>,
    #[arg(long)]
    pub manuscript: Option<String>,
    #[arg(long, default_value = "")]
    pub select: String,
    #[arg(long, default_value_t = 12)]
    pub period: u32,
    #[arg(long)]
    pub risk_adjusted: bool,
    /// author-review, reviewer, author-replication or replicator.
    #[arg(long)]
    pub side: Option<String>,
    #[arg(long)]
    pub expected_with: Option<f64>,
    #[arg(long)]
    pub expected_without: Option<f64>,
    #[arg(long)]
    pub share_with: Option<f64>,
    #[arg(long)]
    pub share_without: Option<f64>,
    #[arg(long)]
    pub t_provider: Option<f64>,
    #[arg(long)]
    pub t_author: Option<f64>,
    #[arg(long)]
    pub share: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DistributionArgs {
    /// manuscript:ID, field:TAG or portfolio:SELECTOR; repeatable.
    #[arg(long)]
    pub hhi: Vec<String>,
    /// Two scopes.
    #[arg(long, num_args = 2)]
    pub hhid: Vec<String>,
    #[arg(long, value_enum)]
    pub hist: Option<HistArg>,
    #[arg(long, default_value_t = 10)]
    pub bins: usize,
    /// Restrict the histogram to the contributors of this portfolio.
    #[arg(long)]
    pub select: Option<String>,
    /// Summary statistics of contributor capital.
    #[arg(long)]
    pub stats: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HealthMetric {
    Growth,
    GrowthSeries,
    FmpShrinkage,
    WeightedShrinkage,
    FmpHistory,
    FmpVolatility,
    Geo,
    GeoGini,
    GlobalEfficiency,
    Volume,
    QcTime,
    Csr,
}

#[derive(Debug, Args)]
pub struct HealthArgs {
    #[arg(long, value_enum)]
    pub metric: HealthMetric,
    /// Evaluation date; defaults to the last publication date.
    #[arg(long)]
    pub at: Option<String>,
    #[arg(long, default_value_t = 12)]
    pub months: u32,
    #[arg(long, default_value = "review")]
    pub role: String,
    #[arg(long)]
    pub tag: Option<String>,
    #[arg(long)]
    pub region: Option<String>,
    /// per-capita, per-contributor or per-gdp; funding, gdp, ppp or time.
    #[arg(long)]
    pub basis: Option<String>,
    /// literal or standard.
    #[arg(long, default_value = "standard")]
    pub formula: String,
    #[arg(long, default_value_t = 4)]
    pub level: usize,
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long)]
    pub collection: Option<String>,
    #[arg(long)]
    pub psi: Option<f64>,
    #[arg(long)]
    pub from: Option<String>,
    #[arg(long)]
    pub until: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ShareProfileArg {
    Descending,
    Uniform,
    SupervisorHeavy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum CitationModelArg {
    PreferentialAttachment,
    Uniform,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FieldProfileArg {
    Stagnant,
    Growing,
    Shrinking,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub manuscripts: Option<usize>,
    #[arg(long)]
    pub contributors: Option<usize>,
    #[arg(long)]
    pub fields: Option<usize>,
    #[arg(long)]
    pub years: Option<u32>,
    #[arg(long)]
    pub start_year: Option<i32>,
    #[arg(long, value_enum)]
    pub share_profile: Option<ShareProfileArg>,
    #[arg(long, value_enum)]
    pub citation_model: Option<CitationModelArg>,
    #[arg(long, value_enum)]
    pub field_profile: Option<FieldProfileArg>,
    #[arg(long)]
    pub qc_rate: Option<f64>,
    #[arg(long)]
    pub mean_references: Option<f64>,
    #[arg(long)]
    pub mean_authors: Option<f64>,
    #[arg(long)]
    pub max_authors: Option<usize>,
    #[arg(long)]
    pub regions: Option<usize>,
    #[arg(long)]
    pub retraction_rate: Option<f64>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Err(e) = commands::init_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    match commands::dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(cli.json),
    }
}
