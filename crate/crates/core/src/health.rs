//! System-wide and regional health indicators.

use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use serde::Serialize;

use crate::analysis::Analysis;
use crate::corpus::{Corpus, FundingSource, Region, Role, Transaction};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::portfolio::{self, build_portfolio, EfficiencyBasis, PortfolioSelector};
use crate::sparse;
use crate::time::{self, period_grid, sub_months};

/// Dates in `(from, until]`; a missing bound is unbounded.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Window {
    pub from: Option<NaiveDate>,
    pub until: Option<NaiveDate>,
}

impl Window {
    pub fn new(from: NaiveDate, until: NaiveDate) -> Self {
        Window {
            from: Some(from),
            until: Some(until),
        }
    }

    /// The `months` ending at `t`.
    pub fn ending(t: NaiveDate, months: u32) -> Self {
        Window::new(sub_months(t, months), t)
    }

    pub fn contains(&self, d: NaiveDate) -> bool {
        self.from.map_or(true, |f| d > f) && self.until.map_or(true, |u| d <= u)
    }
}

/// Capital printed during the `months` ending at `t` by manuscripts
/// published then, per year.
pub fn capital_growth_rate(a: &Analysis, t: NaiveDate, months: u32) -> Result<f64> {
    if months == 0 {
        return Err(Error::InvalidArgument("period must be at least one month".into()));
    }
    let w = Window::ending(t, months);
    Ok(printed_in(a, &w) / time::period_years(months))
}

fn printed_in(a: &Analysis, w: &Window) -> f64 {
    let c = a.corpus();
    sparse::entries(a.references())
        .into_iter()
        .filter(|&(x, y, _)| !c.is_retracted(x) && w.contains(c.manuscript(y).published_at))
        .map(|(_, _, v)| v)
        .sum()
}

/// Growth rate for consecutive windows covering every publication date,
/// as `(window end, rate)`.
pub fn growth_series(a: &Analysis, months: u32) -> Result<Vec<(NaiveDate, f64)>> {
    if months == 0 {
        return Err(Error::InvalidArgument("period must be at least one month".into()));
    }
    let c = a.corpus();
    let (Some(first), Some(last)) = (c.first_date(), c.last_date()) else {
        return Ok(Vec::new());
    };
    let grid = period_grid(sub_months(first, months), last, months);
    Ok(grid
        .windows(2)
        .map(|g| (g[1], printed_in(a, &Window::new(g[0], g[1])) / time::period_years(months)))
        .collect())
}

fn window_fmp(txs: &[Transaction], role: Role, tag: Option<&str>, w: &Window) -> Option<f64> {
    let paid: Vec<f64> = txs
        .iter()
        .filter(|t| t.role == role && w.contains(t.executed_at))
        .filter(|t| tag.map_or(true, |g| t.field.iter().any(|f| f == g)))
        .map(|t| t.shares_paid)
        .collect();
    crate::stats::mean(&paid)
}

/// `-(FMP(t) - FMP(t - dt)) / dt`, each FMP over the `months` ending at its
/// date. `tag` restricts to one field; `None` is the global market.
pub fn fmp_shrinkage(txs: &[Transaction], role: Role, tag: Option<&str>, t: NaiveDate, months: u32) -> Result<f64> {
    if months == 0 {
        return Err(Error::InvalidArgument("period must be at least one month".into()));
    }
    let prev_end = sub_months(t, months);
    let now = window_fmp(txs, role, tag, &Window::ending(t, months));
    let before = window_fmp(txs, role, tag, &Window::ending(prev_end, months));
    match (now, before) {
        (Some(n), Some(b)) => Ok(-(n - b) / time::period_years(months)),
        (None, _) => Err(Error::NoTransactions(format!("{} in the period ending {t}", role.as_str()))),
        (_, None) => Err(Error::NoTransactions(format!("{} in the period ending {prev_end}", role.as_str()))),
    }
}

/// `psi * reviews + (1 - psi) * replications`, `0 < psi < 1`.
pub fn weighted_shrinkage(psi: f64, reviews: f64, replications: f64) -> Result<f64> {
    if !(psi > 0.0 && psi < 1.0) {
        return Err(Error::InvalidArgument(format!("psi must lie in (0, 1), got {psi}")));
    }
    Ok(psi * reviews + (1.0 - psi) * replications)
}

/// `sqrt(Var(prices) * n)` with population variance over `n` prices.
pub fn volatility_of(prices: &[f64]) -> Result<f64> {
    if prices.len() < 2 {
        return Err(Error::InsufficientHistory(format!("{} FMP periods, need 2", prices.len())));
    }
    let var = crate::stats::variance(prices).expect("nonempty");
    Ok((var * prices.len() as f64).sqrt())
}

/// FMP in each of the `n` periods ending at `t`, oldest first.
pub fn fmp_history(txs: &[Transaction], role: Role, tag: Option<&str>, t: NaiveDate, n: usize, months: u32) -> Result<Vec<f64>> {
    if months == 0 {
        return Err(Error::InvalidArgument("period must be at least one month".into()));
    }
    let mut out = Vec::with_capacity(n);
    for k in (0..n).rev() {
        let end = sub_months(t, months * k as u32);
        match window_fmp(txs, role, tag, &Window::ending(end, months)) {
            Some(p) => out.push(p),
            None => {
                return Err(Error::InsufficientHistory(format!(
                    "no {} transactions in the period ending {end}",
                    role.as_str()
                )))
            }
        }
    }
    Ok(out)
}

/// Volatility of the FMP over the `n` periods ending at `t`.
pub fn fmp_volatility(txs: &[Transaction], role: Role, tag: Option<&str>, t: NaiveDate, n: usize, months: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::InsufficientHistory(format!("{n} FMP periods, need 2")));
    }
    volatility_of(&fmp_history(txs, role, tag, t, n, months)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoCapital {
    pub region: String,
    pub capital: f64,
    pub contributors: usize,
    pub per_capita: Measure,
    pub per_contributor: Measure,
    pub per_gdp: Measure,
    /// Capital by primary tag at the requested level.
    pub fields: BTreeMap<String, f64>,
    pub field_hhi: Measure,
}

fn region_data<'a>(regions: &'a [Region], id: &str) -> Result<&'a Region> {
    regions
        .iter()
        .find(|r| r.region_id == id)
        .ok_or_else(|| Error::MissingRegionData(format!("region `{id}` is not in the regions table")))
}

/// Capital of the contributors based in `region`, its ratios and its
/// concentration across fields at `level`.
pub fn geo_capital(a: &Analysis, regions: &[Region], region: &str, level: usize) -> Result<GeoCapital> {
    if !(1..=4).contains(&level) {
        return Err(Error::InvalidArgument(format!("taxonomy level must be 1..=4, got {level}")));
    }
    let meta = region_data(regions, region)?;
    let c = a.corpus();
    let mut fields: BTreeMap<String, f64> = BTreeMap::new();
    let mut capital = 0.0;
    for (m, p, _, s) in c.share_rows() {
        if c.contributor(p).region == region {
            let v = s * a.capital()[m];
            capital += v;
            *fields.entry(c.tag_at(m, level).to_string()).or_insert(0.0) += v;
        }
    }
    let contributors = c.contributors().iter().filter(|x| x.region == region).count();
    let ratio = |den: Option<f64>, what: &str| match den {
        Some(d) if d > 0.0 => Measure::Value(capital / d),
        Some(_) => Measure::absent(format!("{what} is zero")),
        None => Measure::absent(format!("no {what} for region")),
    };
    let field_hhi = if capital > 0.0 {
        Measure::Value(fields.values().map(|v| (v / capital).powi(2)).sum())
    } else {
        Measure::absent("region has no capital")
    };
    Ok(GeoCapital {
        region: region.to_string(),
        capital,
        contributors,
        per_capita: ratio(Some(meta.population), "population"),
        per_contributor: ratio(Some(contributors as f64), "contributor count"),
        per_gdp: ratio(meta.gdp, "GDP"),
        fields,
        field_hhi,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GeoBasis {
    PerCapita,
    PerContributor,
    PerGdp,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GiniFormula {
    /// `(1 / AC) sum_x sum_y |AC_y X_y - AC_x X_x|` with `X` the basis
    /// denominator, taken literally.
    Literal,
    /// Mean-normalized Gini of the ratios `AC / X`.
    Standard,
}

/// `(AC_region, X_region)` for every region in the table.
fn region_pairs(a: &Analysis, regions: &[Region], basis: GeoBasis) -> Result<Vec<(f64, f64)>> {
    if regions.len() < 2 {
        return Err(Error::MissingRegionData(format!("{} regions, need 2", regions.len())));
    }
    regions
        .iter()
        .map(|r| {
            let g = geo_capital(a, regions, &r.region_id, 4)?;
            let x = match basis {
                GeoBasis::PerCapita => r.population,
                GeoBasis::PerContributor => g.contributors as f64,
                GeoBasis::PerGdp => r
                    .gdp
                    .ok_or_else(|| Error::MissingRegionData(format!("GDP for region `{}`", r.region_id)))?,
            };
            if !(x > 0.0) {
                return Err(Error::MissingRegionData(format!(
                    "non-positive {basis:?} denominator for region `{}`",
                    r.region_id
                )));
            }
            Ok((g.capital, x))
        })
        .collect()
}

/// Regional inequality of capital.
pub fn geo_gini(a: &Analysis, regions: &[Region], basis: GeoBasis, formula: GiniFormula) -> Result<f64> {
    let pairs = region_pairs(a, regions, basis)?;
    Ok(match formula {
        GiniFormula::Literal => literal_gini(&pairs),
        GiniFormula::Standard => standard_gini(&pairs.iter().map(|(ac, x)| ac / x).collect::<Vec<_>>()),
    })
}

/// The literal double sum; zero when total capital is zero.
pub fn literal_gini(pairs: &[(f64, f64)]) -> f64 {
    let total: f64 = pairs.iter().map(|p| p.0).sum();
    if total == 0.0 {
        return 0.0;
    }
    let mut s = 0.0;
    for &(ay, xy) in pairs {
        for &(ax, xx) in pairs {
            s += (ay * xy - ax * xx).abs();
        }
    }
    s / total
}

/// `sum_i sum_j |v_i - v_j| / (2 n sum v)`; zero for an all-zero vector.
pub fn standard_gini(v: &[f64]) -> f64 {
    let n = v.len();
    let total: f64 = v.iter().sum();
    if n == 0 || total == 0.0 {
        return 0.0;
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let pair_sum: f64 = sorted
        .windows(2)
        .enumerate()
        .map(|(k, g)| (g[1] - g[0]) * ((k + 1) * (n - k - 1)) as f64)
        .sum::<f64>()
        * 2.0;
    pair_sum / (2.0 * n as f64 * total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GlobalBasis {
    Funding,
    Gdp,
    Ppp,
    Time,
}

/// Research efficiency of the whole corpus, or of one region's
/// contributors. GDP and PPP forms multiply the funding form by the
/// region's figure, or the sum over the table globally.
pub fn global_efficiency(
    a: &Analysis,
    basis: GlobalBasis,
    funding: &[FundingSource],
    regions: &[Region],
    region: Option<&str>,
) -> Result<f64> {
    let mut sel = PortfolioSelector::default();
    if let Some(r) = region {
        sel.regions.insert(r.to_string());
    }
    let pf = build_portfolio(a.corpus(), &sel);
    let funded = |pf| {
        portfolio::efficiency(a, pf, EfficiencyBasis::Funding(funding))
            .map_err(|e| Error::MissingGlobalData(e.to_string()))
    };
    let figure = |get: fn(&Region) -> Option<f64>, what: &str| -> Result<f64> {
        let rs: Vec<&Region> = match region {
            Some(id) => vec![region_data(regions, id)?],
            None => regions.iter().collect(),
        };
        if rs.is_empty() {
            return Err(Error::MissingGlobalData(format!("no {what} figures")));
        }
        rs.iter()
            .map(|r| get(r).ok_or_else(|| Error::MissingGlobalData(format!("{what} for region `{}`", r.region_id))))
            .sum()
    };
    match basis {
        GlobalBasis::Funding => funded(&pf),
        GlobalBasis::Gdp => Ok(funded(&pf)? * figure(|r| r.gdp, "GDP")?),
        GlobalBasis::Ppp => Ok(funded(&pf)? * figure(|r| r.ppp, "PPP")?),
        GlobalBasis::Time => portfolio::efficiency(a, &pf, EfficiencyBasis::Time)
            .map_err(|e| Error::MissingGlobalData(e.to_string())),
    }
}

/// Nonzero reviewer and replicator share rows on manuscripts published in
/// the window.
pub fn transaction_volume(corpus: &Corpus, window: &Window) -> usize {
    corpus
        .share_rows()
        .filter(|&(m, _, r, s)| r.is_qc() && s != 0.0 && window.contains(corpus.manuscript(m).published_at))
        .count()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QcTime {
    /// Mean total review days per reviewed manuscript.
    pub peer_review: Measure,
    pub replication: Measure,
}

/// Mean over the field's manuscripts of the summed QC durations, per role.
/// Only manuscripts with at least one recorded duration in a role count
/// towards that role.
pub fn qc_time_efficiency(corpus: &Corpus, tag: &str) -> Result<QcTime> {
    let field: BTreeSet<&str> = corpus
        .in_field(tag)
        .into_iter()
        .map(|i| corpus.manuscript(i).id.as_str())
        .collect();
    let mut per: [BTreeMap<&str, f64>; 2] = [BTreeMap::new(), BTreeMap::new()];
    for t in corpus.transactions() {
        let (Some(d), true) = (t.qc_duration, field.contains(t.manuscript.as_str())) else {
            continue;
        };
        let slot = match t.role {
            Role::PeerReviewer => 0,
            Role::Replicator => 1,
            Role::Author => continue,
        };
        *per[slot].entry(t.manuscript.as_str()).or_insert(0.0) += d;
    }
    if per.iter().all(BTreeMap::is_empty) {
        return Err(Error::MissingData(format!("no recorded QC durations in `{tag}`")));
    }
    let mean = |m: &BTreeMap<&str, f64>, role: &str| {
        if m.is_empty() {
            Measure::absent(format!("no {role} durations"))
        } else {
            Measure::Value(m.values().sum::<f64>() / m.len() as f64)
        }
    };
    Ok(QcTime {
        peer_review: mean(&per[0], "review"),
        replication: mean(&per[1], "replication"),
    })
}

/// Collection subscribers per distinct author.
pub fn csr(corpus: &Corpus, tags: &[String], subscribers: u64) -> Result<f64> {
    let authors: BTreeSet<usize> = portfolio::collection_members(corpus, tags)
        .into_iter()
        .flat_map(|m| corpus.authors_of(m))
        .filter(|&(_, s)| s > 0.0)
        .map(|(p, _)| p)
        .collect();
    if authors.is_empty() {
        return Err(Error::ZeroAuthors);
    }
    Ok(subscribers as f64 / authors.len() as f64)
}
