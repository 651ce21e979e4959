//! Portfolios of share holdings and the metrics defined over them.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::Serialize;

use crate::analysis::Analysis;
use crate::corpus::{Corpus, FundingSource, Role};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::shares_graph::CondensedMatrix;
use crate::stats;
use crate::time::{self, period_grid, period_years};

/// Default returns period, in months.
pub const DEFAULT_PERIOD_MONTHS: u32 = 12;
/// Default IQC window, in years.
pub const IQC_WINDOW_YEARS: f64 = 1.0;

/// Filters combined with AND. Within one filter, listed values are
/// alternatives. An unset filter matches everything.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct PortfolioSelector {
    pub contributors: BTreeSet<String>,
    pub institutions: BTreeSet<String>,
    pub regions: BTreeSet<String>,
    pub roles: BTreeSet<Role>,
    /// Every tag must be among the manuscript's tags.
    pub tags: BTreeSet<String>,
    pub from: Option<NaiveDate>,
    pub until: Option<NaiveDate>,
}

impl PortfolioSelector {
    pub fn contributor(id: impl Into<String>) -> Self {
        PortfolioSelector {
            contributors: [id.into()].into(),
            ..Default::default()
        }
    }

    pub fn tag(tag: impl Into<String>) -> Self {
        PortfolioSelector {
            tags: [tag.into()].into(),
            ..Default::default()
        }
    }

    pub fn with_role(mut self, role: Role) -> Self {
        self.roles.insert(role);
        self
    }

    fn matches(&self, corpus: &Corpus, m: usize, p: usize, role: Role) -> bool {
        let c = corpus.contributor(p);
        let ms = corpus.manuscript(m);
        (self.contributors.is_empty() || self.contributors.contains(&c.id))
            && (self.institutions.is_empty() || !self.institutions.is_disjoint(&c.institutions))
            && (self.regions.is_empty() || self.regions.contains(&c.region))
            && (self.roles.is_empty() || self.roles.contains(&role))
            && self.from.map_or(true, |t| ms.published_at >= t)
            && self.until.map_or(true, |t| ms.published_at <= t)
            && (self.tags.is_empty() || {
                let tags = corpus.manuscript_tags(m);
                self.tags.iter().all(|t| tags.contains(t))
            })
    }
}

impl fmt::Display for PortfolioSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        parts.extend(self.contributors.iter().map(|v| format!("contributor={v}")));
        parts.extend(self.institutions.iter().map(|v| format!("institution={v}")));
        parts.extend(self.regions.iter().map(|v| format!("region={v}")));
        parts.extend(self.roles.iter().map(|v| format!("role={}", v.as_str())));
        parts.extend(self.tags.iter().map(|v| format!("tag={v}")));
        parts.extend(self.from.iter().map(|v| format!("from={v}")));
        parts.extend(self.until.iter().map(|v| format!("until={v}")));
        f.write_str(&parts.join(";"))
    }
}

impl FromStr for PortfolioSelector {
    type Err = Error;

    /// `key=value` clauses separated by `;`. Keys: contributor, institution,
    /// region, role, tag, from, until. Repeated keys add alternatives
    /// (tags must all match).
    fn from_str(s: &str) -> Result<Self> {
        let mut sel = PortfolioSelector::default();
        for clause in s.split(';').map(str::trim).filter(|c| !c.is_empty()) {
            let (k, v) = clause
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("selector clause `{clause}` lacks `=`")))?;
            let v = v.trim();
            let date = |v: &str| {
                NaiveDate::parse_from_str(v, "%Y-%m-%d")
                    .map_err(|_| Error::InvalidArgument(format!("bad date `{v}`")))
            };
            match k.trim() {
                "contributor" => {
                    sel.contributors.insert(v.to_string());
                }
                "institution" => {
                    sel.institutions.insert(v.to_string());
                }
                "region" => {
                    sel.regions.insert(v.to_string());
                }
                "role" => {
                    let r = Role::parse(v).ok_or_else(|| Error::InvalidArgument(format!("unknown role `{v}`")))?;
                    sel.roles.insert(r);
                }
                "tag" | "d1" | "d2" | "d3" | "d4" => {
                    sel.tags.insert(v.to_string());
                }
                "from" => sel.from = Some(date(v)?),
                "until" => sel.until = Some(date(v)?),
                other => return Err(Error::InvalidArgument(format!("unknown selector key `{other}`"))),
            }
        }
        Ok(sel)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Holding {
    pub manuscript: usize,
    pub person: usize,
    pub role: Role,
    pub share: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Portfolio {
    /// Sorted by manuscript, person, role.
    pub holdings: Vec<Holding>,
    pub selector: PortfolioSelector,
    pub warnings: Vec<String>,
}

impl Portfolio {
    /// A portfolio from explicit holdings. Shares must be positive.
    pub fn from_holdings(mut holdings: Vec<Holding>) -> Result<Self> {
        if let Some(h) = holdings.iter().find(|h| !(h.share > 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "holding on manuscript {} has non-positive share {}",
                h.manuscript, h.share
            )));
        }
        holdings.sort_by_key(|h| (h.manuscript, h.person, h.role.index()));
        Ok(Portfolio {
            holdings,
            ..Default::default()
        })
    }

    pub fn is_empty(&self) -> bool {
        self.holdings.is_empty()
    }

    /// Distinct manuscripts, ascending.
    pub fn manuscripts(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self.holdings.iter().map(|h| h.manuscript).collect();
        v.dedup();
        v
    }

    /// Total share held in each manuscript.
    pub fn manuscript_shares(&self) -> BTreeMap<usize, f64> {
        let mut out = BTreeMap::new();
        for h in &self.holdings {
            *out.entry(h.manuscript).or_insert(0.0) += h.share;
        }
        out
    }

    /// Portfolio capital given per-manuscript capital `ac`.
    pub fn capital_with(&self, ac: &[f64]) -> f64 {
        self.holdings.iter().map(|h| h.share * ac[h.manuscript]).sum()
    }
}

/// All positive share rows matching `selector`.
pub fn build_portfolio(corpus: &Corpus, selector: &PortfolioSelector) -> Portfolio {
    let holdings: Vec<Holding> = corpus
        .share_rows()
        .filter(|&(m, p, r, s)| s > 0.0 && selector.matches(corpus, m, p, r))
        .map(|(manuscript, person, role, share)| Holding {
            manuscript,
            person,
            role,
            share,
        })
        .collect();
    let mut pf = Portfolio::from_holdings(holdings).expect("positive shares");
    pf.selector = selector.clone();
    if pf.is_empty() {
        pf.warnings.push(format!("selector `{selector}` matched no holdings"));
    }
    pf
}

/// `sum s_{m,c} AC_m` over the holdings.
pub fn portfolio_capital(pf: &Portfolio, capital_graph: &CondensedMatrix) -> f64 {
    pf.holdings
        .iter()
        .map(|h| capital_graph.get(h.manuscript, h.person, h.role))
        .sum()
}

/// What a holding contributes to a weight computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Basis {
    Capital,
    Shares,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MixAxis {
    /// Primary tag at level 1..=4.
    Field(usize),
    Role,
    /// Publication year.
    Period,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Grouping {
    Manuscript,
    Field(usize),
}

fn check_level(level: usize) -> Result<()> {
    if (1..=4).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("taxonomy level must be 1..=4, got {level}")))
    }
}

fn holding_value(a: &Analysis, h: &Holding, basis: Basis) -> f64 {
    match basis {
        Basis::Capital => h.share * a.capital()[h.manuscript],
        Basis::Shares => h.share,
    }
}

fn group<K: Ord>(a: &Analysis, pf: &Portfolio, basis: Basis, key: impl Fn(&Holding) -> K) -> BTreeMap<K, f64> {
    let mut out = BTreeMap::new();
    for h in &pf.holdings {
        *out.entry(key(h)).or_insert(0.0) += holding_value(a, h, basis);
    }
    out
}

fn normalize<K>(groups: BTreeMap<K, f64>, label: impl Fn(K) -> String) -> (f64, Vec<(String, f64)>) {
    let total: f64 = groups.values().sum();
    let rows = groups
        .into_iter()
        .map(|(k, v)| (label(k), if total > 0.0 { v / total } else { 0.0 }))
        .collect();
    (total, rows)
}

/// Breakdown of the portfolio along `axis`. Weights sum to one when the
/// total is positive and are all zero otherwise.
pub fn portfolio_mix(a: &Analysis, pf: &Portfolio, axis: MixAxis, basis: Basis) -> Result<Vec<(String, f64)>> {
    let c = a.corpus();
    Ok(match axis {
        MixAxis::Field(k) => {
            check_level(k)?;
            normalize(group(a, pf, basis, |h| c.tag_at(h.manuscript, k).to_string()), |k| k).1
        }
        MixAxis::Role => normalize(group(a, pf, basis, |h| h.role.index()), |i| {
            Role::from_index(i).expect("role index").as_str().to_string()
        })
        .1,
        MixAxis::Period => normalize(
            group(a, pf, basis, |h| time::year_of(c.manuscript(h.manuscript).published_at)),
            |y| y.to_string(),
        )
        .1,
    })
}

/// Allocation weights by manuscript (labelled by id, in corpus order) or by
/// field tag.
pub fn allocation_weights(a: &Analysis, pf: &Portfolio, basis: Basis, grouping: Grouping) -> Result<Vec<(String, f64)>> {
    let c = a.corpus();
    let (total, rows) = match grouping {
        Grouping::Manuscript => normalize(group(a, pf, basis, |h| h.manuscript), |m| c.manuscript(m).id.clone()),
        Grouping::Field(k) => {
            check_level(k)?;
            normalize(group(a, pf, basis, |h| c.tag_at(h.manuscript, k).to_string()), |k| k)
        }
    };
    if !(total > 0.0) {
        return Err(Error::ZeroTotal);
    }
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Concentration {
    pub hhi: f64,
    pub gini: f64,
    /// Entropy normalized by `ln n`.
    pub entropy: f64,
}

/// HHI, Gini and normalized entropy of a weight vector.
pub fn concentration(w: &[f64]) -> Concentration {
    let n = w.len();
    if n == 0 {
        return Concentration {
            hhi: 0.0,
            gini: 0.0,
            entropy: 0.0,
        };
    }
    let hhi = w.iter().map(|x| x * x).sum();
    let mut sorted = w.to_vec();
    sorted.sort_by(f64::total_cmp);
    // sum over ordered pairs of |w_k - w_l|, via consecutive gaps
    let pair_sum: f64 = sorted
        .windows(2)
        .enumerate()
        .map(|(k, g)| (g[1] - g[0]) * ((k + 1) * (n - k - 1)) as f64)
        .sum::<f64>()
        * 2.0;
    let gini = pair_sum / (2.0 * n as f64);
    let entropy = if n == 1 {
        0.0
    } else {
        -w.iter().filter(|&&x| x > 0.0).map(|x| x * x.ln()).sum::<f64>() / (n as f64).ln()
    };
    Concentration { hhi, gini, entropy }
}

/// Per-period capital changes, divided by the period length in years.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnsSeries {
    pub period_months: u32,
    /// Period boundaries; one more than `values`.
    pub grid: Vec<NaiveDate>,
    pub values: Vec<f64>,
}

impl ReturnsSeries {
    pub fn from_levels(grid: Vec<NaiveDate>, levels: &[f64], period_months: u32) -> Self {
        let dt = period_years(period_months);
        let values = levels.windows(2).map(|w| (w[1] - w[0]) / dt).collect();
        ReturnsSeries {
            period_months,
            grid,
            values,
        }
    }
}

/// Period grid from `start` to the corpus's last publication.
pub fn returns_grid(corpus: &Corpus, start: NaiveDate, period_months: u32) -> Result<Vec<NaiveDate>> {
    if period_months == 0 {
        return Err(Error::InvalidArgument("period must be at least one month".into()));
    }
    let end = corpus.last_date().unwrap_or(start).max(start);
    Ok(period_grid(start, end, period_months))
}

fn portfolio_start(c: &Corpus, pf: &Portfolio) -> Option<NaiveDate> {
    pf.holdings.iter().map(|h| c.manuscript(h.manuscript).published_at).min()
}

/// Returns of the portfolio from its earliest manuscript onwards. An empty
/// portfolio has an empty series.
pub fn returns_series(a: &Analysis, pf: &Portfolio, period_months: u32) -> Result<ReturnsSeries> {
    let Some(start) = portfolio_start(a.corpus(), pf) else {
        return Ok(ReturnsSeries {
            period_months,
            grid: Vec::new(),
            values: Vec::new(),
        });
    };
    let grid = returns_grid(a.corpus(), start, period_months)?;
    let levels: Vec<f64> = a.timeseries(&grid)?.iter().map(|ac| pf.capital_with(ac)).collect();
    Ok(ReturnsSeries::from_levels(grid, &levels, period_months))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Moments {
    pub mean: Measure,
    pub volatility: Measure,
    pub skew: Measure,
}

/// Mean, population standard deviation and skewness of the returns.
pub fn moments(values: &[f64]) -> Moments {
    match values.len() {
        0 => Moments {
            mean: Measure::absent("no periods"),
            volatility: Measure::absent("no periods"),
            skew: Measure::absent("no periods"),
        },
        1 => Moments {
            mean: Measure::Value(values[0]),
            volatility: Measure::absent("single period"),
            skew: Measure::absent("single period"),
        },
        _ => Moments {
            mean: Measure::Value(stats::mean(values).expect("nonempty")),
            volatility: Measure::Value(stats::std_dev(values).expect("nonempty")),
            skew: Measure::Value(stats::skewness(values).expect("nonempty")),
        },
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ratios {
    pub sharpe: Measure,
    /// Returns to capital.
    pub arc: Measure,
}

pub fn ratio_metrics(mean: &Measure, volatility: &Measure, capital: f64) -> Ratios {
    let sharpe = match (mean.value(), volatility.value()) {
        (Some(m), Some(s)) if s > 0.0 => Measure::Value(m / s),
        (Some(_), Some(_)) => Measure::absent("zero volatility"),
        (None, _) => Measure::absent(mean.reason().unwrap_or("no mean")),
        (_, None) => Measure::absent(volatility.reason().unwrap_or("no volatility")),
    };
    let arc = match mean.value() {
        Some(m) if capital > 0.0 => Measure::Value(m / capital),
        Some(_) => Measure::absent("zero capital"),
        None => Measure::absent(mean.reason().unwrap_or("no mean")),
    };
    Ratios { sharpe, arc }
}

/// `sum w_i sigma_i / sigma(sum w_i r_i)` for aligned asset return series.
pub fn diversification_ratio_of(weights: &[f64], assets: &[Vec<f64>]) -> Result<Measure> {
    if weights.len() != assets.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: assets.len(),
        });
    }
    let len = assets.first().map_or(0, Vec::len);
    if let Some(bad) = assets.iter().find(|r| r.len() != len) {
        return Err(Error::DimensionMismatch {
            expected: len,
            found: bad.len(),
        });
    }
    if len < 2 {
        return Ok(Measure::absent("fewer than two periods"));
    }
    let combined: Vec<f64> = (0..len)
        .map(|t| weights.iter().zip(assets).map(|(w, r)| w * r[t]).sum())
        .collect();
    let weighted: f64 = weights
        .iter()
        .zip(assets)
        .map(|(w, r)| w * stats::std_dev(r).expect("nonempty"))
        .sum();
    let sigma = stats::std_dev(&combined).expect("nonempty");
    if !(sigma > 1e-12 * weighted) || sigma == 0.0 {
        return Ok(Measure::absent("portfolio volatility is zero"));
    }
    Ok(Measure::Value(weighted / sigma))
}

/// Return series of each manuscript over a shared grid, `out[i][t]`.
pub fn manuscript_returns(a: &Analysis, ms: &[usize], grid: &[NaiveDate], period_months: u32) -> Result<Vec<Vec<f64>>> {
    let series = a.timeseries(grid)?;
    let dt = period_years(period_months);
    Ok(ms
        .iter()
        .map(|&m| series.windows(2).map(|w| (w[1][m] - w[0][m]) / dt).collect())
        .collect())
}

/// Diversification ratio with share-held weights per manuscript, on the
/// portfolio's returns grid.
pub fn diversification_ratio(a: &Analysis, pf: &Portfolio, period_months: u32) -> Result<Measure> {
    let Some(start) = portfolio_start(a.corpus(), pf) else {
        return Ok(Measure::absent("empty portfolio"));
    };
    let grid = returns_grid(a.corpus(), start, period_months)?;
    let held = pf.manuscript_shares();
    let ms: Vec<usize> = held.keys().copied().collect();
    let total: f64 = held.values().sum();
    let weights: Vec<f64> = held.values().map(|s| s / total).collect();
    diversification_ratio_of(&weights, &manuscript_returns(a, &ms, &grid, period_months)?)
}

/// Funding attributed to each manuscript.
///
/// Each source's amount is split across the manuscripts it funds in
/// proportion to their funding fractions. A manuscript listing sources
/// without fractions splits evenly among them. A manuscript listing none
/// falls back to its authors' funds: author `a` with funds `F_a` assigns
/// `s_a / |F_a|` of the manuscript to each.
pub fn manuscript_funding(corpus: &Corpus, sources: &[FundingSource]) -> Result<Vec<f64>> {
    let amounts: BTreeMap<&str, f64> = sources.iter().map(|s| (s.source_id.as_str(), s.amount)).collect();
    let mut fractions: Vec<BTreeMap<&str, f64>> = vec![BTreeMap::new(); corpus.n_manuscripts()];
    for (i, m) in corpus.manuscripts().iter().enumerate() {
        if !m.funding.is_empty() {
            let k = m.funding.len() as f64;
            for f in &m.funding {
                *fractions[i].entry(f.source.as_str()).or_insert(0.0) += f.fraction.unwrap_or(1.0 / k);
            }
        } else {
            for (p, s) in corpus.authors_of(i) {
                let funds = &corpus.contributor(p).funding;
                for f in funds {
                    *fractions[i].entry(f.as_str()).or_insert(0.0) += s / funds.len() as f64;
                }
            }
        }
    }
    let mut totals: BTreeMap<&str, f64> = BTreeMap::new();
    for fr in &fractions {
        for (&src, &v) in fr {
            *totals.entry(src).or_insert(0.0) += v;
        }
    }
    let mut out = vec![0.0; corpus.n_manuscripts()];
    for (i, fr) in fractions.iter().enumerate() {
        for (&src, &v) in fr {
            let amount = amounts
                .get(src)
                .ok_or_else(|| Error::MissingData(format!("amount for funding source `{src}`")))?;
            if totals[src] > 0.0 {
                out[i] += amount * v / totals[src];
            }
        }
    }
    Ok(out)
}

pub enum EfficiencyBasis<'a> {
    Funding(&'a [FundingSource]),
    Time,
}

/// Capital per unit of funding, or per year from the earliest start of
/// work to the latest publication.
pub fn efficiency(a: &Analysis, pf: &Portfolio, basis: EfficiencyBasis<'_>) -> Result<f64> {
    let ac = pf.capital_with(a.capital());
    match basis {
        EfficiencyBasis::Funding(sources) => {
            let money = pf.capital_with(&manuscript_funding(a.corpus(), sources)?);
            if !(money > 0.0) {
                return Err(Error::MissingData("no funding attributed to the portfolio".into()));
            }
            Ok(ac / money)
        }
        EfficiencyBasis::Time => {
            let c = a.corpus();
            let ms = pf.manuscripts();
            let start = ms
                .iter()
                .map(|&m| {
                    let x = c.manuscript(m);
                    x.work_started_at.unwrap_or(x.published_at)
                })
                .min();
            let end = ms.iter().map(|&m| c.manuscript(m).published_at).max();
            match (start, end) {
                (Some(s), Some(e)) if e > s => Ok(ac / time::years_between(s, e)),
                _ => Err(Error::MissingData("portfolio has no positive time span".into())),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reliability {
    pub proportional_loss: Measure,
    pub proportional_split: Measure,
}

/// Capital lost to retractions relative to what remains, and the share of
/// the person's capital earned in `role`. Lost capital uses the unmasked
/// totals of retracted manuscripts.
pub fn reliability(a: &Analysis, person: usize, role: Role) -> Result<Reliability> {
    if !role.is_qc() {
        return Err(Error::InvalidArgument("reliability is defined for quality-control roles".into()));
    }
    if person >= a.corpus().n_contributors() {
        return Err(Error::IndexOutOfRange {
            index: person,
            size: a.corpus().n_contributors(),
        });
    }
    let (mut lost, mut remaining, mut total) = (0.0, 0.0, 0.0);
    for (m, p, r, s) in a.corpus().share_rows() {
        if p != person {
            continue;
        }
        total += s * a.capital()[m];
        if r != role {
            continue;
        }
        if a.corpus().is_retracted(m) {
            lost += s * a.raw_capital()[m];
        } else {
            remaining += s * a.capital()[m];
        }
    }
    Ok(Reliability {
        proportional_loss: if remaining > 0.0 {
            Measure::Value(lost / remaining)
        } else {
            Measure::absent("no remaining capital in role")
        },
        proportional_split: if total > 0.0 {
            Measure::Value(remaining / total)
        } else {
            Measure::absent("no capital")
        },
    })
}

/// Ratio of slope changes at the middle of three equally spaced samples.
pub fn iqc_from_series(manuscript: [f64; 3], field: [f64; 3], half_years: f64) -> Measure {
    let change = |s: [f64; 3]| ((s[2] - s[1]) - (s[1] - s[0])) / half_years;
    let dm = change(manuscript);
    let df = change(field);
    if df == 0.0 {
        Measure::absent("field slope unchanged")
    } else {
        Measure::Value(dm / df)
    }
}

/// Impact of a quality-control event at `event` on manuscript `m`, with
/// slopes taken over `window_years / 2` on each side. The field series is
/// the mean capital of the manuscripts sharing `m`'s d4 tag.
pub fn iqc(a: &Analysis, m: usize, event: NaiveDate, window_years: f64) -> Result<Measure> {
    let c = a.corpus();
    if m >= c.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: c.n_manuscripts(),
        });
    }
    if !(window_years > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let half_days = (window_years * 365.25 / 2.0).round().max(1.0) as i64;
    let h = chrono::Duration::days(half_days);
    let grid = [event - h, event, event + h];
    let series = a.timeseries(&grid)?;
    let field = c.in_field(c.tag_at(m, 4));
    let mean = |ac: &Vec<f64>| field.iter().map(|&i| ac[i]).sum::<f64>() / field.len() as f64;
    let ms = [series[0][m], series[1][m], series[2][m]];
    let fs = [mean(&series[0]), mean(&series[1]), mean(&series[2])];
    Ok(iqc_from_series(ms, fs, half_days as f64 / 365.25))
}

/// Manuscripts carrying every tag in `tags`.
pub fn collection_members(corpus: &Corpus, tags: &[String]) -> Vec<usize> {
    (0..corpus.n_manuscripts())
        .filter(|&i| {
            let t = corpus.manuscript_tags(i);
            tags.iter().all(|x| t.contains(x))
        })
        .collect()
}

/// Mean capital of the manuscripts carrying every tag in `tags`.
pub fn journal_mean_capital(a: &Analysis, tags: &[String]) -> Result<f64> {
    let ms = collection_members(a.corpus(), tags);
    if ms.is_empty() {
        return Err(Error::EmptyCollection);
    }
    Ok(ms.iter().map(|&m| a.capital()[m]).sum::<f64>() / ms.len() as f64)
}
