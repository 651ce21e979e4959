//! Quality-control prices, risk premiums, marketplace feasibility and
//! field-relative performance.

use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::Serialize;

use crate::analysis::Analysis;
use crate::corpus::{Corpus, Role, Transaction};
use crate::error::{Error, Result};
use crate::measure::Measure;
use crate::portfolio::{returns_grid, Portfolio};
use crate::stats;

fn matching<'a>(txs: &'a [Transaction], role: Role, tag: &'a str) -> impl Iterator<Item = &'a Transaction> + 'a {
    txs.iter()
        .filter(move |t| t.role == role && t.field.iter().any(|f| f == tag))
}

fn mean_paid<'a>(it: impl Iterator<Item = &'a Transaction>, what: impl FnOnce() -> String) -> Result<f64> {
    let paid: Vec<f64> = it.map(|t| t.shares_paid).collect();
    stats::mean(&paid).ok_or_else(|| Error::NoTransactions(what()))
}

/// Fair market price: mean shares paid for `role` in the field `tag`, at
/// whatever depth the tag sits.
pub fn fmp(txs: &[Transaction], role: Role, tag: &str) -> Result<f64> {
    mean_paid(matching(txs, role, tag), || format!("{} / {tag}", role.as_str()))
}

/// [`fmp`] over transactions executed in `(from, until]`.
pub fn fmp_between(txs: &[Transaction], role: Role, tag: &str, from: NaiveDate, until: NaiveDate) -> Result<f64> {
    mean_paid(
        matching(txs, role, tag).filter(|t| t.executed_at > from && t.executed_at <= until),
        || format!("{} / {tag} in ({from}, {until}]", role.as_str()),
    )
}

/// Mean price paid by the author set minus the field's FMP. A transaction
/// counts for the set when any author of its manuscript is in it.
pub fn risk_premium(corpus: &Corpus, authors: &BTreeSet<usize>, role: Role, tag: &str) -> Result<f64> {
    let txs = corpus.transactions();
    let base = fmp(txs, role, tag)?;
    let theirs = mean_paid(
        matching(txs, role, tag).filter(|t| {
            corpus
                .manuscript_index(&t.manuscript)
                .is_some_and(|m| corpus.authors_of(m).iter().any(|(p, _)| authors.contains(p)))
        }),
        || format!("{} / {tag} for the author set", role.as_str()),
    )?;
    Ok(theirs - base)
}

/// Inputs to the marketplace participation inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Feasibility {
    /// Author side: `E[w'] s' > E[w] s`, with primes after the transaction.
    Author {
        expected_with: f64,
        expected_without: f64,
        share_with: f64,
        share_without: f64,
    },
    /// Provider side: `t_provider < t_author * share`.
    Provider { t_provider: f64, t_author: f64, share: f64 },
}

/// Which participant is being asked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    AuthorReview,
    Reviewer,
    AuthorReplication,
    Replicator,
}

impl Side {
    pub fn is_author(self) -> bool {
        matches!(self, Side::AuthorReview | Side::AuthorReplication)
    }
}

/// Strict inequalities; equality is infeasible.
pub fn transaction_feasible(f: &Feasibility) -> bool {
    match *f {
        Feasibility::Author {
            expected_with,
            expected_without,
            share_with,
            share_without,
        } => expected_with * share_with > expected_without * share_without,
        Feasibility::Provider {
            t_provider,
            t_author,
            share,
        } => t_provider < t_author * share,
    }
}

/// Same as [`transaction_feasible`], rejecting inputs that do not belong
/// to `side`.
pub fn feasible_for(side: Side, f: &Feasibility) -> Result<bool> {
    match (side.is_author(), f) {
        (true, Feasibility::Author { .. }) | (false, Feasibility::Provider { .. }) => Ok(transaction_feasible(f)),
        _ => Err(Error::InvalidArgument(format!("{side:?} takes the other kind of inputs"))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Capm {
    pub beta: Measure,
    pub alpha: Measure,
    pub relative: Measure,
    pub risk_adjusted: Measure,
}

/// Zero-risk-free CAPM of `asset` against `field` returns on one grid,
/// with population covariance.
pub fn capm(asset: &[f64], field: &[f64]) -> Result<Capm> {
    if asset.len() != field.len() {
        return Err(Error::DimensionMismatch {
            expected: field.len(),
            found: asset.len(),
        });
    }
    let (Some(mu_m), Some(mu_d)) = (stats::mean(asset), stats::mean(field)) else {
        let no = || Measure::absent("no periods");
        return Ok(Capm {
            beta: no(),
            alpha: no(),
            relative: no(),
            risk_adjusted: no(),
        });
    };
    let var = stats::variance(field).expect("nonempty");
    let beta = if var > 0.0 {
        Measure::Value(stats::covariance(asset, field).expect("nonempty") / var)
    } else {
        Measure::absent("field variance is zero")
    };
    let alpha = beta.clone().map(|b| mu_m - b * mu_d);
    let over = |m: &Measure| {
        if mu_d == 0.0 {
            Measure::absent("field mean return is zero")
        } else {
            m.clone().map(|x| x / mu_d)
        }
    };
    Ok(Capm {
        relative: over(&Measure::Value(mu_m)),
        risk_adjusted: over(&alpha),
        beta,
        alpha,
    })
}

/// Returns of manuscript `m` and of the mean manuscript in its d4 field,
/// from `m`'s publication to the end of the corpus.
pub fn field_returns(a: &Analysis, m: usize, period_months: u32) -> Result<(Vec<f64>, Vec<f64>)> {
    let c = a.corpus();
    if m >= c.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: c.n_manuscripts(),
        });
    }
    let grid = returns_grid(c, c.manuscript(m).published_at, period_months)?;
    let series = a.timeseries(&grid)?;
    let field = c.in_field(c.tag_at(m, 4));
    let dt = crate::time::period_years(period_months);
    let mean = |ac: &Vec<f64>| field.iter().map(|&i| ac[i]).sum::<f64>() / field.len() as f64;
    let rm = series.windows(2).map(|w| (w[1][m] - w[0][m]) / dt).collect();
    let rd = series.windows(2).map(|w| (mean(&w[1]) - mean(&w[0])) / dt).collect();
    Ok((rm, rd))
}

pub fn manuscript_capm(a: &Analysis, m: usize, period_months: u32) -> Result<Capm> {
    let (rm, rd) = field_returns(a, m, period_months)?;
    capm(&rm, &rd)
}

/// Portfolio relative performance. Plain: `sum s_m rho_m / sum s_m`.
/// Risk adjusted: `sum_m alpha_m / mu_d(m)`, unweighted as in the
/// definition. Absent if any member's value is absent.
pub fn relative_performance(a: &Analysis, pf: &Portfolio, period_months: u32, risk_adjusted: bool) -> Result<Measure> {
    let held = pf.manuscript_shares();
    if held.is_empty() {
        return Ok(Measure::absent("empty portfolio"));
    }
    let total: f64 = held.values().sum();
    let mut acc = 0.0;
    for (&m, &s) in &held {
        let c = manuscript_capm(a, m, period_months)?;
        let v = if risk_adjusted { c.risk_adjusted } else { c.relative };
        match v {
            Measure::Value(x) => acc += if risk_adjusted { x } else { s * x / total },
            Measure::Absent(r) => return Ok(Measure::Absent(format!("{}: {r}", a.corpus().manuscript(m).id))),
        }
    }
    Ok(Measure::Value(acc))
}
