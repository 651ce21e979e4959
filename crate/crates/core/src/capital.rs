//! Academic capital: per-manuscript totals, the capital graph, time series
//! and two-step collaboration indicators.

use std::collections::BTreeMap;

use chrono::NaiveDate;
use serde::Serialize;

use crate::citation_weighting::{FieldRates, Modifier, WeightingPipeline};
use crate::corpus::{Corpus, Role};
use crate::error::{Error, Result};
use crate::shares_graph::{CondensedMatrix, FullMatrix, TwoStep};
use crate::sparse::{self, Sparse};

/// `AC = W 1`, the row sums of the references matrix.
pub fn capital_vector(w: &Sparse) -> Vec<f64> {
    sparse::row_sums(w)
}

/// [`capital_vector`] with retracted manuscripts masked to zero. Their
/// outgoing citations still count for the manuscripts they cite.
pub fn effective_capital(corpus: &Corpus, w: &Sparse) -> Vec<f64> {
    let mut ac = capital_vector(w);
    for (i, v) in ac.iter_mut().enumerate() {
        if corpus.is_retracted(i) {
            *v = 0.0;
        }
    }
    ac
}

/// Condensed capital graph: entry `(m, c) = AC_m * s_{m,c}`.
pub fn capital_graph(ac: &[f64], shares: &CondensedMatrix) -> Result<CondensedMatrix> {
    if ac.len() != shares.n_manuscripts() {
        return Err(Error::DimensionMismatch {
            expected: shares.n_manuscripts(),
            found: ac.len(),
        });
    }
    let m = sparse::scale_rows(shares.matrix(), ac);
    CondensedMatrix::from_sparse(m, shares.n_manuscripts(), shares.n_persons())
}

/// Career capital per person, all roles combined.
pub fn contributor_capital(capital: &CondensedMatrix) -> Vec<f64> {
    capital.person_totals()
}

/// Square of the full capital graph.
pub fn two_step_capital(full_capital: &FullMatrix) -> TwoStep {
    full_capital.two_step()
}

/// Latest grid index for each manuscript count, so that a restricted
/// corpus containing manuscripts `0..n` is the state at date `t`.
fn restricted_len(corpus: &Corpus, t: NaiveDate) -> usize {
    corpus.manuscripts().partition_point(|m| m.published_at <= t)
}

/// Capital of every manuscript at every grid date: `out[g][m]`.
///
/// At each date only citing manuscripts published on or before it count.
/// Field rates are held fixed at `rates` across the grid. Pipelines without
/// an iterated modifier only depend on each edge and the citing side, so a
/// single matrix suffices; otherwise the pipeline is rerun per date.
pub fn capital_timeseries_all(
    corpus: &Corpus,
    pipeline: &WeightingPipeline,
    rates: &FieldRates,
    grid: &[NaiveDate],
) -> Result<Vec<Vec<f64>>> {
    if grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("grid must be sorted ascending".into()));
    }
    let n = corpus.n_manuscripts();
    let iterated = pipeline.modifiers.iter().any(|m| matches!(m, Modifier::Imwc(_)));
    let mut out = Vec::with_capacity(grid.len());
    if !iterated {
        let w = pipeline.run_with_rates(corpus, rates)?.matrix;
        let entries = sparse::entries(&w);
        for &t in grid {
            let k = restricted_len(corpus, t);
            let mut ac = vec![0.0; n];
            for &(x, y, v) in &entries {
                if y < k {
                    ac[x] += v;
                }
            }
            mask_retracted(corpus, &mut ac);
            out.push(ac);
        }
    } else {
        for &t in grid {
            let sub = corpus.published_until(t);
            let w = pipeline.run_with_rates(&sub, rates)?.matrix;
            let mut ac = capital_vector(&w);
            ac.resize(n, 0.0);
            mask_retracted(corpus, &mut ac);
            out.push(ac);
        }
    }
    Ok(out)
}

/// Same as [`capital_timeseries_all`] but always rebuilding the pipeline on
/// the restricted corpus at each date.
pub fn capital_timeseries_recomputed(
    corpus: &Corpus,
    pipeline: &WeightingPipeline,
    rates: &FieldRates,
    grid: &[NaiveDate],
) -> Result<Vec<Vec<f64>>> {
    let n = corpus.n_manuscripts();
    grid.iter()
        .map(|&t| {
            let sub = corpus.published_until(t);
            let mut ac = capital_vector(&pipeline.run_with_rates(&sub, rates)?.matrix);
            ac.resize(n, 0.0);
            mask_retracted(corpus, &mut ac);
            Ok(ac)
        })
        .collect()
}

fn mask_retracted(corpus: &Corpus, ac: &mut [f64]) {
    for (i, v) in ac.iter_mut().enumerate() {
        if corpus.is_retracted(i) {
            *v = 0.0;
        }
    }
}

/// `AC_m(t)` for one manuscript over `grid`.
pub fn capital_timeseries(
    corpus: &Corpus,
    pipeline: &WeightingPipeline,
    rates: &FieldRates,
    m: usize,
    grid: &[NaiveDate],
) -> Result<Vec<f64>> {
    if m >= corpus.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: corpus.n_manuscripts(),
        });
    }
    Ok(capital_timeseries_all(corpus, pipeline, rates, grid)?
        .into_iter()
        .map(|ac| ac[m])
        .collect())
}

/// An author / quality-control pair whose joint capital stands out within
/// their d3 field.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollusionFlag {
    pub field: String,
    pub author: usize,
    pub provider: usize,
    pub role: Role,
    pub value: f64,
    pub threshold: f64,
}

/// Default percentile for [`collusion_flags`].
pub const COLLUSION_PERCENTILE: f64 = 0.99;

/// Flag author-reviewer and author-replicator products
/// `sum_m AC_{m,a} AC_{m,p}` above the `percentile` of the nonzero products
/// in the same d3 field.
pub fn collusion_flags(corpus: &Corpus, capital: &CondensedMatrix, percentile: f64) -> Vec<CollusionFlag> {
    let mut by_field: BTreeMap<&str, BTreeMap<(usize, usize, Role), f64>> = BTreeMap::new();
    for m in 0..corpus.n_manuscripts() {
        let rows: Vec<(usize, Role)> = corpus.shares_of(m).map(|(p, r, _)| (p, r)).collect();
        let field = by_field.entry(corpus.tag_at(m, 3)).or_default();
        for &(a, ra) in &rows {
            if ra != Role::Author {
                continue;
            }
            let va = capital.get(m, a, Role::Author);
            for &(p, rp) in &rows {
                if rp.is_qc() {
                    let v = va * capital.get(m, p, rp);
                    if v != 0.0 {
                        *field.entry((a, p, rp)).or_default() += v;
                    }
                }
            }
        }
    }
    let mut flags = Vec::new();
    for (field, pairs) in by_field {
        let values: Vec<f64> = pairs.values().copied().collect();
        let Some(threshold) = crate::stats::percentile(&values, percentile) else {
            continue;
        };
        for ((author, provider, role), value) in pairs {
            if value > threshold {
                flags.push(CollusionFlag {
                    field: field.to_string(),
                    author,
                    provider,
                    role,
                    value,
                    threshold,
                });
            }
        }
    }
    flags
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::citation_weighting::base_weighted_matrix;
    use crate::corpus::fixture;
    use crate::shares_graph::build_condensed;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fixture_capital() {
        let c = fixture::corpus();
        let ac = capital_vector(&base_weighted_matrix(&c));
        assert_eq!(ac, vec![1.5, 0.5, 0.0]);
        let g = capital_graph(&ac, &build_condensed(&c)).unwrap();
        assert_abs_diff_eq!(g.get(0, 0, Role::Author), 1.05, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(0, 1, Role::Author), 0.45, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(1, 1, Role::Author), 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(g.get(1, 2, Role::Author), 0.2, epsilon = 1e-12);
        let cc = contributor_capital(&g);
        assert_abs_diff_eq!(cc[0], 1.05, epsilon = 1e-12);
        assert_abs_diff_eq!(cc[1], 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(cc[2], 0.2, epsilon = 1e-12);
        assert!(capital_graph(&ac[..2], &build_condensed(&c)).is_err());
    }

    #[test]
    fn two_step_diag() {
        let c = fixture::corpus();
        let ac = capital_vector(&base_weighted_matrix(&c));
        let g = capital_graph(&ac, &build_condensed(&c)).unwrap();
        let t = two_step_capital(&g.expand());
        let aa = t.role_block(Role::Author, Role::Author);
        assert_abs_diff_eq!(sparse::get(&aa, 1, 1), 0.2925, epsilon = 1e-12);
        let ap = t.role_block(Role::Author, Role::PeerReviewer);
        assert_eq!(sparse::get(&ap, 2, 0), 0.0);
    }

    #[test]
    fn retraction_masks_row_only() {
        let c = fixture::corpus().apply_retraction("m2").unwrap();
        let ac = effective_capital(&c, &base_weighted_matrix(&c));
        assert_eq!(ac, vec![1.5, 0.0, 0.0]);
    }

    #[test]
    fn fixture_timeseries() {
        let c = fixture::corpus();
        let grid = [fixture::date(2020, 1, 1), fixture::date(2021, 1, 1), fixture::date(2022, 1, 1)];
        let p = WeightingPipeline::default();
        let s = capital_timeseries(&c, &p, &FieldRates::default(), 0, &grid).unwrap();
        assert_eq!(s, vec![0.0, 1.0, 1.5]);
        let early = capital_timeseries(&c, &p, &FieldRates::default(), 0, &[fixture::date(2000, 1, 1)]).unwrap();
        assert_eq!(early, vec![0.0]);
    }

    #[test]
    fn fast_path_matches_recompute() {
        let c = fixture::corpus();
        let grid = [fixture::date(2020, 6, 1), fixture::date(2021, 6, 1), fixture::date(2023, 1, 1)];
        let rates = crate::citation_weighting::estimate_field_rates(&c);
        let p: WeightingPipeline = "acsm,pubrate,tmwc".parse().unwrap();
        let a = capital_timeseries_all(&c, &p, &rates, &grid).unwrap();
        let b = capital_timeseries_recomputed(&c, &p, &rates, &grid).unwrap();
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn collusion_outlier_is_flagged() {
        use crate::corpus::CorpusParts;
        // m0 is authored by c0 and reviewed by c5; m1..m4 by c1..c4 and c6.
        let ids: Vec<String> = (0..7).map(|i| format!("c{i}")).collect();
        let mut parts = CorpusParts {
            contributors: ids.iter().map(|c| fixture::contributor(c)).collect(),
            taxonomy: fixture::taxonomy(),
            ..Default::default()
        };
        for i in 0..5 {
            let m = format!("m{i}");
            parts.manuscripts.push(fixture::manuscript(&m, 2020 + i as i32, &[]));
            parts.shares.push(fixture::share(&m, &ids[i], Role::Author, 0.9));
            let reviewer = if i == 0 { &ids[5] } else { &ids[6] };
            parts.shares.push(fixture::share(&m, reviewer, Role::PeerReviewer, 0.1));
        }
        let c = Corpus::new(parts).unwrap();
        let cols = |p: usize, r: Role| r.index() * 7 + p;
        let mut t = vec![(0, cols(0, Role::Author), 5.0), (0, cols(5, Role::PeerReviewer), 5.0)];
        for i in 1..5 {
            t.push((i, cols(i, Role::Author), 0.1));
            t.push((i, cols(6, Role::PeerReviewer), 0.1));
        }
        let g = CondensedMatrix::from_sparse(sparse::from_triplets(5, 21, t), 5, 7).unwrap();
        let flags = collusion_flags(&c, &g, 0.5);
        assert_eq!(flags.len(), 1);
        assert_eq!((flags[0].author, flags[0].provider, flags[0].role), (0, 5, Role::PeerReviewer));
        assert_abs_diff_eq!(flags[0].value, 25.0, epsilon = 1e-12);
        assert_abs_diff_eq!(flags[0].threshold, 0.01, epsilon = 1e-12);
        assert!(collusion_flags(&c, &g, 1.0).is_empty());
    }
}
