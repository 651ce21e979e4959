//! Tag vectors, tag and co-citation similarity, and tag inference from
//! references.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::analysis::Analysis;
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::portfolio::Portfolio;
use crate::sparse::{self, Sparse};

/// Default confidence above which a suggestion may be committed.
pub const AUTO_ASSIGN_THRESHOLD: f64 = 0.9;

fn check_level(level: usize) -> Result<()> {
    if (1..=4).contains(&level) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("taxonomy level must be 1..=4, got {level}")))
    }
}

/// Taxonomy tags at `level`, sorted. Vector entry `k` refers to tag `k`.
pub fn level_basis(corpus: &Corpus, level: usize) -> Result<Vec<String>> {
    check_level(level)?;
    Ok(corpus.taxonomy().level_tags(level).into_iter().map(String::from).collect())
}

/// Indices into [`level_basis`] of the level-`level` tags of manuscript
/// `m`: its primary tag plus the level-`level` ancestors of any extra tags
/// at that level or deeper.
fn tag_indices(corpus: &Corpus, basis: &[String], m: usize, level: usize) -> Vec<usize> {
    let tree = corpus.taxonomy();
    let mut out = Vec::new();
    let mut push = |t: &str| {
        if let Ok(k) = basis.binary_search_by(|b| b.as_str().cmp(t)) {
            out.push(k);
        }
    };
    push(corpus.tag_at(m, level));
    for t in &corpus.manuscript(m).extra_tags {
        if let Some(a) = tree.ancestor_at(t, level) {
            push(a);
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// 0/1 indicator over [`level_basis`].
pub fn manuscript_vector(corpus: &Corpus, m: usize, level: usize) -> Result<Vec<f64>> {
    if m >= corpus.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: corpus.n_manuscripts(),
        });
    }
    let basis = level_basis(corpus, level)?;
    let mut v = vec![0.0; basis.len()];
    for k in tag_indices(corpus, &basis, m, level) {
        v[k] = 1.0;
    }
    Ok(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum WeightBasis {
    Capital,
    Shares,
    Binary,
}

/// Weighted average of the member manuscripts' vectors. Each holding
/// weighs `s * AC_m`, `s`, or 1 by basis. All-zero weights give the zero
/// vector.
pub fn portfolio_vector(a: &Analysis, pf: &Portfolio, level: usize, basis: WeightBasis) -> Result<Vec<f64>> {
    let c = a.corpus();
    let tags = level_basis(c, level)?;
    let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
    for h in &pf.holdings {
        let w = match basis {
            WeightBasis::Capital => h.share * a.capital()[h.manuscript],
            WeightBasis::Shares => h.share,
            WeightBasis::Binary => 1.0,
        };
        *weights.entry(h.manuscript).or_insert(0.0) += w;
    }
    let total: f64 = weights.values().sum();
    let mut v = vec![0.0; tags.len()];
    if total > 0.0 {
        for (&m, &w) in &weights {
            for k in tag_indices(c, &tags, m, level) {
                v[k] += w / total;
            }
        }
    }
    Ok(v)
}

/// Cosine of two nonnegative vectors; zero when either is zero.
pub fn cosine_similarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (na * nb)).clamp(0.0, 1.0))
}

/// Tag cosine similarity between all manuscript pairs at `level`, sparse.
pub fn relevancy_matrix(corpus: &Corpus, level: usize) -> Result<Sparse> {
    let basis = level_basis(corpus, level)?;
    let n = corpus.n_manuscripts();
    let mut rows = Vec::new();
    for m in 0..n {
        let idx = tag_indices(corpus, &basis, m, level);
        let w = 1.0 / (idx.len() as f64).sqrt();
        rows.extend(idx.into_iter().map(|k| (m, k, w)));
    }
    let v = sparse::from_triplets(n, basis.len(), rows);
    let g = sparse::product(&v, &sparse::transpose(&v))?;
    // unit-norm rows; clamp rounding so the diagonal is exactly one
    Ok(sparse::map_entries(&g, |r, c, x| if r == c { 1.0 } else { x.min(1.0) }))
}

/// Cosine similarity of rows `i` and `j` of `W`.
pub fn cocitation_relevance(w: &Sparse, i: usize, j: usize) -> Result<f64> {
    for m in [i, j] {
        if m >= w.rows() {
            return Err(Error::IndexOutOfRange { index: m, size: w.rows() });
        }
    }
    let row = |m: usize| -> Vec<f64> {
        let mut v = vec![0.0; w.cols()];
        for (c, &x) in w.outer_view(m).expect("row in range").iter() {
            v[c] = x;
        }
        v
    };
    cosine_similarity(&row(i), &row(j))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuggestionStatus {
    Suggested,
    Assigned,
}

/// Per-tag confidences for a manuscript, from its references.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TagSuggestion {
    pub manuscript: usize,
    pub level: usize,
    /// Only tags with positive confidence, sorted by tag.
    pub confidences: Vec<(String, f64)>,
    pub status: SuggestionStatus,
}

impl TagSuggestion {
    pub fn best(&self) -> Option<(&str, f64)> {
        self.confidences
            .iter()
            .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
            .map(|(t, c)| (t.as_str(), *c))
    }

    /// Mark as assigned when the best confidence reaches `threshold`.
    pub fn auto_assign(mut self, threshold: f64) -> Self {
        if self.best().is_some_and(|(_, c)| c >= threshold) {
            self.status = SuggestionStatus::Assigned;
        }
        self
    }
}

/// Average of the references' tag vectors, weighted by `m`'s citation
/// weights in column `m` of `W`.
pub fn infer_tags(corpus: &Corpus, w: &Sparse, m: usize, level: usize) -> Result<TagSuggestion> {
    if m >= corpus.n_manuscripts() || w.cols() != corpus.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: corpus.n_manuscripts(),
        });
    }
    let basis = level_basis(corpus, level)?;
    let col: Vec<(usize, f64)> = corpus
        .references_of(m)
        .iter()
        .map(|&x| (x, sparse::get(w, x, m)))
        .filter(|&(_, v)| v > 0.0)
        .collect();
    let total: f64 = col.iter().map(|(_, v)| v).sum();
    if col.is_empty() || !(total > 0.0) {
        return Err(Error::NoTaggedReferences(corpus.manuscript(m).id.clone()));
    }
    let mut conf = vec![0.0; basis.len()];
    for (x, v) in col {
        for k in tag_indices(corpus, &basis, x, level) {
            conf[k] += v / total;
        }
    }
    Ok(TagSuggestion {
        manuscript: m,
        level,
        confidences: basis
            .into_iter()
            .zip(conf)
            .filter(|(_, c)| *c > 0.0)
            .map(|(t, c)| (t, c.min(1.0)))
            .collect(),
        status: SuggestionStatus::Suggested,
    })
}

/// Manuscripts most similar to `m`, by tags at `level` or by co-citation,
/// highest first, ties by index.
pub fn most_similar(a: &Analysis, m: usize, by: SimilarityBy, top: usize) -> Result<Vec<(usize, f64)>> {
    let c = a.corpus();
    if m >= c.n_manuscripts() {
        return Err(Error::IndexOutOfRange {
            index: m,
            size: c.n_manuscripts(),
        });
    }
    let mut scored: Vec<(usize, f64)> = match by {
        SimilarityBy::Tags(level) => {
            let g = relevancy_matrix(c, level)?;
            g.outer_view(m).expect("row").iter().map(|(j, &v)| (j, v)).collect()
        }
        SimilarityBy::Cocitation => {
            let w = a.references();
            let co = sparse::product(w, &sparse::transpose(w))?;
            let norms: Vec<f64> = (0..w.rows()).map(|i| sparse::get(&co, i, i).sqrt()).collect();
            co.outer_view(m)
                .expect("row")
                .iter()
                .filter(|(j, _)| norms[*j] > 0.0 && norms[m] > 0.0)
                .map(|(j, &v)| (j, (v / (norms[m] * norms[j])).clamp(0.0, 1.0)))
                .collect()
        }
    };
    scored.retain(|&(j, v)| j != m && v > 0.0);
    scored.sort_by(|x, y| y.1.total_cmp(&x.1).then(x.0.cmp(&y.0)));
    scored.truncate(top);
    Ok(scored)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimilarityBy {
    Tags(usize),
    Cocitation,
}
