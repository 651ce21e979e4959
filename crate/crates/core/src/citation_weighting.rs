//! References matrices and the citation correction modifiers.
//!
//! Matrices are `|M| x |M|` with entry `(x, y)` nonzero when `m_y` cites
//! `m_x`. Rows are the cited side, columns the citing side.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::sparse::{self, Sparse};
use crate::time::years_between;

pub const MAX_IMWC_ITERATIONS: u32 = 4;

/// `(x, y) = 1` iff `m_y` cites `m_x`.
pub fn unweighted_matrix(corpus: &Corpus) -> Sparse {
    let n = corpus.n_manuscripts();
    sparse::from_triplets(
        n,
        n,
        (0..n).flat_map(|y| corpus.references_of(y).iter().map(move |&x| (x, y, 1.0))),
    )
}

/// `(x, y) = 1 / |refs(m_y)|` when `m_y` cites `m_x`.
pub fn base_weighted_matrix(corpus: &Corpus) -> Sparse {
    let n = corpus.n_manuscripts();
    sparse::from_triplets(
        n,
        n,
        (0..n).flat_map(|y| {
            let refs = corpus.references_of(y);
            let w = 1.0 / refs.len() as f64;
            refs.iter().map(move |&x| (x, y, w))
        }),
    )
}

/// Per-field normalization constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct FieldRates {
    /// d4 tag -> manuscripts per year per active contributor.
    pub rho: BTreeMap<String, f64>,
    /// d3 tag -> mean years from start of work to publication.
    pub t3: BTreeMap<String, f64>,
    /// Fields for which a rate could not be estimated.
    pub warnings: Vec<String>,
}

impl FieldRates {
    pub fn uniform(corpus: &Corpus, rho: f64, t3: f64) -> Self {
        let mut r = FieldRates::default();
        for i in 0..corpus.n_manuscripts() {
            r.rho.insert(corpus.tag_at(i, 4).to_string(), rho);
            r.t3.insert(corpus.tag_at(i, 3).to_string(), t3);
        }
        r
    }

    pub fn rho(&self, d4: &str) -> Result<f64> {
        self.rho
            .get(d4)
            .copied()
            .ok_or_else(|| Error::MissingData(format!("publication rate for field `{d4}`")))
    }

    pub fn t3(&self, d3: &str) -> Result<f64> {
        self.t3
            .get(d3)
            .copied()
            .ok_or_else(|| Error::MissingData(format!("time to publication for field `{d3}`")))
    }
}

/// Estimate publication rates per d4 field and durations per d3 field.
///
/// A contributor is active in a field in a year when they hold a share on a
/// manuscript of that field published that year. Fields lacking the data
/// for a rate are left out and named in `warnings`.
pub fn estimate_field_rates(corpus: &Corpus) -> FieldRates {
    let mut per_year: BTreeMap<&str, BTreeMap<i32, (usize, BTreeSet<usize>)>> = BTreeMap::new();
    let mut durations: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
    let mut d3_tags = BTreeSet::new();
    for (i, m) in corpus.manuscripts().iter().enumerate() {
        let year = crate::time::year_of(m.published_at);
        let slot = per_year.entry(corpus.tag_at(i, 4)).or_default().entry(year).or_default();
        slot.0 += 1;
        slot.1.extend(corpus.shares_of(i).map(|(p, _, _)| p));
        let d3 = corpus.tag_at(i, 3);
        d3_tags.insert(d3);
        if let Some(start) = m.work_started_at {
            durations.entry(d3).or_default().push(years_between(start, m.published_at));
        }
    }
    let mut rates = FieldRates::default();
    for (field, years) in per_year {
        let ratios: Vec<f64> = years
            .values()
            .filter(|(_, active)| !active.is_empty())
            .map(|(n, active)| *n as f64 / active.len() as f64)
            .collect();
        match crate::stats::mean(&ratios) {
            Some(r) if r > 0.0 => {
                rates.rho.insert(field.to_string(), r);
            }
            _ => rates.warnings.push(format!("no publication rate for `{field}`")),
        }
    }
    for d3 in d3_tags {
        match durations.get(d3).and_then(|d| crate::stats::mean(d)) {
            Some(t) if t > 0.0 => {
                rates.t3.insert(d3.to_string(), t);
            }
            _ => rates.warnings.push(format!("no time to publication for `{d3}`")),
        }
    }
    rates
}

/// Scale column `y` by `1 / rho(d4(m_y))`.
pub fn apply_publication_rate(w: &Sparse, rates: &FieldRates, corpus: &Corpus) -> Result<Sparse> {
    check_side(w, corpus)?;
    let mut scale = vec![1.0; w.cols()];
    for (y, s) in scale.iter_mut().enumerate() {
        if !corpus.references_of(y).is_empty() {
            *s = 1.0 / rates.rho(corpus.tag_at(y, 4))?;
        }
    }
    Ok(sparse::scale_cols(w, &scale))
}

/// Dot product of the raw author-share vectors of two manuscripts over the
/// union of their authors.
pub fn author_similarity(corpus: &Corpus, cited: usize, citing: usize) -> f64 {
    let a: HashMap<usize, f64> = corpus.authors_of(cited).into_iter().collect();
    corpus
        .authors_of(citing)
        .into_iter()
        .map(|(p, s)| s * a.get(&p).copied().unwrap_or(0.0))
        .sum()
}

/// Scale every citing edge by `1 - phi`.
pub fn apply_acsm(w: &Sparse, corpus: &Corpus) -> Result<Sparse> {
    check_side(w, corpus)?;
    Ok(sparse::map_entries(w, |x, y, v| {
        v * (1.0 - author_similarity(corpus, x, y)).max(0.0)
    }))
}

/// Scale row `x` by `t3(d3(m_x))`.
pub fn apply_tmwc(w: &Sparse, rates: &FieldRates, corpus: &Corpus) -> Result<Sparse> {
    check_side(w, corpus)?;
    let mut scale = vec![1.0; w.rows()];
    for (x, row) in w.outer_iterator().enumerate() {
        if row.nnz() > 0 {
            scale[x] = rates.t3(corpus.tag_at(x, 3))?;
        }
    }
    Ok(sparse::scale_rows(w, &scale))
}

/// Iterated modulation: `W_{k+1} = diag(log2(AC(W_k) + 1)) W`.
pub fn apply_imwc(w: &Sparse, iterations: u32) -> Result<Sparse> {
    if !(1..=MAX_IMWC_ITERATIONS).contains(&iterations) {
        return Err(Error::InvalidArgument(format!(
            "imwc iterations must be in 1..={MAX_IMWC_ITERATIONS}, got {iterations}"
        )));
    }
    Ok(imwc_iterates(w, iterations as usize).pop().expect("at least one iterate"))
}

/// All iterates `W_1 .. W_n` of the modulation, without the iteration cap.
pub fn imwc_iterates(w: &Sparse, n: usize) -> Vec<Sparse> {
    let mut out = Vec::with_capacity(n);
    let mut cur = w.clone();
    for _ in 0..n {
        let iota: Vec<f64> = sparse::row_sums(&cur).iter().map(|ac| (ac + 1.0).log2()).collect();
        cur = sparse::scale_rows(w, &iota);
        out.push(cur.clone());
    }
    out
}

fn check_side(w: &Sparse, corpus: &Corpus) -> Result<()> {
    let n = corpus.n_manuscripts();
    if w.rows() != n || w.cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: w.rows().max(w.cols()),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Base {
    Unweighted,
    InverseReferenceCount,
}

/// Where a field rate comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RateSource {
    Estimated,
    Uniform(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Modifier {
    PublicationRate(RateSource),
    /// Pairwise author-similarity discount.
    AuthorSimilarity,
    Tmwc(RateSource),
    Imwc(u32),
    /// Element-wise self-citation discount over the whole matrix.
    Acsm,
}

impl Modifier {
    fn kind(&self) -> &'static str {
        match self {
            Modifier::PublicationRate(_) => "pubrate",
            Modifier::AuthorSimilarity => "authorsim",
            Modifier::Tmwc(_) => "tmwc",
            Modifier::Imwc(_) => "imwc",
            Modifier::Acsm => "acsm",
        }
    }
}

/// Base weighting plus an ordered list of modifiers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightingPipeline {
    pub base: Base,
    pub modifiers: Vec<Modifier>,
}

impl Default for WeightingPipeline {
    fn default() -> Self {
        WeightingPipeline {
            base: Base::InverseReferenceCount,
            modifiers: Vec::new(),
        }
    }
}

impl WeightingPipeline {
    pub fn new(base: Base, modifiers: Vec<Modifier>) -> Result<Self> {
        let p = WeightingPipeline { base, modifiers };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for m in &self.modifiers {
            if !seen.insert(m.kind()) {
                return Err(Error::InvalidArgument(format!("modifier `{}` listed twice", m.kind())));
            }
            match *m {
                Modifier::Imwc(n) if !(1..=MAX_IMWC_ITERATIONS).contains(&n) => {
                    return Err(Error::InvalidArgument(format!(
                        "imwc iterations must be in 1..={MAX_IMWC_ITERATIONS}"
                    )))
                }
                Modifier::PublicationRate(RateSource::Uniform(v)) | Modifier::Tmwc(RateSource::Uniform(v))
                    if !(v > 0.0 && v.is_finite()) =>
                {
                    return Err(Error::InvalidArgument(format!("rate must be positive, got {v}")))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn needs_estimated_rates(&self) -> bool {
        self.modifiers.iter().any(|m| {
            matches!(
                m,
                Modifier::PublicationRate(RateSource::Estimated) | Modifier::Tmwc(RateSource::Estimated)
            )
        })
    }

    /// Run against `corpus`, estimating field rates when needed.
    pub fn run(&self, corpus: &Corpus) -> Result<WeightedReferences> {
        let rates = if self.needs_estimated_rates() {
            estimate_field_rates(corpus)
        } else {
            FieldRates::default()
        };
        self.run_with_rates(corpus, &rates)
    }

    /// Run with explicitly supplied rates for `Estimated` sources.
    pub fn run_with_rates(&self, corpus: &Corpus, rates: &FieldRates) -> Result<WeightedReferences> {
        self.validate()?;
        let mut w = match self.base {
            Base::Unweighted => unweighted_matrix(corpus),
            Base::InverseReferenceCount => base_weighted_matrix(corpus),
        };
        for m in &self.modifiers {
            w = match *m {
                Modifier::PublicationRate(src) => {
                    let r = resolve(src, rates, corpus);
                    apply_publication_rate(&w, &r, corpus)?
                }
                Modifier::Tmwc(src) => {
                    let r = resolve(src, rates, corpus);
                    apply_tmwc(&w, &r, corpus)?
                }
                Modifier::AuthorSimilarity | Modifier::Acsm => apply_acsm(&w, corpus)?,
                Modifier::Imwc(n) => apply_imwc(&w, n)?,
            };
        }
        Ok(WeightedReferences {
            matrix: w,
            pipeline: self.clone(),
        })
    }
}

fn resolve(src: RateSource, rates: &FieldRates, corpus: &Corpus) -> FieldRates {
    match src {
        RateSource::Estimated => rates.clone(),
        RateSource::Uniform(v) => FieldRates::uniform(corpus, v, v),
    }
}

impl fmt::Display for WeightingPipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.base {
            Base::Unweighted => "base=unweighted",
            Base::InverseReferenceCount => "base=inv_ref",
        })?;
        for m in &self.modifiers {
            match m {
                Modifier::PublicationRate(RateSource::Uniform(v)) => write!(f, ",pubrate:{v}")?,
                Modifier::Tmwc(RateSource::Uniform(v)) => write!(f, ",tmwc:{v}")?,
                Modifier::Imwc(n) => write!(f, ",imwc:{n}")?,
                other => write!(f, ",{}", other.kind())?,
            }
        }
        Ok(())
    }
}

impl FromStr for WeightingPipeline {
    type Err = Error;

    /// Parse `base=inv_ref,acsm,pubrate,imwc:4`. The base token is optional
    /// and defaults to `inv_ref`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |t: &str| Error::InvalidArgument(format!("unknown weighting token `{t}`"));
        let mut base = Base::InverseReferenceCount;
        let mut modifiers = Vec::new();
        for (i, tok) in s.split(',').map(str::trim).filter(|t| !t.is_empty()).enumerate() {
            if let Some(b) = tok.strip_prefix("base=") {
                if i != 0 {
                    return Err(Error::InvalidArgument("base must come first".into()));
                }
                base = match b {
                    "unweighted" => Base::Unweighted,
                    "inv_ref" => Base::InverseReferenceCount,
                    _ => return Err(bad(tok)),
                };
                continue;
            }
            let (name, arg) = match tok.split_once(':') {
                Some((n, a)) => (n, Some(a)),
                None => (tok, None),
            };
            let num = |a: &str| a.parse::<f64>().map_err(|_| bad(tok));
            let m = match (name, arg) {
                ("pubrate", None) => Modifier::PublicationRate(RateSource::Estimated),
                ("pubrate", Some(a)) => Modifier::PublicationRate(RateSource::Uniform(num(a)?)),
                ("tmwc", None) => Modifier::Tmwc(RateSource::Estimated),
                ("tmwc", Some(a)) => Modifier::Tmwc(RateSource::Uniform(num(a)?)),
                ("authorsim", None) => Modifier::AuthorSimilarity,
                ("acsm", None) => Modifier::Acsm,
                ("imwc", None) => Modifier::Imwc(MAX_IMWC_ITERATIONS),
                ("imwc", Some(a)) => Modifier::Imwc(a.parse().map_err(|_| bad(tok))?),
                _ => return Err(bad(tok)),
            };
            modifiers.push(m);
        }
        WeightingPipeline::new(base, modifiers)
    }
}

/// A references matrix with the pipeline that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedReferences {
    pub matrix: Sparse,
    pub pipeline: WeightingPipeline,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unweighted_row_sums() {
        let u = unweighted_matrix(&fixture::corpus());
        assert_eq!(sparse::row_sums(&u), vec![2.0, 1.0, 0.0]);
    }

    #[test]
    fn base_weights() {
        let w = base_weighted_matrix(&fixture::corpus());
        assert_eq!(sparse::get(&w, 0, 2), 0.5);
        assert_eq!(sparse::get(&w, 1, 2), 0.5);
        assert_eq!(sparse::get(&w, 0, 1), 1.0);
        assert_eq!(sparse::col_sums(&w), vec![0.0, 1.0, 1.0]);
    }

    #[test]
    fn rates_on_fixture() {
        let c = fixture::corpus();
        let r = estimate_field_rates(&c);
        // one manuscript per year with two active contributors each year
        assert_abs_diff_eq!(r.rho["T1"], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(r.t3["D3"], 1.0, epsilon = 0.01);
        let w = apply_publication_rate(&base_weighted_matrix(&c), &r, &c).unwrap();
        assert_abs_diff_eq!(sparse::get(&w, 0, 1), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn missing_durations() {
        let mut p = fixture::parts();
        for m in &mut p.manuscripts {
            m.work_started_at = None;
        }
        let c = Corpus::new(p).unwrap();
        let r = estimate_field_rates(&c);
        assert!(r.t3.is_empty());
        assert!(matches!(
            apply_tmwc(&base_weighted_matrix(&c), &r, &c),
            Err(Error::MissingData(_))
        ));
    }

    #[test]
    fn similarity_and_acsm() {
        let c = fixture::corpus();
        assert_abs_diff_eq!(author_similarity(&c, 0, 1), 0.18, epsilon = 1e-12);
        assert_abs_diff_eq!(author_similarity(&c, 1, 0), 0.18, epsilon = 1e-12);
        let w = apply_acsm(&base_weighted_matrix(&c), &c).unwrap();
        assert_abs_diff_eq!(sparse::get(&w, 0, 1), 0.82, epsilon = 1e-12);
    }

    #[test]
    fn tmwc_scales_rows() {
        let c = fixture::corpus();
        let mut r = FieldRates::uniform(&c, 1.0, 1.0);
        let w = base_weighted_matrix(&c);
        assert_eq!(apply_tmwc(&w, &r, &c).unwrap(), w);
        r.t3.insert("D3".into(), 2.0);
        let t = apply_tmwc(&w, &r, &c).unwrap();
        assert_eq!(sparse::get(&t, 0, 1), 2.0);
    }

    #[test]
    fn imwc_edges() {
        let z = sparse::zeros(3, 3);
        assert_eq!(apply_imwc(&z, 1).unwrap().nnz(), 0);
        let one = sparse::from_triplets(2, 2, [(0, 1, 1.0)]);
        assert_eq!(apply_imwc(&one, 1).unwrap(), one);
        assert!(apply_imwc(&one, 5).is_err());
        assert!(apply_imwc(&one, 0).is_err());
    }

    #[test]
    fn pipeline_round_trip() {
        let p: WeightingPipeline = "base=inv_ref,acsm,pubrate,imwc:4".parse().unwrap();
        assert_eq!(p.to_string(), "base=inv_ref,acsm,pubrate,imwc:4");
        let q: WeightingPipeline = p.to_string().parse().unwrap();
        assert_eq!(p, q);
        assert_eq!("pubrate:2".parse::<WeightingPipeline>().unwrap().to_string(), "base=inv_ref,pubrate:2");
        assert!("acsm,acsm".parse::<WeightingPipeline>().is_err());
        assert!("imwc:5".parse::<WeightingPipeline>().is_err());
        assert!("bogus".parse::<WeightingPipeline>().is_err());
    }

    #[test]
    fn pipeline_identity_and_commutation() {
        let c = fixture::corpus();
        let base = WeightingPipeline::default().run(&c).unwrap();
        assert_eq!(base.matrix, base_weighted_matrix(&c));
        let a = "base=inv_ref,acsm,pubrate:1".parse::<WeightingPipeline>().unwrap().run(&c).unwrap();
        let b = "base=inv_ref,pubrate:1,acsm".parse::<WeightingPipeline>().unwrap().run(&c).unwrap();
        for (x, y, v) in sparse::entries(&a.matrix) {
            assert_abs_diff_eq!(v, sparse::get(&b.matrix, x, y), epsilon = 1e-12);
        }
    }
}
