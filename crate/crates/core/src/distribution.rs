//! Author-share concentration and population pyramids.

use serde::Serialize;

use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::portfolio::Portfolio;

/// Offset added before taking `log10` of capital.
pub const LOG_EPSILON: f64 = 1e-9;

/// `sum_a s_a^2` over the author shares of manuscript `m`, as recorded.
pub fn manuscript_author_hhi(corpus: &Corpus, m: usize) -> f64 {
    corpus.authors_of(m).iter().map(|(_, s)| s * s).sum()
}

pub enum Scope<'a> {
    Manuscript(usize),
    /// Manuscripts whose primary path contains the tag.
    Field(&'a str),
    Portfolio(&'a Portfolio),
}

/// Author HHI of a manuscript, or its mean over the scope's manuscripts.
pub fn author_hhi(corpus: &Corpus, scope: &Scope<'_>) -> Result<f64> {
    let ms = match scope {
        Scope::Manuscript(m) => {
            if *m >= corpus.n_manuscripts() {
                return Err(Error::IndexOutOfRange {
                    index: *m,
                    size: corpus.n_manuscripts(),
                });
            }
            vec![*m]
        }
        Scope::Field(tag) => corpus.in_field(tag),
        Scope::Portfolio(pf) => pf.manuscripts(),
    };
    if ms.is_empty() {
        return Err(Error::EmptyScope);
    }
    Ok(ms.iter().map(|&m| manuscript_author_hhi(corpus, m)).sum::<f64>() / ms.len() as f64)
}

/// `|HHI_a - HHI_b|`.
pub fn hhid(corpus: &Corpus, a: &Scope<'_>, b: &Scope<'_>) -> Result<f64> {
    Ok((author_hhi(corpus, a)? - author_hhi(corpus, b)?).abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bin {
    pub low: f64,
    pub high: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pyramid {
    /// Equal-width bins over `log10(AC + eps)` of positive values.
    pub bins: Vec<Bin>,
    /// Values that are not positive.
    pub zero: usize,
}

impl Pyramid {
    pub fn total(&self) -> usize {
        self.zero + self.bins.iter().map(|b| b.count).sum::<usize>()
    }
}

/// Histogram of `log10(AC + eps)`. When all positive values coincide the
/// single occupied bin is one unit wide around them.
pub fn population_pyramid(capital: &[f64], bins: usize) -> Result<Pyramid> {
    if bins == 0 {
        return Err(Error::InvalidArgument("bins must be at least 1".into()));
    }
    let logs: Vec<f64> = capital
        .iter()
        .filter(|&&v| v > 0.0)
        .map(|v| (v + LOG_EPSILON).log10())
        .collect();
    let zero = capital.len() - logs.len();
    if logs.is_empty() {
        return Ok(Pyramid { bins: Vec::new(), zero });
    }
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (lo, hi) = if hi > lo { (lo, hi) } else { (lo - 0.5, lo + 0.5) };
    let width = (hi - lo) / bins as f64;
    let mut out: Vec<Bin> = (0..bins)
        .map(|k| Bin {
            low: lo + k as f64 * width,
            high: if k + 1 == bins { hi } else { lo + (k + 1) as f64 * width },
            count: 0,
        })
        .collect();
    for x in logs {
        let k = (((x - lo) / width) as usize).min(bins - 1);
        out[k].count += 1;
    }
    Ok(Pyramid { bins: out, zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::fixture;
    use approx::assert_abs_diff_eq;

    #[test]
    fn fixture_hhi() {
        let c = fixture::corpus();
        assert_abs_diff_eq!(author_hhi(&c, &Scope::Manuscript(0)).unwrap(), 0.58, epsilon = 1e-12);
        assert_abs_diff_eq!(author_hhi(&c, &Scope::Manuscript(2)).unwrap(), 0.81, epsilon = 1e-12);
        let field = author_hhi(&c, &Scope::Field("T1")).unwrap();
        assert_abs_diff_eq!(field, (0.58 + 0.52 + 0.81) / 3.0, epsilon = 1e-12);
        let d = hhid(&c, &Scope::Manuscript(0), &Scope::Field("T1")).unwrap();
        assert_abs_diff_eq!(d, 0.0567, epsilon = 1e-4);
        assert!(matches!(author_hhi(&c, &Scope::Field("none")), Err(Error::EmptyScope)));
        assert!(matches!(
            author_hhi(&c, &Scope::Portfolio(&Portfolio::default())),
            Err(Error::EmptyScope)
        ));
    }

    #[test]
    fn pyramids() {
        let p = population_pyramid(&[0.0, 0.0], 4).unwrap();
        assert_eq!((p.zero, p.total()), (2, 2));
        let p = population_pyramid(&[1.05, 0.75, 0.2], 3).unwrap();
        assert_eq!(p.zero, 0);
        assert_eq!(p.total(), 3);
        assert_eq!(p.bins.len(), 3);
        assert_eq!(p.bins[0].count, 1);
        assert_eq!(p.bins[2].count, 2);
        let flat = population_pyramid(&[2.0, 2.0], 2).unwrap();
        assert_eq!(flat.total(), 2);
        assert!(population_pyramid(&[1.0], 0).is_err());
    }
}
