//! Deterministic synthetic corpora.
//!
//! Citations follow preferential attachment on `citations + 1`, within the
//! citing manuscript's field most of the time. Quality-control shares are
//! only created when [`transaction_feasible`] holds for both the authors and
//! the provider.

use std::collections::BTreeSet;
use std::path::Path;

use chrono::{Duration, NaiveDate};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};
use serde::{Deserialize, Serialize};

use crate::corpus::{
    write_corpus_dir, Collection, Contributor, Corpus, CorpusParts, FundingShare, FundingSource, Manifest,
    Manuscript, PrimaryTags, Region, Role, ShareAssignment, TaxonomyNode, Transaction, TAG_PEER_REVIEWED,
};
use crate::error::{Error, Result};
use crate::market::{transaction_feasible, Feasibility};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShareProfile {
    /// Dirichlet with concentrations `k, k-1, ..., 1`, sorted descending.
    Descending,
    Uniform,
    /// The last author holds half, the rest split the remainder.
    SupervisorHeavy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CitationModel {
    PreferentialAttachment,
    Uniform,
}

/// How yearly publication volume evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldProfile {
    Stagnant,
    Growing,
    Shrinking,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthParams {
    pub manuscripts: usize,
    pub contributors: usize,
    /// Number of d4 fields.
    pub fields: usize,
    pub years: u32,
    pub start_year: i32,
    pub share_profile: ShareProfile,
    pub citation_model: CitationModel,
    pub field_profile: FieldProfile,
    /// Probability that a manuscript seeks peer review. Replication is
    /// sought at half this rate.
    pub qc_rate: f64,
    pub mean_references: f64,
    pub mean_authors: f64,
    pub max_authors: usize,
    pub regions: usize,
    pub retraction_rate: f64,
    pub seed: u64,
}

impl Default for SynthParams {
    fn default() -> Self {
        SynthParams {
            manuscripts: 200,
            contributors: 60,
            fields: 6,
            years: 8,
            start_year: 2010,
            share_profile: ShareProfile::Descending,
            citation_model: CitationModel::PreferentialAttachment,
            field_profile: FieldProfile::Stagnant,
            qc_rate: 0.5,
            mean_references: 6.0,
            mean_authors: 3.0,
            max_authors: 8,
            regions: 4,
            retraction_rate: 0.01,
            seed: 1,
        }
    }
}

impl SynthParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(m.to_string()));
        if self.manuscripts > 0 && self.contributors < 3 {
            return bad("need at least 3 contributors");
        }
        if self.fields == 0 || self.years == 0 || self.max_authors == 0 || self.regions == 0 {
            return bad("fields, years, max_authors and regions must be positive");
        }
        for (name, p) in [("qc_rate", self.qc_rate), ("retraction_rate", self.retraction_rate)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!("{name} must lie in [0, 1]")));
            }
        }
        if !(self.mean_references >= 0.0 && self.mean_references.is_finite()) {
            return bad("mean_references must be a nonnegative number");
        }
        if !(self.mean_authors >= 1.0 && self.mean_authors.is_finite()) {
            return bad("mean_authors must be at least 1");
        }
        Ok(())
    }
}

/// A generated corpus with its side tables.
#[derive(Debug, Clone)]
pub struct SynthOutput {
    pub corpus: Corpus,
    pub regions: Vec<Region>,
    pub collections: Vec<Collection>,
    pub funding: Vec<FundingSource>,
}

/// Fenwick tree over sampling weights.
struct Weights {
    tree: Vec<f64>,
    raw: Vec<f64>,
}

impl Weights {
    fn new(n: usize) -> Self {
        Weights {
            tree: vec![0.0; n + 1],
            raw: vec![0.0; n],
        }
    }

    fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.raw[i];
        self.raw[i] = w;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    fn total(&self) -> f64 {
        let mut k = self.raw.len();
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Smallest index whose prefix sum exceeds `u`.
    fn find(&self, mut u: f64) -> usize {
        let mut pos = 0;
        let mut step = self.tree.len().next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next < self.tree.len() && self.tree[next] <= u {
                pos = next;
                u -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(self.raw.len() - 1)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> Option<usize> {
        let total = self.total();
        if !(total > 1e-12) {
            return None;
        }
        let i = self.find(rng.random::<f64>() * total);
        (self.raw[i] > 0.0).then_some(i)
    }
}

fn tag_ids(fields: usize) -> Vec<[String; 4]> {
    (0..fields)
        .map(|f| {
            let d3 = f / 2;
            let d2 = d3 / 2;
            let d1 = d2 / 2;
            [format!("D1-{d1}"), format!("D2-{d2}"), format!("D3-{d3}"), format!("T-{f}")]
        })
        .collect()
}

fn taxonomy(paths: &[[String; 4]]) -> Vec<TaxonomyNode> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for p in paths {
        for level in 0..4 {
            if seen.insert(p[level].clone()) {
                out.push(TaxonomyNode {
                    id: p[level].clone(),
                    level: level as u8 + 1,
                    parent: (level > 0).then(|| p[level - 1].clone()),
                    label: None,
                });
            }
        }
    }
    out
}

fn author_shares(profile: ShareProfile, k: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let dirichlet = |alphas: &[f64], rng: &mut ChaCha8Rng| {
        let g: Vec<f64> = alphas
            .iter()
            .map(|&a| Gamma::new(a, 1.0).expect("positive shape").sample(rng).max(1e-6))
            .collect();
        let t: f64 = g.iter().sum();
        g.into_iter().map(|x| x / t).collect::<Vec<f64>>()
    };
    match (profile, k) {
        (_, 1) => vec![1.0],
        (ShareProfile::Uniform, _) => vec![1.0 / k as f64; k],
        (ShareProfile::Descending, _) => {
            let alphas: Vec<f64> = (0..k).map(|j| (k - j) as f64).collect();
            let mut s = dirichlet(&alphas, rng);
            s.sort_by(|a, b| b.total_cmp(a));
            s
        }
        (ShareProfile::SupervisorHeavy, _) => {
            let mut s: Vec<f64> = dirichlet(&vec![1.0; k - 1], rng).into_iter().map(|x| x * 0.5).collect();
            s.push(0.5);
            s
        }
    }
}

fn year_weights(profile: FieldProfile, years: u32) -> Vec<f64> {
    (0..years)
        .map(|y| match profile {
            FieldProfile::Stagnant => 1.0,
            FieldProfile::Growing => 1.35f64.powi(y as i32),
            FieldProfile::Shrinking => 1.35f64.powi((years - 1 - y) as i32),
        })
        .collect()
}

fn pick_weighted(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut u = rng.random::<f64>() * total;
    for (i, w) in weights.iter().enumerate() {
        if u < *w {
            return i;
        }
        u -= w;
    }
    weights.len() - 1
}

/// A quality-control offer accepted by both sides.
struct Offer {
    price: f64,
    days: f64,
}

fn negotiate(rng: &mut ChaCha8Rng, price: (f64, f64), lift: (f64, f64), t_provider: (f64, f64), author_share: f64, t_author: f64, belief: f64) -> Option<Offer> {
    let s = rng.random_range(price.0..price.1);
    let l = rng.random_range(lift.0..lift.1);
    let t_p = rng.random_range(t_provider.0..t_provider.1);
    let author = Feasibility::Author {
        expected_with: belief * (1.0 + l),
        expected_without: belief,
        share_with: author_share - s,
        share_without: author_share,
    };
    let provider = Feasibility::Provider {
        t_provider: t_p,
        t_author,
        share: s,
    };
    (transaction_feasible(&author) && transaction_feasible(&provider)).then(|| Offer {
        price: s,
        days: (t_p * 365.25).round().max(1.0),
    })
}

pub fn generate(params: &SynthParams) -> Result<SynthOutput> {
    params.validate()?;
    let p = params;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let paths = tag_ids(p.fields);

    let n_inst = (p.contributors / 10).max(1);
    let n_funds = (p.contributors / 20).max(1);
    let regions: Vec<Region> = (0..p.regions)
        .map(|r| {
            let population = rng.random_range(1.0e6..5.0e8f64).round();
            let gdp = (population * rng.random_range(1.0e3..6.0e4)).round();
            let ppp = (gdp * rng.random_range(0.8..1.5)).round();
            Region {
                region_id: format!("R{r}"),
                population,
                gdp: Some(gdp),
                ppp: Some(ppp),
            }
        })
        .collect();
    let funding: Vec<FundingSource> = (0..n_funds)
        .map(|f| FundingSource {
            source_id: format!("F{f:03}"),
            amount: rng.random_range(1.0e5..1.0e7f64).round(),
        })
        .collect();

    let width = p.contributors.max(1).to_string().len().max(4);
    let mut home_field = Vec::with_capacity(p.contributors);
    let mut contributors = Vec::with_capacity(p.contributors);
    for i in 0..p.contributors {
        let inst = rng.random_range(0..n_inst);
        let mut funds = Vec::new();
        if rng.random::<f64>() < 0.8 {
            funds.push(format!("F{:03}", rng.random_range(0..n_funds)));
            if n_funds > 1 && rng.random::<f64>() < 0.3 {
                let f = format!("F{:03}", rng.random_range(0..n_funds));
                if !funds.contains(&f) {
                    funds.push(f);
                }
            }
            funds.sort();
        }
        home_field.push(rng.random_range(0..p.fields));
        contributors.push(Contributor {
            id: format!("c{i:0width$}"),
            region: format!("R{}", inst % p.regions),
            institutions: [format!("I{inst:03}")].into(),
            funding: funds,
        });
    }

    // publication dates, sorted; ids follow that order
    let yw = year_weights(p.field_profile, p.years);
    let mut dates: Vec<NaiveDate> = (0..p.manuscripts)
        .map(|_| {
            let y = p.start_year + pick_weighted(&yw, &mut rng) as i32;
            let start = NaiveDate::from_ymd_opt(y, 1, 1).expect("valid year");
            start + Duration::days(rng.random_range(0..365))
        })
        .collect();
    dates.sort();

    let n = p.manuscripts;
    let mwidth = n.max(1).to_string().len().max(4);
    let mut global = Weights::new(n);
    let mut by_field: Vec<Weights> = (0..p.fields).map(|_| Weights::new(n)).collect();
    let mut cites = vec![0usize; n];
    let mut field_of = vec![0usize; n];
    let mut released = 0;
    let refs_dist = Poisson::new(p.mean_references.max(1e-9)).expect("positive mean");
    let authors_dist = Poisson::new((p.mean_authors - 1.0).max(1e-9)).expect("positive mean");

    let mut manuscripts = Vec::with_capacity(n);
    let mut shares = Vec::new();
    let mut transactions = Vec::new();
    let id = |i: usize| format!("m{i:0mwidth$}");
    let weight = |c: usize| match p.citation_model {
        CitationModel::PreferentialAttachment => c as f64 + 1.0,
        CitationModel::Uniform => 1.0,
    };

    for i in 0..n {
        while released < i && dates[released] < dates[i] {
            let w = weight(0);
            global.set(released, w);
            by_field[field_of[released]].set(released, w);
            released += 1;
        }

        // authors from the contributors who have joined so far
        let pool = ((p.contributors * (i + 1)).div_ceil(n.max(1))).clamp(3.min(p.contributors), p.contributors);
        let k = (1 + authors_dist.sample(&mut rng) as usize).min(p.max_authors).min(pool);
        let mut members: Vec<usize> = (0..pool).collect();
        members.shuffle(&mut rng);
        let authors: Vec<usize> = members[..k].to_vec();
        let field = if rng.random::<f64>() < 0.8 {
            home_field[authors[0]]
        } else {
            rng.random_range(0..p.fields)
        };
        field_of[i] = field;

        // references, without replacement
        let want = (refs_dist.sample(&mut rng) as usize).min(released);
        let mut chosen: Vec<usize> = Vec::with_capacity(want);
        let mut attempts = 0;
        while chosen.len() < want && attempts < 4 * want + 8 {
            attempts += 1;
            let from_field = rng.random::<f64>() < 0.7;
            let pick = if from_field {
                by_field[field].sample(&mut rng).or_else(|| global.sample(&mut rng))
            } else {
                global.sample(&mut rng)
            };
            let Some(j) = pick else { break };
            chosen.push(j);
            global.set(j, 0.0);
            by_field[field_of[j]].set(j, 0.0);
        }
        for &j in &chosen {
            cites[j] += 1;
            let w = weight(cites[j]);
            global.set(j, w);
            by_field[field_of[j]].set(j, w);
        }
        chosen.sort_unstable();

        let t_author = rng.random_range(0.5..3.0f64);
        let belief = 1.0 + cites[..released].iter().sum::<usize>() as f64 / released.max(1) as f64;
        let mut author_total = 1.0;
        let mut qc: Vec<(usize, Role, Offer)> = Vec::new();
        let outsiders = |taken: &[usize], rng: &mut ChaCha8Rng| -> Option<usize> {
            (0..10).map(|_| rng.random_range(0..p.contributors)).find(|c| !taken.contains(c))
        };
        if rng.random::<f64>() < p.qc_rate {
            if let Some(rev) = outsiders(&authors, &mut rng) {
                if let Some(o) = negotiate(&mut rng, (0.02, 0.15), (0.0, 0.5), (0.01, 0.25), author_total, t_author, belief) {
                    author_total -= o.price;
                    qc.push((rev, Role::PeerReviewer, o));
                }
            }
        }
        if rng.random::<f64>() < p.qc_rate / 2.0 {
            let mut taken = authors.clone();
            taken.extend(qc.iter().map(|q| q.0));
            if let Some(rep) = outsiders(&taken, &mut rng) {
                if let Some(o) = negotiate(&mut rng, (0.05, 0.3), (0.0, 1.0), (0.1, 1.0), author_total, t_author, belief) {
                    author_total -= o.price;
                    qc.push((rep, Role::Replicator, o));
                }
            }
        }

        let m_id = id(i);
        let published = dates[i];
        for (&a, s) in authors.iter().zip(author_shares(p.share_profile, k, &mut rng)) {
            shares.push(ShareAssignment {
                manuscript: m_id.clone(),
                contributor: contributors[a].id.clone(),
                role: Role::Author,
                share: s * author_total,
            });
        }
        for (who, role, o) in &qc {
            shares.push(ShareAssignment {
                manuscript: m_id.clone(),
                contributor: contributors[*who].id.clone(),
                role: *role,
                share: o.price,
            });
            transactions.push(Transaction {
                manuscript: m_id.clone(),
                provider: contributors[*who].id.clone(),
                role: *role,
                shares_paid: o.price,
                field: paths[field].to_vec(),
                executed_at: published - Duration::days(o.days as i64),
                qc_duration: Some(o.days),
            });
        }

        let mut extra_tags = BTreeSet::new();
        if p.fields > 1 && rng.random::<f64>() < 0.1 {
            let other = (field + rng.random_range(1..p.fields)) % p.fields;
            extra_tags.insert(paths[other][3].clone());
        }
        let mut funding_shares = Vec::new();
        if rng.random::<f64>() < 0.5 {
            let a = rng.random_range(0..n_funds);
            let b = rng.random_range(0..n_funds);
            if a != b && rng.random::<f64>() < 0.4 {
                let f = (rng.random_range(0.2..0.8f64) * 100.0).round() / 100.0;
                let (lo, hi) = (a.min(b), a.max(b));
                funding_shares.push(FundingShare {
                    source: funding[lo].source_id.clone(),
                    fraction: Some(f),
                });
                funding_shares.push(FundingShare {
                    source: funding[hi].source_id.clone(),
                    fraction: Some(((1.0 - f) * 100.0).round() / 100.0),
                });
            } else {
                funding_shares.push(FundingShare {
                    source: funding[a].source_id.clone(),
                    fraction: Some(1.0),
                });
            }
        }
        let institutions = authors
            .iter()
            .flat_map(|&a| contributors[a].institutions.iter().cloned())
            .collect();
        manuscripts.push(Manuscript {
            id: m_id,
            title: None,
            primary_tags: PrimaryTags {
                d1: Some(paths[field][0].clone()),
                d2: Some(paths[field][1].clone()),
                d3: Some(paths[field][2].clone()),
                d4: paths[field][3].clone(),
            },
            extra_tags,
            references: chosen.iter().map(|&j| id(j)).collect(),
            published_at: published,
            work_started_at: Some(published - Duration::days((t_author * 365.25).round() as i64)),
            institutions,
            region: contributors[authors[0]].region.clone(),
            funding: funding_shares,
            retracted: rng.random::<f64>() < p.retraction_rate,
            version_parent: None,
        });
    }

    let d2: BTreeSet<&String> = paths.iter().map(|p| &p[1]).collect();
    let mut collections: Vec<Collection> = d2
        .into_iter()
        .map(|t| Collection {
            name: format!("journal-{t}"),
            tags: vec![t.clone()],
            subscribers: Some(rng.random_range(10..5000)),
        })
        .collect();
    collections.push(Collection {
        name: "reviewed".into(),
        tags: vec![TAG_PEER_REVIEWED.into()],
        subscribers: Some(rng.random_range(10..5000)),
    });

    let corpus = Corpus::new(CorpusParts {
        manuscripts,
        contributors,
        shares,
        transactions,
        taxonomy: taxonomy(&paths),
    })?;
    Ok(SynthOutput {
        corpus,
        regions,
        collections,
        funding,
    })
}

/// Write the corpus tables, the side tables and a manifest naming all of
/// them into `dir`.
pub fn write_dataset(out: &SynthOutput, dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    let base = write_corpus_dir(&out.corpus, dir)?;
    let full = Manifest {
        regions: Manifest::default().regions,
        collections: Manifest::default().collections,
        funding: Manifest::default().funding,
        ..base
    };
    crate::corpus::write_json(&dir.join(full.regions.as_ref().expect("set")), &out.regions)?;
    crate::corpus::write_json(&dir.join(full.collections.as_ref().expect("set")), &out.collections)?;
    crate::corpus::write_json(&dir.join(full.funding.as_ref().expect("set")), &out.funding)?;
    crate::corpus::write_json(&dir.join(crate::corpus::MANIFEST), &full)?;
    Ok(full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::load_dataset;

    fn small(seed: u64) -> SynthParams {
        SynthParams {
            manuscripts: 120,
            contributors: 40,
            seed,
            ..Default::default()
        }
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        write_dataset(&generate(&small(1)).unwrap(), a.path()).unwrap();
        write_dataset(&generate(&small(1)).unwrap(), b.path()).unwrap();
        for f in ["corpus.json", "manuscripts.jsonl", "shares.jsonl", "transactions.jsonl", "regions.json"] {
            assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
        }
        let back = load_dataset(a.path()).unwrap();
        assert_eq!(back.corpus.n_manuscripts(), 120);
        assert_eq!(back.regions.len(), 4);
        assert!(!back.collections.is_empty());
    }

    #[test]
    fn no_qc_without_rate() {
        let out = generate(&SynthParams { qc_rate: 0.0, ..small(3) }).unwrap();
        assert!(out.corpus.share_rows().all(|(_, _, r, _)| r == Role::Author));
        assert!(out.corpus.transactions().is_empty());
    }

    #[test]
    fn qc_transactions_are_feasible_shares() {
        let out = generate(&SynthParams { qc_rate: 1.0, ..small(4) }).unwrap();
        assert!(!out.corpus.transactions().is_empty());
        for m in 0..out.corpus.n_manuscripts() {
            let total: f64 = out.corpus.shares_of(m).map(|s| s.2).sum();
            assert!((total - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn profiles_and_models() {
        for profile in [ShareProfile::Descending, ShareProfile::Uniform, ShareProfile::SupervisorHeavy] {
            for model in [CitationModel::PreferentialAttachment, CitationModel::Uniform] {
                for fp in [FieldProfile::Stagnant, FieldProfile::Growing, FieldProfile::Shrinking] {
                    let p = SynthParams {
                        share_profile: profile,
                        citation_model: model,
                        field_profile: fp,
                        ..small(9)
                    };
                    generate(&p).unwrap();
                }
            }
        }
    }

    #[test]
    fn bad_params() {
        assert!(generate(&SynthParams { qc_rate: 2.0, ..small(1) }).is_err());
        assert!(generate(&SynthParams { contributors: 1, ..small(1) }).is_err());
        let empty = generate(&SynthParams { manuscripts: 0, ..small(1) }).unwrap();
        assert_eq!(empty.corpus.n_manuscripts(), 0);
    }

    #[test]
    fn fenwick_sampling() {
        let mut w = Weights::new(5);
        w.set(3, 2.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!((0..50).all(|_| w.sample(&mut rng) == Some(3)));
        w.set(3, 0.0);
        assert_eq!(w.sample(&mut rng), None);
        w.set(0, 1.0);
        w.set(4, 1.0);
        let hits: BTreeSet<usize> = (0..200).filter_map(|_| w.sample(&mut rng)).collect();
        assert_eq!(hits, [0, 4].into());
    }
}
