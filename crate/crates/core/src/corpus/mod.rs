//! Corpus data model, loading and validation.
//!
//! A [`Corpus`] is an immutable, validated snapshot. Manuscripts are kept in
//! temporal order (publication date, then id) and that order is the row and
//! column order of every manuscript-indexed matrix. Contributors are kept in
//! id order.

mod io;
mod model;
mod taxonomy;
mod validate;

use std::collections::{BTreeSet, HashMap};

use chrono::NaiveDate;

pub use io::{
    load_corpus, load_corpus_dir, load_dataset, write_corpus_dir, CorpusFiles, Dataset, Manifest,
    FORMAT_VERSION,
};
pub use model::{
    Contributor, FundingShare, Manuscript, PrimaryTags, Role, ShareAssignment, TaxonomyNode,
    Transaction,
};
pub use io::{Collection, FundingSource, Region};
pub(crate) use io::{write_json, MANIFEST};
pub use taxonomy::{inherit_tags, validate_taxonomy, TaxonomyTree, LEVELS};
pub use validate::{Rule, ValidationReport, Violation, SUM_TOLERANCE};

use crate::error::{Error, Result};

pub const TAG_PEER_REVIEWED: &str = "filter:peer_reviewed";
pub const TAG_REPLICATED: &str = "filter:replicated";
pub const TAG_RETRACTED: &str = "filter:retracted";

/// Raw corpus tables, before validation.
#[derive(Debug, Clone, Default)]
pub struct CorpusParts {
    pub manuscripts: Vec<Manuscript>,
    pub contributors: Vec<Contributor>,
    pub shares: Vec<ShareAssignment>,
    pub transactions: Vec<Transaction>,
    pub taxonomy: Vec<TaxonomyNode>,
}

#[derive(Debug, Clone)]
pub struct Corpus {
    manuscripts: Vec<Manuscript>,
    contributors: Vec<Contributor>,
    shares: Vec<ShareAssignment>,
    share_keys: Vec<(usize, usize)>,
    share_ranges: Vec<(usize, usize)>,
    transactions: Vec<Transaction>,
    taxonomy: TaxonomyTree,
    paths: Vec<[String; LEVELS]>,
    references: Vec<Vec<usize>>,
    m_index: HashMap<String, usize>,
    c_index: HashMap<String, usize>,
}

impl Corpus {
    /// Validate `parts` and build the indexed snapshot.
    pub fn new(parts: CorpusParts) -> Result<Corpus> {
        let report = validate::validate_parts(&parts);
        if !report.is_empty() {
            return Err(Error::Validation(report));
        }
        Ok(Corpus::build(parts))
    }

    fn build(parts: CorpusParts) -> Corpus {
        let CorpusParts {
            mut manuscripts,
            mut contributors,
            shares,
            mut transactions,
            taxonomy,
        } = parts;
        manuscripts.sort_by(|a, b| (a.published_at, &a.id).cmp(&(b.published_at, &b.id)));
        contributors.sort_by(|a, b| a.id.cmp(&b.id));
        let taxonomy = TaxonomyTree::from_nodes(taxonomy);

        let m_index: HashMap<String, usize> = manuscripts
            .iter()
            .enumerate()
            .map(|(i, m)| (m.id.clone(), i))
            .collect();
        let c_index: HashMap<String, usize> = contributors
            .iter()
            .enumerate()
            .map(|(i, c)| (c.id.clone(), i))
            .collect();

        let mut keyed: Vec<((usize, usize), ShareAssignment)> = shares
            .into_iter()
            .map(|s| ((m_index[&s.manuscript], c_index[&s.contributor]), s))
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let share_keys: Vec<(usize, usize)> = keyed.iter().map(|(k, _)| *k).collect();
        let shares: Vec<ShareAssignment> = keyed.into_iter().map(|(_, s)| s).collect();
        let mut share_ranges = vec![(0, 0); manuscripts.len()];
        let mut start = 0;
        while start < share_keys.len() {
            let m = share_keys[start].0;
            let mut end = start;
            while end < share_keys.len() && share_keys[end].0 == m {
                end += 1;
            }
            share_ranges[m] = (start, end);
            start = end;
        }

        transactions.sort_by(|a, b| {
            (a.executed_at, &a.manuscript, &a.provider, a.role)
                .cmp(&(b.executed_at, &b.manuscript, &b.provider, b.role))
        });

        let paths = manuscripts
            .iter()
            .map(|m| taxonomy.path(&m.primary_tags.d4).expect("validated primary tag"))
            .collect();
        let references = manuscripts
            .iter()
            .map(|m| {
                let mut r: Vec<usize> = m.references.iter().map(|x| m_index[x]).collect();
                r.sort_unstable();
                r
            })
            .collect();

        Corpus {
            manuscripts,
            contributors,
            shares,
            share_keys,
            share_ranges,
            transactions,
            taxonomy,
            paths,
            references,
            m_index,
            c_index,
        }
    }

    pub fn parts(&self) -> CorpusParts {
        CorpusParts {
            manuscripts: self.manuscripts.clone(),
            contributors: self.contributors.clone(),
            shares: self.shares.clone(),
            transactions: self.transactions.clone(),
            taxonomy: self.taxonomy.nodes().to_vec(),
        }
    }

    pub fn n_manuscripts(&self) -> usize {
        self.manuscripts.len()
    }

    pub fn n_contributors(&self) -> usize {
        self.contributors.len()
    }

    pub fn manuscripts(&self) -> &[Manuscript] {
        &self.manuscripts
    }

    pub fn manuscript(&self, i: usize) -> &Manuscript {
        &self.manuscripts[i]
    }

    pub fn contributors(&self) -> &[Contributor] {
        &self.contributors
    }

    pub fn contributor(&self, j: usize) -> &Contributor {
        &self.contributors[j]
    }

    pub fn share_assignments(&self) -> &[ShareAssignment] {
        &self.shares
    }

    pub fn transactions(&self) -> &[Transaction] {
        &self.transactions
    }

    pub fn taxonomy(&self) -> &TaxonomyTree {
        &self.taxonomy
    }

    pub fn manuscript_index(&self, id: &str) -> Option<usize> {
        self.m_index.get(id).copied()
    }

    pub fn contributor_index(&self, id: &str) -> Option<usize> {
        self.c_index.get(id).copied()
    }

    pub fn require_manuscript(&self, id: &str) -> Result<usize> {
        self.manuscript_index(id)
            .ok_or_else(|| Error::UnknownManuscript(id.to_string()))
    }

    pub fn require_contributor(&self, id: &str) -> Result<usize> {
        self.contributor_index(id)
            .ok_or_else(|| Error::UnknownContributor(id.to_string()))
    }

    /// Inherited d1..d4 primary path of manuscript `i`.
    pub fn path(&self, i: usize) -> &[String; LEVELS] {
        &self.paths[i]
    }

    /// Primary tag of manuscript `i` at `level` (1..=4).
    pub fn tag_at(&self, i: usize, level: usize) -> &str {
        &self.paths[i][level - 1]
    }

    /// Indices of the manuscripts cited by `i`, ascending.
    pub fn references_of(&self, i: usize) -> &[usize] {
        &self.references[i]
    }

    /// `(person, role, share)` rows of manuscript `i`.
    pub fn shares_of(&self, i: usize) -> impl Iterator<Item = (usize, Role, f64)> + '_ {
        let (a, b) = self.share_ranges[i];
        (a..b).map(move |k| (self.share_keys[k].1, self.shares[k].role, self.shares[k].share))
    }

    /// Every share row as `(manuscript, person, role, share)`.
    pub fn share_rows(&self) -> impl Iterator<Item = (usize, usize, Role, f64)> + '_ {
        self.share_keys
            .iter()
            .zip(&self.shares)
            .map(|(&(m, p), s)| (m, p, s.role, s.share))
    }

    /// Author shares of manuscript `i` as `(person, share)`.
    pub fn authors_of(&self, i: usize) -> Vec<(usize, f64)> {
        self.shares_of(i)
            .filter(|(_, r, _)| *r == Role::Author)
            .map(|(p, _, s)| (p, s))
            .collect()
    }

    pub fn is_retracted(&self, i: usize) -> bool {
        self.manuscripts[i].retracted
    }

    /// Tags a collection filter can match: the primary path, extra tags,
    /// and the derived `filter:*` tags.
    pub fn manuscript_tags(&self, i: usize) -> BTreeSet<String> {
        let m = &self.manuscripts[i];
        let mut tags: BTreeSet<String> = self.paths[i].iter().cloned().collect();
        tags.extend(m.extra_tags.iter().cloned());
        let roles: BTreeSet<Role> = self.shares_of(i).map(|(_, r, _)| r).collect();
        if roles.contains(&Role::PeerReviewer) {
            tags.insert(TAG_PEER_REVIEWED.to_string());
        }
        if roles.contains(&Role::Replicator) {
            tags.insert(TAG_REPLICATED.to_string());
        }
        if m.retracted {
            tags.insert(TAG_RETRACTED.to_string());
        }
        tags
    }

    /// Manuscripts whose primary path contains `tag` at any level.
    pub fn in_field(&self, tag: &str) -> Vec<usize> {
        (0..self.manuscripts.len())
            .filter(|&i| self.paths[i].iter().any(|t| t == tag))
            .collect()
    }

    pub fn first_date(&self) -> Option<NaiveDate> {
        self.manuscripts.first().map(|m| m.published_at)
    }

    pub fn last_date(&self) -> Option<NaiveDate> {
        self.manuscripts.last().map(|m| m.published_at)
    }

    /// Copy of the corpus with manuscript `id` flagged as retracted.
    pub fn apply_retraction(&self, id: &str) -> Result<Corpus> {
        let i = self.require_manuscript(id)?;
        let mut c = self.clone();
        c.manuscripts[i].retracted = true;
        Ok(c)
    }

    /// Sub-corpus of manuscripts published on or before `t`. Contributor
    /// indices are unchanged and manuscript indices are a prefix of this
    /// corpus's indices.
    pub fn published_until(&self, t: NaiveDate) -> Corpus {
        let n = self.manuscripts.partition_point(|m| m.published_at <= t);
        if n == self.manuscripts.len() {
            return self.clone();
        }
        self.restrict(|i, _| i < n)
    }

    /// Sub-corpus keeping manuscripts for which `keep(index, manuscript)`
    /// holds. References, shares and transactions touching dropped
    /// manuscripts are removed; contributors are all kept.
    pub fn restrict(&self, keep: impl Fn(usize, &Manuscript) -> bool) -> Corpus {
        let kept: Vec<bool> = self
            .manuscripts
            .iter()
            .enumerate()
            .map(|(i, m)| keep(i, m))
            .collect();
        let kept_ids: std::collections::HashSet<&str> = self
            .manuscripts
            .iter()
            .zip(&kept)
            .filter(|(_, k)| **k)
            .map(|(m, _)| m.id.as_str())
            .collect();
        let manuscripts = self
            .manuscripts
            .iter()
            .zip(&kept)
            .filter(|(_, k)| **k)
            .map(|(m, _)| {
                let mut m = m.clone();
                m.references.retain(|x| kept_ids.contains(x.as_str()));
                if m.version_parent.as_deref().is_some_and(|p| !kept_ids.contains(p)) {
                    m.version_parent = None;
                }
                m
            })
            .collect();
        let shares = self
            .shares
            .iter()
            .zip(&self.share_keys)
            .filter(|(_, (m, _))| kept[*m])
            .map(|(s, _)| s.clone())
            .collect();
        let transactions = self
            .transactions
            .iter()
            .filter(|t| kept_ids.contains(t.manuscript.as_str()))
            .cloned()
            .collect();
        Corpus::build(CorpusParts {
            manuscripts,
            contributors: self.contributors.clone(),
            shares,
            transactions,
            taxonomy: self.taxonomy.nodes().to_vec(),
        })
    }
}

pub mod fixture {
    //! Three-manuscript corpus with hand-checked metric values.
    use super::*;

    pub fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    pub fn taxonomy() -> Vec<TaxonomyNode> {
        let n = |id: &str, level: u8, parent: Option<&str>| TaxonomyNode {
            id: id.into(),
            level,
            parent: parent.map(Into::into),
            label: None,
        };
        vec![
            n("D1", 1, None),
            n("D2", 2, Some("D1")),
            n("D3", 3, Some("D2")),
            n("T1", 4, Some("D3")),
        ]
    }

    pub fn manuscript(id: &str, year: i32, refs: &[&str]) -> Manuscript {
        Manuscript {
            id: id.into(),
            title: None,
            primary_tags: PrimaryTags::leaf("T1"),
            extra_tags: BTreeSet::new(),
            references: refs.iter().map(|s| s.to_string()).collect(),
            published_at: date(year, 1, 1),
            work_started_at: Some(date(year - 1, 1, 1)),
            institutions: BTreeSet::new(),
            region: "R1".into(),
            funding: vec![],
            retracted: false,
            version_parent: None,
        }
    }

    pub fn contributor(id: &str) -> Contributor {
        Contributor {
            id: id.into(),
            region: "R1".into(),
            institutions: BTreeSet::new(),
            funding: vec![],
        }
    }

    pub fn share(m: &str, c: &str, role: Role, s: f64) -> ShareAssignment {
        ShareAssignment {
            manuscript: m.into(),
            contributor: c.into(),
            role,
            share: s,
        }
    }

    pub fn parts() -> CorpusParts {
        CorpusParts {
            manuscripts: vec![
                manuscript("m1", 2020, &[]),
                manuscript("m2", 2021, &["m1"]),
                manuscript("m3", 2022, &["m1", "m2"]),
            ],
            contributors: vec![contributor("c1"), contributor("c2"), contributor("c3")],
            shares: vec![
                share("m1", "c1", Role::Author, 0.7),
                share("m1", "c2", Role::Author, 0.3),
                share("m2", "c2", Role::Author, 0.6),
                share("m2", "c3", Role::Author, 0.4),
                share("m3", "c3", Role::Author, 0.9),
                share("m3", "c1", Role::PeerReviewer, 0.1),
            ],
            transactions: vec![Transaction {
                manuscript: "m3".into(),
                provider: "c1".into(),
                role: Role::PeerReviewer,
                shares_paid: 0.1,
                field: vec!["D1".into(), "D2".into(), "D3".into(), "T1".into()],
                executed_at: date(2022, 1, 1),
                qc_duration: Some(30.0),
            }],
            taxonomy: taxonomy(),
        }
    }

    pub fn corpus() -> Corpus {
        Corpus::new(parts()).unwrap()
    }
}
