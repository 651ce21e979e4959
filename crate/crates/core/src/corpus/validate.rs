use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::Serialize;

use super::model::{Manuscript, Role};
use super::taxonomy::{validate_taxonomy, TaxonomyTree};
use super::CorpusParts;

/// Tolerance on share and funding sums.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// Shares on a manuscript must sum to one.
    ShareSum,
    ShareRange,
    /// A contributor holds at most one role per manuscript.
    DuplicateRole,
    DuplicateId,
    UnknownManuscript,
    UnknownContributor,
    UnknownReference,
    SelfReference,
    DuplicateReference,
    /// References must point to strictly earlier manuscripts.
    CitationOrder,
    FundingSum,
    FundingRange,
    FundingPartial,
    UnknownTag,
    TagMismatch,
    TagOrphan,
    TagLevel,
    TagMultipleParents,
    TagCycle,
    TransactionRole,
    TransactionShare,
    TransactionMismatch,
    UnknownVersionParent,
}

impl Rule {
    pub fn code(self) -> &'static str {
        match self {
            Rule::ShareSum => "share-sum",
            Rule::ShareRange => "share-range",
            Rule::DuplicateRole => "duplicate-role",
            Rule::DuplicateId => "duplicate-id",
            Rule::UnknownManuscript => "unknown-manuscript",
            Rule::UnknownContributor => "unknown-contributor",
            Rule::UnknownReference => "unknown-reference",
            Rule::SelfReference => "self-reference",
            Rule::DuplicateReference => "duplicate-reference",
            Rule::CitationOrder => "citation-order",
            Rule::FundingSum => "funding-sum",
            Rule::FundingRange => "funding-range",
            Rule::FundingPartial => "funding-partial",
            Rule::UnknownTag => "unknown-tag",
            Rule::TagMismatch => "tag-mismatch",
            Rule::TagOrphan => "tag-orphan",
            Rule::TagLevel => "tag-level",
            Rule::TagMultipleParents => "tag-multiple-parents",
            Rule::TagCycle => "tag-cycle",
            Rule::TransactionRole => "transaction-role",
            Rule::TransactionShare => "transaction-share",
            Rule::TransactionMismatch => "transaction-mismatch",
            Rule::UnknownVersionParent => "unknown-version-parent",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub rule: Rule,
    pub entity: String,
    pub detail: String,
}

impl Violation {
    pub fn new(rule: Rule, entity: impl Into<String>, detail: impl Into<String>) -> Self {
        Violation {
            rule,
            entity: entity.into(),
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.rule, self.entity, self.detail)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn extend(&mut self, other: ValidationReport) {
        self.violations.extend(other.violations);
    }

    pub fn violations(&self) -> &[Violation] {
        &self.violations
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule, entity: &str) -> bool {
        self.violations
            .iter()
            .any(|v| v.rule == rule && v.entity == entity)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.violations.as_slice() {
            [] => f.write_str("no violations"),
            [one] => write!(f, "{one}"),
            [first, rest @ ..] => write!(f, "{first} (and {} more)", rest.len()),
        }
    }
}

pub(crate) fn validate_parts(parts: &CorpusParts) -> ValidationReport {
    let tree = TaxonomyTree::from_nodes(parts.taxonomy.clone());
    let mut r = validate_taxonomy(&tree);

    let mut m_by_id: HashMap<&str, &Manuscript> = HashMap::new();
    for m in &parts.manuscripts {
        if m_by_id.insert(&m.id, m).is_some() {
            r.push(Violation::new(Rule::DuplicateId, &m.id, "manuscript listed twice"));
        }
    }
    let mut c_ids = HashSet::new();
    for c in &parts.contributors {
        if !c_ids.insert(c.id.as_str()) {
            r.push(Violation::new(Rule::DuplicateId, &c.id, "contributor listed twice"));
        }
    }

    for m in &parts.manuscripts {
        check_manuscript(m, &m_by_id, &tree, &mut r);
    }

    // Shares: range, one role per contributor, and per-manuscript sums.
    let mut sums: HashMap<&str, f64> = m_by_id.keys().map(|&k| (k, 0.0)).collect();
    let mut holders: HashSet<(&str, &str)> = HashSet::new();
    let mut held: HashMap<(&str, &str, Role), f64> = HashMap::new();
    for s in &parts.shares {
        let entity = format!("{}/{}", s.manuscript, s.contributor);
        if !m_by_id.contains_key(s.manuscript.as_str()) {
            r.push(Violation::new(Rule::UnknownManuscript, &entity, "share on unknown manuscript"));
            continue;
        }
        if !c_ids.contains(s.contributor.as_str()) {
            r.push(Violation::new(Rule::UnknownContributor, &entity, "share held by unknown contributor"));
        }
        if !(0.0..=1.0).contains(&s.share) || !s.share.is_finite() {
            r.push(Violation::new(Rule::ShareRange, &entity, format!("share {} outside [0, 1]", s.share)));
        }
        if !holders.insert((s.manuscript.as_str(), s.contributor.as_str())) {
            r.push(Violation::new(Rule::DuplicateRole, &entity, "contributor holds more than one share row"));
        }
        *sums.get_mut(s.manuscript.as_str()).unwrap() += s.share;
        held.insert((s.manuscript.as_str(), s.contributor.as_str(), s.role), s.share);
    }
    for m in &parts.manuscripts {
        let total = sums.get(m.id.as_str()).copied().unwrap_or(0.0);
        if (total - 1.0).abs() > SUM_TOLERANCE {
            r.push(Violation::new(Rule::ShareSum, &m.id, format!("shares sum to {total}")));
        }
    }

    // Transactions must match a share the provider holds on the manuscript
    // or on one of its later versions.
    let mut children: HashMap<&str, Vec<&str>> = HashMap::new();
    for m in &parts.manuscripts {
        if let Some(p) = &m.version_parent {
            children.entry(p.as_str()).or_default().push(&m.id);
        }
    }
    for t in &parts.transactions {
        let entity = format!("{}/{}", t.manuscript, t.provider);
        if !m_by_id.contains_key(t.manuscript.as_str()) {
            r.push(Violation::new(Rule::UnknownManuscript, &entity, "transaction on unknown manuscript"));
            continue;
        }
        if !c_ids.contains(t.provider.as_str()) {
            r.push(Violation::new(Rule::UnknownContributor, &entity, "unknown provider"));
        }
        if !t.role.is_qc() {
            r.push(Violation::new(Rule::TransactionRole, &entity, "transactions pay reviewers or replicators"));
            continue;
        }
        if !(t.shares_paid > 0.0 && t.shares_paid < 1.0) {
            r.push(Violation::new(
                Rule::TransactionShare,
                &entity,
                format!("shares_paid {} outside (0, 1)", t.shares_paid),
            ));
            continue;
        }
        let mut candidates = vec![t.manuscript.as_str()];
        let mut i = 0;
        while i < candidates.len() && candidates.len() <= parts.manuscripts.len() {
            if let Some(cs) = children.get(candidates[i]) {
                candidates.extend(cs.iter().copied());
            }
            i += 1;
        }
        let matched = candidates.iter().any(|m| {
            held.get(&(m, t.provider.as_str(), t.role))
                .is_some_and(|s| (s - t.shares_paid).abs() <= SUM_TOLERANCE)
        });
        if !matched {
            r.push(Violation::new(
                Rule::TransactionMismatch,
                &entity,
                "no matching share assignment for the provider",
            ));
        }
    }
    r
}

fn check_manuscript(
    m: &Manuscript,
    by_id: &HashMap<&str, &Manuscript>,
    tree: &TaxonomyTree,
    r: &mut ValidationReport,
) {
    let mut seen = BTreeSet::new();
    for x in &m.references {
        if !seen.insert(x.as_str()) {
            r.push(Violation::new(Rule::DuplicateReference, &m.id, format!("cites `{x}` twice")));
            continue;
        }
        if *x == m.id {
            r.push(Violation::new(Rule::SelfReference, &m.id, "cites itself"));
            continue;
        }
        match by_id.get(x.as_str()) {
            None => r.push(Violation::new(Rule::UnknownReference, &m.id, format!("cites unknown `{x}`"))),
            Some(cited) if cited.published_at >= m.published_at => r.push(Violation::new(
                Rule::CitationOrder,
                &m.id,
                format!("cites `{x}` published {} (not earlier)", cited.published_at),
            )),
            Some(_) => {}
        }
    }

    match tree.path(&m.primary_tags.d4) {
        Err(_) => r.push(Violation::new(
            Rule::UnknownTag,
            &m.id,
            format!("primary tag `{}` is not a level-4 taxonomy node", m.primary_tags.d4),
        )),
        Ok(path) => {
            for level in 1..=3 {
                if let Some(given) = m.primary_tags.level(level) {
                    if given != path[level - 1] {
                        r.push(Violation::new(
                            Rule::TagMismatch,
                            &m.id,
                            format!("d{level} `{given}` does not match inherited `{}`", path[level - 1]),
                        ));
                    }
                }
            }
        }
    }

    if !m.funding.is_empty() {
        let given: Vec<f64> = m.funding.iter().filter_map(|f| f.fraction).collect();
        if !given.is_empty() && given.len() != m.funding.len() {
            r.push(Violation::new(Rule::FundingPartial, &m.id, "some funding entries lack a fraction"));
        } else if !given.is_empty() {
            if given.iter().any(|f| !(0.0..=1.0).contains(f)) {
                r.push(Violation::new(Rule::FundingRange, &m.id, "funding fraction outside [0, 1]"));
            }
            let total: f64 = given.iter().sum();
            if (total - 1.0).abs() > SUM_TOLERANCE {
                r.push(Violation::new(Rule::FundingSum, &m.id, format!("funding fractions sum to {total}")));
            }
        }
    }

    if let Some(p) = &m.version_parent {
        if p == &m.id || !by_id.contains_key(p.as_str()) {
            r.push(Violation::new(Rule::UnknownVersionParent, &m.id, format!("version parent `{p}`")));
        }
    }
}
