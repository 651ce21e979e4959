use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::model::{Manuscript, TaxonomyNode};
use super::validate::{Rule, ValidationReport, Violation};
use crate::error::{Error, Result};

pub const LEVELS: usize = 4;

/// Four-level field taxonomy (d1 coarsest, d4 finest).
#[derive(Debug, Clone, Default)]
pub struct TaxonomyTree {
    nodes: Vec<TaxonomyNode>,
    index: HashMap<String, usize>,
}

impl TaxonomyTree {
    pub fn from_nodes(nodes: Vec<TaxonomyNode>) -> Self {
        let mut index = HashMap::with_capacity(nodes.len());
        for (i, n) in nodes.iter().enumerate() {
            index.entry(n.id.clone()).or_insert(i);
        }
        TaxonomyTree { nodes, index }
    }

    pub fn nodes(&self) -> &[TaxonomyNode] {
        &self.nodes
    }

    pub fn get(&self, id: &str) -> Option<&TaxonomyNode> {
        self.index.get(id).map(|&i| &self.nodes[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn level_of(&self, id: &str) -> Option<usize> {
        self.get(id).map(|n| n.level as usize)
    }

    /// All tag ids at `level`, sorted.
    pub fn level_tags(&self, level: usize) -> Vec<&str> {
        let set: BTreeSet<&str> = self
            .nodes
            .iter()
            .filter(|n| n.level as usize == level)
            .map(|n| n.id.as_str())
            .collect();
        set.into_iter().collect()
    }

    /// Ancestor of `id` at `level` (the tag itself when it sits at `level`).
    pub fn ancestor_at(&self, id: &str, level: usize) -> Option<&str> {
        let mut node = self.get(id)?;
        let mut guard = 0;
        while node.level as usize > level {
            node = self.get(node.parent.as_deref()?)?;
            guard += 1;
            if guard > LEVELS {
                return None;
            }
        }
        (node.level as usize == level).then_some(node.id.as_str())
    }

    /// Full d1..d4 path of a level-4 tag.
    pub fn path(&self, d4: &str) -> Result<[String; LEVELS]> {
        let node = self.get(d4).ok_or_else(|| Error::UnknownTag(d4.to_string()))?;
        if node.level as usize != LEVELS {
            return Err(Error::UnknownTag(d4.to_string()));
        }
        let mut out: [String; LEVELS] = Default::default();
        for level in 1..=LEVELS {
            let tag = self
                .ancestor_at(d4, level)
                .ok_or_else(|| Error::UnknownTag(d4.to_string()))?;
            out[level - 1] = tag.to_string();
        }
        Ok(out)
    }
}

/// Derive a manuscript's d1..d3 tags from its d4 tag.
pub fn inherit_tags(m: &Manuscript, tree: &TaxonomyTree) -> Result<[String; LEVELS]> {
    tree.path(&m.primary_tags.d4)
}

/// Structural checks: levels in 1..=4, every non-root has exactly one
/// parent one level up, no cycles, no duplicate ids.
pub fn validate_taxonomy(tree: &TaxonomyTree) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut parents: BTreeMap<&str, BTreeSet<Option<&str>>> = BTreeMap::new();
    for n in &tree.nodes {
        parents.entry(&n.id).or_default().insert(n.parent.as_deref());
    }
    for (id, ps) in &parents {
        if ps.len() > 1 {
            report.push(Violation::new(
                Rule::TagMultipleParents,
                *id,
                format!("{} distinct parents", ps.len()),
            ));
        }
    }
    let mut seen = BTreeSet::new();
    for n in &tree.nodes {
        if !seen.insert(n.id.as_str()) {
            if parents[n.id.as_str()].len() == 1 {
                report.push(Violation::new(Rule::DuplicateId, &n.id, "taxonomy node listed twice"));
            }
            continue;
        }
        let level = n.level as usize;
        if !(1..=LEVELS).contains(&level) {
            report.push(Violation::new(Rule::TagLevel, &n.id, format!("level {level} outside 1..=4")));
            continue;
        }
        match (&n.parent, level) {
            (None, 1) => {}
            (Some(p), 1) => report.push(Violation::new(
                Rule::TagLevel,
                &n.id,
                format!("level-1 node has parent `{p}`"),
            )),
            (None, _) => report.push(Violation::new(Rule::TagOrphan, &n.id, "missing parent")),
            (Some(p), _) => match tree.get(p) {
                None => report.push(Violation::new(
                    Rule::TagOrphan,
                    &n.id,
                    format!("parent `{p}` not in taxonomy"),
                )),
                Some(pn) if pn.level as usize + 1 != level => report.push(Violation::new(
                    Rule::TagLevel,
                    &n.id,
                    format!("parent `{p}` is at level {}, expected {}", pn.level, level - 1),
                )),
                Some(_) => {}
            },
        }
    }
    // Cycles can only appear when levels are already inconsistent, but walk
    // the parent chains anyway so the report names them.
    for n in &tree.nodes {
        let mut cur = n;
        let mut steps = 0;
        while let Some(p) = cur.parent.as_deref() {
            match tree.get(p) {
                Some(next) => cur = next,
                None => break,
            }
            steps += 1;
            if cur.id == n.id || steps > tree.nodes.len() {
                report.push(Violation::new(Rule::TagCycle, &n.id, "parent chain loops"));
                break;
            }
        }
    }
    report
}
