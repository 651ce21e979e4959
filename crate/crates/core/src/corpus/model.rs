use std::collections::BTreeSet;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

/// Contribution role a share is held under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Author,
    PeerReviewer,
    Replicator,
}

impl Role {
    pub const ALL: [Role; 3] = [Role::Author, Role::PeerReviewer, Role::Replicator];

    /// Block index in the condensed shares matrix.
    pub fn index(self) -> usize {
        match self {
            Role::Author => 0,
            Role::PeerReviewer => 1,
            Role::Replicator => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Role> {
        Role::ALL.get(i).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Role::Author => "author",
            Role::PeerReviewer => "peer_reviewer",
            Role::Replicator => "replicator",
        }
    }

    pub fn parse(s: &str) -> Option<Role> {
        match s {
            "author" | "a" | "A" => Some(Role::Author),
            "peer_reviewer" | "reviewer" | "review" | "p" | "P" => Some(Role::PeerReviewer),
            "replicator" | "replication" | "r" | "R" => Some(Role::Replicator),
            _ => None,
        }
    }

    pub fn is_qc(self) -> bool {
        self != Role::Author
    }
}

impl std::fmt::Display for Role {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Primary taxonomy path. Only `d4` is required; the coarser levels are
/// inherited from the tree when omitted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimaryTags {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d1: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d2: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d3: Option<String>,
    pub d4: String,
}

impl PrimaryTags {
    pub fn leaf(d4: impl Into<String>) -> Self {
        PrimaryTags {
            d1: None,
            d2: None,
            d3: None,
            d4: d4.into(),
        }
    }

    pub fn level(&self, level: usize) -> Option<&str> {
        match level {
            1 => self.d1.as_deref(),
            2 => self.d2.as_deref(),
            3 => self.d3.as_deref(),
            4 => Some(&self.d4),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundingShare {
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manuscript {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title: Option<String>,
    pub primary_tags: PrimaryTags,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub extra_tags: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub references: Vec<String>,
    pub published_at: NaiveDate,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub work_started_at: Option<NaiveDate>,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub institutions: BTreeSet<String>,
    pub region: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub funding: Vec<FundingShare>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub retracted: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub version_parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Contributor {
    pub id: String,
    pub region: String,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub institutions: BTreeSet<String>,
    /// Funding sources backing this contributor, used when a manuscript
    /// does not list its own funding.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub funding: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareAssignment {
    pub manuscript: String,
    pub contributor: String,
    pub role: Role,
    pub share: f64,
}

/// A quality-control payment: `provider` received `shares_paid` of the
/// manuscript for reviewing or replicating it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transaction {
    pub manuscript: String,
    pub provider: String,
    pub role: Role,
    pub shares_paid: f64,
    /// Field path of the manuscript at the time of the transaction.
    pub field: Vec<String>,
    pub executed_at: NaiveDate,
    /// Days spent on the review or replication.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qc_duration: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TaxonomyNode {
    pub id: String,
    pub level: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parent: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}
