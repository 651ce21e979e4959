use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::{Corpus, CorpusParts};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;
pub(crate) const MANIFEST: &str = "corpus.json";

/// `corpus.json`: format version plus the table files, relative to the
/// manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub manuscripts: PathBuf,
    pub contributors: PathBuf,
    pub shares: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transactions: Option<PathBuf>,
    pub taxonomy: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regions: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collections: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub funding: Option<PathBuf>,
}

impl Default for Manifest {
    fn default() -> Self {
        Manifest {
            format_version: FORMAT_VERSION,
            manuscripts: "manuscripts.jsonl".into(),
            contributors: "contributors.jsonl".into(),
            shares: "shares.jsonl".into(),
            transactions: Some("transactions.jsonl".into()),
            taxonomy: "taxonomy.jsonl".into(),
            regions: Some("regions.json".into()),
            collections: Some("collections.json".into()),
            funding: Some("funding.json".into()),
        }
    }
}

/// Explicit table paths.
#[derive(Debug, Clone)]
pub struct CorpusFiles {
    pub manuscripts: PathBuf,
    pub contributors: PathBuf,
    pub shares: PathBuf,
    pub transactions: Option<PathBuf>,
    pub taxonomy: PathBuf,
}

/// Region metadata for geographic metrics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub region_id: String,
    pub population: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gdp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ppp: Option<f64>,
}

/// A journal-like collection defined by a tag filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collection {
    pub name: String,
    pub tags: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subscribers: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundingSource {
    pub source_id: String,
    pub amount: f64,
}

/// A corpus plus its optional side tables.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub corpus: Corpus,
    pub regions: Vec<Region>,
    pub collections: Vec<Collection>,
    pub funding: Vec<FundingSource>,
}

pub fn load_corpus(files: &CorpusFiles) -> Result<Corpus> {
    let parts = CorpusParts {
        manuscripts: read_jsonl(&files.manuscripts)?,
        contributors: read_jsonl(&files.contributors)?,
        shares: read_jsonl(&files.shares)?,
        transactions: match &files.transactions {
            Some(p) => read_jsonl(p)?,
            None => Vec::new(),
        },
        taxonomy: read_jsonl(&files.taxonomy)?,
    };
    Corpus::new(parts)
}

fn read_manifest(dir: &Path) -> Result<Manifest> {
    let path = dir.join(MANIFEST);
    if !path.exists() {
        return Ok(Manifest::default());
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let raw: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.clone(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let version = raw.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedFormat(version));
    }
    serde_json::from_value(raw).map_err(|e| Error::Parse {
        path,
        line: 0,
        message: e.to_string(),
    })
}

/// Load `dir/corpus.json` and the tables it names. Without a manifest the
/// default file names are used.
pub fn load_corpus_dir(dir: impl AsRef<Path>) -> Result<Corpus> {
    Ok(load_dataset(dir)?.corpus)
}

/// Like [`load_corpus_dir`], also reading regions, collections and funding
/// sources when present.
pub fn load_dataset(dir: impl AsRef<Path>) -> Result<Dataset> {
    let dir = dir.as_ref();
    let m = read_manifest(dir)?;
    let optional = |p: &Option<PathBuf>| p.as_ref().map(|p| dir.join(p)).filter(|p| p.exists());
    let files = CorpusFiles {
        manuscripts: dir.join(&m.manuscripts),
        contributors: dir.join(&m.contributors),
        shares: dir.join(&m.shares),
        transactions: optional(&m.transactions),
        taxonomy: dir.join(&m.taxonomy),
    };
    let corpus = load_corpus(&files)?;
    Ok(Dataset {
        corpus,
        regions: optional(&m.regions).map(|p| read_json(&p)).transpose()?.unwrap_or_default(),
        collections: optional(&m.collections).map(|p| read_json(&p)).transpose()?.unwrap_or_default(),
        funding: optional(&m.funding).map(|p| read_json(&p)).transpose()?.unwrap_or_default(),
    })
}

/// Write the corpus tables and a manifest into `dir`.
pub fn write_corpus_dir(corpus: &Corpus, dir: impl AsRef<Path>) -> Result<Manifest> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifest = Manifest {
        regions: None,
        collections: None,
        funding: None,
        ..Manifest::default()
    };
    let parts = corpus.parts();
    write_jsonl(&dir.join(&manifest.manuscripts), &parts.manuscripts)?;
    write_jsonl(&dir.join(&manifest.contributors), &parts.contributors)?;
    write_jsonl(&dir.join(&manifest.shares), &parts.shares)?;
    write_jsonl(&dir.join(manifest.transactions.as_ref().unwrap()), &parts.transactions)?;
    write_jsonl(&dir.join(&manifest.taxonomy), &parts.taxonomy)?;
    write_json(&dir.join(MANIFEST), &manifest)?;
    Ok(manifest)
}

pub(crate) fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(f).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let v = serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(v);
    }
    Ok(out)
}

pub(crate) fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

pub(crate) fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for r in rows {
        serde_json::to_writer(&mut w, r).expect("serializable row");
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub(crate) fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
