//! Python bindings. The module is importable as `liberata`.

use std::collections::BTreeMap;
use std::str::FromStr;

use ::liberata::citation_weighting::WeightingPipeline;
use ::liberata::corpus::{self, fixture};
use ::liberata::graph_spectral::{self, End, LaplacianKind, KMEANS_SEED};
use ::liberata::market::{self, Feasibility};
use ::liberata::portfolio::{self, PortfolioSelector};
use ::liberata::references_graph::{self, PathLength};
use ::liberata::shares_graph::build_full;
use ::liberata::synth::{self, SynthParams};
use ::liberata::{sparse, Error, Measure};
use pyo3::create_exception;
use pyo3::exceptions::{PyKeyError, PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(liberata, ValidationError, pyo3::exceptions::PyValueError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Validation(report) => {
            let rules: Vec<(String, String, String)> = report
                .violations()
                .iter()
                .map(|v| (v.rule.code().to_string(), v.entity.clone(), v.detail.clone()))
                .collect();
            ValidationError::new_err(rules)
        }
        Error::UnknownManuscript(_) | Error::UnknownContributor(_) | Error::UnknownTag(_) | Error::UnknownRegion(_) => {
            PyKeyError::new_err(e.to_string())
        }
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::InvalidArgument(_) | Error::Parse { .. } | Error::UnsupportedFormat(_) => {
            PyValueError::new_err(e.to_string())
        }
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn opt(m: Measure) -> Option<f64> {
    m.value()
}

/// A validated corpus of manuscripts, contributors and shares.
#[pyclass(frozen, skip_from_py_object, name = "Corpus")]
#[derive(Clone)]
struct PyCorpus {
    inner: corpus::Corpus,
}

#[pymethods]
impl PyCorpus {
    /// Load and validate a corpus directory.
    #[staticmethod]
    fn load(dir: &str) -> PyResult<Self> {
        let d = corpus::load_dataset(dir).map_err(py_err)?;
        Ok(PyCorpus { inner: d.corpus })
    }

    /// The three-manuscript example corpus.
    #[staticmethod]
    fn fixture() -> Self {
        PyCorpus { inner: fixture::corpus() }
    }

    fn save(&self, dir: &str) -> PyResult<()> {
        corpus::write_corpus_dir(&self.inner, dir).map(|_| ()).map_err(py_err)
    }

    #[getter]
    fn manuscripts(&self) -> Vec<String> {
        self.inner.manuscripts().iter().map(|m| m.id.clone()).collect()
    }

    #[getter]
    fn contributors(&self) -> Vec<String> {
        self.inner.contributors().iter().map(|c| c.id.clone()).collect()
    }

    /// `(manuscript, contributor, role, share)` rows.
    fn shares(&self) -> Vec<(String, String, String, f64)> {
        let c = &self.inner;
        c.share_rows()
            .map(|(m, p, r, s)| (c.manuscript(m).id.clone(), c.contributor(p).id.clone(), r.as_str().to_string(), s))
            .collect()
    }

    fn references(&self, manuscript: &str) -> PyResult<Vec<String>> {
        let c = &self.inner;
        let m = c.require_manuscript(manuscript).map_err(py_err)?;
        Ok(c.references_of(m).iter().map(|&x| c.manuscript(x).id.clone()).collect())
    }

    fn __len__(&self) -> usize {
        self.inner.n_manuscripts()
    }

    fn __repr__(&self) -> String {
        format!(
            "Corpus({} manuscripts, {} contributors)",
            self.inner.n_manuscripts(),
            self.inner.n_contributors()
        )
    }
}

/// Capital and portfolio metrics under one weighting pipeline.
#[pyclass(frozen, name = "Analysis")]
struct PyAnalysis {
    inner: ::liberata::Analysis,
}

#[pymethods]
impl PyAnalysis {
    #[new]
    #[pyo3(signature = (corpus, weighting = None))]
    fn new(corpus: &PyCorpus, weighting: Option<&str>) -> PyResult<Self> {
        let p = match weighting {
            Some(s) => WeightingPipeline::from_str(s).map_err(py_err)?,
            None => WeightingPipeline::default(),
        };
        let inner = ::liberata::Analysis::new(corpus.inner.clone(), p).map_err(py_err)?;
        Ok(PyAnalysis { inner })
    }

    #[getter]
    fn weighting(&self) -> String {
        self.inner.pipeline().to_string()
    }

    /// Manuscript capital keyed by id.
    fn capital(&self) -> BTreeMap<String, f64> {
        let c = self.inner.corpus();
        (0..c.n_manuscripts()).map(|m| (c.manuscript(m).id.clone(), self.inner.capital()[m])).collect()
    }

    fn contributor_capital(&self) -> BTreeMap<String, f64> {
        let c = self.inner.corpus();
        let totals = self.inner.capital_graph().person_totals();
        (0..c.n_contributors()).map(|p| (c.contributor(p).id.clone(), totals[p])).collect()
    }

    fn total_capital(&self) -> f64 {
        self.inner.total_capital()
    }

    /// Weighted citations as `(cited, citing, weight)`.
    fn weighted_references(&self) -> Vec<(String, String, f64)> {
        let c = self.inner.corpus();
        sparse::entries(self.inner.references())
            .into_iter()
            .map(|(x, y, v)| (c.manuscript(x).id.clone(), c.manuscript(y).id.clone(), v))
            .collect()
    }

    fn betweenness(&self) -> BTreeMap<String, f64> {
        let c = self.inner.corpus();
        references_graph::betweenness_centrality(self.inner.references(), PathLength::Hops)
            .into_iter()
            .enumerate()
            .map(|(m, b)| (c.manuscript(m).id.clone(), b))
            .collect()
    }

    /// Spectral partition of the symmetrized references graph.
    #[pyo3(signature = (k, seed = KMEANS_SEED))]
    fn cluster(&self, k: usize, seed: u64) -> PyResult<BTreeMap<String, usize>> {
        let c = self.inner.corpus();
        let g = references_graph::symmetrize(self.inner.references());
        let parts =
            graph_spectral::cluster(&g, k, End::Smallest, LaplacianKind::Combinatorial, seed).map_err(py_err)?;
        Ok(parts.into_iter().enumerate().map(|(m, p)| (c.manuscript(m).id.clone(), p)).collect())
    }

    /// Log spanning-tree counts and ratios of the shares graph.
    fn spanning_trees(&self) -> PyResult<BTreeMap<&'static str, Option<f64>>> {
        let counts = graph_spectral::spanning_tree_counts(&build_full(self.inner.corpus())).map_err(py_err)?;
        let r = graph_spectral::tree_ratios(&counts);
        Ok(BTreeMap::from([
            ("log_tau_c", Some(counts.log_tau_c)),
            ("log_tau_cw", Some(counts.log_tau_cw)),
            ("log_tau_k", Some(counts.log_tau_k)),
            ("log_tau_kw", Some(counts.log_tau_kw)),
            ("str", opt(r.str_ratio)),
            ("str_w", opt(r.str_weighted)),
            ("rstr", opt(r.rstr)),
        ]))
    }

    /// Summary metrics of the portfolio picked by `selector`.
    #[pyo3(signature = (selector = "", period_months = 12))]
    fn portfolio(&self, selector: &str, period_months: u32) -> PyResult<BTreeMap<&'static str, Option<f64>>> {
        let a = &self.inner;
        let sel = PortfolioSelector::from_str(selector).map_err(py_err)?;
        let pf = portfolio::build_portfolio(a.corpus(), &sel);
        let cap = portfolio::portfolio_capital(&pf, a.capital_graph());
        let series = portfolio::returns_series(a, &pf, period_months).map_err(py_err)?;
        let mo = portfolio::moments(&series.values);
        let ratios = portfolio::ratio_metrics(&mo.mean, &mo.volatility, cap);
        let dr = portfolio::diversification_ratio(a, &pf, period_months).map_err(py_err)?;
        Ok(BTreeMap::from([
            ("capital", Some(cap)),
            ("holdings", Some(pf.holdings.len() as f64)),
            ("mean", opt(mo.mean)),
            ("volatility", opt(mo.volatility)),
            ("skew", opt(mo.skew)),
            ("sharpe", opt(ratios.sharpe)),
            ("arc", opt(ratios.arc)),
            ("dr", opt(dr)),
        ]))
    }
}

/// `(hhi, gini, entropy)` of allocation weights.
#[pyfunction]
fn concentration(weights: Vec<f64>) -> (f64, f64, f64) {
    let c = portfolio::concentration(&weights);
    (c.hhi, c.gini, c.entropy)
}

/// Diversification ratio of weighted return series; None when undefined.
#[pyfunction]
fn diversification_ratio(weights: Vec<f64>, assets: Vec<Vec<f64>>) -> PyResult<Option<f64>> {
    Ok(portfolio::diversification_ratio_of(&weights, &assets).map_err(py_err)?.value())
}

#[pyfunction]
fn author_feasible(expected_with: f64, expected_without: f64, share_with: f64, share_without: f64) -> bool {
    market::transaction_feasible(&Feasibility::Author {
        expected_with,
        expected_without,
        share_with,
        share_without,
    })
}

#[pyfunction]
fn provider_feasible(t_provider: f64, t_author: f64, share: f64) -> bool {
    market::transaction_feasible(&Feasibility::Provider { t_provider, t_author, share })
}

/// Write a synthetic dataset to `dir` and return its corpus.
#[pyfunction]
#[pyo3(signature = (dir, seed = 1, manuscripts = 200, contributors = 60, qc_rate = 0.5))]
fn synthesize(dir: &str, seed: u64, manuscripts: usize, contributors: usize, qc_rate: f64) -> PyResult<PyCorpus> {
    let p = SynthParams {
        seed,
        manuscripts,
        contributors,
        qc_rate,
        ..Default::default()
    };
    let out = synth::generate(&p).map_err(py_err)?;
    synth::write_dataset(&out, dir).map_err(py_err)?;
    Ok(PyCorpus { inner: out.corpus })
}

#[pymodule]
fn liberata(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCorpus>()?;
    m.add_class::<PyAnalysis>()?;
    m.add("ValidationError", m.py().get_type::<ValidationError>())?;
    m.add_function(wrap_pyfunction!(concentration, m)?)?;
    m.add_function(wrap_pyfunction!(diversification_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(author_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(provider_feasible, m)?)?;
    m.add_function(wrap_pyfunction!(synthesize, m)?)?;
    Ok(())
}
