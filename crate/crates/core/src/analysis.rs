//! A corpus together with one weighting of its references graph.

use chrono::NaiveDate;

use crate::capital::{self, capital_timeseries_all};
use crate::citation_weighting::{estimate_field_rates, FieldRates, WeightingPipeline};
use crate::corpus::Corpus;
use crate::error::Result;
use crate::shares_graph::{build_condensed, CondensedMatrix};
use crate::sparse::Sparse;

/// Everything the metric modules need from one pipeline run.
#[derive(Debug, Clone)]
pub struct Analysis {
    corpus: Corpus,
    pipeline: WeightingPipeline,
    rates: FieldRates,
    references: Sparse,
    raw_capital: Vec<f64>,
    capital: Vec<f64>,
    shares: CondensedMatrix,
    capital_graph: CondensedMatrix,
}

impl Analysis {
    /// Run `pipeline` on `corpus`, estimating field rates from the whole
    /// corpus when the pipeline asks for them.
    pub fn new(corpus: Corpus, pipeline: WeightingPipeline) -> Result<Self> {
        let rates = if pipeline.needs_estimated_rates() {
            estimate_field_rates(&corpus)
        } else {
            FieldRates::default()
        };
        Self::with_rates(corpus, pipeline, rates)
    }

    pub fn with_rates(corpus: Corpus, pipeline: WeightingPipeline, rates: FieldRates) -> Result<Self> {
        let references = pipeline.run_with_rates(&corpus, &rates)?.matrix;
        let raw_capital = capital::capital_vector(&references);
        let capital = capital::effective_capital(&corpus, &references);
        let shares = build_condensed(&corpus);
        let capital_graph = capital::capital_graph(&capital, &shares)?;
        Ok(Analysis {
            corpus,
            pipeline,
            rates,
            references,
            raw_capital,
            capital,
            shares,
            capital_graph,
        })
    }

    /// Base weighting, no modifiers.
    pub fn base(corpus: Corpus) -> Result<Self> {
        Self::new(corpus, WeightingPipeline::default())
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn pipeline(&self) -> &WeightingPipeline {
        &self.pipeline
    }

    pub fn rates(&self) -> &FieldRates {
        &self.rates
    }

    /// Weighted references matrix `W`.
    pub fn references(&self) -> &Sparse {
        &self.references
    }

    /// `AC` with retracted manuscripts masked to zero.
    pub fn capital(&self) -> &[f64] {
        &self.capital
    }

    /// `AC` before retraction masking.
    pub fn raw_capital(&self) -> &[f64] {
        &self.raw_capital
    }

    pub fn shares(&self) -> &CondensedMatrix {
        &self.shares
    }

    pub fn capital_graph(&self) -> &CondensedMatrix {
        &self.capital_graph
    }

    pub fn total_capital(&self) -> f64 {
        self.capital.iter().sum()
    }

    /// `out[g][m]`, capital of manuscript `m` at `grid[g]`.
    pub fn timeseries(&self, grid: &[NaiveDate]) -> Result<Vec<Vec<f64>>> {
        capital_timeseries_all(&self.corpus, &self.pipeline, &self.rates, grid)
    }
}
