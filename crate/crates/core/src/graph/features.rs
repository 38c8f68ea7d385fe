use crate::error::{Error, Result};
use crate::graph::SparseGraph;
use crate::tensor::DenseMatrix;

/// Node feature matrix `X` (n × d), finite values only.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix(DenseMatrix);

impl FeatureMatrix {
    pub fn new(values: DenseMatrix) -> Result<Self> {
        if !values.is_finite() {
            return Err(Error::Format("feature matrix contains non-finite values".into()));
        }
        Ok(Self(values))
    }

    pub fn n(&self) -> usize {
        self.0.rows()
    }

    pub fn d(&self) -> usize {
        self.0.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.0.row(i)
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }
}

/// Graph, features and optional per-node anomaly flags.
#[derive(Clone, Debug)]
pub struct AttributedGraph {
    pub graph: SparseGraph,
    pub features: FeatureMatrix,
    pub labels: Option<Vec<bool>>,
}

impl AttributedGraph {
    pub fn new(graph: SparseGraph, features: FeatureMatrix, labels: Option<Vec<bool>>) -> Result<Self> {
        if features.n() != graph.n() {
            return Err(Error::Dimension(format!(
                "{} feature rows for {} nodes",
                features.n(),
                graph.n()
            )));
        }
        if let Some(l) = &labels {
            if l.len() != graph.n() {
                return Err(Error::Dimension(format!("{} labels for {} nodes", l.len(), graph.n())));
            }
        }
        Ok(Self {
            graph,
            features,
            labels,
        })
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }
}
