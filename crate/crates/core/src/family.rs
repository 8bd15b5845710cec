//! Infinite graphs represented through nested finite truncations.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::covering::GoodCovering;
use crate::error::{Error, Result};
use crate::graph::{VertexId, WeightedGraph};

/// A finite piece `G_R` of a family together with its frontier: the vertices
/// of `G_R` that have neighbors outside `G_R` in the full graph.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub radius: usize,
    pub graph: WeightedGraph,
    pub frontier: BTreeSet<VertexId>,
}

type Generator = dyn Fn(usize) -> Result<Truncation> + Send + Sync;
type CoveringRule = dyn Fn(&WeightedGraph) -> Result<GoodCovering> + Send + Sync;

/// Lazily generated graph. Truncations must be nested: `G_R` is an induced
/// subgraph of `G_R'` for `R < R'`, with stable vertex ids.
#[derive(Clone)]
pub struct GraphFamily {
    name: String,
    base: VertexId,
    degree_bound: Option<usize>,
    complete: Option<bool>,
    generator: Arc<Generator>,
    covering: Option<Arc<CoveringRule>>,
}

impl fmt::Debug for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphFamily")
            .field("name", &self.name)
            .field("base", &self.base)
            .field("degree_bound", &self.degree_bound)
            .field("complete", &self.complete)
            .finish_non_exhaustive()
    }
}

impl GraphFamily {
    pub fn new<F>(name: impl Into<String>, base: VertexId, generator: F) -> Self
    where
        F: Fn(usize) -> Result<Truncation> + Send + Sync + 'static,
    {
        GraphFamily {
            name: name.into(),
            base,
            degree_bound: None,
            complete: None,
            generator: Arc::new(generator),
            covering: None,
        }
    }

    /// Declares the maximal degree of the full (untruncated) graph.
    pub fn with_degree_bound(mut self, n: usize) -> Self {
        self.degree_bound = Some(n);
        self
    }

    /// Declares whether the d_p metric of the full graph is complete, when
    /// this is known in closed form.
    pub fn with_completeness(mut self, complete: bool) -> Self {
        self.complete = Some(complete);
        self
    }

    /// Attaches a covering rule the family considers natural for its
    /// truncations (the square covering of the ladder, say).
    pub fn with_covering<F>(mut self, rule: F) -> Self
    where
        F: Fn(&WeightedGraph) -> Result<GoodCovering> + Send + Sync + 'static,
    {
        self.covering = Some(Arc::new(rule));
        self
    }

    /// A finite graph seen as a family: `G_R` is the combinatorial ball of
    /// radius `R` around `base`.
    pub fn from_finite(graph: WeightedGraph, base: VertexId) -> Result<Self> {
        let root = graph.index_of(base)?;
        let n = graph.degree_bound();
        let graph = Arc::new(graph);
        Ok(GraphFamily::new("finite", base, move |radius| {
            let hops = graph.hop_distances(root, radius);
            let inside: BTreeSet<usize> = (0..graph.vertex_count()).filter(|&x| hops[x].is_some()).collect();
            let frontier = inside
                .iter()
                .filter(|&&x| graph.neighbors(x).iter().any(|(y, _)| hops[*y].is_none()))
                .map(|&x| graph.id(x))
                .collect();
            Ok(Truncation {
                radius,
                graph: graph.induced_subgraph(&inside)?,
                frontier,
            })
        })
        .with_degree_bound(n))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base_vertex(&self) -> VertexId {
        self.base
    }

    /// Declared degree bound of the full graph, if known.
    pub fn declared_degree_bound(&self) -> Option<usize> {
        self.degree_bound
    }

    pub fn declared_completeness(&self) -> Option<bool> {
        self.complete
    }

    pub fn natural_covering(&self, graph: &WeightedGraph) -> Option<Result<GoodCovering>> {
        self.covering.as_ref().map(|rule| rule(graph))
    }

    /// `G_R` with its frontier. Deterministic in `R`.
    pub fn truncate(&self, radius: usize) -> Result<Truncation> {
        if radius == 0 {
            return Err(Error::InvalidParameter(
                "truncation radius must be at least 1".into(),
            ));
        }
        let t = (self.generator)(radius).map_err(|e| match e {
            e @ Error::GeneratorFailure { .. } => e,
            other => Error::GeneratorFailure {
                radius,
                reason: other.to_string(),
            },
        })?;
        if !t.graph.contains(self.base) {
            return Err(Error::GeneratorFailure {
                radius,
                reason: format!("base vertex {} missing", self.base),
            });
        }
        if let Some(&bad) = t.frontier.iter().find(|id| !t.graph.contains(**id)) {
            return Err(Error::GeneratorFailure {
                radius,
                reason: format!("frontier vertex {bad} not in the truncation"),
            });
        }
        Ok(t)
    }
}
