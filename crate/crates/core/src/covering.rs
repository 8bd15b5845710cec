//! Good coverings: families of connected subgraphs covering every vertex,
//! with each edge lying in at least one and at most `m` members.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eigen::SolverOptions;
use crate::error::{Error, Result};
use crate::field::field_norm_with;
use crate::graph::{MagneticPotential, VertexId, WeightedGraph};

/// A member G_l = (V_l, E_l) of a covering, by vertex ids. Edges are stored
/// as `[min, max]` id pairs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subgraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(VertexId, VertexId)>,
}

impl Subgraph {
    /// Subgraph of `graph` from vertex and edge indices, in canonical order.
    pub fn from_indices(graph: &WeightedGraph, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> Self {
        Subgraph {
            vertices: vertices.iter().map(|&x| graph.id(x)).collect(),
            edges: edges
                .iter()
                .map(|&k| {
                    let e = graph.edge(k);
                    (graph.id(e.u), graph.id(e.v))
                })
                .collect(),
        }
    }

    /// Induced subgraph of `graph` on the given vertex indices.
    pub fn induced(graph: &WeightedGraph, vertices: &BTreeSet<usize>) -> Self {
        Self::from_indices(graph, vertices, &graph.induced_edges(vertices))
    }

    /// Vertex and edge indices in `graph`.
    pub fn resolve(&self, graph: &WeightedGraph, index: usize) -> Result<(BTreeSet<usize>, BTreeSet<usize>)> {
        let invalid = |reason: String| Error::InvalidSubgraph { index, reason };
        let vertices = self
            .vertices
            .iter()
            .map(|&id| {
                graph
                    .index_of(id)
                    .map_err(|_| invalid(format!("unknown vertex {id}")))
            })
            .collect::<Result<BTreeSet<_>>>()?;
        if vertices.is_empty() {
            return Err(invalid("no vertices".into()));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(a, b)| {
                let not_edge = || invalid(format!("[{a}, {b}] is not an edge"));
                let ia = graph.index_of(a).map_err(|_| not_edge())?;
                let ib = graph.index_of(b).map_err(|_| not_edge())?;
                if !vertices.contains(&ia) || !vertices.contains(&ib) {
                    return Err(invalid(format!("edge [{a}, {b}] leaves the vertex set")));
                }
                graph.edge_between(ia, ib).ok_or_else(not_edge)
            })
            .collect::<Result<BTreeSet<_>>>()?;
        Ok((vertices, edges))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum Provenance {
    Balls(usize),
    User,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Balls(k) => write!(f, "k-ball({k})"),
            Provenance::User => write!(f, "user"),
        }
    }
}

impl From<Provenance> for String {
    fn from(p: Provenance) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for Provenance {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        if s == "user" {
            return Ok(Provenance::User);
        }
        s.strip_prefix("k-ball(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|k| k.parse().ok())
            .map(Provenance::Balls)
            .ok_or_else(|| format!("unknown covering provenance {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodCovering {
    pub provenance: Provenance,
    /// Declared degree m.
    pub degree: usize,
    pub subgraphs: Vec<Subgraph>,
}

impl GoodCovering {
    pub fn user(degree: usize, subgraphs: Vec<Subgraph>) -> Self {
        GoodCovering {
            provenance: Provenance::User,
            degree,
            subgraphs,
        }
    }

    pub fn len(&self) -> usize {
        self.subgraphs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subgraphs.is_empty()
    }
}

/// Degree bound of the k-ball covering of a graph with maximal degree `n`:
/// the size of a combinatorial k-ball in the N-regular tree,
/// (N(N−1)^k − 2)/(N−2) for N ≥ 3, and 2k + 1 on paths and cycles.
pub fn ball_covering_degree(n: usize, k: usize) -> usize {
    match n {
        0 => 1,
        1 => 2,
        2 => 2 * k + 1,
        _ => {
            let n = n as u128;
            let top = (n - 1)
                .checked_pow(k as u32)
                .and_then(|p| p.checked_mul(n))
                .map(|t| (t - 2) / (n - 2));
            top.map_or(usize::MAX, |m| usize::try_from(m).unwrap_or(usize::MAX))
        }
    }
}

/// One induced combinatorial ball G_x^k per vertex.
pub fn ball_covering(graph: &WeightedGraph, k: usize) -> Result<GoodCovering> {
    if k == 0 {
        return Err(Error::InvalidParameter("ball radius k must be at least 1".into()));
    }
    let subgraphs = (0..graph.vertex_count())
        .map(|x| {
            let hops = graph.hop_distances(x, k);
            let ball: BTreeSet<usize> = (0..graph.vertex_count()).filter(|&y| hops[y].is_some()).collect();
            Subgraph::induced(graph, &ball)
        })
        .collect();
    Ok(GoodCovering {
        provenance: Provenance::Balls(k),
        degree: ball_covering_degree(graph.degree_bound(), k),
        subgraphs,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringDiagnostics {
    pub is_good: bool,
    pub declared_degree: usize,
    pub empirical_max_multiplicity: usize,
    pub uncovered_vertices: Vec<VertexId>,
    pub uncovered_edges: Vec<(VertexId, VertexId)>,
    /// Edges lying in more than the declared number of subgraphs.
    pub overcovered_edges: Vec<(VertexId, VertexId)>,
    pub disconnected_subgraphs: Vec<usize>,
    pub invalid_subgraphs: Vec<(usize, String)>,
}

/// Checks the covering conditions literally.
pub fn validate_covering(graph: &WeightedGraph, cover: &GoodCovering) -> CoveringDiagnostics {
    let mut vertex_hits = vec![0usize; graph.vertex_count()];
    let mut edge_hits = vec![0usize; graph.edge_count()];
    let mut disconnected_subgraphs = Vec::new();
    let mut invalid_subgraphs = Vec::new();
    for (l, sub) in cover.subgraphs.iter().enumerate() {
        match sub.resolve(graph, l) {
            Ok((vs, es)) => {
                vs.iter().for_each(|&x| vertex_hits[x] += 1);
                es.iter().for_each(|&k| edge_hits[k] += 1);
                if graph.subgraph(&vs, &es).is_err() {
                    disconnected_subgraphs.push(l);
                }
            }
            Err(e) => invalid_subgraphs.push((l, e.to_string())),
        }
    }
    let edge_ids = |k: usize| {
        let e = graph.edge(k);
        (graph.id(e.u), graph.id(e.v))
    };
    let uncovered_vertices: Vec<VertexId> = (0..graph.vertex_count())
        .filter(|&x| vertex_hits[x] == 0)
        .map(|x| graph.id(x))
        .collect();
    let uncovered_edges: Vec<_> = (0..graph.edge_count())
        .filter(|&k| edge_hits[k] == 0)
        .map(edge_ids)
        .collect();
    let overcovered_edges: Vec<_> = (0..graph.edge_count())
        .filter(|&k| edge_hits[k] > cover.degree)
        .map(edge_ids)
        .collect();
    let empirical_max_multiplicity = edge_hits.iter().copied().max().unwrap_or(0);
    CoveringDiagnostics {
        is_good: uncovered_vertices.is_empty()
            && uncovered_edges.is_empty()
            && overcovered_edges.is_empty()
            && disconnected_subgraphs.is_empty()
            && invalid_subgraphs.is_empty()
            && cover.degree > 0,
        declared_degree: cover.degree,
        empirical_max_multiplicity,
        uncovered_vertices,
        uncovered_edges,
        overcovered_edges,
        disconnected_subgraphs,
        invalid_subgraphs,
    }
}

/// |B_l| for a graph already carrying the potential.
pub(crate) fn restricted_norm_on(
    graph: &WeightedGraph,
    sub: &Subgraph,
    index: usize,
    opts: &SolverOptions,
) -> Result<(f64, BTreeSet<usize>, BTreeSet<usize>)> {
    let (vs, es) = sub.resolve(graph, index)?;
    let piece = graph.subgraph(&vs, &es).map_err(|e| match e {
        Error::Disconnected { .. } => Error::DisconnectedSubgraph { index },
        other => other,
    })?;
    let norm = field_norm_with(&piece, piece.potential(), opts)?;
    Ok((norm, vs, es))
}

/// |B_l|: field norm of the restriction of α to G_l, with unit weights.
pub fn restricted_field_norm(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    sub: &Subgraph,
) -> Result<f64> {
    let with_alpha = graph.with_potential(alpha.clone())?;
    restricted_norm_on(&with_alpha, sub, 0, &SolverOptions::default()).map(|(n, _, _)| n)
}
