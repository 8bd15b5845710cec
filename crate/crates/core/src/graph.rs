//! Weighted graphs carrying a magnetic potential.
//!
//! A [`WeightedGraph`] is immutable once built. Vertices are stored sorted by
//! id and every undirected edge is stored once, oriented from the smaller to
//! the larger vertex id. The magnetic potential lives alongside the edge list
//! as one angle per edge in that canonical orientation; reading an edge
//! against its orientation returns the negated angle.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::angle;
use crate::error::{Error, Result};

/// Opaque, stable vertex identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

/// One angle per edge, in the canonical orientation of that edge.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticPotential(Vec<f64>);

impl MagneticPotential {
    pub fn zero(edge_count: usize) -> Self {
        MagneticPotential(vec![0.0; edge_count])
    }

    /// Wraps raw angles, reducing each into (−π, π].
    pub fn from_angles(angles: Vec<f64>) -> Self {
        MagneticPotential(angles.into_iter().map(angle::normalize).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, edge: usize) -> f64 {
        self.0[edge]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, a| m.max(a.abs()))
    }
}

/// An undirected edge stored as vertex indices with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub c: f64,
}

impl Edge {
    /// The endpoint opposite to `x`.
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawVertex {
    pub id: VertexId,
    pub omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawEdge {
    pub u: VertexId,
    pub v: VertexId,
    pub c: f64,
    #[serde(default)]
    pub alpha: f64,
}

/// Serialized form of a graph; `alpha` is oriented `u → v`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawGraph {
    pub vertices: Vec<RawVertex>,
    pub edges: Vec<RawEdge>,
}

impl RawGraph {
    pub fn vertex(mut self, id: u64, omega: f64) -> Self {
        self.vertices.push(RawVertex {
            id: VertexId(id),
            omega,
        });
        self
    }

    pub fn edge(mut self, u: u64, v: u64, c: f64, alpha: f64) -> Self {
        self.edges.push(RawEdge {
            u: VertexId(u),
            v: VertexId(v),
            c,
            alpha,
        });
        self
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        WeightedGraph::from_raw(self)
    }
}

#[derive(Debug, Clone)]
pub struct WeightedGraph {
    ids: Vec<VertexId>,
    omega: Vec<f64>,
    index: HashMap<VertexId, usize>,
    edges: Vec<Edge>,
    alpha: MagneticPotential,
    // (neighbor, edge index), sorted by neighbor
    adjacency: Vec<Vec<(usize, usize)>>,
}

fn check_weight(what: impl FnOnce() -> String, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::NonFinite { what: what(), value });
    }
    if value <= 0.0 {
        return Err(Error::NonPositiveWeight { what: what(), value });
    }
    Ok(())
}

impl WeightedGraph {
    /// Validates a raw description and builds the canonical graph.
    pub fn from_raw(raw: &RawGraph) -> Result<Self> {
        if raw.vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let mut vertices = raw.vertices.clone();
        vertices.sort_by_key(|v| v.id);
        for pair in vertices.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateVertex(pair[0].id));
            }
        }
        for v in &vertices {
            check_weight(|| format!("omega of vertex {}", v.id), v.omega)?;
        }
        let ids: Vec<VertexId> = vertices.iter().map(|v| v.id).collect();
        let omega: Vec<f64> = vertices.iter().map(|v| v.omega).collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();

        let mut oriented = Vec::with_capacity(raw.edges.len());
        for e in &raw.edges {
            if e.u == e.v {
                return Err(Error::SelfLoop(e.u));
            }
            let iu = *index.get(&e.u).ok_or(Error::UnknownVertex(e.u))?;
            let iv = *index.get(&e.v).ok_or(Error::UnknownVertex(e.v))?;
            check_weight(|| format!("c of edge {{{}, {}}}", e.u, e.v), e.c)?;
            if !e.alpha.is_finite() {
                return Err(Error::NonFinite {
                    what: format!("alpha of edge {{{}, {}}}", e.u, e.v),
                    value: e.alpha,
                });
            }
            let (u, v, alpha) = if iu < iv {
                (iu, iv, e.alpha)
            } else {
                (iv, iu, -e.alpha)
            };
            oriented.push((Edge { u, v, c: e.c }, angle::normalize(alpha)));
        }
        oriented.sort_by_key(|(e, _)| (e.u, e.v));
        for pair in oriented.windows(2) {
            if pair[0].0.u == pair[1].0.u && pair[0].0.v == pair[1].0.v {
                return Err(Error::DuplicateEdge {
                    u: ids[pair[0].0.u],
                    v: ids[pair[0].0.v],
                });
            }
        }
        let (edges, alpha): (Vec<Edge>, Vec<f64>) = oriented.into_iter().unzip();
        let graph = Self::assemble(ids, omega, index, edges, MagneticPotential(alpha));
        graph.check_connected()?;
        Ok(graph)
    }

    fn assemble(
        ids: Vec<VertexId>,
        omega: Vec<f64>,
        index: HashMap<VertexId, usize>,
        edges: Vec<Edge>,
        alpha: MagneticPotential,
    ) -> Self {
        let mut adjacency = vec![Vec::new(); ids.len()];
        for (k, e) in edges.iter().enumerate() {
            adjacency[e.u].push((e.v, k));
            adjacency[e.v].push((e.u, k));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        WeightedGraph {
            ids,
            omega,
            index,
            edges,
            alpha,
            adjacency,
        }
    }

    fn check_connected(&self) -> Result<()> {
        let reached = self.bfs_order(0);
        if reached.len() < self.vertex_count() {
            let mut seen = vec![false; self.vertex_count()];
            for &x in &reached {
                seen[x] = true;
            }
            let missing = seen.iter().position(|s| !s).expect("some vertex unreached");
            return Err(Error::Disconnected {
                root: self.ids[0],
                unreachable: self.ids[missing],
            });
        }
        Ok(())
    }

    /// Vertex indices in breadth-first order from `root`, neighbors in
    /// ascending id order.
    pub fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.vertex_count()];
        let mut order = Vec::with_capacity(self.vertex_count());
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, _) in &self.adjacency[x] {
                if !seen[y] {
                    seen[y] = true;
                    queue.push_back(y);
                }
            }
        }
        order
    }

    /// Combinatorial (hop count) distances from `root`, truncated at `limit`.
    /// Vertices further than `limit` get `None`.
    pub fn hop_distances(&self, root: usize, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.vertex_count()];
        dist[root] = Some(0);
        let mut queue = VecDeque::from([root]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].expect("queued vertices have a distance");
            if d == limit {
                continue;
            }
            for &(y, _) in &self.adjacency[x] {
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn to_raw(&self) -> RawGraph {
        RawGraph {
            vertices: self
                .ids
                .iter()
                .zip(&self.omega)
                .map(|(&id, &omega)| RawVertex { id, omega })
                .collect(),
            edges: self
                .edges
                .iter()
                .zip(self.alpha.as_slice())
                .map(|(e, &alpha)| RawEdge {
                    u: self.ids[e.u],
                    v: self.ids[e.v],
                    c: e.c,
                    alpha,
                })
                .collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn ids(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn id(&self, x: usize) -> VertexId {
        self.ids[x]
    }

    pub fn index_of(&self, id: VertexId) -> Result<usize> {
        self.index.get(&id).copied().ok_or(Error::UnknownVertex(id))
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.index.contains_key(&id)
    }

    pub fn omega(&self, x: usize) -> f64 {
        self.omega[x]
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omega
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, k: usize) -> &Edge {
        &self.edges[k]
    }

    /// `(neighbor, edge index)` pairs, ascending by neighbor.
    pub fn neighbors(&self, x: usize) -> &[(usize, usize)] {
        &self.adjacency[x]
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adjacency[x].len()
    }

    pub fn edge_between(&self, x: usize, y: usize) -> Option<usize> {
        self.adjacency[x]
            .binary_search_by_key(&y, |&(n, _)| n)
            .ok()
            .map(|pos| self.adjacency[x][pos].1)
    }

    pub fn potential(&self) -> &MagneticPotential {
        &self.alpha
    }

    /// Angle of edge `k` read in the orientation `from → other end`.
    pub fn oriented_angle(alpha: &MagneticPotential, edge: &Edge, k: usize, from: usize) -> f64 {
        if from == edge.u {
            alpha.get(k)
        } else {
            angle::normalize(-alpha.get(k))
        }
    }

    /// α_xy for the potential stored on this graph.
    pub fn alpha(&self, x: VertexId, y: VertexId) -> Result<f64> {
        let ix = self.index_of(x)?;
        let iy = self.index_of(y)?;
        let k = self.edge_between(ix, iy).ok_or(Error::NotAnEdge(x, y))?;
        Ok(Self::oriented_angle(&self.alpha, &self.edges[k], k, ix))
    }

    /// Same graph and weights with a different magnetic potential.
    pub fn with_potential(&self, alpha: MagneticPotential) -> Result<Self> {
        if alpha.len() != self.edge_count() {
            return Err(Error::DimensionMismatch {
                expected: self.edge_count(),
                got: alpha.len(),
            });
        }
        let mut g = self.clone();
        g.alpha = alpha;
        Ok(g)
    }

    /// Same topology and potential with ω ≡ 1 and c ≡ 1.
    pub fn with_unit_weights(&self) -> Self {
        let mut g = self.clone();
        g.omega.iter_mut().for_each(|w| *w = 1.0);
        g.edges.iter_mut().for_each(|e| e.c = 1.0);
        g
    }

    /// Maximum vertex degree N.
    pub fn degree_bound(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Subgraph on the given vertices and edges (indices into `self`),
    /// keeping weights and potential. Fails if the result is disconnected or
    /// an edge leaves the vertex set.
    pub fn subgraph(&self, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let ids: Vec<VertexId> = vertices.iter().map(|&x| self.ids[x]).collect();
        let omega: Vec<f64> = vertices.iter().map(|&x| self.omega[x]).collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let mut sub_edges = Vec::with_capacity(edges.len());
        let mut alpha = Vec::with_capacity(edges.len());
        for &k in edges {
            let e = self.edges[k];
            let (Some(&u), Some(&v)) = (index.get(&self.ids[e.u]), index.get(&self.ids[e.v])) else {
                return Err(Error::NotAnEdge(self.ids[e.u], self.ids[e.v]));
            };
            sub_edges.push(Edge { u, v, c: e.c });
            alpha.push(self.alpha.get(k));
        }
        let g = Self::assemble(ids, omega, index, sub_edges, MagneticPotential(alpha));
        g.check_connected()?;
        Ok(g)
    }

    /// Induced subgraph on a vertex set.
    pub fn induced_subgraph(&self, vertices: &BTreeSet<usize>) -> Result<Self> {
        let edges = self.induced_edges(vertices);
        self.subgraph(vertices, &edges)
    }

    pub fn induced_edges(&self, vertices: &BTreeSet<usize>) -> BTreeSet<usize> {
        vertices
            .iter()
            .flat_map(|&x| {
                self.adjacency[x]
                    .iter()
                    .filter(move |&&(y, _)| y > x && vertices.contains(&y))
                    .map(|&(_, k)| k)
            })
            .collect()
    }
}
