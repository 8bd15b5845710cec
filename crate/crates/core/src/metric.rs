//! The path metric d_p with edge lengths p_xy = min(ω_x, ω_y) / √c_xy,
//! distances to a truncation frontier, and a completeness probe.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::GraphFamily;
use crate::graph::{VertexId, WeightedGraph};

/// Edge lengths p, indexed like the graph's edges.
#[derive(Debug, Clone, PartialEq)]
pub struct PathMetric {
    lengths: Vec<f64>,
}

impl PathMetric {
    pub fn new(graph: &WeightedGraph) -> Self {
        let lengths = graph
            .edges()
            .iter()
            .map(|e| graph.omega(e.u).min(graph.omega(e.v)) / e.c.sqrt())
            .collect();
        PathMetric { lengths }
    }

    pub fn length(&self, edge: usize) -> f64 {
        self.lengths[edge]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    dist: f64,
    id: VertexId,
    index: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Multi-source Dijkstra under the d_p lengths. Ties are settled in
/// ascending vertex-id order.
pub fn shortest_distances(graph: &WeightedGraph, metric: &PathMetric, sources: &[usize]) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.vertex_count()];
    let mut done = vec![false; graph.vertex_count()];
    let mut heap = BinaryHeap::new();
    for &s in sources {
        dist[s] = 0.0;
        heap.push(HeapEntry {
            dist: 0.0,
            id: graph.id(s),
            index: s,
        });
    }
    while let Some(HeapEntry {
        dist: d, index: x, ..
    }) = heap.pop()
    {
        if done[x] {
            continue;
        }
        done[x] = true;
        for &(y, k) in graph.neighbors(x) {
            let nd = d + metric.length(k);
            if nd < dist[y] {
                dist[y] = nd;
                heap.push(HeapEntry {
                    dist: nd,
                    id: graph.id(y),
                    index: y,
                });
            }
        }
    }
    dist
}

pub fn dp_distance(graph: &WeightedGraph, x: VertexId, y: VertexId) -> Result<f64> {
    let ix = graph.index_of(x)?;
    let iy = graph.index_of(y)?;
    let metric = PathMetric::new(graph);
    Ok(shortest_distances(graph, &metric, &[ix])[iy])
}

/// D_R for every vertex: d_p distance to the nearest frontier vertex, or +∞
/// when the frontier is empty.
pub fn frontier_distances(graph: &WeightedGraph, frontier: &BTreeSet<VertexId>) -> Result<Vec<f64>> {
    let sources = frontier
        .iter()
        .map(|&id| graph.index_of(id))
        .collect::<Result<Vec<_>>>()?;
    if sources.is_empty() {
        return Ok(vec![f64::INFINITY; graph.vertex_count()]);
    }
    let metric = PathMetric::new(graph);
    Ok(shortest_distances(graph, &metric, &sources))
}

/// D_R(x). Any path from `x` to infinity crosses the frontier, so this is a
/// lower bound for the distance to the boundary at infinity.
pub fn distance_to_frontier(
    graph: &WeightedGraph,
    frontier: &BTreeSet<VertexId>,
    x: VertexId,
) -> Result<f64> {
    let ix = graph.index_of(x)?;
    Ok(frontier_distances(graph, frontier)?[ix])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub radius: usize,
    /// D_R of the base vertex.
    pub base_distance: f64,
    /// min over the core G_{R/2} of D_R(x).
    pub core_min_distance: f64,
}

/// Tabulates D_R(base) and min over the core of D_R across increasing
/// radii. A bounded D_R(base) suggests the d_p metric is incomplete.
pub fn completeness_probe(family: &GraphFamily, radii: &[usize]) -> Result<Vec<ProbeRow>> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "probe radii must be strictly increasing".into(),
        ));
    }
    radii
        .iter()
        .map(|&radius| {
            let t = family.truncate(radius)?;
            let dist = frontier_distances(&t.graph, &t.frontier)?;
            let base_distance = dist[t.graph.index_of(family.base_vertex())?];
            let core_min_distance = if radius / 2 >= 1 {
                let core = family.truncate(radius / 2)?;
                core.graph
                    .ids()
                    .iter()
                    .map(|&id| t.graph.index_of(id).map(|i| dist[i]))
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .fold(f64::INFINITY, f64::min)
            } else {
                base_distance
            };
            Ok(ProbeRow {
                radius,
                base_distance,
                core_min_distance,
            })
        })
        .collect()
}
