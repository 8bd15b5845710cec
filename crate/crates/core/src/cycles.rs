//! Spanning trees, fundamental cycle bases and holonomy.
//!
//! Cycle-space identities are never computed symbolically. Two integer
//! combinations of cycles are taken to be equal in Z_1(G) when their
//! holonomies agree for a fixed batch of random potentials, see
//! [`combinations_agree`].

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::angle::{self, ANGLE_TOL};
use crate::error::{Error, Result};
use crate::graph::{MagneticPotential, VertexId, WeightedGraph};

/// Closed walk `x_0 → x_1 → … → x_{n−1} → x_0`, stored as its vertex
/// sequence without repeating `x_0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct Cycle(Vec<VertexId>);

impl Cycle {
    pub fn new(vertices: Vec<VertexId>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidCycle(format!(
                "a cycle needs at least two vertices, got {}",
                vertices.len()
            )));
        }
        Ok(Cycle(vertices))
    }

    pub fn from_ids(ids: &[u64]) -> Result<Self> {
        Self::new(ids.iter().copied().map(VertexId).collect())
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Oriented steps `[x_i, x_{i+1}]`, closing back to `x_0`.
    pub fn steps(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        let n = self.0.len();
        (0..n).map(move |i| (self.0[i], self.0[(i + 1) % n]))
    }

    pub fn reversed(&self) -> Self {
        let mut v = self.0.clone();
        v.reverse();
        Cycle(v)
    }

    /// Resolves each step to `(edge index, traversed along canonical
    /// orientation)`.
    pub fn resolve(&self, graph: &WeightedGraph) -> Result<Vec<(usize, bool)>> {
        self.steps()
            .map(|(x, y)| {
                let ix = graph.index_of(x)?;
                let iy = graph.index_of(y)?;
                let k = graph.edge_between(ix, iy).ok_or(Error::NotAnEdge(x, y))?;
                Ok((k, graph.edge(k).u == ix))
            })
            .collect()
    }
}

/// Sum of the potential along resolved steps, not reduced mod 2π.
fn raw_holonomy(alpha: &[f64], steps: &[(usize, bool)]) -> f64 {
    steps
        .iter()
        .map(|&(k, forward)| if forward { alpha[k] } else { -alpha[k] })
        .sum()
}

/// Hol_α(γ) in (−π, π].
pub fn holonomy(graph: &WeightedGraph, alpha: &MagneticPotential, cycle: &Cycle) -> Result<f64> {
    check_potential(graph, alpha)?;
    let steps = cycle.resolve(graph)?;
    Ok(angle::normalize(raw_holonomy(alpha.as_slice(), &steps)))
}

fn check_potential(graph: &WeightedGraph, alpha: &MagneticPotential) -> Result<()> {
    if alpha.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.edge_count(),
            got: alpha.len(),
        });
    }
    Ok(())
}

/// Breadth-first spanning tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanningTree {
    root: usize,
    // (parent vertex, edge to parent)
    parent: Vec<Option<(usize, usize)>>,
    depth: Vec<usize>,
    // vertices in the order they were attached
    order: Vec<usize>,
    is_tree_edge: Vec<bool>,
}

impl SpanningTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, x: usize) -> Option<(usize, usize)> {
        self.parent[x]
    }

    pub fn is_tree_edge(&self, edge: usize) -> bool {
        self.is_tree_edge[edge]
    }

    /// Tree edge indices, ascending.
    pub fn edges(&self) -> Vec<usize> {
        (0..self.is_tree_edge.len())
            .filter(|&k| self.is_tree_edge[k])
            .collect()
    }

    pub fn non_tree_edges(&self) -> Vec<usize> {
        (0..self.is_tree_edge.len())
            .filter(|&k| !self.is_tree_edge[k])
            .collect()
    }

    /// Vertices from the root outward; every vertex follows its parent.
    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Builds a tree from an explicit edge list, checking that it spans the
    /// graph without cycles.
    pub fn from_edges(graph: &WeightedGraph, root: VertexId, edges: &[(VertexId, VertexId)]) -> Result<Self> {
        let root = graph.index_of(root)?;
        let n = graph.vertex_count();
        if edges.len() + 1 != n {
            return Err(Error::InvalidTree(format!(
                "{} edges cannot span {} vertices",
                edges.len(),
                n
            )));
        }
        let mut is_tree_edge = vec![false; graph.edge_count()];
        for &(x, y) in edges {
            let ix = graph.index_of(x)?;
            let iy = graph.index_of(y)?;
            let k = graph.edge_between(ix, iy).ok_or(Error::NotAnEdge(x, y))?;
            if is_tree_edge[k] {
                return Err(Error::InvalidTree(format!("edge {{{x}, {y}}} listed twice")));
            }
            is_tree_edge[k] = true;
        }
        let tree = Self::grow(graph, root, |k| is_tree_edge[k]);
        if tree.order.len() != n {
            return Err(Error::InvalidTree(
                "edge set does not connect every vertex".into(),
            ));
        }
        Ok(tree)
    }

    fn grow(graph: &WeightedGraph, root: usize, allowed: impl Fn(usize) -> bool) -> Self {
        let n = graph.vertex_count();
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        let mut is_tree_edge = vec![false; graph.edge_count()];
        let mut order = Vec::with_capacity(n);
        let mut queue = std::collections::VecDeque::from([root]);
        seen[root] = true;
        while let Some(x) = queue.pop_front() {
            order.push(x);
            for &(y, k) in graph.neighbors(x) {
                if !seen[y] && allowed(k) {
                    seen[y] = true;
                    parent[y] = Some((x, k));
                    depth[y] = depth[x] + 1;
                    is_tree_edge[k] = true;
                    queue.push_back(y);
                }
            }
        }
        SpanningTree {
            root,
            parent,
            depth,
            order,
            is_tree_edge,
        }
    }

    /// Vertex sequence of the tree path from `from` to `to`.
    pub fn path(&self, from: usize, to: usize) -> Vec<usize> {
        let mut a = from;
        let mut b = to;
        let mut head = vec![a];
        let mut tail = vec![b];
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].expect("non-root has a parent").0;
            head.push(a);
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].expect("non-root has a parent").0;
            tail.push(b);
        }
        while a != b {
            a = self.parent[a].expect("non-root has a parent").0;
            b = self.parent[b].expect("non-root has a parent").0;
            head.push(a);
            tail.push(b);
        }
        tail.pop();
        head.extend(tail.into_iter().rev());
        head
    }
}

/// BFS tree from `root`, neighbors visited in ascending id order.
pub fn spanning_tree(graph: &WeightedGraph, root: VertexId) -> Result<SpanningTree> {
    let root = graph.index_of(root)?;
    Ok(SpanningTree::grow(graph, root, |_| true))
}

/// BFS tree rooted at the smallest vertex id.
pub fn default_tree(graph: &WeightedGraph) -> SpanningTree {
    SpanningTree::grow(graph, 0, |_| true)
}

/// Fundamental cycle of one non-tree edge.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BasisCycle {
    /// Index of the non-tree edge.
    #[serde(skip)]
    pub edge: usize,
    /// The non-tree edge in its canonical orientation, `from < to`.
    pub from: VertexId,
    pub to: VertexId,
    /// `[from, to]` followed by the tree path back to `from`.
    pub cycle: Cycle,
    #[serde(skip)]
    steps: Vec<(usize, bool)>,
}

impl BasisCycle {
    pub fn key(&self) -> (VertexId, VertexId) {
        (self.from, self.to)
    }

    pub fn holonomy(&self, alpha: &MagneticPotential) -> f64 {
        angle::normalize(raw_holonomy(alpha.as_slice(), &self.steps))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CycleBasis {
    pub tree: SpanningTree,
    pub cycles: Vec<BasisCycle>,
}

impl CycleBasis {
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Holonomy of every basis cycle, in basis order.
    pub fn holonomies(&self, alpha: &MagneticPotential) -> Vec<f64> {
        self.cycles.iter().map(|c| c.holonomy(alpha)).collect()
    }

    /// Holonomies keyed by the non-tree edge.
    pub fn holonomy_map(&self, alpha: &MagneticPotential) -> BTreeMap<(VertexId, VertexId), f64> {
        self.cycles.iter().map(|c| (c.key(), c.holonomy(alpha))).collect()
    }
}

/// One fundamental cycle γ_xy = [x, y] + (tree path y → x) per non-tree edge.
pub fn cycle_basis(graph: &WeightedGraph, tree: &SpanningTree) -> Result<CycleBasis> {
    if tree.is_tree_edge.len() != graph.edge_count() || tree.order.len() != graph.vertex_count() {
        return Err(Error::InvalidTree("tree does not belong to this graph".into()));
    }
    for (x, p) in tree.parent.iter().enumerate() {
        if let Some((px, k)) = *p {
            let e = graph.edge(k);
            if !((e.u == x && e.v == px) || (e.v == x && e.u == px)) {
                return Err(Error::InvalidTree(format!(
                    "parent edge of vertex {} does not join it to its parent",
                    graph.id(x)
                )));
            }
        }
    }
    let mut cycles = Vec::new();
    for k in tree.non_tree_edges() {
        let e = graph.edge(k);
        let mut walk = vec![e.u];
        walk.extend(tree.path(e.v, e.u));
        walk.pop();
        let cycle = Cycle(walk.iter().map(|&x| graph.id(x)).collect());
        let steps = cycle.resolve(graph)?;
        cycles.push(BasisCycle {
            edge: k,
            from: graph.id(e.u),
            to: graph.id(e.v),
            cycle,
            steps,
        });
    }
    Ok(CycleBasis {
        tree: tree.clone(),
        cycles,
    })
}

/// Potential that vanishes on tree edges and puts the target holonomy of
/// each basis cycle on its non-tree edge. Targets may be keyed by either
/// orientation of the non-tree edge.
pub fn potential_from_holonomy(
    graph: &WeightedGraph,
    basis: &CycleBasis,
    targets: &BTreeMap<(VertexId, VertexId), f64>,
) -> Result<MagneticPotential> {
    let mut alpha = vec![0.0; graph.edge_count()];
    for c in &basis.cycles {
        let target = match targets.get(&(c.from, c.to)) {
            Some(&t) => t,
            None => match targets.get(&(c.to, c.from)) {
                Some(&t) => -t,
                None => return Err(Error::MissingTarget(c.from, c.to)),
            },
        };
        alpha[c.edge] = target;
    }
    Ok(MagneticPotential::from_angles(alpha))
}

/// Phases σ_x of a gauge transform (Uf)(x) = e^{iσ_x} f(x), indexed like the
/// graph's vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeFunction {
    pub sigma: Vec<f64>,
}

impl GaugeFunction {
    pub fn identity(vertex_count: usize) -> Self {
        GaugeFunction {
            sigma: vec![0.0; vertex_count],
        }
    }

    pub fn random(vertex_count: usize, rng: &mut impl Rng) -> Self {
        GaugeFunction {
            sigma: (0..vertex_count)
                .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                .collect(),
        }
    }
}

/// α′_xy = α_xy + σ_y − σ_x.
pub fn apply_gauge(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    gauge: &GaugeFunction,
) -> Result<MagneticPotential> {
    check_potential(graph, alpha)?;
    if gauge.sigma.len() != graph.vertex_count() {
        return Err(Error::DimensionMismatch {
            expected: graph.vertex_count(),
            got: gauge.sigma.len(),
        });
    }
    Ok(MagneticPotential::from_angles(
        graph
            .edges()
            .iter()
            .zip(alpha.as_slice())
            .map(|(e, &a)| a + gauge.sigma[e.v] - gauge.sigma[e.u])
            .collect(),
    ))
}

/// Gauge that zeroes α on the default BFS tree. The reduced potential
/// carries, on each non-tree edge, the holonomy of its fundamental cycle.
pub fn gauge_reduce(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
) -> Result<(GaugeFunction, MagneticPotential)> {
    check_potential(graph, alpha)?;
    let tree = default_tree(graph);
    let mut sigma = vec![0.0; graph.vertex_count()];
    for &y in tree.order().iter().skip(1) {
        let (x, k) = tree.parent(y).expect("non-root vertex has a parent");
        // α′_xy = α_xy + σ_y − σ_x = 0
        let a_xy = WeightedGraph::oriented_angle(alpha, graph.edge(k), k, x);
        sigma[y] = sigma[x] - a_xy;
    }
    let gauge = GaugeFunction { sigma };
    let reduced = apply_gauge(graph, alpha, &gauge)?;
    Ok((gauge, reduced))
}

/// Whether two potentials have the same holonomy on every basis cycle, i.e.
/// whether they differ by a gauge transform.
pub fn same_holonomy(
    graph: &WeightedGraph,
    alpha1: &MagneticPotential,
    alpha2: &MagneticPotential,
) -> Result<bool> {
    check_potential(graph, alpha1)?;
    check_potential(graph, alpha2)?;
    let basis = cycle_basis(graph, &default_tree(graph))?;
    Ok(basis
        .cycles
        .iter()
        .all(|c| angle::approx_eq(c.holonomy(alpha1), c.holonomy(alpha2), ANGLE_TOL)))
}

/// An integer multiple of a resolved cycle.
type WeightedSteps = (i64, Vec<(usize, bool)>);

/// Number of random potentials used by [`combinations_agree`].
pub const IDENTITY_TRIALS: usize = 32;

/// Probabilistic test that Σ n_i γ_i = Σ m_j δ_j in Z_1(G): the holonomies
/// of both sides must agree mod 2π for [`IDENTITY_TRIALS`] random potentials
/// drawn from a fixed seed.
pub fn combinations_agree(
    graph: &WeightedGraph,
    lhs: &[(i64, &Cycle)],
    rhs: &[(i64, &Cycle)],
    seed: u64,
) -> Result<bool> {
    let resolve = |side: &[(i64, &Cycle)]| -> Result<Vec<WeightedSteps>> {
        side.iter().map(|&(n, c)| Ok((n, c.resolve(graph)?))).collect()
    };
    let lhs = resolve(lhs)?;
    let rhs = resolve(rhs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..IDENTITY_TRIALS {
        let alpha: Vec<f64> = (0..graph.edge_count())
            .map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            .collect();
        let total = |side: &[WeightedSteps]| -> f64 {
            side.iter()
                .map(|(n, steps)| *n as f64 * raw_holonomy(&alpha, steps))
                .sum()
        };
        if !angle::approx_eq(total(&lhs), total(&rhs), 1e-9) {
            return Ok(false);
        }
    }
    Ok(true)
}
