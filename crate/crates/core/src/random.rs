//! Seeded random graphs and vectors for fuzzing and property checks.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rand::Rng;

use crate::graph::{RawGraph, WeightedGraph};

#[derive(Debug, Clone)]
pub struct GraphSpec {
    pub vertices: Range<usize>,
    /// Extra edges attempted on top of the random spanning tree, as a
    /// multiple of the vertex count.
    pub density: f64,
    pub c: Range<f64>,
    pub omega: Range<f64>,
    pub max_degree: Option<usize>,
    pub random_potential: bool,
}

impl Default for GraphSpec {
    fn default() -> Self {
        GraphSpec {
            vertices: 2..41,
            density: 0.8,
            c: 0.1..10.0,
            omega: 0.1..10.0,
            max_degree: None,
            random_potential: true,
        }
    }
}

/// Random connected graph: a random tree plus random chords, honoring the
/// degree cap when one is given (a cap below 2 is raised to 2).
pub fn random_connected_graph(rng: &mut impl Rng, spec: &GraphSpec) -> WeightedGraph {
    let n = rng.gen_range(spec.vertices.clone());
    let cap = spec.max_degree.map(|d| d.max(2)).unwrap_or(usize::MAX);
    let mut degree = vec![0usize; n];
    let mut pairs = BTreeSet::new();
    for i in 1..n {
        let open: Vec<usize> = (0..i).filter(|&j| degree[j] < cap).collect();
        let j = open[rng.gen_range(0..open.len())];
        degree[i] += 1;
        degree[j] += 1;
        pairs.insert((j, i));
    }
    let attempts = (spec.density * n as f64).round() as usize;
    for _ in 0..attempts {
        if n < 3 {
            break;
        }
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        let (a, b) = (a.min(b), a.max(b));
        if a == b || degree[a] >= cap || degree[b] >= cap || pairs.contains(&(a, b)) {
            continue;
        }
        degree[a] += 1;
        degree[b] += 1;
        pairs.insert((a, b));
    }
    let mut raw = RawGraph::default();
    for i in 0..n {
        raw = raw.vertex(i as u64, rng.gen_range(spec.omega.clone()));
    }
    for (a, b) in pairs {
        let alpha = if spec.random_potential {
            rng.gen_range(-PI..PI)
        } else {
            0.0
        };
        raw = raw.edge(a as u64, b as u64, rng.gen_range(spec.c.clone()), alpha);
    }
    raw.build().expect("generated graph is valid")
}

pub fn random_vector(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect()
}

pub fn random_real_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}
