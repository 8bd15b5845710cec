//! The effective potential
//!
//! ```text
//! W(x) = (1/m) Σ_{l : x ∈ V_l} |B_l| · min_{{y,z} ∈ E_l} c_yz
//! ```
//!
//! built from a good covering of degree m, and the lower bound it gives on
//! the magnetic Dirichlet form.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::covering::{restricted_norm_on, validate_covering, GoodCovering};
use crate::eigen::SolverOptions;
use crate::error::{Error, Result};
use crate::graph::{MagneticPotential, VertexId, WeightedGraph};
use crate::operator::quadratic_form;

/// Contribution of one covering subgraph to W at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoveringTerm {
    pub subgraph: usize,
    pub field_norm: f64,
    /// min of c over the subgraph's edges; 0 when it has none.
    pub min_conductance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectivePotential {
    pub ids: Vec<VertexId>,
    pub values: Vec<f64>,
    pub breakdown: Vec<Vec<CoveringTerm>>,
    /// The covering degree m used in the formula.
    pub declared_degree: usize,
    pub empirical_max_multiplicity: usize,
}

impl EffectivePotential {
    pub fn at(&self, x: usize) -> f64 {
        self.values[x]
    }

    /// Number of covering subgraphs containing vertex `x`.
    pub fn ball_count(&self, x: usize) -> usize {
        self.breakdown[x].len()
    }
}

/// W for a validated covering, using its declared degree. Subgraph norms
/// are computed in parallel and reduced in subgraph order.
pub fn effective_potential_with(
    graph: &WeightedGraph,
    cover: &GoodCovering,
    alpha: &MagneticPotential,
    opts: &SolverOptions,
) -> Result<EffectivePotential> {
    let diagnostics = validate_covering(graph, cover);
    if !diagnostics.is_good {
        return Err(Error::InvalidCovering(format!(
            "{} uncovered vertices, {} uncovered edges, {} over-covered edges, {} disconnected and {} invalid subgraphs",
            diagnostics.uncovered_vertices.len(),
            diagnostics.uncovered_edges.len(),
            diagnostics.overcovered_edges.len(),
            diagnostics.disconnected_subgraphs.len(),
            diagnostics.invalid_subgraphs.len()
        )));
    }
    let graph = graph.with_potential(alpha.clone())?;
    let terms = cover
        .subgraphs
        .par_iter()
        .enumerate()
        .map(|(l, sub)| {
            let (norm, vs, es) = restricted_norm_on(&graph, sub, l, opts)?;
            let min_c = es
                .iter()
                .map(|&k| graph.edge(k).c)
                .reduce(f64::min)
                .unwrap_or(0.0);
            Ok((norm, min_c, vs))
        })
        .collect::<Result<Vec<_>>>()?;

    let m = cover.degree as f64;
    let mut breakdown = vec![Vec::new(); graph.vertex_count()];
    for (l, (norm, min_c, vs)) in terms.into_iter().enumerate() {
        for x in vs {
            breakdown[x].push(CoveringTerm {
                subgraph: l,
                field_norm: norm,
                min_conductance: min_c,
            });
        }
    }
    let values = breakdown
        .iter()
        .map(|terms| {
            terms
                .iter()
                .map(|t| t.field_norm * t.min_conductance)
                .sum::<f64>()
                / m
        })
        .collect();
    Ok(EffectivePotential {
        ids: graph.ids().to_vec(),
        values,
        breakdown,
        declared_degree: cover.degree,
        empirical_max_multiplicity: diagnostics.empirical_max_multiplicity,
    })
}

pub fn effective_potential(
    graph: &WeightedGraph,
    cover: &GoodCovering,
    alpha: &MagneticPotential,
) -> Result<EffectivePotential> {
    effective_potential_with(graph, cover, alpha, &SolverOptions::default())
}

fn check_dims(graph: &WeightedGraph, w: &EffectivePotential, f: &[Complex64]) -> Result<()> {
    for len in [w.values.len(), f.len()] {
        if len != graph.vertex_count() {
            return Err(Error::DimensionMismatch {
                expected: graph.vertex_count(),
                got: len,
            });
        }
    }
    Ok(())
}

/// Q_{c,A}(f) − Σ_x W(x) ω_x² |f(x)|².
///
/// W is assembled from unit-weight field norms, so the bound it certifies
/// is Q(f) ≥ Σ W(x) |f(x)|². The ω²-weighted form follows from it only
/// where ω ≤ 1; [`flat_dirichlet_bound_check`] is the version that holds for
/// every ω.
pub fn dirichlet_bound_check(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    w: &EffectivePotential,
    f: &[Complex64],
) -> Result<f64> {
    check_dims(graph, w, f)?;
    let q = quadratic_form(graph, alpha, f)?;
    let bound: f64 = (0..graph.vertex_count())
        .map(|x| w.values[x] * graph.omega(x).powi(2) * f[x].norm_sqr())
        .sum();
    Ok(q - bound)
}

/// Q_{c,A}(f) − Σ_x W(x) |f(x)|².
pub fn flat_dirichlet_bound_check(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    w: &EffectivePotential,
    f: &[Complex64],
) -> Result<f64> {
    check_dims(graph, w, f)?;
    let q = quadratic_form(graph, alpha, f)?;
    let bound: f64 = (0..graph.vertex_count())
        .map(|x| w.values[x] * f[x].norm_sqr())
        .sum();
    Ok(q - bound)
}
