//! Field norms |B| and the Agmon-type localization identity.

use num_complex::Complex64;
use serde::Serialize;

use crate::eigen::{lowest_eigenvalue, SolverOptions, SpectrumResult};
use crate::error::{Error, Result};
use crate::graph::{MagneticPotential, WeightedGraph};
use crate::operator::assemble_operator;

/// Lowest eigenpair of H_{ω,c,α} on the graph's own weights.
pub fn lowest_eigenpair(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    opts: &SolverOptions,
) -> Result<SpectrumResult> {
    lowest_eigenvalue(&assemble_operator(graph, alpha)?, opts)
}

/// |B|: lowest eigenvalue of the operator with ω ≡ 1 and c ≡ 1, the
/// original weights discarded. Rounding below zero is clamped.
pub fn field_norm_with(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    opts: &SolverOptions,
) -> Result<f64> {
    let unit = graph.with_unit_weights();
    Ok(lowest_eigenpair(&unit, alpha, opts)?.lambda_min.max(0.0))
}

pub fn field_norm(graph: &WeightedGraph, alpha: &MagneticPotential) -> Result<f64> {
    field_norm_with(graph, alpha, &SolverOptions::default())
}

/// |1 − e^{iδ/N}|² for the N-cycle with holonomy Ω, δ = min_k |Ω − 2πk|.
pub fn cyclic_field_norm_closed_form(n: usize, holonomy: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!(
            "cycle length must be at least 3, got {n}"
        )));
    }
    let delta = crate::angle::normalize(holonomy).abs();
    // |1 − e^{iθ}|² = 4 sin²(θ/2)
    Ok(4.0 * (delta / (2.0 * n as f64)).sin().powi(2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AgmonCheck {
    /// ⟨fv, (H − λ)(fv)⟩ in l²_ω.
    pub lhs: f64,
    /// ½ Σ_x Σ_{y∼x} Re[v(x) conj(v(y)) C_yx] (f(x) − f(y))².
    pub rhs: f64,
    /// ‖(H − λ)v‖_ω.
    pub residual: f64,
}

impl AgmonCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }

    /// |lhs − rhs| ≤ 1e−9 · max(1, |lhs|).
    pub fn holds(&self) -> bool {
        self.discrepancy() <= 1e-9 * self.lhs.abs().max(1.0)
    }
}

/// Relative residual accepted for the hypothesis (H − λ)v = 0.
pub const SOLUTION_TOLERANCE: f64 = 1e-10;

/// Evaluates both sides of the localization identity for a solution `v` of
/// (H − λ)v = 0 and a real cutoff `f`. The diagonal shift by λ does not
/// change the right-hand side, which only sees off-diagonal couplings.
pub fn agmon_identity_check(
    graph: &WeightedGraph,
    alpha: &MagneticPotential,
    lambda: f64,
    v: &[Complex64],
    f: &[f64],
) -> Result<AgmonCheck> {
    let n = graph.vertex_count();
    for len in [v.len(), f.len()] {
        if len != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: len,
            });
        }
    }
    let op = assemble_operator(graph, alpha)?;
    let shifted = |u: &[Complex64]| -> Vec<Complex64> {
        op.apply(u)
            .into_iter()
            .zip(u)
            .map(|(hu, x)| hu - x * lambda)
            .collect()
    };
    let residual = op.norm(&shifted(v));
    let tolerance = SOLUTION_TOLERANCE * op.norm(v).max(1.0);
    if residual > tolerance {
        return Err(Error::NotASolution { residual, tolerance });
    }
    let fv: Vec<Complex64> = v.iter().zip(f).map(|(a, b)| a * b).collect();
    let lhs = op.inner(&fv, &shifted(&fv)).re;

    let mut rhs = 0.0;
    for x in 0..n {
        for &(y, k) in graph.neighbors(x) {
            let e = graph.edge(k);
            let a_yx = WeightedGraph::oriented_angle(alpha, e, k, y);
            let c_yx = Complex64::from_polar(e.c, a_yx);
            let df = f[x] - f[y];
            rhs += (v[x] * v[y].conj() * c_yx).re * df * df;
        }
    }
    Ok(AgmonCheck {
        lhs,
        rhs: 0.5 * rhs,
        residual,
    })
}
