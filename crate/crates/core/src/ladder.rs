//! The weighted infinite ladder N × {−1, +1} with conductances C_l = l^a,
//! vertex weights w_l = l^{−b} and a constant flux through every square.
//!
//! Rung indices start at l = 1 so that every conductance is positive. A
//! truncation at radius R keeps rungs 1..=R+1; the last rung is the
//! frontier. Vertex ids are `2·(l − 1)` on the lower rail and `2·(l − 1) + 1`
//! on the upper rail.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use serde::Serialize;

use crate::covering::{GoodCovering, Subgraph};
use crate::cycles::Cycle;
use crate::error::{Error, Result};
use crate::family::{GraphFamily, Truncation};
use crate::field::cyclic_field_norm_closed_form;
use crate::graph::{RawGraph, VertexId, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderParams {
    /// Conductance exponent: C_l = l^a.
    pub a: f64,
    /// Weight exponent: w_l = l^{−b}.
    pub b: f64,
    /// Holonomy of every square.
    pub flux: f64,
}

impl LadderParams {
    pub fn new(a: f64, b: f64, flux: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("flux", flux)] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("ladder {name} must be finite")));
            }
        }
        if a < 0.0 || b < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "ladder exponents must be nonnegative, got a = {a}, b = {b}"
            )));
        }
        Ok(LadderParams { a, b, flux })
    }

    pub fn with_half_flux(a: f64, b: f64) -> Result<Self> {
        Self::new(a, b, PI)
    }

    /// C_l = l^a.
    pub fn conductance(&self, l: usize) -> f64 {
        (l as f64).powf(self.a)
    }

    /// w_l = l^{−b}.
    pub fn weight(&self, l: usize) -> f64 {
        (l as f64).powf(-self.b)
    }

    /// d_p length of the rail edge between rungs l and l + 1.
    pub fn rail_length(&self, l: usize) -> f64 {
        self.weight(l).min(self.weight(l + 1)) / self.conductance(l).sqrt()
    }

    /// Field norm of one square.
    pub fn square_norm(&self) -> f64 {
        cyclic_field_norm_closed_form(4, self.flux).expect("a square has four vertices")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rail {
    Lower,
    Upper,
}

/// Id of the vertex on rung `l` (1-based).
pub fn ladder_vertex(l: usize, rail: Rail) -> VertexId {
    let base = 2 * (l as u64 - 1);
    VertexId(match rail {
        Rail::Lower => base,
        Rail::Upper => base + 1,
    })
}

/// Rungs 1..=R+1. The flux sits on the upper rail edges, so every square
/// [(l,+1), (l+1,+1), (l+1,−1), (l,−1)] has holonomy `flux`, and the
/// potential of a vertex pair does not depend on R.
pub fn ladder_graph(p: &LadderParams, radius: usize) -> Result<WeightedGraph> {
    let rungs = radius + 1;
    let mut raw = RawGraph::default();
    for l in 1..=rungs {
        for rail in [Rail::Lower, Rail::Upper] {
            raw = raw.vertex(ladder_vertex(l, rail).0, p.weight(l));
        }
        raw = raw.edge(
            ladder_vertex(l, Rail::Lower).0,
            ladder_vertex(l, Rail::Upper).0,
            p.conductance(l),
            0.0,
        );
        if l < rungs {
            raw = raw
                .edge(
                    ladder_vertex(l, Rail::Upper).0,
                    ladder_vertex(l + 1, Rail::Upper).0,
                    p.conductance(l),
                    p.flux,
                )
                .edge(
                    ladder_vertex(l, Rail::Lower).0,
                    ladder_vertex(l + 1, Rail::Lower).0,
                    p.conductance(l),
                    0.0,
                );
        }
    }
    raw.build()
}

/// The square between rungs l and l + 1, oriented as
/// (l,+1) → (l+1,+1) → (l+1,−1) → (l,−1).
pub fn square_cycle(l: usize) -> Cycle {
    Cycle::new(vec![
        ladder_vertex(l, Rail::Upper),
        ladder_vertex(l + 1, Rail::Upper),
        ladder_vertex(l + 1, Rail::Lower),
        ladder_vertex(l, Rail::Lower),
    ])
    .expect("four vertices")
}

/// Covering of a ladder truncation by its squares; every rail edge lies in
/// one square and every inner rung edge in two, so m = 2.
pub fn square_covering(graph: &WeightedGraph) -> Result<GoodCovering> {
    let rungs = graph.vertex_count() / 2;
    if rungs < 2 || !graph.vertex_count().is_multiple_of(2) {
        return Err(Error::InvalidParameter(
            "square covering needs a ladder with at least two rungs".into(),
        ));
    }
    let squares = (1..rungs)
        .map(|l| {
            let vs = [
                ladder_vertex(l, Rail::Lower),
                ladder_vertex(l, Rail::Upper),
                ladder_vertex(l + 1, Rail::Lower),
                ladder_vertex(l + 1, Rail::Upper),
            ]
            .iter()
            .map(|&id| graph.index_of(id))
            .collect::<Result<BTreeSet<_>>>()?;
            Ok(Subgraph::induced(graph, &vs))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GoodCovering::user(2, squares))
}

pub fn ladder_family(p: LadderParams) -> GraphFamily {
    GraphFamily::new("ladder", ladder_vertex(1, Rail::Lower), move |radius| {
        Ok(Truncation {
            radius,
            graph: ladder_graph(&p, radius)?,
            frontier: BTreeSet::from([
                ladder_vertex(radius + 1, Rail::Lower),
                ladder_vertex(radius + 1, Rail::Upper),
            ]),
        })
    })
    .with_degree_bound(3)
    .with_covering(square_covering)
    .with_completeness(p.a + p.b / 2.0 <= 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum LadderRegime {
    /// a + b/2 ≤ 1: the d_p metric is complete.
    Complete,
    /// 0 < b < 1 and a + b/2 > 1: incomplete, but the criterion applies.
    EsaByCriterion,
    /// Incomplete and outside the criterion's range.
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LadderClosedForms {
    pub l: usize,
    pub radius: usize,
    /// p between rungs l and l + 1: w_{l+1}/√C_l.
    pub rail_length: f64,
    /// Σ_{m=l}^{R} w_{m+1}/√C_m, the rail distance to the frontier rung.
    pub tail_sum: f64,
    /// ½|B_square| C_l, the simplified lower bound (1 − √2/2) C_l at flux π.
    pub w_simplified: f64,
    /// Eq. (QW) evaluated on the square covering.
    pub w_literal: f64,
    pub regime: LadderRegime,
    /// a > 2: the field-free operator is known not to be essentially
    /// self-adjoint. Reported, never computed.
    pub known_not_esa_if_b0: bool,
}

pub fn classify(p: &LadderParams) -> LadderRegime {
    if p.a + p.b / 2.0 <= 1.0 {
        LadderRegime::Complete
    } else if p.b > 0.0 && p.b < 1.0 {
        LadderRegime::EsaByCriterion
    } else {
        LadderRegime::Undetermined
    }
}

pub fn ladder_closed_forms(p: &LadderParams, l: usize, radius: usize) -> Result<LadderClosedForms> {
    if l == 0 || l > radius + 1 {
        return Err(Error::InvalidParameter(format!(
            "rung {l} outside 1..={} for radius {radius}",
            radius + 1
        )));
    }
    let square = p.square_norm();
    let w_literal = if radius == 0 {
        0.0
    } else if l == 1 {
        0.5 * square * p.conductance(1)
    } else if l == radius + 1 {
        0.5 * square * p.conductance(radius)
    } else {
        0.5 * square * (p.conductance(l - 1) + p.conductance(l))
    };
    Ok(LadderClosedForms {
        l,
        radius,
        rail_length: p.weight(l + 1) / p.conductance(l).sqrt(),
        tail_sum: (l..=radius)
            .map(|m| p.weight(m + 1) / p.conductance(m).sqrt())
            .sum(),
        w_simplified: 0.5 * square * p.conductance(l),
        w_literal,
        regime: classify(p),
        known_not_esa_if_b0: p.a > 2.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::covering::{restricted_field_norm, validate_covering};
    use crate::cycles::{cycle_basis, default_tree, holonomy};

    fn params() -> LadderParams {
        LadderParams::with_half_flux(1.5, 0.5).unwrap()
    }

    #[test]
    fn truncation_sizes() {
        let fam = ladder_family(params());
        let t = fam.truncate(2).unwrap();
        assert_eq!(t.graph.vertex_count(), 6);
        assert_eq!(t.graph.edge_count(), 7);
        assert_eq!(
            t.frontier,
            BTreeSet::from([ladder_vertex(3, Rail::Lower), ladder_vertex(3, Rail::Upper)])
        );
        let t1 = fam.truncate(1).unwrap();
        assert_eq!(t1.graph.vertex_count(), 4);
        assert_eq!(t1.graph.edge_count(), 4);
        assert_eq!(cycle_basis(&t1.graph, &default_tree(&t1.graph)).unwrap().len(), 1);
        assert_eq!(t.graph.degree_bound(), 3);
    }

    #[test]
    fn truncations_are_nested_and_deterministic() {
        let fam = ladder_family(params());
        let small = fam.truncate(2).unwrap().graph;
        let big = fam.truncate(3).unwrap().graph;
        let again = fam.truncate(3).unwrap().graph;
        assert_eq!(big.to_raw(), again.to_raw());
        let inside: BTreeSet<usize> = small.ids().iter().map(|&id| big.index_of(id).unwrap()).collect();
        assert_eq!(big.induced_subgraph(&inside).unwrap().to_raw(), small.to_raw());
    }

    #[test]
    fn every_square_has_the_flux() {
        let p = params();
        let g = ladder_graph(&p, 10).unwrap();
        for l in 1..=10 {
            let h = holonomy(&g, g.potential(), &square_cycle(l)).unwrap();
            assert!(crate::angle::approx_eq(h, PI, 1e-12));
        }
        let cover = square_covering(&g).unwrap();
        let d = validate_covering(&g, &cover);
        assert!(d.is_good);
        assert_eq!(d.empirical_max_multiplicity, 2);
        for sq in &cover.subgraphs {
            let b = restricted_field_norm(&g, g.potential(), sq).unwrap();
            assert!((b - (2.0 - 2f64.sqrt())).abs() < 1e-10);
        }
    }

    #[test]
    fn regimes() {
        let r = |a, b| classify(&LadderParams::with_half_flux(a, b).unwrap());
        assert_eq!(r(1.5, 0.5), LadderRegime::EsaByCriterion);
        assert_eq!(r(0.5, 0.5), LadderRegime::Complete);
        let f = ladder_closed_forms(&LadderParams::with_half_flux(3.0, 0.5).unwrap(), 1, 5).unwrap();
        assert!(f.known_not_esa_if_b0);
        assert!(!ladder_closed_forms(&params(), 1, 5).unwrap().known_not_esa_if_b0);
    }

    #[test]
    fn closed_form_values() {
        let p = params();
        let f = ladder_closed_forms(&p, 4, 10).unwrap();
        assert!((f.rail_length - 5f64.powf(-0.5) / 4f64.powf(0.75)).abs() < 1e-15);
        assert!((f.w_simplified - (1.0 - 2f64.sqrt() / 2.0) * 8.0).abs() < 1e-12);
        assert!(f.w_literal >= f.w_simplified);
        assert!(ladder_closed_forms(&p, 0, 10).is_err());
        assert_eq!(ladder_closed_forms(&p, 11, 10).unwrap().tail_sum, 0.0);
    }

    #[test]
    fn parameters_are_validated() {
        assert!(LadderParams::new(-1.0, 0.5, PI).is_err());
        assert!(LadderParams::new(1.0, f64::NAN, PI).is_err());
    }
}
