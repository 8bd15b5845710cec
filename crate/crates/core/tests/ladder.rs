use std::collections::BTreeSet;
use std::f64::consts::PI;

use magspec::cycles::{
    combinations_agree, cycle_basis, default_tree, potential_from_holonomy, same_holonomy,
};
use magspec::eigen::SolverOptions;
use magspec::esa::{criterion_check, CoveringChoice, Verdict};
use magspec::graph::VertexId;
use magspec::ladder::{
    ladder_closed_forms, ladder_family, ladder_graph, ladder_vertex, square_cycle, LadderParams, Rail,
};
use magspec::metric::{completeness_probe, frontier_distances, shortest_distances, PathMetric};

fn params() -> LadderParams {
    LadderParams::with_half_flux(1.5, 0.5).unwrap()
}

#[test]
fn radius_two_truncation() {
    let t = ladder_family(params()).truncate(2).unwrap();
    assert_eq!(t.graph.vertex_count(), 6);
    assert_eq!(
        t.frontier,
        BTreeSet::from([ladder_vertex(3, Rail::Lower), ladder_vertex(3, Rail::Upper)])
    );
}

#[test]
fn basis_cycles_are_sums_of_squares() {
    let g = ladder_graph(&params(), 6).unwrap();
    let basis = cycle_basis(&g, &default_tree(&g)).unwrap();
    assert_eq!(basis.len(), 6);
    let squares: Vec<_> = (1..=6).map(square_cycle).collect();
    for c in &basis.cycles {
        // every fundamental cycle is ± a sum of consecutive squares
        let found = (0..6).any(|i| {
            (i..6).any(|j| {
                let run: Vec<_> = squares[i..=j].iter().map(|s| (1, s)).collect();
                let reversed: Vec<_> = squares[i..=j].iter().map(|s| (-1, s)).collect();
                combinations_agree(&g, &[(1, &c.cycle)], &run, 3).unwrap()
                    || combinations_agree(&g, &[(1, &c.cycle)], &reversed, 3).unwrap()
            })
        });
        assert!(found, "{:?}", c.cycle);
    }
}

#[test]
fn landau_gauge_matches_holonomy_construction() {
    let g = ladder_graph(&params(), 8).unwrap();
    let basis = cycle_basis(&g, &default_tree(&g)).unwrap();
    let targets = basis.holonomy_map(g.potential());
    let rebuilt = potential_from_holonomy(&g, &basis, &targets).unwrap();
    assert!(same_holonomy(&g, g.potential(), &rebuilt).unwrap());
}

#[test]
fn rail_is_the_geodesic() {
    for (a, b) in [(1.5, 0.5), (0.5, 0.5), (3.0, 0.2), (1.0, 2.0)] {
        let p = LadderParams::with_half_flux(a, b).unwrap();
        let radius = 30;
        let t = ladder_family(p).truncate(radius).unwrap();
        let dist = frontier_distances(&t.graph, &t.frontier).unwrap();
        // exhaustive: distance from each vertex to each frontier vertex
        let metric = PathMetric::new(&t.graph);
        for l in 1..=radius + 1 {
            let x = t.graph.index_of(ladder_vertex(l, Rail::Upper)).unwrap();
            let all = shortest_distances(&t.graph, &metric, &[x]);
            let best = t
                .frontier
                .iter()
                .map(|&f| all[t.graph.index_of(f).unwrap()])
                .fold(f64::INFINITY, f64::min);
            let tail = ladder_closed_forms(&p, l, radius).unwrap().tail_sum;
            assert!((dist[x] - best).abs() <= 1e-12 * best.max(1.0));
            assert!(
                (dist[x] - tail).abs() <= 1e-9 * tail.max(1.0),
                "a={a} b={b} l={l}"
            );
        }
    }
}

#[test]
fn completeness_probe_separates_regimes() {
    let radii = [50, 100, 200, 400];
    let bounded = completeness_probe(&ladder_family(params()), &radii).unwrap();
    let growing =
        completeness_probe(&ladder_family(LadderParams::new(0.0, 0.0, PI).unwrap()), &radii).unwrap();
    assert_eq!(growing[3].base_distance, 400.0);
    assert!(
        bounded[3].base_distance - bounded[2].base_distance
            < bounded[2].base_distance - bounded[1].base_distance
    );
    assert!(bounded[3].base_distance < 5.0);
}

#[test]
fn esa_regimes_on_the_ladder() {
    let opts = SolverOptions::default();
    let satisfied = criterion_check(&ladder_family(params()), CoveringChoice::Family, 400, &opts).unwrap();
    assert!(matches!(satisfied.verdict, Verdict::Satisfied { .. }));
    assert_eq!(satisfied.rows[0].id, VertexId(0));
    let balls = criterion_check(&ladder_family(params()), CoveringChoice::Balls(2), 400, &opts).unwrap();
    assert!(balls.sup_deficit.is_finite());
    assert!(matches!(balls.verdict, Verdict::Satisfied { .. }));
}
