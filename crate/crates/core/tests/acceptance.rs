//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each
//! and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use magspec::angle;
use magspec::covering::{ball_covering, ball_covering_degree, restricted_field_norm, validate_covering};
use magspec::cycles::{
    apply_gauge, cycle_basis, default_tree, gauge_reduce, holonomy, potential_from_holonomy, GaugeFunction,
};
use magspec::eigen::{dense_spectrum, SolverOptions};
use magspec::esa::{criterion_check, ladder_sweep, CoveringChoice, Verdict};
use magspec::field::{agmon_identity_check, cyclic_field_norm_closed_form, field_norm, lowest_eigenpair};
use magspec::graph::{MagneticPotential, RawGraph, WeightedGraph};
use magspec::ladder::{ladder_family, ladder_vertex, square_covering, LadderParams, Rail};
use magspec::metric::frontier_distances;
use magspec::operator::{assemble_operator, quadratic_form};
use magspec::potential::{dirichlet_bound_check, effective_potential, flat_dirichlet_bound_check};
use magspec::random::{random_connected_graph, random_real_vector, random_vector, GraphSpec};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ring(n: usize, flux: f64) -> WeightedGraph {
    let mut raw = RawGraph::default();
    for i in 0..n as u64 {
        raw = raw.vertex(i, 1.0);
    }
    for i in 0..n as u64 {
        raw = raw.edge(i, (i + 1) % n as u64, 1.0, if i == 0 { flux } else { 0.0 });
    }
    raw.build().unwrap()
}

fn omega_grid() -> Vec<f64> {
    (0..=62).map(|i| i as f64 * 0.1).collect()
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn cyclic_closed_form() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 3..=16 {
        for &flux in &omega_grid() {
            let g = ring(n, flux);
            let numeric = field_norm(&g, g.potential()).map_err(|e| e.to_string())?;
            let exact = cyclic_field_norm_closed_form(n, flux).unwrap();
            worst = worst.max((numeric - exact).abs());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-8, || format!("max error {worst:e}"))?;
    ensure(secs < 5.0, || format!("took {secs:.2} s"))?;
    Ok(format!("max error {worst:.1e}, {secs:.2} s"))
}

fn maximum_at_pi() -> Outcome {
    let grid = omega_grid();
    for n in 3..=16 {
        let values: Vec<f64> = grid
            .iter()
            .map(|&flux| {
                let g = ring(n, flux);
                field_norm(&g, g.potential()).unwrap()
            })
            .collect();
        let best = (0..grid.len())
            .max_by(|&i, &j| values[i].total_cmp(&values[j]))
            .unwrap();
        ensure((grid[best] - PI).abs() <= 0.1 + 1e-12, || {
            format!("N = {n}: argmax at {}", grid[best])
        })?;
    }
    Ok("argmax within one grid step of pi for N = 3..16".into())
}

fn ladder_square_norm() -> Outcome {
    let p = LadderParams::with_half_flux(1.5, 0.5).unwrap();
    let t = ladder_family(p).truncate(2000).map_err(|e| e.to_string())?;
    let cover = square_covering(&t.graph).map_err(|e| e.to_string())?;
    let target = 2.0 - 2f64.sqrt();
    let mut worst = 0.0f64;
    for sq in &cover.subgraphs {
        let b = restricted_field_norm(&t.graph, t.graph.potential(), sq).map_err(|e| e.to_string())?;
        worst = worst.max((b - target).abs());
    }
    ensure(worst <= 1e-10, || format!("max deviation {worst:e}"))?;
    Ok(format!("{} squares, max deviation {worst:.1e}", cover.len()))
}

fn gauge_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut spec_err, mut norm_err) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let g = random_connected_graph(&mut rng, &GraphSpec::default());
        let gauge = GaugeFunction::random(g.vertex_count(), &mut rng);
        let alpha = apply_gauge(&g, g.potential(), &gauge).unwrap();
        let before = dense_spectrum(&assemble_operator(&g, g.potential()).unwrap());
        let after = dense_spectrum(&assemble_operator(&g, &alpha).unwrap());
        spec_err = spec_err.max(max_abs_diff(&before, &after));
        let b1 = field_norm(&g, g.potential()).unwrap();
        let b2 = field_norm(&g, &alpha).unwrap();
        norm_err = norm_err.max((b1 - b2).abs());
    }
    ensure(spec_err <= 1e-9, || format!("spectra differ by {spec_err:e}"))?;
    ensure(norm_err <= 1e-10, || {
        format!("field norms differ by {norm_err:e}")
    })?;
    Ok(format!(
        "50 graphs, spectrum error {spec_err:.1e}, field norm error {norm_err:.1e}"
    ))
}

fn holonomy_round_trip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut realize_err, mut reduce_err, mut spec_err) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..50 {
        let g = random_connected_graph(&mut rng, &GraphSpec::default());
        let basis = cycle_basis(&g, &default_tree(&g)).unwrap();
        let targets: BTreeMap<_, _> = basis
            .cycles
            .iter()
            .map(|c| (c.key(), rng.gen_range(-10.0..10.0)))
            .collect();
        let alpha = potential_from_holonomy(&g, &basis, &targets).unwrap();
        for c in &basis.cycles {
            let h = holonomy(&g, &alpha, &c.cycle).unwrap();
            realize_err = realize_err.max(angle::distance(h, targets[&c.key()]));
        }

        let zero = MagneticPotential::zero(g.edge_count());
        let pure = apply_gauge(&g, &zero, &GaugeFunction::random(g.vertex_count(), &mut rng)).unwrap();
        let (_, reduced) = gauge_reduce(&g, &pure).unwrap();
        reduce_err = reduce_err.max(reduced.max_abs());
        let magnetic = dense_spectrum(&assemble_operator(&g, &reduced).unwrap());
        let plain = dense_spectrum(&assemble_operator(&g, &zero).unwrap());
        spec_err = spec_err.max(max_abs_diff(&magnetic, &plain));
    }
    ensure(realize_err <= 1e-12, || {
        format!("realization error {realize_err:e}")
    })?;
    ensure(reduce_err <= 1e-12, || {
        format!("reduced potential {reduce_err:e}")
    })?;
    ensure(spec_err <= 1e-9, || format!("spectrum error {spec_err:e}"))?;
    Ok(format!(
        "realization {realize_err:.1e}, reduced max {reduce_err:.1e}, spectrum {spec_err:.1e}"
    ))
}

/// The weighted bound is checked with ω ≤ 1, where it follows from the
/// flat bound Q ≥ Σ W|f|²; the flat bound is checked for ω up to 10.
fn dirichlet_fuzz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let light = GraphSpec {
        omega: 0.1..1.0,
        ..GraphSpec::default()
    };
    let mut worst = f64::INFINITY;
    let mut worst_flat = f64::INFINITY;
    let mut worst_min = f64::INFINITY;
    for (spec, flat) in [(&light, false), (&GraphSpec::default(), true)] {
        for _ in 0..100 {
            let g = random_connected_graph(&mut rng, spec);
            let k = rng.gen_range(1..=2);
            let cover = ball_covering(&g, k).unwrap();
            let w = effective_potential(&g, &cover, g.potential()).unwrap();
            let f = random_vector(&mut rng, g.vertex_count());
            let q = quadratic_form(&g, g.potential(), &f).unwrap();
            let slack = if flat {
                flat_dirichlet_bound_check(&g, g.potential(), &w, &f)
            } else {
                dirichlet_bound_check(&g, g.potential(), &w, &f)
            }
            .unwrap();
            // the minimizer of Q/Σ|f|² stresses the bound hardest
            let unit =
                lowest_eigenpair(&g.with_unit_weights(), g.potential(), &SolverOptions::default()).unwrap();
            let q_min = quadratic_form(&g, g.potential(), &unit.eigenvector).unwrap();
            let slack_min = flat_dirichlet_bound_check(&g, g.potential(), &w, &unit.eigenvector).unwrap();
            worst_min = worst_min.min(slack_min / q_min.max(1.0));
            let scaled = slack / q.max(1.0);
            if flat {
                worst_flat = worst_flat.min(scaled);
            } else {
                worst = worst.min(scaled);
            }
        }
    }
    ensure(worst >= -1e-10, || {
        format!("weighted bound violated, slack/max(1,Q) = {worst:e}")
    })?;
    ensure(worst_flat >= -1e-10, || {
        format!("flat bound violated, slack/max(1,Q) = {worst_flat:e}")
    })?;
    ensure(worst_min >= -1e-10, || {
        format!("flat bound violated at the minimizer: {worst_min:e}")
    })?;
    Ok(format!(
        "100 + 100 instances, min slack/max(1,Q): weighted {worst:.3e}, flat {worst_flat:.3e}, minimizer {worst_min:.3e}"
    ))
}

fn agmon_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let g = random_connected_graph(&mut rng, &GraphSpec::default());
        let pair =
            lowest_eigenpair(&g, g.potential(), &SolverOptions::default()).map_err(|e| e.to_string())?;
        let f = random_real_vector(&mut rng, g.vertex_count());
        let check = agmon_identity_check(&g, g.potential(), pair.lambda_min, &pair.eigenvector, &f)
            .map_err(|e| e.to_string())?;
        worst = worst.max(check.discrepancy() / check.lhs.abs().max(1.0));
    }
    ensure(worst <= 1e-9, || format!("relative discrepancy {worst:e}"))?;

    let g = RawGraph::default()
        .vertex(0, 1.0)
        .vertex(1, 1.0)
        .vertex(2, 1.0)
        .edge(0, 1, 2.0, 0.0)
        .edge(1, 2, 3.0, 0.0)
        .edge(2, 0, 0.5, 0.0)
        .build()
        .unwrap();
    let ones = vec![Complex64::new(1.0, 0.0); 3];
    let f = [0.25, -1.0, 2.0];
    let check = agmon_identity_check(&g, g.potential(), 0.0, &ones, &f).unwrap();
    let dirichlet: f64 = g.edges().iter().map(|e| e.c * (f[e.u] - f[e.v]).powi(2)).sum();
    let exact_err = (check.lhs - dirichlet).abs().max((check.rhs - dirichlet).abs());
    ensure(exact_err <= 4.0 * f64::EPSILON * dirichlet, || {
        format!("constant kernel off by {exact_err:e}")
    })?;
    Ok(format!(
        "100 eigenpairs, max relative discrepancy {worst:.1e}; constant kernel exact"
    ))
}

fn covering_validity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut ratio = 0.0f64;
    for i in 0..50 {
        let n = 3 + i % 3;
        let k = 1 + (i / 3) % 2;
        let spec = GraphSpec {
            max_degree: Some(n),
            density: 2.0,
            ..GraphSpec::default()
        };
        let g = random_connected_graph(&mut rng, &spec);
        let cover = ball_covering(&g, k).unwrap();
        let d = validate_covering(&g, &cover);
        let bound = ball_covering_degree(n, k);
        ensure(d.is_good, || format!("graph {i}: covering rejected: {d:?}"))?;
        ensure(d.empirical_max_multiplicity <= bound, || {
            format!(
                "graph {i}: multiplicity {} above {bound}",
                d.empirical_max_multiplicity
            )
        })?;
        ratio = ratio.max(d.empirical_max_multiplicity as f64 / bound as f64);
    }
    Ok(format!("50 graphs, max multiplicity/bound {ratio:.2}"))
}

/// Σ_{m ≥ l} w_{m+1}/√C_m for the infinite ladder: a direct sum up to a
/// large cutoff plus the integral of the power tail beyond it.
fn full_tail(p: &LadderParams, upto: usize) -> Vec<f64> {
    const CUTOFF: usize = 2_000_000;
    let s = p.a / 2.0 + p.b;
    let mut tail = (CUTOFF as f64 + 0.5).powf(1.0 - s) / (s - 1.0);
    let mut out = vec![0.0; upto + 1];
    for m in (1..CUTOFF).rev() {
        tail += p.weight(m + 1) / p.conductance(m).sqrt();
        if m <= upto {
            out[m] = tail;
        }
    }
    out
}

fn ladder_experiment() -> Outcome {
    let start = Instant::now();
    let radius = 2000;
    let half = radius / 2;
    let opts = SolverOptions::default();
    let p = LadderParams::with_half_flux(1.5, 0.5).unwrap();
    let fam = ladder_family(p);

    // (a) Dijkstra against the rail tail sum, both rails
    let t = fam.truncate(radius).map_err(|e| e.to_string())?;
    let dist = frontier_distances(&t.graph, &t.frontier).unwrap();
    let mut rel = 0.0f64;
    for l in 1..=half {
        let tail: f64 = (l..=radius)
            .map(|m| p.weight(m + 1) / p.conductance(m).sqrt())
            .sum();
        for rail in [Rail::Lower, Rail::Upper] {
            let d = dist[t.graph.index_of(ladder_vertex(l, rail)).unwrap()];
            rel = rel.max((d - tail).abs() / tail);
        }
    }
    ensure(rel <= 1e-6, || format!("(a) relative error {rel:e}"))?;

    // (b) bounded deficit, growing ratio
    let rows = ladder_sweep(&p, radius, 10, half, &opts).map_err(|e| e.to_string())?;
    let sup = rows.iter().map(|r| r.deficit).fold(f64::NEG_INFINITY, f64::max);
    let half_rows = ladder_sweep(&p, half, 10, half / 2, &opts).map_err(|e| e.to_string())?;
    let sup_half = half_rows
        .iter()
        .map(|r| r.deficit)
        .fold(f64::NEG_INFINITY, f64::max);
    ensure(sup.is_finite() && sup <= sup_half, || {
        format!("(b) sup deficit {sup} at R, {sup_half} at R/2")
    })?;
    let n = 3.0;
    let truncated_ratio: Vec<f64> = rows
        .iter()
        .map(|r| r.w_literal * 2.0 * r.distance.powi(2) / n)
        .collect();
    let (first, last) = (truncated_ratio[0], *truncated_ratio.last().unwrap());
    ensure(last > first, || {
        format!("(b) D_R ratio fell from {first} to {last}")
    })?;
    let full = full_tail(&p, half);
    let ratio: Vec<f64> = rows
        .iter()
        .map(|r| r.w_literal * 2.0 * full[r.l].powi(2) / n)
        .collect();
    ensure(ratio.windows(2).all(|w| w[1] > w[0]), || {
        "(b) full-tail ratio not increasing".into()
    })?;
    let decade =
        |i: usize, j: usize| (ratio[j] / ratio[i]).ln() / ((rows[j].l as f64) / (rows[i].l as f64)).ln();
    let slope = decade(rows.len() / 10, rows.len() - 1);
    ensure(slope > 0.8, || format!("(b) log-log slope {slope}"))?;
    let peak = truncated_ratio
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| rows[i].l)
        .unwrap();

    // (c) no field, no potential
    let flat = LadderParams::new(1.5, 0.5, 0.0).unwrap();
    let report = criterion_check(&ladder_family(flat), CoveringChoice::Family, radius, &opts)
        .map_err(|e| e.to_string())?;
    let w_max = report.rows.iter().map(|r| r.w.abs()).fold(0.0, f64::max);
    ensure(w_max <= 1e-12, || format!("(c) W reaches {w_max:e}"))?;
    ensure(report.rows.iter().all(|r| r.deficit > 0.0), || {
        "(c) a core deficit is not positive".into()
    })?;
    ensure(report.verdict == Verdict::NotSatisfiedAtR, || {
        format!("(c) verdict {:?}", report.verdict)
    })?;

    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!(
        "(a) rel {rel:.1e}; (b) sup deficit {sup:.3}, full-tail ratio {:.2} -> {:.2} (slope {slope:.2}), \
         D_R ratio {first:.2} -> {last:.2} peaking at l = {peak}; (c) {} core vertices fail; {secs:.1} s",
        ratio[0],
        ratio.last().unwrap(),
        report.rows.len()
    ))
}

fn run_cli(dir: &Path, args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_magspec"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let mut bytes = out.stdout;
    if let Some(i) = args.iter().position(|a| *a == "--out") {
        bytes.extend(std::fs::read(dir.join(args[i + 1])).map_err(|e| e.to_string())?);
    }
    Ok(bytes)
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let g = random_connected_graph(&mut rng, &GraphSpec::default());
    std::fs::write(
        dir.path().join("g.json"),
        serde_json::to_string(&g.to_raw()).unwrap(),
    )
    .unwrap();
    run_cli(
        dir.path(),
        &["cover", "g.json", "--k", "1", "--out", "cover.json"],
    )?;
    let cycle = {
        let basis = cycle_basis(&g, &default_tree(&g)).unwrap();
        let ids: Vec<String> = match basis.cycles.first() {
            Some(c) => c.cycle.vertices().iter().map(|v| v.0.to_string()).collect(),
            None => {
                let e = g.edge(0);
                vec![g.id(e.u).0.to_string(), g.id(e.v).0.to_string()]
            }
        };
        ids.join(",")
    };
    let commands: Vec<Vec<&str>> = vec![
        vec!["bnorm", "g.json"],
        vec!["spectrum", "g.json", "--dense"],
        vec!["spectrum", "g.json", "--seed", "3"],
        vec!["holonomy", "g.json", "--cycle", &cycle],
        vec!["gauge-reduce", "g.json"],
        vec!["cover", "g.json", "--k", "2"],
        vec!["effective-potential", "g.json", "--cover", "cover.json"],
        vec![
            "esa-check",
            "--family",
            "ladder",
            "--a",
            "1.5",
            "--b",
            "0.5",
            "--omega",
            "pi",
            "--radius",
            "200",
        ],
        vec![
            "esa-check",
            "--family",
            "file",
            "--graph",
            "g.json",
            "--radius",
            "8",
        ],
        vec![
            "ladder",
            "--a",
            "1.5",
            "--b",
            "0.5",
            "--radius",
            "100",
            "--out",
            "ladder.csv",
        ],
        vec!["validate", "g.json"],
    ];
    for args in &commands {
        let first = run_cli(dir.path(), args)?;
        let second = run_cli(dir.path(), args)?;
        ensure(!first.is_empty() && first == second, || {
            format!("{args:?} differs between runs")
        })?;
    }
    Ok(format!(
        "{} commands byte-identical across two runs",
        commands.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cyclic closed-form law", cyclic_closed_form),
        ("maximum at pi", maximum_at_pi),
        ("ladder square norm", ladder_square_norm),
        ("gauge invariance", gauge_invariance),
        ("holonomy realization and reduction", holonomy_round_trip),
        ("Dirichlet form lower bound", dirichlet_fuzz),
        ("localization identity", agmon_identity),
        ("covering validity", covering_validity),
        ("ladder experiment", ladder_experiment),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
