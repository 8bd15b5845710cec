//! Lowest eigenpair of a magnetic operator.
//!
//! Both solvers work on S = D_ω H D_ω⁻¹, which is Hermitian in the flat inner
//! product and unitarily equivalent to H on l²_ω. Small operators go through
//! a dense Hermitian eigendecomposition. Larger ones use a thick-restarted
//! Krylov (Lanczos) iteration with full reorthogonalization and an explicit
//! Rayleigh–Ritz step at every restart.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::operator::MagneticOperator;

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverOptions {
    /// Required residual ‖Hv − λv‖_ω for a unit eigenvector.
    pub tol: f64,
    /// Largest dimension handled by the dense solver.
    pub dense_cutoff: usize,
    /// Matrix-vector products allowed, as a multiple of the dimension.
    pub iteration_factor: usize,
    pub seed: u64,
    pub krylov_dim: usize,
    pub keep: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOLERANCE,
            dense_cutoff: 512,
            iteration_factor: 10,
            seed: DEFAULT_SEED,
            krylov_dim: 48,
            keep: 8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub lambda_min: f64,
    /// Normalized in l²_ω.
    pub eigenvector: Vec<Complex64>,
    pub residual: f64,
    /// Matrix-vector products spent; 0 for the dense solver.
    pub iterations: usize,
}

pub fn lowest_eigenvalue(op: &MagneticOperator, opts: &SolverOptions) -> Result<SpectrumResult> {
    if opts.tol.is_nan() || opts.tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "solver tolerance must be positive, got {}",
            opts.tol
        )));
    }
    if op.dimension() == 0 {
        return Err(Error::EmptyGraph);
    }
    if op.dimension() <= opts.dense_cutoff {
        dense_lowest(op, opts)
    } else {
        krylov_lowest(op, opts)
    }
}

/// All eigenvalues of H, ascending.
pub fn dense_spectrum(op: &MagneticOperator) -> Vec<f64> {
    let eig = op.symmetrized_dense().symmetric_eigen();
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    values
}

fn dense_lowest(op: &MagneticOperator, opts: &SolverOptions) -> Result<SpectrumResult> {
    let eig = op.symmetrized_dense().symmetric_eigen();
    let idx = eig.eigenvalues.imin();
    let u: Vec<Complex64> = eig.eigenvectors.column(idx).iter().copied().collect();
    finish(op, &u, 0, opts.tol)
}

/// Converts a flat unit vector `u` of S to the eigenvector of H and checks
/// the residual.
fn finish(op: &MagneticOperator, u: &[Complex64], iterations: usize, tol: f64) -> Result<SpectrumResult> {
    let nu = norm(u);
    let u: Vec<Complex64> = u.iter().map(|a| a / nu).collect();
    let su = op.apply_symmetrized(&u);
    let lambda = dot(&u, &su).re;
    let residual = residual_norm(&su, &u, lambda);
    if residual > tol {
        return Err(Error::NoConvergence { iterations, residual });
    }
    let eigenvector = u.iter().zip(op.omega()).map(|(a, w)| a / w).collect();
    Ok(SpectrumResult {
        lambda_min: lambda,
        eigenvector,
        residual,
        iterations,
    })
}

// ⟨a, b⟩ = Σ conj(a_i) b_i
fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn residual_norm(image: &[Complex64], u: &[Complex64], lambda: f64) -> f64 {
    image
        .iter()
        .zip(u)
        .map(|(a, b)| (a - b * lambda).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn orthogonalize(v: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for _ in 0..2 {
        for b in basis {
            let proj = dot(b, v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= y * proj);
        }
    }
}

fn combine(vectors: &[Vec<Complex64>], coeffs: impl Iterator<Item = Complex64>) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); vectors[0].len()];
    for (v, c) in vectors.iter().zip(coeffs) {
        out.iter_mut().zip(v).for_each(|(o, x)| *o += x * c);
    }
    out
}

fn random_unit(rng: &mut ChaCha8Rng, n: usize) -> Vec<Complex64> {
    let v: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let nv = norm(&v);
    v.into_iter().map(|x| x / nv).collect()
}

fn krylov_lowest(op: &MagneticOperator, opts: &SolverOptions) -> Result<SpectrumResult> {
    let n = op.dimension();
    let m = opts.krylov_dim.clamp(2, n);
    let keep = opts.keep.clamp(1, m - 1);
    let budget = opts.iteration_factor.saturating_mul(n).max(m);
    let scale = op.row_sum_bound().max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);

    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut images: Vec<Vec<Complex64>> = Vec::with_capacity(m);
    let mut next = random_unit(&mut rng, n);
    let mut matvecs = 0usize;
    let mut best_residual = f64::INFINITY;

    loop {
        orthogonalize(&mut next, &basis);
        let nn = norm(&next);
        let exhausted = nn <= 1e-12 * scale;
        if !exhausted {
            next.iter_mut().for_each(|x| *x /= nn);
            images.push(op.apply_symmetrized(&next));
            basis.push(next);
            matvecs += 1;
        }
        if basis.len() < m && !exhausted && matvecs < budget {
            next = images.last().expect("basis is nonempty").clone();
            continue;
        }

        // Rayleigh–Ritz on the current subspace
        let k = basis.len();
        let mut projected = DMatrix::from_fn(k, k, |i, j| dot(&basis[i], &images[j]));
        projected = (&projected + projected.adjoint()).scale(0.5);
        let eig = projected.symmetric_eigen();
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let ritz = |i: usize| combine(&basis, eig.eigenvectors.column(order[i]).iter().copied());
        let y0 = ritz(0);
        let y0_image = op.apply_symmetrized(&y0);
        matvecs += 1;
        let theta = dot(&y0, &y0_image).re / dot(&y0, &y0).re;
        let r0: Vec<Complex64> = y0_image.iter().zip(&y0).map(|(a, b)| a - b * theta).collect();
        let res = norm(&r0) / norm(&y0);
        best_residual = best_residual.min(res);
        if res <= opts.tol {
            return finish(op, &y0, matvecs, opts.tol);
        }
        if matvecs >= budget {
            return Err(Error::NoConvergence {
                iterations: matvecs,
                residual: best_residual,
            });
        }

        // thick restart: keep the lowest Ritz vectors, continue from the
        // common residual direction
        let kept = keep.min(k);
        let mut new_basis: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        for i in 0..kept {
            let mut y = ritz(i);
            orthogonalize(&mut y, &new_basis);
            let ny = norm(&y);
            if ny > 1e-10 {
                y.iter_mut().for_each(|x| *x /= ny);
                new_basis.push(y);
            }
        }
        images = new_basis.iter().map(|y| op.apply_symmetrized(y)).collect();
        matvecs += new_basis.len();
        basis = new_basis;
        next = if exhausted { random_unit(&mut rng, n) } else { r0 };
    }
}
