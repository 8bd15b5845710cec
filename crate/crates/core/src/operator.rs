//! The magnetic Schrödinger operator
//!
//! ```text
//! (H f)(x) = ω_x⁻² Σ_{y∼x} c_xy [f(x) − e^{iα_xy} f(y)]
//! ```
//!
//! acting on l²_ω(V) with ⟨f, g⟩ = Σ ω_x² f(x) conj(g(x)), and its
//! Hermitian form Q(f) = Σ_{edges} c_xy |f(x) − e^{iα_xy} f(y)|².

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::graph::{MagneticPotential, WeightedGraph};

/// Sparse row storage of H together with the weights ω.
#[derive(Debug, Clone, PartialEq)]
pub struct MagneticOperator {
    omega: Vec<f64>,
    diagonal: Vec<f64>,
    // off-diagonal entries H[x][y], ascending y
    rows: Vec<Vec<(usize, Complex64)>>,
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub fn assemble_operator(graph: &WeightedGraph, alpha: &MagneticPotential) -> Result<MagneticOperator> {
    check_len(graph.edge_count(), alpha.len())?;
    let n = graph.vertex_count();
    let mut diagonal = vec![0.0; n];
    let mut rows = vec![Vec::new(); n];
    for x in 0..n {
        let w2 = graph.omega(x).powi(2);
        for &(y, k) in graph.neighbors(x) {
            let e = graph.edge(k);
            let a = WeightedGraph::oriented_angle(alpha, e, k, x);
            diagonal[x] += e.c / w2;
            rows[x].push((y, -Complex64::from_polar(e.c / w2, a)));
        }
    }
    Ok(MagneticOperator {
        omega: graph.omegas().to_vec(),
        diagonal,
        rows,
    })
}

impl MagneticOperator {
    pub fn dimension(&self) -> usize {
        self.omega.len()
    }

    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    pub fn apply(&self, f: &[Complex64]) -> Vec<Complex64> {
        (0..self.dimension())
            .map(|x| {
                self.rows[x]
                    .iter()
                    .fold(f[x] * self.diagonal[x], |acc, &(y, h)| acc + h * f[y])
            })
            .collect()
    }

    /// ⟨f, g⟩ in l²_ω.
    pub fn inner(&self, f: &[Complex64], g: &[Complex64]) -> Complex64 {
        self.omega
            .iter()
            .zip(f.iter().zip(g))
            .map(|(w, (a, b))| a * b.conj() * (w * w))
            .sum()
    }

    pub fn norm(&self, f: &[Complex64]) -> f64 {
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// S = D_ω H D_ω⁻¹ applied to `u`. S is Hermitian in the flat inner
    /// product and has the spectrum of H.
    pub fn apply_symmetrized(&self, u: &[Complex64]) -> Vec<Complex64> {
        let f: Vec<Complex64> = u.iter().zip(&self.omega).map(|(a, w)| a / w).collect();
        self.apply(&f)
            .into_iter()
            .zip(&self.omega)
            .map(|(a, w)| a * w)
            .collect()
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let n = self.dimension();
        let mut m = DMatrix::zeros(n, n);
        for x in 0..n {
            m[(x, x)] = Complex64::new(self.diagonal[x], 0.0);
            for &(y, h) in &self.rows[x] {
                m[(x, y)] = h;
            }
        }
        m
    }

    pub fn symmetrized_dense(&self) -> DMatrix<Complex64> {
        let n = self.dimension();
        let mut m = self.to_dense();
        for x in 0..n {
            for y in 0..n {
                m[(x, y)] *= self.omega[x] / self.omega[y];
            }
        }
        m
    }

    /// Largest absolute row sum, a cheap bound on the spectral radius.
    pub fn row_sum_bound(&self) -> f64 {
        (0..self.dimension())
            .map(|x| self.diagonal[x] + self.rows[x].iter().map(|(_, h)| h.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }
}

/// Q_{c,A}(f), one term per undirected edge.
pub fn quadratic_form(graph: &WeightedGraph, alpha: &MagneticPotential, f: &[Complex64]) -> Result<f64> {
    check_len(graph.edge_count(), alpha.len())?;
    check_len(graph.vertex_count(), f.len())?;
    Ok(graph
        .edges()
        .iter()
        .zip(alpha.as_slice())
        .map(|(e, &a)| e.c * (f[e.u] - Complex64::from_polar(1.0, a) * f[e.v]).norm_sqr())
        .sum())
}
