//! Symmetrized directed Laplacian and the Γ / Γ₂ calculus built on it.
//!
//! The scalar evaluators (`gamma`, `gamma2`) follow the bilinear
//! definitions literally and are the reference for everything else: the
//! per-vertex quadratic forms are their exact polarization, and the
//! closed-form sums are cross-checks.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::numerics::{dot, Matrix};
use crate::stochastic::{build_probability_matrix, perron_vector, PerronVector, StochasticMatrix};

/// w_ij = φ_i·(M_α)_ij, diagonal αφ_i included.
pub fn build_weights(m: &StochasticMatrix, phi: &[f64]) -> Matrix {
    let n = m.size();
    assert_eq!(phi.len(), n, "phi has wrong length");
    Matrix::from_fn(n, n, |i, j| phi[i] * m.matrix()[(i, j)])
}

/// Matrix L with (Δf)_i = Σ_j L_ij f_j, where
/// Δf(v_i) = 1/(2φ_i)·[Σ_{j∈S^out(i)} w_ij(f_j − f_i) + Σ_{k∈S^in(i)} w_ki(f_k − f_i)].
pub fn laplacian_matrix(g: &DirectedGraph, weights: &Matrix, phi: &[f64]) -> Matrix {
    let n = g.vertex_count();
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        let scale = 1.0 / (2.0 * phi[i]);
        for &j in g.out_neighbors(i) {
            l[(i, j)] += scale * weights[(i, j)];
            l[(i, i)] -= scale * weights[(i, j)];
        }
        for &k in g.in_neighbors(i) {
            l[(i, k)] += scale * weights[(k, i)];
            l[(i, i)] -= scale * weights[(k, i)];
        }
    }
    l
}

/// Weights, Laplacian and stationary vector for one (graph, α) pair.
#[derive(Clone, Debug)]
pub struct OperatorBundle {
    alpha: f64,
    phi: Vec<f64>,
    weights: Matrix,
    laplacian: Matrix,
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
}

impl OperatorBundle {
    /// Assembles the operators from an explicit φ. Any positive multiple of
    /// the stationary vector gives the same Laplacian.
    pub fn new(g: &DirectedGraph, m: &StochasticMatrix, phi: &[f64]) -> Result<Self> {
        let n = g.vertex_count();
        if m.size() != n || phi.len() != n {
            return Err(Error::InvalidArgument(format!(
                "inconsistent sizes: graph {n}, matrix {}, phi {}",
                m.size(),
                phi.len()
            )));
        }
        if phi.iter().any(|&x| x.is_nan() || x <= 0.0) {
            return Err(Error::InvalidArgument("phi must be strictly positive".into()));
        }
        let weights = build_weights(m, phi);
        let laplacian = laplacian_matrix(g, &weights, phi);
        Ok(OperatorBundle {
            alpha: m.alpha(),
            phi: phi.to_vec(),
            weights,
            laplacian,
            out_adj: (0..n).map(|v| g.out_neighbors(v).to_vec()).collect(),
            in_adj: (0..n).map(|v| g.in_neighbors(v).to_vec()).collect(),
        })
    }

    /// M_α → φ → bundle.
    pub fn from_graph(g: &DirectedGraph, alpha: f64) -> Result<(Self, StochasticMatrix, PerronVector)> {
        let m = build_probability_matrix(g, alpha)?;
        let phi = perron_vector(&m)?;
        let bundle = Self::new(g, &m, phi.values())?;
        Ok((bundle, m, phi))
    }

    pub fn size(&self) -> usize {
        self.phi.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn laplacian(&self) -> &Matrix {
        &self.laplacian
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out_adj[i]
    }

    pub fn in_neighbors(&self, i: usize) -> &[usize] {
        &self.in_adj[i]
    }

    /// Δf at every vertex.
    pub fn apply_laplacian(&self, f: &[f64]) -> Vec<f64> {
        self.laplacian.mul_vec(f)
    }

    /// Δf(v_i).
    pub fn laplacian_at(&self, f: &[f64], i: usize) -> f64 {
        dot(self.laplacian.row(i), f)
    }

    /// Γ(f, g)(v_i) = ½{Δ(fg) − fΔg − gΔf}(v_i).
    pub fn gamma(&self, f: &[f64], g: &[f64], i: usize) -> f64 {
        let fg: Vec<f64> = f.iter().zip(g).map(|(a, b)| a * b).collect();
        0.5 * (self.laplacian_at(&fg, i) - f[i] * self.laplacian_at(g, i) - g[i] * self.laplacian_at(f, i))
    }

    /// Γ(f, g) at every vertex.
    pub fn gamma_field(&self, f: &[f64], g: &[f64]) -> Vec<f64> {
        (0..self.size()).map(|i| self.gamma(f, g, i)).collect()
    }

    /// Γ₂(f, g)(v_i) = ½{ΔΓ(f,g) − Γ(f,Δg) − Γ(Δf,g)}(v_i).
    pub fn gamma2(&self, f: &[f64], g: &[f64], i: usize) -> f64 {
        let field = self.gamma_field(f, g);
        let lf = self.apply_laplacian(f);
        let lg = self.apply_laplacian(g);
        0.5 * (self.laplacian_at(&field, i) - self.gamma(f, &lg, i) - self.gamma(&lf, g, i))
    }

    pub fn gamma2_scalar(&self, f: &[f64], i: usize) -> f64 {
        self.gamma2(f, f, i)
    }

    /// 1/(4φ_i)·[Σ_out w_ij(f_j − f_i)² + Σ_in w_ki(f_k − f_i)²].
    pub fn gamma_closed_form(&self, f: &[f64], i: usize) -> f64 {
        let out: f64 = self.out_adj[i]
            .iter()
            .map(|&j| self.weights[(i, j)] * (f[j] - f[i]).powi(2))
            .sum();
        let inc: f64 = self.in_adj[i]
            .iter()
            .map(|&k| self.weights[(k, i)] * (f[k] - f[i]).powi(2))
            .sum();
        (out + inc) / (4.0 * self.phi[i])
    }

    fn closed_out(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(v).chain(self.out_adj[v].iter().copied())
    }

    fn closed_in(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(v).chain(self.in_adj[v].iter().copied())
    }

    /// ΔΓ(f,f)(v_i) through the printed closed-form sum over N^out / N^in
    /// with the W^out / W^in intermediates. Not guaranteed to agree with the
    /// definition; see [`OperatorBundle::reconcile_delta_gamma`].
    pub fn delta_gamma_closed_form(&self, f: &[f64], i: usize) -> f64 {
        let w = &self.weights;
        let base = |j: usize| (f[j] - f[i]).powi(2);
        let w_out = |j: usize| -> f64 {
            self.closed_out(j)
                .map(|a| w[(j, a)] * ((f[a] - f[j]).powi(2) - base(j)))
                .sum()
        };
        let w_in = |j: usize| -> f64 {
            self.closed_in(j)
                .map(|b| w[(b, j)] * ((f[b] - f[j]).powi(2) - base(j)))
                .sum()
        };
        let out: f64 = self
            .closed_out(i)
            .map(|j| w[(i, j)] / self.phi[j] * (w_in(j) + w_out(j)))
            .sum();
        let inc: f64 = self
            .closed_in(i)
            .map(|k| w[(k, i)] / self.phi[k] * (w_in(k) + w_out(k)))
            .sum();
        (out + inc) / (8.0 * self.phi[i])
    }

    /// 2Γ(Δf, f)(v_i) through the printed closed form
    /// (Δf)²(v_i) + 1/(2φ_i)(Σ_out w_ij W_Δ(v_j) + Σ_in w_ki W_Δ(v_k)),
    /// W_Δ(v_j) = Δf(v_j)(f_j − f_i).
    pub fn gamma_delta_closed_form(&self, f: &[f64], i: usize) -> f64 {
        let lf = self.apply_laplacian(f);
        let w_delta = |j: usize| lf[j] * (f[j] - f[i]);
        let out: f64 = self.out_adj[i].iter().map(|&j| self.weights[(i, j)] * w_delta(j)).sum();
        let inc: f64 = self.in_adj[i].iter().map(|&k| self.weights[(k, i)] * w_delta(k)).sum();
        lf[i] * lf[i] + (out + inc) / (2.0 * self.phi[i])
    }

    /// Printed ΔΓ closed form against Δ applied to the definitional Γ field.
    pub fn reconcile_delta_gamma(&self, f: &[f64], i: usize) -> Reconciliation {
        Reconciliation {
            printed: self.delta_gamma_closed_form(f, i),
            definitional: self.laplacian_at(&self.gamma_field(f, f), i),
        }
    }

    /// Printed 2Γ(Δf, f) closed form against the definitional evaluator.
    pub fn reconcile_gamma_delta(&self, f: &[f64], i: usize) -> Reconciliation {
        let lf = self.apply_laplacian(f);
        Reconciliation {
            printed: self.gamma_delta_closed_form(f, i),
            definitional: 2.0 * self.gamma(&lf, f, i),
        }
    }

    /// Γ(e_a, e_b)(v_i): the definition on basis vectors, where
    /// Δ(e_a e_b) = δ_ab·L e_a.
    fn gamma_basis(&self, a: usize, b: usize, i: usize) -> f64 {
        let l = &self.laplacian;
        let product = if a == b { l[(i, a)] } else { 0.0 };
        let fa_lg = if i == a { l[(i, b)] } else { 0.0 };
        let gb_lf = if i == b { l[(i, a)] } else { 0.0 };
        0.5 * (product - fa_lg - gb_lf)
    }

    /// Per-vertex matrices G_i, H_i and rows l_i with Γ(f,f)(v_i) = fᵀG_i f,
    /// Γ₂(f,f)(v_i) = fᵀH_i f and Δf(v_i) = l_iᵀf.
    ///
    /// Polarization on basis pairs: G_i[a][b] = Γ(e_a, e_b)(v_i), and by
    /// bilinearity H_i = ½{Σ_j L_ij G_j − G_i L − Lᵀ G_i}.
    pub fn assemble_forms(&self) -> QuadraticForms {
        let n = self.size();
        let gammas: Vec<Matrix> = (0..n)
            .into_par_iter()
            .map(|i| Matrix::from_fn(n, n, |a, b| self.gamma_basis(a, b, i)).symmetrized())
            .collect();
        let vertices = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut h = Matrix::zeros(n, n);
                for (j, &lij) in self.laplacian.row(i).iter().enumerate() {
                    if lij != 0.0 {
                        h = h.add(&gammas[j].scaled(lij));
                    }
                }
                let gl = gammas[i].matmul(&self.laplacian);
                h = h.sub(&gl).sub(&gl.transpose()).scaled(0.5).symmetrized();
                VertexForms {
                    gamma: gammas[i].clone(),
                    gamma2: h,
                    laplacian_row: self.laplacian.row(i).to_vec(),
                }
            })
            .collect();
        QuadraticForms { vertices }
    }
}

/// A printed closed form next to the definitional value it should equal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Reconciliation {
    pub printed: f64,
    pub definitional: f64,
}

impl Reconciliation {
    pub fn deviation(&self) -> f64 {
        (self.printed - self.definitional).abs()
    }
}

/// Quadratic forms of Γ, Γ₂ and Δ at one vertex.
#[derive(Clone, Debug)]
pub struct VertexForms {
    pub gamma: Matrix,
    pub gamma2: Matrix,
    pub laplacian_row: Vec<f64>,
}

impl VertexForms {
    pub fn gamma_value(&self, f: &[f64]) -> f64 {
        self.gamma.quadratic(f)
    }

    pub fn gamma2_value(&self, f: &[f64]) -> f64 {
        self.gamma2.quadratic(f)
    }

    pub fn laplacian_value(&self, f: &[f64]) -> f64 {
        dot(&self.laplacian_row, f)
    }
}

#[derive(Clone, Debug)]
pub struct QuadraticForms {
    pub vertices: Vec<VertexForms>,
}

impl QuadraticForms {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &VertexForms {
        &self.vertices[i]
    }
}
