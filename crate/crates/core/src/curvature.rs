//! Curvature-dimension inequalities CD(m, K) at each vertex.
//!
//! For a vertex v_i the inequality reads
//! `Γ₂(f,f)(v_i) ≥ (1/m)(Δf(v_i))² + K·Γ(f,f)(v_i)` for all f. With the
//! quadratic forms from [`crate::gamma`] this is `A_i − K·G_i ⪰ 0` where
//! `A_i = H_i − (1/m)·l_i l_iᵀ`, so the best constant is a pencil bound.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gamma::{OperatorBundle, QuadraticForms};
use crate::graph::DirectedGraph;
use crate::numerics::{norm_inf, pencil_min_eig, Matrix, TOLERANCES};

/// Dimension parameter m ∈ [1, ∞].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Dimension {
    Finite(f64),
    Infinite,
}

impl Dimension {
    pub fn new(m: f64) -> Result<Self> {
        if m == f64::INFINITY {
            Ok(Dimension::Infinite)
        } else if m.is_finite() && m >= 1.0 {
            Ok(Dimension::Finite(m))
        } else {
            Err(Error::InvalidArgument(format!(
                "dimension m must be >= 1 or inf, got {m}"
            )))
        }
    }

    /// 1/m, zero for m = ∞.
    pub fn inverse(self) -> f64 {
        match self {
            Dimension::Finite(m) => 1.0 / m,
            Dimension::Infinite => 0.0,
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Dimension::Finite(m) => m,
            Dimension::Infinite => f64::INFINITY,
        }
    }
}

impl FromStr for Dimension {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" | "∞" => Ok(Dimension::Infinite),
            other => {
                let m: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("dimension m must be a number or inf, got {s:?}")))?;
                Dimension::new(m)
            }
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::Finite(m) => write!(f, "{m}"),
            Dimension::Infinite => f.write_str("inf"),
        }
    }
}

/// C(v_i) = min over out-neighbours j of w_ij/φ_j and in-neighbours k of
/// w_ki/φ_k.
pub fn local_constant_c(bundle: &OperatorBundle, i: usize) -> f64 {
    let w = bundle.weights();
    let phi = bundle.phi();
    let out = bundle.out_neighbors(i).iter().map(|&j| w[(i, j)] / phi[j]);
    let inc = bundle.in_neighbors(i).iter().map(|&k| w[(k, i)] / phi[k]);
    out.chain(inc).fold(f64::INFINITY, f64::min)
}

/// K = C − (1 − α).
pub fn theorem_bound(c: f64, alpha: f64) -> f64 {
    c - (1.0 - alpha)
}

/// Largest K for which CD(m, K) holds at one vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct OptimalCurvature {
    /// May be `±∞` in degenerate cases.
    pub value: f64,
    /// Γ₂ − (1/m)(Δ·)² is nonnegative on functions with Γ = 0.
    pub kernel_ok: bool,
    /// A direction attaining the bound, scaled to unit max-norm with its
    /// largest-magnitude entry positive. Empty when the value is `+∞`.
    pub extremal: Vec<f64>,
}

fn cd_numerator(forms: &QuadraticForms, i: usize, m: Dimension) -> Matrix {
    let v = forms.vertex(i);
    let inv = m.inverse();
    let l = &v.laplacian_row;
    Matrix::from_fn(l.len(), l.len(), |a, b| v.gamma2[(a, b)] - inv * l[a] * l[b])
}

fn canonical_direction(mut f: Vec<f64>) -> Vec<f64> {
    let scale = norm_inf(&f);
    if scale == 0.0 {
        return f;
    }
    let pivot = f.iter().copied().find(|x| x.abs() == scale).unwrap_or(scale);
    let s = pivot.signum() / scale;
    f.iter_mut().for_each(|x| *x *= s);
    f
}

/// Sup of K with `H_i − (1/m) l_i l_iᵀ ⪰ K·G_i`.
pub fn optimal_k(forms: &QuadraticForms, i: usize, m: Dimension) -> Result<OptimalCurvature> {
    let a = cd_numerator(forms, i, m);
    let bound = pencil_min_eig(&a, &forms.vertex(i).gamma, TOLERANCES.kernel_relative)?;
    Ok(OptimalCurvature {
        value: bound.min_ratio,
        kernel_ok: bound.kernel_ok,
        extremal: canonical_direction(bound.extremal),
    })
}

/// Γ₂(f,f)(v_i) − (1/m)(Δf(v_i))² − K·Γ(f,f)(v_i); nonnegative iff the
/// inequality holds for this f.
pub fn check_cd(forms: &QuadraticForms, i: usize, m: Dimension, k: f64, f: &[f64]) -> f64 {
    let v = forms.vertex(i);
    let lf = v.laplacian_value(f);
    v.gamma2_value(f) - m.inverse() * lf * lf - k * v.gamma_value(f)
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    /// Random functions tried per vertex.
    pub samples: usize,
    pub seed: u64,
    /// Test this K at every vertex instead of the theorem bound.
    pub k_override: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            samples: 100,
            seed: 0,
            k_override: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ViolationSource {
    /// Extremal direction of the pencil.
    Pencil,
    /// Random falsification sample.
    Sampled,
}

/// A function f with negative CD residual at a vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub vertex: usize,
    pub source: ViolationSource,
    pub residual: f64,
    pub f: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VertexCurvature {
    pub vertex: usize,
    pub label: String,
    pub phi: f64,
    pub c: f64,
    pub k_theorem: f64,
    /// K actually checked: the override if given, else `k_theorem`.
    pub k_tested: f64,
    pub k_optimal: f64,
    pub cd_holds: bool,
    pub worst_f: Vec<f64>,
    /// Smallest residual among the random samples (`+∞` with no samples).
    pub min_sampled_residual: f64,
    pub violations: Vec<Violation>,
}

impl VertexCurvature {
    /// The theorem states C < 1, which fails e.g. on directed cycles with α = 0.
    pub fn c_at_least_one(&self) -> bool {
        self.c >= 1.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CurvatureReport {
    pub alpha: f64,
    pub m: Dimension,
    pub options: VerifyOptions,
    pub vertices: Vec<VertexCurvature>,
}

impl CurvatureReport {
    pub fn min_k_theorem(&self) -> f64 {
        self.vertices.iter().map(|v| v.k_theorem).fold(f64::INFINITY, f64::min)
    }

    pub fn min_k_optimal(&self) -> f64 {
        self.vertices.iter().map(|v| v.k_optimal).fold(f64::INFINITY, f64::min)
    }

    pub fn all_cd_hold(&self) -> bool {
        self.vertices.iter().all(|v| v.cd_holds)
    }

    pub fn violations(&self) -> impl Iterator<Item = &Violation> {
        self.vertices.iter().flat_map(|v| v.violations.iter())
    }
}

/// Uniform in [−1, 1]ⁿ, then mean-subtracted.
pub fn sample_function(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let mut f: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..=1.0)).collect();
    let mean = f.iter().sum::<f64>() / n as f64;
    f.iter_mut().for_each(|x| *x -= mean);
    f
}

/// Independent sample stream for one vertex, so results do not depend on
/// scheduling.
pub fn vertex_rng(seed: u64, vertex: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(vertex as u64);
    rng
}

/// Full pipeline M_α → φ → operators → forms → per-vertex curvature, with a
/// randomized falsification pass at the tested K.
pub fn verify_graph(g: &DirectedGraph, alpha: f64, m: Dimension, options: &VerifyOptions) -> Result<CurvatureReport> {
    if g.vertex_count() < 2 {
        return Err(Error::TooFewVertices(g.vertex_count()));
    }
    if !g.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    if let Some(k) = options.k_override {
        if !k.is_finite() {
            return Err(Error::InvalidArgument(format!("K override must be finite, got {k}")));
        }
    }
    let (bundle, _, _) = OperatorBundle::from_graph(g, alpha)?;
    let forms = bundle.assemble_forms();
    let n = g.vertex_count();

    let vertices = (0..n)
        .into_par_iter()
        .map(|i| analyze_vertex(g, &bundle, &forms, i, m, options))
        .collect::<Result<Vec<_>>>()?;

    Ok(CurvatureReport {
        alpha,
        m,
        options: options.clone(),
        vertices,
    })
}

fn analyze_vertex(
    g: &DirectedGraph,
    bundle: &OperatorBundle,
    forms: &QuadraticForms,
    i: usize,
    m: Dimension,
    options: &VerifyOptions,
) -> Result<VertexCurvature> {
    let n = g.vertex_count();
    let c = local_constant_c(bundle, i);
    let k_theorem = theorem_bound(c, bundle.alpha());
    let k_tested = options.k_override.unwrap_or(k_theorem);
    let optimal = optimal_k(forms, i, m)?;

    let mut violations = Vec::new();
    let mut holds = optimal.value >= k_tested - TOLERANCES.theorem_slack;
    if !holds && !optimal.extremal.is_empty() {
        let residual = check_cd(forms, i, m, k_tested, &optimal.extremal);
        violations.push(Violation {
            vertex: i,
            source: ViolationSource::Pencil,
            residual,
            f: optimal.extremal.clone(),
        });
    }

    let mut rng = vertex_rng(options.seed, i);
    let mut worst_sample: Option<(f64, Vec<f64>)> = None;
    for _ in 0..options.samples {
        let f = sample_function(&mut rng, n);
        let residual = check_cd(forms, i, m, k_tested, &f);
        if worst_sample.as_ref().is_none_or(|(r, _)| residual < *r) {
            worst_sample = Some((residual, f));
        }
    }
    let min_sampled_residual = worst_sample.as_ref().map_or(f64::INFINITY, |(r, _)| *r);
    if let Some((residual, f)) = worst_sample {
        if residual < -TOLERANCES.falsification {
            holds = false;
            violations.push(Violation {
                vertex: i,
                source: ViolationSource::Sampled,
                residual,
                f,
            });
        }
    }

    Ok(VertexCurvature {
        vertex: i,
        label: g.label(i).to_string(),
        phi: bundle.phi()[i],
        c,
        k_theorem,
        k_tested,
        k_optimal: optimal.value,
        cd_holds: holds,
        worst_f: optimal.extremal,
        min_sampled_residual,
        violations,
    })
}
