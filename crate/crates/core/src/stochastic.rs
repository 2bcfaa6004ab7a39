//! Lazy random walk M_α and its positive stationary vector φ.

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::numerics::{solve_linear, Matrix, TOLERANCES};

/// Row-stochastic transition matrix that stays put with probability α and
/// otherwise moves to a uniformly chosen out-neighbour.
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticMatrix {
    matrix: Matrix,
    alpha: f64,
}

impl StochasticMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn size(&self) -> usize {
        self.matrix.rows()
    }

    /// Largest |Σ_j M_ij − 1| over rows.
    pub fn row_sum_error(&self) -> f64 {
        (0..self.size())
            .map(|i| (self.matrix.row(i).iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn validate_alpha(alpha: f64) -> Result<()> {
    if alpha.is_finite() && (0.0..1.0).contains(&alpha) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("alpha must lie in [0, 1), got {alpha}")))
    }
}

/// M_α: α on the diagonal, (1 − α)/d_i on each edge (i, j), zero elsewhere.
pub fn build_probability_matrix(g: &DirectedGraph, alpha: f64) -> Result<StochasticMatrix> {
    validate_alpha(alpha)?;
    let n = g.vertex_count();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let d = g.out_degree(i);
        if d == 0 {
            return Err(Error::ZeroOutDegree {
                vertex: g.label(i).to_string(),
            });
        }
        m[(i, i)] = alpha;
        let step = (1.0 - alpha) / d as f64;
        for &j in g.out_neighbors(i) {
            m[(i, j)] = step;
        }
    }
    Ok(StochasticMatrix { matrix: m, alpha })
}

/// Strictly positive left fixed vector of M_α, normalized to sum 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PerronVector {
    values: Vec<f64>,
    residual: f64,
}

impl PerronVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// ‖φᵀM − φᵀ‖_∞ achieved by the solver.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

fn stationarity_residual(m: &Matrix, phi: &[f64]) -> f64 {
    let moved = m.vec_mul(phi);
    moved.iter().zip(phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
}

fn finish(m: &Matrix, mut phi: Vec<f64>) -> Option<PerronVector> {
    let total: f64 = phi.iter().sum();
    if !total.is_finite() || total == 0.0 {
        return None;
    }
    phi.iter_mut().for_each(|x| *x /= total);
    if phi.iter().any(|&x| x <= 0.0 || !x.is_finite()) {
        return None;
    }
    let residual = stationarity_residual(m, &phi);
    Some(PerronVector { values: phi, residual })
}

/// Direct solve of (Mᵀ − I)φ = 0 with the last equation replaced by Σφ = 1.
fn perron_direct(m: &Matrix) -> Result<Vec<f64>> {
    let n = m.rows();
    let mut system = Matrix::from_fn(n, n, |i, j| m[(j, i)] - if i == j { 1.0 } else { 0.0 });
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = vec![0.0; n];
    rhs[n - 1] = 1.0;
    solve_linear(&system, &rhs)
}

/// Power iteration on the Cesàro average (M + I)/2, which shares φ with M
/// and is aperiodic.
fn perron_power(m: &Matrix) -> Vec<f64> {
    let n = m.rows();
    let mut phi = vec![1.0 / n as f64; n];
    for _ in 0..TOLERANCES.power_max_iterations {
        let moved = m.vec_mul(&phi);
        let next: Vec<f64> = moved.iter().zip(&phi).map(|(a, b)| 0.5 * (a + b)).collect();
        let delta = next.iter().zip(&phi).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        phi = next;
        if delta <= 1e-3 * TOLERANCES.perron_residual {
            break;
        }
    }
    phi
}

/// Stationary distribution of an irreducible M_α.
///
/// The dense direct solve handles periodic chains (α = 0 on a cycle) where
/// plain power iteration oscillates; power iteration on (M + I)/2 is the
/// fallback when the direct solve fails or misses the residual bound.
pub fn perron_vector(m: &StochasticMatrix) -> Result<PerronVector> {
    let matrix = m.matrix();
    if matrix.rows() == 0 {
        return Err(Error::TooFewVertices(0));
    }
    let direct = perron_direct(matrix).ok().and_then(|phi| finish(matrix, phi));
    if let Some(pv) = &direct {
        if pv.residual <= TOLERANCES.perron_residual {
            return Ok(direct.unwrap());
        }
    }
    match finish(matrix, perron_power(matrix)) {
        Some(pv) if pv.residual <= TOLERANCES.perron_residual => Ok(pv),
        Some(pv) => Err(Error::PerronResidual { residual: pv.residual }),
        None => Err(Error::PerronResidual {
            residual: direct.map_or(f64::INFINITY, |pv| pv.residual),
        }),
    }
}

/// φ with an arbitrary positive scale, for invariance checks.
pub fn scaled_phi(phi: &PerronVector, scale: f64) -> Vec<f64> {
    phi.values.iter().map(|x| x * scale).collect()
}

/// Row-stochastic check within the fixed tolerance.
pub fn is_row_stochastic(m: &StochasticMatrix) -> bool {
    m.row_sum_error() <= TOLERANCES.row_sum && (0..m.size()).all(|i| m.matrix().row(i).iter().all(|x| *x >= 0.0))
}
