//! Small dense linear algebra: row-major matrices, partial-pivot LU solve,
//! cyclic Jacobi for symmetric eigenproblems and the PSD pencil bound used
//! by the curvature module.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Every numerical threshold used by the crate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Row sums of the transition matrix.
    pub row_sum: f64,
    /// ‖φᵀM − φᵀ‖_∞ for the stationary vector.
    pub perron_residual: f64,
    /// Relative eigenvalue threshold below which a direction of G is kernel.
    pub kernel_relative: f64,
    /// Eigenvalues in (εker, borderline_factor·εker] make the split ambiguous.
    pub kernel_borderline_factor: f64,
    /// Allowed negativity of A on ker(G), relative to max(1, ‖A‖_∞).
    pub kernel_psd: f64,
    /// Slack when comparing K_optimal against the theorem bound.
    pub theorem_slack: f64,
    /// Residual below which a sampled CD check counts as a violation.
    pub falsification: f64,
    /// Jacobi sweep budget.
    pub jacobi_max_sweeps: usize,
    /// Power-iteration budget for the stationary-vector fallback.
    pub power_max_iterations: usize,
}

pub const TOLERANCES: Tolerances = Tolerances {
    row_sum: 1e-12,
    perron_residual: 1e-10,
    kernel_relative: 1e-12,
    kernel_borderline_factor: 1e3,
    kernel_psd: 1e-9,
    theorem_slack: 1e-9,
    falsification: 1e-8,
    jacobi_max_sweeps: 50,
    power_max_iterations: 200_000,
};

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.concat(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// xᵀ·self, i.e. self transposed applied to `x`.
    pub fn vec_mul(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                for (o, &a) in out.iter_mut().zip(self.row(i)) {
                    *o += xi * a;
                }
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// fᵀ·self·g.
    pub fn bilinear(&self, f: &[f64], g: &[f64]) -> f64 {
        dot(f, &self.mul_vec(g))
    }

    pub fn quadratic(&self, f: &[f64]) -> f64 {
        self.bilinear(f, f)
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * s).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        self.sub(&other.scaled(-1.0))
    }

    /// (A + Aᵀ)/2.
    pub fn symmetrized(&self) -> Matrix {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| 0.5 * (self[(i, j)] + self[(j, i)]))
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.sub(other).max_abs()
    }

    /// Largest |A_ij − A_ji|.
    pub fn asymmetry(&self) -> f64 {
        self.max_abs_diff(&self.transpose())
    }

    /// Columns `idx` of `self`, in the given order.
    pub fn select_columns(&self, idx: &[usize]) -> Matrix {
        Self::from_fn(self.rows, idx.len(), |i, j| self[(i, idx[j])])
    }

    /// Bᵀ·self·B.
    pub fn congruence(&self, basis: &Matrix) -> Matrix {
        basis.transpose().matmul(&self.matmul(basis))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting, followed
/// by one step of iterative refinement.
pub fn solve_linear(a: &Matrix, b: &[f64]) -> Result<Vec<f64>> {
    if !a.is_square() || a.rows() != b.len() {
        return Err(Error::InvalidArgument(format!(
            "solve_linear needs a square system, got {}x{} with rhs of length {}",
            a.rows(),
            a.cols(),
            b.len()
        )));
    }
    let lu = Lu::factor(a)?;
    let mut x = lu.solve(b);
    let residual: Vec<f64> = b.iter().zip(a.mul_vec(&x)).map(|(bi, axi)| bi - axi).collect();
    let correction = lu.solve(&residual);
    for (xi, ci) in x.iter_mut().zip(correction) {
        *xi += ci;
    }
    Ok(x)
}

struct Lu {
    n: usize,
    factors: Matrix,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(a: &Matrix) -> Result<Self> {
        let n = a.rows();
        let mut m = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let scale = a.max_abs().max(f64::MIN_POSITIVE);
        let threshold = scale * f64::EPSILON * n.max(1) as f64;
        for k in 0..n {
            let (pivot_row, pivot) =
                (k..n)
                    .map(|i| (i, m[(i, k)].abs()))
                    .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot <= threshold {
                return Err(Error::Singular { pivot });
            }
            if pivot_row != k {
                for j in 0..n {
                    let tmp = m[(k, j)];
                    m[(k, j)] = m[(pivot_row, j)];
                    m[(pivot_row, j)] = tmp;
                }
                perm.swap(k, pivot_row);
            }
            let diag = m[(k, k)];
            for i in k + 1..n {
                let factor = m[(i, k)] / diag;
                m[(i, k)] = factor;
                if factor != 0.0 {
                    for j in k + 1..n {
                        m[(i, j)] -= factor * m[(k, j)];
                    }
                }
            }
        }
        Ok(Lu { n, factors: m, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] -= self.factors[(i, j)] * y[j];
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] -= self.factors[(i, j)] * y[j];
            }
            y[i] /= self.factors[(i, i)];
        }
        y
    }
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Clone, Debug)]
pub struct SymmetricEigen {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `k` is the unit eigenvector for `eigenvalues[k]`.
    pub eigenvectors: Matrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k)
    }

    /// V·diag(λ)·Vᵀ.
    pub fn reconstruct(&self) -> Matrix {
        let v = &self.eigenvectors;
        let n = v.rows();
        Matrix::from_fn(n, n, |i, j| {
            (0..self.eigenvalues.len())
                .map(|k| v[(i, k)] * self.eigenvalues[k] * v[(j, k)])
                .sum()
        })
    }
}

/// Cyclic Jacobi eigensolver. Only the upper triangle is trusted; callers
/// symmetrize first.
pub fn sym_eig(a: &Matrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::InvalidArgument("sym_eig needs a square matrix".into()));
    }
    let n = a.rows();
    let mut m = Matrix::from_fn(n, n, |i, j| if i <= j { a[(i, j)] } else { a[(j, i)] });
    let mut v = Matrix::identity(n);
    let frob = m.data.iter().map(|x| x * x).sum::<f64>().sqrt();
    let target = f64::EPSILON * frob;

    let off_norm = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                s += 2.0 * m[(p, q)] * m[(p, q)];
            }
        }
        s.sqrt()
    };

    let mut converged = n < 2 || frob == 0.0;
    let mut sweeps = 0;
    while !converged && sweeps < TOLERANCES.jacobi_max_sweeps {
        sweeps += 1;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let app = m[(p, p)];
                let aqq = m[(q, q)];
                // annihilate apq; negligible entries are flushed to zero
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()).max(f64::MIN_POSITIVE) {
                    m[(p, q)] = 0.0;
                    m[(q, p)] = 0.0;
                    continue;
                }
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        converged = off_norm(&m) <= target;
    }
    if !converged {
        return Err(Error::NoConvergence {
            sweeps,
            off_norm: off_norm(&m),
        });
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].total_cmp(&m[(j, j)]));
    Ok(SymmetricEigen {
        eigenvalues: order.iter().map(|&k| m[(k, k)]).collect(),
        eigenvectors: v.select_columns(&order),
    })
}

/// Largest K with `A − K·G ⪰ 0`, and a direction attaining it.
#[derive(Clone, Debug)]
pub struct PencilBound {
    /// Sup of admissible K; `+∞` when G = 0 and A ⪰ 0, `−∞` when no finite
    /// K works.
    pub min_ratio: f64,
    /// A is positive semidefinite on ker(G) (within tolerance).
    pub kernel_ok: bool,
    pub kernel_dim: usize,
    /// Smallest eigenvalue of A restricted to ker(G) (0 for a trivial kernel).
    pub kernel_min: f64,
    /// Direction f with fᵀAf = min_ratio·fᵀGf and fᵀGf = 1 in the finite
    /// case; a violating direction otherwise. Empty for the `+∞` case.
    pub extremal: Vec<f64>,
}

/// Solves the symmetric pencil `sup { K : A − K·G ⪰ 0 }` for PSD `G`.
///
/// Directions in ker(G) are eliminated exactly: A must be PSD there, its
/// positive part is removed by a Schur complement, and its null part must
/// not couple to the rest. What remains is whitened by the nonzero
/// eigenvalues of G.
pub fn pencil_min_eig(a: &Matrix, g: &Matrix, kernel_tol: f64) -> Result<PencilBound> {
    let n = a.rows();
    if !a.is_square() || !g.is_square() || g.rows() != n {
        return Err(Error::InvalidArgument(
            "pencil needs two square matrices of equal size".into(),
        ));
    }
    let a = a.symmetrized();
    let g_eig = sym_eig(&g.symmetrized())?;
    let g_scale = g_eig.eigenvalues.last().copied().unwrap_or(0.0).abs().max(1.0);
    let threshold = kernel_tol * g_scale;
    if g_eig
        .eigenvalues
        .first()
        .is_some_and(|&l| l < -TOLERANCES.kernel_psd * g_scale)
    {
        return Err(Error::InvalidArgument(format!(
            "pencil denominator is not positive semidefinite (eigenvalue {:e})",
            g_eig.eigenvalues[0]
        )));
    }

    let kernel: Vec<usize> = (0..n).filter(|&k| g_eig.eigenvalues[k] <= threshold).collect();
    let range: Vec<usize> = (0..n).filter(|&k| g_eig.eigenvalues[k] > threshold).collect();
    if let Some(&first) = range.first() {
        let lambda = g_eig.eigenvalues[first];
        if lambda <= TOLERANCES.kernel_borderline_factor * threshold {
            return Err(Error::KernelBorderline {
                gap: lambda / threshold,
            });
        }
    }

    let a_tol = TOLERANCES.kernel_psd * a.norm_inf().max(1.0);
    let kernel_basis = g_eig.eigenvectors.select_columns(&kernel);

    // A on ker(G)
    let (kernel_min, positive, null) = if kernel.is_empty() {
        (0.0, Matrix::zeros(n, 0), Matrix::zeros(n, 0))
    } else {
        let a_nn = a.congruence(&kernel_basis).symmetrized();
        let nn_eig = sym_eig(&a_nn)?;
        let kernel_min = nn_eig.eigenvalues[0];
        if kernel_min < -a_tol {
            let dir = kernel_basis.mul_vec(&nn_eig.vector(0));
            return Ok(PencilBound {
                min_ratio: f64::NEG_INFINITY,
                kernel_ok: false,
                kernel_dim: kernel.len(),
                kernel_min,
                extremal: dir,
            });
        }
        let rotated = kernel_basis.matmul(&nn_eig.eigenvectors);
        let pos: Vec<usize> = (0..kernel.len()).filter(|&k| nn_eig.eigenvalues[k] > a_tol).collect();
        let zero: Vec<usize> = (0..kernel.len()).filter(|&k| nn_eig.eigenvalues[k] <= a_tol).collect();
        (kernel_min, rotated.select_columns(&pos), rotated.select_columns(&zero))
    };

    if range.is_empty() {
        return Ok(PencilBound {
            min_ratio: f64::INFINITY,
            kernel_ok: true,
            kernel_dim: kernel.len(),
            kernel_min,
            extremal: Vec::new(),
        });
    }

    // whitened range basis: columns v_k / sqrt(λ_k), so that Wᵀ G W = I
    let whiten = Matrix::from_fn(n, range.len(), |i, j| {
        let k = range[j];
        g_eig.eigenvectors[(i, k)] / g_eig.eigenvalues[k].sqrt()
    });

    // a null direction of A on ker(G) that still couples to the range makes
    // every finite K fail
    if null.cols() > 0 {
        let coupling = whiten.transpose().matmul(&a.matmul(&null));
        if coupling.max_abs() > a_tol {
            let col = (0..null.cols())
                .max_by(|&x, &y| {
                    let cx = (0..coupling.rows()).map(|r| coupling[(r, x)].abs()).fold(0.0, f64::max);
                    let cy = (0..coupling.rows()).map(|r| coupling[(r, y)].abs()).fold(0.0, f64::max);
                    cx.total_cmp(&cy)
                })
                .unwrap_or(0);
            return Ok(PencilBound {
                min_ratio: f64::NEG_INFINITY,
                kernel_ok: true,
                kernel_dim: kernel.len(),
                kernel_min,
                extremal: null.column(col),
            });
        }
    }

    let b = a.congruence(&whiten);
    let (schur, elimination) = if positive.cols() > 0 {
        // f = W y + P x; minimizing over x gives x = −D⁻¹ Cᵀ y
        let d = a.congruence(&positive).symmetrized();
        let c = whiten.transpose().matmul(&a.matmul(&positive));
        let mut d_inv_ct = Matrix::zeros(positive.cols(), range.len());
        for j in 0..range.len() {
            let col = solve_linear(&d, c.row(j))?;
            for (i, x) in col.into_iter().enumerate() {
                d_inv_ct[(i, j)] = x;
            }
        }
        (b.sub(&c.matmul(&d_inv_ct)).symmetrized(), Some(d_inv_ct))
    } else {
        (b.symmetrized(), None)
    };

    let s_eig = sym_eig(&schur)?;
    let y = s_eig.vector(0);
    let mut f = whiten.mul_vec(&y);
    if let Some(d_inv_ct) = elimination {
        let x = d_inv_ct.mul_vec(&y);
        for (fi, pi) in f.iter_mut().zip(positive.mul_vec(&x)) {
            *fi -= pi;
        }
    }
    Ok(PencilBound {
        min_ratio: s_eig.eigenvalues[0],
        kernel_ok: true,
        kernel_dim: kernel.len(),
        kernel_min,
        extremal: f,
    })
}
