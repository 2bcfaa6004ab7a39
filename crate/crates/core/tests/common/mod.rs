#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use cdgraph::generate::random_strongly_connected;
use cdgraph::{DirectedGraph, Matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const ALPHAS: [f64; 4] = [0.0, 0.1, 0.5, 0.9];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Strongly connected digraph with 2 ≤ n ≤ 8 derived from `seed`.
pub fn random_sc_graph(seed: u64) -> DirectedGraph {
    let mut r = rng(seed ^ 0x9e37_79b9_7f4a_7c15);
    let n = r.random_range(2..=8);
    random_strongly_connected(n, 0.4, seed).expect("generator budget")
}

pub fn random_vector(r: &mut impl Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| r.random_range(-1.0..=1.0)).collect()
}

pub fn random_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..=1.0))
}

pub fn random_symmetric(r: &mut impl Rng, n: usize) -> Matrix {
    random_matrix(r, n, n).symmetrized()
}

/// All permutations of 0..n with their signs.
pub fn signed_permutations(n: usize) -> Vec<(f64, Vec<usize>)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    permute(&mut perm, 0, &mut |p| {
        let mut sign = 1.0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    sign = -sign;
                }
            }
        }
        out.push((sign, p.to_vec()));
    });
    out
}

/// Leibniz expansion over a precomputed permutation table.
pub fn leibniz_det_with(a: &Matrix, perms: &[(f64, Vec<usize>)]) -> f64 {
    perms
        .iter()
        .map(|(sign, p)| sign * p.iter().enumerate().map(|(i, &j)| a[(i, j)]).product::<f64>())
        .sum()
}

/// Leibniz expansion; exponential, for n <= 6 only.
pub fn leibniz_det(a: &Matrix) -> f64 {
    leibniz_det_with(a, &signed_permutations(a.rows()))
}

fn permute(p: &mut Vec<usize>, k: usize, visit: &mut dyn FnMut(&[usize])) {
    if k == p.len() {
        visit(p);
        return;
    }
    for i in k..p.len() {
        p.swap(k, i);
        permute(p, k + 1, visit);
        p.swap(k, i);
    }
}

/// Reachability closure by Floyd–Warshall on path lengths.
pub fn floyd_warshall(g: &DirectedGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.vertex_count();
    let mut d = vec![vec![None; n]; n];
    for v in 0..n {
        d[v][v] = Some(0);
    }
    for (u, v) in g.edges() {
        d[u][v] = Some(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}
