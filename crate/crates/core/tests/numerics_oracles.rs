mod common;

use cdgraph::numerics::{norm_inf, pencil_min_eig, solve_linear, sym_eig, Matrix};
use common::{leibniz_det, leibniz_det_with, random_matrix, random_symmetric, rng, signed_permutations};
use proptest::prelude::*;
use rand::Rng;

/// x_i = det(A with column i replaced by b) / det(A).
fn cramer(a: &Matrix, b: &[f64]) -> Vec<f64> {
    let det = leibniz_det(a);
    (0..a.rows())
        .map(|i| {
            let ai = Matrix::from_fn(a.rows(), a.cols(), |r, c| if c == i { b[r] } else { a[(r, c)] });
            leibniz_det(&ai) / det
        })
        .collect()
}

#[test]
fn solve_matches_cramer() {
    let mut r = rng(7);
    let mut checked = 0;
    while checked < 200 {
        let n = r.random_range(1..=6);
        let a = random_matrix(&mut r, n, n);
        if leibniz_det(&a).abs() < 1e-2 {
            continue;
        }
        let b: Vec<f64> = (0..n).map(|_| r.random_range(-2.0..=2.0)).collect();
        let x = solve_linear(&a, &b).unwrap();
        let oracle = cramer(&a, &b);
        for (xi, oi) in x.iter().zip(&oracle) {
            assert!((xi - oi).abs() <= 1e-9 * oi.abs().max(1.0), "{x:?} vs {oracle:?}");
        }
        let residual: Vec<f64> = a.mul_vec(&x).iter().zip(&b).map(|(p, q)| p - q).collect();
        assert!(norm_inf(&residual) <= 1e-9 * norm_inf(&b).max(1.0));
        checked += 1;
    }
}

/// Roots of det(A − λI) located by scanning a Gershgorin interval for sign
/// changes and bisecting. Returns `None` when roots are too close to separate.
fn characteristic_roots(a: &Matrix) -> Option<Vec<f64>> {
    let n = a.rows();
    let radius = a.norm_inf() + 1.0;
    let perms = signed_permutations(n);
    let p = |lambda: f64| {
        leibniz_det_with(
            &Matrix::from_fn(n, n, |i, j| a[(i, j)] - if i == j { lambda } else { 0.0 }),
            &perms,
        )
    };
    let steps = 5_000;
    let h = 2.0 * radius / steps as f64;
    let mut roots = Vec::new();
    let mut prev_x = -radius;
    let mut prev_p = p(prev_x);
    for s in 1..=steps {
        let x = -radius + h * s as f64;
        let px = p(x);
        if px == 0.0 || (px > 0.0) != (prev_p > 0.0) {
            let (mut lo, mut hi, mut plo) = (prev_x, x, prev_p);
            for _ in 0..100 {
                let mid = 0.5 * (lo + hi);
                let pm = p(mid);
                if (pm > 0.0) == (plo > 0.0) && pm != 0.0 {
                    lo = mid;
                    plo = pm;
                } else {
                    hi = mid;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_p = px;
    }
    (roots.len() == n).then_some(roots)
}

#[test]
fn eigenvalues_match_characteristic_polynomial() {
    let mut r = rng(11);
    let mut checked = 0;
    let mut attempts = 0;
    while checked < 40 {
        attempts += 1;
        assert!(attempts < 400, "too many inseparable cases");
        let n = r.random_range(1..=6);
        let a = random_symmetric(&mut r, n);
        let Some(roots) = characteristic_roots(&a) else {
            continue;
        };
        let eig = sym_eig(&a).unwrap();
        for (l, root) in eig.eigenvalues.iter().zip(&roots) {
            assert!((l - root).abs() <= 1e-8, "{:?} vs {roots:?}", eig.eigenvalues);
        }
        checked += 1;
    }
}

fn min_eig(a: &Matrix) -> f64 {
    sym_eig(a).unwrap().eigenvalues[0]
}

/// Largest K with min eig(A − K·G) ≥ −tol, by bisection on [−bound, bound].
fn bisection_pencil(a: &Matrix, g: &Matrix, bound: f64) -> f64 {
    let tol = 1e-12 * a.norm_inf().max(g.norm_inf()).max(1.0);
    let psd = |k: f64| min_eig(&a.sub(&g.scaled(k))) >= -tol;
    if !psd(-bound) {
        return f64::NEG_INFINITY;
    }
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if psd(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Random PSD G of rank `rank` and symmetric A, positive definite on ker(G)
/// when `definite_kernel`.
fn pencil_case(r: &mut impl Rng, n: usize, rank: usize, definite_kernel: bool) -> (Matrix, Matrix) {
    let b = random_matrix(r, rank, n);
    let g = b.transpose().matmul(&b).symmetrized();
    let shift = if definite_kernel { n as f64 } else { 0.0 };
    let a = random_symmetric(r, n).add(&Matrix::identity(n).scaled(shift));
    (a, g)
}

#[test]
fn pencil_matches_bisection() {
    let mut r = rng(23);
    for case in 0..120 {
        let n = r.random_range(1..=5);
        let rank = r.random_range(1..=n);
        let (a, g) = pencil_case(&mut r, n, rank, true);
        let Ok(p) = pencil_min_eig(&a, &g, 1e-12) else { continue };
        let oracle = bisection_pencil(&a, &g, 1e4);
        assert!(p.kernel_ok);
        assert!(
            (p.min_ratio - oracle).abs() <= 1e-6,
            "case {case}: {} vs {oracle}",
            p.min_ratio
        );
        let f = &p.extremal;
        let gf = g.quadratic(f);
        assert!((gf - 1.0).abs() < 1e-8);
        assert!((a.quadratic(f) - p.min_ratio * gf).abs() < 1e-8);
    }
}

#[test]
fn pencil_detects_indefinite_kernel() {
    // A = −I is negative on every kernel direction
    let mut r = rng(29);
    for _ in 0..20 {
        let n = r.random_range(2..=5);
        let (_, g) = pencil_case(&mut r, n, n - 1, false);
        let a = Matrix::identity(n).scaled(-1.0);
        let p = pencil_min_eig(&a, &g, 1e-12).unwrap();
        assert!(!p.kernel_ok);
        assert_eq!(p.min_ratio, f64::NEG_INFINITY);
        assert_eq!(bisection_pencil(&a, &g, 1e4), f64::NEG_INFINITY);
        assert!(a.quadratic(&p.extremal) < 0.0 && g.quadratic(&p.extremal).abs() < 1e-10);
    }
}

#[test]
fn pencil_congruence_invariance() {
    let mut r = rng(31);
    for _ in 0..50 {
        let n = r.random_range(2..=5);
        let rank = r.random_range(1..=n);
        let (a, g) = pencil_case(&mut r, n, rank, true);
        let s = Matrix::from_fn(n, n, |i, j| if i == j { r.random_range(0.5..2.0) } else { 0.0 });
        let (Ok(p), Ok(q)) = (
            pencil_min_eig(&a, &g, 1e-12),
            pencil_min_eig(&a.congruence(&s), &g.congruence(&s), 1e-12),
        ) else {
            continue;
        };
        assert!((p.min_ratio - q.min_ratio).abs() <= 1e-8 * p.min_ratio.abs().max(1.0));
    }
}

proptest! {
    #[test]
    fn eig_reconstructs(seed in any::<u64>(), n in 1usize..9) {
        let mut r = rng(seed);
        let a = random_symmetric(&mut r, n).scaled(r.random_range(0.01..100.0));
        let eig = sym_eig(&a).unwrap();
        let scale = a.norm_inf().max(1.0);
        prop_assert!(eig.reconstruct().max_abs_diff(&a) <= 1e-9 * scale);
        let v = &eig.eigenvectors;
        prop_assert!(v.transpose().matmul(v).max_abs_diff(&Matrix::identity(n)) <= 1e-10);
        for k in 0..n {
            let vk = eig.vector(k);
            let av = a.mul_vec(&vk);
            let res: Vec<f64> = av.iter().zip(&vk).map(|(x, y)| x - eig.eigenvalues[k] * y).collect();
            prop_assert!(norm_inf(&res) <= 1e-10 * scale);
        }
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}
