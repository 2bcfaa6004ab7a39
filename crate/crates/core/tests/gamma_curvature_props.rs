#![allow(clippy::needless_range_loop)]

mod common;

use cdgraph::stochastic::scaled_phi;
use cdgraph::{
    build_probability_matrix, check_cd, local_constant_c, optimal_k, perron_vector, sym_eig, theorem_bound,
    verify_graph, Dimension, Matrix, OperatorBundle, VerifyOptions,
};
use common::{random_sc_graph, random_vector, rng, ALPHAS};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn bundle(seed: u64, alpha: f64) -> OperatorBundle {
    OperatorBundle::from_graph(&random_sc_graph(seed), alpha).unwrap().0
}

const DIMS: [Dimension; 4] = [
    Dimension::Finite(1.0),
    Dimension::Finite(2.0),
    Dimension::Finite(10.0),
    Dimension::Infinite,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn laplacian_structure(seed in any::<u64>(), ai in 0usize..4) {
        let alpha = ALPHAS[ai];
        let g = random_sc_graph(seed);
        let b = OperatorBundle::from_graph(&g, alpha).unwrap().0;
        let n = b.size();
        let l = b.laplacian();
        let w = b.weights();
        for i in 0..n {
            prop_assert!(l.row(i).iter().sum::<f64>().abs() <= 1e-12);
            for j in 0..n {
                prop_assert!(w[(i, j)] >= 0.0);
                let positive = g.has_edge(i, j) || (i == j && alpha > 0.0);
                prop_assert_eq!(w[(i, j)] > 0.0, positive);
            }
        }
        let d_phi_l = Matrix::from_fn(n, n, |i, j| b.phi()[i] * l[(i, j)]);
        prop_assert!(d_phi_l.asymmetry() <= 1e-10);
    }

    #[test]
    fn conservation_and_self_adjointness(seed in any::<u64>(), ai in 0usize..4) {
        let b = bundle(seed, ALPHAS[ai]);
        let mut r = rng(seed);
        let f = random_vector(&mut r, b.size());
        let g = random_vector(&mut r, b.size());
        let lf = b.apply_laplacian(&f);
        let lg = b.apply_laplacian(&g);
        let phi = b.phi();
        let total: f64 = phi.iter().zip(&lf).map(|(p, x)| p * x).sum();
        prop_assert!(total.abs() <= 1e-10);
        let left: f64 = (0..b.size()).map(|i| phi[i] * lf[i] * g[i]).sum();
        let right: f64 = (0..b.size()).map(|i| phi[i] * f[i] * lg[i]).sum();
        prop_assert!((left - right).abs() <= 1e-10);
    }

    #[test]
    fn gamma_symmetry_bilinearity_positivity(seed in any::<u64>(), ai in 0usize..4, a in -3.0f64..3.0, c in -3.0f64..3.0) {
        let b = bundle(seed, ALPHAS[ai]);
        let n = b.size();
        let mut r = rng(seed);
        let f = random_vector(&mut r, n);
        let g = random_vector(&mut r, n);
        let h = random_vector(&mut r, n);
        let combo: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + c * y).collect();
        for i in 0..n {
            prop_assert!((b.gamma(&f, &g, i) - b.gamma(&g, &f, i)).abs() <= 1e-12);
            let lin = a * b.gamma(&f, &g, i) + c * b.gamma(&h, &g, i);
            prop_assert!((b.gamma(&combo, &g, i) - lin).abs() <= 1e-11);
            prop_assert!(b.gamma(&f, &f, i) >= -1e-12);
            prop_assert!((b.gamma_closed_form(&f, i) - b.gamma(&f, &f, i)).abs() <= 1e-9);
        }
    }

    #[test]
    fn forms_reproduce_scalar_evaluators(seed in any::<u64>(), ai in 0usize..4) {
        let b = bundle(seed, ALPHAS[ai]);
        let n = b.size();
        let forms = b.assemble_forms();
        let mut r = rng(seed);
        let f = random_vector(&mut r, n);
        let ones = vec![1.0; n];
        for i in 0..n {
            let v = forms.vertex(i);
            prop_assert!((v.gamma_value(&f) - b.gamma(&f, &f, i)).abs() <= 1e-10);
            prop_assert!((v.gamma2_value(&f) - b.gamma2_scalar(&f, i)).abs() <= 1e-10);
            prop_assert!((v.laplacian_value(&f) - b.laplacian_at(&f, i)).abs() <= 1e-12);
            prop_assert!(v.laplacian_value(&ones).abs() <= 1e-12);
            prop_assert!(v.gamma.mul_vec(&ones).iter().all(|x| x.abs() <= 1e-12));
            prop_assert_eq!(v.gamma.asymmetry(), 0.0);
            prop_assert_eq!(v.gamma2.asymmetry(), 0.0);
            prop_assert!(sym_eig(&v.gamma).unwrap().eigenvalues[0] >= -1e-10);
        }
    }

    #[test]
    fn phi_scale_invariance(seed in any::<u64>(), ai in 0usize..4) {
        let alpha = ALPHAS[ai];
        let g = random_sc_graph(seed);
        let m = build_probability_matrix(&g, alpha).unwrap();
        let phi = perron_vector(&m).unwrap();
        let base = OperatorBundle::new(&g, &m, phi.values()).unwrap();
        let doubled = OperatorBundle::new(&g, &m, &scaled_phi(&phi, 2.0)).unwrap();
        prop_assert!(base.laplacian().max_abs_diff(doubled.laplacian()) <= 1e-12);
        let f = random_vector(&mut rng(seed), g.vertex_count());
        for i in 0..g.vertex_count() {
            prop_assert!((base.gamma(&f, &f, i) - doubled.gamma(&f, &f, i)).abs() <= 1e-12);
            prop_assert!((base.gamma2_scalar(&f, i) - doubled.gamma2_scalar(&f, i)).abs() <= 1e-12);
            prop_assert!((local_constant_c(&base, i) - local_constant_c(&doubled, i)).abs() <= 1e-12);
        }
    }

    #[test]
    fn theorem_bound_holds(seed in any::<u64>(), ai in 0usize..4) {
        let alpha = ALPHAS[ai];
        let b = bundle(seed, alpha);
        let forms = b.assemble_forms();
        for i in 0..b.size() {
            let c = local_constant_c(&b, i);
            prop_assert!(c > 0.0);
            let k = optimal_k(&forms, i, Dimension::Finite(2.0)).unwrap();
            prop_assert!(k.value >= theorem_bound(c, alpha) - 1e-9, "vertex {}: {} < {}", i, k.value, theorem_bound(c, alpha));
        }
    }

    #[test]
    fn optimal_k_monotone_in_m(seed in any::<u64>(), ai in 0usize..4) {
        let b = bundle(seed, ALPHAS[ai]);
        let forms = b.assemble_forms();
        for i in 0..b.size() {
            let ks: Vec<f64> = DIMS.iter().map(|&m| optimal_k(&forms, i, m).unwrap().value).collect();
            prop_assert!(ks.windows(2).all(|w| w[0] <= w[1] + 1e-9), "{:?}", ks);
        }
    }

    #[test]
    fn pencil_consistency(seed in any::<u64>(), ai in 0usize..4) {
        let b = bundle(seed, ALPHAS[ai]);
        let forms = b.assemble_forms();
        let n = b.size();
        for i in 0..n {
            let m = Dimension::Finite(2.0);
            let k = optimal_k(&forms, i, m).unwrap();
            let v = forms.vertex(i);
            let l = &v.laplacian_row;
            let a = Matrix::from_fn(n, n, |p, q| v.gamma2[(p, q)] - 0.5 * l[p] * l[q]);
            let below = sym_eig(&a.sub(&v.gamma.scaled(k.value - 1e-6))).unwrap().eigenvalues[0];
            prop_assert!(below >= -1e-9);
            let above = check_cd(&forms, i, m, k.value + 1e-6, &k.extremal);
            prop_assert!(above < 0.0);
            let min_above = sym_eig(&a.sub(&v.gamma.scaled(k.value + 1e-6))).unwrap().eigenvalues[0];
            prop_assert!(min_above < 0.0);
        }
    }

    #[test]
    fn falsification_never_fires_at_safe_k(seed in any::<u64>(), ai in 0usize..4) {
        let alpha = ALPHAS[ai];
        let b = bundle(seed, alpha);
        let forms = b.assemble_forms();
        let n = b.size();
        let mut r = rng(seed);
        for i in 0..n {
            let m = Dimension::Finite(2.0);
            let kt = theorem_bound(local_constant_c(&b, i), alpha);
            let ko = optimal_k(&forms, i, m).unwrap().value;
            let k = kt.min(ko);
            for _ in 0..50 {
                let f = cdgraph::curvature::sample_function(&mut r, n);
                prop_assert!(check_cd(&forms, i, m, k, &f) >= -1e-8);
            }
        }
    }

    #[test]
    fn report_is_relabeling_equivariant(seed in any::<u64>(), ai in 0usize..4) {
        let alpha = ALPHAS[ai];
        let g = random_sc_graph(seed);
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng(seed ^ 5));
        let h = g.permuted(&perm).unwrap();
        let opts = VerifyOptions { samples: 0, ..VerifyOptions::default() };
        let rg = verify_graph(&g, alpha, Dimension::Finite(2.0), &opts).unwrap();
        let rh = verify_graph(&h, alpha, Dimension::Finite(2.0), &opts).unwrap();
        for v in 0..n {
            let a = &rg.vertices[v];
            let b = &rh.vertices[perm[v]];
            prop_assert_eq!(&a.label, &b.label);
            prop_assert!((a.phi - b.phi).abs() <= 1e-12);
            prop_assert!((a.c - b.c).abs() <= 1e-12);
            prop_assert!((a.k_optimal - b.k_optimal).abs() <= 1e-9);
            prop_assert_eq!(a.cd_holds, b.cd_holds);
        }
    }
}

#[test]
fn printed_lemma_oracles_are_reported() {
    // reconciliation only: record how far the printed closed forms drift
    let mut worst_delta_gamma: f64 = 0.0;
    let mut worst_gamma_delta: f64 = 0.0;
    for seed in 0..40 {
        let b = bundle(seed, ALPHAS[(seed % 4) as usize]);
        let f = random_vector(&mut rng(seed), b.size());
        for i in 0..b.size() {
            worst_delta_gamma = worst_delta_gamma.max(b.reconcile_delta_gamma(&f, i).deviation());
            worst_gamma_delta = worst_gamma_delta.max(b.reconcile_gamma_delta(&f, i).deviation());
            let constant = vec![0.7; b.size()];
            assert!(b.delta_gamma_closed_form(&constant, i).abs() < 1e-12);
            assert!(b.gamma_delta_closed_form(&constant, i).abs() < 1e-12);
        }
    }
    println!("printed ΔΓ closed form: max deviation {worst_delta_gamma:e}");
    println!("printed 2Γ(Δf,f) closed form: max deviation {worst_gamma_delta:e}");
    assert!(worst_delta_gamma.is_finite() && worst_gamma_delta.is_finite());
}
