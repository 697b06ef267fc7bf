use proptest::prelude::*;

use pwgs::frames::{dual_frame, frame_bounds, reconstruct, synthesize};
use pwgs::generate::{self, Family};
use pwgs::lambda::{check_independent_lemma, minimal_lambda};
use pwgs::search::{
    SearchConfig, Target, greedy_lambda_set, maximal_independent_set_in_order, prune_sampling_set,
};
use pwgs::spectral::{
    self, Bandwidth, C64, Signal, apply_laplacian, delta_projection, laplacian_matrix, project_pw,
    random_bandlimited_complex,
};
use pwgs::{Graph, VertexSet, build_graph, compute_spectrum};

fn family() -> impl Strategy<Value = Family> {
    prop_oneof![
        (2usize..12).prop_map(|n| Family::Path { n }),
        (3usize..12).prop_map(|n| Family::Cycle { n }),
        (2usize..8).prop_map(|n| Family::Complete { n }),
        (prop::collection::vec(1usize..5, 1..3), any::<bool>()).prop_map(|(dims, wrap)| {
            let dims = if wrap { dims.into_iter().map(|d| d + 2).collect() } else { dims };
            Family::LatticeBox { dims, wraparound: wrap }
        }),
        prop::collection::vec(1usize..4, 1..3).prop_map(|branching| Family::RadialTree { branching }),
        (2usize..30, 0.0f64..0.3, any::<u64>()).prop_map(|(n, p, seed)| Family::RandomConnected { n, p, seed }),
    ]
}

fn graph() -> impl Strategy<Value = Graph> {
    family().prop_filter_map("valid family", |f| generate::generate(&f).ok())
}

fn subset_of(n: usize, bits: u64) -> VertexSet {
    VertexSet::new(n, (0..n).filter(|&v| bits >> (v % 64) & 1 == 1 && v < 64)).unwrap()
}

fn rand_signal(n: usize, seed: u64) -> Signal {
    use rand::{RngExt, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    Signal::new(
        (0..n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn edge_list_round_trip(g in graph()) {
        let rebuilt = build_graph(g.n(), &g.edges()).unwrap();
        prop_assert_eq!(&rebuilt, &g);
        let json = pwgs::io::graph_to_json(&g).unwrap();
        prop_assert_eq!(pwgs::io::read_graph(json.as_bytes()).unwrap(), g);
    }

    #[test]
    fn boundary_and_closure_properties(g in graph(), bits in any::<u64>()) {
        let s = subset_of(g.n(), bits);
        let (b, c) = g.boundary_and_closure(&s).unwrap();
        prop_assert!(b.first_common(&s).is_none());
        prop_assert!(s.is_subset(&c));
        prop_assert_eq!(c.clone(), s.union(&b));
        for &v in &b {
            prop_assert!(g.neighbors(v).iter().any(|&u| s.contains(u)));
        }
        for v in 0..g.n() {
            if !c.contains(v) {
                prop_assert!(g.neighbors(v).iter().all(|&u| !s.contains(u)));
            }
        }
    }

    #[test]
    fn matrix_free_agrees_with_dense(g in graph(), seed in any::<u64>()) {
        let f = rand_signal(g.n(), seed);
        let dense = laplacian_matrix(&g);
        let lf = apply_laplacian(&g, &f).unwrap();
        let want_re = &dense * f.real_part();
        let want_im = &dense * f.imag_part();
        for v in 0..g.n() {
            prop_assert!((lf[v].re - want_re[v]).abs() < 1e-12);
            prop_assert!((lf[v].im - want_im[v]).abs() < 1e-12);
        }
    }

    #[test]
    fn projection_is_orthogonal(g in graph(), q in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let f = rand_signal(g.n(), seed);
        let h = rand_signal(g.n(), seed ^ 1);
        let pf = project_pw(&spec, &f, omega).unwrap();
        let ph = project_pw(&spec, &h, omega).unwrap();
        prop_assert!(project_pw(&spec, &pf, omega).unwrap().sub(&pf).norm() < 1e-12);
        prop_assert!((pf.inner(&h) - f.inner(&ph)).norm() < 1e-12);
        prop_assert!(pf.norm() <= f.norm() * (1.0 + 1e-12));
    }

    #[test]
    fn projections_nest(g in graph(), q1 in 0.0f64..1.0, q2 in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let (lo, hi) = (spec.quantile(q1.min(q2)).unwrap(), spec.quantile(q1.max(q2)).unwrap());
        let f = rand_signal(g.n(), seed);
        let inner = project_pw(&spec, &f, lo).unwrap();
        let outer = project_pw(&spec, &inner, hi).unwrap();
        prop_assert!(outer.sub(&inner).norm() < 1e-12);
        prop_assert!(spec.pw_dimension(lo) <= spec.pw_dimension(hi));
    }

    #[test]
    fn delta_projection_reproduces(g in graph(), q in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let f = random_bandlimited_complex(&spec, omega, seed).unwrap();
        for v in 0..g.n() {
            let theta = delta_projection(&spec, omega, v).unwrap();
            prop_assert!((f.inner(&theta) - f[v]).norm() <= 1e-10 * f.norm().max(1.0));
        }
    }

    #[test]
    fn bernstein_and_operator_norm(g in graph(), q in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let f = random_bandlimited_complex(&spec, omega, seed).unwrap();
        let edge = omega.value() + spec.tie_tol();
        prop_assert!(apply_laplacian(&g, &f).unwrap().norm() <= edge * f.norm() * (1.0 + 1e-9) + 1e-14 * f.norm());
        let h = rand_signal(g.n(), seed);
        prop_assert!(apply_laplacian(&g, &h).unwrap().norm() <= spec.omega_max() * h.norm() * (1.0 + 1e-9));
    }

    #[test]
    fn frame_sandwich_and_monotonicity(g in graph(), q in 0.0f64..1.0, bits in any::<u64>(), extra in any::<u64>(), seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let w = subset_of(g.n(), bits);
        prop_assume!(!w.is_empty());
        let r = frame_bounds(&spec, omega, &w).unwrap();
        prop_assert!(0.0 <= r.lower_bound && r.lower_bound <= r.upper_bound);
        prop_assert!(r.upper_bound <= 1.0 + 1e-9);
        let f = random_bandlimited_complex(&spec, omega, seed).unwrap();
        let energy = f.sampled_norm(&w).powi(2) / f.norm().powi(2);
        prop_assert!(r.lower_bound - 1e-9 <= energy && energy <= r.upper_bound + 1e-9);
        let bigger = w.union(&subset_of(g.n(), extra));
        let rb = frame_bounds(&spec, omega, &bigger).unwrap();
        prop_assert!(r.lower_bound <= rb.lower_bound + 1e-12);
        prop_assert!(r.upper_bound <= rb.upper_bound + 1e-12);
        // sampling set iff the sampled rows have full rank k
        prop_assert_eq!(r.is_sampling_set, r.lower_bound > r.rank_tol);
    }

    #[test]
    fn reconstruction_is_exact_and_order_free(g in graph(), q in 0.0f64..1.0, bits in any::<u64>(), seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let w = subset_of(g.n(), bits);
        prop_assume!(!w.is_empty());
        let r = frame_bounds(&spec, omega, &w).unwrap();
        prop_assume!(r.lower_bound >= 1e-4);
        let f = random_bandlimited_complex(&spec, omega, seed).unwrap();
        let rec = reconstruct(&spec, omega, &w, &f.samples(&w)).unwrap();
        prop_assert!(rec.sub(&f).norm() <= 1e-8 * f.norm());
        let dual = dual_frame(&spec, omega, &w).unwrap();
        let forward: Vec<usize> = (0..w.len()).collect();
        let backward: Vec<usize> = forward.iter().rev().copied().collect();
        let a = synthesize(&dual, &f.samples(&w), &forward).unwrap();
        let b = synthesize(&dual, &f.samples(&w), &backward).unwrap();
        prop_assert!(a.sub(&b).norm() <= 1e-9 * f.norm());
        prop_assert!(a.sub(&f).norm() <= 1e-8 * f.norm());
    }

    #[test]
    fn lambda_monotone_under_inclusion(g in graph(), bits in any::<u64>(), extra in any::<u64>()) {
        let n = g.n();
        let s = subset_of(n, bits);
        let bigger = s.union(&subset_of(n, extra));
        prop_assume!(!s.is_empty() && bigger.len() < n);
        let a = minimal_lambda(&g, &s).unwrap().lambda_min;
        let b = minimal_lambda(&g, &bigger).unwrap().lambda_min;
        prop_assert!(a <= b * (1.0 + 1e-9));
    }

    #[test]
    fn independent_sets_have_lambda_at_most_one(g in graph(), seed in any::<u64>(), keep in 1usize..64) {
        use rand::{SeedableRng, seq::SliceRandom};
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mis = maximal_independent_set_in_order(&g, order);
        let s = VertexSet::new(g.n(), mis.iter().copied().take(keep)).unwrap();
        prop_assume!(s.len() < g.n());
        let (ok, cert) = check_independent_lemma(&g, &s).unwrap();
        prop_assert!(ok, "lambda_min = {}", cert.lambda_min);
        prop_assert!((cert.witness_residual(&g)) <= 1e-9 * cert.sigma_min.max(1.0));
    }

    #[test]
    fn pruned_sets_are_minimal(g in graph(), q in 0.0f64..1.0, a_min in 0.01f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let found = prune_sampling_set(&spec, omega, a_min, seed).unwrap();
        let w = &found.sampling_set;
        prop_assert_eq!(w, &prune_sampling_set(&spec, omega, a_min, seed).unwrap().sampling_set);
        prop_assert!(frame_bounds(&spec, omega, w).unwrap().lower_bound >= a_min * (1.0 - 1e-9));
        if w.len() > spec.pw_dimension(omega) {
            for &v in w {
                let a = frame_bounds(&spec, omega, &w.without(v)).unwrap().lower_bound;
                prop_assert!(a < a_min * (1.0 + 1e-9), "dropping {} keeps A = {}", v, a);
            }
        }
    }

    #[test]
    fn greedy_sets_respect_the_cap(g in graph(), omega in 0.2f64..1.5) {
        let spec = compute_spectrum(&g).unwrap();
        let cfg = SearchConfig::new(Bandwidth::new(omega).unwrap(), Target::MaximizeRemoved);
        match greedy_lambda_set(&g, &spec, &cfg) {
            Ok(found) => {
                let s = &found.certificate.subset;
                prop_assert!(found.certificate.lambda_min < cfg.lambda_cap);
                let again = minimal_lambda(&g, s).unwrap().lambda_min;
                prop_assert!((again - found.certificate.lambda_min).abs() <= 1e-12 * again);
                for step in found.log.iter().filter(|s| s.phase == "grow" && s.accepted) {
                    prop_assert!(step.score < cfg.lambda_cap * (1.0 + 1e-9));
                }
            }
            Err(pwgs::Error::NoAdmissibleSet { .. }) => {
                for v in 0..g.n() {
                    let single = VertexSet::new(g.n(), [v]).unwrap();
                    prop_assert!(minimal_lambda(&g, &single).unwrap().lambda_min >= cfg.lambda_cap);
                }
            }
            Err(e) => prop_assert!(false, "{}", e),
        }
    }

    #[test]
    fn random_bandlimited_is_deterministic(g in graph(), q in 0.0f64..1.0, seed in any::<u64>()) {
        let spec = compute_spectrum(&g).unwrap();
        let omega = spec.quantile(q).unwrap();
        let a = spectral::random_bandlimited(&spec, omega, seed).unwrap();
        prop_assert_eq!(&a, &spectral::random_bandlimited(&spec, omega, seed).unwrap());
        prop_assert!(a.sub(&project_pw(&spec, &a, omega).unwrap()).norm() <= 1e-12 * a.norm().max(1.0));
    }
}

#[test]
fn torus_degrees_are_twice_dimension() {
    for dims in [vec![3, 3], vec![4, 5], vec![3, 3, 3], vec![5]] {
        let g = generate::lattice_box(&dims, true).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 2 * dims.len()), "{dims:?}");
    }
}

#[test]
fn spectrum_is_deterministic() {
    let g = generate::random_connected(40, 0.1, 8).unwrap();
    let a = compute_spectrum(&g).unwrap();
    let b = compute_spectrum(&g).unwrap();
    assert_eq!(a.eigenvalues(), b.eigenvalues());
    assert_eq!(a.eigenvectors(), b.eigenvectors());
    let _ = Bandwidth::new(0.5).unwrap();
}
