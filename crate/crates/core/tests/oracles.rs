//! Library results against the independent dense oracles in `common`.

mod common;

use common::*;
use pwgs::frames::{frame_bounds, reconstruct};
use pwgs::lambda::minimal_lambda;
use pwgs::spectral::{self, Bandwidth, C64, Signal, laplacian_matrix};
use pwgs::{VertexSet, compute_spectrum, generate};
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn bw(x: f64) -> Bandwidth {
    Bandwidth::new(x).unwrap()
}

#[test]
fn laplacian_matches_entrywise_formula() {
    for (name, g) in small_family() {
        let oracle = oracle_laplacian(&g);
        let m = laplacian_matrix(&g);
        for r in 0..g.n() {
            for c in 0..g.n() {
                assert!((m[(r, c)] - oracle[r][c]).abs() < 1e-15, "{name} ({r},{c})");
            }
        }
    }
    let p3 = laplacian_matrix(&generate::path(3).unwrap());
    assert!((p3[(0, 1)] + 0.5f64.sqrt()).abs() < 1e-15);
    assert!((p3[(1, 2)] + 0.5f64.sqrt()).abs() < 1e-15);
}

#[test]
fn spectra_match_jacobi() {
    for (name, g) in small_family() {
        let spec = compute_spectrum(&g).unwrap();
        let oracle = jacobi_eigenvalues(oracle_laplacian(&g));
        for (a, b) in spec.eigenvalues().iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12, "{name}: {a} vs {b}");
        }
    }
}

#[test]
fn closed_form_spectra_against_oracle() {
    // circulant: 1 - cos(2 pi j / n); complete: 0 and n/(n-1)
    for n in 3..=9 {
        let oracle = jacobi_eigenvalues(oracle_laplacian(&generate::cycle(n).unwrap()));
        let mut closed: Vec<f64> = (0..n)
            .map(|j| 1.0 - (2.0 * std::f64::consts::PI * j as f64 / n as f64).cos())
            .collect();
        closed.sort_by(f64::total_cmp);
        for (a, b) in oracle.iter().zip(&closed) {
            assert!((a - b).abs() < 1e-12);
        }
        let spec = compute_spectrum(&generate::complete(n).unwrap()).unwrap();
        assert!(spec.eigenvalues()[0].abs() < 1e-12);
        for &t in &spec.eigenvalues()[1..] {
            assert!((t - n as f64 / (n as f64 - 1.0)).abs() < 1e-12);
        }
    }
}

/// Every proper nonempty subset of every small graph.
#[test]
fn exhaustive_lambda_against_oracle() {
    let mut checked = 0;
    for (name, g) in small_family() {
        let n = g.n();
        let l = oracle_laplacian(&g);
        for mask in 1u32..(1 << n) - 1 {
            let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let s = VertexSet::new(n, members.iter().copied()).unwrap();
            let cert = minimal_lambda(&g, &s).unwrap();
            let oracle = 1.0 / oracle_sigma_min(&l, &members);
            let rel = (cert.lambda_min - oracle).abs() / oracle;
            assert!(rel <= 1e-10, "{name} {members:?}: {} vs {oracle}", cert.lambda_min);
            let resid = cert.witness_residual(&g);
            assert!(resid <= 1e-9 * cert.sigma_min, "{name} {members:?}: witness off by {resid}");
            assert!(cert.witness.iter().enumerate().all(|(v, &x)| x == 0.0 || s.contains(v)));
            checked += 1;
        }
    }
    assert!(checked > 2000);
}

#[test]
fn worked_lambda_values() {
    let p3 = generate::path(3).unwrap();
    let s0 = VertexSet::new(3, [0]).unwrap();
    let oracle = 1.0 / oracle_sigma_min(&oracle_laplacian(&p3), &[0]);
    assert!((oracle - (2.0f64 / 3.0).sqrt()).abs() < 1e-14);
    assert!((minimal_lambda(&p3, &s0).unwrap().lambda_min - oracle).abs() < 1e-12);

    let c4 = generate::cycle(4).unwrap();
    let oracle = 1.0 / oracle_sigma_min(&oracle_laplacian(&c4), &[0, 2]);
    assert!((oracle - 1.0).abs() < 1e-14);
}

#[test]
fn frame_bounds_match_oracle() {
    let cases: Vec<(pwgs::Graph, f64)> = vec![
        (generate::path(3).unwrap(), 1.0),
        (generate::path(6).unwrap(), 0.7),
        (generate::cycle(7).unwrap(), 0.9),
        (generate::lattice_box(&[2, 4], false).unwrap(), 1.1),
        (generate::random_connected(8, 0.3, 2).unwrap(), 0.8),
    ];
    for (g, omega) in cases {
        let spec = compute_spectrum(&g).unwrap();
        let l = oracle_laplacian(&g);
        let n = g.n();
        for mask in 1u32..(1 << n) {
            let members: Vec<usize> = (0..n).filter(|&v| mask & (1 << v) != 0).collect();
            let w = VertexSet::new(n, members.iter().copied()).unwrap();
            let r = frame_bounds(&spec, bw(omega), &w).unwrap();
            let (a, b, k) = oracle_frame_bounds(&l, omega, &members);
            assert_eq!(r.pw_dim, k);
            assert!((r.lower_bound - a).abs() < 1e-11, "{members:?}: {} vs {a}", r.lower_bound);
            assert!((r.upper_bound - b).abs() < 1e-11);
        }
    }
}

#[test]
fn p3_worked_frame() {
    let spec = compute_spectrum(&generate::path(3).unwrap()).unwrap();
    let r = frame_bounds(&spec, bw(1.0), &VertexSet::new(3, [0, 1]).unwrap()).unwrap();
    assert!((r.lower_bound - 0.25).abs() < 1e-12);
    assert!((r.upper_bound - 1.0).abs() < 1e-12);
    let (a, b, _) = oracle_frame_bounds(&oracle_laplacian(&generate::path(3).unwrap()), 1.0, &[0, 1]);
    assert!((a - 0.25).abs() < 1e-12 && (b - 1.0).abs() < 1e-12);
}

#[test]
fn projection_matches_oracle_eigenbasis() {
    let g = generate::lattice_box(&[2, 4], false).unwrap();
    let spec = compute_spectrum(&g).unwrap();
    let (vals, vecs) = jacobi_eigen_full(oracle_laplacian(&g));
    let n = g.n();
    let omega = 1.2;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let f: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let mut want = vec![0.0; n];
    for i in (0..n).filter(|&i| vals[i] <= omega + 1e-9) {
        let c: f64 = (0..n).map(|v| f[v] * vecs[v][i]).sum();
        for v in 0..n {
            want[v] += c * vecs[v][i];
        }
    }
    let got = spectral::project_pw(&spec, &Signal::from_real(&f), bw(omega)).unwrap();
    for v in 0..n {
        assert!((got[v].re - want[v]).abs() < 1e-12);
    }
}

#[test]
fn noisy_reconstruction_is_stable() {
    let g = generate::path(3).unwrap();
    let spec = compute_spectrum(&g).unwrap();
    let w = VertexSet::new(3, [0, 1]).unwrap();
    let a = frame_bounds(&spec, bw(1.0), &w).unwrap().lower_bound;
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for seed in 0..100 {
        let f = spectral::random_bandlimited(&spec, bw(1.0), seed).unwrap();
        let noise: Vec<C64> = (0..2)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)) * 0.01)
            .collect();
        let noisy: Vec<C64> = f.samples(&w).iter().zip(&noise).map(|(x, e)| x + e).collect();
        let rec = reconstruct(&spec, bw(1.0), &w, &noisy).unwrap();
        let err = rec.sub(&f).norm();
        let e_norm = noise.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!(err <= e_norm / a.sqrt() + 1e-9, "{err} > {}", e_norm / a.sqrt());
    }
}

#[test]
fn reconstruction_of_inconsistent_samples_is_least_squares() {
    // on a cycle with a two-dimensional band the fit must satisfy the normal equations
    let g = generate::cycle(6).unwrap();
    let spec = compute_spectrum(&g).unwrap();
    let omega = bw(0.6);
    let w = VertexSet::new(6, [0, 1, 3, 4]).unwrap();
    let samples = [1.0, -2.0, 0.5, 3.0].map(|x| C64::new(x, 0.0));
    let rec = reconstruct(&spec, omega, &w, &samples).unwrap();
    let residual: Vec<C64> = rec.samples(&w).iter().zip(&samples).map(|(a, b)| a - b).collect();
    let resid_signal = Signal::from_samples(6, &w, &residual).unwrap();
    let back = spectral::project_pw(&spec, &resid_signal, omega).unwrap();
    assert!(back.norm() < 1e-12);
    let again = spectral::project_pw(&spec, &rec, omega).unwrap();
    assert!(again.sub(&rec).norm() < 1e-12);
}

#[test]
fn lambda_matches_oracle_on_larger_graphs() {
    let graphs = [
        generate::cycle(120).unwrap(),
        generate::path(50).unwrap(),
        generate::lattice_box(&[6, 6], false).unwrap(),
        generate::random_connected(60, 0.05, 4).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in &graphs {
        let n = g.n();
        let l = oracle_laplacian(g);
        for _ in 0..20 {
            let mut ids: Vec<usize> = (0..n).collect();
            ids.shuffle(&mut rng);
            ids.truncate(rng.random_range(1..40.min(n)));
            let s = VertexSet::new(n, ids.iter().copied()).unwrap();
            let cert = minimal_lambda(g, &s).unwrap();
            let oracle = 1.0 / oracle_sigma_min(&l, s.as_slice());
            assert!((cert.lambda_min - oracle).abs() <= 1e-8 * oracle, "{} vs {oracle}", cert.lambda_min);
            assert!(cert.witness_residual(g) <= 1e-9 * cert.sigma_min.max(1.0));
        }
    }
}

/// A tall, well-conditioned system on which a bidiagonal SVD once lost three digits.
#[test]
fn reconstruction_on_long_cycle() {
    let g = generate::cycle(120).unwrap();
    let spec = compute_spectrum(&g).unwrap();
    let omega = spec.quantile(0.25).unwrap();
    let next = spec.eigenvalues().iter().copied().find(|&t| t > omega.value() + 1e-6).unwrap();
    let omega = bw(0.5 * (omega.value() + next));
    let w = pwgs::search::prune_sampling_set(&spec, omega, 0.5, 70_000).unwrap().sampling_set;
    assert!(frame_bounds(&spec, omega, &w).unwrap().lower_bound >= 0.5 * (1.0 - 1e-9));
    for seed in 0..20 {
        let f = spectral::random_bandlimited_complex(&spec, omega, seed).unwrap();
        let rec = reconstruct(&spec, omega, &w, &f.samples(&w)).unwrap();
        assert!(rec.sub(&f).norm() <= 1e-10 * f.norm());
    }
}
