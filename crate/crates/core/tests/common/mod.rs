//! Independent dense oracles used by the integration tests.
//!
//! Nothing here calls into the library's numerical routines: the Laplacian is
//! rebuilt from the edge list and eigenvalues come from a cyclic Jacobi sweep.

#![allow(dead_code)]

use pwgs::Graph;
use pwgs::generate;

pub type Dense = Vec<Vec<f64>>;

pub fn dense_laplacian(n: usize, edges: &[(usize, usize)]) -> Dense {
    let mut deg = vec![0.0f64; n];
    for &(u, v) in edges {
        deg[u] += 1.0;
        deg[v] += 1.0;
    }
    let mut m = vec![vec![0.0; n]; n];
    for (v, row) in m.iter_mut().enumerate() {
        row[v] = 1.0;
    }
    for &(u, v) in edges {
        let w = -1.0 / (deg[u] * deg[v]).sqrt();
        m[u][v] = w;
        m[v][u] = w;
    }
    m
}

pub fn oracle_laplacian(g: &Graph) -> Dense {
    dense_laplacian(g.n(), &g.edges())
}

/// Eigenvalues of a symmetric matrix, ascending.
pub fn jacobi_eigenvalues(a: Dense) -> Vec<f64> {
    jacobi_eigen_full(a).0
}

/// Smallest singular value of the columns of `l` indexed by `s`, via the Gram matrix.
pub fn oracle_sigma_min(l: &Dense, s: &[usize]) -> f64 {
    let n = l.len();
    let gram: Dense = s
        .iter()
        .map(|&a| {
            s.iter()
                .map(|&b| (0..n).map(|r| l[r][a] * l[r][b]).sum())
                .collect()
        })
        .collect();
    jacobi_eigenvalues(gram)[0].max(0.0).sqrt()
}

/// Frame bounds `(A, B, k)` from the Jacobi eigenbasis of `l`.
pub fn oracle_frame_bounds(l: &Dense, omega: f64, w: &[usize]) -> (f64, f64, usize) {
    let n = l.len();
    let (vals, vecs) = jacobi_eigen_full(l.clone());
    let band: Vec<usize> = (0..n).filter(|&i| vals[i] <= omega + 1e-9).collect();
    let k = band.len();
    let gram: Dense = band
        .iter()
        .map(|&a| {
            band.iter()
                .map(|&b| w.iter().map(|&v| vecs[v][a] * vecs[v][b]).sum())
                .collect()
        })
        .collect();
    let ev = jacobi_eigenvalues(gram);
    let lower = if w.len() < k { 0.0 } else { ev[0].max(0.0) };
    (lower, ev[k - 1], k)
}

/// Eigenvalues (ascending) and eigenvectors (columns) by cyclic Jacobi rotations.
pub fn jacobi_eigen_full(mut a: Dense) -> (Vec<f64>, Dense) {
    let n = a.len();
    let mut v: Dense = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = if theta == 0.0 {
                    1.0
                } else {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| idx.iter().map(|&c| v[r][c]).collect()).collect();
    (vals, vecs)
}

/// Graphs with at most 8 vertices used for exhaustive checks.
pub fn small_family() -> Vec<(String, Graph)> {
    let mut out = Vec::new();
    for n in 2..=8 {
        out.push((format!("path({n})"), generate::path(n).unwrap()));
    }
    for n in 3..=8 {
        out.push((format!("cycle({n})"), generate::cycle(n).unwrap()));
    }
    for n in 2..=6 {
        out.push((format!("complete({n})"), generate::complete(n).unwrap()));
    }
    out.push(("box(2x3)".into(), generate::lattice_box(&[2, 3], false).unwrap()));
    out.push(("box(2x4)".into(), generate::lattice_box(&[2, 4], false).unwrap()));
    out.push(("box(2x2x2)".into(), generate::lattice_box(&[2, 2, 2], false).unwrap()));
    out.push(("tree(3)".into(), generate::radial_tree(&[3]).unwrap()));
    out.push(("tree(2,2)".into(), generate::radial_tree(&[2, 2]).unwrap()));
    for seed in 0..4 {
        out.push((
            format!("random(8,0.3,{seed})"),
            generate::random_connected(8, 0.3, seed).unwrap(),
        ));
    }
    out
}
