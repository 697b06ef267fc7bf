//! Poincaré constants of vertex subsets.
//!
//! A set `S` is a lambda-set when every signal `phi` supported on `S`
//! satisfies `‖phi‖ <= lambda ‖L phi‖`. Signals on `S` are zero-extended to
//! the whole graph before the Laplacian is applied, so the smallest
//! admissible `lambda` is `1 / sigma_min` where `sigma_min` is the smallest
//! singular value of the `n x |S|` matrix whose columns are `L delta_v`,
//! `v` in `S`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::dense::thin_svd;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

/// Relative slack used when comparing a minimal constant against a claimed one.
pub const LAMBDA_REL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaCertificate {
    pub subset: VertexSet,
    pub lambda_min: f64,
    pub sigma_min: f64,
    /// Unit-norm signal supported on `subset` attaining `‖L w‖ = sigma_min`.
    pub witness: Vec<f64>,
    pub graph_hash: String,
}

impl LambdaCertificate {
    /// Checks the witness against the stored constants on `g`.
    pub fn witness_residual(&self, g: &Graph) -> f64 {
        let phi = crate::spectral::Signal::from_real(&self.witness);
        let l_phi = crate::spectral::apply_laplacian(g, &phi).expect("witness has length n");
        (l_phi.norm() - self.sigma_min).abs()
    }
}

/// Columns `L delta_v` for `v` in `s`.
pub fn restricted_columns(g: &Graph, s: &VertexSet) -> DMatrix<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut m = DMatrix::zeros(n, s.len());
    for (j, &v) in s.iter().enumerate() {
        m[(v, j)] = 1.0;
        for &u in g.neighbors(v) {
            m[(u, j)] = -inv_sqrt[u] * inv_sqrt[v];
        }
    }
    m
}

pub fn minimal_lambda(g: &Graph, s: &VertexSet) -> Result<LambdaCertificate> {
    g.check_set(s)?;
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if s.len() == g.n() {
        return Err(Error::NoFiniteLambda);
    }
    let svd = thin_svd(&restricted_columns(g, s))?;
    let sigma_min = *svd.sigma.last().expect("nonempty set");
    if sigma_min <= 0.0 || !sigma_min.is_finite() {
        return Err(Error::NoFiniteLambda);
    }
    let mut coeffs: Vec<f64> = svd.v.column(svd.sigma.len() - 1).iter().copied().collect();
    // fix the sign so the largest entry is positive
    let pivot = coeffs
        .iter()
        .copied()
        .max_by(|a, b| a.abs().total_cmp(&b.abs()))
        .unwrap_or(1.0);
    if pivot < 0.0 {
        coeffs.iter_mut().for_each(|c| *c = -*c);
    }
    let mut witness = vec![0.0; g.n()];
    for (&v, c) in s.iter().zip(coeffs) {
        witness[v] = c;
    }
    Ok(LambdaCertificate {
        subset: s.clone(),
        lambda_min: 1.0 / sigma_min,
        sigma_min,
        witness,
        graph_hash: g.hash(),
    })
}

/// Whether `s` is a lambda-set for the given constant; the certificate is returned either way.
pub fn is_lambda_set(g: &Graph, s: &VertexSet, lambda: f64) -> Result<(bool, LambdaCertificate)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive and finite, got {lambda}"
        )));
    }
    let cert = minimal_lambda(g, s)?;
    Ok((cert.lambda_min <= lambda * (1.0 + LAMBDA_REL_SLACK), cert))
}

/// Independent sets are lambda-sets with constant 1.
///
/// Fails with [`Error::NotIndependent`] when two members of `s` are adjacent.
pub fn check_independent_lemma(g: &Graph, s: &VertexSet) -> Result<(bool, LambdaCertificate)> {
    g.check_set(s)?;
    if let Some((u, v)) = g.first_adjacent_pair(s) {
        return Err(Error::NotIndependent(u, v));
    }
    is_lambda_set(g, s, 1.0)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionBound {
    pub lambda_union: f64,
    pub verified: bool,
    pub certificate: LambdaCertificate,
}

/// Union of lambda-sets whose closures are pairwise disjoint.
///
/// Each `subsets[j]` must already be a `lambdas[j]`-set; the union is then
/// checked directly against `max_j lambdas[j]`.
pub fn union_lambda_bound(
    g: &Graph,
    subsets: &[VertexSet],
    lambdas: &[f64],
) -> Result<UnionBound> {
    if subsets.is_empty() || subsets.len() != lambdas.len() {
        return Err(Error::InvalidParameter(format!(
            "need one lambda per subset, got {} subsets and {} lambdas",
            subsets.len(),
            lambdas.len()
        )));
    }
    let closures = subsets
        .iter()
        .map(|s| g.boundary_and_closure(s).map(|(_, c)| c))
        .collect::<Result<Vec<_>>>()?;
    for i in 0..closures.len() {
        for j in i + 1..closures.len() {
            if let Some(vertex) = closures[i].first_common(&closures[j]) {
                return Err(Error::OverlappingClosures {
                    first: i,
                    second: j,
                    vertex,
                });
            }
        }
    }
    for (j, (s, &lambda)) in subsets.iter().zip(lambdas).enumerate() {
        let (ok, cert) = is_lambda_set(g, s, lambda)?;
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "subset {j} has minimal constant {} above the claimed {lambda}",
                cert.lambda_min
            )));
        }
    }
    let lambda_union = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let union = subsets
        .iter()
        .fold(VertexSet::empty(), |acc, s| acc.union(s));
    let (verified, certificate) = is_lambda_set(g, &union, lambda_union)?;
    Ok(UnionBound {
        lambda_union,
        verified,
        certificate,
    })
}
