//! Frames of reproducing kernels, dual frames and reconstruction.
//!
//! For a band `PW_omega` with orthonormal basis `E` (`n x k`) and a vertex
//! set `W`, the sampled energy of `f = E c` is
//!
//! ```text
//! ‖f‖_W² = sum_{v in W} |<f, theta_v>|² = c^T M c,   M = E_W^T E_W
//! ```
//!
//! so the optimal frame bounds `A`, `B` are the extreme eigenvalues of the
//! `k x k` Gram matrix `M`. `W` is a sampling set exactly when `A > 0`, and
//! then `‖f‖ <= ‖f‖_W / sqrt(A)` for every bandlimited `f`.
//!
//! Removing a lambda-set `S` with `lambda * omega < 1` always leaves a
//! sampling set, with
//!
//! ```text
//! ‖f‖ <= (1 + lambda * omega_max) / (1 - lambda * omega) * ‖f‖_W.
//! ```
//!
//! Conversely the complement of any sampling set is a lambda-set with
//! `lambda <= (1 + c) / omega` for any valid norm-equivalence constant `c`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::dense::thin_svd;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::lambda::minimal_lambda;
use crate::spectral::{Bandwidth, C64, Signal, Spectrum, random_bandlimited_complex};

/// Relative slack for comparing an empirical constant with a theoretical one.
pub const CERTIFICATE_REL_SLACK: f64 = 1e-6;

/// Number of random bandlimited probes used by the certificates by default.
pub const DEFAULT_TRIALS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameReport {
    pub sampling_set: VertexSet,
    pub omega: Bandwidth,
    pub lower_bound: f64,
    pub upper_bound: f64,
    pub pw_dim: usize,
    /// `B / A`; `None` encodes infinity (`A = 0`).
    pub condition: Option<f64>,
    /// `1 / sqrt(A)` when `A > 0`.
    pub c_omega_empirical: Option<f64>,
    pub rank_tol: f64,
    pub is_sampling_set: bool,
    pub ill_conditioned: bool,
    pub graph_hash: String,
}

fn sampled_rows(basis: &DMatrix<f64>, w: &VertexSet) -> DMatrix<f64> {
    basis.select_rows(w.as_slice())
}

fn check_sampling_set(spec: &Spectrum, w: &VertexSet) -> Result<()> {
    if w.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    let n = spec.n();
    match w.as_slice().last() {
        Some(&vertex) if vertex >= n => Err(Error::VertexOutOfRange { vertex, n }),
        _ => Ok(()),
    }
}

pub fn frame_bounds(spec: &Spectrum, omega: Bandwidth, w: &VertexSet) -> Result<FrameReport> {
    check_sampling_set(spec, w)?;
    let basis = spec.band_basis(omega);
    let k = basis.ncols();
    let rows = sampled_rows(&basis, w);
    let gram = rows.tr_mul(&rows);
    let eig = SymmetricEigen::new(gram).eigenvalues;
    let upper = eig.max();
    let lower = if w.len() < k { 0.0 } else { eig.min().max(0.0) };
    let tol = spec.tolerances();
    let is_sampling_set = lower > tol.rank_tol;
    let condition = (lower > 0.0).then(|| upper / lower);
    Ok(FrameReport {
        sampling_set: w.clone(),
        omega,
        lower_bound: lower,
        upper_bound: upper,
        pw_dim: k,
        condition,
        c_omega_empirical: (lower > 0.0).then(|| 1.0 / lower.sqrt()),
        rank_tol: tol.rank_tol,
        is_sampling_set,
        ill_conditioned: condition.is_none_or(|c| c > tol.ill_conditioned),
        graph_hash: spec.graph_hash().to_owned(),
    })
}

/// Bandlimited signals are determined by their values on `w`.
pub fn is_uniqueness_set(spec: &Spectrum, omega: Bandwidth, w: &VertexSet) -> Result<bool> {
    Ok(frame_bounds(spec, omega, w)?.is_sampling_set)
}

fn require_sampling(report: &FrameReport) -> Result<()> {
    if report.is_sampling_set {
        Ok(())
    } else {
        Err(Error::NotASamplingSet {
            lower_bound: report.lower_bound,
            rank_tol: report.rank_tol,
        })
    }
}

/// Dual frame `Theta_v = F^{-1} theta_v`, one signal per member of `w` in order.
///
/// With `M` the Gram matrix of the sampled basis rows, `Theta_v` is column
/// `v` of `E M^{-1} E_W^T`, so `f = sum_{v in W} f(v) Theta_v` on the band.
pub fn dual_frame(spec: &Spectrum, omega: Bandwidth, w: &VertexSet) -> Result<Vec<Signal>> {
    let report = frame_bounds(spec, omega, w)?;
    require_sampling(&report)?;
    let basis = spec.band_basis(omega);
    let rows = sampled_rows(&basis, w);
    let chol = rows
        .tr_mul(&rows)
        .cholesky()
        .ok_or(Error::NotASamplingSet {
            lower_bound: report.lower_bound,
            rank_tol: report.rank_tol,
        })?;
    let coeffs = chol.solve(&rows.transpose());
    let duals = &basis * coeffs;
    Ok(duals
        .column_iter()
        .map(|col| Signal::from_real(col.as_slice()))
        .collect())
}

/// `sum_j samples[order[j]] * dual[order[j]]`.
pub fn synthesize(dual: &[Signal], samples: &[C64], order: &[usize]) -> Result<Signal> {
    if dual.len() != samples.len() {
        return Err(Error::SampleIndexMismatch(format!(
            "{} samples for {} dual frame elements",
            samples.len(),
            dual.len()
        )));
    }
    let n = dual.first().map_or(0, Signal::len);
    let mut out = Signal::zeros(n);
    for &j in order {
        let theta = dual.get(j).ok_or_else(|| {
            Error::SampleIndexMismatch(format!("order index {j} out of range"))
        })?;
        out.add_scaled(samples[j], theta);
    }
    Ok(out)
}

/// Bandlimited least-squares fit to `samples` given on `w` (in `w`'s order).
///
/// Exact when the samples come from a signal in the band.
pub fn reconstruct(
    spec: &Spectrum,
    omega: Bandwidth,
    w: &VertexSet,
    samples: &[C64],
) -> Result<Signal> {
    if samples.len() != w.len() {
        return Err(Error::SampleIndexMismatch(format!(
            "{} samples for a sampling set of {} vertices",
            samples.len(),
            w.len()
        )));
    }
    let report = frame_bounds(spec, omega, w)?;
    require_sampling(&report)?;
    let basis = spec.band_basis(omega);
    let svd = thin_svd(&sampled_rows(&basis, w))?;
    let re = DVector::from_iterator(samples.len(), samples.iter().map(|z| z.re));
    let im = DVector::from_iterator(samples.len(), samples.iter().map(|z| z.im));
    let solve = |b: &DVector<f64>| &basis * svd.solve(b);
    Ok(Signal::from_parts(&solve(&re), &solve(&im)))
}

/// Largest observed `‖f‖ / ‖f‖_W` and smallest `‖f‖_W / ‖f‖` over random probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormChain {
    pub trials: usize,
    pub seed: u64,
    /// Probes where `‖f‖_W <= ‖f‖ <= c ‖f‖_W` failed.
    pub violations: usize,
    pub max_norm_ratio: f64,
}

fn probe_norm_chain(
    spec: &Spectrum,
    omega: Bandwidth,
    w: &VertexSet,
    c_omega: f64,
    trials: usize,
    seed: u64,
) -> Result<NormChain> {
    let mut violations = 0;
    let mut max_norm_ratio: f64 = 0.0;
    for t in 0..trials {
        let f = random_bandlimited_complex(spec, omega, seed.wrapping_add(t as u64))?;
        let full = f.norm();
        let sampled = f.sampled_norm(w);
        let ratio = if sampled > 0.0 { full / sampled } else { f64::INFINITY };
        max_norm_ratio = max_norm_ratio.max(ratio);
        let slack = 1e-12 * full;
        if sampled > full + slack || full > c_omega * sampled + slack {
            violations += 1;
        }
    }
    Ok(NormChain {
        trials,
        seed,
        violations,
        max_norm_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityCertificate {
    pub lambda_set: VertexSet,
    pub lambda: f64,
    pub omega: Bandwidth,
    pub omega_max: f64,
    /// `(1 + lambda * omega_max) / (1 - lambda * omega)`.
    pub c_omega_theoretical: f64,
    /// `1 / c_omega_theoretical²`, the guaranteed lower frame bound.
    pub lower_bound_guarantee: f64,
    pub lambda_omega: f64,
    pub frame_report: FrameReport,
    pub norm_chain: NormChain,
    /// `1/sqrt(A) <= c_omega_theoretical` up to relative slack.
    pub constant_dominates: bool,
    pub verified: bool,
}

pub fn stability_certificate(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    s: &VertexSet,
) -> Result<StabilityCertificate> {
    stability_certificate_with(g, spec, omega, s, DEFAULT_TRIALS, 0)
}

/// Certifies that `V \ s` samples `PW_omega` stably, using the minimal constant of `s`.
///
/// An empty `s` yields the trivial certificate for full sampling.
pub fn stability_certificate_with(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    s: &VertexSet,
    trials: usize,
    seed: u64,
) -> Result<StabilityCertificate> {
    if g.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: spec.n(),
        });
    }
    let lambda = if s.is_empty() {
        0.0
    } else {
        minimal_lambda(g, s)?.lambda_min
    };
    let lambda_omega = lambda * omega.value();
    if lambda_omega >= 1.0 {
        return Err(Error::BandTooWide {
            product: lambda_omega,
        });
    }
    let omega_max = spec.omega_max();
    let c_omega = (1.0 + lambda * omega_max) / (1.0 - lambda_omega);
    let w = s.complement(g.n());
    let frame_report = frame_bounds(spec, omega, &w)?;
    let norm_chain = probe_norm_chain(spec, omega, &w, c_omega, trials, seed)?;
    let constant_dominates = frame_report
        .c_omega_empirical
        .is_some_and(|c| c <= c_omega * (1.0 + CERTIFICATE_REL_SLACK));
    Ok(StabilityCertificate {
        lambda_set: s.clone(),
        lambda,
        omega,
        omega_max,
        c_omega_theoretical: c_omega,
        lower_bound_guarantee: 1.0 / (c_omega * c_omega),
        lambda_omega,
        verified: constant_dominates && norm_chain.violations == 0,
        frame_report,
        norm_chain,
        constant_dominates,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingLambdaBound {
    pub sampling_set: VertexSet,
    pub omega: Bandwidth,
    /// `1 / sqrt(A)`, the best norm-equivalence constant for the set.
    pub c_omega: f64,
    /// `(1 + c_omega) / omega`.
    pub lambda_bound: f64,
    pub lambda_min: f64,
    /// `lambda_min * omega`, to set against `1 + c_omega`.
    pub lambda_omega: f64,
    pub verified: bool,
}

/// Bounds the Poincaré constant of the complement of a sampling set.
pub fn lambda_bound_from_sampling(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    w: &VertexSet,
) -> Result<SamplingLambdaBound> {
    if omega.value() <= 0.0 {
        return Err(Error::ZeroBandwidth);
    }
    g.check_set(w)?;
    let s = w.complement(g.n());
    if s.is_empty() {
        return Err(Error::ComplementEmpty);
    }
    let report = frame_bounds(spec, omega, w)?;
    require_sampling(&report)?;
    let c_omega = 1.0 / report.lower_bound.sqrt();
    let lambda_bound = (1.0 + c_omega) / omega.value();
    let lambda_min = minimal_lambda(g, &s)?.lambda_min;
    Ok(SamplingLambdaBound {
        sampling_set: w.clone(),
        omega,
        c_omega,
        lambda_bound,
        lambda_min,
        lambda_omega: lambda_min * omega.value(),
        verified: lambda_min <= lambda_bound * (1.0 + CERTIFICATE_REL_SLACK),
    })
}
