//! Normalized Laplacian, its eigendecomposition, and Paley-Wiener projection.
//!
//! The normalized Laplacian acts on a signal `f` by
//!
//! ```text
//! (L f)(v) = 1/sqrt(d(v)) * sum_{u ~ v} ( f(v)/sqrt(d(v)) - f(u)/sqrt(d(u)) )
//! ```
//!
//! which as a matrix is `I - D^{-1/2} A D^{-1/2}`. Its spectrum lies in
//! `[0, 2]` and its kernel on a connected graph is spanned by `v -> sqrt(d(v))`.
//!
//! The Paley-Wiener space `PW_omega` is the span of the eigenvectors whose
//! eigenvalue lies in `[0, omega]`. On a finite graph this is all the spectral
//! machinery needed: the orthogonal eigenbasis plays the role of the
//! spectral transform, and band membership is decided per eigenvalue with a
//! small tie tolerance so values sitting on `omega` do not flap.

use nalgebra::{Complex, DMatrix, DVector, SymmetricEigen};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};

pub type C64 = Complex<f64>;

/// Largest vertex count accepted by [`compute_spectrum`].
pub const DEFAULT_SIZE_LIMIT: usize = 5000;

/// Numerical thresholds shared by everything computed from a [`Spectrum`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Band tie tolerance relative to `max(1, omega_max)`.
    pub tie_tol_rel: f64,
    /// Absolute threshold on the lower frame bound separating sampling sets
    /// from numerically rank-deficient ones.
    pub rank_tol: f64,
    /// Frame condition number above which reports raise a warning.
    pub ill_conditioned: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            tie_tol_rel: 1e-9,
            rank_tol: 1e-10,
            ill_conditioned: 1e8,
        }
    }
}

/// Complex signal indexed by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct Signal(Vec<C64>);

impl Signal {
    pub fn new(values: Vec<C64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::Format(format!("non-finite signal value at vertex {i}")));
        }
        Ok(Signal(values))
    }

    pub fn zeros(n: usize) -> Self {
        Signal(vec![C64::new(0.0, 0.0); n])
    }

    pub fn delta(n: usize, v: usize) -> Self {
        let mut s = Self::zeros(n);
        s.0[v] = C64::new(1.0, 0.0);
        s
    }

    pub fn from_real(values: &[f64]) -> Self {
        Signal(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[C64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<C64> {
        self.0
    }

    pub fn real_part(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.0.iter().map(|z| z.re))
    }

    pub fn imag_part(&self) -> DVector<f64> {
        DVector::from_iterator(self.len(), self.0.iter().map(|z| z.im))
    }

    pub(crate) fn from_parts(re: &DVector<f64>, im: &DVector<f64>) -> Self {
        Signal(re.iter().zip(im.iter()).map(|(&a, &b)| C64::new(a, b)).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `‖f‖_W`: the l2 norm of the samples on `w`.
    pub fn sampled_norm(&self, w: &VertexSet) -> f64 {
        w.iter().map(|&v| self.0[v].norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<f, g> = sum_v f(v) conj(g(v))`.
    pub fn inner(&self, other: &Signal) -> C64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a * b.conj())
            .sum()
    }

    pub fn sub(&self, other: &Signal) -> Signal {
        Signal(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add_scaled(&mut self, scale: C64, other: &Signal) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += scale * b;
        }
    }

    pub fn samples(&self, w: &VertexSet) -> Vec<C64> {
        w.iter().map(|&v| self.0[v]).collect()
    }

    /// Zero-extension of `values` given on `w`.
    pub fn from_samples(n: usize, w: &VertexSet, values: &[C64]) -> Result<Self> {
        if values.len() != w.len() {
            return Err(Error::SampleIndexMismatch(format!(
                "{} samples for a set of {} vertices",
                values.len(),
                w.len()
            )));
        }
        let mut s = Self::zeros(n);
        for (&v, &z) in w.iter().zip(values) {
            s.0[v] = z;
        }
        Ok(s)
    }
}

impl std::ops::Index<usize> for Signal {
    type Output = C64;

    fn index(&self, v: usize) -> &C64 {
        &self.0[v]
    }
}

/// Spectral cutoff `omega >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(omega: f64) -> Result<Self> {
        if omega.is_finite() && omega >= 0.0 {
            Ok(Bandwidth(omega))
        } else {
            Err(Error::InvalidParameter(format!(
                "bandwidth must be finite and nonnegative, got {omega}"
            )))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for Bandwidth {
    type Error = Error;

    fn try_from(omega: f64) -> Result<Self> {
        Bandwidth::new(omega)
    }
}

impl From<Bandwidth> for f64 {
    fn from(b: Bandwidth) -> f64 {
        b.0
    }
}

fn check_len(g_n: usize, f: &Signal) -> Result<()> {
    if f.len() == g_n {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: g_n,
            got: f.len(),
        })
    }
}

/// Matrix-free application of the normalized Laplacian.
pub fn apply_laplacian(g: &Graph, f: &Signal) -> Result<Signal> {
    check_len(g.n(), f)?;
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let out = (0..g.n())
        .map(|v| {
            let fv = f[v] * inv_sqrt[v];
            let acc: C64 = g.neighbors(v).iter().map(|&u| fv - f[u] * inv_sqrt[u]).sum();
            acc * inv_sqrt[v]
        })
        .collect();
    Ok(Signal(out))
}

/// Dense normalized Laplacian `I - D^{-1/2} A D^{-1/2}`.
pub fn laplacian_matrix(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    let inv_sqrt: Vec<f64> = g.degrees().iter().map(|&d| 1.0 / (d as f64).sqrt()).collect();
    let mut m = DMatrix::identity(n, n);
    for v in 0..n {
        for &u in g.neighbors(v) {
            m[(v, u)] = -inv_sqrt[v] * inv_sqrt[u];
        }
    }
    m
}

/// Ascending eigenvalues and the matching orthonormal eigenbasis.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    /// Columns are eigenvectors, in the order of `eigenvalues`.
    eigenvectors: DMatrix<f64>,
    solver_tolerance: f64,
    tolerances: Tolerances,
    graph_hash: String,
}

impl Spectrum {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.eigenvectors
    }

    /// Top of the spectrum, equal to the operator norm of the Laplacian.
    pub fn omega_max(&self) -> f64 {
        self.eigenvalues[self.n() - 1]
    }

    pub fn tolerances(&self) -> Tolerances {
        self.tolerances
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn graph_hash(&self) -> &str {
        &self.graph_hash
    }

    pub fn tie_tol(&self) -> f64 {
        self.tolerances.tie_tol_rel * self.omega_max().max(1.0)
    }

    pub fn rank_tol(&self) -> f64 {
        self.tolerances.rank_tol
    }

    pub fn solver_tolerance(&self) -> f64 {
        self.solver_tolerance
    }

    /// Number of eigenvalues in `[0, omega + tie_tol]`.
    pub fn pw_dimension(&self, omega: Bandwidth) -> usize {
        let cutoff = omega.value() + self.tie_tol();
        self.eigenvalues.partition_point(|&t| t <= cutoff)
    }

    /// The `n x k` matrix of in-band eigenvectors.
    pub fn band_basis(&self, omega: Bandwidth) -> DMatrix<f64> {
        let k = self.pw_dimension(omega);
        self.eigenvectors.columns(0, k).into_owned()
    }

    /// Eigenvalue at `q` in `[0, 1]` by nearest rank over the sorted spectrum.
    pub fn quantile(&self, q: f64) -> Result<Bandwidth> {
        if !(0.0..=1.0).contains(&q) {
            return Err(Error::InvalidParameter(format!("quantile {q} outside [0, 1]")));
        }
        let idx = ((self.n() - 1) as f64 * q).round() as usize;
        Bandwidth::new(self.eigenvalues[idx].max(0.0))
    }

    pub fn export(&self) -> SpectrumExport {
        SpectrumExport {
            eigenvalues: self.eigenvalues.clone(),
            omega_max: self.omega_max(),
            solver_tolerance: self.solver_tolerance,
            tie_tol: self.tie_tol(),
            graph_hash: self.graph_hash.clone(),
        }
    }
}

/// JSON form of a spectrum: eigenvalues only, the basis is recomputed on demand.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumExport {
    pub eigenvalues: Vec<f64>,
    pub omega_max: f64,
    pub solver_tolerance: f64,
    pub tie_tol: f64,
    pub graph_hash: String,
}

pub fn compute_spectrum(g: &Graph) -> Result<Spectrum> {
    compute_spectrum_with_limit(g, DEFAULT_SIZE_LIMIT)
}

pub fn compute_spectrum_with_limit(g: &Graph, limit: usize) -> Result<Spectrum> {
    let n = g.n();
    if n > limit {
        return Err(Error::SizeLimitExceeded { n, limit });
    }
    let solver_tolerance = f64::EPSILON;
    let eig = SymmetricEigen::try_new(laplacian_matrix(g), solver_tolerance, 0)
        .ok_or_else(|| Error::InvalidParameter("symmetric eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..n).collect();
    // stable sort keeps solver order among exact ties
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
        solver_tolerance,
        tolerances: Tolerances::default(),
        graph_hash: g.hash(),
    })
}

/// Coefficients `E^T f` of a signal in the given real basis, split into real and imaginary parts.
fn analyze(basis: &DMatrix<f64>, f: &Signal) -> (DVector<f64>, DVector<f64>) {
    (basis.tr_mul(&f.real_part()), basis.tr_mul(&f.imag_part()))
}

/// Orthogonal projection onto `PW_omega`.
pub fn project_pw(spec: &Spectrum, f: &Signal, omega: Bandwidth) -> Result<Signal> {
    check_len(spec.n(), f)?;
    let basis = spec.band_basis(omega);
    let (re, im) = analyze(&basis, f);
    Ok(Signal::from_parts(&(&basis * re), &(&basis * im)))
}

pub fn pw_dimension(spec: &Spectrum, omega: Bandwidth) -> usize {
    spec.pw_dimension(omega)
}

/// `theta_v`, the projection of the delta at `v` onto `PW_omega`.
///
/// It reproduces point values: `<f, theta_v> = f(v)` for every `f` in the band.
pub fn delta_projection(spec: &Spectrum, omega: Bandwidth, v: usize) -> Result<Signal> {
    if v >= spec.n() {
        return Err(Error::VertexOutOfRange { vertex: v, n: spec.n() });
    }
    let basis = spec.band_basis(omega);
    let row = basis.row(v).transpose();
    Ok(Signal::from_real((&basis * row).as_slice()))
}

/// Real bandlimited signal with standard normal coefficients on the in-band eigenvectors.
pub fn random_bandlimited(spec: &Spectrum, omega: Bandwidth, seed: u64) -> Result<Signal> {
    let basis = nonempty_band(spec, omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs = DVector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut rng));
    Ok(Signal::from_real((&basis * coeffs).as_slice()))
}

/// Like [`random_bandlimited`] with independent real and imaginary coefficients.
pub fn random_bandlimited_complex(spec: &Spectrum, omega: Bandwidth, seed: u64) -> Result<Signal> {
    let basis = nonempty_band(spec, omega)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let re = DVector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut rng));
    let im = DVector::from_fn(basis.ncols(), |_, _| StandardNormal.sample(&mut rng));
    Ok(Signal::from_parts(&(&basis * re), &(&basis * im)))
}

fn nonempty_band(spec: &Spectrum, omega: Bandwidth) -> Result<DMatrix<f64>> {
    let basis = spec.band_basis(omega);
    if basis.ncols() == 0 {
        return Err(Error::EmptyBand {
            omega: omega.value(),
        });
    }
    Ok(basis)
}
