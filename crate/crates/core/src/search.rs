//! Greedy construction of lambda-sets and pruning of sampling sets.
//!
//! Large lambda-sets with `lambda * omega < 1` give small sampling sets by
//! complement. Growth starts from a maximal independent set when that set is
//! already admissible (independent sets have constant at most 1), and each
//! step adds the vertex keeping the Poincaré constant smallest. Candidates
//! are ranked with the Gram route (`(L^2)[S,S]`), and every accepted set is
//! re-certified with a singular value decomposition.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::SeedableRng;
use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{FrameReport, frame_bounds};
use crate::graph::{Graph, VertexSet};
use crate::lambda::{LambdaCertificate, minimal_lambda};
use crate::spectral::{Bandwidth, Spectrum, laplacian_matrix};

pub const DEFAULT_MARGIN: f64 = 1e-3;
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

// relative window inside which two greedy scores count as tied
const TIE_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    MaximizeRemoved,
    MinimizeSamples,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub omega: Bandwidth,
    pub target: Target,
    pub lambda_cap: f64,
    pub seed: u64,
    pub max_iterations: usize,
}

impl SearchConfig {
    /// Defaults: cap `(1 - 1e-3) / omega` (unbounded for `omega = 0`), seed 0.
    pub fn new(omega: Bandwidth, target: Target) -> Self {
        let lambda_cap = if omega.value() > 0.0 {
            (1.0 - DEFAULT_MARGIN) / omega.value()
        } else {
            f64::INFINITY
        };
        SearchConfig {
            omega,
            target,
            lambda_cap,
            seed: 0,
            max_iterations: DEFAULT_MAX_ITERATIONS,
        }
    }

    /// Lower frame bound guaranteed for the complement of a lambda-set at the
    /// cap; an unbounded cap (omega = 0) is read as 1.
    pub fn frame_floor(&self, omega_max: f64) -> f64 {
        let cap = if self.lambda_cap.is_finite() {
            self.lambda_cap
        } else {
            1.0
        };
        guaranteed_lower_bound(cap, self.omega.value(), omega_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_cap > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda cap must be positive, got {}",
                self.lambda_cap
            )));
        }
        if self.omega.value() > 0.0 && self.lambda_cap * self.omega.value() >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "lambda cap {} times omega {} must stay below 1",
                self.lambda_cap,
                self.omega.value()
            )));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidParameter("max_iterations must be >= 1".into()));
        }
        Ok(())
    }
}

/// One line of the search log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchStep {
    pub step: usize,
    pub phase: String,
    pub candidates: usize,
    pub chosen: Option<usize>,
    pub score: f64,
    pub accepted: bool,
    pub set_size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LambdaSearch {
    pub certificate: LambdaCertificate,
    pub log: Vec<SearchStep>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SamplingSearch {
    pub sampling_set: VertexSet,
    pub report: FrameReport,
    pub log: Vec<SearchStep>,
}

/// Maximal independent set scanning vertices in increasing id order.
pub fn maximal_independent_set(g: &Graph) -> VertexSet {
    maximal_independent_set_in_order(g, 0..g.n())
}

/// Maximal independent set taking each vertex of `order` unless a neighbor was taken.
pub fn maximal_independent_set_in_order(
    g: &Graph,
    order: impl IntoIterator<Item = usize>,
) -> VertexSet {
    let mut blocked = vec![false; g.n()];
    let mut members = Vec::new();
    for v in order {
        if !blocked[v] {
            members.push(v);
            blocked[v] = true;
            for &u in g.neighbors(v) {
                blocked[u] = true;
            }
        }
    }
    members.sort_unstable();
    VertexSet::from_sorted_unchecked(members)
}

/// Eigenpairs of a symmetric matrix, eigenvalues ascending.
struct SortedEigen {
    values: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl SortedEigen {
    fn new(m: DMatrix<f64>) -> Self {
        if m.is_empty() {
            return SortedEigen {
                values: Vec::new(),
                vectors: DMatrix::zeros(0, 0),
            };
        }
        let eig = SymmetricEigen::new(m);
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        SortedEigen {
            values: order.iter().map(|&i| eig.eigenvalues[i]).collect(),
            vectors: eig.eigenvectors.select_columns(&order),
        }
    }

    /// Coordinates of `b` in the eigenbasis.
    fn coords(&self, b: impl Iterator<Item = f64> + Clone) -> Vec<f64> {
        (0..self.values.len())
            .map(|i| self.vectors.column(i).iter().zip(b.clone()).map(|(q, x)| q * x).sum())
            .collect()
    }

    /// Smallest eigenvalue after a rank-one change, found by bisection on
    /// `[lo, lambda_1]` where `positive(mu)` holds exactly below the root.
    fn bisect(&self, mut lo: f64, positive: impl Fn(f64) -> bool) -> f64 {
        let mut hi = self.values[0];
        if hi <= lo || !positive(lo) {
            return lo;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if positive(mid) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Smallest eigenvalue of the matrix bordered by column `b` and corner `c`:
    /// the smallest root of `c - mu - sum z_i^2 / (lambda_i - mu)`.
    fn smallest_bordered(&self, b: impl Iterator<Item = f64> + Clone, c: f64) -> f64 {
        if self.values.is_empty() {
            return c;
        }
        let z = self.coords(b);
        let secular = |mu: f64| {
            c - mu - self.values.iter().zip(&z).map(|(l, zi)| zi * zi / (l - mu)).sum::<f64>()
        };
        self.bisect(0.0, |mu| secular(mu) > 0.0)
    }

    /// Smallest eigenvalue of the matrix minus `r r^T`:
    /// the smallest root of `1 - sum z_i^2 / (lambda_i - mu)`.
    fn smallest_downdated(&self, r: impl Iterator<Item = f64> + Clone) -> f64 {
        let z = self.coords(r);
        let shift: f64 = z.iter().map(|x| x * x).sum();
        let secular = |mu: f64| {
            1.0 - self.values.iter().zip(&z).map(|(l, zi)| zi * zi / (l - mu)).sum::<f64>()
        };
        self.bisect(self.values[0] - shift, |mu| secular(mu) > 0.0)
    }
}

/// Poincaré constant from the Gram route: `1 / sqrt(lambda_min((L^2)[S,S]))`.
fn lambda_from_gram(smallest: f64) -> f64 {
    if smallest > 0.0 {
        1.0 / smallest.sqrt()
    } else {
        f64::INFINITY
    }
}

/// Lowest score, preferring the smaller id among near-equal scores.
fn best_candidate(scores: &[(usize, f64)]) -> Option<(usize, f64)> {
    let best = scores.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    if !best.is_finite() {
        return None;
    }
    scores
        .iter()
        .copied()
        .filter(|&(_, s)| s <= best * (1.0 + TIE_WINDOW))
        .min_by_key(|&(v, _)| v)
}

/// Greedily grows a lambda-set whose minimal constant stays below `cfg.lambda_cap`.
pub fn greedy_lambda_set(g: &Graph, spec: &Spectrum, cfg: &SearchConfig) -> Result<LambdaSearch> {
    cfg.validate()?;
    if g.n() != spec.n() {
        return Err(Error::DimensionMismatch {
            expected: g.n(),
            got: spec.n(),
        });
    }
    let n = g.n();
    let cap = cfg.lambda_cap;
    let mut log = Vec::new();
    let mut current: Option<LambdaCertificate> = None;

    if cfg.omega.value() < 1.0 {
        let mis = maximal_independent_set(g);
        if mis.len() < n {
            let cert = minimal_lambda(g, &mis)?;
            let accepted = cert.lambda_min < cap;
            log.push(SearchStep {
                step: 0,
                phase: "seed".into(),
                candidates: 1,
                chosen: None,
                score: cert.lambda_min,
                accepted,
                set_size: mis.len(),
            });
            if accepted {
                current = Some(cert);
            }
        }
    }

    let l = laplacian_matrix(g);
    let l2 = &l * &l;
    for step in 1..=cfg.max_iterations {
        let set = current
            .as_ref()
            .map_or_else(VertexSet::empty, |c| c.subset.clone());
        if set.len() + 1 >= n {
            break;
        }
        let candidates: Vec<usize> = (0..n).filter(|&v| !set.contains(v)).collect();
        let members = set.as_slice();
        let gram = SortedEigen::new(l2.select_rows(members).select_columns(members));
        let scores: Vec<(usize, f64)> = candidates
            .par_iter()
            .map(|&v| {
                let border = members.iter().map(|&u| l2[(u, v)]);
                (v, lambda_from_gram(gram.smallest_bordered(border, l2[(v, v)])))
            })
            .collect();
        let Some((v, score)) = best_candidate(&scores) else {
            break;
        };
        let mut accepted = false;
        if score < cap {
            let cert = minimal_lambda(g, &set.with(v))?;
            if cert.lambda_min < cap {
                accepted = true;
                current = Some(cert);
            }
        }
        log.push(SearchStep {
            step,
            phase: "grow".into(),
            candidates: candidates.len(),
            chosen: Some(v),
            score,
            accepted,
            set_size: set.len() + usize::from(accepted),
        });
        if !accepted {
            break;
        }
    }
    match current {
        Some(certificate) => Ok(LambdaSearch { certificate, log }),
        None => Err(Error::NoAdmissibleSet { cap }),
    }
}

/// Shrinks `V` while the lower frame bound stays at least `a_min`.
///
/// Vertices are tried in a seeded random order, first fit, repeating passes
/// until no vertex can be dropped.
pub fn prune_sampling_set(
    spec: &Spectrum,
    omega: Bandwidth,
    a_min: f64,
    seed: u64,
) -> Result<SamplingSearch> {
    if !(a_min > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "a_min must be positive, got {a_min}"
        )));
    }
    if a_min > 1.0 {
        return Err(Error::InfeasibleTarget { a_min });
    }
    let n = spec.n();
    let floor = a_min * (1.0 - TIE_WINDOW);
    let basis = spec.band_basis(omega);
    let k = basis.ncols();
    let mut gram = basis.tr_mul(&basis);
    let mut eig = SortedEigen::new(gram.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut keep = vec![true; n];
    let mut size = n;
    let mut log = Vec::new();
    let mut step = 0;
    loop {
        let mut removed_any = false;
        for &v in &order {
            if !keep[v] || size <= k {
                continue;
            }
            let row = basis.row(v);
            let a = eig.smallest_downdated(row.iter().copied());
            let accepted = a >= floor;
            step += 1;
            log.push(SearchStep {
                step,
                phase: "remove".into(),
                candidates: size,
                chosen: Some(v),
                score: a,
                accepted,
                set_size: size - usize::from(accepted),
            });
            if accepted {
                keep[v] = false;
                size -= 1;
                gram -= row.transpose() * row;
                eig = SortedEigen::new(gram.clone());
                removed_any = true;
            }
        }
        if !removed_any {
            break;
        }
    }
    let w = VertexSet::from_sorted_unchecked((0..n).filter(|&v| keep[v]).collect());
    let report = frame_bounds(spec, omega, &w)?;
    Ok(SamplingSearch {
        sampling_set: w,
        report,
        log,
    })
}

/// Frame floor guaranteed for the complement of a lambda-set at the cap.
pub fn guaranteed_lower_bound(lambda: f64, omega: f64, omega_max: f64) -> f64 {
    let c = (1.0 - lambda * omega) / (1.0 + lambda * omega_max);
    c * c
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "target", rename_all = "snake_case")]
pub enum SearchOutcome {
    MaximizeRemoved(LambdaSearch),
    MinimizeSamples(SamplingSearch),
}

/// Runs the search selected by `cfg.target`.
///
/// `MinimizeSamples` prunes down to the frame floor that a lambda-set at the
/// configured cap would guarantee for its complement.
pub fn run_search(g: &Graph, spec: &Spectrum, cfg: &SearchConfig) -> Result<SearchOutcome> {
    match cfg.target {
        Target::MaximizeRemoved => greedy_lambda_set(g, spec, cfg).map(SearchOutcome::MaximizeRemoved),
        Target::MinimizeSamples => {
            cfg.validate()?;
            let a_min = cfg.frame_floor(spec.omega_max());
            prune_sampling_set(spec, cfg.omega, a_min, cfg.seed).map(SearchOutcome::MinimizeSamples)
        }
    }
}
