//! Numerical verification of the sampling theorems on one graph and band.
//!
//! Each check runs a batch of seeded trials and records how many violated
//! the stated inequality, together with the worst normalized excess
//! (`lhs - rhs`, negative when every trial passed). Trials fan out over the
//! rayon pool but results are assembled in seed order.

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{
    dual_frame, frame_bounds, lambda_bound_from_sampling, reconstruct,
    stability_certificate_with, synthesize,
};
use crate::graph::{Graph, VertexSet};
use crate::lambda::{check_independent_lemma, minimal_lambda, union_lambda_bound};
use crate::search::{
    SearchConfig, Target, greedy_lambda_set, guaranteed_lower_bound,
    maximal_independent_set_in_order, prune_sampling_set,
};
use crate::spectral::{
    Bandwidth, Signal, Spectrum, apply_laplacian, laplacian_matrix, random_bandlimited_complex,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Seeded trials per check.
    pub trials: usize,
    pub seed: u64,
    /// Additive slack for inequalities on normalized quantities.
    pub slack: f64,
    /// Relative slack on spectral bounds such as `‖Lf‖ <= omega ‖f‖`.
    pub rel_slack: f64,
    /// Additive slack for the lambda bound from a sampling set.
    pub certificate_slack: f64,
    /// Smallest lower frame bound for which reconstruction is checked.
    pub reconstruct_min_bound: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            trials: 100,
            seed: 0,
            slack: 1e-9,
            rel_slack: 1e-9,
            certificate_slack: 1e-6,
            reconstruct_min_bound: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest `lhs - rhs` over all trials; `None` when nothing was evaluated.
    pub worst_excess: Option<f64>,
    /// Why the check was not applicable, if it was skipped.
    pub skipped: Option<String>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

#[derive(Default)]
struct Tally {
    trials: usize,
    violations: usize,
    worst: Option<f64>,
}

impl Tally {
    /// Records `lhs <= rhs`.
    fn le(&mut self, lhs: f64, rhs: f64) {
        self.trials += 1;
        let excess = lhs - rhs;
        if !(excess <= 0.0) {
            self.violations += 1;
        }
        self.worst = Some(match self.worst {
            Some(w) if !(excess > w) && !excess.is_nan() => w,
            _ => excess,
        });
    }

    fn merge(&mut self, other: Tally) {
        self.trials += other.trials;
        self.violations += other.violations;
        if let Some(e) = other.worst {
            self.worst = Some(self.worst.map_or(e, |w| if e > w || e.is_nan() { e } else { w }));
        }
    }

    fn finish(self, name: &str) -> CheckResult {
        CheckResult {
            name: name.to_owned(),
            trials: self.trials,
            violations: self.violations,
            worst_excess: self.worst,
            skipped: None,
        }
    }
}

fn skipped(name: &str, why: impl Into<String>) -> CheckResult {
    CheckResult {
        name: name.to_owned(),
        trials: 0,
        violations: 0,
        worst_excess: None,
        skipped: Some(why.into()),
    }
}

fn fail(name: &str, err: &Error) -> CheckResult {
    CheckResult {
        name: name.to_owned(),
        trials: 1,
        violations: 1,
        worst_excess: None,
        skipped: Some(format!("unexpected error: {err}")),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub omega: Bandwidth,
    pub omega_max: f64,
    pub pw_dim: usize,
    pub graph_hash: String,
    pub options: VerifyOptions,
    pub checks: Vec<CheckResult>,
    pub all_passed: bool,
}

fn seed_for(opts: &VerifyOptions, stream: u64, t: usize) -> u64 {
    opts.seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream << 32)
        .wrapping_add(t as u64)
}

fn rng_for(opts: &VerifyOptions, stream: u64, t: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed_for(opts, stream, t))
}

pub fn spectrum_checks(g: &Graph, spec: &Spectrum) -> Vec<CheckResult> {
    let l = laplacian_matrix(g);
    let n = g.n();
    let mut sym = Tally::default();
    sym.le((&l - l.transpose()).amax(), 1e-12);

    let mut range = Tally::default();
    for &t in spec.eigenvalues() {
        range.le(-t, 1e-9);
        range.le(t, 2.0 + 1e-9);
    }
    range.le(spec.eigenvalues()[0].abs(), 1e-9);

    let e = spec.eigenvectors();
    let mut ortho = Tally::default();
    ortho.le((e.tr_mul(e) - DMatrix::<f64>::identity(n, n)).amax(), 1e-10);

    let mut reassembly = Tally::default();
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(spec.eigenvalues()));
    let rebuilt = e * diag * e.transpose();
    reassembly.le((rebuilt - &l).norm() / l.norm(), 1e-8);

    let mut agree = Tally::default();
    for v in 0..n {
        let col = apply_laplacian(g, &Signal::delta(n, v)).expect("length n");
        let diff = (0..n)
            .map(|u| (col[u].re - l[(u, v)]).abs().max(col[u].im.abs()))
            .fold(0.0, f64::max);
        agree.le(diff, 1e-12);
    }
    vec![
        sym.finish("laplacian_symmetric"),
        range.finish("eigenvalue_range"),
        ortho.finish("eigenbasis_orthonormal"),
        reassembly.finish("spectral_reassembly"),
        agree.finish("matrix_free_agreement"),
    ]
}

/// `‖L f‖ <= omega ‖f‖` on the band, and `‖L f‖ <= omega_max ‖f‖` everywhere.
///
/// The band includes eigenvalues up to `omega + tie_tol`, so the bandlimited
/// bound is taken against that edge.
pub fn bernstein_checks(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    opts: &VerifyOptions,
) -> Vec<CheckResult> {
    let edge = omega.value() + spec.tie_tol();
    let (band, full): (Vec<Tally>, Vec<Tally>) = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut band = Tally::default();
            let f = random_bandlimited_complex(spec, omega, seed_for(opts, 1, t)).expect("band nonempty");
            let lf = apply_laplacian(g, &f).expect("length n").norm();
            let norm = f.norm();
            band.le(lf / norm, edge * (1.0 + opts.rel_slack) + 1e-14);

            let mut full = Tally::default();
            let mut rng = rng_for(opts, 2, t);
            let values: Vec<_> = (0..g.n())
                .map(|_| crate::spectral::C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect();
            let h = Signal::new(values).expect("finite");
            let lh = apply_laplacian(g, &h).expect("length n").norm();
            full.le(lh / h.norm(), spec.omega_max() * (1.0 + opts.rel_slack));
            (band, full)
        })
        .unzip();
    let fold = |ts: Vec<Tally>, name: &str| {
        ts.into_iter()
            .fold(Tally::default(), |mut acc, t| {
                acc.merge(t);
                acc
            })
            .finish(name)
    };
    vec![fold(band, "bernstein_band"), fold(full, "operator_norm")]
}

/// Sampled energy lies between the frame bounds for every probe.
fn sandwich(spec: &Spectrum, omega: Bandwidth, w: &VertexSet, opts: &VerifyOptions, tally: &mut Tally) -> Result<()> {
    let r = frame_bounds(spec, omega, w)?;
    for t in 0..opts.trials {
        let f = random_bandlimited_complex(spec, omega, seed_for(opts, 3, t))?;
        let norm2 = f.norm().powi(2);
        let energy = f.sampled_norm(w).powi(2) / norm2;
        tally.le(r.lower_bound - opts.slack, energy);
        tally.le(energy, r.upper_bound + opts.slack);
    }
    Ok(())
}

fn random_proper_subset(rng: &mut ChaCha8Rng, n: usize, min: usize) -> VertexSet {
    let size = rng.random_range(min.max(1)..n);
    let mut ids: Vec<usize> = (0..n).collect();
    ids.shuffle(rng);
    ids.truncate(size);
    VertexSet::new(n, ids).expect("ids in range")
}

/// Sampling sets used by the frame-level checks: pruned and random subsets.
pub fn candidate_sampling_sets(
    spec: &Spectrum,
    omega: Bandwidth,
    count: usize,
    seed: u64,
) -> Result<Vec<VertexSet>> {
    let n = spec.n();
    let k = spec.pw_dimension(omega);
    let floors = [0.5, 0.1, 1e-2, 1e-3];
    (0..count)
        .into_par_iter()
        .map(|t| {
            let s = seed.wrapping_add(t as u64);
            if t % 2 == 0 {
                let a_min = floors[(t / 2) % floors.len()];
                prune_sampling_set(spec, omega, a_min, s).map(|r| r.sampling_set)
            } else {
                let mut rng = ChaCha8Rng::seed_from_u64(s ^ 0x5A5A_5A5A);
                Ok(random_proper_subset(&mut rng, n, k))
            }
        })
        .collect()
}

pub fn frame_checks(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>> {
    let sets = candidate_sampling_sets(spec, omega, opts.trials.max(1), seed_for(opts, 4, 0))?;
    let mut sand = Tally::default();
    let mut thm32 = Tally::default();
    let mut recon = Tally::default();
    let mut order_free = Tally::default();
    let mut monotone = Tally::default();
    let per_set: Vec<Result<[Tally; 5]>> = sets
        .par_iter()
        .enumerate()
        .map(|(i, w)| {
            let mut t = [
                Tally::default(),
                Tally::default(),
                Tally::default(),
                Tally::default(),
                Tally::default(),
            ];
            let few = VerifyOptions {
                trials: opts.trials.min(20),
                ..*opts
            };
            sandwich(spec, omega, w, &few, &mut t[0])?;
            let r = frame_bounds(spec, omega, w)?;
            if r.lower_bound > 1e-6 && omega.value() > 0.0 && w.len() < g.n() {
                let b = lambda_bound_from_sampling(g, spec, omega, w)?;
                t[1].le(b.lambda_min, (1.0 + 1.0 / r.lower_bound.sqrt()) / omega.value() + opts.certificate_slack);
            }
            if r.lower_bound >= opts.reconstruct_min_bound {
                let mut rng = rng_for(opts, 5, i);
                let dual = dual_frame(spec, omega, w)?;
                for probe in 0..3 {
                    let f = random_bandlimited_complex(spec, omega, seed_for(opts, 6, i * 3 + probe))?;
                    let samples = f.samples(w);
                    let rec = reconstruct(spec, omega, w, &samples)?;
                    t[2].le(rec.sub(&f).norm() / f.norm(), 1e-8);
                    let reference = synthesize(&dual, &samples, &(0..w.len()).collect::<Vec<_>>())?;
                    for _ in 0..3 {
                        let mut order: Vec<usize> = (0..w.len()).collect();
                        order.shuffle(&mut rng);
                        let permuted = synthesize(&dual, &samples, &order)?;
                        t[3].le(permuted.sub(&reference).norm() / f.norm(), 1e-9);
                    }
                }
            }
            // adding any vertex can only raise both bounds
            if w.len() < g.n() {
                let mut rng = rng_for(opts, 7, i);
                let extra = w.complement(g.n()).as_slice()[rng.random_range(0..g.n() - w.len())];
                let bigger = frame_bounds(spec, omega, &w.with(extra))?;
                t[4].le(r.lower_bound, bigger.lower_bound + opts.slack);
                t[4].le(r.upper_bound, bigger.upper_bound + opts.slack);
            }
            Ok(t)
        })
        .collect();
    for item in per_set {
        let [a, b, c, d, e] = item?;
        sand.merge(a);
        thm32.merge(b);
        recon.merge(c);
        order_free.merge(d);
        monotone.merge(e);
    }
    let mut out = vec![sand.finish("frame_sandwich")];
    out.push(if omega.value() > 0.0 {
        thm32.finish("complement_of_sampling_set_is_lambda_set")
    } else {
        skipped("complement_of_sampling_set_is_lambda_set", "omega = 0")
    });
    out.push(recon.finish("exact_reconstruction"));
    out.push(order_free.finish("order_independent_expansion"));
    out.push(monotone.finish("monotone_sampling"));
    Ok(out)
}

/// Complements of certified lambda-sets with `lambda * omega < 1` sample stably.
pub fn stability_checks(
    g: &Graph,
    spec: &Spectrum,
    omega: Bandwidth,
    opts: &VerifyOptions,
) -> Result<Vec<CheckResult>> {
    const NAME: &str = "lambda_set_complement_samples";
    let mut sets = Vec::new();
    let cfg = SearchConfig {
        seed: opts.seed,
        ..SearchConfig::new(omega, Target::MaximizeRemoved)
    };
    match greedy_lambda_set(g, spec, &cfg) {
        Ok(found) => sets.push(found.certificate.subset),
        Err(Error::NoAdmissibleSet { .. }) => {}
        Err(e) => return Err(e),
    }
    for t in 0..opts.trials.min(10) {
        let mut order: Vec<usize> = (0..g.n()).collect();
        order.shuffle(&mut rng_for(opts, 8, t));
        let mis = maximal_independent_set_in_order(g, order);
        if mis.len() < g.n() {
            sets.push(mis);
        }
    }
    let mut tally = Tally::default();
    let mut evaluated = 0;
    for s in &sets {
        let lambda = minimal_lambda(g, s)?.lambda_min;
        if lambda * omega.value() >= 1.0 {
            continue;
        }
        evaluated += 1;
        let cert = stability_certificate_with(g, spec, omega, s, opts.trials, seed_for(opts, 9, evaluated))?;
        let w = s.complement(g.n());
        let floor = guaranteed_lower_bound(lambda, omega.value(), spec.omega_max());
        tally.le(floor - opts.slack, cert.frame_report.lower_bound);
        let c = cert.c_omega_theoretical;
        for t in 0..opts.trials {
            let f = random_bandlimited_complex(spec, omega, seed_for(opts, 10, t))?;
            let (full, sampled) = (f.norm(), f.sampled_norm(&w));
            tally.le(sampled / full, 1.0 + opts.slack);
            tally.le(full / (c * sampled), 1.0 + opts.slack);
        }
    }
    Ok(vec![if evaluated == 0 {
        skipped(NAME, "no lambda-set with lambda * omega < 1 found")
    } else {
        tally.finish(NAME)
    }])
}

/// Independent sets, disjoint-closure unions, arbitrary subsets and nesting.
pub fn lemma_checks(g: &Graph, opts: &VerifyOptions) -> Result<Vec<CheckResult>> {
    let n = g.n();
    let rows: Vec<Result<[Tally; 4]>> = (0..opts.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = rng_for(opts, 11, t);
            let mut out = [Tally::default(), Tally::default(), Tally::default(), Tally::default()];

            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mis = maximal_independent_set_in_order(g, order.iter().copied());
            let keep = rng.random_range(1..=mis.len());
            let indep = VertexSet::new(n, mis.iter().copied().take(keep)).expect("in range");
            if indep.len() < n {
                let (_, cert) = check_independent_lemma(g, &indep)?;
                out[0].le(cert.lambda_min, 1.0 + opts.rel_slack);
            }

            // pieces with pairwise disjoint closures
            let mut pieces: Vec<VertexSet> = Vec::new();
            let mut covered = VertexSet::empty();
            for &v in &order {
                let candidate = VertexSet::new(n, [v]).expect("in range");
                let grown = if rng.random::<f64>() < 0.5 {
                    g.neighbors(v).first().map_or(candidate.clone(), |&u| candidate.with(u))
                } else {
                    candidate
                };
                let (_, closure) = g.boundary_and_closure(&grown)?;
                if closure.first_common(&covered).is_none() && closure.len() < n {
                    covered = covered.union(&closure);
                    pieces.push(grown);
                }
                if pieces.len() == 4 {
                    break;
                }
            }
            if !pieces.is_empty() {
                let lambdas = pieces
                    .iter()
                    .map(|s| minimal_lambda(g, s).map(|c| c.lambda_min))
                    .collect::<Result<Vec<_>>>()?;
                let union = union_lambda_bound(g, &pieces, &lambdas)?;
                let max = lambdas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                out[1].le(union.certificate.lambda_min, union.lambda_union * (1.0 + opts.rel_slack));
                out[1].le((union.lambda_union - max).abs(), 0.0);
            }

            let small = random_proper_subset(&mut rng, n, 1);
            let cert = minimal_lambda(g, &small)?;
            out[2].le(-cert.lambda_min, 0.0);
            out[2].le(cert.lambda_min, f64::MAX);

            let big_extra: Vec<usize> = (0..n).filter(|&v| !small.contains(v) && rng.random::<f64>() < 0.5).collect();
            let mut bigger = small.union(&VertexSet::new(n, big_extra).expect("in range"));
            if bigger.len() == n {
                let drop = *bigger.iter().find(|&&v| !small.contains(v)).expect("small is proper");
                bigger = bigger.without(drop);
            }
            let big = minimal_lambda(g, &bigger)?;
            out[3].le(cert.lambda_min, big.lambda_min * (1.0 + opts.rel_slack));
            Ok(out)
        })
        .collect();
    let mut names = [
        ("independent_set_lambda_one", Tally::default()),
        ("disjoint_closure_union", Tally::default()),
        ("finite_subset_has_finite_lambda", Tally::default()),
        ("lambda_monotone_under_inclusion", Tally::default()),
    ];
    for row in rows {
        for (slot, t) in names.iter_mut().zip(row?) {
            slot.1.merge(t);
        }
    }
    Ok(names.into_iter().map(|(name, t)| t.finish(name)).collect())
}

/// Runs every check for `g` at bandwidth `omega`.
pub fn verify(g: &Graph, spec: &Spectrum, omega: Bandwidth, opts: &VerifyOptions) -> VerifyReport {
    let mut checks = spectrum_checks(g, spec);
    checks.extend(bernstein_checks(g, spec, omega, opts));
    let sections: [(&str, Result<Vec<CheckResult>>); 3] = [
        ("frames", frame_checks(g, spec, omega, opts)),
        ("stability", stability_checks(g, spec, omega, opts)),
        ("lemma", lemma_checks(g, opts)),
    ];
    for (name, result) in sections {
        match result {
            Ok(cs) => checks.extend(cs),
            Err(e) => checks.push(fail(name, &e)),
        }
    }
    let all_passed = checks.iter().all(CheckResult::passed);
    VerifyReport {
        n: g.n(),
        omega,
        omega_max: spec.omega_max(),
        pw_dim: spec.pw_dimension(omega),
        graph_hash: g.hash(),
        options: *opts,
        checks,
        all_passed,
    }
}
