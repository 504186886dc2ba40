//! Monte-Carlo maximum likelihood (Geyer–Thompson).
//!
//! Each outer iteration samples statistics at a reference `θ₀` and maximizes
//! the importance-sampled log-likelihood ratio
//! `−ln (1/M) Σ exp(δᵀ (g_m − g_obs))` over `δ = θ − θ₀` by damped Newton
//! steps that keep the effective sample size above a floor. When `g_obs` lies
//! outside the sampled range the target is pulled partway toward the sample
//! mean first.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, FisherSnedecor};

use super::mple::DesignRows;
use super::{scaled_inverse_diag, scaled_solve, EstimationError, FitResult, LikelihoodBasis, Method};
use crate::graph::DirectedGraph;
use crate::linalg::Matrix;
use crate::sampler::{chain_seed, simulate_stats_parallel, SamplerConfig};
use crate::scalar::{from_usize, lit, log1p_exp, log_sum_exp, to_f64, Scalar};
use crate::terms::{Model, StatVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McmleConfig {
    /// Per-iteration sampling; `sample_size` is M, the total over all chains.
    pub sampler: SamplerConfig,
    pub max_outer: usize,
    /// Parallel chains per iteration. Fixed rather than tied to the thread
    /// count so results do not depend on the machine.
    pub chains: usize,
    /// Converged once every coordinate of the update is below this.
    pub tolerance: f64,
    /// Also converged once a Hotelling test of `E_θ₀ g = g_obs` has a
    /// p-value above this.
    pub convergence_p: f64,
    /// Effective sample size floor as a fraction of M.
    pub min_ess_fraction: f64,
    /// Simpson intervals for the path-sampling log-likelihood; 0 skips it.
    pub path_intervals: usize,
    /// Samples per path-sampling grid point.
    pub path_samples: usize,
}

impl McmleConfig {
    pub fn for_nodes(n: usize) -> Self {
        Self {
            sampler: SamplerConfig {
                sample_size: 1000,
                ..SamplerConfig::for_nodes(n)
            },
            max_outer: 20,
            chains: 4,
            tolerance: 1e-3,
            convergence_p: 0.5,
            min_ess_fraction: 0.1,
            path_intervals: 16,
            path_samples: 200,
        }
    }
}

/// `(θ − θ₀)ᵀ g_obs − ln (1/M) Σ_m exp((θ − θ₀)ᵀ g_m)` for samples drawn at `θ₀`.
/// Exactly zero at `θ = θ₀`.
pub fn log_likelihood_ratio<T: Scalar>(
    theta: &[T],
    theta0: &[T],
    observed: &[T],
    samples: &[StatVector<T>],
) -> T {
    let delta: Vec<T> = theta.iter().zip(theta0).map(|(a, b)| *a - *b).collect();
    let diffs: Vec<Vec<T>> = samples
        .iter()
        .map(|s| s.iter().zip(observed).map(|(a, b)| *a - *b).collect())
        .collect();
    ratio_objective(&delta, &diffs)
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `−ln mean exp(δᵀ h_m)`.
fn ratio_objective<T: Scalar>(delta: &[T], h: &[Vec<T>]) -> T {
    let etas: Vec<T> = h.iter().map(|hm| dot(delta, hm)).collect();
    from_usize::<T>(h.len()).ln() - log_sum_exp(&etas)
}

/// Normalized importance weights `∝ exp(δᵀ h_m)`.
fn weights<T: Scalar>(delta: &[T], h: &[Vec<T>]) -> Vec<T> {
    let etas: Vec<T> = h.iter().map(|hm| dot(delta, hm)).collect();
    let lse = log_sum_exp(&etas);
    etas.into_iter().map(|e| (e - lse).exp()).collect()
}

fn ess<T: Scalar>(w: &[T]) -> T {
    T::one() / w.iter().map(|x| *x * *x).sum::<T>()
}

/// Weighted mean and covariance of `h`.
fn weighted_moments<T: Scalar>(w: &[T], h: &[Vec<T>]) -> (Vec<T>, Matrix<T>) {
    let k = h.first().map_or(0, Vec::len);
    let mut mean = vec![T::zero(); k];
    for (wm, hm) in w.iter().zip(h) {
        for (m, v) in mean.iter_mut().zip(hm) {
            *m += *wm * *v;
        }
    }
    let mut cov = Matrix::zeros(k);
    let mut centered = vec![T::zero(); k];
    for (wm, hm) in w.iter().zip(h) {
        for ((c, v), m) in centered.iter_mut().zip(hm).zip(&mean) {
            *c = *v - *m;
        }
        cov.add_outer(&centered, *wm);
    }
    (mean, cov)
}

enum InnerOutcome<T> {
    Step(Vec<T>),
    /// Index of a coordinate with no sampled variation.
    Flat(usize),
}

/// Maximizes `ratio_objective` from `δ = 0`, keeping ESS ≥ `min_ess`.
fn maximize_ratio<T: Scalar>(h: &[Vec<T>], min_ess: T) -> InnerOutcome<T> {
    let k = h.first().map_or(0, Vec::len);
    let mut delta = vec![T::zero(); k];
    let mut obj = T::zero();
    for _ in 0..50 {
        let w = weights(&delta, h);
        let (mean, cov) = weighted_moments(&w, h);
        let neg: Vec<T> = mean.iter().map(|m| -*m).collect();
        let step = match scaled_solve(&cov, &neg) {
            Ok(s) => s,
            Err(bad) if delta.iter().all(|d| *d == T::zero()) => return InnerOutcome::Flat(bad),
            Err(_) => break,
        };
        let mut t = T::one();
        let mut moved = false;
        for _ in 0..30 {
            let cand: Vec<T> = delta.iter().zip(&step).map(|(d, s)| *d + t * *s).collect();
            let cand_obj = ratio_objective(&cand, h);
            if cand_obj.is_finite() && cand_obj >= obj && ess(&weights(&cand, h)) >= min_ess {
                let gain = cand_obj - obj;
                delta = cand;
                obj = cand_obj;
                moved = gain > T::epsilon() * lit(10.0);
                break;
            }
            t *= lit(0.5);
        }
        if !moved || t < T::one() {
            // the ESS floor or line search bound the step; stop here
            break;
        }
    }
    InnerOutcome::Step(delta)
}

/// Index of the first coordinate where `observed` is outside the sampled range.
fn outside_range<T: Scalar>(observed: &[T], samples: &[StatVector<T>]) -> Option<usize> {
    (0..observed.len()).find(|&k| {
        let lo = samples.iter().map(|s| s[k]).fold(T::infinity(), T::min);
        let hi = samples.iter().map(|s| s[k]).fold(T::neg_infinity(), T::max);
        observed[k] < lo || observed[k] > hi
    })
}

/// Largest `γ` on a 0.05 grid such that `mean + γ (observed − mean)` sits
/// strictly inside the sampled box.
fn stepping_target<T: Scalar>(observed: &[T], samples: &[StatVector<T>]) -> Vec<T> {
    let k = observed.len();
    let m = from_usize::<T>(samples.len());
    let mean: Vec<T> = (0..k)
        .map(|c| samples.iter().map(|s| s[c]).sum::<T>() / m)
        .collect();
    let lo: Vec<T> = (0..k)
        .map(|c| samples.iter().map(|s| s[c]).fold(T::infinity(), T::min))
        .collect();
    let hi: Vec<T> = (0..k)
        .map(|c| samples.iter().map(|s| s[c]).fold(T::neg_infinity(), T::max))
        .collect();
    for step in (0..=20).rev() {
        let gamma = lit::<T>(step as f64 * 0.05);
        let target: Vec<T> = (0..k)
            .map(|c| mean[c] + gamma * (observed[c] - mean[c]))
            .collect();
        let inside = (0..k).all(|c| {
            let margin = (hi[c] - lo[c]) * lit(0.01);
            target[c] >= lo[c] + margin && target[c] <= hi[c] - margin
        });
        if inside {
            return target;
        }
    }
    mean
}

/// Hotelling p-value for `E g = observed`, with the covariance of the mean
/// taken from batch means of consecutive samples.
fn hotelling_p<T: Scalar>(observed: &[T], samples: &[StatVector<T>]) -> f64 {
    let k = observed.len();
    let m = samples.len();
    let batches = (3 * k).max(20).min(m / 2);
    if batches <= k {
        return 0.0;
    }
    let size = m / batches;
    let means: Vec<Vec<f64>> = (0..batches)
        .map(|b| {
            let chunk = &samples[b * size..(b + 1) * size];
            (0..k)
                .map(|c| chunk.iter().map(|s| to_f64(s[c]) - to_f64(observed[c])).sum::<f64>() / size as f64)
                .collect()
        })
        .collect();
    let grand: Vec<f64> = (0..k)
        .map(|c| means.iter().map(|b| b[c]).sum::<f64>() / batches as f64)
        .collect();
    let mut cov = Matrix::<f64>::zeros(k);
    for b in &means {
        let centered: Vec<f64> = b.iter().zip(&grand).map(|(x, g)| x - g).collect();
        cov.add_outer(&centered, 1.0 / ((batches - 1) * batches) as f64);
    }
    let Ok(sol) = scaled_solve(&cov, &grand) else {
        return 0.0;
    };
    let t2 = dot(&grand, &sol);
    let (p, b) = (k as f64, batches as f64);
    let f = t2 * (b - p) / (p * (b - 1.0));
    match FisherSnedecor::new(p, b - p) {
        Ok(dist) => 1.0 - dist.cdf(f),
        Err(_) => 0.0,
    }
}

fn partial<T: Scalar>(
    model: &Model<T>,
    theta: &[T],
    g: &DirectedGraph,
    iterations: usize,
    degenerate: bool,
) -> Box<FitResult<f64>> {
    let k = theta.len();
    let mut fit = FitResult::assemble(
        Method::Mcmle,
        model,
        theta.to_vec(),
        vec![T::nan(); k],
        T::nan(),
        LikelihoodBasis::None,
        g.dyad_count(),
        iterations,
    );
    fit.converged = false;
    fit.degeneracy_flag = degenerate;
    Box::new(fit.to_f64())
}

/// Runs MC-MLE from `init` (normally the MPLE).
pub fn mcmle<T: Scalar>(
    g: &DirectedGraph,
    model: &Model<T>,
    init: &[T],
    config: &McmleConfig,
) -> Result<FitResult<T>, EstimationError> {
    let n = g.node_count();
    if n < 3 {
        return Err(EstimationError::TooFewNodes(n));
    }
    let k = model.len();
    if init.len() != k {
        return Err(EstimationError::DimensionMismatch {
            expected: k,
            got: init.len(),
        });
    }
    config.sampler.validate()?;
    let names = model.spec().coef_names();
    let observed = model.statistics(g)?.into_inner();
    let m = config.sampler.sample_size;
    let min_ess = lit::<T>(config.min_ess_fraction) * from_usize(m);
    let mut theta0 = init.to_vec();
    let mut previously_outside = false;

    for outer in 0..config.max_outer {
        let cfg = SamplerConfig {
            seed: chain_seed(config.sampler.seed, outer),
            ..config.sampler.clone()
        };
        let samples = simulate_stats_parallel(model, &theta0, &cfg, g, config.chains)?;
        let outside = outside_range(&observed, &samples);
        if let Some(c) = outside {
            log::debug!("iteration {outer}: observed {} outside sampled range", names[c]);
            if previously_outside {
                return Err(EstimationError::DegenerateModel {
                    term: names[c].clone(),
                    partial: partial(model, &theta0, g, outer + 1, true),
                });
            }
        }
        previously_outside = outside.is_some();
        let target = if outside.is_some() {
            stepping_target(&observed, &samples)
        } else {
            observed.clone()
        };
        let h: Vec<Vec<T>> = samples
            .iter()
            .map(|s| s.iter().zip(&target).map(|(a, b)| *a - *b).collect())
            .collect();
        let delta = match maximize_ratio(&h, min_ess) {
            InnerOutcome::Step(d) => d,
            InnerOutcome::Flat(c) => {
                return Err(EstimationError::DegenerateModel {
                    term: names[c].clone(),
                    partial: partial(model, &theta0, g, outer + 1, true),
                })
            }
        };
        let max_change = delta.iter().map(|d| to_f64(d.abs())).fold(0.0, f64::max);
        let p = if outside.is_none() {
            hotelling_p(&observed, &samples)
        } else {
            0.0
        };
        log::debug!("iteration {outer}: max |step| {max_change:.3e}, Hotelling p {p:.3}");
        let theta: Vec<T> = theta0.iter().zip(&delta).map(|(a, d)| *a + *d).collect();
        if outside.is_none() && (max_change < config.tolerance || p > config.convergence_p) {
            let w = weights(&delta, &h);
            let (_, cov) = weighted_moments(&w, &h);
            let var = scaled_inverse_diag(&cov).map_err(|c| EstimationError::Singular {
                term: names[c].clone(),
            })?;
            let se: Vec<T> = var.into_iter().map(|v| v.max(T::zero()).sqrt()).collect();
            let (log_lik, basis) = if config.path_intervals > 0 {
                (path_log_likelihood(g, model, &theta, &observed, config)?, LikelihoodBasis::MonteCarlo)
            } else {
                (T::nan(), LikelihoodBasis::None)
            };
            let mut fit = FitResult::assemble(
                Method::Mcmle,
                model,
                theta,
                se,
                log_lik,
                basis,
                g.dyad_count(),
                outer + 1,
            );
            if max_change >= config.tolerance {
                fit.notes.push(format!(
                    "converged by Hotelling test (p = {p:.3}); last update {max_change:.2e}"
                ));
            }
            return Ok(fit);
        }
        if theta.iter().any(|t| !t.is_finite()) {
            return Err(EstimationError::DegenerateModel {
                term: names[0].clone(),
                partial: partial(model, &theta0, g, outer + 1, true),
            });
        }
        theta0 = theta;
    }
    Err(EstimationError::NonConvergence {
        iterations: config.max_outer,
        partial: partial(model, &theta0, g, config.max_outer, previously_outside),
    })
}

/// `θᵀ g_obs − ln Z(θ)`, with `ln Z` bridged by path sampling from the
/// dyad-independent part of `θ`, whose normalizer is a product over dyads.
fn path_log_likelihood<T: Scalar>(
    g: &DirectedGraph,
    model: &Model<T>,
    theta: &[T],
    observed: &[T],
    config: &McmleConfig,
) -> Result<T, EstimationError> {
    let mask = model.dyad_independent_mask();
    let reference: Vec<T> = theta
        .iter()
        .zip(&mask)
        .map(|(t, keep)| if *keep { *t } else { T::zero() })
        .collect();
    let design = DesignRows::build(g, model);
    let mut log_z: T = (0..design.len())
        .map(|r| design.total[r] * log1p_exp(dot(design.row(r), &reference)))
        .sum();
    let direction: Vec<T> = theta.iter().zip(&reference).map(|(a, b)| *a - *b).collect();
    if direction.iter().any(|d| *d != T::zero()) {
        let intervals = config.path_intervals + config.path_intervals % 2;
        let step = T::one() / from_usize(intervals);
        let mut integral = T::zero();
        for i in 0..=intervals {
            let u = from_usize::<T>(i) * step;
            let point: Vec<T> = reference.iter().zip(&direction).map(|(r, d)| *r + u * *d).collect();
            let cfg = SamplerConfig {
                sample_size: config.path_samples.max(1),
                seed: chain_seed(config.sampler.seed ^ 0x9e37_79b9, i),
                ..config.sampler.clone()
            };
            let samples = simulate_stats_parallel(model, &point, &cfg, g, config.chains)?;
            let mean_proj = samples.iter().map(|s| s.dot(&direction)).sum::<T>()
                / from_usize(samples.len());
            let coef = if i == 0 || i == intervals {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            integral += lit::<T>(coef) * mean_proj;
        }
        log_z += integral * step / lit(3.0);
    }
    Ok(dot(theta, observed) - log_z)
}
