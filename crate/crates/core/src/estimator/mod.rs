//! Coefficient estimation: maximum pseudo-likelihood and Monte-Carlo maximum
//! likelihood, plus the fitted-model record and its table rendering.

mod mcmle;
mod mple;
mod report;

pub use mcmle::{log_likelihood_ratio, mcmle, McmleConfig};
pub use mple::{mple, mple_with, MpleOptions};
pub use report::{format_odds_ratio, render_table, significance_stars, to_json};

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use thiserror::Error;

use crate::linalg::{Cholesky, Matrix};
use crate::sampler::SamplerError;
use crate::scalar::{from_usize, lit, to_f64, Scalar};
use crate::terms::{Model, TermError};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Mple,
    Mcmle,
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Method::Mple => "MPLE",
            Method::Mcmle => "MC-MLE",
        })
    }
}

/// What the reported log-likelihood is.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LikelihoodBasis {
    /// Exact likelihood (dyad-independent model).
    Exact,
    /// Logistic pseudo-likelihood of a dyad-dependent model.
    Pseudo,
    /// Path-sampling estimate of the full likelihood.
    MonteCarlo,
    /// Not computed.
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult<T> {
    pub method: Method,
    /// Coefficient names, one per term.
    pub terms: Vec<String>,
    /// Row labels for the results table.
    pub labels: Vec<String>,
    pub theta: Vec<T>,
    pub std_errors: Vec<T>,
    pub odds_ratios: Vec<T>,
    /// Two-sided Wald p-values.
    pub p_values: Vec<T>,
    pub log_lik: T,
    pub log_lik_basis: LikelihoodBasis,
    pub aic: T,
    pub bic: T,
    /// Number of dyads, n(n-1).
    pub n_obs: usize,
    pub iterations: usize,
    pub converged: bool,
    pub degeneracy_flag: bool,
    /// True when standard errors come from the pseudo-likelihood of a dyad-dependent model.
    pub se_approximate: bool,
    pub notes: Vec<String>,
}

#[derive(Debug, Error)]
pub enum EstimationError {
    #[error("estimation needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("information matrix is singular; term `{term}` is constant or collinear with earlier terms")]
    Singular { term: String },
    #[error("coefficient of `{term}` drifts without bound (separation)")]
    Separation { term: String },
    #[error("model is degenerate: observed `{term}` lies outside the simulated range")]
    DegenerateModel {
        term: String,
        partial: Box<FitResult<f64>>,
    },
    #[error("no convergence after {iterations} iterations")]
    NonConvergence {
        iterations: usize,
        partial: Box<FitResult<f64>>,
    },
    #[error("initial coefficients have {got} entries, model has {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Terms(#[from] TermError),
    #[error(transparent)]
    Sampler(#[from] SamplerError),
}

/// `exp(theta)`.
pub fn odds_ratio<T: Scalar>(theta: T) -> T {
    theta.exp()
}

/// Two-sided normal p-value for `estimate / se`.
pub fn wald_p_value<T: Scalar>(estimate: T, se: T) -> T {
    if !(se > T::zero()) || !se.is_finite() {
        return T::nan();
    }
    let z = to_f64((estimate / se).abs());
    lit(erfc(z / std::f64::consts::SQRT_2))
}

impl<T: Scalar> FitResult<T> {
    /// Assembles a result; derived columns (OR, p, AIC, BIC) are computed here.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn assemble(
        method: Method,
        model: &Model<T>,
        theta: Vec<T>,
        std_errors: Vec<T>,
        log_lik: T,
        log_lik_basis: LikelihoodBasis,
        n_obs: usize,
        iterations: usize,
    ) -> Self {
        let k = from_usize::<T>(theta.len());
        let two = lit::<T>(2.0);
        let odds_ratios = theta.iter().map(|&t| odds_ratio(t)).collect();
        let p_values = theta
            .iter()
            .zip(&std_errors)
            .map(|(&t, &s)| wald_p_value(t, s))
            .collect();
        let spec = model.spec();
        let mut notes = Vec::new();
        if spec
            .terms
            .iter()
            .any(|t| matches!(t, crate::terms::TermSpec::NodeCov { .. }))
        {
            notes.push(crate::terms::FOLLOWER_TRANSFORM.to_string());
        }
        for t in model.skipped() {
            notes.push(format!("{t} dropped: no node carries that role"));
        }
        Self {
            method,
            terms: spec.coef_names(),
            labels: spec.terms.iter().map(|t| t.display_label()).collect(),
            theta,
            std_errors,
            odds_ratios,
            p_values,
            log_lik,
            log_lik_basis,
            aic: two * k - two * log_lik,
            bic: k * from_usize::<T>(n_obs.max(1)).ln() - two * log_lik,
            n_obs,
            iterations,
            converged: true,
            degeneracy_flag: false,
            se_approximate: false,
            notes,
        }
    }

    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// Lossless widening (or identity) to `f64`.
    pub fn to_f64(&self) -> FitResult<f64> {
        let conv = |v: &[T]| v.iter().map(|&x| to_f64(x)).collect::<Vec<f64>>();
        FitResult {
            method: self.method,
            terms: self.terms.clone(),
            labels: self.labels.clone(),
            theta: conv(&self.theta),
            std_errors: conv(&self.std_errors),
            odds_ratios: conv(&self.odds_ratios),
            p_values: conv(&self.p_values),
            log_lik: to_f64(self.log_lik),
            log_lik_basis: self.log_lik_basis,
            aic: to_f64(self.aic),
            bic: to_f64(self.bic),
            n_obs: self.n_obs,
            iterations: self.iterations,
            converged: self.converged,
            degeneracy_flag: self.degeneracy_flag,
            se_approximate: self.se_approximate,
            notes: self.notes.clone(),
        }
    }
}

/// Cholesky of a symmetric positive semi-definite matrix after scaling it to
/// unit diagonal, so the singularity test does not depend on term units.
/// On failure returns the index of the offending term.
pub(crate) fn scaled_cholesky<T: Scalar>(m: &Matrix<T>) -> Result<(Cholesky<T>, Vec<T>), usize> {
    let k = m.dim();
    let diag = m.diag();
    if let Some(bad) = diag.iter().position(|d| !(*d > T::zero()) || !d.is_finite()) {
        return Err(bad);
    }
    let scale: Vec<T> = diag.iter().map(|d| T::one() / d.sqrt()).collect();
    let mut c = Matrix::zeros(k);
    for i in 0..k {
        for j in 0..k {
            c[(i, j)] = m[(i, j)] * scale[i] * scale[j];
        }
    }
    let tol = T::epsilon().sqrt() * lit(1e-2);
    c.cholesky(tol).map(|ch| (ch, scale))
}

/// Solves `m x = b` through [`scaled_cholesky`].
pub(crate) fn scaled_solve<T: Scalar>(m: &Matrix<T>, b: &[T]) -> Result<Vec<T>, usize> {
    let (ch, s) = scaled_cholesky(m)?;
    let bs: Vec<T> = b.iter().zip(&s).map(|(&v, &si)| v * si).collect();
    Ok(ch.solve(&bs).iter().zip(&s).map(|(&v, &si)| v * si).collect())
}

/// Diagonal of `m⁻¹` through [`scaled_cholesky`].
pub(crate) fn scaled_inverse_diag<T: Scalar>(m: &Matrix<T>) -> Result<Vec<T>, usize> {
    let (ch, s) = scaled_cholesky(m)?;
    let inv = ch.inverse();
    Ok((0..m.dim()).map(|i| inv[(i, i)] * s[i] * s[i]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn odds_ratio_inverse_pairs() {
        for b in [-3.0_f64, -0.5, 0.0, 0.056, 2.722] {
            assert!((odds_ratio(b) * odds_ratio(-b) - 1.0).abs() < 1e-12);
        }
        assert_eq!(odds_ratio(0.0_f64), 1.0);
    }

    #[test]
    fn wald_p_values() {
        assert!((wald_p_value(1.959964_f64, 1.0) - 0.05).abs() < 1e-6);
        assert_eq!(wald_p_value(0.0_f64, 1.0), 1.0);
        assert_eq!(wald_p_value(2.0_f64, 1.0), wald_p_value(-2.0, 1.0));
        assert!(wald_p_value(1.0_f64, 0.0).is_nan());
    }

    #[test]
    fn scaled_cholesky_is_unit_free() {
        let mut m = Matrix::<f64>::zeros(2);
        m[(0, 0)] = 1e-8;
        m[(1, 1)] = 1e8;
        m[(0, 1)] = 0.5;
        m[(1, 0)] = 0.5;
        let x = scaled_solve(&m, &[1.0, 1.0]).unwrap();
        let back = m.mul_vec(&x);
        assert!((back[0] - 1.0).abs() < 1e-6 && (back[1] - 1.0).abs() < 1e-6);
        m[(0, 1)] = 1.0;
        m[(1, 0)] = 1.0;
        assert_eq!(scaled_solve(&m, &[1.0, 1.0]).unwrap_err(), 1);
    }
}
