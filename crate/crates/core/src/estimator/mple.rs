//! Maximum pseudo-likelihood: logistic regression of dyad states on change
//! statistics, solved by Newton–Raphson with step-halving.

use std::collections::HashMap;

use rayon::prelude::*;

use super::{
    scaled_cholesky, scaled_inverse_diag, EstimationError, FitResult, LikelihoodBasis, Method,
};
use crate::graph::{DirectedGraph, NodeTable};
use crate::linalg::Matrix;
use crate::scalar::{from_usize, lit, log1p_exp, logistic, to_f64, Scalar};
use crate::terms::{Model, ModelSpec};

const CHUNK: usize = 2048;

#[derive(Clone, Debug, PartialEq)]
pub struct MpleOptions<T> {
    pub max_iterations: usize,
    /// Stop once the gradient norm falls below this.
    pub gradient_tolerance: T,
}

impl<T: Scalar> Default for MpleOptions<T> {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            gradient_tolerance: T::newton_tolerance(),
        }
    }
}

/// Distinct change-statistic rows with response counts.
#[derive(Clone, Debug)]
pub(crate) struct DesignRows<T> {
    pub k: usize,
    /// Row-major, `k` values per row.
    pub x: Vec<T>,
    pub ones: Vec<T>,
    pub total: Vec<T>,
}

impl<T: Scalar> DesignRows<T> {
    pub fn len(&self) -> usize {
        self.ones.len()
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.x[r * self.k..(r + 1) * self.k]
    }

    /// Builds the compressed design from every ordered dyad of `g`.
    pub fn build(g: &DirectedGraph, model: &Model<T>) -> Self {
        let n = g.node_count();
        let k = model.len();
        type Bucket = HashMap<Vec<u64>, (usize, usize)>;
        let partial: Vec<Bucket> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut bucket = Bucket::new();
                let mut delta = vec![T::zero(); k];
                for j in (0..n).filter(|&j| j != i) {
                    model.change_into(g, i, j, &mut delta);
                    let key: Vec<u64> = delta.iter().map(|v| to_f64(*v).to_bits()).collect();
                    let e = bucket.entry(key).or_insert((0, 0));
                    e.0 += usize::from(g.has_edge(i, j));
                    e.1 += 1;
                }
                bucket
            })
            .collect();
        let mut merged = Bucket::new();
        for b in partial {
            for (key, (o, t)) in b {
                let e = merged.entry(key).or_insert((0, 0));
                e.0 += o;
                e.1 += t;
            }
        }
        let mut rows: Vec<(Vec<u64>, (usize, usize))> = merged.into_iter().collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut x = Vec::with_capacity(rows.len() * k);
        let mut ones = Vec::with_capacity(rows.len());
        let mut total = Vec::with_capacity(rows.len());
        for (key, (o, t)) in rows {
            x.extend(key.iter().map(|b| lit::<T>(f64::from_bits(*b))));
            ones.push(from_usize(o));
            total.push(from_usize(t));
        }
        Self { k, x, ones, total }
    }

    pub fn log_lik(&self, theta: &[T]) -> T {
        let parts: Vec<T> = (0..self.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|rs| {
                rs.iter()
                    .map(|&r| {
                        let eta = dot(self.row(r), theta);
                        self.ones[r] * eta - self.total[r] * log1p_exp(eta)
                    })
                    .sum::<T>()
            })
            .collect();
        parts.into_iter().sum()
    }

    /// Log-likelihood, gradient and information matrix at `theta`.
    pub fn derivatives(&self, theta: &[T]) -> (T, Vec<T>, Matrix<T>) {
        let k = self.k;
        let parts: Vec<(T, Vec<T>, Matrix<T>)> = (0..self.len())
            .collect::<Vec<_>>()
            .par_chunks(CHUNK)
            .map(|rs| {
                let mut ll = T::zero();
                let mut grad = vec![T::zero(); k];
                let mut info = Matrix::zeros(k);
                for &r in rs {
                    let x = self.row(r);
                    let eta = dot(x, theta);
                    let p = logistic(eta);
                    ll += self.ones[r] * eta - self.total[r] * log1p_exp(eta);
                    let resid = self.ones[r] - self.total[r] * p;
                    for (g, &xv) in grad.iter_mut().zip(x) {
                        *g += resid * xv;
                    }
                    info.add_outer(x, self.total[r] * p * (T::one() - p));
                }
                (ll, grad, info)
            })
            .collect();
        let mut ll = T::zero();
        let mut grad = vec![T::zero(); k];
        let mut info = Matrix::zeros(k);
        for (l, g, m) in parts {
            ll += l;
            grad.iter_mut().zip(&g).for_each(|(a, b)| *a += *b);
            for i in 0..k {
                for j in 0..k {
                    info[(i, j)] += m[(i, j)];
                }
            }
        }
        (ll, grad, info)
    }

    /// Unweighted cross-product `Σ total · x xᵀ`; singular iff the design is
    /// rank-deficient.
    pub fn cross_product(&self) -> Matrix<T> {
        let mut m = Matrix::zeros(self.k);
        for r in 0..self.len() {
            m.add_outer(self.row(r), self.total[r]);
        }
        m
    }
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

fn norm<T: Scalar>(v: &[T]) -> T {
    v.iter().map(|x| *x * *x).sum::<T>().sqrt()
}

/// MPLE with default options, binding `spec` to `nodes`.
pub fn mple<T: Scalar>(
    g: &DirectedGraph,
    nodes: &NodeTable,
    spec: &ModelSpec,
) -> Result<FitResult<T>, EstimationError> {
    let model = Model::new(spec, nodes)?;
    mple_with(g, &model, &MpleOptions::default())
}

pub fn mple_with<T: Scalar>(
    g: &DirectedGraph,
    model: &Model<T>,
    opts: &MpleOptions<T>,
) -> Result<FitResult<T>, EstimationError> {
    let n = g.node_count();
    if n < 3 {
        return Err(EstimationError::TooFewNodes(n));
    }
    if model.node_count() != n {
        return Err(crate::terms::TermError::NodeCountMismatch {
            model: model.node_count(),
            graph: n,
        }
        .into());
    }
    let names = model.spec().coef_names();
    let design = DesignRows::build(g, model);
    if let Err(bad) = scaled_cholesky(&design.cross_product()) {
        return Err(EstimationError::Singular {
            term: names[bad].clone(),
        });
    }
    let k = model.len();
    let mut theta = vec![T::zero(); k];
    let (mut ll, mut grad, mut info) = design.derivatives(&theta);
    let mut iterations = 0;
    let mut converged = false;
    let separation = |theta: &[T], bad: Option<usize>| {
        let idx = bad.unwrap_or_else(|| {
            (0..theta.len())
                .max_by(|&a, &b| {
                    let (x, y) = (theta[a].abs(), theta[b].abs());
                    x.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Greater)
                })
                .unwrap_or(0)
        });
        EstimationError::Separation {
            term: names[idx].clone(),
        }
    };
    while iterations < opts.max_iterations {
        if norm(&grad) < opts.gradient_tolerance {
            converged = true;
            break;
        }
        iterations += 1;
        let (chol, scale) = match scaled_cholesky(&info) {
            Ok(c) => c,
            // the design has full rank, so a collapsing information matrix
            // means fitted probabilities are running off to 0 or 1
            Err(bad) => return Err(separation(&theta, Some(bad))),
        };
        let scaled: Vec<T> = grad.iter().zip(&scale).map(|(g, s)| *g * *s).collect();
        let step: Vec<T> = chol
            .solve(&scaled)
            .iter()
            .zip(&scale)
            .map(|(v, s)| *v * *s)
            .collect();
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..40 {
            let cand: Vec<T> = theta.iter().zip(&step).map(|(a, d)| *a + t * *d).collect();
            if cand.iter().all(|v| v.is_finite()) {
                let cand_ll = design.log_lik(&cand);
                if cand_ll.is_finite() && cand_ll >= ll {
                    theta = cand;
                    accepted = true;
                    break;
                }
            }
            t *= lit(0.5);
        }
        if !accepted {
            // no ascent direction left within floating-point resolution
            converged = norm(&grad) < opts.gradient_tolerance.sqrt();
            break;
        }
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(separation(&theta, None));
        }
        let step_size = step.iter().map(|d| (t * *d).abs()).fold(T::zero(), T::max);
        (ll, grad, info) = design.derivatives(&theta);
        if step_size < T::epsilon() * lit(1e3) * (T::one() + norm(&theta)) {
            converged = true;
            break;
        }
    }
    if !converged && norm(&grad) < opts.gradient_tolerance {
        converged = true;
    }
    // a coefficient whose log-likelihood keeps rising as it moves outward is unbounded
    for idx in 0..k {
        if theta[idx].abs() > lit(15.0) {
            let mut pushed = theta.clone();
            pushed[idx] += lit::<T>(10.0) * theta[idx].signum();
            if design.log_lik(&pushed) >= ll - lit(1e-6) {
                return Err(separation(&theta, Some(idx)));
            }
        }
    }
    let var = scaled_inverse_diag(&info).map_err(|bad| EstimationError::Singular {
        term: names[bad].clone(),
    })?;
    let se: Vec<T> = var.into_iter().map(|v| v.max(T::zero()).sqrt()).collect();
    let dyad_independent = model.spec().is_dyad_independent();
    let basis = if dyad_independent {
        LikelihoodBasis::Exact
    } else {
        LikelihoodBasis::Pseudo
    };
    let mut fit = FitResult::assemble(
        Method::Mple,
        model,
        theta,
        se,
        ll,
        basis,
        g.dyad_count(),
        iterations,
    );
    fit.converged = converged;
    fit.se_approximate = !dyad_independent;
    if !dyad_independent {
        fit.notes
            .push("standard errors from the pseudo-likelihood are approximate".into());
    }
    if !converged {
        fit.notes
            .push(format!("Newton iterations stopped after {iterations} without meeting the gradient tolerance"));
    }
    Ok(fit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Role;
    use crate::terms::{Direction, TermSpec};

    fn ring_plus(n: usize, extra: &[(usize, usize)]) -> DirectedGraph {
        let mut edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        edges.extend_from_slice(extra);
        DirectedGraph::from_edge_list(&edges, n).unwrap()
    }

    #[test]
    fn edges_only_is_logit_density() {
        // n = 10, 9 edges
        let g = DirectedGraph::from_edge_list(&(0..9).map(|i| (i, i + 1)).collect::<Vec<_>>(), 10)
            .unwrap();
        let nodes = NodeTable::ordinary(10);
        let fit: FitResult<f64> = mple(&g, &nodes, &ModelSpec::new(vec![TermSpec::Edges])).unwrap();
        assert!((fit.theta[0] - (9.0_f64 / 81.0).ln()).abs() < 1e-9);
        assert!((fit.theta[0] + 2.1972).abs() < 1e-4);
        assert!(fit.converged);
        assert_eq!(fit.log_lik_basis, LikelihoodBasis::Exact);
        // closed-form standard error 1/sqrt(N p (1-p))
        let p = 0.1;
        assert!((fit.std_errors[0] - 1.0 / (90.0_f64 * p * (1.0 - p)).sqrt()).abs() < 1e-9);
        assert_eq!(fit.odds_ratios[0], fit.theta[0].exp());
    }

    #[test]
    fn f32_edges_only() {
        let g = ring_plus(8, &[(0, 2), (3, 1)]);
        let fit: FitResult<f32> =
            mple(&g, &NodeTable::ordinary(8), &ModelSpec::new(vec![TermSpec::Edges])).unwrap();
        let expected = (10.0_f32 / 46.0).ln();
        assert!((fit.theta[0] - expected).abs() < 1e-4);
    }

    #[test]
    fn constant_term_is_singular() {
        let g = ring_plus(6, &[]);
        let nodes = NodeTable::ordinary(6);
        // every node ordinary: follower covariate is constant zero
        let spec = ModelSpec::new(vec![
            TermSpec::Edges,
            TermSpec::NodeCov {
                direction: Direction::In,
                covariate: "followers".into(),
            },
        ]);
        match mple::<f64>(&g, &nodes, &spec) {
            Err(EstimationError::Singular { term }) => assert_eq!(term, "nodeicov.followers"),
            other => panic!("expected Singular, got {other:?}"),
        }
        // a factor matching every sender is collinear with edges
        let roles = vec![Role::Organization; 6];
        let nodes = NodeTable::with_roles(roles);
        let spec = ModelSpec::new(vec![
            TermSpec::Edges,
            TermSpec::NodeFactor {
                direction: Direction::Out,
                level: Role::Organization,
            },
        ]);
        assert!(matches!(
            mple::<f64>(&g, &nodes, &spec),
            Err(EstimationError::Singular { .. })
        ));
    }

    #[test]
    fn empty_graph_is_separation() {
        let g = DirectedGraph::empty(5);
        let res = mple::<f64>(&g, &NodeTable::ordinary(5), &ModelSpec::new(vec![TermSpec::Edges]));
        assert!(matches!(res, Err(EstimationError::Separation { ref term }) if term == "edges"), "{res:?}");
    }

    #[test]
    fn too_few_nodes() {
        let g = DirectedGraph::from_edge_list(&[(0, 1)], 2).unwrap();
        assert!(matches!(
            mple::<f64>(&g, &NodeTable::ordinary(2), &ModelSpec::new(vec![TermSpec::Edges])),
            Err(EstimationError::TooFewNodes(2))
        ));
    }

    #[test]
    fn factor_model_matches_cell_logits() {
        // receivers 0 and 1 are organizations
        let mut roles = vec![Role::Ordinary; 8];
        roles[0] = Role::Organization;
        roles[1] = Role::Organization;
        let nodes = NodeTable::with_roles(roles);
        let g = ring_plus(8, &[(3, 0), (4, 0), (5, 1), (6, 0), (2, 5)]);
        let spec = ModelSpec::new(vec![
            TermSpec::Edges,
            TermSpec::NodeFactor {
                direction: Direction::In,
                level: Role::Organization,
            },
        ]);
        let fit: FitResult<f64> = mple(&g, &nodes, &spec).unwrap();
        let into_org = g.in_degree(0) + g.in_degree(1);
        let org_dyads = 2 * 7;
        let rest = g.edge_count() - into_org;
        let rest_dyads = 56 - org_dyads;
        let logit = |a: usize, b: usize| (a as f64 / (b - a) as f64).ln();
        assert!((fit.theta[0] - logit(rest, rest_dyads)).abs() < 1e-8);
        assert!((fit.theta[0] + fit.theta[1] - logit(into_org, org_dyads)).abs() < 1e-8);
    }
}
