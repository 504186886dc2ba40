//! Metropolis–Hastings sampling from `P(Y = y) ∝ exp(θᵀ g(y))`.
//!
//! Each step toggles one dyad. The tie/no-tie (TNT) proposal picks an existing
//! edge with probability ½ and a uniformly random dyad otherwise; the exact
//! Hastings ratio for that mixture is applied, including the case of an empty
//! graph where the edge branch falls through to the uniform branch.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::DirectedGraph;
use crate::scalar::{from_usize, Scalar};
use crate::terms::{Model, StatVector, TermError};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_110_628;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SamplerError {
    #[error("theta has {got} entries, model has {expected} terms")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),
    #[error("sampling needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("theta has non-finite entries")]
    NonFiniteTheta,
    #[error(transparent)]
    Terms(#[from] TermError),
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Proposal {
    #[default]
    Tnt,
    UniformDyad,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub interval: usize,
    pub sample_size: usize,
    pub seed: u64,
    pub proposal: Proposal,
}

impl SamplerConfig {
    /// Defaults for an `n`-node network: burn-in `10 n²`, interval `n²`.
    pub fn for_nodes(n: usize) -> Self {
        let n2 = (n * n).max(1);
        Self {
            burn_in: 10 * n2,
            interval: n2,
            sample_size: 100,
            seed: DEFAULT_SEED,
            proposal: Proposal::Tnt,
        }
    }

    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.interval == 0 {
            return Err(SamplerError::InvalidConfig("interval must be >= 1".into()));
        }
        if self.sample_size == 0 {
            return Err(SamplerError::InvalidConfig("sample_size must be >= 1".into()));
        }
        Ok(())
    }

    /// Total number of MH steps one chain performs.
    pub fn total_steps(&self) -> usize {
        self.burn_in + self.interval * self.sample_size
    }
}

/// Edge set with O(1) uniform draws and O(1) removal.
#[derive(Clone, Debug, Default)]
struct EdgeIndex {
    list: Vec<(usize, usize)>,
    pos: HashMap<(usize, usize), usize>,
}

impl EdgeIndex {
    fn from_graph(g: &DirectedGraph) -> Self {
        let list: Vec<_> = g.edges().collect();
        let pos = list.iter().enumerate().map(|(k, &e)| (e, k)).collect();
        Self { list, pos }
    }

    fn insert(&mut self, e: (usize, usize)) {
        self.pos.insert(e, self.list.len());
        self.list.push(e);
    }

    fn remove(&mut self, e: (usize, usize)) {
        if let Some(k) = self.pos.remove(&e) {
            self.list.swap_remove(k);
            if k < self.list.len() {
                self.pos.insert(self.list[k], k);
            }
        }
    }
}

/// A chain's current network and its statistic vector, kept in sync.
#[derive(Clone, Debug)]
pub struct ChainState<T> {
    graph: DirectedGraph,
    stats: StatVector<T>,
    edges: EdgeIndex,
    delta: Vec<T>,
}

/// What a single MH step did.
#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome<T> {
    pub dyad: (usize, usize),
    /// Log of the MH acceptance ratio (before truncation at 0).
    pub log_ratio: T,
    pub accepted: bool,
}

impl<T: Scalar> ChainState<T> {
    pub fn new(model: &Model<T>, graph: DirectedGraph) -> Result<Self, SamplerError> {
        if graph.node_count() < 2 {
            return Err(SamplerError::TooFewNodes(graph.node_count()));
        }
        let stats = model.statistics(&graph)?;
        let edges = EdgeIndex::from_graph(&graph);
        Ok(Self {
            delta: vec![T::zero(); model.len()],
            graph,
            stats,
            edges,
        })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn stats(&self) -> &StatVector<T> {
        &self.stats
    }

    pub fn into_graph(self) -> DirectedGraph {
        self.graph
    }
}

/// `ln q(reverse) - ln q(forward)` for the TNT proposal.
fn tnt_log_hastings<T: Scalar>(edges: usize, dyads: usize, removing: bool) -> T {
    let d = from_usize::<T>(dyads);
    let half = T::from_f64(0.5).unwrap();
    let (fwd, rev) = if removing {
        let e = from_usize::<T>(edges);
        let fwd = half / e + half / d;
        let rev = if edges > 1 { half / d } else { T::one() / d };
        (fwd, rev)
    } else {
        let fwd = if edges > 0 { half / d } else { T::one() / d };
        let rev = half / from_usize::<T>(edges + 1) + half / d;
        (fwd, rev)
    };
    rev.ln() - fwd.ln()
}

fn random_dyad<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (usize, usize) {
    let i = rng.random_range(0..n);
    let mut j = rng.random_range(0..n - 1);
    if j >= i {
        j += 1;
    }
    (i, j)
}

/// One Metropolis–Hastings step. `theta` must match the model length.
pub fn mh_step<T: Scalar, R: Rng + ?Sized>(
    state: &mut ChainState<T>,
    model: &Model<T>,
    theta: &[T],
    proposal: Proposal,
    rng: &mut R,
) -> StepOutcome<T> {
    let n = state.graph.node_count();
    let edge_count = state.edges.list.len();
    let (i, j) = match proposal {
        Proposal::Tnt if edge_count > 0 && rng.random::<bool>() => {
            state.edges.list[rng.random_range(0..edge_count)]
        }
        _ => random_dyad(n, rng),
    };
    let present = state.graph.has_edge(i, j);
    model.change_into(&state.graph, i, j, &mut state.delta);
    let energy: T = state
        .delta
        .iter()
        .zip(theta)
        .map(|(&d, &t)| d * t)
        .sum();
    let mut log_ratio = if present { -energy } else { energy };
    if proposal == Proposal::Tnt {
        log_ratio += tnt_log_hastings::<T>(edge_count, state.graph.dyad_count(), present);
    }
    let accepted = log_ratio >= T::zero()
        || T::from_f64(rng.random::<f64>()).unwrap().ln() < log_ratio;
    if accepted {
        state.graph.toggle_unchecked(i, j);
        let sign = if present { -T::one() } else { T::one() };
        for (s, &d) in state.stats.iter_mut().zip(&state.delta) {
            *s += sign * d;
        }
        if present {
            state.edges.remove((i, j));
        } else {
            state.edges.insert((i, j));
        }
    }
    StepOutcome {
        dyad: (i, j),
        log_ratio,
        accepted,
    }
}

fn check_theta<T: Scalar>(model: &Model<T>, theta: &[T]) -> Result<(), SamplerError> {
    if theta.len() != model.len() {
        return Err(SamplerError::DimensionMismatch {
            expected: model.len(),
            got: theta.len(),
        });
    }
    if theta.iter().any(|t| !t.is_finite()) {
        return Err(SamplerError::NonFiniteTheta);
    }
    Ok(())
}

/// Runs one chain from `start`, calling `visit` on each retained network.
pub fn simulate_with<T: Scalar, F>(
    model: &Model<T>,
    theta: &[T],
    config: &SamplerConfig,
    start: DirectedGraph,
    mut visit: F,
) -> Result<ChainState<T>, SamplerError>
where
    F: FnMut(usize, &ChainState<T>),
{
    config.validate()?;
    check_theta(model, theta)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = ChainState::new(model, start)?;
    for _ in 0..config.burn_in {
        mh_step(&mut state, model, theta, config.proposal, &mut rng);
    }
    for k in 0..config.sample_size {
        for _ in 0..config.interval {
            mh_step(&mut state, model, theta, config.proposal, &mut rng);
        }
        visit(k, &state);
    }
    Ok(state)
}

/// Retained networks with their statistics.
pub fn simulate<T: Scalar>(
    model: &Model<T>,
    theta: &[T],
    config: &SamplerConfig,
    start: &DirectedGraph,
) -> Result<Vec<(DirectedGraph, StatVector<T>)>, SamplerError> {
    let mut out = Vec::with_capacity(config.sample_size);
    simulate_with(model, theta, config, start.clone(), |_, s| {
        out.push((s.graph.clone(), s.stats.clone()));
    })?;
    Ok(out)
}

/// Statistics only; avoids cloning networks.
pub fn simulate_stats<T: Scalar>(
    model: &Model<T>,
    theta: &[T],
    config: &SamplerConfig,
    start: &DirectedGraph,
) -> Result<Vec<StatVector<T>>, SamplerError> {
    let mut out = Vec::with_capacity(config.sample_size);
    simulate_with(model, theta, config, start.clone(), |_, s| {
        out.push(s.stats.clone());
    })?;
    Ok(out)
}

/// Seed of chain `chain` derived from a master seed.
pub fn chain_seed(master: u64, chain: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(chain as u64 + 1);
    rng.random()
}

/// Runs `chains` independent chains in parallel and concatenates their
/// statistics in chain order. `config.sample_size` is the total across chains.
pub fn simulate_stats_parallel<T: Scalar>(
    model: &Model<T>,
    theta: &[T],
    config: &SamplerConfig,
    start: &DirectedGraph,
    chains: usize,
) -> Result<Vec<StatVector<T>>, SamplerError> {
    let chains = chains.max(1).min(config.sample_size.max(1));
    if chains == 1 {
        return simulate_stats(model, theta, config, start);
    }
    let per = config.sample_size / chains;
    let extra = config.sample_size % chains;
    let parts: Vec<Result<Vec<StatVector<T>>, SamplerError>> = (0..chains)
        .into_par_iter()
        .map(|c| {
            let cfg = SamplerConfig {
                sample_size: per + usize::from(c < extra),
                seed: chain_seed(config.seed, c),
                ..config.clone()
            };
            simulate_stats(model, theta, &cfg, start)
        })
        .collect();
    let mut out = Vec::with_capacity(config.sample_size);
    for p in parts {
        out.extend(p?);
    }
    Ok(out)
}
