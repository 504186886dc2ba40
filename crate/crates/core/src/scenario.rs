//! Synthetic role-annotated networks for the two archetypes: crowd-enabled
//! (closure-driven, many peer retweets) and organizationally-enabled
//! (cascades through a few central organizations and leaders).
//!
//! Networks are drawn from preset coefficients with the standard sampler,
//! starting from the empty graph.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};
use serde::{Deserialize, Serialize};

use crate::graph::{DirectedGraph, NodeTable, Role};
use crate::sampler::{simulate_with, SamplerConfig, SamplerError};
use crate::terms::{Model, ModelSpec, DEFAULT_DECAY};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    CrowdLike,
    OrgLike,
}

impl std::str::FromStr for ScenarioKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "crowd" | "crowdlike" => Ok(ScenarioKind::CrowdLike),
            "org" | "orglike" => Ok(ScenarioKind::OrgLike),
            other => Err(format!("unknown scenario {other:?} (expected crowd or org)")),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoleCounts {
    pub organizations: usize,
    pub leaders: usize,
    pub influential: usize,
    pub ordinary: usize,
}

impl RoleCounts {
    /// Account counts of the observed networks.
    pub fn observed(kind: ScenarioKind) -> Self {
        match kind {
            ScenarioKind::CrowdLike => Self {
                organizations: 15,
                leaders: 5,
                influential: 6,
                ordinary: 1000,
            },
            ScenarioKind::OrgLike => Self {
                organizations: 32,
                leaders: 24,
                influential: 0,
                ordinary: 628,
            },
        }
    }

    pub fn total(&self) -> usize {
        self.organizations + self.leaders + self.influential + self.ordinary
    }

    /// Same proportions at `n` nodes; every role present in `self` keeps at
    /// least one account.
    pub fn scaled(&self, n: usize) -> Self {
        let total = self.total().max(1) as f64;
        let f = |c: usize| {
            if c == 0 {
                0
            } else {
                ((c as f64 * n as f64 / total).round() as usize).max(1)
            }
        };
        let organizations = f(self.organizations);
        let leaders = f(self.leaders);
        let influential = f(self.influential);
        Self {
            organizations,
            leaders,
            influential,
            ordinary: n.saturating_sub(organizations + leaders + influential),
        }
    }
}

/// Model and coefficients a scenario is drawn from; the terms are
/// [`ModelSpec::standard`] at the default decay.
pub fn preset(kind: ScenarioKind) -> (ModelSpec, Vec<f64>) {
    let theta = match kind {
        // edges, nsp, esp, activity (infl, leader, org), popularity (infl, leader, org),
        // gw in/out-degree, followers sender/receiver
        ScenarioKind::CrowdLike => vec![-6.2, 0.0, 1.6, 0.0, 0.0, 0.5, 1.5, 0.5, 1.5, 0.0, 0.0, 0.1, 0.3],
        ScenarioKind::OrgLike => vec![-6.4, 0.08, 0.0, 0.0, -2.5, -2.5, 0.0, 1.5, 2.8, 0.0, 1.0, 0.0, 0.3],
    };
    (ModelSpec::standard(DEFAULT_DECAY), theta)
}

/// Node table with synthetic log-normal follower counts by role.
pub fn scenario_nodes(counts: &RoleCounts, rng: &mut ChaCha8Rng) -> NodeTable {
    let mut nodes = NodeTable::default();
    let groups = [
        (Role::Organization, counts.organizations, "org", 8.5),
        (Role::Leader, counts.leaders, "leader", 8.0),
        (Role::Influential, counts.influential, "influential", 10.0),
        (Role::Ordinary, counts.ordinary, "user", 5.3),
    ];
    for (role, count, prefix, log_median) in groups {
        let dist = LogNormal::<f64>::new(log_median, 1.2).expect("valid log-normal");
        for i in 0..count {
            let followers = dist.sample(rng).round() as u64;
            nodes.push(format!("{prefix}{}", i + 1), role, followers);
        }
    }
    nodes
}

/// Draws a scenario network with the default burn-in of `10 n²` steps.
pub fn generate_scenario(
    kind: ScenarioKind,
    counts: &RoleCounts,
    seed: u64,
) -> Result<(DirectedGraph, NodeTable), SamplerError> {
    let n = counts.total();
    generate_scenario_with(kind, counts, seed, 10 * n * n)
}

pub fn generate_scenario_with(
    kind: ScenarioKind,
    counts: &RoleCounts,
    seed: u64,
    steps: usize,
) -> Result<(DirectedGraph, NodeTable), SamplerError> {
    let n = counts.total();
    if n < 2 {
        return Err(SamplerError::TooFewNodes(n));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = scenario_nodes(counts, &mut rng);
    let (spec, theta) = preset(kind);
    // drop factor terms whose role is absent, with their coefficients
    let kept: Vec<usize> = (0..spec.len())
        .filter(|&k| spec.terms[k].level().is_none_or(|l| nodes.has_role(l)))
        .collect();
    let spec = ModelSpec::new(kept.iter().map(|&k| spec.terms[k].clone()).collect());
    let theta: Vec<f64> = kept.iter().map(|&k| theta[k]).collect();
    let model = Model::<f64>::new(&spec, &nodes)?;
    let config = SamplerConfig {
        burn_in: steps,
        interval: 1,
        sample_size: 1,
        seed,
        ..SamplerConfig::for_nodes(n)
    };
    let state = simulate_with(&model, &theta, &config, DirectedGraph::empty(n), |_, _| {})?;
    Ok((state.into_graph(), nodes))
}
