//! Brute-force reference implementations shared by the integration tests.
//! Everything here works on a dense adjacency matrix and never calls into the
//! crate's statistic code.

#![allow(dead_code)]

use netmob_core::{DirectedGraph, NodeTable, Role, TermSpec};
use rand::Rng;

pub fn adjacency(g: &DirectedGraph) -> Vec<Vec<bool>> {
    let n = g.node_count();
    let mut a = vec![vec![false; n]; n];
    for (i, j) in g.edges() {
        a[i][j] = true;
    }
    a
}

/// Number of k with i -> k -> j, by triple loop.
pub fn otp(a: &[Vec<bool>], i: usize, j: usize) -> usize {
    (0..a.len()).filter(|&k| k != i && k != j && a[i][k] && a[k][j]).count()
}

fn gw_weight(decay: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else {
        decay.exp() * (1.0 - (1.0 - (-decay).exp()).powi(k as i32))
    }
}

fn gw_sp(a: &[Vec<bool>], decay: f64, edgewise: bool) -> f64 {
    let n = a.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && a[i][j] == edgewise {
                total += gw_weight(decay, otp(a, i, j));
            }
        }
    }
    total
}

pub fn follower_z(followers: &[u64]) -> Vec<f64> {
    let logged: Vec<f64> = followers.iter().map(|&f| (f as f64 + 1.0).log10()).collect();
    let n = logged.len() as f64;
    let mean = logged.iter().sum::<f64>() / n;
    let sd = (logged.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n).sqrt();
    logged.iter().map(|x| if sd > 0.0 { (x - mean) / sd } else { 0.0 }).collect()
}

/// One statistic recomputed from the adjacency matrix.
pub fn term_value(a: &[Vec<bool>], nodes: &NodeTable, term: &TermSpec) -> f64 {
    use netmob_core::Direction::{In, Out};
    let n = a.len();
    let out_deg = |v: usize| (0..n).filter(|&u| a[v][u]).count();
    let in_deg = |v: usize| (0..n).filter(|&u| a[u][v]).count();
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|&(i, j)| a[i][j])
        .collect();
    match term {
        TermSpec::Edges => edges.len() as f64,
        TermSpec::GwespOtp { decay } => gw_sp(a, *decay, true),
        TermSpec::GwnspOtp { decay } => gw_sp(a, *decay, false),
        TermSpec::GwDegree { direction, decay } => (0..n)
            .map(|v| gw_weight(*decay, if *direction == In { in_deg(v) } else { out_deg(v) }))
            .sum(),
        TermSpec::NodeFactor { direction, level } => edges
            .iter()
            .filter(|&&(i, j)| nodes.roles[if *direction == Out { i } else { j }] == *level)
            .count() as f64,
        TermSpec::NodeCov { direction, .. } => {
            let x = follower_z(&nodes.followers);
            edges.iter().map(|&(i, j)| x[if *direction == Out { i } else { j }]).sum()
        }
    }
}

pub fn stat_vector(a: &[Vec<bool>], nodes: &NodeTable, terms: &[TermSpec]) -> Vec<f64> {
    terms.iter().map(|t| term_value(a, nodes, t)).collect()
}

pub fn random_graph<R: Rng>(n: usize, p: f64, rng: &mut R) -> DirectedGraph {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p {
                edges.push((i, j));
            }
        }
    }
    DirectedGraph::from_edge_list(&edges, n).unwrap()
}

/// Random roles (every role present when n ≥ 4) and follower counts.
pub fn random_nodes<R: Rng>(n: usize, rng: &mut R) -> NodeTable {
    let mut nodes = NodeTable::default();
    for v in 0..n {
        let role = if v < 4 { Role::ALL[v] } else { Role::ALL[rng.random_range(0..4)] };
        nodes.push(format!("u{v}"), role, rng.random_range(0..100_000));
    }
    nodes
}

/// One term of every kind, with varied decays.
pub fn all_kinds() -> Vec<TermSpec> {
    use netmob_core::Direction::{In, Out};
    vec![
        TermSpec::Edges,
        TermSpec::GwespOtp { decay: 0.5 },
        TermSpec::GwnspOtp { decay: 0.8 },
        TermSpec::GwDegree { direction: In, decay: 0.3 },
        TermSpec::GwDegree { direction: Out, decay: 1.2 },
        TermSpec::NodeFactor { direction: Out, level: Role::Organization },
        TermSpec::NodeFactor { direction: In, level: Role::Leader },
        TermSpec::NodeCov { direction: Out, covariate: "followers".into() },
        TermSpec::NodeCov { direction: In, covariate: "followers".into() },
    ]
}

/// All graphs on `n` nodes, indexed by the bit pattern over ordered dyads.
pub fn enumerate(n: usize) -> Vec<DirectedGraph> {
    let dyads: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter(|(i, j)| i != j)
        .collect();
    (0..1usize << dyads.len())
        .map(|mask| {
            let edges: Vec<_> = dyads
                .iter()
                .enumerate()
                .filter(|(b, _)| mask >> b & 1 == 1)
                .map(|(_, &d)| d)
                .collect();
            DirectedGraph::from_edge_list(&edges, n).unwrap()
        })
        .collect()
}

pub fn state_index(g: &DirectedGraph) -> usize {
    let n = g.node_count();
    let mut b = 0;
    let mut idx = 0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                if g.has_edge(i, j) {
                    idx |= 1 << b;
                }
                b += 1;
            }
        }
    }
    idx
}

/// Exact ERGM probabilities over all graphs by enumeration.
pub fn exact_distribution(n: usize, nodes: &NodeTable, terms: &[TermSpec], theta: &[f64]) -> Vec<f64> {
    let weights: Vec<f64> = enumerate(n)
        .iter()
        .map(|g| {
            let s = stat_vector(&adjacency(g), nodes, terms);
            s.iter().zip(theta).map(|(a, b)| a * b).sum::<f64>().exp()
        })
        .collect();
    let z: f64 = weights.iter().sum();
    weights.into_iter().map(|w| w / z).collect()
}

/// Nominal alpha for two coders, straight from the coincidence matrix.
pub fn alpha_oracle(a: &[u32], b: &[u32]) -> f64 {
    let cats: Vec<u32> = {
        let mut c: Vec<u32> = a.iter().chain(b).copied().collect();
        c.sort();
        c.dedup();
        c
    };
    let q = cats.len();
    let pos = |x: u32| cats.iter().position(|&c| c == x).unwrap();
    let mut o = vec![vec![0.0; q]; q];
    for (&x, &y) in a.iter().zip(b) {
        // each pairable unit with two values contributes 1/(m-1) = 1 per ordered pair
        o[pos(x)][pos(y)] += 1.0;
        o[pos(y)][pos(x)] += 1.0;
    }
    let n_c: Vec<f64> = o.iter().map(|row| row.iter().sum()).collect();
    let n: f64 = n_c.iter().sum();
    let mut d_o = 0.0;
    let mut d_e = 0.0;
    for c in 0..q {
        for k in 0..q {
            if c != k {
                d_o += o[c][k];
                d_e += n_c[c] * n_c[k];
            }
        }
    }
    1.0 - (n - 1.0) * d_o / d_e
}
