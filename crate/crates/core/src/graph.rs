//! Binary directed graph with sorted out- and in-neighbour lists.
//!
//! Edges point from the retweeting account to the account whose message was
//! shared. Neighbour lists are kept sorted so that shared-partner counts are a
//! linear merge of two lists.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("dyad ({0}, {0}) is not a dyad")]
    SelfDyad(usize),
    #[error("centralization needs at least 3 nodes, got {0}")]
    TooFewNodes(usize),
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    out_adj: Vec<Vec<usize>>,
    in_adj: Vec<Vec<usize>>,
    edge_count: usize,
}

fn sorted_insert(list: &mut Vec<usize>, v: usize) -> bool {
    match list.binary_search(&v) {
        Ok(_) => false,
        Err(pos) => {
            list.insert(pos, v);
            true
        }
    }
}

fn sorted_remove(list: &mut Vec<usize>, v: usize) -> bool {
    match list.binary_search(&v) {
        Ok(pos) => {
            list.remove(pos);
            true
        }
        Err(_) => false,
    }
}

/// Size of the intersection of two sorted lists.
pub(crate) fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                count += 1;
                i += 1;
                j += 1;
            }
        }
    }
    count
}

impl DirectedGraph {
    pub fn empty(n: usize) -> Self {
        Self {
            out_adj: vec![Vec::new(); n],
            in_adj: vec![Vec::new(); n],
            edge_count: 0,
        }
    }

    /// Builds a graph from `(source, target)` pairs. Duplicate pairs collapse to one edge.
    pub fn from_edge_list(edges: &[(usize, usize)], n: usize) -> Result<Self, GraphError> {
        let mut g = Self::empty(n);
        for &(s, t) in edges {
            g.check_dyad(s, t).map_err(|e| match e {
                GraphError::SelfDyad(v) => GraphError::SelfLoop(v),
                other => other,
            })?;
            g.insert_unchecked(s, t);
        }
        Ok(g)
    }

    /// Complete directed graph (every ordered pair).
    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    g.insert_unchecked(i, j);
                }
            }
        }
        g
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.out_adj.len()
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Number of ordered dyads, n(n-1).
    pub fn dyad_count(&self) -> usize {
        let n = self.node_count();
        n * n.saturating_sub(1)
    }

    pub fn density(&self) -> f64 {
        let d = self.dyad_count();
        if d == 0 {
            0.0
        } else {
            self.edge_count as f64 / d as f64
        }
    }

    pub fn check_node(&self, v: usize) -> Result<(), GraphError> {
        if v < self.node_count() {
            Ok(())
        } else {
            Err(GraphError::NodeOutOfRange {
                node: v,
                n: self.node_count(),
            })
        }
    }

    pub fn check_dyad(&self, i: usize, j: usize) -> Result<(), GraphError> {
        self.check_node(i)?;
        self.check_node(j)?;
        if i == j {
            return Err(GraphError::SelfDyad(i));
        }
        Ok(())
    }

    #[inline]
    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_adj[v]
    }

    #[inline]
    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_adj[v]
    }

    #[inline]
    pub fn out_degree(&self, v: usize) -> usize {
        self.out_adj[v].len()
    }

    #[inline]
    pub fn in_degree(&self, v: usize) -> usize {
        self.in_adj[v].len()
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        if i >= self.node_count() || j >= self.node_count() {
            return false;
        }
        // search the shorter list
        if self.out_adj[i].len() <= self.in_adj[j].len() {
            self.out_adj[i].binary_search(&j).is_ok()
        } else {
            self.in_adj[j].binary_search(&i).is_ok()
        }
    }

    fn insert_unchecked(&mut self, i: usize, j: usize) -> bool {
        if sorted_insert(&mut self.out_adj[i], j) {
            sorted_insert(&mut self.in_adj[j], i);
            self.edge_count += 1;
            true
        } else {
            false
        }
    }

    fn remove_unchecked(&mut self, i: usize, j: usize) -> bool {
        if sorted_remove(&mut self.out_adj[i], j) {
            sorted_remove(&mut self.in_adj[j], i);
            self.edge_count -= 1;
            true
        } else {
            false
        }
    }

    /// Adds `i -> j`. Returns `false` if it was already present.
    pub fn add_edge(&mut self, i: usize, j: usize) -> Result<bool, GraphError> {
        self.check_dyad(i, j)?;
        Ok(self.insert_unchecked(i, j))
    }

    /// Removes `i -> j`. Returns `false` if it was absent.
    pub fn remove_edge(&mut self, i: usize, j: usize) -> Result<bool, GraphError> {
        self.check_dyad(i, j)?;
        Ok(self.remove_unchecked(i, j))
    }

    /// Flips the state of dyad `(i, j)`; returns whether the edge is present afterwards.
    pub fn toggle_edge(&mut self, i: usize, j: usize) -> Result<bool, GraphError> {
        self.check_dyad(i, j)?;
        if self.remove_unchecked(i, j) {
            Ok(false)
        } else {
            self.insert_unchecked(i, j);
            Ok(true)
        }
    }

    /// Toggle without bounds checks; caller guarantees a valid dyad.
    #[inline]
    pub(crate) fn toggle_unchecked(&mut self, i: usize, j: usize) {
        if !self.remove_unchecked(i, j) {
            self.insert_unchecked(i, j);
        }
    }

    /// All edges in (source, target) lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, outs)| outs.iter().map(move |&j| (i, j)))
    }

    /// Number of outgoing-two-path intermediaries `k` with `i -> k -> j`.
    pub fn shared_partners_otp(&self, i: usize, j: usize) -> Result<usize, GraphError> {
        self.check_dyad(i, j)?;
        Ok(self.otp_count(i, j))
    }

    #[inline]
    pub(crate) fn otp_count(&self, i: usize, j: usize) -> usize {
        // out_adj[i] never holds i and in_adj[j] never holds j, so every common
        // element is a third node.
        sorted_intersection_len(&self.out_adj[i], &self.in_adj[j])
    }

    /// Total degree (in + out) of every node.
    pub fn total_degrees(&self) -> Vec<usize> {
        (0..self.node_count())
            .map(|v| self.in_degree(v) + self.out_degree(v))
            .collect()
    }

    pub fn max_in_degree(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.in_degree(v))
            .max()
            .unwrap_or(0)
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.node_count())
            .map(|v| self.out_degree(v))
            .max()
            .unwrap_or(0)
    }

    /// `(in_hist, out_hist)` where `hist[k]` is the number of nodes with degree `k`.
    pub fn degree_histograms(&self) -> (Vec<usize>, Vec<usize>) {
        let mut ins = vec![0usize; self.max_in_degree() + 1];
        let mut outs = vec![0usize; self.max_out_degree() + 1];
        for v in 0..self.node_count() {
            ins[self.in_degree(v)] += 1;
            outs[self.out_degree(v)] += 1;
        }
        (ins, outs)
    }

    /// Freeman degree centralization on total degree.
    ///
    /// `C = Σ_i (d_max - d_i) / (2 (n-1) (n-2))`; the denominator is the value
    /// attained by a star whose centre is linked to every spoke in both
    /// directions, so `C` lies in `[0, 1]`.
    pub fn degree_centralization(&self) -> Result<f64, GraphError> {
        let n = self.node_count();
        if n < 3 {
            return Err(GraphError::TooFewNodes(n));
        }
        let degrees = self.total_degrees();
        let d_max = degrees.iter().copied().max().unwrap_or(0);
        let spread: usize = degrees.iter().map(|&d| d_max - d).sum();
        Ok(spread as f64 / (2.0 * (n - 1) as f64 * (n - 2) as f64))
    }

    /// Relabels nodes: node `v` becomes `perm[v]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.node_count(), "permutation length");
        let mut g = Self::empty(self.node_count());
        for (i, j) in self.edges() {
            g.insert_unchecked(perm[i], perm[j]);
        }
        g
    }
}

/// Account category assigned by the coders. `Ordinary` is the reference level.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Ordinary,
    Organization,
    Leader,
    Influential,
}

impl Role {
    pub const ALL: [Role; 4] = [
        Role::Ordinary,
        Role::Organization,
        Role::Leader,
        Role::Influential,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Role::Ordinary => "ordinary",
            Role::Organization => "organization",
            Role::Leader => "leader",
            Role::Influential => "influential",
        }
    }

    /// Plural label used in the descriptive tables.
    pub fn plural_label(&self) -> &'static str {
        match self {
            Role::Ordinary => "Ordinary users",
            Role::Organization => "Organizations",
            Role::Leader => "Leaders",
            Role::Influential => "Influential users",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown role {0:?} (expected ordinary, organization, leader or influential)")]
pub struct UnknownRole(pub String);

impl FromStr for Role {
    type Err = UnknownRole;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ordinary" | "individual" | "user" => Ok(Role::Ordinary),
            "organization" | "organisation" | "org" => Ok(Role::Organization),
            "leader" => Ok(Role::Leader),
            "influential" => Ok(Role::Influential),
            _ => Err(UnknownRole(s.to_string())),
        }
    }
}

/// Per-node attributes, indexed like the graph.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeTable {
    pub screen_names: Vec<String>,
    pub roles: Vec<Role>,
    pub followers: Vec<u64>,
}

impl NodeTable {
    /// `n` ordinary nodes named `u0`, `u1`, ... with zero followers.
    pub fn ordinary(n: usize) -> Self {
        Self {
            screen_names: (0..n).map(|i| format!("u{i}")).collect(),
            roles: vec![Role::Ordinary; n],
            followers: vec![0; n],
        }
    }

    pub fn with_roles(roles: Vec<Role>) -> Self {
        let mut t = Self::ordinary(roles.len());
        t.roles = roles;
        t
    }

    pub fn len(&self) -> usize {
        self.roles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roles.is_empty()
    }

    pub fn push(&mut self, screen_name: String, role: Role, followers: u64) -> usize {
        self.screen_names.push(screen_name);
        self.roles.push(role);
        self.followers.push(followers);
        self.roles.len() - 1
    }

    pub fn has_role(&self, role: Role) -> bool {
        self.roles.contains(&role)
    }

    pub fn role_count(&self, role: Role) -> usize {
        self.roles.iter().filter(|&&r| r == role).count()
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = self.len();
        let mut t = Self {
            screen_names: vec![String::new(); n],
            roles: vec![Role::Ordinary; n],
            followers: vec![0; n],
        };
        for v in 0..n {
            t.screen_names[perm[v]] = self.screen_names[v].clone();
            t.roles[perm[v]] = self.roles[v];
            t.followers[perm[v]] = self.followers[v];
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn brute_otp(g: &DirectedGraph, i: usize, j: usize) -> usize {
        (0..g.node_count())
            .filter(|&k| k != i && k != j && g.has_edge(i, k) && g.has_edge(k, j))
            .count()
    }

    #[test]
    fn empty_edge_list() {
        let g = DirectedGraph::from_edge_list(&[], 5).unwrap();
        assert_eq!(g.node_count(), 5);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn duplicates_collapse() {
        let g = DirectedGraph::from_edge_list(&[(0, 1), (0, 1), (1, 2)], 3).unwrap();
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn self_loop_rejected() {
        assert_eq!(
            DirectedGraph::from_edge_list(&[(0, 0)], 1),
            Err(GraphError::SelfLoop(0))
        );
        assert!(matches!(
            DirectedGraph::from_edge_list(&[(0, 3)], 3),
            Err(GraphError::NodeOutOfRange { node: 3, n: 3 })
        ));
    }

    #[test]
    fn otp_examples() {
        let g = DirectedGraph::from_edge_list(&[(1, 3), (3, 2)], 4).unwrap();
        assert_eq!(g.shared_partners_otp(1, 2).unwrap(), 1);
        assert_eq!(g.shared_partners_otp(2, 1).unwrap(), 0);
        let e = DirectedGraph::empty(4);
        assert_eq!(e.shared_partners_otp(0, 3).unwrap(), 0);
        let k3 = DirectedGraph::complete(3);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(k3.shared_partners_otp(i, j).unwrap(), 1);
                }
            }
        }
        assert_eq!(k3.shared_partners_otp(1, 1), Err(GraphError::SelfDyad(1)));
    }

    #[test]
    fn centralization_examples() {
        // centre 0 linked to 5 spokes in both directions
        let k = 5;
        let mut edges = Vec::new();
        for s in 1..=k {
            edges.push((0, s));
            edges.push((s, 0));
        }
        let star = DirectedGraph::from_edge_list(&edges, k + 1).unwrap();
        assert_eq!(star.degree_centralization().unwrap(), 1.0);

        let cycle: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        let cyc = DirectedGraph::from_edge_list(&cycle, 6).unwrap();
        assert_eq!(cyc.degree_centralization().unwrap(), 0.0);

        assert_eq!(
            DirectedGraph::empty(2).degree_centralization(),
            Err(GraphError::TooFewNodes(2))
        );
    }

    #[test]
    fn centralization_large_fixture() {
        // n = 1026 with total degree 2000 and one node of total degree 66:
        // hub has in-degree 65 and out-degree 1, remaining edges form a path
        // through other nodes.
        let n = 1026;
        let mut edges = Vec::new();
        for s in 1..=65 {
            edges.push((s, 0));
        }
        edges.push((0, 66));
        let mut next = 67;
        while edges.len() < 1000 {
            edges.push((next, next + 1));
            next += 1;
        }
        let g = DirectedGraph::from_edge_list(&edges, n).unwrap();
        assert_eq!(g.total_degrees().iter().sum::<usize>(), 2000);
        assert_eq!(*g.total_degrees().iter().max().unwrap(), 66);
        let c = g.degree_centralization().unwrap();
        assert!((c - 0.0313).abs() < 5e-5, "{c}");
    }

    #[test]
    fn toggle_and_queries() {
        let mut g = DirectedGraph::empty(4);
        assert!(g.toggle_edge(0, 1).unwrap());
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(1, 0));
        assert_eq!(g.out_degree(0), 1);
        assert_eq!(g.in_degree(1), 1);
        assert!(!g.toggle_edge(0, 1).unwrap());
        assert_eq!(g.edge_count(), 0);
        assert!(g.toggle_edge(2, 2).is_err());
        let (ins, outs) = DirectedGraph::complete(4).degree_histograms();
        assert_eq!(ins, vec![0, 0, 0, 4]);
        assert_eq!(outs, vec![0, 0, 0, 4]);
    }

    #[test]
    fn role_parsing() {
        assert_eq!("Organization".parse::<Role>().unwrap(), Role::Organization);
        assert_eq!(" leader ".parse::<Role>().unwrap(), Role::Leader);
        assert!("journalist".parse::<Role>().is_err());
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = DirectedGraph> {
        (3..=max_n).prop_flat_map(|n| {
            proptest::collection::vec(proptest::bool::weighted(0.35), n * n).prop_map(move |bits| {
                let mut g = DirectedGraph::empty(n);
                for i in 0..n {
                    for j in 0..n {
                        if i != j && bits[i * n + j] {
                            g.add_edge(i, j).unwrap();
                        }
                    }
                }
                g
            })
        })
    }

    fn check_invariants(g: &DirectedGraph) {
        let mut total = 0;
        for i in 0..g.node_count() {
            assert!(!g.out_neighbors(i).contains(&i));
            assert!(g.out_neighbors(i).windows(2).all(|w| w[0] < w[1]));
            for &j in g.out_neighbors(i) {
                assert!(g.in_neighbors(j).contains(&i));
            }
            for &j in g.in_neighbors(i) {
                assert!(g.out_neighbors(j).contains(&i));
            }
            total += g.out_degree(i);
        }
        assert_eq!(total, g.edge_count());
    }

    proptest! {
        #[test]
        fn toggle_is_involution(g in arb_graph(7), a in 0usize..7, b in 0usize..7) {
            let n = g.node_count();
            let (i, j) = (a % n, b % n);
            prop_assume!(i != j);
            let mut h = g.clone();
            h.toggle_edge(i, j).unwrap();
            check_invariants(&h);
            h.toggle_edge(i, j).unwrap();
            prop_assert_eq!(h, g);
        }

        #[test]
        fn otp_matches_brute_force(g in arb_graph(7)) {
            check_invariants(&g);
            for i in 0..g.node_count() {
                for j in 0..g.node_count() {
                    if i != j {
                        prop_assert_eq!(g.shared_partners_otp(i, j).unwrap(), brute_otp(&g, i, j));
                    }
                }
            }
        }

        #[test]
        fn relabeling_preserves_degree_summaries(g in arb_graph(7), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut perm: Vec<usize> = (0..g.node_count()).collect();
            perm.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let h = g.permuted(&perm);
            prop_assert_eq!(h.edge_count(), g.edge_count());
            prop_assert_eq!(h.degree_histograms(), g.degree_histograms());
            prop_assert_eq!(h.degree_centralization().unwrap(), g.degree_centralization().unwrap());
        }
    }
}
