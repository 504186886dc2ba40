//! ERGM sufficient statistics and their change statistics.
//!
//! A [`ModelSpec`] is an ordered list of [`TermSpec`]s. Binding it to a node
//! table yields a [`Model`], which evaluates the statistic vector `g(y)` of a
//! graph and the change `g(y + ij) - g(y - ij)` caused by a single dyad.
//!
//! Shared-partner terms use outgoing two-paths: `k` is a partner of the
//! ordered pair `(i, j)` when `i -> k` and `k -> j`.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{DirectedGraph, GraphError, NodeTable, Role};
use crate::scalar::{from_usize, lit, Scalar};

/// Decay used for geometrically weighted terms when none is given.
pub const DEFAULT_DECAY: f64 = 0.5;

/// Name of the built-in follower covariate.
pub const FOLLOWERS: &str = "followers";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TermError {
    #[error("decay must be finite and non-negative, got {0}")]
    NegativeDecay(f64),
    #[error("factor level `ordinary` is the reference category and cannot be a term")]
    BaseLevelDisallowed,
    #[error("model has no terms")]
    EmptySpec,
    #[error("unknown covariate {0:?}")]
    UnknownCovariate(String),
    #[error("covariate {name:?} has {got} values, graph has {expected} nodes")]
    CovariateLength {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("covariate {0:?} has non-finite values")]
    NonFiniteCovariate(String),
    #[error("model is bound to {model} nodes but graph has {graph}")]
    NodeCountMismatch { model: usize, graph: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    In,
    Out,
}

/// The nine statistic families.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TermKind {
    Edges,
    GwespOtp,
    GwnspOtp,
    GwInDegree,
    GwOutDegree,
    NodeOutFactor,
    NodeInFactor,
    NodeOutCov,
    NodeInCov,
}

impl TermKind {
    pub const ALL: [TermKind; 9] = [
        TermKind::Edges,
        TermKind::GwespOtp,
        TermKind::GwnspOtp,
        TermKind::GwInDegree,
        TermKind::GwOutDegree,
        TermKind::NodeOutFactor,
        TermKind::NodeInFactor,
        TermKind::NodeOutCov,
        TermKind::NodeInCov,
    ];

    /// Keyword used in model files.
    pub fn keyword(&self) -> &'static str {
        match self {
            TermKind::Edges => "edges",
            TermKind::GwespOtp => "gwesp_otp",
            TermKind::GwnspOtp => "gwnsp_otp",
            TermKind::GwInDegree => "gwidegree",
            TermKind::GwOutDegree => "gwodegree",
            TermKind::NodeOutFactor => "nodeofactor",
            TermKind::NodeInFactor => "nodeifactor",
            TermKind::NodeOutCov => "nodeocov",
            TermKind::NodeInCov => "nodeicov",
        }
    }

    pub fn from_keyword(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == s)
    }
}

/// One model term with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TermSpec {
    Edges,
    GwespOtp { decay: f64 },
    GwnspOtp { decay: f64 },
    GwDegree { direction: Direction, decay: f64 },
    NodeFactor { direction: Direction, level: Role },
    NodeCov { direction: Direction, covariate: String },
}

impl TermSpec {
    pub fn kind(&self) -> TermKind {
        match self {
            TermSpec::Edges => TermKind::Edges,
            TermSpec::GwespOtp { .. } => TermKind::GwespOtp,
            TermSpec::GwnspOtp { .. } => TermKind::GwnspOtp,
            TermSpec::GwDegree { direction: Direction::In, .. } => TermKind::GwInDegree,
            TermSpec::GwDegree { direction: Direction::Out, .. } => TermKind::GwOutDegree,
            TermSpec::NodeFactor { direction: Direction::In, .. } => TermKind::NodeInFactor,
            TermSpec::NodeFactor { direction: Direction::Out, .. } => TermKind::NodeOutFactor,
            TermSpec::NodeCov { direction: Direction::In, .. } => TermKind::NodeInCov,
            TermSpec::NodeCov { direction: Direction::Out, .. } => TermKind::NodeOutCov,
        }
    }

    pub fn decay(&self) -> Option<f64> {
        match *self {
            TermSpec::GwespOtp { decay }
            | TermSpec::GwnspOtp { decay }
            | TermSpec::GwDegree { decay, .. } => Some(decay),
            _ => None,
        }
    }

    pub fn level(&self) -> Option<Role> {
        match *self {
            TermSpec::NodeFactor { level, .. } => Some(level),
            _ => None,
        }
    }

    /// True when the change statistic of a dyad does not depend on the rest of the graph.
    pub fn is_dyad_independent(&self) -> bool {
        matches!(
            self,
            TermSpec::Edges | TermSpec::NodeFactor { .. } | TermSpec::NodeCov { .. }
        )
    }

    pub fn validate(&self) -> Result<(), TermError> {
        if let Some(d) = self.decay() {
            if !(d.is_finite() && d >= 0.0) {
                return Err(TermError::NegativeDecay(d));
            }
        }
        if self.level() == Some(Role::Ordinary) {
            return Err(TermError::BaseLevelDisallowed);
        }
        Ok(())
    }

    /// Coefficient name in the usual ERGM-software style, e.g. `gwesp.OTP.fixed.0.5`.
    pub fn coef_name(&self) -> String {
        match self {
            TermSpec::Edges => "edges".into(),
            TermSpec::GwespOtp { decay } => format!("gwesp.OTP.fixed.{decay}"),
            TermSpec::GwnspOtp { decay } => format!("gwnsp.OTP.fixed.{decay}"),
            TermSpec::GwDegree { direction: Direction::In, decay } => {
                format!("gwidegree.fixed.{decay}")
            }
            TermSpec::GwDegree { direction: Direction::Out, decay } => {
                format!("gwodegree.fixed.{decay}")
            }
            TermSpec::NodeFactor { direction: Direction::Out, level } => {
                format!("nodeofactor.role.{level}")
            }
            TermSpec::NodeFactor { direction: Direction::In, level } => {
                format!("nodeifactor.role.{level}")
            }
            TermSpec::NodeCov { direction: Direction::Out, covariate } => {
                format!("nodeocov.{covariate}")
            }
            TermSpec::NodeCov { direction: Direction::In, covariate } => {
                format!("nodeicov.{covariate}")
            }
        }
    }

    /// Row label for the results table.
    pub fn display_label(&self) -> String {
        match self {
            TermSpec::Edges => "Density".into(),
            TermSpec::GwnspOtp { .. } => "Hierarchical cascades".into(),
            TermSpec::GwespOtp { .. } => "Triadic closure".into(),
            TermSpec::GwDegree { direction: Direction::In, .. } => "Users' popularity".into(),
            TermSpec::GwDegree { direction: Direction::Out, .. } => "Users' activity".into(),
            TermSpec::NodeFactor { direction: Direction::Out, level } => {
                format!("Activity: {}", level.plural_label())
            }
            TermSpec::NodeFactor { direction: Direction::In, level } => {
                format!("Popularity: {}", level.plural_label())
            }
            TermSpec::NodeCov { direction: Direction::Out, covariate } => {
                format!("Sender's {covariate}")
            }
            TermSpec::NodeCov { direction: Direction::In, covariate } => {
                format!("Receiver's {covariate}")
            }
        }
    }
}

impl fmt::Display for TermSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.coef_name())
    }
}

/// Ordered list of terms defining the statistic vector.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub terms: Vec<TermSpec>,
}

impl ModelSpec {
    pub fn new(terms: Vec<TermSpec>) -> Self {
        Self { terms }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn validate(&self) -> Result<(), TermError> {
        if self.terms.is_empty() {
            return Err(TermError::EmptySpec);
        }
        self.terms.iter().try_for_each(TermSpec::validate)
    }

    pub fn is_dyad_independent(&self) -> bool {
        self.terms.iter().all(TermSpec::is_dyad_independent)
    }

    pub fn coef_names(&self) -> Vec<String> {
        self.terms.iter().map(TermSpec::coef_name).collect()
    }

    /// The full thirteen-term role model: density,
    /// cascades, closure, activity and popularity factors for influential
    /// users, leaders and organizations, gw in/out-degree and follower
    /// sender/receiver covariates.
    pub fn standard(decay: f64) -> Self {
        use Direction::{In, Out};
        let mut terms = vec![
            TermSpec::Edges,
            TermSpec::GwnspOtp { decay },
            TermSpec::GwespOtp { decay },
        ];
        for direction in [Out, In] {
            for level in [Role::Influential, Role::Leader, Role::Organization] {
                terms.push(TermSpec::NodeFactor { direction, level });
            }
        }
        terms.extend([
            TermSpec::GwDegree { direction: In, decay },
            TermSpec::GwDegree { direction: Out, decay },
            TermSpec::NodeCov {
                direction: Out,
                covariate: FOLLOWERS.into(),
            },
            TermSpec::NodeCov {
                direction: In,
                covariate: FOLLOWERS.into(),
            },
        ]);
        Self { terms }
    }
}

/// Statistic values in model-term order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct StatVector<T>(pub Vec<T>);

impl<T: Scalar> StatVector<T> {
    pub fn zeros(k: usize) -> Self {
        Self(vec![T::zero(); k])
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    pub fn dot(&self, other: &[T]) -> T {
        self.0.iter().zip(other).map(|(&a, &b)| a * b).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(&a, &b)| a - b).collect())
    }

    pub fn add_scaled(&mut self, other: &[T], scale: T) {
        for (a, &b) in self.0.iter_mut().zip(other) {
            *a += scale * b;
        }
    }
}

impl<T> Deref for StatVector<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for StatVector<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for StatVector<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

/// Geometric weights `w(k) = e^a (1 - (1 - e^{-a})^k)`.
#[derive(Copy, Clone, Debug)]
pub struct GeometricWeights<T> {
    decay: T,
    scale: T,
    ratio: T,
}

impl<T: Scalar> GeometricWeights<T> {
    pub fn new(decay: T) -> Self {
        Self {
            decay,
            scale: decay.exp(),
            ratio: T::one() - (-decay).exp(),
        }
    }

    #[inline]
    pub fn weight(&self, k: usize) -> T {
        if k == 0 {
            T::zero()
        } else {
            self.scale * (T::one() - self.ratio.powi(k as i32))
        }
    }

    /// `w(k + 1) - w(k)`.
    #[inline]
    pub fn increment(&self, k: usize) -> T {
        self.weight(k + 1) - self.weight(k)
    }
}

/// Edges count.
pub fn stat_edges<T: Scalar>(g: &DirectedGraph) -> T {
    from_usize(g.edge_count())
}

/// For every ordered pair `(u, v)` with at least one OTP partner, calls
/// `visit(u, v, count)`.
fn for_each_otp_pair(g: &DirectedGraph, mut visit: impl FnMut(usize, usize, usize)) {
    let n = g.node_count();
    let mut counts = vec![0usize; n];
    let mut touched = Vec::new();
    for u in 0..n {
        for &k in g.out_neighbors(u) {
            for &v in g.out_neighbors(k) {
                if v == u {
                    continue;
                }
                if counts[v] == 0 {
                    touched.push(v);
                }
                counts[v] += 1;
            }
        }
        for &v in &touched {
            visit(u, v, counts[v]);
            counts[v] = 0;
        }
        touched.clear();
    }
}

/// Returns `(gwesp, gwnsp)` for the OTP shared-partner type.
pub fn stat_gwsp_otp<T: Scalar>(g: &DirectedGraph, decay: T) -> (T, T) {
    let w = GeometricWeights::new(decay);
    let (mut esp, mut nsp) = (T::zero(), T::zero());
    for_each_otp_pair(g, |u, v, c| {
        if g.has_edge(u, v) {
            esp += w.weight(c);
        } else {
            nsp += w.weight(c);
        }
    });
    (esp, nsp)
}

fn check_decay<T: Scalar>(decay: T) -> Result<(), TermError> {
    if decay.is_finite() && decay >= T::zero() {
        Ok(())
    } else {
        Err(TermError::NegativeDecay(decay.to_f64().unwrap_or(f64::NAN)))
    }
}

pub fn stat_gwesp_otp<T: Scalar>(g: &DirectedGraph, decay: T) -> Result<T, TermError> {
    check_decay(decay)?;
    Ok(stat_gwsp_otp(g, decay).0)
}

pub fn stat_gwnsp_otp<T: Scalar>(g: &DirectedGraph, decay: T) -> Result<T, TermError> {
    check_decay(decay)?;
    Ok(stat_gwsp_otp(g, decay).1)
}

/// Edgewise OTP shared-partner distribution: `esp[i]` is the number of edges
/// whose endpoints share exactly `i` partners. Sums to the edge count.
pub fn edgewise_sp_distribution(g: &DirectedGraph) -> Vec<usize> {
    let mut dist = vec![0usize; 1];
    for (u, v) in g.edges() {
        let c = g.otp_count(u, v);
        if c >= dist.len() {
            dist.resize(c + 1, 0);
        }
        dist[c] += 1;
    }
    dist
}

#[inline]
fn degree(g: &DirectedGraph, v: usize, direction: Direction) -> usize {
    match direction {
        Direction::In => g.in_degree(v),
        Direction::Out => g.out_degree(v),
    }
}

pub fn stat_gwdegree<T: Scalar>(
    g: &DirectedGraph,
    decay: T,
    direction: Direction,
) -> Result<T, TermError> {
    check_decay(decay)?;
    let w = GeometricWeights::new(decay);
    Ok((0..g.node_count())
        .map(|v| w.weight(degree(g, v, direction)))
        .sum())
}

pub fn stat_nodefactor<T: Scalar>(
    g: &DirectedGraph,
    nodes: &NodeTable,
    level: Role,
    direction: Direction,
) -> Result<T, TermError> {
    if level == Role::Ordinary {
        return Err(TermError::BaseLevelDisallowed);
    }
    let count = (0..g.node_count())
        .filter(|&v| nodes.roles[v] == level)
        .map(|v| degree(g, v, direction))
        .sum::<usize>();
    Ok(from_usize(count))
}

/// Sum over edges of the sender's (`Out`) or receiver's (`In`) covariate value.
pub fn stat_nodecov<T: Scalar>(g: &DirectedGraph, values: &[T], direction: Direction) -> T {
    (0..g.node_count())
        .filter(|&v| degree(g, v, direction) > 0)
        .map(|v| values[v] * from_usize(degree(g, v, direction)))
        .sum()
}

/// `log10(1 + followers)`, z-standardized over nodes (population SD).
/// A constant covariate maps to all zeros.
pub fn follower_covariate<T: Scalar>(followers: &[u64]) -> Vec<T> {
    let n = followers.len();
    if n == 0 {
        return Vec::new();
    }
    let logged: Vec<f64> = followers.iter().map(|&f| (1.0 + f as f64).log10()).collect();
    let mean = logged.iter().sum::<f64>() / n as f64;
    let var = logged.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    let sd = var.sqrt();
    logged
        .iter()
        .map(|x| if sd > 0.0 { lit((x - mean) / sd) } else { T::zero() })
        .collect()
}

/// Transform applied to follower counts, recorded in fit output.
pub const FOLLOWER_TRANSFORM: &str = "followers: log10(1 + x), z-standardized over nodes";

#[derive(Clone, Debug)]
enum BoundTerm<T> {
    Edges,
    Gwesp(GeometricWeights<T>),
    Gwnsp(GeometricWeights<T>),
    GwDegree(Direction, GeometricWeights<T>),
    Factor(Direction, Vec<bool>),
    Cov(Direction, Vec<T>),
}

/// A model specification bound to node attributes.
#[derive(Clone, Debug)]
pub struct Model<T> {
    spec: ModelSpec,
    skipped: Vec<TermSpec>,
    terms: Vec<BoundTerm<T>>,
    n: usize,
}

impl<T: Scalar> Model<T> {
    /// Binds `spec` to a node table. Factor terms whose level no node carries
    /// are dropped (see [`Model::skipped`]); `followers` covariates use
    /// [`follower_covariate`].
    pub fn new(spec: &ModelSpec, nodes: &NodeTable) -> Result<Self, TermError> {
        spec.validate()?;
        let mut kept = Vec::with_capacity(spec.len());
        let mut skipped = Vec::new();
        for t in &spec.terms {
            match t.level() {
                Some(level) if !nodes.has_role(level) => {
                    log::info!("dropping {t}: no node has role {level}");
                    skipped.push(t.clone());
                }
                _ => kept.push(t.clone()),
            }
        }
        let mut covariates = HashMap::new();
        covariates.insert(FOLLOWERS.to_string(), follower_covariate(&nodes.followers));
        let mut model = Self::from_parts(&ModelSpec::new(kept), &nodes.roles, &covariates)?;
        model.skipped = skipped;
        Ok(model)
    }

    /// Binds `spec` exactly as given, with already-transformed covariates.
    pub fn from_parts(
        spec: &ModelSpec,
        roles: &[Role],
        covariates: &HashMap<String, Vec<T>>,
    ) -> Result<Self, TermError> {
        spec.validate()?;
        let n = roles.len();
        let terms = spec
            .terms
            .iter()
            .map(|t| {
                Ok(match t {
                    TermSpec::Edges => BoundTerm::Edges,
                    TermSpec::GwespOtp { decay } => BoundTerm::Gwesp(GeometricWeights::new(lit(*decay))),
                    TermSpec::GwnspOtp { decay } => BoundTerm::Gwnsp(GeometricWeights::new(lit(*decay))),
                    TermSpec::GwDegree { direction, decay } => {
                        BoundTerm::GwDegree(*direction, GeometricWeights::new(lit(*decay)))
                    }
                    TermSpec::NodeFactor { direction, level } => {
                        BoundTerm::Factor(*direction, roles.iter().map(|r| r == level).collect())
                    }
                    TermSpec::NodeCov { direction, covariate } => {
                        let values = covariates
                            .get(covariate)
                            .ok_or_else(|| TermError::UnknownCovariate(covariate.clone()))?;
                        if values.len() != n {
                            return Err(TermError::CovariateLength {
                                name: covariate.clone(),
                                got: values.len(),
                                expected: n,
                            });
                        }
                        if values.iter().any(|v| !v.is_finite()) {
                            return Err(TermError::NonFiniteCovariate(covariate.clone()));
                        }
                        BoundTerm::Cov(*direction, values.clone())
                    }
                })
            })
            .collect::<Result<Vec<_>, TermError>>()?;
        Ok(Self {
            spec: spec.clone(),
            skipped: Vec::new(),
            terms,
            n,
        })
    }

    /// Terms actually in the model.
    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    /// Terms removed because their factor level is absent.
    pub fn skipped(&self) -> &[TermSpec] {
        &self.skipped
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    fn check_graph(&self, g: &DirectedGraph) -> Result<(), TermError> {
        if g.node_count() != self.n {
            return Err(TermError::NodeCountMismatch {
                model: self.n,
                graph: g.node_count(),
            });
        }
        Ok(())
    }

    /// The statistic vector `g(y)`.
    pub fn statistics(&self, g: &DirectedGraph) -> Result<StatVector<T>, TermError> {
        self.check_graph(g)?;
        let mut sp_cache: Option<(T, T, T)> = None;
        let mut out = Vec::with_capacity(self.len());
        for term in &self.terms {
            let value = match term {
                BoundTerm::Edges => stat_edges(g),
                BoundTerm::Gwesp(w) | BoundTerm::Gwnsp(w) => {
                    // both shared-partner sums come out of one pass; reuse when decays agree
                    let (esp, nsp) = match sp_cache {
                        Some((decay, esp, nsp)) if decay == w.decay => (esp, nsp),
                        _ => {
                            let (esp, nsp) = stat_gwsp_otp(g, w.decay);
                            sp_cache = Some((w.decay, esp, nsp));
                            (esp, nsp)
                        }
                    };
                    if matches!(term, BoundTerm::Gwesp(_)) {
                        esp
                    } else {
                        nsp
                    }
                }
                BoundTerm::GwDegree(dir, w) => (0..g.node_count())
                    .map(|v| w.weight(degree(g, v, *dir)))
                    .sum(),
                BoundTerm::Factor(dir, mask) => from_usize(
                    (0..g.node_count())
                        .filter(|&v| mask[v])
                        .map(|v| degree(g, v, *dir))
                        .sum::<usize>(),
                ),
                BoundTerm::Cov(dir, values) => stat_nodecov(g, values, *dir),
            };
            out.push(value);
        }
        Ok(StatVector(out))
    }

    /// `g(y with i->j) - g(y without i->j)`; the graph is not modified.
    pub fn change_statistics(
        &self,
        g: &DirectedGraph,
        i: usize,
        j: usize,
    ) -> Result<StatVector<T>, TermError> {
        self.check_graph(g)?;
        g.check_dyad(i, j)?;
        let mut out = vec![T::zero(); self.len()];
        self.change_into(g, i, j, &mut out);
        Ok(StatVector(out))
    }

    /// Unchecked change statistics written into `out` (length = number of terms).
    pub(crate) fn change_into(&self, g: &DirectedGraph, i: usize, j: usize, out: &mut [T]) {
        let present = g.has_edge(i, j);
        let off = usize::from(present);
        for (slot, term) in out.iter_mut().zip(&self.terms) {
            *slot = match term {
                BoundTerm::Edges => T::one(),
                BoundTerm::Gwesp(w) => sp_change(g, i, j, off, w, true),
                BoundTerm::Gwnsp(w) => sp_change(g, i, j, off, w, false),
                BoundTerm::GwDegree(Direction::Out, w) => w.increment(g.out_degree(i) - off),
                BoundTerm::GwDegree(Direction::In, w) => w.increment(g.in_degree(j) - off),
                BoundTerm::Factor(Direction::Out, mask) => indicator(mask[i]),
                BoundTerm::Factor(Direction::In, mask) => indicator(mask[j]),
                BoundTerm::Cov(Direction::Out, values) => values[i],
                BoundTerm::Cov(Direction::In, values) => values[j],
            };
        }
    }

    /// Per-term dyad independence, in model order.
    pub fn dyad_independent_mask(&self) -> Vec<bool> {
        self.spec.terms.iter().map(TermSpec::is_dyad_independent).collect()
    }
}

#[inline]
fn indicator<T: Scalar>(b: bool) -> T {
    if b {
        T::one()
    } else {
        T::zero()
    }
}

/// Change in the edgewise (`edgewise = true`) or non-edgewise shared-partner
/// sum when `i -> j` goes from absent to present. `off` is 1 when the edge is
/// currently present, so partner counts are taken in the edge-absent graph.
fn sp_change<T: Scalar>(
    g: &DirectedGraph,
    i: usize,
    j: usize,
    off: usize,
    w: &GeometricWeights<T>,
    edgewise: bool,
) -> T {
    // (i, j) moves from the non-edge set to the edge set
    let own = w.weight(g.otp_count(i, j));
    let mut delta = if edgewise { own } else { -own };
    // new two-paths i -> j -> m raise the partner count of (i, m)
    for &m in g.out_neighbors(j) {
        if m == i {
            continue;
        }
        if g.has_edge(i, m) == edgewise {
            delta += w.increment(g.otp_count(i, m) - off);
        }
    }
    // new two-paths l -> i -> j raise the partner count of (l, j)
    for &l in g.in_neighbors(i) {
        if l == j {
            continue;
        }
        if g.has_edge(l, j) == edgewise {
            delta += w.increment(g.otp_count(l, j) - off);
        }
    }
    delta
}

/// Convenience wrapper: binds `spec` to `nodes` and evaluates `g(y)`.
pub fn statistics<T: Scalar>(
    g: &DirectedGraph,
    nodes: &NodeTable,
    spec: &ModelSpec,
) -> Result<StatVector<T>, TermError> {
    Model::new(spec, nodes)?.statistics(g)
}

/// Convenience wrapper around [`Model::change_statistics`].
pub fn change_statistics<T: Scalar>(
    g: &DirectedGraph,
    nodes: &NodeTable,
    spec: &ModelSpec,
    i: usize,
    j: usize,
) -> Result<StatVector<T>, TermError> {
    Model::new(spec, nodes)?.change_statistics(g, i, j)
}
