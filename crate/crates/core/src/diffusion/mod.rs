//! General threshold and triggering model instances, deterministic cascades,
//! and the exact and sampled spread oracles.
//!
//! Node sets are `u64` bitmasks over node indices. Per-node tables (threshold
//! functions, triggering distributions) are [`SetFunction`]s over the node's
//! in-neighbours in ascending index order, so bit `j` of a local mask is the
//! `j`-th in-neighbour.

mod breakpoint;
mod cascade;
mod enumerate;
mod layered;
mod live_edge;
mod rounds;

pub use breakpoint::{exact_spread, exact_spread_many, BreakpointAssignment, DEFAULT_BUDGET};
pub use cascade::{cascade, monte_carlo_spread, SpreadEstimate};
pub use layered::layered_activation;
pub use live_edge::{live_edge_spread, live_edge_spread_table, reach_distribution, reach_distributions};
pub use rounds::{
    final_set_distribution, round_spreads, spread_table, FinalDistribution, SpreadTable, DEFAULT_STATE_BUDGET,
};

use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::{bits, GroundSet, SetFunction, ThresholdViolation};

pub const MAX_NODES: usize = 64;
/// In-degree cap for dense per-node tables.
pub const MAX_IN_DEGREE: usize = 12;

/// Directed graph without self-loops; in-neighbours stored as bitmasks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DirectedGraph {
    labels: Vec<String>,
    in_nbrs: Vec<u64>,
}

impl DirectedGraph {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_NODES {
            return Err(Error::GraphTooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        let n = labels.len();
        Ok(DirectedGraph {
            labels,
            in_nbrs: vec![0; n],
        })
    }

    /// Nodes labelled `0..n`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn with_edges(mut self, edges: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in edges {
            self.add_edge(u, v)?;
        }
        Ok(self)
    }

    pub fn add_edge(&mut self, from: usize, to: usize) -> Result<()> {
        let n = self.n();
        if from >= n || to >= n {
            return Err(Error::InvalidArgument(format!(
                "edge ({from},{to}) outside 0..{n}"
            )));
        }
        if from == to {
            return Err(Error::SelfLoop(from));
        }
        self.in_nbrs[to] |= 1 << from;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn in_mask(&self, v: usize) -> u64 {
        self.in_nbrs[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_nbrs[v].count_ones() as usize
    }

    pub fn in_neighbours(&self, v: usize) -> Vec<usize> {
        bits(self.in_nbrs[v]).collect()
    }

    pub fn has_edge(&self, from: usize, to: usize) -> bool {
        self.in_nbrs[to] >> from & 1 == 1
    }

    /// Edges `(from, to)` sorted by `to`, then `from`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|v| bits(self.in_nbrs[v]).map(move |u| (u, v)))
            .collect()
    }

    pub fn full_mask(&self) -> u64 {
        node_mask(self.n())
    }

    /// Ground set over `IN(v)` labelled with the in-neighbours' labels.
    pub fn in_ground(&self, v: usize) -> Result<GroundSet> {
        GroundSet::new(bits(self.in_nbrs[v]).map(|u| self.labels[u].clone()))
    }

    /// Local mask over `IN(v)` of a global node set.
    pub fn local(&self, v: usize, global: u64) -> u32 {
        compress(global, self.in_nbrs[v])
    }

    /// Global node set of a local mask over `IN(v)`.
    pub fn global(&self, v: usize, local: u32) -> u64 {
        expand(local, self.in_nbrs[v])
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<u64> {
        labels.iter().try_fold(0u64, |m, l| {
            let l = l.as_ref();
            self.index_of(l)
                .map(|i| m | (1 << i))
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        })
    }

    pub fn labels_of(&self, mask: u64) -> Vec<&str> {
        bits(mask).map(|i| self.labels[i].as_str()).collect()
    }

    /// Ground set of all nodes, for set functions of the seed set.
    pub fn node_ground(&self) -> Result<GroundSet> {
        GroundSet::new(self.labels.iter().cloned())
    }
}

pub(crate) fn node_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Gathers the bits of `x` selected by `sel` into the low bits.
pub(crate) fn compress(x: u64, sel: u64) -> u32 {
    let mut out = 0u32;
    for (j, i) in bits(sel).enumerate() {
        out |= ((x >> i & 1) as u32) << j;
    }
    out
}

/// Inverse of [`compress`].
pub(crate) fn expand(x: u32, sel: u64) -> u64 {
    let mut out = 0u64;
    for (j, i) in bits(sel).enumerate() {
        out |= ((x >> j & 1) as u64) << i;
    }
    out
}

/// General threshold instance: graph plus a threshold function over each `IN(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtInstance {
    graph: DirectedGraph,
    thresholds: Vec<SetFunction>,
}

impl GtInstance {
    /// Checks shapes only; use [`validate_gt`] for the threshold conditions.
    pub fn new(graph: DirectedGraph, thresholds: Vec<SetFunction>) -> Result<Self> {
        check_tables(&graph, &thresholds, "threshold")?;
        Ok(GtInstance { graph, thresholds })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn thresholds(&self) -> &[SetFunction] {
        &self.thresholds
    }

    pub fn threshold(&self, v: usize) -> &SetFunction {
        &self.thresholds[v]
    }

    /// `f_v(C ∩ IN(v))` for a global node set `C`.
    pub fn value(&self, v: usize, active: u64) -> &Rational {
        self.thresholds[v].value(self.graph.local(v, active))
    }

    /// Same instance with nodes relabelled: new node `perm[v]` is old node `v`.
    pub fn permuted(&self, perm: &[usize]) -> Result<GtInstance> {
        let n = self.n();
        let mut inv = vec![0; n];
        for (old, &new) in perm.iter().enumerate() {
            inv[new] = old;
        }
        let mut graph = DirectedGraph::new((0..n).map(|new| self.graph.labels[inv[new]].clone()))?;
        for (u, v) in self.graph.edges() {
            graph.add_edge(perm[u], perm[v])?;
        }
        let thresholds = (0..n)
            .map(|new| {
                let old = inv[new];
                let ground = graph.in_ground(new)?;
                Ok(SetFunction::from_fn(ground, |local| {
                    let global_new = graph.global(new, local);
                    let global_old = bits(global_new).fold(0u64, |m, i| m | (1 << inv[i]));
                    self.value(old, global_old).clone()
                }))
            })
            .collect::<Result<Vec<_>>>()?;
        GtInstance::new(graph, thresholds)
    }
}

fn check_tables(graph: &DirectedGraph, tables: &[SetFunction], what: &str) -> Result<()> {
    if tables.len() != graph.n() {
        return Err(Error::InvalidInstance(format!(
            "{} {what} tables for {} nodes",
            tables.len(),
            graph.n()
        )));
    }
    for (v, t) in tables.iter().enumerate() {
        let deg = graph.in_degree(v);
        if deg > MAX_IN_DEGREE {
            return Err(Error::InDegreeCap {
                node: v,
                degree: deg,
                cap: MAX_IN_DEGREE,
            });
        }
        if t.n() != deg {
            return Err(Error::InvalidInstance(format!(
                "{what} table of `{}` is over {} elements, in-degree is {deg}",
                graph.label(v),
                t.n()
            )));
        }
    }
    Ok(())
}

/// One failed threshold condition at a node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GtViolation {
    pub node: usize,
    pub violation: ThresholdViolation,
}

impl fmt::Display for GtViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "node {}: {}", self.node, self.violation)
    }
}

/// Every monotonicity, empty-set and range violation of the thresholds.
pub fn validate_gt(inst: &GtInstance) -> Vec<GtViolation> {
    inst.thresholds
        .iter()
        .enumerate()
        .flat_map(|(node, f)| {
            f.threshold_violations()
                .into_iter()
                .map(move |violation| GtViolation { node, violation })
        })
        .collect()
}

/// Triggering instance: per-node distribution over subsets of `IN(v)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriggeringInstance {
    graph: DirectedGraph,
    dists: Vec<SetFunction>,
}

impl TriggeringInstance {
    /// Rejects negative probabilities and tables not summing to one.
    pub fn new(graph: DirectedGraph, dists: Vec<SetFunction>) -> Result<Self> {
        check_tables(&graph, &dists, "distribution")?;
        for (v, q) in dists.iter().enumerate() {
            if let Some(m) = q.values().iter().position(|p| p.is_negative()) {
                return Err(Error::InvalidInstance(format!(
                    "negative probability {} at subset {m:#b} of `{}`",
                    rational::format(&q.values()[m]),
                    graph.label(v)
                )));
            }
            let sum = q.values().iter().fold(Rational::zero(), |a, b| a + b);
            if !sum.is_one() {
                return Err(Error::Distribution {
                    node: graph.label(v).to_string(),
                    deficit: Rational::one() - &sum,
                    sum,
                });
            }
        }
        Ok(TriggeringInstance { graph, dists })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn dists(&self) -> &[SetFunction] {
        &self.dists
    }

    pub fn dist(&self, v: usize) -> &SetFunction {
        &self.dists[v]
    }

    /// Support of `q_v` as `(global triggering set, probability)`.
    pub fn support(&self, v: usize) -> Vec<(u64, Rational)> {
        self.dists[v]
            .values()
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .map(|(m, p)| (self.graph.global(v, m as u32), p.clone()))
            .collect()
    }
}

/// Exact spread with per-node activation probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSpread {
    pub sigma: Rational,
    pub per_node: Vec<Rational>,
}

impl ExactSpread {
    pub(crate) fn from_per_node(per_node: Vec<Rational>) -> Self {
        let sigma = per_node.iter().fold(Rational::zero(), |a, b| a + b);
        ExactSpread { sigma, per_node }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpreadResult {
    Exact(ExactSpread),
    Estimate(SpreadEstimate),
}


#[cfg(test)]
mod tests {
    use super::testutil::*;
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn graph_rejects_self_loops() {
        let mut g = DirectedGraph::anonymous(2).unwrap();
        assert_eq!(g.add_edge(1, 1), Err(Error::SelfLoop(1)));
        g.add_edge(0, 1).unwrap();
        g.add_edge(0, 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
    }

    #[test]
    fn compress_expand_round_trip() {
        let sel = 0b1011_0100;
        for x in 0..16u32 {
            assert_eq!(compress(expand(x, sel), sel), x);
        }
        assert_eq!(compress(0b1000_0100, sel), 0b1001);
    }

    #[test]
    fn validate_examples() {
        assert!(validate_gt(&or_instance(3, &[(0, 1), (1, 2), (0, 2)])).is_empty());

        let g = DirectedGraph::new(["u", "v"])
            .unwrap()
            .with_edges(&[(0, 1)])
            .unwrap();
        let bad = GtInstance::new(
            g.clone(),
            vec![
                SetFunction::zero(g.in_ground(0).unwrap()),
                SetFunction::new(g.in_ground(1).unwrap(), vec![ratio(1, 10), int(1)]).unwrap(),
            ],
        )
        .unwrap();
        let v = validate_gt(&bad);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].node, 1);
        assert_eq!(v[0].violation, ThresholdViolation::NonzeroAtEmpty(ratio(1, 10)));
    }

    #[test]
    fn monotonicity_violation_found() {
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(0, 2), (1, 2)])
            .unwrap();
        let f = SetFunction::new(
            g.in_ground(2).unwrap(),
            vec![int(0), ratio(1, 2), int(0), ratio(2, 5)],
        )
        .unwrap();
        let inst = GtInstance::new(
            g.clone(),
            vec![
                SetFunction::zero(g.in_ground(0).unwrap()),
                SetFunction::zero(g.in_ground(1).unwrap()),
                f,
            ],
        )
        .unwrap();
        assert!(validate_gt(&inst).contains(&GtViolation {
            node: 2,
            violation: ThresholdViolation::NotMonotone {
                smaller: 0b01,
                larger: 0b11
            }
        }));
    }

    #[test]
    fn shape_mismatch_rejected() {
        let g = DirectedGraph::anonymous(2)
            .unwrap()
            .with_edges(&[(0, 1)])
            .unwrap();
        let wrong = SetFunction::zero(GroundSet::anonymous(0).unwrap());
        assert!(GtInstance::new(g.clone(), vec![wrong.clone(), wrong]).is_err());
    }

    #[test]
    fn triggering_sum_checked() {
        let g = DirectedGraph::anonymous(2)
            .unwrap()
            .with_edges(&[(0, 1)])
            .unwrap();
        let q0 = SetFunction::new(g.in_ground(0).unwrap(), vec![int(1)]).unwrap();
        let q1 = SetFunction::new(g.in_ground(1).unwrap(), vec![ratio(1, 2), ratio(2, 5)]).unwrap();
        match TriggeringInstance::new(g, vec![q0, q1]) {
            Err(Error::Distribution { deficit, .. }) => assert_eq!(deficit, ratio(1, 10)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn permutation_preserves_thresholds() {
        let inst = mixed_cycle();
        let perm = [2, 0, 3, 1];
        let p = inst.permuted(&perm).unwrap();
        for v in 0..4 {
            for s in 0..16u64 {
                let s_new = bits(s).fold(0u64, |m, i| m | (1 << perm[i]));
                assert_eq!(inst.value(v, s), p.value(perm[v], s_new));
            }
        }
    }
}
