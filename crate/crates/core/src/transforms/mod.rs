//! Constructive equivalences between instances: triggering and threshold
//! conversion, DAG to layered reduction, and the layered seed lift.

mod convert;
mod dag;
mod lift;

pub use convert::{gt_to_triggering, triggering_to_gt};
pub use dag::{dag_layering, dag_to_layered};
pub use lift::lift_layered;

use std::fmt;

use num_traits::Zero;

use crate::diffusion::{exact_spread_many, round_spreads, DirectedGraph, ExactSpread, GtInstance};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::{bits, is_adk, AdkReport, Order};

/// Layer index in `1..=m` per node; every edge goes from layer `i+1` to layer `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LayerAssignment {
    layers: Vec<usize>,
    m: usize,
}

impl LayerAssignment {
    pub fn new(layers: Vec<usize>, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidLayering("layer count must be at least 1".into()));
        }
        if let Some(v) = layers.iter().position(|&l| l == 0 || l > m) {
            return Err(Error::InvalidLayering(format!(
                "node {v} has layer {} outside 1..={m}",
                layers[v]
            )));
        }
        Ok(LayerAssignment { layers, m })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layers[v]
    }

    pub fn layers(&self) -> &[usize] {
        &self.layers
    }

    pub fn nodes_in(&self, layer: usize) -> u64 {
        self.layers
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == layer)
            .fold(0, |m, (v, _)| m | 1 << v)
    }

    /// Checks the node count and that every edge goes from layer `i+1` to layer `i`.
    pub fn check(&self, graph: &DirectedGraph) -> Result<()> {
        if self.layers.len() != graph.n() {
            return Err(Error::InvalidLayering(format!(
                "{} layer entries for {} nodes",
                self.layers.len(),
                graph.n()
            )));
        }
        for (u, v) in graph.edges() {
            if self.layers[u] != self.layers[v] + 1 {
                return Err(Error::InvalidLayering(format!(
                    "edge {} -> {} joins layer {} to layer {}",
                    graph.label(u),
                    graph.label(v),
                    self.layers[u],
                    self.layers[v]
                )));
            }
        }
        Ok(())
    }
}

/// Correspondence between an original instance and its image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeMap {
    /// Image node of each original node.
    pub forward: Vec<usize>,
    /// Bottom-layer copy of each original node, for the lift.
    pub bottom_copy: Option<Vec<usize>>,
    /// Image nodes whose activation probabilities sum to the original spread.
    pub kept: u64,
}

impl NodeMap {
    pub fn identity(n: usize) -> Self {
        NodeMap {
            forward: (0..n).collect(),
            bottom_copy: None,
            kept: crate::diffusion::node_mask(n),
        }
    }

    /// Image seed set of an original seed set.
    pub fn map_seeds(&self, seeds: u64) -> u64 {
        let targets = self.bottom_copy.as_ref().unwrap_or(&self.forward);
        bits(seeds).fold(0, |m, v| m | 1 << targets[v])
    }
}

/// Spread of one seed set on both sides of a transform.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedComparison {
    pub seeds: u64,
    pub original: Rational,
    pub image: Rational,
}

impl SeedComparison {
    pub fn difference(&self) -> Rational {
        &self.image - &self.original
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransformReport {
    pub comparisons: Vec<SeedComparison>,
    /// AD-k report of every image threshold, by image node.
    pub local: Vec<AdkReport>,
}

impl TransformReport {
    pub fn spreads_agree(&self) -> bool {
        self.comparisons.iter().all(|c| c.original == c.image)
    }

    pub fn locally_adk(&self) -> bool {
        self.local.iter().all(|r| r.holds)
    }
}

impl fmt::Display for TransformReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.comparisons {
            writeln!(
                f,
                "seeds={:#b} original={} image={} difference={}",
                c.seeds,
                rational::format(&c.original),
                rational::format(&c.image),
                rational::format(&c.difference())
            )?;
        }
        for (v, r) in self.local.iter().enumerate() {
            if let Some(w) = &r.witness {
                writeln!(
                    f,
                    "node={v} adk=fail k={} s={:#b} a={:#b} value={}",
                    r.checked_k,
                    w.s,
                    w.a,
                    rational::format(&w.value)
                )?;
            }
        }
        Ok(())
    }
}

/// Exact spread oracle used on both sides of a transform check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpreadOracle {
    /// Threshold-interval enumeration; budget counts interval combinations.
    Breakpoint,
    /// Round-by-round dynamic program; budget counts memoised states.
    Rounds,
}

impl SpreadOracle {
    pub fn spreads(self, inst: &GtInstance, seeds: &[u64], budget: u128) -> Result<Vec<ExactSpread>> {
        match self {
            SpreadOracle::Breakpoint => exact_spread_many(inst, seeds, budget),
            SpreadOracle::Rounds => round_spreads(inst, seeds, budget),
        }
    }
}

/// Compares `σ(S)` with `Σ_{u∈kept} P'_u(S')` for each seed set and checks
/// every image threshold for AD-k.
pub fn verify_transform(
    original: &GtInstance,
    image: &GtInstance,
    map: &NodeMap,
    seeds: &[u64],
    k: Order,
    oracle: SpreadOracle,
    budget: u128,
) -> Result<TransformReport> {
    if map.forward.len() != original.n() {
        return Err(Error::InvalidArgument(format!(
            "node map covers {} nodes, original has {}",
            map.forward.len(),
            original.n()
        )));
    }
    let lhs = oracle.spreads(original, seeds, budget)?;
    let mapped: Vec<u64> = seeds.iter().map(|&s| map.map_seeds(s)).collect();
    let rhs = oracle.spreads(image, &mapped, budget)?;
    let comparisons = seeds
        .iter()
        .zip(lhs.iter().zip(&rhs))
        .map(|(&s, (l, r))| SeedComparison {
            seeds: s,
            original: l.sigma.clone(),
            image: bits(map.kept).fold(Rational::zero(), |a, u| a + &r.per_node[u]),
        })
        .collect();
    let local = image.thresholds().iter().map(|f| is_adk(f, k)).collect();
    Ok(TransformReport { comparisons, local })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::testutil::mixed_cycle;
    use crate::rational::ratio;
    use crate::setfn::SetFunction;

    #[test]
    fn layer_assignment_checks() {
        assert!(LayerAssignment::new(vec![1, 0], 2).is_err());
        assert!(LayerAssignment::new(vec![1, 3], 2).is_err());
        assert!(LayerAssignment::new(vec![], 0).is_err());
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(1, 0), (2, 1)])
            .unwrap();
        let l = LayerAssignment::new(vec![1, 2, 3], 3).unwrap();
        l.check(&g).unwrap();
        assert_eq!(l.nodes_in(3), 0b100);
        assert!(LayerAssignment::new(vec![1, 2, 2], 3).unwrap().check(&g).is_err());
    }

    #[test]
    fn identity_transform_agrees() {
        let inst = mixed_cycle();
        let seeds: Vec<u64> = (0..16).collect();
        let r = verify_transform(
            &inst,
            &inst,
            &NodeMap::identity(4),
            &seeds,
            Order::Finite(1),
            SpreadOracle::Breakpoint,
            1 << 20,
        )
        .unwrap();
        assert!(r.spreads_agree());
        assert!(r.locally_adk());
    }

    #[test]
    fn corrupted_threshold_flagged() {
        let inst = mixed_cycle();
        let mut th = inst.thresholds().to_vec();
        let mut vals = th[0].values().to_vec();
        vals[1] = ratio(1, 3);
        th[0] = SetFunction::new(th[0].ground().clone(), vals).unwrap();
        let bad = GtInstance::new(inst.graph().clone(), th).unwrap();
        let r = verify_transform(
            &inst,
            &bad,
            &NodeMap::identity(4),
            &[0b0010],
            Order::Finite(1),
            SpreadOracle::Breakpoint,
            1 << 20,
        )
        .unwrap();
        assert!(!r.spreads_agree());
        assert!(r.to_string().contains("difference=-"));
    }
}
