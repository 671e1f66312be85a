//! Global AD-k check of the spread function and every activation probability.

use std::fmt;

use crate::diffusion::{spread_table, GtInstance, SpreadTable};
use crate::error::{Error, Result};
use crate::setfn::{is_adk, AdkReport, AdkWitness, Order, SetFunction};

use super::MAX_EXACT_NODES;

/// Set function of the seed set under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    Sigma,
    Node(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Sigma => f.write_str("sigma"),
            Target::Node(v) => write!(f, "node:{v}"),
        }
    }
}

impl Target {
    pub fn function(&self, table: &SpreadTable, inst: &GtInstance) -> Result<SetFunction> {
        let ground = inst.graph().node_ground()?;
        match self {
            Target::Sigma => table.sigma(&ground),
            Target::Node(v) => table.node(&ground, *v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GlobalReport {
    pub k: Order,
    pub sigma: AdkReport,
    pub nodes: Vec<AdkReport>,
    pub table: SpreadTable,
}

impl GlobalReport {
    pub fn holds(&self) -> bool {
        self.sigma.holds && self.nodes.iter().all(|r| r.holds)
    }

    /// First failure, `σ` before the nodes in index order.
    pub fn first_violation(&self) -> Option<(Target, &AdkWitness)> {
        if let Some(w) = &self.sigma.witness {
            return Some((Target::Sigma, w));
        }
        self.nodes
            .iter()
            .enumerate()
            .find_map(|(v, r)| r.witness.as_ref().map(|w| (Target::Node(v), w)))
    }
}

/// Tabulates `σ` and every `P_v` over all seed sets and checks each for AD-k.
pub fn global_adk_check(inst: &GtInstance, k: Order, budget: u128) -> Result<GlobalReport> {
    if inst.n() > MAX_EXACT_NODES {
        return Err(Error::InvalidArgument(format!(
            "global check supports at most {MAX_EXACT_NODES} nodes, got {}",
            inst.n()
        )));
    }
    let table = spread_table(inst, budget)?;
    let sigma = is_adk(&Target::Sigma.function(&table, inst)?, k);
    let nodes = (0..inst.n())
        .map(|v| Ok(is_adk(&Target::Node(v).function(&table, inst)?, k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GlobalReport {
        k,
        sigma,
        nodes,
        table,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::{DirectedGraph, DEFAULT_STATE_BUDGET};
    use crate::rational::{int, ratio};

    #[test]
    fn single_node_is_ad_infinity() {
        let g = DirectedGraph::anonymous(1).unwrap();
        let inst = GtInstance::new(g.clone(), vec![SetFunction::zero(g.in_ground(0).unwrap())]).unwrap();
        let r = global_adk_check(&inst, Order::Infinity, DEFAULT_STATE_BUDGET).unwrap();
        assert!(r.holds());
        assert_eq!(r.table.spreads[1].sigma, int(1));
    }

    #[test]
    fn supermodular_threshold_breaks_global_submodularity() {
        // a, b -> v with the AD-1-only table 0, 1/5, 1/5, 3/5.
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(0, 2), (1, 2)])
            .unwrap();
        let inst = GtInstance::new(
            g.clone(),
            vec![
                SetFunction::zero(g.in_ground(0).unwrap()),
                SetFunction::zero(g.in_ground(1).unwrap()),
                SetFunction::new(
                    g.in_ground(2).unwrap(),
                    vec![int(0), ratio(1, 5), ratio(1, 5), ratio(3, 5)],
                )
                .unwrap(),
            ],
        )
        .unwrap();
        assert!(global_adk_check(&inst, Order::Finite(1), DEFAULT_STATE_BUDGET)
            .unwrap()
            .holds());
        let r = global_adk_check(&inst, Order::Finite(2), DEFAULT_STATE_BUDGET).unwrap();
        let (target, w) = r.first_violation().unwrap();
        assert_eq!(target, Target::Sigma);
        assert_eq!((w.s, w.a), (0, 0b011));
        assert_eq!(w.value, ratio(1, 5));
    }
}
