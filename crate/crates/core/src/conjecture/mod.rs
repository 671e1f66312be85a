//! Certified random instances, exact global AD-k checks, theorem regression
//! campaigns and the counterexample search for the open range.

pub mod battery;
mod campaign;
mod generate;
mod global;
mod identities;

pub use campaign::{
    replay_instance, run_campaign, ConjectureReport, Counterexample, InstanceRecord, InstanceStatus, Mode,
    Verdict,
};
pub use generate::{
    coverage_function, gen_adk_function, gen_graph, gen_instance, instance_rng, REJECTION_BUDGET,
};
pub use global::{global_adk_check, GlobalReport, Target};
pub use identities::{verify_identities, IdentityReport, NodeIdentities};

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::Order;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphKind {
    Layered,
    Dag,
    General,
}

impl fmt::Display for GraphKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraphKind::Layered => "layered",
            GraphKind::Dag => "dag",
            GraphKind::General => "general",
        })
    }
}

impl FromStr for GraphKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "layered" => Ok(GraphKind::Layered),
            "dag" => Ok(GraphKind::Dag),
            "general" => Ok(GraphKind::General),
            _ => Err(Error::InvalidArgument(format!(
                "graph kind `{s}` is not one of layered, dag, general"
            ))),
        }
    }
}

/// Threshold function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// `f(C) = 1 − Σ_{A ⊆ ground∖C} q(A)` for a random distribution `q`; AD-∞.
    TriggeringDerived,
    /// Random tables redrawn until AD-k holds.
    RejectionSampled,
    /// Weighted coverage functions; AD-∞.
    Coverage,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::TriggeringDerived => "triggering",
            Family::RejectionSampled => "rejection",
            Family::Coverage => "coverage",
        })
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "triggering" => Ok(Family::TriggeringDerived),
            "rejection" => Ok(Family::RejectionSampled),
            "coverage" => Ok(Family::Coverage),
            _ => Err(Error::InvalidArgument(format!(
                "family `{s}` is not one of triggering, rejection, coverage"
            ))),
        }
    }
}

/// Everything needed to regenerate a campaign's instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenConfig {
    pub graph_kind: GraphKind,
    pub n: usize,
    pub edge_density: Rational,
    pub k: Order,
    pub family: Family,
    /// Rejection family only: also require AD-(k+1) to fail when `k < ground size`.
    pub strict: bool,
    pub max_in_degree: usize,
    pub rng_seed: u64,
}

/// In-degree cap `max(3, k+1)`: below `k+1` inputs an AD-k threshold is AD-∞.
pub fn default_in_degree_cap(k: Order) -> usize {
    match k {
        Order::Finite(k) => (k + 1).clamp(3, crate::diffusion::MAX_IN_DEGREE),
        Order::Infinity => 3,
    }
}

/// Largest node count accepted for exact campaigns.
pub const MAX_EXACT_NODES: usize = 8;

impl GenConfig {
    pub fn new(graph_kind: GraphKind, n: usize, k: Order, rng_seed: u64) -> Self {
        GenConfig {
            graph_kind,
            n,
            edge_density: rational::ratio(1, 2),
            k,
            family: match k {
                Order::Infinity => Family::TriggeringDerived,
                Order::Finite(_) => Family::RejectionSampled,
            },
            strict: false,
            max_in_degree: default_in_degree_cap(k),
            rng_seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.n > MAX_EXACT_NODES {
            return Err(Error::InvalidArgument(format!(
                "node count {} outside 1..={MAX_EXACT_NODES}",
                self.n
            )));
        }
        if self.graph_kind == GraphKind::Layered && self.n < 2 {
            return Err(Error::InvalidArgument(
                "layered graphs need at least 2 nodes".into(),
            ));
        }
        if !rational::in_unit_interval(&self.edge_density) {
            return Err(Error::InvalidArgument(format!(
                "edge density {} outside [0,1]",
                rational::format(&self.edge_density)
            )));
        }
        if self.k == Order::Finite(0) {
            return Err(Error::InvalidArgument("k must be at least 1".into()));
        }
        if self.max_in_degree == 0 || self.max_in_degree > crate::diffusion::MAX_IN_DEGREE {
            return Err(Error::InvalidArgument(format!(
                "in-degree cap {} outside 1..={}",
                self.max_in_degree,
                crate::diffusion::MAX_IN_DEGREE
            )));
        }
        Ok(())
    }
}

impl fmt::Display for GenConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "graph={} n={} density={} k={} family={} strict={} max-in-degree={} seed={}",
            self.graph_kind,
            self.n,
            rational::format(&self.edge_density),
            self.k,
            self.family,
            self.strict,
            self.max_in_degree,
            self.rng_seed
        )
    }
}
