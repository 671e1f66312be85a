//! Executable identities behind local AD-∞ implying global AD-∞.
//!
//! Per node `u`, with `h(S) = 1 − P_u(V∖S)`:
//! (a) the Möbius transform of `h` is the enumerated reach distribution `R_u`;
//! (b) `mobius(h) ≥ 0` and `Δ_P h(S) ≥ 0` for all disjoint `P`, `S`;
//! (c) `Δ_S P_u(P) = (−1)^{|S|+1} Δ_S h(V∖(P∪S))` for disjoint nonempty `S`.

use std::fmt;

use num_traits::Signed;

use crate::diffusion::{reach_distributions, spread_table, GtInstance};
use crate::error::Result;
use crate::setfn::{difference, mobius, one_minus, submasks, SetFunction};
use crate::transforms::gt_to_triggering;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeIdentities {
    pub reach_matches: bool,
    pub mobius_nonnegative: bool,
    pub differences_nonnegative: bool,
    pub sign_identity: bool,
}

impl NodeIdentities {
    pub fn holds(&self) -> bool {
        self.reach_matches && self.mobius_nonnegative && self.differences_nonnegative && self.sign_identity
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport {
    pub nodes: Vec<NodeIdentities>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.nodes.iter().all(NodeIdentities::holds)
    }
}

impl fmt::Display for IdentityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (u, r) in self.nodes.iter().enumerate() {
            writeln!(
                f,
                "node={u} reach={} mobius-nonnegative={} differences-nonnegative={} sign-identity={}",
                r.reach_matches, r.mobius_nonnegative, r.differences_nonnegative, r.sign_identity
            )?;
        }
        Ok(())
    }
}

/// Checks the identities on a locally AD-∞ instance.
///
/// `P_u` comes from the threshold-model oracle and `R_u` from live-edge
/// enumeration of the converted triggering instance, so (a) compares two
/// independent computations. Fails with `NotAdInfinity` otherwise.
pub fn verify_identities(inst: &GtInstance, budget: u128) -> Result<IdentityReport> {
    let tr = gt_to_triggering(inst)?;
    let n = inst.n();
    let ground = inst.graph().node_ground()?;
    let table = spread_table(inst, budget)?;
    let reach = reach_distributions(&tr, budget)?;
    let full = ground.full_mask();
    let nodes = (0..n)
        .map(|u| {
            let p = table.node(&ground, u)?;
            let h = SetFunction::from_fn(ground.clone(), |s| one_minus(p.value(full & !s)));
            let g = mobius(&h);
            let mut differences_nonnegative = true;
            let mut sign_identity = true;
            for s in 0..=full {
                for a in submasks((full & !s) as u64).skip(1) {
                    let a = a as u32;
                    if difference(&h, a, s).is_negative() {
                        differences_nonnegative = false;
                    }
                    // Here `a` plays S and `s` plays P in the identity.
                    let rest = full & !(s | a);
                    let lhs = difference(&p, a, s);
                    let mut rhs = difference(&h, a, rest);
                    if a.count_ones().is_multiple_of(2) {
                        rhs = -rhs;
                    }
                    if lhs != rhs {
                        sign_identity = false;
                    }
                }
            }
            Ok(NodeIdentities {
                reach_matches: g == reach[u],
                mobius_nonnegative: g.values().iter().all(|x| !x.is_negative()),
                differences_nonnegative,
                sign_identity,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(IdentityReport { nodes })
}
