//! Layer-by-layer activation recursion for layered graphs.

use std::collections::HashMap;

use num_traits::{One, Zero};

use super::cascade::check_seeds;
use super::GtInstance;
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::{bits, one_minus, submasks};
use crate::transforms::LayerAssignment;

/// `P_v(S_m)` for seeds `S_m` in the bottom layer.
///
/// Descends one layer at a time: given the active set `S_j` of layer `j`, the
/// nodes of layer `j−1` activate independently with probability `f_u(S_j)`,
/// after which layer `j−1` is the new bottom. Only ancestors of `v` are summed.
pub fn layered_activation(
    inst: &GtInstance,
    layers: &LayerAssignment,
    seeds: u64,
    v: usize,
) -> Result<Rational> {
    let g = inst.graph();
    layers.check(g)?;
    check_seeds(inst.n(), seeds)?;
    if v >= inst.n() {
        return Err(Error::InvalidArgument(format!(
            "node {v} outside 0..{}",
            inst.n()
        )));
    }
    let m = layers.m();
    if seeds & !layers.nodes_in(m) != 0 {
        return Err(Error::InvalidLayering(format!(
            "seed set {:?} is not contained in the bottom layer",
            g.labels_of(seeds & !layers.nodes_in(m))
        )));
    }
    let mut ancestors = 1u64 << v;
    loop {
        let next = bits(ancestors).fold(ancestors, |a, u| a | g.in_mask(u));
        if next == ancestors {
            break;
        }
        ancestors = next;
    }
    let mut memo = HashMap::new();
    Ok(recurse(inst, layers, ancestors, v, m, seeds, &mut memo))
}

fn recurse(
    inst: &GtInstance,
    layers: &LayerAssignment,
    ancestors: u64,
    v: usize,
    bottom: usize,
    active: u64,
    memo: &mut HashMap<(usize, u64), Rational>,
) -> Rational {
    let lv = layers.layer(v);
    if lv == bottom {
        return if active >> v & 1 == 1 {
            Rational::one()
        } else {
            Rational::zero()
        };
    }
    if lv + 1 == bottom {
        return inst.value(v, active).clone();
    }
    if let Some(hit) = memo.get(&(bottom, active)) {
        return hit.clone();
    }
    let above = layers.nodes_in(bottom - 1) & ancestors;
    let probs: Vec<(usize, Rational)> = bits(above).map(|u| (u, inst.value(u, active).clone())).collect();
    let mut total = Rational::zero();
    for sub in submasks(above) {
        let mut w = Rational::one();
        for (u, p) in &probs {
            if sub >> u & 1 == 1 {
                w *= p;
            } else {
                w *= one_minus(p);
            }
            if w.is_zero() {
                break;
            }
        }
        if !w.is_zero() {
            w *= recurse(inst, layers, ancestors, v, bottom - 1, sub, memo);
            total += w;
        }
    }
    memo.insert((bottom, active), total.clone());
    total
}
