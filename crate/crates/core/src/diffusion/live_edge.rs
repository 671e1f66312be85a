//! Exact triggering-model quantities by enumerating live-edge graphs.
//!
//! A live-edge graph fixes one triggering set `T_v` per node; edge `(u, v)` is
//! live iff `u ∈ T_v`. Combinations are weighted by `Π_v q_v(T_v)`.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::Zero;

use super::cascade::{check_seeds, closure};
use super::enumerate::{enumerate, to_rational, Digits, Weight};
use super::{ExactSpread, SpreadTable, TriggeringInstance};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::{bits, mobius_inverse, one_minus, SetFunction, MAX_GROUND};

struct Prepared {
    sets: Vec<Vec<u64>>,
    digits: Digits,
    total: u64,
}

fn prepare(inst: &TriggeringInstance, budget: u128) -> Result<Prepared> {
    let supports: Vec<Vec<(u64, Rational)>> = (0..inst.n()).map(|v| inst.support(v)).collect();
    let sets = supports.iter().map(|s| s.iter().map(|e| e.0).collect()).collect();
    let probs: Vec<Vec<Rational>> = supports
        .into_iter()
        .map(|s| s.into_iter().map(|e| e.1).collect())
        .collect();
    let digits = Digits::from_rationals(&probs);
    let total = digits.check_budget("live-edge enumeration", budget)?;
    Ok(Prepared { sets, digits, total })
}

fn live(prep: &Prepared, idx: &[usize]) -> Vec<u64> {
    idx.iter().enumerate().map(|(v, &i)| prep.sets[v][i]).collect()
}

/// Nodes that reach `u` along live edges, including `u`.
fn reaching(trig: &[u64], u: usize) -> u64 {
    let mut set = 1u64 << u;
    loop {
        let next = bits(set).fold(set, |m, w| m | trig[w]);
        if next == set {
            return set;
        }
        set = next;
    }
}

fn weighted_maps<W: Weight>(
    prep: &Prepared,
    keys: impl Fn(&[u64]) -> Vec<u64> + Sync,
    width: usize,
) -> Vec<Vec<(u64, BigUint)>> {
    let maps = enumerate::<W, Vec<HashMap<u64, W>>>(
        &prep.digits,
        prep.total,
        || vec![HashMap::new(); width],
        |acc, idx, w| {
            for (map, key) in acc.iter_mut().zip(keys(&live(prep, idx))) {
                *map.entry(key).or_insert_with(W::zero) += w.clone();
            }
        },
        |mut a, b| {
            for (ma, mb) in a.iter_mut().zip(b) {
                for (k, w) in mb {
                    *ma.entry(k).or_insert_with(W::zero) += w;
                }
            }
            a
        },
    );
    maps.into_iter()
        .map(|m| {
            let mut v: Vec<(u64, BigUint)> = m.into_iter().map(|(k, w)| (k, w.into_big())).collect();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}

fn run(prep: &Prepared, keys: impl Fn(&[u64]) -> Vec<u64> + Sync, width: usize) -> Vec<Vec<(u64, Rational)>> {
    let raw = if prep.digits.fits_u128() {
        weighted_maps::<u128>(prep, keys, width)
    } else {
        weighted_maps::<BigUint>(prep, keys, width)
    };
    let den = prep.digits.total_denominator();
    raw.into_iter()
        .map(|m| m.into_iter().map(|(k, w)| (k, to_rational(w, &den))).collect())
        .collect()
}

/// Exact `σ(S)` and every `P_v(S)` in the triggering model.
pub fn live_edge_spread(inst: &TriggeringInstance, seeds: u64, budget: u128) -> Result<ExactSpread> {
    let n = inst.n();
    check_seeds(n, seeds)?;
    let prep = prepare(inst, budget)?;
    let dist = run(
        &prep,
        |trig| vec![closure(n, seeds, |v, active| trig[v] & active != 0)],
        1,
    );
    let mut per_node = vec![Rational::zero(); n];
    for (set, p) in &dist[0] {
        for v in bits(*set) {
            per_node[v] += p;
        }
    }
    Ok(ExactSpread::from_per_node(per_node))
}

/// `R_u(T) = Pr[the set of nodes reaching u is T]` for every node `u`.
pub fn reach_distributions(inst: &TriggeringInstance, budget: u128) -> Result<Vec<SetFunction>> {
    let n = inst.n();
    if n > MAX_GROUND {
        return Err(Error::GroundTooLarge(n));
    }
    let ground = inst.graph().node_ground()?;
    let prep = prepare(inst, budget)?;
    let dists = run(&prep, |trig| (0..n).map(|u| reaching(trig, u)).collect(), n);
    dists
        .into_iter()
        .map(|d| {
            let mut table = vec![Rational::zero(); 1 << n];
            for (set, p) in d {
                table[set as usize] = p;
            }
            SetFunction::new(ground.clone(), table)
        })
        .collect()
}

/// [`reach_distributions`] for a single node.
pub fn reach_distribution(inst: &TriggeringInstance, u: usize, budget: u128) -> Result<SetFunction> {
    if u >= inst.n() {
        return Err(Error::InvalidArgument(format!(
            "node {u} outside 0..{}",
            inst.n()
        )));
    }
    Ok(reach_distributions(inst, budget)?.swap_remove(u))
}

/// Exact spreads for all seed sets via `P_u(S) = 1 − Σ_{T ⊆ V∖S} R_u(T)`.
pub fn live_edge_spread_table(inst: &TriggeringInstance, budget: u128) -> Result<SpreadTable> {
    let n = inst.n();
    let full = (1u64 << n) - 1;
    let cumulative: Vec<SetFunction> = reach_distributions(inst, budget)?
        .iter()
        .map(mobius_inverse)
        .collect();
    let spreads = (0..=full)
        .map(|s| {
            ExactSpread::from_per_node(
                cumulative
                    .iter()
                    .map(|z| one_minus(z.value((full & !s) as u32)))
                    .collect(),
            )
        })
        .collect();
    Ok(SpreadTable { spreads })
}
