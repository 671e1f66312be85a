//! Deterministic cascades and Monte Carlo spread estimation.

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{node_mask, GtInstance};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::setfn::bits;

const BLOCK: u64 = 4096;

/// Synchronous progressive closure: each round adds every inactive node for which `fires` holds.
pub(crate) fn closure(n: usize, seeds: u64, mut fires: impl FnMut(usize, u64) -> bool) -> u64 {
    let mut active = seeds;
    loop {
        let mut next = active;
        for v in 0..n {
            if active >> v & 1 == 0 && fires(v, active) {
                next |= 1 << v;
            }
        }
        if next == active {
            return active;
        }
        active = next;
    }
}

/// Local mask of `active` over the in-neighbour list.
#[inline]
pub(crate) fn gather(active: u64, ins: &[usize]) -> usize {
    ins.iter()
        .enumerate()
        .fold(0, |m, (j, &u)| m | ((active >> u & 1) as usize) << j)
}

/// Final active set from `seeds` with fixed activation levels.
pub fn cascade(inst: &GtInstance, seeds: u64, levels: &[Rational]) -> Result<u64> {
    let n = inst.n();
    if levels.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{} levels for {n} nodes",
            levels.len()
        )));
    }
    if let Some(v) = levels.iter().position(|l| !rational::in_unit_interval(l)) {
        return Err(Error::InvalidArgument(format!(
            "level {} of node {v} lies outside [0,1]",
            rational::format(&levels[v])
        )));
    }
    check_seeds(n, seeds)?;
    Ok(closure(n, seeds, |v, active| {
        !(levels[v].clone() - inst.value(v, active)).is_positive()
    }))
}

pub(crate) fn check_seeds(n: usize, seeds: u64) -> Result<()> {
    if seeds & !node_mask(n) != 0 {
        return Err(Error::InvalidArgument(format!(
            "seed set {seeds:#b} has nodes outside 0..{n}"
        )));
    }
    Ok(())
}

/// Sample mean of the final active-set size, with per-node activation frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub per_node: Vec<f64>,
}

#[derive(Clone)]
struct Tally {
    sum: u64,
    sum_sq: u64,
    per_node: Vec<u64>,
}

impl Tally {
    fn new(n: usize) -> Self {
        Tally {
            sum: 0,
            sum_sq: 0,
            per_node: vec![0; n],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        for (a, b) in self.per_node.iter_mut().zip(other.per_node) {
            *a += b;
        }
        self
    }
}

/// Averages `trials` cascades with levels drawn uniformly from (0,1].
///
/// Trials are split into fixed blocks, block `b` drawing from stream `b` of a
/// ChaCha8 generator keyed by `rng_seed`, so the result is independent of the
/// thread count.
pub fn monte_carlo_spread(
    inst: &GtInstance,
    seeds: u64,
    trials: u64,
    rng_seed: u64,
) -> Result<SpreadEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let n = inst.n();
    check_seeds(n, seeds)?;
    let ins: Vec<Vec<usize>> = (0..n).map(|v| inst.graph().in_neighbours(v)).collect();
    let tables: Vec<Vec<f64>> = inst
        .thresholds()
        .iter()
        .map(|f| f.values().iter().map(rational::to_f64).collect())
        .collect();
    let blocks = trials.div_ceil(BLOCK);
    let tally = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
            rng.set_stream(b);
            let mut tally = Tally::new(n);
            let mut levels = vec![0f64; n];
            for _ in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                for l in levels.iter_mut() {
                    *l = 1.0 - rng.random::<f64>();
                }
                let fin = closure(n, seeds, |v, active| {
                    tables[v][gather(active, &ins[v])] >= levels[v]
                });
                let size = fin.count_ones() as u64;
                tally.sum += size;
                tally.sum_sq += size * size;
                for v in bits(fin) {
                    tally.per_node[v] += 1;
                }
            }
            tally
        })
        .reduce(|| Tally::new(n), Tally::merge);
    let t = trials as f64;
    let mean = tally.sum as f64 / t;
    let stderr = if trials > 1 {
        let var = (tally.sum_sq as f64 - t * mean * mean) / (t - 1.0);
        (var.max(0.0) / t).sqrt()
    } else {
        0.0
    };
    Ok(SpreadEstimate {
        mean,
        stderr,
        trials,
        per_node: tally.per_node.iter().map(|&c| c as f64 / t).collect(),
    })
}
