//! Random graphs and threshold functions with certified local AD-k.

use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{Family, GenConfig, GraphKind};
use crate::diffusion::{DirectedGraph, GtInstance};
use crate::error::{Error, Result};
use crate::rational::{ratio, Rational};
use crate::setfn::{is_adk, GroundSet, Order, SetFunction};
use crate::transforms::LayerAssignment;

/// Draws allowed per rejection-sampled function.
pub const REJECTION_BUDGET: usize = 10_000;

/// Largest integer weight drawn for a single subset.
const WEIGHT_RANGE: i64 = 12;

/// Generator of instance `index` of a campaign seeded with `rng_seed`.
pub fn instance_rng(rng_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    rng.set_stream(index);
    rng
}

/// `f(C) = 1 − Σ_{B ⊆ ground∖C} q(B) / Σ q` for integer weights `q`.
fn from_weights(ground: &GroundSet, q: &[i64]) -> Option<SetFunction> {
    let total: i64 = q.iter().sum();
    if total <= 0 {
        return None;
    }
    let n = ground.len();
    let mut below = q.to_vec();
    for i in 0..n {
        for m in 0..below.len() {
            if m >> i & 1 == 1 {
                below[m] += below[m ^ (1 << i)];
            }
        }
    }
    let full = ground.full_mask() as usize;
    Some(SetFunction::from_fn(ground.clone(), |c| {
        ratio(total - below[full & !(c as usize)], total)
    }))
}

/// Weighted coverage: each item has a weight and the set of elements covering it.
/// The `slack` weight belongs to an item nobody covers.
pub fn coverage_function(ground: &GroundSet, items: &[(u64, u32)], slack: u64) -> Result<SetFunction> {
    let total: u64 = items.iter().map(|i| i.0).sum::<u64>() + slack;
    if total == 0 {
        return Err(Error::InvalidArgument("coverage weights sum to 0".into()));
    }
    if items.iter().any(|&(_, c)| c & !ground.full_mask() != 0) {
        return Err(Error::InvalidArgument("cover set outside the ground set".into()));
    }
    Ok(SetFunction::from_fn(ground.clone(), |c| {
        let covered: u64 = items.iter().filter(|&&(_, s)| s & c != 0).map(|i| i.0).sum();
        Rational::new(covered.into(), total.into())
    }))
}

/// Random monotone function with value 0 at the empty set that passes AD-k.
///
/// With `strict` the rejection family also requires AD-(k+1) to fail whenever
/// `k` is below the ground size; the other families are AD-∞ and ignore it.
pub fn gen_adk_function<R: Rng + ?Sized>(
    ground: &GroundSet,
    k: Order,
    family: Family,
    strict: bool,
    rng: &mut R,
) -> Result<SetFunction> {
    let n = ground.len();
    if n == 0 {
        return Ok(SetFunction::zero(ground.clone()));
    }
    let size = 1usize << n;
    match family {
        Family::TriggeringDerived => loop {
            let q: Vec<i64> = (0..size).map(|_| rng.random_range(0..=WEIGHT_RANGE)).collect();
            if let Some(f) = from_weights(ground, &q) {
                return Ok(f);
            }
        },
        Family::Coverage => {
            let count = rng.random_range(1..=n + 1);
            let items: Vec<(u64, u32)> = (0..count)
                .map(|_| {
                    (
                        rng.random_range(1..=WEIGHT_RANGE as u64),
                        rng.random_range(1..=ground.full_mask()),
                    )
                })
                .collect();
            let slack = rng.random_range(0..=WEIGHT_RANGE as u64 / 2);
            coverage_function(ground, &items, slack)
        }
        Family::RejectionSampled => {
            let kk = k.resolve(n);
            let strict = strict && kk < n;
            // Weights on sets above order k may be negative, scaled by `lambda / 8`.
            let scales: &[i64] = if strict { &[1, 2, 4, 8] } else { &[0, 1, 2, 4, 8] };
            for _ in 0..REJECTION_BUDGET {
                let lambda = scales[rng.random_range(0..scales.len())];
                let q: Vec<i64> = (0..size)
                    .map(|b| {
                        if (b as u32).count_ones() as usize <= kk {
                            rng.random_range(0..=WEIGHT_RANGE)
                        } else {
                            rng.random_range(-(WEIGHT_RANGE * lambda / 8)..=WEIGHT_RANGE)
                        }
                    })
                    .collect();
                let Some(f) = from_weights(ground, &q) else {
                    continue;
                };
                if !f.is_threshold() || !is_adk(&f, k).holds {
                    continue;
                }
                if strict && is_adk(&f, Order::Finite(kk + 1)).holds {
                    continue;
                }
                return Ok(f);
            }
            Err(Error::RejectionBudget(REJECTION_BUDGET))
        }
    }
}

fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: &Rational) -> bool {
    let den = p.denom().to_u64().unwrap_or(u64::MAX);
    let num = p.numer().to_u64().unwrap_or(0);
    rng.random_range(0..den) < num
}

/// Random graph of the requested kind, with its layering when layered.
pub fn gen_graph<R: Rng + ?Sized>(
    cfg: &GenConfig,
    rng: &mut R,
) -> Result<(DirectedGraph, Option<LayerAssignment>)> {
    cfg.validate()?;
    let n = cfg.n;
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    let mut layering = None;
    match cfg.graph_kind {
        GraphKind::General => {
            for v in 0..n {
                for u in 0..n {
                    if u != v {
                        candidates.push((u, v));
                    }
                }
            }
        }
        GraphKind::Dag => {
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            for (i, &u) in order.iter().enumerate() {
                for &v in &order[i + 1..] {
                    candidates.push((u, v));
                }
            }
            candidates.sort_unstable_by_key(|&(u, v)| (v, u));
        }
        GraphKind::Layered => {
            let m = rng.random_range(2..=n.min(4));
            let mut layers: Vec<usize> = (1..=m).collect();
            layers.extend((m..n).map(|_| rng.random_range(1..=m)));
            layers.shuffle(rng);
            for v in 0..n {
                for u in 0..n {
                    if layers[u] == layers[v] + 1 {
                        candidates.push((u, v));
                    }
                }
            }
            layering = Some(LayerAssignment::new(layers, m)?);
        }
    }
    let mut per_target: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (u, v) in candidates {
        if bernoulli(rng, &cfg.edge_density) {
            per_target[v].push(u);
        }
    }
    let mut g = DirectedGraph::anonymous(n)?;
    for (v, ins) in per_target.iter_mut().enumerate() {
        while ins.len() > cfg.max_in_degree {
            let drop = rng.random_range(0..ins.len());
            ins.remove(drop);
        }
        for &u in ins.iter() {
            g.add_edge(u, v)?;
        }
    }
    Ok((g, layering))
}

/// Instance `index` of a campaign: graph plus certified AD-k thresholds.
pub fn gen_instance(cfg: &GenConfig, index: u64) -> Result<(GtInstance, Option<LayerAssignment>)> {
    let mut rng = instance_rng(cfg.rng_seed, index);
    let (g, layering) = gen_graph(cfg, &mut rng)?;
    let thresholds = (0..g.n())
        .map(|v| gen_adk_function(&g.in_ground(v)?, cfg.k, cfg.family, cfg.strict, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    Ok((GtInstance::new(g, thresholds)?, layering))
}
