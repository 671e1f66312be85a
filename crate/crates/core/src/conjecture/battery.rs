//! The theorem regression battery: ten exact checks over random instances.
//!
//! Every check draws from its own seeded generator and runs instances in
//! parallel with ordered collection, so outcomes depend only on the
//! [`BatteryConfig`].

use std::fmt;
use std::time::{Duration, Instant};

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::generate::{gen_adk_function, gen_graph, gen_instance, instance_rng};
use super::{
    global_adk_check, replay_instance, run_campaign, verify_identities, Family, GenConfig, GraphKind, Verdict,
};
use crate::diffusion::{
    exact_spread_many, layered_activation, live_edge_spread_table, monte_carlo_spread, GtInstance,
    DEFAULT_BUDGET, DEFAULT_STATE_BUDGET,
};
use crate::error::{Error, Result};
use crate::rational::{self, ratio, Rational};
use crate::setfn::{
    compound, compound_eval_continuous, difference, has_alternating_sign, is_adk, mobius, multilinear_eval,
    multilinear_partial, partition_derivative, submasks, GroundSet, Order, PointVector, SetFunction,
};
use crate::transforms::{
    dag_to_layered, gt_to_triggering, lift_layered, triggering_to_gt, verify_transform, SpreadOracle,
};

/// Finite-difference step.
const FD_STEP: (i64, i64) = (1, 1024);
/// Finite-difference tolerance.
const FD_TOLERANCE: f64 = 1e-6;

/// Sample sizes and the master seed of a battery run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatteryConfig {
    pub seed: u64,
    pub difference_functions: usize,
    pub extension_functions: usize,
    pub extension_points: usize,
    pub compound_tuples: usize,
    pub derivative_tuples: usize,
    pub layered_instances: usize,
    pub equivalence_instances: usize,
    pub non_ad_infinity_instances: usize,
    pub transform_instances: usize,
    pub campaign_instances: u64,
    pub identity_instances: usize,
    pub mc_instances: usize,
    pub mc_trials: u64,
    pub search_instances: u64,
}

impl BatteryConfig {
    /// The full sample sizes.
    pub fn full() -> Self {
        BatteryConfig {
            seed: 20_240_601,
            difference_functions: 1000,
            extension_functions: 200,
            extension_points: 20,
            compound_tuples: 500,
            derivative_tuples: 100,
            layered_instances: 100,
            equivalence_instances: 100,
            non_ad_infinity_instances: 50,
            transform_instances: 100,
            campaign_instances: 50,
            identity_instances: 50,
            mc_instances: 100,
            mc_trials: 100_000,
            search_instances: 20,
        }
    }

    /// Roughly a tenth of the full sizes.
    pub fn quick() -> Self {
        BatteryConfig {
            difference_functions: 100,
            extension_functions: 20,
            extension_points: 5,
            compound_tuples: 50,
            derivative_tuples: 10,
            layered_instances: 10,
            equivalence_instances: 10,
            non_ad_infinity_instances: 5,
            transform_instances: 10,
            campaign_instances: 5,
            identity_instances: 5,
            mc_instances: 20,
            mc_trials: 20_000,
            search_instances: 3,
            ..Self::full()
        }
    }
}

/// Result of one criterion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionOutcome {
    /// Omits the elapsed time so reports are reproducible.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion={} name={} status={} {}",
            self.id,
            self.name,
            if self.passed { "pass" } else { "fail" },
            self.detail
        )
    }
}

/// Identifiers and names of the criteria, in order.
pub const CRITERIA: [(u8, &str); 10] = [
    (1, "difference-calculus"),
    (2, "extension-bridge"),
    (3, "compound-preservation"),
    (4, "layered-recursion"),
    (5, "model-equivalence"),
    (6, "transforms"),
    (7, "theorem-regressions"),
    (8, "identity-suite"),
    (9, "monte-carlo"),
    (10, "open-search"),
];

/// Runs criterion `id` (1 to 10).
pub fn run_criterion(id: u8, cfg: &BatteryConfig) -> Result<CriterionOutcome> {
    let name = CRITERIA
        .iter()
        .find(|c| c.0 == id)
        .map(|c| c.1)
        .ok_or_else(|| Error::InvalidArgument(format!("criterion {id} outside 1..=10")))?;
    let start = Instant::now();
    let result = match id {
        1 => difference_calculus(cfg),
        2 => extension_bridge(cfg),
        3 => compound_preservation(cfg),
        4 => layered_recursion(cfg),
        5 => model_equivalence(cfg),
        6 => transforms(cfg),
        7 => theorem_regressions(cfg),
        8 => identity_suite(cfg),
        9 => monte_carlo(cfg),
        _ => open_search(cfg),
    };
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match result {
        Ok(x) => x,
        Err(e) => (false, format!("error=\"{e}\"")),
    };
    let limit = match id {
        1 => Some(Duration::from_secs(10)),
        7 => Some(Duration::from_secs(600)),
        _ => None,
    };
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            detail.push_str(&format!(" over-time-limit={}s", limit.as_secs()));
        }
    }
    Ok(CriterionOutcome {
        id,
        name,
        passed,
        detail,
        elapsed,
    })
}

/// Runs all ten criteria in order.
pub fn run_battery(cfg: &BatteryConfig) -> Vec<CriterionOutcome> {
    CRITERIA
        .iter()
        .map(|&(id, _)| run_criterion(id, cfg).expect("known criterion"))
        .collect()
}

type Check = Result<(bool, String)>;

/// Generator for item `index` of criterion `id`.
fn rng_for(cfg: &BatteryConfig, id: u8, index: usize) -> ChaCha8Rng {
    instance_rng(cfg.seed.wrapping_add(id as u64), index as u64)
}

fn seed_for(cfg: &BatteryConfig, id: u8) -> u64 {
    cfg.seed.wrapping_mul(31).wrapping_add(id as u64)
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R, lo: i64, hi: i64, max_den: i64) -> Rational {
    let den = rng.random_range(1..=max_den);
    ratio(rng.random_range(lo * den..=hi * den), den)
}

/// Point with coordinates in `[1/16, 15/16]`, so finite-difference stencils stay inside the cube.
fn interior_point<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Result<PointVector> {
    PointVector::new((0..n).map(|_| ratio(rng.random_range(64..=960), 1024)).collect())
}

fn random_order<R: Rng + ?Sized>(rng: &mut R) -> Order {
    match rng.random_range(0..4usize) {
        3 => Order::Infinity,
        k => Order::Finite(k + 1),
    }
}

/// Iterated single-element differences taken in the given order.
fn iterated(f: &SetFunction, order: &[usize], s: u32) -> Rational {
    match order.split_first() {
        None => f.value(s).clone(),
        Some((&i, rest)) => iterated(f, rest, s | 1 << i) - iterated(f, rest, s),
    }
}

/// Aggregates per-item `(comparisons made, failure)` results.
fn all_pass(results: Vec<(u64, Option<String>)>, total_label: &str) -> (bool, String) {
    let total = results.len();
    let comparisons: u64 = results.iter().map(|r| r.0).sum();
    let failures: Vec<String> = results.into_iter().filter_map(|r| r.1).collect();
    let mut detail = format!(
        "{total_label}={total} comparisons={comparisons} failures={}",
        failures.len()
    );
    if let Some(first) = failures.first() {
        detail.push_str(&format!(" first-failure=\"{first}\""));
    }
    (failures.is_empty(), detail)
}

fn difference_calculus(cfg: &BatteryConfig) -> Check {
    let results = (0..cfg.difference_functions)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg, 1, i);
            let n = rng.random_range(0..=6usize);
            let ground = GroundSet::anonymous(n)?;
            let f = SetFunction::from_fn(ground.clone(), |_| random_rational(&mut rng, -2, 2, 8));
            let full = ground.full_mask();
            let g = mobius(&f);
            let mut checks = 0u64;
            for s in 0..=full {
                checks += 1;
                if *g.value(s) != difference(&f, s, 0) {
                    return Ok((
                        checks,
                        Some(format!("function {i}: mobius differs from difference at {s:#b}")),
                    ));
                }
                for a in submasks(full as u64).skip(1) {
                    let a = a as u32;
                    let d = difference(&f, a, s);
                    checks += 1;
                    if a & s != 0 {
                        if !d.is_zero() {
                            return Ok((
                                checks,
                                Some(format!("function {i}: nonzero overlapping difference")),
                            ));
                        }
                        continue;
                    }
                    let mut order: Vec<usize> = (0..n).filter(|j| a >> j & 1 == 1).collect();
                    order.shuffle(&mut rng);
                    if iterated(&f, &order, s) != d {
                        return Ok((
                            checks,
                            Some(format!("function {i}: order {order:?} disagrees at s={s:#b}")),
                        ));
                    }
                }
            }
            Ok((checks, None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(all_pass(results, "functions"))
}

/// Central mixed difference over the coordinates in `dirs`, evaluated exactly.
fn finite_difference(
    eval: impl Fn(&PointVector) -> Result<Rational>,
    x: &PointVector,
    dirs: &[usize],
    h: &Rational,
) -> Result<Rational> {
    let mut total = Rational::zero();
    for b in 0u32..1 << dirs.len() {
        let mut coords = x.coords().to_vec();
        for (j, &c) in dirs.iter().enumerate() {
            if b >> j & 1 == 1 {
                coords[c] += h;
            } else {
                coords[c] -= h;
            }
        }
        let v = eval(&PointVector::new(coords)?)?;
        if (dirs.len() as u32 - b.count_ones()).is_multiple_of(2) {
            total += v;
        } else {
            total -= v;
        }
    }
    let scale = (h * Rational::from_integer(2.into())).pow(dirs.len() as i32);
    Ok(total / scale)
}

fn fd_step() -> Rational {
    ratio(FD_STEP.0, FD_STEP.1)
}

fn extension_bridge(cfg: &BatteryConfig) -> Check {
    let h = fd_step();
    let results = (0..cfg.extension_functions)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg, 2, i);
            let n = rng.random_range(1..=5usize);
            let k = [
                Order::Finite(1),
                Order::Finite(2),
                Order::Finite(3),
                Order::Infinity,
            ][i % 4];
            let family = if k == Order::Infinity {
                Family::TriggeringDerived
            } else {
                Family::RejectionSampled
            };
            let ground = GroundSet::anonymous(n)?;
            let f = gen_adk_function(&ground, k, family, false, &mut rng)?;
            let kk = k.resolve(n);
            let full = ground.full_mask();
            let orders: Vec<u32> = submasks(full as u64)
                .skip(1)
                .map(|a| a as u32)
                .filter(|a| a.count_ones() as usize <= kk)
                .collect();
            let mut checks = 0u64;
            for a in &orders {
                // Vertex values are the set differences.
                for t in submasks((full & !a) as u64) {
                    checks += 1;
                    let v = multilinear_partial(&f, *a, &PointVector::vertex(n, t as u32))?;
                    if v != difference(&f, *a, t as u32) {
                        return Ok((checks, Some(format!("function {i}: vertex partial differs"))));
                    }
                }
            }
            for _ in 0..cfg.extension_points {
                let x = interior_point(&mut rng, n)?;
                for &a in &orders {
                    let d = multilinear_partial(&f, a, &x)?;
                    checks += 1;
                    if !has_alternating_sign(a.count_ones() as usize, &d) {
                        return Ok((
                            checks,
                            Some(format!("function {i}: partial {a:#b} has the wrong sign")),
                        ));
                    }
                    let dirs: Vec<usize> = (0..n).filter(|j| a >> j & 1 == 1).collect();
                    let fd = finite_difference(|p| multilinear_eval(&f, p), &x, &dirs, &h)?;
                    let err = (rational::to_f64(&d) - rational::to_f64(&fd)).abs();
                    if err > FD_TOLERANCE {
                        return Ok((
                            checks,
                            Some(format!("function {i}: finite difference off by {err:e}")),
                        ));
                    }
                }
            }
            Ok((checks, None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(all_pass(results, "functions"))
}

fn compound_preservation(cfg: &BatteryConfig) -> Check {
    let tuple = |rng: &mut ChaCha8Rng, k: Order| -> Result<(SetFunction, Vec<SetFunction>)> {
        let outer = GroundSet::anonymous(rng.random_range(1..=4usize))?;
        let inner = GroundSet::anonymous(rng.random_range(1..=4usize))?;
        let f = gen_adk_function(&outer, k, Family::RejectionSampled, false, rng)?;
        let gs = (0..outer.len())
            .map(|_| gen_adk_function(&inner, k, Family::RejectionSampled, false, rng))
            .collect::<Result<Vec<_>>>()?;
        Ok((f, gs))
    };
    let preserved = (0..cfg.compound_tuples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg, 3, i);
            let k = Order::Finite(1 + i % 4);
            let (f, gs) = tuple(&mut rng, k)?;
            let h = compound(&f, &gs)?;
            let r = is_adk(&h, k);
            let checks = h.values().len() as u64;
            Ok((
                checks,
                (!r.holds).then(|| format!("tuple {i}: compound fails AD-{k} at {:?}", r.witness)),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let (ok_compound, detail_compound) = all_pass(preserved, "tuples");

    let step = fd_step();
    let errors = (0..cfg.derivative_tuples)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng_for(cfg, 3, cfg.compound_tuples + i);
            let k = Order::Finite(1 + i % 4);
            let (f, gs) = tuple(&mut rng, k)?;
            let u = gs[0].n();
            let mut coords: Vec<usize> = (0..u).collect();
            coords.shuffle(&mut rng);
            coords.truncate(rng.random_range(1..=u.min(3)));
            let x = interior_point(&mut rng, u)?;
            let exact = partition_derivative(&f, &gs, &coords, &x)?;
            let fd = finite_difference(|p| compound_eval_continuous(&f, &gs, p), &x, &coords, &step)?;
            Ok((rational::to_f64(&exact) - rational::to_f64(&fd)).abs())
        })
        .collect::<Result<Vec<f64>>>()?;
    let worst = errors.iter().cloned().fold(0.0, f64::max);
    let over = errors.iter().filter(|&&e| e > FD_TOLERANCE).count();
    Ok((
        ok_compound && over == 0,
        format!(
            "{detail_compound} derivative-tuples={} max-fd-error={worst:e} over-tolerance={over}",
            errors.len()
        ),
    ))
}

fn layered_recursion(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 4);
    let results = (0..cfg.layered_instances)
        .into_par_iter()
        .map(|i| {
            let n = 2 + i % 7;
            let k = [
                Order::Finite(1),
                Order::Finite(2),
                Order::Finite(3),
                Order::Infinity,
            ][i % 4];
            let gen = GenConfig::new(GraphKind::Layered, n, k, seed);
            let (inst, layers) = gen_instance(&gen, i as u64)?;
            let layers = layers.expect("layered generator returns its layering");
            let bottom = layers.nodes_in(layers.m());
            let seeds: Vec<u64> = submasks(bottom).collect();
            let exact = exact_spread_many(&inst, &seeds, DEFAULT_BUDGET)?;
            let mut checks = 0u64;
            for (s, e) in seeds.iter().zip(&exact) {
                for v in 0..n {
                    checks += 1;
                    if layered_activation(&inst, &layers, *s, v)? != e.per_node[v] {
                        return Ok((checks, Some(format!("instance {i}: node {v} seeds {s:#b}"))));
                    }
                }
            }
            Ok((checks, None))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(all_pass(results, "instances"))
}

/// `q(B) = Σ_{C⊆B} (−1)^{|B|−|C|} (1 − f(IN∖C))`.
fn coefficient(f: &SetFunction, b: u32) -> Rational {
    let full = f.ground().full_mask();
    submasks(b as u64).fold(Rational::zero(), |acc, c| {
        let c = c as u32;
        let term = Rational::one() - f.value(full & !c);
        if (b.count_ones() - c.count_ones()).is_multiple_of(2) {
            acc + term
        } else {
            acc - term
        }
    })
}

/// A general instance with at least one threshold that is AD-k but not AD-(k+1).
fn non_ad_infinity_instance(cfg: &BatteryConfig, index: usize) -> Result<GtInstance> {
    let mut rng = rng_for(cfg, 5, 10_000 + index);
    let n = rng.random_range(3..=6usize);
    let gen = GenConfig::new(GraphKind::General, n, Order::Infinity, 0);
    let (mut g, _) = gen_graph(&gen, &mut rng)?;
    let target = rng.random_range(0..n);
    let others: Vec<usize> = (0..n).filter(|&u| u != target).collect();
    for &u in others.iter().take(2) {
        if g.in_degree(target) < 2 && !g.has_edge(u, target) {
            g.add_edge(u, target)?;
        }
    }
    let thresholds = (0..n)
        .map(|v| {
            let ground = g.in_ground(v)?;
            if v == target {
                let k = rng.random_range(1..ground.len());
                gen_adk_function(
                    &ground,
                    Order::Finite(k),
                    Family::RejectionSampled,
                    true,
                    &mut rng,
                )
            } else {
                gen_adk_function(
                    &ground,
                    Order::Infinity,
                    Family::TriggeringDerived,
                    false,
                    &mut rng,
                )
            }
        })
        .collect::<Result<Vec<_>>>()?;
    GtInstance::new(g, thresholds)
}

fn model_equivalence(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 5);
    let positive = (0..cfg.equivalence_instances)
        .into_par_iter()
        .map(|i| {
            let n = 1 + i % 6;
            let mut gen = GenConfig::new(GraphKind::General, n, Order::Infinity, seed);
            if i % 3 == 2 {
                gen.family = Family::Coverage;
            }
            let (inst, _) = gen_instance(&gen, i as u64)?;
            let mut checks = 2u64;
            let tr = gt_to_triggering(&inst)?;
            if triggering_to_gt(&tr) != inst {
                return Ok((
                    checks,
                    Some(format!("instance {i}: threshold round trip differs")),
                ));
            }
            if gt_to_triggering(&triggering_to_gt(&tr))? != tr {
                return Ok((
                    checks,
                    Some(format!("instance {i}: distribution round trip differs")),
                ));
            }
            let seeds: Vec<u64> = (0..1u64 << n).collect();
            let gt = exact_spread_many(&inst, &seeds, DEFAULT_BUDGET)?;
            let le = live_edge_spread_table(&tr, DEFAULT_BUDGET)?;
            checks += seeds.len() as u64;
            if gt != le.spreads {
                return Ok((checks, Some(format!("instance {i}: live-edge spreads differ"))));
            }
            Ok((checks, None))
        })
        .collect::<Result<Vec<_>>>()?;
    let negative = (0..cfg.non_ad_infinity_instances)
        .into_par_iter()
        .map(|i| {
            let inst = non_ad_infinity_instance(cfg, i)?;
            let checks = 1u64;
            let Err(Error::NotAdInfinity {
                node,
                subset,
                coefficient: c,
            }) = gt_to_triggering(&inst)
            else {
                return Ok((
                    checks,
                    Some(format!("negative instance {i}: conversion did not refuse")),
                ));
            };
            let first_bad = (0..inst.n()).find(|&v| !is_adk(inst.threshold(v), Order::Infinity).holds);
            if first_bad != Some(node) {
                return Ok((
                    checks,
                    Some(format!(
                        "negative instance {i}: witness node {node}, expected {first_bad:?}"
                    )),
                ));
            }
            let f = inst.threshold(node);
            let first_negative = (0..=f.ground().full_mask()).find(|&b| coefficient(f, b).is_negative());
            if first_negative != Some(subset) || coefficient(f, subset) != c || !c.is_negative() {
                return Ok((
                    checks,
                    Some(format!("negative instance {i}: witness coefficient mismatch")),
                ));
            }
            Ok((checks, None))
        })
        .collect::<Result<Vec<_>>>()?;
    let (ok_pos, detail_pos) = all_pass(positive, "instances");
    let (ok_neg, detail_neg) = all_pass(negative, "non-ad-infinity-instances");
    Ok((ok_pos && ok_neg, format!("{detail_pos} {detail_neg}")))
}

fn transforms(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 6);
    let orders = [
        Order::Finite(1),
        Order::Finite(2),
        Order::Finite(3),
        Order::Infinity,
    ];
    let check = |kind: GraphKind, i: usize| -> Result<(u64, Option<String>)> {
        let n = 2 + i % 5;
        let k = orders[i % 4];
        let gen = GenConfig::new(kind, n, k, seed.wrapping_add(kind as u64));
        let (inst, layers) = gen_instance(&gen, i as u64)?;
        let (image, image_layers, map) = match kind {
            GraphKind::Layered => {
                lift_layered(&inst, &layers.expect("layered generator returns its layering"))?
            }
            _ => dag_to_layered(&inst)?,
        };
        let mut checks = 1u64;
        if let Err(e) = image_layers.check(image.graph()) {
            return Ok((
                checks,
                Some(format!("{kind} instance {i}: invalid layering: {e}")),
            ));
        }
        let seeds: Vec<u64> = (0..1u64 << n).collect();
        let r = verify_transform(
            &inst,
            &image,
            &map,
            &seeds,
            k,
            SpreadOracle::Rounds,
            DEFAULT_STATE_BUDGET,
        )?;
        checks += (r.comparisons.len() + r.local.len()) as u64;
        if !r.locally_adk() {
            return Ok((
                checks,
                Some(format!("{kind} instance {i}: image threshold fails AD-{k}")),
            ));
        }
        if !r.spreads_agree() {
            return Ok((
                checks,
                Some(format!("{kind} instance {i}: spread identity fails")),
            ));
        }
        Ok((checks, None))
    };
    let lift = (0..cfg.transform_instances)
        .into_par_iter()
        .map(|i| check(GraphKind::Layered, i))
        .collect::<Result<Vec<_>>>()?;
    let dag = (0..cfg.transform_instances)
        .into_par_iter()
        .map(|i| check(GraphKind::Dag, i))
        .collect::<Result<Vec<_>>>()?;
    let (ok_lift, detail_lift) = all_pass(lift, "lift-instances");
    let (ok_dag, detail_dag) = all_pass(dag, "dag-instances");
    Ok((ok_lift && ok_dag, format!("{detail_lift} {detail_dag}")))
}

fn theorem_regressions(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 7);
    let mut grid: Vec<GenConfig> = Vec::new();
    for kind in [GraphKind::Layered, GraphKind::Dag] {
        for k in 1..=4 {
            grid.push(GenConfig::new(kind, 6, Order::Finite(k), seed));
        }
    }
    grid.push(GenConfig::new(GraphKind::General, 6, Order::Infinity, seed));
    let mut pairwise = GenConfig::new(GraphKind::General, 6, Order::Finite(2), seed);
    pairwise.strict = true;
    grid.push(pairwise);

    let mut failures = Vec::new();
    let mut checked = 0;
    for gen in &grid {
        let report = run_campaign(gen, cfg.campaign_instances, DEFAULT_STATE_BUDGET)?;
        checked += report.instances_checked();
        let skipped = report.records.len() - report.instances_checked();
        if report.verdict() != Verdict::AllPass || skipped > 0 {
            failures.push(format!(
                "graph={} k={} verdict={} skipped={skipped}",
                gen.graph_kind,
                gen.k,
                report.verdict()
            ));
        }
    }
    let mut detail = format!(
        "campaigns={} instances={checked} failures={}",
        grid.len(),
        failures.len()
    );
    if let Some(first) = failures.first() {
        detail.push_str(&format!(" first-failure=\"{first}\""));
    }
    Ok((failures.is_empty(), detail))
}

fn identity_suite(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 8);
    let results = (0..cfg.identity_instances)
        .into_par_iter()
        .map(|i| {
            let n = 1 + i % 5;
            let mut gen = GenConfig::new(GraphKind::General, n, Order::Infinity, seed);
            if i % 2 == 1 {
                gen.family = Family::Coverage;
            }
            let (inst, _) = gen_instance(&gen, i as u64)?;
            let r = verify_identities(&inst, DEFAULT_BUDGET)?;
            let checks = 4 * r.nodes.len() as u64;
            Ok((
                checks,
                (!r.holds()).then(|| format!("instance {i}: {}", r.to_string().trim_end())),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(all_pass(results, "instances"))
}

fn monte_carlo(cfg: &BatteryConfig) -> Check {
    let seed = seed_for(cfg, 9);
    let results = (0..cfg.mc_instances)
        .into_par_iter()
        .map(|i| {
            let n = 1 + i % 6;
            let k = random_order(&mut rng_for(cfg, 9, i));
            let gen = GenConfig::new(GraphKind::General, n, k, seed);
            let (inst, _) = gen_instance(&gen, i as u64)?;
            let seeds = rng_for(cfg, 9, i + cfg.mc_instances).random_range(0..1u64 << n);
            let exact = rational::to_f64(&exact_spread_many(&inst, &[seeds], DEFAULT_BUDGET)?[0].sigma);
            let est = monte_carlo_spread(&inst, seeds, cfg.mc_trials, seed ^ i as u64)?;
            let rerun = monte_carlo_spread(&inst, seeds, cfg.mc_trials, seed ^ i as u64)?;
            let identical = est.mean.to_bits() == rerun.mean.to_bits()
                && est.stderr.to_bits() == rerun.stderr.to_bits()
                && est
                    .per_node
                    .iter()
                    .zip(&rerun.per_node)
                    .all(|(a, b)| a.to_bits() == b.to_bits());
            let within = (est.mean - exact).abs() <= 4.0 * est.stderr;
            Ok((within, identical))
        })
        .collect::<Result<Vec<_>>>()?;
    let within = results.iter().filter(|r| r.0).count();
    let identical = results.iter().all(|r| r.1);
    let needed = (results.len() * 95).div_ceil(100);
    Ok((
        within >= needed && identical,
        format!(
            "instances={} within-4-stderr={within} required={needed} reruns-identical={identical}",
            results.len()
        ),
    ))
}

fn open_search(cfg: &BatteryConfig) -> Check {
    let gen = GenConfig::new(GraphKind::General, 6, Order::Finite(3), seed_for(cfg, 10));
    let report = run_campaign(&gen, cfg.search_instances, DEFAULT_STATE_BUDGET)?;
    let replay = run_campaign(&gen, cfg.search_instances, DEFAULT_STATE_BUDGET)?;
    let reproducible = report.to_string() == replay.to_string();
    let mut counterexample_replays = true;
    if let Some(c) = &report.counterexample {
        let inst = replay_instance(&gen, c.index)?;
        let again = global_adk_check(&inst, gen.k, DEFAULT_STATE_BUDGET)?;
        counterexample_replays = inst == c.instance
            && again.first_violation().map(|(t, w)| (t, w.clone())) == Some((c.target, c.witness.clone()))
            && !has_alternating_sign(c.witness.a.count_ones() as usize, &c.witness.value);
    }
    Ok((
        reproducible && counterexample_replays,
        format!(
            "instances={} checked={} verdict={} reproducible={reproducible} counterexample-replays={counterexample_replays}",
            report.records.len(),
            report.instances_checked(),
            report.verdict()
        ),
    ))
}
