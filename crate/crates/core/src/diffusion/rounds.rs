//! Exact spread by a memoised dynamic program over cascade rounds.
//!
//! A cascade history is a chain of active sets `C_0 ⊂ C_1 ⊂ …`. A node added
//! in the round from `C_{t-1}` to `C_t` has `θ_v ∈ (f_v(C_{t-2}), f_v(C_{t-1})]`
//! and a node never added has `θ_v > f_v(C_final)`, so each history has
//! probability equal to a product of interval lengths. The continuation
//! depends only on the last two active sets, which makes `(prev, cur)` a state.

use std::collections::HashMap;
use std::rc::Rc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Zero};

use super::cascade::check_seeds;
use super::enumerate::to_rational;
use super::{validate_gt, ExactSpread, GtInstance};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::{bits, SetFunction, MAX_GROUND};

/// Default cap on memoised `(prev, cur)` states.
pub const DEFAULT_STATE_BUDGET: u128 = 2_000_000;

/// Distribution of the final active set for one seed set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinalDistribution {
    pub seeds: u64,
    /// `(final set, probability)` in ascending mask order, zero entries omitted.
    pub outcomes: Vec<(u64, Rational)>,
}

impl FinalDistribution {
    pub fn spread(&self, n: usize) -> ExactSpread {
        let mut per_node = vec![Rational::zero(); n];
        for (set, p) in &self.outcomes {
            for v in bits(*set) {
                per_node[v] += p;
            }
        }
        ExactSpread::from_per_node(per_node)
    }
}

/// Exact spreads for every seed set, indexed by seed mask.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpreadTable {
    pub spreads: Vec<ExactSpread>,
}

impl SpreadTable {
    /// `σ` as a set function of the seed set.
    pub fn sigma(&self, ground: &crate::setfn::GroundSet) -> Result<SetFunction> {
        SetFunction::new(
            ground.clone(),
            self.spreads.iter().map(|e| e.sigma.clone()).collect(),
        )
    }

    /// `P_v` as a set function of the seed set.
    pub fn node(&self, ground: &crate::setfn::GroundSet, v: usize) -> Result<SetFunction> {
        SetFunction::new(
            ground.clone(),
            self.spreads.iter().map(|e| e.per_node[v].clone()).collect(),
        )
    }
}

type Outcomes = Rc<Vec<(u64, BigUint)>>;

struct Dp<'a> {
    inst: &'a GtInstance,
    scaled: Vec<Vec<BigUint>>,
    den: Vec<BigUint>,
    memo: HashMap<(u64, u64), Outcomes>,
    entered: u128,
    budget: u128,
}

impl<'a> Dp<'a> {
    fn new(inst: &'a GtInstance, budget: u128) -> Result<Self> {
        if let Some(v) = validate_gt(inst).first() {
            return Err(Error::InvalidInstance(format!(
                "invalid threshold at `{}`: {}",
                inst.graph().label(v.node),
                v.violation
            )));
        }
        let mut scaled = Vec::with_capacity(inst.n());
        let mut den = Vec::with_capacity(inst.n());
        for f in inst.thresholds() {
            let d = f.values().iter().fold(BigInt::one(), |a, x| a.lcm(x.denom()));
            scaled.push(
                f.values()
                    .iter()
                    .map(|x| (x.numer() * (&d / x.denom())).to_biguint().expect("nonnegative"))
                    .collect(),
            );
            den.push(d.to_biguint().expect("positive"));
        }
        Ok(Dp {
            inst,
            scaled,
            den,
            memo: HashMap::new(),
            entered: 0,
            budget,
        })
    }

    fn f(&self, v: usize, set: u64) -> &BigUint {
        &self.scaled[v][self.inst.graph().local(v, set) as usize]
    }

    /// Final-set weights from `(prev, cur)`, scaled by `Π_{v∉cur} D_v`.
    fn solve(&mut self, prev: u64, cur: u64) -> Result<Outcomes> {
        if let Some(hit) = self.memo.get(&(prev, cur)) {
            return Ok(hit.clone());
        }
        self.entered += 1;
        if self.entered > self.budget {
            return Err(Error::Budget {
                what: "round states",
                needed: self.entered,
                budget: self.budget,
            });
        }
        let n = self.inst.n();
        let outside: Vec<usize> = (0..n).filter(|&v| cur >> v & 1 == 0).collect();
        let mut acc: HashMap<u64, BigUint> = HashMap::new();
        let stop: BigUint = outside.iter().map(|&v| &self.den[v] - self.f(v, cur)).product();
        if !stop.is_zero() {
            acc.insert(cur, stop);
        }
        let eligible: Vec<(usize, BigUint)> = outside
            .iter()
            .filter_map(|&v| {
                let (now, before) = (self.f(v, cur), self.f(v, prev));
                (now > before).then(|| (v, now - before))
            })
            .collect();
        let k = eligible.len();
        let mut prods: Vec<BigUint> = vec![BigUint::one(); 1 << k];
        for sub in 1usize..1 << k {
            let low = sub.trailing_zeros() as usize;
            prods[sub] = &prods[sub & (sub - 1)] * &eligible[low].1;
            let added = bits(sub as u64).fold(0u64, |m, j| m | 1 << eligible[j].0);
            let child = self.solve(cur, cur | added)?;
            for (set, cw) in child.iter() {
                *acc.entry(*set).or_insert_with(BigUint::zero) += &prods[sub] * cw;
            }
        }
        let mut out: Vec<(u64, BigUint)> = acc.into_iter().collect();
        out.sort_by_key(|e| e.0);
        let out = Rc::new(out);
        self.memo.insert((prev, cur), out.clone());
        Ok(out)
    }

    fn distribution(&mut self, seeds: u64) -> Result<FinalDistribution> {
        let out = self.solve(0, seeds)?;
        let scale: BigUint = (0..self.inst.n())
            .filter(|&v| seeds >> v & 1 == 0)
            .map(|v| self.den[v].clone())
            .product();
        Ok(FinalDistribution {
            seeds,
            outcomes: out
                .iter()
                .map(|(s, w)| (*s, to_rational(w.clone(), &scale)))
                .collect(),
        })
    }
}

/// Distribution of the final active set from `seeds`.
pub fn final_set_distribution(inst: &GtInstance, seeds: u64, budget: u128) -> Result<FinalDistribution> {
    check_seeds(inst.n(), seeds)?;
    Dp::new(inst, budget)?.distribution(seeds)
}

/// Exact spreads for the given seed sets, sharing one memo table.
pub fn round_spreads(inst: &GtInstance, seed_sets: &[u64], budget: u128) -> Result<Vec<ExactSpread>> {
    for &s in seed_sets {
        check_seeds(inst.n(), s)?;
    }
    let mut dp = Dp::new(inst, budget)?;
    seed_sets
        .iter()
        .map(|&s| dp.distribution(s).map(|d| d.spread(inst.n())))
        .collect()
}

/// Exact spreads for all `2^n` seed sets, sharing one memo table.
pub fn spread_table(inst: &GtInstance, budget: u128) -> Result<SpreadTable> {
    let n = inst.n();
    if n > MAX_GROUND {
        return Err(Error::GroundTooLarge(n));
    }
    let mut dp = Dp::new(inst, budget)?;
    let spreads = (0..1u64 << n)
        .map(|s| dp.distribution(s).map(|d| d.spread(n)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpreadTable { spreads })
}
