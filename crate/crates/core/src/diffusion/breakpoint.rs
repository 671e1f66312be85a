//! Exact spread by enumerating threshold breakpoint intervals.
//!
//! Every `θ_v` in `(b_{i-1}, b_i]` between consecutive distinct table values
//! produces the same cascade, so the uniform threshold integrates out into a
//! finite weighted sum over interval choices.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::cascade::{check_seeds, closure, gather};
use super::enumerate::{enumerate, to_rational, Digits, Weight};
use super::{validate_gt, ExactSpread, GtInstance};
use crate::error::{Error, Result};
use crate::rational::Rational;
use crate::setfn::bits;

/// Default cap on the number of enumerated combinations.
pub const DEFAULT_BUDGET: u128 = 10_000_000;

/// Sorted breakpoints of one node: distinct table values together with 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BreakpointAssignment {
    pub breakpoints: Vec<Rational>,
    /// `rank[c]` is the index of `f_v(c)` in `breakpoints`.
    pub rank: Vec<usize>,
}

impl BreakpointAssignment {
    pub fn new(values: &[Rational]) -> Self {
        let mut breakpoints: Vec<Rational> = values.to_vec();
        breakpoints.push(Rational::one());
        breakpoints.sort();
        breakpoints.dedup();
        let rank = values
            .iter()
            .map(|x| breakpoints.binary_search(x).expect("value is a breakpoint"))
            .collect();
        BreakpointAssignment { breakpoints, rank }
    }

    pub fn intervals(&self) -> usize {
        self.breakpoints.len() - 1
    }

    /// Length of interval `i`, i.e. `(b_i, b_{i+1}]`.
    pub fn weight(&self, i: usize) -> Rational {
        &self.breakpoints[i + 1] - &self.breakpoints[i]
    }

    /// A threshold in interval `i` is met by `f_v(c)` iff `rank[c] > i`.
    pub fn fires(&self, local: usize, interval: usize) -> bool {
        self.rank[local] > interval
    }
}

struct Prepared {
    assignments: Vec<BreakpointAssignment>,
    ins: Vec<Vec<usize>>,
    digits: Digits,
    total: u64,
}

fn prepare(inst: &GtInstance, budget: u128) -> Result<Prepared> {
    if let Some(v) = validate_gt(inst).first() {
        return Err(Error::InvalidInstance(format!(
            "invalid threshold at `{}`: {}",
            inst.graph().label(v.node),
            v.violation
        )));
    }
    let n = inst.n();
    let assignments: Vec<BreakpointAssignment> = inst
        .thresholds()
        .iter()
        .map(|f| BreakpointAssignment::new(f.values()))
        .collect();
    let probs: Vec<Vec<Rational>> = assignments
        .iter()
        .map(|a| (0..a.intervals()).map(|i| a.weight(i)).collect())
        .collect();
    let digits = Digits::from_rationals(&probs);
    let total = digits.check_budget("breakpoint enumeration", budget)?;
    let ins = (0..n).map(|v| inst.graph().in_neighbours(v)).collect();
    Ok(Prepared {
        assignments,
        ins,
        digits,
        total,
    })
}

/// Exact `σ(S)` and every `P_v(S)`.
pub fn exact_spread(inst: &GtInstance, seeds: u64, budget: u128) -> Result<ExactSpread> {
    Ok(exact_spread_many(inst, &[seeds], budget)?.remove(0))
}

/// Exact spreads for several seed sets sharing one enumeration.
pub fn exact_spread_many(inst: &GtInstance, seed_sets: &[u64], budget: u128) -> Result<Vec<ExactSpread>> {
    for &s in seed_sets {
        check_seeds(inst.n(), s)?;
    }
    let prep = prepare(inst, budget)?;
    let finals = if prep.digits.fits_u128() {
        final_sets::<u128>(&prep, seed_sets)
    } else {
        final_sets::<BigUint>(&prep, seed_sets)
    };
    let den = prep.digits.total_denominator();
    Ok(finals
        .into_iter()
        .map(|dist| {
            let mut per_node = vec![BigUint::zero(); inst.n()];
            for (set, w) in dist {
                for v in bits(set) {
                    per_node[v] += &w;
                }
            }
            ExactSpread::from_per_node(per_node.into_iter().map(|w| to_rational(w, &den)).collect())
        })
        .collect())
}

/// Per seed set, integer weight of each final active set.
fn final_sets<W: Weight>(prep: &Prepared, seed_sets: &[u64]) -> Vec<Vec<(u64, BigUint)>> {
    let n = prep.ins.len();
    let maps = enumerate::<W, Vec<HashMap<u64, W>>>(
        &prep.digits,
        prep.total,
        || vec![HashMap::new(); seed_sets.len()],
        |acc, idx, w| {
            for (map, &s) in acc.iter_mut().zip(seed_sets) {
                let fin = closure(n, s, |v, active| {
                    prep.assignments[v].fires(gather(active, &prep.ins[v]), idx[v])
                });
                *map.entry(fin).or_insert_with(W::zero) += w.clone();
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

#[cfg(test)]
mod tests {
    use super::super::testutil::*;
    use super::super::DirectedGraph;
    use super::*;
    use crate::rational::{int, ratio};
    use crate::setfn::SetFunction;

    #[test]
    fn breakpoints_and_ranks() {
        let a = BreakpointAssignment::new(&[int(0), ratio(1, 2), ratio(1, 2), int(1)]);
        assert_eq!(a.breakpoints, vec![int(0), ratio(1, 2), int(1)]);
        assert_eq!(a.rank, vec![0, 1, 1, 2]);
        assert_eq!(a.intervals(), 2);
        assert!(a.fires(1, 0) && !a.fires(1, 1) && a.fires(3, 1));
    }

    #[test]
    fn spec_examples() {
        let g = DirectedGraph::anonymous(1).unwrap();
        let iso = GtInstance::new(g.clone(), vec![SetFunction::zero(g.in_ground(0).unwrap())]).unwrap();
        assert_eq!(exact_spread(&iso, 1, DEFAULT_BUDGET).unwrap().sigma, int(1));

        let p = ratio(3, 7);
        let e = exact_spread(&edge(p.clone()), 0b01, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.sigma, int(1) + &p);
        assert_eq!(e.per_node, vec![int(1), p]);

        let mixed = mixed_cycle();
        let e = exact_spread(&mixed, 0, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.sigma, int(0));
    }

    #[test]
    fn chain_of_probabilities() {
        // u -> v -> w with f = p, q: P_w = pq.
        let g = DirectedGraph::anonymous(3)
            .unwrap()
            .with_edges(&[(0, 1), (1, 2)])
            .unwrap();
        let th = vec![
            SetFunction::zero(g.in_ground(0).unwrap()),
            SetFunction::new(g.in_ground(1).unwrap(), vec![int(0), ratio(1, 3)]).unwrap(),
            SetFunction::new(g.in_ground(2).unwrap(), vec![int(0), ratio(3, 5)]).unwrap(),
        ];
        let inst = GtInstance::new(g, th).unwrap();
        let e = exact_spread(&inst, 1, DEFAULT_BUDGET).unwrap();
        assert_eq!(e.per_node, vec![int(1), ratio(1, 3), ratio(1, 5)]);
    }

    #[test]
    fn budget_refused() {
        let inst = mixed_cycle();
        match exact_spread(&inst, 1, 3) {
            Err(Error::Budget { needed, .. }) => assert_eq!(needed, 2 * 4 * 4 * 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn invalid_instance_refused() {
        let g = DirectedGraph::anonymous(2)
            .unwrap()
            .with_edges(&[(0, 1)])
            .unwrap();
        let inst = GtInstance::new(
            g.clone(),
            vec![
                SetFunction::zero(g.in_ground(0).unwrap()),
                SetFunction::new(g.in_ground(1).unwrap(), vec![ratio(1, 2), int(1)]).unwrap(),
            ],
        )
        .unwrap();
        assert!(matches!(
            exact_spread(&inst, 1, DEFAULT_BUDGET),
            Err(Error::InvalidInstance(_))
        ));
    }
}
