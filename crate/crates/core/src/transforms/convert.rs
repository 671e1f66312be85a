//! Conversion between triggering distributions and threshold functions.
//!
//! `f_v(C) = 1 − Pr[T_v ⊆ IN(v)∖C]`, and conversely `q_v` is the Möbius
//! transform of `h(B) = 1 − f_v(IN(v)∖B)`.

use num_traits::Signed;

use crate::diffusion::{validate_gt, GtInstance, TriggeringInstance};
use crate::error::{Error, Result};
use crate::setfn::{mobius, mobius_inverse, one_minus, SetFunction};

/// Threshold instance with the same spread as `tr`.
pub fn triggering_to_gt(tr: &TriggeringInstance) -> GtInstance {
    let thresholds = tr
        .dists()
        .iter()
        .map(|q| {
            let below = mobius_inverse(q);
            let full = q.ground().full_mask();
            SetFunction::from_fn(q.ground().clone(), |c| one_minus(below.value(full & !c)))
        })
        .collect();
    GtInstance::new(tr.graph().clone(), thresholds).expect("shapes carried over from a valid instance")
}

/// Triggering instance with the same spread as `gt`, which exists iff every
/// threshold is AD-∞.
pub fn gt_to_triggering(gt: &GtInstance) -> Result<TriggeringInstance> {
    if let Some(v) = validate_gt(gt).first() {
        return Err(Error::InvalidInstance(format!(
            "invalid threshold at `{}`: {}",
            gt.graph().label(v.node),
            v.violation
        )));
    }
    let mut dists = Vec::with_capacity(gt.n());
    for (v, f) in gt.thresholds().iter().enumerate() {
        let full = f.ground().full_mask();
        let h = SetFunction::from_fn(f.ground().clone(), |b| one_minus(f.value(full & !b)));
        let q = mobius(&h);
        if let Some(a) = q.values().iter().position(|x| x.is_negative()) {
            return Err(Error::NotAdInfinity {
                node: v,
                subset: a as u32,
                coefficient: q.values()[a].clone(),
            });
        }
        dists.push(q);
    }
    TriggeringInstance::new(gt.graph().clone(), dists)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::DirectedGraph;
    use crate::rational::{int, ratio, Rational};
    use num_traits::{One, Zero};

    fn star(k: usize) -> DirectedGraph {
        let edges: Vec<(usize, usize)> = (1..=k).map(|u| (u, 0)).collect();
        DirectedGraph::anonymous(k + 1)
            .unwrap()
            .with_edges(&edges)
            .unwrap()
    }

    fn pow(x: &Rational, e: u32) -> Rational {
        (0..e).fold(Rational::one(), |a, _| a * x)
    }

    fn with_centre(
        g: &DirectedGraph,
        centre: SetFunction,
        leaf: impl Fn() -> SetFunction,
    ) -> Vec<SetFunction> {
        let mut v = vec![centre];
        v.extend((1..g.n()).map(|_| leaf()));
        v
    }

    #[test]
    fn deterministic_full_set_is_or() {
        let g = star(3);
        let ground = g.in_ground(0).unwrap();
        let q = SetFunction::from_fn(ground.clone(), |m| if m == 0b111 { int(1) } else { int(0) });
        let leaf = || SetFunction::new(g.in_ground(1).unwrap(), vec![int(1)]).unwrap();
        let tr = TriggeringInstance::new(g.clone(), with_centre(&g, q, leaf)).unwrap();
        let gt = triggering_to_gt(&tr);
        assert_eq!(gt.threshold(0), &SetFunction::or(ground));
        assert_eq!(gt_to_triggering(&gt).unwrap(), tr);
    }

    #[test]
    fn independent_inclusion() {
        let g = star(3);
        let p = ratio(2, 7);
        let ground = g.in_ground(0).unwrap();
        let q = SetFunction::from_fn(ground.clone(), |m| {
            pow(&p, m.count_ones()) * pow(&one_minus(&p), 3 - m.count_ones())
        });
        let leaf = || SetFunction::new(g.in_ground(1).unwrap(), vec![int(1)]).unwrap();
        let tr = TriggeringInstance::new(g.clone(), with_centre(&g, q.clone(), leaf)).unwrap();
        let gt = triggering_to_gt(&tr);
        for c in 0..8u32 {
            assert_eq!(
                gt.threshold(0).value(c),
                &one_minus(&pow(&one_minus(&p), c.count_ones()))
            );
        }
        assert_eq!(gt_to_triggering(&gt).unwrap().dist(0), &q);
    }

    #[test]
    fn empty_trigger_gives_zero() {
        let g = star(2);
        let q = SetFunction::from_fn(g.in_ground(0).unwrap(), |m| if m == 0 { int(1) } else { int(0) });
        let leaf = || SetFunction::new(g.in_ground(1).unwrap(), vec![int(1)]).unwrap();
        let tr = TriggeringInstance::new(g.clone(), with_centre(&g, q, leaf)).unwrap();
        assert!(triggering_to_gt(&tr)
            .threshold(0)
            .values()
            .iter()
            .all(Zero::is_zero));
    }

    #[test]
    fn supermodular_pair_rejected() {
        let g = star(2);
        let f = SetFunction::new(
            g.in_ground(0).unwrap(),
            vec![int(0), ratio(1, 5), ratio(1, 5), ratio(3, 5)],
        )
        .unwrap();
        let leaf = || SetFunction::zero(g.in_ground(1).unwrap());
        let gt = GtInstance::new(g.clone(), with_centre(&g, f, leaf)).unwrap();
        assert_eq!(
            gt_to_triggering(&gt),
            Err(Error::NotAdInfinity {
                node: 0,
                subset: 0b11,
                coefficient: ratio(-1, 5)
            })
        );
    }
}
