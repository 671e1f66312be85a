use adk_core::rational::ratio;
use adk_core::setfn::{
    difference, has_alternating_sign, is_adk, mobius, mobius_inverse, multilinear_eval, multilinear_partial,
    GroundSet, Order, PointVector, SetFunction,
};
use adk_core::Rational;
use proptest::prelude::*;

fn table(n: usize) -> impl Strategy<Value = SetFunction> {
    prop::collection::vec((-6i64..=6, 1i64..=6), 1 << n).prop_map(move |v| {
        SetFunction::new(
            GroundSet::anonymous(n).unwrap(),
            v.into_iter().map(|(p, q)| ratio(p, q)).collect(),
        )
        .unwrap()
    })
}

fn any_table() -> impl Strategy<Value = SetFunction> {
    (0usize..=5).prop_flat_map(table)
}

/// `f(C) = 1 − Σ_{B∩C=∅} w(B) / total` with nonnegative weights on sets of
/// size at most 1 and signed weights above, so AD orders vary.
fn co_weighted() -> impl Strategy<Value = SetFunction> {
    (1usize..=4).prop_flat_map(|n| {
        prop::collection::vec(-2i64..=8, 1 << n).prop_map(move |w| {
            let ground = GroundSet::anonymous(n).unwrap();
            let full = ground.full_mask();
            let total: i64 = w.iter().map(|x| x.abs()).sum::<i64>() + 1;
            SetFunction::from_fn(ground, |c| {
                let below: i64 = (0..=full)
                    .filter(|b| b & c == 0)
                    .map(|b| {
                        if b.count_ones() <= 1 {
                            w[b as usize].abs()
                        } else {
                            w[b as usize]
                        }
                    })
                    .sum();
                ratio(total - below, total)
            })
        })
    })
}

/// Differences by repeated single-element steps in the given order.
fn stepwise(f: &SetFunction, order: &[usize], s: u32) -> Rational {
    match order.split_first() {
        None => f.value(s).clone(),
        Some((&i, rest)) => stepwise(f, rest, s | 1 << i) - stepwise(f, rest, s),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn differences_are_order_independent(f in any_table(), seed in any::<u64>()) {
        let full = f.ground().full_mask();
        for a in 0..=full {
            let s = !a & full & (seed as u32);
            let mut order: Vec<usize> = (0..f.n()).filter(|i| a >> i & 1 == 1).collect();
            let rev: Vec<usize> = order.iter().rev().copied().collect();
            prop_assert_eq!(stepwise(&f, &order, s), difference(&f, a, s));
            prop_assert_eq!(stepwise(&f, &rev, s), difference(&f, a, s));
            let shift = order.len().min(1);
            order.rotate_left(shift);
            prop_assert_eq!(stepwise(&f, &order, s), difference(&f, a, s));
        }
    }

    #[test]
    fn overlapping_differences_vanish(f in any_table()) {
        let full = f.ground().full_mask();
        for a in 1..=full {
            for s in 0..=full {
                if a & s != 0 {
                    prop_assert_eq!(difference(&f, a, s), ratio(0, 1));
                }
            }
        }
    }

    #[test]
    fn mobius_is_difference_at_empty_set(f in any_table()) {
        let g = mobius(&f);
        for s in 0..=f.ground().full_mask() {
            prop_assert_eq!(g.value(s), &difference(&f, s, 0));
        }
        prop_assert_eq!(mobius_inverse(&g), f);
    }

    #[test]
    fn adk_orders_nest(f in co_weighted()) {
        let n = f.n();
        for k in 2..=n + 1 {
            if is_adk(&f, Order::Finite(k)).holds {
                prop_assert!(is_adk(&f, Order::Finite(k - 1)).holds);
            }
        }
        prop_assert_eq!(is_adk(&f, Order::Infinity).holds, is_adk(&f, Order::Finite(n)).holds);
    }

    #[test]
    fn witness_is_first_violation(f in co_weighted(), k in 1usize..=4) {
        let r = is_adk(&f, Order::Finite(k));
        let full = f.ground().full_mask();
        let mut first = None;
        'outer: for size in 1..=k.min(f.n()) as u32 {
            for a in (1..=full).filter(|a| a.count_ones() == size) {
                for s in (0..=full).filter(|s| s & a == 0) {
                    if !has_alternating_sign(size as usize, &difference(&f, a, s)) {
                        first = Some((a, s));
                        break 'outer;
                    }
                }
            }
        }
        prop_assert_eq!(r.holds, first.is_none());
        prop_assert_eq!(r.witness.map(|w| (w.a, w.s)), first);
    }

    #[test]
    fn nonnegative_combinations_stay_adk(
        f in co_weighted(),
        w1 in 0i64..=5,
        w2 in 0i64..=5,
        k in 1usize..=4,
    ) {
        let n = f.n();
        let g = SetFunction::from_fn(f.ground().clone(), |m| ratio(m.count_ones() as i64, n as i64));
        let order = Order::Finite(k);
        if is_adk(&f, order).holds {
            let h = SetFunction::weighted_sum(&[(ratio(w1, 3), &f), (ratio(w2, 7), &g)]).unwrap();
            prop_assert!(is_adk(&h, order).holds);
        }
    }

    #[test]
    fn extension_partials_carry_the_sign(
        f in co_weighted(),
        coords in prop::collection::vec(1i64..=15, 4),
        k in 1usize..=4,
    ) {
        let n = f.n();
        let x = PointVector::new(coords[..n].iter().map(|&c| ratio(c, 16)).collect()).unwrap();
        let full = f.ground().full_mask();
        let adk = is_adk(&f, Order::Finite(k)).holds;
        let mut vertex_signs = true;
        for a in (1..=full).filter(|a| a.count_ones() as usize <= k) {
            let p = multilinear_partial(&f, a, &x).unwrap();
            if adk {
                prop_assert!(has_alternating_sign(a.count_ones() as usize, &p));
            }
            for t in (0..=full).filter(|t| t & a == 0) {
                let v = multilinear_partial(&f, a, &PointVector::vertex(n, t)).unwrap();
                prop_assert_eq!(&v, &difference(&f, a, t));
                vertex_signs &= has_alternating_sign(a.count_ones() as usize, &v);
            }
        }
        prop_assert_eq!(vertex_signs, adk);
    }

    #[test]
    fn extension_interpolates_vertices(f in any_table()) {
        for t in 0..=f.ground().full_mask() {
            prop_assert_eq!(&multilinear_eval(&f, &PointVector::vertex(f.n(), t)).unwrap(), f.value(t));
        }
    }
}
