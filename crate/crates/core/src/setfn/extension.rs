//! Multilinear extension, its mixed partials, and the compound construction
//! `h(S) = Σ_T Π_{v∈T} g_v(S) Π_{v∉T} (1 - g_v(S)) f(T)`.

use num_traits::{One, Zero};

use super::{bits, difference, enumerate_partitions, one_minus, submasks, SetFunction};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// A point of the unit cube.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PointVector {
    coords: Vec<Rational>,
}

impl PointVector {
    pub fn new(coords: Vec<Rational>) -> Result<Self> {
        if let Some(i) = coords.iter().position(|c| !rational::in_unit_interval(c)) {
            return Err(Error::PointOutOfRange {
                index: i,
                value: coords[i].clone(),
            });
        }
        Ok(PointVector { coords })
    }

    /// Indicator vector `x_S` of a subset.
    pub fn vertex(n: usize, mask: u32) -> Self {
        PointVector {
            coords: (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        Rational::one()
                    } else {
                        Rational::zero()
                    }
                })
                .collect(),
        }
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coords
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }
}

fn check_len(f: &SetFunction, x: &[Rational]) -> Result<()> {
    if f.n() != x.len() {
        return Err(Error::PointLength {
            expected: f.n(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Collapses the table one coordinate at a time, highest bit first. Coordinates
/// in `diff` are differenced; the rest are interpolated at `x`.
fn collapse(f: &SetFunction, diff: u32, x: &[Rational]) -> Rational {
    let mut table: Vec<Rational> = f.values().to_vec();
    for i in (0..f.n()).rev() {
        let half = 1usize << i;
        let (lo, hi) = table.split_at(half);
        table = if diff >> i & 1 == 1 {
            lo.iter().zip(hi).map(|(l, h)| h - l).collect()
        } else {
            let xi = &x[i];
            let yi = one_minus(xi);
            lo.iter().zip(hi).map(|(l, h)| &yi * l + xi * h).collect()
        };
    }
    table.pop().expect("collapsed table has one entry")
}

/// Multilinear extension `G(x) = Σ_T Π_{v∈T} x_v Π_{v∉T} (1-x_v) f(T)`.
pub fn multilinear_eval(f: &SetFunction, x: &PointVector) -> Result<Rational> {
    check_len(f, x.coords())?;
    Ok(collapse(f, 0, x.coords()))
}

/// Mixed partial `∂_A G(x) = Σ_{T⊆V\A} Δ_A f(T) Π_{v∈T} x_v Π_{v∉A∪T} (1-x_v)`.
/// Coordinates in `A` never enter the result.
pub fn multilinear_partial(f: &SetFunction, a: u32, x: &PointVector) -> Result<Rational> {
    check_len(f, x.coords())?;
    if a == 0 {
        return Err(Error::InvalidArgument(
            "differentiation set must be nonempty".into(),
        ));
    }
    if a & !f.ground().full_mask() != 0 {
        return Err(Error::InvalidArgument(format!(
            "differentiation set {a:#b} outside the ground set"
        )));
    }
    Ok(collapse(f, a, x.coords()))
}

fn check_compound(f: &SetFunction, gs: &[SetFunction]) -> Result<()> {
    if gs.len() != f.n() {
        return Err(Error::InvalidArgument(format!(
            "outer function has {} arguments but {} inner functions were given",
            f.n(),
            gs.len()
        )));
    }
    if let Some(first) = gs.first() {
        if gs.iter().any(|g| g.ground() != first.ground()) {
            return Err(Error::GroundMismatch);
        }
    }
    f.check_unit_interval("outer function")?;
    for (v, g) in gs.iter().enumerate() {
        g.check_unit_interval(&format!("inner function {v}"))?;
    }
    Ok(())
}

/// The compound set function over the shared ground of `gs`.
///
/// `h(S)` is the multilinear extension of `f` evaluated at `(g_v(S))_v`.
pub fn compound(f: &SetFunction, gs: &[SetFunction]) -> Result<SetFunction> {
    check_compound(f, gs)?;
    let ground = match gs.first() {
        Some(g) => g.ground().clone(),
        None => {
            return Err(Error::InvalidArgument(
                "compound needs at least one inner function".into(),
            ))
        }
    };
    Ok(SetFunction::from_fn(ground, |s| {
        let y: Vec<Rational> = gs.iter().map(|g| g.value(s).clone()).collect();
        collapse(f, 0, &y)
    }))
}

/// `H(x) = F(G_1(x), .., G_m(x))` with `F`, `G_v` the multilinear extensions.
pub fn compound_eval_continuous(f: &SetFunction, gs: &[SetFunction], x: &PointVector) -> Result<Rational> {
    check_compound(f, gs)?;
    let n = gs.first().map(|g| g.n()).unwrap_or(0);
    if x.len() != n {
        return Err(Error::PointLength {
            expected: n,
            got: x.len(),
        });
    }
    let y: Vec<Rational> = gs.iter().map(|g| collapse(g, 0, x.coords())).collect();
    Ok(collapse(f, 0, &y))
}

/// The `|L|`-th mixed partial of `H` at `x` through the partition-sum formula:
///
/// sum over partitions `P = (T_1..T_s)` of the positions of `L`, over
/// injective assignments `T_i ↦ v_i` of blocks to distinct outer arguments,
/// and over `T ⊆ V \ {v_1..v_s}`, of
/// `Δ_{V_P} f(T) · Π_i ∂G_{v_i}/∂x_{T_i} · Π_{w∈T} G_w · Π_{w∉T∪V_P} (1 - G_w)`.
pub fn partition_derivative(
    f: &SetFunction,
    gs: &[SetFunction],
    coords: &[usize],
    x: &PointVector,
) -> Result<Rational> {
    check_compound(f, gs)?;
    let ell = coords.len();
    if ell == 0 || ell > 6 {
        return Err(Error::PartitionRange(ell));
    }
    let n_inner = gs.first().map(|g| g.n()).unwrap_or(0);
    if x.len() != n_inner {
        return Err(Error::PointLength {
            expected: n_inner,
            got: x.len(),
        });
    }
    let mut seen = 0u32;
    for &c in coords {
        if c >= n_inner || seen >> c & 1 == 1 {
            return Err(Error::InvalidArgument(format!(
                "coordinate {c} repeated or outside 0..{n_inner}"
            )));
        }
        seen |= 1 << c;
    }

    let outer = f.n();
    let full_outer = f.ground().full_mask() as u64;
    let y: Vec<Rational> = gs.iter().map(|g| multilinear_eval(g, x)).collect::<Result<_>>()?;

    let mut total = Rational::zero();
    for p in enumerate_partitions(ell)? {
        // Coordinate mask of each block in U.
        let block_coords: Vec<u32> = p
            .blocks()
            .iter()
            .map(|&b| bits(b as u64).fold(0u32, |m, j| m | (1 << coords[j])))
            .collect();
        // ∂G_v/∂x_{T_i} for every (block, outer argument).
        let partials: Vec<Vec<Rational>> = block_coords
            .iter()
            .map(|&bc| {
                gs.iter()
                    .map(|g| multilinear_partial(g, bc, x))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;

        let mut assignment = Vec::with_capacity(p.len());
        for_each_injection(p.len(), outer, &mut assignment, &mut |nodes| {
            let dg = nodes
                .iter()
                .enumerate()
                .fold(Rational::one(), |acc, (i, &v)| acc * &partials[i][v]);
            if dg.is_zero() {
                return;
            }
            let vp = nodes.iter().fold(0u64, |m, &v| m | (1 << v));
            let rest = full_outer & !vp;
            let mut inner = Rational::zero();
            for t in submasks(rest) {
                let d = difference(f, vp as u32, t as u32);
                if d.is_zero() {
                    continue;
                }
                let weight = bits(rest).fold(Rational::one(), |acc, w| {
                    if t >> w & 1 == 1 {
                        acc * &y[w]
                    } else {
                        acc * one_minus(&y[w])
                    }
                });
                inner += d * weight;
            }
            total += dg * inner;
        });
    }
    Ok(total)
}

/// Calls `visit` with every injective map `{0..k} -> {0..n}` as a slice.
fn for_each_injection(k: usize, n: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for v in 0..n {
        if !cur.contains(&v) {
            cur.push(v);
            for_each_injection(k, n, cur, visit);
            cur.pop();
        }
    }
}
