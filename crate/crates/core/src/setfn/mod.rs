//! Exact calculus of set functions over small ground sets.
//!
//! A [`SetFunction`] is a table of exact rationals indexed by subset bitmask:
//! bit `i` of the mask stands for the `i`-th label of the [`GroundSet`].
//! Everything here is a pure function of immutable tables.

mod extension;
mod partition;

pub use extension::{
    compound, compound_eval_continuous, multilinear_eval, multilinear_partial, partition_derivative,
    PointVector,
};
pub use partition::{enumerate_partitions, Partition};

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest ground set a table may be built over.
pub const MAX_GROUND: usize = 20;

/// Ordered, labelled ground set; position of a label is its bit index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroundSet {
    labels: Vec<String>,
}

impl GroundSet {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() > MAX_GROUND {
            return Err(Error::GroundTooLarge(labels.len()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::DuplicateLabel(l.clone()));
            }
        }
        Ok(GroundSet { labels })
    }

    /// Ground set labelled `0`, `1`, ... `n-1`.
    pub fn anonymous(n: usize) -> Result<Self> {
        Self::new((0..n).map(|i| i.to_string()))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn full_mask(&self) -> u32 {
        full_mask(self.len())
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn mask_of<S: AsRef<str>>(&self, labels: &[S]) -> Result<u32> {
        labels.iter().try_fold(0u32, |m, l| {
            let l = l.as_ref();
            self.index_of(l)
                .map(|i| m | (1 << i))
                .ok_or_else(|| Error::UnknownLabel(l.to_string()))
        })
    }

    pub fn labels_of(&self, mask: u32) -> Vec<&str> {
        bits(mask as u64).map(|i| self.labels[i].as_str()).collect()
    }
}

pub(crate) fn full_mask(n: usize) -> u32 {
    if n >= 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

/// Indices of the set bits, ascending.
pub(crate) fn bits(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            None
        } else {
            let i = mask.trailing_zeros() as usize;
            mask &= mask - 1;
            Some(i)
        }
    })
}

/// All submasks of `mask` in ascending numeric order, starting at 0.
pub(crate) fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == mask {
            None
        } else {
            Some(cur.wrapping_sub(mask) & mask)
        };
        Some(cur)
    })
}

/// Order of an alternating-difference check; `Infinity` means the ground size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Order {
    Finite(usize),
    Infinity,
}

impl Order {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            Order::Finite(k) => k.min(n),
            Order::Infinity => n,
        }
    }

    /// The next order up; infinity stays put.
    pub fn succ(self) -> Order {
        match self {
            Order::Finite(k) => Order::Finite(k + 1),
            Order::Infinity => Order::Infinity,
        }
    }
}

impl From<usize> for Order {
    fn from(k: usize) -> Self {
        Order::Finite(k)
    }
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(k) => write!(f, "{k}"),
            Order::Infinity => f.write_str("inf"),
        }
    }
}

impl std::str::FromStr for Order {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" | "∞" => Ok(Order::Infinity),
            _ => match s.parse::<usize>() {
                Ok(k) if k >= 1 => Ok(Order::Finite(k)),
                _ => Err(Error::InvalidArgument(format!(
                    "order must be a positive integer or `inf`, got `{s}`"
                ))),
            },
        }
    }
}

/// Exact table `2^ground -> Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SetFunction {
    ground: GroundSet,
    values: Vec<Rational>,
}

impl SetFunction {
    pub fn new(ground: GroundSet, values: Vec<Rational>) -> Result<Self> {
        let expected = 1usize << ground.len();
        if values.len() != expected {
            return Err(Error::TableLength {
                expected,
                got: values.len(),
            });
        }
        Ok(SetFunction { ground, values })
    }

    pub fn from_fn(ground: GroundSet, mut f: impl FnMut(u32) -> Rational) -> Self {
        let values = (0..1u32 << ground.len()).map(&mut f).collect();
        SetFunction { ground, values }
    }

    pub fn zero(ground: GroundSet) -> Self {
        Self::from_fn(ground, |_| Rational::zero())
    }

    /// 0 on the empty set, 1 elsewhere.
    pub fn or(ground: GroundSet) -> Self {
        Self::from_fn(
            ground,
            |m| if m == 0 { rational::zero() } else { rational::one() },
        )
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn n(&self) -> usize {
        self.ground.len()
    }

    pub fn values(&self) -> &[Rational] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Rational> {
        self.values
    }

    pub fn value(&self, mask: u32) -> &Rational {
        &self.values[mask as usize]
    }

    /// Nonnegative combination `Σ w_i g_i` over a shared ground set.
    pub fn weighted_sum(terms: &[(Rational, &SetFunction)]) -> Result<Self> {
        let (_, first) = terms
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty combination".into()))?;
        if terms.iter().any(|(_, g)| g.ground != first.ground) {
            return Err(Error::GroundMismatch);
        }
        Ok(Self::from_fn(first.ground.clone(), |m| {
            terms
                .iter()
                .map(|(w, g)| w * g.value(m))
                .fold(Rational::zero(), |a, b| a + b)
        }))
    }

    pub fn all_in_unit_interval(&self) -> bool {
        self.values.iter().all(rational::in_unit_interval)
    }

    pub fn check_unit_interval(&self, what: &str) -> Result<()> {
        match self.values.iter().position(|v| !rational::in_unit_interval(v)) {
            None => Ok(()),
            Some(m) => Err(Error::OutOfUnitInterval {
                what: what.to_string(),
                mask: m as u32,
                value: self.values[m].clone(),
            }),
        }
    }

    /// Every way this table fails to be a threshold function.
    ///
    /// Monotonicity is reported on covering pairs `(S, S ∪ {x})`; any violating
    /// chain `S ⊂ T` contains at least one of them.
    pub fn threshold_violations(&self) -> Vec<ThresholdViolation> {
        let mut out = Vec::new();
        if !self.values[0].is_zero() {
            out.push(ThresholdViolation::NonzeroAtEmpty(self.values[0].clone()));
        }
        for (m, v) in self.values.iter().enumerate() {
            if !rational::in_unit_interval(v) {
                out.push(ThresholdViolation::OutOfRange {
                    subset: m as u32,
                    value: v.clone(),
                });
            }
        }
        let full = self.ground.full_mask();
        for s in 0..=full {
            for x in bits((full & !s) as u64) {
                let t = s | (1 << x);
                if self.value(s) > self.value(t) {
                    out.push(ThresholdViolation::NotMonotone {
                        smaller: s,
                        larger: t,
                    });
                }
            }
        }
        out
    }

    pub fn is_threshold(&self) -> bool {
        self.threshold_violations().is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ThresholdViolation {
    NonzeroAtEmpty(Rational),
    OutOfRange { subset: u32, value: Rational },
    NotMonotone { smaller: u32, larger: u32 },
}

impl fmt::Display for ThresholdViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ThresholdViolation::NonzeroAtEmpty(v) => {
                write!(f, "value at empty set is {}", rational::format(v))
            }
            ThresholdViolation::OutOfRange { subset, value } => {
                write!(
                    f,
                    "value {} at {subset:#b} outside [0,1]",
                    rational::format(value)
                )
            }
            ThresholdViolation::NotMonotone { smaller, larger } => {
                write!(f, "value drops from {smaller:#b} to {larger:#b}")
            }
        }
    }
}

/// `Δ_A f(S) = Σ_{B⊆A} (-1)^{|B|} f(S ∪ (A\B))`; zero whenever `A ∩ S ≠ ∅`.
pub fn difference(f: &SetFunction, a: u32, s: u32) -> Rational {
    if a & s != 0 {
        return Rational::zero();
    }
    let mut acc = Rational::zero();
    for b in submasks(a as u64) {
        let b = b as u32;
        let v = f.value(s | (a & !b));
        if b.count_ones().is_multiple_of(2) {
            acc += v;
        } else {
            acc -= v;
        }
    }
    acc
}

/// A difference with the wrong sign.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdkWitness {
    pub s: u32,
    pub a: u32,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdkReport {
    pub holds: bool,
    pub checked_k: usize,
    pub witness: Option<AdkWitness>,
}

/// Checks `(-1)^{|A|+1} Δ_A f(S) ≥ 0` for every disjoint `(S, A)` with
/// `1 ≤ |A| ≤ k`. The witness is the first violation in `(|A|, A, S)` order.
pub fn is_adk(f: &SetFunction, k: Order) -> AdkReport {
    let n = f.n();
    let kk = k.resolve(n);
    // Scale to integers so each difference is a plain signed sum.
    let den = rational::common_denominator(f.values());
    let table: Vec<BigInt> = f.values().iter().map(|v| rational::scaled(v, &den)).collect();
    let full = f.ground.full_mask() as u64;

    for size in 1..=kk {
        for a in (0..=full).filter(|m| m.count_ones() as usize == size) {
            let terms: Vec<(u64, bool)> = submasks(a).map(|b| (a & !b, b.count_ones() % 2 == 0)).collect();
            for s in submasks(full & !a) {
                let mut acc = BigInt::zero();
                for &(t, plus) in &terms {
                    let v = &table[(s | t) as usize];
                    if plus {
                        acc += v;
                    } else {
                        acc -= v;
                    }
                }
                let wrong = if size % 2 == 1 {
                    acc.is_negative()
                } else {
                    acc.is_positive()
                };
                if wrong {
                    return AdkReport {
                        holds: false,
                        checked_k: kk,
                        witness: Some(AdkWitness {
                            s: s as u32,
                            a: a as u32,
                            value: Rational::new(acc, den.clone()),
                        }),
                    };
                }
            }
        }
    }
    AdkReport {
        holds: true,
        checked_k: kk,
        witness: None,
    }
}

/// `g(S) = Σ_{T⊆S} (-1)^{|S|-|T|} h(T)`.
pub fn mobius(h: &SetFunction) -> SetFunction {
    let mut values = h.values.clone();
    for i in 0..h.n() {
        let bit = 1usize << i;
        for m in 0..values.len() {
            if m & bit != 0 {
                let lo = values[m ^ bit].clone();
                values[m] -= lo;
            }
        }
    }
    SetFunction {
        ground: h.ground.clone(),
        values,
    }
}

/// `h(S) = Σ_{T⊆S} g(T)`, the inverse of [`mobius`].
pub fn mobius_inverse(g: &SetFunction) -> SetFunction {
    let mut values = g.values.clone();
    for i in 0..g.n() {
        let bit = 1usize << i;
        for m in 0..values.len() {
            if m & bit != 0 {
                let lo = values[m ^ bit].clone();
                values[m] += lo;
            }
        }
    }
    SetFunction {
        ground: g.ground.clone(),
        values,
    }
}

impl fmt::Display for SetFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (m, v) in self.values.iter().enumerate() {
            if m > 0 {
                f.write_str(" ")?;
            }
            write!(
                f,
                "{{{}}}:{}",
                self.ground.labels_of(m as u32).join(","),
                rational::format(v)
            )?;
        }
        Ok(())
    }
}

/// Sign `(-1)^{|A|+1} x ≥ 0`?
pub fn has_alternating_sign(order: usize, x: &Rational) -> bool {
    if order % 2 == 1 {
        !x.is_negative()
    } else {
        !x.is_positive()
    }
}

pub(crate) fn one_minus(x: &Rational) -> Rational {
    Rational::one() - x
}
