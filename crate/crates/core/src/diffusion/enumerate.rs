//! Parallel mixed-radix enumeration with exact integer weights.

use std::ops::{AddAssign, MulAssign};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::rational::Rational;

const CHUNK: u64 = 1 << 12;

/// Nonnegative integer weight accumulated over an enumeration.
pub(crate) trait Weight:
    Clone + Send + Sync + Zero + One + AddAssign + for<'a> MulAssign<&'a Self>
{
    fn from_big(x: &BigUint) -> Self;
    fn into_big(self) -> BigUint;
}

impl Weight for u128 {
    fn from_big(x: &BigUint) -> Self {
        x.to_u128().expect("weight fits u128")
    }
    fn into_big(self) -> BigUint {
        BigUint::from(self)
    }
}

impl Weight for BigUint {
    fn from_big(x: &BigUint) -> Self {
        x.clone()
    }
    fn into_big(self) -> BigUint {
        self
    }
}

/// Per-digit integer weights over a common per-digit denominator.
pub(crate) struct Digits {
    pub weights: Vec<Vec<BigUint>>,
    pub denominators: Vec<BigUint>,
}

impl Digits {
    /// Scales each digit's rational probabilities by the lcm of their denominators.
    pub fn from_rationals(probs: &[Vec<Rational>]) -> Self {
        let mut weights = Vec::with_capacity(probs.len());
        let mut denominators = Vec::with_capacity(probs.len());
        for ps in probs {
            let den = ps.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
            weights.push(
                ps.iter()
                    .map(|p| {
                        (p.numer() * (&den / p.denom()))
                            .to_biguint()
                            .expect("nonnegative weight")
                    })
                    .collect(),
            );
            denominators.push(den.to_biguint().expect("positive denominator"));
        }
        Digits {
            weights,
            denominators,
        }
    }

    pub fn radices(&self) -> Vec<usize> {
        self.weights.iter().map(Vec::len).collect()
    }

    pub fn total_denominator(&self) -> BigUint {
        self.denominators.iter().product()
    }

    /// Number of combinations, refused above `budget`.
    pub fn check_budget(&self, what: &'static str, budget: u128) -> Result<u64> {
        let mut count: u128 = 1;
        for r in self.radices() {
            count = count.saturating_mul(r as u128);
        }
        if count > budget {
            return Err(Error::Budget {
                what,
                needed: count,
                budget,
            });
        }
        Ok(count as u64)
    }

    pub fn fits_u128(&self) -> bool {
        self.total_denominator().bits() < 127
    }
}

/// Visits every digit combination with its weight `Π_v weights[v][idx_v]`,
/// folding into per-chunk accumulators merged in chunk order.
pub(crate) fn enumerate<W, A>(
    digits: &Digits,
    total: u64,
    init: impl Fn() -> A + Sync,
    visit: impl Fn(&mut A, &[usize], &W) + Sync,
    merge: impl Fn(A, A) -> A + Sync,
) -> A
where
    W: Weight,
    A: Send,
{
    let radices = digits.radices();
    let weights: Vec<Vec<W>> = digits
        .weights
        .iter()
        .map(|ws| ws.iter().map(W::from_big).collect())
        .collect();
    let n = radices.len();
    let chunks = total.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(total);
            let mut acc = init();
            let mut idx = vec![0usize; n];
            let mut rem = start;
            for p in (0..n).rev() {
                idx[p] = (rem % radices[p] as u64) as usize;
                rem /= radices[p] as u64;
            }
            let mut prefix: Vec<W> = vec![W::one(); n + 1];
            for p in 0..n {
                let mut w = prefix[p].clone();
                w *= &weights[p][idx[p]];
                prefix[p + 1] = w;
            }
            for _ in start..end {
                visit(&mut acc, &idx, &prefix[n]);
                let mut p = n;
                while p > 0 {
                    p -= 1;
                    idx[p] += 1;
                    if idx[p] < radices[p] {
                        break;
                    }
                    idx[p] = 0;
                }
                for q in p..n {
                    let mut w = prefix[q].clone();
                    w *= &weights[q][idx[q]];
                    prefix[q + 1] = w;
                }
            }
            acc
        })
        .reduce_with(&merge)
        .unwrap_or_else(init)
}

pub(crate) fn to_rational(num: BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den.clone()))
}
