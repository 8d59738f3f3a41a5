//! Closed-form output law of [`crate::generator::svgen`] and its bounds.
//!
//! For a complete tableau `T` and a level `k`, the probability that the
//! generator started from `T` restricted to level `k` returns `T` is
//!
//! ```text
//!   1 / (f^μ · C(k, |μ|)) · Π_i 1 / |NW{cells c : i <= max T(c)}|      (k < N)
//!   1 / (f^λ · C(N-1, |λ|-1)) · Π_i 1 / |NW{cells c : i <= max T(c)}|  (k = N)
//! ```
//!
//! where `μ` is the empty region of the restriction, `f` counts standard Young
//! tableaux, and `i` runs over the values `<= k` that are not the maximum of
//! their cell.

use std::collections::btree_map::{self, BTreeMap};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::oracle;
use crate::scalar::{ratio_string, Probability};
use crate::shapes::{binomial, count_syt, max_antichain, sylvester_size};
use crate::tableaux::{PreTableau, TableauKey};

/// A pair `lower <= upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbBounds<P> {
    pub lower: P,
    pub upper: P,
}

impl<P: Probability> ProbBounds<P> {
    pub fn contains(&self, p: &P) -> bool {
        &self.lower <= p && p <= &self.upper
    }
}

/// Probability law over pre-tableaux, keyed canonically.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<P> {
    entries: BTreeMap<TableauKey, (PreTableau, P)>,
}

impl<P> Default for Distribution<P> {
    fn default() -> Self {
        Distribution {
            entries: BTreeMap::new(),
        }
    }
}

impl<P: Probability> Distribution<P> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `p` to the mass of `t`.
    pub fn add(&mut self, t: PreTableau, p: P) {
        match self.entries.entry(t.key()) {
            btree_map::Entry::Occupied(mut e) => {
                let slot = &mut e.get_mut().1;
                *slot = slot.clone() + p;
            }
            btree_map::Entry::Vacant(e) => {
                e.insert((t, p));
            }
        }
    }

    /// Uniform law on `support`.
    pub fn uniform(support: &[PreTableau]) -> Self {
        let mut d = Self::new();
        let n = support.len() as u64;
        for t in support {
            d.add(t.clone(), P::from_counts(1, n));
        }
        d
    }

    /// Empirical law of `samples`, with explicit zeros on the rest of `support`.
    pub fn empirical<'a>(
        support: &[PreTableau],
        samples: impl IntoIterator<Item = &'a PreTableau>,
    ) -> Result<Self> {
        let mut counts: BTreeMap<TableauKey, u64> = support.iter().map(|t| (t.key(), 0)).collect();
        let mut total = 0u64;
        for t in samples {
            *counts.get_mut(&t.key()).ok_or(Error::SupportMismatch)? += 1;
            total += 1;
        }
        if total == 0 {
            return Err(Error::ZeroSamples);
        }
        let mut d = Self::new();
        for t in support {
            d.add(t.clone(), P::from_counts(counts[&t.key()], total));
        }
        Ok(d)
    }

    pub fn get(&self, key: &TableauKey) -> Option<&P> {
        self.entries.get(key).map(|(_, p)| p)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PreTableau, &P)> {
        self.entries.values().map(|(t, p)| (t, p))
    }

    pub fn keys(&self) -> impl Iterator<Item = &TableauKey> {
        self.entries.keys()
    }

    pub fn total(&self) -> P {
        self.entries
            .values()
            .fold(P::zero(), |acc, (_, p)| acc + p.clone())
    }

    pub fn min_probability(&self) -> Option<P> {
        self.entries.values().map(|(_, p)| p.clone()).reduce(|a, b| a.min_of(&b))
    }

    pub fn max_probability(&self) -> Option<P> {
        self.entries
            .values()
            .map(|(_, p)| p.clone())
            .reduce(|a, b| if a >= b { a } else { b })
    }
}

impl Distribution<BigRational> {
    /// `[{"tableau": ..., "p": "num/den"}, ...]` in key order.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.iter()
                .map(|(t, p)| json!({ "tableau": t.to_json(), "p": ratio_string(p) }))
                .collect(),
        )
    }
}

/// Total variation distance: half the L1 distance between the two laws.
pub fn tv_distance<P: Probability>(mu: &Distribution<P>, nu: &Distribution<P>) -> Result<P> {
    if mu.len() != nu.len() || mu.keys().zip(nu.keys()).any(|(a, b)| a != b) {
        return Err(Error::SupportMismatch);
    }
    let l1 = mu
        .entries
        .values()
        .zip(nu.entries.values())
        .fold(P::zero(), |acc, ((_, a), (_, b))| acc + a.abs_diff(b));
    Ok(l1 / P::from_counts(2, 1))
}

fn check_args(t: &PreTableau, k: usize) -> Result<()> {
    if !t.is_complete() {
        return Err(Error::LevelNotZero(t.level()));
    }
    if k > t.capacity() {
        return Err(Error::LevelOutOfRange {
            level: k,
            low: 0,
            high: t.capacity(),
        });
    }
    Ok(())
}

/// Max of each cell, row-major.
fn cell_maxima(t: &PreTableau) -> Vec<usize> {
    t.cells()
        .iter()
        .map(|v| *v.last().expect("complete tableau"))
        .collect()
}

/// Sizes `|NW{c : i <= max T(c)}|` for every non-maximal value `i <= k`.
fn frontier_sizes(t: &PreTableau, k: usize) -> Vec<usize> {
    let maxima = cell_maxima(t);
    let mut is_max = vec![false; t.capacity() + 1];
    for &m in &maxima {
        is_max[m] = true;
    }
    let rows = t.shape().rows();
    let mut below = vec![0usize; rows.len()];
    (1..=k)
        .filter(|&i| !is_max[i])
        .map(|i| {
            // cells with max < i form a partition; count the corners of its complement
            let mut offset = 0;
            for (r, &len) in rows.iter().enumerate() {
                below[r] = maxima[offset..offset + len].iter().take_while(|&&m| m < i).count();
                offset += len;
            }
            (0..rows.len())
                .filter(|&r| below[r] < rows[r] && (r == 0 || below[r - 1] > below[r]))
                .count()
        })
        .collect()
}

/// Denominator of the leading factor, and the exponent base region size.
fn leading_denominator(t: &PreTableau, k: usize) -> BigUint {
    let n = t.capacity();
    if k == n {
        let size = t.shape().size();
        count_syt(t.shape()) * binomial(n - 1, size - 1)
    } else {
        let region = t.restrict(k).expect("k checked").empty_region();
        count_syt(&region) * binomial(k, region.size())
    }
}

/// Probability that the generator, started from `t.restrict(k)`, returns `t`.
pub fn svgen_probability<P: Probability>(t: &PreTableau, k: usize) -> Result<P> {
    check_args(t, k)?;
    if t.shape().is_empty() {
        return Ok(P::one());
    }
    let lead = P::reciprocal_of(&leading_denominator(t, k));
    Ok(frontier_sizes(t, k)
        .into_iter()
        .fold(lead, |acc, size| acc / P::from_counts(size as u64, 1)))
}

/// Exact instantiation of [`svgen_probability`].
pub fn exact_probability(t: &PreTableau, k: usize) -> Result<BigRational> {
    svgen_probability::<BigRational>(t, k)
}

/// Lower and upper bounds on [`svgen_probability`] that depend on `t` only
/// through the level-`k` restriction.
pub fn probability_bounds<P: Probability>(t: &PreTableau, k: usize) -> Result<ProbBounds<P>> {
    check_args(t, k)?;
    if t.shape().is_empty() {
        return Ok(ProbBounds {
            lower: P::one(),
            upper: P::one(),
        });
    }
    let n = t.capacity();
    let (width, extra) = if k == n {
        (sylvester_size(t.shape()), n - t.shape().size())
    } else {
        let s = t.restrict(k)?;
        (max_antichain(&s.augmented_region()), k - s.empty_region().size())
    };
    let den = leading_denominator(t, k);
    let upper = P::reciprocal_of(&den);
    let lower = P::reciprocal_of(&(den * BigUint::from(width).pow(extra as u32)));
    Ok(ProbBounds { lower, upper })
}

/// The closed-form law tabulated over every completion of `start`.
pub fn exact_distribution(start: &PreTableau) -> Result<Distribution<BigRational>> {
    exact_distribution_bounded(start, oracle::ENUMERATION_LIMIT)
}

pub fn exact_distribution_bounded(start: &PreTableau, limit: usize) -> Result<Distribution<BigRational>> {
    let all = oracle::enumerate_svt_bounded(start, limit)?;
    let mut d = Distribution::new();
    for t in all.tableaux {
        let p = exact_probability(&t, start.level())?;
        d.add(t, p);
    }
    debug_assert!(d.total().is_one() || d.is_empty());
    Ok(d)
}
