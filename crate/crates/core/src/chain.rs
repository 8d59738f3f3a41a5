//! Metropolised independence sampler targeting the uniform law on the
//! completions of a pre-tableau, plus exact diagnostics for small instances.
//!
//! Proposals come from [`svgen`]; a proposal `F` from state `T` is accepted
//! with probability `min(1, Ψ(T)/Ψ(F))` where `Ψ` is the generator's exact
//! output law. Off the diagonal the transition matrix is therefore
//! `P(T,F) = min(Ψ(T), Ψ(F))`, which is symmetric, so the uniform law is stationary.

use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::generator::svgen;
use crate::probability::{exact_distribution_bounded, exact_probability};
use crate::rng::RngStream;
use crate::scalar::{ratio_string, Probability};
use crate::tableaux::{PreTableau, TableauKey};

/// Largest state space for which a dense exact transition matrix is built.
pub const MATRIX_STATE_LIMIT: usize = 500;
/// Largest state space for the exhaustive cut scan.
pub const CONDUCTANCE_STATE_LIMIT: usize = 20;
/// Largest state space on which step counts are certified automatically.
pub const CERTIFY_STATE_LIMIT: usize = 200;
/// Give up on a mixing profile after this many matrix powers.
pub const MAX_PROFILE_STEPS: usize = 5_000;

/// Memoized proposal probabilities for one start pre-tableau.
#[derive(Clone, Debug, Default)]
pub struct ProposalCache {
    probs: HashMap<TableauKey, BigRational>,
}

impl ProposalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn probability(&mut self, t: &PreTableau, level: usize) -> Result<BigRational> {
        let key = t.key();
        if let Some(p) = self.probs.get(&key) {
            return Ok(p.clone());
        }
        let p = exact_probability(t, level)?;
        self.probs.insert(key, p.clone());
        Ok(p)
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// `min(1, current / proposal)`.
pub fn acceptance_probability(current: &BigRational, proposal: &BigRational) -> BigRational {
    if proposal <= current {
        BigRational::one()
    } else {
        current / proposal
    }
}

/// Bernoulli draw with exact rational success probability in `[0, 1]`.
fn bernoulli(p: &BigRational, rng: &mut RngStream) -> bool {
    if p.is_one() {
        return true;
    }
    let (num, den) = (p.numer(), p.denom());
    match (num.to_u64(), den.to_u64()) {
        (Some(a), Some(b)) => (rng.below(b as usize) as u64) < a,
        _ => {
            let den = den.magnitude();
            BigInt::from(rng.below_big(den)) < *num
        }
    }
}

/// A running chain on the completions of `start`.
#[derive(Clone, Debug)]
pub struct ChainState {
    start: PreTableau,
    current: PreTableau,
    current_prob: BigRational,
    rng: RngStream,
    step_count: u64,
    cache: ProposalCache,
}

impl ChainState {
    /// Starts at a generator draw from `start`.
    pub fn new(start: PreTableau, rng: RngStream) -> Result<Self> {
        Self::with_cache(start, rng, ProposalCache::new())
    }

    /// As [`ChainState::new`], reusing proposal probabilities computed for the same start.
    pub fn with_cache(start: PreTableau, mut rng: RngStream, mut cache: ProposalCache) -> Result<Self> {
        let current = svgen(&start, &mut rng)?;
        let current_prob = cache.probability(&current, start.level())?;
        Ok(ChainState {
            start,
            current,
            current_prob,
            rng,
            step_count: 0,
            cache,
        })
    }

    pub fn current(&self) -> &PreTableau {
        &self.current
    }

    pub fn start(&self) -> &PreTableau {
        &self.start
    }

    pub fn step_count(&self) -> u64 {
        self.step_count
    }

    pub fn into_parts(self) -> (PreTableau, RngStream, ProposalCache) {
        (self.current, self.rng, self.cache)
    }

    /// One Metropolis step; returns whether the proposal was accepted.
    pub fn step(&mut self) -> Result<bool> {
        let proposal = svgen(&self.start, &mut self.rng)?;
        let proposal_prob = self.cache.probability(&proposal, self.start.level())?;
        let accept = bernoulli(
            &acceptance_probability(&self.current_prob, &proposal_prob),
            &mut self.rng,
        );
        if accept {
            self.current = proposal;
            self.current_prob = proposal_prob;
        }
        self.step_count += 1;
        Ok(accept)
    }
}

pub fn metropolis_step(state: &mut ChainState) -> Result<bool> {
    state.step()
}

/// Generator draw followed by `steps` Metropolis steps.
pub fn run_chain(start: &PreTableau, steps: usize, rng: &mut RngStream) -> Result<PreTableau> {
    let mut cache = ProposalCache::new();
    run_chain_cached(start, steps, rng, &mut cache)
}

pub fn run_chain_cached(
    start: &PreTableau,
    steps: usize,
    rng: &mut RngStream,
    cache: &mut ProposalCache,
) -> Result<PreTableau> {
    let mut state = ChainState::with_cache(start.clone(), rng.clone(), std::mem::take(cache))?;
    for _ in 0..steps {
        state.step()?;
    }
    let (current, used, reused) = state.into_parts();
    *rng = used;
    *cache = reused;
    Ok(current)
}

/// Dense exact transition matrix over the completions of a start pre-tableau.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    /// Sorted by key.
    pub states: Vec<PreTableau>,
    pub entries: Vec<Vec<BigRational>>,
}

impl TransitionMatrix {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn keys(&self) -> Vec<TableauKey> {
        self.states.iter().map(|t| t.key()).collect()
    }

    /// `P = A / D` with `A` integral and `D` the common denominator.
    fn scaled(&self) -> (Vec<Vec<BigInt>>, BigInt) {
        let den = self
            .entries
            .iter()
            .flatten()
            .fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
        let ints = self
            .entries
            .iter()
            .map(|row| row.iter().map(|p| p.numer() * (&den / p.denom())).collect())
            .collect();
        (ints, den)
    }

    /// Row vector times matrix.
    pub fn left_multiply(&self, v: &[BigRational]) -> Vec<BigRational> {
        (0..self.len())
            .map(|j| {
                v.iter()
                    .zip(&self.entries)
                    .fold(BigRational::zero(), |acc, (x, row)| acc + x * &row[j])
            })
            .collect()
    }
}

pub fn build_transition_matrix(start: &PreTableau) -> Result<TransitionMatrix> {
    build_transition_matrix_bounded(start, MATRIX_STATE_LIMIT)
}

pub fn build_transition_matrix_bounded(start: &PreTableau, limit: usize) -> Result<TransitionMatrix> {
    let law = exact_distribution_bounded(start, limit)?;
    let (states, psi): (Vec<PreTableau>, Vec<BigRational>) =
        law.iter().map(|(t, p)| (t.clone(), p.clone())).unzip();
    let n = states.len();
    let mut entries = vec![vec![BigRational::zero(); n]; n];
    for i in 0..n {
        let mut off = BigRational::zero();
        for j in 0..n {
            if i != j {
                let p = psi[i].min_of(&psi[j]);
                off += &p;
                entries[i][j] = p;
            }
        }
        entries[i][i] = BigRational::one() - off;
    }
    Ok(TransitionMatrix { states, entries })
}

/// Minimum over cuts `S` with `|S| <= n/2` of the escape mass `Σ_{x∈S, y∉S} P(x,y) / |S|`
/// under the uniform law. A one-state chain has conductance 1 by convention.
pub fn conductance(matrix: &TransitionMatrix) -> Result<BigRational> {
    let n = matrix.len();
    if n > CONDUCTANCE_STATE_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            limit: CONDUCTANCE_STATE_LIMIT,
        });
    }
    if n <= 1 {
        return Ok(BigRational::one());
    }
    let (ints, den) = matrix.scaled();
    let small: Option<Vec<Vec<i128>>> = ints
        .iter()
        .map(|row| row.iter().map(|x| x.to_i64().map(i128::from)).collect())
        .collect();
    let (cut, size) = match small {
        Some(a) => {
            let (c, s) = min_cut_ratio(&a);
            (BigInt::from(c), s)
        }
        None => min_cut_ratio(&ints),
    };
    Ok(BigRational::new(cut, den * BigInt::from(size)))
}

/// Gray-code scan over all subsets; returns the minimizing `(cut, |S|)`.
fn min_cut_ratio<T>(a: &[Vec<T>]) -> (T, usize)
where
    T: Clone + Ord + Zero + std::ops::Add<Output = T> + std::ops::Sub<Output = T> + std::ops::Mul<Output = T> + From<i64>,
{
    let n = a.len();
    let mut member = vec![false; n];
    let mut size = 0usize;
    let mut cut = T::zero();
    let mut best: Option<(T, usize)> = None;
    for i in 1u64..(1u64 << n) {
        let v = i.trailing_zeros() as usize;
        let adding = !member[v];
        let (mut into_v, mut out_of_v) = (T::zero(), T::zero());
        for u in 0..n {
            if u == v {
                continue;
            }
            if member[u] {
                into_v = into_v + a[u][v].clone();
            } else {
                out_of_v = out_of_v + a[v][u].clone();
            }
        }
        if adding {
            cut = cut + out_of_v - into_v;
            size += 1;
        } else {
            cut = cut + into_v - out_of_v;
            size -= 1;
        }
        member[v] = adding;
        if 2 * size <= n && size > 0 {
            let better = match &best {
                None => true,
                Some((c, s)) => cut.clone() * T::from(*s as i64) < c.clone() * T::from(size as i64),
            };
            if better {
                best = Some((cut.clone(), size));
            }
        }
    }
    best.expect("n >= 2 has a nonempty half")
}

/// Exact distance-to-uniform curve of a chain, its mixing time, and the
/// conductance-based upper bound when the conductance is computable.
#[derive(Clone, Debug)]
pub struct MixingProfile {
    pub states: usize,
    pub epsilon: BigRational,
    pub t_mix: usize,
    /// `d(t)` for `t = 0..=t_mix`.
    pub tv_curve: Vec<BigRational>,
    pub conductance: Option<BigRational>,
    /// `(1/Φ²)(ln |X| + ln 1/ε)`.
    pub bound_upper: Option<f64>,
}

impl MixingProfile {
    pub fn to_json(&self) -> Value {
        json!({
            "states": self.states,
            "phi": self.conductance.as_ref().map(ratio_string),
            "tv_curve": self.tv_curve.iter().map(ratio_string).collect::<Vec<_>>(),
            "t_mix": self.t_mix,
            "bound_upper": self.bound_upper,
        })
    }
}

/// Upper bound on the mixing time from the conductance.
pub fn conductance_mixing_bound(phi: &BigRational, states: usize, epsilon: &BigRational) -> f64 {
    let phi = phi.to_f64().unwrap_or(0.0);
    let eps = Probability::as_f64(epsilon);
    ((states as f64).ln() + (1.0 / eps).ln()) / (phi * phi)
}

/// `d(t) = max_x TV(P^t(x,·), uniform)` for `t = 0, 1, ...` until `d(t) <= epsilon`.
pub fn mixing_profile(matrix: &TransitionMatrix, epsilon: &BigRational) -> Result<MixingProfile> {
    if !epsilon.is_positive() {
        return Err(Error::InvalidParameter("epsilon must be positive".to_string()));
    }
    let n = matrix.len();
    if n == 0 {
        return Err(Error::EmptyEnumeration);
    }
    let (a, den) = matrix.scaled();
    let size = BigInt::from(n);
    let mut power: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    let mut scale = BigInt::one();
    let mut curve = Vec::new();
    loop {
        let worst = power
            .iter()
            .map(|row| row.iter().fold(BigInt::zero(), |acc, x| acc + (&size * x - &scale).abs()))
            .max()
            .expect("n >= 1");
        let d = BigRational::new(worst, BigInt::from(2) * &size * &scale);
        let done = d <= *epsilon;
        curve.push(d);
        if done {
            break;
        }
        if curve.len() > MAX_PROFILE_STEPS {
            return Err(Error::CannotCertifySteps(format!(
                "distance still above epsilon after {MAX_PROFILE_STEPS} steps"
            )));
        }
        power = power
            .iter()
            .map(|row| {
                (0..n)
                    .map(|j| {
                        row.iter()
                            .zip(&a)
                            .filter(|(x, _)| !x.is_zero())
                            .fold(BigInt::zero(), |acc, (x, arow)| acc + x * &arow[j])
                    })
                    .collect()
            })
            .collect();
        scale *= &den;
    }
    let conductance = (n <= CONDUCTANCE_STATE_LIMIT).then(|| conductance(matrix)).transpose()?;
    let bound_upper = conductance
        .as_ref()
        .map(|phi| conductance_mixing_bound(phi, n, epsilon));
    Ok(MixingProfile {
        states: n,
        epsilon: epsilon.clone(),
        t_mix: curve.len() - 1,
        tv_curve: curve,
        conductance,
        bound_upper,
    })
}

/// Step count that brings every start within `bias` of uniform, computed
/// from the exact matrix. Fails for state spaces too large to certify.
pub fn certify_steps(start: &PreTableau, bias: &BigRational) -> Result<usize> {
    let matrix = build_transition_matrix_bounded(start, CERTIFY_STATE_LIMIT).map_err(|e| match e {
        Error::StateSpaceTooLarge { limit } => Error::CannotCertifySteps(format!(
            "more than {limit} completions; supply an explicit step count"
        )),
        other => other,
    })?;
    Ok(mixing_profile(&matrix, bias)?.t_mix)
}

/// Almost-uniform sample: within total variation `bias` of uniform whenever
/// `steps` is at least the mixing time at `bias`. Without `steps` the mixing
/// time is computed exactly, which needs a small state space.
pub fn fpaus_sample(
    start: &PreTableau,
    bias: &BigRational,
    steps: Option<usize>,
    rng: &mut RngStream,
) -> Result<PreTableau> {
    check_bias(bias)?;
    let steps = match steps {
        Some(t) => t,
        None => certify_steps(start, bias)?,
    };
    run_chain(start, steps, rng)
}

pub(crate) fn check_bias(bias: &BigRational) -> Result<()> {
    if !bias.is_positive() || *bias > BigRational::one() {
        return Err(Error::InvalidParameter("bias must lie in (0, 1]".to_string()));
    }
    Ok(())
}

/// Uniform row vector over `n` states.
pub fn uniform_row(n: usize) -> Vec<BigRational> {
    vec![BigRational::from_ratio(&BigUint::one(), &BigUint::from(n)); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes::Partition;

    fn p(rows: &[usize]) -> Partition {
        Partition::new(rows.to_vec()).unwrap()
    }

    fn q(n: u64, d: u64) -> BigRational {
        BigRational::from_counts(n, d)
    }

    fn empty(rows: &[usize], n: usize) -> PreTableau {
        PreTableau::empty(&p(rows), n).unwrap()
    }

    #[test]
    fn single_state_chain_stays() {
        let start = empty(&[1], 4);
        let mut state = ChainState::new(start.clone(), RngStream::new(1)).unwrap();
        let first = state.current().clone();
        for _ in 0..20 {
            state.step().unwrap();
            assert_eq!(state.current(), &first);
        }
        assert_eq!(state.step_count(), 20);
        let m = build_transition_matrix(&start).unwrap();
        assert_eq!(m.entries, vec![vec![q(1, 1)]]);
        assert_eq!(conductance(&m).unwrap(), q(1, 1));
        assert_eq!(mixing_profile(&m, &q(1, 100)).unwrap().t_mix, 0);
    }

    #[test]
    fn two_state_row() {
        let m = build_transition_matrix(&empty(&[2], 3)).unwrap();
        let half = q(1, 2);
        assert_eq!(m.entries, vec![vec![half.clone(), half.clone()], vec![half.clone(), half.clone()]]);
        assert_eq!(conductance(&m).unwrap(), half);
        let profile = mixing_profile(&m, &q(1, 100)).unwrap();
        assert_eq!(profile.t_mix, 1);
        assert_eq!(profile.tv_curve, vec![q(1, 2), q(0, 1)]);
    }

    #[test]
    fn acceptance_ratio() {
        assert_eq!(acceptance_probability(&q(1, 6), &q(1, 12)), q(1, 1));
        assert_eq!(acceptance_probability(&q(1, 12), &q(1, 6)), q(1, 2));
    }

    #[test]
    fn bernoulli_frequency() {
        let mut rng = RngStream::new(5);
        let n = 30_000;
        let hits = (0..n).filter(|_| bernoulli(&q(1, 3), &mut rng)).count();
        assert!((hits as f64 / n as f64 - 1.0 / 3.0).abs() < 0.015);
        let tiny = BigRational::new(BigInt::one(), BigInt::from(10u32).pow(40));
        assert!(!(0..100).any(|_| bernoulli(&tiny, &mut rng)));
    }

    #[test]
    fn two_one_four_chain() {
        let m = build_transition_matrix(&empty(&[2, 1], 4)).unwrap();
        assert_eq!(m.len(), 8);
        let phi = conductance(&m).unwrap();
        assert!(phi >= q(1, 3), "{phi}");
        let profile = mixing_profile(&m, &q(1, 100)).unwrap();
        assert!(profile.tv_curve.windows(2).all(|w| w[1] <= w[0]));
        assert!((profile.t_mix as f64) <= profile.bound_upper.unwrap().ceil());
    }

    #[test]
    fn run_chain_reaches_every_state() {
        let start = empty(&[2, 1], 4);
        let mut rng = RngStream::new(11);
        let mut seen = std::collections::BTreeSet::new();
        for _ in 0..400 {
            seen.insert(run_chain(&start, 3, &mut rng).unwrap().key());
        }
        assert_eq!(seen.len(), 8);
    }

    #[test]
    fn fpaus_certification() {
        let mut rng = RngStream::new(2);
        let t = fpaus_sample(&empty(&[2], 3), &q(1, 100), None, &mut rng).unwrap();
        assert_eq!(t.level(), 0);
        assert_eq!(certify_steps(&empty(&[2], 3), &q(1, 100)).unwrap(), 1);
        let big = empty(&[5, 5, 5], 40);
        assert!(matches!(
            fpaus_sample(&big, &q(1, 100), None, &mut rng),
            Err(Error::CannotCertifySteps(_))
        ));
        assert!(fpaus_sample(&big, &q(1, 100), Some(2), &mut rng).is_ok());
        assert!(matches!(
            fpaus_sample(&empty(&[2], 3), &q(0, 1), None, &mut rng),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn conductance_guard() {
        let m = build_transition_matrix(&empty(&[2, 2], 6)).unwrap();
        assert!(m.len() > CONDUCTANCE_STATE_LIMIT);
        assert!(matches!(conductance(&m), Err(Error::StateSpaceTooLarge { .. })));
        let profile = mixing_profile(&m, &q(1, 100)).unwrap();
        assert!(profile.conductance.is_none());
    }
}
