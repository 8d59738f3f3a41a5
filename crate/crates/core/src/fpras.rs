//! Approximate counting by telescoping ratios.
//!
//! Starting from a pre-tableau `S` at level `k`, each level `m = k..1` draws
//! almost-uniform completions of the current pre-tableau `S_m`, groups them by
//! their restriction to level `m-1`, keeps the most popular group as `S_{m-1}`,
//! and records the fraction of samples that fell into it. The product of those
//! fractions estimates `1 / |SVT(λ, N, S)|` because `S_0` is a single tableau.
//! Independent repetitions are combined by taking the median.

use std::collections::{BTreeMap, HashMap};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::chain::{certify_steps, check_bias, run_chain_cached, ProposalCache};
use crate::error::{Error, Result};
use crate::oracle::{enumerate_svt, uniform_sample, EnumerationResult};
use crate::rng::RngStream;
use crate::scalar::ratio_string;
use crate::tableaux::{PreTableau, TableauKey};

/// Where each level's samples come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampleSource {
    /// The Metropolis chain, i.e. the almost-uniform sampler.
    Metropolis,
    /// Exactly uniform draws from an exhaustive enumeration (small instances only).
    ExactUniform,
}

#[derive(Clone, Debug)]
pub struct FprasParams {
    pub epsilon: f64,
    pub delta: f64,
    pub samples_override: Option<usize>,
    pub steps_per_sample: Option<usize>,
    pub seed: u64,
    /// Estimate each ratio from a second batch instead of the batch that chose the group.
    pub fresh_batch: bool,
    pub source: SampleSource,
}

impl FprasParams {
    pub fn new(epsilon: f64, delta: f64, seed: u64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} not in (0, 1]")));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1]")));
        }
        Ok(FprasParams {
            epsilon,
            delta,
            samples_override: None,
            steps_per_sample: None,
            seed,
            fresh_batch: false,
            source: SampleSource::Metropolis,
        })
    }

    pub fn with_samples(mut self, samples: usize) -> Result<Self> {
        if samples == 0 {
            return Err(Error::ZeroSamples);
        }
        self.samples_override = Some(samples);
        Ok(self)
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps_per_sample = Some(steps);
        self
    }

    pub fn with_fresh_batch(mut self, fresh: bool) -> Self {
        self.fresh_batch = fresh;
        self
    }

    pub fn with_source(mut self, source: SampleSource) -> Self {
        self.source = source;
        self
    }

    /// The accuracy actually targeted per level, leaving slack for compounding over levels.
    pub fn internal_epsilon(&self) -> f64 {
        self.epsilon / 2.0
    }

    /// Median-of-repetitions count, `ceil(12 ln(1/δ))`, at least one.
    pub fn repetitions(&self) -> usize {
        ((12.0 * (1.0 / self.delta).ln()).ceil() as usize).max(1)
    }
}

/// Sampler bias `ε / (20 |λ∖S| k)` for a start with `empty` empty cells at level `k`.
pub fn level_bias(epsilon: f64, empty: usize, level: usize) -> BigRational {
    let eps = BigRational::from_float(epsilon).expect("finite epsilon");
    eps / BigRational::from_integer(BigInt::from(20 * empty.max(1) * level.max(1)))
}

/// Samples per level sufficient for the concentration argument:
/// `max(8k a², 3 a² |λ∖S| / (1-ε) · ln(16k))` with `a = 20 |λ∖S| k / ε`.
pub fn theoretical_samples(epsilon: f64, empty: usize, level: usize) -> f64 {
    let (e, k) = (empty.max(1) as f64, level.max(1) as f64);
    let a = 20.0 * e * k / epsilon;
    let chebyshev = 8.0 * k * a * a;
    let chernoff = 3.0 * a * a * e / (1.0 - epsilon) * (16.0 * k).ln();
    chebyshev.max(chernoff).ceil()
}

/// One level of one repetition.
#[derive(Clone, Debug)]
pub struct LevelRecord {
    pub m: usize,
    /// The chosen level `m-1` pre-tableau.
    pub chosen: PreTableau,
    pub x: usize,
    pub s: usize,
    pub ratio: BigRational,
    /// Chain steps per sample, when the chain was used.
    pub steps: Option<usize>,
    pub elapsed: Duration,
}

impl LevelRecord {
    pub fn key(&self) -> TableauKey {
        self.chosen.key()
    }
}

#[derive(Clone, Debug)]
pub struct CountEstimate {
    pub estimate: BigRational,
    /// Levels of the median repetition, from `m = k` down to 1.
    pub per_level: Vec<LevelRecord>,
    pub repetitions: usize,
    pub repetition_estimates: Vec<BigRational>,
    pub seed: u64,
    pub samples: usize,
    pub bias: BigRational,
    pub elapsed: Duration,
}

impl CountEstimate {
    /// Timings are left out so that equal seeds give identical output.
    pub fn to_json(&self) -> Value {
        json!({
            "estimate": ratio_string(&self.estimate),
            "levels": self.per_level.iter().map(|l| json!({
                "m": l.m,
                "x": l.x,
                "s": l.s,
                "ratio": ratio_string(&l.ratio),
                "steps": l.steps,
                "tableau": l.chosen.to_json(),
            })).collect::<Vec<_>>(),
            "reps": self.repetitions,
            "seed": self.seed,
        })
    }

    pub fn estimate_f64(&self) -> f64 {
        self.estimate.to_f64().unwrap_or(f64::NAN)
    }
}

/// How a level draws its samples.
enum LevelSampler {
    Chain { steps: usize, cache: ProposalCache },
    Uniform(EnumerationResult),
}

impl LevelSampler {
    fn draw(&mut self, start: &PreTableau, rng: &mut RngStream) -> Result<PreTableau> {
        match self {
            LevelSampler::Chain { steps, cache } => run_chain_cached(start, *steps, rng, cache),
            LevelSampler::Uniform(all) => uniform_sample(all, rng),
        }
    }

    fn steps(&self) -> Option<usize> {
        match self {
            LevelSampler::Chain { steps, .. } => Some(*steps),
            LevelSampler::Uniform(_) => None,
        }
    }
}

/// Outcome of [`level_ratio`].
#[derive(Clone, Debug)]
pub struct LevelOutcome {
    pub chosen: PreTableau,
    pub x: usize,
    pub s: usize,
    pub ratio: BigRational,
}

fn modal_group(start: &PreTableau, samples: &[PreTableau]) -> Result<(PreTableau, usize)> {
    let below = start.level() - 1;
    let mut groups: BTreeMap<TableauKey, (PreTableau, usize)> = BTreeMap::new();
    for t in samples {
        let a = t.restrict(below)?;
        groups.entry(a.key()).or_insert((a, 0)).1 += 1;
    }
    // ties resolve to the lowest key: strict comparison keeps the first maximum
    let mut best: Option<(PreTableau, usize)> = None;
    for (a, count) in groups.into_values() {
        if best.as_ref().is_none_or(|(_, c)| count > *c) {
            best = Some((a, count));
        }
    }
    best.ok_or(Error::ZeroSamples)
}

fn run_level(
    start: &PreTableau,
    samples: usize,
    sampler: &mut LevelSampler,
    fresh_batch: bool,
    rng: &mut RngStream,
) -> Result<LevelOutcome> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    if start.level() == 0 {
        return Err(Error::LevelOutOfRange {
            level: 0,
            low: 1,
            high: start.capacity(),
        });
    }
    let refinements = start.refinements();
    if refinements.len() == 1 {
        // every completion lies in the single refinement
        let chosen = refinements.into_iter().next().expect("one refinement");
        return Ok(LevelOutcome {
            chosen,
            x: samples,
            s: samples,
            ratio: BigRational::one(),
        });
    }
    let batch = (0..samples)
        .map(|_| sampler.draw(start, rng))
        .collect::<Result<Vec<_>>>()?;
    let (chosen, mut x) = modal_group(start, &batch)?;
    if fresh_batch {
        x = 0;
        for _ in 0..samples {
            if chosen.is_contained_in(&sampler.draw(start, rng)?)? {
                x += 1;
            }
        }
    }
    if x == 0 {
        return Err(Error::ZeroRatio(start.level()));
    }
    Ok(LevelOutcome {
        chosen,
        x,
        s: samples,
        ratio: BigRational::new(BigInt::from(x), BigInt::from(samples)),
    })
}

/// One level with samples from the Metropolis chain at `steps` steps, or at the
/// exactly certified mixing time for `bias` when `steps` is `None`.
pub fn level_ratio(
    start: &PreTableau,
    samples: usize,
    bias: &BigRational,
    steps: Option<usize>,
    rng: &mut RngStream,
) -> Result<LevelOutcome> {
    check_bias(bias)?;
    let steps = match steps {
        Some(t) => t,
        None => certify_steps(start, bias)?,
    };
    let mut sampler = LevelSampler::Chain {
        steps,
        cache: ProposalCache::new(),
    };
    run_level(start, samples, &mut sampler, false, rng)
}

/// [`level_ratio`] with exactly uniform samples.
pub fn level_ratio_uniform(start: &PreTableau, samples: usize, rng: &mut RngStream) -> Result<LevelOutcome> {
    let mut sampler = LevelSampler::Uniform(enumerate_svt(start)?);
    run_level(start, samples, &mut sampler, false, rng)
}

struct Counter<'a> {
    params: &'a FprasParams,
    samples: usize,
    bias: BigRational,
    certified: Mutex<HashMap<TableauKey, usize>>,
}

impl Counter<'_> {
    fn sampler_for(&self, start: &PreTableau) -> Result<LevelSampler> {
        match self.params.source {
            SampleSource::ExactUniform => Ok(LevelSampler::Uniform(enumerate_svt(start)?)),
            SampleSource::Metropolis => {
                let steps = match self.params.steps_per_sample {
                    Some(t) => t,
                    None => {
                        let key = start.key();
                        let known = self.certified.lock().expect("poisoned").get(&key).copied();
                        match known {
                            Some(t) => t,
                            None => {
                                let t = certify_steps(start, &self.bias)?;
                                self.certified.lock().expect("poisoned").insert(key, t);
                                t
                            }
                        }
                    }
                };
                Ok(LevelSampler::Chain {
                    steps,
                    cache: ProposalCache::new(),
                })
            }
        }
    }

    fn repetition(&self, start: &PreTableau, mut rng: RngStream) -> Result<(BigRational, Vec<LevelRecord>)> {
        let mut current = start.clone();
        let mut levels = Vec::with_capacity(start.level());
        let mut product = BigRational::one();
        while current.level() > 0 {
            let began = Instant::now();
            let mut sampler = self.sampler_for(&current)?;
            let outcome = run_level(&current, self.samples, &mut sampler, self.params.fresh_batch, &mut rng)?;
            product *= &outcome.ratio;
            levels.push(LevelRecord {
                m: current.level(),
                chosen: outcome.chosen.clone(),
                x: outcome.x,
                s: outcome.s,
                ratio: outcome.ratio,
                steps: sampler.steps(),
                elapsed: began.elapsed(),
            });
            current = outcome.chosen;
        }
        if product.is_zero() {
            return Err(Error::ZeroRatio(0));
        }
        Ok((product.recip(), levels))
    }
}

/// Estimates `|SVT(λ, N, start)|` to within a factor `1 ± ε` with probability
/// at least `1 - δ`, provided each level's sampler is within its bias of uniform.
pub fn fpras_count(start: &PreTableau, params: &FprasParams) -> Result<CountEstimate> {
    let began = Instant::now();
    let level = start.level();
    let empty = start.empty_region().size();
    let eps = params.internal_epsilon();
    let bias = level_bias(eps, empty, level);
    let theoretical = theoretical_samples(eps, empty, level);
    let samples = match params.samples_override {
        Some(s) => {
            if (s as f64) < theoretical {
                log::warn!(
                    "using {s} samples per level instead of {theoretical}; the (epsilon, delta) guarantee is not certified"
                );
            }
            s
        }
        None => theoretical.to_usize().ok_or_else(|| {
            Error::InvalidParameter(format!("theoretical sample size {theoretical} is not representable"))
        })?,
    };
    let counter = Counter {
        params,
        samples,
        bias: bias.clone(),
        certified: Mutex::new(HashMap::new()),
    };
    let reps = params.repetitions();
    let root = RngStream::new(params.seed);
    let mut outcomes = (0..reps)
        .into_par_iter()
        .map(|i| counter.repetition(start, root.substream(i as u64 + 1)))
        .collect::<Result<Vec<_>>>()?;
    let repetition_estimates: Vec<BigRational> = outcomes.iter().map(|(e, _)| e.clone()).collect();
    let mut order: Vec<usize> = (0..reps).collect();
    order.sort_by(|&a, &b| repetition_estimates[a].cmp(&repetition_estimates[b]).then(a.cmp(&b)));
    let median = order[(reps - 1) / 2];
    let (estimate, per_level) = outcomes.swap_remove(median);
    Ok(CountEstimate {
        estimate,
        per_level,
        repetitions: reps,
        repetition_estimates,
        seed: params.seed,
        samples,
        bias,
        elapsed: began.elapsed(),
    })
}

/// Exact `|SVT(λ, N, start)|` by enumeration, for comparison.
pub fn exact_count(start: &PreTableau) -> Result<BigUint> {
    Ok(enumerate_svt(start)?.count)
}
