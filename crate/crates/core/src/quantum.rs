//! Exact simulation of the quantum subroutines.
//!
//! Fourier sampling on a subcube is simulated from the exact restricted
//! spectrum: the outcome `T ⊆ I(B)` is drawn with probability `f̂(T)²` using
//! integer weights `W_T²` out of `4^m`, so the sampler has no rounding bias.
//!
//! The amplified cube generator works at the level of success probabilities.
//! A stage of amplitude amplification with `r` reflections succeeds with
//! probability `sin²((2r+1)·θ)`, `θ = arcsin √p`, where `p` is the exact
//! per-attempt success probability of one classical cube-generation attempt.

use rand::Rng;

use crate::boolfn::{extract, BooleanFunction, Cube, IndexSet, RestrictedSpectrum};
use crate::distribution::Distribution;
use crate::oracles::{MembershipOracle, SampleOracle};
use crate::{Error, Result, M_MAX};

pub(crate) fn validate_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(())
}

/// `⌈v⌉`, forgiving representation error just above an integer (`2/0.04`).
pub(crate) fn ceil_slack(v: f64) -> u64 {
    (v - 1e-9).ceil().max(1.0) as u64
}

/// Draws a subset of `I(B)` with probability `f̂(T)²`.
pub fn sample_spectrum<R: Rng + ?Sized>(spectrum: &RestrictedSpectrum, rng: &mut R) -> IndexSet {
    let m = spectrum.free_dim();
    let total = 1u64 << (2 * m);
    let u = rng.random_range(0..total);
    let mut acc = 0u64;
    for s in 0..spectrum.len() as u32 {
        acc += spectrum.squared_weight_local(s);
        if u < acc {
            return spectrum.to_global(s);
        }
    }
    unreachable!("squared weights sum to 4^m")
}

/// Fourier sampling of `f` restricted to `cube`. Costs one quantum query.
pub fn fourier_sample<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    cube: &Cube,
    rng: &mut R,
) -> Result<IndexSet> {
    if cube.dim() != oracle.n() {
        return Err(Error::DimensionMismatch { expected: oracle.n(), actual: cube.dim() });
    }
    if cube.is_degenerate() {
        return Err(Error::DegenerateCube);
    }
    if cube.free_dim() > M_MAX {
        return Err(Error::CubeTooLarge(cube.free_dim()));
    }
    let spectrum = oracle.simulator_function().restricted_spectrum(cube)?;
    oracle.charge_quantum(1)?;
    Ok(sample_spectrum(&spectrum, rng))
}

/// Exact `Pr_{x∼𝓓, T⊆[n]∖S}[f(x) ≠ f(x^T)]` for one cube-generation attempt.
///
/// For fixed `x`, `x^T` is uniform on the subcube through `x` spanned by
/// `[n]∖S`, so one pass counting ones per `S`-projection suffices.
pub fn attempt_success_probability(
    f: &BooleanFunction,
    dist: &Distribution,
    selected: &IndexSet,
) -> Result<f64> {
    if f.n() != dist.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: dist.n() });
    }
    selected.check_within(f.n())?;
    let n = f.n();
    let s_mask = selected.mask();
    let mut ones = vec![0u64; 1 << selected.len()];
    for z in 0..1u32 << n {
        if f.eval_index(z) {
            ones[extract(z, s_mask) as usize] += 1;
        }
    }
    let size = (1u64 << (n - selected.len())) as f64;
    Ok(dist
        .support()
        .map(|(x, w)| {
            let c = ones[extract(x, s_mask) as usize] as f64;
            let differ = if f.eval_index(x) { size - c } else { c };
            w * differ / size
        })
        .sum())
}

/// Success probability of an amplification stage with `reflections` rounds.
pub fn stage_success_probability(p: f64, reflections: u64) -> f64 {
    let theta = p.clamp(0.0, 1.0).sqrt().asin();
    let s = ((2 * reflections + 1) as f64 * theta).sin();
    (s * s).clamp(0.0, 1.0)
}

/// Total quantum budget of one amplified invocation, `⌈4/√eps⌉`.
pub fn amplification_budget(eps: f64) -> u64 {
    ceil_slack(4.0 / eps.sqrt())
}

/// Reflection counts per stage: an unamplified probe (`r = 0`, charged one
/// oracle execution) followed by `r_j = ⌈2^{j/2}⌉`, `j = 0, 1, …`, while the
/// running charge stays within [`amplification_budget`].
pub fn amplification_schedule(eps: f64) -> Vec<u64> {
    let budget = amplification_budget(eps);
    let mut stages = vec![0];
    let mut spent = 1;
    for j in 0.. {
        let r = ceil_slack(2f64.powf(j as f64 / 2.0));
        if spent + r > budget {
            break;
        }
        stages.push(r);
        spent += r;
    }
    stages
}

/// Oracle executions charged for a stage.
pub fn stage_charge(reflections: u64) -> u64 {
    reflections.max(1)
}

/// Probability that every stage of the schedule fails.
pub fn amplified_failure_probability(p: f64, eps: f64) -> f64 {
    amplification_schedule(eps)
        .into_iter()
        .map(|r| 1.0 - stage_success_probability(p, r))
        .product()
}

/// Amplitude-amplified cube generation.
///
/// Runs the stages of [`amplification_schedule`], charging each stage's
/// reflections as quantum queries. On the first successful stage a relevant
/// cube `(x, x^T)` with `I ∩ S = ∅` is drawn from the conditional
/// distribution of successful attempts. Those rejection draws are simulation
/// bookkeeping and are not charged.
pub fn amplified_generate_cube<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    selected: &IndexSet,
    eps: f64,
    rng: &mut R,
) -> Result<Option<Cube>> {
    Ok(amplified_generate_valued(oracle, sampler, selected, eps, rng)?.map(|(c, _)| c))
}

/// As [`amplified_generate_cube`], also returning `f(x)` from the measured
/// register of the successful stage.
pub(crate) fn amplified_generate_valued<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    selected: &IndexSet,
    eps: f64,
    rng: &mut R,
) -> Result<Option<(Cube, bool)>> {
    validate_eps(eps)?;
    if oracle.n() != sampler.n() {
        return Err(Error::DimensionMismatch { expected: oracle.n(), actual: sampler.n() });
    }
    let f = oracle.simulator_function();
    let dist = sampler.simulator_distribution();
    let p = attempt_success_probability(f, dist, selected)?;
    for r in amplification_schedule(eps) {
        oracle.charge_quantum(stage_charge(r))?;
        if rng.random_bool(stage_success_probability(p, r)) {
            let cube = conditional_success_cube(f, dist, selected, rng);
            return Ok(Some((cube, f.eval_index(cube.x.value()))));
        }
    }
    Ok(None)
}

fn conditional_success_cube<R: Rng + ?Sized>(
    f: &BooleanFunction,
    dist: &Distribution,
    selected: &IndexSet,
    rng: &mut R,
) -> Cube {
    let free = IndexSet::full(f.n()).difference(selected).mask();
    loop {
        let x = dist.sample(rng);
        let t = IndexSet::from_mask(rng.random::<u32>() & free);
        let y = x.flip(&t).expect("T within [n]");
        if f.eval_index(x.value()) != f.eval_index(y.value()) {
            return Cube::new(x, y).expect("same dimension");
        }
    }
}
