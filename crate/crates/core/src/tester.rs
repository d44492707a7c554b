//! The tester: cube generation, the main loop and its invariants.
//!
//! State is a set `S` of certified-relevant variables and a FIFO queue of
//! relevant cubes whose free coordinates are pairwise disjoint and disjoint
//! from `S`. Each iteration either creates a cube, turns a cube into relevant
//! variables by Fourier sampling, or splits a cube into two smaller relevant
//! cubes. The loop rejects once `|S| + |𝓑| > k`, which certifies more than
//! `k` relevant variables.

use std::collections::VecDeque;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BooleanFunction, Cube, IndexSet};
use crate::oracles::{MembershipOracle, QueryLedger, SampleOracle};
use crate::quantum::{self, ceil_slack, validate_eps};
use crate::{Error, Result};

/// Iterations allowed per unit of `k`.
pub const ITERATION_FACTOR: u64 = 18;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Classical,
    Amplified,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Variant::Classical),
            "amplified" => Ok(Variant::Amplified),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    GeneratedCube,
    GenerateFailed,
    FourierNonempty,
    /// `f(z) = f(t) = f(y)`: the cube is replaced by `(x,z)` and `(x,t)`.
    SplitTowardX,
    /// `f(z) = f(t) = f(x)`: the cube is replaced by `(z,y)` and `(t,y)`.
    SplitTowardY,
    NoProgress,
}

/// One line of the per-iteration trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub iteration: u64,
    pub action: Action,
    /// `2|S| + |𝓑|` after the iteration.
    pub potential: u64,
    /// `S` after the iteration.
    pub selected: IndexSet,
    /// `|𝓑|` after the iteration.
    pub cubes: usize,
}

/// A cube in the queue together with the known value `f(x)` at its first corner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct HeldCube {
    pub cube: Cube,
    pub value_at_x: bool,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct TesterState {
    selected: IndexSet,
    cubes: VecDeque<HeldCube>,
    iteration: u64,
    trace: Vec<TraceRecord>,
}

impl TesterState {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds an arbitrary state, e.g. to exercise [`check_invariants`].
    pub fn from_parts(selected: IndexSet, cubes: Vec<HeldCube>) -> Self {
        TesterState { selected, cubes: cubes.into(), iteration: 0, trace: Vec::new() }
    }

    pub fn selected(&self) -> IndexSet {
        self.selected
    }

    pub fn cubes(&self) -> impl Iterator<Item = &HeldCube> {
        self.cubes.iter()
    }

    pub fn cube_count(&self) -> usize {
        self.cubes.len()
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn trace(&self) -> &[TraceRecord] {
        &self.trace
    }

    /// `|S| + |𝓑|`.
    pub fn size(&self) -> usize {
        self.selected.len() + self.cubes.len()
    }

    /// `2|S| + |𝓑|`.
    pub fn potential(&self) -> u64 {
        (2 * self.selected.len() + self.cubes.len()) as u64
    }

    fn structurally_sound(&self) -> bool {
        let mut seen = self.selected;
        for held in &self.cubes {
            let free = held.cube.disagreement();
            if free.is_empty() || !free.is_disjoint(&seen) {
                return false;
            }
            seen = seen.union(&free);
        }
        true
    }

    fn record(&mut self, action: Action) {
        self.iteration += 1;
        self.trace.push(TraceRecord {
            iteration: self.iteration,
            action,
            potential: self.potential(),
            selected: self.selected,
            cubes: self.cubes.len(),
        });
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub decision: Decision,
    pub ledger: QueryLedger,
    pub final_state: TesterState,
}

/// Attempts per classical cube generation, `⌈2/eps⌉`.
pub fn generate_attempts(eps: f64) -> u64 {
    ceil_slack(2.0 / eps)
}

/// Worst-case ledger of a completed run.
pub fn run_budget(k: usize, eps: f64, variant: Variant) -> QueryLedger {
    let iterations = ITERATION_FACTOR * k as u64;
    match variant {
        Variant::Classical => {
            let attempts = generate_attempts(eps);
            QueryLedger {
                classical_queries: iterations * (2 * attempts + 2),
                classical_samples: iterations * attempts,
                quantum_queries: iterations,
            }
        }
        Variant::Amplified => QueryLedger {
            classical_queries: iterations * 2,
            classical_samples: 0,
            quantum_queries: iterations * quantum::amplification_budget(eps),
        },
    }
}

impl QueryLedger {
    /// Every counter is at most the corresponding counter of `bound`.
    pub fn within(&self, bound: &QueryLedger) -> bool {
        self.classical_queries <= bound.classical_queries
            && self.classical_samples <= bound.classical_samples
            && self.quantum_queries <= bound.quantum_queries
    }
}

fn generate_valued<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    selected: &IndexSet,
    eps: f64,
    rng: &mut R,
) -> Result<Option<HeldCube>> {
    validate_eps(eps)?;
    let n = oracle.n();
    if sampler.n() != n {
        return Err(Error::DimensionMismatch { expected: n, actual: sampler.n() });
    }
    selected.check_within(n)?;
    let free = IndexSet::full(n).difference(selected).mask();
    for _ in 0..generate_attempts(eps) {
        let x = sampler.draw(rng);
        let t = IndexSet::from_mask(rng.random::<u32>() & free);
        let y = x.flip(&t)?;
        let fx = oracle.query(&x)?;
        let fy = oracle.query(&y)?;
        if fx != fy {
            return Ok(Some(HeldCube { cube: Cube::new(x, y)?, value_at_x: fx }));
        }
    }
    Ok(None)
}

/// Classical cube generation: up to `⌈2/eps⌉` attempts, each drawing
/// `x ∼ 𝓓` and a uniform `T ⊆ [n]∖S` and comparing `f(x)` with `f(x^T)`.
///
/// Any returned cube is relevant and its free coordinates avoid `S`.
pub fn generate_cube<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    selected: &IndexSet,
    eps: f64,
    rng: &mut R,
) -> Result<Option<Cube>> {
    Ok(generate_valued(oracle, sampler, selected, eps, rng)?.map(|h| h.cube))
}

/// Runs exactly one loop iteration and returns what it did.
pub fn step<R: Rng + ?Sized>(
    state: &mut TesterState,
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    k: usize,
    eps: f64,
    variant: Variant,
    rng: &mut R,
) -> Result<Action> {
    if state.size() > k {
        return Err(Error::Precondition(format!("|S| + |B| = {} exceeds k = {k}", state.size())));
    }
    if !state.structurally_sound() {
        return Err(Error::Precondition("cubes overlap S or each other".into()));
    }

    let action = match state.cubes.front().copied() {
        None => {
            let generated = match variant {
                Variant::Classical => generate_valued(oracle, sampler, &state.selected, eps, rng)?,
                Variant::Amplified => {
                    quantum::amplified_generate_valued(oracle, sampler, &state.selected, eps, rng)?
                        .map(|(cube, value_at_x)| HeldCube { cube, value_at_x })
                }
            };
            match generated {
                Some(held) => {
                    state.cubes.push_back(held);
                    Action::GeneratedCube
                }
                None => Action::GenerateFailed,
            }
        }
        Some(held) => {
            let Cube { x, y } = held.cube;
            let t = quantum::fourier_sample(oracle, &held.cube, rng)?;
            if !t.is_empty() {
                state.cubes.pop_front();
                state.selected = state.selected.union(&t);
                Action::FourierNonempty
            } else {
                let free = held.cube.disagreement();
                let t = IndexSet::from_mask(rng.random::<u32>() & free.mask());
                let z = x.flip(&t)?;
                let w = y.flip(&t)?;
                let fz = oracle.query(&z)?;
                let fw = oracle.query(&w)?;
                let fx = held.value_at_x;
                if fz == fw && fz != fx {
                    state.cubes.pop_front();
                    state.cubes.push_back(HeldCube { cube: Cube::new(x, z)?, value_at_x: fx });
                    state.cubes.push_back(HeldCube { cube: Cube::new(x, w)?, value_at_x: fx });
                    Action::SplitTowardX
                } else if fz == fw {
                    state.cubes.pop_front();
                    state.cubes.push_back(HeldCube { cube: Cube::new(z, y)?, value_at_x: fx });
                    state.cubes.push_back(HeldCube { cube: Cube::new(w, y)?, value_at_x: fx });
                    Action::SplitTowardY
                } else {
                    Action::NoProgress
                }
            }
        }
    };
    state.record(action);
    Ok(action)
}

fn validate_run(n: usize, k: usize, eps: f64) -> Result<()> {
    validate_eps(eps)?;
    if k < 1 || k >= n {
        return Err(Error::InvalidParameter(format!("k must satisfy 1 <= k < n = {n}, got {k}")));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn run_loop<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    k: usize,
    eps: f64,
    variant: Variant,
    max_iterations: u64,
    rng: &mut R,
    mut observe: impl FnMut(&TesterState),
) -> Result<Verdict> {
    validate_run(oracle.n(), k, eps)?;
    if sampler.n() != oracle.n() {
        return Err(Error::DimensionMismatch { expected: oracle.n(), actual: sampler.n() });
    }
    let mut state = TesterState::new();
    while state.size() <= k && state.iteration < max_iterations {
        step(&mut state, oracle, sampler, k, eps, variant, rng)?;
        observe(&state);
    }
    let decision = if state.size() > k { Decision::Reject } else { Decision::Accept };
    Ok(Verdict { decision, ledger: oracle.ledger(), final_state: state })
}

/// Runs the tester from `S = ∅, 𝓑 = ∅` for at most `18k` iterations.
pub fn run_tester<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    k: usize,
    eps: f64,
    variant: Variant,
    rng: &mut R,
) -> Result<Verdict> {
    run_tester_observed(oracle, sampler, k, eps, variant, rng, |_| {})
}

/// As [`run_tester`], calling `observe` after every iteration.
pub fn run_tester_observed<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    k: usize,
    eps: f64,
    variant: Variant,
    rng: &mut R,
    observe: impl FnMut(&TesterState),
) -> Result<Verdict> {
    let cap = ITERATION_FACTOR * k as u64;
    run_loop(oracle, sampler, k, eps, variant, cap, rng, observe)
}

/// Runs with a custom iteration cap instead of `18k`.
#[cfg(feature = "experiments")]
pub fn run_tester_with_cap<R: Rng + ?Sized>(
    oracle: &MembershipOracle<'_>,
    sampler: &SampleOracle<'_>,
    k: usize,
    eps: f64,
    variant: Variant,
    max_iterations: u64,
    rng: &mut R,
) -> Result<Verdict> {
    run_loop(oracle, sampler, k, eps, variant, max_iterations, rng, |_| {})
}

/// White-box check of every state invariant against the truth table.
pub fn check_invariants(state: &TesterState, f: &BooleanFunction) -> bool {
    let relevant = f.relevant_variables();
    if !state.selected.is_subset(&relevant) {
        return false;
    }
    let cubes_ok = state.cubes.iter().all(|h| {
        let c = &h.cube;
        c.dim() == f.n()
            && !c.disagreement().is_empty()
            && f.eval_index(c.x.value()) == h.value_at_x
            && f.eval_index(c.x.value()) != f.eval_index(c.y.value())
    });
    cubes_ok && state.structurally_sound()
}
