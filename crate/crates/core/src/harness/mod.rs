//! Fixtures, seeded Monte Carlo trials and reporting.
//!
//! Trial `i` of an experiment draws from its own stream seeded with
//! [`stream_seed`]`(master_seed, i)`, so results do not depend on scheduling
//! and identical configs produce byte-identical reports.

mod fixtures;
mod stats;

pub use fixtures::{
    gen_far_fixture, gen_random_function, gen_random_junta, gen_sparse_distribution, FarFamily, Fixture,
    FAR_FIXTURE_RETRIES,
};
pub use stats::{wilson_interval, Aggregate, Z_99};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BitString, IndexSet};
use crate::distribution::Distribution;
use crate::oracles::{Ledger, MembershipOracle, QueryLedger, SampleOracle};
use crate::quantum::validate_eps;
use crate::tester::{run_budget, run_tester, Decision, Variant, Verdict};
use crate::{Error, Result, N_MAX};

/// Stream index reserved for one-off fixture generation.
const FIXTURE_STREAM: u64 = u64::MAX;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of stream `index` under `master`.
pub fn stream_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

pub fn stream_rng(master: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_seed(master, index))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Uniform,
    /// `support` random points with random weights.
    RandomSparse { support: usize },
    PointMass,
    /// Random positive weight on every point.
    RandomDense,
}

impl DistributionSpec {
    pub fn generate<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Distribution> {
        match *self {
            DistributionSpec::Uniform => Distribution::uniform(n),
            DistributionSpec::RandomSparse { support } => gen_sparse_distribution(n, support, rng),
            DistributionSpec::PointMass => {
                Distribution::point_mass(BitString::new(rng.random::<u32>() & IndexSet::full(n).mask(), n)?)
            }
            DistributionSpec::RandomDense => {
                Distribution::dense(n, (0..1usize << n).map(|_| 1.0 - rng.random::<f64>()).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FixtureSpec {
    /// Fresh random `k`-junta per trial.
    RandomJunta { distribution: DistributionSpec },
    /// One certified far fixture shared by all trials.
    Far { family: FarFamily },
    /// Fresh random function per trial under the given distribution; no
    /// distance claim. Point masses make these adversarial for the tester.
    Arbitrary { distribution: DistributionSpec },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub eps: f64,
    pub trials: u64,
    pub master_seed: u64,
    #[serde(default = "default_variant")]
    pub variant: Variant,
    pub fixture: FixtureSpec,
}

fn default_variant() -> Variant {
    Variant::Classical
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n > N_MAX || self.k < 1 || self.k >= self.n {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= k < n <= {N_MAX}, got n = {}, k = {}",
                self.n, self.k
            )));
        }
        validate_eps(self.eps)?;
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        Ok(())
    }

    fn is_far(&self) -> bool {
        matches!(self.fixture, FixtureSpec::Far { .. })
    }

    /// The shared fixture, if the spec uses one.
    pub fn shared_fixture(&self) -> Result<Option<Fixture>> {
        match self.fixture {
            FixtureSpec::Far { family } => {
                let mut rng = stream_rng(self.master_seed, FIXTURE_STREAM);
                gen_far_fixture(self.n, self.k, self.eps, family, &mut rng).map(Some)
            }
            _ => Ok(None),
        }
    }

    fn trial_fixture<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Fixture> {
        let (function, distribution) = match &self.fixture {
            FixtureSpec::RandomJunta { distribution } => {
                (gen_random_junta(self.n, self.k, rng)?, distribution.generate(self.n, rng)?)
            }
            FixtureSpec::Arbitrary { distribution } => {
                (gen_random_function(self.n, rng)?, distribution.generate(self.n, rng)?)
            }
            FixtureSpec::Far { .. } => unreachable!("far fixtures are shared"),
        };
        Ok(Fixture { function, distribution, certificate: None })
    }

    /// Runs trial `index` and returns its fixture (when per-trial) and verdict.
    pub fn run_trial(&self, shared: Option<&Fixture>, index: u64) -> Result<(Option<Fixture>, Verdict)> {
        let mut rng = stream_rng(self.master_seed, index);
        let own = match shared {
            Some(_) => None,
            None => Some(self.trial_fixture(&mut rng)?),
        };
        let fixture = shared.or(own.as_ref()).expect("one of shared or own");
        let ledger = Ledger::new();
        let oracle = MembershipOracle::new(&fixture.function, &ledger);
        let sampler = SampleOracle::new(&fixture.distribution, &ledger);
        let verdict = run_tester(&oracle, &sampler, self.k, self.eps, self.variant, &mut rng)?;
        Ok((own, verdict))
    }
}

/// One row of the per-trial CSV.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub decision: Decision,
    pub classical_queries: u64,
    pub classical_samples: u64,
    pub quantum_queries: u64,
    pub iterations: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerAggregates {
    pub classical_queries: Aggregate,
    pub classical_samples: Aggregate,
    pub quantum_queries: Aggregate,
    pub total: Aggregate,
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialReport {
    pub config: ExperimentConfig,
    pub trials: u64,
    pub rejections: u64,
    pub acceptance_rate: f64,
    pub rejection_rate: f64,
    /// 99% Wilson interval for the rejection rate.
    pub confidence_interval: (f64, f64),
    pub ledger_aggregates: LedgerAggregates,
    pub budget: QueryLedger,
    pub budget_violations: u64,
    pub iterations: Aggregate,
    /// Fraction of iterations that increased `2|S| + |𝓑|`; far fixtures only.
    pub potential_growth_rate: Option<f64>,
    pub growth_iterations: u64,
    pub certified_distance: Option<f64>,
    #[serde(skip)]
    pub per_trial: Vec<TrialRecord>,
}

impl TrialReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for rec in &self.per_trial {
            w.serialize(rec).map_err(|e| Error::Parse(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }
}

/// Number of iterations of `verdict` and how many of them increased the potential.
pub fn potential_growth(verdict: &Verdict) -> (u64, u64) {
    let mut before = 0;
    let mut grew = 0;
    let trace = verdict.final_state.trace();
    for rec in trace {
        if rec.potential > before {
            grew += 1;
        }
        before = rec.potential;
    }
    (trace.len() as u64, grew)
}

struct Outcome {
    record: TrialRecord,
    ledger: QueryLedger,
    iterations: u64,
    grew: u64,
}

/// Executes `config.trials` independent tester runs and aggregates them.
pub fn run_trials(config: &ExperimentConfig) -> Result<TrialReport> {
    config.validate()?;
    let shared = config.shared_fixture()?;
    let outcomes = (0..config.trials)
        .into_par_iter()
        .map(|i| {
            let (_, v) = config.run_trial(shared.as_ref(), i)?;
            let (iterations, grew) = potential_growth(&v);
            Ok(Outcome {
                record: TrialRecord {
                    trial: i,
                    decision: v.decision,
                    classical_queries: v.ledger.classical_queries,
                    classical_samples: v.ledger.classical_samples,
                    quantum_queries: v.ledger.quantum_queries,
                    iterations,
                },
                ledger: v.ledger,
                iterations,
                grew,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let trials = config.trials;
    let rejections = outcomes.iter().filter(|o| o.record.decision == Decision::Reject).count() as u64;
    let budget = run_budget(config.k, config.eps, config.variant);
    let agg = |f: fn(&QueryLedger) -> u64| Aggregate::of(outcomes.iter().map(|o| f(&o.ledger))).expect("trials >= 1");
    let growth_iterations: u64 = outcomes.iter().map(|o| o.iterations).sum();
    let grew: u64 = outcomes.iter().map(|o| o.grew).sum();
    let rejection_rate = rejections as f64 / trials as f64;

    Ok(TrialReport {
        config: config.clone(),
        trials,
        rejections,
        acceptance_rate: (trials - rejections) as f64 / trials as f64,
        rejection_rate,
        confidence_interval: wilson_interval(rejections, trials, Z_99),
        ledger_aggregates: LedgerAggregates {
            classical_queries: agg(|l| l.classical_queries),
            classical_samples: agg(|l| l.classical_samples),
            quantum_queries: agg(|l| l.quantum_queries),
            total: agg(QueryLedger::total),
        },
        budget,
        budget_violations: outcomes.iter().filter(|o| !o.ledger.within(&budget)).count() as u64,
        iterations: Aggregate::of(outcomes.iter().map(|o| o.iterations)).expect("trials >= 1"),
        potential_growth_rate: (config.is_far() && growth_iterations > 0)
            .then(|| grew as f64 / growth_iterations as f64),
        growth_iterations,
        certified_distance: shared.and_then(|f| f.certificate).map(|c| c.distance),
        per_trial: outcomes.into_iter().map(|o| o.record).collect(),
    })
}
