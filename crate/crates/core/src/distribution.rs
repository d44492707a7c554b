//! Explicit distributions over the hypercube and exact distance-to-junta certification.

use itertools::Itertools;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{check_dim, BitString, BooleanFunction, IndexSet};
use crate::{Error, Result};

/// Refuse distance computations with `C(n,k)·2^n` above this.
pub const DISTANCE_WORK_CAP: f64 = 1e9;

#[derive(Debug, Clone)]
enum Weights {
    Uniform,
    Dense(Vec<f64>),
    Sparse(Vec<(u32, f64)>),
}

/// A normalised probability distribution over `{0,1}^n`.
#[derive(Debug, Clone)]
pub struct Distribution {
    n: usize,
    weights: Weights,
    sampler: Option<WeightedIndex<f64>>,
    /// points with positive mass, parallel to the sampler's indices
    support: Vec<u32>,
}

fn validate(raw: &[f64]) -> Result<f64> {
    if let Some(w) = raw.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("weight {w} is not a nonnegative number")));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidDistribution("all weights are zero".into()));
    }
    Ok(total)
}

impl Distribution {
    pub fn uniform(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Distribution { n, weights: Weights::Uniform, sampler: None, support: Vec::new() })
    }

    /// Normalises a dense weight vector of length `2^n`.
    pub fn dense(n: usize, raw: Vec<f64>) -> Result<Self> {
        check_dim(n)?;
        if raw.len() != 1 << n {
            return Err(Error::InvalidDistribution(format!(
                "dense weights for n={n} need {} entries, got {}",
                1usize << n,
                raw.len()
            )));
        }
        let total = validate(&raw)?;
        let probs: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let support: Vec<u32> = (0..probs.len() as u32).filter(|&x| probs[x as usize] > 0.0).collect();
        let sampler = WeightedIndex::new(support.iter().map(|&x| probs[x as usize]))
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        Ok(Distribution { n, weights: Weights::Dense(probs), sampler: Some(sampler), support })
    }

    /// Normalises a sparse support list; repeated points are merged.
    pub fn sparse(n: usize, raw: Vec<(BitString, f64)>) -> Result<Self> {
        check_dim(n)?;
        if let Some((x, _)) = raw.iter().find(|(x, _)| x.dim() != n) {
            return Err(Error::DimensionMismatch { expected: n, actual: x.dim() });
        }
        let ws: Vec<f64> = raw.iter().map(|(_, w)| *w).collect();
        let total = validate(&ws)?;
        let mut merged: Vec<(u32, f64)> = raw
            .iter()
            .map(|(x, w)| (x.value(), *w))
            .sorted_by_key(|(x, _)| *x)
            .coalesce(|a, b| if a.0 == b.0 { Ok((a.0, a.1 + b.1)) } else { Err((a, b)) })
            .filter(|(_, w)| *w > 0.0)
            .collect();
        for entry in &mut merged {
            entry.1 /= total;
        }
        let support = merged.iter().map(|(x, _)| *x).collect();
        let sampler = WeightedIndex::new(merged.iter().map(|(_, w)| *w))
            .map_err(|e| Error::InvalidDistribution(e.to_string()))?;
        Ok(Distribution { n, weights: Weights::Sparse(merged), sampler: Some(sampler), support })
    }

    pub fn point_mass(x: BitString) -> Result<Self> {
        Self::sparse(x.dim(), vec![(x, 1.0)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.weights, Weights::Uniform)
    }

    /// `𝓓(x)`.
    pub fn prob(&self, x: &BitString) -> f64 {
        if x.dim() != self.n {
            return 0.0;
        }
        self.prob_index(x.value())
    }

    pub fn prob_index(&self, x: u32) -> f64 {
        match &self.weights {
            Weights::Uniform => 1.0 / (1u64 << self.n) as f64,
            Weights::Dense(p) => p.get(x as usize).copied().unwrap_or(0.0),
            Weights::Sparse(s) => s
                .binary_search_by_key(&x, |(p, _)| *p)
                .map(|i| s[i].1)
                .unwrap_or(0.0),
        }
    }

    /// Points with positive probability and their masses, in increasing index order.
    pub fn support(&self) -> Box<dyn Iterator<Item = (u32, f64)> + '_> {
        match &self.weights {
            Weights::Uniform => {
                let p = 1.0 / (1u64 << self.n) as f64;
                Box::new((0..1u32 << self.n).map(move |x| (x, p)))
            }
            Weights::Dense(p) => Box::new(self.support.iter().map(move |&x| (x, p[x as usize]))),
            Weights::Sparse(s) => Box::new(s.iter().copied()),
        }
    }

    pub fn support_len(&self) -> usize {
        match &self.weights {
            Weights::Uniform => 1 << self.n,
            _ => self.support.len(),
        }
    }

    /// Draws one point. Not counted; the tester goes through [`crate::SampleOracle`].
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> BitString {
        let x = match &self.sampler {
            None => rng.random::<u32>() & IndexSet::full(self.n).mask(),
            Some(s) => self.support[s.sample(rng)],
        };
        BitString::from_raw(x, self.n)
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct SupportEntry {
    x: BitString,
    w: f64,
}

/// `{ "n": 2, "uniform": true }`, `{ "n": 2, "dense": [..] }` or
/// `{ "n": 2, "support": [{ "x": "11", "w": 1.0 }] }`.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DistributionFile {
    n: usize,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    uniform: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dense: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    support: Option<Vec<SupportEntry>>,
}

impl Serialize for Distribution {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let file = match &self.weights {
            Weights::Uniform => DistributionFile { n: self.n, uniform: true, dense: None, support: None },
            Weights::Dense(_) => DistributionFile {
                n: self.n,
                uniform: false,
                dense: Some((0..1u32 << self.n).map(|x| self.prob_index(x)).collect()),
                support: None,
            },
            Weights::Sparse(s) => DistributionFile {
                n: self.n,
                uniform: false,
                dense: None,
                support: Some(
                    s.iter()
                        .map(|&(x, w)| SupportEntry { x: BitString::from_raw(x, self.n), w })
                        .collect(),
                ),
            },
        };
        file.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Distribution {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let file = DistributionFile::deserialize(deserializer)?;
        let parsed = match (file.uniform, file.dense, file.support) {
            (true, None, None) => Distribution::uniform(file.n),
            (false, Some(d), None) => Distribution::dense(file.n, d),
            (false, None, Some(s)) => Distribution::sparse(file.n, s.into_iter().map(|e| (e.x, e.w)).collect()),
            _ => Err(Error::InvalidDistribution(
                "exactly one of `uniform`, `dense` or `support` is required".into(),
            )),
        };
        parsed.map_err(D::Error::custom)
    }
}

/// Exact distance of `f` to the nearest `k`-junta under `𝓓`, with a witness.
#[derive(Debug, Clone, Serialize)]
pub struct DistanceCertificate {
    pub distance: f64,
    pub best_subset: IndexSet,
    pub best_junta: BooleanFunction,
}

/// Per projection class of `J`, the `𝓓`-mass of points where `f` is 0 and 1.
fn class_masses(f: &BooleanFunction, dist: &Distribution, subset: &IndexSet) -> Vec<(f64, f64)> {
    let mask = subset.mask();
    let mut mass = vec![(0.0, 0.0); 1 << subset.len()];
    for (x, w) in dist.support() {
        let class = crate::boolfn::extract(x, mask) as usize;
        if f.eval_index(x) {
            mass[class].1 += w;
        } else {
            mass[class].0 += w;
        }
    }
    mass
}

fn majority_error(mass: &[(f64, f64)]) -> f64 {
    // ties go to output 0, which errs on the 1-mass
    mass.iter().map(|&(zero, one)| if one > zero { zero } else { one }).sum()
}

/// Best junta on exactly the variables `subset`: weighted majority per class,
/// ties broken toward 0. Returns the junta and its error under `𝓓`.
pub fn best_junta_on(
    f: &BooleanFunction,
    dist: &Distribution,
    subset: &IndexSet,
) -> Result<(BooleanFunction, f64)> {
    if f.n() != dist.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: dist.n() });
    }
    subset.check_within(f.n())?;
    let mass = class_masses(f, dist, subset);
    let inner = mass.iter().map(|&(zero, one)| one > zero).collect();
    let h = BooleanFunction::from_junta(f.n(), subset.to_vec(), inner)?;
    Ok((h, majority_error(&mass)))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k.min(n)).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Minimum over all `|J| = k` of [`best_junta_on`]. Among minimisers the
/// lexicographically smallest `J` wins.
pub fn distance_to_k_junta(f: &BooleanFunction, dist: &Distribution, k: usize) -> Result<DistanceCertificate> {
    if f.n() != dist.n() {
        return Err(Error::DimensionMismatch { expected: f.n(), actual: dist.n() });
    }
    let n = f.n();
    let k = k.min(n);
    let work = binomial(n, k) * (1u64 << n) as f64;
    if work > DISTANCE_WORK_CAP {
        return Err(Error::WorkCapExceeded { work, cap: DISTANCE_WORK_CAP });
    }
    let mut best: Option<(f64, IndexSet)> = None;
    for vars in (1..=n).combinations(k) {
        let subset = IndexSet::from_indices(vars)?;
        let err = majority_error(&class_masses(f, dist, &subset));
        // floating sums over different class partitions may differ in the last ulp
        if best.as_ref().is_none_or(|(e, _)| err < *e - 1e-12) {
            best = Some((err, subset));
        }
    }
    let (_, best_subset) = best.expect("at least one subset of size k");
    let (best_junta, distance) = best_junta_on(f, dist, &best_subset)?;
    Ok(DistanceCertificate { distance, best_subset, best_junta })
}

/// `Pr_{x∼𝓓}[f(x) ≠ h(x)]` by direct summation over the support.
pub fn disagreement(f: &BooleanFunction, h: &BooleanFunction, dist: &Distribution) -> f64 {
    dist.support()
        .filter(|&(x, _)| f.eval_index(x) != h.eval_index(x))
        .map(|(_, w)| w)
        .sum()
}
