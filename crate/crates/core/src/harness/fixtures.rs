use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{BitString, BooleanFunction, IndexSet};
use crate::distribution::{distance_to_k_junta, DistanceCertificate, Distribution};
use crate::{Error, Result};

/// Resamples allowed before a far-fixture family gives up.
pub const FAR_FIXTURE_RETRIES: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FarFamily {
    /// Parity of `k + 1` random variables under the uniform distribution.
    Parity,
    /// Uniformly random truth table under the uniform distribution.
    RandomFunction,
    /// Mass concentrated on a paired-copy subcube, random function on it.
    Planted,
}

fn random_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = index::sample(rng, n, k).into_iter().map(|i| i + 1).collect();
    v.sort_unstable();
    v
}

/// A random `k`-junta: uniform `k`-subset, uniform inner table.
pub fn gen_random_junta<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<BooleanFunction> {
    if k > n {
        return Err(Error::InvalidParameter(format!("k = {k} exceeds n = {n}")));
    }
    let vars = random_subset(n, k, rng);
    let inner = (0..1usize << k).map(|_| rng.random()).collect();
    BooleanFunction::from_junta(n, vars, inner)
}

/// Uniformly random truth table.
pub fn gen_random_function<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<BooleanFunction> {
    let bits: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
    BooleanFunction::from_fn(n, |x| bits[x as usize])
}

/// `support` random points (duplicates merge) with weights uniform in `(0, 1]`.
pub fn gen_sparse_distribution<R: Rng + ?Sized>(n: usize, support: usize, rng: &mut R) -> Result<Distribution> {
    if support == 0 {
        return Err(Error::InvalidParameter("support must be positive".into()));
    }
    let full = IndexSet::full(n).mask();
    let points = (0..support)
        .map(|_| {
            let x = BitString::new(rng.random::<u32>() & full, n)?;
            Ok((x, 1.0 - rng.random::<f64>()))
        })
        .collect::<Result<Vec<_>>>()?;
    Distribution::sparse(n, points)
}

/// A function with its distribution, and a distance certificate when the
/// fixture claims to be far.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub function: BooleanFunction,
    pub distribution: Distribution,
    pub certificate: Option<DistanceCertificate>,
}

fn planted<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<(BooleanFunction, Distribution)> {
    // 𝓓 is uniform on strings whose block C copies block A; f is random there and 0 elsewhere
    let a = k.min(n / 2).max(1);
    let blocks: Vec<usize> = index::sample(rng, n, 2 * a).into_iter().collect();
    let (src, dst) = blocks.split_at(a);
    let copies = |x: u32| src.iter().zip(dst).all(|(&s, &d)| (x >> s & 1) == (x >> d & 1));
    let bits: Vec<bool> = (0..1usize << n).map(|_| rng.random()).collect();
    let f = BooleanFunction::from_fn(n, |x| copies(x) && bits[x as usize])?;
    let weights = (0..1u32 << n).map(|x| if copies(x) { 1.0 } else { 0.0 }).collect();
    Ok((f, Distribution::dense(n, weights)?))
}

/// Generates `(f, 𝓓)` in `family` and certifies `distance_to_k_junta ≥ eps`
/// with the exact oracle.
pub fn gen_far_fixture<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    eps: f64,
    family: FarFamily,
    rng: &mut R,
) -> Result<Fixture> {
    if k >= n {
        return Err(Error::InvalidParameter(format!("need k < n, got k = {k}, n = {n}")));
    }
    let attempts = match family {
        FarFamily::Parity => 1,
        FarFamily::RandomFunction | FarFamily::Planted => FAR_FIXTURE_RETRIES,
    };
    let mut achieved = 0.0f64;
    for _ in 0..attempts {
        let (function, distribution) = match family {
            FarFamily::Parity => {
                let vars = IndexSet::from_indices(random_subset(n, k + 1, rng))?;
                (BooleanFunction::parity(n, &vars)?, Distribution::uniform(n)?)
            }
            FarFamily::RandomFunction => (gen_random_function(n, rng)?, Distribution::uniform(n)?),
            FarFamily::Planted => planted(n, k, rng)?,
        };
        let cert = distance_to_k_junta(&function, &distribution, k)?;
        if cert.distance >= eps {
            return Ok(Fixture { function, distribution, certificate: Some(cert) });
        }
        achieved = achieved.max(cert.distance);
    }
    Err(Error::CertificationFailed { achieved, eps })
}
