use serde::Serialize;

/// Two-sided 99% normal quantile.
pub const Z_99: f64 = 2.576;

/// Wilson score interval for a binomial proportion.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials, "need 0 <= successes <= trials, trials > 0");
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if successes == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if successes == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Min / mean / max of a counter across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Aggregate {
    pub min: u64,
    pub mean: f64,
    pub max: u64,
}

impl Aggregate {
    pub fn of(values: impl IntoIterator<Item = u64>) -> Option<Self> {
        let mut it = values.into_iter();
        let first = it.next()?;
        let (mut min, mut max, mut sum, mut count) = (first, first, first as u128, 1u64);
        for v in it {
            min = min.min(v);
            max = max.max(v);
            sum += v as u128;
            count += 1;
        }
        Some(Aggregate { min, mean: sum as f64 / count as f64, max })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_examples() {
        assert_eq!(wilson_interval(0, 10, Z_99).0, 0.0);
        assert_eq!(wilson_interval(10, 10, Z_99).1, 1.0);
        let (lo, hi) = wilson_interval(500, 1000, Z_99);
        // closed form at z = 2.576, n = 1000, p = 1/2
        assert!((hi - lo - 0.081_191_334_188).abs() < 1e-9, "{}", hi - lo);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn single_trial() {
        let (lo, hi) = wilson_interval(1, 1, Z_99);
        assert!(lo > 0.0 && hi == 1.0);
        let (lo, hi) = wilson_interval(0, 1, Z_99);
        assert!(lo == 0.0 && hi < 1.0);
    }

    #[test]
    #[should_panic]
    fn wilson_rejects_more_successes_than_trials() {
        wilson_interval(3, 2, Z_99);
    }

    #[test]
    fn aggregate() {
        let a = Aggregate::of([3, 1, 2]).unwrap();
        assert_eq!((a.min, a.mean, a.max), (1, 2.0, 3));
        assert!(Aggregate::of(std::iter::empty()).is_none());
    }
}
