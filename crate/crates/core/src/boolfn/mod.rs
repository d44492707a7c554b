//! Boolean functions over the hypercube, cubes and restricted spectra.

mod bits;
mod json;
mod spectrum;

pub use bits::{deposit, extract, BitString, Cube, IndexSet};
pub use json::{decode_table, encode_table, FunctionFile, JuntaFile};
pub use spectrum::{walsh_hadamard_in_place, RestrictedSpectrum};

pub(crate) use bits::check_dim;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Junta structure attached to a truth table: `f(x) = inner(x restricted to vars)`.
///
/// Bit `j` of an inner-table index is the value of variable `vars[j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JuntaBacking {
    vars: Vec<usize>,
    inner: Vec<bool>,
}

impl JuntaBacking {
    pub fn vars(&self) -> &[usize] {
        &self.vars
    }

    pub fn inner(&self) -> &[bool] {
        &self.inner
    }

    pub fn var_set(&self) -> IndexSet {
        IndexSet::from_indices(self.vars.iter().copied()).expect("validated on construction")
    }

    fn project(&self, x: u32) -> usize {
        self.vars
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &v)| acc | ((x >> (v - 1) & 1) as usize) << j)
    }

    pub fn eval_index(&self, x: u32) -> bool {
        self.inner[self.project(x)]
    }
}

/// A total function `{0,1}^n → {0,1}` stored as a dense bit-packed truth table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "FunctionFile", into = "FunctionFile")]
pub struct BooleanFunction {
    n: usize,
    table: Vec<u64>,
    junta: Option<JuntaBacking>,
}

fn words_for(n: usize) -> usize {
    (1usize << n).div_ceil(64)
}

impl BooleanFunction {
    /// Tabulates `f` over all `2^n` integer indices (variable 1 = bit 0).
    pub fn from_fn<F: Fn(u32) -> bool>(n: usize, f: F) -> Result<Self> {
        check_dim(n)?;
        let mut table = vec![0u64; words_for(n)];
        for x in 0..(1u32 << n) {
            if f(x) {
                table[(x >> 6) as usize] |= 1 << (x & 63);
            }
        }
        Ok(BooleanFunction { n, table, junta: None })
    }

    /// Builds from packed words; bits beyond `2^n` must be zero.
    pub fn from_words(n: usize, table: Vec<u64>) -> Result<Self> {
        check_dim(n)?;
        if table.len() != words_for(n) {
            return Err(Error::Parse(format!(
                "table for n={n} needs {} words, got {}",
                words_for(n),
                table.len()
            )));
        }
        if n < 6 && table[0] >> (1u32 << n) != 0 {
            return Err(Error::Parse("nonzero padding bits in truth table".into()));
        }
        Ok(BooleanFunction { n, table, junta: None })
    }

    pub fn constant(n: usize, value: bool) -> Result<Self> {
        Self::from_fn(n, |_| value)
    }

    /// Builds `f(x) = inner(x_{vars[0]}, x_{vars[1]}, …)` and records the backing.
    pub fn from_junta(n: usize, vars: Vec<usize>, inner: Vec<bool>) -> Result<Self> {
        check_dim(n)?;
        let set = IndexSet::from_indices(vars.iter().copied())?;
        set.check_within(n)?;
        if set.len() != vars.len() {
            return Err(Error::InvalidParameter("repeated junta variable".into()));
        }
        if inner.len() != 1 << vars.len() {
            return Err(Error::InvalidParameter(format!(
                "inner table for {} variables needs {} entries, got {}",
                vars.len(),
                1usize << vars.len(),
                inner.len()
            )));
        }
        let backing = JuntaBacking { vars, inner };
        let mut f = Self::from_fn(n, |x| backing.eval_index(x))?;
        f.junta = Some(backing);
        Ok(f)
    }

    /// `f(x) = x_i`.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        Self::from_junta(n, vec![i], vec![false, true])
    }

    /// XOR of the variables in `vars`.
    pub fn parity(n: usize, vars: &IndexSet) -> Result<Self> {
        let v = vars.to_vec();
        let inner = (0..1u32 << v.len()).map(|t| t.count_ones() % 2 == 1).collect();
        Self::from_junta(n, v, inner)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn words(&self) -> &[u64] {
        &self.table
    }

    pub fn junta_backing(&self) -> Option<&JuntaBacking> {
        self.junta.as_ref()
    }

    pub fn eval(&self, x: &BitString) -> Result<bool> {
        if x.dim() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, actual: x.dim() });
        }
        Ok(self.eval_index(x.value()))
    }

    #[inline]
    pub fn eval_index(&self, x: u32) -> bool {
        self.table[(x >> 6) as usize] >> (x & 63) & 1 == 1
    }

    /// Exhaustive agreement between the table and the junta backing, if any.
    pub fn backing_consistent(&self) -> bool {
        match &self.junta {
            None => true,
            Some(b) => (0..1u32 << self.n).all(|x| b.eval_index(x) == self.eval_index(x)),
        }
    }

    /// Number of inputs mapped to 1.
    pub fn ones(&self) -> u64 {
        self.table.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// Whether variable `i` (1-based) is relevant: some `x` has `f(x) ≠ f(x^i)`.
    pub fn is_relevant(&self, i: usize) -> bool {
        if i == 0 || i > self.n {
            return false;
        }
        let b = i - 1;
        if b >= 6 {
            let stride = 1usize << (b - 6);
            (0..self.table.len())
                .filter(|w| w & stride == 0)
                .any(|w| self.table[w] != self.table[w | stride])
        } else {
            const LOW: [u64; 6] = [
                0x5555_5555_5555_5555,
                0x3333_3333_3333_3333,
                0x0f0f_0f0f_0f0f_0f0f,
                0x00ff_00ff_00ff_00ff,
                0x0000_ffff_0000_ffff,
                0x0000_0000_ffff_ffff,
            ];
            let valid = if self.n >= 6 { u64::MAX } else { (1u64 << (1 << self.n)) - 1 };
            let shift = 1u32 << b;
            self.table
                .iter()
                .any(|&w| ((w >> shift) ^ w) & LOW[b] & valid != 0)
        }
    }

    /// The exact set of relevant variables.
    pub fn relevant_variables(&self) -> IndexSet {
        IndexSet::from_mask(
            (1..=self.n)
                .filter(|&i| self.is_relevant(i))
                .fold(0, |m, i| m | 1 << (i - 1)),
        )
    }

    pub fn is_k_junta(&self, k: usize) -> bool {
        self.relevant_variables().len() <= k
    }

    /// Walsh–Hadamard spectrum of `f` restricted to `cube`, phases referenced to corner `x`.
    pub fn restricted_spectrum(&self, cube: &Cube) -> Result<RestrictedSpectrum> {
        RestrictedSpectrum::compute(self, cube)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    fn set(v: &[usize]) -> IndexSet {
        IndexSet::from_indices(v.iter().copied()).unwrap()
    }

    fn majority3(n: usize) -> BooleanFunction {
        BooleanFunction::from_fn(n, |x| (x & 0b111).count_ones() >= 2).unwrap()
    }

    #[test]
    fn eval_examples() {
        let zero = BooleanFunction::constant(5, false).unwrap();
        assert!(!zero.eval(&bs("10110")).unwrap());
        let dict = BooleanFunction::dictator(5, 3).unwrap();
        assert!(dict.eval(&bs("00100")).unwrap());
        let and = BooleanFunction::from_fn(2, |x| x == 0b11).unwrap();
        assert!(and.eval(&bs("11")).unwrap());
        assert!(!and.eval(&bs("10")).unwrap());
    }

    #[test]
    fn eval_dimension_mismatch() {
        let f = BooleanFunction::constant(3, true).unwrap();
        assert_eq!(
            f.eval(&bs("01")).unwrap_err(),
            Error::DimensionMismatch { expected: 3, actual: 2 }
        );
    }

    // Brute force over every (x, i) pair.
    fn relevant_oracle(f: &BooleanFunction) -> Vec<usize> {
        (1..=f.n())
            .filter(|&i| (0..1u32 << f.n()).any(|x| f.eval_index(x) != f.eval_index(x ^ 1 << (i - 1))))
            .collect()
    }

    #[test]
    fn relevant_variable_examples() {
        assert!(BooleanFunction::constant(5, true).unwrap().relevant_variables().is_empty());
        assert_eq!(BooleanFunction::dictator(5, 3).unwrap().relevant_variables(), set(&[3]));
        let maj = majority3(5);
        assert_eq!(relevant_oracle(&maj), vec![1, 2, 3]);
        assert_eq!(maj.relevant_variables(), set(&[1, 2, 3]));
    }

    #[test]
    fn relevant_variables_high_and_low_bits() {
        for n in [1, 3, 6, 7, 9] {
            for i in 1..=n {
                let f = BooleanFunction::dictator(n, i).unwrap();
                assert_eq!(f.relevant_variables(), set(&[i]), "n={n} i={i}");
            }
        }
    }

    #[test]
    fn k_junta_examples() {
        assert!(BooleanFunction::constant(4, false).unwrap().is_k_junta(0));
        let par = BooleanFunction::parity(4, &set(&[1, 2, 3, 4])).unwrap();
        assert_eq!(relevant_oracle(&par).len(), 4);
        assert!(!par.is_k_junta(3));
        assert!(par.is_k_junta(4));
    }

    #[test]
    fn junta_backing_rejects_bad_inputs() {
        assert!(BooleanFunction::from_junta(3, vec![4], vec![false, true]).is_err());
        assert!(BooleanFunction::from_junta(3, vec![1, 1], vec![false; 4]).is_err());
        assert!(BooleanFunction::from_junta(3, vec![1], vec![false; 3]).is_err());
    }

    #[test]
    fn dimension_cap() {
        assert!(BooleanFunction::constant(25, false).is_err());
        assert!(BooleanFunction::constant(0, false).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn relevant_matches_brute_force(n in 1usize..=8, seed in any::<u64>()) {
                let f = BooleanFunction::from_fn(n, |x| {
                    // depends only on the bits set in `seed`
                    let h = (x & (seed as u32)).wrapping_mul(0x9e37_79b9);
                    h >> 31 == 1
                }).unwrap();
                prop_assert_eq!(f.relevant_variables().to_vec(), relevant_oracle(&f));
            }

            #[test]
            fn junta_backing_consistent(n in 1usize..=10, k in 0usize..=4, seed in any::<u64>()) {
                let k = k.min(n);
                let vars: Vec<usize> = (0..k).map(|j| (seed as usize >> (3 * j)) % n + 1)
                    .collect::<std::collections::BTreeSet<_>>().into_iter().collect();
                let inner = (0..1u64 << vars.len()).map(|t| (seed >> (t % 64)) & 1 == 1).collect();
                let f = BooleanFunction::from_junta(n, vars.clone(), inner).unwrap();
                prop_assert!(f.backing_consistent());
                prop_assert!(f.relevant_variables().is_subset(&IndexSet::from_indices(vars).unwrap()));
            }
        }
    }
}
