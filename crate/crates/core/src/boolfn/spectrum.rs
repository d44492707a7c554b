use super::{deposit, extract, BooleanFunction, Cube, IndexSet};
use crate::{Error, Result, M_MAX};

/// In-place unnormalised Walsh–Hadamard butterfly. `v.len()` must be a power of two.
pub fn walsh_hadamard_in_place(v: &mut [i32]) {
    let len = v.len();
    assert!(len.is_power_of_two(), "length {len} is not a power of two");
    let mut h = 1;
    while h < len {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*a + *b, *a - *b);
                *a = s;
                *b = d;
            }
        }
        h *= 2;
    }
}

/// Fourier coefficients of `f` restricted to a cube `B = (x, y)`.
///
/// The coefficient of `S ⊆ I(B)` is `2^{-m} Σ_{T ⊆ I(B)} (-1)^{f(x^T) + |S ∩ T|}`
/// with `m = |I(B)|`. Coefficients are kept as the integer sums `W_S`, so every
/// coefficient and its square are exact dyadic rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct RestrictedSpectrum {
    cube: Cube,
    walsh: Vec<i32>,
}

impl RestrictedSpectrum {
    pub(crate) fn compute(f: &BooleanFunction, cube: &Cube) -> Result<Self> {
        if cube.dim() != f.n() {
            return Err(Error::DimensionMismatch { expected: f.n(), actual: cube.dim() });
        }
        let m = cube.free_dim();
        if m > M_MAX {
            return Err(Error::CubeTooLarge(m));
        }
        let mut walsh: Vec<i32> = (0..1u32 << m)
            .map(|t| if f.eval_index(cube.point(t).value()) { -1 } else { 1 })
            .collect();
        walsh_hadamard_in_place(&mut walsh);
        Ok(RestrictedSpectrum { cube: *cube, walsh })
    }

    pub fn cube(&self) -> &Cube {
        &self.cube
    }

    pub fn free_dim(&self) -> usize {
        self.cube.free_dim()
    }

    /// Number of coefficients, `2^m`.
    pub fn len(&self) -> usize {
        self.walsh.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walsh.is_empty()
    }

    /// Unnormalised sum `W_S` for the local subset index.
    pub fn walsh_local(&self, local: u32) -> i32 {
        self.walsh[local as usize]
    }

    /// `W_S²`; these weights sum to `4^m`.
    pub fn squared_weight_local(&self, local: u32) -> u64 {
        let w = self.walsh[local as usize] as i64;
        (w * w) as u64
    }

    pub fn coefficient_local(&self, local: u32) -> f64 {
        self.walsh[local as usize] as f64 / self.walsh.len() as f64
    }

    pub fn to_global(&self, local: u32) -> IndexSet {
        IndexSet::from_mask(deposit(local, self.cube.disagreement().mask()))
    }

    pub fn to_local(&self, subset: &IndexSet) -> Result<u32> {
        let free = self.cube.disagreement();
        if !subset.is_subset(&free) {
            return Err(Error::InvalidParameter(format!("{subset} is not a subset of I(B) = {free}")));
        }
        Ok(extract(subset.mask(), free.mask()))
    }

    /// `f̂(S)` for `S ⊆ I(B)`.
    pub fn coefficient(&self, subset: &IndexSet) -> Result<f64> {
        Ok(self.coefficient_local(self.to_local(subset)?))
    }

    /// `f̂(S)²`, the Fourier-sampling probability of outcome `S`.
    pub fn probability(&self, subset: &IndexSet) -> Result<f64> {
        let c = self.coefficient(subset)?;
        Ok(c * c)
    }

    pub fn empty_coefficient(&self) -> f64 {
        self.coefficient_local(0)
    }

    /// `Σ_S f̂(S)²`.
    pub fn norm_squared(&self) -> f64 {
        let total: u128 = (0..self.walsh.len() as u32)
            .map(|s| self.squared_weight_local(s) as u128)
            .sum();
        total as f64 / (self.walsh.len() as f64).powi(2)
    }

    /// `(subset, coefficient)` pairs in local-index order.
    pub fn iter(&self) -> impl Iterator<Item = (IndexSet, f64)> + '_ {
        (0..self.walsh.len() as u32).map(|s| (self.to_global(s), self.coefficient_local(s)))
    }
}
