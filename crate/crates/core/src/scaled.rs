//! Integer images of item weights at a fixed rational λ.
//!
//! At `λ = num/den` every weight `a + λ·b` times `den` is the integer
//! `a·den + num·b`, so all comparisons against `W·den` are exact integer
//! comparisons. `i128` is used whenever the worst-case path sum provably
//! fits, big integers otherwise.

use std::ops::Add;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::instance::ParametricInstance;
use crate::numeric::Rational;

pub(crate) trait ExactInt:
    Clone + Ord + Send + Sync + Zero + Add<Output = Self> + for<'a> Add<&'a Self, Output = Self>
{
}

impl ExactInt for i128 {}
impl ExactInt for BigInt {}

pub(crate) enum ScaledWeights {
    Small { weights: Vec<i128>, capacity: i128 },
    Big { weights: Vec<BigInt>, capacity: BigInt },
}

/// Headroom so that sums of up to `n` terms cannot overflow.
const SMALL_LIMIT: u32 = 120;

impl ScaledWeights {
    pub(crate) fn at(instance: &ParametricInstance, lambda: &Rational) -> Self {
        let num = lambda.numer();
        let den = lambda.denom();
        let big: Vec<BigInt> = instance
            .items()
            .iter()
            .map(|it| BigInt::from(it.weight_intercept) * den + num * BigInt::from(it.weight_slope))
            .collect();
        let capacity = BigInt::from(instance.capacity()) * den;
        let n_bits = 64 - (instance.len() as u64 + 1).leading_zeros();
        let fits = |x: &BigInt| x.abs().bits() + u64::from(n_bits) < u64::from(SMALL_LIMIT);
        if big.iter().all(fits) && fits(&capacity) {
            ScaledWeights::Small {
                weights: big.iter().map(|x| x.to_i128().expect("checked")).collect(),
                capacity: capacity.to_i128().expect("checked"),
            }
        } else {
            ScaledWeights::Big { weights: big, capacity }
        }
    }
}
