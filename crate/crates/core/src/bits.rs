//! Bit lengths: the common currency of generation cost, description cost and
//! unexpectedness. All logarithms are base 2.

use std::fmt;
use std::ops::Add;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Nonnegative cost in bits; `+inf` marks an impossible or unseen object.
#[derive(Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct BitLength<S>(S);

impl<S: Scalar> BitLength<S> {
    pub fn new(value: S) -> Result<Self> {
        if value.is_nan() || value < S::zero() {
            return Err(Error::InvalidBitLength {
                value: value.to_f64_lossy(),
            });
        }
        Ok(BitLength(value))
    }

    pub fn zero() -> Self {
        BitLength(S::zero())
    }

    pub fn infinite() -> Self {
        BitLength(S::infinity())
    }

    /// `log2(x)` for `x >= 1`, the cost of an index among `x` equally likely choices.
    pub fn log2_of(x: S) -> Result<Self> {
        if !(x >= S::one()) {
            return Err(Error::InvalidBitLength {
                value: x.to_f64_lossy(),
            });
        }
        Ok(BitLength(x.log2()))
    }

    #[inline]
    pub fn value(self) -> S {
        self.0
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Probability mass `2^-bits`; zero for infinite lengths.
    pub fn to_probability(self) -> S {
        (-self.0).exp2()
    }
}

impl<S: Scalar> Add for BitLength<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        BitLength(self.0 + rhs.0)
    }
}

impl<S: fmt::Debug> fmt::Debug for BitLength<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} bits", self.0)
    }
}

impl<S: fmt::Display> fmt::Display for BitLength<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Signed drop of complexity `C_W - C_D`, alongside its cognitive-economy clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Unexpectedness<S> {
    raw: S,
    clamped: S,
}

impl<S: Scalar> Unexpectedness<S> {
    /// `generation - description`. Returns `None` unless both costs are finite.
    pub fn between(generation: BitLength<S>, description: BitLength<S>) -> Option<Self> {
        if !(generation.is_finite() && description.is_finite()) {
            return None;
        }
        Some(Self::from_raw(generation.value() - description.value()))
    }

    pub fn from_raw(raw: S) -> Self {
        Unexpectedness {
            raw,
            clamped: raw.max(S::zero()),
        }
    }

    #[inline]
    pub fn raw(self) -> S {
        self.raw
    }

    #[inline]
    pub fn clamped(self) -> S {
        self.clamped
    }

    /// `2^-raw`, the posterior probability under the Bayes reading.
    pub fn posterior(self) -> S {
        (-self.raw).exp2()
    }
}

/// Information content `log2(1/p)` of an outcome with probability `p`.
///
/// `p = 0` yields an infinite length rather than an error.
pub fn bits_from_probability<S: Scalar>(p: S) -> Result<BitLength<S>> {
    if p.is_nan() || p < S::zero() || p > S::one() {
        return Err(Error::InvalidProbability {
            value: p.to_f64_lossy(),
        });
    }
    if p == S::zero() {
        return Ok(BitLength::infinite());
    }
    // -log2(1) is -0.0; normalise to +0.
    Ok(BitLength((-p.log2()).max(S::zero())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn information_examples() {
        assert_eq!(bits_from_probability(1.0f64).unwrap().value(), 0.0);
        assert_eq!(bits_from_probability(0.5f64).unwrap().value(), 1.0);
        // log2(100) = 6.643856189774724...
        let b = bits_from_probability(0.01f64).unwrap().value();
        assert!((b - 6.643_856_189_774_724).abs() < 1e-12);
        assert!((b - 6.6439).abs() < 5e-5);
        assert!(!bits_from_probability(0.0f64).unwrap().is_finite());
    }

    #[test]
    fn rejects_out_of_range() {
        assert!(matches!(
            bits_from_probability(-0.1f64),
            Err(Error::InvalidProbability { .. })
        ));
        assert!(bits_from_probability(1.5f64).is_err());
        assert!(bits_from_probability(f64::NAN).is_err());
    }

    #[test]
    fn bit_length_rejects_negative_and_nan() {
        assert!(BitLength::new(-1.0f64).is_err());
        assert!(BitLength::new(f64::NAN).is_err());
        assert!(BitLength::new(f64::INFINITY).is_ok());
    }

    #[test]
    fn powers_of_two_round_trip_exactly() {
        for l in 0..=60 {
            let p = (-(l as f64)).exp2();
            assert_eq!(bits_from_probability(p).unwrap().value(), l as f64, "L = {l}");
        }
    }

    #[test]
    fn f32_information() {
        assert_eq!(bits_from_probability(0.25f32).unwrap().value(), 2.0f32);
    }

    #[test]
    fn unexpectedness_clamp() {
        let u = Unexpectedness::from_raw(-2.0f64);
        assert_eq!(u.clamped(), 0.0);
        assert_eq!(u.raw(), -2.0);
        let inf = BitLength::<f64>::infinite();
        assert!(Unexpectedness::between(inf, BitLength::zero()).is_none());
    }

    proptest! {
        #[test]
        fn clamped_is_max_of_raw_and_zero(raw in -100.0f64..100.0) {
            let u = Unexpectedness::from_raw(raw);
            prop_assert_eq!(u.clamped(), raw.max(0.0));
        }

        #[test]
        fn information_is_nonnegative(p in 0.0f64..=1.0) {
            let b = bits_from_probability(p).unwrap().value();
            prop_assert!(b >= 0.0);
        }
    }
}
