//! Packet value scalar.
//!
//! Values are exact unsigned integers so greedy tie-breaking is reproducible.
//! Callers holding real-valued weights scale them to a fixed-point integer
//! before building an instance.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::iter::Sum;
use std::str::FromStr;

use num_traits::{PrimInt, Unsigned};

/// Scalar used for packet values and weighted throughput.
pub trait Weight: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Sum + Send + Sync + 'static {
    /// Sum of an iterator of weights.
    fn total<I: IntoIterator<Item = Self>>(iter: I) -> Self {
        iter.into_iter().fold(Self::zero(), |acc, v| acc + v)
    }
}

impl<T> Weight for T where T: PrimInt + Unsigned + Hash + Debug + Display + FromStr + Sum + Send + Sync + 'static {}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_generic<W: Weight>(xs: &[W]) -> W {
        W::total(xs.iter().copied())
    }

    #[test]
    fn widths_agree() {
        assert_eq!(sum_generic(&[3u32, 4, 5]), 12);
        assert_eq!(sum_generic(&[3u64, 4, 5]), 12);
        assert_eq!(sum_generic(&[3u128, 4, 5]), 12);
        assert_eq!(sum_generic::<u16>(&[]), 0);
    }
}
