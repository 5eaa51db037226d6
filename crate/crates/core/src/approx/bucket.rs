//! Rounding coverage counts down to powers of a rational base, exactly.

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;

/// Ceilings `ceil(base^p)` for `p = 0, 1, ...`, extended on demand.
///
/// For an integer `c`, `base^p <= c` iff `ceil(base^p) <= c`, so the table
/// answers floor-log queries exactly.
#[derive(Debug, Clone)]
pub struct BucketScale {
    base: Ratio<u64>,
    num_pow: BigUint,
    den_pow: BigUint,
    ceilings: Vec<u64>,
}

impl BucketScale {
    /// # Panics
    /// If `base <= 1`.
    pub fn new(base: Ratio<u64>) -> Self {
        assert!(base > Ratio::from_integer(1), "bucket base must exceed 1");
        BucketScale {
            base,
            num_pow: BigUint::from(1u32),
            den_pow: BigUint::from(1u32),
            ceilings: vec![1],
        }
    }

    pub fn base(&self) -> Ratio<u64> {
        self.base
    }

    /// Extends the table until its last entry exceeds `c`.
    fn cover(&mut self, c: u64) {
        while *self.ceilings.last().unwrap() <= c {
            self.num_pow *= *self.base.numer();
            self.den_pow *= *self.base.denom();
            let ceil = self.num_pow.div_ceil(&self.den_pow);
            let value = u64::try_from(ceil).unwrap_or(u64::MAX);
            self.ceilings.push(value);
        }
    }

    /// Largest `p` with `base^p <= c`.
    ///
    /// # Panics
    /// If `c == 0`.
    pub fn exponent(&mut self, c: u64) -> u32 {
        assert!(c >= 1, "bucket exponent of zero");
        self.cover(c);
        (self.ceilings.partition_point(|&v| v <= c) - 1) as u32
    }

    /// `ceil(base^p)` for `p = floor(log_base c)`.
    pub fn value(&mut self, c: u64) -> u64 {
        let p = self.exponent(c);
        self.ceilings[p as usize]
    }

    /// Bucket value of a coverage count, with coverage 0 kept as 0.
    pub fn round(&mut self, c: u64) -> u64 {
        if c == 0 {
            0
        } else {
            self.value(c)
        }
    }

    /// `ceil(base^p)` for a given exponent.
    pub fn power_ceiling(&mut self, p: u32) -> u64 {
        while self.ceilings.len() <= p as usize {
            let last = *self.ceilings.last().unwrap();
            self.cover(last);
        }
        self.ceilings[p as usize]
    }

    /// Every value a rounded count in `0..=limit` can take, ascending and
    /// deduplicated, starting with 0.
    pub fn levels(&mut self, limit: u64) -> Vec<u64> {
        let mut out = vec![0];
        if limit >= 1 {
            self.cover(limit);
            out.extend(self.ceilings.iter().copied().filter(|&v| v <= limit));
            out.dedup();
        }
        out
    }

    /// True iff `v` is 0 or `ceil(base^p)` for some `p`.
    pub fn is_level(&mut self, v: u64) -> bool {
        v == 0 || {
            self.cover(v);
            self.ceilings.contains(&v)
        }
    }
}

/// `ceil(base^p)` with `p = floor(log_base c)`, by exact integer arithmetic.
pub fn bucket_value(c: u64, base: Ratio<u64>) -> u64 {
    BucketScale::new(base).value(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_for(k: u64) -> Ratio<u64> {
        Ratio::new(3 * k + 1, 3 * k)
    }

    #[test]
    fn base_three() {
        let mut b = BucketScale::new(base_for(3));
        assert_eq!((b.exponent(1), b.value(1)), (0, 1));
        assert_eq!((b.exponent(9), b.value(9)), (20, 9));
        assert_eq!((b.exponent(10), b.value(10)), (21, 10));
        assert_eq!(bucket_value(10, base_for(3)), 10);
    }

    #[test]
    fn base_two_powers() {
        let mut b = BucketScale::new(Ratio::from_integer(2));
        assert_eq!(b.value(7), 4);
        assert_eq!(b.value(8), 8);
        assert_eq!(b.levels(9), vec![0, 1, 2, 4, 8]);
        assert_eq!(b.levels(0), vec![0]);
        assert!(b.is_level(4) && b.is_level(0) && !b.is_level(5));
        assert_eq!(b.power_ceiling(10), 1024);
    }

    #[test]
    fn sandwich_small_range() {
        for k in 1..=4u64 {
            let base = base_for(k);
            let mut b = BucketScale::new(base);
            for c in 1..=500u64 {
                let v = b.value(c);
                assert!(v <= c);
                // c < base * v, cross-multiplied
                assert!(
                    u128::from(c) * u128::from(*base.denom())
                        < u128::from(*base.numer()) * u128::from(v)
                );
            }
        }
    }
}
