//! Seeded random instance generation.

use std::ops::RangeInclusive;

use rand::distributions::{Distribution, WeightedIndex};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{Element, ElementId, Instance, Multiplicity};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenParams {
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub cap_range: RangeInclusive<u64>,
    pub weight_range: RangeInclusive<u64>,
    pub mult_range: RangeInclusive<u32>,
}

impl GenParams {
    /// Unit weights and multiplicity one; capacities in `1..=3`.
    pub fn unweighted(n: usize, m: usize, d: usize) -> Self {
        GenParams {
            n,
            m,
            d,
            cap_range: 1..=3,
            weight_range: 1..=1,
            mult_range: 1..=1,
        }
    }

    /// Weights in `1..=9` and multiplicities in `1..=2`.
    pub fn weighted(n: usize, m: usize, d: usize) -> Self {
        GenParams {
            weight_range: 1..=9,
            mult_range: 1..=2,
            ..Self::unweighted(n, m, d)
        }
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Builds an instance over ids `0..n`.
///
/// Each set is uniform over the nonempty subsets of size at most `d`: its
/// size is drawn proportionally to `C(n, size)` and its members uniformly.
///
/// # Panics
/// If `n`, `m` or `d` is zero or a range is empty.
pub fn generate_instance(params: &GenParams, seed: u64) -> Instance {
    assert!(params.n >= 1 && params.m >= 1 && params.d >= 1);
    assert!(!params.cap_range.is_empty());
    assert!(!params.weight_range.is_empty());
    assert!(!params.mult_range.is_empty() && *params.mult_range.start() >= 1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let elements: Vec<Element> = (0..params.n as u32)
        .map(|id| {
            let cap = rng.gen_range(params.cap_range.clone());
            let mult = Multiplicity::Bounded(rng.gen_range(params.mult_range.clone()));
            let weight = rng.gen_range(params.weight_range.clone());
            Element::new(id, cap, mult, weight)
        })
        .collect();

    let max_size = params.d.min(params.n);
    let sizes = WeightedIndex::new((1..=max_size).map(|s| binomial(params.n, s)))
        .expect("binomial weights are positive");
    let family = (0..params.m)
        .map(|_| {
            let size = sizes.sample(&mut rng) + 1;
            sample(&mut rng, params.n, size)
                .into_iter()
                .map(|x| ElementId(x as u32))
                .collect()
        })
        .collect();
    Instance::new(params.d, elements, family).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_parameters() {
        let p = GenParams {
            cap_range: 1..=1,
            ..GenParams::unweighted(1, 1, 1)
        };
        let inst = generate_instance(&p, 99);
        assert_eq!(inst.family(), &[vec![ElementId(0)]]);
        assert_eq!(inst.elements(), &[Element::simple(0, 1)]);
    }

    #[test]
    fn deterministic() {
        let p = GenParams::weighted(6, 8, 3);
        assert_eq!(generate_instance(&p, 5), generate_instance(&p, 5));
        assert_ne!(generate_instance(&p, 5), generate_instance(&p, 6));
    }

    #[test]
    fn set_sizes_are_roughly_binomial() {
        // n=4, d=2: sizes 1 and 2 have weights 4 and 6.
        let p = GenParams::unweighted(4, 2000, 2);
        let inst = generate_instance(&p, 1);
        let pairs = inst.family().iter().filter(|s| s.len() == 2).count();
        assert!((1080..=1320).contains(&pairs), "{pairs}");
    }
}
