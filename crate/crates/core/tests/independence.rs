use std::collections::BTreeMap;

use caphs::independence::{
    count_conflicting_pairs, find_independent_set, is_conflicting, IndependenceContext,
};
use caphs::{Element, ElementId, Error, Instance};
use num_rational::Ratio;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Two partial-solution elements `0` and `1`, `others` further elements,
/// and `m` sets of size `d` each holding one of the two plus `d - 1` others.
fn synthetic(
    seed: u64,
    others: u32,
    m: usize,
    d: usize,
) -> (Instance, BTreeMap<ElementId, Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<u32> = (2..others + 2).collect();
    let mut family = Vec::new();
    let mut stars: BTreeMap<ElementId, Vec<usize>> = BTreeMap::new();
    for idx in 0..m {
        let s = rng.gen_range(0..2u32);
        let mut set: Vec<ElementId> = pool
            .choose_multiple(&mut rng, d - 1)
            .map(|&x| ElementId(x))
            .collect();
        set.push(ElementId(s));
        set.sort_unstable();
        family.push(set);
        stars.entry(ElementId(s)).or_default().push(idx);
    }
    let elements = (0..others + 2)
        .map(|i| Element::simple(i, m as u64))
        .collect();
    (Instance::new(d, elements, family).unwrap(), stars)
}

#[test]
fn large_parts_always_yield_an_independent_set() {
    for seed in 0..50 {
        let (inst, stars) = synthetic(seed, 600, 400, 3);
        let ctx = IndependenceContext::new(&inst, stars, Ratio::new(1, 4)).unwrap();
        let mut ids: Vec<ElementId> = (2..602).map(ElementId).collect();
        ids.shuffle(&mut ChaCha8Rng::seed_from_u64(seed + 1000));
        let parts: Vec<Vec<ElementId>> = ids.chunks(200).map(<[ElementId]>::to_vec).collect();
        let quotas = [2, 1, 2];
        let picked = find_independent_set(&ctx, &parts, &quotas, &inst)
            .unwrap()
            .unwrap();
        for (part, &q) in parts.iter().zip(&quotas) {
            assert_eq!(
                picked.iter().filter(|x| part.contains(x)).count(),
                q as usize
            );
        }
        assert_eq!(count_conflicting_pairs(&ctx, &picked, &inst), 0);
    }
}

#[test]
fn quota_and_shape_errors() {
    let (inst, stars) = synthetic(0, 10, 10, 2);
    let ctx = IndependenceContext::new(&inst, stars, Ratio::new(1, 2)).unwrap();
    let parts = vec![vec![ElementId(2)]];
    assert_eq!(
        find_independent_set(&ctx, &parts, &[3], &inst),
        Err(Error::QuotaInvalid(3))
    );
    assert!(find_independent_set(&ctx, &parts, &[1, 1], &inst).is_err());
    assert_eq!(find_independent_set(&ctx, &parts, &[2], &inst), Ok(None));
}

proptest! {
    #[test]
    fn conflicts_are_symmetric_and_bounded(seed in any::<u64>(), others in 3u32..25, m in 1usize..30, d in 2usize..4, den in 1u64..5) {
        prop_assume!(d - 1 <= others as usize);
        let (inst, stars) = synthetic(seed, others, m, d);
        let ctx = IndependenceContext::new(&inst, stars, Ratio::new(1, den)).unwrap();
        let xs: Vec<ElementId> = (2..others + 2).map(ElementId).collect();
        let mut pairs = 0;
        for &x in &xs {
            let mut with_x = 0;
            for &y in &xs {
                if x == y { continue; }
                let c = is_conflicting(&ctx, x, y, &inst);
                prop_assert_eq!(c, is_conflicting(&ctx, y, x, &inst));
                if c { with_x += 1; if x < y { pairs += 1; } }
            }
            // Every conflicting partner shares a set with x.
            prop_assert!(with_x <= inst.sets_containing(x).len() * (d - 1));
        }
        prop_assert_eq!(count_conflicting_pairs(&ctx, &xs, &inst), pairs);
    }
}
