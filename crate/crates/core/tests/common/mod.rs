//! Seeded corpora shared by the integration tests.
#![allow(dead_code)]

use caphs::exact::{solve_exact, solve_exact_weighted, ExactSolution, DEFAULT_EXACT_BUDGET};
use caphs::generate::{generate_instance, GenParams};
use caphs::{Instance, Multiplicity, Solution};
use rand::Rng;

pub struct Case {
    pub seed: u64,
    pub k: u32,
    pub inst: Instance,
    pub opt: ExactSolution,
}

fn shape(seed: u64) -> (usize, usize, usize) {
    let n = 5 + (seed % 2) as usize;
    let m = 4 + (seed / 2 % 5) as usize;
    let d = 2 + (seed / 10 % 2) as usize;
    (n, m, d)
}

/// Unweighted instances whose minimum solution has size exactly `k`.
pub fn unweighted_cases(k: u32, count: usize, base_seed: u64) -> Vec<Case> {
    let mut out = Vec::new();
    let mut seed = base_seed;
    while out.len() < count {
        let (n, m, d) = shape(seed);
        let inst = generate_instance(&GenParams::unweighted(n, m, d), seed);
        if let Some(opt) = solve_exact(&inst, k, DEFAULT_EXACT_BUDGET).unwrap() {
            if opt.sol.size() == u64::from(k) {
                out.push(Case { seed, k, inst, opt });
            }
        }
        seed += 1;
    }
    out
}

/// Weighted instances with a minimum-weight solution of size at most `k`.
pub fn weighted_cases(k: u32, count: usize, base_seed: u64) -> Vec<Case> {
    let mut out = Vec::new();
    let mut seed = base_seed;
    while out.len() < count {
        let (n, m, d) = shape(seed);
        let inst = generate_instance(&GenParams::weighted(n, m, d), seed);
        if let Some(opt) = solve_exact_weighted(&inst, k, DEFAULT_EXACT_BUDGET).unwrap() {
            out.push(Case { seed, k, inst, opt });
        }
        seed += 1;
    }
    out
}

/// A random copy vector respecting multiplicities, up to two copies each.
pub fn random_solution(inst: &Instance, rng: &mut impl Rng) -> Solution {
    let mut sol = Solution::new();
    for e in inst.elements() {
        let limit = match e.mult {
            Multiplicity::Bounded(b) => b.min(2),
            Multiplicity::Unbounded => 2,
        };
        let c = rng.gen_range(0..=limit);
        if c > 0 {
            sol.add(e.id, c);
        }
    }
    sol
}
