use caphs::exact::{solve_exact_weighted, DEFAULT_EXACT_BUDGET};
use caphs::feasibility::check_feasible;
use caphs::reductions::{
    brute_force_csp, csp_solution_vectors, csp_to_mdk, csp_to_mdk_covering, mdk_to_cvc,
    mdk_to_wcvc, planted_csp, random_csp, random_mdk, solve_mdk_exact, verify_mdk, CspInstance,
    MdkInstance, DEFAULT_MDK_BUDGET,
};

/// Smallest subset of vectors meeting the target, by plain subset scan.
fn min_knapsack(mdk: &MdkInstance) -> Option<usize> {
    let n = mdk.vectors().len();
    (0u32..1 << n)
        .filter(|mask| {
            (0..mdk.d()).all(|j| {
                let sum: u64 = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| mdk.vectors()[i][j])
                    .sum();
                sum >= mdk.target()[j]
            })
        })
        .map(|mask| mask.count_ones() as usize)
        .filter(|&size| size <= mdk.k)
        .min()
}

fn decode_variables(csp: &CspInstance, indices: &[usize]) -> Vec<u32> {
    let n = csp.n() as usize;
    let mut sigma = vec![u32::MAX; csp.k()];
    for &idx in indices.iter().filter(|&&i| i < csp.k() * n) {
        assert_eq!(sigma[idx / n], u32::MAX, "two vectors for one variable");
        sigma[idx / n] = (idx % n) as u32;
    }
    assert!(sigma.iter().all(|&a| a != u32::MAX));
    sigma
}

fn small_csps() -> Vec<CspInstance> {
    let mut out = Vec::new();
    for seed in 0..12 {
        out.push(planted_csp(2, 2, 0.3, seed).unwrap().0);
        out.push(random_csp(2, 2, 0.3, 100 + seed).unwrap());
        out.push(random_csp(4, 3, 0.4, 200 + seed).unwrap());
    }
    out
}

#[test]
fn csp_knapsack_solutions_are_satisfying_assignments() {
    for csp in small_csps() {
        let mdk = csp_to_mdk(&csp).unwrap();
        let found = solve_mdk_exact(&mdk, mdk.k, DEFAULT_MDK_BUDGET).unwrap();
        match brute_force_csp(&csp) {
            Some(sigma) => {
                let vs = csp_solution_vectors(&csp, &sigma).unwrap();
                assert!(verify_mdk(&mdk, &vs));
                let found = found.expect("satisfiable CSP gives a knapsack solution");
                assert!(csp.satisfied_by(&decode_variables(&csp, &found)));
            }
            None => assert_eq!(found, None),
        }
    }
}

#[test]
fn cover_and_knapsack_optima_agree() {
    for seed in 0..40 {
        let mdk = random_mdk(3 + (seed % 3) as usize, 1 + (seed % 2) as usize, 2, seed);
        let red = mdk_to_cvc(&mdk).unwrap();
        let best = min_knapsack(&mdk);
        let exact = solve_mdk_exact(&mdk, mdk.k, DEFAULT_MDK_BUDGET).unwrap();
        assert_eq!(exact.as_ref().map(Vec::len), best);
        if let Some(v) = exact {
            assert!(check_feasible(&red.inst, &red.lift(&v)).unwrap().is_some());
        }

        let w = mdk_to_wcvc(&mdk).unwrap();
        let opt = solve_exact_weighted(&w.inst, w.k as u32, DEFAULT_EXACT_BUDGET).unwrap();
        match (best, opt) {
            (Some(size), Some(opt)) => {
                assert_eq!(opt.weight, size as u64);
                assert!((0..w.dims).all(|j| opt.sol.copies(w.dim_prime(j)) == 0));
                assert!(verify_mdk(&mdk, &w.restrict(&opt.sol)));
            }
            (None, Some(opt)) => assert!(opt.weight > w.weight_budget.unwrap()),
            (best, opt) => panic!("seed {seed}: knapsack {best:?}, cover {opt:?}"),
        }
    }
}

#[test]
fn covering_reduction_round_trip() {
    let family = vec![vec![0, 1], vec![2, 3], vec![1, 2]];
    let mut seen = [0, 0];
    for seed in 0..15 {
        let csp = random_csp(4, 2, 0.5, 300 + seed).unwrap();
        let red = csp_to_mdk_covering(&csp, &family, None, 1_000_000).unwrap();
        assert_eq!(red.mdk.k, family.len());
        let found = solve_mdk_exact(&red.mdk, red.mdk.k, DEFAULT_MDK_BUDGET).unwrap();
        match brute_force_csp(&csp) {
            Some(sigma) => {
                seen[0] += 1;
                assert!(verify_mdk(&red.mdk, &red.solution_vectors(&sigma).unwrap()));
                let found = found.unwrap();
                let mut merged = vec![None; csp.k()];
                for &idx in &found {
                    let (set, vals) = &red.local[idx];
                    for (&u, &a) in red.neighborhoods[*set].iter().zip(vals) {
                        assert!(merged[u].is_none_or(|b| b == a), "chosen vectors disagree");
                        merged[u] = Some(a);
                    }
                }
                let sigma: Vec<u32> = merged.into_iter().map(Option::unwrap).collect();
                assert!(csp.satisfied_by(&sigma));
            }
            None => {
                seen[1] += 1;
                assert_eq!(found, None);
            }
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}
