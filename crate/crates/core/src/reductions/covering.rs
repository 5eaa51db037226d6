//! Universe covering families and the knapsack construction built on them.
//!
//! A family of `r`-subsets of `0..n` is `(alpha, beta)`-covering when every
//! subfamily holding at least an `alpha` fraction of its sets covers at
//! least `(1 - beta) n` points.

use std::collections::BTreeMap;

use num_rational::Ratio;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::domset::next_combination;
use crate::error::{Error, Result};
use crate::reductions::csp::CspInstance;
use crate::reductions::mdk::MdkInstance;

/// Largest subfamily count [`VerifyMode::Exhaustive`] will walk.
pub const EXHAUSTIVE_LIMIT: u128 = 5_000_000;
/// Samples used by [`build_covering_family`] when exhaustive checking is
/// out of reach.
pub const BUILD_SAMPLES: usize = 2_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyMode {
    /// Every subfamily of the threshold size.
    Exhaustive,
    /// That many uniform subfamilies of the threshold size. A `false` is
    /// definitive; a `true` is only evidence.
    Sampled { samples: usize, seed: u64 },
}

fn check_unit(x: Ratio<u64>, name: &str, allow_one: bool) -> Result<()> {
    let one = Ratio::from_integer(1);
    if *x.numer() == 0 || x > one || (!allow_one && x == one) {
        return Err(Error::ParameterViolation(format!(
            "{name} = {x} is out of range"
        )));
    }
    Ok(())
}

fn log_bound(alpha: Ratio<u64>, beta: Ratio<u64>) -> f64 {
    let a = *alpha.numer() as f64 / *alpha.denom() as f64;
    let b = *beta.numer() as f64 / *beta.denom() as f64;
    (2.0 - a.ln()) / (1.0 / (1.0 - b)).ln()
}

/// The smallest `r` above `log_{1/(1-beta)}(e^2/alpha)`.
pub fn min_covering_r(alpha: Ratio<u64>, beta: Ratio<u64>) -> Result<usize> {
    check_unit(alpha, "alpha", true)?;
    check_unit(beta, "beta", false)?;
    Ok(log_bound(alpha, beta).floor() as usize + 1)
}

/// `ceil(alpha * size)`: the smallest subfamily the definition constrains.
fn threshold(alpha: Ratio<u64>, size: usize) -> usize {
    (alpha * Ratio::from_integer(size as u64))
        .ceil()
        .to_integer() as usize
}

fn covers(
    family: &[Vec<usize>],
    pick: &[usize],
    n: usize,
    beta: Ratio<u64>,
    seen: &mut [bool],
) -> bool {
    seen.iter_mut().for_each(|s| *s = false);
    let mut count = 0u64;
    for &i in pick {
        for &x in &family[i] {
            if !std::mem::replace(&mut seen[x], true) {
                count += 1;
            }
        }
    }
    // count >= (1 - beta) n
    count * beta.denom() >= (beta.denom() - beta.numer()) * n as u64
}

fn binomial(n: usize, k: usize) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Checks the covering property. Unions only grow with the subfamily, so
/// subfamilies of exactly `ceil(alpha |F|)` sets decide it.
pub fn verify_covering_family(
    family: &[Vec<usize>],
    n: usize,
    alpha: Ratio<u64>,
    beta: Ratio<u64>,
    mode: VerifyMode,
) -> Result<bool> {
    if let Some(x) = family.iter().flatten().find(|&&x| x >= n) {
        return Err(Error::Validation(format!("point {x} is outside 0..{n}")));
    }
    let size = threshold(alpha, family.len());
    let mut seen = vec![false; n];
    match mode {
        VerifyMode::Exhaustive => {
            let count = binomial(family.len(), size).unwrap_or(u128::MAX);
            if count > EXHAUSTIVE_LIMIT {
                return Err(Error::BudgetExceeded(format!(
                    "{count} subfamilies exceed the exhaustive limit {EXHAUSTIVE_LIMIT}"
                )));
            }
            let mut combo: Vec<usize> = (0..size).collect();
            loop {
                if !covers(family, &combo, n, beta, &mut seen) {
                    return Ok(false);
                }
                if !next_combination(&mut combo, family.len()) {
                    return Ok(true);
                }
            }
        }
        VerifyMode::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..samples {
                let pick = sample(&mut rng, family.len(), size).into_vec();
                if !covers(family, &pick, n, beta, &mut seen) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
    }
}

/// Samples families of `ceil(n / alpha)` uniform `r`-subsets of `0..n` and
/// returns the first that verifies: exhaustively when the subfamily count
/// allows, otherwise by [`BUILD_SAMPLES`] samples.
pub fn build_covering_family(
    n: usize,
    alpha: Ratio<u64>,
    beta: Ratio<u64>,
    r: usize,
    seed: u64,
    trials: usize,
) -> Result<Option<Vec<Vec<usize>>>> {
    let bound = log_bound(alpha, beta);
    check_unit(alpha, "alpha", true)?;
    check_unit(beta, "beta", false)?;
    if (r as f64) <= bound {
        return Err(Error::ParameterViolation(format!(
            "r = {r} must exceed log_(1/(1-beta))(e^2/alpha) = {bound:.4}"
        )));
    }
    if r == 0 || r > n {
        return Err(Error::ParameterViolation(format!(
            "r = {r} must lie in 1..={n}"
        )));
    }
    let (num, den) = (*alpha.numer(), *alpha.denom());
    let size = (n as u64 * den).div_ceil(num) as usize;
    let exhaustive = binomial(size, threshold(alpha, size)).is_some_and(|c| c <= EXHAUSTIVE_LIMIT);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let family: Vec<Vec<usize>> = (0..size)
            .map(|_| {
                let mut set = sample(&mut rng, n, r).into_vec();
                set.sort_unstable();
                set
            })
            .collect();
        let mode = if exhaustive {
            VerifyMode::Exhaustive
        } else {
            VerifyMode::Sampled {
                samples: BUILD_SAMPLES,
                seed: seed ^ trial as u64,
            }
        };
        if verify_covering_family(&family, n, alpha, beta, mode)? {
            return Ok(Some(family));
        }
    }
    Ok(None)
}

/// Knapsack instance built from a CSP and a family of variable sets, with
/// the bookkeeping needed to map assignments to vectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoveringReduction {
    pub mdk: MdkInstance,
    /// Closed neighbourhood of each family set, sorted.
    pub neighborhoods: Vec<Vec<usize>>,
    /// Per vector: its family set and the values it gives the
    /// neighbourhood, in neighbourhood order.
    pub local: Vec<(usize, Vec<u32>)>,
    pub q: u64,
}

impl CoveringReduction {
    /// One vector per family set agreeing with `sigma`, or `None` if
    /// `sigma` violates a constraint inside some neighbourhood.
    pub fn solution_vectors(&self, sigma: &[u32]) -> Option<Vec<usize>> {
        let mut out = Vec::with_capacity(self.neighborhoods.len());
        for (i, hood) in self.neighborhoods.iter().enumerate() {
            let want: Vec<u32> = hood.iter().map(|&u| sigma[u]).collect();
            out.push(
                self.local
                    .iter()
                    .position(|(s, vals)| *s == i && *vals == want)?,
            );
        }
        Some(out)
    }
}

fn closed_neighborhood(csp: &CspInstance, set: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = set.iter().flat_map(|&x| csp.neighbors(x)).collect();
    out.extend_from_slice(set);
    out.sort_unstable();
    out.dedup();
    out
}

/// Local assignments of `hood` satisfying every constraint inside it.
fn local_solutions(csp: &CspInstance, hood: &[usize], budget: u64) -> Result<Vec<Vec<u32>>> {
    let n = csp.n();
    let total = u64::from(n).checked_pow(hood.len() as u32);
    if total.is_none_or(|t| t > budget) {
        return Err(Error::EnumerationBudgetExceeded(format!(
            "{n}^{} local assignments exceed {budget}",
            hood.len()
        )));
    }
    let pos = |x: usize| hood.binary_search(&x).ok();
    let inside: Vec<(usize, usize, &crate::reductions::csp::Constraint)> = csp
        .constraints()
        .iter()
        .filter_map(|c| Some((pos(c.u)?, pos(c.v)?, c)))
        .collect();
    let mut out = Vec::new();
    let mut vals = vec![0u32; hood.len()];
    loop {
        if inside.iter().all(|&(a, b, c)| c.allows(vals[a], vals[b])) {
            out.push(vals.clone());
        }
        let mut i = hood.len();
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            vals[i] += 1;
            if vals[i] < n {
                break;
            }
            vals[i] = 0;
        }
    }
}

/// Encodes a CSP through a family of variable sets `A_0, A_1, ...`.
///
/// Dimensions: a guard per set, then for each `i < j` and each variable
/// `u` in both closed neighbourhoods `N[A_i]` and `N[A_j]`, a `+` and a `-`
/// dimension. Each locally satisfying assignment `g` of `N[A_i]` gives a
/// vector with 1 on guard `i`. On a shared dimension `(lo, hi, u)`, with
/// `x = g(u) + 1`, the lower-indexed set puts `Q - x` on `+` and `Q + x` on
/// `-`, the higher-indexed set the reverse, so two chosen vectors reach `2Q`
/// on both exactly when they agree on `u`. The target is 1 on guards and
/// `2Q` elsewhere; `k` is the family size. `Q` defaults to `10 n |family|`.
///
/// `budget` bounds the local assignments enumerated per set.
pub fn csp_to_mdk_covering(
    csp: &CspInstance,
    family: &[Vec<usize>],
    q: Option<u64>,
    budget: u64,
) -> Result<CoveringReduction> {
    let n = csp.n();
    if let Some(x) = family.iter().flatten().find(|&&x| x >= csp.k()) {
        return Err(Error::Validation(format!(
            "family names variable {x} outside 0..{}",
            csp.k()
        )));
    }
    let q = q.unwrap_or(10 * u64::from(n) * family.len() as u64);
    if q < u64::from(n) {
        return Err(Error::ParameterViolation(format!(
            "Q = {q} is below the alphabet size {n}"
        )));
    }
    let hoods: Vec<Vec<usize>> = family.iter().map(|a| closed_neighborhood(csp, a)).collect();
    let sets = family.len();

    let mut dim_of: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut dlabels: Vec<String> = (0..sets).map(|i| format!("guard A{i}")).collect();
    for i in 0..sets {
        for j in i + 1..sets {
            for &u in hoods[i]
                .iter()
                .filter(|u| hoods[j].binary_search(u).is_ok())
            {
                dim_of.insert((i, j, u), dlabels.len());
                dlabels.push(format!("A{i}-A{j}-x{u}+"));
                dlabels.push(format!("A{i}-A{j}-x{u}-"));
            }
        }
    }
    let d = dlabels.len();

    let mut vectors = Vec::new();
    let mut vlabels = Vec::new();
    let mut local = Vec::new();
    for (i, hood) in hoods.iter().enumerate() {
        for vals in local_solutions(csp, hood, budget)? {
            let mut vec = vec![0u64; d];
            vec[i] = 1;
            for (p, &u) in hood.iter().enumerate() {
                let x = u64::from(vals[p]) + 1;
                for j in (0..sets).filter(|&j| j != i) {
                    let key = (i.min(j), i.max(j), u);
                    if let Some(&plus) = dim_of.get(&key) {
                        let (a, b) = if i < j {
                            (q - x, q + x)
                        } else {
                            (q + x, q - x)
                        };
                        vec[plus] = a;
                        vec[plus + 1] = b;
                    }
                }
            }
            let desc: Vec<String> = hood
                .iter()
                .zip(&vals)
                .map(|(u, v)| format!("x{u}={v}"))
                .collect();
            vlabels.push(format!("A{i}:{}", desc.join(",")));
            vectors.push(vec);
            local.push((i, vals));
        }
        if vectors.len() as u64 > budget {
            return Err(Error::EnumerationBudgetExceeded(format!(
                "{} vectors exceed {budget}",
                vectors.len()
            )));
        }
    }

    let mut target = vec![1u64; sets];
    target.resize(d, 2 * q);
    let mut mdk = MdkInstance::new(vectors, target, sets)?;
    mdk.dim_labels = Some(dlabels);
    mdk.vector_labels = Some(vlabels);
    Ok(CoveringReduction {
        mdk,
        neighborhoods: hoods,
        local,
        q,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::csp::{brute_force_csp, planted_csp, Constraint};
    use crate::reductions::mdk::{solve_mdk_exact, verify_mdk, DEFAULT_MDK_BUDGET};

    fn ratio(a: u64, b: u64) -> Ratio<u64> {
        Ratio::new(a, b)
    }

    #[test]
    fn trivial_families() {
        let whole = vec![(0..4).collect::<Vec<_>>(); 3];
        for mode in [
            VerifyMode::Exhaustive,
            VerifyMode::Sampled {
                samples: 20,
                seed: 1,
            },
        ] {
            assert!(verify_covering_family(&whole, 4, ratio(1, 2), ratio(1, 4), mode).unwrap());
            let single = vec![vec![0]; 3];
            assert!(!verify_covering_family(&single, 4, ratio(1, 2), ratio(1, 2), mode).unwrap());
        }
        // beta close to 1: one point is enough.
        let single = vec![vec![2]; 4];
        assert!(verify_covering_family(
            &single,
            4,
            ratio(1, 2),
            ratio(3, 4),
            VerifyMode::Exhaustive
        )
        .unwrap());
    }

    #[test]
    fn parameter_checks() {
        assert_eq!(min_covering_r(ratio(1, 2), ratio(1, 2)).unwrap(), 4);
        assert_eq!(min_covering_r(ratio(1, 2), ratio(1, 3)).unwrap(), 7);
        assert!(matches!(
            build_covering_family(6, ratio(1, 1), ratio(1, 2), 2, 0, 5),
            Err(Error::ParameterViolation(_))
        ));
        assert!(matches!(
            build_covering_family(6, ratio(1, 2), ratio(1, 3), 7, 0, 5),
            Err(Error::ParameterViolation(_))
        ));
    }

    #[test]
    fn builds_micro_family() {
        let fam = build_covering_family(6, ratio(1, 2), ratio(1, 2), 4, 1, 50)
            .unwrap()
            .unwrap();
        assert_eq!(fam.len(), 12);
        assert!(fam.iter().all(|s| s.len() == 4));
        assert!(
            verify_covering_family(&fam, 6, ratio(1, 2), ratio(1, 2), VerifyMode::Exhaustive)
                .unwrap()
        );
    }

    #[test]
    fn sampled_rejection_is_confirmed_exhaustively() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..40 {
            let fam: Vec<Vec<usize>> = (0..6).map(|_| sample(&mut rng, 6, 2).into_vec()).collect();
            let sampled = verify_covering_family(
                &fam,
                6,
                ratio(1, 2),
                ratio(1, 3),
                VerifyMode::Sampled {
                    samples: 30,
                    seed: 3,
                },
            )
            .unwrap();
            let exact =
                verify_covering_family(&fam, 6, ratio(1, 2), ratio(1, 3), VerifyMode::Exhaustive)
                    .unwrap();
            assert!(sampled || !exact);
        }
    }

    fn path_csp() -> CspInstance {
        // 0 - 1 - 2, values 0..2, equality constraints.
        let eq = vec![(0, 0), (1, 1)];
        CspInstance::new(
            3,
            2,
            vec![
                Constraint {
                    u: 0,
                    v: 1,
                    allowed: eq.clone(),
                },
                Constraint {
                    u: 1,
                    v: 2,
                    allowed: eq,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_set_yields_global_solutions() {
        let csp = path_csp();
        let red = csp_to_mdk_covering(&csp, &[vec![0, 1, 2]], None, 1000).unwrap();
        assert_eq!(red.mdk.d(), 1);
        assert_eq!(red.mdk.vectors().len(), 2);
        for i in 0..2 {
            assert!(verify_mdk(&red.mdk, &[i]));
        }
    }

    #[test]
    fn overlapping_sets() {
        let csp = path_csp();
        let family = vec![vec![0, 1], vec![1, 2]];
        let red = csp_to_mdk_covering(&csp, &family, None, 1000).unwrap();
        let k = csp.k();
        assert!(red.mdk.d() <= family.len() + family.len().pow(2) * k);
        let sigma = brute_force_csp(&csp).unwrap();
        let mapped = red.solution_vectors(&sigma).unwrap();
        assert!(verify_mdk(&red.mdk, &mapped));
        let sol = solve_mdk_exact(&red.mdk, 2, DEFAULT_MDK_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(sol.len(), family.len());

        // Disagreeing on the shared variable misses the target.
        let a = red
            .local
            .iter()
            .position(|(s, v)| *s == 0 && v[0] == 0)
            .unwrap();
        let b = red
            .local
            .iter()
            .position(|(s, v)| *s == 1 && v[0] == 1)
            .unwrap();
        assert!(!verify_mdk(&red.mdk, &[a, b]));
    }

    #[test]
    fn planted_instances_reduce_soundly() {
        for seed in 0..10 {
            let (csp, sigma) = planted_csp(4, 2, 0.3, seed).unwrap();
            let family = vec![vec![0, 1], vec![2, 3]];
            let red = csp_to_mdk_covering(&csp, &family, None, 10_000).unwrap();
            let mapped = red.solution_vectors(&sigma).unwrap();
            assert!(verify_mdk(&red.mdk, &mapped));
        }
        assert!(matches!(
            csp_to_mdk_covering(&path_csp(), &[vec![0, 1, 2]], None, 4),
            Err(Error::EnumerationBudgetExceeded(_))
        ));
    }
}
