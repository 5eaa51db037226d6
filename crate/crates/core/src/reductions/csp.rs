//! Binary constraint satisfaction over the alphabet `0..n`.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{check_format, from_json, FORMAT_VERSION};

/// A constraint between two distinct variables and the value pairs it
/// allows. Parallel constraints on the same pair are fine.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub u: usize,
    pub v: usize,
    pub allowed: Vec<(u32, u32)>,
}

impl Constraint {
    pub fn allows(&self, a: u32, b: u32) -> bool {
        self.allowed.contains(&(a, b))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspInstance {
    k: usize,
    n: u32,
    constraints: Vec<Constraint>,
}

impl CspInstance {
    /// `k` variables, values in `0..n`.
    pub fn new(k: usize, n: u32, mut constraints: Vec<Constraint>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Validation("alphabet must be nonempty".into()));
        }
        for (idx, c) in constraints.iter_mut().enumerate() {
            if c.u >= k || c.v >= k {
                return Err(Error::Validation(format!(
                    "constraint {idx} names a variable outside 0..{k}"
                )));
            }
            if c.u == c.v {
                return Err(Error::Validation(format!(
                    "constraint {idx} is a self-loop on {}",
                    c.u
                )));
            }
            if let Some(&(a, b)) = c.allowed.iter().find(|&&(a, b)| a >= n || b >= n) {
                return Err(Error::Validation(format!(
                    "constraint {idx} allows ({a}, {b}) outside the alphabet 0..{n}"
                )));
            }
            c.allowed.sort_unstable();
            c.allowed.dedup();
        }
        Ok(CspInstance { k, n, constraints })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Constraint endpoints per variable.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.k];
        for c in &self.constraints {
            deg[c.u] += 1;
            deg[c.v] += 1;
        }
        deg
    }

    pub fn check_three_regular(&self) -> Result<()> {
        match self
            .degrees()
            .into_iter()
            .enumerate()
            .find(|&(_, d)| d != 3)
        {
            Some((var, degree)) => Err(Error::NotThreeRegular { var, degree }),
            None => Ok(()),
        }
    }

    /// Whether `sigma` satisfies every constraint.
    pub fn satisfied_by(&self, sigma: &[u32]) -> bool {
        self.constraints
            .iter()
            .all(|c| c.allows(sigma[c.u], sigma[c.v]))
    }

    /// Variables sharing a constraint with `x`, without duplicates.
    pub fn neighbors(&self, x: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .constraints
            .iter()
            .filter_map(|c| match (c.u == x, c.v == x) {
                (true, _) => Some(c.v),
                (_, true) => Some(c.u),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// Fraction of constraints satisfied by `sigma`; 1 when there are none.
///
/// Panics if `sigma` does not assign every variable.
pub fn csp_value(csp: &CspInstance, sigma: &[u32]) -> Ratio<u64> {
    assert_eq!(sigma.len(), csp.k, "assignment must cover every variable");
    let total = csp.constraints.len() as u64;
    if total == 0 {
        return Ratio::from_integer(1);
    }
    let good = csp
        .constraints
        .iter()
        .filter(|c| c.allows(sigma[c.u], sigma[c.v]))
        .count() as u64;
    Ratio::new(good, total)
}

/// First satisfying assignment in lexicographic order, or `None`.
pub fn brute_force_csp(csp: &CspInstance) -> Option<Vec<u32>> {
    let mut sigma = vec![0u32; csp.k];
    loop {
        if csp.satisfied_by(&sigma) {
            return Some(sigma);
        }
        let mut i = 0;
        loop {
            if i == csp.k {
                return None;
            }
            sigma[i] += 1;
            if sigma[i] < csp.n {
                break;
            }
            sigma[i] = 0;
            i += 1;
        }
    }
}

/// Edges of a random 3-regular multigraph on `k` vertices without
/// self-loops, from the configuration model. `k` must be even and nonzero.
pub fn random_three_regular_edges(k: usize, rng: &mut impl Rng) -> Result<Vec<(usize, usize)>> {
    if k == 0 || k % 2 == 1 {
        return Err(Error::Validation(format!(
            "a 3-regular graph needs an even positive vertex count, got {k}"
        )));
    }
    let mut stubs: Vec<usize> = (0..k).flat_map(|v| [v, v, v]).collect();
    loop {
        stubs.shuffle(rng);
        let edges: Vec<(usize, usize)> = stubs
            .chunks(2)
            .map(|p| (p[0].min(p[1]), p[0].max(p[1])))
            .collect();
        if edges.iter().all(|&(a, b)| a != b) {
            return Ok(edges);
        }
    }
}

fn random_allowed(n: u32, density: f64, rng: &mut impl Rng) -> Vec<(u32, u32)> {
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|_| rng.gen_bool(density))
        .collect()
}

/// A random 3-regular CSP in which each pair is allowed independently with
/// probability `density`.
pub fn random_csp(k: usize, n: u32, density: f64, seed: u64) -> Result<CspInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_three_regular_edges(k, &mut rng)?;
    let constraints = edges
        .into_iter()
        .map(|(u, v)| Constraint {
            u,
            v,
            allowed: random_allowed(n, density, &mut rng),
        })
        .collect();
    CspInstance::new(k, n, constraints)
}

/// Like [`random_csp`], but every constraint also allows the values of a
/// hidden random assignment, which is returned alongside.
pub fn planted_csp(k: usize, n: u32, density: f64, seed: u64) -> Result<(CspInstance, Vec<u32>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edges = random_three_regular_edges(k, &mut rng)?;
    let sigma: Vec<u32> = (0..k).map(|_| rng.gen_range(0..n)).collect();
    let constraints = edges
        .into_iter()
        .map(|(u, v)| {
            let mut allowed = random_allowed(n, density, &mut rng);
            allowed.push((sigma[u], sigma[v]));
            Constraint { u, v, allowed }
        })
        .collect();
    Ok((CspInstance::new(k, n, constraints)?, sigma))
}

#[derive(Serialize, Deserialize)]
struct WireCsp {
    #[serde(default)]
    format: Option<u32>,
    k: usize,
    n: u32,
    constraints: Vec<Constraint>,
}

pub fn parse_csp(text: &str) -> Result<CspInstance> {
    let wire: WireCsp = from_json(text)?;
    check_format(wire.format)?;
    CspInstance::new(wire.k, wire.n, wire.constraints)
}

pub fn serialize_csp(csp: &CspInstance) -> String {
    let wire = WireCsp {
        format: Some(FORMAT_VERSION),
        k: csp.k,
        n: csp.n,
        constraints: csp.constraints.clone(),
    };
    let mut out = serde_json::to_string(&wire).expect("csp serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_pairs(n: u32) -> Vec<(u32, u32)> {
        (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect()
    }

    fn triple(allowed: Vec<(u32, u32)>) -> CspInstance {
        let c = |allowed: Vec<(u32, u32)>| Constraint {
            u: 0,
            v: 1,
            allowed,
        };
        CspInstance::new(
            2,
            2,
            vec![c(allowed.clone()), c(allowed.clone()), c(allowed)],
        )
        .unwrap()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(
            csp_value(&triple(all_pairs(2)), &[0, 1]),
            Ratio::from_integer(1)
        );
        assert_eq!(csp_value(&triple(vec![]), &[0, 1]), Ratio::from_integer(0));
        let none = CspInstance::new(2, 2, vec![]).unwrap();
        assert_eq!(csp_value(&none, &[0, 0]), Ratio::from_integer(1));
    }

    #[test]
    fn value_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for seed in 0..30 {
            let csp = random_csp(4, 3, 0.5, seed).unwrap();
            let sigma: Vec<u32> = (0..4).map(|_| rng.gen_range(0..3)).collect();
            let mut good = 0;
            for c in csp.constraints() {
                if c.allowed.iter().any(|&p| p == (sigma[c.u], sigma[c.v])) {
                    good += 1;
                }
            }
            assert_eq!(csp_value(&csp, &sigma), Ratio::new(good, 6));
        }
    }

    #[test]
    fn generators_are_three_regular() {
        for seed in 0..20 {
            for k in [2, 4, 6] {
                let csp = random_csp(k, 2, 0.5, seed).unwrap();
                csp.check_three_regular().unwrap();
                assert_eq!(csp.constraints().len(), 3 * k / 2);
                let (planted, sigma) = planted_csp(k, 3, 0.2, seed).unwrap();
                planted.check_three_regular().unwrap();
                assert!(planted.satisfied_by(&sigma));
                assert!(brute_force_csp(&planted).is_some());
            }
        }
        assert!(random_csp(3, 2, 0.5, 0).is_err());
    }

    #[test]
    fn validation() {
        let bad = |c: Constraint| CspInstance::new(2, 2, vec![c]).is_err();
        assert!(bad(Constraint {
            u: 0,
            v: 0,
            allowed: vec![]
        }));
        assert!(bad(Constraint {
            u: 0,
            v: 2,
            allowed: vec![]
        }));
        assert!(bad(Constraint {
            u: 0,
            v: 1,
            allowed: vec![(0, 2)]
        }));
        let short = CspInstance::new(
            3,
            2,
            vec![Constraint {
                u: 0,
                v: 1,
                allowed: vec![],
            }],
        )
        .unwrap();
        assert_eq!(
            short.check_three_regular(),
            Err(Error::NotThreeRegular { var: 0, degree: 1 })
        );
    }

    #[test]
    fn json_round_trip() {
        let csp = random_csp(4, 2, 0.5, 9).unwrap();
        assert_eq!(parse_csp(&serialize_csp(&csp)).unwrap(), csp);
        let text = r#"{"k":2,"n":2,"constraints":[{"u":0,"v":1,"allowed":[[1,1]]}]}"#;
        assert_eq!(
            parse_csp(text).unwrap().constraints()[0].allowed,
            vec![(1, 1)]
        );
        assert!(matches!(parse_csp("{"), Err(Error::MalformedInput(_))));
    }
}
