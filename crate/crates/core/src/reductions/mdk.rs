//! Multi-dimensional knapsack: pick vectors whose componentwise sum
//! dominates a target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::{check_format, from_json, FORMAT_VERSION};
use crate::reductions::csp::CspInstance;

/// Default node budget of [`solve_mdk_exact`].
pub const DEFAULT_MDK_BUDGET: u64 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MdkInstance {
    vectors: Vec<Vec<u64>>,
    target: Vec<u64>,
    /// Intended solution size.
    pub k: usize,
    /// Human-readable names of dimensions and vectors, when a construction
    /// produced them.
    pub dim_labels: Option<Vec<String>>,
    pub vector_labels: Option<Vec<String>>,
}

impl MdkInstance {
    pub fn new(vectors: Vec<Vec<u64>>, target: Vec<u64>, k: usize) -> Result<Self> {
        if let Some(i) = vectors.iter().position(|v| v.len() != target.len()) {
            return Err(Error::Validation(format!(
                "vector {i} has dimension {} but the target has {}",
                vectors[i].len(),
                target.len()
            )));
        }
        Ok(MdkInstance {
            vectors,
            target,
            k,
            dim_labels: None,
            vector_labels: None,
        })
    }

    pub fn d(&self) -> usize {
        self.target.len()
    }

    pub fn vectors(&self) -> &[Vec<u64>] {
        &self.vectors
    }

    pub fn target(&self) -> &[u64] {
        &self.target
    }

    /// Sum of every vector, per dimension.
    pub fn column_sums(&self) -> Vec<u64> {
        self.sum_of(0..self.vectors.len())
    }

    fn sum_of(&self, indices: impl IntoIterator<Item = usize>) -> Vec<u64> {
        let mut sum = vec![0u64; self.d()];
        for i in indices {
            for (s, x) in sum.iter_mut().zip(&self.vectors[i]) {
                *s += x;
            }
        }
        sum
    }
}

/// Whether the listed vectors, each used once, dominate the target.
/// Out-of-range or repeated indices make the answer `false`.
pub fn verify_mdk(mdk: &MdkInstance, indices: &[usize]) -> bool {
    let mut seen = vec![false; mdk.vectors.len()];
    for &i in indices {
        if i >= seen.len() || std::mem::replace(&mut seen[i], true) {
            return false;
        }
    }
    mdk.sum_of(indices.iter().copied())
        .iter()
        .zip(&mdk.target)
        .all(|(s, t)| s >= t)
}

struct Search<'a> {
    mdk: &'a MdkInstance,
    sum: Vec<u64>,
    banned: Vec<bool>,
    chosen: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn take(&mut self, v: usize) {
        self.chosen.push(v);
        self.banned[v] = true;
        for (s, x) in self.sum.iter_mut().zip(&self.mdk.vectors[v]) {
            *s += x;
        }
    }

    fn untake(&mut self, v: usize) {
        self.chosen.pop();
        for (s, x) in self.sum.iter_mut().zip(&self.mdk.vectors[v]) {
            *s -= x;
        }
    }

    fn deficit(&self, j: usize) -> u64 {
        self.mdk.target[j].saturating_sub(self.sum[j])
    }

    fn dfs(&mut self, left: usize) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::BudgetExceeded(format!(
                "knapsack search of {} nodes",
                self.budget
            )));
        }
        let open: Vec<usize> = (0..self.sum.len())
            .filter(|&j| self.deficit(j) > 0)
            .collect();
        if open.is_empty() {
            return Ok(true);
        }
        if left == 0 {
            return Ok(false);
        }
        let free: Vec<usize> = (0..self.mdk.vectors.len())
            .filter(|&v| !self.banned[v])
            .collect();

        // Every open dimension must be closable by its `left` largest
        // free entries.
        let mut branch: Option<(usize, usize)> = None;
        for &j in &open {
            let mut vals: Vec<u64> = free
                .iter()
                .map(|&v| self.mdk.vectors[v][j])
                .filter(|&x| x > 0)
                .collect();
            vals.sort_unstable_by(|a, b| b.cmp(a));
            if vals.iter().take(left).sum::<u64>() < self.deficit(j) {
                return Ok(false);
            }
            if branch.is_none_or(|(_, c)| vals.len() < c) {
                branch = Some((j, vals.len()));
            }
        }

        // Each open dimension needs fractional progress summing to one; a
        // vector supplies at most `best` of it in total.
        let best = free
            .iter()
            .map(|&v| {
                open.iter()
                    .map(|&j| {
                        let need = self.deficit(j);
                        self.mdk.vectors[v][j].min(need) as f64 / need as f64
                    })
                    .sum::<f64>()
            })
            .fold(0.0, f64::max);
        if (left as f64) * best < open.len() as f64 - 1e-9 {
            return Ok(false);
        }

        let (j, _) = branch.expect("some open dimension");
        let mut cands: Vec<usize> = free
            .into_iter()
            .filter(|&v| self.mdk.vectors[v][j] > 0)
            .collect();
        cands.sort_by_key(|&v| (std::cmp::Reverse(self.mdk.vectors[v][j]), v));
        let mut excluded = Vec::new();
        let mut found = false;
        for v in cands {
            self.take(v);
            if self.dfs(left - 1)? {
                found = true;
                break;
            }
            self.untake(v);
            // Later siblings never use `v`, so each subset is visited once.
            excluded.push(v);
        }
        for v in excluded {
            self.banned[v] = false;
        }
        Ok(found)
    }
}

/// A minimum-size set of vector indices whose sum dominates the target,
/// among sets of at most `kmax` vectors. Branches on the open dimension
/// with the fewest helpful vectors and prunes with two counting bounds.
pub fn solve_mdk_exact(mdk: &MdkInstance, kmax: usize, budget: u64) -> Result<Option<Vec<usize>>> {
    let mut search = Search {
        mdk,
        sum: vec![0; mdk.d()],
        banned: vec![false; mdk.vectors.len()],
        chosen: Vec::new(),
        nodes: 0,
        budget,
    };
    for size in 0..=kmax.min(mdk.vectors.len()) {
        if search.dfs(size)? {
            let mut out = search.chosen.clone();
            out.sort_unstable();
            return Ok(Some(out));
        }
    }
    Ok(None)
}

/// Random vectors with entries in `0..=max_entry` and a random target no
/// larger than half the column sums. `k` is set to the number of vectors.
pub fn random_mdk(vectors: usize, d: usize, max_entry: u64, seed: u64) -> MdkInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vecs: Vec<Vec<u64>> = (0..vectors)
        .map(|_| (0..d).map(|_| rng.gen_range(0..=max_entry)).collect())
        .collect();
    let mut sums = vec![0u64; d];
    for v in &vecs {
        for (s, x) in sums.iter_mut().zip(v) {
            *s += x;
        }
    }
    let target = sums.iter().map(|&s| rng.gen_range(0..=s / 2)).collect();
    MdkInstance::new(vecs, target, vectors).expect("consistent dimensions")
}

/// [`csp_to_mdk_with_q`] with `Q = 10n`.
pub fn csp_to_mdk(csp: &CspInstance) -> Result<MdkInstance> {
    csp_to_mdk_with_q(csp, 10 * u64::from(csp.n()))
}

/// Encodes a 3-regular CSP as a knapsack instance.
///
/// Dimensions: one guard per variable, one guard per constraint, then for
/// constraint `e = (u, v)` the four incidences `u+, u-, v+, v-`. Value `a`
/// enters the incidence entries as `a + 1`, so with `i = a + 1` a variable
/// vector puts `Q + i` on `+` and `Q - i` on `-`, and an allowed pair puts
/// `Q - i` on `+` and `Q + i` on `-`. The target is 1 on guards and `2Q` on
/// incidences; `k` is the variable count plus the constraint count.
///
/// Vector order: `(x, a)` at `x * n + a`, then each constraint's allowed
/// pairs in order.
pub fn csp_to_mdk_with_q(csp: &CspInstance, q: u64) -> Result<MdkInstance> {
    csp.check_three_regular()?;
    let n = csp.n();
    if q < u64::from(n) {
        return Err(Error::ParameterViolation(format!(
            "Q = {q} is below the alphabet size {n}"
        )));
    }
    let k = csp.k();
    let cons = csp.constraints();
    let guards = k + cons.len();
    let d = guards + 4 * cons.len();
    let inc =
        |e: usize, second: bool, minus: bool| guards + 4 * e + 2 * second as usize + minus as usize;

    let mut vectors = Vec::new();
    let mut vlabels = Vec::new();
    for x in 0..k {
        for a in 0..n {
            let i = u64::from(a) + 1;
            let mut vec = vec![0u64; d];
            vec[x] = 1;
            for (e, c) in cons.iter().enumerate() {
                for (second, end) in [(false, c.u), (true, c.v)] {
                    if end == x {
                        vec[inc(e, second, false)] = q + i;
                        vec[inc(e, second, true)] = q - i;
                    }
                }
            }
            vectors.push(vec);
            vlabels.push(format!("x{x}={a}"));
        }
    }
    for (e, c) in cons.iter().enumerate() {
        for &(a, b) in &c.allowed {
            let mut vec = vec![0u64; d];
            vec[k + e] = 1;
            for (second, val) in [(false, a), (true, b)] {
                let i = u64::from(val) + 1;
                vec[inc(e, second, false)] = q - i;
                vec[inc(e, second, true)] = q + i;
            }
            vectors.push(vec);
            vlabels.push(format!("e{e}=({a},{b})"));
        }
    }

    let mut target = vec![1u64; guards];
    target.resize(d, 2 * q);
    let mut dlabels: Vec<String> = (0..k).map(|x| format!("guard x{x}")).collect();
    dlabels.extend((0..cons.len()).map(|e| format!("guard e{e}")));
    for (e, c) in cons.iter().enumerate() {
        for end in [c.u, c.v] {
            dlabels.push(format!("x{end}-e{e}+"));
            dlabels.push(format!("x{end}-e{e}-"));
        }
    }

    let mut mdk = MdkInstance::new(vectors, target, k + cons.len())?;
    mdk.dim_labels = Some(dlabels);
    mdk.vector_labels = Some(vlabels);
    Ok(mdk)
}

/// The vectors [`csp_to_mdk`] pairs with a satisfying assignment: one per
/// variable and one per constraint. `None` if `sigma` violates a
/// constraint.
pub fn csp_solution_vectors(csp: &CspInstance, sigma: &[u32]) -> Option<Vec<usize>> {
    let n = csp.n() as usize;
    let mut out: Vec<usize> = (0..csp.k()).map(|x| x * n + sigma[x] as usize).collect();
    let mut offset = csp.k() * n;
    for c in csp.constraints() {
        let pos = c
            .allowed
            .iter()
            .position(|&p| p == (sigma[c.u], sigma[c.v]))?;
        out.push(offset + pos);
        offset += c.allowed.len();
    }
    Some(out)
}

#[derive(Serialize, Deserialize)]
struct WireMdk {
    #[serde(default)]
    format: Option<u32>,
    d: usize,
    k: usize,
    target: Vec<u64>,
    vectors: Vec<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dim_labels: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vector_labels: Option<Vec<String>>,
}

pub fn parse_mdk(text: &str) -> Result<MdkInstance> {
    let wire: WireMdk = from_json(text)?;
    check_format(wire.format)?;
    if wire.target.len() != wire.d {
        return Err(Error::Validation(format!(
            "d = {} but the target has {} entries",
            wire.d,
            wire.target.len()
        )));
    }
    let mut mdk = MdkInstance::new(wire.vectors, wire.target, wire.k)?;
    mdk.dim_labels = wire.dim_labels;
    mdk.vector_labels = wire.vector_labels;
    Ok(mdk)
}

pub fn serialize_mdk(mdk: &MdkInstance) -> String {
    let wire = WireMdk {
        format: Some(FORMAT_VERSION),
        d: mdk.d(),
        k: mdk.k,
        target: mdk.target.clone(),
        vectors: mdk.vectors.clone(),
        dim_labels: mdk.dim_labels.clone(),
        vector_labels: mdk.vector_labels.clone(),
    };
    let mut out = serde_json::to_string(&wire).expect("mdk serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeMap;

    use super::*;
    use crate::reductions::csp::Constraint;

    /// Minimum count per capped partial-sum profile, one vector at a time.
    fn dp_optimum(mdk: &MdkInstance) -> Option<usize> {
        let cap = |p: Vec<u64>| -> Vec<u64> {
            p.iter().zip(mdk.target()).map(|(a, t)| *a.min(t)).collect()
        };
        let mut best: BTreeMap<Vec<u64>, usize> = BTreeMap::from([(vec![0; mdk.d()], 0)]);
        for v in mdk.vectors() {
            let mut next = best.clone();
            for (p, &c) in &best {
                let q = cap(p.iter().zip(v).map(|(a, b)| a + b).collect());
                let e = next.entry(q).or_insert(usize::MAX);
                *e = (*e).min(c + 1);
            }
            best = next;
        }
        best.get(mdk.target()).copied()
    }

    fn triple_csp(allowed: [Vec<(u32, u32)>; 3]) -> CspInstance {
        let cons = allowed
            .into_iter()
            .map(|allowed| Constraint {
                u: 0,
                v: 1,
                allowed,
            })
            .collect();
        CspInstance::new(2, 2, cons).unwrap()
    }

    #[test]
    fn trivial_solves() {
        let zero = MdkInstance::new(vec![vec![1, 2]], vec![0, 0], 1).unwrap();
        assert_eq!(solve_mdk_exact(&zero, 3, 1000).unwrap(), Some(vec![]));
        let one = MdkInstance::new(vec![vec![0, 1], vec![3, 3]], vec![2, 2], 1).unwrap();
        assert_eq!(solve_mdk_exact(&one, 3, 1000).unwrap(), Some(vec![1]));
        assert!(verify_mdk(&zero, &[]));
        assert!(!verify_mdk(&one, &[]));
        assert!(!verify_mdk(&one, &[1, 1]));
        assert!(!verify_mdk(&one, &[5]));
    }

    #[test]
    fn agrees_with_profile_dp() {
        for seed in 0..60 {
            let mdk = random_mdk(7, 3, 4, seed);
            let got = solve_mdk_exact(&mdk, 7, DEFAULT_MDK_BUDGET).unwrap();
            assert_eq!(got.as_ref().map(Vec::len), dp_optimum(&mdk), "seed {seed}");
            if let Some(sol) = got {
                assert!(verify_mdk(&mdk, &sol));
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let mdk = random_mdk(8, 3, 4, 1);
        assert!(matches!(
            solve_mdk_exact(&mdk, 8, 0),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn verify_matches_recount() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for seed in 0..40 {
            let mdk = random_mdk(6, 3, 5, seed);
            let pick: Vec<usize> = (0..6).filter(|_| rng.gen_bool(0.5)).collect();
            let mut ok = true;
            for j in 0..3 {
                let s: u64 = pick.iter().map(|&i| mdk.vectors()[i][j]).sum();
                ok &= s >= mdk.target()[j];
            }
            assert_eq!(verify_mdk(&mdk, &pick), ok);
        }
    }

    #[test]
    fn dimension_counts() {
        let all: Vec<(u32, u32)> = vec![(0, 0), (0, 1), (1, 0), (1, 1)];
        let mdk = csp_to_mdk(&triple_csp([all.clone(), all.clone(), all])).unwrap();
        assert_eq!(mdk.d(), 17);
        assert_eq!(mdk.k, 5);
        let csp = crate::reductions::csp::random_csp(4, 2, 0.5, 1).unwrap();
        assert_eq!(csp_to_mdk(&csp).unwrap().d(), 34);
        let irregular = CspInstance::new(
            2,
            2,
            vec![Constraint {
                u: 0,
                v: 1,
                allowed: vec![],
            }],
        )
        .unwrap();
        assert!(matches!(
            csp_to_mdk(&irregular),
            Err(Error::NotThreeRegular { .. })
        ));
    }

    #[test]
    fn satisfiable_triple_has_size_five_solution() {
        let only = || vec![(1, 1)];
        let csp = triple_csp([only(), only(), only()]);
        let mdk = csp_to_mdk(&csp).unwrap();
        let sol = solve_mdk_exact(&mdk, 5, DEFAULT_MDK_BUDGET)
            .unwrap()
            .unwrap();
        assert_eq!(sol.len(), 5);
        let mapped = csp_solution_vectors(&csp, &[1, 1]).unwrap();
        assert!(verify_mdk(&mdk, &mapped));
        // Every incidence sum of the mapped solution is exactly 2Q.
        let sum = mdk.sum_of(mapped.iter().copied());
        assert!(sum[5..].iter().all(|&s| s == 40));

        let broken = triple_csp([only(), only(), vec![]]);
        let mdk = csp_to_mdk(&broken).unwrap();
        assert_eq!(solve_mdk_exact(&mdk, 5, DEFAULT_MDK_BUDGET).unwrap(), None);
    }

    #[test]
    fn json_round_trip() {
        let mdk = random_mdk(4, 2, 3, 2);
        assert_eq!(parse_mdk(&serialize_mdk(&mdk)).unwrap(), mdk);
        let text = r#"{"d":2,"k":1,"target":[1,1],"vectors":[[1,1]]}"#;
        assert_eq!(parse_mdk(text).unwrap().vectors(), &[vec![1, 1]]);
        assert!(parse_mdk(r#"{"d":3,"k":1,"target":[1,1],"vectors":[]}"#).is_err());
    }
}
