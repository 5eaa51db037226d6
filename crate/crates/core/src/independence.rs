//! Star-wise independence between elements and the greedy independent-set
//! selection used to pick the extra elements of an extended tuple.

use std::collections::BTreeMap;

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::instance::{ElementId, Instance};

/// A partial solution's stars together with the overlap threshold `rho`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependenceContext {
    stars: BTreeMap<ElementId, Vec<usize>>,
    star_of: Vec<Option<ElementId>>,
    rho: Ratio<u64>,
}

/// Sets of each star containing a given element, keyed by star.
type Profile = BTreeMap<ElementId, Vec<usize>>;

impl IndependenceContext {
    /// `stars` must be pairwise disjoint lists of indices below `inst.m()`,
    /// and `0 < rho <= 1`.
    pub fn new(
        inst: &Instance,
        stars: BTreeMap<ElementId, Vec<usize>>,
        rho: Ratio<u64>,
    ) -> Result<Self> {
        if *rho.numer() == 0 || rho > Ratio::from_integer(1) {
            return Err(Error::Validation(format!("rho = {rho} is outside (0, 1]")));
        }
        let mut star_of = vec![None; inst.m()];
        for (&s, sets) in &stars {
            for &idx in sets {
                let slot = star_of.get_mut(idx).ok_or_else(|| {
                    Error::Validation(format!("star {s} lists unknown set {idx}"))
                })?;
                if slot.replace(s).is_some() {
                    return Err(Error::Validation(format!("set {idx} lies in two stars")));
                }
            }
        }
        Ok(IndependenceContext {
            stars,
            star_of,
            rho,
        })
    }

    pub fn rho(&self) -> Ratio<u64> {
        self.rho
    }

    pub fn stars(&self) -> &BTreeMap<ElementId, Vec<usize>> {
        &self.stars
    }

    fn profile(&self, inst: &Instance, x: ElementId) -> Profile {
        let mut out = Profile::new();
        for &idx in inst.sets_containing(x) {
            if let Some(s) = self.star_of[idx] {
                out.entry(s).or_default().push(idx);
            }
        }
        out
    }

    fn profiles_conflict(&self, px: &Profile, py: &Profile) -> bool {
        px.iter().any(|(s, xs)| {
            let Some(ys) = py.get(s) else { return false };
            let shared = sorted_intersection_len(xs, ys) as u64;
            let smaller = xs.len().min(ys.len()) as u64;
            // shared > rho * smaller
            shared * self.rho.denom() > self.rho.numer() * smaller
        })
    }
}

fn sorted_intersection_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// True iff some star sees `x` and `y` share more than a `rho` fraction of
/// the smaller of their incidences.
pub fn is_conflicting(
    ctx: &IndependenceContext,
    x: ElementId,
    y: ElementId,
    inst: &Instance,
) -> bool {
    ctx.profiles_conflict(&ctx.profile(inst, x), &ctx.profile(inst, y))
}

/// Unordered conflicting pairs within `xs`.
pub fn count_conflicting_pairs(
    ctx: &IndependenceContext,
    xs: &[ElementId],
    inst: &Instance,
) -> u64 {
    let profiles: Vec<Profile> = xs.iter().map(|&x| ctx.profile(inst, x)).collect();
    let mut count = 0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            if ctx.profiles_conflict(&profiles[i], &profiles[j]) {
                count += 1;
            }
        }
    }
    count
}

/// Greedily picks exactly `quotas[i]` elements from each part so that no two
/// picked elements conflict.
///
/// Parts are handled in order. Within a part, candidates are tried by
/// ascending number of conflicts inside the union of all parts, then by id.
/// Returns `None` when some part runs out of usable candidates.
pub fn find_independent_set(
    ctx: &IndependenceContext,
    parts: &[Vec<ElementId>],
    quotas: &[u32],
    inst: &Instance,
) -> Result<Option<Vec<ElementId>>> {
    if let Some(&q) = quotas.iter().find(|&&q| q != 1 && q != 2) {
        return Err(Error::QuotaInvalid(q));
    }
    if quotas.len() != parts.len() {
        return Err(Error::PreconditionViolated(format!(
            "{} quotas for {} parts",
            quotas.len(),
            parts.len()
        )));
    }
    let union: Vec<ElementId> = parts.iter().flatten().copied().collect();
    let profiles: Vec<Profile> = union.iter().map(|&x| ctx.profile(inst, x)).collect();
    let mut conflict = vec![vec![false; union.len()]; union.len()];
    let mut degree = vec![0usize; union.len()];
    for i in 0..union.len() {
        for j in i + 1..union.len() {
            if ctx.profiles_conflict(&profiles[i], &profiles[j]) {
                conflict[i][j] = true;
                conflict[j][i] = true;
                degree[i] += 1;
                degree[j] += 1;
            }
        }
    }

    let mut picked: Vec<usize> = Vec::new();
    let mut offset = 0;
    for (part, &quota) in parts.iter().zip(quotas) {
        let mut order: Vec<usize> = (offset..offset + part.len()).collect();
        offset += part.len();
        order.sort_by_key(|&i| (degree[i], union[i]));
        let mut taken = 0;
        for i in order {
            if taken == quota {
                break;
            }
            if picked.iter().all(|&p| !conflict[p][i]) {
                picked.push(i);
                taken += 1;
            }
        }
        if taken < quota {
            return Ok(None);
        }
    }
    Ok(Some(picked.into_iter().map(|i| union[i]).collect()))
}
