//! Red-blue domination: a constructive small dominator and an exact
//! minimum dominator that must include a forced set of reds.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// Largest red side the exact enumerator accepts.
pub const MAX_EXACT_REDS: usize = 24;

/// Bipartite graph between reds and blues; parallel edges are collapsed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteGraph {
    pub reds: Vec<usize>,
    pub blues: Vec<usize>,
    /// Red neighbors of each blue, sorted and deduplicated.
    pub adj: BTreeMap<usize, Vec<usize>>,
}

impl BipartiteGraph {
    pub fn new(reds: Vec<usize>, blues: Vec<usize>, edges: &[(usize, usize)]) -> Result<Self> {
        let red_set: BTreeSet<usize> = reds.iter().copied().collect();
        let mut adj: BTreeMap<usize, Vec<usize>> = blues.iter().map(|&b| (b, Vec::new())).collect();
        for &(blue, red) in edges {
            if !red_set.contains(&red) {
                return Err(Error::Validation(format!("edge to unknown red {red}")));
            }
            adj.get_mut(&blue)
                .ok_or_else(|| Error::Validation(format!("edge from unknown blue {blue}")))?
                .push(red);
        }
        for list in adj.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        let mut reds = reds;
        reds.sort_unstable();
        reds.dedup();
        let mut blues = blues;
        blues.sort_unstable();
        blues.dedup();
        Ok(BipartiteGraph { reds, blues, adj })
    }

    pub fn neighbors(&self, blue: usize) -> &[usize] {
        &self.adj[&blue]
    }

    /// True iff every blue has a neighbor in `d`.
    pub fn dominates(&self, d: &BTreeSet<usize>) -> bool {
        self.blues
            .iter()
            .all(|b| self.neighbors(*b).iter().any(|r| d.contains(r)))
    }
}

/// Builds a dominator of size at most `(b + r) / 3` for graphs whose blues
/// all have degree at least two.
///
/// Repeatedly takes the smallest red with two or more undominated blue
/// neighbors and removes its closed neighborhood; the blues left over then
/// have pairwise disjoint neighborhoods and each gets its smallest neighbor.
pub fn construct_small_dominator(g: &BipartiteGraph) -> Result<BTreeSet<usize>> {
    let (b, r) = (g.blues.len(), g.reds.len());
    if let Some(&blue) = g.blues.iter().find(|&&v| g.neighbors(v).len() < 2) {
        return Err(Error::PreconditionViolated(format!(
            "blue {blue} has degree {}",
            g.neighbors(blue).len()
        )));
    }
    if r >= 2 * b {
        return Err(Error::PreconditionViolated(format!(
            "{r} reds is not fewer than twice {b} blues"
        )));
    }

    let mut undominated: BTreeSet<usize> = g.blues.iter().copied().collect();
    let mut dominator = BTreeSet::new();
    loop {
        let pick = g.reds.iter().copied().find(|red| {
            !dominator.contains(red)
                && undominated
                    .iter()
                    .filter(|&&v| g.neighbors(v).contains(red))
                    .take(2)
                    .count()
                    == 2
        });
        let Some(red) = pick else { break };
        dominator.insert(red);
        undominated.retain(|&v| !g.neighbors(v).contains(&red));
    }
    for v in undominated {
        dominator.insert(g.neighbors(v)[0]);
    }
    Ok(dominator)
}

/// Minimum dominator containing `forced`; ties go to the lexicographically
/// smallest set. `None` when even all reds fail to dominate.
pub fn min_dominator_forced(
    g: &BipartiteGraph,
    forced: &BTreeSet<usize>,
) -> Result<Option<BTreeSet<usize>>> {
    if g.reds.len() > MAX_EXACT_REDS {
        return Err(Error::PreconditionViolated(format!(
            "{} reds exceed the exact limit {MAX_EXACT_REDS}",
            g.reds.len()
        )));
    }
    if let Some(f) = forced.iter().find(|f| g.reds.binary_search(f).is_err()) {
        return Err(Error::PreconditionViolated(format!(
            "forced red {f} is not a red"
        )));
    }
    let free: Vec<usize> = g
        .reds
        .iter()
        .copied()
        .filter(|r| !forced.contains(r))
        .collect();
    for size in 0..=free.len() {
        let mut combo: Vec<usize> = (0..size).collect();
        loop {
            let mut d = forced.clone();
            d.extend(combo.iter().map(|&i| free[i]));
            if g.dominates(&d) {
                return Ok(Some(d));
            }
            if !next_combination(&mut combo, free.len()) {
                break;
            }
        }
    }
    Ok(None)
}

/// Advances `combo` to the next `combo.len()`-subset of `0..n` in
/// lexicographic order.
pub(crate) fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    for i in (0..k).rev() {
        if combo[i] < n - k + i {
            combo[i] += 1;
            for j in i + 1..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
