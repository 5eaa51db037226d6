//! Exhaustive exact solvers, the ground truth for everything else.

use crate::error::{Error, Result};
use crate::feasibility::check_feasible;
use crate::instance::{Assignment, ElementId, Instance, Solution};

pub const DEFAULT_EXACT_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactSolution {
    pub sol: Solution,
    pub asg: Assignment,
    pub weight: u64,
}

/// Number of copy vectors with `c_x <= bounds[x]` and total at most `k`.
fn count_vectors(bounds: &[u32], k: u32) -> u128 {
    // ways[s] = vectors over the processed prefix with total exactly s
    let mut ways = vec![0u128; k as usize + 1];
    ways[0] = 1;
    for &b in bounds {
        let mut next = vec![0u128; ways.len()];
        for (s, &w) in ways.iter().enumerate() {
            if w == 0 {
                continue;
            }
            for c in 0..=b as usize {
                if s + c > k as usize {
                    break;
                }
                next[s + c] = next[s + c].saturating_add(w);
            }
        }
        ways = next;
    }
    ways.iter().fold(0u128, |acc, &w| acc.saturating_add(w))
}

/// Calls `visit` on every copy vector of total exactly `size`, in ascending
/// lexicographic order. Stops early when `visit` returns `true`.
fn for_each_vector<F>(bounds: &[u32], size: u32, visit: &mut F) -> bool
where
    F: FnMut(&[u32]) -> bool,
{
    fn rec<F: FnMut(&[u32]) -> bool>(
        pos: usize,
        left: u32,
        bounds: &[u32],
        room_after: &[u32],
        cur: &mut Vec<u32>,
        visit: &mut F,
    ) -> bool {
        if pos == bounds.len() {
            return left == 0 && visit(cur);
        }
        let lo = left.saturating_sub(room_after[pos + 1]);
        let hi = bounds[pos].min(left);
        for c in lo..=hi {
            cur.push(c);
            let stop = rec(pos + 1, left - c, bounds, room_after, cur, visit);
            cur.pop();
            if stop {
                return true;
            }
        }
        false
    }
    // room_after[i] = sum of bounds[i..]
    let mut room_after = vec![0u32; bounds.len() + 1];
    for i in (0..bounds.len()).rev() {
        room_after[i] = room_after[i + 1].saturating_add(bounds[i]);
    }
    if room_after[0] < size {
        return false;
    }
    rec(0, size, bounds, &room_after, &mut Vec::new(), visit)
}

fn prepare(inst: &Instance, k: u32, budget: u64) -> Result<(Vec<ElementId>, Vec<u32>)> {
    let ids = inst.sorted_ids();
    let bounds: Vec<u32> = ids
        .iter()
        .map(|&x| inst.element(x).map(|e| e.mult.clamp(k)))
        .collect::<Result<_>>()?;
    let count = count_vectors(&bounds, k);
    if count > u128::from(budget) {
        return Err(Error::BudgetExceeded(format!(
            "{count} candidate solutions of size at most {k} exceed the budget of {budget}"
        )));
    }
    Ok((ids, bounds))
}

fn to_solution(ids: &[ElementId], copies: &[u32]) -> Solution {
    Solution::from_copies(ids.iter().copied().zip(copies.iter().copied()))
}

/// Minimum-size feasible solution of size at most `k`.
///
/// Sizes are tried in ascending order and, within a size, copy vectors
/// (indexed by ascending element id) in lexicographic order; the first
/// feasible one is returned.
pub fn solve_exact(inst: &Instance, k: u32, budget: u64) -> Result<Option<ExactSolution>> {
    let (ids, bounds) = prepare(inst, k, budget)?;
    for size in 0..=k {
        let mut found = None;
        for_each_vector(&bounds, size, &mut |copies| {
            let sol = to_solution(&ids, copies);
            match check_feasible(inst, &sol).expect("ids come from the instance") {
                Some(asg) => {
                    found = Some((sol, asg));
                    true
                }
                None => false,
            }
        });
        if let Some((sol, asg)) = found {
            let weight = sol.weight(inst);
            return Ok(Some(ExactSolution { sol, asg, weight }));
        }
    }
    Ok(None)
}

/// Minimum-weight feasible solution among those of size at most `k`; ties go
/// to the smaller size, then to the lexicographically smaller copy vector.
pub fn solve_exact_weighted(inst: &Instance, k: u32, budget: u64) -> Result<Option<ExactSolution>> {
    let (ids, bounds) = prepare(inst, k, budget)?;
    let mut best: Option<ExactSolution> = None;
    for size in 0..=k {
        for_each_vector(&bounds, size, &mut |copies| {
            let sol = to_solution(&ids, copies);
            let weight = sol.weight(inst);
            if best.as_ref().is_some_and(|b| b.weight <= weight) {
                return false;
            }
            if let Some(asg) = check_feasible(inst, &sol).expect("ids come from the instance") {
                best = Some(ExactSolution { sol, asg, weight });
            }
            false
        });
    }
    Ok(best)
}
