//! Solving an extended tuple: dominate the partial solution's stars with few
//! parts, then pick one or two mutually independent candidates per part.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::approx::config::SolverConfig;
use crate::approx::tuple::{candidate_set, info_tuple, AnnotatedTuple, ClassView};
use crate::domset::{min_dominator_forced, BipartiteGraph, MAX_EXACT_REDS};
use crate::error::Result;
use crate::feasibility::check_feasible;
use crate::independence::{find_independent_set, IndependenceContext};
use crate::instance::{ElementId, Instance, Solution};

/// An annotated tuple plus the two part choices per element of `S`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendedTuple {
    pub base: AnnotatedTuple,
    pub tau1: BTreeMap<ElementId, usize>,
    pub tau2: BTreeMap<ElementId, usize>,
}

/// Why [`solve_extended`] gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtendedFailure {
    /// `tau1(s) == tau2(s)` for some `s`.
    TauClash,
    /// No set of parts containing the forced ones dominates `S`.
    NoDominator,
    /// Some candidate part could not supply its quota.
    IndependenceFail,
    /// The assembled set is infeasible or larger than `ceil(4k/3)`.
    InfeasibleOrTooBig,
}

impl fmt::Display for ExtendedFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let text = match self {
            ExtendedFailure::TauClash => "tau clash",
            ExtendedFailure::NoDominator => "no dominator",
            ExtendedFailure::IndependenceFail => "independence failure",
            ExtendedFailure::InfeasibleOrTooBig => "infeasible or too big",
        };
        f.write_str(text)
    }
}

pub type ExtendedOutcome = std::result::Result<Solution, ExtendedFailure>;

/// `ceil(4k/3)`.
pub fn size_bound(k: usize) -> u64 {
    (4 * k as u64).div_ceil(3)
}

/// Runs the six steps on an extended tuple. The outer `Result` reports a
/// malformed tuple; the inner one is the solve outcome. A returned solution
/// contains `S`, takes at most two elements per part, has size at most
/// `ceil(4k/3)` and is flow-feasible.
pub fn solve_extended(
    e: &ExtendedTuple,
    inst: &Instance,
    cfg: &SolverConfig,
) -> Result<ExtendedOutcome> {
    let t = &e.base;
    let r = t.parts.len();
    let k = t.k();
    let tau = |map: &BTreeMap<ElementId, usize>, s: ElementId| map.get(&s).copied();

    // With no parts there is nothing to choose: S stands alone.
    if r == 0 {
        return finish(t.s.iter().copied(), k, inst);
    }

    // Step 1.
    for &s in &t.s {
        match (tau(&e.tau1, s), tau(&e.tau2, s)) {
            (Some(a), Some(b)) if a != b && a < r && b < r => {}
            _ => return Ok(Err(ExtendedFailure::TauClash)),
        }
    }

    // Steps 2 and 3: blues are positions in S, reds are part indices.
    if r > MAX_EXACT_REDS {
        return Ok(Err(ExtendedFailure::NoDominator));
    }
    let edges: Vec<(usize, usize)> =
        t.s.iter()
            .enumerate()
            .flat_map(|(b, s)| [(b, e.tau1[s]), (b, e.tau2[s])])
            .collect();
    let graph = BipartiteGraph::new((0..r).collect(), (0..t.s.len()).collect(), &edges)?;
    let mut load = vec![0usize; r];
    for s in &t.s {
        load[e.tau1[s]] += 1;
    }
    let forced: BTreeSet<usize> = (0..r).filter(|&i| load[i] >= 2).collect();
    let Some(dominator) = min_dominator_forced(&graph, &forced)? else {
        return Ok(Err(ExtendedFailure::NoDominator));
    };

    // Step 4.
    let info = info_tuple(t, inst, cfg)?;
    let candidates = candidate_set(&e.tau1, &info, cfg);

    // Step 5.
    let view = ClassView::new(inst, &t.s)?;
    let ctx = IndependenceContext::new(inst, t.stars(&view)?, cfg.rho)?;
    let quotas: Vec<u32> = (0..r)
        .map(|i| if dominator.contains(&i) { 2 } else { 1 })
        .collect();
    let Some(extra) = find_independent_set(&ctx, &candidates, &quotas, inst)? else {
        return Ok(Err(ExtendedFailure::IndependenceFail));
    };

    finish(t.s.iter().copied().chain(extra), k, inst)
}

/// Step 6: accept the assembled set iff it is small enough and feasible.
fn finish(
    elements: impl Iterator<Item = ElementId>,
    k: usize,
    inst: &Instance,
) -> Result<ExtendedOutcome> {
    let sol = Solution::from_set(elements);
    if sol.size() > size_bound(k) || check_feasible(inst, &sol)?.is_none() {
        return Ok(Err(ExtendedFailure::InfeasibleOrTooBig));
    }
    Ok(Ok(sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Element;

    fn ids(v: &[u32]) -> Vec<ElementId> {
        v.iter().map(|&x| ElementId(x)).collect()
    }

    fn bare(s: &[u32], parts: Vec<Vec<ElementId>>, inst: &Instance) -> AnnotatedTuple {
        let view = ClassView::new(inst, &ids(s)).unwrap();
        let pi = if s.is_empty() {
            BTreeMap::new()
        } else {
            view.keys
                .iter()
                .map(|k| (k.clone(), k.first().copied().unwrap_or(ElementId(s[0]))))
                .collect()
        };
        AnnotatedTuple {
            s: ids(s),
            gamma_part: vec![BTreeMap::new(); parts.len()],
            parts,
            pi,
            gamma_elem: BTreeMap::new(),
        }
    }

    #[test]
    fn size_bounds() {
        assert_eq!(size_bound(1), 2);
        assert_eq!(size_bound(3), 4);
        assert_eq!(size_bound(6), 8);
    }

    #[test]
    fn tau_clash() {
        let inst = Instance::new(
            1,
            (0..3).map(|i| Element::simple(i, 1)).collect(),
            vec![ids(&[0])],
        )
        .unwrap();
        let e = ExtendedTuple {
            base: bare(&[0], vec![ids(&[1]), ids(&[2])], &inst),
            tau1: BTreeMap::from([(ElementId(0), 1)]),
            tau2: BTreeMap::from([(ElementId(0), 1)]),
        };
        let cfg = SolverConfig::defaults(3, 1);
        assert_eq!(
            solve_extended(&e, &inst, &cfg).unwrap(),
            Err(ExtendedFailure::TauClash)
        );
    }

    #[test]
    fn full_partial_solution() {
        let inst = Instance::new(
            1,
            (0..2).map(|i| Element::simple(i, 1)).collect(),
            vec![ids(&[0]), ids(&[1])],
        )
        .unwrap();
        let e = ExtendedTuple {
            base: bare(&[0, 1], vec![], &inst),
            tau1: BTreeMap::new(),
            tau2: BTreeMap::new(),
        };
        let cfg = SolverConfig::defaults(2, 1);
        assert_eq!(
            solve_extended(&e, &inst, &cfg).unwrap(),
            Ok(Solution::from_set(ids(&[0, 1])))
        );
        let short = ExtendedTuple {
            base: bare(&[0], vec![], &inst),
            tau1: BTreeMap::new(),
            tau2: BTreeMap::new(),
        };
        assert_eq!(
            solve_extended(&short, &inst, &cfg).unwrap(),
            Err(ExtendedFailure::InfeasibleOrTooBig)
        );
        let empty = ExtendedTuple {
            base: bare(&[], vec![], &Instance::new(1, vec![], vec![]).unwrap()),
            tau1: BTreeMap::new(),
            tau2: BTreeMap::new(),
        };
        let none = Instance::new(1, vec![], vec![]).unwrap();
        assert_eq!(
            solve_extended(&empty, &none, &cfg).unwrap(),
            Ok(Solution::new())
        );
    }

    #[test]
    fn empty_partial_picks_one_per_part() {
        // Sets {0},{1},{2,3}; parts [0,2] and [1,3]
        let inst = Instance::new(
            2,
            (0..4).map(|i| Element::simple(i, 2)).collect(),
            vec![ids(&[0]), ids(&[1]), ids(&[2, 3])],
        )
        .unwrap();
        let e = ExtendedTuple {
            base: bare(&[], vec![ids(&[0, 2]), ids(&[1, 3])], &inst),
            tau1: BTreeMap::new(),
            tau2: BTreeMap::new(),
        };
        let cfg = SolverConfig::defaults(2, 2);
        // Picks 0 and 1, which leave {2,3} uncovered.
        assert_eq!(
            solve_extended(&e, &inst, &cfg).unwrap(),
            Err(ExtendedFailure::InfeasibleOrTooBig)
        );
    }

    #[test]
    fn dominated_stars_get_two_picks() {
        // S = {0} with tau1 = part 0, tau2 = part 1. Dominator {0}: quota 2
        // in part 0, 1 in part 1, total size 4 = ceil(4*3/3).
        let mut els: Vec<Element> = (0..6).map(|i| Element::simple(i, 1)).collect();
        els[0].cap = 1;
        let inst = Instance::new(
            2,
            els,
            vec![ids(&[0]), ids(&[0, 1]), ids(&[0, 2]), ids(&[3])],
        )
        .unwrap();
        let base = bare(&[0], vec![ids(&[1, 2]), ids(&[3, 4])], &inst);
        let e = ExtendedTuple {
            base,
            tau1: BTreeMap::from([(ElementId(0), 0)]),
            tau2: BTreeMap::from([(ElementId(0), 1)]),
        };
        let cfg = SolverConfig::defaults(3, 2);
        let sol = solve_extended(&e, &inst, &cfg).unwrap().unwrap();
        assert_eq!(sol, Solution::from_set(ids(&[0, 1, 2, 3])));
        assert!(crate::feasibility::brute_force_assignment(&inst, &sol, 12)
            .unwrap()
            .is_some());
    }
}
