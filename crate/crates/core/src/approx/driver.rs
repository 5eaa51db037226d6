//! The top-level pipeline: multiplicity expansion, weight windows, random
//! colorings, and the annotated solver on each root tuple.

use std::collections::{BTreeMap, BTreeSet};

use crate::approx::annotated::{solve_annotated_with, Mode, Spent};
use crate::approx::config::{SolverConfig, DEFAULT_TRIAL_CAP};
use crate::approx::tuple::{for_each_tuple, good_tuple_from_opt};
use crate::colorweights::{default_trials, random_colorings, separates, weight_estimates};
use crate::error::{Error, Result};
use crate::feasibility::check_feasible;
use crate::instance::{Assignment, Element, ElementId, Instance, Multiplicity, Solution};

/// An instance where every element is replaced by `min(k, M)` unit copies.
#[derive(Debug, Clone)]
pub struct Expanded {
    pub inst: Instance,
    /// Original element of each copy, indexed by copy id.
    pub back: Vec<ElementId>,
    /// Copies of each original element, ascending.
    pub copies: BTreeMap<ElementId, Vec<ElementId>>,
}

impl Expanded {
    /// Contracts a set of copies to a multiset of originals.
    pub fn contract(&self, sol: &Solution) -> Solution {
        Solution::from_copies(sol.iter().map(|(x, c)| (self.back[x.0 as usize], c)))
    }

    /// Lifts a solution and assignment of the original instance: `c` copies
    /// of `x` become the first `c` copies of `x`, and the sets assigned to
    /// `x` fill those copies one capacity at a time.
    pub fn lift(
        &self,
        inst: &Instance,
        sol: &Solution,
        asg: &Assignment,
    ) -> (Solution, Assignment) {
        let lifted = Solution::from_set(
            sol.iter()
                .flat_map(|(x, c)| self.copies[&x][..c as usize].iter().copied()),
        );
        let mut used: BTreeMap<ElementId, u64> = BTreeMap::new();
        let target = asg
            .targets()
            .iter()
            .map(|&x| {
                let n = used.entry(x).or_insert(0);
                let slot = (*n / inst.cap(x).max(1)) as usize;
                *n += 1;
                self.copies[&x][slot]
            })
            .collect();
        (lifted, Assignment::new(target))
    }
}

/// Replaces each element by `min(k, M)` copies with the same capacity and
/// weight (at least one copy even when `k = 0`), and each set by the union
/// of its members' copies. Copy ids are `0..n'` in element order; the
/// expanded `d` is the largest expanded set size.
pub fn expand_multiplicities(inst: &Instance, k: u32) -> Expanded {
    let mut elements = Vec::new();
    let mut back = Vec::new();
    let mut copies: BTreeMap<ElementId, Vec<ElementId>> = BTreeMap::new();
    for e in inst.elements() {
        let c = e.mult.clamp(k.max(1));
        for _ in 0..c {
            let id = back.len() as u32;
            elements.push(Element::new(id, e.cap, Multiplicity::Bounded(1), e.weight));
            back.push(e.id);
            copies.entry(e.id).or_default().push(ElementId(id));
        }
    }
    let family: Vec<Vec<ElementId>> = inst
        .family()
        .iter()
        .map(|set| set.iter().flat_map(|x| copies[x].iter().copied()).collect())
        .collect();
    let d = family.iter().map(Vec::len).max().unwrap_or(1).max(1);
    let inst = Instance::new(d, elements, family).expect("expansion preserves validity");
    Expanded { inst, back, copies }
}

/// How [`solve_approx`] searches.
#[derive(Debug, Clone, Copy)]
pub enum ApproxMode<'a> {
    Enumerate,
    /// Certify against a known feasible solution of size at most `k` of the
    /// original instance.
    Guided {
        opt: &'a Solution,
        asg: &'a Assignment,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproxResult {
    pub sol: Solution,
    pub asg: Assignment,
    pub weight: u64,
}

/// Width of a weight window: `max(1, ceil(eps * W / (l * max(1, ceil(log2 n')))))`.
pub fn window_width(cfg: &SolverConfig, w: u64, l: u32, n: usize) -> u64 {
    let log = u64::from(usize::BITS - n.saturating_sub(1).leading_zeros()).max(1);
    let num = u128::from(*cfg.epsilon.numer()) * u128::from(w);
    let den = u128::from(*cfg.epsilon.denom()) * u128::from(l.max(1)) * u128::from(log);
    u64::try_from(num.div_ceil(den)).unwrap_or(u64::MAX).max(1)
}

fn in_window(w: u64, bucket: u64, width: u64) -> bool {
    let lo = bucket.saturating_mul(width);
    lo <= w && w <= lo.saturating_add(width)
}

/// Every bucket vector in `0..=max_bucket` of length `l`, ordered by sum and
/// then lexicographically.
fn bucket_vectors(l: usize, max_bucket: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut cur = vec![0u64; l];
    loop {
        out.push(cur.clone());
        let mut i = l;
        loop {
            if i == 0 {
                out.sort_by_key(|v| (v.iter().sum::<u64>(), v.clone()));
                return out;
            }
            i -= 1;
            if cur[i] < max_bucket {
                cur[i] += 1;
                break;
            }
            cur[i] = 0;
        }
    }
}

fn finish(inst: &Instance, ex: &Expanded, found: &Solution) -> Result<ApproxResult> {
    let sol = ex.contract(found);
    let asg = check_feasible(inst, &sol)?
        .expect("a feasible expanded solution contracts to a feasible one");
    let weight = sol.weight(inst);
    Ok(ApproxResult { sol, asg, weight })
}

/// Runs the pipeline for every solution size `l = 1..=k` (Enumerate) or for
/// the oracle's size (Guided). A returned solution is feasible and has size
/// at most `ceil(4k/3)`.
pub fn solve_approx(
    inst: &Instance,
    k: u32,
    cfg: &SolverConfig,
    mode: ApproxMode<'_>,
) -> Result<Option<ApproxResult>> {
    cfg.validate()?;
    if inst.m() == 0 {
        return Ok(Some(ApproxResult {
            sol: Solution::new(),
            asg: Assignment::new(vec![]),
            weight: 0,
        }));
    }
    if k == 0 {
        return Ok(None);
    }
    let ex = expand_multiplicities(inst, k);
    let trials = cfg
        .trials
        .unwrap_or_else(|| default_trials(k as usize, ex.inst.n(), DEFAULT_TRIAL_CAP));
    let estimates = weight_estimates(inst, k);
    match mode {
        ApproxMode::Enumerate => enumerate(inst, &ex, k, cfg, trials, &estimates),
        ApproxMode::Guided { opt, asg } => guided(inst, &ex, k, cfg, trials, &estimates, opt, asg),
    }
}

fn enumerate(
    inst: &Instance,
    ex: &Expanded,
    k: u32,
    cfg: &SolverConfig,
    trials: usize,
    estimates: &[u64],
) -> Result<Option<ApproxResult>> {
    let ids = ex.inst.sorted_ids();
    let max_weight = ex
        .inst
        .elements()
        .iter()
        .map(|e| e.weight)
        .max()
        .unwrap_or(0);
    let mut spent = Spent::default();
    for l in 1..=k {
        let colorings = random_colorings(
            &ids,
            l as usize,
            trials,
            cfg.seed.wrapping_add(u64::from(l)),
        );
        let mut widths = BTreeSet::new();
        for &w in estimates {
            let width = window_width(cfg, w, l, ex.inst.n());
            if !widths.insert(width) {
                continue;
            }
            let max_bucket = max_weight.min(w) / width;
            for buckets in bucket_vectors(l as usize, max_bucket) {
                for coloring in &colorings {
                    let parts: Vec<Vec<ElementId>> = coloring
                        .iter()
                        .zip(&buckets)
                        .map(|(part, &b)| {
                            part.iter()
                                .copied()
                                .filter(|&x| in_window(ex.inst.weight(x), b, width))
                                .collect()
                        })
                        .collect();
                    if parts.iter().any(Vec::is_empty) {
                        continue;
                    }
                    let found = for_each_tuple(&[], &parts, &ex.inst, cfg, |root| {
                        solve_annotated_with(&root, &ex.inst, cfg, Mode::Enumerate, &mut spent)
                    })?;
                    if let Some(sol) = found {
                        return finish(inst, ex, &sol).map(Some);
                    }
                }
            }
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn guided(
    inst: &Instance,
    ex: &Expanded,
    k: u32,
    cfg: &SolverConfig,
    trials: usize,
    estimates: &[u64],
    opt: &Solution,
    asg: &Assignment,
) -> Result<Option<ApproxResult>> {
    opt.validate(inst)?;
    if !asg.is_valid_for(inst, opt) {
        return Err(Error::OracleInconsistent(
            "assignment does not fit the solution".into(),
        ));
    }
    let l = opt.size();
    if l == 0 || l > u64::from(k) {
        return Err(Error::OracleInconsistent(format!(
            "oracle solution has size {l}, outside 1..={k}"
        )));
    }
    let (lifted, lifted_asg) = ex.lift(inst, opt, asg);
    let members: Vec<ElementId> = lifted.support().collect();

    let ids = ex.inst.sorted_ids();
    let coloring = random_colorings(&ids, l as usize, trials, cfg.seed.wrapping_add(l))
        .into_iter()
        .find(|c| separates(c, &members))
        .ok_or(Error::NoColoringSeparates { trials })?;

    let opt_weight = opt.weight(inst);
    let w = estimates
        .iter()
        .copied()
        .find(|&w| w >= opt_weight)
        .expect("the largest estimate bounds every solution of size k");
    let width = window_width(cfg, w, l as u32, ex.inst.n());
    let parts: Vec<Vec<ElementId>> = coloring
        .iter()
        .map(|part| {
            let rep = part
                .iter()
                .copied()
                .find(|x| members.contains(x))
                .expect("separated");
            let b = ex.inst.weight(rep) / width;
            part.iter()
                .copied()
                .filter(|&x| in_window(ex.inst.weight(x), b, width))
                .collect()
        })
        .collect();
    let root = good_tuple_from_opt(&[], &parts, &lifted, &lifted_asg, &ex.inst, cfg)?;
    let mode = Mode::Guided {
        opt: &lifted,
        asg: &lifted_asg,
    };
    match solve_annotated_with(&root, &ex.inst, cfg, mode, &mut Spent::default())? {
        Some(sol) => finish(inst, ex, &sol).map(Some),
        None => Ok(None),
    }
}
