//! The recursive solver over annotated tuples.

use std::collections::BTreeMap;

use crate::approx::config::SolverConfig;
use crate::approx::extended::{solve_extended, ExtendedTuple};
use crate::approx::tuple::{
    candidate_set, for_each_tuple, good_tuple_from_opt, info_tuple, odometer, AnnotatedTuple,
    ClassView,
};
use crate::error::{Error, Result};
use crate::feasibility::{check_feasible, coverage};
use crate::instance::{Assignment, ElementId, Instance, Solution};

/// How the recursion chooses its guesses.
#[derive(Debug, Clone, Copy)]
pub enum Mode<'a> {
    /// Try every guess, subject to the configured budgets.
    Enumerate,
    /// Follow the single guess that a known optimum and its assignment
    /// certify as good.
    Guided {
        opt: &'a Solution,
        asg: &'a Assignment,
    },
}

/// Work spent so far, shared across one top-level call.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Spent {
    pub tuples: u64,
    pub recursions: u64,
}

/// Solves an annotated tuple; see [`solve_annotated_with`].
pub fn solve_annotated(
    t: &AnnotatedTuple,
    inst: &Instance,
    cfg: &SolverConfig,
    mode: Mode<'_>,
) -> Result<Option<Solution>> {
    solve_annotated_with(t, inst, cfg, mode, &mut Spent::default())
}

/// Returns a feasible solution of size at most `ceil(4k/3)` with at most
/// two elements in each part, or `None`.
///
/// A tuple without parts is solved by `S` itself when feasible. Otherwise
/// every choice of `tau1` yields candidate parts; each candidate `v` of part
/// `i` is added to `S`, part `i` is dropped, and the recursion runs on the
/// resulting tuples. The extended-tuple step then runs for every `tau2`
/// differing from `tau1` at each element of `S`.
pub fn solve_annotated_with(
    t: &AnnotatedTuple,
    inst: &Instance,
    cfg: &SolverConfig,
    mode: Mode<'_>,
    spent: &mut Spent,
) -> Result<Option<Solution>> {
    match mode {
        Mode::Enumerate => enumerate(t, inst, cfg, spent),
        Mode::Guided { opt, asg } => guided(t, inst, cfg, opt, asg, spent),
    }
}

fn base_case(t: &AnnotatedTuple, inst: &Instance) -> Result<Option<Solution>> {
    let sol = Solution::from_set(t.s.iter().copied());
    Ok(check_feasible(inst, &sol)?.map(|_| sol))
}

fn charge_recursion(spent: &mut Spent, cfg: &SolverConfig) -> Result<()> {
    if spent.recursions >= cfg.recursion_budget {
        return Err(Error::BudgetExceeded(format!(
            "recursion budget of {} calls",
            cfg.recursion_budget
        )));
    }
    spent.recursions += 1;
    Ok(())
}

fn child_parts(parts: &[Vec<ElementId>], drop: usize) -> Vec<Vec<ElementId>> {
    parts
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != drop)
        .map(|(_, p)| p.clone())
        .collect()
}

fn with_element(s: &[ElementId], v: ElementId) -> Vec<ElementId> {
    let mut out = s.to_vec();
    out.push(v);
    out.sort_unstable();
    out
}

fn enumerate(
    t: &AnnotatedTuple,
    inst: &Instance,
    cfg: &SolverConfig,
    spent: &mut Spent,
) -> Result<Option<Solution>> {
    if t.parts.is_empty() {
        return base_case(t, inst);
    }
    if spent.tuples >= cfg.tuple_budget {
        return Err(Error::BudgetExceeded(format!(
            "tuple budget of {} annotated tuples",
            cfg.tuple_budget
        )));
    }
    spent.tuples += 1;

    let r = t.parts.len();
    let info = info_tuple(t, inst, cfg)?;
    let radix = vec![r; t.s.len()];
    let as_map = |digits: &[usize]| -> BTreeMap<ElementId, usize> {
        t.s.iter().copied().zip(digits.iter().copied()).collect()
    };

    let mut d1 = vec![0; t.s.len()];
    loop {
        let tau1 = as_map(&d1);
        let candidates = candidate_set(&tau1, &info, cfg);
        for (i, part) in candidates.iter().enumerate() {
            let rest = child_parts(&t.parts, i);
            for &v in part {
                let s2 = with_element(&t.s, v);
                let found = for_each_tuple(&s2, &rest, inst, cfg, |child| {
                    charge_recursion(spent, cfg)?;
                    enumerate(&child, inst, cfg, spent)
                })?;
                if found.is_some() {
                    return Ok(found);
                }
            }
        }

        let mut d2 = vec![0; t.s.len()];
        loop {
            if d1.iter().zip(&d2).all(|(a, b)| a != b) {
                let e = ExtendedTuple {
                    base: t.clone(),
                    tau1: tau1.clone(),
                    tau2: as_map(&d2),
                };
                if let Ok(sol) = solve_extended(&e, inst, cfg)? {
                    return Ok(Some(sol));
                }
            }
            if !odometer(&mut d2, &radix) {
                break;
            }
        }
        if !odometer(&mut d1, &radix) {
            break;
        }
    }
    Ok(None)
}

/// `(tau1, tau2)` from a known optimum: for each `s`, the parts whose
/// optimum element covers the most and second-most sets of the star `A_s`
/// (ties by ascending part index). With a single part both are that part.
pub fn taus_from_opt(
    t: &AnnotatedTuple,
    reps: &[ElementId],
    asg: &Assignment,
    inst: &Instance,
) -> Result<(BTreeMap<ElementId, usize>, BTreeMap<ElementId, usize>)> {
    let view = ClassView::new(inst, &t.s)?;
    let stars = t.stars(&view)?;
    let mut tau1 = BTreeMap::new();
    let mut tau2 = BTreeMap::new();
    for &s in &t.s {
        let sets = stars.get(&s).map(Vec::as_slice).unwrap_or(&[]);
        let cov: Vec<u64> = reps.iter().map(|&v| coverage(asg, v, sets)).collect();
        let argmax = |skip: Option<usize>| {
            (0..reps.len())
                .filter(|&i| Some(i) != skip)
                .fold(None, |best: Option<usize>, i| match best {
                    Some(b) if cov[b] >= cov[i] => Some(b),
                    _ => Some(i),
                })
        };
        let first = argmax(None).expect("at least one part");
        tau1.insert(s, first);
        tau2.insert(s, argmax(Some(first)).unwrap_or(first));
    }
    Ok((tau1, tau2))
}

fn guided(
    t: &AnnotatedTuple,
    inst: &Instance,
    cfg: &SolverConfig,
    opt: &Solution,
    asg: &Assignment,
    spent: &mut Spent,
) -> Result<Option<Solution>> {
    if let Some(x) = t.s.iter().find(|&&x| opt.copies(x) == 0) {
        return Err(Error::OracleInconsistent(format!(
            "{x} is in S but not in the optimum"
        )));
    }
    if t.parts.is_empty() {
        return base_case(t, inst);
    }
    let mut reps = Vec::with_capacity(t.parts.len());
    for (i, part) in t.parts.iter().enumerate() {
        let hits: Vec<ElementId> = part
            .iter()
            .copied()
            .filter(|&x| opt.copies(x) > 0)
            .collect();
        if hits.len() != 1 {
            return Err(Error::OracleInconsistent(format!(
                "part {i} holds {} optimum elements",
                hits.len()
            )));
        }
        reps.push(hits[0]);
    }

    let (tau1, tau2) = taus_from_opt(t, &reps, asg, inst)?;
    let info = info_tuple(t, inst, cfg)?;
    let candidates = candidate_set(&tau1, &info, cfg);
    if let Some(i) = (0..reps.len()).find(|&i| candidates[i].binary_search(&reps[i]).is_ok()) {
        let s2 = with_element(&t.s, reps[i]);
        let rest = child_parts(&t.parts, i);
        let child = good_tuple_from_opt(&s2, &rest, opt, asg, inst, cfg)?;
        charge_recursion(spent, cfg)?;
        if let Some(sol) = guided(&child, inst, cfg, opt, asg, spent)? {
            return Ok(Some(sol));
        }
    }
    let e = ExtendedTuple {
        base: t.clone(),
        tau1,
        tau2,
    };
    Ok(solve_extended(&e, inst, cfg)?.ok())
}
