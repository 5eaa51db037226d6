//! Annotated tuples and the objects derived from them.

use std::collections::{BTreeMap, BTreeSet};

use crate::approx::bucket::BucketScale;
use crate::approx::config::SolverConfig;
use crate::error::{Error, Result};
use crate::feasibility::coverage;
use crate::instance::{
    equivalence_classes, stars, Assignment, ClassKey, ElementId, EquivalenceClasses, Instance,
    Solution,
};

/// The classes of a partial solution with a set-to-class index.
#[derive(Debug, Clone)]
pub struct ClassView {
    pub classes: EquivalenceClasses,
    pub keys: Vec<ClassKey>,
    class_of: Vec<usize>,
}

impl ClassView {
    pub fn new(inst: &Instance, s: &[ElementId]) -> Result<Self> {
        let classes = equivalence_classes(inst, s)?;
        let keys: Vec<ClassKey> = classes.keys().cloned().collect();
        let mut class_of = vec![0; inst.m()];
        for (c, key) in keys.iter().enumerate() {
            for &idx in classes.class(key) {
                class_of[idx] = c;
            }
        }
        Ok(ClassView {
            classes,
            keys,
            class_of,
        })
    }

    pub fn size(&self, key: &[ElementId]) -> u64 {
        self.classes.class(key).len() as u64
    }

    /// `|A_E ⊙ v|` for every class, indexed like `keys`.
    pub fn incidence(&self, inst: &Instance, v: ElementId) -> Vec<u64> {
        let mut out = vec![0; self.keys.len()];
        for &idx in inst.sets_containing(v) {
            out[self.class_of[idx]] += 1;
        }
        out
    }
}

/// `(S, X_1..X_r, pi, gamma)`; the implicit solution size is `|S| + r`.
///
/// Missing `gamma` entries are 0. Only classes that contain sets appear in
/// `pi`; an absent class contributes nothing to any sum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnnotatedTuple {
    pub s: Vec<ElementId>,
    pub parts: Vec<Vec<ElementId>>,
    pub pi: BTreeMap<ClassKey, ElementId>,
    /// `gamma(i, E)` for part `i`.
    pub gamma_part: Vec<BTreeMap<ClassKey, u64>>,
    /// `gamma(s, E)` for `s` in `S`.
    pub gamma_elem: BTreeMap<ElementId, BTreeMap<ClassKey, u64>>,
}

impl AnnotatedTuple {
    pub fn k(&self) -> usize {
        self.s.len() + self.parts.len()
    }

    pub fn gamma(&self, part: usize, key: &[ElementId]) -> u64 {
        self.gamma_part[part].get(key).copied().unwrap_or(0)
    }

    /// `gamma(i, s)`: the sum of `gamma(i, E)` over classes sent to `s`.
    pub fn gamma_star(&self, part: usize, s: ElementId) -> u64 {
        self.pi
            .iter()
            .filter(|(_, &t)| t == s)
            .map(|(key, _)| self.gamma(part, key))
            .sum()
    }

    pub fn gamma_of_elem(&self, s: ElementId, key: &[ElementId]) -> u64 {
        self.gamma_elem
            .get(&s)
            .and_then(|row| row.get(key))
            .copied()
            .unwrap_or(0)
    }

    /// Stars `A_s` under `pi`.
    pub fn stars(&self, view: &ClassView) -> Result<BTreeMap<ElementId, Vec<usize>>> {
        stars(&view.classes, &self.pi)
    }

    /// Structural checks: disjointness, known ids, `pi` total into `S`, and
    /// every `gamma` a bucket level.
    pub fn validate(&self, inst: &Instance, cfg: &SolverConfig) -> Result<()> {
        let mut seen = BTreeSet::new();
        for &x in self.s.iter().chain(self.parts.iter().flatten()) {
            inst.element(x)?;
            if !seen.insert(x) {
                return Err(Error::Validation(format!(
                    "element {x} appears twice in the tuple"
                )));
            }
        }
        if self.s.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Validation("S must be sorted".into()));
        }
        if self.gamma_part.len() != self.parts.len() {
            return Err(Error::Validation(
                "one gamma row per part is required".into(),
            ));
        }
        if let Some((_, t)) = self
            .pi
            .iter()
            .find(|(_, t)| self.s.binary_search(t).is_err())
        {
            return Err(Error::Validation(format!("pi maps into {t}, outside S")));
        }
        let view = ClassView::new(inst, &self.s)?;
        self.stars(&view)?;
        let mut scale = BucketScale::new(cfg.bucket_base);
        let all = self
            .gamma_part
            .iter()
            .chain(self.gamma_elem.values())
            .flat_map(|row| row.values());
        for &g in all {
            if !scale.is_level(g) {
                return Err(Error::Validation(format!(
                    "gamma value {g} is not a bucket level"
                )));
            }
        }
        Ok(())
    }
}

/// Filtered parts with capped coverages and scores.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfoTuple {
    pub parts: Vec<Vec<ElementId>>,
    /// `n(v, E)`.
    pub n_class: BTreeMap<ElementId, BTreeMap<ClassKey, u64>>,
    /// `n(v, s)`.
    pub n_star: BTreeMap<ElementId, BTreeMap<ElementId, u64>>,
    pub score: BTreeMap<ElementId, BTreeMap<ElementId, u64>>,
}

impl InfoTuple {
    pub fn score(&self, v: ElementId, s: ElementId) -> u64 {
        self.score
            .get(&v)
            .and_then(|row| row.get(&s))
            .copied()
            .unwrap_or(0)
    }
}

/// `ceil(base * g)`.
fn scaled_ceiling(base: num_rational::Ratio<u64>, g: u64) -> u64 {
    let (a, b) = (u128::from(*base.numer()), u128::from(*base.denom()));
    u64::try_from((a * u128::from(g)).div_ceil(b)).unwrap_or(u64::MAX)
}

/// Keeps the elements of each part that can carry the tuple's coverage
/// estimates, and computes `n` and `score` for them.
///
/// `v` survives in part `i` when `cap(v) >= sum_s gamma(i, s)` and
/// `|A_E ⊙ v| >= gamma(i, E)` for every class. Then
/// `n(v, E) = min(ceil(base * gamma(i, E)), |A_E ⊙ v|)` and
/// `score(v, s) = max(0, min(n(v, s), cap(v) - sum_{s' != s} gamma(i, s')))`.
pub fn info_tuple(t: &AnnotatedTuple, inst: &Instance, cfg: &SolverConfig) -> Result<InfoTuple> {
    let view = ClassView::new(inst, &t.s)?;
    let mut out = InfoTuple {
        parts: Vec::with_capacity(t.parts.len()),
        n_class: BTreeMap::new(),
        n_star: BTreeMap::new(),
        score: BTreeMap::new(),
    };
    for (i, part) in t.parts.iter().enumerate() {
        let star_gamma: BTreeMap<ElementId, u64> =
            t.s.iter().map(|&s| (s, t.gamma_star(i, s))).collect();
        let total: u64 = star_gamma.values().sum();
        let mut kept = Vec::new();
        for &v in part {
            let cap = inst.element(v)?.cap;
            let inc = view.incidence(inst, v);
            let covers = view
                .keys
                .iter()
                .zip(&inc)
                .all(|(key, &c)| c >= t.gamma(i, key));
            if cap < total || !covers {
                continue;
            }
            kept.push(v);
            let n_class: BTreeMap<ClassKey, u64> = view
                .keys
                .iter()
                .zip(&inc)
                .map(|(key, &c)| {
                    (
                        key.clone(),
                        scaled_ceiling(cfg.bucket_base, t.gamma(i, key)).min(c),
                    )
                })
                .collect();
            let mut n_star: BTreeMap<ElementId, u64> = t.s.iter().map(|&s| (s, 0)).collect();
            for (key, &s) in &t.pi {
                *n_star.get_mut(&s).expect("pi maps into S") +=
                    n_class.get(key).copied().unwrap_or(0);
            }
            let score =
                t.s.iter()
                    .map(|&s| {
                        let others = i128::from(total) - i128::from(star_gamma[&s]);
                        let spare = i128::from(cap) - others;
                        let sc = i128::from(n_star[&s]).min(spare).max(0);
                        (s, sc as u64)
                    })
                    .collect();
            out.n_class.insert(v, n_class);
            out.n_star.insert(v, n_star);
            out.score.insert(v, score);
        }
        out.parts.push(kept);
    }
    Ok(out)
}

/// Candidate parts `X''`: a small filtered part is kept whole, a large one
/// shrinks to the union over the stars `tau1` sends to it of the `top_t`
/// best scorers (ties by ascending id). Each part is returned sorted.
pub fn candidate_set(
    tau1: &BTreeMap<ElementId, usize>,
    info: &InfoTuple,
    cfg: &SolverConfig,
) -> Vec<Vec<ElementId>> {
    info.parts
        .iter()
        .enumerate()
        .map(|(i, part)| {
            let mut chosen: Vec<ElementId> = if part.len() as u64 <= cfg.small_class_threshold {
                part.clone()
            } else {
                let mut acc = BTreeSet::new();
                for (&s, _) in tau1.iter().filter(|(_, &p)| p == i) {
                    let mut ranked = part.clone();
                    ranked.sort_by_key(|&v| (std::cmp::Reverse(info.score(v, s)), v));
                    let top = usize::try_from(cfg.top_t).unwrap_or(usize::MAX);
                    acc.extend(ranked.into_iter().take(top));
                }
                acc.into_iter().collect()
            };
            chosen.sort_unstable();
            chosen
        })
        .collect()
}

/// The tuple that respects `(opt, asg)`: bucketed coverages of the optimum's
/// element in each part and of each `s` in `S`, and `pi(E)` the element of
/// `S` covering most of `A_E` (ties by ascending id).
pub fn good_tuple_from_opt(
    s: &[ElementId],
    parts: &[Vec<ElementId>],
    opt: &Solution,
    asg: &Assignment,
    inst: &Instance,
    cfg: &SolverConfig,
) -> Result<AnnotatedTuple> {
    let mut s: Vec<ElementId> = s.to_vec();
    s.sort_unstable();
    if let Some(x) = s.iter().find(|&&x| opt.copies(x) == 0) {
        return Err(Error::PreconditionViolated(format!(
            "{x} is in S but not in the optimum"
        )));
    }
    let mut reps = Vec::with_capacity(parts.len());
    for (i, part) in parts.iter().enumerate() {
        if let Some(x) = part.iter().find(|x| s.binary_search(x).is_ok()) {
            return Err(Error::PreconditionViolated(format!(
                "{x} is both in S and in part {i}"
            )));
        }
        let hits: Vec<ElementId> = part
            .iter()
            .copied()
            .filter(|&x| opt.copies(x) > 0)
            .collect();
        if hits.len() != 1 {
            return Err(Error::PreconditionViolated(format!(
                "part {i} holds {} optimum elements",
                hits.len()
            )));
        }
        reps.push(hits[0]);
    }

    let view = ClassView::new(inst, &s)?;
    let mut scale = BucketScale::new(cfg.bucket_base);
    let mut pi = BTreeMap::new();
    let mut gamma_part = vec![BTreeMap::new(); parts.len()];
    let mut gamma_elem: BTreeMap<ElementId, BTreeMap<ClassKey, u64>> =
        s.iter().map(|&x| (x, BTreeMap::new())).collect();
    for key in &view.keys {
        let sets = view.classes.class(key);
        for (i, &v) in reps.iter().enumerate() {
            gamma_part[i].insert(key.clone(), scale.round(coverage(asg, v, sets)));
        }
        let mut best: Option<(u64, ElementId)> = None;
        for &x in &s {
            let c = coverage(asg, x, sets);
            gamma_elem
                .get_mut(&x)
                .unwrap()
                .insert(key.clone(), scale.round(c));
            if best.is_none_or(|(b, _)| c > b) {
                best = Some((c, x));
            }
        }
        if let Some((_, x)) = best {
            pi.insert(key.clone(), x);
        }
    }
    Ok(AnnotatedTuple {
        s,
        parts: parts.to_vec(),
        pi,
        gamma_part,
        gamma_elem,
    })
}

/// Advances a mixed-radix counter (last digit fastest). Returns false after
/// the final value.
pub(crate) fn odometer(digits: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radix[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

/// All tuples in `F_{S,X}`, streamed to `visit` until it returns
/// `Ok(Some(_))` or an error.
///
/// `pi` ranges over maps from the present classes into `S` (the empty map
/// when `S` is empty) and every part's `gamma(i, E)` over the bucket levels
/// up to `|A_E|`. Element rows of `gamma` stay empty: nothing downstream
/// reads them.
pub fn for_each_tuple<T, F>(
    s: &[ElementId],
    parts: &[Vec<ElementId>],
    inst: &Instance,
    cfg: &SolverConfig,
    mut visit: F,
) -> Result<Option<T>>
where
    F: FnMut(AnnotatedTuple) -> Result<Option<T>>,
{
    let mut s = s.to_vec();
    s.sort_unstable();
    let view = ClassView::new(inst, &s)?;
    let mut scale = BucketScale::new(cfg.bucket_base);
    let levels: Vec<Vec<u64>> = view
        .keys
        .iter()
        .map(|key| scale.levels(view.size(key)))
        .collect();
    let classes = view.keys.len();

    let pi_radix = if s.is_empty() {
        vec![]
    } else {
        vec![s.len(); classes]
    };
    let gamma_radix: Vec<usize> = (0..parts.len())
        .flat_map(|_| levels.iter().map(Vec::len))
        .collect();

    let mut pi_digits = vec![0; pi_radix.len()];
    loop {
        let pi: BTreeMap<ClassKey, ElementId> = pi_digits
            .iter()
            .enumerate()
            .map(|(c, &d)| (view.keys[c].clone(), s[d]))
            .collect();
        let mut gamma_digits = vec![0; gamma_radix.len()];
        loop {
            let gamma_part = (0..parts.len())
                .map(|i| {
                    (0..classes)
                        .map(|c| {
                            (
                                view.keys[c].clone(),
                                levels[c][gamma_digits[i * classes + c]],
                            )
                        })
                        .collect()
                })
                .collect();
            let t = AnnotatedTuple {
                s: s.clone(),
                parts: parts.to_vec(),
                pi: pi.clone(),
                gamma_part,
                gamma_elem: BTreeMap::new(),
            };
            if let Some(found) = visit(t)? {
                return Ok(Some(found));
            }
            if !odometer(&mut gamma_digits, &gamma_radix) {
                break;
            }
        }
        if !odometer(&mut pi_digits, &pi_radix) {
            break;
        }
    }
    Ok(None)
}
