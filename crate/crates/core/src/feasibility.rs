//! Feasibility of a candidate solution, decided by integral maximum flow.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};
use crate::instance::{Assignment, ElementId, Instance, Solution};

pub const DEFAULT_ORACLE_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Arc {
    pub from: usize,
    pub to: usize,
    pub cap: u64,
}

/// A directed network with arcs kept in insertion order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowNetwork {
    pub nodes: usize,
    pub source: usize,
    pub sink: usize,
    pub arcs: Vec<Arc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlowResult {
    pub value: u64,
    /// Flow on each arc, indexed like `FlowNetwork::arcs`.
    pub flow: Vec<u64>,
}

impl FlowNetwork {
    pub fn new(nodes: usize, source: usize, sink: usize) -> Self {
        FlowNetwork {
            nodes,
            source,
            sink,
            arcs: Vec::new(),
        }
    }

    pub fn add_arc(&mut self, from: usize, to: usize, cap: u64) -> usize {
        assert!(from < self.nodes && to < self.nodes);
        self.arcs.push(Arc { from, to, cap });
        self.arcs.len() - 1
    }
}

/// Dinic's algorithm. Adjacency follows arc insertion order, so the result
/// is deterministic for a fixed network.
pub fn max_flow(net: &FlowNetwork) -> FlowResult {
    // Residual edges: 2*i is arc i, 2*i+1 its reverse.
    let mut head = vec![Vec::new(); net.nodes];
    let mut to = Vec::with_capacity(2 * net.arcs.len());
    let mut residual = Vec::with_capacity(2 * net.arcs.len());
    for a in &net.arcs {
        head[a.from].push(to.len());
        to.push(a.to);
        residual.push(a.cap);
        head[a.to].push(to.len());
        to.push(a.from);
        residual.push(0);
    }

    let mut value = 0u64;
    if net.source != net.sink {
        let mut level = vec![usize::MAX; net.nodes];
        let mut next = vec![0usize; net.nodes];
        loop {
            level.iter_mut().for_each(|l| *l = usize::MAX);
            level[net.source] = 0;
            let mut queue = VecDeque::from([net.source]);
            while let Some(u) = queue.pop_front() {
                for &e in &head[u] {
                    if residual[e] > 0 && level[to[e]] == usize::MAX {
                        level[to[e]] = level[u] + 1;
                        queue.push_back(to[e]);
                    }
                }
            }
            if level[net.sink] == usize::MAX {
                break;
            }
            next.iter_mut().for_each(|n| *n = 0);
            loop {
                let pushed = augment(
                    net.source,
                    net.sink,
                    u64::MAX,
                    &head,
                    &to,
                    &mut residual,
                    &level,
                    &mut next,
                );
                if pushed == 0 {
                    break;
                }
                value += pushed;
            }
        }
    }

    let flow = net
        .arcs
        .iter()
        .enumerate()
        .map(|(i, a)| a.cap - residual[2 * i])
        .collect();
    FlowResult { value, flow }
}

#[allow(clippy::too_many_arguments)]
fn augment(
    u: usize,
    sink: usize,
    limit: u64,
    head: &[Vec<usize>],
    to: &[usize],
    residual: &mut [u64],
    level: &[usize],
    next: &mut [usize],
) -> u64 {
    if u == sink {
        return limit;
    }
    while next[u] < head[u].len() {
        let e = head[u][next[u]];
        let v = to[e];
        if residual[e] > 0 && level[v] == level[u] + 1 {
            let pushed = augment(
                v,
                sink,
                limit.min(residual[e]),
                head,
                to,
                residual,
                level,
                next,
            );
            if pushed > 0 {
                residual[e] -= pushed;
                residual[e ^ 1] += pushed;
                return pushed;
            }
        }
        next[u] += 1;
    }
    0
}

struct AssignmentNetwork {
    net: FlowNetwork,
    /// (set index, element) for every set-to-element arc, by arc index.
    choice: BTreeMap<usize, (usize, ElementId)>,
}

fn assignment_network(inst: &Instance, sol: &Solution) -> AssignmentNetwork {
    let bought: Vec<ElementId> = sol.support().filter(|&x| sol.copies(x) > 0).collect();
    let m = inst.m();
    let (source, sink) = (0, 1);
    let element_node = |x: ElementId| 2 + m + bought.binary_search(&x).unwrap();
    let mut net = FlowNetwork::new(2 + m + bought.len(), source, sink);
    for idx in 0..m {
        net.add_arc(source, 2 + idx, 1);
    }
    let mut choice = BTreeMap::new();
    for (idx, set) in inst.family().iter().enumerate() {
        for &x in set {
            if bought.binary_search(&x).is_ok() {
                let arc = net.add_arc(2 + idx, element_node(x), 1);
                choice.insert(arc, (idx, x));
            }
        }
    }
    for &x in &bought {
        let cap = inst.cap(x).saturating_mul(u64::from(sol.copies(x)));
        net.add_arc(element_node(x), sink, cap);
    }
    AssignmentNetwork { net, choice }
}

fn check_known(inst: &Instance, sol: &Solution) -> Result<()> {
    match sol.support().find(|&x| !inst.contains(x)) {
        Some(x) => Err(Error::UnknownElement(x)),
        None => Ok(()),
    }
}

/// Returns an assignment covering every set within the bought capacity, or
/// `None` when none exists.
pub fn check_feasible(inst: &Instance, sol: &Solution) -> Result<Option<Assignment>> {
    check_known(inst, sol)?;
    let AssignmentNetwork { net, choice } = assignment_network(inst, sol);
    let result = max_flow(&net);
    if result.value < inst.m() as u64 {
        return Ok(None);
    }
    let mut target = vec![ElementId(0); inst.m()];
    for (&arc, &(idx, x)) in &choice {
        if result.flow[arc] == 1 {
            target[idx] = x;
        }
    }
    let asg = Assignment::new(target);
    debug_assert!(asg.is_valid_for(inst, sol));
    Ok(Some(asg))
}

pub fn is_feasible(inst: &Instance, sol: &Solution) -> Result<bool> {
    Ok(check_feasible(inst, sol)?.is_some())
}

/// Exhaustive search over membership-respecting assignments, used as an
/// oracle for [`check_feasible`]. Refuses instances with more than `limit`
/// sets.
pub fn brute_force_assignment(
    inst: &Instance,
    sol: &Solution,
    limit: usize,
) -> Result<Option<Assignment>> {
    if inst.m() > limit {
        return Err(Error::OracleTooLarge {
            sets: inst.m(),
            limit,
        });
    }
    check_known(inst, sol)?;
    let mut room: BTreeMap<ElementId, u64> = sol
        .iter()
        .map(|(x, c)| (x, inst.cap(x).saturating_mul(u64::from(c))))
        .collect();
    let mut target = Vec::with_capacity(inst.m());
    if place(inst, 0, &mut room, &mut target) {
        Ok(Some(Assignment::new(target)))
    } else {
        Ok(None)
    }
}

fn place(
    inst: &Instance,
    idx: usize,
    room: &mut BTreeMap<ElementId, u64>,
    target: &mut Vec<ElementId>,
) -> bool {
    if idx == inst.m() {
        return true;
    }
    for &x in inst.set(idx) {
        match room.get_mut(&x) {
            Some(r) if *r > 0 => *r -= 1,
            _ => continue,
        }
        target.push(x);
        if place(inst, idx + 1, room, target) {
            return true;
        }
        target.pop();
        *room.get_mut(&x).unwrap() += 1;
    }
    false
}

/// `cov(x, indices)`: how many of the listed sets are assigned to `x`.
pub fn coverage(asg: &Assignment, x: ElementId, indices: &[usize]) -> u64 {
    indices.iter().filter(|&&i| asg.target(i) == x).count() as u64
}
