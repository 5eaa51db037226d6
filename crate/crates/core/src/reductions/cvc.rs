//! Knapsack to capacitated vertex cover with parallel edges, as an instance
//! of the hitting-set problem with `d = 2`.

use crate::error::{Error, Result};
use crate::instance::{Element, ElementId, Instance, Multiplicity, Solution};
use crate::reductions::mdk::MdkInstance;

/// A vertex cover instance built from a knapsack instance with `N` vectors
/// and `d` dimensions. Vertex ids: `u_i = i` for vectors, `d_j = N + j` and
/// `d'_j = N + d + j` for dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CvcReduction {
    pub inst: Instance,
    /// Solution-size parameter: the knapsack `k` plus `d`.
    pub k: usize,
    /// Weight budget, set only by [`mdk_to_wcvc`].
    pub weight_budget: Option<u64>,
    pub vectors: usize,
    pub dims: usize,
}

impl CvcReduction {
    pub fn u(&self, i: usize) -> ElementId {
        ElementId(i as u32)
    }

    pub fn dim(&self, j: usize) -> ElementId {
        ElementId((self.vectors + j) as u32)
    }

    pub fn dim_prime(&self, j: usize) -> ElementId {
        ElementId((self.vectors + self.dims + j) as u32)
    }

    /// The cover `{u_i : i in indices} ∪ D` matching a knapsack solution.
    pub fn lift(&self, indices: &[usize]) -> Solution {
        Solution::from_set(
            indices
                .iter()
                .map(|&i| self.u(i))
                .chain((0..self.dims).map(|j| self.dim(j))),
        )
    }

    /// Vector indices of the `U` vertices in `sol`.
    pub fn restrict(&self, sol: &Solution) -> Vec<usize> {
        sol.support()
            .map(|x| x.0 as usize)
            .filter(|&x| x < self.vectors)
            .collect()
    }
}

/// Builds the unit-multiplicity cover instance: one edge `(d_j, d'_j)` per
/// dimension and `v_j` parallel edges `(u_v, d_j)`. Capacities are
/// `x_j - t_j + 1` on `d_j` (`x_j` the column sum), 0 on `d'_j` and the edge
/// count on `U`, which no load can exceed. All weights are 1.
pub fn mdk_to_cvc(mdk: &MdkInstance) -> Result<CvcReduction> {
    let n = mdk.vectors().len();
    let d = mdk.d();
    let sums = mdk.column_sums();
    if let Some(j) = (0..d).find(|&j| mdk.target()[j] > sums[j]) {
        return Err(Error::TargetExceedsColumnSum {
            dim: j,
            target: mdk.target()[j],
            column_sum: sums[j],
        });
    }

    let mut family: Vec<Vec<ElementId>> = Vec::new();
    for j in 0..d {
        family.push(vec![
            ElementId((n + j) as u32),
            ElementId((n + d + j) as u32),
        ]);
    }
    for (i, v) in mdk.vectors().iter().enumerate() {
        for (j, &alpha) in v.iter().enumerate() {
            for _ in 0..alpha {
                family.push(vec![ElementId(i as u32), ElementId((n + j) as u32)]);
            }
        }
    }
    let m = family.len() as u64;

    let one = Multiplicity::Bounded(1);
    let mut elements: Vec<Element> = (0..n).map(|i| Element::new(i as u32, m, one, 1)).collect();
    for (j, (&x, &t)) in sums.iter().zip(mdk.target()).enumerate() {
        elements.push(Element::new((n + j) as u32, x - t + 1, one, 1));
    }
    for j in 0..d {
        elements.push(Element::new((n + d + j) as u32, 0, one, 1));
    }

    Ok(CvcReduction {
        inst: Instance::new(2, elements, family)?,
        k: mdk.k + d,
        weight_budget: None,
        vectors: n,
        dims: d,
    })
}

/// [`mdk_to_cvc`] with weights 1 on `U`, 0 on `D` and `|V| * m + 1` on
/// `D'`, above the weight of any set of vertices. The budget is the
/// knapsack `k`.
pub fn mdk_to_wcvc(mdk: &MdkInstance) -> Result<CvcReduction> {
    let base = mdk_to_cvc(mdk)?;
    let (n, d) = (base.vectors, base.dims);
    let sentinel = (base.inst.n() as u64) * (base.inst.m() as u64) + 1;
    let elements = base
        .inst
        .elements()
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let weight = match idx {
                i if i < n => 1,
                i if i < n + d => 0,
                _ => sentinel,
            };
            Element::new(e.id.0, e.cap, e.mult, weight)
        })
        .collect();
    Ok(CvcReduction {
        inst: Instance::new(2, elements, base.inst.family().to_vec())?,
        weight_budget: Some(mdk.k as u64),
        ..base
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::check_feasible;

    #[test]
    fn single_vector() {
        let mdk = MdkInstance::new(vec![vec![1]], vec![1], 1).unwrap();
        let red = mdk_to_cvc(&mdk).unwrap();
        assert_eq!((red.inst.n(), red.inst.m(), red.k), (3, 2, 2));
        assert_eq!(red.inst.cap(red.dim(0)), 1);
        assert_eq!(red.inst.cap(red.dim_prime(0)), 0);
        let sol = red.lift(&[0]);
        assert_eq!(sol.size(), 2);
        assert!(check_feasible(&red.inst, &sol).unwrap().is_some());
        assert!(check_feasible(&red.inst, &Solution::from_set([red.dim(0)]))
            .unwrap()
            .is_none());
    }

    #[test]
    fn zero_target_needs_only_dimensions() {
        let mdk = MdkInstance::new(vec![vec![2, 1], vec![0, 3]], vec![0, 0], 0).unwrap();
        let red = mdk_to_cvc(&mdk).unwrap();
        let sol = red.lift(&[]);
        assert_eq!(sol.size() as usize, red.dims);
        assert!(check_feasible(&red.inst, &sol).unwrap().is_some());
    }

    #[test]
    fn target_above_column_sum() {
        let mdk = MdkInstance::new(vec![vec![1, 1]], vec![1, 2], 1).unwrap();
        assert_eq!(
            mdk_to_cvc(&mdk),
            Err(Error::TargetExceedsColumnSum {
                dim: 1,
                target: 2,
                column_sum: 1
            })
        );
    }

    #[test]
    fn weights() {
        let mdk = MdkInstance::new(vec![vec![1, 0], vec![1, 2]], vec![1, 1], 1).unwrap();
        let red = mdk_to_wcvc(&mdk).unwrap();
        assert_eq!(red.weight_budget, Some(1));
        let sol = red.lift(&[1]);
        assert_eq!(sol.weight(&red.inst), 1);
        assert!(check_feasible(&red.inst, &sol).unwrap().is_some());
        let big = red.inst.weight(red.dim_prime(0));
        assert_eq!(big, (red.inst.n() * red.inst.m()) as u64 + 1);
        assert_eq!(red.restrict(&sol), vec![1]);
    }
}
