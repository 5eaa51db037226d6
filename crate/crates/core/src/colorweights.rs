//! Random colorings standing in for a perfect hash family, and the sweep of
//! weight estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::instance::{ElementId, Instance};

/// A coloring of ids into `k` ordered parts (some possibly empty).
pub type Coloring = Vec<Vec<ElementId>>;

/// `trials` independent uniform colorings with `k` colors. Each part keeps
/// the input order of `ids`.
pub fn random_colorings(ids: &[ElementId], k: usize, trials: usize, seed: u64) -> Vec<Coloring> {
    assert!(k >= 1 && trials >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .map(|_| {
            let mut parts = vec![Vec::new(); k];
            for &x in ids {
                parts[rng.gen_range(0..k)].push(x);
            }
            parts
        })
        .collect()
}

/// `ceil(e^k * k * ln(n + 1))`, at least 1 and at most `cap`.
pub fn default_trials(k: usize, n: usize, cap: usize) -> usize {
    let t = (k as f64).exp() * k as f64 * ((n + 1) as f64).ln();
    (t.ceil() as usize).clamp(1, cap.max(1))
}

/// True iff every element of `targets` gets a different color.
pub fn separates(coloring: &Coloring, targets: &[ElementId]) -> bool {
    let mut seen = vec![false; coloring.len()];
    for x in targets {
        match coloring.iter().position(|part| part.contains(x)) {
            Some(c) if !seen[c] => seen[c] = true,
            _ => return false,
        }
    }
    true
}

/// Doubling sweep of candidate optimum weights.
///
/// Starts from the smallest positive weight and doubles while below the
/// total weight `sum w(x) * min(k, M(x))`, which closes the list. A zero
/// weight element adds the estimate 0 in front.
pub fn weight_estimates(inst: &Instance, k: u32) -> Vec<u64> {
    let total: u64 = inst
        .elements()
        .iter()
        .map(|e| e.weight.saturating_mul(u64::from(e.mult.clamp(k))))
        .fold(0, u64::saturating_add);
    let mut out = Vec::new();
    if inst.elements().iter().any(|e| e.weight == 0) {
        out.push(0);
    }
    if let Some(min) = inst
        .elements()
        .iter()
        .map(|e| e.weight)
        .filter(|&w| w > 0)
        .min()
    {
        let mut w = min;
        while w < total {
            out.push(w);
            w = w.saturating_mul(2);
        }
        out.push(total);
    }
    out
}
