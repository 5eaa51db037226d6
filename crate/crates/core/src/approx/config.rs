use num_rational::Ratio;

use crate::error::{Error, Result};

/// Cap on the number of random colorings tried by default.
pub const DEFAULT_TRIAL_CAP: usize = 10_000;
pub const DEFAULT_TUPLE_BUDGET: u64 = 200_000;
pub const DEFAULT_RECURSION_BUDGET: u64 = 200_000;

/// Constants and budgets of the approximation pipeline.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub k: u32,
    /// Overlap threshold of the independence test.
    pub rho: Ratio<u64>,
    /// How many top scorers per star survive into a large candidate part.
    pub top_t: u64,
    /// Parts up to this size are kept whole as candidates.
    pub small_class_threshold: u64,
    pub bucket_base: Ratio<u64>,
    /// Annotated tuples the enumerating solver may visit.
    pub tuple_budget: u64,
    /// Recursive calls the annotated solver may make.
    pub recursion_budget: u64,
    pub seed: u64,
    pub epsilon: Ratio<u64>,
    /// Random colorings per weight window sweep; `None` uses
    /// `ceil(e^k * k * ln(n + 1))` capped at [`DEFAULT_TRIAL_CAP`].
    pub trials: Option<usize>,
}

fn pow_saturating(base: u64, exp: u32) -> u64 {
    base.checked_pow(exp).unwrap_or(u64::MAX)
}

impl SolverConfig {
    /// `rho = 1/k^4`, `top_t = d k^10`, `small_class_threshold = d k^11`,
    /// `bucket_base = 1 + 1/(3k)`, `epsilon = 1/2`.
    pub fn defaults(k: u32, d: usize) -> Self {
        let kk = u64::from(k.max(1));
        let d = d as u64;
        SolverConfig {
            k,
            rho: Ratio::new(1, pow_saturating(kk, 4)),
            top_t: d.saturating_mul(pow_saturating(kk, 10)),
            small_class_threshold: d.saturating_mul(pow_saturating(kk, 11)),
            bucket_base: Ratio::new(3 * kk + 1, 3 * kk),
            tuple_budget: DEFAULT_TUPLE_BUDGET,
            recursion_budget: DEFAULT_RECURSION_BUDGET,
            seed: 0,
            epsilon: Ratio::new(1, 2),
            trials: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if *self.rho.numer() == 0 || self.rho > Ratio::from_integer(1) {
            return Err(Error::Validation(format!(
                "rho = {} is outside (0, 1]",
                self.rho
            )));
        }
        if self.bucket_base <= Ratio::from_integer(1) {
            return Err(Error::Validation(format!(
                "bucket base {} must exceed 1",
                self.bucket_base
            )));
        }
        if *self.epsilon.numer() == 0 {
            return Err(Error::Validation("epsilon must be positive".into()));
        }
        if self.trials == Some(0) {
            return Err(Error::Validation(
                "at least one coloring trial is needed".into(),
            ));
        }
        Ok(())
    }

    /// Applies `key=value` overrides; rationals are written `a/b`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = || Error::Validation(format!("cannot parse {value:?} for {key}"));
        let int = || value.trim().parse::<u64>().map_err(|_| bad());
        let mut next = self.clone();
        match key {
            "rho" => next.rho = parse_ratio(value).ok_or_else(bad)?,
            "bucket_base" => next.bucket_base = parse_ratio(value).ok_or_else(bad)?,
            "epsilon" => next.epsilon = parse_ratio(value).ok_or_else(bad)?,
            "top_t" => next.top_t = int()?,
            "small_class_threshold" => next.small_class_threshold = int()?,
            "tuple_budget" => next.tuple_budget = int()?,
            "recursion_budget" => next.recursion_budget = int()?,
            "seed" => next.seed = int()?,
            "trials" => next.trials = Some(int()? as usize),
            _ => return Err(Error::Validation(format!("unknown constant {key}"))),
        }
        next.validate()?;
        *self = next;
        Ok(())
    }
}

/// Parses `a/b` or a plain integer.
pub fn parse_ratio(text: &str) -> Option<Ratio<u64>> {
    let text = text.trim();
    match text.split_once('/') {
        Some((a, b)) => {
            let (a, b) = (a.trim().parse().ok()?, b.trim().parse::<u64>().ok()?);
            (b != 0).then(|| Ratio::new(a, b))
        }
        None => text.parse().ok().map(Ratio::from_integer),
    }
}
