//! The 4/3-approximation for bounded solution size.

pub mod annotated;
pub mod bucket;
pub mod config;
pub mod driver;
pub mod extended;
pub mod tuple;

pub use annotated::{solve_annotated, solve_annotated_with, taus_from_opt, Mode, Spent};
pub use bucket::{bucket_value, BucketScale};
pub use config::{parse_ratio, SolverConfig};
pub use driver::{
    expand_multiplicities, solve_approx, window_width, ApproxMode, ApproxResult, Expanded,
};
pub use extended::{size_bound, solve_extended, ExtendedFailure, ExtendedOutcome, ExtendedTuple};
pub use tuple::{
    candidate_set, for_each_tuple, good_tuple_from_opt, info_tuple, AnnotatedTuple, ClassView,
    InfoTuple,
};
