//! Detection-quality evaluation and contingency-table testing.

mod chisq;
mod matching;
mod report;

pub use self::chisq::{chi_square, chi_square_sf, ChiSquare, ContingencyTable};
pub use self::matching::{match_detections, prf, MatchResult, MatchedPair, PrfScores};
pub use self::report::{evaluate_stages, write_eval_csv, EvalRow, Stage};
