//! Fractional Scientific Strength (FSS) research-productivity indicator and
//! analysis of how researchers' percentile ranks move when each field is
//! ranked against same-gender colleagues instead of the pooled population.
//!
//! The math modules are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the pipeline uses.

// `!(x > 0.0)` is used on purpose so NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod corpus;
pub mod credit;
pub mod error;
pub mod fss;
pub mod impact;
pub mod kv;
pub mod pipeline;
pub mod ranking;
pub mod scalar;
pub mod stats;
pub mod synth;
mod table;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type ShareVector = credit::ShareVector<f64>;
pub type ShareSet = credit::ShareSet<f64>;
pub type CreditWeights = credit::CreditWeights<f64>;
pub type CitationBaseline = impact::CitationBaseline<f64>;
pub type FssScore = fss::FssScore<f64>;
pub type DistanceRatio = ranking::DistanceRatio<f64>;
pub type RankEntry = ranking::RankEntry<f64>;
pub type RankShift = ranking::RankShift<f64>;
pub type FieldClass = ranking::FieldClass<f64>;
pub type ShiftSummary = ranking::ShiftSummary<f64>;
pub type PointBiserialResult = stats::PointBiserialResult<f64>;
pub type TestResult = stats::TestResult<f64>;
pub type DensityCurve = stats::DensityCurve<f64>;
pub type Descriptive = stats::Descriptive<f64>;

pub type ShareVectorF32 = credit::ShareVector<f32>;
pub type FssScoreF32 = fss::FssScore<f32>;
pub type RankEntryF32 = ranking::RankEntry<f32>;
