//! Statistical tests and summaries used to compare FSS distributions by gender.

pub mod correlation;
pub mod descriptive;
pub mod dist;
pub mod hypothesis;
pub mod kde;

pub use correlation::{point_biserial, PointBiserialResult};
pub use descriptive::{descriptive_stats, Descriptive};
pub use hypothesis::{
    mann_whitney_u, t_test_independent, z_test_proportions, TestKind, TestResult,
};
pub use kde::{epanechnikov_kde, silverman_bandwidth, DensityCurve};
