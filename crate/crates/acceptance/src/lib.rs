//! Slow, obviously-correct reference implementations used by the acceptance
//! suite. Everything here works on univariate `f64` slices and enumerates the
//! search space instead of running a recurrence.

pub mod align;
pub mod linalg;
pub mod medoid;
