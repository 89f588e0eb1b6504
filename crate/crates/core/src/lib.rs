//! p-adic arithmetic and the q-bracket `[x]_q = (q^x - 1)/(q - 1)` on the p-adic unit disk,
//! with tools to locate its nontrivial fixed points.

pub mod analytic;
pub mod error;
pub mod harness;
pub mod padic;
pub mod polygon;
pub mod solver;
pub mod valuation;

pub use error::{Error, Result};
pub use harness::{run_all, run_suite, HarnessConfig, SuiteId, SuiteReport};
pub use padic::{Constraint, PadicJson, PadicNumber, PrimeContext};
pub use polygon::{
    polygon_build, unit_disk_zero_count, ExtValuation, NewtonPolygon, Segment, Slope,
};
pub use solver::{Fiber, FixedPointRecord};
pub use valuation::{Valuation, ValuationQ};
