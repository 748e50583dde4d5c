//! Canonization of group-symmetric data and the covering-number machinery
//! used to compare canonized, invariant and non-invariant models.
//!
//! The crate is organised bottom-up:
//!
//! * [`hilbert`] — order-`m`, dimension-`d` Hilbert curves on the dyadic grid.
//! * [`canon`] — canonization maps for permutations, signs and translations.
//! * [`metrics`] — base metrics and their quotients under the same groups,
//!   backed by exact assignment solvers in [`assignment`].
//! * [`coverage`] — train/test coverage, greedy nets and exact covering numbers.
//! * [`bounds`] — exact covering-number bound calculators.
//! * [`synth`] — seeded synthetic datasets and unit-cube normalization.

pub mod assignment;
pub mod bounds;
pub mod canon;
pub mod cloud;
pub mod coverage;
mod error;
pub mod hilbert;
pub mod metrics;
pub mod synth;

pub use bounds::{BoundQuery, LogValue};
pub use canon::CanonResult;
pub use cloud::PointCloud;
pub use coverage::{CoverageReport, Dataset, NetKind, NetResult};
pub use error::{Error, Result};
pub use hilbert::{CellCoord, HilbertIndex, HilbertParams};
pub use metrics::{BaseMetric, DistanceValue, MetricKind};
