//! Monte-Carlo laboratory for the convex hull spanned by several independent
//! planar random walks.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: exact convex geometry (hulls, perimeter, diameter, support
//!   functions, Cauchy quadratures, Hausdorff distance).
//! - [`rng`] and [`walks`]: reproducible increment sampling, walk paths,
//!   ensembles and the resampling construction.
//! - [`asymptotics`]: drift geometry, limit shape, limiting variance constants
//!   and the linear approximation sums for perimeter and diameter.
//! - [`oracle`]: exact enumeration for small discrete ensembles.
//! - [`montecarlo`]: replicated experiments and convergence diagnostics.
//! - [`stats`]: normality tests and the p-value grid pipeline.
//! - [`io`]: stable CSV/JSON artifact formats.

pub mod asymptotics;
pub mod error;
pub mod geometry;
pub mod io;
pub mod montecarlo;
pub mod oracle;
pub mod rng;
pub mod stats;
pub mod walks;

pub use error::{Error, Result};
pub use geometry::{AngleGrid, ConvexPolygon, Point2};
