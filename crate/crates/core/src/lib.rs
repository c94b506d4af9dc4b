//! Octagonal lattices on the hyperbolic disk and the statistics of
//! directed walks on them.
//!
//! The crate builds a two-parameter family of octagons on the unit disk
//! with curvature -1, pairs opposite sides by explicit disk isometries,
//! and studies the tree of directed self-avoiding walks those pairings
//! generate:
//!
//! - [`octagon`] constructs the octagon of a module `(a, alpha)` in
//!   closed form — vertices, geodesic sides, side-pairing targets, and
//!   the eight generators — with a residual check of the defining vertex
//!   relations and of the group relation the generators must satisfy.
//! - [`walk`] enumerates every admissible generator word up to a
//!   generation budget and produces the exact length spectrum with
//!   deterministic, parallel reduction.
//! - [`multifractal`] turns a spectrum into partition functions, the
//!   tau(q) curve, generalized dimensions, the singularity spectrum, and
//!   the information entropy.
//! - [`markov`] replaces the exact enumeration with a multiplicative
//!   chain built from per-family step lengths and a pairwise correction
//!   matrix, plus a Gaussian closed form with erf tail cutoffs.
//! - [`liouville`] verifies the radial potential picture: a closed-form
//!   potential family, its defining equation checked in double-double
//!   arithmetic, the Euclidean time chart along a geodesic, and the
//!   exact pullback onto the disk metric.
//! - [`report`] renders every artifact to byte-deterministic CSV/JSON.
//!
//! Shared primitives live in [`hyperbolic`] (disk points, distances,
//! Moebius maps, geodesic arcs) and [`numeric`] (stable log-sum-exp,
//! erf, double-double arithmetic); all errors funnel through
//! [`error::Error`].

pub mod error;
pub mod hyperbolic;
pub mod liouville;
pub mod markov;
pub mod multifractal;
pub mod numeric;
pub mod octagon;
pub mod report;
pub mod walk;

pub use error::{Error, Result};
pub use hyperbolic::{
    distance_from_origin, hyperbolic_distance, DiskPoint, GeodesicArc, MoebiusMap,
};
pub use liouville::PotentialParams;
pub use markov::{ChainReport, StepLengths, TheoreticalBounds, XiMatrix};
pub use multifractal::{QGrid, TauCurve, TauPoint};
pub use octagon::{ModuleParams, OctagonGeometry};
pub use walk::{Histogram, LengthSpectrum, SpectrumSummary, WalkPolicy};
