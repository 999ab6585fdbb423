//! Numerical engine for free additive convolution.
//!
//! Given a freely infinitely divisible law `mu` (described by its shift and
//! Levy measure, or by a closed-form Voiculescu transform) and an arbitrary
//! probability law `nu`, this crate computes the spectral data of the free
//! additive convolution `mu ⊞ nu`: absolutely continuous density, atoms,
//! support components, and the local regularity of the density at its zeros.
//!
//! The method inverts the analytic map `H(z) = z + phi_mu(F_nu(z))` globally
//! on the region above the graph of a boundary-height function `f`, rather
//! than solving the subordination fixed point locally per grid node. All
//! boundary classification (where the density vanishes and how) reduces to a
//! small family of singular integrals against `nu` and the Levy measure.
//!
//! # Where to start
//!
//! The `examples/` directory is the primary tour; each file is runnable with
//! `cargo run --example <name>`:
//!
//! * `semicircle` - the free Gaussian semigroup, density vs. closed form
//! * `marchenko_pastur` - free Poisson: atom decay and bulk density
//! * `cauchy_smoothing` - a Cauchy Voiculescu transform acts as classical
//!   Poisson smoothing
//! * `boundary_types` - classifying density zeros (atom / finite / infinite
//!   reciprocal-Cauchy limit) with certificate integrals
//! * `property_h` - deciding whether every convolution `mu_t ⊞ nu` has full
//!   support and strictly positive density
//! * `support_count` - counting support components against the a priori bound
//! * `sweep_report` - CSV/report file outputs over a semigroup time grid
//!
//! A thin CLI (`freeconv density|diagnose|sweep`) exposes the same pipeline
//! on JSON configs; see the README.
//!
//! # Module map
//!
//! * [`measure`] - atoms-plus-density measure representation and its
//!   Cauchy-type integrals
//! * [`transform`] - Voiculescu transform descriptors and the reciprocal
//!   Cauchy transform
//! * [`inversion`] - the pair model: boundary height `f`, the map `H`, its
//!   global inverse `omega`, the positivity set
//! * [`regularity`] - density evaluation, boundary-point classification,
//!   atoms, support reports, analyticity verdicts
//! * [`reference`] - independent oracles used by tests and examples
//! * [`config`] / [`commands`] - JSON schemas and the file-writing command
//!   layer behind the CLI

pub mod ext;
pub mod extrapolate;
pub mod inversion;
pub mod measure;
pub mod quad;
pub mod regularity;
pub mod transform;

mod error;

pub use error::Error;
pub use ext::ExtReal;
pub use inversion::{BoundaryHeight, ConvolutionModel, GValue, PositivitySet, Tolerances};
pub use measure::{Atom, DensityPiece, MeasureRep, PieceFamily};
pub use regularity::{
    AnalyticityVerdict, BoundaryPoint, BoundaryType, ConvolutionAtom, DensityProfile,
    PointClassification, PropertyHVerdict, SupportReport,
};
pub use transform::{LevyTriple, PhiDescriptor};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
