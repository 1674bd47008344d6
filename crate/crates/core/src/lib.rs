//! Discrete measures, spherical averages and pinned distance sets.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, with `F32*` variants for `f32`.

pub mod error;
pub mod generate;
pub mod geometry;
pub mod grid;
pub mod kernels;
pub mod measure;
pub mod pinned;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod spatial;
pub mod spherical;

pub use error::{Error, Result};
pub use geometry::Annulus;
pub use grid::GridFunction;
pub use kernels::KernelSpec;
pub use measure::{DiscreteMeasure, FrostmanReport, Region, RieszEnergy, SamplingPlan};
pub use pinned::{DimensionEstimate, PinnedMeasure};
pub use scalar::Real;
pub use selection::SelectionConfig;
pub use spherical::{MixedNormParams, NormCase, RadiusGrid, SphericalProfile};

pub type Measure = DiscreteMeasure<f64>;
pub type Grid = GridFunction<f64>;
pub type Kernel = KernelSpec<f64>;
pub type Profile = SphericalProfile<f64>;
pub type NormParams = MixedNormParams<f64>;
pub type Pinned = PinnedMeasure<f64>;
pub type Dimension = DimensionEstimate<f64>;
pub type Shell = Annulus<f64>;
pub type Selector = SelectionConfig<f64>;

pub type F32Measure = DiscreteMeasure<f32>;
pub type F32Grid = GridFunction<f32>;
pub type F32Kernel = KernelSpec<f32>;
pub type F32Profile = SphericalProfile<f32>;
pub type F32Pinned = PinnedMeasure<f32>;
