//! Numerical laboratory for cyclic vectors of shift operators on weighted
//! sequence spaces `ℓ^p_β(ℤ)`, worked on the Fourier side as `A^p_β(𝕋)`.
//!
//! The crate is organised bottom-up:
//!
//! * [`fourier`]: sparse trigonometric series, weighted norms, products,
//!   the dual pairing and the inclusion calculus between `A^p_β` spaces.
//! * [`geometry`]: closed subsets of the circle stored as arc unions,
//!   Cantor-type generators, distances, tubes, covering numbers, box
//!   dimension and Carleson diagnostics.
//! * [`analytic`]: outer functions, the rational family `h_k`, the
//!   `p_ε`/`F_ε` pair with normalizer `M_ε`, smooth functions vanishing on a
//!   set, and the Douglas seminorm.
//! * [`engine`]: polynomial certificate optimizers (bicyclic and
//!   forward-shift infima), the `p_ε` decay experiment, the `F_ε` energy
//!   sweep and the dimension-threshold classifier.
//! * [`runner`]: JSON-configured batch experiments behind the `lab` binary.
//!
//! All numerical modules are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which is what the runner uses.

pub mod analytic;
pub mod engine;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod linalg;
pub mod quad;
pub mod runner;
pub mod scalar;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex<T> = num_complex::Complex<T>;

pub type FourierSeries = fourier::FourierSeries<f64>;
pub type FourierSeries32 = fourier::FourierSeries<f32>;
pub type SpaceIndex = fourier::SpaceIndex<f64>;
pub type SpaceIndex32 = fourier::SpaceIndex<f32>;
pub type ArcUnion = geometry::ArcUnion<f64>;
pub type ArcUnion32 = geometry::ArcUnion<f32>;
pub type CantorSpec = geometry::CantorSpec<f64>;
pub type OuterFunction = analytic::OuterFunction<f64>;
pub type BoundaryModulus = analytic::BoundaryModulus<f64>;
pub type CertificateProblem = engine::CertificateProblem<f64>;
