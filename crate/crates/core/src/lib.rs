//! Correlation-space simulation of measurement-based quantum computation on
//! matrix product state resources, and the tools to decide when a physical
//! error becomes a CPTP map in correlation space.
//!
//! Everything is generic over the real scalar (`f32` or `f64`); the aliases
//! below fix `f64`.

pub mod channels;
pub mod correlation;
pub mod cptp;
pub mod error;
pub mod io;
pub mod linalg;
pub mod mixing;
pub mod oracle;
pub mod resource;
pub mod scalar;
pub mod theorem;

pub use error::{Error, Result};
pub use linalg::Tolerance;

pub type CMatrix = linalg::Matrix<f64>;
pub type CVector = linalg::Vector<f64>;
pub type Resource = resource::ResourceMps<f64>;
pub type Channel = channels::KrausChannel<f64>;
pub type Basis = correlation::MeasurementBasis<f64>;
pub type Induced = correlation::InducedMap<f64>;
pub type SuperOp = cptp::SuperOperator<f64>;
