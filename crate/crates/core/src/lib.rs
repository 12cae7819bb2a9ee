//! Newton–Okounkov bodies and concave transforms of filtered graded linear
//! series, with exact rational geometry and desk-scale adelic lattices over ℚ.

pub mod acceptance;
pub mod adelic;
pub mod envelope;
pub mod error;
pub mod filt;
pub mod linalg;
pub mod norm;
pub mod poly;
pub mod ratgeom;
pub mod rational;
pub mod series;
pub mod sturm;
pub mod transform;

pub use error::{Error, Result};
pub use rational::Rational;
