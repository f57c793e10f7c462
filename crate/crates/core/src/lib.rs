//! Exact arithmetic, hyperbolic geometry and certificate generation for
//! families of hyperplane pairs with shrinking distance.

pub mod certificate;
pub mod compact;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod isqrt;
pub mod noncompact;
pub mod quad;
pub mod rational;
pub mod report;
pub mod smooth;
pub mod three_squares;
pub mod tracering;
pub mod verify;

pub use certificate::{Case, FamilyCertificate, Flag, Mode, PigeonholeClass, Target};
pub use error::{Error, Result};
pub use geometry::{LorentzForm, NormalVector, PairClass};
pub use interval::DistanceInterval;
pub use quad::{Embedding, Field, IntegralityClass, QuadElem, Sign};
pub use rational::Rational;
pub use smooth::Factorization;
pub use tracering::{PrimeIdealFactor, PrimeKind, TraceRingBound};
