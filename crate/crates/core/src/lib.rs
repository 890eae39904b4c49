//! Nonisotropic geometry of lineally convex domains of finite type.
//!
//! Polynomial defining functions, orders of contact of lines, slice Taylor
//! data, support-surface checks, the extremal-basis pseudodistance and
//! nonisotropic Hölder norm estimates.

pub mod catalog;
pub mod contact;
pub mod cvec;
pub mod domain;
pub mod holder;
pub mod optim;
pub mod pdist;
pub mod polyring;
pub mod restrict;
pub mod slices;
pub mod support;

use thiserror::Error;

pub use cvec::Point;
pub use domain::{BoundaryFrame, Domain, DomainConfig};
pub use polyring::{CxPolynomial, HermitianPolynomial, Monomial, PolyError};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point is not on the boundary (rho = {rho:e})")]
    NotOnBoundary { rho: f64 },
    #[error("gradient of the defining function vanishes at {0:?}")]
    DegenerateBoundary(Point),
    #[error("no convergence: {0}")]
    NoConvergence(String),
    #[error("point {0:?} is outside the boundary neighborhood")]
    OutsideNeighborhood(Point),
    #[error("zero direction vector")]
    ZeroDirection,
    #[error("vector is not complex tangent (|<t, d rho>| = {0:e})")]
    NotTangent(f64),
    #[error("support property fails: {0}")]
    SupportFailure(String),
    #[error("not a rigid model domain: {0}")]
    NotRigidModel(String),
    #[error("leray division leaves a remainder of norm {0:e}")]
    DivisionRemainder(f64),
    #[error("degenerate extremal basis (tau_{0} = 0)")]
    DegenerateBasis(usize),
    #[error("empty sample: {0}")]
    EmptySample(String),
    #[error("evaluation failed at {point:?}: {message}")]
    Evaluation { point: Point, message: String },
}
