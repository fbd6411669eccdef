//! Numerical engine for billiard systems that conserve polynomial-in-velocity
//! quantities: planar conic tables, wire (curve) billiards in ℝⁿ, and
//! billiards inside surfaces of revolution built from quadric patches.
//!
//! The crate is organized bottom-up:
//!
//! * [`geom`] — fixed-dimension-free vectors, skew matrices and their
//!   exponentials, curve and surface-patch traits;
//! * [`tables`] — the table catalog with validated constructors;
//! * [`roots`] — bracketing, bisection, and safeguarded Newton refinement;
//! * [`dynamics`] — reflection steppers and orbit propagation;
//! * [`integrals`] — conserved-quantity evaluation and orbit audits;
//! * [`integrability`] — residual systems that certify a table/integral pair
//!   symbolically-on-samples, and the meridian-profile ODE machinery.

pub mod geom;
pub mod tables;

pub mod roots;

pub mod dynamics;

pub mod integrals;
pub mod integrability;
