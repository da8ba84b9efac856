//! Vacuum friction on small rotating particles.
//!
//! A neutral particle spinning in vacuum couples its rotation to the
//! quantum-fluctuating electromagnetic field: it feels a frictional torque,
//! radiates, and exchanges heat with the field even at zero ambient
//! temperature. This crate computes those observables for spheres and
//! oblate spheroids in the dipole regime:
//!
//! - [`spectra`]: the emission/absorption rate spectrum Γ(ω) built from the
//!   particle's dressed polarizability and Bose occupations, plus the
//!   vacuum Green tensor and fluctuation–dissipation helpers.
//! - [`polarizability`]: quasistatic sphere/spheroid polarizabilities from
//!   a permittivity model (analytic Drude or tabulated data), depolarization
//!   factors, radiation-reaction dressing, and the rotation-mixed effective
//!   response.
//! - [`observables`]: adaptive-quadrature torque, radiated and absorbed
//!   power, with closed-form Drude references and peak-emission search.
//! - [`equilibrium`]: the steady-state particle temperature T1* where net
//!   absorption vanishes.
//! - [`dynamics`]: moments of inertia, stopping times, and spin-down
//!   trajectories Ω(t).
//! - [`material`], [`constants`], [`quadrature`]: permittivity models and
//!   tables, CODATA constants in Gaussian-CGS units, and the adaptive
//!   integrator.
//!
//! Everything is deterministic: the same inputs produce bit-identical
//! outputs.

// Validation guards are written `!(x > 0.0)` rather than `x <= 0.0` so
// that NaN fails them too; the negated form is the point.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod material;
pub mod observables;
pub mod polarizability;
pub mod quadrature;
pub mod spectra;

pub use error::{Error, Result};
