//! Askey-Wilson q-difference calculus at arbitrary precision.
//!
//! * [`numkit`]: precision context, exact `q`, q-Pochhammer symbols and friends.
//! * [`points`]: the parametrization `x = (z + 1/z)/2` and half-step shifts.
//! * [`awop`]: the divided-difference and averaging operators.
//! * [`awseries`]: the basis `phi_k`, the `T(k, n)` table and series expansion.
//! * [`growth`]: maximal term, central index and Wiman-Valiron diagnostics.
//! * [`awdeq`]: linear difference equations and their Newton polygons.

pub mod awdeq;
pub mod awop;
pub mod awseries;
pub mod error;
pub mod growth;
pub mod numkit;
pub mod points;

pub use error::{Error, ErrorClass, Result};
pub use numkit::{BigComplex, BigReal, PrecisionCtx, QParam};
pub use points::{lift, shift, ShiftIndex, UnitizedPoint};
