//! Long-range radial scattering via tortoise coordinates: potential
//! classification, the tortoise map r -> r*, a radial Schroedinger solver,
//! phase-shift extraction in the transformed coordinate, Newton duality
//! between vanishing and rising potentials, and closed-form reference
//! solutions used as oracles.

pub mod cli;
pub mod duality;
pub mod error;
pub mod numeric;
pub mod phase_shift;
pub mod potentials;
pub mod radial_solver;
pub mod reference_solutions;
pub mod tortoise;
pub mod validation;

pub use error::{Error, Result};
pub use potentials::{NIndex, Potential, PotentialClass, PotentialSpec, PowerTerm, Regime};
pub use tortoise::{MapTerm, TortoiseMap};
