pub mod circulation;
pub mod equilibria;
pub mod error;
pub mod poly;

pub use circulation::{symmetric_invariants, Circulations, Pair, SymmetricInvariants};
pub use error::{Result, VortexError};
pub mod integrate;
pub mod model;
pub mod ode;
pub mod portrait;
pub mod reduction;
pub mod zero_circ;

pub use integrate::{integrate_full, FullTrajectory, Termination, Trajectory};
pub use model::{conserved_quantities, hamiltonian, vortex_velocities, ConservedQuantities, VortexConfiguration};
