//! Time evolution `e^{iHt}`: the eigenbasis propagator of `A₁`, free-chain
//! propagators along `m`, their factorized product, and a direct oracle for
//! the assembled 2D operator.

pub mod bessel;
pub mod direct;
pub mod free;
pub mod propagator;

pub use bessel::{bessel_j, bessel_j_orders};
pub use direct::{evolve_2d_direct, evolve_2d_direct_with, DirectOptions, DirectPropagator};
pub use free::{evolve_free_1d, wrap_free_length, BesselKernel, FreeMethod, FreePropagator};
pub use propagator::{evolve_1d_eigen, evolve_2d_factorized, PropagatorPlan, SweepOrder};
