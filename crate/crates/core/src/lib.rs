//! Simulation of two qubits coupled to the electromagnetic field near a
//! dielectric slab whose temperature differs from that of the surrounding
//! walls.
//!
//! The crate is organized bottom-up:
//!
//! * [`slab`] — Drude-Lorentz permittivity and finite-slab Fresnel
//!   coefficients for every field mode (propagative and evanescent).
//! * [`correlators`] — temperature-independent response coefficients
//!   `alpha_W`, `alpha_M` of the wall and slab fields, the transition-rate
//!   blocks built from them, the dipole-dipole coherent coupling, and the
//!   symmetric-configuration channel parameters.
//! * [`dynamics`] — the X-state manifold, the master-equation generator
//!   restricted to it, time evolution and the steady-state solve.
//! * [`analytics`] — concurrence and the closed-form steady states.
//!
//! All rates are reported in units of the vacuum spontaneous-emission rate
//! `Gamma_0(omega)`; times are dimensionless `Gamma_0 t`. Lengths are SI
//! metres internally (converted from micrometres at the configuration
//! boundary), frequencies rad/s.

pub mod analytics;
pub mod constants;
pub mod correlators;
pub mod dynamics;
pub mod quadrature;
pub mod slab;
pub mod util;

pub use correlators::{
    alpha_pair, alpha_pair_bruteforce, bose_n, channel_params, gamma_rates, lambda_shift,
    ChannelParams, EnvTemperatures, QubitPair, RateSet, SpectralAlphas,
};
pub use dynamics::{evolve, generator_full_rhs, generator_x, steady_state, Trajectory, XState};
pub use slab::{FresnelPair, ModeCoordinates, SlabModel};
