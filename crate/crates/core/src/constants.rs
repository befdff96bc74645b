//! Physical constants, SI (2018 CODATA exact values).

/// Speed of light in vacuum [m s^-1].
pub const C: f64 = 299_792_458.0;

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant [J K^-1].
pub const KB: f64 = 1.380_649e-23;
