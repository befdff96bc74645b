//! Dielectric slab model and its reflection/transmission response.
//!
//! The slab occupies `-delta < z < 0`; both qubits sit on the vacuum side
//! `z > 0`. A field mode is labelled by its angular frequency, transverse
//! wavenumber, polarization and propagation direction along `z`. Modes with
//! `c k < omega` are propagative (real axial wavenumber), modes with
//! `c k > omega` are evanescent (purely imaginary axial wavenumber in
//! vacuum).

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::C;

/// TE (s) or TM (p) polarization relative to the slab plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    Te,
    Tm,
}

/// Propagation direction along the `z` axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Plus,
    Minus,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Plus => 1.0,
            Direction::Minus => -1.0,
        }
    }
}

/// A single field mode `(omega, k, p, phi)`.
#[derive(Debug, Clone, Copy)]
pub struct ModeCoordinates {
    /// Angular frequency [rad/s], > 0.
    pub omega: f64,
    /// Transverse wavenumber magnitude [rad/m], >= 0.
    pub k: f64,
    pub polarization: Polarization,
    pub direction: Direction,
}

/// Drude-Lorentz slab: geometry and material parameters.
///
/// `epsilon(omega) = eps_inf (omega_p^2 - omega^2 - i gamma_d omega)
///                   / (omega_r^2 - omega^2 - i gamma_d omega)`.
///
/// A thickness of exactly `0` means "no slab" and short-circuits the Fresnel
/// coefficients to `rho = 0`, `tau = 1`, making free-space limits exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabModel {
    /// Thickness [m], >= 0.
    pub thickness: f64,
    /// Resonance frequency [rad/s].
    pub omega_r: f64,
    /// Longitudinal (plasma-like) frequency [rad/s], > omega_r.
    pub omega_p: f64,
    /// High-frequency permittivity, >= 1.
    pub eps_inf: f64,
    /// Damping rate [rad/s], > 0.
    pub gamma_d: f64,
}

/// SiC resonance frequency [rad/s].
pub const SIC_OMEGA_R: f64 = 1.495e14;
/// SiC longitudinal frequency [rad/s].
pub const SIC_OMEGA_P: f64 = 1.787e14;
/// Conventional SiC high-frequency permittivity. Not fixed by the resonance
/// frequencies; reported in every output header so runs can be repeated
/// under alternative completions.
pub const SIC_EPS_INF: f64 = 6.7;
/// Conventional SiC damping rate [rad/s]. Same caveat as [`SIC_EPS_INF`].
pub const SIC_GAMMA_D: f64 = 0.9e12;

#[derive(Debug, Error)]
pub enum SlabModelError {
    #[error("thickness must be >= 0, got {0}")]
    Thickness(f64),
    #[error("frequencies must satisfy omega_p > omega_r > 0, got omega_r={0}, omega_p={1}")]
    Frequencies(f64, f64),
    #[error("eps_inf must be >= 1, got {0}")]
    EpsInf(f64),
    #[error("gamma_d must be > 0, got {0}")]
    Damping(f64),
}

impl SlabModel {
    pub fn new(
        thickness: f64,
        omega_r: f64,
        omega_p: f64,
        eps_inf: f64,
        gamma_d: f64,
    ) -> Result<Self, SlabModelError> {
        if !(thickness >= 0.0) {
            return Err(SlabModelError::Thickness(thickness));
        }
        if !(omega_p > omega_r && omega_r > 0.0) {
            return Err(SlabModelError::Frequencies(omega_r, omega_p));
        }
        if !(eps_inf >= 1.0) {
            return Err(SlabModelError::EpsInf(eps_inf));
        }
        if !(gamma_d > 0.0) {
            return Err(SlabModelError::Damping(gamma_d));
        }
        Ok(SlabModel { thickness, omega_r, omega_p, eps_inf, gamma_d })
    }

    /// SiC slab of the given thickness with the default material completion.
    pub fn sic(thickness: f64) -> Self {
        SlabModel {
            thickness,
            omega_r: SIC_OMEGA_R,
            omega_p: SIC_OMEGA_P,
            eps_inf: SIC_EPS_INF,
            gamma_d: SIC_GAMMA_D,
        }
    }

    /// Slab absent (zero thickness): exact free space.
    pub fn absent() -> Self {
        SlabModel::sic(0.0)
    }
}

/// Slab reflection and transmission amplitudes for one mode.
#[derive(Debug, Clone, Copy)]
pub struct FresnelPair {
    pub reflection: Complex64,
    pub transmission: Complex64,
}

/// Drude-Lorentz permittivity.
///
/// `Im eps > 0` for every `omega > 0` (passivity); the damping keeps the
/// poles off the real axis.
pub fn permittivity(model: &SlabModel, omega: f64) -> Complex64 {
    debug_assert!(omega > 0.0);
    let w2 = omega * omega;
    let num = Complex64::new(model.omega_p * model.omega_p - w2, -model.gamma_d * omega);
    let den = Complex64::new(model.omega_r * model.omega_r - w2, -model.gamma_d * omega);
    model.eps_inf * num / den
}

/// Axial wavenumber `sqrt(eps omega^2/c^2 - k^2)` with the branch
/// `Im >= 0` (and `Re >= 0` on the real branch), so evanescent fields decay
/// away from their source.
pub fn axial_wavenumber(omega: f64, k: f64, eps: Complex64) -> Complex64 {
    let arg = eps * Complex64::new((omega / C) * (omega / C), 0.0)
        - Complex64::new(k * k, 0.0);
    let s = arg.sqrt();
    if s.im < 0.0 || (s.im == 0.0 && s.re < 0.0) {
        -s
    } else {
        s
    }
}

/// Vacuum axial wavenumber: real for `c k < omega`, positive imaginary for
/// `c k > omega`.
pub fn vacuum_kz(omega: f64, k: f64) -> Complex64 {
    let d = (omega / C) * (omega / C) - k * k;
    if d >= 0.0 {
        Complex64::new(d.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-d).sqrt())
    }
}

/// Finite-slab Fresnel coefficients from the single-interface amplitudes and
/// the Fabry-Perot factor `exp(2 i k_zm delta)`.
///
/// `eps == 1` or `delta == 0` short-circuit to `(0, 1)` exactly.
pub fn slab_coefficients(
    eps: Complex64,
    thickness: f64,
    omega: f64,
    k: f64,
    pol: Polarization,
) -> FresnelPair {
    if thickness == 0.0 || eps == Complex64::new(1.0, 0.0) {
        return FresnelPair {
            reflection: Complex64::new(0.0, 0.0),
            transmission: Complex64::new(1.0, 0.0),
        };
    }
    let kz = vacuum_kz(omega, k);
    let kzm = axial_wavenumber(omega, k, eps);
    let r = match pol {
        Polarization::Te => (kz - kzm) / (kz + kzm),
        Polarization::Tm => (eps * kz - kzm) / (eps * kz + kzm),
    };
    let phase = (Complex64::i() * kzm * thickness).exp();
    let phase2 = phase * phase;
    let den = 1.0 - r * r * phase2;
    FresnelPair {
        reflection: r * (1.0 - phase2) / den,
        transmission: (1.0 - r * r) * phase / den,
    }
}

/// Fresnel pair of the slab for one mode.
///
/// The slab is reciprocal: the result does not depend on
/// `mode.direction`.
pub fn fresnel(model: &SlabModel, mode: &ModeCoordinates) -> FresnelPair {
    let eps = permittivity(model, mode.omega);
    slab_coefficients(eps, model.thickness, mode.omega, mode.k, mode.polarization)
}
