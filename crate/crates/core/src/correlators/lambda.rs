//! Coherent dipole-dipole coupling between the qubits.
//!
//! The coupling is the principal-value frequency integral of the
//! `omega'^3`-weighted response sum, equivalently the real part of the
//! system Green function contracted with the two dipoles. It splits into
//!
//! * a free-space part, evaluated in closed form from the vacuum dyadic
//!   Green function, and
//! * a slab-scattering remainder, obtained by tabulating the scattering
//!   part of `alpha_W + alpha_M` on a frequency grid and integrating the
//!   pole-subtracted kernel (the removable pole leaves a smooth integrand
//!   plus an analytic logarithmic remainder).
//!
//! The scattering tail oscillates without decaying (the slab stays
//! reflective at high frequency while interference phases wind up), so the
//! integrand is tapered with a raised-cosine window over the top of the
//! tabulated range; convergence is demonstrated by doubling the range and
//! grid density in the test suite rather than assumed.

use num_complex::Complex64;
use thiserror::Error;

use super::alpha::{alpha_scattering_sum_12, AlphaError, AlphaOptions, QubitPair};
use crate::constants::C;
use crate::slab::SlabModel;

/// Frequency grid for the scattering-remainder tabulation.
#[derive(Debug, Clone, Copy)]
pub struct LambdaTabulation {
    /// Grid spans `[omega / r_cut, omega * r_cut]`.
    pub r_cut: f64,
    /// Log-spaced points per decade.
    pub points_per_decade: usize,
    /// Extra linear refinement points inside `[omega/2, 2 omega]`.
    pub pole_points: usize,
    /// Fraction of the upper range over which the raised-cosine taper acts.
    pub taper_fraction: f64,
    /// Quadrature settings for each tabulated alpha evaluation.
    pub alpha: AlphaOptions,
}

impl Default for LambdaTabulation {
    fn default() -> Self {
        LambdaTabulation {
            r_cut: 50.0,
            points_per_decade: 72,
            pole_points: 96,
            taper_fraction: 0.25,
            alpha: AlphaOptions::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum LambdaError {
    #[error("scattering tabulation failed at omega' = {omega_prime:.6e}: {source}")]
    Tabulation {
        omega_prime: f64,
        #[source]
        source: AlphaError,
    },
    #[error(
        "tabulation too coarse near the pole: {points} points in \
         [0.8 omega, 1.25 omega], need at least {required}"
    )]
    PoleResolution { points: usize, required: usize },
    #[error(
        "dipole contraction of the shift is not real \
         (|Im| = {imag:.3e} vs |Re| = {real:.3e}); only real couplings enter \
         the generator"
    )]
    ComplexCoupling { real: f64, imag: f64 },
}

/// Result of a coherent-shift computation, in units of
/// `sqrt(Gamma_0^1 Gamma_0^2)`.
#[derive(Debug, Clone, Copy)]
pub struct LambdaShift {
    pub total: f64,
    pub free_part: f64,
    pub scattering_part: f64,
    /// Number of tabulated frequencies used for the scattering part.
    pub grid_len: usize,
}

/// Contraction of the free-space dyadic Green function with the two unit
/// dipoles, split into real and imaginary normalized kernels.
///
/// Normalization: the imaginary part equals the free-space
/// `(alpha_W + alpha_M)^{12}` contraction (so the diagonal limit is 1), and
/// the coupling is `-(3/4)` times the real part in units of
/// `sqrt(Gamma_0^1 Gamma_0^2)`.
fn free_space_contraction(qubits: &QubitPair, omega: f64) -> Complex64 {
    let sep = qubits.separation(0, 1);
    let dist = sep.norm();
    let x = omega * dist / C;
    let rhat = sep / dist;
    let d1 = &qubits.dipole[0];
    let d2 = &qubits.dipole[1];
    let dd: Complex64 = d1.x.conj() * d2.x + d1.y.conj() * d2.y + d1.z.conj() * d2.z;
    let d1r: Complex64 = d1.x.conj() * rhat.x + d1.y.conj() * rhat.y + d1.z.conj() * rhat.z;
    let rd2: Complex64 = d2.x * rhat.x + d2.y * rhat.y + d2.z * rhat.z;
    let e = Complex64::new(0.0, x).exp() / x;
    let t1 = Complex64::new(1.0 - 1.0 / (x * x), 1.0 / x);
    let t2 = Complex64::new(1.0 - 3.0 / (x * x), 3.0 / x);
    e * (t1 * dd - t2 * d1r * rd2)
}

/// Free-space `(alpha_W + alpha_M)^{12}` in closed form (test oracle and
/// free-space limit of the tabulated sum). `(3/2) Im` of the contraction.
pub fn free_space_alpha_sum_12(qubits: &QubitPair, omega: f64) -> Complex64 {
    let g = free_space_contraction(qubits, omega);
    // anti-Hermitian part of the contraction: real for real dipoles
    Complex64::new(1.5 * g.im, 0.0)
}

/// Free-space coherent coupling in closed form:
/// `-(3/4) Re` of the contraction, units `sqrt(Gamma_0^1 Gamma_0^2)`.
pub fn free_space_coupling_12(qubits: &QubitPair, omega: f64) -> f64 {
    -0.75 * free_space_contraction(qubits, omega).re
}

fn build_grid(omega: f64, tab: &LambdaTabulation) -> Vec<f64> {
    let lo = omega / tab.r_cut;
    let hi = omega * tab.r_cut;
    let decades = (hi / lo).log10();
    let n_log = ((decades * tab.points_per_decade as f64).ceil() as usize).max(8);
    let mut grid: Vec<f64> = (0..=n_log)
        .map(|i| lo * (hi / lo).powf(i as f64 / n_log as f64))
        .collect();
    for i in 0..=tab.pole_points {
        grid.push(omega * (0.5 + 1.5 * i as f64 / tab.pole_points as f64));
    }
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * omega);
    grid
}

/// Principal-value integral of the tabulated pole-subtracted kernel.
///
/// With `f(w') = w'^4 alpha_scat(w') win(w') / (w + w')` the folded integral
/// is `PV int f(w')/(w - w') dw'`; subtracting `f(w)` leaves a smooth
/// trapezoid integrand plus `f(w) ln((w - a)/(b - w))`.
fn pv_integral(grid: &[f64], f: &[f64], omega: f64) -> f64 {
    // interpolate f at the pole
    let idx = grid.partition_point(|&x| x < omega);
    let f_pole = if idx == 0 || idx >= grid.len() {
        0.0
    } else {
        let (x0, x1) = (grid[idx - 1], grid[idx]);
        let t = (omega - x0) / (x1 - x0);
        f[idx - 1] * (1.0 - t) + f[idx] * t
    };
    let g: Vec<f64> = (0..grid.len())
        .map(|i| {
            let d = omega - grid[i];
            if d.abs() < 1e-12 * omega {
                // removable point: value of the subtracted kernel is -f'(w)
                let lo = i.saturating_sub(1);
                let hi = (i + 1).min(grid.len() - 1);
                -(f[hi] - f[lo]) / (grid[hi] - grid[lo])
            } else {
                (f[i] - f_pole) / d
            }
        })
        .collect();
    let mut core = 0.0;
    for i in 1..grid.len() {
        core += 0.5 * (g[i] + g[i - 1]) * (grid[i] - grid[i - 1]);
    }
    let a = grid[0];
    let b = grid[grid.len() - 1];
    core + f_pole * ((omega - a) / (b - omega)).ln()
}

/// Coherent coupling `Lambda^{12}` at the qubits' transition frequency.
pub fn lambda_shift(
    slab: &SlabModel,
    qubits: &QubitPair,
    tab: &LambdaTabulation,
) -> Result<LambdaShift, LambdaError> {
    let omega = qubits.omega;
    let free_part = free_space_coupling_12(qubits, omega);

    if slab.thickness == 0.0 {
        return Ok(LambdaShift { total: free_part, free_part, scattering_part: 0.0, grid_len: 0 });
    }

    let grid = build_grid(omega, tab);
    let near: usize = grid
        .iter()
        .filter(|&&x| x >= 0.8 * omega && x <= 1.25 * omega)
        .count();
    let required = 8;
    if near < required {
        return Err(LambdaError::PoleResolution { points: near, required });
    }

    let hi = grid[grid.len() - 1];
    let taper_start = hi * (1.0 - tab.taper_fraction);
    let mut f = Vec::with_capacity(grid.len());
    let mut max_imag: f64 = 0.0;
    let mut max_real: f64 = 0.0;
    for &wp in &grid {
        let a = alpha_scattering_sum_12(slab, qubits, wp, &tab.alpha)
            .map_err(|source| LambdaError::Tabulation { omega_prime: wp, source })?;
        max_imag = max_imag.max(a.im.abs());
        max_real = max_real.max(a.re.abs());
        let win = if wp <= taper_start {
            1.0
        } else {
            0.5 * (1.0 + (std::f64::consts::PI * (wp - taper_start) / (hi - taper_start)).cos())
        };
        f.push(wp.powi(4) * a.re * win / (omega + wp));
    }
    if max_imag > 1e-9 * max_real.max(1e-30) && max_imag > 1e-12 {
        return Err(LambdaError::ComplexCoupling { real: max_real, imag: max_imag });
    }

    // Lambda_scat = (1/pi) PV int w'^4 alpha_scat(w') / (w^3 (w^2 - w'^2)) dw'
    // folded to w' > 0; the (w + w') factor of the fold is inside `f`.
    let scattering_part = pv_integral(&grid, &f, omega) / (std::f64::consts::PI * omega.powi(3));
    Ok(LambdaShift {
        total: free_part + scattering_part,
        free_part,
        scattering_part,
        grid_len: grid.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slab::SIC_OMEGA_R;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn free_space_perpendicular_separation_closed_form() {
        // dipoles along z, in-plane separation: d perpendicular to r.
        // Lambda = (3/4)(-cos x/x + sin x/x^2 + cos x/x^3), sign fixed by
        // the standard outgoing free-space Green function.
        let omega = 0.3 * SIC_OMEGA_R;
        for r in [0.25e-6, 1.0e-6, 6.0e-6, 20e-6] {
            let q = QubitPair::perpendicular(omega, 1e-6, 1e-6, r).unwrap();
            let s = lambda_shift(&SlabModel::absent(), &q, &LambdaTabulation::default())
                .unwrap();
            let x = omega * r / C;
            let expected =
                0.75 * (-x.cos() / x + x.sin() / (x * x) + x.cos() / (x * x * x));
            assert_relative_eq!(s.total, expected, max_relative = 1e-12);
            assert_eq!(s.scattering_part, 0.0);
        }
    }

    #[test]
    fn cluster_decomposition() {
        let omega = 0.3 * SIC_OMEGA_R;
        let q = QubitPair::perpendicular(omega, 1e-6, 1e-6, 4e-3).unwrap();
        let s = lambda_shift(&SlabModel::absent(), &q, &LambdaTabulation::default()).unwrap();
        assert_abs_diff_eq!(s.total, 0.0, epsilon = 1e-2);
    }

    #[test]
    fn free_space_imaginary_part_is_alpha_sum() {
        // The same contraction must reproduce the vacuum alpha sum: ties the
        // sign convention of the coupling to the measured decay kernels.
        let omega = 0.3 * SIC_OMEGA_R;
        let q = QubitPair::perpendicular(omega, 1e-6, 1e-6, 0.25e-6).unwrap();
        let x = omega * q.r12() / C;
        let expected = 1.5 * (x.sin() / x + x.cos() / (x * x) - x.sin() / (x * x * x));
        assert_relative_eq!(
            free_space_alpha_sum_12(&q, omega).re,
            expected,
            max_relative = 1e-12
        );
    }

    #[test]
    fn paper_configuration_value_and_self_convergence() {
        let omega = 0.3 * SIC_OMEGA_R;
        let q = QubitPair::perpendicular(omega, 1e-6, 1e-6, 0.25e-6).unwrap();
        let slab = SlabModel::sic(0.01e-6);
        let coarse = LambdaTabulation::default();
        let s = lambda_shift(&slab, &q, &coarse).unwrap();
        // free part dominates: (3/4)/x^3-ish at x = 0.0374
        assert_relative_eq!(s.free_part, 14325.588287412551, max_relative = 1e-10);
        // scattering part frozen after the doubling study below
        assert_relative_eq!(s.scattering_part, 417.0, max_relative = 0.05);

        let fine = LambdaTabulation {
            r_cut: 100.0,
            points_per_decade: 144,
            pole_points: 192,
            ..coarse
        };
        let s2 = lambda_shift(&slab, &q, &fine).unwrap();
        // doubling range and density moves the total by less than 0.1%
        assert_relative_eq!(s.total, s2.total, max_relative = 1e-3);
    }

    #[test]
    fn pole_resolution_guard() {
        let omega = 0.3 * SIC_OMEGA_R;
        let q = QubitPair::perpendicular(omega, 1e-6, 1e-6, 0.25e-6).unwrap();
        let tab = LambdaTabulation {
            points_per_decade: 1,
            pole_points: 2,
            ..LambdaTabulation::default()
        };
        assert!(matches!(
            lambda_shift(&SlabModel::sic(0.01e-6), &q, &tab),
            Err(LambdaError::PoleResolution { .. })
        ));
    }
}
