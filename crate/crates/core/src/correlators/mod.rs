//! Field correlators and the master-equation coefficients built from them.
//!
//! The stationary out-of-equilibrium field is the superposition of wall
//! radiation at `T_W` (scattered by the slab) and slab emission at `T_M`.
//! Each source radiates as it would in equilibrium at its own temperature,
//! so transition rates split into temperature-independent response
//! coefficients (`alpha_W`, `alpha_M`) weighted by Bose factors.

mod alpha;
pub mod lambda;

pub use alpha::{
    alpha_pair, alpha_pair_at, alpha_pair_bruteforce, alpha_pair_bruteforce_with,
    alpha_pair_with, alpha_scattering_sum_12, AlphaError, AlphaOptions, QubitPair,
    QubitPairError, SpectralAlphas,
};
pub use lambda::{lambda_shift, LambdaError, LambdaShift, LambdaTabulation};

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{HBAR, KB};
use crate::util::fnv1a64;

/// Wall and slab temperatures [K].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvTemperatures {
    pub wall: f64,
    pub slab: f64,
}

impl EnvTemperatures {
    pub fn new(wall: f64, slab: f64) -> Option<Self> {
        (wall >= 0.0 && slab >= 0.0).then_some(EnvTemperatures { wall, slab })
    }

    pub fn equilibrium(t: f64) -> Self {
        EnvTemperatures { wall: t, slab: t }
    }
}

/// Bose occupation `n(omega, T) = 1 / (e^{hbar omega / k_B T} - 1)`;
/// exactly `0` at `T = 0`.
pub fn bose_n(omega: f64, temperature: f64) -> f64 {
    debug_assert!(omega > 0.0 && temperature >= 0.0);
    if temperature == 0.0 {
        return 0.0;
    }
    (HBAR * omega / (KB * temperature)).exp_m1().recip()
}

/// Temperature whose Bose occupation at `omega` equals `n` (inverse of
/// [`bose_n`]); `0` for `n = 0`.
pub fn bose_temperature(omega: f64, n: f64) -> f64 {
    debug_assert!(n >= 0.0);
    if n == 0.0 {
        return 0.0;
    }
    HBAR * omega / (KB * (1.0 + 1.0 / n).ln())
}

/// Transition-rate blocks of the master equation.
///
/// `gamma_plus[q][q']` multiplies the downward (emission) dissipator,
/// `gamma_minus[q][q']` the upward (absorption) one. Units: s^-1 through the
/// `gamma0` factors; with unit `gamma0` the entries are directly in units of
/// `Gamma_0(omega)`.
#[derive(Debug, Clone, Copy)]
pub struct RateSet {
    pub gamma_plus: [[Complex64; 2]; 2],
    pub gamma_minus: [[Complex64; 2]; 2],
    /// Coherent dipole-dipole coupling `Lambda^{12}` (same units).
    pub lambda: f64,
    /// Whether `lambda` was actually computed (false means "left at zero").
    pub lambda_populated: bool,
    /// Per-qubit vacuum rates the blocks were built with.
    pub gamma0: [f64; 2],
}

impl RateSet {
    /// Reference rate used to non-dimensionalize the generator
    /// (geometric mean of the vacuum rates).
    pub fn scale(&self) -> f64 {
        (self.gamma0[0] * self.gamma0[1]).sqrt()
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self.lambda_populated = true;
        self
    }

    /// Content digest of all entries, used to tag trajectories and output
    /// files.
    pub fn digest(&self) -> u64 {
        let mut bytes = Vec::with_capacity(8 * 19);
        for block in [&self.gamma_plus, &self.gamma_minus] {
            for row in block.iter() {
                for z in row {
                    bytes.extend_from_slice(&z.re.to_bits().to_le_bytes());
                    bytes.extend_from_slice(&z.im.to_bits().to_le_bytes());
                }
            }
        }
        bytes.extend_from_slice(&self.lambda.to_bits().to_le_bytes());
        bytes.extend_from_slice(&self.gamma0[0].to_bits().to_le_bytes());
        bytes.extend_from_slice(&self.gamma0[1].to_bits().to_le_bytes());
        fnv1a64(&bytes)
    }
}

/// Assemble the rate blocks from the response coefficients and the two Bose
/// factors:
///
/// `Gamma^{qq'}(+omega) = sqrt(g0_q g0_q') [ (1+n_W) aW^{qq'} + (1+n_M) aM^{qq'} ]`
/// `Gamma^{qq'}(-omega) = sqrt(g0_q g0_q') [ n_W conj(aW^{qq'}) + n_M conj(aM^{qq'}) ]`
///
/// `lambda` is left unpopulated; attach it with [`RateSet::with_lambda`]
/// after a [`lambda_shift`] computation when the coherent coupling is wanted.
pub fn gamma_rates(
    alphas: &SpectralAlphas,
    temps: &EnvTemperatures,
    qubits: &QubitPair,
) -> RateSet {
    let n_w = bose_n(alphas.omega, temps.wall);
    let n_m = bose_n(alphas.omega, temps.slab);
    let mut gamma_plus = [[Complex64::default(); 2]; 2];
    let mut gamma_minus = [[Complex64::default(); 2]; 2];
    for q in 0..2 {
        for qp in 0..2 {
            let g = (qubits.gamma0[q] * qubits.gamma0[qp]).sqrt();
            gamma_plus[q][qp] = g
                * ((1.0 + n_w) * alphas.wall[q][qp] + (1.0 + n_m) * alphas.medium[q][qp]);
            gamma_minus[q][qp] = g
                * (n_w * alphas.wall[q][qp].conj() + n_m * alphas.medium[q][qp].conj());
        }
    }
    RateSet {
        gamma_plus,
        gamma_minus,
        lambda: 0.0,
        lambda_populated: false,
        gamma0: qubits.gamma0,
    }
}

/// Decay channels of the symmetric configuration, in units of `Gamma_0`.
#[derive(Debug, Clone, Copy)]
pub struct ChannelParams {
    pub gamma_a: f64,
    pub gamma_s: f64,
    pub n_a: f64,
    pub n_s: f64,
    /// Effective temperatures obtained by inverting the Bose function.
    pub t_a: f64,
    pub t_s: f64,
}

#[derive(Debug, Error)]
pub enum ChannelError {
    #[error(
        "configuration is not symmetric: alpha blocks deviate by {0:.3e} \
         (requires equal real diagonals and a real off-diagonal)"
    )]
    AsymmetricConfiguration(f64),
}

/// Symmetric and antisymmetric channel rates and effective photon numbers.
///
/// Valid only for symmetric configurations (`alpha^{11} = alpha^{22}` real,
/// `alpha^{12}` real); deviations beyond `1e-9` are an error.
pub fn channel_params(
    alphas: &SpectralAlphas,
    temps: &EnvTemperatures,
) -> Result<ChannelParams, ChannelError> {
    let dev = alphas.asymmetry();
    if dev > 1e-9 {
        return Err(ChannelError::AsymmetricConfiguration(dev));
    }
    let aw = alphas.wall[0][0].re;
    let aw12 = alphas.wall[0][1].re;
    let am = alphas.medium[0][0].re;
    let am12 = alphas.medium[0][1].re;
    let n_w = bose_n(alphas.omega, temps.wall);
    let n_m = bose_n(alphas.omega, temps.slab);

    let gamma_a = (aw - aw12) + (am - am12);
    let gamma_s = (aw + aw12) + (am + am12);
    let n_a = ((aw - aw12) * n_w + (am - am12) * n_m) / gamma_a;
    let n_s = ((aw + aw12) * n_w + (am + am12) * n_m) / gamma_s;
    Ok(ChannelParams {
        gamma_a,
        gamma_s,
        n_a,
        n_s,
        t_a: bose_temperature(alphas.omega, n_a),
        t_s: bose_temperature(alphas.omega, n_s),
    })
}
