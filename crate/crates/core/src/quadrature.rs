//! Adaptive quadrature for the mode integrals.
//!
//! The workhorse is a globally adaptive Gauss-Kronrod 7-15 rule on
//! vector-valued complex integrands: all correlator components that share a
//! radial variable are integrated on one adaptive mesh, so the panel tree
//! (and therefore the floating-point summation order) is identical for every
//! component. Final panels are summed in ascending-interval order, which
//! makes results independent of the refinement history.
//!
//! [`simpson_adaptive`] is a second, deliberately separate engine used by
//! brute-force oracle integrations.

use num_complex::Complex64;
use thiserror::Error;

/// Absolute/relative tolerance pair for an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadTol {
    pub abs: f64,
    pub rel: f64,
}

impl Default for QuadTol {
    fn default() -> Self {
        // Integrands mix oscillation with sharp surface-mode features near
        // the light line; 1e-8 keeps them well below every comparison
        // tolerance used downstream.
        QuadTol { abs: 1e-8, rel: 1e-8 }
    }
}

/// Budget exhausted before the error estimate met the tolerance.
#[derive(Debug, Error)]
#[error(
    "quadrature did not converge after {panels} panels: \
     error {error:.3e} > tolerance {tolerance:.3e}, worst subinterval \
     [{worst_a:.6e}, {worst_b:.6e}] with estimate {worst_error:.3e}"
)]
pub struct NonConverged {
    pub panels: usize,
    pub error: f64,
    pub tolerance: f64,
    pub worst_a: f64,
    pub worst_b: f64,
    pub worst_error: f64,
}

// 7-15 Gauss-Kronrod nodes and weights on [-1, 1] (QUADPACK dqk15).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

struct Panel<const N: usize> {
    a: f64,
    b: f64,
    value: [Complex64; N],
    error: f64,
}

fn gk15<const N: usize, F: FnMut(f64) -> [Complex64; N]>(f: &mut F, a: f64, b: f64) -> Panel<N> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut kronrod = [Complex64::default(); N];
    let mut gauss = [Complex64::default(); N];
    for i in 0..N {
        kronrod[i] = fc[i] * WGK[7];
        gauss[i] = fc[i] * WG[3];
    }
    for j in 0..7 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        for i in 0..N {
            let s = f1[i] + f2[i];
            kronrod[i] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[i] += WG[j / 2] * s;
            }
        }
    }
    let mut err: f64 = 0.0;
    for i in 0..N {
        kronrod[i] *= half;
        gauss[i] *= half;
        err = err.max((kronrod[i] - gauss[i]).norm());
    }
    Panel { a, b, value: kronrod, error: err }
}

/// Globally adaptive integration of a vector integrand over `[a, b]`.
///
/// Splits the worst panel until the summed error estimate satisfies
/// `max(tol.abs, tol.rel * max_component_norm)` or `max_panels` is reached.
pub fn integrate_vec<const N: usize, F: FnMut(f64) -> [Complex64; N]>(
    mut f: F,
    a: f64,
    b: f64,
    tol: QuadTol,
    max_panels: usize,
) -> Result<[Complex64; N], NonConverged> {
    let mut panels: Vec<Panel<N>> = vec![gk15(&mut f, a, b)];
    loop {
        let mut total = [Complex64::default(); N];
        let mut total_err = 0.0;
        for p in &panels {
            for i in 0..N {
                total[i] += p.value[i];
            }
            total_err += p.error;
        }
        let scale = total.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let target = tol.abs.max(tol.rel * scale);
        if total_err <= target {
            // Canonical summation order: ascending left endpoint.
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let mut out = [Complex64::default(); N];
            for p in &panels {
                for i in 0..N {
                    out[i] += p.value[i];
                }
            }
            return Ok(out);
        }
        if panels.len() >= max_panels {
            let worst = panels
                .iter()
                .max_by(|p, q| p.error.total_cmp(&q.error))
                .expect("at least one panel");
            return Err(NonConverged {
                panels: panels.len(),
                error: total_err,
                tolerance: target,
                worst_a: worst.a,
                worst_b: worst.b,
                worst_error: worst.error,
            });
        }
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|(_, p), (_, q)| p.error.total_cmp(&q.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let Panel { a, b, .. } = panels.swap_remove(worst);
        let mid = 0.5 * (a + b);
        panels.push(gk15(&mut f, a, mid));
        panels.push(gk15(&mut f, mid, b));
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    tol: QuadTol,
    max_panels: usize,
) -> Result<Complex64, NonConverged> {
    integrate_vec(move |x| [f(x)], a, b, tol, max_panels).map(|v| v[0])
}

/// Recursive adaptive Simpson on a scalar complex integrand.
///
/// Kept independent of the Gauss-Kronrod machinery on purpose: oracle
/// integrations use this engine so that an error in one rule cannot hide in
/// the other.
pub fn simpson_adaptive<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    a: f64,
    b: f64,
    tol: f64,
    max_depth: u32,
) -> Complex64 {
    fn simpson(fa: Complex64, fm: Complex64, fb: Complex64, h: f64) -> Complex64 {
        (fa + 4.0 * fm + fb) * (h / 6.0)
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: FnMut(f64) -> Complex64>(
        f: &mut F,
        a: f64,
        m: f64,
        b: f64,
        fa: Complex64,
        fm: Complex64,
        fb: Complex64,
        whole: Complex64,
        tol: f64,
        depth: u32,
    ) -> Complex64 {
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.norm() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + rec(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let fa = f(a);
    let fm = f(m);
    let fb = f(b);
    let whole = simpson(fa, fm, fb, b - a);
    rec(f, a, m, b, fa, fm, fb, whole, tol, max_depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn polynomial_exact() {
        // GK15 is exact for degree-29 polynomials on one panel.
        let v = integrate(|x| Complex64::new(x.powi(7) - 3.0 * x.powi(2), 0.0), 0.0, 2.0,
                          QuadTol::default(), 10)
            .unwrap();
        assert_relative_eq!(v.re, 256.0 / 8.0 - 8.0, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory() {
        // int_0^10 cos(25 x) dx = sin(250)/25
        let v = integrate(|x| Complex64::new((25.0 * x).cos(), 0.0), 0.0, 10.0,
                          QuadTol { abs: 1e-12, rel: 1e-12 }, 2000)
            .unwrap();
        assert_relative_eq!(v.re, (250.0f64).sin() / 25.0, epsilon = 1e-11);
    }

    #[test]
    fn vector_components_consistent() {
        let v = integrate_vec(
            |x| [Complex64::new(x, 0.0), Complex64::new(0.0, x * x)],
            0.0,
            1.0,
            QuadTol::default(),
            100,
        )
        .unwrap();
        assert_relative_eq!(v[0].re, 0.5, max_relative = 1e-13);
        assert_relative_eq!(v[1].im, 1.0 / 3.0, max_relative = 1e-13);
    }

    #[test]
    fn budget_exhaustion_reports_worst_interval() {
        // 1/sqrt(x) near zero with a tiny budget.
        let err = integrate(
            |x| Complex64::new(x.abs().sqrt().recip(), 0.0),
            1e-300,
            1.0,
            QuadTol { abs: 1e-14, rel: 1e-14 },
            4,
        )
        .unwrap_err();
        assert!(err.worst_a >= 0.0 && err.worst_b <= 1.0);
        assert!(err.error > err.tolerance);
    }

    #[test]
    fn simpson_matches_gk() {
        let mut f = |x: f64| Complex64::new((3.0 * x).sin(), (x * x).cos());
        let s = simpson_adaptive(&mut f, 0.0, 4.0, 1e-12, 40);
        let g = integrate(|x| Complex64::new((3.0 * x).sin(), (x * x).cos()), 0.0, 4.0,
                          QuadTol { abs: 1e-13, rel: 1e-13 }, 4000)
            .unwrap();
        assert!((s - g).norm() < 1e-9);
    }
}
