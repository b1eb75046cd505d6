//! Orthogonality of the monic Wilson polynomials under the weight
//! `t^2 sinh(pi t / 6) / sinh(pi t / 2)` on `[0, inf)`.

use num_rational::BigRational;
use num_traits::ToPrimitive;

use super::{wilson_coefficients, wilson_leading};
use crate::error::{Error, Result};
use crate::exact::{factorial, int, poch, ratio, rpow};

/// Upper end of the integration range; the weight decays like `e^{-pi t/3}`.
pub const TRUNCATION: f64 = 80.0;
const PANELS: usize = 40;
const MAX_DEPTH: u32 = 48;
/// Quadrature tolerance relative to `max(1, min(h_k, h_l))`. Much tighter
/// and the bisection starts resolving roundoff in `p_k p_l w`, which peaks
/// near `1e4` for `k = 4`.
pub const QUAD_TOL: f64 = 1e-8;

fn simpson(fa: f64, fm: f64, fb: f64, a: f64, b: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn refine<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(fa, flm, fm, a, m);
    let right = simpson(fm, frm, fb, m, b);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::QuadratureFailure {
            a,
            b,
            estimate: err.abs() / 15.0,
        });
    }
    Ok(refine(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Adaptive Simpson quadrature of `f` on `[a, b]` with absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    refine(
        &f,
        a,
        b,
        fa,
        fm,
        fb,
        simpson(fa, fm, fb, a, b),
        tol,
        MAX_DEPTH,
    )
}

/// `p_k(t) = W_k((t/6)^2) / kappa_k` as a closure in `t`, monic in `t^2`.
pub fn wilson_monic_eval(k: usize) -> impl Fn(f64) -> f64 {
    let kappa = wilson_leading(k);
    let coeffs: Vec<f64> = wilson_coefficients(k)
        .into_iter()
        .enumerate()
        .map(|(d, c)| {
            (c * rpow(36, -(d as i64)) / &kappa)
                .to_f64()
                .expect("finite coefficient")
        })
        .collect();
    move |t: f64| {
        let s = t * t;
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
    }
}

/// `t^2 sinh(pi t/6) / sinh(pi t/2)`, written with `expm1` so it neither
/// overflows for large `t` nor loses digits for small `t`.
fn weight(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let a = std::f64::consts::PI * t / 6.0;
    let b = std::f64::consts::PI * t / 2.0;
    t * t * (a - b).exp() * (-(-2.0 * a).exp_m1()) / (-(-2.0 * b).exp_m1())
}

/// Closed-form squared norm
/// `h_k = 2^{2k+1} k! (6k+4)! (2k+1)! / (3^{2k+3/2} (3/2+k)_k (4k+3)!)`.
pub fn orthogonality_norm(k: usize) -> f64 {
    let num = rpow(2, 2 * k as i64 + 1)
        * BigRational::from_integer(factorial(k) * factorial(6 * k + 4) * factorial(2 * k + 1));
    let den = rpow(3, 2 * k as i64 + 1)
        * poch(&(ratio(3, 2) + int(k as i64)), k)
        * BigRational::from_integer(factorial(4 * k + 3));
    (num / den).to_f64().expect("finite norm") / 3f64.sqrt()
}

/// `|<p_k, p_l> - h_k delta_kl| / max(1, min(h_k, h_l))` with the inner product computed
/// by adaptive quadrature on `[0, 80]`.
pub fn orthogonality_residual(k: usize, l: usize) -> Result<f64> {
    if k > 6 || l > 6 {
        return Err(Error::Domain(
            "orthogonality is checked for k, l <= 6".into(),
        ));
    }
    let (pk, pl) = (wilson_monic_eval(k), wilson_monic_eval(l));
    let (hk, hl) = (orthogonality_norm(k), orthogonality_norm(l));
    let scale = hk.min(hl).max(1.0);
    let g = |t: f64| pk(t) * pl(t) * weight(t);
    let width = TRUNCATION / PANELS as f64;
    let mut total = 0.0;
    for i in 0..PANELS {
        let a = i as f64 * width;
        total += adaptive_simpson(g, a, a + width, QUAD_TOL * scale / PANELS as f64)?;
    }
    let expect = if k == l { hk } else { 0.0 };
    Ok((total - expect).abs() / scale)
}
