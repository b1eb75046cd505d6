//! Numeric checks of the structural properties of the partition function.

use serde::{Deserialize, Serialize};

use super::det_partition;
use crate::error::{Error, Result};
use crate::linalg::{rel_diff, C64};
use crate::weights::{f, partition_brute, ModelParams};

/// Which evaluation of the partition function a check uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Evaluator {
    Brute,
    Determinant,
}

pub fn evaluate(ev: Evaluator, p: &ModelParams) -> Result<C64> {
    match ev {
        Evaluator::Brute => partition_brute(p),
        Evaluator::Determinant => det_partition(p).map(|r| r.value),
    }
}

/// A transposition of two spectral parameters (1-based indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Swap {
    Lambda(usize, usize),
    Mu(usize, usize),
}

/// `|Z(p) - Z(p with the swap applied)| / |Z(p)|`.
pub fn check_symmetry(p: &ModelParams, swap: Swap, ev: Evaluator) -> Result<f64> {
    let mut q = p.clone();
    let (v, i, j) = match swap {
        Swap::Lambda(i, j) => (&mut q.lambdas, i, j),
        Swap::Mu(i, j) => (&mut q.mus, i, j),
    };
    if i == 0 || j == 0 || i > v.len() || j > v.len() {
        return Err(Error::Domain(format!(
            "swap indices ({i}, {j}) out of range"
        )));
    }
    v.swap(i - 1, j - 1);
    Ok(rel_diff(evaluate(ev, &q)?, evaluate(ev, p)?))
}

/// `P(t) = e^{(2n-2) mu_j} prod_i f(lambda_i ± mu_j + gamma) Z` at `mu_j = mu`.
fn normalized(p: &ModelParams, j: usize, mu: C64, ev: Evaluator) -> Result<C64> {
    let mut q = p.clone();
    q.mus[j - 1] = mu;
    let n = p.n();
    let mut s = ((2.0 * n as f64 - 2.0) * mu).exp();
    for &l in &p.lambdas {
        s *= f(l + mu + p.gamma) * f(l - mu + p.gamma);
    }
    Ok(s * evaluate(ev, &q)?)
}

/// Samples `P` at `2n+1` points `t = e^{2 mu}` on the unit circle, starting
/// from the phase of `e^{2 mu_j}`. A smaller circle would crowd the points and
/// hide the top coefficient. Then fits a polynomial of `degree` through the first `degree + 1` of them and
/// returns the relative mismatch at the last point.
pub fn polynomiality_mismatch(
    p: &ModelParams,
    j: usize,
    degree: usize,
    ev: Evaluator,
) -> Result<f64> {
    let n = p.n();
    if j == 0 || j > p.m() {
        return Err(Error::Domain(format!("mu index {j} out of range")));
    }
    let points = 2 * n + 1;
    if degree + 2 > points {
        return Err(Error::Domain(format!(
            "degree {degree} needs more than {points} samples"
        )));
    }
    let base = C64::new(0.0, p.mus[j - 1].im);
    let mut ts = Vec::with_capacity(points);
    let mut ps = Vec::with_capacity(points);
    for s in 0..points {
        let shift = std::f64::consts::PI * (s as f64 + 1.0) / (points as f64 + 1.0);
        let mu = base + C64::new(0.0, shift);
        ts.push((2.0 * mu).exp());
        ps.push(normalized(p, j, mu, ev)?);
    }
    let target = ts[points - 1];
    let mut fit = C64::new(0.0, 0.0);
    for a in 0..=degree {
        let mut basis = C64::new(1.0, 0.0);
        for b in (0..=degree).filter(|&b| b != a) {
            basis *= (target - ts[b]) / (ts[a] - ts[b]);
        }
        fit += ps[a] * basis;
    }
    Ok(rel_diff(fit, ps[points - 1]))
}

/// Mismatch of the degree `2n-1` fit in `t = e^{2 mu_j}` (`j` 1-based).
pub fn check_polynomiality(p: &ModelParams, j: usize, ev: Evaluator) -> Result<f64> {
    polynomiality_mismatch(p, j, 2 * p.n() - 1, ev)
}

/// Compares `Z` at `mu_k = sign * lambda_l` with the reduced system:
/// `e^{-n gamma} e^{zeta + mu_k} f(zeta - mu_k)
///  prod_i f(lambda_i + lambda_l) / f(lambda_i + lambda_l + gamma) Z_{n-1,m-1}`.
pub fn check_recursion(
    p: &ModelParams,
    k: usize,
    l: usize,
    sign: i8,
    ev: Evaluator,
) -> Result<f64> {
    if k == 0 || k > p.m() || l == 0 || l > p.n() || (sign != 1 && sign != -1) {
        return Err(Error::Domain(format!(
            "bad recursion point k={k}, l={l}, sign={sign}"
        )));
    }
    let mut q = p.clone();
    let lam = q.lambdas[l - 1];
    let mu = lam * f64::from(sign);
    q.mus[k - 1] = mu;
    let lhs = evaluate(ev, &q)?;
    let n = q.n();
    let mut factor = (-(n as f64) * q.gamma).exp() * (q.zeta + mu).exp() * f(q.zeta - mu);
    for &li in &q.lambdas {
        factor *= f(li + lam) / f(li + lam + q.gamma);
    }
    let rhs = factor * evaluate(ev, &q.without(l, k))?;
    Ok(rel_diff(lhs, rhs))
}

/// For `m = 0`: relative distance from `phi^n prod_i f(2 lambda_i)`.
pub fn check_base(p: &ModelParams, ev: Evaluator) -> Result<f64> {
    if p.m() != 0 {
        return Err(Error::Domain("the base case needs m = 0".into()));
    }
    let expect = p
        .lambdas
        .iter()
        .fold(p.phi.powu(p.n() as u32), |acc, &l| acc * f(2.0 * l));
    Ok(rel_diff(evaluate(ev, p)?, expect))
}

/// `(e^gamma - e^-gamma) / (phi e^gamma) * sum_{j<n-m} e^{-2 j gamma}`.
pub fn limit_step_prefactor(gamma: C64, phi: C64, n: usize, m: usize) -> C64 {
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..n - m {
        sum += (-2.0 * j as f64 * gamma).exp();
    }
    (gamma.exp() - (-gamma).exp()) / (phi * gamma.exp()) * sum
}

/// Decay rate `ln(d(r) / d(2r)) / r` of the limit-step difference `d`; the
/// difference behaves like `e^{-2r}`, so the rate should be close to 2.
pub fn limit_decay_rate(p: &ModelParams, r: f64, ev: Evaluator) -> Result<f64> {
    let (d1, d2) = (
        check_limit_step(p, r, ev)?,
        check_limit_step(p, 2.0 * r, ev)?,
    );
    Ok((d1 / d2.max(f64::MIN_POSITIVE)).ln() / r)
}

/// With `Re mu_{m+1} = r` (the last mu; imaginary part kept) compares
/// `Z_{n,m+1}` against `prefactor * Z_{n,m}` with `mu_{m+1}` dropped.
pub fn check_limit_step(p: &ModelParams, r: f64, ev: Evaluator) -> Result<f64> {
    let m1 = p.m();
    if m1 == 0 {
        return Err(Error::Domain("the limit step needs at least one mu".into()));
    }
    let mut big = p.clone();
    big.mus[m1 - 1] = C64::new(r, p.mus[m1 - 1].im);
    let mut small = p.clone();
    small.mus.pop();
    let lhs = evaluate(ev, &big)?;
    let rhs = limit_step_prefactor(p.gamma, p.phi, p.n(), m1 - 1) * evaluate(ev, &small)?;
    Ok(rel_diff(lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::labeled_rng;
    use crate::weights::sample_params;

    const BOTH: [Evaluator; 2] = [Evaluator::Brute, Evaluator::Determinant];

    #[test]
    fn symmetry_examples() {
        let mut rng = labeled_rng(31, "sym");
        let p = sample_params(&mut rng, 2, 2, 0.05);
        let q = sample_params(&mut rng, 2, 1, 0.05);
        for ev in BOTH {
            assert!(check_symmetry(&p, Swap::Mu(1, 2), ev).unwrap() < 1e-10);
            assert!(check_symmetry(&q, Swap::Lambda(1, 2), ev).unwrap() < 1e-10);
            assert_eq!(check_symmetry(&p, Swap::Mu(1, 1), ev).unwrap(), 0.0);
        }
        assert!(check_symmetry(&p, Swap::Mu(1, 3), Evaluator::Brute).is_err());
    }

    #[test]
    fn polynomiality_and_negative_control() {
        let mut rng = labeled_rng(32, "poly");
        for (n, m) in [(2, 1), (2, 2), (3, 2)] {
            let p = sample_params(&mut rng, n, m, 0.05);
            for ev in BOTH {
                assert!(
                    check_polynomiality(&p, 1, ev).unwrap() < 1e-6,
                    "n={n} m={m} {ev:?}"
                );
                assert!(polynomiality_mismatch(&p, 1, 2 * n - 2, ev).unwrap() > 1e-3);
            }
        }
    }

    #[test]
    fn recursion_examples() {
        let mut rng = labeled_rng(33, "rec");
        let p21 = sample_params(&mut rng, 2, 1, 0.05);
        let p22 = sample_params(&mut rng, 2, 2, 0.05);
        let p11 = sample_params(&mut rng, 1, 1, 0.05);
        for ev in BOTH {
            assert!(check_recursion(&p21, 1, 1, 1, ev).unwrap() < 1e-9);
            for k in 1..=2 {
                for l in 1..=2 {
                    assert!(check_recursion(&p22, k, l, -1, ev).unwrap() < 1e-9);
                }
            }
            assert!(check_recursion(&p11, 1, 1, 1, ev).unwrap() < 1e-9);
        }
    }

    #[test]
    fn base_case() {
        let p = sample_params(&mut labeled_rng(34, "base"), 3, 0, 0.05);
        for ev in BOTH {
            assert!(check_base(&p, ev).unwrap() < 1e-12);
        }
    }

    #[test]
    fn limit_step_converges() {
        let mut rng = labeled_rng(35, "limit");
        for (n, m1) in [(1, 1), (2, 1), (3, 2)] {
            let p = sample_params(&mut rng, n, m1, 0.05);
            for ev in BOTH {
                let d20 = check_limit_step(&p, 20.0, ev).unwrap();
                assert!(d20 < 1e-6, "n={n} {ev:?} d20={d20}");
                let rate = limit_decay_rate(&p, 5.0, ev).unwrap();
                assert!((1.8..2.2).contains(&rate), "n={n} {ev:?} rate={rate}");
            }
        }
    }
}
