//! Closed determinant formulas for the partition function.
//!
//! Both formulas share the rows built from
//! `F(mu, lambda) = 1 / (f(mu ± lambda) f(mu ± (lambda + gamma)))`.
//! The numerator `prod_j f(mu_i ± lambda_j)` of the prefactor is moved into
//! row `i`, which removes the poles at `mu_i = ±lambda_j`. For large `|Re mu|`
//! the row is additionally reduced against the lower rows (see
//! [`tail_row`]), which removes a cancellation that otherwise grows like
//! `e^{2|Re mu|}`.

mod checks;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{pole, Error, Result};
use crate::linalg::{condition_estimate, CMatrix, C64};
use crate::tolerances::{CONDITION_WARN, POLE};
use crate::weights::{f, h, ModelParams};

pub use checks::{
    check_base, check_limit_step, check_polynomiality, check_recursion, check_symmetry, evaluate,
    limit_decay_rate, limit_step_prefactor, polynomiality_mismatch, Evaluator, Swap,
};

/// Which determinant formula produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Formula {
    /// Rows `h((n-i)(2 lambda_j + gamma))` and a row of ones below the F rows.
    #[serde(rename = "izergin-korepin")]
    IzerginKorepin,
    /// Rows of the series coefficients `C_k(lambda_j)` below the F rows.
    #[serde(rename = "foda-wheeler")]
    FodaWheeler,
}

/// Value of a determinant formula with the condition estimate of its matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetReport {
    #[serde(with = "pair")]
    pub value: C64,
    #[serde(rename = "cond")]
    pub condition_estimate: f64,
    pub formula: Formula,
}

mod pair {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::linalg::C64;

    pub fn serialize<S: Serializer>(z: &C64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<C64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(C64::new(re, im))
    }
}

fn checked(den: C64, name: impl FnOnce() -> String) -> Result<C64> {
    if den.norm() < POLE || !den.re.is_finite() || !den.im.is_finite() {
        Err(pole(name()))
    } else {
        Ok(den)
    }
}

fn fpm(x: C64, y: C64) -> C64 {
    f(x + y) * f(x - y)
}

fn binom2(k: usize) -> f64 {
    (k * k.saturating_sub(1) / 2) as f64
}

/// Prefactor pieces common to both formulas, excluding the
/// `f(mu ± lambda)` numerator (moved into the F rows) and the
/// formula-specific gamma factors.
fn common_prefactor(p: &ModelParams) -> Result<C64> {
    let (n, m) = (p.n(), p.m());
    let mut pre = p.phi.powu((n - m) as u32);
    for &u in &p.mus {
        pre *= (u + p.zeta).exp() * f(u - p.zeta);
    }
    for &l in &p.lambdas {
        pre *= f(2.0 * l);
    }
    for i in 0..m {
        for j in i + 1..m {
            pre /= checked(fpm(p.mus[j], p.mus[i]), || {
                format!("f(mu_{} ± mu_{})", j + 1, i + 1)
            })?;
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let a = checked(f(p.lambdas[i] - p.lambdas[j]), || {
                format!("f(lambda_{} - lambda_{})", i + 1, j + 1)
            })?;
            let b = checked(f(p.lambdas[i] + p.lambdas[j] + p.gamma), || {
                format!("f(lambda_{} + lambda_{} + gamma)", i + 1, j + 1)
            })?;
            pre /= a * b;
        }
    }
    Ok(pre)
}

fn series_roots(lambda: C64, gamma: C64) -> [C64; 4] {
    let e = (2.0 * lambda).exp();
    let g = (2.0 * gamma).exp();
    [e * g, e, 1.0 / e, 1.0 / (e * g)]
}

/// Taylor coefficients `c_0..c_{len-1}` of `prod_r 1/(1 - x t_r)`, which are
/// the `C_k(lambda)` of [`ck_coefficient`].
fn series_coefficients(lambda: C64, gamma: C64, len: usize) -> Vec<C64> {
    let mut c = vec![C64::new(0.0, 0.0); len];
    c[0] = C64::new(1.0, 0.0);
    for t in series_roots(lambda, gamma) {
        for k in 1..len {
            let prev = c[k - 1];
            c[k] += t * prev;
        }
    }
    c
}

/// Coefficient `C_k(lambda)`: the sum over `k1+k2+k3+k4 = k` of
/// `exp((k1+k2-k3-k4) v + (k1-k2+k3-k4) gamma)` with `v = 2 lambda + gamma`.
pub fn ck_coefficient(k: usize, lambda: C64, gamma: C64) -> C64 {
    let v = 2.0 * lambda + gamma;
    let mut s = C64::new(0.0, 0.0);
    for k1 in 0..=k {
        for k2 in 0..=k - k1 {
            for k3 in 0..=k - k1 - k2 {
                let k4 = k - k1 - k2 - k3;
                let a = k1 as f64 + k2 as f64 - k3 as f64 - k4 as f64;
                let b = k1 as f64 - k2 as f64 + k3 as f64 - k4 as f64;
                s += (a * v + b * gamma).exp();
            }
        }
    }
    s
}

/// Number of series terms kept beyond `q` in the reduced rows. Terms are
/// bounded by `2^-k`, so this is far below double precision.
const TAIL_TERMS: usize = 80;

/// F row for `mu` with the `f(mu ± lambda)` numerator folded in, reduced
/// modulo the span of `C_0..C_{q-1}` when the series converges fast.
///
/// Both `F` and the numerator are even in `mu`, so `mu` is replaced by the
/// representative with non-negative real part and `x = exp(-2 mu)`. Then
/// `F(mu, lambda_j) = e^{-4 mu} sum_k C_k(lambda_j) x^k`, and subtracting
/// `e^{-4 mu} sum_{k<q} x^k C_k` (a combination of lower rows) leaves the
/// tail `e^{-4 mu} x^q sum_{k>=q} C_k x^{k-q}`. Returns `None` when the
/// series is not used.
fn tail_row(mu: C64, p: &ModelParams, q: usize) -> Option<Vec<C64>> {
    if q == 0 {
        return None;
    }
    let mu = if mu.re >= 0.0 { mu } else { -mu };
    let x = (-2.0 * mu).exp();
    let tmax = p
        .lambdas
        .iter()
        .flat_map(|&l| series_roots(l, p.gamma))
        .map(|t| t.norm())
        .fold(0.0, f64::max);
    if x.norm() * tmax > 0.5 {
        return None;
    }
    let mut scale = ((2.0 * p.m() as f64 - 4.0) * mu).exp();
    for &l in &p.lambdas {
        let e = (2.0 * l).exp();
        scale *= (1.0 - x * e) * (1.0 - x / e);
    }
    let row = p
        .lambdas
        .iter()
        .map(|&l| {
            let c = series_coefficients(l, p.gamma, q + TAIL_TERMS);
            let mut acc = C64::new(0.0, 0.0);
            for &ck in c[q..].iter().rev() {
                acc = acc * x + ck;
            }
            scale * acc
        })
        .collect();
    Some(row)
}

fn direct_row(i: usize, p: &ModelParams) -> Result<Vec<C64>> {
    let mu = p.mus[i];
    let n = p.n();
    (0..n)
        .map(|j| {
            let den = checked(fpm(mu, p.lambdas[j] + p.gamma), || {
                format!("f(mu_{} ± (lambda_{} + gamma))", i + 1, j + 1)
            })?;
            let mut num = C64::new(1.0, 0.0);
            for jp in (0..n).filter(|&jp| jp != j) {
                num *= fpm(mu, p.lambdas[jp]);
            }
            Ok(num / den)
        })
        .collect()
}

fn f_rows(p: &ModelParams, reduce: bool) -> Result<Vec<Vec<C64>>> {
    let q = p.n() - p.m();
    (0..p.m())
        .map(
            |i| match reduce.then(|| tail_row(p.mus[i], p, q)).flatten() {
                Some(row) => Ok(row),
                None => direct_row(i, p),
            },
        )
        .collect()
}

fn finish(matrix: CMatrix, pre: C64, formula: Formula) -> Result<DetReport> {
    let cond = condition_estimate(&matrix);
    if cond > CONDITION_WARN {
        warn!("{formula:?} matrix is badly conditioned (estimate {cond:e})");
    }
    let value = if matrix.rows() == 0 {
        pre
    } else {
        pre * matrix.det()
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(Error::Domain(format!("{formula:?} evaluation overflowed")));
    }
    Ok(DetReport {
        value,
        condition_estimate: cond,
        formula,
    })
}

fn empty_lattice(formula: Formula) -> DetReport {
    DetReport {
        value: C64::new(1.0, 0.0),
        condition_estimate: 1.0,
        formula,
    }
}

/// Partition function from the determinant with `h((n-i)(2 lambda_j + gamma))`
/// rows and a final row of ones (the latter only when `m < n`).
pub fn det_partition(p: &ModelParams) -> Result<DetReport> {
    let (n, m) = (p.n(), p.m());
    if n == 0 {
        return Ok(empty_lattice(Formula::IzerginKorepin));
    }
    p.size()?;
    let g = p.gamma;
    let mut pre = common_prefactor(p)?;
    pre *= ((binom2(m) - (n * m) as f64) * g).exp() * f(g).powu(m as u32);
    let mut rows = f_rows(p, true)?;
    for i in m + 1..n {
        rows.push(
            p.lambdas
                .iter()
                .map(|&l| h((n - i) as f64 * (2.0 * l + g)))
                .collect(),
        );
    }
    if m < n {
        rows.push(vec![C64::new(1.0, 0.0); n]);
    }
    finish(CMatrix::from_rows(rows), pre, Formula::IzerginKorepin)
}

/// Partition function from the determinant whose lower rows are
/// `C_{n-m-1}(lambda_j), ..., C_0(lambda_j)`. Needs `exp(-2k gamma) != 1`
/// for `k <= n - m`.
pub fn det_partition_appendix(p: &ModelParams) -> Result<DetReport> {
    let (n, m) = (p.n(), p.m());
    if n == 0 {
        return Ok(empty_lattice(Formula::FodaWheeler));
    }
    p.size()?;
    let g = p.gamma;
    let q = n - m;
    let mut pre = common_prefactor(p)?;
    pre *= (-binom2(n + 1) * g).exp() * f(g).powu(n as u32);
    for k in 1..=q {
        pre /= checked(1.0 - (-2.0 * k as f64 * g).exp(), || {
            format!("1 - exp(-{}*gamma)", 2 * k)
        })?;
    }
    let mut rows = f_rows(p, false)?;
    for k in (0..q).rev() {
        rows.push(p.lambdas.iter().map(|&l| ck_coefficient(k, l, g)).collect());
    }
    finish(CMatrix::from_rows(rows), pre, Formula::FodaWheeler)
}

/// Crossing parameter of the root-of-unity point, `4 pi i / 3`.
pub fn gamma_root_of_unity() -> C64 {
    C64::new(0.0, 4.0 * std::f64::consts::PI / 3.0)
}

/// How [`homogeneous_limit`] removes the perturbation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LimitScheme {
    /// Mean of the perturbed value over a circle `|eps| = radius` sampled at
    /// `nodes` points. The perturbed value is analytic in `eps`, so the mean
    /// equals the value at `eps = 0` up to terms of order `radius^nodes`.
    Contour { radius: f64, nodes: usize },
    /// Order-2 Richardson step `2 Z(eps/2) - Z(eps)`.
    Richardson { eps: f64 },
}

impl LimitScheme {
    /// Contour with radius `0.6 (pi/3) / (max offset sum)`, 64 nodes.
    pub fn default_for(n: usize, m: usize) -> Self {
        let spread = n as f64 + if m > 0 { m as f64 + 0.5 } else { 0.0 };
        LimitScheme::Contour {
            radius: 0.6 * (std::f64::consts::PI / 3.0) / spread,
            nodes: 64,
        }
    }
}

fn homogeneous_params(n: usize, m: usize, zeta: C64, phi: C64, eps: C64) -> ModelParams {
    let g = gamma_root_of_unity();
    ModelParams {
        gamma: g,
        zeta,
        phi,
        lambdas: (1..=n).map(|i| g + eps * i as f64).collect(),
        mus: (1..=m).map(|j| eps * (j as f64 + 0.5)).collect(),
    }
}

/// `Z_{n,m}` at `gamma = 4 pi i / 3`, all `lambda_i = gamma`, all `mu_j = 0`,
/// reached from the perturbed point `lambda_i = gamma + eps i`,
/// `mu_j = eps (j + 1/2)`.
pub fn homogeneous_limit(
    n: usize,
    m: usize,
    zeta: C64,
    phi: C64,
    scheme: LimitScheme,
) -> Result<C64> {
    if n == 0 || m > n {
        return Err(Error::Size { n, m });
    }
    let z = |eps: C64| det_partition(&homogeneous_params(n, m, zeta, phi, eps)).map(|r| r.value);
    match scheme {
        LimitScheme::Contour { radius, nodes } => {
            if !(radius > 0.0) || nodes == 0 {
                return Err(Error::Domain(
                    "contour needs a positive radius and at least one node".into(),
                ));
            }
            let mut acc = crate::linalg::CompensatedSum::new();
            for k in 0..nodes {
                let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / nodes as f64;
                acc.add(z(C64::from_polar(radius, theta))?);
            }
            Ok(acc.value() / nodes as f64)
        }
        LimitScheme::Richardson { eps } => {
            if !(eps > 0.0) {
                return Err(Error::Domain("Richardson step needs eps > 0".into()));
            }
            Ok(2.0 * z(C64::new(eps / 2.0, 0.0))? - z(C64::new(eps, 0.0))?)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_diff;
    use crate::rng::{labeled_rng, unit_complex};
    use crate::weights::{partition_brute, sample_params};

    #[test]
    fn ck_small_cases() {
        let mut rng = labeled_rng(21, "ck");
        for _ in 0..5 {
            let (l, g) = (unit_complex(&mut rng), unit_complex(&mut rng));
            assert_eq!(ck_coefficient(0, l, g), C64::new(1.0, 0.0));
            let v = 2.0 * l + g;
            let c1 = (v.exp() + (-v).exp()) * (g.exp() + (-g).exp());
            assert!(rel_diff(ck_coefficient(1, l, g), c1) < 1e-14);
            for k in 0..6 {
                let a = ck_coefficient(k, l, g);
                assert!(rel_diff(ck_coefficient(k, -l - g, g), a) < 1e-12);
                assert!(rel_diff(series_coefficients(l, g, 6)[k], a) < 1e-12);
            }
        }
    }

    #[test]
    fn zero_columns_is_a_product() {
        let mut rng = labeled_rng(22, "m0");
        for n in 1..=4 {
            let p = sample_params(&mut rng, n, 0, 0.05);
            let expect = p
                .lambdas
                .iter()
                .fold(p.phi.powu(n as u32), |acc, &l| acc * f(2.0 * l));
            assert!(rel_diff(det_partition(&p).unwrap().value, expect) < 1e-12);
            assert!(rel_diff(det_partition_appendix(&p).unwrap().value, expect) < 1e-12);
        }
    }

    #[test]
    fn matches_brute_on_small_lattices() {
        let mut rng = labeled_rng(23, "detbrute");
        for n in 1..=3 {
            for m in 0..=n {
                for _ in 0..3 {
                    let p = sample_params(&mut rng, n, m, 0.05);
                    let b = partition_brute(&p).unwrap();
                    let d = det_partition(&p).unwrap();
                    assert!(d.condition_estimate >= 1.0);
                    assert!(rel_diff(d.value, b) < 1e-9, "n={n} m={m}");
                    let a = det_partition_appendix(&p).unwrap();
                    assert!(rel_diff(a.value, b) < 1e-9, "appendix n={n} m={m}");
                }
            }
        }
    }

    #[test]
    fn reduced_rows_stay_accurate_at_large_mu() {
        let mut rng = labeled_rng(24, "tail");
        for (n, m) in [(2, 1), (3, 1), (3, 2)] {
            let mut p = sample_params(&mut rng, n, m, 0.05);
            for re in [6.0, -9.0, 15.0] {
                p.mus[0] = C64::new(re, 0.4);
                let b = partition_brute(&p).unwrap();
                assert!(
                    rel_diff(det_partition(&p).unwrap().value, b) < 1e-9,
                    "n={n} m={m} re={re}"
                );
            }
        }
    }

    #[test]
    fn coinciding_mus_are_a_pole() {
        let mut p = sample_params(&mut labeled_rng(25, "pole"), 2, 2, 0.05);
        p.mus[1] = p.mus[0];
        match det_partition(&p) {
            Err(Error::Pole { factor }) => assert!(factor.contains("mu_2")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn report_json_shape() {
        let p = sample_params(&mut labeled_rng(26, "json"), 1, 1, 0.05);
        let text = serde_json::to_string(&det_partition(&p).unwrap()).unwrap();
        assert!(
            text.contains("\"value\":[")
                && text.contains("\"cond\"")
                && text.contains("\"izergin-korepin\"")
        );
    }

    #[test]
    fn homogeneous_one_by_zero() {
        let (z, phi) = (C64::new(0.3, 0.2), C64::new(0.7, -0.4));
        let g = gamma_root_of_unity();
        let v = homogeneous_limit(1, 0, z, phi, LimitScheme::default_for(1, 0)).unwrap();
        assert!(rel_diff(v, phi * f(2.0 * g)) < 1e-12);
    }
}
