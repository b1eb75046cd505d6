//! Exact state counts from Wilson polynomials, the equivalent multiple
//! hypergeometric sum, and the bridge to the partition function at the
//! root-of-unity point.

mod quadrature;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::detform::gamma_root_of_unity;
use crate::error::{Error, Result};
use crate::exact::{as_natural, binomial, det_rational, factorial, int, poch, ratio, rpow};
use crate::lattice::{enumerate_states, LatticeSize};
use crate::linalg::C64;
use crate::weights::f;

pub use quadrature::{
    adaptive_simpson, orthogonality_norm, orthogonality_residual, wilson_monic_eval,
};

/// Parameters `(a, b, c, d)` of the Wilson polynomials used for counting.
#[derive(Debug, Clone, PartialEq)]
pub struct WilsonParams {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl Default for WilsonParams {
    fn default() -> Self {
        Self {
            a: ratio(1, 3),
            b: ratio(1, 2),
            c: ratio(2, 3),
            d: int(1),
        }
    }
}

/// Coefficients of the hypergeometric sum: term `j` of `W_k` is
/// `coeff[j] * prod_{p<j} ((1/3 + p)^2 + xsq)`.
fn wilson_terms(k: usize) -> Vec<BigRational> {
    let w = WilsonParams::default();
    let ab = &w.a + &w.b; // 5/6
    let ac = &w.a + &w.c; // 1
    let ad = &w.a + &w.d; // 4/3
    let top = &w.a + &w.b + &w.c + &w.d - int(1); // 3/2
    let lead = poch(&ab, k) * poch(&ac, k) * poch(&ad, k);
    let mk = int(-(k as i64));
    let kk = &top + int(k as i64);
    (0..=k)
        .map(|j| {
            &lead * poch(&mk, j) * poch(&kk, j)
                / (poch(&ab, j)
                    * poch(&ac, j)
                    * poch(&ad, j)
                    * BigRational::from_integer(factorial(j)))
        })
        .collect()
}

/// `W_k(xsq; 1/3, 1/2, 2/3, 1)` evaluated exactly. The pair
/// `(1/3 + i t/6)_j (1/3 - i t/6)_j` is the real product
/// `prod_{p<j} ((1/3 + p)^2 + xsq)` with `xsq = (t/6)^2`.
pub fn wilson_poly(k: usize, xsq: &BigRational) -> BigRational {
    let a = ratio(1, 3);
    let mut pair = BigRational::one();
    let mut s = BigRational::zero();
    for (j, c) in wilson_terms(k).into_iter().enumerate() {
        s += c * &pair;
        let ap = &a + int(j as i64);
        pair *= &ap * &ap + xsq;
    }
    s
}

/// Coefficients of `W_k` as a polynomial in `xsq`, lowest degree first.
pub fn wilson_coefficients(k: usize) -> Vec<BigRational> {
    let a = ratio(1, 3);
    let mut out = vec![BigRational::zero(); k + 1];
    let mut pair = vec![BigRational::one()];
    for (j, c) in wilson_terms(k).into_iter().enumerate() {
        for (d, p) in pair.iter().enumerate() {
            out[d] += &c * p;
        }
        let ap = &a + int(j as i64);
        let root = &ap * &ap;
        let mut next = vec![BigRational::zero(); pair.len() + 1];
        for (d, p) in pair.iter().enumerate() {
            next[d] += p * &root;
            next[d + 1] += p;
        }
        pair = next;
    }
    out
}

/// Leading coefficient of `W_k` in `t^2` (where `xsq = t^2 / 36`):
/// `(-1)^k (3/2 + k)_k / 6^{2k}`.
pub fn wilson_leading(k: usize) -> BigRational {
    let v = poch(&(ratio(3, 2) + int(k as i64)), k) * rpow(6, -2 * k as i64);
    if k % 2 == 1 {
        -v
    } else {
        v
    }
}

fn check_nmk(n: usize, m: usize, k: usize) -> Result<()> {
    if n == 0 || m > n || k > m {
        return Err(Error::Domain(format!(
            "need 0 <= k <= m <= n and n >= 1, got n={n}, m={m}, k={k}"
        )));
    }
    Ok(())
}

/// Powers of 2 and 3 and the factorial products shared by both formulas.
fn common_factor(n: usize, m: usize) -> BigRational {
    let (ni, mi) = (n as i64, m as i64);
    let mut c = rpow(2, ni * ni - ni - mi * mi - mi) * BigRational::from_integer(factorial(n - m))
        / rpow(3, 2 * mi * mi - mi - ni * ni + ni - mi * ni);
    for j in 1..=n {
        c *= BigRational::new(factorial(2 * j - 2), factorial(4 * j - 3));
    }
    for j in 1..=m {
        c *= BigRational::new(factorial(6 * j - 2), factorial(4 * j - 1));
    }
    c
}

fn natural(n: usize, m: usize, k: usize, v: BigRational) -> Result<BigInt> {
    as_natural(&v).ok_or_else(|| Error::NonIntegerResult {
        n,
        m,
        k,
        value: v.to_string(),
    })
}

/// `N_k / binom(m, k)` from the Wilson determinant, before the integrality check.
fn wilson_base(n: usize, m: usize) -> BigRational {
    let mut c = common_factor(n, m);
    for j in m + 1..=n {
        c /= BigRational::from_integer(factorial(j - 1));
    }
    let q = n - m;
    let mat: Vec<Vec<BigRational>> = (1..=q)
        .map(|l| {
            let xsq = ratio(-((l * l) as i64), 9);
            (1..=q).map(|j| wilson_poly(m + j - 1, &xsq)).collect()
        })
        .collect();
    c * det_rational(&mat)
}

/// Number of states with exactly `k` turns `KPlus`, from the Wilson
/// polynomial determinant.
pub fn count_nk(n: usize, m: usize, k: usize) -> Result<BigInt> {
    check_nmk(n, m, k)?;
    let v = wilson_base(n, m) * BigRational::from_integer(binomial(m, k));
    natural(n, m, k, v)
}

/// `N_k / binom(m, k)` from the multiple hypergeometric sum.
fn hypersum_base(n: usize, m: usize) -> BigRational {
    let q = n - m;
    let (ni, mi) = (n as i64, m as i64);
    let five6 = ratio(5, 6);
    let four3 = ratio(4, 3);
    let one_n = int(1 - ni);
    let m32 = int(mi) + ratio(3, 2);
    let mut c = common_factor(n, m);
    for j in m + 1..=n {
        c *= poch(&five6, j - 1) * poch(&four3, j - 1);
    }
    for j in 1..=q {
        c *= poch(&(ratio(5, 2) + int(2 * ni - 2 * j as i64)), j - 1)
            / (poch(&one_n, j - 1) * poch(&m32, j - 1));
    }
    // term[i][l] for i = 1..=q, l = 0..n
    let term: Vec<Vec<BigRational>> = (1..=q as i64)
        .map(|i| {
            (0..n)
                .map(|l| {
                    poch(&ratio(1 - i, 3), l)
                        * poch(&ratio(1 + i, 3), l)
                        * poch(&one_n, l)
                        * poch(&m32, l)
                        / (poch(&five6, l)
                            * poch(&four3, l)
                            * BigRational::from_integer(factorial(l) * factorial(l)))
                })
                .collect()
        })
        .collect();
    // Only tuples of distinct l contribute (the Vandermonde factor vanishes
    // otherwise), so walk injections {1..q} -> {0..n-1}.
    let mut sum = BigRational::zero();
    let mut chosen: Vec<usize> = Vec::with_capacity(q);
    let mut used = vec![false; n];
    fn walk(
        i: usize,
        acc: BigRational,
        term: &[Vec<BigRational>],
        chosen: &mut Vec<usize>,
        used: &mut [bool],
        sum: &mut BigRational,
    ) {
        if acc.is_zero() {
            return;
        }
        if i == term.len() {
            let mut vdm = BigInt::one();
            for a in 0..chosen.len() {
                for b in a + 1..chosen.len() {
                    vdm *= BigInt::from(chosen[a] as i64 - chosen[b] as i64);
                }
            }
            *sum += acc * BigRational::from_integer(vdm);
            return;
        }
        for l in 0..used.len() {
            if used[l] {
                continue;
            }
            used[l] = true;
            chosen.push(l);
            walk(i + 1, &acc * &term[i][l], term, chosen, used, sum);
            chosen.pop();
            used[l] = false;
        }
    }
    walk(
        0,
        BigRational::one(),
        &term,
        &mut chosen,
        &mut used,
        &mut sum,
    );
    c * sum
}

/// Same count as [`count_nk`], from the `(n-m)`-fold hypergeometric sum.
pub fn count_nk_hypersum(n: usize, m: usize, k: usize) -> Result<BigInt> {
    check_nmk(n, m, k)?;
    let v = hypersum_base(n, m) * BigRational::from_integer(binomial(m, k));
    natural(n, m, k, v)
}

/// Exact counts `N_0..N_m` and their total.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CountReportJson", try_from = "CountReportJson")]
pub struct CountReport {
    pub n: usize,
    pub m: usize,
    pub nk: Vec<BigInt>,
    pub total: BigInt,
}

impl CountReport {
    pub fn from_counts(n: usize, m: usize, nk: Vec<BigInt>) -> Self {
        let total = nk.iter().sum();
        Self { n, m, nk, total }
    }

    /// CSV rows `n,m,k,N_k` with a header line.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,m,k,N_k\n");
        for (k, v) in self.nk.iter().enumerate() {
            s.push_str(&format!("{},{},{},{}\n", self.n, self.m, k, v));
        }
        s
    }

    /// Coefficients of `sum_k N_k z^k`, written out as a polynomial.
    pub fn generating_polynomial(&self) -> String {
        let terms: Vec<String> = self
            .nk
            .iter()
            .enumerate()
            .map(|(k, v)| match k {
                0 => v.to_string(),
                1 => format!("{v}*z"),
                _ => format!("{v}*z^{k}"),
            })
            .collect();
        terms.join(" + ")
    }
}

#[derive(Serialize, Deserialize)]
struct CountReportJson {
    n: usize,
    m: usize,
    #[serde(rename = "N")]
    nk: Vec<String>,
    total: String,
}

impl From<CountReport> for CountReportJson {
    fn from(r: CountReport) -> Self {
        Self {
            n: r.n,
            m: r.m,
            nk: r.nk.iter().map(|v| v.to_string()).collect(),
            total: r.total.to_string(),
        }
    }
}

impl TryFrom<CountReportJson> for CountReport {
    type Error = String;

    fn try_from(j: CountReportJson) -> std::result::Result<Self, String> {
        let parse = |s: &str| {
            s.parse::<BigInt>()
                .map_err(|e| format!("bad integer {s:?}: {e}"))
        };
        let nk =
            j.nk.iter()
                .map(|s| parse(s))
                .collect::<std::result::Result<Vec<_>, _>>()?;
        let total = parse(&j.total)?;
        if nk.iter().sum::<BigInt>() != total || nk.iter().any(|v| v.is_negative()) {
            return Err("counts do not add up to the total".into());
        }
        Ok(Self {
            n: j.n,
            m: j.m,
            nk,
            total,
        })
    }
}

/// Which method produces a [`CountReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMethod {
    Wilson,
    Hypersum,
    Brute,
}

/// Counts by walking every state (the ground truth).
pub fn count_by_enumeration(n: usize, m: usize) -> Result<Vec<BigInt>> {
    let size = LatticeSize::new(n, m)?;
    let mut nk = vec![0u64; m + 1];
    for st in enumerate_states(size) {
        nk[st.k_plus_count()?] += 1;
    }
    Ok(nk.into_iter().map(BigInt::from).collect())
}

/// All `N_k` for a lattice, by the chosen method.
pub fn count_total_with(n: usize, m: usize, method: CountMethod) -> Result<CountReport> {
    check_nmk(n, m, 0)?;
    let nk = match method {
        CountMethod::Wilson => (0..=m)
            .map(|k| count_nk(n, m, k))
            .collect::<Result<Vec<_>>>()?,
        CountMethod::Hypersum => (0..=m)
            .map(|k| count_nk_hypersum(n, m, k))
            .collect::<Result<Vec<_>>>()?,
        CountMethod::Brute => count_by_enumeration(n, m)?,
    };
    Ok(CountReport::from_counts(n, m, nk))
}

/// All `N_k` from the Wilson determinant.
pub fn count_total(n: usize, m: usize) -> Result<CountReport> {
    count_total_with(n, m, CountMethod::Wilson)
}

/// Partition function restricted to `k` turns `KPlus` at `gamma = 4 pi i/3`,
/// `lambda_i = gamma`, `mu_j = 0`, predicted from the exact count `N_k`:
/// `N_k (-1)^{C(m,2) - nm + n} phi^{n-m} e^{(C(m+1,2) - nm) gamma} f(gamma)^{n-m}
///  (e^{2 zeta} - e^{-2 gamma})^k ((e^{2 zeta} - e^{2 gamma}) / e^{2 gamma})^{m-k}`.
pub fn predict_z_spec(n: usize, m: usize, k: usize, zeta: C64, phi: C64) -> Result<C64> {
    let nk = count_nk(n, m, k)?;
    let nk = nk
        .to_f64()
        .ok_or_else(|| Error::Domain("count too large for a double".into()))?;
    let g = gamma_root_of_unity();
    let (ni, mi, ki) = (n as i64, m as i64, k as i64);
    let sign_exp = mi * (mi - 1) / 2 - ni * mi + ni;
    let sign = if sign_exp.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    let e2z = (2.0 * zeta).exp();
    let e2g = (2.0 * g).exp();
    let v = nk
        * sign
        * phi.powi((ni - mi) as i32)
        * (((mi * (mi + 1) / 2 - ni * mi) as f64) * g).exp()
        * f(g).powi((ni - mi) as i32)
        * (e2z - 1.0 / e2g).powi(ki as i32)
        * ((e2z - e2g) / e2g).powi((mi - ki) as i32);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: &[u64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn wilson_values() {
        assert_eq!(wilson_poly(0, &ratio(7, 5)), int(1));
        assert_eq!(wilson_poly(1, &ratio(-1, 9)), ratio(10, 9));
        assert_eq!(wilson_poly(1, &int(0)), ratio(5, 6));
        assert_eq!(wilson_leading(0), int(1));
        assert_eq!(wilson_leading(1), ratio(-5, 72));
    }

    #[test]
    fn coefficients_agree_with_evaluation_and_leading_term() {
        for k in 0..=6 {
            let c = wilson_coefficients(k);
            assert_eq!(c.len(), k + 1);
            // leading coefficient in t^2 is c_k / 36^k
            assert_eq!(&c[k] * rpow(36, -(k as i64)), wilson_leading(k));
            for x in [ratio(-1, 9), ratio(3, 7), int(2)] {
                let mut horner = BigRational::zero();
                for a in c.iter().rev() {
                    horner = horner * &x + a;
                }
                assert_eq!(horner, wilson_poly(k, &x));
            }
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_nk(1, 1, 0).unwrap(), BigInt::from(1));
        assert_eq!(count_nk(1, 1, 1).unwrap(), BigInt::from(1));
        assert_eq!(count_nk(2, 1, 0).unwrap(), BigInt::from(2));
        assert_eq!(count_nk(1, 0, 0).unwrap(), BigInt::from(1));
        assert_eq!(count_total(2, 1).unwrap().total, BigInt::from(4));
        assert_eq!(
            count_total(5, 5).unwrap().nk,
            big(&[45885, 229425, 458850, 458850, 229425, 45885])
        );
        for n in 1..=6 {
            assert_eq!(count_total(n, 0).unwrap().total, BigInt::from(1));
        }
        assert!(count_nk(1, 2, 0).is_err());
        assert!(count_nk(2, 1, 2).is_err());
    }

    #[test]
    fn hypersum_examples() {
        for k in 0..=1 {
            assert_eq!(count_nk_hypersum(1, 1, k).unwrap(), binomial(1, k));
        }
        assert_eq!(count_nk_hypersum(2, 1, 0).unwrap(), BigInt::from(2));
        assert_eq!(
            count_nk_hypersum(3, 1, 1).unwrap(),
            count_nk(3, 1, 1).unwrap()
        );
        assert_eq!(
            count_total_with(6, 3, CountMethod::Hypersum).unwrap(),
            count_total(6, 3).unwrap()
        );
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(count_by_enumeration(3, 2).unwrap(), big(&[11, 22, 11]));
        assert_eq!(
            count_total_with(2, 2, CountMethod::Brute).unwrap().total,
            BigInt::from(12)
        );
    }

    #[test]
    fn report_formats() {
        let r = count_total(2, 1).unwrap();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"n":2,"m":1,"N":["2","2"],"total":"4"}"#);
        assert_eq!(serde_json::from_str::<CountReport>(&text).unwrap(), r);
        assert_eq!(r.to_csv(), "n,m,k,N_k\n2,1,0,2\n2,1,1,2\n");
        assert_eq!(r.generating_polynomial(), "2 + 2*z");
        assert!(
            serde_json::from_str::<CountReport>(r#"{"n":2,"m":1,"N":["2","2"],"total":"5"}"#)
                .is_err()
        );
    }

    #[test]
    fn prediction_is_independent_of_phi_when_square() {
        let z = C64::new(0.3, 0.2);
        let a = predict_z_spec(2, 2, 1, z, C64::new(1.0, 0.0)).unwrap();
        let b = predict_z_spec(2, 2, 1, z, C64::new(-0.4, 2.0)).unwrap();
        assert_eq!(a, b);
    }
}
