//! Exact rational helpers: Pochhammer symbols, factorials and fraction-free
//! determinants.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Rising factorial `(a)_k = a (a+1) ... (a+k-1)`.
pub fn poch(a: &BigRational, k: usize) -> BigRational {
    let mut r = BigRational::one();
    let mut x = a.clone();
    for _ in 0..k {
        r *= &x;
        x += BigRational::one();
    }
    r
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut r = BigInt::one();
    for i in 0..k {
        r = r * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    r
}

/// `base^e` for a possibly negative exponent.
pub fn rpow(base: i64, e: i64) -> BigRational {
    let p = num_traits::pow(BigInt::from(base), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

/// Determinant of an integer matrix by Bareiss elimination.
pub fn det_bareiss(mut a: Vec<Vec<BigInt>>) -> BigInt {
    let n = a.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(r) => {
                    a.swap(k, r);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

/// Determinant of a rational matrix: each row is scaled to integers by the
/// lcm of its denominators, then [`det_bareiss`] runs on the integer matrix.
pub fn det_rational(a: &[Vec<BigRational>]) -> BigRational {
    let mut scale = BigInt::one();
    let rows = a
        .iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            scale *= &l;
            row.iter()
                .map(|x| (x * BigRational::from_integer(l.clone())).to_integer())
                .collect()
        })
        .collect();
    BigRational::new(det_bareiss(rows), scale)
}

/// `Some(integer)` if `x` is a non-negative integer.
pub fn as_natural(x: &BigRational) -> Option<BigInt> {
    (x.is_integer() && !x.is_negative()).then(|| x.to_integer())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Cofactor expansion, the textbook oracle.
    fn det_cofactor(a: &[Vec<BigRational>]) -> BigRational {
        let n = a.len();
        if n == 0 {
            return BigRational::one();
        }
        let mut s = BigRational::zero();
        for j in 0..n {
            let minor: Vec<Vec<BigRational>> = a[1..]
                .iter()
                .map(|r| {
                    r.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, x)| x.clone())
                        .collect()
                })
                .collect();
            let term = &a[0][j] * det_cofactor(&minor);
            if j % 2 == 0 {
                s += term;
            } else {
                s -= term;
            }
        }
        s
    }

    #[test]
    fn bareiss_matches_cofactor() {
        let a = vec![
            vec![ratio(1, 2), int(3), ratio(-2, 3), int(0)],
            vec![int(0), int(0), int(5), ratio(1, 7)],
            vec![int(2), ratio(3, 4), int(1), int(-1)],
            vec![ratio(5, 9), int(0), int(2), int(3)],
        ];
        assert_eq!(det_rational(&a), det_cofactor(&a));
        let singular = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(det_rational(&singular), BigRational::zero());
        assert_eq!(det_rational(&[]), BigRational::one());
    }

    #[test]
    fn small_helpers() {
        assert_eq!(poch(&ratio(1, 2), 3), ratio(15, 8));
        assert_eq!(poch(&int(-2), 3), int(0));
        assert_eq!(factorial(5), BigInt::from(120));
        assert_eq!(binomial(6, 2), BigInt::from(15));
        assert_eq!(rpow(3, -2), ratio(1, 9));
        assert_eq!(as_natural(&ratio(4, 2)), Some(BigInt::from(2)));
        assert_eq!(as_natural(&ratio(1, 2)), None);
        assert_eq!(as_natural(&int(-1)), None);
    }
}
