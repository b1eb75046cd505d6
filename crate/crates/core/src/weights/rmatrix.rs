//! R-matrix and K-matrix in the basis (++, +-, -+, --), with numeric
//! residuals of the Yang-Baxter and reflection equations.

use super::{local_weight, turn_weight, ModelParams};
use crate::error::{pole, Result};
use crate::lattice::{TurnKind, VertexKind};
use crate::linalg::{CMatrix, C64};
use crate::tolerances::POLE;

/// `R(x) = [[a+,0,0,0],[0,b+,c-,0],[0,c+,b-,0],[0,0,0,a-]]`.
pub fn r_matrix(x: C64, gamma: C64) -> Result<CMatrix> {
    if super::f(x + gamma).norm() < POLE {
        return Err(pole("f(x + gamma) in the R-matrix"));
    }
    let w = |k| local_weight(k, x, gamma);
    let z = C64::new(0.0, 0.0);
    Ok(CMatrix::from_rows(vec![
        vec![w(VertexKind::APlus)?, z, z, z],
        vec![z, w(VertexKind::BPlus)?, w(VertexKind::CMinus)?, z],
        vec![z, w(VertexKind::CPlus)?, w(VertexKind::BMinus)?, z],
        vec![z, z, z, w(VertexKind::AMinus)?],
    ]))
}

/// Upper-triangular boundary matrix `[[k+, kc], [0, k-]]`.
pub fn k_matrix(lambda: C64, params: &ModelParams) -> CMatrix {
    CMatrix::from_rows(vec![
        vec![
            turn_weight(TurnKind::KPlus, lambda, params),
            turn_weight(TurnKind::KCreate, lambda, params),
        ],
        vec![
            C64::new(0.0, 0.0),
            turn_weight(TurnKind::KMinus, lambda, params),
        ],
    ])
}

fn swap() -> CMatrix {
    let mut p = CMatrix::zeros(4, 4);
    for (i, j) in [(0, 0), (1, 2), (2, 1), (3, 3)] {
        p[(i, j)] = C64::new(1.0, 0.0);
    }
    p
}

/// Max-norm of `R12 R13 R23 - R23 R13 R12` with arguments `l1-l2`, `l1-l3`,
/// `l2-l3`.
pub fn ybe_residual(l1: C64, l2: C64, l3: C64, gamma: C64) -> Result<f64> {
    let id = CMatrix::identity(2);
    let p23 = id.kron(&swap());
    let r12 = r_matrix(l1 - l2, gamma)?.kron(&id);
    let r23 = id.kron(&r_matrix(l2 - l3, gamma)?);
    let r13 = &(&p23 * &r_matrix(l1 - l3, gamma)?.kron(&id)) * &p23;
    let lhs = &(&r12 * &r13) * &r23;
    let rhs = &(&r23 * &r13) * &r12;
    Ok((&lhs - &rhs).max_abs())
}

/// Max-norm residual of the reflection equation
/// `R(l-l') K0(l) R'(l+l') K0'(l') = K0'(l') R(l+l') K0(l) R'(l-l')`
/// where `R' = P R P` acts with the factors swapped.
pub fn reflection_residual(l: C64, lp: C64, params: &ModelParams) -> Result<f64> {
    let g = params.gamma;
    let p = swap();
    let id = CMatrix::identity(2);
    let r = |x: C64| r_matrix(x, g);
    let rp = |x: C64| -> Result<CMatrix> { Ok(&(&p * &r(x)?) * &p) };
    let k0 = k_matrix(l, params).kron(&id);
    let k0p = id.kron(&k_matrix(lp, params));
    let lhs = &(&(&r(l - lp)? * &k0) * &rp(l + lp)?) * &k0p;
    let rhs = &(&(&k0p * &r(l + lp)?) * &k0) * &rp(l - lp)?;
    Ok((&lhs - &rhs).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{labeled_rng, unit_complex};
    use crate::weights::sample_params;

    #[test]
    fn ybe_holds_at_random_and_degenerate_points() {
        let mut rng = labeled_rng(11, "ybe-unit");
        for _ in 0..10 {
            let (a, b, c, g) = (
                unit_complex(&mut rng),
                unit_complex(&mut rng),
                unit_complex(&mut rng),
                unit_complex(&mut rng),
            );
            assert!(ybe_residual(a, b, c, g).unwrap() < 1e-12);
            assert!(ybe_residual(a, a, c, g).unwrap() < 1e-12);
            let shifted = g + C64::new(0.0, 2.0 * std::f64::consts::PI);
            assert!(ybe_residual(a, b, c, shifted).unwrap() < 1e-12);
        }
    }

    #[test]
    fn reflection_holds_including_diagonal_case() {
        let mut rng = labeled_rng(12, "refl-unit");
        for _ in 0..10 {
            let mut p = sample_params(&mut rng, 1, 0, 0.05);
            let (l, lp) = (unit_complex(&mut rng), unit_complex(&mut rng));
            assert!(reflection_residual(l, lp, &p).unwrap() < 1e-12);
            assert!(reflection_residual(l, l, &p).unwrap() < 1e-12);
            p.phi = C64::default();
            assert!(reflection_residual(l, lp, &p).unwrap() < 1e-12);
        }
    }

    #[test]
    fn unswapped_reflection_fails() {
        // Using R instead of P R P on the right-hand factor breaks the identity,
        // so the residual above is a real test of the layout.
        let mut rng = labeled_rng(13, "refl-neg");
        let p = sample_params(&mut rng, 1, 0, 0.05);
        let (l, lp) = (unit_complex(&mut rng), unit_complex(&mut rng));
        let g = p.gamma;
        let id = CMatrix::identity(2);
        let k0 = k_matrix(l, &p).kron(&id);
        let k0p = id.kron(&k_matrix(lp, &p));
        let r = |x| r_matrix(x, g).unwrap();
        let lhs = &(&(&r(l - lp) * &k0) * &r(l + lp)) * &k0p;
        let rhs = &(&(&k0p * &r(l + lp)) * &k0) * &r(l - lp);
        assert!((&lhs - &rhs).max_abs() > 1e-6);
    }
}
