//! Boltzmann weights, state weights and brute-force partition functions.

mod params;
mod rmatrix;

use rayon::prelude::*;

use crate::error::{pole, Result};
use crate::lattice::{
    classify_vertex, enumerate_states, shards, turn_kind, Half, LatticeState, TurnKind, VertexKind,
};
use crate::linalg::{CompensatedSum, C64};
use crate::tolerances::POLE;

pub use params::{sample_params, ModelParams};
pub use rmatrix::{k_matrix, r_matrix, reflection_residual, ybe_residual};

/// `2 sinh x`.
pub fn f(x: C64) -> C64 {
    2.0 * x.sinh()
}

/// `2 cosh x`.
pub fn h(x: C64) -> C64 {
    2.0 * x.cosh()
}

/// Local weight of a vertex of `kind` with spectral argument `arg`.
pub fn local_weight(kind: VertexKind, arg: C64, gamma: C64) -> Result<C64> {
    if kind == VertexKind::APlus || kind == VertexKind::AMinus {
        return Ok(C64::new(1.0, 0.0));
    }
    let den = f(arg + gamma);
    if den.norm() < POLE {
        return Err(pole("f(x + gamma)"));
    }
    Ok(match kind {
        VertexKind::BPlus => (-gamma).exp() * f(arg) / den,
        VertexKind::BMinus => gamma.exp() * f(arg) / den,
        VertexKind::CPlus => arg.exp() * f(gamma) / den,
        VertexKind::CMinus => (-arg).exp() * f(gamma) / den,
        VertexKind::APlus | VertexKind::AMinus => unreachable!(),
    })
}

/// Weight of a turn with spectral parameter `lambda`.
pub fn turn_weight(kind: TurnKind, lambda: C64, params: &ModelParams) -> C64 {
    let z = params.zeta;
    match kind {
        TurnKind::KPlus => (z - lambda).exp() * f(z + lambda),
        TurnKind::KMinus => (z + lambda).exp() * f(z - lambda),
        TurnKind::KCreate => params.phi * f(2.0 * lambda),
    }
}

/// Spectral argument of a vertex: `lambda + mu` in lower rows, `lambda - mu`
/// in upper rows.
pub fn vertex_argument(half: Half, lambda: C64, mu: C64) -> C64 {
    match half {
        Half::Lower => lambda + mu,
        Half::Upper => lambda - mu,
    }
}

fn check_shape(state: &LatticeState, params: &ModelParams) -> Result<()> {
    let size = state.size();
    if size.n() != params.n() || size.m() != params.m() {
        return Err(crate::error::Error::Domain(format!(
            "state is {}x{} but params carry n={}, m={}",
            size.n(),
            size.m(),
            params.n(),
            params.m()
        )));
    }
    Ok(())
}

/// Product of all vertex and turn weights of a state.
pub fn state_weight(state: &LatticeState, params: &ModelParams) -> Result<C64> {
    check_shape(state, params)?;
    let size = state.size();
    let mut w = C64::new(1.0, 0.0);
    for i in 1..=size.n() {
        let lam = params.lambdas[i - 1];
        w *= turn_weight(turn_kind(state, i)?, lam, params);
        for row in [2 * i - 1, 2 * i] {
            let half = Half::of_row(row);
            for col in 1..=size.m() {
                let kind = classify_vertex(state, row, col)?;
                let arg = vertex_argument(half, lam, params.column_mu(col));
                w *= local_weight(kind, arg, params.gamma).map_err(|_| {
                    pole(format!("f(x + gamma) at vertex (row {row}, column {col})"))
                })?;
            }
        }
    }
    Ok(w)
}

fn brute(params: &ModelParams, k: Option<usize>) -> Result<C64> {
    if params.n() == 0 {
        return Ok(C64::new(if k.unwrap_or(0) == 0 { 1.0 } else { 0.0 }, 0.0));
    }
    let mut acc = CompensatedSum::new();
    for st in enumerate_states(params.size()?) {
        if let Some(k) = k {
            if st.k_plus_count()? != k {
                continue;
            }
        }
        acc.add(state_weight(&st, params)?);
    }
    Ok(acc.value())
}

/// Partition function as the sum of all state weights, in enumeration order.
/// By convention the empty lattice (`n = 0`) has partition function 1.
pub fn partition_brute(params: &ModelParams) -> Result<C64> {
    brute(params, None)
}

/// Partition function restricted to states with exactly `k` turns `KPlus`.
pub fn partition_brute_fixed_k(params: &ModelParams, k: usize) -> Result<C64> {
    if k > params.m() {
        return Err(crate::error::Error::Domain(format!(
            "k = {k} exceeds m = {}",
            params.m()
        )));
    }
    brute(params, Some(k))
}

/// Same as [`partition_brute`], summed shard by shard on the rayon pool.
/// Partial sums are merged in shard order, so the result does not depend on
/// the number of workers.
pub fn partition_brute_parallel(params: &ModelParams) -> Result<C64> {
    if params.n() == 0 {
        return Ok(C64::new(1.0, 0.0));
    }
    let parts: Vec<Result<CompensatedSum>> = shards(params.size()?)
        .par_iter()
        .map(|sh| {
            let mut acc = CompensatedSum::new();
            for st in sh.states() {
                acc.add(state_weight(&st, params)?);
            }
            Ok(acc)
        })
        .collect();
    let mut total = CompensatedSum::new();
    for p in parts {
        total.merge(&p?);
    }
    Ok(total.value())
}
