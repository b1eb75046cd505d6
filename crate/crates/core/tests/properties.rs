use std::collections::{BTreeMap, HashSet};

use icevertex::asm::{
    enumerate_matrices, matrix_k_plus_count, matrix_to_state, state_to_matrix, validate_matrix,
    AsmMatrix,
};
use icevertex::counting::count_nk;
use icevertex::detform::det_partition;
use icevertex::exact::{det_rational, int, ratio};
use icevertex::lattice::{
    enumerate_states, parse_state, serialize_state, shards, state_stats, validate_state,
    LatticeSize, TurnKind, VertexKind,
};
use icevertex::linalg::{rel_diff, C64};
use icevertex::rng::labeled_rng;
use icevertex::tolerances::Tolerances;
use icevertex::verify::{run_suite, VerifyConfig};
use icevertex::weights::{partition_brute, partition_brute_parallel, sample_params};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

fn sizes(max_n: usize) -> impl Iterator<Item = LatticeSize> {
    (1..=max_n).flat_map(|n| (0..=n).map(move |m| LatticeSize::new(n, m).unwrap()))
}

fn choose2(x: usize) -> i64 {
    (x * x.saturating_sub(1) / 2) as i64
}

#[test]
fn enumerated_states_are_valid_distinct_and_create_n_minus_m_arrows() {
    for size in sizes(4) {
        let mut seen = HashSet::new();
        for st in enumerate_states(size) {
            assert!(validate_state(&st).is_empty(), "{size:?}");
            let text = serialize_state(&st).unwrap();
            assert_eq!(parse_state(&text).unwrap(), st);
            assert!(seen.insert(text), "duplicate state in {size:?}");
            let stats = state_stats(&st).unwrap();
            assert_eq!(stats.nu_turn(TurnKind::KCreate), size.n() - size.m());
        }
    }
}

#[test]
fn vertex_count_identities() {
    use VertexKind::*;
    for size in sizes(4) {
        let (n, m) = (size.n(), size.m());
        for st in enumerate_states(size) {
            let s = state_stats(&st).unwrap();
            let nu = |k| s.nu(k) as i64;
            assert_eq!(nu(BPlus) - nu(BMinus), choose2(n + 1) - choose2(n - m + 1));
            assert_eq!(
                nu(CPlus) - nu(CMinus),
                m as i64 - 2 * s.nu_turn(TurnKind::KMinus) as i64
            );
            let a = nu(APlus) + nu(AMinus);
            let expect = (m * n) as i64 + choose2(m) - m as i64
                + 2 * (s.nu_turn(TurnKind::KMinus) as i64 - nu(BMinus) - nu(CMinus));
            assert_eq!(a, expect);
            assert_eq!(s.vertex_total(), 2 * n * m);
        }
    }
}

#[test]
fn enumeration_is_deterministic_and_shardable() {
    for size in sizes(3) {
        let a: Vec<String> = enumerate_states(size)
            .map(|s| serialize_state(&s).unwrap())
            .collect();
        let b: Vec<String> = enumerate_states(size)
            .map(|s| serialize_state(&s).unwrap())
            .collect();
        assert_eq!(a, b);
        let mut merged: Vec<String> = shards(size)
            .into_iter()
            .flat_map(|sh| {
                sh.states()
                    .map(|s| serialize_state(&s).unwrap())
                    .collect::<Vec<_>>()
            })
            .collect();
        merged.sort();
        let mut sorted = a.clone();
        sorted.sort();
        assert_eq!(merged, sorted);
    }
}

#[test]
fn matrix_side_refines_counts_by_k() {
    for size in sizes(4) {
        let mut by_k: BTreeMap<usize, u64> = BTreeMap::new();
        for mat in enumerate_matrices(size) {
            *by_k.entry(matrix_k_plus_count(&mat)).or_default() += 1;
        }
        for k in 0..=size.m() {
            let got = BigInt::from(by_k.get(&k).copied().unwrap_or(0));
            assert_eq!(
                got,
                count_nk(size.n(), size.m(), k).unwrap(),
                "{size:?} k={k}"
            );
        }
    }
}

#[test]
fn bijection_round_trips_on_states() {
    for size in sizes(3) {
        for st in enumerate_states(size) {
            let mat = state_to_matrix(&st).unwrap();
            assert!(validate_matrix(&mat).is_empty());
            assert_eq!(matrix_to_state(&mat).unwrap(), st);
            assert_eq!(matrix_k_plus_count(&mat), st.k_plus_count().unwrap());
        }
    }
}

#[test]
fn suite_reports_depend_only_on_seed() {
    let cfg = VerifyConfig {
        n: 2,
        seed: 99,
        draws: 2,
        algebraic_draws: 4,
        ..VerifyConfig::default()
    };
    let a = run_suite(&["all"], &cfg).unwrap();
    let b = run_suite(&["all"], &cfg).unwrap();
    assert_eq!(a.to_stable_json(), b.to_stable_json());
}

fn cofactor(a: &[Vec<BigRational>]) -> BigRational {
    if a.is_empty() {
        return BigRational::one();
    }
    (0..a.len()).fold(BigRational::zero(), |acc, j| {
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
        let term = &a[0][j] * cofactor(&minor);
        if j % 2 == 0 {
            acc + term
        } else {
            acc - term
        }
    })
}

fn small_size() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|n| (Just(n), 0..=n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn brute_sum_is_symmetric_under_permutations(seed in any::<u64>(), (n, m) in small_size(), rot in 0usize..3) {
        let p = sample_params(&mut labeled_rng(seed, "perm"), n, m, 0.05);
        let mut q = p.clone();
        q.lambdas.rotate_left(rot % n);
        if m > 0 {
            q.mus.rotate_left(rot % m);
        }
        q.lambdas.reverse();
        q.mus.reverse();
        let (a, b) = (partition_brute(&p).unwrap(), partition_brute(&q).unwrap());
        prop_assert!(rel_diff(a, b) < 1e-12, "{a} {b}");
    }

    #[test]
    fn sharded_sum_matches_serial(seed in any::<u64>(), (n, m) in small_size()) {
        let p = sample_params(&mut labeled_rng(seed, "shard"), n, m, 0.05);
        prop_assert!(rel_diff(partition_brute_parallel(&p).unwrap(), partition_brute(&p).unwrap()) < 1e-12);
    }

    #[test]
    fn no_creation_weight_means_zero_unless_square(seed in any::<u64>(), (n, m) in small_size()) {
        let mut p = sample_params(&mut labeled_rng(seed, "phi0"), n, m, 0.05);
        p.phi = C64::new(0.0, 0.0);
        let z = partition_brute(&p).unwrap();
        if m < n {
            prop_assert_eq!(z, C64::new(0.0, 0.0));
        } else {
            prop_assert!(z.norm() > 0.0);
        }
    }

    #[test]
    fn determinant_is_periodic(seed in any::<u64>(), (n, m) in small_size(), which in 0usize..6) {
        let p = sample_params(&mut labeled_rng(seed, "period"), n, m, 0.05);
        let shift = C64::new(0.0, 2.0 * std::f64::consts::PI);
        let mut q = p.clone();
        let total = n + m;
        let idx = which % total;
        if idx < n { q.lambdas[idx] += shift } else { q.mus[idx - n] += shift }
        let (a, b) = (det_partition(&p).unwrap().value, det_partition(&q).unwrap().value);
        prop_assert!(rel_diff(a, b) < 1e-10, "{a} {b}");
    }

    #[test]
    fn validator_accepts_exactly_the_images(n in 1usize..=3, m_frac in 0usize..=3, cells in prop::collection::vec(-1i8..=1, 18)) {
        let m = m_frac.min(n);
        let size = LatticeSize::new(n, m).unwrap();
        let entries: Vec<Vec<i8>> = (0..2 * n).map(|r| cells[r * 3..r * 3 + m].to_vec()).collect();
        let mat = AsmMatrix::new(size, entries).unwrap();
        let valid = validate_matrix(&mat).is_empty();
        match matrix_to_state(&mat) {
            Ok(st) => {
                prop_assert!(valid);
                prop_assert_eq!(state_to_matrix(&st).unwrap(), mat);
            }
            Err(_) => prop_assert!(!valid),
        }
    }

    #[test]
    fn bareiss_matches_cofactor(cells in prop::collection::vec((-9i64..=9, 1i64..=5), 16), dim in 0usize..=4) {
        let a: Vec<Vec<BigRational>> = (0..dim)
            .map(|i| (0..dim).map(|j| { let (p, q) = cells[i * 4 + j]; ratio(p, q) }).collect())
            .collect();
        prop_assert_eq!(det_rational(&a), cofactor(&a));
    }

    #[test]
    fn tolerance_overrides_must_be_positive(v in -1.0f64..1.0) {
        let mut t = Tolerances::default();
        let r = t.apply(&format!("ybe={v}"));
        prop_assert_eq!(r.is_ok(), v > 0.0);
        if v > 0.0 {
            prop_assert_eq!(t.get("ybe"), v);
        }
    }
}

#[test]
fn exact_helpers_agree_on_identity() {
    let id: Vec<Vec<BigRational>> = (0..3)
        .map(|i| {
            (0..3)
                .map(|j| if i == j { int(1) } else { int(0) })
                .collect()
        })
        .collect();
    assert_eq!(det_rational(&id), int(1));
}
