mod common;

use std::time::Duration;

use proptest::prelude::*;

use prandtl_vp::benchmark::example4_exact;
use prandtl_vp::chebyshev::grid;
use prandtl_vp::operators::{assemble_banded_system, operator_coeffs};
use prandtl_vp::solver::{
    cond_inf, cond_inf_banded, rhs_coeffs, solve_banded, solve_banded_coeffs, solve_dense,
    solve_parity_split, BandedLU,
};
use prandtl_vp::vp_basis::VpParams;
use prandtl_vp::{Error, TwoBandMatrix};

/// Random strictly dominant two-band matrix: off-diagonals in [-1, 1],
/// diagonal magnitude above the off-diagonal row sum by at least `slack`.
fn dominant(n: usize, seed: u64, slack: f64) -> TwoBandMatrix {
    let mut rng = common::Lcg(seed);
    let upper: Vec<f64> = (0..n - 2).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let lower: Vec<f64> = (0..n - 2).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let diag: Vec<f64> = (0..n)
        .map(|i| {
            let off = if i + 2 < n { upper[i].abs() } else { 0.0 }
                + if i >= 2 { lower[i - 2].abs() } else { 0.0 };
            let sign = if rng.next_f64() < 0.5 { -1.0 } else { 1.0 };
            sign * (off + slack + rng.next_f64())
        })
        .collect();
    TwoBandMatrix::new(diag, upper, lower).unwrap()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn banded_matches_dense_and_parity_split(seed in any::<u64>(), slack in 0.05f64..2.0) {
        let m = dominant(64, seed, slack);
        let mut rng = common::Lcg(seed ^ 0x9e37);
        let rhs: Vec<f64> = (0..64).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let b = solve_banded(&m, &rhs).unwrap().x;
        let d = solve_dense(&m.to_dense(), &rhs).unwrap();
        let p = solve_parity_split(&m, &rhs).unwrap();
        let scale = b.iter().map(|v| v.abs()).fold(1.0, f64::max);
        prop_assert!(max_diff(&b, &d) <= 1e-12 * scale);
        prop_assert!(max_diff(&b, &p) <= 1e-13 * scale);
    }

    #[test]
    fn lu_reconstructs_the_matrix(seed in any::<u64>(), n in 3usize..80) {
        let m = dominant(n, seed, 0.1);
        let r = BandedLU::factor(&m).unwrap().reconstruct();
        let scale = m.norm_inf();
        prop_assert!(max_diff(m.diag(), r.diag()) <= 1e-13 * scale);
        prop_assert!(max_diff(m.upper(), r.upper()) <= 1e-13 * scale);
        prop_assert!(max_diff(m.lower(), r.lower()) <= 1e-13 * scale);
    }

    #[test]
    fn banded_cond_matches_dense_cond(seed in any::<u64>()) {
        let m = dominant(40, seed, 0.2);
        let a = cond_inf_banded(&m).unwrap();
        let b = cond_inf(&m.to_dense()).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * b);
    }
}

#[test]
fn operation_count_is_linear() {
    let rhs = |n: usize| vec![1.0; n];
    let ops = |n: usize| {
        solve_banded(&dominant(n, 7, 0.5), &rhs(n))
            .unwrap()
            .op_count
    };
    for n in [64, 128, 256, 512, 1024] {
        let ratio = ops(2 * n) as f64 / ops(n) as f64;
        assert!((1.9..=2.1).contains(&ratio), "n={n} ratio {ratio}");
        assert!(ops(n) <= 8 * n, "n={n}: {} ops", ops(n));
    }
}

#[test]
fn operator_matrix_is_dominant_and_solvable() {
    for sigma in [0.0, 0.5, 1.0, 2.0, 10.0] {
        for big in [8, 64, 512] {
            let p = VpParams::from_even_n(big).unwrap();
            let c = operator_coeffs(p, sigma);
            let m = assemble_banded_system(&c, true);
            assert!(m.is_strictly_diagonally_dominant(), "sigma={sigma} N={big}");
            let g = grid(p.n()).unwrap();
            let rhs = rhs_coeffs(&|y: f64| 1.0 + y * y, &g).unwrap();
            let r = solve_banded_coeffs(&c, &rhs).unwrap();
            assert!(r.residual_inf <= 1e-13 * max_diff(&rhs, &vec![0.0; rhs.len()]));
            assert!(r.op_count.unwrap() <= 8 * p.n());
        }
    }
}

#[test]
fn last_pivot_tends_to_one() {
    // the trailing pivot of the Example 4 system drifts to 1 like 1/n
    let scaled: Vec<f64> = [32, 64, 128, 256, 512, 1024]
        .iter()
        .map(|&big| {
            let p = VpParams::from_even_n(big).unwrap();
            let lu =
                BandedLU::factor(&assemble_banded_system(&operator_coeffs(p, 2.0), true)).unwrap();
            let d = *lu.pivots().last().unwrap();
            (d - 1.0).abs() * p.n() as f64
        })
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::MAX, 0.0f64), |(a, b), &v| (a.min(v), b.max(v)));
    assert!(hi <= 4.0 && lo > 0.5 && hi / lo < 1.2, "{scaled:?}");
}

#[test]
fn refuses_non_dominant() {
    let p = VpParams::new(48, 16).unwrap();
    let m = assemble_banded_system(&operator_coeffs(p, -5.0), true);
    match solve_banded(&m, &vec![1.0; 48]) {
        Err(Error::NotDiagonallyDominant { row, .. }) => assert_eq!(row, 4),
        other => panic!("expected refusal, got {other:?}"),
    }
    // the parity split still solves it
    let x = solve_parity_split(&m, &vec![1.0; 48]).unwrap();
    let back = m.mul_vec(&x).unwrap();
    assert!(back.iter().all(|v| (v - 1.0).abs() < 1e-10));
}

#[test]
fn banded_solve_timing() {
    // n = 512 solve, best of several runs to dodge scheduler noise
    let p = VpParams::new(512, 171).unwrap();
    let c = operator_coeffs(p, 1.0);
    let g = grid(512).unwrap();
    let rhs = rhs_coeffs(&example4_exact, &g).unwrap();
    let best = (0..20)
        .map(|_| solve_banded_coeffs(&c, &rhs).unwrap().solve_elapsed)
        .min()
        .unwrap();
    assert!(best < Duration::from_millis(1), "{best:?}");
}
