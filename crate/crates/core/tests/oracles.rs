//! Spectral quantities checked against independent computations: SVD null
//! spaces, Schur eigenvalues, truncated Neumann series, matrix powers and
//! exact rationals.

mod common;

use common::{matrix_power, max_abs_diff};
use influence::graph::{self, submatrix, SpectralSummary};
use influence::scenario::fixtures;
use nalgebra::DMatrix;

fn case_a() -> influence::Scenario {
    fixtures::load("fig6_caseA").unwrap()
}

/// Unit-sum vector spanning the null space of `block - I`.
fn svd_perron(block: &DMatrix<f64>) -> Vec<f64> {
    let n = block.nrows();
    let shifted = block - DMatrix::identity(n, n);
    let svd = shifted.svd(false, true);
    let v_t = svd.v_t.unwrap();
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let v: Vec<f64> = v_t.row(idx).iter().copied().collect();
    let s: f64 = v.iter().sum();
    v.iter().map(|x| x / s).collect()
}

#[test]
fn perron_vectors_match_svd_null_space() {
    let s = case_a();
    let spectral = s.spectral().unwrap();
    for (block, y) in s
        .partition()
        .sending_blocks()
        .iter()
        .zip(&spectral.perron_vectors)
    {
        let a = submatrix(s.matrix().weights(), block, block);
        let oracle = svd_perron(&a);
        for (got, want) in y.iter().zip(&oracle) {
            assert!((got - want).abs() < 1e-10, "{got} vs {want}");
        }
    }
    let y1: Vec<f64> = spectral.perron_vectors[0].iter().copied().collect();
    for (got, want) in y1.iter().zip([25.0 / 68.0, 24.0 / 68.0, 19.0 / 68.0]) {
        assert!((got - want).abs() < 1e-10);
    }
}

#[test]
fn receiving_radius_matches_schur() {
    let s = case_a();
    let t_rr = s.partition().t_rr().clone();
    let oracle = t_rr
        .clone()
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let radius = graph::spectral_radius(&t_rr, graph::PERRON_TOL).unwrap();
    assert!((radius - oracle).abs() < 1e-10, "{radius} vs {oracle}");
    assert!((radius - 0.711753).abs() < 1e-6);
    assert!((s.partition().receiving_radii()[0] - oracle).abs() < 1e-10);
}

#[test]
fn confinement_matches_neumann_series() {
    let s = case_a();
    let t = s.partition().t_rr().transpose();
    let n = t.nrows();
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = term.clone();
    for _ in 0..200 {
        term = &term * &t;
        sum += &term;
    }
    let c = graph::confinement_matrix(s.partition()).unwrap();
    assert!(max_abs_diff(&c, &sum) < 1e-12);
    let row_sums: Vec<f64> = (0..n).map(|i| c.row(i).sum()).collect();
    for (got, want) in row_sums.iter().zip([2.21374, 4.58015, 3.12977]) {
        assert!((got - want).abs() < 1e-5);
    }
}

#[test]
fn limiting_power_matches_matrix_power() {
    for name in ["three_agent", "fig6_caseA", "strong_three"] {
        let s = fixtures::load(name).unwrap();
        let spectral = SpectralSummary::compute(s.matrix(), s.partition()).unwrap();
        let power = matrix_power(s.matrix().weights(), 1000);
        assert!(
            max_abs_diff(&spectral.limiting_power, &power) < 1e-8,
            "{name}"
        );
    }
}

#[test]
fn influence_matches_exact_rationals() {
    let s = case_a();
    let w = graph::influence_matrix(s.partition()).unwrap();
    let exact = [
        [0.0, 53.0 / 131.0, 39.0 / 262.0, 117.0 / 262.0, 0.0],
        [0.0, 69.0 / 131.0, 31.0 / 262.0, 93.0 / 262.0, 0.0],
        [0.0, 93.0 / 131.0, 19.0 / 262.0, 57.0 / 262.0, 0.0],
    ];
    for (r, row) in exact.iter().enumerate() {
        for (c, want) in row.iter().enumerate() {
            assert!((w[(c, r)] - want).abs() < 1e-10, "W[{c},{r}]");
        }
    }
    // Independent dense solve with a full inverse.
    let p = s.partition();
    let n_r = p.t_rr().nrows();
    let inv = (DMatrix::identity(n_r, n_r) - p.t_rr())
        .try_inverse()
        .unwrap();
    assert!(max_abs_diff(&w, &(p.t_sr() * inv)) < 1e-12);
}

#[test]
fn limiting_beliefs_match_exact_rationals() {
    let q = case_a().prediction().unwrap();
    let exact = [
        (5, 53.0 / 131.0 + 39.0 / 262.0, 117.0 / 262.0),
        (6, 69.0 / 131.0 + 31.0 / 262.0, 93.0 / 262.0),
        (7, 93.0 / 131.0 + 19.0 / 262.0, 57.0 / 262.0),
    ];
    for (k, t1, t2) in exact {
        let row = q.agent(k);
        assert!((row[0] - t1).abs() < 1e-12);
        assert!((row[1] - t2).abs() < 1e-12);
        assert_eq!(row[2], 0.0);
    }
}
