#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::Rng;

/// Random left-stochastic matrix with 1-3 primitive sending blocks and at
/// least one receiving agent, agents shuffled. Every receiver gives weight to
/// some sending agent, so the receiving part has spectral radius below 1.
pub fn random_weak_graph<R: Rng>(rng: &mut R, max_agents: usize) -> DMatrix<f64> {
    let n_blocks = rng.random_range(1..=3);
    let mut sizes: Vec<usize> = (0..n_blocks).map(|_| rng.random_range(1..=3)).collect();
    while sizes.iter().sum::<usize>() >= max_agents {
        let i = sizes.iter().position(|&s| s > 1).unwrap_or(0);
        if sizes[i] > 1 {
            sizes[i] -= 1;
        } else {
            sizes.pop();
        }
    }
    let n_s: usize = sizes.iter().sum();
    let n_r = rng.random_range(1..=(max_agents - n_s).min(6));
    let n = n_s + n_r;

    // Canonical layout first, then shuffle.
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut start = 0;
    for &size in &sizes {
        for k in start..start + size {
            let col: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
            let total: f64 = col.iter().sum();
            for (i, w) in col.iter().enumerate() {
                a[(start + i, k)] = w / total;
            }
        }
        start += size;
    }
    for k in n_s..n {
        let anchor = rng.random_range(0..n_s);
        let mut col = vec![0.0; n];
        col[anchor] = rng.random_range(0.05..1.0);
        for (l, c) in col.iter_mut().enumerate() {
            if l != anchor && rng.random_bool(0.4) {
                *c = rng.random_range(0.0..1.0);
            }
        }
        let total: f64 = col.iter().sum();
        for (l, c) in col.iter().enumerate() {
            a[(l, k)] = c / total;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    DMatrix::from_fn(n, n, |i, j| a[(perm[i], perm[j])])
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).abs().max()
}

/// `A^p` by repeated squaring.
pub fn matrix_power(a: &DMatrix<f64>, mut p: u32) -> DMatrix<f64> {
    let mut base = a.clone();
    let mut acc = DMatrix::identity(a.nrows(), a.ncols());
    while p > 0 {
        if p & 1 == 1 {
            acc = &acc * &base;
        }
        base = &base * &base;
        p >>= 1;
    }
    acc
}
