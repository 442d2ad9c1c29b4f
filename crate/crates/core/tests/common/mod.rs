#![allow(dead_code)]

use praginfo::{Distribution, JointDistribution};
use proptest::prelude::*;

/// Strictly positive distribution on `n` points.
pub fn positive_dist(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(0.01f64..1.0, n).prop_map(|w| Distribution::from_weights(&w).unwrap())
}

/// Distribution with some zero cells (at least one positive).
pub fn sparse_dist(n: usize) -> impl Strategy<Value = Distribution> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.01f64..1.0], n).prop_map(|mut w| {
        if w.iter().all(|x| *x == 0.0) {
            w[0] = 1.0;
        }
        Distribution::from_weights(&w).unwrap()
    })
}

pub fn joint(rows: usize, cols: usize) -> impl Strategy<Value = JointDistribution> {
    prop::collection::vec(prop_oneof![1 => Just(0.0), 4 => 0.01f64..1.0], rows * cols).prop_map(
        move |mut w| {
            if w.iter().all(|x| *x == 0.0) {
                w[0] = 1.0;
            }
            let s: f64 = w.iter().sum();
            JointDistribution::new(rows, cols, w.iter().map(|x| x / s).collect()).unwrap()
        },
    )
}

pub fn sized_joint(max: usize) -> impl Strategy<Value = JointDistribution> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| joint(r, c))
}

/// `−Σ p log₂ p` written out independently of the library.
pub fn plain_entropy(p: &[f64]) -> f64 {
    p.iter().filter(|x| **x > 0.0).map(|x| -x * x.log2()).sum()
}

pub fn plain_kl(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(a, _)| **a > 0.0)
        .map(|(a, b)| a * (a / b).log2())
        .sum()
}
