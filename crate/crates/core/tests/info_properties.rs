mod common;

use common::*;
use praginfo::info::*;
use praginfo::{Distribution, JointDistribution, ThreeWayTable};
use proptest::prelude::*;

fn row_sums(j: &JointDistribution) -> Vec<f64> {
    (0..j.rows()).map(|r| (0..j.cols()).map(|c| j.get(r, c)).sum()).collect()
}

fn col_sums(j: &JointDistribution) -> Vec<f64> {
    (0..j.cols()).map(|c| (0..j.rows()).map(|r| j.get(r, c)).sum()).collect()
}

proptest! {
    #[test]
    fn entropy_is_bounded(p in (1usize..12).prop_flat_map(sparse_dist)) {
        let h = entropy(&p);
        prop_assert!(h >= 0.0);
        prop_assert!(h <= (p.len() as f64).log2() + 1e-12);
        prop_assert!((h - plain_entropy(p.probs())).abs() < 1e-12);
    }

    #[test]
    fn kl_is_nonnegative_and_zero_on_diagonal(
        (p, q) in (1usize..10).prop_flat_map(|n| (sparse_dist(n), positive_dist(n)))
    ) {
        let d = relative_entropy(&p, &q).unwrap();
        prop_assert!(d >= -1e-12);
        prop_assert!((d - plain_kl(p.probs(), q.probs())).abs() < 1e-10);
        prop_assert!(relative_entropy(&p, &p).unwrap().abs() < 1e-12);
    }

    #[test]
    fn kl_is_infinite_off_support(p in positive_dist(4), k in 0usize..4) {
        let q = Distribution::degenerate(4, k).unwrap();
        prop_assert_eq!(relative_entropy(&p, &q).unwrap(), f64::INFINITY);
    }

    #[test]
    fn mutual_information_identities(j in sized_joint(6)) {
        let i = mutual_information(&j);
        let oracle = plain_entropy(&row_sums(&j)) + plain_entropy(&col_sums(&j))
            - plain_entropy(j.table());
        prop_assert!((i - oracle).abs() < 1e-10);
        prop_assert!(i >= -1e-12);
        prop_assert!((i - mutual_information(&j.transpose())).abs() < 1e-12);
        let h_cond = conditional_entropy(&j);
        prop_assert!((h_cond - (joint_entropy(&j) - entropy(&j.col_marginal()))).abs() < 1e-10);
        prop_assert!((entropy(&j.row_marginal()) - h_cond - i).abs() < 1e-10);
        prop_assert!(i <= entropy(&j.row_marginal()).min(entropy(&j.col_marginal())) + 1e-10);
    }

    #[test]
    fn mutual_information_is_additive(a in sized_joint(3), b in sized_joint(3)) {
        let both = a.independent_product(&b);
        let sum = mutual_information(&a) + mutual_information(&b);
        prop_assert!((mutual_information(&both) - sum).abs() < 1e-10);
    }

    #[test]
    fn independence_gives_zero(p in positive_dist(4), q in positive_dist(5)) {
        prop_assert!(mutual_information(&JointDistribution::product(&p, &q)).abs() < 1e-12);
    }

    #[test]
    fn processing_messages_cannot_add_information(
        j in (1usize..5, 2usize..6).prop_flat_map(|(r, c)| joint(r, c)),
        i in 0usize..5,
        k in 0usize..5,
    ) {
        let (i, k) = (i % j.cols(), k % j.cols());
        prop_assume!(i != k);
        let merged = j.merge_cols(i, k).unwrap();
        prop_assert_eq!(merged.cols(), j.cols() - 1);
        prop_assert!(mutual_information(&merged) <= mutual_information(&j) + 1e-12);
    }

    #[test]
    fn conditional_information_matches_entropy_expansion(
        (dims, w) in (1usize..4, 1usize..4, 1usize..4).prop_flat_map(|(x, y, z)| {
            (Just([x, y, z]), prop::collection::vec(0.0f64..1.0, x * y * z))
        })
    ) {
        let s: f64 = w.iter().sum();
        prop_assume!(s > 0.0);
        let t: Vec<f64> = w.iter().map(|v| v / s).collect();
        let table = ThreeWayTable::new(dims, t.clone()).unwrap();
        let [nx, ny, nz] = dims;
        let at = |x: usize, y: usize, z: usize| t[(x * ny + y) * nz + z];
        let marg = |keep_x: bool, keep_y: bool| {
            let mut out = Vec::new();
            for x in 0..if keep_x { nx } else { 1 } {
                for y in 0..if keep_y { ny } else { 1 } {
                    for z in 0..nz {
                        let mut m = 0.0;
                        for xx in 0..nx {
                            for yy in 0..ny {
                                if (!keep_x || xx == x) && (!keep_y || yy == y) {
                                    m += at(xx, yy, z);
                                }
                            }
                        }
                        out.push(m);
                    }
                }
            }
            out
        };
        let oracle = plain_entropy(&marg(true, false)) + plain_entropy(&marg(false, true))
            - plain_entropy(&t) - plain_entropy(&marg(false, false));
        let cmi = conditional_mutual_information(&table);
        prop_assert!((cmi - oracle).abs() < 1e-10);
        prop_assert!(cmi >= -1e-12);
    }

    #[test]
    fn gaussian_entropy_scales(sigma in 1e-6f64..1e3, k in 0.1f64..10.0) {
        let d = gaussian_entropy(k * sigma).unwrap() - gaussian_entropy(sigma).unwrap();
        prop_assert!((d - k.log2()).abs() < 1e-10);
    }
}

#[test]
fn joint_from_conditionals_round_trips() {
    let prior = Distribution::new(vec![0.25, 0.75]).unwrap();
    let conds = vec![
        Distribution::new(vec![0.5, 0.5, 0.0]).unwrap(),
        Distribution::new(vec![0.1, 0.2, 0.7]).unwrap(),
    ];
    let j = JointDistribution::from_conditionals(&prior, &conds).unwrap();
    assert_eq!((j.rows(), j.cols()), (3, 2));
    for (m, c) in conds.iter().enumerate() {
        let back = j.row_conditional(m).unwrap();
        for (a, b) in back.probs().iter().zip(c.probs()) {
            assert!((a - b).abs() < 1e-15);
        }
    }
}
