mod common;

use common::*;
use praginfo::info::{entropy, mutual_information};
use praginfo::rates::*;
use praginfo::{Distribution, JointDistribution};
use proptest::prelude::*;

fn hidden_coupling(max_states: usize) -> impl Strategy<Value = CoupledSource> {
    (1..=max_states, 1usize..=2, 1usize..=3).prop_flat_map(|(s, a, m)| {
        (
            prop::collection::vec(positive_dist(s), s),
            prop::collection::vec(joint(a, m), s),
        )
            .prop_map(|(t, e)| CoupledSource::hidden(t, e).unwrap())
    })
}

/// `P(α-block, μ-block)` by summing over every hidden path.
fn brute_force_block(cs: &CoupledSource, n: usize) -> Vec<f64> {
    let (na, nm, ns) = (cs.alpha_size(), cs.mu_size(), cs.states());
    let a_count = na.pow(n as u32);
    let m_count = nm.pow(n as u32);
    let mut out = vec![0.0; a_count * m_count];
    for a in 0..a_count {
        for m in 0..m_count {
            let digit = |x: usize, base: usize, k: usize| (x / base.pow((n - 1 - k) as u32)) % base;
            let mut total = 0.0;
            for path in 0..ns.pow(n as u32) {
                let mut p = cs.initial().get(digit(path, ns, 0));
                for k in 0..n {
                    let s = digit(path, ns, k);
                    p *= cs.emission(s).get(digit(a, na, k), digit(m, nm, k));
                    if k + 1 < n {
                        p *= cs.transition(s).get(digit(path, ns, k + 1));
                    }
                }
                total += p;
            }
            out[a * m_count + m] = total;
        }
    }
    out
}

fn power_iteration(rows: &[Vec<f64>]) -> Vec<f64> {
    let n = rows.len();
    let mut pi = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let mut next = vec![0.0; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += pi[i] * rows[i][j];
            }
        }
        // Lazy step so periodic chains still converge.
        pi = pi.iter().zip(&next).map(|(a, b)| 0.5 * (a + b)).collect();
    }
    pi
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unroll_matches_hidden_path_sum(cs in hidden_coupling(3), n in 1usize..4) {
        let table = cs.unroll(n).unwrap();
        let oracle = brute_force_block(&cs, n);
        for (a, b) in table.probs().iter().zip(&oracle) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn chain_rule_and_bounds(cs in hidden_coupling(3)) {
        let est = pragmatic_rate_sequence(&cs, 5).unwrap();
        prop_assert!(est.diagnostics.cesaro_max_error < 1e-9);
        for (n, block) in &est.per_n {
            prop_assert!(*block >= -1e-12);
            let t = cs.unroll(*n).unwrap();
            let alpha_h = entropy(&t.to_joint().unwrap().row_marginal()) / *n as f64;
            prop_assert!(*block <= alpha_h + 1e-10);
        }
        for (_, inc) in &est.increments {
            prop_assert!(*inc >= -1e-12);
        }
    }

    #[test]
    fn fixed_message_terms_sum_to_block_information(cs in hidden_coupling(2), l in 1usize..4) {
        let horizon = 4;
        let d = monotone_increment_check(&cs, l, horizon).unwrap();
        let t = cs.unroll(horizon).unwrap();
        let (a_count, m_count) = (cs.alpha_size().pow(horizon as u32), cs.mu_size().pow(horizon as u32));
        let tail = cs.mu_size().pow((horizon - l) as u32);
        let cols = m_count / tail;
        let mut table = vec![0.0; a_count * cols];
        for a in 0..a_count {
            for m in 0..m_count {
                table[a * cols + m / tail] += t.probs()[a * m_count + m];
            }
        }
        let j = JointDistribution::new(a_count, cols, table).unwrap();
        let oracle = plain_entropy(&j.row_marginal().probs().to_vec())
            + plain_entropy(&j.col_marginal().probs().to_vec())
            - plain_entropy(j.table());
        prop_assert!((d.total - oracle).abs() < 1e-9);
        prop_assert!(d.terms.iter().all(|x| *x >= -1e-12));
    }

    #[test]
    fn stationary_law_matches_power_iteration(rows in (1usize..5).prop_flat_map(|n| prop::collection::vec(positive_dist(n), n))) {
        let r: Vec<Vec<f64>> = rows.iter().map(|d| d.probs().to_vec()).collect();
        let pi = stationary_distribution(&r).unwrap();
        for (a, b) in pi.iter().zip(power_iteration(&r)) {
            prop_assert!((a - b).abs() < 1e-9);
        }
    }
}

#[test]
fn canonical_couplings_have_known_rates() {
    let u = Distribution::uniform(2).unwrap();
    let cases = [
        (CoupledSource::independent(&u, &u), 0.0),
        (CoupledSource::identity(&u), 1.0),
        (CoupledSource::binary_symmetric(0.1).unwrap(), 1.0 - plain_entropy(&[0.1, 0.9])),
    ];
    for (cs, rate) in cases {
        let est = pragmatic_rate_sequence(&cs, 8).unwrap();
        for (_, b) in &est.per_n {
            assert!((b - rate).abs() < 1e-9);
        }
        assert!((ergodic_sample_rate(&cs, 50_000, 5).unwrap() - rate).abs() < 0.02);
    }
}

/// Identity coupling of a Markov chain: the rate is the entropy rate, and
/// block averages approach it from above.
#[test]
fn identity_of_markov_chain_gives_entropy_rate() {
    let flip = 0.2;
    let stay = Distribution::new(vec![1.0 - flip, flip]).unwrap();
    let swap = Distribution::new(vec![flip, 1.0 - flip]).unwrap();
    let emit = |s: usize| {
        let mut t = vec![0.0; 4];
        t[s * 2 + s] = 1.0;
        JointDistribution::new(2, 2, t).unwrap()
    };
    let cs = CoupledSource::hidden(vec![stay, swap], vec![emit(0), emit(1)]).unwrap();
    let h = exact_entropy_rate(&MarkovSource::binary_flip(flip).unwrap()).unwrap();
    assert!((h - plain_entropy(&[flip, 1.0 - flip])).abs() < 1e-12);
    let est = pragmatic_rate_sequence(&cs, 8).unwrap();
    assert!(est.diagnostics.block_nonincreasing);
    for w in est.increments.windows(2).skip(1) {
        assert!((w[1].1 - h).abs() < 1e-9);
    }
    assert!(est.per_n.last().unwrap().1 > h);
    assert!((ergodic_sample_rate(&cs, 50_000, 8).unwrap() - h).abs() < 0.02);
}

/// A Markov-modulated coupling where μ reveals α only in one regime.
#[test]
fn modulated_sample_rate_matches_exact_increments() {
    let t = vec![
        Distribution::new(vec![0.9, 0.1]).unwrap(),
        Distribution::new(vec![0.3, 0.7]).unwrap(),
    ];
    let noisy = JointDistribution::product(&Distribution::uniform(2).unwrap(), &Distribution::uniform(2).unwrap());
    let exact = JointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap();
    let cs = CoupledSource::hidden(t, vec![noisy, exact]).unwrap();
    let est = pragmatic_rate_sequence(&cs, 10).unwrap();
    assert!(est.diagnostics.cesaro_max_error < 1e-9);
    let limit = est.limit_estimate;
    let sampled = ergodic_sample_rate(&cs, 100_000, 21).unwrap();
    assert!((sampled - limit).abs() < 0.02, "{sampled} vs {limit}");
    let d = monotone_increment_check(&cs, 3, 10).unwrap();
    assert!(d.terms.last().unwrap().abs() < 1e-3);
    let j = cs.unroll(1).unwrap().to_joint().unwrap();
    assert!((est.per_n[0].1 - mutual_information(&j)).abs() < 1e-12);
}

#[test]
fn horizon_cap_is_enforced() {
    let cs = CoupledSource::binary_symmetric(0.1).unwrap();
    assert!(matches!(
        pragmatic_rate_sequence(&cs, 13),
        Err(praginfo::Error::HorizonTooLarge { .. })
    ));
}
