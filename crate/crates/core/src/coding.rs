//! Prefix-code lengths and the noiseless / wrong-code bounds.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{self, Distribution, JointDistribution};
use crate::rates::MarkovSource;

const KRAFT_TOL: f64 = 1e-12;
const BOUND_TOL: f64 = 1e-9;

/// Codeword lengths of a prefix code, one per symbol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CodeLengths(Vec<u32>);

impl CodeLengths {
    pub fn new(lengths: Vec<u32>) -> Result<Self> {
        if lengths.is_empty() {
            return Err(Error::InvalidParameter("no codewords".into()));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidParameter("codeword lengths must be positive".into()));
        }
        let code = Self(lengths);
        let kraft = code.kraft_sum();
        if kraft > 1.0 + KRAFT_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraft sum {kraft} exceeds 1"
            )));
        }
        Ok(code)
    }

    pub fn lengths(&self) -> &[u32] {
        &self.0
    }

    pub fn kraft_sum(&self) -> f64 {
        self.0.iter().map(|&l| (-(l as f64)).exp2()).sum()
    }

    pub fn expected_length(&self, p: &Distribution) -> Result<f64> {
        if p.len() != self.0.len() {
            return Err(Error::DimensionMismatch {
                expected: self.0.len(),
                actual: p.len(),
            });
        }
        Ok(p.probs()
            .iter()
            .zip(&self.0)
            .map(|(pi, &l)| pi * l as f64)
            .sum())
    }

    /// Canonical codewords: symbols sorted by (length, index) receive
    /// consecutive binary values.
    pub fn canonical_codewords(&self) -> Vec<String> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by_key(|&i| (self.0[i], i));
        let mut words = vec![String::new(); self.0.len()];
        let mut code: u128 = 0;
        let mut prev_len = self.0[order[0]];
        for (rank, &i) in order.iter().enumerate() {
            let len = self.0[i];
            if rank > 0 {
                code = (code + 1) << (len - prev_len);
            }
            prev_len = len;
            words[i] = format!("{code:0width$b}", width = len as usize);
        }
        words
    }
}

/// `⌈−log₂ q⌉`, at least 1. Values within 1e-12 of an integer snap to it so
/// dyadic probabilities survive rounding noise.
fn shannon_length(q: f64) -> u32 {
    let raw = -q.log2();
    let nearest = raw.round();
    let l = if (raw - nearest).abs() < 1e-12 {
        nearest
    } else {
        raw.ceil()
    };
    (l as u32).max(1)
}

/// Shannon code lengths `⌈−log₂ qᵢ⌉`.
pub fn shannon_lengths(q: &Distribution) -> Result<CodeLengths> {
    if let Some(i) = q.probs().iter().position(|&x| x <= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "symbol {i} has zero probability and no Shannon codeword"
        )));
    }
    Ok(CodeLengths(q.probs().iter().map(|&x| shannon_length(x)).collect()))
}

#[derive(Debug, PartialEq)]
struct Node {
    weight: f64,
    // Smallest symbol index in the subtree; breaks weight ties.
    key: usize,
    id: usize,
}

impl Eq for Node {}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        // Reverse for a min-heap on (weight, key).
        other
            .weight
            .total_cmp(&self.weight)
            .then_with(|| other.key.cmp(&self.key))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Lengths of an optimal (Huffman) prefix code. A single-symbol alphabet
/// gets one 1-bit codeword.
pub fn huffman_lengths(q: &Distribution) -> CodeLengths {
    let n = q.len();
    if n == 1 {
        return CodeLengths(vec![1]);
    }
    let mut parent: Vec<usize> = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Node> = (0..n)
        .map(|i| Node {
            weight: q.get(i),
            key: i,
            id: i,
        })
        .collect();
    let mut next = n;
    while heap.len() > 1 {
        let a = heap.pop().expect("two nodes");
        let b = heap.pop().expect("two nodes");
        parent[a.id] = next;
        parent[b.id] = next;
        heap.push(Node {
            weight: a.weight + b.weight,
            key: a.key.min(b.key),
            id: next,
        });
        next += 1;
    }
    let root = next - 1;
    let lengths = (0..n)
        .map(|i| {
            let mut depth = 0;
            let mut node = i;
            while node != root {
                node = parent[node];
                depth += 1;
            }
            depth
        })
        .collect();
    CodeLengths(lengths)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CodeBounds {
    pub expected_length: f64,
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
}

impl CodeBounds {
    fn new(expected_length: f64, lower: f64) -> Self {
        let upper = lower + 1.0;
        let holds = lower <= expected_length + BOUND_TOL && expected_length <= upper + BOUND_TOL;
        debug_assert!(holds, "code bounds violated: {lower} <= {expected_length} <= {upper}");
        Self {
            expected_length,
            lower,
            upper,
            holds,
        }
    }
}

/// `E_p[ℓ]` for the Shannon code of `q`, summing only over the support of
/// `p`; errors if `q` misses any of it.
fn expected_shannon_length(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            expected: q.len(),
            actual: p.len(),
        });
    }
    let mut total = 0.0;
    for i in p.support() {
        if q.get(i) <= 0.0 {
            return Err(Error::SupportViolation { index: i });
        }
        total += p.get(i) * shannon_length(q.get(i)) as f64;
    }
    Ok(total)
}

/// Expected Shannon-code length when `p`-distributed symbols are coded with
/// the code built for `q`, against `H(p) + D(p‖q) ≤ E ≤ H(p) + D(p‖q) + 1`.
pub fn wrong_code_gap(p: &Distribution, q: &Distribution) -> Result<CodeBounds> {
    let expected = expected_shannon_length(p, q)?;
    let lower = info::entropy(p) + info::relative_entropy(p, q)?;
    Ok(CodeBounds::new(expected, lower))
}

/// Side message prior `φ` and the action distribution given each message.
#[derive(Debug, Clone, PartialEq)]
pub struct SideMessageEnsemble {
    prior: Distribution,
    conditionals: Vec<Distribution>,
}

impl SideMessageEnsemble {
    pub fn new(prior: Distribution, conditionals: Vec<Distribution>) -> Result<Self> {
        if conditionals.len() != prior.len() {
            return Err(Error::DimensionMismatch {
                expected: prior.len(),
                actual: conditionals.len(),
            });
        }
        let alphabet = conditionals[0].len();
        if let Some(c) = conditionals.iter().find(|c| c.len() != alphabet) {
            return Err(Error::DimensionMismatch {
                expected: alphabet,
                actual: c.len(),
            });
        }
        Ok(Self {
            prior,
            conditionals,
        })
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn conditionals(&self) -> &[Distribution] {
        &self.conditionals
    }

    pub fn alphabet(&self) -> usize {
        self.conditionals[0].len()
    }

    /// Joint table with actions on rows and messages on columns.
    pub fn joint(&self) -> JointDistribution {
        JointDistribution::from_conditionals(&self.prior, &self.conditionals)
            .expect("validated ensemble")
    }

    /// Unconditional action distribution `Σ_m φ(m) P(·|m)`.
    pub fn marginal(&self) -> Distribution {
        self.joint().row_marginal()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PragmaticCodeBounds {
    pub expected_length: f64,
    /// `Σ_m φ(m) [H(P_m) + D(P_m‖q)]`.
    pub lower: f64,
    pub upper: f64,
    pub holds: bool,
    /// `H(α|μ)`.
    pub conditional_entropy: f64,
    /// `I(α;μ)`.
    pub pragmatic_information: f64,
    /// `D(P‖q)` for the unconditional `P`; zero when `q` is that marginal.
    pub mismatch: f64,
}

/// The wrong-code sandwich averaged over side messages, coding every message
/// with the Shannon code for `q`.
///
/// `lower = H(α|μ) + I(α;μ) + D(P‖q)`; on the right-hand side only the last
/// term depends on `q`, and it vanishes when `q` is the unconditional law.
pub fn pragmatic_wrong_code_gap(e: &SideMessageEnsemble, q: &Distribution) -> Result<PragmaticCodeBounds> {
    if q.len() != e.alphabet() {
        return Err(Error::DimensionMismatch {
            expected: e.alphabet(),
            actual: q.len(),
        });
    }
    let mut expected = 0.0;
    let mut lower = 0.0;
    for (m, cond) in e.conditionals.iter().enumerate() {
        let w = e.prior.get(m);
        if w <= 0.0 {
            continue;
        }
        expected += w * expected_shannon_length(cond, q)?;
        lower += w * (info::entropy(cond) + info::relative_entropy(cond, q)?);
    }
    let joint = e.joint();
    let b = CodeBounds::new(expected, lower);
    Ok(PragmaticCodeBounds {
        expected_length: b.expected_length,
        lower: b.lower,
        upper: b.upper,
        holds: b.holds,
        conditional_entropy: info::conditional_entropy(&joint),
        pragmatic_information: info::mutual_information(&joint),
        mismatch: info::relative_entropy(&joint.row_marginal(), q)?,
    })
}

/// Probability model used to assign ideal code lengths.
#[derive(Debug, Clone, PartialEq)]
pub enum CodingModel {
    Iid(Distribution),
    Markov(MarkovSource),
}

impl CodingModel {
    pub fn alphabet(&self) -> usize {
        match self {
            CodingModel::Iid(d) => d.len(),
            CodingModel::Markov(m) => m.alphabet(),
        }
    }
}

/// Ideal code length per symbol, `−(1/N) log₂ P(sequence)`, under `model`.
pub fn empirical_code_rate(sequence: &[usize], model: &CodingModel) -> Result<f64> {
    if sequence.is_empty() {
        return Err(Error::InvalidParameter("empty sequence".into()));
    }
    let log2p = match model {
        CodingModel::Iid(d) => {
            let mut total = 0.0;
            for (position, &x) in sequence.iter().enumerate() {
                if x >= d.len() {
                    return Err(Error::SymbolOutOfRange {
                        symbol: x,
                        position,
                        alphabet: d.len(),
                    });
                }
                let p = d.get(x);
                if p <= 0.0 {
                    return Err(Error::ZeroProbability { position });
                }
                total += p.log2();
            }
            total
        }
        CodingModel::Markov(src) => src.log2_likelihood(sequence)?,
    };
    Ok(-log2p / sequence.len() as f64)
}
