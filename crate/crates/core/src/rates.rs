//! Entropy and mutual-information rates of stationary finite-state sources.
//!
//! Two routes are provided and meant to be checked against each other:
//! exact unrolling of the joint law over short blocks (full tables, capped at
//! [`MAX_TABLE_ENTRIES`]) and single-path Monte Carlo estimates driven by
//! exact forward filtering.

use rand::Rng;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{self, Distribution, JointDistribution, ThreeWayTable};
use crate::par::stream_rng;

/// Largest joint table the exact routes will materialize.
pub const MAX_TABLE_ENTRIES: u128 = 1 << 24;

/// Unique stationary distribution of a row-stochastic matrix given as rows.
///
/// Fails unless the chain has exactly one closed communicating class.
pub fn stationary_distribution(rows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty transition matrix".into()));
    }
    let reach: Vec<Vec<bool>> = (0..n).map(|s| reachable(rows, s)).collect();
    let mut closed_classes = Vec::new();
    for v in 0..n {
        let closed = (0..n).all(|w| !reach[v][w] || reach[w][v]);
        if closed && !closed_classes.iter().any(|&c: &usize| reach[c][v]) {
            closed_classes.push(v);
        }
    }
    if closed_classes.len() != 1 {
        return Err(Error::Reducible(format!(
            "{} closed classes; the stationary distribution is not unique",
            closed_classes.len()
        )));
    }

    // Solve π (P - I) = 0 with the last balance equation replaced by Σ π = 1.
    let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = rows[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut rhs = nalgebra::DVector::<f64>::zeros(n);
    rhs[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular stationary system".into()))?;
    Ok(pi.iter().map(|&p| p.max(0.0)).collect())
}

fn reachable(rows: &[Vec<f64>], start: usize) -> Vec<bool> {
    let mut seen = vec![false; rows.len()];
    let mut stack = vec![start];
    seen[start] = true;
    while let Some(s) = stack.pop() {
        for (t, &p) in rows[s].iter().enumerate() {
            if p > 0.0 && !seen[t] {
                seen[t] = true;
                stack.push(t);
            }
        }
    }
    seen
}

/// Markov source of a fixed order over `alphabet` symbols.
///
/// A context is the last `order` symbols, oldest most significant, encoded in
/// base `alphabet`. An order-0 source has the single empty context.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovSource {
    alphabet: usize,
    order: usize,
    transitions: Vec<Distribution>,
    initial: Distribution,
}

impl MarkovSource {
    pub fn new(
        alphabet: usize,
        order: usize,
        transitions: Vec<Distribution>,
        initial: Distribution,
    ) -> Result<Self> {
        let contexts = context_count(alphabet, order)?;
        if transitions.len() != contexts {
            return Err(Error::DimensionMismatch {
                expected: contexts,
                actual: transitions.len(),
            });
        }
        if let Some(row) = transitions.iter().find(|r| r.len() != alphabet) {
            return Err(Error::DimensionMismatch {
                expected: alphabet,
                actual: row.len(),
            });
        }
        if initial.len() != contexts {
            return Err(Error::DimensionMismatch {
                expected: contexts,
                actual: initial.len(),
            });
        }
        Ok(Self {
            alphabet,
            order,
            transitions,
            initial,
        })
    }

    /// Source started from its stationary context distribution.
    pub fn stationary(alphabet: usize, order: usize, transitions: Vec<Distribution>) -> Result<Self> {
        let contexts = context_count(alphabet, order)?;
        let placeholder = Distribution::uniform(contexts)?;
        let mut src = Self::new(alphabet, order, transitions, placeholder)?;
        src.initial = Distribution::new(src.stationary_contexts()?)?;
        Ok(src)
    }

    pub fn iid(p: Distribution) -> Self {
        Self {
            alphabet: p.len(),
            order: 0,
            transitions: vec![p],
            initial: Distribution::degenerate(1, 0).expect("single context"),
        }
    }

    /// First-order binary chain that flips state with probability `flip`.
    pub fn binary_flip(flip: f64) -> Result<Self> {
        let rows = vec![
            Distribution::new(vec![1.0 - flip, flip])?,
            Distribution::new(vec![flip, 1.0 - flip])?,
        ];
        Self::stationary(2, 1, rows)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn contexts(&self) -> usize {
        self.transitions.len()
    }

    pub fn transition(&self, context: usize) -> &Distribution {
        &self.transitions[context]
    }

    pub fn initial(&self) -> &Distribution {
        &self.initial
    }

    pub fn next_context(&self, context: usize, symbol: usize) -> usize {
        if self.order == 0 {
            0
        } else {
            (context * self.alphabet + symbol) % self.contexts()
        }
    }

    /// Stationary distribution over contexts.
    pub fn stationary_contexts(&self) -> Result<Vec<f64>> {
        let n = self.contexts();
        let mut rows = vec![vec![0.0; n]; n];
        for (c, row) in rows.iter_mut().enumerate() {
            for x in 0..self.alphabet {
                row[self.next_context(c, x)] += self.transitions[c].get(x);
            }
        }
        stationary_distribution(&rows)
    }

    /// Draws `n` symbols: the initial context supplies the first `order`
    /// symbols, the transitions the rest.
    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<usize> {
        let samplers: Vec<WeightedIndex<f64>> = self
            .transitions
            .iter()
            .map(|d| WeightedIndex::new(d.probs()).expect("valid distribution"))
            .collect();
        let init = WeightedIndex::new(self.initial.probs()).expect("valid distribution");
        let mut context = init.sample(rng);
        let mut out = Vec::with_capacity(n);
        let mut digits = context_digits(context, self.alphabet, self.order);
        digits.truncate(n);
        out.extend(digits);
        while out.len() < n {
            let x = samplers[context].sample(rng);
            out.push(x);
            context = self.next_context(context, x);
        }
        out
    }

    /// `log₂` probability of `seq` under the source, or an error naming the
    /// first symbol that is out of range or has zero probability.
    pub fn log2_likelihood(&self, seq: &[usize]) -> Result<f64> {
        for (position, &symbol) in seq.iter().enumerate() {
            if symbol >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    symbol,
                    position,
                    alphabet: self.alphabet,
                });
            }
        }
        let k = self.order.min(seq.len());
        // Prefix mass: contexts whose leading digits match the first k symbols.
        let prefix = seq[..k]
            .iter()
            .fold(0usize, |acc, &x| acc * self.alphabet + x);
        let span = self.alphabet.pow((self.order - k) as u32);
        let mass: f64 = (prefix * span..(prefix + 1) * span)
            .map(|c| self.initial.get(c))
            .sum();
        if mass <= 0.0 {
            return Err(Error::ZeroProbability { position: 0 });
        }
        let mut total = mass.log2();
        if seq.len() <= self.order {
            return Ok(total);
        }
        let mut context = prefix;
        for (position, &x) in seq.iter().enumerate().skip(self.order) {
            let p = self.transitions[context].get(x);
            if p <= 0.0 {
                return Err(Error::ZeroProbability { position });
            }
            total += p.log2();
            context = self.next_context(context, x);
        }
        Ok(total)
    }
}

fn context_count(alphabet: usize, order: usize) -> Result<usize> {
    if alphabet == 0 {
        return Err(Error::InvalidParameter("empty alphabet".into()));
    }
    match alphabet.checked_pow(order as u32) {
        Some(n) if (n as u128) <= MAX_TABLE_ENTRIES => Ok(n),
        _ => Err(Error::InvalidParameter(format!(
            "order {order} over {alphabet} symbols has too many contexts"
        ))),
    }
}

fn context_digits(mut context: usize, alphabet: usize, order: usize) -> Vec<usize> {
    let mut digits = vec![0; order];
    for d in digits.iter_mut().rev() {
        *d = context % alphabet;
        context /= alphabet;
    }
    digits
}

/// `Σ_c π(c) H(P(·|c))` for the stationary context distribution `π`.
pub fn exact_entropy_rate(src: &MarkovSource) -> Result<f64> {
    let pi = src.stationary_contexts()?;
    Ok(pi
        .iter()
        .zip(&src.transitions)
        .map(|(w, row)| w * info::entropy(row))
        .sum())
}

/// Stationary pair process `(αₙ, μₙ)` driven by a hidden finite Markov chain.
///
/// Each step the hidden state emits a pair from its joint emission table
/// (rows α, columns μ) and then moves. The chain starts in its stationary
/// distribution, so the pair process is stationary; a unique stationary
/// distribution makes it ergodic.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSource {
    transition: Vec<Distribution>,
    emission: Vec<JointDistribution>,
    initial: Distribution,
    alpha_size: usize,
    mu_size: usize,
}

impl CoupledSource {
    pub fn hidden(transition: Vec<Distribution>, emission: Vec<JointDistribution>) -> Result<Self> {
        let n = transition.len();
        if n == 0 {
            return Err(Error::InvalidParameter("no hidden states".into()));
        }
        if emission.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: emission.len(),
            });
        }
        if let Some(row) = transition.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: row.len(),
            });
        }
        let (alpha_size, mu_size) = (emission[0].rows(), emission[0].cols());
        if emission
            .iter()
            .any(|e| e.rows() != alpha_size || e.cols() != mu_size)
        {
            return Err(Error::InvalidParameter(
                "emission tables have differing shapes".into(),
            ));
        }
        let rows: Vec<Vec<f64>> = transition.iter().map(|d| d.probs().to_vec()).collect();
        let initial = Distribution::new(stationary_distribution(&rows)?)?;
        Ok(Self {
            transition,
            emission,
            initial,
            alpha_size,
            mu_size,
        })
    }

    /// i.i.d. pairs drawn from `joint`.
    pub fn iid(joint: JointDistribution) -> Self {
        Self {
            alpha_size: joint.rows(),
            mu_size: joint.cols(),
            transition: vec![Distribution::degenerate(1, 0).expect("one state")],
            emission: vec![joint],
            initial: Distribution::degenerate(1, 0).expect("one state"),
        }
    }

    /// First-order Markov chain on the pairs themselves; `transition[s]` is
    /// the next-pair distribution from pair `s = a * |M| + m`.
    pub fn pair_chain(alpha_size: usize, mu_size: usize, transition: Vec<Distribution>) -> Result<Self> {
        let n = alpha_size * mu_size;
        let emission = (0..n)
            .map(|s| {
                let mut t = vec![0.0; n];
                t[s] = 1.0;
                JointDistribution::new(alpha_size, mu_size, t)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::hidden(transition, emission)
    }

    /// α i.i.d. from `p_alpha`, μ i.i.d. from `p_mu`, independent of α.
    pub fn independent(p_alpha: &Distribution, p_mu: &Distribution) -> Self {
        Self::iid(JointDistribution::product(p_alpha, p_mu))
    }

    /// μₙ = αₙ with α i.i.d. from `p`.
    pub fn identity(p: &Distribution) -> Self {
        let n = p.len();
        let mut t = vec![0.0; n * n];
        for a in 0..n {
            t[a * n + a] = p.get(a);
        }
        Self::iid(JointDistribution::new(n, n, t).expect("diagonal of a distribution"))
    }

    /// Uniform binary α; μ is α flipped with probability `flip`.
    pub fn binary_symmetric(flip: f64) -> Result<Self> {
        Ok(Self::iid(JointDistribution::from_rows(&[
            vec![0.5 * (1.0 - flip), 0.5 * flip],
            vec![0.5 * flip, 0.5 * (1.0 - flip)],
        ])?))
    }

    pub fn alpha_size(&self) -> usize {
        self.alpha_size
    }

    pub fn mu_size(&self) -> usize {
        self.mu_size
    }

    pub fn states(&self) -> usize {
        self.transition.len()
    }

    pub fn initial(&self) -> &Distribution {
        &self.initial
    }

    pub fn transition(&self, state: usize) -> &Distribution {
        &self.transition[state]
    }

    pub fn emission(&self, state: usize) -> &JointDistribution {
        &self.emission[state]
    }

    /// Exact joint law of `(α₁..αₙ, μ₁..μₙ)`.
    pub fn unroll(&self, n: usize) -> Result<BlockTable> {
        if n == 0 {
            return Err(Error::InvalidParameter("block length must be positive".into()));
        }
        let pair = (self.alpha_size * self.mu_size) as u128;
        let entries = pair.checked_pow(n as u32).unwrap_or(u128::MAX);
        if entries > MAX_TABLE_ENTRIES {
            return Err(Error::HorizonTooLarge {
                entries,
                limit: MAX_TABLE_ENTRIES,
            });
        }
        let a_count = self.alpha_size.pow(n as u32);
        let m_count = self.mu_size.pow(n as u32);
        let mut probs = vec![0.0; a_count * m_count];
        let mut forward = self.initial.probs().to_vec();
        self.fill(n, 0, 0, &mut forward, m_count, &mut probs);
        Ok(BlockTable {
            n,
            alpha_size: self.alpha_size,
            mu_size: self.mu_size,
            probs,
        })
    }

    // `forward[s]` is Pr(prefix, hidden state at the next emission = s).
    fn fill(
        &self,
        remaining: usize,
        a_idx: usize,
        m_idx: usize,
        forward: &mut [f64],
        m_count: usize,
        out: &mut [f64],
    ) {
        let states = self.states();
        let mut emitted = vec![0.0; states];
        for a in 0..self.alpha_size {
            for m in 0..self.mu_size {
                let mut mass = 0.0;
                for s in 0..states {
                    emitted[s] = forward[s] * self.emission[s].get(a, m);
                    mass += emitted[s];
                }
                let (na, nm) = (a_idx * self.alpha_size + a, m_idx * self.mu_size + m);
                if remaining == 1 {
                    out[na * m_count + nm] = mass;
                    continue;
                }
                if mass <= 0.0 {
                    continue;
                }
                let mut next = vec![0.0; states];
                for (s, &w) in emitted.iter().enumerate() {
                    if w > 0.0 {
                        for (t, nx) in next.iter_mut().enumerate() {
                            *nx += w * self.transition[s].get(t);
                        }
                    }
                }
                self.fill(remaining - 1, na, nm, &mut next, m_count, out);
            }
        }
    }

    /// Simulates `n` steps from the stationary start.
    pub fn sample_path<R: Rng>(&self, n: usize, rng: &mut R) -> (Vec<usize>, Vec<usize>) {
        let moves: Vec<WeightedIndex<f64>> = self
            .transition
            .iter()
            .map(|d| WeightedIndex::new(d.probs()).expect("valid distribution"))
            .collect();
        let emits: Vec<WeightedIndex<f64>> = self
            .emission
            .iter()
            .map(|e| WeightedIndex::new(e.table()).expect("valid joint"))
            .collect();
        let mut state = WeightedIndex::new(self.initial.probs())
            .expect("valid distribution")
            .sample(rng);
        let mut alphas = Vec::with_capacity(n);
        let mut mus = Vec::with_capacity(n);
        for _ in 0..n {
            let cell = emits[state].sample(rng);
            alphas.push(cell / self.mu_size);
            mus.push(cell % self.mu_size);
            state = moves[state].sample(rng);
        }
        (alphas, mus)
    }

    /// `log₂` likelihood of an observation path by scaled forward filtering.
    /// `emit(s, n)` is the probability that state `s` produces the `n`-th
    /// observation.
    fn log2_likelihood(&self, len: usize, emit: impl Fn(usize, usize) -> f64) -> Result<f64> {
        let states = self.states();
        let mut forward = self.initial.probs().to_vec();
        let mut next = vec![0.0; states];
        let mut total = 0.0;
        for n in 0..len {
            let mut mass = 0.0;
            for (s, f) in forward.iter_mut().enumerate() {
                *f *= emit(s, n);
                mass += *f;
            }
            if mass <= 0.0 {
                return Err(Error::ZeroProbability { position: n });
            }
            total += mass.log2();
            next.iter_mut().for_each(|x| *x = 0.0);
            for (s, &f) in forward.iter().enumerate() {
                if f > 0.0 {
                    let w = f / mass;
                    for (t, nx) in next.iter_mut().enumerate() {
                        *nx += w * self.transition[s].get(t);
                    }
                }
            }
            std::mem::swap(&mut forward, &mut next);
        }
        Ok(total)
    }
}

/// Exact probabilities of all length-`n` blocks. Cell `(a, m)` holds the
/// α-block with index `a` (α₁ most significant) and μ-block `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTable {
    n: usize,
    alpha_size: usize,
    mu_size: usize,
    probs: Vec<f64>,
}

impl BlockTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn a_count(&self) -> usize {
        self.alpha_size.pow(self.n as u32)
    }

    fn m_count(&self) -> usize {
        self.mu_size.pow(self.n as u32)
    }

    pub fn to_joint(&self) -> Result<JointDistribution> {
        JointDistribution::new(self.a_count(), self.m_count(), self.probs.clone())
    }

    /// Marginalizes onto `(x, y, z)` through index maps from `(a, m)`.
    pub fn project(
        &self,
        dims: [usize; 3],
        map: impl Fn(usize, usize) -> (usize, usize, usize),
    ) -> ThreeWayTable {
        let [_, ny, nz] = dims;
        let mut table = vec![0.0; dims.iter().product()];
        let m_count = self.m_count();
        for a in 0..self.a_count() {
            for m in 0..m_count {
                let p = self.probs[a * m_count + m];
                if p > 0.0 {
                    let (x, y, z) = map(a, m);
                    table[(x * ny + y) * nz + z] += p;
                }
            }
        }
        ThreeWayTable::from_raw(dims, table)
    }

    /// `I(α₁..αₙ; μₖ | μ₁..μₖ₋₁)` for `1 ≤ k ≤ n`.
    pub fn streaming_term(&self, k: usize) -> f64 {
        let tail = self.mu_size.pow((self.n - k) as u32);
        let prefix = self.mu_size.pow((k - 1) as u32);
        let mu = self.mu_size;
        let t = self.project([self.a_count(), mu, prefix], |a, m| {
            (a, (m / tail) % mu, m / (tail * mu))
        });
        info::conditional_mutual_information(&t)
    }

    /// `I(αₖ; μ₁..μ_L | α₁..αₖ₋₁)` for `1 ≤ k ≤ n`, `1 ≤ L ≤ n`.
    pub fn fixed_message_term(&self, k: usize, message_len: usize) -> f64 {
        let al = self.alpha_size;
        let a_tail = al.pow((self.n - k) as u32);
        let m_tail = self.mu_size.pow((self.n - message_len) as u32);
        let t = self.project(
            [
                al,
                self.mu_size.pow(message_len as u32),
                al.pow((k - 1) as u32),
            ],
            |a, m| ((a / a_tail) % al, m / m_tail, a / (a_tail * al)),
        );
        info::conditional_mutual_information(&t)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateDiagnostics {
    /// Largest `|Σₖ termₙ,ₖ / n − blockₙ|` over all n (chain-rule residual).
    pub cesaro_max_error: f64,
    /// `|block − increment|` at the horizon.
    pub final_gap: f64,
    pub increments_nonincreasing: bool,
    pub block_nonincreasing: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Block averages `I(α₁..αₙ; μ₁..μₙ) / n`.
    pub per_n: Vec<(usize, f64)>,
    /// Streaming increments `I(α₁..αₙ; μₙ | μ₁..μₙ₋₁)`.
    pub increments: Vec<(usize, f64)>,
    pub limit_estimate: f64,
    pub diagnostics: RateDiagnostics,
}

const MONOTONE_TOL: f64 = 1e-12;

fn non_increasing(values: impl IntoIterator<Item = f64>) -> bool {
    let v: Vec<f64> = values.into_iter().collect();
    v.windows(2).all(|w| w[1] <= w[0] + MONOTONE_TOL)
}

/// Exact block averages and streaming increments for `n = 1..=horizon`.
///
/// Each block average is computed directly from the unrolled table, and
/// independently as the chain-rule sum of conditional terms, so the
/// diagnostics carry the chain-rule residual.
pub fn pragmatic_rate_sequence(cs: &CoupledSource, horizon: usize) -> Result<RateEstimate> {
    if horizon == 0 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    // Fail fast before any work if the last table will not fit.
    let pair = (cs.alpha_size * cs.mu_size) as u128;
    let entries = pair.checked_pow(horizon as u32).unwrap_or(u128::MAX);
    if entries > MAX_TABLE_ENTRIES {
        return Err(Error::HorizonTooLarge {
            entries,
            limit: MAX_TABLE_ENTRIES,
        });
    }
    let mut per_n = Vec::with_capacity(horizon);
    let mut increments = Vec::with_capacity(horizon);
    let mut cesaro_max_error: f64 = 0.0;
    for n in 1..=horizon {
        let table = cs.unroll(n)?;
        let block = info::mutual_information(&table.to_joint()?) / n as f64;
        let terms: Vec<f64> = (1..=n).map(|k| table.streaming_term(k)).collect();
        let chain = terms.iter().sum::<f64>() / n as f64;
        cesaro_max_error = cesaro_max_error.max((chain - block).abs());
        per_n.push((n, block));
        increments.push((n, terms[n - 1]));
    }
    let (_, last_block) = per_n[horizon - 1];
    let (_, last_inc) = increments[horizon - 1];
    Ok(RateEstimate {
        diagnostics: RateDiagnostics {
            cesaro_max_error,
            final_gap: (last_block - last_inc).abs(),
            increments_nonincreasing: non_increasing(increments.iter().map(|x| x.1)),
            block_nonincreasing: non_increasing(per_n.iter().map(|x| x.1)),
        },
        limit_estimate: last_inc,
        per_n,
        increments,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonotoneDiagnostic {
    /// `I(αₖ; μ₁..μ_L | α₁..αₖ₋₁)` for `k = 1..=horizon`.
    pub terms: Vec<f64>,
    pub non_increasing: bool,
    /// Largest step-to-step rise (0 when non-increasing).
    pub max_increase: f64,
    /// `Σₖ termₖ`, which equals `I(α₁..α_horizon; μ₁..μ_L)`.
    pub total: f64,
}

/// Conditional information each new action carries about a fixed message
/// block of length `message_len`.
pub fn monotone_increment_check(
    cs: &CoupledSource,
    message_len: usize,
    horizon: usize,
) -> Result<MonotoneDiagnostic> {
    if message_len == 0 || horizon == 0 {
        return Err(Error::InvalidParameter(
            "message length and horizon must be positive".into(),
        ));
    }
    let table = cs.unroll(horizon.max(message_len))?;
    let terms: Vec<f64> = (1..=horizon)
        .map(|k| table.fixed_message_term(k, message_len))
        .collect();
    let max_increase = terms
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0f64, f64::max);
    Ok(MonotoneDiagnostic {
        non_increasing: non_increasing(terms.iter().copied()),
        max_increase,
        total: terms.iter().sum(),
        terms,
    })
}

/// Single-path estimate `(1/n) log₂[P(α, μ) / (P(α) P(μ))]` with all three
/// likelihoods from exact forward filtering.
pub fn ergodic_sample_rate(cs: &CoupledSource, n: usize, seed: u64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidParameter("path length must be positive".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let (alphas, mus) = cs.sample_path(n, &mut rng);
    sample_rate_of_path(cs, &alphas, &mus)
}

/// The log-likelihood-ratio rate of a given path.
pub fn sample_rate_of_path(cs: &CoupledSource, alphas: &[usize], mus: &[usize]) -> Result<f64> {
    if alphas.len() != mus.len() {
        return Err(Error::DimensionMismatch {
            expected: alphas.len(),
            actual: mus.len(),
        });
    }
    let n = alphas.len();
    let alpha_marg: Vec<Vec<f64>> = cs
        .emission
        .iter()
        .map(|e| e.row_marginal().probs().to_vec())
        .collect();
    let mu_marg: Vec<Vec<f64>> = cs
        .emission
        .iter()
        .map(|e| e.col_marginal().probs().to_vec())
        .collect();
    let joint = cs.log2_likelihood(n, |s, k| cs.emission[s].get(alphas[k], mus[k]))?;
    let pa = cs.log2_likelihood(n, |s, k| alpha_marg[s][alphas[k]])?;
    let pm = cs.log2_likelihood(n, |s, k| mu_marg[s][mus[k]])?;
    Ok((joint - pa - pm) / n as f64)
}
