//! Horse races, side information and log-optimal portfolios.
//!
//! A race pays `Rᵢ` per unit bet on the winning horse. The take
//! `T = Σ 1/Rₖ` and track probabilities `qᵢ = 1/(Rᵢ T)` give the growth
//! decomposition `Σ pᵢ log₂(bᵢRᵢ) = D(p‖q) − D(p‖b) − log₂T`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{self, Distribution, JointDistribution};
use crate::par::{self, stream_rng, Execution};

/// Tolerance for the analytic identities checked inside this module.
pub const IDENTITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaceSpec {
    payoffs: Vec<f64>,
    take: f64,
    track: Distribution,
}

/// Builds a race from per-unit payoffs.
pub fn make_race(payoffs: &[f64]) -> Result<RaceSpec> {
    if payoffs.is_empty() {
        return Err(Error::InvalidParameter("race needs at least one horse".into()));
    }
    if let Some(r) = payoffs.iter().find(|r| !(**r > 0.0) || !r.is_finite()) {
        return Err(Error::InvalidParameter(format!("payoff {r} must be positive")));
    }
    let take: f64 = payoffs.iter().map(|r| 1.0 / r).sum();
    let track = Distribution::new(payoffs.iter().map(|r| 1.0 / (r * take)).collect())?;
    Ok(RaceSpec {
        payoffs: payoffs.to_vec(),
        take,
        track,
    })
}

impl RaceSpec {
    /// Race with payoff `M` on each of `M` horses.
    pub fn even_odds(horses: usize) -> Result<Self> {
        make_race(&vec![horses as f64; horses])
    }

    pub fn payoffs(&self) -> &[f64] {
        &self.payoffs
    }

    pub fn take(&self) -> f64 {
        self.take
    }

    pub fn track_probs(&self) -> &Distribution {
        &self.track
    }

    pub fn horses(&self) -> usize {
        self.payoffs.len()
    }

    pub fn is_fair(&self) -> bool {
        (self.take - 1.0).abs() < 1e-12
    }

    pub fn minus_log_take(&self) -> f64 {
        -self.take.log2()
    }

    fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.horses() {
            return Err(Error::DimensionMismatch {
                expected: self.horses(),
                actual: n,
            });
        }
        Ok(())
    }
}

/// Fractions of wealth placed on each horse or asset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation(Distribution);

impl Allocation {
    pub fn new(fractions: Vec<f64>) -> Result<Self> {
        Ok(Self(Distribution::new(fractions)?))
    }

    pub fn fractions(&self) -> &[f64] {
        self.0.probs()
    }

    pub fn as_distribution(&self) -> &Distribution {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Distribution> for Allocation {
    fn from(d: Distribution) -> Self {
        Self(d)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GrowthDecomposition {
    /// `Σ pᵢ log₂(bᵢ Rᵢ)`.
    pub direct: f64,
    /// `D(p‖q)`.
    pub track_term: f64,
    /// `D(p‖b)`.
    pub allocation_term: f64,
    /// `−log₂ T`.
    pub minus_log_take: f64,
}

impl GrowthDecomposition {
    pub fn recomposed(&self) -> f64 {
        self.track_term - self.allocation_term + self.minus_log_take
    }
}

/// Both sides of the growth decomposition, computed independently.
pub fn growth_decomposition(p: &Distribution, b: &Allocation, race: &RaceSpec) -> Result<GrowthDecomposition> {
    race.check_dim(p.len())?;
    race.check_dim(b.len())?;
    let mut direct = 0.0;
    for i in p.support() {
        let bi = b.fractions()[i];
        if bi <= 0.0 {
            direct = f64::NEG_INFINITY;
            break;
        }
        direct += p.get(i) * (bi * race.payoffs[i]).log2();
    }
    Ok(GrowthDecomposition {
        direct,
        track_term: info::relative_entropy(p, &race.track)?,
        allocation_term: info::relative_entropy(p, b.as_distribution())?,
        minus_log_take: race.minus_log_take(),
    })
}

/// Expected `log₂` wealth growth per race, `−∞` if `b` leaves a possible
/// winner uncovered.
pub fn race_growth(p: &Distribution, b: &Allocation, race: &RaceSpec) -> Result<f64> {
    let g = growth_decomposition(p, b, race)?;
    if g.direct.is_finite() {
        let err = (g.direct - g.recomposed()).abs();
        if err > IDENTITY_TOL * (1.0 + g.direct.abs()) {
            return Err(Error::Numerical(format!(
                "growth decomposition residual {err}"
            )));
        }
    }
    Ok(g.direct)
}

/// The growth-optimal bet on a horse race is `b = p`, whatever the odds.
pub fn optimal_policy(p: &Distribution) -> Allocation {
    Allocation(p.clone())
}

/// `W*_N = (1/N) Σₙ D(p(n)‖q) − log₂T` for a sequence of winner laws.
pub fn optimal_doubling_rate(winner_process: &[Distribution], race: &RaceSpec) -> Result<f64> {
    if winner_process.is_empty() {
        return Err(Error::InvalidParameter("empty winner process".into()));
    }
    let mut total = 0.0;
    for p in winner_process {
        race.check_dim(p.len())?;
        total += info::relative_entropy(p, &race.track)?;
    }
    Ok(total / winner_process.len() as f64 + race.minus_log_take())
}

/// Prior over side messages and the winner distribution given each one.
#[derive(Debug, Clone, PartialEq)]
pub struct SideChannel {
    prior: Distribution,
    conditionals: Vec<Distribution>,
    marginal: Distribution,
}

impl SideChannel {
    pub fn new(prior: Distribution, conditionals: Vec<Distribution>) -> Result<Self> {
        let joint = JointDistribution::from_conditionals(&prior, &conditionals)?;
        Ok(Self {
            prior,
            conditionals,
            marginal: joint.row_marginal(),
        })
    }

    /// Reveals the winner exactly: message `m` means horse `m` wins.
    pub fn full_revelation(p: &Distribution) -> Self {
        let conditionals = (0..p.len())
            .map(|i| Distribution::degenerate(p.len(), i).expect("in range"))
            .collect();
        Self::new(p.clone(), conditionals).expect("square channel")
    }

    pub fn prior(&self) -> &Distribution {
        &self.prior
    }

    pub fn conditionals(&self) -> &[Distribution] {
        &self.conditionals
    }

    pub fn marginal(&self) -> &Distribution {
        &self.marginal
    }

    pub fn horses(&self) -> usize {
        self.marginal.len()
    }

    /// Joint table with winners on rows and messages on columns.
    pub fn joint(&self) -> JointDistribution {
        JointDistribution::from_conditionals(&self.prior, &self.conditionals)
            .expect("validated channel")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SideInfoReport {
    /// `E_μ[D(p^(μ)‖q)] − log₂T`.
    pub total: f64,
    /// `I(winner; μ)`.
    pub pragmatic_term: f64,
    /// `D(p‖q)` for the marginal winner law.
    pub base_term: f64,
    pub minus_log_take: f64,
    /// `|total − (pragmatic + base − log₂T)|`.
    pub residual: f64,
}

impl SideInfoReport {
    /// Optimal rate without the side messages.
    pub fn base_rate(&self) -> f64 {
        self.base_term + self.minus_log_take
    }
}

/// Optimal doubling rate with side messages and its split into pragmatic
/// information plus the no-information rate.
pub fn side_info_doubling_rate(ch: &SideChannel, race: &RaceSpec) -> Result<SideInfoReport> {
    race.check_dim(ch.horses())?;
    let mut expected_divergence = 0.0;
    for (m, cond) in ch.conditionals.iter().enumerate() {
        let w = ch.prior.get(m);
        if w > 0.0 {
            expected_divergence += w * info::relative_entropy(cond, &race.track)?;
        }
    }
    let minus_log_take = race.minus_log_take();
    let total = expected_divergence + minus_log_take;
    let pragmatic_term = info::mutual_information(&ch.joint());
    let base_term = info::relative_entropy(&ch.marginal, &race.track)?;
    let residual = (total - (pragmatic_term + base_term + minus_log_take)).abs();
    if residual > IDENTITY_TOL {
        return Err(Error::Numerical(format!(
            "side-information decomposition residual {residual}"
        )));
    }
    Ok(SideInfoReport {
        total,
        pragmatic_term,
        base_term,
        minus_log_take,
        residual,
    })
}

/// Source of race winners for simulation.
#[derive(Debug, Clone, PartialEq)]
pub enum WinnerModel {
    Iid(Distribution),
    Side(SideChannel),
}

impl WinnerModel {
    fn horses(&self) -> usize {
        match self {
            WinnerModel::Iid(p) => p.len(),
            WinnerModel::Side(ch) => ch.horses(),
        }
    }
}

/// Betting rule applied each race.
#[derive(Debug, Clone, PartialEq)]
pub enum Policy {
    /// `b = p`, or `b = p^(μ)` when a side message is received.
    Proportional,
    Fixed(Allocation),
    /// One allocation per side message.
    PerMessage(Vec<Allocation>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WealthPath {
    /// `log₂(b_winner R_winner)` per race; ends at the ruin race if any.
    pub increments: Vec<f64>,
    /// `(log₂ S_n) / n` after each race.
    pub cumulative: Vec<f64>,
    pub seed: u64,
    pub stream: u64,
    /// Race index at which the policy had nothing on the winner.
    pub ruined_at: Option<usize>,
}

impl WealthPath {
    /// `(log₂ S_N)/N`, or `−∞` for a ruined path.
    pub fn terminal_rate(&self) -> f64 {
        if self.ruined_at.is_some() {
            return f64::NEG_INFINITY;
        }
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub fn is_ruined(&self) -> bool {
        self.ruined_at.is_some()
    }

    /// Sample standard deviation of the finite increments.
    pub fn increment_std(&self) -> f64 {
        let xs: Vec<f64> = self.increments.iter().copied().filter(|x| x.is_finite()).collect();
        if xs.len() < 2 {
            return 0.0;
        }
        let mean = xs.iter().sum::<f64>() / xs.len() as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (xs.len() - 1) as f64;
        var.sqrt()
    }
}

fn resolve_bets(model: &WinnerModel, policy: &Policy, race: &RaceSpec) -> Result<Vec<Vec<f64>>> {
    let messages = match model {
        WinnerModel::Iid(_) => 1,
        WinnerModel::Side(ch) => ch.prior.len(),
    };
    let bets: Vec<Vec<f64>> = match (policy, model) {
        (Policy::Proportional, WinnerModel::Iid(p)) => vec![p.probs().to_vec()],
        (Policy::Proportional, WinnerModel::Side(ch)) => {
            ch.conditionals.iter().map(|c| c.probs().to_vec()).collect()
        }
        (Policy::Fixed(b), _) => vec![b.fractions().to_vec(); messages],
        (Policy::PerMessage(bs), _) => {
            if bs.len() != messages {
                return Err(Error::DimensionMismatch {
                    expected: messages,
                    actual: bs.len(),
                });
            }
            bs.iter().map(|b| b.fractions().to_vec()).collect()
        }
    };
    for b in &bets {
        race.check_dim(b.len())?;
    }
    Ok(bets)
}

fn run_path<R: Rng>(
    model: &WinnerModel,
    race: &RaceSpec,
    bets: &[Vec<f64>],
    n: usize,
    rng: &mut R,
) -> (Vec<f64>, Option<usize>) {
    let (message_sampler, winner_samplers): (Option<WeightedIndex<f64>>, Vec<WeightedIndex<f64>>) =
        match model {
            WinnerModel::Iid(p) => (None, vec![WeightedIndex::new(p.probs()).expect("valid")]),
            WinnerModel::Side(ch) => (
                Some(WeightedIndex::new(ch.prior.probs()).expect("valid")),
                ch.conditionals
                    .iter()
                    .map(|c| WeightedIndex::new(c.probs()).expect("valid"))
                    .collect(),
            ),
        };
    // log₂(bᵢRᵢ) per (message, horse), computed once.
    let gains: Vec<Vec<f64>> = bets
        .iter()
        .map(|b| {
            b.iter()
                .zip(&race.payoffs)
                .map(|(bi, r)| if *bi > 0.0 { (bi * r).log2() } else { f64::NEG_INFINITY })
                .collect()
        })
        .collect();
    let mut increments = Vec::with_capacity(n);
    for t in 0..n {
        let m = message_sampler.as_ref().map_or(0, |s| s.sample(rng));
        let winner = winner_samplers[m].sample(rng);
        let g = gains[m][winner];
        increments.push(g);
        if !g.is_finite() {
            return (increments, Some(t));
        }
    }
    (increments, None)
}

fn simulate_stream(
    model: &WinnerModel,
    race: &RaceSpec,
    bets: &[Vec<f64>],
    n: usize,
    seed: u64,
    stream: u64,
) -> WealthPath {
    let mut rng = stream_rng(seed, stream);
    let (increments, ruined_at) = run_path(model, race, bets, n, &mut rng);
    let mut cumulative = Vec::with_capacity(increments.len());
    let mut sum = 0.0;
    for (k, g) in increments.iter().enumerate() {
        sum += g;
        cumulative.push(sum / (k + 1) as f64);
    }
    WealthPath {
        increments,
        cumulative,
        seed,
        stream,
        ruined_at,
    }
}

/// Simulates `n` races from `model`, betting by `policy`.
pub fn simulate_wealth(
    model: &WinnerModel,
    race: &RaceSpec,
    n: usize,
    seed: u64,
    policy: &Policy,
) -> Result<WealthPath> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one race".into()));
    }
    race.check_dim(model.horses())?;
    let bets = resolve_bets(model, policy, race)?;
    Ok(simulate_stream(model, race, &bets, n, seed, 0))
}

/// `paths` independent wealth paths; path `k` uses RNG stream `k` of `seed`.
pub fn simulate_ensemble(
    exec: Execution,
    model: &WinnerModel,
    race: &RaceSpec,
    n: usize,
    paths: usize,
    seed: u64,
    policy: &Policy,
) -> Result<Vec<WealthPath>> {
    if n == 0 || paths == 0 {
        return Err(Error::InvalidParameter("need at least one race and one path".into()));
    }
    race.check_dim(model.horses())?;
    let bets = resolve_bets(model, policy, race)?;
    Ok(par::map_indexed(exec, paths, |k| {
        simulate_stream(model, race, &bets, n, seed, k as u64)
    }))
}

/// A finite law over wealth-relative vectors (end price / start price per
/// asset).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeModel {
    outcomes: Vec<Vec<f64>>,
    probs: Distribution,
}

impl OutcomeModel {
    pub fn new(outcomes: Vec<Vec<f64>>, probs: Distribution) -> Result<Self> {
        if outcomes.len() != probs.len() {
            return Err(Error::DimensionMismatch {
                expected: outcomes.len(),
                actual: probs.len(),
            });
        }
        let assets = outcomes[0].len();
        if assets == 0 {
            return Err(Error::InvalidParameter("no assets".into()));
        }
        for x in &outcomes {
            if x.len() != assets {
                return Err(Error::DimensionMismatch {
                    expected: assets,
                    actual: x.len(),
                });
            }
            if x.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidParameter(
                    "wealth relatives must be nonnegative and finite".into(),
                ));
            }
        }
        Ok(Self { outcomes, probs })
    }

    /// Race outcomes: outcome `i` pays `Rᵢ` on asset `i` and nothing else.
    pub fn horse_race(p: &Distribution, race: &RaceSpec) -> Result<Self> {
        race.check_dim(p.len())?;
        let m = race.horses();
        let outcomes = (0..m)
            .map(|i| {
                let mut x = vec![0.0; m];
                x[i] = race.payoffs[i];
                x
            })
            .collect();
        Self::new(outcomes, p.clone())
    }

    pub fn assets(&self) -> usize {
        self.outcomes[0].len()
    }

    pub fn outcomes(&self) -> &[Vec<f64>] {
        &self.outcomes
    }

    pub fn probs(&self) -> &Distribution {
        &self.probs
    }

    /// `E[log₂ bᵀX]`.
    pub fn expected_log_growth(&self, b: &[f64]) -> f64 {
        let mut total = 0.0;
        for (x, &p) in self.outcomes.iter().zip(self.probs.probs()) {
            if p > 0.0 {
                total += p * dot(b, x).log2();
            }
        }
        total
    }

    /// `E[aᵀX / cᵀX]`; at most 1 for every `a` iff `c` is log-optimal.
    pub fn relative_payoff(&self, a: &[f64], c: &[f64]) -> f64 {
        self.outcomes
            .iter()
            .zip(self.probs.probs())
            .filter(|(_, p)| **p > 0.0)
            .map(|(x, p)| p * dot(a, x) / dot(c, x))
            .sum()
    }

    fn check_nondegenerate(&self) -> Result<()> {
        for (x, &p) in self.outcomes.iter().zip(self.probs.probs()) {
            if p > 0.0 && x.iter().all(|v| *v == 0.0) {
                return Err(Error::DegenerateModel(
                    "an outcome with positive probability wipes out every asset".into(),
                ));
            }
        }
        Ok(())
    }

    // gⱼ = E[Xⱼ / bᵀX]
    fn gradient(&self, b: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; b.len()];
        for (x, &p) in self.outcomes.iter().zip(self.probs.probs()) {
            if p > 0.0 {
                let w = p / dot(b, x);
                for (gj, xj) in g.iter_mut().zip(x) {
                    *gj += w * xj;
                }
            }
        }
        g
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub const MAX_ITERATIONS: usize = 10_000;
/// Stop once the certified suboptimality `log₂ maxⱼ E[Xⱼ/bᵀX]` drops below
/// this many bits.
pub const OBJECTIVE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogOptimal {
    pub allocation: Allocation,
    /// `E[log₂ bᵀX]` at the returned allocation.
    pub growth: f64,
    /// Upper bound on `W* − growth` in bits.
    pub gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Maximizes `E[log₂ bᵀX]` over the simplex.
///
/// Multiplicative updates `bⱼ ← bⱼ gⱼ^η / Σ bₖ gₖ^η` with `gⱼ = E[Xⱼ/bᵀX]`.
/// `η = 1` never decreases the objective; larger steps are tried while
/// they keep improving it. Since `Σ bⱼgⱼ = 1`, `log₂ maxⱼ gⱼ` bounds the
/// distance to the optimum and serves as the stopping rule.
pub fn log_optimal_allocation(model: &OutcomeModel) -> Result<LogOptimal> {
    model.check_nondegenerate()?;
    let m = model.assets();
    let mut b = vec![1.0 / m as f64; m];
    let mut growth = model.expected_log_growth(&b);
    let mut eta: f64 = 1.0;
    let mut gap = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        let g = model.gradient(&b);
        gap = g.iter().fold(0.0f64, |acc, &x| acc.max(x)).log2().max(0.0);
        if gap <= OBJECTIVE_TOL {
            break;
        }
        iterations += 1;
        loop {
            let candidate = multiplicative_step(&b, &g, eta);
            let cand_growth = model.expected_log_growth(&candidate);
            if cand_growth >= growth || eta <= 1.0 {
                b = candidate;
                growth = cand_growth;
                eta = (eta * 1.5).min(64.0);
                break;
            }
            eta = (eta / 2.0).max(1.0);
        }
    }
    let converged = gap <= OBJECTIVE_TOL;
    Ok(LogOptimal {
        allocation: Allocation::new(b)?,
        growth,
        gap,
        iterations,
        converged,
    })
}

fn multiplicative_step(b: &[f64], g: &[f64], eta: f64) -> Vec<f64> {
    let mut next: Vec<f64> = b.iter().zip(g).map(|(bj, gj)| bj * gj.powf(eta)).collect();
    let total: f64 = next.iter().sum();
    next.iter_mut().for_each(|x| *x /= total);
    next
}

/// Outcomes jointly distributed with side messages (outcomes on rows).
#[derive(Debug, Clone, PartialEq)]
pub struct MessageOutcomeModel {
    outcomes: Vec<Vec<f64>>,
    joint: JointDistribution,
}

impl MessageOutcomeModel {
    pub fn new(outcomes: Vec<Vec<f64>>, joint: JointDistribution) -> Result<Self> {
        if outcomes.len() != joint.rows() {
            return Err(Error::DimensionMismatch {
                expected: joint.rows(),
                actual: outcomes.len(),
            });
        }
        // Validates the outcome vectors.
        OutcomeModel::new(outcomes.clone(), joint.row_marginal())?;
        Ok(Self { outcomes, joint })
    }

    pub fn joint(&self) -> &JointDistribution {
        &self.joint
    }

    pub fn marginal_model(&self) -> OutcomeModel {
        OutcomeModel {
            outcomes: self.outcomes.clone(),
            probs: self.joint.row_marginal(),
        }
    }

    /// Message prior and the outcome model given each message with positive
    /// prior mass.
    pub fn conditional_models(&self) -> Vec<(f64, OutcomeModel)> {
        let prior = self.joint.col_marginal();
        (0..self.joint.cols())
            .filter_map(|m| {
                let probs = self.joint.row_conditional(m)?;
                Some((
                    prior.get(m),
                    OutcomeModel {
                        outcomes: self.outcomes.clone(),
                        probs,
                    },
                ))
            })
            .collect()
    }

    /// `I(X; μ)` with identical outcome vectors merged into one value of X.
    pub fn information(&self) -> f64 {
        let mut distinct: Vec<&Vec<f64>> = Vec::new();
        let mut class = Vec::with_capacity(self.outcomes.len());
        for x in &self.outcomes {
            match distinct.iter().position(|d| *d == x) {
                Some(k) => class.push(k),
                None => {
                    class.push(distinct.len());
                    distinct.push(x);
                }
            }
        }
        let cols = self.joint.cols();
        let mut table = vec![0.0; distinct.len() * cols];
        for (row, &k) in class.iter().enumerate() {
            for m in 0..cols {
                table[k * cols + m] += self.joint.get(row, m);
            }
        }
        match JointDistribution::new(distinct.len(), cols, table) {
            Ok(j) => info::mutual_information(&j),
            Err(_) => info::mutual_information(&self.joint),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideInfoBound {
    /// `W_b − W_c`.
    pub delta_w: f64,
    /// `I(X; μ)`.
    pub info: f64,
    /// Optimal rate using the messages, `Σ_m φ_m W*(model | m)`.
    pub with_messages: f64,
    /// Optimal rate ignoring them.
    pub without_messages: f64,
    /// Largest `E[aᵀX/cᵀX]` over the random probes, across all solved models.
    pub first_order_max: f64,
    pub holds: bool,
}

/// Number of random allocations used to probe first-order optimality.
pub const FOC_PROBES: usize = 100;

/// Checks `0 ≤ ΔW ≤ I(X; μ)` for the log-optimal policies with and without
/// the side messages. `seed` drives the random first-order probes.
pub fn side_info_bound_check(model: &MessageOutcomeModel, seed: u64) -> Result<SideInfoBound> {
    let marginal = model.marginal_model();
    let c = log_optimal_allocation(&marginal)?;
    let mut rng = stream_rng(seed, 0);
    let mut first_order_max = probe_first_order(&marginal, c.allocation.fractions(), &mut rng);
    let mut with_messages = 0.0;
    for (w, cond) in model.conditional_models() {
        let b = log_optimal_allocation(&cond)?;
        with_messages += w * b.growth;
        first_order_max =
            first_order_max.max(probe_first_order(&cond, b.allocation.fractions(), &mut rng));
    }
    let without_messages = c.growth;
    let delta_w = with_messages - without_messages;
    let info = model.information();
    // Each solve is within OBJECTIVE_TOL of its optimum.
    let holds = delta_w >= -10.0 * OBJECTIVE_TOL
        && delta_w <= info + 1e-6
        && first_order_max <= 1.0 + 1e-6;
    Ok(SideInfoBound {
        delta_w,
        info,
        with_messages,
        without_messages,
        first_order_max,
        holds,
    })
}

fn probe_first_order<R: Rng>(model: &OutcomeModel, c: &[f64], rng: &mut R) -> f64 {
    let m = model.assets();
    (0..FOC_PROBES)
        .map(|_| {
            let mut a: Vec<f64> = (0..m).map(|_| -rng.random::<f64>().ln()).collect();
            let s: f64 = a.iter().sum();
            a.iter_mut().for_each(|x| *x /= s);
            model.relative_payoff(&a, c)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn d(p: &[f64]) -> Distribution {
        Distribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn make_race_examples() {
        let r = make_race(&[2.0, 2.0]).unwrap();
        assert_eq!(r.take(), 1.0);
        assert_eq!(r.track_probs().probs(), &[0.5, 0.5]);
        assert!(r.is_fair());

        let r = make_race(&[1.8, 1.8]).unwrap();
        assert_abs_diff_eq!(r.take(), 1.111111, epsilon = 1e-6);
        assert_abs_diff_eq!(r.track_probs().get(0), 0.5, epsilon = 1e-15);

        let r = make_race(&[4.0, 2.0, 2.0]).unwrap();
        assert_abs_diff_eq!(r.take(), 1.25, epsilon = 1e-15);
        let q = r.track_probs().probs();
        assert_abs_diff_eq!(q[0], 0.2, epsilon = 1e-15);
        assert_abs_diff_eq!(q[1], 0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(q[2], 0.4, epsilon = 1e-15);

        assert!(make_race(&[2.0, 0.0]).is_err());
        assert!(make_race(&[-1.0]).is_err());
    }

    #[test]
    fn race_growth_examples() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let half = d(&[0.5, 0.5]);
        assert_eq!(race_growth(&half, &optimal_policy(&half), &fair).unwrap(), 0.0);

        let p = d(&[0.8, 0.2]);
        let g = race_growth(&p, &optimal_policy(&p), &fair).unwrap();
        assert_abs_diff_eq!(g, 0.278072, epsilon = 1e-6);

        let rigged = make_race(&[1.8, 1.8]).unwrap();
        let g = race_growth(&half, &optimal_policy(&half), &rigged).unwrap();
        assert_abs_diff_eq!(g, -0.152003, epsilon = 1e-6);

        let g = race_growth(&p, &Allocation::new(vec![1.0, 0.0]).unwrap(), &fair).unwrap();
        assert_eq!(g, f64::NEG_INFINITY);
        assert!(race_growth(&d(&[1.0]), &optimal_policy(&p), &fair).is_err());
    }

    #[test]
    fn perturbed_bets_lose_exactly_the_divergence() {
        let race = make_race(&[3.0, 1.5]).unwrap();
        let p = d(&[0.8, 0.2]);
        let best = race_growth(&p, &optimal_policy(&p), &race).unwrap();
        for b0 in [0.5, 0.7, 0.79, 0.81, 0.95] {
            let b = Allocation::new(vec![b0, 1.0 - b0]).unwrap();
            let loss = best - race_growth(&p, &b, &race).unwrap();
            let div = info::relative_entropy(&p, b.as_distribution()).unwrap();
            assert_abs_diff_eq!(loss, div, epsilon = 1e-12);
        }
    }

    #[test]
    fn doubling_rate_examples() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let q = fair.track_probs().clone();
        assert_eq!(optimal_doubling_rate(&vec![q; 5], &fair).unwrap(), 0.0);
        let p = d(&[0.8, 0.2]);
        assert_abs_diff_eq!(
            optimal_doubling_rate(&vec![p; 3], &fair).unwrap(),
            0.278072,
            epsilon = 1e-6
        );
        assert!(optimal_doubling_rate(&[], &fair).is_err());
        assert!(optimal_doubling_rate(&[d(&[1.0])], &fair).is_err());
    }

    #[test]
    fn side_info_examples() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let p = d(&[0.7, 0.3]);
        let flat = SideChannel::new(d(&[0.4, 0.6]), vec![p.clone(), p.clone()]).unwrap();
        let r = side_info_doubling_rate(&flat, &fair).unwrap();
        assert_abs_diff_eq!(r.pragmatic_term, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            r.total,
            optimal_doubling_rate(&[p], &fair).unwrap(),
            epsilon = 1e-12
        );

        let reveal = SideChannel::full_revelation(&d(&[0.5, 0.5]));
        let r = side_info_doubling_rate(&reveal, &fair).unwrap();
        assert_abs_diff_eq!(r.total, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.pragmatic_term, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.base_term, 0.0, epsilon = 1e-15);

        let noisy = SideChannel::new(d(&[0.5, 0.5]), vec![d(&[0.9, 0.1]), d(&[0.1, 0.9])]).unwrap();
        let r = side_info_doubling_rate(&noisy, &fair).unwrap();
        assert_abs_diff_eq!(r.pragmatic_term, 0.531004, epsilon = 1e-6);
        assert_abs_diff_eq!(r.total, 0.531004, epsilon = 1e-6);
    }

    #[test]
    fn track_betting_on_fair_race_never_moves_wealth() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let q = fair.track_probs().clone();
        let path = simulate_wealth(&WinnerModel::Iid(q), &fair, 1000, 1, &Policy::Proportional).unwrap();
        assert!(path.increments.iter().all(|g| *g == 0.0));
        assert_eq!(path.terminal_rate(), 0.0);
    }

    #[test]
    fn zero_bet_on_winner_is_ruin() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let b = Allocation::new(vec![1.0, 0.0]).unwrap();
        let path =
            simulate_wealth(&WinnerModel::Iid(d(&[0.5, 0.5])), &fair, 10_000, 9, &Policy::Fixed(b)).unwrap();
        let at = path.ruined_at.expect("ruin within 10k fair coin flips");
        assert_eq!(path.increments.len(), at + 1);
        assert_eq!(path.terminal_rate(), f64::NEG_INFINITY);
    }

    #[test]
    fn per_message_policy_must_cover_every_message() {
        let fair = make_race(&[2.0, 2.0]).unwrap();
        let ch = SideChannel::full_revelation(&d(&[0.5, 0.5]));
        let one = vec![Allocation::new(vec![0.5, 0.5]).unwrap()];
        let err = simulate_wealth(&WinnerModel::Side(ch), &fair, 10, 0, &Policy::PerMessage(one));
        assert!(matches!(err, Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn log_optimal_examples() {
        let race = make_race(&[3.0, 2.5, 4.0]).unwrap();
        let p = d(&[0.5, 0.3, 0.2]);
        let sol = log_optimal_allocation(&OutcomeModel::horse_race(&p, &race).unwrap()).unwrap();
        assert!(sol.converged);
        for (b, pi) in sol.allocation.fractions().iter().zip(p.probs()) {
            assert_abs_diff_eq!(*b, *pi, epsilon = 1e-8);
        }

        let single = OutcomeModel::new(vec![vec![1.1], vec![0.9]], d(&[0.5, 0.5])).unwrap();
        let sol = log_optimal_allocation(&single).unwrap();
        assert_eq!(sol.allocation.fractions(), &[1.0]);

        let coin = OutcomeModel::new(vec![vec![1.0, 2.0], vec![1.0, 0.5]], d(&[0.6, 0.4])).unwrap();
        let sol = log_optimal_allocation(&coin).unwrap();
        assert!(sol.converged);
        assert_abs_diff_eq!(sol.allocation.fractions()[1], 0.8, epsilon = 1e-6);

        let ruinous = OutcomeModel::new(vec![vec![0.0, 0.0], vec![1.0, 2.0]], d(&[0.1, 0.9])).unwrap();
        assert!(matches!(
            log_optimal_allocation(&ruinous),
            Err(Error::DegenerateModel(_))
        ));
    }

    #[test]
    fn bound_check_examples() {
        let outcomes = vec![vec![1.0, 2.0], vec![1.0, 0.5]];
        let indep = JointDistribution::product(&d(&[0.6, 0.4]), &d(&[0.3, 0.7]));
        let r = side_info_bound_check(&MessageOutcomeModel::new(outcomes, indep).unwrap(), 1).unwrap();
        assert_abs_diff_eq!(r.delta_w, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.info, 0.0, epsilon = 1e-15);
        assert!(r.holds);

        let fair = make_race(&[2.0, 2.0]).unwrap();
        let race = OutcomeModel::horse_race(&d(&[0.5, 0.5]), &fair).unwrap();
        let reveal = SideChannel::full_revelation(&d(&[0.5, 0.5])).joint();
        let r = side_info_bound_check(
            &MessageOutcomeModel::new(race.outcomes().to_vec(), reveal).unwrap(),
            2,
        )
        .unwrap();
        assert_abs_diff_eq!(r.delta_w, 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(r.info, 1.0, epsilon = 1e-12);
        assert!(r.holds);
    }
}
