//! GARCH(1,1) returns and the inefficiency they imply.
//!
//! Conventions used throughout:
//!
//! * `volatilities[0] = σ₀` and `returns[k] = r₀ + volatilities[k]·Bₖ` with
//!   `Bₖ` standard normal;
//! * `volatilities[k+1]² = α volatilities[k]² + β σ₀² + γ (returns[k] − r₀)²`,
//!   so each volatility depends only on strictly earlier data;
//! * `prices[k] = (1 + returns[k]) prices[k−1]` starting from a unit price.
//!
//! The per-step inefficiency is the entropy drop of the conditional return
//! law, `iₖ = h(σ₀) − h(σₖ) = −½ log₂(σₖ²/σ₀²)`.

use argmin::core::{CostFunction, Executor, State, TerminationReason, TerminationStatus};
use argmin::solver::neldermead::NelderMead;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::{self, stream_rng, Execution};

/// Steps discarded before any stationarity-dependent statistic.
pub const BURN_IN: usize = 1000;
const WEIGHT_TOL: f64 = 1e-9;
const BATCHES: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma0: f64,
    pub r0: f64,
}

impl GarchParams {
    pub fn new(alpha: f64, beta: f64, gamma: f64, sigma0: f64, r0: f64) -> Result<Self> {
        let p = Self {
            alpha,
            beta,
            gamma,
            sigma0,
            r0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let weights = [self.alpha, self.beta, self.gamma];
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidParameter(format!(
                "GARCH weights must be nonnegative, got {weights:?}"
            )));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidParameter(format!(
                "alpha + beta + gamma = {total}, must equal 1"
            )));
        }
        if !(self.sigma0 > 0.0) || !self.sigma0.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma0 must be positive, got {}",
                self.sigma0
            )));
        }
        if !self.r0.is_finite() {
            return Err(Error::InvalidParameter("r0 must be finite".into()));
        }
        Ok(())
    }

    /// `α σ² + β σ₀² + γ (r − r₀)²`.
    pub fn next_variance(&self, sigma_prev: f64, r_prev: f64) -> f64 {
        let shock = r_prev - self.r0;
        self.alpha * sigma_prev * sigma_prev
            + self.beta * self.sigma0 * self.sigma0
            + self.gamma * shock * shock
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReturnSeries {
    pub returns: Vec<f64>,
    pub volatilities: Vec<f64>,
    pub prices: Vec<f64>,
    pub seed: Option<u64>,
}

/// Simulates `n` periods from `σ₀` with RNG stream 0 of `seed`.
pub fn garch_simulate(params: &GarchParams, n: usize, seed: u64) -> Result<ReturnSeries> {
    params.validate()?;
    if n == 0 {
        return Err(Error::InvalidParameter("series length must be positive".into()));
    }
    let mut rng = stream_rng(seed, 0);
    let mut returns = Vec::with_capacity(n);
    let mut volatilities = Vec::with_capacity(n);
    let mut prices = Vec::with_capacity(n);
    let mut sigma = params.sigma0;
    let mut price = 1.0;
    for _ in 0..n {
        let b: f64 = StandardNormal.sample(&mut rng);
        let r = params.r0 + sigma * b;
        price *= 1.0 + r;
        returns.push(r);
        volatilities.push(sigma);
        prices.push(price);
        sigma = params.next_variance(sigma, r).sqrt();
    }
    Ok(ReturnSeries {
        returns,
        volatilities,
        prices,
        seed: Some(seed),
    })
}

/// The two pieces of the log argument: `α[(σ/σ₀)² − 1]` and
/// `γ[((r − r₀)/σ₀)² − 1]`.
fn deviation_terms(sigma_prev: f64, r_prev: f64, params: &GarchParams) -> (f64, f64) {
    let s = sigma_prev / params.sigma0;
    let z = (r_prev - params.r0) / params.sigma0;
    (params.alpha * (s * s - 1.0), params.gamma * (z * z - 1.0))
}

fn half_log_drop(arg: f64) -> Result<f64> {
    if !(arg > 0.0) || !arg.is_finite() {
        return Err(Error::Numerical(format!(
            "variance ratio {arg} is not positive"
        )));
    }
    // Adding 0.0 turns −0.0 (at arg = 1) into +0.0.
    Ok(-0.5 * arg.log2() + 0.0)
}

/// `i = −½ log₂{1 + α[(σₙ₋₁/σ₀)² − 1] + γ[(Rₙ₋₁/σ₀)² − 1]}`, with returns
/// measured from `r₀`. Negative values are legal.
pub fn instant_pragmatic_info(sigma_prev: f64, r_prev: f64, params: &GarchParams) -> Result<f64> {
    if !(sigma_prev > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "previous volatility must be positive, got {sigma_prev}"
        )));
    }
    let (a, g) = deviation_terms(sigma_prev, r_prev, params);
    half_log_drop(1.0 + a + g)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyReport {
    #[serde(skip)]
    pub per_step: Vec<f64>,
    pub mean_bits: f64,
    /// Batch-means standard error of `mean_bits`.
    pub stderr_bits: f64,
    pub n_steps: usize,
    pub frac_positive: f64,
    /// Shapley share of the mean due to volatility persistence (α).
    pub alpha_term: f64,
    /// Shapley share of the mean due to the last squared return (γ).
    pub gamma_term: f64,
}

impl EfficiencyReport {
    /// Mean at least three standard errors above zero.
    pub fn significantly_positive(&self) -> bool {
        self.mean_bits > 3.0 * self.stderr_bits
    }
}

/// Standard error of the mean from `BATCHES` contiguous batch means, which
/// accounts for serial correlation. Short series fall back to the i.i.d.
/// formula.
fn batch_stderr(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let per = n / BATCHES;
    if per < 20 {
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        return (var / n as f64).sqrt();
    }
    let means: Vec<f64> = xs
        .chunks_exact(per)
        .take(BATCHES)
        .map(|c| c.iter().sum::<f64>() / per as f64)
        .collect();
    let grand = means.iter().sum::<f64>() / BATCHES as f64;
    let var = means.iter().map(|m| (m - grand).powi(2)).sum::<f64>() / (BATCHES - 1) as f64;
    (var / BATCHES as f64).sqrt()
}

/// Report over `(σₖ₋₁, Rₖ₋₁)` pairs.
fn report_from_pairs(pairs: impl Iterator<Item = (f64, f64)>, params: &GarchParams) -> Result<EfficiencyReport> {
    let mut per_step = Vec::new();
    let (mut alpha_sum, mut gamma_sum) = (0.0, 0.0);
    for (sigma_prev, r_prev) in pairs {
        if !(sigma_prev > 0.0) {
            return Err(Error::Numerical(format!(
                "filtered volatility {sigma_prev} is not positive"
            )));
        }
        let (a, g) = deviation_terms(sigma_prev, r_prev, params);
        let full = half_log_drop(1.0 + a + g)?;
        let only_a = half_log_drop(1.0 + a)?;
        let only_g = half_log_drop(1.0 + g)?;
        alpha_sum += 0.5 * (only_a + full - only_g);
        gamma_sum += 0.5 * (only_g + full - only_a);
        per_step.push(full);
    }
    let n = per_step.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no steps to evaluate".into()));
    }
    let mean_bits = per_step.iter().sum::<f64>() / n as f64;
    Ok(EfficiencyReport {
        stderr_bits: batch_stderr(&per_step),
        frac_positive: per_step.iter().filter(|i| **i > 0.0).count() as f64 / n as f64,
        alpha_term: alpha_sum / n as f64,
        gamma_term: gamma_sum / n as f64,
        mean_bits,
        n_steps: n,
        per_step,
    })
}

/// Simulates `BURN_IN + n + 1` periods and reports the `n` per-step values
/// after the burn-in.
pub fn expected_inefficiency(params: &GarchParams, n: usize, seed: u64) -> Result<EfficiencyReport> {
    params.validate()?;
    if n < 1000 {
        return Err(Error::InvalidParameter(format!(
            "need at least 1000 steps, got {n}"
        )));
    }
    let series = garch_simulate(params, BURN_IN + n + 1, seed)?;
    let start = BURN_IN;
    let report = report_from_pairs(
        (start..start + n).map(|k| (series.volatilities[k], series.returns[k])),
        params,
    )?;
    if report.mean_bits < -3.0 * report.stderr_bits {
        return Err(Error::Numerical(format!(
            "mean inefficiency {} is more than 3 standard errors ({}) below zero",
            report.mean_bits, report.stderr_bits
        )));
    }
    Ok(report)
}

/// Inefficiency reports for several parameter sets, in input order. Each
/// entry uses RNG stream 0 of `seed + index`.
pub fn efficiency_sweep(
    exec: Execution,
    sets: &[GarchParams],
    n: usize,
    seed: u64,
) -> Vec<Result<EfficiencyReport>> {
    par::map_indexed(exec, sets.len(), |k| {
        expected_inefficiency(&sets[k], n, seed.wrapping_add(k as u64))
    })
}

/// Volatility path filtered from `σ₀` through the recursion.
pub fn filter_volatilities(returns: &[f64], params: &GarchParams) -> Vec<f64> {
    let mut out = Vec::with_capacity(returns.len());
    let mut sigma = params.sigma0;
    for &r in returns {
        out.push(sigma);
        sigma = params.next_variance(sigma, r).sqrt();
    }
    out
}

/// Per-step inefficiency along an observed return path.
pub fn efficiency_from_series(returns: &[f64], params: &GarchParams) -> Result<EfficiencyReport> {
    params.validate()?;
    if returns.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 returns, got {}",
            returns.len()
        )));
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter("returns must be finite".into()));
    }
    let vols = filter_volatilities(returns, params);
    report_from_pairs(
        vols.iter()
            .zip(returns)
            .take(returns.len() - 1)
            .map(|(s, r)| (*s, *r)),
        params,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GarchFit {
    pub params: GarchParams,
    /// Gaussian log-likelihood in nats at the fitted parameters.
    pub log_likelihood: f64,
    pub iterations: u64,
}

struct NegLogLik<'a> {
    shocks: &'a [f64],
    variance: f64,
}

/// `(α, β, γ)` from two free logits, with β's logit pinned at 0.
fn weights_from_logits(u: &[f64]) -> (f64, f64, f64) {
    let m = u[0].max(u[1]).max(0.0);
    let (ea, eb, eg) = ((u[0] - m).exp(), (-m).exp(), (u[1] - m).exp());
    let z = ea + eb + eg;
    (ea / z, eb / z, eg / z)
}

impl NegLogLik<'_> {
    fn eval(&self, alpha: f64, beta: f64, gamma: f64) -> f64 {
        let mut var = self.variance;
        let mut total = 0.0;
        for &e in self.shocks {
            total += var.ln() + e * e / var;
            var = alpha * var + beta * self.variance + gamma * e * e;
        }
        0.5 * (total + self.shocks.len() as f64 * (2.0 * std::f64::consts::PI).ln())
    }
}

impl CostFunction for NegLogLik<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, u: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let (a, b, g) = weights_from_logits(u);
        Ok(self.eval(a, b, g))
    }
}

/// 95% point of χ² with two degrees of freedom.
const LR_CRITICAL: f64 = 5.991_464_547_107_979;

fn cost_eval_constant(shocks: &[f64], variance: f64) -> f64 {
    NegLogLik { shocks, variance }.eval(0.0, 1.0, 0.0)
}

/// Gaussian quasi-maximum-likelihood fit with `r₀` the sample mean, `σ₀`
/// the sample standard deviation, and `α + β + γ = 1` built into a softmax
/// parameterization. Falls back to constant volatility when the fitted
/// model fails a likelihood-ratio test against it at the 5% level.
pub fn fit_garch(returns: &[f64]) -> Result<GarchFit> {
    if returns.len() < 100 {
        return Err(Error::InvalidParameter(format!(
            "need at least 100 returns, got {}",
            returns.len()
        )));
    }
    if returns.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidParameter("returns must be finite".into()));
    }
    let n = returns.len() as f64;
    let r0 = returns.iter().sum::<f64>() / n;
    let shocks: Vec<f64> = returns.iter().map(|r| r - r0).collect();
    let variance = shocks.iter().map(|e| e * e).sum::<f64>() / (n - 1.0);
    if returns.iter().all(|r| *r == returns[0]) || !(variance > 0.0) {
        return Err(Error::InvalidParameter("returns are constant".into()));
    }
    let cost = NegLogLik {
        shocks: &shocks,
        variance,
    };

    // Coarse grid for a starting point, then Nelder–Mead in logit space.
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for &a in &[0.05, 0.2, 0.4, 0.6, 0.8, 0.9, 0.95] {
        for &g in &[0.01, 0.03, 0.05, 0.1, 0.2] {
            let b = 1.0 - a - g;
            if b < 0.005 {
                continue;
            }
            let v = cost.eval(a, b, g);
            if v < best.0 {
                best = (v, a, g);
            }
        }
    }
    let (_, a0, g0) = best;
    let b0 = 1.0 - a0 - g0;
    let start = vec![(a0 / b0).ln(), (g0 / b0).ln()];
    let simplex = vec![
        start.clone(),
        vec![start[0] + 0.5, start[1]],
        vec![start[0], start[1] + 0.5],
    ];
    let solver = NelderMead::new(simplex)
        .with_sd_tolerance(1e-10)
        .map_err(|e| Error::NonConvergence(e.to_string()))?;
    let res = Executor::new(cost, solver)
        .configure(|s| s.max_iters(2000))
        .run()
        .map_err(|e| Error::NonConvergence(e.to_string()))?;
    let state = res.state();
    if !matches!(
        state.get_termination_status(),
        TerminationStatus::Terminated(TerminationReason::SolverConverged)
    ) {
        return Err(Error::NonConvergence(format!(
            "Nelder-Mead stopped after {} iterations: {:?}",
            state.get_iter(),
            state.get_termination_status()
        )));
    }
    let u = state
        .get_best_param()
        .ok_or_else(|| Error::NonConvergence("no best parameter".into()))?;
    let (mut alpha, mut beta, mut gamma) = weights_from_logits(u);
    let mut log_likelihood = -state.get_best_cost();
    // With γ = 0 the recursion never leaves σ₀ and α is unidentified, so a
    // fit that does not beat constant volatility is reported as exactly that.
    let constant = -cost_eval_constant(&shocks, variance);
    if 2.0 * (log_likelihood - constant) < LR_CRITICAL {
        (alpha, beta, gamma) = (0.0, 1.0, 0.0);
        log_likelihood = constant;
    }
    Ok(GarchFit {
        params: GarchParams::new(alpha, beta, gamma, variance.sqrt(), r0)?,
        log_likelihood,
        iterations: state.get_iter(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn params(alpha: f64, beta: f64, gamma: f64) -> GarchParams {
        GarchParams::new(alpha, beta, gamma, 0.01, 0.0).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(GarchParams::new(0.5, 0.5, 0.1, 0.01, 0.0).is_err());
        assert!(GarchParams::new(-0.1, 1.0, 0.1, 0.01, 0.0).is_err());
        assert!(GarchParams::new(0.9, 0.05, 0.05, 0.0, 0.0).is_err());
        assert!(GarchParams::new(0.9, 0.05, 0.05, 0.01, 0.0).is_ok());
    }

    #[test]
    fn constant_volatility_when_beta_is_one() {
        let s = garch_simulate(&params(0.0, 1.0, 0.0), 500, 4).unwrap();
        assert!(s.volatilities.iter().all(|v| *v == 0.01));
    }

    #[test]
    fn simulation_is_deterministic_and_consistent() {
        let p = params(0.9, 0.05, 0.05);
        let a = garch_simulate(&p, 1000, 11).unwrap();
        let b = garch_simulate(&p, 1000, 11).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.volatilities, filter_volatilities(&a.returns, &p));
        let mut price = 1.0;
        for (r, pr) in a.returns.iter().zip(&a.prices) {
            price *= 1.0 + r;
            assert_eq!(price, *pr);
        }
        assert!(garch_simulate(&p, 0, 1).is_err());
    }

    #[test]
    fn instant_info_examples() {
        let p = params(0.9, 0.05, 0.05);
        assert_abs_diff_eq!(instant_pragmatic_info(0.01, 0.01, &p).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(instant_pragmatic_info(0.01, 0.0, &p).unwrap(), 0.037000, epsilon = 1e-6);
        assert_abs_diff_eq!(
            instant_pragmatic_info(0.02, 0.01, &p).unwrap(),
            -0.5 * 3.7f64.log2(),
            epsilon = 1e-12
        );
        assert!(instant_pragmatic_info(0.0, 0.01, &p).is_err());
    }

    #[test]
    fn efficient_degenerate_case() {
        let r = expected_inefficiency(&params(0.0, 1.0, 0.0), 5000, 2).unwrap();
        assert_eq!(r.mean_bits, 0.0);
        assert!(r.per_step.iter().all(|i| *i == 0.0));
        let r = efficiency_from_series(&[0.0; 100], &params(0.0, 1.0, 0.0)).unwrap();
        assert_eq!(r.mean_bits, 0.0);
        assert_eq!(r.n_steps, 99);
    }

    #[test]
    fn attribution_splits_the_mean() {
        let r = expected_inefficiency(&params(0.6, 0.2, 0.2), 2000, 5).unwrap();
        assert_abs_diff_eq!(r.alpha_term + r.gamma_term, r.mean_bits, epsilon = 1e-12);
        let r = expected_inefficiency(&params(0.0, 0.9, 0.1), 2000, 5).unwrap();
        assert_abs_diff_eq!(r.alpha_term, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn volatility_spike_drives_next_step_negative() {
        let p = params(0.9, 0.05, 0.05);
        let mut returns = vec![0.01; 20];
        returns[10] = 0.1;
        let r = efficiency_from_series(&returns, &p).unwrap();
        // Step k uses return k-1 in this indexing; the spike is return 10.
        let spike_step = r.per_step[10];
        assert_abs_diff_eq!(
            spike_step,
            instant_pragmatic_info(0.01, 0.1, &p).unwrap(),
            epsilon = 1e-15
        );
        assert!(spike_step < -1.0);
    }

    #[test]
    fn short_inputs_are_rejected() {
        let p = params(0.9, 0.05, 0.05);
        assert!(efficiency_from_series(&[0.01], &p).is_err());
        assert!(expected_inefficiency(&p, 999, 1).is_err());
        assert!(fit_garch(&[0.01; 50]).is_err());
        assert!(fit_garch(&[0.01; 500]).is_err());
    }
}
