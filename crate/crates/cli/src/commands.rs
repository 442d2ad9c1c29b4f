use std::path::{Path, PathBuf};

use praginfo::coding::{
    empirical_code_rate, huffman_lengths, pragmatic_wrong_code_gap, shannon_lengths, wrong_code_gap,
    CodingModel, SideMessageEnsemble,
};
use praginfo::info::{
    conditional_entropy, entropy, gaussian_entropy, joint_entropy, mutual_information, relative_entropy,
};
use praginfo::kelly::{
    growth_decomposition, make_race, optimal_doubling_rate, race_growth, side_info_doubling_rate,
    simulate_ensemble, Allocation, Policy, SideChannel, WinnerModel,
};
use praginfo::market::{
    efficiency_from_series, expected_inefficiency, filter_volatilities, fit_garch, garch_simulate,
    instant_pragmatic_info, GarchParams, BURN_IN,
};
use praginfo::par::stream_rng;
use praginfo::rates::{
    ergodic_sample_rate, monotone_increment_check, pragmatic_rate_sequence, CoupledSource, MarkovSource,
};
use praginfo::{Distribution, Execution, JointDistribution};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{self, *};
use crate::ingest::ingest_returns;
use crate::report::{envelope, num, nums, write_json, Series};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Kelly,
    Garch,
    Rates,
    WrongCode,
    Efficiency,
    Entropy,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Kelly => "kelly",
            Kind::Garch => "garch",
            Kind::Rates => "rates",
            Kind::WrongCode => "wrongcode",
            Kind::Efficiency => "efficiency",
            Kind::Entropy => "entropy",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub kind: Kind,
    pub config: PathBuf,
    /// Overrides the scenario's `seed`.
    pub seed: Option<u64>,
    /// Overrides the scenario's `out`; defaults to the working directory.
    pub out: Option<PathBuf>,
    pub csv: bool,
}

/// Files written by a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: PathBuf,
    pub series: Vec<PathBuf>,
}

type Computed = (Value, Vec<(String, Series)>);

struct Prepared {
    seed: Option<u64>,
    echo: Value,
    out_dir: PathBuf,
}

fn prepare<T: DeserializeOwned + Serialize>(inv: &Invocation) -> Result<(config::Scenario<T>, Prepared), CliError> {
    let s: config::Scenario<T> = config::load(&inv.config, inv.kind.name())?;
    let echo = serde_json::to_value(&s.params).map_err(|e| CliError::Config(e.to_string()))?;
    let p = Prepared {
        seed: inv.seed.or(s.seed),
        echo,
        out_dir: inv
            .out
            .clone()
            .or_else(|| s.out.clone())
            .unwrap_or_else(|| PathBuf::from(".")),
    };
    Ok((s, p))
}

/// Runs one scenario and writes its report. A numerical failure still
/// writes a JSON report carrying the error before returning it.
pub fn execute(inv: &Invocation) -> Result<Outcome, CliError> {
    match inv.kind {
        Kind::Kelly => {
            let (s, p) = prepare::<KellyConfig>(inv)?;
            let seed = require_seed(p.seed)?;
            finish(inv, p, |_| kelly(&s.params, seed))
        }
        Kind::Garch => {
            let (s, p) = prepare::<GarchConfig>(inv)?;
            let seed = require_seed(p.seed)?;
            finish(inv, p, |csv| garch(&s.params, seed, csv))
        }
        Kind::Rates => {
            let (s, p) = prepare::<RatesConfig>(inv)?;
            let seed = p.seed;
            finish(inv, p, |_| rates(&s.params, seed))
        }
        Kind::WrongCode => {
            let (s, p) = prepare::<WrongCodeConfig>(inv)?;
            let seed = p.seed;
            finish(inv, p, |_| wrongcode(&s.params, seed))
        }
        Kind::Efficiency => {
            let (s, p) = prepare::<EfficiencyConfig>(inv)?;
            finish(inv, p, |_| efficiency(&s.params, &s.base_dir))
        }
        Kind::Entropy => {
            let (s, p) = prepare::<EntropyConfig>(inv)?;
            finish(inv, p, |_| entropy_report(&s.params))
        }
    }
}

fn finish(inv: &Invocation, p: Prepared, run: impl FnOnce(bool) -> Result<Computed, CliError>) -> Result<Outcome, CliError> {
    let kind = inv.kind.name();
    let computed = run(inv.csv);
    if let Err(CliError::Config(_)) = computed {
        return Err(computed.err().expect("error"));
    }
    std::fs::create_dir_all(&p.out_dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", p.out_dir.display())))?;
    let report = p.out_dir.join(format!("{kind}_report.json"));
    let io = |e: std::io::Error| CliError::Io(e.to_string());
    match computed {
        Ok((result, series)) => {
            write_json(&report, &envelope(kind, p.seed, p.echo, ("result", result))).map_err(io)?;
            let mut written = Vec::new();
            if inv.csv {
                for (name, s) in series {
                    let path = p.out_dir.join(name);
                    s.write(&path).map_err(io)?;
                    written.push(path);
                }
            }
            Ok(Outcome {
                report,
                series: written,
            })
        }
        Err(e) => {
            let body = json!({ "kind": "numerical", "message": e.to_string() });
            write_json(&report, &envelope(kind, p.seed, p.echo, ("error", body))).map_err(io)?;
            Err(e)
        }
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| CliError::Config("this scenario is stochastic and needs a seed (`seed` key or --seed)".into()))
}

fn dist(v: &[f64], what: &str) -> Result<Distribution, CliError> {
    Distribution::new(v.to_vec()).map_err(|e| CliError::Config(format!("`{what}`: {e}")))
}

fn to_json<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

fn side_parts(s: &SideConfig) -> Result<(Distribution, Vec<Distribution>), CliError> {
    let prior = dist(&s.prior, "side.prior")?;
    let conds = s
        .conditionals
        .iter()
        .map(|c| dist(c, "side.conditionals"))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((prior, conds))
}

fn kelly(c: &KellyConfig, seed: u64) -> Result<Computed, CliError> {
    let race = make_race(&c.payoffs)?;
    let model = match (&c.probs, &c.side) {
        (Some(p), None) => WinnerModel::Iid(dist(p, "probs")?),
        (None, Some(side)) => {
            let (prior, conds) = side_parts(side)?;
            WinnerModel::Side(SideChannel::new(prior, conds)?)
        }
        _ => return Err(CliError::Config("give exactly one of `probs` and `side`".into())),
    };
    if c.races == 0 || c.paths == 0 {
        return Err(CliError::Config("`races` and `paths` must be positive".into()));
    }
    let policy = match &c.bets {
        None => Policy::Proportional,
        Some(b) => Policy::Fixed(Allocation::new(b.clone())?),
    };

    let mut result = json!({
        "track_take": num(race.take()),
        "minus_log_take": num(race.minus_log_take()),
        "fair": race.is_fair(),
    });
    let analytic = match (&model, &policy) {
        (WinnerModel::Iid(p), _) => {
            let b = match &policy {
                Policy::Fixed(b) => b.clone(),
                _ => Allocation::new(p.probs().to_vec())?,
            };
            let d = growth_decomposition(p, &b, &race)?;
            result["decomposition"] = json!({
                "direct": num(d.direct),
                "track_term": num(d.track_term),
                "allocation_term": num(d.allocation_term),
                "minus_log_take": num(d.minus_log_take),
            });
            result["optimal_rate"] = num(optimal_doubling_rate(std::slice::from_ref(p), &race)?);
            d.direct
        }
        (WinnerModel::Side(ch), Policy::Proportional) => {
            let r = side_info_doubling_rate(ch, &race)?;
            result["side_information"] = json!({
                "total": num(r.total),
                "pragmatic_term": num(r.pragmatic_term),
                "base_term": num(r.base_term),
                "minus_log_take": num(r.minus_log_take),
                "base_rate": num(r.base_rate()),
                "gain": num(r.total - r.base_rate()),
            });
            r.total
        }
        (WinnerModel::Side(ch), Policy::Fixed(b)) => {
            let mut total = 0.0;
            for (w, cond) in ch.prior().probs().iter().zip(ch.conditionals()) {
                if *w > 0.0 {
                    total += w * race_growth(cond, b, &race)?;
                }
            }
            total
        }
        (WinnerModel::Side(_), Policy::PerMessage(_)) => unreachable!("not configurable"),
    };

    let paths = simulate_ensemble(Execution::default(), &model, &race, c.races, c.paths, seed, &policy)?;
    if let Some(path) = paths.iter().find(|p| p.is_ruined()) {
        return Err(CliError::Numerical(format!(
            "ruin: path {} bet nothing on the winner of race {}",
            path.stream,
            path.ruined_at.expect("ruined") + 1
        )));
    }
    let rates: Vec<f64> = paths.iter().map(|p| p.terminal_rate()).collect();
    let mc = rates.iter().sum::<f64>() / rates.len() as f64;
    let sd = paths.iter().map(|p| p.increment_std()).sum::<f64>() / paths.len() as f64;
    result["analytic_rate"] = num(analytic);
    result["monte_carlo_rate"] = num(mc);
    result["monte_carlo_stderr"] = num(sd / ((c.races * c.paths) as f64).sqrt());
    result["path_rates"] = nums(&rates);

    let mut header = vec!["race".to_string()];
    header.extend((0..paths.len()).map(|k| format!("path_{k}")));
    let mut series = Series::new(header);
    for t in 0..c.races {
        let mut row = vec![(t + 1).to_string()];
        row.extend(paths.iter().map(|p| p.cumulative[t].to_string()));
        series.push(row);
    }
    Ok((result, vec![("kelly_series.csv".into(), series)]))
}

fn garch_params(c: &GarchParamsConfig) -> Result<GarchParams, CliError> {
    Ok(GarchParams::new(c.alpha, c.beta, c.gamma, c.sigma0, c.r0)?)
}

fn garch(c: &GarchConfig, seed: u64, csv: bool) -> Result<Computed, CliError> {
    let params = garch_params(&c.params())?;
    let report = expected_inefficiency(&params, c.steps, seed)?;
    let result = json!({
        "burn_in": BURN_IN,
        "efficiency": to_json(&report),
        "significantly_positive": report.significantly_positive(),
    });
    let mut files = Vec::new();
    if csv {
        // The same path expected_inefficiency simulated internally.
        let s = garch_simulate(&params, BURN_IN + c.steps + 1, seed)?;
        let mut series = Series::new(vec!["step", "return", "volatility", "price", "info_bits"]);
        for k in 0..s.returns.len() {
            let info = if k == 0 {
                String::new()
            } else {
                instant_pragmatic_info(s.volatilities[k - 1], s.returns[k - 1], &params)?.to_string()
            };
            series.push(vec![
                k.to_string(),
                s.returns[k].to_string(),
                s.volatilities[k].to_string(),
                s.prices[k].to_string(),
                info,
            ]);
        }
        files.push(("garch_series.csv".to_string(), series));
        let mut returns = Series::new(vec!["timestamp", "return"]);
        for (k, r) in s.returns.iter().enumerate() {
            returns.push(vec![k.to_string(), r.to_string()]);
        }
        files.push(("garch_returns.csv".to_string(), returns));
    }
    Ok((result, files))
}

fn efficiency(c: &EfficiencyConfig, base: &Path) -> Result<Computed, CliError> {
    let path = if c.input.is_absolute() {
        c.input.clone()
    } else {
        base.join(&c.input)
    };
    let returns = ingest_returns(&path).map_err(|e| CliError::Config(e.to_string()))?;
    let (params, fit) = match &c.params {
        Some(p) => (garch_params(p)?, Value::Null),
        None => {
            let f = fit_garch(&returns)?;
            let fit = json!({
                "log_likelihood": num(f.log_likelihood),
                "iterations": f.iterations,
            });
            (f.params, fit)
        }
    };
    let report = efficiency_from_series(&returns, &params)?;
    let result = json!({
        "n_returns": returns.len(),
        "params": to_json(&params),
        "fit": fit,
        "efficiency": to_json(&report),
        "significantly_positive": report.significantly_positive(),
    });
    let vols = filter_volatilities(&returns, &params);
    let mut series = Series::new(vec!["step", "return", "volatility", "info_bits"]);
    for k in 0..returns.len() {
        let info = if k == 0 {
            String::new()
        } else {
            report.per_step[k - 1].to_string()
        };
        series.push(vec![k.to_string(), returns[k].to_string(), vols[k].to_string(), info]);
    }
    Ok((result, vec![("efficiency_series.csv".into(), series)]))
}

fn coupling(c: &CouplingConfig) -> Result<CoupledSource, CliError> {
    Ok(match c {
        CouplingConfig::Independent { alpha, mu } => {
            CoupledSource::independent(&dist(alpha, "coupling.alpha")?, &dist(mu, "coupling.mu")?)
        }
        CouplingConfig::Identity { probs } => CoupledSource::identity(&dist(probs, "coupling.probs")?),
        CouplingConfig::BinarySymmetric { flip } => CoupledSource::binary_symmetric(*flip)?,
        CouplingConfig::Iid { joint } => CoupledSource::iid(JointDistribution::from_rows(joint)?),
        CouplingConfig::Hidden { transition, emission } => {
            let t = transition
                .iter()
                .map(|r| dist(r, "coupling.transition"))
                .collect::<Result<Vec<_>, _>>()?;
            let e = emission
                .iter()
                .map(|rows| JointDistribution::from_rows(rows))
                .collect::<Result<Vec<_>, _>>()?;
            CoupledSource::hidden(t, e)?
        }
    })
}

fn rates(c: &RatesConfig, seed: Option<u64>) -> Result<Computed, CliError> {
    let cs = coupling(&c.coupling)?;
    let est = pragmatic_rate_sequence(&cs, c.horizon)?;
    let mut result = json!({ "rate_estimate": to_json(&est) });
    if let Some(n) = c.sample_steps {
        let seed = require_seed(seed)?;
        result["ergodic_sample_rate"] = num(ergodic_sample_rate(&cs, n, seed)?);
    }
    let monotone = match c.message_len {
        Some(l) => Some(monotone_increment_check(&cs, l, c.horizon)?),
        None => None,
    };
    result["monotone"] = to_json(&monotone);
    let mut header = vec!["n", "block_rate", "increment"];
    if monotone.is_some() {
        header.push("fixed_message_term");
    }
    let mut series = Series::new(header);
    for (k, ((n, block), (_, inc))) in est.per_n.iter().zip(&est.increments).enumerate() {
        let mut row = vec![n.to_string(), block.to_string(), inc.to_string()];
        if let Some(m) = &monotone {
            row.push(m.terms[k].to_string());
        }
        series.push(row);
    }
    Ok((result, vec![("rates_series.csv".into(), series)]))
}

fn wrongcode(c: &WrongCodeConfig, seed: Option<u64>) -> Result<Computed, CliError> {
    let p = dist(&c.p, "p")?;
    let q = dist(&c.q, "q")?;
    let bounds = wrong_code_gap(&p, &q)?;
    let shannon = shannon_lengths(&q)?;
    let huffman = huffman_lengths(&q);
    let mut result = json!({
        "entropy": num(entropy(&p)),
        "relative_entropy": num(relative_entropy(&p, &q)?),
        "bounds": to_json(&bounds),
        "shannon_lengths": shannon.lengths(),
        "shannon_codewords": shannon.canonical_codewords(),
        "kraft_sum": num(shannon.kraft_sum()),
        "huffman_lengths": huffman.lengths(),
        "huffman_expected_length": num(huffman.expected_length(&p)?),
    });
    if let Some(side) = &c.side {
        let (prior, conds) = side_parts(side)?;
        let e = SideMessageEnsemble::new(prior, conds)?;
        result["pragmatic"] = to_json(&pragmatic_wrong_code_gap(&e, &q)?);
    }
    if let Some(n) = c.sequence_length {
        let seed = require_seed(seed)?;
        if n == 0 {
            return Err(CliError::Config("`sequence_length` must be positive".into()));
        }
        let seq = MarkovSource::iid(p.clone()).sample(n, &mut stream_rng(seed, 0));
        result["empirical_code_rate"] = num(empirical_code_rate(&seq, &CodingModel::Iid(q.clone()))?);
    }
    let words = shannon.canonical_codewords();
    let mut series = Series::new(vec!["symbol", "p", "q", "shannon_length", "huffman_length", "codeword"]);
    for i in 0..p.len() {
        series.push(vec![
            i.to_string(),
            p.get(i).to_string(),
            q.get(i).to_string(),
            shannon.lengths()[i].to_string(),
            huffman.lengths()[i].to_string(),
            words[i].clone(),
        ]);
    }
    Ok((result, vec![("wrongcode_series.csv".into(), series)]))
}

fn entropy_report(c: &EntropyConfig) -> Result<Computed, CliError> {
    if c.probs.is_none() && c.joint.is_none() && c.sigma.is_none() {
        return Err(CliError::Config("give at least one of `probs`, `joint`, `sigma`".into()));
    }
    let mut result = json!({});
    let mut series = Series::new(vec!["symbol", "p", "surprisal_bits"]);
    if let Some(probs) = &c.probs {
        let p = dist(probs, "probs")?;
        result["entropy"] = num(entropy(&p));
        if let Some(q) = &c.q {
            result["relative_entropy"] = num(relative_entropy(&p, &dist(q, "q")?)?);
        }
        for (i, x) in p.probs().iter().enumerate() {
            series.push(vec![i.to_string(), x.to_string(), (-x.log2()).to_string()]);
        }
    } else if c.q.is_some() {
        return Err(CliError::Config("`q` needs `probs`".into()));
    }
    if let Some(rows) = &c.joint {
        let j = JointDistribution::from_rows(rows)?;
        result["joint"] = json!({
            "joint_entropy": num(joint_entropy(&j)),
            "mutual_information": num(mutual_information(&j)),
            "conditional_entropy": num(conditional_entropy(&j)),
            "row_entropy": num(entropy(&j.row_marginal())),
            "col_entropy": num(entropy(&j.col_marginal())),
        });
    }
    if let Some(sigma) = c.sigma {
        result["gaussian_entropy"] = num(gaussian_entropy(sigma)?);
    }
    Ok((result, vec![("entropy_series.csv".into(), series)]))
}
