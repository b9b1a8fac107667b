//! Monte Carlo experiments and their comparisons against closed forms.
//!
//! Replica `i` of a cell always draws from `RngStream::keyed(seed, cell, i)`,
//! and per-replica results are reduced in index order, so tables do not
//! depend on the worker count.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use super::config::{Experiment, ExperimentConfig};
use super::report::{ResultRow, ResultTable, Status};
use super::stats::{chi_square_uniform, dkw_epsilon, ols_slope, ClopperPearson};
use crate::analytic::{
    adelic_survival_bound, diffusion_constant, lemma1_limit, lemma1_survival, limit_ball_prob, prop4_sup_bound,
    AnalyticError,
};
use crate::padic::{bracket_lambda_f64, PadicError, Prime, RadialValue};
use crate::sampling::{sample_radius, sample_sphere_point, sphere_cardinality, splitmix64, JumpLaw, RngStream, SamplingError};
use crate::skorokhod::{adelic_modulus, adelic_sup_norm, SkorokhodError};
use crate::walk::{
    active_primes, choose_prime_cutoff, sample_adelic_sups, sample_norms_at, simulate_adelic, WalkError, WalkParams,
    CUTOFF_CONSTANT,
};

/// Spheres above this size are not tested for uniformity.
pub const MAX_SPHERE_CELLS: u128 = 1 << 16;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("survival hypothesis 1 <= m + ceil(log_p lambda) fails for: {0}")]
    Hypothesis(String),
    #[error("sphere p = {p}, k = {k} has {cells} points, more than {max}")]
    SphereTooLarge { p: u64, k: u32, cells: u128, max: u128 },
    #[error("cannot build worker pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Padic(#[from] PadicError),
    #[error(transparent)]
    Skorokhod(#[from] SkorokhodError),
}

type Result<T> = std::result::Result<T, ExperimentError>;

/// Stable 64-bit tag of a cell label.
fn cell_key(label: &str) -> u64 {
    label.bytes().fold(0x243F_6A88_85A3_08D3, |h, byte| splitmix64(h ^ byte as u64))
}

struct Runner<'a> {
    cfg: &'a ExperimentConfig,
    pool: rayon::ThreadPool,
    table: ResultTable,
}

impl<'a> Runner<'a> {
    fn new(cfg: &'a ExperimentConfig) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
        Ok(Runner {
            cfg,
            pool,
            table: ResultTable::new(cfg.experiment.name(), cfg.seed, cfg.alpha),
        })
    }

    /// Runs `f` on replicas `0..N` of the cell, results in replica order.
    fn replicate<T, F>(&self, label: &str, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(&mut RngStream) -> Result<T> + Sync,
    {
        let key = cell_key(label);
        let seed = self.cfg.seed;
        self.pool.install(|| {
            (0..self.cfg.samples)
                .into_par_iter()
                .map(|i| f(&mut RngStream::keyed(seed, key, i)))
                .collect()
        })
    }

    fn ci(&self, successes: u64) -> ClopperPearson {
        ClopperPearson::new(successes, self.cfg.samples, self.cfg.alpha)
    }

    #[allow(clippy::too_many_arguments)]
    fn row(
        &mut self,
        params: &str,
        metric: &str,
        empirical: Option<f64>,
        analytic: Option<f64>,
        band: Option<f64>,
        oracle: &str,
        status: Status,
    ) {
        self.table.push(ResultRow {
            experiment: self.cfg.experiment.name().to_string(),
            params: params.to_string(),
            metric: metric.to_string(),
            empirical,
            analytic,
            band,
            oracle: oracle.to_string(),
            status,
        });
    }
}

/// Runs the configured experiment and times it.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let start = Instant::now();
    let mut table = match cfg.experiment {
        Experiment::JumpLaw => run_jump_law_test(cfg),
        Experiment::Survival => run_survival_test(cfg),
        Experiment::Marginal => run_marginal_convergence(cfg),
        Experiment::Moments => run_moment_scaling_test(cfg),
        Experiment::Adelic => run_adelic_test(cfg),
        Experiment::Tightness => run_tightness_test(cfg),
        Experiment::Oracle => run_oracle(cfg),
    }?;
    table.wall_time_s = start.elapsed().as_secs_f64();
    Ok(table)
}

fn count(flags: impl IntoIterator<Item = bool>) -> u64 {
    flags.into_iter().filter(|&f| f).count() as u64
}

/// Radius tails against `p^{-kb}` with a DKW band, and sphere uniformity.
pub fn run_jump_law_test(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let n = cfg.samples as f64;
    let eps = dkw_epsilon(cfg.samples, cfg.alpha);
    for &(p, b) in &cfg.laws {
        let law = JumpLaw::new(p, b)?;
        let label = format!("jump-law/p={p}/b={b}");
        let radii = run.replicate(&label, |rng| Ok(sample_radius(&law, rng)))?;
        let kmax = radii.iter().copied().max().unwrap_or(0);
        let mut hist = vec![0u64; kmax as usize + 2];
        for &k in &radii {
            hist[k as usize] += 1;
        }
        // above[k] = #{K > k}
        let mut above = vec![0u64; hist.len()];
        for k in (0..hist.len() - 1).rev() {
            above[k] = above[k + 1] + hist[k + 1];
        }
        let mut sup = 0.0f64;
        for (k, &a) in above.iter().enumerate() {
            sup = sup.max((a as f64 / n - law.tail(k as u32)).abs());
        }
        let params = format!("p={p};b={b};N={}", cfg.samples);
        run.row(&params, "sup_k |P(K>k) - p^-kb|", Some(sup), None, Some(eps), "JumpLaw::tail", Status::check(sup <= eps));
        for k in 1..=kmax.min(6) {
            let params = format!("p={p};b={b};k={k}");
            let emp = above[k as usize] as f64 / n;
            run.row(&params, "P(K>k)", Some(emp), Some(law.tail(k)), Some(eps), "JumpLaw::tail", Status::Info);
        }
    }
    for &(p, k) in &cfg.spheres {
        let cells = sphere_cardinality(p, k)?;
        if cells > MAX_SPHERE_CELLS {
            return Err(ExperimentError::SphereTooLarge {
                p: p.get(),
                k,
                cells,
                max: MAX_SPHERE_CELLS,
            });
        }
        let label = format!("sphere/p={p}/k={k}");
        let points = run.replicate(&label, |rng| Ok(sample_sphere_point(p, k, rng)?))?;
        // Index of x = Σ_j a(-j) p^{-j} is the integer p^k x.
        let size = (p.get() as usize).pow(k);
        let mut counts = vec![0u64; size];
        let mut on_sphere = true;
        for x in &points {
            on_sphere &= crate::padic::qp_abs(x) == RadialValue::Pow(k as i64);
            let idx: u64 = x.digits().iter().map(|&(j, d)| d * p.get().pow((k as i64 + j) as u32)).sum();
            counts[idx as usize] += 1;
        }
        let observed: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
        let params = format!("p={p};k={k};N={}", cfg.samples);
        run.row(
            &params,
            "all samples have |x|_p = p^k",
            Some(on_sphere as u8 as f64),
            Some(1.0),
            None,
            "qp_abs",
            Status::check(on_sphere && observed.len() as u128 <= cells),
        );
        let target = 1.0 / cells as f64;
        let mut cell_counts = observed.clone();
        cell_counts.resize(cells as usize, 0);
        let dev = cell_counts.iter().map(|&c| (c as f64 / n - target).abs()).fold(0.0, f64::max);
        run.row(
            &params,
            "max |freq - 1/#sphere|",
            Some(dev),
            Some(target),
            Some(cfg.uniform_tol),
            "sphere_cardinality",
            Status::check(dev <= cfg.uniform_tol),
        );
        let (stat, pval) = chi_square_uniform(&cell_counts);
        run.row(&params, "chi_square_uniform", Some(stat), Some(pval), None, "chi-square p-value", Status::Info);
    }
    Ok(run.table)
}

/// Largest `e` with `p^{e-1} < λ`, i.e. the event `|x|_p / p < λ` for scaled
/// norm `p^e` reads `e <= limit`.
fn scaled_norm_limit(p: Prime, lambda: f64) -> Result<i64> {
    let bracket = bracket_lambda_f64(lambda, p)?;
    Ok(bracket.exponent().expect("bracket of a positive λ") + 1)
}

fn within(norm: RadialValue, limit: i64) -> bool {
    match norm {
        RadialValue::Zero => true,
        RadialValue::Pow(e) => e <= limit,
    }
}

fn hypothesis_violations(sigma: &[(Prime, f64)], b: f64, ms: &[u32], lambdas: &[f64], horizon: f64) -> Vec<String> {
    let mut bad = Vec::new();
    for &(p, s) in sigma {
        for &m in ms {
            for &l in lambdas {
                if let Err(AnalyticError::HypothesisViolated { .. }) = lemma1_survival(p, b, s, m, horizon, l) {
                    bad.push(format!("(p={p}, m={m}, lambda={l})"));
                }
            }
        }
    }
    bad
}

/// Sup-event frequencies against the exact finite-`m` survival probability.
pub fn run_survival_test(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let (b, horizon) = (cfg.b(), cfg.horizon());
    let sigma: Vec<(Prime, f64)> = cfg.sigma().explicit().collect();
    let bad = hypothesis_violations(&sigma, b, &cfg.m, &cfg.lambda, horizon);
    if !bad.is_empty() {
        return Err(ExperimentError::Hypothesis(bad.join(", ")));
    }
    for &(p, s) in &sigma {
        for &m in &cfg.m {
            let params = WalkParams::new(p, b, s, m)?;
            let label = format!("survival/p={p}/b={b}/sigma={s}/m={m}/T={horizon}");
            let sups = run.replicate(&label, |rng| Ok(sample_norms_at(params, &[horizon], rng)?[0].sup))?;
            for &lambda in &cfg.lambda {
                let limit = scaled_norm_limit(p, lambda)?;
                let ci = run.ci(count(sups.iter().map(|&n| within(n, limit))));
                let exact = lemma1_survival(p, b, s, m, horizon, lambda)?;
                let tag = format!("p={p};b={b};sigma={s};m={m};T={horizon};lambda={lambda}");
                run.row(
                    &tag,
                    "P(sup |x|_pA < lambda)",
                    Some(ci.estimate()),
                    Some(exact),
                    Some(ci.half_width()),
                    "lemma1_survival",
                    Status::check(ci.contains(exact)),
                );
                let limit_value = lemma1_limit(p, b, s, horizon, lambda)?;
                run.row(
                    &tag,
                    "P(sup |x|_pA < lambda) vs m->inf limit",
                    Some(ci.estimate()),
                    Some(limit_value),
                    Some(ci.half_width()),
                    "lemma1_limit",
                    Status::Info,
                );
            }
        }
    }
    Ok(run.table)
}

fn sorted_times(times: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..times.len()).collect();
    order.sort_by(|&a, &b| times[a].total_cmp(&times[b]));
    let sorted = order.iter().map(|&i| times[i]).collect();
    // position[i] = index of times[i] within the sorted list
    let mut position = vec![0; times.len()];
    for (pos, &i) in order.iter().enumerate() {
        position[i] = pos;
    }
    (sorted, position)
}

/// Empirical ball probabilities of `S^(m)(t)` against the limit series, one
/// walk per replica observed at every `t`.
pub fn run_marginal_convergence(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let b = cfg.b();
    let (k_lo, k_hi) = cfg.k_range();
    let eps = dkw_epsilon(cfg.samples, cfg.alpha);
    let band = eps + cfg.marginal_tol;
    let (times, position) = sorted_times(&cfg.t);
    let last_m = *cfg.m.last().expect("validated m list");
    for (p, s) in cfg.sigma().explicit() {
        let mut deviations: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
        for &m in &cfg.m {
            let params = WalkParams::new(p, b, s, m)?;
            let label = format!("marginal/p={p}/b={b}/sigma={s}/m={m}");
            let norms = run.replicate(&label, |rng| {
                Ok(sample_norms_at(params, &times, rng)?.into_iter().map(|x| x.value).collect::<Vec<_>>())
            })?;
            for (ti, &t) in cfg.t.iter().enumerate() {
                let col = position[ti];
                let mut sup = 0.0f64;
                for k in k_lo..=k_hi {
                    let hits = count(norms.iter().map(|row| within(row[col], k)));
                    let emp = hits as f64 / cfg.samples as f64;
                    let exact = limit_ball_prob(p, b, s, t, k, cfg.series_tol);
                    sup = sup.max((emp - exact).abs());
                }
                deviations.entry(ti).or_default().push(sup);
                let tag = format!("p={p};b={b};sigma={s};m={m};t={t};k={k_lo}..{k_hi}");
                let status = if m == last_m { Status::check(sup <= band) } else { Status::Info };
                run.row(&tag, "sup_k |P(|S|<=p^k) - limit|", Some(sup), None, Some(band), "limit_ball_prob", status);
            }
        }
        if cfg.m.len() >= 2 {
            for (ti, devs) in deviations {
                let t = cfg.t[ti];
                let tag = format!("p={p};b={b};sigma={s};t={t};m={}->{}", cfg.m[0], last_m);
                let drop = devs[0] - devs[devs.len() - 1];
                run.row(&tag, "deviation(first m) - deviation(last m)", Some(drop), None, None, "trend", Status::Info);
            }
        }
    }
    Ok(run.table)
}

/// `E|S^(m)(t)|_p^r` on a time grid and its log-log slope against `r/b`.
pub fn run_moment_scaling_test(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let (b, r) = (cfg.b(), cfg.r());
    let (times, _) = sorted_times(&cfg.t);
    let target = r / b;
    for (p, s) in cfg.sigma().explicit() {
        for &m in &cfg.m {
            let params = WalkParams::new(p, b, s, m)?;
            let label = format!("moments/p={p}/b={b}/sigma={s}/m={m}");
            let powers = run.replicate(&label, |rng| {
                Ok(sample_norms_at(params, &times, rng)?
                    .into_iter()
                    .map(|x| x.value.to_f64(p).powf(r))
                    .collect::<Vec<f64>>())
            })?;
            let mut moments = vec![0.0; times.len()];
            for row in &powers {
                for (acc, v) in moments.iter_mut().zip(row) {
                    *acc += v;
                }
            }
            for mom in &mut moments {
                *mom /= cfg.samples as f64;
            }
            let base = format!("p={p};b={b};sigma={s};m={m};r={r}");
            for (&t, &mom) in times.iter().zip(&moments) {
                run.row(&format!("{base};t={t}"), "E|S(t)|_p^r", Some(mom), None, None, "-", Status::Info);
            }
            if moments.iter().all(|&v| v == 0.0) {
                run.row(&base, "all moments vanish", Some(0.0), Some(0.0), None, "sigma=0", Status::Pass);
                continue;
            }
            let positive: Vec<(f64, f64)> =
                times.iter().zip(&moments).filter(|(_, &v)| v > 0.0).map(|(&t, &v)| (t.ln(), v.ln())).collect();
            if positive.len() >= 2 {
                let (x, y): (Vec<f64>, Vec<f64>) = positive.into_iter().unzip();
                let slope = ols_slope(&x, &y);
                let ok = (slope - target).abs() <= cfg.slope_tol;
                run.row(&base, "log-log slope", Some(slope), Some(target), Some(cfg.slope_tol), "r/b", Status::check(ok));
            }
            // C fitted at the smallest time; the bound C t^{r/b} is reported.
            let c = moments[0] / times[0].powf(target);
            for (&t, &mom) in times.iter().zip(&moments).skip(1) {
                let bound = c * t.powf(target);
                run.row(&format!("{base};t={t}"), "E|S(t)|^r vs C t^(r/b)", Some(mom), Some(bound), None, "C from smallest t", Status::Info);
            }
            for i in 0..times.len() {
                for j in i + 1..times.len() {
                    if times[j] == 2.0 * times[i] && moments[i] > 0.0 {
                        run.row(
                            &format!("{base};t={}", times[i]),
                            "E|S(2t)|^r / E|S(t)|^r",
                            Some(moments[j] / moments[i]),
                            Some(2f64.powf(target)),
                            None,
                            "2^(r/b)",
                            Status::Info,
                        );
                    }
                }
            }
        }
    }
    Ok(run.table)
}

fn lambdas_or_one(cfg: &ExperimentConfig) -> Vec<f64> {
    if cfg.lambda.is_empty() {
        vec![1.0]
    } else {
        cfg.lambda.clone()
    }
}

/// Frequency of `A(T, M; m)` and of `Λ(T, M, λ)` against exact products of
/// single-prime factors and against the summed-tail survival bound.
pub fn run_adelic_test(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let (b, horizon, sigma) = (cfg.b(), cfg.horizon(), cfg.sigma());
    let from = cfg.cutoff_from;
    let lambdas = lambdas_or_one(cfg);
    for &m in &cfg.m {
        let cutoff = choose_prime_cutoff(sigma, b, m, horizon, cfg.epsilon)?;
        let active = active_primes(sigma, &cutoff);
        let tested: Vec<(Prime, f64)> =
            active.iter().filter(|q| q.get() >= from).map(|&q| (q, sigma.sigma(q))).collect();
        if m == 0 && !tested.is_empty() {
            return Err(ExperimentError::Hypothesis(format!("(m=0, lambda=1) for {} primes", tested.len())));
        }
        let label = format!("adelic/b={b}/m={m}/T={horizon}/eps={}", cfg.epsilon);
        let limits: Vec<Vec<i64>> = lambdas
            .iter()
            .map(|&l| tested.iter().map(|&(q, _)| scaled_norm_limit(q, l)).collect::<Result<_>>())
            .collect::<Result<_>>()?;
        let skip = active.len() - tested.len();
        let events = run.replicate(&label, |rng| {
            let sups = sample_adelic_sups(sigma, b, m, horizon, &active, rng)?;
            let tested_sups = &sups[skip..];
            let a_event = tested_sups.iter().all(|&n| within(n, 0));
            let lambda_events: Vec<bool> =
                limits.iter().map(|lim| tested_sups.iter().zip(lim).all(|(&n, &l)| within(n, l))).collect();
            Ok((a_event, lambda_events))
        })?;
        let base = format!("b={b};m={m};T={horizon};M={from};P_max={};eps={}", cutoff.p_max, cfg.epsilon);
        run.row(&base, "omitted-prime exit bound", None, Some(cutoff.bound), None, "choose_prime_cutoff", Status::Info);

        let ci = run.ci(count(events.iter().map(|e| e.0)));
        let mut product = 1.0;
        for &(q, s) in &tested {
            product *= lemma1_survival(q, b, s, m, horizon, 1.0)?;
        }
        run.row(
            &base,
            "P(A(T,M;m))",
            Some(ci.estimate()),
            Some(product),
            Some(ci.half_width()),
            "prod lemma1_survival(lambda=1)",
            Status::check(ci.contains(product)),
        );
        // Omitted components are independent and stay in Z_p with probability
        // at least 1 - cutoff.bound, which lower-bounds the untruncated event.
        let bound = adelic_survival_bound(sigma, b, from, horizon, CUTOFF_CONSTANT)?;
        let untruncated = ci.estimate() * (1.0 - cutoff.bound);
        run.row(
            &base,
            "P(A(T,M;m)) (1 - omitted bound) >= bound - CI",
            Some(untruncated),
            Some(bound),
            Some(ci.lower_slack()),
            "adelic_survival_bound(c=2)",
            Status::check(untruncated >= bound - ci.lower_slack()),
        );

        for (li, &lambda) in lambdas.iter().enumerate() {
            let ci = run.ci(count(events.iter().map(|e| e.1[li])));
            let tag = format!("{base};lambda={lambda}");
            let exact: std::result::Result<f64, AnalyticError> =
                tested.iter().map(|&(q, s)| lemma1_survival(q, b, s, m, horizon, lambda)).product();
            match exact {
                Ok(v) => run.row(
                    &tag,
                    "P(Lambda(T,M,lambda))",
                    Some(ci.estimate()),
                    Some(v),
                    Some(ci.half_width()),
                    "prod lemma1_survival",
                    Status::check(ci.contains(v)),
                ),
                Err(AnalyticError::HypothesisViolated { .. }) => {
                    run.row(&tag, "P(Lambda(T,M,lambda))", Some(ci.estimate()), None, Some(ci.half_width()), "hypothesis fails", Status::Info)
                }
                Err(e) => return Err(e.into()),
            }
            let limit: f64 = tested
                .iter()
                .map(|&(q, s)| lemma1_limit(q, b, s, horizon, lambda))
                .product::<std::result::Result<f64, _>>()?;
            run.row(&tag, "P(Lambda(T,M,lambda)) vs m->inf", Some(ci.estimate()), Some(limit), Some(ci.half_width()), "prod lemma1_limit", Status::Info);
        }
    }
    Ok(run.table)
}

/// Modulus exceedance along a decreasing δ grid and sup-norm frequencies
/// against the uniform-in-`m` lower bound.
pub fn run_tightness_test(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let (b, horizon, sigma) = (cfg.b(), cfg.horizon(), cfg.sigma());
    for &m in &cfg.m {
        let label = format!("tightness/b={b}/m={m}/T={horizon}/eps={}", cfg.epsilon);
        let samples = run.replicate(&label, |rng| {
            let path = simulate_adelic(sigma, b, m, horizon, cfg.epsilon, rng)?;
            let moduli = cfg
                .delta
                .iter()
                .map(|&d| adelic_modulus(&path, d, horizon))
                .collect::<std::result::Result<Vec<f64>, _>>()?;
            Ok((moduli, adelic_sup_norm(&path, horizon)?))
        })?;
        let base = format!("b={b};m={m};T={horizon}");
        for &lambda in &cfg.lambda {
            let cis: Vec<ClopperPearson> = (0..cfg.delta.len())
                .map(|di| run.ci(count(samples.iter().map(|s| s.0[di] >= lambda))))
                .collect();
            for (ci, &d) in cis.iter().zip(&cfg.delta) {
                run.row(
                    &format!("{base};lambda={lambda};delta={d}"),
                    "P(w'_T(delta) >= lambda)",
                    Some(ci.estimate()),
                    None,
                    Some(ci.half_width()),
                    "adelic_modulus",
                    Status::Info,
                );
            }
            if cis.len() >= 2 {
                let (mut worst, mut slack_at_worst, mut ok) = (f64::NEG_INFINITY, 0.0, true);
                for w in cis.windows(2) {
                    let rise = w[1].estimate() - w[0].estimate();
                    let slack = w[0].half_width() + w[1].half_width();
                    ok &= rise <= slack;
                    if rise > worst {
                        worst = rise;
                        slack_at_worst = slack;
                    }
                }
                run.row(
                    &format!("{base};lambda={lambda}"),
                    "max rise of exceedance as delta decreases",
                    Some(worst),
                    Some(0.0),
                    Some(slack_at_worst),
                    "monotone in delta",
                    Status::check(ok),
                );
            }
            let ci = run.ci(count(samples.iter().map(|s| s.1 < lambda)));
            let bound = prop4_sup_bound(sigma, b, horizon, lambda)?;
            let tag = format!("{base};lambda={lambda}");
            run.row(
                &tag,
                "P(sup |x|_A < lambda) >= bound - CI",
                Some(ci.estimate()),
                Some(bound),
                Some(ci.lower_slack()),
                "prop4_sup_bound",
                Status::check(ci.estimate() >= bound - ci.lower_slack()),
            );
            run.row(&tag, "P(sup |x|_A >= lambda)", Some(1.0 - ci.estimate()), None, Some(ci.half_width()), "-", Status::Info);
        }
    }
    Ok(run.table)
}

/// Direct evaluation of the closed forms for the configured parameters.
pub fn run_oracle(cfg: &ExperimentConfig) -> Result<ResultTable> {
    let mut run = Runner::new(cfg)?;
    let b = cfg.b();
    let sigma = cfg.sigma();
    let lambdas = lambdas_or_one(cfg);
    for (p, s) in sigma.explicit() {
        let base = format!("p={p};b={b};sigma={s}");
        run.row(&base, "D_p", None, Some(diffusion_constant(p, b, s)), None, "diffusion_constant", Status::Info);
        if let Some(horizon) = cfg.horizon {
            for &m in &cfg.m {
                for &lambda in &lambdas {
                    let tag = format!("{base};m={m};T={horizon};lambda={lambda}");
                    match lemma1_survival(p, b, s, m, horizon, lambda) {
                        Ok(v) => run.row(&tag, "survival", None, Some(v), None, "lemma1_survival", Status::Info),
                        Err(AnalyticError::HypothesisViolated { .. }) => {}
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            for &lambda in &lambdas {
                let v = lemma1_limit(p, b, s, horizon, lambda)?;
                run.row(&format!("{base};T={horizon};lambda={lambda}"), "survival limit", None, Some(v), None, "lemma1_limit", Status::Info);
            }
        }
        if let Some((lo, hi)) = cfg.k_range {
            for &t in &cfg.t {
                for k in lo..=hi {
                    let v = limit_ball_prob(p, b, s, t, k, cfg.series_tol);
                    run.row(&format!("{base};t={t};k={k}"), "P(|Y_t|<=p^k)", None, Some(v), None, "limit_ball_prob", Status::Info);
                }
            }
        }
    }
    if let Some(horizon) = cfg.horizon {
        let base = format!("b={b};T={horizon};M={}", cfg.cutoff_from);
        let v = adelic_survival_bound(sigma, b, cfg.cutoff_from, horizon, CUTOFF_CONSTANT)?;
        run.row(&base, "adelic survival bound", None, Some(v), None, "adelic_survival_bound(c=2)", Status::Info);
        for &lambda in &lambdas {
            let v = prop4_sup_bound(sigma, b, horizon, lambda)?;
            run.row(&format!("b={b};T={horizon};lambda={lambda}"), "sup bound", None, Some(v), None, "prop4_sup_bound", Status::Info);
        }
    }
    Ok(run.table)
}
