//! Closed-form survival probabilities, scaling limits and prime-tail bounds.
//!
//! Everything here is a pure function of the model parameters. Formulas are
//! evaluated in `f64`; the discontinuous step count `⌊D p^{mb} T⌋` is computed
//! exactly near integer boundaries (see [`walk_step_count`]).

use std::sync::OnceLock;

use num::{BigInt, BigRational, ToPrimitive};
use thiserror::Error;

use crate::padic::{bracket_lambda_f64, PadicError, Prime};
use crate::walk::SigmaSpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error("ball index k must be at least 1, got {0}")]
    InvalidBallIndex(i64),
    #[error("hypothesis 1 <= m + ceil(log_p lambda) fails: p = {p}, m = {m}, lambda = {lambda}, ceil(log_p lambda) = {ceil_log}")]
    HypothesisViolated {
        p: u64,
        m: u32,
        lambda: f64,
        ceil_log: i64,
    },
    #[error("constant c must exceed 1, got {0}")]
    InvalidConstant(f64),
    #[error("series tolerance must lie in (0, 1), got {0}")]
    InvalidTolerance(f64),
    #[error("{name} must be nonnegative and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Default upper limit of explicit prime summation in tail sums.
pub const DEFAULT_SIEVE_LIMIT: u64 = 1_000_000;

/// Absolute truncation tolerance for series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    abs_tol: f64,
}

impl SeriesTolerance {
    pub fn new(abs_tol: f64) -> Result<Self, AnalyticError> {
        if !(abs_tol > 0.0 && abs_tol < 1.0) {
            return Err(AnalyticError::InvalidTolerance(abs_tol));
        }
        Ok(SeriesTolerance { abs_tol })
    }

    pub fn abs_tol(&self) -> f64 {
        self.abs_tol
    }
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        SeriesTolerance { abs_tol: 1e-10 }
    }
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), AnalyticError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(AnalyticError::InvalidParameter { name, value })
    }
}

/// `p^b (p-1) / (p^{b+1} - 1)`, always in (0, 1).
pub fn rate_factor(p: Prime, b: f64) -> f64 {
    let p = p.as_f64();
    (p - 1.0) / (p - p.powf(-b))
}

/// `D = p^b (p-1) σ_p / (p^{b+1} - 1)`.
pub fn diffusion_constant(p: Prime, b: f64, sigma_p: f64) -> f64 {
    rate_factor(p, b) * sigma_p
}

/// `⌊D p^{mb} T⌋`, the number of walk steps up to time `T`.
///
/// When the float product lands within a few ulps of an integer and `b` is a
/// nonnegative integer, the floor is recomputed in exact rational arithmetic
/// from the binary values of `σ_p` and `T`.
pub fn walk_step_count(p: Prime, b: f64, sigma_p: f64, m: u32, t: f64) -> u64 {
    if sigma_p <= 0.0 || t <= 0.0 {
        return 0;
    }
    let x = diffusion_constant(p, b, sigma_p) * p.as_f64().powf(m as f64 * b) * t;
    if !x.is_finite() || x >= u64::MAX as f64 {
        return u64::MAX;
    }
    let nearest = x.round();
    let near_integer = (x - nearest).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0);
    if near_integer && b.fract() == 0.0 && b <= 64.0 {
        if let Some(exact) = exact_step_count(p, b as u32, sigma_p, m, t) {
            return exact;
        }
    }
    x.floor() as u64
}

fn exact_step_count(p: Prime, b: u32, sigma_p: f64, m: u32, t: f64) -> Option<u64> {
    let pb = BigInt::from(p.get());
    let numer = pb.pow(b) * (pb.clone() - 1u32) * pb.pow(m.checked_mul(b)?);
    let denom = pb.pow(b + 1) - 1u32;
    let value = BigRational::new(numer, denom)
        * BigRational::from_float(sigma_p)?
        * BigRational::from_float(t)?;
    value.floor().to_integer().to_u64()
}

/// `P(sup_{j<=n} |S_j|_p <= p^k) = (1 - p^{-bk})^n`.
pub fn walk_sup_ball_prob(p: Prime, b: f64, k: i64, n: u64) -> Result<f64, AnalyticError> {
    if k < 1 {
        return Err(AnalyticError::InvalidBallIndex(k));
    }
    let x = p.as_f64().powf(-b * k as f64);
    Ok(pow_one_minus(x, n))
}

// (1 - x)^n for x in [0, 1], accurate for small x and large n.
fn pow_one_minus(x: f64, n: u64) -> f64 {
    pow_one_minus_real(x, n as f64)
}

fn pow_one_minus_real(x: f64, n: f64) -> f64 {
    if n == 0.0 {
        return 1.0;
    }
    if x >= 1.0 {
        return 0.0;
    }
    (n * (-x).ln_1p()).exp()
}

// ceil(log_p λ) via the exact bracket: [λ]_p = p^{ceil(log_p λ) - 1}.
fn ceil_log(p: Prime, lambda: f64) -> Result<i64, AnalyticError> {
    let bracket = bracket_lambda_f64(lambda, p)?;
    Ok(bracket.exponent().expect("bracket of a positive value is a power") + 1)
}

/// Probability that the scaled walk stays strictly inside `λ` in the norm
/// `|·|_p / p` up to time `T`:
/// `(1 - (p[λ]_p)^{-b} p^{-mb})^{⌊D p^{mb} T⌋}`.
pub fn lemma1_survival(
    p: Prime,
    b: f64,
    sigma_p: f64,
    m: u32,
    t: f64,
    lambda: f64,
) -> Result<f64, AnalyticError> {
    check_nonneg("sigma_p", sigma_p)?;
    check_nonneg("T", t)?;
    let ceil_log = ceil_log(p, lambda)?;
    if (m as i64) + ceil_log < 1 {
        return Err(AnalyticError::HypothesisViolated {
            p: p.get(),
            m,
            lambda,
            ceil_log,
        });
    }
    // (p[λ]_p)^{-b} p^{-mb} = p^{-b (ceil_log + m)}
    let x = p.as_f64().powf(-b * (ceil_log + m as i64) as f64);
    Ok(pow_one_minus_real(x, step_count_real(p, b, sigma_p, m, t)))
}

// Step count as f64; beyond u64 range the floating floor is used.
fn step_count_real(p: Prime, b: f64, sigma_p: f64, m: u32, t: f64) -> f64 {
    match walk_step_count(p, b, sigma_p, m, t) {
        u64::MAX => (diffusion_constant(p, b, sigma_p) * p.as_f64().powf(m as f64 * b) * t).floor(),
        n => n as f64,
    }
}

/// The `m -> ∞` limit of [`lemma1_survival`]:
/// `exp(-T [λ]_p^{-b} (p-1) σ_p / (p^{b+1} - 1))`.
pub fn lemma1_limit(p: Prime, b: f64, sigma_p: f64, t: f64, lambda: f64) -> Result<f64, AnalyticError> {
    check_nonneg("sigma_p", sigma_p)?;
    check_nonneg("T", t)?;
    let bracket_exp = ceil_log(p, lambda)? - 1;
    let pf = p.as_f64();
    let inv_bracket_b = pf.powf(-b * bracket_exp as f64);
    let factor = (pf - 1.0) / (pf.powf(b + 1.0) - 1.0);
    Ok((-t * inv_bracket_b * factor * sigma_p).exp())
}

/// `P(|Y_t|_p <= p^k)` for the limit process, from the radial series
/// `(1 - 1/p) Σ_{i>=0} p^{-i} exp(-σ_p t p^{-(k+i)b})`.
///
/// After `I` terms the remainder lies in `[p^{-I} e^{-x_I}, p^{-I}]` with
/// `x_I = σ_p t p^{-(k+I)b}`; the lower end is added and the sum stops once
/// the width `p^{-I}(1 - e^{-x_I})` is below the tolerance.
pub fn limit_ball_prob(p: Prime, b: f64, sigma_p: f64, t: f64, k: i64, tol: SeriesTolerance) -> f64 {
    let pf = p.as_f64();
    let rate = sigma_p * t;
    let shell = 1.0 - 1.0 / pf;
    let mut sum = 0.0;
    let mut weight = 1.0; // p^{-i}
    let mut i: i64 = 0;
    loop {
        let x = rate * pf.powf(-b * (k + i) as f64);
        let width = weight * -(-x).exp_m1();
        if width <= tol.abs_tol() || weight == 0.0 {
            sum += weight * (-x).exp();
            break;
        }
        sum += shell * weight * (-x).exp();
        weight /= pf;
        i += 1;
    }
    sum.clamp(0.0, 1.0)
}

/// Result of a prime-tail summation: the computed value plus a rigorous upper
/// bound on the omitted remainder.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailSum {
    pub value: f64,
    pub remainder_bound: f64,
}

impl TailSum {
    pub fn upper(&self) -> f64 {
        self.value + self.remainder_bound
    }
}

/// `Σ_{p>=M} p^b (p-1) σ_p / (p^{b+1} - 1)` with the default sieve limit.
pub fn prime_tail_sum(sigma: &SigmaSpec, b: f64, from: u64) -> TailSum {
    prime_tail_sum_with_limit(sigma, b, from, DEFAULT_SIEVE_LIMIT)
}

/// As [`prime_tail_sum`], summing primes explicitly up to `limit`. Beyond it a
/// power tail `a p^{-s}` is bounded by `a ∫_{limit}^∞ x^{-s} dx`, valid since
/// the rate factor is below one.
pub fn prime_tail_sum_with_limit(sigma: &SigmaSpec, b: f64, from: u64, limit: u64) -> TailSum {
    let explicit: f64 = sigma
        .explicit()
        .filter(|(p, _)| p.get() >= from && (sigma.tail().is_none() || p.get() > limit))
        .map(|(p, s)| diffusion_constant(p, b, s))
        .sum();
    let Some(tail) = sigma.tail() else {
        return TailSum {
            value: explicit,
            remainder_bound: 0.0,
        };
    };
    let mut value = explicit;
    if from <= limit {
        for &q in primes_up_to_cached(limit).iter().filter(|&&q| q >= from) {
            let q = Prime::new_unchecked(q);
            value += diffusion_constant(q, b, sigma.sigma(q));
        }
    }
    let lower = (limit as f64).max(from as f64 - 1.0).max(1.0);
    let remainder_bound = tail.a * lower.powf(1.0 - tail.s) / (tail.s - 1.0);
    TailSum {
        value,
        remainder_bound,
    }
}

/// Lower bound `exp(-c T Σ_{p>=M} ...)` on the probability that no component
/// at a prime `>= M` leaves `Z_p` by time `T`.
pub fn adelic_survival_bound(sigma: &SigmaSpec, b: f64, from: u64, t: f64, c: f64) -> Result<f64, AnalyticError> {
    if !(c > 1.0 && c.is_finite()) {
        return Err(AnalyticError::InvalidConstant(c));
    }
    check_nonneg("T", t)?;
    let tail = prime_tail_sum(sigma, b, from);
    Ok((-c * t * tail.upper()).exp())
}

/// `exp(-λ^{-b} T Σ_p p^b (p-1) σ_p / (p^{b+1} - 1))`, a lower bound on
/// `liminf_m P(sup_{s<=T} |x(s)|_{A_Q} < λ)`.
pub fn prop4_sup_bound(sigma: &SigmaSpec, b: f64, t: f64, lambda: f64) -> Result<f64, AnalyticError> {
    if !(lambda > 0.0) {
        return Err(PadicError::NonPositiveLambda(lambda.to_string()).into());
    }
    check_nonneg("T", t)?;
    let total = prime_tail_sum(sigma, b, 2);
    Ok((-lambda.powf(-b) * t * total.upper()).exp())
}

/// All primes `<= n` in increasing order (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

pub(crate) fn primes_up_to_cached(n: u64) -> std::borrow::Cow<'static, [u64]> {
    static DEFAULT: OnceLock<Vec<u64>> = OnceLock::new();
    if n == DEFAULT_SIEVE_LIMIT {
        std::borrow::Cow::Borrowed(DEFAULT.get_or_init(|| primes_up_to(DEFAULT_SIEVE_LIMIT)))
    } else {
        std::borrow::Cow::Owned(primes_up_to(n))
    }
}
