//! Scaled single-prime walks `S^(m)(t) = p^m S_{⌊D p^{mb} t⌋}` and adelic
//! product walks over a finite set of active primes.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::analytic::{self, diffusion_constant, walk_step_count, DEFAULT_SIEVE_LIMIT};
use crate::padic::{qp_shift, GpElement, PadicError, Prime, QpDigits, RadialValue};
use crate::sampling::{JumpLaw, PackedJumpSampler, RngStream, SamplingError};

/// Constant `c > 1` used in the truncation bound for omitted primes.
pub const CUTOFF_CONSTANT: f64 = 2.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("{name} must be nonnegative and finite, got {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("time {t} lies outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("sigma tail exponent s = {0} must exceed 1 for summability")]
    NotSummable(f64),
    #[error("truncation level epsilon must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),
    #[error("exp(-c x) <= 1 - x fails at x = p^(-mb) for p = {p} (m = {m}, b = {b}, c = {c})")]
    CutoffCondition { p: u64, m: u32, b: f64, c: f64 },
    #[error("no prime cutoff below {limit} reaches truncation level {epsilon}")]
    CutoffNotFound { limit: u64, epsilon: f64 },
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

fn check_nonneg(name: &'static str, value: f64) -> Result<(), WalkError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(WalkError::InvalidParameter { name, value })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    prime: Prime,
    b: f64,
    sigma_p: f64,
    m: u32,
}

impl WalkParams {
    pub fn new(prime: Prime, b: f64, sigma_p: f64, m: u32) -> Result<Self, WalkError> {
        if !(b.is_finite() && b > 0.0) {
            return Err(SamplingError::InvalidExponent(b).into());
        }
        check_nonneg("sigma_p", sigma_p)?;
        Ok(WalkParams {
            prime,
            b,
            sigma_p,
            m,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn sigma_p(&self) -> f64 {
        self.sigma_p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `D = p^b (p-1) σ_p / (p^{b+1} - 1)`.
    pub fn diffusion(&self) -> f64 {
        diffusion_constant(self.prime, self.b, self.sigma_p)
    }

    /// Steps per unit time, `D p^{mb}`.
    pub fn rate(&self) -> f64 {
        self.diffusion() * self.prime.as_f64().powf(self.m as f64 * self.b)
    }

    /// `n(t) = ⌊D p^{mb} t⌋`.
    pub fn step_count(&self, t: f64) -> u64 {
        walk_step_count(self.prime, self.b, self.sigma_p, self.m, t)
    }
}

/// A cadlag step path of one scaled walk up to its horizon.
///
/// Jump `j` (1-based) happens at time `j / R`; the unscaled running sums
/// `S_j` are stored, and the scaled value is `p^m S_j`.
#[derive(Debug, Clone)]
pub struct SinglePrimePath {
    params: WalkParams,
    horizon: f64,
    times: Vec<f64>,
    sums: Vec<GpElement>,
    radii: Vec<u32>,
    // |S_j|_p for j = 0..=n, unscaled; entry 0 is the starting point.
    state_norms: Vec<RadialValue>,
}

impl SinglePrimePath {
    pub fn params(&self) -> &WalkParams {
        &self.params
    }

    pub fn prime(&self) -> Prime {
        self.params.prime
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn jump_count(&self) -> usize {
        self.times.len()
    }

    pub fn jump_times(&self) -> &[f64] {
        &self.times
    }

    /// `k` such that the `j`-th jump (0-based) has `|X|_p = p^k`.
    pub fn jump_radius(&self, j: usize) -> u32 {
        self.radii[j]
    }

    /// `|p^m X_j|_p` for the `j`-th jump (0-based).
    pub fn scaled_jump_norm(&self, j: usize) -> RadialValue {
        RadialValue::Pow(self.radii[j] as i64 - self.params.m as i64)
    }

    /// `|p^m S_i|_p` after `i` jumps.
    pub fn scaled_state_norm(&self, i: usize) -> RadialValue {
        self.state_norms[i].scale(-(self.params.m as i64))
    }

    /// Unscaled running sum after `i` jumps.
    pub fn unscaled_state(&self, i: usize) -> GpElement {
        match i {
            0 => GpElement::zero(self.params.prime),
            _ => self.sums[i - 1].clone(),
        }
    }

    /// Scaled value `p^m S_i` after `i` jumps.
    pub fn state_value(&self, i: usize) -> QpDigits {
        qp_shift(&self.unscaled_state(i).to_digits(), self.params.m as i64)
    }

    /// Number of jumps at times `<= t`.
    pub fn jumps_until(&self, t: f64) -> usize {
        self.times.partition_point(|&tau| tau <= t)
    }

    fn check_time(&self, t: f64) -> Result<(), WalkError> {
        if t.is_nan() || t < 0.0 || t > self.horizon {
            return Err(WalkError::TimeOutOfRange {
                t,
                horizon: self.horizon,
            });
        }
        Ok(())
    }
}

pub fn simulate_single(params: WalkParams, horizon: f64, rng: &mut RngStream) -> Result<SinglePrimePath, WalkError> {
    check_nonneg("T", horizon)?;
    let n = params.step_count(horizon) as usize;
    let rate = params.rate();
    let mut times = Vec::with_capacity(n);
    let mut sums = Vec::with_capacity(n);
    let mut radii = Vec::with_capacity(n);
    let mut state_norms = Vec::with_capacity(n + 1);
    state_norms.push(RadialValue::Zero);
    if n > 0 {
        let mut sampler = PackedJumpSampler::new(JumpLaw::new(params.prime, params.b)?);
        let mut acc = GpElement::zero(params.prime);
        for j in 1..=n {
            let (k, jump) = sampler.sample(rng);
            acc.add_assign(&jump);
            times.push((j as f64 / rate).min(horizon));
            radii.push(k);
            state_norms.push(acc.abs());
            sums.push(acc.clone());
        }
    }
    Ok(SinglePrimePath {
        params,
        horizon,
        times,
        sums,
        radii,
        state_norms,
    })
}

/// Scaled norm of the walk and of its running sup at one observation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormSample {
    pub value: RadialValue,
    pub sup: RadialValue,
}

/// Norms of `S^(m)(t_i)` and `sup_{s<=t_i}` at nondecreasing times, without
/// storing the path. Consumes the stream exactly as [`simulate_single`] does
/// up to the last time.
pub fn sample_norms_at(params: WalkParams, times: &[f64], rng: &mut RngStream) -> Result<Vec<NormSample>, WalkError> {
    let mut out = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    for &t in times {
        check_nonneg("t", t)?;
        if t < prev {
            return Err(WalkError::InvalidParameter { name: "t (nondecreasing)", value: t });
        }
        prev = t;
    }
    let shift = -(params.m as i64);
    let mut sampler = PackedJumpSampler::new(JumpLaw::new(params.prime, params.b)?);
    let mut acc = GpElement::zero(params.prime);
    let (mut done, mut sup) = (0u64, RadialValue::Zero);
    for &t in times {
        let n = params.step_count(t);
        while done < n {
            let (_, jump) = sampler.sample(rng);
            acc.add_assign(&jump);
            sup = sup.max(acc.abs());
            done += 1;
        }
        out.push(NormSample {
            value: acc.abs().scale(shift),
            sup: sup.scale(shift),
        });
    }
    Ok(out)
}

/// Scaled value of the path at time `t`; right-continuous at jump times.
pub fn path_value(path: &SinglePrimePath, t: f64) -> Result<QpDigits, WalkError> {
    path.check_time(t)?;
    Ok(path.state_value(path.jumps_until(t)))
}

/// `sup_{s<=T} |p^m S_{n(s)}|_p`, attained at the start or at a jump.
pub fn sup_scaled_norm(path: &SinglePrimePath, t: f64) -> Result<RadialValue, WalkError> {
    path.check_time(t)?;
    let upto = path.jumps_until(t);
    let max = path.state_norms[..=upto].iter().copied().max().unwrap_or(RadialValue::Zero);
    Ok(max.scale(-(path.params.m as i64)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerTail {
    pub a: f64,
    pub s: f64,
}

/// Diffusion coefficients `σ_p`: explicit values for listed primes and an
/// optional power law `σ_p = a p^{-s}` for every other prime.
#[derive(Debug, Clone, PartialEq)]
pub struct SigmaSpec {
    explicit: BTreeMap<Prime, f64>,
    tail: Option<PowerTail>,
}

impl SigmaSpec {
    pub fn new(explicit: BTreeMap<Prime, f64>, tail: Option<PowerTail>) -> Result<Self, WalkError> {
        for &value in explicit.values() {
            check_nonneg("sigma_p", value)?;
        }
        if let Some(PowerTail { a, s }) = tail {
            check_nonneg("tail a", a)?;
            if !(s.is_finite() && s > 1.0) {
                return Err(WalkError::NotSummable(s));
            }
        }
        Ok(SigmaSpec { explicit, tail })
    }

    pub fn sigma(&self, p: Prime) -> f64 {
        match (self.explicit.get(&p), self.tail) {
            (Some(&v), _) => v,
            (None, Some(PowerTail { a, s })) => a * p.as_f64().powf(-s),
            (None, None) => 0.0,
        }
    }

    pub fn explicit(&self) -> impl Iterator<Item = (Prime, f64)> + '_ {
        self.explicit.iter().map(|(&p, &v)| (p, v))
    }

    pub fn tail(&self) -> Option<PowerTail> {
        self.tail
    }

    /// True when only finitely many `σ_p` are nonzero.
    pub fn is_finitely_supported(&self) -> bool {
        self.tail.is_none_or(|t| t.a == 0.0)
    }

    /// Listed primes with positive coefficient.
    pub fn explicit_support(&self) -> Vec<Prime> {
        self.explicit.iter().filter(|(_, &v)| v > 0.0).map(|(&p, _)| p).collect()
    }
}

/// Active primes are those below `p_max`; `bound` caps the probability that
/// any omitted component leaves `Z_p` before the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrimeCutoff {
    pub p_max: u64,
    pub bound: f64,
}

/// Smallest prime cutoff `M` with `1 - exp(-c T Σ_{p>=M} D_p) <= ε`, using
/// `c = 2` after checking `exp(-c p^{-mb}) <= 1 - p^{-mb}` for `p >= M`.
pub fn choose_prime_cutoff(sigma: &SigmaSpec, b: f64, m: u32, horizon: f64, epsilon: f64) -> Result<PrimeCutoff, WalkError> {
    check_nonneg("T", horizon)?;
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(WalkError::InvalidEpsilon(epsilon));
    }
    if sigma.is_finitely_supported() {
        let p_max = sigma.explicit_support().last().map_or(2, |p| p.get() + 1);
        return Ok(PrimeCutoff { p_max, bound: 0.0 });
    }
    let c = CUTOFF_CONSTANT;
    let primes = analytic::primes_up_to_cached(DEFAULT_SIEVE_LIMIT);
    let terms: Vec<f64> = primes
        .iter()
        .map(|&q| {
            let q = Prime::new_unchecked(q);
            diffusion_constant(q, b, sigma.sigma(q))
        })
        .collect();
    // Everything beyond the sieve: explicit primes plus the integral bound.
    let beyond = analytic::prime_tail_sum(sigma, b, DEFAULT_SIEVE_LIMIT + 1).upper();
    let mut suffix = vec![beyond; terms.len() + 1];
    for i in (0..terms.len()).rev() {
        suffix[i] = suffix[i + 1] + terms[i];
    }
    for (i, &q) in primes.iter().enumerate() {
        let bound = -(-c * horizon * suffix[i]).exp_m1();
        if bound <= epsilon {
            let x = (q as f64).powf(-(m as f64) * b);
            if (-c * x).exp() > 1.0 - x {
                return Err(WalkError::CutoffCondition { p: q, m, b, c });
            }
            return Ok(PrimeCutoff { p_max: q, bound });
        }
    }
    Err(WalkError::CutoffNotFound {
        limit: DEFAULT_SIEVE_LIMIT,
        epsilon,
    })
}

/// Independent scaled walks over the active primes of a diffusion sequence.
#[derive(Debug, Clone)]
pub struct AdelicPath {
    components: BTreeMap<Prime, SinglePrimePath>,
    cutoff: PrimeCutoff,
    horizon: f64,
}

impl AdelicPath {
    pub fn components(&self) -> &BTreeMap<Prime, SinglePrimePath> {
        &self.components
    }

    pub fn component(&self, p: Prime) -> Option<&SinglePrimePath> {
        self.components.get(&p)
    }

    pub fn p_max(&self) -> u64 {
        self.cutoff.p_max
    }

    pub fn truncation_bound(&self) -> f64 {
        self.cutoff.bound
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }
}

/// Simulates every active component with its own substream of `rng`, keyed
/// by the prime; components at primes `>= P_max` are held at zero.
pub fn simulate_adelic(
    sigma: &SigmaSpec,
    b: f64,
    m: u32,
    horizon: f64,
    epsilon: f64,
    rng: &RngStream,
) -> Result<AdelicPath, WalkError> {
    let cutoff = choose_prime_cutoff(sigma, b, m, horizon, epsilon)?;
    let active = active_primes(sigma, &cutoff);
    let mut components = BTreeMap::new();
    for q in active {
        let params = WalkParams::new(q, b, sigma.sigma(q), m)?;
        let mut stream = rng.substream(q.get());
        components.insert(q, simulate_single(params, horizon, &mut stream)?);
    }
    Ok(AdelicPath {
        components,
        cutoff,
        horizon,
    })
}

/// Primes below the cutoff with positive coefficient, in increasing order.
pub fn active_primes(sigma: &SigmaSpec, cutoff: &PrimeCutoff) -> Vec<Prime> {
    if sigma.is_finitely_supported() {
        return sigma.explicit_support();
    }
    analytic::primes_up_to(cutoff.p_max.saturating_sub(1))
        .into_iter()
        .map(Prime::new_unchecked)
        .filter(|&q| sigma.sigma(q) > 0.0)
        .collect()
}

/// Scaled sup norms `sup_{s<=T} |x_q(s)|_q` of the listed components, drawn
/// from the same substreams as [`simulate_adelic`] but without storing paths.
pub fn sample_adelic_sups(
    sigma: &SigmaSpec,
    b: f64,
    m: u32,
    horizon: f64,
    active: &[Prime],
    rng: &RngStream,
) -> Result<Vec<RadialValue>, WalkError> {
    active
        .iter()
        .map(|&q| {
            let params = WalkParams::new(q, b, sigma.sigma(q), m)?;
            let mut stream = rng.substream(q.get());
            Ok(sample_norms_at(params, &[horizon], &mut stream)?[0].sup)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::qp_abs;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    #[test]
    fn zero_horizon_and_zero_sigma() {
        let mut rng = RngStream::new(0, 0);
        let params = WalkParams::new(p(2), 1.0, 1.0, 3).unwrap();
        let path = simulate_single(params, 0.0, &mut rng).unwrap();
        assert_eq!(path.jump_count(), 0);
        assert!(path_value(&path, 0.0).unwrap().is_zero());

        let params = WalkParams::new(p(2), 1.0, 0.0, 3).unwrap();
        let path = simulate_single(params, 50.0, &mut rng).unwrap();
        assert_eq!(path.jump_count(), 0);
        assert!(path_value(&path, 37.5).unwrap().is_zero());
        assert_eq!(sup_scaled_norm(&path, 50.0).unwrap(), RadialValue::Zero);
    }

    #[test]
    fn step_count_example() {
        let mut rng = RngStream::new(0, 0);
        let params = WalkParams::new(p(2), 1.0, 1.0, 3).unwrap();
        let path = simulate_single(params, 1.0, &mut rng).unwrap();
        assert_eq!(path.jump_count(), 5);
    }

    #[test]
    fn path_value_is_right_continuous() {
        let mut rng = RngStream::new(4, 2);
        // σ = 1.5 makes D = 1, so jump j is exactly at j / 8 for m = 3.
        let params = WalkParams::new(p(2), 1.0, 1.5, 3).unwrap();
        let path = simulate_single(params, 2.0, &mut rng).unwrap();
        assert_eq!(path.jump_count(), 16);
        assert!(path_value(&path, 0.1).unwrap().is_zero());
        for j in 1..=16usize {
            let at = path_value(&path, j as f64 / 8.0).unwrap();
            assert_eq!(at, path.state_value(j));
            let between = path_value(&path, (j as f64 + 0.5) / 8.0).ok();
            if j < 16 {
                assert_eq!(between.unwrap(), path.state_value(j));
            }
        }
        assert!(path_value(&path, -0.1).is_err());
        assert!(path_value(&path, 2.01).is_err());
    }

    #[test]
    fn stored_sums_are_running_sums() {
        let mut rng = RngStream::new(9, 1);
        let params = WalkParams::new(p(3), 0.7, 2.0, 2).unwrap();
        let path = simulate_single(params, 3.0, &mut rng).unwrap();
        assert!(path.jump_count() > 10);
        for i in 1..=path.jump_count() {
            let prev = path.unscaled_state(i - 1).to_digits();
            let cur = path.unscaled_state(i).to_digits();
            let jump = crate::padic::gp_sub(&cur, &prev).unwrap();
            assert_eq!(qp_abs(&jump), RadialValue::Pow(path.jump_radius(i - 1) as i64));
        }
    }

    #[test]
    fn sup_norm_single_jump_example() {
        // A single jump of size 4 at p = 2, m = 1 has scaled norm 2.
        let params = WalkParams::new(p(2), 1.0, 1.5, 0).unwrap();
        for stream in 0..200u64 {
            let mut rng = RngStream::new(0, stream);
            let path = simulate_single(params, 1.0, &mut rng).unwrap();
            if path.jump_radius(0) == 2 {
                let scaled = WalkParams::new(p(2), 1.0, 0.75, 1).unwrap();
                let mut again = RngStream::new(0, stream);
                let path1 = simulate_single(scaled, 1.0, &mut again).unwrap();
                assert_eq!(path1.jump_count(), 1);
                assert_eq!(sup_scaled_norm(&path1, 1.0).unwrap(), RadialValue::Pow(1));
                return;
            }
        }
        panic!("no radius-2 first jump in 200 streams");
    }

    #[test]
    fn sup_norm_matches_time_grid() {
        for seed in 0..100u64 {
            let mut rng = RngStream::new(seed, 0);
            let params = WalkParams::new(p(3), 1.0, 1.0, 2).unwrap();
            let path = simulate_single(params, 1.0, &mut rng).unwrap();
            let mut grid_max = RadialValue::Zero;
            // Grid fine enough to hit every inter-jump interval.
            let steps = 20 * (path.jump_count() + 1);
            for i in 0..=steps {
                let t = i as f64 / steps as f64;
                grid_max = grid_max.max(qp_abs(&path_value(&path, t).unwrap()));
            }
            assert_eq!(sup_scaled_norm(&path, 1.0).unwrap(), grid_max);
        }
    }

    #[test]
    fn streaming_norms_match_stored_path() {
        let params = WalkParams::new(p(5), 1.3, 0.8, 2).unwrap();
        let times = [0.0, 0.25, 0.25, 1.0, 2.5];
        for seed in 0..30 {
            let path = simulate_single(params, 2.5, &mut RngStream::new(seed, 5)).unwrap();
            let norms = sample_norms_at(params, &times, &mut RngStream::new(seed, 5)).unwrap();
            for (&t, got) in times.iter().zip(&norms) {
                assert_eq!(got.value, qp_abs(&path_value(&path, t).unwrap()));
                assert_eq!(got.sup, sup_scaled_norm(&path, t).unwrap());
            }
        }
        assert!(sample_norms_at(params, &[1.0, 0.5], &mut RngStream::new(0, 0)).is_err());
    }

    #[test]
    fn streaming_adelic_sups_match_paths() {
        let spec = SigmaSpec::new(BTreeMap::from([(p(2), 1.0)]), Some(PowerTail { a: 1.0, s: 2.0 })).unwrap();
        let cutoff = choose_prime_cutoff(&spec, 1.0, 2, 1.0, 0.05).unwrap();
        let active = active_primes(&spec, &cutoff);
        for seed in 0..20 {
            let rng = RngStream::new(seed, 3);
            let path = simulate_adelic(&spec, 1.0, 2, 1.0, 0.05, &rng).unwrap();
            let sups = sample_adelic_sups(&spec, 1.0, 2, 1.0, &active, &rng).unwrap();
            let from_paths: Vec<RadialValue> =
                path.components().values().map(|c| sup_scaled_norm(c, 1.0).unwrap()).collect();
            assert_eq!(sups, from_paths);
        }
    }

    #[test]
    fn sigma_spec_validation() {
        assert!(matches!(
            SigmaSpec::new(BTreeMap::new(), Some(PowerTail { a: 1.0, s: 1.0 })),
            Err(WalkError::NotSummable(_))
        ));
        let mut explicit = BTreeMap::new();
        explicit.insert(p(2), -1.0);
        assert!(SigmaSpec::new(explicit, None).is_err());
        let spec = SigmaSpec::new(BTreeMap::from([(p(5), 0.3)]), Some(PowerTail { a: 2.0, s: 2.0 })).unwrap();
        assert_eq!(spec.sigma(p(5)), 0.3);
        assert_eq!(spec.sigma(p(3)), 2.0 / 9.0);
        assert!(!spec.is_finitely_supported());
    }

    #[test]
    fn cutoff_finite_support() {
        let spec = SigmaSpec::new(BTreeMap::from([(p(2), 1.0), (p(7), 0.5), (p(11), 0.0)]), None).unwrap();
        let cut = choose_prime_cutoff(&spec, 1.0, 3, 1.0, 1e-3).unwrap();
        assert_eq!(cut, PrimeCutoff { p_max: 8, bound: 0.0 });
    }

    #[test]
    fn cutoff_power_tail() {
        let spec = SigmaSpec::new(BTreeMap::new(), Some(PowerTail { a: 1.0, s: 2.0 })).unwrap();
        let cut = choose_prime_cutoff(&spec, 1.0, 3, 1.0, 1e-3).unwrap();
        assert!(cut.bound <= 1e-3);
        // Minimality against the tail-sum oracle: the previous prime fails.
        let tail_at = |q: u64| analytic::prime_tail_sum(&spec, 1.0, q).upper();
        assert!(-(-2.0 * tail_at(cut.p_max)).exp_m1() <= 1e-3);
        let prev = analytic::primes_up_to(cut.p_max - 1).last().copied().unwrap();
        assert!(-(-2.0 * tail_at(prev)).exp_m1() > 1e-3);
        // Vacuous level keeps every prime omitted.
        let loose = choose_prime_cutoff(&spec, 1.0, 3, 1.0, 0.999).unwrap();
        assert_eq!(loose.p_max, 2);
    }

    #[test]
    fn cutoff_condition_fails_loudly_at_m0() {
        let spec = SigmaSpec::new(BTreeMap::new(), Some(PowerTail { a: 1.0, s: 2.0 })).unwrap();
        assert!(matches!(
            choose_prime_cutoff(&spec, 1.0, 0, 1.0, 1e-3),
            Err(WalkError::CutoffCondition { .. })
        ));
        assert!(choose_prime_cutoff(&spec, 1.0, 3, 1.0, 1.0).is_err());
    }

    #[test]
    fn adelic_components() {
        let spec = SigmaSpec::new(BTreeMap::from([(p(2), 1.0), (p(3), 0.5)]), None).unwrap();
        let rng = RngStream::new(3, 0);
        let path = simulate_adelic(&spec, 1.0, 3, 1.0, 1e-3, &rng).unwrap();
        assert_eq!(path.components().len(), 2);
        assert_eq!(path.truncation_bound(), 0.0);
        assert_eq!(path.component(p(2)).unwrap().jump_count(), 5);
        assert_eq!(path.component(p(3)).unwrap().jump_count(), 10);
        // m = 0 is a valid degenerate case for the finitely supported walk.
        assert!(simulate_adelic(&spec, 1.0, 0, 1.0, 1e-3, &rng).is_ok());
    }

    #[test]
    fn adelic_power_tail_active_set() {
        let spec = SigmaSpec::new(BTreeMap::new(), Some(PowerTail { a: 1.0, s: 2.0 })).unwrap();
        let rng = RngStream::new(3, 0);
        let path = simulate_adelic(&spec, 1.0, 1, 1.0, 0.05, &rng).unwrap();
        let active: Vec<u64> = path.components().keys().map(|q| q.get()).collect();
        let expected = analytic::primes_up_to(path.p_max() - 1);
        assert_eq!(active, expected);
        assert!(path.truncation_bound() <= 0.05);
    }
}
