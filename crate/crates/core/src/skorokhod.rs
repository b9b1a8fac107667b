//! Oscillation, the modified modulus `w'_T(x, δ)` and sup norms of step paths.
//!
//! Intervals inside `w'_T` are half-open `[t_{i-1}, t_i)`: a jump at `τ`
//! changes the values attained on `[e, t)` iff `e < τ < t`.
//!
//! For an ultrametric norm the diameter of the values attained on an interval
//! is the largest jump norm inside it. Every partition with maximal
//! oscillation `θ` must therefore place an endpoint at each jump heavier than
//! `θ`, and `w'_T` is the least `θ` for which those heavy jumps are themselves
//! an essentially δ-sparse partition. [`brute_force_modulus`] computes the
//! same quantity by exhaustive search with pairwise differences.

use thiserror::Error;

use crate::padic::{gp_sub, qp_abs, Prime, QpDigits};
use crate::walk::{AdelicPath, SinglePrimePath};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SkorokhodError {
    #[error("modulus needs 0 < delta < T, got delta = {delta}, T = {t}")]
    InvalidDelta { delta: f64, t: f64 },
    #[error("interval [{s}, {t}) is not inside [0, {horizon}]")]
    IntervalOutOfRange { s: f64, t: f64, horizon: f64 },
    #[error("brute-force modulus supports at most {max} jumps, path has {jumps}")]
    TooManyJumps { jumps: usize, max: usize },
}

pub const BRUTE_FORCE_MAX_JUMPS: usize = 12;

/// Which absolute value measures path increments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormContext {
    /// `|·|_p` on the scaled walk.
    Prime,
    /// `|·|_{p,A_Q} = |·|_p / p`.
    ScaledPrime,
    /// Adelic max norm; on a single component it coincides with `ScaledPrime`.
    Adelic,
}

impl NormContext {
    fn divisor(self, p: Prime) -> f64 {
        match self {
            NormContext::Prime => 1.0,
            NormContext::ScaledPrime | NormContext::Adelic => p.as_f64(),
        }
    }
}

/// Distinct event times of a step path with the largest jump norm at each.
#[derive(Debug, Clone, Default, PartialEq)]
struct Events {
    times: Vec<f64>,
    weights: Vec<f64>,
}

impl Events {
    fn single(path: &SinglePrimePath, norm: NormContext) -> Self {
        let div = norm.divisor(path.prime());
        let pairs = (0..path.jump_count())
            .map(|j| (path.jump_times()[j], path.scaled_jump_norm(j).to_f64(path.prime()) / div));
        Events::from_sorted_pairs(pairs)
    }

    fn adelic(path: &AdelicPath) -> Self {
        let mut pairs: Vec<(f64, f64)> = path
            .components()
            .values()
            .flat_map(|c| {
                let p = c.prime();
                (0..c.jump_count()).map(move |j| (c.jump_times()[j], c.scaled_jump_norm(j).to_f64(p) / p.as_f64()))
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Events::from_sorted_pairs(pairs)
    }

    fn from_sorted_pairs(pairs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        let mut ev = Events::default();
        for (t, w) in pairs {
            match ev.times.last() {
                Some(&last) if last == t => {
                    let top = ev.weights.last_mut().expect("parallel vectors");
                    *top = top.max(w);
                }
                _ => {
                    ev.times.push(t);
                    ev.weights.push(w);
                }
            }
        }
        ev
    }

    fn modulus(&self, delta: f64, horizon: f64) -> f64 {
        let hi = self.times.partition_point(|&tau| tau < horizon);
        let (times, weights) = (&self.times[..hi], &self.weights[..hi]);
        let feasible = |theta: f64| {
            let mut prev = 0.0;
            for (&tau, &w) in times.iter().zip(weights) {
                if w > theta {
                    if tau - prev <= delta {
                        return false;
                    }
                    prev = tau;
                }
            }
            true
        };
        let mut thresholds: Vec<f64> = weights.to_vec();
        thresholds.push(0.0);
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        // Feasibility is monotone in θ and the largest threshold is feasible.
        let first = thresholds.partition_point(|&theta| !feasible(theta));
        thresholds[first.min(thresholds.len() - 1)]
    }
}

fn check_delta(delta: f64, horizon: f64) -> Result<(), SkorokhodError> {
    if !(delta > 0.0 && delta < horizon) {
        return Err(SkorokhodError::InvalidDelta { delta, t: horizon });
    }
    Ok(())
}

fn check_interval(s: f64, t: f64, horizon: f64) -> Result<(), SkorokhodError> {
    if !(s >= 0.0 && t <= horizon) {
        return Err(SkorokhodError::IntervalOutOfRange { s, t, horizon });
    }
    Ok(())
}

// Values attained on [s, t): states jumps_until(s) ..= (#jumps before t).
fn attained_states(path: &SinglePrimePath, s: f64, t: f64) -> std::ops::RangeInclusive<usize> {
    let first = path.jumps_until(s);
    let last = path.jump_times().partition_point(|&tau| tau < t);
    first..=last.max(first)
}

fn pairwise_diameter(values: &[QpDigits]) -> crate::padic::RadialValue {
    let mut best = crate::padic::RadialValue::Zero;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            let d = gp_sub(a, b).expect("states of one walk share a prime and lie in G_p");
            best = best.max(qp_abs(&d));
        }
    }
    best
}

/// `w(x, [s, t))`: the largest pairwise distance among values attained on the
/// half-open interval, computed from the values themselves.
pub fn oscillation(path: &SinglePrimePath, s: f64, t: f64, norm: NormContext) -> Result<f64, SkorokhodError> {
    check_interval(s, t, path.horizon())?;
    if s >= t {
        return Ok(0.0);
    }
    let values: Vec<QpDigits> = attained_states(path, s, t).map(|i| path.unscaled_state(i).to_digits()).collect();
    let p = path.prime();
    let diam = pairwise_diameter(&values).scale(-(path.params().m() as i64));
    Ok(diam.to_f64(p) / norm.divisor(p))
}

/// `w(x, [s, t); A_Q) = max_p w(x_p, [s, t)) / p` over active components.
pub fn adelic_oscillation(path: &AdelicPath, s: f64, t: f64) -> Result<f64, SkorokhodError> {
    check_interval(s, t, path.horizon())?;
    let mut best = 0.0f64;
    for comp in path.components().values() {
        best = best.max(oscillation(comp, s, t, NormContext::Adelic)?);
    }
    Ok(best)
}

/// `w'_T(x, δ)` over essentially δ-sparse partitions of `[0, T]`.
pub fn modified_modulus(path: &SinglePrimePath, delta: f64, horizon: f64, norm: NormContext) -> Result<f64, SkorokhodError> {
    check_delta(delta, horizon)?;
    check_interval(0.0, horizon, path.horizon())?;
    Ok(Events::single(path, norm).modulus(delta, horizon))
}

/// `w'_T(x, δ; A_Q)` with one partition shared by all components.
pub fn adelic_modulus(path: &AdelicPath, delta: f64, horizon: f64) -> Result<f64, SkorokhodError> {
    check_delta(delta, horizon)?;
    check_interval(0.0, horizon, path.horizon())?;
    Ok(Events::adelic(path).modulus(delta, horizon))
}

/// Modified modulus by exhaustive search over partitions drawn from the grid
/// `{0, T} ∪ {τ_j} ∪ {τ_j + δ(1 + 2^-20)}`, with oscillations computed pairwise.
pub fn brute_force_modulus(path: &SinglePrimePath, delta: f64, horizon: f64, norm: NormContext) -> Result<f64, SkorokhodError> {
    check_delta(delta, horizon)?;
    check_interval(0.0, horizon, path.horizon())?;
    if path.jump_count() > BRUTE_FORCE_MAX_JUMPS {
        return Err(SkorokhodError::TooManyJumps {
            jumps: path.jump_count(),
            max: BRUTE_FORCE_MAX_JUMPS,
        });
    }
    Ok(brute_force_on_grid(path.jump_times(), delta, horizon, |s, t| {
        oscillation(path, s, t, norm).expect("grid points lie inside the horizon")
    }))
}

/// [`brute_force_modulus`] for an adelic path, on the merged jump times.
pub fn brute_force_adelic_modulus(path: &AdelicPath, delta: f64, horizon: f64) -> Result<f64, SkorokhodError> {
    check_delta(delta, horizon)?;
    check_interval(0.0, horizon, path.horizon())?;
    let mut times: Vec<f64> = path.components().values().flat_map(|c| c.jump_times().iter().copied()).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    if times.len() > BRUTE_FORCE_MAX_JUMPS {
        return Err(SkorokhodError::TooManyJumps {
            jumps: times.len(),
            max: BRUTE_FORCE_MAX_JUMPS,
        });
    }
    Ok(brute_force_on_grid(&times, delta, horizon, |s, t| {
        adelic_oscillation(path, s, t).expect("grid points lie inside the horizon")
    }))
}

fn brute_force_on_grid(jumps: &[f64], delta: f64, horizon: f64, osc: impl Fn(f64, f64) -> f64) -> f64 {
    let offset = delta * (1.0 + 2f64.powi(-20));
    let mut grid: Vec<f64> = std::iter::once(0.0)
        .chain(jumps.iter().copied())
        .chain(std::iter::once(0.0).chain(jumps.iter().copied()).map(|tau| tau + offset))
        .filter(|&t| t >= 0.0 && t < horizon)
        .collect();
    grid.push(horizon);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let g = grid.len();
    let mut table = vec![0.0; g * g];
    for i in 0..g {
        for j in i + 1..g {
            table[i * g + j] = osc(grid[i], grid[j]);
        }
    }
    let mut best = f64::INFINITY;
    search(&grid, &table, delta, 0, 0.0, &mut best);
    best
}

// Extends a partition ending at grid[at]; every non-final interval must
// exceed δ in length.
fn search(grid: &[f64], table: &[f64], delta: f64, at: usize, current: f64, best: &mut f64) {
    let g = grid.len();
    if current >= *best {
        return;
    }
    let closing = current.max(table[at * g + g - 1]);
    *best = best.min(closing);
    for next in at + 1..g - 1 {
        if grid[next] - grid[at] > delta {
            search(grid, table, delta, next, current.max(table[at * g + next]), best);
        }
    }
}

/// `sup_{s<=T} |x(s)|` over the initial value and all jump values up to `T`.
pub fn path_sup_norm(path: &SinglePrimePath, horizon: f64, norm: NormContext) -> Result<f64, SkorokhodError> {
    check_interval(0.0, horizon, path.horizon())?;
    let p = path.prime();
    let upto = path.jumps_until(horizon);
    let sup = (0..=upto).map(|i| path.scaled_state_norm(i)).max().expect("nonempty range");
    Ok(sup.to_f64(p) / norm.divisor(p))
}

/// `sup_{s<=T} |x(s)|_{A_Q}`: the max over components of the sup divided by `p`.
pub fn adelic_sup_norm(path: &AdelicPath, horizon: f64) -> Result<f64, SkorokhodError> {
    check_interval(0.0, horizon, path.horizon())?;
    let mut best = 0.0f64;
    for comp in path.components().values() {
        best = best.max(path_sup_norm(comp, horizon, NormContext::Adelic)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::RadialValue;
    use crate::sampling::RngStream;
    use crate::walk::{simulate_adelic, simulate_single, sup_scaled_norm, SigmaSpec, WalkParams};
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    fn prime(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn walk(p: u64, b: f64, sigma: f64, m: u32, horizon: f64, seed: u64) -> SinglePrimePath {
        let params = WalkParams::new(prime(p), b, sigma, m).unwrap();
        simulate_single(params, horizon, &mut RngStream::new(seed, 0)).unwrap()
    }

    #[test]
    fn constant_path() {
        let path = walk(2, 1.0, 0.0, 2, 1.0, 0);
        assert_eq!(oscillation(&path, 0.0, 1.0, NormContext::Prime).unwrap(), 0.0);
        assert_eq!(modified_modulus(&path, 0.3, 1.0, NormContext::Prime).unwrap(), 0.0);
        assert_eq!(brute_force_modulus(&path, 0.3, 1.0, NormContext::Prime).unwrap(), 0.0);
        assert_eq!(path_sup_norm(&path, 1.0, NormContext::Prime).unwrap(), 0.0);
    }

    #[test]
    fn delta_must_be_below_horizon() {
        let path = walk(2, 1.0, 1.0, 2, 1.0, 0);
        assert!(modified_modulus(&path, 1.0, 1.0, NormContext::Prime).is_err());
        assert!(modified_modulus(&path, 0.0, 1.0, NormContext::Prime).is_err());
        assert!(oscillation(&path, 0.0, 1.5, NormContext::Prime).is_err());
        assert_eq!(oscillation(&path, 0.7, 0.2, NormContext::Prime).unwrap(), 0.0);
    }

    #[test]
    fn single_jump_is_isolated() {
        // σ = 0.75, p = 2, b = 1, m = 1 gives D p^{mb} = 1: one jump at t = 1.
        let path = walk(2, 1.0, 0.75, 1, 1.9, 3);
        assert_eq!(path.jump_count(), 1);
        let jump = path.scaled_jump_norm(0).to_f64(prime(2));
        assert_eq!(oscillation(&path, 0.0, 1.9, NormContext::Prime).unwrap(), jump);
        assert_eq!(oscillation(&path, 1.0, 1.9, NormContext::Prime).unwrap(), 0.0);
        assert_eq!(modified_modulus(&path, 0.5, 1.9, NormContext::Prime).unwrap(), 0.0);
        assert_eq!(brute_force_modulus(&path, 0.5, 1.9, NormContext::Prime).unwrap(), 0.0);
        // A jump within δ of the origin cannot be isolated.
        assert_eq!(modified_modulus(&path, 1.2, 1.9, NormContext::Prime).unwrap(), jump);
        assert_eq!(brute_force_modulus(&path, 1.2, 1.9, NormContext::Prime).unwrap(), jump);
        assert_eq!(modified_modulus(&path, 1.2, 1.9, NormContext::ScaledPrime).unwrap(), jump / 2.0);
    }

    #[test]
    fn sup_norm_matches_walk_module() {
        for seed in 0..50 {
            let path = walk(3, 0.8, 1.0, 2, 2.0, seed);
            let sup = sup_scaled_norm(&path, 1.3).unwrap().to_f64(prime(3));
            assert_eq!(path_sup_norm(&path, 1.3, NormContext::Prime).unwrap(), sup);
        }
    }

    #[test]
    fn adelic_single_component_equals_scaled_modulus() {
        let spec = SigmaSpec::new(BTreeMap::from([(prime(3), 1.0)]), None).unwrap();
        for seed in 0..50 {
            let adelic = simulate_adelic(&spec, 1.0, 1, 2.0, 1e-3, &RngStream::new(seed, 0)).unwrap();
            let comp = adelic.component(prime(3)).unwrap();
            for delta in [0.05, 0.2, 0.6] {
                assert_eq!(
                    adelic_modulus(&adelic, delta, 2.0).unwrap(),
                    modified_modulus(comp, delta, 2.0, NormContext::ScaledPrime).unwrap()
                );
            }
        }
    }

    #[test]
    fn adelic_interleaved_matches_brute_force() {
        let spec = SigmaSpec::new(BTreeMap::from([(prime(2), 1.0), (prime(3), 0.4)]), None).unwrap();
        for seed in 0..200 {
            let adelic = simulate_adelic(&spec, 1.0, 1, 2.5, 1e-3, &RngStream::new(seed, 1)).unwrap();
            let sup = adelic_sup_norm(&adelic, 2.5).unwrap();
            let by_component = adelic
                .components()
                .iter()
                .map(|(p, c)| sup_scaled_norm(c, 2.5).unwrap().to_f64(*p) / p.as_f64())
                .fold(0.0, f64::max);
            assert_eq!(sup, by_component);
            for delta in [0.1, 0.3, 0.7, 1.5] {
                let fast = adelic_modulus(&adelic, delta, 2.5).unwrap();
                let slow = brute_force_adelic_modulus(&adelic, delta, 2.5).unwrap();
                assert_eq!(fast, slow, "seed {seed} delta {delta}");
                let per_component = adelic
                    .components()
                    .values()
                    .map(|c| modified_modulus(c, delta, 2.5, NormContext::Adelic).unwrap())
                    .fold(0.0, f64::max);
                assert!(fast >= per_component);
            }
        }
    }

    #[test]
    fn brute_force_rejects_long_paths() {
        let path = walk(2, 1.0, 1.0, 5, 1.0, 0);
        assert!(path.jump_count() > BRUTE_FORCE_MAX_JUMPS);
        assert!(matches!(
            brute_force_modulus(&path, 0.1, 1.0, NormContext::Prime),
            Err(SkorokhodError::TooManyJumps { .. })
        ));
    }

    fn small_walk() -> impl Strategy<Value = (SinglePrimePath, f64)> {
        (
            prop::sample::select(vec![2u64, 3, 5]),
            0.3f64..2.0,
            0u32..3,
            0.2f64..3.0,
            any::<u64>(),
        )
            .prop_filter_map("at most 8 jumps", |(p, b, m, horizon, seed)| {
                let params = WalkParams::new(prime(p), b, 1.0, m).ok()?;
                let rate = params.rate();
                if rate * horizon > 8.0 {
                    return None;
                }
                let path = simulate_single(params, horizon, &mut RngStream::new(seed, 7)).ok()?;
                Some((path, horizon))
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn modulus_matches_brute_force((path, horizon) in small_walk(), frac in 0.01f64..0.99) {
            let delta = frac * horizon;
            let fast = modified_modulus(&path, delta, horizon, NormContext::Prime).unwrap();
            let slow = brute_force_modulus(&path, delta, horizon, NormContext::Prime).unwrap();
            prop_assert_eq!(fast, slow);
        }
    }

    proptest! {
        #[test]
        fn modulus_nondecreasing_in_delta((path, horizon) in small_walk(), a in 0.01f64..0.99, b in 0.01f64..0.99) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let w_lo = modified_modulus(&path, lo * horizon, horizon, NormContext::Prime).unwrap();
            let w_hi = modified_modulus(&path, hi * horizon, horizon, NormContext::Prime).unwrap();
            prop_assert!(w_lo <= w_hi);
        }

        #[test]
        fn modulus_vanishes_for_sparse_jumps((path, horizon) in small_walk()) {
            let times = path.jump_times();
            let inside: Vec<f64> = times.iter().copied().filter(|&t| t < horizon).collect();
            let mut min_gap = inside.first().copied().unwrap_or(horizon);
            for w in inside.windows(2) {
                min_gap = min_gap.min(w[1] - w[0]);
            }
            if let Some(&last) = inside.last() {
                min_gap = min_gap.min(horizon - last);
            }
            let delta = 0.5 * min_gap.min(horizon);
            prop_assume!(delta > 0.0);
            prop_assert_eq!(modified_modulus(&path, delta, horizon, NormContext::Prime).unwrap(), 0.0);
        }

        #[test]
        fn oscillation_is_max_distance_to_first((path, horizon) in small_walk(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (s, t) = if a <= b { (a * horizon, b * horizon) } else { (b * horizon, a * horizon) };
            let osc = oscillation(&path, s, t, NormContext::Prime).unwrap();
            let range = attained_states(&path, s, t);
            let first = path.unscaled_state(*range.start()).to_digits();
            let mut to_first = RadialValue::Zero;
            let mut max_jump = 0.0f64;
            for i in range.clone() {
                let d = gp_sub(&path.unscaled_state(i).to_digits(), &first).unwrap();
                to_first = to_first.max(qp_abs(&d));
                if i > *range.start() {
                    max_jump = max_jump.max(path.scaled_jump_norm(i - 1).to_f64(path.prime()));
                }
            }
            let to_first = if s < t { to_first.scale(-(path.params().m() as i64)).to_f64(path.prime()) } else { 0.0 };
            prop_assert_eq!(osc, to_first);
            if s < t {
                prop_assert_eq!(osc, max_jump);
            }
        }
    }
}
