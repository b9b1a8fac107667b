//! The jump law of the walk: radius from the power-law pmf
//! `P(|X|_p = p^k) = (p^b - 1) p^{-kb}`, position uniform on the sphere.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::padic::{GpElement, Prime, QpDigits};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SamplingError {
    #[error("exponent b must be positive and finite, got {0}")]
    InvalidExponent(f64),
    #[error("sphere radius index must be at least 1, got {0}")]
    InvalidRadius(u32),
    #[error("sphere cardinality ({p}-1)*{p}^({k}-1) overflows")]
    CardinalityOverflow { p: u64, k: u32 },
}

/// Deterministic random stream identified by `(seed, stream)`.
///
/// Backed by ChaCha8, whose 64-bit stream parameter gives independent
/// sequences for distinct indices under the same key.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    /// A stream whose key mixes `seed` with a domain tag, so that different
    /// experiment cells never share randomness.
    pub fn keyed(seed: u64, domain: u64, stream: u64) -> Self {
        RngStream::new(splitmix64(seed ^ splitmix64(domain)), stream)
    }

    /// Independent child stream of this stream's identity, e.g. one per prime.
    pub fn substream(&self, key: u64) -> Self {
        RngStream::keyed(self.seed ^ splitmix64(self.stream), key, self.stream)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform in the open interval (0, 1).
    #[inline]
    pub fn open01(&mut self) -> f64 {
        self.rng.sample(Open01)
    }

    /// Uniform integer in `0..n`.
    #[inline]
    pub fn below(&mut self, n: u64) -> u64 {
        self.rng.random_range(0..n)
    }
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpLaw {
    prime: Prime,
    b: f64,
    c_pb: f64,
    ln_p_b: f64,
}

impl JumpLaw {
    pub fn new(prime: Prime, b: f64) -> Result<Self, SamplingError> {
        if !(b.is_finite() && b > 0.0) {
            return Err(SamplingError::InvalidExponent(b));
        }
        Ok(JumpLaw {
            prime,
            b,
            c_pb: prime.as_f64().powf(b) - 1.0,
            ln_p_b: prime.as_f64().ln() * b,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Normalisation constant `p^b - 1`.
    pub fn c_pb(&self) -> f64 {
        self.c_pb
    }

    /// `P(K = k) = (p^b - 1) p^{-kb}` for `k >= 1`.
    pub fn pmf(&self, k: u32) -> f64 {
        if k == 0 {
            return 0.0;
        }
        self.c_pb * (-(k as f64) * self.ln_p_b).exp()
    }

    /// `P(K > k) = p^{-kb}`.
    pub fn tail(&self, k: u32) -> f64 {
        (-(k as f64) * self.ln_p_b).exp()
    }
}

/// Radius index `K` with `P(K = k) = (p^b - 1) p^{-kb}`, by inversion of the
/// tail `P(K > k) = p^{-kb}`.
pub fn sample_radius(law: &JumpLaw, rng: &mut RngStream) -> u32 {
    let u = rng.open01();
    // Smallest k >= 1 with p^{-kb} <= 1 - u, compared on the log scale.
    let log_survivor = (-u).ln_1p();
    let fits = |k: u32| -(k as f64) * law.ln_p_b <= log_survivor;
    let estimate = (-log_survivor / law.ln_p_b).ceil();
    let mut k = if estimate.is_finite() && estimate >= 1.0 {
        estimate.min(u32::MAX as f64 - 1.0) as u32
    } else {
        1
    };
    while !fits(k) {
        k += 1;
    }
    while k > 1 && fits(k - 1) {
        k -= 1;
    }
    k
}

/// Number of points of `G_p` with `|x|_p = p^k`: `(p-1) p^{k-1}`.
pub fn sphere_cardinality(p: Prime, k: u32) -> Result<u128, SamplingError> {
    if k < 1 {
        return Err(SamplingError::InvalidRadius(k));
    }
    let overflow = SamplingError::CardinalityOverflow { p: p.get(), k };
    (p.get() as u128)
        .checked_pow(k - 1)
        .and_then(|q| q.checked_mul(p.get() as u128 - 1))
        .ok_or(overflow)
}

// Fills `buf[j-1] = a(-j)` for j = 1..=k: leading digit at -k uniform in
// 1..p, the rest uniform in 0..p. Digits are drawn from index -k upward.
fn draw_sphere_digits(p: Prime, k: u32, rng: &mut RngStream, buf: &mut Vec<u64>) {
    let p = p.get();
    buf.clear();
    buf.resize(k as usize, 0);
    buf[k as usize - 1] = 1 + rng.below(p - 1);
    for j in (0..k as usize - 1).rev() {
        buf[j] = rng.below(p);
    }
}

/// Uniform point on the sphere `|x|_p = p^k` of `G_p`.
pub fn sample_sphere_point(p: Prime, k: u32, rng: &mut RngStream) -> Result<QpDigits, SamplingError> {
    if k < 1 {
        return Err(SamplingError::InvalidRadius(k));
    }
    let mut buf = Vec::with_capacity(k as usize);
    draw_sphere_digits(p, k, rng, &mut buf);
    let digits: Vec<(i64, u64)> = buf
        .iter()
        .enumerate()
        .rev()
        .filter(|&(_, &d)| d != 0)
        .map(|(j, &d)| (-(j as i64) - 1, d))
        .collect();
    Ok(QpDigits::from_sorted_unchecked(p, digits))
}

/// One draw of the jump variable `X^(p)`.
pub fn sample_jump(law: &JumpLaw, rng: &mut RngStream) -> QpDigits {
    let k = sample_radius(law, rng);
    sample_sphere_point(law.prime, k, rng).expect("radius index is at least 1")
}

/// Reusable sampler producing packed jumps; draws the same random sequence as
/// [`sample_jump`], so both yield the same value for the same stream.
#[derive(Debug, Clone)]
pub struct PackedJumpSampler {
    law: JumpLaw,
    buf: Vec<u64>,
}

impl PackedJumpSampler {
    pub fn new(law: JumpLaw) -> Self {
        PackedJumpSampler {
            law,
            buf: Vec::new(),
        }
    }

    pub fn law(&self) -> &JumpLaw {
        &self.law
    }

    /// Returns the radius index `k` (so `|X|_p = p^k`) and the jump.
    pub fn sample(&mut self, rng: &mut RngStream) -> (u32, GpElement) {
        let k = sample_radius(&self.law, rng);
        draw_sphere_digits(self.law.prime, k, rng, &mut self.buf);
        (k, GpElement::from_fraction_digits(self.law.prime, &self.buf))
    }
}
