//! Exact arithmetic on finite p-adic digit expansions.
//!
//! [`QpDigits`] is a sparse expansion `Σ a(k) p^k` with finitely many nonzero
//! digits. Elements of the quotient group `G_p = Q_p / Z_p` are the expansions
//! supported on negative indices. [`GpElement`] is a packed representation of
//! the same group used on the hot path of the walk engine.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use smallvec::SmallVec;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("operands have different primes ({0} and {1})")]
    MixedPrimes(u64, u64),
    #[error("digit {digit} at index {index} is not in 0..{p}")]
    DigitOutOfRange { p: u64, index: i64, digit: u64 },
    #[error("duplicate digit index {0}")]
    DuplicateIndex(i64),
    #[error("value has a digit at index {0} >= 0 and is not an element of G_p")]
    NotInGp(i64),
    #[error("lambda must be positive, got {0}")]
    NonPositiveLambda(String),
    #[error("denominator is zero")]
    ZeroDenominator,
    #[error("component keyed by prime {key} holds a value over prime {actual}")]
    ComponentMismatch { key: u64, actual: u64 },
}

/// A prime number together with the packing radix used by [`GpElement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Prime {
    p: u64,
    block_width: u32,
    block_base: u64,
}

impl Prime {
    /// Largest prime accepted. Keeps trial division and digit products cheap.
    pub const MAX: u64 = u32::MAX as u64;

    pub fn new(p: u64) -> Result<Self, PadicError> {
        if !(2..=Self::MAX).contains(&p) || !is_prime(p) {
            return Err(PadicError::NotPrime(p));
        }
        Ok(Self::new_unchecked(p))
    }

    // For values already known to be prime, e.g. sieve output.
    pub(crate) fn new_unchecked(p: u64) -> Self {
        debug_assert!(is_prime(p));
        // Largest w with p^w <= 2^63, so that two blocks plus a carry fit in a u64.
        let mut block_width = 0u32;
        let mut block_base = 1u64;
        while let Some(next) = block_base.checked_mul(p) {
            if next > 1 << 63 {
                break;
            }
            block_base = next;
            block_width += 1;
        }
        Prime {
            p,
            block_width,
            block_base,
        }
    }

    #[inline]
    pub fn get(self) -> u64 {
        self.p
    }

    #[inline]
    pub fn as_f64(self) -> f64 {
        self.p as f64
    }
}

impl fmt::Display for Prime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.p)
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// An exact nonnegative power of the (implicit) prime: either zero or `p^e`.
///
/// Variant order makes `Zero` the minimum, and powers compare by exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RadialValue {
    Zero,
    Pow(i64),
}

impl RadialValue {
    pub fn exponent(self) -> Option<i64> {
        match self {
            RadialValue::Zero => None,
            RadialValue::Pow(e) => Some(e),
        }
    }

    /// Multiplies by `p^shift`.
    pub fn scale(self, shift: i64) -> Self {
        match self {
            RadialValue::Zero => RadialValue::Zero,
            RadialValue::Pow(e) => RadialValue::Pow(e + shift),
        }
    }

    pub fn to_f64(self, p: Prime) -> f64 {
        match self {
            RadialValue::Zero => 0.0,
            RadialValue::Pow(e) => pow_f64(p, e),
        }
    }

    pub fn to_rational(self, p: Prime) -> BigRational {
        match self {
            RadialValue::Zero => BigRational::zero(),
            RadialValue::Pow(e) => rational_pow(p, e),
        }
    }
}

/// `p^e` as a float; exact whenever the result is representable.
pub fn pow_f64(p: Prime, e: i64) -> f64 {
    let e = e.clamp(i32::MIN as i64, i32::MAX as i64) as i32;
    p.as_f64().powi(e)
}

fn rational_pow(p: Prime, e: i64) -> BigRational {
    let base = BigInt::from(p.get()).pow(e.unsigned_abs() as u32);
    if e >= 0 {
        BigRational::from_integer(base)
    } else {
        BigRational::new(BigInt::one(), base)
    }
}

/// A finite p-adic expansion `Σ_k a(k) p^k` with nonzero digits stored sparsely
/// in increasing index order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QpDigits {
    prime: Prime,
    digits: Vec<(i64, u64)>,
}

impl QpDigits {
    pub fn zero(prime: Prime) -> Self {
        QpDigits {
            prime,
            digits: Vec::new(),
        }
    }

    /// Builds an expansion from `(index, digit)` pairs. Zero digits are dropped.
    pub fn from_digits<I>(prime: Prime, digits: I) -> Result<Self, PadicError>
    where
        I: IntoIterator<Item = (i64, u64)>,
    {
        let mut map = BTreeMap::new();
        for (index, digit) in digits {
            if digit >= prime.get() {
                return Err(PadicError::DigitOutOfRange {
                    p: prime.get(),
                    index,
                    digit,
                });
            }
            if map.insert(index, digit).is_some() {
                return Err(PadicError::DuplicateIndex(index));
            }
        }
        Ok(QpDigits {
            prime,
            digits: map.into_iter().filter(|&(_, d)| d != 0).collect(),
        })
    }

    // Caller guarantees sorted, unique indices and digits in 1..p.
    pub(crate) fn from_sorted_unchecked(prime: Prime, digits: Vec<(i64, u64)>) -> Self {
        debug_assert!(digits.windows(2).all(|w| w[0].0 < w[1].0));
        debug_assert!(digits.iter().all(|&(_, d)| d > 0 && d < prime.get()));
        QpDigits { prime, digits }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.digits.is_empty()
    }

    /// Nonzero digits in increasing index order.
    pub fn digits(&self) -> &[(i64, u64)] {
        &self.digits
    }

    pub fn digit(&self, index: i64) -> u64 {
        self.digits
            .binary_search_by_key(&index, |&(k, _)| k)
            .map(|i| self.digits[i].1)
            .unwrap_or(0)
    }

    pub fn min_index(&self) -> Option<i64> {
        self.digits.first().map(|&(k, _)| k)
    }

    pub fn max_index(&self) -> Option<i64> {
        self.digits.last().map(|&(k, _)| k)
    }

    /// True when the support lies in negative indices, i.e. the value is an
    /// element of the standard embedding of `G_p`.
    pub fn in_gp(&self) -> bool {
        self.max_index().is_none_or(|k| k < 0)
    }

    pub fn to_rational(&self) -> BigRational {
        let mut acc = BigRational::zero();
        for &(k, d) in &self.digits {
            acc += rational_pow(self.prime, k) * BigInt::from(d);
        }
        acc
    }

    fn ensure_gp(&self) -> Result<(), PadicError> {
        match self.max_index() {
            Some(k) if k >= 0 => Err(PadicError::NotInGp(k)),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for QpDigits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.digits.is_empty() {
            return write!(f, "0");
        }
        let terms: Vec<String> = self
            .digits
            .iter()
            .rev()
            .map(|&(k, d)| format!("{d}*{}^{k}", self.prime))
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

/// `|x|_p`: zero for the empty expansion, otherwise `p^(-k_min)`.
pub fn qp_abs(x: &QpDigits) -> RadialValue {
    match x.min_index() {
        None => RadialValue::Zero,
        Some(k) => RadialValue::Pow(-k),
    }
}

/// Addition in `G_p`: digitwise with carries toward larger indices, dropping
/// any carry that reaches index 0.
pub fn gp_add(x: &QpDigits, y: &QpDigits) -> Result<QpDigits, PadicError> {
    if x.prime != y.prime {
        return Err(PadicError::MixedPrimes(x.prime.get(), y.prime.get()));
    }
    x.ensure_gp()?;
    y.ensure_gp()?;
    let p = x.prime.get();
    let mut out = Vec::with_capacity(x.digits.len().max(y.digits.len()) + 1);
    let (mut i, mut j) = (0usize, 0usize);
    let mut carry = 0u64;
    let mut next_index = i64::MIN;
    loop {
        // Smallest index still carrying information.
        let xi = x.digits.get(i).map(|&(k, _)| k);
        let yj = y.digits.get(j).map(|&(k, _)| k);
        let mut index = match (xi, yj) {
            (None, None) => {
                if carry == 0 {
                    break;
                }
                next_index
            }
            (Some(a), None) => a,
            (None, Some(b)) => b,
            (Some(a), Some(b)) => a.min(b),
        };
        if carry > 0 {
            index = index.min(next_index);
        }
        if index >= 0 {
            break;
        }
        let mut sum = carry;
        if xi == Some(index) {
            sum += x.digits[i].1;
            i += 1;
        }
        if yj == Some(index) {
            sum += y.digits[j].1;
            j += 1;
        }
        carry = sum / p;
        let digit = sum % p;
        if digit != 0 {
            out.push((index, digit));
        }
        next_index = index + 1;
    }
    Ok(QpDigits::from_sorted_unchecked(x.prime, out))
}

/// Additive inverse in `G_p`.
pub fn gp_neg(x: &QpDigits) -> Result<QpDigits, PadicError> {
    x.ensure_gp()?;
    let Some(k_min) = x.min_index() else {
        return Ok(x.clone());
    };
    let p = x.prime.get();
    // p^{-k_min} - (value scaled to an integer), read back digit by digit.
    let mut out = Vec::with_capacity((-k_min) as usize);
    out.push((k_min, p - x.digits[0].1));
    for k in (k_min + 1)..0 {
        let d = p - 1 - x.digit(k);
        if d != 0 {
            out.push((k, d));
        }
    }
    Ok(QpDigits::from_sorted_unchecked(x.prime, out))
}

pub fn gp_sub(x: &QpDigits, y: &QpDigits) -> Result<QpDigits, PadicError> {
    if x.prime != y.prime {
        return Err(PadicError::MixedPrimes(x.prime.get(), y.prime.get()));
    }
    gp_add(x, &gp_neg(y)?)
}

/// Multiplication by `p^m`: every index moves from `k` to `k + m`.
pub fn qp_shift(x: &QpDigits, m: i64) -> QpDigits {
    QpDigits {
        prime: x.prime,
        digits: x.digits.iter().map(|&(k, d)| (k + m, d)).collect(),
    }
}

/// `[λ]_p`, the largest power `p^k` strictly below `λ`.
pub fn bracket_lambda(lambda: &BigRational, p: Prime) -> Result<RadialValue, PadicError> {
    if !lambda.is_positive() {
        return Err(PadicError::NonPositiveLambda(lambda.to_string()));
    }
    let below = |k: i64| rational_pow(p, k) < *lambda;
    // Floating estimate, then exact correction.
    let approx = approx_log(lambda, p).floor() as i64;
    let mut k = approx;
    while !below(k) {
        k -= 1;
    }
    while below(k + 1) {
        k += 1;
    }
    Ok(RadialValue::Pow(k))
}

/// [`bracket_lambda`] for a float `λ`, converted to a rational exactly.
pub fn bracket_lambda_f64(lambda: f64, p: Prime) -> Result<RadialValue, PadicError> {
    let exact = BigRational::from_float(lambda)
        .ok_or_else(|| PadicError::NonPositiveLambda(lambda.to_string()))?;
    bracket_lambda(&exact, p)
}

fn approx_log(lambda: &BigRational, p: Prime) -> f64 {
    use num::ToPrimitive;
    let num_bits = lambda.numer().bits() as f64;
    let den_bits = lambda.denom().bits() as f64;
    // Scale both to at most ~60 significant bits before converting.
    let shift = (num_bits.max(den_bits) - 60.0).max(0.0) as usize;
    let n = (lambda.numer() >> shift).to_f64().unwrap_or(f64::MAX);
    let d = (lambda.denom() >> shift).to_f64().unwrap_or(f64::MAX);
    let est = if n > 0.0 && d > 0.0 {
        (n.ln() - d.ln()) / p.as_f64().ln()
    } else {
        (num_bits - den_bits) * std::f64::consts::LN_2 / p.as_f64().ln()
    };
    if est.is_finite() {
        est
    } else {
        0.0
    }
}

// Number of trailing zero base-p digits of a nonzero block value.
fn p_valuation(v: u64, prime: Prime) -> u32 {
    let p = prime.p;
    if p == 2 {
        return v.trailing_zeros();
    }
    // Largest j in [0, w) with p^j | v; divisibility is monotone in j.
    let (mut lo, mut hi) = (0u32, prime.block_width);
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if v % p.pow(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// A point of the rational adeles with finitely many stored components; every
/// unlisted prime carries the value zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AdelePoint {
    components: BTreeMap<Prime, QpDigits>,
}

impl AdelePoint {
    pub fn new(components: BTreeMap<Prime, QpDigits>) -> Result<Self, PadicError> {
        for (key, value) in &components {
            if *key != value.prime() {
                return Err(PadicError::ComponentMismatch {
                    key: key.get(),
                    actual: value.prime().get(),
                });
            }
        }
        Ok(AdelePoint { components })
    }

    pub fn component(&self, p: Prime) -> Option<&QpDigits> {
        self.components.get(&p)
    }

    pub fn components(&self) -> impl Iterator<Item = (&Prime, &QpDigits)> {
        self.components.iter()
    }
}

/// `|x|_{A_Q} = max_p |x_p|_p / p`.
pub fn adelic_abs(x: &AdelePoint) -> f64 {
    x.components
        .iter()
        .map(|(p, v)| qp_abs(v).scale(-1).to_f64(*p))
        .fold(0.0, f64::max)
}

/// `|num/den|_p` by repeated division; used as an independent reference.
pub fn rational_valuation_oracle(num: i128, den: i128, p: Prime) -> Result<RadialValue, PadicError> {
    if den == 0 {
        return Err(PadicError::ZeroDenominator);
    }
    if num == 0 {
        return Ok(RadialValue::Zero);
    }
    let p = p.get() as i128;
    let valuation = |mut n: i128| {
        let mut v = 0i64;
        while n % p == 0 {
            n /= p;
            v += 1;
        }
        v
    };
    Ok(RadialValue::Pow(valuation(den) - valuation(num)))
}

/// Packed element of `G_p` for the walk engine.
///
/// Block `i` stores the digits at indices `-(i*w + 1) ..= -(i*w + w)` as one
/// integer in base `p`, with index `-(i+1)*w` as its least significant digit.
/// Trailing zero blocks are never stored, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GpElement {
    prime: Prime,
    blocks: SmallVec<[u64; 2]>,
}

impl GpElement {
    pub fn zero(prime: Prime) -> Self {
        GpElement {
            prime,
            blocks: SmallVec::new(),
        }
    }

    #[inline]
    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Builds the element `Σ_{j=1}^{k} a(-j) p^{-j}` from `digits[j-1] = a(-j)`.
    pub fn from_fraction_digits(prime: Prime, digits: &[u64]) -> Self {
        let w = prime.block_width as usize;
        let p = prime.p;
        let mut blocks: SmallVec<[u64; 2]> = SmallVec::new();
        for chunk in digits.chunks(w) {
            let mut v = 0u64;
            for &d in chunk {
                debug_assert!(d < p);
                v = v * p + d;
            }
            v *= p.pow((w - chunk.len()) as u32);
            blocks.push(v);
        }
        let mut out = GpElement { prime, blocks };
        out.trim();
        out
    }

    pub fn from_digits(x: &QpDigits) -> Result<Self, PadicError> {
        x.ensure_gp()?;
        let Some(k_min) = x.min_index() else {
            return Ok(GpElement::zero(x.prime));
        };
        let mut dense = vec![0u64; (-k_min) as usize];
        for &(k, d) in x.digits() {
            dense[(-k - 1) as usize] = d;
        }
        Ok(GpElement::from_fraction_digits(x.prime, &dense))
    }

    pub fn to_digits(&self) -> QpDigits {
        let w = self.prime.block_width as i64;
        let p = self.prime.p;
        let mut out = Vec::new();
        for (i, &block) in self.blocks.iter().enumerate().rev() {
            let mut v = block;
            // Least significant digit sits at index -(i+1)w.
            let mut index = -(i as i64 + 1) * w;
            while v > 0 {
                let d = v % p;
                if d != 0 {
                    out.push((index, d));
                }
                v /= p;
                index += 1;
            }
        }
        QpDigits::from_sorted_unchecked(self.prime, out)
    }

    /// In-place group addition. Panics on mixed primes.
    pub fn add_assign(&mut self, other: &GpElement) {
        assert_eq!(self.prime, other.prime, "mixed primes in G_p addition");
        let base = self.prime.block_base;
        if self.blocks.len() < other.blocks.len() {
            self.blocks.resize(other.blocks.len(), 0);
        }
        let mut carry = 0u64;
        for i in (0..self.blocks.len()).rev() {
            let rhs = other.blocks.get(i).copied().unwrap_or(0);
            if rhs == 0 && carry == 0 && i >= other.blocks.len() {
                continue;
            }
            let mut s = self.blocks[i] + rhs + carry;
            if s >= base {
                s -= base;
                carry = 1;
            } else {
                carry = 0;
            }
            self.blocks[i] = s;
        }
        self.trim();
    }

    pub fn checked_add(&self, other: &GpElement) -> Result<GpElement, PadicError> {
        if self.prime != other.prime {
            return Err(PadicError::MixedPrimes(self.prime.get(), other.prime.get()));
        }
        let mut out = self.clone();
        out.add_assign(other);
        Ok(out)
    }

    /// `|x|_p` of the element.
    pub fn abs(&self) -> RadialValue {
        let w = self.prime.block_width as i64;
        // Trimmed, so the last block is nonzero and holds the lowest index.
        let Some(&last) = self.blocks.last() else {
            return RadialValue::Zero;
        };
        RadialValue::Pow(self.blocks.len() as i64 * w - p_valuation(last, self.prime) as i64)
    }

    fn trim(&mut self) {
        while self.blocks.last() == Some(&0) {
            self.blocks.pop();
        }
    }
}
