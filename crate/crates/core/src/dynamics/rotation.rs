//! Rotation numbers: symbols with an optional exact rational realization.
//!
//! Exact operations only ever see the symbol. Numerical operations reduce
//! `m·α` modulo 1 by working with the integer numerator of the realization,
//! so arbitrarily large integer multipliers stay exact.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RealizationError {
    #[error("rotation symbol '{0}' has no numeric realization")]
    Missing(String),
    #[error("cannot parse realization '{0}': expected sqrt2, golden, e (optionally @depth) or p/q")]
    Syntax(String),
}

/// Working precision used when none is given explicitly.
pub const DEFAULT_PRECISION_BITS: u32 = 256;

/// Named irrationals realized by continued-fraction convergents.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NamedConstant {
    Sqrt2,
    Golden,
    E,
}

impl NamedConstant {
    fn partial_quotient(self, i: usize) -> u64 {
        match self {
            NamedConstant::Sqrt2 => if i == 0 { 1 } else { 2 },
            NamedConstant::Golden => 1,
            NamedConstant::E => match i {
                0 => 2,
                _ if i % 3 == 2 => 2 * (i as u64 + 1) / 3,
                _ => 1,
            },
        }
    }

    fn name(self) -> &'static str {
        match self {
            NamedConstant::Sqrt2 => "sqrt2",
            NamedConstant::Golden => "golden",
            NamedConstant::E => "e",
        }
    }

    /// Convergent number `depth` (0-based).
    pub fn convergent(self, depth: usize) -> BigRational {
        let (mut h_prev, mut h) = (BigInt::one(), BigInt::from(self.partial_quotient(0)));
        let (mut k_prev, mut k) = (BigInt::zero(), BigInt::one());
        for i in 1..=depth {
            let a = BigInt::from(self.partial_quotient(i));
            let h_next = &a * &h + &h_prev;
            let k_next = &a * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
        }
        BigRational::new(h, k)
    }

    /// First convergent whose denominator is at least `2^bits`.
    pub fn with_precision(self, bits: u32) -> (BigRational, usize) {
        let target = BigInt::one() << bits;
        let mut depth = 0;
        loop {
            let c = self.convergent(depth);
            if *c.denom() >= target {
                return (c, depth);
            }
            depth += 1;
        }
    }
}

/// Parses `sqrt2`, `golden`, `e`, `sqrt2@40` (explicit convergent depth), an
/// explicit rational `p/q`, or a decimal.
pub fn parse_realization(spec: &str, precision_bits: u32) -> Result<BigRational, RealizationError> {
    let spec = spec.trim();
    let (name, depth) = match spec.split_once('@') {
        Some((name, depth)) => {
            let depth = depth
                .trim()
                .parse::<usize>()
                .map_err(|_| RealizationError::Syntax(spec.to_string()))?;
            (name.trim(), Some(depth))
        }
        None => (spec, None),
    };
    let constant = match name {
        "sqrt2" => Some(NamedConstant::Sqrt2),
        "golden" => Some(NamedConstant::Golden),
        "e" => Some(NamedConstant::E),
        _ => None,
    };
    if let Some(c) = constant {
        return Ok(match depth {
            Some(d) => c.convergent(d),
            None => c.with_precision(precision_bits).0,
        });
    }
    if depth.is_some() {
        return Err(RealizationError::Syntax(spec.to_string()));
    }
    let parsed = match spec.split_once('/') {
        Some((p, q)) => p
            .trim()
            .parse::<BigInt>()
            .ok()
            .zip(q.trim().parse::<BigInt>().ok())
            .filter(|(_, q)| !q.is_zero())
            .map(|(p, q)| BigRational::new(p, q)),
        None => parse_decimal(spec),
    };
    parsed.ok_or_else(|| RealizationError::Syntax(spec.to_string()))
}

/// Exact value of a decimal literal such as `-0.25` or `3`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.chars().any(|c| !c.is_ascii_digit()) || (int.is_empty() && frac.is_empty()) {
        return None;
    }
    let negative = int.starts_with('-');
    let digits = int.trim_start_matches(['-', '+']);
    if digits.chars().any(|c| !c.is_ascii_digit()) || (digits.is_empty() && frac.is_empty()) {
        return None;
    }
    let num: BigInt = format!("{digits}{frac}").parse().ok()?;
    let value = BigRational::new(num, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if negative { -value } else { value })
}

/// A rotation symbol such as `α`, possibly realized by an exact rational.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rotation {
    pub symbol: String,
    pub realization: Option<BigRational>,
}

impl Rotation {
    pub fn symbolic(symbol: impl Into<String>) -> Self {
        Self { symbol: symbol.into(), realization: None }
    }

    pub fn realized(symbol: impl Into<String>, value: BigRational) -> Self {
        Self { symbol: symbol.into(), realization: Some(value) }
    }

    /// `√2` at the default 256-bit precision.
    pub fn sqrt2(symbol: impl Into<String>) -> Self {
        Self::realized(symbol, NamedConstant::Sqrt2.with_precision(DEFAULT_PRECISION_BITS).0)
    }

    pub fn value(&self) -> Result<&BigRational, RealizationError> {
        self.realization
            .as_ref()
            .ok_or_else(|| RealizationError::Missing(self.symbol.clone()))
    }

    /// Exact `frac(m·α) ∈ [0, 1)`.
    pub fn frac_mul(&self, m: &BigInt) -> Result<BigRational, RealizationError> {
        let alpha = self.value()?;
        Ok(frac_mul(m, alpha))
    }

    /// `‖m·α‖`, distance to the nearest integer, exact.
    pub fn dist_mul(&self, m: &BigInt) -> Result<BigRational, RealizationError> {
        Ok(dist_to_integer(&self.frac_mul(m)?))
    }
}

impl fmt::Debug for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.realization {
            Some(v) => write!(f, "{}≈{:.12}", self.symbol, unit_to_f64(&frac(v))),
            None => write!(f, "{}", self.symbol),
        }
    }
}

impl fmt::Display for Rotation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.symbol)
    }
}

impl fmt::Display for NamedConstant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `frac(m·a/b) = (m·a mod b)/b`.
pub fn frac_mul(m: &BigInt, alpha: &BigRational) -> BigRational {
    let num = (m * alpha.numer()).mod_floor(alpha.denom());
    BigRational::new(num, alpha.denom().clone())
}

pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

pub fn dist_to_integer(x: &BigRational) -> BigRational {
    let f = frac(x);
    let g = BigRational::one() - &f;
    if f < g { f } else { g }
}

/// Converts a value in `[0, 1)` to `f64` via a 64-bit fixed-point scaling.
pub fn unit_to_f64(x: &BigRational) -> f64 {
    let scaled = (x.numer() << 64u32) / x.denom();
    let bits = scaled.to_u128().unwrap_or(0);
    bits as f64 / 2f64.powi(64)
}

/// Converts any rational to `f64` (fractional part exact to 64 bits).
pub fn rational_to_f64(x: &BigRational) -> f64 {
    let fl = x.floor();
    let whole = fl.to_integer().to_f64().unwrap_or(f64::NAN);
    let part = unit_to_f64(&(x - &fl));
    if whole.is_finite() { whole + part } else { whole }
}

/// Exact rational with the same value as `x` (any finite `f64`).
pub fn f64_to_rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite float")
}
