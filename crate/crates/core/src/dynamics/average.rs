//! Floating-point Cesàro averages of polynomial phase sequences.
//!
//! Phases are reduced modulo 1 exactly: the integer multiplier `q(n)` is
//! multiplied against the numerator of the realization and reduced modulo
//! its denominator before anything is converted to floating point.

use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::expansion::{CorrelationExpansion, GaussianRational};
use super::rotation::{rational_to_f64, RealizationError, Rotation};
use crate::polynomial::IntegralPolynomial;

/// `e(q(n)·α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseTerm {
    pub q: IntegralPolynomial,
    pub rotation: Rotation,
}

/// `Σ_l c_l · Π_i e(q_{l,i}(n)·α_{l,i})`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sequence {
    terms: Vec<(GaussianRational, Vec<PhaseTerm>)>,
}

impl Sequence {
    pub fn new(terms: Vec<(GaussianRational, Vec<PhaseTerm>)>) -> Self {
        Self { terms }
    }

    /// The constant sequence `1`.
    pub fn one() -> Self {
        Self::new(vec![(GaussianRational::one(), Vec::new())])
    }

    /// Product of phases `Π_i e(q_i(n)·α_i)`.
    pub fn phases(phases: Vec<PhaseTerm>) -> Self {
        Self::new(vec![(GaussianRational::one(), phases)])
    }

    /// The correlation sequence of an expansion; `rotations[j]` drives factor `j`.
    pub fn from_expansion(exp: &CorrelationExpansion, rotations: &[Rotation]) -> Self {
        let terms = exp
            .terms
            .iter()
            .map(|t| {
                let phases = t
                    .phases
                    .iter()
                    .zip(rotations)
                    .map(|(q, rotation)| PhaseTerm { q: q.clone(), rotation: rotation.clone() })
                    .collect();
                (t.coeff.clone(), phases)
            })
            .collect();
        Self::new(terms)
    }

    /// Pointwise product.
    pub fn times(&self, other: &Sequence) -> Sequence {
        let mut terms = Vec::new();
        for (a, pa) in &self.terms {
            for (b, pb) in &other.terms {
                terms.push((a * b, pa.iter().chain(pb).cloned().collect()));
            }
        }
        Sequence::new(terms)
    }

    pub fn terms(&self) -> &[(GaussianRational, Vec<PhaseTerm>)] {
        &self.terms
    }

    fn compile(&self) -> Result<Compiled, RealizationError> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (c, phases) in &self.terms {
            // phases sharing a realization are merged into one multiplier
            let mut groups: Vec<(BigRational, IntegralPolynomial)> = Vec::new();
            for p in phases {
                let alpha = p.rotation.value()?;
                match groups.iter_mut().find(|(a, _)| a == alpha) {
                    Some((_, q)) => *q = &*q + &p.q,
                    None => groups.push((alpha.clone(), p.q.clone())),
                }
            }
            groups.retain(|(_, q)| !q.is_zero());
            let coeff = Complex64::new(rational_to_f64(&c.re), rational_to_f64(&c.im));
            terms.push((coeff, groups));
        }
        Ok(Compiled { terms })
    }
}

struct Compiled {
    terms: Vec<(Complex64, Vec<(BigRational, IntegralPolynomial)>)>,
}

impl Compiled {
    fn value(&self, n: &BigInt) -> Complex64 {
        let mut total = Complex64::zero();
        for (coeff, groups) in &self.terms {
            if groups.is_empty() {
                total += coeff;
                continue;
            }
            let mut turns = 0u64;
            for (alpha, q) in groups {
                turns = turns.wrapping_add(frac_fixed(&q.eval(n), alpha));
            }
            if turns == 0 {
                total += coeff;
            } else {
                let angle = TAU * (turns as f64 / 2f64.powi(64));
                total += coeff * Complex64::new(angle.cos(), angle.sin());
            }
        }
        total
    }

    fn range_sum(&self, lo: u64, hi: u64) -> Complex64 {
        let mut sum = Complex64::zero();
        for n in lo..=hi {
            sum += self.value(&BigInt::from(n));
        }
        sum
    }
}

/// `floor(frac(m·α)·2^64)`, exact.
fn frac_fixed(m: &BigInt, alpha: &BigRational) -> u64 {
    let num = (m * alpha.numer()).mod_floor(alpha.denom());
    ((num << 64u32) / alpha.denom()).to_u64().expect("value below 2^64")
}

/// `(1/N)·Σ_{n=1}^{N} seq(n)`, summed sequentially.
pub fn ergodic_average(seq: &Sequence, n_max: u64) -> Result<Complex64, RealizationError> {
    assert!(n_max >= 1, "average length must be positive");
    let compiled = seq.compile()?;
    Ok(compiled.range_sum(1, n_max) / n_max as f64)
}

/// Running mean after `n` terms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AverageCheckpoint {
    pub n: u64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

/// Running means at `n_max/10, 2·n_max/10, …, n_max`.
pub fn ergodic_average_checkpoints(
    seq: &Sequence,
    n_max: u64,
) -> Result<Vec<AverageCheckpoint>, RealizationError> {
    assert!(n_max >= 1, "average length must be positive");
    let compiled = seq.compile()?;
    let mut marks: Vec<u64> = (1..=10).map(|k| n_max * k / 10).filter(|&m| m > 0).collect();
    marks.dedup();
    let mut sum = Complex64::zero();
    let mut out = Vec::with_capacity(marks.len());
    let mut next = 1;
    for m in marks {
        sum += compiled.range_sum(next, m);
        next = m + 1;
        let mean = sum / m as f64;
        out.push(AverageCheckpoint { n: m, re: mean.re, im: mean.im, abs: mean.norm() });
    }
    Ok(out)
}

/// Splits `[1, N]` into `shards` ranges, evaluates them on separate threads
/// and adds the partial sums in index order.
pub fn ergodic_average_sharded(
    seq: &Sequence,
    n_max: u64,
    shards: usize,
) -> Result<Complex64, RealizationError> {
    assert!(n_max >= 1 && shards >= 1, "average length and shard count must be positive");
    let compiled = seq.compile()?;
    let shards = shards.min(n_max as usize) as u64;
    let bounds: Vec<(u64, u64)> = (0..shards)
        .map(|k| (n_max * k / shards + 1, n_max * (k + 1) / shards))
        .collect();
    let partials: Vec<Complex64> = std::thread::scope(|s| {
        let handles: Vec<_> = bounds
            .iter()
            .map(|&(lo, hi)| {
                let compiled = &compiled;
                s.spawn(move || compiled.range_sum(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("shard thread panicked")).collect()
    });
    Ok(partials.into_iter().fold(Complex64::zero(), |a, b| a + b) / n_max as f64)
}
