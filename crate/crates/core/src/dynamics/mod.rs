//! Standard Weyl systems and their multicorrelations.
//!
//! A `d`-step standard Weyl system is the torus map
//! `T(x_1, …, x_d) = (x_1 + α, x_2 + x_1, …, x_d + x_{d-1})`, whose iterates
//! are `T^m(x)_i = x_i + Σ_{j=1}^{i-1} C(m, j)·x_{i-j} + C(m, i)·α`.
//! Characters `ψ_v(x) = e(v·x)` are mapped to characters times a phase, which
//! gives an exact route for every correlation of characters.

mod average;
mod expansion;
mod rotation;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::polynomial::{binomial, IntegralPolynomial};
use crate::weyl::{xi_domain, PolyFamily, WeylError};

pub use average::{
    ergodic_average, ergodic_average_checkpoints, ergodic_average_sharded, AverageCheckpoint,
    PhaseTerm, Sequence,
};
pub use expansion::{
    evaluate_tuples_exact, expansion, CharSum, CorrelationExpansion, ExpansionTerm,
    FormalValue, GaussianRational,
};
pub use rotation::{
    dist_to_integer, f64_to_rational, frac, frac_mul, parse_decimal, parse_realization, rational_to_f64,
    unit_to_f64, NamedConstant, RealizationError, Rotation, DEFAULT_PRECISION_BITS,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("expected {expected} characters (v^0..v^r), found {found}")]
    CharacterCount { expected: usize, found: usize },
    #[error("character has length {found}, system dimension is {expected}")]
    CharacterLength { expected: usize, found: usize },
    #[error("operation needs a single-factor system, found {0} factors")]
    NotSingleFactor(usize),
    #[error("system description line {line}: {message}")]
    SystemSyntax { line: usize, message: String },
}

/// One `d`-step standard Weyl factor rotating by `rotation`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factor {
    pub step: usize,
    pub rotation: Rotation,
}

/// Product `S_1 × … × S_s` of standard Weyl systems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardWeylSystem {
    factors: Vec<Factor>,
}

impl StandardWeylSystem {
    pub fn new(factors: Vec<Factor>) -> Self {
        assert!(factors.iter().all(|f| f.step >= 1), "factor steps must be positive");
        Self { factors }
    }

    pub fn single(step: usize, rotation: Rotation) -> Self {
        Self::new(vec![Factor { step, rotation }])
    }

    /// Parses lines `factor d=<int> alpha=<symbol>[=<realization>]`; blank
    /// lines and `#` comments are ignored.
    pub fn parse(text: &str, precision_bits: u32) -> Result<Self, DynamicsError> {
        let mut factors = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: &str| DynamicsError::SystemSyntax {
                line: idx + 1,
                message: message.to_string(),
            };
            let mut words = line.split_whitespace();
            if words.next() != Some("factor") {
                return Err(err("expected 'factor'"));
            }
            let (mut step, mut rotation) = (None, None);
            for word in words {
                if let Some(d) = word.strip_prefix("d=") {
                    step = Some(d.parse::<usize>().ok().filter(|&d| d >= 1).ok_or_else(|| err("bad step"))?);
                } else if let Some(a) = word.strip_prefix("alpha=") {
                    rotation = Some(match a.split_once('=') {
                        Some((sym, spec)) => Rotation::realized(
                            sym,
                            parse_realization(spec, precision_bits)
                                .map_err(|e| err(&e.to_string()))?,
                        ),
                        None => Rotation::symbolic(a),
                    });
                } else {
                    return Err(err("unknown field"));
                }
            }
            match (step, rotation) {
                (Some(step), Some(rotation)) => factors.push(Factor { step, rotation }),
                _ => return Err(err("need both d= and alpha=")),
            }
        }
        if factors.is_empty() {
            return Err(DynamicsError::SystemSyntax { line: 0, message: "no factors".into() });
        }
        Ok(Self::new(factors))
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    /// `Σ_j d_j`.
    pub fn dim(&self) -> usize {
        self.factors.iter().map(|f| f.step).sum()
    }

    pub fn max_step(&self) -> usize {
        self.factors.iter().map(|f| f.step).max().unwrap_or(0)
    }

    /// Realizes every factor whose symbol is `symbol`.
    pub fn realize(&mut self, symbol: &str, value: BigRational) {
        for f in self.factors.iter_mut().filter(|f| f.rotation.symbol == symbol) {
            f.rotation.realization = Some(value.clone());
        }
    }

    fn block_ranges(&self) -> Vec<std::ops::Range<usize>> {
        let mut start = 0;
        self.factors
            .iter()
            .map(|f| {
                let r = start..start + f.step;
                start += f.step;
                r
            })
            .collect()
    }

    fn check_character(&self, v: &Character) -> Result<(), DynamicsError> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(DynamicsError::CharacterLength { expected: self.dim(), found: v.len() })
        }
    }
}

/// Integer frequency vector of a character `ψ_v`, factor blocks concatenated.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Character(pub Vec<BigInt>);

impl Character {
    pub fn from_i64(v: &[i64]) -> Self {
        Self(v.iter().map(|&x| x.into()).collect())
    }

    pub fn zero(len: usize) -> Self {
        Self(vec![BigInt::zero(); len])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_trivial(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Parses `(1, -2, 0)` or `1,-2,0`.
    pub fn parse(text: &str) -> Option<Self> {
        let inner = text.trim().trim_start_matches('(').trim_end_matches(')');
        if inner.trim().is_empty() {
            return None;
        }
        inner
            .split(',')
            .map(|x| x.trim().parse::<BigInt>().ok())
            .collect::<Option<Vec<_>>>()
            .map(Self)
    }

    fn add_assign(&mut self, other: &[BigInt]) {
        for (a, b) in self.0.iter_mut().zip(other) {
            *a += b;
        }
    }
}

impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Character{self}")
    }
}

/// `ψ_v ∘ T^m = e(Σ_j phase_j·α_j) · ψ_freq`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pushforward {
    /// Integer multiplier of each factor's rotation.
    pub phase: Vec<BigInt>,
    pub freq: Character,
}

/// One factor block: frequency `(A^m)ᵀ v` and phase multiplier `Σ_i v_i C(m, i)`.
fn push_block(v: &[BigInt], m: &BigInt) -> (BigInt, Vec<BigInt>) {
    let d = v.len();
    let binoms: Vec<BigInt> = (0..=d).map(|i| binomial(m, i)).collect();
    let freq = (0..d)
        .map(|j| (j..d).fold(BigInt::zero(), |acc, i| acc + &v[i] * &binoms[i - j]))
        .collect();
    let phase = (0..d).fold(BigInt::zero(), |acc, i| acc + &v[i] * &binoms[i + 1]);
    (phase, freq)
}

pub fn pushforward(
    sys: &StandardWeylSystem,
    v: &Character,
    m: &BigInt,
) -> Result<Pushforward, DynamicsError> {
    sys.check_character(v)?;
    let mut phase = Vec::with_capacity(sys.factors.len());
    let mut freq = Vec::with_capacity(v.len());
    for range in sys.block_ranges() {
        let (p, f) = push_block(&v.0[range], m);
        phase.push(p);
        freq.extend(f);
    }
    Ok(Pushforward { phase, freq: Character(freq) })
}

/// Exact value of a correlation of characters: `0` or `e(Σ_j m_j·α_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ExactValue {
    Zero,
    /// Integer multipliers `m_j` of each factor's rotation.
    Phase(Vec<BigInt>),
}

fn check_chars(
    sys: &StandardWeylSystem,
    chars: &[Character],
    family: &PolyFamily,
) -> Result<(), DynamicsError> {
    if chars.len() != family.len() + 1 {
        return Err(DynamicsError::CharacterCount { expected: family.len() + 1, found: chars.len() });
    }
    chars.iter().try_for_each(|c| sys.check_character(c))
}

/// `∫ ψ_{v^0} · T^{p_1(n)}ψ_{v^1} ⋯ T^{p_r(n)}ψ_{v^r} dμ`, by pushing every
/// character through its iterate and applying orthogonality.
pub fn correlate_exact(
    sys: &StandardWeylSystem,
    chars: &[Character],
    family: &PolyFamily,
    n: &BigInt,
) -> Result<ExactValue, DynamicsError> {
    check_chars(sys, chars, family)?;
    let mut total = chars[0].clone();
    let mut phase = vec![BigInt::zero(); sys.factors.len()];
    for (p, v) in family.polys().iter().zip(&chars[1..]) {
        let pushed = pushforward(sys, v, &p.eval(n))?;
        total.add_assign(&pushed.freq.0);
        for (acc, x) in phase.iter_mut().zip(&pushed.phase) {
            *acc += x;
        }
    }
    Ok(if total.is_trivial() { ExactValue::Phase(phase) } else { ExactValue::Zero })
}

/// Closed form of a single-factor character correlation as a function of `n`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CorrelationClosedForm {
    /// `0` for every integer `n` outside `exceptional_set`.
    Zero { exceptional_set: Vec<BigInt> },
    /// `e(q(n)·α)` for every integer `n`.
    Phase { q: IntegralPolynomial },
}

impl CorrelationClosedForm {
    /// Value at `n` when it is determined by the closed form alone.
    pub fn value_at(&self, n: &BigInt) -> Option<ExactValue> {
        match self {
            CorrelationClosedForm::Phase { q } => Some(ExactValue::Phase(vec![q.eval(n)])),
            CorrelationClosedForm::Zero { exceptional_set } => {
                (!exceptional_set.contains(n)).then_some(ExactValue::Zero)
            }
        }
    }

    pub fn phase(&self) -> Option<&IntegralPolynomial> {
        match self {
            CorrelationClosedForm::Phase { q } => Some(q),
            CorrelationClosedForm::Zero { .. } => None,
        }
    }
}

/// Stacks per-character blocks into `v = (v^1_1..v^r_1, v^1_2..v^r_2, …)`.
fn stacked_vector(blocks: &[&[BigInt]], step: usize) -> Vec<BigInt> {
    let r = blocks.len();
    let mut v = vec![BigInt::zero(); r * step];
    for (k, block) in blocks.iter().enumerate() {
        for (i, x) in block.iter().enumerate() {
            v[i * r + k] = x.clone();
        }
    }
    v
}

/// Pushed-frequency polynomials `F_l(n) = v^0_l + Σ_k Σ_{i≥l} v^k_i·p_k^[i-l](n)`.
fn frequency_polynomials(blocks: &[&[BigInt]], family: &PolyFamily, step: usize) -> Vec<IntegralPolynomial> {
    (0..step)
        .map(|l| {
            let mut acc = IntegralPolynomial::constant(blocks[0][l].clone());
            for (p, v) in family.polys().iter().zip(&blocks[1..]) {
                for i in l..step {
                    if !v[i].is_zero() {
                        acc = &acc + &p.binomial_transform(i - l).scale(&v[i]);
                    }
                }
            }
            acc
        })
        .collect()
}

/// Closed form for a single `d`-step factor.
///
/// For families with zero constant terms the phase case is decided by the
/// rank condition: `v^0 + Σ v^k = 0` and the tail of the stacked vector lies
/// in `R-span(Λ_{d-1})^⊥`. Otherwise the pushed-frequency polynomials are
/// tested for vanishing identically. In the zero case the exceptional set
/// holds the integers where all of them vanish at once.
pub fn correlate_closed_form(
    sys: &StandardWeylSystem,
    chars: &[Character],
    family: &PolyFamily,
) -> Result<CorrelationClosedForm, DynamicsError> {
    if sys.factors.len() != 1 {
        return Err(DynamicsError::NotSingleFactor(sys.factors.len()));
    }
    check_chars(sys, chars, family)?;
    family.require_essentially_distinct()?;
    let step = sys.factors[0].step;
    let blocks: Vec<&[BigInt]> = chars.iter().map(|c| c.0.as_slice()).collect();
    Ok(closed_form_block(&blocks, family, step)?)
}

pub(crate) fn closed_form_block(
    blocks: &[&[BigInt]],
    family: &PolyFamily,
    step: usize,
) -> Result<CorrelationClosedForm, WeylError> {
    let r = family.len();
    let v = stacked_vector(&blocks[1..], step);
    let freqs = frequency_polynomials(blocks, family, step);
    let is_phase = if family.has_zero_constant_term() {
        let balanced = (0..step).all(|l| blocks.iter().map(|b| &b[l]).sum::<BigInt>().is_zero());
        let v_rat: Vec<BigRational> = v.iter().cloned().map(BigRational::from_integer).collect();
        let phase = balanced && xi_domain(family, step)?.contains(&v_rat).expect("length r*d");
        debug_assert_eq!(phase, freqs.iter().all(IntegralPolynomial::is_zero));
        phase
    } else {
        freqs.iter().all(IntegralPolynomial::is_zero)
    };
    if is_phase {
        let mut q = IntegralPolynomial::zero();
        for (idx, x) in v.iter().enumerate() {
            if !x.is_zero() {
                let p = &family.polys()[idx % r];
                q = &q + &p.binomial_transform(idx / r + 1).scale(x);
            }
        }
        return Ok(CorrelationClosedForm::Phase { q });
    }
    Ok(CorrelationClosedForm::Zero { exceptional_set: common_integer_roots(&freqs) })
}

/// Integers at which every polynomial in `polys` vanishes.
pub fn common_integer_roots(polys: &[IntegralPolynomial]) -> Vec<BigInt> {
    let nonzero: Vec<&IntegralPolynomial> = polys.iter().filter(|p| !p.is_zero()).collect();
    let Some(seed) = nonzero.iter().min_by_key(|p| p.degree()) else {
        return Vec::new();
    };
    integer_roots(seed)
        .into_iter()
        .filter(|x| nonzero.iter().all(|p| p.eval(x).is_zero()))
        .collect()
}

/// Integer roots of a nonzero polynomial, ascending.
pub fn integer_roots(p: &IntegralPolynomial) -> Vec<BigInt> {
    if p.is_constant() {
        return Vec::new();
    }
    let mono = p.to_monomial();
    let scale = BigRational::from_integer(mono.denominator_lcm());
    let coeffs: Vec<BigInt> = mono.coeffs().iter().map(|c| (c * &scale).to_integer()).collect();
    let lowest = coeffs.iter().position(|c| !c.is_zero()).expect("nonzero polynomial");
    let mut roots = Vec::new();
    if lowest > 0 {
        roots.push(BigInt::zero());
    }
    let reduced = &coeffs[lowest..];
    if reduced.len() > 1 {
        let trailing = reduced[0].abs();
        let lead = reduced.last().expect("nonempty").abs();
        // Cauchy bound: |x| ≤ 1 + max|a_i| / |a_D|
        let bound = reduced.iter().map(|c| c.abs()).max().expect("nonempty") / &lead + 1;
        for d in divisors_up_to(&trailing, &bound) {
            for x in [d.clone(), -d] {
                if p.eval(&x).is_zero() {
                    roots.push(x);
                }
            }
        }
    }
    roots.sort();
    roots.dedup();
    roots
}

/// Positive divisors of `n` that are at most `bound`.
fn divisors_up_to(n: &BigInt, bound: &BigInt) -> Vec<BigInt> {
    let limit = bound.min(n).clone();
    let mut out = Vec::new();
    if let Some(limit) = limit.to_u64().filter(|&l| l <= 1 << 24) {
        for d in 1..=limit {
            if (n % d).is_zero() {
                out.push(BigInt::from(d));
            }
        }
        return out;
    }
    // large bound: enumerate divisor pairs up to √n
    let mut d = BigInt::one();
    while &d * &d <= *n {
        if (n % &d).is_zero() {
            for x in [d.clone(), n / &d] {
                if x <= *bound {
                    out.push(x);
                }
            }
        }
        d += 1;
    }
    out
}

/// `T^n(x0)` on a single factor, exact modulo 1.
pub fn orbit(
    step: usize,
    rotation: &Rotation,
    x0: &[BigRational],
    n: &BigInt,
) -> Result<Vec<BigRational>, DynamicsError> {
    if x0.len() != step {
        return Err(DynamicsError::CharacterLength { expected: step, found: x0.len() });
    }
    let alpha = rotation.value()?;
    let binoms: Vec<BigInt> = (0..=step).map(|i| binomial(n, i)).collect();
    Ok((0..step)
        .map(|i| {
            let mut acc = x0[i].clone() + frac_mul(&binoms[i + 1], alpha);
            for j in 1..=i {
                acc += &x0[i - j] * BigRational::from_integer(binoms[j].clone());
            }
            frac(&acc)
        })
        .collect())
}

/// One application of `T`, exact modulo 1.
pub fn step_once(rotation: &Rotation, x: &[BigRational]) -> Result<Vec<BigRational>, DynamicsError> {
    let alpha = rotation.value()?;
    Ok((0..x.len())
        .map(|i| {
            let shift = if i == 0 { alpha.clone() } else { x[i - 1].clone() };
            frac(&(&x[i] + shift))
        })
        .collect())
}
