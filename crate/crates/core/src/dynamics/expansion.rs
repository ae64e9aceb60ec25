//! Polynomial Fourier expansion of correlations of trigonometric polynomials.
//!
//! Each `f_k` is a finite character sum, so the correlation
//! `∫ f_0 · T^{p_1(n)}f_1 ⋯ T^{p_r(n)}f_r` is a finite sum over character
//! tuples. Every tuple factors over the product system, and each factor has
//! a closed form.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{
    closed_form_block, correlate_exact, Character, CorrelationClosedForm,
    DynamicsError, ExactValue, StandardWeylSystem,
};
use crate::polynomial::IntegralPolynomial;
use crate::weyl::PolyFamily;

/// Exact complex rational `re + im·i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GaussianRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussianRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        Self { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        Self { re, im: BigRational::zero() }
    }

    pub fn from_i64(re: i64, im: i64) -> Self {
        Self::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn zero() -> Self {
        Self::from_i64(0, 0)
    }

    pub fn one() -> Self {
        Self::from_i64(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.re.clone(), -&self.im)
    }

    /// `|z|²`.
    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }
}

impl Add for &GaussianRational {
    type Output = GaussianRational;
    fn add(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl AddAssign<&GaussianRational> for GaussianRational {
    fn add_assign(&mut self, rhs: &GaussianRational) {
        self.re += &rhs.re;
        self.im += &rhs.im;
    }
}

impl Mul for &GaussianRational {
    type Output = GaussianRational;
    fn mul(self, rhs: &GaussianRational) -> GaussianRational {
        GaussianRational::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Neg for &GaussianRational {
    type Output = GaussianRational;
    fn neg(self) -> GaussianRational {
        GaussianRational::new(-&self.re, -&self.im)
    }
}

impl fmt::Display for GaussianRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) => write!(f, "{}i", self.im),
            (false, false) => {
                let sign = if self.im < BigRational::zero() { '-' } else { '+' };
                let im = if self.im < BigRational::zero() { -&self.im } else { self.im.clone() };
                write!(f, "{}{sign}{im}i", self.re)
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("cannot parse '{0}'")]
pub struct CoefficientParseError(pub String);

fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let (p, q) = (p.trim().parse::<BigInt>().ok()?, q.trim().parse::<BigInt>().ok()?);
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => text.parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Accepts `3/4`, `2i`, `-i`, `1/2-3i`.
impl FromStr for GaussianRational {
    type Err = CoefficientParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let err = || CoefficientParseError(text.to_string());
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(body) = s.strip_suffix('i') else {
            return parse_rational(&s).map(Self::real).ok_or_else(err);
        };
        let split = body.rfind(['+', '-']).filter(|&i| i > 0);
        let (re, im) = match split {
            Some(i) => (parse_rational(&body[..i]).ok_or_else(err)?, &body[i..]),
            None => (BigRational::zero(), body),
        };
        let im = match im {
            "" | "+" => BigRational::one(),
            "-" => -BigRational::one(),
            _ => parse_rational(im.trim_start_matches('+')).ok_or_else(err)?,
        };
        Ok(Self::new(re, im))
    }
}

/// Finite character sum `Σ c·ψ_v`, duplicates merged and zero terms removed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharSum {
    terms: Vec<(GaussianRational, Character)>,
}

impl CharSum {
    pub fn new(terms: Vec<(GaussianRational, Character)>) -> Self {
        let mut merged: BTreeMap<Character, GaussianRational> = BTreeMap::new();
        for (c, v) in terms {
            *merged.entry(v).or_insert_with(GaussianRational::zero) += &c;
        }
        Self { terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).map(|(v, c)| (c, v)).collect() }
    }

    pub fn single(v: Character) -> Self {
        Self::new(vec![(GaussianRational::one(), v)])
    }

    pub fn terms(&self) -> &[(GaussianRational, Character)] {
        &self.terms
    }

    /// `‖f‖₂² = Σ |c|²` by orthonormality of characters.
    pub fn l2_norm_sqr(&self) -> BigRational {
        self.terms.iter().map(|(c, _)| c.norm_sqr()).sum()
    }

    /// Parses `;`-separated terms `coeff*(v_1,…,v_d)`; a bare tuple has coefficient 1.
    pub fn parse(text: &str) -> Result<Self, CoefficientParseError> {
        let mut terms = Vec::new();
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (coeff, tuple) = match part.find('(') {
                Some(i) => (part[..i].trim().trim_end_matches('*').trim(), &part[i..]),
                None => ("", part),
            };
            let coeff = if coeff.is_empty() { GaussianRational::one() } else { coeff.parse()? };
            let v = Character::parse(tuple).ok_or_else(|| CoefficientParseError(part.to_string()))?;
            terms.push((coeff, v));
        }
        if terms.is_empty() {
            return Err(CoefficientParseError(text.to_string()));
        }
        Ok(Self::new(terms))
    }
}

impl fmt::Display for CharSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(c, v)| format!("{c}*{v}")).collect();
        f.write_str(&parts.join("; "))
    }
}

/// `c · e(Σ_j q_j(n)·α_j)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpansionTerm {
    pub coeff: GaussianRational,
    /// One polynomial per factor.
    pub phases: Vec<IntegralPolynomial>,
}

/// Multiplier vectors `(m_1, …, m_s)` of `e(Σ m_j α_j)` with their coefficients.
pub type FormalValue = BTreeMap<Vec<BigInt>, GaussianRational>;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelationExpansion {
    pub terms: Vec<ExpansionTerm>,
    /// Integers where a vanishing tuple may be nonzero.
    pub exceptional_set: Vec<BigInt>,
    /// `Σ_l |c_l|²`.
    pub l2_norm_sqr: BigRational,
    /// `Π_k ‖f_k‖₂²`.
    pub norm_product_sqr: BigRational,
    pub tuples: usize,
}

impl CorrelationExpansion {
    pub fn satisfies_l2_bound(&self) -> bool {
        self.l2_norm_sqr <= self.norm_product_sqr
    }

    /// Formal value at `n`; valid for `n` outside `exceptional_set`.
    pub fn evaluate(&self, n: &BigInt) -> FormalValue {
        let mut out = FormalValue::new();
        for term in &self.terms {
            let key: Vec<BigInt> = term.phases.iter().map(|q| q.eval(n)).collect();
            *out.entry(key).or_insert_with(GaussianRational::zero) += &term.coeff;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }
}

fn check_sums(
    sys: &StandardWeylSystem,
    fs: &[CharSum],
    family: &PolyFamily,
) -> Result<(), DynamicsError> {
    if fs.len() != family.len() + 1 {
        return Err(DynamicsError::CharacterCount { expected: family.len() + 1, found: fs.len() });
    }
    fs.iter()
        .flat_map(|f| f.terms.iter())
        .try_for_each(|(_, v)| sys.check_character(v))
}

/// Calls `visit` with every tuple `(c, (v^0, …, v^r))` of the product `f_0 ⋯ f_r`.
fn for_each_tuple(fs: &[CharSum], mut visit: impl FnMut(&GaussianRational, &[Character])) {
    if fs.iter().any(|f| f.terms.is_empty()) {
        return;
    }
    let mut idx = vec![0usize; fs.len()];
    loop {
        let mut coeff = GaussianRational::one();
        let mut chars = Vec::with_capacity(fs.len());
        for (f, &i) in fs.iter().zip(&idx) {
            coeff = &coeff * &f.terms[i].0;
            chars.push(f.terms[i].1.clone());
        }
        visit(&coeff, &chars);
        let mut k = 0;
        loop {
            if k == fs.len() {
                return;
            }
            idx[k] += 1;
            if idx[k] < fs[k].terms.len() {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

pub fn expansion(
    sys: &StandardWeylSystem,
    fs: &[CharSum],
    family: &PolyFamily,
) -> Result<CorrelationExpansion, DynamicsError> {
    check_sums(sys, fs, family)?;
    family.require_essentially_distinct()?;
    let ranges = sys.block_ranges();
    let mut terms: Vec<ExpansionTerm> = Vec::new();
    let mut exceptional = Vec::new();
    let mut tuples = 0;
    let mut failure = None;
    for_each_tuple(fs, |coeff, chars| {
        tuples += 1;
        if failure.is_some() {
            return;
        }
        let mut phases = Vec::with_capacity(ranges.len());
        for (factor, range) in sys.factors().iter().zip(&ranges) {
            let blocks: Vec<&[BigInt]> = chars.iter().map(|c| &c.0[range.clone()]).collect();
            match closed_form_block(&blocks, family, factor.step) {
                Ok(CorrelationClosedForm::Phase { q }) => phases.push(q),
                Ok(CorrelationClosedForm::Zero { exceptional_set }) => {
                    exceptional.extend(exceptional_set);
                    return;
                }
                Err(e) => {
                    failure = Some(e);
                    return;
                }
            }
        }
        match terms.iter_mut().find(|t| t.phases == phases) {
            Some(t) => t.coeff += coeff,
            None => terms.push(ExpansionTerm { coeff: coeff.clone(), phases }),
        }
    });
    if let Some(e) = failure {
        return Err(e.into());
    }
    terms.retain(|t| !t.coeff.is_zero());
    exceptional.sort();
    exceptional.dedup();
    let l2_norm_sqr = terms.iter().map(|t| t.coeff.norm_sqr()).sum();
    let norm_product_sqr = fs.iter().map(CharSum::l2_norm_sqr).product();
    Ok(CorrelationExpansion { terms, exceptional_set: exceptional, l2_norm_sqr, norm_product_sqr, tuples })
}

/// Oracle: `correlate_exact` on every character tuple, summed with coefficients.
pub fn evaluate_tuples_exact(
    sys: &StandardWeylSystem,
    fs: &[CharSum],
    family: &PolyFamily,
    n: &BigInt,
) -> Result<FormalValue, DynamicsError> {
    check_sums(sys, fs, family)?;
    let mut out = FormalValue::new();
    let mut failure = None;
    for_each_tuple(fs, |coeff, chars| {
        if failure.is_some() {
            return;
        }
        match correlate_exact(sys, chars, family, n) {
            Ok(ExactValue::Phase(m)) => {
                *out.entry(m).or_insert_with(GaussianRational::zero) += coeff;
            }
            Ok(ExactValue::Zero) => {}
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    out.retain(|_, c| !c.is_zero());
    Ok(out)
}
