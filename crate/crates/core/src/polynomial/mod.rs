//! Integer-valued polynomials in one variable.
//!
//! An [`IntegralPolynomial`] is stored in the binomial basis
//! `p(n) = Σ c_j·C(n, j)`, where it is integer valued on ℤ exactly when
//! every `c_j` is an integer. [`RationalPolynomial`] is the monomial view
//! used for coordinates in span computations.

mod parse;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

pub use parse::{parse_family, parse_poly, parse_rational_poly, ParseError};

/// Degree of a polynomial; the zero polynomial sits below every finite degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(usize),
}

impl Degree {
    pub fn finite(self) -> Option<usize> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }
}

/// Raised when a rational polynomial is not integer valued on ℤ.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("not integer valued: binomial-basis coefficient c_{index} = {value}")]
pub struct IntegralityError {
    pub index: usize,
    pub value: BigRational,
}

/// `C(n, k)` for any integer `n`, via the falling factorial `n(n-1)…(n-k+1)/k!`.
pub fn binomial(n: &BigInt, k: usize) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - BigInt::from(i));
        acc /= BigInt::from(i + 1);
    }
    acc
}

fn factorial(k: usize) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Integer-valued polynomial, canonical in the binomial basis.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct IntegralPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntegralPolynomial {
    /// Builds `Σ coeffs[j]·C(n, j)`; trailing zeros are dropped.
    pub fn from_binomial_coeffs(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        Self::from_binomial_coeffs(vec![c.into()])
    }

    /// The polynomial `n`.
    pub fn identity() -> Self {
        Self::from_binomial_coeffs(vec![BigInt::zero(), BigInt::one()])
    }

    /// The basis element `C(n, j)`.
    pub fn binomial_basis(j: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); j + 1];
        coeffs[j] = BigInt::one();
        Self { coeffs }
    }

    /// Integer monomial coefficients `a_0 + a_1 n + …`; always integral.
    pub fn from_int_monomials(coeffs: &[i64]) -> Self {
        let rat = RationalPolynomial::new(
            coeffs.iter().map(|&a| BigRational::from_integer(a.into())).collect(),
        );
        Self::from_monomial(&rat).expect("integer coefficients are integral")
    }

    /// Inverse of [`to_monomial`](Self::to_monomial): the binomial-basis
    /// coefficients are the forward differences `Δ^j p(0)`.
    pub fn from_monomial(p: &RationalPolynomial) -> Result<Self, IntegralityError> {
        let Some(deg) = p.degree().finite() else {
            return Ok(Self::zero());
        };
        let mut values: Vec<BigRational> = (0..=deg)
            .map(|n| p.eval(&BigRational::from_integer(n.into())))
            .collect();
        let mut coeffs = Vec::with_capacity(deg + 1);
        for j in 0..=deg {
            let c = values[0].clone();
            if !c.is_integer() {
                return Err(IntegralityError { index: j, value: c });
            }
            coeffs.push(c.to_integer());
            for i in 0..values.len() - 1 {
                values[i] = &values[i + 1] - &values[i];
            }
            values.pop();
        }
        Ok(Self::from_binomial_coeffs(coeffs))
    }

    pub fn binomial_coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            len => Degree::Finite(len - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    /// Value at `n = 0`.
    pub fn constant_term(&self) -> BigInt {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        let mut basis = BigInt::one();
        for (j, c) in self.coeffs.iter().enumerate() {
            acc += c * &basis;
            basis = basis * (n - BigInt::from(j));
            basis /= BigInt::from(j + 1);
        }
        acc
    }

    pub fn eval_i64(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// Exact change of basis `C(n, j) = n(n-1)…(n-j+1)/j!`.
    pub fn to_monomial(&self) -> RationalPolynomial {
        let mut out = vec![BigRational::zero(); self.coeffs.len()];
        // falling factorial n(n-1)…(n-j+1) in monomial coefficients
        let mut falling: Vec<BigInt> = vec![BigInt::one()];
        for (j, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                let denom = factorial(j);
                for (i, f) in falling.iter().enumerate() {
                    out[i] += BigRational::new(c * f, denom.clone());
                }
            }
            let shift = BigInt::from(j);
            let mut next = vec![BigInt::zero(); falling.len() + 1];
            for (i, f) in falling.iter().enumerate() {
                next[i + 1] += f;
                next[i] -= f * &shift;
            }
            falling = next;
        }
        RationalPolynomial::new(out)
    }

    /// `p ∘ q`.
    pub fn compose(&self, q: &IntegralPolynomial) -> IntegralPolynomial {
        let composed = self.to_monomial().compose(&q.to_monomial());
        Self::from_monomial(&composed).expect("composition of integral polynomials is integral")
    }

    /// `p^[k](n) = C(p(n), k)`, obtained by composing `X(X-1)…(X-k+1)/k!` with `p`.
    pub fn binomial_transform(&self, k: usize) -> IntegralPolynomial {
        let composed = self.to_monomial().binomial(k);
        Self::from_monomial(&composed).expect("C(p(n), k) is integer valued")
    }

    pub fn scale(&self, s: &BigInt) -> IntegralPolynomial {
        Self::from_binomial_coeffs(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `(p(m·n + i) - p(i)) / m`, when it is still integral.
    pub fn rescale(&self, m: i64, i: i64) -> Result<IntegralPolynomial, IntegralityError> {
        let affine = RationalPolynomial::new(vec![
            BigRational::from_integer(i.into()),
            BigRational::from_integer(m.into()),
        ]);
        let shifted = self.to_monomial().compose(&affine);
        let base = BigRational::from_integer(self.eval_i64(i));
        let scaled = (shifted - RationalPolynomial::constant(base))
            .scale(&BigRational::new(BigInt::one(), m.into()));
        Self::from_monomial(&scaled)
    }
}

impl Add for &IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn add(self, rhs: &IntegralPolynomial) -> IntegralPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..len)
            .map(|j| {
                let a = self.coeffs.get(j).cloned().unwrap_or_default();
                let b = rhs.coeffs.get(j).cloned().unwrap_or_default();
                a + b
            })
            .collect();
        IntegralPolynomial::from_binomial_coeffs(coeffs)
    }
}

impl Neg for &IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn neg(self) -> IntegralPolynomial {
        IntegralPolynomial::from_binomial_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn sub(self, rhs: &IntegralPolynomial) -> IntegralPolynomial {
        self + &(-rhs)
    }
}

impl Mul for &IntegralPolynomial {
    type Output = IntegralPolynomial;
    fn mul(self, rhs: &IntegralPolynomial) -> IntegralPolynomial {
        let product = &self.to_monomial() * &rhs.to_monomial();
        IntegralPolynomial::from_monomial(&product).expect("product of integral polynomials")
    }
}

impl fmt::Display for IntegralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.to_monomial(), f)
    }
}

impl fmt::Debug for IntegralPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntegralPolynomial({self})")
    }
}

impl From<IntegralPolynomial> for String {
    fn from(p: IntegralPolynomial) -> String {
        p.to_string()
    }
}

impl TryFrom<String> for IntegralPolynomial {
    type Error = ParseError;
    fn try_from(s: String) -> Result<Self, ParseError> {
        parse_poly(&s)
    }
}

impl std::str::FromStr for IntegralPolynomial {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_poly(s)
    }
}

/// `true` iff every polynomial and every pairwise difference is nonconstant.
pub fn is_essentially_distinct(polys: &[IntegralPolynomial]) -> bool {
    polys.iter().all(|p| !p.is_constant())
        && polys
            .iter()
            .enumerate()
            .all(|(i, p)| polys[i + 1..].iter().all(|q| !(p - q).is_constant()))
}

/// Polynomial with exact rational coefficients in the monomial basis.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalPolynomial {
    coeffs: Vec<BigRational>,
}

impl RationalPolynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// The polynomial `n`.
    pub fn identity() -> Self {
        Self::new(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `n^j` (zero past the degree).
    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Degree {
        match self.coeffs.len() {
            0 => Degree::NegInfinity,
            len => Degree::Finite(len - 1),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    pub fn compose(&self, inner: &RationalPolynomial) -> Self {
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * inner) + &Self::constant(c.clone())
        })
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::constant(BigRational::one()), |acc, _| &acc * self)
    }

    /// `C(self, k) = self(self-1)…(self-k+1)/k!`.
    pub fn binomial(&self, k: usize) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for i in 0..k {
            let shifted = self - &Self::constant(BigRational::from_integer(i.into()));
            acc = &acc * &shifted;
        }
        acc.scale(&BigRational::new(BigInt::one(), factorial(k)))
    }

    /// Smallest positive integer `s` such that `s·self` has integer coefficients.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Scales to coprime integer monomial coefficients with the same sign as
    /// the input; the zero polynomial is returned unchanged.
    pub fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let cleared = self.scale(&BigRational::from_integer(self.denominator_lcm()));
        let content = cleared
            .coeffs
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()));
        cleared.scale(&BigRational::new(BigInt::one(), content))
    }
}

impl Add for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        RationalPolynomial::new((0..len).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl Add for RationalPolynomial {
    type Output = RationalPolynomial;
    fn add(self, rhs: RationalPolynomial) -> RationalPolynomial {
        &self + &rhs
    }
}

impl Neg for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn neg(self) -> RationalPolynomial {
        RationalPolynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        self + &(-rhs)
    }
}

impl Sub for RationalPolynomial {
    type Output = RationalPolynomial;
    fn sub(self, rhs: RationalPolynomial) -> RationalPolynomial {
        &self - &rhs
    }
}

impl Mul for &RationalPolynomial {
    type Output = RationalPolynomial;
    fn mul(self, rhs: &RationalPolynomial) -> RationalPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return RationalPolynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPolynomial::new(out)
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.is_integer() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

/// Ascending powers in the expression grammar, e.g. `n + 2*n^3 - 1/2*n^4`.
impl fmt::Display for RationalPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if c.is_negative() { " - " } else { " + " })?;
            }
            first = false;
            match j {
                0 => write_rational(f, &magnitude)?,
                _ => {
                    if !magnitude.is_one() {
                        write_rational(f, &magnitude)?;
                        f.write_str("*")?;
                    }
                    f.write_str("n")?;
                    if j > 1 {
                        write!(f, "^{j}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Lossy conversion used only for diagnostics.
pub fn rational_to_f64(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
