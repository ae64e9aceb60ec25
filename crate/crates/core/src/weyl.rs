//! Weyl complexity and Weyl polynomials of a family of integral polynomials.
//!
//! For `P = {p_1, …, p_r}` the matrix `Λ_k(P)` has block rows `b = 1..k`,
//! each holding `p_1, …, p_r`, and column `c` carries `p_i^[b-c+1]` for
//! `c ≤ b` (zero above the diagonal). Its R-span is the span of the
//! monomial coefficient vectors of its columns. The Weyl complexity `W(P)`
//! is the first `k` at which that span grows by exactly `r`, and
//! `WP_k(P) = ξ(ℚ^r × R-span(Λ_{k-1})^⊥)` with `ξ(v) = vᵀ Λ_k e_1`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::linalg::{RationalMatrix, Subspace};
use crate::polynomial::{
    is_essentially_distinct, parse_family, IntegralPolynomial, IntegralityError, ParseError,
    RationalPolynomial,
};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum WeylError {
    #[error("a polynomial family needs at least one polynomial")]
    EmptyFamily,
    #[error("family is not essentially distinct: {0}")]
    NotEssentiallyDistinct(String),
    #[error("Weyl complexity not reached for k <= {k_max}; span dimensions {trace:?}")]
    NotStabilized { k_max: usize, trace: Vec<usize> },
}

/// An ordered family `P = {p_1, …, p_r}` with its structural flags.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<IntegralPolynomial>", into = "Vec<IntegralPolynomial>")]
pub struct PolyFamily {
    polys: Vec<IntegralPolynomial>,
    essentially_distinct: bool,
    zero_constant_term: bool,
}

impl PolyFamily {
    pub fn new(polys: Vec<IntegralPolynomial>) -> Result<Self, WeylError> {
        if polys.is_empty() {
            return Err(WeylError::EmptyFamily);
        }
        let essentially_distinct = is_essentially_distinct(&polys);
        let zero_constant_term = polys.iter().all(|p| p.constant_term().is_zero());
        Ok(Self { polys, essentially_distinct, zero_constant_term })
    }

    pub fn from_int_monomials(polys: &[&[i64]]) -> Result<Self, WeylError> {
        Self::new(polys.iter().map(|c| IntegralPolynomial::from_int_monomials(c)).collect())
    }

    pub fn parse(text: &str) -> Result<Self, FamilyParseError> {
        Ok(Self::new(parse_family(text)?)?)
    }

    pub fn polys(&self) -> &[IntegralPolynomial] {
        &self.polys
    }

    pub fn len(&self) -> usize {
        self.polys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.polys.is_empty()
    }

    pub fn is_essentially_distinct(&self) -> bool {
        self.essentially_distinct
    }

    pub fn has_zero_constant_term(&self) -> bool {
        self.zero_constant_term
    }

    pub fn max_degree(&self) -> usize {
        self.polys.iter().filter_map(|p| p.degree().finite()).max().unwrap_or(0)
    }

    /// `2(r·D + 1)`, the default search bound for the Weyl complexity.
    pub fn default_k_max(&self) -> usize {
        2 * (self.len() * self.max_degree() + 1)
    }

    pub fn require_essentially_distinct(&self) -> Result<(), WeylError> {
        if self.essentially_distinct {
            Ok(())
        } else {
            Err(WeylError::NotEssentiallyDistinct(self.to_string()))
        }
    }

    /// `{p_i ∘ q}`.
    pub fn compose(&self, q: &IntegralPolynomial) -> PolyFamily {
        Self::new(self.polys.iter().map(|p| p.compose(q)).collect()).expect("nonempty")
    }

    /// `{p_1 - p_r, …, p_{r-1} - p_r, -p_r}`.
    pub fn difference_family(&self) -> PolyFamily {
        let last = self.polys.last().expect("nonempty");
        let mut out: Vec<_> = self.polys[..self.len() - 1].iter().map(|p| p - last).collect();
        out.push(-last);
        Self::new(out).expect("nonempty")
    }

    /// `{(p_j(m·n + i) - p_j(i)) / m}`.
    pub fn rescale(&self, m: i64, i: i64) -> Result<PolyFamily, IntegralityError> {
        let polys = self.polys.iter().map(|p| p.rescale(m, i)).collect::<Result<_, _>>()?;
        Ok(Self::new(polys).expect("nonempty"))
    }

    /// Monomial forms of `p_i^[b]` for `b = 1..=k`, indexed `[b-1][i]`.
    fn transforms(&self, k: usize) -> Vec<Vec<RationalPolynomial>> {
        let mut out = Vec::with_capacity(k);
        self.extend_transforms(&mut out, k);
        out
    }

    /// Grows `out` to `k` block rows using `p^[b] = p^[b-1]·(p - b + 1)/b`.
    fn extend_transforms(&self, out: &mut Vec<Vec<RationalPolynomial>>, k: usize) {
        while out.len() < k {
            let b = out.len() + 1;
            let row = match out.last() {
                None => self.polys.iter().map(IntegralPolynomial::to_monomial).collect(),
                Some(prev) => prev
                    .iter()
                    .zip(&self.polys)
                    .map(|(t, p)| {
                        let shift = RationalPolynomial::constant(BigRational::from_integer((b - 1).into()));
                        (t * &(&p.to_monomial() - &shift))
                            .scale(&BigRational::new(1.into(), b.into()))
                    })
                    .collect(),
            };
            out.push(row);
        }
    }
}

impl TryFrom<Vec<IntegralPolynomial>> for PolyFamily {
    type Error = WeylError;
    fn try_from(polys: Vec<IntegralPolynomial>) -> Result<Self, WeylError> {
        Self::new(polys)
    }
}

impl From<PolyFamily> for Vec<IntegralPolynomial> {
    fn from(f: PolyFamily) -> Self {
        f.polys
    }
}

impl fmt::Display for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(ToString::to_string).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

impl fmt::Debug for PolyFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PolyFamily{self}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FamilyParseError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Family(#[from] WeylError),
}

/// The block lower-triangular matrix `Λ_k(P)`.
#[derive(Clone, Debug)]
pub struct LambdaMatrix {
    k: usize,
    r: usize,
    /// `(r·k) × k`, row-major.
    entries: Vec<IntegralPolynomial>,
    coeff_matrix: RationalMatrix,
}

impl LambdaMatrix {
    pub fn new(family: &PolyFamily, k: usize) -> Result<Self, WeylError> {
        family.require_essentially_distinct()?;
        let transforms = family.transforms(k);
        Ok(Self::from_transforms(family, k, &transforms))
    }

    fn from_transforms(
        family: &PolyFamily,
        k: usize,
        transforms: &[Vec<RationalPolynomial>],
    ) -> Self {
        let r = family.len();
        let mut entries = vec![IntegralPolynomial::zero(); r * k * k];
        for b in 1..=k {
            for (i, p) in family.polys().iter().enumerate() {
                for c in 1..=b {
                    entries[((b - 1) * r + i) * k + (c - 1)] = p.binomial_transform(b - c + 1);
                }
            }
        }
        let coeff_matrix = lambda_generators(r, k, transforms).transpose();
        Self { k, r, entries, coeff_matrix }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Entry at row `(b-1)·r + i` (0-based `i`) and column `c-1`.
    pub fn entry(&self, row: usize, col: usize) -> &IntegralPolynomial {
        &self.entries[row * self.k + col]
    }

    pub fn column(&self, col: usize) -> Vec<IntegralPolynomial> {
        (0..self.r * self.k).map(|row| self.entry(row, col).clone()).collect()
    }

    /// Columns are the monomial coefficient vectors `v_{c,j}` of the Λ-columns.
    pub fn coeff_matrix(&self) -> &RationalMatrix {
        &self.coeff_matrix
    }

    /// R-span as a subspace of ℚ^{r·k}.
    pub fn span(&self) -> Subspace {
        Subspace::row_space(&self.coeff_matrix.transpose())
    }

    pub fn span_dim(&self) -> usize {
        self.coeff_matrix.rank()
    }
}

/// Coefficient vectors of all Λ_k columns, one per row (length `r·k`).
fn lambda_generators(r: usize, k: usize, transforms: &[Vec<RationalPolynomial>]) -> RationalMatrix {
    let mut rows = Vec::new();
    for c in 1..=k {
        let max_deg = (c..=k)
            .flat_map(|b| transforms[b - c].iter())
            .filter_map(|p| p.degree().finite())
            .max();
        let Some(max_deg) = max_deg else { continue };
        for j in 0..=max_deg {
            let mut v = vec![BigRational::zero(); r * k];
            for b in c..=k {
                for i in 0..r {
                    v[(b - 1) * r + i] = transforms[b - c][i].coeff(j);
                }
            }
            rows.push(v);
        }
    }
    RationalMatrix::from_rows(r * k, rows).expect("generator length r*k")
}

fn span_from_transforms(r: usize, k: usize, transforms: &[Vec<RationalPolynomial>]) -> Subspace {
    if k == 0 {
        return Subspace::zero(0);
    }
    Subspace::row_space(&lambda_generators(r, k, transforms))
}

pub fn lambda_matrix(family: &PolyFamily, k: usize) -> Result<LambdaMatrix, WeylError> {
    LambdaMatrix::new(family, k)
}

/// Weyl complexity together with `dim R-span(Λ_k)` for `k = 1..=W(P)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Complexity {
    pub complexity: usize,
    pub trace: Vec<usize>,
}

pub fn weyl_complexity(family: &PolyFamily, k_max: usize) -> Result<Complexity, WeylError> {
    family.require_essentially_distinct()?;
    let r = family.len();
    let mut transforms = Vec::new();
    let mut trace = Vec::new();
    let mut prev = 0;
    for k in 1..=k_max {
        family.extend_transforms(&mut transforms, k);
        let dim = span_from_transforms(r, k, &transforms[..k]).dim();
        trace.push(dim);
        if dim == prev + r {
            return Ok(Complexity { complexity: k, trace });
        }
        prev = dim;
    }
    Err(WeylError::NotStabilized { k_max, trace })
}

/// `ξ(v) = Σ_{b,i} v_{(b-1)r+i} · p_i^[b]` for `v ∈ ℚ^{r·k}`.
pub fn xi(family: &PolyFamily, v: &[BigRational]) -> RationalPolynomial {
    let r = family.len();
    assert_eq!(v.len() % r, 0, "xi: vector length must be a multiple of r");
    let transforms = family.transforms(v.len() / r);
    xi_with(r, &transforms, v)
}

fn xi_with(r: usize, transforms: &[Vec<RationalPolynomial>], v: &[BigRational]) -> RationalPolynomial {
    let mut acc = RationalPolynomial::zero();
    for (idx, coeff) in v.iter().enumerate() {
        if coeff.is_zero() {
            continue;
        }
        acc = &acc + &transforms[idx / r][idx % r].scale(coeff);
    }
    acc
}

/// Domain `ℚ^r × R-span(Λ_{k-1})^⊥` of ξ, as a subspace of ℚ^{r·k}.
pub fn xi_domain(family: &PolyFamily, k: usize) -> Result<Subspace, WeylError> {
    family.require_essentially_distinct()?;
    let r = family.len();
    let transforms = family.transforms(k.saturating_sub(1));
    Ok(xi_domain_with(r, k, &transforms))
}

fn xi_domain_with(r: usize, k: usize, transforms: &[Vec<RationalPolynomial>]) -> Subspace {
    if k == 0 {
        return Subspace::zero(0);
    }
    let orth = span_from_transforms(r, k - 1, &transforms[..k - 1]).orthocomplement();
    let head = Subspace::full(r).extend_ambient(r * k);
    head.sum(&orth.shift_ambient(r)).expect("both in r*k")
}

/// `R-span(Λ_k) ∩ (ℚ^r × R-span(Λ_{k-1})^⊥)`, on which ξ is injective.
pub fn frequency_space(family: &PolyFamily, k: usize) -> Result<Subspace, WeylError> {
    let span = LambdaMatrix::new(family, k)?.span();
    Ok(span.intersection(&xi_domain(family, k)?).expect("both in r*k"))
}

/// A finite-dimensional space of polynomials, stored over monomial
/// coordinates `1, n, …, n^D` with trailing all-zero coordinates trimmed,
/// so that `==` is equality of spaces.
#[derive(Clone, Debug)]
pub struct WeylSpace {
    rational_basis: Subspace,
    integral_basis: Vec<IntegralPolynomial>,
    family: Option<PolyFamily>,
    k: usize,
}

impl PartialEq for WeylSpace {
    fn eq(&self, other: &Self) -> bool {
        self.rational_basis == other.rational_basis
    }
}

impl Eq for WeylSpace {}

impl WeylSpace {
    /// Span of arbitrary rational polynomials.
    pub fn span_of(polys: &[RationalPolynomial]) -> Self {
        Self::build(polys, None, 0)
    }

    pub fn span_of_integral(polys: &[IntegralPolynomial]) -> Self {
        let mono: Vec<_> = polys.iter().map(IntegralPolynomial::to_monomial).collect();
        Self::span_of(&mono)
    }

    fn build(polys: &[RationalPolynomial], family: Option<PolyFamily>, k: usize) -> Self {
        let width = polys.iter().map(|p| p.coeffs().len()).max().unwrap_or(0);
        let generators = polys
            .iter()
            .map(|p| (0..width).map(|j| p.coeff(j)).collect())
            .collect();
        let rational_basis =
            trim(Subspace::from_generators(width, generators).expect("padded to width"));
        let integral_basis = rational_basis
            .basis_vectors()
            .into_iter()
            .map(|v| {
                let prim = RationalPolynomial::new(v).primitive_part();
                IntegralPolynomial::from_monomial(&prim).expect("integer coefficients")
            })
            .collect();
        Self { rational_basis, integral_basis, family, k }
    }

    /// Highest monomial degree present, or `None` for the zero space.
    pub fn ambient_degree(&self) -> Option<usize> {
        self.rational_basis.ambient_dim().checked_sub(1)
    }

    pub fn dim(&self) -> usize {
        self.rational_basis.dim()
    }

    /// Canonical RREF over monomial coordinates, lowest degree first.
    pub fn rational_basis(&self) -> &Subspace {
        &self.rational_basis
    }

    /// Basis polynomials as rational polynomials (RREF rows).
    pub fn rational_polys(&self) -> Vec<RationalPolynomial> {
        self.rational_basis.basis_vectors().into_iter().map(RationalPolynomial::new).collect()
    }

    /// Each RREF row scaled to coprime integer monomial coefficients.
    pub fn integral_basis(&self) -> &[IntegralPolynomial] {
        &self.integral_basis
    }

    /// `(P, k)` this space was computed from, if any.
    pub fn provenance(&self) -> Option<(&PolyFamily, usize)> {
        self.family.as_ref().map(|f| (f, self.k))
    }

    pub fn contains_rational(&self, h: &RationalPolynomial) -> bool {
        let width = self.rational_basis.ambient_dim();
        if h.coeffs().len() > width {
            return false;
        }
        let v: Vec<_> = (0..width).map(|j| h.coeff(j)).collect();
        self.rational_basis.contains(&v).expect("padded to width")
    }

    pub fn contains_poly(&self, h: &IntegralPolynomial) -> bool {
        self.contains_rational(&h.to_monomial())
    }

    /// `other ⊆ self`.
    pub fn includes(&self, other: &WeylSpace) -> bool {
        other.rational_polys().iter().all(|p| self.contains_rational(p))
    }

    /// First integral basis element of `self` outside `other`.
    pub fn witness_outside(&self, other: &WeylSpace) -> Option<IntegralPolynomial> {
        self.integral_basis.iter().find(|q| !other.contains_poly(q)).cloned()
    }

    /// `{h ∘ q : h ∈ self}`.
    pub fn compose(&self, q: &IntegralPolynomial) -> WeylSpace {
        let composed: Vec<_> = self.integral_basis.iter().map(|h| h.compose(q)).collect();
        Self::span_of_integral(&composed)
    }

    /// Canonical text: integral basis in pivot order, e.g. `{n, n^2, 2*n^3 - n^4}`.
    pub fn canonical_text(&self) -> String {
        let parts: Vec<String> = self.integral_basis.iter().map(ToString::to_string).collect();
        format!("{{{}}}", parts.join(", "))
    }
}

impl fmt::Display for WeylSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_text())
    }
}

fn trim(s: Subspace) -> Subspace {
    let width = s
        .basis_vectors()
        .iter()
        .filter_map(|v| v.iter().rposition(|x| !x.is_zero()))
        .max()
        .map_or(0, |j| j + 1);
    if width == s.ambient_dim() {
        return s;
    }
    let rows = s.basis_vectors().into_iter().map(|v| v[..width].to_vec()).collect();
    Subspace::from_generators(width, rows).expect("truncated rows")
}

/// `WP_k(P)`; `WP_0(P) = {0}` and `WP_1(P) = span(P)`.
pub fn weyl_space(family: &PolyFamily, k: usize) -> Result<WeylSpace, WeylError> {
    family.require_essentially_distinct()?;
    if k == 0 {
        return Ok(WeylSpace::build(&[], Some(family.clone()), 0));
    }
    let r = family.len();
    let transforms = family.transforms(k);
    let domain = xi_domain_with(r, k, &transforms);
    let images: Vec<_> = domain
        .basis_vectors()
        .iter()
        .map(|v| xi_with(r, &transforms, v))
        .collect();
    Ok(WeylSpace::build(&images, Some(family.clone()), k))
}

/// `WP(P) = WP_{W(P)}(P)`, of dimension `r`.
pub fn weyl_polynomials(family: &PolyFamily, k_max: usize) -> Result<WeylSpace, WeylError> {
    let w = weyl_complexity(family, k_max)?;
    let space = weyl_space(family, w.complexity)?;
    assert_eq!(space.dim(), family.len(), "dim WP(P) must equal |P|");
    Ok(space)
}

/// Some `v ∈ ℚ^r × R-span(Λ_{k-1})^⊥` with `ξ(v) = h`, if `h ∈ WP_k(P)`.
pub fn xi_preimage(
    family: &PolyFamily,
    k: usize,
    h: &RationalPolynomial,
) -> Result<Option<Vec<BigRational>>, WeylError> {
    family.require_essentially_distinct()?;
    let r = family.len();
    let transforms = family.transforms(k);
    let domain = xi_domain_with(r, k, &transforms).basis_vectors();
    let images: Vec<_> = domain.iter().map(|v| xi_with(r, &transforms, v)).collect();
    let width = images
        .iter()
        .map(|p| p.coeffs().len())
        .chain([h.coeffs().len()])
        .max()
        .unwrap_or(0);
    // columns: images then h; solve Σ c_i image_i = h
    let rows = (0..width)
        .map(|j| images.iter().map(|p| p.coeff(j)).chain([h.coeff(j)]).collect())
        .collect();
    let m = images.len();
    let rref = RationalMatrix::from_rows(m + 1, rows).expect("uniform width").rref();
    if rref.pivots.last() == Some(&m) {
        return Ok(None);
    }
    let mut v = vec![BigRational::zero(); r * k];
    for (row, &col) in rref.pivots.iter().enumerate() {
        let c = &rref.matrix[(row, m)];
        for (x, d) in v.iter_mut().zip(&domain[col]) {
            *x += c * d;
        }
    }
    Ok(Some(v))
}

/// How two recurrence schemes relate in Weyl systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SchemeRelation {
    /// `WP(P) = WP(Q)`.
    Equivalent,
    /// `WP(P) ⊊ WP(Q)`: every set of Q-recurrence is a set of P-recurrence.
    QrecImpliesPrec,
    /// `WP(Q) ⊊ WP(P)`: every set of P-recurrence is a set of Q-recurrence.
    PrecImpliesQrec,
    /// Neither space contains the other.
    GeneralPosition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SchemeComparison {
    pub relation: SchemeRelation,
    /// Element of `WP(P) \ WP(Q)`.
    pub in_p_not_q: Option<IntegralPolynomial>,
    /// Element of `WP(Q) \ WP(P)`.
    pub in_q_not_p: Option<IntegralPolynomial>,
}

pub fn scheme_compare(
    p: &PolyFamily,
    q: &PolyFamily,
    k_max: Option<usize>,
) -> Result<SchemeComparison, WeylError> {
    p.require_essentially_distinct()?;
    q.require_essentially_distinct()?;
    let wp = weyl_polynomials(p, k_max.unwrap_or_else(|| p.default_k_max()))?;
    let wq = weyl_polynomials(q, k_max.unwrap_or_else(|| q.default_k_max()))?;
    let in_p_not_q = wp.witness_outside(&wq);
    let in_q_not_p = wq.witness_outside(&wp);
    let relation = match (&in_p_not_q, &in_q_not_p) {
        (None, None) => SchemeRelation::Equivalent,
        (None, Some(_)) => SchemeRelation::QrecImpliesPrec,
        (Some(_), None) => SchemeRelation::PrecImpliesQrec,
        (Some(_), Some(_)) => SchemeRelation::GeneralPosition,
    };
    Ok(SchemeComparison { relation, in_p_not_q, in_q_not_p })
}

/// Integer vector `v` with `ξ(v) = L·h` for the least positive `L`, if `h ∈ WP_k(P)`.
pub fn integral_preimage(
    family: &PolyFamily,
    k: usize,
    h: &RationalPolynomial,
) -> Result<Option<(Vec<BigInt>, BigInt)>, WeylError> {
    let Some(v) = xi_preimage(family, k, h)? else {
        return Ok(None);
    };
    let scale = RationalPolynomial::new(v.clone()).denominator_lcm();
    let ints = v
        .iter()
        .map(|x| (x * BigRational::from_integer(scale.clone())).to_integer())
        .collect();
    Ok(Some((ints, scale)))
}
