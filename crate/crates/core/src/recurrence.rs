//! Candidate recurrence sets and witness searches.
//!
//! Two probes look for `n ∈ R` up to the set's horizon:
//! - Kronecker: `‖q_i(n)·β_j‖ < ε` for every basis polynomial `q_i` and rotation `β_j`.
//! - Topological: some `x` in the `ε`-ball at `0` has `T^{p_k(n)}x` in the ball for every `k`.
//!
//! Both are horizon-bounded searches. A missing witness says nothing about
//! larger `n` unless the report carries an analytic certificate.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dynamics::{
    dist_to_integer, frac_mul, orbit, parse_realization, unit_to_f64, RealizationError, Rotation,
    StandardWeylSystem,
};
use crate::polynomial::{binomial, IntegralPolynomial};
use crate::weyl::{weyl_space, PolyFamily, WeylError};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum RecurrenceError {
    #[error(transparent)]
    Realization(#[from] RealizationError),
    #[error(transparent)]
    Weyl(#[from] WeylError),
    #[error("epsilon must be positive")]
    NonPositiveEpsilon,
    #[error("probe needs a nonempty polynomial basis")]
    EmptyBasis,
    #[error("probe needs at least one rotation")]
    NoRotations,
}

/// Serializes exact rationals as `"p/q"` text.
pub mod rational_text {
    use num_rational::BigRational;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&x.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        let text = String::deserialize(d)?;
        super::parse_realization(&text, 0).map_err(serde::de::Error::custom)
    }
}

/// Membership test on the fractional part `frac(q(n)·α)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    /// `lo ≤ frac ≤ hi`.
    Interval {
        #[serde(with = "rational_text")]
        lo: BigRational,
        #[serde(with = "rational_text")]
        hi: BigRational,
    },
    /// `‖·‖ > t`.
    DistanceAbove {
        #[serde(with = "rational_text")]
        t: BigRational,
    },
}

impl Condition {
    fn holds(&self, frac: &BigRational) -> bool {
        match self {
            Condition::Interval { lo, hi } => lo <= frac && frac <= hi,
            Condition::DistanceAbove { t } => dist_to_integer(frac) > *t,
        }
    }

    /// `b` with `‖·‖ ≥ b` on every member, and whether the inequality is strict.
    fn distance_floor(&self) -> Option<(BigRational, bool)> {
        match self {
            Condition::DistanceAbove { t } => Some((t.clone(), true)),
            Condition::Interval { lo, hi } => {
                let one = BigRational::one();
                (*lo > BigRational::zero() && *hi < one).then(|| {
                    let upper = &one - hi;
                    (if *lo < upper { lo.clone() } else { upper }, false)
                })
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetKind {
    /// `{n : frac(q(n)·α) satisfies condition}`.
    Threshold { q: IntegralPolynomial, rotation: Rotation, condition: Condition },
    ExplicitList { values: Vec<i64> },
    FullRange,
}

/// A candidate recurrence set restricted to `1 ≤ n ≤ horizon`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecurrenceSetSpec {
    pub kind: SetKind,
    pub horizon: u64,
}

impl RecurrenceSetSpec {
    pub fn full_range(horizon: u64) -> Self {
        Self { kind: SetKind::FullRange, horizon }
    }

    pub fn explicit(values: Vec<i64>, horizon: u64) -> Self {
        Self { kind: SetKind::ExplicitList { values }, horizon }
    }

    /// `{n ≤ horizon : ‖q(n)·α‖ > t}`.
    pub fn distance_above(q: IntegralPolynomial, rotation: Rotation, t: BigRational, horizon: u64) -> Self {
        Self {
            kind: SetKind::Threshold { q, rotation, condition: Condition::DistanceAbove { t } },
            horizon,
        }
    }
}

/// Sorted members of the set.
pub fn generate_set(spec: &RecurrenceSetSpec) -> Result<Vec<i64>, RealizationError> {
    let horizon = spec.horizon as i64;
    match &spec.kind {
        SetKind::FullRange => Ok((1..=horizon).collect()),
        SetKind::ExplicitList { values } => {
            let mut out: Vec<i64> = values.iter().copied().filter(|&n| n >= 1 && n <= horizon).collect();
            out.sort_unstable();
            out.dedup();
            Ok(out)
        }
        SetKind::Threshold { q, rotation, condition } => {
            let alpha = rotation.value()?;
            Ok((1..=horizon)
                .filter(|&n| condition.holds(&frac_mul(&q.eval_i64(n), alpha)))
                .collect())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProbeConfig {
    #[serde(with = "rational_text")]
    pub epsilon: BigRational,
    /// Stop after this many witnesses.
    pub max_witnesses: usize,
    /// Number of disjoint ranges scanned in parallel.
    pub shards: usize,
}

impl ProbeConfig {
    pub fn new(epsilon: BigRational) -> Self {
        Self { epsilon, max_witnesses: 1, shards: 1 }
    }

    pub fn all_witnesses(mut self) -> Self {
        self.max_witnesses = usize::MAX;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    WitnessFound,
    NoWitnessUpToHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    Kronecker,
    Topological,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub n: i64,
    pub residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchParams {
    pub probe: ProbeKind,
    pub set_size: usize,
    pub scanned: usize,
    pub shards: usize,
    pub polynomials: Vec<String>,
    pub rotations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub verdict: Verdict,
    pub epsilon: String,
    pub horizon: u64,
    pub witnesses: Vec<Witness>,
    pub near_miss: Option<Witness>,
    pub search_params: SearchParams,
    /// Reason no member of the set can ever be a witness, when one is known.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic_certificate: Option<String>,
}

impl ProbeReport {
    pub fn witness_ns(&self) -> Vec<i64> {
        self.witnesses.iter().map(|w| w.n).collect()
    }

    pub fn epsilon_value(&self) -> Result<BigRational, RealizationError> {
        parse_realization(&self.epsilon, 0)
    }
}

#[derive(Clone)]
struct Candidate {
    n: i64,
    /// Max residual, exact.
    score: BigRational,
    residuals: Vec<BigRational>,
    base_point: Option<Vec<BigRational>>,
    witness: bool,
}

impl Candidate {
    fn to_witness(&self) -> Witness {
        Witness {
            n: self.n,
            residuals: self.residuals.iter().map(unit_to_f64).collect(),
            base_point: self
                .base_point
                .as_ref()
                .map(|x| x.iter().map(ToString::to_string).collect()),
        }
    }
}

struct ScanResult {
    witnesses: Vec<Candidate>,
    best: Option<Candidate>,
    scanned: usize,
}

fn better(a: &Candidate, b: &Candidate) -> bool {
    match a.score.cmp(&b.score) {
        Ordering::Less => true,
        Ordering::Equal => a.n < b.n,
        Ordering::Greater => false,
    }
}

fn scan_range<F>(ns: &[i64], limit: usize, eval: &F) -> ScanResult
where
    F: Fn(i64) -> Candidate + Sync,
{
    let mut out = ScanResult { witnesses: Vec::new(), best: None, scanned: 0 };
    for &n in ns {
        if out.witnesses.len() >= limit {
            break;
        }
        let c = eval(n);
        out.scanned += 1;
        if out.best.as_ref().map_or(true, |b| better(&c, b)) {
            out.best = Some(c.clone());
        }
        if c.witness {
            out.witnesses.push(c);
        }
    }
    out
}

/// Scans in disjoint shards; the merged witnesses are the globally smallest `n`.
fn scan<F>(ns: &[i64], limit: usize, shards: usize, eval: F) -> ScanResult
where
    F: Fn(i64) -> Candidate + Sync,
{
    let shards = shards.clamp(1, ns.len().max(1));
    if shards == 1 {
        return scan_range(ns, limit, &eval);
    }
    let chunk = ns.len().div_ceil(shards);
    let parts: Vec<ScanResult> = std::thread::scope(|s| {
        let handles: Vec<_> = ns
            .chunks(chunk)
            .map(|part| {
                let eval = &eval;
                s.spawn(move || scan_range(part, limit, eval))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan thread panicked")).collect()
    });
    let mut merged = ScanResult { witnesses: Vec::new(), best: None, scanned: 0 };
    for part in parts {
        merged.scanned += part.scanned;
        merged.witnesses.extend(part.witnesses);
        if let Some(b) = part.best {
            if merged.best.as_ref().map_or(true, |m| better(&b, m)) {
                merged.best = Some(b);
            }
        }
    }
    merged.witnesses.sort_by_key(|c| c.n);
    merged.witnesses.truncate(limit);
    merged
}

fn finish(
    result: ScanResult,
    config: &ProbeConfig,
    horizon: u64,
    search_params: SearchParams,
    analytic_certificate: Option<String>,
) -> ProbeReport {
    let verdict = if result.witnesses.is_empty() {
        Verdict::NoWitnessUpToHorizon
    } else {
        Verdict::WitnessFound
    };
    ProbeReport {
        verdict,
        epsilon: config.epsilon.to_string(),
        horizon,
        witnesses: result.witnesses.iter().map(Candidate::to_witness).collect(),
        near_miss: result.best.as_ref().map(Candidate::to_witness),
        search_params: SearchParams { scanned: result.scanned, ..search_params },
        analytic_certificate,
    }
}

fn rotation_label(r: &Rotation) -> String {
    match &r.realization {
        Some(v) => format!("{}={:.12}", r.symbol, crate::dynamics::rational_to_f64(v)),
        None => r.symbol.clone(),
    }
}

/// Residuals `‖q_i(n)·β_j‖`, basis-major.
fn kronecker_residuals(basis: &[IntegralPolynomial], betas: &[&BigRational], n: i64) -> Vec<BigRational> {
    let n = BigInt::from(n);
    basis
        .iter()
        .flat_map(|q| {
            let m = q.eval(&n);
            betas.iter().map(move |b| dist_to_integer(&frac_mul(&m, b)))
        })
        .collect()
}

fn max_of(values: &[BigRational]) -> BigRational {
    values.iter().max().cloned().unwrap_or_else(BigRational::zero)
}

fn kronecker_certificate(
    spec: &RecurrenceSetSpec,
    basis: &[IntegralPolynomial],
    betas: &[Rotation],
    epsilon: &BigRational,
) -> Option<String> {
    let SetKind::Threshold { q, rotation, condition } = &spec.kind else {
        return None;
    };
    let neg = -q;
    let in_basis = basis.iter().any(|b| b == q || *b == neg);
    let same_rotation = betas.iter().any(|b| b.realization.is_some() && b.realization == rotation.realization);
    let (floor, strict) = condition.distance_floor()?;
    if !(in_basis && same_rotation && *epsilon <= floor) {
        return None;
    }
    let rel = if strict { ">" } else { ">=" };
    Some(format!(
        "every member n has ||({q})*{}|| {rel} {floor} >= epsilon, and {q} is a basis polynomial",
        rotation.symbol
    ))
}

/// First `n` in the set with every `‖q_i(n)·β_j‖ < ε`.
pub fn probe_kronecker(
    set: &RecurrenceSetSpec,
    basis: &[IntegralPolynomial],
    betas: &[Rotation],
    config: &ProbeConfig,
) -> Result<ProbeReport, RecurrenceError> {
    if config.epsilon <= BigRational::zero() {
        return Err(RecurrenceError::NonPositiveEpsilon);
    }
    if basis.is_empty() {
        return Err(RecurrenceError::EmptyBasis);
    }
    if betas.is_empty() {
        return Err(RecurrenceError::NoRotations);
    }
    let values: Vec<&BigRational> = betas.iter().map(Rotation::value).collect::<Result<_, _>>()?;
    let ns = generate_set(set)?;
    let eps = &config.epsilon;
    let result = scan(&ns, config.max_witnesses, config.shards, |n| {
        let residuals = kronecker_residuals(basis, &values, n);
        let score = max_of(&residuals);
        let witness = score < *eps;
        Candidate { n, score, residuals, base_point: None, witness }
    });
    let params = SearchParams {
        probe: ProbeKind::Kronecker,
        set_size: ns.len(),
        scanned: 0,
        shards: config.shards,
        polynomials: basis.iter().map(ToString::to_string).collect(),
        rotations: betas.iter().map(rotation_label).collect(),
        base_points: None,
        grid: None,
    };
    let certificate = kronecker_certificate(set, basis, betas, eps);
    Ok(finish(result, config, set.horizon, params, certificate))
}

/// Recomputes every witness residual exactly; true when all are below `ε`
/// and match the reported values bit for bit.
pub fn validate_kronecker(
    report: &ProbeReport,
    basis: &[IntegralPolynomial],
    betas: &[Rotation],
) -> Result<bool, RecurrenceError> {
    let eps = report.epsilon_value()?;
    let values: Vec<&BigRational> = betas.iter().map(Rotation::value).collect::<Result<_, _>>()?;
    Ok(report.witnesses.iter().all(|w| {
        let residuals = kronecker_residuals(basis, &values, w.n);
        max_of(&residuals) < eps && residuals.iter().map(unit_to_f64).collect::<Vec<_>>() == w.residuals
    }))
}

/// Number of grid base points tried after `x = 0`.
pub const GRID_POINTS: usize = 1000;
const GRID_BITS: u32 = 32;

fn first_primes(count: usize) -> Vec<u64> {
    let mut primes: Vec<u64> = Vec::with_capacity(count);
    let mut c = 2;
    while primes.len() < count {
        if primes.iter().all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let (mut inv, mut f) = (0.0, 1.0 / base as f64);
    while i > 0 {
        inv += (i % base) as f64 * f;
        i /= base;
        f /= base as f64;
    }
    inv
}

/// Halton points in the `ε`-ball at 0, coordinates `X / 2^32` with integer `X`.
fn halton_ball(dim: usize, epsilon: &BigRational) -> Vec<Vec<i64>> {
    let radius = epsilon.min(&BigRational::new(1.into(), 2.into())).clone();
    let scale = BigRational::from_integer(BigInt::one() << GRID_BITS);
    let limit = (&radius * &scale).to_integer().to_i64().expect("radius at most 1/2");
    let bases = first_primes(dim);
    (1..=GRID_POINTS as u64)
        .map(|i| {
            bases
                .iter()
                .map(|&b| {
                    let x = ((2.0 * radical_inverse(i, b) - 1.0) * limit as f64).trunc() as i64;
                    x.clamp(-(limit - 1), limit - 1)
                })
                .collect()
        })
        .collect()
}

/// Per-factor data for one iterate `T^m`.
struct IterateData {
    /// `C(m, j) mod 2^32` for `j = 1..d-1`.
    binoms: Vec<u64>,
    /// `frac(C(m, i)·α)` exact and as 64-bit fixed point, `i = 1..d`.
    alpha_part: Vec<(BigRational, u64)>,
}

fn iterate_data(m: &BigInt, step: usize, alpha: &BigRational) -> IterateData {
    let modulus = BigInt::one() << GRID_BITS;
    let binoms = (1..step)
        .map(|j| binomial(m, j).mod_floor(&modulus).to_u64().expect("reduced"))
        .collect();
    let alpha_part = (1..=step)
        .map(|i| {
            let f = frac_mul(&binomial(m, i), alpha);
            let fixed = ((f.numer() << 64u32) / f.denom()).to_u64().expect("below 2^64");
            (f, fixed)
        })
        .collect();
    IterateData { binoms, alpha_part }
}

fn fixed_dist(v: u64) -> u64 {
    v.min(v.wrapping_neg())
}

/// Topological probe on the `ε`-ball at 0 in a product of standard systems.
pub fn probe_topological(
    set: &RecurrenceSetSpec,
    sys: &StandardWeylSystem,
    family: &PolyFamily,
    config: &ProbeConfig,
) -> Result<ProbeReport, RecurrenceError> {
    if config.epsilon <= BigRational::zero() {
        return Err(RecurrenceError::NonPositiveEpsilon);
    }
    let alphas: Vec<&BigRational> = sys
        .factors()
        .iter()
        .map(|f| f.rotation.value())
        .collect::<Result<_, _>>()?;
    let ns = generate_set(set)?;
    let eps = &config.epsilon;
    let grid = halton_ball(sys.dim(), eps);
    let eps_fixed = if *eps >= BigRational::new(1.into(), 2.into()) {
        u64::MAX
    } else {
        ((eps.numer() << 64u32) / eps.denom()).to_u64().expect("below 2^63")
    };
    let result = scan(&ns, config.max_witnesses, config.shards, |n| {
        let nb = BigInt::from(n);
        let iterates: Vec<Vec<IterateData>> = family
            .polys()
            .iter()
            .map(|p| {
                let m = p.eval(&nb);
                sys.factors()
                    .iter()
                    .zip(&alphas)
                    .map(|(f, a)| iterate_data(&m, f.step, a))
                    .collect()
            })
            .collect();
        // x = 0: the orbit is exactly frac(C(m, i)·α)
        let residuals: Vec<BigRational> = iterates
            .iter()
            .map(|per_factor| {
                per_factor
                    .iter()
                    .flat_map(|d| d.alpha_part.iter().map(|(f, _)| dist_to_integer(f)))
                    .max()
                    .unwrap_or_else(BigRational::zero)
            })
            .collect();
        let score = max_of(&residuals);
        if score < *eps {
            return Candidate { n, score, residuals, base_point: Some(vec![BigRational::zero(); sys.dim()]), witness: true };
        }
        // margin covers the 2^-64 truncation of the fixed-point screen
        let screen = eps_fixed.saturating_sub(4);
        for point in &grid {
            let passes = iterates.iter().all(|per_factor| {
                let mut offset = 0;
                per_factor.iter().zip(sys.factors()).all(|(data, factor)| {
                    let x = &point[offset..offset + factor.step];
                    offset += factor.step;
                    (0..factor.step).all(|i| {
                        let mut dyadic = x[i] as u64;
                        for j in 1..=i {
                            dyadic = dyadic.wrapping_add(data.binoms[j - 1].wrapping_mul(x[i - j] as u64));
                        }
                        let value = (dyadic << 32).wrapping_add(data.alpha_part[i].1);
                        fixed_dist(value) < screen
                    })
                })
            });
            if !passes {
                continue;
            }
            let x: Vec<BigRational> = point
                .iter()
                .map(|&xi| BigRational::new(xi.into(), BigInt::one() << GRID_BITS))
                .collect();
            if let Some(residuals) = topological_residuals(sys, family, &x, n) {
                let score = max_of(&residuals);
                if score < *eps {
                    return Candidate { n, score, residuals, base_point: Some(x), witness: true };
                }
            }
        }
        Candidate { n, score, residuals, base_point: Some(vec![BigRational::zero(); sys.dim()]), witness: false }
    });
    let params = SearchParams {
        probe: ProbeKind::Topological,
        set_size: ns.len(),
        scanned: 0,
        shards: config.shards,
        polynomials: family.polys().iter().map(ToString::to_string).collect(),
        rotations: sys.factors().iter().map(|f| rotation_label(&f.rotation)).collect(),
        base_points: Some(1 + grid.len()),
        grid: Some(format!("x=0, then {} Halton points in the ball, resolution 2^-{GRID_BITS}", grid.len())),
    };
    Ok(finish(result, config, set.horizon, params, None))
}

/// Per-polynomial residuals `max_i ‖(T^{p_k(n)}x)_i‖`, computed exactly, or
/// `None` if a rotation lacks a realization.
fn topological_residuals(
    sys: &StandardWeylSystem,
    family: &PolyFamily,
    x: &[BigRational],
    n: i64,
) -> Option<Vec<BigRational>> {
    let nb = BigInt::from(n);
    family
        .polys()
        .iter()
        .map(|p| {
            let m = p.eval(&nb);
            let mut offset = 0;
            let mut worst = BigRational::zero();
            for f in sys.factors() {
                let y = orbit(f.step, &f.rotation, &x[offset..offset + f.step], &m).ok()?;
                offset += f.step;
                for yi in &y {
                    worst = worst.max(dist_to_integer(yi));
                }
            }
            Some(worst)
        })
        .collect()
}

/// Recomputes every topological witness from its base point.
pub fn validate_topological(
    report: &ProbeReport,
    sys: &StandardWeylSystem,
    family: &PolyFamily,
) -> Result<bool, RecurrenceError> {
    let eps = report.epsilon_value()?;
    for w in &report.witnesses {
        let Some(point) = &w.base_point else { return Ok(false) };
        let x: Vec<BigRational> = point
            .iter()
            .map(|s| parse_realization(s, 0))
            .collect::<Result<_, _>>()?;
        if x.iter().any(|xi| dist_to_integer(xi) >= eps) {
            return Ok(false);
        }
        let Some(residuals) = topological_residuals(sys, family, &x, w.n) else {
            return Ok(false);
        };
        if max_of(&residuals) >= eps || residuals.iter().map(unit_to_f64).collect::<Vec<_>>() != w.residuals {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub n: i64,
    pub kronecker_residuals: Vec<f64>,
    pub found_by: ProbeKind,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossCheckReport {
    pub basis: Vec<String>,
    pub kronecker: ProbeReport,
    pub topological: ProbeReport,
    pub overlap: Vec<i64>,
    /// `max over topological witnesses of max_{i,j} ‖q_i(n)β_j‖ / ε`.
    pub observed_factor: Option<f64>,
    /// Witnesses found by only one probe, for manual review.
    pub discrepancies: Vec<Discrepancy>,
}

/// Runs both probes with the Kronecker basis `WP_d(P)`, `d` the largest step.
pub fn cross_check(
    set: &RecurrenceSetSpec,
    family: &PolyFamily,
    sys: &StandardWeylSystem,
    config: &ProbeConfig,
) -> Result<CrossCheckReport, RecurrenceError> {
    let config = config.clone().all_witnesses();
    let space = weyl_space(family, sys.max_step())?;
    let basis = space.integral_basis().to_vec();
    let betas: Vec<Rotation> = sys.factors().iter().map(|f| f.rotation.clone()).collect();
    let kronecker = probe_kronecker(set, &basis, &betas, &config)?;
    let topological = probe_topological(set, sys, family, &config)?;
    let values: Vec<&BigRational> = betas.iter().map(Rotation::value).collect::<Result<_, _>>()?;
    let k_ns = kronecker.witness_ns();
    let t_ns = topological.witness_ns();
    let overlap: Vec<i64> = k_ns.iter().copied().filter(|n| t_ns.binary_search(n).is_ok()).collect();
    let eps = &config.epsilon;
    let observed_factor = t_ns
        .iter()
        .map(|&n| max_of(&kronecker_residuals(&basis, &values, n)) / eps)
        .max()
        .map(|r| crate::dynamics::rational_to_f64(&r));
    let mut discrepancies = Vec::new();
    for (ns, other, found_by) in [
        (&k_ns, &t_ns, ProbeKind::Kronecker),
        (&t_ns, &k_ns, ProbeKind::Topological),
    ] {
        for &n in ns.iter().filter(|n| other.binary_search(n).is_err()) {
            let residuals = kronecker_residuals(&basis, &values, n);
            discrepancies.push(Discrepancy {
                n,
                kronecker_residuals: residuals.iter().map(unit_to_f64).collect(),
                found_by,
            });
        }
    }
    discrepancies.sort_by_key(|d| d.n);
    Ok(CrossCheckReport {
        basis: basis.iter().map(ToString::to_string).collect(),
        kronecker,
        topological,
        overlap,
        observed_factor,
        discrepancies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::Factor;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn poly(s: &str) -> IntegralPolynomial {
        s.parse().unwrap()
    }

    #[test]
    fn simple_sets() {
        assert_eq!(generate_set(&RecurrenceSetSpec::full_range(10)).unwrap(), (1..=10).collect::<Vec<_>>());
        assert_eq!(generate_set(&RecurrenceSetSpec::explicit(vec![7, 5, 7, 20], 10)).unwrap(), vec![5, 7]);
    }

    #[test]
    fn threshold_set_membership_recomputes() {
        let a = Rotation::sqrt2("a");
        let spec = RecurrenceSetSpec::distance_above(poly("n^3"), a, q(1, 4), 100);
        let set = generate_set(&spec).unwrap();
        for n in 1..=100i64 {
            let x = (n as f64).powi(3) * 2f64.sqrt();
            let d = (x - x.round()).abs();
            if (d - 0.25).abs() > 1e-6 {
                assert_eq!(set.contains(&n), d > 0.25, "n = {n}");
            }
        }
        let interval = RecurrenceSetSpec {
            kind: SetKind::Threshold {
                q: poly("n"),
                rotation: Rotation::realized("b", q(1, 5)),
                condition: Condition::Interval { lo: q(1, 5), hi: q(2, 5) },
            },
            horizon: 10,
        };
        assert_eq!(generate_set(&interval).unwrap(), vec![1, 2, 6, 7]);
    }

    #[test]
    fn kronecker_threshold_set_has_certificate() {
        let a = Rotation::sqrt2("a");
        let spec = RecurrenceSetSpec::distance_above(poly("n^3"), a.clone(), q(1, 4), 2000);
        let basis = vec![poly("n"), poly("n^2"), poly("n^3")];
        let report = probe_kronecker(&spec, &basis, &[a], &ProbeConfig::new(q(1, 10))).unwrap();
        assert_eq!(report.verdict, Verdict::NoWitnessUpToHorizon);
        assert!(report.analytic_certificate.is_some());
        assert!(report.near_miss.is_some());
    }

    #[test]
    fn kronecker_full_range_finds_witness_and_validates() {
        let a = Rotation::sqrt2("a");
        let basis = vec![poly("n"), poly("n^2")];
        let spec = RecurrenceSetSpec::full_range(1000);
        let report = probe_kronecker(&spec, &basis, &[a.clone()], &ProbeConfig::new(q(1, 4))).unwrap();
        assert_eq!(report.verdict, Verdict::WitnessFound);
        assert!(report.analytic_certificate.is_none());
        assert!(validate_kronecker(&report, &basis, &[a.clone()]).unwrap());
        let mut config = ProbeConfig::new(q(1, 4)).all_witnesses();
        let sequential = probe_kronecker(&spec, &basis, &[a.clone()], &config).unwrap();
        config.shards = 4;
        let sharded = probe_kronecker(&spec, &basis, &[a], &config).unwrap();
        assert_eq!(sequential.witnesses, sharded.witnesses);
        assert_eq!(sequential.near_miss, sharded.near_miss);
    }

    #[test]
    fn topological_examples() {
        let a = Rotation::sqrt2("a");
        let rot = StandardWeylSystem::single(1, a.clone());
        let fam = PolyFamily::parse("n").unwrap();
        let report = probe_topological(&RecurrenceSetSpec::full_range(1000), &rot, &fam, &ProbeConfig::new(q(3, 10))).unwrap();
        assert_eq!(report.verdict, Verdict::WitnessFound);
        assert!(validate_topological(&report, &rot, &fam).unwrap());

        let whole = probe_topological(
            &RecurrenceSetSpec::explicit(vec![17, 40], 100),
            &StandardWeylSystem::single(2, a),
            &PolyFamily::parse("n, n^2").unwrap(),
            &ProbeConfig::new(q(3, 5)),
        )
        .unwrap();
        assert_eq!(whole.witness_ns(), vec![17]);
    }

    #[test]
    fn topological_grid_is_used_when_origin_fails() {
        // rational rotation: at n = 2 the orbit of 0 sits at 2/5, while
        // x = -1/5 moves to 1/5, inside the ball of radius 1/4
        let sys = StandardWeylSystem::new(vec![Factor { step: 1, rotation: Rotation::realized("b", q(1, 5)) }]);
        let fam = PolyFamily::parse("n").unwrap();
        let report = probe_topological(&RecurrenceSetSpec::explicit(vec![2], 2), &sys, &fam, &ProbeConfig::new(q(1, 4))).unwrap();
        assert_eq!(report.verdict, Verdict::WitnessFound);
        let base = report.witnesses[0].base_point.as_ref().unwrap();
        assert_ne!(base[0], "0");
        assert!(validate_topological(&report, &sys, &fam).unwrap());
    }

    #[test]
    fn cross_check_on_rotation() {
        let sys = StandardWeylSystem::single(1, Rotation::sqrt2("a"));
        let fam = PolyFamily::parse("n").unwrap();
        let report = cross_check(&RecurrenceSetSpec::full_range(1000), &fam, &sys, &ProbeConfig::new(q(1, 10))).unwrap();
        assert!(!report.overlap.is_empty());
        // shifting the base point off 0 doubles the reach: ‖nα‖ < 2ε suffices
        assert_eq!(report.overlap, report.kronecker.witness_ns());
        assert!(report.discrepancies.iter().all(|d| d.found_by == ProbeKind::Topological));
        assert!(report.observed_factor.unwrap() < 2.0);
        let empty = cross_check(&RecurrenceSetSpec::explicit(vec![], 10), &fam, &sys, &ProbeConfig::new(q(1, 10))).unwrap();
        assert_eq!(empty.kronecker.verdict, Verdict::NoWitnessUpToHorizon);
        assert_eq!(empty.topological.verdict, Verdict::NoWitnessUpToHorizon);
    }

    #[test]
    fn report_json_round_trip() {
        let a = Rotation::sqrt2("a");
        let basis = vec![poly("n")];
        let report = probe_kronecker(&RecurrenceSetSpec::full_range(50), &basis, &[a.clone()], &ProbeConfig::new(q(1, 20))).unwrap();
        let text = serde_json::to_string(&report).unwrap();
        let back: ProbeReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        assert!(validate_kronecker(&back, &basis, &[a]).unwrap());
    }
}
