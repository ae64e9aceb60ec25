//! Shared generators and property checks for the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use weylkit::dynamics::{
    correlate_closed_form, correlate_exact, evaluate_tuples_exact, expansion, CharSum, Character,
    CorrelationClosedForm, ExactValue, Factor, GaussianRational, Rotation, StandardWeylSystem,
};
use weylkit::polynomial::{IntegralPolynomial, RationalPolynomial};
use weylkit::weyl::{
    frequency_space, weyl_complexity, weyl_space, xi_domain, PolyFamily, WeylSpace,
};

pub type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

pub fn big(v: i64) -> BigInt {
    BigInt::from(v)
}

/// Nonzero polynomial with zero constant term, integer monomial
/// coefficients in `[-bound, bound]` and degree at most `max_deg`.
pub fn random_poly<R: Rng>(rng: &mut R, max_deg: usize, bound: i64) -> IntegralPolynomial {
    loop {
        let deg = rng.gen_range(1..=max_deg);
        let mut coeffs = vec![0i64];
        coeffs.extend((1..=deg).map(|_| rng.gen_range(-bound..=bound)));
        let p = IntegralPolynomial::from_int_monomials(&coeffs);
        if !p.is_zero() {
            return p;
        }
    }
}

pub fn random_family<R: Rng>(rng: &mut R, max_r: usize, max_deg: usize, bound: i64) -> PolyFamily {
    loop {
        let r = rng.gen_range(1..=max_r);
        let polys = (0..r).map(|_| random_poly(rng, max_deg, bound)).collect();
        if let Ok(f) = PolyFamily::new(polys) {
            if f.is_essentially_distinct() {
                return f;
            }
        }
    }
}

pub fn family_from_monomials(coeffs: &[Vec<i64>]) -> Option<PolyFamily> {
    let polys: Vec<_> = coeffs
        .iter()
        .map(|c| {
            let mut full = vec![0];
            full.extend_from_slice(c);
            IntegralPolynomial::from_int_monomials(&full)
        })
        .collect();
    PolyFamily::new(polys).ok().filter(PolyFamily::is_essentially_distinct)
}

fn complexity(family: &PolyFamily) -> Result<usize, String> {
    weyl_complexity(family, family.default_k_max())
        .map(|c| c.complexity)
        .map_err(|e| format!("{family:?}: {e}"))
}

fn space(family: &PolyFamily, k: usize) -> Result<WeylSpace, String> {
    weyl_space(family, k).map_err(|e| format!("{family:?}: {e}"))
}

/// `WP_k ⊆ WP_{k+1}`, stabilization from `W(P)`, the strict jump at `W(P)`
/// and `dim WP(P) = r`.
pub fn check_stabilization(family: &PolyFamily) -> Check {
    let w = complexity(family)?;
    let chain: Vec<WeylSpace> = (0..=w + 2).map(|k| space(family, k)).collect::<Result<_, _>>()?;
    for k in 0..w + 2 {
        ensure!(chain[k + 1].includes(&chain[k]), "{family:?}: WP_{k} not inside WP_{}", k + 1);
    }
    for k in w..=w + 2 {
        ensure!(chain[k] == chain[w], "{family:?}: WP_{k} != WP_{w}");
    }
    ensure!(w >= 1 && chain[w - 1] != chain[w], "{family:?}: no strict jump at W = {w}");
    ensure!(chain[w].dim() == family.len(), "{family:?}: dim WP = {} != r", chain[w].dim());
    Ok(())
}

/// `P ⊆ WP_d(P)` for `d = 1..=max_d`.
pub fn check_containment(family: &PolyFamily, max_d: usize) -> Check {
    for d in 1..=max_d {
        let wp = space(family, d)?;
        for p in family.polys() {
            ensure!(wp.contains_poly(p), "{family:?}: {p} not in WP_{d}");
        }
    }
    Ok(())
}

/// `P ⊆ Q ⇒ WP_d(P) ⊆ WP_d(Q)`.
pub fn check_inclusion(p: &PolyFamily, q: &PolyFamily, max_d: usize) -> Check {
    for d in 1..=max_d {
        ensure!(space(q, d)?.includes(&space(p, d)?), "{p:?} ⊆ {q:?} but WP_{d} not nested");
    }
    Ok(())
}

/// `WP_d(P∘q) = WP_d(P)∘q`.
pub fn check_composition(family: &PolyFamily, q: &IntegralPolynomial, d: usize) -> Check {
    let lhs = space(&family.compose(q), d)?;
    let rhs = space(family, d)?.compose(q);
    ensure!(lhs == rhs, "{family:?} ∘ {q}: {lhs} != {rhs} at d = {d}");
    Ok(())
}

/// `WP_d(p_1,…,p_r) = WP_d(p_1−p_r, …, p_{r−1}−p_r, −p_r)` when both are essentially distinct.
pub fn check_difference(family: &PolyFamily, d: usize) -> Check {
    let diff = family.difference_family();
    if !diff.is_essentially_distinct() {
        return Ok(());
    }
    let (a, b) = (space(family, d)?, space(&diff, d)?);
    ensure!(a == b, "{family:?}: difference family gives {b}, expected {a} at d = {d}");
    Ok(())
}

fn rescale_rational(h: &RationalPolynomial, m: i64, i: i64) -> RationalPolynomial {
    let q = |v: i64| BigRational::from_integer(v.into());
    let inner = RationalPolynomial::new(vec![q(i), q(m)]);
    let shifted = h.compose(&inner);
    let h_i = h.eval(&q(i));
    (&shifted - &RationalPolynomial::constant(h_i)).scale(&BigRational::new(BigInt::one(), m.into()))
}

/// `h ∈ WP_d(P) ⇔ (h(mn+i)−h(i))/m ∈ WP_d(P_{m,i})` over a pool of test polynomials.
pub fn check_scaling(family: &PolyFamily, m: i64, i: i64, d: usize, extra: &[RationalPolynomial]) -> Check {
    let Ok(scaled) = family.rescale(m, i) else {
        return Err(format!("{family:?}: rescale({m}, {i}) not integral"));
    };
    if !scaled.is_essentially_distinct() {
        return Ok(());
    }
    let (wp, ws) = (space(family, d)?, space(&scaled, d)?);
    let top = wp.ambient_degree().unwrap_or(0) + 1;
    let mut pool: Vec<RationalPolynomial> = wp.rational_polys();
    pool.extend((1..=top).map(|j| RationalPolynomial::identity().pow(j as u32)));
    pool.extend_from_slice(extra);
    for h in &pool {
        let hs = rescale_rational(h, m, i);
        ensure!(
            wp.contains_rational(h) == ws.contains_rational(&hs),
            "{family:?}, m = {m}, i = {i}, d = {d}: membership of {h} not preserved"
        );
    }
    Ok(())
}

/// `dim (R-span(Λ_k) ∩ ξ-domain) = dim ξ(·)` for `k ≤ W(P)`.
pub fn check_xi_injective(family: &PolyFamily) -> Check {
    let w = complexity(family)?;
    for k in 1..=w {
        let freq = frequency_space(family, k).map_err(|e| e.to_string())?;
        let image = space(family, k)?;
        ensure!(freq.dim() == image.dim(), "{family:?}: ξ not injective at k = {k}");
    }
    Ok(())
}

pub fn check_dim_equals_r(family: &PolyFamily) -> Check {
    let w = complexity(family)?;
    let dim = space(family, w)?.dim();
    ensure!(dim == family.len(), "{family:?}: dim WP = {dim}, r = {}", family.len());
    Ok(())
}

/// Every property of the random-family suite for one family.
pub fn check_family_properties<R: Rng>(rng: &mut R, family: &PolyFamily) -> Check {
    check_stabilization(family)?;
    check_containment(family, 3)?;
    check_dim_equals_r(family)?;
    check_xi_injective(family)?;
    let extra = random_poly(rng, 4, 3);
    let mut bigger = family.polys().to_vec();
    bigger.push(extra);
    if let Ok(q) = PolyFamily::new(bigger) {
        if q.is_essentially_distinct() {
            check_inclusion(family, &q, 2)?;
        }
    }
    let d = rng.gen_range(1..=2);
    for q in ["2n", "n^2"] {
        check_composition(family, &q.parse().unwrap(), d)?;
    }
    check_difference(family, d)?;
    let probe = random_poly(rng, 6, 3).to_monomial();
    for m in [2, 3] {
        for i in [0, 1] {
            check_scaling(family, m, i, d, std::slice::from_ref(&probe))?;
        }
    }
    Ok(())
}

/// Families with zero constant terms used for correlation instances.
pub const CORRELATION_POOL: &[&str] = &[
    "n", "2n", "3n", "-n", "n^2", "2n^2", "n^2 + n", "n^3", "n^3 - n", "binom(n, 2)",
];

pub fn pool_family<R: Rng>(rng: &mut R, r: usize) -> PolyFamily {
    loop {
        let picks: Vec<&str> = CORRELATION_POOL.choose_multiple(rng, r).copied().collect();
        let f = PolyFamily::parse(&picks.join(", ")).unwrap();
        if f.is_essentially_distinct() {
            return f;
        }
    }
}

fn random_block<R: Rng>(rng: &mut R, d: usize, bound: i64) -> Vec<BigInt> {
    (0..d).map(|_| big(rng.gen_range(-bound..=bound))).collect()
}

/// Integer points of the ξ-domain `ℚ^r × R-span(Λ_{d−1})^⊥`, as per-character blocks.
fn domain_blocks<R: Rng>(rng: &mut R, family: &PolyFamily, d: usize, bound: i64) -> Option<Vec<Vec<BigInt>>> {
    let r = family.len();
    let basis = xi_domain(family, d).ok()?.basis_vectors();
    for _ in 0..20 {
        let mut v = vec![BigRational::zero(); r * d];
        for b in &basis {
            let c = BigRational::from_integer(big(rng.gen_range(-1..=1)));
            for (x, y) in v.iter_mut().zip(b) {
                *x += &c * y;
            }
        }
        let lcm = RationalPolynomial::new(v.clone()).denominator_lcm();
        let ints: Vec<BigInt> = v.iter().map(|x| (x * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let blocks: Vec<Vec<BigInt>> = (0..r).map(|k| (0..d).map(|i| ints[i * r + k].clone()).collect()).collect();
        let v0: Vec<BigInt> = (0..d).map(|i| -blocks.iter().map(|b| &b[i]).sum::<BigInt>()).collect();
        let all = blocks.iter().flatten().chain(&v0);
        if all.clone().all(|x| x.abs() <= big(bound)) && !all.clone().all(Zero::is_zero) {
            let mut out = vec![v0];
            out.extend(blocks);
            return Some(out);
        }
    }
    None
}

/// A single-factor correlation instance: `d ≤ 3`, `r ≤ 2`, `|freq| ≤ 3`.
/// Every other instance is drawn from the ξ-domain so that phases occur.
pub fn correlation_instance<R: Rng>(rng: &mut R, index: usize) -> (StandardWeylSystem, Vec<Character>, PolyFamily) {
    let d = rng.gen_range(1..=3);
    let r = rng.gen_range(1..=2);
    let family = pool_family(rng, r);
    let sys = StandardWeylSystem::single(d, Rotation::symbolic("a"));
    let blocks = if index % 2 == 1 {
        domain_blocks(rng, &family, d, 3)
    } else {
        None
    };
    let blocks = blocks.unwrap_or_else(|| (0..=r).map(|_| random_block(rng, d, 3)).collect());
    (sys, blocks.into_iter().map(Character).collect(), family)
}

/// Closed form against the pushforward oracle on `n ∈ [1, n_max]`, and the
/// phase polynomial against `WP_d(P)`. Returns whether the instance was a phase.
pub fn check_dual_oracle(
    sys: &StandardWeylSystem,
    chars: &[Character],
    family: &PolyFamily,
    n_max: i64,
) -> Result<bool, String> {
    let cf = correlate_closed_form(sys, chars, family).map_err(|e| e.to_string())?;
    for n in 1..=n_max {
        let n = big(n);
        let exact = correlate_exact(sys, chars, family, &n).map_err(|e| e.to_string())?;
        match &cf {
            CorrelationClosedForm::Phase { q } => ensure!(
                exact == ExactValue::Phase(vec![q.eval(&n)]),
                "{family:?} {chars:?}: phase {q} disagrees at n = {n}: {exact:?}"
            ),
            CorrelationClosedForm::Zero { exceptional_set } => {
                if !exceptional_set.contains(&n) {
                    ensure!(
                        exact == ExactValue::Zero,
                        "{family:?} {chars:?}: zero closed form but {exact:?} at n = {n}"
                    );
                }
            }
        }
    }
    if let CorrelationClosedForm::Phase { q } = &cf {
        let d = sys.factors()[0].step;
        ensure!(space(family, d)?.contains_poly(q), "{family:?}: phase {q} not in WP_{d}");
    }
    Ok(matches!(cf, CorrelationClosedForm::Phase { .. }))
}

fn random_coeff<R: Rng>(rng: &mut R) -> GaussianRational {
    loop {
        let re = BigRational::new(big(rng.gen_range(-3..=3)), big(rng.gen_range(1..=3)));
        let im = BigRational::new(big(rng.gen_range(-2..=2)), big(rng.gen_range(1..=2)));
        let c = GaussianRational::new(re, im);
        if !c.is_zero() {
            return c;
        }
    }
}

/// Trigonometric-polynomial instance on `s ≤ 2` factors with at most three
/// characters per function. One character tuple is taken from the ξ-domain
/// of each factor so that the expansion is usually nonempty.
pub fn expansion_instance<R: Rng>(rng: &mut R) -> (StandardWeylSystem, Vec<CharSum>, PolyFamily) {
    let s = rng.gen_range(1..=2);
    let factors: Vec<Factor> = (0..s)
        .map(|j| Factor { step: rng.gen_range(1..=2), rotation: Rotation::symbolic(format!("a{j}")) })
        .collect();
    let sys = StandardWeylSystem::new(factors);
    let r = rng.gen_range(1..=2);
    let family = pool_family(rng, r);
    let mut seeded: Vec<Vec<BigInt>> = vec![Vec::new(); r + 1];
    for f in sys.factors() {
        let blocks = domain_blocks(rng, &family, f.step, 3)
            .unwrap_or_else(|| (0..=r).map(|_| random_block(rng, f.step, 3)).collect());
        for (acc, b) in seeded.iter_mut().zip(blocks) {
            acc.extend(b);
        }
    }
    let fs = seeded
        .into_iter()
        .map(|seed| {
            let mut terms = vec![(random_coeff(rng), Character(seed))];
            for _ in 0..rng.gen_range(0..=2) {
                terms.push((random_coeff(rng), Character(random_block(rng, sys.dim(), 2))));
            }
            CharSum::new(terms)
        })
        .collect();
    (sys, fs, family)
}

/// Expansion evaluation against the tuple-summed oracle, and the ℓ² bound.
/// Returns the number of expansion terms.
pub fn check_expansion(
    sys: &StandardWeylSystem,
    fs: &[CharSum],
    family: &PolyFamily,
    n_max: i64,
) -> Result<usize, String> {
    let exp = expansion(sys, fs, family).map_err(|e| e.to_string())?;
    ensure!(
        exp.satisfies_l2_bound(),
        "ℓ² bound fails: {} > {}",
        exp.l2_norm_sqr,
        exp.norm_product_sqr
    );
    for n in 1..=n_max {
        let n = big(n);
        if exp.exceptional_set.contains(&n) {
            continue;
        }
        let oracle = evaluate_tuples_exact(sys, fs, family, &n).map_err(|e| e.to_string())?;
        ensure!(exp.evaluate(&n) == oracle, "{family:?}: expansion differs from oracle at n = {n}");
    }
    for term in &exp.terms {
        for (q, f) in term.phases.iter().zip(sys.factors()) {
            ensure!(space(family, f.step)?.contains_poly(q), "{family:?}: term phase {q} not in WP_{}", f.step);
        }
    }
    Ok(exp.terms.len())
}

pub fn f64_of(x: &BigRational) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
