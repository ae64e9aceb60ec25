//! Acceptance criteria, one PASS/FAIL line each.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weylkit::dynamics::{
    correlate_closed_form, ergodic_average_checkpoints, parse_realization, Character, PhaseTerm,
    Rotation, Sequence, StandardWeylSystem,
};
use weylkit::polynomial::{parse_rational_poly, IntegralPolynomial, RationalPolynomial};
use weylkit::recurrence::{
    cross_check, generate_set, probe_kronecker, ProbeConfig, RecurrenceSetSpec, Verdict,
};
use weylkit::weyl::{
    integral_preimage, scheme_compare, weyl_complexity, weyl_polynomials, weyl_space, PolyFamily,
    SchemeRelation, WeylSpace,
};

/// Collects failed sub-items of one criterion.
#[derive(Default)]
struct Items {
    checked: usize,
    failures: Vec<String>,
}

impl Items {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn timed<T>(&mut self, limit: Duration, label: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        let elapsed = start.elapsed();
        self.check(elapsed < limit, || format!("{label} took {elapsed:?}, limit {limit:?}"));
        out
    }

    fn finish(self, summary: String) -> Result<String, String> {
        if self.failures.is_empty() {
            Ok(format!("{} checks; {summary}", self.checked))
        } else {
            Err(format!(
                "{} of {} checks failed: {}",
                self.failures.len(),
                self.checked,
                self.failures.join("; ")
            ))
        }
    }
}

fn within(items: &mut Items, start: Instant, limit: Duration) {
    let elapsed = start.elapsed();
    items.check(elapsed <= limit, || format!("took {elapsed:?}, limit {limit:?}"));
}

fn family(text: &str) -> PolyFamily {
    PolyFamily::parse(text).expect("valid family")
}

fn span(polys: &[&str]) -> WeylSpace {
    let ps: Vec<RationalPolynomial> = polys.iter().map(|p| parse_rational_poly(p).unwrap()).collect();
    WeylSpace::span_of(&ps)
}

fn poly(text: &str) -> IntegralPolynomial {
    text.parse().unwrap()
}

fn wp(f: &PolyFamily) -> WeylSpace {
    weyl_polynomials(f, f.default_k_max()).expect("stabilizes")
}

/// Every family of `r ≤ 4` distinct nonzero linear polynomials `a·n`, `|a| ≤ 4`.
fn linear_families() -> Vec<PolyFamily> {
    let coeffs: Vec<i64> = (-4..=4).filter(|&a| a != 0).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << coeffs.len()) {
        if mask.count_ones() <= 4 {
            let chosen: Vec<String> = coeffs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, a)| format!("{a}n"))
                .collect();
            out.push(family(&chosen.join(", ")));
        }
    }
    out
}

fn proportional(a: &RationalPolynomial, b: &RationalPolynomial) -> bool {
    let Some(j) = (0..b.coeffs().len()).find(|&j| !b.coeff(j).is_zero()) else {
        return a.is_zero();
    };
    *a == b.scale(&(a.coeff(j) / b.coeff(j)))
}

fn criterion_1() -> Result<String, String> {
    let mut items = Items::default();
    let limit = Duration::from_secs(1);
    for (text, expected) in [
        ("n, 2n, n^2", 3),
        ("n, 2n, 3n", 3),
        ("n, 2n, 3n^3", 2),
        ("n, 2n^2, 3n^3", 1),
        ("n, 2n, 3n^2", 3),
    ] {
        let f = family(text);
        let w = items.timed(limit, text, || weyl_complexity(&f, f.default_k_max()));
        items.check(w.as_ref().map(|c| c.complexity) == Ok(expected), || {
            format!("W({{{text}}}) = {w:?}, expected {expected}")
        });
    }
    let linear = linear_families();
    for f in &linear {
        let w = items.timed(limit, &f.to_string(), || weyl_complexity(f, f.default_k_max()));
        items.check(w.as_ref().map(|c| c.complexity) == Ok(f.len()), || format!("W({f}) = {w:?}, expected {}", f.len()));
    }
    items.finish(format!("5 golden families and {} linear families", linear.len()))
}

fn criterion_2() -> Result<String, String> {
    let mut items = Items::default();
    let f = family("n, 2n, n^2");
    let golden = [
        ("WP({n,2n,n^2})", wp(&f), span(&["n", "n^2", "n^3 - n^4/2"])),
        ("WP_1({n,2n,n^2})", weyl_space(&f, 1).unwrap(), span(&["n", "n^2"])),
        ("WP_2({n,2n,n^2})", weyl_space(&f, 2).unwrap(), span(&["n", "n^2"])),
        ("WP({n,2n,3n})", wp(&family("n, 2n, 3n")), span(&["n", "n^2", "n^3"])),
        ("WP({n,2n,3n^2})", wp(&family("n, 2n, 3n^2")), span(&["n", "n^2", "n^3 - n^4/6"])),
    ];
    for (label, got, expected) in golden {
        items.check(got == expected, || format!("{label} = {got}, expected {expected}"));
    }
    let linear = linear_families();
    for f in &linear {
        let full: Vec<String> = (1..=f.len()).map(|j| format!("n^{j}")).collect();
        let full: Vec<&str> = full.iter().map(String::as_str).collect();
        let got = wp(f);
        items.check(got == span(&full), || format!("WP({f}) = {got}, expected all degree ≤ {} polynomials", f.len()));
    }
    items.finish(format!("5 golden spaces and {} linear families", linear.len()))
}

fn criterion_3() -> Result<String, String> {
    let mut items = Items::default();
    let limit = Duration::from_secs(1);
    // (P, Q, relation, certificate in WP(P) \ WP(Q), certificate in WP(Q) \ WP(P))
    let cases = [
        ("n^2", "n, 2n", SchemeRelation::QrecImpliesPrec, None, Some("n")),
        ("n, 2n, 3n", "n, 2n, 3n^3", SchemeRelation::Equivalent, None, None),
        ("n, 2n, 3n", "n, 2n, 3n^2", SchemeRelation::GeneralPosition, Some("n^3"), Some("n^3 - n^4/6")),
    ];
    for (p, q, relation, cert_p, cert_q) in cases {
        let (fp, fq) = (family(p), family(q));
        let label = format!("{{{p}}} vs {{{q}}}");
        let Ok(cmp) = items.timed(limit, &label, || scheme_compare(&fp, &fq, None)) else {
            items.check(false, || format!("{label}: comparison failed"));
            continue;
        };
        items.check(cmp.relation == relation, || format!("{label}: {:?}, expected {relation:?}", cmp.relation));
        let (wp_p, wp_q) = (wp(&fp), wp(&fq));
        for (stated, found, inside, outside) in [
            (cert_p, &cmp.in_p_not_q, &wp_p, &wp_q),
            (cert_q, &cmp.in_q_not_p, &wp_q, &wp_p),
        ] {
            let Some(stated) = stated else {
                items.check(found.is_none(), || format!("{label}: unexpected certificate {found:?}"));
                continue;
            };
            let h = parse_rational_poly(stated).unwrap();
            items.check(inside.contains_rational(&h) && !outside.contains_rational(&h), || {
                format!("{label}: {stated} is not a certificate; {inside} vs {outside}")
            });
            items.check(
                found.as_ref().is_some_and(|c| proportional(&c.to_monomial(), &h)),
                || format!("{label}: reported certificate {found:?}, expected a multiple of {stated}"),
            );
        }
    }
    items.finish("3 comparisons".into())
}

fn criterion_4() -> Result<String, String> {
    let mut items = Items::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4_200);
    let families = 240;
    let start = Instant::now();
    for i in 0..families {
        let f = common::random_family(&mut rng, 3, 4, 3);
        let result = common::check_family_properties(&mut rng, &f);
        items.check(result.is_ok(), || format!("family {i} {f}: {}", result.unwrap_err()));
    }
    within(&mut items, start, Duration::from_secs(300));
    items.finish(format!("{families} random families"))
}

fn criterion_5() -> Result<String, String> {
    let mut items = Items::default();
    let mut rng = ChaCha8Rng::seed_from_u64(5_500);
    let instances = 600;
    let mut phases = 0;
    let start = Instant::now();
    for i in 0..instances {
        let (sys, chars, f) = common::correlation_instance(&mut rng, i);
        let result = common::check_dual_oracle(&sys, &chars, &f, 200);
        phases += usize::from(result == Ok(true));
        items.check(result.is_ok(), || format!("instance {i}: {}", result.unwrap_err()));
    }
    within(&mut items, start, Duration::from_secs(120));
    items.finish(format!("{instances} instances, {phases} phase closed forms"))
}

fn criterion_6() -> Result<String, String> {
    let mut items = Items::default();
    let mut rng = ChaCha8Rng::seed_from_u64(6_100);
    let instances = 150;
    let mut terms = 0;
    for i in 0..instances {
        let (sys, fs, f) = common::expansion_instance(&mut rng);
        let result = common::check_expansion(&sys, &fs, &f, 100);
        terms += result.as_ref().copied().unwrap_or(0);
        items.check(result.is_ok(), || format!("instance {i}: {}", result.unwrap_err()));
    }
    items.finish(format!("{instances} instances, {terms} expansion terms"))
}

fn phase_average(terms: &[(&IntegralPolynomial, &Rotation)], n: u64) -> Vec<(u64, f64, f64)> {
    let seq = Sequence::phases(
        terms.iter().map(|(q, r)| PhaseTerm { q: (*q).clone(), rotation: (*r).clone() }).collect(),
    );
    ergodic_average_checkpoints(&seq, n)
        .expect("realized")
        .into_iter()
        .map(|c| (c.n, c.abs, c.re))
        .collect()
}

fn criterion_7() -> Result<String, String> {
    let mut items = Items::default();
    let alpha = Rotation::realized("a", parse_realization("sqrt2", 256).unwrap());
    let wp2 = weyl_space(&family("n, 2n"), 2).unwrap();
    let pairs = [
        ("n^3", "n", "n, 2n"),
        ("n^3", "n^2", "n, 2n"),
        ("n^3", "n - n^2", "n, 2n"),
        ("n^3", "2n^3 - n^4", "n, 2n, n^2"),
        ("n^2", "n", "n"),
        ("n^4", "n^2 + n", "n, 2n"),
    ];
    let mut worst_ratio = f64::INFINITY;
    let mut worst_abs: f64 = 0.0;
    for (h, q, p) in pairs {
        let (h, q) = (poly(h), poly(q));
        let space = wp(&family(p));
        items.check(space.contains_poly(&q) && !space.contains_poly(&h) && !(&h + &q).is_constant(), || {
            format!("pair ({h}, {q}) does not meet the hypotheses for {{{p}}}")
        });
        if p == "n, 2n" && h.to_string() == "n^3" {
            items.check(wp2.contains_poly(&q), || format!("{q} not in WP_2({{n,2n}})"));
        }
        let marks = phase_average(&[(&h, &alpha), (&q, &alpha)], 100_000);
        let at = |n: u64| marks.iter().find(|m| m.0 == n).map(|m| m.1).unwrap();
        let (a4, a5) = (at(10_000), at(100_000));
        worst_abs = worst_abs.max(a5);
        worst_ratio = worst_ratio.min(a4 / a5);
        items.check(a5 < 0.05, || format!("({h}, {q}): |avg| = {a5:.5} at N = 10^5"));
        items.check(a4 / a5 >= 2.0, || {
            format!("({h}, {q}): |avg| {a4:.5} at 10^4 vs {a5:.5} at 10^5, ratio {:.3}", a4 / a5)
        });
    }
    let f = family("n, 2n");
    for q in ["n - n^2", "n^2", "n"] {
        let q = poly(q);
        let neg = -&q;
        let marks = phase_average(&[(&neg, &alpha), (&q, &alpha)], 100_000);
        let last = marks.last().unwrap();
        items.check(last.1 == 1.0 && last.2 == 1.0, || format!("h = -({q}): average {last:?}, expected exactly 1"));
        let witness = integral_preimage(&f, 2, &q.to_monomial()).unwrap();
        let Some((v, scale)) = witness else {
            items.check(false, || format!("{q}: no membership witness"));
            continue;
        };
        let mut chars: Vec<Character> =
            (0..2).map(|b| Character((0..2).map(|i| v[i * 2 + b].clone()).collect())).collect();
        let v0 = Character((0..2).map(|i| -chars.iter().map(|c| &c.0[i]).sum::<BigInt>()).collect());
        chars.insert(0, v0);
        let sys = StandardWeylSystem::single(2, alpha.clone());
        let closed = correlate_closed_form(&sys, &chars, &f).unwrap();
        let Some(phase) = closed.phase().cloned() else {
            items.check(false, || format!("{q}: witness correlation is not a phase"));
            continue;
        };
        items.check(phase == q.scale(&scale), || format!("{q}: witness phase {phase}, scale {scale}"));
        let neg_phase = -&phase;
        let marks = phase_average(&[(&phase, &alpha), (&neg_phase, &alpha)], 100_000);
        let last = marks.last().unwrap();
        items.check(last.1 == 1.0 && last.2 == 1.0, || format!("witness for {q}: average {last:?}"));
    }
    items.finish(format!(
        "{} pairs, max |avg| at 10^5 = {worst_abs:.5}, min decrease 10^4→10^5 = {worst_ratio:.2}x; membership averages exactly 1",
        pairs.len()
    ))
}

fn criterion_8() -> Result<String, String> {
    let mut items = Items::default();
    let sqrt2 = Rotation::realized("sqrt2", parse_realization("sqrt2", 256).unwrap());
    let quarter = BigRational::new(1.into(), 4.into());
    let threshold = RecurrenceSetSpec::distance_above(poly("n^3"), sqrt2.clone(), quarter.clone(), 10_000);
    for basis in [vec!["n^3"], vec!["n", "n^2", "n^3"], vec!["n^3", "n^4"], vec!["2n^3 - n^4", "n^3"]] {
        for eps in ["1/4", "1/10", "1/100"] {
            let basis_polys: Vec<IntegralPolynomial> = basis.iter().map(|b| poly(b)).collect();
            let config = ProbeConfig::new(parse_realization(eps, 0).unwrap());
            let report = probe_kronecker(&threshold, &basis_polys, std::slice::from_ref(&sqrt2), &config).unwrap();
            items.check(
                report.verdict == Verdict::NoWitnessUpToHorizon && report.analytic_certificate.is_some(),
                || format!("threshold set, basis {basis:?}, ε = {eps}: {:?}, certificate {:?}", report.verdict, report.analytic_certificate),
            );
        }
    }
    let basis = wp(&family("n, 2n")).integral_basis().to_vec();
    items.check(basis == vec![poly("n"), poly("n^2")], || format!("WP({{n,2n}}) basis {basis:?}"));
    let full = RecurrenceSetSpec::full_range(1000);
    let report = probe_kronecker(&full, &basis, std::slice::from_ref(&sqrt2), &ProbeConfig::new(quarter.clone())).unwrap();
    items.check(report.verdict == Verdict::WitnessFound, || "FullRange 10^3: no witness at ε = 1/4".into());
    let first = report.witness_ns().first().copied();
    let f = family("n");
    let sys = StandardWeylSystem::single(1, sqrt2.clone());
    let cc = cross_check(&full, &f, &sys, &ProbeConfig::new(BigRational::new(1.into(), 10.into()))).unwrap();
    items.check(!cc.overlap.is_empty(), || "cross check: no co-occurring witnesses".into());
    items.finish(format!(
        "threshold set of size {}, first full-range witness n = {first:?}, cross check overlap {} (factor {:.3})",
        generate_set(&threshold).unwrap().len(),
        cc.overlap.len(),
        cc.observed_factor.unwrap_or(f64::NAN)
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Result<String, String>); 8] = [
        ("1 golden complexity values", criterion_1),
        ("2 golden Weyl bases", criterion_2),
        ("3 scheme comparison", criterion_3),
        ("4 random-family property suite", criterion_4),
        ("5 dual-oracle correlations", criterion_5),
        ("6 expansion exactness and l2 bound", criterion_6),
        ("7 numerical orthogonality", criterion_7),
        ("8 recurrence probes", criterion_8),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS [{name}] ({secs:.2}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL [{name}] ({secs:.2}s) {detail}");
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
