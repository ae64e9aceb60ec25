use std::fmt::Write as _;
use std::path::Path;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};
use weylkit::dynamics::{
    correlate_closed_form, correlate_exact, ergodic_average_checkpoints, ergodic_average_sharded,
    evaluate_tuples_exact, expansion, CharSum, Character, CorrelationClosedForm, ExactValue,
    PhaseTerm, Rotation, Sequence, StandardWeylSystem,
};
use weylkit::polynomial::{parse_rational_poly, IntegralPolynomial};
use weylkit::recurrence::{
    cross_check, probe_kronecker, probe_topological, validate_kronecker, validate_topological,
    ProbeConfig, ProbeReport, Verdict,
};
use weylkit::weyl::{
    integral_preimage, scheme_compare, weyl_complexity, weyl_polynomials, weyl_space, SchemeRelation,
};

use crate::error::{CliError, EXIT_VALIDATION};
use crate::input::{self, int, ints, joined, strings};
use crate::{GlobalOpts, ProbeMode, Report, SystemArgs};

fn fields(pairs: Vec<(&str, Value)>) -> Map<String, Value> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub fn complexity(o: &GlobalOpts, family: &str) -> Result<Report, CliError> {
    let f = input::family(family)?;
    let k_max = o.k_max.unwrap_or_else(|| f.default_k_max());
    let c = weyl_complexity(&f, k_max)?;
    let text = format!(
        "P = {{{}}}\nW(P) = {}\ndim span(Λ_k), k = 1..{}: {:?}\n",
        joined(f.polys()),
        c.complexity,
        c.complexity,
        c.trace
    );
    Ok(Report {
        command: "complexity",
        fields: fields(vec![
            ("family", strings(f.polys())),
            ("complexity", json!(c.complexity)),
            ("trace", json!(c.trace)),
            ("k_max", json!(k_max)),
        ]),
        text,
    })
}

pub fn weyl_basis(o: &GlobalOpts, family: &str, k: Option<usize>) -> Result<Report, CliError> {
    let f = input::family(family)?;
    let (space, k) = match k {
        Some(k) => (weyl_space(&f, k)?, k),
        None => {
            let k_max = o.k_max.unwrap_or_else(|| f.default_k_max());
            let w = weyl_complexity(&f, k_max)?.complexity;
            (weyl_polynomials(&f, k_max)?, w)
        }
    };
    let text = format!("WP_{k}(P) = {space}\ndim = {}\n", space.dim());
    Ok(Report {
        command: "weyl-basis",
        fields: fields(vec![
            ("family", strings(f.polys())),
            ("k", json!(k)),
            ("dim", json!(space.dim())),
            ("basis", strings(space.integral_basis())),
        ]),
        text,
    })
}

pub fn compare(o: &GlobalOpts, p: &str, q: &str) -> Result<Report, CliError> {
    let fp = input::family(p)?;
    let fq = input::family(q)?;
    let cmp = scheme_compare(&fp, &fq, o.k_max)?;
    let (name, meaning) = match cmp.relation {
        SchemeRelation::Equivalent => ("equivalent", "WP(P) = WP(Q): P-recurrence and Q-recurrence coincide"),
        SchemeRelation::QrecImpliesPrec => ("q_rec_implies_p_rec", "WP(P) ⊊ WP(Q): Q-recurrence implies P-recurrence"),
        SchemeRelation::PrecImpliesQrec => ("p_rec_implies_q_rec", "WP(Q) ⊊ WP(P): P-recurrence implies Q-recurrence"),
        SchemeRelation::GeneralPosition => ("general_position", "neither space contains the other"),
    };
    let mut text = format!("{meaning}\n");
    if let Some(h) = &cmp.in_p_not_q {
        writeln!(text, "in WP(P) but not WP(Q): {h}").unwrap();
    }
    if let Some(h) = &cmp.in_q_not_p {
        writeln!(text, "in WP(Q) but not WP(P): {h}").unwrap();
    }
    let opt = |h: &Option<IntegralPolynomial>| h.as_ref().map_or(Value::Null, |h| json!(h.to_string()));
    Ok(Report {
        command: "compare",
        fields: fields(vec![
            ("p", strings(fp.polys())),
            ("q", strings(fq.polys())),
            ("relation", json!(name)),
            ("in_p_not_q", opt(&cmp.in_p_not_q)),
            ("in_q_not_p", opt(&cmp.in_q_not_p)),
        ]),
        text,
    })
}

pub fn membership(o: &GlobalOpts, family: &str, h: &str, k: Option<usize>) -> Result<Report, CliError> {
    let f = input::family(family)?;
    let h = parse_rational_poly(h)?;
    let k = match k {
        Some(k) => k,
        None => weyl_complexity(&f, o.k_max.unwrap_or_else(|| f.default_k_max()))?.complexity,
    };
    let r = f.len();
    let mut out = fields(vec![
        ("family", strings(f.polys())),
        ("h", json!(h.to_string())),
        ("k", json!(k)),
    ]);
    let Some((v, scale)) = integral_preimage(&f, k, &h)? else {
        out.insert("member".into(), json!(false));
        let text = format!("{h} ∉ WP_{k}(P)\n");
        return Ok(Report { command: "membership", fields: out, text });
    };
    let mut chars: Vec<Character> = (0..r)
        .map(|b| Character((0..k).map(|i| v[i * r + b].clone()).collect()))
        .collect();
    let v0 = Character(
        (0..k)
            .map(|i| -chars.iter().map(|c| &c.0[i]).sum::<BigInt>())
            .collect(),
    );
    chars.insert(0, v0);
    let sys = StandardWeylSystem::single(k.max(1), Rotation::symbolic("a"));
    let closed = if k == 0 {
        None
    } else {
        correlate_closed_form(&sys, &chars, &f)?.phase().cloned()
    };
    let verified = closed
        .as_ref()
        .is_some_and(|q| q.to_monomial() == h.scale(&num_rational::BigRational::from_integer(scale.clone())));
    let mut text = format!("{h} ∈ WP_{k}(P)\n");
    writeln!(text, "characters on the {k}-step system: {}", joined(&chars)).unwrap();
    if let Some(q) = &closed {
        writeln!(text, "correlation = e(({q})·a) = e({scale}·h(n)·a)").unwrap();
    }
    out.insert("member".into(), json!(true));
    out.insert("scale".into(), int(&scale));
    out.insert("characters".into(), strings(&chars));
    out.insert("phase".into(), closed.map_or(Value::Null, |q| json!(q.to_string())));
    out.insert("verified".into(), json!(verified));
    Ok(Report { command: "membership", fields: out, text })
}

fn parse_chars(chars: &[String]) -> Result<Vec<Character>, CliError> {
    chars
        .iter()
        .map(|c| Character::parse(c).ok_or_else(|| CliError::config(format!("bad character '{c}'"))))
        .collect()
}

fn phase_text(sys: &StandardWeylSystem, m: &[BigInt]) -> String {
    let parts: Vec<String> = m
        .iter()
        .zip(sys.factors())
        .filter(|(x, _)| x.sign() != num_bigint::Sign::NoSign)
        .map(|(x, f)| format!("{x}·{}", f.rotation))
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        format!("e({})", parts.join(" + "))
    }
}

fn closed_form_json(c: &CorrelationClosedForm) -> Value {
    match c {
        CorrelationClosedForm::Phase { q } => json!({ "kind": "phase", "q": q.to_string() }),
        CorrelationClosedForm::Zero { exceptional_set } => {
            json!({ "kind": "zero", "exceptional_set": ints(exceptional_set) })
        }
    }
}

pub fn correlate(
    o: &GlobalOpts,
    family: &str,
    chars: &[String],
    system: &SystemArgs,
    from: i64,
    to: i64,
) -> Result<Report, CliError> {
    let f = input::family(family)?;
    let sys = input::system(o, system)?;
    let chars = parse_chars(chars)?;
    let closed = if sys.factors().len() == 1 {
        Some(correlate_closed_form(&sys, &chars, &f)?)
    } else {
        None
    };
    let mut text = String::new();
    match &closed {
        Some(CorrelationClosedForm::Phase { q }) => {
            writeln!(text, "closed form: e(({q})·{})", sys.factors()[0].rotation).unwrap()
        }
        Some(CorrelationClosedForm::Zero { exceptional_set }) => writeln!(
            text,
            "closed form: 0 for n outside {{{}}}",
            joined(exceptional_set)
        )
        .unwrap(),
        None => writeln!(text, "closed form: single-factor systems only").unwrap(),
    }
    let mut rows = Vec::new();
    let mut agrees = true;
    for n in from..=to {
        let n_big = BigInt::from(n);
        let value = correlate_exact(&sys, &chars, &f, &n_big)?;
        if let Some(expected) = closed.as_ref().and_then(|c| c.value_at(&n_big)) {
            agrees &= expected == value;
        }
        let (shown, phase) = match &value {
            ExactValue::Zero => ("0".to_string(), Value::Null),
            ExactValue::Phase(m) => (phase_text(&sys, m), ints(m)),
        };
        writeln!(text, "n = {n}: {shown}").unwrap();
        rows.push(json!({ "n": n, "phase": phase }));
    }
    Ok(Report {
        command: "correlate",
        fields: fields(vec![
            ("family", strings(f.polys())),
            ("characters", strings(&chars)),
            ("closed_form", closed.as_ref().map_or(Value::Null, closed_form_json)),
            ("values", Value::Array(rows)),
            ("closed_form_agrees", json!(agrees)),
        ]),
        text,
    })
}

pub fn expand(
    o: &GlobalOpts,
    family: &str,
    functions: &[String],
    system: &SystemArgs,
    from: i64,
    to: i64,
) -> Result<Report, CliError> {
    let f = input::family(family)?;
    let sys = input::system(o, system)?;
    let fs: Vec<CharSum> = functions
        .iter()
        .map(|s| CharSum::parse(s).map_err(|e| CliError::config(e.0)))
        .collect::<Result<_, _>>()?;
    let exp = expansion(&sys, &fs, &f)?;
    let mut agrees = true;
    for n in from..=to {
        let n = BigInt::from(n);
        if !exp.exceptional_set.contains(&n) {
            agrees &= exp.evaluate(&n) == evaluate_tuples_exact(&sys, &fs, &f, &n)?;
        }
    }
    let mut text = String::new();
    let mut terms = Vec::new();
    for t in &exp.terms {
        let phase: Vec<String> = t
            .phases
            .iter()
            .zip(sys.factors())
            .filter(|(q, _)| !q.is_zero())
            .map(|(q, fac)| format!("({q})·{}", fac.rotation))
            .collect();
        let shown = if phase.is_empty() { "1".to_string() } else { format!("e({})", phase.join(" + ")) };
        writeln!(text, "({}) · {shown}", t.coeff).unwrap();
        terms.push(json!({ "coeff": t.coeff.to_string(), "phases": strings(&t.phases) }));
    }
    if exp.terms.is_empty() {
        writeln!(text, "0").unwrap();
    }
    writeln!(text, "exceptional set: {{{}}}", joined(&exp.exceptional_set)).unwrap();
    writeln!(
        text,
        "Σ|c|² = {} ≤ Π‖f‖² = {}: {}",
        exp.l2_norm_sqr,
        exp.norm_product_sqr,
        exp.satisfies_l2_bound()
    )
    .unwrap();
    writeln!(text, "matches tuple-by-tuple evaluation for n = {from}..{to}: {agrees}").unwrap();
    Ok(Report {
        command: "expand",
        fields: fields(vec![
            ("family", strings(f.polys())),
            ("terms", Value::Array(terms)),
            ("exceptional_set", ints(&exp.exceptional_set)),
            ("l2_norm_sqr", json!(exp.l2_norm_sqr.to_string())),
            ("norm_product_sqr", json!(exp.norm_product_sqr.to_string())),
            ("l2_bound_holds", json!(exp.satisfies_l2_bound())),
            ("tuples", json!(exp.tuples)),
            ("oracle_agrees", json!(agrees)),
        ]),
        text,
    })
}

pub struct ProbeArgs<'a> {
    pub set: &'a str,
    pub mode: ProbeMode,
    pub family: Option<&'a str>,
    pub basis: Option<&'a str>,
    pub k: Option<usize>,
    pub betas: &'a [String],
    pub system: &'a SystemArgs,
    pub all: bool,
    pub validate: Option<&'a Path>,
}

fn report_text(report: &ProbeReport) -> String {
    let mut text = String::new();
    let p = &report.search_params;
    writeln!(text, "{:?} probe, ε = {}, horizon {}", p.probe, report.epsilon, report.horizon).unwrap();
    writeln!(text, "polynomials: {}", p.polynomials.join(", ")).unwrap();
    writeln!(text, "rotations: {}", p.rotations.join(", ")).unwrap();
    writeln!(text, "set size {}, scanned {}", p.set_size, p.scanned).unwrap();
    match report.verdict {
        Verdict::WitnessFound => {
            let shown: Vec<String> = report.witnesses.iter().take(20).map(|w| w.n.to_string()).collect();
            let more = if report.witnesses.len() > 20 { ", …" } else { "" };
            writeln!(text, "witness found: n = {}{more}", shown.join(", ")).unwrap();
        }
        Verdict::NoWitnessUpToHorizon => writeln!(text, "no witness up to the horizon").unwrap(),
    }
    if let Some(m) = &report.near_miss {
        writeln!(text, "closest candidate: n = {}, residuals {:?}", m.n, m.residuals).unwrap();
    }
    if let Some(c) = &report.analytic_certificate {
        writeln!(text, "certificate: {c}").unwrap();
    }
    text
}

fn load_report(path: &Path) -> Result<ProbeReport, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| CliError::config(e.to_string()))?;
    let inner = value.get("report").cloned().unwrap_or(value);
    serde_json::from_value(inner).map_err(|e| CliError::config(format!("not a probe report: {e}")))
}

pub fn probe(o: &GlobalOpts, a: &ProbeArgs) -> Result<Report, CliError> {
    let set = input::set_spec(o, a.set)?;
    let mut config = ProbeConfig::new(input::epsilon(o)?);
    config.shards = o.shards.max(1);
    if a.all {
        config = config.all_witnesses();
    }
    let family = a.family.map(input::family).transpose()?;
    let sys = match (&a.system.system, a.system.step) {
        (None, None) => None,
        _ => Some(input::system(o, a.system)?),
    };
    let set_json = json!(a.set);
    let need = |what: &str| CliError::config(format!("this probe needs {what}"));
    match a.mode {
        ProbeMode::Kronecker => {
            let basis = match (a.basis, &family) {
                (Some(b), _) => input::family(b)?.polys().to_vec(),
                (None, Some(f)) => match a.k {
                    Some(k) => weyl_space(f, k)?.integral_basis().to_vec(),
                    None => weyl_polynomials(f, o.k_max.unwrap_or_else(|| f.default_k_max()))?
                        .integral_basis()
                        .to_vec(),
                },
                (None, None) => return Err(need("--basis or --family")),
            };
            let betas: Vec<Rotation> = if !a.betas.is_empty() {
                a.betas.iter().map(|b| input::rotation(o, b)).collect::<Result<_, _>>()?
            } else if let Some(sys) = &sys {
                sys.factors().iter().map(|f| f.rotation.clone()).collect()
            } else {
                vec![input::rotation(o, "sqrt2")?]
            };
            if let Some(path) = a.validate {
                let saved = load_report(path)?;
                let valid = validate_kronecker(&saved, &basis, &betas)?;
                return validation(saved, valid, probe_kronecker(&set, &basis, &betas, &config)?);
            }
            let report = probe_kronecker(&set, &basis, &betas, &config)?;
            Ok(probe_report("kronecker", set_json, report))
        }
        ProbeMode::Topological => {
            let f = family.ok_or_else(|| need("--family"))?;
            let sys = sys.ok_or_else(|| need("--system or --step"))?;
            if let Some(path) = a.validate {
                let saved = load_report(path)?;
                let valid = validate_topological(&saved, &sys, &f)?;
                return validation(saved, valid, probe_topological(&set, &sys, &f, &config)?);
            }
            let report = probe_topological(&set, &sys, &f, &config)?;
            Ok(probe_report("topological", set_json, report))
        }
        ProbeMode::Cross => {
            let f = family.ok_or_else(|| need("--family"))?;
            let sys = sys.ok_or_else(|| need("--system or --step"))?;
            let cc = cross_check(&set, &f, &sys, &config)?;
            let mut text = format!("Kronecker basis WP_{}(P) = {{{}}}\n", sys.max_step(), cc.basis.join(", "));
            text.push_str(&report_text(&cc.kronecker));
            text.push_str(&report_text(&cc.topological));
            writeln!(text, "overlap: {} witnesses", cc.overlap.len()).unwrap();
            if let Some(factor) = cc.observed_factor {
                writeln!(text, "observed factor max ‖q(n)β‖/ε over topological witnesses: {factor:.6}").unwrap();
            }
            writeln!(text, "found by one probe only: {}", cc.discrepancies.len()).unwrap();
            Ok(Report {
                command: "probe",
                fields: fields(vec![
                    ("mode", json!("cross")),
                    ("set", set_json),
                    ("cross_check", serde_json::to_value(&cc).expect("serializable")),
                ]),
                text,
            })
        }
    }
}

fn probe_report(mode: &str, set: Value, report: ProbeReport) -> Report {
    Report {
        command: "probe",
        text: report_text(&report),
        fields: fields(vec![
            ("mode", json!(mode)),
            ("set", set),
            ("report", serde_json::to_value(&report).expect("serializable")),
        ]),
    }
}

fn validation(saved: ProbeReport, witnesses_valid: bool, rerun: ProbeReport) -> Result<Report, CliError> {
    let reproduced = rerun.verdict == saved.verdict && rerun.witness_ns() == saved.witness_ns();
    let detail = json!({ "witnesses_valid": witnesses_valid, "reproduced": reproduced });
    if !(witnesses_valid && reproduced) {
        return Err(CliError {
            code: EXIT_VALIDATION,
            message: format!("validation failed: witnesses valid {witnesses_valid}, reproduced {reproduced}"),
            detail: Some(detail),
        });
    }
    Ok(Report {
        command: "probe",
        text: format!("validated {} witnesses; rerun reproduces the report\n", saved.witnesses.len()),
        fields: fields(vec![("validation", detail)]),
    })
}

pub fn average(o: &GlobalOpts, phases: &[String]) -> Result<Report, CliError> {
    let terms: Vec<PhaseTerm> = phases
        .iter()
        .map(|s| {
            let (q, rot) = s
                .split_once('@')
                .ok_or_else(|| CliError::config(format!("--phase expects <poly>@<rotation>, got '{s}'")))?;
            Ok(PhaseTerm { q: input::poly(q)?, rotation: input::rotation(o, rot)? })
        })
        .collect::<Result<_, CliError>>()?;
    let seq = if terms.is_empty() { Sequence::one() } else { Sequence::phases(terms) };
    let n_max = o.n.max(1);
    let checkpoints = ergodic_average_checkpoints(&seq, n_max)?;
    let mut text = String::from("N\tRe\tIm\t|avg|\n");
    for c in &checkpoints {
        writeln!(text, "{}\t{:+.9}\t{:+.9}\t{:.9}", c.n, c.re, c.im, c.abs).unwrap();
    }
    let mut out = fields(vec![
        ("phases", json!(phases)),
        ("n", json!(n_max)),
        ("checkpoints", serde_json::to_value(&checkpoints).expect("serializable")),
    ]);
    if o.shards > 1 {
        let z = ergodic_average_sharded(&seq, n_max, o.shards)?;
        writeln!(text, "sharded ({}): {:+.9} {:+.9}i", o.shards, z.re, z.im).unwrap();
        out.insert("sharded".into(), json!({ "shards": o.shards, "re": z.re, "im": z.im }));
    }
    Ok(Report { command: "average", fields: out, text })
}
