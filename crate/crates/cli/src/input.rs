use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Value};
use weylkit::dynamics::{parse_realization, Rotation, StandardWeylSystem};
use weylkit::polynomial::IntegralPolynomial;
use weylkit::recurrence::{Condition, RecurrenceSetSpec, SetKind};
use weylkit::weyl::PolyFamily;

use crate::error::CliError;
use crate::{GlobalOpts, SystemArgs};

pub fn family(text: &str) -> Result<PolyFamily, CliError> {
    Ok(PolyFamily::parse(text)?)
}

pub fn poly(text: &str) -> Result<IntegralPolynomial, CliError> {
    Ok(text.parse::<IntegralPolynomial>()?)
}

/// `--realize sym=spec` entries.
pub fn realizations(o: &GlobalOpts) -> Result<BTreeMap<String, BigRational>, CliError> {
    o.realize
        .iter()
        .map(|entry| {
            let (sym, spec) = entry
                .split_once('=')
                .ok_or_else(|| CliError::config(format!("--realize expects SYMBOL=SPEC, got '{entry}'")))?;
            Ok((sym.trim().to_string(), parse_realization(spec, o.precision)?))
        })
        .collect()
}

/// Rotation named `symbol`: realized by `--realize`, or by the symbol itself
/// when it is a realization spec such as `sqrt2` or `1/3`.
pub fn rotation(o: &GlobalOpts, symbol: &str) -> Result<Rotation, CliError> {
    let symbol = symbol.trim();
    if let Some(value) = realizations(o)?.remove(symbol) {
        return Ok(Rotation::realized(symbol, value));
    }
    Ok(match parse_realization(symbol, o.precision) {
        Ok(value) => Rotation::realized(symbol, value),
        Err(_) => Rotation::symbolic(symbol),
    })
}

pub fn system(o: &GlobalOpts, args: &SystemArgs) -> Result<StandardWeylSystem, CliError> {
    let text = match (&args.system, args.step) {
        (Some(s), _) if Path::new(s).is_file() => std::fs::read_to_string(s)
            .map_err(|e| CliError::config(format!("cannot read {s}: {e}")))?,
        (Some(s), _) => s.replace(';', "\n"),
        (None, Some(d)) => format!("factor d={d} alpha=a"),
        (None, None) => return Err(CliError::config("need --system or --step")),
    };
    let mut sys = StandardWeylSystem::parse(&text, o.precision)?;
    let symbols: Vec<String> = sys
        .factors()
        .iter()
        .filter(|f| f.rotation.realization.is_none())
        .map(|f| f.rotation.symbol.clone())
        .collect();
    for sym in symbols {
        if let Some(value) = rotation(o, &sym)?.realization {
            sys.realize(&sym, value);
        }
    }
    Ok(sys)
}

pub fn rational(o: &GlobalOpts, text: &str, what: &str) -> Result<BigRational, CliError> {
    parse_realization(text, o.precision).map_err(|_| CliError::config(format!("bad {what} '{text}'")))
}

pub fn epsilon(o: &GlobalOpts) -> Result<BigRational, CliError> {
    let eps = rational(o, &o.epsilon, "--epsilon")?;
    if eps <= BigRational::zero() {
        return Err(CliError::config("--epsilon must be positive"));
    }
    Ok(eps)
}

/// `full`, `list:5,7`, `threshold:<poly>:<rotation>:above=<t>` or
/// `threshold:<poly>:<rotation>:in=<lo>,<hi>`.
pub fn set_spec(o: &GlobalOpts, text: &str) -> Result<RecurrenceSetSpec, CliError> {
    let bad = || CliError::config(format!("bad --set '{text}'"));
    let horizon = o.horizon;
    if text == "full" {
        return Ok(RecurrenceSetSpec::full_range(horizon));
    }
    if let Some(list) = text.strip_prefix("list:") {
        let values = list
            .split(',')
            .map(|s| s.trim().parse::<i64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?;
        return Ok(RecurrenceSetSpec::explicit(values, horizon));
    }
    let rest = text.strip_prefix("threshold:").ok_or_else(bad)?;
    let mut parts = rest.rsplitn(3, ':');
    let (cond, rot, q) = match (parts.next(), parts.next(), parts.next()) {
        (Some(c), Some(r), Some(q)) => (c, r, q),
        _ => return Err(bad()),
    };
    let condition = if let Some(t) = cond.strip_prefix("above=") {
        Condition::DistanceAbove { t: rational(o, t, "threshold")? }
    } else if let Some(range) = cond.strip_prefix("in=") {
        let (lo, hi) = range.split_once(',').ok_or_else(bad)?;
        Condition::Interval { lo: rational(o, lo, "interval")?, hi: rational(o, hi, "interval")? }
    } else {
        return Err(bad());
    };
    Ok(RecurrenceSetSpec {
        kind: SetKind::Threshold { q: poly(q)?, rotation: rotation(o, rot)?, condition },
        horizon,
    })
}

/// Integer as a JSON number when it fits in `i64`, otherwise as a string.
pub fn int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(int).collect())
}

pub fn strings<T: ToString>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| json!(x.to_string())).collect())
}

pub fn joined<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}
