//! Reading distributions, observations, rules and grids from files or inline JSON.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use properscore::{DiscreteDistribution, DistGrid, Distribution, RuleSpec, WeightSpec};
use serde_json::{Map, Value};

/// Inline JSON when the argument starts with `{`, otherwise a path to a JSON file.
pub fn json_arg(arg: &str) -> Result<Value> {
    let text = if arg.trim_start().starts_with('{') {
        arg.to_string()
    } else {
        fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?
    };
    serde_json::from_str(&text).with_context(|| format!("parsing JSON from {arg}"))
}

pub fn distribution(arg: &str) -> Result<Distribution> {
    serde_json::from_value(json_arg(arg)?).with_context(|| format!("invalid distribution {arg}"))
}

/// Either a continuous/atomic distribution or a `{"kind":"discrete",…}` one.
pub enum AnyDistribution {
    Real(Distribution),
    Discrete(DiscreteDistribution),
}

pub fn any_distribution(arg: &str) -> Result<AnyDistribution> {
    let v = json_arg(arg)?;
    if v.get("kind").and_then(Value::as_str) == Some("discrete") {
        Ok(AnyDistribution::Discrete(serde_json::from_value(v).with_context(|| format!("invalid distribution {arg}"))?))
    } else {
        Ok(AnyDistribution::Real(serde_json::from_value(v).with_context(|| format!("invalid distribution {arg}"))?))
    }
}

pub fn weight(arg: Option<&str>) -> Result<Option<WeightSpec>> {
    arg.map(|a| serde_json::from_value(json_arg(a)?).with_context(|| format!("invalid weight {a}")))
        .transpose()
}

/// `--rule` is a rule name or a rule JSON object; `--alpha` and `--weight` fill in or override.
pub fn rule(name_or_json: &str, alpha: Option<f64>, weight: Option<&str>) -> Result<RuleSpec> {
    let mut obj = if name_or_json.trim_start().starts_with('{') {
        match json_arg(name_or_json)? {
            Value::Object(m) => m,
            _ => bail!("--rule JSON must be an object"),
        }
    } else {
        let mut m = Map::new();
        m.insert("rule".into(), Value::String(name_or_json.trim().to_string()));
        m
    };
    if let Some(a) = alpha {
        obj.insert("alpha".into(), serde_json::to_value(a)?);
    }
    if let Some(w) = weight {
        obj.insert("weight".into(), json_arg(w)?);
    }
    serde_json::from_value(Value::Object(obj)).map_err(|e| anyhow!("invalid rule: {e}"))
}

pub fn grid(arg: &str) -> Result<DistGrid> {
    serde_json::from_value(json_arg(arg)?).map_err(|e| anyhow!("invalid grid {arg}: {e}"))
}

/// One distribution per non-empty line.
pub fn forecasts_jsonl(path: &Path) -> Result<Vec<Distribution>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let d: Distribution = serde_json::from_str(line)
            .with_context(|| format!("{} line {}: invalid distribution", path.display(), i + 1))?;
        out.push(d);
    }
    if out.is_empty() {
        bail!("no forecasts in {}", path.display());
    }
    Ok(out)
}

/// First column of a CSV file; a non-numeric first row is taken as a header.
pub fn observations_csv(path: &Path) -> Result<Vec<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.with_context(|| format!("{} row {}", path.display(), i + 1))?;
        let Some(field) = rec.get(0).filter(|f| !f.is_empty()) else {
            bail!("{} row {}: empty field", path.display(), i + 1);
        };
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => bail!("{} row {}: observation must be finite", path.display(), i + 1),
            Err(_) if i == 0 => continue,
            Err(_) => bail!("{} row {}: not a number: {field:?}", path.display(), i + 1),
        }
    }
    if out.is_empty() {
        bail!("no observations");
    }
    Ok(out)
}

/// `lo:hi:n`, `n ≥ 2` equally spaced points.
pub fn x_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        bail!("grid must look like lo:hi:n, got {spec:?}");
    };
    let (lo, hi): (f64, f64) = (lo.parse()?, hi.parse()?);
    let n: usize = n.parse()?;
    if !(lo.is_finite() && hi.is_finite() && lo < hi) || n < 2 {
        bail!("grid needs finite lo < hi and n >= 2");
    }
    Ok((0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect())
}
