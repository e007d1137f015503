//! JSON file formats. Rationals are written as lowest-terms fraction strings;
//! on input they may also be decimal strings, integers or floats (floats go
//! through the [`RationalizationPolicy`]).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::censorship::{
    compute_compatibility, validate_distribution, MeasurementSuite, SetupDistribution, VerificationReport,
};
use crate::ch::ChReport;
use crate::error::{Error, Result};
use crate::index::IndexSet;
use crate::polytope::{CorrelationVector, MembershipVerdict, VertexLabel};
use crate::quantum::{Complex, DensityOperator, Operator, Projector};
use crate::rational::{parse_rational, Rational, RationalizationPolicy};
use crate::space::KolmogorovSpace;

fn parse_err(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

/// Reads a probability-like value from JSON.
pub fn rational_from_json(value: &Value, policy: &RationalizationPolicy) -> Result<Rational> {
    match value {
        Value::String(s) => parse_rational(s),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else if let Some(u) = n.as_u64() {
                Ok(Rational::from_integer(u.into()))
            } else {
                policy.from_file_float(n.as_f64().expect("json number"))
            }
        }
        other => Err(Error::Parse(format!("expected a number or fraction string, got {other}"))),
    }
}

fn one_based_set(indices: &[usize], n: usize) -> Result<IndexSet> {
    let mut set = IndexSet::EMPTY;
    for &i in indices {
        if i == 0 || i > n {
            return Err(Error::InvalidScheme(format!("index {i} outside 1..={n}")));
        }
        set = set.with(i - 1);
    }
    Ok(set)
}

// ---------------------------------------------------------------- matrices

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn to_operator(&self) -> Result<Operator> {
        if self.entries.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                found: self.entries.len(),
            });
        }
        Operator::from_rows(
            self.entries
                .iter()
                .map(|row| row.iter().map(|[re, im]| Complex::new(*re, *im)).collect())
                .collect(),
        )
    }

    pub fn from_operator(op: &Operator) -> Self {
        Self {
            dim: op.dim(),
            entries: op.rows().map(|r| r.iter().map(|z| [z.re, z.im]).collect()).collect(),
        }
    }
}

// ---------------------------------------------------------------- vectors

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VectorEntry {
    #[serde(rename = "I")]
    set: Vec<usize>,
    p: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct VectorFile {
    n: usize,
    /// Legacy layout: single-event probabilities listed positionally.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    singles: Option<Vec<Value>>,
    #[serde(default)]
    entries: Vec<VectorEntry>,
}

pub fn parse_vector(text: &str, policy: &RationalizationPolicy) -> Result<CorrelationVector> {
    let file: VectorFile = serde_json::from_str(text).map_err(parse_err)?;
    let mut entries = Vec::new();
    if let Some(singles) = &file.singles {
        if singles.len() != file.n {
            return Err(Error::InvalidScheme(format!(
                "{} single probabilities for n = {}",
                singles.len(),
                file.n
            )));
        }
        for (i, v) in singles.iter().enumerate() {
            entries.push((IndexSet::singleton(i), rational_from_json(v, policy)?));
        }
    }
    for e in &file.entries {
        if e.set.is_empty() {
            return Err(Error::InvalidScheme("empty conjunction".into()));
        }
        entries.push((one_based_set(&e.set, file.n)?, rational_from_json(&e.p, policy)?));
    }
    CorrelationVector::from_entries(file.n, entries)
}

pub fn vector_to_json(p: &CorrelationVector) -> Value {
    json!({
        "n": p.scheme().n(),
        "entries": p.iter().map(|(s, v)| json!({"I": s.to_one_based(), "p": v.to_string()})).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- verdicts and reports

pub fn verdict_to_json(p: &CorrelationVector, verdict: &MembershipVerdict) -> Value {
    match verdict {
        MembershipVerdict::Inside { weights } => json!({
            "verdict": "inside",
            "weights": weights.iter().map(|(e, w)| json!({"eps": e.bits(), "weight": w.to_string()})).collect::<Vec<_>>(),
        }),
        MembershipVerdict::Outside { certificate } => json!({
            "verdict": "outside",
            "certificate": {
                "constant": certificate.constant.to_string(),
                "coefficients": p.scheme().sets().iter().zip(&certificate.coefficients)
                    .map(|(s, c)| json!({"I": s.to_one_based(), "c": c.to_string()}))
                    .collect::<Vec<_>>(),
                "value_at_p": certificate.apply(p.values()).to_string(),
                "max_over_vertices": certificate.max_over_vertices(p.scheme()).to_string(),
            },
        }),
    }
}

pub fn ch_report_to_json(report: &ChReport) -> Value {
    json!({
        "holds": report.holds,
        "rows": report.rows.iter().map(|r| json!({
            "label": r.label,
            "family": r.family,
            "value": r.value.to_string(),
            "lower": r.lower.as_ref().map(ToString::to_string),
            "upper": r.upper.as_ref().map(ToString::to_string),
            "satisfied": r.satisfied,
            "slack": r.slack.to_string(),
        })).collect::<Vec<_>>(),
    })
}

pub fn verification_to_json(report: &VerificationReport, suite: &MeasurementSuite) -> Value {
    let names = |s: IndexSet, switch: bool| -> Vec<String> {
        s.iter()
            .map(|i| {
                let m = &suite.measurements()[i];
                if switch { m.switch_name.clone() } else { m.name.clone() }
            })
            .collect()
    };
    json!({
        "max_order": report.max_order,
        "checked": report.checked,
        "exact": report.exact,
        "passed": report.passed(),
        "mismatches": report.mismatches.iter().map(|m| json!({
            "outcomes": names(m.outcomes, false),
            "switches": names(m.switches, true),
            "space": m.space_value.to_string(),
            "effective": m.effective_value.to_string(),
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- suites and distributions

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurementJson {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub switch: Option<String>,
    pub projector: MatrixJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteJson {
    pub dim: usize,
    pub density: MatrixJson,
    pub measurements: Vec<MeasurementJson>,
}

pub fn parse_suite(text: &str) -> Result<MeasurementSuite> {
    let file: SuiteJson = serde_json::from_str(text).map_err(parse_err)?;
    let density = DensityOperator::new(file.density.to_operator()?)?;
    if density.dim() != file.dim {
        return Err(Error::DimMismatch {
            expected: file.dim,
            found: density.dim(),
        });
    }
    let measurements = file
        .measurements
        .into_iter()
        .map(|m| {
            let p = Projector::new(m.projector.to_operator()?).map_err(|e| match e {
                Error::InvalidOperator { reason, .. } => Error::InvalidOperator {
                    kind: "projector",
                    reason: format!("measurement `{}`: {reason}", m.name),
                },
                other => other,
            })?;
            Ok((m.name, m.switch, p))
        })
        .collect::<Result<Vec<_>>>()?;
    MeasurementSuite::with_switch_names(density, measurements)
}

pub fn suite_to_json(suite: &MeasurementSuite) -> Value {
    serde_json::to_value(SuiteJson {
        dim: suite.dim(),
        density: MatrixJson::from_operator(suite.density().as_operator()),
        measurements: suite
            .measurements()
            .iter()
            .map(|m| MeasurementJson {
                name: m.name.clone(),
                switch: Some(m.switch_name.clone()),
                projector: MatrixJson::from_operator(m.projector.as_operator()),
            })
            .collect(),
    })
    .expect("serializable")
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ContextJson {
    members: Vec<String>,
    weight: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DistributionJson {
    contexts: Vec<ContextJson>,
}

/// Raw κ entries, not yet checked against compatibility.
pub fn parse_distribution_entries(
    text: &str,
    suite: &MeasurementSuite,
    policy: &RationalizationPolicy,
) -> Result<Vec<(IndexSet, Rational)>> {
    let file: DistributionJson = serde_json::from_str(text).map_err(parse_err)?;
    file.contexts
        .iter()
        .map(|c| Ok((suite.context(&c.members)?, rational_from_json(&c.weight, policy)?)))
        .collect()
}

pub fn parse_distribution(
    text: &str,
    suite: &MeasurementSuite,
    policy: &RationalizationPolicy,
) -> Result<SetupDistribution> {
    let entries = parse_distribution_entries(text, suite, policy)?;
    validate_distribution(&entries, &compute_compatibility(suite), |s| suite.context_label(s))
}

pub fn distribution_to_json(kappa: &SetupDistribution, suite: &MeasurementSuite) -> Value {
    json!({
        "contexts": kappa.weights().map(|(s, w)| json!({
            "members": s.iter().map(|i| suite.measurements()[i].name.clone()).collect::<Vec<_>>(),
            "weight": w.to_string(),
        })).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- spaces

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PointJson {
    id: String,
    mass: String,
    events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct SpaceJson {
    events: Vec<String>,
    points: Vec<PointJson>,
}

pub fn space_to_json(space: &KolmogorovSpace) -> Value {
    let file = SpaceJson {
        events: space.event_names().map(str::to_string).collect(),
        points: (0..space.len())
            .map(|k| PointJson {
                id: space.points()[k].clone(),
                mass: space.masses()[k].to_string(),
                events: space.events_of(k).into_iter().map(str::to_string).collect(),
            })
            .collect(),
    };
    serde_json::to_value(file).expect("serializable")
}

pub fn parse_space(text: &str) -> Result<KolmogorovSpace> {
    let file: SpaceJson = serde_json::from_str(text).map_err(parse_err)?;
    let mut events: BTreeMap<String, Vec<usize>> = file.events.iter().map(|e| (e.clone(), Vec::new())).collect();
    let mut points = Vec::new();
    let mut masses = Vec::new();
    for (k, p) in file.points.iter().enumerate() {
        points.push(p.id.clone());
        masses.push(parse_rational(&p.mass)?);
        for e in &p.events {
            events
                .get_mut(e)
                .ok_or_else(|| Error::UnknownEvent(e.clone()))?
                .push(k);
        }
    }
    KolmogorovSpace::new(points, masses, events)
}

// ---------------------------------------------------------------- weights

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeightEntry {
    eps: Value,
    weight: Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct WeightsJson {
    n: usize,
    #[serde(default)]
    names: Option<Vec<String>>,
    weights: Vec<WeightEntry>,
}

/// Parsed weights file: `ε` as a bit array or bit string, optional event names.
pub struct WeightsInput {
    pub n: usize,
    pub names: Option<Vec<String>>,
    pub weights: Vec<(VertexLabel, Rational)>,
}

pub fn parse_weights(text: &str, policy: &RationalizationPolicy) -> Result<WeightsInput> {
    let file: WeightsJson = serde_json::from_str(text).map_err(parse_err)?;
    let weights = file
        .weights
        .iter()
        .map(|w| {
            let bits: Vec<u8> = match &w.eps {
                Value::String(s) => s
                    .chars()
                    .map(|c| match c {
                        '0' => Ok(0),
                        '1' => Ok(1),
                        _ => Err(Error::Parse(format!("bad vertex bit `{c}`"))),
                    })
                    .collect::<Result<_>>()?,
                Value::Array(a) => a
                    .iter()
                    .map(|b| b.as_u64().filter(|b| *b <= 1).map(|b| b as u8).ok_or_else(|| Error::Parse(format!("bad vertex bit {b}"))))
                    .collect::<Result<_>>()?,
                other => return Err(Error::Parse(format!("bad vertex label {other}"))),
            };
            if bits.len() != file.n {
                return Err(Error::SchemeMismatch(format!("vertex of length {} for n = {}", bits.len(), file.n)));
            }
            Ok((VertexLabel::from_bits(&bits)?, rational_from_json(&w.weight, policy)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(WeightsInput {
        n: file.n,
        names: file.names,
        weights,
    })
}

pub fn weights_to_json(n: usize, weights: &[(VertexLabel, Rational)]) -> Value {
    json!({
        "n": n,
        "weights": weights.iter().map(|(e, w)| json!({"eps": e.to_string(), "weight": w.to_string()})).collect::<Vec<_>>(),
    })
}

// ---------------------------------------------------------------- queries

#[derive(Debug, Clone, Serialize, Deserialize)]
struct QueryJson {
    #[serde(default)]
    outcomes: Vec<String>,
    #[serde(default)]
    switches: Vec<String>,
}

/// `[{"outcomes": ["A"], "switches": ["B"]}]`; switch entries may use either
/// the measurement name or its switch-event name.
pub fn parse_queries(text: &str, suite: &MeasurementSuite) -> Result<Vec<(IndexSet, IndexSet)>> {
    let file: Vec<QueryJson> = serde_json::from_str(text).map_err(parse_err)?;
    let switch_index = |name: &str| -> Result<usize> {
        suite
            .measurements()
            .iter()
            .position(|m| m.switch_name == name || m.name == name)
            .ok_or_else(|| Error::UnknownEvent(name.to_string()))
    };
    file.iter()
        .map(|q| {
            let outcomes = suite.context(&q.outcomes)?;
            let switches = q
                .switches
                .iter()
                .try_fold(IndexSet::EMPTY, |acc, s| Ok::<_, Error>(acc.with(switch_index(s)?)))?;
            Ok((outcomes, switches))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polytope::ConjunctionScheme;
    use crate::rational::rat;

    #[test]
    fn parses_mixed_value_forms() {
        let text = r#"{"n": 2, "entries": [
            {"I": [1], "p": "1/2"}, {"I": [2], "p": 0.25}, {"I": [1, 2], "p": "0.125"}, {"I": [2, 1], "p": 0}
        ]}"#;
        let err = parse_vector(text, &RationalizationPolicy::default()).unwrap_err();
        assert!(matches!(err, Error::InvalidScheme(_)), "{err:?}");
        let text = r#"{"n": 2, "entries": [
            {"I": [1], "p": "1/2"}, {"I": [2], "p": 0.25}, {"I": [1, 2], "p": "0.125"}
        ]}"#;
        let v = parse_vector(text, &RationalizationPolicy::default()).unwrap();
        assert_eq!(v.values(), &[rat(1, 2), rat(1, 4), rat(1, 8)]);
    }

    #[test]
    fn legacy_layout_is_normalized() {
        let text = r#"{"n": 2, "singles": ["1/2", "1/2"], "entries": [{"I": [1, 2], "p": "1/4"}]}"#;
        let v = parse_vector(text, &RationalizationPolicy::default()).unwrap();
        assert_eq!(v.scheme(), &ConjunctionScheme::with_singletons(2, [IndexSet::full(2)]).unwrap());
    }

    #[test]
    fn vector_json_round_trips() {
        let text = r#"{"n": 3, "entries": [{"I": [1,2,3], "p": "-7/32"}, {"I": [2], "p": "5"}]}"#;
        let v = parse_vector(text, &RationalizationPolicy::default()).unwrap();
        let again = parse_vector(&vector_to_json(&v).to_string(), &RationalizationPolicy::default()).unwrap();
        assert_eq!(v, again);
    }

    #[test]
    fn rejects_bad_indices_and_values() {
        let p = RationalizationPolicy::default();
        assert!(parse_vector(r#"{"n": 2, "entries": [{"I": [3], "p": "1"}]}"#, &p).is_err());
        assert!(parse_vector(r#"{"n": 2, "entries": [{"I": [1], "p": true}]}"#, &p).is_err());
        assert!(parse_vector(r#"{"n": 2, "entries": [{"I": [], "p": 1}]}"#, &p).is_err());
        assert!(parse_vector("not json", &p).is_err());
    }

    #[test]
    fn space_json_round_trips() {
        let space = KolmogorovSpace::new(
            vec!["x".into(), "y".into()],
            vec![rat(1, 3), rat(2, 3)],
            BTreeMap::from([("E".into(), vec![1]), ("F".into(), vec![])]),
        )
        .unwrap();
        let again = parse_space(&space_to_json(&space).to_string()).unwrap();
        assert_eq!(space, again);
    }
}
