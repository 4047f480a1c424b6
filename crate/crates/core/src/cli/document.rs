//! Scenario documents: JSON ingestion with field-path errors, and the echo
//! form written back into result documents.

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{Map, Value};

use super::CliError;
use crate::hilbert::{FieldMode, Polarization, STRUCTURAL_TOL};
use crate::perturbation::{CouplingContext, TwoLevelAtom};
use crate::transactions::{Absorber, ResponseModel, Scenario};
use crate::FINE_STRUCTURE;

/// Norm deviations above this are renormalized with a warning.
pub const NORM_WARN_TOL: f64 = 1e-9;
/// Norm deviations above this are rejected.
pub const NORM_HARD_TOL: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmitterDoc {
    pub omega_lower: f64,
    pub omega_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AbsorberDoc {
    pub id: String,
    pub k_vec: [f64; 3],
    pub polarization: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponseModelDoc {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingDoc {
    pub e: f64,
    pub m: f64,
    pub volume: f64,
    #[serde(rename = "p_BA")]
    pub p_ba: [f64; 2],
}

/// The scenario schema, key for key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioDocument {
    pub emitter: EmitterDoc,
    pub absorbers: Vec<AbsorberDoc>,
    pub offer_amplitudes: Vec<[f64; 2]>,
    pub response_model: ResponseModelDoc,
    pub trials: u64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingDoc>,
}

impl ScenarioDocument {
    /// Echo form of a validated scenario. Parsing the result gives back an
    /// equal scenario.
    pub fn from_scenario(s: &Scenario) -> Self {
        let response_model = match s.response_model() {
            ResponseModel::Always => ResponseModelDoc {
                kind: "always".into(),
                p: None,
            },
            ResponseModel::Bernoulli { p } => ResponseModelDoc {
                kind: "bernoulli".into(),
                p: Some(p),
            },
        };
        Self {
            emitter: EmitterDoc {
                omega_lower: s.emitter().omega_lower(),
                omega_upper: s.emitter().omega_upper(),
            },
            absorbers: s
                .absorbers()
                .iter()
                .map(|a| AbsorberDoc {
                    id: a.id.clone(),
                    k_vec: a.mode.k_vec(),
                    polarization: a.mode.polarization().index(),
                })
                .collect(),
            offer_amplitudes: s.offer().amplitudes().iter().map(|c| [c.re, c.im]).collect(),
            response_model,
            trials: s.trials(),
            seed: s.seed(),
            coupling: s.coupling().map(|c| CouplingDoc {
                e: c.e,
                m: c.m,
                volume: c.volume,
                p_ba: [c.p_ba.re, c.p_ba.im],
            }),
        }
    }
}

/// A validated scenario with the notes produced while loading it.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedScenario {
    pub scenario: Scenario,
    pub warnings: Vec<String>,
}

/// Parses and validates a scenario document.
pub fn parse_scenario(bytes: &[u8]) -> Result<ParsedScenario, CliError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        CliError::new("invalid_utf8", format!("scenario is not valid UTF-8: {e}"))
            .with("byte_offset", e.valid_up_to())
    })?;
    let root: Value = serde_json::from_str(text).map_err(|e| {
        let offset = byte_offset(text, e.line(), e.column());
        CliError::new("json_parse", format!("malformed JSON: {e}"))
            .with("byte_offset", offset)
            .with("line", e.line())
            .with("column", e.column())
    })?;

    let obj = object(&root, "")?;
    reject_unknown(
        obj,
        "",
        &["emitter", "absorbers", "offer_amplitudes", "response_model", "trials", "seed", "coupling"],
    )?;

    let emitter_obj = object(required(obj, "", "emitter")?, "emitter")?;
    reject_unknown(emitter_obj, "emitter", &["omega_lower", "omega_upper"])?;
    let emitter = TwoLevelAtom::new(
        number(required(emitter_obj, "emitter", "omega_lower")?, "emitter.omega_lower")?,
        number(required(emitter_obj, "emitter", "omega_upper")?, "emitter.omega_upper")?,
    )
    .map_err(|e| CliError::from(e).with("path", "emitter"))?;

    let absorbers_val = array(required(obj, "", "absorbers")?, "absorbers")?;
    let mut absorbers = Vec::with_capacity(absorbers_val.len());
    for (i, a) in absorbers_val.iter().enumerate() {
        let path = format!("absorbers[{i}]");
        let a = object(a, &path)?;
        reject_unknown(a, &path, &["id", "k_vec", "polarization"])?;
        let id = required(a, &path, "id")?
            .as_str()
            .ok_or_else(|| schema(&format!("{path}.id"), "expected a string"))?;
        let k_vec = vector3(required(a, &path, "k_vec")?, &format!("{path}.k_vec"))?;
        let pol_path = format!("{path}.polarization");
        let pol = required(a, &path, "polarization")?
            .as_u64()
            .filter(|p| *p == 1 || *p == 2)
            .ok_or_else(|| schema(&pol_path, "expected 1 or 2"))?;
        let polarization = Polarization::from_index(pol as u8).map_err(|e| CliError::from(e).with("path", pol_path))?;
        let mode = FieldMode::new(k_vec, polarization).map_err(|e| CliError::from(e).with("path", format!("{path}.k_vec")))?;
        absorbers.push(Absorber::new(id, mode));
    }

    let amps_val = array(required(obj, "", "offer_amplitudes")?, "offer_amplitudes")?;
    let mut amplitudes = Vec::with_capacity(amps_val.len());
    for (i, v) in amps_val.iter().enumerate() {
        let [re, im] = pair(v, &format!("offer_amplitudes[{i}]"))?;
        amplitudes.push(Complex64::new(re, im));
    }
    if amplitudes.len() != absorbers.len() {
        return Err(schema(
            "offer_amplitudes",
            &format!("{} amplitudes for {} absorbers", amplitudes.len(), absorbers.len()),
        ));
    }

    let model_obj = object(required(obj, "", "response_model")?, "response_model")?;
    reject_unknown(model_obj, "response_model", &["kind", "p"])?;
    let kind = required(model_obj, "response_model", "kind")?
        .as_str()
        .ok_or_else(|| schema("response_model.kind", "expected a string"))?;
    let p = model_obj.get("p").map(|v| number(v, "response_model.p")).transpose()?;
    let response_model = match (kind, p) {
        ("always", None) => ResponseModel::Always,
        ("always", Some(_)) => return Err(schema("response_model.p", "not allowed for kind \"always\"")),
        ("bernoulli", p) => ResponseModel::Bernoulli {
            p: p.unwrap_or(FINE_STRUCTURE),
        },
        (other, _) => {
            return Err(schema(
                "response_model.kind",
                &format!("unknown kind {other:?}, expected \"always\" or \"bernoulli\""),
            ))
        }
    };

    let trials = unsigned(required(obj, "", "trials")?, "trials")?;
    let seed = unsigned(required(obj, "", "seed")?, "seed")?;

    let coupling = match obj.get("coupling") {
        None => None,
        Some(v) => {
            let c = object(v, "coupling")?;
            reject_unknown(c, "coupling", &["e", "m", "volume", "p_BA"])?;
            let [re, im] = pair(required(c, "coupling", "p_BA")?, "coupling.p_BA")?;
            Some(
                CouplingContext::new(
                    number(required(c, "coupling", "e")?, "coupling.e")?,
                    number(required(c, "coupling", "m")?, "coupling.m")?,
                    number(required(c, "coupling", "volume")?, "coupling.volume")?,
                    Complex64::new(re, im),
                )
                .map_err(|e| CliError::from(e).with("path", "coupling"))?,
            )
        }
    };

    let mut warnings = Vec::new();
    let norm_sqr: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
    let deviation = (norm_sqr.sqrt() - 1.0).abs();
    if deviation > NORM_HARD_TOL {
        return Err(CliError::new(
            "not_normalized",
            format!(
                "offer amplitudes have norm {}, more than {NORM_HARD_TOL} from 1",
                norm_sqr.sqrt()
            ),
        )
        .with("path", "offer_amplitudes")
        .with("norm", norm_sqr.sqrt()));
    }
    if deviation > NORM_WARN_TOL {
        warnings.push(format!(
            "offer_amplitudes: norm {} renormalized to 1",
            norm_sqr.sqrt()
        ));
    }
    if (norm_sqr - 1.0).abs() > STRUCTURAL_TOL {
        let n = norm_sqr.sqrt();
        for c in &mut amplitudes {
            *c /= n;
        }
    }

    let mut scenario = Scenario::new(emitter, absorbers, amplitudes, response_model, trials, seed)
        .map_err(CliError::from)?;
    if let Some(c) = coupling {
        scenario = scenario.with_coupling(c);
    }
    Ok(ParsedScenario { scenario, warnings })
}

/// serde_json reports 1-based line and column; convert to a byte offset.
fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let line_start: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (line_start + column.saturating_sub(1)).min(text.len())
}

fn join(parent: &str, key: &str) -> String {
    if parent.is_empty() {
        key.to_string()
    } else {
        format!("{parent}.{key}")
    }
}

fn schema(path: &str, message: &str) -> CliError {
    let shown = if path.is_empty() { "<root>" } else { path };
    CliError::new("schema", format!("{shown}: {message}")).with("path", path)
}

fn required<'a>(obj: &'a Map<String, Value>, parent: &str, key: &str) -> Result<&'a Value, CliError> {
    obj.get(key)
        .ok_or_else(|| schema(&join(parent, key), "missing required field"))
}

fn reject_unknown(obj: &Map<String, Value>, parent: &str, allowed: &[&str]) -> Result<(), CliError> {
    match obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        Some(k) => Err(schema(&join(parent, k), "unknown field")),
        None => Ok(()),
    }
}

fn object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, CliError> {
    v.as_object().ok_or_else(|| schema(path, "expected an object"))
}

fn array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, CliError> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn number(v: &Value, path: &str) -> Result<f64, CliError> {
    v.as_f64()
        .filter(|x| x.is_finite())
        .ok_or_else(|| schema(path, "expected a finite number"))
}

fn unsigned(v: &Value, path: &str) -> Result<u64, CliError> {
    v.as_u64()
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn pair(v: &Value, path: &str) -> Result<[f64; 2], CliError> {
    let a = array(v, path)?;
    if a.len() != 2 {
        return Err(schema(path, "expected [re, im]"));
    }
    Ok([number(&a[0], &format!("{path}[0]"))?, number(&a[1], &format!("{path}[1]"))?])
}

fn vector3(v: &Value, path: &str) -> Result<[f64; 3], CliError> {
    let a = array(v, path)?;
    if a.len() != 3 {
        return Err(schema(path, "expected three components"));
    }
    let mut out = [0.0; 3];
    for (i, x) in a.iter().enumerate() {
        out[i] = number(x, &format!("{path}[{i}]"))?;
    }
    Ok(out)
}
