//! Canonical JSON scene files.

use serde::{Deserialize, Serialize};

use super::{DComponent, EComponent, Host, Scene};
use crate::algebra::{format_rational, parse_rational, Chart, Coeff, Polynomial};
use crate::error::{Error, Result};

pub const SCENE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    version: u32,
    coords: Vec<String>,
    #[serde(rename = "X")]
    x: Vec<String>,
    #[serde(rename = "D", default)]
    d: Vec<DFile>,
    #[serde(rename = "E", default)]
    e: Vec<EFile>,
    #[serde(default)]
    probes: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    units: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum HostFile {
    Single(usize),
    Pair([usize; 2]),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Mult {
    Text(String),
    Int(i64),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DFile {
    host: HostFile,
    factors: Vec<String>,
    mult: Mult,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    poly: Option<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EFile {
    name: String,
    origin: String,
}

fn field_error(path: &str, e: Error) -> Error {
    match e {
        Error::Parse {
            line,
            column,
            message,
        } => Error::Parse {
            line,
            column,
            message: format!("{path}: {message}"),
        },
        other => Error::Invalid(format!("{path}: {other}")),
    }
}

fn poly(chart: &Chart, path: &str, text: &str) -> Result<Polynomial> {
    Polynomial::parse(chart, text).map_err(|e| field_error(path, e))
}

pub fn from_json(text: &str) -> Result<Scene> {
    let file: SceneFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    if file.version != SCENE_VERSION {
        return Err(Error::Invalid(format!("unsupported scene version {}", file.version)));
    }
    let chart = Chart::new(&file.coords)?;
    for name in &file.x {
        if chart.index(name).is_none() {
            return Err(Error::Invalid(format!("X coordinate {name:?} not in coords")));
        }
    }
    let mut d = Vec::with_capacity(file.d.len());
    for (k, rec) in file.d.iter().enumerate() {
        let host = match rec.host {
            HostFile::Single(i) => Host::Single(i),
            HostFile::Pair([i, j]) => Host::Pair(i, j),
        };
        for i in host.indices() {
            if i >= file.x.len() {
                return Err(Error::Invalid(format!("D[{k}].host: no X component {i}")));
            }
        }
        let factors = rec
            .factors
            .iter()
            .enumerate()
            .map(|(s, f)| poly(&chart, &format!("D[{k}].factors[{s}]"), f))
            .collect::<Result<Vec<_>>>()?;
        let mult = match &rec.mult {
            Mult::Text(s) => parse_rational(s).map_err(|e| field_error(&format!("D[{k}].mult"), e))?,
            Mult::Int(v) => Coeff::from_integer((*v).into()),
        };
        let declared = match &rec.poly {
            Some(p) => Some(poly(&chart, &format!("D[{k}].poly"), p)?),
            None => None,
        };
        d.push(DComponent {
            host,
            factors,
            mult,
            declared,
        });
    }
    for c in &file.e {
        if chart.index(&c.name).is_none() {
            return Err(Error::Invalid(format!("E coordinate {:?} not in coords", c.name)));
        }
    }
    let mut probes = Vec::with_capacity(file.probes.len());
    for (k, p) in file.probes.iter().enumerate() {
        if p.len() != chart.dim() {
            return Err(Error::Invalid(format!(
                "probes[{k}] has {} entries, expected {}",
                p.len(),
                chart.dim()
            )));
        }
        probes.push(
            p.iter()
                .map(|s| parse_rational(s).map_err(|e| field_error(&format!("probes[{k}]"), e)))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let units = file
        .units
        .iter()
        .enumerate()
        .map(|(k, u)| poly(&chart, &format!("units[{k}]"), u))
        .collect::<Result<Vec<_>>>()?;
    Ok(Scene {
        units,
        chart,
        x: file.x,
        d,
        e: file
            .e
            .into_iter()
            .map(|c| EComponent {
                name: c.name,
                origin: c.origin,
            })
            .collect(),
        probes,
    })
}

fn to_file(s: &Scene) -> SceneFile {
    SceneFile {
        version: SCENE_VERSION,
        coords: s.chart.names().to_vec(),
        x: s.x.clone(),
        d: s
            .d
            .iter()
            .map(|r| DFile {
                host: match r.host {
                    Host::Single(i) => HostFile::Single(i),
                    Host::Pair(i, j) => HostFile::Pair([i, j]),
                },
                factors: r.factors.iter().map(|f| f.to_string()).collect(),
                mult: Mult::Text(format_rational(&r.mult)),
                poly: r.declared.as_ref().map(|p| p.to_string()),
            })
            .collect(),
        e: s
            .e
            .iter()
            .map(|c| EFile {
                name: c.name.clone(),
                origin: c.origin.clone(),
            })
            .collect(),
        probes: s
            .probes
            .iter()
            .map(|p| p.iter().map(format_rational).collect())
            .collect(),
        units: s.units.iter().map(|u| u.to_string()).collect(),
    }
}

/// Canonical pretty-printed JSON with a trailing newline.
pub fn to_json(s: &Scene) -> String {
    let mut out = serde_json::to_string_pretty(&to_file(s)).expect("scene serializes");
    out.push('\n');
    out
}

pub fn to_value(s: &Scene) -> serde_json::Value {
    serde_json::to_value(to_file(s)).expect("scene serializes")
}
