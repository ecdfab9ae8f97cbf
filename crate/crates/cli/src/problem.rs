//! Problem files: JSON with every number written as a string "p/q".

use std::path::Path;

use hodgekit_core::exactmath::{parse_rational, FieldElement, MatrixQ, NumberField, QPoly, Rational};
use hodgekit_core::ksympl::KSymplecticCandidate;
use hodgekit_core::perdom::PeriodPath;
use hodgekit_core::qforms::QuadraticSpace;
use serde::Deserialize;
use thiserror::Error;

pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed file: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0:?} (expected {FORMAT_VERSION:?})")]
    Version(String),
    #[error("expected kind {expected:?}, file has {got:?}")]
    Kind { expected: &'static str, got: String },
    #[error("unknown kind {0:?}")]
    UnknownKind(String),
    #[error("{field}: {msg}")]
    Field { field: String, msg: String },
    #[error("{field}: {msg}")]
    Invalid { field: String, kind: String, msg: String },
}

/// Name of the enum variant behind an error, e.g. `NotSymmetric`.
pub fn variant_name(e: &impl std::fmt::Debug) -> String {
    format!("{e:?}").split(['(', ' ', '{']).next().unwrap_or_default().to_string()
}

fn invalid<E: std::fmt::Debug + std::fmt::Display>(field: impl Into<String>, e: E) -> ProblemError {
    ProblemError::Invalid {
        field: field.into(),
        kind: variant_name(&e),
        msg: e.to_string(),
    }
}

fn bad(field: impl Into<String>, msg: impl Into<String>) -> ProblemError {
    ProblemError::Field {
        field: field.into(),
        msg: msg.into(),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Envelope {
    version: String,
    kind: String,
    payload: serde_json::Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct K3PeriodPayload {
    gram: Vec<Vec<String>>,
    field: Vec<String>,
    embedding: String,
    omega: Vec<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KSymplecticPayload {
    matrices: Vec<Vec<Vec<String>>>,
    #[serde(default)]
    base_point: Option<Vec<String>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundsPayload {
    d: String,
    #[serde(default)]
    e: Option<String>,
    #[serde(default)]
    dim_h1: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PathPayload {
    gram: Vec<Vec<String>>,
    coords: Vec<Vec<String>>,
}

pub struct K3PeriodProblem {
    pub space: QuadraticSpace,
    pub field: NumberField,
    pub embedding: usize,
    pub omega: Vec<FieldElement>,
}

pub struct KSymplecticProblem {
    pub candidate: KSymplecticCandidate,
    pub base_point: Option<Vec<Rational>>,
}

pub struct BoundsProblem {
    pub d: u64,
    pub e: Option<u64>,
    pub dim_h1: Option<u64>,
}

pub enum Problem {
    K3Period(K3PeriodProblem),
    KSymplectic(KSymplecticProblem),
    Bounds(BoundsProblem),
    Path(PeriodPath),
}

impl Problem {
    pub fn kind(&self) -> &'static str {
        match self {
            Problem::K3Period(_) => "k3period",
            Problem::KSymplectic(_) => "ksymplectic",
            Problem::Bounds(_) => "bounds",
            Problem::Path(_) => "path",
        }
    }
}

fn rational(field: &str, s: &str) -> Result<Rational, ProblemError> {
    parse_rational(s).map_err(|e| bad(field, e.to_string()))
}

fn rationals(field: &str, xs: &[String]) -> Result<Vec<Rational>, ProblemError> {
    xs.iter()
        .enumerate()
        .map(|(i, s)| rational(&format!("{field}[{i}]"), s))
        .collect()
}

fn integer(field: &str, s: &str) -> Result<u64, ProblemError> {
    s.parse::<u64>()
        .map_err(|_| bad(field, format!("expected a non-negative integer, got {s:?}")))
}

fn matrix(field: &str, rows: &[Vec<String>]) -> Result<MatrixQ, ProblemError> {
    let n = rows.first().map_or(0, |r| r.len());
    let mut data = Vec::with_capacity(rows.len());
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(bad(field, format!("row {i} has {} entries, expected {n}", r.len())));
        }
        data.push(rationals(&format!("{field}[{i}]"), r)?);
    }
    Ok(MatrixQ::from_rows(data, n))
}

fn space(field: &str, rows: &[Vec<String>]) -> Result<QuadraticSpace, ProblemError> {
    QuadraticSpace::new(matrix(field, rows)?).map_err(|e| invalid(field, e))
}

fn parse_k3(p: K3PeriodPayload) -> Result<K3PeriodProblem, ProblemError> {
    let space = space("gram", &p.gram)?;
    let poly = QPoly::new(rationals("field", &p.field)?);
    let field = NumberField::new(poly).map_err(|e| invalid("field", e))?;
    let embedding = integer("embedding", &p.embedding)? as usize;
    let mut omega = Vec::with_capacity(p.omega.len());
    for (i, c) in p.omega.iter().enumerate() {
        let name = format!("omega[{i}]");
        let cs = rationals(&name, c)?;
        if cs.len() > field.degree() {
            return Err(bad(name, format!("{} coefficients for a field of degree {}", cs.len(), field.degree())));
        }
        omega.push(field.element(cs));
    }
    Ok(K3PeriodProblem {
        space,
        field,
        embedding,
        omega,
    })
}

fn parse_ksympl(p: KSymplecticPayload) -> Result<KSymplecticProblem, ProblemError> {
    let mats = p
        .matrices
        .iter()
        .enumerate()
        .map(|(i, m)| matrix(&format!("matrices[{i}]"), m))
        .collect::<Result<Vec<_>, _>>()?;
    let candidate = KSymplecticCandidate::new(mats).map_err(|e| invalid("matrices", e))?;
    let base_point = p.base_point.map(|b| rationals("base_point", &b)).transpose()?;
    Ok(KSymplecticProblem { candidate, base_point })
}

fn parse_bounds(p: BoundsPayload) -> Result<BoundsProblem, ProblemError> {
    Ok(BoundsProblem {
        d: integer("d", &p.d)?,
        e: p.e.map(|e| integer("e", &e)).transpose()?,
        dim_h1: p.dim_h1.map(|h| integer("dim_h1", &h)).transpose()?,
    })
}

fn parse_path(p: PathPayload) -> Result<PeriodPath, ProblemError> {
    let space = space("gram", &p.gram)?;
    let coords = p
        .coords
        .iter()
        .enumerate()
        .map(|(i, c)| rationals(&format!("coords[{i}]"), c).map(QPoly::new))
        .collect::<Result<Vec<_>, _>>()?;
    PeriodPath::new(space, coords).map_err(|e| invalid("coords", e))
}

pub fn parse_problem(text: &str) -> Result<Problem, ProblemError> {
    let env: Envelope = serde_json::from_str(text)?;
    if env.version != FORMAT_VERSION {
        return Err(ProblemError::Version(env.version));
    }
    match env.kind.as_str() {
        "k3period" => parse_k3(serde_json::from_value(env.payload)?).map(Problem::K3Period),
        "ksymplectic" => parse_ksympl(serde_json::from_value(env.payload)?).map(Problem::KSymplectic),
        "bounds" => parse_bounds(serde_json::from_value(env.payload)?).map(Problem::Bounds),
        "path" => parse_path(serde_json::from_value(env.payload)?).map(Problem::Path),
        other => Err(ProblemError::UnknownKind(other.to_string())),
    }
}

pub fn load(path: &Path) -> Result<Problem, ProblemError> {
    let text = std::fs::read_to_string(path).map_err(|source| ProblemError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_problem(&text)
}

impl ProblemError {
    pub fn kind(&self) -> String {
        match self {
            ProblemError::Invalid { kind, .. } => kind.clone(),
            ProblemError::Json(_) => "Malformed".into(),
            ProblemError::Field { .. } => "BadField".into(),
            other => variant_name(other),
        }
    }
}

pub fn expect_kind(p: &Problem, expected: &'static str) -> Result<(), ProblemError> {
    if p.kind() == expected {
        Ok(())
    } else {
        Err(ProblemError::Kind {
            expected,
            got: p.kind().to_string(),
        })
    }
}
