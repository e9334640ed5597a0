//! File formats: DIMACS graphs, vector sets, strategies and certificates.
//!
//! Complex numbers are `[re, im]` pairs. Matrices are flat row-major lists of
//! such pairs; their side length is the square root of the list length.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::chromatic::ColoringCertificate;
use crate::game::{ClassicalStrategy, PovmStrategy, Strategy};
use crate::graph::Graph;
use crate::ks::{self, VectorSet};
use crate::linalg::{CMatrix, CVector, C64};
use crate::reps::{Measurements, MatrixRepresentation, OrthogonalRepresentation, PsdWitness, QuantumColoring};
use crate::{Error, Result};

pub type Cx = [f64; 2];

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Reads a DIMACS `.col` graph. Vertices in the file are 1-indexed.
///
/// Returns warnings for an edge count differing from the header and for
/// repeated edges (either orientation), which are kept once.
pub fn parse_dimacs(text: &str) -> Result<(Graph, Vec<String>)> {
    let mut header: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut warnings = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let mut tok = raw.split_whitespace();
        match tok.next() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(parse_err(line, "second problem line"));
                }
                let kind = tok.next().ok_or_else(|| parse_err(line, "missing format"))?;
                if kind != "edge" && kind != "col" {
                    return Err(parse_err(line, format!("unsupported format {kind:?}")));
                }
                let n = number(tok.next(), line, "vertex count")?;
                let m = number(tok.next(), line, "edge count")?;
                if tok.next().is_some() {
                    return Err(parse_err(line, "trailing tokens"));
                }
                header = Some((n, m));
            }
            Some("e") => {
                let (n, _) = header.ok_or_else(|| parse_err(line, "edge before problem line"))?;
                let u = number(tok.next(), line, "endpoint")?;
                let v = number(tok.next(), line, "endpoint")?;
                if tok.next().is_some() {
                    return Err(parse_err(line, "trailing tokens"));
                }
                for x in [u, v] {
                    if x == 0 || x > n {
                        return Err(parse_err(line, format!("vertex {x} outside 1..={n}")));
                    }
                }
                if u == v {
                    return Err(parse_err(line, format!("self-loop at vertex {u}")));
                }
                let key = (u.min(v) - 1, u.max(v) - 1);
                if seen.insert(key) {
                    edges.push(key);
                } else {
                    warnings.push(format!("line {line}: repeated edge {u} {v} ignored"));
                }
            }
            Some(other) => return Err(parse_err(line, format!("unknown line type {other:?}"))),
        }
    }
    let (n, m) = header.ok_or_else(|| parse_err(0, "no problem line"))?;
    let lines = edges.len() + warnings.len();
    if lines != m {
        warnings.push(format!("header declares {m} edges, file has {lines} edge lines"));
    }
    Ok((Graph::new(n, &edges)?, warnings))
}

fn number(tok: Option<&str>, line: usize, what: &str) -> Result<usize> {
    let t = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    t.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {t:?}")))
}

pub fn write_dimacs(g: &Graph) -> String {
    let mut out = format!("p edge {} {}\n", g.vertex_count(), g.edge_count());
    for &(u, v) in g.edges() {
        out.push_str(&format!("e {} {}\n", u + 1, v + 1));
    }
    out
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorEntry {
    pub id: String,
    pub coords: Vec<Cx>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VectorSetFile {
    pub dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    pub vectors: Vec<VectorEntry>,
}

impl VectorSetFile {
    pub fn from_set(set: &VectorSet) -> Self {
        VectorSetFile {
            dimension: set.dimension(),
            tolerance: Some(set.tol()),
            vectors: set
                .rays()
                .iter()
                .map(|r| VectorEntry {
                    id: r.id(),
                    coords: vec_to_json(&r.vector),
                })
                .collect(),
        }
    }

    /// Canonicalizes with the file's tolerance, or `default_tol` if it has none.
    pub fn into_set(self, default_tol: f64) -> Result<(VectorSet, Vec<Vec<String>>)> {
        let tol = self.tolerance.unwrap_or(default_tol);
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance {tol}")));
        }
        let mut raw = Vec::with_capacity(self.vectors.len());
        for e in self.vectors {
            if e.coords.len() != self.dimension {
                return Err(Error::InvalidArgument(format!(
                    "vector {} has {} coordinates, dimension is {}",
                    e.id,
                    e.coords.len(),
                    self.dimension
                )));
            }
            raw.push((e.id, json_to_vec(&e.coords)?));
        }
        let set = ks::canonicalize(&raw, tol)?;
        let merged = set.merged();
        Ok((set, merged))
    }
}

/// Parses a vector-set file; also returns the groups of ids merged into one ray.
pub fn parse_vector_set(text: &str) -> Result<(VectorSet, Vec<Vec<String>>)> {
    parse_vector_set_with(text, crate::DEFAULT_TOL)
}

pub fn parse_vector_set_with(text: &str, default_tol: f64) -> Result<(VectorSet, Vec<Vec<String>>)> {
    serde_json::from_str::<VectorSetFile>(text)?.into_set(default_tol)
}

pub fn vec_to_json(v: &CVector) -> Vec<Cx> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

pub fn json_to_vec(xs: &[Cx]) -> Result<CVector> {
    if xs.iter().flatten().any(|x| !x.is_finite()) {
        return Err(Error::InvalidArgument("non-finite coordinate".into()));
    }
    Ok(CVector::from_iterator(xs.len(), xs.iter().map(|&[re, im]| C64::new(re, im))))
}

pub fn mat_to_json(m: &CMatrix) -> Vec<Cx> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            out.push([z.re, z.im]);
        }
    }
    out
}

/// Square matrix from a flat row-major list.
pub fn json_to_mat(xs: &[Cx]) -> Result<CMatrix> {
    let d = (xs.len() as f64).sqrt().round() as usize;
    if d * d != xs.len() {
        return Err(Error::InvalidArgument(format!(
            "matrix with {} entries is not square",
            xs.len()
        )));
    }
    json_to_mat_shaped(xs, d)
}

fn json_to_mat_shaped(xs: &[Cx], d: usize) -> Result<CMatrix> {
    if xs.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: xs.len(),
        });
    }
    let v = json_to_vec(xs)?;
    Ok(CMatrix::from_fn(d, d, |i, j| v[i * d + j]))
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum StrategyFile {
    Classical {
        colors: usize,
        alice: Vec<usize>,
        bob: Vec<usize>,
    },
    Quantum {
        colors: usize,
        dim_a: usize,
        dim_b: usize,
        state: Vec<Cx>,
        alice: Vec<Vec<Vec<Cx>>>,
        bob: Vec<Vec<Vec<Cx>>>,
    },
}

impl StrategyFile {
    pub fn from_strategy(s: &Strategy) -> Self {
        match s {
            Strategy::Classical(c) => StrategyFile::Classical {
                colors: c.colors,
                alice: c.alice.clone(),
                bob: c.bob.clone(),
            },
            Strategy::Quantum(q) => {
                let fams = |f: &[Vec<CMatrix>]| f.iter().map(|fam| fam.iter().map(mat_to_json).collect()).collect();
                StrategyFile::Quantum {
                    colors: q.colors,
                    dim_a: q.dim_a,
                    dim_b: q.dim_b,
                    state: vec_to_json(&q.state),
                    alice: fams(&q.alice),
                    bob: fams(&q.bob),
                }
            }
        }
    }

    /// Builds and validates the strategy.
    pub fn into_strategy(self, tol: f64) -> Result<Strategy> {
        Ok(match self {
            StrategyFile::Classical { colors, alice, bob } => {
                Strategy::Classical(ClassicalStrategy::new(colors, alice, bob)?)
            }
            StrategyFile::Quantum {
                colors,
                dim_a,
                dim_b,
                state,
                alice,
                bob,
            } => {
                let fams = |f: Vec<Vec<Vec<Cx>>>, d: usize| -> Result<Vec<Vec<CMatrix>>> {
                    f.iter()
                        .map(|fam| fam.iter().map(|m| json_to_mat_shaped(m, d)).collect())
                        .collect()
                };
                Strategy::Quantum(PovmStrategy::new(
                    colors,
                    dim_a,
                    dim_b,
                    json_to_vec(&state)?,
                    fams(alice, dim_a)?,
                    fams(bob, dim_b)?,
                    tol,
                )?)
            }
        })
    }
}

pub fn parse_strategy(text: &str, tol: f64) -> Result<Strategy> {
    serde_json::from_str::<StrategyFile>(text)?.into_strategy(tol)
}

/// A labeling of a vector set, self-contained so it can be re-checked alone.
#[derive(Clone, Debug)]
pub struct KsWitness {
    pub set: VectorSet,
    pub labels: Vec<u8>,
    /// Whether the labeling also avoids orthogonal `1, 1` pairs.
    pub weak: bool,
}

#[derive(Clone, Debug)]
pub enum Certificate {
    Coloring(ColoringCertificate),
    OrthRep(OrthogonalRepresentation),
    MatrixRep(MatrixRepresentation),
    QColoring(QuantumColoring),
    KsWitness(KsWitness),
    PsdWitness(PsdWitness),
}

impl Certificate {
    pub fn kind(&self) -> &'static str {
        match self {
            Certificate::Coloring(_) => "coloring",
            Certificate::OrthRep(_) => "orthrep",
            Certificate::MatrixRep(_) => "matrixrep",
            Certificate::QColoring(_) => "qcoloring",
            Certificate::KsWitness(_) => "ks-witness",
            Certificate::PsdWitness(_) => "psd-witness",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub tool_version: String,
    pub tol: f64,
    pub rank_tol: f64,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub budget: Option<u64>,
}

impl Metadata {
    pub fn new(tol: f64, rank_tol: f64, seed: Option<u64>, budget: Option<u64>) -> Self {
        Metadata {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            tol,
            rank_tol,
            seed,
            budget,
        }
    }
}

impl Default for Metadata {
    fn default() -> Self {
        Metadata::new(crate::DEFAULT_TOL, crate::DEFAULT_RANK_TOL, None, None)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CertificateFile {
    pub kind: String,
    pub payload: Value,
    pub metadata: Metadata,
}

#[derive(Serialize, Deserialize)]
struct OrthRepJson {
    dimension: usize,
    vectors: Vec<Vec<Cx>>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepJson {
    dimension: usize,
    matrices: Vec<Vec<Cx>>,
}

#[derive(Serialize, Deserialize)]
struct QColoringJson {
    colors: usize,
    rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vectors: Option<Vec<Vec<Vec<Cx>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    projectors: Option<Vec<Vec<Vec<Cx>>>>,
}

#[derive(Serialize, Deserialize)]
struct KsWitnessJson {
    vector_set: VectorSetFile,
    labels: Vec<u8>,
    weak: bool,
}

#[derive(Serialize, Deserialize)]
struct PsdJson {
    rank: usize,
    matrix: Vec<Cx>,
}

pub fn orthrep_to_json(rep: &OrthogonalRepresentation) -> Value {
    serde_json::to_value(OrthRepJson {
        dimension: rep.dimension,
        vectors: rep.vectors.iter().map(vec_to_json).collect(),
    })
    .expect("serializable")
}

pub fn matrixrep_to_json(rep: &MatrixRepresentation) -> Value {
    serde_json::to_value(MatrixRepJson {
        dimension: rep.dimension,
        matrices: rep.matrices.iter().map(mat_to_json).collect(),
    })
    .expect("serializable")
}

pub fn qcoloring_to_json(qc: &QuantumColoring) -> Value {
    let (vectors, projectors) = match &qc.measurements {
        Measurements::Vectors(vs) => (
            Some(vs.iter().map(|b| b.iter().map(vec_to_json).collect()).collect()),
            None,
        ),
        Measurements::Projectors(ps) => (
            None,
            Some(ps.iter().map(|f| f.iter().map(mat_to_json).collect()).collect()),
        ),
    };
    serde_json::to_value(QColoringJson {
        colors: qc.colors,
        rank: qc.rank,
        vectors,
        projectors,
    })
    .expect("serializable")
}

pub fn certificate_payload(cert: &Certificate) -> Value {
    match cert {
        Certificate::Coloring(c) => serde_json::to_value(c).expect("serializable"),
        Certificate::OrthRep(r) => orthrep_to_json(r),
        Certificate::MatrixRep(r) => matrixrep_to_json(r),
        Certificate::QColoring(q) => qcoloring_to_json(q),
        Certificate::KsWitness(w) => serde_json::to_value(KsWitnessJson {
            vector_set: VectorSetFile::from_set(&w.set),
            labels: w.labels.clone(),
            weak: w.weak,
        })
        .expect("serializable"),
        Certificate::PsdWitness(w) => serde_json::to_value(PsdJson {
            rank: w.rank,
            matrix: mat_to_json(&w.matrix),
        })
        .expect("serializable"),
    }
}

pub fn certificate_file(cert: &Certificate, metadata: Metadata) -> CertificateFile {
    CertificateFile {
        kind: cert.kind().to_string(),
        payload: certificate_payload(cert),
        metadata,
    }
}

pub fn write_certificate(cert: &Certificate, metadata: Metadata) -> String {
    serde_json::to_string_pretty(&certificate_file(cert, metadata)).expect("serializable")
}

pub fn parse_certificate(text: &str) -> Result<(Certificate, Metadata)> {
    let file: CertificateFile = serde_json::from_str(text)?;
    let cert = decode_payload(&file.kind, file.payload, file.metadata.tol)?;
    Ok((cert, file.metadata))
}

/// Decodes a bare payload of the given kind.
pub fn decode_payload(kind: &str, payload: Value, tol: f64) -> Result<Certificate> {
    Ok(match kind {
        "coloring" => Certificate::Coloring(serde_json::from_value(payload)?),
        "orthrep" => Certificate::OrthRep(orthrep_from_json(payload)?),
        "matrixrep" => {
            let j: MatrixRepJson = serde_json::from_value(payload)?;
            let matrices = j.matrices.iter().map(|m| json_to_mat(m)).collect::<Result<Vec<_>>>()?;
            Certificate::MatrixRep(MatrixRepresentation {
                dimension: j.dimension,
                matrices,
            })
        }
        "qcoloring" => Certificate::QColoring(qcoloring_from_json(payload)?),
        "ks-witness" => {
            let j: KsWitnessJson = serde_json::from_value(payload)?;
            let (set, _) = j.vector_set.into_set(tol)?;
            Certificate::KsWitness(KsWitness {
                set,
                labels: j.labels,
                weak: j.weak,
            })
        }
        "psd-witness" => {
            let j: PsdJson = serde_json::from_value(payload)?;
            Certificate::PsdWitness(PsdWitness {
                matrix: json_to_mat(&j.matrix)?,
                rank: j.rank,
            })
        }
        other => return Err(Error::InvalidArgument(format!("unknown certificate kind {other:?}"))),
    })
}

pub fn orthrep_from_json(payload: Value) -> Result<OrthogonalRepresentation> {
    let j: OrthRepJson = serde_json::from_value(payload)?;
    let vectors = j.vectors.iter().map(|v| json_to_vec(v)).collect::<Result<Vec<_>>>()?;
    OrthogonalRepresentation::new(j.dimension, vectors)
}

pub fn qcoloring_from_json(payload: Value) -> Result<QuantumColoring> {
    let j: QColoringJson = serde_json::from_value(payload)?;
    let measurements = match (j.vectors, j.projectors) {
        (Some(vs), None) => Measurements::Vectors(
            vs.iter()
                .map(|b| b.iter().map(|v| json_to_vec(v)).collect())
                .collect::<Result<_>>()?,
        ),
        (None, Some(ps)) => Measurements::Projectors(
            ps.iter()
                .map(|f| f.iter().map(|m| json_to_mat(m)).collect())
                .collect::<Result<_>>()?,
        ),
        _ => {
            return Err(Error::InvalidArgument(
                "quantum coloring needs exactly one of \"vectors\" or \"projectors\"".into(),
            ))
        }
    };
    Ok(QuantumColoring {
        colors: j.colors,
        rank: j.rank,
        measurements,
    })
}
