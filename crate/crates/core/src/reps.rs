//! Orthogonal representations, matrix representations and quantum colorings.
//!
//! An orthogonal representation of `G` in `C^c` assigns nonzero vectors with
//! adjacent vertices orthogonal. A matrix representation assigns unitaries
//! `U_v` such that `diag(U_v† U_w) = 0` on every edge; its columns are exactly
//! a rank-1 quantum coloring, and read per column index they form an
//! orthogonal representation of `G □ K_c` in `C^c`.
//!
//! Everything here either verifies a certificate or produces one that has
//! been verified. Failed numerical searches never count as proofs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chromatic::{self, ColoringCertificate};
use crate::graph::Graph;
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalRepresentation {
    pub dimension: usize,
    pub vectors: Vec<CVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatrixRepresentation {
    pub dimension: usize,
    pub matrices: Vec<CMatrix>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Measurements {
    /// Rank-1: one orthonormal basis `a_{v,0..c}` per vertex.
    Vectors(Vec<Vec<CVector>>),
    /// Rank-r: `c` projectors per vertex.
    Projectors(Vec<Vec<CMatrix>>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumColoring {
    pub colors: usize,
    pub rank: usize,
    pub measurements: Measurements,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PsdWitness {
    pub matrix: CMatrix,
    pub rank: usize,
}

impl OrthogonalRepresentation {
    pub fn new(dimension: usize, vectors: Vec<CVector>) -> Result<Self> {
        if let Some(v) = vectors.iter().find(|v| v.len() != dimension) {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: v.len(),
            });
        }
        Ok(OrthogonalRepresentation { dimension, vectors })
    }

    /// `e_{color(v)}` in `C^c`: every proper coloring is an orthogonal representation.
    pub fn from_coloring(cert: &ColoringCertificate) -> Self {
        OrthogonalRepresentation {
            dimension: cert.colors,
            vectors: cert
                .assignment
                .iter()
                .map(|&k| linalg::basis_vector(cert.colors, k))
                .collect(),
        }
    }
}

impl MatrixRepresentation {
    /// Column `k` of every `U_v`; an orthogonal representation of `G` in `C^c`.
    pub fn column_representation(&self, k: usize) -> OrthogonalRepresentation {
        OrthogonalRepresentation {
            dimension: self.dimension,
            vectors: self.matrices.iter().map(|u| u.column(k).into_owned()).collect(),
        }
    }

    /// The rank-1 quantum coloring whose vertex bases are the columns.
    pub fn to_quantum_coloring(&self) -> QuantumColoring {
        QuantumColoring {
            colors: self.dimension,
            rank: 1,
            measurements: Measurements::Vectors(
                self.matrices
                    .iter()
                    .map(|u| u.column_iter().map(|c| c.into_owned()).collect())
                    .collect(),
            ),
        }
    }
}

impl QuantumColoring {
    pub fn vertex_count(&self) -> usize {
        match &self.measurements {
            Measurements::Vectors(v) => v.len(),
            Measurements::Projectors(p) => p.len(),
        }
    }

    /// Local dimension `rank * colors`.
    pub fn local_dimension(&self) -> usize {
        self.rank * self.colors
    }

    /// Projector for `(v, α)`.
    pub fn projector(&self, v: usize, color: usize) -> CMatrix {
        match &self.measurements {
            Measurements::Vectors(vs) => linalg::outer(&vs[v][color]),
            Measurements::Projectors(ps) => ps[v][color].clone(),
        }
    }

    /// Matrix representation with `U_v` column `α` equal to `a_{vα}`; rank-1 only.
    pub fn to_matrix_representation(&self) -> Result<MatrixRepresentation> {
        let Measurements::Vectors(vs) = &self.measurements else {
            return Err(Error::InvalidArgument(
                "only rank-1 colorings have a matrix representation".into(),
            ));
        };
        Ok(MatrixRepresentation {
            dimension: self.colors,
            matrices: vs.iter().map(|b| CMatrix::from_columns(b)).collect(),
        })
    }

    /// Every vector of a rank-1 coloring, in vertex-major order.
    pub fn vector_union(&self) -> Result<Vec<CVector>> {
        match &self.measurements {
            Measurements::Vectors(vs) => Ok(vs.iter().flatten().cloned().collect()),
            Measurements::Projectors(_) => Err(Error::InvalidArgument(
                "vector union is defined for rank-1 colorings".into(),
            )),
        }
    }
}

fn check_cover(g: &Graph, have: usize, what: &'static str) -> Result<()> {
    if have < g.vertex_count() {
        return Err(Error::MissingVertex { what, vertex: have });
    }
    Ok(())
}

pub fn verify_orthogonal_representation(g: &Graph, rep: &OrthogonalRepresentation, tol: f64) -> Result<bool> {
    check_cover(g, rep.vectors.len(), "orthogonal representation")?;
    if rep.vectors.iter().any(|v| v.len() != rep.dimension) {
        return Ok(false);
    }
    if rep.vectors[..g.vertex_count()].iter().any(|v| v.norm() <= tol) {
        return Ok(false);
    }
    Ok(max_edge_overlap(g, &rep.vectors) <= tol)
}

/// Largest `|<φ_u, φ_v>|` over edges, with vectors normalized.
fn max_edge_overlap(g: &Graph, vectors: &[CVector]) -> f64 {
    g.edges()
        .iter()
        .map(|&(u, v)| vectors[u].dotc(&vectors[v]).norm() / (vectors[u].norm() * vectors[v].norm()))
        .fold(0.0, f64::max)
}

pub fn verify_matrix_representation(g: &Graph, rep: &MatrixRepresentation, tol: f64) -> Result<bool> {
    check_cover(g, rep.matrices.len(), "matrix representation")?;
    if let Some(m) = rep.matrices.iter().find(|m| !m.is_square()) {
        return Err(Error::InvalidArgument(format!(
            "matrix representation entry has shape {:?}",
            m.shape()
        )));
    }
    let c = rep.dimension;
    if rep.matrices.iter().any(|m| m.nrows() != c || !linalg::is_unitary(m, tol)) {
        return Ok(false);
    }
    for &(u, v) in g.edges() {
        let (a, b) = (&rep.matrices[u], &rep.matrices[v]);
        for k in 0..c {
            if a.column(k).dotc(&b.column(k)).norm() > tol {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColoringViolation {
    /// The measurement at `vertex` is not an orthonormal basis / projective measurement.
    Measurement { vertex: usize, reason: String },
    /// `|<a_{uα}, a_{vα}>|` (or `|<E_{uα}, E_{vα}>|`) exceeds the tolerance.
    Edge { u: usize, v: usize, color: usize, overlap: f64 },
}

/// Every measurement and edge-color condition the coloring breaks.
///
/// Errors only for structurally malformed input (wrong element counts or
/// dimensions).
pub fn quantum_coloring_violations(g: &Graph, qc: &QuantumColoring, tol: f64) -> Result<Vec<ColoringViolation>> {
    check_cover(g, qc.vertex_count(), "quantum coloring")?;
    let c = qc.colors;
    let dim = qc.local_dimension();
    let mut out = Vec::new();
    match &qc.measurements {
        Measurements::Vectors(vs) => {
            if qc.rank != 1 {
                return Err(Error::InvalidArgument("vector measurements must have rank 1".into()));
            }
            for (v, basis) in vs.iter().enumerate().take(g.vertex_count()) {
                if basis.len() != c || basis.iter().any(|a| a.len() != dim) {
                    return Err(Error::InvalidArgument(format!(
                        "vertex {v}: expected {c} vectors of dimension {dim}"
                    )));
                }
                if !linalg::is_orthonormal_basis(basis, tol) {
                    out.push(ColoringViolation::Measurement {
                        vertex: v,
                        reason: "not an orthonormal basis".into(),
                    });
                }
            }
            for &(u, v) in g.edges() {
                for k in 0..c {
                    let overlap = vs[u][k].dotc(&vs[v][k]).norm();
                    if overlap > tol {
                        out.push(ColoringViolation::Edge { u, v, color: k, overlap });
                    }
                }
            }
        }
        Measurements::Projectors(ps) => {
            let id = CMatrix::identity(dim, dim);
            for (v, fam) in ps.iter().enumerate().take(g.vertex_count()) {
                if fam.len() != c || fam.iter().any(|p| p.shape() != (dim, dim)) {
                    return Err(Error::InvalidArgument(format!(
                        "vertex {v}: expected {c} projectors of size {dim}x{dim}"
                    )));
                }
                let mut sum = CMatrix::zeros(dim, dim);
                for (k, p) in fam.iter().enumerate() {
                    sum += p;
                    if !linalg::is_projector(p, tol) {
                        out.push(ColoringViolation::Measurement {
                            vertex: v,
                            reason: format!("element {k} is not a projector"),
                        });
                    } else if linalg::matrix_rank(p, crate::DEFAULT_RANK_TOL) != qc.rank {
                        out.push(ColoringViolation::Measurement {
                            vertex: v,
                            reason: format!("element {k} does not have rank {}", qc.rank),
                        });
                    }
                }
                if linalg::max_abs_diff(&sum, &id) > tol {
                    out.push(ColoringViolation::Measurement {
                        vertex: v,
                        reason: "elements do not sum to the identity".into(),
                    });
                }
            }
            for &(u, v) in g.edges() {
                for k in 0..c {
                    let overlap = linalg::hs_inner(&ps[u][k], &ps[v][k])?.norm();
                    if overlap > tol {
                        out.push(ColoringViolation::Edge { u, v, color: k, overlap });
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn verify_quantum_coloring(g: &Graph, qc: &QuantumColoring, tol: f64) -> Result<bool> {
    Ok(quantum_coloring_violations(g, qc, tol)?.is_empty())
}

/// Vertex with color `α` measures in `{|i + α mod c>}_i`: outcome `i` is `e_{(i+α) mod c}`.
pub fn quantum_coloring_from_classical(g: &Graph, cert: &ColoringCertificate) -> Result<QuantumColoring> {
    if !chromatic::verify_coloring(g, cert)? {
        return Err(Error::InvalidArgument("coloring is not proper".into()));
    }
    let c = cert.colors;
    Ok(QuantumColoring {
        colors: c,
        rank: 1,
        measurements: Measurements::Vectors(
            cert.assignment
                .iter()
                .map(|&a| (0..c).map(|i| linalg::basis_vector(c, (i + a) % c)).collect())
                .collect(),
        ),
    })
}

/// Turns an orthogonal representation of `G □ K_c` in `C^c` into a matrix
/// representation of `G`: column `i` of `U_v` is the normalized vector at `(v, i)`.
pub fn orthrep_to_matrixrep(g: &Graph, c: usize, rep: &OrthogonalRepresentation, tol: f64) -> Result<MatrixRepresentation> {
    if rep.dimension != c {
        return Err(Error::DimensionMismatch {
            expected: c,
            found: rep.dimension,
        });
    }
    let product = Graph::cartesian_product(g, &Graph::complete(c)?);
    if !verify_orthogonal_representation(&product, rep, tol)? {
        return Err(Error::InvalidArgument(format!(
            "not an orthogonal representation of G □ K_{c}"
        )));
    }
    let mut matrices = Vec::with_capacity(g.vertex_count());
    for v in 0..g.vertex_count() {
        let cols: Vec<CVector> = (0..c)
            .map(|i| {
                let a = &rep.vectors[v * c + i];
                a / C64::from(a.norm())
            })
            .collect();
        let u = CMatrix::from_columns(&cols);
        if !linalg::is_unitary(&u, tol.max(1e-12) * 10.0) {
            return Err(Error::Internal(format!(
                "columns for vertex {v} do not form a unitary"
            )));
        }
        matrices.push(u);
    }
    Ok(MatrixRepresentation { dimension: c, matrices })
}

/// Vector at `(v, i)` of `G □ K_c` is column `i` of `U_v`.
pub fn matrixrep_to_orthrep(g: &Graph, rep: &MatrixRepresentation, tol: f64) -> Result<OrthogonalRepresentation> {
    if !verify_matrix_representation(g, rep, tol)? {
        return Err(Error::InvalidArgument("matrix representation does not verify".into()));
    }
    let c = rep.dimension;
    let vectors = rep.matrices[..g.vertex_count()]
        .iter()
        .flat_map(|u| (0..c).map(move |i| u.column(i).into_owned()))
        .collect();
    Ok(OrthogonalRepresentation { dimension: c, vectors })
}

#[derive(Clone, Debug)]
pub struct SearchParams {
    pub seed: u64,
    /// Coordinate-descent sweeps per restart.
    pub iterations: usize,
    pub restarts: usize,
    /// Restrict to real vectors.
    pub real_only: bool,
    pub tol: f64,
    /// Node budget for the clique bound used to short-circuit hopeless dimensions.
    pub clique_budget: u64,
}

impl Default for SearchParams {
    fn default() -> Self {
        SearchParams {
            seed: 0,
            iterations: 400,
            restarts: 20,
            real_only: false,
            tol: crate::DEFAULT_TOL,
            clique_budget: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SearchOutcome {
    Found {
        rep: OrthogonalRepresentation,
        restart: usize,
    },
    /// No witness found. Not a proof of nonexistence.
    NotFound { best_overlap: f64 },
    /// A clique larger than the dimension proves no representation exists.
    Infeasible { clique: Vec<usize> },
}

impl SearchOutcome {
    pub fn found(&self) -> Option<&OrthogonalRepresentation> {
        match self {
            SearchOutcome::Found { rep, .. } => Some(rep),
            _ => None,
        }
    }
}

/// Minimizes `Σ_{(v,w)∈E} |<φ_v, φ_w>|²` over unit vectors by exact
/// coordinate descent: each sweep replaces `φ_v` with a bottom eigenvector of
/// `Σ_{w~v} φ_w φ_w†`. Restarts are seeded `(seed, restart)`; the first
/// restart whose polished result verifies at `tol` wins.
pub fn search_orthogonal_representation(g: &Graph, c: usize, params: &SearchParams) -> Result<SearchOutcome> {
    if c == 0 {
        return Err(Error::InvalidArgument("dimension must be at least 1".into()));
    }
    let n = g.vertex_count();
    if let Ok(w) = chromatic::clique_number(g, params.clique_budget) {
        if w.size > c {
            return Ok(SearchOutcome::Infeasible { clique: w.clique });
        }
    }
    if g.edge_count() == 0 {
        let rep = OrthogonalRepresentation {
            dimension: c,
            vectors: vec![linalg::basis_vector(c, 0); n],
        };
        return Ok(SearchOutcome::Found { rep, restart: 0 });
    }
    let mut best_overlap = f64::INFINITY;
    for restart in 0..params.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(restart as u64);
        let mut phi: Vec<CVector> = (0..n).map(|_| random_start(c, params.real_only, &mut rng)).collect();
        let mut last = f64::INFINITY;
        let mut stall = 0;
        for _ in 0..params.iterations {
            sweep(g, &mut phi, c)?;
            let overlap = max_edge_overlap(g, &phi);
            if overlap <= params.tol * 1e-2 {
                break;
            }
            // give up on a restart that has stopped improving
            if overlap > 0.999 * last {
                stall += 1;
                if stall > 25 {
                    break;
                }
            } else {
                stall = 0;
            }
            last = overlap;
        }
        polish(g, &mut phi, c)?;
        let rep = OrthogonalRepresentation {
            dimension: c,
            vectors: phi,
        };
        let overlap = max_edge_overlap(g, &rep.vectors);
        best_overlap = best_overlap.min(overlap);
        if verify_orthogonal_representation(g, &rep, params.tol)? {
            return Ok(SearchOutcome::Found { rep, restart });
        }
    }
    Ok(SearchOutcome::NotFound { best_overlap })
}

fn random_start(c: usize, real: bool, rng: &mut ChaCha8Rng) -> CVector {
    let mut v = linalg::random_unit_vector(c, rng);
    if real {
        v.iter_mut().for_each(|z| z.im = 0.0);
        let n = v.norm();
        if n < 1e-9 {
            return linalg::basis_vector(c, 0);
        }
        v /= C64::from(n);
    }
    v
}

fn sweep(g: &Graph, phi: &mut [CVector], c: usize) -> Result<()> {
    for v in 0..g.vertex_count() {
        if g.degree(v) == 0 {
            continue;
        }
        let mut m = CMatrix::zeros(c, c);
        for &w in g.neighbors(v) {
            m += linalg::outer(&phi[w]);
        }
        let (_, vecs) = linalg::hermitian_eigen(&m)?;
        phi[v] = vecs.column(c - 1).into_owned();
    }
    Ok(())
}

/// Projects each vector onto the near-null space of its neighbors' span and
/// renormalizes; a few sweeps remove the residual left by the descent.
fn polish(g: &Graph, phi: &mut [CVector], c: usize) -> Result<()> {
    for _ in 0..20 {
        for v in 0..g.vertex_count() {
            if g.degree(v) == 0 {
                continue;
            }
            let mut m = CMatrix::zeros(c, c);
            for &w in g.neighbors(v) {
                m += linalg::outer(&phi[w]);
            }
            let (vals, vecs) = linalg::hermitian_eigen(&m)?;
            let cutoff = 1e-6 * vals[0].max(1.0);
            let mut p = CVector::zeros(c);
            for k in 0..c {
                if vals[k] <= cutoff {
                    let col = vecs.column(k);
                    p += col * col.dotc(&phi[v]);
                }
            }
            if p.norm() > 1e-3 {
                phi[v] = &p / C64::from(p.norm());
            }
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct XiBounds {
    pub lower: usize,
    pub lower_clique: Vec<usize>,
    pub upper: usize,
    pub upper_witness: OrthogonalRepresentation,
}

/// `ω(G) ≤ ξ(G) ≤ upper`, the upper bound from the smallest dimension at
/// which the search succeeded, or from a greedy coloring if none did.
pub fn xi_bounds(g: &Graph, params: &SearchParams) -> Result<XiBounds> {
    let clique = chromatic::clique_number(g, params.clique_budget)?;
    let greedy = chromatic::greedy_dsatur(g);
    let fallback = XiBounds {
        lower: clique.size,
        lower_clique: clique.clique.clone(),
        upper: greedy.colors,
        upper_witness: OrthogonalRepresentation::from_coloring(&greedy),
    };
    for c in clique.size.max(1)..greedy.colors {
        if let SearchOutcome::Found { rep, .. } = search_orthogonal_representation(g, c, params)? {
            return Ok(XiBounds {
                upper: c,
                upper_witness: rep,
                ..fallback
            });
        }
    }
    Ok(fallback)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    /// Numerical search on `G □ K_c`.
    Search,
    /// Converted from an exact classical coloring.
    Classical,
}

#[derive(Clone, Debug)]
pub struct ChiQ1Bound {
    pub colors: usize,
    pub witness: MatrixRepresentation,
    pub source: WitnessSource,
}

/// Smallest `c ≤ c_max` with a verified orthogonal representation of
/// `G □ K_c` in `C^c`, returned as the induced matrix representation of `G`.
///
/// At each `c` the numerical search runs first; if it fails and the exact
/// solver shows `χ(G) ≤ c`, the classical witness is used. Dimensions below
/// `ω(G)` are skipped. An upper bound only.
pub fn chi_q1_upper_via_product(
    g: &Graph,
    c_max: usize,
    params: &SearchParams,
    chi_budget: u64,
) -> Result<Option<ChiQ1Bound>> {
    if c_max == 0 {
        return Err(Error::InvalidArgument("c_max must be at least 1".into()));
    }
    let omega = chromatic::clique_number(g, params.clique_budget)
        .map(|r| r.size)
        .unwrap_or(1);
    let classical = chromatic::chromatic_number(g, chi_budget).ok();
    for c in omega.max(1)..=c_max {
        let product = Graph::cartesian_product(g, &Graph::complete(c)?);
        if let SearchOutcome::Found { rep, .. } = search_orthogonal_representation(&product, c, params)? {
            let witness = orthrep_to_matrixrep(g, c, &rep, params.tol)?;
            return Ok(Some(ChiQ1Bound {
                colors: c,
                witness,
                source: WitnessSource::Search,
            }));
        }
        if let Some(res) = classical.as_ref().filter(|r| r.chi <= c) {
            let cert = ColoringCertificate {
                colors: c,
                assignment: res.certificate.assignment.clone(),
            };
            let witness = quantum_coloring_from_classical(g, &cert)?.to_matrix_representation()?;
            return Ok(Some(ChiQ1Bound {
                colors: c,
                witness,
                source: WitnessSource::Classical,
            }));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum PsdRejection {
    WrongSize { expected: usize, found: usize },
    NotSymmetric { deviation: f64 },
    NotPsd { eigenvalue: f64 },
    WrongPattern { i: usize, j: usize, value: f64, expected_zero: bool },
    RankTooHigh { rank: usize, claimed: usize },
    ZeroGramVector { vertex: usize },
    GramFactorFails { overlap: f64 },
}

#[derive(Clone, Debug)]
pub enum PsdCheck {
    Accepted(OrthogonalRepresentation),
    Rejected(PsdRejection),
}

/// Accepts iff `A` is PSD, its off-diagonal support is exactly the edge set of
/// the complement of `G` (entries within `tol` count as zero), and its rank is
/// at most the claimed `r`. On acceptance the rows of a rank-`r` Gram factor
/// are returned as an orthogonal representation of `G` in `C^r`.
pub fn psd_witness_check(g: &Graph, w: &PsdWitness, tol: f64, rank_tol: f64) -> Result<PsdCheck> {
    use PsdRejection::*;
    let n = g.vertex_count();
    let a = &w.matrix;
    if a.shape() != (n, n) {
        return Ok(PsdCheck::Rejected(WrongSize {
            expected: n,
            found: a.nrows(),
        }));
    }
    let dev = linalg::hermitian_deviation(a);
    if dev > tol {
        return Ok(PsdCheck::Rejected(NotSymmetric { deviation: dev }));
    }
    let (vals, vecs) = linalg::hermitian_eigen(a)?;
    if let Some(&low) = vals.last() {
        if low < -tol {
            return Ok(PsdCheck::Rejected(NotPsd { eigenvalue: low }));
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let value = a[(i, j)].norm();
            let nonzero = value > tol;
            if nonzero == g.has_edge(i, j) {
                return Ok(PsdCheck::Rejected(WrongPattern {
                    i,
                    j,
                    value,
                    expected_zero: g.has_edge(i, j),
                }));
            }
        }
    }
    if let Some(v) = (0..n).find(|&v| a[(v, v)].norm() <= tol) {
        return Ok(PsdCheck::Rejected(ZeroGramVector { vertex: v }));
    }
    let rank = linalg::matrix_rank(a, rank_tol);
    if rank > w.rank {
        return Ok(PsdCheck::Rejected(RankTooHigh {
            rank,
            claimed: w.rank,
        }));
    }
    let r = w.rank.max(1);
    // A = Σ_k λ_k u_k u_k†, so x_i[k] = sqrt(λ_k) conj(u_k[i]) gives <x_i, x_j> = A_ij.
    let vectors: Vec<CVector> = (0..n)
        .map(|i| {
            CVector::from_fn(r, |k, _| {
                if k < vals.len() {
                    C64::from(vals[k].max(0.0).sqrt()) * vecs[(i, k)].conj()
                } else {
                    C64::from(0.0)
                }
            })
        })
        .collect();
    let rep = OrthogonalRepresentation { dimension: r, vectors };
    if !verify_orthogonal_representation(g, &rep, tol)? {
        return Ok(PsdCheck::Rejected(GramFactorFails {
            overlap: max_edge_overlap(g, &rep.vectors),
        }));
    }
    Ok(PsdCheck::Accepted(rep))
}

/// Rank-1 quantum `N`-coloring of the Hadamard graph `G_N`:
/// `a_{uα}[j] = (-1)^{u_j} ω^{jα} / √N` with `ω = e^{2πi/N}`.
pub fn hadamard_quantum_coloring(bits: usize) -> Result<QuantumColoring> {
    if bits < 2 || bits % 2 == 1 {
        return Err(Error::InvalidArgument(format!(
            "hadamard coloring needs an even N >= 2, got {bits}"
        )));
    }
    if bits > 24 {
        return Err(Error::TooLarge { size: bits, limit: 24 });
    }
    let scale = 1.0 / (bits as f64).sqrt();
    let omega = |k: usize| C64::from_polar(scale, std::f64::consts::TAU * (k % bits) as f64 / bits as f64);
    let vectors = (0..1usize << bits)
        .map(|u| {
            (0..bits)
                .map(|alpha| {
                    CVector::from_fn(bits, |j, _| {
                        let sign = if (u >> j) & 1 == 1 { -1.0 } else { 1.0 };
                        omega(j * alpha) * sign
                    })
                })
                .collect()
        })
        .collect();
    Ok(QuantumColoring {
        colors: bits,
        rank: 1,
        measurements: Measurements::Vectors(vectors),
    })
}
