//! Kochen-Specker and weak Kochen-Specker decisions on finite vector sets.
//!
//! A set is KS when no `{0,1}` labeling of its rays puts exactly one `1` in
//! every orthonormal basis contained in the set. It is weak KS when every such
//! labeling also labels some orthogonal pair `1, 1`. Both are decided together
//! by backtracking with unit propagation; [`brute_force_ks`] is the
//! independent enumeration oracle.
//!
//! Vectors in no basis are free under the exactly-one rule but still take part
//! in the orthogonal-pair rule of the weak property.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::linalg::{self, CVector, C64};
use crate::{Error, Result};

/// A ray: a unit vector with its phase fixed (first significant coordinate
/// real and positive), plus the ids of every input vector that collapsed onto it.
#[derive(Clone, Debug)]
pub struct Ray {
    pub ids: Vec<String>,
    pub vector: CVector,
}

impl Ray {
    pub fn id(&self) -> String {
        self.ids.join("=")
    }
}

#[derive(Clone, Debug)]
pub struct VectorSet {
    dimension: usize,
    tol: f64,
    rays: Vec<Ray>,
}

impl VectorSet {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn rays(&self) -> &[Ray] {
        &self.rays
    }

    pub fn len(&self) -> usize {
        self.rays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rays.is_empty()
    }

    pub fn vectors(&self) -> Vec<CVector> {
        self.rays.iter().map(|r| r.vector.clone()).collect()
    }

    /// Ids of rays that absorbed more than one input vector.
    pub fn merged(&self) -> Vec<Vec<String>> {
        self.rays
            .iter()
            .filter(|r| r.ids.len() > 1)
            .map(|r| r.ids.clone())
            .collect()
    }

    /// Rays as vertices (labeled by ray id), orthogonal rays adjacent.
    pub fn orthogonality_graph(&self) -> Result<Graph> {
        Graph::orthogonality(&self.vectors(), self.tol)?
            .with_labels(self.rays.iter().map(Ray::id).collect())
    }
}

/// Normalizes, fixes the global phase, and merges vectors that are equal up
/// to a unit-modulus scalar.
pub fn canonicalize(raw: &[(String, CVector)], tol: f64) -> Result<VectorSet> {
    let Some((_, first)) = raw.first() else {
        return Err(Error::InvalidArgument("empty vector set".into()));
    };
    let dimension = first.len();
    let mut rays: Vec<Ray> = Vec::new();
    for (id, v) in raw {
        if v.len() != dimension {
            return Err(Error::DimensionMismatch {
                expected: dimension,
                found: v.len(),
            });
        }
        if v.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument(format!("vector {id} has a non-finite entry")));
        }
        let norm = v.norm();
        if norm <= tol {
            return Err(Error::ZeroVector);
        }
        let unit = fix_phase(v / C64::from(norm));
        match rays
            .iter_mut()
            .find(|r| (1.0 - r.vector.dotc(&unit).norm()).abs() <= tol)
        {
            Some(r) => r.ids.push(id.clone()),
            None => rays.push(Ray {
                ids: vec![id.clone()],
                vector: unit,
            }),
        }
    }
    Ok(VectorSet {
        dimension,
        tol,
        rays,
    })
}

fn fix_phase(v: CVector) -> CVector {
    let pivot = v.iter().find(|z| z.norm() > 1e-6).copied();
    match pivot {
        Some(p) => {
            let phase = p.conj() / C64::from(p.norm());
            v * phase
        }
        None => v,
    }
}

/// All orthonormal bases contained in a set, as sorted ray-index lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisList {
    pub bases: Vec<Vec<usize>>,
}

impl BasisList {
    /// Number of bases each ray belongs to.
    pub fn membership(&self, rays: usize) -> Vec<usize> {
        let mut m = vec![0; rays];
        for b in &self.bases {
            for &r in b {
                m[r] += 1;
            }
        }
        m
    }
}

/// Size-`d` cliques of the orthogonality graph, found exhaustively.
pub fn enumerate_bases(set: &VectorSet) -> Result<BasisList> {
    let g = set.orthogonality_graph()?;
    let d = set.dimension;
    let mut bases = Vec::new();
    let mut current = Vec::with_capacity(d);
    extend_cliques(&g, d, 0, &mut current, &mut bases);
    Ok(BasisList { bases })
}

fn extend_cliques(g: &Graph, d: usize, from: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == d {
        out.push(cur.clone());
        return;
    }
    for v in from..g.vertex_count() {
        if cur.iter().all(|&u| g.has_edge(u, v)) {
            cur.push(v);
            extend_cliques(g, d, v + 1, cur, out);
            cur.pop();
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Ks,
    Weak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Backtracking,
    BruteForce,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KsDecision {
    /// The property that was asked about; see [`KsDecision::holds`].
    pub mode: Mode,
    pub is_ks: bool,
    pub is_weak_ks: bool,
    /// Present whenever `is_ks` is false. If `is_weak_ks` is also false it
    /// avoids orthogonal `1, 1` pairs too.
    pub witness: Option<Vec<u8>>,
    pub method: Method,
}

impl KsDecision {
    pub fn holds(&self) -> bool {
        match self.mode {
            Mode::Ks => self.is_ks,
            Mode::Weak => self.is_weak_ks,
        }
    }
}

/// Checks a labeling against exactly-one-per-basis and, if `weak`, against
/// the no-orthogonal-`1,1` rule.
pub fn validate_witness(set: &VectorSet, bases: &BasisList, labels: &[u8], weak: bool) -> Result<bool> {
    if labels.len() != set.len() || labels.iter().any(|&l| l > 1) {
        return Ok(false);
    }
    let one_each = bases
        .bases
        .iter()
        .all(|b| b.iter().filter(|&&r| labels[r] == 1).count() == 1);
    if !one_each || !weak {
        return Ok(one_each);
    }
    let g = set.orthogonality_graph()?;
    Ok(g.edges().iter().all(|&(u, v)| labels[u] == 0 || labels[v] == 0))
}

struct Propagator<'a> {
    bases: &'a [Vec<usize>],
    ray_bases: Vec<Vec<usize>>,
    /// Orthogonal neighbors; empty unless the weak rule is active.
    ortho: Vec<Vec<usize>>,
    label: Vec<Option<u8>>,
    trail: Vec<usize>,
}

impl Propagator<'_> {
    fn set(&mut self, r: usize, l: u8, queue: &mut Vec<usize>) -> bool {
        match self.label[r] {
            Some(x) => x == l,
            None => {
                self.label[r] = Some(l);
                self.trail.push(r);
                queue.push(r);
                true
            }
        }
    }

    fn propagate(&mut self, mut queue: Vec<usize>) -> bool {
        while let Some(r) = queue.pop() {
            if self.label[r] == Some(1) {
                for k in 0..self.ortho[r].len() {
                    let w = self.ortho[r][k];
                    if !self.set(w, 0, &mut queue) {
                        return false;
                    }
                }
            }
            for bi in 0..self.ray_bases[r].len() {
                let b = &self.bases[self.ray_bases[r][bi]];
                let mut ones = 0;
                let mut free = None;
                let mut free_count = 0;
                for &x in b {
                    match self.label[x] {
                        Some(1) => ones += 1,
                        Some(_) => {}
                        None => {
                            free_count += 1;
                            free = Some(x);
                        }
                    }
                }
                if ones > 1 || (ones == 0 && free_count == 0) {
                    return false;
                }
                if ones == 1 && free_count > 0 {
                    for k in 0..b.len() {
                        let x = b[k];
                        if self.label[x].is_none() && !self.set(x, 0, &mut queue) {
                            return false;
                        }
                    }
                } else if ones == 0 && free_count == 1 && !self.set(free.unwrap(), 1, &mut queue) {
                    return false;
                }
            }
        }
        true
    }

    fn undo_to(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let r = self.trail.pop().unwrap();
            self.label[r] = None;
        }
    }

    fn search(&mut self, order: &[usize], pos: usize) -> bool {
        let Some(idx) = (pos..order.len()).find(|&i| self.label[order[i]].is_none()) else {
            return true;
        };
        let r = order[idx];
        for l in [0u8, 1] {
            let mark = self.trail.len();
            let mut q = Vec::new();
            if self.set(r, l, &mut q) && self.propagate(q) && self.search(order, idx + 1) {
                return true;
            }
            self.undo_to(mark);
        }
        false
    }
}

/// Exhaustive search for a labeling; rays are tried in order of decreasing
/// basis membership, label 0 before 1.
fn find_labeling(set: &VectorSet, bases: &BasisList, weak: bool) -> Result<Option<Vec<u8>>> {
    let n = set.len();
    let mut ray_bases = vec![Vec::new(); n];
    for (i, b) in bases.bases.iter().enumerate() {
        for &r in b {
            ray_bases[r].push(i);
        }
    }
    let ortho = if weak {
        let g = set.orthogonality_graph()?;
        (0..n).map(|v| g.neighbors(v).to_vec()).collect()
    } else {
        vec![Vec::new(); n]
    };
    let membership = bases.membership(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&r| (std::cmp::Reverse(membership[r]), r));
    let mut p = Propagator {
        bases: &bases.bases,
        ray_bases,
        ortho,
        label: vec![None; n],
        trail: Vec::new(),
    };
    Ok(p
        .search(&order, 0)
        .then(|| p.label.iter().map(|l| l.unwrap_or(0)).collect()))
}

fn decide(set: &VectorSet, mode: Mode) -> Result<KsDecision> {
    let bases = enumerate_bases(set)?;
    let ks_witness = find_labeling(set, &bases, false)?;
    let (is_weak_ks, witness) = match ks_witness {
        None => (true, None),
        Some(w) => match find_labeling(set, &bases, true)? {
            Some(weak) => (false, Some(weak)),
            None => (true, Some(w)),
        },
    };
    Ok(KsDecision {
        mode,
        is_ks: witness.is_none(),
        is_weak_ks,
        witness,
        method: Method::Backtracking,
    })
}

/// Decides the KS property (and, since the two share all the work, the weak
/// one as well).
pub fn ks_check(set: &VectorSet) -> Result<KsDecision> {
    decide(set, Mode::Ks)
}

/// Decides the weak KS property; `is_ks` is filled in too.
pub fn weak_ks_check(set: &VectorSet) -> Result<KsDecision> {
    decide(set, Mode::Weak)
}

pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Enumerates all `2^n` labelings. Test oracle for [`ks_check`].
pub fn brute_force_ks(set: &VectorSet, mode: Mode) -> Result<KsDecision> {
    let n = set.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge {
            size: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let bases: Vec<u32> = enumerate_bases(set)?
        .bases
        .iter()
        .map(|b| b.iter().fold(0u32, |m, &r| m | 1 << r))
        .collect();
    let g = set.orthogonality_graph()?;
    let pairs: Vec<u32> = g.edges().iter().map(|&(u, v)| 1 << u | 1 << v).collect();

    let mut first_ks = None;
    let mut first_weak = None;
    for mask in 0u32..(1u32 << n) {
        if !bases.iter().all(|&b| (mask & b).count_ones() == 1) {
            continue;
        }
        first_ks.get_or_insert(mask);
        if pairs.iter().all(|&p| mask & p != p) {
            first_weak = Some(mask);
            break;
        }
    }
    let labels = |m: u32| (0..n).map(|r| (m >> r & 1) as u8).collect::<Vec<u8>>();
    Ok(KsDecision {
        mode,
        is_ks: first_ks.is_none(),
        is_weak_ks: first_weak.is_none(),
        witness: first_weak.or(first_ks).map(labels),
        method: Method::BruteForce,
    })
}

/// Bundled vector sets: `cabello-18` (d = 4), `peres-33` (d = 3), `yu-oh-13` (d = 3).
pub fn bundled(name: &str) -> Result<VectorSet> {
    let text = match name {
        "cabello-18" => include_str!("../data/cabello-18.json"),
        "peres-33" => include_str!("../data/peres-33.json"),
        "yu-oh-13" => include_str!("../data/yu-oh-13.json"),
        other => {
            return Err(Error::InvalidArgument(format!("no bundled vector set named {other}")))
        }
    };
    Ok(crate::io::parse_vector_set(text)?.0)
}

pub const BUNDLED: [&str; 3] = ["cabello-18", "peres-33", "yu-oh-13"];

/// Canonicalizes unnamed vectors, naming them `v0, v1, ...`.
pub fn from_vectors(vectors: &[CVector], tol: f64) -> Result<VectorSet> {
    let raw: Vec<(String, CVector)> = vectors
        .iter()
        .enumerate()
        .map(|(i, v)| (format!("v{i}"), v.clone()))
        .collect();
    canonicalize(&raw, tol)
}

/// The rays `{e_0, ..., e_{d-1}}`.
pub fn computational_basis(d: usize) -> VectorSet {
    let vs: Vec<CVector> = (0..d).map(|i| linalg::basis_vector(d, i)).collect();
    from_vectors(&vs, crate::DEFAULT_TOL).expect("basis vectors are valid")
}
