//! The coloring game: strategies, exact winning probabilities, the consistency
//! conditions and the normal form of winning quantum strategies.
//!
//! The referee's question distribution is not fixed by the game; the default
//! here is uniform over the legal ordered pairs `(v, v)` and `(v, w)` with
//! `vw ∈ E`. Winning with certainty does not depend on the choice as long as
//! every legal pair has positive weight.
//!
//! Answers `α ≥ c` are allowed to appear as POVM outcomes (for instance a
//! trailing zero element) but always lose.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chromatic::ColoringCertificate;
use crate::graph::Graph;
use crate::linalg::{self, CMatrix, CVector, C64};
use crate::reps::QuantumColoring;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QuestionDistribution {
    pairs: Vec<(usize, usize)>,
    weights: Vec<f64>,
}

impl QuestionDistribution {
    /// Uniform over `(v, v)` and both orientations of every edge.
    pub fn uniform(g: &Graph) -> Self {
        let pairs = g.legal_question_pairs();
        let w = 1.0 / pairs.len().max(1) as f64;
        QuestionDistribution {
            weights: vec![w; pairs.len()],
            pairs,
        }
    }

    pub fn new(g: &Graph, entries: Vec<((usize, usize), f64)>) -> Result<Self> {
        let mut total = 0.0;
        for &((v, w), p) in &entries {
            let legal = v < g.vertex_count() && w < g.vertex_count() && (v == w || g.has_edge(v, w));
            if !legal {
                return Err(Error::InvalidArgument(format!("({v}, {w}) is not a legal question pair")));
            }
            if !(p >= 0.0 && p.is_finite()) {
                return Err(Error::InvalidArgument(format!("weight {p} for ({v}, {w})")));
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("weights sum to {total}")));
        }
        let (pairs, weights) = entries.into_iter().unzip();
        Ok(QuestionDistribution { pairs, weights })
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pairs.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

fn answer_wins(v: usize, w: usize, a: usize, b: usize, colors: usize) -> bool {
    a < colors && b < colors && ((v == w) == (a == b))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassicalStrategy {
    pub colors: usize,
    pub alice: Vec<usize>,
    pub bob: Vec<usize>,
}

impl ClassicalStrategy {
    pub fn new(colors: usize, alice: Vec<usize>, bob: Vec<usize>) -> Result<Self> {
        if alice.len() != bob.len() {
            return Err(Error::DimensionMismatch {
                expected: alice.len(),
                found: bob.len(),
            });
        }
        if let Some(&a) = alice.iter().chain(&bob).find(|&&a| a >= colors) {
            return Err(Error::InvalidArgument(format!("color {a} outside 0..{colors}")));
        }
        Ok(ClassicalStrategy { colors, alice, bob })
    }

    /// Both players answer with the same coloring.
    pub fn from_coloring(cert: &ColoringCertificate) -> Self {
        ClassicalStrategy {
            colors: cert.colors,
            alice: cert.assignment.clone(),
            bob: cert.assignment.clone(),
        }
    }

    fn check_cover(&self, g: &Graph) -> Result<()> {
        if self.alice.len() < g.vertex_count() {
            return Err(Error::MissingVertex {
                what: "classical strategy",
                vertex: self.alice.len(),
            });
        }
        Ok(())
    }

    fn wins(&self, v: usize, w: usize) -> bool {
        answer_wins(v, w, self.alice[v], self.bob[w], self.colors)
    }
}

pub fn classical_win_probability(g: &Graph, s: &ClassicalStrategy, q: &QuestionDistribution) -> Result<f64> {
    s.check_cover(g)?;
    Ok(q.iter().filter(|&((v, w), _)| s.wins(v, w)).map(|(_, p)| p).sum())
}

/// `(won, total)` over the legal ordered pairs, i.e. the exact uniform win probability.
pub fn classical_win_count(g: &Graph, s: &ClassicalStrategy) -> Result<(u64, u64)> {
    s.check_cover(g)?;
    let pairs = g.legal_question_pairs();
    let won = pairs.iter().filter(|&&(v, w)| s.wins(v, w)).count();
    Ok((won as u64, pairs.len() as u64))
}

/// Largest strategy space [`max_classical_win_count`] will enumerate.
pub const ENUMERATION_LIMIT: u64 = 1 << 26;

/// Best `(won, total)` over all `c^n × c^n` deterministic strategy pairs under
/// the uniform distribution, with a strategy attaining it.
pub fn max_classical_win_count(g: &Graph, c: usize) -> Result<(u64, u64, ClassicalStrategy)> {
    if c == 0 {
        return Err(Error::InvalidArgument("need at least one color".into()));
    }
    let n = g.vertex_count();
    let space = (c as u64).checked_pow(2 * n as u32).filter(|&s| s <= ENUMERATION_LIMIT);
    let Some(space) = space else {
        return Err(Error::TooLarge {
            size: 2 * n,
            limit: ENUMERATION_LIMIT as usize,
        });
    };
    let pairs = g.legal_question_pairs();
    let decode = |mut code: u64, out: &mut [usize]| {
        for slot in out.iter_mut() {
            *slot = (code % c as u64) as usize;
            code /= c as u64;
        }
    };
    let mut best = (0u64, None);
    let mut alice = vec![0; n];
    let mut bob = vec![0; n];
    let half = (c as u64).pow(n as u32);
    debug_assert_eq!(half * half, space);
    'outer: for a in 0..half {
        decode(a, &mut alice);
        for b in 0..half {
            decode(b, &mut bob);
            let won = pairs
                .iter()
                .filter(|&&(v, w)| answer_wins(v, w, alice[v], bob[w], c))
                .count() as u64;
            if won > best.0 || best.1.is_none() {
                best = (won, Some((alice.clone(), bob.clone())));
                if won == pairs.len() as u64 {
                    break 'outer;
                }
            }
        }
    }
    let (alice, bob) = best.1.expect("at least one strategy");
    Ok((best.0, pairs.len() as u64, ClassicalStrategy { colors: c, alice, bob }))
}

/// Shared state `ψ ∈ C^dA ⊗ C^dB` and one POVM per vertex for each player.
///
/// Each vertex may have more than `colors` elements; outcomes `≥ colors` lose.
#[derive(Clone, Debug, PartialEq)]
pub struct PovmStrategy {
    pub colors: usize,
    pub dim_a: usize,
    pub dim_b: usize,
    pub state: CVector,
    pub alice: Vec<Vec<CMatrix>>,
    pub bob: Vec<Vec<CMatrix>>,
}

impl PovmStrategy {
    pub fn new(
        colors: usize,
        dim_a: usize,
        dim_b: usize,
        state: CVector,
        alice: Vec<Vec<CMatrix>>,
        bob: Vec<Vec<CMatrix>>,
        tol: f64,
    ) -> Result<Self> {
        let s = PovmStrategy {
            colors,
            dim_a,
            dim_b,
            state,
            alice,
            bob,
        };
        s.validate(tol)?;
        Ok(s)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        if self.colors == 0 {
            return Err(Error::InvalidArgument("need at least one color".into()));
        }
        if self.state.len() != self.dim_a * self.dim_b {
            return Err(Error::DimensionMismatch {
                expected: self.dim_a * self.dim_b,
                found: self.state.len(),
            });
        }
        let norm = self.state.norm();
        if (norm - 1.0).abs() > tol {
            return Err(Error::InvalidArgument(format!("state has norm {norm}")));
        }
        if self.alice.len() != self.bob.len() {
            return Err(Error::InvalidArgument(format!(
                "Alice has {} measurements, Bob has {}",
                self.alice.len(),
                self.bob.len()
            )));
        }
        for (side, fams, d) in [("Alice", &self.alice, self.dim_a), ("Bob", &self.bob, self.dim_b)] {
            for (v, fam) in fams.iter().enumerate() {
                validate_povm(fam, d, tol).map_err(|e| match e {
                    Error::InvalidArgument(m) => Error::InvalidArgument(format!("{side}, vertex {v}: {m}")),
                    other => other,
                })?;
            }
        }
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.alice.len()
    }

    /// Maximally entangled state of dimension `r·c` with `E = P`, `F = conj(P)`.
    pub fn from_quantum_coloring(qc: &QuantumColoring) -> Self {
        let d = qc.local_dimension();
        let n = qc.vertex_count();
        let alice: Vec<Vec<CMatrix>> = (0..n)
            .map(|v| (0..qc.colors).map(|a| qc.projector(v, a)).collect())
            .collect();
        let bob = alice
            .iter()
            .map(|fam| fam.iter().map(linalg::conj).collect())
            .collect();
        PovmStrategy {
            colors: qc.colors,
            dim_a: d,
            dim_b: d,
            state: linalg::maximally_entangled(d),
            alice,
            bob,
        }
    }

    /// A deterministic strategy as a one-dimensional quantum strategy.
    pub fn from_classical(s: &ClassicalStrategy) -> Self {
        let fam = |color: usize| {
            (0..s.colors)
                .map(|a| CMatrix::from_element(1, 1, C64::from(if a == color { 1.0 } else { 0.0 })))
                .collect()
        };
        PovmStrategy {
            colors: s.colors,
            dim_a: 1,
            dim_b: 1,
            state: CVector::from_element(1, C64::from(1.0)),
            alice: s.alice.iter().map(|&a| fam(a)).collect(),
            bob: s.bob.iter().map(|&b| fam(b)).collect(),
        }
    }

    fn check_cover(&self, g: &Graph) -> Result<()> {
        if self.vertex_count() < g.vertex_count() {
            return Err(Error::MissingVertex {
                what: "strategy",
                vertex: self.vertex_count(),
            });
        }
        Ok(())
    }
}

fn validate_povm(fam: &[CMatrix], d: usize, tol: f64) -> Result<()> {
    if fam.is_empty() {
        return Err(Error::InvalidArgument("empty measurement".into()));
    }
    let mut sum = CMatrix::zeros(d, d);
    for (k, e) in fam.iter().enumerate() {
        if e.shape() != (d, d) {
            return Err(Error::InvalidArgument(format!(
                "element {k} has shape {:?}, expected ({d}, {d})",
                e.shape()
            )));
        }
        if linalg::hermitian_deviation(e) > tol {
            return Err(Error::InvalidArgument(format!("element {k} is not Hermitian")));
        }
        let (vals, _) = linalg::hermitian_eigen(e)?;
        if let Some(&low) = vals.last() {
            if low < -tol {
                return Err(Error::NotPsd(low));
            }
        }
        sum += e;
    }
    let dev = linalg::max_abs_diff(&sum, &CMatrix::identity(d, d));
    if dev > tol {
        return Err(Error::InvalidArgument(format!(
            "elements sum to the identity only within {dev:.3e}"
        )));
    }
    Ok(())
}

/// `Ψ† E Ψ` for every Alice element, so that `P(α, β) = Σ_jl M_jl F_jl`.
struct Compiled<'a> {
    s: &'a PovmStrategy,
    m: Vec<Vec<CMatrix>>,
}

impl<'a> Compiled<'a> {
    fn new(s: &'a PovmStrategy) -> Result<Self> {
        let psi = linalg::state_matrix(&s.state, s.dim_a, s.dim_b)?;
        let psi_dag = psi.adjoint();
        let m = s
            .alice
            .iter()
            .map(|fam| fam.iter().map(|e| &psi_dag * e * &psi).collect())
            .collect();
        Ok(Compiled { s, m })
    }

    fn prob(&self, v: usize, a: usize, w: usize, b: usize) -> f64 {
        let m = &self.m[v][a];
        let f = &self.s.bob[w][b];
        m.iter().zip(f.iter()).map(|(x, y)| x * y).sum::<C64>().re
    }

    fn distribution(&self, v: usize, w: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.s.alice[v].len(), self.s.bob[w].len(), |a, b| self.prob(v, a, w, b))
    }
}

/// `P(α, β) = <ψ| E_{vα} ⊗ F_{wβ} |ψ>` for Alice asked `v` and Bob asked `w`.
pub fn quantum_outcome_distribution(s: &PovmStrategy, v: usize, w: usize) -> Result<DMatrix<f64>> {
    let n = s.vertex_count();
    if v >= n || w >= n {
        return Err(Error::MissingVertex {
            what: "strategy",
            vertex: v.max(w),
        });
    }
    let psi = linalg::state_matrix(&s.state, s.dim_a, s.dim_b)?;
    let psi_dag = psi.adjoint();
    Ok(DMatrix::from_fn(s.alice[v].len(), s.bob[w].len(), |a, b| {
        let m = &psi_dag * &s.alice[v][a] * &psi;
        m.iter().zip(s.bob[w][b].iter()).map(|(x, y)| x * y).sum::<C64>().re
    }))
}

pub fn quantum_win_probability(g: &Graph, s: &PovmStrategy, q: &QuestionDistribution) -> Result<f64> {
    s.check_cover(g)?;
    let c = Compiled::new(s)?;
    let mut total = 0.0;
    for ((v, w), p) in q.iter() {
        if p == 0.0 {
            continue;
        }
        let d = c.distribution(v, w);
        let won: f64 = d
            .row_iter()
            .enumerate()
            .flat_map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .filter(move |&(b, _)| answer_wins(v, w, a, b, s.colors))
                    .map(|(_, &x)| x)
                    .collect::<Vec<_>>()
            })
            .sum();
        total += p * won;
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConsistencyViolation {
    /// Same vertex, different answers.
    SameVertex { v: usize, alpha: usize, beta: usize, probability: f64 },
    /// Adjacent vertices (Alice asked `v`, Bob asked `w`), same answer.
    Edge { v: usize, w: usize, alpha: usize, probability: f64 },
    /// An answer outside `0..c` on a legal question pair.
    IllegalColor { v: usize, w: usize, alpha: usize, beta: usize, probability: f64 },
}

/// Every losing outcome with probability above `tol`, over all legal
/// question pairs. Empty iff the strategy wins with certainty.
pub fn check_consistency(s: &PovmStrategy, g: &Graph, tol: f64) -> Result<Vec<ConsistencyViolation>> {
    s.check_cover(g)?;
    let comp = Compiled::new(s)?;
    let comp = &comp;
    let n = g.vertex_count();
    let threads = std::thread::available_parallelism().map_or(1, |t| t.get()).min(n.max(1));
    let chunk = n.div_ceil(threads.max(1)).max(1);
    let mut out = Vec::new();
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|start| scope.spawn(move || violations_from(comp, g, start..(start + chunk).min(n), tol)))
            .collect();
        for h in handles {
            out.extend(h.join().expect("consistency worker panicked"));
        }
    });
    Ok(out)
}

fn violations_from(
    comp: &Compiled,
    g: &Graph,
    range: std::ops::Range<usize>,
    tol: f64,
) -> Vec<ConsistencyViolation> {
    let s = comp.s;
    let c = s.colors;
    let mut out = Vec::new();
    for v in range {
        let (ka, kb) = (s.alice[v].len(), s.bob[v].len());
        for a in 0..ka {
            for b in 0..kb {
                if answer_wins(v, v, a, b, c) {
                    continue;
                }
                let probability = comp.prob(v, a, v, b);
                if probability > tol {
                    out.push(if a == b {
                        ConsistencyViolation::IllegalColor { v, w: v, alpha: a, beta: b, probability }
                    } else {
                        ConsistencyViolation::SameVertex { v, alpha: a, beta: b, probability }
                    });
                }
            }
        }
        for &w in g.neighbors(v) {
            let kb = s.bob[w].len();
            for a in 0..ka.min(kb).min(c) {
                let probability = comp.prob(v, a, w, a);
                if probability > tol {
                    out.push(ConsistencyViolation::Edge { v, w, alpha: a, probability });
                }
            }
            if ka > c || kb > c {
                for a in 0..ka {
                    for b in 0..kb {
                        if a >= c || b >= c {
                            let probability = comp.prob(v, a, w, b);
                            if probability > tol {
                                out.push(ConsistencyViolation::IllegalColor { v, w, alpha: a, beta: b, probability });
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct NormalizationStep {
    pub stage: &'static str,
    pub strategy: PovmStrategy,
    pub win_probability: f64,
}

#[derive(Clone, Debug)]
pub struct NormalizationTrace {
    /// Schmidt coefficients of the input state, descending.
    pub schmidt_coefficients: Vec<f64>,
    pub schmidt_rank: usize,
    /// Projector onto the span of Alice's retained Schmidt vectors.
    pub support_projector: CMatrix,
    /// Alice's reduced state `Tr_B |ψ><ψ|`.
    pub reduced_state: CMatrix,
    /// Common rank `r` of the output projectors.
    pub rank: usize,
    pub steps: Vec<NormalizationStep>,
}

pub const STAGES: [&str; 5] = [
    "schmidt restriction",
    "support replacement",
    "conjugation",
    "flattening",
    "padding",
];

/// Brings a winning strategy to normal form:
///
/// 1. restrict both sides to the Schmidt support, in the Schmidt bases;
/// 2. replace `E_vα` by `supp(Λ F_vα^T Λ)` and `F_vα` by `supp(Λ E_vα^T Λ)`,
///    dropping outcomes beyond `c` (their supports vanish);
/// 3. check `E_vα = conj(F_vα)`;
/// 4. replace the Schmidt coefficients by `1/√d`;
/// 5. pad to local dimension `d·c` with `E_vα = Σ_i E_{v,α+i} ⊗ |i><i|` so all
///    projectors share rank `d`.
///
/// Each stage re-validates the strategy and re-checks consistency; a failed
/// check aborts with the stage name. Rank decisions whose eigenvalue falls
/// within three decades below the cutoff are refused as ambiguous.
pub fn normalize_strategy(
    s: &PovmStrategy,
    g: &Graph,
    tol: f64,
    rank_tol: f64,
) -> Result<(PovmStrategy, NormalizationTrace)> {
    s.validate(tol)?;
    let violations = check_consistency(s, g, tol)?;
    if !violations.is_empty() {
        return Err(Error::NotWinning(violations.len()));
    }
    let q = QuestionDistribution::uniform(g);
    let mut steps = Vec::new();
    let mut record = |stage: &'static str, st: &PovmStrategy| -> Result<()> {
        st.validate(tol).map_err(|e| Error::StageFailed {
            stage,
            reason: e.to_string(),
        })?;
        let v = check_consistency(st, g, tol)?;
        if let Some(first) = v.first() {
            return Err(Error::StageFailed {
                stage,
                reason: format!("{} consistency violations, first {first:?}", v.len()),
            });
        }
        steps.push(NormalizationStep {
            stage,
            strategy: st.clone(),
            win_probability: quantum_win_probability(g, st, &q)?,
        });
        Ok(())
    };

    // 1. Schmidt restriction
    let sd = linalg::schmidt(&s.state, s.dim_a, s.dim_b, rank_tol)?;
    let top = sd.coefficients[0];
    if let Some(&l) = sd
        .coefficients
        .iter()
        .find(|&&l| l > rank_tol * 1e-3 * top && l <= rank_tol * top)
    {
        return Err(Error::AmbiguousRank {
            stage: STAGES[0],
            value: l / top,
        });
    }
    let d = sd.rank;
    let left = CMatrix::from_columns(&sd.left[..d]);
    let right = CMatrix::from_columns(&sd.right[..d]);
    let kept: f64 = sd.coefficients[..d].iter().map(|l| l * l).sum::<f64>().sqrt();
    let lambda: Vec<f64> = sd.coefficients[..d].iter().map(|l| l / kept).collect();
    let mut state = CVector::zeros(d * d);
    for (i, &l) in lambda.iter().enumerate() {
        state[i * d + i] = C64::from(l);
    }
    let restrict = |fams: &[Vec<CMatrix>], basis: &CMatrix| -> Vec<Vec<CMatrix>> {
        fams.iter()
            .map(|fam| fam.iter().map(|e| basis.adjoint() * e * basis).collect())
            .collect()
    };
    let restricted = PovmStrategy {
        colors: s.colors,
        dim_a: d,
        dim_b: d,
        state,
        alice: restrict(&s.alice, &left),
        bob: restrict(&s.bob, &right),
    };
    record(STAGES[0], &restricted)?;

    // 2. support replacement
    let c = s.colors;
    let lam = CMatrix::from_diagonal(&CVector::from_iterator(d, lambda.iter().map(|&l| C64::from(l))));
    let cutoff = rank_tol * lambda[d - 1] * lambda[d - 1];
    let support = |x: &CMatrix, v: usize, k: usize| -> Result<CMatrix> {
        let sandwiched = &lam * x.transpose() * &lam;
        let (vals, vecs) = linalg::hermitian_eigen(&sandwiched)?;
        if let Some(&l) = vals.iter().find(|&&l| l > cutoff * 1e-3 && l <= cutoff) {
            return Err(Error::AmbiguousRank {
                stage: STAGES[1],
                value: l,
            });
        }
        let mut p = CMatrix::zeros(d, d);
        for (j, &l) in vals.iter().enumerate() {
            if l > cutoff {
                let col = vecs.column(j);
                p += col * col.adjoint();
            }
        }
        if k >= c && vals[0] > cutoff {
            return Err(Error::StageFailed {
                stage: STAGES[1],
                reason: format!("vertex {v}: outcome {k} has nonzero support"),
            });
        }
        Ok(p)
    };
    let replace = |src: &[Vec<CMatrix>]| -> Result<Vec<Vec<CMatrix>>> {
        src.iter()
            .enumerate()
            .map(|(v, fam)| {
                let mut out = Vec::with_capacity(c);
                for k in 0..fam.len().max(c) {
                    let p = match fam.get(k) {
                        Some(x) => support(x, v, k)?,
                        None => CMatrix::zeros(d, d),
                    };
                    if k < c {
                        out.push(p);
                    }
                }
                Ok(out)
            })
            .collect()
    };
    let supported = PovmStrategy {
        alice: replace(&restricted.bob)?,
        bob: replace(&restricted.alice)?,
        ..restricted.clone()
    };
    record(STAGES[1], &supported)?;

    // 3. conjugation
    let mut worst = 0.0f64;
    for (ea, fb) in supported.alice.iter().zip(&supported.bob) {
        for (e, f) in ea.iter().zip(fb) {
            worst = worst.max(linalg::max_abs_diff(e, &linalg::conj(f)));
        }
    }
    if worst > tol {
        return Err(Error::StageFailed {
            stage: STAGES[2],
            reason: format!("E and conj(F) differ by {worst:.3e}"),
        });
    }
    let conjugated = PovmStrategy {
        bob: supported
            .alice
            .iter()
            .map(|fam| fam.iter().map(linalg::conj).collect())
            .collect(),
        ..supported
    };
    record(STAGES[2], &conjugated)?;

    // 4. flattening
    let flat = PovmStrategy {
        state: linalg::maximally_entangled(d),
        ..conjugated
    };
    record(STAGES[3], &flat)?;

    // 5. padding
    let dim = d * c;
    let shifts: Vec<CMatrix> = (0..c)
        .map(|i| CMatrix::from_diagonal(&linalg::basis_vector(c, i)))
        .collect();
    let alice: Vec<Vec<CMatrix>> = flat
        .alice
        .iter()
        .map(|fam| {
            (0..c)
                .map(|a| {
                    let mut e = CMatrix::zeros(dim, dim);
                    for (i, shift) in shifts.iter().enumerate() {
                        e += linalg::kron(&fam[(a + i) % c], shift);
                    }
                    e
                })
                .collect()
        })
        .collect();
    let bob = alice
        .iter()
        .map(|fam| fam.iter().map(linalg::conj).collect())
        .collect();
    let padded = PovmStrategy {
        colors: c,
        dim_a: dim,
        dim_b: dim,
        state: linalg::maximally_entangled(dim),
        alice,
        bob,
    };
    record(STAGES[4], &padded)?;
    let flags = normal_form_flags(&padded, g, tol, rank_tol)?;
    if !flags.all() {
        return Err(Error::StageFailed {
            stage: STAGES[4],
            reason: format!("output is not in normal form: {flags:?}"),
        });
    }

    let psi = linalg::state_matrix(&s.state, s.dim_a, s.dim_b)?;
    let trace = NormalizationTrace {
        schmidt_coefficients: sd.coefficients.clone(),
        schmidt_rank: d,
        support_projector: &left * left.adjoint(),
        reduced_state: &psi * psi.adjoint(),
        rank: d,
        steps,
    };
    Ok((padded, trace))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NormalFormFlags {
    /// Every element is a projector, all of one common positive rank, `c` per vertex.
    pub projective_uniform_rank: bool,
    /// The state is `Σ_i |ii>/√d` in the computational basis.
    pub maximally_entangled: bool,
    /// `E_vα = conj(F_vα)` entrywise.
    pub conjugate: bool,
    /// `<E_vα, E_wα> = 0` on every edge.
    pub edge_orthogonal: bool,
    /// No consistency violations.
    pub wins: bool,
    pub rank: Option<usize>,
}

impl NormalFormFlags {
    pub fn all(&self) -> bool {
        self.projective_uniform_rank && self.maximally_entangled && self.conjugate && self.edge_orthogonal && self.wins
    }
}

pub fn normal_form_flags(s: &PovmStrategy, g: &Graph, tol: f64, rank_tol: f64) -> Result<NormalFormFlags> {
    s.check_cover(g)?;
    let mut ranks = Vec::new();
    let mut projective = true;
    for fam in s.alice.iter().chain(&s.bob) {
        projective &= fam.len() == s.colors;
        for e in fam {
            projective &= linalg::is_projector(e, tol);
            ranks.push(linalg::matrix_rank(e, rank_tol));
        }
    }
    let rank = ranks.first().copied().filter(|&r| r > 0 && ranks.iter().all(|&x| x == r));
    let maximally_entangled =
        s.dim_a == s.dim_b && (&s.state - linalg::maximally_entangled(s.dim_a)).camax() <= tol;
    let conjugate = s.alice.iter().zip(&s.bob).all(|(ea, fb)| {
        ea.len() == fb.len() && ea.iter().zip(fb).all(|(e, f)| linalg::max_abs_diff(e, &linalg::conj(f)) <= tol)
    });
    let mut edge_orthogonal = true;
    for &(u, v) in g.edges() {
        for (e, f) in s.alice[u].iter().zip(&s.alice[v]) {
            edge_orthogonal &= linalg::hs_inner(e, f)?.norm() <= tol;
        }
    }
    Ok(NormalFormFlags {
        projective_uniform_rank: projective && rank.is_some(),
        maximally_entangled,
        conjugate,
        edge_orthogonal,
        wins: check_consistency(s, g, tol)?.is_empty(),
        rank,
    })
}

#[derive(Clone, Debug)]
pub enum Strategy {
    Classical(ClassicalStrategy),
    Quantum(PovmStrategy),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimulationResult {
    pub rounds: u64,
    pub wins: u64,
    pub rate: f64,
}

/// Plays `rounds` independent rounds with questions drawn from `q` and
/// outcomes drawn from the exact outcome distribution.
pub fn simulate_game(
    g: &Graph,
    s: &Strategy,
    q: &QuestionDistribution,
    rounds: u64,
    seed: u64,
) -> Result<SimulationResult> {
    if rounds == 0 {
        return Err(Error::InvalidArgument("rounds must be at least 1".into()));
    }
    let questions = WeightedIndex::new(q.iter().map(|(_, p)| p))
        .map_err(|e| Error::InvalidArgument(format!("question distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs: Vec<(usize, usize)> = q.iter().map(|(pair, _)| pair).collect();
    let mut wins = 0;
    match s {
        Strategy::Classical(cs) => {
            cs.check_cover(g)?;
            for _ in 0..rounds {
                let (v, w) = pairs[questions.sample(&mut rng)];
                wins += cs.wins(v, w) as u64;
            }
        }
        Strategy::Quantum(qs) => {
            qs.check_cover(g)?;
            let comp = Compiled::new(qs)?;
            let mut outcomes: HashMap<(usize, usize), (usize, WeightedIndex<f64>)> = HashMap::new();
            for _ in 0..rounds {
                let (v, w) = pairs[questions.sample(&mut rng)];
                let (cols, dist) = match outcomes.entry((v, w)) {
                    std::collections::hash_map::Entry::Occupied(e) => e.into_mut(),
                    std::collections::hash_map::Entry::Vacant(e) => {
                        let p = comp.distribution(v, w);
                        // row-major flattening; clamp rounding noise below zero
                        let weights: Vec<f64> = (0..p.nrows())
                            .flat_map(|a| (0..p.ncols()).map(move |b| (a, b)))
                            .map(|(a, b)| p[(a, b)].max(0.0))
                            .collect();
                        let dist = WeightedIndex::new(weights)
                            .map_err(|e| Error::Internal(format!("outcome distribution: {e}")))?;
                        e.insert((p.ncols(), dist))
                    }
                };
                let k = dist.sample(&mut rng);
                wins += answer_wins(v, w, k / *cols, k % *cols, qs.colors) as u64;
            }
        }
    }
    Ok(SimulationResult {
        rounds,
        wins,
        rate: wins as f64 / rounds as f64,
    })
}
