//! Exact classical parameters: clique number, c-colorability and chromatic number.
//!
//! Colorability is decided by DSATUR-style backtracking. One maximum clique is
//! pre-colored `0..k` for symmetry breaking, and a vertex never opens more than
//! one fresh color. Effort is metered in node expansions, so a run with the same
//! graph and budget always returns the same answer.

use serde::{Deserialize, Serialize};

use crate::graph::Graph;
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoringCertificate {
    pub colors: usize,
    pub assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Colorability {
    Yes(ColoringCertificate),
    No { nodes: u64 },
    BudgetExceeded { nodes: u64 },
}

#[derive(Clone, Debug)]
pub struct ChromaticResult {
    pub chi: usize,
    pub certificate: ColoringCertificate,
    /// A maximum clique; its size is the lower bound the search started from.
    pub clique: Vec<usize>,
    pub nodes: u64,
}

#[derive(Clone, Debug)]
pub struct CliqueResult {
    pub size: usize,
    pub clique: Vec<usize>,
    pub nodes: u64,
}

/// Checks properness. Errors if a vertex is uncolored or a color is out of range.
pub fn verify_coloring(g: &Graph, cert: &ColoringCertificate) -> Result<bool> {
    let n = g.vertex_count();
    if cert.assignment.len() < n {
        return Err(Error::MissingVertex {
            what: "coloring",
            vertex: cert.assignment.len(),
        });
    }
    if cert.assignment.len() > n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: cert.assignment.len(),
        });
    }
    if let Some((v, &c)) = cert
        .assignment
        .iter()
        .enumerate()
        .find(|(_, &c)| c >= cert.colors)
    {
        return Err(Error::InvalidArgument(format!(
            "vertex {v} has color {c}, but only {} colors are declared",
            cert.colors
        )));
    }
    Ok(g
        .edges()
        .iter()
        .all(|&(u, v)| cert.assignment[u] != cert.assignment[v]))
}

struct BitAdjacency {
    words: usize,
    rows: Vec<u64>,
}

impl BitAdjacency {
    fn new(g: &Graph) -> Self {
        let n = g.vertex_count();
        let words = n.div_ceil(64).max(1);
        let mut rows = vec![0u64; n * words];
        for &(u, v) in g.edges() {
            rows[u * words + v / 64] |= 1 << (v % 64);
            rows[v * words + u / 64] |= 1 << (u % 64);
        }
        BitAdjacency { words, rows }
    }

    #[inline]
    fn has(&self, u: usize, v: usize) -> bool {
        self.rows[u * self.words + v / 64] >> (v % 64) & 1 == 1
    }
}

/// Vertices in degeneracy order: repeatedly remove a vertex of minimum
/// remaining degree (lowest id on ties).
fn degeneracy_order(g: &Graph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut deg: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let maxd = deg.iter().copied().max().unwrap_or(0);
    let mut buckets: Vec<std::collections::BTreeSet<usize>> = vec![Default::default(); maxd + 1];
    for v in 0..n {
        buckets[deg[v]].insert(v);
    }
    for _ in 0..n {
        let d = buckets.iter().position(|b| !b.is_empty()).expect("vertices remain");
        let v = *buckets[d].iter().next().unwrap();
        buckets[d].remove(&v);
        removed[v] = true;
        order.push(v);
        for &w in g.neighbors(v) {
            if !removed[w] {
                buckets[deg[w]].remove(&w);
                deg[w] -= 1;
                buckets[deg[w]].insert(w);
            }
        }
    }
    order
}

struct CliqueSearch<'a> {
    adj: &'a BitAdjacency,
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl CliqueSearch<'_> {
    /// Greedy sequential coloring of `cands`; returns them sorted by color
    /// together with the color bound of each prefix.
    fn color_sort(&self, cands: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        for &v in cands {
            match classes
                .iter_mut()
                .find(|cls| cls.iter().all(|&u| !self.adj.has(u, v)))
            {
                Some(cls) => cls.push(v),
                None => classes.push(vec![v]),
            }
        }
        let mut order = Vec::with_capacity(cands.len());
        let mut bound = Vec::with_capacity(cands.len());
        for (k, cls) in classes.into_iter().enumerate() {
            for v in cls {
                order.push(v);
                bound.push(k + 1);
            }
        }
        (order, bound)
    }

    /// Returns false when the budget ran out.
    fn expand(&mut self, cands: Vec<usize>) -> bool {
        let (mut order, mut bound) = self.color_sort(&cands);
        while let Some(v) = order.pop() {
            let b = bound.pop().unwrap();
            if self.current.len() + b <= self.best.len() {
                return true;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return false;
            }
            self.current.push(v);
            let next: Vec<usize> = order.iter().copied().filter(|&u| self.adj.has(u, v)).collect();
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else if !self.expand(next) {
                return false;
            }
            self.current.pop();
        }
        true
    }
}

/// Exact clique number by branch and bound with greedy-coloring bounds.
///
/// On budget exhaustion returns `BudgetExceeded` whose `lower` is the best
/// clique found.
pub fn clique_number(g: &Graph, budget: u64) -> Result<CliqueResult> {
    let adj = BitAdjacency::new(g);
    clique_with(g, &adj, budget).map_err(|(best, nodes)| Error::BudgetExceeded {
        nodes,
        lower: best.len(),
        upper: g.vertex_count(),
    })
}

fn clique_with(
    g: &Graph,
    adj: &BitAdjacency,
    budget: u64,
) -> std::result::Result<CliqueResult, (Vec<usize>, u64)> {
    if g.vertex_count() == 0 {
        return Ok(CliqueResult {
            size: 0,
            clique: vec![],
            nodes: 0,
        });
    }
    let mut order = degeneracy_order(g);
    // highest-core vertices first
    order.reverse();
    let mut search = CliqueSearch {
        adj,
        best: vec![order[0]],
        current: vec![],
        nodes: 0,
        budget,
    };
    let done = search.expand(order);
    let mut clique = search.best;
    clique.sort_unstable();
    if done {
        Ok(CliqueResult {
            size: clique.len(),
            clique,
            nodes: search.nodes,
        })
    } else {
        Err((clique, search.nodes))
    }
}

fn greedy_clique(g: &Graph, adj: &BitAdjacency) -> Vec<usize> {
    let mut order = degeneracy_order(g);
    order.reverse();
    let mut clique: Vec<usize> = Vec::new();
    for v in order {
        if clique.iter().all(|&u| adj.has(u, v)) {
            clique.push(v);
        }
    }
    clique.sort_unstable();
    clique
}

struct ColorSearch<'a> {
    g: &'a Graph,
    c: usize,
    color: Vec<Option<usize>>,
    /// `nb_count[v * c + k]`: colored neighbors of `v` holding color `k`.
    nb_count: Vec<u32>,
    saturation: Vec<usize>,
    used: usize,
    colored: usize,
    nodes: u64,
    budget: u64,
}

enum Step {
    Found,
    Exhausted,
    OutOfBudget,
}

impl ColorSearch<'_> {
    fn assign(&mut self, v: usize, k: usize) {
        self.color[v] = Some(k);
        self.colored += 1;
        for &w in self.g.neighbors(v) {
            let slot = &mut self.nb_count[w * self.c + k];
            if *slot == 0 {
                self.saturation[w] += 1;
            }
            *slot += 1;
        }
    }

    fn unassign(&mut self, v: usize, k: usize) {
        self.color[v] = None;
        self.colored -= 1;
        for &w in self.g.neighbors(v) {
            let slot = &mut self.nb_count[w * self.c + k];
            *slot -= 1;
            if *slot == 0 {
                self.saturation[w] -= 1;
            }
        }
    }

    /// Highest saturation, lowest id on ties.
    fn pick(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for v in 0..self.g.vertex_count() {
            if self.color[v].is_none() && best.is_none_or(|b| self.saturation[v] > self.saturation[b]) {
                best = Some(v);
            }
        }
        best
    }

    fn solve(&mut self) -> Step {
        let Some(v) = self.pick() else {
            return Step::Found;
        };
        if self.saturation[v] >= self.c {
            return Step::Exhausted;
        }
        let limit = (self.used + 1).min(self.c);
        for k in 0..limit {
            if self.nb_count[v * self.c + k] != 0 {
                continue;
            }
            self.nodes += 1;
            if self.nodes > self.budget {
                return Step::OutOfBudget;
            }
            let prev_used = self.used;
            if k == self.used {
                self.used += 1;
            }
            self.assign(v, k);
            match self.solve() {
                Step::Exhausted => {}
                other => return other,
            }
            self.unassign(v, k);
            self.used = prev_used;
        }
        Step::Exhausted
    }
}

/// Decides whether `g` has a proper `c`-coloring.
///
/// "No" answers are exhaustive. A maximum clique (found within a slice of the
/// budget, otherwise greedily) is pre-colored first.
pub fn is_c_colorable(g: &Graph, c: usize, budget: u64) -> Result<Colorability> {
    if c == 0 {
        return Err(Error::InvalidArgument("color count must be at least 1".into()));
    }
    let adj = BitAdjacency::new(g);
    let clique = match clique_with(g, &adj, budget / 4) {
        Ok(r) => r.clique,
        Err(_) => greedy_clique(g, &adj),
    };
    Ok(colorable_with_clique(g, c, budget, &clique))
}

fn colorable_with_clique(g: &Graph, c: usize, budget: u64, clique: &[usize]) -> Colorability {
    let n = g.vertex_count();
    if clique.len() > c {
        return Colorability::No { nodes: 0 };
    }
    let mut s = ColorSearch {
        g,
        c,
        color: vec![None; n],
        nb_count: vec![0; n * c],
        saturation: vec![0; n],
        used: 0,
        colored: 0,
        nodes: 0,
        budget,
    };
    for (k, &v) in clique.iter().enumerate() {
        s.assign(v, k);
        s.used = k + 1;
    }
    match s.solve() {
        Step::Found => {
            debug_assert_eq!(s.colored, n);
            Colorability::Yes(ColoringCertificate {
                colors: c,
                assignment: s.color.into_iter().map(|k| k.expect("all colored")).collect(),
            })
        }
        Step::Exhausted => Colorability::No { nodes: s.nodes },
        Step::OutOfBudget => Colorability::BudgetExceeded { nodes: s.nodes },
    }
}

/// DSATUR without backtracking; an upper bound with certificate.
pub fn greedy_dsatur(g: &Graph) -> ColoringCertificate {
    let n = g.vertex_count();
    let c = n.max(1);
    let mut s = ColorSearch {
        g,
        c,
        color: vec![None; n],
        nb_count: vec![0; n * c],
        saturation: vec![0; n],
        used: 0,
        colored: 0,
        nodes: 0,
        budget: u64::MAX,
    };
    while let Some(v) = s.pick() {
        let k = (0..c)
            .find(|&k| s.nb_count[v * c + k] == 0)
            .expect("n colors always suffice");
        s.used = s.used.max(k + 1);
        s.assign(v, k);
    }
    ColoringCertificate {
        colors: s.used.max(usize::from(n > 0)),
        assignment: s.color.into_iter().map(|k| k.unwrap()).collect(),
    }
}

/// Exact chromatic number with a χ-coloring certificate.
///
/// Every `c` between the clique bound and `χ - 1` is refuted exhaustively.
/// `budget` caps the total node count over all sub-searches.
pub fn chromatic_number(g: &Graph, budget: u64) -> Result<ChromaticResult> {
    let n = g.vertex_count();
    let adj = BitAdjacency::new(g);
    let upper = greedy_dsatur(g);
    let mut nodes = 0u64;
    let clique = match clique_with(g, &adj, budget) {
        Ok(r) => {
            nodes += r.nodes;
            r.clique
        }
        Err((best, used)) => {
            return Err(Error::BudgetExceeded {
                nodes: used,
                lower: best.len(),
                upper: upper.colors,
            })
        }
    };
    if n == 0 {
        return Ok(ChromaticResult {
            chi: 0,
            certificate: ColoringCertificate {
                colors: 0,
                assignment: vec![],
            },
            clique,
            nodes,
        });
    }
    for c in clique.len()..upper.colors {
        match colorable_with_clique(g, c, budget.saturating_sub(nodes), &clique) {
            Colorability::Yes(cert) => {
                return Ok(ChromaticResult {
                    chi: c,
                    certificate: cert,
                    clique,
                    nodes,
                })
            }
            Colorability::No { nodes: k } => nodes += k,
            Colorability::BudgetExceeded { nodes: k } => {
                return Err(Error::BudgetExceeded {
                    nodes: nodes + k,
                    lower: c,
                    upper: upper.colors,
                })
            }
        }
    }
    Ok(ChromaticResult {
        chi: upper.colors,
        certificate: upper,
        clique,
        nodes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cert(colors: usize, a: &[usize]) -> ColoringCertificate {
        ColoringCertificate {
            colors,
            assignment: a.to_vec(),
        }
    }

    #[test]
    fn verify_examples() {
        let k3 = Graph::complete(3).unwrap();
        assert!(verify_coloring(&k3, &cert(3, &[0, 1, 2])).unwrap());
        assert!(!verify_coloring(&k3, &cert(3, &[0, 0, 1])).unwrap());
        assert!(verify_coloring(&Graph::empty(4), &cert(1, &[0, 0, 0, 0])).unwrap());
        assert!(matches!(
            verify_coloring(&k3, &cert(3, &[0, 1])),
            Err(Error::MissingVertex { vertex: 2, .. })
        ));
        assert!(verify_coloring(&k3, &cert(2, &[0, 1, 2])).is_err());
    }

    #[test]
    fn colorable_examples() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(matches!(is_c_colorable(&c5, 2, 1000).unwrap(), Colorability::No { .. }));
        match is_c_colorable(&c5, 3, 1000).unwrap() {
            Colorability::Yes(c) => assert!(verify_coloring(&c5, &c).unwrap()),
            other => panic!("{other:?}"),
        }
        assert!(is_c_colorable(&c5, 0, 10).is_err());
        assert!(matches!(
            is_c_colorable(&Graph::petersen(), 2, 0).unwrap(),
            Colorability::No { .. } | Colorability::BudgetExceeded { .. }
        ));
    }

    #[test]
    fn chromatic_examples() {
        assert_eq!(chromatic_number(&Graph::complete(6).unwrap(), 10_000).unwrap().chi, 6);
        assert_eq!(chromatic_number(&Graph::cycle(5).unwrap(), 10_000).unwrap().chi, 3);
        assert_eq!(chromatic_number(&Graph::petersen(), 10_000).unwrap().chi, 3);
        assert_eq!(chromatic_number(&Graph::empty(3), 10).unwrap().chi, 1);
        assert_eq!(chromatic_number(&Graph::empty(0), 10).unwrap().chi, 0);
    }

    #[test]
    fn clique_examples() {
        assert_eq!(clique_number(&Graph::complete(5).unwrap(), 1000).unwrap().size, 5);
        assert_eq!(clique_number(&Graph::cycle(5).unwrap(), 1000).unwrap().size, 2);
        assert_eq!(clique_number(&Graph::petersen(), 1000).unwrap().size, 2);
        assert_eq!(clique_number(&Graph::empty(3), 1000).unwrap().size, 1);
    }

    #[test]
    fn hadamard_eight() {
        // ω(G_8) = 8 meets a DSATUR coloring
        let r = chromatic_number(&Graph::hadamard(8).unwrap(), 100_000).unwrap();
        assert_eq!((r.chi, r.clique.len()), (8, 8));
    }

    #[test]
    fn budget_exhaustion_reports_bounds() {
        let g = Graph::random(60, 0.5, 11);
        match chromatic_number(&g, 50) {
            Err(Error::BudgetExceeded { lower, upper, .. }) => assert!(lower <= upper),
            other => panic!("expected budget exhaustion, got {other:?}"),
        }
    }

    /// Smallest c admitting a proper coloring, by enumerating all c^n maps.
    fn brute_chi(g: &Graph) -> usize {
        let n = g.vertex_count();
        if n == 0 {
            return 0;
        }
        for c in 1..=n {
            let total = c.pow(n as u32);
            for code in 0..total {
                let mut a = vec![0; n];
                let mut x = code;
                for slot in a.iter_mut() {
                    *slot = x % c;
                    x /= c;
                }
                if g.edges().iter().all(|&(u, v)| a[u] != a[v]) {
                    return c;
                }
            }
        }
        unreachable!()
    }

    fn brute_omega(g: &Graph) -> usize {
        let n = g.vertex_count();
        (0u32..1 << n)
            .filter(|&m| {
                (0..n).all(|u| {
                    (u + 1..n).all(|v| m >> u & 1 == 0 || m >> v & 1 == 0 || g.has_edge(u, v))
                })
            })
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap()
    }

    #[test]
    fn agrees_with_enumeration_small() {
        for seed in 0..120u64 {
            let n = 1 + (seed % 8) as usize;
            let g = Graph::random(n, 0.3 + 0.05 * (seed % 9) as f64, seed);
            let res = chromatic_number(&g, 1_000_000).unwrap();
            assert_eq!(res.chi, brute_chi(&g), "seed {seed}");
            assert!(verify_coloring(&g, &res.certificate).unwrap());
            let w = clique_number(&g, 1_000_000).unwrap();
            assert_eq!(w.size, brute_omega(&g), "seed {seed}");
            assert!(res.chi >= w.size);
            if res.chi > 1 {
                assert!(matches!(
                    is_c_colorable(&g, res.chi - 1, 1_000_000).unwrap(),
                    Colorability::No { .. }
                ));
            }
        }
    }
}
