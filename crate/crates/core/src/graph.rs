//! Simple undirected graphs and the constructions used throughout the crate.
//!
//! Vertices are `0..n`. Edges are stored once with `u < v`, and every vertex
//! keeps a sorted neighbor list so iteration order is deterministic. Labels are
//! carried through constructions for readable certificates but take no part in
//! equality.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{self, CVector};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    labels: Option<Vec<String>>,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Graph {}

impl Graph {
    /// Builds a graph from an edge list, rejecting self-loops, out-of-range
    /// endpoints and duplicate edges (in either orientation).
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::VertexOutOfRange { u, v, n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            norm.push((u.min(v), u.max(v)));
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateEdge(w[0].0, w[0].1));
        }
        Ok(Self::from_sorted_edges(n, norm))
    }

    /// `edges` must already be sorted, deduplicated and oriented `u < v`.
    fn from_sorted_edges(n: usize, edges: Vec<(usize, usize)>) -> Self {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph {
            n,
            edges,
            adj,
            labels: None,
        }
    }

    pub fn empty(n: usize) -> Self {
        Self::from_sorted_edges(n, Vec::new())
    }

    /// `K_c`. Rejects `c = 0`.
    pub fn complete(c: usize) -> Result<Self> {
        if c == 0 {
            return Err(Error::InvalidArgument(
                "complete graph needs at least one vertex".into(),
            ));
        }
        let mut edges = Vec::with_capacity(c * (c - 1) / 2);
        for u in 0..c {
            for v in u + 1..c {
                edges.push((u, v));
            }
        }
        Ok(Self::from_sorted_edges(c, edges))
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidArgument(format!(
                "cycle needs at least 3 vertices, got {n}"
            )));
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn petersen() -> Self {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
        }
        Self::new(10, &edges).expect("petersen edge list is valid")
    }

    /// Erdős–Rényi `G(n, p)` from a seeded generator.
    pub fn random(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        Self::from_sorted_edges(n, edges)
    }

    /// Cartesian product `G □ H`.
    ///
    /// Vertex `(v, i)` gets index `v * |V(H)| + i`; `(v, i) ~ (w, j)` iff
    /// `v = w` and `i ~ j` in `H`, or `v ~ w` in `G` and `i = j`.
    pub fn cartesian_product(g: &Graph, h: &Graph) -> Graph {
        let m = h.n;
        let idx = |v: usize, i: usize| v * m + i;
        let mut edges = Vec::with_capacity(g.n * h.edges.len() + m * g.edges.len());
        for v in 0..g.n {
            for &(i, j) in &h.edges {
                edges.push((idx(v, i), idx(v, j)));
            }
        }
        for &(v, w) in &g.edges {
            for i in 0..m {
                edges.push((idx(v, i), idx(w, i)));
            }
        }
        edges.sort_unstable();
        let mut out = Self::from_sorted_edges(g.n * m, edges);
        out.labels = Some(
            (0..g.n)
                .flat_map(|v| (0..m).map(move |i| (v, i)))
                .map(|(v, i)| format!("({},{})", g.label(v), h.label(i)))
                .collect(),
        );
        out
    }

    /// Hadamard graph on `{0,1}^N`: `u ~ v` iff their Hamming distance is `N/2`.
    ///
    /// Bit `j` of the vertex index is coordinate `u_j`. Odd `N` is rejected.
    pub fn hadamard(bits: usize) -> Result<Self> {
        if bits < 2 || bits % 2 == 1 {
            return Err(Error::InvalidArgument(format!(
                "hadamard graph needs an even N >= 2 so that N/2 is integral, got {bits}"
            )));
        }
        if bits > 24 {
            return Err(Error::TooLarge {
                size: bits,
                limit: 24,
            });
        }
        let n = 1usize << bits;
        let masks: Vec<usize> = (0..n)
            .filter(|m| m.count_ones() as usize == bits / 2)
            .collect();
        let mut edges = Vec::with_capacity(n * masks.len() / 2);
        for u in 0..n {
            for &m in &masks {
                let v = u ^ m;
                if u < v {
                    edges.push((u, v));
                }
            }
        }
        edges.sort_unstable();
        let mut g = Self::from_sorted_edges(n, edges);
        g.labels = Some(
            (0..n)
                .map(|u| (0..bits).map(|j| if (u >> j) & 1 == 1 { '1' } else { '0' }).collect())
                .collect(),
        );
        Ok(g)
    }

    /// One vertex per vector, an edge wherever `|<u, v>| <= tol`.
    pub fn orthogonality(vectors: &[CVector], tol: f64) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::InvalidArgument(
                "orthogonality graph of an empty vector set".into(),
            ));
        }
        let d = vectors[0].len();
        if let Some(v) = vectors.iter().find(|v| v.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: v.len(),
            });
        }
        let mut edges = Vec::new();
        for (i, u) in vectors.iter().enumerate() {
            for (j, v) in vectors.iter().enumerate().skip(i + 1) {
                if linalg::inner(u, v)?.norm() <= tol {
                    edges.push((i, j));
                }
            }
        }
        Ok(Self::from_sorted_edges(vectors.len(), edges))
    }

    pub fn complement(&self) -> Graph {
        let mut edges = Vec::with_capacity(self.n * self.n.saturating_sub(1) / 2 - self.edges.len());
        for u in 0..self.n {
            let mut nb = self.adj[u].iter().peekable();
            for v in u + 1..self.n {
                while nb.next_if(|&&w| w < v).is_some() {}
                if nb.peek() == Some(&&v) {
                    continue;
                }
                edges.push((u, v));
            }
        }
        let mut out = Self::from_sorted_edges(self.n, edges);
        out.labels = self.labels.clone();
        out
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, lexicographically sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn label(&self, v: usize) -> String {
        match &self.labels {
            Some(l) => l[v].clone(),
            None => v.to_string(),
        }
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Ordered pairs `(v, w)` on which the coloring-game referee may ask:
    /// `(v, v)` for all `v` and both orientations of every edge.
    pub fn legal_question_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs: Vec<_> = (0..self.n).map(|v| (v, v)).collect();
        for &(u, v) in &self.edges {
            pairs.push((u, v));
            pairs.push((v, u));
        }
        pairs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::C64;
    use proptest::prelude::*;

    #[test]
    fn make_graph_examples() {
        let k3 = Graph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        assert_eq!(k3, Graph::complete(3).unwrap());
        assert!(matches!(Graph::new(2, &[(0, 0)]), Err(Error::SelfLoop(0))));
        assert!(matches!(
            Graph::new(4, &[(0, 1), (1, 0)]),
            Err(Error::DuplicateEdge(0, 1))
        ));
        assert!(matches!(
            Graph::new(2, &[(0, 2)]),
            Err(Error::VertexOutOfRange { .. })
        ));
    }

    #[test]
    fn complete_graph_sizes() {
        assert_eq!(Graph::complete(1).unwrap().edge_count(), 0);
        assert_eq!(Graph::complete(4).unwrap().edge_count(), 6);
        assert_eq!(Graph::complete(6).unwrap().edge_count(), 15);
        assert!(Graph::complete(0).is_err());
    }

    #[test]
    fn cartesian_product_examples() {
        let k2 = Graph::complete(2).unwrap();
        let sq = Graph::cartesian_product(&k2, &k2);
        assert_eq!(sq, Graph::cycle(4).unwrap().relabel(&[0, 1, 3, 2]));

        let c5 = Graph::cycle(5).unwrap();
        let single = Graph::empty(1);
        assert_eq!(Graph::cartesian_product(&single, &c5), c5);

        let k3 = Graph::complete(3).unwrap();
        let p = Graph::cartesian_product(&k3, &k3);
        assert_eq!(p.vertex_count(), 9);
        // enumerate the edge rule directly
        let mut count = 0;
        for a in 0..9 {
            for b in a + 1..9 {
                let (v, i, w, j) = (a / 3, a % 3, b / 3, b % 3);
                if (v == w && i != j) || (v != w && i == j) {
                    count += 1;
                    assert!(p.has_edge(a, b));
                }
            }
        }
        assert_eq!(count, 18);
        assert_eq!(p.edge_count(), 18);
        assert_eq!(p.label(5), "(1,2)");
    }

    #[test]
    fn hadamard_examples() {
        let g2 = Graph::hadamard(2).unwrap();
        assert_eq!(g2.vertex_count(), 4);
        assert_eq!(g2.edge_count(), 4);
        assert!((0..4).all(|v| g2.degree(v) == 2));

        let g4 = Graph::hadamard(4).unwrap();
        assert_eq!(g4.vertex_count(), 16);
        assert_eq!(g4.edge_count(), 48);
        assert!((0..16).all(|v| g4.degree(v) == 6));
        assert_eq!(g4.label(1), "1000");

        assert!(Graph::hadamard(3).is_err());
        assert!(Graph::hadamard(0).is_err());
    }

    #[test]
    fn orthogonality_examples() {
        let basis: Vec<CVector> = (0..3).map(|i| linalg::basis_vector(3, i)).collect();
        assert_eq!(
            Graph::orthogonality(&basis, 1e-9).unwrap(),
            Graph::complete(3).unwrap()
        );
        let s = 0.5f64.sqrt();
        let two = vec![
            linalg::basis_vector(2, 0),
            CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]),
        ];
        assert_eq!(Graph::orthogonality(&two, 1e-9).unwrap().edge_count(), 0);
        assert!(Graph::orthogonality(&[], 1e-9).is_err());
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::complete(5).unwrap().complement().edge_count(), 0);
        let c5 = Graph::cycle(5).unwrap();
        let cc = c5.complement();
        assert_eq!(cc.edge_count(), 5);
        // 0-2-4-1-3-0 is the complementary pentagon
        let iso = cc.relabel(&[0, 3, 1, 4, 2]);
        assert_eq!(iso, c5);
    }

    #[test]
    fn petersen_is_cubic() {
        let p = Graph::petersen();
        assert_eq!(p.edge_count(), 15);
        assert!((0..10).all(|v| p.degree(v) == 3));
    }

    impl Graph {
        /// Vertex `v` of `self` becomes vertex `perm[v]`.
        fn relabel(&self, perm: &[usize]) -> Graph {
            let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (perm[u], perm[v])).collect();
            Graph::new(self.n, &edges).unwrap()
        }
    }

    fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
        (1..=max_n, any::<u64>(), 0.0..1.0f64).prop_map(|(n, seed, p)| Graph::random(n, p, seed))
    }

    proptest! {
        #[test]
        fn product_sizes(g in arb_graph(7), h in arb_graph(7)) {
            let p = Graph::cartesian_product(&g, &h);
            prop_assert_eq!(p.vertex_count(), g.vertex_count() * h.vertex_count());
            prop_assert_eq!(
                p.edge_count(),
                g.vertex_count() * h.edge_count() + h.vertex_count() * g.edge_count()
            );
        }

        #[test]
        fn complement_is_involution(g in arb_graph(12)) {
            prop_assert_eq!(g.complement().complement(), g.clone());
            let n = g.vertex_count();
            prop_assert_eq!(g.edge_count() + g.complement().edge_count(), n * (n - 1) / 2);
        }

        #[test]
        fn hadamard_xor_automorphism(mask in 0usize..256) {
            let g = Graph::hadamard(8).unwrap();
            for &(u, v) in g.edges().iter().step_by(37) {
                prop_assert!(g.has_edge(u ^ mask, v ^ mask));
            }
            prop_assert_eq!(g.degree(mask), 70);
        }

        #[test]
        fn orthogonality_phase_invariant(phases in proptest::collection::vec(0.0..std::f64::consts::TAU, 6)) {
            let s = 0.5f64.sqrt();
            let mut vs = vec![
                linalg::basis_vector(2, 0),
                linalg::basis_vector(2, 1),
                CVector::from_vec(vec![C64::new(s, 0.0), C64::new(s, 0.0)]),
                CVector::from_vec(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]),
                CVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, s)]),
                CVector::from_vec(vec![C64::new(s, 0.0), C64::new(0.0, -s)]),
            ];
            let before = Graph::orthogonality(&vs, 1e-9).unwrap();
            for (v, t) in vs.iter_mut().zip(&phases) {
                *v *= C64::from_polar(1.0, *t);
            }
            prop_assert_eq!(Graph::orthogonality(&vs, 1e-9).unwrap(), before);
        }
    }
}
