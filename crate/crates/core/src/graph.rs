//! Edge indexing and small graph helpers shared by the graph-valued
//! admissible sets, the solvers and the gadget constructions.
//!
//! Vertices are 1-based. A graph on `n` vertices is encoded as a 0/1 word
//! whose coordinates are the edges of an [`EdgeSpace`], in the order given
//! by [`EdgeSpace::edges`].

use serde::{Deserialize, Serialize};

use crate::csp::Assignment;
use crate::error::{input_err, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSpace {
    /// Unordered pairs `{i, j}`, `i < j`, in lexicographic order.
    Undirected(usize),
    /// Ordered pairs `(i, j)`, `i != j`, in lexicographic order.
    Directed(usize),
    /// All ordered pairs `(i, j)` including loops; index `(i-1)*n + j`.
    /// Also used for bipartite graphs `i_A -- j_B` and for `n x n` tables.
    Square(usize),
}

impl EdgeSpace {
    pub fn vertices(&self) -> usize {
        match *self {
            EdgeSpace::Undirected(n) | EdgeSpace::Directed(n) | EdgeSpace::Square(n) => n,
        }
    }

    pub fn len(&self) -> usize {
        match *self {
            EdgeSpace::Undirected(n) => n * n.saturating_sub(1) / 2,
            EdgeSpace::Directed(n) => n * n.saturating_sub(1),
            EdgeSpace::Square(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.vertices();
        let mut out = Vec::with_capacity(self.len());
        for i in 1..=n {
            for j in 1..=n {
                let keep = match self {
                    EdgeSpace::Undirected(_) => i < j,
                    EdgeSpace::Directed(_) => i != j,
                    EdgeSpace::Square(_) => true,
                };
                if keep {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// 1-based coordinate of an edge. Undirected edges may be given in either order.
    pub fn index(&self, u: usize, v: usize) -> Result<usize> {
        let n = self.vertices();
        if u == 0 || v == 0 || u > n || v > n {
            return Err(input_err!("edge ({u},{v}) outside vertex set [{n}]"));
        }
        match *self {
            EdgeSpace::Undirected(_) => {
                if u == v {
                    return Err(input_err!("loop ({u},{v}) in an undirected simple graph"));
                }
                let (i, j) = if u < v { (u, v) } else { (v, u) };
                // edges (1,*), .., (i-1,*) precede row i
                let before: usize = (1..i).map(|r| n - r).sum();
                Ok(before + (j - i))
            }
            EdgeSpace::Directed(_) => {
                if u == v {
                    return Err(input_err!("loop ({u},{v}) in a loop-free digraph"));
                }
                Ok((u - 1) * (n - 1) + if v < u { v } else { v - 1 })
            }
            EdgeSpace::Square(_) => Ok((u - 1) * n + v),
        }
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges()[index - 1]
    }

    pub fn word(&self, edges: &[(usize, usize)]) -> Result<Assignment> {
        let mut word = vec![0; self.len()];
        for &(u, v) in edges {
            word[self.index(u, v)? - 1] = 1;
        }
        Ok(word)
    }

    pub fn edges_of(&self, word: &[u32]) -> Vec<(usize, usize)> {
        self.edges()
            .into_iter()
            .zip(word)
            .filter(|(_, &x)| x == 1)
            .map(|(e, _)| e)
            .collect()
    }
}

/// Disjoint-set forest over vertices `1..=n`.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..=n).collect(),
            rank: vec![0; n + 1],
            components: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already connected.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        self.components -= 1;
        true
    }

    pub fn components(&self) -> usize {
        self.components
    }
}

/// Simple undirected graph on `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Graph {
    pub n: usize,
    pub edges: Vec<(usize, usize)>,
}

impl Graph {
    /// Normalizes edges to `u < v`, sorts and deduplicates; loops are rejected.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in edges {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(input_err!("edge ({u},{v}) outside vertex set [{n}]"));
            }
            if u == v {
                return Err(input_err!("loop at vertex {u} in a simple graph"));
            }
            out.push((u.min(v), u.max(v)));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, edges: out })
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.binary_search(&(u.min(v), u.max(v))).is_ok()
    }

    pub fn adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.n + 1]; self.n + 1];
        for &(u, v) in &self.edges {
            adj[u][v] = true;
            adj[v][u] = true;
        }
        adj
    }
}

/// Digraph on `[n]`; loops are allowed only when `loops` is set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Digraph {
    pub n: usize,
    pub arcs: Vec<(usize, usize)>,
}

impl Digraph {
    pub fn new(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>, loops: bool) -> Result<Self> {
        let mut out = Vec::new();
        for (u, v) in arcs {
            if u == 0 || v == 0 || u > n || v > n {
                return Err(input_err!("arc ({u},{v}) outside vertex set [{n}]"));
            }
            if u == v && !loops {
                return Err(input_err!("loop at vertex {u} where loops are not allowed"));
            }
            out.push((u, v));
        }
        out.sort_unstable();
        out.dedup();
        Ok(Self { n, arcs: out })
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.arcs.binary_search(&(u, v)).is_ok()
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.arcs.iter().filter(|a| a.1 == v).count()
    }

    pub fn out_degree(&self, u: usize) -> usize {
        self.arcs.iter().filter(|a| a.0 == u).count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_matches_enumeration_order() {
        for space in [
            EdgeSpace::Undirected(5),
            EdgeSpace::Directed(4),
            EdgeSpace::Square(3),
        ] {
            for (pos, (u, v)) in space.edges().into_iter().enumerate() {
                assert_eq!(space.index(u, v).unwrap(), pos + 1, "{space:?} ({u},{v})");
            }
            assert_eq!(space.edges().len(), space.len());
        }
    }

    #[test]
    fn word_round_trip() {
        let s = EdgeSpace::Undirected(4);
        let e = vec![(1, 2), (2, 3), (3, 4)];
        assert_eq!(s.edges_of(&s.word(&e).unwrap()), e);
    }

    #[test]
    fn union_find_counts_components() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(1, 2));
        assert!(!uf.union(2, 1));
        assert!(uf.union(3, 4));
        assert_eq!(uf.components(), 2);
    }
}
