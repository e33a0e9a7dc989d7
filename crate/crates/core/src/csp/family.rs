//! Graph and table families used as admissible sets.
//!
//! Members are 0/1 words over an [`EdgeSpace`] (group tables use letters
//! `0..p`, letter `x` standing for element `x + 1`). Unlike the word sets,
//! these families are not closed under arbitrary coordinate permutations.

use std::collections::BTreeSet;

use super::Assignment;
use crate::error::{CspError, Result};
use crate::graph::{EdgeSpace, UnionFind};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    SpanningTrees { n: usize },
    /// Spanning trees with every arc directed towards `root`.
    InArborescences { n: usize, root: usize },
    /// 2-regular spanning subgraphs.
    UndirectedCycleCovers { n: usize },
    /// Arc sets with in- and out-degree one everywhere; loops allowed.
    DirectedCycleCovers { n: usize },
    /// Perfect matchings of `K_{n,n}`; coordinate `(i-1)n + j` is `{i_A, j_B}`.
    BipartitePerfectMatchings { n: usize },
    DirectedPaths { n: usize, s: usize, t: usize },
    UndirectedPaths { n: usize, s: usize, t: usize },
    /// Edge sets of `k`-cliques.
    Cliques { n: usize, k: usize },
    HamiltonianCycles { n: usize },
    /// Group structures on `[p]`, written as `p x p` tables.
    GroupTables { p: usize },
}

impl Family {
    pub fn space(&self) -> EdgeSpace {
        match *self {
            Family::SpanningTrees { n }
            | Family::UndirectedCycleCovers { n }
            | Family::UndirectedPaths { n, .. }
            | Family::Cliques { n, .. }
            | Family::HamiltonianCycles { n } => EdgeSpace::Undirected(n),
            Family::InArborescences { n, .. } | Family::DirectedPaths { n, .. } => {
                EdgeSpace::Directed(n)
            }
            Family::DirectedCycleCovers { n } | Family::BipartitePerfectMatchings { n } => {
                EdgeSpace::Square(n)
            }
            Family::GroupTables { p } => EdgeSpace::Square(p),
        }
    }

    pub fn ell(&self) -> usize {
        self.space().len()
    }

    pub fn alphabet(&self) -> u32 {
        match self {
            Family::GroupTables { p } => *p as u32,
            _ => 2,
        }
    }

    pub fn contains(&self, a: &[u32]) -> bool {
        let space = self.space();
        if a.len() != space.len() || a.iter().any(|&x| x >= self.alphabet()) {
            return false;
        }
        if let Family::GroupTables { p } = *self {
            return is_group_table(p, a);
        }
        let edges = space.edges_of(a);
        let n = space.vertices();
        match *self {
            Family::SpanningTrees { n } => {
                let mut uf = UnionFind::new(n);
                edges.len() + 1 == n && edges.iter().all(|&(u, v)| uf.union(u, v))
            }
            Family::InArborescences { n, root } => {
                let mut parent = vec![0usize; n + 1];
                for &(u, v) in &edges {
                    if parent[u] != 0 {
                        return false;
                    }
                    parent[u] = v;
                }
                if parent[root] != 0 || edges.len() + 1 != n {
                    return false;
                }
                (1..=n).all(|mut v| {
                    for _ in 0..n {
                        if v == root {
                            return true;
                        }
                        v = parent[v];
                        if v == 0 {
                            return false;
                        }
                    }
                    v == root
                })
            }
            Family::UndirectedCycleCovers { .. } => undirected_degrees(n, &edges).iter().skip(1).all(|&d| d == 2),
            Family::DirectedCycleCovers { .. } | Family::BipartitePerfectMatchings { .. } => {
                let (outd, ind) = directed_degrees(n, &edges);
                (1..=n).all(|v| outd[v] == 1 && ind[v] == 1)
            }
            Family::DirectedPaths { s, t, .. } => is_directed_path(n, s, t, &edges),
            Family::UndirectedPaths { s, t, .. } => {
                let arcs = orient_path(n, s, &edges);
                arcs.is_some_and(|arcs| is_directed_path(n, s, t, &arcs))
            }
            Family::Cliques { k, .. } => {
                let verts: BTreeSet<usize> = edges.iter().flat_map(|&(u, v)| [u, v]).collect();
                if k <= 1 {
                    return edges.is_empty();
                }
                verts.len() == k && edges.len() == k * (k - 1) / 2
            }
            Family::HamiltonianCycles { .. } => {
                let mut uf = UnionFind::new(n);
                for &(u, v) in &edges {
                    uf.union(u, v);
                }
                n >= 3 && uf.components() == 1 && undirected_degrees(n, &edges).iter().skip(1).all(|&d| d == 2)
            }
            Family::GroupTables { .. } => unreachable!(),
        }
    }

    /// All members in lexicographic order, or a resource error when there
    /// are more than `budget` of them.
    pub fn enumerate(&self, budget: u64) -> Result<Vec<Assignment>> {
        let space = self.space();
        let too_many = || CspError::Resource(format!("family {self:?} has more than {budget} members"));
        let mut graphs: Vec<Vec<(usize, usize)>> = Vec::new();
        let push = |g: Vec<(usize, usize)>, graphs: &mut Vec<Vec<(usize, usize)>>| -> Result<()> {
            if graphs.len() as u64 >= budget {
                return Err(too_many());
            }
            graphs.push(g);
            Ok(())
        };
        match *self {
            Family::SpanningTrees { n } => {
                if n == 1 {
                    push(vec![], &mut graphs)?;
                } else {
                    let mut seq = vec![1usize; n - 2];
                    loop {
                        push(prufer_decode(n, &seq), &mut graphs)?;
                        if !next_word(&mut seq, 1, n) {
                            break;
                        }
                    }
                }
            }
            Family::InArborescences { n, root } => {
                let others: Vec<usize> = (1..=n).filter(|&v| v != root).collect();
                let mut choice = vec![1usize; others.len()];
                loop {
                    let arcs: Vec<(usize, usize)> =
                        others.iter().zip(&choice).map(|(&u, &v)| (u, v)).collect();
                    let word_ok = arcs.iter().all(|&(u, v)| u != v);
                    if word_ok {
                        let word = space.word(&arcs)?;
                        if self.contains(&word) {
                            push(arcs, &mut graphs)?;
                        }
                    }
                    if !next_word(&mut choice, 1, n) {
                        break;
                    }
                }
            }
            Family::UndirectedCycleCovers { n } => {
                let mut deg = vec![0usize; n + 1];
                let edges = space.edges();
                let mut chosen = Vec::new();
                regular_subgraphs(&edges, 0, n, &mut deg, &mut chosen, &mut |g| {
                    push(g.to_vec(), &mut graphs)
                })?;
            }
            Family::DirectedCycleCovers { n } | Family::BipartitePerfectMatchings { n } => {
                let mut perm: Vec<usize> = (1..=n).collect();
                loop {
                    push(perm.iter().enumerate().map(|(i, &j)| (i + 1, j)).collect(), &mut graphs)?;
                    if !next_permutation(&mut perm) {
                        break;
                    }
                }
            }
            Family::DirectedPaths { n, s, t } | Family::UndirectedPaths { n, s, t } => {
                let directed = matches!(self, Family::DirectedPaths { .. });
                let mut on_path = vec![false; n + 1];
                let mut path = vec![s];
                on_path[s] = true;
                simple_paths(n, t, &mut path, &mut on_path, &mut |p| {
                    let mut g: Vec<(usize, usize)> = p
                        .windows(2)
                        .map(|e| if directed { (e[0], e[1]) } else { (e[0].min(e[1]), e[0].max(e[1])) })
                        .collect();
                    g.sort_unstable();
                    push(g, &mut graphs)
                })?;
            }
            Family::Cliques { n, k } => {
                if k <= n {
                    let mut set: Vec<usize> = (1..=k).collect();
                    loop {
                        let mut g = Vec::new();
                        for (i, &u) in set.iter().enumerate() {
                            for &v in &set[i + 1..] {
                                g.push((u, v));
                            }
                        }
                        push(g, &mut graphs)?;
                        if !next_combination(&mut set, n) {
                            break;
                        }
                    }
                }
            }
            Family::HamiltonianCycles { n } => {
                if n >= 3 {
                    let mut rest: Vec<usize> = (2..=n).collect();
                    loop {
                        // each cycle once: fix vertex 1, keep second < last
                        if rest[0] < rest[rest.len() - 1] {
                            let mut cyc = vec![1];
                            cyc.extend(&rest);
                            let mut g: Vec<(usize, usize)> = (0..n)
                                .map(|i| {
                                    let (u, v) = (cyc[i], cyc[(i + 1) % n]);
                                    (u.min(v), u.max(v))
                                })
                                .collect();
                            g.sort_unstable();
                            push(g, &mut graphs)?;
                        }
                        if !next_permutation(&mut rest) {
                            break;
                        }
                    }
                }
            }
            Family::GroupTables { p } => {
                let mut tables = BTreeSet::new();
                let mut phi: Vec<usize> = (0..p).collect();
                loop {
                    tables.insert(cyclic_table(&phi));
                    if tables.len() as u64 > budget {
                        return Err(too_many());
                    }
                    if !next_permutation(&mut phi) {
                        break;
                    }
                }
                return Ok(tables.into_iter().collect());
            }
        }
        let mut words = graphs
            .iter()
            .map(|g| space.word(g))
            .collect::<Result<Vec<_>>>()?;
        words.sort();
        words.dedup();
        Ok(words)
    }
}

/// Table of the group on `[p]` that makes `x -> phi[x-1]` an isomorphism onto `Z_p`.
/// `phi` lists the images of `1..=p`.
pub fn cyclic_table(phi: &[usize]) -> Assignment {
    let p = phi.len();
    let mut inv = vec![0usize; p];
    for (x, &fx) in phi.iter().enumerate() {
        inv[fx] = x;
    }
    let mut table = vec![0u32; p * p];
    for x in 0..p {
        for y in 0..p {
            table[x * p + y] = inv[(phi[x] + phi[y]) % p] as u32;
        }
    }
    table
}

/// Group axioms for a `p x p` table over letters `0..p`.
pub fn is_group_table(p: usize, t: &[u32]) -> bool {
    if t.len() != p * p || t.iter().any(|&x| x as usize >= p) {
        return false;
    }
    let op = |x: usize, y: usize| t[x * p + y] as usize;
    for x in 0..p {
        for y in 0..p {
            for z in 0..p {
                if op(op(x, y), z) != op(x, op(y, z)) {
                    return false;
                }
            }
        }
    }
    let Some(e) = (0..p).find(|&e| (0..p).all(|x| op(e, x) == x && op(x, e) == x)) else {
        return false;
    };
    (0..p).all(|x| (0..p).any(|y| op(x, y) == e && op(y, x) == e))
}

fn undirected_degrees(n: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut deg = vec![0; n + 1];
    for &(u, v) in edges {
        deg[u] += 1;
        deg[v] += 1;
    }
    deg
}

fn directed_degrees(n: usize, arcs: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let mut outd = vec![0; n + 1];
    let mut ind = vec![0; n + 1];
    for &(u, v) in arcs {
        outd[u] += 1;
        ind[v] += 1;
    }
    (outd, ind)
}

fn is_directed_path(n: usize, s: usize, t: usize, arcs: &[(usize, usize)]) -> bool {
    if s == t || arcs.is_empty() {
        return false;
    }
    let mut next = vec![0usize; n + 1];
    for &(u, v) in arcs {
        if next[u] != 0 {
            return false;
        }
        next[u] = v;
    }
    let mut seen = vec![false; n + 1];
    let mut v = s;
    let mut steps = 0;
    while v != t {
        if seen[v] || next[v] == 0 {
            return false;
        }
        seen[v] = true;
        v = next[v];
        steps += 1;
    }
    steps == arcs.len()
}

/// Orients an undirected edge set as a walk out of `s`, if it is one.
fn orient_path(n: usize, s: usize, edges: &[(usize, usize)]) -> Option<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n + 1];
    for &(u, v) in edges {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut arcs = Vec::new();
    let (mut prev, mut cur) = (0, s);
    let mut seen = vec![false; n + 1];
    loop {
        seen[cur] = true;
        let nexts: Vec<usize> = adj[cur].iter().copied().filter(|&x| x != prev).collect();
        match nexts.as_slice() {
            [] => break,
            [x] if !seen[*x] => {
                arcs.push((cur, *x));
                prev = cur;
                cur = *x;
            }
            _ => return None,
        }
    }
    (arcs.len() == edges.len()).then_some(arcs)
}

fn prufer_decode(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n + 1];
    for &x in seq {
        degree[x] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &x in seq {
        let leaf = (1..=n).find(|&v| degree[v] == 1).unwrap();
        edges.push((leaf.min(x), leaf.max(x)));
        degree[leaf] -= 1;
        degree[x] -= 1;
    }
    let rest: Vec<usize> = (1..=n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges.sort_unstable();
    edges
}

/// Odometer over words with letters in `lo..=hi`.
fn next_word(w: &mut [usize], lo: usize, hi: usize) -> bool {
    for x in w.iter_mut().rev() {
        if *x < hi {
            *x += 1;
            return true;
        }
        *x = lo;
    }
    false
}

pub(crate) fn next_permutation<T: Ord>(a: &mut [T]) -> bool {
    if a.len() < 2 {
        return false;
    }
    let mut i = a.len() - 1;
    while i > 0 && a[i - 1] >= a[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = a.len() - 1;
    while a[j] <= a[i - 1] {
        j -= 1;
    }
    a.swap(i - 1, j);
    a[i..].reverse();
    true
}

/// Next `k`-subset of `[n]` in lexicographic order.
pub(crate) fn next_combination(set: &mut [usize], n: usize) -> bool {
    let k = set.len();
    for i in (0..k).rev() {
        if set[i] < n - (k - 1 - i) {
            set[i] += 1;
            for j in i + 1..k {
                set[j] = set[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn regular_subgraphs(
    edges: &[(usize, usize)],
    idx: usize,
    n: usize,
    deg: &mut Vec<usize>,
    chosen: &mut Vec<(usize, usize)>,
    f: &mut dyn FnMut(&[(usize, usize)]) -> Result<()>,
) -> Result<()> {
    if idx == edges.len() {
        if deg[1..].iter().all(|&d| d == 2) {
            f(chosen)?;
        }
        return Ok(());
    }
    let (u, v) = edges[idx];
    // u is the smaller endpoint; once all edges at u are decided it must be full
    let last_at_u = edges[idx + 1..].iter().all(|&(a, b)| a != u && b != u);
    if deg[u] < 2 && deg[v] < 2 {
        deg[u] += 1;
        deg[v] += 1;
        chosen.push((u, v));
        if !last_at_u || deg[u] == 2 {
            regular_subgraphs(edges, idx + 1, n, deg, chosen, f)?;
        }
        chosen.pop();
        deg[u] -= 1;
        deg[v] -= 1;
    }
    if !last_at_u || deg[u] == 2 {
        regular_subgraphs(edges, idx + 1, n, deg, chosen, f)?;
    }
    Ok(())
}

fn simple_paths(
    n: usize,
    t: usize,
    path: &mut Vec<usize>,
    on_path: &mut Vec<bool>,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    let cur = *path.last().unwrap();
    if cur == t {
        if path.len() > 1 {
            f(path)?;
        }
        return Ok(());
    }
    for v in 1..=n {
        if !on_path[v] {
            on_path[v] = true;
            path.push(v);
            simple_paths(n, t, path, on_path, f)?;
            path.pop();
            on_path[v] = false;
        }
    }
    Ok(())
}
