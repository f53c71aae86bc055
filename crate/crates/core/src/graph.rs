//! Simple labelled graphs with an indexed edge list and a cached triangle count.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use serde::{Deserialize, Serialize};

use crate::degree::DegreeSequence;
use crate::error::{Error, Result};
use crate::rng::ChainRng;

pub type Vertex = usize;

/// Read-only adjacency queries shared by [`Graph`] and edge-masked views.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;
    fn has_edge(&self, u: Vertex, v: Vertex) -> bool;
    /// Neighbours of `v` in increasing label order.
    fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_;

    fn degree(&self, v: Vertex) -> usize {
        self.neighbors(v).count()
    }

    /// Size of `N(u) ∩ N(v)` minus the vertices in `exclude`.
    fn common_neighbors_excluding(&self, u: Vertex, v: Vertex, exclude: &[Vertex]) -> usize {
        self.neighbors(u)
            .filter(|&w| !exclude.contains(&w) && self.has_edge(v, w))
            .count()
    }
}

#[inline]
fn ordered(u: Vertex, v: Vertex) -> (Vertex, Vertex) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

#[inline]
fn pair_key(u: Vertex, v: Vertex) -> u64 {
    let (a, b) = ordered(u, v);
    ((a as u64) << 32) | b as u64
}

/// A simple undirected graph on vertices `0..n`.
///
/// Neighbour lists are kept sorted, and the edge list supports O(1) uniform
/// sampling and swap-removal through a pair-to-index map. The triangle count
/// is maintained incrementally by every mutation.
#[derive(Debug, Clone)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    edges: Vec<(Vertex, Vertex)>,
    index: HashMap<u64, usize>,
    triangles: usize,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.adj == other.adj
    }
}

impl Eq for Graph {}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.adj.len()
    }

    #[inline]
    fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].iter().copied()
    }

    fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    fn common_neighbors_excluding(&self, u: Vertex, v: Vertex, exclude: &[Vertex]) -> usize {
        sorted_intersection(&self.adj[u], &self.adj[v])
            .filter(|w| !exclude.contains(w))
            .count()
    }
}

/// Merge-intersection of two sorted neighbour lists.
fn sorted_intersection<'a>(a: &'a [Vertex], b: &'a [Vertex]) -> impl Iterator<Item = Vertex> + 'a {
    let (mut i, mut j) = (0, 0);
    std::iter::from_fn(move || {
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let w = a[i];
                    i += 1;
                    j += 1;
                    return Some(w);
                }
            }
        }
        None
    })
}

impl Graph {
    /// Empty graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            adj: vec![Vec::new(); n],
            edges: Vec::new(),
            index: HashMap::new(),
            triangles: 0,
        }
    }

    /// Builds a graph from an edge list, rejecting loops, repeated edges and
    /// out-of-range labels.
    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::Parse(format!(
                    "edge ({u}, {v}) out of range for n = {n}"
                )));
            }
            if u == v {
                return Err(Error::Parse(format!("loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::Parse(format!("repeated edge ({u}, {v})")));
            }
            g.insert_edge(u, v);
        }
        Ok(g)
    }

    /// Realizes `d` by Havel-Hakimi.
    ///
    /// Without a seed the construction is canonical: the unsatisfied vertex of
    /// highest residual degree (lowest label on ties) is joined to the next
    /// highest residual vertices (lowest label on ties). With a seed, ties
    /// among equal residual degrees are broken by a seeded shuffle.
    pub fn from_degree_sequence(d: &DegreeSequence, seed: Option<u64>) -> Result<Self> {
        let n = d.n();
        let mut residual: Vec<usize> = d.degrees().to_vec();
        // tie-break key per vertex; label order unless shuffled
        let mut key: Vec<usize> = (0..n).collect();
        if let Some(seed) = seed {
            let mut rng = ChainRng::seed_from_u64(seed);
            key.shuffle(&mut rng);
        }
        let mut g = Graph::empty(n);
        let mut order: Vec<Vertex> = (0..n).collect();
        loop {
            order.sort_by(|&a, &b| residual[b].cmp(&residual[a]).then(key[a].cmp(&key[b])));
            let v = order[0];
            let r = residual[v];
            if r == 0 {
                break;
            }
            let targets: Vec<Vertex> = order[1..].iter().copied().take(r).collect();
            if targets.len() < r || targets.iter().any(|&w| residual[w] == 0) {
                return Err(Error::NonGraphical(d.to_string()));
            }
            residual[v] = 0;
            for w in targets {
                residual[w] -= 1;
                g.insert_edge(v, w);
            }
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(u, v)` with `u < v`, in index order.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> (Vertex, Vertex) {
        self.edges[i]
    }

    pub fn neighbor_slice(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    /// Cached triangle count.
    pub fn triangles(&self) -> usize {
        self.triangles
    }

    /// Recounts triangles from scratch: for each edge `uv`, `|N(u) ∩ N(v)|`,
    /// summed and divided by three.
    pub fn count_triangles(&self) -> usize {
        let s: usize = self
            .edges
            .iter()
            .map(|&(u, v)| sorted_intersection(&self.adj[u], &self.adj[v]).count())
            .sum();
        s / 3
    }

    /// All triangles `[i, j, k]` with `i < j < k`, sorted.
    pub fn triangle_set(&self) -> Vec<[Vertex; 3]> {
        let mut out = Vec::new();
        for &(u, v) in &self.edges {
            for w in sorted_intersection(&self.adj[u], &self.adj[v]) {
                if w > v {
                    out.push([u, v, w]);
                }
            }
        }
        out.sort_unstable();
        out
    }

    pub fn common_neighbors(&self, u: Vertex, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        sorted_intersection(&self.adj[u], &self.adj[v])
    }

    /// Sorted edge list, independent of the internal edge order.
    pub fn sorted_edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }

    /// Exact bitset encoding of the edge set; requires `n <= 16`.
    pub fn edge_bits(&self) -> u128 {
        let n = self.n();
        assert!(n <= 16, "edge_bits supports at most 16 vertices");
        self.edges
            .iter()
            .fold(0u128, |acc, &(u, v)| acc | (1u128 << pair_bit(n, u, v)))
    }

    /// Inverse of [`Graph::edge_bits`].
    pub fn from_edge_bits(n: usize, bits: u128) -> Self {
        let mut g = Graph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if bits >> pair_bit(n, u, v) & 1 == 1 {
                    g.insert_edge(u, v);
                }
            }
        }
        g
    }

    /// Inserts `uv`, updating the triangle count. The caller guarantees
    /// that `uv` is absent and `u != v`.
    pub(crate) fn insert_edge(&mut self, u: Vertex, v: Vertex) {
        debug_assert!(u != v && !self.has_edge(u, v));
        self.triangles += sorted_intersection(&self.adj[u], &self.adj[v]).count();
        let pos = self.adj[u].binary_search(&v).unwrap_err();
        self.adj[u].insert(pos, v);
        let pos = self.adj[v].binary_search(&u).unwrap_err();
        self.adj[v].insert(pos, u);
        self.index.insert(pair_key(u, v), self.edges.len());
        self.edges.push(ordered(u, v));
    }

    /// Removes `uv` by swap-remove, updating the triangle count.
    pub(crate) fn delete_edge(&mut self, u: Vertex, v: Vertex) {
        let i = self
            .index
            .remove(&pair_key(u, v))
            .expect("delete_edge on a missing edge");
        let last = self.edges.len() - 1;
        if i != last {
            let moved = self.edges[last];
            self.edges[i] = moved;
            self.index.insert(pair_key(moved.0, moved.1), i);
        }
        self.edges.pop();
        let pos = self.adj[u].binary_search(&v).unwrap();
        self.adj[u].remove(pos);
        let pos = self.adj[v].binary_search(&u).unwrap();
        self.adj[v].remove(pos);
        self.triangles -= sorted_intersection(&self.adj[u], &self.adj[v]).count();
    }

    /// Writes the JSON header line followed by one `u v` line per edge.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> Result<()> {
        let header = GraphHeader {
            n: self.n(),
            degrees: self.degrees(),
            t: self.triangles,
        };
        writeln!(w, "{}", serde_json::to_string(&header)?)?;
        for (u, v) in self.sorted_edges() {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    /// Parses the format produced by [`Graph::write_edge_list`]. The header
    /// is checked against the parsed edges; lines starting with `#` are
    /// ignored.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Self> {
        let mut header: Option<GraphHeader> = None;
        let mut edges = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line.starts_with('{') {
                if header.is_some() {
                    return Err(Error::Parse(format!("line {}: second header", lineno + 1)));
                }
                header = Some(serde_json::from_str(line)?);
                continue;
            }
            let mut it = line.split_whitespace();
            let parse = |tok: Option<&str>| -> Result<Vertex> {
                tok.ok_or_else(|| Error::Parse(format!("line {}: expected 'u v'", lineno + 1)))?
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad vertex label", lineno + 1)))
            };
            let u = parse(it.next())?;
            let v = parse(it.next())?;
            if it.next().is_some() {
                return Err(Error::Parse(format!(
                    "line {}: trailing tokens",
                    lineno + 1
                )));
            }
            edges.push((u, v));
        }
        let header = header.ok_or_else(|| Error::Parse("missing JSON header".into()))?;
        let g = Graph::from_edges(header.n, &edges)?;
        if g.degrees() != header.degrees {
            return Err(Error::Parse(
                "header degrees do not match the edge list".into(),
            ));
        }
        if g.triangles() != header.t {
            return Err(Error::Parse(
                "header triangle count does not match the edge list".into(),
            ));
        }
        Ok(g)
    }

    /// Human-readable adjacency dump for diagnostics.
    pub fn describe(&self) -> String {
        let mut s = String::new();
        for (v, nb) in self.adj.iter().enumerate() {
            let _ = writeln!(s, "{v}: {nb:?}");
        }
        s
    }
}

/// Header line of the edge-list file format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphHeader {
    pub n: usize,
    pub degrees: Vec<usize>,
    pub t: usize,
}

/// Bit position of the pair `{u, v}` in the row-major upper triangle.
#[inline]
pub fn pair_bit(n: usize, u: Vertex, v: Vertex) -> usize {
    let (a, b) = ordered(u, v);
    a * n - a * (a + 1) / 2 + (b - a - 1)
}
