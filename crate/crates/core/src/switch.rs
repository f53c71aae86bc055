//! Switches: degree-preserving exchanges of two vertex-disjoint edges.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph, Vertex};

/// Removes `a1a2`, `a3a4` and adds `a1a3`, `a2a4`. Stored as `a = [a1, a2, a3, a4]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Switch {
    pub a: [Vertex; 4],
}

/// Index relabelings preserving the removed and added pairs. Entry `j`
/// sends `a_{j+1}` to the first position.
pub const KLEIN: [[usize; 4]; 4] = [[0, 1, 2, 3], [1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

impl Switch {
    pub fn new(a1: Vertex, a2: Vertex, a3: Vertex, a4: Vertex) -> Self {
        Switch {
            a: [a1, a2, a3, a4],
        }
    }

    pub fn removed(&self) -> [(Vertex, Vertex); 2] {
        let [a1, a2, a3, a4] = self.a;
        [(a1, a2), (a3, a4)]
    }

    pub fn added(&self) -> [(Vertex, Vertex); 2] {
        let [a1, a2, a3, a4] = self.a;
        [(a1, a3), (a2, a4)]
    }

    /// The diagonals `a1a4` and `a2a3`.
    pub fn diagonals(&self) -> [(Vertex, Vertex); 2] {
        let [a1, a2, a3, a4] = self.a;
        [(a1, a4), (a2, a3)]
    }

    /// The switch undoing this one.
    pub fn inverse(&self) -> Switch {
        let [a1, a2, a3, a4] = self.a;
        Switch::new(a1, a3, a2, a4)
    }

    /// New role `k` is played by old vertex `a[p[k]]`.
    pub fn relabel(&self, p: [usize; 4]) -> Switch {
        Switch {
            a: [self.a[p[0]], self.a[p[1]], self.a[p[2]], self.a[p[3]]],
        }
    }

    /// The equivalent labelling with `a1` the least vertex.
    pub fn canonical(&self) -> (Switch, [usize; 4]) {
        let j = (0..4).min_by_key(|&j| self.a[j]).unwrap();
        (self.relabel(KLEIN[j]), KLEIN[j])
    }

    /// Same removed and added edge sets, regardless of labelling.
    pub fn same_exchange(&self, other: &Switch) -> bool {
        KLEIN.iter().any(|&p| self.relabel(p).a == other.a)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.a.contains(&v)
    }

    fn invalid(&self, reason: &'static str) -> Error {
        let [a1, a2, a3, a4] = self.a;
        Error::InvalidSwitch {
            a1,
            a2,
            a3,
            a4,
            reason,
        }
    }

    /// Checks that the switch can be applied to `g` and leaves it simple.
    pub fn validate<G: Adjacency>(&self, g: &G) -> Result<()> {
        let n = g.vertex_count();
        if self.a.iter().any(|&v| v >= n) {
            return Err(self.invalid("vertex out of range"));
        }
        for i in 0..4 {
            for j in i + 1..4 {
                if self.a[i] == self.a[j] {
                    return Err(self.invalid("vertices are not distinct"));
                }
            }
        }
        if self.removed().iter().any(|&(u, v)| !g.has_edge(u, v)) {
            return Err(self.invalid("a removed edge is absent"));
        }
        if self.added().iter().any(|&(u, v)| g.has_edge(u, v)) {
            return Err(self.invalid("an added edge is already present"));
        }
        Ok(())
    }
}

impl fmt::Display for Switch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4] = self.a;
        write!(f, "-{a1}~{a2} -{a3}~{a4} +{a1}~{a3} +{a2}~{a4}")
    }
}

/// Number of diagonals present: A none, B both, C one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SwitchType {
    A,
    B,
    C,
}

/// A switch certified to change the triangle set, with its count change.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "TriSwitchJson", try_from = "TriSwitchJson")]
pub struct TriSwitch {
    pub switch: Switch,
    pub delta_t: i64,
}

#[derive(Serialize, Deserialize)]
struct TriSwitchJson {
    removed: [[Vertex; 2]; 2],
    added: [[Vertex; 2]; 2],
    delta_t: i64,
}

impl From<TriSwitch> for TriSwitchJson {
    fn from(t: TriSwitch) -> Self {
        let [a1, a2, a3, a4] = t.switch.a;
        TriSwitchJson {
            removed: [[a1, a2], [a3, a4]],
            added: [[a1, a3], [a2, a4]],
            delta_t: t.delta_t,
        }
    }
}

impl TryFrom<TriSwitchJson> for TriSwitch {
    type Error = String;
    fn try_from(j: TriSwitchJson) -> std::result::Result<Self, String> {
        let [[a1, a2], [a3, a4]] = j.removed;
        if j.added != [[a1, a3], [a2, a4]] {
            return Err("added edges must be [[a1, a3], [a2, a4]]".into());
        }
        Ok(TriSwitch {
            switch: Switch::new(a1, a2, a3, a4),
            delta_t: j.delta_t,
        })
    }
}

/// Common neighbours of `x` and `y` outside the switch's four vertices.
/// A switch never changes these.
#[inline]
fn ext<G: Adjacency>(g: &G, x: Vertex, y: Vertex, d: &[Vertex; 4]) -> i64 {
    g.common_neighbors_excluding(x, y, d) as i64
}

/// Triangle change without validation.
///
/// No triangle lies inside the four switch vertices before or after a
/// switch, and triangles meeting them in one vertex are untouched, so the
/// change is carried entirely by triangles on a switched pair and a fifth
/// vertex.
pub(crate) fn delta_unchecked<G: Adjacency>(g: &G, s: &Switch) -> i64 {
    let d = &s.a;
    let [a1, a2, a3, a4] = s.a;
    ext(g, a1, a3, d) + ext(g, a2, a4, d) - ext(g, a1, a2, d) - ext(g, a3, a4, d)
}

pub(crate) fn is_tri_unchecked<G: Adjacency>(g: &G, s: &Switch) -> bool {
    let d = &s.a;
    let [a1, a2, a3, a4] = s.a;
    [(a1, a2), (a3, a4), (a1, a3), (a2, a4)]
        .iter()
        .any(|&(x, y)| g.neighbors(x).any(|w| !d.contains(&w) && g.has_edge(y, w)))
}

/// `t(H) - t(G)` for `H` the result of `s` on `g`, without mutating `g`.
pub fn triangle_delta<G: Adjacency>(g: &G, s: &Switch) -> Result<i64> {
    s.validate(g)?;
    Ok(delta_unchecked(g, s))
}

/// Whether some switched pair has a common neighbour outside the four
/// switch vertices, which holds iff the triangle set changes.
pub fn is_tri_switch<G: Adjacency>(g: &G, s: &Switch) -> Result<bool> {
    s.validate(g)?;
    Ok(is_tri_unchecked(g, s))
}

pub fn classify_switch<G: Adjacency>(g: &G, s: &Switch) -> Result<SwitchType> {
    s.validate(g)?;
    let present = s
        .diagonals()
        .iter()
        .filter(|&&(u, v)| g.has_edge(u, v))
        .count();
    Ok(match present {
        0 => SwitchType::A,
        2 => SwitchType::B,
        _ => SwitchType::C,
    })
}

/// Certifies `s` as a Δ-switch on `g`.
pub fn to_tri_switch<G: Adjacency>(g: &G, s: &Switch) -> Result<TriSwitch> {
    if !is_tri_switch(g, s)? {
        return Err(s.invalid("switch does not change the triangle set"));
    }
    Ok(TriSwitch {
        switch: *s,
        delta_t: delta_unchecked(g, s),
    })
}

impl Graph {
    /// Applies `s` without validation; returns the triangle change.
    pub(crate) fn apply_unchecked(&mut self, s: &Switch) -> i64 {
        let before = self.triangles() as i64;
        let [a1, a2, a3, a4] = s.a;
        self.delete_edge(a1, a2);
        self.delete_edge(a3, a4);
        self.insert_edge(a1, a3);
        self.insert_edge(a2, a4);
        self.triangles() as i64 - before
    }
}

/// Applies `s` to `g` in place and returns the triangle change.
pub fn apply_switch(g: &mut Graph, s: &Switch) -> Result<i64> {
    s.validate(g)?;
    Ok(g.apply_unchecked(s))
}

/// Number of unordered pairs of vertex-disjoint edges in `g`.
pub fn nonincident_pair_count(g: &Graph) -> u64 {
    let e = g.edge_count() as u64;
    let incident: u64 = (0..g.n())
        .map(|v| {
            let d = g.degree(v) as u64;
            d * d.saturating_sub(1) / 2
        })
        .sum();
    e * e.saturating_sub(1) / 2 - incident
}

/// Rejection draw of an ordered pair of vertex-disjoint edges; the caller
/// guarantees one exists.
pub(crate) fn draw_pair_unchecked<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
) -> ((Vertex, Vertex), (Vertex, Vertex)) {
    let m = g.edge_count();
    loop {
        let i = rng.random_range(0..m);
        let mut j = rng.random_range(0..m - 1);
        if j >= i {
            j += 1;
        }
        let (e, f) = (g.edge(i), g.edge(j));
        if e.0 != f.0 && e.0 != f.1 && e.1 != f.0 && e.1 != f.1 {
            return (e, f);
        }
    }
}

/// A uniformly random unordered pair of vertex-disjoint edges.
pub fn random_nonincident_edge_pair<R: Rng + ?Sized>(
    g: &Graph,
    rng: &mut R,
) -> Result<((Vertex, Vertex), (Vertex, Vertex))> {
    if nonincident_pair_count(g) == 0 {
        return Err(Error::NoValidPair);
    }
    Ok(draw_pair_unchecked(g, rng))
}

/// All valid switches of `g`, each exchange listed once with its canonical
/// labelling.
pub fn all_switches(g: &Graph) -> Vec<Switch> {
    let edges = g.sorted_edges();
    let mut out = Vec::new();
    for (i, &(x, y)) in edges.iter().enumerate() {
        for &(z, w) in &edges[i + 1..] {
            if x == z || x == w || y == z || y == w {
                continue;
            }
            for s in [Switch::new(x, y, z, w), Switch::new(x, y, w, z)] {
                if !g.has_edge(s.a[0], s.a[2]) && !g.has_edge(s.a[1], s.a[3]) {
                    out.push(s.canonical().0);
                }
            }
        }
    }
    out
}
