//! Planting a triangle on a vertex with three triangle-free neighbours.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph, Vertex};
use crate::switch::{delta_unchecked, is_tri_unchecked, Switch, TriSwitch};

/// A graph with one edge hidden.
pub struct Masked<'a> {
    g: &'a Graph,
    hidden: (Vertex, Vertex),
}

impl<'a> Masked<'a> {
    pub fn new(g: &'a Graph, u: Vertex, v: Vertex) -> Self {
        Masked {
            g,
            hidden: (u.min(v), u.max(v)),
        }
    }

    #[inline]
    fn is_hidden(&self, u: Vertex, v: Vertex) -> bool {
        (u.min(v), u.max(v)) == self.hidden
    }
}

impl Adjacency for Masked<'_> {
    fn vertex_count(&self) -> usize {
        self.g.n()
    }

    fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        !self.is_hidden(u, v) && self.g.has_edge(u, v)
    }

    fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.g
            .neighbor_slice(v)
            .iter()
            .copied()
            .filter(move |&w| !self.is_hidden(v, w))
    }
}

/// Which cycle length selected the planting switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CycleClass {
    Four,
    Five,
    /// Six or longer, or no cycle at all.
    Long,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Plant {
    pub tri: TriSwitch,
    /// The planted triangle; contains `v` and a member of `R`.
    pub triangle: [Vertex; 3],
    pub class: CycleClass,
}

struct Ctx<'g, G> {
    g: &'g G,
    v: Vertex,
    r: [Vertex; 3],
}

impl<G: Adjacency> Ctx<'_, G> {
    fn outside(&self, w: Vertex) -> bool {
        w != self.v && !self.r.contains(&w)
    }

    /// Least common neighbour of `x` and `y` other than `v`.
    fn four_cycle(&self, x: Vertex, y: Vertex) -> Option<Vertex> {
        self.g
            .neighbors(x)
            .find(|&w| self.outside(w) && self.g.has_edge(y, w))
    }

    /// Lexicographically least `(w1, w2)` closing the 5-cycle `v x w1 w2 y`,
    /// subject to `accept`.
    fn five_cycle(
        &self,
        x: Vertex,
        y: Vertex,
        accept: impl Fn(Vertex) -> bool,
    ) -> Option<(Vertex, Vertex)> {
        for w1 in self.g.neighbors(x).filter(|&w| self.outside(w)) {
            for w2 in self.g.neighbors(y).filter(|&w| self.outside(w)) {
                if w1 != w2 && self.g.has_edge(w1, w2) && accept(w2) {
                    return Some((w1, w2));
                }
            }
        }
        None
    }

    /// Lexicographically least `(w1, w2)` extending `x v y` to a path.
    fn long_path(&self, x: Vertex, y: Vertex) -> Option<(Vertex, Vertex)> {
        for w1 in self.g.neighbors(x).filter(|&w| self.outside(w)) {
            if let Some(w2) = self.g.neighbors(y).find(|&w| self.outside(w) && w != w1) {
                return Some((w1, w2));
            }
        }
        None
    }

    fn finish(&self, s: Switch, triangle: [Vertex; 3], class: CycleClass) -> Result<Plant> {
        if s.validate(self.g).is_err() || !is_tri_unchecked(self.g, &s) {
            return Err(Error::InternalContradiction(format!(
                "planting switch {s} is not a valid triangle switch"
            )));
        }
        let mut triangle = triangle;
        triangle.sort_unstable();
        Ok(Plant {
            tri: TriSwitch {
                switch: s,
                delta_t: delta_unchecked(self.g, &s),
            },
            triangle,
            class,
        })
    }

    fn plant_four(&self, ri: Vertex, rj: Vertex, rk: Vertex, w: Vertex) -> Result<Plant> {
        // -v rk, -w rj, +v w, +rk rj: triangle v ri w
        self.finish(
            Switch::new(self.v, rk, w, rj),
            [self.v, ri, w],
            CycleClass::Four,
        )
    }

    fn plant_five(&self, ri: Vertex, rk: Vertex, w1: Vertex, w2: Vertex) -> Result<Plant> {
        // -v rk, -w1 w2, +v w1, +rk w2: triangle v ri w1
        self.finish(
            Switch::new(self.v, rk, w1, w2),
            [self.v, ri, w1],
            CycleClass::Five,
        )
    }

    fn plant_long(&self, ri: Vertex, rj: Vertex, w1: Vertex, w2: Vertex) -> Result<Plant> {
        // -ri w1, -rj w2, +ri rj, +w1 w2: triangle v ri rj
        self.finish(
            Switch::new(ri, w1, rj, w2),
            [self.v, ri, rj],
            CycleClass::Long,
        )
    }
}

fn check_preconditions<G: Adjacency>(g: &G, v: Vertex, r: &[Vertex; 3]) -> Result<()> {
    let fail = |m: String| Err(Error::PlantPrecondition(m));
    if r[0] == r[1] || r[0] == r[2] || r[1] == r[2] || r.contains(&v) {
        return fail(format!(
            "R = {r:?} must be three distinct vertices other than {v}"
        ));
    }
    for &x in r {
        if !g.has_edge(v, x) {
            return fail(format!("{x} is not a neighbour of {v}"));
        }
        if g.degree(x) < 2 {
            return fail(format!("{x} has degree below 2"));
        }
        if g.common_neighbors_excluding(v, x, &[]) > 0 {
            return fail(format!("a triangle contains {v} and {x}"));
        }
    }
    Ok(())
}

/// Finds a Δ⁺-switch creating a triangle on `v` and a member of `r`.
///
/// Without `forced_first`, `r` is taken in increasing order and pairs are
/// examined as `(r1,r2), (r1,r3), (r2,r3)`; the shortest cycle through a
/// path `ri v rj` selects the construction. With `forced_first = Some(x)`
/// the triangle must contain `x`, and only paths `x v rj` are examined;
/// options are tried as 4-cycles, then 5-cycles whose closing switch is
/// simple, then long paths for a partner with no 5-cycle. If none exists,
/// returns [`Error::PlantImpossible`].
pub fn plant_triangle<G: Adjacency>(
    g: &G,
    v: Vertex,
    r: [Vertex; 3],
    forced_first: Option<Vertex>,
) -> Result<Plant> {
    check_preconditions(g, v, &r)?;
    let mut r = r;
    r.sort_unstable();
    match forced_first {
        None => plant_free(&Ctx { g, v, r }),
        Some(x) => {
            if !r.contains(&x) {
                return Err(Error::PlantPrecondition(format!("{x} is not in R")));
            }
            let others: Vec<Vertex> = r.iter().copied().filter(|&y| y != x).collect();
            plant_forced(&Ctx { g, v, r }, x, [others[0], others[1]])
        }
    }
}

const PAIRS: [(usize, usize, usize); 3] = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];

fn plant_free<G: Adjacency>(c: &Ctx<'_, G>) -> Result<Plant> {
    let r = c.r;
    for &(i, j, k) in &PAIRS {
        if let Some(w) = c.four_cycle(r[i], r[j]) {
            return c.plant_four(r[i], r[j], r[k], w);
        }
    }
    for &(i, j, k) in &PAIRS {
        for (x, y) in [(r[i], r[j]), (r[j], r[i])] {
            if let Some((w1, w2)) = c.five_cycle(x, y, |_| true) {
                return c.plant_five(x, r[k], w1, w2);
            }
        }
    }
    let (w1, w2) = c.long_path(r[0], r[1]).ok_or_else(|| {
        Error::PlantPrecondition("no path w1 r1 v r2 w2 with fresh endpoints".into())
    })?;
    c.plant_long(r[0], r[1], w1, w2)
}

fn plant_forced<G: Adjacency>(c: &Ctx<'_, G>, x: Vertex, others: [Vertex; 2]) -> Result<Plant> {
    let [p, q] = others;
    for (j, k) in [(p, q), (q, p)] {
        if let Some(w) = c.four_cycle(x, j) {
            return c.plant_four(x, j, k, w);
        }
    }
    for (j, k) in [(p, q), (q, p)] {
        if let Some((w1, w2)) = c.five_cycle(x, j, |w2| !c.g.has_edge(k, w2)) {
            return c.plant_five(x, k, w1, w2);
        }
    }
    for j in [p, q] {
        if c.five_cycle(x, j, |_| true).is_none() {
            if let Some((w1, w2)) = c.long_path(x, j) {
                return c.plant_long(x, j, w1, w2);
            }
        }
    }
    Err(Error::PlantImpossible)
}
