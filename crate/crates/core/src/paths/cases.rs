use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph, Vertex};
use crate::switch::{delta_unchecked, is_tri_unchecked, Switch, TriSwitch, KLEIN};

use super::plant::{plant_triangle, Masked};
use super::{CaseLabel, SimulationPath};

/// Applies steps to a working copy, certifying each as a Δ-switch.
struct Builder {
    g: Graph,
    steps: Vec<TriSwitch>,
    aux: BTreeMap<String, Vertex>,
}

impl Builder {
    fn new(g: &Graph) -> Self {
        Builder {
            g: g.clone(),
            steps: Vec::new(),
            aux: BTreeMap::new(),
        }
    }

    fn push(&mut self, s: Switch) -> Result<()> {
        if let Err(e) = s.validate(&self.g) {
            return Err(Error::InternalContradiction(format!(
                "step {} invalid: {e}",
                self.steps.len() + 1
            )));
        }
        if !is_tri_unchecked(&self.g, &s) {
            return Err(Error::InternalContradiction(format!(
                "step {} ({s}) is not a triangle switch",
                self.steps.len() + 1
            )));
        }
        let delta_t = delta_unchecked(&self.g, &s);
        self.g.apply_unchecked(&s);
        self.steps.push(TriSwitch { switch: s, delta_t });
        Ok(())
    }

    fn note(&mut self, name: &str, v: Vertex) {
        self.aux.insert(name.to_string(), v);
    }

    fn finish(self, case: CaseLabel, relabeling: [usize; 4]) -> SimulationPath {
        SimulationPath {
            case,
            relabeling,
            steps: self.steps,
            auxiliaries: self.aux,
        }
    }
}

/// `A_i = N(a_i) \ D`, sorted.
fn outer(g: &Graph, t: &Switch, i: usize) -> Vec<Vertex> {
    g.neighbors(t.a[i]).filter(|w| !t.contains(*w)).collect()
}

fn first_common(a: &[Vertex], b: &[Vertex]) -> Option<Vertex> {
    a.iter().copied().find(|x| b.binary_search(x).is_ok())
}

fn compose(outer: [usize; 4], inner: [usize; 4]) -> [usize; 4] {
    [
        outer[inner[0]],
        outer[inner[1]],
        outer[inner[2]],
        outer[inner[3]],
    ]
}

/// A case builder: `None` when its condition fails.
type Attempt = fn(&Graph, &Switch, [bool; 2]) -> Result<Option<(SimulationPath, [usize; 4])>>;

pub(crate) fn construct(g: &Graph, input: &Switch) -> Result<SimulationPath> {
    let (c, p0) = input.canonical();
    let diag = [g.has_edge(c.a[0], c.a[3]), g.has_edge(c.a[1], c.a[2])];
    let attempts: [Attempt; 6] = [case_i, case_ii_iii, case_iv, case_v_vi, case_vii, case_viii];
    for f in attempts {
        if let Some((mut path, q)) = f(g, &c, diag)? {
            path.relabeling = compose(p0, q);
            return Ok(path);
        }
    }
    let (mut path, q) = case_ix(g, &c, diag)?;
    path.relabeling = compose(p0, q);
    Ok(path)
}

type Found = Result<Option<(SimulationPath, [usize; 4])>>;

fn case_i(g: &Graph, c: &Switch, _: [bool; 2]) -> Found {
    if !is_tri_unchecked(g, c) {
        return Ok(None);
    }
    let mut b = Builder::new(g);
    b.push(*c)?;
    Ok(Some((b.finish(CaseLabel::I, KLEIN[0]), KLEIN[0])))
}

fn case_ii_iii(g: &Graph, c: &Switch, diag: [bool; 2]) -> Found {
    let case = match diag {
        [false, false] => CaseLabel::II,
        [true, true] => CaseLabel::III,
        _ => return Ok(None),
    };
    for p in KLEIN {
        let t = c.relabel(p);
        let Some(v) = first_common(&outer(g, &t, 0), &outer(g, &t, 3)) else {
            continue;
        };
        let [a1, a2, a3, a4] = t.a;
        let mut b = Builder::new(g);
        b.note("v", v);
        // exchange through the diagonals
        let into_diag = Switch::new(a1, a2, a4, a3);
        let out_of_diag = Switch::new(a1, a4, a3, a2);
        if case == CaseLabel::II {
            b.push(into_diag)?;
            b.push(out_of_diag)?;
        } else {
            b.push(out_of_diag)?;
            b.push(into_diag)?;
        }
        return Ok(Some((b.finish(case, p), p)));
    }
    Ok(None)
}

/// The two pivot steps: `-a1u -a3a4 +a1a3 +ua4`, then `-a1a2 -ua4 +a1u +a2a4`.
fn pivot_core(b: &mut Builder, t: &Switch, u: Vertex) -> Result<()> {
    let [a1, a2, a3, a4] = t.a;
    b.push(Switch::new(a1, u, a3, a4))?;
    b.push(Switch::new(a1, a2, u, a4))
}

fn case_iv(g: &Graph, c: &Switch, diag: [bool; 2]) -> Found {
    if diag != [false, false] {
        for p in KLEIN {
            let t = c.relabel(p);
            if !g.has_edge(t.a[1], t.a[2]) {
                continue;
            }
            let a4_out = outer(g, &t, 3);
            let u = outer(g, &t, 0)
                .into_iter()
                .find(|u| a4_out.binary_search(u).is_err());
            if let Some(u) = u {
                let mut b = Builder::new(g);
                b.note("u", u);
                pivot_core(&mut b, &t, u)?;
                return Ok(Some((b.finish(CaseLabel::IV, p), p)));
            }
        }
    }
    for p in KLEIN {
        let t = c.relabel(p);
        let a1_out = outer(g, &t, 0);
        for &u in &a1_out {
            if g.has_edge(u, t.a[3]) {
                continue;
            }
            if let Some(&w) = a1_out.iter().find(|&&w| w != u && g.has_edge(u, w)) {
                let mut b = Builder::new(g);
                b.note("u", u);
                b.note("w", w);
                pivot_core(&mut b, &t, u)?;
                return Ok(Some((b.finish(CaseLabel::IV, p), p)));
            }
        }
    }
    Ok(None)
}

fn case_v_vi(g: &Graph, c: &Switch, diag: [bool; 2]) -> Found {
    if diag[0] == diag[1] {
        return Ok(None);
    }
    for p in KLEIN {
        let t = c.relabel(p);
        let [a1, a2, a3, a4] = t.a;
        if !g.has_edge(a1, a4) {
            continue;
        }
        let a = outer(g, &t, 1);
        if a != outer(g, &t, 2) {
            continue;
        }
        let mut b = Builder::new(g);
        let edge = a.iter().enumerate().find_map(|(i, &u)| {
            a[i + 1..]
                .iter()
                .find(|&&v| g.has_edge(u, v))
                .map(|&v| (u, v))
        });
        if let Some((u, v)) = edge {
            b.note("u", u);
            b.note("v", v);
            b.push(Switch::new(a1, a4, u, v))?;
            b.push(Switch::new(a1, a2, a4, a3))?;
            b.push(Switch::new(a1, a4, a3, a2))?;
            b.push(Switch::new(u, a1, v, a4))?;
            return Ok(Some((b.finish(CaseLabel::V, p), p)));
        }
        if a.len() < 2 {
            return Err(Error::InternalContradiction(
                "case VI needs two outer neighbours".into(),
            ));
        }
        let (u, v) = (a[0], a[1]);
        let w = g
            .neighbors(v)
            .find(|x| !t.contains(*x))
            .ok_or_else(|| Error::InternalContradiction("case VI: no w".into()))?;
        b.note("u", u);
        b.note("v", v);
        b.note("w", w);
        b.push(Switch::new(v, w, u, a3))?;
        b.push(Switch::new(u, a2, a3, a4))?;
        b.push(Switch::new(a2, a1, u, a3))?;
        b.push(Switch::new(u, v, a3, w))?;
        return Ok(Some((b.finish(CaseLabel::VI, p), p)));
    }
    Ok(None)
}

/// Plants, runs the pivot core through the planted triangle, unplants.
fn plant_pivot_unplant(
    b: &mut Builder,
    t: &Switch,
    plant: Switch,
    triangle: [Vertex; 3],
) -> Result<()> {
    b.push(plant)?;
    let [a1, _, _, a4] = t.a;
    if !triangle.contains(&a1) {
        return Err(Error::InternalContradiction(
            "planted triangle misses a1".into(),
        ));
    }
    let mut others: Vec<Vertex> = triangle.iter().copied().filter(|&x| x != a1).collect();
    others.sort_unstable();
    let u = others
        .iter()
        .copied()
        .find(|&x| !t.contains(x) && !b.g.has_edge(x, a4))
        .ok_or_else(|| Error::InternalContradiction("no pivot in planted triangle".into()))?;
    b.note("pivot", u);
    pivot_core(b, t, u)?;
    b.push(plant.inverse())
}

fn require_type_a(diag: [bool; 2]) -> Result<()> {
    if diag != [false, false] {
        return Err(Error::InternalContradiction(
            "switch with a diagonal reached the planting cases".into(),
        ));
    }
    Ok(())
}

fn case_vii(g: &Graph, c: &Switch, diag: [bool; 2]) -> Found {
    require_type_a(diag)?;
    let Some(j) = (0..4)
        .filter(|&j| g.degree(c.a[j]) >= 4)
        .min_by_key(|&j| c.a[j])
    else {
        return Ok(None);
    };
    let p = KLEIN[j];
    let t = c.relabel(p);
    let a1_out = outer(g, &t, 0);
    let r = [a1_out[0], a1_out[1], a1_out[2]];
    let plant = plant_triangle(g, t.a[0], r, None)?;
    let mut b = Builder::new(g);
    plant_pivot_unplant(&mut b, &t, plant.tri.switch, plant.triangle)?;
    Ok(Some((b.finish(CaseLabel::VII, p), p)))
}

fn case_viii(g: &Graph, c: &Switch, _: [bool; 2]) -> Found {
    if c.a.iter().any(|&x| g.degree(x) != 3) {
        return Ok(None);
    }
    for len in [1, 2] {
        for p in [KLEIN[0], KLEIN[1]] {
            let t = c.relabel(p);
            let a1_out = outer(g, &t, 0);
            let a3_out = outer(g, &t, 2);
            for &u1 in &a1_out {
                for &v1 in &a3_out {
                    let w = if len == 1 {
                        if !g.has_edge(u1, v1) {
                            continue;
                        }
                        None
                    } else {
                        match g.common_neighbors(u1, v1).find(|&w| !t.contains(w)) {
                            Some(w) => Some(w),
                            None => continue,
                        }
                    };
                    let u2 = other(&a1_out, u1)?;
                    let v2 = other(&a3_out, v1)?;
                    let [a1, _, a3, _] = t.a;
                    let mut b = Builder::new(g);
                    for (k, x) in [("u1", u1), ("u2", u2), ("v1", v1), ("v2", v2)] {
                        b.note(k, x);
                    }
                    let (case, plant, triangle) = match w {
                        None => (CaseLabel::VIIIa, Switch::new(a1, u2, v1, a3), [a1, u1, v1]),
                        Some(w) => {
                            b.note("w", w);
                            (CaseLabel::VIIIb, Switch::new(a1, u2, w, v1), [a1, u1, w])
                        }
                    };
                    plant_pivot_unplant(&mut b, &t, plant, triangle)?;
                    return Ok(Some((b.finish(case, p), p)));
                }
            }
        }
    }
    Ok(None)
}

fn other(pair: &[Vertex], x: Vertex) -> Result<Vertex> {
    match pair {
        [p, q] if *p == x => Ok(*q),
        [p, q] if *q == x => Ok(*p),
        _ => Err(Error::InternalContradiction(format!(
            "expected exactly two outer neighbours, found {pair:?}"
        ))),
    }
}

/// Least edge `(w1, w2)` among the neighbours of `u1` other than `a1`.
fn neighbour_edge(g: &Graph, u1: Vertex, a1: Vertex) -> Option<(Vertex, Vertex)> {
    let nb: Vec<Vertex> = g.neighbors(u1).filter(|&x| x != a1).collect();
    nb.iter().enumerate().find_map(|(i, &w1)| {
        nb[i + 1..]
            .iter()
            .find(|&&w2| g.has_edge(w1, w2))
            .map(|&w2| (w1, w2))
    })
}

/// The three-step path around `t` through a triangle on `u1`.
fn ixa_steps(b: &mut Builder, t: &Switch, u1: Vertex) -> Result<bool> {
    let Some((w1, w2)) = neighbour_edge(&b.g, u1, t.a[0]) else {
        return Ok(false);
    };
    let a3 = t.a[2];
    let v = *outer(&b.g, t, 2)
        .first()
        .ok_or_else(|| Error::InternalContradiction("empty A3".into()))?;
    b.note("u1", u1);
    b.note("w1", w1);
    b.note("w2", w2);
    b.note("v", v);
    b.push(Switch::new(u1, w2, a3, v))?;
    b.push(*t)?;
    b.push(Switch::new(u1, a3, w2, v))?;
    Ok(true)
}

fn case_ix(g: &Graph, c: &Switch, diag: [bool; 2]) -> Result<(SimulationPath, [usize; 4])> {
    require_type_a(diag)?;
    for p in KLEIN {
        let t = c.relabel(p);
        for u1 in outer(g, &t, 0) {
            let mut b = Builder::new(g);
            if ixa_steps(&mut b, &t, u1)? {
                return Ok((b.finish(CaseLabel::IXa, p), p));
            }
        }
    }

    let p = KLEIN[0];
    let t = *c;
    let [a1, a2, _, _] = t.a;
    let a1_out = outer(g, &t, 0);
    let u1 = a1_out[0];
    let u2 = other(&a1_out, u1)?;
    let nb: Vec<Vertex> = g.neighbors(u1).filter(|&x| x != a1).collect();
    if nb.len() < 2 {
        return Err(Error::InternalContradiction(
            "u1 has too few neighbours".into(),
        ));
    }
    let (w1, w2) = (nb[0], nb[1]);
    let mut b = Builder::new(g);
    for (k, x) in [("u1", u1), ("u2", u2), ("w1", w1), ("w2", w2)] {
        b.note(k, x);
    }
    let masked = Masked::new(g, a1, a2);
    match plant_triangle(&masked, u1, [a1, w1, w2], Some(a1)) {
        Ok(plant) => {
            plant_pivot_unplant(&mut b, &t, plant.tri.switch, plant.triangle)?;
            Ok((b.finish(CaseLabel::IXb, p), p))
        }
        Err(Error::PlantImpossible) => {
            let z = g
                .common_neighbors(w1, u2)
                .find(|&z| z != u1)
                .ok_or_else(|| Error::InternalContradiction("case IXc: no z".into()))?;
            b.note("z", z);
            let plant = Switch::new(u1, w2, z, u2);
            b.push(plant)?;
            if !ixa_steps(&mut b, &t, u1)? {
                return Err(Error::InternalContradiction(
                    "case IXc: no triangle on u1 after planting".into(),
                ));
            }
            // the three-step core overwrote w1/w2; restore the planting names
            b.note("w1", w1);
            b.note("w2", w2);
            b.push(plant.inverse())?;
            Ok((b.finish(CaseLabel::IXc, p), p))
        }
        Err(e) => Err(e),
    }
}
