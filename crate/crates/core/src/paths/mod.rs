//! Simulating an arbitrary switch by a short sequence of Δ-switches.
//!
//! For a graph of minimum degree at least 3, every switch `(G, H)` is
//! realized by at most five Δ-switches. The construction is a waterfall of
//! cases `I` to `IXc`; the first applicable case determines the path. All
//! free choices (relabelling, auxiliary vertices) are the least available,
//! so the path is a pure function of the graph and the exchange.

mod cases;
pub mod plant;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex};
use crate::switch::{apply_switch, delta_unchecked, is_tri_unchecked, Switch, TriSwitch};

pub(crate) use cases::construct as cases_construct;
pub use plant::{plant_triangle, CycleClass, Masked, Plant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CaseLabel {
    I,
    II,
    III,
    IV,
    V,
    VI,
    VII,
    VIIIa,
    VIIIb,
    IXa,
    IXb,
    IXc,
}

impl CaseLabel {
    pub const ALL: [CaseLabel; 12] = [
        CaseLabel::I,
        CaseLabel::II,
        CaseLabel::III,
        CaseLabel::IV,
        CaseLabel::V,
        CaseLabel::VI,
        CaseLabel::VII,
        CaseLabel::VIIIa,
        CaseLabel::VIIIb,
        CaseLabel::IXa,
        CaseLabel::IXb,
        CaseLabel::IXc,
    ];

    /// Number of Δ-switches in every path of this case.
    pub fn path_len(self) -> usize {
        use CaseLabel::*;
        match self {
            I => 1,
            II | III | IV => 2,
            IXa => 3,
            V | VI | VII | VIIIa | VIIIb | IXb => 4,
            IXc => 5,
        }
    }
}

impl fmt::Display for CaseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for CaseLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        CaseLabel::ALL
            .iter()
            .copied()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| Error::Parse(format!("unknown case label {s:?}")))
    }
}

/// A sequence of Δ-switches realizing one switch.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationPath {
    pub case: CaseLabel,
    /// Role `k` of the case construction is played by input vertex
    /// `a[relabeling[k]]`.
    pub relabeling: [usize; 4],
    pub steps: Vec<TriSwitch>,
    pub auxiliaries: BTreeMap<String, Vertex>,
}

impl SimulationPath {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Intermediate graphs, starting with `g` and ending with the target.
    pub fn replay(&self, g: &Graph) -> Result<Vec<Graph>> {
        let mut out = vec![g.clone()];
        let mut cur = g.clone();
        for step in &self.steps {
            apply_switch(&mut cur, &step.switch)?;
            out.push(cur.clone());
        }
        Ok(out)
    }
}

/// Builds the simulation path for `s` on `g`.
pub fn simulate_switch(g: &Graph, s: &Switch) -> Result<SimulationPath> {
    s.validate(g)?;
    let dmin = g.min_degree();
    if dmin < 3 {
        return Err(Error::MinDegreeTooSmall(dmin));
    }
    let path = cases::construct(g, s)?;
    if cfg!(debug_assertions) {
        if let Err(e) = check_path(g, s, &path) {
            return Err(Error::InternalContradiction(format!(
                "case {} produced an invalid path: {e}",
                path.case
            )));
        }
    }
    Ok(path)
}

/// The case that [`simulate_switch`] would use.
pub fn classify_case(g: &Graph, s: &Switch) -> Result<CaseLabel> {
    simulate_switch(g, s).map(|p| p.case)
}

/// Replays `p` from `g`, requiring every step to be a Δ-switch with the
/// recorded triangle change, and the end graph to equal `s` applied to `g`.
pub fn check_path(g: &Graph, s: &Switch, p: &SimulationPath) -> std::result::Result<(), String> {
    if p.steps.is_empty() || p.steps.len() > 5 {
        return Err(format!("path length {} outside 1..=5", p.steps.len()));
    }
    let mut target = g.clone();
    apply_switch(&mut target, s).map_err(|e| format!("input switch: {e}"))?;
    let mut cur = g.clone();
    for (i, step) in p.steps.iter().enumerate() {
        let sw = &step.switch;
        sw.validate(&cur)
            .map_err(|e| format!("step {}: {e}", i + 1))?;
        if !is_tri_unchecked(&cur, sw) {
            return Err(format!("step {} ({sw}) is not a triangle switch", i + 1));
        }
        let delta = delta_unchecked(&cur, sw);
        if delta != step.delta_t {
            return Err(format!(
                "step {}: recorded delta {} but actual {delta}",
                i + 1,
                step.delta_t
            ));
        }
        let before = cur.count_triangles() as i64;
        cur.apply_unchecked(sw);
        if cur.count_triangles() as i64 - before != delta {
            return Err(format!("step {}: recount disagrees with delta", i + 1));
        }
    }
    if cur != target {
        return Err("path does not end at the switched graph".into());
    }
    Ok(())
}

pub fn verify_path(g: &Graph, s: &Switch, p: &SimulationPath) -> bool {
    check_path(g, s, p).is_ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeSequence;
    use crate::switch::all_switches;

    fn two_k4() -> Graph {
        let mut e = Vec::new();
        for base in [0, 4] {
            for i in 0..4 {
                for j in i + 1..4 {
                    e.push((base + i, base + j));
                }
            }
        }
        Graph::from_edges(8, &e).unwrap()
    }

    #[test]
    fn case_i_is_the_switch() {
        let g = Graph::from_degree_sequence(&DegreeSequence::regular(8, 3).unwrap(), None).unwrap();
        for s in all_switches(&g) {
            let p = simulate_switch(&g, &s).unwrap();
            if p.case == CaseLabel::I {
                assert_eq!(p.len(), 1);
                assert!(p.steps[0].switch.same_exchange(&s));
            }
            assert!(verify_path(&g, &s, &p));
            assert_eq!(p.len(), p.case.path_len());
        }
    }

    type Fixture = (CaseLabel, usize, &'static [(usize, usize)], [usize; 4]);

    /// Smallest graphs found where each case is the first to apply.
    const FIXTURES: &[Fixture] = &[
        (
            CaseLabel::I,
            8,
            &[
                (0, 2),
                (0, 4),
                (0, 5),
                (1, 2),
                (1, 5),
                (1, 6),
                (2, 7),
                (3, 4),
                (3, 6),
                (3, 7),
                (4, 6),
                (5, 7),
            ],
            [0, 2, 1, 5],
        ),
        (
            CaseLabel::II,
            8,
            &[
                (0, 4),
                (0, 6),
                (0, 7),
                (1, 2),
                (1, 4),
                (1, 6),
                (2, 3),
                (2, 5),
                (3, 6),
                (3, 7),
                (4, 5),
                (5, 7),
            ],
            [0, 4, 2, 3],
        ),
        (
            CaseLabel::III,
            8,
            &[
                (0, 1),
                (0, 2),
                (0, 4),
                (1, 2),
                (1, 6),
                (2, 7),
                (3, 4),
                (3, 5),
                (3, 7),
                (4, 6),
                (5, 6),
                (5, 7),
            ],
            [0, 4, 6, 1],
        ),
        (
            CaseLabel::IV,
            8,
            &[
                (0, 1),
                (0, 2),
                (0, 4),
                (1, 2),
                (1, 6),
                (2, 7),
                (3, 4),
                (3, 5),
                (3, 7),
                (4, 6),
                (5, 6),
                (5, 7),
            ],
            [0, 4, 7, 2],
        ),
        (
            CaseLabel::V,
            8,
            &[
                (0, 1),
                (0, 2),
                (0, 3),
                (0, 5),
                (0, 7),
                (1, 2),
                (1, 3),
                (1, 5),
                (1, 7),
                (2, 3),
                (2, 4),
                (2, 6),
                (4, 6),
                (4, 7),
                (5, 6),
            ],
            [4, 7, 5, 6],
        ),
        (
            CaseLabel::VI,
            8,
            &[
                (0, 2),
                (0, 4),
                (0, 5),
                (1, 2),
                (1, 5),
                (1, 6),
                (2, 7),
                (3, 4),
                (3, 6),
                (3, 7),
                (4, 6),
                (5, 7),
            ],
            [0, 4, 6, 1],
        ),
        (
            CaseLabel::VII,
            14,
            &[
                (0, 2),
                (0, 6),
                (0, 9),
                (0, 10),
                (0, 11),
                (1, 3),
                (1, 4),
                (1, 7),
                (1, 8),
                (1, 11),
                (2, 3),
                (2, 6),
                (2, 7),
                (2, 8),
                (3, 4),
                (3, 7),
                (3, 9),
                (4, 5),
                (4, 10),
                (5, 6),
                (5, 7),
                (5, 13),
                (6, 12),
                (8, 9),
                (10, 13),
                (11, 12),
                (12, 13),
            ],
            [5, 13, 8, 9],
        ),
        (
            CaseLabel::VIIIa,
            12,
            &[
                (0, 4),
                (0, 5),
                (0, 7),
                (1, 2),
                (1, 3),
                (1, 8),
                (2, 6),
                (2, 7),
                (3, 4),
                (3, 9),
                (4, 11),
                (5, 6),
                (5, 11),
                (6, 10),
                (7, 8),
                (8, 9),
                (9, 10),
                (10, 11),
            ],
            [1, 8, 5, 11],
        ),
        (
            CaseLabel::VIIIb,
            12,
            &[
                (0, 1),
                (0, 6),
                (0, 7),
                (1, 5),
                (1, 11),
                (2, 6),
                (2, 7),
                (2, 8),
                (3, 4),
                (3, 7),
                (3, 9),
                (4, 5),
                (4, 11),
                (5, 9),
                (6, 10),
                (8, 10),
                (8, 11),
                (9, 10),
            ],
            [2, 6, 5, 4],
        ),
        (
            CaseLabel::IXa,
            14,
            &[
                (0, 8),
                (0, 9),
                (0, 12),
                (1, 3),
                (1, 4),
                (1, 7),
                (2, 5),
                (2, 8),
                (2, 11),
                (3, 10),
                (3, 13),
                (4, 6),
                (4, 13),
                (5, 11),
                (5, 12),
                (6, 7),
                (6, 9),
                (7, 13),
                (8, 10),
                (9, 11),
                (10, 12),
            ],
            [3, 10, 9, 6],
        ),
        (
            CaseLabel::IXb,
            12,
            &[
                (0, 1),
                (0, 8),
                (0, 10),
                (1, 4),
                (1, 9),
                (2, 3),
                (2, 7),
                (2, 11),
                (3, 4),
                (3, 6),
                (4, 8),
                (5, 7),
                (5, 10),
                (5, 11),
                (6, 7),
                (6, 11),
                (8, 9),
                (9, 10),
            ],
            [3, 4, 10, 5],
        ),
        (
            CaseLabel::IXc,
            14,
            &[
                (0, 4),
                (0, 8),
                (0, 9),
                (1, 2),
                (1, 7),
                (1, 10),
                (2, 11),
                (2, 12),
                (3, 5),
                (3, 6),
                (3, 8),
                (4, 5),
                (4, 6),
                (5, 9),
                (6, 9),
                (7, 8),
                (7, 13),
                (10, 11),
                (10, 12),
                (11, 13),
                (12, 13),
            ],
            [0, 9, 2, 1],
        ),
    ];

    #[test]
    fn every_case_has_a_witness() {
        for &(case, n, edges, a) in FIXTURES {
            let g = Graph::from_edges(n, edges).unwrap();
            let s = Switch::new(a[0], a[1], a[2], a[3]);
            let p = simulate_switch(&g, &s).unwrap();
            assert_eq!(p.case, case);
            assert_eq!(p.len(), case.path_len(), "{case}");
            assert!(verify_path(&g, &s, &p), "{case}");
        }
        let covered: Vec<_> = FIXTURES.iter().map(|f| f.0).collect();
        assert_eq!(covered, CaseLabel::ALL);
    }

    #[test]
    fn planting_cases_unplant_at_the_end() {
        use CaseLabel::*;
        for &(case, n, edges, a) in FIXTURES {
            if !matches!(case, VII | VIIIa | VIIIb | IXb | IXc) {
                continue;
            }
            let g = Graph::from_edges(n, edges).unwrap();
            let p = simulate_switch(&g, &Switch::new(a[0], a[1], a[2], a[3])).unwrap();
            let first = p.steps[0];
            let last = *p.steps.last().unwrap();
            assert!(first.switch.inverse().same_exchange(&last.switch), "{case}");
        }
    }

    #[test]
    fn deterministic() {
        let g = two_k4();
        let s = Switch::new(2, 3, 6, 7);
        assert_eq!(
            simulate_switch(&g, &s).unwrap(),
            simulate_switch(&g, &s).unwrap()
        );
    }

    #[test]
    fn input_labelling_does_not_matter() {
        for &(case, n, edges, a) in FIXTURES {
            let g = Graph::from_edges(n, edges).unwrap();
            let base = simulate_switch(&g, &Switch::new(a[0], a[1], a[2], a[3])).unwrap();
            for p in crate::switch::KLEIN {
                let s = Switch::new(a[p[0]], a[p[1]], a[p[2]], a[p[3]]);
                assert_eq!(simulate_switch(&g, &s).unwrap().steps, base.steps, "{case}");
            }
        }
    }

    #[test]
    fn verify_rejects_tampering() {
        let (_, n, edges, a) = FIXTURES[6];
        let g = Graph::from_edges(n, edges).unwrap();
        let s = Switch::new(a[0], a[1], a[2], a[3]);
        let p = simulate_switch(&g, &s).unwrap();
        let mut truncated = p.clone();
        truncated.steps.pop();
        assert!(!verify_path(&g, &s, &truncated));
        let mut perturbed = p.clone();
        perturbed.steps[1].switch.a.swap(2, 3);
        assert!(!verify_path(&g, &s, &perturbed));
        let mut wrong_delta = p;
        wrong_delta.steps[0].delta_t += 1;
        assert!(!verify_path(&g, &s, &wrong_delta));
    }

    #[test]
    fn low_degree_rejected() {
        let g = Graph::from_degree_sequence(&DegreeSequence::regular(6, 2).unwrap(), None).unwrap();
        let s = all_switches(&g)[0];
        assert_eq!(simulate_switch(&g, &s), Err(Error::MinDegreeTooSmall(2)));
    }

    #[test]
    fn json_round_trip() {
        let g = two_k4();
        let p = simulate_switch(&g, &Switch::new(0, 1, 4, 5)).unwrap();
        let text = serde_json::to_string(&p).unwrap();
        assert!(text.contains("\"removed\""));
        let back: SimulationPath = serde_json::from_str(&text).unwrap();
        assert_eq!(back, p);
    }
}
