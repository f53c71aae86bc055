//! Degree sequences and their derived scalars.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A graphical degree sequence, stored non-increasing.
///
/// Vertex `i` of every realization built from this sequence has degree
/// `degrees()[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct DegreeSequence {
    degrees: Vec<usize>,
    m: usize,
    m2: usize,
}

impl DegreeSequence {
    /// Validates `degrees` (any order) and stores it sorted non-increasing.
    pub fn new(mut degrees: Vec<usize>) -> Result<Self> {
        if degrees.is_empty() {
            return Err(Error::InvalidDegrees("empty sequence".into()));
        }
        degrees.sort_unstable_by(|a, b| b.cmp(a));
        let m: usize = degrees.iter().sum();
        if !m.is_multiple_of(2) {
            return Err(Error::NonGraphical(format!("degree sum {m} is odd")));
        }
        if !havel_hakimi_feasible(&degrees) {
            return Err(Error::NonGraphical(format!("{degrees:?}")));
        }
        let m2 = degrees.iter().map(|&d| d * d.saturating_sub(1)).sum();
        Ok(DegreeSequence { degrees, m, m2 })
    }

    /// The `d`-regular sequence on `n` vertices.
    pub fn regular(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    /// Sum of degrees, twice the number of edges.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Sum of `d_i (d_i - 1)`.
    pub fn m2(&self) -> usize {
        self.m2
    }

    pub fn edge_count(&self) -> usize {
        self.m / 2
    }

    pub fn max_degree(&self) -> usize {
        self.degrees[0]
    }

    pub fn min_degree(&self) -> usize {
        *self.degrees.last().unwrap()
    }

    pub fn average_degree(&self) -> f64 {
        self.m as f64 / self.n() as f64
    }

    pub fn is_regular(&self) -> bool {
        self.max_degree() == self.min_degree()
    }

    /// Upper bound `M2 / 6` on the triangle count of any realization.
    pub fn max_triangles(&self) -> usize {
        self.m2 / 6
    }

    /// Number of unordered pairs of vertex-disjoint edges in any realization,
    /// `C(M/2, 2) - M2/2`.
    pub fn nonincident_pairs(&self) -> u64 {
        let e = (self.m / 2) as u64;
        e * e.saturating_sub(1) / 2 - (self.m2 / 2) as u64
    }
}

impl fmt::Display for DegreeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_regular() {
            return write!(f, "{}x{}", self.degrees[0], self.n());
        }
        let parts: Vec<String> = self.degrees.iter().map(|d| d.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

impl FromStr for DegreeSequence {
    type Err = Error;

    /// Accepts `3x100` (100 vertices of degree 3), comma-separated lists, or
    /// a mix such as `4x2,3x4`.
    fn from_str(s: &str) -> Result<Self> {
        let mut degrees = Vec::new();
        for tok in s.split(|c: char| c == ',' || c.is_whitespace()) {
            let tok = tok.trim();
            if tok.is_empty() {
                continue;
            }
            if let Some((d, k)) = tok.split_once(['x', 'X']) {
                let d: usize = d
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad degree in {tok:?}")))?;
                let k: usize = k
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad repeat count in {tok:?}")))?;
                degrees.extend(std::iter::repeat_n(d, k));
            } else {
                degrees.push(
                    tok.parse()
                        .map_err(|_| Error::Parse(format!("bad degree {tok:?}")))?,
                );
            }
        }
        DegreeSequence::new(degrees)
    }
}

impl TryFrom<Vec<usize>> for DegreeSequence {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        DegreeSequence::new(v)
    }
}

impl From<DegreeSequence> for Vec<usize> {
    fn from(d: DegreeSequence) -> Self {
        d.degrees
    }
}

/// Havel-Hakimi reduction on a residual sequence (any order).
fn havel_hakimi_feasible(degrees: &[usize]) -> bool {
    let mut r: Vec<usize> = degrees.to_vec();
    loop {
        r.retain(|&d| d > 0);
        if r.is_empty() {
            return true;
        }
        r.sort_unstable_by(|a, b| b.cmp(a));
        let d = r[0];
        if d > r.len() - 1 {
            return false;
        }
        r[0] = 0;
        for x in r.iter_mut().skip(1).take(d) {
            *x -= 1;
        }
    }
}

/// Erdős–Gallai test for an arbitrary (unsorted) residual sequence.
pub fn erdos_gallai(residual: &[usize]) -> bool {
    let mut d: Vec<usize> = residual.to_vec();
    let total: usize = d.iter().sum();
    if !total.is_multiple_of(2) {
        return false;
    }
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    let mut lhs = 0usize;
    for k in 1..=n {
        lhs += d[k - 1];
        let rhs = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
        if lhs > rhs {
            return false;
        }
    }
    true
}
