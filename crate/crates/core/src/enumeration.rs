//! Exhaustive state spaces for small degree sequences.
//!
//! A [`StateSpace`] lists every labelled graph with the given degrees as an
//! exact edge bitset (at most 16 vertices), together with its triangle
//! census. On top of it sit exact transition matrices of both chains,
//! irreducibility and stationarity checks, a spectral report, and the
//! simulation-path ensemble statistics.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::io::{Read, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chains::ChainKind;
use crate::degree::{erdos_gallai, DegreeSequence};
use crate::error::{Error, Result};
use crate::graph::{pair_bit, Graph};
use crate::paths::{cases_construct, CaseLabel};
use crate::rng::chain_rng;
use crate::switch::{all_switches, delta_unchecked, is_tri_unchecked, Switch};

pub const DEFAULT_LIMIT: usize = 2_000_000;
pub const MAX_VERTICES: usize = 16;
const CACHE_MAGIC: &[u8; 8] = b"TRISPACE";
const CACHE_VERSION: u32 = 1;
/// Above this many states the stationary vector is found by power iteration.
const DENSE_LIMIT: usize = 3000;

/// Sparse row-stochastic matrix; the diagonal is stored separately.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix {
    pub which: ChainKind,
    pub lambda: f64,
    pub nu_cap: Option<usize>,
    /// Off-diagonal entries `(column, probability)` per row, sorted by column.
    pub rows: Vec<Vec<(usize, f64)>>,
    pub diag: Vec<f64>,
}

impl TransitionMatrix {
    pub fn n(&self) -> usize {
        self.diag.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return self.diag[i];
        }
        self.rows[i]
            .binary_search_by_key(&j, |e| e.0)
            .map_or(0.0, |k| self.rows[i][k].1)
    }

    /// `p P` for a row vector `p`.
    pub fn left_mul(&self, p: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = p.iter().zip(&self.diag).map(|(a, d)| a * d).collect();
        for (i, row) in self.rows.iter().enumerate() {
            let pi = p[i];
            if pi == 0.0 {
                continue;
            }
            for &(j, q) in row {
                out[j] += pi * q;
            }
        }
        out
    }

    pub fn max_row_sum_error(&self) -> f64 {
        self.rows
            .iter()
            .zip(&self.diag)
            .map(|(r, d)| (r.iter().map(|e| e.1).sum::<f64>() + d - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_diagonal(&self) -> f64 {
        self.diag.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.n();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            for &(j, q) in &self.rows[i] {
                m[(i, j)] = q;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub n_states: usize,
    /// Second-largest eigenvalue; `None` for a single state.
    pub mu1: Option<f64>,
    /// Smallest eigenvalue; `None` for a single state.
    pub mu_min: Option<f64>,
    pub mu_star: Option<f64>,
    pub pi_min: f64,
    pub epsilon: f64,
    /// `(1 - μ*)^{-1} (ln(1/π*) + ln(1/ε))`; zero for a single state.
    pub tau_bound: f64,
    /// `(1 + μ_min)^{-1}`.
    pub smallest_eig_lhs: Option<f64>,
    /// `max_H 1 / (2 P(H, H))`.
    pub max_half_inv_diag: f64,
    /// `(1 + μ_min)^{-1} <= max_H 1/(2P(H,H)) <= 3/2`.
    pub bound_chain_holds: bool,
    pub iterations: [usize; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEnsembleStats {
    pub lambda: f64,
    pub nu_cap: Option<usize>,
    /// Longest simulation path.
    pub ell: usize,
    /// Most simulation paths through one Δ-switch transition.
    pub b_sigma: u64,
    /// `20 d1^2 (2M + d1^2)`.
    pub b_bound: u64,
    pub d_gap: f64,
    /// `Ẑ / |Ω|`, the closed-form upper bound on the simulation gap.
    pub d_gap_bound: f64,
    pub r_ratio: f64,
    pub switch_transitions: u64,
    pub tri_transitions: u64,
    pub tri_transitions_used: u64,
    pub case_counts: BTreeMap<CaseLabel, u64>,
    /// Paths that failed to build or did not end at the switched graph.
    pub failures: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub t: usize,
    pub n_t: u64,
    pub n_t1: u64,
    pub ratio: f64,
    pub mu_over_t1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CensusReport {
    pub mu: f64,
    pub rows: Vec<CensusRow>,
    /// `(t0, Pr(t >= t0))` under the uniform law.
    pub tail: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceSummary {
    pub n: usize,
    pub degrees: Vec<usize>,
    pub size: usize,
    pub census: Vec<u64>,
    pub checks: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone)]
pub struct StateSpace {
    d: DegreeSequence,
    states: Vec<u128>,
    triangles: Vec<usize>,
    census: Vec<u64>,
    matrix: Option<TransitionMatrix>,
}

impl StateSpace {
    /// Enumerates all labelled realizations of `d`.
    ///
    /// Vertices are processed in label order; each chooses its remaining
    /// neighbours among higher labels, and a branch is kept only if the
    /// residual degrees of the later vertices stay graphical.
    pub fn enumerate(d: &DegreeSequence, limit: usize) -> Result<Self> {
        let n = d.n();
        if n > MAX_VERTICES {
            return Err(Error::InvalidConfig(format!(
                "enumeration supports at most {MAX_VERTICES} vertices, got {n}"
            )));
        }
        let mut residual = d.degrees().to_vec();
        let mut states = Vec::new();
        backtrack(n, 0, &mut residual, 0, &mut states, limit)?;
        states.sort_unstable();
        Ok(Self::from_states(d.clone(), states))
    }

    fn from_states(d: DegreeSequence, states: Vec<u128>) -> Self {
        let n = d.n();
        let triangles: Vec<usize> = states
            .par_iter()
            .map(|&s| Graph::from_edge_bits(n, s).count_triangles())
            .collect();
        let mut census = vec![0u64; d.max_triangles() + 1];
        for &t in &triangles {
            census[t] += 1;
        }
        StateSpace {
            d,
            states,
            triangles,
            census,
            matrix: None,
        }
    }

    pub fn degrees(&self) -> &DegreeSequence {
        &self.d
    }

    pub fn n(&self) -> usize {
        self.d.n()
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[u128] {
        &self.states
    }

    pub fn graph(&self, i: usize) -> Graph {
        Graph::from_edge_bits(self.n(), self.states[i])
    }

    pub fn triangles(&self) -> &[usize] {
        &self.triangles
    }

    /// `census[t]` is the number of states with `t` triangles.
    pub fn census(&self) -> &[u64] {
        &self.census
    }

    pub fn index_of(&self, key: u128) -> Option<usize> {
        self.states.binary_search(&key).ok()
    }

    pub fn matrix(&self) -> Option<&TransitionMatrix> {
        self.matrix.as_ref()
    }

    fn require_matrix(&self) -> Result<&TransitionMatrix> {
        self.matrix.as_ref().ok_or(Error::MatrixMissing)
    }

    /// Key of the graph obtained from state `key` by `s`.
    fn switched_key(&self, key: u128, s: &Switch) -> u128 {
        let n = self.n();
        let [a1, a2, a3, a4] = s.a;
        key ^ (1u128 << pair_bit(n, a1, a2))
            ^ (1u128 << pair_bit(n, a3, a4))
            ^ (1u128 << pair_bit(n, a1, a3))
            ^ (1u128 << pair_bit(n, a2, a4))
    }

    /// Weights `λ^{min(t, ν)}` normalized to a probability vector.
    pub fn closed_form_stationary(&self, lambda: f64, nu_cap: Option<usize>) -> Vec<f64> {
        let w: Vec<f64> = self
            .triangles
            .iter()
            .map(|&t| lambda.powi(cap(t, nu_cap) as i32))
            .collect();
        let z: f64 = w.iter().sum();
        w.into_iter().map(|x| x / z).collect()
    }

    /// Fills the exact transition matrix: each simple proposal on the
    /// state's `a(d)` edge pairs contributes `min(1, λ^Δτ) / (3 a(d))`,
    /// and the remaining mass sits on the diagonal.
    pub fn build_matrix(&mut self, which: ChainKind, lambda: f64, nu_cap: Option<usize>) {
        let a = self.d.nonincident_pairs();
        let unit = if a == 0 { 0.0 } else { 1.0 / (3.0 * a as f64) };
        let rows: Vec<Vec<(usize, f64)>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let g = self.graph(i);
                let t = self.triangles[i];
                let mut row = Vec::new();
                for s in all_switches(&g) {
                    let prob = match which {
                        ChainKind::Switch => unit,
                        ChainKind::TriSwitch => {
                            if !is_tri_unchecked(&g, &s) {
                                continue;
                            }
                            let th = (t as i64 + delta_unchecked(&g, &s)) as usize;
                            let dtau = cap(th, nu_cap) as i32 - cap(t, nu_cap) as i32;
                            unit * lambda.powi(dtau).min(1.0)
                        }
                    };
                    let j = self
                        .index_of(self.switched_key(self.states[i], &s))
                        .expect("switched graph is a state");
                    row.push((j, prob));
                }
                row.sort_unstable_by_key(|e| e.0);
                row
            })
            .collect();
        let diag = rows
            .iter()
            .map(|r| 1.0 - r.iter().map(|e| e.1).sum::<f64>())
            .collect();
        self.matrix = Some(TransitionMatrix {
            which,
            lambda,
            nu_cap,
            rows,
            diag,
        });
    }

    /// Whether the off-diagonal support graph is connected.
    pub fn check_irreducible(&self) -> Result<bool> {
        let m = self.require_matrix()?;
        Ok(self.components_of(m) <= 1)
    }

    /// Number of connected components of the (undirected) support graph.
    pub fn component_count(&self) -> Result<usize> {
        let m = self.require_matrix()?;
        Ok(self.components_of(m))
    }

    fn components_of(&self, m: &TransitionMatrix) -> usize {
        let n = m.n();
        let mut adj: Vec<Vec<usize>> = m
            .rows
            .iter()
            .map(|r| r.iter().filter(|e| e.1 > 0.0).map(|e| e.0).collect())
            .collect();
        for i in 0..n {
            for k in 0..adj[i].len() {
                let j = adj[i][k];
                adj[j].push(i);
            }
        }
        let mut seen = vec![false; n];
        let mut comps = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            comps += 1;
            seen[s] = true;
            let mut q = VecDeque::from([s]);
            while let Some(v) = q.pop_front() {
                for &w in &adj[v] {
                    if !seen[w] {
                        seen[w] = true;
                        q.push_back(w);
                    }
                }
            }
        }
        comps
    }

    /// Largest violation of `π(G) P(G,H) = π(H) P(H,G)` over all pairs.
    pub fn detailed_balance_error(&self, pi: &[f64]) -> Result<f64> {
        let m = self.require_matrix()?;
        let mut worst: f64 = 0.0;
        for (i, row) in m.rows.iter().enumerate() {
            for &(j, p) in row {
                worst = worst.max((pi[i] * p - pi[j] * m.get(j, i)).abs());
            }
        }
        Ok(worst)
    }

    /// Solves `π P = π`: dense LU for small spaces, power iteration on the
    /// (already lazy) chain otherwise.
    pub fn stationary_exact(&self) -> Result<Vec<f64>> {
        let m = self.require_matrix()?;
        if !self.check_irreducible()? {
            return Err(Error::NotIrreducible);
        }
        let n = m.n();
        if n <= DENSE_LIMIT {
            let mut a = m.dense().transpose();
            for i in 0..n {
                a[(i, i)] -= 1.0;
            }
            for j in 0..n {
                a[(n - 1, j)] = 1.0;
            }
            let mut b = DVector::zeros(n);
            b[n - 1] = 1.0;
            let x = a.lu().solve(&b).ok_or(Error::ConvergenceFailure {
                what: "stationary LU solve",
                iterations: 0,
                residual: f64::NAN,
            })?;
            return Ok(x.iter().copied().collect());
        }
        let mut p = vec![1.0 / n as f64; n];
        let max_iter = 1_000_000;
        let mut residual = f64::INFINITY;
        for it in 0..max_iter {
            let next = m.left_mul(&p);
            residual = next.iter().zip(&p).map(|(a, b)| (a - b).abs()).sum();
            let s: f64 = next.iter().sum();
            p = next.into_iter().map(|x| x / s).collect();
            if residual < 1e-13 {
                log::debug!("stationary power iteration converged after {it} steps");
                return Ok(p);
            }
        }
        Err(Error::ConvergenceFailure {
            what: "stationary power iteration",
            iterations: max_iter,
            residual,
        })
    }

    /// Extreme eigenvalues of the built chain by deflated power iteration on
    /// its symmetrization `Π^{1/2} P Π^{-1/2}`, and the mixing bound at `epsilon`.
    pub fn spectral_report(&self, epsilon: f64) -> Result<SpectralReport> {
        let m = self.require_matrix()?;
        let pi = self.stationary_exact()?;
        let n = m.n();
        let pi_min = pi.iter().copied().fold(f64::INFINITY, f64::min);
        let max_half_inv_diag = m.diag.iter().map(|d| 0.5 / d).fold(0.0, f64::max);
        if n == 1 {
            return Ok(SpectralReport {
                n_states: 1,
                mu1: None,
                mu_min: None,
                mu_star: None,
                pi_min,
                epsilon,
                tau_bound: 0.0,
                smallest_eig_lhs: None,
                max_half_inv_diag,
                bound_chain_holds: max_half_inv_diag <= 1.5 + 1e-12,
                iterations: [0, 0],
            });
        }
        let sym = Symmetrized::new(m, &pi);
        let (top, it1) = sym.extreme(1.0)?;
        let (bottom, it2) = sym.extreme(-1.0)?;
        let mu1 = top - 1.0;
        let mu_min = 1.0 - bottom;
        let mu_star = mu1.max(mu_min.abs());
        let tau_bound = ((1.0 / pi_min).ln() + (1.0 / epsilon).ln()) / (1.0 - mu_star);
        let lhs = 1.0 / (1.0 + mu_min);
        Ok(SpectralReport {
            n_states: n,
            mu1: Some(mu1),
            mu_min: Some(mu_min),
            mu_star: Some(mu_star),
            pi_min,
            epsilon,
            tau_bound,
            smallest_eig_lhs: Some(lhs),
            max_half_inv_diag,
            bound_chain_holds: lhs <= max_half_inv_diag + 1e-9 && max_half_inv_diag <= 1.5 + 1e-12,
            iterations: [it1, it2],
        })
    }

    /// Builds the simulation path of every switch-chain transition and
    /// tallies how many paths use each Δ-switch transition.
    pub fn path_ensemble_stats(
        &self,
        lambda: f64,
        nu_cap: Option<usize>,
    ) -> Result<PathEnsembleStats> {
        let dmin = self.d.min_degree();
        if dmin < 3 {
            return Err(Error::MinDegreeTooSmall(dmin));
        }
        let n = self.n();
        struct Acc {
            tally: HashMap<(u32, u32), u32>,
            ell: usize,
            cases: BTreeMap<CaseLabel, u64>,
            switch_transitions: u64,
            tri_transitions: u64,
            failures: u64,
            min_tri_weight: f64,
        }
        let new_acc = || Acc {
            tally: HashMap::new(),
            ell: 0,
            cases: BTreeMap::new(),
            switch_transitions: 0,
            tri_transitions: 0,
            failures: 0,
            min_tri_weight: f64::INFINITY,
        };
        let weight = |t: usize| lambda.powi(cap(t, nu_cap) as i32);
        let acc = (0..self.len())
            .into_par_iter()
            .fold(new_acc, |mut acc, i| {
                let key = self.states[i];
                let g = Graph::from_edge_bits(n, key);
                for s in all_switches(&g) {
                    acc.switch_transitions += 1;
                    let target = self.switched_key(key, &s);
                    if is_tri_unchecked(&g, &s) {
                        acc.tri_transitions += 1;
                        let j = self.index_of(target).expect("state");
                        let w = weight(self.triangles[i]).min(weight(self.triangles[j]));
                        acc.min_tri_weight = acc.min_tri_weight.min(w);
                    }
                    let Ok(path) = cases_construct(&g, &s) else {
                        acc.failures += 1;
                        continue;
                    };
                    acc.ell = acc.ell.max(path.steps.len());
                    *acc.cases.entry(path.case).or_insert(0) += 1;
                    let mut x = key;
                    let mut xi = i as u32;
                    for step in &path.steps {
                        let y = self.switched_key(x, &step.switch);
                        let Some(yi) = self.index_of(y) else {
                            acc.failures += 1;
                            break;
                        };
                        *acc.tally.entry((xi, yi as u32)).or_insert(0) += 1;
                        x = y;
                        xi = yi as u32;
                    }
                    if x != target || path.steps.len() > 5 {
                        acc.failures += 1;
                    }
                }
                acc
            })
            .reduce(new_acc, |mut a, b| {
                for (k, v) in b.tally {
                    *a.tally.entry(k).or_insert(0) += v;
                }
                a.ell = a.ell.max(b.ell);
                for (k, v) in b.cases {
                    *a.cases.entry(k).or_insert(0) += v;
                }
                a.switch_transitions += b.switch_transitions;
                a.tri_transitions += b.tri_transitions;
                a.failures += b.failures;
                a.min_tri_weight = a.min_tri_weight.min(b.min_tri_weight);
                a
            });

        let d1 = self.d.max_degree() as u64;
        let b_bound = 20 * d1 * d1 * (2 * self.d.m() as u64 + d1 * d1);
        let z_hat: f64 = self.triangles.iter().map(|&t| weight(t)).sum();
        let size = self.len() as f64;
        // switch chain: uniform π', every transition 1/(3a); Δ chain: π(u)P(u,v)
        // = min(w_u, w_v) / (Ẑ 3a), so the common 1/(3a) cancels
        let d_gap = if acc.tri_transitions == 0 {
            f64::NAN
        } else {
            z_hat / (size * acc.min_tri_weight)
        };
        let max_w = self
            .triangles
            .iter()
            .map(|&t| weight(t))
            .fold(0.0, f64::max);
        let r_ratio = (max_w / z_hat * size).powi(2);
        Ok(PathEnsembleStats {
            lambda,
            nu_cap,
            ell: acc.ell,
            b_sigma: acc.tally.values().copied().max().unwrap_or(0) as u64,
            b_bound,
            d_gap,
            d_gap_bound: z_hat / size,
            r_ratio,
            switch_transitions: acc.switch_transitions,
            tri_transitions: acc.tri_transitions,
            tri_transitions_used: acc.tally.len() as u64,
            case_counts: acc.cases,
            failures: acc.failures,
        })
    }

    /// Ratios `N_{t+1} / N_t` against `μ / (t+1)`, and uniform tail masses.
    pub fn census_ratio_check(&self, tail_from: &[usize]) -> CensusReport {
        let mu = crate::analysis::mu_of(&self.d);
        let rows = self
            .census
            .windows(2)
            .enumerate()
            .filter(|(_, w)| w[0] > 0 && w[1] > 0)
            .map(|(t, w)| CensusRow {
                t,
                n_t: w[0],
                n_t1: w[1],
                ratio: w[1] as f64 / w[0] as f64,
                mu_over_t1: mu / (t + 1) as f64,
            })
            .collect();
        let total = self.len().max(1) as f64;
        let tail = tail_from
            .iter()
            .map(|&t0| (t0, self.census.iter().skip(t0).sum::<u64>() as f64 / total))
            .collect();
        CensusReport { mu, rows, tail }
    }

    /// Triangle-count law under `π`.
    pub fn triangle_law(&self, pi: &[f64]) -> Vec<f64> {
        let mut law = vec![0.0; self.census.len()];
        for (&t, &p) in self.triangles.iter().zip(pi) {
            law[t] += p;
        }
        law
    }

    pub fn summary(&self) -> SpaceSummary {
        SpaceSummary {
            n: self.n(),
            degrees: self.d.degrees().to_vec(),
            size: self.len(),
            census: self.census.clone(),
            checks: BTreeMap::new(),
        }
    }

    /// Versioned binary cache: magic, version, `n`, degrees, states, census.
    pub fn write_cache<W: Write>(&self, mut w: W) -> Result<()> {
        w.write_all(CACHE_MAGIC)?;
        w.write_all(&CACHE_VERSION.to_le_bytes())?;
        w.write_all(&(self.n() as u32).to_le_bytes())?;
        for &d in self.d.degrees() {
            w.write_all(&(d as u32).to_le_bytes())?;
        }
        w.write_all(&(self.len() as u64).to_le_bytes())?;
        for &s in &self.states {
            w.write_all(&s.to_le_bytes())?;
        }
        w.write_all(&(self.census.len() as u32).to_le_bytes())?;
        for &c in &self.census {
            w.write_all(&c.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_cache<R: Read>(mut r: R) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != CACHE_MAGIC {
            return Err(Error::Parse("not a state-space cache".into()));
        }
        let version = read_u32(&mut r)?;
        if version != CACHE_VERSION {
            return Err(Error::Parse(format!("unsupported cache version {version}")));
        }
        let n = read_u32(&mut r)? as usize;
        if n == 0 || n > MAX_VERTICES {
            return Err(Error::Parse(format!("bad vertex count {n}")));
        }
        let degrees = (0..n)
            .map(|_| read_u32(&mut r).map(|d| d as usize))
            .collect::<Result<Vec<_>>>()?;
        let d = DegreeSequence::new(degrees.clone())?;
        if d.degrees() != degrees.as_slice() {
            return Err(Error::Parse("cached degrees are not sorted".into()));
        }
        let count = read_u64(&mut r)? as usize;
        let mut states = Vec::with_capacity(count.min(DEFAULT_LIMIT));
        for _ in 0..count {
            let mut b = [0u8; 16];
            r.read_exact(&mut b)?;
            states.push(u128::from_le_bytes(b));
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parse("cached states are not strictly sorted".into()));
        }
        for &s in &states {
            if Graph::from_edge_bits(n, s).degrees() != degrees {
                return Err(Error::Parse(
                    "cached state does not realize the degrees".into(),
                ));
            }
        }
        let clen = read_u32(&mut r)? as usize;
        let census = (0..clen)
            .map(|_| read_u64(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let space = Self::from_states(d, states);
        if space.census != census {
            return Err(Error::Parse(
                "cached census does not match the states".into(),
            ));
        }
        Ok(space)
    }

    /// Empirical TV distance to `pi` after `k` steps, for each `k` in
    /// `checkpoints`, over `runs` independent simulated chains started at
    /// state `start`.
    pub fn empirical_tv_curve(
        &self,
        start: usize,
        pi: &[f64],
        cfg: &crate::chains::ChainConfig,
        which: ChainKind,
        checkpoints: &[u64],
        runs: usize,
    ) -> Result<Vec<f64>> {
        let mut hist = vec![vec![0u64; self.len()]; checkpoints.len()];
        let mut rng = chain_rng(cfg.seed);
        for _ in 0..runs {
            let mut g = self.graph(start);
            let mut step = 0u64;
            for (c, &k) in checkpoints.iter().enumerate() {
                while step < k {
                    match which {
                        ChainKind::Switch => crate::chains::switch_step(&mut g, &mut rng)?,
                        ChainKind::TriSwitch => {
                            crate::chains::tri_switch_step(&mut g, cfg, &mut rng)?
                        }
                    };
                    step += 1;
                }
                let i = self.index_of(g.edge_bits()).expect("state");
                hist[c][i] += 1;
            }
        }
        Ok(hist
            .into_iter()
            .map(|h| {
                let p: Vec<f64> = h.iter().map(|&c| c as f64 / runs as f64).collect();
                crate::analysis::tv_distance(&p, pi)
            })
            .collect())
    }

    /// Exact TV distance between `δ_start P^k` and `pi` for `k = 0..=k_max`.
    pub fn exact_tv_curve(&self, start: usize, pi: &[f64], k_max: usize) -> Result<Vec<f64>> {
        let m = self.require_matrix()?;
        let mut p = vec![0.0; self.len()];
        p[start] = 1.0;
        let mut out = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            out.push(crate::analysis::tv_distance(&p, pi));
            if k < k_max {
                p = m.left_mul(&p);
            }
        }
        Ok(out)
    }
}

/// All graphical sequences on `n` vertices with degrees in `min..=max`,
/// in decreasing lexicographic order.
pub fn degree_sequences(n: usize, min: usize, max: usize) -> Vec<DegreeSequence> {
    fn rec(n: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<DegreeSequence>) {
        if cur.len() == n {
            if erdos_gallai(cur) {
                out.push(DegreeSequence::new(cur.clone()).expect("graphical"));
            }
            return;
        }
        for d in (lo..=hi).rev() {
            cur.push(d);
            rec(n, lo, d, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if n > 0 && min <= max {
        rec(n, min, max.min(n - 1), &mut Vec::with_capacity(n), &mut out);
    }
    out
}

#[inline]
fn cap(t: usize, nu_cap: Option<usize>) -> usize {
    nu_cap.map_or(t, |nu| t.min(nu))
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn backtrack(
    n: usize,
    u: usize,
    residual: &mut [usize],
    bits: u128,
    out: &mut Vec<u128>,
    limit: usize,
) -> Result<()> {
    if u == n {
        out.push(bits);
        if out.len() > limit {
            return Err(Error::SpaceTooLarge { limit });
        }
        return Ok(());
    }
    let need = residual[u];
    let candidates: Vec<usize> = (u + 1..n).filter(|&v| residual[v] > 0).collect();
    if candidates.len() < need {
        return Ok(());
    }
    residual[u] = 0;
    let mut chosen = Vec::with_capacity(need);
    choose(
        n,
        u,
        &candidates,
        0,
        need,
        &mut chosen,
        residual,
        bits,
        out,
        limit,
    )?;
    residual[u] = need;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn choose(
    n: usize,
    u: usize,
    candidates: &[usize],
    from: usize,
    need: usize,
    chosen: &mut Vec<usize>,
    residual: &mut [usize],
    bits: u128,
    out: &mut Vec<u128>,
    limit: usize,
) -> Result<()> {
    if chosen.len() == need {
        if erdos_gallai(&residual[u + 1..]) {
            let mut b = bits;
            for &v in chosen.iter() {
                b |= 1u128 << pair_bit(n, u, v);
            }
            backtrack(n, u + 1, residual, b, out, limit)?;
        }
        return Ok(());
    }
    let remaining = need - chosen.len();
    for k in from..candidates.len() {
        if candidates.len() - k < remaining {
            break;
        }
        let v = candidates[k];
        residual[v] -= 1;
        chosen.push(v);
        choose(
            n,
            u,
            candidates,
            k + 1,
            need,
            chosen,
            residual,
            bits,
            out,
            limit,
        )?;
        chosen.pop();
        residual[v] += 1;
    }
    Ok(())
}

/// `Π^{1/2} P Π^{-1/2}` applied implicitly.
struct Symmetrized<'a> {
    m: &'a TransitionMatrix,
    sqrt_pi: Vec<f64>,
    inv_sqrt_pi: Vec<f64>,
}

impl<'a> Symmetrized<'a> {
    fn new(m: &'a TransitionMatrix, pi: &[f64]) -> Self {
        Symmetrized {
            m,
            sqrt_pi: pi.iter().map(|p| p.sqrt()).collect(),
            inv_sqrt_pi: pi.iter().map(|p| 1.0 / p.sqrt()).collect(),
        }
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.m
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                let off: f64 = row
                    .iter()
                    .map(|&(j, p)| p * self.inv_sqrt_pi[j] * x[j])
                    .sum();
                self.m.diag[i] * x[i] + self.sqrt_pi[i] * off
            })
            .collect()
    }

    /// Largest eigenvalue of `I + sign·S` on the complement of `√π`.
    fn extreme(&self, sign: f64) -> Result<(f64, usize)> {
        let n = self.sqrt_pi.len();
        let norm_v: f64 = self.sqrt_pi.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v0: Vec<f64> = self.sqrt_pi.iter().map(|x| x / norm_v).collect();
        let deflate = |x: &mut Vec<f64>| {
            let c: f64 = x.iter().zip(&v0).map(|(a, b)| a * b).sum();
            for (xi, vi) in x.iter_mut().zip(&v0) {
                *xi -= c * vi;
            }
            let nrm = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            for xi in x.iter_mut() {
                *xi /= nrm;
            }
        };
        let mut rng = chain_rng(0x5eed);
        let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        deflate(&mut x);
        let op = |x: &[f64]| -> Vec<f64> {
            let sx = self.apply(x);
            x.iter().zip(sx).map(|(a, b)| a + sign * b).collect()
        };
        let max_iter = 2_000_000;
        let mut residual = f64::INFINITY;
        for it in 1..=max_iter {
            let mut y = op(&x);
            let theta: f64 = y.iter().zip(&x).map(|(a, b)| a * b).sum();
            residual = y
                .iter()
                .zip(&x)
                .map(|(a, b)| (a - theta * b).powi(2))
                .sum::<f64>()
                .sqrt();
            if residual < 1e-11 {
                return Ok((theta, it));
            }
            deflate(&mut y);
            x = y;
        }
        Err(Error::ConvergenceFailure {
            what: "deflated power iteration",
            iterations: max_iter,
            residual,
        })
    }
}
