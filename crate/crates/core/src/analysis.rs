//! Scalar formulas, Poisson references and sample statistics for triangle counts.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::chains::OutcomeCounts;
use crate::degree::DegreeSequence;
use crate::graph::{Adjacency, Graph};

/// `M2^3 / (6 M^3)`, the limiting mean triangle count under the uniform law.
pub fn mu_of(d: &DegreeSequence) -> f64 {
    if d.m() == 0 {
        return 0.0;
    }
    let m = d.m() as f64;
    let m2 = d.m2() as f64;
    m2.powi(3) / (6.0 * m.powi(3))
}

/// `floor(ln n / ln ln n)`, at least 1; 1 when `n < 3`.
pub fn nu_default(n: usize) -> usize {
    if n < 3 {
        return 1;
    }
    let ln = (n as f64).ln();
    ((ln / ln.ln()).floor() as usize).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalarReport {
    pub m: usize,
    pub m2: usize,
    pub mu: f64,
    pub a_d: u64,
    pub nu: usize,
    pub lambda_mu: f64,
    pub max_triangles: usize,
}

impl ScalarReport {
    pub fn new(d: &DegreeSequence, lambda: f64) -> Self {
        let mu = mu_of(d);
        ScalarReport {
            m: d.m(),
            m2: d.m2(),
            mu,
            a_d: d.nonincident_pairs(),
            nu: nu_default(d.n()),
            lambda_mu: lambda * mu,
            max_triangles: d.max_triangles(),
        }
    }
}

/// `½ Σ |p - q|` over the union of supports (missing entries are zero),
/// clipped to `[0, 1]`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let get = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    let s: f64 = (0..n).map(|i| (get(p, i) - get(q, i)).abs()).sum();
    (0.5 * s).clamp(0.0, 1.0)
}

/// `e^{-μ} μ^k / k!`, evaluated in log space.
pub fn poisson_pmf(mu: f64, k: usize) -> f64 {
    if mu == 0.0 {
        return if k == 0 { 1.0 } else { 0.0 };
    }
    let k = k as f64;
    (k * mu.ln() - mu - ln_gamma(k + 1.0)).exp()
}

/// Observed triangle counts from a chain run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleStats {
    pub samples: Vec<usize>,
    /// `histogram[t]` is the number of samples equal to `t`.
    pub histogram: Vec<u64>,
    pub n_samples: usize,
    pub mean: f64,
    /// Unbiased sample variance; zero with fewer than two samples.
    pub variance: f64,
    pub acceptance: OutcomeCounts,
    pub wall_time_secs: f64,
}

impl SampleStats {
    pub fn from_samples(samples: Vec<usize>, acceptance: OutcomeCounts) -> Self {
        let n = samples.len();
        let mut histogram = vec![0u64; samples.iter().max().map_or(0, |&m| m + 1)];
        for &t in &samples {
            histogram[t] += 1;
        }
        let mean = if n == 0 {
            0.0
        } else {
            samples.iter().sum::<usize>() as f64 / n as f64
        };
        let variance = if n < 2 {
            0.0
        } else {
            samples
                .iter()
                .map(|&t| (t as f64 - mean).powi(2))
                .sum::<f64>()
                / (n - 1) as f64
        };
        SampleStats {
            samples,
            histogram,
            n_samples: n,
            mean,
            variance,
            acceptance,
            wall_time_secs: 0.0,
        }
    }

    /// Concatenates samples in order and sums counters and wall times.
    pub fn merge(parts: &[SampleStats]) -> Self {
        let samples: Vec<usize> = parts
            .iter()
            .flat_map(|p| p.samples.iter().copied())
            .collect();
        let mut acc = OutcomeCounts::default();
        for p in parts {
            acc.merge(&p.acceptance);
        }
        let mut out = SampleStats::from_samples(samples, acc);
        out.wall_time_secs = parts.iter().map(|p| p.wall_time_secs).sum();
        out
    }

    pub fn empirical_pmf(&self) -> Vec<f64> {
        let n = self.n_samples.max(1) as f64;
        self.histogram.iter().map(|&c| c as f64 / n).collect()
    }

    /// Standard error of the mean by non-overlapping batch means.
    pub fn batch_means_se(&self, batches: usize) -> f64 {
        batch_means_se(&self.samples, batches)
    }

    /// Fraction of samples with `t >= t0`.
    pub fn tail_mass(&self, t0: usize) -> f64 {
        let n = self.n_samples.max(1) as f64;
        self.histogram.iter().skip(t0).sum::<u64>() as f64 / n
    }
}

/// Standard error of the mean of `x` from `batches` equal batches; the
/// remainder beyond a multiple of the batch size is dropped.
pub fn batch_means_se(x: &[usize], batches: usize) -> f64 {
    let b = batches.max(2);
    let size = x.len() / b;
    if size == 0 {
        return f64::NAN;
    }
    let means: Vec<f64> = x
        .chunks_exact(size)
        .take(b)
        .map(|c| c.iter().sum::<usize>() as f64 / size as f64)
        .collect();
    let m = means.iter().sum::<f64>() / b as f64;
    let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (b - 1) as f64;
    (var / b as f64).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonRow {
    pub k: usize,
    pub empirical: f64,
    pub poisson: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoissonReport {
    pub mu: f64,
    pub rows: Vec<PoissonRow>,
    /// Includes the Poisson mass beyond the largest observed count.
    pub tv: f64,
    pub mean: f64,
    pub variance: f64,
    pub n_samples: usize,
}

impl PoissonReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,empirical_pmf,poisson_pmf\n");
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r.k, r.empirical, r.poisson));
        }
        s
    }
}

/// Compares a probability vector indexed by `t` with `Pois(mu)`.
pub fn compare_pmf_to_poisson(pmf: &[f64], mu: f64) -> (Vec<PoissonRow>, f64) {
    let rows: Vec<PoissonRow> = pmf
        .iter()
        .enumerate()
        .map(|(k, &e)| PoissonRow {
            k,
            empirical: e,
            poisson: poisson_pmf(mu, k),
        })
        .collect();
    let covered: f64 = rows.iter().map(|r| r.poisson).sum();
    let diff: f64 = rows.iter().map(|r| (r.empirical - r.poisson).abs()).sum();
    let tv = (0.5 * (diff + (1.0 - covered).max(0.0))).clamp(0.0, 1.0);
    (rows, tv)
}

pub fn compare_to_poisson(stats: &SampleStats, mu: f64) -> PoissonReport {
    let (rows, tv) = compare_pmf_to_poisson(&stats.empirical_pmf(), mu);
    PoissonReport {
        mu,
        rows,
        tv,
        mean: stats.mean,
        variance: stats.variance,
        n_samples: stats.n_samples,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeChecks {
    pub m: usize,
    pub m2: usize,
    pub average_degree: f64,
    pub m2_at_least_m: bool,
    pub average_at_least_two: bool,
    /// `M2 >= M` exactly when the average degree is at least 2. Not an
    /// identity: the star `(3,1,1,1)` has `M2 = M` with average 3/2.
    pub iff_holds: bool,
    /// Average degree at least 2 implies `M2 >= M`; always true.
    pub average_implies_m2: bool,
    /// Per connected component of the supplied graph (isolated vertices
    /// excluded): whether it is a path.
    pub component_is_path: Option<Vec<bool>>,
    /// For a graph whose components are all paths, `M - M2` equals twice
    /// the number of components.
    pub path_identity_holds: Option<bool>,
}

/// Checks the relations between `M`, `M2` and the average degree, and for
/// a supplied graph, the path identity `M - M2 = 2` per path component.
pub fn degree_sequence_checks(d: &DegreeSequence, g: Option<&Graph>) -> DegreeChecks {
    let avg = d.average_degree();
    let m2_at_least_m = d.m2() >= d.m();
    let average_at_least_two = d.m() >= 2 * d.n();
    let (component_is_path, path_identity_holds) = match g {
        None => (None, None),
        Some(g) => {
            let comps = path_components(g);
            let all_paths = comps.iter().all(|&p| p);
            let identity = if all_paths {
                let gd: Vec<usize> = g.degrees();
                let m: i64 = gd.iter().sum::<usize>() as i64;
                let m2: i64 = gd.iter().map(|&x| (x * x.saturating_sub(1)) as i64).sum();
                Some(m - m2 == 2 * comps.len() as i64)
            } else {
                None
            };
            (Some(comps), identity)
        }
    };
    DegreeChecks {
        m: d.m(),
        m2: d.m2(),
        average_degree: avg,
        m2_at_least_m,
        average_at_least_two,
        iff_holds: m2_at_least_m == average_at_least_two,
        average_implies_m2: !average_at_least_two || m2_at_least_m,
        component_is_path,
        path_identity_holds,
    }
}

/// Whether each non-trivial connected component is a path.
fn path_components(g: &Graph) -> Vec<bool> {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] || g.degree(s) == 0 {
            continue;
        }
        let mut stack = vec![s];
        seen[s] = true;
        let (mut verts, mut deg_sum, mut max_deg) = (0usize, 0usize, 0usize);
        while let Some(v) = stack.pop() {
            verts += 1;
            deg_sum += g.degree(v);
            max_deg = max_deg.max(g.degree(v));
            for w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        // a connected graph is a path iff it is a tree with maximum degree 2
        out.push(max_deg <= 2 && deg_sum / 2 == verts - 1);
    }
    out
}
