//! The switch chain and the triangle-weighted Δ-switch chain.
//!
//! One step draws an unordered pair of vertex-disjoint edges uniformly, then
//! one of the three perfect matchings on their four endpoints uniformly, then
//! a uniform real used for the Metropolis test. Drawing the current matching
//! is a lazy step. The Δ-switch chain additionally rejects proposals that
//! leave the triangle set unchanged and accepts the rest with probability
//! `min(1, λ^Δτ)`, where `Δτ` is the change in `min(t, ν)` under a cap `ν`
//! (or in `t` without one).

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::SampleStats;
use crate::error::{Error, Result};
use crate::graph::{Adjacency, Graph};
use crate::rng::{chain_rng, split_seed};
use crate::switch::{
    delta_unchecked, draw_pair_unchecked, is_tri_unchecked, nonincident_pair_count, Switch,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChainKind {
    Switch,
    #[serde(rename = "triswitch")]
    TriSwitch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainConfig {
    pub lambda: f64,
    /// Cap on triangle counts in the acceptance ratio; `None` is uncapped.
    pub nu_cap: Option<usize>,
    pub seed: u64,
    pub steps: u64,
    pub burn_in: u64,
    pub thin: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            lambda: 1.0,
            nu_cap: None,
            seed: 0,
            steps: 0,
            burn_in: 0,
            thin: 1,
        }
    }
}

impl ChainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.lambda.is_finite() || self.lambda < 1.0 {
            return Err(Error::InvalidConfig(format!(
                "lambda must be finite and at least 1, got {}",
                self.lambda
            )));
        }
        if self.thin == 0 {
            return Err(Error::InvalidConfig("thin must be at least 1".into()));
        }
        if self.nu_cap == Some(0) {
            return Err(Error::InvalidConfig("nu cap must be at least 1".into()));
        }
        Ok(())
    }

    /// The triangle count entering the acceptance ratio.
    #[inline]
    pub fn capped(&self, t: usize) -> usize {
        match self.nu_cap {
            Some(nu) => t.min(nu),
            None => t,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StepOutcome {
    Moved { delta_t: i64 },
    RejectedMetropolis,
    RejectedNotTriSwitch,
    RejectedMultiEdge,
    LazyIdentity,
}

impl StepOutcome {
    pub fn delta_t(&self) -> i64 {
        match self {
            StepOutcome::Moved { delta_t } => *delta_t,
            _ => 0,
        }
    }
}

/// Step counts by outcome.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub moved: u64,
    pub rejected_metropolis: u64,
    pub rejected_not_tri_switch: u64,
    pub rejected_multi_edge: u64,
    pub lazy_identity: u64,
}

impl OutcomeCounts {
    pub fn record(&mut self, o: StepOutcome) {
        match o {
            StepOutcome::Moved { .. } => self.moved += 1,
            StepOutcome::RejectedMetropolis => self.rejected_metropolis += 1,
            StepOutcome::RejectedNotTriSwitch => self.rejected_not_tri_switch += 1,
            StepOutcome::RejectedMultiEdge => self.rejected_multi_edge += 1,
            StepOutcome::LazyIdentity => self.lazy_identity += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.moved
            + self.rejected_metropolis
            + self.rejected_not_tri_switch
            + self.rejected_multi_edge
            + self.lazy_identity
    }

    pub fn merge(&mut self, o: &OutcomeCounts) {
        self.moved += o.moved;
        self.rejected_metropolis += o.rejected_metropolis;
        self.rejected_not_tri_switch += o.rejected_not_tri_switch;
        self.rejected_multi_edge += o.rejected_multi_edge;
        self.lazy_identity += o.lazy_identity;
    }
}

/// Proposal shared by both chains; `None` for a lazy draw. Always consumes
/// a pair draw, a matching draw and one uniform.
#[inline]
fn propose<R: Rng + ?Sized>(g: &Graph, rng: &mut R) -> (Option<Switch>, f64) {
    let ((x, y), (z, w)) = draw_pair_unchecked(g, rng);
    let k = rng.random_range(0..3u8);
    let u: f64 = rng.random();
    let s = match k {
        0 => None,
        1 => Some(Switch::new(x, y, z, w)),
        _ => Some(Switch::new(x, y, w, z)),
    };
    (s, u)
}

#[inline]
fn creates_multi_edge(g: &Graph, s: &Switch) -> bool {
    g.has_edge(s.a[0], s.a[2]) || g.has_edge(s.a[1], s.a[3])
}

#[inline]
fn tri_step_unchecked<R: Rng + ?Sized>(
    g: &mut Graph,
    cfg: &ChainConfig,
    rng: &mut R,
) -> StepOutcome {
    let (s, u) = propose(g, rng);
    let Some(s) = s else {
        return StepOutcome::LazyIdentity;
    };
    if creates_multi_edge(g, &s) {
        return StepOutcome::RejectedMultiEdge;
    }
    if !is_tri_unchecked(g, &s) {
        return StepOutcome::RejectedNotTriSwitch;
    }
    let t = g.triangles();
    let delta = delta_unchecked(g, &s);
    let dtau = cfg.capped((t as i64 + delta) as usize) as i64 - cfg.capped(t) as i64;
    let ratio = if dtau >= 0 {
        1.0
    } else {
        cfg.lambda.powi(dtau as i32)
    };
    if u < ratio {
        let d = g.apply_unchecked(&s);
        debug_assert_eq!(d, delta);
        StepOutcome::Moved { delta_t: d }
    } else {
        StepOutcome::RejectedMetropolis
    }
}

#[inline]
fn switch_step_unchecked<R: Rng + ?Sized>(g: &mut Graph, rng: &mut R) -> StepOutcome {
    let (s, _) = propose(g, rng);
    let Some(s) = s else {
        return StepOutcome::LazyIdentity;
    };
    if creates_multi_edge(g, &s) {
        return StepOutcome::RejectedMultiEdge;
    }
    StepOutcome::Moved {
        delta_t: g.apply_unchecked(&s),
    }
}

/// Usually settles on the first few edges; falls back to the exact count
/// only when every edge meets the first one.
fn require_pair(g: &Graph) -> Result<()> {
    let m = g.edge_count();
    if m >= 2 {
        let (x, y) = g.edge(0);
        if (1..m)
            .map(|i| g.edge(i))
            .any(|(u, v)| u != x && u != y && v != x && v != y)
        {
            return Ok(());
        }
    }
    if nonincident_pair_count(g) == 0 {
        Err(Error::NoValidPair)
    } else {
        Ok(())
    }
}

/// One step of the Δ-switch chain, mutating `g` on acceptance.
pub fn tri_switch_step<R: Rng + ?Sized>(
    g: &mut Graph,
    cfg: &ChainConfig,
    rng: &mut R,
) -> Result<StepOutcome> {
    require_pair(g)?;
    Ok(tri_step_unchecked(g, cfg, rng))
}

/// One step of the switch chain, mutating `g` unless the proposal is lazy
/// or would create a repeated edge.
pub fn switch_step<R: Rng + ?Sized>(g: &mut Graph, rng: &mut R) -> Result<StepOutcome> {
    require_pair(g)?;
    Ok(switch_step_unchecked(g, rng))
}

/// Runs `burn_in` steps, then `steps` more, recording `t` after every
/// `thin`-th of them. Outcome counters cover the recorded phase only.
pub fn run_chain(g: &mut Graph, cfg: &ChainConfig, which: ChainKind) -> Result<SampleStats> {
    cfg.validate()?;
    let started = Instant::now();
    if cfg.steps == 0 && cfg.burn_in == 0 {
        return Ok(SampleStats::from_samples(
            Vec::new(),
            OutcomeCounts::default(),
        ));
    }
    require_pair(g)?;
    let mut rng = chain_rng(cfg.seed);
    let step = |g: &mut Graph, rng: &mut _| match which {
        ChainKind::Switch => switch_step_unchecked(g, rng),
        ChainKind::TriSwitch => tri_step_unchecked(g, cfg, rng),
    };
    for _ in 0..cfg.burn_in {
        step(g, &mut rng);
    }
    let mut counts = OutcomeCounts::default();
    let mut samples = Vec::with_capacity((cfg.steps / cfg.thin) as usize);
    for i in 1..=cfg.steps {
        counts.record(step(g, &mut rng));
        if i % cfg.thin == 0 {
            samples.push(g.triangles());
        }
    }
    let mut stats = SampleStats::from_samples(samples, counts);
    stats.wall_time_secs = started.elapsed().as_secs_f64();
    Ok(stats)
}

/// Runs `chains` independent copies from `start` in parallel; chain `i` is
/// seeded with `cfg.seed ^ i`. Returns per-chain statistics in index order
/// together with their merge.
pub fn run_parallel(
    start: &Graph,
    cfg: &ChainConfig,
    which: ChainKind,
    chains: usize,
) -> Result<(SampleStats, Vec<SampleStats>)> {
    let per: Vec<SampleStats> = (0..chains as u64)
        .into_par_iter()
        .map(|i| {
            let mut g = start.clone();
            let c = ChainConfig {
                seed: split_seed(cfg.seed, i),
                ..cfg.clone()
            };
            run_chain(&mut g, &c, which)
        })
        .collect::<Result<_>>()?;
    Ok((SampleStats::merge(&per), per))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::degree::DegreeSequence;

    fn cubic(n: usize, seed: u64) -> Graph {
        Graph::from_degree_sequence(&DegreeSequence::regular(n, 3).unwrap(), Some(seed)).unwrap()
    }

    #[test]
    fn config_validation() {
        assert!(ChainConfig {
            lambda: 0.5,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ChainConfig {
            thin: 0,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ChainConfig {
            nu_cap: Some(0),
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ChainConfig {
            lambda: f64::NAN,
            ..Default::default()
        }
        .validate()
        .is_err());
        assert!(ChainConfig::default().validate().is_ok());
    }

    #[test]
    fn empty_run() {
        let mut g = cubic(10, 1);
        let cfg = ChainConfig {
            steps: 0,
            thin: 1,
            ..Default::default()
        };
        let s = run_chain(&mut g, &cfg, ChainKind::Switch).unwrap();
        assert_eq!(s.n_samples, 0);
        assert!(s.samples.is_empty());
    }

    #[test]
    fn same_seed_same_trajectory() {
        let cfg = ChainConfig {
            lambda: 2.0,
            nu_cap: Some(5),
            seed: 99,
            steps: 20_000,
            burn_in: 100,
            thin: 10,
        };
        for which in [ChainKind::Switch, ChainKind::TriSwitch] {
            let mut g1 = cubic(20, 3);
            let mut g2 = cubic(20, 3);
            let a = run_chain(&mut g1, &cfg, which).unwrap();
            let b = run_chain(&mut g2, &cfg, which).unwrap();
            assert_eq!(a.samples, b.samples);
            assert_eq!(a.acceptance, b.acceptance);
            assert_eq!(g1, g2);
        }
    }

    #[test]
    fn counters_partition_steps_and_degrees_hold() {
        let cfg = ChainConfig {
            lambda: 3.0,
            seed: 5,
            steps: 50_000,
            thin: 7,
            ..Default::default()
        };
        let mut g = cubic(30, 8);
        let deg = g.degrees();
        let s = run_chain(&mut g, &cfg, ChainKind::TriSwitch).unwrap();
        assert_eq!(s.acceptance.total(), 50_000);
        assert_eq!(s.n_samples, 50_000 / 7);
        assert_eq!(g.degrees(), deg);
        assert_eq!(g.triangles(), g.count_triangles());
    }

    #[test]
    fn lambda_one_never_rejects_metropolis() {
        let cfg = ChainConfig {
            lambda: 1.0,
            seed: 1,
            steps: 20_000,
            thin: 1,
            ..Default::default()
        };
        let mut g = cubic(12, 2);
        let s = run_chain(&mut g, &cfg, ChainKind::TriSwitch).unwrap();
        assert_eq!(s.acceptance.rejected_metropolis, 0);
        assert!(s.acceptance.moved > 0);
    }

    #[test]
    fn switch_chain_has_no_triangle_rejections() {
        let cfg = ChainConfig {
            seed: 4,
            steps: 10_000,
            thin: 1,
            ..Default::default()
        };
        let mut g = cubic(12, 2);
        let s = run_chain(&mut g, &cfg, ChainKind::Switch).unwrap();
        assert_eq!(s.acceptance.rejected_not_tri_switch, 0);
        assert_eq!(s.acceptance.rejected_metropolis, 0);
        assert!(s.acceptance.lazy_identity > 0);
    }

    #[test]
    fn no_pair_error() {
        let mut g =
            Graph::from_degree_sequence(&DegreeSequence::regular(4, 3).unwrap(), None).unwrap();
        // K4 has pairs; a star does not
        assert!(switch_step(&mut g, &mut chain_rng(0)).is_ok());
        let mut star = Graph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_eq!(
            switch_step(&mut star, &mut chain_rng(0)),
            Err(Error::NoValidPair)
        );
        let cfg = ChainConfig::default();
        assert_eq!(
            tri_switch_step(&mut star, &cfg, &mut chain_rng(0)),
            Err(Error::NoValidPair)
        );
    }

    #[test]
    fn parallel_chains_use_split_seeds() {
        let cfg = ChainConfig {
            seed: 10,
            steps: 2_000,
            thin: 100,
            ..Default::default()
        };
        let g = cubic(16, 1);
        let (merged, per) = run_parallel(&g, &cfg, ChainKind::Switch, 3).unwrap();
        assert_eq!(merged.n_samples, 60);
        let mut h = g.clone();
        let solo = run_chain(
            &mut h,
            &ChainConfig {
                seed: 10 ^ 2,
                ..cfg.clone()
            },
            ChainKind::Switch,
        )
        .unwrap();
        assert_eq!(per[2].samples, solo.samples);
    }
}
