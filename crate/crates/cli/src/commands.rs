use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use log::info;
use serde::Serialize;
use serde_json::{json, Value};
use trichain::analysis::{compare_to_poisson, mu_of, nu_default, ScalarReport};
use trichain::{
    run_parallel, simulate_switch, verify_path, ChainConfig, ChainKind, DegreeSequence, Graph,
    StateSpace, Switch,
};

use crate::manifest::RunManifest;
use crate::{ChainOpts, Failure, Format, Nu, PathArgs, SampleArgs, VerifyArgs};

type CmdResult = Result<(), Failure>;

fn parse_degrees(s: &str) -> Result<DegreeSequence, Failure> {
    Ok(s.parse::<DegreeSequence>()?)
}

fn resolve_nu(nu: Option<Nu>, n: usize) -> Option<usize> {
    match nu? {
        Nu::Auto => Some(nu_default(n)),
        Nu::Fixed(v) => Some(v),
    }
}

fn read_graph(path: &Path) -> Result<Graph, Failure> {
    let f = File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    Ok(Graph::read_edge_list(BufReader::new(f))?)
}

/// Writes `body` to `out`, or to stdout without one.
fn emit(out: Option<&Path>, body: &str) -> CmdResult {
    match out {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?;
            let mut w = BufWriter::new(f);
            w.write_all(body.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{body}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn sample(a: &SampleArgs) -> CmdResult {
    let started = Instant::now();
    let opts: &ChainOpts = &a.chain_opts;
    let mut inputs = Vec::new();
    let start = match (&a.graph, &opts.degrees) {
        (Some(p), None) => {
            inputs.push(p.display().to_string());
            read_graph(p)?
        }
        (None, Some(d)) => Graph::from_degree_sequence(&parse_degrees(d)?, Some(a.seed))?,
        _ => {
            return Err(Failure::Input(
                "give exactly one of --degrees and --graph".into(),
            ))
        }
    };
    if a.jobs == 0 {
        return Err(Failure::Input("--jobs must be at least 1".into()));
    }
    let d = DegreeSequence::new(start.degrees())?;
    let cfg = ChainConfig {
        lambda: opts.lambda,
        nu_cap: resolve_nu(opts.nu, d.n()),
        seed: a.seed,
        steps: a.steps,
        burn_in: a.burn_in,
        thin: a.thin,
    };
    cfg.validate()?;
    let which: ChainKind = a.chain.into();
    info!("sampling {d} with {} chain(s), {cfg:?}", a.jobs);
    let (mut stats, parts) = run_parallel(&start, &cfg, which, a.jobs)?;

    let scalars = ScalarReport::new(&d, cfg.lambda);
    let reference_mean = match which {
        ChainKind::Switch => scalars.mu,
        ChainKind::TriSwitch => scalars.lambda_mu,
    };
    let poisson = compare_to_poisson(&stats, reference_mean);
    let chain_means: Vec<f64> = parts.iter().map(|p| p.mean).collect();
    if a.omit_samples {
        stats.samples.clear();
    }

    let mut manifest = RunManifest::new(
        "sample",
        json!({ "chain": which, "degrees": d.to_string(), "jobs": a.jobs, "chain_config": cfg }),
    );
    manifest.inputs = inputs;
    manifest.outputs = a.out.iter().map(|p| p.display().to_string()).collect();
    manifest.wall_time_secs = started.elapsed().as_secs_f64();

    let body = match a.format {
        Format::Json => to_json(&json!({
            "manifest": manifest,
            "scalars": scalars,
            "stats": stats,
            "chain_means": chain_means,
            "poisson": poisson,
            "tv_threshold": a.tv_threshold,
            "tv_within_threshold": poisson.tv <= a.tv_threshold,
        })),
        Format::Csv => {
            let mut s = manifest.csv_comment();
            s.push_str("t,count,empirical_pmf,poisson_pmf\n");
            for r in &poisson.rows {
                let count = stats.histogram.get(r.k).copied().unwrap_or(0);
                s.push_str(&format!(
                    "{},{},{},{}\n",
                    r.k, count, r.empirical, r.poisson
                ));
            }
            s
        }
    };
    emit(a.out.as_deref(), &body)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Status {
    Pass,
    Fail,
    Info,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
struct Check {
    name: &'static str,
    status: Status,
    value: Value,
    detail: String,
}

impl Check {
    fn new(name: &'static str, status: Status, value: Value, detail: impl Into<String>) -> Self {
        Check {
            name,
            status,
            value,
            detail: detail.into(),
        }
    }

    fn test(name: &'static str, ok: bool, value: Value, detail: impl Into<String>) -> Self {
        let status = if ok { Status::Pass } else { Status::Fail };
        Check::new(name, status, value, detail)
    }
}

fn load_space(
    d: &DegreeSequence,
    a: &VerifyArgs,
    manifest: &mut RunManifest,
) -> Result<StateSpace, Failure> {
    if let Some(path) = &a.cache {
        if path.exists() {
            let f =
                File::open(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
            let space = StateSpace::read_cache(BufReader::new(f))?;
            if space.degrees() != d {
                return Err(Failure::Input(format!(
                    "cache {} holds {} rather than {d}",
                    path.display(),
                    space.degrees()
                )));
            }
            info!("read {} states from {}", space.len(), path.display());
            manifest.inputs.push(path.display().to_string());
            return Ok(space);
        }
    }
    let space = StateSpace::enumerate(d, a.limit)?;
    info!("enumerated {} states", space.len());
    if let Some(path) = &a.cache {
        let f =
            File::create(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
        let mut w = BufWriter::new(f);
        space.write_cache(&mut w)?;
        w.flush().map_err(|e| Failure::Input(e.to_string()))?;
        manifest.outputs.push(path.display().to_string());
    }
    Ok(space)
}

pub fn verify(a: &VerifyArgs) -> CmdResult {
    let started = Instant::now();
    let opts = &a.chain_opts;
    let d = parse_degrees(
        opts.degrees
            .as_deref()
            .ok_or_else(|| Failure::Input("--degrees is required".into()))?,
    )?;
    let lambda = opts.lambda;
    let nu_cap = resolve_nu(opts.nu, d.n());
    ChainConfig {
        lambda,
        nu_cap,
        ..Default::default()
    }
    .validate()?;
    let mut manifest = RunManifest::new(
        "verify",
        json!({
            "degrees": d.to_string(),
            "lambda": lambda,
            "nu_cap": nu_cap,
            "limit": a.limit,
            "stationary_tol": a.stationary_tol,
            "tv_threshold": a.tv_threshold,
            "tv_steps": a.tv_steps,
        }),
    );
    let mut space = load_space(&d, a, &mut manifest)?;
    let low_degree = d.min_degree() < 3;
    let mut checks = Vec::new();

    space.build_matrix(ChainKind::Switch, 1.0, None);
    let switch_irreducible = space.check_irreducible()?;
    checks.push(Check::test(
        "switch chain irreducible",
        switch_irreducible,
        json!(switch_irreducible),
        format!("{} states", space.len()),
    ));

    space.build_matrix(ChainKind::TriSwitch, lambda, nu_cap);
    let m = space.matrix().expect("matrix was just built");
    let row_err = m.max_row_sum_error();
    checks.push(Check::test(
        "rows sum to one",
        row_err < 1e-12,
        json!(row_err),
        "max |1 - row sum|",
    ));
    let min_diag = m.min_diagonal();
    checks.push(Check::test(
        "P(G,G) >= 1/3",
        min_diag >= 1.0 / 3.0 - 1e-12,
        json!(min_diag),
        "smallest diagonal entry",
    ));

    let components = space.component_count()?;
    let irreducible = components <= 1;
    checks.push(if low_degree {
        Check::new(
            "tri-switch chain irreducible",
            Status::Info,
            json!(irreducible),
            format!("{components} component(s); not guaranteed when min degree < 3"),
        )
    } else {
        Check::test(
            "tri-switch chain irreducible",
            irreducible,
            json!(irreducible),
            format!("{components} component(s)"),
        )
    });

    let closed = space.closed_form_stationary(lambda, nu_cap);
    let balance = space.detailed_balance_error(&closed)?;
    checks.push(Check::test(
        "detailed balance",
        balance <= 1e-12,
        json!(balance),
        "max |pi(G)P(G,H) - pi(H)P(H,G)| at the closed form",
    ));

    if irreducible {
        let pi = space.stationary_exact()?;
        let err = pi
            .iter()
            .zip(&closed)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        checks.push(Check::test(
            "stationary = lambda^t / Z",
            err <= a.stationary_tol,
            json!(err),
            format!("max-norm error, tolerance {:e}", a.stationary_tol),
        ));
        let curve = space.exact_tv_curve(0, &pi, a.tv_steps)?;
        let hit = curve.iter().position(|&tv| tv <= a.tv_threshold);
        checks.push(Check::new(
            "exact TV from state 0",
            Status::Info,
            json!({ "first_step_below_threshold": hit, "final": curve.last() }),
            format!("threshold {}, {} steps", a.tv_threshold, a.tv_steps),
        ));
    } else {
        checks.push(Check::new(
            "stationary = lambda^t / Z",
            Status::Skipped,
            Value::Null,
            "chain is reducible",
        ));
    }

    let mut ensemble = None;
    if low_degree {
        checks.push(Check::new(
            "simulation paths",
            Status::Skipped,
            Value::Null,
            format!("min degree {} < 3", d.min_degree()),
        ));
    } else {
        let e = space.path_ensemble_stats(lambda, nu_cap)?;
        checks.push(Check::test(
            "every path verifies",
            e.failures == 0,
            json!(e.failures),
            format!("{} switch transitions", e.switch_transitions),
        ));
        checks.push(Check::test(
            "path length <= 5",
            e.ell <= 5,
            json!(e.ell),
            "longest path",
        ));
        checks.push(Check::test(
            "b_sigma <= bound",
            e.b_sigma <= e.b_bound,
            json!({ "b_sigma": e.b_sigma, "bound": e.b_bound }),
            "20 d1^2 (2M + d1^2)",
        ));
        ensemble = Some(e);
    }

    let mut spectral = None;
    if a.spectral && irreducible {
        let r = space.spectral_report(0.25)?;
        checks.push(Check::new(
            "spectral mixing bound",
            Status::Info,
            json!({ "mu_star": r.mu_star, "tau_bound": r.tau_bound }),
            "epsilon = 1/4",
        ));
        spectral = Some(r);
    }

    let failed = checks.iter().filter(|c| c.status == Status::Fail).count();
    print_table(&d, space.len(), &checks);

    let mut summary = space.summary();
    for c in &checks {
        summary.checks.insert(
            c.name.to_string(),
            json!({ "status": c.status, "value": c.value }),
        );
    }
    manifest
        .outputs
        .extend(a.out.iter().map(|p| p.display().to_string()));
    manifest.wall_time_secs = started.elapsed().as_secs_f64();
    if let Some(out) = &a.out {
        let body = match a.format {
            Format::Json => to_json(&json!({
                "manifest": manifest,
                "summary": summary,
                "mu": mu_of(&d),
                "checks": checks,
                "path_ensemble": ensemble,
                "spectral": spectral,
                "all_pass": failed == 0,
            })),
            Format::Csv => {
                let mut s = manifest.csv_comment();
                s.push_str("check,status,value,detail\n");
                for c in &checks {
                    let status = serde_json::to_value(c.status).expect("status serializes");
                    s.push_str(&format!(
                        "{},{},{},{}\n",
                        csv_field(c.name),
                        status.as_str().unwrap_or_default(),
                        csv_field(&c.value.to_string()),
                        csv_field(&c.detail)
                    ));
                }
                s
            }
        };
        emit(Some(out), &body)?;
    }
    if failed > 0 {
        return Err(Failure::Checks(failed));
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn print_table(d: &DegreeSequence, states: usize, checks: &[Check]) {
    println!("degrees {d}: {states} states");
    for c in checks {
        let status = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "info",
            Status::Skipped => "skip",
        };
        println!(
            "  {:<30} {:<5} {:<28} {}",
            c.name,
            status,
            c.value.to_string(),
            c.detail
        );
    }
}

fn parse_switch(s: &str) -> Result<Switch, Failure> {
    let parts: Vec<&str> = s.split([',', ' ']).filter(|t| !t.is_empty()).collect();
    let v: Vec<usize> = parts
        .iter()
        .map(|t| t.parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::Input(format!("bad vertex label in switch {s:?}")))?;
    match v[..] {
        [a1, a2, a3, a4] => Ok(Switch::new(a1, a2, a3, a4)),
        _ => Err(Failure::Input(format!(
            "a switch needs four vertices, got {s:?}"
        ))),
    }
}

pub fn path(a: &PathArgs) -> CmdResult {
    let started = Instant::now();
    let g = read_graph(&a.graph)?;
    let s = parse_switch(&a.switch)?;
    s.validate(&g)?;
    let p = simulate_switch(&g, &s)?;
    let verified = verify_path(&g, &s, &p);
    let mut manifest = RunManifest::new("path", json!({ "switch": s.a }));
    manifest.inputs.push(a.graph.display().to_string());
    manifest
        .outputs
        .extend(a.out.iter().map(|p| p.display().to_string()));
    manifest.wall_time_secs = started.elapsed().as_secs_f64();
    let body = match a.format {
        Format::Json => to_json(&json!({
            "manifest": manifest,
            "switch": s.a,
            "path": p,
            "verified": verified,
        })),
        Format::Csv => {
            let mut out = manifest.csv_comment();
            out.push_str(&format!("# case {:?}\n", p.case));
            out.push_str("step,removed,added,delta_t\n");
            for (i, t) in p.steps.iter().enumerate() {
                let fmt =
                    |e: [(usize, usize); 2]| format!("{}-{} {}-{}", e[0].0, e[0].1, e[1].0, e[1].1);
                out.push_str(&format!(
                    "{},{},{},{}\n",
                    i + 1,
                    fmt(t.switch.removed()),
                    fmt(t.switch.added()),
                    t.delta_t
                ));
            }
            out
        }
    };
    emit(a.out.as_deref(), &body)?;
    if !verified {
        return Err(Failure::Checks(1));
    }
    Ok(())
}
