//! Experiment orchestration from a key=value config file.
//!
//! A run resolves its config (defaults filled, echo written next to the
//! outputs), builds or loads the graph, derives the theory numbers, then
//! runs the requested certifier passes and trial loops. Artifacts are a
//! report JSON, trial CSVs, and a plot-data file; everything is a pure
//! function of the resolved config, so a rerun is byte-identical.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use percolab::certify::{
    ball_growth_check, cycle_free_vertices, cycle_spacing_check, exact_expansion, local_density,
    spectral_gap, CertReport, DEFAULT_DENSITY_CAP, DEFAULT_SPECTRAL_MAX_ITER,
    DEFAULT_SPECTRAL_TOL,
};
use percolab::generators::{generate, GenModel, GenSpec, DEFAULT_MAX_RETRIES};
use percolab::graph::cycles::DEFAULT_CYCLE_CAP;
use percolab::graph::{io::load_graph, RegularGraph};
use percolab::percolate::{components, sample_mask, trial_census, TrialRow};
use percolab::sprinkle::{sprinkle_trials, SprinkleRow};
use percolab::theory::{default_delta, theorem_constants, TheoremConstants, TheoryParams};
use rayon::prelude::*;

use crate::out::{
    census_row, fmt_f64, plot_data, sprinkle_row, write_csv, write_text, Json, CENSUS_HEADER,
    SPRINKLE_HEADER,
};

const KEYS: &[&str] = &[
    "graph_file",
    "model",
    "n",
    "d",
    "gen_seed",
    "offsets",
    "bridges",
    "max_retries",
    "lambda",
    "delta",
    "c",
    "C",
    "alpha",
    "b",
    "trials",
    "seed",
    "run_percolate",
    "run_sprinkle",
    "spectral",
    "exact_expansion",
    "local_k",
    "cycle_spacing",
    "ball_growth",
    "ball_radius",
    "cycle_free_radius",
    "require_theorem",
    "require_gap",
    "require_merge",
    "require_unique",
    "require_spread",
];

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub graph_file: Option<String>,
    pub model: String,
    pub n: usize,
    pub d: usize,
    pub gen_seed: u64,
    pub offsets: Vec<usize>,
    pub bridges: usize,
    pub max_retries: usize,
    pub lambda: f64,
    pub delta: f64,
    pub c: f64,
    pub cap_c: f64,
    pub alpha: f64,
    pub b: f64,
    pub trials: usize,
    pub seed: u64,
    pub run_percolate: bool,
    pub run_sprinkle: bool,
    pub spectral: bool,
    pub exact_expansion: bool,
    pub local_k: usize,
    pub cycle_spacing: usize,
    pub ball_growth: bool,
    pub ball_radius: usize,
    pub cycle_free_radius: usize,
    pub require_theorem: bool,
    pub require_gap: bool,
    pub require_merge: bool,
    pub require_unique: bool,
    pub require_spread: bool,
}

fn parse_bool(key: &str, v: &str) -> anyhow::Result<bool> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => bail!("{key}: expected true or false, got {v:?}"),
    }
}

impl Config {
    /// Parses and resolves a config. `fallback_seed` fills the trial seed
    /// when the file does not pin one, so an echoed config always does.
    pub fn parse(text: &str, fallback_seed: u64) -> anyhow::Result<Config> {
        let mut map: BTreeMap<&str, &str> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected key=value, got {line:?}", idx + 1))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                bail!("line {}: unknown key {key:?}", idx + 1);
            }
            if map.insert(key, value).is_some() {
                bail!("line {}: duplicate key {key:?}", idx + 1);
            }
        }

        let get = |k: &str| map.get(k).copied();
        let usize_or = |k: &str, dflt: usize| -> anyhow::Result<usize> {
            get(k).map_or(Ok(dflt), |v| v.parse().context(format!("{k}={v}")))
        };
        let u64_or = |k: &str, dflt: u64| -> anyhow::Result<u64> {
            get(k).map_or(Ok(dflt), |v| v.parse().context(format!("{k}={v}")))
        };
        let f64_or = |k: &str, dflt: f64| -> anyhow::Result<f64> {
            get(k).map_or(Ok(dflt), |v| v.parse().context(format!("{k}={v}")))
        };
        let bool_or = |k: &str, dflt: bool| -> anyhow::Result<bool> {
            get(k).map_or(Ok(dflt), |v| parse_bool(k, v))
        };

        let lambda = f64_or("lambda", 1.5)?;
        let graph_file = get("graph_file").map(str::to_owned);
        let n = match get("n") {
            Some(v) => v.parse().context(format!("n={v}"))?,
            None if graph_file.is_some() => 0, // resolved from the file
            None => bail!("n is required unless graph_file is given"),
        };
        let offsets = match get("offsets") {
            None => Vec::new(),
            Some(v) => v
                .split(',')
                .map(|s| s.trim().parse().context(format!("offsets={v}")))
                .collect::<anyhow::Result<Vec<usize>>>()?,
        };

        let cfg = Config {
            graph_file,
            model: get("model").unwrap_or("random_regular").to_owned(),
            n,
            d: usize_or("d", 3)?,
            gen_seed: u64_or("gen_seed", 1)?,
            offsets,
            bridges: usize_or("bridges", 1)?,
            max_retries: usize_or("max_retries", DEFAULT_MAX_RETRIES)?,
            lambda,
            delta: f64_or("delta", default_delta(lambda))?,
            c: f64_or("c", 0.1)?,
            cap_c: f64_or("C", 3.0)?,
            alpha: f64_or("alpha", 0.02)?,
            b: f64_or("b", 0.2)?,
            trials: usize_or("trials", 20)?,
            seed: u64_or("seed", fallback_seed)?,
            run_percolate: bool_or("run_percolate", true)?,
            run_sprinkle: bool_or("run_sprinkle", true)?,
            spectral: bool_or("spectral", false)?,
            exact_expansion: bool_or("exact_expansion", false)?,
            local_k: usize_or("local_k", 0)?,
            cycle_spacing: usize_or("cycle_spacing", 0)?,
            ball_growth: bool_or("ball_growth", false)?,
            ball_radius: usize_or("ball_radius", 0)?,
            cycle_free_radius: usize_or("cycle_free_radius", 0)?,
            require_theorem: bool_or("require_theorem", true)?,
            require_gap: bool_or("require_gap", true)?,
            require_merge: bool_or("require_merge", true)?,
            require_unique: bool_or("require_unique", true)?,
            require_spread: bool_or("require_spread", false)?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if self.trials > 0 {
            if (self.require_theorem || self.require_gap) && !self.run_percolate {
                bail!("require_theorem/require_gap need run_percolate=true");
            }
            if (self.require_merge || self.require_unique || self.require_spread)
                && !self.run_sprinkle
            {
                bail!("require_merge/require_unique/require_spread need run_sprinkle=true");
            }
        }
        Ok(())
    }

    /// The fully resolved echo: loading it reproduces this config exactly.
    pub fn echo(&self) -> String {
        let mut s = String::from("# resolved percolab experiment config\n");
        let mut put = |k: &str, v: String| {
            s.push_str(k);
            s.push('=');
            s.push_str(&v);
            s.push('\n');
        };
        if let Some(f) = &self.graph_file {
            put("graph_file", f.clone());
        } else {
            put("model", self.model.clone());
            put("gen_seed", self.gen_seed.to_string());
            if !self.offsets.is_empty() {
                let list: Vec<String> = self.offsets.iter().map(|o| o.to_string()).collect();
                put("offsets", list.join(","));
            }
            put("bridges", self.bridges.to_string());
            put("max_retries", self.max_retries.to_string());
        }
        put("n", self.n.to_string());
        put("d", self.d.to_string());
        put("lambda", fmt_f64(self.lambda));
        put("delta", fmt_f64(self.delta));
        put("c", fmt_f64(self.c));
        put("C", fmt_f64(self.cap_c));
        put("alpha", fmt_f64(self.alpha));
        put("b", fmt_f64(self.b));
        put("trials", self.trials.to_string());
        put("seed", self.seed.to_string());
        put("run_percolate", self.run_percolate.to_string());
        put("run_sprinkle", self.run_sprinkle.to_string());
        put("spectral", self.spectral.to_string());
        put("exact_expansion", self.exact_expansion.to_string());
        put("local_k", self.local_k.to_string());
        put("cycle_spacing", self.cycle_spacing.to_string());
        put("ball_growth", self.ball_growth.to_string());
        put("ball_radius", self.ball_radius.to_string());
        put("cycle_free_radius", self.cycle_free_radius.to_string());
        put("require_theorem", self.require_theorem.to_string());
        put("require_gap", self.require_gap.to_string());
        put("require_merge", self.require_merge.to_string());
        put("require_unique", self.require_unique.to_string());
        put("require_spread", self.require_spread.to_string());
        s
    }

    fn model(&self) -> anyhow::Result<GenModel> {
        Ok(match self.model.as_str() {
            "random_regular" => GenModel::RandomRegular,
            "complete" => GenModel::Complete,
            "petersen" => GenModel::Petersen,
            "circulant" => GenModel::Circulant {
                offsets: self.offsets.clone(),
            },
            "adversarial_union" => GenModel::AdversarialUnion {
                bridges: self.bridges,
            },
            other => bail!("unknown model {other:?}"),
        })
    }

    /// Loads or generates the graph and locks n and d to it.
    pub fn graph(&mut self, config_dir: &Path) -> anyhow::Result<(RegularGraph, String)> {
        match &self.graph_file {
            Some(file) => {
                let path = config_dir.join(file);
                let g = load_graph(&path).context(format!("loading {}", path.display()))?;
                if self.n != 0 && self.n != g.n() {
                    bail!("config n={} but {} has n={}", self.n, path.display(), g.n());
                }
                if self.d != g.d() {
                    bail!("config d={} but {} has d={}", self.d, path.display(), g.d());
                }
                self.n = g.n();
                Ok((g, file.clone()))
            }
            None => {
                let spec = GenSpec {
                    model: self.model()?,
                    n: self.n,
                    d: self.d,
                    seed: self.gen_seed,
                    max_retries: self.max_retries,
                };
                let g = generate(&spec)?;
                Ok((g, format!("{}(n={}, d={})", self.model, self.n, self.d)))
            }
        }
    }
}

/// Which certifier passes to run; zero radii and unset flags skip a pass.
#[derive(Clone, Debug, Default)]
pub struct CertOpts {
    pub spectral: bool,
    pub exact_expansion: bool,
    pub local_k: usize,
    pub cycle_spacing: usize,
    /// (lambda, radius override); None skips the ball-growth pass.
    pub ball_growth: Option<(f64, Option<usize>)>,
    pub cycle_free_radius: usize,
}

pub fn run_cert_passes(g: &RegularGraph, opts: &CertOpts) -> anyhow::Result<CertReport> {
    let mut report = CertReport::default();
    if opts.spectral {
        report.spectral = Some(spectral_gap(g, DEFAULT_SPECTRAL_TOL, DEFAULT_SPECTRAL_MAX_ITER)?);
    }
    if opts.exact_expansion {
        report.expansion = Some(exact_expansion(g)?);
    }
    if opts.local_k > 0 {
        report.density = Some(local_density(g, opts.local_k, DEFAULT_DENSITY_CAP)?);
    }
    if opts.cycle_spacing > 0 {
        report.spacing = Some(cycle_spacing_check(g, opts.cycle_spacing, DEFAULT_CYCLE_CAP)?);
    }
    if let Some((lambda, radius)) = opts.ball_growth {
        report.ball_growth = Some(ball_growth_check(g, lambda, radius)?);
    }
    if opts.cycle_free_radius > 0 {
        report.cycle_free = Some(cycle_free_vertices(g, opts.cycle_free_radius)?);
    }
    Ok(report)
}

fn certify_passes(cfg: &Config, g: &RegularGraph) -> anyhow::Result<Option<CertReport>> {
    let opts = CertOpts {
        spectral: cfg.spectral,
        exact_expansion: cfg.exact_expansion,
        local_k: cfg.local_k,
        cycle_spacing: cfg.cycle_spacing,
        ball_growth: cfg
            .ball_growth
            .then_some((cfg.lambda, (cfg.ball_radius > 0).then_some(cfg.ball_radius))),
        cycle_free_radius: cfg.cycle_free_radius,
    };
    let any = opts.spectral
        || opts.exact_expansion
        || opts.local_k > 0
        || opts.cycle_spacing > 0
        || opts.ball_growth.is_some()
        || opts.cycle_free_radius > 0;
    if !any {
        return Ok(None);
    }
    Ok(Some(run_cert_passes(g, &opts)?))
}

fn vertex_list(vs: &[percolab::graph::Vertex]) -> Json {
    Json::Arr(vs.iter().map(|&v| Json::U64(v as u64)).collect())
}

pub fn cert_report_json(r: &CertReport) -> Json {
    Json::Obj(vec![
        ("lambda2", Json::opt(r.spectral.as_ref(), |s| Json::Num(s.lambda2))),
        (
            "b_spectral",
            Json::opt(r.spectral.as_ref(), |s| Json::Num(s.b_spectral)),
        ),
        (
            "bipartite",
            Json::opt(r.spectral.as_ref(), |s| Json::Bool(s.bipartite)),
        ),
        (
            "b_exact",
            Json::opt(r.expansion.as_ref(), |e| Json::Num(e.b)),
        ),
        (
            "expansion_witness",
            Json::opt(r.expansion.as_ref(), |e| vertex_list(&e.witness)),
        ),
        (
            "local_k",
            Json::opt(r.density.as_ref(), |d| Json::U64(d.k_max as u64)),
        ),
        (
            "max_excess",
            Json::opt(r.density.as_ref(), |d| {
                Json::Arr(
                    d.max_excess[1..]
                        .iter()
                        .map(|x| Json::opt(*x, Json::Int))
                        .collect(),
                )
            }),
        ),
        (
            "c_certified",
            Json::opt(r.density.as_ref(), |d| Json::Num(d.c_certified())),
        ),
        (
            "girth",
            match r.spacing.as_ref().and_then(|s| s.girth_found) {
                Some(g) => Json::U64(g as u64),
                None => Json::Null,
            },
        ),
        (
            "cycle_spacing_ok",
            Json::opt(r.spacing.as_ref(), |s| Json::Bool(s.ok)),
        ),
        (
            "spacing_witness",
            match r.spacing.as_ref().and_then(|s| s.witness.as_ref()) {
                Some((a, b)) => Json::Arr(vec![vertex_list(a), vertex_list(b)]),
                None => Json::Null,
            },
        ),
        (
            "ball_growth_ok",
            Json::opt(r.ball_growth.as_ref(), |b| Json::Bool(b.ok)),
        ),
        (
            "ball_radius",
            Json::opt(r.ball_growth.as_ref(), |b| Json::U64(b.radius as u64)),
        ),
        (
            "ball_threshold",
            Json::opt(r.ball_growth.as_ref(), |b| Json::Num(b.threshold)),
        ),
        (
            "min_ball",
            Json::opt(r.ball_growth.as_ref(), |b| Json::U64(b.min_ball as u64)),
        ),
        (
            "worst_vertex",
            Json::opt(r.ball_growth.as_ref(), |b| Json::U64(b.worst as u64)),
        ),
        (
            "cycle_free_radius",
            Json::opt(r.cycle_free.as_ref(), |c| Json::U64(c.radius as u64)),
        ),
        (
            "cycle_free_fraction",
            Json::opt(r.cycle_free.as_ref(), |c| Json::Num(c.fraction)),
        ),
        (
            "cycle_free_bound",
            Json::opt(r.cycle_free.as_ref(), |c| Json::Num(c.bound)),
        ),
    ])
}

pub fn constants_json(tc: &TheoremConstants) -> Json {
    Json::Obj(vec![
        ("n", Json::U64(tc.n as u64)),
        ("d", Json::U64(tc.d as u64)),
        ("lambda", Json::Num(tc.lambda)),
        ("p", Json::Num(tc.p)),
        ("c", Json::Num(tc.c)),
        ("C", Json::Num(tc.cap_c)),
        ("alpha", Json::Num(tc.alpha)),
        ("b", Json::Num(tc.b)),
        ("delta", Json::Num(tc.delta)),
        ("p1", Json::Num(tc.p1)),
        ("p2", Json::Num(tc.p2)),
        ("gap_low", Json::Num(tc.gap_low)),
        ("gap_high", Json::Num(tc.gap_high)),
        ("small_cap", Json::Num(tc.small_cap)),
        ("ball_target", Json::Num(tc.ball_target)),
        ("spread_radius", Json::U64(tc.spread_radius as u64)),
        ("cycle_radius", Json::U64(tc.cycle_radius as u64)),
    ])
}

struct CheckOutcome {
    name: &'static str,
    required: bool,
    failures: usize,
}

impl CheckOutcome {
    fn status(&self) -> &'static str {
        match (self.required, self.failures) {
            (false, _) => "skipped",
            (true, 0) => "pass",
            (true, _) => "fail",
        }
    }
}

/// Pooled log-binned component-size counts over the census trials; bin k
/// holds sizes in [2^k, 2^(k+1)). Regenerates each trial's mask from its
/// census seed, so the histogram matches the CSV rows exactly.
fn pooled_size_bins(g: &RegularGraph, rows: &[TrialRow]) -> anyhow::Result<Vec<u64>> {
    let bins = rows
        .par_iter()
        .map(|row| {
            let mask = sample_mask(g, row.p, row.seed)?;
            let stats = components(g, &mask);
            let mut bins = vec![0u64; 33];
            for &s in &stats.sizes {
                bins[s.ilog2() as usize] += 1;
            }
            Ok::<Vec<u64>, percolab::Error>(bins)
        })
        .try_reduce(
            || vec![0u64; 33],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(&b) {
                    *x += y;
                }
                Ok(a)
            },
        )?;
    Ok(bins)
}

pub fn run_experiment(config_path: &Path, out_dir: &Path, fallback_seed: u64) -> anyhow::Result<u8> {
    let text = fs::read_to_string(config_path)
        .context(format!("reading {}", config_path.display()))?;
    let mut cfg = Config::parse(&text, fallback_seed)?;
    let config_dir: PathBuf = config_path.parent().map_or_else(|| ".".into(), Path::to_path_buf);
    let (g, source) = cfg.graph(&config_dir)?;

    let constants = theorem_constants(
        cfg.n,
        cfg.d,
        cfg.lambda,
        cfg.c,
        cfg.cap_c,
        cfg.alpha,
        cfg.b,
        Some(cfg.delta),
    )?;
    let params = TheoryParams::from_p(cfg.d, constants.p)?;
    let (q, y) = (params.q, params.y);

    fs::create_dir_all(out_dir)?;
    write_text(&out_dir.join("config.resolved"), &cfg.echo())?;

    let cert = certify_passes(&cfg, &g)?;

    let census: Option<Vec<TrialRow>> = if cfg.trials > 0 && cfg.run_percolate {
        let rows = trial_census(&g, constants.p, cfg.trials, cfg.seed, &constants)?;
        write_csv(
            &out_dir.join("census.csv"),
            CENSUS_HEADER,
            &rows.iter().map(census_row).collect::<Vec<_>>(),
        )?;
        let bins = pooled_size_bins(&g, &rows)?;
        write_text(&out_dir.join("plot.dat"), &plot_data(&rows, &bins, y))?;
        Some(rows)
    } else {
        None
    };

    let sprinkle: Option<Vec<SprinkleRow>> = if cfg.trials > 0 && cfg.run_sprinkle {
        let rows = sprinkle_trials(&g, &constants, cfg.trials, cfg.seed)?;
        write_csv(
            &out_dir.join("sprinkle.csv"),
            SPRINKLE_HEADER,
            &rows.iter().map(sprinkle_row).collect::<Vec<_>>(),
        )?;
        Some(rows)
    } else {
        None
    };

    let yn = y * cfg.n as f64;
    let empty: &[TrialRow] = &[];
    let census_rows = census.as_deref().unwrap_or(empty);
    let no_sprinkle: &[SprinkleRow] = &[];
    let sprinkle_rows = sprinkle.as_deref().unwrap_or(no_sprinkle);
    let checks = [
        CheckOutcome {
            name: "theorem",
            required: cfg.require_theorem && census.is_some(),
            failures: census_rows
                .iter()
                .filter(|r| {
                    (1.0 - r.l1 as f64 / yn).abs() > cfg.alpha
                        || r.l2 as f64 > constants.small_cap
                })
                .count(),
        },
        CheckOutcome {
            name: "gap",
            required: cfg.require_gap && census.is_some(),
            failures: census_rows.iter().filter(|r| r.gap_violations > 0).count(),
        },
        CheckOutcome {
            name: "merge",
            required: cfg.require_merge && sprinkle.is_some(),
            failures: sprinkle_rows.iter().filter(|r| !r.merge_ok).count(),
        },
        CheckOutcome {
            name: "unique",
            required: cfg.require_unique && sprinkle.is_some(),
            failures: sprinkle_rows.iter().filter(|r| !r.unique_ok).count(),
        },
        CheckOutcome {
            name: "spread",
            required: cfg.require_spread && sprinkle.is_some(),
            failures: sprinkle_rows.iter().filter(|r| !r.spread_ok).count(),
        },
    ];

    let report = Json::Obj(vec![
        (
            "graph",
            Json::Obj(vec![
                ("source", Json::Str(source)),
                ("n", Json::U64(g.n() as u64)),
                ("d", Json::U64(g.d() as u64)),
                ("m", Json::U64(g.m() as u64)),
            ]),
        ),
        (
            "theory",
            Json::Obj(vec![
                ("p", Json::Num(constants.p)),
                ("q", Json::Num(q)),
                ("y", Json::Num(y)),
            ]),
        ),
        ("constants", constants_json(&constants)),
        ("certify", Json::opt(cert.as_ref(), cert_report_json)),
        (
            "census",
            Json::opt(census.as_ref(), |rows| {
                Json::Obj(vec![
                    ("trials", Json::U64(rows.len() as u64)),
                    (
                        "max_rel_dev",
                        Json::Num(
                            rows.iter()
                                .map(|r| (1.0 - r.l1 as f64 / yn).abs())
                                .fold(0.0, f64::max),
                        ),
                    ),
                    (
                        "max_l2",
                        Json::U64(rows.iter().map(|r| r.l2).max().unwrap_or(0) as u64),
                    ),
                    (
                        "gap_violations",
                        Json::U64(rows.iter().map(|r| r.gap_violations as u64).sum()),
                    ),
                ])
            }),
        ),
        (
            "sprinkle",
            Json::opt(sprinkle.as_ref(), |rows| {
                Json::Obj(vec![
                    ("trials", Json::U64(rows.len() as u64)),
                    (
                        "merge_failures",
                        Json::U64(rows.iter().filter(|r| !r.merge_ok).count() as u64),
                    ),
                    (
                        "unique_failures",
                        Json::U64(rows.iter().filter(|r| !r.unique_ok).count() as u64),
                    ),
                    (
                        "spread_failures",
                        Json::U64(rows.iter().filter(|r| !r.spread_ok).count() as u64),
                    ),
                ])
            }),
        ),
        (
            "checks",
            Json::Obj(
                checks
                    .iter()
                    .map(|c| (c.name, Json::Str(c.status().to_owned())))
                    .collect(),
            ),
        ),
    ]);
    write_text(&out_dir.join("report.json"), &report.render())?;

    let mut failed = false;
    for c in &checks {
        if c.required && c.failures > 0 {
            eprintln!("check failed: {} ({} of {} trials)", c.name, c.failures, cfg.trials);
            failed = true;
        }
    }
    println!(
        "experiment done: n={} trials={} -> {}",
        cfg.n,
        cfg.trials,
        out_dir.display()
    );
    Ok(if failed { 1 } else { 0 })
}
