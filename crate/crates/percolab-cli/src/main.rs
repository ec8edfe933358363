//! Command-line front end for the percolation laboratory.
//!
//! Every subcommand is deterministic in its flags: the same invocation
//! writes byte-identical files regardless of worker count. Exit codes:
//! 0 all good, 1 a requested check failed, 2 bad usage or config.

mod experiment;
mod out;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use percolab::explore::{explore, BernoulliAnswers, MaskAnswers};
use percolab::generators::{generate, GenModel, GenSpec, DEFAULT_MAX_RETRIES};
use percolab::graph::io::{load_graph, save_graph};
use percolab::graph::{RegularGraph, VertexSet};
use percolab::percolate::{trial_census, EdgeMask};
use percolab::rng::{mix, STREAM_EXPLORE};
use percolab::sprinkle::sprinkle_trials;
use percolab::theory::{theorem_constants, TheoryParams};

use experiment::{cert_report_json, constants_json, run_cert_passes, run_experiment, CertOpts};
use out::{census_row, sprinkle_row, write_csv, write_text, Json, CENSUS_HEADER, SPRINKLE_HEADER};

#[derive(Parser)]
#[command(name = "percolab", about = "Percolation on regular expander graphs", disable_version_flag = true)]
struct Cli {
    /// Base seed for every randomized subcommand.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Worker threads for trial-level parallelism (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Directory for experiment artifacts. PERCOLAB_OUT_DIR overrides.
    #[arg(long, global = true, default_value = "out")]
    out_dir: PathBuf,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
#[clap(rename_all = "snake_case")]
enum ModelArg {
    RandomRegular,
    Complete,
    Petersen,
    Circulant,
    AdversarialUnion,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a d-regular graph and write it to a file.
    Gen {
        #[arg(long, value_enum)]
        model: ModelArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: usize,
        /// Circulant connection offsets, comma separated.
        #[arg(long, value_delimiter = ',')]
        offsets: Vec<usize>,
        /// Bridge edge count for the adversarial union.
        #[arg(long, default_value_t = 1)]
        bridges: usize,
        #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
        max_retries: usize,
        #[arg(long)]
        out: PathBuf,
    },

    /// Run structural certifier passes and write a JSON report.
    Certify {
        graph_file: PathBuf,
        /// Power-iteration bound on the second adjacency eigenvalue.
        #[arg(long)]
        spectral: bool,
        /// Exhaustive edge-expansion minimum (n <= 24 only).
        #[arg(long)]
        exact_expansion: bool,
        /// Enumerate connected sets up to this size for local density.
        #[arg(long, default_value_t = 0)]
        local_k: usize,
        /// Check all short cycles are pairwise at least this far apart.
        #[arg(long, value_name = "L", default_value_t = 0)]
        cycle_spacing: usize,
        /// Check the minimum ball size against the theory threshold.
        #[arg(long, requires = "lambda")]
        ball_growth: bool,
        #[arg(long)]
        lambda: Option<f64>,
        /// Ball radius override for --ball-growth.
        #[arg(long, requires = "ball_growth")]
        radius: Option<usize>,
        /// Measure the fraction of vertices with cycle-free balls.
        #[arg(long, default_value_t = 0)]
        cycle_free_radius: usize,
        #[arg(long)]
        out: PathBuf,
    },

    /// Print extinction/survival numbers and theorem constants as JSON.
    Theory {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        lambda: f64,
        /// Graph size; enables the finite-n constants block.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, default_value_t = 0.1)]
        c: f64,
        #[arg(long = "C", default_value_t = 3.0)]
        cap_c: f64,
        #[arg(long)]
        delta: Option<f64>,
    },

    /// Run percolation trials and write the component census CSV.
    Percolate {
        graph_file: PathBuf,
        #[arg(long)]
        p: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        lambda: f64,
        #[arg(long = "C")]
        cap_c: f64,
        #[arg(long)]
        out: PathBuf,
    },

    /// Explore one cluster, answering edge queries on demand.
    Explore {
        graph_file: PathBuf,
        /// Start vertices, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        start: Vec<u32>,
        /// Answer queries by independent coin flips with this retention.
        #[arg(long, conflicts_with = "mask")]
        p: Option<f64>,
        /// Answer queries from a fixed retained-edge file.
        #[arg(long)]
        mask: Option<PathBuf>,
        /// Write the query log (lines `edge_index answer_bit`).
        #[arg(long)]
        log: Option<PathBuf>,
    },

    /// Run two-round sprinkling trials and write the verdict CSV.
    Sprinkle {
        graph_file: PathBuf,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long = "C")]
        cap_c: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },

    /// Run a full experiment from a key=value config file.
    Experiment { config: PathBuf },
}

fn load(path: &Path) -> anyhow::Result<RegularGraph> {
    load_graph(path).context(format!("loading {}", path.display()))
}

/// Mask file: first line `m p`, then one retained edge index per line,
/// strictly ascending. Matches what the README documents.
fn load_mask(path: &Path, g: &RegularGraph) -> anyhow::Result<EdgeMask> {
    let text = std::fs::read_to_string(path).context(format!("reading {}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let mut parts = header.split_whitespace();
    let (m, p) = match (parts.next(), parts.next(), parts.next()) {
        (Some(m), Some(p), None) => (
            m.parse::<usize>().context("mask header m")?,
            p.parse::<f64>().context("mask header p")?,
        ),
        _ => bail!("mask header must be `m p`"),
    };
    if m != g.m() {
        bail!("mask is over {m} edges but the graph has {}", g.m());
    }
    let mut retained = Vec::new();
    for line in lines {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let e: u32 = line.parse().context(format!("mask edge {line:?}"))?;
        if (e as usize) >= m {
            bail!("mask edge {e} out of range (m = {m})");
        }
        if retained.last().is_some_and(|&last| e <= last) {
            bail!("mask edges must be strictly ascending (saw {e} after {:?})", retained.last());
        }
        retained.push(e);
    }
    Ok(EdgeMask::from_retained(m, &retained, p))
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    if let Some(w) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build_global()
            .context("setting worker count")?;
    }
    let out_dir = std::env::var_os("PERCOLAB_OUT_DIR")
        .map(PathBuf::from)
        .unwrap_or(cli.out_dir);

    match cli.cmd {
        Cmd::Gen {
            model,
            n,
            d,
            offsets,
            bridges,
            max_retries,
            out,
        } => {
            let model = match model {
                ModelArg::RandomRegular => GenModel::RandomRegular,
                ModelArg::Complete => GenModel::Complete,
                ModelArg::Petersen => GenModel::Petersen,
                ModelArg::Circulant => GenModel::Circulant { offsets },
                ModelArg::AdversarialUnion => GenModel::AdversarialUnion { bridges },
            };
            let spec = GenSpec {
                model,
                n,
                d,
                seed: cli.seed,
                max_retries,
            };
            let g = generate(&spec)?;
            save_graph(&g, &out)?;
            println!("wrote {}: n={} d={} m={}", out.display(), g.n(), g.d(), g.m());
            Ok(0)
        }

        Cmd::Certify {
            graph_file,
            spectral,
            exact_expansion,
            local_k,
            cycle_spacing,
            ball_growth,
            lambda,
            radius,
            cycle_free_radius,
            out,
        } => {
            let g = load(&graph_file)?;
            let opts = CertOpts {
                spectral,
                exact_expansion,
                local_k,
                cycle_spacing,
                ball_growth: ball_growth.then(|| (lambda.expect("clap requires"), radius)),
                cycle_free_radius,
            };
            let report = run_cert_passes(&g, &opts)?;
            write_text(&out, &cert_report_json(&report).render())?;
            println!("wrote {}", out.display());
            Ok(0)
        }

        Cmd::Theory {
            d,
            lambda,
            n,
            c,
            cap_c,
            delta,
        } => {
            let params = TheoryParams::from_lambda(d, lambda)?;
            let constants = match n {
                Some(n) => Some(theorem_constants(n, d, lambda, c, cap_c, 0.02, 0.2, delta)?),
                None => None,
            };
            let doc = Json::Obj(vec![
                ("d", Json::U64(d as u64)),
                ("lambda", Json::Num(lambda)),
                ("p", Json::Num(params.p)),
                ("q", Json::Num(params.q)),
                ("y", Json::Num(params.y)),
                ("constants", Json::opt(constants.as_ref(), constants_json)),
            ]);
            println!("{}", doc.render().trim_end());
            Ok(0)
        }

        Cmd::Percolate {
            graph_file,
            p,
            trials,
            lambda,
            cap_c,
            out,
        } => {
            let g = load(&graph_file)?;
            let constants =
                theorem_constants(g.n(), g.d(), lambda, 0.1, cap_c, 0.02, 0.2, None)?;
            let rows = trial_census(&g, p, trials, cli.seed, &constants)?;
            write_csv(
                &out,
                CENSUS_HEADER,
                &rows.iter().map(census_row).collect::<Vec<_>>(),
            )?;
            println!("wrote {} ({} trials)", out.display(), rows.len());
            Ok(0)
        }

        Cmd::Explore {
            graph_file,
            start,
            p,
            mask,
            log,
        } => {
            let g = load(&graph_file)?;
            for &v in &start {
                if (v as usize) >= g.n() {
                    bail!("start vertex {v} out of range (n = {})", g.n());
                }
            }
            let u_init = VertexSet::from_indices(g.n(), start.iter().copied());
            let result = match (p, mask) {
                (Some(p), None) => {
                    let mut answers = BernoulliAnswers::new(p, mix(cli.seed, STREAM_EXPLORE, 0));
                    explore(&g, &u_init, &mut answers)?
                }
                (None, Some(mask_path)) => {
                    let mask = load_mask(&mask_path, &g)?;
                    let mut answers = MaskAnswers::new(&mask);
                    explore(&g, &u_init, &mut answers)?
                }
                _ => bail!("explore needs exactly one of --p or --mask"),
            };
            if let Some(log_path) = log {
                let mut text = String::new();
                for &(e, bit) in &result.log {
                    text.push_str(&format!("{e} {}\n", bit as u8));
                }
                write_text(&log_path, &text)?;
            }
            let doc = Json::Obj(vec![
                ("component_size", Json::U64(result.component.len() as u64)),
                ("queries", Json::U64(result.queries as u64)),
                ("positives", Json::U64(result.positives as u64)),
            ]);
            println!("{}", doc.render().trim_end());
            Ok(0)
        }

        Cmd::Sprinkle {
            graph_file,
            lambda,
            delta,
            cap_c,
            c,
            alpha,
            trials,
            out,
        } => {
            let g = load(&graph_file)?;
            let constants =
                theorem_constants(g.n(), g.d(), lambda, c, cap_c, alpha, 0.2, Some(delta))?;
            let rows = sprinkle_trials(&g, &constants, trials, cli.seed)?;
            write_csv(
                &out,
                SPRINKLE_HEADER,
                &rows.iter().map(sprinkle_row).collect::<Vec<_>>(),
            )?;
            println!("wrote {} ({} trials)", out.display(), rows.len());
            Ok(0)
        }

        Cmd::Experiment { config } => run_experiment(&config, &out_dir, cli.seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
