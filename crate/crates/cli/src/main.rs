use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use ordtile::barriers::{self, BarrierCertificate};
use ordtile::bottle::{bottlegraph, constructive_blowup_tiling, interval_labelings, Construction};
use ordtile::crop::crop;
use ordtile::embed::{perfect_tiling_with, TilingOptions, DEFAULT_BUDGET};
use ordtile::probe::{parse_grid, threshold_probe, write_csv, ProbeOptions};
use ordtile::suite::{verify_suite, CheckOutcome, SuiteLimits};
use ordtile::{catalog, compute_profile, format_ratio, OrderedGraph, PatternProfile, Rational};

/// Exit code for I/O and parse failures in `tile`, whose codes 0-3 are outcomes.
const TILE_IO_ERROR: u8 = 4;
const USAGE_ERROR: u8 = 2;
const MAX_CROP_SETS: usize = 6;

#[derive(Parser)]
#[command(name = "ordtile", version, about = "Perfect tilings of vertex-ordered graphs")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Search-node budget for the tiling oracle.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Space,
    Div,
    Local,
}

#[derive(Subcommand)]
enum Command {
    /// Print the parameters and threshold case of a pattern.
    Analyze { pattern: PathBuf },
    /// Build an extremal host graph without a perfect tiling.
    Barrier {
        #[arg(long, value_enum)]
        kind: Kind,
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Build for the mirrored pattern and reflect the result.
        #[arg(long)]
        mirror: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether a host has a perfect tiling (exit 0 tiling, 1 none, 2 h does not divide n, 3 timeout).
    Tile {
        #[arg(long)]
        host: PathBuf,
        #[arg(long)]
        pattern: PathBuf,
        /// Write the outcome and blocks as JSON.
        #[arg(long)]
        certificate: Option<PathBuf>,
    },
    /// Build the bottlegraph and tile its ordered blow-ups.
    Bottle {
        #[arg(long)]
        pattern: PathBuf,
        /// List every interval labeling, not one per sequence of part sizes.
        #[arg(long)]
        all_labelings: bool,
        /// Write each blow-up and its tiling into this directory.
        #[arg(long)]
        emit_blowup: Option<PathBuf>,
    },
    /// Extract block-ordered subsets from disjoint sets, e.g. "1,5,9;2,3,4".
    Crop {
        #[arg(long)]
        sets: String,
    },
    /// Tiling rates of random hosts over a grid of edge probabilities, as CSV.
    Probe {
        #[arg(long)]
        pattern: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "p=0.2:0.9:0.1")]
        grid: String,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Keep only samples with min degree in LO:HI.
        #[arg(long)]
        min_degree: Option<String>,
        #[arg(long, default_value_t = 10_000)]
        max_rejections: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant battery on the built-in catalog or the given pattern files.
    VerifySuite {
        catalog: Vec<PathBuf>,
        #[arg(long, default_value_t = 50)]
        random_hosts: usize,
        #[arg(long, default_value_t = 200)]
        crop_trials: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let io_code = match cli.command {
        Command::Tile { .. } => TILE_IO_ERROR,
        _ => USAGE_ERROR,
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(io_code)
        }
    }
}

fn load(path: &Path) -> Result<OrderedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    OrderedGraph::parse_any(&text).with_context(|| format!("parsing {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable") + "\n"
}

fn run(cli: Cli) -> Result<u8> {
    let format = cli.format;
    let tiling_opts = TilingOptions {
        budget: cli.budget,
        jobs: cli.jobs,
    };
    match cli.command {
        Command::Analyze { pattern } => {
            let profile = compute_profile(&load(&pattern)?);
            match format {
                Format::Json => emit(&to_json(&profile), None)?,
                Format::Text => emit(&profile_text(&profile), None)?,
            }
            Ok(0)
        }
        Command::Barrier {
            kind,
            pattern,
            n,
            ell,
            mirror,
            out,
        } => {
            let pattern = load(&pattern)?;
            if kind == Kind::Div && !compute_profile(&pattern).prop_a {
                eprintln!("warning: pattern lacks Property A; the divisibility barrier is not extremal for it");
            }
            let cert = build_barrier(kind, &pattern, n, ell, mirror)?;
            let text = match format {
                Format::Json => to_json(&cert),
                Format::Text => cert.header() + &cert.graph.to_text(),
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Tile {
            host,
            pattern,
            certificate,
        } => {
            let (host, pattern) = (load(&host)?, load(&pattern)?);
            let report = perfect_tiling_with(&host, &pattern, &tiling_opts);
            let blocks = report.outcome.tiling().map(|t| &t.blocks);
            let doc = json!({
                "outcome": report.outcome.label(),
                "nodes": report.nodes,
                "blocks": blocks,
            });
            if let Some(path) = certificate {
                fs::write(&path, to_json(&doc)).with_context(|| format!("writing {}", path.display()))?;
            }
            match format {
                Format::Json => emit(&to_json(&doc), None)?,
                Format::Text => {
                    let mut text = format!("outcome: {}\nnodes: {}\n", report.outcome.label(), report.nodes);
                    for block in blocks.into_iter().flatten() {
                        let line: Vec<String> = block.image.iter().map(ToString::to_string).collect();
                        writeln!(text, "{}", line.join(" "))?;
                    }
                    emit(&text, None)?;
                }
            }
            Ok(report.outcome.exit_code() as u8)
        }
        Command::Bottle {
            pattern,
            all_labelings,
            emit_blowup,
        } => bottle(&load(&pattern)?, all_labelings, emit_blowup.as_deref(), format),
        Command::Crop { sets } => {
            let sets = parse_sets(&sets)?;
            if sets.len() > MAX_CROP_SETS {
                bail!("at most {MAX_CROP_SETS} sets are accepted, got {}", sets.len());
            }
            let result = crop(&sets)?;
            match format {
                Format::Json => emit(&to_json(&result), None)?,
                Format::Text => {
                    let mut text = String::new();
                    for (i, s) in result.subsets.iter().enumerate() {
                        writeln!(text, "S{} = {:?}", i + 1, s)?;
                    }
                    writeln!(text, "sigma = {:?}", result.perm)?;
                    emit(&text, None)?;
                }
            }
            Ok(0)
        }
        Command::Probe {
            pattern,
            n,
            grid,
            trials,
            min_degree,
            max_rejections,
            out,
        } => {
            let pattern = load(&pattern)?;
            let grid = parse_grid(&grid)?;
            let band = min_degree.as_deref().map(parse_band).transpose()?;
            let opts = ProbeOptions {
                tiling: TilingOptions {
                    budget: cli.budget,
                    jobs: 1,
                },
                min_degree_band: band,
                max_rejections,
                jobs: cli.jobs,
            };
            let rows = threshold_probe(&pattern, n, &grid, trials, cli.seed, &opts)?;
            let text = match format {
                Format::Json => to_json(&rows),
                Format::Text => {
                    let mut buf = Vec::new();
                    write_csv(&rows, &mut buf)?;
                    String::from_utf8(buf)?
                }
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::VerifySuite {
            catalog: files,
            random_hosts,
            crop_trials,
        } => {
            let patterns = if files.is_empty() {
                catalog::default_catalog()
            } else {
                files
                    .iter()
                    .map(|f| {
                        let name = f
                            .file_stem()
                            .map_or_else(|| f.display().to_string(), |s| s.to_string_lossy().into_owned());
                        load(f).map(|g| (name, g))
                    })
                    .collect::<Result<_>>()?
            };
            let limits = SuiteLimits {
                random_hosts,
                crop_trials,
                budget: cli.budget,
                jobs: cli.jobs,
                seed: cli.seed,
                ..SuiteLimits::default()
            };
            let report = verify_suite(&patterns, &limits)?;
            match format {
                Format::Json => emit(&to_json(&report), None)?,
                Format::Text => {
                    let mut text = String::new();
                    for c in &report.checks {
                        let (status, detail) = match &c.outcome {
                            CheckOutcome::Pass => ("PASS", String::new()),
                            CheckOutcome::Fail(d) => ("FAIL", format!(": {d}")),
                            CheckOutcome::Skipped(d) => ("SKIP", format!(": {d}")),
                        };
                        writeln!(
                            text,
                            "{status:<4}  {:<26} {:<8} {}{detail}",
                            c.check, c.pattern, c.parameters
                        )?;
                    }
                    writeln!(text, "overall: {}", if report.passed { "PASS" } else { "FAIL" })?;
                    emit(&text, None)?;
                }
            }
            Ok(if report.passed { 0 } else { 1 })
        }
    }
}

fn ratio_or_dash(r: Option<Rational>) -> String {
    r.as_ref().map_or_else(|| "-".to_string(), format_ratio)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn profile_text(p: &PatternProfile) -> String {
    let rows = [
        ("h", p.h.to_string()),
        ("chi_<", p.chi_lt.to_string()),
        ("alpha+", format!("{:?}", p.alpha_plus)),
        ("alpha-", format!("{:?}", p.alpha_minus)),
        ("alpha*", ratio_or_dash(p.alpha_star().ok())),
        ("s(H)", p.s.to_string()),
        ("l(H)", p.l.to_string()),
        ("property A", yes_no(p.prop_a).to_string()),
        ("property B", yes_no(p.prop_b).to_string()),
        ("property C (vertex 1)", yes_no(p.prop_c_first).to_string()),
        ("property C (vertex h)", yes_no(p.prop_c_last).to_string()),
        (
            "case",
            p.case.map_or_else(|| "unclassified".to_string(), |c| c.to_string()),
        ),
        ("threshold coefficient", ratio_or_dash(p.threshold_coeff)),
        ("lower bound coefficient", ratio_or_dash(p.lower_bound_coeff)),
    ];
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn build_barrier(kind: Kind, pattern: &OrderedGraph, n: usize, ell: usize, mirror: bool) -> Result<BarrierCertificate> {
    let target = if mirror { pattern.mirror() } else { pattern.clone() };
    let cert = match kind {
        Kind::Space => barriers::space_barrier(&target, ell, n)?,
        Kind::Div => barriers::divisibility_barrier(&target, n)?,
        Kind::Local => barriers::local_barrier(&target, n)?,
    };
    Ok(if mirror {
        BarrierCertificate {
            graph: cert.graph.mirror(),
            mirrored: !cert.mirrored,
            ..cert
        }
    } else {
        cert
    })
}

fn bottle(pattern: &OrderedGraph, all: bool, dir: Option<&Path>, format: Format) -> Result<u8> {
    let b = bottlegraph(pattern)?;
    if let Some(dir) = dir {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let mut entries = Vec::new();
    let mut text = format!(
        "parts: {:?}\nbranch: {:?}\nmirrored: {}\nchi_cr: {}\n",
        b.part_sizes,
        b.branch,
        b.mirrored,
        format_ratio(&b.chi_cr())
    );
    for (index, labeling) in interval_labelings(&b, !all).into_iter().enumerate() {
        let out = constructive_blowup_tiling(pattern, &b, &labeling)?;
        let verified = ordtile::embed::verify_tiling(&out.host, pattern, &out.tiling);
        let construction = match out.construction {
            Construction::Direct => "direct".to_string(),
            Construction::TypeSets { c, type_one, type_two } => {
                format!("type sets (c={c}, {type_one} of type I, {type_two} of type II)")
            }
        };
        writeln!(
            text,
            "labeling {:?}: t={} n={} blocks={} {} verified={}",
            labeling.order,
            out.t,
            out.host.n(),
            out.tiling.blocks.len(),
            construction,
            verified
        )?;
        if let Some(dir) = dir {
            let stem = format!("blowup_{index}");
            fs::write(dir.join(format!("{stem}.txt")), out.host.to_text())?;
            fs::write(dir.join(format!("{stem}.tiling.json")), to_json(&out.tiling.blocks))?;
        }
        entries.push(json!({
            "labeling": labeling.order,
            "t": out.t,
            "n": out.host.n(),
            "construction": out.construction,
            "blocks": out.tiling.blocks,
            "verified": verified,
        }));
    }
    match format {
        Format::Json => emit(
            &to_json(&json!({
                "bottlegraph": b,
                "chi_cr": format_ratio(&b.chi_cr()),
                "blowups": entries,
            })),
            None,
        )?,
        Format::Text => emit(&text, None)?,
    }
    Ok(0)
}

fn parse_sets(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|part| {
            part.split(',')
                .map(|x| {
                    x.trim()
                        .parse::<usize>()
                        .with_context(|| format!("bad element {x:?} in {spec:?}"))
                })
                .collect()
        })
        .collect()
}

fn parse_band(spec: &str) -> Result<(usize, usize)> {
    let (lo, hi) = spec.split_once(':').context("min degree band must be LO:HI")?;
    Ok((lo.trim().parse()?, hi.trim().parse()?))
}
