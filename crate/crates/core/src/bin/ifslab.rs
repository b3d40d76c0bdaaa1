use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ifslab::codespace::{AddressSpec, Word};
use ifslab::config::IfsConfig;
use ifslab::metricsets::{self, format_coord, PointCloud};
use ifslab::raster::Raster;
use ifslab::verifier::{self, CheckId, Verifier, VerifyOptions, DEFAULT_VERIFY_SEED};
use ifslab::{Error, Result};

const SEED_ENV: &str = "IFSLAB_SEED";

#[derive(Parser)]
#[command(name = "ifslab", version, about = "Attractors, coding maps and fixed points of iterated function systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Iterate the fractal operator to its attractor and write it as CSV.
    Attractor {
        config: PathBuf,
        /// CSV output; stdout when omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Stop once consecutive clouds are this close.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        /// Start from the points of this CSV file instead of the configured seed.
        #[arg(long)]
        seed_cloud: Option<PathBuf>,
    },
    /// Point coded by an eventually periodic address `pre|per`.
    Address { config: PathBuf, address: String },
    /// Fixed point of the composition along a word, e.g. `0.1.1`.
    Fixpoint { config: PathBuf, word: String },
    /// Run property checks and print one CHECK line per result.
    Verify {
        config: PathBuf,
        /// Comma-separated check ids, or `all`.
        #[arg(long, default_value = "all")]
        checks: String,
        /// Deepest prefix for the fibred checks.
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Attractor seed cloud as CSV.
        #[arg(long)]
        seed_cloud: Option<PathBuf>,
    },
    /// Hausdorff distance between two CSV clouds.
    Hausdorff {
        a: PathBuf,
        b: PathBuf,
        /// Only sup over `a` of the distance to `b`.
        #[arg(long)]
        directed: bool,
    },
    /// Chaos-game raster of a planar attractor as a binary PGM.
    Render {
        config: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long, default_value_t = 512)]
        width: usize,
        #[arg(long, default_value_t = 512)]
        height: usize,
        #[arg(long, default_value_t = 1_000_000)]
        steps: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Maximal word-image diameters by depth, with the comparison bound when one applies.
    Certificate {
        config: PathBuf,
        #[arg(long)]
        depth: Option<usize>,
        /// Absolute threshold for the last diameter; defaults to a tenth of diam(B).
        #[arg(long)]
        threshold: Option<f64>,
        /// Set B as CSV; defaults to the corners of a box around the attractor.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Random planar systems, some with expanding maps: locally fibred but without a certificate.
    Explore {
        #[arg(long, default_value_t = 20)]
        count: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NotConverged { .. }
        | Error::AttractorNotConverged
        | Error::InvarianceViolated { .. }
        | Error::Singular => 1,
        _ => 2,
    }
}

fn rng_seed(flag: Option<u64>) -> Result<u64> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| Error::Parse(format!("{SEED_ENV}=`{v}` is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_VERIFY_SEED),
    }
}

fn join_coords(p: &[f64]) -> String {
    p.iter().map(|&v| format_coord(v)).collect::<Vec<_>>().join(",")
}

fn load_cloud(path: &Path, dim: usize) -> Result<PointCloud> {
    let c = metricsets::read_cloud_file(path)?;
    c.check_dim(dim)?;
    Ok(c)
}

fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Attractor { config, out, tol, max_iter, seed_cloud } => {
            let cfg = IfsConfig::load(&config)?;
            let mut t = cfg.tolerances();
            if let Some(v) = tol {
                t.tol_attr = v;
            }
            if let Some(v) = max_iter {
                t.max_iter = v;
            }
            let ifs = cfg.instance_with(t).map_err(|e| Error::Parse(e.to_string()))?;
            let seed = match seed_cloud {
                Some(p) => load_cloud(&p, ifs.dim())?,
                None => cfg.seed_cloud()?,
            };
            let res = ifs.attractor(&seed)?;
            let summary = format!(
                "iterations={} final_step={} points={} converged={}",
                res.iterations,
                format_coord(res.final_step_hausdorff),
                res.cloud.len(),
                res.converged
            );
            match out {
                Some(p) => {
                    metricsets::write_cloud_file(&p, &res.cloud)?;
                    println!("{summary}");
                }
                None => {
                    metricsets::write_cloud(io::stdout().lock(), &res.cloud)?;
                    eprintln!("{summary}");
                }
            }
            if !res.converged {
                eprintln!("not converged");
            }
            Ok(res.converged)
        }
        Command::Address { config, address } => {
            let cfg = IfsConfig::load(&config)?;
            let ifs = cfg.instance()?;
            let a = AddressSpec::parse_with(&address, ifs.alphabet(), |t| cfg.resolve_letter(t))?;
            println!("{}", join_coords(&ifs.coding_map(&a)?));
            Ok(true)
        }
        Command::Fixpoint { config, word } => {
            let cfg = IfsConfig::load(&config)?;
            let ifs = cfg.instance()?;
            let w = Word::parse_with(&word, ifs.alphabet(), |t| cfg.resolve_letter(t))?;
            println!("{}", join_coords(&ifs.word_fixed_point(&w)?));
            Ok(true)
        }
        Command::Verify { config, checks, depth, seed, seed_cloud } => {
            let ids = CheckId::parse_list(&checks)?;
            let cfg = IfsConfig::load(&config)?;
            let ifs = cfg.instance()?;
            let mut opts = VerifyOptions { seed: rng_seed(seed)?, ..VerifyOptions::default() };
            if let Some(d) = depth {
                opts.fibred_depth = d;
            }
            opts.seed_cloud = Some(match seed_cloud {
                Some(p) => load_cloud(&p, ifs.dim())?,
                None => cfg.seed_cloud()?,
            });
            let v = Verifier::new(&ifs, opts)?;
            let reports = v.run_all(&ids);
            let mut out = io::stdout().lock();
            for r in &reports {
                writeln!(out, "{r}")?;
            }
            Ok(reports.iter().all(|r| r.passed))
        }
        Command::Hausdorff { a, b, directed } => {
            let a = metricsets::read_cloud_file(&a)?;
            let b = metricsets::read_cloud_file(&b)?;
            let d = if directed { metricsets::directed_hausdorff(&a, &b)? } else { metricsets::hausdorff(&a, &b)? };
            println!("{}", format_coord(d));
            Ok(true)
        }
        Command::Render { config, out, width, height, steps, seed } => {
            let cfg = IfsConfig::load(&config)?;
            let ifs = cfg.instance()?;
            if ifs.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, got: ifs.dim() });
            }
            let burn_in = 100.min(steps / 2);
            let cloud = ifs.chaos_game(steps, burn_in, rng_seed(seed)?)?;
            let raster = Raster::from_cloud(&cloud, width, height)?;
            raster.write_pgm(BufWriter::new(File::create(&out)?))?;
            println!("nonzero_fraction={}", format_coord(raster.nonzero_fraction()));
            Ok(true)
        }
        Command::Certificate { config, depth, threshold, points } => {
            let cfg = IfsConfig::load(&config)?;
            let ifs = cfg.instance()?;
            let opts = VerifyOptions { seed_cloud: Some(cfg.seed_cloud()?), ..VerifyOptions::default() };
            let b = match points {
                Some(p) => load_cloud(&p, ifs.dim())?,
                None => Verifier::new(&ifs, opts.clone())?.region().corners(),
            };
            let depth = depth.unwrap_or_else(|| verifier::budget_depth(ifs.alphabet(), opts.word_budget));
            let threshold = threshold.unwrap_or(opts.cert_ratio * b.diameter());
            let cert = ifs.diminishing_certificate(&b, depth, Some(threshold))?;
            let mut out = io::stdout().lock();
            writeln!(out, "n max_diam phi_bound worst_word")?;
            for (i, n) in cert.depths.iter().enumerate() {
                let bound = cert.phi_bounds.as_ref().map_or("-".to_string(), |b| format_coord(b[i]));
                writeln!(out, "{n} {} {bound} {}", format_coord(cert.max_diams[i]), cert.worst_words[i])?;
            }
            writeln!(
                out,
                "diam_b={} threshold={} verdict={}",
                format_coord(cert.diam_b),
                format_coord(cert.threshold),
                if cert.verdict { "holds" } else { "fails" }
            )?;
            Ok(cert.verdict)
        }
        Command::Explore { count, seed } => {
            let seed = rng_seed(seed)?;
            let records = verifier::explore_converse(count, seed, &VerifyOptions { seed, ..VerifyOptions::default() })?;
            let mut out = io::stdout().lock();
            for r in &records {
                writeln!(
                    out,
                    "EXPLORE index={} seed={} maps={} max_lip={} local_fibred={} diminishing={} candidate={}",
                    r.index,
                    r.seed,
                    r.ifs.maps().len(),
                    format_coord(r.ifs.max_lipschitz_bound()),
                    if r.local_fibred.passed { "PASS" } else { "FAIL" },
                    if r.diminishing.passed { "PASS" } else { "FAIL" },
                    r.is_candidate()
                )?;
            }
            let found = records.iter().filter(|r| r.is_candidate()).count();
            writeln!(out, "candidates={found} of {}", records.len())?;
            Ok(true)
        }
    }
}
