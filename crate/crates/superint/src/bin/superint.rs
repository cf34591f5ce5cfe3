use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use superint::catalog::{self, CatalogError};
use superint::hesse::HesseFrobenius;
use superint::io as doc;
use superint::pipeline::{self, PipelineError, RunOptions};
use superint::potential::{default_window, solve_potentials, ExponentWindow};

// exit codes: 0 ok, 2 axiom failure, 3 family-dimension mismatch,
// 4 rank deficit, 5 input/format problem
const EXIT_AXIOMS: u8 = 2;
const EXIT_FAMILY: u8 = 3;
const EXIT_RANK: u8 = 4;
const EXIT_INPUT: u8 = 5;

#[derive(Parser)]
#[command(
    name = "superint",
    about = "Build, glue, and certify second-order superintegrable systems with exact arithmetic",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List the built-in structures and their expected invariants
    CatalogList,
    /// Check the structure axioms (symmetry, associativity, differential)
    Check {
        /// Catalog name or path to a structure JSON file
        source: String,
        /// Write the normalized structure document here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Solve the potential equation and print the family
    Solve {
        source: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Fail (exit 3) unless the family has this dimension
        #[arg(long)]
        expect_dim: Option<usize>,
        /// Write the family document here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Glue two structures into a product structure
    Glue {
        source_a: String,
        source_b: String,
        /// Write the product structure document here
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run the full pipeline and certify functional independence
    Certify {
        source: String,
        #[command(flatten)]
        window: WindowArgs,
        /// Coordinate blocks (1-based) for inheritance accounting,
        /// e.g. "1,2,3,4;5,6,7,8"; catalog products get theirs by default
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long, env = "SUPERINT_SEED", default_value_t = 1)]
        seed: u64,
        /// Fail (exit 3) unless the family has this dimension
        #[arg(long)]
        expect_dim: Option<usize>,
        /// Write the full report document here
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

#[derive(Args)]
struct WindowArgs {
    /// Exponent bounds "lo:hi", either one range for all coordinates or
    /// comma-separated per-coordinate ranges
    #[arg(long)]
    window: Option<String>,
    /// Bound on the sum of absolute exponents in the ansatz
    #[arg(long, default_value_t = 4)]
    cap: u32,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: EXIT_INPUT, message: message.into() }
    }
}

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::input(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::CatalogList => catalog_list(),
        Command::Check { source, json } => check(&source, json.as_deref()),
        Command::Solve { source, window, expect_dim, json } => {
            solve(&source, &window, expect_dim, json.as_deref())
        }
        Command::Glue { source_a, source_b, json } => glue(&source_a, &source_b, json.as_deref()),
        Command::Certify { source, window, blocks, seed, expect_dim, json } => {
            certify(&source, &window, blocks.as_deref(), seed, expect_dim, json.as_deref())
        }
    }
}

/// Catalog name or file path; returns the name when it came from the catalog.
fn load(source: &str) -> Result<(HesseFrobenius, Option<&str>), Failure> {
    match catalog::build(source) {
        Ok(hf) => Ok((hf, Some(source))),
        Err(CatalogError::Unknown(_)) => {
            let text = fs::read_to_string(source)
                .map_err(|e| Failure::input(format!("{source}: {e}")))?;
            let hf = doc::structure_from_json(&text)
                .map_err(|e| Failure::input(format!("{source}: {e}")))?;
            Ok((hf, None))
        }
        Err(e) => Err(e.into()),
    }
}

fn resolve_window(args: &WindowArgs, hf: &HesseFrobenius) -> Result<ExponentWindow, Failure> {
    let spec = match &args.window {
        None => return Ok(default_window(hf)),
        Some(spec) => spec,
    };
    let dim = hf.dim();
    let mut ranges = Vec::new();
    for part in spec.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .ok_or_else(|| Failure::input(format!("window range `{part}` is not lo:hi")))?;
        let lo: i32 = lo.trim().parse().map_err(|_| Failure::input("window bound is not an integer"))?;
        let hi: i32 = hi.trim().parse().map_err(|_| Failure::input("window bound is not an integer"))?;
        ranges.push((lo, hi));
    }
    if ranges.len() == 1 {
        ranges = vec![ranges[0]; dim];
    } else if ranges.len() != dim {
        return Err(Failure::input(format!(
            "window has {} ranges but the structure has {} coordinates",
            ranges.len(),
            dim
        )));
    }
    let (lo, hi): (Vec<i32>, Vec<i32>) = ranges.into_iter().unzip();
    Ok(ExponentWindow::new(lo, hi, args.cap)?)
}

fn parse_blocks(spec: &str, dim: usize) -> Result<Vec<Vec<usize>>, Failure> {
    let mut blocks = Vec::new();
    for group in spec.split(';') {
        let mut block = Vec::new();
        for label in group.split(',') {
            let v: usize = label
                .trim()
                .parse()
                .map_err(|_| Failure::input(format!("block label `{label}` is not a number")))?;
            if v == 0 || v > dim {
                return Err(Failure::input(format!("block label {v} out of range 1..={dim}")));
            }
            block.push(v - 1);
        }
        blocks.push(block);
    }
    Ok(blocks)
}

fn write_json(path: &std::path::Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn catalog_list() -> Result<(), Failure> {
    println!("{:<14} {:>3}  {:>6}  {:>10}  {:>4}", "name", "dim", "family", "compatible", "rank");
    for &name in catalog::names() {
        let hf = catalog::build(name).expect("catalog entry");
        let (family, compatible) = catalog::expected_counts(name).expect("catalog entry");
        println!(
            "{:<14} {:>3}  {:>6}  {:>10}  {:>4}",
            name,
            hf.dim(),
            family,
            compatible,
            2 * hf.dim() - 1
        );
    }
    println!();
    println!("parametric: semisimple:<n>:<mask>   (mask of 0/1 per coordinate, e.g. semisimple:4:1110)");
    Ok(())
}

fn check(source: &str, json: Option<&std::path::Path>) -> Result<(), Failure> {
    let (hf, _) = load(source)?;
    let report = hf.check_axioms();
    if let Some(path) = json {
        write_json(path, &doc::structure_to_json(&hf))?;
    }
    if report.passed() {
        println!("dimension {}: all axioms hold", hf.dim());
        Ok(())
    } else {
        Err(Failure { code: EXIT_AXIOMS, message: report.to_string() })
    }
}

fn solve(
    source: &str,
    window: &WindowArgs,
    expect_dim: Option<usize>,
    json: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let (hf, name) = load(source)?;
    let report = hf.check_axioms();
    if !report.passed() {
        return Err(Failure { code: EXIT_AXIOMS, message: report.to_string() });
    }
    let window = resolve_window(window, &hf)?;
    let family = solve_potentials(&hf, &window)?;
    println!("family dimension {}", family.dim());
    for (k, v) in family.basis().iter().enumerate() {
        println!("  V{} = {}", k + 1, v);
    }
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&doc::family_to_doc(&family, hf.dim()))
            .expect("serializable");
        write_json(path, &text)?;
    }
    enforce_family_dim(family.dim(), expect_dim, name)
}

fn enforce_family_dim(
    got: usize,
    expect_dim: Option<usize>,
    name: Option<&str>,
) -> Result<(), Failure> {
    let expected = expect_dim.or_else(|| name.and_then(|n| catalog::expected_counts(n)).map(|c| c.0));
    match expected {
        Some(want) if want != got => Err(Failure {
            code: EXIT_FAMILY,
            message: format!("family dimension {got}, expected {want}"),
        }),
        _ => Ok(()),
    }
}

fn glue(source_a: &str, source_b: &str, json: Option<&std::path::Path>) -> Result<(), Failure> {
    let (a, _) = load(source_a)?;
    let (b, _) = load(source_b)?;
    let product = superint::hesse::glue(&a, &b);
    let report = product.check_axioms();
    if !report.passed() {
        return Err(Failure { code: EXIT_AXIOMS, message: report.to_string() });
    }
    println!(
        "glued {} + {} -> dimension {}, all axioms hold",
        a.dim(),
        b.dim(),
        product.dim()
    );
    if let Some(path) = json {
        write_json(path, &doc::structure_to_json(&product))?;
    }
    Ok(())
}

fn certify(
    source: &str,
    window: &WindowArgs,
    blocks: Option<&str>,
    seed: u64,
    expect_dim: Option<usize>,
    json: Option<&std::path::Path>,
) -> Result<(), Failure> {
    let (hf, name) = load(source)?;
    let blocks = match blocks {
        Some(spec) => Some(parse_blocks(spec, hf.dim())?),
        None => name.and_then(catalog::factor_blocks),
    };
    let opts = RunOptions { window: Some(resolve_window(window, &hf)?), blocks, seed };
    let report = match pipeline::run(&hf, &opts) {
        Ok(report) => report,
        Err(PipelineError::Axioms(r)) => {
            return Err(Failure { code: EXIT_AXIOMS, message: r.to_string() })
        }
        Err(e) => return Err(e.into()),
    };

    println!("dimension           {}", report.dim);
    println!("family dimension    {}", report.family.dim());
    println!("compatible tensors  {}", report.compatible.dim());
    if let Some(inh) = &report.inheritance {
        let counts: Vec<String> = inh.block_counts.iter().map(usize::to_string).collect();
        println!(
            "inheritance         blocks [{}] + {} mixed = {}",
            counts.join(", "),
            inh.mixed,
            inh.total
        );
    }
    let cert = &report.certificate;
    println!(
        "independence        rank {} of {} (seed {}, {} point{})",
        cert.achieved_rank,
        cert.target_rank,
        cert.seed,
        cert.points_tried,
        if cert.points_tried == 1 { "" } else { "s" }
    );
    if let Some(path) = json {
        let text = serde_json::to_string_pretty(&doc::report_to_doc(&report, name))
            .expect("serializable");
        write_json(path, &text)?;
    }
    enforce_family_dim(report.family.dim(), expect_dim, name)?;
    if !cert.rank_achieved() {
        return Err(Failure {
            code: EXIT_RANK,
            message: format!(
                "independence rank {} below target {}",
                cert.achieved_rank, cert.target_rank
            ),
        });
    }
    Ok(())
}
