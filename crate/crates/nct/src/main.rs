//! Command-line surface for the noncommutative torus engine: pairings, Chern
//! characters, winding numbers, parallel transport, verification suites, and
//! file inspection.
//!
//! Cochain operator expressions (for `pair --lie/--cyclic`) use a small prefix
//! grammar over the named registry:
//!
//! ```text
//! EXPR := delta:J              canonical derivation along axis J (1-based)
//!       | E                    deformation 2-cocycle of the supplied theta
//!       | m                    multiplication (Lie derivative only)
//!       | cup(EXPR,EXPR)       cup product
//!       | circ(EXPR,EXPR)      Gerstenhaber circle product
//!       | bracket(EXPR,EXPR)   Gerstenhaber bracket
//!       | coboundary(EXPR)     Hochschild coboundary
//! ```
//!
//! Functionals are named `tau`, `tau1:J`, `tau2`, or `gamma:J1,J2,...`, and
//! may be post-composed with `--contract J` (transpose of the cyclic
//! contraction along `delta_J`), then `--dual-b` / `--dual-B`.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;

use nctorus::calculus::{apply_cyclic, apply_lie};
use nctorus::chain::GradedChain;
use nctorus::chern::{ch_idempotent, ch_invertible};
use nctorus::cochain::{bracket, circ, cup, hochschild_delta, MultiDiff};
use nctorus::error::Error;
use nctorus::functional::{
    contract_dual, dual_b, dual_big_b, gamma, pair_graded, pairing, tau1, tau2, Functional,
};
use nctorus::invariant::{
    deg_profile, gm_transport_wedge, r_poly, transport_chain, transport_table, InvariantChain,
};
use nctorus::io;
use nctorus::matrix::try_invert;
use nctorus::torus::{DeformationPoint, SkewMatrix};
use nctorus::verify::{run_all, run_suite, suite_names, SuiteConfig};

const GRAMMAR_HELP: &str = "\
Cochain expressions (pair --lie / --cyclic) use a prefix grammar:
  delta:J | E | m | cup(A,B) | circ(A,B) | bracket(A,B) | coboundary(A)
Functionals are named tau, tau1:J, tau2, or gamma:J1,J2,... and compose with
--contract J, --dual-b, --dual-B (applied in that order).";

#[derive(Parser)]
#[command(
    name = "nct",
    about = "Exact calculator for algebraic noncommutative tori and their cyclic complexes",
    after_help = GRAMMAR_HELP,
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Pair a named functional with a periodic chain file.
    Pair(PairArgs),
    /// Compute the Chern character of a matrix idempotent or invertible.
    Chern(ChernArgs),
    /// Winding number: pair tau1 about an axis with the character of an invertible.
    Winding(WindingArgs),
    /// Parallel-transport a chain, functional table, or wedge class manifest.
    Transport(TransportArgs),
    /// Run a verification suite (or all of them).
    Verify(VerifyArgs),
    /// Inspect a data file: dimensions, degrees, support, degree profiles.
    Info(InfoArgs),
}

#[derive(clap::Args)]
struct PairArgs {
    /// Functional name: tau | tau1:J | tau2 | gamma:J1,J2,...
    #[arg(long)]
    functional: String,
    /// Periodic chain file.
    #[arg(long)]
    chain: PathBuf,
    /// Deformation matrix file.
    #[arg(long)]
    theta: PathBuf,
    /// Deformation parameter.
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Compose the functional with the transpose contraction along delta_J.
    #[arg(long)]
    contract: Vec<usize>,
    /// Compose with the dual Hochschild differential.
    #[arg(long = "dual-b", default_value_t = false)]
    dual_b: bool,
    /// Compose with the dual degree-lowering differential.
    #[arg(long = "dual-B", default_value_t = false)]
    dual_big_b: bool,
    /// Apply a Lie derivative along a cochain expression to the chain first.
    #[arg(long)]
    lie: Vec<String>,
    /// Apply a cyclic contraction along a cochain expression to the chain first.
    #[arg(long)]
    cyclic: Vec<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ChernKind {
    Idempotent,
    Invertible,
}

#[derive(clap::Args)]
struct ChernArgs {
    /// Matrix file holding the idempotent or invertible.
    #[arg(long)]
    matrix: PathBuf,
    #[arg(long, value_enum)]
    kind: ChernKind,
    /// Degree cap of the truncated periodic chain.
    #[arg(long, default_value_t = 6)]
    cap: usize,
    #[arg(long)]
    theta: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
    /// Tolerance on the idempotent defect.
    #[arg(long, default_value_t = 1e-9)]
    idempotent_tol: f64,
    /// Output periodic chain file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct WindingArgs {
    /// Matrix file holding a monomial unit or unitriangular invertible.
    #[arg(long)]
    matrix: PathBuf,
    /// Axis (1-based).
    #[arg(long)]
    axis: usize,
    #[arg(long)]
    theta: PathBuf,
    #[arg(long, default_value_t = 0.0)]
    t: f64,
}

#[derive(clap::Args)]
struct TransportArgs {
    /// Manifest file: theta, t0, t1, object, payload.
    #[arg(long)]
    manifest: PathBuf,
    /// Output file for the transported payload.
    #[arg(long)]
    out: PathBuf,
}

#[derive(clap::Args)]
struct VerifyArgs {
    /// Suite name (complex | operators | invariant | transport | pairing |
    /// chern | ode) or "all".
    #[arg(long)]
    suite: String,
    /// JSON SuiteConfig file; defaults apply when absent.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the reports as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(clap::Args)]
struct InfoArgs {
    #[arg(long)]
    file: PathBuf,
}

fn exit_code_for(e: &Error) -> u8 {
    match e {
        Error::Json(_)
        | Error::Format(_)
        | Error::ParityMismatch { .. }
        | Error::DegreeAboveCap { .. }
        | Error::NotSkewSymmetric { .. } => 2,
        Error::NotInvariant { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("NCT_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(threads.max(1))
                .build_global();
        }
    }
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Pair(args) => cmd_pair(args),
        Command::Chern(args) => cmd_chern(args),
        Command::Winding(args) => cmd_winding(args),
        Command::Transport(args) => cmd_transport(args),
        Command::Verify(args) => cmd_verify(args),
        Command::Info(args) => cmd_info(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e))
        }
    }
}

fn print_scalar(v: C64) {
    // 15 significant digits, locale-independent
    println!("{:.14e} {:.14e}", v.re, v.im);
}

fn load_theta(path: &std::path::Path) -> nctorus::Result<SkewMatrix> {
    io::theta_from_dto(&io::read_json(path)?)
}

fn parse_functional(name: &str) -> nctorus::Result<Functional> {
    if name == "tau" {
        return Ok(Functional::tau());
    }
    if name == "tau2" {
        return Ok(tau2());
    }
    if let Some(axis) = name.strip_prefix("tau1:") {
        let j: usize = axis
            .parse()
            .map_err(|_| Error::Format(format!("bad axis in '{name}'")))?;
        return Ok(tau1(j));
    }
    if let Some(axes) = name.strip_prefix("gamma:") {
        let parsed: Vec<usize> = axes
            .split(',')
            .map(|a| {
                a.parse()
                    .map_err(|_| Error::Format(format!("bad axis list in '{name}'")))
            })
            .collect::<nctorus::Result<_>>()?;
        let derivations: Vec<MultiDiff> = parsed.into_iter().map(MultiDiff::derivation).collect();
        return gamma(&derivations);
    }
    Err(Error::Format(format!(
        "unknown functional '{name}' (expected tau, tau1:J, tau2, gamma:J1,J2,...)"
    )))
}

/// Prefix-grammar parser for cochain expressions.
fn parse_cochain(expr: &str, theta: &SkewMatrix) -> nctorus::Result<MultiDiff> {
    let expr = expr.trim();
    if expr == "m" {
        return Ok(MultiDiff::multiplication());
    }
    if expr == "E" {
        return Ok(MultiDiff::deformation_cocycle(theta));
    }
    if let Some(axis) = expr.strip_prefix("delta:") {
        let j: usize = axis
            .parse()
            .map_err(|_| Error::Format(format!("bad axis in '{expr}'")))?;
        return Ok(MultiDiff::derivation(j));
    }
    for (head, arity) in [
        ("cup", 2),
        ("circ", 2),
        ("bracket", 2),
        ("coboundary", 1),
    ] {
        if let Some(rest) = expr.strip_prefix(head) {
            let inner = rest
                .strip_prefix('(')
                .and_then(|r| r.strip_suffix(')'))
                .ok_or_else(|| Error::Format(format!("expected {head}(...) in '{expr}'")))?;
            let parts = split_top_level(inner);
            if parts.len() != arity {
                return Err(Error::Format(format!(
                    "{head} takes {arity} argument(s), got {} in '{expr}'",
                    parts.len()
                )));
            }
            let parsed: Vec<MultiDiff> = parts
                .iter()
                .map(|p| parse_cochain(p, theta))
                .collect::<nctorus::Result<_>>()?;
            return Ok(match head {
                "cup" => cup(&parsed[0], &parsed[1]),
                "circ" => circ(&parsed[0], &parsed[1]),
                "bracket" => bracket(&parsed[0], &parsed[1]),
                _ => hochschild_delta(&parsed[0]),
            });
        }
    }
    Err(Error::Format(format!("cannot parse cochain expression '{expr}'")))
}

fn split_top_level(s: &str) -> Vec<String> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut current = String::new();
    for ch in s.chars() {
        match ch {
            '(' => {
                depth += 1;
                current.push(ch);
            }
            ')' => {
                depth = depth.saturating_sub(1);
                current.push(ch);
            }
            ',' if depth == 0 => {
                parts.push(current.trim().to_string());
                current = String::new();
            }
            _ => current.push(ch),
        }
    }
    if !current.trim().is_empty() {
        parts.push(current.trim().to_string());
    }
    parts
}

fn cmd_pair(args: PairArgs) -> nctorus::Result<ExitCode> {
    let theta = load_theta(&args.theta)?;
    let point = DeformationPoint::new(theta.clone(), args.t);
    let mut phi = parse_functional(&args.functional)?;
    for &j in &args.contract {
        phi = contract_dual(&MultiDiff::derivation(j), &phi)?.raised;
    }
    if args.dual_b {
        phi = dual_b(&phi);
    }
    if args.dual_big_b {
        phi = dual_big_b(&phi)?;
    }
    let pc = io::periodic_from_dto(&io::read_json(&args.chain)?)?;
    let value = if args.lie.is_empty() && args.cyclic.is_empty() {
        pairing(&phi, &pc, &point)?
    } else {
        // operator pipeline: fold the periodic chain into a graded chain and
        // apply the requested operators in order
        let mut graded = GradedChain::zero(pc.dim());
        for (_, c) in pc.components() {
            graded.accumulate(c.clone());
        }
        for expr in &args.lie {
            let d = parse_cochain(expr, &theta)?;
            graded = apply_lie(&d, &graded, &point)?;
        }
        for expr in &args.cyclic {
            let d = parse_cochain(expr, &theta)?;
            graded = apply_cyclic(&d, &graded, &point)?;
        }
        pair_graded(&phi, &graded, &point)?
    };
    print_scalar(value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_chern(args: ChernArgs) -> nctorus::Result<ExitCode> {
    let theta = load_theta(&args.theta)?;
    let point = DeformationPoint::new(theta, args.t);
    let matrix = io::matrix_from_dto(&io::read_json(&args.matrix)?)?;
    let ch = match args.kind {
        ChernKind::Idempotent => {
            let tol = args.idempotent_tol * (1.0 + matrix.norm_inf());
            ch_idempotent(&matrix, args.cap, &point, tol)?
        }
        ChernKind::Invertible => {
            let inverse = try_invert(&matrix, &point)?;
            ch_invertible(&matrix, &inverse, args.cap, &point)?
        }
    };
    io::write_json(&args.out, &io::periodic_to_dto(&ch))?;
    eprintln!(
        "wrote {} ({} components)",
        args.out.display(),
        ch.components().count()
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_winding(args: WindingArgs) -> nctorus::Result<ExitCode> {
    let theta = load_theta(&args.theta)?;
    let point = DeformationPoint::new(theta, args.t);
    let matrix = io::matrix_from_dto(&io::read_json(&args.matrix)?)?;
    let inverse = try_invert(&matrix, &point)?;
    let ch = ch_invertible(&matrix, &inverse, 1, &point)?;
    let value = pairing(&tau1(args.axis), &ch, &point)?;
    print_scalar(value);
    Ok(ExitCode::SUCCESS)
}

fn cmd_transport(args: TransportArgs) -> nctorus::Result<ExitCode> {
    let manifest: io::TransportManifest = io::read_json(&args.manifest)?;
    let theta = io::theta_from_dto(&manifest.theta)?;
    let (t0, t1) = (manifest.t0, manifest.t1);
    match &manifest.payload {
        io::TransportPayload::Chain(dto) => {
            let chain = io::chain_from_dto(dto)?;
            let max_r = chain
                .terms()
                .map(|(f, _)| r_poly(f, &theta).map(f64::abs))
                .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))?;
            let invariant = InvariantChain::new(chain)?;
            let moved = transport_chain(&invariant, t0, t1, &theta)?;
            eprintln!("max |R| over payload terms: {max_r:.6e}");
            io::write_json(&args.out, &io::chain_to_dto(moved.chain()))?;
        }
        io::TransportPayload::Functional(dto) => {
            let table = io::table_from_dto(dto)?;
            let max_r = table
                .entries()
                .map(|(f, _)| r_poly(f, &theta).map(f64::abs))
                .try_fold(0.0f64, |acc, r| r.map(|r| acc.max(r)))?;
            let moved = transport_table(&table, t0, t1, &theta)?;
            eprintln!("max |R| over payload entries: {max_r:.6e}");
            io::write_json(&args.out, &io::table_to_dto(&moved))?;
        }
        io::TransportPayload::Wedge(dto) => {
            let wedge = io::wedge_from_dto(dto)?;
            let moved = gm_transport_wedge(&wedge, t0, t1, &theta);
            let correction = moved
                .coefficients()
                .filter(|(axes, _)| wedge.coefficient(axes) == C64::new(0.0, 0.0))
                .map(|(axes, v)| format!("{axes:?} -> {:.6e}{:+.6e}i", v.re, v.im))
                .collect::<Vec<_>>()
                .join(", ");
            if !correction.is_empty() {
                eprintln!("new wedge components: {correction}");
            }
            io::write_json(&args.out, &io::wedge_to_dto(&moved))?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(args: VerifyArgs) -> nctorus::Result<ExitCode> {
    let cfg: SuiteConfig = match &args.config {
        Some(path) => io::read_json(path)?,
        None => SuiteConfig::default(),
    };
    let reports = if args.suite == "all" {
        run_all(&cfg)?
    } else {
        vec![run_suite(&args.suite, &cfg)?]
    };
    for report in &reports {
        print!("{report}");
    }
    if let Some(path) = &args.json {
        io::write_json(path, &reports)?;
    }
    let pass = reports.iter().all(|r| r.pass);
    if !pass {
        eprintln!(
            "available suites: {}",
            suite_names().join(", ")
        );
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn cmd_info(args: InfoArgs) -> nctorus::Result<ExitCode> {
    match io::detect(&args.file)? {
        io::FileKind::Element(dto) => {
            let e = io::element_from_dto(&dto)?;
            println!("element: n = {}, support = {}", e.dim(), e.support_size());
        }
        io::FileKind::Matrix(dto) => {
            let m = io::matrix_from_dto(&dto)?;
            println!("matrix: n = {}, size = {}", m.dim(), m.size());
            for i in 0..m.size() {
                let supports: Vec<String> = (0..m.size())
                    .map(|j| m.get(i, j).support_size().to_string())
                    .collect();
                println!("  row {i} entry supports: [{}]", supports.join(", "));
            }
        }
        io::FileKind::Theta(dto) => {
            let theta = io::theta_from_dto(&dto)?;
            println!("deformation matrix: n = {}", theta.dim());
            for row in theta.rows() {
                println!("  {row:?}");
            }
        }
        io::FileKind::Chain(dto) => {
            let c = io::chain_from_dto(&dto)?;
            println!(
                "chain: n = {}, degree = {}, terms = {}",
                c.dim(),
                c.degree(),
                c.num_terms()
            );
            print_deg_histogram(&c);
        }
        io::FileKind::Periodic(dto) => {
            let pc = io::periodic_from_dto(&dto)?;
            println!(
                "periodic chain: n = {}, parity = {:?}, cap = {}",
                pc.dim(),
                pc.parity(),
                pc.cap()
            );
            for (degree, c) in pc.components() {
                println!("  degree {degree}: {} terms", c.num_terms());
                print_deg_histogram(c);
            }
        }
        io::FileKind::Table(dto) => {
            let t = io::table_from_dto(&dto)?;
            println!(
                "functional table: n = {}, degree = {}, entries = {}",
                t.dim(),
                t.degree(),
                t.entries().count()
            );
        }
        io::FileKind::Wedge(dto) => {
            let w = io::wedge_from_dto(&dto)?;
            println!(
                "wedge class: n = {}, parity = {:?}, components = {}",
                w.dim(),
                w.parity(),
                w.coefficients().count()
            );
            for (axes, v) in w.coefficients() {
                println!("  {axes:?}: {:.6e}{:+.6e}i", v.re, v.im);
            }
        }
        io::FileKind::Manifest(m) => {
            println!(
                "transport manifest: t0 = {}, t1 = {}, object = {}",
                m.t0,
                m.t1,
                match m.payload {
                    io::TransportPayload::Chain(_) => "chain",
                    io::TransportPayload::Functional(_) => "functional",
                    io::TransportPayload::Wedge(_) => "wedge",
                }
            );
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_deg_histogram(c: &nctorus::chain::Chain) {
    use std::collections::BTreeMap;
    let mut histogram: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for (factors, _) in c.terms() {
        *histogram.entry(deg_profile(factors)).or_insert(0) += 1;
    }
    for (profile, count) in histogram {
        println!("    deg profile {profile:?}: {count} terms");
    }
}
