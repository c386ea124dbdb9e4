//! `hexameral`: build, verify, optimize and export hexameral domains.
//!
//! Exit status 1 means a parse error or a failed invariant, 2 an infeasible
//! optimization input; either way stderr gets one `error: <kind>: <message>`
//! line.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hexameral::chain::{assemble, closure_report, link_length, ChainParams, STRICT_CLOSURE_TOL};
use hexameral::domain::{smoothed_octagon, HexameralDomain};
use hexameral::hyperlink::sample_link_curves;
use hexameral::io::{svg_document, ChainFile, ResultSection};
use hexameral::multicurve::{convexity_value, rank_classify};
use hexameral::optimize::five_link::default_spec;
use hexameral::optimize::reduction::default_reduction_spec;
use hexameral::optimize::{five_link_decode, five_link_search, link_reduction_experiment, octagon_embedding};
use hexameral::sl2::star_check;
use hexameral::{GeometryError, HyperbolicIndex, LinkSpec};

#[derive(Parser)]
#[command(
    name = "hexameral",
    version,
    about = "Hexameral domains from chains of hyperbolic links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the smoothed octagon chain and print its density.
    Octagon {
        #[arg(short, long, default_value = "octagon.json")]
        output: PathBuf,
    },
    /// Print area, density, link length and closure residuals.
    Density {
        chain: PathBuf,
        /// Closure tolerance.
        #[arg(long, default_value_t = STRICT_CLOSURE_TOL)]
        tol: f64,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        chain: PathBuf,
        #[arg(long, default_value_t = STRICT_CLOSURE_TOL)]
        tol: f64,
        /// Samples per link for the sampled checks.
        #[arg(long, default_value_t = 64)]
        samples: usize,
    },
    /// Penalized search over closed five-link chains.
    FiveLink {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        /// Simplex evaluations per restart.
        #[arg(long, default_value_t = 4000)]
        max_evals: usize,
        /// Start every restart near the octagon instead of uniformly.
        #[arg(long)]
        from_octagon: bool,
        #[arg(long, default_value_t = 1e-3)]
        perturbation: f64,
        #[arg(long)]
        trace: bool,
        #[arg(short, long, default_value = "five_link.json")]
        output: PathBuf,
    },
    /// Replace a six-link segment by a five-link one of least area.
    ReduceLink {
        segment: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        restarts: usize,
        #[arg(short, long, default_value = "reduction.json")]
        output: PathBuf,
    },
    /// Export a closed chain as SVG or as JSON with area and density.
    Export {
        chain: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Svg)]
        format: Format,
        #[arg(long, default_value_t = STRICT_CLOSURE_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 64)]
        per_link: usize,
        /// Defaults to stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Svg,
    Json,
}

enum Failure {
    Parse(String),
    Invariant(String),
    Infeasible(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Infeasible(_) => 2,
            _ => 1,
        }
    }

    fn line(&self) -> String {
        let (kind, msg) = match self {
            Failure::Parse(m) => ("parse", m),
            Failure::Invariant(m) => ("invariant", m),
            Failure::Infeasible(m) => ("infeasible", m),
            Failure::Io(m) => ("io", m),
        };
        format!("error: {kind}: {}", msg.replace('\n', " "))
    }
}

impl From<GeometryError> for Failure {
    fn from(e: GeometryError) -> Self {
        match e {
            GeometryError::InfeasibleInput(_) => Failure::Infeasible(e.to_string()),
            _ => Failure::Invariant(e.to_string()),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read_file(path: &Path) -> Result<ChainFile, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))?;
    ChainFile::parse(&text).map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn read_chain(path: &Path) -> Result<ChainParams<f64>, Failure> {
    read_file(path)?
        .to_chain()
        .map_err(|e| Failure::Parse(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Outcome {
    fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display())))
}

/// `x` rounded to `digits` significant digits, in plain notation.
fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn domain_of(chain: &ChainParams<f64>, tol: f64) -> Result<HexameralDomain<f64>, Failure> {
    Ok(HexameralDomain::from_chain(chain, tol)?)
}

fn octagon(output: &Path) -> Outcome {
    let d = smoothed_octagon::<f64>();
    write_file(output, &ChainFile::from_domain(&d).to_json())?;
    println!("density {}", significant(d.density(), 12));
    println!("wrote {}", output.display());
    Ok(())
}

fn density(path: &Path, tol: f64) -> Outcome {
    let chain = read_chain(path)?;
    let report = closure_report(&chain)?;
    let d = domain_of(&chain, tol)?;
    let n = link_length(&chain, tol)?;
    println!("area {}", d.area());
    println!("density {}", d.density());
    println!("link_length {n}");
    println!("frame_residual {:e}", report.frame_residual);
    println!("tangent_residual {:e}", report.tangent_residual);
    Ok(())
}

struct Check {
    name: String,
    pass: bool,
    detail: String,
}

fn checks(chain: &ChainParams<f64>, tol: f64, samples: usize) -> Result<Vec<Check>, Failure> {
    let assembled = assemble(chain)?;
    let mut out = Vec::new();

    let mut star_ok = true;
    let mut star_min = f64::INFINITY;
    let mut states = vec![assembled.initial];
    for link in &assembled.links {
        let Some(placed) = link.geometry else { continue };
        if placed.rep.is_degenerate() {
            continue;
        }
        for t in placed.grid(samples).into_iter().skip(1) {
            states.push(placed.state_at(t)?);
        }
    }
    for s in &states {
        let x = s.pulled_back_tangent();
        star_ok &= star_check(&x) && s.satisfies_star();
        star_min = star_min.min(x.det());
    }
    out.push(Check {
        name: "star conditions".into(),
        pass: star_ok && star_min > 0.0,
        detail: format!("{} states, min -a^2-bc {star_min:.3e}", states.len()),
    });

    let mut convex_min = f64::INFINITY;
    let mut ranks = Vec::new();
    let mut rank_ok = true;
    for (i, link) in assembled.links.iter().enumerate() {
        let Some(placed) = link.geometry else { continue };
        if placed.rep.is_degenerate() {
            continue;
        }
        let curves = sample_link_curves(&placed, samples.max(10))?;
        for c in &curves {
            for s in c {
                convex_min = convex_min.min(convexity_value(s)? / s.velocity.norm_sq());
            }
        }
        match rank_classify(&curves) {
            Ok(r) => {
                rank_ok &= r.value() == 1;
                ranks.push(format!("{i}:{}", r.value()));
            }
            Err(e) => {
                rank_ok = false;
                ranks.push(format!("{i}:{e}"));
            }
        }
    }
    out.push(Check {
        name: "convexity".into(),
        pass: convex_min >= -1e-9,
        detail: format!("min scaled curvature {convex_min:.3e}"),
    });

    let report = closure_report(chain)?;
    out.push(Check {
        name: "closure".into(),
        pass: report.is_closed(tol),
        detail: format!(
            "frame {:.3e}, tangent {:.3e}, tol {tol:e}",
            report.frame_residual, report.tangent_residual
        ),
    });
    out.push(Check {
        name: "angle".into(),
        pass: report.angle_ok,
        detail: format!("margin {:.3e}", report.angle_margin),
    });
    out.push(Check {
        name: "rank per link".into(),
        pass: rank_ok && !ranks.is_empty(),
        detail: ranks.join(" "),
    });
    let (pass, detail) = match link_length(chain, tol) {
        Ok(n) => (true, format!("{n}")),
        Err(e) => (false, e.to_string()),
    };
    out.push(Check {
        name: "link length".into(),
        pass,
        detail,
    });
    Ok(out)
}

fn verify(path: &Path, tol: f64, samples: usize) -> Outcome {
    let chain = read_chain(path)?;
    let table = checks(&chain, tol, samples.max(2))?;
    let width = table.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &table {
        let status = if c.pass { "PASS" } else { "FAIL" };
        println!("{:<width$}  {status}  {}", c.name, c.detail);
    }
    let failed: Vec<&str> = table.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Invariant(format!("failed checks: {}", failed.join(", "))))
    }
}

#[allow(clippy::too_many_arguments)]
fn five_link(
    seed: u64,
    restarts: usize,
    max_evals: usize,
    from_octagon: bool,
    perturbation: f64,
    trace: bool,
    output: &Path,
) -> Outcome {
    let mut spec = default_spec(seed, restarts);
    spec.max_evals = max_evals;
    spec.record_trace = trace;
    if from_octagon {
        spec.start = Some(octagon_embedding());
        spec.perturbation = perturbation;
        spec.initial_step = 1e-2;
    }
    let result = five_link_search(&spec)?;
    let mut file = ChainFile::from_chain(&five_link_decode(&result.best_params));
    println!("best_density {}", result.best_density);
    println!("feasible {}", result.feasible);
    println!("restart {}", result.restart);
    println!("eval_count {}", result.eval_count);
    if let Some(c) = &result.closure {
        println!("frame_residual {:e}", c.frame_residual);
        println!("tangent_residual {:e}", c.tangent_residual);
    }
    file.spec = Some(spec);
    file.result = Some(ResultSection::Search(result));
    write_file(output, &file.to_json())?;
    println!("wrote {}", output.display());
    Ok(())
}

fn reduce_link(path: &Path, seed: u64, restarts: usize, output: &Path) -> Outcome {
    let segment = read_chain(path)?;
    let mut spec = default_reduction_spec(seed);
    spec.restarts = restarts;
    let report = link_reduction_experiment(&segment, &spec)?;
    let chain = match (&report.pattern, &report.taus) {
        (Some(pattern), Some(taus)) => {
            let links = pattern
                .iter()
                .zip(taus)
                .map(|(&j, &tau)| Ok(LinkSpec::new(tau, HyperbolicIndex::new(j as i64)?)))
                .collect::<Result<Vec<_>, GeometryError>>()?;
            ChainParams::new(segment.initial, links)
        }
        _ => segment,
    };
    println!("six_link_area {}", report.six_link_area);
    match report.five_link_area {
        Some(a) => println!("five_link_area {a}"),
        None => println!("five_link_area none"),
    }
    println!("decreased {}", report.decreased);
    let mut file = ChainFile::from_chain(&chain);
    file.spec = Some(spec);
    file.result = Some(ResultSection::Reduction(report));
    write_file(output, &file.to_json())?;
    println!("wrote {}", output.display());
    Ok(())
}

fn export(path: &Path, format: Format, tol: f64, per_link: usize, output: Option<&Path>) -> Outcome {
    let chain = read_chain(path)?;
    let d = domain_of(&chain, tol)?;
    let text = match format {
        Format::Json => ChainFile::from_domain(&d).to_json(),
        Format::Svg => svg_document(&d, per_link)?,
    };
    match output {
        Some(p) => write_file(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Octagon { output } => octagon(&output),
        Command::Density { chain, tol } => density(&chain, tol),
        Command::Verify { chain, tol, samples } => verify(&chain, tol, samples),
        Command::FiveLink {
            seed,
            restarts,
            max_evals,
            from_octagon,
            perturbation,
            trace,
            output,
        } => five_link(seed, restarts, max_evals, from_octagon, perturbation, trace, &output),
        Command::ReduceLink {
            segment,
            seed,
            restarts,
            output,
        } => reduce_link(&segment, seed, restarts, &output),
        Command::Export {
            chain,
            format,
            tol,
            per_link,
            output,
        } => export(&chain, format, tol, per_link, output.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("bad arguments")
                .trim_start_matches("error: ");
            eprintln!("{}", Failure::Parse(first.to_string()).line());
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.line());
            ExitCode::from(f.code())
        }
    }
}
