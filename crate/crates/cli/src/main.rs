//! `soam`: reconstruction runs, topology checks, sampling and oracles.
//!
//! Exit codes: 0 stable or verdict delivered, 1 error, 2 no convergence
//! within the signal budget, 3 non-manifold input to `verify`.

use std::fs;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use soam::io::{write_points, write_snapshot, RunConfig, SourceSpec};
use soam::pipeline::{self, load_input, Outcome};
use soam::sampling::rng_from_seed;
use soam::verify::{
    brute_force_delaunay, cocircular_witness_counts, curve_topology, homeomorphic_closed_surfaces,
    restricted_witness_graph, surface_report, uniform_witness_graph, CellComplex,
};
use soam::{BoundingBox, ManifoldDim, Point};

const DEFAULTS: &str = include_str!("../defaults.conf");

const EXIT_ERROR: u8 = 1;
const EXIT_NON_MANIFOLD: u8 = 3;

#[derive(Parser)]
#[command(name = "soam", version, about = "Self-organizing adaptive map: topology-aware reconstruction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a curve or surface from a mesh, point file or named shape.
    Reconstruct(ReconstructArgs),
    /// Report the topology of an OFF/OBJ complex, optionally against another.
    Verify(VerifyArgs),
    /// Write points drawn from a source.
    Sample(SampleArgs),
    /// Witness and Delaunay graphs of small planar point sets.
    Oracle(OracleArgs),
    /// Run SOAM, the GWR baseline, or both on the same stream.
    Compare(CompareArgs),
}

#[derive(Args, Debug, Default)]
struct RunFlags {
    /// key=value configuration file applied over the built-in defaults.
    #[arg(long)]
    config: Option<String>,
    /// OFF, OBJ or point file whose vertices are sampled.
    #[arg(long, conflicts_with = "shape")]
    input: Option<String>,
    /// Parametric shape (circle, sphere, torus, helix, klein, double-torus) or
    /// generated mesh (icosphere, torus-mesh, double-torus-mesh).
    #[arg(long)]
    shape: Option<String>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    dim: Option<u32>,
    /// Radius of the uniform noise ball, after rescaling.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, env = "SOAM_SEED")]
    seed: Option<u64>,
    #[arg(long)]
    max_signals: Option<u64>,
    #[arg(long)]
    telemetry_interval: Option<u64>,
    /// Output prefix.
    #[arg(long)]
    out: Option<String>,
    /// Any configuration key, e.g. --set r_max=6. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl RunFlags {
    fn config(&self) -> Result<RunConfig, String> {
        let mut cfg = RunConfig::parse(DEFAULTS).map_err(|e| format!("built-in defaults: {e}"))?;
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            cfg.apply_text(&text).map_err(|e| format!("{path}: {e}"))?;
        }
        let mut set = |k: &str, v: String| cfg.set(k, &v).map_err(|e| e.to_string());
        if let Some(v) = &self.input {
            set("input", v.clone())?;
        }
        if let Some(v) = &self.shape {
            set("shape", v.clone())?;
        }
        if let Some(v) = self.dim {
            set("dim", v.to_string())?;
        }
        if let Some(v) = self.noise {
            set("noise", v.to_string())?;
        }
        if let Some(v) = self.seed {
            set("seed", v.to_string())?;
        }
        if let Some(v) = self.max_signals {
            set("max_signals", v.to_string())?;
        }
        if let Some(v) = self.telemetry_interval {
            set("telemetry_interval", v.to_string())?;
        }
        if let Some(v) = &self.out {
            set("out", v.clone())?;
        }
        for kv in &self.overrides {
            let (k, v) = kv.split_once('=').ok_or_else(|| format!("--set expects KEY=VALUE, got '{kv}'"))?;
            set(k.trim(), v.trim().to_string())?;
        }
        cfg.validate().map_err(|e| e.to_string())?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    run: RunFlags,
    /// Also write the final network state here.
    #[arg(long)]
    snapshot: Option<String>,
    /// Continue from a snapshot taken with the same configuration.
    #[arg(long)]
    resume: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    input: String,
    /// Reference surface for the homeomorphism verdict.
    #[arg(long)]
    against: Option<String>,
    /// Treat the input as a curve (1) or surface (2). Default: surface when
    /// it has triangles.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=2))]
    dim: Option<u32>,
}

#[derive(Args)]
struct SampleArgs {
    #[arg(long, conflicts_with = "input", required_unless_present = "input")]
    shape: Option<String>,
    #[arg(long)]
    input: Option<String>,
    #[arg(long, default_value_t = 1000)]
    count: usize,
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    #[arg(long, env = "SOAM_SEED", default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = soam::sampling::DEFAULT_MAJOR)]
    major: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
#[command(group = clap::ArgGroup::new("mode").required(true).args(["points", "restricted", "cocircular"]))]
struct OracleArgs {
    /// Planar landmark file, one point per line.
    #[arg(long)]
    points: Option<String>,
    /// Landmarks and witnesses drawn from this parametric shape.
    #[arg(long)]
    restricted: Option<String>,
    /// Four points homotoped towards a common circle.
    #[arg(long)]
    cocircular: bool,
    #[arg(long, default_value_t = 1_000_000)]
    witnesses: usize,
    /// Landmark count for --restricted.
    #[arg(long, default_value_t = 40)]
    landmarks: usize,
    /// Homotopy steps for --cocircular.
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, env = "SOAM_SEED", default_value_t = 1)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Soam,
    Gwr,
    Both,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum, default_value_t = Algo::Both)]
    algo: Algo,
    #[command(flatten)]
    run: RunFlags,
}

fn main() -> ExitCode {
    // usage errors exit 1; clap's own code 2 means non-convergence here
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Reconstruct(a) => reconstruct(a),
        Command::Verify(a) => verify(a),
        Command::Sample(a) => sample(a),
        Command::Oracle(a) => oracle(a),
        Command::Compare(a) => compare(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn write(path: &str, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("{path}: {e}"))
}

fn write_outputs(prefix: &str, out: &Outcome) -> Result<(), String> {
    write(&format!("{prefix}.off"), &out.off)?;
    write(&format!("{prefix}.telemetry.csv"), &out.telemetry)?;
    write(&format!("{prefix}.report.txt"), &out.report.to_text())
}

fn reconstruct(a: ReconstructArgs) -> Result<u8, String> {
    let mut cfg = a.run.config()?;
    cfg.algo = "soam".into();
    let resume = match &a.resume {
        Some(path) => Some(fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?),
        None => None,
    };
    let out = pipeline::reconstruct(&cfg, resume.as_deref()).map_err(|e| e.to_string())?;
    write_outputs(&cfg.out, &out)?;
    if let (Some(path), Some(soam)) = (&a.snapshot, &out.soam) {
        write(path, &write_snapshot(soam))?;
    }
    print!("{}", out.report.to_text());
    Ok(out.exit_code() as u8)
}

fn cells_of(path: &str) -> Result<CellComplex, String> {
    Ok(load_input(path).map_err(|e| e.to_string())?.cells())
}

fn verify(a: VerifyArgs) -> Result<u8, String> {
    let c = cells_of(&a.input)?;
    let dim = match a.dim {
        Some(d) => ManifoldDim::from_int(d).map_err(|e| e.to_string())?,
        None if c.triangles.is_empty() => ManifoldDim::Curve,
        None => ManifoldDim::Surface,
    };
    if dim == ManifoldDim::Curve {
        let t = curve_topology(&c);
        print!("{t}");
        println!("single_cycle={}", t.is_single_cycle());
        return Ok(0);
    }
    let r = surface_report(&c);
    print!("{r}");
    if r.non_manifold {
        println!("verdict=non-manifold");
        return Ok(EXIT_NON_MANIFOLD);
    }
    if let Some(other) = &a.against {
        let o = surface_report(&cells_of(other)?);
        if o.non_manifold {
            println!("verdict=non-manifold");
            return Ok(EXIT_NON_MANIFOLD);
        }
        println!("against_euler={}", o.euler);
        match homeomorphic_closed_surfaces(&r, &o) {
            Ok(h) => println!("homeomorphic={h}"),
            Err(_) => println!("homeomorphic=undefined"),
        }
    }
    Ok(0)
}

fn sample(a: SampleArgs) -> Result<u8, String> {
    let mut cfg = RunConfig { noise: a.noise, major: a.major, ..RunConfig::default() };
    cfg.source = match (a.shape, a.input) {
        (Some(s), _) => SourceSpec::Shape(s),
        (None, Some(p)) => SourceSpec::Input(p),
        (None, None) => unreachable!("clap requires one source"),
    };
    let mut src = pipeline::open_source(&cfg, a.seed).map_err(|e| e.to_string())?.source;
    let text = write_points(&src.take_signals(a.count));
    match a.out {
        Some(path) => write(&path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn edge_list(edges: impl IntoIterator<Item = (usize, usize)>) -> String {
    edges.into_iter().map(|(a, b)| format!("{a}-{b}")).collect::<Vec<_>>().join(" ")
}

fn oracle(a: OracleArgs) -> Result<u8, String> {
    let mut rng = rng_from_seed(a.seed);
    if a.cocircular {
        let counts = cocircular_witness_counts(a.steps, a.witnesses, &mut rng).map_err(|e| e.to_string())?;
        for (t, n) in &counts {
            println!("t={} middle_edge_witnesses={n}", soam::io::fmt_real(*t));
        }
        let monotone = counts.windows(2).all(|w| w[1].1 <= w[0].1);
        println!("non_increasing={monotone}");
        println!("vanishes={}", counts.last().is_some_and(|c| c.1 == 0));
        return Ok(0);
    }
    if let Some(name) = &a.restricted {
        let shape = soam::sampling::ParametricShape::by_name(name).map_err(|e| e.to_string())?;
        let landmarks: Vec<Point> = (0..a.landmarks).map(|_| shape.sample(&mut rng)).collect();
        let g = restricted_witness_graph(&landmarks, &shape, a.witnesses, &mut rng).map_err(|e| e.to_string())?;
        println!("landmarks={}", landmarks.len());
        println!("witness_edges={}", edge_list(g.edges()));
        let edges: Vec<[usize; 2]> = g.edges().into_iter().map(|(x, y)| [x, y]).collect();
        let c = CellComplex::from_edges(landmarks.len(), &edges);
        if shape.manifold_dim() == 1 {
            let t = curve_topology(&c);
            print!("{t}");
        }
        if shape.dim() == 2 {
            let d = brute_force_delaunay(&landmarks).map_err(|e| e.to_string())?;
            let subset = g.edges().iter().all(|e| d.edges.contains(e) || d.degenerate.contains(e));
            println!("subset_of_delaunay={subset}");
        }
        return Ok(0);
    }
    let path = a.points.as_deref().expect("clap requires a mode");
    let landmarks = load_input(path).map_err(|e| e.to_string())?.vertices;
    if landmarks.len() < 2 {
        return Err(format!("{path}: need at least 2 points, got {}", landmarks.len()));
    }
    let d = brute_force_delaunay(&landmarks).map_err(|e| e.to_string())?;
    let bbox = BoundingBox::of(&landmarks).map_err(|e| e.to_string())?;
    let g = uniform_witness_graph(&landmarks, &bbox, a.witnesses, &mut rng).map_err(|e| e.to_string())?;
    let subset = g.edges().iter().all(|e| d.edges.contains(e) || d.degenerate.contains(e));
    println!("witness_edges={}", edge_list(g.edges()));
    println!("delaunay_edges={}", edge_list(d.edges.iter().copied()));
    println!("degenerate_edges={}", edge_list(d.degenerate.iter().copied()));
    println!("degenerate={}", d.is_degenerate());
    println!("subset={subset}");
    Ok(0)
}

fn compare(a: CompareArgs) -> Result<u8, String> {
    let base = a.run.config()?;
    let algos: &[&str] = match a.algo {
        Algo::Soam => &["soam"],
        Algo::Gwr => &["gwr"],
        Algo::Both => &["soam", "gwr"],
    };
    let mut code = 0;
    let mut rows = Vec::new();
    for &algo in algos {
        let mut cfg = base.clone();
        cfg.algo = algo.into();
        let out = pipeline::run_configured(&cfg, None).map_err(|e| e.to_string())?;
        let prefix = if algos.len() > 1 { format!("{}.{algo}", cfg.out) } else { cfg.out.clone() };
        write_outputs(&prefix, &out)?;
        code = code.max(out.exit_code() as u8);
        rows.push((algo, out));
    }
    if rows.len() == 1 {
        print!("{}", rows[0].1.report.to_text());
        return Ok(code);
    }
    let keys = ["stop", "signals", "insertions", "vertices", "edges", "faces", "euler", "cycles", "covering_ok"];
    println!("{:<14}{:>14}{:>14}", "", rows[0].0, rows[1].0);
    for k in keys {
        let cell = |o: &Outcome| o.report.get(k).unwrap_or("-").to_string();
        if rows.iter().any(|(_, o)| o.report.get(k).is_some()) {
            println!("{:<14}{:>14}{:>14}", k, cell(&rows[0].1), cell(&rows[1].1));
        }
    }
    Ok(code)
}
