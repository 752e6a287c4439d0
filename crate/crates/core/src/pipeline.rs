//! End-to-end runs: building the signal source a configuration names,
//! driving SOAM or GWR over it, and rendering the output files.

use std::path::Path;

use crate::geometry::Point;
use crate::gwr::{covering_radius, Gwr, GwrParams};
use crate::io::{
    read_obj, read_off_lenient, read_points, read_snapshot, write_off_complex, write_telemetry, Report, RunConfig,
    SourceSpec, TelemetryFrame,
};
use crate::meshgen::{double_torus, icosphere, torus_grid, Mesh};
use crate::network::{IndexedComplex, Soam, SoamParams};
use crate::run::{run, StopReason, Termination};
use crate::sampling::{ParametricShape, SignalSource};
use crate::verify::{curve_topology, homeomorphic_closed_surfaces, surface_report, CellComplex, SurfaceReport};
use crate::{Error, ManifoldDim, Result};

/// Generated meshes addressable by name, alongside the parametric shapes.
pub const MESH_SHAPES: [&str; 3] = ["icosphere", "torus-mesh", "double-torus-mesh"];

/// Builds one of [`MESH_SHAPES`].
pub fn generated_mesh(name: &str) -> Option<Mesh> {
    match name {
        // 2562 vertices
        "icosphere" => Some(icosphere(4)),
        "torus-mesh" => Some(torus_grid(2.0, 1.0, 256, 128)),
        "double-torus-mesh" => Some(double_torus(1.0, 0.02)),
        _ => None,
    }
}

/// Contents of an input file: OFF, OBJ, or whitespace-separated points.
#[derive(Clone, Debug, PartialEq)]
pub struct InputData {
    pub vertices: Vec<Point>,
    pub segments: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl InputData {
    pub fn cells(&self) -> CellComplex {
        let mut c = CellComplex::from_edges(self.vertices.len(), &self.segments);
        c.triangles = self.triangles.clone();
        let mesh = Mesh { vertices: self.vertices.clone(), triangles: self.triangles.clone() };
        c.edges = merge_edges(&c.edges, &mesh.edges());
        c
    }
}

fn merge_edges(a: &[[usize; 2]], b: &[[usize; 2]]) -> Vec<[usize; 2]> {
    let mut all: Vec<[usize; 2]> = a.iter().chain(b).map(|&[x, y]| [x.min(y), x.max(y)]).collect();
    all.sort_unstable();
    all.dedup();
    all
}

pub fn parse_input(path: &str, text: &str) -> Result<InputData> {
    let ext = Path::new(path).extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    match ext.as_str() {
        "off" => {
            let d = read_off_lenient(text)?;
            Ok(InputData { vertices: d.vertices, segments: d.segments, triangles: d.triangles })
        }
        "obj" => {
            let m = read_obj(text)?;
            Ok(InputData { vertices: m.vertices, segments: Vec::new(), triangles: m.triangles })
        }
        _ => Ok(InputData { vertices: read_points(text)?, segments: Vec::new(), triangles: Vec::new() }),
    }
}

pub fn load_input(path: &str) -> Result<InputData> {
    let text = std::fs::read_to_string(path).map_err(|e| std::io::Error::new(e.kind(), format!("{path}: {e}")))?;
    parse_input(path, &text)
}

/// A signal source plus, for triangle meshes, the topology of the mesh itself.
pub struct OpenedSource {
    pub source: SignalSource,
    pub reference: Option<SurfaceReport>,
}

fn mesh_reference(triangles: &[[usize; 3]], vertices: usize, edges: Vec<[usize; 2]>) -> Option<SurfaceReport> {
    if triangles.is_empty() {
        return None;
    }
    let c = CellComplex { vertex_count: vertices, edges, triangles: triangles.to_vec() };
    Some(surface_report(&c))
}

/// The stream named by `cfg`, seeded with `seed`.
pub fn open_source(cfg: &RunConfig, seed: u64) -> Result<OpenedSource> {
    match &cfg.source {
        SourceSpec::Shape(name) => {
            if let Some(mesh) = generated_mesh(name) {
                let reference = mesh_reference(&mesh.triangles, mesh.vertices.len(), mesh.edges());
                let source = SignalSource::mesh_vertices(mesh.vertices, cfg.major, cfg.noise, seed)?;
                return Ok(OpenedSource { source, reference });
            }
            let shape = ParametricShape::by_name(name)?;
            Ok(OpenedSource { source: SignalSource::parametric(shape, cfg.major, cfg.noise, seed)?, reference: None })
        }
        SourceSpec::Input(path) => {
            let data = load_input(path)?;
            if data.vertices.len() < 2 {
                return Err(Error::TooFewPoints { needed: 2, found: data.vertices.len() });
            }
            let reference = mesh_reference(&data.triangles, data.vertices.len(), data.cells().edges);
            Ok(OpenedSource {
                source: SignalSource::mesh_vertices(data.vertices, cfg.major, cfg.noise, seed)?,
                reference,
            })
        }
    }
}

/// Everything a finished run produces.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub stop: StopReason,
    pub off: String,
    pub telemetry: String,
    pub report: Report,
    /// The final network, for snapshots. `None` for GWR runs.
    pub soam: Option<Soam>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.stop.exit_code()
    }
}

fn two_signals(src: &mut SignalSource) -> Result<(Point, Point)> {
    match (src.next_signal(), src.next_signal()) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(Error::TooFewPoints { needed: 2, found: 0 }),
    }
}

fn push_topology(report: &mut Report, c: &IndexedComplex, dim: ManifoldDim, reference: Option<&SurfaceReport>) {
    let cells = CellComplex::from_indexed(c);
    match dim {
        ManifoldDim::Curve => {
            let t = curve_topology(&cells);
            report.extend_from_text("", &t.to_string());
            report.push("single_cycle", t.is_single_cycle());
        }
        ManifoldDim::Surface => {
            let s = surface_report(&cells);
            report.extend_from_text("", &s.to_string());
            if let Some(r) = reference {
                report.push("reference_euler", r.euler);
                let verdict = homeomorphic_closed_surfaces(&s, r).map_or("undefined".to_string(), |h| h.to_string());
                report.push("homeomorphic", verdict);
            }
        }
    }
}

fn push_config(report: &mut Report, cfg: &RunConfig) {
    report.extend_from_text("config.", &cfg.to_text());
}

/// Runs SOAM as configured. With `resume`, the network continues from a
/// snapshot and the source skips the signals the snapshot already saw, so
/// the result equals an uninterrupted run.
pub fn reconstruct(cfg: &RunConfig, resume: Option<&str>) -> Result<Outcome> {
    cfg.validate()?;
    let opened = open_source(cfg, cfg.params.seed)?;
    let mut src = opened.source;
    let (a, b) = two_signals(&mut src)?;
    let mut soam = match resume {
        None => Soam::new(cfg.params.clone(), a, b)?,
        Some(text) => {
            let mut soam = read_snapshot(text)?;
            check_resumable(soam.params(), &cfg.params)?;
            soam.set_limits(cfg.params.max_signals, cfg.params.stability_window);
            for _ in 0..soam.signals() {
                src.next_signal().ok_or(Error::Snapshot("source ended before the snapshot point".into()))?;
            }
            soam
        }
    };
    if soam.dim() != src.dim() {
        return Err(Error::DimensionMismatch { expected: soam.dim(), found: src.dim() });
    }
    let term = Termination {
        max_signals: cfg.params.max_signals,
        stability_window: cfg.params.stability_window,
        telemetry_interval: cfg.telemetry_interval,
    };
    let r = run(&mut soam, &mut src, &term)?;
    let dim = cfg.params.manifold_dim;

    let mut report = Report::new();
    report.push("algo", "soam");
    report.push("stop", r.stop);
    report.push("signals", r.signals);
    let counters = soam.counters();
    report.push("insertions", counters.insertions);
    report.push("merges", counters.merges);
    report.push("edges_pruned", counters.edges_pruned);
    report.push("units_pruned", counters.units_pruned);
    report.push("reseeds", counters.reseeds);
    if let Some(last) = r.telemetry.last() {
        report.push("singular", last.count(crate::UnitState::Singular));
        report.push("patch", last.count(crate::UnitState::Patch));
    }
    push_topology(&mut report, &r.complex, dim, opened.reference.as_ref());
    push_config(&mut report, cfg);

    Ok(Outcome {
        stop: r.stop,
        off: write_off_complex(&r.complex, dim),
        telemetry: write_telemetry(&r.telemetry),
        report,
        soam: Some(soam),
    })
}

/// A snapshot may be resumed under a different signal budget or window, but
/// not with different dynamics.
fn check_resumable(snap: &SoamParams, cfg: &SoamParams) -> Result<()> {
    let relaxed = SoamParams { max_signals: snap.max_signals, stability_window: snap.stability_window, ..cfg.clone() };
    if &relaxed == snap {
        Ok(())
    } else {
        Err(Error::Snapshot("snapshot parameters differ from the configuration".into()))
    }
}

/// GWR parameters sharing the SOAM constants; the insertion radius is `R`.
pub fn gwr_params(p: &SoamParams) -> GwrParams {
    GwrParams {
        radius: p.r_max,
        firing_max: p.firing_max,
        habituation_threshold: p.habituation_threshold,
        alpha_h: p.alpha_h,
        tau_f: p.tau_f,
        tau_f_n: p.tau_f_n,
        max_age: p.max_age,
        eta_b: p.eta_b,
        eta_nb: p.eta_nb,
    }
}

/// Held-out points for the covering check.
pub const COVERING_SAMPLES: usize = 2000;

/// Runs the GWR baseline. It has no unit states, so it stops once no unit
/// was inserted for a whole stability window.
pub fn run_gwr(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let params = gwr_params(&cfg.params);
    let mut src = open_source(cfg, cfg.params.seed)?.source;
    let (a, b) = two_signals(&mut src)?;
    let mut g = Gwr::new(params, a, b)?;
    let interval = cfg.telemetry_interval;
    let mut frames = Vec::new();
    let mut quiet = 0u64;
    let stop = loop {
        if quiet >= cfg.params.stability_window {
            break StopReason::Stable;
        }
        if g.signals() >= cfg.params.max_signals {
            break StopReason::MaxSignals;
        }
        let Some(xi) = src.next_signal() else { break StopReason::SourceExhausted };
        let ev = g.gwr_step(&xi)?;
        quiet = if ev.unit_inserted.is_some() { 0 } else { quiet + 1 };
        if g.signals() % interval == 0 {
            frames.push(gwr_frame(&g));
        }
    };
    if g.signals() > 0 && g.signals() % interval != 0 {
        frames.push(gwr_frame(&g));
    }

    let held_out = open_source(cfg, cfg.params.seed.wrapping_add(1))?.source.take_signals(COVERING_SAMPLES);
    let cover = covering_radius(&g, &held_out);
    let complex = g.to_indexed();
    let dim = cfg.params.manifold_dim;
    let mut report = Report::new();
    report.push("algo", "gwr");
    report.push("stop", stop);
    report.push("signals", g.signals());
    report.push("insertions", g.insertions());
    report.push_real("covering_radius", cover);
    report.push_real("insertion_radius", g.params().radius);
    report.push("covering_ok", cover <= g.params().radius);
    push_topology(&mut report, &complex, dim, None);
    push_config(&mut report, cfg);
    Ok(Outcome { stop, off: write_off_complex(&complex, dim), telemetry: write_telemetry(&frames), report, soam: None })
}

// GWR units are either active or habituated; the other state columns stay 0.
fn gwr_frame(g: &Gwr) -> TelemetryFrame {
    let habituated = g.positions().filter(|&(id, _)| g.firing(id).unwrap() <= g.params().habituation_threshold).count();
    let mut states = [0; 8];
    states[0] = g.unit_count() - habituated;
    states[1] = habituated;
    TelemetryFrame {
        signal: g.signals(),
        states,
        units: g.unit_count(),
        edges: g.complex().edge_count(),
        triangles: g.complex().triangle_count(),
        insertions: g.insertions(),
        merges: 0,
        prunes: 0,
    }
}

/// Runs whichever algorithm `cfg.algo` names.
pub fn run_configured(cfg: &RunConfig, resume: Option<&str>) -> Result<Outcome> {
    match cfg.algo.as_str() {
        "gwr" if resume.is_some() => Err(Error::Unsupported("resume is only available for soam".into())),
        "gwr" => run_gwr(cfg),
        _ => reconstruct(cfg, resume),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle_cfg(seed: u64) -> RunConfig {
        let mut cfg = RunConfig {
            params: SoamParams { seed, max_signals: 500_000, ..SoamParams::for_dim(ManifoldDim::Curve) },
            source: SourceSpec::Shape("circle".into()),
            ..RunConfig::default()
        };
        cfg.telemetry_interval = 5000;
        cfg
    }

    #[test]
    fn circle_run_reports_a_cycle() {
        let out = reconstruct(&circle_cfg(7), None).unwrap();
        assert_eq!(out.stop, StopReason::Stable);
        assert_eq!(out.report.get("cycles"), Some("1"));
        assert_eq!(out.report.get("single_cycle"), Some("true"));
        assert_eq!(out.report.get("config.seed"), Some("7"));
        assert!(out.off.starts_with("OFF"));
    }

    #[test]
    fn resume_matches_uninterrupted() {
        let full = reconstruct(&circle_cfg(3), None).unwrap();
        let mut short = circle_cfg(3);
        short.params.max_signals = 12_345;
        let first = reconstruct(&short, None).unwrap();
        let snap = crate::io::write_snapshot(first.soam.as_ref().unwrap());
        let rest = reconstruct(&circle_cfg(3), Some(&snap)).unwrap();
        assert_eq!(rest.off, full.off);
        assert_eq!(
            crate::io::write_snapshot(rest.soam.as_ref().unwrap()),
            crate::io::write_snapshot(full.soam.as_ref().unwrap())
        );
    }

    #[test]
    fn resume_rejects_other_dynamics() {
        let mut short = circle_cfg(3);
        short.params.max_signals = 1000;
        let snap = crate::io::write_snapshot(reconstruct(&short, None).unwrap().soam.as_ref().unwrap());
        let mut other = circle_cfg(3);
        other.params.eta_b = 0.1;
        assert!(matches!(reconstruct(&other, Some(&snap)), Err(Error::Snapshot(_))));
    }

    #[test]
    fn gwr_circle_covers() {
        let mut cfg = circle_cfg(2);
        cfg.algo = "gwr".into();
        cfg.params.max_signals = 200_000;
        let out = run_configured(&cfg, None).unwrap();
        assert_eq!(out.report.get("covering_ok"), Some("true"));
        assert_eq!(out.report.get("algo"), Some("gwr"));
    }

    #[test]
    fn input_formats_by_extension() {
        let off = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
        let d = parse_input("a.OFF", off).unwrap();
        assert_eq!(d.triangles, vec![[0, 1, 2]]);
        assert_eq!(d.cells().edges.len(), 3);
        let d = parse_input("pts.txt", "0 0\n1 1\n").unwrap();
        assert_eq!(d.vertices.len(), 2);
        let d = parse_input("m.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n").unwrap();
        assert_eq!(d.triangles.len(), 1);
    }

    #[test]
    fn generated_meshes_are_closed() {
        for name in MESH_SHAPES {
            let m = generated_mesh(name).unwrap();
            let r = surface_report(&CellComplex::from_mesh(&m));
            assert!(r.is_closed_connected(), "{name}");
        }
    }
}
