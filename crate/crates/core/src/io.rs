//! Text formats: OFF and OBJ meshes, point streams, run configuration,
//! telemetry CSV, snapshots and key=value reports.
//!
//! Every writer is deterministic. Snapshots and meshes print reals in the
//! shortest form that parses back to the same `f64`; reports round to nine
//! significant digits.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::geometry::Point;
use crate::meshgen::Mesh;
use crate::network::{Counters, IndexedComplex, Soam, SoamParams, Unit, UnitState};
use crate::{Error, ManifoldDim, Result, UnitId};

fn parse(line: usize, msg: impl Into<String>) -> Error {
    Error::parse(line, msg)
}

/// Rounds to nine significant digits and prints the shortest form of the result.
pub fn fmt_real(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{}", if x == 0.0 { 0.0 } else { x });
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("formatted float");
    format!("{rounded}")
}

/// Non-empty lines with comments stripped, paired with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn num<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse(line, format!("missing {what}")))?;
    tok.parse().map_err(|_| parse(line, format!("invalid {what} '{tok}'")))
}

fn point_from_tokens<'a>(toks: impl Iterator<Item = &'a str>, line: usize) -> Result<Point> {
    let coords: Vec<f64> = toks
        .map(|t| t.parse::<f64>().map_err(|_| parse(line, format!("invalid coordinate '{t}'"))))
        .collect::<Result<_>>()?;
    Point::new(&coords).map_err(|e| parse(line, e.to_string()))
}

/// A mesh whose faces may be triangles or, for curves, segments.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct OffData {
    pub vertices: Vec<Point>,
    pub segments: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

fn parse_off(text: &str, allow_segments: bool) -> Result<OffData> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse(1, "empty file"))?;
    let mut toks: Vec<&str> = header.split_whitespace().collect();
    if toks.first() != Some(&"OFF") {
        return Err(parse(hl, "expected OFF header"));
    }
    toks.remove(0);
    let (cl, counts) = if toks.is_empty() {
        let (l, s) = lines.next().ok_or_else(|| parse(hl, "missing counts line"))?;
        (l, s.split_whitespace().collect::<Vec<_>>())
    } else {
        (hl, toks)
    };
    if counts.len() != 3 {
        return Err(parse(cl, "counts line must be 'V F E'"));
    }
    let mut it = counts.into_iter();
    let nv: usize = num(it.next(), cl, "vertex count")?;
    let nf: usize = num(it.next(), cl, "face count")?;
    let _: usize = num(it.next(), cl, "edge count")?;

    let mut out = OffData::default();
    for _ in 0..nv {
        let (l, s) = lines.next().ok_or_else(|| parse(cl, "fewer vertex lines than declared"))?;
        let p = point_from_tokens(s.split_whitespace(), l)?;
        if let Some(first) = out.vertices.first() {
            if first.dim() != p.dim() {
                return Err(parse(l, "vertex dimension differs from the first vertex"));
            }
        }
        out.vertices.push(p);
    }
    for _ in 0..nf {
        let (l, s) = lines.next().ok_or_else(|| parse(cl, "fewer face lines than declared"))?;
        let mut toks = s.split_whitespace();
        let k: usize = num(toks.next(), l, "face size")?;
        let idx: Vec<usize> = (0..k).map(|_| num(toks.next(), l, "vertex index")).collect::<Result<_>>()?;
        if let Some(&bad) = idx.iter().find(|&&i| i >= nv) {
            return Err(parse(l, format!("vertex index {bad} out of range")));
        }
        match (k, allow_segments) {
            (3, _) => out.triangles.push([idx[0], idx[1], idx[2]]),
            (2, true) => out.segments.push([idx[0], idx[1]]),
            _ => return Err(parse(l, format!("face with {k} vertices; only triangles are accepted"))),
        }
    }
    if let Some((l, _)) = lines.next() {
        return Err(parse(l, "trailing data after the declared faces"));
    }
    Ok(out)
}

/// Strict OFF reader: triangles only.
pub fn read_off(text: &str) -> Result<Mesh> {
    let d = parse_off(text, false)?;
    Ok(Mesh { vertices: d.vertices, triangles: d.triangles })
}

/// OFF reader that also accepts two-vertex faces, as written for curves.
pub fn read_off_lenient(text: &str) -> Result<OffData> {
    parse_off(text, true)
}

fn push_off(out: &mut String, vertices: &[Point], segments: &[[usize; 2]], triangles: &[[usize; 3]]) {
    let edges: BTreeSet<[usize; 2]> = triangles
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]])
        .chain(segments.iter().copied())
        .map(|[a, b]| [a.min(b), a.max(b)])
        .collect();
    let _ = writeln!(out, "OFF");
    let _ = writeln!(out, "{} {} {}", vertices.len(), segments.len() + triangles.len(), edges.len());
    for v in vertices {
        let coords: Vec<String> = v.coords().iter().map(|c| format!("{c}")).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    for s in segments {
        let _ = writeln!(out, "2 {} {}", s[0], s[1]);
    }
    for t in triangles {
        let _ = writeln!(out, "3 {} {} {}", t[0], t[1], t[2]);
    }
}

pub fn write_off(mesh: &Mesh) -> String {
    let mut out = String::new();
    push_off(&mut out, &mesh.vertices, &[], &mesh.triangles);
    out
}

/// Writes a network snapshot. Curves keep their edges as two-vertex faces;
/// surfaces keep their triangles, and edges not covered by any triangle are
/// written as two-vertex faces as well.
pub fn write_off_complex(c: &IndexedComplex, dim: ManifoldDim) -> String {
    let mut out = String::new();
    let covered: BTreeSet<[usize; 2]> = c
        .triangles
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]])
        .map(|[a, b]| [a.min(b), a.max(b)])
        .collect();
    let (segments, triangles): (Vec<[usize; 2]>, &[[usize; 3]]) = match dim {
        ManifoldDim::Curve => (c.edges.clone(), &[]),
        ManifoldDim::Surface => (c.edges.iter().copied().filter(|e| !covered.contains(e)).collect(), &c.triangles),
    };
    push_off(&mut out, &c.positions, &segments, triangles);
    out
}

/// OBJ reader: `v` and triangular `f` lines, 1-based indices, `a/b/c`
/// index groups allowed. Other records are ignored.
pub fn read_obj(text: &str) -> Result<Mesh> {
    let mut mesh = Mesh::default();
    let mut faces = Vec::new();
    for (l, s) in content_lines(text) {
        let mut toks = s.split_whitespace();
        match toks.next() {
            Some("v") => mesh.vertices.push(point_from_tokens(toks, l)?),
            Some("f") => {
                let idx: Vec<usize> = toks
                    .map(|t| {
                        let first = t.split('/').next().unwrap_or("");
                        match first.parse::<usize>() {
                            Ok(i) if i >= 1 => Ok(i - 1),
                            _ => Err(parse(l, format!("invalid face index '{t}'"))),
                        }
                    })
                    .collect::<Result<_>>()?;
                if idx.len() != 3 {
                    return Err(parse(l, format!("face with {} vertices; only triangles are accepted", idx.len())));
                }
                faces.push((l, [idx[0], idx[1], idx[2]]));
            }
            _ => {}
        }
    }
    for (l, f) in faces {
        if let Some(&bad) = f.iter().find(|&&i| i >= mesh.vertices.len()) {
            return Err(parse(l, format!("vertex index {} out of range", bad + 1)));
        }
        mesh.triangles.push(f);
    }
    Ok(mesh)
}

/// Reads whitespace-separated points, one per line, all of one dimension.
pub fn read_points(text: &str) -> Result<Vec<Point>> {
    let mut out: Vec<Point> = Vec::new();
    for (l, s) in content_lines(text) {
        let p = point_from_tokens(s.split_whitespace(), l)?;
        if let Some(first) = out.first() {
            if first.dim() != p.dim() {
                return Err(parse(l, format!("expected {} coordinates, found {}", first.dim(), p.dim())));
            }
        }
        out.push(p);
    }
    Ok(out)
}

pub fn write_points(points: &[Point]) -> String {
    let mut out = String::new();
    for p in points {
        let coords: Vec<String> = p.coords().iter().map(|c| format!("{c}")).collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    out
}

const PARAM_KEYS: [&str; 19] = [
    "dim",
    "firing_max",
    "habituation_threshold",
    "alpha_h",
    "tau_f",
    "tau_f_n",
    "r_max",
    "r_min",
    "alpha_r",
    "tau_r_hab",
    "tau_r_dis",
    "max_age",
    "eta_b",
    "eta_nb",
    "eta_stable",
    "seed",
    "max_signals",
    "stability_window",
    "idle_limit",
];

/// The parameters as `(key, value)` pairs, reals in round-trip form.
pub fn params_to_pairs(p: &SoamParams) -> Vec<(&'static str, String)> {
    let r = |x: f64| format!("{x}");
    vec![
        ("dim", p.manifold_dim.as_int().to_string()),
        ("firing_max", r(p.firing_max)),
        ("habituation_threshold", r(p.habituation_threshold)),
        ("alpha_h", r(p.alpha_h)),
        ("tau_f", r(p.tau_f)),
        ("tau_f_n", r(p.tau_f_n)),
        ("r_max", r(p.r_max)),
        ("r_min", r(p.r_min)),
        ("alpha_r", p.alpha_r.map_or_else(|| "auto".to_string(), r)),
        ("tau_r_hab", r(p.tau_r_hab)),
        ("tau_r_dis", r(p.tau_r_dis)),
        ("max_age", p.max_age.to_string()),
        ("eta_b", r(p.eta_b)),
        ("eta_nb", r(p.eta_nb)),
        ("eta_stable", r(p.eta_stable)),
        ("seed", p.seed.to_string()),
        ("max_signals", p.max_signals.to_string()),
        ("stability_window", p.stability_window.to_string()),
        ("idle_limit", p.idle_limit.to_string()),
    ]
}

fn value<T: FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::InvalidParams(format!("invalid value '{v}' for {key}")))
}

/// Sets one parameter by key. Returns `false` for keys that are not parameters.
pub fn set_param(p: &mut SoamParams, key: &str, v: &str) -> Result<bool> {
    match key {
        "dim" => p.manifold_dim = ManifoldDim::from_int(value(key, v)?)?,
        "firing_max" => p.firing_max = value(key, v)?,
        "habituation_threshold" => p.habituation_threshold = value(key, v)?,
        "alpha_h" => p.alpha_h = value(key, v)?,
        "tau_f" => p.tau_f = value(key, v)?,
        "tau_f_n" => p.tau_f_n = value(key, v)?,
        "r_max" => p.r_max = value(key, v)?,
        "r_min" => p.r_min = value(key, v)?,
        "alpha_r" => p.alpha_r = if v == "auto" { None } else { Some(value(key, v)?) },
        "tau_r_hab" => p.tau_r_hab = value(key, v)?,
        "tau_r_dis" => p.tau_r_dis = value(key, v)?,
        "max_age" => p.max_age = value(key, v)?,
        "eta_b" => p.eta_b = value(key, v)?,
        "eta_nb" => p.eta_nb = value(key, v)?,
        "eta_stable" => p.eta_stable = value(key, v)?,
        "seed" => p.seed = value(key, v)?,
        "max_signals" => p.max_signals = value(key, v)?,
        "stability_window" => p.stability_window = value(key, v)?,
        "idle_limit" => p.idle_limit = value(key, v)?,
        _ => return Ok(false),
    }
    Ok(true)
}

/// Which stream feeds the run.
#[derive(Clone, Debug, PartialEq)]
pub enum SourceSpec {
    /// A named parametric shape.
    Shape(String),
    /// Vertices of an OFF or OBJ mesh, or a point file.
    Input(String),
}

/// Everything a run needs.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub params: SoamParams,
    pub source: SourceSpec,
    /// Radius of the uniform noise ball, in rescaled units.
    pub noise: f64,
    /// Major bounding-box size the input is rescaled to.
    pub major: f64,
    pub out: String,
    pub telemetry_interval: u64,
    /// `soam` or `gwr`.
    pub algo: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            params: SoamParams::default(),
            source: SourceSpec::Shape("sphere".into()),
            noise: 0.0,
            major: crate::sampling::DEFAULT_MAJOR,
            out: "soam_out".into(),
            telemetry_interval: 1000,
            algo: "soam".into(),
        }
    }
}

impl RunConfig {
    /// Applies `key=value` lines on top of `self`. Unknown keys are errors.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (l, s) in content_lines(text) {
            let (k, v) = s.split_once('=').ok_or_else(|| parse(l, "expected key=value"))?;
            self.set(k.trim(), v.trim()).map_err(|e| parse(l, e.to_string()))?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut c = RunConfig::default();
        c.apply_text(text)?;
        Ok(c)
    }

    pub fn set(&mut self, key: &str, v: &str) -> Result<()> {
        if set_param(&mut self.params, key, v)? {
            return Ok(());
        }
        match key {
            "shape" => self.source = SourceSpec::Shape(v.to_string()),
            "input" => self.source = SourceSpec::Input(v.to_string()),
            "noise" => self.noise = value(key, v)?,
            "major" => self.major = value(key, v)?,
            "out" => self.out = v.to_string(),
            "telemetry_interval" => self.telemetry_interval = value(key, v)?,
            "algo" => self.algo = v.to_string(),
            _ => return Err(Error::InvalidParams(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(Error::InvalidParams(format!("noise must be non-negative, got {}", self.noise)));
        }
        if !(self.major.is_finite() && self.major > 0.0) {
            return Err(Error::InvalidParams(format!("major must be positive, got {}", self.major)));
        }
        if self.telemetry_interval == 0 {
            return Err(Error::InvalidParams("telemetry_interval must be at least 1".into()));
        }
        if self.algo != "soam" && self.algo != "gwr" {
            return Err(Error::InvalidParams(format!("unknown algo '{}'", self.algo)));
        }
        Ok(())
    }

    /// The effective configuration, re-readable by [`RunConfig::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in params_to_pairs(&self.params) {
            let _ = writeln!(out, "{k}={v}");
        }
        match &self.source {
            SourceSpec::Shape(s) => {
                let _ = writeln!(out, "shape={s}");
            }
            SourceSpec::Input(s) => {
                let _ = writeln!(out, "input={s}");
            }
        }
        let _ = writeln!(out, "noise={}", self.noise);
        let _ = writeln!(out, "major={}", self.major);
        let _ = writeln!(out, "out={}", self.out);
        let _ = writeln!(out, "telemetry_interval={}", self.telemetry_interval);
        let _ = writeln!(out, "algo={}", self.algo);
        out
    }
}

pub const TELEMETRY_HEADER: &str =
    "signal,active,habituated,connected,halfdisk,disk,boundary,patch,singular,units,edges,triangles,insertions,merges,prunes";

/// Counts at one point of a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TelemetryFrame {
    pub signal: u64,
    /// Indexed like [`UnitState::ALL`].
    pub states: [usize; 8],
    pub units: usize,
    pub edges: usize,
    pub triangles: usize,
    pub insertions: u64,
    pub merges: u64,
    /// Pruned connections.
    pub prunes: u64,
}

impl TelemetryFrame {
    pub fn capture(soam: &Soam) -> Self {
        let c: Counters = soam.counters();
        TelemetryFrame {
            signal: soam.signals(),
            states: soam.state_counts(),
            units: soam.unit_count(),
            edges: soam.complex().edge_count(),
            triangles: soam.complex().triangle_count(),
            insertions: c.insertions,
            merges: c.merges,
            prunes: c.edges_pruned,
        }
    }

    pub fn count(&self, s: UnitState) -> usize {
        self.states[s.index()]
    }

    pub fn to_csv_row(&self) -> String {
        let mut row = self.signal.to_string();
        for c in self.states {
            let _ = write!(row, ",{c}");
        }
        let _ = write!(
            row,
            ",{},{},{},{},{},{}",
            self.units, self.edges, self.triangles, self.insertions, self.merges, self.prunes
        );
        row
    }

    pub fn from_csv_row(row: &str, line: usize) -> Result<Self> {
        let f: Vec<u64> = row
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|_| parse(line, format!("invalid number '{t}'"))))
            .collect::<Result<_>>()?;
        if f.len() != 15 {
            return Err(parse(line, format!("expected 15 columns, found {}", f.len())));
        }
        let mut states = [0; 8];
        for (i, s) in states.iter_mut().enumerate() {
            *s = f[1 + i] as usize;
        }
        Ok(TelemetryFrame {
            signal: f[0],
            states,
            units: f[9] as usize,
            edges: f[10] as usize,
            triangles: f[11] as usize,
            insertions: f[12],
            merges: f[13],
            prunes: f[14],
        })
    }
}

/// Header plus one row per frame.
pub fn write_telemetry(frames: &[TelemetryFrame]) -> String {
    let mut out = String::with_capacity(64 * (frames.len() + 1));
    out.push_str(TELEMETRY_HEADER);
    out.push('\n');
    for f in frames {
        out.push_str(&f.to_csv_row());
        out.push('\n');
    }
    out
}

pub fn read_telemetry(text: &str) -> Result<Vec<TelemetryFrame>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == TELEMETRY_HEADER => {}
        _ => return Err(parse(1, "missing telemetry header")),
    }
    lines.filter(|(_, l)| !l.trim().is_empty()).map(|(i, l)| TelemetryFrame::from_csv_row(l, i + 1)).collect()
}

pub const SNAPSHOT_MAGIC: &str = "SOAMSNAP 1";

/// Serializes the full adaptation state of a network.
pub fn write_snapshot(soam: &Soam) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SNAPSHOT_MAGIC}");
    for (k, v) in params_to_pairs(soam.params()) {
        let _ = writeln!(out, "param {k} {v}");
    }
    let c = soam.counters();
    let _ = writeln!(out, "signals {}", soam.signals());
    let _ = writeln!(out, "stable_streak {}", soam.stable_streak());
    let _ = writeln!(out, "counters {} {} {} {} {}", c.insertions, c.merges, c.edges_pruned, c.units_pruned, c.reseeds);
    let _ = writeln!(out, "next_id {}", soam.complex().next_id());
    let _ = writeln!(out, "units {} {}", soam.unit_count(), soam.dim());
    for (id, u) in soam.units() {
        let _ = write!(out, "u {id} {} {} {} {}", u.state, u.firing, u.threshold, u.last_seen);
        for x in u.position.coords() {
            let _ = write!(out, " {x}");
        }
        out.push('\n');
    }
    let _ = writeln!(out, "edges {}", soam.complex().edge_count());
    for ((a, b), age) in soam.complex().edges() {
        let _ = writeln!(out, "e {a} {b} {age}");
    }
    let _ = writeln!(out, "triangles {}", soam.complex().triangle_count());
    for [a, b, t] in soam.complex().triangles() {
        let _ = writeln!(out, "t {a} {b} {t}");
    }
    let _ = writeln!(out, "end");
    out
}

struct Cursor<'a> {
    lines: std::iter::Peekable<Box<dyn Iterator<Item = (usize, &'a str)> + 'a>>,
    last: usize,
}

impl<'a> Cursor<'a> {
    fn next(&mut self, what: &str) -> Result<(usize, Vec<&'a str>)> {
        match self.lines.next() {
            Some((l, s)) => {
                self.last = l;
                Ok((l, s.split_whitespace().collect()))
            }
            None => Err(parse(self.last + 1, format!("unexpected end of snapshot, expected {what}"))),
        }
    }

    fn keyed(&mut self, key: &str, n: usize) -> Result<(usize, Vec<&'a str>)> {
        let (l, toks) = self.next(key)?;
        if toks.first() != Some(&key) || toks.len() != n + 1 {
            return Err(parse(l, format!("expected '{key}' with {n} value(s)")));
        }
        Ok((l, toks[1..].to_vec()))
    }
}

/// Restores a network written by [`write_snapshot`]. Triangles are
/// re-inferred from the edges and must match the stored ones; stored states
/// must match a recomputation.
pub fn read_snapshot(text: &str) -> Result<Soam> {
    let mut raw = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());
    match raw.next() {
        Some((_, SNAPSHOT_MAGIC)) => {}
        Some((l, other)) => return Err(parse(l, format!("unsupported snapshot header '{other}'"))),
        None => return Err(parse(1, "empty snapshot")),
    }
    let boxed: Box<dyn Iterator<Item = (usize, &str)>> = Box::new(raw);
    let mut cur = Cursor { lines: boxed.peekable(), last: 1 };

    let mut params = SoamParams::default();
    for key in PARAM_KEYS {
        let (l, toks) = cur.keyed("param", 2)?;
        if toks[0] != key {
            return Err(parse(l, format!("expected parameter {key}, found {}", toks[0])));
        }
        set_param(&mut params, key, toks[1]).map_err(|e| parse(l, e.to_string()))?;
    }
    let (l, t) = cur.keyed("signals", 1)?;
    let signals: u64 = num(Some(t[0]), l, "signal count")?;
    let (l, t) = cur.keyed("stable_streak", 1)?;
    let stable_streak: u64 = num(Some(t[0]), l, "stable streak")?;
    let (l, t) = cur.keyed("counters", 5)?;
    let counters = Counters {
        insertions: num(Some(t[0]), l, "counter")?,
        merges: num(Some(t[1]), l, "counter")?,
        edges_pruned: num(Some(t[2]), l, "counter")?,
        units_pruned: num(Some(t[3]), l, "counter")?,
        reseeds: num(Some(t[4]), l, "counter")?,
    };
    let (l, t) = cur.keyed("next_id", 1)?;
    let next_id = UnitId(num(Some(t[0]), l, "next id")?);
    let (l, t) = cur.keyed("units", 2)?;
    let n_units: usize = num(Some(t[0]), l, "unit count")?;
    let dim: usize = num(Some(t[1]), l, "dimension")?;

    let mut units = Vec::with_capacity(n_units);
    for _ in 0..n_units {
        let (l, toks) = cur.keyed("u", 5 + dim)?;
        let id = UnitId(num(Some(toks[0]), l, "unit id")?);
        let state: UnitState = toks[1].parse().map_err(|e: Error| parse(l, e.to_string()))?;
        let firing: f64 = num(Some(toks[2]), l, "firing")?;
        let threshold: f64 = num(Some(toks[3]), l, "threshold")?;
        let last_seen: u64 = num(Some(toks[4]), l, "last seen")?;
        let position = point_from_tokens(toks[5..].iter().copied(), l)?;
        if !(firing.is_finite() && threshold.is_finite()) {
            return Err(parse(l, "non-finite unit value"));
        }
        units.push((id, Unit { position, firing, threshold, state, last_seen }));
    }
    let (l, t) = cur.keyed("edges", 1)?;
    let n_edges: usize = num(Some(t[0]), l, "edge count")?;
    let mut edges = Vec::with_capacity(n_edges);
    let mut edge_lines = Vec::with_capacity(n_edges);
    for _ in 0..n_edges {
        let (l, toks) = cur.keyed("e", 3)?;
        let a = UnitId(num(Some(toks[0]), l, "edge endpoint")?);
        let b = UnitId(num(Some(toks[1]), l, "edge endpoint")?);
        let age: u32 = num(Some(toks[2]), l, "edge age")?;
        edges.push((a, b, age));
        edge_lines.push(l);
    }
    let (l, t) = cur.keyed("triangles", 1)?;
    let n_tri: usize = num(Some(t[0]), l, "triangle count")?;
    let mut stored = BTreeSet::new();
    for _ in 0..n_tri {
        let (l, toks) = cur.keyed("t", 3)?;
        let mut tri = [UnitId(0); 3];
        for (i, slot) in tri.iter_mut().enumerate() {
            *slot = UnitId(num(Some(toks[i]), l, "triangle vertex")?);
        }
        tri.sort();
        stored.insert(tri);
    }
    cur.keyed("end", 0)?;
    if let Some((l, _)) = cur.lines.next() {
        return Err(parse(l, "trailing data after end"));
    }

    // validate edges one at a time so errors name the offending line
    let ids: BTreeSet<UnitId> = units.iter().map(|(id, _)| *id).collect();
    for (&(a, b, _), &l) in edges.iter().zip(&edge_lines) {
        if a == b {
            return Err(parse(l, "self-loop"));
        }
        if !ids.contains(&a) || !ids.contains(&b) {
            return Err(parse(l, "edge references an unknown unit"));
        }
    }
    let soam = Soam::from_parts(params, dim, units, next_id, edges, signals, stable_streak, counters)?;
    let inferred: BTreeSet<[UnitId; 3]> = soam.complex().triangles().collect();
    if inferred != stored {
        return Err(Error::Snapshot("stored triangles differ from the 3-cliques of the edges".into()));
    }
    if let Some((u, stored, derived)) = soam.stale_states().first() {
        return Err(Error::Snapshot(format!("unit {u} stored as {stored} but derives as {derived}")));
    }
    Ok(soam)
}

/// Ordered key=value lines.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    entries: Vec<(String, String)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.entries.push((key.into(), value.to_string()));
        self
    }

    pub fn push_real(&mut self, key: impl Into<String>, value: f64) -> &mut Self {
        self.entries.push((key.into(), fmt_real(value)));
        self
    }

    /// Appends every `key=value` line of `text`, e.g. a report's Display output.
    pub fn extend_from_text(&mut self, prefix: &str, text: &str) -> &mut Self {
        for line in text.lines() {
            if let Some((k, v)) = line.split_once('=') {
                self.entries.push((format!("{prefix}{k}"), v.to_string()));
            }
        }
        self
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            let _ = writeln!(out, "{k}={v}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut r = Report::new();
        for (l, s) in content_lines(text) {
            let (k, v) = s.split_once('=').ok_or_else(|| parse(l, "expected key=value"))?;
            r.push(k.trim(), v.trim());
        }
        Ok(r)
    }
}
