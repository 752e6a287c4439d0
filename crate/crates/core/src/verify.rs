//! Topological verification and brute-force geometric oracles.
//!
//! Closed triangulated surfaces are classified up to homeomorphism by
//! orientability and Euler characteristic. Curves are classified by the
//! degree sequence of each connected component. The Delaunay and witness
//! oracles are exhaustive and only meant for small planar point sets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::Rng;

use crate::geometry::{nearest_two, BoundingBox, Point};
use crate::meshgen::Mesh;
use crate::network::IndexedComplex;
use crate::sampling::ParametricShape;
use crate::{Error, Result, UnitId};

/// Vertices `0..vertex_count` with explicit edges and triangles.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CellComplex {
    pub vertex_count: usize,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

impl CellComplex {
    pub fn from_mesh(mesh: &Mesh) -> Self {
        CellComplex { vertex_count: mesh.vertices.len(), edges: mesh.edges(), triangles: mesh.triangles.clone() }
    }

    pub fn from_indexed(c: &IndexedComplex) -> Self {
        CellComplex { vertex_count: c.positions.len(), edges: c.edges.clone(), triangles: c.triangles.clone() }
    }

    /// A graph with no triangles.
    pub fn from_edges(vertex_count: usize, edges: &[[usize; 2]]) -> Self {
        CellComplex { vertex_count, edges: edges.to_vec(), triangles: Vec::new() }
    }

    /// Disjoint union, renumbering `other` after `self`.
    pub fn disjoint_union(&self, other: &CellComplex) -> CellComplex {
        let k = self.vertex_count;
        let mut out = self.clone();
        out.vertex_count += other.vertex_count;
        out.edges.extend(other.edges.iter().map(|e| [e[0] + k, e[1] + k]));
        out.triangles.extend(other.triangles.iter().map(|t| [t[0] + k, t[1] + k, t[2] + k]));
        out
    }

    fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for &[a, b] in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }
}

pub fn euler_characteristic(c: &CellComplex) -> i64 {
    c.vertex_count as i64 - c.edges.len() as i64 + c.triangles.len() as i64
}

fn components(n: usize, adj: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for s in 0..n {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut comp = vec![s];
        let mut i = 0;
        while i < comp.len() {
            for &w in &adj[comp[i]] {
                if !seen[w] {
                    seen[w] = true;
                    comp.push(w);
                }
            }
            i += 1;
        }
        out.push(comp);
    }
    out
}

pub fn connected_components(c: &CellComplex) -> usize {
    components(c.vertex_count, &c.adjacency()).len()
}

fn edge_triangles(c: &CellComplex) -> HashMap<(usize, usize), Vec<usize>> {
    let mut map: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, t) in c.triangles.iter().enumerate() {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
            map.entry((a.min(b), a.max(b))).or_default().push(i);
        }
    }
    map
}

/// Orientability by consistent orientation propagation, and the number of
/// boundary loops. Fails on an edge with three or more triangles.
pub fn orientability_and_boundary(c: &CellComplex) -> Result<(bool, usize)> {
    orientability_from(c, 0)
}

/// Same as [`orientability_and_boundary`], starting the propagation of each
/// component from the first triangle at or after `start`.
pub fn orientability_from(c: &CellComplex, start: usize) -> Result<(bool, usize)> {
    let et = edge_triangles(c);
    let mut worst: Option<((usize, usize), usize)> = None;
    for (e, ts) in &et {
        if ts.len() >= 3 && worst.is_none_or(|(w, _)| *e < w) {
            worst = Some((*e, ts.len()));
        }
    }
    if let Some(((a, b), k)) = worst {
        return Err(Error::NonManifold(a, b, k));
    }

    let nt = c.triangles.len();
    // orientation: +1 keeps the stored vertex order, -1 reverses it
    let mut sign = vec![0i8; nt];
    let mut orientable = true;
    for off in 0..nt {
        let root = (start + off) % nt;
        if sign[root] != 0 {
            continue;
        }
        sign[root] = 1;
        let mut queue = vec![root];
        while let Some(t) = queue.pop() {
            let tri = c.triangles[t];
            for (a, b) in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
                // directed edge as traversed by t in its chosen orientation
                let (x, y) = if sign[t] > 0 { (a, b) } else { (b, a) };
                for &u in &et[&(a.min(b), a.max(b))] {
                    if u == t {
                        continue;
                    }
                    let tu = c.triangles[u];
                    let forward = [(tu[0], tu[1]), (tu[1], tu[2]), (tu[2], tu[0])].contains(&(x, y));
                    // a consistent neighbor traverses the shared edge as (y, x)
                    let need: i8 = if forward { -1 } else { 1 };
                    if sign[u] == 0 {
                        sign[u] = need;
                        queue.push(u);
                    } else if sign[u] != need {
                        orientable = false;
                    }
                }
            }
        }
    }

    let boundary: Vec<[usize; 2]> = et.iter().filter(|(_, ts)| ts.len() == 1).map(|(&(a, b), _)| [a, b]).collect();
    let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &[a, b] in &boundary {
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::new();
    let mut loops = 0;
    for &v in adj.keys() {
        if !seen.insert(v) {
            continue;
        }
        loops += 1;
        let mut stack = vec![v];
        while let Some(x) = stack.pop() {
            for &y in &adj[&x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
    }
    Ok((orientable, loops))
}

/// Whether every vertex link is a single cycle, i.e. the complex is a closed
/// surface around every vertex.
pub fn all_links_closed(c: &CellComplex) -> bool {
    let mut link: Vec<Vec<[usize; 2]>> = vec![Vec::new(); c.vertex_count];
    for &[a, b, d] in &c.triangles {
        link[a].push([b, d]);
        link[b].push([a, d]);
        link[d].push([a, b]);
    }
    link.iter().all(|arcs| {
        if arcs.len() < 3 {
            return false;
        }
        let mut deg: HashMap<usize, Vec<usize>> = HashMap::new();
        for &[x, y] in arcs {
            deg.entry(x).or_default().push(y);
            deg.entry(y).or_default().push(x);
        }
        if deg.len() != arcs.len() || deg.values().any(|n| n.len() != 2) {
            return false;
        }
        // a 2-regular graph is one cycle iff it is connected
        let start = arcs[0][0];
        let (mut prev, mut cur, mut steps) = (start, deg[&start][0], 1);
        while cur != start {
            let n = &deg[&cur];
            let next = if n[0] != prev { n[0] } else { n[1] };
            prev = cur;
            cur = next;
            steps += 1;
        }
        steps == arcs.len()
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub euler: i64,
    /// `None` when the complex is not a manifold along some edge.
    pub orientable: Option<bool>,
    pub boundary_components: usize,
    /// Only defined for connected, closed, orientable complexes.
    pub genus: Option<i64>,
    pub connected_components: usize,
    pub all_links_closed: bool,
    pub non_manifold: bool,
}

impl SurfaceReport {
    pub fn is_closed_connected(&self) -> bool {
        !self.non_manifold && self.boundary_components == 0 && self.connected_components == 1
    }
}

pub fn surface_report(c: &CellComplex) -> SurfaceReport {
    let euler = euler_characteristic(c);
    let connected_components = connected_components(c);
    let (orientable, boundary_components, non_manifold) = match orientability_and_boundary(c) {
        Ok((o, b)) => (Some(o), b, false),
        Err(_) => (None, 0, true),
    };
    let closed_links = all_links_closed(c);
    let genus = (orientable == Some(true)
        && boundary_components == 0
        && connected_components == 1
        && closed_links
        && (2 - euler) % 2 == 0)
        .then_some((2 - euler) / 2);
    SurfaceReport {
        vertices: c.vertex_count,
        edges: c.edges.len(),
        faces: c.triangles.len(),
        euler,
        orientable,
        boundary_components,
        genus,
        connected_components,
        all_links_closed: closed_links,
        non_manifold,
    }
}

/// Closed connected surfaces are homeomorphic iff orientability and Euler
/// characteristic agree.
pub fn homeomorphic_closed_surfaces(a: &SurfaceReport, b: &SurfaceReport) -> Result<bool> {
    for r in [a, b] {
        if !r.is_closed_connected() {
            return Err(Error::InvalidParams("homeomorphism test needs closed, connected, manifold surfaces".into()));
        }
    }
    Ok(a.orientable == b.orientable && a.euler == b.euler)
}

impl fmt::Display for SurfaceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let opt = |o: Option<String>| o.unwrap_or_else(|| "undefined".into());
        writeln!(f, "vertices={}", self.vertices)?;
        writeln!(f, "edges={}", self.edges)?;
        writeln!(f, "faces={}", self.faces)?;
        writeln!(f, "euler={}", self.euler)?;
        writeln!(f, "orientable={}", opt(self.orientable.map(|o| o.to_string())))?;
        writeln!(f, "boundary_components={}", self.boundary_components)?;
        writeln!(f, "genus={}", opt(self.genus.map(|g| g.to_string())))?;
        writeln!(f, "connected_components={}", self.connected_components)?;
        writeln!(f, "all_links_closed={}", self.all_links_closed)?;
        writeln!(f, "non_manifold={}", self.non_manifold)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CurveReport {
    pub cycles: usize,
    pub open_paths: usize,
    pub stray: usize,
    pub max_degree: usize,
}

impl CurveReport {
    pub fn is_single_cycle(&self) -> bool {
        self.cycles == 1 && self.open_paths == 0 && self.stray == 0 && self.max_degree == 2
    }
}

/// Classifies each component as a cycle (all degrees 2), an open path (two
/// ends of degree 1, the rest 2), or stray. Triangles are ignored.
pub fn curve_topology(c: &CellComplex) -> CurveReport {
    let adj = c.adjacency();
    let mut report = CurveReport { max_degree: adj.iter().map(Vec::len).max().unwrap_or(0), ..Default::default() };
    for comp in components(c.vertex_count, &adj) {
        let degs: Vec<usize> = comp.iter().map(|&v| adj[v].len()).collect();
        let ones = degs.iter().filter(|&&d| d == 1).count();
        if comp.len() >= 3 && degs.iter().all(|&d| d == 2) {
            report.cycles += 1;
        } else if comp.len() >= 2 && ones == 2 && degs.iter().all(|&d| d == 1 || d == 2) {
            report.open_paths += 1;
        } else {
            report.stray += 1;
        }
    }
    report
}

impl fmt::Display for CurveReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "cycles={}", self.cycles)?;
        writeln!(f, "open_paths={}", self.open_paths)?;
        writeln!(f, "stray={}", self.stray)?;
        writeln!(f, "max_degree={}", self.max_degree)
    }
}

/// Delaunay edges of a planar point set.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DelaunayGraph {
    pub edges: BTreeSet<(usize, usize)>,
    /// Pairs whose empty-circle family has (numerically) zero width: four or
    /// more co-circular points. Not included in `edges`.
    pub degenerate: BTreeSet<(usize, usize)>,
}

impl DelaunayGraph {
    pub fn is_degenerate(&self) -> bool {
        !self.degenerate.is_empty()
    }
}

/// Relative co-circularity tolerance.
pub const COCIRCULAR_TOL: f64 = 1e-9;

/// Exact Delaunay graph by the empty-circle characterization.
///
/// Circles through `a` and `b` have centers `m + t n` on the bisector. A
/// third point `p` lies strictly outside such a circle iff
/// `|m - p|^2 - |m - a|^2 + 2 t n.(m - p) > 0`, which is linear in `t`, so
/// the empty circles form an open interval of `t` and the pair is a
/// Delaunay edge iff that interval is non-empty.
pub fn brute_force_delaunay(points: &[Point]) -> Result<DelaunayGraph> {
    if points.len() < 3 {
        return Err(Error::TooFewPoints { needed: 3, found: points.len() });
    }
    if let Some(p) = points.iter().find(|p| p.dim() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, found: p.dim() });
    }
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            if points[i] == points[j] {
                return Err(Error::InvalidParams(format!("duplicate points {i} and {j}")));
            }
        }
    }
    let bbox = BoundingBox::of(points)?;
    let scale = bbox.major().max(f64::MIN_POSITIVE);
    let tol = COCIRCULAR_TOL * scale;

    let mut g = DelaunayGraph::default();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let (a, b) = (points[i], points[j]);
            let m = a.midpoint(&b);
            let ab = b.sub(&a);
            let len = ab.norm();
            let n = Point::xy(-ab.coord(1) / len, ab.coord(0) / len);
            let r2 = m.squared_distance(&a);
            let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
            let mut blocked = false;
            let mut touching = false;
            for (k, p) in points.iter().enumerate() {
                if k == i || k == j {
                    continue;
                }
                let c0 = m.squared_distance(p) - r2;
                let mp = m.sub(p);
                let c1 = 2.0 * (n.coord(0) * mp.coord(0) + n.coord(1) * mp.coord(1));
                // constraint c0 + c1 t > 0, in length units after dividing by the scale
                if c1.abs() <= tol * 1e-3 {
                    if c0 <= 0.0 {
                        blocked = true;
                    }
                    continue;
                }
                let root = -c0 / c1;
                if c1 > 0.0 {
                    lo = lo.max(root);
                } else {
                    hi = hi.min(root);
                }
            }
            if blocked {
                continue;
            }
            if hi - lo > tol {
                g.edges.insert((i, j));
            } else if (hi - lo).abs() <= tol {
                touching = true;
            }
            if touching {
                g.degenerate.insert((i, j));
            }
        }
    }
    Ok(g)
}

/// Witnessed edges with the number of witnesses supporting each.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct WitnessGraph {
    pub counts: BTreeMap<(usize, usize), u64>,
}

impl WitnessGraph {
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        self.counts.keys().copied().collect()
    }

    pub fn count(&self, a: usize, b: usize) -> u64 {
        self.counts.get(&(a.min(b), a.max(b))).copied().unwrap_or(0)
    }

    pub fn merge(&mut self, other: &WitnessGraph) {
        for (e, c) in &other.counts {
            *self.counts.entry(*e).or_default() += c;
        }
    }
}

/// Connects the two nearest landmarks of every witness.
pub fn witness_graph(landmarks: &[Point], witnesses: impl IntoIterator<Item = Point>) -> Result<WitnessGraph> {
    if landmarks.len() < 2 {
        return Err(Error::TooFewPoints { needed: 2, found: landmarks.len() });
    }
    let mut g = WitnessGraph::default();
    for w in witnesses {
        let (a, b) = nearest_two(landmarks.iter().enumerate().map(|(i, p)| (UnitId(i as u32), p)), &w)?;
        let (a, b) = (a.index(), b.index());
        *g.counts.entry((a.min(b), a.max(b))).or_default() += 1;
    }
    Ok(g)
}

/// Witness graph with witnesses drawn uniformly from `bbox`.
pub fn uniform_witness_graph(
    landmarks: &[Point],
    bbox: &BoundingBox,
    count: usize,
    rng: &mut impl Rng,
) -> Result<WitnessGraph> {
    let d = bbox.min.dim();
    let mut c = [0.0; 4];
    let witnesses = (0..count).map(|_| {
        for (i, x) in c.iter_mut().take(d).enumerate() {
            *x = rng.gen_range(bbox.min.coord(i)..bbox.max.coord(i));
        }
        Point::new(&c[..d]).unwrap()
    });
    witness_graph(landmarks, witnesses)
}

/// Approximate Delaunay graph in any dimension: pairs whose second-order
/// Voronoi region is hit by some uniform probe in the enlarged bounding box.
pub fn sampled_delaunay(landmarks: &[Point], probes: usize, rng: &mut impl Rng) -> Result<BTreeSet<(usize, usize)>> {
    let bbox = BoundingBox::of(landmarks)?;
    let pad = bbox.major();
    let grow = |p: &Point, s: f64| Point::new(&p.coords().iter().map(|c| c + s * pad).collect::<Vec<_>>()).unwrap();
    let wide = BoundingBox { min: grow(&bbox.min, -1.0), max: grow(&bbox.max, 1.0) };
    Ok(uniform_witness_graph(landmarks, &wide, probes, rng)?.edges())
}

/// Witness graph with witnesses sampled from the shape itself.
pub fn restricted_witness_graph(
    landmarks: &[Point],
    shape: &ParametricShape,
    witnesses: usize,
    rng: &mut impl Rng,
) -> Result<WitnessGraph> {
    shape.validate()?;
    let mut ws = Vec::with_capacity(witnesses);
    for _ in 0..witnesses {
        ws.push(shape.sample(rng));
    }
    witness_graph(landmarks, ws)
}

/// Four points homotoped towards a common circle: `a = (-1, 0)`, `b = (1, 0)`,
/// `c = (0, 1)` and `d = (0, -y)` with `y` going from 0.5 at `t = 0` to 1 at
/// `t = 1`, where all four lie on the unit circle. Before that, `cd` is the
/// Delaunay edge in the middle of the quadrilateral.
pub fn cocircular_quadruple(t: f64) -> [Point; 4] {
    let y = 0.5 + 0.5 * t.clamp(0.0, 1.0);
    [Point::xy(-1.0, 0.0), Point::xy(1.0, 0.0), Point::xy(0.0, 1.0), Point::xy(0.0, -y)]
}

/// Witness count of the middle edge `cd` at `t = k / steps` for `k = 0..=steps`,
/// all against one fixed set of uniform witnesses in `[-2, 2]^2`.
pub fn cocircular_witness_counts(steps: usize, witnesses: usize, rng: &mut impl Rng) -> Result<Vec<(f64, u64)>> {
    let steps = steps.max(1);
    let ws: Vec<Point> =
        (0..witnesses).map(|_| Point::xy(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
    (0..=steps)
        .map(|k| {
            let t = k as f64 / steps as f64;
            let g = witness_graph(&cocircular_quadruple(t), ws.iter().copied())?;
            Ok((t, g.count(2, 3)))
        })
        .collect()
}
