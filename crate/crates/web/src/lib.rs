//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Three operations are exposed: growing a network on a shape or on a curve
//! drawn by the user, comparing witness and Delaunay edges for random
//! landmarks, and sampling the habituation curves.

use wasm_bindgen::prelude::*;

use soam::habituation::{dishabituation_curve, habituation_curve};
use soam::meshgen::icosphere;
use soam::sampling::{rng_from_seed, ParametricShape, SignalSource};
use soam::verify::{brute_force_delaunay, uniform_witness_graph};
use soam::{BoundingBox, ManifoldDim, Point, Soam, SoamParams};

/// Major size of the demo canvas in model units.
const MAJOR: f64 = 256.0;
/// Points a drawn curve is resampled to.
const DRAWN_SAMPLES: usize = 2000;

/// A growing network fed from a seeded signal stream.
#[wasm_bindgen]
pub struct SoamDemo {
    soam: Soam,
    source: SignalSource,
}

#[wasm_bindgen]
impl SoamDemo {
    /// `shape` is `circle`, `sphere`, `torus` or `icosphere`. Curves use
    /// dimension 1, everything else dimension 2.
    #[wasm_bindgen(constructor)]
    pub fn new(shape: &str, seed: u64, noise: f64) -> Result<SoamDemo, String> {
        let source = match shape {
            "icosphere" => SignalSource::mesh_vertices(icosphere(4).vertices, MAJOR, noise, seed),
            name => ParametricShape::by_name(name).and_then(|s| SignalSource::parametric(s, MAJOR, noise, seed)),
        }
        .map_err(|e| e.to_string())?;
        let dim = if shape == "circle" { ManifoldDim::Curve } else { ManifoldDim::Surface };
        Self::start(source, dim, seed)
    }

    /// Grows a curve on a closed polyline given as flat `x, y` pairs.
    pub fn drawn(xy: &[f64], seed: u64, noise: f64) -> Result<SoamDemo, String> {
        let points = resample_closed(xy)?;
        let source = SignalSource::mesh_vertices(points, MAJOR, noise, seed).map_err(|e| e.to_string())?;
        Self::start(source, ManifoldDim::Curve, seed)
    }

    fn start(mut source: SignalSource, dim: ManifoldDim, seed: u64) -> Result<SoamDemo, String> {
        let params = SoamParams { seed, ..SoamParams::for_dim(dim) };
        let (a, b) = match (source.next_signal(), source.next_signal()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err("empty signal stream".into()),
        };
        let soam = Soam::new(params, a, b).map_err(|e| e.to_string())?;
        Ok(SoamDemo { soam, source })
    }

    /// Feeds up to `n` signals; returns true once every unit has stayed
    /// stable for a whole stability window, the same stop rule as the CLI.
    pub fn step(&mut self, n: u32) -> Result<bool, String> {
        for _ in 0..n {
            if self.converged() {
                break;
            }
            let Some(s) = self.source.next_signal() else { break };
            self.soam.process_signal(&s).map_err(|e| e.to_string())?;
        }
        Ok(self.converged())
    }

    fn converged(&self) -> bool {
        self.soam.stable_streak() >= self.soam.params().stability_window
    }

    pub fn signals(&self) -> u64 {
        self.soam.signals()
    }

    pub fn dim(&self) -> usize {
        self.soam.dim()
    }

    /// Unit positions, `dim()` values per unit.
    pub fn positions(&self) -> Vec<f64> {
        self.soam.to_indexed().positions.iter().flat_map(|p| p.coords().to_vec()).collect()
    }

    /// Edges as pairs of indices into `positions()`.
    pub fn edges(&self) -> Vec<u32> {
        self.soam.to_indexed().edges.iter().flat_map(|e| e.map(|i| i as u32)).collect()
    }

    pub fn triangles(&self) -> Vec<u32> {
        self.soam.to_indexed().triangles.iter().flat_map(|t| t.map(|i| i as u32)).collect()
    }

    /// State index per unit, from 0 (active) to 7 (singular).
    pub fn states(&self) -> Vec<u8> {
        self.soam.to_indexed().states.iter().map(|s| s.index() as u8).collect()
    }

    /// Unit count per state, in the same order as `states()`.
    pub fn state_counts(&self) -> Vec<u32> {
        self.soam.state_counts().iter().map(|&c| c as u32).collect()
    }
}

/// Evenly spaced points along a closed polyline.
fn resample_closed(xy: &[f64]) -> Result<Vec<Point>, String> {
    if !xy.len().is_multiple_of(2) || xy.len() < 6 {
        return Err("need at least three x, y pairs".into());
    }
    let pts: Vec<Point> = xy.chunks(2).map(|c| Point::xy(c[0], c[1])).collect();
    let segs: Vec<(Point, Point, f64)> = (0..pts.len())
        .map(|i| {
            let (a, b) = (pts[i], pts[(i + 1) % pts.len()]);
            (a, b, soam::distance(&a, &b).unwrap_or(0.0))
        })
        .collect();
    let total: f64 = segs.iter().map(|s| s.2).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err("curve has zero length".into());
    }
    let step = total / DRAWN_SAMPLES as f64;
    let mut out = Vec::with_capacity(DRAWN_SAMPLES);
    let (mut seg, mut start) = (0, 0.0);
    for k in 0..DRAWN_SAMPLES {
        let at = k as f64 * step;
        while seg + 1 < segs.len() && start + segs[seg].2 < at {
            start += segs[seg].2;
            seg += 1;
        }
        let (a, b, len) = segs[seg];
        let t = if len > 0.0 { ((at - start) / len).clamp(0.0, 1.0) } else { 0.0 };
        out.push(Point::xy(a.coord(0) + t * (b.coord(0) - a.coord(0)), a.coord(1) + t * (b.coord(1) - a.coord(1))));
    }
    Ok(out)
}

/// Witness and Delaunay edges for `landmarks` random points in the unit
/// square. Returns `[w, d, ...]` where the first `2w` entries after the
/// header are witness edge endpoints and the next `2d` are Delaunay edges;
/// landmark coordinates come from `witness_landmarks` with the same seed.
#[wasm_bindgen]
pub fn witness_vs_delaunay(landmarks: usize, witnesses: usize, seed: u64) -> Result<Vec<u32>, String> {
    let pts = random_landmarks(landmarks, seed);
    let bbox = BoundingBox::of(&pts).map_err(|e| e.to_string())?;
    let mut rng = rng_from_seed(seed.wrapping_add(1));
    let w = uniform_witness_graph(&pts, &bbox, witnesses, &mut rng).map_err(|e| e.to_string())?.edges();
    let d = brute_force_delaunay(&pts).map_err(|e| e.to_string())?.edges;
    let mut out = vec![w.len() as u32, d.len() as u32];
    out.extend(w.iter().chain(d.iter()).flat_map(|&(a, b)| [a as u32, b as u32]));
    Ok(out)
}

/// Landmarks used by `witness_vs_delaunay`, as flat `x, y` pairs.
#[wasm_bindgen]
pub fn witness_landmarks(landmarks: usize, seed: u64) -> Vec<f64> {
    random_landmarks(landmarks, seed).iter().flat_map(|p| [p.coord(0), p.coord(1)]).collect()
}

fn random_landmarks(n: usize, seed: u64) -> Vec<Point> {
    use rand::Rng;
    let mut rng = rng_from_seed(seed);
    (0..n).map(|_| Point::xy(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0))).collect()
}

/// Habituation then dishabituation from the floor, `samples` points each over `[0, t_end]`.
#[wasm_bindgen]
pub fn habituation_curves(alpha: f64, tau: f64, t_end: f64, samples: usize) -> Vec<f64> {
    let ts = (0..samples).map(|i| t_end * i as f64 / (samples.max(2) - 1) as f64);
    let down = ts.clone().map(|t| habituation_curve(t, 1.0, alpha, tau));
    let up = ts.map(|t| dishabituation_curve(t, 1.0, alpha, tau));
    down.chain(up).collect()
}
