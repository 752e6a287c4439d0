//! Signal sources.
//!
//! All randomness comes from `ChaCha8Rng` seeded with a `u64`, so a given
//! seed reproduces the same stream on every platform.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{BoundingBox, Point, Rescale};
use crate::{Error, Result};

/// Major bounding-box size that every input is rescaled to.
pub const DEFAULT_MAJOR: f64 = 256.0;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Analytic manifolds that can be sampled directly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParametricShape {
    Circle {
        radius: f64,
    },
    Sphere {
        radius: f64,
    },
    Torus {
        major: f64,
        minor: f64,
    },
    /// Closed curve winding `p` times around the torus axis and `q` times
    /// around its tube.
    HelixOnTorus {
        major: f64,
        minor: f64,
        p: u32,
        q: u32,
    },
    /// Flat Klein bottle embedded in R^4.
    KleinBottle {
        scale: f64,
    },
    /// Smooth union of two tori, a genus-2 surface given implicitly.
    DoubleTorus {
        scale: f64,
    },
}

// Layout of the double torus in units of `scale`.
const DT_MAJOR: f64 = 1.0;
const DT_MINOR: f64 = 0.4;
const DT_OFFSET: f64 = 1.2;
const DT_BLEND: f64 = 0.25;

impl ParametricShape {
    pub fn helix_default() -> Self {
        ParametricShape::HelixOnTorus { major: 3.0, minor: 1.0, p: 1, q: 16 }
    }

    /// Shape by CLI name with default proportions.
    pub fn by_name(name: &str) -> Result<Self> {
        Ok(match name {
            "circle" => ParametricShape::Circle { radius: 1.0 },
            "sphere" => ParametricShape::Sphere { radius: 1.0 },
            "torus" => ParametricShape::Torus { major: 2.0, minor: 1.0 },
            "helix" => Self::helix_default(),
            "klein" => ParametricShape::KleinBottle { scale: 1.0 },
            "double-torus" => ParametricShape::DoubleTorus { scale: 1.0 },
            _ => return Err(Error::Unsupported(format!("unknown shape '{name}'"))),
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            ParametricShape::Circle { .. } => "circle",
            ParametricShape::Sphere { .. } => "sphere",
            ParametricShape::Torus { .. } => "torus",
            ParametricShape::HelixOnTorus { .. } => "helix",
            ParametricShape::KleinBottle { .. } => "klein",
            ParametricShape::DoubleTorus { .. } => "double-torus",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            ParametricShape::Circle { radius } | ParametricShape::Sphere { radius } => radius > 0.0,
            ParametricShape::Torus { major, minor } => minor > 0.0 && major > minor,
            ParametricShape::HelixOnTorus { major, minor, p, q } => minor > 0.0 && major > minor && p > 0 && q > 0,
            ParametricShape::KleinBottle { scale } | ParametricShape::DoubleTorus { scale } => scale > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("bad shape parameters: {self:?}")))
        }
    }

    /// Ambient dimension of emitted points.
    pub fn dim(&self) -> usize {
        match self {
            ParametricShape::Circle { .. } => 2,
            ParametricShape::KleinBottle { .. } => 4,
            _ => 3,
        }
    }

    /// Intrinsic dimension.
    pub fn manifold_dim(&self) -> u32 {
        match self {
            ParametricShape::Circle { .. } | ParametricShape::HelixOnTorus { .. } => 1,
            _ => 2,
        }
    }

    pub fn bounding_box(&self) -> BoundingBox {
        let cube = |h: f64, dim: usize| {
            let lo = vec![-h; dim];
            let hi = vec![h; dim];
            BoundingBox { min: Point::new(&lo).unwrap(), max: Point::new(&hi).unwrap() }
        };
        match *self {
            ParametricShape::Circle { radius } => cube(radius, 2),
            ParametricShape::Sphere { radius } => cube(radius, 3),
            ParametricShape::Torus { major, minor } | ParametricShape::HelixOnTorus { major, minor, .. } => {
                let h = major + minor;
                BoundingBox { min: Point::xyz(-h, -h, -minor), max: Point::xyz(h, h, minor) }
            }
            ParametricShape::KleinBottle { scale } => {
                let h = 3.0 * scale;
                BoundingBox { min: Point::xyzw(-h, -h, -scale, -scale), max: Point::xyzw(h, h, scale, scale) }
            }
            ParametricShape::DoubleTorus { scale } => {
                let hx = (DT_OFFSET + DT_MAJOR + DT_MINOR) * scale;
                let hy = (DT_MAJOR + DT_MINOR) * scale;
                let hz = (DT_MINOR + DT_BLEND / 4.0) * scale;
                BoundingBox { min: Point::xyz(-hx, -hy, -hz), max: Point::xyz(hx, hy, hz) }
            }
        }
    }

    /// Maps a pair of uniform parameters in `[0, 1)` onto the shape.
    /// Not available for the double torus, which has no parametrization.
    pub fn at(&self, s: f64, t: f64) -> Option<Point> {
        Some(match *self {
            ParametricShape::Circle { radius } => {
                let a = TAU * s;
                Point::xy(radius * a.cos(), radius * a.sin())
            }
            ParametricShape::Sphere { radius } => {
                // uniform on the sphere: z uniform in [-1, 1]
                let z = 2.0 * t - 1.0;
                let rho = (1.0 - z * z).max(0.0).sqrt();
                let a = TAU * s;
                Point::xyz(radius * rho * a.cos(), radius * rho * a.sin(), radius * z)
            }
            ParametricShape::Torus { major, minor } => torus_point(major, minor, TAU * s, TAU * t),
            ParametricShape::HelixOnTorus { major, minor, p, q } => {
                torus_point(major, minor, TAU * s * p as f64, TAU * s * q as f64)
            }
            ParametricShape::KleinBottle { scale } => {
                let (u, v) = (TAU * s, TAU * t);
                let ring = 2.0 + v.cos();
                Point::xyzw(
                    scale * ring * u.cos(),
                    scale * ring * u.sin(),
                    scale * v.sin() * (u / 2.0).cos(),
                    scale * v.sin() * (u / 2.0).sin(),
                )
            }
            ParametricShape::DoubleTorus { .. } => return None,
        })
    }

    /// Draws one ideal (noise-free) point.
    pub fn sample(&self, rng: &mut impl Rng) -> Point {
        match *self {
            ParametricShape::DoubleTorus { scale } => loop {
                let b = self.bounding_box();
                let x = Point::xyz(
                    rng.gen_range(b.min.coord(0)..b.max.coord(0)),
                    rng.gen_range(b.min.coord(1)..b.max.coord(1)),
                    rng.gen_range(b.min.coord(2)..b.max.coord(2)),
                );
                // start only from the band around the surface, away from the tube cores
                if double_torus_value(&x, scale).abs() > 0.3 * DT_MINOR * scale {
                    continue;
                }
                if let Some(p) = project_double_torus(x, scale) {
                    return p;
                }
            },
            _ => {
                let s: f64 = rng.gen();
                let t: f64 = rng.gen();
                self.at(s, t).expect("parametric shape")
            }
        }
    }

    /// Residual of the implicit equation at `p`: distance-like, zero on the shape.
    pub fn residual(&self, p: &Point) -> f64 {
        match *self {
            ParametricShape::Circle { radius } => p.norm() - radius,
            ParametricShape::Sphere { radius } => p.norm() - radius,
            ParametricShape::Torus { major, minor } => torus_sdf(p, major, minor),
            ParametricShape::HelixOnTorus { major, minor, .. } => torus_sdf(p, major, minor),
            ParametricShape::KleinBottle { scale } => {
                let c = p.coords();
                let ring = (c[0] * c[0] + c[1] * c[1]).sqrt() / scale - 2.0;
                let sv = (c[2] * c[2] + c[3] * c[3]).sqrt() / scale;
                (ring * ring + sv * sv).sqrt() - 1.0
            }
            ParametricShape::DoubleTorus { scale } => double_torus_value(p, scale),
        }
    }
}

impl fmt::Display for ParametricShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ParametricShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ParametricShape::by_name(s)
    }
}

fn torus_point(major: f64, minor: f64, u: f64, v: f64) -> Point {
    let ring = major + minor * v.cos();
    Point::xyz(ring * u.cos(), ring * u.sin(), minor * v.sin())
}

fn torus_sdf(p: &Point, major: f64, minor: f64) -> f64 {
    let c = p.coords();
    let q = (c[0] * c[0] + c[1] * c[1]).sqrt() - major;
    (q * q + c[2] * c[2]).sqrt() - minor
}

/// Signed distance to a torus around the z axis and its gradient.
fn torus_sdf_grad(x: f64, y: f64, z: f64, major: f64, minor: f64) -> (f64, [f64; 3]) {
    let rho = (x * x + y * y).sqrt().max(1e-300);
    let q = rho - major;
    let len = (q * q + z * z).sqrt().max(1e-300);
    let d = len - minor;
    (d, [q / len * x / rho, q / len * y / rho, z / len])
}

/// Implicit function of the double torus and its gradient.
pub fn double_torus_eval(p: &Point, scale: f64) -> (f64, [f64; 3]) {
    let c = p.coords();
    let (x, y, z) = (c[0] / scale, c[1] / scale, c[2] / scale);
    let (d1, g1) = torus_sdf_grad(x - DT_OFFSET, y, z, DT_MAJOR, DT_MINOR);
    let (d2, g2) = torus_sdf_grad(x + DT_OFFSET, y, z, DT_MAJOR, DT_MINOR);
    // polynomial smooth minimum; its gradient is the h-weighted blend
    let k = DT_BLEND;
    let h = (0.5 + 0.5 * (d2 - d1) / k).clamp(0.0, 1.0);
    let d = d2 + h * (d1 - d2) - k * h * (1.0 - h);
    let g = [h * g1[0] + (1.0 - h) * g2[0], h * g1[1] + (1.0 - h) * g2[1], h * g1[2] + (1.0 - h) * g2[2]];
    (d * scale, g)
}

fn double_torus_value(p: &Point, scale: f64) -> f64 {
    double_torus_eval(p, scale).0
}

/// Newton projection onto the zero set; `None` if it fails to converge.
fn project_double_torus(mut p: Point, scale: f64) -> Option<Point> {
    for _ in 0..100 {
        let (f, g) = double_torus_eval(&p, scale);
        if f.abs() < 1e-13 * scale {
            return Some(p);
        }
        let g2 = g[0] * g[0] + g[1] * g[1] + g[2] * g[2];
        if g2 < 1e-12 {
            return None;
        }
        let c = p.coords();
        p = Point::xyz(c[0] - f * g[0] / g2, c[1] - f * g[1] / g2, c[2] - f * g[2] / g2);
    }
    None
}

/// Distance from `p` to the medial axis, for shapes where it is known in
/// closed form.
pub fn analytic_lfs(shape: &ParametricShape, p: &Point) -> Result<f64> {
    match *shape {
        // medial axis is the center
        ParametricShape::Circle { .. } => Ok(p.norm()),
        ParametricShape::Torus { major, .. } => {
            let c = p.coords();
            let rho = (c[0] * c[0] + c[1] * c[1]).sqrt();
            // inner medial axis: the core circle; outer: the symmetry axis
            let to_core = ((rho - major).powi(2) + c[2] * c[2]).sqrt();
            Ok(to_core.min(rho))
        }
        _ => Err(Error::Unsupported(format!("no closed-form medial axis for {shape}"))),
    }
}

/// Uniform sample from the closed ball of radius `delta` around `p`.
pub fn add_noise(p: &Point, delta: f64, rng: &mut impl Rng) -> Point {
    if delta <= 0.0 {
        return *p;
    }
    let d = p.dim();
    let mut off = [0.0f64; 4];
    loop {
        let mut n2 = 0.0;
        for o in off.iter_mut().take(d) {
            *o = rng.gen_range(-1.0..=1.0);
            n2 += *o * *o;
        }
        if n2 <= 1.0 {
            break;
        }
    }
    let mut out = p.coords().to_vec();
    for i in 0..d {
        out[i] += delta * off[i];
    }
    Point::new(&out).expect("finite")
}

/// Where the signals come from.
#[derive(Clone, Debug)]
pub enum SourceKind {
    /// Uniform choice among mesh vertices.
    MeshVertices(Vec<Point>),
    Parametric(ParametricShape),
    /// A fixed sequence, replayed once.
    Recorded {
        points: Vec<Point>,
        cursor: usize,
    },
}

/// A seeded stream of (possibly noisy) points in model units.
#[derive(Clone, Debug)]
pub struct SignalSource {
    kind: SourceKind,
    rng: ChaCha8Rng,
    transform: Rescale,
    noise: f64,
    dim: usize,
}

impl SignalSource {
    /// Samples a parametric shape, rescaled so its bounding box has major size `major`.
    pub fn parametric(shape: ParametricShape, major: f64, noise: f64, seed: u64) -> Result<Self> {
        shape.validate()?;
        check_noise(noise)?;
        let transform = Rescale::to_major(&shape.bounding_box(), major)
            .ok_or_else(|| Error::InvalidParams("degenerate shape".into()))?;
        Ok(SignalSource {
            dim: shape.dim(),
            kind: SourceKind::Parametric(shape),
            rng: rng_from_seed(seed),
            transform,
            noise,
        })
    }

    /// Samples mesh vertices, rescaled to major size `major`.
    pub fn mesh_vertices(vertices: Vec<Point>, major: f64, noise: f64, seed: u64) -> Result<Self> {
        check_noise(noise)?;
        let bbox = BoundingBox::of(&vertices)?;
        let transform = Rescale::to_major(&bbox, major).unwrap_or(Rescale::identity(vertices[0].dim()));
        Ok(SignalSource {
            dim: vertices[0].dim(),
            kind: SourceKind::MeshVertices(vertices),
            rng: rng_from_seed(seed),
            transform,
            noise,
        })
    }

    /// Replays `points` as given; no rescaling.
    pub fn recorded(points: Vec<Point>, noise: f64, seed: u64) -> Result<Self> {
        check_noise(noise)?;
        let first = points.first().ok_or(Error::TooFewPoints { needed: 1, found: 0 })?;
        let dim = first.dim();
        if let Some(p) = points.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: p.dim() });
        }
        Ok(SignalSource {
            dim,
            transform: Rescale::identity(dim),
            kind: SourceKind::Recorded { points, cursor: 0 },
            rng: rng_from_seed(seed),
            noise,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn noise(&self) -> f64 {
        self.noise
    }

    pub fn transform(&self) -> &Rescale {
        &self.transform
    }

    pub fn kind(&self) -> &SourceKind {
        &self.kind
    }

    /// Next ideal point before noise, in model units; `None` once a recorded
    /// stream runs out.
    pub fn next_ideal(&mut self) -> Option<Point> {
        let p = match &mut self.kind {
            SourceKind::MeshVertices(v) => v[self.rng.gen_range(0..v.len())],
            SourceKind::Parametric(shape) => shape.sample(&mut self.rng),
            SourceKind::Recorded { points, cursor } => {
                let p = *points.get(*cursor)?;
                *cursor += 1;
                return Some(p);
            }
        };
        Some(self.transform.apply(&p))
    }

    pub fn next_signal(&mut self) -> Option<Point> {
        let p = self.next_ideal()?;
        Some(add_noise(&p, self.noise, &mut self.rng))
    }

    /// Collects `n` signals (fewer if the stream ends).
    pub fn take_signals(&mut self, n: usize) -> Vec<Point> {
        (0..n).map_while(|_| self.next_signal()).collect()
    }
}

impl Iterator for SignalSource {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        self.next_signal()
    }
}

fn check_noise(noise: f64) -> Result<()> {
    if noise.is_finite() && noise >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("noise must be non-negative, got {noise}")))
    }
}
