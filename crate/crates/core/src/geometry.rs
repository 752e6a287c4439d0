//! Ambient-space primitives.
//!
//! Points live in R^2, R^3 or R^4. [`PointSet`] keeps the positions of a
//! mutating set of units in flat storage and answers the closest /
//! second-closest query that drives the competitive Hebbian rule.

use std::fmt;

use crate::{Error, Result, UnitId};

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 4;

/// A position in R^d, d in {2, 3, 4}. Unused trailing coordinates are zero.
#[derive(Clone, Copy, PartialEq)]
pub struct Point {
    coords: [f64; MAX_DIM],
    dim: u8,
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&coords.len()) {
            return Err(Error::UnsupportedDimension(coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let mut buf = [0.0; MAX_DIM];
        buf[..coords.len()].copy_from_slice(coords);
        Ok(Point { coords: buf, dim: coords.len() as u8 })
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point { coords: [x, y, 0.0, 0.0], dim: 2 }
    }

    pub fn xyz(x: f64, y: f64, z: f64) -> Self {
        Point { coords: [x, y, z, 0.0], dim: 3 }
    }

    pub fn xyzw(x: f64, y: f64, z: f64, w: f64) -> Self {
        Point { coords: [x, y, z, w], dim: 4 }
    }

    pub fn origin(dim: usize) -> Self {
        debug_assert!((2..=MAX_DIM).contains(&dim));
        Point { coords: [0.0; MAX_DIM], dim: dim as u8 }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn coords(&self) -> &[f64] {
        &self.coords[..self.dim as usize]
    }

    #[inline]
    pub fn coord(&self, i: usize) -> f64 {
        self.coords()[i]
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|c| c.is_finite())
    }

    #[inline]
    pub fn squared_distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        let mut acc = 0.0;
        for i in 0..self.dim as usize {
            let d = self.coords[i] - other.coords[i];
            acc += d * d;
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    /// `self + t * (other - self)`.
    #[inline]
    pub fn lerp(&self, other: &Point, t: f64) -> Point {
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.coords[i] += t * (other.coords[i] - self.coords[i]);
        }
        out
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.coords[i] = (self.coords[i] + other.coords[i]) / 2.0;
        }
        out
    }

    pub fn add(&self, other: &Point) -> Point {
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.coords[i] += other.coords[i];
        }
        out
    }

    pub fn sub(&self, other: &Point) -> Point {
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.coords[i] -= other.coords[i];
        }
        out
    }

    pub fn scale(&self, s: f64) -> Point {
        let mut out = *self;
        for c in &mut out.coords[..self.dim as usize] {
            *c *= s;
        }
        out
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Point").field(&self.coords()).finish()
    }
}

/// Euclidean distance.
pub fn distance(a: &Point, b: &Point) -> Result<f64> {
    if a.dim != b.dim {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.squared_distance(b).sqrt())
}

/// Reference closest / second-closest query by exhaustive scan.
///
/// Candidates are ordered by `(squared distance, id)`, so equidistant points
/// resolve to the smaller id.
pub fn nearest_two<'a, I>(points: I, query: &Point) -> Result<(UnitId, UnitId)>
where
    I: IntoIterator<Item = (UnitId, &'a Point)>,
{
    let mut best: Option<(f64, UnitId)> = None;
    let mut second: Option<(f64, UnitId)> = None;
    let mut seen = 0usize;
    for (id, p) in points {
        if p.dim != query.dim {
            return Err(Error::DimensionMismatch { expected: query.dim(), found: p.dim() });
        }
        seen += 1;
        let key = (p.squared_distance(query), id);
        push_candidate(&mut best, &mut second, key);
    }
    match (best, second) {
        (Some(b), Some(s)) => Ok((b.1, s.1)),
        _ => Err(Error::TooFewPoints { needed: 2, found: seen }),
    }
}

#[inline]
fn key_less(a: (f64, UnitId), b: (f64, UnitId)) -> bool {
    a.0 < b.0 || (a.0 == b.0 && a.1 < b.1)
}

#[inline]
fn push_candidate(best: &mut Option<(f64, UnitId)>, second: &mut Option<(f64, UnitId)>, key: (f64, UnitId)) {
    match *best {
        None => *best = Some(key),
        Some(b) if key_less(key, b) => {
            *second = Some(b);
            *best = Some(key);
        }
        Some(_) => match *second {
            Some(s) if !key_less(key, s) => {}
            _ => *second = Some(key),
        },
    }
}

/// Positions of a mutating set of units, stored contiguously for scanning.
///
/// Removal swaps the last slot into the hole, so the scan order is not the id
/// order; query results do not depend on it because ties break on id.
#[derive(Clone, Debug)]
pub struct PointSet {
    dim: usize,
    ids: Vec<UnitId>,
    coords: Vec<f64>,
    slot_of: Vec<u32>,
}

const NO_SLOT: u32 = u32::MAX;

impl PointSet {
    pub fn new(dim: usize) -> Result<Self> {
        if !(2..=MAX_DIM).contains(&dim) {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(PointSet { dim, ids: Vec::new(), coords: Vec::new(), slot_of: Vec::new() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    fn slot(&self, id: UnitId) -> Option<usize> {
        match self.slot_of.get(id.index()) {
            Some(&s) if s != NO_SLOT => Some(s as usize),
            _ => None,
        }
    }

    pub fn contains(&self, id: UnitId) -> bool {
        self.slot(id).is_some()
    }

    fn check_dim(&self, p: &Point) -> Result<()> {
        if p.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: p.dim() });
        }
        Ok(())
    }

    /// Inserts or overwrites the position of `id`.
    pub fn insert(&mut self, id: UnitId, p: Point) -> Result<()> {
        self.check_dim(&p)?;
        if let Some(s) = self.slot(id) {
            self.coords[s * self.dim..(s + 1) * self.dim].copy_from_slice(p.coords());
            return Ok(());
        }
        if self.slot_of.len() <= id.index() {
            self.slot_of.resize(id.index() + 1, NO_SLOT);
        }
        self.slot_of[id.index()] = self.ids.len() as u32;
        self.ids.push(id);
        self.coords.extend_from_slice(p.coords());
        Ok(())
    }

    pub fn set(&mut self, id: UnitId, p: Point) -> Result<()> {
        self.check_dim(&p)?;
        let s = self.slot(id).ok_or(Error::UnknownUnit(id))?;
        self.coords[s * self.dim..(s + 1) * self.dim].copy_from_slice(p.coords());
        Ok(())
    }

    pub fn remove(&mut self, id: UnitId) -> bool {
        let Some(s) = self.slot(id) else { return false };
        let last = self.ids.len() - 1;
        let d = self.dim;
        if s != last {
            let moved = self.ids[last];
            self.ids[s] = moved;
            self.coords.copy_within(last * d..(last + 1) * d, s * d);
            self.slot_of[moved.index()] = s as u32;
        }
        self.ids.pop();
        self.coords.truncate(last * d);
        self.slot_of[id.index()] = NO_SLOT;
        true
    }

    pub fn get(&self, id: UnitId) -> Option<Point> {
        let s = self.slot(id)?;
        Some(Point::new(&self.coords[s * self.dim..(s + 1) * self.dim]).expect("stored point"))
    }

    pub fn iter(&self) -> impl Iterator<Item = (UnitId, Point)> + '_ {
        self.ids.iter().enumerate().map(move |(s, &id)| {
            (id, Point::new(&self.coords[s * self.dim..(s + 1) * self.dim]).expect("stored point"))
        })
    }

    /// Closest and second-closest ids to `query`; same ordering as [`nearest_two`].
    pub fn nearest_two(&self, query: &Point) -> Result<(UnitId, UnitId)> {
        self.check_dim(query)?;
        if self.ids.len() < 2 {
            return Err(Error::TooFewPoints { needed: 2, found: self.ids.len() });
        }
        let q = query.coords();
        let mut best: Option<(f64, UnitId)> = None;
        let mut second: Option<(f64, UnitId)> = None;
        for (s, chunk) in self.coords.chunks_exact(self.dim).enumerate() {
            let mut d2 = 0.0;
            for (a, b) in chunk.iter().zip(q) {
                let t = a - b;
                d2 += t * t;
            }
            if let Some(sec) = second {
                if d2 > sec.0 {
                    continue;
                }
            }
            push_candidate(&mut best, &mut second, (d2, self.ids[s]));
        }
        Ok((best.unwrap().1, second.unwrap().1))
    }
}

/// Axis-aligned bounding box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundingBox {
    pub min: Point,
    pub max: Point,
}

impl BoundingBox {
    pub fn of(points: &[Point]) -> Result<Self> {
        let first = points.first().ok_or(Error::TooFewPoints { needed: 1, found: 0 })?;
        let mut min = *first;
        let mut max = *first;
        for p in points {
            if p.dim() != first.dim() {
                return Err(Error::DimensionMismatch { expected: first.dim(), found: p.dim() });
            }
            for i in 0..p.dim() {
                min.coords[i] = min.coords[i].min(p.coords[i]);
                max.coords[i] = max.coords[i].max(p.coords[i]);
            }
        }
        Ok(BoundingBox { min, max })
    }

    pub fn center(&self) -> Point {
        self.min.midpoint(&self.max)
    }

    /// Length of the longest edge.
    pub fn major(&self) -> f64 {
        (0..self.min.dim()).map(|i| self.max.coord(i) - self.min.coord(i)).fold(0.0, f64::max)
    }
}

/// Uniform scaling about a fixed center.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rescale {
    pub center: Point,
    pub factor: f64,
}

impl Rescale {
    pub fn identity(dim: usize) -> Self {
        Rescale { center: Point::origin(dim), factor: 1.0 }
    }

    /// Scaling about the box center that brings the box's major edge to `major`.
    pub fn to_major(bbox: &BoundingBox, major: f64) -> Option<Self> {
        let m = bbox.major();
        if m <= 0.0 {
            return None;
        }
        Some(Rescale { center: bbox.center(), factor: major / m })
    }

    #[inline]
    pub fn apply(&self, p: &Point) -> Point {
        self.center.lerp(p, self.factor)
    }
}

#[derive(Clone, Debug)]
pub struct Rescaled {
    pub points: Vec<Point>,
    pub transform: Rescale,
    /// Set when every point coincides and no scale could be computed.
    pub degenerate: bool,
}

/// Scales `points` about their bounding-box center so the longest box edge
/// equals `major`.
pub fn rescale_to_major(points: &[Point], major: f64) -> Result<Rescaled> {
    if !(major > 0.0 && major.is_finite()) {
        return Err(Error::InvalidParams(format!("major size must be positive, got {major}")));
    }
    let bbox = BoundingBox::of(points)?;
    match Rescale::to_major(&bbox, major) {
        Some(t) => {
            Ok(Rescaled { points: points.iter().map(|p| t.apply(p)).collect(), transform: t, degenerate: false })
        }
        None => {
            Ok(Rescaled { points: points.to_vec(), transform: Rescale::identity(points[0].dim()), degenerate: true })
        }
    }
}
