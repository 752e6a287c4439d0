//! Self-Organizing Adaptive Map (SOAM): a growing self-organizing network
//! that adapts a simplicial complex to a stream of samples from a curve or a
//! surface until every unit has a manifold neighborhood.
//!
//! The crate also carries the verification side: Euler characteristic,
//! orientability and genus of the result, plus brute-force Delaunay and
//! witness-graph oracles for small planar point sets.

use std::fmt;

pub mod complex;
pub mod error;
pub mod geometry;
pub mod gwr;
pub mod habituation;
pub mod io;
pub mod meshgen;
pub mod network;
pub mod pipeline;
pub mod run;
pub mod sampling;
pub mod verify;

pub use complex::{classify_link, LinkClass, LinkGraph, SimplicialComplex};
pub use error::{Error, Result};
pub use geometry::{distance, rescale_to_major, BoundingBox, Point, PointSet};
pub use network::{Soam, SoamParams, StepEvents, Unit, UnitState};
pub use run::{RunReport, StopReason, Termination};

/// Identifier of a unit (vertex). Fresh ids are never reused within a run.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId(pub u32);

impl UnitId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Expected dimension of the sampled manifold.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ManifoldDim {
    Curve,
    #[default]
    Surface,
}

impl ManifoldDim {
    pub fn from_int(d: u32) -> Result<Self> {
        match d {
            1 => Ok(ManifoldDim::Curve),
            2 => Ok(ManifoldDim::Surface),
            _ => Err(Error::InvalidParams(format!("manifold dimension must be 1 or 2, got {d}"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            ManifoldDim::Curve => 1,
            ManifoldDim::Surface => 2,
        }
    }
}
