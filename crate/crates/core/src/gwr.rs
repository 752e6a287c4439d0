//! Grow When Required baseline: habituation-gated growth with a fixed
//! insertion radius and no topological state machine.

use crate::complex::SimplicialComplex;
use crate::geometry::{Point, PointSet};
use crate::habituation::habituate;
use crate::network::{IndexedComplex, StepEvents, UnitState};
use crate::{Error, ManifoldDim, Result, UnitId};

#[derive(Clone, Debug, PartialEq)]
pub struct GwrParams {
    /// Insertion radius `R_g`.
    pub radius: f64,
    pub firing_max: f64,
    pub habituation_threshold: f64,
    pub alpha_h: f64,
    pub tau_f: f64,
    pub tau_f_n: f64,
    pub max_age: u32,
    pub eta_b: f64,
    pub eta_nb: f64,
}

impl Default for GwrParams {
    fn default() -> Self {
        GwrParams {
            radius: 25.0,
            firing_max: 1.0,
            habituation_threshold: 0.243,
            alpha_h: 1.05,
            tau_f: 3.33,
            tau_f_n: 14.33,
            max_age: 30,
            eta_b: 0.05,
            eta_nb: 0.0005,
        }
    }
}

impl GwrParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.radius > 0.0
            && self.radius.is_finite()
            && self.firing_max > 0.0
            && self.habituation_threshold > 0.0
            && self.habituation_threshold < self.firing_max
            && self.alpha_h > 0.0
            && self.tau_f >= self.alpha_h
            && self.tau_f_n >= self.alpha_h
            && self.max_age >= 1
            && self.eta_b > 0.0
            && self.eta_b <= 1.0
            && self.eta_nb > 0.0
            && self.eta_nb <= 1.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParams(format!("invalid GWR parameters: {self:?}")))
        }
    }
}

/// A GWR network.
#[derive(Clone, Debug)]
pub struct Gwr {
    params: GwrParams,
    complex: SimplicialComplex,
    positions: PointSet,
    firing: Vec<f64>,
    signals: u64,
    insertions: u64,
}

impl Gwr {
    pub fn new(params: GwrParams, first: Point, second: Point) -> Result<Self> {
        params.validate()?;
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
        }
        let mut g = Gwr {
            complex: SimplicialComplex::new(ManifoldDim::Surface),
            positions: PointSet::new(first.dim())?,
            firing: Vec::new(),
            signals: 0,
            insertions: 0,
            params,
        };
        g.spawn(first);
        g.spawn(second);
        Ok(g)
    }

    fn spawn(&mut self, p: Point) -> UnitId {
        let id = self.complex.add_vertex();
        self.positions.insert(id, p).expect("dimension checked");
        if self.firing.len() <= id.index() {
            self.firing.resize(id.index() + 1, 0.0);
        }
        self.firing[id.index()] = self.params.firing_max;
        id
    }

    fn discard(&mut self, id: UnitId) {
        self.positions.remove(id);
        self.complex.remove_vertex(id);
    }

    pub fn params(&self) -> &GwrParams {
        &self.params
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn unit_count(&self) -> usize {
        self.positions.len()
    }

    pub fn signals(&self) -> u64 {
        self.signals
    }

    pub fn insertions(&self) -> u64 {
        self.insertions
    }

    pub fn position(&self, id: UnitId) -> Option<Point> {
        self.positions.get(id)
    }

    pub fn firing(&self, id: UnitId) -> Option<f64> {
        self.positions.contains(id).then(|| self.firing[id.index()])
    }

    pub fn positions(&self) -> impl Iterator<Item = (UnitId, Point)> + '_ {
        self.positions.iter()
    }

    /// The complex with compact indices; units are Active or Habituated.
    pub fn to_indexed(&self) -> IndexedComplex {
        let ids: Vec<UnitId> = self.complex.vertices().collect();
        let index = |u: UnitId| ids.binary_search(&u).expect("live vertex");
        let state = |u: UnitId| {
            if self.firing[u.index()] <= self.params.habituation_threshold {
                UnitState::Habituated
            } else {
                UnitState::Active
            }
        };
        IndexedComplex {
            positions: ids.iter().map(|&u| self.positions.get(u).unwrap()).collect(),
            states: ids.iter().map(|&u| state(u)).collect(),
            edges: self.complex.edges().map(|((a, b), _)| [index(a), index(b)]).collect(),
            triangles: self.complex.triangles().map(|[a, b, c]| [index(a), index(b), index(c)]).collect(),
            ids,
        }
    }

    /// Distance from `p` to the nearest unit.
    pub fn distance_to_nearest(&self, p: &Point) -> f64 {
        self.positions.iter().map(|(_, q)| q.squared_distance(p)).fold(f64::INFINITY, f64::min).sqrt()
    }

    /// One GWR adaptation step.
    pub fn gwr_step(&mut self, xi: &Point) -> Result<StepEvents> {
        if xi.dim() != self.positions.dim() {
            return Err(Error::DimensionMismatch { expected: self.positions.dim(), found: xi.dim() });
        }
        if !xi.is_finite() {
            return Err(Error::NonFinite);
        }
        let p = self.params.clone();
        self.signals += 1;
        let (b, s) = self.positions.nearest_two(xi)?;
        let mut ev = StepEvents { winner: b, second: s, ..Default::default() };
        if self.complex.add_edge(b, s)? {
            ev.edge_created = true;
        } else {
            ev.edge_refreshed = true;
        }

        let mut expired = Vec::new();
        for n in self.complex.neighbors(b).to_vec() {
            let age = self.complex.edge_age(b, n).expect("incident edge") + 1;
            self.complex.set_edge_age(b, n, age);
            if age > p.max_age {
                expired.push(n);
            }
        }
        for n in expired {
            self.complex.remove_edge(b, n);
            ev.edges_pruned += 1;
            if self.complex.degree(n) == 0 {
                self.discard(n);
                ev.units_pruned.push(n);
            }
        }

        let pb = self.positions.get(b).expect("winner");
        let habituated = self.firing[b.index()] <= p.habituation_threshold;
        if habituated && pb.squared_distance(xi).sqrt() > p.radius {
            let n = self.spawn(pb.midpoint(xi));
            self.complex.add_edge(b, n)?;
            self.complex.remove_edge(b, s);
            ev.unit_inserted = Some(n);
            self.insertions += 1;
        } else {
            let fb = self.firing[b.index()];
            self.positions.set(b, pb.lerp(xi, p.eta_b * fb))?;
            for n in self.complex.neighbors(b).to_vec() {
                let q = self.positions.get(n).expect("neighbor");
                self.positions.set(n, q.lerp(xi, p.eta_nb * self.firing[n.index()]))?;
            }
        }

        self.firing[b.index()] = habituate(self.firing[b.index()], p.firing_max, p.alpha_h, p.tau_f, 1.0);
        for n in self.complex.neighbors(b).to_vec() {
            let f = &mut self.firing[n.index()];
            *f = habituate(*f, p.firing_max, p.alpha_h, p.tau_f_n, 1.0);
        }
        Ok(ev)
    }
}

/// Largest distance from a sample to its nearest unit.
pub fn covering_radius(g: &Gwr, samples: &[Point]) -> f64 {
    samples.iter().map(|s| g.distance_to_nearest(s)).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{ParametricShape, SignalSource};

    fn two() -> Gwr {
        Gwr::new(GwrParams::default(), Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap()
    }

    #[test]
    fn fresh_winner_never_inserts() {
        let mut g = two();
        let ev = g.gwr_step(&Point::xy(-1000.0, 0.0)).unwrap();
        assert_eq!(ev.unit_inserted, None);
        assert!(ev.edge_created);
    }

    #[test]
    fn habituated_far_winner_inserts() {
        let mut g = two();
        for _ in 0..20 {
            g.gwr_step(&Point::xy(-0.1, 0.0)).unwrap();
        }
        assert!(g.firing(UnitId(0)).unwrap() <= 0.243);
        let ev = g.gwr_step(&Point::xy(-100.0, 0.0)).unwrap();
        let n = ev.unit_inserted.unwrap();
        let pb = g.position(UnitId(0)).unwrap();
        assert!((g.position(n).unwrap().coord(0) - (pb.coord(0) - 100.0) / 2.0).abs() < 1e-12);
        assert!(g.complex().has_edge(UnitId(0), n));
    }

    #[test]
    fn invalid_params() {
        let p = GwrParams { radius: -1.0, ..Default::default() };
        assert!(Gwr::new(p, Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).is_err());
    }

    fn circle_run(seed: u64) -> (Gwr, Vec<Point>) {
        let mut src = SignalSource::parametric(ParametricShape::Circle { radius: 1.0 }, 256.0, 0.0, seed).unwrap();
        let sample = src.take_signals(2000);
        let mut g = Gwr::new(GwrParams::default(), sample[0], sample[1]).unwrap();
        let mut quiet = 0;
        while quiet < 3 && g.signals() < 2_000_000 {
            let before = g.insertions();
            for xi in &sample {
                g.gwr_step(xi).unwrap();
            }
            quiet = if g.insertions() == before { quiet + 1 } else { 0 };
        }
        (g, sample)
    }

    #[test]
    fn covers_a_recorded_circle_sample() {
        let (g, sample) = circle_run(5);
        assert!(covering_radius(&g, &sample) <= g.params().radius);
    }

    #[test]
    fn deterministic() {
        assert_eq!(circle_run(6).0.unit_count(), circle_run(6).0.unit_count());
    }
}
