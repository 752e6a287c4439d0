//! The SOAM network: units with firing counters and insertion thresholds,
//! the topology-driven state machine, and the per-signal update.

use std::fmt;
use std::str::FromStr;

use crate::complex::{classify_link, LinkClass, SimplicialComplex};
use crate::geometry::{Point, PointSet};
use crate::habituation::{dishabituate, habituate};
use crate::{Error, ManifoldDim, Result, UnitId};

/// Topological state of a unit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum UnitState {
    Active,
    Habituated,
    Connected,
    HalfDisk,
    Disk,
    Boundary,
    Patch,
    Singular,
}

impl UnitState {
    pub const ALL: [UnitState; 8] = [
        UnitState::Active,
        UnitState::Habituated,
        UnitState::Connected,
        UnitState::HalfDisk,
        UnitState::Disk,
        UnitState::Boundary,
        UnitState::Patch,
        UnitState::Singular,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            UnitState::Active => "active",
            UnitState::Habituated => "habituated",
            UnitState::Connected => "connected",
            UnitState::HalfDisk => "halfdisk",
            UnitState::Disk => "disk",
            UnitState::Boundary => "boundary",
            UnitState::Patch => "patch",
            UnitState::Singular => "singular",
        }
    }

    /// Half-disk, disk, boundary or patch.
    #[inline]
    pub fn is_regular(self) -> bool {
        matches!(self, UnitState::HalfDisk | UnitState::Disk | UnitState::Boundary | UnitState::Patch)
    }

    #[inline]
    pub fn is_stable(self) -> bool {
        self == UnitState::Patch
    }

    /// Every state but `Active`.
    #[inline]
    pub fn is_habituated(self) -> bool {
        self != UnitState::Active
    }

    /// The state with the neighbor-dependent refinement removed.
    #[inline]
    fn base(self) -> UnitState {
        match self {
            UnitState::Patch => UnitState::Disk,
            UnitState::Boundary => UnitState::HalfDisk,
            s => s,
        }
    }
}

impl fmt::Display for UnitState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for UnitState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        UnitState::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown unit state '{s}'")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Unit {
    pub position: Point,
    /// Firing counter `f`.
    pub firing: f64,
    /// Insertion threshold `r`.
    pub threshold: f64,
    pub state: UnitState,
    /// Last signal at which the unit was winner or second.
    pub last_seen: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Winner,
    Neighbor,
}

/// Idle units are looked for once every this many signals.
pub const IDLE_SCAN_PERIOD: u64 = 1000;

/// Every constant of the algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct SoamParams {
    pub manifold_dim: ManifoldDim,
    /// Initial and maximum firing counter `F`.
    pub firing_max: f64,
    /// A unit is habituated once its firing counter is at or below this.
    pub habituation_threshold: f64,
    pub alpha_h: f64,
    pub tau_f: f64,
    pub tau_f_n: f64,
    /// Initial and maximum insertion threshold `R`.
    pub r_max: f64,
    pub r_min: f64,
    /// Habituation rate of thresholds; `None` derives `1 / (r_max - r_min)`,
    /// which puts the decay asymptote exactly at `r_min`.
    pub alpha_r: Option<f64>,
    pub tau_r_hab: f64,
    pub tau_r_dis: f64,
    pub max_age: u32,
    pub eta_b: f64,
    pub eta_nb: f64,
    pub eta_stable: f64,
    pub seed: u64,
    pub max_signals: u64,
    /// Consecutive all-stable signals required to stop.
    pub stability_window: u64,
    /// Units that have been neither winner nor second for more than this
    /// many signals are removed; 0 disables the rule.
    pub idle_limit: u64,
}

impl Default for SoamParams {
    fn default() -> Self {
        SoamParams {
            manifold_dim: ManifoldDim::Surface,
            firing_max: 1.0,
            habituation_threshold: 0.243,
            alpha_h: 1.05,
            tau_f: 3.33,
            tau_f_n: 14.33,
            r_max: 25.0,
            r_min: 0.5,
            alpha_r: None,
            tau_r_hab: 3.0,
            tau_r_dis: 9.0,
            max_age: 30,
            eta_b: 0.05,
            eta_nb: 0.0005,
            eta_stable: 0.02,
            seed: 1,
            max_signals: 20_000_000,
            stability_window: 10_000,
            idle_limit: 100_000,
        }
    }
}

impl SoamParams {
    pub fn for_dim(manifold_dim: ManifoldDim) -> Self {
        SoamParams { manifold_dim, ..Default::default() }
    }

    pub fn alpha_r(&self) -> f64 {
        self.alpha_r.unwrap_or(1.0 / (self.r_max - self.r_min))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        let finite_pos = |name: &str, v: f64| -> Result<()> {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{name} must be positive, got {v}")))
            }
        };
        for (name, v) in [
            ("firing_max", self.firing_max),
            ("alpha_h", self.alpha_h),
            ("tau_f", self.tau_f),
            ("tau_f_n", self.tau_f_n),
            ("r_max", self.r_max),
            ("r_min", self.r_min),
            ("tau_r_hab", self.tau_r_hab),
            ("tau_r_dis", self.tau_r_dis),
            ("alpha_r", self.alpha_r()),
        ] {
            finite_pos(name, v)?;
        }
        for (name, v) in [("eta_b", self.eta_b), ("eta_nb", self.eta_nb), ("eta_stable", self.eta_stable)] {
            if !(v > 0.0 && v <= 1.0) {
                return bad(format!("{name} must be in (0, 1], got {v}"));
            }
        }
        if self.r_min.partial_cmp(&self.r_max) != Some(std::cmp::Ordering::Less) {
            return bad(format!("need r_min < r_max, got {} >= {}", self.r_min, self.r_max));
        }
        if !(self.habituation_threshold > 0.0 && self.habituation_threshold < self.firing_max) {
            return bad(format!(
                "habituation_threshold must be in (0, firing_max), got {}",
                self.habituation_threshold
            ));
        }
        if self.max_age < 1 {
            return bad("max_age must be at least 1".into());
        }
        if self.stability_window < 1 {
            return bad("stability_window must be at least 1".into());
        }
        // unit-step Euler must not overshoot the fixed points
        for (name, alpha, tau) in [
            ("tau_f", self.alpha_h, self.tau_f),
            ("tau_f_n", self.alpha_h, self.tau_f_n),
            ("tau_r_hab", self.alpha_r(), self.tau_r_hab),
            ("tau_r_dis", self.alpha_r(), self.tau_r_dis),
        ] {
            if alpha / tau > 1.0 {
                return bad(format!("{name} too small for a unit time step (alpha/tau > 1)"));
            }
        }
        Ok(())
    }
}

/// One step of the firing-counter dynamics.
pub fn adapt_firing(f: f64, role: Role, params: &SoamParams) -> f64 {
    let tau = match role {
        Role::Winner => params.tau_f,
        Role::Neighbor => params.tau_f_n,
    };
    habituate(f, params.firing_max, params.alpha_h, tau, 1.0)
}

/// One step of the insertion-threshold dynamics: singular units habituate,
/// regular units dishabituate, all others keep their threshold.
pub fn adapt_threshold(r: f64, state: UnitState, params: &SoamParams) -> f64 {
    if state == UnitState::Singular {
        habituate(r, params.r_max, params.alpha_r(), params.tau_r_hab, 1.0)
    } else if state.is_regular() {
        dishabituate(r, params.r_max, params.alpha_r(), params.tau_r_dis, 1.0)
    } else {
        r
    }
}

/// Mutations performed by a single signal.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepEvents {
    pub winner: UnitId,
    pub second: UnitId,
    pub edge_created: bool,
    pub edge_refreshed: bool,
    pub unit_inserted: Option<UnitId>,
    /// `(kept, removed)`
    pub units_merged: Option<(UnitId, UnitId)>,
    pub edges_pruned: usize,
    pub units_pruned: Vec<UnitId>,
    pub reseeded: Option<UnitId>,
    /// `(unit, old, new)`; removed units are not listed.
    pub state_changes: Vec<(UnitId, UnitState, UnitState)>,
}

/// Displacements applied by one position update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Displacement {
    pub winner: f64,
    pub max_neighbor: f64,
    pub neighbors_moved: usize,
}

/// Cumulative event counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub insertions: u64,
    pub merges: u64,
    pub edges_pruned: u64,
    pub units_pruned: u64,
    pub reseeds: u64,
}

/// A SOAM network together with its adaptation state.
#[derive(Clone, Debug)]
pub struct Soam {
    params: SoamParams,
    complex: SimplicialComplex,
    units: Vec<Option<Unit>>,
    positions: PointSet,
    state_counts: [usize; 8],
    signals: u64,
    stable_streak: u64,
    counters: Counters,
}

impl Soam {
    /// Two active units at the given positions, no connections.
    pub fn new(params: SoamParams, first: Point, second: Point) -> Result<Self> {
        params.validate()?;
        if first.dim() != second.dim() {
            return Err(Error::DimensionMismatch { expected: first.dim(), found: second.dim() });
        }
        let mut soam = Soam {
            complex: SimplicialComplex::new(params.manifold_dim),
            positions: PointSet::new(first.dim())?,
            units: Vec::new(),
            state_counts: [0; 8],
            signals: 0,
            stable_streak: 0,
            counters: Counters::default(),
            params,
        };
        soam.spawn(first);
        soam.spawn(second);
        Ok(soam)
    }

    /// Rebuilds a network from stored parts; used by snapshot loading.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn from_parts(
        params: SoamParams,
        dim: usize,
        units: Vec<(UnitId, Unit)>,
        next_id: UnitId,
        edges: Vec<(UnitId, UnitId, u32)>,
        signals: u64,
        stable_streak: u64,
        counters: Counters,
    ) -> Result<Self> {
        params.validate()?;
        let mut soam = Soam {
            complex: SimplicialComplex::new(params.manifold_dim),
            positions: PointSet::new(dim)?,
            units: Vec::new(),
            state_counts: [0; 8],
            signals,
            stable_streak,
            counters,
            params,
        };
        for (id, unit) in units {
            soam.complex.insert_vertex(id)?;
            soam.positions.insert(id, unit.position)?;
            if soam.units.len() <= id.index() {
                soam.units.resize(id.index() + 1, None);
            }
            soam.units[id.index()] = Some(unit);
            soam.state_counts[unit.state.index()] += 1;
        }
        for (a, b, age) in edges {
            if !soam.complex.add_edge_with_age(a, b, age)? {
                return Err(Error::Snapshot(format!("duplicate edge ({a}, {b})")));
            }
        }
        if next_id < soam.complex.next_id() {
            return Err(Error::Snapshot(format!("next id {next_id} below an existing unit id")));
        }
        while soam.complex.next_id() < next_id {
            // advance the allocator without creating units
            let id = soam.complex.add_vertex();
            soam.complex.remove_vertex(id);
        }
        Ok(soam)
    }

    pub fn params(&self) -> &SoamParams {
        &self.params
    }

    /// Changes the run limits, which do not affect the dynamics.
    pub fn set_limits(&mut self, max_signals: u64, stability_window: u64) {
        self.params.max_signals = max_signals;
        self.params.stability_window = stability_window;
    }

    pub fn complex(&self) -> &SimplicialComplex {
        &self.complex
    }

    pub fn dim(&self) -> usize {
        self.positions.dim()
    }

    pub fn unit(&self, id: UnitId) -> Option<&Unit> {
        self.units.get(id.index()).and_then(|u| u.as_ref())
    }

    fn unit_mut(&mut self, id: UnitId) -> &mut Unit {
        self.units[id.index()].as_mut().expect("live unit")
    }

    /// Live units in ascending id order.
    pub fn units(&self) -> impl Iterator<Item = (UnitId, &Unit)> + '_ {
        self.units.iter().enumerate().filter_map(|(i, u)| u.as_ref().map(|u| (UnitId(i as u32), u)))
    }

    pub fn unit_count(&self) -> usize {
        self.complex.vertex_count()
    }

    pub fn state_counts(&self) -> [usize; 8] {
        self.state_counts
    }

    pub fn count(&self, state: UnitState) -> usize {
        self.state_counts[state.index()]
    }

    pub fn signals(&self) -> u64 {
        self.signals
    }

    /// Consecutive signals after which every unit was stable.
    pub fn stable_streak(&self) -> u64 {
        self.stable_streak
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn all_stable(&self) -> bool {
        self.unit_count() > 0 && self.count(UnitState::Patch) == self.unit_count()
    }

    fn spawn(&mut self, position: Point) -> UnitId {
        let id = self.complex.add_vertex();
        self.positions.insert(id, position).expect("dimension checked");
        if self.units.len() <= id.index() {
            self.units.resize(id.index() + 1, None);
        }
        self.units[id.index()] = Some(Unit {
            position,
            firing: self.params.firing_max,
            threshold: self.params.r_max,
            state: UnitState::Active,
            last_seen: self.signals,
        });
        self.state_counts[UnitState::Active.index()] += 1;
        id
    }

    fn discard(&mut self, id: UnitId) {
        let unit = self.units[id.index()].take().expect("live unit");
        self.state_counts[unit.state.index()] -= 1;
        self.positions.remove(id);
        self.complex.remove_vertex(id);
    }

    fn move_unit(&mut self, id: UnitId, p: Point) {
        self.unit_mut(id).position = p;
        self.positions.set(id, p).expect("live unit");
    }

    fn is_habituated_f(&self, id: UnitId) -> bool {
        self.unit(id).is_some_and(|u| u.firing <= self.params.habituation_threshold)
    }

    /// State of `u` ignoring the neighbor-regularity refinement.
    fn base_state(&self, u: UnitId) -> UnitState {
        if !self.is_habituated_f(u) {
            return UnitState::Active;
        }
        let neighbors = self.complex.neighbors(u);
        if neighbors.is_empty() || !neighbors.iter().all(|&n| self.is_habituated_f(n)) {
            return UnitState::Habituated;
        }
        let link = self.complex.link_of(u).expect("live unit");
        match classify_link(&link, self.params.manifold_dim) {
            LinkClass::Cycle => UnitState::Disk,
            LinkClass::Path => UnitState::HalfDisk,
            LinkClass::Cycle3 | LinkClass::Overconnected => UnitState::Singular,
            LinkClass::Empty | LinkClass::Underconnected => UnitState::Connected,
        }
    }

    fn refine(base: UnitState, mut neighbor_bases: impl Iterator<Item = UnitState>) -> UnitState {
        match base {
            UnitState::Disk if neighbor_bases.all(UnitState::is_regular) => UnitState::Patch,
            UnitState::HalfDisk if neighbor_bases.all(UnitState::is_regular) => UnitState::Boundary,
            s => s,
        }
    }

    /// State of `u` recomputed from scratch from firing counters and topology.
    pub fn derived_state(&self, u: UnitId) -> Result<UnitState> {
        if self.unit(u).is_none() {
            return Err(Error::UnknownUnit(u));
        }
        let base = self.base_state(u);
        Ok(Self::refine(base, self.complex.neighbors(u).iter().map(|&n| self.base_state(n))))
    }

    /// Recomputes and stores the state of `u`.
    pub fn update_state(&mut self, u: UnitId) -> Result<UnitState> {
        let s = self.derived_state(u)?;
        self.set_state(u, s);
        Ok(s)
    }

    fn set_state(&mut self, u: UnitId, s: UnitState) -> Option<UnitState> {
        let unit = self.unit_mut(u);
        let old = unit.state;
        if old == s {
            return None;
        }
        unit.state = s;
        self.state_counts[old.index()] -= 1;
        self.state_counts[s.index()] += 1;
        Some(old)
    }

    /// Units whose stored state differs from a from-scratch recomputation.
    pub fn stale_states(&self) -> Vec<(UnitId, UnitState, UnitState)> {
        self.units()
            .filter_map(|(id, u)| {
                let d = self.derived_state(id).unwrap();
                (d != u.state).then_some((id, u.state, d))
            })
            .collect()
    }

    /// Refreshes the states that can depend on `seeds`: units whose
    /// habituation flag or incident edges changed.
    fn refresh_states(&mut self, seeds: &mut Vec<UnitId>, events: &mut StepEvents) {
        seeds.retain(|&u| self.unit(u).is_some());
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.is_empty() {
            return;
        }
        // base states change for seeds and their neighbors
        let mut base_set = seeds.clone();
        for &u in seeds.iter() {
            base_set.extend_from_slice(self.complex.neighbors(u));
        }
        base_set.sort_unstable();
        base_set.dedup();
        let bases: Vec<(UnitId, UnitState)> = base_set.iter().map(|&u| (u, self.base_state(u))).collect();
        let lookup = |soam: &Soam, u: UnitId| match bases.binary_search_by_key(&u, |p| p.0) {
            Ok(i) => bases[i].1,
            Err(_) => soam.unit(u).expect("live unit").state.base(),
        };
        // refinements change one ring further out
        let mut refine_set = base_set.clone();
        for &u in &base_set {
            refine_set.extend_from_slice(self.complex.neighbors(u));
        }
        refine_set.sort_unstable();
        refine_set.dedup();
        let new_states: Vec<(UnitId, UnitState)> = refine_set
            .iter()
            .map(|&u| {
                let base = lookup(self, u);
                let s = Self::refine(base, self.complex.neighbors(u).iter().map(|&n| lookup(self, n)));
                (u, s)
            })
            .collect();
        for (u, s) in new_states {
            if let Some(old) = self.set_state(u, s) {
                events.state_changes.push((u, old, s));
            }
        }
    }

    /// Feeds one signal through the network.
    pub fn process_signal(&mut self, signal: &Point) -> Result<StepEvents> {
        if signal.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: signal.dim() });
        }
        if !signal.is_finite() {
            return Err(Error::NonFinite);
        }
        let p = self.params.clone();
        self.signals += 1;

        // closest and second-closest
        let (b, s) = self.positions.nearest_two(signal)?;
        let mut ev = StepEvents { winner: b, second: s, ..Default::default() };
        let mut dirty: Vec<UnitId> = Vec::new();
        let now = self.signals;
        self.unit_mut(b).last_seen = now;
        self.unit_mut(s).last_seen = now;

        // competitive Hebbian rule
        if self.complex.add_edge(b, s)? {
            ev.edge_created = true;
            dirty.extend([b, s]);
        } else {
            ev.edge_refreshed = true;
        }

        // aging and pruning, frozen around stable winners
        let winner = *self.unit(b).expect("winner");
        if !winner.state.is_stable() {
            let neighbors = self.complex.neighbors(b).to_vec();
            let mut expired = Vec::new();
            for &n in &neighbors {
                let age = self.complex.edge_age(b, n).expect("incident edge") + 1;
                self.complex.set_edge_age(b, n, age);
                if age > p.max_age {
                    expired.push(n);
                }
            }
            for n in expired {
                self.complex.remove_edge(b, n);
                ev.edges_pruned += 1;
                dirty.extend([b, n]);
                if self.complex.degree(n) == 0 {
                    self.discard(n);
                    ev.units_pruned.push(n);
                }
            }
        }

        // insertion or merge
        if winner.state.is_habituated() {
            let pb = winner.position;
            let ps = self.unit(s).expect("second").position;
            if pb.squared_distance(signal).sqrt() > winner.threshold {
                let n = self.spawn(pb.midpoint(signal));
                self.complex.add_edge(b, n)?;
                // s may be left isolated; it reconnects as soon as it is
                // among the two nearest units again
                self.complex.remove_edge(b, s);
                dirty.extend([b, s, n]);
                ev.unit_inserted = Some(n);
            } else if pb.squared_distance(&ps).sqrt() < p.r_min {
                self.merge(b, s, &mut dirty);
                ev.units_merged = Some((b, s));
                if self.unit_count() < 2 {
                    let r = self.spawn(*signal);
                    ev.reseeded = Some(r);
                    dirty.push(r);
                }
            }
        }

        // firing counters
        let neighbors = self.complex.neighbors(b).to_vec();
        let threshold = p.habituation_threshold;
        for (u, role) in std::iter::once((b, Role::Winner)).chain(neighbors.iter().map(|&n| (n, Role::Neighbor))) {
            let unit = self.unit_mut(u);
            let was = unit.firing <= threshold;
            unit.firing = adapt_firing(unit.firing, role, &p);
            if was != (unit.firing <= threshold) {
                dirty.push(u);
            }
        }

        if p.idle_limit > 0 && now.is_multiple_of(IDLE_SCAN_PERIOD) {
            self.expire_idle(now, &mut dirty, &mut ev);
        }

        // states
        self.refresh_states(&mut dirty, &mut ev);

        // insertion threshold of the winner
        let wb = self.unit_mut(b);
        wb.threshold = adapt_threshold(wb.threshold, wb.state, &p);

        self.adapt_positions(b, signal);

        self.counters.insertions += ev.unit_inserted.is_some() as u64;
        self.counters.merges += ev.units_merged.is_some() as u64;
        self.counters.edges_pruned += ev.edges_pruned as u64;
        self.counters.units_pruned += ev.units_pruned.len() as u64;
        self.counters.reseeds += ev.reseeded.is_some() as u64;
        if self.all_stable() {
            self.stable_streak += 1;
        } else {
            self.stable_streak = 0;
        }
        Ok(ev)
    }

    /// Removes units left behind by the adaptation: those that have not
    /// been among the two nearest units for more than `idle_limit` signals.
    /// Such units never win, so the aging rule alone never disconnects them.
    fn expire_idle(&mut self, now: u64, dirty: &mut Vec<UnitId>, ev: &mut StepEvents) {
        let limit = self.params.idle_limit;
        let idle: Vec<UnitId> =
            self.units().filter(|(_, u)| now.saturating_sub(u.last_seen) > limit).map(|(id, _)| id).collect();
        for id in idle {
            if self.unit(id).is_none() || self.unit_count() <= 2 {
                continue;
            }
            let neighbors = self.complex.neighbors(id).to_vec();
            ev.edges_pruned += neighbors.len();
            self.discard(id);
            ev.units_pruned.push(id);
            for n in neighbors {
                dirty.push(n);
                if self.complex.degree(n) == 0 && n != ev.winner && n != ev.second && self.unit_count() > 2 {
                    self.discard(n);
                    ev.units_pruned.push(n);
                }
            }
        }
    }

    /// `b` moves to the midpoint, takes over the connections of `s`, and `s`
    /// is removed. Colliding connections keep the larger age.
    fn merge(&mut self, b: UnitId, s: UnitId, dirty: &mut Vec<UnitId>) {
        let pb = self.unit(b).expect("winner").position;
        let ps = self.unit(s).expect("second").position;
        self.move_unit(b, pb.midpoint(&ps));
        let moved: Vec<(UnitId, u32)> = self
            .complex
            .neighbors(s)
            .iter()
            .filter(|&&x| x != b)
            .map(|&x| (x, self.complex.edge_age(s, x).expect("incident edge")))
            .collect();
        dirty.extend([b, s]);
        for (x, age) in moved {
            let age = self.complex.edge_age(b, x).map_or(age, |a| a.max(age));
            self.complex.add_edge_with_age(b, x, age).expect("live units");
            dirty.push(x);
        }
        self.discard(s);
    }

    /// Moves the winner and, unless it is stable, its neighbors towards `signal`.
    pub fn adapt_positions(&mut self, b: UnitId, signal: &Point) -> Displacement {
        let mut disp = Displacement::default();
        let Some(winner) = self.unit(b).copied() else { return disp };
        let stable = winner.state.is_stable();
        let eta = if stable { self.params.eta_stable } else { self.params.eta_b };
        let to = winner.position.lerp(signal, eta * winner.firing);
        disp.winner = to.squared_distance(&winner.position).sqrt();
        self.move_unit(b, to);
        if stable {
            return disp;
        }
        for n in self.complex.neighbors(b).to_vec() {
            let unit = *self.unit(n).expect("neighbor");
            let to = unit.position.lerp(signal, self.params.eta_nb * unit.firing);
            disp.max_neighbor = disp.max_neighbor.max(to.squared_distance(&unit.position).sqrt());
            disp.neighbors_moved += 1;
            self.move_unit(n, to);
        }
        disp
    }

    /// Snapshot of the current complex with compact vertex indices.
    pub fn to_indexed(&self) -> IndexedComplex {
        let ids: Vec<UnitId> = self.complex.vertices().collect();
        let index = |u: UnitId| ids.binary_search(&u).expect("live vertex");
        IndexedComplex {
            positions: ids.iter().map(|&u| self.unit(u).unwrap().position).collect(),
            states: ids.iter().map(|&u| self.unit(u).unwrap().state).collect(),
            edges: self.complex.edges().map(|((a, b), _)| [index(a), index(b)]).collect(),
            triangles: self.complex.triangles().map(|[a, b, c]| [index(a), index(b), index(c)]).collect(),
            ids,
        }
    }
}

/// A complex with vertices renumbered `0..n` in id order.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedComplex {
    pub ids: Vec<UnitId>,
    pub positions: Vec<Point>,
    pub states: Vec<UnitState>,
    pub edges: Vec<[usize; 2]>,
    pub triangles: Vec<[usize; 3]>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::habituation::habituation_floor;

    fn params(dim: ManifoldDim) -> SoamParams {
        SoamParams::for_dim(dim)
    }

    fn two_units() -> Soam {
        Soam::new(params(ManifoldDim::Surface), Point::xy(0.0, 0.0), Point::xy(10.0, 0.0)).unwrap()
    }

    #[test]
    fn init_state() {
        let s = two_units();
        assert_eq!(s.unit_count(), 2);
        assert_eq!(s.complex().edge_count(), 0);
        for (_, u) in s.units() {
            assert_eq!(u.state, UnitState::Active);
            assert_eq!(u.firing, 1.0);
            assert_eq!(u.threshold, 25.0);
        }
        assert_eq!(s.count(UnitState::Active), 2);
    }

    #[test]
    fn params_validation() {
        let d = SoamParams::default;
        assert!(d().validate().is_ok());
        assert!(SoamParams { r_min: 30.0, ..d() }.validate().is_err());
        assert!(SoamParams { eta_b: 0.0, ..d() }.validate().is_err());
        assert!(SoamParams { habituation_threshold: 1.5, ..d() }.validate().is_err());
        assert!(SoamParams { max_age: 0, ..d() }.validate().is_err());
        let p = SoamParams { tau_f: 0.5, ..d() };
        assert!(p.validate().is_err());
        assert!(Soam::new(p, Point::xy(0.0, 0.0), Point::xy(1.0, 1.0)).is_err());
        assert!(Soam::new(SoamParams::default(), Point::xy(0.0, 0.0), Point::xyz(1.0, 1.0, 1.0)).is_err());
    }

    #[test]
    fn alpha_r_puts_asymptote_at_r_min() {
        let p = SoamParams::default();
        assert!((habituation_floor(p.r_max, p.alpha_r()) - p.r_min).abs() < 1e-12);
        let mut r = p.r_max;
        for _ in 0..5000 {
            r = adapt_threshold(r, UnitState::Singular, &p);
        }
        assert!((r - p.r_min).abs() < 1e-9);
    }

    #[test]
    fn firing_steps() {
        let p = SoamParams::default();
        let d = adapt_firing(1.0, Role::Winner, &p) - 1.0;
        assert!((d + 1.0 / p.tau_f).abs() < 1e-15);
        let d = adapt_firing(1.0, Role::Neighbor, &p) - 1.0;
        assert!((d + 1.0 / p.tau_f_n).abs() < 1e-15);
        let floor = habituation_floor(1.0, p.alpha_h);
        assert!((adapt_firing(floor, Role::Winner, &p) - floor).abs() < 1e-15);
    }

    #[test]
    fn threshold_steps() {
        let p = SoamParams::default();
        assert_eq!(adapt_threshold(p.r_max, UnitState::Patch, &p), p.r_max);
        assert_eq!(adapt_threshold(p.r_max, UnitState::Disk, &p), p.r_max);
        let d = adapt_threshold(p.r_max, UnitState::Singular, &p) - p.r_max;
        assert!((d + 1.0 / p.tau_r_hab).abs() < 1e-12);
        assert_eq!(adapt_threshold(10.0, UnitState::Connected, &p), 10.0);
        assert!(adapt_threshold(10.0, UnitState::Boundary, &p) > 10.0);
    }

    #[test]
    fn first_signal_connects_the_pair() {
        let mut s = two_units();
        let ev = s.process_signal(&Point::xy(1.0, 0.0)).unwrap();
        assert_eq!((ev.winner, ev.second), (UnitId(0), UnitId(1)));
        assert!(ev.edge_created);
        assert_eq!(s.complex().edge_age(UnitId(0), UnitId(1)), Some(1));
        assert!(s.stale_states().is_empty());
    }

    #[test]
    fn active_winner_never_inserts() {
        let mut s = two_units();
        let ev = s.process_signal(&Point::xy(-1000.0, 0.0)).unwrap();
        assert_eq!(ev.unit_inserted, None);
        assert_eq!(s.unit_count(), 2);
    }

    /// Wins unit 0 until it is habituated, with signals on top of it.
    fn habituate_winner(s: &mut Soam) {
        while s.unit(UnitId(0)).unwrap().state == UnitState::Active {
            let at = s.unit(UnitId(0)).unwrap().position;
            s.process_signal(&at).unwrap();
        }
    }

    #[test]
    fn habituated_winner_inserts_at_midpoint() {
        let mut s = two_units();
        habituate_winner(&mut s);
        let pb = s.unit(UnitId(0)).unwrap().position;
        let xi = Point::xy(-60.0, 0.0);
        let ev = s.process_signal(&xi).unwrap();
        let n = ev.unit_inserted.expect("insertion");
        assert!(s.complex().has_edge(UnitId(0), n));
        assert!(!s.complex().has_edge(UnitId(0), UnitId(1)));
        // the second unit is left isolated but kept
        assert!(ev.units_pruned.is_empty());
        assert_eq!(s.complex().degree(UnitId(1)), 0);
        let pn = s.unit(n).unwrap().position;
        // positions adapt after insertion, so compare with the moved neighbor
        let expect = pb.midpoint(&xi);
        let f = 1.0;
        let moved = expect.lerp(&xi, s.params().eta_nb * adapt_firing(f, Role::Neighbor, s.params()));
        assert!(pn.squared_distance(&moved).sqrt() < 1e-12);
        assert!(pn.squared_distance(&xi) < pb.squared_distance(&xi));
        assert!(s.stale_states().is_empty());
    }

    #[test]
    fn habituated_winner_merges_close_pair() {
        let mut p = params(ManifoldDim::Surface);
        p.r_min = 2.0;
        let mut s = Soam::new(p, Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap();
        // a third unit so the merge keeps two alive
        let mut ev = StepEvents::default();
        for _ in 0..40 {
            ev = s.process_signal(&Point::xy(0.0, 0.0)).unwrap();
            if ev.units_merged.is_some() {
                break;
            }
        }
        assert_eq!(ev.units_merged, Some((UnitId(0), UnitId(1))));
        assert!(s.unit(UnitId(1)).is_none());
        // merging down to one unit reseeds at the signal
        assert_eq!(s.unit_count(), 2);
        assert!(ev.reseeded.is_some());
    }

    #[test]
    fn merge_transfers_edges_with_max_age() {
        let mut s = two_units();
        let c = s.spawn(Point::xy(0.0, 5.0));
        let d = s.spawn(Point::xy(10.0, 5.0));
        let (a, b) = (UnitId(0), UnitId(1));
        s.complex.add_edge_with_age(a, b, 3).unwrap();
        s.complex.add_edge_with_age(a, c, 7).unwrap();
        s.complex.add_edge_with_age(b, c, 12).unwrap();
        s.complex.add_edge_with_age(b, d, 4).unwrap();
        let mut dirty = vec![];
        s.merge(a, b, &mut dirty);
        assert!(s.unit(b).is_none());
        assert_eq!(s.complex().edge_age(a, c), Some(12));
        assert_eq!(s.complex().edge_age(a, d), Some(4));
        assert_eq!(s.complex().edge_count(), 2);
        assert_eq!(s.unit(a).unwrap().position, Point::xy(5.0, 0.0));
    }

    #[test]
    fn positions_follow_firing() {
        let mut s = two_units();
        s.complex.add_edge(UnitId(0), UnitId(1)).unwrap();
        s.unit_mut(UnitId(0)).firing = 0.0;
        let d = s.adapt_positions(UnitId(0), &Point::xy(5.0, 5.0));
        assert_eq!(d.winner, 0.0);
        assert!(d.max_neighbor > 0.0);

        let mut s = two_units();
        s.complex.add_edge(UnitId(0), UnitId(1)).unwrap();
        let d = s.adapt_positions(UnitId(0), &Point::xy(0.0, 0.0));
        assert_eq!(d.winner, 0.0);
        assert_eq!(d.neighbors_moved, 1);
        assert!(s.unit(UnitId(1)).unwrap().position.coord(0) < 10.0);
    }

    #[test]
    fn stable_winner_moves_alone_and_freezes_ages() {
        let mut s = two_units();
        s.complex.add_edge_with_age(UnitId(0), UnitId(1), 5).unwrap();
        s.set_state(UnitId(0), UnitState::Patch);
        let before = s.unit(UnitId(1)).unwrap().position;
        let d = s.adapt_positions(UnitId(0), &Point::xy(2.0, 2.0));
        assert_eq!(d.neighbors_moved, 0);
        assert_eq!(s.unit(UnitId(1)).unwrap().position, before);
        let expect = Point::xy(0.0, 0.0).lerp(&Point::xy(2.0, 2.0), 0.02);
        assert_eq!(s.unit(UnitId(0)).unwrap().position, expect);
    }

    /// Hexagonal fan: unit 0 at the center, ring 1..=6, outer ring closing
    /// every ring unit's link.
    fn patch_fixture() -> Soam {
        let mut s = Soam::new(params(ManifoldDim::Surface), Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap();
        for k in 2..=6 {
            let a = std::f64::consts::TAU * (k - 1) as f64 / 6.0;
            s.spawn(Point::xy(a.cos(), a.sin()));
        }
        for k in 1..=6u32 {
            s.complex.add_edge(UnitId(0), UnitId(k)).unwrap();
            s.complex.add_edge(UnitId(k), UnitId(k % 6 + 1)).unwrap();
        }
        for u in s.units.iter_mut().flatten() {
            u.firing = 0.1;
        }
        s
    }

    #[test]
    fn hexagon_center_is_disk_then_patch() {
        let s = patch_fixture();
        // ring units have path links (half-disks), so the center is a disk with regular neighbors
        assert_eq!(s.base_state(UnitId(0)), UnitState::Disk);
        assert_eq!(s.base_state(UnitId(1)), UnitState::HalfDisk);
        assert_eq!(s.derived_state(UnitId(0)).unwrap(), UnitState::Patch);
        assert_eq!(s.derived_state(UnitId(1)).unwrap(), UnitState::Boundary);
    }

    #[test]
    fn pendant_makes_singular() {
        let mut s = patch_fixture();
        let extra = s.spawn(Point::xy(0.2, 0.2));
        s.unit_mut(extra).firing = 0.1;
        s.complex.add_edge(UnitId(0), extra).unwrap();
        s.complex.add_edge(UnitId(1), extra).unwrap();
        assert_eq!(s.derived_state(UnitId(0)).unwrap(), UnitState::Singular);
    }

    #[test]
    fn unhabituated_neighbor_keeps_habituated() {
        let mut s = patch_fixture();
        s.unit_mut(UnitId(3)).firing = 0.9;
        assert_eq!(s.derived_state(UnitId(0)).unwrap(), UnitState::Habituated);
        assert_eq!(s.derived_state(UnitId(3)).unwrap(), UnitState::Active);
        assert!(s.derived_state(UnitId(99)).is_err());
    }

    #[test]
    fn curve_states() {
        let mut s = Soam::new(params(ManifoldDim::Curve), Point::xy(0.0, 0.0), Point::xy(1.0, 0.0)).unwrap();
        for _ in 0..3 {
            s.spawn(Point::xy(2.0, 0.0));
        }
        for k in 0..5u32 {
            s.complex.add_edge(UnitId(k), UnitId((k + 1) % 5)).unwrap();
            s.unit_mut(UnitId(k)).firing = 0.1;
        }
        for k in 0..5u32 {
            assert_eq!(s.derived_state(UnitId(k)).unwrap(), UnitState::Patch);
        }
        s.complex.remove_edge(UnitId(0), UnitId(1));
        assert_eq!(s.derived_state(UnitId(0)).unwrap(), UnitState::Boundary);
        assert_eq!(s.derived_state(UnitId(4)).unwrap(), UnitState::Patch);
        s.complex.add_edge(UnitId(2), UnitId(4)).unwrap();
        assert_eq!(s.derived_state(UnitId(4)).unwrap(), UnitState::Singular);
        // triangles of units on a curve classify by vertex count only
        assert_eq!(s.base_state(UnitId(3)), UnitState::Disk);
    }

    mod props {
        use super::*;
        use std::collections::BTreeSet;

        use crate::complex::tests::cliques;
        use proptest::prelude::*;
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        // small thresholds and short ages so that insertion, merging,
        // pruning and idle expiry all happen within a few hundred signals
        fn churn_params(surface: bool, r_max: f64, max_age: u32) -> SoamParams {
            let dim = if surface { ManifoldDim::Surface } else { ManifoldDim::Curve };
            SoamParams { r_max, r_min: 1.0, max_age, idle_limit: 300, ..SoamParams::for_dim(dim) }
        }

        fn check(s: &Soam) {
            let p = s.params();
            assert!(s.unit_count() >= 2);
            assert!(s.stale_states().is_empty());
            let stored: BTreeSet<[UnitId; 3]> = s.complex().triangles().collect();
            assert_eq!(stored, cliques(s.complex()));
            let floor = habituation_floor(p.firing_max, p.alpha_h) - 1e-9;
            for (id, u) in s.units() {
                assert!(u.firing <= p.firing_max && u.firing > floor, "firing {} of {id}", u.firing);
                assert!(u.threshold <= p.r_max && u.threshold >= p.r_min - 1e-9, "threshold {} of {id}", u.threshold);
                assert!(u.position.is_finite());
            }
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]

            #[test]
            fn prop_invariants_hold_after_every_signal(
                seed in any::<u64>(),
                surface in any::<bool>(),
                r_max in 2.0f64..12.0,
                max_age in 1u32..40,
                steps in 1usize..600,
            ) {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut draw = || Point::xy(rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0));
                let mut s = Soam::new(churn_params(surface, r_max, max_age), draw(), draw()).unwrap();
                for _ in 0..steps {
                    s.process_signal(&draw()).unwrap();
                    check(&s);
                }
            }

            #[test]
            fn prop_same_stream_same_network(seed in any::<u64>(), steps in 1usize..400) {
                let run = || {
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut draw = || Point::xy(rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0));
                    let mut s = Soam::new(churn_params(true, 5.0, 10), draw(), draw()).unwrap();
                    for _ in 0..steps {
                        s.process_signal(&draw()).unwrap();
                    }
                    s
                };
                let (a, b) = (run(), run());
                prop_assert_eq!(a.to_indexed(), b.to_indexed());
                prop_assert_eq!(a.counters(), b.counters());
            }
        }
    }
}
