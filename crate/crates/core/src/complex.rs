//! The growing simplicial complex of dimension at most 2.
//!
//! Edges are created by the competitive Hebbian rule and carry an age.
//! Triangles are never added directly: they are exactly the 3-cliques of the
//! edge graph and are kept in sync on every edge mutation.

use std::collections::{BTreeMap, BTreeSet};

use crate::{Error, ManifoldDim, Result, UnitId};

pub type EdgeKey = (UnitId, UnitId);

#[inline]
pub fn edge_key(a: UnitId, b: UnitId) -> EdgeKey {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[inline]
pub fn triangle_key(a: UnitId, b: UnitId, c: UnitId) -> [UnitId; 3] {
    let mut t = [a, b, c];
    t.sort_unstable();
    t
}

#[derive(Clone, Debug, Default)]
pub struct SimplicialComplex {
    manifold_dim: ManifoldDim,
    /// Sorted neighbor lists indexed by id; `None` for absent units.
    adjacency: Vec<Option<Vec<UnitId>>>,
    vertex_count: usize,
    next_id: u32,
    edges: BTreeMap<EdgeKey, u32>,
    triangles: BTreeSet<[UnitId; 3]>,
}

/// A simplex with its vertices in ascending id order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Simplex {
    Vertex(UnitId),
    Edge(UnitId, UnitId),
    Triangle(UnitId, UnitId, UnitId),
}

impl Simplex {
    pub fn edge(a: UnitId, b: UnitId) -> Self {
        let (a, b) = edge_key(a, b);
        Simplex::Edge(a, b)
    }

    pub fn triangle(a: UnitId, b: UnitId, c: UnitId) -> Self {
        let [a, b, c] = triangle_key(a, b, c);
        Simplex::Triangle(a, b, c)
    }

    pub fn contains(&self, u: UnitId) -> bool {
        match *self {
            Simplex::Vertex(a) => a == u,
            Simplex::Edge(a, b) => a == u || b == u,
            Simplex::Triangle(a, b, c) => a == u || b == u || c == u,
        }
    }

    /// All faces including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        match *self {
            Simplex::Vertex(_) => vec![*self],
            Simplex::Edge(a, b) => vec![*self, Simplex::Vertex(a), Simplex::Vertex(b)],
            Simplex::Triangle(a, b, c) => vec![
                *self,
                Simplex::Edge(a, b),
                Simplex::Edge(a, c),
                Simplex::Edge(b, c),
                Simplex::Vertex(a),
                Simplex::Vertex(b),
                Simplex::Vertex(c),
            ],
        }
    }
}

/// Link of a vertex: neighbor ids and the arcs among them.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinkGraph {
    pub vertices: Vec<UnitId>,
    pub arcs: Vec<EdgeKey>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkClass {
    Empty,
    Underconnected,
    /// Half-sphere: one point in dimension 1, a simple open path in dimension 2.
    Path,
    /// Sphere: two points in dimension 1, a simple cycle of 4 or more vertices in dimension 2.
    Cycle,
    /// A simple 3-cycle in dimension 2 (tetrahedron corner).
    Cycle3,
    Overconnected,
}

impl SimplicialComplex {
    pub fn new(manifold_dim: ManifoldDim) -> Self {
        SimplicialComplex { manifold_dim, ..Default::default() }
    }

    pub fn manifold_dim(&self) -> ManifoldDim {
        self.manifold_dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Id that the next [`add_vertex`](Self::add_vertex) call will return.
    pub fn next_id(&self) -> UnitId {
        UnitId(self.next_id)
    }

    pub fn contains(&self, u: UnitId) -> bool {
        matches!(self.adjacency.get(u.index()), Some(Some(_)))
    }

    fn require(&self, u: UnitId) -> Result<()> {
        if self.contains(u) {
            Ok(())
        } else {
            Err(Error::UnknownUnit(u))
        }
    }

    pub fn add_vertex(&mut self) -> UnitId {
        let id = UnitId(self.next_id);
        self.insert_vertex(id).expect("fresh id");
        id
    }

    /// Adds a vertex with a caller-chosen id; later fresh ids continue above it.
    pub fn insert_vertex(&mut self, id: UnitId) -> Result<()> {
        if self.contains(id) {
            return Err(Error::InvalidParams(format!("unit {id} already exists")));
        }
        if self.adjacency.len() <= id.index() {
            self.adjacency.resize(id.index() + 1, None);
        }
        self.adjacency[id.index()] = Some(Vec::new());
        self.vertex_count += 1;
        self.next_id = self.next_id.max(id.0 + 1);
        Ok(())
    }

    /// Removes a vertex together with its incident edges and triangles.
    pub fn remove_vertex(&mut self, id: UnitId) -> bool {
        if !self.contains(id) {
            return false;
        }
        for n in self.neighbors(id).to_vec() {
            self.remove_edge(id, n);
        }
        self.adjacency[id.index()] = None;
        self.vertex_count -= 1;
        true
    }

    pub fn vertices(&self) -> impl Iterator<Item = UnitId> + '_ {
        self.adjacency.iter().enumerate().filter(|(_, a)| a.is_some()).map(|(i, _)| UnitId(i as u32))
    }

    /// Sorted neighbor ids; empty for unknown ids.
    pub fn neighbors(&self, u: UnitId) -> &[UnitId] {
        match self.adjacency.get(u.index()) {
            Some(Some(n)) => n,
            _ => &[],
        }
    }

    pub fn degree(&self, u: UnitId) -> usize {
        self.neighbors(u).len()
    }

    pub fn has_edge(&self, a: UnitId, b: UnitId) -> bool {
        self.edges.contains_key(&edge_key(a, b))
    }

    pub fn edge_age(&self, a: UnitId, b: UnitId) -> Option<u32> {
        self.edges.get(&edge_key(a, b)).copied()
    }

    pub fn set_edge_age(&mut self, a: UnitId, b: UnitId, age: u32) -> bool {
        match self.edges.get_mut(&edge_key(a, b)) {
            Some(e) => {
                *e = age;
                true
            }
            None => false,
        }
    }

    /// Edges in ascending key order with their ages.
    pub fn edges(&self) -> impl Iterator<Item = (EdgeKey, u32)> + '_ {
        self.edges.iter().map(|(k, a)| (*k, *a))
    }

    pub fn triangles(&self) -> impl Iterator<Item = [UnitId; 3]> + '_ {
        self.triangles.iter().copied()
    }

    pub fn has_triangle(&self, a: UnitId, b: UnitId, c: UnitId) -> bool {
        self.triangles.contains(&triangle_key(a, b, c))
    }

    fn common_neighbors(&self, a: UnitId, b: UnitId) -> Vec<UnitId> {
        let (na, nb) = (self.neighbors(a), self.neighbors(b));
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < na.len() && j < nb.len() {
            match na[i].cmp(&nb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    out.push(na[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out
    }

    /// Adds edge `(a, b)` with age 0, or resets the age of an existing one.
    /// Returns whether the edge was created.
    pub fn add_edge(&mut self, a: UnitId, b: UnitId) -> Result<bool> {
        self.add_edge_with_age(a, b, 0)
    }

    pub fn add_edge_with_age(&mut self, a: UnitId, b: UnitId, age: u32) -> Result<bool> {
        if a == b {
            return Err(Error::SelfLoop(a));
        }
        self.require(a)?;
        self.require(b)?;
        let key = edge_key(a, b);
        if let Some(e) = self.edges.get_mut(&key) {
            *e = age;
            return Ok(false);
        }
        for n in self.common_neighbors(a, b) {
            self.triangles.insert(triangle_key(a, b, n));
        }
        self.edges.insert(key, age);
        for (x, y) in [(a, b), (b, a)] {
            let list = self.adjacency[x.index()].as_mut().unwrap();
            let pos = list.binary_search(&y).unwrap_err();
            list.insert(pos, y);
        }
        Ok(true)
    }

    /// Removes edge `(a, b)` and every triangle containing it.
    pub fn remove_edge(&mut self, a: UnitId, b: UnitId) -> bool {
        if self.edges.remove(&edge_key(a, b)).is_none() {
            return false;
        }
        for n in self.common_neighbors(a, b) {
            self.triangles.remove(&triangle_key(a, b, n));
        }
        for (x, y) in [(a, b), (b, a)] {
            let list = self.adjacency[x.index()].as_mut().unwrap();
            let pos = list.binary_search(&y).unwrap();
            list.remove(pos);
        }
        true
    }

    /// Link of `u`: its neighbors, plus (in dimension 2) the arcs `(x, y)`
    /// such that `{u, x, y}` is a triangle.
    pub fn link_of(&self, u: UnitId) -> Result<LinkGraph> {
        self.require(u)?;
        let vertices = self.neighbors(u).to_vec();
        let mut arcs = Vec::new();
        if self.manifold_dim == ManifoldDim::Surface {
            for (i, &x) in vertices.iter().enumerate() {
                for &y in &vertices[i + 1..] {
                    if self.has_edge(x, y) {
                        arcs.push((x, y));
                    }
                }
            }
        }
        Ok(LinkGraph { vertices, arcs })
    }

    /// `u`, its incident edges and (in dimension 2) its incident triangles.
    pub fn star_of(&self, u: UnitId) -> Result<BTreeSet<Simplex>> {
        self.require(u)?;
        let mut star = BTreeSet::new();
        star.insert(Simplex::Vertex(u));
        for &n in self.neighbors(u) {
            star.insert(Simplex::edge(u, n));
        }
        if self.manifold_dim == ManifoldDim::Surface {
            for t in self.triangles.iter().filter(|t| t.contains(&u)) {
                star.insert(Simplex::Triangle(t[0], t[1], t[2]));
            }
        }
        Ok(star)
    }

    pub fn classify(&self, u: UnitId) -> Result<LinkClass> {
        Ok(classify_link(&self.link_of(u)?, self.manifold_dim))
    }
}

/// Adds every face of every simplex in `simplices`.
pub fn closure_of(simplices: &BTreeSet<Simplex>) -> BTreeSet<Simplex> {
    simplices.iter().flat_map(|s| s.faces()).collect()
}

/// Combinatorial type of a link.
pub fn classify_link(link: &LinkGraph, dim: ManifoldDim) -> LinkClass {
    let n = link.vertices.len();
    if n == 0 {
        return LinkClass::Empty;
    }
    if dim == ManifoldDim::Curve {
        return match n {
            1 => LinkClass::Path,
            2 => LinkClass::Cycle,
            _ => LinkClass::Overconnected,
        };
    }

    let index = |u: UnitId| link.vertices.binary_search(&u).expect("arc endpoint in link");
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for &(x, y) in &link.arcs {
        let (i, j) = (index(x), index(y));
        adj[i].push(j);
        adj[j].push(i);
    }
    if adj.iter().any(|a| a.len() >= 3) {
        return LinkClass::Overconnected;
    }

    // Max degree 2: every component is an isolated vertex, a path or a cycle.
    let mut seen = vec![false; n];
    let mut cycles = 0;
    let mut paths = 0;
    let mut isolated = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let (mut verts, mut degree_sum) = (0usize, 0usize);
        while let Some(v) = stack.pop() {
            verts += 1;
            degree_sum += adj[v].len();
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let arcs = degree_sum / 2;
        if arcs == 0 {
            isolated += 1;
        } else if arcs == verts {
            cycles += 1;
        } else {
            paths += 1;
        }
    }

    let components = cycles + paths + isolated;
    if cycles >= 1 {
        if components == 1 {
            return if n == 3 { LinkClass::Cycle3 } else { LinkClass::Cycle };
        }
        return LinkClass::Overconnected;
    }
    if paths == 1 && components == 1 {
        return LinkClass::Path;
    }
    LinkClass::Underconnected
}
