//! Triangle meshes and generators for the reference surfaces.

use std::collections::HashMap;
use std::f64::consts::TAU;

use crate::geometry::Point;
use crate::sampling::{double_torus_eval, ParametricShape};

/// Indexed triangle mesh.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
}

impl Mesh {
    /// Unique undirected edges, each as `[lo, hi]`, sorted.
    pub fn edges(&self) -> Vec<[usize; 2]> {
        let mut e: Vec<[usize; 2]> = self
            .triangles
            .iter()
            .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[0], t[2]]])
            .map(|[a, b]| if a < b { [a, b] } else { [b, a] })
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// Subdivided icosahedron on the unit sphere. `levels = 4` gives 2562 vertices.
pub fn icosphere(levels: u32) -> Mesh {
    let g = (1.0 + 5f64.sqrt()) / 2.0;
    let raw = [
        [-1.0, g, 0.0],
        [1.0, g, 0.0],
        [-1.0, -g, 0.0],
        [1.0, -g, 0.0],
        [0.0, -1.0, g],
        [0.0, 1.0, g],
        [0.0, -1.0, -g],
        [0.0, 1.0, -g],
        [g, 0.0, -1.0],
        [g, 0.0, 1.0],
        [-g, 0.0, -1.0],
        [-g, 0.0, 1.0],
    ];
    let unit = |c: [f64; 3]| {
        let n = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        Point::xyz(c[0] / n, c[1] / n, c[2] / n)
    };
    let mut vertices: Vec<Point> = raw.iter().map(|&c| unit(c)).collect();
    let mut triangles: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..levels {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        let mut midpoint = |a: usize, b: usize, vertices: &mut Vec<Point>| {
            let key = if a < b { (a, b) } else { (b, a) };
            *mid.entry(key).or_insert_with(|| {
                let m = vertices[a].midpoint(&vertices[b]);
                vertices.push(unit([m.coord(0), m.coord(1), m.coord(2)]));
                vertices.len() - 1
            })
        };
        for [a, b, c] in triangles {
            let ab = midpoint(a, b, &mut vertices);
            let bc = midpoint(b, c, &mut vertices);
            let ca = midpoint(c, a, &mut vertices);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        triangles = next;
    }
    Mesh { vertices, triangles }
}

/// Regular `nu x nv` grid on a torus around the z axis.
pub fn torus_grid(major: f64, minor: f64, nu: usize, nv: usize) -> Mesh {
    assert!(nu >= 3 && nv >= 3);
    let mut vertices = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let v = TAU * j as f64 / nv as f64;
            let ring = major + minor * v.cos();
            vertices.push(Point::xyz(ring * u.cos(), ring * u.sin(), minor * v.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut triangles = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    Mesh { vertices, triangles }
}

/// Genus-2 surface: the zero set of the double-torus implicit function,
/// polygonized by marching tetrahedra on a grid of spacing `step`.
pub fn double_torus(scale: f64, step: f64) -> Mesh {
    let shape = ParametricShape::DoubleTorus { scale };
    let bbox = shape.bounding_box();
    marching_tetrahedra(
        |p| double_torus_eval(p, scale).0,
        [bbox.min.coord(0), bbox.min.coord(1), bbox.min.coord(2)],
        [bbox.max.coord(0), bbox.max.coord(1), bbox.max.coord(2)],
        step,
    )
}

// Kuhn subdivision of the cube into six tetrahedra along the 0-7 diagonal.
const CUBE_TETS: [[usize; 4]; 6] = [[0, 1, 3, 7], [0, 3, 2, 7], [0, 2, 6, 7], [0, 6, 4, 7], [0, 4, 5, 7], [0, 5, 1, 7]];

/// Polygonizes `{f = 0}` inside the box. The output is a closed 2-manifold
/// wherever the surface stays inside the padded box; grid values that are
/// exactly zero are nudged positive.
pub fn marching_tetrahedra(f: impl Fn(&Point) -> f64, min: [f64; 3], max: [f64; 3], step: f64) -> Mesh {
    let pad = 2.0 * step;
    let lo = [min[0] - pad, min[1] - pad, min[2] - pad];
    let n: Vec<usize> = (0..3).map(|i| ((max[i] + pad - lo[i]) / step).ceil() as usize + 1).collect();
    let node = |i: usize, j: usize, k: usize| (i * n[1] + j) * n[2] + k;
    let pos = |i: usize, j: usize, k: usize| {
        Point::xyz(lo[0] + i as f64 * step, lo[1] + j as f64 * step, lo[2] + k as f64 * step)
    };
    let mut values = vec![0.0; n[0] * n[1] * n[2]];
    for i in 0..n[0] {
        for j in 0..n[1] {
            for k in 0..n[2] {
                let v = f(&pos(i, j, k));
                values[node(i, j, k)] = if v == 0.0 { 1e-12 } else { v };
            }
        }
    }

    let mut vertices: Vec<Point> = Vec::new();
    let mut on_edge: HashMap<(usize, usize), usize> = HashMap::new();
    let mut triangles = Vec::new();
    let coords_of = |idx: usize| {
        let k = idx % n[2];
        let j = (idx / n[2]) % n[1];
        let i = idx / (n[1] * n[2]);
        pos(i, j, k)
    };
    let mut crossing = |a: usize, b: usize, vertices: &mut Vec<Point>| -> usize {
        let key = if a < b { (a, b) } else { (b, a) };
        *on_edge.entry(key).or_insert_with(|| {
            let (va, vb) = (values[a], values[b]);
            let t = va / (va - vb);
            vertices.push(coords_of(a).lerp(&coords_of(b), t));
            vertices.len() - 1
        })
    };

    for i in 0..n[0] - 1 {
        for j in 0..n[1] - 1 {
            for k in 0..n[2] - 1 {
                let corner = |c: usize| node(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
                for tet in CUBE_TETS {
                    let ids = tet.map(corner);
                    let inside: Vec<usize> = ids.iter().copied().filter(|&v| values[v] < 0.0).collect();
                    let outside: Vec<usize> = ids.iter().copied().filter(|&v| values[v] >= 0.0).collect();
                    let mut emit = |tri: [usize; 3], inner: usize, vertices: &mut Vec<Point>| {
                        // orient the normal away from the inside
                        let [a, b, c] = tri.map(|x| vertices[x]);
                        let nrm = cross(&b.sub(&a), &c.sub(&a));
                        let out = a.sub(&coords_of(inner));
                        let dot = nrm[0] * out.coord(0) + nrm[1] * out.coord(1) + nrm[2] * out.coord(2);
                        triangles.push(if dot >= 0.0 { tri } else { [tri[0], tri[2], tri[1]] });
                    };
                    match inside.len() {
                        1 => {
                            let a = inside[0];
                            let t = [
                                crossing(a, outside[0], &mut vertices),
                                crossing(a, outside[1], &mut vertices),
                                crossing(a, outside[2], &mut vertices),
                            ];
                            emit(t, a, &mut vertices);
                        }
                        3 => {
                            let o = outside[0];
                            let t = [
                                crossing(inside[0], o, &mut vertices),
                                crossing(inside[1], o, &mut vertices),
                                crossing(inside[2], o, &mut vertices),
                            ];
                            emit(t, inside[0], &mut vertices);
                        }
                        2 => {
                            let (a, b) = (inside[0], inside[1]);
                            let (c, d) = (outside[0], outside[1]);
                            let ac = crossing(a, c, &mut vertices);
                            let ad = crossing(a, d, &mut vertices);
                            let bc = crossing(b, c, &mut vertices);
                            let bd = crossing(b, d, &mut vertices);
                            // quad ac-ad-bd-bc
                            emit([ac, ad, bd], a, &mut vertices);
                            emit([ac, bd, bc], a, &mut vertices);
                        }
                        _ => {}
                    }
                }
            }
        }
    }
    Mesh { vertices, triangles }
}

fn cross(a: &Point, b: &Point) -> [f64; 3] {
    [
        a.coord(1) * b.coord(2) - a.coord(2) * b.coord(1),
        a.coord(2) * b.coord(0) - a.coord(0) * b.coord(2),
        a.coord(0) * b.coord(1) - a.coord(1) * b.coord(0),
    ]
}

/// Closed polyline through `n` evenly spaced circle points.
pub fn circle_polyline(radius: f64, n: usize) -> (Vec<Point>, Vec<[usize; 2]>) {
    let pts = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            Point::xy(radius * a.cos(), radius * a.sin())
        })
        .collect();
    let edges = (0..n).map(|k| [k, (k + 1) % n]).collect();
    (pts, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi(m: &Mesh) -> i64 {
        m.vertices.len() as i64 - m.edges().len() as i64 + m.triangles.len() as i64
    }

    #[test]
    fn icosphere_counts() {
        let m = icosphere(0);
        assert_eq!((m.vertices.len(), m.edges().len(), m.triangles.len()), (12, 30, 20));
        let m = icosphere(4);
        assert_eq!(m.vertices.len(), 2562);
        assert_eq!(chi(&m), 2);
        for v in &m.vertices {
            assert!((v.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn torus_grid_is_genus_one() {
        let m = torus_grid(2.0, 1.0, 24, 12);
        assert_eq!(m.vertices.len(), 288);
        assert_eq!(chi(&m), 0);
    }

    #[test]
    fn double_torus_mesh_is_genus_two() {
        let m = double_torus(1.0, 0.08);
        assert_eq!(chi(&m), -2);
        let shape = ParametricShape::DoubleTorus { scale: 1.0 };
        // linear interpolation error is second order in the step
        for v in &m.vertices {
            assert!(shape.residual(v).abs() < 0.02);
        }
    }
}
