//! Regular pentagon and its Wachspress coordinates.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

/// Counter-clockwise vertices on the unit circle, the first at the top.
pub fn vertices() -> [[f64; 2]; 5] {
    let mut v = [[0.0; 2]; 5];
    for (i, p) in v.iter_mut().enumerate() {
        let a = FRAC_PI_2 + 2.0 * PI * i as f64 / 5.0;
        *p = [a.cos(), a.sin()];
    }
    // Pin the top vertex exactly.
    v[0] = [0.0, 1.0];
    v
}

fn area(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

/// Signed areas of the triangles `(p, v_i, v_{i+1})`, non-negative inside.
fn edge_areas(p: [f64; 2], v: &[[f64; 2]; 5]) -> [f64; 5] {
    let mut a = [0.0; 5];
    for i in 0..5 {
        a[i] = area(p, v[i], v[(i + 1) % 5]);
    }
    a
}

/// Tolerance for points on the boundary.
const EDGE_TOL: f64 = 1e-12;

pub fn contains(p: [f64; 2]) -> bool {
    edge_areas(p, &vertices()).iter().all(|&a| a >= -EDGE_TOL)
}

/// Wachspress coordinates of `p` (inside the closed pentagon).
///
/// Uses the product form `w_i = C_i * prod_{j not in {i-1, i}} A_j`, which
/// stays defined on the boundary and is exactly one-hot at a vertex.
pub fn wachspress(p: [f64; 2]) -> [f64; 5] {
    let v = vertices();
    let a = edge_areas(p, &v).map(|x| x.max(0.0));
    let mut w = [0.0; 5];
    for i in 0..5 {
        let prev = (i + 4) % 5;
        let c = area(v[prev], v[i], v[(i + 1) % 5]);
        w[i] = c * (0..5).filter(|&j| j != prev && j != i).map(|j| a[j]).product::<f64>();
    }
    let total: f64 = w.iter().sum();
    w.map(|x| x / total)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointKind {
    Grid,
    Vertex(usize),
    Centroid,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub u: f64,
    pub v: f64,
    pub lambda: [f64; 5],
    pub kind: PointKind,
}

/// Lattice of `resolution²` points over the bounding box, kept if inside the
/// closed pentagon, optionally followed by the vertices and the centroid.
pub fn sweep_points(resolution: usize, include_vertices: bool) -> Vec<SweepPoint> {
    let v = vertices();
    let (xlo, xhi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[0]), hi.max(p[0])));
    let (ylo, yhi) = v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p[1]), hi.max(p[1])));
    let coord = |lo: f64, hi: f64, i: usize| {
        if i + 1 == resolution {
            hi
        } else {
            lo + (hi - lo) * i as f64 / (resolution - 1) as f64
        }
    };
    let mut out = Vec::new();
    for iy in 0..resolution {
        for ix in 0..resolution {
            let p = [coord(xlo, xhi, ix), coord(ylo, yhi, iy)];
            if contains(p) {
                out.push(SweepPoint {
                    u: p[0],
                    v: p[1],
                    lambda: wachspress(p),
                    kind: PointKind::Grid,
                });
            }
        }
    }
    if include_vertices {
        for (i, p) in v.iter().enumerate() {
            out.push(SweepPoint {
                u: p[0],
                v: p[1],
                lambda: wachspress(*p),
                kind: PointKind::Vertex(i),
            });
        }
        out.push(SweepPoint {
            u: 0.0,
            v: 0.0,
            lambda: wachspress([0.0, 0.0]),
            kind: PointKind::Centroid,
        });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertices_are_one_hot() {
        for (i, p) in vertices().iter().enumerate() {
            let l = wachspress(*p);
            for (j, &x) in l.iter().enumerate() {
                assert_eq!(x, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn centroid_is_uniform() {
        for x in wachspress([0.0, 0.0]) {
            assert!((x - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn reproduces_linear_functions() {
        let v = vertices();
        for p in [[0.1, 0.2], [-0.3, -0.4], [0.5, 0.1]] {
            assert!(contains(p));
            let l = wachspress(p);
            assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(l.iter().all(|&x| x > 0.0));
            for axis in 0..2 {
                let r: f64 = l.iter().zip(&v).map(|(w, q)| w * q[axis]).sum();
                assert!((r - p[axis]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn edge_midpoints_use_two_vertices() {
        let v = vertices();
        let m = [(v[1][0] + v[2][0]) / 2.0, (v[1][1] + v[2][1]) / 2.0];
        let l = wachspress(m);
        assert!((l[1] - 0.5).abs() < 1e-12 && (l[2] - 0.5).abs() < 1e-12);
        assert!(l[0].abs() < 1e-12 && l[3].abs() < 1e-12 && l[4].abs() < 1e-12);
    }

    #[test]
    fn default_grid_size() {
        let pts = sweep_points(25, false);
        assert!(pts.len() >= 100, "{}", pts.len());
        assert!(pts.iter().all(|p| contains([p.u, p.v])));
        assert!(!contains([0.0, 1.01]));
        assert_eq!(sweep_points(25, true).len(), pts.len() + 6);
    }
}
