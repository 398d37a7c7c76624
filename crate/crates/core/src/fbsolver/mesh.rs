//! Structured body-fitted mesh over the elliptic region by transfinite
//! interpolation between its four boundary arcs.
//!
//! Logical coordinates: `s` runs from the shock (`i = 0`) to the wedge
//! (`i = n1`), `t` from the symmetry axis (`j = 0`) to the sonic arc or top
//! boundary (`j = n2`). Node `(i, j)` is stored at `j * (n1 + 1) + i`.

use serde::{Deserialize, Serialize};

use crate::states::Point;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub n1: usize,
    pub n2: usize,
    pub nodes: Vec<Point>,
}

impl Mesh {
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * (self.n1 + 1) + i
    }

    #[inline]
    pub fn node(&self, i: usize, j: usize) -> Point {
        self.nodes[self.index(i, j)]
    }

    pub fn node_count(&self) -> usize {
        (self.n1 + 1) * (self.n2 + 1)
    }

    /// Transfinite interpolation. `shock[j]` is the `s = 0` side (axis first);
    /// the other sides are sampled uniformly in their parameters.
    pub fn transfinite<W, A, C>(n1: usize, shock: &[Point], wedge: W, axis: A, top: C) -> Mesh
    where
        W: Fn(f64) -> Point,
        A: Fn(f64) -> Point,
        C: Fn(f64) -> Point,
    {
        let n2 = shock.len() - 1;
        let p_axis_shock = shock[0];
        let p_top_shock = shock[n2];
        let p_axis_wedge = wedge(0.0);
        let p_top_wedge = wedge(1.0);
        let a: Vec<Point> = (0..=n1).map(|i| axis(i as f64 / n1 as f64)).collect();
        let c: Vec<Point> = (0..=n1).map(|i| top(i as f64 / n1 as f64)).collect();
        let mut nodes = Vec::with_capacity((n1 + 1) * (n2 + 1));
        for (j, sj) in shock.iter().enumerate() {
            let t = j as f64 / n2 as f64;
            let wj = wedge(t);
            for i in 0..=n1 {
                let s = i as f64 / n1 as f64;
                let mut p = [0.0; 2];
                for d in 0..2 {
                    p[d] = (1.0 - s) * sj[d] + s * wj[d] + (1.0 - t) * a[i][d] + t * c[i][d]
                        - ((1.0 - s) * (1.0 - t) * p_axis_shock[d]
                            + s * (1.0 - t) * p_axis_wedge[d]
                            + (1.0 - s) * t * p_top_shock[d]
                            + s * t * p_top_wedge[d]);
                }
                // boundary nodes exactly on their curves
                if i == 0 {
                    p = *sj;
                } else if i == n1 {
                    p = wj;
                } else if j == 0 {
                    p = a[i];
                } else if j == n2 {
                    p = c[i];
                }
                nodes.push(p);
            }
        }
        Mesh { n1, n2, nodes }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &self.nodes {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Signed area of cell `(i, j)` (positive for the expected orientation).
    pub fn cell_area(&self, i: usize, j: usize) -> f64 {
        let p = [
            self.node(i, j),
            self.node(i + 1, j),
            self.node(i + 1, j + 1),
            self.node(i, j + 1),
        ];
        let mut a = 0.0;
        for k in 0..4 {
            let q = p[k];
            let r = p[(k + 1) % 4];
            a += q[0] * r[1] - r[0] * q[1];
        }
        0.5 * a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_is_reproduced() {
        let shock: Vec<Point> = (0..=4).map(|j| [0.0, j as f64 / 4.0]).collect();
        let m = Mesh::transfinite(4, &shock, |t| [1.0, t], |s| [s, 0.0], |s| [s, 1.0]);
        for j in 0..=4 {
            for i in 0..=4 {
                let p = m.node(i, j);
                assert!((p[0] - i as f64 / 4.0).abs() < 1e-15);
                assert!((p[1] - j as f64 / 4.0).abs() < 1e-15);
            }
        }
        assert!((m.cell_area(1, 2) - 1.0 / 16.0).abs() < 1e-15);
    }
}
