//! Vertex-centred finite volumes on the median dual of the quadrilateral mesh.
//!
//! Every cell contributes four dual faces (centroid to edge midpoints) and
//! four quarter areas. Gradients come from the bilinear interpolant, which
//! makes the scheme exact for uniform states: with the unknown written as
//! `psi = phi - phi2`, `psi = 0` solves the discrete problem on any mesh.

use crate::error::{Error, Result};
use crate::states::Point;

use super::band::BandMatrix;
use super::domain::Domain;
use super::mesh::Mesh;

/// Reference coordinates of the eight quadrature points of a cell: the four
/// dual faces (bottom, top, left, right), then the four quarters in corner
/// order `00, 10, 11, 01`.
const QUAD_REF: [[f64; 2]; 8] = [
    [0.5, 0.25],
    [0.5, 0.75],
    [0.25, 0.5],
    [0.75, 0.5],
    [0.25, 0.25],
    [0.75, 0.25],
    [0.75, 0.75],
    [0.25, 0.75],
];

/// Local corner pairs `(from, to)` separated by each dual face.
const FACE_NODES: [(usize, usize); 4] = [(0, 1), (3, 2), (0, 3), (1, 2)];

pub(crate) const POINTS_PER_CELL: usize = 8;

#[derive(Debug, Clone, Copy)]
pub(crate) struct QuadPoint {
    pub x: Point,
    pub w: [f64; 4],
    pub gx: [f64; 4],
    pub gy: [f64; 4],
    pub phi2: f64,
    pub dphi2: [f64; 2],
}

impl QuadPoint {
    pub fn new(corners: &[Point; 4], a: f64, b: f64, domain: &Domain) -> Self {
        let w = [(1.0 - a) * (1.0 - b), a * (1.0 - b), a * b, (1.0 - a) * b];
        // derivatives of the weights in the reference coordinates
        let da = [-(1.0 - b), 1.0 - b, b, -b];
        let db = [-(1.0 - a), -a, a, 1.0 - a];
        let mut x = [0.0; 2];
        let mut xa = [0.0; 2];
        let mut xb = [0.0; 2];
        for k in 0..4 {
            for d in 0..2 {
                x[d] += w[k] * corners[k][d];
                xa[d] += da[k] * corners[k][d];
                xb[d] += db[k] * corners[k][d];
            }
        }
        let det = xa[0] * xb[1] - xa[1] * xb[0];
        let (mut gx, mut gy) = ([0.0; 4], [0.0; 4]);
        if det.abs() > 0.0 {
            // D psi = J^{-T} (psi_a, psi_b), J = [xa xb]
            for k in 0..4 {
                gx[k] = (xb[1] * da[k] - xa[1] * db[k]) / det;
                gy[k] = (-xb[0] * da[k] + xa[0] * db[k]) / det;
            }
        }
        let s2 = &domain.state2;
        Self {
            x,
            w,
            gx,
            gy,
            phi2: s2.phi(x),
            dphi2: s2.pseudo_velocity(x),
        }
    }

    /// `(psi, D psi)` from the corner values.
    #[inline]
    pub fn interpolate(&self, c: &[f64; 4]) -> (f64, [f64; 2]) {
        let mut v = 0.0;
        let mut g = [0.0; 2];
        for (k, ck) in c.iter().enumerate() {
            v += self.w[k] * ck;
            g[0] += self.gx[k] * ck;
            g[1] += self.gy[k] * ck;
        }
        (v, g)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CellGeom {
    pub nodes: [usize; 4],
    pub q: [QuadPoint; POINTS_PER_CELL],
    pub face_nl: [[f64; 2]; 4],
    pub quarter: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum PieceKind {
    Shock,
    StateFlux,
}

/// Half of a boundary edge that carries a prescribed flux.
#[derive(Debug, Clone, Copy)]
pub(crate) struct EdgePiece {
    pub node: usize,
    pub kind: PieceKind,
    pub length: f64,
    /// `rho Dphi . n_out * length` of the bordering uniform state.
    pub flux: f64,
}

/// Outcome of evaluating a density with the ellipticity cutoff.
#[derive(Debug, Clone, Copy)]
pub(crate) struct DensitySample {
    pub rho: f64,
    pub cutoff_active: bool,
}

pub(crate) struct Operator {
    pub n1: usize,
    pub n2: usize,
    pub cells: Vec<CellGeom>,
    pub pieces: Vec<EdgePiece>,
    /// Boundary value of `psi` at Dirichlet nodes.
    pub dirichlet: Vec<Option<f64>>,
    /// Dual-cell area per node.
    pub volume: Vec<f64>,
    pub nodes: Vec<Point>,
    delta_e: f64,
    power0: f64,
    gm1: f64,
    inv_gm1: f64,
    crit: f64,
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn mid(a: Point, b: Point) -> Point {
    [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]
}

fn polygon_area(p: &[Point]) -> f64 {
    let n = p.len();
    let mut a = 0.0;
    for k in 0..n {
        let q = p[k];
        let r = p[(k + 1) % n];
        a += q[0] * r[1] - r[0] * q[1];
    }
    0.5 * a.abs()
}

/// Normal of the segment `a -> b` scaled by its length, oriented along `towards`.
fn oriented_normal(a: Point, b: Point, towards: Point) -> [f64; 2] {
    let s = sub(b, a);
    let n = [s[1], -s[0]];
    if n[0] * towards[0] + n[1] * towards[1] >= 0.0 {
        n
    } else {
        [-n[0], -n[1]]
    }
}

impl Operator {
    pub fn new(domain: &Domain, mesh: &Mesh, delta_e: f64) -> Self {
        let (n1, n2) = (mesh.n1, mesh.n2);
        let mut cells = Vec::with_capacity(n1 * n2);
        let mut volume = vec![0.0; mesh.node_count()];
        for j in 0..n2 {
            for i in 0..n1 {
                let nodes = [
                    mesh.index(i, j),
                    mesh.index(i + 1, j),
                    mesh.index(i + 1, j + 1),
                    mesh.index(i, j + 1),
                ];
                let c4 = nodes.map(|k| mesh.nodes[k]);
                let q = QUAD_REF.map(|[a, b]| QuadPoint::new(&c4, a, b, domain));
                let centroid = [
                    0.25 * (c4[0][0] + c4[1][0] + c4[2][0] + c4[3][0]),
                    0.25 * (c4[0][1] + c4[1][1] + c4[2][1] + c4[3][1]),
                ];
                let m_b = mid(c4[0], c4[1]);
                let m_r = mid(c4[1], c4[2]);
                let m_t = mid(c4[3], c4[2]);
                let m_l = mid(c4[0], c4[3]);
                let face_mid = [m_b, m_t, m_l, m_r];
                let mut face_nl = [[0.0; 2]; 4];
                for f in 0..4 {
                    let (from, to) = FACE_NODES[f];
                    face_nl[f] = oriented_normal(face_mid[f], centroid, sub(c4[to], c4[from]));
                }
                let quarter = [
                    polygon_area(&[c4[0], m_b, centroid, m_l]),
                    polygon_area(&[c4[1], m_r, centroid, m_b]),
                    polygon_area(&[c4[2], m_t, centroid, m_r]),
                    polygon_area(&[c4[3], m_l, centroid, m_t]),
                ];
                for k in 0..4 {
                    volume[nodes[k]] += quarter[k];
                }
                cells.push(CellGeom {
                    nodes,
                    q,
                    face_nl,
                    quarter,
                });
            }
        }

        let mut pieces = Vec::new();
        let s1 = &domain.state1;
        let s2 = &domain.state2;
        // shock side: outward normal points away from the wedge side
        for j in 0..n2 {
            let (a, b) = (mesh.node(0, j), mesh.node(0, j + 1));
            let inward = sub(mesh.node(1, j), a);
            let m = mid(a, b);
            for (node, p, q) in [(mesh.index(0, j), a, m), (mesh.index(0, j + 1), m, b)] {
                let nl = oriented_normal(p, q, [-inward[0], -inward[1]]);
                let xm = mid(p, q);
                let dphi = s1.pseudo_velocity(xm);
                pieces.push(EdgePiece {
                    node,
                    kind: PieceKind::Shock,
                    length: nl[0].hypot(nl[1]),
                    flux: s1.rho * (dphi[0] * nl[0] + dphi[1] * nl[1]),
                });
            }
        }
        if !domain.top_is_dirichlet() {
            for i in 0..n1 {
                let (a, b) = (mesh.node(i, n2), mesh.node(i + 1, n2));
                let inward = sub(mesh.node(i, n2 - 1), a);
                let m = mid(a, b);
                for (node, p, q) in [(mesh.index(i, n2), a, m), (mesh.index(i + 1, n2), m, b)] {
                    let nl = oriented_normal(p, q, [-inward[0], -inward[1]]);
                    let xm = mid(p, q);
                    let dphi = s2.pseudo_velocity(xm);
                    pieces.push(EdgePiece {
                        node,
                        kind: PieceKind::StateFlux,
                        length: nl[0].hypot(nl[1]),
                        flux: s2.rho * (dphi[0] * nl[0] + dphi[1] * nl[1]),
                    });
                }
            }
        }

        let mut dirichlet = vec![None; mesh.node_count()];
        if domain.top_is_dirichlet() {
            for i in 0..=n1 {
                dirichlet[mesh.index(i, n2)] = Some(0.0);
            }
        }
        for j in 0..=n2 {
            let x = mesh.node(0, j);
            dirichlet[mesh.index(0, j)] = Some(s1.phi(x) - s2.phi(x));
        }

        let gamma = domain.gas.gamma();
        let gm1 = gamma - 1.0;
        Self {
            n1,
            n2,
            cells,
            pieces,
            dirichlet,
            volume,
            nodes: mesh.nodes.clone(),
            delta_e,
            power0: domain.gas.rho0().powf(gm1),
            gm1,
            inv_gm1: 1.0 / gm1,
            crit: 2.0 / (gamma + 1.0),
        }
    }

    pub fn node_count(&self) -> usize {
        (self.n1 + 1) * (self.n2 + 1)
    }

    /// Density from Bernoulli with `|Dphi|^2` capped at `(1 - delta_e) c_*^2`.
    #[inline]
    pub fn density(&self, speed_sq: f64, phi: f64, x: Point) -> Result<DensitySample> {
        let base = self.power0 - self.gm1 * phi;
        let cap = ((1.0 - self.delta_e) * self.crit * base).max(0.0);
        let (q2, cutoff_active) = if speed_sq > cap {
            (cap, true)
        } else {
            (speed_sq, false)
        };
        let arg = base - self.gm1 * 0.5 * q2;
        if !(arg > 0.0) {
            return Err(Error::VacuumEncountered {
                xi: x[0],
                eta: x[1],
            });
        }
        Ok(DensitySample {
            rho: arg.powf(self.inv_gm1),
            cutoff_active,
        })
    }

    /// Full potential data `(phi, Dphi)` at a quadrature point.
    #[inline]
    pub fn potential(&self, q: &QuadPoint, corners: &[f64; 4]) -> (f64, [f64; 2]) {
        let (v, g) = q.interpolate(corners);
        (q.phi2 + v, [q.dphi2[0] + g[0], q.dphi2[1] + g[1]])
    }

    fn corners(&self, cell: &CellGeom, psi: &[f64]) -> [f64; 4] {
        cell.nodes.map(|k| psi[k])
    }

    /// Raw flux balance per node: outward fluxes through the dual boundary
    /// (including prescribed boundary pieces) plus the source term. Free
    /// nodes must have zero balance; at shock nodes it measures the jump of
    /// the normal mass flux.
    ///
    /// `frozen` supplies fixed densities per quadrature point (Picard);
    /// `record` receives the densities actually used.
    pub fn balance(
        &self,
        psi: &[f64],
        frozen: Option<&[f64]>,
        mut record: Option<&mut Vec<f64>>,
    ) -> Result<Vec<f64>> {
        let mut b = vec![0.0; self.node_count()];
        if let Some(r) = record.as_deref_mut() {
            r.clear();
            r.reserve(self.cells.len() * POINTS_PER_CELL);
        }
        for (c, cell) in self.cells.iter().enumerate() {
            let corners = self.corners(cell, psi);
            let mut rho = [0.0; POINTS_PER_CELL];
            let mut grad = [[0.0; 2]; 4];
            for k in 0..POINTS_PER_CELL {
                let q = &cell.q[k];
                let (phi, dphi) = self.potential(q, &corners);
                if k < 4 {
                    grad[k] = dphi;
                }
                rho[k] = match frozen {
                    Some(f) => f[c * POINTS_PER_CELL + k],
                    None => {
                        self.density(dphi[0] * dphi[0] + dphi[1] * dphi[1], phi, q.x)?
                            .rho
                    }
                };
            }
            if let Some(r) = record.as_deref_mut() {
                r.extend_from_slice(&rho);
            }
            for f in 0..4 {
                let nl = cell.face_nl[f];
                let flux = rho[f] * (grad[f][0] * nl[0] + grad[f][1] * nl[1]);
                let (from, to) = FACE_NODES[f];
                b[cell.nodes[from]] += flux;
                b[cell.nodes[to]] -= flux;
            }
            for k in 0..4 {
                b[cell.nodes[k]] += 2.0 * rho[4 + k] * cell.quarter[k];
            }
        }
        for p in &self.pieces {
            b[p.node] += p.flux;
        }
        Ok(b)
    }

    /// Residual of the discrete problem: balance at free nodes,
    /// `psi - g` at Dirichlet nodes.
    pub fn residual_from_balance(&self, psi: &[f64], mut b: Vec<f64>) -> Vec<f64> {
        for (k, d) in self.dirichlet.iter().enumerate() {
            if let Some(g) = d {
                b[k] = psi[k] - g;
            }
        }
        b
    }

    pub fn residual(&self, psi: &[f64], frozen: Option<&[f64]>) -> Result<Vec<f64>> {
        let b = self.balance(psi, frozen, None)?;
        Ok(self.residual_from_balance(psi, b))
    }

    /// Max-norm of the residual with free rows scaled by their dual area.
    pub fn residual_norm(&self, r: &[f64]) -> f64 {
        r.iter()
            .enumerate()
            .map(|(k, v)| match self.dirichlet[k] {
                Some(_) => v.abs(),
                None => v.abs() / self.volume[k],
            })
            .fold(0.0, f64::max)
    }

    /// Jacobian of [`Operator::residual`] by finite differences, perturbing
    /// nine interleaved node colours at a time.
    pub fn jacobian(
        &self,
        psi: &[f64],
        frozen: Option<&[f64]>,
        base: &[f64],
    ) -> Result<BandMatrix> {
        let n = self.node_count();
        let w = self.n1 + 1;
        let bw = w + 1;
        let mut jac = BandMatrix::zeros(n, bw, bw);
        let scale = psi.iter().fold(1.0_f64, |m, v| m.max(v.abs()));
        let eps = 1e-7 * scale;
        let mut trial = psi.to_vec();
        for ci in 0..3 {
            for cj in 0..3 {
                let perturbed: Vec<(usize, usize)> = (cj..=self.n2)
                    .step_by(3)
                    .flat_map(|j| (ci..=self.n1).step_by(3).map(move |i| (i, j)))
                    .collect();
                for &(i, j) in &perturbed {
                    trial[j * w + i] += eps;
                }
                let r = self.residual(&trial, frozen)?;
                for &(i, j) in &perturbed {
                    let col = j * w + i;
                    trial[col] = psi[col];
                    for jj in j.saturating_sub(1)..=(j + 1).min(self.n2) {
                        for ii in i.saturating_sub(1)..=(i + 1).min(self.n1) {
                            let row = jj * w + ii;
                            if self.dirichlet[row].is_none() {
                                jac.set(row, col, (r[row] - base[row]) / eps);
                            }
                        }
                    }
                }
            }
        }
        for (k, d) in self.dirichlet.iter().enumerate() {
            if d.is_some() {
                jac.set(k, k, 1.0);
            }
        }
        Ok(jac)
    }

    /// Total shock-piece length attached to each node.
    pub fn shock_lengths(&self) -> Vec<f64> {
        let mut l = vec![0.0; self.node_count()];
        for p in self.pieces.iter().filter(|p| p.kind == PieceKind::Shock) {
            l[p.node] += p.length;
        }
        l
    }
}
