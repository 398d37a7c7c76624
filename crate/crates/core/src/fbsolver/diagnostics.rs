//! Discrete checks of the properties an admissible solution must have.

use serde::{Deserialize, Serialize};

use crate::geometry::ShockCurve;
use crate::states::Point;

use super::discrete::{Operator, QuadPoint, POINTS_PER_CELL};
use super::domain::Domain;
use super::{cell_corners, cell_nodes, Field, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Largest flux jump `|rho Dphi . nu - rho1 Dphi1 . nu|` over the shock nodes.
    pub rh_residual_max: f64,
    /// Inner residual, area-scaled, in the max norm.
    pub pde_residual_max: f64,
    /// Smallest `c_* - |Dphi|` at cell centres away from the arc layer.
    pub ellipticity_min_margin: f64,
    /// Same over every cell.
    pub ellipticity_min_margin_all: f64,
    /// Quadrature points off the arc layer where the cutoff bites.
    pub cutoff_active_off_layer: usize,
    /// `max((phi2 - phi)_+, (phi - phi1)_+)` over the nodes.
    pub bounds_violation: f64,
    /// Largest positive part of `d_eta(phi1 - phi)` and `D(phi1 - phi) . e`.
    pub monotonicity_violation: f64,
    /// Largest curvature of the shock polyline with the wrong sign.
    pub shock_convexity_defect: f64,
    /// Largest `|Dphi - Dphi2|` on the layer next to the sonic arc.
    pub sonic_matching: f64,
    /// Smallest distance from the shock to the sonic circle of state (1).
    pub shock_to_sonic1_distance: f64,
    /// Magnitude that makes the potential-based entries comparable.
    pub scale: f64,
}

fn sanitize(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

/// `max(|phi1|, |phi2|)` over the bounding box of the mesh.
fn potential_scale(domain: &Domain, field: &Field) -> f64 {
    let (lo, hi) = field.mesh.bounding_box();
    let mut probes: Vec<Point> = vec![lo, hi, [lo[0], hi[1]], [hi[0], lo[1]]];
    for s in [&domain.state1, &domain.state2] {
        let c = [s.u, s.v];
        if (lo[0]..=hi[0]).contains(&c[0]) && (lo[1]..=hi[1]).contains(&c[1]) {
            probes.push(c);
        }
    }
    probes
        .iter()
        .flat_map(|&p| [domain.state1.phi(p).abs(), domain.state2.phi(p).abs()])
        .fold(0.0, f64::max)
}

/// Signed curvature through three points (Menger).
fn menger(a: Point, b: Point, c: Point) -> f64 {
    let u = [b[0] - a[0], b[1] - a[1]];
    let v = [c[0] - b[0], c[1] - b[1]];
    let w = [c[0] - a[0], c[1] - a[1]];
    let cross = u[0] * v[1] - u[1] * v[0];
    let den = u[0].hypot(u[1]) * v[0].hypot(v[1]) * w[0].hypot(w[1]);
    if den == 0.0 {
        0.0
    } else {
        2.0 * cross / den
    }
}

/// Wrong-signed curvature of the shock. Walking from the start towards the
/// axis, the expected turn is to the left (positive cross product): the
/// shock, as a graph `xi = f(eta)`, is convex. The foot is checked against
/// its mirror image across the axis.
fn convexity_defect(shock: &ShockCurve) -> f64 {
    let p = &shock.points;
    let n = p.len();
    let mut worst: f64 = 0.0;
    for k in 1..n - 1 {
        worst = worst.max(-menger(p[k - 1], p[k], p[k + 1]));
    }
    if p[n - 1][1] == 0.0 && n >= 2 {
        let mirror = [p[n - 2][0], -p[n - 2][1]];
        worst = worst.max(-menger(p[n - 2], p[n - 1], mirror));
    }
    worst
}

/// Gradient of `psi` from logical central differences at an interior node.
fn central_gradient(field: &Field, psi: &[f64], i: usize, j: usize) -> [f64; 2] {
    let m = &field.mesh;
    let (e, w, n, s) = (
        m.index(i + 1, j),
        m.index(i - 1, j),
        m.index(i, j + 1),
        m.index(i, j - 1),
    );
    let xs = [
        0.5 * (m.nodes[e][0] - m.nodes[w][0]),
        0.5 * (m.nodes[e][1] - m.nodes[w][1]),
    ];
    let xt = [
        0.5 * (m.nodes[n][0] - m.nodes[s][0]),
        0.5 * (m.nodes[n][1] - m.nodes[s][1]),
    ];
    let ps = 0.5 * (psi[e] - psi[w]);
    let pt = 0.5 * (psi[n] - psi[s]);
    let det = xs[0] * xt[1] - xs[1] * xt[0];
    [
        (xt[1] * ps - xs[1] * pt) / det,
        (-xt[0] * ps + xs[0] * pt) / det,
    ]
}

/// Evaluates every diagnostic on a field and its shock. Never fails; entries
/// that cannot be evaluated are reported as `f64::MAX`.
pub fn run_diagnostics(
    domain: &Domain,
    field: &Field,
    shock: &ShockCurve,
    solver: &SolverConfig,
) -> Diagnostics {
    let m = &field.mesh;
    let psi = field.psi(domain);
    let op = Operator::new(domain, m, solver.delta_e);
    let gas = &domain.gas;

    let (rh_residual_max, pde_residual_max) = match op.balance(&psi, None, None) {
        Ok(b) => {
            let lengths = op.shock_lengths();
            let movable = domain.movable_nodes(m.n2);
            let rh = (0..movable)
                .map(|j| {
                    let k = m.index(0, j);
                    (b[k] / lengths[k]).abs()
                })
                .fold(0.0, f64::max);
            let r = op.residual_from_balance(&psi, b);
            (rh, op.residual_norm(&r))
        }
        Err(_) => (f64::MAX, f64::MAX),
    };

    let arc_layer = domain.has_arc_layer();
    let mut margin_off = f64::INFINITY;
    let mut margin_all = f64::INFINITY;
    let mut cutoff_active_off_layer = 0;
    for j in 0..m.n2 {
        let on_layer = arc_layer && j == m.n2 - 1;
        for i in 0..m.n1 {
            let corners = cell_corners(m, i, j);
            let values = cell_nodes(m, i, j).map(|k| psi[k]);
            let centre = QuadPoint::new(&corners, 0.5, 0.5, domain);
            let (phi, dphi) = op.potential(&centre, &values);
            let speed = dphi[0].hypot(dphi[1]);
            let margin = match gas.critical_speed(phi) {
                Ok(c) => c - speed,
                Err(_) => -speed,
            };
            margin_all = margin_all.min(margin);
            if !on_layer {
                margin_off = margin_off.min(margin);
                let cell = &op.cells[j * m.n1 + i];
                for q in cell.q.iter().take(POINTS_PER_CELL) {
                    let (phi, dphi) = op.potential(q, &values);
                    match op.density(dphi[0] * dphi[0] + dphi[1] * dphi[1], phi, q.x) {
                        Ok(s) if !s.cutoff_active => {}
                        _ => cutoff_active_off_layer += 1,
                    }
                }
            }
        }
    }

    let s1 = &domain.state1;
    let s2 = &domain.state2;
    let mut bounds_violation: f64 = 0.0;
    for (x, phi) in m.nodes.iter().zip(&field.phi) {
        bounds_violation = bounds_violation.max(s2.phi(*x) - phi).max(phi - s1.phi(*x));
    }

    // D(phi1 - phi) = (u1 - u2, v1 - v2) - D psi
    let jump = [s1.u - s2.u, s1.v - s2.v];
    let e_dir = domain.e_dir();
    let mut monotonicity_violation: f64 = 0.0;
    for j in 1..m.n2 {
        for i in 1..m.n1 {
            let g = central_gradient(field, &psi, i, j);
            let d = [jump[0] - g[0], jump[1] - g[1]];
            monotonicity_violation = monotonicity_violation.max(d[1]);
            if let Some(e) = e_dir {
                monotonicity_violation = monotonicity_violation.max(d[0] * e[0] + d[1] * e[1]);
            }
        }
    }

    // one-sided gradient on the arc: bilinear gradient at the top edge of
    // the last row of cells (cell centre where that edge has collapsed)
    let collapsed =
        matches!(domain.configuration(), Some(c) if c.regime == crate::geometry::Regime::Subsonic);
    let b_ref = if collapsed { 0.5 } else { 1.0 };
    let mut sonic_matching: f64 = 0.0;
    for i in 0..m.n1 {
        let j = m.n2 - 1;
        let corners = cell_corners(m, i, j);
        let values = cell_nodes(m, i, j).map(|k| psi[k]);
        let q = QuadPoint::new(&corners, 0.5, b_ref, domain);
        let (_, g) = q.interpolate(&values);
        sonic_matching = sonic_matching.max(g[0].hypot(g[1]));
    }

    let c1 = gas.sound_speed(s1.rho).unwrap_or(0.0);
    let shock_to_sonic1_distance = shock
        .points
        .iter()
        .map(|p| (p[0] - s1.u).hypot(p[1] - s1.v) - c1)
        .fold(f64::INFINITY, f64::min);

    Diagnostics {
        rh_residual_max: sanitize(rh_residual_max),
        pde_residual_max: sanitize(pde_residual_max),
        ellipticity_min_margin: sanitize(margin_off),
        ellipticity_min_margin_all: sanitize(margin_all),
        cutoff_active_off_layer,
        bounds_violation: sanitize(bounds_violation.max(0.0)),
        monotonicity_violation: sanitize(monotonicity_violation.max(0.0)),
        shock_convexity_defect: sanitize(convexity_defect(shock)),
        sonic_matching: sanitize(sonic_matching),
        shock_to_sonic1_distance: sanitize(shock_to_sonic1_distance),
        scale: sanitize(potential_scale(domain, field)),
    }
}
