//! Free-boundary solver for the reflected shock.
//!
//! The inner problem fixes the shock, imposes continuity of the potential on
//! it and solves the quasilinear equation `div(rho Dphi) + 2 rho = 0` in the
//! elliptic region. The outer loop moves the shock until the normal mass flux
//! is continuous across it.

pub mod band;
mod diagnostics;
pub(crate) mod discrete;
pub mod domain;
pub mod mesh;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    build_configuration, initial_shock_guess, ReflectionConfiguration, ShockCurve,
};
use crate::polar::{solve_state2, Branch, Problem};
use crate::states::Point;

pub use diagnostics::{run_diagnostics, Diagnostics};
pub use domain::{Domain, DomainShape};
pub use mesh::Mesh;

use band::{dense_solve, BandLu};
use discrete::{Operator, QuadPoint};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub n1: usize,
    pub n2: usize,
    /// Ellipticity cutoff fraction.
    pub delta_e: f64,
    /// Under-relaxation of the shock displacement.
    pub relax: f64,
    pub tol_pde: f64,
    pub tol_rh: f64,
    pub max_outer: usize,
    pub max_inner: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            n1: 64,
            n2: 64,
            delta_e: 0.002,
            relax: 0.5,
            tol_pde: 1e-9,
            tol_rh: 1e-8,
            max_outer: 100,
            max_inner: 30,
        }
    }
}

pub const RELAX_FLOOR: f64 = 1.0 / 64.0;

impl SolverConfig {
    pub fn with_grid(n1: usize, n2: usize) -> Self {
        Self {
            n1,
            n2,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n1 < 8 || self.n2 < 8 {
            return Err(Error::InvalidParameter(format!(
                "grid must be at least 8x8, got {}x{}",
                self.n1, self.n2
            )));
        }
        if !(self.delta_e > 0.0 && self.delta_e < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta_e must lie in (0,1), got {}",
                self.delta_e
            )));
        }
        if !(self.relax > 0.0 && self.relax <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "relax must lie in (0,1], got {}",
                self.relax
            )));
        }
        if !(self.tol_pde > 0.0 && self.tol_rh > 0.0) {
            return Err(Error::InvalidParameter(
                "tolerances must be positive".into(),
            ));
        }
        if self.max_outer == 0 || self.max_inner == 0 {
            return Err(Error::InvalidParameter(
                "iteration caps must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Nodal values of the potential on a mesh.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub mesh: Mesh,
    pub phi: Vec<f64>,
}

/// Values reconstructed at a mesh node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeSample {
    pub x: Point,
    pub phi: f64,
    pub dphi: [f64; 2],
    /// NaN where the Bernoulli law gives vacuum.
    pub rho: f64,
    pub pseudo_mach: f64,
    /// `c_* - |Dphi|`.
    pub elliptic_margin: f64,
}

impl Field {
    pub fn psi(&self, domain: &Domain) -> Vec<f64> {
        self.mesh
            .nodes
            .iter()
            .zip(&self.phi)
            .map(|(&x, &p)| p - domain.state2.phi(x))
            .collect()
    }

    fn from_psi(domain: &Domain, mesh: Mesh, psi: &[f64]) -> Self {
        let phi = mesh
            .nodes
            .iter()
            .zip(psi)
            .map(|(&x, &p)| domain.state2.phi(x) + p)
            .collect();
        Self { mesh, phi }
    }

    /// Gradients averaged over the cells around each node.
    pub fn node_samples(&self, domain: &Domain) -> Vec<NodeSample> {
        let m = &self.mesh;
        let psi = self.psi(domain);
        let gas = &domain.gas;
        let mut out = Vec::with_capacity(m.node_count());
        for j in 0..=m.n2 {
            for i in 0..=m.n1 {
                let mut g = [0.0; 2];
                let mut count = 0;
                let mut fallback = [0.0; 2];
                let mut fallback_count = 0;
                for cj in j.saturating_sub(1)..j.min(m.n2 - 1) + 1 {
                    for ci in i.saturating_sub(1)..i.min(m.n1 - 1) + 1 {
                        let corners = cell_corners(m, ci, cj);
                        let values = cell_nodes(m, ci, cj).map(|k| psi[k]);
                        let a = (i - ci) as f64;
                        let b = (j - cj) as f64;
                        let q = QuadPoint::new(&corners, a, b, domain);
                        if q.gx.iter().chain(&q.gy).any(|v| *v != 0.0) {
                            let (_, d) = q.interpolate(&values);
                            g[0] += d[0];
                            g[1] += d[1];
                            count += 1;
                        } else {
                            let qc = QuadPoint::new(&corners, 0.5, 0.5, domain);
                            let (_, d) = qc.interpolate(&values);
                            fallback[0] += d[0];
                            fallback[1] += d[1];
                            fallback_count += 1;
                        }
                    }
                }
                let dpsi = if count > 0 {
                    [g[0] / count as f64, g[1] / count as f64]
                } else {
                    [
                        fallback[0] / fallback_count as f64,
                        fallback[1] / fallback_count as f64,
                    ]
                };
                let x = m.node(i, j);
                let d2 = domain.state2.pseudo_velocity(x);
                let dphi = [d2[0] + dpsi[0], d2[1] + dpsi[1]];
                let phi = self.phi[m.index(i, j)];
                let speed = dphi[0].hypot(dphi[1]);
                let rho = gas
                    .density_from_bernoulli(speed * speed, phi)
                    .unwrap_or(f64::NAN);
                let c = rho.powf(0.5 * (gas.gamma() - 1.0));
                let cstar = gas.critical_speed(phi).unwrap_or(0.0);
                out.push(NodeSample {
                    x,
                    phi,
                    dphi,
                    rho,
                    pseudo_mach: speed / c,
                    elliptic_margin: cstar - speed,
                });
            }
        }
        out
    }
}

pub(crate) fn cell_nodes(m: &Mesh, i: usize, j: usize) -> [usize; 4] {
    [
        m.index(i, j),
        m.index(i + 1, j),
        m.index(i + 1, j + 1),
        m.index(i, j + 1),
    ]
}

pub(crate) fn cell_corners(m: &Mesh, i: usize, j: usize) -> [Point; 4] {
    cell_nodes(m, i, j).map(|k| m.nodes[k])
}

/// Converged inner solve with the factored Jacobian at the solution.
struct InnerSolution {
    psi: Vec<f64>,
    balance: Vec<f64>,
    lu: BandLu,
    residual_norm: f64,
}

fn solve_inner(op: &Operator, warm: Option<&[f64]>, cfg: &SolverConfig) -> Result<InnerSolution> {
    let n = op.node_count();
    let mut psi = match warm {
        Some(w) if w.len() == n => w.to_vec(),
        _ => vec![0.0; n],
    };
    for (k, d) in op.dirichlet.iter().enumerate() {
        if let Some(g) = d {
            psi[k] = *g;
        }
    }
    let mut rho = Vec::new();
    let mut balance = op.balance(&psi, None, Some(&mut rho))?;
    let mut r = op.residual_from_balance(&psi, balance.clone());
    let mut norm = op.residual_norm(&r);
    for _ in 0..cfg.max_inner {
        let lu = op.jacobian(&psi, None, &r)?.factor()?;
        if norm < cfg.tol_pde {
            return Ok(InnerSolution {
                psi,
                balance,
                lu,
                residual_norm: norm,
            });
        }
        let step = lu.solve(&r);
        let mut accepted = false;
        let mut alpha = 1.0;
        while alpha >= 1.0 / 64.0 {
            let trial: Vec<f64> = psi.iter().zip(&step).map(|(p, s)| p - alpha * s).collect();
            let mut trial_rho = Vec::new();
            if let Ok(b) = op.balance(&trial, None, Some(&mut trial_rho)) {
                let tr = op.residual_from_balance(&trial, b.clone());
                let tn = op.residual_norm(&tr);
                if tn < norm {
                    psi = trial;
                    rho = trial_rho;
                    balance = b;
                    r = tr;
                    norm = tn;
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if !accepted {
            // fixed-point step on the density coefficient
            let picard = op.jacobian(&psi, Some(&rho), &r)?.factor()?;
            let step = picard.solve(&r);
            for (p, s) in psi.iter_mut().zip(&step) {
                *p -= s;
            }
            balance = op.balance(&psi, None, Some(&mut rho))?;
            r = op.residual_from_balance(&psi, balance.clone());
            norm = op.residual_norm(&r);
        }
    }
    if norm < cfg.tol_pde {
        let lu = op.jacobian(&psi, None, &r)?.factor()?;
        return Ok(InnerSolution {
            psi,
            balance,
            lu,
            residual_norm: norm,
        });
    }
    Err(Error::InnerDiverged {
        residual: norm,
        iterations: cfg.max_inner,
    })
}

/// Jump of the normal mass flux at the movable shock nodes (axis first),
/// per unit shock length.
fn rh_residuals(op: &Operator, balance: &[f64], movable: usize) -> Vec<f64> {
    let lengths = op.shock_lengths();
    let w = op.n1 + 1;
    (0..movable)
        .map(|j| balance[j * w] / lengths[j * w])
        .collect()
}

fn check_shock(domain: &Domain, shock: &ShockCurve, n2: usize) -> Result<Vec<f64>> {
    if shock.len() != n2 + 1 {
        return Err(Error::InvalidParameter(format!(
            "shock has {} points, the mesh needs {}",
            shock.len(),
            n2 + 1
        )));
    }
    let xs = domain.abscissae(shock);
    let etas = domain.shock_etas(n2);
    for (p, e) in shock.points.iter().rev().zip(&etas) {
        if (p[1] - e).abs() > 1e-12 * (1.0 + e.abs()) {
            return Err(Error::InvalidParameter(
                "shock nodes must sit at equally spaced heights".into(),
            ));
        }
    }
    if let Some(c) = domain.configuration() {
        if !shock.is_simple() || xs[0] >= c.p3[0] {
            return Err(Error::InvalidParameter(
                "shock leaves the admissible region".into(),
            ));
        }
    }
    Ok(xs)
}

/// Solves the inner problem with the shock held fixed.
pub fn solve_bvp_fixed_shock(
    domain: &Domain,
    shock: &ShockCurve,
    solver: &SolverConfig,
) -> Result<Field> {
    solver.validate()?;
    let xs = check_shock(domain, shock, solver.n2)?;
    let mesh = domain.mesh(solver.n1, &xs);
    let op = Operator::new(domain, &mesh, solver.delta_e);
    let inner = solve_inner(&op, None, solver)?;
    Ok(Field::from_psi(domain, mesh, &inner.psi))
}

/// Newton correction of the movable shock abscissae for the flux-jump residuals.
fn shock_newton(
    domain: &Domain,
    xs: &[f64],
    inner: &InnerSolution,
    op: &Operator,
    cfg: &SolverConfig,
) -> Result<Vec<f64>> {
    let movable = domain.movable_nodes(cfg.n2);
    let r = rh_residuals(op, &inner.balance, movable);
    let base = op.residual_from_balance(&inner.psi, inner.balance.clone());
    let columns: Vec<Result<Vec<f64>>> = (0..movable)
        .into_par_iter()
        .map(|j| {
            let width = local_width(op, j);
            let eps = 1e-6 * width;
            let mut moved = xs.to_vec();
            moved[j] += eps;
            let mesh = domain.mesh(cfg.n1, &moved);
            let op2 = Operator::new(domain, &mesh, cfg.delta_e);
            let r2 = op2.residual(&inner.psi, None)?;
            let diff: Vec<f64> = r2.iter().zip(&base).map(|(a, b)| a - b).collect();
            let dpsi = inner.lu.solve(&diff);
            let psi2: Vec<f64> = inner.psi.iter().zip(&dpsi).map(|(p, d)| p - d).collect();
            let b2 = op2.balance(&psi2, None, None)?;
            let rr = rh_residuals(&op2, &b2, movable);
            Ok(rr.iter().zip(&r).map(|(a, b)| (a - b) / eps).collect())
        })
        .collect();
    let mut s = vec![0.0; movable * movable];
    for (j, col) in columns.into_iter().enumerate() {
        let col = col?;
        for (k, v) in col.into_iter().enumerate() {
            s[k * movable + j] = v;
        }
    }
    let neg_r: Vec<f64> = r.iter().map(|v| -v).collect();
    dense_solve(s, neg_r).map_err(|e| match e {
        Error::SingularMatrix(node) => Error::SensitivityDegenerate { node },
        other => other,
    })
}

/// Length of the mesh line leaving shock node `j` towards the wedge.
fn local_width(op: &Operator, j: usize) -> f64 {
    let w = op.n1 + 1;
    let a = op.nodes[j * w];
    let b = op.nodes[j * w + 1];
    (b[0] - a[0]).hypot(b[1] - a[1])
}

/// One outer step from a solved field: moves the shock by the relaxed
/// Newton correction of the flux-jump residual, capped at one local cell
/// width.
pub fn update_shock(
    domain: &Domain,
    field: &Field,
    shock: &ShockCurve,
    solver: &SolverConfig,
) -> Result<ShockCurve> {
    solver.validate()?;
    let xs = check_shock(domain, shock, solver.n2)?;
    let op = Operator::new(domain, &field.mesh, solver.delta_e);
    let inner = solve_inner(&op, Some(&field.psi(domain)), solver)?;
    let step = shock_newton(domain, &xs, &inner, &op, solver)?;
    let moved = apply_step(&op, &xs, &step, solver.relax);
    Ok(domain.shock_curve(&moved))
}

fn apply_step(op: &Operator, xs: &[f64], correction: &[f64], relax: f64) -> Vec<f64> {
    let mut scale: f64 = 1.0;
    for (j, c) in correction.iter().enumerate() {
        let d = relax * c.abs();
        let width = local_width(op, j);
        if d > width {
            scale = scale.min(width / d);
        }
    }
    let mut out = xs.to_vec();
    for (x, c) in out.iter_mut().zip(correction) {
        *x += relax * scale * c;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    NotConverged,
}

impl SolveStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::NotConverged => "not_converged",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub rh_residual_max: f64,
    pub pde_residual: f64,
    pub relax: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FreeBoundarySolution {
    pub field: Field,
    pub shock: ShockCurve,
    pub diagnostics: Diagnostics,
    pub status: SolveStatus,
    pub outer_iterations: usize,
    pub history: Vec<OuterRecord>,
}

/// Alternates inner solves and shock updates from `shock` until the flux
/// jump falls below `tol_rh` or `max_outer` solves have been made.
pub fn solve_free_boundary(
    domain: &Domain,
    shock: &ShockCurve,
    solver: &SolverConfig,
) -> Result<FreeBoundarySolution> {
    solver.validate()?;
    let mut xs = check_shock(domain, shock, solver.n2)?;
    let mut warm: Option<Vec<f64>> = None;
    let mut relax = solver.relax;
    let mut previous = f64::INFINITY;
    let mut history = Vec::new();
    let mut last: Option<(Field, Vec<f64>)> = None;
    let mut status = SolveStatus::NotConverged;
    for outer in 0..solver.max_outer {
        let mesh = domain.mesh(solver.n1, &xs);
        let op = Operator::new(domain, &mesh, solver.delta_e);
        let inner = match solve_inner(&op, warm.as_deref(), solver) {
            Ok(s) => s,
            Err(_) if last.is_some() => break,
            Err(e) => return Err(e),
        };
        let movable = domain.movable_nodes(solver.n2);
        let r = rh_residuals(&op, &inner.balance, movable);
        let rmax = r.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if rmax > previous {
            relax = (0.5 * relax).max(RELAX_FLOOR);
        }
        history.push(OuterRecord {
            rh_residual_max: rmax,
            pde_residual: inner.residual_norm,
            relax,
        });
        last = Some((
            Field::from_psi(domain, mesh.clone(), &inner.psi),
            xs.clone(),
        ));
        if rmax < solver.tol_rh {
            status = SolveStatus::Converged;
            break;
        }
        if outer + 1 == solver.max_outer {
            break;
        }
        previous = rmax;
        let step = match shock_newton(domain, &xs, &inner, &op, solver) {
            Ok(s) => s,
            Err(_) => break,
        };
        xs = apply_step(&op, &xs, &step, relax);
        if let Some(c) = domain.configuration() {
            if xs[0] >= c.p3[0] {
                break;
            }
        }
        warm = Some(inner.psi);
    }
    let (field, xs_last) = last.expect("at least one inner solve");
    let shock = domain.shock_curve(&xs_last);
    let diagnostics = run_diagnostics(domain, &field, &shock, solver);
    Ok(FreeBoundarySolution {
        field,
        shock,
        diagnostics,
        status,
        outer_iterations: history.len(),
        history,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularReflection {
    pub configuration: ReflectionConfiguration,
    pub solution: FreeBoundarySolution,
}

/// Full pipeline: polar root, configuration, starting shock, free-boundary
/// iteration and diagnostics.
pub fn solve_regular_reflection(
    gamma: f64,
    rho0: f64,
    rho1: f64,
    theta_w: f64,
    branch: Branch,
    solver: &SolverConfig,
) -> Result<RegularReflection> {
    solver.validate()?;
    let problem = Problem::new(gamma, rho0, rho1)?;
    let polar = solve_state2(&problem, theta_w, branch)?;
    let configuration = build_configuration(&problem, &polar)?;
    let guess = initial_shock_guess(&configuration, solver.n2)?;
    let domain = Domain::from_configuration(&configuration);
    let solution = solve_free_boundary(&domain, &guess.curve, solver)?;
    Ok(RegularReflection {
        configuration,
        solution,
    })
}
