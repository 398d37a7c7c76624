//! The region the inner problem is posed on: which uniform states border it
//! and how its four sides are laid out.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gas::GasModel;
use crate::geometry::{ReflectionConfiguration, Regime, ShockCurve};
use crate::polar::Problem;
use crate::states::{normal_reflection, NormalReflection, Point, UniformState};

use super::mesh::Mesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DomainShape {
    /// Region bounded by the curved shock, the sonic arc (or `P0`), the
    /// wedge and the axis.
    Reflection(Box<ReflectionConfiguration>),
    /// Rectangle `[x_shock, 0] x [0, height]` behind a vertical shock, with
    /// the reflecting wall at `xi = 0`. The top carries the flux of state (2).
    Column { height: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub gas: GasModel,
    pub state1: UniformState,
    /// Reference state; the unknown is `phi - phi2`.
    pub state2: UniformState,
    pub shape: DomainShape,
}

impl Domain {
    pub fn from_configuration(config: &ReflectionConfiguration) -> Self {
        Self {
            gas: config.problem.gas,
            state1: config.problem.state1,
            state2: config.polar.state2,
            shape: DomainShape::Reflection(Box::new(*config)),
        }
    }

    /// Column analogue of the wedge problem at `theta_w = pi/2`.
    pub fn normal_reflection_column(
        problem: &Problem,
        height: f64,
    ) -> Result<(Self, NormalReflection)> {
        let nr = normal_reflection(&problem.gas, problem.state1.rho)?;
        Ok((
            Self {
                gas: problem.gas,
                state1: problem.state1,
                state2: nr.state2,
                shape: DomainShape::Column { height },
            },
            nr,
        ))
    }

    pub fn configuration(&self) -> Option<&ReflectionConfiguration> {
        match &self.shape {
            DomainShape::Reflection(c) => Some(c),
            DomainShape::Column { .. } => None,
        }
    }

    /// True when the top side is the Dirichlet arc `phi = phi2`.
    pub fn top_is_dirichlet(&self) -> bool {
        matches!(self.shape, DomainShape::Reflection(_))
    }

    /// True when the top row of cells touches a genuine sonic arc.
    pub fn has_arc_layer(&self) -> bool {
        matches!(&self.shape, DomainShape::Reflection(c) if c.regime == Regime::Supersonic)
    }

    pub fn e_dir(&self) -> Option<[f64; 2]> {
        self.configuration().and_then(|c| c.e_dir)
    }

    fn top_eta(&self) -> f64 {
        match &self.shape {
            DomainShape::Reflection(c) => c.shock_start()[1],
            DomainShape::Column { height } => *height,
        }
    }

    /// Fixed heights of the shock nodes, axis first.
    pub fn shock_etas(&self, n2: usize) -> Vec<f64> {
        let top = self.top_eta();
        (0..=n2)
            .map(|j| {
                if j == n2 {
                    top
                } else {
                    top * j as f64 / n2 as f64
                }
            })
            .collect()
    }

    /// Number of shock nodes (from the axis up) whose position is unknown.
    /// The top node is pinned at `P1` on the reflection domain.
    pub fn movable_nodes(&self, n2: usize) -> usize {
        match self.shape {
            DomainShape::Reflection(_) => n2,
            DomainShape::Column { .. } => n2 + 1,
        }
    }

    /// Shock abscissae, axis first, from a curve stored start-first.
    pub fn abscissae(&self, shock: &ShockCurve) -> Vec<f64> {
        shock.points.iter().rev().map(|p| p[0]).collect()
    }

    /// Inverse of [`Domain::abscissae`].
    pub fn shock_curve(&self, xs: &[f64]) -> ShockCurve {
        let n2 = xs.len() - 1;
        let etas = self.shock_etas(n2);
        let mut points: Vec<Point> = xs.iter().zip(&etas).map(|(&x, &e)| [x, e]).collect();
        if let DomainShape::Reflection(c) = &self.shape {
            points[n2] = c.shock_start();
        }
        points.reverse();
        ShockCurve { points }
    }

    pub fn mesh(&self, n1: usize, xs: &[f64]) -> Mesh {
        let n2 = xs.len() - 1;
        let etas = self.shock_etas(n2);
        let mut shock: Vec<Point> = xs.iter().zip(&etas).map(|(&x, &e)| [x, e]).collect();
        let foot = shock[0];
        match &self.shape {
            DomainShape::Reflection(c) => {
                shock[n2] = c.shock_start();
                let p4 = c.p4;
                let p3 = c.p3;
                Mesh::transfinite(
                    n1,
                    &shock,
                    |t| [p3[0] + t * (p4[0] - p3[0]), p3[1] + t * (p4[1] - p3[1])],
                    |s| [foot[0] + s * (p3[0] - foot[0]), 0.0],
                    |s| c.sonic_arc_point(s),
                )
            }
            DomainShape::Column { height } => {
                let h = *height;
                let top = shock[n2];
                Mesh::transfinite(
                    n1,
                    &shock,
                    |t| [0.0, t * h],
                    |s| [(1.0 - s) * foot[0], 0.0],
                    |s| [(1.0 - s) * top[0], h],
                )
            }
        }
    }
}
