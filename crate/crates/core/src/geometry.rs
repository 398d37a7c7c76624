//! Regular-reflection configuration: points `P0..P4`, the flat reflected
//! shock `S1`, the sonic circle of state (2), and a starting curve for the
//! free boundary.
//!
//! `P3` is the wedge tip at the origin. In the supersonic regime `P1` is the
//! first crossing of `S1` with the sonic circle when walking from `P0`
//! towards the axis, and `P4` is where that circle meets the wedge on the side
//! facing `P0`. In the subsonic regime both collapse onto `P0`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::polar::{Classification, PolarSolution, Problem};
use crate::states::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Supersonic,
    Subsonic,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Supersonic => "supersonic",
            Regime::Subsonic => "subsonic",
        }
    }
}

/// Upper half of the exterior of the wedge `{eta <= xi tan theta_w, xi > 0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WedgeGeometry {
    pub theta_w: f64,
}

impl WedgeGeometry {
    pub fn new(theta_w: f64) -> Result<Self> {
        if !(theta_w > 0.0 && theta_w < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "wedge angle must lie in (0, pi/2), got {theta_w}"
            )));
        }
        Ok(Self { theta_w })
    }

    pub fn direction(&self) -> [f64; 2] {
        let (s, c) = self.theta_w.sin_cos();
        [c, s]
    }

    /// Whether `p` lies in the closed upper half of the flow domain.
    pub fn contains(&self, p: Point) -> bool {
        p[1] >= 0.0 && !(p[0] > 0.0 && p[1] < p[0] * self.theta_w.tan())
    }
}

/// The flat reflected shock through `P0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlatShock {
    pub point: Point,
    /// Unit normal along `D(phi1 - phi2)`, pointing into state (1).
    pub normal: [f64; 2],
    /// Unit tangent pointing from `P0` towards the axis.
    pub direction: [f64; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SonicCircle {
    pub center: Point,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReflectionConfiguration {
    pub problem: Problem,
    pub polar: PolarSolution,
    pub wedge: WedgeGeometry,
    pub p0: Point,
    pub p1: Point,
    /// Provisional foot of the reflected shock: the crossing of `S1` with the
    /// axis. The solved free boundary carries its own endpoint.
    pub p2: Point,
    pub p3: Point,
    pub p4: Point,
    pub s1: FlatShock,
    pub sonic: SonicCircle,
    pub regime: Regime,
    /// `(P1 - P0)/|P1 - P0|`; only defined in the supersonic regime.
    pub e_dir: Option<[f64; 2]>,
}

fn sub(a: Point, b: Point) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

impl ReflectionConfiguration {
    pub fn sonic_arc_angles(&self) -> (f64, f64) {
        let c = self.sonic.center;
        let a1 = (self.p1[1] - c[1]).atan2(self.p1[0] - c[0]);
        let mut a4 = (self.p4[1] - c[1]).atan2(self.p4[0] - c[0]);
        while a4 - a1 > std::f64::consts::PI {
            a4 -= 2.0 * std::f64::consts::PI;
        }
        while a1 - a4 > std::f64::consts::PI {
            a4 += 2.0 * std::f64::consts::PI;
        }
        (a1, a4)
    }

    /// Point on the sonic arc from `P1` (`s = 0`) to `P4` (`s = 1`); `P0` in
    /// the subsonic regime.
    pub fn sonic_arc_point(&self, s: f64) -> Point {
        match self.regime {
            Regime::Subsonic => self.p0,
            Regime::Supersonic => {
                if s <= 0.0 {
                    return self.p1;
                }
                if s >= 1.0 {
                    return self.p4;
                }
                let (a1, a4) = self.sonic_arc_angles();
                let a = a1 + s * (a4 - a1);
                let c = self.sonic.center;
                [
                    c[0] + self.sonic.radius * a.cos(),
                    c[1] + self.sonic.radius * a.sin(),
                ]
            }
        }
    }

    /// Start of the free boundary: `P1`, or `P0` in the subsonic regime.
    pub fn shock_start(&self) -> Point {
        self.p1
    }

    /// `phi1 - phi2`, which vanishes on `S1`.
    pub fn potential_jump(&self, p: Point) -> f64 {
        self.problem.state1.phi(p) - self.polar.state2.phi(p)
    }
}

/// Assembles the configuration for a solved state (2).
pub fn build_configuration(
    problem: &Problem,
    polar: &PolarSolution,
) -> Result<ReflectionConfiguration> {
    let wedge = WedgeGeometry::new(polar.theta_w)?;
    let p0 = polar.p0;
    let p3 = [0.0, 0.0];
    let s1st = &problem.state1;
    let s2 = &polar.state2;
    let n = [s1st.u - s2.u, s1st.v - s2.v];
    let len = norm(n);
    if len == 0.0 {
        return Err(Error::SingularNormal);
    }
    let normal = [n[0] / len, n[1] / len];
    let mut direction = [-normal[1], normal[0]];
    if dot(direction, sub(p3, p0)) < 0.0 {
        direction = [-direction[0], -direction[1]];
    }
    let s1 = FlatShock {
        point: p0,
        normal,
        direction,
    };
    let center = [s2.u, s2.v];
    let radius = problem.gas.sound_speed(s2.rho)?;
    let sonic = SonicCircle { center, radius };

    // S1 meets {eta = 0} at P0 + s d with s = -P0.y / d.y
    let p2 = if direction[1] < 0.0 {
        let s = -p0[1] / direction[1];
        [p0[0] + s * direction[0], 0.0]
    } else {
        return Err(Error::NoIntersection(
            "S1 does not descend to the axis".into(),
        ));
    };

    let supersonic =
        norm(sub(p0, center)) > radius && polar.classification == Classification::Supersonic;
    let (p1, p4, regime, e_dir) = if supersonic {
        // |P0 + s d - C|^2 = r^2
        let w = sub(p0, center);
        let b = dot(direction, w);
        let c = dot(w, w) - radius * radius;
        let disc = b * b - c;
        if disc < 0.0 || b >= 0.0 {
            return Err(Error::NoIntersection(
                "flat shock S1 misses the sonic circle of state (2)".into(),
            ));
        }
        let s = -b - disc.sqrt();
        let p1 = [p0[0] + s * direction[0], p0[1] + s * direction[1]];
        if p1[1] <= 0.0 {
            return Err(Error::NoIntersection("P1 lies below the axis".into()));
        }
        let dir = wedge.direction();
        let dist = polar.q2 + radius;
        if dist >= norm(p0) {
            return Err(Error::NoIntersection(
                "sonic circle meets the wedge beyond P0".into(),
            ));
        }
        let p4 = [dist * dir[0], dist * dir[1]];
        let e = sub(p1, p0);
        let el = norm(e);
        (p1, p4, Regime::Supersonic, Some([e[0] / el, e[1] / el]))
    } else {
        (p0, p0, Regime::Subsonic, None)
    };

    Ok(ReflectionConfiguration {
        problem: *problem,
        polar: *polar,
        wedge,
        p0,
        p1,
        p2,
        p3,
        p4,
        s1,
        sonic,
        regime,
        e_dir,
    })
}

/// Ordered polyline for the curved reflected shock, from `P1` (or `P0`) to the
/// foot `P2` on the axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockCurve {
    pub points: Vec<Point>,
}

impl ShockCurve {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Point {
        self.points[0]
    }

    pub fn foot(&self) -> Point {
        *self.points.last().expect("non-empty shock")
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| norm(sub(w[1], w[0]))).sum()
    }

    /// Unit tangent of the last segment, pointing towards the axis.
    pub fn end_tangent(&self) -> [f64; 2] {
        let n = self.points.len();
        let t = sub(self.points[n - 1], self.points[n - 2]);
        let l = norm(t);
        [t[0] / l, t[1] / l]
    }

    pub fn is_simple(&self) -> bool {
        let p = &self.points;
        let n = p.len();
        for i in 0..n.saturating_sub(1) {
            for j in (i + 2)..n.saturating_sub(1) {
                if segments_cross(p[i], p[i + 1], p[j], p[j + 1]) {
                    return false;
                }
            }
        }
        true
    }

    /// Checks the endpoint loci, simplicity, and orthogonality to the axis
    /// at the foot within `tangent_tol`.
    pub fn validate(&self, start: Point, tangent_tol: f64) -> Result<()> {
        if self.points.len() < 3 {
            return Err(Error::InvalidParameter(
                "shock needs at least 3 points".into(),
            ));
        }
        if norm(sub(self.start(), start)) > 1e-12 * (1.0 + norm(start)) {
            return Err(Error::InvalidParameter("shock does not start at P1".into()));
        }
        if self.foot()[1] != 0.0 {
            return Err(Error::InvalidParameter("shock foot is off the axis".into()));
        }
        if !self.is_simple() {
            return Err(Error::InvalidParameter(
                "shock curve self-intersects".into(),
            ));
        }
        if self.end_tangent()[0].abs() > tangent_tol {
            return Err(Error::InvalidParameter(format!(
                "shock meets the axis at a non-right angle (|t_xi| = {})",
                self.end_tangent()[0].abs()
            )));
        }
        Ok(())
    }

    /// Minimum of `|p - center| - radius` over the vertices.
    pub fn clearance(&self, circle: &SonicCircle) -> f64 {
        self.points
            .iter()
            .map(|&p| norm(sub(p, circle.center)) - circle.radius)
            .fold(f64::INFINITY, f64::min)
    }
}

fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

/// Quadratic Bezier starting guess for the free boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShockGuess {
    /// Start (`P1` or `P0`), control point, foot on the axis.
    pub control: [Point; 3],
    pub curve: ShockCurve,
}

impl ShockGuess {
    pub fn point(&self, t: f64) -> Point {
        let [a, c, b] = self.control;
        let s = 1.0 - t;
        [
            s * s * a[0] + 2.0 * s * t * c[0] + t * t * b[0],
            s * s * a[1] + 2.0 * s * t * c[1] + t * t * b[1],
        ]
    }

    pub fn tangent(&self, t: f64) -> [f64; 2] {
        let [a, c, b] = self.control;
        let d = [
            2.0 * (1.0 - t) * (c[0] - a[0]) + 2.0 * t * (b[0] - c[0]),
            2.0 * (1.0 - t) * (c[1] - a[1]) + 2.0 * t * (b[1] - c[1]),
        ];
        let l = norm(d);
        [d[0] / l, d[1] / l]
    }
}

/// Circle behind the incident shock, `{|Dphi1| = c1}`.
pub fn state1_sonic_circle(problem: &Problem) -> SonicCircle {
    SonicCircle {
        center: [problem.state1.u, problem.state1.v],
        radius: problem.c1(),
    }
}

/// Builds the one-parameter Bezier guess with `n_segments` segments,
/// vertices equally spaced in `eta`.
///
/// The control point sits on `S1` at distance `lambda` below the start; the
/// foot lies vertically below it, which makes the end orthogonal to the axis.
/// `lambda` is taken from a fixed list of fractions of its admissible range;
/// the first one that clears the state-(1) sonic circle and keeps the foot
/// behind the wedge tip wins.
pub fn initial_shock_guess(
    config: &ReflectionConfiguration,
    n_segments: usize,
) -> Result<ShockGuess> {
    if n_segments < 2 {
        return Err(Error::InvalidParameter(
            "need at least 2 shock segments".into(),
        ));
    }
    let start = config.shock_start();
    let d = config.s1.direction;
    if d[1] >= 0.0 {
        return Err(Error::GuessInfeasible("S1 does not descend".into()));
    }
    let lambda_max = start[1] / -d[1];
    let sonic1 = state1_sonic_circle(&config.problem);
    for frac in [0.5, 0.4, 0.6, 0.3, 0.7, 0.2, 0.8, 0.1, 0.9] {
        let lambda = frac * lambda_max;
        let c = [start[0] + lambda * d[0], start[1] + lambda * d[1]];
        let foot = [c[0], 0.0];
        if foot[0] >= config.p3[0] {
            continue;
        }
        let guess = ShockGuess {
            control: [start, c, foot],
            curve: ShockCurve { points: vec![] },
        };
        let mut points = Vec::with_capacity(n_segments + 1);
        for j in 0..=n_segments {
            let eta = start[1] * (1.0 - j as f64 / n_segments as f64);
            if j == 0 {
                points.push(start);
            } else if j == n_segments {
                points.push(foot);
            } else {
                // eta(t) decreases monotonically from start.y to 0
                let (lo, hi) = crate::roots::bisect(|t| guess.point(t)[1] - eta, 0.0, 1.0, 0.0)?;
                let p = guess.point(0.5 * (lo + hi));
                points.push([p[0], eta]);
            }
        }
        let curve = ShockCurve { points };
        if curve.clearance(&sonic1) > 0.0 {
            return Ok(ShockGuess {
                control: guess.control,
                curve,
            });
        }
    }
    Err(Error::GuessInfeasible(
        "no Bezier in the family clears the sonic circle of state (1)".into(),
    ))
}
