//! State (2) at the reflection point and the transition quantities.
//!
//! For a wedge of half-angle `theta_w` the state behind the reflected shock
//! moves along the wedge, `(u2, v2) = q2 (cos theta_w, sin theta_w)`, matches
//! state (1) in value at `P0`, and satisfies Bernoulli. The remaining mass-flux
//! condition across `S1 = {phi1 = phi2}` is a scalar equation `G(q2) = 0`.
//! It has two compressive roots (weak, strong) above the detachment angle and
//! none below it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::roots;
use crate::states::{self, IncidentShock, Point, UniformState};

/// Samples in the `q2` scan of the polar residual.
pub const SCAN_POINTS: usize = 4096;
/// `|pseudo_mach - 1|` at or below which a state is reported as sonic.
pub const SONIC_TIE: f64 = 1e-9;
/// Default `delta` for the four near-sonic cases.
pub const DEFAULT_DELTA: f64 = 0.05;
const ANGLE_TOL: f64 = 1e-10;
const ANGLE_MARGIN: f64 = 1e-4;

/// Gas plus the two states separated by the incident shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Problem {
    pub gas: GasModel,
    pub state0: UniformState,
    pub state1: UniformState,
    pub incident: IncidentShock,
}

impl Problem {
    pub fn new(gamma: f64, rho0: f64, rho1: f64) -> Result<Self> {
        let gas = GasModel::new(gamma, rho0)?;
        let state0 = states::state0(&gas);
        let (state1, incident) = states::solve_state1(&gas, rho1)?;
        Ok(Self {
            gas,
            state0,
            state1,
            incident,
        })
    }

    pub fn u1(&self) -> f64 {
        self.state1.u
    }

    pub fn c1(&self) -> f64 {
        self.gas
            .sound_speed(self.state1.rho)
            .expect("state (1) density is positive")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Weak,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Supersonic,
    Sonic,
    Subsonic,
}

impl Classification {
    pub fn from_pseudo_mach(m: f64) -> Self {
        if (m - 1.0).abs() <= SONIC_TIE {
            Classification::Sonic
        } else if m > 1.0 {
            Classification::Supersonic
        } else {
            Classification::Subsonic
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Classification::Supersonic => "supersonic",
            Classification::Sonic => "sonic",
            Classification::Subsonic => "subsonic",
        }
    }
}

/// Which of the four near-sonic regimes `|Dphi2(P0)|/c2` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SonicCase {
    /// `M >= 1 + delta`
    Supersonic,
    /// `1 + delta > M > 1`
    AlmostSonicSupersonic,
    /// `1 >= M >= 1 - delta`
    AlmostSonicSubsonic,
    /// `M < 1 - delta`
    Subsonic,
}

impl SonicCase {
    pub fn classify(pseudo_mach: f64, delta: f64) -> Self {
        if pseudo_mach >= 1.0 + delta {
            SonicCase::Supersonic
        } else if pseudo_mach > 1.0 {
            SonicCase::AlmostSonicSupersonic
        } else if pseudo_mach >= 1.0 - delta {
            SonicCase::AlmostSonicSubsonic
        } else {
            SonicCase::Subsonic
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarSolution {
    pub theta_w: f64,
    pub q2: f64,
    pub state2: UniformState,
    pub branch: Branch,
    pub classification: Classification,
    pub pseudo_mach_at_p0: f64,
    pub delta_margin: f64,
    /// Weak and strong roots coincide (wedge angle at detachment).
    pub merged: bool,
    pub p0: Point,
}

impl PolarSolution {
    pub fn sonic_case(&self, delta: f64) -> SonicCase {
        SonicCase::classify(self.pseudo_mach_at_p0, delta)
    }

    pub fn sound_speed(&self, gas: &GasModel) -> f64 {
        gas.sound_speed(self.state2.rho).expect("positive density")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionAngles {
    pub theta_d: f64,
    pub theta_s: f64,
    /// Upper end of the interval on which the weak state is proven subsonic;
    /// not computed.
    pub theta_hat_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalDensity {
    pub rho1_cr: f64,
}

/// One evaluation of the polar residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarEval {
    pub g: f64,
    pub state2: UniformState,
    pub normal: [f64; 2],
}

/// All admissible roots at one wedge angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootSet {
    None,
    Merged(PolarSolution),
    Single(PolarSolution),
    Pair {
        weak: PolarSolution,
        strong: PolarSolution,
    },
}

impl RootSet {
    pub fn exists(&self) -> bool {
        !matches!(self, RootSet::None)
    }

    pub fn branch(&self, branch: Branch) -> Option<PolarSolution> {
        match (self, branch) {
            (RootSet::None, _) => None,
            (RootSet::Merged(s) | RootSet::Single(s), b) => Some(PolarSolution { branch: b, ..*s }),
            (RootSet::Pair { weak, .. }, Branch::Weak) => Some(*weak),
            (RootSet::Pair { strong, .. }, Branch::Strong) => Some(*strong),
        }
    }
}

fn check_angle(theta_w: f64) -> Result<()> {
    if (theta_w - std::f64::consts::FRAC_PI_2).abs() < 1e-15 {
        return Err(Error::DegenerateAngle(theta_w));
    }
    if !(theta_w > 0.0 && theta_w < std::f64::consts::FRAC_PI_2) {
        return Err(Error::InvalidParameter(format!(
            "wedge angle must lie in (0, pi/2), got {theta_w}"
        )));
    }
    Ok(())
}

/// `P0`: where the incident shock meets the wedge boundary `{eta = xi tan theta_w}`.
pub fn reflection_point(incident: &IncidentShock, theta_w: f64) -> Result<Point> {
    check_angle(theta_w)?;
    Ok([incident.xi0, incident.xi0 * theta_w.tan()])
}

/// Largest `q2` for which state (2) has positive density.
pub fn cavitation_speed(problem: &Problem, theta_w: f64) -> f64 {
    let g1 = problem.gas.gamma() - 1.0;
    let b = problem.incident.xi0 / theta_w.cos();
    let a0 = problem.gas.rho0().powf(g1);
    b + (b * b + 2.0 * a0 / g1).sqrt()
}

/// `G(q2) = rho1 Dphi1(P0).nu - rho2 Dphi2(P0).nu` with `nu` along `D(phi1 - phi2)`.
pub fn polar_residual(problem: &Problem, theta_w: f64, q2: f64) -> Result<PolarEval> {
    check_angle(theta_w)?;
    if !(q2 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q2 must be >= 0, got {q2}"
        )));
    }
    let p0 = reflection_point(&problem.incident, theta_w)?;
    let (sin, cos) = theta_w.sin_cos();
    let (u2, v2) = (q2 * cos, q2 * sin);
    let s1 = &problem.state1;
    let k2 = s1.phi(p0) - (-0.5 * (p0[0] * p0[0] + p0[1] * p0[1]) + u2 * p0[0] + v2 * p0[1]);
    let argument = problem.gas.bernoulli_power_argument(q2 * q2, k2);
    let rho2 = problem.gas.density_from_power(argument)?;
    let n = [s1.u - u2, s1.v - v2];
    let len = n[0].hypot(n[1]);
    if len == 0.0 {
        return Err(Error::SingularNormal);
    }
    let normal = [n[0] / len, n[1] / len];
    let d1 = s1.pseudo_velocity(p0);
    let d2 = [u2 - p0[0], v2 - p0[1]];
    let g = s1.rho * (d1[0] * normal[0] + d1[1] * normal[1])
        - rho2 * (d2[0] * normal[0] + d2[1] * normal[1]);
    Ok(PolarEval {
        g,
        state2: UniformState {
            u: u2,
            v: v2,
            rho: rho2,
            k: k2,
        },
        normal,
    })
}

fn residual_scale(problem: &Problem, p0: Point) -> f64 {
    let d1 = problem.state1.pseudo_velocity(p0);
    problem.state1.rho * d1[0].hypot(d1[1])
}

fn make_solution(
    problem: &Problem,
    theta_w: f64,
    q2: f64,
    branch: Branch,
    merged: bool,
) -> Result<PolarSolution> {
    let eval = polar_residual(problem, theta_w, q2)?;
    let p0 = reflection_point(&problem.incident, theta_w)?;
    let c2 = problem.gas.sound_speed(eval.state2.rho)?;
    let d2 = eval.state2.pseudo_velocity(p0);
    let pseudo_mach = d2[0].hypot(d2[1]) / c2;
    Ok(PolarSolution {
        theta_w,
        q2,
        state2: eval.state2,
        branch,
        classification: Classification::from_pseudo_mach(pseudo_mach),
        pseudo_mach_at_p0: pseudo_mach,
        delta_margin: (pseudo_mach - 1.0).abs(),
        merged,
        p0,
    })
}

/// Finds every compressive root of `G` on `(0, q_vac)`.
///
/// A scan, cubically refined towards `q = 0`, brackets sign changes; discrete local minima of `|G|` are
/// refined by golden section so that nearly merged pairs inside one scan cell
/// are not missed.
pub fn solve_roots(problem: &Problem, theta_w: f64) -> Result<RootSet> {
    check_angle(theta_w)?;
    let p0 = reflection_point(&problem.incident, theta_w)?;
    let scale = residual_scale(problem, p0);
    let q_vac = cavitation_speed(problem, theta_w);
    let g = |q: f64| {
        polar_residual(problem, theta_w, q)
            .map(|e| e.g)
            .unwrap_or(f64::NAN)
    };

    let qs: Vec<f64> = (0..=SCAN_POINTS)
        .map(|k| {
            if k == SCAN_POINTS {
                q_vac * (1.0 - 1e-12)
            } else {
                // cubic spacing: near normal incidence the weak root is
                // O((pi/2 - theta_w)^2) relative to q_vac
                let s = k as f64 / SCAN_POINTS as f64;
                q_vac * s * s * s
            }
        })
        .collect();
    let gs: Vec<f64> = qs.iter().map(|&q| g(q)).collect();

    // (q, merged)
    let mut found: Vec<(f64, bool)> = Vec::new();
    for k in 0..SCAN_POINTS {
        let (a, b) = (gs[k], gs[k + 1]);
        if a.is_nan() || b.is_nan() {
            continue;
        }
        if a == 0.0 {
            found.push((qs[k], false));
        } else if a * b < 0.0 {
            found.push((roots::bracketed_root(g, qs[k], qs[k + 1])?, false));
        }
    }
    for k in 1..SCAN_POINTS {
        let (a, b, c) = (gs[k - 1], gs[k], gs[k + 1]);
        if a.is_nan() || b.is_nan() || c.is_nan() {
            continue;
        }
        let same_sign = a * b > 0.0 && b * c > 0.0;
        if !(same_sign && b.abs() <= a.abs() && b.abs() <= c.abs()) {
            continue;
        }
        let (x, gx) = roots::golden_extremum(g, qs[k - 1], qs[k + 1], b < 0.0);
        if gx.abs() <= 1e-13 * scale {
            found.push((x, true));
        } else if gx * b < 0.0 {
            found.push((roots::bracketed_root(g, qs[k - 1], x)?, false));
            found.push((roots::bracketed_root(g, x, qs[k + 1])?, false));
        }
    }

    let mut admissible: Vec<(PolarSolution, bool)> = Vec::new();
    for (q, merged) in found {
        let s = make_solution(problem, theta_w, q, Branch::Weak, merged)?;
        if s.state2.rho > problem.state1.rho {
            admissible.push((s, merged));
        }
    }
    admissible.sort_by(|a, b| a.0.state2.rho.total_cmp(&b.0.state2.rho));
    admissible.dedup_by(|a, b| (a.0.q2 - b.0.q2).abs() <= 1e-14 * q_vac);

    Ok(match admissible.as_slice() {
        [] => RootSet::None,
        [(only, true)] => RootSet::Merged(*only),
        // the other root of the pair is expansive and was filtered out
        [(only, false)] => RootSet::Single(*only),
        [first, .., last] => {
            let weak = first.0;
            let mut strong = last.0;
            strong.branch = Branch::Strong;
            let merged = (strong.q2 - weak.q2).abs() <= 1e-8 * q_vac;
            if merged {
                RootSet::Merged(PolarSolution {
                    merged: true,
                    ..weak
                })
            } else {
                RootSet::Pair { weak, strong }
            }
        }
    })
}

/// Solves for state (2) on the requested branch.
pub fn solve_state2(problem: &Problem, theta_w: f64, branch: Branch) -> Result<PolarSolution> {
    solve_roots(problem, theta_w)?
        .branch(branch)
        .ok_or(Error::NoRoot { theta_w })
}

pub fn state2_exists(problem: &Problem, theta_w: f64) -> Result<bool> {
    Ok(solve_roots(problem, theta_w)?.exists())
}

/// Smallest wedge angle with a state (2), to `1e-10` rad.
pub fn detachment_angle(problem: &Problem) -> Result<f64> {
    let lo = ANGLE_MARGIN;
    let hi = std::f64::consts::FRAC_PI_2 - ANGLE_MARGIN;
    if state2_exists(problem, lo)? || !state2_exists(problem, hi)? {
        return Err(Error::Bracket(format!(
            "state (2) existence does not switch on ({lo}, {hi})"
        )));
    }
    let mut failure = None;
    let (a, b) = roots::bisect_predicate(
        |t| match state2_exists(problem, t) {
            Ok(e) => e,
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        lo,
        hi,
        ANGLE_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(0.5 * (a + b))
}

fn weak_mach_minus_one(problem: &Problem, theta_w: f64) -> Result<f64> {
    Ok(solve_state2(problem, theta_w, Branch::Weak)?.pseudo_mach_at_p0 - 1.0)
}

/// Angle at which the weak state (2) is sonic at `P0`, given the detachment angle.
///
/// Requires exactly one sign change of `M_weak - 1` over a scan of
/// `(theta_d, pi/2)`.
pub fn sonic_angle_from(problem: &Problem, theta_d: f64) -> Result<f64> {
    let lo = theta_d + 1e-7;
    let hi = std::f64::consts::FRAC_PI_2 - ANGLE_MARGIN;
    let n = 96;
    // denser near detachment where the classification usually changes
    let thetas: Vec<f64> = (0..=n)
        .map(|k| {
            let s = k as f64 / n as f64;
            lo + (hi - lo) * s * s
        })
        .collect();
    let vals = thetas
        .iter()
        .map(|&t| weak_mach_minus_one(problem, t))
        .collect::<Result<Vec<_>>>()?;
    let crossings: Vec<usize> = (0..n).filter(|&k| vals[k] * vals[k + 1] < 0.0).collect();
    if crossings.len() != 1 {
        return Err(Error::NonMonotoneClassification {
            crossings: crossings.len(),
        });
    }
    let k = crossings[0];
    let rising = vals[k] < 0.0;
    let mut failure = None;
    let (a, b) = roots::bisect_predicate(
        |t| match weak_mach_minus_one(problem, t) {
            Ok(v) => (v > 0.0) == rising,
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        thetas[k],
        thetas[k + 1],
        ANGLE_TOL,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(0.5 * (a + b))
}

pub fn sonic_angle(problem: &Problem) -> Result<f64> {
    sonic_angle_from(problem, detachment_angle(problem)?)
}

pub fn transition_angles(problem: &Problem) -> Result<TransitionAngles> {
    let theta_d = detachment_angle(problem)?;
    let theta_s = sonic_angle_from(problem, theta_d)?;
    Ok(TransitionAngles {
        theta_d,
        theta_s,
        theta_hat_s: None,
    })
}

/// `rho1` at which `u1 = c1`; `u1 <= c1` exactly for `rho1 <= rho1_cr`.
///
/// With the enthalpy normalisation used here `u1/c1` stays below
/// `sqrt(2/(gamma-1))`, so no crossing exists for `gamma >= 3`.
pub fn critical_density(gas: &GasModel) -> Result<CriticalDensity> {
    let rho0 = gas.rho0();
    let f = |rho1: f64| -> f64 {
        let u1 = states::incident_velocity(gas, rho1).unwrap_or(0.0);
        u1 - gas.sound_speed(rho1).unwrap_or(f64::NAN)
    };
    let cap = 1e12 * rho0;
    let mut hi = 2.0 * rho0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::NoCriticalDensity { searched_to: cap });
        }
    }
    let rho1_cr = roots::bracketed_root(f, rho0, hi)?;
    Ok(CriticalDensity { rho1_cr })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RootStatus {
    TwoRoots,
    Merged,
    SingleRoot,
    NoRoot,
    Error,
}

impl RootStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            RootStatus::TwoRoots => "two_roots",
            RootStatus::Merged => "merged",
            RootStatus::SingleRoot => "single_root",
            RootStatus::NoRoot => "no_root",
            RootStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchSummary {
    pub q2: f64,
    pub rho2: f64,
    pub classification: Classification,
    pub delta_margin: f64,
}

impl From<&PolarSolution> for BranchSummary {
    fn from(s: &PolarSolution) -> Self {
        Self {
            q2: s.q2,
            rho2: s.state2.rho,
            classification: s.classification,
            delta_margin: s.delta_margin,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta_w: f64,
    pub status: RootStatus,
    pub weak: Option<BranchSummary>,
    pub strong: Option<BranchSummary>,
}

/// One row per angle, in input order.
pub fn sweep(problem: &Problem, angles: &[f64]) -> Vec<SweepRow> {
    angles
        .par_iter()
        .map(|&theta_w| match solve_roots(problem, theta_w) {
            Ok(RootSet::None) => SweepRow {
                theta_w,
                status: RootStatus::NoRoot,
                weak: None,
                strong: None,
            },
            Ok(RootSet::Merged(s)) => SweepRow {
                theta_w,
                status: RootStatus::Merged,
                weak: Some((&s).into()),
                strong: Some((&s).into()),
            },
            Ok(RootSet::Single(s)) => SweepRow {
                theta_w,
                status: RootStatus::SingleRoot,
                weak: Some((&s).into()),
                strong: Some((&s).into()),
            },
            Ok(RootSet::Pair { weak, strong }) => SweepRow {
                theta_w,
                status: RootStatus::TwoRoots,
                weak: Some((&weak).into()),
                strong: Some((&strong).into()),
            },
            Err(_) => SweepRow {
                theta_w,
                status: RootStatus::Error,
                weak: None,
                strong: None,
            },
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn problem() -> Problem {
        Problem::new(2.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn reflection_point_examples() {
        let p = reflection_point(&IncidentShock { xi0: 1.0 }, std::f64::consts::FRAC_PI_4).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        let p = reflection_point(&IncidentShock { xi0: 1.632_993 }, 60f64.to_radians()).unwrap();
        assert!((p[1] - 2.828_427).abs() < 1e-5);
        let p = reflection_point(&IncidentShock { xi0: 1.0 }, 1e-12).unwrap();
        assert!(p[1] > 0.0 && p[1] < 1e-11);
        assert!(matches!(
            reflection_point(&IncidentShock { xi0: 1.0 }, std::f64::consts::FRAC_PI_2),
            Err(Error::DegenerateAngle(_))
        ));
    }

    #[test]
    fn residual_is_finite_across_its_domain() {
        let pb = problem();
        let th = 80f64.to_radians();
        let qv = cavitation_speed(&pb, th);
        for k in 0..10_000 {
            let q = qv * k as f64 / 10_000.0;
            let e = polar_residual(&pb, th, q).unwrap();
            assert!(e.g.is_finite());
        }
        assert!(matches!(
            polar_residual(&pb, th, qv * 1.01),
            Err(Error::Vacuum { .. })
        ));
    }

    #[test]
    fn sonic_tie_is_reported() {
        assert_eq!(
            Classification::from_pseudo_mach(1.0 + 5e-10),
            Classification::Sonic
        );
        assert_eq!(
            Classification::from_pseudo_mach(1.0 + 5e-9),
            Classification::Supersonic
        );
        assert_eq!(SonicCase::classify(1.2, 0.05), SonicCase::Supersonic);
        assert_eq!(
            SonicCase::classify(1.02, 0.05),
            SonicCase::AlmostSonicSupersonic
        );
        assert_eq!(
            SonicCase::classify(1.0, 0.05),
            SonicCase::AlmostSonicSubsonic
        );
        assert_eq!(SonicCase::classify(0.9, 0.05), SonicCase::Subsonic);
    }

    #[test]
    fn critical_density_gamma2() {
        let gas = GasModel::new(2.0, 1.0).unwrap();
        let cr = critical_density(&gas).unwrap();
        // rho^2 - 5 rho + 2 = 0
        assert!((cr.rho1_cr - (5.0 + 17f64.sqrt()) / 2.0).abs() < 1e-9);
        let u1 = states::incident_velocity(&gas, cr.rho1_cr).unwrap();
        assert!((u1 - gas.sound_speed(cr.rho1_cr).unwrap()).abs() < 1e-10);
    }

    #[test]
    fn critical_density_absent_for_large_gamma() {
        let gas = GasModel::new(3.5, 1.0).unwrap();
        assert!(matches!(
            critical_density(&gas),
            Err(Error::NoCriticalDensity { .. })
        ));
    }

    #[test]
    fn empty_sweep() {
        assert!(sweep(&problem(), &[]).is_empty());
    }
}
