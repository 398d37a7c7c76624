//! Uniform states of the self-similar problem, the incident shock, jump
//! residuals and the normal-reflection solution.
//!
//! A uniform state with velocity `(u, v)` has pseudo-potential
//! `phi = -(xi^2 + eta^2)/2 + u xi + v eta + k`. Its constant `k` is not free:
//! the Bernoulli law with the gauge pinned at state (0) forces
//! `(u^2 + v^2)/2 + k = h(rho0) - h(rho)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::GasModel;
use crate::roots;

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformState {
    pub u: f64,
    pub v: f64,
    pub rho: f64,
    pub k: f64,
}

/// The vertical incident shock `{xi = xi0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IncidentShock {
    pub xi0: f64,
}

/// The wedge-angle-`pi/2` solution: state (2) at rest behind a flat shock at `xi_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalReflection {
    pub rho2_bar: f64,
    pub xi_bar: f64,
    pub state2: UniformState,
}

/// Value, pseudo-velocity and density of a uniform state at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateSample {
    pub phi: f64,
    pub pseudo_velocity: [f64; 2],
    pub density: f64,
}

impl UniformState {
    /// Builds the state with velocity `(u, v)` and density `rho`, fixing `k`
    /// from the Bernoulli law.
    pub fn from_bernoulli(gas: &GasModel, u: f64, v: f64, rho: f64) -> Result<Self> {
        let k = gas.bernoulli_constant() - gas.enthalpy(rho)? - 0.5 * (u * u + v * v);
        Ok(Self { u, v, rho, k })
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.u, self.v]
    }

    pub fn speed(&self) -> f64 {
        self.u.hypot(self.v)
    }

    pub fn phi(&self, p: Point) -> f64 {
        -0.5 * (p[0] * p[0] + p[1] * p[1]) + self.u * p[0] + self.v * p[1] + self.k
    }

    pub fn pseudo_velocity(&self, p: Point) -> [f64; 2] {
        [self.u - p[0], self.v - p[1]]
    }

    pub fn evaluate(&self, p: Point) -> StateSample {
        StateSample {
            phi: self.phi(p),
            pseudo_velocity: self.pseudo_velocity(p),
            density: self.rho,
        }
    }

    /// Relative defect of the Bernoulli identity for this state.
    pub fn bernoulli_defect(&self, gas: &GasModel) -> Result<f64> {
        let lhs = 0.5 * (self.u * self.u + self.v * self.v) + self.k;
        let rhs = gas.bernoulli_constant() - gas.enthalpy(self.rho)?;
        Ok((lhs - rhs).abs() / lhs.abs().max(rhs.abs()).max(1.0))
    }
}

/// Free-function form of [`UniformState::evaluate`].
pub fn evaluate_state(state: &UniformState, point: Point) -> StateSample {
    state.evaluate(point)
}

/// Quiescent upstream state: at rest, `k = 0`.
pub fn state0(gas: &GasModel) -> UniformState {
    UniformState {
        u: 0.0,
        v: 0.0,
        rho: gas.rho0(),
        k: 0.0,
    }
}

fn check_incident(gas: &GasModel, rho1: f64) -> Result<()> {
    let rho0 = gas.rho0();
    if !(rho1 > rho0) || !rho1.is_finite() {
        return Err(Error::NoIncidentShock { rho0, rho1 });
    }
    Ok(())
}

/// Velocity behind the incident shock from the mass and potential jump
/// conditions at `{xi = xi0}` together with Bernoulli:
/// `u1^2 = 2 (rho1 - rho0)(h(rho1) - h(rho0)) / (rho1 + rho0)`.
pub fn incident_velocity(gas: &GasModel, rho1: f64) -> Result<f64> {
    check_incident(gas, rho1)?;
    let rho0 = gas.rho0();
    let dh = gas.enthalpy(rho1)? - gas.enthalpy(rho0)?;
    Ok((2.0 * (rho1 - rho0) * dh / (rho1 + rho0)).sqrt())
}

/// State (1) behind the incident shock, and the shock position.
pub fn solve_state1(gas: &GasModel, rho1: f64) -> Result<(UniformState, IncidentShock)> {
    let u1 = incident_velocity(gas, rho1)?;
    let xi0 = rho1 * u1 / (rho1 - gas.rho0());
    let state = UniformState {
        u: u1,
        v: 0.0,
        rho: rho1,
        k: -u1 * xi0,
    };
    Ok((state, IncidentShock { xi0 }))
}

/// The closed form printed alongside the attachment criterion,
/// `(rho1 - rho0) sqrt(2 (rho1^(g-1) - rho0^(g-1)) / (rho1^2 - rho0^2))`.
///
/// Coincides with [`incident_velocity`] only at `gamma = 2`; kept for comparison.
pub fn closed_form_u1(gas: &GasModel, rho1: f64) -> Result<f64> {
    check_incident(gas, rho1)?;
    let rho0 = gas.rho0();
    let g1 = gas.gamma() - 1.0;
    Ok(
        (rho1 - rho0)
            * (2.0 * (rho1.powf(g1) - rho0.powf(g1)) / (rho1 * rho1 - rho0 * rho0)).sqrt(),
    )
}

/// Jumps `(phi_A - phi_B, rho_A Dphi_A . nu - rho_B Dphi_B . nu)` at `point`.
pub fn rh_residual(
    a: &UniformState,
    b: &UniformState,
    point: Point,
    normal: [f64; 2],
) -> Result<(f64, f64)> {
    let len = normal[0].hypot(normal[1]);
    if (len - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "normal must have unit length, got {len}"
        )));
    }
    let da = a.pseudo_velocity(point);
    let db = b.pseudo_velocity(point);
    let jump_phi = a.phi(point) - b.phi(point);
    let jump_flux = a.rho * (da[0] * normal[0] + da[1] * normal[1])
        - b.rho * (db[0] * normal[0] + db[1] * normal[1]);
    Ok((jump_phi, jump_flux))
}

/// Normal reflection off the wall `{xi = 0}`: the state behind the reflected
/// shock is at rest, and its density is the unique root above `rho1` of
/// `h(rho0) - h(x) - u1 xi(x) - k1 = 0` with `xi(x) = rho1 u1 / (rho1 - x)`.
pub fn normal_reflection(gas: &GasModel, rho1: f64) -> Result<NormalReflection> {
    let (s1, _) = solve_state1(gas, rho1)?;
    let u1 = s1.u;
    let b = gas.bernoulli_constant();
    let shock_pos = |x: f64| rho1 * u1 / (rho1 - x);
    // Strictly decreasing on (rho1, inf), +inf at rho1+.
    let residual = |x: f64| {
        if x <= rho1 {
            return f64::INFINITY;
        }
        let h = (x.powf(gas.gamma() - 1.0) - 1.0) / (gas.gamma() - 1.0);
        b - h - u1 * shock_pos(x) - s1.k
    };
    let mut hi = 100.0 * rho1;
    while residual(hi) > 0.0 {
        hi *= 10.0;
        if hi > 1e6 * rho1 {
            return Err(Error::Bracket(format!(
                "normal reflection density not bracketed below {hi}"
            )));
        }
    }
    // The lower end sits at rho1 where the residual is +inf.
    let rho2_bar = roots::bracketed_root(residual, rho1, hi)?;
    let xi_bar = shock_pos(rho2_bar);
    let state2 = UniformState::from_bernoulli(gas, 0.0, 0.0, rho2_bar)?;
    Ok(NormalReflection {
        rho2_bar,
        xi_bar,
        state2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas(gamma: f64) -> GasModel {
        GasModel::new(gamma, 1.0).unwrap()
    }

    /// Independent route: bisection on `u1` of the combined
    /// potential-continuity / mass-flux / Bernoulli system.
    fn u1_oracle(gamma: f64, rho0: f64, rho1: f64) -> f64 {
        let h = |r: f64| (r.powf(gamma - 1.0) - 1.0) / (gamma - 1.0);
        let f = |u: f64| {
            let xi0 = rho1 * u / (rho1 - rho0);
            let k1 = -u * xi0;
            0.5 * u * u + k1 - (h(rho0) - h(rho1))
        };
        // f(0) = h1 - h0 > 0, f decreasing in u
        let (mut lo, mut hi) = (0.0, 1.0);
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn state0_is_gauge_origin() {
        let g = GasModel::new(1.4, 2.0).unwrap();
        let s = state0(&g);
        assert_eq!(
            s,
            UniformState {
                u: 0.0,
                v: 0.0,
                rho: 2.0,
                k: 0.0
            }
        );
        assert_eq!(s.bernoulli_defect(&g).unwrap(), 0.0);
        assert_eq!(s.pseudo_velocity([1.0, 2.0]), [-1.0, -2.0]);
    }

    #[test]
    fn state1_gamma2() {
        let (s1, shock) = solve_state1(&gas(2.0), 2.0).unwrap();
        assert!((s1.u - 0.816_497).abs() < 1e-6);
        assert!((shock.xi0 - 1.632_993).abs() < 1e-6);
        assert!((s1.k + 4.0 / 3.0).abs() < 1e-6);
        assert!((s1.u - u1_oracle(2.0, 1.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn state1_gamma14_matches_oracle() {
        let (s1, _) = solve_state1(&gas(1.4), 2.0).unwrap();
        assert!((s1.u - 0.729_738).abs() < 1e-5);
        assert!((s1.u - u1_oracle(1.4, 1.0, 2.0)).abs() < 1e-12);
    }

    #[test]
    fn weak_incident_shock_limit() {
        let (s1, _) = solve_state1(&gas(1.4), 1.0 + 1e-10).unwrap();
        assert!(s1.u < 1e-9);
    }

    #[test]
    fn incident_shock_requires_compression() {
        assert!(matches!(
            solve_state1(&gas(2.0), 1.0),
            Err(Error::NoIncidentShock { .. })
        ));
        assert!(matches!(
            closed_form_u1(&gas(2.0), 0.5),
            Err(Error::NoIncidentShock { .. })
        ));
    }

    #[test]
    fn printed_u1_formula() {
        assert!((closed_form_u1(&gas(2.0), 2.0).unwrap() - 0.816_497).abs() < 1e-6);
        assert!((closed_form_u1(&gas(1.4), 2.0).unwrap() - 0.461_525).abs() < 1e-6);
        assert!(closed_form_u1(&gas(1.4), 1.0 + 1e-12).unwrap() < 1e-9);
    }

    #[test]
    fn evaluate_examples() {
        let s = state0(&gas(2.0)).evaluate([0.0, 0.0]);
        assert_eq!(s.phi, 0.0);
        assert_eq!(s.pseudo_velocity, [0.0, 0.0]);
        let st = UniformState {
            u: 1.0,
            v: 0.0,
            rho: 1.0,
            k: -1.0,
        };
        let s = evaluate_state(&st, [1.0, 1.0]);
        assert_eq!(s.phi, -1.0);
        assert_eq!(s.pseudo_velocity, [0.0, -1.0]);
    }

    #[test]
    fn rh_residual_examples() {
        let g = gas(2.0);
        let s0 = state0(&g);
        let (s1, shock) = solve_state1(&g, 2.0).unwrap();
        for eta in [-3.0, 0.0, 0.5, 10.0] {
            let (a, b) = rh_residual(&s0, &s1, [shock.xi0, eta], [1.0, 0.0]).unwrap();
            assert!(a.abs() < 1e-12 && b.abs() < 1e-12);
        }
        assert_eq!(
            rh_residual(&s1, &s1, [0.3, 0.7], [0.6, 0.8]).unwrap(),
            (0.0, 0.0)
        );
        let (a, _) = rh_residual(&s0, &s1, [shock.xi0 + 1.0, 0.0], [1.0, 0.0]).unwrap();
        assert!((a + s1.u).abs() < 1e-12);
        assert!(rh_residual(&s0, &s1, [0.0, 0.0], [1.0, 1.0]).is_err());
    }

    #[test]
    fn normal_reflection_gamma2() {
        let g = gas(2.0);
        let nr = normal_reflection(&g, 2.0).unwrap();
        assert!((nr.rho2_bar - 10.0 / 3.0).abs() < 1e-9);
        assert!((nr.xi_bar + 1.224_745).abs() < 1e-6);
        // 3x^2 - 13x + 10 = 0 has roots 1 and 10/3; the root x = 1 would put
        // the reflected shock at xi > 0.
        let spurious_xi = 2.0 * (2.0f64 / 3.0).sqrt() / (2.0 - 1.0);
        assert!(spurious_xi > 0.0);
        // all three relations
        let (s1, _) = solve_state1(&g, 2.0).unwrap();
        let s2 = nr.state2;
        let p = [nr.xi_bar, 0.0];
        assert!((s1.phi(p) - s2.phi(p)).abs() < 1e-10);
        assert!((s1.rho * (s1.u - nr.xi_bar) + nr.rho2_bar * nr.xi_bar).abs() < 1e-10);
        assert!(s2.bernoulli_defect(&g).unwrap() < 1e-12);
    }

    #[test]
    fn normal_reflection_acoustic_limit() {
        let g = gas(1.4);
        let nr = normal_reflection(&g, 1.0 + 1e-6).unwrap();
        assert!((nr.rho2_bar - 1.0).abs() < 1e-3);
        assert!((nr.xi_bar + g.sound_speed(1.0).unwrap()).abs() < 1e-3);
    }
}
