//! Output documents. Field order here is the key order on the wire.

use serde::Serialize;

use wedgeflow_core::geometry::ReflectionConfiguration;
use wedgeflow_core::io::format_f64;
use wedgeflow_core::polar::{Problem, SweepRow};
use wedgeflow_core::{Branch, PolarSolution};

#[derive(Serialize)]
pub struct Angles {
    pub theta_d_deg: f64,
    pub theta_s_deg: f64,
    pub rho1_cr: Option<f64>,
    pub u1: f64,
    pub c1: f64,
    pub regime: &'static str,
}

#[derive(Serialize)]
pub struct NormalReflection {
    pub rho2_bar: f64,
    pub xi_bar: f64,
}

#[derive(Serialize)]
pub struct PolarReport {
    pub theta_deg: f64,
    pub branch: Branch,
    pub q2: f64,
    pub u2: f64,
    pub v2: f64,
    pub rho2: f64,
    pub k2: f64,
    pub c2: f64,
    pub pseudo_mach: f64,
    pub classification: &'static str,
    pub delta_margin: f64,
    pub merged: bool,
    pub p0: [f64; 2],
}

impl PolarReport {
    pub fn new(problem: &Problem, s: &PolarSolution) -> Self {
        Self {
            theta_deg: s.theta_w.to_degrees(),
            branch: s.branch,
            q2: s.q2,
            u2: s.state2.u,
            v2: s.state2.v,
            rho2: s.state2.rho,
            k2: s.state2.k,
            c2: s.sound_speed(&problem.gas),
            pseudo_mach: s.pseudo_mach_at_p0,
            classification: s.classification.as_str(),
            delta_margin: s.delta_margin,
            merged: s.merged,
            p0: s.p0,
        }
    }
}

#[derive(Serialize)]
pub struct Points {
    pub p0: [f64; 2],
    pub p1: [f64; 2],
    pub p2: [f64; 2],
    pub p3: [f64; 2],
    pub p4: [f64; 2],
}

#[derive(Serialize)]
pub struct FlatShock {
    pub point: [f64; 2],
    pub normal: [f64; 2],
    pub direction: [f64; 2],
}

#[derive(Serialize)]
pub struct Sonic {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Serialize)]
pub struct Configuration {
    pub points: Points,
    pub s1: FlatShock,
    pub sonic: Sonic,
    pub regime: &'static str,
    pub e_dir: Option<[f64; 2]>,
}

impl Configuration {
    pub fn new(c: &ReflectionConfiguration) -> Self {
        Self {
            points: Points {
                p0: c.p0,
                p1: c.p1,
                p2: c.p2,
                p3: c.p3,
                p4: c.p4,
            },
            s1: FlatShock {
                point: c.s1.point,
                normal: c.s1.normal,
                direction: c.s1.direction,
            },
            sonic: Sonic {
                center: c.sonic.center,
                radius: c.sonic.radius,
            },
            regime: c.regime.as_str(),
            e_dir: c.e_dir,
        }
    }
}

pub const SWEEP_HEADER: &str =
    "theta_deg,status,q2_weak,rho2_weak,class_weak,q2_strong,rho2_strong,class_strong,delta_margin_weak";

pub fn sweep_csv(degrees: &[f64], rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for (deg, row) in degrees.iter().zip(rows) {
        let (qw, rw, cw, dw) = match &row.weak {
            Some(b) => (
                format_f64(b.q2),
                format_f64(b.rho2),
                b.classification.as_str().to_string(),
                format_f64(b.delta_margin),
            ),
            None => Default::default(),
        };
        let (qs, rs, cs) = match &row.strong {
            Some(b) => (
                format_f64(b.q2),
                format_f64(b.rho2),
                b.classification.as_str().to_string(),
            ),
            None => Default::default(),
        };
        out.push_str(&format!(
            "{},{},{qw},{rw},{cw},{qs},{rs},{cs},{dw}\n",
            format_f64(*deg),
            row.status.as_str()
        ));
    }
    out
}

#[derive(Serialize)]
pub struct SweepEntry {
    pub theta_deg: f64,
    pub status: &'static str,
    pub q2_weak: Option<f64>,
    pub rho2_weak: Option<f64>,
    pub class_weak: Option<&'static str>,
    pub q2_strong: Option<f64>,
    pub rho2_strong: Option<f64>,
    pub class_strong: Option<&'static str>,
    pub delta_margin_weak: Option<f64>,
}

pub fn sweep_json(degrees: &[f64], rows: &[SweepRow]) -> Vec<SweepEntry> {
    degrees
        .iter()
        .zip(rows)
        .map(|(deg, row)| SweepEntry {
            theta_deg: *deg,
            status: row.status.as_str(),
            q2_weak: row.weak.map(|b| b.q2),
            rho2_weak: row.weak.map(|b| b.rho2),
            class_weak: row.weak.map(|b| b.classification.as_str()),
            q2_strong: row.strong.map(|b| b.q2),
            rho2_strong: row.strong.map(|b| b.rho2),
            class_strong: row.strong.map(|b| b.classification.as_str()),
            delta_margin_weak: row.weak.map(|b| b.delta_margin),
        })
        .collect()
}
