//! Polar roots and transition angles against values from the independent
//! oracle in `oracles/polar_oracle.py` (shock-angle parametrisation, 40-digit
//! arithmetic).

use serde_json::Value;
use wedgeflow_core::polar::{solve_roots, transition_angles, RootSet};
use wedgeflow_core::Problem;

fn golden() -> Value {
    let text = include_str!("golden/polar_gamma2_rho0_1_rho1_2.json");
    serde_json::from_str(text).unwrap()
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-300)
}

#[test]
fn golden_file_matches_its_parameters() {
    let g = golden();
    assert_eq!(g["params"]["gamma"], 2.0);
    assert_eq!(g["params"]["rho0"], 1.0);
    assert_eq!(g["params"]["rho1"], 2.0);
    assert_eq!(g["config_hash"], "aada418d5772130e");
}

#[test]
fn roots_match_oracle() {
    let g = golden();
    let pb = Problem::new(2.0, 1.0, 2.0).unwrap();
    for (name, case) in g["cases"].as_object().unwrap() {
        let theta = case["theta_rad"].as_f64().unwrap();
        let RootSet::Pair { weak, strong } = solve_roots(&pb, theta).unwrap() else {
            panic!("{name}: expected two roots");
        };
        assert_eq!(case["root_count"], 2);
        for (sol, key) in [(weak, "weak"), (strong, "strong")] {
            let want = &case[key];
            let q2 = want["q2"].as_f64().unwrap();
            let rho2 = want["rho2"].as_f64().unwrap();
            let mach = want["pseudo_mach"].as_f64().unwrap();
            assert!(
                close(sol.q2, q2, 1e-9),
                "{name} {key} q2 {} vs {q2}",
                sol.q2
            );
            assert!(
                close(sol.state2.rho, rho2, 1e-9),
                "{name} {key} rho2 {} vs {rho2}",
                sol.state2.rho
            );
            assert!(
                close(sol.pseudo_mach_at_p0, mach, 1e-9),
                "{name} {key} M {} vs {mach}",
                sol.pseudo_mach_at_p0
            );
        }
    }
}

#[test]
fn transition_angles_match_oracle() {
    let g = golden();
    let pb = Problem::new(2.0, 1.0, 2.0).unwrap();
    let t = transition_angles(&pb).unwrap();
    let td = g["theta_d"].as_f64().unwrap();
    let ts = g["theta_s"].as_f64().unwrap();
    assert!((t.theta_d - td).abs() < 1e-9, "{} vs {td}", t.theta_d);
    assert!((t.theta_s - ts).abs() < 1e-9, "{} vs {ts}", t.theta_s);
    assert!(t.theta_hat_s.is_none());
}
