use num_complex::Complex64;

use sparseres::bridge::{build_from_hint, emit_am_plan, load_am_plan};
use sparseres::library;
use sparseres::oracle::system_roots;
use sparseres::poly::{normalized_residual, CoefficientAssignment};
use sparseres::resgen::{emit_plan, generate, load_plan, GenConfig, SolverPlan, Variant};
use sparseres::runtime::{benchmark, fill, recover, solve_instance, InstanceGenerator, UnitNormal, REAL_TOL};

fn plan_for(name: &str, variant: Variant) -> SolverPlan {
    let cfg = GenConfig {
        variants: vec![variant],
        ..GenConfig::default()
    };
    generate(&library::get(name).unwrap(), &cfg).unwrap()
}

fn unit_circle_hyperbola() -> CoefficientAssignment {
    // x^2 + y^2 - 1, x y - 1/4
    CoefficientAssignment::from_pairs([("a1", 1.0), ("a2", 1.0), ("a3", -1.0), ("b1", 1.0), ("b2", -0.25)])
}

#[test]
fn plans_round_trip_through_text() {
    for name in library::names() {
        let sys = library::get(name).unwrap();
        let Ok(p) = generate(&sys, &GenConfig::default()) else { continue };
        let text = emit_plan(&p);
        let back = load_plan(&text).unwrap();
        assert_eq!(emit_plan(&back), text, "{name}");
    }
}

#[test]
fn am_plan_round_trips() {
    for name in ["univariate", "two_conics", "three_quadrics"] {
        let am = build_from_hint(&library::get(name).unwrap(), 1).unwrap();
        let text = emit_am_plan(&am);
        assert_eq!(emit_am_plan(&load_am_plan(&text).unwrap()), text, "{name}");
    }
}

#[test]
fn two_conics_closed_form() {
    // x^2 = t with t^2 - t + 1/16 = 0
    let d = (1.0f64 - 0.25).sqrt();
    let ts = [(1.0 + d) / 2.0, (1.0 - d) / 2.0];
    let mut expected = Vec::new();
    for t in ts {
        for s in [1.0, -1.0] {
            let x = s * t.sqrt();
            expected.push((x, 0.25 / x));
        }
    }
    for v in [Variant::V1, Variant::V2] {
        let p = plan_for("two_conics", v);
        let sol = solve_instance(&p, &unit_circle_hyperbola(), REAL_TOL).unwrap();
        assert_eq!(sol.real().count(), 4, "{v:?}");
        for (x, y) in &expected {
            let hit = sol
                .roots
                .iter()
                .any(|r| (r.point[0] - x).norm() < 1e-9 && (r.point[1] - y).norm() < 1e-9);
            assert!(hit, "{v:?}: ({x}, {y}) missing");
        }
        for r in &sol.roots {
            assert!(r.residual < 1e-8);
        }
    }
}

#[test]
fn residuals_are_recomputed_from_the_template() {
    let p = plan_for("three_quadrics", Variant::V1);
    let g = UnitNormal::for_plan(&p, 21);
    for t in 0..5 {
        let c = g.instance(t);
        let sol = solve_instance(&p, &c, REAL_TOL).unwrap();
        assert!(sol.len() <= p.n_solutions());
        for r in &sol.roots {
            let direct = normalized_residual(&p.system, &c, &r.point).unwrap();
            assert_eq!(direct, r.residual);
        }
    }
}

#[test]
fn hidden_coordinates_are_eigenvalues() {
    for name in ["two_conics", "three_quadrics", "example1"] {
        let sys = library::get(name).unwrap();
        let p = generate(&sys, &GenConfig::default()).unwrap();
        let g = UnitNormal::for_plan(&p, 5);
        for t in 0..10 {
            let c = g.instance(t);
            let oracle = system_roots(&sys, &c).unwrap();
            let sol = solve_instance(&p, &c, REAL_TOL).unwrap();
            for o in &oracle.points {
                let xk = o[p.hidden];
                let best = sol
                    .roots
                    .iter()
                    .map(|r| (r.point[p.hidden] - xk).norm() / (1.0 + xk.norm()))
                    .fold(f64::INFINITY, f64::min);
                assert!(best < 1e-6, "{name} trial {t}: {xk} off by {best:e}");
            }
        }
    }
}

#[test]
fn variants_agree_on_true_roots() {
    let sys = library::get("two_conics").unwrap();
    let p1 = plan_for("two_conics", Variant::V1);
    let p2 = plan_for("two_conics", Variant::V2);
    let g = UnitNormal::new(sys.slots(), 8);
    for t in 0..20 {
        let c = g.instance(t);
        let a = solve_instance(&p1, &c, REAL_TOL).unwrap();
        let b = solve_instance(&p2, &c, REAL_TOL).unwrap();
        for r in a.roots.iter().filter(|r| r.residual < 1e-8) {
            let close = b.roots.iter().any(|s| {
                r.point.iter().zip(&s.point).all(|(u, v)| (u - v).norm() <= 1e-6 * (1.0 + u.norm()))
            });
            assert!(close, "trial {t}: {:?}", r.point);
        }
    }
}

#[test]
fn recovery_from_monomial_vector() {
    let p = plan_for("three_quadrics", Variant::V1);
    let point = [Complex64::new(0.7, 0.2), Complex64::new(-1.3, 0.0), Complex64::new(0.4, -0.9)];
    let v: Vec<Complex64> = p.b1().iter().map(|m| m.eval(&point)).collect();
    for scale in [Complex64::new(1.0, 0.0), Complex64::new(-3.0, 2.5), Complex64::new(0.0, 1e-3)] {
        let w: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
        let got = recover(&w, &p, point[p.hidden]).unwrap();
        for (a, b) in got.iter().zip(&point) {
            assert!((a - b).norm() < 1e-12, "{got:?}");
        }
    }
}

#[test]
fn example1_unit_coefficients_fill() {
    let sys = library::get("example1").unwrap();
    let p = generate(&sys, &GenConfig::default()).unwrap();
    let c = CoefficientAssignment(sys.slots().into_iter().map(|s| (s, 1.0)).collect());
    let inst = fill(&p, &c).unwrap();
    let m = inst.matrix_at(Complex64::new(0.5, 0.0));
    assert_eq!((m.rows(), m.cols()), (p.eps(), p.eps()));
}

#[test]
fn zero_instance_fails_and_univariate_never_does() {
    let p = plan_for("univariate", Variant::V1);
    let zero = |_t: u64| CoefficientAssignment::from_pairs([("a", 0.0), ("b", 0.0), ("c", 0.0)]);
    assert!(solve_instance(&p, &zero(0), REAL_TOL).is_err());
    let rep = benchmark(&p, &zero, 10, 1e-3, false);
    assert_eq!(rep.fail_pct, 100.0);

    let rep = benchmark(&p, &UnitNormal::for_plan(&p, 1), 1000, 1e-3, false);
    assert_eq!(rep.fail_pct, 0.0);
    assert_eq!(rep.n_solutions_histogram.values().sum::<usize>(), 1000);
    assert!(rep.timing_us.is_none());
}

#[test]
fn zero_coordinate_roots_sit_off_the_torus() {
    // x (a1 y + a2) and a line: one root has x = 0, which the sparse
    // resultant does not see.
    let sys = library::get("zero_root").unwrap();
    let p = generate(&sys, &GenConfig::default()).unwrap();
    assert_eq!(p.n_solutions(), 1);
    let c = CoefficientAssignment::from_pairs([("a1", 1.0), ("a2", -2.0), ("b1", 1.0), ("b2", 1.0), ("b3", -3.0)]);
    let sol = solve_instance(&p, &c, REAL_TOL).unwrap();
    // y = 2, x = 1
    assert_eq!(sol.len(), 1);
    assert!((sol.roots[0].point[0] - 1.0).norm() < 1e-10);
    assert!((sol.roots[0].point[1] - 2.0).norm() < 1e-10);
}
